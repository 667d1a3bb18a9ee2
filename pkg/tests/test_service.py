import base64
import difflib
import json
import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
from fastapi.testclient import TestClient

from mad.service.app import create_app
from mad.service.cache import CacheStore, cache_key, package_digest
from mad.service.core import ServiceConfig, validate_package_id, InvalidPackageIdError
from mad.service.rpc import PackageNotFoundError, RpcError, fetch_package


def _wait_terminal(client, job_id, timeout=15.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        doc = client.get(f"/api/jobs/{job_id}").json()
        if doc["state"] in ("complete", "failed"):
            return doc
        time.sleep(0.02)
    raise TimeoutError(f"job {job_id} did not finish")


@pytest.fixture()
def app(tmp_path):
    return create_app(ServiceConfig(cache_dir=str(tmp_path / "cache"), backend="mock", workers=2))


@pytest.fixture()
def client(app):
    return TestClient(app)


@pytest.fixture(scope="module")
def upload_payload(fixtures_dir):
    d = fixtures_dir / "corpus" / "vault_0"
    return {
        "modules": [
            {
                "low_level": (d / "low_level.move").read_text("utf-8"),
                "disassembly": (d / "disassembly.move").read_text("utf-8"),
                "bytecode_b64": base64.b64encode(b"\x01vault-bytes").decode(),
            }
        ]
    }


# package id validation --------------------------------------------------------


def test_valid_package_id_roundtrip():
    pid = "0x" + "a" * 64
    assert validate_package_id(pid) == pid


def test_63_hex_chars_rejected():
    with pytest.raises(InvalidPackageIdError):
        validate_package_id("0x" + "a" * 63)


def test_unprefixed_rejected():
    with pytest.raises(InvalidPackageIdError):
        validate_package_id("a" * 64)


# offline e2e --------------------------------------------------------------------


def test_upload_e2e_serves_all_five_views(client, upload_payload):
    started = time.monotonic()
    r = client.post("/api/decompile", json=upload_payload)
    assert r.status_code == 200
    job = _wait_terminal(client, r.json()["job_id"])
    assert job["state"] == "complete"
    assert job["progress"]["done"] == job["progress"]["total"] > 0

    modules = client.get("/api/packages/local/modules").json()["modules"]
    assert modules == ["vault_0"]
    for view in ("bytecode", "disassembly", "low_level", "interface", "decompiled"):
        resp = client.get(f"/api/packages/local/modules/vault_0/views/{view}")
        assert resp.status_code == 200
        assert resp.text.strip(), f"view {view} is empty"
    assert time.monotonic() - started < 10.0


def test_cache_hit_makes_zero_backend_calls(app, client, upload_payload):
    r1 = client.post("/api/decompile", json=upload_payload)
    _wait_terminal(client, r1.json()["job_id"])
    service = app.state.service
    calls_before = service.client.calls

    r2 = client.post("/api/decompile", json=upload_payload)
    assert r2.json()["state"] == "complete"  # synchronous completion on hit
    job = _wait_terminal(client, r2.json()["job_id"])
    assert job["state"] == "complete"
    assert service.client.calls == calls_before


def test_decompiled_view_is_verified(client, app, upload_payload):
    r = client.post("/api/decompile", json=upload_payload)
    _wait_terminal(client, r.json()["job_id"])
    doc = client.get("/api/packages/local/modules/vault_0/verification").json()
    assert doc["verification"]["findings"] == []
    assert doc["verification"]["module_level"]["all_functions_present"]


def test_malformed_package_id_rejected(client):
    r = client.post("/api/decompile", json={"package_id": "0x" + "b" * 63})
    assert r.status_code == 400
    assert r.json()["error"] == "InvalidPackageId"


def test_exactly_one_submission_source(client, upload_payload):
    body = dict(upload_payload)
    body["package_id"] = "0x" + "c" * 64
    assert client.post("/api/decompile", json=body).status_code == 400
    assert client.post("/api/decompile", json={}).status_code == 400


def test_upload_too_large(tmp_path, upload_payload):
    app = create_app(
        ServiceConfig(cache_dir=str(tmp_path / "c"), backend="mock", max_upload_bytes=64)
    )
    client = TestClient(app)
    r = client.post("/api/decompile", json=upload_payload)
    assert r.status_code == 413
    assert r.json()["error"] == "UploadTooLarge"


def test_unknown_view_and_not_ready(client, upload_payload):
    r = client.get("/api/packages/local/modules/vault_0/views/decompiled")
    assert r.status_code == 409  # nothing submitted yet
    assert r.json()["error"] == "ViewNotReady"
    rr = client.post("/api/decompile", json=upload_payload)
    _wait_terminal(client, rr.json()["job_id"])
    r2 = client.get("/api/packages/local/modules/vault_0/views/sideways")
    assert r2.status_code == 404
    assert r2.json()["error"] == "UnknownView"


def test_unknown_job(client):
    assert client.get("/api/jobs/deadbeef").status_code == 404


def test_interface_view_is_render_interface_output(client, app, upload_payload, fixtures_dir):
    from mad.ir import parse_disassembly, render_interface

    r = client.post("/api/decompile", json=upload_payload)
    _wait_terminal(client, r.json()["job_id"])
    served = client.get("/api/packages/local/modules/vault_0/views/interface").text
    ir = parse_disassembly(
        (fixtures_dir / "corpus" / "vault_0" / "disassembly.move").read_text("utf-8")
    )
    assert served == render_interface(ir)


# redecompile --------------------------------------------------------------------


def test_redecompile_single_function_span(client, app, upload_payload):
    r = client.post("/api/decompile", json=upload_payload)
    _wait_terminal(client, r.json()["job_id"])
    before = client.get("/api/packages/local/modules/vault_0/views/decompiled").text
    service = app.state.service
    calls_before = service.client.calls

    r2 = client.post(
        "/api/packages/local/modules/vault_0/functions/withdraw/redecompile",
        json={"seed": 321},
    )
    assert r2.status_code == 200
    job = _wait_terminal(client, r2.json()["job_id"])
    assert job["state"] == "complete"
    assert service.client.calls == calls_before + 1  # single-chunk scope

    after = client.get("/api/packages/local/modules/vault_0/views/decompiled").text
    assert after != before
    changed = [
        line
        for line in difflib.unified_diff(before.splitlines(), after.splitlines(), lineterm="", n=0)
        if line[:1] in "+-" and not line.startswith(("+++", "---"))
    ]
    assert changed
    # every changed line belongs to the withdraw function's span
    header, chunks = __import__("mad.segmentation", fromlist=["split_functions"]).split_functions(after)
    target = next(c for c in chunks if c.name == "withdraw").raw_text
    before_target = next(
        c for c in __import__("mad.segmentation", fromlist=["split_functions"]).split_functions(before)[1]
        if c.name == "withdraw"
    ).raw_text
    for line in changed:
        body = line[1:].strip()
        assert body in target or body in before_target, line


def test_redecompile_unknown_function(client, upload_payload):
    r = client.post("/api/decompile", json=upload_payload)
    _wait_terminal(client, r.json()["job_id"])
    r2 = client.post("/api/packages/local/modules/vault_0/functions/ghost/redecompile")
    assert r2.status_code == 404
    assert r2.json()["error"] == "UnknownFunction"


def test_cache_persists_across_service_restart(tmp_path, upload_payload):
    cache_dir = str(tmp_path / "cache")
    app1 = create_app(ServiceConfig(cache_dir=cache_dir, backend="mock"))
    c1 = TestClient(app1)
    r = c1.post("/api/decompile", json=upload_payload)
    _wait_terminal(c1, r.json()["job_id"])
    views1 = {
        v: c1.get(f"/api/packages/local/modules/vault_0/views/{v}").text
        for v in ("interface", "decompiled")
    }

    app2 = create_app(ServiceConfig(cache_dir=cache_dir, backend="mock"))
    c2 = TestClient(app2)
    views2 = {
        v: c2.get(f"/api/packages/local/modules/vault_0/views/{v}").text
        for v in ("interface", "decompiled")
    }
    assert views1 == views2
    assert app2.state.service.client.calls == 0


# cache store unit ----------------------------------------------------------------


def test_cache_key_deterministic():
    a = cache_key("d1", "m", "v", "full")
    assert a == cache_key("d1", "m", "v", "full")
    assert a != cache_key("d1", "m", "v", "no-domain")


def test_cache_versions_accumulate(tmp_path):
    store = CacheStore(tmp_path)
    views = {"mod": {"decompiled": "one"}}
    e1 = store.write("k1", "local", views, {})
    e2 = store.write("k1", "local", {"mod": {"decompiled": "two"}}, {})
    assert (e1.version, e2.version) == (1, 2)
    assert store.latest("k1").view("mod", "decompiled") == "two"


def test_package_digest_order_sensitivity():
    assert package_digest([b"a", b"b"]) != package_digest([b"b", b"a"])


# stub RPC server -----------------------------------------------------------------

_NORMALIZED_FIXTURE = {
    "simple": {
        "address": "0x" + "7" * 64,
        "name": "simple",
        "structs": {},
        "exposedFunctions": {
            "ping": {
                "visibility": "Public",
                "isEntry": False,
                "typeParameters": [],
                "parameters": ["U64"],
                "return": ["Bool"],
            }
        },
    }
}


class _StubRpc(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers["Content-Length"])
        req = json.loads(self.rfile.read(length))
        method = req["method"]
        pid = req["params"][0]
        if method == "sui_getNormalizedMoveModulesByPackage":
            result = _NORMALIZED_FIXTURE if pid.endswith("7" * 8) else {}
        elif method == "sui_getObject":
            result = {
                "data": {
                    "bcs": {"moduleMap": {"simple": base64.b64encode(b"\x01\x02").decode()}}
                }
            }
        else:
            result = None
        body = json.dumps({"jsonrpc": "2.0", "id": req["id"], "result": result}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture(scope="module")
def stub_rpc_url():
    server = HTTPServer(("127.0.0.1", 0), _StubRpc)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def test_fetch_package_from_stub_server(stub_rpc_url):
    data = fetch_package("0x" + "7" * 64, stub_rpc_url)
    assert list(data.normalized) == ["simple"]
    assert data.bytecode_b64["simple"]
    from mad.ir import parse_normalized

    ir = parse_normalized(data.normalized["simple"])
    assert ir.functions[0].name == "ping"


def test_fetch_package_not_found(stub_rpc_url):
    with pytest.raises(PackageNotFoundError):
        fetch_package("0x" + "1" * 64, stub_rpc_url)


def test_fetch_package_network_refused():
    with pytest.raises(RpcError):
        fetch_package("0x" + "7" * 64, "http://127.0.0.1:9")  # discard port, refused


def test_submit_package_via_stub_rpc(tmp_path, stub_rpc_url):
    app = create_app(
        ServiceConfig(cache_dir=str(tmp_path / "c"), backend="mock", rpc_url=stub_rpc_url)
    )
    client = TestClient(app)
    pid = "0x" + "7" * 64
    r = client.post("/api/decompile", json={"package_id": pid})
    assert r.status_code == 200
    job = _wait_terminal(client, r.json()["job_id"])
    assert job["state"] == "complete"
    mods = client.get(f"/api/packages/{pid}/modules").json()["modules"]
    assert mods == ["simple"]
    # without a low-level decompiler command only IR-derived views are filled
    interface = client.get(f"/api/packages/{pid}/modules/simple/views/interface")
    assert "fun ping" in interface.text
    bytecode = client.get(f"/api/packages/{pid}/modules/simple/views/bytecode")
    assert bytecode.text == base64.b64encode(b"\x01\x02").decode()
