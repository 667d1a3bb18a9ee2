"""JSON-RPC 2.0 client for a fullnode: normalized modules + raw package bytes."""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass

import httpx

log = logging.getLogger(__name__)

_ids = itertools.count(1)


class RpcError(Exception):
    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"rpc error {status}: {detail[:200]}")
        self.status = status
        self.detail = detail


class PackageNotFoundError(Exception):
    def __init__(self, package_id: str):
        super().__init__(f"package not found: {package_id}")
        self.package_id = package_id


@dataclass
class PackageData:
    package_id: str
    normalized: dict[str, dict]  # module name -> normalized document
    bytecode_b64: dict[str, str]  # module name -> base64 module bytes


def _call(client: httpx.Client, url: str, method: str, params: list, retries: int = 2):
    last: Exception | None = None
    for attempt in range(retries + 1):
        if attempt:
            time.sleep(0.3 * 2 ** (attempt - 1))
        try:
            resp = client.post(
                url,
                json={
                    "jsonrpc": "2.0",
                    "id": next(_ids),
                    "method": method,
                    "params": params,
                },
            )
        except httpx.TransportError as e:
            last = RpcError(0, str(e))
            continue
        if resp.status_code >= 500:
            last = RpcError(resp.status_code, resp.text)
            continue
        if resp.status_code != 200:
            raise RpcError(resp.status_code, resp.text)
        doc = resp.json()
        if "error" in doc:
            raise RpcError(-1, str(doc["error"]))
        return doc.get("result")
    assert last is not None
    raise last


def fetch_package(
    package_id: str,
    rpc_url: str,
    transport: httpx.BaseTransport | None = None,
) -> PackageData:
    """Fetch normalized module documents and raw module bytes for a package."""
    with httpx.Client(transport=transport, timeout=60.0) as client:
        normalized = _call(
            client, rpc_url, "sui_getNormalizedMoveModulesByPackage", [package_id]
        )
        if not normalized:
            raise PackageNotFoundError(package_id)
        # address fields are per-module in the normalized docs; ensure present
        for name, doc in normalized.items():
            doc.setdefault("name", name)

        bytecode: dict[str, str] = {}
        obj = _call(
            client,
            rpc_url,
            "sui_getObject",
            [package_id, {"showBcs": True}],
        )
        data = (obj or {}).get("data") or {}
        if (obj or {}).get("error") or not data:
            err = (obj or {}).get("error", {})
            if isinstance(err, dict) and err.get("code") in ("notExists", "deleted"):
                raise PackageNotFoundError(package_id)
        bcs = data.get("bcs") or {}
        module_map = bcs.get("moduleMap") or {}
        for name, b64 in module_map.items():
            bytecode[name] = b64
        return PackageData(
            package_id=package_id, normalized=normalized, bytecode_b64=bytecode
        )
