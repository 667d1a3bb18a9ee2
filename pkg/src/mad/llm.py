"""Uniform completion interface over pluggable backends.

Backends:
  recorded - replays responses from an on-disk fixture store keyed by prompt
             digest; no network.
  mock     - deterministic rule-based rewrite of the chunk (renames v0/arg0
             locals to readable names, echoes structure); no network.
  remote   - chat-completions endpoint with bearer auth, pinned temperature
             and seed, bounded retries with exponential backoff, and an
             admission gate limiting concurrent in-flight requests.
"""

from __future__ import annotations

import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import httpx

from .prompts.engine import PromptBundle, bundle_digest
from .scan import ScanError, tokenize

log = logging.getLogger(__name__)


class FixtureMissError(Exception):
    def __init__(self, digest: str):
        super().__init__(f"no recorded response for prompt digest {digest}")
        self.digest = digest


class RemoteError(Exception):
    def __init__(self, status: int, body: str):
        super().__init__(f"remote backend error {status}: {body[:200]}")
        self.status = status
        self.body = body


class CompletionTimeoutError(Exception):
    pass


class ExtractionFailedError(Exception):
    pass


@dataclass
class ModelConfig:
    backend: str = "mock"  # recorded | mock | remote
    model_id: str = "mock-rewriter"
    temperature: float = 0.0
    seed: int = 123
    endpoint: str = ""
    api_key: str = ""
    max_parallel: int = 4
    retries: int = 2
    timeout_s: float = 120.0

    def __post_init__(self):
        if self.backend not in ("recorded", "mock", "remote"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be >= 1")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")

    @classmethod
    def from_env(cls, backend: str = "remote", **overrides) -> "ModelConfig":
        """Remote settings come from MAD_ENDPOINT / MAD_API_KEY / MAD_MODEL."""
        values = dict(
            backend=backend,
            endpoint=os.environ.get("MAD_ENDPOINT", ""),
            api_key=os.environ.get("MAD_API_KEY", ""),
        )
        model = os.environ.get("MAD_MODEL")
        if model:
            values["model_id"] = model
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class CompletionRecord:
    prompt_digest: str
    response_text: str
    model_id: str
    usage: tuple[int, int]  # (prompt chars, completion chars)
    latency_ms: float


class FixtureStore:
    """Directory of {digest}.txt response files plus an index manifest."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._index_path = self.root / "index.json"
        self._lock = threading.Lock()

    def _index(self) -> dict[str, str]:
        if self._index_path.is_file():
            return json.loads(self._index_path.read_text("utf-8"))
        return {}

    def get(self, digest: str) -> str | None:
        name = self._index().get(digest)
        if name is None:
            return None
        f = self.root / name
        return f.read_text("utf-8") if f.is_file() else None

    def put(self, digest: str, response_text: str) -> None:
        with self._lock:
            (self.root / f"{digest}.txt").write_text(response_text, "utf-8")
            index = self._index()
            index[digest] = f"{digest}.txt"
            self._index_path.write_text(
                json.dumps(index, indent=2, sort_keys=True), "utf-8"
            )

    def __len__(self) -> int:
        return len(self._index())


_WORDS = (
    "value", "amount", "index", "count", "result", "flag", "item", "entry",
    "balance", "owner", "sender", "recipient", "total", "current", "limit",
    "length", "position", "state", "target", "source", "remaining", "offset",
    "payload", "cursor",
)

_FENCE = re.compile(r"```[A-Za-z0-9_+-]*[ \t]*\n(.*?)```", re.DOTALL)
_LOCAL = re.compile(r"(v|arg)(\d+)$")

_CODE_STARTERS = {"module", "public", "entry", "native", "fun", "friend", "use"}


_FIRST_WORD = re.compile(r"[a-z_]+")


def _is_code_like(block: str) -> bool:
    stripped = block.lstrip()
    if stripped.startswith(("#[", "///")):
        return True
    m = _FIRST_WORD.match(stripped)
    return bool(m) and m.group() in _CODE_STARTERS


def extract_code(response_text: str) -> str:
    """Contents of the first code-like fenced block in an LLM response."""
    blocks = [m.group(1) for m in _FENCE.finditer(response_text)]
    for block in blocks:
        if _is_code_like(block):
            return block.strip("\n")
    raise ExtractionFailedError(
        f"no fenced code block found in response ({len(blocks)} fenced blocks)"
    )


def mock_rewrite(code: str, seed: int = 123) -> str:
    """Deterministic rename of v<N>/arg<N> identifiers to readable names.

    Token-aware (string literals untouched); injective per input; existing
    identifiers are never shadowed.
    """
    try:
        tokens = tokenize(code)
    except ScanError:
        return code
    taken = {t.text for t in tokens if t.kind == "ident"}
    mapping: dict[str, str] = {}

    def fresh(n: int) -> str:
        base = _WORDS[(n + seed) % len(_WORDS)]
        if n >= len(_WORDS):
            base = f"{base}_{n // len(_WORDS)}"
        while base in taken:
            base += "_v"
        taken.add(base)
        return base

    pieces: list[str] = []
    pos = 0
    for t in tokens:
        if t.kind == "ident":
            m = _LOCAL.match(t.text)
            if m:
                if t.text not in mapping:
                    n = int(m.group(2))
                    mapping[t.text] = fresh(n if m.group(1) == "v" else n + 101)
                pieces.append(code[pos: t.start])
                pieces.append(mapping[t.text])
                pos = t.end
    pieces.append(code[pos:])
    return "".join(pieces)


def _chunk_from_payload(user_payload: str) -> str:
    """The chunk is the last fenced block of the user payload."""
    blocks = [m.group(1) for m in _FENCE.finditer(user_payload)]
    return blocks[-1].strip("\n") if blocks else ""


class _CallCounter:
    def __init__(self):
        self.value = 0
        self._lock = threading.Lock()

    def bump(self):
        with self._lock:
            self.value += 1


class LlmClient:
    """Thread-safe completion client; counts backend calls for cache audits."""

    def __init__(
        self,
        cfg: ModelConfig,
        store: FixtureStore | None = None,
        transport: httpx.BaseTransport | None = None,
        _counter: _CallCounter | None = None,
    ):
        if cfg.backend == "recorded" and store is None:
            raise ValueError("recorded backend requires a fixture store")
        self.cfg = cfg
        self.store = store
        self._transport = transport
        self._gate = threading.Semaphore(cfg.max_parallel)
        self._counter = _counter or _CallCounter()

    @property
    def calls(self) -> int:
        return self._counter.value

    def derive(self, **overrides) -> "LlmClient":
        """Variant client (e.g. different seed) sharing this client's call counter."""
        from dataclasses import replace

        return LlmClient(
            replace(self.cfg, **overrides),
            store=self.store,
            transport=self._transport,
            _counter=self._counter,
        )

    def complete(self, bundle: PromptBundle) -> CompletionRecord:
        digest = bundle_digest(bundle)
        started = time.monotonic()
        self._counter.bump()
        if self.cfg.backend == "recorded":
            text = self.store.get(digest)
            if text is None:
                raise FixtureMissError(digest)
        elif self.cfg.backend == "mock":
            text = self._mock_response(bundle)
        else:
            text = self._remote_response(bundle)
        latency_ms = (time.monotonic() - started) * 1000.0
        record = CompletionRecord(
            prompt_digest=digest,
            response_text=text,
            model_id=self.cfg.model_id,
            usage=(bundle.char_count, len(text)),
            latency_ms=latency_ms,
        )
        return record

    def _mock_response(self, bundle: PromptBundle) -> str:
        chunk = _chunk_from_payload(bundle.user_payload)
        rewritten = mock_rewrite(chunk, seed=self.cfg.seed)
        return (
            "Here is the function rewritten as readable Move source:\n\n"
            f"```move\n{rewritten}\n```\n"
        )

    def _remote_response(self, bundle: PromptBundle) -> str:
        messages = [
            {"role": "system", "content": text} for _, text in bundle.system_sections
        ]
        for example_in, example_out in bundle.fewshot_pairs:
            messages.append({"role": "user", "content": example_in})
            messages.append({"role": "assistant", "content": example_out})
        messages.append({"role": "user", "content": bundle.user_payload})
        body = {
            "model": self.cfg.model_id,
            "temperature": self.cfg.temperature,
            "seed": self.cfg.seed,
            "messages": messages,
        }
        headers = {"Authorization": f"Bearer {self.cfg.api_key}"}

        last_error: Exception | None = None
        with self._gate:
            for attempt in range(self.cfg.retries + 1):
                if attempt:
                    time.sleep(0.5 * 2 ** (attempt - 1))
                try:
                    with httpx.Client(
                        transport=self._transport, timeout=self.cfg.timeout_s
                    ) as client:
                        resp = client.post(self.cfg.endpoint, json=body, headers=headers)
                except httpx.TimeoutException as e:
                    last_error = CompletionTimeoutError(str(e))
                    continue
                except httpx.TransportError as e:
                    last_error = RemoteError(0, str(e))
                    continue
                if resp.status_code >= 500:
                    last_error = RemoteError(resp.status_code, resp.text)
                    continue
                if resp.status_code != 200:
                    raise RemoteError(resp.status_code, resp.text)
                data = resp.json()
                try:
                    return data["choices"][0]["message"]["content"]
                except (KeyError, IndexError, TypeError) as e:
                    raise RemoteError(200, f"malformed response body: {e}") from e
        assert last_error is not None
        raise last_error


def complete(
    bundle: PromptBundle,
    cfg: ModelConfig,
    store: FixtureStore | None = None,
    transport: httpx.BaseTransport | None = None,
) -> CompletionRecord:
    """One-shot completion without holding a client."""
    return LlmClient(cfg, store=store, transport=transport).complete(bundle)
