"""Job orchestration for the decompilation service.

Jobs run on a bounded in-process worker pool and are not durable; the cache
carries all value across restarts. State reaches the terminal values
`complete` / `failed` monotonically through queued -> fetching ->
decompiling -> verifying.
"""

from __future__ import annotations

import base64
import logging
import os
import re
import subprocess
import tempfile
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..ir.disassembly import parse_disassembly
from ..ir.normalized import parse_normalized
from ..ir.render import render_interface
from ..ir.types import ModuleIR
from ..llm import FixtureStore, LlmClient, ModelConfig
from ..pipeline import decompile_chunk, decompile_module
from ..prompts.engine import (
    PromptAssets,
    arm_config,
    default_asset_dir,
    load_prompt_assets,
)
from ..segmentation import attach_metadata, reassemble, split_functions
from ..verifier import ToolchainConfig, verify
from .cache import CacheEntry, CacheStore, cache_key, package_digest
from .rpc import fetch_package

log = logging.getLogger(__name__)

_STATES = ("queued", "fetching", "decompiling", "verifying", "complete", "failed")

_PACKAGE_ID = re.compile(r"^0x[0-9a-fA-F]{64}$")


class InvalidPackageIdError(Exception):
    def __init__(self, package_id: str):
        super().__init__(f"invalid package id: {package_id!r}")
        self.package_id = package_id


class UploadTooLargeError(Exception):
    pass


class UnknownViewError(Exception):
    def __init__(self, view: str):
        super().__init__(f"unknown view {view!r}")
        self.view = view


class ViewNotReadyError(Exception):
    pass


class UnknownFunctionError(Exception):
    def __init__(self, name: str):
        super().__init__(f"unknown function {name!r}")
        self.name = name


def validate_package_id(package_id: str) -> str:
    if not _PACKAGE_ID.match(package_id):
        raise InvalidPackageIdError(package_id)
    return package_id.lower()


@dataclass
class ServiceConfig:
    cache_dir: str = ".mad-cache"
    backend: str = "mock"
    model_id: str | None = None
    arm: str = "full"
    prompts_dir: str | None = None
    fixture_dir: str | None = None  # recorded backend store
    rpc_url: str | None = None
    lowlevel_cmd: str | None = None
    workers: int = 2
    max_upload_bytes: int = 2 * 1024 * 1024
    run_recompile: bool = False

    @classmethod
    def from_env(cls, **overrides) -> "ServiceConfig":
        values = {
            "rpc_url": os.environ.get("MAD_RPC_URL"),
            "lowlevel_cmd": os.environ.get("MAD_LOWLEVEL_CMD"),
        }
        values.update(overrides)
        return cls(**values)


@dataclass
class DecompilationJob:
    job_id: str
    package_id: str  # on-chain id or "local"
    state: str = "queued"
    done: int = 0
    total: int = 0
    reason: str = ""
    cache_key: str = ""
    model_id: str = ""
    prompt_version: str = ""
    arm: str = "full"
    created_at: float = field(default_factory=time.time)
    updated_at: float = field(default_factory=time.time)

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "package_id": self.package_id,
            "state": self.state,
            "progress": {"done": self.done, "total": self.total},
            "reason": self.reason,
            "cache_key": self.cache_key,
            "config": {
                "model_id": self.model_id,
                "prompt_version": self.prompt_version,
                "arm": self.arm,
            },
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }


@dataclass
class UploadedModule:
    low_level: str
    disassembly: str = ""
    bytecode_b64: str = ""
    name: str = ""  # derived from the module declaration when empty


class DecompilerService:
    """Owns the cache, the completion client, and the job table."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.cache = CacheStore(config.cache_dir)
        assets_dir = Path(config.prompts_dir) if config.prompts_dir else default_asset_dir()
        self.assets: PromptAssets = load_prompt_assets(assets_dir)
        store = FixtureStore(config.fixture_dir) if config.fixture_dir else None
        model_overrides = {}
        if config.model_id:
            model_overrides["model_id"] = config.model_id
        if config.backend == "remote":
            model_cfg = ModelConfig.from_env(backend="remote", **model_overrides)
        else:
            model_cfg = ModelConfig(backend=config.backend, **model_overrides)
        self.client = LlmClient(model_cfg, store=store)
        self.toolchain = ToolchainConfig.from_env() if config.run_recompile else None
        self._jobs: dict[str, DecompilationJob] = {}
        self._jobs_lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=config.workers)

    # -- job table ----------------------------------------------------------

    def _new_job(self, package_id: str, arm: str) -> DecompilationJob:
        job = DecompilationJob(
            job_id=uuid.uuid4().hex,
            package_id=package_id,
            model_id=self.client.cfg.model_id,
            prompt_version=self.assets.digest,
            arm=arm,
        )
        with self._jobs_lock:
            self._jobs[job.job_id] = job
        return job

    def job(self, job_id: str) -> DecompilationJob | None:
        with self._jobs_lock:
            return self._jobs.get(job_id)

    def _advance(self, job: DecompilationJob, state: str, **updates) -> None:
        with self._jobs_lock:
            if job.state in ("complete", "failed") or (
                _STATES.index(state) < _STATES.index(job.state)
            ):
                raise RuntimeError(f"job {job.job_id}: cannot move {job.state} -> {state}")
            job.state = state
            for key, value in updates.items():
                setattr(job, key, value)
            job.updated_at = time.time()

    def _progress(self, job: DecompilationJob, done: int, total: int) -> None:
        with self._jobs_lock:
            job.done = max(job.done, done)
            job.total = total
            job.updated_at = time.time()

    # -- submission ---------------------------------------------------------

    def submit_uploads(self, modules: list[UploadedModule], arm: str | None = None) -> DecompilationJob:
        arm = arm or self.config.arm
        total_bytes = sum(
            len(m.low_level) + len(m.disassembly) + len(m.bytecode_b64) for m in modules
        )
        if total_bytes > self.config.max_upload_bytes:
            raise UploadTooLargeError(
                f"{total_bytes} bytes exceeds limit {self.config.max_upload_bytes}"
            )
        digest = package_digest(
            [
                (m.low_level + "\0" + m.disassembly + "\0" + m.bytecode_b64).encode()
                for m in modules
            ]
        )
        job = self._new_job("local", arm)
        key = cache_key(digest, self.client.cfg.model_id, self.assets.digest, arm)
        if self.cache.latest(key) is not None:
            self.cache._update_index(job.package_id, key)
            self._advance(job, "complete", cache_key=key)
            return job
        self._pool.submit(self._run_upload_job, job, modules, digest, key, arm)
        return job

    def submit_package(self, package_id: str, arm: str | None = None) -> DecompilationJob:
        arm = arm or self.config.arm
        package_id = validate_package_id(package_id)
        if not self.config.rpc_url:
            raise RuntimeError("no RPC endpoint configured (MAD_RPC_URL)")
        job = self._new_job(package_id, arm)
        self._pool.submit(self._run_fetch_job, job, package_id, arm)
        return job

    def redecompile(
        self, package_id: str, module: str, function: str, seed: int | None = None
    ) -> DecompilationJob:
        entry = self._entry_for(package_id)
        if entry is None:
            raise ViewNotReadyError(f"no completed job for package {package_id}")
        decompiled = entry.view(module, "decompiled")
        if decompiled is None:
            raise UnknownViewError(module)
        header, chunks = split_functions(decompiled)
        if not any(c.name == function for c in chunks):
            raise UnknownFunctionError(function)
        job = self._new_job(package_id, entry.meta.get("arm", self.config.arm))
        self._pool.submit(self._run_redecompile_job, job, entry, module, function, seed)
        return job

    # -- reads --------------------------------------------------------------

    def _entry_for(self, package_id: str) -> CacheEntry | None:
        key = self.cache.key_for_package(package_id)
        if key is None:
            return None
        return self.cache.latest(key)

    def modules_of(self, package_id: str) -> list[str]:
        entry = self._entry_for(package_id)
        if entry is None:
            raise ViewNotReadyError(f"no completed job for package {package_id}")
        return entry.modules

    def get_view(self, package_id: str, module: str, view: str) -> str:
        from .cache import VIEWS

        if view not in VIEWS:
            raise UnknownViewError(view)
        entry = self._entry_for(package_id)
        if entry is None:
            raise ViewNotReadyError(f"no completed job for package {package_id}")
        text = entry.view(module, view)
        if text is None:
            raise ViewNotReadyError(f"view {view} of {module} not available")
        return text

    def verification_of(self, package_id: str, module: str) -> dict | None:
        entry = self._entry_for(package_id)
        if entry is None:
            raise ViewNotReadyError(f"no completed job for package {package_id}")
        return (entry.meta.get("verification") or {}).get(module)

    # -- job bodies ----------------------------------------------------------

    def _run_upload_job(
        self,
        job: DecompilationJob,
        modules: list[UploadedModule],
        digest: str,
        key: str,
        arm: str,
    ) -> None:
        try:
            prepared = []
            for m in modules:
                ir = self._ir_for_upload(m)
                prepared.append((m, ir))
            self._decompile_and_store(job, prepared, digest, key, arm)
        except Exception as e:
            log.exception("upload job %s failed", job.job_id)
            self._advance(job, "failed", reason=f"{type(e).__name__}: {e}")

    def _ir_for_upload(self, m: UploadedModule) -> ModuleIR:
        source = m.disassembly or m.low_level
        ir = parse_disassembly(source)
        if not m.name:
            m.name = ir.name
        return ir

    def _run_fetch_job(self, job: DecompilationJob, package_id: str, arm: str) -> None:
        try:
            self._advance(job, "fetching")
            data = fetch_package(package_id, self.config.rpc_url)
            prepared: list[tuple[UploadedModule, ModuleIR]] = []
            for name, doc in sorted(data.normalized.items()):
                ir = parse_normalized(doc)
                bytecode = data.bytecode_b64.get(name, "")
                low_level = self._run_lowlevel_decompiler(bytecode) if bytecode else ""
                uploaded = UploadedModule(
                    low_level=low_level, disassembly="", bytecode_b64=bytecode, name=name
                )
                prepared.append((uploaded, ir))
            digest = package_digest(
                [
                    (name + "\0" + data.bytecode_b64.get(name, "")).encode()
                    for name in sorted(data.normalized)
                ]
            )
            key = cache_key(digest, self.client.cfg.model_id, self.assets.digest, arm)
            if self.cache.latest(key) is not None:
                self.cache._update_index(package_id, key)
                self._advance(job, "complete", cache_key=key)
                return
            self._decompile_and_store(job, prepared, digest, key, arm)
        except Exception as e:
            log.exception("fetch job %s failed", job.job_id)
            self._advance(job, "failed", reason=f"{type(e).__name__}: {e}")

    def _run_lowlevel_decompiler(self, bytecode_b64: str) -> str:
        """Shell out to the configured low-level decompiler, if any."""
        cmd = self.config.lowlevel_cmd
        if not cmd:
            return ""
        raw = base64.b64decode(bytecode_b64)
        with tempfile.NamedTemporaryFile(suffix=".mv", delete=False) as f:
            f.write(raw)
            path = f.name
        try:
            proc = subprocess.run(
                cmd.split() + [path], capture_output=True, text=True, timeout=120
            )
            return proc.stdout if proc.returncode == 0 else ""
        except (subprocess.TimeoutExpired, OSError):
            return ""
        finally:
            os.unlink(path)

    def _decompile_and_store(
        self,
        job: DecompilationJob,
        prepared: list[tuple[UploadedModule, ModuleIR]],
        digest: str,
        key: str,
        arm: str,
    ) -> None:
        prompt_cfg = arm_config(arm, self.assets)
        totals = []
        for uploaded, _ in prepared:
            if uploaded.low_level:
                _, chunks = split_functions(uploaded.low_level)
                totals.append(len(chunks))
            else:
                totals.append(0)
        grand_total = sum(totals)
        self._advance(job, "decompiling", total=grand_total)

        module_views: dict[str, dict[str, str]] = {}
        to_verify: list[tuple[str, ModuleIR, str, str]] = []
        completed_before = 0
        for (uploaded, ir), chunk_count in zip(prepared, totals):
            base_done = completed_before

            def on_progress(done, total, base=base_done):
                self._progress(job, base + done, grand_total)

            decompiled_text = ""
            if uploaded.low_level:
                result = decompile_module(
                    uploaded.low_level, ir, self.client, prompt_cfg, self.assets,
                    progress=on_progress,
                )
                decompiled_text = result.decompiled_text
            completed_before += chunk_count

            name = uploaded.name or ir.name
            module_views[name] = {
                "bytecode": uploaded.bytecode_b64,
                "disassembly": uploaded.disassembly,
                "low_level": uploaded.low_level,
                "interface": render_interface(ir),
                "decompiled": decompiled_text,
            }
            if uploaded.low_level and decompiled_text:
                to_verify.append((name, ir, uploaded.low_level, decompiled_text))

        verification: dict[str, dict] = {}
        if to_verify:
            self._advance(job, "verifying")
            for name, ir, low_level, decompiled_text in to_verify:
                report = verify(ir, low_level, decompiled_text, self.toolchain)
                verification[name] = report.to_dict()

        meta = {
            "package_digest": digest,
            "model_id": self.client.cfg.model_id,
            "prompt_version": self.assets.digest,
            "arm": arm,
            "verification": verification,
        }
        self.cache.write(key, job.package_id, module_views, meta)
        self._advance(job, "complete", cache_key=key, done=grand_total)

    def _run_redecompile_job(
        self,
        job: DecompilationJob,
        entry: CacheEntry,
        module: str,
        function: str,
        seed: int | None,
    ) -> None:
        try:
            self._advance(job, "decompiling", total=1)
            low_level = entry.view(module, "low_level") or ""
            decompiled = entry.view(module, "decompiled") or ""
            source_ir = parse_disassembly(entry.view(module, "disassembly") or low_level)

            low_header, low_chunks = split_functions(low_level)
            attach_metadata(low_header, source_ir, low_chunks)
            target = next((c for c in low_chunks if c.name == function), None)
            if target is None:
                raise UnknownFunctionError(function)

            client = self.client
            prompt_cfg = arm_config(entry.meta.get("arm", "full"), self.assets)
            if seed is not None:
                client = self.client.derive(seed=seed)
            chunk_result = decompile_chunk(target, client, prompt_cfg, self.assets)
            self._progress(job, 1, 1)

            out_header, out_chunks = split_functions(decompiled)
            outputs = [
                (c.name, chunk_result.output_text if c.name == function else c.raw_text)
                for c in out_chunks
            ]
            new_decompiled = reassemble(out_header, outputs)

            self._advance(job, "verifying")
            report = verify(source_ir, low_level, new_decompiled, self.toolchain)
            views = entry.views_of(module)
            views["decompiled"] = new_decompiled
            module_views = {m: entry.views_of(m) for m in entry.modules}
            module_views[module] = views
            meta = dict(entry.meta)
            meta.pop("modules", None)
            meta.pop("created_at", None)
            verification = dict(meta.get("verification") or {})
            verification[module] = report.to_dict()
            meta["verification"] = verification
            self.cache.write(entry.key, job.package_id, module_views, meta)
            self._advance(job, "complete", cache_key=entry.key)
        except Exception as e:
            log.exception("redecompile job %s failed", job.job_id)
            self._advance(job, "failed", reason=f"{type(e).__name__}: {e}")
