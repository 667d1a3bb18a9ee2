"""HTTP facade over the decompiler service (JSON bodies, plain-text views)."""

from __future__ import annotations

import logging
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse

from ..prompts.engine import ARM_NAMES
from .core import (
    DecompilerService,
    InvalidPackageIdError,
    ServiceConfig,
    UnknownFunctionError,
    UnknownViewError,
    UploadedModule,
    UploadTooLargeError,
    ViewNotReadyError,
)
from .rpc import PackageNotFoundError, RpcError

log = logging.getLogger(__name__)


def _error(status: int, code: str, detail: str = "") -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "detail": detail})


def create_app(config: ServiceConfig | None = None, static_dir: str | None = None) -> FastAPI:
    service = DecompilerService(config or ServiceConfig.from_env())
    app = FastAPI(title="mad", docs_url=None, redoc_url=None)
    app.state.service = service

    @app.exception_handler(InvalidPackageIdError)
    async def _invalid_id(request: Request, exc: InvalidPackageIdError):
        return _error(400, "InvalidPackageId", str(exc))

    @app.exception_handler(UploadTooLargeError)
    async def _too_large(request: Request, exc: UploadTooLargeError):
        return _error(413, "UploadTooLarge", str(exc))

    @app.exception_handler(UnknownViewError)
    async def _unknown_view(request: Request, exc: UnknownViewError):
        return _error(404, "UnknownView", str(exc))

    @app.exception_handler(UnknownFunctionError)
    async def _unknown_function(request: Request, exc: UnknownFunctionError):
        return _error(404, "UnknownFunction", str(exc))

    @app.exception_handler(ViewNotReadyError)
    async def _not_ready(request: Request, exc: ViewNotReadyError):
        return _error(409, "ViewNotReady", str(exc))

    @app.exception_handler(PackageNotFoundError)
    async def _package_missing(request: Request, exc: PackageNotFoundError):
        return _error(404, "PackageNotFound", str(exc))

    @app.exception_handler(RpcError)
    async def _rpc_error(request: Request, exc: RpcError):
        return _error(502, "RpcError", str(exc))

    @app.get("/api/health")
    def health():
        return {
            "status": "ok",
            "backend": service.client.cfg.backend,
            "model_id": service.client.cfg.model_id,
            "prompt_version": service.assets.digest,
        }

    @app.post("/api/decompile")
    async def decompile(request: Request):
        body = await request.json()
        package_id = body.get("package_id")
        modules = body.get("modules")
        if bool(package_id) == bool(modules):
            return _error(400, "BadRequest", "provide exactly one of package_id or modules")
        arm = (body.get("config") or {}).get("arm")
        if arm is not None and arm not in ARM_NAMES:
            return _error(400, "BadRequest", f"unknown arm {arm!r}")
        if package_id:
            job = service.submit_package(package_id, arm=arm)
        else:
            uploads = [
                UploadedModule(
                    low_level=m.get("low_level", ""),
                    disassembly=m.get("disassembly", ""),
                    bytecode_b64=m.get("bytecode_b64", ""),
                    name=m.get("name", ""),
                )
                for m in modules
            ]
            if any(not u.low_level for u in uploads):
                return _error(400, "BadRequest", "each uploaded module needs low_level text")
            job = service.submit_uploads(uploads, arm=arm)
        return {"job_id": job.job_id, "package_id": job.package_id, "state": job.state}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        job = service.job(job_id)
        if job is None:
            return _error(404, "UnknownJob", job_id)
        return job.to_dict()

    @app.get("/api/packages/{package_id}/modules")
    def modules(package_id: str):
        return {"package_id": package_id, "modules": service.modules_of(package_id)}

    @app.get("/api/packages/{package_id}/modules/{module}/views/{view}")
    def view(package_id: str, module: str, view: str):
        return PlainTextResponse(service.get_view(package_id, module, view))

    @app.get("/api/packages/{package_id}/modules/{module}/verification")
    def verification(package_id: str, module: str):
        return {"module": module, "verification": service.verification_of(package_id, module)}

    @app.post("/api/packages/{package_id}/modules/{module}/functions/{function}/redecompile")
    async def redecompile(package_id: str, module: str, function: str, request: Request):
        seed = None
        try:
            body = await request.json()
            seed = body.get("seed")
        except Exception:
            pass
        job = service.redecompile(package_id, module, function, seed=seed)
        return {"job_id": job.job_id, "package_id": job.package_id, "state": job.state}

    if static_dir and Path(static_dir).is_dir():
        static_root = Path(static_dir)

        @app.get("/")
        def index():
            return FileResponse(static_root / "index.html")

        @app.get("/{path:path}")
        def static_files(path: str):
            target = (static_root / path).resolve()
            if static_root.resolve() not in target.parents or not target.is_file():
                return _error(404, "NotFound", path)
            return FileResponse(target)

    return app
