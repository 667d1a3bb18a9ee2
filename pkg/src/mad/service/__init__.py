from .app import create_app
from .cache import CacheEntry, CacheStore, VIEWS, cache_key, package_digest
from .core import (
    DecompilationJob,
    DecompilerService,
    InvalidPackageIdError,
    ServiceConfig,
    UnknownFunctionError,
    UnknownViewError,
    UploadedModule,
    UploadTooLargeError,
    ViewNotReadyError,
    validate_package_id,
)
from .rpc import PackageData, PackageNotFoundError, RpcError, fetch_package

__all__ = [
    "CacheEntry",
    "CacheStore",
    "DecompilationJob",
    "DecompilerService",
    "InvalidPackageIdError",
    "PackageData",
    "PackageNotFoundError",
    "RpcError",
    "ServiceConfig",
    "UnknownFunctionError",
    "UnknownViewError",
    "UploadTooLargeError",
    "UploadedModule",
    "VIEWS",
    "ViewNotReadyError",
    "cache_key",
    "create_app",
    "fetch_package",
    "package_digest",
    "validate_package_id",
]
