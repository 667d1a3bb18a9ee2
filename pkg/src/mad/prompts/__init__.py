from .engine import (
    ARM_NAMES,
    AssetsNotLoadedError,
    FewshotExample,
    FewshotLibrary,
    MalformedExampleError,
    MissingAssetError,
    PromptAssets,
    PromptBundle,
    PromptConfig,
    RETRY_DIRECTIVE,
    TASK_DIRECTIVE,
    ablation_arms,
    arm_config,
    bundle_digest,
    compose,
    default_asset_dir,
    default_config,
    load_prompt_assets,
    serialize_bundle,
)

__all__ = [
    "ARM_NAMES",
    "AssetsNotLoadedError",
    "FewshotExample",
    "FewshotLibrary",
    "MalformedExampleError",
    "MissingAssetError",
    "PromptAssets",
    "PromptBundle",
    "PromptConfig",
    "RETRY_DIRECTIVE",
    "TASK_DIRECTIVE",
    "ablation_arms",
    "arm_config",
    "bundle_digest",
    "compose",
    "default_asset_dir",
    "default_config",
    "load_prompt_assets",
    "serialize_bundle",
]
