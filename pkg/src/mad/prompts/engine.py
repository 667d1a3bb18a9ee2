"""Prompt assembly for per-function decompilation requests.

A prompt has up to three system-side components (domain knowledge,
should/should-not instructions, few-shot pairs) plus the user payload built
from the chunk and its module context. Ablation switches drop whole
components; dropped sections are absent from the bundle, not blanked.

Asset layout (see prompts/ at the repo root):

    <dir>/domain_knowledge.md
    <dir>/instructions.md
    <dir>/fewshot/NN_input.move
    <dir>/fewshot/NN_output.move
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path

from ..segmentation import FunctionChunk, parse_single_function

log = logging.getLogger(__name__)

DEFAULT_FEWSHOT_COUNT = 17

SECTION_DOMAIN_KNOWLEDGE = "domain_knowledge"
SECTION_INSTRUCTIONS = "instructions"

TASK_DIRECTIVE = (
    "Rewrite the low-level function above as clean, recompilable Move source. "
    "Keep the signature, visibility, and logic identical; rename locals to "
    "descriptive names. Reply with a single fenced code block containing "
    "exactly one function and nothing else."
)

RETRY_DIRECTIVE = "Output only one fenced code block containing the function."


class MissingAssetError(Exception):
    def __init__(self, name: str):
        super().__init__(f"missing prompt asset: {name}")
        self.name = name


class MalformedExampleError(Exception):
    def __init__(self, index: int, reason: str):
        super().__init__(f"few-shot example {index}: {reason}")
        self.index = index
        self.reason = reason


class AssetsNotLoadedError(Exception):
    pass


@dataclass(frozen=True)
class FewshotExample:
    input_text: str  # low-level function
    output_text: str  # reference decompiled source
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class FewshotLibrary:
    examples: tuple[FewshotExample, ...]

    def __len__(self) -> int:
        return len(self.examples)


@dataclass(frozen=True)
class PromptAssets:
    sections: tuple[tuple[str, str], ...]  # (section-id, text)
    library: FewshotLibrary
    digest: str  # stable over identical asset bytes

    def section(self, section_id: str) -> str:
        for sid, text in self.sections:
            if sid == section_id:
                return text
        raise KeyError(section_id)


@dataclass(frozen=True)
class PromptConfig:
    include_domain_knowledge: bool = True
    include_instructions: bool = True
    include_fewshot: bool = True
    fewshot_count: int = DEFAULT_FEWSHOT_COUNT
    prompt_version: str = ""

    @property
    def arm_name(self) -> str:
        if not self.include_domain_knowledge:
            return "no-domain"
        if not self.include_instructions:
            return "no-instructions"
        if not self.include_fewshot:
            return "no-fewshot"
        return "full"


ARM_NAMES = ("full", "no-domain", "no-instructions", "no-fewshot")


@dataclass(frozen=True)
class PromptBundle:
    system_sections: tuple[tuple[str, str], ...]
    fewshot_pairs: tuple[tuple[str, str], ...]
    user_payload: str
    char_count: int


def default_asset_dir() -> Path:
    """Prompt assets directory: $MAD_PROMPTS_DIR, else prompts/ at the repo root."""
    env = os.environ.get("MAD_PROMPTS_DIR")
    if env:
        return Path(env)
    # src/mad/prompts/engine.py -> repo root
    return Path(__file__).resolve().parents[3] / "prompts"


def load_prompt_assets(path: str | Path) -> PromptAssets:
    """Load sections and few-shot pairs; digest is a sha256 over all asset bytes."""
    root = Path(path)
    hasher = hashlib.sha256()
    sections: list[tuple[str, str]] = []
    for section_id, filename in (
        (SECTION_DOMAIN_KNOWLEDGE, "domain_knowledge.md"),
        (SECTION_INSTRUCTIONS, "instructions.md"),
    ):
        f = root / filename
        if not f.is_file():
            raise MissingAssetError(filename)
        data = f.read_bytes()
        hasher.update(filename.encode() + b"\0" + data + b"\0")
        sections.append((section_id, data.decode("utf-8")))

    fewshot_dir = root / "fewshot"
    if not fewshot_dir.is_dir():
        raise MissingAssetError("fewshot/")
    examples: list[FewshotExample] = []
    inputs = sorted(fewshot_dir.glob("*_input.move"))
    for index, input_file in enumerate(inputs):
        output_file = input_file.with_name(input_file.name.replace("_input", "_output"))
        if not output_file.is_file():
            raise MissingAssetError(f"fewshot/{output_file.name}")
        input_bytes = input_file.read_bytes()
        output_bytes = output_file.read_bytes()
        hasher.update(input_file.name.encode() + b"\0" + input_bytes + b"\0")
        hasher.update(output_file.name.encode() + b"\0" + output_bytes + b"\0")
        input_text = input_bytes.decode("utf-8")
        output_text = output_bytes.decode("utf-8")
        try:
            in_name, _, _ = parse_single_function(input_text)
            out_name, _, _ = parse_single_function(output_text)
        except Exception as e:
            raise MalformedExampleError(index, f"unparsable pair: {e}") from e
        if in_name != out_name:
            raise MalformedExampleError(
                index, f"output defines {out_name!r}, input defines {in_name!r}"
            )
        examples.append(FewshotExample(input_text, output_text))

    if len(examples) < DEFAULT_FEWSHOT_COUNT:
        log.warning(
            "few-shot library has %d examples; default count capped", len(examples)
        )
    return PromptAssets(
        sections=tuple(sections),
        library=FewshotLibrary(tuple(examples)),
        digest=hasher.hexdigest(),
    )


def default_config(assets: PromptAssets, **flags) -> PromptConfig:
    cfg = PromptConfig(prompt_version=assets.digest, **flags)
    if cfg.fewshot_count > len(assets.library):
        cfg = replace(cfg, fewshot_count=len(assets.library))
    return cfg


def compose(chunk: FunctionChunk, cfg: PromptConfig, assets: PromptAssets | None) -> PromptBundle:
    """Assemble the prompt for one chunk. Pure in (chunk, cfg, asset bytes)."""
    if assets is None:
        raise AssetsNotLoadedError("prompt assets not loaded")
    sections = tuple(
        (sid, text)
        for sid, text in assets.sections
        if (sid == SECTION_DOMAIN_KNOWLEDGE and cfg.include_domain_knowledge)
        or (sid == SECTION_INSTRUCTIONS and cfg.include_instructions)
    )
    pairs: tuple[tuple[str, str], ...] = ()
    if cfg.include_fewshot:
        count = min(cfg.fewshot_count, len(assets.library))
        pairs = tuple(
            (ex.input_text, ex.output_text) for ex in assets.library.examples[:count]
        )

    payload_parts = []
    if chunk.context:
        payload_parts.append(f"Module context:\n```move\n{chunk.context}```\n")
    payload_parts.append(f"Low-level function:\n```move\n{chunk.raw_text}\n```\n")
    payload_parts.append(TASK_DIRECTIVE)
    user_payload = "\n".join(payload_parts)

    char_count = (
        sum(len(text) for _, text in sections)
        + sum(len(i) + len(o) for i, o in pairs)
        + len(user_payload)
    )
    return PromptBundle(
        system_sections=sections,
        fewshot_pairs=pairs,
        user_payload=user_payload,
        char_count=char_count,
    )


def serialize_bundle(bundle: PromptBundle) -> str:
    """Canonical serialization; the completion cache keys on its digest."""
    return json.dumps(
        {
            "system_sections": list(bundle.system_sections),
            "fewshot_pairs": list(bundle.fewshot_pairs),
            "user_payload": bundle.user_payload,
        },
        ensure_ascii=False,
        sort_keys=True,
        separators=(",", ":"),
    )


def bundle_digest(bundle: PromptBundle) -> str:
    return hashlib.sha256(serialize_bundle(bundle).encode("utf-8")).hexdigest()


def ablation_arms(assets: PromptAssets | None = None) -> list[PromptConfig]:
    """The four evaluation arms: full prompt and one component removed each."""
    version = assets.digest if assets is not None else ""
    count = min(DEFAULT_FEWSHOT_COUNT, len(assets.library)) if assets is not None else DEFAULT_FEWSHOT_COUNT
    base = PromptConfig(prompt_version=version, fewshot_count=count)
    return [
        base,
        replace(base, include_domain_knowledge=False),
        replace(base, include_instructions=False),
        replace(base, include_fewshot=False),
    ]


def arm_config(arm: str, assets: PromptAssets | None = None) -> PromptConfig:
    for cfg in ablation_arms(assets):
        if cfg.arm_name == arm:
            return cfg
    raise ValueError(f"unknown ablation arm {arm!r} (choose from {', '.join(ARM_NAMES)})")
