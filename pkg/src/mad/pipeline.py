"""End-to-end decompilation of one module: segment, prompt, complete, reassemble."""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .ir.types import ModuleIR
from .llm import CompletionRecord, ExtractionFailedError, LlmClient, extract_code
from .prompts.engine import (
    PromptAssets,
    PromptBundle,
    PromptConfig,
    RETRY_DIRECTIVE,
    compose,
)
from .segmentation import (
    FunctionChunk,
    ModuleHeader,
    attach_metadata,
    reassemble,
    split_functions,
)

log = logging.getLogger(__name__)


@dataclass
class ChunkResult:
    name: str
    output_text: str
    record: CompletionRecord | None = None  # None when passed through verbatim


@dataclass
class ModuleDecompilation:
    header: ModuleHeader
    chunks: list[FunctionChunk]
    results: list[ChunkResult]
    decompiled_text: str

    @property
    def records(self) -> list[CompletionRecord]:
        return [r.record for r in self.results if r.record is not None]


def decompile_chunk(
    chunk: FunctionChunk,
    client: LlmClient,
    cfg: PromptConfig,
    assets: PromptAssets,
) -> ChunkResult:
    """Prompt for one chunk and extract the code block.

    Native declarations have no body to rewrite and pass through verbatim.
    On ExtractionFailed the request is retried once with an appended
    single-code-block directive.
    """
    if "{" not in chunk.raw_text:
        return ChunkResult(name=chunk.name, output_text=chunk.raw_text)
    bundle = compose(chunk, cfg, assets)
    record = client.complete(bundle)
    try:
        code = extract_code(record.response_text)
    except ExtractionFailedError:
        log.warning("extraction failed for %s; re-prompting once", chunk.name)
        retry_bundle = _with_retry_directive(bundle)
        record = client.complete(retry_bundle)
        code = extract_code(record.response_text)
    return ChunkResult(name=chunk.name, output_text=code, record=record)


def _with_retry_directive(bundle: PromptBundle) -> PromptBundle:
    payload = bundle.user_payload + "\n" + RETRY_DIRECTIVE
    return replace(
        bundle,
        user_payload=payload,
        char_count=bundle.char_count - len(bundle.user_payload) + len(payload),
    )


def decompile_module(
    low_level: str,
    ir: ModuleIR,
    client: LlmClient,
    cfg: PromptConfig,
    assets: PromptAssets,
    progress=None,
) -> ModuleDecompilation:
    """Decompile every function of one module; chunks run in parallel up to
    the client's max_parallel. `progress(done, total)` is called after each
    chunk completes."""
    header, chunks = split_functions(low_level)
    attach_metadata(header, ir, chunks)

    total = len(chunks)
    done = 0
    done_lock = threading.Lock()
    results: list[ChunkResult | None] = [None] * total

    def run(index: int) -> None:
        nonlocal done
        results[index] = decompile_chunk(chunks[index], client, cfg, assets)
        with done_lock:
            done += 1
            snapshot = done
        if progress is not None:
            progress(snapshot, total)

    if total:
        workers = max(1, min(client.cfg.max_parallel, total))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(total)))

    final = [r for r in results if r is not None]
    decompiled = reassemble(header, [(r.name, r.output_text) for r in final])
    return ModuleDecompilation(
        header=header, chunks=chunks, results=final, decompiled_text=decompiled
    )
