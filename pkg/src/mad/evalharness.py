"""Corpus-level evaluation: run the pipeline over a manifest, compute
recompilation success rates (per model / per ablation arm), and render
report tables.

Recompilation may run against a live toolchain or replay a recorded outcome
store, so rate plumbing is testable without the external compiler.
"""

from __future__ import annotations

import datetime as _dt
import json
import logging
import re
import shutil
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .ir.disassembly import module_environment, parse_disassembly
from .llm import FixtureMissError, FixtureStore, LlmClient, ModelConfig
from .pipeline import decompile_module
from .prompts.engine import PromptAssets, PromptConfig, ablation_arms
from .verifier import (
    CompileOutcome,
    ToolchainConfig,
    VerificationReport,
    recompile,
    verify,
)

log = logging.getLogger(__name__)


class ManifestError(Exception):
    pass


class UnknownFormatError(Exception):
    def __init__(self, fmt: str):
        super().__init__(f"unknown report format {fmt!r}")
        self.fmt = fmt


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    disassembly: Path
    low_level: Path
    original_package: Path | None = None
    category: str = ""


@dataclass
class CorpusManifest:
    entries: list[CorpusEntry]
    root: Path

    @classmethod
    def load(cls, path: str | Path) -> "CorpusManifest":
        path = Path(path)
        try:
            doc = json.loads(path.read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ManifestError(f"cannot read manifest {path}: {e}") from e
        root = path.parent
        entries: list[CorpusEntry] = []
        seen: set[str] = set()
        for raw in doc.get("entries", []):
            entry_id = raw.get("id")
            if not entry_id or entry_id in seen:
                raise ManifestError(f"duplicate or missing entry id: {entry_id!r}")
            seen.add(entry_id)
            inputs = raw.get("inputs", {})
            disassembly = root / inputs.get("disassembly", "")
            low_level = root / inputs.get("low_level", "")
            for p in (disassembly, low_level):
                if not p.is_file():
                    raise ManifestError(f"entry {entry_id}: missing input {p}")
            package = inputs.get("original_package")
            package_path = root / package if package else None
            if package_path is not None and not package_path.is_dir():
                raise ManifestError(f"entry {entry_id}: missing package {package_path}")
            entries.append(
                CorpusEntry(
                    id=entry_id,
                    disassembly=disassembly,
                    low_level=low_level,
                    original_package=package_path,
                    category=raw.get("category", ""),
                )
            )
        return cls(entries=entries, root=root)


class RecordedOutcomeStore:
    """Replay of recompilation outcomes: entry id -> CompileOutcome."""

    def __init__(self, outcomes: dict[str, CompileOutcome]):
        self.outcomes = outcomes

    @classmethod
    def load(cls, path: str | Path) -> "RecordedOutcomeStore":
        doc = json.loads(Path(path).read_text("utf-8"))
        outcomes = {}
        for entry_id, raw in doc.items():
            outcomes[entry_id] = CompileOutcome(
                status=raw["status"],
                error_class=raw.get("error_class"),
                raw_log=raw.get("raw_log", ""),
            )
        return cls(outcomes)

    def get(self, entry_id: str) -> CompileOutcome:
        return self.outcomes.get(entry_id, CompileOutcome("skipped"))


@dataclass
class UnitTestOutcome:
    status: str  # ok | skipped
    passed: int = 0
    failed: int = 0
    raw_log: str = ""


@dataclass
class EntryResult:
    id: str
    status: str  # ok | skipped | error
    verification: VerificationReport | None = None
    unit_tests: UnitTestOutcome | None = None
    decompiled: str = ""
    detail: str = ""

    @property
    def recompiled(self) -> CompileOutcome:
        if self.verification is None:
            return CompileOutcome("skipped")
        return self.verification.module_level.recompile


@dataclass
class EvalReport:
    per_entry: dict[str, EntryResult]
    success_rate: float | None
    model_id: str
    arm: str
    prompt_version: str
    timestamp: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat()
    )

    def recompute_rate(self) -> float | None:
        attempted = [
            r for r in self.per_entry.values() if r.recompiled.status in ("pass", "fail")
        ]
        if not attempted:
            return None
        passes = sum(1 for r in attempted if r.recompiled.status == "pass")
        return passes / len(attempted)

    def to_dict(self, include_timestamp: bool = True) -> dict:
        doc = {
            "model_id": self.model_id,
            "arm": self.arm,
            "prompt_version": self.prompt_version,
            "success_rate": self.success_rate,
            "per_entry": {
                entry_id: {
                    "status": r.status,
                    "detail": r.detail,
                    "recompile": {
                        "status": r.recompiled.status,
                        "error_class": r.recompiled.error_class,
                    },
                    "verification": r.verification.to_dict() if r.verification else None,
                    "unit_tests": (
                        {"status": r.unit_tests.status, "passed": r.unit_tests.passed,
                         "failed": r.unit_tests.failed}
                        if r.unit_tests
                        else None
                    ),
                    "decompiled_sha256": _sha(r.decompiled) if r.decompiled else None,
                }
                for entry_id, r in sorted(self.per_entry.items())
            },
        }
        if include_timestamp:
            doc["timestamp"] = self.timestamp
        return doc


def _sha(text: str) -> str:
    import hashlib

    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def format_rate(rate: float | None) -> str:
    """One-decimal percentage, 'n/a' when undefined."""
    if rate is None:
        return "n/a"
    return f"{rate * 100:.1f}"


def _resolve_outcome(
    entry: CorpusEntry,
    decompiled: str,
    toolchain: ToolchainConfig | RecordedOutcomeStore | None,
) -> CompileOutcome:
    if isinstance(toolchain, RecordedOutcomeStore):
        return toolchain.get(entry.id)
    return recompile(decompiled, toolchain)


def run_entry(
    entry: CorpusEntry,
    client: LlmClient,
    prompt_cfg: PromptConfig,
    assets: PromptAssets,
    toolchain: ToolchainConfig | RecordedOutcomeStore | None,
    record_to: FixtureStore | None = None,
    with_unit_tests: bool = False,
) -> EntryResult:
    try:
        low_level = entry.low_level.read_text("utf-8")
        ir = parse_disassembly(entry.disassembly.read_text("utf-8"))
        result = decompile_module(low_level, ir, client, prompt_cfg, assets)
        if record_to is not None:
            for record in result.records:
                record_to.put(record.prompt_digest, record.response_text)
        report = verify(ir, low_level, result.decompiled_text, toolchain=None)
        report.module_level.recompile = _resolve_outcome(entry, result.decompiled_text, toolchain)
        unit_tests = None
        if with_unit_tests and entry.original_package is not None:
            tc = toolchain if isinstance(toolchain, ToolchainConfig) else None
            unit_tests = run_unit_tests(entry, result.decompiled_text, tc)
        return EntryResult(
            id=entry.id,
            status="ok",
            verification=report,
            unit_tests=unit_tests,
            decompiled=result.decompiled_text,
        )
    except FixtureMissError as e:
        return EntryResult(id=entry.id, status="skipped", detail=str(e))
    except Exception as e:  # per-entry isolation: one bad package never aborts the corpus
        log.exception("entry %s failed", entry.id)
        return EntryResult(id=entry.id, status="error", detail=f"{type(e).__name__}: {e}")


def run_corpus(
    manifest: CorpusManifest,
    model_cfg: ModelConfig,
    prompt_cfg: PromptConfig,
    toolchain: ToolchainConfig | RecordedOutcomeStore | None,
    assets: PromptAssets,
    store: FixtureStore | None = None,
    record_to: FixtureStore | None = None,
    with_unit_tests: bool = False,
) -> EvalReport:
    """Decompile and verify every manifest entry; skipped entries (fixture
    misses) stay out of the success-rate denominator."""
    client = LlmClient(model_cfg, store=store)
    results: dict[str, EntryResult] = {}
    with ThreadPoolExecutor(max_workers=model_cfg.max_parallel) as pool:
        futures = {
            entry.id: pool.submit(
                run_entry, entry, client, prompt_cfg, assets, toolchain,
                record_to, with_unit_tests,
            )
            for entry in manifest.entries
        }
    for entry_id, future in futures.items():
        results[entry_id] = future.result()

    report = EvalReport(
        per_entry=results,
        success_rate=None,
        model_id=model_cfg.model_id,
        arm=prompt_cfg.arm_name,
        prompt_version=prompt_cfg.prompt_version,
    )
    report.success_rate = report.recompute_rate()
    return report


def run_ablation(
    manifest: CorpusManifest,
    model_cfg: ModelConfig,
    toolchain,
    assets: PromptAssets,
    store: FixtureStore | None = None,
    outcome_stores: dict[str, RecordedOutcomeStore] | None = None,
) -> list[tuple[str, EvalReport]]:
    """One corpus run per prompt arm. `toolchain` may be a per-run value or,
    via outcome_stores, an arm-keyed recorded store."""
    rows: list[tuple[str, EvalReport]] = []
    for cfg in ablation_arms(assets):
        arm_toolchain = toolchain
        if outcome_stores is not None:
            arm_toolchain = outcome_stores.get(cfg.arm_name, toolchain)
        report = run_corpus(manifest, model_cfg, cfg, arm_toolchain, assets, store=store)
        rows.append((cfg.arm_name, report))
    return rows


# ---------------------------------------------------------------------------
# Unit tests against the original package
# ---------------------------------------------------------------------------

_TEST_COUNTS = re.compile(r"Total tests:\s*(\d+);\s*passed:\s*(\d+);\s*failed:\s*(\d+)")
_MODULE_DECL = re.compile(r"\bmodule\s+[\w:]+::(\w+)")


def run_unit_tests(
    entry: CorpusEntry,
    decompiled_source: str,
    toolchain: ToolchainConfig | None,
) -> UnitTestOutcome:
    """Substitute the decompiled module for the original source inside a copy
    of the entry's package and run the toolchain's test command."""
    if toolchain is None or not toolchain.available():
        return UnitTestOutcome(status="skipped")
    if entry.original_package is None:
        return UnitTestOutcome(status="skipped", raw_log="entry has no original package")

    try:
        env = module_environment(decompiled_source)
        module_name = env.self_module
    except Exception:
        module_name = None

    tmp = tempfile.mkdtemp(prefix="mad-test-")
    try:
        workdir = Path(tmp) / "pkg"
        shutil.copytree(entry.original_package, workdir)
        replaced = False
        for source_file in sorted((workdir / "sources").glob("*.move")):
            m = _MODULE_DECL.search(source_file.read_text("utf-8"))
            if m and module_name and m.group(1) == module_name:
                source_file.write_text(decompiled_source, "utf-8")
                replaced = True
                break
        if not replaced:
            return UnitTestOutcome(status="skipped", raw_log="no matching module source found")
        try:
            proc = subprocess.run(
                toolchain.test_argv(), cwd=workdir, capture_output=True, text=True,
                timeout=900,
            )
        except (subprocess.TimeoutExpired, OSError) as e:
            return UnitTestOutcome(status="skipped", raw_log=f"test command failed: {e}")
        log_text = proc.stdout + "\n" + proc.stderr
        m = _TEST_COUNTS.search(log_text)
        if m:
            return UnitTestOutcome(
                status="ok", passed=int(m.group(2)), failed=int(m.group(3)), raw_log=log_text
            )
        # no parsable counts: fall back to the exit status
        return UnitTestOutcome(
            status="ok",
            passed=1 if proc.returncode == 0 else 0,
            failed=0 if proc.returncode == 0 else 1,
            raw_log=log_text,
        )
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _report_rows(reports: list[tuple[str, EvalReport]]) -> list[tuple[str, str, str, str]]:
    rows = []
    for arm, report in reports:
        attempted = sum(
            1 for r in report.per_entry.values() if r.recompiled.status in ("pass", "fail")
        )
        rows.append(
            (report.model_id, arm, format_rate(report.success_rate), f"{attempted}")
        )
    rows.sort(key=lambda r: (-(float(r[2]) if r[2] != "n/a" else -1.0), r[1]))
    return rows


def render_report(report: EvalReport | list[tuple[str, EvalReport]], fmt: str = "markdown") -> str:
    """Deterministic success-rate table (one row per model/arm), markdown or CSV."""
    reports = report if isinstance(report, list) else [(report.arm, report)]
    rows = _report_rows(reports)
    if fmt == "markdown":
        lines = [
            "| Model | Arm | Recompilation Success Rate (%) | Attempted |",
            "|---|---|---|---|",
        ]
        lines.extend(f"| {m} | {a} | {rate} | {n} |" for m, a, rate, n in rows)
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        lines = ["model,arm,success_rate_pct,attempted"]
        lines.extend(f"{m},{a},{rate},{n}" for m, a, rate, n in rows)
        return "\n".join(lines) + "\n"
    raise UnknownFormatError(fmt)
