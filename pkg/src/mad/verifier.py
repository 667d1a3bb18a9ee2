"""Post-hoc checks on decompiled output: signature fidelity, call-graph
consistency, and (when a toolchain is configured) recompilation.

Compile failures are data, not errors; every nonzero build exit maps to
exactly one error class via a versioned substring-rule table.
"""

from __future__ import annotations

import json
import logging
import os
import shlex
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .ir.disassembly import module_environment
from .ir.errors import EmptyInputError, MoveSyntaxError
from .ir.render import fingerprint
from .ir.types import ModuleIR, short_address
from .known import builtin_macros, builtin_modules, resolve_named_address
from .scan import Token, tokenize
from .segmentation import (
    NoModuleDeclarationError,
    UnbalancedBracesError,
    split_functions,
)

log = logging.getLogger(__name__)

ERROR_CLASSES = ("ParseError", "TypeError", "MoveRuleViolation", "UnresolvedName", "Other")


class UnparsableSourceError(Exception):
    def __init__(self, position, reason: str = ""):
        super().__init__(f"source unparsable at {position}: {reason}")
        self.position = position
        self.reason = reason


class SandboxError(Exception):
    """Workspace (I/O) failure while preparing or running a build."""


# ---------------------------------------------------------------------------
# Report types
# ---------------------------------------------------------------------------


@dataclass
class CompileOutcome:
    status: str  # pass | fail | skipped
    error_class: str | None = None
    raw_log: str = ""

    def __post_init__(self):
        if self.status not in ("pass", "fail", "skipped"):
            raise ValueError(f"bad status {self.status!r}")
        if (self.error_class is not None) != (self.status == "fail"):
            raise ValueError("error_class is present iff status is fail")
        if self.error_class is not None and self.error_class not in ERROR_CLASSES:
            raise ValueError(f"unknown error class {self.error_class!r}")


@dataclass
class FunctionCheck:
    signature_match: bool
    unknown_callees: list[str] = field(default_factory=list)
    parse_ok: bool = True


@dataclass
class ModuleChecks:
    all_functions_present: bool
    extra_functions: list[str] = field(default_factory=list)
    dropped_call_edges: list[tuple[str, str]] = field(default_factory=list)
    recompile: CompileOutcome = field(default_factory=lambda: CompileOutcome("skipped"))


@dataclass
class VerificationReport:
    per_function: dict[str, FunctionCheck]
    module_level: ModuleChecks

    def findings(self) -> list[str]:
        """Human-readable structural findings (recompilation excluded)."""
        out: list[str] = []
        for name, check in self.per_function.items():
            if not check.parse_ok:
                out.append(f"missing function: {name}")
            elif not check.signature_match:
                out.append(f"signature mismatch: {name}")
            for callee in check.unknown_callees:
                out.append(f"unknown callee in {name}: {callee}")
        for name in self.module_level.extra_functions:
            out.append(f"extra function: {name}")
        for caller, callee in self.module_level.dropped_call_edges:
            out.append(f"dropped internal call: {caller} -> {callee}")
        return out

    def to_dict(self) -> dict:
        return {
            "per_function": {
                name: {
                    "signature_match": c.signature_match,
                    "unknown_callees": list(c.unknown_callees),
                    "parse_ok": c.parse_ok,
                }
                for name, c in sorted(self.per_function.items())
            },
            "module_level": {
                "all_functions_present": self.module_level.all_functions_present,
                "extra_functions": list(self.module_level.extra_functions),
                "dropped_call_edges": [list(e) for e in self.module_level.dropped_call_edges],
                "recompile": {
                    "status": self.module_level.recompile.status,
                    "error_class": self.module_level.recompile.error_class,
                },
            },
            "findings": self.findings(),
        }


# ---------------------------------------------------------------------------
# Signature check
# ---------------------------------------------------------------------------


def _parse_source_ir(source: str) -> ModuleIR:
    from .ir.disassembly import parse_disassembly

    try:
        return parse_disassembly(source)
    except (MoveSyntaxError, EmptyInputError) as e:
        raise UnparsableSourceError(getattr(e, "line", 0), str(e)) from e
    except (UnbalancedBracesError, NoModuleDeclarationError) as e:
        raise UnparsableSourceError(getattr(e, "position", 0), str(e)) from e


@dataclass
class SignatureReport:
    matches: dict[str, bool]  # IR function name -> fingerprints equal
    missing: list[str]
    extra: list[str]


def check_signatures(ir: ModuleIR, source: str) -> SignatureReport:
    """Compare each IR function's fingerprint against the same-named function
    in the decompiled source; renamed parameters do not matter."""
    source_ir = _parse_source_ir(source)
    by_name = {f.name: f for f in source_ir.functions}
    matches: dict[str, bool] = {}
    missing: list[str] = []
    for f in ir.functions:
        candidate = by_name.get(f.name)
        if candidate is None:
            matches[f.name] = False
            missing.append(f.name)
        else:
            matches[f.name] = fingerprint(candidate) == fingerprint(f)
    extra = [name for name in by_name if ir.function(name) is None]
    return SignatureReport(matches=matches, missing=missing, extra=extra)


# ---------------------------------------------------------------------------
# Call-graph check
# ---------------------------------------------------------------------------

_KEYWORDS = frozenset(
    {
        "if", "else", "while", "loop", "let", "mut", "as", "abort", "return",
        "break", "continue", "copy", "move", "true", "false", "fun", "public",
        "entry", "native", "has", "struct", "use", "friend", "const", "module",
        "phantom", "spec", "vector", "freeze",
    }
)

_TYPE_TOKENS = frozenset({"<", ">", ",", "&", "::"})


def _scan_generic_args(toks: list[Token], i: int) -> int | None:
    """i points at '<'. Returns index past the matching '>' when the span
    looks like type arguments, else None (comparison operator)."""
    depth = 0
    j = i
    while j < len(toks) and j - i < 64:
        t = toks[j]
        if t.text == "<":
            depth += 1
        elif t.text == ">":
            depth -= 1
            if depth == 0:
                return j + 1
        elif t.kind in ("ident", "num") or t.text in _TYPE_TOKENS or t.text == "mut":
            pass
        else:
            return None
        j += 1
    return None


@dataclass(frozen=True)
class CallSite:
    caller: str
    path: tuple[str, ...]  # path segments as written
    is_macro: bool = False


def _extract_calls(source: str) -> list[CallSite]:
    header, chunks = split_functions(source)
    sites: list[CallSite] = []
    for chunk in chunks:
        toks = tokenize(chunk.raw_text)
        # body starts after the signature's opening brace
        try:
            open_index = next(k for k, t in enumerate(toks) if t.text == "{")
        except StopIteration:
            continue  # native declaration
        i = open_index + 1
        while i < len(toks):
            t = toks[i]
            if t.kind in ("ident", "num"):
                prev = toks[i - 1]
                if prev.text == "::":  # path continuation, not a call start
                    i += 1
                    continue
                nxt = toks[i + 1] if i + 1 < len(toks) else None
                starts_path = nxt is not None and nxt.text == "::"
                if t.kind == "ident" and t.text in _KEYWORDS and not starts_path:
                    i += 1
                    continue
                if t.kind == "num" and not starts_path:
                    i += 1
                    continue
                path = [t.text]
                j = i + 1
                while (
                    j + 1 < len(toks)
                    and toks[j].text == "::"
                    and toks[j + 1].kind == "ident"
                ):
                    path.append(toks[j + 1].text)
                    j += 2
                k = j
                if k < len(toks) and toks[k].text == "<":
                    spanned = _scan_generic_args(toks, k)
                    if spanned is not None:
                        k = spanned
                is_macro = False
                if k < len(toks) and toks[k].text == "!":
                    is_macro = True
                    k += 1
                if k < len(toks) and toks[k].text == "(" and prev.text != ".":
                    sites.append(CallSite(chunk.name, tuple(path), is_macro))
                i = j
                continue
            i += 1
    return sites


@dataclass
class CallGraphReport:
    unknown_callees: dict[str, list[str]]  # caller -> unresolved call paths
    internal_edges: set[tuple[str, str]]  # caller -> sibling callee
    dropped_internal_calls: list[tuple[str, str]] = field(default_factory=list)


def check_callgraph(ir: ModuleIR, source: str, baseline: str | None = None) -> CallGraphReport:
    """Resolve every call target in source against the module's siblings, its
    imports, and the framework whitelist. With a baseline (the low-level
    input), also reports internal call edges that disappeared — the
    substituted-helper hallucination class."""
    report = _callgraph_one(ir, source)
    if baseline is not None:
        base = _callgraph_one(ir, baseline)
        report.dropped_internal_calls = sorted(base.internal_edges - report.internal_edges)
    return report


def _callgraph_one(ir: ModuleIR, source: str) -> CallGraphReport:
    try:
        env = module_environment(source)
    except (MoveSyntaxError, EmptyInputError) as e:
        raise UnparsableSourceError(getattr(e, "line", 0), str(e)) from e
    siblings = {f.name for f in ir.functions}
    builtins = builtin_modules()
    macros = builtin_macros()
    imported = set(env.module_aliases.values())
    self_pair = (env.self_address, env.self_module)

    unknown: dict[str, list[str]] = {}
    edges: set[tuple[str, str]] = set()

    for site in _extract_calls(source):
        target = "::".join(site.path)
        if site.is_macro:
            if site.path[0] in macros or len(site.path) > 1:
                continue
            unknown.setdefault(site.caller, []).append(target + "!")
            continue
        if len(site.path) == 1:
            name = site.path[0]
            if name in siblings:
                edges.add((site.caller, name))
            else:
                unknown.setdefault(site.caller, []).append(target)
            continue
        if len(site.path) == 2:
            alias, fn = site.path
            if alias == "Self":
                if fn in siblings:
                    edges.add((site.caller, fn))
                else:
                    unknown.setdefault(site.caller, []).append(target)
                continue
            pair = env.module_aliases.get(alias)
            if pair is None:
                unknown.setdefault(site.caller, []).append(target)
                continue
            if pair == self_pair and fn in siblings:
                edges.add((site.caller, fn))
            elif pair in builtins or pair in imported:
                pass
            else:
                unknown.setdefault(site.caller, []).append(target)
            continue
        # fully qualified: addr::module::fn
        addr_text, module, fn = site.path[0], site.path[-2], site.path[-1]
        addr = resolve_named_address(addr_text)
        if addr is None:
            try:
                from .ir.types import normalize_address

                addr = normalize_address(addr_text)
            except ValueError:
                unknown.setdefault(site.caller, []).append(target)
                continue
        pair = (addr, module)
        if pair == self_pair:
            if fn in siblings:
                edges.add((site.caller, fn))
            else:
                unknown.setdefault(site.caller, []).append(target)
        elif pair in builtins or pair in imported:
            pass
        else:
            unknown.setdefault(site.caller, []).append(target)

    return CallGraphReport(unknown_callees=unknown, internal_edges=edges)


# ---------------------------------------------------------------------------
# Recompilation
# ---------------------------------------------------------------------------


@dataclass
class ToolchainConfig:
    command: str = "sui move build"
    test_command: str | None = None  # derived from command when absent

    @classmethod
    def from_env(cls) -> "ToolchainConfig | None":
        cmd = os.environ.get("MAD_TOOLCHAIN_CMD")
        return cls(command=cmd) if cmd else None

    def argv(self) -> list[str]:
        return shlex.split(self.command)

    def test_argv(self) -> list[str]:
        if self.test_command:
            return shlex.split(self.test_command)
        argv = self.argv()
        return [a if a != "build" else "test" for a in argv]

    def available(self) -> bool:
        argv = self.argv()
        return bool(argv) and shutil.which(argv[0]) is not None


_RULES = None


def _error_rules() -> list[tuple[str, str]]:
    global _RULES
    if _RULES is None:
        raw = resources.files("mad.data").joinpath("error_rules.json").read_text("utf-8")
        _RULES = [(r["contains"].lower(), r["class"]) for r in json.loads(raw)["rules"]]
    return _RULES


def classify_build_log(text: str) -> str:
    lowered = text.lower()
    for needle, error_class in _error_rules():
        if needle in lowered:
            return error_class
    return "Other"


MANIFEST_TEMPLATE = """[package]
name = "{name}"
version = "0.0.1"

[addresses]
{name} = "0x0"
"""


def _module_path_of(source: str) -> tuple[str, str]:
    try:
        env = module_environment(source)
    except Exception:
        return ("0x0", "decompiled")
    return (short_address(env.self_address), env.self_module)


def materialize_package(source: str, workdir: Path) -> Path:
    """Write the Move.toml + sources/ skeleton for one module."""
    _, name = _module_path_of(source)
    try:
        (workdir / "sources").mkdir(parents=True, exist_ok=True)
        (workdir / "Move.toml").write_text(MANIFEST_TEMPLATE.format(name=name), "utf-8")
        source_file = workdir / "sources" / f"{name}.move"
        source_file.write_text(source, "utf-8")
    except OSError as e:
        raise SandboxError(f"cannot materialize package: {e}") from e
    return workdir


def recompile(source: str, toolchain: ToolchainConfig | None) -> CompileOutcome:
    """Build the source under the external toolchain inside a throwaway
    workspace. Missing toolchain -> skipped; build failures -> classified."""
    if toolchain is None or not toolchain.available():
        return CompileOutcome("skipped")
    try:
        tmp = tempfile.mkdtemp(prefix="mad-build-")
    except OSError as e:
        raise SandboxError(f"cannot create workspace: {e}") from e
    try:
        workdir = Path(tmp)
        materialize_package(source, workdir)
        try:
            proc = subprocess.run(
                toolchain.argv(),
                cwd=workdir,
                capture_output=True,
                text=True,
                timeout=600,
            )
        except (subprocess.TimeoutExpired, OSError) as e:
            return CompileOutcome("fail", "Other", f"build command failed to run: {e}")
        log_text = proc.stdout + "\n" + proc.stderr
        if proc.returncode == 0:
            return CompileOutcome("pass", raw_log=log_text)
        return CompileOutcome("fail", classify_build_log(log_text), log_text)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


# ---------------------------------------------------------------------------
# Aggregate
# ---------------------------------------------------------------------------


def verify(
    ir: ModuleIR,
    low_level_source: str,
    decompiled_source: str,
    toolchain: ToolchainConfig | None = None,
) -> VerificationReport:
    """Compose signature, call-graph, and recompilation checks into one report."""
    signatures = check_signatures(ir, decompiled_source)
    callgraph = check_callgraph(ir, decompiled_source, baseline=low_level_source)

    per_function: dict[str, FunctionCheck] = {}
    for f in ir.functions:
        parse_ok = f.name not in set(signatures.missing)
        per_function[f.name] = FunctionCheck(
            signature_match=signatures.matches.get(f.name, False),
            unknown_callees=sorted(callgraph.unknown_callees.get(f.name, [])),
            parse_ok=parse_ok,
        )
    all_present = all(c.parse_ok for c in per_function.values())

    outcome = recompile(decompiled_source, toolchain)
    module_level = ModuleChecks(
        all_functions_present=all_present,
        extra_functions=sorted(signatures.extra),
        dropped_call_edges=list(callgraph.dropped_internal_calls),
        recompile=outcome,
    )
    return VerificationReport(per_function=per_function, module_level=module_level)
