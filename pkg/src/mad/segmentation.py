"""Per-function segmentation of low-level module text and reassembly.

split_functions carves one module into a header (declaration, imports,
structs, constants) plus one chunk per function; reassemble is its inverse.
Comments and attributes attach to the item that follows them, so
reassemble(split(s)) with identity outputs is token-equivalent to s for
modules written in canonical order (header items first). Module-level trivia
after the last item is dropped with a logged warning.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .ir.errors import MoveSyntaxError
from .ir.render import render_signature
from .ir.types import FunctionSig, ModuleIR
from .scan import ScanError, Token, match_brace, normalize_ws, tokenize

log = logging.getLogger(__name__)

_FUN_STARTERS = {"public", "entry", "native", "fun"}


class UnbalancedBracesError(Exception):
    def __init__(self, position: int):
        super().__init__(f"unbalanced braces at offset {position}")
        self.position = position


class NoModuleDeclarationError(Exception):
    pass


class UnknownFunctionError(Exception):
    def __init__(self, name: str):
        super().__init__(f"no function named {name!r} in module")
        self.name = name


class MissingFunctionError(Exception):
    def __init__(self, name: str):
        super().__init__(f"output for {name!r} contains no parsable function")
        self.name = name


class DuplicateFunctionError(Exception):
    def __init__(self, name: str):
        super().__init__(f"function {name!r} defined more than once")
        self.name = name


@dataclass(frozen=True)
class ModuleHeader:
    module_decl: str  # "module <addr>::<name> {"
    imports: tuple[str, ...] = ()
    struct_blocks: tuple[str, ...] = ()
    const_lines: tuple[str, ...] = ()


@dataclass
class FunctionChunk:
    name: str
    raw_text: str  # signature + body, balanced braces
    signature: FunctionSig | None = None
    context: str = ""


def _tokens(source: str) -> list[Token]:
    try:
        return tokenize(source)
    except ScanError as e:
        raise UnbalancedBracesError(e.position) from e


def split_functions(source: str) -> tuple[ModuleHeader, list[FunctionChunk]]:
    """Split a module's low-level text into header parts and function chunks.

    Chunks come back in declaration order; header + chunks jointly cover the
    input up to whitespace and trailing module-level trivia.
    """
    toks = _tokens(source)
    i = 0
    while i < len(toks) and toks[i].text == "#":
        i = _skip_attr(toks, i)
    if i >= len(toks) or toks[i].text != "module":
        raise NoModuleDeclarationError("no module declaration found")

    decl_start = i
    while i < len(toks) and toks[i].text != "{":
        i += 1
    if i >= len(toks):
        raise UnbalancedBracesError(toks[decl_start].start)
    try:
        close = match_brace(toks, i)
    except ScanError as e:
        raise UnbalancedBracesError(e.position) from e

    module_decl = source[toks[decl_start].start: toks[i].end]
    body_end_offset = toks[close].start
    i += 1

    imports: list[str] = []
    struct_blocks: list[str] = []
    const_lines: list[str] = []
    chunks: list[FunctionChunk] = []
    seg_start = toks[i - 1].end  # leading trivia attaches to the next item

    while i < close:
        t = toks[i]
        if t.text == "#":
            i = _skip_attr(toks, i)
            continue
        if t.text == ";":  # stray separator
            i += 1
            continue
        if t.text in ("use", "friend"):
            i = _to_semicolon(toks, i, close)
            imports.append(source[seg_start: toks[i - 1].end].strip())
            seg_start = toks[i - 1].end
            continue
        if t.text == "const":
            i = _to_semicolon(toks, i, close)
            const_lines.append(source[seg_start: toks[i - 1].end].strip())
            seg_start = toks[i - 1].end
            continue
        if t.text in ("struct", "spec") or (
            t.text == "public" and i + 1 < close and toks[i + 1].text == "struct"
        ):
            i = _to_block_or_semicolon(toks, i, close)
            struct_blocks.append(source[seg_start: toks[i - 1].end].strip())
            seg_start = toks[i - 1].end
            continue
        if t.kind == "ident" and t.text in _FUN_STARTERS:
            i, name = _consume_function(toks, i, close)
            chunks.append(FunctionChunk(name=name, raw_text=source[seg_start: toks[i - 1].end].strip()))
            seg_start = toks[i - 1].end
            continue
        raise MoveSyntaxError(t.line, "a declaration (use, struct, const, fun)")

    trailing = source[seg_start:body_end_offset].strip()
    if trailing:
        log.warning("dropping %d chars of trailing module-level trivia", len(trailing))

    header = ModuleHeader(
        module_decl=module_decl,
        imports=tuple(imports),
        struct_blocks=tuple(struct_blocks),
        const_lines=tuple(const_lines),
    )
    return header, chunks


def _skip_attr(toks: list[Token], i: int) -> int:
    i += 1  # '#'
    if i >= len(toks) or toks[i].text != "[":
        raise MoveSyntaxError(toks[i - 1].line, "'[' after '#'")
    depth = 0
    while i < len(toks):
        if toks[i].text == "[":
            depth += 1
        elif toks[i].text == "]":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    raise UnbalancedBracesError(toks[-1].start)


def _to_semicolon(toks: list[Token], i: int, limit: int) -> int:
    depth = 0
    while i < limit:
        t = toks[i]
        if t.text in "([{":
            depth += 1
        elif t.text in ")]}":
            depth -= 1
        elif t.text == ";" and depth == 0:
            return i + 1
        i += 1
    raise MoveSyntaxError(toks[limit - 1].line if toks else 1, "';'")


def _to_block_or_semicolon(toks: list[Token], i: int, limit: int) -> int:
    while i < limit:
        t = toks[i]
        if t.text == ";":
            return i + 1
        if t.text == "{":
            try:
                return match_brace(toks, i) + 1
            except ScanError as e:
                raise UnbalancedBracesError(e.position) from e
        i += 1
    raise MoveSyntaxError(toks[limit - 1].line if toks else 1, "'{' or ';'")


def _consume_function(toks: list[Token], i: int, limit: int) -> tuple[int, str]:
    """From a modifier/fun token, consume through the body (or ';'); returns
    (next index, function name)."""
    while i < limit and toks[i].text != "fun":
        if toks[i].text == "public" and i + 1 < limit and toks[i + 1].text == "(":
            i += 1
            while i < limit and toks[i].text != ")":
                i += 1
        i += 1
    if i >= limit or toks[i].text != "fun":
        raise MoveSyntaxError(toks[min(i, limit - 1)].line, "'fun'")
    i += 1
    if i >= limit or toks[i].kind != "ident":
        raise MoveSyntaxError(toks[i - 1].line, "function name")
    name = toks[i].text
    while i < limit:
        t = toks[i]
        if t.text == ";":
            return i + 1, name
        if t.text == "{":
            try:
                return match_brace(toks, i) + 1, name
            except ScanError as e:
                raise UnbalancedBracesError(e.position) from e
        i += 1
    raise MoveSyntaxError(toks[limit - 1].line, "function body or ';'")


def parse_single_function(text: str) -> tuple[str, str, list[str]]:
    """Extract exactly one function definition from standalone text.

    Accepts bare functions, functions preceded by `use` lines (returned
    separately for lifting), and a full module wrapper. Returns
    (name, function text, lifted use lines).

    Raises MissingFunctionError when no function is found and
    DuplicateFunctionError when more than one is defined.
    """
    toks = _tokens(text)
    i = 0
    uses: list[str] = []
    found: tuple[str, str] | None = None
    limit = len(toks)
    seg_start = 0  # leading comments/attributes attach to the next item

    while i < limit:
        t = toks[i]
        if t.text == "#":
            i = _skip_attr(toks, i)
            continue
        if t.text == ";":
            i += 1
            continue
        if t.text == "module":
            # unwrap: descend into the module body
            while i < limit and toks[i].text != "{":
                i += 1
            if i >= limit:
                raise MissingFunctionError("<module body>")
            try:
                limit = match_brace(toks, i)
            except ScanError as e:
                raise UnbalancedBracesError(e.position) from e
            seg_start = toks[i].end
            i += 1
            continue
        if t.text == "use":
            i = _to_semicolon(toks, i, limit)
            uses.append(text[seg_start: toks[i - 1].end].strip())
            seg_start = toks[i - 1].end
            continue
        if t.text in ("struct", "const", "friend", "spec") or (
            t.text == "public" and i + 1 < limit and toks[i + 1].text == "struct"
        ):
            log.warning("dropping module-level %r item from function output", t.text)
            if t.text in ("const", "friend"):
                i = _to_semicolon(toks, i, limit)
            else:
                i = _to_block_or_semicolon(toks, i, limit)
            seg_start = toks[i - 1].end
            continue
        if t.kind == "ident" and t.text in _FUN_STARTERS:
            i, name = _consume_function(toks, i, limit)
            if found is not None:
                raise DuplicateFunctionError(name)
            found = (name, text[seg_start: toks[i - 1].end].strip())
            seg_start = toks[i - 1].end
            continue
        raise MoveSyntaxError(t.line, "a function definition")

    if found is None:
        raise MissingFunctionError("<none>")
    return found[0], found[1], uses


def _reindent(item: str, indent: str = "    ") -> list[str]:
    """Re-indent a stored item: first line at `indent`, continuation lines
    shifted by the difference from their common leading whitespace."""
    lines = item.splitlines()
    if len(lines) == 1:
        return [indent + item]
    tails = [ln for ln in lines[1:] if ln.strip()]
    # continuation lines keep their original absolute indent; their common
    # prefix is the item's original base indent
    shift = min((len(ln) - len(ln.lstrip()) for ln in tails), default=0)
    out = [indent + lines[0]]
    for ln in lines[1:]:
        out.append(indent + ln[shift:] if ln.strip() else "")
    return out


def build_context(header: ModuleHeader, ir: ModuleIR, current: str) -> str:
    """Module context for prompting: header parts plus signature-only stubs of
    every sibling function. Deterministic for (header, ir, current)."""
    if ir.function(current) is None:
        raise UnknownFunctionError(current)
    lines = [header.module_decl]
    for imp in header.imports:
        lines.append("    " + imp)
    for block in header.struct_blocks:
        lines.append("")
        lines.extend(_reindent(block))
    for const in header.const_lines:
        lines.append("    " + const)
    stubs = [f for f in ir.functions if f.name != current]
    if stubs:
        lines.append("")
        for f in stubs:
            lines.append("    " + render_signature(f))
    lines.append("}")
    return "\n".join(lines) + "\n"


def reassemble(header: ModuleHeader, outputs: list[tuple[str, str]]) -> str:
    """Rebuild one module from per-function decompiled outputs.

    Stray `use` lines inside outputs are lifted to header scope and deduped;
    other module-level strays are dropped (logged). Output order follows the
    input list.
    """
    import_lines = list(header.imports)
    seen = {normalize_ws(l) for l in import_lines}
    functions: list[str] = []
    names_seen: set[str] = set()

    for expected_name, text in outputs:
        try:
            name, fn_text, uses = parse_single_function(text)
        except MissingFunctionError:
            raise MissingFunctionError(expected_name) from None
        if name in names_seen:
            raise DuplicateFunctionError(name)
        names_seen.add(name)
        if name != expected_name:
            log.warning("output for %r defines %r instead", expected_name, name)
        for u in uses:
            key = normalize_ws(u)
            if key not in seen:
                seen.add(key)
                import_lines.append(u)
        functions.append(fn_text)

    parts = [header.module_decl]
    for imp in import_lines:
        parts.extend(_reindent(imp))
    for block in header.struct_blocks:
        parts.append("")
        parts.extend(_reindent(block))
    for const in header.const_lines:
        parts.extend(_reindent(const))
    for fn_text in functions:
        parts.append("")
        parts.extend(_reindent(fn_text))
    parts.append("}")
    return "\n".join(parts) + "\n"


def attach_metadata(header: ModuleHeader, ir: ModuleIR, chunks: list[FunctionChunk]) -> None:
    """Join chunks with their IR signatures and rendered sibling context."""
    for chunk in chunks:
        chunk.signature = ir.function(chunk.name)
        if chunk.signature is not None:
            chunk.context = build_context(header, ir, chunk.name)
        else:
            chunk.context = build_context_headless(header)


def build_context_headless(header: ModuleHeader) -> str:
    lines = [header.module_decl]
    lines.extend("    " + imp for imp in header.imports)
    for block in header.struct_blocks:
        lines.append("")
        lines.extend(_reindent(block))
    lines.extend("    " + c for c in header.const_lines)
    lines.append("}")
    return "\n".join(lines) + "\n"

