"""Parser for the canonical disassembly / low-level module grammar.

The grammar is a pinned subset of the Move disassembler's textual output
covering declarations only:

    module <addr>::<name> {
        use <addr>::<module>[::member | ::{members}] [as alias];
        friend <addr>::<module>;
        const NAME: <type> = <expr>;
        struct Name<[phantom] T: ability + ...> has ability, ... { field: <type>, ... }
        [public | public(friend) | public(package)] [entry] [native] fun
            name<T: ...>(param: <type>, ...)[: <ret>] { ... } | ;
    }

Function and instruction bodies are skipped by balanced-delimiter scanning;
the IR is signature-level. Bare type names resolve against local structs,
then `use` aliases; unresolvable names are kept opaque. See
docs/disassembly-grammar.md for the full grammar notes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..known import resolve_named_address
from ..scan import ScanError, Token, match_brace, tokenize
from .errors import EmptyInputError, MoveSyntaxError
from .types import (
    Datatype,
    FunctionSig,
    ModuleIR,
    MoveType,
    Prim,
    PRIMITIVES,
    Reference,
    StructIR,
    StructTypeParam,
    TypeParam,
    Vector,
    normalize_address,
)

_ABILITY_NAMES = {"copy", "drop", "store", "key"}
_MODIFIERS = {"public", "entry", "native", "friend"}


@dataclass
class _Env:
    """Name-resolution context for one module."""

    self_address: str = ""
    self_module: str = ""
    local_structs: set[str] = field(default_factory=set)
    module_aliases: dict[str, tuple[str, str]] = field(default_factory=dict)
    member_aliases: dict[str, tuple[str, str, str]] = field(default_factory=dict)


class _Cursor:
    def __init__(self, tokens: list[Token], source: str):
        self.toks = tokens
        self.src = source
        self.i = 0

    def peek(self, offset: int = 0) -> Token | None:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def _line(self) -> int:
        t = self.peek()
        if t is not None:
            return t.line
        return self.toks[-1].line if self.toks else 1

    def fail(self, expected: str):
        raise MoveSyntaxError(self._line(), expected)

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            self.fail("more input")
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.next()

    def expect_ident(self, what: str = "identifier") -> Token:
        t = self.peek()
        if t is None or t.kind != "ident":
            self.fail(what)
        return self.next()

    def skip_attribute(self):
        self.expect("#")
        self.expect("[")
        depth = 1
        while depth:
            t = self.next()
            if t.text == "[":
                depth += 1
            elif t.text == "]":
                depth -= 1

    def skip_braces(self):
        try:
            end = match_brace(self.toks, self.i)
        except ScanError:
            self.fail("matching '}'")
        self.i = end + 1

    def skip_to_semicolon(self) -> int:
        """Skips to just past the next top-level ';'. Returns its token index."""
        depth = 0
        while True:
            t = self.next()
            if t.text in "([{":
                depth += 1
            elif t.text in ")]}":
                depth -= 1
            elif t.text == ";" and depth == 0:
                return self.i - 1


def _parse_address_token(cur: _Cursor) -> str:
    t = cur.peek()
    if t is None:
        cur.fail("account address")
    if t.kind == "num":
        try:
            addr = normalize_address(t.text)
        except ValueError:
            cur.fail("account address")
        cur.next()
        return addr
    if t.kind == "ident":
        resolved = resolve_named_address(t.text)
        if resolved is not None:
            cur.next()
            return resolved
    cur.fail("account address")
    raise AssertionError("unreachable")


def _path_head(cur: _Cursor) -> str:
    """Address segment of a use/friend path: hex literal or named address.

    Unknown named addresses are preserved as written so the dependency list
    stays faithful to the source.
    """
    t = cur.peek()
    if t is None:
        cur.fail("address or named address")
    if t.kind == "num":
        try:
            addr = normalize_address(t.text)
        except ValueError:
            cur.fail("account address")
        cur.next()
        return addr
    if t.kind == "ident":
        cur.next()
        return resolve_named_address(t.text) or t.text
    cur.fail("address or named address")
    raise AssertionError("unreachable")


def module_environment(text: str) -> _Env:
    """Name-resolution environment (self path, local structs, use aliases) of
    a module's text; used by consumers that resolve call paths."""
    if not text or not text.strip():
        raise EmptyInputError("empty module text")
    try:
        tokens = tokenize(text)
    except ScanError as e:
        line = text.count("\n", 0, e.position) + 1
        raise MoveSyntaxError(line, "terminated literal") from e
    cur = _Cursor(tokens, text)
    while cur.at("#"):
        cur.skip_attribute()
    if not cur.at("module"):
        cur.fail("'module'")
    cur.next()
    address = _parse_address_token(cur)
    cur.expect("::")
    name = cur.expect_ident("module name").text
    cur.expect("{")
    env = _Env(self_address=address, self_module=name)
    _prescan(cur, env)
    return env


def parse_disassembly(text: str) -> ModuleIR:
    """Parse disassembly or low-level source text into a signature-level ModuleIR."""
    if not text or not text.strip():
        raise EmptyInputError("empty module text")
    try:
        tokens = tokenize(text)
    except ScanError as e:
        line = text.count("\n", 0, e.position) + 1
        raise MoveSyntaxError(line, "terminated literal") from e

    cur = _Cursor(tokens, text)
    while cur.at("#"):
        cur.skip_attribute()
    if not cur.at("module"):
        cur.fail("'module'")
    cur.next()
    address = _parse_address_token(cur)
    cur.expect("::")
    name = cur.expect_ident("module name").text
    cur.expect("{")
    body_start = cur.i

    env = _Env(self_address=address, self_module=name)
    _prescan(cur, env)

    cur.i = body_start
    deps: list[tuple[str, str]] = []
    structs: list[StructIR] = []
    functions: list[FunctionSig] = []
    constants: list[tuple[MoveType, bytes]] = []

    while True:
        t = cur.peek()
        if t is None:
            cur.fail("'}' closing the module")
        if t.text == "}":
            cur.next()
            break
        if t.text == "#":
            cur.skip_attribute()
            continue
        if t.text == "use":
            dep = _parse_use(cur, env)
            if dep not in deps:
                deps.append(dep)
            continue
        if t.text == "friend":
            cur.next()
            addr = _path_head(cur)
            cur.expect("::")
            mod = cur.expect_ident("module name").text
            cur.expect(";")
            if (addr, mod) not in deps:
                deps.append((addr, mod))
            continue
        if t.text == "const":
            constants.append(_parse_const(cur, env))
            continue
        if t.text == "spec":
            cur.next()
            while not cur.at("{"):
                cur.next()
            cur.skip_braces()
            continue
        if t.text == "struct" or (t.text == "public" and _peek_struct(cur)):
            structs.append(_parse_struct(cur, env))
            continue
        if t.kind == "ident" and (t.text in _MODIFIERS or t.text == "fun"):
            functions.append(_parse_function(cur, env))
            continue
        cur.fail("a declaration (use, struct, const, fun)")

    return ModuleIR(
        address=address,
        name=name,
        dependencies=tuple(deps),
        structs=tuple(structs),
        functions=tuple(functions),
        constants=tuple(constants),
    )


def _peek_struct(cur: _Cursor) -> bool:
    nxt = cur.peek(1)
    return nxt is not None and nxt.text == "struct"


def _prescan(cur: _Cursor, env: _Env):
    """First pass: collect struct names and use-aliases so types can resolve
    regardless of declaration order."""
    depth = 0
    while True:
        t = cur.peek()
        if t is None:
            return
        if t.text == "{":
            depth += 1
            cur.next()
            continue
        if t.text == "}":
            if depth == 0:
                return
            depth -= 1
            cur.next()
            continue
        if depth == 0 and t.text == "use":
            _parse_use(cur, env)
            continue
        if depth == 0 and t.text == "struct":
            nxt = cur.peek(1)
            if nxt is not None and nxt.kind == "ident":
                env.local_structs.add(nxt.text)
        cur.next()


def _parse_use(cur: _Cursor, env: _Env) -> tuple[str, str]:
    cur.expect("use")
    addr = _path_head(cur)
    cur.expect("::")
    module = cur.expect_ident("module name").text
    if cur.at("::"):
        cur.next()
        if cur.at("{"):
            cur.next()
            while not cur.at("}"):
                member = cur.expect_ident("use member").text
                alias = member
                if cur.at("as"):
                    cur.next()
                    alias = cur.expect_ident("alias").text
                if member == "Self":
                    env.module_aliases[alias if alias != "Self" else module] = (addr, module)
                else:
                    env.member_aliases[alias] = (addr, module, member)
                if cur.at(","):
                    cur.next()
            cur.expect("}")
        else:
            member = cur.expect_ident("use member").text
            alias = member
            if cur.at("as"):
                cur.next()
                alias = cur.expect_ident("alias").text
            env.member_aliases[alias] = (addr, module, member)
    else:
        alias = module
        if cur.at("as"):
            cur.next()
            alias = cur.expect_ident("alias").text
        env.module_aliases[alias] = (addr, module)
    cur.expect(";")
    return (addr, module)


def _parse_const(cur: _Cursor, env: _Env) -> tuple[MoveType, bytes]:
    cur.expect("const")
    cur.expect_ident("constant name")
    cur.expect(":")
    ctype = _parse_type(cur, env, ())
    eq = cur.expect("=")
    semi_index = cur.skip_to_semicolon()
    raw = cur.src[eq.end: cur.toks[semi_index].start].strip()
    return (ctype, raw.encode("utf-8"))


def _parse_abilities(cur: _Cursor, separator: str) -> frozenset[str]:
    abilities = set()
    while True:
        t = cur.expect_ident("ability")
        if t.text not in _ABILITY_NAMES:
            cur.i -= 1
            cur.fail("ability (copy, drop, store, key)")
        abilities.add(t.text)
        if cur.at(separator):
            cur.next()
            continue
        return frozenset(abilities)


def _parse_struct_type_params(cur: _Cursor) -> tuple[StructTypeParam, ...]:
    params: list[StructTypeParam] = []
    cur.expect("<")
    while not cur.at(">"):
        phantom = False
        if cur.at("phantom"):
            phantom = True
            cur.next()
        pname = cur.expect_ident("type parameter").text
        constraints: frozenset[str] = frozenset()
        if cur.at(":"):
            cur.next()
            constraints = _parse_abilities(cur, "+")
        params.append(StructTypeParam(pname, constraints, phantom))
        if cur.at(","):
            cur.next()
    cur.expect(">")
    return tuple(params)


def _parse_struct(cur: _Cursor, env: _Env) -> StructIR:
    if cur.at("public"):
        cur.next()
    cur.expect("struct")
    name = cur.expect_ident("struct name").text
    type_params: tuple[StructTypeParam, ...] = ()
    if cur.at("<"):
        type_params = _parse_struct_type_params(cur)
    abilities: frozenset[str] = frozenset()
    if cur.at("has"):
        cur.next()
        abilities = _parse_abilities(cur, ",")
    fields: list[tuple[str, MoveType]] = []
    if cur.at(";"):
        cur.next()
    else:
        cur.expect("{")
        tp_names = tuple(p.name for p in type_params)
        while not cur.at("}"):
            fname = cur.expect_ident("field name").text
            cur.expect(":")
            fields.append((fname, _parse_type(cur, env, tp_names)))
            if cur.at(","):
                cur.next()
        cur.expect("}")
    return StructIR(name=name, abilities=abilities, type_params=type_params, fields=tuple(fields))


def _parse_fun_type_params(cur: _Cursor) -> tuple[tuple[str, frozenset[str]], ...]:
    out: list[tuple[str, frozenset[str]]] = []
    cur.expect("<")
    while not cur.at(">"):
        if cur.at("phantom"):
            cur.next()
        pname = cur.expect_ident("type parameter").text
        constraints: frozenset[str] = frozenset()
        if cur.at(":"):
            cur.next()
            constraints = _parse_abilities(cur, "+")
        out.append((pname, constraints))
        if cur.at(","):
            cur.next()
    cur.expect(">")
    return tuple(out)


def _parse_function(cur: _Cursor, env: _Env) -> FunctionSig:
    visibility = "private"
    is_entry = False
    is_native = False
    while not cur.at("fun"):
        t = cur.expect_ident("'fun' or a modifier")
        if t.text == "public":
            visibility = "public"
            if cur.at("("):
                cur.next()
                scope = cur.expect_ident("friend or package").text
                if scope not in ("friend", "package"):
                    cur.i -= 1
                    cur.fail("friend or package")
                visibility = "friend"
                cur.expect(")")
        elif t.text == "entry":
            is_entry = True
        elif t.text == "native":
            is_native = True
        else:
            cur.i -= 1
            cur.fail("'fun' or a modifier")
    cur.expect("fun")
    name = cur.expect_ident("function name").text

    named_tps: tuple[tuple[str, frozenset[str]], ...] = ()
    if cur.at("<"):
        named_tps = _parse_fun_type_params(cur)
    tp_names = tuple(n for n, _ in named_tps)

    cur.expect("(")
    params: list[tuple[str | None, MoveType]] = []
    while not cur.at(")"):
        pname = cur.expect_ident("parameter name").text
        cur.expect(":")
        params.append((pname, _parse_type(cur, env, tp_names)))
        if cur.at(","):
            cur.next()
    cur.expect(")")

    returns: list[MoveType] = []
    if cur.at(":"):
        cur.next()
        if cur.at("("):
            cur.next()
            while not cur.at(")"):
                returns.append(_parse_type(cur, env, tp_names))
                if cur.at(","):
                    cur.next()
            cur.expect(")")
        else:
            returns.append(_parse_type(cur, env, tp_names))

    if cur.at(";"):
        cur.next()
    elif cur.at("{"):
        cur.skip_braces()
    elif is_native:
        cur.fail("';'")
    else:
        cur.fail("function body or ';'")

    return FunctionSig(
        name=name,
        visibility=visibility,
        is_entry=is_entry,
        type_params=tuple(c for _, c in named_tps),
        params=tuple(params),
        returns=tuple(returns),
    )


def _parse_type_args(cur: _Cursor, env: _Env, tp_names: tuple[str, ...]) -> tuple[MoveType, ...]:
    args: list[MoveType] = []
    cur.expect("<")
    while not cur.at(">"):
        args.append(_parse_type(cur, env, tp_names))
        if cur.at(","):
            cur.next()
    cur.expect(">")
    return tuple(args)


def _parse_type(cur: _Cursor, env: _Env, tp_names: tuple[str, ...]) -> MoveType:
    t = cur.peek()
    if t is None:
        cur.fail("a type")
    if t.text == "&":
        cur.next()
        mutable = False
        if cur.at("mut"):
            mutable = True
            cur.next()
        return Reference(mutable=mutable, target=_parse_type(cur, env, tp_names))

    if t.kind == "num":
        # fully-qualified path starting with a hex address
        addr = _parse_address_token(cur)
        cur.expect("::")
        module = cur.expect_ident("module name").text
        cur.expect("::")
        dname = cur.expect_ident("type name").text
        args = _parse_type_args(cur, env, tp_names) if cur.at("<") else ()
        return Datatype(addr, module, dname, args)

    if t.kind != "ident":
        cur.fail("a type")
    first = cur.next().text

    if first == "vector":
        cur.expect("<")
        element = _parse_type(cur, env, tp_names)
        cur.expect(">")
        return Vector(element)
    if first in tp_names:
        return TypeParam(tp_names.index(first))
    if first in PRIMITIVES:
        return Prim(first)

    if cur.at("::"):
        cur.next()
        second = cur.expect_ident("name").text
        if cur.at("::"):
            cur.next()
            third = cur.expect_ident("type name").text
            addr = resolve_named_address(first) or first
            args = _parse_type_args(cur, env, tp_names) if cur.at("<") else ()
            if not addr.strip("0123456789abcdef"):
                return Datatype(addr, second, third, args)
            return Datatype("", second, third, args)  # unresolvable named address
        args = _parse_type_args(cur, env, tp_names) if cur.at("<") else ()
        if first in env.module_aliases:
            addr, module = env.module_aliases[first]
            if not addr.strip("0123456789abcdef"):
                return Datatype(addr, module, second, args)
            return Datatype("", module, second, args)
        return Datatype("", first, second, args)

    args = _parse_type_args(cur, env, tp_names) if cur.at("<") else ()
    if first in env.local_structs:
        return Datatype(env.self_address, env.self_module, first, args)
    if first in env.member_aliases:
        addr, module, member = env.member_aliases[first]
        if not addr.strip("0123456789abcdef"):
            return Datatype(addr, module, member, args)
        return Datatype("", module, member, args)
    return Datatype("", "", first, args)
