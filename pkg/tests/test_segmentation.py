import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mad.ir import parse_disassembly
from mad.scan import normalize_ws
from mad.segmentation import (
    DuplicateFunctionError,
    MissingFunctionError,
    NoModuleDeclarationError,
    UnbalancedBracesError,
    UnknownFunctionError,
    build_context,
    parse_single_function,
    reassemble,
    split_functions,
)

TWO_FUNCTIONS = """module 0x1::two {
    use sui::transfer;

    struct T has key {
        id: sui::object::UID,
    }

    const LIMIT: u64 = 9;

    fun first(arg0: u64): u64 {
        arg0 + 1
    }

    public fun second(arg0: u64): u64 {
        arg0 * 2
    }
}
"""


def test_split_two_functions_round_trips():
    header, chunks = split_functions(TWO_FUNCTIONS)
    assert [c.name for c in chunks] == ["first", "second"]
    out = reassemble(header, [(c.name, c.raw_text) for c in chunks])
    assert normalize_ws(out) == normalize_ws(TWO_FUNCTIONS)


def test_structs_only_module():
    src = "module 0x1::s { struct A has copy, drop { x: u64 } }"
    header, chunks = split_functions(src)
    assert chunks == []
    assert len(header.struct_blocks) == 1
    assert header.module_decl.startswith("module 0x1::s")


def test_nested_braces_stay_in_one_chunk():
    src = """module 0x1::n {
        fun looped(arg0: u64): u64 {
            if (arg0 > 0) {
                while (arg0 < 10) {
                    arg0 = arg0 + 1;
                };
            };
            arg0
        }
    }"""
    header, chunks = split_functions(src)
    assert len(chunks) == 1
    assert chunks[0].raw_text.count("{") == chunks[0].raw_text.count("}")
    assert chunks[0].raw_text.rstrip().endswith("}")


def test_no_module_declaration():
    with pytest.raises(NoModuleDeclarationError):
        split_functions("fun floating() {}")


def test_unbalanced_braces_position():
    with pytest.raises(UnbalancedBracesError):
        split_functions("module 0x1::m { fun f() { ")


def test_chunk_count_matches_ir(corpus_modules):
    for d in corpus_modules:
        src = (d / "low_level.move").read_text("utf-8")
        ir = parse_disassembly(src)
        _, chunks = split_functions(src)
        assert len(chunks) == len(ir.functions), d.name


def test_corpus_round_trip_identity(corpus_modules):
    for d in corpus_modules:
        src = (d / "low_level.move").read_text("utf-8")
        header, chunks = split_functions(src)
        out = reassemble(header, [(c.name, c.raw_text) for c in chunks])
        assert normalize_ws(out) == normalize_ws(src), d.name


def test_reassemble_output_resplits(corpus_modules):
    for d in corpus_modules:
        src = (d / "low_level.move").read_text("utf-8")
        header, chunks = split_functions(src)
        out = reassemble(header, [(c.name, c.raw_text) for c in chunks])
        header2, chunks2 = split_functions(out)
        assert [c.name for c in chunks2] == [c.name for c in chunks]
        out2 = reassemble(header2, [(c.name, c.raw_text) for c in chunks2])
        assert normalize_ws(out2) == normalize_ws(out)


# build_context --------------------------------------------------------------


def test_context_single_function_has_no_stubs():
    src = "module 0x1::solo { fun only() {} }"
    header, _ = split_functions(src)
    ir = parse_disassembly(src)
    ctx = build_context(header, ir, "only")
    assert "fun only" not in ctx
    assert ctx.startswith("module 0x1::solo {")
    assert ctx.rstrip().endswith("}")


def test_context_contains_only_sibling_stubs():
    src = """module 0x1::three {
        fun f1() {}
        fun f2() {}
        fun f3() {}
    }"""
    header, _ = split_functions(src)
    ir = parse_disassembly(src)
    ctx = build_context(header, ir, "f2")
    assert "fun f1();" in ctx and "fun f3();" in ctx
    assert "f2" not in ctx


def test_context_deterministic():
    header, _ = split_functions(TWO_FUNCTIONS)
    ir = parse_disassembly(TWO_FUNCTIONS)
    assert build_context(header, ir, "first") == build_context(header, ir, "first")


def test_context_unknown_function():
    header, _ = split_functions(TWO_FUNCTIONS)
    ir = parse_disassembly(TWO_FUNCTIONS)
    with pytest.raises(UnknownFunctionError):
        build_context(header, ir, "ghost")


# reassemble -----------------------------------------------------------------


def test_reassemble_empty_outputs_is_valid_empty_module():
    header, _ = split_functions("module 0x1::empty { use sui::transfer; fun f() {} }")
    out = reassemble(header, [])
    ir = parse_disassembly(out)
    assert ir.name == "empty"
    assert not ir.functions


def test_reassemble_dedupes_lifted_imports():
    header, chunks = split_functions(TWO_FUNCTIONS)
    outputs = [
        ("first", "use sui::transfer;\nfun first(a: u64): u64 { a + 1 }"),
        ("second", "use sui::transfer;\npublic fun second(a: u64): u64 { a * 2 }"),
    ]
    out = reassemble(header, outputs)
    assert out.count("use sui::transfer;") == 1


def test_reassemble_missing_function():
    header, _ = split_functions(TWO_FUNCTIONS)
    with pytest.raises(MissingFunctionError) as e:
        reassemble(header, [("first", "// no code here at all")])
    assert e.value.name == "first"


def test_reassemble_duplicate_function():
    header, _ = split_functions(TWO_FUNCTIONS)
    outputs = [
        ("first", "fun first(a: u64): u64 { a }"),
        ("second", "fun first(a: u64): u64 { a }"),
    ]
    with pytest.raises(DuplicateFunctionError):
        reassemble(header, outputs)


def test_single_function_parser_unwraps_module():
    name, text, uses = parse_single_function(
        "module 0x1::m { use sui::event; fun inner(): u64 { 3 } }"
    )
    assert name == "inner"
    assert text.startswith("fun inner")
    assert uses == ["use sui::event;"]


def test_single_function_keeps_doc_comments_and_attrs():
    raw = "/// doc line\n#[allow(lint)]\npublic fun noted() {}"
    name, text, _ = parse_single_function(raw)
    assert name == "noted"
    assert text.startswith("/// doc line")
    assert "#[allow(lint)]" in text


# property: generated modules round-trip -------------------------------------

_IDENT = st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True)


@st.composite
def modules(draw):
    name = draw(_IDENT)
    n = draw(st.integers(1, 5))
    fn_names = draw(st.lists(_IDENT, min_size=n, max_size=n, unique=True))
    parts = [f"module 0x{draw(st.integers(1, 255)):x}::{name} {{"]
    if draw(st.booleans()):
        parts.append("    use sui::transfer;")
    if draw(st.booleans()):
        parts.append("    struct S has key { id: sui::object::UID, n: u64 }")
    if draw(st.booleans()):
        parts.append(f"    const K: u64 = {draw(st.integers(0, 999))};")
    for fn in fn_names:
        vis = draw(st.sampled_from(["", "public ", "entry "]))
        body = draw(
            st.sampled_from(
                [
                    "{ }",
                    "{ let v0 = 1; v0 }",
                    "{ if (true) { 1 } else { 2 } }",
                    '{ let s = b"x;{}"; 0 }',
                    "{ while (false) { }; 9 }",
                ]
            )
        )
        ret = ": u64 " if "1" in body or "9" in body or "v0" in body else " "
        parts.append(f"    {vis}fun {fn}(){ret.rstrip()} {body}")
    parts.append("}")
    return "\n".join(parts)


@settings(max_examples=60, deadline=None)
@given(modules())
def test_generated_modules_round_trip(src):
    header, chunks = split_functions(src)
    out = reassemble(header, [(c.name, c.raw_text) for c in chunks])
    assert normalize_ws(out) == normalize_ws(src)
    header2, chunks2 = split_functions(out)
    assert [c.name for c in chunks2] == [c.name for c in chunks]
