import pytest

from mad.ir import (
    Datatype,
    EmptyInputError,
    MoveSyntaxError,
    Prim,
    Reference,
    Vector,
    parse_disassembly,
)


def test_minimal_module():
    ir = parse_disassembly("module 0x2::m { fun f() {} }")
    assert ir.name == "m"
    assert ir.address.endswith("2")
    assert len(ir.functions) == 1
    assert ir.functions[0].name == "f"
    assert ir.functions[0].visibility == "private"
    assert not ir.structs


# Hand-built IR fixture, cross-checked field by field.
FIXTURE = """
module 0x7::game {
    use sui::object::{Self, UID};
    use sui::tx_context::TxContext;

    struct S has key {
        id: UID,
        score: u64,
    }

    entry fun g(s: &mut S, ctx: &mut TxContext) {
        s.score = s.score + 1;
    }
}
"""


def test_struct_and_entry_function_fixture():
    ir = parse_disassembly(FIXTURE)
    assert [s.name for s in ir.structs] == ["S"]
    s = ir.structs[0]
    assert s.abilities == frozenset({"key"})
    assert [f for f, _ in s.fields] == ["id", "score"]
    uid = s.fields[0][1]
    assert isinstance(uid, Datatype)
    assert (uid.module, uid.name) == ("object", "UID")
    assert uid.address.endswith("2")
    assert s.fields[1][1] == Prim("u64")

    g = ir.function("g")
    assert g is not None and g.is_entry and g.visibility == "private"
    assert len(g.params) == 2
    for _, ptype in g.params:
        assert isinstance(ptype, Reference) and ptype.mutable
    ctx = g.params[1][1].target
    assert (ctx.module, ctx.name) == ("tx_context", "TxContext")


def test_empty_input_raises():
    with pytest.raises(EmptyInputError):
        parse_disassembly("")
    with pytest.raises(EmptyInputError):
        parse_disassembly("   \n\t ")


def test_missing_module_keyword():
    with pytest.raises(MoveSyntaxError) as e:
        parse_disassembly("script { fun f() {} }")
    assert "module" in str(e.value)


def test_syntax_error_carries_line():
    bad = "module 0x1::m {\n    struct S has key { id } \n}"
    with pytest.raises(MoveSyntaxError) as e:
        parse_disassembly(bad)
    assert e.value.line == 2


def test_bodies_are_skipped_not_parsed():
    src = """module 0x1::m {
        fun f(): u64 {
            let x = b"{{{ not real braces }[)";
            // } stray comment brace
            /* nested /* comment */ } */
            42
        }
    }"""
    ir = parse_disassembly(src)
    assert ir.function("f").returns == (Prim("u64"),)


def test_instruction_listing_bodies():
    src = """// Move bytecode v6
module 0x9::ops {
    public fun run(arg0: vector<u8>): bool {
    B0:
        0: LdU64(0)
        1: MoveLoc[0](Arg0: vector<u8>)
        2: VecLen(1)
        3: Ret
    }
}"""
    ir = parse_disassembly(src)
    run = ir.function("run")
    assert run.visibility == "public"
    assert run.params[0][1] == Vector(Prim("u8"))
    assert run.returns == (Prim("bool"),)


def test_visibility_forms():
    src = """module 0x1::v {
        public fun a() {}
        public(friend) fun b() {}
        public(package) fun c() {}
        entry fun d() {}
        fun e() {}
        native fun n(): u64;
    }"""
    ir = parse_disassembly(src)
    vis = {f.name: f.visibility for f in ir.functions}
    assert vis == {"a": "public", "b": "friend", "c": "friend", "d": "private", "e": "private", "n": "private"}
    assert ir.function("d").is_entry


def test_generic_constraints_and_phantom():
    src = """module 0x1::gen {
        struct Box<phantom T: copy + drop, U> has store {
            item: U,
        }
        public fun make<T: store>(x: T): Box<u8, T> {
            abort 0
        }
    }"""
    ir = parse_disassembly(src)
    box = ir.struct("Box")
    assert box.type_params[0].phantom
    assert box.type_params[0].constraints == frozenset({"copy", "drop"})
    assert not box.type_params[1].phantom
    make = ir.function("make")
    assert make.type_params == (frozenset({"store"}),)
    ret = make.returns[0]
    assert isinstance(ret, Datatype) and ret.type_args[0] == Prim("u8")


def test_dependencies_collected_and_deduped():
    src = """module 0x1::deps {
        use sui::transfer;
        use sui::transfer;
        use 0x2::coin;
        friend 0xabc::other;
        fun f() {}
    }"""
    ir = parse_disassembly(src)
    mods = [m for _, m in ir.dependencies]
    assert mods == ["transfer", "coin", "other"]


def test_constants_keep_type_and_raw_bytes():
    src = """module 0x1::c {
        const MAX: u64 = 100 * 2;
        const NAME: vector<u8> = b"hi;{}";
        fun f() {}
    }"""
    ir = parse_disassembly(src)
    assert ir.constants[0][0] == Prim("u64")
    assert ir.constants[0][1] == b"100 * 2"
    assert ir.constants[1][1] == b'b"hi;{}"'


def test_unbalanced_function_body():
    with pytest.raises(MoveSyntaxError):
        parse_disassembly("module 0x1::m { fun f() { if (true) { } }")
