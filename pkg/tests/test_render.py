from mad.ir import (
    parse_disassembly,
    render_interface,
    render_interface_module,
)

SRC = """module 0xf00::market {
    use sui::object::{Self, UID};
    use sui::tx_context::{Self, TxContext};
    use sui::transfer;

    struct Listing has key, store {
        id: UID,
        price: u64,
    }

    entry fun list(arg0: u64, arg1: &mut TxContext) {
        let v0 = Listing{id: object::new(arg1), price: arg0};
        transfer::share_object<Listing>(v0);
    }

    public fun price(arg0: &Listing): u64 {
        arg0.price
    }

    fun internal_check(arg0: u64): bool {
        arg0 > 0
    }
}
"""


def test_single_signature_line():
    ir = parse_disassembly("module 0x1::m { public fun f(): u64 { 0 } }")
    text = render_interface(ir)
    lines = [l for l in text.splitlines() if "fun f" in l]
    assert lines == ["public fun f(): u64;"]


def test_render_is_deterministic():
    ir = parse_disassembly(SRC)
    assert render_interface(ir) == render_interface(ir)
    assert render_interface_module(ir) == render_interface_module(ir)


def test_interface_has_no_bodies():
    text = render_interface(parse_disassembly(SRC))
    assert "object::new" not in text
    assert "share_object" not in text
    assert "price;" not in text  # field lines keep types
    assert "price: u64," in text


def test_render_reparse_round_trip():
    ir = parse_disassembly(SRC)
    body = render_interface(ir)
    stub = f"module 0xf00::market {{\n{body}\n}}"
    ir2 = parse_disassembly(stub)
    assert ir2.fingerprints() == ir.fingerprints()
    assert {s.name for s in ir2.structs} == {s.name for s in ir.structs}


def test_render_reparse_round_trip_all_dual_fixtures(fixtures_dir):
    for move_file in sorted((fixtures_dir / "dual").glob("*.move")):
        ir = parse_disassembly(move_file.read_text("utf-8"))
        stub = f"module 0x{ir.address}::{ir.name} {{\n{render_interface(ir)}\n}}"
        ir2 = parse_disassembly(stub)
        assert ir2.fingerprints() == ir.fingerprints(), move_file.stem


def test_wrapped_interface_module_reparses():
    ir = parse_disassembly(SRC)
    ir2 = parse_disassembly(render_interface_module(ir))
    assert ir2.fingerprints() == ir.fingerprints()
    assert ir2.name == ir.name and ir2.address == ir.address
