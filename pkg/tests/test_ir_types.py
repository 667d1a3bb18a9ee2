import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mad.ir import (
    Datatype,
    FunctionSig,
    ModuleIR,
    Prim,
    Reference,
    StructIR,
    TypeParam,
    Vector,
    fingerprint,
    normalize_address,
    short_address,
    type_key,
)

# ---------------------------------------------------------------------------
# address normalization
# ---------------------------------------------------------------------------


def test_normalize_pads_to_64():
    assert normalize_address("0x2") == "0" * 63 + "2"
    assert len(normalize_address("0xDEAD")) == 64
    assert normalize_address("0xDEAD").endswith("dead")


def test_normalize_rejects_garbage():
    with pytest.raises(ValueError):
        normalize_address("0xzz")
    with pytest.raises(ValueError):
        normalize_address("")
    with pytest.raises(ValueError):
        normalize_address("0x" + "a" * 65)


def test_short_address_round_trip():
    assert short_address(normalize_address("0x2")) == "0x2"
    assert short_address(normalize_address("0x0")) == "0x0"


# ---------------------------------------------------------------------------
# construction invariants
# ---------------------------------------------------------------------------


def test_reference_cannot_nest():
    with pytest.raises(ValueError):
        Reference(False, Reference(True, Prim("u64")))


def test_struct_rejects_duplicate_fields():
    with pytest.raises(ValueError):
        StructIR(name="S", fields=(("a", Prim("u64")), ("a", Prim("u8"))))


def test_module_rejects_duplicate_function_names():
    f = FunctionSig(name="f")
    with pytest.raises(ValueError):
        ModuleIR(address="0x1", name="m", functions=(f, f))


def test_type_param_index_bounded_by_arity():
    with pytest.raises(ValueError):
        FunctionSig(name="f", params=((None, TypeParam(0)),))  # no type params declared
    FunctionSig(name="f", type_params=(frozenset(),), params=((None, TypeParam(0)),))


def test_bad_visibility_rejected():
    with pytest.raises(ValueError):
        FunctionSig(name="f", visibility="internal")


# ---------------------------------------------------------------------------
# fingerprints
# ---------------------------------------------------------------------------


def test_fingerprint_ignores_parameter_names():
    a = FunctionSig(name="f", params=(("x", Prim("u64")),))
    b = FunctionSig(name="f", params=(("v0", Prim("u64")),))
    assert fingerprint(a) == fingerprint(b)


def test_fingerprint_distinguishes_visibility():
    a = FunctionSig(name="f", visibility="public", params=((None, Prim("u64")),))
    b = FunctionSig(name="f", visibility="private", params=((None, Prim("u64")),))
    assert fingerprint(a) != fingerprint(b)


def test_fingerprint_distinguishes_entry_flag():
    a = FunctionSig(name="f", is_entry=True)
    b = FunctionSig(name="f", is_entry=False)
    assert fingerprint(a) != fingerprint(b)


# hypothesis strategies over signatures ------------------------------------

_prims = st.sampled_from(["bool", "u8", "u64", "u128", "address"]).map(Prim)


def _types(max_tparams: int):
    base = _prims
    if max_tparams:
        base = base | st.integers(0, max_tparams - 1).map(TypeParam)
    base = base | st.builds(
        Datatype,
        address=st.sampled_from(["0x1", "0x2", "0xabc"]),
        module=st.sampled_from(["object", "coin", "m"]),
        name=st.sampled_from(["A", "B", "C"]),
    )
    return st.recursive(
        base,
        lambda inner: st.builds(Vector, inner)
        | st.builds(Reference, st.booleans(), inner.filter(lambda t: not isinstance(t, Reference))),
        max_leaves=4,
    )


@st.composite
def signatures(draw):
    n_tparams = draw(st.integers(0, 2))
    tparams = tuple(
        frozenset(draw(st.sets(st.sampled_from(["copy", "drop", "store", "key"]), max_size=2)))
        for _ in range(n_tparams)
    )
    types = _types(n_tparams)
    params = tuple(
        (draw(st.sampled_from([None, "x", "v0"])), draw(types))
        for _ in range(draw(st.integers(0, 3)))
    )
    returns = tuple(draw(types) for _ in range(draw(st.integers(0, 2))))
    return FunctionSig(
        name=draw(st.sampled_from(["f", "g", "transfer_all"])),
        visibility=draw(st.sampled_from(["public", "friend", "private"])),
        is_entry=draw(st.booleans()),
        type_params=tparams,
        params=params,
        returns=returns,
    )


def _structurally_equal(a: FunctionSig, b: FunctionSig) -> bool:
    """Brute-force comparator: field-by-field equality modulo parameter names."""
    return (
        a.name == b.name
        and a.visibility == b.visibility
        and a.is_entry == b.is_entry
        and a.type_params == b.type_params
        and tuple(t for _, t in a.params) == tuple(t for _, t in b.params)
        and a.returns == b.returns
    )


@settings(max_examples=200)
@given(signatures(), signatures())
def test_fingerprint_equality_matches_structural_oracle(a, b):
    assert (fingerprint(a) == fingerprint(b)) == _structurally_equal(a, b)


@settings(max_examples=100)
@given(signatures(), st.sampled_from([None, "x", "y", "v7"]))
def test_fingerprint_invariant_under_renaming(sig, new_name):
    renamed = FunctionSig(
        name=sig.name,
        visibility=sig.visibility,
        is_entry=sig.is_entry,
        type_params=sig.type_params,
        params=tuple((new_name, t) for _, t in sig.params),
        returns=sig.returns,
    )
    assert fingerprint(renamed) == fingerprint(sig)


@settings(max_examples=100)
@given(_types(0), _types(0))
def test_type_key_injective_on_samples(a, b):
    assert (type_key(a) == type_key(b)) == (a == b)
