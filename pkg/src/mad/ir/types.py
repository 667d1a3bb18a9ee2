"""Typed, signature-level representation of one on-chain Move module.

All values are immutable after construction and safe to share across
concurrent workers. Addresses are stored normalized: lowercase, unprefixed,
left-padded to 64 hex chars.
"""

from __future__ import annotations

from dataclasses import dataclass, field

ABILITIES = ("copy", "drop", "store", "key")

PRIMITIVES = frozenset(
    {"bool", "u8", "u16", "u32", "u64", "u128", "u256", "address", "signer"}
)


def normalize_address(addr: str) -> str:
    """'0x2' -> '0000...0002' (64 chars). Raises ValueError on non-hex or overlong input."""
    raw = addr.lower()
    if raw.startswith("0x"):
        raw = raw[2:]
    raw = raw.replace("_", "")
    if not raw or len(raw) > 64 or any(c not in "0123456789abcdef" for c in raw):
        raise ValueError(f"not a valid account address: {addr!r}")
    return raw.zfill(64)


def short_address(addr: str) -> str:
    """Inverse-ish of normalize_address for display: '0x2'."""
    return "0x" + (addr.lstrip("0") or "0")


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Prim:
    name: str  # one of PRIMITIVES

    def __post_init__(self):
        if self.name not in PRIMITIVES:
            raise ValueError(f"unknown primitive type: {self.name}")


@dataclass(frozen=True)
class Vector:
    element: "MoveType"


@dataclass(frozen=True)
class Datatype:
    """Reference to a declared struct/enum. Unresolvable bare names keep
    address == module == ""."""

    address: str
    module: str
    name: str
    type_args: tuple["MoveType", ...] = ()

    def __post_init__(self):
        if self.address:
            object.__setattr__(self, "address", normalize_address(self.address))


@dataclass(frozen=True)
class Reference:
    mutable: bool
    target: "MoveType"

    def __post_init__(self):
        if isinstance(self.target, Reference):
            raise ValueError("references cannot nest inside references")


@dataclass(frozen=True)
class TypeParam:
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("type parameter index must be non-negative")


MoveType = Prim | Vector | Datatype | Reference | TypeParam


def type_key(t: MoveType) -> str:
    """Canonical text for a type; equal keys iff structurally equal types."""
    if isinstance(t, Prim):
        return t.name
    if isinstance(t, Vector):
        return f"vector<{type_key(t.element)}>"
    if isinstance(t, Reference):
        return ("&mut " if t.mutable else "&") + type_key(t.target)
    if isinstance(t, TypeParam):
        return f"${t.index}"
    if isinstance(t, Datatype):
        base = f"{t.address or '?'}::{t.module or '?'}::{t.name}"
        if t.type_args:
            return base + "<" + ",".join(type_key(a) for a in t.type_args) + ">"
        return base
    raise TypeError(f"not a MoveType: {t!r}")


def max_type_param_index(t: MoveType) -> int:
    """Largest type-parameter index used in t, or -1."""
    if isinstance(t, TypeParam):
        return t.index
    if isinstance(t, Vector):
        return max_type_param_index(t.element)
    if isinstance(t, Reference):
        return max_type_param_index(t.target)
    if isinstance(t, Datatype):
        return max((max_type_param_index(a) for a in t.type_args), default=-1)
    return -1


def ability_key(abilities: frozenset[str]) -> str:
    return "+".join(a for a in ABILITIES if a in abilities)


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StructTypeParam:
    name: str
    constraints: frozenset[str] = frozenset()
    phantom: bool = False


@dataclass(frozen=True)
class StructIR:
    name: str
    abilities: frozenset[str] = frozenset()
    type_params: tuple[StructTypeParam, ...] = ()
    fields: tuple[tuple[str, MoveType], ...] = ()  # declaration order

    def __post_init__(self):
        names = [f for f, _ in self.fields]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate field name in struct {self.name}")
        arity = len(self.type_params)
        for _, t in self.fields:
            if max_type_param_index(t) >= arity:
                raise ValueError(f"type parameter index out of range in struct {self.name}")


@dataclass(frozen=True)
class FunctionSig:
    name: str
    visibility: str = "private"  # public | friend | private
    is_entry: bool = False
    type_params: tuple[frozenset[str], ...] = ()  # ability-constraint sets
    params: tuple[tuple[str | None, MoveType], ...] = ()  # declaration order
    returns: tuple[MoveType, ...] = ()

    def __post_init__(self):
        if self.visibility not in ("public", "friend", "private"):
            raise ValueError(f"bad visibility {self.visibility!r} on {self.name}")
        arity = len(self.type_params)
        for t in [t for _, t in self.params] + list(self.returns):
            if max_type_param_index(t) >= arity:
                raise ValueError(f"type parameter index out of range in fun {self.name}")


@dataclass(frozen=True)
class ModuleIR:
    address: str
    name: str
    dependencies: tuple[tuple[str, str], ...] = ()  # (address or named alias, module)
    structs: tuple[StructIR, ...] = ()
    functions: tuple[FunctionSig, ...] = ()
    constants: tuple[tuple[MoveType, bytes], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "address", normalize_address(self.address))
        for group, decls in (("function", self.functions), ("struct", self.structs)):
            names = [d.name for d in decls]
            if len(names) != len(set(names)):
                raise ValueError(f"duplicate {group} name in module {self.name}")

    def function(self, name: str) -> FunctionSig | None:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def struct(self, name: str) -> StructIR | None:
        for s in self.structs:
            if s.name == name:
                return s
        return None

    def fingerprints(self) -> frozenset[str]:
        from .render import fingerprint

        return frozenset(fingerprint(f) for f in self.functions)

    def strip_param_names(self) -> "ModuleIR":
        """Canonical twin with parameter names dropped; used to compare IRs
        produced from representations that do and do not carry names."""
        funs = tuple(
            FunctionSig(
                name=f.name,
                visibility=f.visibility,
                is_entry=f.is_entry,
                type_params=f.type_params,
                params=tuple((None, t) for _, t in f.params),
                returns=f.returns,
            )
            for f in self.functions
        )
        return ModuleIR(
            address=self.address,
            name=self.name,
            dependencies=self.dependencies,
            structs=self.structs,
            functions=funs,
            constants=self.constants,
        )
