"""Signature-level module IR: types, parsers, and derived views."""

from .disassembly import parse_disassembly
from .errors import EmptyInputError, MoveSyntaxError, SchemaError
from .normalized import parse_normalized
from .render import (
    fingerprint,
    render_interface,
    render_interface_module,
    render_signature,
    render_type,
)
from .types import (
    ABILITIES,
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
    short_address,
    type_key,
)

__all__ = [
    "ABILITIES",
    "Datatype",
    "EmptyInputError",
    "FunctionSig",
    "ModuleIR",
    "MoveSyntaxError",
    "MoveType",
    "Prim",
    "PRIMITIVES",
    "Reference",
    "SchemaError",
    "StructIR",
    "StructTypeParam",
    "TypeParam",
    "Vector",
    "fingerprint",
    "normalize_address",
    "parse_disassembly",
    "parse_normalized",
    "render_interface",
    "render_interface_module",
    "render_signature",
    "render_type",
    "short_address",
    "type_key",
]
