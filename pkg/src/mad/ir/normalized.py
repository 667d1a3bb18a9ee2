"""Parser for normalized-module documents (fullnode RPC shape).

Document shape (see docs/normalized-module-schema.md and the fixtures under
fixtures/normalized/):

    {
      "address": "0x2",
      "name": "counter",
      "structs": {"Counter": {"abilities": ["key"],
                              "typeParameters": [...],
                              "fields": [{"name": "id", "type": {...}}]}},
      "exposedFunctions": {"increment": {"visibility": "Public",
                                         "isEntry": true,
                                         "typeParameters": [{"abilities": [...]}],
                                         "parameters": [TYPE, ...],
                                         "return": [TYPE, ...]}}
    }

TYPE is either a primitive tag string ("U64", "Bool", "Address", "Signer")
or a single-key object: {"Vector": TYPE}, {"Reference": TYPE},
{"MutableReference": TYPE}, {"TypeParameter": N},
{"Struct": {"address", "module", "name", "typeArguments"}}.
"""

from __future__ import annotations

from typing import Any

from .errors import SchemaError
from .types import (
    Datatype,
    FunctionSig,
    ModuleIR,
    MoveType,
    Prim,
    Reference,
    StructIR,
    StructTypeParam,
    TypeParam,
    Vector,
)

_PRIM_TAGS = {
    "bool": "bool",
    "u8": "u8",
    "u16": "u16",
    "u32": "u32",
    "u64": "u64",
    "u128": "u128",
    "u256": "u256",
    "address": "address",
    "signer": "signer",
}

_VISIBILITY = {"public": "public", "friend": "friend", "private": "private"}


def _get(doc: Any, key: str, expected, path: str) -> Any:
    full = f"{path}.{key}" if path else key
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(full)
    value = doc[key]
    if not isinstance(value, expected):
        names = getattr(expected, "__name__", None) or "/".join(t.__name__ for t in expected)
        raise SchemaError(full, f"expected {names}")
    return value


def _parse_type(node: Any, path: str) -> MoveType:
    if isinstance(node, str):
        prim = _PRIM_TAGS.get(node.lower())
        if prim is None:
            raise SchemaError(path, f"unknown type tag {node!r}")
        return Prim(prim)
    if not isinstance(node, dict) or len(node) != 1:
        raise SchemaError(path, "expected type tag string or single-key object")
    tag, payload = next(iter(node.items()))
    if tag == "Vector":
        return Vector(_parse_type(payload, f"{path}.Vector"))
    if tag == "Reference":
        return Reference(False, _parse_type(payload, f"{path}.Reference"))
    if tag == "MutableReference":
        return Reference(True, _parse_type(payload, f"{path}.MutableReference"))
    if tag == "TypeParameter":
        if not isinstance(payload, int):
            raise SchemaError(f"{path}.TypeParameter", "expected integer index")
        return TypeParam(payload)
    if tag == "Struct":
        spath = f"{path}.Struct"
        address = _get(payload, "address", str, spath)
        module = _get(payload, "module", str, spath)
        name = _get(payload, "name", str, spath)
        raw_args = payload.get("typeArguments", [])
        if not isinstance(raw_args, list):
            raise SchemaError(f"{spath}.typeArguments", "expected list")
        args = tuple(_parse_type(a, f"{spath}.typeArguments[{i}]") for i, a in enumerate(raw_args))
        try:
            return Datatype(address, module, name, args)
        except ValueError as e:
            raise SchemaError(f"{spath}.address", str(e)) from e
    raise SchemaError(path, f"unknown type tag {tag!r}")


def _constraint_abilities(node: Any, path: str) -> frozenset[str]:
    """Accepts {"abilities": [...]} or {"constraints": {"abilities": [...]}}."""
    if isinstance(node, dict) and "constraints" in node:
        node = node["constraints"]
    if not isinstance(node, dict) or not isinstance(node.get("abilities"), list):
        raise SchemaError(path, "expected abilities list")
    out = set()
    for a in node["abilities"]:
        if not isinstance(a, str) or a.lower() not in ("copy", "drop", "store", "key"):
            raise SchemaError(path, f"unknown ability {a!r}")
        out.add(a.lower())
    return frozenset(out)


def _parse_struct(name: str, node: Any, path: str) -> StructIR:
    abilities_raw = node.get("abilities")
    if isinstance(abilities_raw, dict):  # fullnodes wrap as {"abilities": [...]}
        abilities_raw = abilities_raw.get("abilities")
    if not isinstance(abilities_raw, list):
        raise SchemaError(f"{path}.abilities")
    abilities = frozenset(
        a.lower() for a in abilities_raw if isinstance(a, str) and a.lower() in ("copy", "drop", "store", "key")
    )
    if len(abilities) != len(abilities_raw):
        raise SchemaError(f"{path}.abilities", "unknown ability")

    tparams: list[StructTypeParam] = []
    for i, tp in enumerate(node.get("typeParameters", [])):
        phantom = bool(tp.get("isPhantom", False)) if isinstance(tp, dict) else False
        constraints = _constraint_abilities(tp, f"{path}.typeParameters[{i}]")
        tparams.append(StructTypeParam(f"T{i}", constraints, phantom))

    fields_raw = _get(node, "fields", list, path)
    fields: list[tuple[str, MoveType]] = []
    for i, f in enumerate(fields_raw):
        fpath = f"{path}.fields[{i}]"
        fname = _get(f, "name", str, fpath)
        ftype = _parse_type(_get(f, "type", (str, dict), fpath), f"{fpath}.type")
        fields.append((fname, ftype))
    return StructIR(name=name, abilities=abilities, type_params=tuple(tparams), fields=tuple(fields))


def _parse_function(name: str, node: Any, path: str) -> FunctionSig:
    vis_raw = _get(node, "visibility", str, path)
    visibility = _VISIBILITY.get(vis_raw.lower())
    if visibility is None:
        raise SchemaError(f"{path}.visibility", f"unknown visibility {vis_raw!r}")
    is_entry = node.get("isEntry", False)
    if not isinstance(is_entry, bool):
        raise SchemaError(f"{path}.isEntry", "expected boolean")

    tparams = tuple(
        _constraint_abilities(tp, f"{path}.typeParameters[{i}]")
        for i, tp in enumerate(node.get("typeParameters", []))
    )
    params_raw = _get(node, "parameters", list, path)
    params = tuple(
        (None, _parse_type(p, f"{path}.parameters[{i}]")) for i, p in enumerate(params_raw)
    )
    returns_raw = _get(node, "return", list, path)
    returns = tuple(_parse_type(r, f"{path}.return[{i}]") for i, r in enumerate(returns_raw))
    return FunctionSig(
        name=name,
        visibility=visibility,
        is_entry=is_entry,
        type_params=tparams,
        params=params,
        returns=returns,
    )


def parse_normalized(doc: dict) -> ModuleIR:
    """Parse one normalized-module document into a ModuleIR.

    Parameter names are absent in this representation; the IR carries None
    names. Raises SchemaError(path) on missing/mistyped fields.
    """
    if not isinstance(doc, dict):
        raise SchemaError("", "expected object")
    address = _get(doc, "address", str, "")
    name = _get(doc, "name", str, "")
    structs_raw = _get(doc, "structs", dict, "")
    functions_raw = _get(doc, "exposedFunctions", dict, "")

    try:
        structs = tuple(
            _parse_struct(sname, snode, f"structs.{sname}") for sname, snode in structs_raw.items()
        )
        functions = tuple(
            _parse_function(fname, fnode, f"exposedFunctions.{fname}")
            for fname, fnode in functions_raw.items()
        )
        return ModuleIR(
            address=address,
            name=name,
            structs=structs,
            functions=functions,
        )
    except ValueError as e:
        raise SchemaError("address", str(e)) from e
