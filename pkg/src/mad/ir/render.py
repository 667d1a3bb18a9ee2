"""Derived views of a ModuleIR: signature fingerprints and the interface listing."""

from __future__ import annotations

from .types import (
    ABILITIES,
    Datatype,
    FunctionSig,
    ModuleIR,
    MoveType,
    Prim,
    Reference,
    StructIR,
    TypeParam,
    Vector,
    ability_key,
    short_address,
    type_key,
)


def fingerprint(sig: FunctionSig) -> str:
    """Canonical signature text: ignores parameter names, keeps everything else.

    Equal fingerprints iff the signatures are structurally equal up to
    parameter renaming.
    """
    parts = [sig.visibility]
    if sig.is_entry:
        parts.append("entry")
    parts.append("fun")
    head = " ".join(parts) + " " + sig.name
    if sig.type_params:
        head += "<" + ",".join(ability_key(c) or "_" for c in sig.type_params) + ">"
    params = ", ".join(type_key(t) for _, t in sig.params)
    rets = ", ".join(type_key(t) for t in sig.returns)
    return f"{head}({params}): ({rets})"


def render_type(t: MoveType, type_param_names: tuple[str, ...] = ()) -> str:
    """Re-parsable source form of a type (display addresses, e.g. 0x2::coin::Coin<T>)."""
    if isinstance(t, Prim):
        return t.name
    if isinstance(t, Vector):
        return f"vector<{render_type(t.element, type_param_names)}>"
    if isinstance(t, Reference):
        return ("&mut " if t.mutable else "&") + render_type(t.target, type_param_names)
    if isinstance(t, TypeParam):
        if t.index < len(type_param_names):
            return type_param_names[t.index]
        return f"T{t.index}"
    if isinstance(t, Datatype):
        if t.address and t.module:
            base = f"{short_address(t.address)}::{t.module}::{t.name}"
        else:
            base = t.name
        if t.type_args:
            base += "<" + ", ".join(render_type(a, type_param_names) for a in t.type_args) + ">"
        return base
    raise TypeError(f"not a MoveType: {t!r}")


def _render_struct(s: StructIR) -> list[str]:
    tp_names = tuple(p.name for p in s.type_params)
    head = f"struct {s.name}"
    if s.type_params:
        decls = []
        for p in s.type_params:
            d = ("phantom " if p.phantom else "") + p.name
            if p.constraints:
                d += ": " + " + ".join(a for a in ABILITIES if a in p.constraints)
            decls.append(d)
        head += "<" + ", ".join(decls) + ">"
    if s.abilities:
        head += " has " + ", ".join(a for a in ABILITIES if a in s.abilities)
    lines = [head + " {"]
    for fname, ftype in s.fields:
        lines.append(f"    {fname}: {render_type(ftype, tp_names)},")
    lines.append("}")
    return lines


def render_signature(sig: FunctionSig, with_body: bool = False) -> str:
    """One declaration line for a function; `;`-terminated stub by default."""
    parts = []
    if sig.visibility == "public":
        parts.append("public")
    elif sig.visibility == "friend":
        parts.append("public(friend)")
    if sig.is_entry:
        parts.append("entry")
    parts.append("fun")
    tp_names = tuple(f"T{i}" for i in range(len(sig.type_params)))
    head = " ".join(parts) + " " + sig.name
    if sig.type_params:
        decls = []
        for i, constraints in enumerate(sig.type_params):
            d = tp_names[i]
            if constraints:
                d += ": " + " + ".join(a for a in ABILITIES if a in constraints)
            decls.append(d)
        head += "<" + ", ".join(decls) + ">"
    rendered_params = []
    for i, (pname, ptype) in enumerate(sig.params):
        rendered_params.append(f"{pname or f'p{i}'}: {render_type(ptype, tp_names)}")
    head += "(" + ", ".join(rendered_params) + ")"
    if sig.returns:
        if len(sig.returns) == 1:
            head += ": " + render_type(sig.returns[0], tp_names)
        else:
            head += ": (" + ", ".join(render_type(r, tp_names) for r in sig.returns) + ")"
    return head + (" {\n    }" if with_body else ";")


def render_interface(ir: ModuleIR) -> str:
    """Signatures-only listing: structs with fields, function stubs, no bodies.

    Declaration order is preserved and the output is deterministic. The text
    re-parses when wrapped in a `module addr::name { ... }` stub.
    """
    lines: list[str] = []
    for s in ir.structs:
        lines.extend(_render_struct(s))
        lines.append("")
    for f in ir.functions:
        lines.append(render_signature(f))
    return "\n".join(lines).strip() + "\n"


def render_interface_module(ir: ModuleIR) -> str:
    """render_interface wrapped in the module declaration (the UI's interface view)."""
    body = "\n".join("    " + ln if ln else "" for ln in render_interface(ir).splitlines())
    return f"module {short_address(ir.address)}::{ir.name} {{\n{body}\n}}\n"
