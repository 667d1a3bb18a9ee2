#!/usr/bin/env python3
"""Regenerate the deterministic fixture corpus under fixtures/.

Writes, per template instance: a Revela-style low-level source, a
disassembly-style rendering (same declarations, instruction-listing bodies,
fully qualified types, no imports), and for instance 0 of each template a
normalized-module JSON document. Also writes the corpus manifest, recorded
recompilation-outcome vectors per prompt arm, and the mutation suite.

Everything is derived from the declarative tables below; rerunning the
script reproduces identical bytes.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"


# ---------------------------------------------------------------------------
# normalized-type DSL
# ---------------------------------------------------------------------------

def struct_t(addr, module, name, *args):
    return {"Struct": {"address": addr, "module": module, "name": name,
                       "typeArguments": list(args)}}


def vec_t(t):
    return {"Vector": t}


def ref_t(t):
    return {"Reference": t}


def mref_t(t):
    return {"MutableReference": t}


UID = struct_t("0x2", "object", "UID")
TX = struct_t("0x2", "tx_context", "TxContext")
CLOCK = struct_t("0x2", "clock", "Clock")
SUI_T = struct_t("0x2", "sui", "SUI")
COIN_SUI = struct_t("0x2", "coin", "Coin", SUI_T)
BALANCE_SUI = struct_t("0x2", "balance", "Balance", SUI_T)


def fn_doc(visibility, entry, params, returns, tparams=()):
    return {
        "visibility": visibility,
        "isEntry": entry,
        "typeParameters": [{"abilities": list(a)} for a in tparams],
        "parameters": list(params),
        "return": list(returns),
    }


# ---------------------------------------------------------------------------
# templates: low-level text + aligned normalized document
# ---------------------------------------------------------------------------

TEMPLATES = [
    {
        "base": "counter",
        "addr_prefix": "a1",
        "uses": [
            "use sui::object::{Self, UID};",
            "use sui::tx_context::{Self, TxContext};",
            "use sui::transfer;",
        ],
        "structs_text": [
            "struct Counter has key {\n"
            "        id: UID,\n"
            "        owner: address,\n"
            "        value: u64,\n"
            "    }"
        ],
        "consts": ["const E_NOT_OWNER: u64 = 0;"],
        "functions": [
            (
                "entry fun create(arg0: u64, arg1: &mut TxContext)",
                "{\n"
                "        let v0 = tx_context::sender(arg1);\n"
                "        let v1 = Counter{\n"
                "            id    : object::new(arg1),\n"
                "            owner : v0,\n"
                "            value : arg0,\n"
                "        };\n"
                "        transfer::transfer<Counter>(v1, v0);\n"
                "    }",
            ),
            (
                "entry fun increment(arg0: &mut Counter, arg1: &TxContext)",
                "{\n"
                "        let v0 = tx_context::sender(arg1);\n"
                "        assert!(arg0.owner == v0, 0);\n"
                "        touch(arg0);\n"
                "    }",
            ),
            (
                "fun touch(arg0: &mut Counter)",
                "{\n"
                "        arg0.value = arg0.value + 1;\n"
                "    }",
            ),
            (
                "public fun value(arg0: &Counter): u64",
                "{\n"
                "        arg0.value\n"
                "    }",
            ),
        ],
        "normalized": {
            "structs": {
                "Counter": {
                    "abilities": ["Key"],
                    "typeParameters": [],
                    "fields": [
                        {"name": "id", "type": UID},
                        {"name": "owner", "type": "Address"},
                        {"name": "value", "type": "U64"},
                    ],
                }
            },
            "exposedFunctions": {
                "create": fn_doc("Private", True, ["U64", mref_t(TX)], []),
                "increment": fn_doc(
                    "Private", True,
                    [mref_t(struct_t("SELF", "MOD", "Counter")), ref_t(TX)], [],
                ),
                "touch": fn_doc(
                    "Private", False, [mref_t(struct_t("SELF", "MOD", "Counter"))], [],
                ),
                "value": fn_doc(
                    "Public", False, [ref_t(struct_t("SELF", "MOD", "Counter"))], ["U64"],
                ),
            },
        },
    },
    {
        "base": "vault",
        "addr_prefix": "b2",
        "uses": [
            "use sui::object::{Self, UID};",
            "use sui::tx_context::{Self, TxContext};",
            "use sui::balance::{Self, Balance};",
            "use sui::coin::{Self, Coin};",
            "use sui::sui::SUI;",
            "use sui::transfer;",
        ],
        "structs_text": [
            "struct Vault has key {\n"
            "        id: UID,\n"
            "        owner: address,\n"
            "        funds: Balance<SUI>,\n"
            "        total: u64,\n"
            "    }"
        ],
        "consts": ["const E_NOT_OWNER: u64 = 1;", "const E_LOW_BALANCE: u64 = 2;"],
        "functions": [
            (
                "entry fun open(arg0: &mut TxContext)",
                "{\n"
                "        let v0 = Vault{\n"
                "            id    : object::new(arg0),\n"
                "            owner : tx_context::sender(arg0),\n"
                "            funds : balance::zero<SUI>(),\n"
                "            total : 0,\n"
                "        };\n"
                "        transfer::share_object<Vault>(v0);\n"
                "    }",
            ),
            (
                "public fun deposit(arg0: &mut Vault, arg1: Coin<SUI>)",
                "{\n"
                "        let v0 = coin::into_balance<SUI>(arg1);\n"
                "        let v1 = balance::value<SUI>(&v0);\n"
                "        arg0.total = arg0.total + v1;\n"
                "        balance::join<SUI>(&mut arg0.funds, v0);\n"
                "    }",
            ),
            (
                "public fun balance_of(arg0: &Vault): u64",
                "{\n"
                "        balance::value<SUI>(&arg0.funds)\n"
                "    }",
            ),
            (
                "entry fun withdraw(arg0: &mut Vault, arg1: u64, arg2: &mut TxContext)",
                "{\n"
                "        let v0 = tx_context::sender(arg2);\n"
                "        assert!(arg0.owner == v0, 1);\n"
                "        let v1 = balance::value<SUI>(&arg0.funds);\n"
                "        if (v1 < arg1) {\n"
                "            abort 2\n"
                "        };\n"
                "        let v2 = coin::take<SUI>(&mut arg0.funds, arg1, arg2);\n"
                "        transfer::public_transfer<Coin<SUI>>(v2, v0);\n"
                "    }",
            ),
        ],
        "normalized": {
            "structs": {
                "Vault": {
                    "abilities": ["Key"],
                    "typeParameters": [],
                    "fields": [
                        {"name": "id", "type": UID},
                        {"name": "owner", "type": "Address"},
                        {"name": "funds", "type": BALANCE_SUI},
                        {"name": "total", "type": "U64"},
                    ],
                }
            },
            "exposedFunctions": {
                "open": fn_doc("Private", True, [mref_t(TX)], []),
                "deposit": fn_doc(
                    "Public", False,
                    [mref_t(struct_t("SELF", "MOD", "Vault")), COIN_SUI], [],
                ),
                "balance_of": fn_doc(
                    "Public", False, [ref_t(struct_t("SELF", "MOD", "Vault"))], ["U64"],
                ),
                "withdraw": fn_doc(
                    "Private", True,
                    [mref_t(struct_t("SELF", "MOD", "Vault")), "U64", mref_t(TX)], [],
                ),
            },
        },
    },
    {
        "base": "registry",
        "addr_prefix": "c3",
        "uses": [
            "use std::vector;",
            "use sui::object::{Self, UID};",
            "use sui::tx_context::{Self, TxContext};",
            "use sui::transfer;",
        ],
        "structs_text": [
            "struct Registry has key {\n"
            "        id: UID,\n"
            "        members: vector<address>,\n"
            "    }"
        ],
        "consts": ["const E_OUT_OF_RANGE: u64 = 7;"],
        "functions": [
            (
                "entry fun create(arg0: &mut TxContext)",
                "{\n"
                "        let v0 = Registry{\n"
                "            id      : object::new(arg0),\n"
                "            members : vector[],\n"
                "        };\n"
                "        transfer::share_object<Registry>(v0);\n"
                "    }",
            ),
            (
                "fun check_range(arg0: &Registry, arg1: u64)",
                "{\n"
                "        let v0 = vector::length<address>(&arg0.members);\n"
                "        if (arg1 >= v0) {\n"
                "            abort 7\n"
                "        };\n"
                "    }",
            ),
            (
                "public fun member_at(arg0: &Registry, arg1: u64): address",
                "{\n"
                "        check_range(arg0, arg1);\n"
                "        *vector::borrow<address>(&arg0.members, arg1)\n"
                "    }",
            ),
            (
                "entry fun add_member(arg0: &mut Registry, arg1: address)",
                "{\n"
                "        vector::push_back<address>(&mut arg0.members, arg1);\n"
                "    }",
            ),
        ],
        "normalized": {
            "structs": {
                "Registry": {
                    "abilities": ["Key"],
                    "typeParameters": [],
                    "fields": [
                        {"name": "id", "type": UID},
                        {"name": "members", "type": vec_t("Address")},
                    ],
                }
            },
            "exposedFunctions": {
                "create": fn_doc("Private", True, [mref_t(TX)], []),
                "check_range": fn_doc(
                    "Private", False,
                    [ref_t(struct_t("SELF", "MOD", "Registry")), "U64"], [],
                ),
                "member_at": fn_doc(
                    "Public", False,
                    [ref_t(struct_t("SELF", "MOD", "Registry")), "U64"], ["Address"],
                ),
                "add_member": fn_doc(
                    "Private", True,
                    [mref_t(struct_t("SELF", "MOD", "Registry")), "Address"], [],
                ),
            },
        },
    },
    {
        "base": "guestbook",
        "addr_prefix": "d4",
        "uses": [
            "use sui::object::{Self, UID};",
            "use sui::tx_context::{Self, TxContext};",
            "use sui::clock::{Self, Clock};",
            "use sui::event;",
            "use sui::transfer;",
        ],
        "structs_text": [
            "struct Guestbook has key {\n"
            "        id: UID,\n"
            "        visits: u64,\n"
            "        last_ms: u64,\n"
            "    }",
            "struct VisitEvent has copy, drop {\n"
            "        visitor: address,\n"
            "        at_ms: u64,\n"
            "    }",
        ],
        "consts": [],
        "functions": [
            (
                "entry fun create(arg0: &mut TxContext)",
                "{\n"
                "        let v0 = Guestbook{\n"
                "            id      : object::new(arg0),\n"
                "            visits  : 0,\n"
                "            last_ms : 0,\n"
                "        };\n"
                "        transfer::share_object<Guestbook>(v0);\n"
                "    }",
            ),
            (
                "entry fun record_visit(arg0: &mut Guestbook, arg1: &Clock, arg2: &TxContext)",
                "{\n"
                "        let v0 = clock::timestamp_ms(arg1);\n"
                "        let v1 = tx_context::sender(arg2);\n"
                "        arg0.visits = arg0.visits + 1;\n"
                "        arg0.last_ms = v0;\n"
                "        let v2 = VisitEvent{\n"
                "            visitor : v1,\n"
                "            at_ms   : v0,\n"
                "        };\n"
                "        event::emit<VisitEvent>(v2);\n"
                "    }",
            ),
            (
                "public fun visits(arg0: &Guestbook): u64",
                "{\n"
                "        arg0.visits\n"
                "    }",
            ),
        ],
        "normalized": {
            "structs": {
                "Guestbook": {
                    "abilities": ["Key"],
                    "typeParameters": [],
                    "fields": [
                        {"name": "id", "type": UID},
                        {"name": "visits", "type": "U64"},
                        {"name": "last_ms", "type": "U64"},
                    ],
                },
                "VisitEvent": {
                    "abilities": ["Copy", "Drop"],
                    "typeParameters": [],
                    "fields": [
                        {"name": "visitor", "type": "Address"},
                        {"name": "at_ms", "type": "U64"},
                    ],
                },
            },
            "exposedFunctions": {
                "create": fn_doc("Private", True, [mref_t(TX)], []),
                "record_visit": fn_doc(
                    "Private", True,
                    [mref_t(struct_t("SELF", "MOD", "Guestbook")), ref_t(CLOCK), ref_t(TX)],
                    [],
                ),
                "visits": fn_doc(
                    "Public", False, [ref_t(struct_t("SELF", "MOD", "Guestbook"))], ["U64"],
                ),
            },
        },
    },
    {
        "base": "wrapper",
        "addr_prefix": "e5",
        "uses": [
            "use sui::object::{Self, UID};",
            "use sui::tx_context::TxContext;",
        ],
        "structs_text": [
            "struct Wrapper<T0: store> has key {\n"
            "        id: UID,\n"
            "        contents: T0,\n"
            "    }"
        ],
        "consts": [],
        "functions": [
            (
                "public fun wrap<T0: store>(arg0: T0, arg1: &mut TxContext): Wrapper<T0>",
                "{\n"
                "        Wrapper<T0>{\n"
                "            id       : object::new(arg1),\n"
                "            contents : arg0,\n"
                "        }\n"
                "    }",
            ),
            (
                "public fun unwrap<T0: store>(arg0: Wrapper<T0>): T0",
                "{\n"
                "        let Wrapper<T0>{\n"
                "            id       : v0,\n"
                "            contents : v1,\n"
                "        } = arg0;\n"
                "        object::delete(v0);\n"
                "        v1\n"
                "    }",
            ),
            (
                "public fun peek<T0: store>(arg0: &Wrapper<T0>): &T0",
                "{\n"
                "        &arg0.contents\n"
                "    }",
            ),
        ],
        "normalized": {
            "structs": {
                "Wrapper": {
                    "abilities": ["Key"],
                    "typeParameters": [
                        {"constraints": {"abilities": ["Store"]}, "isPhantom": False}
                    ],
                    "fields": [
                        {"name": "id", "type": UID},
                        {"name": "contents", "type": {"TypeParameter": 0}},
                    ],
                }
            },
            "exposedFunctions": {
                "wrap": fn_doc(
                    "Public", False,
                    [{"TypeParameter": 0}, mref_t(TX)],
                    [struct_t("SELF", "MOD", "Wrapper", {"TypeParameter": 0})],
                    tparams=[["Store"]],
                ),
                "unwrap": fn_doc(
                    "Public", False,
                    [struct_t("SELF", "MOD", "Wrapper", {"TypeParameter": 0})],
                    [{"TypeParameter": 0}],
                    tparams=[["Store"]],
                ),
                "peek": fn_doc(
                    "Public", False,
                    [ref_t(struct_t("SELF", "MOD", "Wrapper", {"TypeParameter": 0}))],
                    [ref_t({"TypeParameter": 0})],
                    tparams=[["Store"]],
                ),
            },
        },
    },
    {
        "base": "exchange",
        "addr_prefix": "f6",
        "uses": [
            "use sui::object::{Self, UID};",
            "use sui::tx_context::{Self, TxContext};",
            "use sui::transfer;",
        ],
        "structs_text": [
            "struct AdminCap has key, store {\n"
            "        id: UID,\n"
            "    }",
            "struct Exchange has key {\n"
            "        id: UID,\n"
            "        fee_bps: u64,\n"
            "        paused: bool,\n"
            "    }",
        ],
        "consts": ["const E_FEE_TOO_HIGH: u64 = 5;"],
        "functions": [
            (
                "entry fun bootstrap(arg0: &mut TxContext)",
                "{\n"
                "        let v0 = AdminCap{\n"
                "            id : object::new(arg0),\n"
                "        };\n"
                "        let v1 = Exchange{\n"
                "            id      : object::new(arg0),\n"
                "            fee_bps : 30,\n"
                "            paused  : false,\n"
                "        };\n"
                "        transfer::transfer<AdminCap>(v0, tx_context::sender(arg0));\n"
                "        transfer::share_object<Exchange>(v1);\n"
                "    }",
            ),
            (
                "entry fun pause(arg0: &AdminCap, arg1: &mut Exchange)",
                "{\n"
                "        let _ = arg0;\n"
                "        arg1.paused = true;\n"
                "    }",
            ),
            (
                "entry fun set_fee(arg0: &AdminCap, arg1: &mut Exchange, arg2: u64)",
                "{\n"
                "        let _ = arg0;\n"
                "        if (arg2 > 1000) {\n"
                "            abort 5\n"
                "        };\n"
                "        arg1.fee_bps = arg2;\n"
                "    }",
            ),
            (
                "public(friend) fun fee_quote(arg0: &Exchange, arg1: u64): u64",
                "{\n"
                "        arg1 * arg0.fee_bps / 10000\n"
                "    }",
            ),
            (
                "public fun is_paused(arg0: &Exchange): bool",
                "{\n"
                "        arg0.paused\n"
                "    }",
            ),
        ],
        "normalized": {
            "structs": {
                "AdminCap": {
                    "abilities": ["Key", "Store"],
                    "typeParameters": [],
                    "fields": [{"name": "id", "type": UID}],
                },
                "Exchange": {
                    "abilities": ["Key"],
                    "typeParameters": [],
                    "fields": [
                        {"name": "id", "type": UID},
                        {"name": "fee_bps", "type": "U64"},
                        {"name": "paused", "type": "Bool"},
                    ],
                },
            },
            "exposedFunctions": {
                "bootstrap": fn_doc("Private", True, [mref_t(TX)], []),
                "pause": fn_doc(
                    "Private", True,
                    [ref_t(struct_t("SELF", "MOD", "AdminCap")),
                     mref_t(struct_t("SELF", "MOD", "Exchange"))], [],
                ),
                "set_fee": fn_doc(
                    "Private", True,
                    [ref_t(struct_t("SELF", "MOD", "AdminCap")),
                     mref_t(struct_t("SELF", "MOD", "Exchange")), "U64"], [],
                ),
                "fee_quote": fn_doc(
                    "Friend", False,
                    [ref_t(struct_t("SELF", "MOD", "Exchange")), "U64"], ["U64"],
                ),
                "is_paused": fn_doc(
                    "Public", False,
                    [ref_t(struct_t("SELF", "MOD", "Exchange"))], ["Bool"],
                ),
            },
        },
    },
]

INSTANCES = 5

OUTCOME_VECTORS = {  # arm -> number of failing entries (out of 30)
    "full": 8,
    "no-domain": 16,
    "no-instructions": 9,
    "no-fewshot": 9,
}

FAIL_CLASSES = ["MoveRuleViolation", "TypeError", "UnresolvedName", "Other", "ParseError"]


def render_low_level(template: dict, addr: str, name: str) -> str:
    lines = [f"module {addr}::{name} {{"]
    for use in template["uses"]:
        lines.append(f"    {use}")
    for block in template["structs_text"]:
        lines.append("")
        lines.append(f"    {block}")
    for const in template["consts"]:
        lines.append(f"    {const}")
    for sig, body in template["functions"]:
        lines.append("")
        lines.append(f"    {sig} {body}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _qualify_sig(sig: str, template: dict, addr: str, name: str) -> str:
    """Fully qualify bare struct names as the disassembler does."""
    out = sig
    local_structs = []
    for block in template["structs_text"]:
        local_structs.append(block.split()[1].split("<")[0])
    for sname in local_structs:
        out = out.replace(f" {sname}", f" {addr}::{name}::{sname}")
        out = out.replace(f"&{sname}", f"&{addr}::{name}::{sname}")
        out = out.replace(f"mut {sname}", f"mut {addr}::{name}::{sname}")
        out = out.replace(f": {sname}", f": {addr}::{name}::{sname}")
        out = out.replace(f"){sname}", f"){addr}::{name}::{sname}")
    replacements = {
        "TxContext": "0x2::tx_context::TxContext",
        "Clock": "0x2::clock::Clock",
        "Coin<SUI>": "0x2::coin::Coin<0x2::sui::SUI>",
        "Balance<SUI>": "0x2::balance::Balance<0x2::sui::SUI>",
        "UID": "0x2::object::UID",
    }
    for short, full in replacements.items():
        out = out.replace(short, full)
    return out


def render_disassembly(template: dict, addr: str, name: str) -> str:
    """Disassembler-style view: no imports, fully qualified types, opcode
    listings in place of statement bodies."""
    lines = ["// Move bytecode v6", f"module {addr}::{name} {{"]
    for block in template["structs_text"]:
        first, *rest = block.splitlines()
        qualified = "\n".join(
            [first] + [_qualify_sig(ln, template, addr, name) for ln in rest]
        )
        lines.append("")
        lines.append(f"    {qualified}")
    for const in template["consts"]:
        lines.append(f"    {const}")
    for index, (sig, _) in enumerate(template["functions"]):
        qualified = _qualify_sig(sig, template, addr, name)
        lines.append("")
        lines.append(f"    {qualified} {{")
        lines.append(f"    B0:")
        lines.append(f"        0: LdU64({index})")
        lines.append(f"        1: Pop")
        lines.append(f"        2: Ret")
        lines.append("    }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def normalized_doc(template: dict, addr: str, name: str) -> dict:
    def fix(node):
        if isinstance(node, dict):
            out = {}
            for key, value in node.items():
                out[key] = fix(value)
            if "address" in out and out.get("address") == "SELF":
                out["address"] = addr
                out["module"] = name
            return out
        if isinstance(node, list):
            return [fix(v) for v in node]
        return node

    doc = {
        "fileFormatVersion": 6,
        "address": addr,
        "name": name,
        "friends": [],
        "structs": fix(template["normalized"]["structs"]),
        "exposedFunctions": fix(template["normalized"]["exposedFunctions"]),
    }
    return doc


def write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, "utf-8")


def gen_corpus():
    corpus = FIXTURES / "corpus"
    entries = []
    for template in TEMPLATES:
        for i in range(INSTANCES):
            name = f"{template['base']}_{i}"
            addr = f"0x{template['addr_prefix']}{i}"
            mod_dir = corpus / name
            write(mod_dir / "low_level.move", render_low_level(template, addr, name))
            write(mod_dir / "disassembly.move", render_disassembly(template, addr, name))
            entry = {
                "id": name,
                "category": template["base"],
                "inputs": {
                    "disassembly": f"{name}/disassembly.move",
                    "low_level": f"{name}/low_level.move",
                },
            }
            entries.append(entry)
    entries.sort(key=lambda e: e["id"])
    write(
        corpus / "manifest.json",
        json.dumps({"entries": entries}, indent=2) + "\n",
    )

    ids = [e["id"] for e in entries]
    for arm, fail_count in OUTCOME_VECTORS.items():
        outcomes = {}
        failing = set(ids[-fail_count:])  # deterministic: last K by sorted id
        for pos, entry_id in enumerate(ids):
            if entry_id in failing:
                outcomes[entry_id] = {
                    "status": "fail",
                    "error_class": FAIL_CLASSES[pos % len(FAIL_CLASSES)],
                }
            else:
                outcomes[entry_id] = {"status": "pass"}
        write(corpus / f"outcomes_{arm}.json", json.dumps(outcomes, indent=2) + "\n")


def gen_dual_and_normalized():
    dual = FIXTURES / "dual"
    normalized_dir = FIXTURES / "normalized"
    for template in TEMPLATES:
        name = f"{template['base']}_0"
        addr = f"0x{template['addr_prefix']}0"
        write(dual / f"{name}.move", render_disassembly(template, addr, name))
        write(
            dual / f"{name}.json",
            json.dumps(normalized_doc(template, addr, name), indent=2) + "\n",
        )
    for base in ("counter", "registry", "wrapper"):
        template = next(t for t in TEMPLATES if t["base"] == base)
        name = f"{base}_0"
        addr = f"0x{template['addr_prefix']}0"
        write(
            normalized_dir / f"{name}.json",
            json.dumps(normalized_doc(template, addr, name), indent=2) + "\n",
        )


MUTATION_BASE = """module 0x5e5::escrow {
    use sui::object::{Self, UID};
    use sui::tx_context::{Self, TxContext};
    use sui::balance::{Self, Balance};
    use sui::coin::{Self, Coin};
    use sui::sui::SUI;
    use sui::transfer;

    const E_NOT_SELLER: u64 = 1;
    const E_BAD_AMOUNT: u64 = 2;

    struct Escrow has key {
        id: UID,
        seller: address,
        amount: u64,
        funds: Balance<SUI>,
    }

    fun assert_seller(arg0: &Escrow, arg1: &TxContext) {
        if (arg0.seller != tx_context::sender(arg1)) {
            abort 1
        };
    }

    fun checked_amount(arg0: &Escrow, arg1: u64): u64 {
        let v0 = balance::value<SUI>(&arg0.funds);
        if (arg1 > v0) {
            abort 2
        };
        arg1
    }

    entry fun open(arg0: u64, arg1: &mut TxContext) {
        let v0 = Escrow{
            id     : object::new(arg1),
            seller : tx_context::sender(arg1),
            amount : arg0,
            funds  : balance::zero<SUI>(),
        };
        transfer::share_object<Escrow>(v0);
    }

    public fun deposit(arg0: &mut Escrow, arg1: Coin<SUI>) {
        let v0 = coin::into_balance<SUI>(arg1);
        balance::join<SUI>(&mut arg0.funds, v0);
    }

    entry fun release(arg0: &mut Escrow, arg1: u64, arg2: &mut TxContext) {
        assert_seller(arg0, arg2);
        let v0 = checked_amount(arg0, arg1);
        let v1 = coin::take<SUI>(&mut arg0.funds, v0, arg2);
        transfer::public_transfer<Coin<SUI>>(v1, arg0.seller);
    }

    public fun amount(arg0: &Escrow): u64 {
        arg0.amount
    }
}
"""

MUTANTS = [
    # (file stem, class, old, new)
    (
        "m01_rename_internal_helper", "rename-function",
        [("fun checked_amount(", "fun checked_amt("),
         ("checked_amount(arg0, arg1)", "checked_amt(arg0, arg1)")],
    ),
    (
        "m02_rename_public_fn", "rename-function",
        [("public fun amount(", "public fun amount_of(")],
    ),
    (
        "m03_add_param", "change-arity",
        [("public fun deposit(arg0: &mut Escrow, arg1: Coin<SUI>)",
          "public fun deposit(arg0: &mut Escrow, arg1: Coin<SUI>, arg2: u64)")],
    ),
    (
        "m04_drop_param", "change-arity",
        [("fun assert_seller(arg0: &Escrow, arg1: &TxContext) {\n"
          "        if (arg0.seller != tx_context::sender(arg1)) {\n"
          "            abort 1\n"
          "        };\n"
          "    }",
          "fun assert_seller(arg0: &Escrow) {\n"
          "        if (arg0.seller == @0x0) {\n"
          "            abort 1\n"
          "        };\n"
          "    }"),
         ("assert_seller(arg0, arg2);", "assert_seller(arg0);")],
    ),
    (
        "m05_narrow_param_type", "change-param-type",
        [("entry fun release(arg0: &mut Escrow, arg1: u64, arg2: &mut TxContext)",
          "entry fun release(arg0: &mut Escrow, arg1: u32, arg2: &mut TxContext)")],
    ),
    (
        "m06_mut_ref_param", "change-param-type",
        [("public fun amount(arg0: &Escrow): u64",
          "public fun amount(arg0: &mut Escrow): u64")],
    ),
    (
        "m07_add_public_helper", "add-phantom-function",
        [("}\n", "\n    public fun helper_rate(arg0: u64): u64 {\n        arg0 * 2\n    }\n}\n", "last")],
    ),
    (
        "m08_add_private_helper", "add-phantom-function",
        [("}\n", "\n    fun debug_noop() {\n        let v0 = 0;\n        let _ = v0;\n    }\n}\n", "last")],
    ),
    (
        "m09_drop_public_fn", "drop-function",
        [("    public fun amount(arg0: &Escrow): u64 {\n        arg0.amount\n    }\n", "")],
    ),
    (
        "m10_drop_helper_inline", "drop-function",
        [("    fun assert_seller(arg0: &Escrow, arg1: &TxContext) {\n"
          "        if (arg0.seller != tx_context::sender(arg1)) {\n"
          "            abort 1\n"
          "        };\n"
          "    }\n", ""),
         ("assert_seller(arg0, arg2);",
          "assert!(arg0.seller == tx_context::sender(arg2), 1);")],
    ),
    (
        "m11_builtin_substitution", "replace-internal-call",
        [("let v0 = checked_amount(arg0, arg1);",
          "let v0 = balance::value<SUI>(&arg0.funds);")],
    ),
    (
        "m12_unknown_module_call", "replace-internal-call",
        [("assert_seller(arg0, arg2);", "access_control::check(arg0, arg2);")],
    ),
]


def gen_mutations():
    mut_dir = FIXTURES / "mutations"
    write(mut_dir / "base.move", MUTATION_BASE)
    manifest = {"base": "base.move", "mutants": []}
    for stem, mclass, edits in MUTANTS:
        text = MUTATION_BASE
        for edit in edits:
            if len(edit) == 3 and edit[2] == "last":
                old, new, _ = edit
                index = text.rindex(old)
                text = text[:index] + new + text[index + len(old):]
            else:
                old, new = edit[0], edit[1]
                assert old in text, f"{stem}: pattern not found: {old!r}"
                text = text.replace(old, new)
        write(mut_dir / f"{stem}.move", text)
        manifest["mutants"].append({"file": f"{stem}.move", "class": mclass})
    write(mut_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")


def main():
    gen_corpus()
    gen_dual_and_normalized()
    gen_mutations()
    print(f"fixtures regenerated under {FIXTURES}")


if __name__ == "__main__":
    sys.exit(main())
