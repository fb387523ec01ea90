"""Datum documents and report serialization.

A datum document is a small JSON object naming a group, the central
involution and the coset factors.  Serialization keeps every value
exact: integers beyond 2^53 and all rational parts are emitted as
strings so consumers never round-trip through floats.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional

from .alpha_engine import AlphaReport
from .cm_core import CMDatum, CMType, CosetSpace, FiniteGroup, validate
from .finite_level import SweepRow
from .mt_torus import CharacterSystem

SAFE_INT = 2 ** 53

CSV_HEADER = "ell,n,subgroup_order,degree,dim_W,n_W,estimate_decimal,bound_ok"


class DatumParseError(ValueError):
    """Invalid datum document; `path` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _expect(condition: bool, path: str, message: str):
    if not condition:
        raise DatumParseError(path, message)


def _parse_group(node: Any, path: str) -> FiniteGroup:
    _expect(isinstance(node, dict), path, "must be an object")
    kind = node.get("kind")
    _expect(kind in ("abelian", "table"), f"{path}.kind",
            "must be 'abelian' or 'table'")
    if kind == "abelian":
        inv = node.get("invariants")
        _expect(isinstance(inv, list) and inv, f"{path}.invariants",
                "must be a nonempty list")
        for i, x in enumerate(inv):
            _expect(isinstance(x, int) and x >= 2, f"{path}.invariants[{i}]",
                    "must be an integer >= 2")
        return FiniteGroup.abelian(inv)
    table = node.get("table")
    _expect(isinstance(table, list) and table, f"{path}.table",
            "must be a nonempty list of rows")
    for i, row in enumerate(table):
        _expect(isinstance(row, list) and all(isinstance(x, int) for x in row),
                f"{path}.table[{i}]", "must be a list of integers")
    try:
        return FiniteGroup.from_table(table, name=node.get("name", "custom"))
    except ValueError as e:
        raise DatumParseError(f"{path}.table", str(e))


def _parse_element(node: Any, group: FiniteGroup, path: str) -> int:
    if isinstance(node, int):
        _expect(0 <= node < group.order, path,
                f"element index out of range 0..{group.order - 1}")
        return node
    if isinstance(node, list):
        _expect(all(isinstance(x, int) for x in node), path,
                "coordinates must be integers")
        try:
            return group.index_of_tuple(tuple(node))
        except (KeyError, ValueError):
            raise DatumParseError(path, "not a valid coordinate list")
    raise DatumParseError(path, "must be an element index or coordinate list")


def parse_datum(doc: Any) -> CMDatum:
    """Build a datum from a parsed JSON document, checking every field."""
    _expect(isinstance(doc, dict), "$", "document must be an object")
    group = _parse_group(doc.get("group"), "$.group")
    _expect("conj" in doc, "$.conj", "missing")
    conj = _parse_element(doc["conj"], group, "$.conj")
    factors_node = doc.get("factors")
    _expect(isinstance(factors_node, list) and factors_node, "$.factors",
            "must be a nonempty list")
    factors = []
    for i, fnode in enumerate(factors_node):
        fpath = f"$.factors[{i}]"
        _expect(isinstance(fnode, dict), fpath, "must be an object")
        sub_node = fnode.get("subgroup", [0])
        _expect(isinstance(sub_node, list) and sub_node, f"{fpath}.subgroup",
                "must be a nonempty list of elements")
        subgroup = [_parse_element(x, group, f"{fpath}.subgroup[{j}]")
                    for j, x in enumerate(sub_node)]
        try:
            space = CosetSpace(group, subgroup)
        except ValueError as e:
            raise DatumParseError(f"{fpath}.subgroup", str(e))
        phi_node = fnode.get("phi")
        _expect(isinstance(phi_node, list) and phi_node, f"{fpath}.phi",
                "must be a nonempty list of coset indices")
        phi = []
        for j, x in enumerate(phi_node):
            _expect(isinstance(x, int) and 0 <= x < space.size,
                    f"{fpath}.phi[{j}]",
                    f"coset index out of range 0..{space.size - 1}")
            phi.append(x)
        _expect(len(set(phi)) == len(phi), f"{fpath}.phi",
                "coset indices must be distinct")
        factors.append(CMType(space, frozenset(phi)))
    datum = CMDatum(group, conj, tuple(factors))
    problems = validate(datum)
    if problems:
        raise DatumParseError("$", "; ".join(problems))
    return datum


def load_datum(text: str) -> CMDatum:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DatumParseError("$", f"not valid JSON: {e}")
    return parse_datum(doc)


def datum_to_dict(datum: CMDatum) -> dict:
    group = datum.group
    if group.abelian_invariants is not None:
        gnode: dict = {"kind": "abelian",
                       "invariants": list(group.abelian_invariants)}
    else:
        gnode = {"kind": "table", "name": group.name,
                 "table": [list(row) for row in group.table]}
    return {
        "group": gnode,
        "conj": datum.conj,
        "factors": [
            {"subgroup": list(f.space.subgroup), "phi": list(f.phi_sorted())}
            for f in datum.factors
        ],
    }


def encode_int(v: int):
    """Integers stay native inside the float-safe range, else strings."""
    return v if abs(v) < SAFE_INT else str(v)


def encode_fraction(v: Fraction) -> dict:
    return {"num": str(v.numerator), "den": str(v.denominator)}


def report_to_dict(report: AlphaReport, cs: CharacterSystem) -> dict:
    witness = report.witness
    basis = witness.subspace.basis
    basis_rows = [[encode_fraction(x) for x in basis.row(i)]
                  for i in range(basis.rows)]
    return {
        "datum": datum_to_dict(cs.datum),
        "genus": report.genus,
        "dim": report.dim,
        "defect": report.defect,
        "alpha": encode_fraction(report.alpha),
        "gamma": encode_fraction(report.gamma),
        "shortcut_used": report.shortcut_used,
        "witness": {
            "dim": witness.dim,
            "n": witness.n,
            "ratio": encode_fraction(witness.ratio),
            "character_indices": list(witness.generating_indices),
            "basis": basis_rows,
        },
        "bound_checks": dict(report.bound_checks),
        "saturation_index": cs.saturation_index,
        "spans_visited": report.spans_visited,
    }


def dumps_document(doc: dict) -> str:
    """Canonical text form: two-space indent, LF, trailing newline."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def sweep_rows_to_csv(rows: list[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            str(r.ell), str(r.n), str(r.subgroup_order), str(r.degree),
            str(r.dim_w), str(r.n_w), f"{r.estimate_decimal:.6f}",
            "true" if r.bound_ok else "false",
        ]))
    return "\n".join(lines) + "\n"


def sweep_rows_to_json(rows: list[SweepRow]) -> dict:
    return {
        "rows": [
            {
                "ell": r.ell,
                "n": r.n,
                "subgroup_order": encode_int(r.subgroup_order),
                "degree": encode_int(r.degree),
                "dim_W": r.dim_w,
                "n_W": r.n_w,
                "estimate_decimal": round(r.estimate_decimal, 6),
                "bound_ok": r.bound_ok,
            }
            for r in rows
        ]
    }
