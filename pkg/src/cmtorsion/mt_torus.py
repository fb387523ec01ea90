"""Character system of the torus attached to a CM datum.

The orbit matrix pairs every character of the ambient torus against the
group orbit of the distinguished cocharacter: row g, column (factor,
coset s) holds 1 exactly when s lies in g translated across the
factor's chosen half.  Everything downstream (rank, defect, optimal
exponent, finite-level degrees) is computed from this integer matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from .cm_core import CMDatum, validate
from .exact_linalg import (
    IntMatrix,
    hermite_normal_form,
    integer_kernel,
    rank,
    saturate,
    solve_left,
)

log = logging.getLogger(__name__)


class DuplicateCharactersError(Exception):
    """Two character columns coincide: the datum has a repeated factor.

    The analysis in this package assumes pairwise distinct characters;
    data violating that are reported, not silently accepted.
    """

    def __init__(self, i: int, j: int):
        super().__init__(
            f"characters {i} and {j} coincide; the datum has a repeated isogeny factor")
        self.indices = (i, j)


@dataclass(frozen=True)
class CharacterSystem:
    """Orbit matrix plus the derived lattice data of a CM datum."""

    datum: CMDatum
    genus: int
    orbit_matrix: IntMatrix
    dim: int
    characters: tuple[tuple[int, ...], ...]
    conj_pairing: tuple[int, ...]
    weight: tuple[int, ...]
    column_labels: tuple[tuple[int, int], ...]
    cochar_basis: IntMatrix
    char_lattice: IntMatrix
    char_coords: tuple[tuple[int, ...], ...]
    saturation_index: int


@dataclass(frozen=True)
class Classification:
    genus: int
    dim: int
    defect: int
    nondegenerate: bool
    defect_one: bool


def build_character_system(datum: CMDatum) -> CharacterSystem:
    """Build and sanity-check the full character system of a datum.

    Raises ValueError for invalid data and DuplicateCharactersError
    when two columns coincide.
    """
    problems = validate(datum)
    if problems:
        raise ValueError("invalid datum: " + "; ".join(problems))
    group = datum.group
    n = group.order
    labels = []
    for fi, factor in enumerate(datum.factors):
        # phi and its conjugate partition the cosets, so the columns of
        # a factor are indexed by the whole coset space
        for s in range(factor.space.size):
            labels.append((fi, s))
    two_g = len(labels)
    genus = two_g // 2
    rows = []
    for g in range(n):
        ginv = group.inv(g)
        row = []
        for fi, s in labels:
            factor = datum.factors[fi]
            row.append(1 if factor.space.act(ginv, s) in factor.phi else 0)
        rows.append(row)
    matrix = IntMatrix.from_rows(rows, cols=two_g)

    columns = tuple(matrix.column(j) for j in range(two_g))
    for i in range(two_g):
        for j in range(i + 1, two_g):
            if columns[i] == columns[j]:
                raise DuplicateCharactersError(i, j)

    pos = {lab: k for k, lab in enumerate(labels)}
    pairing = tuple(
        pos[(fi, datum.factors[fi].space.act(datum.conj, s))] for fi, s in labels)
    weight = (1,) * n
    for k, pk in enumerate(pairing):
        assert pairing[pk] == k
        paired = tuple(a + b for a, b in zip(columns[k], columns[pk]))
        assert paired == weight, "conjugate characters must sum to the weight"

    if all(len(f.space.subgroup) == 1 for f in datum.factors):
        half = n // 2
        for j, col in enumerate(columns):
            assert sum(col) == half, f"column {j} does not pair half the orbit"
    else:
        log.debug("column sum check skipped over proper coset factors")

    d = rank(matrix)
    assert 2 <= d <= genus + 1, "torus rank out of the admissible range"

    cochar_basis, sat_rows = saturate(matrix)
    col_matrix = IntMatrix.from_rows(columns, cols=n)
    char_lattice, sat_cols = saturate(col_matrix)
    assert sat_rows == sat_cols, "row and column saturation indices must agree"
    coords = []
    for col in columns:
        sol = solve_left(char_lattice, col)
        assert sol is not None and all(c.denominator == 1 for c in sol)
        coords.append(tuple(int(c) for c in sol))

    return CharacterSystem(
        datum=datum,
        genus=genus,
        orbit_matrix=matrix,
        dim=d,
        characters=columns,
        conj_pairing=pairing,
        weight=weight,
        column_labels=tuple(labels),
        cochar_basis=cochar_basis,
        char_lattice=char_lattice,
        char_coords=tuple(coords),
        saturation_index=sat_rows,
    )


def classify(cs: CharacterSystem) -> Classification:
    """Defect of the system: codimension under the largest possible rank."""
    defect = cs.genus + 1 - cs.dim
    return Classification(
        genus=cs.genus,
        dim=cs.dim,
        defect=defect,
        nondegenerate=(defect == 0),
        defect_one=(defect == 1),
    )


def check_mod2_distinct(cs: CharacterSystem) -> tuple[bool, Optional[tuple[int, int]]]:
    """Characters must stay pairwise distinct after reduction mod 2."""
    seen: dict[tuple[int, ...], int] = {}
    for k, col in enumerate(cs.characters):
        key = tuple(x % 2 for x in col)
        if key in seen:
            return False, (seen[key], k)
        seen[key] = k
    return True, None


def perp_lattice(cs: CharacterSystem, indices: Sequence[int]) -> IntMatrix:
    """Cocharacters annihilating the selected characters.

    Returns a Hermite basis of the saturated kernel inside the rank-dim
    cocharacter lattice; characters are the columns of `cochar_basis`
    in these coordinates.
    """
    idx = sorted(set(indices))
    if not idx:
        raise ValueError("empty character selection")
    if any(not 0 <= i < 2 * cs.genus for i in idx):
        raise ValueError("character index out of range")
    b = cs.cochar_basis
    selected = IntMatrix.from_rows(
        [[b.row(r)[i] for r in range(b.rows)] for i in idx], cols=b.rows)
    return integer_kernel(selected)


def character_span_saturation(cs: CharacterSystem, indices: Sequence[int]) -> IntMatrix:
    """Saturated span of the selected characters in lattice coordinates."""
    idx = sorted(set(indices))
    b = cs.cochar_basis
    rows = [[b.row(r)[i] for r in range(b.rows)] for i in idx]
    sat, _ = saturate(IntMatrix.from_rows(rows, cols=b.rows))
    return hermite_normal_form(sat)
