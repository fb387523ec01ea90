"""Sweep the built-in group catalogue and check every known invariant.

One representative per translation class gets the full treatment
(exact search, shortcut agreement, bound checks, oracle comparison);
the remaining translates only need their orbit matrices to be row
permutations of the representative's, which transports every checked
statement to them.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .alpha_engine import alpha_oracle, build_report
from .cm_core import (
    CMDatum,
    CMType,
    CosetSpace,
    FiniteGroup,
    enumerate_types,
    is_primitive,
)
from .exact_linalg import IntMatrix, integer_kernel
from .mt_torus import (
    DuplicateCharactersError,
    build_character_system,
    character_span_saturation,
    classify,
    perp_lattice,
)

ORACLE_CAP = 12


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _invariant_chains(order: int, minimum: int = 2) -> Iterator[tuple[int, ...]]:
    # ascending divisor chains d1 | d2 | ... with product = order
    if order == 1:
        yield ()
        return
    d = minimum
    while d * d <= order:
        if order % d == 0:
            for rest in _invariant_chains(order // d, d):
                if not rest or rest[0] % d == 0:
                    yield (d,) + rest
        d += 1
    if order >= minimum:
        yield (order,)


def builtin_groups(max_order: int) -> list[FiniteGroup]:
    """Abelian, dihedral and dicyclic groups up to the given order.

    Together these exhaust the groups of order at most 15 that contain
    a central involution.
    """
    if max_order < 2:
        raise ValueError("max_order must be at least 2")
    groups: list[FiniteGroup] = []
    for order in range(2, max_order + 1):
        for chain in sorted(_invariant_chains(order)):
            if chain:
                groups.append(FiniteGroup.abelian(chain))
    for n in range(3, max_order // 2 + 1):
        groups.append(FiniteGroup.dihedral(n))
    for m in range(2, max_order // 4 + 1):
        groups.append(FiniteGroup.dicyclic(m))
    return groups


@dataclass
class VerifySummary:
    max_group_order: int
    groups_seen: int = 0
    class_reps_checked: int = 0
    translates_checked: int = 0
    duplicates_skipped: int = 0
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def count(self, name: str, ok: bool, context: str):
        self.checks[name] = self.checks.get(name, 0) + 1
        if not ok:
            self.failures.append(f"{name}: {context}")

    def merge(self, other: "VerifySummary"):
        self.class_reps_checked += other.class_reps_checked
        self.translates_checked += other.translates_checked
        self.duplicates_skipped += other.duplicates_skipped
        for k, v in other.checks.items():
            self.checks[k] = self.checks.get(k, 0) + v
        self.failures.extend(other.failures)


def _translation_orbit(group: FiniteGroup, t: CMType) -> list[frozenset]:
    seen = []
    for g in range(group.order):
        moved = frozenset(group.mul(g, x) for x in t.phi)
        if moved not in seen:
            seen.append(moved)
    return seen


def _row_multiset(m: IntMatrix) -> tuple:
    return tuple(sorted(m.row(i) for i in range(m.rows)))


def _check_class(group: FiniteGroup, conj: int, rep: CMType) -> VerifySummary:
    local = VerifySummary(max_group_order=group.order)
    label = f"{group.name} conj {conj} phi {sorted(rep.phi)}"
    space = rep.space
    try:
        rep_cs = build_character_system(CMDatum(group, conj, (rep,)))
    except DuplicateCharactersError:
        # every translate must then repeat a character as well
        for phi in _translation_orbit(group, rep):
            try:
                build_character_system(
                    CMDatum(group, conj, (CMType(space, phi),)))
                local.count("duplicate_consistency", False,
                            f"{label} translate {sorted(phi)} built")
            except DuplicateCharactersError:
                local.duplicates_skipped += 1
        return local

    local.class_reps_checked += 1
    report = build_report(rep_cs)
    for name, ok in report.bound_checks.items():
        local.count(name, ok, label)
    g = rep_cs.genus
    if g >= 2:
        local.count("strict_genus_bound", report.alpha < g, label)
    cls = classify(rep_cs)
    if cls.nondegenerate or cls.defect_one:
        local.count("shortcut_available", report.shortcut_used is not None, label)
    if _is_prime(g) and is_primitive(rep, conj):
        local.count("prime_genus_nondegenerate", cls.defect == 0, label)
    if 2 * g <= ORACLE_CAP:
        local.count("oracle_agreement",
                    alpha_oracle(rep_cs, cap=ORACLE_CAP) == report.alpha, label)
    # lattice duality on a fixed deterministic selection
    sel = list(range(g + 1))
    perp = perp_lattice(rep_cs, sel)
    if perp.rows:
        double = integer_kernel(perp)
        expected = character_span_saturation(rep_cs, sel)
        local.count("perp_double_dual",
                    _row_multiset(double) == _row_multiset(expected), label)
    else:
        # full-rank selection: the perp is zero and the double dual is
        # the whole lattice
        expected = character_span_saturation(rep_cs, sel)
        local.count("perp_double_dual", expected.rows == rep_cs.dim, label)

    rep_rows = _row_multiset(rep_cs.orbit_matrix)
    for phi in _translation_orbit(group, rep):
        if phi == rep.phi:
            continue
        try:
            other = build_character_system(
                CMDatum(group, conj, (CMType(space, phi),)))
        except DuplicateCharactersError:
            local.count("translation_row_permutation", False,
                        f"{label} translate {sorted(phi)} degenerated")
            continue
        local.translates_checked += 1
        local.count("translation_row_permutation",
                    _row_multiset(other.orbit_matrix) == rep_rows,
                    f"{label} translate {sorted(phi)}")
    return local


def run_verify(max_group_order: int = 12, threads: int = 1) -> VerifySummary:
    """Check every invariant across all built-in data up to the order."""
    summary = VerifySummary(max_group_order=max_group_order)
    jobs = []
    for group in builtin_groups(max_group_order):
        convs = group.central_involutions()
        if convs:
            summary.groups_seen += 1
        for conj in convs:
            for rep in enumerate_types(group, conj, up_to_translation=True):
                jobs.append((group, conj, rep))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda j: _check_class(*j), jobs))
    else:
        results = [_check_class(*j) for j in jobs]
    for r in results:
        summary.merge(r)
    return summary
