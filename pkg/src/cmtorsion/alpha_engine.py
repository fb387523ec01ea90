"""Optimal torsion exponent from a character system.

The exponent is the maximum of n(W)/dim W over subspaces W spanned by
characters, where n(W) counts the characters lying in W.  The search
walks the lattice of spans closed under taking every character they
contain; the oracle re-derives the same maximum by sheer enumeration
of subsets.  Everything is exact rational arithmetic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from .cm_core import is_primitive
from .exact_linalg import CanonicalSubspace, IntSpanBasis
from .mt_torus import CharacterSystem, Classification, check_mod2_distinct, classify


@dataclass(frozen=True)
class SubspaceWitness:
    """A character span attaining the reported exponent."""

    subspace: CanonicalSubspace
    generating_indices: tuple[int, ...]
    n: int
    dim: int
    ratio: Fraction


@dataclass(frozen=True)
class AlphaReport:
    alpha: Fraction
    gamma: Fraction
    witness: SubspaceWitness
    genus: int
    dim: int
    defect: int
    shortcut_used: Optional[str] = None
    bound_checks: dict = field(default_factory=dict)
    spans_visited: int = 0


@dataclass(frozen=True)
class _SearchOutcome:
    ratio: Fraction
    contained: tuple[int, ...]
    dim: int
    basis: IntSpanBasis
    counting_bound_ok: bool
    spans_visited: int


def _closure(columns: Sequence[tuple[int, ...]], basis: IntSpanBasis) -> tuple[int, ...]:
    return tuple(i for i, col in enumerate(columns) if basis.contains(col))


def _search(columns: Sequence[tuple[int, ...]]) -> _SearchOutcome:
    """Exact maximum of n(W)/dim W over spans of character subsets.

    States are spans closed under trace (a span is identified with the
    set of all characters inside it), visited in (dimension, index set)
    order so the reported witness is deterministic.  The whole-space
    candidate seeds the incumbent; only strict improvements replace it,
    which keeps the full span as the witness whenever it attains the
    maximum.  Branches whose every extension is provably below the
    incumbent are cut using the subspace counting bound
    n(W) <= 2^(dim W - 1).
    """
    m = len(columns)
    if m == 0:
        raise ValueError("no characters to search")
    width = len(columns[0])

    full = IntSpanBasis(width)
    for col in columns:
        full.insert(col)
    d = full.dim
    all_indices = tuple(range(m))
    incumbent_ratio = Fraction(m, d)
    incumbent = (d, all_indices, full)
    cor_ok = m <= 2 ** (d - 1) if d >= 1 else False

    def future_cap(dim_from: int) -> Fraction:
        best = Fraction(0)
        for mp in range(dim_from, d + 1):
            cap = min(m, 2 ** (mp - 1))
            best = max(best, Fraction(cap, mp))
        return best

    heap: list[tuple[int, tuple[int, ...]]] = []
    states: dict[tuple, tuple[tuple[int, ...], IntSpanBasis]] = {}
    seen_keys = set()
    by_handle: dict[tuple[int, tuple[int, ...]], IntSpanBasis] = {}
    for i in range(m):
        basis = IntSpanBasis(width)
        basis.insert(columns[i])
        key = basis.key()
        if key in seen_keys:
            continue
        seen_keys.add(key)
        contained = _closure(columns, basis)
        handle = (basis.dim, contained)
        if handle not in by_handle:
            by_handle[handle] = basis
            heapq.heappush(heap, handle)

    visited = 0
    while heap:
        dim, contained = heapq.heappop(heap)
        basis = by_handle.pop((dim, contained))
        visited += 1
        n = len(contained)
        if n > 2 ** (dim - 1):
            cor_ok = False
        ratio = Fraction(n, dim)
        if ratio > incumbent_ratio:
            incumbent_ratio = ratio
            incumbent = (dim, contained, basis)
        if dim >= d:
            continue
        if future_cap(dim + 1) <= incumbent_ratio:
            continue
        inside = set(contained)
        for j in range(m):
            if j in inside:
                continue
            child = basis.copy()
            child.insert(columns[j])
            key = child.key()
            if key in seen_keys:
                continue
            seen_keys.add(key)
            child_contained = _closure(columns, child)
            handle = (child.dim, child_contained)
            if handle not in by_handle:
                by_handle[handle] = child
                heapq.heappush(heap, handle)

    dim, contained, basis = incumbent
    return _SearchOutcome(
        ratio=incumbent_ratio,
        contained=contained,
        dim=dim,
        basis=basis,
        counting_bound_ok=cor_ok,
        spans_visited=visited,
    )


def alpha_exact(cs: CharacterSystem) -> AlphaReport:
    """Exponent, witness span and classification data for a system."""
    outcome = _search(cs.characters)
    witness = SubspaceWitness(
        subspace=outcome.basis.to_subspace(),
        generating_indices=outcome.contained,
        n=len(outcome.contained),
        dim=outcome.dim,
        ratio=outcome.ratio,
    )
    cls = classify(cs)
    return AlphaReport(
        alpha=outcome.ratio,
        gamma=outcome.ratio,
        witness=witness,
        genus=cs.genus,
        dim=cs.dim,
        defect=cls.defect,
        shortcut_used=None,
        bound_checks={"subspace_counting_bound": outcome.counting_bound_ok},
        spans_visited=outcome.spans_visited,
    )


def alpha_oracle(cs: CharacterSystem, cap: int = 12) -> Fraction:
    """Plain maximum over every nonempty character subset, no pruning.

    Enumerates the |S| / dim span(S) ratio of all 2^(2g) - 1 subsets;
    the trace of any span occurs among the subsets, so this equals the
    defining maximum of n(W)/dim W.  Refuses systems beyond `cap`
    characters.
    """
    cols = cs.characters
    m = len(cols)
    if m > cap:
        raise ValueError(f"oracle capped at {cap} characters, got {m}")
    width = len(cols[0])
    best = Fraction(0)

    def recurse(start: int, basis: IntSpanBasis, size: int):
        nonlocal best
        for j in range(start, m):
            child = basis.copy()
            child.insert(cols[j])
            ratio = Fraction(size + 1, child.dim)
            if ratio > best:
                best = ratio
            recurse(j + 1, child, size + 1)

    recurse(0, IntSpanBasis(width), 0)
    return best


def shortcut_alpha(classification: Classification, cs: CharacterSystem) -> Optional[Fraction]:
    """Closed-form exponent in the proved special cases, else None.

    Nondegenerate systems give 2g/d; a defect-one primitive single
    factor gives 2; a primitive single factor of genus at most 7 gives
    2g/d.
    """
    two_g = 2 * cs.genus
    if classification.nondegenerate:
        return Fraction(two_g, cs.dim)
    single_primitive = False
    if len(cs.datum.factors) == 1:
        factor = cs.datum.factors[0]
        if len(factor.space.subgroup) == 1:
            single_primitive = is_primitive(factor, cs.datum.conj)
    if classification.defect_one and single_primitive:
        return Fraction(2)
    if single_primitive and cs.genus <= 7:
        return Fraction(two_g, cs.dim)
    return None


def _shortcut_label(classification: Classification) -> str:
    if classification.nondegenerate:
        return "nondegenerate"
    if classification.defect_one:
        return "defect_one"
    return "small_genus"


def check_bounds(report: AlphaReport, cs: CharacterSystem) -> AlphaReport:
    """Evaluate the named exponent bounds exactly; no floating point.

    The irrational threshold 2g/(2 + log2 g) is decided through the
    equivalent integer comparison g^p <= 2^(2gq - 2p) for alpha = p/q.
    """
    g = cs.genus
    alpha = report.alpha
    p, q = alpha.numerator, alpha.denominator
    exponent = 2 * g * q - 2 * p
    checks = dict(report.bound_checks)
    checks["log_threshold_bound"] = exponent >= 0 and g ** p <= 2 ** exponent
    checks["genus_upper_bound"] = alpha <= g
    checks["span_ratio_lower_bound"] = alpha >= Fraction(2 * g, cs.dim)
    ok, _ = check_mod2_distinct(cs)
    checks["mod2_distinct"] = ok
    if len(cs.datum.factors) == 1 and len(cs.datum.factors[0].space.subgroup) == 1:
        if is_primitive(cs.datum.factors[0], cs.datum.conj):
            checks["primitive_dimension_bound"] = 2 ** (cs.dim - 2) >= g
    return replace(report, bound_checks=checks)


def build_report(cs: CharacterSystem) -> AlphaReport:
    """Full pipeline: search, shortcut cross-check, bound evaluation."""
    report = alpha_exact(cs)
    cls = classify(cs)
    shortcut = shortcut_alpha(cls, cs)
    label = None
    if shortcut is not None:
        assert shortcut == report.alpha, (
            "shortcut value disagrees with the exact search")
        label = _shortcut_label(cls)
    report = replace(report, shortcut_used=label)
    return check_bounds(report, cs)


def alpha_power(alpha: Fraction, n: int) -> Fraction:
    """Exponent of the n-th power: scales linearly."""
    if n < 1:
        raise ValueError("power must be a positive integer")
    return n * alpha


@dataclass(frozen=True)
class ProductEnvelope:
    """Exponent bounds for a product with multiplicities.

    `question2` is the conjectural closed-form value; it is reported
    for comparison only and never feeds any verified bound.
    """

    lower: Fraction
    upper: Fraction
    question2: Fraction
    question2_is_conjectural: bool = True


def product_envelope(reports: Sequence[AlphaReport], multiplicities: Sequence[int],
                     joint: CharacterSystem) -> ProductEnvelope:
    """Sandwich the exponent of a product from factor and joint data.

    The lower bound maximizes (min multiplicity in a factor subset)
    times the exact exponent of that subset's joint system; the upper
    bound adds the factor exponents weighted by multiplicity.
    """
    factors = joint.datum.factors
    r = len(factors)
    if not (len(reports) == len(multiplicities) == r):
        raise ValueError("reports, multiplicities and joint factors must align")
    ns = [int(x) for x in multiplicities]
    if any(x < 1 for x in ns):
        raise ValueError("multiplicities must be positive")
    by_factor: list[list[int]] = [[] for _ in range(r)]
    for k, (fi, _) in enumerate(joint.column_labels):
        by_factor[fi].append(k)
    genus_of = [len(f.phi) for f in factors]

    upper = sum((n * rep.alpha for n, rep in zip(ns, reports)), Fraction(0))
    lower = Fraction(0)
    question2 = Fraction(0)
    for mask in range(1, 2 ** r):
        subset = [i for i in range(r) if mask >> i & 1]
        cols = [joint.characters[k] for i in subset for k in by_factor[i]]
        outcome = _search(cols)
        basis = IntSpanBasis(len(cols[0]))
        for col in cols:
            basis.insert(col)
        d_subset = basis.dim
        alpha_subset = outcome.ratio
        lower = max(lower, min(ns[i] for i in subset) * alpha_subset)
        dim_total = sum(ns[i] * genus_of[i] for i in subset)
        question2 = max(question2, Fraction(2 * dim_total, d_subset))
    assert lower <= upper
    return ProductEnvelope(lower=lower, upper=upper, question2=question2)


def abel_inequality_check(ns: Sequence[int], bs: Sequence[int], ws: Sequence[int]) -> bool:
    """Weighted-average comparison against the best prefix ratio.

    For weakly decreasing positive weights n, checks exactly that
    (sum n_i b_i)/(sum n_i w_i) <= max over prefixes of
    (sum b_i)/(sum w_i).
    """
    if not (len(ns) == len(bs) == len(ws)) or not ns:
        raise ValueError("three equal-length nonempty sequences required")
    if any(x <= 0 for x in ns) or any(x <= 0 for x in bs) or any(x <= 0 for x in ws):
        raise ValueError("all entries must be positive")
    if any(a < b for a, b in zip(ns, ns[1:])):
        raise ValueError("multiplicities must be weakly decreasing")
    lhs = Fraction(sum(n * b for n, b in zip(ns, bs)),
                   sum(n * w for n, w in zip(ns, ws)))
    acc_b = 0
    acc_w = 0
    rhs = Fraction(0)
    for b, w in zip(bs, ws):
        acc_b += b
        acc_w += w
        rhs = max(rhs, Fraction(acc_b, acc_w))
    return lhs <= rhs
