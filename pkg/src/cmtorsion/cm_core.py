"""Finite group data underlying a CM type.

A datum consists of a finite group with a distinguished central
involution (the conjugation), together with one or more factors; each
factor is a coset space of the group with a choice of half its cosets
so that the choice and its conjugate translate partition the space.
Groups are represented by explicit multiplication tables, with element
0 always the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product
from typing import Iterable, Optional, Sequence


class UnsupportedInputError(ValueError):
    """Raised for well-formed inputs outside the supported model."""


class FiniteGroup:
    """Immutable finite group given by its multiplication table.

    table[a][b] is the product a*b.  Validation checks that index 0 is
    a two-sided identity, that every element has an inverse and that
    the operation is associative.
    """

    __slots__ = ("table", "order", "inverses", "name", "abelian_invariants",
                 "_element_tuples")

    def __init__(self, table: Sequence[Sequence[int]], name: str = "",
                 abelian_invariants: Optional[tuple[int, ...]] = None,
                 _element_tuples: Optional[tuple[tuple[int, ...], ...]] = None):
        n = len(table)
        tab = tuple(tuple(row) for row in table)
        for row in tab:
            if len(row) != n or any(not (0 <= x < n) for x in row):
                raise ValueError("multiplication table is not square over 0..n-1")
        if n == 0:
            raise ValueError("empty group")
        for a in range(n):
            if tab[0][a] != a or tab[a][0] != a:
                raise ValueError("element 0 is not a two-sided identity")
        inverses = [None] * n
        for a in range(n):
            for b in range(n):
                if tab[a][b] == 0:
                    if tab[b][a] != 0:
                        raise ValueError("one-sided inverse found")
                    inverses[a] = b
        if any(v is None for v in inverses):
            raise ValueError("element without inverse")
        for a in range(n):
            for b in range(n):
                ab = tab[a][b]
                for c in range(n):
                    if tab[ab][c] != tab[a][tab[b][c]]:
                        raise ValueError("operation is not associative")
        self.table = tab
        self.order = n
        self.inverses = tuple(inverses)
        self.name = name or f"order{n}"
        self.abelian_invariants = abelian_invariants
        self._element_tuples = _element_tuples

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def is_central(self, a: int) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for b in range(self.order))

    def central_involutions(self) -> list[int]:
        return [a for a in range(1, self.order)
                if self.table[a][a] == 0 and self.is_central(a)]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def element_tuple(self, a: int) -> Optional[tuple[int, ...]]:
        if self._element_tuples is None:
            return None
        return self._element_tuples[a]

    def index_of_tuple(self, coords: Sequence[int]) -> int:
        if self.abelian_invariants is None:
            raise ValueError(f"group {self.name} has no coordinate form")
        inv = self.abelian_invariants
        if len(coords) != len(inv):
            raise ValueError("coordinate length does not match the invariants")
        idx = 0
        for c, k in zip(coords, inv):
            idx = idx * k + (c % k)
        return idx

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    @classmethod
    def abelian(cls, invariants: Sequence[int]) -> "FiniteGroup":
        """Direct product of cyclic groups Z/k1 x ... x Z/kr.

        Elements are enumerated with the last coordinate varying
        fastest, so index 0 is the identity tuple.
        """
        inv = tuple(int(k) for k in invariants)
        if not inv or any(k < 2 for k in inv):
            raise ValueError("cyclic orders must all be at least 2")
        elems = list(iter_product(*[range(k) for k in inv]))
        pos = {e: i for i, e in enumerate(elems)}
        table = [[pos[tuple((x + y) % k for x, y, k in zip(a, b, inv))]
                  for b in elems] for a in elems]
        name = "x".join(f"C{k}" for k in inv)
        return cls(table, name=name, abelian_invariants=inv,
                   _element_tuples=tuple(elems))

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroup":
        """Symmetries of the n-gon, order 2n; indices: i -> r^i, n+i -> s r^i."""
        if n < 3:
            raise ValueError("dihedral constructor expects n >= 3")
        m = 2 * n

        def mul(a, b):
            ra, fa = a % n, a >= n
            rb, fb = b % n, b >= n
            if not fa and not fb:
                return (ra + rb) % n
            if not fa and fb:
                return n + (rb - ra) % n
            if fa and not fb:
                return n + (ra + rb) % n
            return (rb - ra) % n

        table = [[mul(a, b) for b in range(m)] for a in range(m)]
        return cls(table, name=f"Dih{n}")

    @classmethod
    def dicyclic(cls, m: int) -> "FiniteGroup":
        """Dicyclic group of order 4m; indices: i -> a^i, 2m+i -> b a^i."""
        if m < 2:
            raise ValueError("dicyclic constructor expects m >= 2")
        n = 2 * m
        size = 4 * m

        def mul(x, y):
            rx, fx = x % n, x >= n
            ry, fy = y % n, y >= n
            if not fx and not fy:
                return (rx + ry) % n
            if not fx and fy:
                return n + (ry - rx) % n
            if fx and not fy:
                return n + (rx + ry) % n
            return (m + ry - rx) % n

        table = [[mul(a, b) for b in range(size)] for a in range(size)]
        name = "Q8" if m == 2 else f"Dic{m}"
        return cls(table, name=name)

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], name: str = "") -> "FiniteGroup":
        return cls(table, name=name)


class CosetSpace:
    """Left cosets gH of a subgroup H, with the left translation action.

    Cosets are numbered in increasing order of their smallest element;
    the smallest element is the stored representative.
    """

    __slots__ = ("group", "subgroup", "cosets", "reps", "coset_of", "_action")

    def __init__(self, group: FiniteGroup, subgroup: Sequence[int]):
        sub = sorted(set(int(x) for x in subgroup))
        if not sub or sub[0] != 0:
            raise ValueError("subgroup must contain the identity")
        sset = set(sub)
        for a in sub:
            if group.inv(a) not in sset:
                raise ValueError("subgroup is not closed under inverses")
            for b in sub:
                if group.mul(a, b) not in sset:
                    raise ValueError("subgroup is not closed under the product")
        seen = {}
        cosets = []
        for g in range(group.order):
            if g in seen:
                continue
            coset = sorted(group.mul(g, h) for h in sub)
            for x in coset:
                seen[x] = len(cosets)
            cosets.append(tuple(coset))
        self.group = group
        self.subgroup = tuple(sub)
        self.cosets = tuple(cosets)
        self.reps = tuple(c[0] for c in cosets)
        self.coset_of = tuple(seen[g] for g in range(group.order))
        self._action = tuple(
            tuple(self.coset_of[group.mul(g, rep)] for rep in self.reps)
            for g in range(group.order))

    @property
    def size(self) -> int:
        return len(self.cosets)

    def act(self, g: int, coset_index: int) -> int:
        return self._action[g][coset_index]

    def __eq__(self, other):
        return (isinstance(other, CosetSpace)
                and self.group == other.group and self.subgroup == other.subgroup)

    def __hash__(self):
        return hash((self.group, self.subgroup))


@dataclass(frozen=True)
class CMType:
    """A choice of half the cosets of a coset space."""

    space: CosetSpace
    phi: frozenset[int]

    def phi_sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.phi))


@dataclass(frozen=True)
class CMDatum:
    """Group, central conjugation and a list of CM type factors."""

    group: FiniteGroup
    conj: int
    factors: tuple[CMType, ...]

    @property
    def genus(self) -> int:
        return sum(len(f.phi) for f in self.factors)


def validate(datum: CMDatum) -> list[str]:
    """All structural violations of a datum, as human-readable strings."""
    g = datum.group
    problems = []
    c = datum.conj
    if not (0 <= c < g.order):
        return [f"conjugation index {c} out of range"]
    if c == 0:
        problems.append("conjugation equals the identity")
    elif g.mul(c, c) != 0:
        problems.append("conjugation squared is not the identity")
    if not g.is_central(c):
        problems.append("conjugation is not central")
    if not datum.factors:
        problems.append("datum has no factors")
    for k, f in enumerate(datum.factors):
        if f.space.group != g:
            problems.append(f"factor {k} lives over a different group")
            continue
        size = f.space.size
        if not all(0 <= s < size for s in f.phi):
            problems.append(f"factor {k}: phi contains an invalid coset index")
            continue
        image = {f.space.act(c, s) for s in f.phi}
        if image & f.phi or len(f.phi | image) != size:
            problems.append(
                f"factor {k}: phi and its conjugate do not partition the cosets")
    return problems


def is_primitive(t: CMType, conj: int) -> bool:
    """Trivial-translation-stabilizer test for a full coset space.

    Only the case of a trivial subgroup is supported; a type over a
    proper coset space would need its own induction analysis.
    """
    if len(t.space.subgroup) != 1:
        raise UnsupportedInputError(
            "primitivity is only decided for factors over the trivial subgroup")
    group = t.space.group
    phi = t.phi
    if {t.space.act(conj, s) for s in phi} & phi:
        raise ValueError("type is not valid for the given conjugation")
    for g in range(1, group.order):
        if all(t.space.act(g, s) in phi for s in phi):
            return False
    return True


def _type_key(t: CMType) -> tuple[int, ...]:
    return t.phi_sorted()


def _translation_orbit(space: CosetSpace, phi: frozenset[int]) -> list[frozenset[int]]:
    return [frozenset(space.act(g, s) for s in phi) for g in range(space.group.order)]


def automorphisms(group: FiniteGroup) -> list[tuple[int, ...]]:
    """All automorphisms, as permutation tuples; backtracking search.

    Intended for the small groups handled here; images are pruned by
    element order.
    """
    n = group.order
    orders = [group.element_order(a) for a in range(n)]
    # greedy generating sequence
    gens: list[int] = []
    span = {0}
    for a in range(1, n):
        if a in span:
            continue
        gens.append(a)
        frontier = [0]
        span = {0}
        while frontier:
            x = frontier.pop()
            for h in gens:
                for y in (group.mul(x, h), group.mul(h, x)):
                    if y not in span:
                        span.add(y)
                        frontier.append(y)
        if len(span) == n:
            break

    results = []

    def close(partial: dict[int, int]) -> Optional[dict[int, int]]:
        # close the partial map under products; None on inconsistency
        mapped = dict(partial)
        changed = True
        while changed:
            changed = False
            items = list(mapped.items())
            for a, fa in items:
                for b, fb in items:
                    ab = group.mul(a, b)
                    fab = group.mul(fa, fb)
                    if ab in mapped:
                        if mapped[ab] != fab:
                            return None
                    else:
                        mapped[ab] = fab
                        changed = True
        return mapped

    def extend(i: int, partial: dict[int, int]):
        if i == len(gens):
            if len(partial) == n and len(set(partial.values())) == n:
                results.append(tuple(partial[a] for a in range(n)))
            return
        g = gens[i]
        if g in partial:
            extend(i + 1, partial)
            return
        for img in range(n):
            if orders[img] != orders[g]:
                continue
            trial = dict(partial)
            trial[g] = img
            closed = close(trial)
            if closed is None:
                continue
            if len(set(closed.values())) != len(closed):
                continue
            extend(i + 1, closed)

    extend(0, {0: 0})
    return sorted(set(results))


def enumerate_types(group: FiniteGroup, conj: int, *,
                    up_to_translation: bool = False,
                    automorphism_classes: bool = False) -> list[CMType]:
    """All CM types over the trivial subgroup, in a deterministic order.

    Raw enumeration picks one element from each pair {x, conj*x}, which
    yields 2^(order/2) types.  With `up_to_translation` only the
    lexicographically smallest member of each translation orbit is
    kept; `automorphism_classes` additionally folds conjugation-fixing
    automorphisms into the equivalence.
    """
    if not (0 < conj < group.order) or group.mul(conj, conj) != 0:
        raise ValueError("conjugation must be a nontrivial involution")
    if not group.is_central(conj):
        raise ValueError("conjugation must be central")
    space = CosetSpace(group, [0])
    pairs = []
    seen = set()
    for x in range(group.order):
        if x in seen:
            continue
        cx = group.mul(conj, x)
        seen.add(x)
        seen.add(cx)
        pairs.append((x, cx))
    raw = []
    for picks in iter_product(*pairs):
        raw.append(CMType(space, frozenset(picks)))
    raw.sort(key=_type_key)
    if not (up_to_translation or automorphism_classes):
        return raw
    auts: list[tuple[int, ...]] = []
    if automorphism_classes:
        auts = [a for a in automorphisms(group) if a[conj] == conj]
    reps = []
    for t in raw:
        candidates = _translation_orbit(space, t.phi)
        if auts:
            extra = []
            for a in auts:
                mapped = frozenset(a[s] for s in t.phi)
                extra.extend(_translation_orbit(space, mapped))
            candidates.extend(extra)
        best = min(tuple(sorted(s)) for s in candidates)
        if best == t.phi_sorted():
            reps.append(t)
    return reps


def product(data: Sequence[CMDatum]) -> CMDatum:
    """Concatenate the factor lists of data sharing a group and conjugation."""
    if not data:
        raise ValueError("empty product")
    first = data[0]
    for d in data[1:]:
        if d.group != first.group:
            raise ValueError("product factors live over different groups")
        if d.conj != first.conj:
            raise ValueError("product factors disagree on the conjugation")
    factors = tuple(f for d in data for f in d.factors)
    return CMDatum(first.group, first.conj, factors)
