"""Exact linear algebra kernel tests.

Expected values for the worked examples were frozen after computing
them with the brute-force oracles in this file (minor expansion for
rank, gcd-of-minors for elementary divisors, box search for lattice
saturation), which are also run directly against randomized inputs.
"""

import random
from fractions import Fraction
from itertools import combinations

import pytest

from cmtorsion.exact_linalg import (
    CanonicalSubspace,
    IntMatrix,
    IntSpanBasis,
    RatMatrix,
    canonical_span,
    contains,
    determinant,
    hermite_normal_form,
    integer_kernel,
    rank,
    saturate,
    smith_normal_form,
    solve_left,
)


def minor_rank_oracle(m: IntMatrix) -> int:
    """Largest k with a nonzero k x k minor; independent of elimination."""
    best = 0
    for k in range(1, min(m.rows, m.cols) + 1):
        found = False
        for rsel in combinations(range(m.rows), k):
            for csel in combinations(range(m.cols), k):
                sub = IntMatrix.from_rows(
                    [[m.row(i)[j] for j in csel] for i in rsel], cols=k)
                if determinant(sub) != 0:
                    found = True
                    break
            if found:
                break
        if found:
            best = k
        else:
            break
    return best


def gcd_minor_divisors_oracle(m: IntMatrix) -> list[int]:
    """Elementary divisors via gcds of k x k minors."""
    import math
    out = []
    prev = 1
    for k in range(1, min(m.rows, m.cols) + 1):
        g = 0
        for rsel in combinations(range(m.rows), k):
            for csel in combinations(range(m.cols), k):
                sub = IntMatrix.from_rows(
                    [[m.row(i)[j] for j in csel] for i in rsel], cols=k)
                g = math.gcd(g, determinant(sub))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def in_rational_span(rows: list[list[int]], v: list[int]) -> bool:
    """Membership of v in the rational row span, by plain elimination."""
    work = [[Fraction(x) for x in r] for r in rows]
    target = [Fraction(x) for x in v]
    n = len(v)
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(work)) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        lead = work[r][c]
        work[r] = [x / lead for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c]:
                coef = work[i][c]
                work[i] = [x - coef * y for x, y in zip(work[i], work[r])]
        if target[c]:
            coef = target[c]
            target = [x - coef * y for x, y in zip(target, work[r])]
        r += 1
    return not any(target)


CYCLE4 = IntMatrix.from_rows([
    [1, 1, 0, 0],
    [0, 1, 1, 0],
    [0, 0, 1, 1],
    [1, 0, 0, 1],
])


class TestRank:
    def test_identity(self):
        assert rank(IntMatrix.identity(4)) == 4

    def test_cyclic_incidence(self):
        # rows sum with alternating signs to zero, so the rank drops by one
        assert rank(CYCLE4) == 3
        assert minor_rank_oracle(CYCLE4) == 3

    def test_zero(self):
        assert rank(IntMatrix.zero(3, 5)) == 0

    def test_against_minor_oracle_randomized(self):
        rng = random.Random(101)
        for _ in range(40):
            nr, nc = rng.randint(1, 4), rng.randint(1, 4)
            m = IntMatrix.from_rows(
                [[rng.randint(-4, 4) for _ in range(nc)] for _ in range(nr)], cols=nc)
            assert rank(m) == minor_rank_oracle(m)


class TestCanonicalSpan:
    def test_echelon_example(self):
        s = canonical_span([[2, 4, 0], [1, 2, 1]])
        assert s.dim == 2
        assert s.basis.row_lists() == [
            [Fraction(1), Fraction(2), Fraction(0)],
            [Fraction(0), Fraction(0), Fraction(1)],
        ]

    def test_permutation_and_scaling_invariance(self):
        rng = random.Random(7)
        for _ in range(30):
            n = rng.randint(2, 5)
            k = rng.randint(1, 4)
            rows = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(k)]
            s1 = canonical_span(rows)
            shuffled = rows[:]
            rng.shuffle(shuffled)
            factors = [rng.choice([1, 2, -3]) for _ in shuffled]
            scaled = [[x * f for x in r] for f, r in zip(factors, shuffled)]
            # adding a row already in the span must not change anything
            if rows:
                extra = [sum(r[j] for r in rows) for j in range(n)]
                scaled.append(extra)
            assert canonical_span(scaled) == s1

    def test_hashable_and_idempotent(self):
        s = canonical_span([[1, 1], [0, 2]])
        again = canonical_span(s.basis)
        assert s == again
        assert hash(s) == hash(again)
        assert len({s, again}) == 1

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            canonical_span([])


class TestContains:
    def test_examples(self):
        s = canonical_span([[1, 0, 1], [0, 1, 1]])
        assert contains(s, [1, 1, 2])
        assert contains(s, [Fraction(1, 2), 0, Fraction(1, 2)])
        assert not contains(s, [1, 0, 0])

    def test_dimension_mismatch(self):
        s = canonical_span([[1, 0]])
        with pytest.raises(ValueError):
            contains(s, [1, 0, 0])

    def test_against_elimination_oracle(self):
        rng = random.Random(31)
        for _ in range(40):
            n = rng.randint(2, 5)
            rows = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(rng.randint(1, 3))]
            s = canonical_span(rows)
            v = [rng.randint(-4, 4) for _ in range(n)]
            assert contains(s, v) == in_rational_span(rows, v)


def diag_extended(diag, rows, cols):
    out = [[0] * cols for _ in range(rows)]
    for i, d in enumerate(diag):
        out[i][i] = d
    return IntMatrix.from_rows(out, cols=cols)


class TestSmithNormalForm:
    def check(self, m: IntMatrix):
        snf = smith_normal_form(m)
        assert abs(determinant(snf.left)) == 1
        assert abs(determinant(snf.right)) == 1
        assert (snf.left @ m) @ snf.right == diag_extended(snf.diag, m.rows, m.cols)
        for a, b in zip(snf.diag, snf.diag[1:]):
            assert a > 0 and b % a == 0
        return snf

    def test_two_three(self):
        snf = self.check(IntMatrix.from_rows([[2, 0], [0, 3]]))
        assert snf.diag == (1, 6)

    def test_identity(self):
        snf = self.check(IntMatrix.identity(3))
        assert snf.diag == (1, 1, 1)

    def test_zero(self):
        snf = self.check(IntMatrix.zero(2, 3))
        assert snf.diag == ()

    def test_rank_matches_nonzero_count(self):
        snf = self.check(CYCLE4)
        assert len(snf.diag) == rank(CYCLE4) == 3

    def test_against_gcd_minor_oracle_randomized(self):
        rng = random.Random(977)
        for _ in range(30):
            nr, nc = rng.randint(1, 4), rng.randint(1, 4)
            m = IntMatrix.from_rows(
                [[rng.randint(-5, 5) for _ in range(nc)] for _ in range(nr)], cols=nc)
            snf = self.check(m)
            assert list(snf.diag) == gcd_minor_divisors_oracle(m)


class TestHermite:
    def test_canonical_for_equal_lattices(self):
        rng = random.Random(55)
        for _ in range(25):
            n = rng.randint(2, 4)
            rows = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(rng.randint(1, 4))]
            h1 = hermite_normal_form(IntMatrix.from_rows(rows, cols=n))
            # unimodular row mixes keep the lattice fixed
            mixed = [list(r) for r in rows]
            for _ in range(6):
                i, j = rng.randrange(len(mixed)), rng.randrange(len(mixed))
                if i != j:
                    q = rng.randint(-2, 2)
                    mixed[i] = [x + q * y for x, y in zip(mixed[i], mixed[j])]
            rng.shuffle(mixed)
            h2 = hermite_normal_form(IntMatrix.from_rows(mixed, cols=n))
            assert h1 == h2

    def test_pivot_normalization(self):
        h = hermite_normal_form(IntMatrix.from_rows([[0, -2], [3, 1]]))
        assert h.row_lists() == [[3, 1], [0, 2]]


class TestKernel:
    def test_cycle(self):
        k = integer_kernel(CYCLE4)
        assert k.rows == 1
        x = k.row(0)
        for i in range(4):
            assert sum(CYCLE4.row(i)[j] * x[j] for j in range(4)) == 0
        assert tuple(map(abs, x)) == (1, 1, 1, 1)

    def test_kernel_is_saturated(self):
        rng = random.Random(4242)
        for _ in range(25):
            nr, nc = rng.randint(1, 4), rng.randint(2, 5)
            m = IntMatrix.from_rows(
                [[rng.randint(-4, 4) for _ in range(nc)] for _ in range(nr)], cols=nc)
            k = integer_kernel(m)
            assert k.rows == nc - rank(m)
            for i in range(k.rows):
                assert all(sum(m.row(r)[j] * k.row(i)[j] for j in range(nc)) == 0
                           for r in range(nr))
            if k.rows:
                _, idx = saturate(k)
                assert idx == 1


class TestSaturate:
    def test_single_even_vector(self):
        basis, index = saturate(IntMatrix.from_rows([[2, 0]]))
        assert basis.row_lists() == [[1, 0]]
        assert index == 2

    def test_already_saturated(self):
        basis, index = saturate(IntMatrix.identity(2))
        assert basis == IntMatrix.identity(2)
        assert index == 1

    def test_full_rank_sublattice(self):
        # the rational span of these rows is the whole plane, so the
        # saturation is Z^2; (1, 0) = (1/2)*(2, 2) - (1/4)*(0, 4)
        rows = [[2, 2], [0, 4]]
        assert in_rational_span(rows, [1, 0])
        basis, index = saturate(IntMatrix.from_rows(rows))
        assert basis == IntMatrix.identity(2)
        assert index == 8

    def test_box_oracle_randomized(self):
        rng = random.Random(13)
        for _ in range(25):
            n = rng.randint(2, 3)
            k = rng.randint(1, 2)
            rows = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(k)]
            basis, index = saturate(IntMatrix.from_rows(rows, cols=n))
            rbasis = basis.row_lists()
            # every small integer vector of the rational span must lie in
            # the claimed lattice with integer coordinates
            span_rows = [r for r in rows if any(r)]
            from itertools import product
            for v in product(range(-3, 4), repeat=n):
                v = list(v)
                if not span_rows:
                    expect = not any(v)
                else:
                    expect = in_rational_span(span_rows, v)
                if expect and rbasis:
                    coords = solve_left(basis, v)
                    assert coords is not None
                    assert all(c.denominator == 1 for c in coords)
                elif expect:
                    assert not any(v)

    def test_idempotent(self):
        rng = random.Random(77)
        for _ in range(20):
            n = rng.randint(2, 4)
            rows = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(rng.randint(1, 3))]
            basis, _ = saturate(IntMatrix.from_rows(rows, cols=n))
            again, idx = saturate(basis)
            assert again == basis
            assert idx == 1


class TestIntSpanBasis:
    def test_matches_canonical_span(self):
        rng = random.Random(909)
        for _ in range(30):
            n = rng.randint(2, 5)
            rows = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(rng.randint(1, 4))]
            b = IntSpanBasis(n)
            for r in rows:
                b.insert(r)
            assert b.to_subspace() == canonical_span(rows)
            v = [rng.randint(-3, 3) for _ in range(n)]
            assert b.contains(v) == in_rational_span(rows, v)

    def test_insert_reports_growth(self):
        b = IntSpanBasis(3)
        assert b.insert([1, 2, 0])
        assert not b.insert([2, 4, 0])
        assert b.insert([0, 0, 5])
        assert b.dim == 2


class TestSolveLeft:
    def test_roundtrip(self):
        rng = random.Random(3131)
        for _ in range(25):
            n = rng.randint(2, 5)
            d = rng.randint(1, n)
            while True:
                basis = IntMatrix.from_rows(
                    [[rng.randint(-3, 3) for _ in range(n)] for _ in range(d)], cols=n)
                if rank(basis) == d:
                    break
            x = [rng.randint(-3, 3) for _ in range(d)]
            v = [sum(x[i] * basis.row(i)[j] for i in range(d)) for j in range(n)]
            coords = solve_left(basis, v)
            assert coords == [Fraction(c) for c in x]

    def test_outside_span(self):
        basis = IntMatrix.from_rows([[1, 0, 0]])
        assert solve_left(basis, [0, 1, 0]) is None
