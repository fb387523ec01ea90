"""Exact integer and rational matrix kernel.

Everything here is computed with arbitrary-precision integers or
`fractions.Fraction`; no floating point is used anywhere.  The kernel
provides the handful of lattice operations the rest of the package is
built on: fraction-free rank, canonical subspace forms (for hashing and
memoization), Smith normal form with unimodular transforms, Hermite
normal form, integer kernels and lattice saturation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, entries stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimensions")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match dimensions")
        for e in self.entries:
            if not isinstance(e, int):
                raise ValueError("integer matrix with non-integer entry")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
        else:
            width = 0 if cols is None else cols
        if cols is not None and rows and width != cols:
            raise ValueError("explicit column count disagrees with rows")
        flat = tuple(int(x) for r in rows for x in r)
        return cls(len(rows), width, flat)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    def row(self, i: int) -> tuple[int, ...]:
        c = self.cols
        return self.entries[i * c:(i + 1) * c]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_lists(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.column(j) for j in range(self.cols)], cols=self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("inner dimension mismatch")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            out.append([sum(ri[k] * other.entries[k * other.cols + j] for k in range(self.cols))
                        for j in range(other.cols)])
        return IntMatrix.from_rows(out, cols=other.cols)


@dataclass(frozen=True)
class RatMatrix:
    """Immutable rational matrix; entries are normalized Fractions."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match dimensions")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "RatMatrix":
        rows = [list(r) for r in rows]
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
        else:
            width = 0 if cols is None else cols
        flat = tuple(Fraction(x) for r in rows for x in r)
        return cls(len(rows), width, flat)

    def row(self, i: int) -> tuple[Fraction, ...]:
        c = self.cols
        return self.entries[i * c:(i + 1) * c]

    def row_lists(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]


@dataclass(frozen=True)
class CanonicalSubspace:
    """A rational subspace in its unique reduced-echelon basis.

    Two subspaces are equal iff their canonical bases are identical, so
    instances are safe to use as dictionary keys for memoization.
    """

    ambient_dim: int
    basis: RatMatrix

    @property
    def dim(self) -> int:
        return self.basis.rows

    def pivot_columns(self) -> tuple[int, ...]:
        pivots = []
        for i in range(self.basis.rows):
            r = self.basis.row(i)
            pivots.append(next(j for j, x in enumerate(r) if x != 0))
        return tuple(pivots)


@dataclass(frozen=True)
class SmithForm:
    """Smith normal form left*A*right = diag, with unimodular transforms.

    `diag` holds only the nonzero elementary divisors d1 | d2 | ... ;
    a zero matrix has an empty diag.
    """

    diag: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix


def _nonzero_rank_bareiss(rows: list[list[int]], nrows: int, ncols: int) -> int:
    """Fraction-free Gaussian elimination (Bareiss); mutates `rows`."""
    r = 0
    prev = 1
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        for i in range(r + 1, nrows):
            ric = rows[i][c]
            rowi = rows[i]
            rowr = rows[r]
            for j in range(c + 1, ncols):
                # exact division by the previous pivot is the Bareiss step
                rowi[j] = (rowi[j] * pv - ric * rowr[j]) // prev
            rowi[c] = 0
        prev = pv
        r += 1
        if r == nrows:
            break
    return r


def rank(m: IntMatrix) -> int:
    """Exact rank over Q via fraction-free elimination."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return _nonzero_rank_bareiss(m.row_lists(), m.rows, m.cols)


def determinant(m: IntMatrix) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return 1
    a = m.row_lists()
    sign = 1
    prev = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        pv = a[c][c]
        for i in range(c + 1, n):
            aic = a[i][c]
            for j in range(c + 1, n):
                a[i][j] = (a[i][j] * pv - aic * a[c][j]) // prev
            a[i][c] = 0
        prev = pv
    return sign * a[n - 1][n - 1]


class IntSpanBasis:
    """Incremental integer echelon basis of a rational span.

    Rows are kept in a unique canonical shape: sorted by pivot column,
    each row primitive with positive pivot, and every pivot column zero
    in all other rows.  This is the reduced rational echelon form with
    denominators cleared, so `key()` identifies the subspace exactly.
    """

    __slots__ = ("width", "pivots", "rows")

    def __init__(self, width: int):
        self.width = width
        self.pivots: list[int] = []
        self.rows: list[list[int]] = []

    def copy(self) -> "IntSpanBasis":
        dup = IntSpanBasis(self.width)
        dup.pivots = list(self.pivots)
        dup.rows = [list(r) for r in self.rows]
        return dup

    @property
    def dim(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: Sequence[int]) -> list[int]:
        v = list(vec)
        for p, row in zip(self.pivots, self.rows):
            if v[p]:
                a, b = row[p], v[p]
                v = [a * x - b * y for x, y in zip(v, row)]
                g = 0
                for x in v:
                    g = gcd(g, x)
                    if g == 1:
                        break
                if g > 1:
                    v = [x // g for x in v]
        return v

    def contains(self, vec: Sequence[int]) -> bool:
        return not any(self._reduce(vec))

    def insert(self, vec: Sequence[int]) -> bool:
        """Add a vector; returns True iff the span grew."""
        if len(vec) != self.width:
            raise ValueError("vector width mismatch")
        v = self._reduce(vec)
        piv = next((j for j, x in enumerate(v) if x), None)
        if piv is None:
            return False
        g = 0
        for x in v:
            g = gcd(g, x)
        if v[piv] < 0:
            g = -g
        v = [x // g for x in v]
        # restore full reduction: clear the new pivot column in old rows
        for k, row in enumerate(self.rows):
            if row[piv]:
                a, b = v[piv], row[piv]
                new = [a * x - b * y for x, y in zip(row, v)]
                g2 = 0
                for x in new:
                    g2 = gcd(g2, x)
                if new[self.pivots[k]] < 0:
                    g2 = -g2
                self.rows[k] = [x // g2 for x in new]
        at = next((k for k, p in enumerate(self.pivots) if p > piv), len(self.pivots))
        self.pivots.insert(at, piv)
        self.rows.insert(at, v)
        return True

    def key(self) -> tuple:
        return tuple(tuple(r) for r in self.rows)

    def to_subspace(self) -> CanonicalSubspace:
        frac_rows = []
        for p, row in zip(self.pivots, self.rows):
            lead = row[p]
            frac_rows.append([Fraction(x, lead) for x in row])
        return CanonicalSubspace(self.width, RatMatrix.from_rows(frac_rows, cols=self.width))


def canonical_span(vectors: RatMatrix | Sequence[Sequence]) -> CanonicalSubspace:
    """Reduced echelon basis of the row span; canonical and hashable."""
    if isinstance(vectors, RatMatrix):
        rows = vectors.row_lists()
        width = vectors.cols
    else:
        rows = [list(r) for r in vectors]
        if not rows:
            raise ValueError("ambient dimension unknown for an empty vector list")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
    basis = IntSpanBasis(width)
    for r in rows:
        fracs = [Fraction(x) for x in r]
        den = 1
        for f in fracs:
            den = den * f.denominator // gcd(den, f.denominator)
        basis.insert([int(f * den) for f in fracs])
    return basis.to_subspace()


def contains(space: CanonicalSubspace, vector: Sequence) -> bool:
    """Membership of a vector in a canonical subspace; exact."""
    if len(vector) != space.ambient_dim:
        raise ValueError("vector does not live in the ambient space")
    v = [Fraction(x) for x in vector]
    for i in range(space.basis.rows):
        row = space.basis.row(i)
        p = next(j for j, x in enumerate(row) if x != 0)
        if v[p]:
            coef = v[p]
            v = [x - coef * y for x, y in zip(v, row)]
    return not any(v)


def smith_normal_form(m: IntMatrix) -> SmithForm:
    """Smith normal form with transforms: left @ m @ right is diagonal.

    The returned diagonal lists the nonzero elementary divisors, each
    positive and dividing the next.
    """
    nr, nc = m.rows, m.cols
    a = m.row_lists()
    left = IntMatrix.identity(nr).row_lists()
    right = IntMatrix.identity(nc).row_lists()

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in right:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, q):
        # row dst -= q * row src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x - q * y for x, y in zip(left[dst], left[src])]

    def add_col(src, dst, q):
        for r in a:
            r[dst] -= q * r[src]
        for r in right:
            r[dst] -= q * r[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        left[i] = [-x for x in left[i]]

    t = 0
    limit = min(nr, nc)
    while t < limit:
        # pick the nonzero entry of smallest magnitude as pivot
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            swap_cols(t, bj)
        while True:
            # clear the pivot column
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(t, i, q)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
            if dirty:
                continue
            # clear the pivot row
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(t, j, q)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            # pivot must divide every remaining entry
            stain = None
            piv = a[t][t]
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] % piv:
                        stain = i
                        break
                if stain is not None:
                    break
            if stain is None:
                break
            add_row(stain, t, -1)
        if a[t][t] < 0:
            negate_row(t)
        t += 1

    diag = tuple(a[i][i] for i in range(t) if a[i][i])
    return SmithForm(diag, IntMatrix.from_rows(left, cols=nr), IntMatrix.from_rows(right, cols=nc))


def hermite_normal_form(m: IntMatrix) -> IntMatrix:
    """Canonical row Hermite form of the row lattice (zero rows dropped).

    Pivots are positive, entries above a pivot are reduced into
    [0, pivot), so equal lattices produce identical matrices.
    """
    a = m.row_lists()
    nr, nc = m.rows, m.cols
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        # single nonzero below r in this column, via euclidean steps
        while True:
            nz = [i for i in range(r + 1, nr) if a[i][c]]
            if not nz:
                break
            for i in nz:
                q = a[i][c] // a[r][c]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            nz = [i for i in range(r + 1, nr) if a[i][c]]
            if nz:
                best = min(nz, key=lambda i: abs(a[i][c]))
                a[r], a[best] = a[best], a[r]
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == nr:
            break
    return IntMatrix.from_rows(a[:r], cols=nc)


def integer_kernel(m: IntMatrix) -> IntMatrix:
    """Basis (as rows, Hermite form) of {x in Z^cols : m @ x = 0}.

    The kernel of an integer matrix is always a saturated lattice.
    """
    snf = smith_normal_form(m)
    r = len(snf.diag)
    cols = [snf.right.column(j) for j in range(r, m.cols)]
    if not cols:
        return IntMatrix.zero(0, m.cols)
    return hermite_normal_form(IntMatrix.from_rows(cols, cols=m.cols))


def saturate(m: IntMatrix) -> tuple[IntMatrix, int]:
    """Saturation of the row lattice: (rational row span) meet Z^cols.

    Returns the Hermite basis of the saturation together with the index
    of the input lattice inside it, which equals the product of the
    nonzero elementary divisors of the input matrix.
    """
    snf = smith_normal_form(m)
    index = 1
    for d in snf.diag:
        index *= d
    ker = integer_kernel(m)
    if ker.rows == 0:
        return hermite_normal_form(IntMatrix.identity(m.cols)), index
    sat = integer_kernel(ker)
    return sat, index


def solve_left(basis: IntMatrix, vector: Sequence[int]) -> Optional[list[Fraction]]:
    """Solve x @ basis = vector over Q; None when the vector is outside.

    Requires the rows of `basis` to be linearly independent.
    """
    if len(vector) != basis.cols:
        raise ValueError("vector width mismatch")
    n, d = basis.cols, basis.rows
    # augment each row with its coordinate marker, echelonize on the
    # first n columns, then reduce the augmented target once
    rows = [[Fraction(x) for x in basis.row(i)]
            + [Fraction(int(j == i)) for j in range(d)] for i in range(d)]
    echelon: list[tuple[int, list[Fraction]]] = []
    for row in rows:
        for p, er in echelon:
            if row[p]:
                coef = row[p]
                row = [x - coef * y for x, y in zip(row, er)]
        p = next((j for j in range(n) if row[j]), None)
        if p is None:
            raise ValueError("basis rows are dependent")
        inv = row[p]
        echelon.append((p, [x / inv for x in row]))
    v = [Fraction(x) for x in vector] + [Fraction(0)] * d
    for p, er in echelon:
        if v[p]:
            coef = v[p]
            v = [x - coef * y for x, y in zip(v, er)]
    if any(v[:n]):
        return None
    return [-x for x in v[n:]]
