"""Exact integer and rational linear algebra.

Matrices are plain tuples of rows holding Python ints (or ``Fraction`` for the
rational helpers).  Nothing here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Sequence, Union

from .errors import SingularMatrix

Vector = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]

#: Marker returned by :func:`lattice_index` for sublattices of lower rank.
INFINITE = float("inf")


@dataclass(frozen=True)
class IntMatrix:
    """Row-major integer matrix with explicit shape."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    def to_rows(self) -> Matrix:
        c = self.cols
        return tuple(self.entries[i * c:(i + 1) * c] for i in range(self.rows))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        return IntMatrix.from_rows(matmul(self.to_rows(), other.to_rows()), other.cols)

    def transpose(self) -> IntMatrix:
        return IntMatrix.from_rows(transpose(self.to_rows()), self.rows)


@dataclass(frozen=True)
class SnfResult:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` in Smith form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def divisors(self) -> tuple[int, ...]:
        """Nonzero elementary divisors ``d_1 | d_2 | ...``."""
        k = min(self.D.rows, self.D.cols)
        return tuple(self.D[i, i] for i in range(k) if self.D[i, i] != 0)


def _as_rows(M: IntMatrix | Sequence[Sequence[int]]) -> list[list[int]]:
    if isinstance(M, IntMatrix):
        return [list(r) for r in M.to_rows()]
    return [[int(x) for x in r] for r in M]


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(M: Sequence[Sequence]) -> tuple[tuple, ...]:
    return tuple(zip(*M))


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> tuple[tuple, ...]:
    Bt = list(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A: Sequence[Sequence], x: Sequence) -> tuple:
    return tuple(sum(a * b for a, b in zip(row, x)) for row in A)


def dot(x: Sequence, y: Sequence):
    return sum(a * b for a, b in zip(x, y))


def primitive(v: Sequence[int]) -> Vector:
    """Divide an integer vector by the gcd of its entries."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def smith_normal_form(M: IntMatrix | Sequence[Sequence[int]]) -> SnfResult:
    """Smith normal form by Euclidean row/column reduction.

    The pivot at each stage is an entry of minimal nonzero absolute value in
    the remaining block.  Before moving on, the pivot is made to divide every
    entry of the block, which yields the divisibility chain directly.
    """
    A = _as_rows(M)
    m = len(A)
    n = len(A[0]) if m else (M.cols if isinstance(M, IntMatrix) else 0)
    U = [list(r) for r in identity(m)]
    V = [list(r) for r in identity(n)]

    def swap_rows(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, c: int) -> None:
        # row_dst += c * row_src
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst: int, src: int, c: int) -> None:
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    a = A[i][j]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), i, j)
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            done = True
            p = A[t][t]
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    add_row(i, t, -q)
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    add_col(j, t, -q)
                if A[t][j]:
                    done = False
            if not done:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < m and t < n and A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]

    return SnfResult(
        IntMatrix.from_rows(U, m),
        IntMatrix.from_rows(A, n),
        IntMatrix.from_rows(V, n),
    )


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) determinant of a square integer matrix."""
    A = [list(r) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def rref(M: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals and the pivot columns."""
    A = [[Fraction(x) for x in r] for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(M: Sequence[Sequence]) -> int:
    """Rank over the rationals, via fraction-free elimination on integer input."""
    A = [list(r) for r in M]
    if not A:
        return 0
    if any(isinstance(x, Fraction) for r in A for x in r):
        return len(rref(A)[1])
    n = len(A[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        for i in range(r + 1, len(A)):
            a = A[i][c]
            if a:
                A[i] = [x * p - a * y for x, y in zip(A[i], A[r])]
        r += 1
        if r == len(A):
            break
    return r


def integer_kernel(M: Sequence[Sequence[int]], ncols: int | None = None) -> list[Vector]:
    """Basis of the rational kernel of ``M``, each vector primitive integral."""
    if ncols is None:
        ncols = len(M[0])
    if not M:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    R, pivots = rref(M)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        basis.append(primitive([int(x * den) for x in v]))
    return basis


def solve_unique_rational(
    A: IntMatrix | Sequence[Sequence[int]], b: Sequence
) -> tuple[Fraction, ...]:
    """The unique rational solution of ``A x = b`` for square nonsingular ``A``."""
    rows = [list(r) for r in (A.to_rows() if isinstance(A, IntMatrix) else A)]
    n = len(rows)
    if any(len(r) != n for r in rows) or len(b) != n:
        raise ValueError("solve_unique_rational needs a square system")
    aug = [list(r) + [b[i]] for i, r in enumerate(rows)]
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        raise SingularMatrix("matrix is singular")
    return tuple(R[i][n] for i in range(n))


def adjugate(M: Sequence[Sequence[int]]) -> tuple[Matrix, int]:
    """Return ``(adj, det)`` with ``adj @ M == det * I``; ``M`` must be nonsingular.

    Fraction-free Gauss-Jordan on ``[M | I]``: every intermediate entry is a
    minor, so each division is exact and the left block ends as ``d * I``
    with ``d = +-det`` while the right block ends as ``d * M^-1``.
    """
    n = len(M)
    A = [[int(x) for x in r] + [int(i == j) for j in range(n)] for i, r in enumerate(M)]
    if any(len(r) != 2 * n for r in A):
        raise ValueError("adjugate needs a square matrix")
    sign, prev = 1, 1
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k] != 0), None)
        if p is None:
            raise SingularMatrix("matrix is singular")
        if p != k:
            A[k], A[p] = A[p], A[k]
            sign = -sign
        pk = A[k]
        akk = pk[k]
        for i in range(n):
            if i == k:
                continue
            ri = A[i]
            aik = ri[k]
            A[i] = [(akk * ri[j] - aik * pk[j]) // prev for j in range(2 * n)]
        prev = akk
    d = A[0][0] if n else 1
    det = sign * d
    adj = tuple(tuple(sign * x for x in r[n:]) for r in A)
    return adj, det


def inverse_unimodular(M: IntMatrix | Sequence[Sequence[int]]) -> Matrix:
    rows = _as_rows(M)
    adj, det = adjugate(rows)
    if abs(det) != 1:
        raise ValueError("matrix is not unimodular")
    return tuple(tuple(x * det for x in r) for r in adj)


def lattice_index(generators: Sequence[Sequence[int]]) -> Union[int, float]:
    """Index of the lattice spanned by ``generators`` in ``Z^n``.

    Returns :data:`INFINITE` when the generators do not have full rank.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    if not gens:
        return INFINITE
    n = len(gens[0])
    snf = smith_normal_form(transpose(gens))
    divisors = snf.divisors
    if len(divisors) < n:
        return INFINITE
    return prod(divisors)


class LatticeQuotient:
    """Residues modulo the lattice spanned by a set of generators.

    For generator columns ``B`` with ``U B V = D`` the map ``x -> U x`` sends
    the lattice onto ``D Z^k``, so the first ``rank`` coordinates reduced modulo
    the divisors (and the rest, which must vanish on the lattice) identify the
    coset of ``x``.
    """

    def __init__(self, generators: Sequence[Sequence[int]]):
        gens = [tuple(int(x) for x in g) for g in generators]
        self.dim = len(gens[0])
        snf = smith_normal_form(transpose(gens))
        self.U = snf.U.to_rows()
        self.Uinv = inverse_unimodular(snf.U)
        self.divisors = snf.divisors
        self.rank = len(self.divisors)
        self.basis = tuple(
            tuple(self.Uinv[r][i] * self.divisors[i] for r in range(self.dim))
            for i in range(self.rank)
        )

    @property
    def index(self) -> Union[int, float]:
        if self.rank < self.dim:
            return INFINITE
        return prod(self.divisors)

    def residue(self, x: Sequence[int]) -> tuple[int, ...]:
        """Canonical residue of ``x``; equal residues means equal cosets."""
        y = matvec(self.U, x)
        out = [y[i] % d for i, d in enumerate(self.divisors)]
        out.extend(y[self.rank:])
        return tuple(out)

    def contains(self, x: Sequence[int]) -> bool:
        return not any(self.residue(x))

    def representative(self, x: Sequence[int]) -> Vector:
        """Canonical lattice point of the coset of ``x``."""
        return matvec(self.Uinv, self.residue(x))

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...] | None:
        """Coordinates of ``x`` in :attr:`basis`, or ``None`` if ``x`` is not in the lattice."""
        y = matvec(self.U, x)
        if any(y[self.rank:]):
            return None
        coords = []
        for yi, d in zip(y, self.divisors):
            if yi % d:
                return None
            coords.append(yi // d)
        return tuple(coords)
