"""Lattices in Q_p^N: Hermite canonical forms, Haar measure of GL_N(Z_p)-cosets,
the residue-count oracle for that measure, and the coset-to-lattice coding.

Matrices are lists of rows; the lattice of a matrix is spanned by its columns.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from .errors import (
    BudgetExceeded,
    InputError,
    InsufficientPrecision,
    NotSublattice,
    SingularInput,
)
from .exactp import PadicScalar

DEFAULT_PRECISION = 20
ORACLE_BUDGET = 10**8


def as_padic_matrix(M, p: int, k: int = DEFAULT_PRECISION):
    out = []
    for row in M:
        out.append([x if isinstance(x, PadicScalar) else PadicScalar.from_fraction(x, p, k) for x in row])
    n = len(out)
    if any(len(row) != n for row in out):
        raise InputError("matrix must be square")
    return out


@dataclass(frozen=True)
class TriangularBasis:
    """Canonical upper-triangular basis of a lattice (columns generate).

    ``entries[i][i] == p**exponents[i]``; for j > i, ``entries[i][j]`` lies in
    [0, p**exponents[i]) with a p-power denominator.
    """

    prime: int
    exponents: tuple
    entries: tuple

    @property
    def dimension(self) -> int:
        return len(self.exponents)

    def columns(self):
        n = self.dimension
        return [[self.entries[i][j] for i in range(n)] for j in range(n)]

    def padic_entries(self, k: int = DEFAULT_PRECISION):
        return as_padic_matrix(self.entries, self.prime, k)

    def as_lists(self):
        return [[_plain(x) for x in row] for row in self.entries]


def _plain(x: Fraction):
    return int(x) if x.denominator == 1 else str(x)


def canonicalize(generators, p: int | None = None, k: int = DEFAULT_PRECISION) -> TriangularBasis:
    """Column-style Hermite reduction over Z_p.

    Pivot in each row (bottom to top) is the entry of minimal valuation among
    the columns not yet used, ties to the lowest column index.
    """
    if p is None:
        p = next(x.prime for row in generators for x in row if isinstance(x, PadicScalar))
    A = as_padic_matrix(generators, p, k)
    n = len(A)
    exps = [0] * n
    for r in range(n - 1, -1, -1):
        live = [(A[r][c], c) for c in range(r + 1)]
        nonzero = [(x.valuation, c) for x, c in live if not x.is_zero]
        if not nonzero:
            raise SingularInput(f"row {r} vanishes to working precision; determinant is zero")
        vmin, cpiv = min(nonzero)
        for x, c in live:
            if x.is_zero and x.precision < vmin:
                raise InsufficientPrecision(
                    f"pivot choice in row {r} depends on digits beyond p^{x.precision}"
                )
        if cpiv != r:
            for row in A:
                row[cpiv], row[r] = row[r], row[cpiv]
        piv = A[r][r]
        scale = piv.unit_part().inverse()
        for i in range(n):
            A[i][r] = A[i][r] * scale
        piv = A[r][r]
        for c in range(r):
            # zero markers are eliminated too so their uncertainty propagates
            f = A[r][c] / piv
            for i in range(r):
                A[i][c] = A[i][c] - f * A[i][r]
            A[r][c] = PadicScalar.zero(p, k)
        exps[r] = vmin
    # off-diagonal reduction: entry (i, j) modulo the diagonal of row i, bottom-up within a column
    out = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        out[j][j] = Fraction(p) ** exps[j]
        for i in range(j - 1, -1, -1):
            x = A[i][j]
            rep = x.reduce_mod(exps[i])
            if x.is_zero and x.precision < exps[i]:
                raise InsufficientPrecision(f"entry ({i},{j}) known only mod p^{x.precision}")
            quot = (x - PadicScalar.from_fraction(rep, p, k)) / PadicScalar.power_of_p(p, exps[i], k)
            if not quot.is_zero and quot.valuation < 0:
                raise InsufficientPrecision("reduction quotient is not integral")
            for ii in range(i):
                A[ii][j] = A[ii][j] - quot * A[ii][i]
            out[i][j] = rep
    return TriangularBasis(p, tuple(exps), tuple(tuple(row) for row in out))


def lattice_index(L: TriangularBasis) -> Fraction:
    """[Z_p^N : L] for a sublattice L."""
    if any(e < 0 for e in L.exponents):
        raise NotSublattice(f"diagonal exponents {L.exponents} include a negative entry")
    for row in L.entries:
        for x in row:
            if x.denominator % L.prime == 0:
                raise NotSublattice("an off-diagonal entry is not p-integral")
    return Fraction(L.prime) ** sum(L.exponents)


@dataclass(frozen=True)
class CosetPiece:
    """The set representative . GL_M(Z_p) inside Q_p^{M^2}."""

    representative: tuple

    @classmethod
    def of(cls, M, p: int, k: int = DEFAULT_PRECISION) -> CosetPiece:
        return cls(tuple(tuple(row) for row in as_padic_matrix(M, p, k)))

    @property
    def dimension(self) -> int:
        return len(self.representative)

    @property
    def prime(self) -> int:
        return self.representative[0][0].prime

    def det_valuation(self) -> int:
        return sum(canonicalize([list(r) for r in self.representative], self.prime).exponents)

    def canonical(self) -> TriangularBasis:
        return canonicalize([list(r) for r in self.representative], self.prime)


def haar_coset_measure(A: CosetPiece) -> Fraction:
    """|det A|^M, the measure of A.GL_M(Z_p) normalised so that GL_M(Z_p) itself counts as 1."""
    v = A.det_valuation()
    return Fraction(A.prime) ** (-A.dimension * v)


def _rational_inverse(M):
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise SingularInput("matrix is singular")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def _vp_fraction(q: Fraction, p: int) -> int | None:
    if q == 0:
        return None
    v, num, den = 0, q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _int_det(M) -> int:
    n = len(M)
    if n == 0:
        return 1
    total = 0
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = -1 if inversions % 2 else 1
        for i in range(n):
            term *= M[i][perm[i]]
        total += term
    return total


def residue_count_oracle(A: CosetPiece, k: int, budget: int = ORACLE_BUDGET) -> Fraction:
    """Fraction of residue matrices mod p^k that lie in A.GL_M(Z_p), by exhaustive count.

    X mod p^k lies in A.GL_M(Z_p) iff A^-1 X is integral with unit determinant;
    this is decided by X mod p^k once p^k A^-1 has entries divisible by p.
    Every one of the p^(k M^2) residue matrices is tested; the test for the
    last column is vectorised.
    """
    p, M = A.prime, A.dimension
    total = p ** (k * M * M)
    if total > budget:
        raise BudgetExceeded(f"{total} residue matrices exceed the budget {budget}")
    rat = [[x.to_fraction() for x in row] for row in A.representative]
    Ainv = _rational_inverse(rat)
    vals = [_vp_fraction(x, p) for row in Ainv for x in row]
    s = max(0, max(-v for v in vals if v is not None))
    if k < s + 1:
        raise InputError(f"precision k={k} too small: need k >= {s + 1} so residues decide membership")
    mod = p ** (s + 1)
    C = np.zeros((M, M), dtype=np.int64)
    for i in range(M):
        for j in range(M):
            x = Ainv[i][j] * Fraction(p) ** s
            C[i, j] = x.numerator * pow(x.denominator, -1, mod) % mod
    q = p**k
    # every residue column vector, its image C x mod p^(s+1), integrality and reduction mod p
    cols = np.indices((q,) * M).reshape(M, -1)
    Y = (C @ cols) % mod
    integral = np.all(Y % p**s == 0, axis=0)
    red = (Y // p**s) % p
    ncols = cols.shape[1]
    count = 0
    for head in np.ndindex(*(ncols,) * (M - 1)):
        if not all(integral[h] for h in head):
            continue
        # det is linear in the last column: sum_i cofactor_i * y_last[i]
        first = [[int(red[i, h]) for h in head] for i in range(M)]
        cof = []
        for i in range(M):
            minor = [row for r, row in enumerate(first) if r != i]
            cof.append((-1) ** (i + M - 1) * _int_det(minor) % p)
        det = np.zeros(ncols, dtype=np.int64)
        for i in range(M):
            det = (det + cof[i] * red[i]) % p
        count += int(np.count_nonzero(integral & (det != 0)))
    return Fraction(count, total)


def gl_volume(M: int, p: int, k: int, budget: int = ORACLE_BUDGET) -> Fraction:
    """Measure of GL_M(Z_p), obtained from the residue oracle at the identity."""
    ident = CosetPiece.of([[int(i == j) for j in range(M)] for i in range(M)], p)
    return residue_count_oracle(ident, k, budget)


def encode_torsor(e: TriangularBasis, h, k: int = DEFAULT_PRECISION) -> TriangularBasis:
    """Code the coset h + p*e as the lattice spanned by (h, 1) and p*e (+) 0 in dimension n+1."""
    p, n = e.prime, e.dimension
    if len(h) != n:
        raise InputError("representative vector has the wrong length")
    cols = [[p * x for x in col] + [0] for col in e.columns()]
    hv = [x.to_fraction() if isinstance(x, PadicScalar) else Fraction(x) for x in h]
    cols.append(hv + [1])
    M = [[cols[j][i] for j in range(n + 1)] for i in range(n + 1)]
    return canonicalize(M, p, k)


def count_via_integral(pieces) -> int:
    """Sum over disjoint pieces D' = B_1.GL x ... x B_s.GL of the integral of p^-(g_1+...+g_s).

    Each piece integrates to exactly 1, so the result counts the pieces.
    """
    seen = set()
    total = Fraction(0)
    for piece in pieces:
        key = tuple((B.dimension, B.canonical()) for B in piece)
        if key in seen:
            raise InputError("pieces are not disjoint: two share every coset factor")
        seen.add(key)
        contribution = Fraction(1)
        for B in piece:
            mu = haar_coset_measure(B)
            g = -B.dimension * B.det_valuation()  # log_p(|det B|^M)
            contribution *= mu * Fraction(B.prime) ** (-g)
        total += contribution
    if total.denominator != 1:
        raise AssertionError(f"integral {total} is not an integer")
    return int(total)
