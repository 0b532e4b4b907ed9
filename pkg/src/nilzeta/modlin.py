"""Smith normal form over Z/p^E and the few things built on it.

Z/p^E is a local principal ideal ring, so pivoting on an entry of minimal
valuation lets every other entry in its row and column be cleared exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np


def _val(a: int, p: int, cap: int) -> int:
    if a == 0:
        return cap
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


@dataclass
class Smith:
    """U @ M @ V == diag(p**v) (mod p**E), with Vinv the inverse of V."""

    p: int
    E: int
    U: list
    V: list
    Vinv: list
    vals: list  # pivot valuations, one per pivot, each < E
    nrows: int
    ncols: int

    @property
    def rank(self) -> int:
        return len(self.vals)


def smith(M, p: int, E: int) -> Smith:
    q = p**E
    m = len(M)
    t = len(M[0]) if m else 0
    A = [[x % q for x in row] for row in M]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(t)] for i in range(t)]
    Vinv = [[int(i == j) for j in range(t)] for i in range(t)]
    vals = []
    for s in range(min(m, t)):
        best = None
        for i in range(s, m):
            row = A[i]
            for j in range(s, t):
                if row[j]:
                    v = _val(row[j], p, E)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        if i != s:
            A[s], A[i] = A[i], A[s]
            U[s], U[i] = U[i], U[s]
        if j != s:
            for row in A:
                row[s], row[j] = row[j], row[s]
            for row in V:
                row[s], row[j] = row[j], row[s]
            Vinv[s], Vinv[j] = Vinv[j], Vinv[s]
        pv = p**v
        uinv = pow(A[s][s] // pv, -1, q)
        A[s] = [x * uinv % q for x in A[s]]
        U[s] = [x * uinv % q for x in U[s]]
        for i in range(s + 1, m):
            if A[i][s]:
                f = A[i][s] // pv
                A[i] = [(x - f * y) % q for x, y in zip(A[i], A[s])]
                U[i] = [(x - f * y) % q for x, y in zip(U[i], U[s])]
        for j in range(s + 1, t):
            if A[s][j]:
                f = A[s][j] // pv
                A[s][j] = 0
                for row in V:
                    row[j] = (row[j] - f * row[s]) % q
                Vinv[s] = [(x + f * y) % q for x, y in zip(Vinv[s], Vinv[j])]
        vals.append(v)
    return Smith(p, E, U, V, Vinv, vals, m, t)


def kernel_generators(M, ncols: int, p: int, E: int):
    """Generators (vector, order exponent) of {y : M y = 0 mod p^E}, as a direct sum."""
    q = p**E
    if not M:
        gens = []
        for s in range(ncols):
            gens.append(([int(i == s) for i in range(ncols)], E))
        return gens
    S = smith(M, p, E)
    gens = []
    for s in range(ncols):
        e = S.vals[s] if s < S.rank else E
        if e == 0:
            continue
        scale = p ** (E - e)
        gens.append(([S.V[i][s] * scale % q for i in range(ncols)], e))
    return gens


def solve(A, b, p: int, E: int):
    """A solution z of A z = b (mod p^E), or None."""
    q = p**E
    m = len(A)
    if m == 0:
        return []
    t = len(A[0])
    S = smith(A, p, E)
    c = [sum(u * x for u, x in zip(row, b)) % q for row in S.U]
    z1 = [0] * t
    for s in range(m):
        if s < S.rank:
            pv = p ** S.vals[s]
            if c[s] % pv:
                return None
            z1[s] = c[s] // pv
        elif c[s]:
            return None
    return [sum(S.V[i][s] * z1[s] for s in range(t)) % q for i in range(t)]


def quotient_representatives(rows, ncols: int, orders, p: int, E: int):
    """Coset representatives of  prod Z/p^orders[i]  modulo the span of ``rows``.

    Yields integer vectors, one per coset, in a deterministic order.
    """
    q = p**E
    relations = [list(r) for r in rows]
    for i, o in enumerate(orders):
        relations.append([p**o if j == i else 0 for j in range(ncols)])
    S = smith(relations, p, E)
    invariants = [S.vals[s] if s < S.rank else E for s in range(ncols)]
    for u in product(*[range(p**e) for e in invariants]):
        yield [sum(u[s] * S.Vinv[s][i] for s in range(ncols)) % q for i in range(ncols)]


def quotient_representative_array(rows, ncols: int, orders, p: int, E: int) -> np.ndarray:
    """The vectors of :func:`quotient_representatives` as rows of an array, in the
    same order, with coordinate i reduced mod p**orders[i]."""
    relations = [list(r) for r in rows]
    for i, o in enumerate(orders):
        relations.append([p**o if j == i else 0 for j in range(ncols)])
    S = smith(relations, p, E)
    invariants = [S.vals[s] if s < S.rank else E for s in range(ncols)]
    mods = [p**o for o in orders]
    big = ncols * max(mods, default=1) ** 2 >= 2**62
    dtype = object if big else np.int64
    grid = np.indices([p**e for e in invariants]).reshape(ncols, -1).T.astype(dtype)
    Vr = np.array([[S.Vinv[s][i] % mods[i] for i in range(ncols)] for s in range(ncols)], dtype=dtype)
    out = grid @ Vr if ncols else np.zeros((1, 0), dtype=dtype)
    return out % np.array(mods, dtype=dtype) if ncols else out


def quotient_order(rows, ncols: int, orders, p: int, E: int) -> int:
    relations = [list(r) for r in rows]
    for i, o in enumerate(orders):
        relations.append([p**o if j == i else 0 for j in range(ncols)])
    S = smith(relations, p, E)
    return p ** sum(S.vals[s] if s < S.rank else E for s in range(ncols))


class KernelBasis:
    """{y : M y = 0 mod p^E} as a direct sum of cyclic groups, with coordinates."""

    def __init__(self, M, ncols: int, p: int, E: int):
        self.p, self.E, self.ncols = p, E, ncols
        q = p**E
        if M:
            S = smith(M, p, E)
            V, Vinv, vals = S.V, S.Vinv, S.vals
        else:
            V = Vinv = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
            vals = []
        self._slots = []
        self.gens, self.orders = [], []
        for s in range(ncols):
            e = vals[s] if s < len(vals) else E
            if e == 0:
                continue
            self._slots.append((s, E - e))
            self.gens.append([V[i][s] * p ** (E - e) % q for i in range(ncols)])
            self.orders.append(e)
        self._Vinv = Vinv

    @property
    def size(self) -> int:
        return self.p ** sum(self.orders)

    def coords(self, y):
        """Coordinates of a kernel element; raises ValueError if y is not in the kernel."""
        q = self.p**self.E
        out = []
        for (s, shift), e in zip(self._slots, self.orders):
            z = sum(a * b for a, b in zip(self._Vinv[s], y)) % q
            if z % self.p**shift:
                raise ValueError("vector is not in the kernel")
            out.append(z // self.p**shift % self.p**e)
        return out

    def combine(self, coeffs):
        q = self.p**self.E
        y = [0] * self.ncols
        for c, g in zip(coeffs, self.gens):
            if c:
                y = [(a + c * b) % q for a, b in zip(y, g)]
        return y

    def elements(self):
        for coeffs in product(*[range(self.p**e) for e in self.orders]):
            yield self.combine(coeffs)
