"""Finite-index subgroups of finite quotients: enumeration by canonical good
bases, counting variants, a brute-force oracle and the precision protocol.

Subgroups of a relator quotient G_k/N are handled as the subgroups of G_k
containing N; indices agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, InputError, NoStabilization, UnsupportedVariant
from .malcev import FiniteQuotient, MalcevPresentation, Subgroup, closure

ENUM_BUDGET = 10**7
FINGERPRINT_ELEMENT_LIMIT = 2**12
BRUTE_FORCE_LIMIT = 2**10
ISO_BUDGET_EXP = 4
STABILIZE_EXTRA = 3

VARIANTS = ("all", "normal", "conjugacy", "quotient-iso", "twist")
UNSUPPORTED = {
    "c": "isomorphism of pro-p completions is out of scope",
    "e": "isomorphism of pro-p completions is out of scope",
    "completion-iso": "isomorphism of pro-p completions is out of scope",
}


class SubgroupHandle:
    """A subgroup H of a finite quotient Q, identified by its elements in Q.

    ``fingerprint`` is the sorted tuple of canonical element representatives
    when |Q| <= 2**12, else the canonical basis rows.
    """

    def __init__(self, parent: FiniteQuotient, subgroup: Subgroup | None = None, elements=None):
        self.parent = parent
        self.subgroup = subgroup
        self._elements = elements
        self._fp = None

    @property
    def canonical_basis(self):
        return None if self.subgroup is None else self.subgroup.rows

    @property
    def index(self) -> int:
        if self.subgroup is not None:
            return self.subgroup.index
        return self.parent.order // len(self._elements)

    @property
    def element_count(self) -> int:
        return self.parent.order // self.index

    def elements(self):
        """Canonical representatives in Q of the elements of H, sorted."""
        if self._elements is None:
            Q = self.parent
            self._elements = tuple(sorted({Q.canon(x) for x in self.subgroup.elements()}))
        return self._elements

    @property
    def fingerprint(self):
        if self._fp is None:
            if self.subgroup is None or self.parent.order <= FINGERPRINT_ELEMENT_LIMIT:
                self._fp = ("elements", self.elements())
            else:
                self._fp = ("basis", self.subgroup.rows)
        return self._fp

    def __eq__(self, other):
        return isinstance(other, SubgroupHandle) and self.fingerprint == other.fingerprint

    def __hash__(self):
        return hash(self.fingerprint)

    def __repr__(self):
        return f"SubgroupHandle(index={self.index}, basis={self.canonical_basis})"


def _tail_subgroup(Q, rows):
    return Subgroup(Q, rows)


def iter_subgroups(Q: FiniteQuotient, n: int, budget: int = ENUM_BUDGET, containing: Subgroup | None = None):
    """Yield every subgroup of G_k containing N with index p**n, as a canonical Subgroup.

    Rows are chosen from the bottom of the coordinate series upwards. At each
    level the rows chosen so far form H meet N_i; a new row is kept only if its
    relative-order power and its conjugates of the tail rows sift into the tail.
    ``containing`` (a subgroup containing N) restricts to overgroups of it.
    """
    p, k, R = Q.p, Q.k, Q.R
    if n < 0 or n > R * k:
        return
    N = Q.relator_subgroup if containing is None else containing
    cap = list(N.exps) if N is not None else [k] * R
    n_rows = N.rows if N is not None else (None,) * R
    nodes = [0]

    def extend(i, rows, tail: Subgroup, used):
        if i < 0:
            if used == n:
                yield tail
            return
        for e in range(min(cap[i], n - used), -1, -1):
            if used + e + k * i < n:
                break
            if e == k:
                if n_rows[i] is not None:
                    continue
                new_rows = list(rows)
                new_rows[i] = None
                yield from extend(i - 1, new_rows, _tail_subgroup(Q, new_rows), used + e)
                continue
            ranges = []
            for j in range(i + 1, R):
                ranges.append(p ** tail.exps[j])
            total = 1
            for r in ranges:
                total *= r
            for idx in range(total):
                nodes[0] += 1
                if nodes[0] > budget:
                    raise BudgetExceeded(f"subgroup enumeration exceeded {budget} candidates")
                x = [0] * R
                x[i] = p**e
                rem = idx
                for off, r in enumerate(reversed(ranges)):
                    j = R - 1 - off
                    x[j] = rem % r
                    rem //= r
                x = tuple(x)
                if not _consistent(Q, x, tail, k - e):
                    continue
                new_rows = list(rows)
                new_rows[i] = x
                cand = _tail_subgroup(Q, new_rows)
                if n_rows[i] is not None and n_rows[i] not in cand:
                    continue
                yield from extend(i - 1, new_rows, cand, used + e)

    yield from extend(R - 1, [None] * R, _tail_subgroup(Q, [None] * R), 0)


def _consistent(Q, x, tail: Subgroup, rel_exp: int) -> bool:
    xi = Q.inv(x)
    mul = Q.mul
    for t in tail.pcgs():
        if mul(mul(xi, t), x) not in tail:
            return False
    return Q.power(x, Q.p**rel_exp) in tail


def enumerate_subgroups(Q: FiniteQuotient, n: int, budget: int = ENUM_BUDGET) -> set:
    if Q.p**n > Q.order:
        raise InputError(f"index p^{n} exceeds |Q| = {Q.order}")
    return {SubgroupHandle(Q, H) for H in iter_subgroups(Q, n, budget)}


def count_subgroups(Q: FiniteQuotient, n: int, budget: int = ENUM_BUDGET) -> int:
    return sum(1 for _ in iter_subgroups(Q, n, budget))


def _as_subgroup(H) -> Subgroup:
    return H.subgroup if isinstance(H, SubgroupHandle) else H


def is_normal(H) -> bool:
    S = _as_subgroup(H)
    Q = S.Q
    for g in Q.generators():
        gi = Q.inv(g)
        for h in S.pcgs():
            if Q.mul(Q.mul(g, h), gi) not in S:
                return False
    return True


def normal_subgroups(Q: FiniteQuotient, n: int, budget: int = ENUM_BUDGET):
    return [H for H in iter_subgroups(Q, n, budget) if is_normal(H)]


def conjugate_subgroup(S: Subgroup, g) -> Subgroup:
    Q = S.Q
    gi = Q.inv(g)
    return closure(Q, [Q.mul(Q.mul(g, h), gi) for h in S.pcgs()])


def conjugacy_orbits(subgroups) -> list:
    """Partition subgroups into conjugacy classes; orbits in first-seen order."""
    subgroups = [_as_subgroup(H) for H in subgroups]
    if not subgroups:
        return []
    Q = subgroups[0].Q
    gens = Q.generators()
    seen = set()
    orbits = []
    for S in subgroups:
        if S in seen:
            continue
        orbit = [S]
        seen.add(S)
        frontier = [S]
        while frontier:
            T = frontier.pop()
            for g in gens:
                U = conjugate_subgroup(T, g)
                if U not in seen:
                    seen.add(U)
                    orbit.append(U)
                    frontier.append(U)
        orbits.append(orbit)
    return orbits


def conjugacy_classes(Q: FiniteQuotient, n: int, budget: int = ENUM_BUDGET) -> int:
    return len(conjugacy_orbits(list(iter_subgroups(Q, n, budget))))


# ---------------------------------------------------------------- small groups


class SmallGroup:
    """A finite group given by its multiplication table on 0..m-1 (0 is the identity)."""

    def __init__(self, table):
        self.table = np.asarray(table, dtype=np.int64)
        self.m = len(self.table)
        if self.m and any(self.table[0, j] != j for j in range(self.m)):
            raise InputError("element 0 must be the identity")
        self.inv = np.argmin(self.table, axis=1)  # row x holds 0 exactly at x^-1

    @classmethod
    def from_quotient(cls, Q: FiniteQuotient, H: Subgroup) -> SmallGroup:
        """Q/H for a normal subgroup H, on the canonical coset transversal."""
        reps = H.transversal()
        index = {x: i for i, x in enumerate(reps)}
        table = [[index[H.coset_rep(Q.mul(x, y))] for y in reps] for x in reps]
        return cls(table)

    def mul(self, a, b):
        return int(self.table[a, b])

    def element_orders(self):
        orders = []
        for x in range(self.m):
            o, y = 1, x
            while y:
                y = int(self.table[y, x])
                o += 1
            orders.append(o)
        return orders

    def generated(self, gens) -> set:
        out = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = int(self.table[x, g])
                if y not in out:
                    out.add(y)
                    frontier.append(y)
        return out

    def commutator_subgroup(self) -> set:
        comms = {int(self.table[self.table[self.inv[a], self.inv[b]], self.table[a, b]]) for a in range(self.m) for b in range(self.m)}
        return self.generated(sorted(comms))

    def center_order(self) -> int:
        t = self.table
        return sum(1 for a in range(self.m) if np.array_equal(t[a], t[:, a]))

    def class_count(self) -> int:
        seen = set()
        count = 0
        for x in range(self.m):
            if x in seen:
                continue
            count += 1
            for g in range(self.m):
                seen.add(int(self.table[self.table[g, x], self.inv[g]]))
        return count

    def invariants(self):
        orders = self.element_orders()
        return (
            self.m,
            tuple(sorted(orders)),
            len(self.commutator_subgroup()),
            self.center_order(),
            self.class_count(),
        )

    def minimal_generators(self):
        """Generators independent modulo the Frattini subgroup (p-groups)."""
        if self.m == 1:
            return []
        p = min(d for d in range(2, self.m + 1) if self.m % d == 0)
        powers = set()
        for x in range(self.m):
            y = 0
            for _ in range(p):
                y = int(self.table[y, x])
            powers.add(y)
        frat = self.generated(sorted(powers | self.commutator_subgroup()))
        orders = self.element_orders()
        gens = []
        span = frat
        for x in sorted(range(self.m), key=lambda z: (-orders[z], z)):
            if x not in span:
                gens.append(x)
                span = self.generated(sorted(frat) + gens)
                if len(span) == self.m:
                    break
        return gens


def is_isomorphic(G1: SmallGroup, G2: SmallGroup) -> bool:
    """Backtracking search for an isomorphism defined on a minimal generating set."""
    if G1.m != G2.m:
        return False
    if G1.invariants() != G2.invariants():
        return False
    gens = G1.minimal_generators()
    o1, o2 = G1.element_orders(), G2.element_orders()
    choices = [[y for y in range(G2.m) if o2[y] == o1[g]] for g in gens]

    def extend(images):
        if len(images) == len(gens):
            return _extends_to_iso(G1, G2, gens, images)
        for y in choices[len(images)]:
            if y in images:
                continue
            if extend(images + [y]):
                return True
        return False

    return extend([])


def _extends_to_iso(G1, G2, gens, images) -> bool:
    phi = {0: 0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for g, y in zip(gens, images):
            xg = int(G1.table[x, g])
            val = int(G2.table[phi[x], y])
            old = phi.get(xg)
            if old is None:
                phi[xg] = val
                frontier.append(xg)
            elif old != val:
                return False
    return len(phi) == G1.m and len(set(phi.values())) == G1.m


def iso_classes(groups) -> list:
    """Representatives of the isomorphism classes among ``groups``."""
    reps = []
    for G in groups:
        if not any(is_isomorphic(G, R) for R in reps):
            reps.append(G)
    return reps


def quotient_iso_count(Q: FiniteQuotient, n: int, budget_exp: int = ISO_BUDGET_EXP, budget: int = ENUM_BUDGET) -> int:
    """Number of isomorphism types among Q/H, H normal of index p**n."""
    if n > budget_exp:
        raise BudgetExceeded(f"quotients of order p^{n} exceed the iso-test budget p^{budget_exp}")
    quotients = [SmallGroup.from_quotient(Q, H) for H in normal_subgroups(Q, n, budget)]
    return len(iso_classes(quotients))


# ---------------------------------------------------------------- brute force


def cayley_table(Q: FiniteQuotient, limit: int = BRUTE_FORCE_LIMIT):
    if Q.order > limit:
        raise BudgetExceeded(f"|Q| = {Q.order} exceeds the brute-force bound {limit}")
    elems = Q.elements()
    index = {x: i for i, x in enumerate(elems)}
    table = np.array([[index[Q.canon(Q.mul(x, y))] for y in elems] for x in elems], dtype=np.int64)
    return elems, table


def brute_force_all_subgroups(Q: FiniteQuotient, limit: int = BRUTE_FORCE_LIMIT) -> set:
    """Every subgroup of Q, built layer by layer: each subgroup S of order p*m
    is <M, x> for a maximal subgroup M of S and any x in S \\ M."""
    elems, table = cayley_table(Q, limit)
    m = len(elems)
    ident = elems.index(Q.canon(Q.identity))
    inv = np.argmax(table == ident, axis=1)
    p = Q.p
    pow_p = np.full(m, ident)
    for _ in range(p):
        pow_p = table[pow_p, np.arange(m)]
    # conj[x, h] = x h x^-1
    conj = table[table, inv[:, None]]

    trivial = np.zeros(m, dtype=bool)
    trivial[ident] = True
    found = {trivial.tobytes(): (trivial, [])}
    layer = [(trivial, [])]
    while layer:
        nxt = {}
        for M, gens in layer:
            members = np.flatnonzero(M)
            cand = M[pow_p] & ~M
            for g in gens:
                cand &= M[conj[:, g]]
            covered = M.copy()
            for x in np.flatnonzero(cand):
                if covered[x]:
                    continue
                S = M.copy()
                y = x
                while not S[y]:
                    S[table[y, members]] = True
                    y = table[y, x]
                covered |= S
                key = S.tobytes()
                if key not in found and key not in nxt:
                    nxt[key] = (S, gens + [int(x)])
        found.update(nxt)
        layer = list(nxt.values())
    return {SubgroupHandle(Q, elements=tuple(elems[i] for i in np.flatnonzero(S))) for S, _ in found.values()}


# ---------------------------------------------------------------- counting protocol


def count_at_precision(pres: MalcevPresentation, p: int, k: int, n: int, variant: str, budget: int = ENUM_BUDGET) -> int:
    Q = FiniteQuotient(pres, p, k)
    if variant == "all":
        return count_subgroups(Q, n, budget)
    if variant == "normal":
        return len(normal_subgroups(Q, n, budget))
    if variant == "conjugacy":
        return conjugacy_classes(Q, n, budget)
    if variant == "quotient-iso":
        return quotient_iso_count(Q, n, budget=budget)
    if variant == "twist":
        from .characters import count_twist_isoclasses

        return count_twist_isoclasses(Q, n, budget=budget)
    raise InputError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def check_variant(variant: str):
    if variant in UNSUPPORTED:
        raise UnsupportedVariant(f"variant {variant!r}: {UNSUPPORTED[variant]}")
    if variant not in VARIANTS:
        raise InputError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


@dataclass
class StableCount:
    value: int
    precision: int
    history: list = field(default_factory=list)


def initial_precision(pres: MalcevPresentation, n: int, buffer: int | None = None) -> int:
    return max(1, n + (pres.nil_class if buffer is None else buffer))


def stabilized_count(pres: MalcevPresentation, p: int, n: int, variant: str = "all", buffer: int | None = None,
                     extra: int = STABILIZE_EXTRA, budget: int = ENUM_BUDGET, counter=None) -> StableCount:
    """The count at precision k, accepted once it equals the count at k+1.

    ``counter(pres, p, k, n, variant)`` replaces the direct computation (used for caching).
    """
    check_variant(variant)
    if counter is None:
        def counter(pres, p, k, n, variant):
            return count_at_precision(pres, p, k, n, variant, budget)
    k = initial_precision(pres, n, buffer)
    prev = counter(pres, p, k, n, variant)
    history = [(k, prev)]
    for _ in range(extra):
        cur = counter(pres, p, k + 1, n, variant)
        history.append((k + 1, cur))
        if cur == prev:
            return StableCount(prev, k, history)
        k, prev = k + 1, cur
    raise NoStabilization(f"{variant} count at n={n} never stabilised: {history}")
