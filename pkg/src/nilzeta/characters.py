"""Monomial characters of finite quotients: linear characters of subgroups,
Mackey tests for irreducibility and equality of induced characters, twisting
by linear characters of the whole group, twist-isoclass counting, and a
cyclotomic oracle that recomputes induced characters element by element.

A linear character of H (killing N) is stored by its values on H's pcgs,
as integers y_j with chi(h_j) = y_j / p**E mod 1, where E = R*k bounds
every element order in G_k.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, DegreeMismatch, InputError, InvariantViolation
from .exactp import CycloSum, cyclo_canonical_terms, cyclo_inner_reduce
from .malcev import FiniteQuotient, Subgroup, closure
from .modlin import KernelBasis, quotient_representative_array, solve
from .subgroups import ENUM_BUDGET, SubgroupHandle, iter_subgroups

ORACLE_BUDGET_FACTOR = 8  # oracle accepts |G| <= p^4 * 8


def char_exponent(Q: FiniteQuotient) -> int:
    return Q.R * Q.k


def _cache(Q: FiniteQuotient) -> dict:
    c = getattr(Q, "_char_cache", None)
    if c is None:
        c = Q._char_cache = {}
    return c


def _sub(H) -> Subgroup:
    return H.subgroup if isinstance(H, SubgroupHandle) else H


def _relation_matrix(H: Subgroup):
    """Integer relations among H's pcgs: power, conjugation, and killing N."""
    Q = H.Q
    pc = H.pcgs()
    t = len(pc)
    rows = []
    for j, (h, o) in enumerate(zip(pc, H.relative_orders())):
        m = H.sift(Q.power(h, o))
        row = [-x for x in m]
        row[j] += o
        rows.append(row)
    for a in range(t):
        ia = Q.inv(pc[a])
        for b in range(a + 1, t):
            m = H.sift(Q.mul(Q.mul(ia, pc[b]), pc[a]))
            row = [-x for x in m]
            row[b] += 1
            rows.append(row)
    if Q.relator_subgroup is not None:
        for r in Q.relator_subgroup.pcgs():
            m = H.sift(r)
            if m is None:
                raise InputError("subgroup does not contain the relator subgroup")
            rows.append(list(m))
    return rows


def character_group(H) -> KernelBasis:
    """Lin(H/N) in pcgs-value coordinates."""
    H = _sub(H)
    cache = _cache(H.Q)
    key = ("lin", H.rows)
    if key not in cache:
        cache[key] = KernelBasis(_relation_matrix(H), len(H.pcgs()), H.Q.p, char_exponent(H.Q))
    return cache[key]


@dataclass(frozen=True)
class AbelianBasis:
    generators: tuple  # elements of H
    order_exponents: tuple  # generator s has order p**order_exponents[s]
    coordinates: tuple  # rows of exponent vectors over H's pcgs

    @property
    def invariants(self):
        return tuple(sorted(self.order_exponents))


def abelianization(H) -> AbelianBasis:
    """Basis of H/[H,H]N with the orders of its generators, via Smith form of the pcgs relations."""
    from .modlin import smith

    H = _sub(H)
    Q = H.Q
    E = char_exponent(Q)
    rel = _relation_matrix(H)
    t = len(H.pcgs())
    if t == 0:
        return AbelianBasis((), (), ())
    if rel:
        S = smith(rel, Q.p, E)
        vals, Vinv = S.vals, S.Vinv
    else:
        vals, Vinv = [], [[int(i == j) for j in range(t)] for i in range(t)]
    gens, orders, coords = [], [], []
    for s in range(t):
        e = vals[s] if s < len(vals) else E
        if e == 0:
            continue
        gens.append(H.word(Vinv[s]))
        orders.append(e)
        coords.append(tuple(Vinv[s]))
    return AbelianBasis(tuple(gens), tuple(orders), tuple(coords))


@dataclass(frozen=True)
class LinearCharacter:
    domain: Subgroup
    values: tuple  # chi(h_j) = values[j] / p**E

    @property
    def Q(self) -> FiniteQuotient:
        return self.domain.Q

    @property
    def E(self) -> int:
        return char_exponent(self.domain.Q)

    def raw(self, x) -> int:
        """p**E * chi(x) mod p**E."""
        m = self.domain.sift(x)
        if m is None:
            raise InputError(f"{x} is not in the domain of the character")
        return sum(a * b for a, b in zip(m, self.values)) % self.Q.p**self.E

    def __call__(self, x) -> Fraction:
        return Fraction(self.raw(x), self.Q.p**self.E)

    @property
    def exponents(self) -> tuple:
        """chi on the abelianization basis, as exponents j_s with chi(g_s) = j_s / p**m_s."""
        ab = abelianization(self.domain)
        out = []
        for g, e in zip(ab.generators, ab.order_exponents):
            out.append(self.raw(g) // self.Q.p ** (self.E - e))
        return tuple(out)

    def is_trivial(self) -> bool:
        return not any(self.values)

    def __mul__(self, other: LinearCharacter) -> LinearCharacter:
        if other.domain != self.domain:
            raise InputError("characters on different subgroups")
        q = self.Q.p**self.E
        return LinearCharacter(self.domain, tuple((a + b) % q for a, b in zip(self.values, other.values)))


def character_from_values(H, values) -> LinearCharacter:
    H = _sub(H)
    q = H.Q.p ** char_exponent(H.Q)
    return LinearCharacter(H, tuple(int(v) % q for v in values))


def linear_characters(H) -> list:
    H = _sub(H)
    return [LinearCharacter(H, tuple(y)) for y in character_group(H).elements()]


def restrict(psi: LinearCharacter, H) -> LinearCharacter:
    H = _sub(H)
    return LinearCharacter(H, tuple(psi.raw(h) for h in H.pcgs()))


def conjugate_character(g, chi: LinearCharacter) -> LinearCharacter:
    """g.chi on gHg^-1, with (g.chi)(g h g^-1) = chi(h)."""
    Q = chi.Q
    g = getattr(g, "coords", g)
    K = chi.domain.conjugate(g)
    gi = Q.inv(g)
    return LinearCharacter(K, tuple(chi.raw(Q.mul(Q.mul(gi, r), g)) for r in K.pcgs()))


@dataclass(frozen=True)
class InducedPair:
    H: Subgroup
    chi: LinearCharacter

    @property
    def degree(self) -> int:
        return self.H.index

    @classmethod
    def of(cls, chi: LinearCharacter) -> InducedPair:
        return cls(chi.domain, chi)


def full_group(Q: FiniteQuotient) -> Subgroup:
    cache = _cache(Q)
    if "full" not in cache:
        cache["full"] = Q.full_group()
    return cache["full"]


def _group_characters(Q) -> KernelBasis:
    return character_group(full_group(Q))


# ---------------------------------------------------------------- double cosets


def _double_cosets(H: Subgroup, K: Subgroup):
    """Orbits of K on the left cosets G/H: [(g, schreier generators of K meet gHg^-1)]."""
    Q = H.Q
    cache = _cache(Q)
    key = ("dc", H.rows, K.rows)
    if key in cache:
        return cache[key]
    mul, inv = Q.mul, Q.inv
    gens = K.pcgs()
    seen = set()
    out = []
    for g in H.transversal():
        if g in seen:
            continue
        u = {g: Q.identity}
        seen.add(g)
        frontier = [g]
        schreier = set()
        while frontier:
            pt = frontier.pop()
            for s in gens:
                q = H.coset_rep(mul(s, pt))
                su = mul(s, u[pt])
                if q not in u:
                    u[q] = su
                    seen.add(q)
                    frontier.append(q)
                else:
                    y = mul(inv(u[q]), su)
                    if y != Q.identity:
                        schreier.add(y)
        out.append((g, sorted(schreier)))
    cache[key] = out
    return out


def _mackey_data(H: Subgroup, K: Subgroup):
    """Per double coset g: rows a_s = sift_H(g^-1 s g), b_s = sift_K(s), w_s = Lin(G) basis at s."""
    Q = H.Q
    cache = _cache(Q)
    key = ("mk", H.rows, K.rows)
    if key in cache:
        return cache[key]
    G = full_group(Q)
    lin_g = _group_characters(Q)
    out = []
    for g, gens in _double_cosets(H, K):
        gi = Q.inv(g)
        A, B, W = [], [], []
        for s in gens:
            A.append(H.sift(Q.mul(Q.mul(gi, s), g)))
            B.append(K.sift(s))
            ms = G.sift(s)
            W.append([sum(a * b for a, b in zip(ms, w)) for w in lin_g.gens])
        out.append((g, A, B, W))
    cache[key] = out
    return out


def _dot(m, y) -> int:
    return sum(a * b for a, b in zip(m, y))


def is_induced_irreducible(pair) -> bool:
    """Mackey: for every double coset HgH with g not in H, g.chi and chi differ on gHg^-1 meet H."""
    chi = pair.chi if isinstance(pair, InducedPair) else pair
    H = chi.domain
    q = H.Q.p**chi.E
    y = chi.values
    for g, A, B, _ in _mackey_data(H, H):
        if g == H.Q.identity:
            continue
        if all((_dot(a, y) - _dot(b, y)) % q == 0 for a, b in zip(A, B)):
            return False
    return True


def _pairs_args(pair1, pair2):
    c1 = pair1.chi if isinstance(pair1, InducedPair) else pair1
    c2 = pair2.chi if isinstance(pair2, InducedPair) else pair2
    if c1.domain.Q is not c2.domain.Q:
        raise InputError("pairs live in different quotients")
    if c1.domain.index != c2.domain.index:
        raise DegreeMismatch(f"degrees {c1.domain.index} and {c2.domain.index} differ")
    return c1, c2


def induced_equal(pair1, pair2) -> bool:
    """Ind chi1 = Ind chi2 iff some g has g.chi1 = chi2 on gH1g^-1 meet H2 (both irreducible)."""
    c1, c2 = _pairs_args(pair1, pair2)
    q = c1.Q.p**c1.E
    for _, A, B, _ in _mackey_data(c1.domain, c2.domain):
        if all((_dot(a, c1.values) - _dot(b, c2.values)) % q == 0 for a, b in zip(A, B)):
            return True
    return False


def twist(psi: LinearCharacter, pair) -> InducedPair:
    chi = pair.chi if isinstance(pair, InducedPair) else pair
    if psi.domain != full_group(chi.Q):
        raise InputError("twisting character must be defined on the whole group")
    return InducedPair(chi.domain, restrict(psi, chi.domain) * chi)


def twist_equivalent(pair1, pair2) -> bool:
    """Some twist of Ind chi1 by a linear character of G equals Ind chi2."""
    c1, c2 = _pairs_args(pair1, pair2)
    Q = c1.Q
    p, E = Q.p, c1.E
    q = p**E
    for _, A, B, W in _mackey_data(c1.domain, c2.domain):
        rhs = [(_dot(b, c2.values) - _dot(a, c1.values)) % q for a, b in zip(A, B)]
        if not any(rhs):
            return True
        # psi = sum c_t w_t with psi(s) = chi2(s) - (g.chi1)(s) on every Schreier generator
        if W[0] and solve(W, rhs, p, E) is not None:
            return True
    return False


# ---------------------------------------------------------------- enumeration


def _restriction_rows(H: Subgroup):
    """Restrictions of a basis of Lin(G) to H, in character_group(H) coordinates."""
    Q = H.Q
    lin_h = character_group(H)
    G = full_group(Q)
    rows = []
    for w in _group_characters(Q).gens:
        psi = LinearCharacter(G, tuple(w))
        rows.append(lin_h.coords([psi.raw(h) for h in H.pcgs()]))
    return rows


def _dtype(bound: int):
    return np.int64 if bound < 2**62 else object


def character_rows(H: Subgroup, modulo_twist: bool = True):
    """Characters of H as an array of reduced values, with its exponent e.

    Row y stands for chi(h_j) = y_j / p**e; with ``modulo_twist`` the rows are
    one representative per coset of Res Lin(G) in Lin(H).
    """
    Q = H.Q
    p, E = Q.p, char_exponent(Q)
    lin_h = character_group(H)
    orders = lin_h.orders
    t = len(H.pcgs())
    e = max(orders, default=0)
    if not orders:
        return np.zeros((1, t), dtype=np.int64), 0
    if modulo_twist:
        C = quotient_representative_array(_restriction_rows(H), len(orders), orders, p, E)
    else:
        C = np.indices([p**o for o in orders]).reshape(len(orders), -1).T
    dt = _dtype(len(orders) * p ** (2 * e))
    gens = np.array([[v // p ** (E - e) for v in g] for g in lin_h.gens], dtype=dt)
    return (C.astype(dt) @ gens) % p**e, e


def _as_character(H: Subgroup, y, e: int) -> LinearCharacter:
    Q = H.Q
    E = char_exponent(Q)
    scale = Q.p ** (E - e)
    return LinearCharacter(H, tuple(int(v) * scale % Q.p**E for v in y))


def twist_representatives(H: Subgroup):
    """Representatives of Lin(H) modulo restrictions of Lin(G)."""
    Y, e = character_rows(H)
    return [_as_character(H, y, e) for y in Y]


def irreducible_mask(H: Subgroup, Y, e: int) -> np.ndarray:
    """is_induced_irreducible for every row of a character array at once."""
    Q = H.Q
    mod = Q.p**e
    mask = np.ones(len(Y), dtype=bool)
    for g, A, B, _ in _mackey_data(H, H):
        if g == Q.identity:
            continue
        if not A:
            mask[:] = False
            break
        D = np.array([[(a - b) % mod for a, b in zip(ra, rb)] for ra, rb in zip(A, B)], dtype=Y.dtype)
        mask &= ((Y @ D.T) % mod).any(axis=1)
    return mask


def derived_subgroup(Q: FiniteQuotient) -> Subgroup:
    cache = _cache(Q)
    if "derived" not in cache:
        gens = Q.generators()
        comms = []
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                a, b = gens[i], gens[j]
                comms.append(Q.mul(Q.mul(Q.inv(a), Q.inv(b)), Q.mul(a, b)))
        extra = Q.relator_subgroup.pcgs() if Q.relator_subgroup is not None else None
        cache["derived"] = closure(Q, comms, normal=True, extra=extra)
    return cache["derived"]


def _conjugate_sifts(H: Subgroup, elements):
    """For each g: the sift vectors over H of t^-1 g t for transversal elements t with t^-1 g t in H."""
    Q = H.Q
    out = []
    trans = H.transversal()
    for g in elements:
        rows = []
        for t in trans:
            m = H.sift(Q.mul(Q.mul(Q.inv(t), g), t))
            if m is not None:
                rows.append(m)
        out.append(rows)
    return out


def induced_value_key(chi: LinearCharacter, elements) -> tuple:
    """Canonical cyclotomic values of Ind chi at the given elements."""
    Q = chi.Q
    E = chi.E
    out = []
    for rows in _conjugate_sifts(chi.domain, elements):
        terms = {}
        for m in rows:
            v = _dot(m, chi.values) % Q.p**E
            terms[v] = terms.get(v, 0) + 1
        out.append(cyclo_canonical_terms(terms, Q.p, E))
    return tuple(out)


def induced_value_keys(H: Subgroup, Y, e: int, elements) -> list:
    """induced_value_key for every row of a character array."""
    Q = H.Q
    p, E = Q.p, char_exponent(Q)
    scale = p ** (E - e)
    per_element = []
    for rows in _conjugate_sifts(H, elements):
        if not rows:
            per_element.append(None)
            continue
        M = np.array(rows, dtype=Y.dtype).reshape(len(rows), Y.shape[1])
        per_element.append((Y @ M.T) % p**e)
    keys = []
    for r in range(len(Y)):
        key = []
        for V in per_element:
            if V is None:
                key.append(())
                continue
            vals, counts = np.unique(V[r], return_counts=True)
            terms = {int(v) * scale: int(c) for v, c in zip(vals, counts)}
            key.append(cyclo_canonical_terms(terms, p, E))
        keys.append(tuple(key))
    return keys


def _abelian_mod_n(Q: FiniteQuotient, S: Subgroup) -> bool:
    N = Q.relator_subgroup
    pc = S.pcgs()
    for i in range(len(pc)):
        for j in range(i + 1, len(pc)):
            x, y = pc[i], pc[j]
            comm = Q.mul(Q.mul(Q.inv(x), Q.inv(y)), Q.mul(x, y))
            if (comm not in N) if N is not None else comm != Q.identity:
                return False
    return True


def central_part(Q: FiniteQuotient) -> Subgroup:
    """N together with the basis elements a_j that are central modulo N.

    Any H carrying an irreducible induced character contains Z(G), so H must
    contain this subgroup.
    """
    cache = _cache(Q)
    if "central" not in cache:
        gens = Q.generators()
        N = Q.relator_subgroup
        central = []
        for a in gens:
            ok = True
            for b in gens:
                comm = Q.mul(Q.mul(Q.inv(a), Q.inv(b)), Q.mul(a, b))
                if (comm not in N) if N is not None else comm != Q.identity:
                    ok = False
                    break
            if ok:
                central.append(a)
        extra = N.pcgs() if N is not None else None
        cache["central"] = closure(Q, central, extra=extra)
    return cache["central"]


def abelian_normal_part(Q: FiniteQuotient) -> Subgroup:
    """A normal subgroup A containing N and abelian modulo N, grown greedily from
    central_part by adding basis elements from the bottom of the series up.

    In a p-group every irreducible character is induced from a linear character
    of a subgroup containing any given abelian normal subgroup (induct on the
    inertia group of a non-homogeneous constituent of the restriction to a
    larger abelian normal subgroup), so enumeration may require H >= A.
    """
    cache = _cache(Q)
    if "abelian" not in cache:
        N = Q.relator_subgroup
        extra = N.pcgs() if N is not None else None
        A = central_part(Q)
        for a in reversed(Q.generators()):
            if a in A:
                continue
            B = closure(Q, A.pcgs() + [a], normal=True, extra=extra)
            if _abelian_mod_n(Q, B):
                A = B
        cache["abelian"] = A
    return cache["abelian"]


def _keyed_irreducibles(Q: FiniteQuotient, n: int, key_elements, budget: int, modulo_twist: bool, prune: bool):
    """[(pair, induced value key)] over irreducible pairs of degree p**n."""
    out = []
    containing = None
    if n > 0:
        containing = abelian_normal_part(Q) if prune else central_part(Q)
    for H in iter_subgroups(Q, n, budget, containing=containing):
        Y, e = character_rows(H, modulo_twist)
        Y = Y[irreducible_mask(H, Y, e)]
        if not len(Y):
            continue
        keys = induced_value_keys(H, Y, e, key_elements) if key_elements is not None else [None] * len(Y)
        for y, key in zip(Y, keys):
            out.append((InducedPair(H, _as_character(H, y, e)), key))
    return out


def irreducible_pairs(Q: FiniteQuotient, n: int, budget: int = ENUM_BUDGET, modulo_twist: bool = True,
                      prune: bool = True) -> list:
    """Irreducible (H, chi) with [G:H] = p**n; one chi per Lin(G)-coset when ``modulo_twist``.

    With ``prune`` only subgroups containing abelian_normal_part are used; this still
    reaches every irreducible character (and every twist class).
    """
    return [pr for pr, _ in _keyed_irreducibles(Q, n, None, budget, modulo_twist, prune)]


def _partition(keyed, same) -> list:
    buckets = {}
    reps = []
    for pr, key in keyed:
        bucket = buckets.setdefault(key, [])
        if not any(same(r, pr) for r in bucket):
            bucket.append(pr)
            reps.append(pr)
    return reps


def twist_class_representatives(Q: FiniteQuotient, n: int, budget: int = ENUM_BUDGET, prune: bool = True) -> list:
    keyed = _keyed_irreducibles(Q, n, derived_subgroup(Q).pcgs(), budget, True, prune)
    return _partition(keyed, twist_equivalent)


def count_twist_isoclasses(Q: FiniteQuotient, n: int, budget: int = ENUM_BUDGET, prune: bool = True) -> int:
    return len(twist_class_representatives(Q, n, budget, prune))


def distinct_irreducibles(Q: FiniteQuotient, budget: int = ENUM_BUDGET, prune: bool = True) -> list:
    """One induced pair per irreducible character of Q, all degrees."""
    reps = []
    n = 0
    while Q.p**n <= Q.order:
        keyed = _keyed_irreducibles(Q, n, Q.generators(), budget, False, prune)
        reps.extend(_partition(keyed, induced_equal))
        n += 1
    return reps


# ---------------------------------------------------------------- oracle


@dataclass
class ClassFunction:
    """Values of a class function: row i of ``table`` holds the group-ring
    coefficients (over p**m-th roots of unity) of the value at elements[i]."""

    quotient: FiniteQuotient
    elements: list
    m: int
    table: np.ndarray

    def value(self, g) -> CycloSum:
        i = self.elements.index(self.quotient.canon(tuple(g)))
        return CycloSum(self.quotient.p, self.m, tuple(int(c) for c in self.table[i]))

    @property
    def values(self) -> dict:
        return {g: self.value(g) for g in self.elements}


class _OracleContext:
    def __init__(self, Q: FiniteQuotient):
        limit = Q.p**4 * ORACLE_BUDGET_FACTOR
        if Q.order > limit:
            raise BudgetExceeded(f"|G| = {Q.order} exceeds the oracle budget {limit}")
        self.Q = Q
        self.elements = Q.elements()
        index = {x: i for i, x in enumerate(self.elements)}
        self.index = index
        # conj[x, g] = index of x g x^-1
        self.conj = np.array(
            [[index[Q.canon(Q.mul(Q.mul(x, g), Q.inv(x)))] for g in self.elements] for x in self.elements],
            dtype=np.int64,
        )
        exp = max(Q.element_order(x) for x in self.elements)
        m = 0
        while Q.p**m < exp:
            m += 1
        self.m = m


def _oracle(Q) -> _OracleContext:
    cache = _cache(Q)
    if "oracle" not in cache:
        cache["oracle"] = _OracleContext(Q)
    return cache["oracle"]


def oracle_induced_table(pair) -> ClassFunction:
    """Ind chi(g) = (1/|H|) sum over x in G with x g x^-1 in H of chi(x g x^-1)."""
    chi = pair.chi if isinstance(pair, InducedPair) else pair
    Q = chi.Q
    ctx = _oracle(Q)
    H = chi.domain
    p, m, E = Q.p, ctx.m, chi.E
    P = p**m
    size = len(ctx.elements)
    in_h = np.zeros(size, dtype=bool)
    val = np.zeros(size, dtype=np.int64)
    for i, x in enumerate(ctx.elements):
        r = H.sift(x)
        if r is not None:
            v = _dot(r, chi.values) % p**E
            if v % p ** (E - m):
                raise InvariantViolation("character value has order beyond the group exponent")
            in_h[i] = True
            val[i] = v // p ** (E - m)
    mask = in_h[ctx.conj]  # [x, g]
    vals = val[ctx.conj]
    table = np.zeros((size, P), dtype=np.int64)
    xs, gs = np.nonzero(mask)
    np.add.at(table, (gs, vals[xs, gs]), 1)
    h_order = Q.order // H.index
    if np.any(table % h_order):
        raise InvariantViolation("induced character sum is not divisible by |H|")
    return ClassFunction(Q, ctx.elements, m, table // h_order)


def oracle_inner(s1: ClassFunction, s2: ClassFunction) -> Fraction:
    """(1/|G|) sum_g s1(g) conj(s2(g)), reduced to a rational."""
    if s1.quotient is not s2.quotient or s1.m != s2.m:
        raise InputError("class functions on different groups")
    Q = s1.quotient
    P = Q.p**s1.m
    C = s1.table.T @ s2.table  # C[i, j]: coefficient of zeta^(i - j)
    diff = (np.arange(P)[:, None] - np.arange(P)[None, :]) % P
    coeffs = np.zeros(P, dtype=np.int64)
    np.add.at(coeffs, diff.ravel(), C.ravel())
    r = cyclo_inner_reduce(CycloSum(Q.p, s1.m, tuple(int(c) for c in coeffs)))
    if r is None:
        raise InvariantViolation("inner product of characters is not rational")
    r /= len(s1.elements)
    if r.denominator != 1:
        raise InvariantViolation(f"inner product {r} of characters is not an integer")
    return r


def all_induced_pairs(Q: FiniteQuotient, budget: int = ENUM_BUDGET) -> list:
    """Every (H, chi) with H a subgroup of p-power index and chi in Lin(H/N)."""
    pairs = []
    n = 0
    while Q.p**n <= Q.order:
        for H in iter_subgroups(Q, n, budget):
            pairs.extend(InducedPair(H, chi) for chi in linear_characters(H))
        n += 1
    return pairs


def mackey_oracle_report(Q: FiniteQuotient) -> dict:
    """Compare the Mackey tests with cyclotomic inner products on every pair (and every
    same-degree couple of irreducible pairs)."""
    pairs = all_induced_pairs(Q)
    tables = [oracle_induced_table(pr) for pr in pairs]
    irreducible = [is_induced_irreducible(pr) for pr in pairs]
    bad_irr = sum(irreducible[i] != (oracle_inner(tables[i], tables[i]) == 1) for i in range(len(pairs)))
    idx = [i for i in range(len(pairs)) if irreducible[i]]
    compared = bad_eq = 0
    for a in idx:
        for b in idx:
            if pairs[a].degree != pairs[b].degree:
                continue
            compared += 1
            if induced_equal(pairs[a], pairs[b]) != (oracle_inner(tables[a], tables[b]) == 1):
                bad_eq += 1
    return {
        "pairs": len(pairs),
        "irreducible_pairs": len(idx),
        "equality_tests": compared,
        "disagreements": bad_irr + bad_eq,
    }
