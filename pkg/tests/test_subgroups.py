from collections import Counter
from itertools import product

import pytest

from nilzeta.errors import BudgetExceeded, InputError, UnsupportedVariant
from nilzeta.malcev import MalcevPresentation, build_quotient, closure, load_presentation
from nilzeta.subgroups import (
    SmallGroup,
    SubgroupHandle,
    brute_force_all_subgroups,
    cayley_table,
    check_variant,
    conjugacy_classes,
    conjugacy_orbits,
    count_at_precision,
    count_subgroups,
    enumerate_subgroups,
    is_isomorphic,
    is_normal,
    iter_subgroups,
    normal_subgroups,
    quotient_iso_count,
    stabilized_count,
)

HEIS = load_presentation("heisenberg")
Z1, Z2 = load_presentation("z1"), load_presentation("z2")


def hermite_count(p, n, d=2):
    """Number of index-p^n sublattices of Z_p^d from upper-triangular Hermite forms."""
    total = 0
    for exps in product(range(n + 1), repeat=d):
        if sum(exps) != n:
            continue
        # entry (i, j), j > i, ranges over residues mod p^exps[i]
        total += p ** sum(exps[i] * (d - 1 - i) for i in range(d))
    return total


def test_enumeration_examples():
    for p in (2, 3):
        Q = build_quotient(Z1, p, 3)
        assert [count_subgroups(Q, n) for n in range(4)] == [1, 1, 1, 1]
    Q = build_quotient(Z2, 2, 4)
    assert [count_subgroups(Q, n) for n in (1, 2, 3)] == [3, 7, 15]
    assert count_subgroups(build_quotient(HEIS, 2, 3), 1) == 3
    assert count_subgroups(build_quotient(HEIS, 3, 2), 1) == 4


@pytest.mark.parametrize("p", [2, 3])
def test_z2_matches_hermite_oracle(p):
    Q = build_quotient(Z2, p, 5)
    for n in range(5):
        assert count_subgroups(Q, n) == hermite_count(p, n)


@pytest.mark.parametrize(
    "name,p,k", [("z2", 2, 2), ("heisenberg", 2, 2), ("heisenberg", 3, 1), ("z1", 2, 3), ("heisenberg_c", 2, 2)]
)
def test_enumeration_matches_brute_force(name, p, k):
    Q = build_quotient(load_presentation(name), p, k)
    brute = brute_force_all_subgroups(Q)
    by_index = Counter(H.index for H in brute)
    n = 0
    while p**n <= Q.order:
        mine = enumerate_subgroups(Q, n)
        assert mine == {H for H in brute if H.index == p**n}
        assert len(mine) == by_index[p**n]
        n += 1
    assert sum(by_index.values()) == len(brute)


def test_brute_force_small_cases():
    assert len(brute_force_all_subgroups(build_quotient(Z1, 3, 1))) == 2
    with pytest.raises(BudgetExceeded):
        brute_force_all_subgroups(build_quotient(HEIS, 2, 4))


def test_index_is_product_of_diagonal():
    Q = build_quotient(HEIS, 2, 3)
    for n in range(4):
        for S in iter_subgroups(Q, n):
            assert S.index == 2**n == Q.p ** sum(S.exps)
            assert len(set(S.elements())) * S.index == Q.order


def test_fingerprints_are_element_sets():
    Q = build_quotient(HEIS, 2, 2)
    hs = list(enumerate_subgroups(Q, 2))
    fps = {H.fingerprint for H in hs}
    sets = {frozenset(H.elements()) for H in hs}
    assert len(fps) == len(sets) == len(hs)


def _brute_normal(Q, H, elems, table, index):
    hs = {index[x] for x in H.elements()}
    inv = {i: int((table[i] == index[Q.identity]).nonzero()[0][0]) for i in range(len(elems))}
    return all(table[table[g, h], inv[g]] in hs for g in range(len(elems)) for h in hs)


def test_is_normal_examples():
    Q = build_quotient(HEIS, 3, 1)
    for S in iter_subgroups(Q, 1):
        assert is_normal(S)
    assert not is_normal(closure(Q, [(1, 0, 0)]))
    assert is_normal(Q.full_group())
    elems, table = cayley_table(Q)
    index = {x: i for i, x in enumerate(elems)}
    for n in range(4):
        for S in iter_subgroups(Q, n):
            assert is_normal(S) == _brute_normal(Q, SubgroupHandle(Q, S), elems, table, index)


def test_conjugacy_examples():
    Q = build_quotient(Z2, 2, 3)
    assert conjugacy_classes(Q, 2) == count_subgroups(Q, 2)
    assert conjugacy_classes(build_quotient(HEIS, 2, 3), 1) == 3


def test_conjugacy_matches_element_orbits():
    Q = build_quotient(HEIS, 3, 1)
    elems, table = cayley_table(Q)
    index = {x: i for i, x in enumerate(elems)}
    ident = index[Q.identity]
    inv = [int((table[i] == ident).nonzero()[0][0]) for i in range(len(elems))]
    for n in range(4):
        subs = [frozenset(index[x] for x in SubgroupHandle(Q, S).elements()) for S in iter_subgroups(Q, n)]
        remaining = set(subs)
        orbits = 0
        while remaining:
            S = remaining.pop()
            orbit = {frozenset(int(table[table[g, h], inv[g]]) for h in S) for g in range(len(elems))}
            remaining -= orbit
            orbits += 1
        assert conjugacy_classes(Q, n) == orbits
        # singletons exactly on normal subgroups
        for orbit in conjugacy_orbits(list(iter_subgroups(Q, n))):
            assert (len(orbit) == 1) == is_normal(orbit[0])


ORDER_STATS = {
    # element-order multisets of the 2-generated groups of order 8 and below
    "C8": Counter({1: 1, 2: 1, 4: 2, 8: 4}),
    "C4xC2": Counter({1: 1, 2: 3, 4: 4}),
    "D4": Counter({1: 1, 2: 5, 4: 2}),
    "Q8": Counter({1: 1, 2: 1, 4: 6}),
}


def test_quotient_iso_examples():
    Q = build_quotient(load_presentation("free_c2_r2"), 2, 4)
    assert quotient_iso_count(Q, 1) == 1
    assert quotient_iso_count(Q, 2) == 2
    assert quotient_iso_count(Q, 3) == 4
    stats = set()
    for H in normal_subgroups(Q, 3):
        G = SmallGroup.from_quotient(Q, H)
        stats.add(tuple(sorted(Counter(G.element_orders()).items())))
    assert stats == {tuple(sorted(c.items())) for c in ORDER_STATS.values()}
    with pytest.raises(BudgetExceeded):
        quotient_iso_count(Q, 5)


def test_isomorphism_tester():
    Q = build_quotient(HEIS, 2, 3)
    D = [SmallGroup.from_quotient(Q, H) for H in normal_subgroups(Q, 3)]
    for G1 in D:
        assert is_isomorphic(G1, G1)
    # different order statistics are never isomorphic
    for G1 in D:
        for G2 in D:
            if sorted(G1.element_orders()) != sorted(G2.element_orders()):
                assert not is_isomorphic(G1, G2)


def test_counts_are_monotone():
    Q = build_quotient(HEIS, 3, 3)
    for n in range(4):
        b = count_subgroups(Q, n)
        assert len(normal_subgroups(Q, n)) <= b
        assert conjugacy_classes(Q, n) <= b


def test_stabilized_examples():
    for p in (2, 3):
        s = stabilized_count(Z1, p, 3, "all")
        assert s.value == 1
    assert count_at_precision(Z2, 2, 3, 2, "all") == count_at_precision(Z2, 2, 4, 2, "all") == 7
    s = stabilized_count(HEIS, 2, 2, "all")
    assert s.value == 19
    assert s.history[-1][1] == s.value and s.history[-2][1] == s.value


def test_variants_checked():
    for v in ("c", "e", "completion-iso"):
        with pytest.raises(UnsupportedVariant):
            check_variant(v)
    with pytest.raises(InputError):
        check_variant("bogus")


def test_budget():
    with pytest.raises(BudgetExceeded):
        list(iter_subgroups(build_quotient(HEIS, 3, 3), 3, budget=5))


def test_relator_quotient_subgroups_contain_relators():
    data = HEIS.to_dict()
    data["relators"] = [[3, 0, 0], [0, 0, 3]]
    Q = build_quotient(MalcevPresentation.from_dict(data), 3, 2)
    brute = brute_force_all_subgroups(Q)
    for n in range(5):
        assert enumerate_subgroups(Q, n) == {H for H in brute if H.index == 3**n}
