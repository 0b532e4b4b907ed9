import random
from fractions import Fraction

import pytest

from nilzeta.characters import (
    InducedPair,
    abelianization,
    all_induced_pairs,
    character_from_values,
    conjugate_character,
    count_twist_isoclasses,
    derived_subgroup,
    distinct_irreducibles,
    full_group,
    induced_equal,
    irreducible_pairs,
    is_induced_irreducible,
    linear_characters,
    oracle_induced_table,
    oracle_inner,
    restrict,
    twist,
    twist_equivalent,
    twist_representatives,
)
from nilzeta.characters import _as_character, character_rows, induced_value_key, induced_value_keys, irreducible_mask
from nilzeta.errors import DegreeMismatch, InputError
from nilzeta.malcev import MalcevPresentation, build_quotient, closure, load_presentation
from nilzeta.subgroups import iter_subgroups

HEIS = load_presentation("heisenberg")


@pytest.fixture(scope="module")
def G27():
    return build_quotient(HEIS, 3, 1)


def bc(Q):
    return closure(Q, [(0, 1, 0), (0, 0, 1)])


def ac(Q):
    return closure(Q, [(1, 0, 0), (0, 0, 1)])


def central(Q, H, j):
    """Character of an abelian H = <x, c> that is trivial on x and sends c to j/p."""
    q = Q.p ** (Q.R * Q.k)
    vals = [0] * len(H.pcgs())
    vals[[i for i, r in enumerate(H.pcgs()) if r == (0, 0, 1)][0]] = j * q // Q.p
    return character_from_values(H, vals)


def commutator_oracle(Q, H):
    """[H,H] as an element set, by closing all commutators under multiplication."""
    els = H.elements()
    comms = {Q.mul(Q.mul(Q.inv(x), Q.inv(y)), Q.mul(x, y)) for x in els for y in els}
    seen = set(comms) | {Q.identity}
    frontier = list(seen)
    while frontier:
        x = frontier.pop()
        for c in comms:
            y = Q.mul(x, c)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


def test_abelianization_examples(G27):
    Q = G27
    G = full_group(Q)
    ab = abelianization(G)
    assert ab.invariants == (1, 1)
    assert len(commutator_oracle(Q, G)) == 3
    H = bc(Q)
    assert abelianization(H).invariants == (1, 1)
    assert len(commutator_oracle(Q, H)) == 1
    Z = build_quotient(load_presentation("z2"), 2, 3)
    assert sum(abelianization(full_group(Z)).invariants) == 6
    assert len(derived_subgroup(Q).elements()) == 3


def test_linear_characters_examples(G27):
    chars = linear_characters(full_group(G27))
    assert len(chars) == 9
    assert any(c.is_trivial() for c in chars)
    triv = next(c for c in chars if c.is_trivial())
    assert all(triv(x) == 0 for x in G27.elements())
    Z = build_quotient(load_presentation("z1"), 3, 1)
    assert len(linear_characters(full_group(Z))) == 3


def test_linear_characters_are_homomorphisms():
    Q = build_quotient(HEIS, 2, 2)
    rng = random.Random(2)
    for n in range(3):
        for H in iter_subgroups(Q, n):
            els = H.elements()
            chars = linear_characters(H)
            assert len(chars) * len(commutator_oracle(Q, H)) == len(els)
            for chi in rng.sample(chars, min(4, len(chars))):
                for _ in range(10):
                    x, y = rng.choice(els), rng.choice(els)
                    assert chi(Q.mul(x, y)) % 1 == (chi(x) + chi(y)) % 1


def test_conjugate_character_examples(G27):
    Q = G27
    H = bc(Q)
    chi = central(Q, H, 1)
    # g in H, H abelian: unchanged
    assert conjugate_character((0, 1, 0), chi) == chi
    # central g
    assert conjugate_character((0, 0, 1), chi) == chi
    a_chi = conjugate_character((1, 0, 0), chi)
    assert a_chi.domain == H
    assert a_chi((0, 1, 0)) != chi((0, 1, 0))
    assert a_chi((0, 0, 1)) == chi((0, 0, 1))


def test_irreducibility_examples(G27):
    Q = G27
    for chi in linear_characters(full_group(Q)):
        assert is_induced_irreducible(chi)
    H = bc(Q)
    irr = InducedPair.of(central(Q, H, 1))
    red = InducedPair.of(central(Q, H, 0))
    assert irr.degree == 3
    assert is_induced_irreducible(irr)
    assert not is_induced_irreducible(red)
    assert oracle_inner(oracle_induced_table(irr), oracle_induced_table(irr)) == 1
    assert oracle_inner(oracle_induced_table(red), oracle_induced_table(red)) == 3


def test_induced_equal_examples(G27):
    Q = G27
    p1 = InducedPair.of(central(Q, bc(Q), 1))
    p2 = InducedPair.of(central(Q, ac(Q), 1))
    p3 = InducedPair.of(central(Q, ac(Q), 2))
    assert induced_equal(p1, p1)
    assert induced_equal(p1, p2)
    assert not induced_equal(p1, p3)
    t1, t2, t3 = (oracle_induced_table(x) for x in (p1, p2, p3))
    assert oracle_inner(t1, t2) == 1
    assert oracle_inner(t1, t3) == 0
    with pytest.raises(DegreeMismatch):
        induced_equal(p1, InducedPair.of(linear_characters(full_group(Q))[0]))


def test_twist_examples(G27):
    Q = G27
    G = full_group(Q)
    pair = InducedPair.of(central(Q, bc(Q), 1))
    triv = next(c for c in linear_characters(G) if c.is_trivial())
    assert twist(triv, pair) == pair
    for psi in linear_characters(G):
        tw = twist(psi, pair)
        assert tw.degree == pair.degree
        assert is_induced_irreducible(tw)
        assert induced_equal(tw, pair)
        assert twist_equivalent(pair, tw)
    with pytest.raises(InputError):
        twist(pair.chi, pair)


def test_twist_equivalence_heisenberg(G27):
    Q = G27
    H = bc(Q)
    p1 = InducedPair.of(central(Q, H, 1))
    p2 = InducedPair.of(central(Q, H, 2))
    assert not twist_equivalent(p1, p2)
    reps = [pr for pr in irreducible_pairs(Q, 1, modulo_twist=False)]
    classes = []
    for pr in reps:
        if not any(twist_equivalent(pr, c) for c in classes):
            classes.append(pr)
    assert len(classes) == 2


def relator_quotient():
    data = HEIS.to_dict()
    data["relators"] = [[3, 0, 0], [0, 0, 3]]
    return build_quotient(MalcevPresentation.from_dict(data), 3, 2)


@pytest.mark.parametrize("which", ["h2", "h3", "rel"])
def test_twist_equivalence_axioms_and_oracle(which):
    Q = {"h2": lambda: build_quotient(HEIS, 2, 1), "h3": lambda: build_quotient(HEIS, 3, 1), "rel": relator_quotient}[which]()
    G = full_group(Q)
    lin_g = linear_characters(G)
    pairs = [pr for pr in all_induced_pairs(Q) if is_induced_irreducible(pr)]
    by_degree = {}
    for pr in pairs:
        by_degree.setdefault(pr.degree, []).append(pr)
    for group in by_degree.values():
        tables = [oracle_induced_table(pr) for pr in group]
        n = len(group)
        rel = [[twist_equivalent(group[i], group[j]) for j in range(n)] for i in range(n)]
        for i in range(n):
            assert rel[i][i]
            for j in range(n):
                assert rel[i][j] == rel[j][i]
                if rel[i][j]:
                    assert all(rel[i][l] == rel[j][l] for l in range(n))
        # oracle: some twist of the first is equal to the second
        twisted = [[oracle_induced_table(twist(psi, pr)) for psi in lin_g] for pr in group]
        for i in range(n):
            for j in range(n):
                want = any(oracle_inner(t, tables[j]) == 1 for t in twisted[i])
                assert rel[i][j] == want


def test_twist_invariance_of_inner_products():
    Q = build_quotient(HEIS, 3, 1)
    G = full_group(Q)
    rng = random.Random(4)
    pairs = all_induced_pairs(Q)
    lin_g = linear_characters(G)
    for _ in range(30):
        s1, s2 = rng.choice(pairs), rng.choice(pairs)
        psi = rng.choice(lin_g)
        base = oracle_inner(oracle_induced_table(s1), oracle_induced_table(s2))
        tw = oracle_inner(oracle_induced_table(twist(psi, s1)), oracle_induced_table(twist(psi, s2)))
        assert base == tw


def test_twist_counts_examples():
    for name, p in [("heisenberg", 3), ("heisenberg", 2), ("z2", 2)]:
        Q = build_quotient(load_presentation(name), p, 3)
        assert count_twist_isoclasses(Q, 0) == 1
    assert count_twist_isoclasses(build_quotient(HEIS, 3, 2), 1) == 2
    assert count_twist_isoclasses(build_quotient(HEIS, 2, 4), 2) == 2
    assert count_twist_isoclasses(build_quotient(load_presentation("z2"), 3, 3), 1) == 0


def test_oracle_examples(G27):
    Q = G27
    reps = distinct_irreducibles(Q)
    degrees = sorted(pr.degree for pr in reps)
    assert degrees == [1] * 9 + [3] * 2
    assert sum(d * d for d in degrees) == 27
    triv = next(c for c in linear_characters(full_group(Q)) if c.is_trivial())
    t = oracle_induced_table(triv)
    assert all(v.canonical()[0] == 1 and not any(v.canonical()[1:]) for v in t.values.values())
    assert oracle_inner(t, t) == 1


def test_restrict_and_values(G27):
    Q = G27
    G = full_group(Q)
    H = bc(Q)
    for psi in linear_characters(G):
        r = restrict(psi, H)
        for x in H.elements():
            assert r(x) == psi(x)
        assert psi((0, 0, 1)) == 0
    chi = central(Q, H, 1)
    assert chi((0, 0, 1)) == Fraction(1, 3)
    with pytest.raises(InputError):
        chi((1, 0, 0))


@pytest.mark.parametrize("name,p,k", [("heisenberg", 2, 3), ("heisenberg", 3, 2), ("free_c2_r3", 2, 2)])
def test_vectorised_paths_match_scalar(name, p, k):
    Q = build_quotient(load_presentation(name), p, k)
    keys = derived_subgroup(Q).pcgs()
    for n in range(3):
        for H in iter_subgroups(Q, n):
            Y, e = character_rows(H, modulo_twist=False)
            chars = [_as_character(H, y, e) for y in Y]
            assert {c.values for c in chars} == {c.values for c in linear_characters(H)}
            mask = irreducible_mask(H, Y, e)
            vk = induced_value_keys(H, Y, e, keys)
            for chi, ok, key in zip(chars, mask, vk):
                assert bool(ok) == is_induced_irreducible(chi)
                assert key == induced_value_key(chi, keys)
            # twist representatives hit every coset of Res Lin(G) exactly once
            reps = twist_representatives(H)
            assert len(reps) * len({restrict(psi, H).values for psi in linear_characters(full_group(Q))}) == len(chars)


def test_abelian_normal_part():
    from nilzeta.characters import abelian_normal_part, central_part
    from nilzeta.subgroups import is_normal

    for name, p, k in [("heisenberg", 3, 2), ("free_c2_r3", 2, 2), ("z3", 2, 2), ("heisenberg_c", 2, 2)]:
        Q = build_quotient(load_presentation(name), p, k)
        A = abelian_normal_part(Q)
        assert is_normal(A) and A.contains_subgroup(central_part(Q))
        els = A.elements()
        for x in els[:20]:
            for y in els[:20]:
                assert Q.canon(Q.mul(x, y)) == Q.canon(Q.mul(y, x))


@pytest.mark.parametrize("name,p", [("heisenberg", 2), ("heisenberg", 3), ("free_c2_r3", 2), ("free_c2_r3", 3)])
def test_pruned_enumeration_reaches_every_class(name, p):
    pres = load_presentation(name)
    for n in range(3):
        Q = build_quotient(pres, p, n + 2)
        assert count_twist_isoclasses(Q, n) == count_twist_isoclasses(Q, n, prune=False)
    Q = build_quotient(pres, p, 1)
    assert sorted(x.degree for x in distinct_irreducibles(Q)) == sorted(
        x.degree for x in distinct_irreducibles(Q, prune=False)
    )


def test_radical_formula_for_free_class_two():
    # class 2 with central derived group: twist classes of degree p^n correspond to
    # characters of G' of exact order p^n, i.e. w in (Q_p/Z_p)^3 of order p^n
    pres = load_presentation("free_c2_r3")
    for p, nmax in [(2, 3), (3, 2)]:
        for n in range(1, nmax + 1):
            Q = build_quotient(pres, p, n + 2)
            assert count_twist_isoclasses(Q, n) == p ** (3 * n) - p ** (3 * (n - 1))
