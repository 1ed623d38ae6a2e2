"""Stabilizer chains, sampling, and small-group oracles.

The chain implementation is checked against breadth-first closure, which
never looks at transversals, and against textbook group orders.
"""

import itertools
import math
import random

import pytest
from scipy import stats

from permzk.engine import (
    BudgetExceeded,
    GeneratingSet,
    build_chain,
    centralizer_in_sym,
    centralizer_order_in_sym,
    conjugate_set,
    enumerate_elements,
    format_generating_set,
    generating_tuples,
    group_equal,
    group_profile,
    parse_generating_set,
    random_generating_tuple,
    symmetric_group,
)
from permzk.perm import Permutation

ALPHA = 1e-3


def gset(degree, *texts):
    return parse_generating_set(";".join(texts), degree)


def test_generating_set_validation():
    with pytest.raises(ValueError):
        GeneratingSet(0)
    with pytest.raises(ValueError):
        GeneratingSet(3, (Permutation([2, 1]),))
    with pytest.raises(ValueError):
        GeneratingSet(3, ("2 1 3",))


def test_canonical_drops_identities_and_duplicates():
    a = gset(3, "2 1 3", "1 2 3", "2 1 3", "2 3 1")
    assert a.canonical().gens == (Permutation([2, 1, 3]), Permutation([2, 3, 1]))


def test_conjugate_set_is_elementwise():
    a = gset(3, "2 1 3")
    v = Permutation([2, 3, 1])
    assert conjugate_set(a, v).gens == (Permutation([2, 1, 3]).conjugated_by(v),)


def test_format_parse_round_trip():
    a = gset(4, "2 1 3 4", "2 3 4 1")
    assert parse_generating_set(format_generating_set(a), 4).gens == a.gens
    assert parse_generating_set("", 5).gens == ()
    with pytest.raises(ValueError):
        parse_generating_set("2 1 3", 4)


KNOWN_ORDERS = [
    (gset(1, ""), 1),
    (gset(3, "2 3 1"), 3),
    (gset(4, "2 1 3 4", "2 3 4 1"), 24),     # S_4
    (gset(4, "2 3 1 4", "1 3 4 2"), 12),     # A_4
    (gset(4, "2 3 4 1", "2 1 4 3"), 8),      # D_4
    (gset(4, "2 1 4 3", "3 4 1 2"), 4),      # Klein four
    (gset(6, "2 3 4 5 6 1"), 6),             # C_6
    (gset(5, "2 3 4 5 1", "2 1 3 4 5"), 120),  # S_5
]


@pytest.mark.parametrize("a,order", KNOWN_ORDERS)
def test_known_group_orders(a, order):
    assert build_chain(a).order() == order


def test_symmetric_group_constructor():
    for m in (1, 2, 3, 5, 7):
        assert build_chain(symmetric_group(m)).order() == math.factorial(m)


def test_contains_matches_enumeration_exhaustively():
    a = gset(4, "2 3 1 4", "1 3 4 2")  # A_4
    chain = build_chain(a)
    members = set(enumerate_elements(chain))
    assert len(members) == chain.order() == 12
    for img in itertools.permutations(range(1, 5)):
        p = Permutation(img)
        assert chain.contains(p) == (p in members)


def test_strip_is_identity_exactly_on_members():
    chain = build_chain(gset(4, "2 3 4 1", "2 1 4 3"))
    for p in enumerate_elements(chain):
        assert chain.strip(p).is_identity()
    outside = Permutation([2, 3, 1, 4])
    assert not chain.strip(outside).is_identity()
    with pytest.raises(ValueError):
        chain.contains(Permutation([2, 1]))


def test_base_points_are_moved_points():
    chain = build_chain(gset(4, "2 1 3 4", "2 3 4 1"))
    assert chain.base_points() == (1, 2, 3)
    # order = product of transversal sizes along the chain
    assert chain.order() == 24


def test_stabilizer_chain_deep_generator_orbits():
    # a generator fixing the first base point must still grow the first
    # orbit through words that pass below and come back
    a = gset(5, "1 3 2 4 5", "2 1 3 4 5", "1 2 4 5 3")
    chain = build_chain(a)
    enum = enumerate_elements(chain, cap=10_000)
    assert chain.order() == len(enum)
    for p in enum:
        assert chain.contains(p)


def test_random_element_trivial_group():
    chain = build_chain(gset(3, ""))
    rng = random.Random(0)
    for _ in range(5):
        assert chain.random_element(rng).is_identity()


def test_random_element_uniform_on_c3():
    chain = build_chain(gset(3, "2 3 1"))
    rng = random.Random(42)
    counts = {p: 0 for p in enumerate_elements(chain)}
    n = 3000
    for _ in range(n):
        counts[chain.random_element(rng)] += 1
    assert stats.chisquare(list(counts.values())).pvalue > ALPHA


def test_random_element_covers_s4():
    chain = build_chain(gset(4, "2 1 3 4", "2 3 4 1"))
    rng = random.Random(7)
    seen = {chain.random_element(rng) for _ in range(2000)}
    assert len(seen) == 24


def test_random_generating_tuple_trivial_group():
    gt = random_generating_tuple(gset(4, ""), 3, random.Random(0))
    assert gt.attempts == 1
    assert all(p.is_identity() for p in gt.perms)


def test_random_generating_tuple_generates():
    a = gset(4, "2 1 3 4", "2 3 4 1")
    rng = random.Random(3)
    for _ in range(20):
        gt = random_generating_tuple(a, 16, rng)
        assert build_chain(GeneratingSet(4, gt.perms)).order() == 24
        assert gt.k == 16


def test_random_generating_tuple_budget():
    # k=1 from S_4 can only generate a cyclic subgroup
    with pytest.raises(BudgetExceeded):
        random_generating_tuple(gset(4, "2 1 3 4", "2 3 4 1"), 1, random.Random(0), max_attempts=8)


def test_random_generating_tuple_uniform_on_c3_pairs():
    # G(C_3, 2) has 8 members: every pair except (identity, identity)
    a = gset(3, "2 3 1")
    tuples = generating_tuples(a, 2)
    assert len(tuples) == 8
    rng = random.Random(11)
    counts = {t: 0 for t in tuples}
    for _ in range(4000):
        counts[random_generating_tuple(a, 2, rng).perms] += 1
    assert stats.chisquare(list(counts.values())).pvalue > ALPHA


def test_generating_tuples_klein_four():
    # two distinct involutions are needed: 3*3 - 3 = 6 ordered pairs
    a = gset(4, "2 1 4 3", "3 4 1 2")
    assert len(generating_tuples(a, 2, cap=100)) == 6


def test_enumerate_elements_counts_and_cap():
    assert len(enumerate_elements(build_chain(gset(3, "2 3 1")))) == 3
    chain = build_chain(gset(4, "2 1 3 4", "2 3 4 1"))
    els = enumerate_elements(chain)
    assert len(els) == len(set(els)) == 24
    assert els[0].is_identity()
    with pytest.raises(BudgetExceeded):
        enumerate_elements(chain, cap=10)


def test_order_equals_enumeration_length():
    rng = random.Random(5)
    for _ in range(20):
        m = rng.randrange(3, 7)
        gens = tuple(
            Permutation(rng.sample(range(1, m + 1), m)) for _ in range(rng.randrange(1, 3))
        )
        chain = build_chain(GeneratingSet(m, gens))
        assert chain.order() == len(enumerate_elements(chain, cap=10_000))


def test_group_equal():
    c3_a = gset(3, "2 3 1")
    c3_b = gset(3, "3 1 2")
    assert group_equal(c3_a, c3_b)
    assert not group_equal(c3_a, gset(3, "2 1 3"))
    # different generating sets of S_4
    assert group_equal(gset(4, "2 1 3 4", "2 3 4 1"), gset(4, "2 1 3 4", "1 3 2 4", "1 2 4 3"))


def test_group_profile_invariant_and_distinguishing():
    c3 = build_chain(gset(3, "2 3 1"))
    assert group_profile(c3) == ((1, 1, 1), (3,), (3,))
    # conjugation cannot change the profile
    v = Permutation([3, 1, 2])
    assert group_profile(build_chain(gset(3, "2 3 1").conjugated_by(v))) == group_profile(c3)
    # same order, different profile
    a = build_chain(gset(6, "2 1 3 4 5 6"))
    b = build_chain(gset(6, "2 1 4 3 5 6"))
    assert a.order() == b.order() == 2
    assert group_profile(a) != group_profile(b)
    assert group_profile(build_chain(symmetric_group(7)), cap=100) is None


def test_centralizer_in_sym_brute_force():
    # every element of S_5 with assorted cycle types
    for images in ([2, 1, 3, 4, 5], [2, 3, 1, 4, 5], [2, 1, 4, 3, 5], [2, 3, 4, 5, 1], [1, 2, 3, 4, 5]):
        x = Permutation(images)
        chain = build_chain(centralizer_in_sym(x))
        assert chain.order() == centralizer_order_in_sym(x)
        brute = [
            p
            for p in (Permutation(i) for i in itertools.permutations(range(1, 6)))
            if p * x == x * p
        ]
        assert len(brute) == chain.order()
        assert all(chain.contains(p) for p in brute)
