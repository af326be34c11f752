from __future__ import annotations

import random

import pytest

from apgcone import (
    derive_chains,
    germ_multiplicities,
    intersection_numbers,
    smooth_flag_multiplicities,
)

from conftest import random_chain_graph, single_point_graph


def vec(mult, chain, k=None):
    pts = chain.points if k is None else chain.points[:k]
    return tuple(mult[p] for p in pts)


def test_fix_a_curvette_vectors(fix_a):
    s = derive_chains(fix_a)
    nu1, nu2, _ = s.chains
    assert vec(germ_multiplicities(s, nu2, 3), nu2) == (2, 1, 1)
    assert vec(germ_multiplicities(s, nu2, 2), nu2, 2) == (1, 1)
    assert vec(germ_multiplicities(s, nu1, 2), nu1) == (1, 1)
    assert vec(germ_multiplicities(s, nu1, 1), nu1, 1) == (1,)


def test_fix_b_curvette_vector(fix_b):
    s = derive_chains(fix_b)
    chain = s.chains[0]
    assert vec(germ_multiplicities(s, chain, 16), chain) == (
        10, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 3, 2, 1, 1,
    )


def test_truncation_out_of_range(fix_a):
    s = derive_chains(fix_a)
    with pytest.raises(IndexError):
        germ_multiplicities(s, s.chains[0], 3)
    with pytest.raises(IndexError):
        germ_multiplicities(s, s.chains[0], 0)


def test_fix_a_flag_vectors(fix_a):
    s = derive_chains(fix_a)
    nu1, nu2, _ = s.chains
    assert vec(smooth_flag_multiplicities(s, nu2, "fiber"), nu2) == (1, 1, 0)
    assert vec(smooth_flag_multiplicities(s, nu1, "special_section"), nu1) == (0, 0)


def test_fix_b_flag_vectors(fix_b):
    s = derive_chains(fix_b)
    chain = s.chains[0]
    fiber = smooth_flag_multiplicities(s, chain, "fiber")
    assert fiber["p01"] == 1 and sum(fiber.values()) == 1
    with pytest.raises(ValueError):
        smooth_flag_multiplicities(s, chain, "bogus")


def test_fix_a_intersection_numbers(fix_a):
    s = derive_chains(fix_a)
    _, nu2, nu3 = s.chains
    assert (intersection_numbers(s, nu2, 3).a, intersection_numbers(s, nu2, 3).b) == (2, 3)
    assert (intersection_numbers(s, nu3, 2).a, intersection_numbers(s, nu3, 2).b) == (2, 1)


def test_fix_b_intersection_numbers(fix_b):
    s = derive_chains(fix_b)
    inter = intersection_numbers(s, s.chains[0], 16)
    assert (inter.a, inter.b) == (15, 10)


def test_single_unflagged_origin_intersections():
    s = derive_chains(single_point_graph())
    inter = intersection_numbers(s, s.chains[0], 1)
    assert (inter.a, inter.b) == (0, 1)


@pytest.mark.parametrize("seed", range(60))
def test_random_chain_recursion_properties(seed):
    rng = random.Random(seed)
    s = derive_chains(random_chain_graph(rng))
    chain = s.chains[0]
    n = len(chain.points)
    k = rng.randint(1, n)
    mult = germ_multiplicities(s, chain, k)
    prefix = chain.points[:k]
    assert mult[prefix[-1]] == 1
    assert all(m >= 1 for m in mult.values())
    # exact proximity equality at every earlier index
    for lam in range(k - 1):
        p = prefix[lam]
        total = sum(mult[q] for q in prefix if p in s.node[q].proximate_to)
        assert mult[p] == total
    # monotone in the truncation
    for k2 in range(k, n + 1):
        later = germ_multiplicities(s, chain, k2)
        assert all(later[p] >= m for p, m in mult.items())
    # Noether consistency of the local intersection numbers
    inter = intersection_numbers(s, chain, k)
    fiber = smooth_flag_multiplicities(s, chain, "fiber")
    assert inter.b == sum(m * fiber[p] for p, m in mult.items())
    if not s.satellites:
        assert set(mult.values()) == {1}
