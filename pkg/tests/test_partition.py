import random

import pytest

from modcc.errors import InfeasibleError, ValidationError
from modcc.ir import InteractionGraph
from modcc.partition import (
    brute_force_partition,
    cut_edges,
    cut_weight,
    partition,
)


def path_graph(n: int) -> InteractionGraph:
    g = InteractionGraph(n)
    for i in range(n - 1):
        g.add_interaction(i, i + 1)
    return g


def cycle_graph(n: int) -> InteractionGraph:
    g = path_graph(n)
    g.add_interaction(n - 1, 0)
    return g


def star_graph(leaves: int) -> InteractionGraph:
    g = InteractionGraph(leaves + 1)
    for leaf in range(1, leaves + 1):
        g.add_interaction(0, leaf)
    return g


def complete_graph(n: int) -> InteractionGraph:
    g = InteractionGraph(n)
    for u in range(n):
        for v in range(u + 1, n):
            g.add_interaction(u, v)
    return g


def random_graph(n: int, seed: int) -> InteractionGraph:
    rng = random.Random(seed)
    g = InteractionGraph(n)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.4:
                g.add_interaction(u, v, rng.randint(1, 4))
    return g


def assert_valid(fragments, n, caps):
    seen = sorted(q for frag in fragments for q in frag)
    assert seen == list(range(n))
    assert len(fragments) == len(caps)
    for frag, cap in zip(fragments, caps):
        assert len(frag) <= cap


def test_path_split_cuts_one_edge():
    frags = partition(path_graph(40), 2, [20, 20])
    assert_valid(frags, 40, [20, 20])
    assert cut_weight(path_graph(40), frags) == 1


def test_star_balanced_cut():
    frags = partition(star_graph(5), 2, [3, 3])
    assert_valid(frags, 6, [3, 3])
    assert cut_weight(star_graph(5), frags) == 3


def test_k1_identity():
    g = path_graph(5)
    frags = partition(g, 1, [5])
    assert frags == [[0, 1, 2, 3, 4]]
    assert cut_edges(g, frags) == []


def test_infeasible_capacities():
    with pytest.raises((InfeasibleError, ValidationError)):
        partition(path_graph(6), 2, [2, 2])


def test_brute_force_oracles():
    assert cut_weight(path_graph(6), brute_force_partition(path_graph(6), 2, [3, 3])) == 1
    assert cut_weight(cycle_graph(6), brute_force_partition(cycle_graph(6), 2, [3, 3])) == 2
    assert cut_weight(complete_graph(4), brute_force_partition(complete_graph(4), 2, [2, 2])) == 4


def test_brute_force_size_limit():
    with pytest.raises(ValidationError):
        brute_force_partition(path_graph(13), 2, [7, 7])


@pytest.mark.parametrize("n,k", [(6, 2), (8, 2), (9, 3), (12, 3), (20, 4)])
def test_path_graphs_exact(n, k):
    caps = [n // k + (1 if i < n % k else 0) for i in range(k)]
    frags = partition(path_graph(n), k, caps)
    assert_valid(frags, n, caps)
    assert cut_weight(path_graph(n), frags) == k - 1


def test_random_graphs_within_factor_two_of_optimum():
    for seed in range(30):
        n = 6 + seed % 5
        caps = [(n + 1) // 2, (n + 1) // 2]
        g = random_graph(n, seed)
        got = cut_weight(g, partition(g, 2, caps))
        best = cut_weight(g, brute_force_partition(g, 2, caps))
        assert got <= 2 * best, f"seed {seed}: {got} > 2x{best}"


def test_deterministic():
    g = random_graph(9, 7)
    a = partition(g, 3, [3, 3, 3])
    b = partition(g, 3, [3, 3, 3])
    assert a == b


def test_cut_edges_listing():
    g = path_graph(6)
    frags = [[0, 1, 2], [3, 4, 5]]
    assert cut_edges(g, frags) == [(2, 3, 1)]
