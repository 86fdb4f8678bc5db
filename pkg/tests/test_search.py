import math

import pytest

from conftest import path_system
from modcc.assemble import metrics
from modcc.bench import generate_benchmark
from modcc.errors import InfeasibleError, ValidationError
from modcc.ir import Circuit
from modcc.search import (
    FragmentAssignment,
    SearchConfig,
    balanced_capacities,
    compile_circuit,
    compile_monolithic,
    evaluate_candidate,
    generate_neighbors,
)


def two_chip(n=5, links=1):
    pairs = [(0, n - 1 - i, 1, i) for i in range(links)]
    return path_system([n, n], pairs)


def test_balanced_capacities():
    assert balanced_capacities([20, 20], 40) == [20, 20]
    assert balanced_capacities([20, 20], 21) == [11, 11]
    assert balanced_capacities([27, 27, 27], 66) == [22, 22, 22]
    with pytest.raises(InfeasibleError):
        balanced_capacities([4, 4], 9)


def test_neighbors_two_fragments_one_link():
    a = FragmentAssignment(("c0", "c1"), {(4, 5): "l0"})
    sys_ = two_chip()
    nbrs = generate_neighbors(a, sys_)
    assert len(nbrs) == 1
    assert nbrs[0].chips == ("c1", "c0")


def test_neighbors_parallel_links():
    sys_ = two_chip(links=4)
    a = FragmentAssignment(("c0", "c1"), {(4, 5): "l0"})
    nbrs = generate_neighbors(a, sys_)
    # One transposition plus three alternative links for the one cut edge.
    assert len(nbrs) == 4
    alt = {nb.link_choice.get((4, 5)) for nb in nbrs if nb.link_choice}
    assert alt == {"l1", "l2", "l3"}


def test_neighbors_k1_empty():
    sys_ = path_system([6], [])
    assert generate_neighbors(FragmentAssignment(("c0",)), sys_) == []


def test_config_validation():
    with pytest.raises(ValidationError):
        SearchConfig(max_iterations=0)
    with pytest.raises(ValidationError):
        SearchConfig(jobs=0)


def test_degenerate_single_chip():
    sys_ = path_system([20], [])
    res = compile_circuit(generate_benchmark("GHZ", 10), sys_, SearchConfig())
    m = metrics(res.compiled)
    assert m.s_inter == 0
    assert res.assignment.chips == ("c0",)


def test_trace_non_increasing_and_final_best():
    sys_ = two_chip(5, links=2)
    res = compile_circuit(generate_benchmark("Ising", 8), sys_, SearchConfig())
    assert all(b <= a for a, b in zip(res.trace, res.trace[1:]))
    assert res.trace[-1] == res.cost.total
    assert res.iterations >= 1


def test_repeat_runs_identical():
    sys_ = two_chip(5, links=2)
    c = generate_benchmark("Ising", 8)
    results = [compile_circuit(c, sys_, SearchConfig()) for _ in range(5)]
    first = results[0]
    for other in results[1:]:
        assert other.compiled.gates == first.compiled.gates
        assert other.cost.total == first.cost.total
        assert other.trace == first.trace
        assert other.assignment == first.assignment


def test_jobs_do_not_change_result():
    sys_ = two_chip(5, links=2)
    c = generate_benchmark("Ising", 8)
    seq = compile_circuit(c, sys_, SearchConfig(jobs=1))
    par = compile_circuit(c, sys_, SearchConfig(jobs=8))
    assert par.compiled.gates == seq.compiled.gates
    assert par.trace == seq.trace
    assert par.iterations == seq.iterations


def test_evaluate_candidate_deterministic():
    sys_ = two_chip()
    c = generate_benchmark("GHZ", 8)
    a = FragmentAssignment(("c0", "c1"))
    cc1, bd1 = evaluate_candidate(a, c, sys_)
    cc2, bd2 = evaluate_candidate(a, c, sys_)
    assert cc1.gates == cc2.gates
    assert bd1.total == bd2.total


def test_evaluate_candidate_rejects_wrong_link():
    sys_ = path_system(
        [4, 4, 4], [(0, 3, 1, 0), (1, 3, 2, 0)]
    )
    c = Circuit(8)
    for i in range(7):
        c.cx(i, i + 1)
    # With caps 4/4 the only single cut is (3, 4); l1 joins c1 and c2.
    a = FragmentAssignment(("c0", "c1"), {(3, 4): "l1"})
    with pytest.raises(ValidationError):
        evaluate_candidate(a, c, sys_)


def test_capacity_exceeded():
    sys_ = two_chip(4)
    with pytest.raises(InfeasibleError):
        compile_circuit(generate_benchmark("GHZ", 9), sys_, SearchConfig())


def test_iteration_budget_respected():
    sys_ = two_chip(5, links=4)
    res = compile_circuit(
        generate_benchmark("Ising", 8), sys_, SearchConfig(max_iterations=3)
    )
    assert res.iterations <= 3
    assert len(res.trace) == res.iterations


def test_monolithic_baseline_scores():
    sys_ = two_chip(5)
    c = generate_benchmark("GHZ", 8)
    cc, bd = compile_monolithic(c, sys_)
    assert bd.total > 0
    assert metrics(cc).s_inter >= 1
    assert math.isfinite(bd.fidelity_proxy)


def test_monolithic_capacity_check():
    sys_ = two_chip(4)
    with pytest.raises(InfeasibleError):
        compile_monolithic(generate_benchmark("GHZ", 9), sys_)
