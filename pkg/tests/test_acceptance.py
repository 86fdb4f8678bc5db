"""End-to-end acceptance checks over the shipped presets and benchmarks.

Each test prints one verdict line so a full run reads as a checklist. The
slower tests compile hundreds of circuits; the whole module stays under a
minute on a laptop.
"""

import math
import time

import pytest

from modcc.bench import KINDS, generate_benchmark
from modcc.cost import CostWeights, combine
from modcc.partition import brute_force_partition, cut_weight, partition
from modcc.presets import SYSTEM_PRESETS, preset_system
from modcc.report import REPRODUCE_ROWS, run_reproduce_row
from modcc.search import SearchConfig, compile_circuit, compile_monolithic
from modcc.sim import MAX_SUPPORT, verify_equivalence

from test_cost import HAND_SETS, hand_total
from test_partition import path_graph, random_graph

BASELINE_MATRIX = [
    ("almaden2x1link", [("Cat", 35), ("Ising", 34), ("WState", 36), ("GHZ", 40)]),
    ("auckland3xchain", [("Cat", 65), ("Ising", 66), ("WState", 76), ("GHZ", 78)]),
    ("mixed2x2chain", [("Cat", 65), ("Ising", 66), ("WState", 76), ("GHZ", 78)]),
]


def _verdict(num: int, label: str, ok: bool) -> None:
    print(f"criterion {num} ({label}): {'pass' if ok else 'FAIL'}")


@pytest.fixture(scope="module")
def reproduce_runs():
    """Every reproduce row compiled once, with its wall-clock time."""
    return [(row,) + run_reproduce_row(row) for row in REPRODUCE_ROWS]


def _signature(res):
    return (
        res.compiled.gates,
        res.compiled.initial_mapping,
        res.compiled.final_mapping,
        res.fragments,
        res.iterations,
        res.trace,
        res.cost.total,
        res.assignment.chips,
        sorted(res.assignment.link_choice.items()),
    )


def test_criterion_1_structural_reproduction(reproduce_runs):
    """Inter-op counts match the published six-row structure within one op."""
    problems = []
    for row, res, secs in reproduce_runs:
        if row.group != "table1":
            continue
        inter = res.cost.s_inter
        if abs(inter - row.expected_inter) > row.tolerance:
            problems.append(
                f"{row.system}/{row.bench}: inter {inter} not within "
                f"{row.tolerance} of {row.expected_inter}"
            )
        if row.time_limit_s is not None and secs >= row.time_limit_s:
            problems.append(f"{row.system}/{row.bench}: {secs:.2f}s too slow")
    _verdict(1, "structural reproduction, six rows, one inter op tolerance", not problems)
    assert not problems, problems


def test_criterion_2_link_sweep(reproduce_runs):
    """GHZ(40) over 1 to 4 links: at most one inter op, never increasing."""
    sweep = [(row, res) for row, res, _ in reproduce_runs if row.group == "sweep"]
    inters = [res.cost.s_inter for _, res in sweep]
    problems = []
    if len(sweep) != 4:
        problems.append(f"expected 4 sweep rows, found {len(sweep)}")
    for (row, _), inter in zip(sweep, inters):
        if inter != row.expected_inter:
            problems.append(f"{row.system}: inter {inter} != {row.expected_inter}")
    if any(b > a for a, b in zip(inters, inters[1:])):
        problems.append(f"inter ops increase along the sweep: {inters}")
    for row, res in sweep:
        again, _ = run_reproduce_row(row)
        if again.compiled.gates != res.compiled.gates:
            problems.append(f"{row.system}: sweep row is not deterministic")
    _verdict(2, "link sweep monotone at one inter op", not problems)
    assert not problems, problems


def test_criterion_3_scale_bounds(reproduce_runs):
    """Hundreds-of-qubits rows stay under their inter-op and time budgets."""
    problems = []
    for row, res, secs in reproduce_runs:
        if row.group != "scale":
            continue
        if res.cost.s_inter > row.bound:
            problems.append(
                f"{row.system}/{row.bench}: inter {res.cost.s_inter} > {row.bound}"
            )
        if secs >= row.time_limit_s:
            problems.append(f"{row.system}/{row.bench}: {secs:.1f}s too slow")
    _verdict(3, "large instances within inter and time budgets", not problems)
    assert not problems, problems


def test_criterion_4_cost_model_agreement():
    """combine() reproduces ten hand-computed totals to 1e-12."""
    worst = 0.0
    for row in HAND_SETS:
        alpha, beta, gamma, delta, s_on, s_inter, depth, d_ns, se, ga = row
        weights = CostWeights(alpha=alpha, beta=beta, gamma=gamma, delta=delta)
        bd = combine(weights, s_on, s_inter, depth, d_ns, se, ga)
        worst = max(worst, abs(bd.total - hand_total(row)))
    worked = combine(CostWeights(), 3, 2, {"a": 10}, 660.0, 0.08, 0.03)
    ok = worst <= 1e-12 and round(worked.total, 2) == 37.33
    _verdict(4, "cost totals match hand-computed values to 1e-12", ok)
    assert worst <= 1e-12
    assert round(worked.total, 2) == 37.33


def test_criterion_5_equivalence_matrix():
    """Every family, size, and seed on every simulable fixture is unitary-exact."""
    fixtures = [
        name
        for name in SYSTEM_PRESETS
        if preset_system(name).total_capacity <= MAX_SUPPORT
    ]
    assert fixtures, "no preset is small enough to simulate"
    worst = 1.0
    count = 0
    mismatches = []
    for name in fixtures:
        sys = preset_system(name)
        for kind in KINDS:
            for n in (4, 6, 8, 10):
                circ = generate_benchmark(kind, n)
                for seed in range(20):
                    res = compile_circuit(circ, sys, SearchConfig(seed=seed))
                    overlap = verify_equivalence(circ, res.compiled)
                    count += 1
                    worst = min(worst, overlap)
                    if abs(overlap - 1.0) > 1e-9:
                        mismatches.append(f"{name}/{kind}:{n}/seed{seed} {overlap}")
    ok = not mismatches
    _verdict(5, f"equivalence 1.0 within 1e-9 over {count} compiles", ok)
    assert ok, mismatches[:5]
    assert count == len(fixtures) * len(KINDS) * 4 * 20


def test_criterion_6_partition_quality():
    """Heuristic cut within 2x of brute force; path graphs cut exactly k-1."""
    problems = []
    for seed in range(100):
        n = 4 + seed % 7
        k = 2 if seed % 2 == 0 else 3
        caps = [math.ceil(n / k)] * k
        g = random_graph(n, seed)
        got = cut_weight(g, partition(g, k, caps))
        best = cut_weight(g, brute_force_partition(g, k, caps))
        if got > 2 * best:
            problems.append(f"seed {seed}: cut {got} > 2x optimum {best}")
    for n, k in [(6, 2), (8, 2), (9, 3), (10, 2), (12, 3), (20, 4)]:
        g = path_graph(n)
        caps = [math.ceil(n / k)] * k
        if cut_weight(g, partition(g, k, caps)) != k - 1:
            problems.append(f"path({n}) into {k} parts did not cut exactly {k - 1}")
    _verdict(6, "partitions within 2x of optimum, paths exact", not problems)
    assert not problems, problems


def test_criterion_7_determinism(reproduce_runs):
    """Traces never increase; repeats and thread counts change nothing."""
    problems = []
    for row, res, _ in reproduce_runs:
        trace = res.trace
        if any(b > a for a, b in zip(trace, trace[1:])):
            problems.append(f"{row.system}/{row.bench}: trace increases")
        base = _signature(res)
        for _ in range(4):
            again, _ = run_reproduce_row(row)
            if _signature(again) != base:
                problems.append(f"{row.system}/{row.bench}: repeat run differs")
                break
        threaded, _ = run_reproduce_row(row, jobs=8)
        if _signature(threaded) != base:
            problems.append(f"{row.system}/{row.bench}: jobs=8 differs from jobs=1")
    _verdict(7, "monotone traces, identical repeats, jobs-invariant", not problems)
    assert not problems, problems


def test_criterion_8_fidelity_vs_monolithic():
    """Fragmented compilation beats flat routing on most of the 12-cell matrix."""
    wins = 0
    cells = 0
    detail = []
    for sys_name, rows in BASELINE_MATRIX:
        sys = preset_system(sys_name)
        for kind, n in rows:
            circ = generate_benchmark(kind, n)
            res = compile_circuit(circ, sys)
            _, mono = compile_monolithic(circ, sys)
            cells += 1
            won = res.cost.fidelity_proxy >= mono.fidelity_proxy
            wins += won
            detail.append(
                f"{sys_name}/{kind}:{n} pipe={res.cost.fidelity_proxy:.4f} "
                f"mono={mono.fidelity_proxy:.4f} {'win' if won else 'loss'}"
            )
    ok = cells == 12 and wins >= 10
    _verdict(8, f"fidelity at least matches the flat baseline on {wins}/{cells}", ok)
    assert cells == 12
    assert wins >= 10, detail
