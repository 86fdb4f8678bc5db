import pytest

from conftest import path_system, random_circuit
from modcc.errors import InfeasibleError, ValidationError
from modcc.ir import Circuit
from modcc.router import (
    FINAL,
    INITIAL,
    BoundaryConstraint,
    route_fragment,
    validate_routed,
)


def chip(n: int = 5):
    return path_system([n], []).chips[0]


def test_matching_connectivity_needs_no_swaps():
    c = Circuit(4)
    c.h(0)
    c.cx(0, 1)
    c.cx(1, 2)
    c.cx(2, 3)
    routed = route_fragment(c, chip(4))
    assert routed.swap_count == 0
    assert validate_routed(c, routed, chip(4))["ok"]


def test_distance_two_costs_one_swap():
    c = Circuit(3)
    c.cx(0, 2)
    pins = [
        BoundaryConstraint(0, 0, INITIAL),
        BoundaryConstraint(1, 1, INITIAL),
        BoundaryConstraint(2, 2, INITIAL),
    ]
    routed = route_fragment(c, chip(3), pins)
    assert routed.swap_count == 1
    assert validate_routed(c, routed, chip(3))["ok"]


def test_final_pin_respected():
    c = Circuit(3)
    c.cx(0, 1)
    routed = route_fragment(c, chip(5), [BoundaryConstraint(2, 0, FINAL)])
    assert routed.final_mapping[2] == 0
    assert validate_routed(c, routed, chip(5))["ok"]


def test_initial_pin_respected():
    c = Circuit(2)
    c.cx(0, 1)
    routed = route_fragment(c, chip(5), [BoundaryConstraint(0, 4, INITIAL)])
    assert routed.initial_mapping[0] == 4
    assert validate_routed(c, routed, chip(5))["ok"]


def test_conflicting_pins_rejected():
    c = Circuit(2)
    pins = [
        BoundaryConstraint(0, 3, INITIAL),
        BoundaryConstraint(1, 3, INITIAL),
    ]
    with pytest.raises((ValidationError, InfeasibleError)):
        route_fragment(c, chip(5), pins)


def test_fragment_too_large_rejected():
    with pytest.raises((ValidationError, InfeasibleError)):
        route_fragment(Circuit(6), chip(5))


def test_unknown_phase_rejected():
    with pytest.raises(ValidationError):
        BoundaryConstraint(0, 0, "middle")


def test_mapping_permutation_consistency():
    for seed in range(8):
        c = random_circuit(5, 30, seed)
        routed = route_fragment(c, chip(5), None, seed=seed)
        report = validate_routed(c, routed, chip(5))
        assert report["ok"], report["issues"]


def test_determinism_under_seed():
    c = random_circuit(5, 25, 3)
    a = route_fragment(c, chip(5), None, seed=1)
    b = route_fragment(c, chip(5), None, seed=1)
    assert a.gates == b.gates
    assert a.initial_mapping == b.initial_mapping


def test_validator_flags_non_edge():
    c = Circuit(3)
    c.cx(0, 2)
    routed = route_fragment(c, chip(3))
    bad = type(routed)(
        chip_id=routed.chip_id,
        gates=[g if g.qubits != (0, 2) else g for g in routed.gates],
        origins=list(routed.origins),
        initial_mapping=dict(routed.initial_mapping),
        final_mapping=dict(routed.final_mapping),
        swap_count=routed.swap_count,
    )
    # Force a gate onto non-adjacent slots.
    from modcc.ir import Gate

    bad.gates = [Gate("cx", (0, 2))]
    bad.origins = [0]
    report = validate_routed(c, bad, chip(3))
    assert not report["ok"]
    assert any("non-adjacent" in issue for issue in report["issues"])


def test_validator_flags_missing_gate():
    c = Circuit(2)
    c.cx(0, 1)
    c.cx(0, 1)
    routed = route_fragment(c, chip(2))
    routed.gates = routed.gates[:-1]
    routed.origins = routed.origins[:-1]
    report = validate_routed(c, routed, chip(2))
    assert not report["ok"]


def test_measure_and_barrier_survive_routing():
    c = Circuit(3, 3)
    c.h(0)
    c.barrier()
    c.cx(0, 2)
    c.measure(2, 0)
    routed = route_fragment(c, chip(3))
    names = [g.name for g in routed.gates]
    assert "barrier" in names and "measure" in names
    assert validate_routed(c, routed, chip(3))["ok"]
