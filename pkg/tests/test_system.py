import json

import pytest

from conftest import path_system
from modcc.errors import InfeasibleError, ValidationError
from modcc.partition import determine_k, rank_chips
from modcc.presets import preset_chip, preset_system
from modcc.system import (
    gamma_avg,
    link_weight,
    load_system,
    save_system,
    system_from_dict,
    system_to_dict,
    unified_graph,
)


def test_two_chip_one_link_counts():
    sys_ = path_system([20, 20], [(0, 19, 1, 0)])
    uni = unified_graph(sys_)
    assert uni.num_nodes == 40
    assert len(uni.inter_chip_edges) == 1


def test_four_link_variant():
    sys_ = path_system(
        [20, 20], [(0, 19, 1, 0), (0, 18, 1, 1), (0, 17, 1, 2), (0, 16, 1, 3)]
    )
    assert len(unified_graph(sys_).inter_chip_edges) == 4


def test_three_chip_chain():
    sys_ = path_system([4, 4, 4], [(0, 3, 1, 0), (1, 3, 2, 0)])
    assert len(unified_graph(sys_).inter_chip_edges) == 2


def test_dangling_link_endpoint_rejected():
    with pytest.raises(ValidationError) as err:
        system_from_dict(
            {
                "chips": [
                    {"id": "c0", "num_qubits": 2, "edges": [[0, 1]]},
                    {"id": "c1", "num_qubits": 2, "edges": [[0, 1]]},
                ],
                "links": [{"a": ["c0", 1], "b": ["c3", 0]}],
            }
        )
    assert "c3" in str(err.value)


def test_disconnected_chip_graph_rejected():
    with pytest.raises(ValidationError):
        system_from_dict(
            {
                "chips": [
                    {"id": "c0", "num_qubits": 2, "edges": [[0, 1]]},
                    {"id": "c1", "num_qubits": 2, "edges": [[0, 1]]},
                    {"id": "c2", "num_qubits": 2, "edges": [[0, 1]]},
                ],
                "links": [{"a": ["c0", 1], "b": ["c1", 0]}],
            }
        )


def test_disconnected_coupling_graph_rejected():
    with pytest.raises(ValidationError):
        system_from_dict(
            {"chips": [{"id": "c0", "num_qubits": 3, "edges": [[0, 1]]}], "links": []}
        )


def test_calibration_range_checks():
    with pytest.raises(ValidationError):
        path_system([3], [], t1_us=-1.0)
    with pytest.raises(ValidationError):
        path_system([3], [], eps_2q=1.5)


def test_link_weight_oracle():
    # Coupler 0.035 plus 0.001 per endpoint gives 0.037.
    sys_ = path_system([3, 3], [(0, 2, 1, 0)], eps_2q=0.001)
    link = sys_.links[0]
    assert link.eps_coupler == 0.035
    assert abs(link_weight(sys_, link) - 0.037) < 1e-15


def test_link_weight_exceeds_on_chip_weights():
    sys_ = path_system([3, 3], [(0, 2, 1, 0)])
    w = link_weight(sys_, sys_.links[0])
    for chip in sys_.chips:
        for e in chip.edges:
            assert w > chip.edge_eps_2q(*e)


def test_gamma_avg_oracles():
    one = path_system([4], [], t1_us=100.0, t2_us=50.0)
    assert abs(gamma_avg(one, ["c0"]) - 0.03) < 1e-15
    two = path_system([4, 4], [(0, 3, 1, 0)], t1_us=100.0, t2_us=50.0)
    assert abs(gamma_avg(two, ["c0", "c1"]) - 0.03) < 1e-15
    mixed = system_from_dict(
        {
            "chips": [
                {
                    "id": "a",
                    "num_qubits": 2,
                    "edges": [[0, 1]],
                    "calibration": {"t1_us": 100.0, "t2_us": 50.0},
                },
                {
                    "id": "b",
                    "num_qubits": 2,
                    "edges": [[0, 1]],
                    "calibration": {"t1_us": 200.0, "t2_us": 100.0},
                },
            ],
            "links": [{"a": ["a", 1], "b": ["b", 0]}],
        }
    )
    assert abs(gamma_avg(mixed, ["a", "b"]) - 0.0225) < 1e-15


def test_gamma_avg_duplicate_chip_invariant():
    sys_ = path_system([4, 4], [(0, 3, 1, 0)], t1_us=100.0, t2_us=50.0)
    assert gamma_avg(sys_, ["c0"]) == gamma_avg(sys_, ["c0", "c1"])
    with pytest.raises(ValidationError):
        gamma_avg(sys_, [])


def test_save_load_round_trip(tmp_path):
    sys_ = preset_system("mixed2x2chain")
    path = tmp_path / "sys.json"
    save_system(sys_, path)
    back = load_system(path)
    assert system_to_dict(back) == system_to_dict(sys_)
    # And the files themselves are stable.
    save_system(back, tmp_path / "sys2.json")
    assert json.loads((tmp_path / "sys2.json").read_text()) == json.loads(
        path.read_text()
    )


@pytest.mark.parametrize(
    "kind,size",
    [("Almaden20", 20), ("Guadalupe16", 16), ("Auckland27", 27), ("Washington127", 127)],
)
def test_preset_chips(kind, size):
    chip = preset_chip(kind)
    assert chip.num_qubits == size
    degree = {q: 0 for q in range(size)}
    for u, v in chip.edges:
        degree[u] += 1
        degree[v] += 1
    assert max(degree.values()) <= 3


def test_rank_chips_by_decoherence():
    mixed = system_from_dict(
        {
            "chips": [
                {
                    "id": "worse",
                    "num_qubits": 2,
                    "edges": [[0, 1]],
                    "calibration": {"t1_us": 100.0, "t2_us": 50.0},
                },
                {
                    "id": "better",
                    "num_qubits": 2,
                    "edges": [[0, 1]],
                    "calibration": {"t1_us": 200.0, "t2_us": 100.0},
                },
            ],
            "links": [{"a": ["worse", 1], "b": ["better", 0]}],
        }
    )
    assert rank_chips(mixed) == ["better", "worse"]


def test_rank_chips_tie_breaks_by_id():
    sys_ = path_system([4, 4, 4], [(0, 3, 1, 0), (1, 3, 2, 0)])
    assert rank_chips(sys_) == ["c0", "c1", "c2"]
    single = path_system([4], [])
    assert rank_chips(single) == ["c0"]


def test_determine_k_prefix():
    two = path_system([20, 20], [(0, 19, 1, 0)])
    assert determine_k(two, 35) == 2
    assert determine_k(two, 10) == 1
    three = path_system([27, 27, 27], [(0, 26, 1, 0), (1, 26, 2, 0)])
    assert determine_k(three, 78) == 3
    with pytest.raises(InfeasibleError):
        determine_k(two, 41)
