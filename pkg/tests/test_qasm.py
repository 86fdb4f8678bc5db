import math

import pytest

from modcc.errors import QasmParseError
from modcc.ir import Circuit
from modcc.qasm import emit_qasm, parse_qasm

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def test_parse_minimal():
    c = parse_qasm(HEADER + "qreg q[2];\nh q[0];\ncx q[0],q[1];\n")
    assert c.num_qubits == 2
    assert [(g.name, g.qubits) for g in c.gates] == [("h", (0,)), ("cx", (0, 1))]


def test_parse_empty_body():
    c = parse_qasm(HEADER + "qreg q[3];\n")
    assert c.num_qubits == 3
    assert c.gates == []


def test_parse_duplicate_operand_rejected():
    with pytest.raises(Exception) as err:
        parse_qasm(HEADER + "qreg q[2];\ncx q[0],q[0];\n")
    assert "distinct" in str(err.value) or "duplicate" in str(err.value)


def test_parse_params_and_expressions():
    c = parse_qasm(HEADER + "qreg q[1];\nrz(pi/2) q[0];\nu2(0,pi) q[0];\n")
    assert c.gates[0].params == (math.pi / 2,)
    assert c.gates[1].params == (0.0, math.pi)


def test_parse_measure_and_barrier():
    text = HEADER + "qreg q[2];\ncreg c[2];\nbarrier q[0],q[1];\nmeasure q[1] -> c[0];\n"
    c = parse_qasm(text)
    assert c.gates[0].name == "barrier"
    assert c.gates[1].name == "measure"
    assert c.gates[1].qubits == (1,)
    assert c.gates[1].cbits == (0,)


def test_parse_register_broadcast():
    c = parse_qasm(HEADER + "qreg q[3];\nh q;\n")
    assert [g.qubits for g in c.gates] == [(0,), (1,), (2,)]


def test_parse_unsupported_gate_rejected():
    with pytest.raises(QasmParseError) as err:
        parse_qasm(HEADER + "qreg q[2];\nccx q[0],q[1],q[1];\n")
    assert "ccx" in str(err.value)


def test_parse_reports_position():
    with pytest.raises(QasmParseError) as err:
        parse_qasm(HEADER + "qreg q[1];\nh q[4];\n")
    msg = str(err.value)
    assert "line" in msg or ":" in msg


def test_parse_index_out_of_range():
    with pytest.raises(QasmParseError):
        parse_qasm(HEADER + "qreg q[2];\ncx q[0],q[2];\n")


def test_emit_header_records_name_and_size():
    c = Circuit(3)
    c.name = "demo"
    text = emit_qasm(c)
    first = text.splitlines()[0]
    assert first.startswith("//")
    assert "demo" in first
    assert "3" in first


def test_round_trip_identity():
    c = Circuit(4, 4)
    c.h(0)
    c.u3(0.1, 0.2, 0.3, 1)
    c.cx(0, 1)
    c.swap(2, 3)
    c.rx(1.25, 2)
    c.barrier(0, 1, 2, 3)
    c.measure(3, 1)
    back = parse_qasm(emit_qasm(c))
    assert back.num_qubits == c.num_qubits
    assert back.gates == c.gates


def test_round_trip_random(fixtures_dir):
    del fixtures_dir
    from conftest import random_circuit

    for seed in range(5):
        c = random_circuit(6, 40, seed, measures=True)
        back = parse_qasm(emit_qasm(c))
        assert back.gates == c.gates
