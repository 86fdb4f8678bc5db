"""Small dense statevector simulator for equivalence checking.

States are little-endian: basis index bit q is qubit q. Measurements are
treated as identity so that a measured circuit can still be compared as a
pure state. Compiled circuits are simulated over the compact set of
physical slots they actually touch; untouched slots stay |0> and junk
slots that swaps merely pass through are projected out afterwards.
"""

from __future__ import annotations

import math

import numpy as np

from .assemble import CompiledCircuit
from .errors import ValidationError
from .ir import Circuit, Gate

MAX_SIM_QUBITS = 12
MAX_SUPPORT = 20


def _u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def _one_qubit_matrix(gate: Gate) -> np.ndarray | None:
    name, p = gate.name, gate.params
    if name == "u3":
        return _u3(*p)
    if name == "u2":
        return _u3(math.pi / 2.0, p[0], p[1])
    if name == "u1":
        return np.diag([1.0, np.exp(1j * p[0])]).astype(complex)
    if name == "h":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
    if name == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if name == "y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if name == "z":
        return np.diag([1.0, -1.0]).astype(complex)
    if name == "s":
        return np.diag([1.0, 1j]).astype(complex)
    if name == "t":
        return np.diag([1.0, np.exp(1j * math.pi / 4.0)]).astype(complex)
    if name == "rx":
        c, s = math.cos(p[0] / 2.0), math.sin(p[0] / 2.0)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if name == "ry":
        c, s = math.cos(p[0] / 2.0), math.sin(p[0] / 2.0)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "rz":
        return np.diag([np.exp(-0.5j * p[0]), np.exp(0.5j * p[0])]).astype(complex)
    return None


def _apply_1q(psi: np.ndarray, mat: np.ndarray, q: int, n: int) -> np.ndarray:
    axis = n - 1 - q
    out = np.tensordot(mat, psi, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def _apply_cx(psi: np.ndarray, c: int, t: int, n: int) -> np.ndarray:
    ac, at = n - 1 - c, n - 1 - t
    sel: list = [slice(None)] * n
    sel[ac] = 1
    sub_axis = at - 1 if ac < at else at
    psi = psi.copy()
    psi[tuple(sel)] = np.flip(psi[tuple(sel)], axis=sub_axis)
    return psi


def _apply_swap(psi: np.ndarray, a: int, b: int, n: int) -> np.ndarray:
    return np.swapaxes(psi, n - 1 - a, n - 1 - b)


def _run(gates: list[Gate], relabel: dict[int, int], n: int) -> np.ndarray:
    if n > MAX_SUPPORT:
        raise ValidationError(
            f"simulation support of {n} qubits exceeds the {MAX_SUPPORT}-qubit cap"
        )
    psi = np.zeros([2] * n, dtype=complex)
    psi[(0,) * n] = 1.0
    for gate in gates:
        if gate.name in ("barrier", "measure"):
            continue
        qs = [relabel[q] for q in gate.qubits]
        if gate.name == "cx":
            psi = _apply_cx(psi, qs[0], qs[1], n)
        elif gate.name == "swap":
            psi = _apply_swap(psi, qs[0], qs[1], n)
        else:
            mat = _one_qubit_matrix(gate)
            if mat is None:
                raise ValidationError(f"cannot simulate gate '{gate.name}'")
            psi = _apply_1q(psi, mat, qs[0], n)
    return psi


def simulate_statevector(circuit: Circuit) -> np.ndarray:
    """Full statevector of a logical circuit, as a flat length-2**n array."""
    n = circuit.num_qubits
    if n > MAX_SIM_QUBITS:
        raise ValidationError(
            f"statevector simulation is limited to {MAX_SIM_QUBITS} qubits, "
            f"got {n}"
        )
    return _run(circuit.gates, {q: q for q in range(n)}, n).reshape(-1)


def compiled_support(cc: CompiledCircuit) -> list[int]:
    slots = set(cc.initial_mapping.values())
    for tg in cc.gates:
        slots.update(tg.gate.qubits)
    return sorted(slots)


def compiled_statevector(cc: CompiledCircuit) -> tuple[np.ndarray, list[int]]:
    """Statevector over the compact slot support, plus the support order."""
    support = compiled_support(cc)
    relabel = {p: j for j, p in enumerate(support)}
    psi = _run([tg.gate for tg in cc.gates], relabel, len(support))
    return psi, support


def verify_equivalence(circuit: Circuit, cc: CompiledCircuit) -> float:
    """Squared overlap between the logical state and the compiled state.

    The compiled state's wire slots are read through the final mapping and
    every other support slot is projected onto |0>; a faithful compilation
    yields 1.0 up to floating-point rounding.
    """
    n = circuit.num_qubits
    if n > MAX_SIM_QUBITS:
        raise ValidationError(
            f"statevector simulation is limited to {MAX_SIM_QUBITS} qubits, "
            f"got {n}"
        )
    if sorted(cc.final_mapping) != list(range(n)):
        raise ValidationError("compiled circuit does not map every logical qubit")
    target = _run(circuit.gates, {q: q for q in range(n)}, n)
    psi, support = compiled_statevector(cc)
    m = len(support)
    local = {p: j for j, p in enumerate(support)}
    wire_axis = {}
    for q in range(n):
        slot = cc.final_mapping[q]
        if slot not in local:
            # The wire was never touched; its |0> axis is implicit.
            wire_axis[q] = None
        else:
            wire_axis[q] = m - 1 - local[slot]
    taken = [a for a in wire_axis.values() if a is not None]
    if len(set(taken)) != len(taken):
        raise ValidationError("final mapping sends two qubits to one slot")
    sel: list = [0] * m
    for a in taken:
        sel[a] = slice(None)
    proj = psi[tuple(sel)]
    # Axes of proj correspond to the taken axes in ascending order; put the
    # wires into little-endian logical order (axis k holds qubit n-1-k).
    order = sorted(taken)
    perm = []
    for q in range(n - 1, -1, -1):
        a = wire_axis[q]
        if a is not None:
            perm.append(order.index(a))
    proj = np.transpose(proj, axes=perm) if perm else proj
    for q in range(n - 1, -1, -1):
        if wire_axis[q] is None:
            axis = (n - 1) - q
            proj = np.expand_dims(proj, axis=axis)
            pad = [(0, 0)] * proj.ndim
            pad[axis] = (0, 1)
            proj = np.pad(proj, pad)
    overlap = np.tensordot(np.conjugate(target), proj, axes=target.ndim)
    return float(abs(overlap) ** 2)
