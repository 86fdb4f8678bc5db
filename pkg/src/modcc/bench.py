"""Deterministic benchmark circuit generators.

All families are parameterized by total qubit count, emit no measurements,
and use only the gate set known to the IR so they survive a QASM round trip.
"""

from __future__ import annotations

import math

from .errors import ValidationError
from .ir import Circuit

KINDS = ("GHZ", "WState", "Cat", "Ising", "BV", "Adder", "HWEA")
_CANON = {k.lower(): k for k in KINDS}


def _canon_key(kind: str) -> str:
    return kind.lower().replace("-", "").replace("_", "")


def generate_benchmark(kind: str, n: int) -> Circuit:
    """Build the named benchmark family on ``n`` qubits."""
    canon = _CANON.get(_canon_key(kind))
    if canon is None:
        raise ValidationError(f"unknown benchmark '{kind}' (choose from {', '.join(KINDS)})")
    if n < 2:
        raise ValidationError("benchmarks need at least 2 qubits")
    builder = {
        "GHZ": _ghz,
        "Cat": _ghz,
        "WState": _wstate,
        "Ising": _ising,
        "BV": _bv,
        "Adder": _adder,
        "HWEA": _hwea,
    }[canon]
    circuit = builder(n)
    circuit.name = f"{canon}:{n}"
    return circuit


def _ghz(n: int) -> Circuit:
    c = Circuit(n)
    c.h(0)
    for i in range(n - 1):
        c.cx(i, i + 1)
    return c


def _wstate(n: int) -> Circuit:
    # Chain of controlled rotations that spread one excitation evenly:
    # after step k the excitation sits on qubit k-1 with amplitude 1/sqrt(n).
    c = Circuit(n)
    c.x(0)
    for k in range(1, n):
        theta = 2.0 * math.acos(math.sqrt(1.0 / (n - k + 1)))
        c.ry(theta / 2.0, k)
        c.cx(k - 1, k)
        c.ry(-theta / 2.0, k)
        c.cx(k - 1, k)
        c.cx(k, k - 1)
    return c


def _ising(n: int) -> Circuit:
    # One Trotter step of a transverse-field chain; each bond costs two CX.
    c = Circuit(n)
    for q in range(n):
        c.rx(0.7, q)
    for i in range(n - 1):
        c.cx(i, i + 1)
        c.rz(0.9, i + 1)
        c.cx(i, i + 1)
    return c


def _bv(n: int) -> Circuit:
    # All-ones secret string over n-1 data qubits, ancilla last.
    c = Circuit(n)
    anc = n - 1
    for q in range(anc):
        c.h(q)
    c.x(anc)
    c.h(anc)
    for q in range(anc):
        c.cx(q, anc)
    for q in range(anc):
        c.h(q)
    return c


def _ccx(c: Circuit, a: int, b: int, t: int) -> None:
    """Toffoli via the six-CX construction; u1(-pi/4) plays tdg."""
    tdg = -math.pi / 4.0
    c.h(t)
    c.cx(b, t)
    c.u1(tdg, t)
    c.cx(a, t)
    c.t(t)
    c.cx(b, t)
    c.u1(tdg, t)
    c.cx(a, t)
    c.t(b)
    c.t(t)
    c.h(t)
    c.cx(a, b)
    c.t(a)
    c.u1(tdg, b)
    c.cx(a, b)


def _adder(n: int) -> Circuit:
    # Ripple-carry adder on interleaved registers: qubit 0 is the carry-in,
    # odd indices hold b, even indices (from 2) hold a, the top wire is the
    # carry-out. Requires n = 2w + 2 for some width w >= 1.
    if n % 2 != 0 or n < 4:
        raise ValidationError("Adder needs an even qubit count of at least 4")
    w = (n - 2) // 2
    b = [2 * i + 1 for i in range(w)]
    a = [2 * i + 2 for i in range(w)]
    cout = n - 1
    c = Circuit(n)

    def maj(x: int, y: int, z: int) -> None:
        c.cx(z, y)
        c.cx(z, x)
        _ccx(c, x, y, z)

    def uma(x: int, y: int, z: int) -> None:
        _ccx(c, x, y, z)
        c.cx(z, x)
        c.cx(x, y)

    carry = 0
    chain = []
    for i in range(w):
        chain.append((carry, b[i], a[i]))
        carry = a[i]
    for x, y, z in chain:
        maj(x, y, z)
    c.cx(a[-1], cout)
    for x, y, z in reversed(chain):
        uma(x, y, z)
    return c


def _hwea(n: int) -> Circuit:
    # Single hardware-efficient layer: local rotations plus a CX ladder.
    c = Circuit(n)
    for q in range(n):
        c.ry(0.1 * (q + 1), q)
        c.rz(0.2 * (q + 1), q)
    for i in range(n - 1):
        c.cx(i, i + 1)
    return c
