import random
from pathlib import Path

import pytest

from modcc.ir import Circuit
from modcc.system import ModularSystem, system_from_dict

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
HELPERS = Path(__file__).resolve().parent / "helpers"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def echo_compiler() -> Path:
    return HELPERS / "echo_compiler.py"


def path_system(sizes: list[int], link_pairs: list[tuple[int, int, int, int]],
                **cal) -> ModularSystem:
    """Chips that are simple paths, joined by the given (ca, qa, cb, qb) links."""
    chips = []
    for i, n in enumerate(sizes):
        doc = {
            "id": f"c{i}",
            "num_qubits": n,
            "edges": [[j, j + 1] for j in range(n - 1)],
        }
        if cal:
            doc["calibration"] = dict(cal)
        chips.append(doc)
    links = [
        {"a": [f"c{ca}", qa], "b": [f"c{cb}", qb]}
        for ca, qa, cb, qb in link_pairs
    ]
    return system_from_dict({"chips": chips, "links": links})


def random_circuit(n: int, gates: int, seed: int, measures: bool = False) -> Circuit:
    rng = random.Random(seed)
    c = Circuit(n, n if measures else 0)
    one_q = ("h", "x", "s", "t")
    for _ in range(gates):
        roll = rng.random()
        if roll < 0.45:
            c._add(one_q[rng.randrange(len(one_q))], (rng.randrange(n),))
        elif roll < 0.55:
            c.rz(rng.uniform(0, 3.1), rng.randrange(n))
        else:
            a, b = rng.sample(range(n), 2)
            if roll < 0.9:
                c.cx(a, b)
            else:
                c.swap(a, b)
    if measures:
        for q in range(n):
            c.measure(q, q)
    return c
