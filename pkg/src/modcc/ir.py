"""Circuit intermediate representation: gates, layering, interaction graphs."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ValidationError

ONE_QUBIT_GATES = frozenset(
    {"u1", "u2", "u3", "h", "x", "y", "z", "s", "t", "rx", "ry", "rz"}
)
TWO_QUBIT_GATES = frozenset({"cx", "swap"})
PARAM_COUNTS = {"u1": 1, "u2": 2, "u3": 3, "rx": 1, "ry": 1, "rz": 1}


@dataclass(frozen=True)
class Gate:
    """A single operation on logical or physical qubit indices."""

    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    cbits: tuple[int, ...] = ()

    @property
    def is_two_qubit(self) -> bool:
        return self.name in TWO_QUBIT_GATES

    def remap(self, mapping: dict[int, int]) -> "Gate":
        """Return a copy with qubit operands sent through ``mapping``."""
        return Gate(
            self.name,
            tuple(mapping[q] for q in self.qubits),
            self.params,
            self.cbits,
        )


@dataclass
class Circuit:
    """An ordered gate list over ``num_qubits`` logical qubits."""

    num_qubits: int
    num_clbits: int = 0
    name: str = field(default="", compare=False)
    gates: list[Gate] = field(default_factory=list)

    def append(self, gate: Gate) -> None:
        _validate_gate(gate, self.num_qubits, self.num_clbits)
        self.gates.append(gate)

    def copy(self) -> "Circuit":
        return Circuit(self.num_qubits, self.num_clbits, self.name, list(self.gates))

    def count_2q(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)

    # Fluent builders used by generators and tests.

    def _add(self, name: str, qubits: tuple[int, ...], params: tuple[float, ...] = ()) -> None:
        self.append(Gate(name, qubits, params))

    def h(self, q: int) -> None:
        self._add("h", (q,))

    def x(self, q: int) -> None:
        self._add("x", (q,))

    def y(self, q: int) -> None:
        self._add("y", (q,))

    def z(self, q: int) -> None:
        self._add("z", (q,))

    def s(self, q: int) -> None:
        self._add("s", (q,))

    def t(self, q: int) -> None:
        self._add("t", (q,))

    def rx(self, theta: float, q: int) -> None:
        self._add("rx", (q,), (theta,))

    def ry(self, theta: float, q: int) -> None:
        self._add("ry", (q,), (theta,))

    def rz(self, theta: float, q: int) -> None:
        self._add("rz", (q,), (theta,))

    def u1(self, lam: float, q: int) -> None:
        self._add("u1", (q,), (lam,))

    def u2(self, phi: float, lam: float, q: int) -> None:
        self._add("u2", (q,), (phi, lam))

    def u3(self, theta: float, phi: float, lam: float, q: int) -> None:
        self._add("u3", (q,), (theta, phi, lam))

    def cx(self, control: int, target: int) -> None:
        self._add("cx", (control, target))

    def swap(self, a: int, b: int) -> None:
        self._add("swap", (a, b))

    def barrier(self, *qubits: int) -> None:
        self._add("barrier", tuple(qubits) if qubits else tuple(range(self.num_qubits)))

    def measure(self, q: int, c: int) -> None:
        self.append(Gate("measure", (q,), (), (c,)))


def _validate_gate(gate: Gate, num_qubits: int, num_clbits: int) -> None:
    name = gate.name
    if name in ONE_QUBIT_GATES:
        arity = 1
    elif name in TWO_QUBIT_GATES:
        arity = 2
    elif name == "measure":
        arity = 1
    elif name == "barrier":
        arity = len(gate.qubits)
        if arity == 0:
            raise ValidationError("barrier requires at least one operand")
    else:
        raise ValidationError(f"unknown gate '{name}'")
    if len(gate.qubits) != arity:
        raise ValidationError(f"gate '{name}' expects {arity} operand(s), got {len(gate.qubits)}")
    if len(set(gate.qubits)) != len(gate.qubits):
        raise ValidationError(f"gate '{name}' has duplicate operands {gate.qubits}")
    for q in gate.qubits:
        if not 0 <= q < num_qubits:
            raise ValidationError(f"qubit index {q} out of range for {num_qubits} qubits")
    expected_params = PARAM_COUNTS.get(name, 0)
    if len(gate.params) != expected_params:
        raise ValidationError(
            f"gate '{name}' expects {expected_params} parameter(s), got {len(gate.params)}"
        )
    if name == "measure":
        if len(gate.cbits) != 1:
            raise ValidationError("measure expects exactly one classical bit")
        if not 0 <= gate.cbits[0] < num_clbits:
            raise ValidationError(f"classical bit {gate.cbits[0]} out of range")
    elif gate.cbits:
        raise ValidationError(f"gate '{name}' takes no classical bits")


@dataclass
class LayeredCircuit:
    """ASAP layering of a circuit; barriers fence ordering but fill no layer."""

    num_qubits: int
    layers: list[list[Gate]]

    @property
    def depth(self) -> int:
        return len(self.layers)


def build_layers(circuit: Circuit) -> LayeredCircuit:
    """Assign each gate the earliest layer after all gates sharing a qubit."""
    ready = [0] * max(circuit.num_qubits, 1)
    layers: list[list[Gate]] = []
    for gate in circuit.gates:
        if gate.name == "barrier":
            fence = max(ready[q] for q in gate.qubits)
            for q in gate.qubits:
                ready[q] = fence
            continue
        layer = max(ready[q] for q in gate.qubits)
        while len(layers) <= layer:
            layers.append([])
        layers[layer].append(gate)
        for q in gate.qubits:
            ready[q] = layer + 1
    return LayeredCircuit(circuit.num_qubits, layers)


@dataclass
class InteractionGraph:
    """Qubit graph; edge weight counts two-qubit gates between the endpoints."""

    num_nodes: int
    adj: dict[int, dict[int, int]] = field(default_factory=dict)

    def add_interaction(self, u: int, v: int, weight: int = 1) -> None:
        if u == v:
            raise ValidationError("self-interaction is not a graph edge")
        self.adj.setdefault(u, {})[v] = self.adj.get(u, {}).get(v, 0) + weight
        self.adj.setdefault(v, {})[u] = self.adj.get(v, {}).get(u, 0) + weight

    def weight(self, u: int, v: int) -> int:
        return self.adj.get(u, {}).get(v, 0)

    def neighbors(self, u: int) -> dict[int, int]:
        return self.adj.get(u, {})

    def edges(self) -> list[tuple[int, int, int]]:
        """All edges as (u, v, weight) with u < v, sorted."""
        out = []
        for u, nbrs in self.adj.items():
            for v, w in nbrs.items():
                if u < v:
                    out.append((u, v, w))
        return sorted(out)

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges())


def interaction_graph(circuit: Circuit) -> InteractionGraph:
    """Collapse a circuit to its weighted qubit interaction graph."""
    graph = InteractionGraph(circuit.num_qubits)
    for gate in circuit.gates:
        if gate.is_two_qubit:
            graph.add_interaction(gate.qubits[0], gate.qubits[1])
    return graph
