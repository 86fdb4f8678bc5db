"""Chips, coupler links, calibration data, and the unified device graph.

System JSON schema::

    {
      "chips": [
        {
          "id": "c0",
          "num_qubits": 20,
          "edges": [[0, 1], ...],
          "calibration": {
            "t1_us": [...], "t2_us": [...], "eps_1q": [...], "eps_r": [...],
            "gate_time_1q_ns": [...],            # optional, per qubit
            "eps_2q": [...],                     # optional, aligned with "edges"
            "gate_time_2q_ns": [...]             # optional, aligned with "edges"
          }
        }
      ],
      "links": [
        {"a": ["c0", 19], "b": ["c1", 0], "eps_coupler": 0.035, "t_coupler_ns": 30.0}
      ]
    }

Per-qubit fields accept a scalar as shorthand for a constant array. A missing
calibration block means the default profile. Systems are immutable after load
and safe to share across search workers.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError

DEFAULT_CAL = {
    "t1_us": 100.0,
    "t2_us": 80.0,
    "eps_1q": 1e-4,
    "eps_r": 1.5e-2,
    "gate_time_1q_ns": 30.0,
    "eps_2q": 8e-4,
    "gate_time_2q_ns": 60.0,
}
DEFAULT_EPS_COUPLER = 0.035
DEFAULT_T_COUPLER_NS = 30.0


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass
class Chip:
    """One chip: coupling graph plus per-qubit and per-edge calibration."""

    id: str
    num_qubits: int
    edges: list[tuple[int, int]]
    t1_us: list[float]
    t2_us: list[float]
    eps_1q: list[float]
    eps_r: list[float]
    gate_time_1q_ns: list[float]
    eps_2q: dict[tuple[int, int], float]
    gate_time_2q_ns: dict[tuple[int, int], float]
    adj: dict[int, list[int]] = field(default_factory=dict, repr=False)
    _dist: list[list[int]] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.num_qubits <= 0:
            raise ValidationError(f"chip '{self.id}' must have at least one qubit")
        self.adj = {q: [] for q in range(self.num_qubits)}
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"chip '{self.id}' has a self-edge at {u}")
            if not (0 <= u < self.num_qubits and 0 <= v < self.num_qubits):
                raise ValidationError(f"chip '{self.id}' edge ({u},{v}) out of range")
            e = _edge(u, v)
            if e in seen:
                continue
            seen.add(e)
            self.adj[u].append(v)
            self.adj[v].append(u)
        self.edges = sorted(seen)
        for q in self.adj:
            self.adj[q].sort()
        if self.num_qubits > 1 and not self._connected():
            raise ValidationError(f"chip '{self.id}' coupling graph is not connected")
        for name in ("t1_us", "t2_us", "eps_1q", "eps_r", "gate_time_1q_ns"):
            values = getattr(self, name)
            if len(values) != self.num_qubits:
                raise ValidationError(
                    f"chip '{self.id}': {name} needs {self.num_qubits} entries"
                )
        for name in ("t1_us", "t2_us", "gate_time_1q_ns"):
            if any(v <= 0 for v in getattr(self, name)):
                raise ValidationError(f"chip '{self.id}': {name} values must be positive")
        for name in ("eps_1q", "eps_r"):
            if any(not 0 <= v < 1 for v in getattr(self, name)):
                raise ValidationError(f"chip '{self.id}': {name} values must be in [0,1)")
        for e in self.edges:
            if not 0 <= self.eps_2q[e] < 1:
                raise ValidationError(f"chip '{self.id}': eps_2q out of range on {e}")
            if self.gate_time_2q_ns[e] <= 0:
                raise ValidationError(f"chip '{self.id}': gate_time_2q_ns must be positive")

    def _connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self.adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.num_qubits

    def has_edge(self, u: int, v: int) -> bool:
        return _edge(u, v) in self.eps_2q

    def edge_eps_2q(self, u: int, v: int) -> float:
        return self.eps_2q[_edge(u, v)]

    def edge_gate_time_ns(self, u: int, v: int) -> float:
        return self.gate_time_2q_ns[_edge(u, v)]

    @property
    def t1_avg(self) -> float:
        return sum(self.t1_us) / self.num_qubits

    @property
    def t2_avg(self) -> float:
        return sum(self.t2_us) / self.num_qubits

    @property
    def gamma(self) -> float:
        """Per-chip decoherence rate 1/T1_avg + 1/T2_avg, in 1/us."""
        return 1.0 / self.t1_avg + 1.0 / self.t2_avg

    @property
    def max_gate_time_ns(self) -> float:
        times = list(self.gate_time_1q_ns) + list(self.gate_time_2q_ns.values())
        return max(times)

    def distances(self) -> list[list[int]]:
        """All-pairs shortest hop counts over the coupling graph (cached)."""
        if self._dist is None:
            n = self.num_qubits
            dist = [[n + 1] * n for _ in range(n)]
            for src in range(n):
                row = dist[src]
                row[src] = 0
                queue = deque([src])
                while queue:
                    u = queue.popleft()
                    for v in self.adj[u]:
                        if row[v] > row[u] + 1:
                            row[v] = row[u] + 1
                            queue.append(v)
            self._dist = dist
        return self._dist

    def mean_incident_eps_2q(self, q: int) -> float:
        """Mean two-qubit error over edges at ``q``; 1q error if isolated."""
        incident = [self.eps_2q[_edge(q, v)] for v in self.adj[q]]
        if not incident:
            return self.eps_1q[q]
        return sum(incident) / len(incident)


@dataclass(frozen=True)
class Link:
    """A fixed coupler between one qubit on each of two distinct chips."""

    id: str
    chip_a: str
    qubit_a: int
    chip_b: str
    qubit_b: int
    eps_coupler: float = DEFAULT_EPS_COUPLER
    t_coupler_ns: float = DEFAULT_T_COUPLER_NS

    def endpoint_on(self, chip_id: str) -> int:
        if chip_id == self.chip_a:
            return self.qubit_a
        if chip_id == self.chip_b:
            return self.qubit_b
        raise ValidationError(f"link '{self.id}' does not touch chip '{chip_id}'")

    def joins(self, chip_x: str, chip_y: str) -> bool:
        return {self.chip_a, self.chip_b} == {chip_x, chip_y}


@dataclass
class ModularSystem:
    """A set of chips wired together by coupler links."""

    chips: list[Chip]
    links: list[Link]
    name: str = ""

    def __post_init__(self) -> None:
        ids = [c.id for c in self.chips]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate chip ids")
        if not self.chips:
            raise ValidationError("a system needs at least one chip")
        self._by_id = {c.id: c for c in self.chips}
        link_ids = [l.id for l in self.links]
        if len(set(link_ids)) != len(link_ids):
            raise ValidationError("duplicate link ids")
        for link in self.links:
            for cid, q in ((link.chip_a, link.qubit_a), (link.chip_b, link.qubit_b)):
                chip = self._by_id.get(cid)
                if chip is None:
                    raise ValidationError(f"link '{link.id}': dangling endpoint chip '{cid}'")
                if not 0 <= q < chip.num_qubits:
                    raise ValidationError(f"link '{link.id}': qubit {q} out of range on '{cid}'")
            if link.chip_a == link.chip_b:
                raise ValidationError(f"link '{link.id}' must join two distinct chips")
            if not 0 <= link.eps_coupler < 1:
                raise ValidationError(f"link '{link.id}': eps_coupler must be in [0,1)")
            if link.t_coupler_ns <= 0:
                raise ValidationError(f"link '{link.id}': t_coupler_ns must be positive")
        if len(self.chips) > 1 and not self._chip_graph_connected():
            raise ValidationError("inter-chip link graph is not connected")

    def _chip_graph_connected(self) -> bool:
        adj: dict[str, set[str]] = {c.id: set() for c in self.chips}
        for link in self.links:
            adj[link.chip_a].add(link.chip_b)
            adj[link.chip_b].add(link.chip_a)
        seen = {self.chips[0].id}
        queue = deque([self.chips[0].id])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == len(self.chips)

    def chip(self, chip_id: str) -> Chip:
        chip = self._by_id.get(chip_id)
        if chip is None:
            raise ValidationError(f"unknown chip '{chip_id}'")
        return chip

    def link(self, link_id: str) -> Link:
        for l in self.links:
            if l.id == link_id:
                return l
        raise ValidationError(f"unknown link '{link_id}'")

    @property
    def total_capacity(self) -> int:
        return sum(c.num_qubits for c in self.chips)

    def links_between(self, chip_x: str, chip_y: str) -> list[Link]:
        return [l for l in self.links if l.joins(chip_x, chip_y)]

    def link_endpoint_qubits(self, chip_id: str) -> set[int]:
        """Physical qubits on ``chip_id`` that terminate some coupler link."""
        out = set()
        for l in self.links:
            if l.chip_a == chip_id:
                out.add(l.qubit_a)
            elif l.chip_b == chip_id:
                out.add(l.qubit_b)
        return out


def gamma_avg(sys: ModularSystem, chips_in_use: set[str] | list[str]) -> float:
    """Mean per-chip decoherence rate over the chips in use, in 1/us."""
    ids = sorted(set(chips_in_use))
    if not ids:
        raise ValidationError("gamma_avg needs a non-empty chip set")
    return sum(sys.chip(cid).gamma for cid in ids) / len(ids)


@dataclass
class UnifiedGraph:
    """All chips flattened to global qubit ids, plus tagged weighted edges."""

    system: ModularSystem
    offsets: dict[str, int]
    num_nodes: int
    on_chip_edges: list[tuple[int, int, float]]
    inter_chip_edges: list[tuple[int, int, float, str]]

    def global_id(self, chip_id: str, q: int) -> int:
        return self.offsets[chip_id] + q

    def locate(self, global_q: int) -> tuple[str, int]:
        for chip in reversed(self.system.chips):
            off = self.offsets[chip.id]
            if global_q >= off:
                return chip.id, global_q - off
        raise ValidationError(f"global qubit {global_q} out of range")


def unified_graph(sys: ModularSystem) -> UnifiedGraph:
    """Flatten the system; inter-chip edges carry w = eps_coupler + eps(k) + eps(l)."""
    offsets: dict[str, int] = {}
    total = 0
    for chip in sys.chips:
        offsets[chip.id] = total
        total += chip.num_qubits
    on_chip = []
    for chip in sys.chips:
        off = offsets[chip.id]
        for u, v in chip.edges:
            on_chip.append((off + u, off + v, chip.eps_2q[(u, v)]))
    inter = []
    for link in sys.links:
        a = offsets[link.chip_a] + link.qubit_a
        b = offsets[link.chip_b] + link.qubit_b
        inter.append((a, b, link_weight(sys, link), link.id))
    return UnifiedGraph(sys, offsets, total, on_chip, inter)


def link_weight(sys: ModularSystem, link: Link) -> float:
    """Coupler edge weight: eps_coupler plus both endpoint qubit gate errors."""
    eps_a = sys.chip(link.chip_a).mean_incident_eps_2q(link.qubit_a)
    eps_b = sys.chip(link.chip_b).mean_incident_eps_2q(link.qubit_b)
    return link.eps_coupler + eps_a + eps_b


# JSON load and save


def _per_qubit(raw: object, n: int, name: str, chip_id: str) -> list[float]:
    if isinstance(raw, (int, float)):
        return [float(raw)] * n
    if isinstance(raw, list):
        if len(raw) != n:
            raise ValidationError(f"chip '{chip_id}': {name} needs {n} entries")
        return [float(v) for v in raw]
    raise ValidationError(f"chip '{chip_id}': {name} must be a number or an array")


def _per_edge(
    raw: object, edges: list[tuple[int, int]], name: str, chip_id: str
) -> dict[tuple[int, int], float]:
    if isinstance(raw, (int, float)):
        return {e: float(raw) for e in edges}
    if isinstance(raw, list):
        if len(raw) != len(edges):
            raise ValidationError(
                f"chip '{chip_id}': {name} must align with the edges list"
            )
        return {e: float(v) for e, v in zip(edges, raw)}
    raise ValidationError(f"chip '{chip_id}': {name} must be a number or an array")


def _chip_from_dict(doc: dict) -> Chip:
    if "id" not in doc or "num_qubits" not in doc or "edges" not in doc:
        raise ValidationError("chip entries need 'id', 'num_qubits', and 'edges'")
    cid = str(doc["id"])
    n = int(doc["num_qubits"])
    edges_raw = doc["edges"]
    if not isinstance(edges_raw, list):
        raise ValidationError(f"chip '{cid}': edges must be an array of pairs")
    edges = []
    for item in edges_raw:
        if not isinstance(item, list) or len(item) != 2:
            raise ValidationError(f"chip '{cid}': edges must be an array of pairs")
        edges.append(_edge(int(item[0]), int(item[1])))
    edges = sorted(set(edges))
    cal = doc.get("calibration", {})
    if not isinstance(cal, dict):
        raise ValidationError(f"chip '{cid}': calibration must be an object")
    return Chip(
        id=cid,
        num_qubits=n,
        edges=edges,
        t1_us=_per_qubit(cal.get("t1_us", DEFAULT_CAL["t1_us"]), n, "t1_us", cid),
        t2_us=_per_qubit(cal.get("t2_us", DEFAULT_CAL["t2_us"]), n, "t2_us", cid),
        eps_1q=_per_qubit(cal.get("eps_1q", DEFAULT_CAL["eps_1q"]), n, "eps_1q", cid),
        eps_r=_per_qubit(cal.get("eps_r", DEFAULT_CAL["eps_r"]), n, "eps_r", cid),
        gate_time_1q_ns=_per_qubit(
            cal.get("gate_time_1q_ns", DEFAULT_CAL["gate_time_1q_ns"]),
            n,
            "gate_time_1q_ns",
            cid,
        ),
        eps_2q=_per_edge(cal.get("eps_2q", DEFAULT_CAL["eps_2q"]), edges, "eps_2q", cid),
        gate_time_2q_ns=_per_edge(
            cal.get("gate_time_2q_ns", DEFAULT_CAL["gate_time_2q_ns"]),
            edges,
            "gate_time_2q_ns",
            cid,
        ),
    )


def system_from_dict(doc: dict) -> ModularSystem:
    if not isinstance(doc, dict) or "chips" not in doc:
        raise ValidationError("system document needs a 'chips' array")
    chips = [_chip_from_dict(c) for c in doc["chips"]]
    links = []
    for i, raw in enumerate(doc.get("links", [])):
        for key in ("a", "b"):
            if key not in raw or not isinstance(raw[key], list) or len(raw[key]) != 2:
                raise ValidationError(f"link entry {i}: '{key}' must be [chip_id, qubit]")
        links.append(
            Link(
                id=str(raw.get("id", f"l{i}")),
                chip_a=str(raw["a"][0]),
                qubit_a=int(raw["a"][1]),
                chip_b=str(raw["b"][0]),
                qubit_b=int(raw["b"][1]),
                eps_coupler=float(raw.get("eps_coupler", DEFAULT_EPS_COUPLER)),
                t_coupler_ns=float(raw.get("t_coupler_ns", DEFAULT_T_COUPLER_NS)),
            )
        )
    return ModularSystem(chips=chips, links=links, name=str(doc.get("name", "")))


def system_to_dict(sys: ModularSystem) -> dict:
    doc: dict = {"chips": [], "links": []}
    if sys.name:
        doc["name"] = sys.name
    for chip in sys.chips:
        doc["chips"].append(
            {
                "id": chip.id,
                "num_qubits": chip.num_qubits,
                "edges": [list(e) for e in chip.edges],
                "calibration": {
                    "t1_us": list(chip.t1_us),
                    "t2_us": list(chip.t2_us),
                    "eps_1q": list(chip.eps_1q),
                    "eps_r": list(chip.eps_r),
                    "gate_time_1q_ns": list(chip.gate_time_1q_ns),
                    "eps_2q": [chip.eps_2q[e] for e in chip.edges],
                    "gate_time_2q_ns": [chip.gate_time_2q_ns[e] for e in chip.edges],
                },
            }
        )
    for link in sys.links:
        doc["links"].append(
            {
                "id": link.id,
                "a": [link.chip_a, link.qubit_a],
                "b": [link.chip_b, link.qubit_b],
                "eps_coupler": link.eps_coupler,
                "t_coupler_ns": link.t_coupler_ns,
            }
        )
    return doc


def load_system(path: str | Path) -> ModularSystem:
    """Read and validate a system JSON file."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in {path}: {exc}") from exc
    sys = system_from_dict(doc)
    if not sys.name:
        sys.name = Path(path).stem
    return sys


def save_system(sys: ModularSystem, path: str | Path) -> None:
    Path(path).write_text(json.dumps(system_to_dict(sys), indent=2) + "\n")
