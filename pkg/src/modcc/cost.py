"""Noise-aware cost model for compiled circuits.

The objective has three additive terms over four weighted quantities:

    total = alpha*S_on + beta*S_inter            (operational overhead)
          + gamma*D                              (temporal, D in microseconds)
          + delta*(sum_eps / Gamma_avg)          (fidelity penalty)

D itself is computed in nanoseconds as max per-chip depth times the layer
time plus the coupler delay times S_inter, and is converted to microseconds
inside the weighted sum so the three terms share a magnitude scale.

beta defaults to 3.5*alpha; delta defaults to the maximum per-chip depth of
the circuit being scored, recomputed per evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .assemble import CompiledCircuit, OpMetrics, metrics
from .errors import ValidationError
from .system import ModularSystem, gamma_avg, link_weight

T_LAYER_MAX = "max"
T_LAYER_PER_LAYER = "per-layer"


@dataclass(frozen=True)
class CostWeights:
    alpha: float = 1.0
    beta: float | None = None  # None -> 3.5 * alpha
    gamma: float = 1.0
    delta: float | None = None  # None -> max per-chip depth, per evaluation
    t_layer_mode: str = T_LAYER_MAX

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.gamma < 0 or (self.beta is not None and self.beta < 0):
            raise ValidationError("cost weights must be non-negative")
        if self.t_layer_mode not in (T_LAYER_MAX, T_LAYER_PER_LAYER):
            raise ValidationError(f"unknown t_layer mode {self.t_layer_mode!r}")

    def resolved_beta(self) -> float:
        return 3.5 * self.alpha if self.beta is None else self.beta

    def resolved_delta(self, max_chip_depth: int) -> float:
        return float(max_chip_depth) if self.delta is None else self.delta


@dataclass
class CostBreakdown:
    s_on: int
    s_inter: int
    depth_per_chip: dict[str, int]
    d_ns: float
    sum_eps: float
    gamma_avg_per_us: float
    operational_overhead: float
    temporal: float
    fidelity_penalty: float
    total: float
    fidelity_proxy: float
    weights: CostWeights

    def to_json_dict(self) -> dict:
        return {
            "s_on": self.s_on,
            "s_inter": self.s_inter,
            "depth_per_chip": dict(self.depth_per_chip),
            "D_ns": self.d_ns,
            "sum_eps": self.sum_eps,
            "gamma_avg_per_us": self.gamma_avg_per_us,
            "terms": {
                "overhead": self.operational_overhead,
                "temporal": self.temporal,
                "fidelity_penalty": self.fidelity_penalty,
            },
            "total": self.total,
            "fidelity_proxy": self.fidelity_proxy,
        }


def _offsets(cc: CompiledCircuit) -> dict[str, int]:
    return {cid: off for cid, off, _ in cc.chip_slots}


def _links_in_use(cc: CompiledCircuit) -> list[str]:
    return sorted({tg.where for tg in cc.gates if tg.scope == "link"})


def _chip_max_gate_time(sys: ModularSystem, chip_ids: list[str]) -> float:
    best = 0.0
    for cid in chip_ids:
        best = max(best, sys.chip(cid).max_gate_time_ns)
    return best


def temporal_cost(
    m: OpMetrics,
    cc: CompiledCircuit,
    sys: ModularSystem,
    mode: str = T_LAYER_MAX,
) -> float:
    """Estimated schedule length in nanoseconds."""
    links = _links_in_use(cc)
    t_coupler = max((sys.link(l).t_coupler_ns for l in links), default=0.0)
    if mode == T_LAYER_MAX:
        max_depth = max(m.depth_per_chip.values(), default=0)
        t_layer = _chip_max_gate_time(sys, cc.chips_used) if max_depth else 0.0
        return max_depth * t_layer + t_coupler * m.s_inter
    if mode != T_LAYER_PER_LAYER:
        raise ValidationError(f"unknown t_layer mode {mode!r}")
    longest = 0.0
    for cid, layered in cc.per_chip_layers().items():
        chip = sys.chip(cid)
        chip_time = 0.0
        for layer in layered.layers:
            dur = 0.0
            for gate in layer:
                if gate.is_two_qubit:
                    dur = max(dur, chip.edge_gate_time_ns(*gate.qubits))
                else:
                    dur = max(dur, chip.gate_time_1q_ns[gate.qubits[0]])
            chip_time += dur
        longest = max(longest, chip_time)
    return longest + t_coupler * m.s_inter


def _gate_error_contributions(
    cc: CompiledCircuit, sys: ModularSystem
) -> list[float]:
    """Per-two-qubit-gate error mass, in gate order (1q gates excluded)."""
    off = _offsets(cc)
    out = []
    for tg in cc.gates:
        if tg.scope == "link":
            out.append(link_weight(sys, sys.link(tg.where)))
        elif tg.gate.is_two_qubit:
            chip = sys.chip(tg.where)
            o = off[tg.where]
            a, b = (q - o for q in tg.gate.qubits)
            eps = chip.edge_eps_2q(a, b)
            out.append(3.0 * eps if tg.gate.name == "swap" else eps)
    return out


def sum_errors(m: OpMetrics, cc: CompiledCircuit, sys: ModularSystem) -> float:
    """Accumulated error probability mass over all two-qubit operations.

    On-chip CX contributes its edge's eps, an on-chip SWAP three times that,
    and an inter-chip op the coupler eps plus both endpoints' mean incident
    two-qubit eps.
    """
    del m
    return sum(_gate_error_contributions(cc, sys))


def combine(
    weights: CostWeights,
    s_on: int,
    s_inter: int,
    depth_per_chip: dict[str, int],
    d_ns: float,
    sum_eps: float,
    gamma_avg_per_us: float,
    fidelity_proxy: float = 1.0,
) -> CostBreakdown:
    """Assemble a breakdown from already-computed atoms."""
    if gamma_avg_per_us <= 0.0:
        raise ValidationError(
            "average decoherence rate must be positive to score a circuit"
        )
    max_depth = max(depth_per_chip.values(), default=0)
    alpha = weights.alpha
    beta = weights.resolved_beta()
    delta = weights.resolved_delta(max_depth)
    overhead = alpha * s_on + beta * s_inter
    temporal = weights.gamma * (d_ns / 1000.0)
    penalty = delta * (sum_eps / gamma_avg_per_us)
    return CostBreakdown(
        s_on=s_on,
        s_inter=s_inter,
        depth_per_chip=dict(depth_per_chip),
        d_ns=d_ns,
        sum_eps=sum_eps,
        gamma_avg_per_us=gamma_avg_per_us,
        operational_overhead=overhead,
        temporal=temporal,
        fidelity_penalty=penalty,
        total=overhead + temporal + penalty,
        fidelity_proxy=fidelity_proxy,
        weights=weights,
    )


def fidelity_proxy_value(
    cc: CompiledCircuit,
    sys: ModularSystem,
    m: OpMetrics | None = None,
    d_ns: float | None = None,
) -> float:
    """Product-form success estimate in (0, 1].

    Each two-qubit operation contributes a factor (1 - its sum_errors
    contribution), each measured qubit (1 - eps_r at its final slot), and
    idling contributes exp(-D_us * Gamma_avg).
    """
    if m is None:
        m = metrics(cc)
    if d_ns is None:
        d_ns = temporal_cost(m, cc, sys)
    value = 1.0
    for contrib in _gate_error_contributions(cc, sys):
        value *= max(0.0, 1.0 - contrib)
    off = _offsets(cc)
    for q in m.measured:
        slot = cc.final_mapping.get(q)
        if slot is None:
            continue
        cid = cc.chip_of(slot)
        value *= 1.0 - sys.chip(cid).eps_r[slot - off[cid]]
    gamma = gamma_avg(sys, cc.chips_used or [c.id for c in sys.chips])
    value *= math.exp(-(d_ns / 1000.0) * gamma)
    return value


def fidelity_proxy(cc: CompiledCircuit, sys: ModularSystem) -> float:
    return fidelity_proxy_value(cc, sys)


def total_cost(
    cc: CompiledCircuit,
    sys: ModularSystem,
    weights: CostWeights | None = None,
) -> CostBreakdown:
    """Score a compiled circuit against its host system."""
    w = weights or CostWeights()
    m = metrics(cc)
    gamma = gamma_avg(sys, cc.chips_used or [c.id for c in sys.chips])
    d_ns = temporal_cost(m, cc, sys, w.t_layer_mode)
    se = sum_errors(m, cc, sys)
    proxy = fidelity_proxy_value(cc, sys, m, d_ns)
    return combine(
        w,
        s_on=m.s_on,
        s_inter=m.s_inter,
        depth_per_chip=m.depth_per_chip,
        d_ns=d_ns,
        sum_eps=se,
        gamma_avg_per_us=gamma,
        fidelity_proxy=proxy,
    )
