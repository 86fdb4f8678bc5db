"""Two-phase compilation: chip selection plus local search over assignments.

Chips are ranked by decoherence rate ascending and the smallest prefix that
fits the circuit is taken. From the identity assignment (best-ranked chips
in ranking order) a FIFO frontier explores neighbors: transpositions of two
fragments' chips and reassignments of one cut edge to a parallel link. Each
candidate is partitioned, locally routed per fragment, assembled, and
scored; the cheapest compiled circuit wins.

Fragment capacities are balanced before partitioning: every chip's capacity
is clamped to the smallest ceiling t such that sum(min(cap_i, t)) still
fits the circuit, which spreads fragments instead of filling the first chip
wall to wall.

Each assignment is nevertheless scored over several layout variants: the
balanced min-cut partition and a wall-to-wall slicing of the interaction
order, each routed with both initial-placement strategies the local router
offers. The cheapest assembled circuit represents the assignment. Packed
slices matter because a fragment that fills its chip leaves both link
endpoints on the ends of one unbroken chain, so chain-shaped circuits cross
chips with no relocation overhead at all.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .assemble import (
    CIRCUIT,
    ROUTING,
    CompiledCircuit,
    FragmentPlan,
    TaggedGate,
    assemble,
    extract_fragments,
)
from .cost import CostBreakdown, CostWeights, total_cost
from .errors import InfeasibleError, ValidationError
from .ir import Circuit, Gate, interaction_graph
from .partition import cut_edges, determine_k, partition, rank_chips
from .router import route_fragment
from .system import Chip, ModularSystem, unified_graph

DEFAULT_MAX_ITERATIONS = 50
WIDE_K_BREADTH_CAP = 32
WIDE_K_THRESHOLD = 4


@dataclass
class FragmentAssignment:
    """Fragment slot i lives on chips[i]; cut qubit edges ride link_choice."""

    chips: tuple[str, ...]
    link_choice: dict[tuple[int, int], str] = field(default_factory=dict)
    cost: float = math.inf

    def key(self) -> tuple:
        return (self.chips, tuple(sorted(self.link_choice.items())))


@dataclass
class SearchConfig:
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    seed: int = 0
    weights: CostWeights = field(default_factory=CostWeights)
    breadth_limit: int | None = None
    jobs: int = 1
    # Drop-in replacement for route_fragment; same call signature.
    local_router: object = None

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be at least 1")
        if self.jobs < 1:
            raise ValidationError("jobs must be at least 1")


@dataclass
class CompileResult:
    compiled: CompiledCircuit
    cost: CostBreakdown
    iterations: int
    trace: list[float]
    assignment: FragmentAssignment
    fragments: list[list[int]]


def balanced_capacities(caps: list[int], num_qubits: int) -> list[int]:
    """Clamp capacities to the smallest uniform ceiling that still fits."""
    if num_qubits > sum(caps):
        raise InfeasibleError(
            f"circuit needs {num_qubits} qubits but the chips hold {sum(caps)}"
        )
    t = max(1, -(-num_qubits // len(caps)))
    while sum(min(c, t) for c in caps) < num_qubits:
        t += 1
    return [min(c, t) for c in caps]


def _linear_fragments(graph: InteractionGraph, caps: list[int]) -> list[list[int]]:
    """Contiguous slices of a breadth-first qubit order.

    Minimum-cut partitions are free to produce a quotient graph no chip
    permutation can embed in the link graph (a triangle of cut pairs on a
    chain of chips, say). BFS order keeps interaction edges between nearby
    slices, so slicing it is the recovery partition when that happens.
    """
    order: list[int] = []
    seen: set[int] = set()
    for root in range(graph.num_nodes):
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in sorted(graph.neighbors(u)):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    out: list[list[int]] = []
    remaining = graph.num_nodes
    at = 0
    for i, cap in enumerate(caps):
        rest = len(caps) - i - 1
        take = min(cap, remaining - rest)  # never strands an empty fragment
        out.append(order[at : at + take])
        at += take
        remaining -= take
    return out


def generate_neighbors(
    a: FragmentAssignment,
    sys: ModularSystem,
    breadth_limit: int | None = None,
) -> list[FragmentAssignment]:
    """Single-step variations of an evaluated assignment.

    Transposes each pair of fragment-chip assignments, and reroutes each
    assigned cut edge over each alternative link joining the same chip
    pair. Link choices are meaningful only after evaluation resolved them.
    """
    k = len(a.chips)
    out: list[FragmentAssignment] = []
    for i in range(k):
        for j in range(i + 1, k):
            chips = list(a.chips)
            chips[i], chips[j] = chips[j], chips[i]
            out.append(FragmentAssignment(tuple(chips)))
    edge_to_pair: dict[tuple[int, int], tuple[str, str]] = {}
    for edge, link_id in sorted(a.link_choice.items()):
        link = sys.link(link_id)
        edge_to_pair[edge] = (link.chip_a, link.chip_b)
        for alt in sys.links_between(link.chip_a, link.chip_b):
            if alt.id == link_id:
                continue
            choice = dict(a.link_choice)
            choice[edge] = alt.id
            out.append(FragmentAssignment(a.chips, choice))
    if breadth_limit is None and k > WIDE_K_THRESHOLD:
        breadth_limit = WIDE_K_BREADTH_CAP
    if breadth_limit is not None:
        out = out[:breadth_limit]
    return out


class _Engine:
    def __init__(self, circuit: Circuit, sys: ModularSystem, cfg: SearchConfig):
        self.circuit = circuit
        self.sys = sys
        self.cfg = cfg
        self.graph = interaction_graph(circuit)
        self.part_cache: dict[tuple[int, ...], list[list[int]]] = {}
        self.packed_cache: dict[tuple[int, ...], list[list[int]]] = {}
        self.route_cache: dict[tuple, object] = {}
        self.fallback: list[list[int]] | None = None

    def fragments_for(self, chips: tuple[str, ...]) -> list[list[int]]:
        caps = [self.sys.chip(c).num_qubits for c in chips]
        if self.fallback is not None:
            for frag, cap in zip(self.fallback, caps):
                if len(frag) > cap:
                    raise InfeasibleError(
                        f"fallback slice of {len(frag)} qubits exceeds a "
                        f"{cap}-qubit chip"
                    )
            return self.fallback
        eff = balanced_capacities(caps, self.circuit.num_qubits)
        key = tuple(eff)
        frags = self.part_cache.get(key)
        if frags is None:
            frags = partition(self.graph, len(chips), eff)
            self.part_cache[key] = frags
        return frags

    def packed_fragments_for(self, chips: tuple[str, ...]) -> list[list[int]]:
        """Wall-to-wall slices of the interaction order, in assignment order."""
        caps = [self.sys.chip(c).num_qubits for c in chips]
        key = tuple(caps)
        frags = self.packed_cache.get(key)
        if frags is None:
            frags = _linear_fragments(self.graph, caps)
            self.packed_cache[key] = frags
        return frags

    def resolve_links(
        self, a: FragmentAssignment, fragments: list[list[int]]
    ) -> dict[tuple[int, int], str]:
        slot: dict[int, int] = {}
        for i, frag in enumerate(fragments):
            for q in frag:
                slot[q] = i
        resolved: dict[tuple[int, int], str] = {}
        for u, v, _ in cut_edges(self.graph, fragments):
            edge = (u, v)
            ci, cj = a.chips[slot[u]], a.chips[slot[v]]
            chosen = a.link_choice.get(edge)
            if chosen is not None:
                if not self.sys.link(chosen).joins(ci, cj):
                    raise ValidationError(
                        f"link '{chosen}' does not join chips '{ci}' and '{cj}'"
                    )
            else:
                options = self.sys.links_between(ci, cj)
                if not options:
                    raise InfeasibleError(
                        f"no coupler joins chips '{ci}' and '{cj}' needed by "
                        f"cut edge {edge}"
                    )
                chosen = options[0].id
            resolved[edge] = chosen
        return resolved

    def _route_plan(self, plan: FragmentPlan, strategy: str):
        key = (
            plan.chip_id,
            plan.circuit.num_qubits,
            tuple(
                (g.name, g.qubits, g.params, g.cbits) for g in plan.circuit.gates
            ),
            tuple(sorted((c.logical, c.physical, c.phase) for c in plan.constraints)),
            strategy,
        )
        routed = self.route_cache.get(key)
        if routed is None:
            chip = self.sys.chip(plan.chip_id)
            if self.cfg.local_router is not None:
                routed = self.cfg.local_router(
                    plan.circuit, chip, plan.constraints, self.cfg.seed
                )
            else:
                routed = route_fragment(
                    plan.circuit, chip, plan.constraints, self.cfg.seed,
                    strategy=strategy,
                )
            self.route_cache[key] = routed
        return routed

    def evaluate(
        self, a: FragmentAssignment
    ) -> tuple[FragmentAssignment, list[list[int]], CompiledCircuit, CostBreakdown]:
        options = [self.fragments_for(a.chips)]
        packed = self.packed_fragments_for(a.chips)
        if packed != options[0]:
            options.append(packed)
        # External routers choose their own layout; no strategy axis then.
        strategies = ("greedy", "linear") if self.cfg.local_router is None else ("auto",)
        best: tuple[FragmentAssignment, list[list[int]], CompiledCircuit, CostBreakdown] | None = None
        err: InfeasibleError | None = None
        for fragments in options:
            try:
                resolved = FragmentAssignment(a.chips, self.resolve_links(a, fragments))
                plans = extract_fragments(self.circuit, fragments, self.sys, resolved)
            except InfeasibleError as exc:
                err = err or exc
                continue
            for strategy in strategies:
                try:
                    routed = [self._route_plan(plan, strategy) for plan in plans]
                except InfeasibleError as exc:
                    err = err or exc
                    continue
                cc = assemble(routed, fragments, self.sys, resolved, self.circuit)
                bd = total_cost(cc, self.sys, self.cfg.weights)
                if best is None or bd.total < best[3].total:
                    ra = FragmentAssignment(
                        a.chips, dict(resolved.link_choice), bd.total
                    )
                    best = (ra, fragments, cc, bd)
        if best is None:
            raise err or InfeasibleError(
                "no feasible layout for this fragment-to-chip assignment"
            )
        return best


def evaluate_candidate(
    a: FragmentAssignment,
    circuit: Circuit,
    sys: ModularSystem,
    cfg: SearchConfig | None = None,
) -> tuple[CompiledCircuit, CostBreakdown]:
    """Score one assignment end to end (partition, route, assemble, cost)."""
    engine = _Engine(circuit, sys, cfg or SearchConfig())
    _, _, cc, bd = engine.evaluate(a)
    return cc, bd


def compile_circuit(
    circuit: Circuit,
    sys: ModularSystem,
    cfg: SearchConfig | None = None,
) -> CompileResult:
    """Compile a logical circuit onto a coupler-connected modular system."""
    cfg = cfg or SearchConfig()
    n = circuit.num_qubits
    k = determine_k(sys, n)  # raises when the system is too small
    ranked = rank_chips(sys)
    engine = _Engine(circuit, sys, cfg)

    best: tuple[FragmentAssignment, list[list[int]], CompiledCircuit, CostBreakdown] | None = None
    trace: list[float] = []
    iterations = 0

    def attempt(a: FragmentAssignment):
        try:
            return engine.evaluate(a)
        except InfeasibleError as exc:
            return exc

    def explore(start: FragmentAssignment) -> None:
        nonlocal best, iterations
        queue: deque[FragmentAssignment] = deque([start])
        visited: set[tuple] = {start.key()}
        while queue and iterations < cfg.max_iterations:
            width = min(cfg.jobs, cfg.max_iterations - iterations, len(queue))
            batch = [queue.popleft() for _ in range(width)]
            if len(batch) == 1:
                results = [attempt(batch[0])]
            else:
                with ThreadPoolExecutor(max_workers=len(batch)) as pool:
                    results = list(pool.map(attempt, batch))
            for a, res in zip(batch, results):
                iterations += 1
                if isinstance(res, InfeasibleError):
                    # Still fan out: a transposition may fix a link-less cut.
                    trace.append(best[3].total if best else math.inf)
                    expanded = a
                else:
                    ra, fragments, cc, bd = res
                    if best is None or bd.total < best[3].total:
                        best = (ra, fragments, cc, bd)
                    trace.append(best[3].total)
                    visited.add(ra.key())
                    expanded = ra
                for nb in generate_neighbors(expanded, sys, cfg.breadth_limit):
                    nk = nb.key()
                    if nk not in visited:
                        visited.add(nk)
                        queue.append(nb)

    init = FragmentAssignment(tuple(ranked[:k]))
    explore(init)
    if best is None and iterations < cfg.max_iterations:
        eff = balanced_capacities(
            [sys.chip(c).num_qubits for c in init.chips], n
        )
        engine.fallback = _linear_fragments(engine.graph, eff)
        explore(FragmentAssignment(init.chips))

    if best is None:
        raise InfeasibleError(
            "no feasible fragment-to-chip assignment was found; the chips "
            "selected by the ranking are not link-connected for this cut"
        )
    ra, fragments, cc, bd = best
    return CompileResult(
        compiled=cc,
        cost=bd,
        iterations=iterations,
        trace=trace,
        assignment=ra,
        fragments=fragments,
    )


def _unified_chip(sys: ModularSystem) -> tuple[Chip, dict[tuple[int, int], str]]:
    uni = unified_graph(sys)
    link_by_edge: dict[tuple[int, int], str] = {}
    eps_2q: dict[tuple[int, int], float] = {}
    times_2q: dict[tuple[int, int], float] = {}
    for u, v, eps in uni.on_chip_edges:
        e = (min(u, v), max(u, v))
        cid, lu = uni.locate(u)
        _, lv = uni.locate(v)
        chip = sys.chip(cid)
        eps_2q[e] = eps
        times_2q[e] = chip.edge_gate_time_ns(lu, lv)
    for u, v, _, link_id in uni.inter_chip_edges:
        e = (min(u, v), max(u, v))
        link = sys.link(link_id)
        link_by_edge[e] = link_id
        eps_2q[e] = link.eps_coupler
        times_2q[e] = link.t_coupler_ns
    t1, t2, e1, er, g1 = [], [], [], [], []
    for chip in sys.chips:
        t1.extend(chip.t1_us)
        t2.extend(chip.t2_us)
        e1.extend(chip.eps_1q)
        er.extend(chip.eps_r)
        g1.extend(chip.gate_time_1q_ns)
    pseudo = Chip(
        id="unified",
        num_qubits=uni.num_nodes,
        edges=sorted(eps_2q),
        t1_us=t1,
        t2_us=t2,
        eps_1q=e1,
        eps_r=er,
        gate_time_1q_ns=g1,
        eps_2q=eps_2q,
        gate_time_2q_ns=times_2q,
    )
    return pseudo, link_by_edge


def compile_monolithic(
    circuit: Circuit,
    sys: ModularSystem,
    weights: CostWeights | None = None,
    seed: int = 0,
) -> tuple[CompiledCircuit, CostBreakdown]:
    """Baseline: route the whole circuit over the flattened system graph.

    Link edges are ordinary routable edges here; gates landing on them are
    tagged as inter-chip operations afterwards, so the result is scored by
    the same cost model as the fragment pipeline.
    """
    n = circuit.num_qubits
    if n > sys.total_capacity:
        raise InfeasibleError(
            f"circuit needs {n} qubits but the system holds {sys.total_capacity}"
        )
    pseudo, link_by_edge = _unified_chip(sys)
    routed = route_fragment(circuit, pseudo, None, seed)
    offsets: dict[str, int] = {}
    total = 0
    for chip in sys.chips:
        offsets[chip.id] = total
        total += chip.num_qubits

    def chip_of(p: int) -> str:
        for chip in reversed(sys.chips):
            if p >= offsets[chip.id]:
                return chip.id
        raise ValidationError(f"qubit {p} off the system")  # pragma: no cover

    cc = CompiledCircuit(
        num_logical=n,
        num_physical=total,
        num_clbits=circuit.num_clbits,
        chip_slots=[(c.id, offsets[c.id], c.num_qubits) for c in sys.chips],
    )
    touched: set[str] = set()
    for gate, origin in zip(routed.gates, routed.origins):
        kind = ROUTING if origin is None else CIRCUIT
        if gate.name == "barrier" and len(gate.qubits) > 1:
            by_chip: dict[str, list[int]] = {}
            for q in gate.qubits:
                by_chip.setdefault(chip_of(q), []).append(q)
            for cid, qs in sorted(by_chip.items()):
                cc.gates.append(
                    TaggedGate(Gate("barrier", tuple(qs)), "chip", cid, kind)
                )
                touched.add(cid)
            continue
        if gate.is_two_qubit:
            e = (min(gate.qubits), max(gate.qubits))
            link_id = link_by_edge.get(e)
            if link_id is not None:
                cc.gates.append(TaggedGate(gate, "link", link_id, kind))
                touched.add(chip_of(gate.qubits[0]))
                touched.add(chip_of(gate.qubits[1]))
                continue
        cid = chip_of(gate.qubits[0])
        cc.gates.append(TaggedGate(gate, "chip", cid, kind))
        touched.add(cid)
    cc.initial_mapping = dict(routed.initial_mapping)
    cc.final_mapping = dict(routed.final_mapping)
    for p in cc.final_mapping.values():
        touched.add(chip_of(p))
    cc.chips_used = sorted(touched)
    cc.measured = sorted(
        {g.qubits[0] for g in circuit.gates if g.name == "measure"}
    )
    bd = total_cost(cc, sys, weights)
    return cc, bd
