"""Fragment extraction and assembly of routed fragments into a global circuit.

Extraction splits a logical circuit by a qubit partition. Gates crossing a
cut edge leave a one-operand barrier marker in each touched fragment (a
fence the local router must respect) and give rise to boundary pins at the
assigned link's endpoints.

Assembly walks the logical gate order, draining each fragment's routed
stream up to the gate being emitted. Runs of consecutive crossings on one
cut pair are handled as an episode with one of three policies, ranked by
inter-chip operation count and then by estimated swap overhead:

- per-gate: each crossing executes as an inter-chip CX (or SWAP) on the
  link endpoints, with both operands dragged there and dragged back.
- park: the operand whose circuit ends with the run is relocated across the
  link (one inter-chip SWAP with a free or retired slot) and the run
  executes on one chip; the mover stays.
- restore: like park, but the mover returns (two inter-chip SWAPs), for
  operands that still have work at home.

Every on-chip swap an episode inserts is un-done in reverse order when the
episode finishes, so each chip's state layout returns exactly to what its
routed stream expects; only the deliberately relocated state differs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InfeasibleError, ValidationError
from .ir import Circuit, Gate, LayeredCircuit, build_layers
from .router import FINAL, INITIAL, BoundaryConstraint, RoutedFragment
from .system import Link, ModularSystem

CIRCUIT = "circuit"
ROUTING = "routing"
TRANSFER = "transfer"


@dataclass(frozen=True)
class TaggedGate:
    """A physical gate over global qubit ids plus its placement tag."""

    gate: Gate
    scope: str  # "chip" | "link"
    where: str  # chip id or link id
    origin: str  # "circuit" | "routing" | "transfer"


@dataclass
class CompiledCircuit:
    """The assembled global circuit over flattened physical qubits."""

    num_logical: int
    num_physical: int
    num_clbits: int
    gates: list[TaggedGate] = field(default_factory=list)
    initial_mapping: dict[int, int] = field(default_factory=dict)
    final_mapping: dict[int, int] = field(default_factory=dict)
    chips_used: list[str] = field(default_factory=list)
    chip_slots: list[tuple[str, int, int]] = field(default_factory=list)
    # chip_slots rows: (chip id, global offset, num_qubits), system order.
    measured: list[int] = field(default_factory=list)  # logical qubit ids

    def chip_of(self, global_q: int) -> str:
        for cid, off, size in self.chip_slots:
            if off <= global_q < off + size:
                return cid
        raise ValidationError(f"global qubit {global_q} outside every chip")

    def per_chip_circuits(self) -> dict[str, Circuit]:
        """On-chip gate streams, localized to each chip's own indexing."""
        off = {cid: o for cid, o, _ in self.chip_slots}
        size = {cid: s for cid, _, s in self.chip_slots}
        out = {
            cid: Circuit(size[cid], self.num_clbits, name=cid)
            for cid in self.chips_used
        }
        for tg in self.gates:
            if tg.scope != "chip" or tg.where not in out:
                continue
            o = off[tg.where]
            shifted = Gate(
                tg.gate.name,
                tuple(q - o for q in tg.gate.qubits),
                tg.gate.params,
                tg.gate.cbits,
            )
            out[tg.where].gates.append(shifted)
        return out

    def per_chip_layers(self) -> dict[str, LayeredCircuit]:
        return {cid: build_layers(c) for cid, c in self.per_chip_circuits().items()}

    def global_layers(self) -> LayeredCircuit:
        shell = Circuit(self.num_physical, self.num_clbits)
        shell.gates = [tg.gate for tg in self.gates]
        return build_layers(shell)


@dataclass
class OpMetrics:
    """Structural counts read off a compiled circuit's tags."""

    s_on: int
    s_inter: int
    depth_per_chip: dict[str, int]
    two_q_on_chip: int
    measured: list[int]


def metrics(cc: CompiledCircuit) -> OpMetrics:
    s_on = 0
    s_inter = 0
    two_q = 0
    for tg in cc.gates:
        if tg.scope == "link":
            s_inter += 1
        elif tg.gate.is_two_qubit:
            two_q += 1
            if tg.gate.name == "swap":
                s_on += 1
    depth = {cid: lc.depth for cid, lc in cc.per_chip_layers().items()}
    return OpMetrics(
        s_on=s_on,
        s_inter=s_inter,
        depth_per_chip=depth,
        two_q_on_chip=two_q,
        measured=list(cc.measured),
    )


@dataclass
class FragmentPlan:
    """One fragment's local circuit plus bookkeeping for reassembly.

    ``origins[i]`` is the logical-circuit gate index behind local gate i;
    markers (is_marker[i] True) are barrier stand-ins for crossing gates.
    ``qubits`` lists the fragment's global logical qubits; local index j
    holds qubits[j]. Constraints use local indices.
    """

    chip_id: str
    qubits: list[int]
    circuit: Circuit
    origins: list[int] = field(default_factory=list)
    is_marker: list[bool] = field(default_factory=list)
    constraints: list[BoundaryConstraint] = field(default_factory=list)


def extract_fragments(
    circuit: Circuit,
    fragments: list[list[int]],
    sys: ModularSystem,
    assignment,
) -> list[FragmentPlan]:
    """Split the circuit along the partition and derive boundary pins."""
    slot_of: dict[int, int] = {}
    for i, frag in enumerate(fragments):
        for q in frag:
            slot_of[q] = i
    if sorted(slot_of) != list(range(circuit.num_qubits)):
        raise ValidationError("partition does not cover the circuit's qubits")

    plans: list[FragmentPlan] = []
    for i, frag in enumerate(fragments):
        qubits = sorted(frag)
        plans.append(
            FragmentPlan(
                chip_id=assignment.chips[i],
                qubits=qubits,
                circuit=Circuit(len(qubits), circuit.num_clbits),
            )
        )
    local = {
        q: plans[slot_of[q]].qubits.index(q) for q in range(circuit.num_qubits)
    }

    def push(slot: int, gate: Gate, origin: int, marker: bool) -> None:
        plan = plans[slot]
        plan.circuit.append(gate)
        plan.origins.append(origin)
        plan.is_marker.append(marker)

    crossings: list[tuple[int, int, int]] = []  # (gate idx, qubit u, qubit v)
    for g, gate in enumerate(circuit.gates):
        if gate.name == "barrier":
            by_slot: dict[int, list[int]] = {}
            for q in gate.qubits:
                by_slot.setdefault(slot_of[q], []).append(q)
            for slot, qs in sorted(by_slot.items()):
                push(slot, Gate("barrier", tuple(local[q] for q in qs)), g, False)
            continue
        if not gate.is_two_qubit:
            q = gate.qubits[0]
            push(slot_of[q], gate.remap(local), g, False)
            continue
        u, v = gate.qubits
        if slot_of[u] == slot_of[v]:
            push(slot_of[u], gate.remap(local), g, False)
            continue
        crossings.append((g, u, v))
        push(slot_of[u], Gate("barrier", (local[u],)), g, True)
        push(slot_of[v], Gate("barrier", (local[v],)), g, True)

    _derive_pins(circuit, plans, slot_of, local, crossings, sys, assignment)
    return plans


def _derive_pins(
    circuit: Circuit,
    plans: list[FragmentPlan],
    slot_of: dict[int, int],
    local: dict[int, int],
    crossings: list[tuple[int, int, int]],
    sys: ModularSystem,
    assignment,
) -> None:
    """One pin per crossing qubit, at its first crossing's link endpoint.

    The pin is initial-phase when that crossing precedes all of the qubit's
    on-fragment two-qubit gates, else final-phase. Colliding pins (same
    physical slot, or a second pin for the same qubit) are dropped; assembly
    drags stray operands to the endpoints when needed.
    """
    first_local_2q: dict[int, int] = {}
    for g, gate in enumerate(circuit.gates):
        if gate.is_two_qubit and slot_of[gate.qubits[0]] == slot_of[gate.qubits[1]]:
            for q in gate.qubits:
                first_local_2q.setdefault(q, g)

    pinned_qubits: set[int] = set()
    taken: dict[tuple[int, str, int], int] = {}  # (slot, phase, physical) -> qubit
    for g, u, v in crossings:
        edge = (u, v) if u < v else (v, u)
        link_id = assignment.link_choice.get(edge)
        if link_id is None:
            raise ValidationError(f"no link assigned for cut edge {edge}")
        link = sys.link(link_id)
        for q in (u, v):
            if q in pinned_qubits:
                continue
            slot = slot_of[q]
            chip_id = plans[slot].chip_id
            endpoint = link.endpoint_on(chip_id)
            phase = INITIAL if g < first_local_2q.get(q, g + 1) else FINAL
            if (slot, phase, endpoint) in taken:
                continue
            if phase == INITIAL and (slot, FINAL, endpoint) in taken:
                # A final pin may coexist; an initial one on the same slot
                # would collide at layout time only if both seeds land, so
                # keep the earlier claim and drop this one.
                continue
            taken[(slot, phase, endpoint)] = q
            pinned_qubits.add(q)
            plans[slot].constraints.append(
                BoundaryConstraint(local[q], endpoint, phase)
            )


@dataclass
class _Stream:
    """Cursor over one routed fragment during assembly."""

    plan: FragmentPlan
    routed: RoutedFragment
    offset: int
    ptr: int = 0
    emitted: set[int] = field(default_factory=set)

    def origin_of(self, j: int) -> int | None:
        r = self.routed.origins[j]
        return None if r is None else self.plan.origins[r]

    def marker_at(self, j: int) -> bool:
        r = self.routed.origins[j]
        return r is not None and self.plan.is_marker[r]


class _Assembler:
    def __init__(
        self,
        routed: list[RoutedFragment],
        fragments: list[list[int]],
        sys: ModularSystem,
        assignment,
        circuit: Circuit,
    ) -> None:
        if len(routed) != len(fragments):
            raise ValidationError("one routed fragment per partition fragment required")
        self.sys = sys
        self.circuit = circuit
        self.assignment = assignment
        self.offsets: dict[str, int] = {}
        total = 0
        for chip in sys.chips:
            self.offsets[chip.id] = total
            total += chip.num_qubits
        self.num_physical = total
        self.plans = extract_fragments(circuit, fragments, sys, assignment)
        self.streams = [
            _Stream(plan, r, self.offsets[plan.chip_id])
            for plan, r in zip(self.plans, routed)
        ]
        for plan, r in zip(self.plans, routed):
            if r.chip_id != plan.chip_id:
                raise ValidationError(
                    f"routed fragment for chip '{r.chip_id}' assigned to "
                    f"'{plan.chip_id}'"
                )
        self.slot_of = {}
        for i, frag in enumerate(fragments):
            for q in frag:
                self.slot_of[q] = i
        self.loc: dict[int, int] = {}
        self.occ: dict[int, int] = {}
        for stream in self.streams:
            for lq, p in stream.routed.initial_mapping.items():
                gq = stream.plan.qubits[lq]
                gp = stream.offset + p
                self.loc[gq] = gp
                self.occ[gp] = gq
        if len(self.occ) != circuit.num_qubits:
            raise ValidationError("fragment initial mappings overlap")
        self.finish = [-1] * circuit.num_qubits
        for g, gate in enumerate(circuit.gates):
            for q in gate.qubits:
                self.finish[q] = g
        self.out: list[TaggedGate] = []
        self.processed: set[int] = set()
        self.measured_wires: set[int] = set()

    # Low-level emission; swaps move tracked states unless they are the
    # circuit's own swap gates (those exchange wire contents, not wires).

    def emit(self, gate: Gate, scope: str, where: str, origin: str) -> None:
        self.out.append(TaggedGate(gate, scope, where, origin))
        if gate.name == "measure":
            wire = self.occ.get(gate.qubits[0])
            if wire is not None:
                self.measured_wires.add(wire)
        if gate.name == "swap" and origin in (ROUTING, TRANSFER):
            pa, pb = gate.qubits
            qa, qb = self.occ.get(pa), self.occ.get(pb)
            if qa is not None:
                self.loc[qa] = pb
            if qb is not None:
                self.loc[qb] = pa
            self.occ.pop(pa, None)
            self.occ.pop(pb, None)
            if qa is not None:
                self.occ[pb] = qa
            if qb is not None:
                self.occ[pa] = qb

    def chip_id_of_global(self, p: int) -> str:
        for chip in reversed(self.sys.chips):
            if p >= self.offsets[chip.id]:
                return chip.id
        raise ValidationError(f"global qubit {p} off the system")  # pragma: no cover

    def chain_swap(self, pa: int, pb: int, record: list[tuple[int, int]]) -> None:
        cid = self.chip_id_of_global(pa)
        self.emit(Gate("swap", (pa, pb)), "chip", cid, ROUTING)
        record.append((pa, pb))

    def local_path(self, src: int, dst: int) -> list[int]:
        """Shortest global-id path within one chip from src to dst."""
        cid = self.chip_id_of_global(src)
        chip = self.sys.chip(cid)
        off = self.offsets[cid]
        dist = chip.distances()
        a, b = src - off, dst - off
        path = [a]
        cur = a
        while cur != b:
            cur = min(
                (p for p in chip.adj[cur]),
                key=lambda p: (dist[p][b], p),
            )
            path.append(cur)
        return [off + p for p in path]

    # Stream draining

    def drain(
        self,
        slot: int,
        stop_origin: int | None = None,
        until_markers: set[int] | None = None,
        intercept: set[int] | None = None,
    ) -> None:
        stream = self.streams[slot]
        if stop_origin is not None and stop_origin in stream.emitted:
            return
        markers_left = set(until_markers) if until_markers else set()
        if until_markers is not None:
            markers_left -= stream.emitted
            if not markers_left:
                return
        gates = stream.routed.gates
        while stream.ptr < len(gates):
            j = stream.ptr
            gate = gates[j]
            origin = stream.origin_of(j)
            stream.ptr += 1
            if origin is None:
                self.emit(
                    Gate(gate.name, tuple(stream.offset + q for q in gate.qubits)),
                    "chip",
                    stream.plan.chip_id,
                    ROUTING,
                )
                continue
            stream.emitted.add(origin)
            if stream.marker_at(j):
                markers_left.discard(origin)
                if until_markers is not None and not markers_left:
                    return
                continue
            if origin in self.processed or (intercept and origin in intercept):
                # Executed by an episode at its live locations already.
                continue
            shifted = Gate(
                gate.name,
                tuple(stream.offset + q for q in gate.qubits),
                gate.params,
                gate.cbits,
            )
            self.emit(shifted, "chip", stream.plan.chip_id, CIRCUIT)
            if stop_origin is not None and origin == stop_origin:
                return
        if stop_origin is not None or markers_left:
            raise InfeasibleError(
                "fragment stream exhausted before its dependency; "
                "cross-fragment gate order is cyclic"
            )

    def flush_all(self) -> None:
        for slot in range(len(self.streams)):
            self.drain(slot)

    # Main walk

    def run(self) -> CompiledCircuit:
        gates = self.circuit.gates
        for g, gate in enumerate(gates):
            if g in self.processed:
                continue
            touched = sorted({self.slot_of[q] for q in gate.qubits})
            if len(touched) == 1:
                self.drain(touched[0], stop_origin=g)
                continue
            if gate.name == "barrier":
                for slot in touched:
                    self.drain(slot, stop_origin=g)
                continue
            self.episode(g)
        self.flush_all()
        return self.finalize()

    def scan_run(self, g: int) -> list[int]:
        u, v = self.circuit.gates[g].qubits
        slots = {self.slot_of[u], self.slot_of[v]}
        run = [g]
        for j in range(g + 1, len(self.circuit.gates)):
            gate = self.circuit.gates[j]
            qs = set(gate.qubits)
            if not qs & {u, v}:
                if gate.is_two_qubit:
                    jslots = {self.slot_of[q] for q in gate.qubits}
                    if len(jslots) > 1 and jslots & slots:
                        # Another pair's crossing with a marker on one of
                        # this pair's streams; draining past it would emit
                        # gates that belong after that crossing.
                        break
                continue
            if gate.is_two_qubit:
                if qs == {u, v}:
                    run.append(j)
                    continue
                break
            if qs <= {u, v}:
                run.append(j)
                continue
            break  # barrier straddling other qubits ends the run
        return run

    def episode(self, g: int) -> None:
        circuit = self.circuit
        u, v = circuit.gates[g].qubits
        slot_u, slot_v = self.slot_of[u], self.slot_of[v]
        edge = (u, v) if u < v else (v, u)
        link_id = self.assignment.link_choice.get(edge)
        if link_id is None:
            raise ValidationError(f"no link assigned for cut edge {edge}")
        link = self.sys.link(link_id)
        run = self.scan_run(g)
        crossings = [
            j for j in run if circuit.gates[j].is_two_qubit
        ]
        run_set = set(run)
        for slot in (slot_u, slot_v):
            self.drain(slot, until_markers=set(crossings), intercept=run_set)

        plan = self.plan_policy(u, v, slot_u, slot_v, link, run)
        self.execute_episode(u, v, slot_u, slot_v, link, link_id, run, plan)
        self.processed.update(run)

    # Policy planning

    def chip_range(self, slot: int) -> range:
        chip_id = self.plans[slot].chip_id
        off = self.offsets[chip_id]
        return range(off, off + self.sys.chip(chip_id).num_qubits)

    def park_landings(self, slot: int) -> list[int]:
        """Slots whose state may be permanently displaced off the chip.

        Free slots qualify, as do slots holding a state whose every circuit
        gate was already emitted; a state with pending stream gates must
        stay put or those gates would act on the wrong slot later.
        """
        found = []
        for p in self.chip_range(slot):
            q = self.occ.get(p)
            if (
                q is None
                or self.finish[q] < 0
                or self.finish[q] in self.streams[self.slot_of[q]].emitted
            ):
                found.append(p)
        return found

    def plan_policy(
        self,
        u: int,
        v: int,
        slot_u: int,
        slot_v: int,
        link: Link,
        run: list[int],
    ) -> dict:
        circuit = self.circuit
        g = run[0]
        m = sum(1 for j in run if circuit.gates[j].is_two_qubit)
        last = max(run)
        eu = self.offsets[self.plans[slot_u].chip_id] + link.endpoint_on(
            self.plans[slot_u].chip_id
        )
        ev = self.offsets[self.plans[slot_v].chip_id] + link.endpoint_on(
            self.plans[slot_v].chip_id
        )

        def d(a: int, b: int) -> int:
            cid = self.chip_id_of_global(a)
            off = self.offsets[cid]
            return self.sys.chip(cid).distances()[a - off][b - off]

        candidates: list[tuple[int, int, int, dict]] = []
        per_gate_swaps = 2 * (d(self.loc[u], eu) + d(self.loc[v], ev))
        candidates.append(
            (m, per_gate_swaps, 0, {"kind": "per_gate", "eu": eu, "ev": ev})
        )

        def relocation(mover, other, e_src, e_dst, dst_slot, landing, returns):
            shift = d(landing, e_dst)
            drag = d(self.loc[mover], e_src)
            walk = max(0, d(e_dst, self.loc[other]) - 1)
            spec = {
                "kind": "relocate",
                "mover": mover,
                "other": other,
                "e_src": e_src,
                "e_dst": e_dst,
                "landing": landing,
                "returns": returns,
            }
            return 2 * (shift + drag + walk), spec

        sides = ((v, u, ev, eu, slot_u), (u, v, eu, ev, slot_v))
        for order, (mover, other, e_src, e_dst, dst_slot) in enumerate(sides):
            if self.finish[mover] <= last:
                landings = [
                    p for p in self.park_landings(dst_slot) if p != self.loc[other]
                ]
                if landings:
                    landing = min(landings, key=lambda p: (d(p, e_dst), p))
                    swaps, spec = relocation(
                        mover, other, e_src, e_dst, dst_slot, landing, False
                    )
                    candidates.append((1, swaps, 1 + order, spec))
            visits = [p for p in self.chip_range(dst_slot) if p != self.loc[other]]
            if visits:
                landing = min(
                    visits,
                    key=lambda p: (d(p, e_dst), 0 if self.occ.get(p) is None else 1, p),
                )
                swaps, spec = relocation(
                    mover, other, e_src, e_dst, dst_slot, landing, True
                )
                candidates.append((2, swaps, 3 + order, spec))

        candidates.sort(key=lambda c: (c[0], c[1], c[2]))
        return candidates[0][3]

    # Episode execution

    def execute_episode(
        self,
        u: int,
        v: int,
        slot_u: int,
        slot_v: int,
        link: Link,
        link_id: str,
        run: list[int],
        plan: dict,
    ) -> None:
        circuit = self.circuit

        def emit_run_element(j: int, inter_pair: tuple[int, int] | None) -> None:
            gate = circuit.gates[j]
            if gate.is_two_qubit:
                if inter_pair is not None:
                    ops = tuple(inter_pair[0 if q == u else 1] for q in gate.qubits)
                    self.emit(Gate(gate.name, ops, gate.params), "link", link_id, CIRCUIT)
                else:
                    ops = tuple(self.loc[q] for q in gate.qubits)
                    cid = self.chip_id_of_global(ops[0])
                    self.emit(Gate(gate.name, ops, gate.params), "chip", cid, CIRCUIT)
                return
            q = gate.qubits[0]
            p = self.loc[q]
            cid = self.chip_id_of_global(p)
            self.emit(Gate(gate.name, (p,), gate.params, gate.cbits), "chip", cid, CIRCUIT)

        if plan["kind"] == "per_gate":
            eu, ev = plan["eu"], plan["ev"]
            record: list[tuple[int, int]] = []
            for q, endpoint in ((u, eu), (v, ev)):
                path = self.local_path(self.loc[q], endpoint)
                for step in path[1:]:
                    self.chain_swap(self.loc[q], step, record)
            for j in run:
                emit_run_element(j, (self.loc[u], self.loc[v]))
            for pa, pb in reversed(record):
                self.chain_swap(pb, pa, [])
            return

        mover, other = plan["mover"], plan["other"]
        e_src, e_dst = plan["e_src"], plan["e_dst"]
        landing = plan["landing"]

        drag: list[tuple[int, int]] = []
        path = self.local_path(self.loc[mover], e_src)
        for step in path[1:]:
            self.chain_swap(self.loc[mover], step, drag)

        shift: list[tuple[int, int]] = []
        path = self.local_path(landing, e_dst)
        cur = landing
        for step in path[1:]:
            self.chain_swap(cur, step, shift)
            cur = step

        self.emit(Gate("swap", (min(e_src, e_dst), max(e_src, e_dst))), "link", link_id, TRANSFER)

        walk: list[tuple[int, int]] = []
        path = self.local_path(self.loc[mover], self.loc[other])
        for step in path[1:-1]:
            self.chain_swap(self.loc[mover], step, walk)

        for j in run:
            emit_run_element(j, None)

        for pa, pb in reversed(walk):
            self.chain_swap(pb, pa, [])
        if plan["returns"]:
            self.emit(
                Gate("swap", (min(e_src, e_dst), max(e_src, e_dst))),
                "link",
                link_id,
                TRANSFER,
            )
        for pa, pb in reversed(shift):
            self.chain_swap(pb, pa, [])
        for pa, pb in reversed(drag):
            self.chain_swap(pb, pa, [])

    def finalize(self) -> CompiledCircuit:
        cc = CompiledCircuit(
            num_logical=self.circuit.num_qubits,
            num_physical=self.num_physical,
            num_clbits=self.circuit.num_clbits,
            chips_used=[p.chip_id for p in self.plans],
            chip_slots=[
                (c.id, self.offsets[c.id], c.num_qubits) for c in self.sys.chips
            ],
        )
        cc.gates = self.out
        for stream in self.streams:
            for lq, p in stream.routed.initial_mapping.items():
                cc.initial_mapping[stream.plan.qubits[lq]] = stream.offset + p
        cc.final_mapping = dict(self.loc)
        cc.measured = sorted(self.measured_wires)
        return cc


def assemble(
    routed: list[RoutedFragment],
    fragments: list[list[int]],
    sys: ModularSystem,
    assignment,
    circuit: Circuit,
) -> CompiledCircuit:
    """Merge routed fragments into one tagged global circuit."""
    return _Assembler(routed, fragments, sys, assignment, circuit).run()


def _pragma(tg: TaggedGate) -> str:
    kind = "chip" if tg.scope == "chip" else "link"
    return f"@{kind}:{tg.where}"


def to_annotated_qasm(cc: CompiledCircuit) -> str:
    """Serialize over the flattened physical register, one pragma per gate."""
    from .qasm import emit_qasm

    shell = Circuit(cc.num_physical, cc.num_clbits)
    shell.gates = [tg.gate for tg in cc.gates]
    comments = [f"// {_pragma(tg)}" for tg in cc.gates]
    return emit_qasm(shell, comments)


def sidecar_dict(cc: CompiledCircuit) -> dict:
    return {
        "num_logical": cc.num_logical,
        "initial_mapping": {str(q): p for q, p in sorted(cc.initial_mapping.items())},
        "final_mapping": {str(q): p for q, p in sorted(cc.final_mapping.items())},
        "tags": [
            {"scope": tg.scope, "where": tg.where, "origin": tg.origin}
            for tg in cc.gates
        ],
        "chips_used": list(cc.chips_used),
        "chip_slots": [list(row) for row in cc.chip_slots],
        "measured": list(cc.measured),
    }


def compiled_from_artifacts(qasm_text: str, sidecar: dict) -> CompiledCircuit:
    """Rebuild a compiled circuit from its QASM and sidecar, cross-checking.

    The pragma stream embedded in the QASM must agree with the sidecar's
    tag list gate for gate.
    """
    from .qasm import parse_qasm

    shell = parse_qasm(qasm_text)
    try:
        tags = sidecar["tags"]
        cc = CompiledCircuit(
            num_logical=int(sidecar["num_logical"]),
            num_physical=shell.num_qubits,
            num_clbits=shell.num_clbits,
            initial_mapping={
                int(k): int(v) for k, v in sidecar["initial_mapping"].items()
            },
            final_mapping={
                int(k): int(v) for k, v in sidecar["final_mapping"].items()
            },
            chips_used=[str(c) for c in sidecar["chips_used"]],
            chip_slots=[
                (str(c), int(o), int(s)) for c, o, s in sidecar["chip_slots"]
            ],
            measured=[int(q) for q in sidecar["measured"]],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed compiled-circuit sidecar: {exc}") from exc
    if len(tags) != len(shell.gates):
        raise ValidationError(
            f"sidecar lists {len(tags)} tags but the circuit has "
            f"{len(shell.gates)} gates"
        )
    for i, (gate, tag) in enumerate(zip(shell.gates, tags)):
        if not isinstance(tag, dict):
            raise ValidationError(f"tag {i} is not an object")
        scope = tag.get("scope")
        if scope not in ("chip", "link"):
            raise ValidationError(f"tag {i} has invalid scope {scope!r}")
        cc.gates.append(
            TaggedGate(gate, scope, str(tag.get("where")), str(tag.get("origin")))
        )
    embedded = [
        line.strip()[3:]
        for line in qasm_text.splitlines()
        if line.strip().startswith("// @")
    ]
    expected = [_pragma(tg) for tg in cc.gates]
    if embedded != expected:
        raise ValidationError(
            "placement pragmas in the QASM disagree with the sidecar tags"
        )
    return cc
