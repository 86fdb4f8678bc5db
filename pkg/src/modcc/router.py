"""Boundary-constrained routing of one circuit fragment onto one chip.

Routing is deterministic: gate order, candidate ordering, and every tie-break
are fixed, so repeated runs (and any seed) give identical output. The seed
parameter exists for interface compatibility with external local compilers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InfeasibleError, ValidationError
from .ir import Circuit, Gate
from .system import Chip

LOOKAHEAD_WINDOW = 20
LOOKAHEAD_WEIGHT = 0.5
DECAY_STEP = 0.1

INITIAL = "initial"
FINAL = "final"


@dataclass(frozen=True)
class BoundaryConstraint:
    """Pin a fragment-local logical qubit to a physical slot.

    phase "initial": the qubit must start there (hand-off from a previous
    inter-chip move). phase "final": it must end there (feeding the next
    inter-chip move).
    """

    logical: int
    physical: int
    phase: str

    def __post_init__(self) -> None:
        if self.phase not in (INITIAL, FINAL):
            raise ValidationError(f"unknown constraint phase '{self.phase}'")


@dataclass
class RoutedFragment:
    """One fragment lowered to physical operands on a single chip.

    ``origins[i]`` is the input gate index that produced ``gates[i]``, or
    None for an inserted routing swap. Inserted swaps update the
    logical-to-physical mapping; swaps present in the input circuit do not,
    because they exchange states, not wires.
    """

    chip_id: str
    gates: list[Gate] = field(default_factory=list)
    origins: list[int | None] = field(default_factory=list)
    initial_mapping: dict[int, int] = field(default_factory=dict)
    final_mapping: dict[int, int] = field(default_factory=dict)
    swap_count: int = 0


def _build_dag(gates: list[Gate], num_qubits: int) -> tuple[list[list[int]], list[int]]:
    """Conservative per-qubit dependencies: successors list and indegrees.

    Barriers fence every wire, not just their operands. They mark hand-off
    points with the surrounding assembly, so nothing may drift across one in
    the emitted stream, commuting or not.
    """
    succ: list[list[int]] = [[] for _ in gates]
    indeg = [0] * len(gates)
    last: dict[int, int] = {}
    for i, g in enumerate(gates):
        fence = g.name == "barrier"
        wires = range(num_qubits) if fence else g.qubits
        for j in {last[q] for q in wires if q in last}:
            succ[j].append(i)
            indeg[i] += 1
        for q in wires:
            last[q] = i
    return succ, indeg


def _place_initial(
    frag: Circuit,
    chip: Chip,
    constraints: list[BoundaryConstraint],
    link_endpoints: set[int],
) -> dict[int, int]:
    """Choose the starting layout.

    Pins are hard. When spare slots exist, one free neighbor of each pinned
    endpoint is held back so later state hand-offs have a short landing
    path. Everyone else expands outward from already-placed neighbors.
    """
    n = frag.num_qubits
    if n > chip.num_qubits:
        raise InfeasibleError(
            f"fragment of {n} qubits exceeds chip '{chip.id}' ({chip.num_qubits})"
        )
    mapping: dict[int, int] = {}
    used: set[int] = set()
    for phase in (INITIAL, FINAL):
        for c in sorted(
            (c for c in constraints if c.phase == phase),
            key=lambda c: (c.logical, c.physical),
        ):
            if not 0 <= c.physical < chip.num_qubits:
                raise ValidationError(
                    f"pin to physical {c.physical} is off chip '{chip.id}'"
                )
            if not 0 <= c.logical < n:
                raise ValidationError(f"pin references unknown logical {c.logical}")
            if c.logical in mapping:
                if phase == INITIAL and mapping[c.logical] != c.physical:
                    raise InfeasibleError(
                        f"no feasible boundary assignment: logical {c.logical} "
                        f"pinned to two initial slots"
                    )
                continue  # final pin is a soft seed when an initial pin exists
            if c.physical in used:
                if phase == INITIAL:
                    raise InfeasibleError(
                        f"no feasible boundary assignment: physical {c.physical} "
                        f"pinned twice on chip '{chip.id}'"
                    )
                continue  # final-phase seed only when the slot is free
            mapping[c.logical] = c.physical
            used.add(c.physical)

    # Hold one free neighbor per pinned link endpoint while spares allow.
    reserved: set[int] = set()
    spare = chip.num_qubits - n
    for p in sorted(used & link_endpoints):
        if spare <= len(reserved):
            break
        for nbr in chip.adj[p]:
            if nbr not in used and nbr not in reserved:
                reserved.add(nbr)
                break

    # Interaction weights between fragment-local logicals.
    weight: dict[int, dict[int, int]] = {q: {} for q in range(n)}
    for g in frag.gates:
        if g.is_two_qubit:
            a, b = g.qubits
            weight[a][b] = weight[a].get(b, 0) + 1
            weight[b][a] = weight[b].get(a, 0) + 1

    dist = chip.distances()
    endpoint_zone = link_endpoints | {
        nbr for p in link_endpoints for nbr in chip.adj[p]
    }
    remaining = [q for q in range(n) if q not in mapping]
    while remaining:
        remaining.sort(
            key=lambda q: (
                -sum(w for v, w in weight[q].items() if v in mapping),
                q,
            )
        )
        q = remaining.pop(0)
        placed_nbrs = [(mapping[v], w) for v, w in weight[q].items() if v in mapping]
        candidates = [
            p for p in range(chip.num_qubits) if p not in used and p not in reserved
        ]
        if not candidates:
            candidates = [p for p in range(chip.num_qubits) if p not in used]
        if not candidates:
            raise InfeasibleError(f"chip '{chip.id}' ran out of slots")  # pragma: no cover

        def placement_key(p: int) -> tuple[float, int, int]:
            pull = sum(w * dist[p][loc] for loc, w in placed_nbrs)
            return (pull, 1 if p in endpoint_zone else 0, p)

        best = min(candidates, key=placement_key)
        mapping[q] = best
        used.add(best)
    return mapping


def _interaction_weights(frag: Circuit) -> dict[int, dict[int, int]]:
    weight: dict[int, dict[int, int]] = {q: {} for q in range(frag.num_qubits)}
    for g in frag.gates:
        if g.is_two_qubit:
            a, b = g.qubits
            weight[a][b] = weight[a].get(b, 0) + 1
            weight[b][a] = weight[b].get(a, 0) + 1
    return weight


def _place_linear(
    frag: Circuit, chip: Chip, constraints: list[BoundaryConstraint]
) -> dict[int, int] | None:
    """Lay an interaction-order walk along the chip's index path.

    Chain-shaped circuits route swap-free this way when the chip's slots
    are consecutively adjacent. Returns None when the chip has no index
    path, a pin cannot anchor the walk, or a hard pin ends up violated;
    the greedy placement is the fallback either way.
    """
    n = frag.num_qubits
    if n > chip.num_qubits:
        return None
    if any(not chip.has_edge(i, i + 1) for i in range(chip.num_qubits - 1)):
        return None

    pins: dict[int, int] = {}
    for phase in (INITIAL, FINAL):
        for c in sorted(
            (c for c in constraints if c.phase == phase),
            key=lambda c: (c.logical, c.physical),
        ):
            if not 0 <= c.logical < n or not 0 <= c.physical < chip.num_qubits:
                return None
            if c.logical in pins or c.physical in pins.values():
                continue
            pins[c.logical] = c.physical

    weight = _interaction_weights(frag)
    hard = sorted(
        c.logical
        for c in constraints
        if c.phase == INITIAL and c.logical in pins
    )
    anchor = hard[0] if hard else (min(pins) if pins else 0)
    order: list[int] = []
    seen: set[int] = set()
    for root in [anchor] + list(range(n)):
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            q = queue.pop(0)
            order.append(q)
            for v in sorted(weight[q], key=lambda v: (-weight[q][v], v)):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)

    start = pins.get(anchor, 0)
    for step in (1, -1):
        end = start + step * (n - 1)
        if not 0 <= end < chip.num_qubits:
            continue
        mapping = {q: start + step * i for i, q in enumerate(order)}
        initial = {
            c.logical: c.physical for c in constraints if c.phase == INITIAL
        }
        if all(mapping[q] == p for q, p in initial.items()):
            return mapping
    return None


def route_fragment(
    frag: Circuit,
    chip: Chip,
    constraints: list[BoundaryConstraint] | None = None,
    seed: int = 0,
    strategy: str = "auto",
) -> RoutedFragment:
    """Lower ``frag`` onto ``chip``, inserting swaps where connectivity demands.

    ``strategy`` fixes the initial layout: "greedy" pulls each qubit next to
    its already-placed interaction partners, "linear" lays an
    interaction-order walk along the chip's index path (falling back to
    greedy when no such walk fits the pins), and "auto" routes both and
    keeps the result with fewer swaps. Front-layer gates run as soon as
    their operands are adjacent; otherwise the swap minimizing
    current-plus-lookahead distance (with an additive per-qubit decay to
    spread traffic) is inserted. Pins from ``constraints`` are enforced in
    the initial layout and, for the final phase, restored by token swaps
    after the last gate.
    """
    del seed  # deterministic by construction
    if strategy not in ("auto", "greedy", "linear"):
        raise ValidationError(f"unknown placement strategy '{strategy}'")
    constraints = constraints or []
    link_endpoints = {
        c.physical for c in constraints if 0 <= c.physical < chip.num_qubits
    }
    layouts: list[dict[int, int]] = []
    if strategy != "linear":
        layouts.append(_place_initial(frag, chip, constraints, link_endpoints))
    if strategy != "greedy":
        linear = _place_linear(frag, chip, constraints)
        if linear is not None and linear not in layouts:
            layouts.append(linear)
    if not layouts:  # linear requested but no index walk fits
        layouts.append(_place_initial(frag, chip, constraints, link_endpoints))
    best: RoutedFragment | None = None
    for mapping in layouts:
        routed = _route_with(frag, chip, constraints, mapping)
        if best is None or routed.swap_count < best.swap_count:
            best = routed
    assert best is not None
    return best


def _route_with(
    frag: Circuit,
    chip: Chip,
    constraints: list[BoundaryConstraint],
    mapping: dict[int, int],
) -> RoutedFragment:
    out = RoutedFragment(chip_id=chip.id, initial_mapping=dict(mapping))

    gates = frag.gates
    succ, indeg = _build_dag(gates, frag.num_qubits)
    front = sorted(i for i, d in enumerate(indeg) if d == 0)
    executed: set[int] = set()
    pending = len(gates)
    dist = chip.distances()
    loc = dict(mapping)  # logical -> physical
    occ = {p: q for q, p in loc.items()}  # physical -> logical
    decay: dict[int, float] = {}
    stall = 0
    stall_limit = max(20, 2 * chip.num_qubits)
    guard = 64 * (len(gates) + 4) * (chip.num_qubits + 4)

    def emit(gate: Gate, origin: int | None) -> None:
        out.gates.append(gate)
        out.origins.append(origin)

    def finish(i: int) -> None:
        nonlocal stall
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                front.append(j)
        front.sort()
        decay.clear()
        stall = 0

    def do_swap(pa: int, pb: int, origin: int | None = None) -> None:
        nonlocal stall
        emit(Gate("swap", (pa, pb)), origin)
        qa, qb = occ.get(pa), occ.get(pb)
        if qa is not None:
            loc[qa] = pb
        if qb is not None:
            loc[qb] = pa
        occ.pop(pa, None)
        occ.pop(pb, None)
        if qa is not None:
            occ[pb] = qa
        if qb is not None:
            occ[pa] = qb
        out.swap_count += 1
        decay[pa] = decay.get(pa, 0.0) + DECAY_STEP
        decay[pb] = decay.get(pb, 0.0) + DECAY_STEP
        stall += 1

    while pending:
        guard -= 1
        if guard < 0:
            raise InfeasibleError(
                f"routing did not converge on chip '{chip.id}'"
            )  # pragma: no cover
        progressed = False
        for i in list(front):
            g = gates[i]
            if g.is_two_qubit:
                pa, pb = loc[g.qubits[0]], loc[g.qubits[1]]
                if not chip.has_edge(pa, pb):
                    continue
                if g.name == "swap":
                    emit(Gate("swap", (pa, pb)), i)  # state swap, wires stay
                else:
                    emit(g.remap(loc), i)
            else:
                emit(g.remap(loc), i)
            front.remove(i)
            executed.add(i)
            pending -= 1
            finish(i)
            progressed = True
        if progressed or not pending:
            continue

        blocked = [i for i in front if gates[i].is_two_qubit]
        if not blocked:
            raise InfeasibleError("stuck with no two-qubit gate to unblock")  # pragma: no cover

        if stall > stall_limit:
            # Livelock fallback: walk the oldest blocked gate together.
            g = gates[blocked[0]]
            pa, pb = loc[g.qubits[0]], loc[g.qubits[1]]
            step = min(chip.adj[pa], key=lambda p: (dist[p][pb], p))
            do_swap(*sorted((pa, step)))
            continue

        window: list[tuple[int, int]] = []
        for i, g in enumerate(gates):
            if i in executed or i in front or not g.is_two_qubit:
                continue
            window.append((loc[g.qubits[0]], loc[g.qubits[1]]))
            if len(window) >= LOOKAHEAD_WINDOW:
                break

        candidates: set[tuple[int, int]] = set()
        for i in blocked:
            for q in gates[i].qubits:
                p = loc[q]
                for nbr in chip.adj[p]:
                    candidates.add((p, nbr) if p < nbr else (nbr, p))

        def score(edge: tuple[int, int]) -> tuple[float, int, int]:
            x, y = edge
            qx, qy = occ.get(x), occ.get(y)
            trial = dict(loc)
            if qx is not None:
                trial[qx] = y
            if qy is not None:
                trial[qy] = x
            h = 0.0
            for i in blocked:
                a, b = gates[i].qubits
                h += dist[trial[a]][trial[b]]
            ext = 0.0
            for pa, pb in window:
                a2 = y if pa == x else (x if pa == y else pa)
                b2 = y if pb == x else (x if pb == y else pb)
                ext += dist[a2][b2]
            return (h + LOOKAHEAD_WEIGHT * ext + decay.get(x, 0.0) + decay.get(y, 0.0), x, y)

        do_swap(*min(sorted(candidates), key=score))

    pre_occ = dict(occ)
    tail = len(out.gates)
    _restore_final_pins(out, chip, constraints, loc, occ)
    if len(out.gates) > tail:
        cut = tail
        while (
            cut > 0
            and out.gates[cut - 1].name == "barrier"
            and len(out.gates[cut - 1].qubits) == 1
        ):
            cut -= 1
        if cut < tail:
            # Hop the restoration swaps over trailing one-wire markers so a
            # final-pinned qubit already sits at its endpoint when the
            # hand-offs behind those markers run. The markers' operands move
            # with their wires.
            hopped = [
                Gate(g.name, (loc[pre_occ[g.qubits[0]]],), g.params, g.cbits)
                for g in out.gates[cut:tail]
            ]
            out.gates[cut:] = out.gates[tail:] + hopped
            out.origins[cut:] = out.origins[tail:] + out.origins[cut:tail]
    out.final_mapping = dict(loc)
    return out


def _restore_final_pins(
    out: RoutedFragment,
    chip: Chip,
    constraints: list[BoundaryConstraint],
    loc: dict[int, int],
    occ: dict[int, int],
) -> None:
    """Token-swap each final-phase pin onto its slot after routing."""
    pins = {}
    for c in constraints:
        if c.phase != FINAL:
            continue
        if c.logical in pins and pins[c.logical] != c.physical:
            raise InfeasibleError(
                f"no feasible boundary assignment: logical {c.logical} has "
                f"conflicting final pins"
            )
        pins[c.logical] = c.physical
    targets = set(pins.values())
    if len(targets) != len(pins):
        raise InfeasibleError("no feasible boundary assignment: final pins collide")

    guard = 10 * (len(pins) + 1) * (chip.num_qubits + 1)
    queue = sorted(q for q, p in pins.items() if loc[q] != p)
    while queue:
        guard -= 1
        if guard < 0:
            raise InfeasibleError("final pin restoration did not converge")  # pragma: no cover
        q = queue.pop(0)
        target = pins[q]
        if loc[q] == target:
            continue
        settled = {
            pins[v] for v in pins if v != q and loc[v] == pins[v]
        }
        path = _bfs_path(chip, loc[q], target, avoid=settled)
        if path is None:
            path = _bfs_path(chip, loc[q], target, avoid=set())
        assert path is not None
        for step in path[1:]:
            pa = loc[q]
            displaced = occ.get(step)
            out.gates.append(Gate("swap", tuple(sorted((pa, step)))))
            out.origins.append(None)
            out.swap_count += 1
            loc[q] = step
            if displaced is not None:
                loc[displaced] = pa
                occ[pa] = displaced
            else:
                occ.pop(pa, None)
            occ[step] = q
        for v, p in pins.items():
            if loc[v] != p and v not in queue and v != q:
                queue.append(v)
        if loc[q] != pins[q]:
            queue.append(q)
        queue.sort()


def _bfs_path(
    chip: Chip, src: int, dst: int, avoid: set[int]
) -> list[int] | None:
    """Shortest path from src to dst skipping ``avoid`` interior nodes."""
    if src == dst:
        return [src]
    prev: dict[int, int] = {src: src}
    queue = [src]
    while queue:
        u = queue.pop(0)
        for v in chip.adj[u]:
            if v in prev or (v in avoid and v != dst):
                continue
            prev[v] = u
            if v == dst:
                path = [v]
                while path[-1] != src:
                    path.append(prev[path[-1]])
                return list(reversed(path))
            queue.append(v)
    return None


def validate_routed(
    frag_in: Circuit, routed: RoutedFragment, chip: Chip
) -> dict:
    """Check a routed fragment against its source circuit.

    Verifies on-chip connectivity of every two-qubit gate, that replaying
    inserted swaps transforms the initial mapping into the final mapping,
    and that the non-inserted gates match the input per qubit and as a
    multiset. Returns {"ok": bool, "issues": [...]}.
    """
    issues: list[str] = []
    n = frag_in.num_qubits
    init = routed.initial_mapping
    if sorted(init) != list(range(n)):
        issues.append("initial mapping does not cover the fragment qubits")
    if len(set(init.values())) != len(init):
        issues.append("initial mapping is not injective")
    if any(not 0 <= p < chip.num_qubits for p in init.values()):
        issues.append("initial mapping uses off-chip slots")
    if len(routed.origins) != len(routed.gates):
        issues.append("origin list length mismatch")
        return {"ok": False, "issues": issues}

    loc = dict(init)
    occ = {p: q for q, p in loc.items()}
    recovered: list[tuple[int, Gate]] = []
    inserted = 0
    for gate, origin in zip(routed.gates, routed.origins):
        if gate.is_two_qubit:
            if not chip.has_edge(gate.qubits[0], gate.qubits[1]):
                issues.append(
                    f"gate {gate.name} on non-adjacent slots {gate.qubits}"
                )
        if origin is None:
            if gate.name != "swap":
                issues.append(f"inserted gate must be a swap, found {gate.name}")
                continue
            pa, pb = gate.qubits
            qa, qb = occ.get(pa), occ.get(pb)
            if qa is not None:
                loc[qa] = pb
            if qb is not None:
                loc[qb] = pa
            occ.pop(pa, None)
            occ.pop(pb, None)
            if qa is not None:
                occ[pb] = qa
            if qb is not None:
                occ[pa] = qb
            inserted += 1
            continue
        back = {p: q for q, p in loc.items()}
        try:
            logical = tuple(back[p] for p in gate.qubits)
        except KeyError:
            issues.append(f"gate {gate.name} touches an unmapped slot {gate.qubits}")
            continue
        recovered.append((origin, Gate(gate.name, logical, gate.params, gate.cbits)))

    if inserted != routed.swap_count:
        issues.append(
            f"swap_count {routed.swap_count} but {inserted} inserted swaps found"
        )
    if loc != routed.final_mapping:
        issues.append("replayed final mapping disagrees with the recorded one")

    want = list(enumerate(frag_in.gates))
    got = sorted(recovered, key=lambda t: t[0])
    if [i for i, _ in got] != [i for i, _ in want] or [
        g for _, g in got
    ] != [g for _, g in want]:
        if sorted(g.name for _, g in got) == sorted(g.name for _, g in want):
            # Same multiset of names; pin down the first real mismatch.
            for (i, a), (j, b) in zip(got, want):
                if i != j or a != b:
                    issues.append(f"gate {j} recovered as {a} expected {b}")
                    break
            else:
                issues.append("recovered gate count differs from input")
        else:
            issues.append("recovered gates do not match the input multiset")
    return {"ok": not issues, "issues": issues}
