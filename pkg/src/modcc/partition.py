"""Chip ranking and capacitated partitioning of interaction graphs.

Fragments are non-empty and align index-for-index with the capacity vector,
so capacities[i] is the room on the chip that will host fragment i.
"""

from __future__ import annotations

from .errors import InfeasibleError, ValidationError
from .ir import InteractionGraph
from .system import ModularSystem


def rank_chips(sys: ModularSystem) -> list[str]:
    """Chip ids ordered by per-chip decoherence rate, quietest first."""
    return [c.id for c in sorted(sys.chips, key=lambda c: (c.gamma, c.id))]


def determine_k(sys: ModularSystem, num_qubits: int) -> int:
    """Smallest prefix of the chip ranking whose capacity fits the circuit."""
    if num_qubits <= 0:
        raise ValidationError("num_qubits must be positive")
    total = sys.total_capacity
    if num_qubits > total:
        raise InfeasibleError(
            f"circuit needs {num_qubits} qubits but the system holds {total}"
        )
    acc = 0
    for i, cid in enumerate(rank_chips(sys)):
        acc += sys.chip(cid).num_qubits
        if acc >= num_qubits:
            return i + 1
    raise InfeasibleError("unreachable: ranking exhausted")  # pragma: no cover


def cut_edges(
    graph: InteractionGraph, fragments: list[list[int]]
) -> list[tuple[int, int, int]]:
    """Edges (u, v, w) whose endpoints land in different fragments."""
    slot = {}
    for i, frag in enumerate(fragments):
        for q in frag:
            slot[q] = i
    return [(u, v, w) for u, v, w in graph.edges() if slot[u] != slot[v]]


def cut_weight(graph: InteractionGraph, fragments: list[list[int]]) -> int:
    return sum(w for _, _, w in cut_edges(graph, fragments))


def _ffd_fits(sizes: list[int], caps: list[int]) -> bool:
    """First-fit-decreasing packing check; a True answer is always sound."""
    room = sorted(caps, reverse=True)
    for size in sorted(sizes, reverse=True):
        for i, r in enumerate(room):
            if size <= r:
                room[i] -= size
                break
        else:
            return False
    return True


def _match_fits(sizes: list[int], caps: list[int]) -> bool:
    """One-fragment-per-chip check: sorted sizes under sorted capacities."""
    return all(
        s <= c
        for s, c in zip(sorted(sizes, reverse=True), sorted(caps, reverse=True))
    )


def _feasible(sizes: list[int], k: int, caps: list[int]) -> bool:
    if len(sizes) == k:
        return _match_fits(sizes, caps)
    return _ffd_fits(sizes, caps)


class _Clustering:
    """Contracted weighted graph maintained during agglomeration."""

    def __init__(self, graph: InteractionGraph):
        self.nodes: dict[int, list[int]] = {q: [q] for q in range(graph.num_nodes)}
        self.nbr: dict[int, dict[int, int]] = {q: {} for q in range(graph.num_nodes)}
        for u, v, w in graph.edges():
            self.nbr[u][v] = w
            self.nbr[v][u] = w

    def sizes(self) -> list[int]:
        return [len(v) for v in self.nodes.values()]

    def merge(self, a: int, b: int) -> int:
        keep, gone = (a, b) if a < b else (b, a)
        self.nodes[keep] = sorted(self.nodes[keep] + self.nodes[gone])
        for other, w in self.nbr[gone].items():
            if other == keep:
                continue
            self.nbr[keep][other] = self.nbr[keep].get(other, 0) + w
            del self.nbr[other][gone]
            self.nbr[other][keep] = self.nbr[keep][other]
        self.nbr[keep].pop(gone, None)
        del self.nodes[gone]
        del self.nbr[gone]
        return keep

    def detach(self, rep: int) -> list[int]:
        members = self.nodes[rep]
        for other in list(self.nbr[rep]):
            del self.nbr[other][rep]
        del self.nodes[rep]
        del self.nbr[rep]
        return members


def partition(
    graph: InteractionGraph, k: int, capacities: list[int]
) -> list[list[int]]:
    """Split qubits into k non-empty fragments, one per capacity slot.

    Heaviest-edge agglomeration under a packing guard, then a single-move
    refinement pass. Deterministic: ties break toward the lowest qubit index
    and the lowest slot index.
    """
    n = graph.num_nodes
    if k < 1:
        raise ValidationError("k must be at least 1")
    if len(capacities) != k:
        raise ValidationError("capacities must list exactly one entry per fragment")
    if any(c < 1 for c in capacities):
        raise ValidationError("capacities must be positive")
    if n < k:
        raise InfeasibleError(f"cannot form {k} non-empty fragments from {n} qubits")
    if n > sum(capacities):
        raise InfeasibleError(
            f"circuit needs {n} qubits but the selected chips hold {sum(capacities)}"
        )
    if k == 1:
        return [list(range(n))]

    clusters = _Clustering(graph)
    guard = 4 * n + 16
    while len(clusters.nodes) > k:
        guard -= 1
        if guard < 0:
            raise InfeasibleError("partitioning failed to converge")  # pragma: no cover
        if _try_merge(clusters, k, capacities):
            continue
        _dissolve_smallest(clusters, graph, k, capacities)

    fragments = _assign_slots(clusters, k, capacities)
    _repair_overflow(graph, fragments, capacities)
    _refine(graph, fragments, capacities)
    return fragments


def _try_merge(clusters: _Clustering, k: int, capacities: list[int]) -> bool:
    """Apply the best feasible merge; heaviest edge first, then smallest pair.

    Candidates are walked in key order so the packing check runs only until
    the first feasible pair, which keeps large graphs fast.
    """
    sizes_by_rep = {r: len(v) for r, v in clusters.nodes.items()}

    def feasible_pair(a: int, b: int) -> bool:
        merged = sizes_by_rep[a] + sizes_by_rep[b]
        others = [s for r, s in sizes_by_rep.items() if r not in (a, b)]
        return _feasible(others + [merged], k, capacities)

    weighted = sorted(
        (-w, a, b)
        for a, nbrs in clusters.nbr.items()
        for b, w in nbrs.items()
        if a < b and w > 0
    )
    for _, a, b in weighted:
        if feasible_pair(a, b):
            clusters.merge(a, b)
            return True
    order = sorted(clusters.nodes, key=lambda r: (sizes_by_rep[r], r))
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if feasible_pair(order[i], order[j]):
                clusters.merge(order[i], order[j])
                return True
    return False


def _dissolve_smallest(
    clusters: _Clustering,
    graph: InteractionGraph,
    k: int,
    capacities: list[int],
) -> None:
    """Break up the smallest cluster when no merge can proceed.

    Members re-attach one by one to their best-connected surviving cluster,
    preferring placements that keep the packing feasible; overflow repair
    after slot assignment covers the remainder.
    """
    victim = min(clusters.nodes, key=lambda r: (len(clusters.nodes[r]), r))
    members = clusters.detach(victim)
    member_of = {
        q: rep for rep, nodes in clusters.nodes.items() for q in nodes
    }
    for u in members:
        choice = None  # (infeasible, -attachment, rep)
        for rep in sorted(clusters.nodes):
            sizes = [
                len(v) + (1 if r == rep else 0)
                for r, v in clusters.nodes.items()
            ]
            infeasible = 0 if _feasible(sizes, k, capacities) else 1
            attach = sum(
                w for v, w in graph.neighbors(u).items() if member_of.get(v) == rep
            )
            key = (infeasible, -attach, rep)
            if choice is None or key < choice:
                choice = key
        assert choice is not None
        rep = choice[2]
        clusters.nodes[rep] = sorted(clusters.nodes[rep] + [u])
        member_of[u] = rep
        for v, w in graph.neighbors(u).items():
            other = member_of.get(v)
            if other is not None and other != rep:
                clusters.nbr[rep][other] = clusters.nbr[rep].get(other, 0) + w
                clusters.nbr[other][rep] = clusters.nbr[rep][other]


def _assign_slots(
    clusters: _Clustering, k: int, capacities: list[int]
) -> list[list[int]]:
    """Largest cluster onto the roomiest slot; ties toward low indices."""
    order = sorted(clusters.nodes, key=lambda r: (-len(clusters.nodes[r]), r))
    slots = sorted(range(k), key=lambda i: (-capacities[i], i))
    fragments: list[list[int]] = [[] for _ in range(k)]
    for rep, slot in zip(order, slots):
        fragments[slot] = list(clusters.nodes[rep])
    return fragments


def _repair_overflow(
    graph: InteractionGraph, fragments: list[list[int]], capacities: list[int]
) -> None:
    """Move weakest-attached nodes out of any fragment over its capacity."""
    for _ in range(graph.num_nodes):
        over = [i for i, f in enumerate(fragments) if len(f) > capacities[i]]
        if not over:
            return
        src = over[0]
        u = min(
            fragments[src],
            key=lambda q: (sum(graph.weight(q, v) for v in fragments[src]), q),
        )
        targets = [
            i
            for i, f in enumerate(fragments)
            if i != src and len(f) < capacities[i]
        ]
        if not targets:
            raise InfeasibleError("cannot pack fragments into chip capacities")
        dst = min(
            targets,
            key=lambda i: (-sum(graph.weight(u, v) for v in fragments[i]), i),
        )
        fragments[src].remove(u)
        fragments[dst].append(u)
        fragments[dst].sort()


def _refine(
    graph: InteractionGraph, fragments: list[list[int]], capacities: list[int]
) -> None:
    """Greedy single-node moves while they strictly reduce the cut weight."""
    slot = {}
    for i, frag in enumerate(fragments):
        for q in frag:
            slot[q] = i
    total = graph.total_weight() + 1
    for _ in range(total):
        best: tuple[int, int, int] | None = None  # (-gain, u, dst)
        for u in range(graph.num_nodes):
            src = slot[u]
            if len(fragments[src]) == 1:
                continue
            attach = [0] * len(fragments)
            for v, w in graph.neighbors(u).items():
                attach[slot[v]] += w
            for dst in range(len(fragments)):
                if dst == src or len(fragments[dst]) >= capacities[dst]:
                    continue
                gain = attach[dst] - attach[src]
                if gain <= 0:
                    continue
                key = (-gain, u, dst)
                if best is None or key < best:
                    best = key
        if best is None:
            return
        _, u, dst = best
        fragments[slot[u]].remove(u)
        fragments[dst].append(u)
        fragments[dst].sort()
        slot[u] = dst


def brute_force_partition(
    graph: InteractionGraph, k: int, capacities: list[int]
) -> list[list[int]]:
    """Exact minimum-cut capacitated partition by exhaustive assignment.

    Intended as a test oracle; refuses graphs beyond 12 nodes.
    """
    n = graph.num_nodes
    if n > 12:
        raise ValidationError("brute force partition is limited to 12 nodes")
    if k < 1 or len(capacities) != k:
        raise ValidationError("capacities must list exactly one entry per fragment")
    if n < k:
        raise InfeasibleError(f"cannot form {k} non-empty fragments from {n} qubits")
    if n > sum(capacities):
        raise InfeasibleError("insufficient capacity")
    if k == 1:
        return [list(range(n))]

    best_cut = None
    best_assign: list[int] | None = None
    assign = [0] * n
    sizes = [0] * k

    def rec(u: int, partial_cut: int) -> None:
        nonlocal best_cut, best_assign
        if best_cut is not None and partial_cut >= best_cut:
            return
        if u == n:
            if all(s > 0 for s in sizes):
                if best_cut is None or partial_cut < best_cut:
                    best_cut = partial_cut
                    best_assign = assign.copy()
            return
        remaining = n - u
        empties = sum(1 for s in sizes if s == 0)
        if remaining < empties:
            return
        for s in range(k):
            if sizes[s] >= capacities[s]:
                continue
            added = 0
            for v, w in graph.neighbors(u).items():
                if v < u and assign[v] != s:
                    added += w
            assign[u] = s
            sizes[s] += 1
            rec(u + 1, partial_cut + added)
            sizes[s] -= 1

    rec(0, 0)
    if best_assign is None:
        raise InfeasibleError("no feasible assignment under the given capacities")
    fragments: list[list[int]] = [[] for _ in range(k)]
    for q, s in enumerate(best_assign):
        fragments[s].append(q)
    return fragments
