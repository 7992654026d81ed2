"""Heuristic and exact solvers for dense asymmetric TSP matrices.

``solve_exact`` is a Held-Karp dynamic program (capacity-capped), the
verification oracle.  ``solve_heuristic`` is a multi-start construction
plus improving-only local search; segment reversal is never used because
it does not preserve cost under asymmetry, so the move set is node and
segment reinsertion (Or-opt) and direction-preserving exchanges.

Transformed touring problems (an :class:`~dubinsfleet.transform.AtspProblem`
with cluster bookkeeping) are special: their zero-cost cluster cycles and
big-M surcharges defeat naive nearest-neighbor and freeze node-level
moves, so for those the construction and moves operate on whole clusters
(choice of serving vehicle, visit order, entry node, and free coverage
through virtual NIN aliases) and the result is embedded back into the
matrix.  Cost accounting is identical by the big-M decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InfeasibleError
from .transform import AtspProblem, VehicleTour, embed_feasible

EXACT_NODE_CAP = 18

# effort -> (restarts, relocation run length, use block swaps)
EFFORT_LEVELS = {
    "low": (4, 1, False),
    "medium": (16, 3, False),
    "high": (64, 3, True),
}


@dataclass(frozen=True)
class TourPermutation:
    sequence: tuple[int, ...]
    cost: float


def _matrix_of(problem) -> np.ndarray:
    if isinstance(problem, AtspProblem):
        return problem.cost
    return np.asarray(problem, dtype=np.float64)


def _sentinel_of(problem, matrix: np.ndarray) -> float:
    if isinstance(problem, AtspProblem):
        return problem.sentinel
    return math.inf


def tour_cost(problem, sequence) -> float:
    """Cycle cost of a permutation; exact float summation."""
    matrix = _matrix_of(problem)
    seq = list(sequence)
    n = len(seq)
    if sorted(seq) != list(range(len(matrix))):
        raise ValueError("sequence is not a permutation of the matrix nodes")
    return math.fsum(float(matrix[seq[i], seq[(i + 1) % n]]) for i in range(n))


# ---------------------------------------------------------------------------
# Exact: Held-Karp over subsets, vectorised across masks of equal size.
# ---------------------------------------------------------------------------

def _popcounts(limit: int) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(np.arange(limit, dtype=np.uint32))
    counts = np.zeros(limit, dtype=np.uint8)
    for bit in range(limit.bit_length()):
        counts += (np.arange(limit) >> bit) & 1
    return counts


def solve_exact(problem) -> TourPermutation:
    """Provably optimal Hamiltonian cycle (Held-Karp, N <= 18)."""
    matrix = _matrix_of(problem)
    n = len(matrix)
    if n > EXACT_NODE_CAP:
        raise CapacityError(f"exact solver capped at {EXACT_NODE_CAP} nodes, got {n}")
    if n < 2:
        return TourPermutation(tuple(range(n)), 0.0)
    if n == 2:
        return TourPermutation((0, 1), tour_cost(problem, (0, 1)))

    k = n - 1                       # nodes 1..n-1 mapped to bits 0..k-1
    full = (1 << k) - 1
    dp = np.full((full + 1, k), np.inf)
    parent = np.full((full + 1, k), -1, dtype=np.int8)
    for j in range(k):
        dp[1 << j, j] = matrix[0, j + 1]

    masks = np.arange(full + 1)
    popcnt = _popcounts(full + 1)
    sub = matrix[1:, 1:]            # sub[i, j] = cost (i+1) -> (j+1)
    for size in range(2, k + 1):
        size_masks = masks[popcnt == size]
        for j in range(k):
            bit = 1 << j
            with_j = size_masks[(size_masks & bit) != 0]
            if len(with_j) == 0:
                continue
            prev = with_j ^ bit
            cand = dp[prev] + sub[:, j]          # (n_masks, k)
            best = np.argmin(cand, axis=1)
            rows = np.arange(len(with_j))
            dp[with_j, j] = cand[rows, best]
            parent[with_j, j] = best

    closing = dp[full] + matrix[1:, 0]
    j = int(np.argmin(closing))
    best_cost = closing[j]
    if not np.isfinite(best_cost):
        raise InfeasibleError("no finite-cost Hamiltonian cycle exists")
    order = []
    mask = full
    while j >= 0:
        order.append(j + 1)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj
    order.append(0)
    order.reverse()
    return TourPermutation(tuple(order), tour_cost(problem, order))


# ---------------------------------------------------------------------------
# Generic dense-matrix heuristic.
# ---------------------------------------------------------------------------

def _nearest_neighbor(matrix: np.ndarray, start: int) -> list[int]:
    n = len(matrix)
    visited = np.zeros(n, dtype=bool)
    seq = [start]
    visited[start] = True
    cur = start
    for _ in range(n - 1):
        row = np.where(visited, np.inf, matrix[cur])
        cur = int(np.argmin(row))   # ties break to the lowest node id
        visited[cur] = True
        seq.append(cur)
    return seq


def _improve_generic(matrix: np.ndarray, seq: list[int], max_run: int,
                     use_swaps: bool) -> list[int]:
    """Improving-only relocation (runs of 1..max_run) and node swaps."""
    n = len(seq)
    if n < 4:
        return seq
    improved = True
    while improved:
        improved = False
        for run in range(1, max_run + 1):
            for i in range(n):
                # segment seq[i .. i+run-1], positions mod n
                if run >= n - 2:
                    continue
                a = seq[(i - 1) % n]
                head = seq[i]
                tail = seq[(i + run - 1) % n]
                nxt = seq[(i + run) % n]
                if a == tail or nxt == head:
                    continue
                removal = (matrix[a, head] + matrix[tail, nxt]
                           - matrix[a, nxt])
                best_delta = -1e-12
                best_pos = None
                rest = [seq[(i + run + t) % n] for t in range(n - run)]
                for p in range(len(rest) - 1):
                    b, nb = rest[p], rest[p + 1]
                    delta = (matrix[b, head] + matrix[tail, nb]
                             - matrix[b, nb] - removal)
                    if delta < best_delta:
                        best_delta = delta
                        best_pos = p
                if best_pos is not None:
                    segment = [seq[(i + t) % n] for t in range(run)]
                    new_seq = rest[:best_pos + 1] + segment + rest[best_pos + 1:]
                    seq = new_seq
                    improved = True
                    break
            if improved:
                break
        if improved or not use_swaps:
            continue
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                a, b = seq[i], seq[j]
                pa, na = seq[i - 1], seq[i + 1]
                pb, nb = seq[j - 1], seq[(j + 1) % n]
                if na == b:
                    continue
                old = (matrix[pa, a] + matrix[a, na]
                       + matrix[pb, b] + matrix[b, nb])
                new = (matrix[pa, b] + matrix[b, na]
                       + matrix[pb, a] + matrix[a, nb])
                if new < old - 1e-12:
                    seq[i], seq[j] = b, a
                    improved = True
                    break
            if improved:
                break
    return seq


def _double_bridge(seq: list[int], rng) -> list[int]:
    """Direction-preserving 4-opt kick: exchange two tour segments."""
    n = len(seq)
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, n), size=3,
                                             replace=False))
    p1, p2, p3 = cuts
    return seq[:p1] + seq[p2:p3] + seq[p1:p2] + seq[p3:]


def _solve_generic(matrix: np.ndarray, seed: int, effort: str) -> TourPermutation:
    restarts, max_run, _ = EFFORT_LEVELS[effort]
    n = len(matrix)
    rng = np.random.default_rng(seed)
    if n <= restarts:
        starts = list(range(n))
    else:
        starts = [0] + [int(s) for s in rng.integers(0, n, size=restarts - 1)]

    def cycle_cost(seq):
        return math.fsum(float(matrix[seq[i], seq[(i + 1) % n]])
                         for i in range(n))

    best_seq = None
    best_key = None
    for start in starts:
        seq = _nearest_neighbor(matrix, start)
        seq = _improve_generic(matrix, seq, max_run, use_swaps=True)
        cost = cycle_cost(seq)
        # Iterated local search: segment-exchange kicks, improving-only.
        if n >= 5:
            for _ in range(restarts):
                kicked = _double_bridge(seq, rng)
                kicked = _improve_generic(matrix, kicked, max_run,
                                          use_swaps=True)
                kicked_cost = cycle_cost(kicked)
                if kicked_cost < cost - 1e-12:
                    seq, cost = kicked, kicked_cost
        pivot = seq.index(0)
        canon = tuple(seq[pivot:] + seq[:pivot])
        key = (cost, canon)
        if best_key is None or key < best_key:
            best_key = key
            best_seq = canon
    cost = best_key[0]
    if not math.isfinite(cost):
        raise InfeasibleError("heuristic found no finite-cost cycle")
    return TourPermutation(best_seq, cost)


# ---------------------------------------------------------------------------
# Cluster-level heuristic for transformed touring problems.
# ---------------------------------------------------------------------------

class _Block:
    """One visited task cluster: serving entry node plus the clusters it
    covers for free through virtual aliases of that entry."""

    __slots__ = ("cluster", "entry", "dependents")

    def __init__(self, cluster: int, entry, dependents=None):
        self.cluster = cluster
        self.entry = entry
        self.dependents = list(dependents or [])


class _FleetState:
    """Mutable GHMDATSP solution: per-vehicle ordered block lists."""

    def __init__(self, problem: AtspProblem):
        self.problem = problem
        self.graph = problem.graph
        scenario = self.graph.scenario
        self.scenario = scenario
        self.vehicles = scenario.vehicles
        self.blocks: dict[int, list[_Block]] = {v.id: [] for v in self.vehicles}
        # Real members of each task cluster, by vehicle.
        self.members: dict[int, dict[int, list]] = {}
        for task in scenario.tasks:
            per = {}
            for vehicle in self.vehicles:
                cl = self.graph.clusters.get((task.id, vehicle.id))
                if cl:
                    per[vehicle.id] = [s for s in cl if s.kind == "real"]
            self.members[task.id] = per
        # alias (origin node id, covered task id) -> virtual node
        self.alias = {}
        for s in self.graph.nodes:
            if s.kind == "virtual_nin":
                self.alias[(s.origin, s.task_id)] = s

    def vehicle_cost(self, vehicle_id: int, blocks=None) -> float:
        blocks = self.blocks[vehicle_id] if blocks is None else blocks
        scenario = self.scenario
        depot = self.graph.clusters[(scenario.depot_cluster_id, vehicle_id)]
        terminal = self.graph.clusters[(scenario.terminal_cluster_id, vehicle_id)]
        if not blocks:
            return 0.0
        heads = [b.entry for b in blocks]
        legs = []
        legs.append(min(self.graph.cost(d.id, heads[0].id) for d in depot))
        for a, b in zip(heads, heads[1:]):
            legs.append(self.graph.cost(a.id, b.id))
        legs.append(min(self.graph.cost(heads[-1].id, t.id) for t in terminal))
        return math.fsum(legs)

    def total_cost(self) -> float:
        return math.fsum(self.vehicle_cost(v.id) for v in self.vehicles)

    def covers(self, entry, dependents) -> bool:
        return all((entry.id, d) in self.alias for d in dependents)

    def remove_cluster(self, cluster: int):
        """Detach a cluster; returns a token for reinsertion candidates."""
        for vid, blocks in self.blocks.items():
            for i, blk in enumerate(blocks):
                if blk.cluster == cluster:
                    blocks.pop(i)
                    return ("block", blk.dependents)
                if cluster in blk.dependents:
                    blk.dependents.remove(cluster)
                    return ("alias", [])
        raise KeyError(cluster)

    def placements(self, cluster: int, dependents) -> list:
        """All feasible placements: (kind, vehicle, index, entry/host)."""
        out = []
        for vid, blocks in self.blocks.items():
            for entry in self.members[cluster].get(vid, []):
                if dependents and not self.covers(entry, dependents):
                    continue
                for pos in range(len(blocks) + 1):
                    out.append(("real", vid, pos, entry))
            if not dependents:
                for i, blk in enumerate(blocks):
                    if (blk.entry.id, cluster) in self.alias:
                        out.append(("alias", vid, i, blk.entry))
        return out

    def apply(self, cluster: int, dependents, placement):
        kind, vid, pos, entry = placement
        if kind == "real":
            self.blocks[vid].insert(pos, _Block(cluster, entry, dependents))
        else:
            self.blocks[vid][pos].dependents.append(cluster)

    def to_tours(self) -> list[VehicleTour]:
        scenario = self.scenario
        tours = []
        for vehicle in self.vehicles:
            blocks = self.blocks[vehicle.id]
            if not blocks:
                tours.append(VehicleTour(vehicle.id, [], 0.0))
                continue
            depot = self.graph.clusters[(scenario.depot_cluster_id, vehicle.id)]
            terminal = self.graph.clusters[(scenario.terminal_cluster_id, vehicle.id)]
            heads = [b.entry for b in blocks]
            d = min(depot, key=lambda s: self.graph.cost(s.id, heads[0].id))
            t = min(terminal, key=lambda s: self.graph.cost(heads[-1].id, s.id))
            nodes = [d]
            for blk in blocks:
                nodes.append(blk.entry)
                for dep in sorted(blk.dependents):
                    nodes.append(self.alias[(blk.entry.id, dep)])
            nodes.append(t)
            cost = self.vehicle_cost(vehicle.id)
            tours.append(VehicleTour(vehicle.id, nodes, cost))
        return tours


def _construct_fleet(state: _FleetState, rng) -> None:
    scenario = state.scenario
    order = [t.id for t in scenario.tasks]
    rng.shuffle(order)
    for cluster in order:
        placements = state.placements(cluster, [])
        if not placements:
            raise InfeasibleError(f"task {cluster} has no feasible placement")
        scored = []
        for p in placements:
            state.apply(cluster, [], p)
            scored.append((state.vehicle_cost(p[1]), p))
            state.remove_cluster(cluster)
        scored.sort(key=lambda sp: (sp[0], sp[1][:3]))
        pick = 0
        if len(scored) > 1 and rng.random() < 0.3:
            pick = 1
        state.apply(cluster, [], scored[pick][1])


def _improve_fleet(state: _FleetState, max_run: int, use_swaps: bool) -> None:
    scenario = state.scenario
    clusters = [t.id for t in scenario.tasks]
    improved = True
    while improved:
        improved = False
        for cluster in clusters:
            base = state.total_cost()
            _, dependents = state.remove_cluster(cluster)
            removed_cost = {v.id: state.vehicle_cost(v.id) for v in state.vehicles}
            removed_total = math.fsum(removed_cost.values())
            best = None
            best_delta = None
            for p in state.placements(cluster, dependents):
                state.apply(cluster, dependents, p)
                delta = state.vehicle_cost(p[1]) - removed_cost[p[1]]
                if best_delta is None or delta < best_delta - 1e-12:
                    best_delta = delta
                    best = p
                state.remove_cluster(cluster)
            state.apply(cluster, dependents, best)
            if removed_total + best_delta < base - 1e-9:
                improved = True
        if improved or max_run < 2:
            continue
        # Relocate runs of consecutive blocks within a vehicle.
        for vehicle in state.vehicles:
            blocks = state.blocks[vehicle.id]
            for run in range(2, min(max_run, len(blocks)) + 1):
                done = False
                for i in range(len(blocks) - run + 1):
                    base = state.vehicle_cost(vehicle.id)
                    segment = blocks[i:i + run]
                    rest = blocks[:i] + blocks[i + run:]
                    for pos in range(len(rest) + 1):
                        if pos == i:
                            continue
                        cand = rest[:pos] + segment + rest[pos:]
                        if state.vehicle_cost(vehicle.id, cand) < base - 1e-9:
                            state.blocks[vehicle.id] = cand
                            improved = done = True
                            break
                    if done:
                        break
                if done:
                    break
        if improved or not use_swaps:
            continue
        for vehicle in state.vehicles:
            blocks = state.blocks[vehicle.id]
            done = False
            for i in range(len(blocks)):
                for j in range(i + 1, len(blocks)):
                    base = state.vehicle_cost(vehicle.id)
                    cand = list(blocks)
                    cand[i], cand[j] = cand[j], cand[i]
                    if state.vehicle_cost(vehicle.id, cand) < base - 1e-9:
                        state.blocks[vehicle.id] = cand
                        improved = done = True
                        break
                if done:
                    break
            if done:
                break


def _solve_transformed(problem: AtspProblem, seed: int, effort: str) -> TourPermutation:
    restarts, max_run, use_swaps = EFFORT_LEVELS[effort]
    best_key = None
    best_seq = None
    for restart in range(restarts):
        rng = np.random.default_rng((seed * 7919 + restart) & 0xFFFFFFFF)
        state = _FleetState(problem)
        _construct_fleet(state, rng)
        _improve_fleet(state, max_run, use_swaps)
        tours = state.to_tours()
        sequence = embed_feasible(tours, problem)
        cost = tour_cost(problem, sequence)
        pivot = sequence.index(0)
        canon = tuple(sequence[pivot:] + sequence[:pivot])
        key = (cost, canon)
        if best_key is None or key < best_key:
            best_key = key
            best_seq = canon
    return TourPermutation(best_seq, best_key[0])


def solve_heuristic(problem, seed: int = 0, effort: str = "medium") -> TourPermutation:
    """Feasible Hamiltonian cycle by multi-start construction + improving
    local search; deterministic for a given seed.

    Raises InfeasibleError when no finite-cost cycle is found (on a
    transformed problem this signals a malformed transformation).
    """
    if effort not in EFFORT_LEVELS:
        raise ValueError(f"unknown effort level {effort!r}")
    if isinstance(problem, AtspProblem):
        result = _solve_transformed(problem, seed, effort)
    else:
        matrix = _matrix_of(problem)
        if len(matrix) < 3:
            raise ValueError("heuristic needs at least 3 nodes")
        result = _solve_generic(matrix, seed, effort)
    sentinel = _sentinel_of(problem, _matrix_of(problem))
    if result.cost >= sentinel:
        raise InfeasibleError("heuristic tour traverses a non-edge")
    return result
