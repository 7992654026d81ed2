"""Noon-Bean style transformation between the multi-vehicle touring graph
and a single dense asymmetric TSP matrix, plus its exact inverse.

Clusters become zero-cost directed cycles; an edge that leaves a cluster
is re-sourced at the cyclic predecessor of its true source node, so a
tour that enters a cluster anywhere must walk the whole cycle before it
can leave, and it leaves carrying the entry node's identity.  Task
clusters span all vehicles (one visit per task, by any eligible vehicle);
depot and terminal clusters stay per vehicle and are chained
terminal(k) -> depot(k+1) to fold the fleet into one cycle.  Every
inter-cluster edge carries a big-M surcharge so minimising tour cost
first minimises the number of cluster transitions.

Virtual NIN nodes are entered for free (M only) right after their origin
node's cluster, encoding tasks that the origin's pose necessarily covers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError, InvalidTourError
from .instance import SampleNode, SamplingGraph

# Edge kind codes in the transformed matrix.
KIND_INF = 0      # non-edge (sentinel cost)
KIND_ZERO = 1     # intra-cluster cycle edge
KIND_SKIP = 2     # depot(k) -> terminal(k), vehicle used for nothing
KIND_CHAIN = 3    # terminal(k) -> depot(k+1), fleet chaining
KIND_VNIN = 4     # entry into / between a node's virtual NIN aliases
KIND_COST = 5     # geometric edge: Dubins cost + M

SENTINEL_FACTOR = 1e6


@dataclass
class AtspProblem:
    """Dense ATSP matrix plus the bookkeeping to invert it exactly."""

    graph: SamplingGraph
    node_order: list[int]                 # matrix index -> sample node id
    cost: np.ndarray
    kind: np.ndarray
    big_m: float
    sentinel: float
    pred: np.ndarray                      # matrix index -> matrix index (s-)
    succ: np.ndarray
    cluster_of: list[tuple]               # matrix index -> cluster key
    index_of: dict[int, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.node_order)

    def node_at(self, index: int) -> SampleNode:
        return self.graph.node(self.node_order[index])

    def m_increments(self) -> int:
        """Number of big-M surcharges a structure-valid tour pays: one per
        task plus depot and terminal per vehicle."""
        return self.graph.n_tasks + 2 * len(self.graph.scenario.vehicles)


@dataclass
class VehicleTour:
    """Per-vehicle node sequence recovered from (or fed to) the ATSP.

    ``nodes`` runs from the depot node through task-cluster entries (real
    visits and virtual NIN aliases) to the terminal node; empty for a
    vehicle that stays home.  ``cost`` sums Dubins edge costs between the
    real poses along the sequence.
    """

    vehicle_id: int
    nodes: list[SampleNode]
    cost: float

    def claimed_tasks(self, n_tasks: int) -> list[int]:
        return sorted(s.task_id for s in self.nodes if s.task_id <= n_tasks)

    def actual_visits(self) -> list[SampleNode]:
        return [s for s in self.nodes if s.kind == "real"]


def choose_big_m(graph: SamplingGraph) -> float:
    """Big-M surcharge: sum of all finite edge costs plus one.

    Any tour's geometric cost is bounded by the sum of all edge costs
    (each node is entered once, by at most its priciest incoming edge),
    so one extra M always outweighs any achievable cost saving.
    """
    return math.fsum(graph.edges.values()) + 1.0


def _merged_clusters(graph: SamplingGraph) -> list[tuple[tuple, list[SampleNode]]]:
    """Cluster list for the transformation, each with its member order.

    Task clusters merge all vehicles' nodes (real nodes by vehicle id then
    sampling order, then virtual nodes by origin id); depot and terminal
    clusters stay per vehicle.  Order: depots (vehicle id), task clusters
    (task id), terminals (vehicle id).
    """
    scenario = graph.scenario
    out = []
    for vehicle in scenario.vehicles:
        key = ("depot", vehicle.id)
        out.append((key, list(graph.clusters[(scenario.depot_cluster_id, vehicle.id)])))
    for task in scenario.tasks:
        members_real = []
        members_virtual = []
        for vehicle in scenario.vehicles:
            cl = graph.clusters.get((task.id, vehicle.id))
            if not cl:
                continue
            members_real.extend(s for s in cl if s.kind == "real")
            members_virtual.extend(s for s in cl if s.kind != "real")
        members_virtual.sort(key=lambda s: s.origin)
        members = members_real + members_virtual
        if not members:
            raise InfeasibleError(f"task {task.id} has an empty cluster")
        out.append((("task", task.id), members))
    for vehicle in scenario.vehicles:
        key = ("terminal", vehicle.id)
        out.append((key, list(graph.clusters[(scenario.terminal_cluster_id, vehicle.id)])))
    return out


def to_atsp(graph: SamplingGraph) -> AtspProblem:
    """Emit the dense ATSP matrix for a sampling graph.

    The matrix has one row/column per sample node (virtual included);
    non-edges hold a large sentinel.  See the module docstring for the
    edge families.
    """
    scenario = graph.scenario
    clusters = _merged_clusters(graph)
    node_order = [s.id for _, members in clusters for s in members]
    n = len(node_order)
    if n != len(graph.nodes):
        raise InvalidTourError("graph nodes missing from cluster partition")
    index_of = {nid: i for i, nid in enumerate(node_order)}

    big_m = choose_big_m(graph)
    sentinel = SENTINEL_FACTOR * big_m
    cost = np.full((n, n), sentinel, dtype=np.float64)
    kind = np.zeros((n, n), dtype=np.int8)
    pred = np.empty(n, dtype=np.int64)
    succ = np.empty(n, dtype=np.int64)
    cluster_of: list[tuple] = [()] * n

    members_of = {}
    for key, members in clusters:
        members_of[key] = members
        idxs = [index_of[s.id] for s in members]
        for j, i in enumerate(idxs):
            cluster_of[i] = key
            pred[i] = idxs[j - 1]
            succ[i] = idxs[(j + 1) % len(idxs)]

    problem = AtspProblem(graph, node_order, cost, kind, big_m, sentinel,
                          pred, succ, cluster_of, index_of)

    def put(i: int, j: int, value: float, code: int) -> None:
        if i == j:
            raise InvalidTourError("self edge emitted (singleton zero cycle?)")
        if kind[i, j] != KIND_INF:
            raise InvalidTourError(f"conflicting rules at matrix entry ({i},{j})")
        cost[i, j] = value
        kind[i, j] = code

    # Intra-cluster zero cycles (skipped for singletons, where s- = s).
    for key, members in clusters:
        if len(members) < 2:
            continue
        for s in members:
            i = index_of[s.id]
            put(pred[i], i, 0.0, KIND_ZERO)

    vehicles = scenario.vehicles
    mcount = len(vehicles)
    task_members = {key[1]: members for key, members in clusters if key[0] == "task"}

    def src_real(node: SampleNode) -> SampleNode:
        return node if node.kind == "real" else graph.node(node.origin)

    for vi, vehicle in enumerate(vehicles):
        depot_members = members_of[("depot", vehicle.id)]
        terminal_members = members_of[("terminal", vehicle.id)]
        next_depot = members_of[("depot", vehicles[(vi + 1) % mcount].id)]

        # Depot -> terminal (vehicle assigned no task) and fleet chaining.
        for s1 in depot_members:
            for s2 in terminal_members:
                put(pred[index_of[s1.id]], index_of[s2.id], big_m, KIND_SKIP)
        for s1 in terminal_members:
            for s2 in next_depot:
                put(pred[index_of[s1.id]], index_of[s2.id], big_m, KIND_CHAIN)

        # Depot -> real task nodes of this vehicle.
        for s1 in depot_members:
            i = pred[index_of[s1.id]]
            for members in task_members.values():
                for s2 in members:
                    if s2.kind != "real" or s2.vehicle_id != vehicle.id:
                        continue
                    c = graph.cost(s1.id, s2.id)
                    put(i, index_of[s2.id], c + big_m, KIND_COST)

    # Task-cluster exits: to other clusters' real nodes and to terminals.
    for t1, members in task_members.items():
        for x in members:
            i = pred[index_of[x.id]]
            real = src_real(x)
            origin_task = real.task_id
            vehicle_id = x.vehicle_id
            for s2 in members_of[("terminal", vehicle_id)]:
                c = graph.cost(real.id, s2.id)
                put(i, index_of[s2.id], c + big_m, KIND_COST)
            for t2, members2 in task_members.items():
                if t2 == t1 or t2 == origin_task:
                    continue
                for s2 in members2:
                    if s2.kind != "real" or s2.vehicle_id != vehicle_id:
                        continue
                    c = graph.cost(real.id, s2.id)
                    put(i, index_of[s2.id], c + big_m, KIND_COST)

    # Virtual NIN aliases: free entry after the origin, free chaining
    # between aliases of the same origin.
    virtuals_by_origin: dict[int, list[SampleNode]] = {}
    for s in graph.nodes:
        if s.kind == "virtual_nin":
            virtuals_by_origin.setdefault(s.origin, []).append(s)
    for origin_id, aliases in virtuals_by_origin.items():
        i_origin = pred[index_of[origin_id]]
        for v in aliases:
            put(i_origin, index_of[v.id], big_m, KIND_VNIN)
        for v1 in aliases:
            for v2 in aliases:
                if v1 is v2:
                    continue
                put(pred[index_of[v1.id]], index_of[v2.id], big_m, KIND_VNIN)

    return problem


def _cycle_edges(sequence) -> list[tuple[int, int]]:
    return [(sequence[i], sequence[(i + 1) % len(sequence)])
            for i in range(len(sequence))]


def from_atsp(atsp_tour, problem: AtspProblem,
              graph: SamplingGraph | None = None) -> list[VehicleTour]:
    """Invert a finite-cost Hamiltonian cycle back to per-vehicle tours.

    Edges with cost 0 or M carry no geometry; the destinations of
    cost+M edges are the actual visiting nodes.  The cycle splits at the
    terminal->depot chain edges into one segment per vehicle.
    """
    graph = graph or problem.graph
    seq = list(atsp_tour.sequence if hasattr(atsp_tour, "sequence") else atsp_tour)
    n = problem.n
    if sorted(seq) != list(range(n)):
        raise InvalidTourError("tour is not a permutation of the matrix nodes")

    edges = _cycle_edges(seq)
    kinds = [problem.kind[i, j] for i, j in edges]
    if any(k == KIND_INF for k in kinds):
        raise InvalidTourError("tour traverses a non-edge (infinite cost)")

    # Structure check: each cluster must be entered exactly once.
    entries: dict[tuple, int] = {}
    for (i, j), k in zip(edges, kinds):
        if problem.cluster_of[i] != problem.cluster_of[j]:
            key = problem.cluster_of[j]
            entries[key] = entries.get(key, 0) + 1
    n_clusters = len(set(problem.cluster_of))
    if len(entries) != n_clusters or any(c != 1 for c in entries.values()):
        raise InvalidTourError("tour enters some cluster more or less than once")

    # Rotate so the cycle starts right after a chain edge (at a depot).
    chain_positions = [p for p, k in enumerate(kinds) if k == KIND_CHAIN]
    scenario = graph.scenario
    if len(chain_positions) != len(scenario.vehicles):
        raise InvalidTourError("tour does not chain every vehicle exactly once")

    tours: dict[int, VehicleTour] = {}
    m = len(chain_positions)
    for p, pos in enumerate(chain_positions):
        span = (chain_positions[(p + 1) % m] - pos) % n
        if span == 0:
            span = n
        entry_node = problem.node_at(edges[pos][1])
        key = problem.cluster_of[edges[pos][1]]
        if key[0] != "depot":
            raise InvalidTourError("chain edge does not land in a depot cluster")
        vehicle_id = key[1]

        nodes = [entry_node]
        costs = []
        empty = False
        for offset in range(1, span):
            i, j = edges[(pos + offset) % n]
            k = problem.kind[i, j]
            if k == KIND_SKIP:
                empty = True
            elif k in (KIND_COST, KIND_VNIN):
                dst = problem.node_at(j)
                if dst.vehicle_id != vehicle_id:
                    raise InvalidTourError(
                        "cluster entry belongs to a different vehicle")
                if k == KIND_COST:
                    prev_real = (nodes[-1] if nodes[-1].kind == "real"
                                 else graph.node(nodes[-1].origin))
                    costs.append(graph.cost(prev_real.id, dst.id))
                nodes.append(dst)
        if empty:
            if costs:
                raise InvalidTourError("skip edge mixed with task visits")
            tours[vehicle_id] = VehicleTour(vehicle_id, [], 0.0)
            continue
        if nodes[-1].task_id != scenario.terminal_cluster_id:
            raise InvalidTourError("vehicle segment does not end at a terminal")
        tours[vehicle_id] = VehicleTour(vehicle_id, nodes, math.fsum(costs))

    if len(tours) != len(scenario.vehicles):
        raise InvalidTourError("some vehicle has no segment in the tour")
    return [tours[v.id] for v in scenario.vehicles]


def ghmdatsp_cost(tours) -> float:
    """Total fleet cost: sum of per-vehicle Dubins tour costs."""
    return math.fsum(t.cost for t in tours)


def tour_cost_from_nodes(graph: SamplingGraph, nodes: list[SampleNode]) -> float:
    """Recompute a tour's cost from the sampling graph (virtual hops free)."""
    costs = []
    prev_real = None
    for s in nodes:
        if prev_real is not None and s.kind == "real":
            costs.append(graph.cost(prev_real.id, s.id))
        if s.kind == "real":
            prev_real = s
        # virtual nodes keep prev_real: the vehicle is still at the origin.
    return math.fsum(costs)


def embed_feasible(tours: list[VehicleTour], problem: AtspProblem) -> list[int]:
    """Embed feasible per-vehicle tours as a Hamiltonian cycle (Lemma-3
    style construction): walk each entered cluster's full zero-cost cycle
    from the entry node, chain vehicles in id order.

    Raises InfeasibleError when the tours miss or duplicate a task, and
    InvalidTourError when a virtual alias does not follow its origin.
    """
    graph = problem.graph
    scenario = graph.scenario
    covered: dict[int, int] = {}
    by_vehicle = {t.vehicle_id: t for t in tours}
    if sorted(by_vehicle) != sorted(v.id for v in scenario.vehicles):
        raise InfeasibleError("tours must cover every vehicle exactly once")
    for tour in tours:
        for s in tour.nodes:
            if s.task_id <= scenario.n_tasks:
                covered[s.task_id] = covered.get(s.task_id, 0) + 1
    if sorted(covered) != [t.id for t in scenario.tasks] or \
            any(c != 1 for c in covered.values()):
        raise InfeasibleError("tours must cover every task exactly once")

    sequence: list[int] = []

    def walk_cluster(entry_index: int) -> None:
        i = entry_index
        while True:
            sequence.append(i)
            i = int(problem.succ[i])
            if i == entry_index:
                return

    for vehicle in scenario.vehicles:
        tour = by_vehicle[vehicle.id]
        if not tour.nodes:
            depot = graph.clusters[(scenario.depot_cluster_id, vehicle.id)][0]
            terminal = graph.clusters[(scenario.terminal_cluster_id, vehicle.id)][0]
            walk_cluster(problem.index_of[depot.id])
            walk_cluster(problem.index_of[terminal.id])
            continue
        first = tour.nodes[0]
        if first.task_id != scenario.depot_cluster_id or first.vehicle_id != vehicle.id:
            raise InfeasibleError("tour must start at the vehicle's depot")
        last = tour.nodes[-1]
        if last.task_id != scenario.terminal_cluster_id:
            raise InfeasibleError("tour must end at the vehicle's terminal")
        prev_real = None
        for s in tour.nodes:
            if s.kind == "virtual_nin":
                if prev_real is None or s.origin != prev_real.id:
                    raise InvalidTourError(
                        "virtual alias must follow its origin node")
            else:
                prev_real = s
            walk_cluster(problem.index_of[s.id])

    if sorted(sequence) != list(range(problem.n)):
        raise InvalidTourError("embedding failed to produce a permutation")
    for i, j in _cycle_edges(sequence):
        if problem.kind[i, j] == KIND_INF:
            raise InvalidTourError("embedding produced a non-edge transition")
    return sequence
