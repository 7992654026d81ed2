"""Ground-truth solvers for small instances.

``brute_force`` enumerates every task-to-vehicle assignment, visit order,
sample-node choice and NIN designation, so it is the reference optimum
the transformation chain must reproduce on tiny instances.  ``export_lp``
writes the mixed-integer formulation (assignment, degree and small-subset
subtour constraints) in CPLEX-style LP text for external solvers.
"""

from __future__ import annotations

import itertools
import math

from .errors import CapacityError, InfeasibleError
from .instance import SamplingGraph
from .transform import VehicleTour

BRUTE_MAX_TASK_NODES = 10
BRUTE_MAX_TASKS = 5
BRUTE_MAX_VEHICLES = 3


def _nin_coverage(graph: SamplingGraph) -> dict[int, frozenset[int]]:
    """Tasks each real node covers for free, read off the attached virtual
    aliases (empty if the graph was built without them)."""
    cover: dict[int, set[int]] = {}
    for s in graph.nodes:
        if s.kind == "virtual_nin":
            cover.setdefault(s.origin, set()).add(s.task_id)
    return {k: frozenset(v) for k, v in cover.items()}


def brute_force(graph: SamplingGraph) -> tuple[list[VehicleTour], float]:
    """Global optimum by exhaustive enumeration (size-capped).

    Every task is covered exactly once: either visited at one of its
    cluster's sample nodes, or designated to a chosen node whose
    necessarily-intersecting region covers it (when the graph carries
    virtual aliases).  Per vehicle, all visit orders are enumerated and
    depot/terminal nodes are chosen optimally.
    """
    scenario = graph.scenario
    tasks = scenario.tasks
    vehicles = scenario.vehicles
    if len(tasks) > BRUTE_MAX_TASKS:
        raise CapacityError(f"brute force capped at {BRUTE_MAX_TASKS} tasks")
    if len(vehicles) > BRUTE_MAX_VEHICLES:
        raise CapacityError(f"brute force capped at {BRUTE_MAX_VEHICLES} vehicles")
    real_task_nodes = graph.real_task_nodes()
    if len(real_task_nodes) > BRUTE_MAX_TASK_NODES:
        raise CapacityError(
            f"brute force capped at {BRUTE_MAX_TASK_NODES} task nodes")

    coverage = _nin_coverage(graph)
    depot_id = scenario.depot_cluster_id
    terminal_id = scenario.terminal_cluster_id

    # Mechanisms per task: visit at a node, or pend on NIN coverage.
    options = {}
    for task in tasks:
        opts = [("visit", s) for s in real_task_nodes if s.task_id == task.id]
        if not opts:
            raise InfeasibleError(f"task {task.id} has no sample nodes")
        if coverage:
            opts.append(("nin", None))
        options[task.id] = opts

    path_cache: dict[tuple[int, tuple[int, ...]], tuple[float, tuple[int, ...]]] = {}

    def best_path(vehicle_id: int, node_ids: tuple[int, ...]):
        """Min path cost depot -> nodes (any order) -> terminal."""
        key = (vehicle_id, tuple(sorted(node_ids)))
        hit = path_cache.get(key)
        if hit is not None:
            return hit
        depot = graph.clusters[(depot_id, vehicle_id)]
        terminal = graph.clusters[(terminal_id, vehicle_id)]
        best = (math.inf, ())
        for order in itertools.permutations(sorted(node_ids)):
            legs = [min(graph.cost(d.id, order[0]) for d in depot)]
            legs.extend(graph.cost(a, b) for a, b in zip(order, order[1:]))
            legs.append(min(graph.cost(order[-1], t.id) for t in terminal))
            cost = math.fsum(legs)
            if cost < best[0] - 1e-15:
                best = (cost, order)
        path_cache[key] = best
        return best

    best_cost = math.inf
    best_assign = None
    task_ids = [t.id for t in tasks]

    for combo in itertools.product(*(options[t] for t in task_ids)):
        visited: dict[int, list] = {v.id: [] for v in vehicles}
        chosen_nodes = []
        pending = []
        for task_id, (kind, node) in zip(task_ids, combo):
            if kind == "visit":
                visited[node.vehicle_id].append(node)
                chosen_nodes.append(node)
            else:
                pending.append(task_id)
        ok = True
        for task_id in pending:
            if not any(task_id in coverage.get(s.id, ()) for s in chosen_nodes):
                ok = False
                break
        if not ok:
            continue
        cost_parts = []
        orders = {}
        for v in vehicles:
            nodes = visited[v.id]
            if not nodes:
                orders[v.id] = ()
                continue
            cost, order = best_path(v.id, tuple(s.id for s in nodes))
            cost_parts.append(cost)
            orders[v.id] = order
        total = math.fsum(cost_parts)
        key = (total, tuple(sorted((v, orders[v]) for v in orders)))
        if total < best_cost - 1e-15 or (
                abs(total - best_cost) <= 1e-15 and best_assign is not None
                and key < best_assign[0]):
            best_cost = total
            best_assign = (key, orders, list(pending), list(chosen_nodes))

    if best_assign is None:
        raise InfeasibleError("no feasible assignment covers every task")

    _, orders, pending, chosen_nodes = best_assign
    tours = []
    for v in vehicles:
        order = orders[v.id]
        if not order:
            tours.append(VehicleTour(v.id, [], 0.0))
            continue
        depot = graph.clusters[(depot_id, v.id)]
        terminal = graph.clusters[(terminal_id, v.id)]
        first, last = order[0], order[-1]
        d = min(depot, key=lambda s: graph.cost(s.id, first))
        t = min(terminal, key=lambda s: graph.cost(last, s.id))
        nodes = [d] + [graph.node(i) for i in order] + [t]
        legs = [graph.cost(a.id, b.id) for a, b in zip(nodes, nodes[1:])]
        tours.append(VehicleTour(v.id, nodes, math.fsum(legs)))
    return tours, best_cost


def _fmt(value: float) -> str:
    return format(value, ".12g")


def export_lp(graph: SamplingGraph, subset_cap: int = 4) -> str:
    """CPLEX-style LP text of the touring MILP over the real sample nodes.

    Binary x_<from>_<to> per directed edge and y_<node> per node; task and
    depot/terminal assignment rows, degree rows, and subtour rows for all
    task-node subsets up to ``subset_cap``.  Per-vehicle zero-cost closure
    edges terminal->depot are added so each vehicle's tour closes into a
    cycle and the depot degree rows stay consistent.  Virtual NIN aliases
    are not part of this base formulation.
    """
    scenario = graph.scenario
    depot_id = scenario.depot_cluster_id
    terminal_id = scenario.terminal_cluster_id
    real_nodes = [s for s in graph.nodes if s.kind == "real"]
    edges = sorted(graph.edges)

    closure = []
    for v in scenario.vehicles:
        for t in graph.clusters[(terminal_id, v.id)]:
            for d in graph.clusters[(depot_id, v.id)]:
                closure.append((t.id, d.id))

    lines = []
    lines.append("\\ Multi-vehicle Dubins touring MILP")
    lines.append(f"\\ {scenario.n_tasks} tasks, {len(scenario.vehicles)} vehicles,"
                 f" {len(real_nodes)} sample nodes, {len(edges)} directed edges")
    lines.append("\\ x_<from>_<to> = edge in solution; y_<node> = node visited")
    lines.append("\\ closure edges terminal->depot (zero cost) close each"
                 " vehicle's cycle")
    lines.append(f"\\ subtour rows enumerated for task-node subsets |S| <= "
                 f"{subset_cap} (larger subsets omitted; tiny instances only)")
    lines.append("\\ node map:")
    for s in real_nodes:
        kind = ("depot" if s.task_id == depot_id
                else "terminal" if s.task_id == terminal_id
                else f"task {s.task_id}")
        lines.append(
            f"\\   node {s.id}: {kind}, vehicle {s.vehicle_id}, pose=("
            f"{_fmt(s.pose.x)}, {_fmt(s.pose.y)}, {_fmt(s.pose.theta)})")

    lines.append("OBJECTIVE")
    terms = [f"{_fmt(graph.edges[e])} x_{e[0]}_{e[1]}" for e in edges]
    row = " obj:"
    for i, term in enumerate(terms):
        piece = (" " if i == 0 else " + ") + term
        if len(row) + len(piece) > 200:
            lines.append(row)
            row = "      " + ("+ " + term if i else term)
        else:
            row += piece
    lines.append(row)

    lines.append("SUBJECT TO")

    def emit_sum(name: str, items: list[str], relation: str) -> None:
        row = f" {name}:"
        for i, item in enumerate(items):
            joiner = " " if (i == 0 or item.startswith("-")) else " + "
            piece = joiner + item
            if len(row) + len(piece) > 200:
                lines.append(row)
                row = "     " + piece
            else:
                row += piece
        lines.append(row + f" {relation}")

    for task in scenario.tasks:
        members = [s for s in real_nodes
                   if s.task_id == task.id]
        emit_sum(f"task_{task.id}", [f"y_{s.id}" for s in members], "= 1")
    for v in scenario.vehicles:
        for label, cid in (("depot", depot_id), ("terminal", terminal_id)):
            members = graph.clusters[(cid, v.id)]
            emit_sum(f"{label}_{v.id}", [f"y_{s.id}" for s in members], "= 1")

    incoming: dict[int, list[str]] = {s.id: [] for s in real_nodes}
    outgoing: dict[int, list[str]] = {s.id: [] for s in real_nodes}
    for (a, b) in edges:
        outgoing[a].append(f"x_{a}_{b}")
        incoming[b].append(f"x_{a}_{b}")
    for (a, b) in closure:
        outgoing[a].append(f"x_{a}_{b}")
        incoming[b].append(f"x_{a}_{b}")

    for s in real_nodes:
        emit_sum(f"indeg_{s.id}", incoming[s.id] + [f"- y_{s.id}"], "= 0")
        emit_sum(f"outdeg_{s.id}", outgoing[s.id] + [f"- y_{s.id}"], "= 0")

    task_nodes = [s for s in real_nodes
                  if s.task_id <= scenario.n_tasks]
    edge_set = set(edges) | set(closure)
    row_idx = 0
    for size in range(2, subset_cap + 1):
        for subset in itertools.combinations(task_nodes, size):
            ids = {s.id for s in subset}
            for s in subset:
                terms = []
                for other in real_nodes:
                    if other.id in ids:
                        continue
                    if (other.id, s.id) in edge_set:
                        terms.append(f"x_{other.id}_{s.id}")
                    if (s.id, other.id) in edge_set:
                        terms.append(f"x_{s.id}_{other.id}")
                terms.append(f"- 2 y_{s.id}")
                emit_sum(f"subtour_{row_idx}", terms, ">= 0")
                row_idx += 1

    lines.append("BINARY")
    for (a, b) in edges:
        lines.append(f" x_{a}_{b}")
    for (a, b) in closure:
        lines.append(f" x_{a}_{b}")
    for s in real_nodes:
        lines.append(f" y_{s.id}")
    lines.append("END")
    return "\n".join(lines) + "\n"
