"""Post-solution path refinement by alternating local pose optimization.

The solved tours visit a finite set of sampled poses, so even the optimal
tour over the roadmap is coarser than the continuous optimum.  Refinement
first walks each vehicle's continuous path and records the first pose at
which the sensor footprint touches each still-unclaimed task (tasks may
be covered between sample nodes thanks to necessarily-intersecting
regions), then repeatedly sweeps those visit states, locally optimizing
each one while its neighbors stay fixed: odd-indexed states, then
even-indexed ones, until the vehicle's cost improves by less than a
relative tolerance.  The visiting sequence never changes.

Each state must keep the footprint on its task (depot and terminal states
keep their positions and optimize heading only), so refined paths still
cover every task.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dubins import Pose, sample_path, shortest_path
from .errors import IncompleteSolutionError
from .instance import Scenario, Task, Vehicle
from .sensors import footprint_center, footprint_contains
from .transform import VehicleTour

# Tolerance when deciding that a footprint touches a task while claiming:
# sample nodes sit exactly on the sensing boundary, so an exact test would
# drop them to floating noise.
CLAIM_TOL = 1e-6

# Phase-1 path sampling resolution, as a fraction of the footprint radius.
PATH_STEP_FRACTION = 0.1

RELATIVE_TOLERANCE = 1e-4      # stop when a sweep improves less than 0.01%
MAX_SWEEPS = 200


@dataclass
class VehiclePlan:
    """One vehicle's visit order, states and continuous path."""

    vehicle_id: int
    visit_order: list[int] = field(default_factory=list)
    visit_states: list[Pose] = field(default_factory=list)
    path: list[Pose] = field(default_factory=list)
    cost: float = 0.0
    sweeps: int = 0

    def is_empty(self) -> bool:
        return not self.visit_order


@dataclass
class VisitPlan:
    n_tasks: int
    plans: list[VehiclePlan]

    def total_cost(self) -> float:
        return math.fsum(p.cost for p in self.plans)

    def plan_for(self, vehicle_id: int) -> VehiclePlan:
        for p in self.plans:
            if p.vehicle_id == vehicle_id:
                return p
        raise KeyError(vehicle_id)


def path_step(vehicle: Vehicle) -> float:
    if vehicle.sensor.orientation == "arbitrary":
        from .sensors import _polygon_circumradius
        return PATH_STEP_FRACTION * _polygon_circumradius(vehicle.sensor.polygon)
    return PATH_STEP_FRACTION * vehicle.sensor.r_sen


def build_tour_paths(tours: list[VehicleTour], scenario: Scenario,
                     step: float | None = None) -> dict[int, list[Pose]]:
    """Dense per-vehicle pose paths along solved tours (virtual aliases
    share their origin's pose and add no segment)."""
    paths: dict[int, list[Pose]] = {}
    for tour in tours:
        vehicle = next(v for v in scenario.vehicles if v.id == tour.vehicle_id)
        poses = [s.pose for s in tour.actual_visits()]
        paths[tour.vehicle_id] = _chain_path(
            poses, vehicle.turn_radius, step or path_step(vehicle))
    return paths


def _chain_path(poses: list[Pose], radius: float, step: float) -> list[Pose]:
    if len(poses) < 2:
        return list(poses)
    out = [poses[0]]
    for a, b in zip(poses, poses[1:]):
        seg = sample_path(shortest_path(a, b, radius), a, step)
        out.extend(seg[1:])
    return out


def _states_cost(states: list[Pose], vehicle: Vehicle) -> float:
    radius = vehicle.turn_radius
    return math.fsum(
        shortest_path(a, b, radius).length for a, b in zip(states, states[1:])
    ) / vehicle.speed


def extract_visits(paths: dict[int, list[Pose]], scenario: Scenario,
                   claim_tol: float = CLAIM_TOL) -> VisitPlan:
    """Walk each vehicle's path and claim tasks at the first touching pose.

    Vehicles are processed in id order and each task is claimed exactly
    once, by whichever vehicle touches it first.  Raises
    IncompleteSolutionError when some task is never touched.
    """
    unclaimed: dict[int, Task] = {t.id: t for t in scenario.tasks}
    depot_id = scenario.depot_cluster_id
    terminal_id = scenario.terminal_cluster_id
    plans = []
    for vehicle in scenario.vehicles:
        path = paths.get(vehicle.id) or []
        plan = VehiclePlan(vehicle.id)
        plans.append(plan)
        if len(path) < 2:
            continue
        plan.visit_order = [depot_id]
        plan.visit_states = [path[0]]
        for pose in path:
            if not unclaimed:
                break
            for task_id in sorted(unclaimed):
                task = unclaimed[task_id]
                if footprint_contains(pose, vehicle.sensor, task.position,
                                      tol=claim_tol):
                    del unclaimed[task_id]
                    plan.visit_order.append(task_id)
                    plan.visit_states.append(pose)
        plan.visit_order.append(terminal_id)
        plan.visit_states.append(path[-1])
        plan.path = list(path)
        plan.cost = _states_cost(plan.visit_states, vehicle)
    if unclaimed:
        raise IncompleteSolutionError(
            f"tasks never touched by any path: {sorted(unclaimed)}")
    return VisitPlan(scenario.n_tasks, plans)


def _project_touch(pose: Pose, vehicle: Vehicle, task: Task) -> Pose:
    """Translate the pose so its footprint center lies on the task's
    sensing disk (circular sensors; exact projection)."""
    sensor = vehicle.sensor
    cx, cy = footprint_center(pose, sensor)
    dx = cx - task.position[0]
    dy = cy - task.position[1]
    d = math.hypot(dx, dy)
    if d <= sensor.r_sen:
        return pose
    shift = (d - sensor.r_sen) / d
    return Pose(pose.x - dx * shift, pose.y - dy * shift, pose.theta)


def optimize_state(task: Task | None, vehicle: Vehicle,
                   fixed_neighbors: tuple[Pose | None, Pose | None],
                   initial: Pose, position_tol: float = 1e-2) -> Pose:
    """Locally optimize one visit state with its neighbors fixed.

    Derivative-free pattern search over (x, y, heading); candidate poses
    are projected onto the footprint-touch disk of ``task`` (or evaluated
    only at the pinned position when ``task`` is None, as for depots and
    terminals where only the heading is free).  Never returns a pose
    costlier than ``initial``.
    """
    prev, nxt = fixed_neighbors
    radius = vehicle.turn_radius
    sensor = vehicle.sensor
    polygonal = sensor.orientation == "arbitrary"

    def feasible(pose: Pose) -> Pose | None:
        if task is None:
            return Pose(initial.x, initial.y, pose.theta)
        if polygonal:
            return pose if footprint_contains(pose, sensor, task.position) else None
        return _project_touch(pose, vehicle, task)

    def cost(pose: Pose) -> float:
        total = 0.0
        if prev is not None:
            total += shortest_path(prev, pose, radius).length
        if nxt is not None:
            total += shortest_path(pose, nxt, radius).length
        return total

    best = feasible(initial)
    if best is None:
        return initial
    best_cost = cost(best)

    pos_step = max(vehicle.turn_radius, sensor.r_sen if not polygonal else radius) / 2.0
    ang_step = math.pi / 4.0
    iterations = 0
    while (pos_step > position_tol or ang_step > 1e-3) and iterations < 200:
        iterations += 1
        moves = []
        if task is not None:
            moves.extend([(pos_step, 0.0, 0.0), (-pos_step, 0.0, 0.0),
                          (0.0, pos_step, 0.0), (0.0, -pos_step, 0.0)])
        moves.extend([(0.0, 0.0, ang_step), (0.0, 0.0, -ang_step)])
        improved = False
        for dx, dy, dt in moves:
            cand = feasible(Pose(best.x + dx, best.y + dy, best.theta + dt))
            if cand is None:
                continue
            c = cost(cand)
            if c < best_cost - 1e-12:
                best, best_cost = cand, c
                improved = True
        if not improved:
            pos_step /= 2.0
            ang_step /= 2.0
    return best if best_cost <= cost(initial) else initial


def refine_paths(plan: VisitPlan, scenario: Scenario,
                 tolerance: float = RELATIVE_TOLERANCE,
                 max_sweeps: int = MAX_SWEEPS,
                 step: float | None = None) -> VisitPlan:
    """Alternating per-state optimization until relative convergence.

    Each sweep optimizes odd-indexed states, then even-indexed ones
    (disjoint leg sets, so every sweep is non-increasing); sweeps repeat
    until the vehicle's cost improves by less than ``tolerance`` of its
    previous value.  Visit orders are preserved; continuous paths are
    rebuilt from the refined states.
    """
    tasks = {t.id: t for t in scenario.tasks}
    out_plans = []
    for vehicle in scenario.vehicles:
        old = plan.plan_for(vehicle.id)
        if old.is_empty():
            out_plans.append(VehiclePlan(vehicle.id))
            continue
        order = list(old.visit_order)
        states = list(old.visit_states)
        n_states = len(states)
        prev_cost = _states_cost(states, vehicle)
        sweeps = 0
        while sweeps < max_sweeps:
            sweeps += 1
            for parity in (0, 1):
                for i in range(parity, n_states, 2):
                    task = tasks.get(order[i])
                    prev = states[i - 1] if i > 0 else None
                    nxt = states[i + 1] if i < n_states - 1 else None
                    local_before = _local_cost(states, i, vehicle)
                    candidate = optimize_state(task, vehicle, (prev, nxt), states[i])
                    old_state = states[i]
                    states[i] = candidate
                    if _local_cost(states, i, vehicle) > local_before + 1e-12:
                        states[i] = old_state
            new_cost = _states_cost(states, vehicle)
            if prev_cost <= 0.0 or (prev_cost - new_cost) / prev_cost < tolerance:
                prev_cost = new_cost
                break
            prev_cost = new_cost
        refined = VehiclePlan(vehicle.id, order, states)
        refined.cost = prev_cost
        refined.sweeps = sweeps
        refined.path = _chain_path(states, vehicle.turn_radius,
                                   step or path_step(vehicle))
        out_plans.append(refined)
    return VisitPlan(plan.n_tasks, out_plans)


def _local_cost(states: list[Pose], i: int, vehicle: Vehicle) -> float:
    radius = vehicle.turn_radius
    total = 0.0
    if i > 0:
        total += shortest_path(states[i - 1], states[i], radius).length
    if i < len(states) - 1:
        total += shortest_path(states[i], states[i + 1], radius).length
    return total / vehicle.speed
