"""Scenario definition and sampling-graph construction.

A scenario holds tasks (points with sensing neighborhoods) and vehicles
(Dubins kinematics + sensor, with distinct depot and terminal positions).
Each eligible (task, vehicle) pair gets a cluster of sample poses on the
task's neighborhood circle, headings pointing inward, spread by a Halton
sequence; depots and terminals get Halton-spread headings at fixed
positions.  Directed edges carry Dubins flight time between every pair of
same-vehicle nodes in different clusters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dubins import Pose, VehicleKinematics, norm_angle, shortest_path
from .sensors import SensorModel, nin_tasks

# Edge costs snap to this binary grid so that later cost accounting
# (big-M bookkeeping) is exact in double precision.
COST_QUANTUM = 2.0 ** -26

# Halton index stride between clusters: keeps per-cluster node sets nested
# as the sample count grows while decorrelating patterns across clusters.
_CLUSTER_PHASE = 101

# Heading offset range around the inward direction, radians.
HEADING_OFFSET_RANGE = math.pi / 3.0


def halton(index: int, base: int) -> float:
    """Radical-inverse (Halton) value of ``index`` in ``base``, in [0, 1)."""
    if index < 1:
        raise ValueError("Halton index starts at 1")
    if base < 2:
        raise ValueError("Halton base must be >= 2")
    f = 1.0
    r = 0.0
    i = index
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


class HaltonCursor:
    """Hands out consecutive Halton indices, starting from ``start``."""

    def __init__(self, start: int = 1):
        if start < 1:
            raise ValueError("cursor start must be >= 1")
        self.index = start

    def next_index(self) -> int:
        i = self.index
        self.index += 1
        return i


@dataclass(frozen=True)
class Region:
    """Area of interest, for plotting and random task generation."""

    kind: str                      # "rect" or "circle"
    x_min: float = 0.0
    x_max: float = 0.0
    y_min: float = 0.0
    y_max: float = 0.0
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 0.0

    @classmethod
    def rect(cls, x_min, x_max, y_min, y_max) -> "Region":
        return cls("rect", x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max)

    @classmethod
    def circle(cls, center, radius) -> "Region":
        return cls("circle", center=(center[0], center[1]), radius=radius)

    def sample_point(self, rng) -> tuple[float, float]:
        if self.kind == "rect":
            return (rng.uniform(self.x_min, self.x_max),
                    rng.uniform(self.y_min, self.y_max))
        while True:
            x = rng.uniform(-self.radius, self.radius)
            y = rng.uniform(-self.radius, self.radius)
            if x * x + y * y <= self.radius * self.radius:
                return (self.center[0] + x, self.center[1] + y)

    def bounds(self) -> tuple[float, float, float, float]:
        if self.kind == "rect":
            return (self.x_min, self.x_max, self.y_min, self.y_max)
        cx, cy = self.center
        return (cx - self.radius, cx + self.radius,
                cy - self.radius, cy + self.radius)


@dataclass(frozen=True)
class Task:
    id: int
    position: tuple[float, float]
    neighborhood_radius: float | None = None
    eligible_vehicles: frozenset[int] | None = None   # None = all vehicles

    def __post_init__(self):
        if self.id < 1:
            raise ValueError("task ids start at 1")
        if self.neighborhood_radius is not None and self.neighborhood_radius <= 0:
            raise ValueError("neighborhood radius must be positive")
        if self.eligible_vehicles is not None and not self.eligible_vehicles:
            raise ValueError("eligible vehicle set must not be empty")


@dataclass(frozen=True)
class Vehicle:
    id: int
    kinematics: VehicleKinematics
    sensor: SensorModel
    depot: tuple[float, float]
    terminal: tuple[float, float]

    @property
    def speed(self) -> float:
        return self.kinematics.speed

    @property
    def turn_radius(self) -> float:
        return self.kinematics.turn_radius


@dataclass
class Scenario:
    tasks: list[Task]
    vehicles: list[Vehicle]
    samples_per_cluster: int = 10
    depot_terminal_samples: int | None = None   # defaults to samples_per_cluster
    seed: int = 0
    region: Region | None = None

    def __post_init__(self):
        if not self.tasks:
            raise ValueError("scenario needs at least one task")
        if not self.vehicles:
            raise ValueError("scenario needs at least one vehicle")
        if self.samples_per_cluster < 1:
            raise ValueError("samples per cluster must be >= 1")
        task_ids = [t.id for t in self.tasks]
        if sorted(task_ids) != list(range(1, len(task_ids) + 1)):
            raise ValueError("task ids must be 1..n without gaps")
        vehicle_ids = [v.id for v in self.vehicles]
        if len(set(vehicle_ids)) != len(vehicle_ids):
            raise ValueError("duplicate vehicle ids")
        self.tasks = sorted(self.tasks, key=lambda t: t.id)
        self.vehicles = sorted(self.vehicles, key=lambda v: v.id)

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def depot_cluster_id(self) -> int:
        return self.n_tasks + 1

    @property
    def terminal_cluster_id(self) -> int:
        return self.n_tasks + 2

    def eligible_vehicles(self, task: Task) -> list[Vehicle]:
        if task.eligible_vehicles is None:
            return list(self.vehicles)
        chosen = [v for v in self.vehicles if v.id in task.eligible_vehicles]
        if not chosen:
            raise ValueError(f"task {task.id} is eligible to no vehicle")
        return chosen

    def cluster_radius(self, task: Task, vehicle: Vehicle) -> float:
        if task.neighborhood_radius is not None:
            return task.neighborhood_radius
        if vehicle.sensor.orientation == "arbitrary":
            raise ValueError(
                "tasks need an explicit neighborhood radius with polygon sensors")
        return vehicle.sensor.r_sen


@dataclass(frozen=True)
class SampleNode:
    """One node of the sampling graph.

    ``task_id`` is the cluster's task id, or n+1 / n+2 for the vehicle's
    depot / terminal cluster.  Virtual NIN nodes alias the pose of the
    real node (``origin``) whose necessarily-intersecting region covers
    this cluster's task.
    """

    id: int
    task_id: int
    vehicle_id: int
    pose: Pose
    kind: str = "real"              # "real" | "virtual_nin"
    origin: int | None = None

    def __post_init__(self):
        if self.kind == "virtual_nin" and self.origin is None:
            raise ValueError("virtual node needs an origin")
        if self.kind == "real" and self.origin is not None:
            raise ValueError("real node must not carry an origin")


@dataclass
class SamplingGraph:
    scenario: Scenario
    nodes: list[SampleNode] = field(default_factory=list)
    clusters: dict[tuple[int, int], list[SampleNode]] = field(default_factory=dict)
    edges: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def n_tasks(self) -> int:
        return self.scenario.n_tasks

    def node(self, node_id: int) -> SampleNode:
        return self.nodes[node_id]

    def cost(self, a: int, b: int) -> float:
        return self.edges[(a, b)]

    def real_task_nodes(self) -> list[SampleNode]:
        n = self.n_tasks
        return [s for s in self.nodes if s.kind == "real" and s.task_id <= n]

    def vehicle_by_id(self, vehicle_id: int) -> Vehicle:
        for v in self.scenario.vehicles:
            if v.id == vehicle_id:
                return v
        raise KeyError(vehicle_id)

    def total_nodes(self) -> int:
        return len(self.nodes)


def sample_cluster(task: Task, vehicle: Vehicle, count: int,
                   cursor: HaltonCursor, radius: float | None = None,
                   start_id: int = 0) -> list[SampleNode]:
    """Sample poses on the task's neighborhood circle.

    The boundary angle comes from Halton base 2; the heading points at
    the circle's interior, offset from the exact inward direction by a
    base-3 Halton value mapped to [-pi/3, pi/3] (base-3 radical inverses
    never hit 1/2, so the heading is never exactly through the center).
    """
    if count < 1:
        raise ValueError("need at least one sample per cluster")
    if radius is None:
        radius = task.neighborhood_radius
        if radius is None:
            radius = vehicle.sensor.r_sen
    if radius <= 0:
        raise ValueError("neighborhood radius must be positive")
    nodes = []
    tx, ty = task.position
    for i in range(count):
        idx = cursor.next_index()
        phi = 2.0 * math.pi * halton(idx, 2)
        delta = (halton(idx, 3) - 0.5) * 2.0 * HEADING_OFFSET_RANGE
        pose = Pose(tx + radius * math.cos(phi),
                    ty + radius * math.sin(phi),
                    norm_angle(phi + math.pi + delta))
        nodes.append(SampleNode(start_id + i, task.id, vehicle.id, pose))
    return nodes


def sample_depot_terminal(vehicle: Vehicle, count: int, cursor: HaltonCursor,
                          n_tasks: int, start_id: int = 0
                          ) -> tuple[list[SampleNode], list[SampleNode]]:
    """Depot and terminal sample nodes: fixed positions, Halton headings."""
    if count < 1:
        raise ValueError("need at least one sample per cluster")
    depot_nodes = []
    for i in range(count):
        theta = 2.0 * math.pi * halton(cursor.next_index(), 2)
        pose = Pose(vehicle.depot[0], vehicle.depot[1], theta)
        depot_nodes.append(SampleNode(start_id + i, n_tasks + 1, vehicle.id, pose))
    terminal_nodes = []
    for i in range(count):
        theta = 2.0 * math.pi * halton(cursor.next_index(), 2)
        pose = Pose(vehicle.terminal[0], vehicle.terminal[1], theta)
        terminal_nodes.append(
            SampleNode(start_id + count + i, n_tasks + 2, vehicle.id, pose))
    return depot_nodes, terminal_nodes


def quantize_cost(cost: float) -> float:
    """Snap a cost to the binary grid used for exact big-M accounting."""
    return round(cost / COST_QUANTUM) * COST_QUANTUM


def build_graph(scenario: Scenario) -> SamplingGraph:
    """Construct the full sampling graph with Dubins flight-time edges.

    Edges exist per vehicle from depot to task nodes, between task nodes
    of different clusters, and from task nodes to the terminal; tours are
    depot-start, terminal-end, so no task->depot or terminal->task edges
    are generated.  Identical scenario and seed give a bit-identical graph.
    """
    graph = SamplingGraph(scenario)
    next_id = 0
    rank = 0
    base = 1 + scenario.seed

    for task in scenario.tasks:
        for vehicle in scenario.eligible_vehicles(task):
            cursor = HaltonCursor(base + rank * _CLUSTER_PHASE)
            rank += 1
            radius = scenario.cluster_radius(task, vehicle)
            nodes = sample_cluster(task, vehicle, scenario.samples_per_cluster,
                                   cursor, radius=radius, start_id=next_id)
            next_id += len(nodes)
            graph.clusters[(task.id, vehicle.id)] = nodes
            graph.nodes.extend(nodes)

    dt_count = scenario.depot_terminal_samples or scenario.samples_per_cluster
    for vehicle in scenario.vehicles:
        cursor = HaltonCursor(base + rank * _CLUSTER_PHASE)
        rank += 1
        depot_nodes, terminal_nodes = sample_depot_terminal(
            vehicle, dt_count, cursor, scenario.n_tasks, start_id=next_id)
        next_id += len(depot_nodes) + len(terminal_nodes)
        graph.clusters[(scenario.depot_cluster_id, vehicle.id)] = depot_nodes
        graph.clusters[(scenario.terminal_cluster_id, vehicle.id)] = terminal_nodes
        graph.nodes.extend(depot_nodes)
        graph.nodes.extend(terminal_nodes)

    for vehicle in scenario.vehicles:
        _add_vehicle_edges(graph, vehicle)
    return graph


def _add_vehicle_edges(graph: SamplingGraph, vehicle: Vehicle) -> None:
    scenario = graph.scenario
    radius = vehicle.turn_radius
    speed = vehicle.speed
    depot = graph.clusters[(scenario.depot_cluster_id, vehicle.id)]
    terminal = graph.clusters[(scenario.terminal_cluster_id, vehicle.id)]
    task_clusters = [
        graph.clusters[(t.id, vehicle.id)]
        for t in scenario.tasks
        if (t.id, vehicle.id) in graph.clusters
    ]

    def connect(src_nodes, dst_nodes):
        for s in src_nodes:
            for d in dst_nodes:
                cost = shortest_path(s.pose, d.pose, radius).length / speed
                graph.edges[(s.id, d.id)] = quantize_cost(cost)

    all_task_nodes = [s for cl in task_clusters for s in cl]
    connect(depot, all_task_nodes)
    for cl in task_clusters:
        others = [s for other in task_clusters if other is not cl for s in other]
        connect(cl, others)
    connect(all_task_nodes, terminal)


def attach_virtual_nodes(graph: SamplingGraph,
                         margin: float | None = None) -> SamplingGraph:
    """Add virtual NIN nodes: for each real task node s whose NIR covers
    other tasks, append an alias of s to each covered task's cluster for
    the same vehicle.

    Coverage only counts toward tasks the vehicle is eligible for.
    Returns a new graph sharing nodes and edges with the input; cluster
    lists keep real nodes first (sampling order), then virtual nodes in
    origin-id order.
    """
    scenario = graph.scenario
    out = SamplingGraph(scenario,
                        nodes=list(graph.nodes),
                        clusters={k: list(v) for k, v in graph.clusters.items()},
                        edges=graph.edges)
    next_id = len(out.nodes)
    kwargs = {} if margin is None else {"margin": margin}
    for node in graph.nodes:
        if node.kind != "real" or node.task_id > scenario.n_tasks:
            continue
        vehicle = graph.vehicle_by_id(node.vehicle_id)
        covered = nin_tasks(node, scenario.tasks, vehicle.sensor,
                            vehicle.turn_radius, **kwargs)
        for task_id in sorted(covered):
            if (task_id, vehicle.id) not in out.clusters:
                continue   # task not eligible for this vehicle
            virtual = SampleNode(next_id, task_id, vehicle.id, node.pose,
                                 kind="virtual_nin", origin=node.id)
            next_id += 1
            out.clusters[(task_id, vehicle.id)].append(virtual)
            out.nodes.append(virtual)
    return out
