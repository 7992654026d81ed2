"""Shared fixtures and random-instance generators."""

from __future__ import annotations

import math

import numpy as np
import pytest

from dubinsfleet import (Scenario, SensorModel, Task, Vehicle,
                         VehicleKinematics, attach_virtual_nodes, build_graph)


def make_vehicle(vid: int, depot, terminal=None, speed=50.0, turn_radius=60.0,
                 sensor: SensorModel | None = None) -> Vehicle:
    kin = VehicleKinematics(speed=speed, turn_radius=turn_radius)
    return Vehicle(vid, kin, sensor or SensorModel.omni(150.0),
                   tuple(depot), tuple(terminal or depot))


def omni_scenario(task_positions, samples=2, seed=0, r_sen=150.0,
                  depot=(0.0, 1200.0), dt_samples=1, turn_radius=60.0,
                  speed=50.0) -> Scenario:
    tasks = [Task(i + 1, tuple(p)) for i, p in enumerate(task_positions)]
    vehicle = make_vehicle(1, depot, speed=speed, turn_radius=turn_radius,
                           sensor=SensorModel.omni(r_sen))
    return Scenario(tasks, [vehicle], samples_per_cluster=samples,
                    depot_terminal_samples=dt_samples, seed=seed)


def random_tiny_scenario(rng: np.random.Generator, max_tasks=4, max_vehicles=2,
                         max_samples=3, node_cap=15, clustered=False,
                         brute_caps=False) -> Scenario:
    """Random multi-vehicle instance whose NIN-attached graph stays small.

    Retries deterministically (driven by ``rng``) until the attached graph
    fits ``node_cap`` nodes; with ``brute_caps`` also keeps within the
    brute-force enumeration limits.
    """
    while True:
        n = int(rng.integers(1, max_tasks + 1))
        m = int(rng.integers(1, max_vehicles + 1))
        samples = int(rng.integers(1, max_samples + 1))
        span = 1600.0
        if clustered:
            centers = [(rng.uniform(0, span), rng.uniform(0, span))
                       for _ in range(max(1, n // 3 + 1))]
            positions = []
            for _ in range(n):
                cx, cy = centers[int(rng.integers(0, len(centers)))]
                positions.append((cx + rng.uniform(-120, 120),
                                  cy + rng.uniform(-120, 120)))
        else:
            positions = [(rng.uniform(0, span), rng.uniform(0, span))
                         for _ in range(n)]
        tasks = []
        for i, pos in enumerate(positions):
            eligible = None
            if m > 1 and rng.random() < 0.3:
                chosen = 1 + int(rng.integers(0, m))
                eligible = frozenset({chosen})
            tasks.append(Task(i + 1, pos, eligible_vehicles=eligible))
        vehicles = []
        for k in range(m):
            vehicles.append(make_vehicle(
                k + 1,
                depot=(rng.uniform(0, span), rng.uniform(0, span)),
                terminal=(rng.uniform(0, span), rng.uniform(0, span)),
                speed=float(rng.uniform(30, 60)),
                turn_radius=float(rng.uniform(40, 90)),
                sensor=SensorModel.omni(float(rng.uniform(90, 220))),
            ))
        scenario = Scenario(tasks, vehicles, samples_per_cluster=samples,
                            depot_terminal_samples=1,
                            seed=int(rng.integers(0, 1000)))
        graph = attach_virtual_nodes(build_graph(scenario))
        if graph.total_nodes() > node_cap:
            continue
        if brute_caps:
            real_task_nodes = len(graph.real_task_nodes())
            if real_task_nodes > 10 or n > 5 or m > 3:
                continue
        return scenario


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def fig2_scenario() -> Scenario:
    """Two tight task groups, two vehicles with district eligibility: the
    optimal NIN tour covers five tasks with two actual visits."""
    tasks = [
        Task(1, (200.0, 300.0), eligible_vehicles=frozenset({1})),
        Task(2, (260.0, 360.0), eligible_vehicles=frozenset({1})),
        Task(3, (150.0, 380.0), eligible_vehicles=frozenset({1})),
        Task(4, (900.0, 250.0), eligible_vehicles=frozenset({2})),
        Task(5, (960.0, 310.0), eligible_vehicles=frozenset({2})),
    ]
    sensor = SensorModel.omni(173.2)
    vehicles = [
        make_vehicle(1, (0.0, 1200.0), turn_radius=66.0, sensor=sensor),
        make_vehicle(2, (1200.0, 1200.0), turn_radius=66.0, sensor=sensor),
    ]
    return Scenario(tasks, vehicles, samples_per_cluster=1,
                    depot_terminal_samples=1, seed=0)
