"""Functionally heterogeneous fleet: district-restricted tasks.

Three vehicles share one depot at the origin inside a circular region of
interest.  Tasks in districts 1..3 can only be processed by the matching
vehicle (their sensors differ); tasks in the shared district are up for
grabs and get assigned to whichever vehicle serves them cheapest.
"""

import json
import math
import pathlib

import numpy as np

from dubinsfleet import (Region, Scenario, SensorModel, Task, Vehicle,
                         VehicleKinematics, render_solution, solution_dict,
                         solve_scenario)

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

rng = np.random.default_rng(5)
region = Region.circle((0.0, 0.0), 1000.0)

tasks = []
for i in range(12):
    angle = rng.uniform(0, 2 * math.pi)
    radius = rng.uniform(150.0, 950.0)
    pos = (radius * math.cos(angle), radius * math.sin(angle))
    district = int(angle // (2 * math.pi / 3))          # three pie slices
    eligible = None if radius < 400.0 else frozenset({district + 1})
    tasks.append(Task(i + 1, pos, neighborhood_radius=120.0,
                      eligible_vehicles=eligible))

kin = VehicleKinematics(speed=50.0, turn_radius=66.0)
vehicles = [
    Vehicle(1, kin, SensorModel.omni(120.0), (0.0, 0.0), (0.0, 0.0)),
    Vehicle(2, kin, SensorModel.directional("forward", 60.0, 300.0),
            (0.0, 0.0), (0.0, 0.0)),
    Vehicle(3, kin, SensorModel.directional("rightward", 60.0, 300.0),
            (0.0, 0.0), (0.0, 0.0)),
]
scenario = Scenario(tasks, vehicles, samples_per_cluster=5, seed=1,
                    region=region)

result = solve_scenario(scenario, method="nin", effort="medium")
payload = solution_dict(result)
print(f"total cost: {result.total_cost:.2f} s")
for veh in payload["vehicles"]:
    print(f"  vehicle {veh['id']}: cost {veh['cost']:8.2f}  "
          f"tasks {veh['claimed_tasks']}")

(out_dir / "fleet.json").write_text(json.dumps(payload, sort_keys=True, indent=1))
(out_dir / "fleet.svg").write_text(render_solution(scenario, payload))
print(f"wrote {out_dir}/fleet.svg")
