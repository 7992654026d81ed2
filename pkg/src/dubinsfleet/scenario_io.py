"""Scenario and solution files: JSON with shipped schemas.

Scenario files describe the region, tasks, vehicles (kinematics either as
an explicit turn radius or as a coordinated-turn load factor; sensors by
explicit offsets or by altitude and nadir angles), sampling parameters,
and solver preferences.  Solution files record per-vehicle tours, visit
states, claimed tasks, costs and the scenario fingerprint; serialization
is canonical (sorted keys, fixed layout) so equal runs produce equal
bytes.
"""

from __future__ import annotations

import hashlib
import json
import math
from importlib import resources

import jsonschema

from .dubins import VehicleKinematics
from .errors import ScenarioError
from .instance import Region, Scenario, Task, Vehicle
from .sensors import SensorModel, footprint_geometry

_SCHEMAS = {}


def load_schema(name: str) -> dict:
    if name not in _SCHEMAS:
        ref = resources.files("dubinsfleet.schemas").joinpath(f"{name}.schema.json")
        _SCHEMAS[name] = json.loads(ref.read_text(encoding="utf-8"))
    return _SCHEMAS[name]


def _validate(payload: dict, schema_name: str) -> None:
    try:
        jsonschema.validate(payload, load_schema(schema_name))
    except jsonschema.ValidationError as err:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ScenarioError(f"invalid {schema_name} file at {where}: {err.message}")


def _parse_region(payload: dict | None) -> Region | None:
    if payload is None:
        return None
    if payload["shape"] == "rect":
        if "x" not in payload or "y" not in payload:
            raise ScenarioError("rect region needs x and y ranges")
        return Region.rect(payload["x"][0], payload["x"][1],
                           payload["y"][0], payload["y"][1])
    if "center" not in payload or "radius" not in payload:
        raise ScenarioError("circle region needs center and radius")
    return Region.circle(payload["center"], payload["radius"])


def _parse_sensor(payload: dict, vehicle_id: int) -> SensorModel:
    orientation = payload["orientation"]
    try:
        if orientation == "arbitrary":
            if "polygon" not in payload:
                raise ScenarioError(
                    f"vehicle {vehicle_id}: arbitrary sensor needs a polygon")
            return SensorModel.arbitrary(payload["polygon"])
        if "altitude" in payload:
            for key in ("min_nadir_angle_deg", "max_nadir_angle_deg"):
                if key not in payload:
                    raise ScenarioError(f"vehicle {vehicle_id}: missing {key}")
            a, b, _ = footprint_geometry(
                payload["altitude"],
                math.radians(payload["min_nadir_angle_deg"]),
                math.radians(payload["max_nadir_angle_deg"]))
            if orientation == "omni":
                return SensorModel.omni((b - a) / 2.0)
            return SensorModel.directional(orientation, a, b)
        if orientation == "omni":
            if "r_sen" not in payload:
                raise ScenarioError(f"vehicle {vehicle_id}: omni sensor needs r_sen")
            return SensorModel.omni(payload["r_sen"])
        if "a" not in payload or "b" not in payload:
            raise ScenarioError(
                f"vehicle {vehicle_id}: directional sensor needs a and b"
                " (or altitude + nadir angles)")
        return SensorModel.directional(orientation, payload["a"], payload["b"])
    except ValueError as err:
        raise ScenarioError(f"vehicle {vehicle_id}: {err}")


def scenario_from_dict(payload: dict) -> tuple[Scenario, dict]:
    """Build a scenario plus solver preferences from a parsed JSON dict."""
    _validate(payload, "scenario")
    tasks = []
    for item in payload["tasks"]:
        eligible = item.get("eligible_vehicles")
        tasks.append(Task(
            id=item["id"],
            position=(item["position"][0], item["position"][1]),
            neighborhood_radius=item.get("radius"),
            eligible_vehicles=frozenset(eligible) if eligible else None,
        ))
    vehicles = []
    for item in payload["vehicles"]:
        try:
            if "turn_radius" in item:
                kin = VehicleKinematics(speed=item["speed"],
                                        turn_radius=item["turn_radius"])
            elif "load_factor_max" in item:
                kin = VehicleKinematics(speed=item["speed"],
                                        load_factor_max=item["load_factor_max"],
                                        gravity=item.get("gravity", 9.81))
            else:
                raise ScenarioError(
                    f"vehicle {item['id']}: needs turn_radius or load_factor_max")
        except ValueError as err:
            raise ScenarioError(f"vehicle {item['id']}: {err}")
        sensor = _parse_sensor(item["sensor"], item["id"])
        depot = (item["depot"][0], item["depot"][1])
        terminal = tuple(item.get("terminal", item["depot"]))
        vehicles.append(Vehicle(item["id"], kin, sensor, depot, terminal))
    sampling = payload.get("sampling", {})
    solver = payload.get("solver", {})
    try:
        scenario = Scenario(
            tasks=tasks,
            vehicles=vehicles,
            samples_per_cluster=sampling.get("samples_per_cluster", 10),
            depot_terminal_samples=sampling.get("depot_terminal_samples"),
            seed=sampling.get("seed", 0),
            region=_parse_region(payload.get("region")),
        )
    except ValueError as err:
        raise ScenarioError(str(err))
    prefs = {"method": solver.get("method", "ninpr"),
             "effort": solver.get("effort", "medium")}
    # Referenced vehicle ids must exist.
    vehicle_ids = {v.id for v in vehicles}
    for task in tasks:
        if task.eligible_vehicles and not task.eligible_vehicles <= vehicle_ids:
            raise ScenarioError(
                f"task {task.id} references unknown vehicles "
                f"{sorted(task.eligible_vehicles - vehicle_ids)}")
    return scenario, prefs


def load_scenario(path) -> tuple[Scenario, dict]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ScenarioError(f"cannot read scenario {path}: {err}")
    return scenario_from_dict(payload)


def scenario_to_dict(scenario: Scenario, method: str = "ninpr",
                     effort: str = "medium") -> dict:
    """Canonical dict form of a scenario (inverse of scenario_from_dict)."""
    payload: dict = {"tasks": [], "vehicles": []}
    if scenario.region is not None:
        r = scenario.region
        if r.kind == "rect":
            payload["region"] = {"shape": "rect", "x": [r.x_min, r.x_max],
                                 "y": [r.y_min, r.y_max]}
        else:
            payload["region"] = {"shape": "circle", "center": list(r.center),
                                 "radius": r.radius}
    for t in scenario.tasks:
        item: dict = {"id": t.id, "position": [t.position[0], t.position[1]]}
        if t.neighborhood_radius is not None:
            item["radius"] = t.neighborhood_radius
        if t.eligible_vehicles is not None:
            item["eligible_vehicles"] = sorted(t.eligible_vehicles)
        payload["tasks"].append(item)
    for v in scenario.vehicles:
        sensor = v.sensor
        if sensor.orientation == "arbitrary":
            sd = {"orientation": "arbitrary",
                  "polygon": [[p[0], p[1]] for p in sensor.polygon]}
        elif sensor.orientation == "omni":
            sd = {"orientation": "omni", "r_sen": sensor.r_sen}
        else:
            sd = {"orientation": sensor.orientation, "a": sensor.a, "b": sensor.b}
        payload["vehicles"].append({
            "id": v.id,
            "depot": [v.depot[0], v.depot[1]],
            "terminal": [v.terminal[0], v.terminal[1]],
            "speed": v.kinematics.speed,
            "turn_radius": v.kinematics.turn_radius,
            "sensor": sd,
        })
    payload["sampling"] = {
        "samples_per_cluster": scenario.samples_per_cluster,
        "depot_terminal_samples": (scenario.depot_terminal_samples
                                   or scenario.samples_per_cluster),
        "seed": scenario.seed,
    }
    payload["solver"] = {"method": method, "effort": effort}
    return payload


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def scenario_fingerprint(scenario: Scenario) -> str:
    blob = json.dumps(scenario_to_dict(scenario), sort_keys=True,
                      separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(payload))


def load_solution(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ScenarioError(f"cannot read solution {path}: {err}")
    _validate(payload, "solution")
    total = math.fsum(v["cost"] for v in payload["vehicles"])
    if abs(total - payload["total_cost"]) > 1e-6:
        raise ScenarioError("solution total_cost does not match vehicle costs")
    return payload
