"""Acceptance suite: one test per release criterion, at stated tolerances.

Run with ``pytest -v tests/test_acceptance.py`` for one pass/fail line per
criterion (each test also prints an ACCEPTANCE line, visible with -s).
"""

import json
import math

import numpy as np
import pytest

from dubinsfleet import (Pose, SensorModel, Task, attach_virtual_nodes,
                         brute_force, build_graph, build_tour_paths,
                         embed_feasible, extract_visits, footprint_contains,
                         footprint_geometry, from_atsp, ghmdatsp_cost,
                         min_turn_radius, nir_contains, nir_oracle,
                         refine_paths, shortest_path, solve_exact,
                         solve_heuristic, to_atsp, tour_cost)
from dubinsfleet.cli import main
from dubinsfleet.pipeline import bench_rows, solve_scenario
from dubinsfleet.refine import MAX_SWEEPS
from conftest import omni_scenario, random_tiny_scenario

DEG = math.pi / 180.0


def _report(line: str) -> None:
    print(f"ACCEPTANCE {line}")


def test_c01_lemma2_cost_identity(rng):
    """Cost(ATSP tour) - M(n+2m) equals the summed vehicle costs exactly,
    for heuristic and exact tours, on 200 random instances."""
    worst = 0.0
    for i in range(200):
        scenario = random_tiny_scenario(rng, max_tasks=6, max_vehicles=3,
                                        max_samples=3, node_cap=14)
        graph = attach_virtual_nodes(build_graph(scenario))
        problem = to_atsp(graph)
        tours_list = [solve_heuristic(problem, seed=i, effort="low")]
        tours_list.append(solve_exact(problem))
        for atsp_tour in tours_list:
            tours = from_atsp(atsp_tour, problem)
            identity = atsp_tour.cost - problem.big_m * problem.m_increments()
            gap = abs(identity - ghmdatsp_cost(tours))
            worst = max(worst, gap)
            assert gap <= 1e-9
    _report(f"PASS criterion 1: Lemma-2 identity exact on 200 instances "
            f"(worst residual {worst:.2e})")


def test_c02_theorem1_equivalence(rng):
    """Inverse-transformed exact ATSP optimum equals the brute-force
    optimum on 100 tiny instances."""
    worst = 0.0
    for _ in range(100):
        scenario = random_tiny_scenario(rng, max_tasks=4, max_vehicles=2,
                                        node_cap=14, brute_caps=True,
                                        clustered=True)
        graph = attach_virtual_nodes(build_graph(scenario))
        problem = to_atsp(graph)
        chain = ghmdatsp_cost(from_atsp(solve_exact(problem), problem))
        _, brute = brute_force(graph)
        gap = abs(chain - brute)
        worst = max(worst, gap)
        assert gap <= 1e-9
    _report(f"PASS criterion 2: Theorem-1 equivalence on 100 instances "
            f"(worst gap {worst:.2e})")


def test_c03_lemma3_roundtrip(rng):
    """embed_feasible then from_atsp is the identity on 100 random feasible
    solutions, and the embedded cost obeys the M(n+2m) identity exactly."""
    from dubinsfleet.atsp import _FleetState, _construct_fleet
    count = 0
    while count < 100:
        scenario = random_tiny_scenario(rng, node_cap=16, clustered=True)
        graph = attach_virtual_nodes(build_graph(scenario))
        problem = to_atsp(graph)
        state = _FleetState(problem)
        _construct_fleet(state, rng)
        tours = state.to_tours()
        sequence = embed_feasible(tours, problem)
        recovered = from_atsp(sequence, problem)
        for a, b in zip(tours, recovered):
            assert [n.id for n in a.nodes] == [n.id for n in b.nodes]
        identity = tour_cost(problem, sequence) \
            - problem.big_m * problem.m_increments()
        assert abs(identity - ghmdatsp_cost(tours)) <= 1e-9
        count += 1
    _report("PASS criterion 3: Lemma-3 embed/invert round-trip on 100 "
            "feasible solutions")


def test_c04_dubins_correctness():
    """Lengths dominate Euclidean distance; the steering-lattice oracle
    never beats the analytic length by more than 1%; the half circle is
    exactly pi*r."""
    gen = np.random.default_rng(4)
    for _ in range(10_000):
        a = Pose(gen.uniform(-500, 500), gen.uniform(-500, 500),
                 gen.uniform(0, 2 * math.pi))
        b = Pose(gen.uniform(-500, 500), gen.uniform(-500, 500),
                 gen.uniform(0, 2 * math.pi))
        radius = gen.uniform(5.0, 150.0)
        assert shortest_path(a, b, radius).length >= a.distance_to(b) - 1e-9

    from lattice import lattice_reachable
    radius = 60.0
    poses, lengths = lattice_reachable(radius, n_theta=48, span=4.0,
                                       max_layers=160)
    idx = gen.choice(len(poses), size=1000, replace=False)
    origin = Pose(0.0, 0.0, 0.0)
    for i in idx:
        if lengths[i] < 1e-9:
            continue
        analytic = shortest_path(origin, poses[i], radius).length
        assert lengths[i] >= analytic - max(1e-9, 0.01 * analytic)

    r = 66.0
    half = shortest_path(Pose(0, 0, math.pi / 2),
                         Pose(2 * r, 0, 3 * math.pi / 2), r)
    assert abs(half.length - math.pi * r) <= 1e-9
    _report("PASS criterion 4: Dubins lengths dominate Euclid, survive the "
            "lattice oracle, and hit pi*r exactly")


def test_c05_turn_radius():
    value = min_turn_radius(50.0, 4.0, 9.81)
    assert value == pytest.approx(65.8, abs=0.5)
    _report(f"PASS criterion 5: min turn radius {value:.2f} m (expected ~66)")


def test_c06_footprint_geometry():
    a, b, r300 = footprint_geometry(300.0, 30 * DEG, 60 * DEG)
    assert a == pytest.approx(173.2, abs=0.1)
    assert b == pytest.approx(519.6, abs=0.1)
    _, _, r200 = footprint_geometry(200.0, 30 * DEG, 60 * DEG)
    assert r200 == pytest.approx(115.5, abs=0.1)
    _, _, r50 = footprint_geometry(50.0, 30 * DEG, 60 * DEG)
    assert r50 == pytest.approx(28.9, abs=0.1)
    _report(f"PASS criterion 6: footprint offsets ({a:.1f}, {b:.1f}) and "
            f"radii ({r300:.1f}/{r200:.1f}/{r50:.1f})")


def test_c07_nin_soundness():
    """nir_contains implies nir_oracle over 10^4 trials per orientation;
    rightward with r_min < b collapses to the footprint test."""
    gen = np.random.default_rng(7)
    sensors = {
        "omni": SensorModel.omni(173.2),
        "forward": SensorModel.directional("forward", 173.2, 519.6),
        "rightward": SensorModel.directional("rightward", 173.2, 519.6),
    }
    positives = {}
    for name, sensor in sensors.items():
        hits = 0
        for _ in range(10_000):
            pose = Pose(gen.uniform(-100, 100), gen.uniform(-100, 100),
                        gen.uniform(0, 2 * math.pi))
            task = (pose.x + gen.uniform(-900, 900),
                    pose.y + gen.uniform(-900, 900))
            r_min = gen.uniform(30.0, 300.0)
            if nir_contains(pose, sensor, r_min, task):
                hits += 1
                assert nir_oracle(pose, sensor, r_min, task, step=2.0), \
                    f"{name} violation at {pose}, task {task}, r_min {r_min}"
        positives[name] = hits
        assert hits > 50

    sensor = sensors["rightward"]
    for _ in range(1000):
        pose = Pose(gen.uniform(-100, 100), gen.uniform(-100, 100),
                    gen.uniform(0, 2 * math.pi))
        task = (pose.x + gen.uniform(-900, 900),
                pose.y + gen.uniform(-900, 900))
        r_min = gen.uniform(10.0, sensor.b - 1.0)
        assert nir_contains(pose, sensor, r_min, task) == \
            footprint_contains(pose, sensor, task, tol=-1e-9)
    _report(f"PASS criterion 7: zero NIR soundness violations "
            f"({positives} positives), rightward collapse holds")


def test_c08_method_lattice(rng, fig2_scenario):
    """cost(nin) <= cost(nonin) on 50 exact-solvable clustered instances,
    with the two-visits-cover-five-tasks fixture strictly improving."""
    for _ in range(50):
        scenario = random_tiny_scenario(rng, max_tasks=4, max_vehicles=2,
                                        node_cap=15, clustered=True)
        plain = build_graph(scenario)
        attached = attach_virtual_nodes(plain)
        c_plain = ghmdatsp_cost(from_atsp(solve_exact(to_atsp(plain)),
                                          to_atsp(plain)))
        c_nin = ghmdatsp_cost(from_atsp(solve_exact(to_atsp(attached)),
                                        to_atsp(attached)))
        assert c_nin <= c_plain + 1e-9

    plain = build_graph(fig2_scenario)
    attached = attach_virtual_nodes(plain)
    prob_plain, prob_nin = to_atsp(plain), to_atsp(attached)
    c_plain = ghmdatsp_cost(from_atsp(solve_exact(prob_plain), prob_plain))
    tours = from_atsp(solve_exact(prob_nin), prob_nin)
    c_nin = ghmdatsp_cost(tours)
    assert c_nin < c_plain - 1e-9
    actual_task_visits = sum(1 for t in tours for s in t.nodes
                             if s.kind == "real" and s.task_id <= 5)
    claimed = sorted(x for t in tours for x in t.claimed_tasks(5))
    assert actual_task_visits == 2 and claimed == [1, 2, 3, 4, 5]
    _report(f"PASS criterion 8: nin never worse on 50 instances; fixture "
            f"covers 5 tasks with 2 visits ({c_plain:.1f} -> {c_nin:.1f})")


def test_c09_refinement(rng):
    """Refinement never increases cost, preserves coverage on re-extraction
    and converges within the sweep budget, on 50 heuristic solutions."""
    done = 0
    while done < 50:
        scenario = random_tiny_scenario(rng, max_tasks=5, max_vehicles=2,
                                        max_samples=3, node_cap=24,
                                        clustered=(done % 2 == 0))
        graph = attach_virtual_nodes(build_graph(scenario))
        problem = to_atsp(graph)
        tour = solve_heuristic(problem, seed=done, effort="low")
        tours = from_atsp(tour, problem)
        paths = build_tour_paths(tours, scenario)
        plan = extract_visits(paths, scenario)
        refined = refine_paths(plan, scenario)
        assert refined.total_cost() <= plan.total_cost() + 1e-9
        assert all(p.sweeps < MAX_SWEEPS for p in refined.plans)
        replan = extract_visits(
            {p.vehicle_id: p.path for p in refined.plans}, scenario)
        claimed = sorted(t for p in replan.plans for t in p.visit_order
                         if t <= scenario.n_tasks)
        assert claimed == [t.id for t in scenario.tasks]
        done += 1
    _report("PASS criterion 9: refinement monotone, coverage-preserving and "
            "convergent on 50 solutions")


def test_c10_bench_trends():
    """Replaces the paper's unpublished absolute costs: exact costs are
    non-increasing in the sample count (nested samples), the nin graph is
    never smaller than the nonin graph, and the counts coincide when no
    necessarily-intersecting node exists."""
    clustered = omni_scenario(
        [(300.0, 300.0), (430.0, 390.0), (320.0, 480.0)],
        samples=2, r_sen=173.2, turn_radius=66.0, dt_samples=1)
    rows = bench_rows(clustered, "samples", [1, 2, 3],
                      methods=["nonin", "nin"], seeds=[0], use_exact=True)
    for a, b in zip(rows, rows[1:]):
        assert b["cost_nonin"] <= a["cost_nonin"] + 1e-9
        assert b["cost_nin"] <= a["cost_nin"] + 1e-9
    for row in rows:
        assert row["nodes_nin"] >= row["nodes_nonin"]
        assert row["cost_nin"] <= row["cost_nonin"] + 1e-9

    spread = omni_scenario(
        [(0.0, 0.0), (4000.0, 0.0), (0.0, 4000.0)],
        samples=2, r_sen=100.0, dt_samples=1)
    rows = bench_rows(spread, "samples", [2], methods=["nonin", "nin"],
                      seeds=[0], use_exact=True)
    assert rows[0]["nodes_nin"] == rows[0]["nodes_nonin"]
    _report("PASS criterion 10: exact costs non-increasing in samples; "
            "nin node counts dominate and collapse without NIN")


def test_c11_pipeline_determinism(tmp_path):
    """Byte-identical solution and plot files across repeated seeded runs."""
    scenario_payload = {
        "region": {"shape": "rect", "x": [0, 1000], "y": [0, 1000]},
        "tasks": [{"id": 1, "position": [150, 200]},
                  {"id": 2, "position": [450, 120]},
                  {"id": 3, "position": [700, 350]},
                  {"id": 4, "position": [500, 700]},
                  {"id": 5, "position": [200, 600]}],
        "vehicles": [{"id": 1, "depot": [0, 1200], "speed": 50,
                      "load_factor_max": 4,
                      "sensor": {"orientation": "omni", "altitude": 300,
                                 "min_nadir_angle_deg": 30,
                                 "max_nadir_angle_deg": 60}}],
        "sampling": {"samples_per_cluster": 5, "seed": 3},
        "solver": {"method": "ninpr", "effort": "medium"},
    }
    scenario_path = tmp_path / "scenario.json"
    scenario_path.write_text(json.dumps(scenario_payload))
    for method in ("nin", "ninpr"):
        sol_a = tmp_path / f"a_{method}.json"
        sol_b = tmp_path / f"b_{method}.json"
        assert main(["solve", str(scenario_path), "-o", str(sol_a),
                     "--method", method]) == 0
        assert main(["solve", str(scenario_path), "-o", str(sol_b),
                     "--method", method]) == 0
        assert sol_a.read_bytes() == sol_b.read_bytes()
        svg_a = tmp_path / f"a_{method}.svg"
        svg_b = tmp_path / f"b_{method}.svg"
        assert main(["plot", str(sol_a), str(scenario_path),
                     "-o", str(svg_a)]) == 0
        assert main(["plot", str(sol_b), str(scenario_path),
                     "-o", str(svg_b)]) == 0
        assert svg_a.read_bytes() == svg_b.read_bytes()
    _report("PASS criterion 11: solution and plot files byte-identical "
            "across reruns")
