import math
import re

import numpy as np
import pytest

from dubinsfleet import (Scenario, SensorModel, Task, attach_virtual_nodes,
                         brute_force, build_graph, export_lp, from_atsp,
                         ghmdatsp_cost, solve_exact, to_atsp)
from dubinsfleet.errors import CapacityError
from conftest import make_vehicle, omni_scenario, random_tiny_scenario


class TestBruteForce:
    def test_single_task_cost(self):
        scenario = omni_scenario([(400.0, 300.0)], samples=1)
        graph = build_graph(scenario)
        tours, cost = brute_force(graph)
        d = graph.clusters[(2, 1)][0].id
        t = graph.clusters[(1, 1)][0].id
        term = graph.clusters[(3, 1)][0].id
        assert cost == pytest.approx(graph.cost(d, t) + graph.cost(t, term),
                                     abs=1e-12)
        assert [n.task_id for n in tours[0].nodes] == [2, 1, 3]

    def test_group_fixture_uses_nin(self, fig2_scenario):
        plain = build_graph(fig2_scenario)
        attached = attach_virtual_nodes(plain)
        _, cost_without = brute_force(plain)
        tours, cost_with = brute_force(attached)
        assert cost_with < cost_without - 1e-9
        visits = sum(1 for t in tours for n in t.nodes
                     if n.task_id <= 5 and n.kind == "real")
        assert visits == 2

    def test_nin_never_hurts(self, rng):
        for _ in range(10):
            scenario = random_tiny_scenario(rng, clustered=True,
                                            brute_caps=True)
            plain = build_graph(scenario)
            attached = attach_virtual_nodes(plain)
            _, c_plain = brute_force(plain)
            _, c_nin = brute_force(attached)
            assert c_nin <= c_plain + 1e-12

    def test_matches_transform_chain(self, rng):
        for _ in range(20):
            scenario = random_tiny_scenario(rng, brute_caps=True)
            graph = attach_virtual_nodes(build_graph(scenario))
            problem = to_atsp(graph)
            chain_cost = ghmdatsp_cost(from_atsp(solve_exact(problem), problem))
            _, brute_cost = brute_force(graph)
            assert abs(chain_cost - brute_cost) <= 1e-9

    def test_splitting_between_vehicles_can_win(self):
        # Tasks at opposite ends: the optimum must use both vehicles.
        tasks = [Task(1, (100.0, 0.0)), Task(2, (4900.0, 0.0))]
        vehicles = [make_vehicle(1, (0.0, 0.0)),
                    make_vehicle(2, (5000.0, 0.0))]
        scenario = Scenario(tasks, vehicles, samples_per_cluster=2,
                            depot_terminal_samples=1)
        graph = build_graph(scenario)
        tours, _ = brute_force(graph)
        assert all(t.nodes for t in tours)

    def test_node_choice_matters(self):
        # With several samples per cluster the optimum picks the cheap one.
        scenario = omni_scenario([(400.0, 300.0)], samples=4)
        graph = build_graph(scenario)
        tours, cost = brute_force(graph)
        chosen = tours[0].nodes[1]
        depot = graph.clusters[(2, 1)]
        term = graph.clusters[(3, 1)]
        for node in graph.clusters[(1, 1)]:
            alternative = min(graph.cost(d.id, node.id) for d in depot) + \
                min(graph.cost(node.id, t.id) for t in term)
            assert cost <= alternative + 1e-9

    def test_caps_enforced(self):
        scenario = omni_scenario([(100.0 * i, 200.0) for i in range(6)],
                                 samples=1)
        with pytest.raises(CapacityError):
            brute_force(build_graph(scenario))
        scenario = omni_scenario([(100.0 * i, 200.0) for i in range(4)],
                                 samples=3)
        with pytest.raises(CapacityError):
            brute_force(build_graph(scenario))


class TestExportLp:
    def fixture_graph(self):
        return build_graph(omni_scenario([(300.0, 300.0), (700.0, 300.0)],
                                         samples=1))

    def test_sections_present(self):
        text = export_lp(self.fixture_graph())
        for section in ("OBJECTIVE", "SUBJECT TO", "BINARY", "END"):
            assert section in text

    def test_variable_count(self):
        graph = self.fixture_graph()
        text = export_lp(graph)
        binary = text.split("BINARY")[1].split("END")[0].split()
        x_vars = [v for v in binary if v.startswith("x_")]
        y_vars = [v for v in binary if v.startswith("y_")]
        closures = len(graph.scenario.vehicles)   # 1 terminal x 1 depot node
        assert len(x_vars) == len(graph.edges) + closures
        assert len(y_vars) == len(graph.nodes)

    def test_expected_text_fixture(self):
        text = export_lp(self.fixture_graph())
        assert " task_1: y_0 = 1" in text
        assert " task_2: y_1 = 1" in text
        assert " depot_1: y_2 = 1" in text
        assert " terminal_1: y_3 = 1" in text
        # terminal -> depot closure keeps degree rows consistent
        assert "x_3_2" in text
        assert re.search(r"indeg_2: x_3_2 - y_2 = 0", text)

    def test_roundtrip_counts(self):
        graph = self.fixture_graph()
        text = export_lp(graph)
        constraint_block = text.split("SUBJECT TO")[1].split("BINARY")[0]
        names = re.findall(r"^ (\w+):", constraint_block, flags=re.M)
        n_tasks = graph.scenario.n_tasks
        n_nodes = len(graph.nodes)
        assert sum(1 for n in names if n.startswith("task_")) == n_tasks
        assert sum(1 for n in names if n.startswith("indeg_")) == n_nodes
        assert sum(1 for n in names if n.startswith("outdeg_")) == n_nodes
        assert any(n.startswith("subtour_") for n in names)

    def test_subtour_rows_scale_with_cap(self):
        graph = build_graph(omni_scenario(
            [(300.0, 300.0), (700.0, 300.0), (500.0, 700.0)], samples=1))
        small = export_lp(graph, subset_cap=2)
        large = export_lp(graph, subset_cap=3)
        count = lambda text: len(re.findall(r"subtour_\d+:", text))
        assert count(large) > count(small)

    def test_deterministic(self):
        graph = self.fixture_graph()
        assert export_lp(graph) == export_lp(graph)
