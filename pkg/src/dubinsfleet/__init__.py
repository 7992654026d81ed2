"""Multi-vehicle Dubins touring toolkit.

Plans minimum-flight-time tours for fleets of curvature-constrained
vehicles that sense tasks remotely: task neighborhoods are sampled into a
roadmap, poses whose necessarily-intersecting region covers further tasks
contribute virtual nodes, the whole graph is transformed into one dense
asymmetric TSP, solved, inverted back to per-vehicle tours, and finally
refined by continuous local optimization of the visit states.
"""

from .dubins import (DubinsPath, Pose, VehicleKinematics, edge_cost,
                     min_turn_radius, sample_path, shortest_path)
from .errors import (CapacityError, DubinsFleetError, IncompleteSolutionError,
                     InfeasibleError, InvalidTourError, ScenarioError)
from .instance import (HaltonCursor, Region, SampleNode, SamplingGraph,
                       Scenario, Task, Vehicle, attach_virtual_nodes,
                       build_graph, halton, sample_cluster,
                       sample_depot_terminal)
from .sensors import (NirParams, SensorModel, footprint_center,
                      footprint_contains, footprint_geometry, nin_tasks,
                      nir_arbitrary, nir_contains, nir_oracle, nir_params)
from .transform import (AtspProblem, VehicleTour, choose_big_m, embed_feasible,
                        from_atsp, ghmdatsp_cost, to_atsp)
from .atsp import TourPermutation, solve_exact, solve_heuristic, tour_cost
from .oracle import brute_force, export_lp
from .refine import (VisitPlan, build_tour_paths, extract_visits,
                     optimize_state, refine_paths)
from .pipeline import (SolveResult, bench_rows, bench_table, solution_dict,
                       solve_scenario, verify_scenario)
from .plotting import render_solution
from .scenario_io import (load_scenario, load_solution, scenario_from_dict,
                          scenario_to_dict, write_json)

__version__ = "0.1.0"

__all__ = [
    "AtspProblem", "CapacityError", "DubinsFleetError", "DubinsPath",
    "HaltonCursor", "IncompleteSolutionError", "InfeasibleError",
    "InvalidTourError", "NirParams", "Pose", "Region", "SampleNode",
    "SamplingGraph", "Scenario", "ScenarioError", "SensorModel",
    "SolveResult", "Task", "TourPermutation", "Vehicle", "VehicleKinematics",
    "VehicleTour", "VisitPlan", "attach_virtual_nodes", "bench_rows",
    "bench_table", "brute_force", "build_graph", "build_tour_paths",
    "choose_big_m", "edge_cost", "embed_feasible", "export_lp",
    "extract_visits", "footprint_center", "footprint_contains",
    "footprint_geometry", "from_atsp", "ghmdatsp_cost", "halton",
    "load_scenario", "load_solution", "min_turn_radius", "nin_tasks",
    "nir_arbitrary", "nir_contains", "nir_oracle", "nir_params",
    "optimize_state", "refine_paths", "render_solution", "sample_cluster",
    "sample_depot_terminal", "sample_path", "scenario_from_dict",
    "scenario_to_dict", "shortest_path", "solution_dict", "solve_exact",
    "solve_heuristic", "solve_scenario", "to_atsp", "tour_cost",
    "verify_scenario", "write_json",
]
