"""Shortest Dubins paths between oriented poses.

A curvature-limited vehicle at fixed speed moves along arcs of its minimum
turning radius and straight lines; the shortest path between two poses is
one of six words (LSL, RSR, LSR, RSL, RLR, LRL).  This script derives the
turn radius from a coordinated-turn load factor, solves a few pose pairs,
and samples one path densely.
"""

import math

from dubinsfleet import Pose, edge_cost, min_turn_radius, sample_path, shortest_path

speed = 50.0          # m/s
load_factor = 4.0     # bank limit
radius = min_turn_radius(speed, load_factor)
print(f"minimum turning radius at {speed:.0f} m/s, n={load_factor:.0f}: "
      f"{radius:.1f} m")

pairs = [
    ("straight ahead", Pose(0, 0, 0), Pose(400, 0, 0)),
    ("U-turn", Pose(0, 0, math.pi / 2), Pose(2 * radius, 0, 3 * math.pi / 2)),
    ("offset goal", Pose(0, 0, 0), Pose(300, 150, math.pi / 3)),
    ("behind us", Pose(0, 0, 0), Pose(-120, 40, 0)),
]

print(f"\n{'case':>14}  {'word':<4} {'length m':>9} {'time s':>7}")
for name, a, b in pairs:
    path = shortest_path(a, b, radius)
    print(f"{name:>14}  {path.word:<4} {path.length:9.1f} "
          f"{edge_cost(path, speed):7.2f}")

# Sampling returns exact on-path poses, first and last included.
a, b = Pose(0, 0, 0), Pose(300, 150, math.pi / 3)
path = shortest_path(a, b, radius)
poses = sample_path(path, a, step=25.0)
print(f"\nsampled '{path.word}' path every 25 m: {len(poses)} poses")
for p in poses[:5]:
    print(f"  ({p.x:7.1f}, {p.y:7.1f})  heading {math.degrees(p.theta):6.1f} deg")
print("  ...")
