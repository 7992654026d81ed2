"""Deterministic SVG rendering of scenarios and solutions.

Hand-written SVG (no plotting library) so identical inputs yield byte-
identical files: task dots, depot/terminal markers, sample-node arrows,
per-vehicle path traces with translucent swept-footprint shading, and a
footprint circle at every claimed visit state.
"""

from __future__ import annotations

import math

from .instance import Scenario, build_graph
from .dubins import Pose
from .sensors import footprint_center

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
WIDTH = 900.0


def _fmt(value: float) -> str:
    out = f"{value:.2f}"
    return "0.00" if out == "-0.00" else out


class _Canvas:
    def __init__(self, x0, x1, y0, y1):
        span_x = max(x1 - x0, 1e-6)
        span_y = max(y1 - y0, 1e-6)
        pad = 0.06 * max(span_x, span_y)
        self.x0, self.y0 = x0 - pad, y0 - pad
        self.x1, self.y1 = x1 + pad, y1 + pad
        self.scale = WIDTH / (self.x1 - self.x0)
        self.height = (self.y1 - self.y0) * self.scale

    def pt(self, x: float, y: float) -> tuple[float, float]:
        return ((x - self.x0) * self.scale, (self.y1 - y) * self.scale)

    def xy(self, x: float, y: float) -> str:
        px, py = self.pt(x, y)
        return f"{_fmt(px)},{_fmt(py)}"


def _bounds(scenario: Scenario, solution: dict | None):
    if scenario.region is not None:
        return scenario.region.bounds()
    xs, ys = [], []
    for t in scenario.tasks:
        xs.append(t.position[0])
        ys.append(t.position[1])
    for v in scenario.vehicles:
        xs.extend([v.depot[0], v.terminal[0]])
        ys.extend([v.depot[1], v.terminal[1]])
    if solution:
        for veh in solution["vehicles"]:
            for x, y, _ in veh["path"]:
                xs.append(x)
                ys.append(y)
    return min(xs), max(xs), min(ys), max(ys)


def render_solution(scenario: Scenario, solution: dict | None = None,
                    draw_samples: bool = True) -> str:
    """SVG text for a scenario and (optionally) a solved instance."""
    canvas = _Canvas(*_bounds(scenario, solution))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(WIDTH)}" '
        f'height="{_fmt(canvas.height)}" viewBox="0 0 {_fmt(WIDTH)} '
        f'{_fmt(canvas.height)}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]

    if scenario.region is not None:
        r = scenario.region
        if r.kind == "rect":
            p0 = canvas.pt(r.x_min, r.y_max)
            parts.append(
                f'<rect x="{_fmt(p0[0])}" y="{_fmt(p0[1])}" '
                f'width="{_fmt((r.x_max - r.x_min) * canvas.scale)}" '
                f'height="{_fmt((r.y_max - r.y_min) * canvas.scale)}" '
                'fill="none" stroke="#bbbbbb" stroke-dasharray="6,4"/>')
        else:
            c = canvas.pt(*r.center)
            parts.append(
                f'<circle cx="{_fmt(c[0])}" cy="{_fmt(c[1])}" '
                f'r="{_fmt(r.radius * canvas.scale)}" fill="none" '
                'stroke="#bbbbbb" stroke-dasharray="6,4"/>')

    sensor_of = {v.id: v.sensor for v in scenario.vehicles}

    if solution:
        # Swept footprint shading: stroke the footprint-center trace with a
        # band two footprint radii wide.
        for veh in solution["vehicles"]:
            sensor = sensor_of[veh["id"]]
            color = PALETTE[(veh["id"] - 1) % len(PALETTE)]
            if sensor.orientation == "arbitrary" or not veh["path"]:
                continue
            centers = [footprint_center(Pose(x, y, th), sensor)
                       for x, y, th in veh["path"]]
            pts = " ".join(canvas.xy(cx, cy) for cx, cy in centers)
            width = 2.0 * sensor.r_sen * canvas.scale
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-opacity="0.12" stroke-width="{_fmt(width)}" '
                'stroke-linecap="round" stroke-linejoin="round"/>')

    if draw_samples:
        graph = build_graph(scenario)
        arrow = 0.018 * (canvas.x1 - canvas.x0)
        parts.append('<g stroke="#999999" stroke-width="1">')
        for node in graph.nodes:
            p = node.pose
            x1, y1 = canvas.pt(p.x, p.y)
            x2, y2 = canvas.pt(p.x + arrow * math.cos(p.theta),
                               p.y + arrow * math.sin(p.theta))
            parts.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" '
                         f'x2="{_fmt(x2)}" y2="{_fmt(y2)}"/>')
        parts.append('</g>')

    if solution:
        n = solution["n_tasks"]
        for veh in solution["vehicles"]:
            sensor = sensor_of[veh["id"]]
            color = PALETTE[(veh["id"] - 1) % len(PALETTE)]
            if veh["path"]:
                pts = " ".join(canvas.xy(x, y) for x, y, _ in veh["path"])
                parts.append(
                    f'<polyline points="{pts}" fill="none" stroke="{color}" '
                    'stroke-width="1.6"/>')
            if sensor.orientation == "arbitrary":
                continue
            for order, state in zip(veh["visit_order"], veh["visit_states"]):
                if order > n:
                    continue
                cx, cy = footprint_center(Pose(*state), sensor)
                c = canvas.pt(cx, cy)
                parts.append(
                    f'<circle cx="{_fmt(c[0])}" cy="{_fmt(c[1])}" '
                    f'r="{_fmt(sensor.r_sen * canvas.scale)}" fill="none" '
                    f'stroke="{color}" stroke-width="1.1" '
                    'stroke-dasharray="4,3"/>')

    for task in scenario.tasks:
        c = canvas.pt(*task.position)
        parts.append(
            f'<circle cx="{_fmt(c[0])}" cy="{_fmt(c[1])}" r="3.5" fill="black"/>')
        parts.append(
            f'<text x="{_fmt(c[0] + 6)}" y="{_fmt(c[1] - 6)}" '
            f'font-size="12" font-family="sans-serif">t{task.id}</text>')

    for vehicle in scenario.vehicles:
        color = PALETTE[(vehicle.id - 1) % len(PALETTE)]
        d = canvas.pt(*vehicle.depot)
        parts.append(
            f'<rect x="{_fmt(d[0] - 5)}" y="{_fmt(d[1] - 5)}" width="10" '
            f'height="10" fill="{color}"/>')
        parts.append(
            f'<text x="{_fmt(d[0] + 7)}" y="{_fmt(d[1] + 4)}" font-size="12" '
            f'font-family="sans-serif" fill="{color}">D{vehicle.id}</text>')
        t = canvas.pt(*vehicle.terminal)
        parts.append(
            f'<polygon points="{_fmt(t[0])},{_fmt(t[1] - 6)} '
            f'{_fmt(t[0] - 5)},{_fmt(t[1] + 4)} {_fmt(t[0] + 5)},{_fmt(t[1] + 4)}" '
            f'fill="none" stroke="{color}" stroke-width="1.5"/>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
