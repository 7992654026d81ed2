"""Closed-form shortest Dubins paths between oriented planar poses.

A Dubins vehicle moves at constant speed with bounded curvature, so the
shortest path between two poses is one of six words made of minimum-radius
arcs (L/R) and straight segments (S): LSL, RSR, LSR, RSL, RLR, LRL.
This module computes those words, derives the minimum turning radius from
a coordinated-turn load factor, samples poses along a path, and converts
path length to flight time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TAU = 2.0 * math.pi

# Fixed enumeration order; ties between equal-length words resolve to the
# earliest entry so results are deterministic.
WORDS = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")

# Arcs shorter than this (radians) are clamped to zero to stabilise word
# selection near degenerate configurations.
ARC_EPS = 1e-12

# A candidate word is discarded unless replaying its segments lands within
# this distance (meters, radius-scaled) of the requested end pose.
_ENDPOINT_TOL = 1e-6


def norm_angle(theta: float) -> float:
    """Normalize an angle to [0, 2*pi)."""
    theta = math.fmod(theta, TAU)
    if theta < 0.0:
        theta += TAU
    return theta if theta < TAU else 0.0


def ang_diff(a: float, b: float) -> float:
    """Shortest signed angular difference a - b, in (-pi, pi]."""
    d = math.fmod(a - b, TAU)
    if d <= -math.pi:
        d += TAU
    elif d > math.pi:
        d -= TAU
    return d


@dataclass(frozen=True)
class Pose:
    """Planar position (meters) plus heading (radians, in [0, 2*pi))."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite pose position ({self.x}, {self.y})")
        object.__setattr__(self, "theta", norm_angle(self.theta))

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class DubinsPath:
    """One Dubins word with its segment parameters.

    ``params`` stores arc angles in radians for L/R segments and the
    straight length in meters for S segments, in word order.
    """

    word: str
    params: tuple[float, float, float]
    radius: float
    length: float

    def segment_lengths(self) -> tuple[float, float, float]:
        """Metric length of each segment."""
        out = []
        for kind, value in zip(self.word, self.params):
            out.append(value if kind == "S" else value * self.radius)
        return tuple(out)


@dataclass(frozen=True)
class VehicleKinematics:
    """Constant-speed curvature-limited vehicle parameters.

    ``control_normalizer`` scales the bang-bang steering input to the unit
    interval; it is carried for completeness but drives no computation here
    (paths are built from the turn radius alone).
    """

    speed: float
    load_factor_max: float = 0.0
    gravity: float = 9.81
    turn_radius: float = 0.0
    control_normalizer: float = 1.0

    def __post_init__(self):
        if self.speed <= 0.0:
            raise ValueError("speed must be positive")
        if self.turn_radius <= 0.0:
            if self.load_factor_max <= 1.0:
                raise ValueError("need turn_radius > 0 or load_factor_max > 1")
            object.__setattr__(
                self,
                "turn_radius",
                min_turn_radius(self.speed, self.load_factor_max, self.gravity),
            )


def min_turn_radius(speed: float, load_factor: float, gravity: float = 9.81) -> float:
    """Minimum turning radius of a coordinated turn, in meters.

    A banked turn at load factor n gives lateral acceleration
    g*sqrt(n^2 - 1), hence radius v^2 / (g*sqrt(n^2 - 1)).
    """
    if speed <= 0.0:
        raise ValueError("speed must be positive")
    if gravity <= 0.0:
        raise ValueError("gravity must be positive")
    if load_factor <= 1.0:
        raise ValueError("load factor must exceed 1 for a banked turn")
    return speed * speed / (gravity * math.sqrt(load_factor * load_factor - 1.0))


# ---------------------------------------------------------------------------
# Word computations in the normalized frame: start at origin heading alpha,
# goal at (d, 0) heading beta, unit radius.  Each returns (t, p, q) segment
# parameters (arc angles, straight length in radius units) or None.
# ---------------------------------------------------------------------------

def _lsl(alpha, beta, d):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    p_sq = 2.0 + d * d - 2.0 * math.cos(alpha - beta) + 2.0 * d * (sa - sb)
    if p_sq < 0.0:
        return None
    tmp = math.atan2(cb - ca, d + sa - sb)
    return norm_angle(-alpha + tmp), math.sqrt(p_sq), norm_angle(beta - tmp)


def _rsr(alpha, beta, d):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    p_sq = 2.0 + d * d - 2.0 * math.cos(alpha - beta) + 2.0 * d * (sb - sa)
    if p_sq < 0.0:
        return None
    tmp = math.atan2(ca - cb, d - sa + sb)
    return norm_angle(alpha - tmp), math.sqrt(p_sq), norm_angle(tmp - beta)


def _lsr(alpha, beta, d):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    p_sq = -2.0 + d * d + 2.0 * math.cos(alpha - beta) + 2.0 * d * (sa + sb)
    if p_sq < 0.0:
        return None
    p = math.sqrt(p_sq)
    tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
    return norm_angle(-alpha + tmp), p, norm_angle(-norm_angle(beta) + tmp)


def _rsl(alpha, beta, d):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    p_sq = -2.0 + d * d + 2.0 * math.cos(alpha - beta) - 2.0 * d * (sa + sb)
    if p_sq < 0.0:
        return None
    p = math.sqrt(p_sq)
    tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
    return norm_angle(alpha - tmp), p, norm_angle(beta - tmp)


def _rlr(alpha, beta, d):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    tmp = (6.0 - d * d + 2.0 * math.cos(alpha - beta) + 2.0 * d * (sa - sb)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = norm_angle(TAU - math.acos(tmp))
    t = norm_angle(alpha - math.atan2(ca - cb, d - sa + sb) + p / 2.0)
    return t, p, norm_angle(alpha - beta - t + p)


def _lrl(alpha, beta, d):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    tmp = (6.0 - d * d + 2.0 * math.cos(alpha - beta) + 2.0 * d * (sb - sa)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = norm_angle(TAU - math.acos(tmp))
    t = norm_angle(-alpha - math.atan2(ca - cb, d + sa - sb) + p / 2.0)
    return t, p, norm_angle(norm_angle(beta) - alpha - t + p)


_WORD_FUNCS = {"LSL": _lsl, "RSR": _rsr, "LSR": _lsr, "RSL": _rsl,
               "RLR": _rlr, "LRL": _lrl}


def _advance(x: float, y: float, theta: float, kind: str, value: float,
             radius: float) -> tuple[float, float, float]:
    """Move a pose along one segment; arcs take an angle, S a length."""
    if kind == "S":
        return x + value * math.cos(theta), y + value * math.sin(theta), theta
    if kind == "L":
        nt = theta + value
        return (x - radius * math.sin(theta) + radius * math.sin(nt),
                y + radius * math.cos(theta) - radius * math.cos(nt), nt)
    nt = theta - value
    return (x + radius * math.sin(theta) - radius * math.sin(nt),
            y - radius * math.cos(theta) + radius * math.cos(nt), nt)


def path_end(path: DubinsPath, start: Pose) -> Pose:
    """End pose of a path replayed from ``start``."""
    x, y, theta = start.x, start.y, start.theta
    for kind, value in zip(path.word, path.params):
        x, y, theta = _advance(x, y, theta, kind, value, path.radius)
    return Pose(x, y, theta)


def _clamp_params(word: str, t: float, p: float, q: float) -> tuple[float, float, float]:
    out = []
    for kind, value in zip(word, (t, p, q)):
        if kind != "S" and (value < ARC_EPS or TAU - value < ARC_EPS):
            value = 0.0
        if kind == "S" and value < ARC_EPS:
            value = 0.0
        out.append(value)
    return tuple(out)


def word_path(start: Pose, end: Pose, radius: float, word: str) -> DubinsPath | None:
    """Path for one specific word, or None if that word is undefined or
    does not reproduce the end pose."""
    if radius <= 0.0:
        raise ValueError("turn radius must be positive")
    dx = end.x - start.x
    dy = end.y - start.y
    big_d = math.hypot(dx, dy)
    d = big_d / radius
    phi = math.atan2(dy, dx) if big_d > 0.0 else 0.0
    alpha = norm_angle(start.theta - phi)
    beta = norm_angle(end.theta - phi)

    raw = _WORD_FUNCS[word](alpha, beta, d)
    if raw is None:
        return None
    t, p, q = _clamp_params(word, *raw)
    params = []
    length = 0.0
    for kind, value in zip(word, (t, p, q)):
        if kind == "S":
            seg = value * radius
            params.append(seg)
            length += seg
        else:
            params.append(value)
            length += value * radius
    path = DubinsPath(word, tuple(params), radius, length)
    endpoint = path_end(path, start)
    pos_err = endpoint.distance_to(end)
    ang_err = abs(ang_diff(endpoint.theta, end.theta))
    if pos_err > _ENDPOINT_TOL * max(1.0, radius) or ang_err > 1e-6:
        return None
    return path


def shortest_path(start: Pose, end: Pose, radius: float) -> DubinsPath:
    """Shortest Dubins path from ``start`` to ``end`` with the given
    minimum turning radius.

    All pose pairs admit at least one word; equal-length candidates
    resolve by the fixed enumeration order LSL < RSR < LSR < RSL < RLR < LRL.
    """
    best = None
    for word in WORDS:
        path = word_path(start, end, radius, word)
        if path is not None and (best is None or path.length < best.length):
            best = path
    if best is None:
        # Unreachable for valid inputs: LSL/RSR always admit a solution.
        raise ArithmeticError(
            f"no Dubins word connects {start} -> {end} at radius {radius}")
    return best


def sample_path(path: DubinsPath, start: Pose, step: float) -> list[Pose]:
    """Poses spaced at most ``step`` meters along the path.

    The first pose is ``start`` and the last is the exact end pose; every
    pose lies analytically on its arc or straight segment.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    poses = [start]
    x, y, theta = start.x, start.y, start.theta
    for kind, value in zip(path.word, path.params):
        seg_len = value if kind == "S" else value * path.radius
        if seg_len <= 0.0:
            continue
        n = max(1, math.ceil(seg_len / step))
        for i in range(1, n + 1):
            frac = value * (i / n)
            px, py, pt = _advance(x, y, theta, kind, frac, path.radius)
            poses.append(Pose(px, py, pt))
        x, y, theta = _advance(x, y, theta, kind, value, path.radius)
    return poses


def edge_cost(path: DubinsPath, speed: float) -> float:
    """Traversal time of a path at constant speed, in seconds."""
    if speed <= 0.0:
        raise ValueError("speed must be positive")
    return path.length / speed


def shortest_cost(start: Pose, end: Pose, radius: float, speed: float) -> float:
    """Flight time of the shortest Dubins path between two poses."""
    return shortest_path(start, end, radius).length / speed
