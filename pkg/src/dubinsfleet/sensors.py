"""Sensor footprint models and necessarily-intersecting regions (NIR).

A vehicle senses a circular ground footprint, either centered on itself
(omni) or pushed out along a look direction (forward / rightward), or an
arbitrary polygon fixed in the body frame.  The NIR of a pose is the set
of points guaranteed to be swept by the footprint no matter which
curvature-feasible maneuver the vehicle takes through that pose; a task
inside it is a necessarily-intersecting node (NIN) of the sample.

The closed-form membership test models the maneuvers the sweep oracle
uses: one full revolution on each maximum-rate turn circle and a straight
run of four footprint radii each way.  Under those maneuvers the NIR is

    annulus(left turn) ∩ annulus(right turn) ∩ (back sweep ∪ forward sweep)

which always contains the instantaneous footprint.  Membership is biased
inward by a small margin so boundary points count as outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dubins import Pose

# Straight-maneuver sweep extent, in units of the footprint radius.  Turn
# sweeps span one full revolution; beyond that the covered set is static.
STRAIGHT_SWEEP_FACTOR = 4.0

# Default inward bias for boundary membership (meters).
DEFAULT_MARGIN = 1e-9

ORIENTATIONS = ("omni", "forward", "rightward", "arbitrary")


@dataclass(frozen=True)
class SensorModel:
    """Footprint geometry in the vehicle body frame (+x along heading).

    ``a`` and ``b`` are the near and far offsets of the footprint along
    the look direction; the circular footprint has radius (b - a)/2 and
    its center sits (a + b)/2 from the vehicle.  An omni sensor has
    a = -r_sen, b = +r_sen so the footprint rides centered on the vehicle.
    """

    orientation: str
    r_sen: float
    a: float
    b: float
    polygon: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.orientation == "arbitrary":
            if not self.polygon or len(self.polygon) < 3:
                raise ValueError("arbitrary sensor needs a polygon")
            if abs(_polygon_area(self.polygon)) <= 0.0:
                raise ValueError("degenerate polygon footprint")
            return
        if self.polygon is not None:
            raise ValueError("polygon only valid for arbitrary orientation")
        if self.r_sen <= 0.0:
            raise ValueError("footprint radius must be positive")
        if self.orientation == "omni":
            if not (math.isclose(self.a, -self.r_sen) and math.isclose(self.b, self.r_sen)):
                raise ValueError("omni sensor requires a = -r_sen, b = +r_sen")
        else:
            if not (self.b > self.a >= 0.0):
                raise ValueError("directional sensor requires b > a >= 0")
            if not math.isclose(self.r_sen, (self.b - self.a) / 2.0, rel_tol=1e-9):
                raise ValueError("r_sen must equal (b - a)/2")

    @classmethod
    def omni(cls, r_sen: float) -> "SensorModel":
        return cls("omni", r_sen, -r_sen, r_sen)

    @classmethod
    def directional(cls, orientation: str, a: float, b: float) -> "SensorModel":
        return cls(orientation, (b - a) / 2.0, a, b)

    @classmethod
    def arbitrary(cls, polygon) -> "SensorModel":
        poly = tuple((float(x), float(y)) for x, y in polygon)
        return cls("arbitrary", 0.0, 0.0, 0.0, poly)

    @property
    def center_offset(self) -> float:
        """Distance from the vehicle to the footprint center."""
        return (self.a + self.b) / 2.0

    @property
    def look_angle(self) -> float:
        """Look direction relative to the heading (0 ahead, -pi/2 right)."""
        return -math.pi / 2.0 if self.orientation == "rightward" else 0.0


@dataclass(frozen=True)
class NirParams:
    """Forward-sensor NIR construction parameters.

    ``r_a``/``r_ab``/``r_b`` are the turn-center distances to the near
    footprint edge, footprint center, and far edge; (l1, alpha1) and
    (l2, alpha2) locate the tangency points of the near and far sweep
    circles with the footprint, polar about the vehicle.
    """

    r_a: float
    r_ab: float
    r_b: float
    alpha1: float
    alpha2: float
    l1: float
    l2: float


def footprint_geometry(altitude: float, min_nadir_angle: float,
                       max_nadir_angle: float) -> tuple[float, float, float]:
    """Near/far ground offsets and footprint radius from look-angle limits.

    Returns (a, b, r_sen) with a = altitude*tan(min), b = altitude*tan(max).
    """
    if altitude <= 0.0:
        raise ValueError("altitude must be positive")
    if not (0.0 <= min_nadir_angle < max_nadir_angle < math.pi / 2.0):
        raise ValueError("need 0 <= min nadir < max nadir < pi/2")
    a = altitude * math.tan(min_nadir_angle)
    b = altitude * math.tan(max_nadir_angle)
    return a, b, (b - a) / 2.0


def footprint_center(pose: Pose, sensor: SensorModel) -> tuple[float, float]:
    """Ground position of the footprint center for a vehicle at ``pose``."""
    off = sensor.center_offset
    if off == 0.0:
        return (pose.x, pose.y)
    ang = pose.theta + sensor.look_angle
    return (pose.x + off * math.cos(ang), pose.y + off * math.sin(ang))


def footprint_contains(pose: Pose, sensor: SensorModel, point, tol: float = 0.0) -> bool:
    """Instantaneous footprint membership; ``tol`` > 0 dilates the test."""
    if sensor.orientation == "arbitrary":
        bx, by = _to_body(pose, point)
        if _point_in_polygon(bx, by, sensor.polygon):
            return True
        return tol > 0.0 and _point_polygon_distance(bx, by, sensor.polygon) <= tol
    cx, cy = footprint_center(pose, sensor)
    return math.hypot(point[0] - cx, point[1] - cy) <= sensor.r_sen + tol


def circle_intersection(c1, r1, c2, r2, tol: float = 1e-9) -> list[tuple[float, float]]:
    """Intersection points of two circles; tangencies yield one point."""
    dx = c2[0] - c1[0]
    dy = c2[1] - c1[1]
    d = math.hypot(dx, dy)
    if d < tol:
        return []
    if d > r1 + r2 + tol or d < abs(r1 - r2) - tol:
        return []
    along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d)
    h_sq = r1 * r1 - along * along
    mx = c1[0] + along * dx / d
    my = c1[1] + along * dy / d
    if h_sq <= tol * max(r1, r2):
        return [(mx, my)]
    h = math.sqrt(h_sq)
    ox = h * dy / d
    oy = -h * dx / d
    return [(mx + ox, my + oy), (mx - ox, my - oy)]


def nir_params(sensor: SensorModel, r_min: float) -> NirParams:
    """NIR construction parameters for a directional circular sensor.

    Uses the forward-sensor construction: the left turn center sits at
    lateral distance r_min from the vehicle, the footprint center at
    (a+b)/2 ahead, hence r_ab = sqrt(r_min^2 + ((a+b)/2)^2).  The (l, α)
    pairs come from intersecting the near/far sweep circles with the
    footprint circle.
    """
    if sensor.orientation not in ("forward", "rightward"):
        raise ValueError("nir_params requires a directional circular sensor")
    if r_min <= 0.0:
        raise ValueError("turn radius must be positive")
    c = sensor.center_offset
    rho = sensor.r_sen
    r_ab = math.hypot(r_min, c)
    r_a = r_ab - rho
    r_b = r_ab + rho
    # Appendix frame: vehicle at origin heading +y, left turn center p1 at
    # (-r_min, 0), footprint center p4 at (0, c).
    p1 = (-r_min, 0.0)
    p4 = (0.0, c)
    if rho == 0.0:
        return NirParams(r_a, r_ab, r_b, 0.0, 0.0, r_ab, r_ab)
    pts_near = circle_intersection(p1, r_a, p4, rho)
    pts_far = circle_intersection(p1, r_b, p4, rho)
    if not pts_near or not pts_far:
        raise ArithmeticError("sweep circles failed to meet the footprint")
    p3 = pts_near[0]
    p5 = pts_far[0]
    l1 = math.hypot(*p3)
    l2 = math.hypot(*p5)
    alpha1 = abs(math.atan2(abs(p3[0]), p3[1]))
    alpha2 = abs(math.atan2(abs(p5[0]), p5[1]))
    return NirParams(r_a, r_ab, r_b, alpha1, alpha2, l1, l2)


def _to_body(pose: Pose, point) -> tuple[float, float]:
    """Express a world point in the pose's body frame (+x = heading)."""
    dx = point[0] - pose.x
    dy = point[1] - pose.y
    ct = math.cos(pose.theta)
    st = math.sin(pose.theta)
    return (dx * ct + dy * st, -dx * st + dy * ct)


def _point_segment_distance(px, py, ax, ay, bx, by) -> float:
    vx, vy = bx - ax, by - ay
    seg_sq = vx * vx + vy * vy
    if seg_sq <= 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * vx + (py - ay) * vy) / seg_sq
    t = min(1.0, max(0.0, t))
    return math.hypot(px - ax - t * vx, py - ay - t * vy)


def _in_annulus(dist: float, lo: float, hi: float, margin: float) -> bool:
    return dist >= max(lo, 0.0) + margin and dist <= hi - margin


def _nir_body_frame(sensor: SensorModel, r_min: float, bx: float, by: float,
                    margin: float) -> bool:
    """Closed-form NIR membership for circular sensors, body frame."""
    rho = sensor.r_sen
    off = sensor.center_offset
    look = sensor.look_angle
    cx = off * math.cos(look)
    cy = off * math.sin(look)

    # Instantaneous footprint (always a subset of the sweep intersection).
    if math.hypot(bx - cx, by - cy) <= rho - margin:
        return True

    if sensor.orientation == "rightward" and r_min < sensor.b:
        # Hard turns fold the sweep inside the footprint; nothing beyond
        # the instantaneous footprint is guaranteed.
        return False

    # Maximum-rate turn circles: centers at lateral +/- r_min.
    d_left = math.hypot(bx - 0.0, by - r_min)
    d_right = math.hypot(bx - 0.0, by + r_min)
    r_left = math.hypot(cx, cy - r_min)
    r_right = math.hypot(cx, cy + r_min)
    if not _in_annulus(d_left, r_left - rho, r_left + rho, margin):
        return False
    if not _in_annulus(d_right, r_right - rho, r_right + rho, margin):
        return False

    # Straight maneuvers: footprint center runs parallel to the heading.
    sweep = STRAIGHT_SWEEP_FACTOR * rho
    d_back = _point_segment_distance(bx, by, cx, cy, cx - sweep, cy)
    d_fwd = _point_segment_distance(bx, by, cx, cy, cx + sweep, cy)
    return min(d_back, d_fwd) <= rho - margin


def nir_contains(sample: Pose, sensor: SensorModel, r_min: float, task_point,
                 margin: float = DEFAULT_MARGIN) -> bool:
    """True when ``task_point`` is necessarily swept near ``sample``.

    Sound with respect to :func:`nir_oracle`: a True here implies every
    curvature-feasible maneuver pair through the pose covers the point.
    """
    if r_min <= 0.0:
        raise ValueError("turn radius must be positive")
    if sensor.orientation == "arbitrary":
        return nir_arbitrary(sensor.polygon, sample, r_min, task_point, margin)
    bx, by = _to_body(sample, task_point)
    return _nir_body_frame(sensor, r_min, bx, by, margin)


# ---------------------------------------------------------------------------
# Arbitrary polygon footprints
# ---------------------------------------------------------------------------

def _polygon_area(polygon) -> float:
    area = 0.0
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        area += x1 * y2 - x2 * y1
    return area / 2.0


def _point_in_polygon(px: float, py: float, polygon) -> bool:
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_cross:
                inside = not inside
    return inside


def _point_polygon_distance(px: float, py: float, polygon) -> float:
    """Distance to the filled polygon (0 inside)."""
    if _point_in_polygon(px, py, polygon):
        return 0.0
    n = len(polygon)
    return min(
        _point_segment_distance(px, py, *polygon[i], *polygon[(i + 1) % n])
        for i in range(n)
    )


def _polygon_distance_range(cx: float, cy: float, polygon) -> tuple[float, float]:
    """Min/max distance from a point to the filled polygon."""
    lo = _point_polygon_distance(cx, cy, polygon)
    hi = max(math.hypot(vx - cx, vy - cy) for vx, vy in polygon)
    return lo, hi


def _polygon_circumradius(polygon) -> float:
    n = len(polygon)
    cx = sum(p[0] for p in polygon) / n
    cy = sum(p[1] for p in polygon) / n
    return max(math.hypot(px - cx, py - cy) for px, py in polygon)


def _swept_polygon_hit(bx: float, by: float, polygon, direction: float,
                       extent: float, margin: float) -> bool:
    """Is (bx, by) inside the polygon swept along +/-x by ``extent``?

    Equivalent to asking whether sliding the query point backwards along
    the sweep direction ever lands strictly inside the polygon.
    """
    n_steps = 64
    for i in range(n_steps + 1):
        t = extent * i / n_steps
        qx = bx - direction * t
        if _point_in_polygon(qx, by, polygon):
            # Inward margin: require the point to sit at least ``margin``
            # from the boundary.
            if margin <= 0.0 or _min_edge_distance(qx, by, polygon) >= margin:
                return True
    return False


def _min_edge_distance(px: float, py: float, polygon) -> float:
    n = len(polygon)
    return min(
        _point_segment_distance(px, py, *polygon[i], *polygon[(i + 1) % n])
        for i in range(n)
    )


def nir_arbitrary(polygon, pose: Pose, r_min: float, task_point,
                  margin: float = DEFAULT_MARGIN) -> bool:
    """NIR membership for an arbitrary body-frame footprint polygon.

    The left/right turn sweeps become annuli whose radii are the min and
    max distances from each turn center to the polygon; the straight
    sweeps slide the polygon along the heading.  The task must fall in
    both annuli and in at least one straight sweep.
    """
    if r_min <= 0.0:
        raise ValueError("turn radius must be positive")
    poly = tuple((float(x), float(y)) for x, y in polygon)
    if len(poly) < 3 or abs(_polygon_area(poly)) <= 0.0:
        raise ValueError("degenerate polygon footprint")
    bx, by = _to_body(pose, task_point)

    lo_l, hi_l = _polygon_distance_range(0.0, r_min, poly)
    lo_r, hi_r = _polygon_distance_range(0.0, -r_min, poly)
    d_left = math.hypot(bx, by - r_min)
    d_right = math.hypot(bx, by + r_min)
    if not (lo_l + margin <= d_left <= hi_l - margin):
        return False
    if not (lo_r + margin <= d_right <= hi_r - margin):
        return False

    extent = STRAIGHT_SWEEP_FACTOR * _polygon_circumradius(poly)
    return (_swept_polygon_hit(bx, by, poly, -1.0, extent, margin)
            or _swept_polygon_hit(bx, by, poly, 1.0, extent, margin))


# ---------------------------------------------------------------------------
# Sweep oracle
# ---------------------------------------------------------------------------

MANEUVER_PAIRS = tuple((b, a) for b in "LSR" for a in "LSR")


def _sweep_poses(sample: Pose, sensor: SensorModel, r_min: float,
                 maneuver: str, direction: int, step: float) -> np.ndarray:
    """Pose array (N x 3) along one maneuver from the sample pose.

    ``direction`` -1 walks backwards in time (the approach), +1 forwards.
    ``step`` bounds the footprint-center displacement between poses.
    """
    if sensor.orientation == "arbitrary":
        reach = sensor.center_offset + _polygon_circumradius(sensor.polygon)
        straight_extent = STRAIGHT_SWEEP_FACTOR * _polygon_circumradius(sensor.polygon)
    else:
        reach = abs(sensor.center_offset)
        straight_extent = STRAIGHT_SWEEP_FACTOR * sensor.r_sen

    if maneuver == "S":
        n = max(1, math.ceil(straight_extent / step))
        s = np.linspace(0.0, direction * straight_extent, n + 1)
        xs = sample.x + s * math.cos(sample.theta)
        ys = sample.y + s * math.sin(sample.theta)
        ts = np.full_like(s, sample.theta)
        return np.column_stack([xs, ys, ts])

    sign = 1.0 if maneuver == "L" else -1.0
    # Upper bound on how fast any footprint point moves per radian of
    # heading change: it orbits the turn center at most r_min + reach away.
    r_center = max(r_min + reach, step)
    dpsi = step / r_center
    n = max(8, math.ceil(2.0 * math.pi / dpsi))
    psi = np.linspace(0.0, direction * 2.0 * math.pi, n + 1)
    cx = sample.x - sign * r_min * math.sin(sample.theta)
    cy = sample.y + sign * r_min * math.cos(sample.theta)
    ts = sample.theta + sign * psi
    xs = cx + sign * r_min * np.sin(ts)
    ys = cy - sign * r_min * np.cos(ts)
    return np.column_stack([xs, ys, np.mod(ts, 2.0 * math.pi)])


def _sweep_covers(poses: np.ndarray, sensor: SensorModel, task_point,
                  pad: float) -> bool:
    """Does any sampled footprint along the sweep contain the task?"""
    tx, ty = float(task_point[0]), float(task_point[1])
    if sensor.orientation != "arbitrary":
        off = sensor.center_offset
        ang = poses[:, 2] + sensor.look_angle
        cx = poses[:, 0] + off * np.cos(ang)
        cy = poses[:, 1] + off * np.sin(ang)
        d2 = (tx - cx) ** 2 + (ty - cy) ** 2
        lim = sensor.r_sen + pad
        return bool(np.any(d2 <= lim * lim))
    # Polygon: test the task in each pose's body frame.
    ct = np.cos(poses[:, 2])
    st = np.sin(poses[:, 2])
    dx = tx - poses[:, 0]
    dy = ty - poses[:, 1]
    bx = dx * ct + dy * st
    by = -dx * st + dy * ct
    poly = sensor.polygon
    inside = np.zeros(len(bx), dtype=bool)
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        crosses = (y1 > by) != (y2 > by)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = x1 + (by - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (bx < x_cross)
    if pad > 0.0:
        near = np.full(len(bx), np.inf)
        for i in range(n):
            ax, ay = poly[i]
            ex, ey = poly[(i + 1) % n]
            vx, vy = ex - ax, ey - ay
            seg_sq = vx * vx + vy * vy
            if seg_sq <= 0.0:
                continue
            t = np.clip(((bx - ax) * vx + (by - ay) * vy) / seg_sq, 0.0, 1.0)
            near = np.minimum(near, np.hypot(bx - ax - t * vx, by - ay - t * vy))
        inside |= near <= pad
    return bool(np.any(inside))


def nir_oracle(sample: Pose, sensor: SensorModel, r_min: float, task_point,
               step: float, pad: float | None = None,
               pairs=MANEUVER_PAIRS) -> bool:
    """Sweep-based NIR check: cover the task under every maneuver pair.

    Each maneuver pair (before, after) sweeps the footprint densely along
    both leg trajectories (full turn revolutions, straight runs of four
    footprint radii); the task must be covered in every pair.  ``pad``
    dilates the footprint by half the sampling step so the discrete sweep
    is a superset of the continuous trace it approximates.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    if pad is None:
        pad = step / 2.0
    covered = {}
    for maneuver in "LSR":
        for direction in (-1, 1):
            poses = _sweep_poses(sample, sensor, r_min, maneuver, direction, step)
            covered[(maneuver, direction)] = _sweep_covers(
                poses, sensor, task_point, pad)
    for before, after in pairs:
        if not (covered[(before, -1)] or covered[(after, 1)]):
            return False
    return True


def nin_tasks(sample, tasks, sensor: SensorModel, r_min: float,
              margin: float = DEFAULT_MARGIN) -> set[int]:
    """Ids of tasks (other than the sample's own) inside the sample's NIR."""
    out = set()
    for task in tasks:
        if task.id == sample.task_id:
            continue
        if nir_contains(sample.pose, sensor, r_min, task.position, margin):
            out.add(task.id)
    return out
