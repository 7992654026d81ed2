import math

import numpy as np
import pytest

from dubinsfleet import (Pose, SensorModel, Task, footprint_center,
                         footprint_contains, footprint_geometry, nin_tasks,
                         nir_arbitrary, nir_contains, nir_oracle, nir_params)
from dubinsfleet.instance import SampleNode

DEG = math.pi / 180.0

FWD = SensorModel.directional("forward", 173.2, 519.6)
RGT = SensorModel.directional("rightward", 173.2, 519.6)
OMNI = SensorModel.omni(173.2)


def forward_64gon(sensor=FWD, n=64):
    c = sensor.center_offset
    rho = sensor.r_sen
    return [(c + rho * math.cos(2 * math.pi * i / n),
             rho * math.sin(2 * math.pi * i / n)) for i in range(n)]


def random_pose(rng, span=150.0):
    return Pose(rng.uniform(-span, span), rng.uniform(-span, span),
                rng.uniform(0, 2 * math.pi))


class TestFootprintGeometry:
    def test_altitude_300(self):
        a, b, r_sen = footprint_geometry(300.0, 30 * DEG, 60 * DEG)
        assert a == pytest.approx(173.2, abs=0.1)
        assert b == pytest.approx(519.6, abs=0.1)
        assert r_sen == pytest.approx(173.2, abs=0.1)

    def test_altitude_200(self):
        _, _, r_sen = footprint_geometry(200.0, 30 * DEG, 60 * DEG)
        assert r_sen == pytest.approx(115.5, abs=0.1)

    def test_altitude_50(self):
        _, _, r_sen = footprint_geometry(50.0, 30 * DEG, 60 * DEG)
        assert r_sen == pytest.approx(28.9, abs=0.1)

    def test_angle_ordering_enforced(self):
        with pytest.raises(ValueError):
            footprint_geometry(300.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            footprint_geometry(300.0, 60 * DEG, 30 * DEG)
        with pytest.raises(ValueError):
            footprint_geometry(-5.0, 30 * DEG, 60 * DEG)


class TestFootprintCenter:
    def test_omni_centered_on_vehicle(self):
        assert footprint_center(Pose(0, 0, 0), OMNI) == (0.0, 0.0)

    def test_forward_offset(self):
        cx, cy = footprint_center(Pose(0, 0, 0), FWD)
        assert cx == pytest.approx(346.4, abs=1e-9)
        assert cy == pytest.approx(0.0, abs=1e-9)

    def test_rightward_of_north_facing(self):
        cx, cy = footprint_center(Pose(0, 0, math.pi / 2), RGT)
        assert cx == pytest.approx(346.4, abs=1e-9)
        assert cy == pytest.approx(0.0, abs=1e-6)


class TestNirParams:
    def test_paper_geometry(self):
        p = nir_params(FWD, 65.8)
        assert p.r_ab == pytest.approx(352.6, abs=0.1)
        assert p.r_a == pytest.approx(179.4, abs=0.1)
        assert p.r_b == pytest.approx(525.8, abs=0.1)
        assert 0.0 <= p.alpha1 < math.pi / 2
        assert 0.0 <= p.alpha2 < math.pi / 2
        # Tangency points verified directly against the circle systems.
        from dubinsfleet.sensors import circle_intersection
        p1, p4 = (-65.8, 0.0), (0.0, FWD.center_offset)
        near = circle_intersection(p1, p.r_a, p4, FWD.r_sen)
        far = circle_intersection(p1, p.r_b, p4, FWD.r_sen)
        assert len(near) == 1 and len(far) == 1
        assert math.hypot(*near[0]) == pytest.approx(p.l1, abs=1e-6)
        assert math.hypot(*far[0]) == pytest.approx(p.l2, abs=1e-6)

    def test_zero_width_annulus_degenerates(self):
        thin = SensorModel.directional("forward", 100.0, 100.0 + 2e-6)
        p = nir_params(thin, 50.0)
        assert p.r_a == pytest.approx(p.r_ab, abs=1e-5)
        assert p.r_b == pytest.approx(p.r_ab, abs=1e-5)
        assert p.alpha1 == pytest.approx(0.0, abs=1e-3)
        assert p.alpha2 == pytest.approx(0.0, abs=1e-3)

    def test_large_radius_tends_to_swept_strip(self):
        # The annulus keeps the footprint's width exactly and its curvature
        # vanishes as the turn radius grows.
        p = nir_params(FWD, 1e5)
        assert p.r_b - p.r_a == pytest.approx(FWD.b - FWD.a, rel=1e-12)
        assert p.r_ab / 1e5 == pytest.approx(1.0, rel=0.01)

    def test_requires_directional(self):
        with pytest.raises(ValueError):
            nir_params(OMNI, 60.0)


class TestNirContains:
    def test_omni_inside_footprint(self):
        pose = Pose(10, 20, 0.7)
        task = (10 + 0.5 * OMNI.r_sen, 20)
        assert nir_contains(pose, OMNI, 66.0, task)

    def test_forward_footprint_center(self):
        pose = Pose(0, 0, 0)
        assert nir_contains(pose, FWD, 65.8, footprint_center(pose, FWD))

    def test_footprint_subset(self):
        # Any point comfortably inside the instantaneous footprint is in
        # the NIR, for every orientation.
        rng = np.random.default_rng(21)
        for sensor in (OMNI, FWD, RGT):
            for _ in range(300):
                pose = random_pose(rng)
                cx, cy = footprint_center(pose, sensor)
                ang = rng.uniform(0, 2 * math.pi)
                rad = rng.uniform(0, sensor.r_sen - 1e-3)
                task = (cx + rad * math.cos(ang), cy + rad * math.sin(ang))
                r_min = rng.uniform(20.0, 400.0)
                assert nir_contains(pose, sensor, r_min, task)

    def test_rightward_collapses_to_footprint(self):
        rng = np.random.default_rng(22)
        for _ in range(1000):
            pose = random_pose(rng)
            task = (rng.uniform(-900, 900), rng.uniform(-900, 900))
            r_min = rng.uniform(10.0, RGT.b - 1.0)
            contained = nir_contains(pose, RGT, r_min, task)
            in_fp = footprint_contains(pose, RGT, task, tol=-1e-9)
            assert contained == in_fp

    def test_rigid_transform_equivariance(self):
        rng = np.random.default_rng(23)
        for sensor in (OMNI, FWD, RGT):
            for _ in range(200):
                pose = random_pose(rng)
                task = (pose.x + rng.uniform(-600, 600),
                        pose.y + rng.uniform(-600, 600))
                r_min = rng.uniform(30.0, 300.0)
                before = nir_contains(pose, sensor, r_min, task)
                # rotate by phi about the origin, then translate
                phi = rng.uniform(0, 2 * math.pi)
                tx, ty = rng.uniform(-500, 500), rng.uniform(-500, 500)
                c, s = math.cos(phi), math.sin(phi)

                def rigid(x, y):
                    return (c * x - s * y + tx, s * x + c * y + ty)

                pose2 = Pose(*rigid(pose.x, pose.y), pose.theta + phi)
                after = nir_contains(pose2, sensor, r_min, rigid(*task))
                assert before == after

    def test_soundness_against_oracle(self):
        rng = np.random.default_rng(24)
        for sensor in (OMNI, FWD, RGT):
            positives = 0
            for _ in range(700):
                pose = random_pose(rng)
                task = (pose.x + rng.uniform(-900, 900),
                        pose.y + rng.uniform(-900, 900))
                r_min = rng.uniform(30.0, 300.0)
                if nir_contains(pose, sensor, r_min, task):
                    positives += 1
                    assert nir_oracle(pose, sensor, r_min, task, step=2.0)
            assert positives > 10


class TestNirArbitrary:
    def test_circle_polygon_matches_forward(self):
        poly = forward_64gon()
        rng = np.random.default_rng(25)
        agree = 0
        total = 800
        for _ in range(total):
            pose = random_pose(rng)
            task = (pose.x + rng.uniform(-900, 900),
                    pose.y + rng.uniform(-900, 900))
            r_min = rng.uniform(40.0, 250.0)
            a = nir_arbitrary(poly, pose, r_min, task)
            b = nir_contains(pose, FWD, r_min, task)
            agree += (a == b)
        assert agree / total >= 0.99

    def test_instantaneous_polygon_inside(self):
        poly = [(-50.0, -40.0), (60.0, -35.0), (55.0, 45.0), (-45.0, 50.0)]
        pose = Pose(0, 0, 0)
        assert nir_arbitrary(poly, pose, 80.0, (5.0, 5.0))

    def test_far_point_outside(self):
        poly = forward_64gon()
        pose = Pose(0, 0, 0)
        far = (FWD.b + 2 * 66.0 + 500.0, 0.0)
        assert not nir_arbitrary(poly, pose, 66.0, far)

    def test_degenerate_polygon_rejected(self):
        with pytest.raises(ValueError):
            nir_arbitrary([(0, 0), (1, 1), (2, 2)], Pose(0, 0, 0), 50.0, (0, 0))

    def test_polygon_soundness_against_oracle(self):
        star = [(300.0, 0.0), (360.0, 40.0), (430.0, 30.0), (380.0, 90.0),
                (400.0, 160.0), (330.0, 120.0), (260.0, 150.0), (285.0, 80.0),
                (240.0, 30.0), (310.0, 45.0)]
        sensor = SensorModel.arbitrary(star)
        rng = np.random.default_rng(26)
        positives = 0
        for _ in range(600):
            pose = random_pose(rng)
            task = (pose.x + rng.uniform(-500, 500),
                    pose.y + rng.uniform(-100, 400))
            r_min = rng.uniform(40.0, 200.0)
            if nir_arbitrary(star, pose, r_min, task):
                positives += 1
                assert nir_oracle(pose, sensor, r_min, task, step=2.0)
        assert positives >= 10


class TestNirOracle:
    def test_inside_footprint_true(self):
        pose = Pose(0, 0, 0)
        assert nir_oracle(pose, OMNI, 66.0, (20.0, 10.0), step=5.0)

    def test_far_beyond_sweep_false(self):
        pose = Pose(0, 0, 0)
        task = (0.0, FWD.b + 4 * 66.0 + 4 * FWD.r_sen)
        assert not nir_oracle(pose, FWD, 66.0, task, step=5.0)

    def test_nine_way_subset_of_lr_rl(self):
        # The full nine-pair intersection can only shrink the LR/RL one.
        rng = np.random.default_rng(27)
        for _ in range(300):
            pose = random_pose(rng)
            task = (pose.x + rng.uniform(-900, 900),
                    pose.y + rng.uniform(-900, 900))
            full = nir_oracle(pose, FWD, 66.0, task, step=4.0)
            lr_rl = nir_oracle(pose, FWD, 66.0, task, step=4.0,
                               pairs=(("L", "R"), ("R", "L")))
            if full:
                assert lr_rl


class TestNinTasks:
    def test_two_group_layout(self, fig2_scenario):
        # A sample of task 2's cluster covers the other tasks of its group
        # but nothing across the field.
        scenario = fig2_scenario
        sensor = scenario.vehicles[0].sensor
        node = SampleNode(0, 2, 1, Pose(205.0, 330.0, 1.0))
        covered = nin_tasks(node, scenario.tasks, sensor, 66.0)
        assert covered == {1, 3}

    def test_isolated_tasks_have_no_nin(self):
        tasks = [Task(1, (0.0, 0.0)), Task(2, (5000.0, 0.0)),
                 Task(3, (0.0, 5000.0))]
        node = SampleNode(0, 1, 1, Pose(100.0, 0.0, 2.0))
        assert nin_tasks(node, tasks, OMNI, 66.0) == set()

    def test_saturated_omni_covers_all_others(self):
        tasks = [Task(i + 1, (10.0 * i, 0.0)) for i in range(4)]
        node = SampleNode(0, 1, 1, Pose(15.0, 5.0, 0.3))
        covered = nin_tasks(node, tasks, SensorModel.omni(500.0), 66.0)
        assert covered == {2, 3, 4}

    def test_never_contains_own_task(self):
        tasks = [Task(1, (0.0, 0.0)), Task(2, (10.0, 0.0))]
        node = SampleNode(0, 1, 1, Pose(0.0, 0.0, 0.0))
        assert 1 not in nin_tasks(node, tasks, SensorModel.omni(500.0), 66.0)
