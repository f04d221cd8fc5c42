import math

import numpy as np
import pytest

from rpr3 import designs as ref
from rpr3.errors import EmptyRegion, InconsistentState
from rpr3.geometry import Pose, RobotDesign, WorkingMode, base_anchors, platform_local
from rpr3.kinematics import consistent_modes, inverse_kinematics
from rpr3.selfmotion import cardanic_path, default_branch
from rpr3.singularity import (
    classify,
    concurrency_point,
    concurrency_spread,
    det_a_grid,
    force_lines,
    intersect_lines,
    locus_scan,
    twist_null_space,
    velocity_model,
)

from conftest import DEG, random_reachable


def test_symmetric_configuration_determinants():
    d = ref.paminsa_design()
    pose = Pose(0, 0, 0)
    vm = velocity_model(d, pose, inverse_kinematics(d, pose))
    assert abs(vm.detA) > 1e-3
    assert vm.detB == pytest.approx(0.25**3, rel=1e-12)


def test_force_lines_perpendicular_to_legs():
    d = ref.paminsa_design()
    pose = Pose(0, 0, 0)
    s = inverse_kinematics(d, pose)
    for (point, direction), theta in zip(force_lines(d, pose, s), s.theta):
        assert direction @ [math.cos(theta), math.sin(theta)] == pytest.approx(0, abs=1e-15)


def test_inconsistent_state_rejected():
    d = ref.paminsa_design()
    s = inverse_kinematics(d, Pose(0, 0, 0))
    with pytest.raises(InconsistentState):
        velocity_model(d, Pose(0.01, 0, 0), s)


def test_type1_when_leg_length_vanishes():
    d = ref.paminsa_design()
    pose = Pose(*(base_anchors(d)[0] - platform_local(d)[0]), 0.0)
    s = inverse_kinematics(d, pose)
    v = classify(d, pose, s)
    assert v.kind == "type1" and v.legs == (0,) and v.ri == (True,)
    assert v.detB == 0.0
    assert v.describe() == "type1 legs=1 ri=1"


def test_type1_with_offset():
    d = ref.cardanic_design()
    # leg 1 fully retracted: C1 sits at distance L1 from A1 along the normal
    theta = 0.4
    c1 = base_anchors(d)[0] + d.L[0] * np.array([-math.sin(theta), math.cos(theta)])
    pose = Pose(*(c1 - platform_local(d)[0]), 0.0)
    s = inverse_kinematics(d, pose)
    v = classify(d, pose, s)
    assert v.kind == "type1" and v.legs == (0,) and v.ri == (False,)


def test_cardanic_configurations():
    d = ref.cardanic_design()
    br = default_branch(d)
    for phi in np.linspace(-3, 3, 7):
        cp = cardanic_path(d, 0.0, br, phi)
        modes = consistent_modes(d, cp.pose, cp.theta)
        assert modes
        s = inverse_kinematics(d, cp.pose, modes[0])
        v = classify(d, cp.pose, s)
        assert v.kind == "type2" and v.type2_kind == "cardanic-self-motion"
        np.testing.assert_allclose(v.W, cp.W, atol=1e-9)


def test_parallel_translation():
    d = RobotDesign(0.2, DEG(30), DEG(120), 0.2, DEG(30), DEG(120))
    pose = Pose(0.0, 0.1, 0.0)
    v = classify(d, pose, inverse_kinematics(d, pose))
    assert v.kind == "type2" and v.type2_kind == "parallel-translation"
    assert v.W is None


def test_concurrent_rotation_at_generic_type2():
    # walk along x until det(A) changes sign, then bisect onto the locus
    d = ref.dissimilar_design()
    phi, y = 0.3, 0.02
    xs = np.linspace(-0.3, 0.3, 601)
    det = det_a_grid(d, phi, xs, np.full_like(xs, y), WorkingMode())
    k = np.flatnonzero(np.isfinite(det[:-1]) & np.isfinite(det[1:]) & (np.sign(det[:-1]) != np.sign(det[1:])))[0]
    lo, hi = xs[k], xs[k + 1]
    f = lambda x: velocity_model(d, Pose(x, y, phi), inverse_kinematics(d, Pose(x, y, phi))).detA
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.sign(f(mid)) == np.sign(f(lo)):
            lo = mid
        else:
            hi = mid
    pose = Pose(lo, y, phi)
    s = inverse_kinematics(d, pose)
    v = classify(d, pose, s)
    assert v.kind == "type2" and v.type2_kind == "concurrent-rotation"
    lines = force_lines(d, pose, s)
    assert concurrency_spread(lines) < 1e-8 * d.scale
    # the uncontrolled twist is a rotation about W
    t = twist_null_space(velocity_model(d, pose, s))
    centre = pose.position + np.array([-t[2], t[1]]) / t[0]
    np.testing.assert_allclose(centre, v.W, atol=1e-6)


def test_regular_verdict(rng):
    d = ref.dissimilar_design()
    pose, _, s = random_reachable(d, rng, min_rho=0.05)
    v = classify(d, pose, s)
    if abs(v.detA) > 1e-3:
        assert v.kind == "regular" and v.describe() == "regular"


def test_intersections():
    p = intersect_lines(np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([1.0, -1.0]), np.array([0.0, 1.0]))
    np.testing.assert_allclose(p, [1.0, 0.0])
    assert intersect_lines(np.zeros(2), np.array([1.0, 0]), np.ones(2), np.array([2.0, 0])) is None
    lines = [(np.array([0.0, 0.0]), np.array([1.0, 0.0])), (np.array([0.0, 0.0]), np.array([0.0, 1.0])),
             (np.array([1.0, 1.0]), np.array([1.0, 1.0]) / math.sqrt(2))]
    np.testing.assert_allclose(concurrency_point(lines), [0, 0], atol=1e-15)
    assert concurrency_spread(lines) < 1e-15


def test_det_grid_matches_velocity_model(rng):
    d = ref.dissimilar_design()
    for _ in range(20):
        pose, mode, s = random_reachable(d, rng)
        g = det_a_grid(d, pose.phi, np.array([pose.x]), np.array([pose.y]), mode)[0]
        assert g == pytest.approx(velocity_model(d, pose, s).detA, rel=1e-9, abs=1e-15)


def _radii(scan):
    return np.concatenate([np.hypot(c[:, 0], c[:, 1]) for c in scan.contours])


@pytest.mark.parametrize("phi, radius", [(0.0, 0.25), (math.pi, 0.45)])
def test_paminsa_locus_circles(phi, radius):
    scan = locus_scan(ref.paminsa_design(), phi, (-0.6, -0.6, 0.6, 0.6), (200, 200))
    cell = 1.2 / 199
    assert np.abs(_radii(scan) - radius).max() < 2 * cell


def test_locus_rows_row_major():
    scan = locus_scan(ref.paminsa_design(), 0.0, (-0.6, -0.6, 0.6, 0.6), (5, 3))
    rows = list(scan.rows())
    assert len(rows) == 15
    assert rows[1][:2] == (pytest.approx(-0.3), pytest.approx(-0.6))
    assert rows[5][1] == pytest.approx(0.0)
    assert scan.reachable.shape == (3, 5)


def test_locus_preconditions():
    d = ref.cardanic_design()
    with pytest.raises(ValueError):
        locus_scan(d, 0.0, (-1, -1, 1, 1), (1, 10))
    with pytest.raises(ValueError):
        locus_scan(d, 0.0, (1, -1, -1, 1), (10, 10))
    # every node within L1 of the first base joint: leg 1 cannot reach
    x, y = base_anchors(d)[0] - platform_local(d)[0]
    with pytest.raises(EmptyRegion):
        locus_scan(d, 0.0, (x - 0.01, y - 0.01, x + 0.01, y + 0.01), (4, 4))
