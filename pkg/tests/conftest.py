import math

import numpy as np
import pytest
from hypothesis import assume
from hypothesis import strategies as st

from rpr3.errors import InvalidDesign, Unreachable
from rpr3.geometry import Pose, RobotDesign, WorkingMode
from rpr3.kinematics import inverse_kinematics

DEG = math.radians


def random_design(rng, offsets=True):
    """A valid design with moderately shaped triangles."""
    while True:
        try:
            return RobotDesign(
                rng.uniform(0.15, 0.8), rng.uniform(-1.3, 1.3), rng.uniform(0.4, 2 * math.pi - 0.4),
                rng.uniform(0.05, 0.6), rng.uniform(-1.3, 1.3), rng.uniform(0.4, 2 * math.pi - 0.4),
                tuple(rng.uniform(0, 0.15, 3)) if offsets else (0.0, 0.0, 0.0),
            )
        except InvalidDesign:
            continue


def random_reachable(design, rng, min_rho=1e-3):
    """Random pose, mode and joint state with every leg comfortably away from rho = 0."""
    while True:
        r = design.R_b * math.sqrt(rng.random())
        a = rng.uniform(-math.pi, math.pi)
        pose = Pose(r * math.cos(a), r * math.sin(a), rng.uniform(-math.pi, math.pi))
        mode = WorkingMode(tuple(int(v) for v in rng.choice([1, -1], 3)))
        try:
            state = inverse_kinematics(design, pose, mode)
        except Unreachable:
            continue
        if min(abs(v) for v in state.rho) > min_rho * design.scale:
            return pose, mode, state


@st.composite
def designs(draw, offsets=True):
    angle = st.floats(-1.3, 1.3)
    opening = st.floats(0.4, 2 * math.pi - 0.4)
    L = st.tuples(*[st.floats(0, 0.15)] * 3) if offsets else st.just((0.0, 0.0, 0.0))
    try:
        return RobotDesign(draw(st.floats(0.15, 0.8)), draw(angle), draw(opening),
                           draw(st.floats(0.05, 0.6)), draw(angle), draw(opening), draw(L))
    except InvalidDesign:
        assume(False)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
