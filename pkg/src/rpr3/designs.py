"""Reference designs used by the tests, the CLI examples and the README."""

from __future__ import annotations

import math

from .geometry import RobotDesign

_r = math.radians


def cardanic_design() -> RobotDesign:
    """Similar equilateral triangles with offsets chosen so every joint set on a
    branch is a Cardanic self-motion."""
    return RobotDesign(0.35, _r(30), _r(120), 0.1, _r(30), _r(120), (0.07, 0.07, 0.0))


def paminsa_design() -> RobotDesign:
    """Zero offsets and similar equilateral triangles (the PAMINSA horizontal model)."""
    return RobotDesign(0.35, _r(30), _r(120), 0.1, _r(30), _r(120), (0.0, 0.0, 0.0))


def equal_offset_design(offset: float) -> RobotDesign:
    """Similar equilateral triangles with three equal nonzero offsets: no self-motion."""
    return RobotDesign(0.35, _r(30), _r(120), 0.1, _r(30), _r(120), (offset, offset, offset))


def dissimilar_design() -> RobotDesign:
    """Isosceles platform (36, 72 deg) on an equilateral base: finitely many self-motions."""
    return RobotDesign(0.35, _r(30), _r(120), 0.2, _r(36), _r(72), (0.05, 0.05, 0.0))
