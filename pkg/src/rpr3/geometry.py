"""Robot parameterization, poses, joint states and triangle vertices.

Base and platform triangles share one convention.  For a triangle with
circumradius ``R`` and shape angles ``alpha``, ``beta`` (vertices listed in
the local frame centred on the circumcentre)::

    V1 = -R (cos alpha,  sin alpha)
    V2 =  R (cos alpha, -sin alpha)
    V3 =  R (cos(beta - alpha), sin(beta - alpha))

so that V1V2 = 2R cos(alpha) (1, 0) and
V1V3 = 2R cos(beta/2 - alpha) (cos beta/2, sin beta/2).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDesign

TWO_PI = 2.0 * math.pi

# Quarter turn (counter-clockwise): d/dphi R(phi) v = QUARTER_TURN @ R(phi) v
QUARTER_TURN = np.array([[0.0, -1.0], [1.0, 0.0]])


def normalize_angle(theta):
    """Wrap an angle (scalar or array) into (-pi, pi]."""
    if np.ndim(theta) == 0:
        t = float(theta)
        if not math.isfinite(t):
            raise ValueError(f"non-finite angle: {theta!r}")
        w = math.fmod(t + math.pi, TWO_PI)
        if w <= 0.0:
            w += TWO_PI
        return w - math.pi
    arr = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite angle in array")
    w = np.fmod(arr + math.pi, TWO_PI)
    w = np.where(w <= 0.0, w + TWO_PI, w)
    return w - math.pi


def angle_diff(a, b):
    """Smallest signed difference a - b, wrapped into (-pi, pi]."""
    return normalize_angle(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))


def rotation(phi):
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def unit(angle):
    """Unit vector (cos a, sin a)."""
    return np.array([math.cos(angle), math.sin(angle)])


def normal(angle):
    """Unit vector (-sin a, cos a), i.e. ``unit(angle)`` turned by +90 degrees."""
    return np.array([-math.sin(angle), math.cos(angle)])


def triangle_vertices(radius, alpha, beta):
    """Vertices of a triangle in its circumcentre frame, shape (3, 2)."""
    return radius * np.array(
        [
            [-math.cos(alpha), -math.sin(alpha)],
            [math.cos(alpha), -math.sin(alpha)],
            [math.cos(beta - alpha), math.sin(beta - alpha)],
        ]
    )


@dataclass(frozen=True)
class RobotDesign:
    """Geometry of a 3-RPR robot with actuated base revolute joints.

    Lengths in metres, angles in radians.  ``L`` holds the three offsets
    |B_iC_i| between each prismatic axis and its platform joint.
    """

    R_b: float
    alpha_b: float
    beta_b: float
    R_p: float
    alpha_p: float
    beta_p: float
    L: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "L", tuple(float(v) for v in self.L))
        problems = design_problems(self)
        if problems:
            raise InvalidDesign("; ".join(problems))

    @property
    def span(self):
        """R_b + R_p; length scale for the ellipse coefficients."""
        return self.R_b + self.R_p

    @property
    def scale(self):
        """Characteristic length used for scale-relative tolerances."""
        return self.R_b + self.R_p + max(self.L)

    @property
    def similar(self):
        return abs(self.alpha_b - self.alpha_p) < 1e-10 and abs(self.beta_b - self.beta_p) < 1e-10

    def with_offsets(self, L):
        return RobotDesign(self.R_b, self.alpha_b, self.beta_b, self.R_p, self.alpha_p, self.beta_p, tuple(L))


def design_problems(design) -> list[str]:
    """Return the list of violated design invariants (empty when valid)."""
    out = []
    values = [design.R_b, design.alpha_b, design.beta_b, design.R_p, design.alpha_p, design.beta_p, *design.L]
    if len(design.L) != 3:
        return ["exactly three offsets are required"]
    if not all(math.isfinite(v) for v in values):
        return ["all parameters must be finite"]
    if design.R_b <= 0:
        out.append("R_b must be positive")
    if design.R_p <= 0:
        out.append("R_p must be positive")
    if any(v < 0 for v in design.L):
        out.append("offsets must be non-negative")
    for name in ("alpha_b", "alpha_p"):
        if not -math.pi / 2 < getattr(design, name) < math.pi / 2:
            out.append(f"{name} must lie in (-90, 90) degrees")
    for name in ("beta_b", "beta_p"):
        if not 0 < getattr(design, name) < TWO_PI:
            out.append(f"{name} must lie in (0, 360) degrees")
    if out:
        return out
    for label, r, a, b in (("base", design.R_b, design.alpha_b, design.beta_b),
                           ("platform", design.R_p, design.alpha_p, design.beta_p)):
        v = triangle_vertices(r, a, b)
        gaps = [np.linalg.norm(v[i] - v[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
        if min(gaps) <= 1e-9 * r:
            out.append(f"{label} triangle is degenerate (coincident vertices)")
    return out


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "phi", normalize_angle(self.phi))

    @property
    def position(self):
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class JointState:
    theta: tuple
    rho: tuple

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(normalize_angle(t)) for t in self.theta))
        object.__setattr__(self, "rho", tuple(float(r) for r in self.rho))


@dataclass(frozen=True)
class WorkingMode:
    """One sign per leg: +1 selects the solution with rho_i >= 0."""

    signs: tuple = field(default=(1, 1, 1))

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) != 3 or any(s not in (1, -1) for s in signs):
            raise ValueError(f"working mode needs three +1/-1 entries, got {self.signs!r}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def parse(cls, text: str) -> "WorkingMode":
        text = text.strip()
        if len(text) != 3 or any(ch not in "+-" for ch in text):
            raise ValueError(f"working mode must be three '+'/'-' characters, got {text!r}")
        return cls(tuple(1 if ch == "+" else -1 for ch in text))

    @classmethod
    def all(cls) -> list["WorkingMode"]:
        return [cls(s) for s in itertools.product((1, -1), repeat=3)]

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self.signs)


def base_anchors(design: RobotDesign) -> np.ndarray:
    """World coordinates of A1, A2, A3, shape (3, 2)."""
    return triangle_vertices(design.R_b, design.alpha_b, design.beta_b)


def platform_local(design: RobotDesign) -> np.ndarray:
    """C1, C2, C3 in the platform frame centred on P, shape (3, 2)."""
    return triangle_vertices(design.R_p, design.alpha_p, design.beta_p)


def platform_points(design: RobotDesign, pose: Pose) -> np.ndarray:
    """World coordinates of C1, C2, C3 for a pose, shape (3, 2)."""
    return pose.position + platform_local(design) @ rotation(pose.phi).T
