"""Velocity model, singularity classification and numerical locus scans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyRegion, InconsistentState, ParallelLegs12
from .geometry import (
    QUARTER_TURN,
    JointState,
    Pose,
    RobotDesign,
    WorkingMode,
    base_anchors,
    normal,
    platform_local,
    platform_points,
    rotation,
)
from .kinematics import DET_B_TOL, FAMILY_C_TOL, closure_residual, dk_coefficients, leg_angles

CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class VelocityModel:
    """``A @ (phi_dot, x_dot, y_dot) = B @ theta_dot``."""

    A: np.ndarray
    B: np.ndarray

    @property
    def detA(self) -> float:
        return float(np.linalg.det(self.A))

    @property
    def detB(self) -> float:
        return float(self.B[0, 0] * self.B[1, 1] * self.B[2, 2])


def _check_state(design, pose, state):
    res = np.abs(closure_residual(design, pose, state)).max()
    if res > CONSISTENCY_TOL * design.scale:
        raise InconsistentState(f"closure residual {res:.3g} m exceeds {CONSISTENCY_TOL:g} * scale")


def velocity_model(design: RobotDesign, pose: Pose, state: JointState, check=True) -> VelocityModel:
    """Assemble A and B.

    Row i of A is ``[f_i . (Q g_i), f_i]`` with ``f_i = (-sin t_i, cos t_i)``,
    ``g_i = C_i - P`` and Q the counter-clockwise quarter turn.
    """
    if check:
        _check_state(design, pose, state)
    g = platform_points(design, pose) - pose.position
    A = np.empty((3, 3))
    for i in range(3):
        f = normal(state.theta[i])
        A[i, 0] = f @ (QUARTER_TURN @ g[i])
        A[i, 1:] = f
    return VelocityModel(A, np.diag(state.rho))


def force_lines(design: RobotDesign, pose: Pose, state: JointState):
    """Actuation force lines: (point C_i, unit direction f_i) for each leg."""
    c = platform_points(design, pose)
    return [(c[i], normal(state.theta[i])) for i in range(3)]


def intersect_lines(p1, d1, p2, d2):
    """Intersection of two lines given as point + direction, or None when parallel."""
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(cross) < 1e-300:
        return None
    w = p2 - p1
    t = (w[0] * d2[1] - w[1] * d2[0]) / cross
    return p1 + t * d1


def concurrency_point(lines):
    """Common point of three lines, computed from the least-parallel pair."""
    best, pair = -1.0, None
    for i, j in ((0, 1), (0, 2), (1, 2)):
        cr = abs(lines[i][1][0] * lines[j][1][1] - lines[i][1][1] * lines[j][1][0])
        if cr > best:
            best, pair = cr, (i, j)
    i, j = pair
    return intersect_lines(lines[i][0], lines[i][1], lines[j][0], lines[j][1])


def concurrency_spread(lines) -> float:
    """Largest distance between the pairwise intersections (inf if any pair is parallel)."""
    pts = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        p = intersect_lines(lines[i][0], lines[i][1], lines[j][0], lines[j][1])
        if p is None:
            return math.inf
        pts.append(p)
    return max(np.linalg.norm(pts[a] - pts[b]) for a, b in ((0, 1), (0, 2), (1, 2)))


@dataclass(frozen=True)
class SingularityVerdict:
    """kind: ``"regular"``, ``"type1"`` or ``"type2"``.

    type1 carries the legs with rho_i = 0 (0-based) and, per leg, whether it
    is an RI configuration (zero offset).  type2 carries ``type2_kind``:
    ``"concurrent-rotation"``, ``"parallel-translation"`` or
    ``"cardanic-self-motion"``, plus the concurrency point ``W`` when the
    force lines meet.
    """

    kind: str
    legs: tuple = ()
    ri: tuple = ()
    type2_kind: str | None = None
    W: np.ndarray | None = field(default=None, compare=False)
    detA: float = math.nan
    detB: float = math.nan

    def describe(self) -> str:
        if self.kind == "regular":
            return "regular"
        if self.kind == "type1":
            legs = ",".join(str(i + 1) for i in self.legs)
            ri = ",".join(str(i + 1) for i, f in zip(self.legs, self.ri) if f)
            return f"type1 legs={legs}" + (f" ri={ri}" if ri else "")
        return f"type2 {self.type2_kind}"


def is_degenerate_ellipse(design: RobotDesign, theta, tol=None) -> bool:
    """True when the C_3 curve collapses to a segment lying on the line of leg 3."""
    tol_b = DET_B_TOL if tol is None else tol
    tol_c = FAMILY_C_TOL if tol is None else tol
    try:
        coeff = dk_coefficients(design, theta)
    except ParallelLegs12:
        return False
    span = design.span
    return bool(abs(coeff.det_b) <= tol_b * span**2 and np.max(np.abs(coeff.c)) <= tol_c * span)


def classify(design: RobotDesign, pose: Pose, state: JointState, tol: float = 1e-8) -> SingularityVerdict:
    """Classify a consistent configuration.

    Type 1 takes precedence over Type 2.  Type 2 configurations are split by
    the degeneracy of the direct-kinematic curve: Cardanic self-motion when it
    collapses onto the third leg's line, translation when every force line is
    parallel, and an infinitesimal rotation about W otherwise.
    """
    _check_state(design, pose, state)
    vm = velocity_model(design, pose, state, check=False)
    scale = design.scale
    detA, detB = vm.detA, vm.detB
    small = [i for i in range(3) if abs(state.rho[i]) < tol * scale]
    if small:
        return SingularityVerdict("type1", tuple(small), tuple(design.L[i] == 0.0 for i in small),
                                  detA=detA, detB=detB)
    if abs(detA) >= tol * scale**3:
        return SingularityVerdict("regular", detA=detA, detB=detB)
    lines = force_lines(design, pose, state)
    dirs = [d for _, d in lines]
    parallel = all(abs(dirs[i][0] * dirs[j][1] - dirs[i][1] * dirs[j][0]) < tol
                   for i, j in ((0, 1), (0, 2), (1, 2)))
    if parallel:
        return SingularityVerdict("type2", type2_kind="parallel-translation", detA=detA, detB=detB)
    W = concurrency_point(lines)
    if is_degenerate_ellipse(design, state.theta, tol=tol):
        return SingularityVerdict("type2", type2_kind="cardanic-self-motion", W=W, detA=detA, detB=detB)
    return SingularityVerdict("type2", type2_kind="concurrent-rotation", W=W, detA=detA, detB=detB)


def twist_null_space(vm: VelocityModel) -> np.ndarray:
    """Unit platform twist (phi_dot, x_dot, y_dot) spanning the near-null space of A."""
    _, _, vt = np.linalg.svd(vm.A)
    return vt[-1]


# ----------------------------------------------------------------------------
# locus scans


@dataclass(frozen=True)
class LocusScan:
    """det(A) sampled on a grid at fixed orientation.

    ``detA`` has shape (ny, nx): row j is y = ys[j], column i is x = xs[i];
    unreachable nodes hold NaN.  ``contours`` is a list of (k, 2) polylines
    of the zero level.
    """

    xs: np.ndarray
    ys: np.ndarray
    phi: float
    mode: WorkingMode
    detA: np.ndarray
    contours: list

    @property
    def reachable(self) -> np.ndarray:
        return ~np.isnan(self.detA)

    def rows(self):
        """Grid nodes in row-major order: (x, y, detA or None)."""
        for j, y in enumerate(self.ys):
            for i, x in enumerate(self.xs):
                v = self.detA[j, i]
                yield float(x), float(y), (None if math.isnan(v) else float(v))


def det_a_grid(design: RobotDesign, phi: float, X: np.ndarray, Y: np.ndarray, mode: WorkingMode) -> np.ndarray:
    """Vectorized det(A) over position arrays at fixed orientation (NaN where unreachable)."""
    rot = rotation(phi)
    g = platform_local(design) @ rot.T
    A = base_anchors(design)
    rows = []
    ok = np.ones(X.shape, dtype=bool)
    for i in range(3):
        dx = X + g[i, 0] - A[i, 0]
        dy = Y + g[i, 1] - A[i, 1]
        theta, _, reach = leg_angles(dx, dy, design.L[i], mode.signs[i])
        ok &= reach
        fx, fy = -np.sin(theta), np.cos(theta)
        qg = QUARTER_TURN @ g[i]
        rows.append((fx * qg[0] + fy * qg[1], fx, fy))
    (a0, a1, a2), (b0, b1, b2), (c0, c1, c2) = rows
    det = a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0)
    return np.where(ok, det, np.nan)


def zero_contours(xs, ys, values) -> list:
    """Zero level lines of a gridded field by linear interpolation along cell edges.

    NaN nodes are masked so no line crosses an unreachable hole.
    """
    import contourpy

    z = np.ma.masked_invalid(values)
    gen = contourpy.contour_generator(xs, ys, z, line_type=contourpy.LineType.Separate)
    return [np.asarray(line) for line in gen.lines(0.0) if len(line) >= 2]


def locus_scan(design: RobotDesign, phi: float, region, grid, mode: WorkingMode = WorkingMode()) -> LocusScan:
    """Sample det(A) over ``region = (x0, y0, x1, y1)`` on ``grid = (nx, ny)`` nodes."""
    nx, ny = (int(v) for v in grid)
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2 nodes along each axis")
    x0, y0, x1, y1 = (float(v) for v in region)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("region must satisfy x0 < x1 and y0 < y1")
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    X, Y = np.meshgrid(xs, ys)
    det = det_a_grid(design, phi, X, Y, mode)
    if not np.any(np.isfinite(det)):
        raise EmptyRegion("no grid node is reachable in this working mode")
    return LocusScan(xs, ys, float(phi), mode, det, zero_contours(xs, ys, det))
