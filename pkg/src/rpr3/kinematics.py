"""Inverse and direct kinematics.

Leg closure convention (every formula in this package follows it)::

    C_i = A_i + rho_i (cos t_i, sin t_i) + L_i (-sin t_i, cos t_i)

with ``rho_i`` signed.  Projecting on the normal ``f_i = (-sin t_i, cos t_i)``
gives the scalar leg constraint ``f_i . (C_i - A_i) - L_i = 0``.

Direct kinematics follows the ellipse/line construction: with t_1 and t_2
fixed, C_1 and C_2 slide on two lines, C_3 traces the curve
``C_3(phi) = b[:, 0] + b[:, 1] cos(phi) + b[:, 2] sin(phi)`` and the
assembly modes are where that curve meets the line of leg 3,
``c_1 + c_2 cos(phi) + c_3 sin(phi) = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ParallelLegs12, Unreachable
from .geometry import (
    QUARTER_TURN,
    JointState,
    Pose,
    RobotDesign,
    WorkingMode,
    angle_diff,
    base_anchors,
    normal,
    normalize_angle,
    platform_local,
    platform_points,
    unit,
)

PARALLEL_TOL = 1e-10  # |sin(t_j - t_i)| at or below this means parallel legs
DET_B_TOL = 1e-10  # relative to span**2
FAMILY_C_TOL = 1e-10  # relative to span
TANGENT_TOL = 1e-12  # on |c_1| / hypot(c_2, c_3) - 1
RI_TOL = 1e-12  # relative to scale, |A_iC_i| at which a zero-offset leg is in an RI configuration


class LegSolution(NamedTuple):
    theta: float
    rho: float
    ri: bool = False


def _branch_sign(branch) -> int:
    if branch in (1, "+", "plus"):
        return 1
    if branch in (-1, "-", "minus"):
        return -1
    raise ValueError(f"branch must be +1/-1 or '+'/'-', got {branch!r}")


def leg_angles(dx, dy, offset, sign):
    """Solve one leg for arrays of joint-to-anchor vectors.

    Returns ``(theta, rho, reachable)``.  Unreachable entries get NaN.
    """
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    r = np.hypot(dx, dy)
    reachable = r >= offset
    gamma = np.arctan2(dy, dx)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(r > 0, np.minimum(offset / np.where(r > 0, r, 1.0), 1.0), 0.0)
        lean = np.arcsin(ratio)
        length = np.sqrt(np.maximum(r * r - offset * offset, 0.0))
    if sign > 0:
        theta = gamma - lean
        rho = length
    else:
        theta = gamma + lean - math.pi
        rho = -length
    theta = np.where(reachable, normalize_angle(theta), np.nan)
    rho = np.where(reachable, rho, np.nan)
    return theta, rho, reachable


def leg_ik(design: RobotDesign, pose: Pose, leg: int, branch) -> LegSolution:
    """Actuated angle and signed prismatic length of one leg.

    ``branch`` +1 picks the solution with ``rho >= 0`` and -1 the one with
    ``rho <= 0``.  When the platform joint sits on the base joint of a
    zero-offset leg the angle is indeterminate: ``theta = 0``, ``rho = 0``
    and ``ri`` is set.
    """
    sign = _branch_sign(branch)
    a = base_anchors(design)[leg]
    c = platform_points(design, pose)[leg]
    d = c - a
    offset = design.L[leg]
    r = math.hypot(d[0], d[1])
    if offset == 0.0 and r <= RI_TOL * design.scale:
        return LegSolution(0.0, 0.0, True)
    if r < offset:
        if offset - r > 1e-13 * design.scale:
            raise Unreachable(leg, r, offset)
        r = offset
    gamma = math.atan2(d[1], d[0])
    lean = math.asin(min(offset / r, 1.0))
    if sign > 0:
        theta = gamma - lean
    else:
        theta = gamma + lean - math.pi
    theta = normalize_angle(theta)
    rho = float(unit(theta) @ d)
    return LegSolution(theta, rho, False)


def inverse_kinematics(design: RobotDesign, pose: Pose, mode: WorkingMode = WorkingMode()) -> JointState:
    legs = [leg_ik(design, pose, i, mode.signs[i]) for i in range(3)]
    return JointState(tuple(s.theta for s in legs), tuple(s.rho for s in legs))


def leg_constraint(design: RobotDesign, pose: Pose, leg: int, theta: float) -> float:
    """Scalar leg constraint ``f_i . (C_i - A_i) - L_i``; zero on the leg's solutions."""
    d = platform_points(design, pose)[leg] - base_anchors(design)[leg]
    return float(normal(theta) @ d - design.L[leg])


def closure_residual(design: RobotDesign, pose: Pose, state: JointState) -> np.ndarray:
    """Per-leg vector residual ``C_i - A_i - rho_i u_i - L_i f_i``, shape (3, 2)."""
    c = platform_points(design, pose)
    a = base_anchors(design)
    out = np.empty((3, 2))
    for i in range(3):
        t = state.theta[i]
        out[i] = c[i] - a[i] - state.rho[i] * unit(t) - design.L[i] * normal(t)
    return out


def mode_of(state: JointState) -> WorkingMode:
    """Working mode that reproduces a joint state (sign of each rho)."""
    return WorkingMode(tuple(1 if r >= 0 else -1 for r in state.rho))


# ----------------------------------------------------------------------------
# direct kinematics


@dataclass(frozen=True)
class DkCoefficients:
    """Ellipse/line coefficients for a fixed joint triple.

    ``a`` (2x3): rho_j = a[j,0] + a[j,1] cos(phi) + a[j,2] sin(phi), j = 1, 2
    ``b`` (2x3): C_3(phi) = b[:,0] + b[:,1] cos(phi) + b[:,2] sin(phi)
    ``c`` (3,):  c[0] + c[1] cos(phi) + c[2] sin(phi) = 0 on assembly

    Entries may carry trailing array dimensions when ``theta`` was an array.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    theta: tuple

    @property
    def det_b(self):
        return self.b[0, 1] * self.b[1, 2] - self.b[0, 2] * self.b[1, 1]


def dk_coefficients(design: RobotDesign, theta) -> DkCoefficients:
    """Closed-form coefficients for legs 1 and 2 as the sliding pair.

    ``theta`` entries may be scalars or equally-shaped arrays.
    """
    t1, t2, t3 = (np.asarray(t, dtype=float) for t in theta)
    s = np.sin(t2 - t1)
    if np.any(np.abs(s) <= PARALLEL_TOL):
        raise ParallelLegs12("legs 1 and 2 are parallel (sin(theta_2 - theta_1) = 0)")
    A = base_anchors(design)
    L1, L2, L3 = design.L
    Rp, ap, bp = design.R_p, design.alpha_p, design.beta_p
    dx = A[1, 0] - A[0, 0]
    k = 2.0 * Rp * math.cos(ap)
    cos21 = np.cos(t2 - t1)
    s1, c1_, s2, c2_, s3, c3_ = np.sin(t1), np.cos(t1), np.sin(t2), np.cos(t2), np.sin(t3), np.cos(t3)

    a11 = (dx * s2 + L1 * cos21 - L2) / s
    a12 = -k * s2 / s
    a13 = k * c2_ / s
    a21 = (dx * s1 - L2 * cos21 + L1) / s
    a22 = -k * s1 / s
    a23 = k * c1_ / s

    g = 2.0 * Rp * math.cos(ap - bp / 2.0)
    gc, gs = g * math.cos(bp / 2.0), g * math.sin(bp / 2.0)
    b11 = A[0, 0] + a11 * c1_ - L1 * s1
    b21 = A[0, 1] + a11 * s1 + L1 * c1_
    b12 = a12 * c1_ + gc
    b22 = a12 * s1 + gs
    b13 = a13 * c1_ - gs
    b23 = a13 * s1 + gc

    cc1 = (b21 - A[2, 1]) * c3_ + (A[2, 0] - b11) * s3 - L3
    cc2 = b22 * c3_ - b12 * s3
    cc3 = b23 * c3_ - b13 * s3

    a = np.array([[a11, a12, a13], [a21, a22, a23]])
    b = np.array([[b11, b12, b13], [b21, b22, b23]])
    c = np.array([cc1, cc2, cc3])
    return DkCoefficients(a, b, c, (t1, t2, t3))


def ellipse_point(coeff: DkCoefficients, phi) -> np.ndarray:
    """Position of C_3 on its curve at platform angle ``phi``."""
    b = coeff.b
    return b[:, 0] + b[:, 1] * np.cos(phi) + b[:, 2] * np.sin(phi)


def prismatic_lengths(coeff: DkCoefficients, phi) -> np.ndarray:
    """(rho_1, rho_2) as functions of the platform angle."""
    a = coeff.a
    return a[:, 0] + a[:, 1] * np.cos(phi) + a[:, 2] * np.sin(phi)


def solve_trig(k0, kc, ks, tangent_tol=TANGENT_TOL):
    """Roots of ``k0 + kc cos(x) + ks sin(x) = 0``.

    Returns ``(roots, tangent)`` with roots normalized and ascending, or
    ``(None, False)`` when there is no real root.  A near-tangent pair is
    merged into a single root and flagged.
    """
    r = math.hypot(kc, ks)
    if r == 0.0:
        return None, False
    q = -k0 / r
    psi = math.atan2(ks, kc)
    if abs(abs(q) - 1.0) <= tangent_tol:
        return [normalize_angle(psi if q > 0 else psi + math.pi)], True
    if abs(q) > 1.0:
        return None, False
    w = math.acos(q)
    roots = sorted(normalize_angle(x) for x in (psi - w, psi + w))
    return roots, False


@dataclass(frozen=True)
class AssemblySolution:
    pose: Pose
    rho: tuple

    @property
    def state_signs(self) -> WorkingMode:
        return WorkingMode(tuple(1 if r >= 0 else -1 for r in self.rho))


@dataclass(frozen=True)
class DkResult:
    """Outcome of direct kinematics.

    kind is ``"poses"`` (0 < len(solutions) <= 2), ``"self-motion"`` (reason
    ``"degenerate-ellipse"`` or ``"parallel-legs"``) or ``"no-assembly"``.
    """

    kind: str
    solutions: list = field(default_factory=list)
    reason: str | None = None
    tangent: bool = False

    @property
    def poses(self) -> list[Pose]:
        return [s.pose for s in self.solutions]


NO_ASSEMBLY = DkResult("no-assembly")


def pair_coefficients(design: RobotDesign, theta, i: int, j: int):
    """Ellipse construction for an arbitrary sliding pair (i, j).

    Generic linear-algebra version of the closed form, used when legs 1 and
    2 are parallel.  Returns ``(rho_ij, p, q, c)`` where ``rho_ij`` (2x3)
    gives rho_i and rho_j, ``p`` (2x3) the platform centre, ``q`` (2x3) the
    joint of the remaining leg k, and ``c`` (3,) its line condition, all as
    ``v0 + v1 cos(phi) + v2 sin(phi)``.
    """
    k = 3 - i - j
    A = base_anchors(design)
    loc = platform_local(design)
    L = design.L
    u = [unit(t) for t in theta]
    f = [normal(t) for t in theta]
    m = np.column_stack([u[i], -u[j]])
    v = loc[j] - loc[i]
    rhs = np.column_stack([A[j] - A[i] + L[j] * f[j] - L[i] * f[i], -v, -(QUARTER_TURN @ v)])
    rho_ij = np.linalg.solve(m, rhs)
    ci = loc[i]
    p = np.column_stack([
        A[i] + rho_ij[0, 0] * u[i] + L[i] * f[i],
        rho_ij[0, 1] * u[i] - ci,
        rho_ij[0, 2] * u[i] - QUARTER_TURN @ ci,
    ])
    q = p + np.column_stack([np.zeros(2), loc[k], QUARTER_TURN @ loc[k]])
    c = np.array([f[k] @ (q[:, 0] - A[k]) - L[k], f[k] @ q[:, 1], f[k] @ q[:, 2]])
    return rho_ij, p, q, c


def _rho_all(design, pose, theta):
    d = platform_points(design, pose) - base_anchors(design)
    return tuple(float(unit(theta[i]) @ d[i]) for i in range(3))


def _parallel_family(design, theta):
    """All three legs parallel: a translation family exists iff the two
    orientation conditions share a root."""
    A = base_anchors(design)
    loc = platform_local(design)
    f = normal(theta[0])
    signs = [1.0 if math.cos(t - theta[0]) > 0 else -1.0 for t in theta]
    eqs = []
    for i in (1, 2):
        v = loc[i] - loc[0]
        k0 = -(signs[i] * design.L[i] - design.L[0] + f @ (A[i] - A[0]))
        eqs.append((k0, f @ v, f @ (QUARTER_TURN @ v)))
    tol = FAMILY_C_TOL * design.span
    candidates = None
    for k0, kc, ks in eqs:
        if math.hypot(kc, ks) <= tol:
            if abs(k0) > tol:
                return False
            continue
        roots, _ = solve_trig(k0, kc, ks, tangent_tol=1e-9)
        if roots is None:
            return False
        if candidates is None:
            candidates = roots
        else:
            ok = [r for r in candidates if abs(k0 + kc * math.cos(r) + ks * math.sin(r)) <= tol]
            return bool(ok)
    return True


def direct_kinematics(design: RobotDesign, theta) -> DkResult:
    """Assembly modes for given actuated angles.

    Uses the closed-form coefficients whenever legs 1 and 2 are not
    parallel, otherwise the generic construction on another leg pair.
    """
    theta = tuple(float(normalize_angle(t)) for t in theta)
    sins = [abs(math.sin(theta[j] - theta[i])) for i, j in ((0, 1), (0, 2), (1, 2))]
    if max(sins) <= PARALLEL_TOL:
        if _parallel_family(design, theta):
            return DkResult("self-motion", reason="parallel-legs")
        return NO_ASSEMBLY

    span = design.span
    if sins[0] > PARALLEL_TOL:
        coeff = dk_coefficients(design, theta)
        c = coeff.c
        det_b = coeff.det_b
    else:
        i, j = (0, 2) if sins[1] >= sins[2] else (1, 2)
        _, p, q, c = pair_coefficients(design, theta, i, j)
        det_b = q[0, 1] * q[1, 2] - q[0, 2] * q[1, 1]

    if abs(det_b) <= DET_B_TOL * span**2 and np.max(np.abs(c)) <= FAMILY_C_TOL * span:
        return DkResult("self-motion", reason="degenerate-ellipse")

    roots, tangent = solve_trig(*c)
    if roots is None:
        return NO_ASSEMBLY

    out = []
    for phi in roots:
        if sins[0] > PARALLEL_TOL:
            rho1, rho2 = prismatic_lengths(coeff, phi)
            t1 = theta[0]
            pos = (base_anchors(design)[0] + rho1 * unit(t1) + design.L[0] * normal(t1)
                   + design.R_p * unit(phi + design.alpha_p))
            pose = Pose(pos[0], pos[1], phi)
            rho = (float(rho1), float(rho2), _rho_all(design, pose, theta)[2])
        else:
            pos = p[:, 0] + p[:, 1] * math.cos(phi) + p[:, 2] * math.sin(phi)
            pose = Pose(pos[0], pos[1], phi)
            rho = _rho_all(design, pose, theta)
        out.append(AssemblySolution(pose, rho))
    out.sort(key=lambda s: s.pose.phi)
    return DkResult("poses", out, tangent=tangent)


def consistent_modes(design: RobotDesign, pose: Pose, theta, tol=1e-9) -> list[WorkingMode]:
    """Working modes whose inverse kinematics reproduce ``theta`` at ``pose``."""
    out = []
    for mode in WorkingMode.all():
        try:
            st = inverse_kinematics(design, pose, mode)
        except Unreachable:
            continue
        if np.all(np.abs(angle_diff(st.theta, theta)) < tol):
            out.append(mode)
    return out
