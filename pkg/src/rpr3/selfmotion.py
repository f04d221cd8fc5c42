"""Cardanic self-motions: branch angles, existence conditions, joint sets and loci.

A Cardanic self-motion occurs when the curve traced by C_3 (legs 1 and 2
held) collapses to a doubly traced segment lying on the line of leg 3.
That requires

    theta_1 = theta_2 + eps,   eps   = alpha_p +/- pi/2
    theta_3 = theta_2 + delta, delta = beta_p / 2 + n pi

after which the remaining assembly condition reduces to

    d1 cos(theta_2) + d2 sin(theta_2) + d3 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditionsNotMet, DegenerateEpsilon, InfiniteFamily, NoRealRoots, NotPaminsaDesign
from .geometry import QUARTER_TURN, JointState, Pose, RobotDesign, angle_diff, normalize_angle, unit
from .kinematics import dk_coefficients, solve_trig
from .singularity import velocity_model

D_AGREE_TOL = 1e-8  # closed-form vs fitted coefficients, relative to scale
NO_ROOT_MARGIN = 1e-14  # d3^2 must exceed d1^2 + d2^2 by this much (m^2)
DEDUP_TOL = 1e-9


@dataclass(frozen=True)
class BranchAngles:
    """One of the four (eps, delta) combinations; ``sign`` is the +/- of eps, ``n`` of delta."""

    epsilon: float
    delta: float
    sign: int
    n: int

    @property
    def label(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}{self.n}"

    def joint_angles(self, theta_2):
        return (normalize_angle(theta_2 + self.epsilon), normalize_angle(theta_2), normalize_angle(theta_2 + self.delta))


def branch_angles(design: RobotDesign) -> list[BranchAngles]:
    """All four branches, ordered (+,0), (+,1), (-,0), (-,1)."""
    out = []
    for sign in (1, -1):
        for n in (0, 1):
            eps = normalize_angle(design.alpha_p + sign * math.pi / 2)
            delta = normalize_angle(design.beta_p / 2 + n * math.pi)
            out.append(BranchAngles(eps, delta, sign, n))
    return out


@dataclass(frozen=True)
class DCoefficients:
    d1: float
    d2: float
    d3: float
    source: str = "closed-form"
    closed_form: tuple = ()
    discrepancy: float = 0.0
    note: str = ""

    def as_tuple(self):
        return (self.d1, self.d2, self.d3)


def offset_residual(design: RobotDesign, branch: BranchAngles) -> float:
    """L1 sin(delta) - L2 sin(delta - eps) - L3 sin(eps); zero is the offset condition
    for infinitely many self-motion joint sets."""
    L1, L2, L3 = design.L
    e, d = branch.epsilon, branch.delta
    return L1 * math.sin(d) - L2 * math.sin(d - e) - L3 * math.sin(e)


def closed_form_d_coefficients(design: RobotDesign, branch: BranchAngles) -> tuple:
    """Closed-form d1, d2, d3 from the branch angles and the base geometry.

    d1 and d3 match the kinematic model; this d2 expression does not, so
    :func:`d_coefficients` falls back to the fitted values.
    """
    e, d = branch.epsilon, branch.delta
    se = math.sin(e)
    if abs(se) < 1e-10:
        raise DegenerateEpsilon("sin(eps) vanishes")
    Rb, ab, bb = design.R_b, design.alpha_b, design.beta_b
    d1 = Rb * (math.sin(d + ab - bb) - math.sin(ab - d))
    d2 = (Rb * (math.sin(d + e + ab - bb) - math.sin(d - e + ab - bb) - math.sin(e + ab - d)) / se
          - Rb * (math.sin(-e + ab - d) + 2 * math.sin(-e + ab + d)) / se)
    d3 = offset_residual(design, branch) / se
    return (d1, d2, d3)


def _c1_samples(design, branch, theta_2):
    coeff = dk_coefficients(design, (theta_2 + branch.epsilon, theta_2, theta_2 + branch.delta))
    return coeff.c[0]


def fitted_d_coefficients(design: RobotDesign, branch: BranchAngles, samples: int = 16) -> tuple:
    """d1, d2, d3 by least squares on c_1 sampled from the direct-kinematic coefficients.

    The fit is exact: under the branch conditions c_1 is a first-order
    trigonometric polynomial in theta_2.
    """
    if abs(math.sin(branch.epsilon)) < 1e-10:
        raise DegenerateEpsilon("sin(eps) vanishes")
    t = (np.arange(samples) + 0.25) * (2 * math.pi / samples)
    c1 = _c1_samples(design, branch, t)
    M = np.column_stack([np.cos(t), np.sin(t), np.ones_like(t)])
    sol, *_ = np.linalg.lstsq(M, c1, rcond=None)
    return tuple(float(v) for v in sol)


def d_coefficients(design: RobotDesign, branch: BranchAngles) -> DCoefficients:
    """Closed-form coefficients, checked against the fitted ones.

    Where they disagree by more than ``D_AGREE_TOL * scale`` the fitted
    values are returned and the discrepancy is recorded.
    """
    closed = closed_form_d_coefficients(design, branch)
    fitted = fitted_d_coefficients(design, branch)
    gap = max(abs(p - f) for p, f in zip(closed, fitted))
    if gap <= D_AGREE_TOL * design.scale:
        return DCoefficients(*closed, source="closed-form", closed_form=closed, discrepancy=gap)
    bad = [f"d{k + 1}" for k in range(3) if abs(closed[k] - fitted[k]) > D_AGREE_TOL * design.scale]
    note = f"closed-form {', '.join(bad)} off by {gap:.3g} m; using fitted values"
    return DCoefficients(*fitted, source="fitted", closed_form=closed, discrepancy=gap, note=note)


def validate_d(design: RobotDesign, branch: BranchAngles, coefficients=None, samples: int = 64) -> float:
    """Max |c_1 - (d1 cos t + d2 sin t + d3)| over ``samples`` values of theta_2."""
    if coefficients is None:
        coefficients = d_coefficients(design, branch)
    d1, d2, d3 = coefficients.as_tuple() if isinstance(coefficients, DCoefficients) else coefficients
    t = (np.arange(samples) + 0.5) * (2 * math.pi / samples) - math.pi
    c1 = _c1_samples(design, branch, t)
    return float(np.max(np.abs(c1 - (d1 * np.cos(t) + d2 * np.sin(t) + d3))))


@dataclass(frozen=True)
class JointSet:
    theta: tuple
    branch: BranchAngles
    root: str  # "p" or "m": sign of the square root in the half-angle solution


def lacks_real_roots(d1, d2, d3) -> bool:
    return d3 * d3 > d1 * d1 + d2 * d2 + NO_ROOT_MARGIN


def cardanic_joint_sets(design: RobotDesign, branch: BranchAngles, d: DCoefficients | None = None) -> list[JointSet]:
    """Joint triples of one branch at which a Cardanic self-motion exists."""
    if d is None:
        d = d_coefficients(design, branch)
    d1, d2, d3 = d.as_tuple()
    tol = 1e-12 * design.scale
    if max(abs(d1), abs(d2), abs(d3)) <= tol:
        raise InfiniteFamily("every theta_2 solves the self-motion condition on this branch")
    if lacks_real_roots(d1, d2, d3):
        raise NoRealRoots(f"d3^2 > d1^2 + d2^2 on branch {branch.label}")
    r = math.hypot(d1, d2)
    if r == 0.0:
        raise NoRealRoots("d1 = d2 = 0 with d3 != 0")
    roots, tangent = solve_trig(d3, d1, d2, tangent_tol=0.0)
    if roots is None:
        # inside the no-root margin: clamp to the tangent root
        psi = math.atan2(d2, d1)
        roots = [normalize_angle(psi if -d3 / r > 0 else psi + math.pi)]
    out = []
    for t2 in roots:
        # half-angle form: tan(t/2) (d3 - d1) + d2 = +/- sqrt(d1^2 + d2^2 - d3^2)
        half = t2 / 2.0
        if abs(math.cos(half)) > 1e-12:
            label = "p" if math.tan(half) * (d3 - d1) + d2 >= 0 else "m"
        else:
            label = "p"
        out.append(JointSet(branch.joint_angles(t2), branch, label))
    return out


@dataclass
class BranchReport:
    branch: BranchAngles
    d: DCoefficients
    offset_residual: float
    joint_sets: list = field(default_factory=list)
    status: str = ""  # "roots", "no-real-roots" or "infinite"


@dataclass
class SelfMotionReport:
    """classification: ``"none"``, ``"finite"`` or ``"infinite"``."""

    classification: str
    joint_sets: list
    branches: list
    alpha_similar: bool
    beta_similar: bool


def _dedupe(sets):
    out = []
    for s in sets:
        if not any(np.all(np.abs(angle_diff(s.theta, o.theta)) < DEDUP_TOL) for o in out):
            out.append(s)
    return out


def classify_self_motions(design: RobotDesign) -> SelfMotionReport:
    alpha_sim = abs(design.alpha_b - design.alpha_p) < 1e-10
    beta_sim = abs(design.beta_b - design.beta_p) < 1e-10
    branches = []
    infinite = False
    for br in branch_angles(design):
        d = d_coefficients(design, br)
        res = offset_residual(design, br)
        rep = BranchReport(br, d, res)
        if alpha_sim and beta_sim and abs(res) < 1e-12 * design.scale:
            rep.status = "infinite"
            infinite = True
        else:
            try:
                rep.joint_sets = cardanic_joint_sets(design, br, d)
                rep.status = "roots"
            except NoRealRoots:
                rep.status = "no-real-roots"
            except InfiniteFamily:
                rep.status = "infinite"
                infinite = True
        branches.append(rep)
    if infinite:
        return SelfMotionReport("infinite", [], branches, alpha_sim, beta_sim)
    sets = _dedupe([s for rep in branches for s in rep.joint_sets])
    return SelfMotionReport("finite" if sets else "none", sets, branches, alpha_sim, beta_sim)


# ----------------------------------------------------------------------------
# the self-motion itself


def _require_family(design, branch):
    if not design.similar:
        raise ConditionsNotMet("base and platform triangles are not similar")
    if abs(offset_residual(design, branch)) >= 1e-12 * design.scale:
        raise ConditionsNotMet(f"offset condition fails on branch {branch.label}")


def default_branch(design: RobotDesign) -> BranchAngles:
    """First branch carrying infinitely many self-motion joint sets."""
    for br in branch_angles(design):
        try:
            _require_family(design, br)
            return br
        except ConditionsNotMet:
            continue
    raise ConditionsNotMet("design has no branch with infinitely many self-motions")


def circle_centre(design: RobotDesign, theta_2: float, branch: BranchAngles) -> np.ndarray:
    """Centre O' of the circle followed by P: the common point of the three leg lines."""
    ap = design.alpha_p
    L1, L2 = design.L[0], design.L[1]
    sigma = 1.0 if branch.sign > 0 else -1.0
    offsets = (L2 * (QUARTER_TURN @ unit(theta_2 + ap)) - sigma * L1 * unit(theta_2)) / math.cos(ap)
    return -design.R_b * unit(ap + 2 * theta_2) + offsets


@dataclass(frozen=True)
class CardanicPose:
    pose: Pose
    centre: np.ndarray
    W: np.ndarray
    theta: tuple


def cardanic_path(design: RobotDesign, theta_2: float, branch: BranchAngles, phi: float) -> CardanicPose:
    """Platform pose at orientation ``phi`` along the self-motion at fixed joints.

    P moves on a circle of radius R_p about O' while the platform turns the
    other way; W, where the force lines meet, lies on the concentric circle
    of radius 2 R_p.
    """
    _require_family(design, branch)
    centre = circle_centre(design, theta_2, branch)
    arm = design.R_p * unit(design.alpha_p + 2 * theta_2 - phi)
    pos = centre + arm
    return CardanicPose(Pose(pos[0], pos[1], phi), centre, centre + 2 * arm, branch.joint_angles(theta_2))


def epicycloid_radius(design: RobotDesign, phi: float) -> float:
    return math.sqrt(design.R_b**2 + design.R_p**2 - 2 * design.R_b * design.R_p * math.cos(phi))


def epicycloid_point(design: RobotDesign, theta_2: float, phi: float, branch: BranchAngles | None = None) -> np.ndarray:
    """Singular position of P for a Cardanic self-motion, written as R e(eta + 2 theta_2) plus offset terms.

    For fixed ``phi`` and varying ``theta_2`` the point traces an epicycloid.
    """
    if branch is None:
        branch = default_branch(design)
    _require_family(design, branch)
    Rb, Rp, ap = design.R_b, design.R_p, design.alpha_p
    R = epicycloid_radius(design, phi)
    eta = math.atan2(-Rp * math.sin(phi - ap) - Rb * math.sin(ap), Rp * math.cos(phi - ap) - Rb * math.cos(ap))
    sigma = 1.0 if branch.sign > 0 else -1.0
    L1, L2 = design.L[0], design.L[1]
    offsets = (L2 * (QUARTER_TURN @ unit(theta_2 + ap)) - sigma * L1 * unit(theta_2)) / math.cos(ap)
    return R * unit(eta + 2 * theta_2) + offsets


# ----------------------------------------------------------------------------
# zero-offset similar designs


@dataclass(frozen=True)
class PaminsaReport:
    det_formula: float
    phi_s: tuple | None
    translational: bool
    circle_radius: float
    circle_residual: float
    R_1: float
    nu: float
    on_self_motion_circle: bool
    detA: float


def paminsa_analysis(design: RobotDesign, pose: Pose, state: JointState, tol: float = 1e-9) -> PaminsaReport:
    """Closed-form singularity data for zero-offset designs with similar triangles.

    ``det_formula`` is the factored determinant; it equals ``-detA`` of the
    velocity model (the sign reflects the orientation of the quarter turn).
    """
    if any(v != 0.0 for v in design.L) or not design.similar:
        raise NotPaminsaDesign("requires zero offsets and similar base/platform triangles")
    Rb, Rp, ap, bp = design.R_b, design.R_p, design.alpha_p, design.beta_p
    rho = state.rho
    R = epicycloid_radius(design, pose.phi)
    circ = pose.x**2 + pose.y**2 - R**2
    prod = rho[0] * rho[1] * rho[2]
    lead = 2 * Rp * math.cos(ap) * (math.sin(ap - bp) - math.sin(ap))
    det_formula = lead / prod * (Rb * math.cos(pose.phi) - Rp) * circ if prod != 0 else math.inf
    if Rp <= Rb:
        s = math.acos(Rp / Rb)
        phi_s = (s, -s)
    else:
        phi_s = None
    R1 = abs(Rb - Rp)
    vm = velocity_model(design, pose, state)
    return PaminsaReport(
        det_formula=det_formula,
        phi_s=phi_s,
        translational=math.isclose(Rp, Rb, rel_tol=0, abs_tol=1e-12 * design.scale),
        circle_radius=R,
        circle_residual=circ,
        R_1=R1,
        nu=R1 / Rb,
        on_self_motion_circle=abs(circ) < tol * design.scale**2,
        detA=vm.detA,
    )
