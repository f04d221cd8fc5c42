"""Independent numerical checks for the closed forms.

Nothing here reuses the ellipse construction: direct kinematics is solved
by damped least squares on the three scalar leg constraints, and the
velocity model is checked by differencing inverse kinematics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NearSingular, NoConvergence
from .geometry import QUARTER_TURN, Pose, RobotDesign, WorkingMode, angle_diff, base_anchors, normalize_angle, platform_local
from .kinematics import inverse_kinematics
from .singularity import velocity_model


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 80
    step_tolerance: float = 1e-12
    residual_tolerance: float = 1e-13
    damping: float = 1e-7
    seed_count: int = 48
    seed: int = 20240607
    patience: int = 12  # stop once this many iterations pass without a new converged seed

    def __post_init__(self):
        if min(self.max_iterations, self.seed_count, self.patience) <= 0:
            raise ValueError("iteration and seed counts must be positive")
        if min(self.step_tolerance, self.damping) <= 0:
            raise ValueError("tolerances must be positive")
        if self.residual_tolerance < 100 * np.finfo(float).eps:
            raise ValueError("residual_tolerance must be at least 100 machine epsilons")


def _residuals(X, f, loc, A, L):
    """Leg constraints for a batch of poses X (S, 3) = (x, y, phi) -> (S, 3), and the Jacobian (S, 3, 3).

    ``f`` holds the leg normals, either (3, 2) shared by all poses or (S, 3, 2).
    """
    f = np.broadcast_to(f, (X.shape[0], 3, 2))
    c, s = np.cos(X[:, 2]), np.sin(X[:, 2])
    # R(phi) c_i for every seed and leg: (S, 3, 2)
    rc = np.stack([c[:, None] * loc[None, :, 0] - s[:, None] * loc[None, :, 1],
                   s[:, None] * loc[None, :, 0] + c[:, None] * loc[None, :, 1]], axis=-1)
    pts = X[:, None, :2] + rc - A[None]
    r = np.einsum("sij,sij->si", f, pts) - L[None]
    drc = rc @ QUARTER_TURN.T
    J = np.empty((X.shape[0], 3, 3))
    J[:, :, 0] = f[:, :, 0]
    J[:, :, 1] = f[:, :, 1]
    J[:, :, 2] = np.einsum("sij,sij->si", f, drc)
    return r, J


def _seeds(design, config):
    rng = np.random.default_rng(config.seed)
    n = config.seed_count
    radius = (design.R_b + design.R_p) * np.sqrt(rng.random(n))
    ang = rng.uniform(-math.pi, math.pi, n)
    phi = math.pi - rng.random(n) * 2 * math.pi  # (-pi, pi]
    return np.column_stack([radius * np.cos(ang), radius * np.sin(ang), phi])


def _dedupe_poses(X, tol=1e-6):
    """Distinct rows of X (x, y, phi), greedily clustered within ``tol``; sorted by phi."""
    rest = X[np.lexsort((X[:, 1], X[:, 0], X[:, 2]))]
    out = []
    while len(rest):
        head = rest[0]
        near = ((np.abs(rest[:, 0] - head[0]) < tol) & (np.abs(rest[:, 1] - head[1]) < tol)
                & (np.abs(angle_diff(rest[:, 2], head[2])) < tol))
        out.append(head)
        rest = rest[~near]
    return out


def _solve_batch(design, thetas, config):
    """Run the multistart solver for T joint triples at once.

    Returns the final iterates (T, S, 3) and a (T, S) mask of converged seeds.
    """
    thetas = np.asarray(thetas, dtype=float).reshape(-1, 3)
    T, S = len(thetas), config.seed_count
    normals = np.stack([-np.sin(thetas), np.cos(thetas)], axis=-1)  # (T, 3, 2)
    f = np.repeat(normals, S, axis=0)
    loc = platform_local(design)
    A = base_anchors(design)
    L = np.array(design.L)
    X = np.tile(_seeds(design, config), (T, 1))
    lam2 = config.damping**2
    eye = np.eye(3)
    done = np.zeros(len(X), dtype=bool)
    best, since = 0, 0
    for _ in range(config.max_iterations):
        act = np.flatnonzero(~done)
        r, J = _residuals(X[act], f[act], loc, A, L)
        Jt = np.transpose(J, (0, 2, 1))
        step = np.linalg.solve(Jt @ J + lam2 * eye, np.einsum("sij,sj->si", Jt, r)[..., None])[..., 0]
        X[act] -= step
        X[act, 2] = normalize_angle(X[act, 2])
        small = (np.abs(step).max(axis=1) < config.step_tolerance) & (np.abs(r).max(axis=1) < config.residual_tolerance)
        done[act[small]] = True
        count = int(done.sum())
        if count == len(X):
            break
        best, since = (count, 0) if count > best else (best, since + 1)
        if since >= config.patience:
            break
    r, _ = _residuals(X, f, loc, A, L)
    ok = np.all(np.isfinite(X), axis=1) & (np.abs(r).max(axis=1) < config.residual_tolerance)
    return X.reshape(T, S, 3), ok.reshape(T, S)


def numeric_dk(design: RobotDesign, theta, config: SolverConfig = SolverConfig()) -> list[Pose]:
    """All poses found by multistart damped least squares for fixed actuated angles."""
    X, ok = _solve_batch(design, [theta], config)
    if not np.any(ok[0]):
        raise NoConvergence("no seed converged")
    return [Pose(*row) for row in _dedupe_poses(X[0][ok[0]])]


def jacobian_fd_check(design: RobotDesign, pose: Pose, mode: WorkingMode, step: float = 1e-6) -> float:
    """Largest relative gap between central differences of inverse kinematics and B^-1 A."""
    state = inverse_kinematics(design, pose, mode)
    vm = velocity_model(design, pose, state)
    scale = design.scale
    if abs(vm.detA) <= 1e-6 * scale**3 or min(abs(r) for r in state.rho) <= 1e-9 * scale:
        raise NearSingular("configuration too close to a singularity for differencing")
    jac = np.linalg.solve(vm.B, vm.A)  # columns: d theta / d(phi, x, y)
    base = np.array([pose.phi, pose.x, pose.y])
    worst = 0.0
    for k in range(3):
        h = np.zeros(3)
        h[k] = step
        plus = inverse_kinematics(design, Pose(base[1] + h[1], base[2] + h[2], base[0] + h[0]), mode)
        minus = inverse_kinematics(design, Pose(base[1] - h[1], base[2] - h[2], base[0] - h[0]), mode)
        fd = angle_diff(plus.theta, minus.theta) / (2 * step)
        ref = jac[:, k]
        worst = max(worst, float(np.linalg.norm(fd - ref) / max(np.linalg.norm(ref), 1e-300)))
    return worst


@dataclass(frozen=True)
class ProbeResult:
    is_family: bool
    poses: list


def _judge_family(poses, samples):
    poses.sort(key=lambda p: (p.phi, p.x, p.y))
    if len(poses) < samples:
        return ProbeResult(False, poses)
    phis = np.array([p.phi for p in poses])
    if np.ptp(phis) < 1e-6:
        return ProbeResult(True, poses)
    gaps = np.diff(np.concatenate([phis, [phis[0] + 2 * math.pi]]))
    return ProbeResult(bool(np.all(gaps <= 4 * 2 * math.pi / samples)), poses)


def _probe_config(samples, config):
    if samples < 8:
        raise ValueError("samples must be at least 8")
    return SolverConfig(seed_count=8 * samples) if config is None else config


def selfmotion_probe(design: RobotDesign, theta, samples: int = 16, config: SolverConfig | None = None) -> ProbeResult:
    """Detect a one-parameter family of assemblies by dense multistart solving.

    A family needs at least ``samples`` distinct solutions forming a
    connected set: either they sweep every orientation with circular gaps
    below ``4 * 2 pi / samples``, or they share one orientation (translation).
    """
    return selfmotion_probe_many(design, [theta], samples, config)[0]


def selfmotion_probe_many(design: RobotDesign, thetas, samples: int = 16, config: SolverConfig | None = None,
                          chunk: int = 256) -> list[ProbeResult]:
    """``selfmotion_probe`` over many joint triples, solved in vectorized chunks."""
    config = _probe_config(samples, config)
    thetas = np.asarray(thetas, dtype=float).reshape(-1, 3)
    out = []
    for start in range(0, len(thetas), chunk):
        X, ok = _solve_batch(design, thetas[start:start + chunk], config)
        for Xi, oki in zip(X, ok):
            poses = [Pose(*row) for row in _dedupe_poses(Xi[oki])] if np.any(oki) else []
            out.append(_judge_family(poses, samples))
    return out
