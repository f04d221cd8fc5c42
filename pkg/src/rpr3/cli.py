"""Command-line front end.

Exit codes: 0 success (an unreachable pose or an empty assembly set is a
result, not a failure), 1 parse or I/O error, 2 domain error or failed
verification.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import formats
from .errors import KinematicsError, NoConvergence, Unreachable
from .formats import fmt
from .geometry import Pose, RobotDesign, WorkingMode, angle_diff
from .kinematics import direct_kinematics, inverse_kinematics
from .oracle import jacobian_fd_check, numeric_dk, selfmotion_probe
from .selfmotion import (
    branch_angles,
    cardanic_path,
    classify_self_motions,
    default_branch,
    epicycloid_point,
    paminsa_analysis,
    validate_d,
)
from .singularity import classify, locus_scan


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text, n, name):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{name}: expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{name}: expected {n} finite comma-separated numbers, got {text!r}")
    return vals


def _pose(text):
    x, y, phi = _floats(text, 3, "--pose")
    return Pose(x, y, math.radians(phi))


def _mode(text):
    try:
        return WorkingMode.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _out_path(args, name):
    path = Path(name)
    if args.outdir and not path.is_absolute():
        path = Path(args.outdir) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _deg(v):
    return fmt(math.degrees(v))


# ----------------------------------------------------------------------------
# commands


def cmd_ik(args, design, out):
    pose, mode = _pose(args.pose), _mode(args.mode)
    try:
        state = inverse_kinematics(design, pose, mode)
    except Unreachable as exc:
        out.write(f"UNREACHABLE: {exc}\n")
        return 0
    out.write(f"mode: {mode}\n")
    out.write("theta_deg: " + ",".join(_deg(t) for t in state.theta) + "\n")
    out.write("rho_m: " + ",".join(fmt(r) for r in state.rho) + "\n")
    return 0


def cmd_dk(args, design, out):
    theta = [math.radians(v) for v in _floats(args.theta, 3, "--theta")]
    res = direct_kinematics(design, theta)
    if res.kind == "no-assembly":
        out.write("NO ASSEMBLY\n")
    elif res.kind == "self-motion":
        out.write(f"SELF-MOTION ({res.reason.replace('-', ' ')})\n")
    else:
        out.write(f"assemblies: {len(res.solutions)}" + (" (tangent)" if res.tangent else "") + "\n")
        out.write("x,y,phi_deg,rho1,rho2,rho3\n")
        for s in res.solutions:
            vals = [fmt(s.pose.x), fmt(s.pose.y), _deg(s.pose.phi)] + [fmt(r) for r in s.rho]
            out.write(",".join(vals) + "\n")
    return 0


def cmd_classify(args, design, out):
    pose, mode = _pose(args.pose), _mode(args.mode)
    try:
        state = inverse_kinematics(design, pose, mode)
    except Unreachable as exc:
        out.write(f"UNREACHABLE: {exc}\n")
        return 0
    v = classify(design, pose, state)
    out.write(f"verdict: {v.describe()}\n")
    out.write(f"detA: {fmt(v.detA)}\n")
    out.write(f"detB: {fmt(v.detB)}\n")
    if v.W is not None:
        out.write(f"W: {fmt(v.W[0])},{fmt(v.W[1])}\n")
    return 0


def cmd_selfmotion(args, design, out):
    rep = classify_self_motions(design)
    out.write(f"classification: {rep.classification.upper()}\n")
    out.write(f"alpha_similar: {str(rep.alpha_similar).lower()}\n")
    out.write(f"beta_similar: {str(rep.beta_similar).lower()}\n")
    out.write("branch,epsilon_deg,delta_deg,d1,d2,d3,d_source,offset_residual,status,roots\n")
    for b in rep.branches:
        d = b.d
        vals = [b.branch.label, _deg(b.branch.epsilon), _deg(b.branch.delta), fmt(d.d1), fmt(d.d2), fmt(d.d3),
                d.source, fmt(b.offset_residual), b.status, str(len(b.joint_sets))]
        out.write(",".join(vals) + "\n")
    for b in rep.branches:
        if b.d.note:
            out.write(f"note {b.branch.label}: {b.d.note}\n")
    if rep.classification == "finite":
        out.write(f"joint_sets: {len(rep.joint_sets)}\n")
        out.write("theta1_deg,theta2_deg,theta3_deg,branch,root\n")
        for s in rep.joint_sets:
            out.write(",".join(_deg(t) for t in s.theta) + f",{s.branch.label},{s.root}\n")
    if args.figure and rep.classification == "infinite":
        from .plotting import plot_epicycloids

        branch = default_branch(design)
        t2 = np.linspace(-math.pi, math.pi, 361)
        curves = {f"phi = {p:g} deg": np.array([epicycloid_point(design, t, math.radians(p), branch) for t in t2])
                  for p in (0, 90, 180)}
        path = _out_path(args, args.figure)
        plot_epicycloids(curves, path, design)
        out.write(f"figure: {path}\n")
    return 0


def _pick_branch(design, index):
    if index is None:
        return default_branch(design)
    branches = branch_angles(design)
    if not 1 <= index <= len(branches):
        raise UsageError(f"--branch must be between 1 and {len(branches)}")
    return branches[index - 1]


def cmd_trace(args, design, out):
    if args.phi_steps < 2:
        raise UsageError("--phi-steps must be at least 2")
    branch = _pick_branch(design, args.branch)
    t2 = math.radians(args.theta2)
    points = [cardanic_path(design, t2, branch, -math.pi + 2 * math.pi * k / args.phi_steps)
              for k in range(args.phi_steps)]
    text = formats.trace_csv(points)
    if args.csv:
        path = _out_path(args, args.csv)
        path.write_text(text, encoding="utf-8")
        out.write(f"csv: {path}\n")
    else:
        out.write(text)
    if args.figure:
        from .plotting import plot_trace

        path = _out_path(args, args.figure)
        plot_trace(points, path, design)
        out.write(f"figure: {path}\n")
    return 0


def cmd_locus(args, design, out):
    region = _floats(args.bbox, 4, "--bbox")
    grid = [int(v) for v in _floats(args.grid, 2, "--grid")]
    scan = locus_scan(design, math.radians(args.phi), region, grid, _mode(args.mode))
    text = formats.locus_csv(scan)
    if args.csv:
        path = _out_path(args, args.csv)
        path.write_text(text, encoding="utf-8")
        out.write(f"csv: {path}\n")
    else:
        out.write(text)
    if args.svg:
        path = _out_path(args, args.svg)
        path.write_text(formats.export_svg(scan.contours, region, allow_empty=args.allow_empty), encoding="utf-8")
        out.write(f"svg: {path}\n")
    if args.figure:
        from .plotting import plot_locus

        path = _out_path(args, args.figure)
        plot_locus(scan, path, design)
        out.write(f"figure: {path}\n")
    return 0


def cmd_paminsa(args, design, out):
    pose, mode = _pose(args.pose), _mode(args.mode)
    try:
        state = inverse_kinematics(design, pose, mode)
    except Unreachable as exc:
        out.write(f"UNREACHABLE: {exc}\n")
        return 0
    rep = paminsa_analysis(design, pose, state)
    verdict = classify(design, pose, state)
    out.write(f"det_formula: {fmt(rep.det_formula)}\n")
    out.write(f"detA: {fmt(rep.detA)}\n")
    phi_s = "none" if rep.phi_s is None else ",".join(_deg(p) for p in rep.phi_s)
    out.write(f"phi_s_deg: {phi_s}\n")
    out.write(f"translational: {str(rep.translational).lower()}\n")
    out.write(f"circle_radius: {fmt(rep.circle_radius)}\n")
    out.write(f"circle_residual: {fmt(rep.circle_residual)}\n")
    out.write(f"R_1: {fmt(rep.R_1)}\n")
    out.write(f"nu: {fmt(rep.nu)}\n")
    out.write(f"on_self_motion_circle: {str(rep.on_self_motion_circle).lower()}\n")
    out.write(f"verdict: {verdict.describe()}\n")
    return 0


# ----------------------------------------------------------------------------
# verify


def verify_design(design: RobotDesign, seed: int = 7, count: int = 20):
    """Cross-check the closed forms against the numerical oracle.

    Returns a list of ``(check, ok, detail)``.
    """
    rng = np.random.default_rng(seed)
    results = []
    scale = design.scale
    samples = []
    while len(samples) < count:
        r = design.R_b * math.sqrt(rng.random())
        a = rng.uniform(-math.pi, math.pi)
        pose = Pose(r * math.cos(a), r * math.sin(a), rng.uniform(-math.pi, math.pi))
        mode = WorkingMode(tuple(rng.choice([1, -1], 3)))
        try:
            state = inverse_kinematics(design, pose, mode)
        except Unreachable:
            continue
        if min(abs(v) for v in state.rho) < 1e-3 * scale:
            continue
        if classify(design, pose, state).kind != "regular":
            continue
        samples.append((pose, mode, state))

    worst = 0.0
    for pose, _, state in samples:
        res = direct_kinematics(design, state.theta)
        errs = [max(abs(p.x - pose.x), abs(p.y - pose.y), abs(angle_diff(p.phi, pose.phi))) for p in res.poses]
        worst = max(worst, min(errs) if errs else math.inf)
    results.append(("ik-dk-roundtrip", worst < 1e-9, f"max error {worst:.3g}"))

    worst, counts_ok = 0.0, True
    for _, _, state in samples:
        closed = direct_kinematics(design, state.theta).poses
        try:
            numeric = numeric_dk(design, state.theta)
        except NoConvergence:
            numeric = []
        if len(closed) != len(numeric):
            counts_ok = False
            continue
        for p, q in zip(sorted(closed, key=lambda p: p.phi), sorted(numeric, key=lambda p: p.phi)):
            worst = max(worst, abs(p.x - q.x), abs(p.y - q.y), abs(angle_diff(p.phi, q.phi)))
    results.append(("numeric-dk", counts_ok and worst < 1e-7, f"counts {'agree' if counts_ok else 'differ'}, max error {worst:.3g}"))

    worst = 0.0
    for pose, mode, _ in samples:
        try:
            worst = max(worst, jacobian_fd_check(design, pose, mode))
        except KinematicsError:
            continue
    results.append(("jacobian-fd", worst < 1e-4, f"max relative error {worst:.3g}"))

    worst = max(validate_d(design, b) for b in branch_angles(design))
    results.append(("d-coefficients", worst < 1e-9 * scale, f"max residual {worst:.3g}"))

    rep = classify_self_motions(design)
    if rep.classification == "infinite":
        b = default_branch(design)
        probe = selfmotion_probe(design, b.joint_angles(0.3))
        ok, detail = probe.is_family, f"family found: {probe.is_family}"
    elif rep.classification == "finite":
        found = [selfmotion_probe(design, s.theta).is_family for s in rep.joint_sets]
        ok, detail = all(found), f"{sum(found)}/{len(found)} joint sets show a family"
    else:
        fams = [selfmotion_probe(design, rng.uniform(-math.pi, math.pi, 3)).is_family for _ in range(8)]
        ok, detail = not any(fams), f"{sum(fams)}/8 random triples show a family"
    results.append((f"self-motion-{rep.classification}", ok, detail))
    return results


def cmd_verify(args, design, out):
    results = verify_design(design)
    for name, ok, detail in results:
        out.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
    return 0 if all(ok for _, ok, _ in results) else 2


# ----------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="rpr3", description="3-RPR planar parallel robot analysis")
    p.add_argument("--outdir", help="directory for written files (CSV, SVG, figures)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("design", help="design file")
        s.set_defaults(func=func)
        return s

    s = add("ik", cmd_ik, "inverse kinematics")
    s.add_argument("--pose", required=True, help="x,y,phi_deg")
    s.add_argument("--mode", default="+++")
    s = add("dk", cmd_dk, "direct kinematics")
    s.add_argument("--theta", required=True, help="t1,t2,t3 in degrees")
    s = add("classify", cmd_classify, "singularity verdict")
    s.add_argument("--pose", required=True, help="x,y,phi_deg")
    s.add_argument("--mode", default="+++")
    s = add("selfmotion", cmd_selfmotion, "Cardanic self-motion report")
    s.add_argument("--figure", help="PNG of the self-motion loci (infinite designs)")
    s = add("trace", cmd_trace, "platform path along a Cardanic self-motion")
    s.add_argument("--theta2", type=float, default=0.0, help="degrees")
    s.add_argument("--branch", type=int, help="branch index 1..4 (default: first valid)")
    s.add_argument("--phi-steps", type=int, default=64)
    s.add_argument("--csv", help="write the CSV here instead of stdout")
    s.add_argument("--figure", help="PNG of the path")
    s = add("locus", cmd_locus, "Type 2 singularity locus at fixed orientation")
    s.add_argument("--phi", type=float, default=0.0, help="degrees")
    s.add_argument("--bbox", default="-0.6,-0.6,0.6,0.6", help="x0,y0,x1,y1")
    s.add_argument("--grid", default="200,200", help="nx,ny")
    s.add_argument("--mode", default="+++")
    s.add_argument("--csv", help="write the CSV here instead of stdout")
    s.add_argument("--svg", help="SVG of the zero contours")
    s.add_argument("--allow-empty", action="store_true", help="write the SVG even without contours")
    s.add_argument("--figure", help="PNG of the det(A) sign map and contours")
    s = add("paminsa", cmd_paminsa, "zero-offset similar-triangle report")
    s.add_argument("--pose", required=True, help="x,y,phi_deg")
    s.add_argument("--mode", default="+++")
    add("verify", cmd_verify, "oracle cross-checks")
    return p


_VALUE_OPTIONS = ("--pose", "--theta", "--bbox", "--theta2", "--phi")


def _attach_values(argv):
    """Join ``--pose -0.1,0,0`` into ``--pose=-0.1,0,0`` so negative values are not read as flags."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_attach_values(argv))
        design = formats.parse_design(args.design)
        return args.func(args, design, out)
    except (UsageError, formats.DesignFileError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except KinematicsError as exc:
        sys.stderr.write(f"domain error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
