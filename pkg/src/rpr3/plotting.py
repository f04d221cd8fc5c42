"""Matplotlib figures written next to the CSV output of the CLI."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .geometry import base_anchors  # noqa: E402


def _triangle(ax, pts, **kw):
    closed = np.vstack([pts, pts[:1]])
    ax.plot(closed[:, 0], closed[:, 1], **kw)


def _finish(fig, ax, path):
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.grid(True, lw=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_locus(scan, path, design=None):
    """Sign map of det(A) with its zero contours."""
    fig, ax = plt.subplots(figsize=(6, 6))
    sign = np.sign(scan.detA)
    extent = (scan.xs[0], scan.xs[-1], scan.ys[0], scan.ys[-1])
    ax.imshow(sign, origin="lower", extent=extent, cmap="coolwarm", vmin=-1.5, vmax=1.5, alpha=0.35)
    for line in scan.contours:
        ax.plot(line[:, 0], line[:, 1], color="k", lw=1.2)
    if design is not None:
        _triangle(ax, base_anchors(design), color="tab:green", lw=1.5, label="base")
        ax.legend(loc="upper right", fontsize=8)
    ax.set_title(f"Type 2 locus, phi = {math.degrees(scan.phi):.1f} deg, mode {scan.mode}")
    _finish(fig, ax, path)


def plot_trace(points, path, design=None):
    """Platform centre, circle centre and W along a Cardanic self-motion."""
    fig, ax = plt.subplots(figsize=(6, 6))
    P = np.array([p.pose.position for p in points])
    W = np.array([p.W for p in points])
    O = points[0].centre
    ax.plot(P[:, 0], P[:, 1], "-", color="tab:blue", label="P")
    ax.plot(W[:, 0], W[:, 1], "--", color="tab:orange", label="W")
    ax.plot([O[0]], [O[1]], "k+", ms=10, label="O'")
    if design is not None:
        _triangle(ax, base_anchors(design), color="tab:green", lw=1.5, label="base")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title("Cardanic self-motion")
    _finish(fig, ax, path)


def plot_epicycloids(curves, path, design=None):
    """``curves``: mapping label -> (k, 2) array of singular positions."""
    fig, ax = plt.subplots(figsize=(6, 6))
    for label, pts in curves.items():
        ax.plot(pts[:, 0], pts[:, 1], lw=1.2, label=label)
    if design is not None:
        _triangle(ax, base_anchors(design), color="tab:green", lw=1.5, label="base")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title("Cardanic self-motion loci")
    _finish(fig, ax, path)
