"""Design files, CSV tables and SVG export.

Design file: one ``key = value`` per line, ``#`` starts a comment line.
Keys Rb, alphab, betab, Rp, alphap, betap, L1, L2, L3; metres and degrees.
"""

from __future__ import annotations

import math
from pathlib import Path

from .errors import EmptyContours, InvalidDesign
from .geometry import RobotDesign, design_problems

DESIGN_KEYS = ("Rb", "alphab", "betab", "Rp", "alphap", "betap", "L1", "L2", "L3")


class DesignFileError(ValueError):
    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class MissingKey(DesignFileError):
    pass


class DuplicateKey(DesignFileError):
    pass


class UnknownKey(DesignFileError):
    pass


class UnitRange(DesignFileError):
    pass


def _check_range(key, value, line):
    if not math.isfinite(value):
        raise UnitRange(f"{key} must be finite", key, line)
    if key in ("Rb", "Rp") and value <= 0:
        raise UnitRange(f"{key} must be positive (metres)", key, line)
    if key in ("L1", "L2", "L3") and value < 0:
        raise UnitRange(f"{key} must be non-negative (metres)", key, line)
    if key in ("alphab", "alphap") and not -90 < value < 90:
        raise UnitRange(f"{key} = {value:g} deg is outside (-90, 90)", key, line)
    if key in ("betab", "betap") and not 0 < value < 360:
        raise UnitRange(f"{key} = {value:g} deg is outside (0, 360)", key, line)


def parse_design_text(text: str) -> RobotDesign:
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise DesignFileError(f"expected 'key = value', got {s!r}", line=lineno)
        key, _, val = (part.strip() for part in s.partition("="))
        if key not in DESIGN_KEYS:
            raise UnknownKey(f"unknown key {key!r}", key, lineno)
        if key in values:
            raise DuplicateKey(f"{key} already set on line {lines[key]}", key, lineno)
        try:
            number = float(val)
        except ValueError:
            raise DesignFileError(f"{key}: not a number: {val!r}", key, lineno) from None
        _check_range(key, number, lineno)
        values[key], lines[key] = number, lineno
    for key in DESIGN_KEYS:
        if key not in values:
            raise MissingKey(f"missing key {key}", key)
    r = math.radians
    try:
        return RobotDesign(values["Rb"], r(values["alphab"]), r(values["betab"]),
                           values["Rp"], r(values["alphap"]), r(values["betap"]),
                           (values["L1"], values["L2"], values["L3"]))
    except InvalidDesign as exc:
        key = "betap" if "platform" in str(exc) else "betab"
        raise UnitRange(str(exc), key, lines[key]) from None


def parse_design(path) -> RobotDesign:
    return parse_design_text(Path(path).read_text(encoding="utf-8"))


def format_design(design: RobotDesign, comment: str | None = None) -> str:
    d = math.degrees
    out = [f"# {comment}"] if comment else []
    vals = (design.R_b, d(design.alpha_b), d(design.beta_b), design.R_p, d(design.alpha_p),
            d(design.beta_p), *design.L)
    out += [f"{k} = {fmt(v)}" for k, v in zip(DESIGN_KEYS, vals)]
    assert not design_problems(design)
    return "\n".join(out) + "\n"


def fmt(value) -> str:
    """Locale-independent number with 12 significant digits."""
    v = float(value)
    if v == 0.0:
        return "0"
    return format(v, ".12g")


# ----------------------------------------------------------------------------
# CSV

LOCUS_HEADER = "x,y,phi_deg,detA,reachable"
TRACE_HEADER = "phi_deg,x,y,ox,oy,wx,wy"


def locus_csv(scan) -> str:
    phi = fmt(math.degrees(scan.phi))
    out = [LOCUS_HEADER]
    for x, y, det in scan.rows():
        if det is None:
            out.append(f"{fmt(x)},{fmt(y)},{phi},,0")
        else:
            out.append(f"{fmt(x)},{fmt(y)},{phi},{fmt(det)},1")
    return "\n".join(out) + "\n"


def trace_csv(points) -> str:
    """``points``: iterable of CardanicPose."""
    out = [TRACE_HEADER]
    for p in points:
        vals = (math.degrees(p.pose.phi), p.pose.x, p.pose.y, p.centre[0], p.centre[1], p.W[0], p.W[1])
        out.append(",".join(fmt(v) for v in vals))
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------------
# SVG

SVG_SIZE = 800


def export_svg(contours, region, overlays=None, allow_empty=False) -> str:
    """Render polylines in ``region = (x0, y0, x1, y1)`` onto an 800 x 800 canvas.

    Output is byte-for-byte deterministic.  ``overlays`` is an optional list
    of closed polygons (e.g. base and platform triangles).
    """
    contours = [c for c in contours if len(c) >= 2]
    if not contours and not allow_empty:
        raise EmptyContours("no contour to draw")
    x0, y0, x1, y1 = (float(v) for v in region)
    sx = SVG_SIZE / (x1 - x0)
    sy = SVG_SIZE / (y1 - y0)

    def pts(poly):
        return " ".join(f"{(x - x0) * sx:.3f},{(y1 - y) * sy:.3f}" for x, y in poly)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f'<rect x="0" y="0" width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white" stroke="black"/>',
    ]
    if x0 <= 0 <= x1:
        xa = (0 - x0) * sx
        out.append(f'<line x1="{xa:.3f}" y1="0.000" x2="{xa:.3f}" y2="{SVG_SIZE:.3f}" stroke="gray" stroke-width="0.5"/>')
    if y0 <= 0 <= y1:
        ya = (y1 - 0) * sy
        out.append(f'<line x1="0.000" y1="{ya:.3f}" x2="{SVG_SIZE:.3f}" y2="{ya:.3f}" stroke="gray" stroke-width="0.5"/>')
    for poly in overlays or []:
        out.append(f'<polygon points="{pts(poly)}" fill="none" stroke="steelblue" stroke-width="1"/>')
    for poly in contours:
        out.append(f'<polyline points="{pts(poly)}" fill="none" stroke="crimson" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
