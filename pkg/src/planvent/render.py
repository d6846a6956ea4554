"""SVG drawings: annotated floor plans and daily penalty-difference charts.

Output is plain SVG text built from formatted strings, with every number
printed to a fixed precision so identical inputs give identical bytes.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from planvent.plan import FloorPlan, OpeningKind, Side, bounding_box

SCALE = 40.0          # px per metre
MARGIN = 70.0
FUNCTION_FILL = {
    "Hall": "#efe6d8",
    "Corridor": "#e8e8e8",
    "Kitchen": "#f6e3c6",
    "LivingRoom": "#f3d9b8",
    "Bedroom": "#dce8f3",
    "Bathroom": "#d8efe9",
}
OPENING_STROKE = {
    OpeningKind.WINDOW: "#2f7fc1",
    OpeningKind.EXTERIOR_DOOR: "#8a5a2b",
    OpeningKind.INTERIOR_DOOR: "#ffffff",
}
SCENARIO_STROKE = ("#c0392b", "#2c7fb8", "#27ae60", "#8e44ad", "#d35400")


def _f(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _outward(side: Side) -> tuple[float, float]:
    """Outward unit normal of a wall side in plan coordinates (+y north)."""
    return {Side.N: (0.0, 1.0), Side.S: (0.0, -1.0), Side.E: (1.0, 0.0), Side.W: (-1.0, 0.0)}[side]


def _wall_points(rect, side: Side, offset: float, width: float):
    if side is Side.N:
        return (rect.x + offset, rect.y2), (rect.x + offset + width, rect.y2)
    if side is Side.S:
        return (rect.x + offset, rect.y), (rect.x + offset + width, rect.y)
    if side is Side.E:
        return (rect.x2, rect.y + offset), (rect.x2, rect.y + offset + width)
    return (rect.x, rect.y + offset), (rect.x, rect.y + offset + width)


def _left_is_high(side: Side, reflected: bool) -> bool:
    """Whether the left fin (seen from outside) sits at the wall's higher coordinate."""
    az = side.local_azimuth + (-90.0 if reflected else 90.0)
    dx, dy = math.sin(math.radians(az)), math.cos(math.radians(az))
    return (dx if side.horizontal else dy) > 0


class _Canvas:
    def __init__(self, plan: FloorPlan):
        box = bounding_box(plan)
        self.x0, self.y1 = box.x, box.y2
        self.width = box.w * SCALE + 2 * MARGIN
        self.height = box.h * SCALE + 2 * MARGIN + 40.0

    def pt(self, x: float, y: float) -> tuple[str, str]:
        return _f(MARGIN + (x - self.x0) * SCALE), _f(MARGIN + 30.0 + (self.y1 - y) * SCALE)


def render_plan_svg(plan: FloorPlan, title: str = "", notes=()) -> str:
    """Draw ``plan`` in its local frame with a north arrow for the true North.

    Rooms are filled by function and labelled with id and area; windows are
    blue, the exterior door brown, interior doors show as gaps. Overhangs are
    hatched boxes outside the window and fins short strokes at its jambs.
    ``notes`` are extra caption lines under the title.
    """
    cv = _Canvas(plan)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(cv.width)}" '
           f'height="{_f(cv.height + 16.0 * len(notes))}" font-family="sans-serif" font-size="11">',
           '<rect width="100%" height="100%" fill="#ffffff"/>']
    if title:
        out.append(f'<text x="{_f(MARGIN)}" y="22" font-size="15" font-weight="bold">{escape(title)}</text>')
    for k, line in enumerate(notes):
        out.append(f'<text x="{_f(MARGIN)}" y="{_f(cv.height + 4.0 + 16.0 * k)}">{escape(str(line))}</text>')

    for s in plan.spaces:
        x, y = cv.pt(s.rect.x, s.rect.y2)
        fill = FUNCTION_FILL.get(s.function.value, "#f4f4f4")
        out.append(f'<rect x="{x}" y="{y}" width="{_f(s.rect.w * SCALE)}" height="{_f(s.rect.h * SCALE)}" '
                   f'fill="{fill}" stroke="#222222" stroke-width="2"/>')
        cx, cy = cv.pt(s.rect.x + s.rect.w / 2, s.rect.y + s.rect.h / 2)
        out.append(f'<text x="{cx}" y="{cy}" text-anchor="middle">{escape(s.id)}</text>')
        out.append(f'<text x="{cx}" y="{_f(float(cy) + 13.0)}" text-anchor="middle" fill="#555555">'
                   f'{s.area:.1f} m&#178;</text>')

    for o in plan.openings:
        try:
            host = plan.space(o.host_space)
        except KeyError:
            continue
        (ax, ay), (bx, by) = _wall_points(host.rect, o.wall_side, o.offset, o.width)
        p, q = cv.pt(ax, ay), cv.pt(bx, by)
        width = 3 if o.kind is OpeningKind.INTERIOR_DOOR else 5
        out.append(f'<line x1="{p[0]}" y1="{p[1]}" x2="{q[0]}" y2="{q[1]}" '
                   f'stroke="{OPENING_STROKE[o.kind]}" stroke-width="{width}"/>')
        dev = plan.shading_for(o.id)
        if dev is None:
            continue
        nx, ny = _outward(o.wall_side)
        if dev.overhang_depth > 0:
            corners = [(ax, ay), (bx, by), (bx + nx * dev.overhang_depth, by + ny * dev.overhang_depth),
                       (ax + nx * dev.overhang_depth, ay + ny * dev.overhang_depth)]
            pts = " ".join(",".join(cv.pt(*c)) for c in corners)
            out.append(f'<polygon points="{pts}" fill="#9e9e9e" fill-opacity="0.35" '
                       f'stroke="#616161" stroke-dasharray="3,2"/>')
        high_is_left = _left_is_high(o.wall_side, plan.reflected)
        for depth, at_high in ((dev.left_fin_depth, high_is_left), (dev.right_fin_depth, not high_is_left)):
            if depth <= 0:
                continue
            jx, jy = (bx, by) if at_high else (ax, ay)
            p, q = cv.pt(jx, jy), cv.pt(jx + nx * depth, jy + ny * depth)
            out.append(f'<line x1="{p[0]}" y1="{p[1]}" x2="{q[0]}" y2="{q[1]}" '
                       f'stroke="#424242" stroke-width="3"/>')

    # true North in the plan frame
    angle = plan.orientation if plan.reflected else -plan.orientation
    ax_, ay_ = cv.width - MARGIN / 2, MARGIN / 2 + 30.0
    out.append(f'<g transform="translate({_f(ax_)},{_f(ay_)}) rotate({_f(angle % 360.0)})">'
               '<polygon points="0,-20 7,8 0,3 -7,8" fill="#222222"/>'
               '<text x="0" y="-24" text-anchor="middle" font-weight="bold">N</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_daily_svg(series: dict, title: str = "", width: float = 760.0, height: float = 300.0) -> str:
    """Line chart of daily penalty differences against the reference.

    ``series`` maps a scenario name to 365 values; the reference itself is
    the zero line.
    """
    names = list(series)
    data = [np.asarray(series[k], dtype=float) for k in names]
    lo = min([0.0, *(float(d.min()) for d in data)]) if data else 0.0
    hi = max([0.0, *(float(d.max()) for d in data)]) if data else 0.0
    if hi - lo < 1e-9:
        lo, hi = lo - 1.0, hi + 1.0
    left, right, top, bottom = 60.0, 20.0, 36.0, 36.0
    pw, ph = width - left - right, height - top - bottom

    def sx(i, n):
        return left + pw * i / max(1, n - 1)

    def sy(v):
        return top + ph * (hi - v) / (hi - lo)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
           'font-family="sans-serif" font-size="11">',
           '<rect width="100%" height="100%" fill="#ffffff"/>']
    if title:
        out.append(f'<text x="{_f(left)}" y="20" font-size="14" font-weight="bold">{escape(title)}</text>')
    out.append(f'<rect x="{_f(left)}" y="{_f(top)}" width="{_f(pw)}" height="{_f(ph)}" '
               'fill="none" stroke="#999999"/>')
    z = _f(sy(0.0))
    out.append(f'<line x1="{_f(left)}" y1="{z}" x2="{_f(left + pw)}" y2="{z}" stroke="#000000"/>')
    for v in (lo, hi):
        out.append(f'<text x="{_f(left - 6)}" y="{_f(sy(v) + 4)}" text-anchor="end">{v:.1f}</text>')
    for m, label in enumerate(("J", "F", "M", "A", "M", "J", "J", "A", "S", "O", "N", "D")):
        out.append(f'<text x="{_f(left + pw * (m + 0.5) / 12)}" y="{_f(top + ph + 16)}" '
                   f'text-anchor="middle">{label}</text>')
    for k, (name, d) in enumerate(zip(names, data)):
        colour = SCENARIO_STROKE[k % len(SCENARIO_STROKE)]
        pts = " ".join(f"{_f(sx(i, d.size))},{_f(sy(v))}" for i, v in enumerate(d))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" '
                   f'stroke-width="{"2" if k == 0 else "1"}"/>')
        out.append(f'<text x="{_f(left + pw - 8)}" y="{_f(top + 14 + 13 * k)}" text-anchor="end" '
                   f'fill="{colour}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
