"""Standalone SVG figures of point sets, ring structure and trajectories."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from typing import Optional, Sequence

from .configuration import Configuration

SVG_NS = "http://www.w3.org/2000/svg"
MARGIN = 0.05
CANVAS = 600.0


def _ring_radii(config: Configuration) -> dict[int, float]:
    rings = config.meta.rings
    if rings is None:
        return {}
    radii: dict[int, float] = {}
    for p, r in zip(config.points, rings):
        radii.setdefault(r, math.hypot(float(p.x), float(p.y)))
    return radii


def _fmt(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


def render_svg(config: Configuration, trajectory: Optional[Sequence[int]] = None) -> str:
    """SVG text with points as dots, rings as faint circles and the trajectory as a polyline.

    The final trajectory segment carries an arrowhead and vertices are
    labelled with their 1-based position along the trajectory.
    """
    if trajectory:
        for i in trajectory:
            if not 0 <= i < len(config):
                raise ValueError(f"trajectory index {i} does not exist in a {len(config)}-point configuration")
    xs = [float(p.x) for p in config.points]
    ys = [float(p.y) for p in config.points]
    radii = _ring_radii(config)
    lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
    for r in radii.values():
        lo_x, hi_x, lo_y, hi_y = min(lo_x, -r), max(hi_x, r), min(lo_y, -r), max(hi_y, r)
    span = max(hi_x - lo_x, hi_y - lo_y) or 1.0
    pad = MARGIN * span
    lo_x, hi_x, lo_y, hi_y = lo_x - pad, hi_x + pad, lo_y - pad, hi_y + pad
    scale = CANVAS / max(hi_x - lo_x, hi_y - lo_y)
    width, height = (hi_x - lo_x) * scale, (hi_y - lo_y) * scale

    def tx(x: float) -> float:
        return (x - lo_x) * scale

    def ty(y: float) -> float:
        # SVG y grows downwards
        return (hi_y - y) * scale

    root = ET.Element("svg", {"xmlns": SVG_NS, "version": "1.1", "width": _fmt(width),
                              "height": _fmt(height), "viewBox": f"0 0 {_fmt(width)} {_fmt(height)}"})
    ET.SubElement(root, "rect", {"x": "0", "y": "0", "width": _fmt(width), "height": _fmt(height),
                                 "fill": "white"})
    rings_g = ET.SubElement(root, "g", {"class": "rings", "fill": "none", "stroke": "#bbbbbb",
                                        "stroke-width": "0.75", "stroke-dasharray": "4 3"})
    for j in sorted(radii):
        ET.SubElement(rings_g, "circle", {"class": "ring", "cx": _fmt(tx(0)), "cy": _fmt(ty(0)),
                                          "r": _fmt(radii[j] * scale)})
    dot = max(1.5, min(4.0, CANVAS / 150))
    if trajectory and len(trajectory) >= 2:
        pts = [(tx(xs[i]), ty(ys[i])) for i in trajectory]
        ET.SubElement(root, "polyline", {
            "class": "trajectory", "fill": "none", "stroke": "#c0392b", "stroke-width": "1.5",
            "points": " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)})
        (x0, y0), (x1, y1) = pts[-2], pts[-1]
        ang = math.atan2(y1 - y0, x1 - x0)
        size = 4 * dot
        # tip sits just short of the final dot
        tip = (x1 - dot * math.cos(ang), y1 - dot * math.sin(ang))
        left = (tip[0] - size * math.cos(ang - 0.4), tip[1] - size * math.sin(ang - 0.4))
        right = (tip[0] - size * math.cos(ang + 0.4), tip[1] - size * math.sin(ang + 0.4))
        ET.SubElement(root, "polygon", {
            "class": "arrowhead", "fill": "#c0392b",
            "points": " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (tip, left, right))})
    points_g = ET.SubElement(root, "g", {"class": "points", "fill": "black"})
    for x, y in zip(xs, ys):
        ET.SubElement(points_g, "circle", {"class": "point", "cx": _fmt(tx(x)), "cy": _fmt(ty(y)),
                                           "r": _fmt(dot)})
    if trajectory:
        labels = ET.SubElement(root, "g", {"class": "labels", "font-family": "sans-serif",
                                           "font-size": _fmt(3 * dot), "fill": "#1f3a93"})
        for pos, i in enumerate(trajectory, start=1):
            t = ET.SubElement(labels, "text", {"x": _fmt(tx(xs[i]) + 1.5 * dot),
                                               "y": _fmt(ty(ys[i]) - 1.5 * dot)})
            t.text = str(pos)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"
