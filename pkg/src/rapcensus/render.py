"""Tutte embeddings of 1-skeleta and deterministic SVG output."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .core import Polyhedron, parse_polyhedron, serialize_polyhedron

__all__ = [
    "RenderError",
    "Embedding2D",
    "RenderOptions",
    "default_outer_face",
    "tutte_embedding",
    "crossings",
    "to_svg",
    "contact_sheet",
    "polyhedron_from_svg",
]


class RenderError(RuntimeError):
    pass


@dataclass(frozen=True)
class Embedding2D:
    coords: np.ndarray  # shape (V, 2)
    outer_face: int


@dataclass(frozen=True)
class RenderOptions:
    size: int = 512
    stroke: float = 1.5
    dots: bool = True
    dot_radius: float = 2.5
    margin: float = 16.0


def default_outer_face(poly: Polyhedron) -> int:
    sizes = poly.face_sizes
    top = max(sizes)
    return sizes.index(top)


def tutte_embedding(poly: Polyhedron, outer: int | None = None) -> Embedding2D:
    """Barycentric embedding with ``outer`` pinned to a regular polygon.

    The outer cycle runs counter-clockwise, which keeps the drawing's
    orientation consistent with the rotation system.
    """
    if outer is None:
        outer = default_outer_face(poly)
    if not 0 <= outer < poly.num_faces:
        raise RenderError(f"no face {outer}")
    n = poly.num_vertices
    ring = poly.face_vertices[outer]
    k = len(ring)
    coords = np.zeros((n, 2))
    pinned = np.zeros(n, dtype=bool)
    for i, v in enumerate(ring):
        a = 2 * math.pi * i / k
        coords[v] = (math.cos(a), math.sin(a))
        pinned[v] = True
    free = np.flatnonzero(~pinned)
    if len(free):
        pos = {v: i for i, v in enumerate(free)}
        rows, cols, vals = [], [], []
        rhs = np.zeros((len(free), 2))
        for v in free:
            i = pos[v]
            rows.append(i)
            cols.append(i)
            vals.append(3.0)
            for w in poly.rot[v]:
                if pinned[w]:
                    rhs[i] += coords[w]
                else:
                    rows.append(i)
                    cols.append(pos[w])
                    vals.append(-1.0)
        lap = scipy.sparse.csc_matrix((vals, (rows, cols)), shape=(len(free), len(free)))
        try:
            sol = scipy.sparse.linalg.splu(lap).solve(rhs)
        except RuntimeError as exc:
            raise RenderError(f"singular Tutte system: {exc}") from None
        coords[free] = sol
        if not np.all(np.isfinite(coords)):
            raise RenderError("singular Tutte system")
    return Embedding2D(coords, outer)


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 * d2 < 0 and d3 * d4 < 0:
        return True
    # collinear overlaps count as crossings too
    eps = 1e-12
    for d, a, b, c in ((d1, q1, q2, p1), (d2, q1, q2, p2), (d3, p1, p2, q1), (d4, p1, p2, q2)):
        if abs(d) < eps and min(a[0], b[0]) - eps <= c[0] <= max(a[0], b[0]) + eps and min(a[1], b[1]) - eps <= c[1] <= max(a[1], b[1]) + eps:
            return True
    return False


def crossings(poly: Polyhedron, emb: Embedding2D) -> list[tuple[int, int]]:
    """Pairs of edge ids whose drawn segments meet away from a shared endpoint."""
    xy = emb.coords
    edges = poly.edges
    out = []
    for i in range(len(edges)):
        a, b = edges[i]
        for j in range(i + 1, len(edges)):
            c, d = edges[j]
            if len({a, b, c, d}) < 4:
                continue
            if _segments_cross(xy[a], xy[b], xy[c], xy[d]):
                out.append((i, j))
    return out


def _fmt(x: float) -> str:
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


def _panel(poly: Polyhedron, emb: Embedding2D, opts: RenderOptions, x0: float, y0: float, size: float) -> list[str]:
    scale = (size - 2 * opts.margin) / 2
    cx, cy = x0 + size / 2, y0 + size / 2
    # y axis flipped so the drawing keeps its orientation on screen
    pts = [(cx + scale * x, cy - scale * y) for x, y in emb.coords]
    out = [f'<g stroke="black" stroke-width="{_fmt(opts.stroke)}" stroke-linecap="round">']
    for u, w in poly.edges:
        (x1, y1), (x2, y2) = pts[u], pts[w]
        out.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}"/>')
    out.append("</g>")
    if opts.dots:
        out.append('<g fill="black">')
        for x, y in pts:
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(opts.dot_radius)}"/>')
        out.append("</g>")
    return out


def _header(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]


def to_svg(
    poly: Polyhedron,
    emb: Embedding2D | None = None,
    options: RenderOptions | None = None,
    title: str | None = None,
) -> bytes:
    """Single drawing; the structure is embedded as RAP1 text in ``<metadata>``."""
    opts = options or RenderOptions()
    if emb is None:
        emb = tutte_embedding(poly)
    lines = _header(opts.size, opts.size)
    if title:
        lines.append(f"<title>{escape(title)}</title>")
    lines.append(f"<metadata>{escape(serialize_polyhedron(poly, comment=f'outer face {emb.outer_face}'))}</metadata>")
    lines += _panel(poly, emb, opts, 0.0, 0.0, float(opts.size))
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def polyhedron_from_svg(data: bytes) -> Polyhedron:
    m = re.search(rb"<metadata>(.*?)</metadata>", data, re.S)
    if m is None:
        raise RenderError("no polyhedron metadata in SVG")
    text = m.group(1).decode("utf-8")
    text = text.replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&")
    return parse_polyhedron(text)


def contact_sheet(
    items: Sequence[tuple[str, Polyhedron]],
    columns: int = 10,
    panel: int = 160,
    options: RenderOptions | None = None,
) -> bytes:
    """Grid of labelled drawings in the given order."""
    base = options or RenderOptions()
    opts = RenderOptions(base.size, base.stroke * 0.6, base.dots, base.dot_radius * 0.5, panel * 0.08)
    rows = max(1, math.ceil(len(items) / columns))
    label_h = 14
    width, height = columns * panel, rows * (panel + label_h)
    lines = _header(width, height)
    for idx, (label, poly) in enumerate(items):
        r, c = divmod(idx, columns)
        x0, y0 = c * panel, r * (panel + label_h)
        lines.append(
            f'<text x="{_fmt(x0 + panel / 2)}" y="{_fmt(y0 + label_h - 3)}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{escape(label)}</text>'
        )
        lines += _panel(poly, tutte_embedding(poly), opts, x0, y0 + label_h, panel)
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")
