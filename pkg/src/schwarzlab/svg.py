"""Minimal deterministic SVG sketches: polylines, points and text."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np


class Sketch:
    """Collects complex-plane polylines and renders them into a fixed viewport."""

    def __init__(self, width: int = 480, height: int = 480, margin: int = 24):
        self.width, self.height, self.margin = width, height, margin
        self._items = []

    def polyline(self, pts, color: str = "black", closed: bool = False, width: float = 1.0):
        self._items.append(("line", np.asarray(pts, dtype=complex).reshape(-1), color, closed, width))

    def points(self, pts, color: str = "red", r: float = 2.5):
        self._items.append(("pts", np.asarray(pts, dtype=complex).reshape(-1), color, r))

    def text(self, s: str, row: int = 0):
        self._items.append(("text", s, row))

    def _bounds(self):
        allp = [it[1] for it in self._items if it[0] in ("line", "pts") and it[1].size]
        if not allp:
            return -1.0, 1.0, -1.0, 1.0
        p = np.concatenate(allp)
        x0, x1, y0, y1 = p.real.min(), p.real.max(), p.imag.min(), p.imag.max()
        span = max(x1 - x0, y1 - y0, 1e-12)
        cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        return cx - span / 2, cx + span / 2, cy - span / 2, cy + span / 2

    def render(self) -> str:
        x0, x1, y0, y1 = self._bounds()
        w = self.width - 2 * self.margin
        h = self.height - 2 * self.margin

        def tx(p):
            X = self.margin + (p.real - x0) / (x1 - x0) * w
            Y = self.margin + (y1 - p.imag) / (y1 - y0) * h
            return X, Y

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
               f'viewBox="0 0 {self.width} {self.height}">',
               f'<rect width="{self.width}" height="{self.height}" fill="white"/>']
        for it in self._items:
            if it[0] == "line":
                _, p, color, closed, lw = it
                X, Y = tx(p)
                pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(X, Y))
                tag = "polygon" if closed else "polyline"
                out.append(f'<{tag} points="{pts}" fill="none" stroke="{color}" stroke-width="{lw:.2f}"/>')
            elif it[0] == "pts":
                _, p, color, r = it
                X, Y = tx(p)
                out.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="{r:.2f}" fill="{color}"/>' for a, b in zip(X, Y))
            else:
                _, s, row = it
                out.append(f'<text x="{self.margin}" y="{self.margin + 14 * (row + 1)}" '
                           f'font-family="monospace" font-size="12">{escape(s)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"
