"""Minimal SVG writer for dot plots and polylines.

Every figure keeps the exact numbers it draws; :meth:`Figure.sidecar` returns
them as a JSON-ready dict so plots are never the only record of a result.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Figure", "write_atomic", "write_json", "fmt"]


def fmt(x: float) -> str:
    """Shortest round-trip text for a float; fixed across platforms."""
    return repr(float(x))


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, data) -> None:
    write_atomic(path, json.dumps(data, indent=2, sort_keys=False) + "\n")


@dataclass
class Figure:
    """Layers of dots and polylines in the complex plane, drawn with y pointing up."""

    title: str = ""
    size: int = 600
    layers: list = field(default_factory=list)

    def dots(self, name: str, points, radius: float, color: str) -> None:
        pts = np.asarray(list(points), dtype=complex)
        self.layers.append({"name": name, "type": "dots", "radius": radius, "color": color, "points": pts})

    def polyline(self, name: str, points, width: float, color: str) -> None:
        pts = np.asarray(list(points), dtype=complex)
        self.layers.append({"name": name, "type": "polyline", "width": width, "color": color, "points": pts})

    def _bounds(self):
        pts = np.concatenate([l["points"] for l in self.layers if len(l["points"])] or [np.zeros(1, complex)])
        lo = complex(pts.real.min(), pts.imag.min())
        hi = complex(pts.real.max(), pts.imag.max())
        span = max(hi.real - lo.real, hi.imag - lo.imag, 1e-12)
        pad = 0.05 * span
        return lo.real - pad, hi.imag + pad, span + 2 * pad

    def render(self) -> str:
        x0, y1, span = self._bounds()
        scale = self.size / span

        def xy(z):
            return fmt(round((z.real - x0) * scale, 3)), fmt(round((y1 - z.imag) * scale, 3))

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" height="{self.size}" '
            f'viewBox="0 0 {self.size} {self.size}">',
            f'<rect width="{self.size}" height="{self.size}" fill="white"/>',
        ]
        if self.title:
            out.append(f'<title>{self.title}</title>')
        for layer in self.layers:
            out.append(f'<g id="{layer["name"]}">')
            if layer["type"] == "dots":
                for z in layer["points"]:
                    x, y = xy(z)
                    out.append(f'<circle cx="{x}" cy="{y}" r="{layer["radius"]}" fill="{layer["color"]}"/>')
            elif len(layer["points"]):
                coords = " ".join(",".join(xy(z)) for z in layer["points"])
                out.append(
                    f'<polyline points="{coords}" fill="none" stroke="{layer["color"]}" '
                    f'stroke-width="{layer["width"]}"/>'
                )
            out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def sidecar(self) -> dict:
        return {
            "title": self.title,
            "layers": [
                {
                    "name": l["name"],
                    "type": l["type"],
                    "points": [[float(z.real), float(z.imag)] for z in l["points"]],
                }
                for l in self.layers
            ],
        }

    def save(self, path: str) -> None:
        """Write ``path`` and its sidecar ``path + ".json"``."""
        write_atomic(path, self.render())
        write_json(path + ".json", self.sidecar())
