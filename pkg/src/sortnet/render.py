"""Wiring diagrams as SVG 1.1.

Step s sits at x = 10 s and position p at y = 10 p (integer user units), so
the output is byte-stable. Each particle is one polyline; a swap at step s is
drawn as two straight segments exchanging neighbouring rows between x = 10(s-1)
and x = 10 s.
"""

from __future__ import annotations

import io
from pathlib import Path

from .errors import UsageError
from .network import SortingNetwork

MAX_N = 5000
UNIT = 10


def _colour(x: int, n: int) -> str:
    # blue for low starting positions through red for high ones
    f = (x - 1) / max(n - 1, 1)
    return "#%02x%02x%02x" % (int(round(40 + 200 * f)), 60, int(round(240 - 200 * f)))


def wiring_svg(net: SortingNetwork, stroke: float | None = None) -> str:
    n, N = net.n, net.N
    if n > MAX_N:
        raise UsageError(f"renderer supports n <= {MAX_N}, got {n}")
    steps, moves = net.events
    width = UNIT * (N + 2)
    height = UNIT * (n + 1)
    sw = stroke if stroke is not None else max(0.2, min(2.0, 200.0 / n))
    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
              f'width="{width}" height="{height}" viewBox="{-UNIT} 0 {width} {height}">\n')
    out.write(f"<desc>wiring diagram n={n} swaps={N}</desc>\n")
    out.write(f'<g fill="none" stroke-width="{sw:g}" stroke-linejoin="round">\n')
    for x in range(1, n + 1):
        level = x
        pts = [(0, level)]
        for k in range(n - 1):
            s = int(steps[x - 1, k])
            pts.append((s - 1, level))
            level += int(moves[x - 1, k])
            pts.append((s, level))
        pts.append((N, level))
        # drop repeated points produced by back-to-back swaps
        dedup = [pts[0]]
        for p in pts[1:]:
            if p != dedup[-1]:
                dedup.append(p)
        coords = " ".join(f"{UNIT * a},{UNIT * b}" for a, b in dedup)
        out.write(f'<polyline data-particle="{x}" stroke="{_colour(x, n)}" points="{coords}"/>\n')
    out.write("</g>\n</svg>\n")
    return out.getvalue()


def render_wiring(net: SortingNetwork, out: str | Path) -> Path:
    path = Path(out)
    path.write_text(wiring_svg(net), encoding="utf-8")
    return path
