"""SVG drawings and summary statistics for sampled tilings."""
from __future__ import annotations

import numpy as np

from . import __version__
from .aztec import EAST, HORIZONTAL, NORTH, SOUTH, WEST, AztecTiling
from .tower import KINDS, TowerMatching

AZTEC_COLORS = {NORTH: "#d62728", SOUTH: "#f2c70f", EAST: "#2ca02c", WEST: "#1f77b4"}
TOWER_COLORS = {
    "red-a": "#d62728",
    "red-b": "#f08080",
    "blue-a": "#1f77b4",
    "blue-b": "#8fbce6",
    "black": "#000000",
    "yellow": "#f2c70f",
    "green": "#2ca02c",
}


def _header(width: float, height: float) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">',
        f"<!-- shuffling {__version__} -->",
    ]


def aztec_svg(T: AztecTiling, cell: float = 4.0, stroke: bool | None = None) -> str:
    """Dominoes as coloured rectangles (North red, South yellow, East green, West blue)."""
    N = T.N
    if stroke is None:
        stroke = N <= 30
    size = 2 * N * cell
    lines = _header(size, size)
    style = ' stroke="#222" stroke-width="0.5"' if stroke else ""
    for i, j in zip(*np.nonzero(T.grid)):
        code = int(T.grid[i, j])
        w, h = (2, 1) if code in HORIZONTAL else (1, 2)
        lines.append(
            f'<rect x="{j * cell:g}" y="{i * cell:g}" width="{w * cell:g}" height="{h * cell:g}" '
            f'fill="{AZTEC_COLORS[code]}"{style}/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _node_xy(vertex, N: int, scale: float) -> tuple[float, float]:
    side, col, k, h = vertex
    x = 3 * (k - 1) + (1.5 if col == "B" else 0.0) + (0.5 if side == "out" else 0.0)
    y = N - h
    return (x + 1) * scale, (y + 1) * scale


def tower_svg(M: TowerMatching, scale: float = 6.0, hide_black: bool = False, background: bool = True) -> str:
    """Dominoes as coloured segments between dual vertices.

    ``hide_black`` drops the black (A to B) dominoes and ``background=False``
    the grey graph edges, as in large pictures.
    """
    from .tower import build_tower

    N = M.N
    width = (3 * N + 2) * scale
    height = (3 * N + 3) * scale
    lines = _header(width, height)
    graph = build_tower(N)
    sw = max(scale / 3, 1.0)
    if background:
        for w, b, _ in graph.edges:
            (x1, y1), (x2, y2) = _node_xy(w, N, scale), _node_xy(b, N, scale)
            lines.append(f'<line x1="{x1:g}" y1="{y1:g}" x2="{x2:g}" y2="{y2:g}" stroke="#ccc" stroke-width="0.5"/>')
    for w, b, kind in sorted(M.edges):
        if hide_black and kind == "black":
            continue
        (x1, y1), (x2, y2) = _node_xy(w, N, scale), _node_xy(b, N, scale)
        lines.append(
            f'<line x1="{x1:g}" y1="{y1:g}" x2="{x2:g}" y2="{y2:g}" stroke="{TOWER_COLORS[kind]}" '
            f'stroke-width="{sw:g}" stroke-linecap="round"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Statistics


def domino_histogram(T: AztecTiling | TowerMatching) -> dict:
    """Counts by domino type, plus the vertical fraction for Aztec tilings."""
    if isinstance(T, TowerMatching):
        c = T.counts()
        return {"model": "tower", "N": T.N, "counts": {k: c[k] for k in KINDS}}
    c = T.counts()
    total = sum(c.values())
    return {
        "model": "aztec",
        "N": T.N,
        "counts": c,
        "vertical_fraction": (c["E"] + c["W"]) / total if total else 0.0,
    }


def _orientation_cells(T: AztecTiling) -> np.ndarray:
    """Per-cell orientation: 1 horizontal, 2 vertical, 0 outside."""
    g = T.grid
    o = np.zeros(g.shape, dtype=np.int8)
    hi, hj = np.nonzero(np.isin(g, HORIZONTAL))
    o[hi, hj] = o[hi, hj + 1] = 1
    vi, vj = np.nonzero(np.isin(g, (EAST, WEST)))
    o[vi, vj] = o[vi + 1, vj] = 2
    return o


def frozen_cells(T: AztecTiling, reach: int = 2) -> np.ndarray:
    """Cells whose whole neighbourhood (Chebyshev radius ``reach``, inside the diamond) has one orientation."""
    o = _orientation_cells(T)
    pad_lo = np.pad(np.where(o == 0, 9, o), reach, constant_values=9)
    pad_hi = np.pad(o, reach, constant_values=0)
    win = 2 * reach + 1
    lo = np.lib.stride_tricks.sliding_window_view(pad_lo, (win, win)).min(axis=(2, 3))
    hi = np.lib.stride_tricks.sliding_window_view(pad_hi, (win, win)).max(axis=(2, 3))
    return (lo == hi) & (o > 0)


def frozen_fraction(T: AztecTiling, rho: float = 1.05, reach: int = 2) -> float:
    """Fraction of frozen dominoes among those farther than rho*(N+1)/sqrt(2) from the centre.

    A domino is frozen when every domino meeting the radius-``reach``
    neighbourhood of its cells has the same orientation (brickwork).
    Returns 1.0 when no domino lies outside the radius.
    """
    N = T.N
    froz = frozen_cells(T, reach)
    g = T.grid
    ai, aj = np.nonzero(g)
    horiz = np.isin(g[ai, aj], HORIZONTAL)
    bi = np.where(horiz, ai, ai + 1)
    bj = np.where(horiz, aj + 1, aj)
    ci = (ai + bi) / 2 + 0.5 - N
    cj = (aj + bj) / 2 + 0.5 - N
    far = np.hypot(ci, cj) > rho * (N + 1) / np.sqrt(2)
    if not far.any():
        return 1.0
    ok = froz[ai, aj] & froz[bi, bj]
    return float(ok[far].mean())


def tasep_summary(heights: np.ndarray) -> dict:
    """Current (total jumps per unit time) and final positions of a TASEP trajectory."""
    heights = np.asarray(heights)
    jumps = np.diff(heights, axis=0)
    steps = max(heights.shape[0] - 1, 1)
    return {
        "steps": int(heights.shape[0] - 1),
        "particles": int(heights.shape[1]),
        "current": float(jumps.sum() / steps),
        "final": [int(v) for v in heights[-1]],
    }

