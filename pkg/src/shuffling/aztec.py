"""Domino tilings of the Aztec diamond: data model, shuffling and line ensembles.

Grid conventions
----------------
A tiling of ``A_N`` lives on a ``2N x 2N`` array of unit cells; ``(i, j)`` is
row ``i`` (top to bottom) and column ``j``.  A cell is inside the diamond when
``|i + 1/2 - N| + |j + 1/2 - N| <= N``.  Its checkerboard colour is
``(i + j + N) % 2``.

Each domino is stored at its anchor (top-left cell) with a type code:

========  ===========  ===========================
type      orientation  colour of the anchor cell
========  ===========  ===========================
North     horizontal   1
South     horizontal   0
West      vertical     1
East      vertical     0
========  ===========  ===========================

With this convention the horizontal domino in the top row is North, the one
in the bottom row is South, and so on.  Every tiling splits into ``N**2``
*cells*: 2x2 blocks whose anchor has colour 1 and whose four edges are one
North (top), South (bottom), West (left) and East (right) domino slot.

Line ensembles
--------------
Lines run left to right through South (flat), West (one unit up) and East
(one unit down) dominoes; North dominoes carry no line.  Line time ``s``
advances by one across a South or East domino and is unchanged across a
West domino.  The ``k``-th line from the top starts at height ``-k`` at time
``k - 1`` (it is flat before) and all lines end at time ``N`` at heights
``-1, ..., -N``.  Reading heights before and after the vertical moves gives
the particle arrays ``x^k`` (after, time ``k - 1``) and ``y^{k+1}`` (before,
time ``k``).
"""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._exact import as_fraction

EMPTY, NORTH, SOUTH, EAST, WEST = 0, 1, 2, 3, 4
TYPE_NAMES = {NORTH: "N", SOUTH: "S", EAST: "E", WEST: "W"}
TYPE_CODES = {v: k for k, v in TYPE_NAMES.items()}
HORIZONTAL = (NORTH, SOUTH)

# cell roles, used by the line bijection
NL, NR, SL, SR, EB, ET, WB, WT = range(1, 9)


class GeometryError(ValueError):
    """A domino does not fit the diamond or cells are covered twice."""


class BijectionError(ValueError):
    """Input is not the image of a valid tiling / line ensemble."""


@lru_cache(maxsize=64)
def _inside(N: int) -> np.ndarray:
    idx = np.arange(2 * N) + 0.5 - N
    mask = (np.abs(idx)[:, None] + np.abs(idx)[None, :]) <= N
    mask.setflags(write=False)
    return mask


def inside_mask(N: int) -> np.ndarray:
    """Boolean (2N, 2N) mask of the cells of A_N (read-only, cached)."""
    return _inside(N)


@lru_cache(maxsize=64)
def color_grid(N: int) -> np.ndarray:
    idx = np.arange(2 * N)
    grid = (idx[:, None] + idx[None, :] + N) % 2
    grid.setflags(write=False)
    return grid


@lru_cache(maxsize=64)
def _anchor_parity(n: int) -> np.ndarray:
    out = (color_grid(n) == 1)[:-1, :-1]
    out.setflags(write=False)
    return out


def classify(i: int, j: int, orient: str, N: int) -> str:
    """NESW type of the domino anchored at (i, j) with the given orientation."""
    cells = [(i, j), (i, j + 1)] if orient == "h" else [(i, j), (i + 1, j)]
    mask = inside_mask(N)
    for r, c in cells:
        if not (0 <= r < 2 * N and 0 <= c < 2 * N and mask[r, c]):
            raise GeometryError(f"domino at {(i, j)} ({orient}) leaves A_{N}")
    black = (i + j + N) % 2
    if orient == "h":
        return "N" if black else "S"
    return "W" if black else "E"


def _occupancy(grid: np.ndarray) -> np.ndarray:
    """Cell cover counts for anchor grids of shape (..., H, W)."""
    horiz = (grid == NORTH) | (grid == SOUTH)
    vert = (grid == EAST) | (grid == WEST)
    occ = (horiz | vert).astype(np.int8)
    occ[..., :, 1:] += horiz[..., :, :-1]
    occ[..., 1:, :] += vert[..., :-1, :]
    return occ


@dataclass(frozen=True, eq=False)
class AztecTiling:
    """A tiling of A_N stored as a ``2N x 2N`` anchor grid of type codes."""

    N: int
    grid: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.int8)
        if grid.shape != (2 * self.N, 2 * self.N):
            raise GeometryError(f"grid shape {grid.shape} does not match N={self.N}")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    # -- identity -----------------------------------------------------------
    def key(self) -> bytes:
        return bytes([self.N % 256]) + self.grid.tobytes()

    def __eq__(self, other) -> bool:
        return isinstance(other, AztecTiling) and self.N == other.N and np.array_equal(self.grid, other.grid)

    def __hash__(self) -> int:
        return hash(self.key())

    def digest(self) -> str:
        return hashlib.sha256(self.key()).hexdigest()[:16]

    # -- validation / queries -----------------------------------------------
    def validate(self) -> None:
        """Check the partition of A_N and the type convention."""
        N = self.N
        if N == 0:
            return
        occ = _occupancy(self.grid[None])[0]
        mask = inside_mask(N)
        if np.any(occ[mask] != 1) or np.any(occ[~mask] != 0):
            raise GeometryError("dominoes do not partition A_N")
        color = color_grid(N)
        g = self.grid
        expect = {NORTH: 1, SOUTH: 0, WEST: 1, EAST: 0}
        for code, c in expect.items():
            if np.any(color[g == code] != c):
                raise GeometryError(f"{TYPE_NAMES[code]} domino on the wrong colour")
        if int(np.count_nonzero(g)) != N * (N + 1):
            raise GeometryError("wrong number of dominoes")

    def counts(self) -> dict[str, int]:
        return {name: int(np.count_nonzero(self.grid == code)) for code, name in TYPE_NAMES.items()}

    def vertical_count(self) -> int:
        return int(np.count_nonzero((self.grid == EAST) | (self.grid == WEST)))

    def dominoes(self) -> list[dict]:
        """Domino records; (m, n) is the lower-left lattice corner."""
        out = []
        for i, j in zip(*np.nonzero(self.grid)):
            code = int(self.grid[i, j])
            orient = "h" if code in HORIZONTAL else "v"
            bottom = i if orient == "h" else i + 1
            out.append(
                {"m": int(j) - self.N, "n": self.N - 1 - int(bottom), "orient": orient, "type": TYPE_NAMES[code]}
            )
        return out

    def to_json(self) -> dict:
        return {"model": "aztec", "N": self.N, "dominoes": self.dominoes()}

    @classmethod
    def from_json(cls, data) -> "AztecTiling":
        if isinstance(data, str):
            data = json.loads(data)
        if data.get("model", "aztec") != "aztec":
            raise ValueError(f"not an Aztec tiling: model={data.get('model')}")
        N = int(data["N"])
        grid = np.zeros((2 * N, 2 * N), dtype=np.int8)
        for d in data["dominoes"]:
            j = int(d["m"]) + N
            bottom = N - 1 - int(d["n"])
            i = bottom if d["orient"] == "h" else bottom - 1
            kind = classify(i, j, d["orient"], N)
            if kind != d["type"]:
                raise GeometryError(f"domino {d} has type {kind} under the colour convention")
            grid[i, j] = TYPE_CODES[kind]
        tiling = cls(N, grid)
        tiling.validate()
        return tiling

    @classmethod
    def flat(cls, N: int) -> "AztecTiling":
        """The all-horizontal tiling T_0 (North above the equator, South below)."""
        grid = np.zeros((2 * N, 2 * N), dtype=np.int8)
        mask = inside_mask(N)
        for i in range(2 * N):
            cols = np.nonzero(mask[i])[0]
            code = NORTH if i < N else SOUTH
            grid[i, cols[0] : cols[-1] + 1 : 2] = code
        return cls(N, grid)

    def roles(self) -> np.ndarray:
        """Per-cell role codes (which half of which domino type covers it)."""
        g = self.grid
        r = np.zeros_like(g)
        for code, first, second, horiz in (
            (NORTH, NL, NR, True),
            (SOUTH, SL, SR, True),
            (EAST, ET, EB, False),
            (WEST, WT, WB, False),
        ):
            m = g == code
            r[m] = first
            if horiz:
                r[:, 1:][m[:, :-1]] = second
            else:
                r[1:, :][m[:-1, :]] = second
        return r


def elementary_moves(T: AztecTiling) -> list[AztecTiling]:
    """Tilings obtained by rotating one 2x2 square covered by two parallel dominoes."""
    N, g = T.N, T.grid
    color = color_grid(N)
    out = []
    for i, j in zip(*np.nonzero(g)):
        code = g[i, j]
        h = None
        if code in HORIZONTAL and i + 1 < 2 * N and g[i + 1, j] in HORIZONTAL:
            h = g.copy()
            h[i, j] = h[i + 1, j] = EMPTY
            h[i, j] = WEST if color[i, j] else EAST
            h[i, j + 1] = WEST if color[i, j + 1] else EAST
        elif code in (EAST, WEST) and j + 1 < 2 * N and g[i, j + 1] in (EAST, WEST):
            h = g.copy()
            h[i, j] = h[i, j + 1] = EMPTY
            h[i, j] = NORTH if color[i, j] else SOUTH
            h[i + 1, j] = NORTH if color[i + 1, j] else SOUTH
        if h is not None:
            out.append(AztecTiling(N, h))
    return out


# ---------------------------------------------------------------------------
# Shuffling on batches of anchor grids


def _destroy(g: np.ndarray) -> None:
    bad = (g[..., :-1, :] == SOUTH) & (g[..., 1:, :] == NORTH)
    g[..., :-1, :][bad] = EMPTY
    g[..., 1:, :][bad] = EMPTY
    bad = (g[..., :, :-1] == EAST) & (g[..., :, 1:] == WEST)
    g[..., :, :-1][bad] = EMPTY
    g[..., :, 1:][bad] = EMPTY


def _slide(g: np.ndarray) -> np.ndarray:
    B, H, W = g.shape
    out = np.zeros((B, H + 2, W + 2), dtype=np.int8)
    for code, di, dj in ((NORTH, 0, 1), (SOUTH, 2, 1), (EAST, 1, 2), (WEST, 1, 0)):
        m = g == code
        out[:, di : di + H, dj : dj + W][m] = code
    return out


def _block_anchors(empty: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Anchors (batch, row, col) of the 2x2 blocks tiling the vacant region of A_n.

    Every fully vacant cell is a candidate, but a candidate can also be the
    union of quarters of four diagonal neighbours.  Such a spurious candidate
    always has true blocks at all four diagonal neighbours, so along each
    down-right diagonal the true blocks are the candidates at even offset from
    the start of their run.
    """
    B, H, W = empty.shape
    cand = empty[:, :-1, :-1] & empty[:, 1:, :-1] & empty[:, :-1, 1:] & empty[:, 1:, 1:]
    cand &= _anchor_parity(n)
    b, i, j = np.nonzero(cand)
    # consecutive cells on one diagonal get consecutive keys
    key = (b.astype(np.int64) * (2 * H) + (j - i + H)) * H + i
    order = np.argsort(key, kind="stable")
    key = key[order]
    start = np.ones(len(key), dtype=bool)
    start[1:] = np.diff(key) != 1
    pos = np.arange(len(key))
    offset = pos - np.maximum.accumulate(np.where(start, pos, 0))
    keep = order[offset % 2 == 0]
    return b[keep], i[keep], j[keep]


def _fill(g: np.ndarray, n: int, horizontal_prob, rng: np.random.Generator) -> None:
    """Fill the empty 2x2 blocks of A_n in place.

    ``horizontal_prob`` is a scalar or an ``(2n, 2n)`` array indexed by the
    block anchor.  One uniform is drawn per block.
    """
    empty = (_occupancy(g) == 0) & inside_mask(n)
    b, i, j = _block_anchors(empty, n)
    hp = np.broadcast_to(np.asarray(horizontal_prob, dtype=float), (2 * n, 2 * n))
    horiz = rng.random(len(b)) < hp[i, j]
    g[b, i, j] = np.where(horiz, NORTH, WEST)
    g[b, i + 1, j] = np.where(horiz, SOUTH, EMPTY)
    g[b, i, j + 1] = np.where(horiz, EMPTY, EAST)
    if 4 * len(b) != int(np.count_nonzero(empty)):
        raise AssertionError("vacancy does not decompose into 2x2 blocks")


def shuffle_grids(g: np.ndarray, horizontal_prob, rng: np.random.Generator) -> np.ndarray:
    """One shuffling step on a batch of anchor grids of shape (B, 2n, 2n)."""
    g = np.array(g, dtype=np.int8, copy=True)
    n = g.shape[-1] // 2
    _destroy(g)
    g = _slide(g)
    _fill(g, n + 1, horizontal_prob, rng)
    # every fill adds two dominoes, every annihilation removed two
    count = np.count_nonzero(g.reshape(len(g), -1), axis=1)
    if np.any(count != (n + 1) * (n + 2)):
        raise AssertionError("shuffle produced the wrong number of dominoes")
    return g


def horizontal_probability(a) -> float:
    a = float(a)
    return 1.0 / (1.0 + a * a)


def make_rng(seed) -> np.random.Generator:
    """Counter-based (Philox) generator; ``seed`` may already be a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def shuffle_step(T: AztecTiling, a, rng) -> AztecTiling:
    """Grow a tiling of A_N into a tiling of A_{N+1} with vertical weight a."""
    rng = make_rng(rng)
    out = shuffle_grids(T.grid[None], horizontal_probability(a), rng)[0]
    return AztecTiling(T.N + 1, out)


def empty_tiling() -> AztecTiling:
    return AztecTiling(0, np.zeros((0, 0), dtype=np.int8))


def sample_aztec(N: int, a=1, seed=0) -> AztecTiling:
    """Random tiling of A_N with P(T) proportional to a**(number of vertical dominoes)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if float(a) <= 0:
        raise ValueError("a must be positive")
    return AztecTiling(N, sample_aztec_batch(N, a, 1, seed)[0])


def sample_aztec_batch(N: int, a, samples: int, seed=0) -> np.ndarray:
    """Anchor grids of ``samples`` independent tilings, shape (samples, 2N, 2N)."""
    rng = make_rng(seed)
    g = np.zeros((samples, 0, 0), dtype=np.int8)
    hp = horizontal_probability(a)
    for _ in range(N):
        g = shuffle_grids(g, hp, rng)
    return g


# ---------------------------------------------------------------------------
# Weighted shuffling (arbitrary cell-edge weights)


def cell_weights_from_columns(N: int, alpha: Sequence, beta: Sequence, exact: bool = True) -> np.ndarray:
    """Edge weights on the N**2 cells of A_N from line-ensemble column weights.

    West dominoes (vertical line steps) in line-time column ``s`` get weight
    ``alpha[s]``, East dominoes (down steps) get ``beta[s]``; North and South
    get 1.  Returns an array of shape (2N, 2N, 4) holding
    (north, south, west, east) weights at each cell anchor and 1 elsewhere
    (Fractions when ``exact``, floats otherwise).
    """
    conv = as_fraction if exact else float
    w = np.full((2 * N, 2 * N, 4), conv(1), dtype=object if exact else float)
    anchors = cell_anchor_mask(N)
    i, j = np.nonzero(anchors)
    s = (i + j + 1 - N) // 2
    w[i, j, 2] = np.array([conv(alpha[t]) for t in s], dtype=w.dtype)
    w[i, j, 3] = np.array([conv(beta[t]) for t in s], dtype=w.dtype)
    return w


@lru_cache(maxsize=64)
def cell_anchor_mask(N: int) -> np.ndarray:
    """Boolean (2N, 2N) mask of the anchors of the N**2 cells of A_N."""
    mask = inside_mask(N)
    out = np.zeros_like(mask)
    out[:-1, :-1] = _anchor_parity(N) & mask[:-1, :-1] & mask[1:, 1:] & mask[:-1, 1:] & mask[1:, :-1]
    out.setflags(write=False)
    return out


def cell_anchors(N: int) -> list[tuple[int, int]]:
    """Anchors of the N**2 cells of A_N."""
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(cell_anchor_mask(N)))]


def reduce_weights(w: np.ndarray) -> np.ndarray:
    """Urban-renewal reduction of cell weights from A_n to A_{n-1}.

    Each cell's weights are divided by ``north*south + west*east``; the cell
    of A_{n-1} sitting between four cells of A_n inherits its North weight from
    the cell above it, South from below, West from the left, East from the right.
    Works on Fraction (object) and float arrays alike.
    """
    H = w.shape[0]
    d = w[..., 0] * w[..., 1] + w[..., 2] * w[..., 3]
    d = np.where(cell_anchor_mask(H // 2), d, 1)
    scaled = w / d[..., None]
    out = np.empty((H - 2, H - 2, 4), dtype=w.dtype)
    out[..., 0] = scaled[0 : H - 2, 1 : H - 1, 0]
    out[..., 1] = scaled[2:H, 1 : H - 1, 1]
    out[..., 2] = scaled[1 : H - 1, 0 : H - 2, 2]
    out[..., 3] = scaled[1 : H - 1, 2:H, 3]
    out[~cell_anchor_mask(H // 2 - 1)] = 1
    return out


def weight_tower(w: np.ndarray) -> list[np.ndarray]:
    """Cell weights for A_1, ..., A_N (index n-1 holds A_n)."""
    levels = [w]
    while levels[-1].shape[0] > 2:
        levels.append(reduce_weights(levels[-1]))
    return levels[::-1]


def creation_probabilities(levels: list[np.ndarray]) -> list[np.ndarray]:
    """Probability of a horizontal fill at each cell anchor, per level."""
    out = []
    for w in levels:
        ns = w[..., 0] * w[..., 1]
        hp = (ns / (ns + w[..., 2] * w[..., 3])).astype(float)
        if not np.all(np.isfinite(hp)):
            raise OverflowError("fill odds overflow; use exact weights or q closer to 1")
        out.append(hp)
    return out


def q_column_weights(N: int, a, q) -> tuple[list[Fraction], list[Fraction]]:
    """LGV column weights for the a**v q**rank measure on A_N."""
    a, q = as_fraction(a), as_fraction(q)
    alpha = [a * a * q ** (2 * N - 2 * s) for s in range(N)]
    beta = [q ** -(2 * N - 2 * s - 1) for s in range(N)]
    return alpha, beta


def weighted_shuffle_step_q(T: AztecTiling, a, q, rng, target: int | None = None) -> AztecTiling:
    """One step of the (a, q) shuffle, growing T from A_n to A_{n+1}.

    The fill odds at level n+1 depend on the final size of the diamond, given
    by ``target`` (default n+1, i.e. this is the last step).
    """
    target = T.N + 1 if target is None else target
    if not T.N < target:
        raise ValueError("target must exceed the current size")
    tables = q_creation_tables(target, a, q)
    rng = make_rng(rng)
    return AztecTiling(T.N + 1, shuffle_grids(T.grid[None], tables[T.N], rng)[0])


@lru_cache(maxsize=16)
def _q_tables(N: int, a: Fraction, q: Fraction, exact: bool) -> tuple[np.ndarray, ...]:
    alpha, beta = q_column_weights(N, a, q)
    return tuple(creation_probabilities(weight_tower(cell_weights_from_columns(N, alpha, beta, exact))))


def q_creation_tables(N: int, a, q) -> list[np.ndarray]:
    """Horizontal-fill probabilities for the steps building A_1, ..., A_N.

    Exact rational reduction is used up to N = 24, floats beyond.
    """
    return list(_q_tables(N, as_fraction(a), as_fraction(q), N <= 24))


def sample_aztec_q(N: int, a=1, q=1, seed=0, samples: int | None = None):
    """Sample from P(T) proportional to a**v(T) q**r(T).

    Returns one tiling, or an anchor-grid batch when ``samples`` is given.
    """
    tables = q_creation_tables(N, a, q)
    rng = make_rng(seed)
    g = np.zeros((samples or 1, 0, 0), dtype=np.int8)
    for n in range(1, N + 1):
        g = shuffle_grids(g, tables[n - 1], rng)
    if samples is None:
        return AztecTiling(N, g[0])
    return g


# ---------------------------------------------------------------------------
# Tiling <-> particle arrays / line ensembles


def tiling_to_particles(T: AztecTiling) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Particle arrays (x^1..x^N, y^2..y^N) read off the line picture."""
    N = T.N
    roles = T.roles()
    ii, jj = np.indices(roles.shape)
    diag = ii + jj
    heights = N - 1 - ii
    post = (roles == SL) | (roles == ET)
    pre = (roles == SR) | (roles == EB)
    xs, ys = [], []
    for k in range(1, N + 1):
        xk = np.sort(heights[post & (diag == N + 2 * k - 2)])
        if len(xk) != k:
            raise BijectionError(f"level {k} has {len(xk)} particles")
        xs.append(tuple(int(v) for v in xk))
        if k < N:
            yk = np.sort(heights[pre & (diag == N + 2 * k - 1)])
            if len(yk) != k:
                raise BijectionError(f"y-level {k + 1} has {len(yk)} particles")
            ys.append(tuple(int(v) for v in yk))
    return xs, ys


def particles_to_tiling(xs: Sequence[Sequence[int]], ys: Sequence[Sequence[int]]) -> AztecTiling:
    """Inverse of :func:`tiling_to_particles`."""
    N = len(xs)
    grid = np.zeros((2 * N, 2 * N), dtype=np.int8)
    mask = inside_mask(N)
    covered = np.zeros((2 * N, 2 * N), dtype=bool)

    def put(code, i, j, horiz):
        cells = [(i, j), (i, j + 1)] if horiz else [(i, j), (i + 1, j)]
        for r, c in cells:
            if not (0 <= r < 2 * N and 0 <= c < 2 * N) or not mask[r, c] or covered[r, c]:
                raise BijectionError(f"domino {TYPE_NAMES[code]} at {(i, j)} does not fit")
            covered[r, c] = True
        grid[i, j] = code

    for k in range(1, N + 1):
        s = k - 1
        pre = sorted([-k] + list(ys[k - 2] if k >= 2 else ()))
        post = sorted(xs[k - 1])
        nxt = sorted(ys[k - 1]) if k < N else list(range(-N, 0))
        if len(post) != k or len(pre) != k or len(nxt) != k:
            raise BijectionError(f"inconsistent sizes at level {k}")
        for h0, h1, h2 in zip(pre, post, nxt):
            if h1 < h0 or h1 - h2 not in (0, 1):
                raise BijectionError(f"invalid moves {h0}->{h1}->{h2} at level {k}")
            for h in range(h0, h1):
                ib = N - 1 - h
                put(WEST, ib - 1, N + 2 * s - ib, False)
            i = N - 1 - h1
            put(SOUTH if h2 == h1 else EAST, i, N + 2 * s - i, h2 == h1)
    color = color_grid(N)
    rest = mask & ~covered
    for i, j in zip(*np.nonzero(rest & (color == 1))):
        put(NORTH, int(i), int(j), True)
    if (mask & ~covered).any():
        raise BijectionError("uncovered cells remain")
    return AztecTiling(N, grid)


@dataclass(frozen=True, eq=False)
class LineEnsemble:
    """Heights of N lines at line-times 0..2N (row 0 is the top line).

    Odd time ``2k - 1`` carries ``x^k`` on the top ``k`` lines, even time
    ``2k`` carries ``y^{k+1}``; every other entry is the flat height ``-m``.
    """

    heights: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.heights, dtype=np.int64)
        h.setflags(write=False)
        object.__setattr__(self, "heights", h)

    @property
    def N(self) -> int:
        return self.heights.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, LineEnsemble) and np.array_equal(self.heights, other.heights)

    def __hash__(self) -> int:
        return hash(self.heights.tobytes())

    def key(self) -> bytes:
        return self.heights.tobytes()

    def validate(self) -> None:
        h = self.heights
        N = self.N
        flat = -np.arange(1, N + 1)
        if not (np.array_equal(h[:, 0], flat) and np.array_equal(h[:, -1], flat)):
            raise BijectionError("lines must start and end at -1, ..., -N")
        if np.any(h[:-1] <= h[1:]):
            raise BijectionError("lines intersect")
        up = h[:, 1::2] - h[:, 0:-1:2]
        down = h[:, 1::2] - h[:, 2::2]
        if np.any(up < 0) or np.any((down != 0) & (down != 1)):
            raise BijectionError("steps leave the LGV graph")

    def particles(self) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
        N = self.N
        xs = [tuple(sorted(int(v) for v in self.heights[:k, 2 * k - 1])) for k in range(1, N + 1)]
        ys = [tuple(sorted(int(v) for v in self.heights[:k, 2 * k])) for k in range(1, N)]
        return xs, ys

    @classmethod
    def from_particles(cls, xs, ys) -> "LineEnsemble":
        N = len(xs)
        h = np.tile(-np.arange(1, N + 1)[:, None], (1, 2 * N + 1))
        for k in range(1, N + 1):
            h[:k, 2 * k - 1] = sorted(xs[k - 1], reverse=True)
            if k < N:
                h[:k, 2 * k] = sorted(ys[k - 1], reverse=True)
        return cls(h)

    def edge_weight(self, alpha: Sequence, beta: Sequence):
        """Product of LGV edge weights; column k uses alpha[k-1], beta[k-1]."""
        h = self.heights
        up = h[:, 1::2] - h[:, 0:-1:2]
        down = h[:, 1::2] - h[:, 2::2]
        w = Fraction(1)
        for k in range(self.N):
            w *= as_fraction(alpha[k]) ** int(up[:, k].sum()) * as_fraction(beta[k]) ** int(down[:, k].sum())
        return w

    def area(self) -> int:
        """Weighted displacement from the flat ensemble (the rank)."""
        h = self.heights
        N = self.N
        up = h[:, 1::2] - h[:, 0:-1:2]
        down = h[:, 1::2] - h[:, 2::2]
        k = np.arange(1, N + 1)
        return int((up.sum(axis=0) * (2 * N - 2 * k + 2)).sum() - (down.sum(axis=0) * (2 * N - 2 * k + 1)).sum())


def tiling_to_lines(T: AztecTiling) -> LineEnsemble:
    return LineEnsemble.from_particles(*tiling_to_particles(T))


def lines_to_tiling(L: LineEnsemble) -> AztecTiling:
    L.validate()
    return particles_to_tiling(*L.particles())


def tiling_weight(T: AztecTiling, a) -> Fraction:
    """a ** (number of vertical dominoes)."""
    return as_fraction(a) ** T.vertical_count()


def rank(T: AztecTiling) -> int:
    """Number of elementary 2x2 moves separating T from the all-horizontal tiling."""
    return tiling_to_lines(T).area()


# ---------------------------------------------------------------------------
# Induced dynamics on lines


def _line_frame(L: LineEnsemble) -> tuple[np.ndarray, list[tuple[int, int, int, int]]]:
    """Deterministic part of a line step plus the free binary choices.

    Returns the size-(n+1) height array with every post-vertical entry at its
    lowest admissible value, and ``(k, j, lo, hi)`` for each line ``j`` at
    column ``k`` that may still rise from ``lo`` to ``hi = lo + 1``.
    """
    n = L.N
    old = L.heights
    N = n + 1
    h = np.tile(-np.arange(1, N + 1)[:, None], (1, 2 * N + 1))
    # the new top-n lines at time 2k are the old heights at time 2k - 1
    h[:n, 2 : 2 * n + 1 : 2] = old[:, 1 : 2 * n : 2]
    free = []
    for k in range(1, N + 1):
        pre = h[:k, 2 * k - 2].copy()
        pre[k - 1] = -k
        nxt = h[:k, 2 * k]
        for j in range(k):
            # post >= pre, below the pre height of the line above, next in {post, post - 1}
            lo = max(pre[j], nxt[j])
            hi = min(nxt[j] + 1, pre[j - 1] - 1) if j > 0 else nxt[j] + 1
            if lo > hi:
                raise AssertionError("line dynamics left the state space")
            h[j, 2 * k - 1] = lo
            if hi > lo:
                free.append((k, j, int(lo), int(hi)))
    return h, free


def line_shuffle_step(L: LineEnsemble, a, rng) -> LineEnsemble:
    """Grow a size-n line ensemble to size n+1 by the induced shuffling moves.

    Even times copy the height at the previous odd time (deterministic part);
    then at each odd time every line that can be extended vertically by one
    unit without touching the line above does so with probability
    a**2 / (1 + a**2).
    """
    rng = make_rng(rng)
    a = float(a)
    p = a * a / (1 + a * a)
    h, free = _line_frame(L)
    up = rng.random(len(free)) < p
    for (k, j, lo, hi), move in zip(free, up):
        if move:
            h[j, 2 * k - 1] = hi
    return LineEnsemble(h)


def line_shuffle_law(L: LineEnsemble, a) -> dict[LineEnsemble, Fraction]:
    """Exact one-step law of :func:`line_shuffle_step`."""
    a2 = as_fraction(a) ** 2
    p = a2 / (1 + a2)
    h, free = _line_frame(L)
    out: dict[LineEnsemble, Fraction] = {}
    for bits in itertools.product((0, 1), repeat=len(free)):
        g = h.copy()
        w = Fraction(1)
        for (k, j, lo, hi), bit in zip(free, bits):
            g[j, 2 * k - 1] = hi if bit else lo
            w *= p if bit else 1 - p
        key = LineEnsemble(g)
        out[key] = out.get(key, 0) + w
    return out


def shuffle_law(T: AztecTiling, a) -> dict[AztecTiling, Fraction]:
    """Exact one-step law of :func:`shuffle_step` (enumerates the block fills)."""
    a2 = as_fraction(a) ** 2
    ph = 1 / (1 + a2)
    g = np.array(T.grid[None], dtype=np.int8)
    n = T.N + 1
    _destroy(g)
    g = _slide(g)
    empty = (_occupancy(g) == 0) & inside_mask(n)
    _, bi, bj = _block_anchors(empty, n)
    out: dict[AztecTiling, Fraction] = {}
    for bits in itertools.product((0, 1), repeat=len(bi)):
        h = g[0].copy()
        w = Fraction(1)
        for i, j, horiz in zip(bi, bj, bits):
            if horiz:
                h[i, j], h[i + 1, j] = NORTH, SOUTH
            else:
                h[i, j], h[i, j + 1] = WEST, EAST
            w *= ph if horiz else 1 - ph
        key = AztecTiling(n, h)
        out[key] = out.get(key, 0) + w
    return out
