"""Random tilings of the Tower as perfect matchings of a bipartite graph.

The graph is built from the line-ensemble picture.  Each block ``k`` of line
time has two columns of lattice nodes: ``A(k, h)`` with vertical edges of
weight alpha (before the y-particles) and ``B(k, h)`` with vertical edges of
weight alpha~ (after them).  From ``B(k, h)`` a line continues to
``A(k + 1, h)`` (weight 1) or ``A(k + 1, h - 1)`` (weight beta).  Every node is
split into an ``in`` (white) and ``out`` (black) vertex joined by an *empty*
edge; a perfect matching then is the same thing as a family of vertex-disjoint
lines, the empty edges marking unvisited nodes.

The faces of this graph are hexagons (one per ``(k, h)`` with both columns
present) and squares (around each beta step), so that the size-1 graph is a
hexagon with two squares attached.

Domino classes (edge kinds), with their weights:

==========  ==============================  ========
kind        edge                            weight
==========  ==============================  ========
red-a       in_A(k,h) - out_A(k,h)          1
red-b       in_B(k,h) - out_B(k,h)          1
blue-a      out_A(k,h) - in_A(k,h+1)        alpha
blue-b      out_B(k,h) - in_B(k,h+1)        alpha~
black       out_A(k,h) - in_B(k,h)          1
yellow      out_B(k,h) - in_A(k+1,h)        1
green       out_B(k,h) - in_A(k+1,h-1)      beta
==========  ==============================  ========

Line ``2k-1`` starts at ``A(k, -(2k-1))`` and line ``2k`` at ``B(k, -2k)``
(these source nodes only have an ``out`` vertex); all lines end at
``A(N+1, -j)`` (``in`` vertex only).  Heights of the lines at line-times
``3k-3, 3k-2, 3k-1`` are the particle levels ``z^k, y^k, x^k``.
"""
from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
import numpy as np

from ._exact import as_fraction, det
from .aztec import make_rng
from .dynamics import TowerState, tower_jump_probabilities, update_law
from .gt import interlacing_det, packed
from .kernels import Symbol

KINDS = ("red-a", "red-b", "blue-a", "blue-b", "black", "yellow", "green")


class DecompositionError(RuntimeError):
    """A shuffle produced a piece outside the known catalogue."""


@dataclass(frozen=True)
class TowerGraph:
    """Bipartite graph of the Tower of size N.

    Vertices are tuples ``(side, column, k, h)`` with side ``"in"``/``"out"``
    and column ``"A"``/``"B"``.  Edges are ``(white, black, kind)`` with the
    ``in`` vertex first.
    """

    N: int
    vertices: tuple
    edges: tuple

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict:
        return {(w, b): i for i, (w, b, _) in enumerate(self.edges)}

    def hexagons(self) -> list[tuple[int, int]]:
        """(k, h) of every hexagonal face."""
        have = set(self.vertices)
        out = []
        for k in range(1, self.N + 1):
            for h in range(-2 * k, self.N):
                ring = [
                    ("out", "A", k, h),
                    ("in", "A", k, h + 1),
                    ("out", "A", k, h + 1),
                    ("in", "B", k, h + 1),
                    ("out", "B", k, h),
                    ("in", "B", k, h),
                ]
                if all(v in have for v in ring):
                    out.append((k, h))
        return out

    def squares(self) -> list[tuple[str, int, int]]:
        """Square faces around the beta steps: ('upper'|'lower', k, h)."""
        have = set(self.vertices)
        out = []
        for k in range(1, self.N + 1):
            for h in range(-2 * k - 1, self.N):
                lower = [("out", "B", k, h), ("in", "A", k + 1, h), ("out", "B", k, h + 1), ("in", "B", k, h + 1)]
                upper = [("in", "A", k + 1, h), ("out", "A", k + 1, h), ("in", "A", k + 1, h + 1), ("out", "B", k, h + 1)]
                if all(v in have for v in lower):
                    out.append(("lower", k, h))
                if all(v in have for v in upper):
                    out.append(("upper", k, h))
        return out

    def is_connected(self) -> bool:
        adj: dict = {v: [] for v in self.vertices}
        for w, b, _ in self.edges:
            adj[w].append(b)
            adj[b].append(w)
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            for u in adj[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.vertices)

    def is_bipartite(self) -> bool:
        """Every edge joins an in vertex to an out vertex."""
        return all(w[0] == "in" and b[0] == "out" for w, b, _ in self.edges)

    def weight_of(self, kind: str, params) -> Fraction:
        alpha, alpha_t, beta = (as_fraction(v) for v in params)
        return {"blue-a": alpha, "blue-b": alpha_t, "green": beta}.get(kind, Fraction(1))


def _columns(N: int):
    """Height ranges of the A and B columns of each block."""
    for k in range(1, N + 1):
        yield k, range(-(2 * k - 1), N - k + 1), range(-2 * k, N - k + 1)


@lru_cache(maxsize=16)
def build_tower(N: int) -> TowerGraph:
    """The matching graph of the Tower of size N (nodes on some source-to-sink path)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    verts = []
    for k, arange, brange in _columns(N):
        for h in arange:
            if h != -(2 * k - 1):
                verts.append(("in", "A", k, h))
            verts.append(("out", "A", k, h))
        for h in brange:
            if h != -2 * k:
                verts.append(("in", "B", k, h))
            verts.append(("out", "B", k, h))
    verts += [("in", "A", N + 1, -j) for j in range(1, 2 * N + 1)]
    have = set(verts)
    edges = []

    def add(w, b, kind):
        if w in have and b in have:
            edges.append((w, b, kind))

    for k, arange, brange in _columns(N):
        for h in arange:
            add(("in", "A", k, h), ("out", "A", k, h), "red-a")
            add(("in", "A", k, h + 1), ("out", "A", k, h), "blue-a")
            add(("in", "B", k, h), ("out", "A", k, h), "black")
        for h in brange:
            add(("in", "B", k, h), ("out", "B", k, h), "red-b")
            add(("in", "B", k, h + 1), ("out", "B", k, h), "blue-b")
            add(("in", "A", k + 1, h), ("out", "B", k, h), "yellow")
            add(("in", "A", k + 1, h - 1), ("out", "B", k, h), "green")
    return TowerGraph(N, tuple(verts), tuple(edges))


def expected_hexagons(N: int) -> int:
    return (3 * N - 1) * N // 2


# ---------------------------------------------------------------------------
# States, lines and matchings


def _block_paths(state: TowerState):
    """Per block k and line j (0 = top): (entry height or None for a source, y, x, next)."""
    N = state.N
    for k in range(1, N + 1):
        z = sorted(state.z[k - 2], reverse=True) if k >= 2 else []
        y = sorted(state.y[k - 1], reverse=True)
        x = sorted(state.x[k - 1], reverse=True)
        nxt = sorted(state.z[k - 1], reverse=True) if k < N else [-j for j in range(1, 2 * N + 1)][: 2 * k]
        for j in range(2 * k):
            entry = z[j] if j < 2 * k - 2 else None
            yj = y[j] if j < 2 * k - 1 else None
            yield k, j, entry, yj, x[j], nxt[j]


def state_to_edges(state: TowerState) -> frozenset:
    """Dominoes (white, black, kind) of the matching encoding a tower state."""
    N = state.N
    graph = build_tower(N)
    used = set()
    visited = set()
    for k, j, entry, y, x, nxt in _block_paths(state):
        if y is not None:
            start = entry if entry is not None else -(2 * k - 1)
            if entry is None and start != (-(2 * k - 1)):
                raise ValueError("bad source")
            for h in range(start, y):
                used.add((("in", "A", k, h + 1), ("out", "A", k, h), "blue-a"))
            for h in range(start, y + 1):
                visited.add(("A", k, h))
            used.add((("in", "B", k, y), ("out", "A", k, y), "black"))
            bstart = y
        else:
            bstart = -2 * k
        for h in range(bstart, x):
            used.add((("in", "B", k, h + 1), ("out", "B", k, h), "blue-b"))
        for h in range(bstart, x + 1):
            visited.add(("B", k, h))
        if x - nxt == 0:
            used.add((("in", "A", k + 1, x), ("out", "B", k, x), "yellow"))
        elif x - nxt == 1:
            used.add((("in", "A", k + 1, x - 1), ("out", "B", k, x), "green"))
        else:
            raise ValueError(f"line {j} drops by {x - nxt} after block {k}")
    for side, col, k, h in graph.vertices:
        if side == "in" and k <= N and (col, k, h) not in visited:
            used.add((("in", col, k, h), ("out", col, k, h), "red-a" if col == "A" else "red-b"))
    return frozenset(used)


def edges_to_state(N: int, edges) -> TowerState:
    """Follow the lines of a perfect matching from their sources."""
    graph = build_tower(N)
    partner = {}
    for w, b, kind in edges:
        if w in partner or b in partner:
            raise ValueError("vertex covered twice")
        partner[w] = (b, kind)
        partner[b] = (w, kind)
    if len(partner) != len(graph.vertices):
        raise ValueError("matching is not perfect")
    xs, ys, zs = [[None] * 2 * n for n in range(1, N + 1)], [[None] * (2 * n - 1) for n in range(1, N + 1)], []
    zs = [[None] * (2 * n - 2) for n in range(2, N + 1)]
    for line in range(1, 2 * N + 1):
        k0 = (line + 1) // 2
        if line % 2:
            node = ("out", "A", k0, -line)
        else:
            node = ("out", "B", k0, -line)
        k = k0
        while True:
            other, kind = partner[node]
            _, col, kk, h = other
            if kind == "blue-a" or kind == "blue-b":
                node = ("out", col, kk, h)
                continue
            if kind == "black":
                ys[k - 1][line - 1] = h
                node = ("out", "B", kk, h)
                continue
            if kind in ("yellow", "green"):
                xs[k - 1][line - 1] = node[3]
                if kk > N:
                    break
                zs[kk - 2][line - 1] = h
                k = kk
                node = ("out", "A", kk, h)
                continue
            raise ValueError(f"line {line} runs into a {kind} domino")
    state = TowerState(
        tuple(tuple(sorted(v)) for v in xs), tuple(tuple(sorted(v)) for v in ys), tuple(tuple(sorted(v)) for v in zs), N
    )
    state.validate()
    return state


@dataclass(frozen=True, eq=False)
class TowerMatching:
    """A tiling of the Tower of size N, stored as its particle configuration.

    The dominoes (matching edges) are derived on demand; the two views are in
    bijection.
    """

    state: TowerState

    @property
    def N(self) -> int:
        return self.state.N

    def __eq__(self, other) -> bool:
        return isinstance(other, TowerMatching) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def key(self) -> tuple:
        s = self.state
        return (s.x, s.y, s.z)

    @cached_property
    def edges(self) -> frozenset:
        return state_to_edges(self.state)

    def validate(self) -> None:
        self.state.validate()
        graph = build_tower(self.N)
        seen = Counter()
        allowed = set(graph.edges)
        for e in self.edges:
            if e not in allowed:
                raise ValueError(f"{e} is not an edge of the Tower graph")
            seen[e[0]] += 1
            seen[e[1]] += 1
        if len(seen) != len(graph.vertices) or any(c != 1 for c in seen.values()):
            raise ValueError("not a perfect matching")

    def counts(self) -> dict[str, int]:
        c = Counter(kind for _, _, kind in self.edges)
        return {kind: c.get(kind, 0) for kind in KINDS}

    def weight(self, params) -> Fraction:
        """Product of domino weights."""
        alpha, alpha_t, beta = (as_fraction(v) for v in params)
        c = self.counts()
        return alpha ** c["blue-a"] * alpha_t ** c["blue-b"] * beta ** c["green"]

    def to_json(self) -> dict:
        dominoes = [
            {"white": list(w), "black": list(b), "type": kind}
            for w, b, kind in sorted(self.edges, key=lambda e: (e[0][2], e[0][3], e[0][1], e[2]))
        ]
        return {"model": "tower", "N": self.N, "state": self.state.to_json(), "dominoes": dominoes}

    @classmethod
    def from_json(cls, data) -> "TowerMatching":
        if isinstance(data, str):
            data = json.loads(data)
        if data.get("model") != "tower":
            raise ValueError("not a Tower tiling")
        N = int(data["N"])
        if "dominoes" in data:
            edges = [(tuple(d["white"]), tuple(d["black"]), d["type"]) for d in data["dominoes"]]
            return cls(edges_to_state(N, edges))
        return cls(TowerState.from_json(data["state"]))

    @classmethod
    def from_edges(cls, N: int, edges) -> "TowerMatching":
        return cls(edges_to_state(N, edges))


@dataclass(frozen=True, eq=False)
class TowerLines:
    """Heights of the 2N lines at line-times 0..3N (row 0 is the top line)."""

    heights: np.ndarray

    def __eq__(self, other) -> bool:
        return isinstance(other, TowerLines) and np.array_equal(self.heights, other.heights)

    def __hash__(self) -> int:
        return hash(self.heights.tobytes())

    @property
    def N(self) -> int:
        return self.heights.shape[0] // 2

    def validate(self) -> None:
        h = self.heights
        flat = -np.arange(1, h.shape[0] + 1)
        if not (np.array_equal(h[:, 0], flat) and np.array_equal(h[:, -1], flat)):
            raise ValueError("lines must start and end flat")
        if np.any(h[:-1] <= h[1:]):
            raise ValueError("lines intersect")
        if np.any(h[:, 1::3] < h[:, 0:-1:3]) or np.any(h[:, 2::3] < h[:, 1::3]):
            raise ValueError("vertical steps must go up")
        drop = h[:, 2::3] - h[:, 3::3]
        if np.any((drop != 0) & (drop != 1)):
            raise ValueError("beta steps drop by 0 or 1")

    def edge_weight(self, params) -> Fraction:
        alpha, alpha_t, beta = (as_fraction(v) for v in params)
        h = self.heights
        ups_a = int((h[:, 1::3] - h[:, 0:-1:3]).sum())
        ups_b = int((h[:, 2::3] - h[:, 1::3]).sum())
        drops = int((h[:, 2::3] - h[:, 3::3]).sum())
        return alpha**ups_a * alpha_t**ups_b * beta**drops


def tower_to_lines(M: TowerMatching | TowerState) -> TowerLines:
    """Line ensemble of a tower tiling: z^k, y^k, x^k at times 3k-3, 3k-2, 3k-1."""
    state = M.state if isinstance(M, TowerMatching) else M
    N = state.N
    h = np.tile(-np.arange(1, 2 * N + 1)[:, None], (1, 3 * N + 1))
    for k in range(1, N + 1):
        if k >= 2:
            h[: 2 * k - 2, 3 * k - 3] = sorted(state.z[k - 2], reverse=True)
        h[: 2 * k - 1, 3 * k - 2] = sorted(state.y[k - 1], reverse=True)
        h[: 2 * k, 3 * k - 1] = sorted(state.x[k - 1], reverse=True)
    L = TowerLines(h)
    L.validate()
    return L


def lines_to_tower(L: TowerLines) -> TowerMatching:
    L.validate()
    N = L.N
    h = L.heights
    xs = tuple(tuple(sorted(int(v) for v in h[: 2 * k, 3 * k - 1])) for k in range(1, N + 1))
    ys = tuple(tuple(sorted(int(v) for v in h[: 2 * k - 1, 3 * k - 2])) for k in range(1, N + 1))
    zs = tuple(tuple(sorted(int(v) for v in h[: 2 * k - 2, 3 * k - 3])) for k in range(2, N + 1))
    state = TowerState(xs, ys, zs, N)
    state.validate()
    return TowerMatching(state)


# ---------------------------------------------------------------------------
# Enumeration


def enumerate_matchings(graph: TowerGraph, limit: int = 200_000) -> list[frozenset]:
    """All perfect matchings of the graph by backtracking on white vertices."""
    whites = [v for v in graph.vertices if v[0] == "in"]
    blacks = [v for v in graph.vertices if v[0] == "out"]
    if len(whites) != len(blacks):
        return []
    adj: dict = {w: [] for w in whites}
    for w, b, kind in graph.edges:
        adj[w].append((b, kind))
    # visit the most constrained vertices first
    whites.sort(key=lambda w: (len(adj[w]), w[2], w[3]))
    taken = set()
    chosen = []
    out = []

    def rec(i):
        if len(out) > limit:
            raise RuntimeError("too many matchings")
        if i == len(whites):
            out.append(frozenset(chosen))
            return
        w = whites[i]
        for b, kind in adj[w]:
            if b not in taken:
                taken.add(b)
                chosen.append((w, b, kind))
                rec(i + 1)
                chosen.pop()
                taken.discard(b)

    rec(0)
    return out


def tower_measure(N: int, params) -> dict[TowerMatching, Fraction]:
    """Exact law proportional to the product of domino weights (enumeration, small N)."""
    graph = build_tower(N)
    weights = {}
    for m in enumerate_matchings(graph):
        M = TowerMatching.from_edges(N, m)
        weights[M] = M.weight(params)
    z = sum(weights.values())
    return {M: w / z for M, w in weights.items() if w}


# ---------------------------------------------------------------------------
# Shuffling


def _slide(M: TowerMatching | None, N_new: int) -> TowerState:
    """Deterministic part of a step: the size-N configuration placed in the size-(N+1) frame.

    x^n and y^n keep their positions, z^{n+1} takes the old x^n, and the new
    top level starts packed.
    """
    if M is None:
        return TowerState.packed(N_new)
    s = M.state
    pk = TowerState.packed(N_new)
    return TowerState(s.x + (pk.x[-1],), s.y + (pk.y[-1],), tuple(s.x), N_new - 1)


@dataclass
class Piece:
    """One independent random choice: a free y-particle with the x-particles it couples to, or a lone x."""

    level: int
    y: int | None
    xs: tuple[int, ...]

    @property
    def kind(self) -> str:
        if self.y is None:
            return "square"
        if len(self.xs) == 1:
            return "hexagon+square-" + ("below" if self.xs[0] == self.y else "above")
        return {0: "hexagon", 2: "basic-bloc"}.get(len(self.xs), f"y+{len(self.xs)}x")


def decompose(y_old, z_new, x_old, py, px) -> list[Piece]:
    """Pieces of one level: couple each free y-particle to x-particles whose options depend on it."""
    y_opts = [opts for opts in _options(y_old, z_new)]
    free_y = [i for i, o in enumerate(y_opts) if len(o) == 2] if py not in (0, 1) else []
    pieces: dict[int, Piece] = {i: Piece(0, i, ()) for i in free_y}
    lone = []
    for j, xj in enumerate(x_old):
        # a jump of y_{j-1} from x_j pushes x_j; a jump of y_j from x_j + 1 unblocks it
        deps = [i for i in (j - 1, j) if i in pieces and y_old[i] == xj + (i - j + 1)]
        if len(deps) > 1:
            raise DecompositionError(f"x-particle {j} couples to {len(deps)} free y-particles")
        if deps:
            i = deps[0]
            pieces[i] = Piece(0, i, pieces[i].xs + (j,))
        else:
            y = [o[0] for o in y_opts]
            if len(_options_one(x_old, y, j)) == 2 and px not in (0, 1):
                lone.append(Piece(0, None, (j,)))
    return list(pieces.values()) + lone


def _options(x, y) -> list[tuple[int, ...]]:
    from .dynamics import admissible_moves

    return admissible_moves(x, y)


def _options_one(x, y, j) -> tuple[int, ...]:
    xj = x[j]
    opts = []
    for v in (xj, xj + 1):
        if j > 0 and v < y[j - 1]:
            continue
        if j < len(y) and v >= y[j]:
            continue
        opts.append(v)
    return tuple(opts)


def _level_law(y_old, z_new, x_old, py, px) -> dict:
    """Exact joint law of (y', x') of one level."""
    out = {}
    for y, qy in update_law(y_old, z_new, py).items():
        for x, qx in update_law(x_old, y, px).items():
            out[(y, x)] = out.get((y, x), 0) + qy * qx
    return out


def tower_shuffle_step(M: TowerMatching | None, params, rng, catalogue: Counter | None = None) -> TowerMatching:
    """Grow a tiling of the Tower of size N into one of size N+1.

    The slide fixes z (copies of the old x) and the old y, x positions; the
    remaining randomness splits into independent pieces per level.  Each piece
    is filled by exact enumeration of its admissible configurations, weighted
    by the jump odds alpha*beta (y) and alpha~*beta (x).
    """
    rng = make_rng(rng)
    N_new = 1 if M is None else M.N + 1
    s = _slide(M, N_new)
    py, px = tower_jump_probabilities(params)
    new_x, new_y = [], []
    for n in range(1, N_new + 1):
        z = s.z[n - 2] if n >= 2 else None
        pieces = decompose(s.y[n - 1], z, s.x[n - 1], py, px)
        if catalogue is not None:
            catalogue.update(p.kind for p in pieces)
        y = [o[0] for o in _options(s.y[n - 1], z)]
        x_choice: dict[int, int] = {}
        for piece in pieces:
            law = _piece_law(piece, s.y[n - 1], z, s.x[n - 1], py, px)
            keys = list(law)
            probs = np.array([float(law[k]) for k in keys])
            pick = keys[rng.choice(len(keys), p=probs / probs.sum())]
            if piece.y is not None:
                y[piece.y] = pick[0]
            for j, v in zip(piece.xs, pick[1]):
                x_choice[j] = v
        x = []
        for j in range(len(s.x[n - 1])):
            if j in x_choice:
                x.append(x_choice[j])
            else:
                x.append(_options_one(s.x[n - 1], y, j)[0])
        new_y.append(tuple(y))
        new_x.append(tuple(x))
    state = TowerState(tuple(new_x), tuple(new_y), s.z, N_new)
    state.validate()
    return TowerMatching(state)


def _piece_law(piece: Piece, y_old, z, x_old, py, px) -> dict:
    """Joint law of a piece: keys (y value or None, tuple of x values)."""
    py, px = as_fraction(py), as_fraction(px)
    base = [o[0] for o in _options(y_old, z)]
    out = {}
    y_choices = _options(y_old, z)[piece.y] if piece.y is not None else (None,)
    for yv in y_choices:
        wy = Fraction(1)
        y = list(base)
        if piece.y is not None:
            y[piece.y] = yv
            wy = py if yv == y_old[piece.y] + 1 else 1 - py
        per_x = []
        for j in piece.xs:
            opts = _options_one(x_old, y, j)
            if len(opts) == 1:
                per_x.append(((opts[0], Fraction(1)),))
            else:
                per_x.append(((opts[0], 1 - px), (opts[1], px)))
        for combo in itertools.product(*per_x):
            w = wy
            for _, q in combo:
                w *= q
            if w:
                key = (yv, tuple(v for v, _ in combo))
                out[key] = out.get(key, 0) + w
    return out


def tower_shuffle_law(M: TowerMatching | None, params) -> dict[TowerMatching, Fraction]:
    """Exact one-step law of :func:`tower_shuffle_step` (product over levels)."""
    N_new = 1 if M is None else M.N + 1
    s = _slide(M, N_new)
    py, px = tower_jump_probabilities(params)
    laws = [
        _level_law(s.y[n - 1], s.z[n - 2] if n >= 2 else None, s.x[n - 1], py, px) for n in range(1, N_new + 1)
    ]
    out = {}
    for combo in itertools.product(*(law.items() for law in laws)):
        w = Fraction(1)
        for _, q in combo:
            w *= q
        state = TowerState(tuple(c[0][1] for c in combo), tuple(c[0][0] for c in combo), s.z, N_new)
        out[TowerMatching(state)] = out.get(TowerMatching(state), 0) + w
    return out


def sample_tower(N: int, alpha=1, alpha_t=1, beta=1, seed=0) -> TowerMatching:
    """Random Tower tiling of size N with law proportional to the domino weights.

    Runs the same N growth steps as :func:`tower_shuffle_step` with the pieces
    filled level-wise in vectorized form (y-particles first, then x-particles
    given the new y), which is the same joint law.
    """
    return sample_tower_batch(N, alpha, alpha_t, beta, 1, seed)[0]


def sample_tower_batch(N: int, alpha=1, alpha_t=1, beta=1, samples: int = 1, seed=0) -> list[TowerMatching]:
    """``samples`` independent Tower tilings, grown together."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if min(float(alpha), float(alpha_t), float(beta)) < 0:
        raise ValueError("weights must be nonnegative")
    rng = make_rng(seed)
    py, px = (float(p) for p in tower_jump_probabilities((alpha, alpha_t, beta)))
    xs: list[np.ndarray] = []
    ys: list[np.ndarray] = []
    old_x: list[np.ndarray] = []
    for n in range(1, N + 1):
        # slide: previous x become the z of the next level; new top level packed
        old_x = xs
        zs = [None] + xs
        xs = xs + [np.tile(np.arange(-2 * n, 0), (samples, 1))]
        ys = ys + [np.tile(np.arange(-2 * n + 1, 0), (samples, 1))]
        new_x, new_y = [], []
        for m in range(1, n + 1):
            y = _vector_update(ys[m - 1], zs[m - 1], py, rng)
            new_y.append(y)
            new_x.append(_vector_update(xs[m - 1], y, px, rng))
        xs, ys = new_x, new_y
    return [
        TowerMatching(
            TowerState(
                tuple(tuple(x[s].tolist()) for x in xs),
                tuple(tuple(y[s].tolist()) for y in ys),
                tuple(tuple(x[s].tolist()) for x in old_x),
                N,
            )
        )
        for s in range(samples)
    ]


def _vector_update(x: np.ndarray, y: np.ndarray | None, p: float, rng) -> np.ndarray:
    """Constrained Bernoulli jumps along the last axis (see dynamics.constrained_update)."""
    lo_ok = np.ones(x.shape, dtype=bool)  # staying put allowed
    hi_ok = np.ones(x.shape, dtype=bool)  # jumping allowed
    if y is not None and y.shape[-1]:
        # v >= y[j-1] for j >= 1, v < y[j] for j < len(y)
        lo_ok[..., 1:] &= x[..., 1:] >= y
        hi_ok[..., 1:] &= x[..., 1:] + 1 >= y
        lo_ok[..., :-1] &= x[..., :-1] < y
        hi_ok[..., :-1] &= x[..., :-1] + 1 < y
    jump = rng.random(x.shape) < p
    return x + np.where(lo_ok & hi_ok, jump, hi_ok & ~lo_ok).astype(x.dtype)


# ---------------------------------------------------------------------------
# Determinantal weight


def tower_measure_weight(state: TowerState, params, reading: str = "corrected") -> Fraction:
    """Product of determinants times prod F for a size-N Tower configuration.

    Uses ``(1-z)**(2N-i) z**(x+i-1) (1 + beta/z)`` for the top level,
    ``f(d) = [d == 0] + beta [d == 1]`` between x^{n-1} and z^n and the
    interlacing determinants with virtual last variables.  With
    ``reading="corrected"`` the level factor is
    ``F = alpha**(sum y - sum z) * alpha~**(sum x - sum y)`` (alpha on the
    vertical steps before y, alpha~ after); ``reading="printed"`` has the two
    parameters exchanged.
    """
    if reading not in ("corrected", "printed"):
        raise ValueError("reading must be 'corrected' or 'printed'")
    alpha, alpha_t, beta = (as_fraction(v) for v in params)
    if reading == "printed":
        alpha, alpha_t = alpha_t, alpha
    N = state.N
    extra = Symbol.laurent({0: 1, -1: beta})
    xN = state.x[-1]
    sym = [Symbol.binomial(2 * N - i, 1) * extra for i in range(1, 2 * N + 1)]
    w = det([[sym[i - 1].coeff(-xN[j] - i) for j in range(2 * N)] for i in range(1, 2 * N + 1)])
    # reversed row order, which makes the weight positive
    w *= (-1) ** (N * (2 * N - 1))
    for n in range(N, 0, -1):
        w *= interlacing_det(state.x[n - 1], state.y[n - 1])
        if n >= 2:
            w *= interlacing_det(state.y[n - 1], state.z[n - 2])
            x_lower, z = state.x[n - 2], state.z[n - 2]
            w *= det([[_f_tilde(x_lower[i] - z[j], beta) for j in range(2 * n - 2)] for i in range(2 * n - 2)])
        w *= _F(state, n, alpha, alpha_t)
    return w


def _f_tilde(d: int, beta: Fraction) -> Fraction:
    return Fraction(1) if d == 0 else (beta if d == 1 else Fraction(0))


def _F(state: TowerState, n: int, alpha: Fraction, alpha_t: Fraction) -> Fraction:
    sx = sum(state.x[n - 1])
    sy = sum(state.y[n - 1])
    sz = sum(state.z[n - 2]) if n >= 2 else 0
    return alpha ** (sy - sz) * alpha_t ** (sx - sy)


def piece_catalogue(N: int, params, seed=0, runs: int = 1) -> Counter:
    """Counts of piece kinds met while growing ``runs`` tilings up to size N."""
    rng = make_rng(seed)
    cat: Counter = Counter()
    for _ in range(runs):
        M = None
        for _ in range(N):
            M = tower_shuffle_step(M, params, rng, catalogue=cat)
    return cat
