"""Exact ground truth for small systems.

Exhaustive tiling enumeration, exact pushforwards of the particle chains,
the product-form measures they should conserve, the determinantal weights of
the packed initial condition and of the Aztec line ensemble, and distances
between distributions.  Nothing here uses floating point unless the caller
passes floats in.
"""
from __future__ import annotations

import json
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping

import numpy as np

from ._exact import as_fraction, det
from .aztec import (
    EAST,
    NORTH,
    SOUTH,
    WEST,
    AztecTiling,
    color_grid,
    elementary_moves,
    inside_mask,
    rank,
    tiling_to_lines,
)
from .dynamics import ExtendedState, Schedule
from .gt import GTPattern, WeylConfig, interlacing_det, iter_weyl, packed, vandermonde
from .kernels import Symbol, level_kernel, level_kernel_row, markov_link

MAX_TILING_N = 4
MAX_STEPS = 3
MAX_SUPPORT = 200_000


class CostGuardError(RuntimeError):
    """The requested exact computation is beyond the desk-scale guard."""


@dataclass
class MeasureTable:
    """Exact masses on a finite set of hashable states."""

    masses: dict = field(default_factory=dict)

    @classmethod
    def point(cls, state) -> "MeasureTable":
        return cls({state: Fraction(1)})

    @classmethod
    def uniform(cls, states: Iterable) -> "MeasureTable":
        states = list(states)
        return cls({s: Fraction(1, len(states)) for s in states})

    @classmethod
    def from_weights(cls, weights: Mapping) -> "MeasureTable":
        return cls(dict(weights)).normalized()

    @classmethod
    def empirical(cls, samples: Iterable) -> "MeasureTable":
        counts = Counter(samples)
        n = sum(counts.values())
        return cls({s: Fraction(c, n) for s, c in counts.items()})

    def __len__(self) -> int:
        return len(self.masses)

    def __iter__(self):
        return iter(self.masses)

    def __getitem__(self, state):
        return self.masses.get(state, Fraction(0))

    def items(self):
        return self.masses.items()

    def total(self):
        return sum(self.masses.values(), Fraction(0))

    def normalized(self) -> "MeasureTable":
        z = self.total()
        if z == 0:
            raise ZeroDivisionError("measure has zero total mass")
        return MeasureTable({s: m / z for s, m in self.masses.items()})

    def support(self) -> list:
        return [s for s, m in self.masses.items() if m != 0]

    def pruned(self) -> "MeasureTable":
        return MeasureTable({s: m for s, m in self.masses.items() if m != 0})

    def map(self, fn: Callable) -> "MeasureTable":
        """Pushforward under a deterministic map."""
        out: dict = {}
        for s, m in self.masses.items():
            key = fn(s)
            out[key] = out.get(key, 0) + m
        return MeasureTable(out)

    def to_json(self, encode: Callable = repr) -> str:
        rows = sorted((encode(s), str(m)) for s, m in self.masses.items())
        return json.dumps([{"state": s, "mass": m} for s, m in rows])

    def __eq__(self, other) -> bool:
        if not isinstance(other, MeasureTable):
            return NotImplemented
        return self.pruned().masses == other.pruned().masses


# ---------------------------------------------------------------------------
# Tilings


def enumerate_aztec(N: int) -> list[AztecTiling]:
    """All domino tilings of A_N by exhaustive matching of the dual graph."""
    if N > MAX_TILING_N:
        raise CostGuardError(f"enumeration of A_{N} is beyond the N <= {MAX_TILING_N} guard")
    if N < 1:
        raise ValueError("N must be at least 1")
    H = 2 * N
    mask = inside_mask(N)
    color = color_grid(N)
    cells = [tuple(c) for c in np.argwhere(mask)]
    covered = ~mask.copy()
    grid = np.zeros((H, H), dtype=np.int8)
    out = []

    def first_free(start):
        for idx in range(start, len(cells)):
            if not covered[cells[idx]]:
                return idx
        return None

    def rec(start):
        idx = first_free(start)
        if idx is None:
            out.append(AztecTiling(N, grid.copy()))
            return
        i, j = cells[idx]
        for di, dj in ((0, 1), (1, 0)):
            r, c = i + di, j + dj
            if r < H and c < H and not covered[r, c]:
                covered[i, j] = covered[r, c] = True
                if dj:
                    grid[i, j] = NORTH if color[i, j] else SOUTH
                else:
                    grid[i, j] = WEST if color[i, j] else EAST
                rec(idx + 1)
                grid[i, j] = 0
                covered[i, j] = covered[r, c] = False

    rec(0)
    return out


def aztec_measure(N: int, a=1, q=1) -> MeasureTable:
    """Exact law P(T) proportional to a**v(T) * q**r(T)."""
    a, q = as_fraction(a), as_fraction(q)
    return MeasureTable.from_weights({T: a ** T.vertical_count() * q ** rank(T) for T in enumerate_aztec(N)})


def flip_distances(N: int) -> dict[AztecTiling, int]:
    """Breadth-first distance from the all-horizontal tiling in the flip graph."""
    if N > MAX_TILING_N:
        raise CostGuardError(f"flip graph of A_{N} is beyond the guard")
    start = AztecTiling.flat(N)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        T = queue.popleft()
        for U in elementary_moves(T):
            if U not in dist:
                dist[U] = dist[T] + 1
                queue.append(U)
    return dist


# ---------------------------------------------------------------------------
# Pushforwards and conserved product forms


def exact_pushforward(
    initial: MeasureTable, step_law: Callable[[Hashable], Mapping], steps: int, max_steps: int = MAX_STEPS
) -> MeasureTable:
    """Measure after ``steps`` applications of a chain given by its exact one-step law."""
    if steps > max_steps:
        raise CostGuardError(f"{steps} steps exceed the guard of {max_steps}")
    current = dict(initial.masses)
    for _ in range(steps):
        nxt: dict = {}
        for state, m in current.items():
            if m == 0:
                continue
            for new, q in step_law(state).items():
                nxt[new] = nxt.get(new, 0) + m * q
        if len(nxt) > MAX_SUPPORT:
            raise CostGuardError("support grew beyond the guard")
        current = nxt
    return MeasureTable(current)


def evolve_top(mu: Mapping, p, steps: int) -> dict:
    """``mu P_N^steps`` on the top level, with the Bernoulli level kernel."""
    current = dict(mu)
    for _ in range(steps):
        nxt: dict = {}
        for x, m in current.items():
            for y, q in level_kernel_row(x, p).items():
                nxt[y] = nxt.get(y, 0) + m * q
        current = nxt
    return current


def _link_product(state: GTPattern) -> Fraction:
    w = Fraction(1)
    for k in range(state.depth, 1, -1):
        w *= markov_link(state[k], state[k - 1])
    return w


def sequential_product_form(N: int, p, t: int, mu: Mapping | None = None) -> MeasureTable:
    """Right-hand side of the sequential conservation law: (mu P^t)(x^N) * prod Lambda."""
    mu = mu or {packed(N): Fraction(1)}
    top = evolve_top(mu, p, t)
    out = {}
    for xN, m in top.items():
        for pattern in _patterns_below(xN, strict=True):
            out[pattern] = m * _link_product(pattern)
    return MeasureTable(out).pruned()


def delta_kernel(x, lower, p) -> Fraction:
    """(P_n Lambda^n_{n-1})(x, lower) by a finite sum over the middle point."""
    return sum(
        (q * markov_link(y, lower) for y, q in level_kernel_row(x, p).items()),
        Fraction(0),
    )


def parallel_product_form(N: int, p, t: int, mu: Mapping | None = None) -> MeasureTable:
    """mu P^t on the top level times the chain of Delta = P Lambda kernels."""
    mu = mu or {packed(N): Fraction(1)}
    top = evolve_top(mu, p, t)
    out = {}
    for xN, m in top.items():
        for pattern in _patterns_below(xN, strict=False):
            w = m
            for k in range(N, 1, -1):
                w *= delta_kernel(pattern[k], pattern[k - 1], p)
            if w:
                out[pattern] = w
    return MeasureTable(out)


def _patterns_below(top, strict: bool) -> list[GTPattern]:
    from .gt import enumerate_patterns

    if len(top) == 1:
        return [GTPattern((tuple(top),), strict=strict)]
    return enumerate_patterns(top, strict=strict)


def _p_at(schedule: Schedule, level: int, tau: int) -> Fraction:
    return as_fraction(schedule(level, tau))


def _level_step(x, y, p) -> Fraction:
    p = as_fraction(p)
    if p == 0:
        return Fraction(int(tuple(x) == tuple(y)))
    return level_kernel(x, y, p)


def extended_product_form(N: int, schedule: Schedule, t: int, origin: int = 0) -> MeasureTable:
    """Conserved measure of the extended chain at clock ``t`` from the packed state.

    Top level: ``packed P_N(tau_N(0)) ... P_N(tau_N(t-1))``.  Below it the
    factors ``Lambda^k_{k-1}(x^k, y^k) P_{k-1}(tau)(y^k, x^{k-1})`` where
    ``tau`` is the parameter of the step that produced ``x^{k-1}`` from
    ``y^k``.
    """
    top: dict = {packed(N): Fraction(1)}
    for s in range(t):
        p = _p_at(schedule, N, s - (N - 1) + origin)
        nxt: dict = {}
        for x, m in top.items():
            row = {x: Fraction(1)} if p == 0 else level_kernel_row(x, p)
            for y, q in row.items():
                nxt[y] = nxt.get(y, 0) + m * q
        top = nxt
    out: dict = {}

    def rec(k, xk, xs, ys, w):
        # xk is level k; choose y^k and x^{k-1}
        if k == 1:
            key = ExtendedState(tuple(reversed(xs)), tuple(reversed(ys)), t, origin)
            out[key] = out.get(key, 0) + w
            return
        from .gt import enumerate_interlacing

        p = _p_at(schedule, k - 1, t - 1 - (k - 2) + origin)
        for y in enumerate_interlacing(xk):
            wl = w * markov_link(xk, y)
            row = {y: Fraction(1)} if p == 0 else level_kernel_row(y, p)
            for x_lower, q in row.items():
                if q:
                    rec(k - 1, x_lower, xs + [tuple(x_lower)], ys + [tuple(y)], wl * q)

    for xN, m in top.items():
        rec(N, xN, [tuple(xN)], [], m)
    return MeasureTable(out).pruned()


# ---------------------------------------------------------------------------
# Determinantal weights


def psi(i: int, x: int, N: int, extra: Symbol | None = None) -> Fraction:
    """Contour integral of ``(1-z)**(N-i) z**(x+i-1) * extra`` around 0."""
    sym = Symbol.binomial(N - i, 1)
    if extra is not None:
        sym = sym * extra
    # residue of z**(x+i-1) F(z) at 0 is the coefficient of z**(-x-i) in F
    return sym.coeff(-x - i)


def packed_ic_measure(N: int, window: tuple[int, int] | None = None) -> dict[WeylConfig, Fraction]:
    """Delta_N(x) det[Psi_i(x_j)] over a window, normalized to total mass 1."""
    if N > 6:
        raise CostGuardError("packed check limited to N <= 6")
    lo, hi = window or (-N - 3, 3)
    weights = {}
    for x in iter_weyl(N, lo, hi):
        w = vandermonde(x) * det([[psi(i, x[j], N) for j in range(N)] for i in range(1, N + 1)])
        if w:
            weights[x] = w
    z = sum(weights.values())
    return {x: w / z for x, w in weights.items()}


def packed_ic_check(N: int, window: tuple[int, int] | None = None) -> bool:
    """True when the determinantal measure is the point mass at (-N, ..., -1)."""
    return packed_ic_measure(N, window) == {packed(N): Fraction(1)}


def theorem_f(p, reading: str = "corrected") -> Callable[[int], Fraction]:
    """Jump weight between y^{n+1} and x^n.

    ``corrected`` puts p at ``y - x = -1`` (the jump seen from the later
    level), matching the ``1 - p + p/z`` factor of the top-level weight;
    ``printed`` puts it at ``+1``.
    """
    p = as_fraction(p)
    jump = -1 if reading == "corrected" else 1

    def f(d: int) -> Fraction:
        if d == 0:
            return 1 - p
        return p if d == jump else Fraction(0)

    return f


def aztec_theorem_weight(state: ExtendedState, a, reading: str = "corrected") -> Fraction:
    """Unnormalized product of determinants for a size-N Aztec line configuration."""
    a2 = as_fraction(a) ** 2
    p = a2 / (1 + a2)
    N = state.N
    f = theorem_f(p, reading)
    extra = Symbol.one_particle(p)
    xN = state.x[-1]
    # free index of the top-level function taken as the column index
    w = det([[psi(j, xN[i], N, extra) for j in range(1, N + 1)] for i in range(N)])
    # listing the Psi rows in reverse order makes the weight positive
    w *= (-1) ** (N * (N - 1) // 2)
    for n in range(2, N + 1):
        w *= interlacing_det(state.x[n - 1], state.y[n - 2])
    for n in range(1, N):
        y, x = state.y[n - 1], state.x[n - 1]
        w *= det([[f(y[i] - x[j]) for j in range(n)] for i in range(n)])
    return w


# ---------------------------------------------------------------------------
# Distances


def _as_masses(table) -> Mapping:
    return table.masses if isinstance(table, MeasureTable) else table


def tv_distance(p, q):
    """Total variation distance; exact when both inputs are exact."""
    p, q = _as_masses(p), _as_masses(q)
    zp = sum(p.values())
    zq = sum(q.values())
    keys = set(p) | set(q)
    return sum(abs(p.get(k, 0) / zp - q.get(k, 0) / zq) for k in keys) / 2


def chi_square(counts: Mapping, exact) -> tuple[float, int]:
    """Pearson statistic of observed counts against an exact law, and degrees of freedom."""
    exact = _as_masses(exact)
    n = sum(counts.values())
    z = sum(exact.values())
    stat = 0.0
    cells = 0
    for state, m in exact.items():
        expected = n * float(m / z)
        if expected == 0:
            if counts.get(state, 0):
                return math.inf, 0
            continue
        stat += (counts.get(state, 0) - expected) ** 2 / expected
        cells += 1
    if any(state not in exact or exact[state] == 0 for state in counts if counts[state]):
        return math.inf, cells - 1
    return stat, cells - 1


def ratio_classes(weights: Mapping, reference: Mapping) -> set:
    """Distinct ratios weights[s] / reference[s] over the common support."""
    return {Fraction(weights[s]) / Fraction(reference[s]) for s in reference if reference[s]}
