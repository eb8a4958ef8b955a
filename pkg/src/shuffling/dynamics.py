"""Markov chains on interlacing particle arrays.

Every chain moves each particle by 0 or +1 per time step.  Level ``k`` is
updated as the middle point of a Bernoulli step ``P_k`` followed by the link
``Lambda^k_{k-1}`` towards a fixed lower level ``y``.  The Vandermonde factors
of ``P_k`` and ``Lambda`` cancel in that ratio, so the conditional law is
simply independent Bernoulli jumps restricted to ``y < x'`` (strictly):
particle ``j`` is pushed when it sits below ``y_{j-1}`` and blocked when a jump
would reach ``y_j``.

The lower level ``y`` is the new level ``k - 1`` for the sequential update and
the old one for the parallel update.  In the extended chain ``y`` is stored
explicitly as ``y^k`` and refreshed with ``y^{k+1}(t + 1) = x^k(t)``.

Random numbers: each time step draws one ``(N, N)`` block of uniforms and
particle ``j`` of level ``k`` uses entry ``[k - 1, j]``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence, TextIO

import numpy as np

from ._exact import as_fraction
from .aztec import AztecTiling, LineEnsemble, make_rng, particles_to_tiling
from .gt import ContractError, GTPattern, WeylConfig, interlaces, packed, parallel_interlaces


def admissible_moves(x: Sequence[int], y: Sequence[int] | None) -> list[tuple[int, ...]]:
    """Allowed new positions for each particle of ``x`` given the lower level ``y``.

    Entry ``j`` is ``(x_j,)`` (blocked), ``(x_j + 1,)`` (pushed) or both.
    """
    out = []
    for j, xj in enumerate(x):
        opts = []
        for v in (xj, xj + 1):
            if y is not None:
                if j > 0 and v < y[j - 1]:
                    continue
                if j < len(y) and v >= y[j]:
                    continue
            opts.append(v)
        if not opts:
            raise AssertionError(f"no admissible move for particle {j} of {tuple(x)} over {tuple(y)}")
        out.append(tuple(opts))
    return out


def constrained_update(x: Sequence[int], y: Sequence[int] | None, p, u: Sequence[float]) -> tuple[int, ...]:
    """Bernoulli(p) jumps of ``x`` conditioned on ``y`` strictly interlacing the result."""
    p = float(p)
    new = []
    for j, opts in enumerate(admissible_moves(x, y)):
        if len(opts) == 1:
            new.append(opts[0])
        else:
            new.append(opts[1] if u[j] < p else opts[0])
    return tuple(new)


def update_law(x: Sequence[int], y: Sequence[int] | None, p) -> dict[tuple[int, ...], Fraction]:
    """Exact law of :func:`constrained_update` (product over free particles)."""
    p = as_fraction(p)
    out: dict[tuple[int, ...], Fraction] = {(): Fraction(1)}
    for opts in admissible_moves(x, y):
        nxt = {}
        for prefix, w in out.items():
            if len(opts) == 1:
                nxt[prefix + opts] = w
                continue
            for v, q in ((opts[0], 1 - p), (opts[1], p)):
                if q:
                    nxt[prefix + (v,)] = w * q
        out = nxt
    return out


def sequential_step(state: GTPattern, p, rng) -> GTPattern:
    """One step of the sequential update (levels bottom to top, using new lower levels)."""
    rng = make_rng(rng)
    N = state.depth
    u = rng.random((N, N))
    levels = []
    below = None
    for k in range(1, N + 1):
        below = constrained_update(state[k], below, p, u[k - 1])
        levels.append(below)
    out = GTPattern(tuple(levels))
    return out


def parallel_step(state: GTPattern, p, rng) -> GTPattern:
    """One step of the parallel update (each level reads the lower level at time t)."""
    rng = make_rng(rng)
    N = state.depth
    u = rng.random((N, N))
    levels = [constrained_update(state[k], state[k - 1] if k > 1 else None, p, u[k - 1]) for k in range(1, N + 1)]
    return GTPattern(tuple(levels), strict=False)


def sequential_step_law(state: GTPattern, p) -> dict[GTPattern, Fraction]:
    """Exact one-step law of :func:`sequential_step`."""
    out: dict[GTPattern, Fraction] = {}

    def rec(k, acc, w):
        if k > state.depth:
            key = GTPattern(tuple(acc))
            out[key] = out.get(key, 0) + w
            return
        for level, q in update_law(state[k], acc[-1] if acc else None, p).items():
            rec(k + 1, acc + [level], w * q)

    rec(1, [], Fraction(1))
    return out


def parallel_step_law(state: GTPattern, p) -> dict[GTPattern, Fraction]:
    """Exact one-step law of :func:`parallel_step`."""
    laws = [update_law(state[k], state[k - 1] if k > 1 else None, p) for k in range(1, state.depth + 1)]
    out: dict[GTPattern, Fraction] = {}
    for combo in itertools.product(*(law.items() for law in laws)):
        w = Fraction(1)
        for _, q in combo:
            w *= q
        key = GTPattern(tuple(level for level, _ in combo), strict=False)
        out[key] = out.get(key, 0) + w
    return out


# ---------------------------------------------------------------------------
# Extended state space


@dataclass(frozen=True)
class Schedule:
    """Time-dependent jump probabilities: ``p`` once a level is active, 0 before.

    Level ``k`` at clock ``t`` sits at ``tau = t - (k - 1) + origin`` and is
    active when ``tau >= 0``.  ``rule`` may replace the constant ``p`` by any
    function of ``(level, tau)``.
    """

    p: Fraction | float = Fraction(1, 2)
    rule: Callable[[int, int], object] | None = field(default=None, compare=False)

    def __call__(self, level: int, tau: int):
        if self.rule is not None:
            return self.rule(level, tau)
        return self.p if tau >= 0 else 0

    @classmethod
    def aztec(cls, a) -> "Schedule":
        a2 = as_fraction(a) ** 2
        return cls(a2 / (1 + a2))

    @classmethod
    def frozen(cls) -> "Schedule":
        return cls(0, rule=lambda level, tau: 0)


@dataclass(frozen=True)
class ExtendedState:
    """Levels ``x^1..x^N`` and middle levels ``y^2..y^N`` at clock ``t``."""

    x: tuple[tuple[int, ...], ...]
    y: tuple[tuple[int, ...], ...]
    t: int = 0
    origin: int = 0

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(tuple(WeylConfig(v)) for v in self.x))
        object.__setattr__(self, "y", tuple(tuple(WeylConfig(v)) for v in self.y))

    @property
    def N(self) -> int:
        return len(self.x)

    def tau(self, level: int) -> int:
        return self.t - (level - 1) + self.origin

    def validate(self) -> None:
        if len(self.y) != max(self.N - 1, 0):
            raise ContractError("need one middle level per level above the first")
        for k in range(1, self.N + 1):
            if len(self.x[k - 1]) != k:
                raise ContractError(f"level {k} has {len(self.x[k - 1])} particles")
        for k in range(2, self.N + 1):
            if not interlaces(self.y[k - 2], self.x[k - 1]):
                raise ContractError(f"y^{k} does not interlace x^{k}")
            if not parallel_interlaces(self.x[k - 2], self.x[k - 1]):
                raise ContractError(f"x^{k - 1} and x^{k} leave the parallel state space")

    @classmethod
    def packed(cls, N: int, origin: int = 0) -> "ExtendedState":
        return cls(tuple(packed(k) for k in range(1, N + 1)), tuple(packed(k - 1) for k in range(2, N + 1)), 0, origin)

    def pattern(self) -> GTPattern:
        return GTPattern(self.x, strict=False)

    def to_json(self) -> dict:
        return {"t": self.t, "origin": self.origin, "x": [list(v) for v in self.x], "y": [list(v) for v in self.y]}

    @classmethod
    def from_json(cls, data) -> "ExtendedState":
        if isinstance(data, str):
            data = json.loads(data)
        state = cls(tuple(map(tuple, data["x"])), tuple(map(tuple, data["y"])), int(data.get("t", 0)), int(data.get("origin", 0)))
        state.validate()
        return state


def extended_parallel_step(state: ExtendedState, schedule: Schedule, rng) -> ExtendedState:
    """Refresh ``y^{k+1} = x^k`` and advance every level by the constrained parallel update."""
    rng = make_rng(rng)
    N = state.N
    u = rng.random((N, N))
    new_y = tuple(state.x[k - 1] for k in range(1, N))
    new_x = []
    for k in range(1, N + 1):
        below = new_y[k - 2] if k > 1 else None
        new_x.append(constrained_update(state.x[k - 1], below, schedule(k, state.tau(k)), u[k - 1]))
    return ExtendedState(tuple(new_x), new_y, state.t + 1, state.origin)


def extended_step_law(state: ExtendedState, schedule: Schedule) -> dict[ExtendedState, Fraction]:
    """Exact one-step law of :func:`extended_parallel_step`."""
    N = state.N
    new_y = tuple(state.x[k - 1] for k in range(1, N))
    laws = [update_law(state.x[k - 1], new_y[k - 2] if k > 1 else None, schedule(k, state.tau(k))) for k in range(1, N + 1)]
    out: dict[ExtendedState, Fraction] = {}

    def rec(k, acc, w):
        if k == N:
            key = ExtendedState(tuple(acc), new_y, state.t + 1, state.origin)
            out[key] = out.get(key, 0) + w
            return
        for level, q in laws[k].items():
            rec(k + 1, acc + [level], w * q)

    rec(0, [], Fraction(1))
    return out


def run_extended(N: int, a=1, seed=0, steps: int | None = None, schedule: Schedule | None = None) -> list[ExtendedState]:
    """Trajectory of the extended chain from the packed state (``steps`` defaults to N)."""
    rng = make_rng(seed)
    schedule = schedule or Schedule.aztec(a)
    state = ExtendedState.packed(N)
    out = [state]
    for _ in range(N if steps is None else steps):
        state = extended_parallel_step(state, schedule, rng)
        out.append(state)
    return out


def aztec_via_dynamics(N: int, a=1, seed=0) -> AztecTiling:
    """Tiling of A_N read off the extended parallel chain after N steps."""
    final = run_extended(N, a, seed)[-1]
    return particles_to_tiling(final.x, final.y)


# ---------------------------------------------------------------------------
# Lines and projections


def particles_to_lines(state: ExtendedState) -> LineEnsemble:
    """Place x^k at line-time 2k-1 and y^{k+1} at 2k, join top particles, pad with flat lines."""
    state.validate()
    L = LineEnsemble.from_particles(state.x, state.y)
    L.validate()
    return L


def lines_to_particles(L: LineEnsemble, t: int | None = None, origin: int = 0) -> ExtendedState:
    """Inverse of :func:`particles_to_lines`; the clock defaults to the ensemble size."""
    L.validate()
    xs, ys = L.particles()
    state = ExtendedState(tuple(xs), tuple(ys), L.N if t is None else t, origin)
    state.validate()
    return state


def tasep_heights(trajectory: Iterable, which: str = "parallel-edge") -> np.ndarray:
    """TASEP particle positions per time: x_1^n (sequential edge) or x_n^n (parallel edge).

    Accepts GTPattern or ExtendedState trajectories; returns an array of shape
    (times, N).
    """
    rows = []
    for state in trajectory:
        levels = state.x if isinstance(state, ExtendedState) else state.levels
        if which == "sequential-edge":
            rows.append([level[0] for level in levels])
        elif which == "parallel-edge":
            rows.append([level[-1] for level in levels])
        else:
            raise ValueError(f"unknown projection {which!r}")
    return np.array(rows, dtype=np.int64)


def write_trajectory(states: Iterable, fh: TextIO) -> None:
    """JSON-lines dump, one state per line."""
    for state in states:
        fh.write(json.dumps(state.to_json()) + "\n")


def read_trajectory(fh: TextIO) -> Iterator[ExtendedState | GTPattern]:
    for line in fh:
        line = line.strip()
        if not line:
            continue
        data = json.loads(line)
        yield ExtendedState.from_json(data) if "y" in data else GTPattern.from_json(data, strict=False)


# ---------------------------------------------------------------------------
# Tower chain


@dataclass(frozen=True)
class TowerState:
    """Levels x^n (2n particles), y^n (2n-1) and z^n (2n-2, n >= 2) at clock ``t``."""

    x: tuple[tuple[int, ...], ...]
    y: tuple[tuple[int, ...], ...]
    z: tuple[tuple[int, ...], ...]
    t: int = 0

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, tuple(tuple(WeylConfig(v)) for v in getattr(self, name)))

    @property
    def N(self) -> int:
        return len(self.x)

    def validate(self) -> None:
        N = self.N
        if len(self.y) != N or len(self.z) != max(N - 1, 0):
            raise ContractError("tower state needs N x- and y-levels and N-1 z-levels")
        for n in range(1, N + 1):
            x, y = self.x[n - 1], self.y[n - 1]
            if len(x) != 2 * n or len(y) != 2 * n - 1:
                raise ContractError(f"wrong level sizes at n={n}")
            if not interlaces(y, x):
                raise ContractError(f"y^{n} does not interlace x^{n}")
            if n >= 2:
                z = self.z[n - 2]
                if not interlaces(z, y):
                    raise ContractError(f"z^{n} does not interlace y^{n}")
                if any(d not in (0, 1) for d in np.subtract(self.x[n - 2], z)):
                    raise ContractError(f"z^{n} is not one down-step from x^{n - 1}")

    @classmethod
    def packed(cls, N: int) -> "TowerState":
        return cls(
            tuple(packed(2 * n) for n in range(1, N + 1)),
            tuple(packed(2 * n - 1) for n in range(1, N + 1)),
            tuple(packed(2 * n - 2) for n in range(2, N + 1)),
        )

    def to_json(self) -> dict:
        return {"t": self.t, "x": [list(v) for v in self.x], "y": [list(v) for v in self.y], "z": [list(v) for v in self.z]}

    @classmethod
    def from_json(cls, data) -> "TowerState":
        if isinstance(data, str):
            data = json.loads(data)
        state = cls(*(tuple(map(tuple, data[k])) for k in ("x", "y", "z")), int(data.get("t", 0)))
        state.validate()
        return state


def tower_jump_probabilities(params) -> tuple[Fraction, Fraction]:
    """Jump probabilities of y- and x-particles: odds alpha*beta and alpha~*beta."""
    alpha, alpha_t, beta = (as_fraction(v) for v in params)
    ry, rx = alpha * beta, alpha_t * beta
    return ry / (1 + ry), rx / (1 + rx)


def tower_step(state: TowerState, params, rng) -> TowerState:
    """z^{n+1} <- x^n, then y^n and x^n as middle points (level n active once t >= n - 1).

    ``params`` is ``(alpha, alpha_tilde, beta)`` or a callable ``(n, tau) ->
    (alpha, alpha_tilde, beta)`` (zero beta freezes a level).
    """
    rng = make_rng(rng)
    N = state.N
    u = rng.random((N, 2, 2 * N))
    new_z = tuple(state.x[n - 2] for n in range(2, N + 1))
    new_y, new_x = [], []
    for n in range(1, N + 1):
        py, px = _tower_params(params, n, state.t - (n - 1))
        y = constrained_update(state.y[n - 1], new_z[n - 2] if n >= 2 else None, py, u[n - 1, 0])
        new_y.append(y)
        new_x.append(constrained_update(state.x[n - 1], y, px, u[n - 1, 1]))
    return TowerState(tuple(new_x), tuple(new_y), new_z, state.t + 1)


def _tower_params(params, n: int, tau: int) -> tuple[Fraction, Fraction]:
    if callable(params):
        values = params(n, tau)
    else:
        values = params if tau >= 0 else (1, 1, 0)
    return tower_jump_probabilities(values)


def tower_step_law(state: TowerState, params) -> dict[TowerState, Fraction]:
    """Exact one-step law of :func:`tower_step`."""
    N = state.N
    new_z = tuple(state.x[n - 2] for n in range(2, N + 1))
    out: dict[TowerState, Fraction] = {}

    def rec(n, ys, xs, w):
        if n > N:
            key = TowerState(tuple(xs), tuple(ys), new_z, state.t + 1)
            out[key] = out.get(key, 0) + w
            return
        py, px = _tower_params(params, n, state.t - (n - 1))
        for y, qy in update_law(state.y[n - 1], new_z[n - 2] if n >= 2 else None, py).items():
            for x, qx in update_law(state.x[n - 1], y, px).items():
                rec(n + 1, ys + [y], xs + [x], w * qy * qx)

    rec(1, [], [], Fraction(1))
    return out
