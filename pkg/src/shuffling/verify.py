"""Acceptance batteries: each check returns a :class:`CheckResult` with its measured values."""
from __future__ import annotations

import time
import tracemalloc
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import aztec, dynamics, gt, kernels, oracle, render, tower
from .kernels import Symbol


@dataclass
class CheckResult:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.2f} s)"


CHECKS: dict[int, tuple[str, Callable[[], tuple[bool, str]]]] = {}


def check(number: int, name: str):
    def register(fn):
        CHECKS[number] = (name, fn)
        return fn

    return register


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _grid_key(g: np.ndarray) -> bytes:
    return np.ascontiguousarray(g, dtype=np.int8).tobytes()


@check(1, "tiling counts")
def counting():
    counts, secs = _timed(lambda: [len(oracle.enumerate_aztec(N)) for N in (1, 2, 3)])
    ok = counts == [2**(N * (N + 1) // 2) for N in (1, 2, 3)] and secs < 1
    return ok, f"counts {counts}, enumeration {secs:.3f} s"


@check(2, "uniform-a sampler law")
def sampler_law(samples: int = 100_000):
    parts, ok = [], True
    t0 = time.perf_counter()
    for a in (1, 2):
        exact = oracle.aztec_measure(2, a)
        target = {_grid_key(T.grid): float(m) for T, m in exact.items()}
        batch = aztec.sample_aztec_batch(2, a, samples, seed=1000 + a)
        counts = Counter(_grid_key(g) for g in batch)
        tv = float(oracle.tv_distance(dict(counts), target))
        ok &= tv < 0.01
        parts.append(f"a={a} TV={tv:.4f}")
    secs = time.perf_counter() - t0
    ok &= secs < 10
    return ok, ", ".join(parts)


@check(3, "intertwining")
def intertwining():
    worst = Fraction(0)
    t0 = time.perf_counter()
    for n in (2, 3, 4):
        for p in (Fraction(1, 3), Fraction(1, 2), Fraction(4, 5)):
            worst = max(worst, kernels.intertwine_defect(n, p, (0, 8)))
    secs = time.perf_counter() - t0
    return worst == 0 and secs < 30, f"max defect {worst}"


@check(4, "GT pattern count")
def gt_counting(rows: int = 50, seed: int = 4):
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(rows):
        N = int(rng.integers(1, 5))
        top = sorted(rng.choice(9, size=N, replace=False).tolist())
        if gt.count_gt_patterns(top) != len(gt.enumerate_patterns(top)):
            bad += 1
    return bad == 0, f"{rows - bad}/{rows} top rows agree"


@check(5, "interlacing determinant")
def interlacing_indicator(width: int = 6):
    checked = 0
    for n in range(1, 5):
        for upper in gt.iter_weyl(n, 0, width - 1):
            for lower in gt.iter_weyl(n - 1, 0, width - 1):
                if gt.interlacing_det(upper, lower) != int(gt.interlaces(lower, upper)):
                    return False, f"mismatch at {upper}, {lower}"
                checked += 1
    return True, f"{checked} pairs"


@check(6, "packed initial condition")
def packed_ic():
    results = [oracle.packed_ic_check(N) for N in (1, 2, 3, 4)]
    return all(results), f"N=1..4: {results}"


@check(7, "conservation laws")
def conservation(N: int = 2, p=Fraction(1, 2)):
    fails = []
    start = oracle.MeasureTable.point(gt.GTPattern.packed(N))
    # the parallel law is conserved from an initial measure of product form
    par_start = oracle.parallel_product_form(N, p, 0)
    schedule = dynamics.Schedule(p)
    ext_start = oracle.MeasureTable.point(dynamics.ExtendedState.packed(N))
    for t in range(4):
        seq = oracle.exact_pushforward(start, lambda s: dynamics.sequential_step_law(s, p), t)
        if seq != oracle.sequential_product_form(N, p, t):
            fails.append(f"sequential t={t}")
        par = oracle.exact_pushforward(par_start, lambda s: dynamics.parallel_step_law(s, p), t)
        if par != oracle.parallel_product_form(N, p, t):
            fails.append(f"parallel t={t}")
        ext = oracle.exact_pushforward(ext_start, lambda s: dynamics.extended_step_law(s, schedule), t)
        if ext != oracle.extended_product_form(N, schedule, t):
            fails.append(f"extended t={t}")
    return not fails, "all equal for t = 0..3" if not fails else ", ".join(fails)


def _state_of(T: aztec.AztecTiling) -> dynamics.ExtendedState:
    return dynamics.lines_to_particles(aztec.tiling_to_lines(T))


@check(8, "determinantal weight (Aztec)")
def aztec_theorem():
    tilings = oracle.enumerate_aztec(2)
    parts, ok = [], True
    for a in (1, 2):
        w = {T: oracle.aztec_theorem_weight(_state_of(T), a) for T in tilings}
        ref = {T: Fraction(a) ** T.vertical_count() for T in tilings}
        ratios = oracle.ratio_classes(w, ref)
        ok &= len(ratios) == 1 and 0 not in ratios
        parts.append(f"a={a} ratios {sorted(ratios)}")
    return ok, f"{len(tilings)} tilings, " + ", ".join(parts)


@check(9, "shuffling vs particle dynamics")
def cross_model(N: int = 2):
    parts, ok = [], True
    for a in (1, 2):
        shuffled = oracle.exact_pushforward(
            oracle.MeasureTable.point(aztec.empty_tiling()), lambda T: aztec.shuffle_law(T, a), N
        ).map(aztec.tiling_to_lines)
        schedule = dynamics.Schedule.aztec(a)
        particles = oracle.exact_pushforward(
            oracle.MeasureTable.point(dynamics.ExtendedState.packed(N)),
            lambda s: dynamics.extended_step_law(s, schedule),
            N,
        ).map(dynamics.particles_to_lines)
        tv = oracle.tv_distance(shuffled, particles)
        ok &= tv == 0
        parts.append(f"a={a} TV={tv}")
    return ok, ", ".join(parts)


@check(10, "(a, q) model")
def aq_model(samples: int = 100_000, a=1, q=2):
    N = 2
    exact = oracle.aztec_measure(N, a, q)
    rng = aztec.make_rng(10)
    counts: Counter = Counter()
    for _ in range(samples):
        T = aztec.empty_tiling()
        for _ in range(N):
            T = aztec.weighted_shuffle_step_q(T, a, q, rng, target=N)
        counts[_grid_key(T.grid)] += 1
    target = {_grid_key(T.grid): m for T, m in exact.items()}
    tv = float(oracle.tv_distance(dict(counts), target))
    alpha, beta = aztec.q_column_weights(N, a, q)
    lgv = {T: aztec.tiling_to_lines(T).edge_weight(alpha, beta) for T in exact}
    ref = {T: Fraction(a) ** T.vertical_count() * Fraction(q) ** aztec.rank(T) for T in exact}
    ratios = oracle.ratio_classes(lgv, ref)
    return tv < 0.01 and len(ratios) == 1, f"TV={tv:.4f}, edge-weight ratios {sorted(ratios)}"


def _appendix_symbols():
    p = Fraction(1, 3)
    return [
        Symbol.laurent({0: 1 - p, -1: p}, label="1-p+p/z"),
        Symbol.laurent({0: Fraction(1, 2), 1: Fraction(1, 4), -1: Fraction(1, 4)}, label="(2+z+1/z)/4"),
    ]


def _row(kernel, a, F, x, lo, hi, down=False):
    return kernels.toeplitz_row(kernel, a, F, x, lo, hi, down=down)


def _compose(r1, kernel2, a2, F2, lo, hi, down=False):
    acc: dict = {}
    for mid, v in r1.items():
        for y, w in _row(kernel2, a2, F2, mid, lo, hi, down).items():
            acc[y] = acc.get(y, 0) + v * w
    return {y: v for y, v in acc.items() if v}


@check(11, "Toeplitz kernels")
def appendix():
    F1, F2 = _appendix_symbols()
    fails = []
    for n, a in ((2, (1, 2)), (3, (1, 2, 3))):
        a = tuple(Fraction(v) for v in a)
        for x in gt.iter_weyl(n, 0, 3):
            lo, hi = -3, 7
            for F in (F1, F2):
                # A.1 and A.2: the kernels are stochastic
                if kernels.row_sum(_row(kernels.toeplitz_same_level, a, F, x, lo, hi)) != 1:
                    fails.append(f"A.1 n={n} {F.label} x={x}")
                if kernels.row_sum(_row(kernels.toeplitz_level_down, a, F, x, lo, hi, down=True)) != 1:
                    fails.append(f"A.2 n={n} {F.label} x={x}")
            F12 = F1 * F2
            same = _row(kernels.toeplitz_same_level, a, F12, x, lo, hi)
            if _compose(_row(kernels.toeplitz_same_level, a, F1, x, lo, hi), kernels.toeplitz_same_level, a, F2, lo, hi) != same:
                fails.append(f"A.3 T(F1)T(F2) n={n} x={x}")
            if _compose(_row(kernels.toeplitz_same_level, a, F2, x, lo, hi), kernels.toeplitz_same_level, a, F1, lo, hi) != same:
                fails.append(f"A.3 T(F2)T(F1) n={n} x={x}")
            down = _row(kernels.toeplitz_level_down, a, F12, x, lo, hi, down=True)
            via_top = _compose(_row(kernels.toeplitz_same_level, a, F1, x, lo, hi), kernels.toeplitz_level_down, a, F2, lo, hi, down=True)
            via_bottom = _compose(
                _row(kernels.toeplitz_level_down, a, F1, x, lo, hi, down=True), kernels.toeplitz_same_level, a[:-1], F2, lo, hi
            )
            if via_top != down:
                fails.append(f"A.3 T_n(F1)T^n(F2) n={n} x={x}")
            if via_bottom != down:
                fails.append(f"A.3 T^n(F1)T_(n-1)(F2) n={n} x={x}")
    # confluent limits: equal parameters reduce to the Bernoulli kernel and the uniform link
    p = Fraction(2, 5)
    beta = p / (1 - p)
    for x in gt.iter_weyl(3, 0, 4):
        for y, v in kernels.level_kernel_row(x, p).items():
            if kernels.generalized_level_kernel(x, y, (1, 1, 1), beta) != v:
                fails.append(f"confluent P at {x}->{y}")
        for y in gt.enumerate_interlacing(x):
            if kernels.generalized_markov_link(x, y, (2, 2, 2)) != kernels.markov_link(x, y):
                fails.append(f"confluent Lambda at {x}->{y}")
        # approaching the confluent point from distinct parameters
        eps = Fraction(1, 10**6)
        near = (1, 1 + eps, 1 + 2 * eps)
        F = Symbol.laurent({0: 1, -1: beta})
        for y, v in kernels.level_kernel_row(x, p).items():
            if abs(kernels.toeplitz_same_level(near, F, x, y) - v) > Fraction(1, 10**4):
                fails.append(f"limit P at {x}->{y}")
    return not fails, "all identities exact" if not fails else f"{len(fails)} failures, first: {fails[0]}"


@check(12, "Tower model")
def tower_checks(samples: int = 100_000):
    parts, ok, constant = [], True, True
    for params in ((1, 1, 1), (Fraction(1, 2), 1, 2)):
        for N in (1, 2):
            exact = tower.tower_measure(N, params)
            drawn = Counter(tower.sample_tower_batch(N, *params, samples=samples, seed=1200 + N))
            tv = float(oracle.tv_distance(dict(drawn), exact))
            ok &= tv < 0.02
            parts.append(f"N={N} {tuple(str(v) for v in params)} TV={tv:.4f}")
            ratios = {tower.tower_measure_weight(M.state, params) / M.weight(params) for M in exact}
            constant &= len(ratios) == 1
    ok &= constant
    parts.append(f"theorem ratio constant {constant}")
    for params in ((1, 1, 1), (Fraction(1, 2), 1, 2)):
        grown = oracle.MeasureTable.point(None)
        for _ in range(2):
            grown = oracle.exact_pushforward(grown, lambda M: tower.tower_shuffle_law(M, params), 1)
        chain = oracle.exact_pushforward(
            oracle.MeasureTable.point(dynamics.TowerState.packed(2)), lambda s: dynamics.tower_step_law(s, params), 2
        ).map(lambda s: tower.TowerMatching(dynamics.TowerState(s.x, s.y, s.z, 2)))
        same = grown.map(tower.tower_to_lines) == chain.map(tower.tower_to_lines)
        ok &= same
        parts.append(f"dynamics=shuffling {same}")
    return ok, ", ".join(parts)


@check(13, "bijection round trips")
def roundtrips(aztec_samples: int = 10_000, tower_samples: int = 1_000):
    for N in (1, 2, 3):
        for T in oracle.enumerate_aztec(N):
            if aztec.lines_to_tiling(aztec.tiling_to_lines(T)) != T:
                return False, f"exhaustive N={N} failed"
        if N <= 2:
            for m in tower.enumerate_matchings(tower.build_tower(N)):
                M = tower.TowerMatching.from_edges(N, m)
                if M.edges != m or tower.lines_to_tower(tower.tower_to_lines(M)) != M:
                    return False, f"tower matching N={N} failed"
    batch = aztec.sample_aztec_batch(30, 1, aztec_samples, seed=13)
    for g in batch:
        T = aztec.AztecTiling(30, g)
        if aztec.lines_to_tiling(aztec.tiling_to_lines(T)) != T:
            return False, "random N=30 Aztec failed"
    for M in tower.sample_tower_batch(5, samples=tower_samples, seed=13):
        if tower.lines_to_tower(tower.tower_to_lines(M)) != M or tower.TowerMatching.from_edges(5, M.edges) != M:
            return False, "random N=5 Tower failed"
    return True, f"exhaustive N<=3, {aztec_samples} Aztec N=30, {tower_samples} Tower N=5"


@check(14, "performance")
def performance():
    _, t_aztec = _timed(lambda: aztec.sample_aztec(200, 1, seed=14))
    _, t_tower = _timed(lambda: tower.sample_tower(100, 1, 1, 1, seed=14))
    # memory measured on a separate run, tracing slows allocation down
    tracemalloc.start()
    aztec.sample_aztec(200, 1, seed=15)
    tower.sample_tower(100, 1, 1, 1, seed=15)
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    mb = peak / 2**20
    ok = t_aztec < 1 and t_tower < 1 and mb < 256
    return ok, f"aztec(200) {t_aztec:.2f} s, tower(100) {t_tower:.2f} s, peak {mb:.0f} MB"


@check(15, "arctic circle")
def arctic(seeds: int = 20, N: int = 200, rho: float = 1.05):
    fr = [render.frozen_fraction(aztec.sample_aztec(N, 1, seed=s), rho) for s in range(seeds)]
    mean = float(np.mean(fr))
    return mean >= 0.99, f"mean frozen fraction {mean:.4f} (min {min(fr):.4f})"


QUICK = (1, 3, 4, 5, 6, 7, 8, 9, 11)
SUITES = {"quick": QUICK, "all": tuple(range(1, 16))}


def run_check(number: int) -> CheckResult:
    name, fn = CHECKS[number]
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure of the criterion
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(number, name, bool(ok), detail, time.perf_counter() - t0)


def run_suite(suite: str) -> list[CheckResult]:
    from .cli import UsageError

    if suite in SUITES:
        numbers = SUITES[suite]
    else:
        try:
            numbers = tuple(int(s) for s in suite.split(","))
        except ValueError:
            raise UsageError(f"unknown suite {suite!r}; use quick, all or criterion numbers") from None
        if any(n not in CHECKS for n in numbers):
            raise UsageError("criteria are numbered 1 to 15")
    return [run_check(n) for n in numbers]


__all__ = ["CHECKS", "CheckResult", "run_check", "run_suite"]
