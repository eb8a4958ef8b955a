"""Command-line front end: ``shuffling sample ...`` and ``shuffling verify ...``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INTERNAL = 0, 2, 3, 4
MODELS = ("aztec", "aztec-q", "tower", "particles")
FORMATS = ("svg", "json", "stats")
# parameters each model accepts
ALLOWED = {
    "aztec": {"a"},
    "aztec-q": {"a", "q"},
    "tower": {"alpha", "alpha2", "beta"},
    "particles": {"a", "p"},
}


class UsageError(ValueError):
    pass


def _number(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


@dataclass
class RunConfig:
    model: str
    N: int
    params: dict = field(default_factory=dict)
    seed: int = 0
    samples: int = 1
    fmt: str = "json"
    out: str = "-"

    def validate(self) -> None:
        if self.model not in MODELS:
            raise UsageError(f"unknown model {self.model!r}")
        if self.fmt not in FORMATS:
            raise UsageError(f"unknown format {self.fmt!r}")
        if self.N < 1:
            raise UsageError("size must be at least 1")
        if self.samples < 1:
            raise UsageError("samples must be at least 1")
        extra = set(self.params) - ALLOWED[self.model]
        if extra:
            raise UsageError(f"model {self.model} does not take {', '.join('--' + e for e in sorted(extra))}")
        for name, v in self.params.items():
            if name == "p":
                if not 0 <= v <= 1:
                    raise UsageError("--p must lie in [0, 1]")
            elif name == "beta":
                if v < 0:
                    raise UsageError("--beta must be nonnegative")
            elif v <= 0:
                raise UsageError(f"--{name} must be positive")

    def get(self, name: str, default=1) -> Fraction:
        return self.params.get(name, Fraction(default))


def _seeds(cfg: RunConfig) -> list:
    if cfg.samples == 1:
        return [cfg.seed]
    return np.random.SeedSequence(cfg.seed).spawn(cfg.samples)


def _sample_one(cfg: RunConfig, seed):
    """One sample as (json dict, stats dict, svg factory)."""
    from . import render
    from .aztec import particles_to_tiling, sample_aztec, sample_aztec_q
    from .dynamics import Schedule, run_extended, tasep_heights
    from .tower import sample_tower

    if cfg.model in ("aztec", "aztec-q"):
        if cfg.model == "aztec":
            T = sample_aztec(cfg.N, cfg.get("a"), seed)
        else:
            T = sample_aztec_q(cfg.N, cfg.get("a"), cfg.get("q"), seed)
        T.validate()
        stats = render.domino_histogram(T)
        stats["frozen_fraction"] = render.frozen_fraction(T, 1.05)
        if stats["counts"]["E"] != stats["counts"]["W"]:
            raise AssertionError("East and West counts differ")
        return T.to_json(), stats, lambda: render.aztec_svg(T)
    if cfg.model == "tower":
        M = sample_tower(cfg.N, cfg.get("alpha"), cfg.get("alpha2"), cfg.get("beta"), seed)
        M.state.validate()
        return M.to_json(), render.domino_histogram(M), lambda: render.tower_svg(M, hide_black=cfg.N > 20, background=cfg.N <= 20)
    schedule = Schedule(cfg.params["p"]) if "p" in cfg.params else Schedule.aztec(cfg.get("a"))
    traj = run_extended(cfg.N, seed=seed, schedule=schedule)
    final = traj[-1]
    stats = {"model": "particles", "N": cfg.N, "tasep": render.tasep_summary(tasep_heights(traj))}
    data = {"model": "particles", "N": cfg.N, "trajectory": [s.to_json() for s in traj]}
    return data, stats, lambda: render.aztec_svg(particles_to_tiling(final.x, final.y))


def _render(cfg: RunConfig, seed) -> str:
    data, stats, svg = _sample_one(cfg, seed)
    if cfg.fmt == "svg":
        return svg()
    if cfg.fmt == "stats":
        return json.dumps(stats, sort_keys=True)
    return json.dumps(data, sort_keys=True)


def run(cfg: RunConfig) -> list[str]:
    """Produce the output texts of a run (one per sample)."""
    cfg.validate()
    seeds = _seeds(cfg)
    workers = int(os.environ.get("SHUFFLING_WORKERS", "1") or 1)
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_render, [cfg] * len(seeds), seeds))
    return [_render(cfg, s) for s in seeds]


def _write(cfg: RunConfig, texts: list[str]) -> list[str]:
    if cfg.out == "-":
        for t in texts:
            sys.stdout.write(t if t.endswith("\n") else t + "\n")
        return []
    path = Path(cfg.out)
    if len(texts) == 1:
        paths = [path]
    else:
        paths = [path.with_name(f"{path.stem}-{i:04d}{path.suffix}") for i in range(len(texts))]
    if cfg.fmt in ("json", "stats") and len(texts) > 1:
        # JSON runs go to one JSON-lines file
        paths = [path]
        texts = ["\n".join(texts)]
    for p, t in zip(paths, texts):
        p.write_text(t if t.endswith("\n") else t + "\n")
    return [str(p) for p in paths]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shuffling", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw random tilings or particle runs")
    s.add_argument("--model", required=True, choices=MODELS)
    s.add_argument("--size", "-N", type=int, required=True)
    s.add_argument("--a", type=_number)
    s.add_argument("--q", type=_number)
    s.add_argument("--alpha", type=_number)
    s.add_argument("--alpha2", type=_number, help="the second column weight (alpha tilde)")
    s.add_argument("--beta", type=_number)
    s.add_argument("--p", type=_number, help="jump probability for the particle model")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, default=1)
    s.add_argument("--out", default="-", help="output path, '-' for stdout")
    s.add_argument("--format", dest="fmt", default="json", choices=FORMATS)

    v = sub.add_parser("verify", help="run an acceptance battery")
    v.add_argument("--suite", default="quick", help="'quick', 'all' or a criterion number 1-15")
    return parser


def _config(ns) -> RunConfig:
    params = {k: getattr(ns, k) for k in ("a", "q", "alpha", "alpha2", "beta", "p") if getattr(ns, k) is not None}
    return RunConfig(ns.model, ns.size, params, ns.seed, ns.samples, ns.fmt, ns.out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if ns.command == "verify":
            from .verify import run_suite

            results = run_suite(ns.suite)
            for r in results:
                print(r.line())
            return EXIT_OK if all(r.ok for r in results) else EXIT_INTERNAL
        cfg = _config(ns)
        texts = run(cfg)
        for p in _write(cfg, texts):
            print(p, file=sys.stderr)
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # invariant violations and bugs
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
