import json
import subprocess
import sys

import numpy as np
import pytest

from shuffling import __version__
from shuffling.aztec import AztecTiling, sample_aztec
from shuffling.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, RunConfig, UsageError, main, run
from shuffling.render import (
    aztec_svg,
    domino_histogram,
    frozen_cells,
    frozen_fraction,
    tasep_summary,
    tower_svg,
)
from shuffling.tower import TowerMatching, sample_tower


def test_flat_tiling_is_frozen():
    for N in (5, 20):
        T = AztecTiling.flat(N)
        assert frozen_fraction(T) == 1.0
        assert frozen_cells(T).sum() > 0


def test_histogram_east_west_balance():
    h = domino_histogram(sample_aztec(30, 1, seed=0))
    assert h["counts"]["E"] == h["counts"]["W"]
    assert sum(h["counts"].values()) == 30 * 31


def test_vertical_fraction_grows_with_a():
    fractions = [
        np.mean([domino_histogram(sample_aztec(10, a, seed=s))["vertical_fraction"] for s in range(20)])
        for a in (1, 2, 4, 8)
    ]
    assert all(u < v for u, v in zip(fractions, fractions[1:]))


def test_frozen_outside_arctic_circle():
    values = [frozen_fraction(sample_aztec(60, 1, seed=s)) for s in range(3)]
    assert np.mean(values) >= 0.95


def test_aztec_svg():
    T = sample_aztec(4, 1, seed=0)
    svg = aztec_svg(T)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<rect") == 4 * 5
    assert __version__ in svg
    assert "#d62728" in svg or "#f2c70f" in svg


def test_tower_svg_hides_black():
    M = sample_tower(3, 1, 1, 1, seed=0)
    full = tower_svg(M, background=False)
    assert full.count("#000000") == M.counts()["black"]
    assert "#000000" not in tower_svg(M, hide_black=True, background=False)


def test_tower_histogram():
    M = sample_tower(4, 1, 1, 1, seed=1)
    h = domino_histogram(M)
    assert h["model"] == "tower" and h["counts"] == M.counts()


def test_tasep_summary():
    heights = np.array([[0, -1], [1, -1], [2, 0]])
    s = tasep_summary(heights)
    assert s == {"steps": 2, "particles": 2, "current": 1.5, "final": [2, 0]}


def test_config_validation():
    with pytest.raises(UsageError):
        RunConfig("tower", 3, {"q": 2}).validate()
    with pytest.raises(UsageError):
        RunConfig("aztec", 0).validate()
    with pytest.raises(UsageError):
        RunConfig("particles", 3, {"p": 2}).validate()
    with pytest.raises(UsageError):
        RunConfig("aztec", 3, {"a": 0}).validate()
    RunConfig("tower", 3, {"beta": 0}).validate()


def test_run_is_deterministic():
    cfg = RunConfig("aztec", 6, {"a": 2}, seed=3)
    assert run(cfg) == run(cfg)
    data = json.loads(run(cfg)[0])
    assert AztecTiling.from_json(data) == AztecTiling.from_json(json.loads(run(cfg)[0]))


def test_samples_differ():
    texts = run(RunConfig("aztec", 6, {}, seed=0, samples=3))
    assert len(set(texts)) == 3


def test_tower_json_output_parses():
    (text,) = run(RunConfig("tower", 3, {"alpha": 2}, seed=1))
    M = TowerMatching.from_json(json.loads(text))
    M.validate()


def test_particles_stats():
    (text,) = run(RunConfig("particles", 6, {"p": 0.5}, seed=1, fmt="stats"))
    stats = json.loads(text)
    assert stats["tasep"]["particles"] == 6 and stats["tasep"]["steps"] == 6


def test_main_exit_codes(tmp_path, capsys):
    out = tmp_path / "t.svg"
    assert main(["sample", "--model", "aztec", "-N", "5", "--format", "svg", "--out", str(out)]) == EXIT_OK
    assert out.read_text().startswith("<svg")
    assert main(["sample", "--model", "tower", "-N", "3", "--q", "2"]) == EXIT_USAGE
    assert main(["sample", "--model", "nope", "-N", "3"]) == EXIT_USAGE
    assert main(["sample", "--model", "aztec", "-N", "3", "--out", str(tmp_path / "missing" / "x.json")]) == EXIT_IO
    assert main(["verify", "--suite", "banana"]) == EXIT_USAGE


def test_json_lines_for_many_samples(tmp_path):
    out = tmp_path / "s.json"
    assert main(["sample", "--model", "aztec-q", "-N", "4", "--q", "0.5", "--samples", "3", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3
    for line in lines:
        AztecTiling.from_json(json.loads(line)).validate()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "shuffling.cli", "sample", "--model", "aztec", "-N", "3", "--format", "stats"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["N"] == 3
