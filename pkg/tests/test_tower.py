from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shuffling.dynamics import TowerState, tower_step_law
from shuffling.oracle import MeasureTable, exact_pushforward
from shuffling.tower import (
    KINDS,
    TowerLines,
    TowerMatching,
    build_tower,
    decompose,
    enumerate_matchings,
    expected_hexagons,
    lines_to_tower,
    piece_catalogue,
    sample_tower,
    sample_tower_batch,
    tower_measure,
    tower_measure_weight,
    tower_shuffle_law,
    tower_shuffle_step,
    tower_to_lines,
)

half = Fraction(1, 2)
PARAMS = [(1, 1, 1), (half, 1, 2), (half, 3, 2), (2, 3, 5)]


@pytest.mark.parametrize("N, hexes", [(1, 1), (2, 5), (3, 12), (5, 35)])
def test_graph_shape(N, hexes):
    g = build_tower(N)
    assert len(g.hexagons()) == hexes == expected_hexagons(N) == (3 * N - 1) * N // 2
    assert g.is_connected() and g.is_bipartite()


@pytest.mark.parametrize("N, count", [(1, 4), (2, 64)])
def test_matching_counts(N, count):
    assert len(enumerate_matchings(build_tower(N))) == count


def test_size_one_law_factorizes():
    alpha, alpha_t, beta = 2, 3, 5
    law = tower_measure(1, (alpha, alpha_t, beta))
    weights = sorted(M.weight((alpha, alpha_t, beta)) for M in law)
    assert weights == [1, alpha * beta, alpha_t * beta, alpha * alpha_t * beta**2]
    assert sum(law.values()) == 1


@pytest.mark.parametrize("params", PARAMS)
def test_matchings_valid_with_fixed_black_count(params):
    blacks = set()
    for M in tower_measure(2, params):
        M.validate()
        blacks.add(M.counts()["black"])
    assert blacks == {4}


@pytest.mark.parametrize("params", PARAMS[:3])
@pytest.mark.parametrize("N", [1, 2])
def test_shuffle_law_is_exact(N, params):
    law = exact_pushforward(MeasureTable.point(None), lambda M: tower_shuffle_law(M, params), N)
    assert law == MeasureTable(tower_measure(N, params))


@pytest.mark.parametrize("params", PARAMS[:3])
def test_chain_matches_measure(params):
    law = exact_pushforward(MeasureTable.point(TowerState.packed(2)), lambda s: tower_step_law(s, params), 2)
    assert law.map(lambda s: TowerMatching(TowerState(s.x, s.y, s.z))) == MeasureTable(tower_measure(2, params))


def test_beta_zero_has_no_green():
    law = tower_measure(2, (1, 1, 0))
    assert len(law) == 1
    M = next(iter(law))
    assert M.counts()["green"] == 0
    assert sample_tower(6, 1, 1, 0, seed=3).counts()["green"] == 0


def test_theorem_weight_is_proportional():
    params = (half, 3, 2)
    law = tower_measure(2, params)
    ratios = {tower_measure_weight(M.state, params) / p for M, p in law.items()}
    assert len(ratios) == 1 and next(iter(ratios)) > 0


def test_printed_weight_reading_differs():
    params = (half, 3, 2)
    law = tower_measure(2, params)
    ratios = {tower_measure_weight(M.state, params, reading="printed") / p for M, p in law.items()}
    assert len(ratios) > 1


def test_sampler_seeded_and_valid():
    M = sample_tower(8, 1, 2, 1, seed=4)
    M.validate()
    assert M == sample_tower(8, 1, 2, 1, seed=4)
    batch = sample_tower_batch(3, 1, 1, 1, samples=4, seed=0)
    assert len(batch) == 4
    for B in batch:
        B.validate()


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_json_roundtrip(N, seed):
    M = sample_tower(N, 1, 1, 1, seed)
    data = M.to_json()
    assert TowerMatching.from_json(data) == M
    del data["dominoes"]
    assert TowerMatching.from_json(data) == M


def test_json_wrong_model():
    with pytest.raises(ValueError):
        TowerMatching.from_json({"model": "aztec", "N": 1})


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_lines_roundtrip(N, seed):
    M = sample_tower(N, 1, 1, 1, seed)
    L = tower_to_lines(M)
    assert L.heights.shape == (2 * N, 3 * N + 1)
    assert lines_to_tower(L) == M


def test_line_weight_matches_domino_weight():
    params = (half, 3, 2)
    ratios = {tower_to_lines(M).edge_weight(params) / M.weight(params) for M in tower_measure(2, params)}
    assert len(ratios) == 1


def test_lines_validation():
    h = np.array([[-1, 0, 0, -1], [-2, 0, 0, -2]])
    with pytest.raises(ValueError):
        TowerLines(h).validate()
    h = np.array([[-1, -1, -1, -1], [-2, -2, -2, -1]])
    with pytest.raises(ValueError):
        TowerLines(h).validate()


def test_counts_cover_all_kinds():
    M = sample_tower(5, 1, 1, 1, seed=0)
    c = M.counts()
    assert set(c) == set(KINDS)
    assert sum(c.values()) == len(build_tower(5).vertices) // 2


def test_piece_catalogue_has_five_shapes():
    cat = piece_catalogue(6, (1, 1, 1), seed=0, runs=30)
    assert set(cat) == {"basic-bloc", "hexagon+square-above", "hexagon+square-below", "hexagon", "square"}


def test_decompose_partitions_free_particles():
    pieces = decompose((-3, -1, 1), (-2, 1), (-4, -2, -1, 2), half, half)
    xs = [j for p in pieces for j in p.xs]
    assert len(xs) == len(set(xs))


def test_shuffle_step_records_catalogue():
    cat = Counter()
    rng = np.random.default_rng(0)
    M = None
    for _ in range(4):
        M = tower_shuffle_step(M, (1, 1, 1), rng, catalogue=cat)
    M.validate()
    assert M.N == 4 and sum(cat.values()) > 0
