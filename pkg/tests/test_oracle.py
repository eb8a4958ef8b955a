import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shuffling.aztec import particles_to_tiling, tiling_to_particles
from shuffling.dynamics import ExtendedState, Schedule, extended_step_law
from shuffling.gt import packed
from shuffling.oracle import (
    CostGuardError,
    MeasureTable,
    aztec_measure,
    aztec_theorem_weight,
    chi_square,
    enumerate_aztec,
    exact_pushforward,
    flip_distances,
    packed_ic_check,
    packed_ic_measure,
    psi,
    ratio_classes,
    theorem_f,
    tv_distance,
)

half = Fraction(1, 2)


def test_measure_table_basics():
    m = MeasureTable.from_weights({"a": 1, "b": 3})
    assert m["b"] == Fraction(3, 4) and m["c"] == 0
    assert m.total() == 1 and len(m) == 2
    assert MeasureTable.uniform("xyz")["x"] == Fraction(1, 3)
    assert MeasureTable.empirical("aab") == MeasureTable({"a": Fraction(2, 3), "b": Fraction(1, 3)})
    assert m.map(lambda s: "z") == MeasureTable.point("z")
    assert MeasureTable({"a": 1, "b": 0}) == MeasureTable.point("a")
    rows = json.loads(m.to_json())
    assert rows[1] == {"state": "'b'", "mass": "3/4"}


def test_zero_mass_cannot_normalize():
    with pytest.raises(ZeroDivisionError):
        MeasureTable({"a": 0}).normalized()


def test_tv_distance_examples():
    assert tv_distance({"a": 1}, {"b": 1}) == 1
    assert tv_distance({"a": 1, "b": 1}, {"a": 1}) == half
    assert tv_distance(MeasureTable.point(0), MeasureTable.point(0)) == 0


@given(st.lists(st.integers(1, 9), min_size=3, max_size=3), st.lists(st.integers(1, 9), min_size=3, max_size=3))
def test_tv_distance_is_a_metric_value(p, q):
    P = dict(enumerate(p))
    Q = dict(enumerate(q))
    d = tv_distance(P, Q)
    assert 0 <= d <= 1 and d == tv_distance(Q, P)


def test_chi_square():
    stat, dof = chi_square({"a": 50, "b": 50}, {"a": 1, "b": 1})
    assert stat == 0 and dof == 1
    assert chi_square({"c": 1}, {"a": 1, "b": 1})[0] == math.inf


def test_enumeration_guard():
    with pytest.raises(CostGuardError):
        enumerate_aztec(5)
    with pytest.raises(CostGuardError):
        exact_pushforward(MeasureTable.point(0), lambda s: {s: 1}, 4)


def test_flip_graph_reaches_everything():
    assert len(flip_distances(3)) == 64
    # the all-vertical tiling sits at distance N(N+1)(2N+1)/6
    for N in (1, 2, 3):
        assert max(flip_distances(N).values()) == N * (N + 1) * (2 * N + 1) // 6


def test_uniform_measure_at_a_one():
    law = aztec_measure(2, 1)
    assert set(law.masses.values()) == {Fraction(1, 8)}


def test_weighted_measure_masses():
    law = aztec_measure(1, 2)
    # two tilings: both horizontal (weight 1) or both vertical (weight 4)
    assert sorted(law.masses.values()) == [Fraction(1, 5), Fraction(4, 5)]


def test_particle_view_of_enumeration():
    for T in enumerate_aztec(3):
        xs, ys = tiling_to_particles(T)
        assert particles_to_tiling(xs, ys) == T


def test_psi_values():
    # Psi_i(x) for N = 1: coefficient of z**(-x-1) in 1, nonzero only at x = -1
    assert psi(1, -1, 1) == 1 and psi(1, 0, 1) == 0
    # (1 - z) at N = 2, i = 1: z**(-x-1) coefficient is 1 at x = -1, -1 at x = -2
    assert psi(1, -1, 2) == 1 and psi(1, -2, 2) == -1


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_packed_initial_condition(N):
    assert packed_ic_check(N)
    assert packed_ic_measure(N) == {packed(N): 1}


def test_theorem_f_readings():
    f = theorem_f(Fraction(1, 3))
    assert (f(0), f(-1), f(1), f(2)) == (Fraction(2, 3), Fraction(1, 3), 0, 0)
    g = theorem_f(Fraction(1, 3), reading="printed")
    assert (g(-1), g(1)) == (0, Fraction(1, 3))


@pytest.mark.parametrize("N, a", [(1, 1), (2, 2), (3, Fraction(1, 2)), (3, 3)])
def test_aztec_theorem_weight(N, a):
    law = exact_pushforward(
        MeasureTable.point(ExtendedState.packed(N)), lambda s: extended_step_law(s, Schedule.aztec(a)), N
    )
    weights = {s: aztec_theorem_weight(s, a) for s in law}
    classes = ratio_classes(weights, law.masses)
    assert len(classes) == 1 and next(iter(classes)) > 0


def test_aztec_theorem_printed_reading_fails():
    N, a = 3, 2
    law = exact_pushforward(
        MeasureTable.point(ExtendedState.packed(N)), lambda s: extended_step_law(s, Schedule.aztec(a)), N
    )
    weights = {s: aztec_theorem_weight(s, a, reading="printed") for s in law}
    assert len(ratio_classes(weights, law.masses)) > 1


def test_ratio_classes():
    assert ratio_classes({"a": 2, "b": 4}, {"a": 1, "b": 2}) == {2}
