import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shuffling.aztec import particles_to_tiling
from shuffling.gt import ContractError, GTPattern, iter_weyl, interlaces
from shuffling.dynamics import (
    ExtendedState,
    Schedule,
    TowerState,
    admissible_moves,
    aztec_via_dynamics,
    constrained_update,
    extended_parallel_step,
    extended_step_law,
    lines_to_particles,
    parallel_step,
    parallel_step_law,
    particles_to_lines,
    read_trajectory,
    run_extended,
    sequential_step,
    sequential_step_law,
    tasep_heights,
    tower_jump_probabilities,
    tower_step,
    tower_step_law,
    update_law,
    write_trajectory,
)
from shuffling.oracle import (
    MeasureTable,
    aztec_measure,
    exact_pushforward,
    extended_product_form,
    parallel_product_form,
    sequential_product_form,
)

half = Fraction(1, 2)
probs = st.fractions(min_value=0, max_value=1, max_denominator=10)


def test_admissible_moves_blocking():
    # x_1 = 0 is blocked by y_1 = 1, x_2 = 1 may stay on y_1 or jump
    assert admissible_moves((0, 1), (1,)) == [(0,), (1, 2)]
    assert admissible_moves((0, 1), (2,)) == [(0, 1), (2,)]
    assert admissible_moves((0,), None) == [(0, 1)]
    assert admissible_moves((0, 2), (1,)) == [(0,), (2, 3)]


def test_admissible_moves_dead_end():
    with pytest.raises(AssertionError):
        admissible_moves((0, 1), (3,))


@settings(max_examples=50, deadline=None)
@given(probs, st.integers(2, 4), st.integers(0, 10**6))
def test_constrained_update_keeps_interlacing(p, n, seed):
    rng = np.random.default_rng(seed)
    for x in iter_weyl(n, 0, 3):
        for y in iter_weyl(n - 1, 0, 4):
            if not interlaces(y, x):
                continue
            new = constrained_update(x, y, p, rng.random(n))
            assert interlaces(y, new)
            law = update_law(x, y, p)
            assert sum(law.values()) == 1 and new in law


def test_update_law_free_particles():
    law = update_law((0, 5), None, Fraction(1, 3))
    assert law[(1, 6)] == Fraction(1, 9)
    assert law[(0, 5)] == Fraction(4, 9)


@pytest.mark.parametrize("law_fn", [sequential_step_law, parallel_step_law])
def test_step_laws_are_stochastic(law_fn):
    state = GTPattern.packed(3)
    for _ in range(2):
        law = law_fn(state, Fraction(2, 5))
        assert sum(law.values()) == 1
        state = max(law, key=law.get)


def test_sequential_step_stays_strict():
    rng = np.random.default_rng(1)
    state = GTPattern.packed(5)
    for _ in range(20):
        state = sequential_step(state, 0.6, rng)
        GTPattern(state.levels)  # strict interlacing is checked on construction


def test_parallel_step_runs():
    rng = np.random.default_rng(2)
    state = GTPattern.packed(4)
    for _ in range(10):
        state = parallel_step(state, 0.5, rng)
    assert state.depth == 4


@pytest.mark.parametrize("N, p, t", [(2, half, 3), (3, Fraction(1, 3), 2), (3, Fraction(3, 4), 3)])
def test_sequential_conservation(N, p, t):
    mu = exact_pushforward(MeasureTable.point(GTPattern.packed(N)), lambda s: sequential_step_law(s, p), t)
    assert mu == sequential_product_form(N, p, t)


@pytest.mark.parametrize("N, p", [(2, half), (3, Fraction(1, 3))])
def test_parallel_conservation(N, p):
    start = parallel_product_form(N, p, 0)
    mu = exact_pushforward(start, lambda s: parallel_step_law(s, p), 2)
    assert mu == parallel_product_form(N, p, 2)


def test_p_zero_freezes_everything():
    state = GTPattern.packed(3)
    assert sequential_step_law(state, 0) == {state: 1}
    assert extended_step_law(ExtendedState.packed(3), Schedule.frozen()) == {
        ExtendedState(ExtendedState.packed(3).x, ExtendedState.packed(3).y, 1): 1
    }


def test_schedule_activation():
    s = Schedule(Fraction(1, 3))
    assert s(2, -1) == 0 and s(2, 0) == Fraction(1, 3)
    assert Schedule.aztec(2).p == Fraction(4, 5)
    state = ExtendedState.packed(3)
    assert [state.tau(k) for k in (1, 2, 3)] == [0, -1, -2]


@pytest.mark.parametrize("N, a", [(1, 1), (2, 1), (2, 2), (3, Fraction(1, 2))])
def test_extended_chain_gives_aztec_measure(N, a):
    law = exact_pushforward(
        MeasureTable.point(ExtendedState.packed(N)),
        lambda s: extended_step_law(s, Schedule.aztec(a)),
        N,
    )
    tilings = law.map(lambda s: particles_to_tiling(s.x, s.y))
    assert tilings == aztec_measure(N, a)


@pytest.mark.parametrize("N, t", [(2, 2), (3, 3)])
def test_extended_product_form(N, t):
    sched = Schedule.aztec(2)
    law = exact_pushforward(MeasureTable.point(ExtendedState.packed(N)), lambda s: extended_step_law(s, sched), t)
    assert law == extended_product_form(N, sched, t)


def test_aztec_via_dynamics_is_valid_and_seeded():
    T = aztec_via_dynamics(8, 1, seed=5)
    T.validate()
    assert T == aztec_via_dynamics(8, 1, seed=5)


def test_extended_state_validation():
    with pytest.raises(ContractError):
        ExtendedState(((0,), (-2, -1)), ()).validate()
    with pytest.raises(ContractError):
        ExtendedState(((5,), (-2, -1)), ((-1,),)).validate()


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_lines_roundtrip(N, seed):
    for state in run_extended(N, 1, seed)[1:]:
        assert lines_to_particles(particles_to_lines(state), t=state.t) == state


def test_trajectory_json_roundtrip():
    traj = run_extended(4, 2, seed=3)
    buf = io.StringIO()
    write_trajectory(traj, buf)
    buf.seek(0)
    assert list(read_trajectory(buf)) == traj


def test_tasep_projection():
    traj = run_extended(6, 1, seed=0, steps=12)
    h = tasep_heights(traj)
    assert h.shape == (13, 6)
    assert set(np.unique(np.diff(h, axis=0))) <= {0, 1}
    # particles stay ordered (exclusion)
    assert (np.diff(tasep_heights(traj, "sequential-edge"), axis=1) < 0).all()
    with pytest.raises(ValueError):
        tasep_heights(traj, "middle")


def test_tower_jump_probabilities():
    assert tower_jump_probabilities((1, 1, 1)) == (half, half)
    assert tower_jump_probabilities((2, 3, Fraction(1, 2))) == (half, Fraction(3, 5))


def test_tower_state_packed_and_json():
    s = TowerState.packed(3)
    s.validate()
    assert TowerState.from_json(s.to_json()) == s


@pytest.mark.parametrize("params", [(1, 1, 1), (half, 3, 2)])
def test_tower_step_law(params):
    state = TowerState.packed(2)
    for _ in range(2):
        law = tower_step_law(state, params)
        assert sum(law.values()) == 1
        for s in law:
            s.validate()
        state = max(law, key=law.get)


def test_tower_step_random_run_valid():
    rng = np.random.default_rng(0)
    state = TowerState.packed(4)
    for _ in range(8):
        state = tower_step(state, (1, 2, 1), rng)
        state.validate()
    assert state.t == 8


def test_extended_step_matches_law_support():
    rng = np.random.default_rng(9)
    state = ExtendedState.packed(3)
    sched = Schedule(half)
    for _ in range(3):
        nxt = extended_parallel_step(state, sched, rng)
        assert nxt in extended_step_law(state, sched)
        state = nxt
