from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shuffling.gt import enumerate_interlacing, iter_weyl, packed
from shuffling.kernels import (
    DegenerateParameterError,
    KernelTable,
    ParameterError,
    Symbol,
    WindowError,
    binomial_pt,
    generalized_level_kernel,
    generalized_link_row,
    generalized_markov_link,
    intertwine_defect,
    laurent_coeff,
    level_kernel,
    level_kernel_row,
    markov_link,
    markov_link_row,
    one_particle_kernel,
    one_step,
    row_sum,
    toeplitz_level_down,
    toeplitz_row,
    toeplitz_same_level,
)

half = Fraction(1, 2)
probs = st.fractions(min_value=0, max_value=1, max_denominator=12)


def test_one_particle_kernel():
    p = Fraction(3, 10)
    assert one_step(0, 1, p) == Fraction(3, 10)
    assert one_step(0, 0, p) == Fraction(7, 10)
    assert one_step(0, 2, p) == 0
    F = one_particle_kernel(p)
    assert F.coeff(-1) == p and F.coeff(0) == 1 - p and F.coeff(1) == 0


def test_one_particle_extremes():
    assert one_step(4, 4, 0) == 1 and one_step(4, 5, 0) == 0
    assert one_step(4, 5, 1) == 1 and one_step(4, 4, 1) == 0


def test_probability_range_checked():
    with pytest.raises(ParameterError):
        one_particle_kernel(Fraction(3, 2))


def test_binomial_pt():
    assert binomial_pt(2, 1, half) == half
    assert binomial_pt(0, 0, Fraction(1, 3)) == 1
    assert binomial_pt(3, 3, Fraction(1, 3)) == Fraction(1, 27)
    assert binomial_pt(3, 4, half) == 0


@given(probs, st.integers(0, 4))
def test_binomial_is_convolution(p, t):
    F = Symbol.constant(1)
    for _ in range(t):
        F = F * one_particle_kernel(p)
    for x in range(-1, t + 2):
        assert F.coeff(-x) == binomial_pt(t, x, p)


def test_level_kernel_row_example():
    row = level_kernel_row((0, 2), half)
    assert row == {(0, 2): Fraction(1, 4), (1, 2): Fraction(1, 8), (0, 3): Fraction(3, 8), (1, 3): Fraction(1, 4)}
    assert level_kernel((0, 1), (0, 1), Fraction(1, 3)) == Fraction(4, 9)


def test_level_kernel_n1_is_walk():
    p = Fraction(2, 7)
    for y in range(-1, 3):
        assert level_kernel((0,), (y,), p) == one_step(0, y, p)


@settings(max_examples=40, deadline=None)
@given(probs, st.integers(1, 4))
def test_level_kernel_stochastic_and_nonnegative(p, n):
    for x in iter_weyl(n, 0, 4):
        row = level_kernel_row(x, p)
        assert row_sum(row) == 1
        assert all(v >= 0 for v in row.values())


def test_markov_link_examples():
    assert markov_link((0, 2), (1,)) == half == markov_link((0, 2), (2,))
    assert markov_link_row((-2, -1)) == {(-1,): 1}
    row = markov_link_row((0, 2, 4))
    assert row_sum(row) == 1 and len(row) == 4
    assert row[(1, 4)] == Fraction(3, 8)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: st.lists(st.integers(-3, 5), min_size=n, max_size=n, unique=True).map(sorted)))
def test_markov_link_stochastic(x):
    assert row_sum(markov_link_row(x)) == 1


def test_laurent_coeff_examples():
    p = Fraction(1, 5)
    F = Symbol.one_particle(p)
    assert [laurent_coeff(F, m) for m in (-2, -1, 0, 1)] == [0, p, 1 - p, 0]
    G = Symbol.geometric(1)
    assert [laurent_coeff(G, m) for m in (-1, 0, 1, 5)] == [0, 1, 1, 1]
    assert [laurent_coeff(Symbol.constant(), m) for m in (-1, 0, 1)] == [0, 1, 0]
    assert laurent_coeff(Symbol.binomial(3), 2) == 3


def test_laurent_coeff_unsupported():
    with pytest.raises(NotImplementedError):
        laurent_coeff(lambda z: z, 0)


def test_toeplitz_one_variable_is_walk():
    p = Fraction(1, 4)
    F = Symbol.one_particle(p)
    for y in range(-1, 3):
        assert toeplitz_same_level((1,), F, (0,), (y,)) == one_step(0, y, p)


def test_toeplitz_row_sums():
    F = Symbol.laurent({0: 1, 1: Fraction(1, 5)})
    for x in iter_weyl(2, 1, 4):
        assert row_sum(toeplitz_row(toeplitz_same_level, (1, 2), F, x, -2, 6)) == 1
    G = Symbol.geometric(Fraction(1, 4))
    for x in iter_weyl(3, 0, 3):
        row = toeplitz_row(toeplitz_level_down, (1, 2, 3), G, x, -30, 3, down=True)
        assert abs(row_sum(row) - 1) < Fraction(1, 10**6)


def test_toeplitz_parameter_errors():
    F = Symbol.laurent({0: 1, -1: 1})
    with pytest.raises(DegenerateParameterError):
        toeplitz_same_level((1, 1), F, (0, 1), (0, 1))
    with pytest.raises(ParameterError):
        # F(1/a) = 1 + a vanishes at a = -1
        toeplitz_same_level((-1, 2), F, (0, 1), (0, 1))


def test_level_down_packed_is_forced():
    assert generalized_link_row((-2, -1), (2, 3)) == {(-1,): 1}
    assert generalized_markov_link((-2, -1), (-1,), (2, 3)) == 1


def test_generalized_level_kernel():
    assert generalized_level_kernel((0, 2), (1, 3), (1, 1), 1) == Fraction(1, 4)
    for y in [(0, 2), (1, 2), (0, 3)]:
        assert generalized_level_kernel((0, 2), y, (1, 1), 1, tau=-1) == int(y == (0, 2))
    a = 2
    assert generalized_level_kernel((0,), (1,), (1,), a * a) == Fraction(4, 5)
    assert generalized_level_kernel((0, 2), (2, 3), (1, 1), 1) == 0


def test_generalized_link():
    assert generalized_markov_link((0, 2), (1,), (1, 1)) == half
    row = generalized_link_row((0, 2), (1, 2))
    assert row_sum(row) == 1
    # n = 2: weight alpha_1**y * alpha_2**(|x| - y), normalized
    w = {y: Fraction(1) ** y * 2 ** (2 - y) for y in (1, 2)}
    assert row == {(y,): v / sum(w.values()) for y, v in w.items()}
    with pytest.raises(DegenerateParameterError):
        generalized_markov_link((0, 2, 3), (1, 2), (1, 1, 2))


def test_confluent_limits():
    p = Fraction(2, 5)
    beta = p / (1 - p)
    for x in iter_weyl(3, 0, 4):
        for y, v in level_kernel_row(x, p).items():
            assert generalized_level_kernel(x, y, (3, 3, 3), beta / 3) == v
        for y in enumerate_interlacing(x):
            assert generalized_markov_link(x, y, (5, 5, 5)) == markov_link(x, y)


@pytest.mark.parametrize("n, p", [(2, half), (3, Fraction(1, 3)), (2, 0), (3, 0), (4, Fraction(4, 5))])
def test_intertwining(n, p):
    assert intertwine_defect(n, p, (0, 8)) == 0


@pytest.mark.parametrize("a", [1, 2])
def test_intertwining_aztec_rates(a):
    p = Fraction(a * a, 1 + a * a)
    assert intertwine_defect(3, p, (0, 7)) == 0


def test_generalized_intertwining():
    assert intertwine_defect(2, alpha=(1, 2), beta=Fraction(1, 2), window=(0, 6)) == 0
    assert intertwine_defect(3, alpha=(2, 2, 2), beta=3, window=(0, 6)) == 0


def test_window_errors():
    with pytest.raises(WindowError):
        intertwine_defect(4, half, (0, 2))


def test_kernel_table():
    table = KernelTable.build(lambda x: level_kernel_row(x, half), 2, 2, (0, 5))
    assert all(v == 1 for v in table.row_sums().values())
    link = KernelTable.build(markov_link_row, 2, 1, (0, 6))
    product = table @ link
    assert all(row_sum(row) == 1 for row in product.values())
    assert packed(2) not in table.rows
