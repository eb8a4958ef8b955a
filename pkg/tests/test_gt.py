from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shuffling.gt import (
    ContractError,
    GTPattern,
    WeakGTPattern,
    WeylConfig,
    count_gt_patterns,
    enumerate_interlacing,
    enumerate_parallel,
    enumerate_patterns,
    interlacing_det,
    interlaces,
    iter_weyl,
    packed,
    parallel_interlaces,
    superfactorial,
    vandermonde,
)


def weyl(max_n=4, lo=-4, hi=4):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.integers(lo, hi), min_size=n, max_size=n, unique=True).map(sorted)
    )


def test_weyl_config_rejects_unsorted():
    with pytest.raises(ContractError):
        WeylConfig((0, 0))
    with pytest.raises(ContractError):
        WeylConfig((2, 1))


@pytest.mark.parametrize(
    "lower, upper, expected",
    [((-1,), (-2, -1), True), ((0,), (0, 5), False), ((1, 3), (0, 2, 4), True)],
)
def test_interlaces_examples(lower, upper, expected):
    assert interlaces(lower, upper) is expected


def test_interlaces_level_mismatch():
    with pytest.raises(ContractError):
        interlaces((0, 1), (0, 1))


def test_weak_interlacing_allows_equalities():
    assert not interlaces((0,), (0, 5))
    assert interlaces((0,), (0, 5), strict=False)


@pytest.mark.parametrize("x, expected", [((5,), 1), ((0, 1, 2), 2), ((-3, -1, 1), 16)])
def test_vandermonde(x, expected):
    assert vandermonde(x) == expected


@pytest.mark.parametrize("top, expected", [(packed(3), 1), ((0, 3), 3), ((-3, -1, 1), 8)])
def test_count_gt_patterns_examples(top, expected):
    assert count_gt_patterns(top) == expected
    assert len(enumerate_patterns(top)) == expected


def test_superfactorial():
    # product of k! for k < n
    assert [superfactorial(n) for n in range(6)] == [1, 1, 1, 2, 12, 288]


@settings(max_examples=60, deadline=None)
@given(weyl(max_n=4, lo=0, hi=7))
def test_count_matches_enumeration(top):
    assert count_gt_patterns(top) == len(enumerate_patterns(top))


@given(weyl(max_n=5))
def test_vandermonde_positive(x):
    assert vandermonde(x) > 0
    assert count_gt_patterns(x) >= 1


@pytest.mark.parametrize(
    "upper, lower, expected", [((-2, -1), (-1,), 1), ((0, 1), (2,), 0)]
)
def test_interlacing_det_examples(upper, lower, expected):
    assert interlacing_det(upper, lower) == expected


def test_interlacing_det_is_indicator_exhaustive():
    for n in range(1, 5):
        for upper in iter_weyl(n, 0, 5):
            for lower in iter_weyl(n - 1, 0, 5):
                assert interlacing_det(upper, lower) == int(interlaces(lower, upper))


@pytest.mark.parametrize(
    "upper, expected", [((-2, -1), [(-1,)]), ((0, 2), [(1,), (2,)]), ((0, 3), [(1,), (2,), (3,)])]
)
def test_enumerate_interlacing(upper, expected):
    assert [tuple(v) for v in enumerate_interlacing(upper)] == expected


def test_packed_is_unique_pattern_below_packed():
    for N in range(1, 6):
        patterns = enumerate_patterns(packed(N))
        assert patterns == [GTPattern.packed(N)]


def test_parallel_state_space():
    # one parallel step from packed N=2 reaches x^1 = (0) over x^2 = (-2, -1)
    assert parallel_interlaces((0,), (-2, -1))
    assert not interlaces((0,), (-2, -1), strict=False)
    WeakGTPattern(((0,), (-2, -1)))
    with pytest.raises(ContractError):
        GTPattern(((0,), (-2, -1)))
    assert set(enumerate_interlacing((0, 3))) <= set(enumerate_parallel((0, 3)))


@given(weyl(max_n=4, lo=-3, hi=3))
def test_pattern_json_roundtrip(top):
    for pattern in enumerate_patterns(top)[:5]:
        assert GTPattern.from_json(pattern.to_json()) == pattern


def test_pattern_json_depth_mismatch():
    data = GTPattern.packed(2).to_json()
    data["depth"] = 3
    with pytest.raises(ContractError):
        GTPattern.from_json(data)


def test_counts_are_integral():
    for x in iter_weyl(3, -2, 4):
        assert Fraction(vandermonde(x), superfactorial(3)).denominator == 1
