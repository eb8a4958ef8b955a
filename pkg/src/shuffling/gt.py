"""Interlacing particle arrays: Weyl chamber configurations and Gelfand-Tsetlin patterns.

Positions are integers, levels are 1-based.  A configuration ``y`` of level
``n`` interlaces with ``x`` of level ``n + 1`` (written ``y < x``) when::

    x_1 < y_1 <= x_2 < y_2 <= ... < y_n <= x_{n+1}

The weak variant replaces every ``<`` by ``<=``.  The state space of the
parallel update is slightly larger than that: it is the support of one
Bernoulli step followed by a strict interlacing link, which reads::

    x_k < y_k <= x_{k+1} + 1

(see :func:`parallel_interlaces`).
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from ._exact import int_det


class ContractError(ValueError):
    """Raised when an operation receives arguments outside its contract."""


class WeylConfig(tuple):
    """A strictly increasing tuple of integers (one level of a pattern)."""

    def __new__(cls, positions: Iterable[int] = ()):
        self = super().__new__(cls, (int(p) for p in positions))
        if any(a >= b for a, b in zip(self, self[1:])):
            raise ContractError(f"positions must be strictly increasing: {tuple(self)}")
        return self

    @property
    def level(self) -> int:
        return len(self)

    def __repr__(self) -> str:
        return f"WeylConfig({tuple(self)!r})"


def packed(n: int) -> WeylConfig:
    """The packed level-``n`` configuration ``(-n, ..., -1)``."""
    return WeylConfig(range(-n, 0))


def interlaces(lower: Sequence[int], upper: Sequence[int], strict: bool = True) -> bool:
    """Return True when ``lower`` (level n) interlaces with ``upper`` (level n+1)."""
    if len(lower) + 1 != len(upper):
        raise ContractError(f"levels {len(lower)} and {len(upper)} are not consecutive")
    for k, y in enumerate(lower):
        if strict:
            if not (upper[k] < y <= upper[k + 1]):
                return False
        elif not (upper[k] <= y <= upper[k + 1]):
            return False
    return True


def parallel_interlaces(lower: Sequence[int], upper: Sequence[int]) -> bool:
    """True when ``lower`` strictly interlaces ``upper + b`` for some jump vector b in {0,1}^n."""
    if len(lower) + 1 != len(upper):
        raise ContractError(f"levels {len(lower)} and {len(upper)} are not consecutive")
    return all(upper[k] < y <= upper[k + 1] + 1 for k, y in enumerate(lower))


def vandermonde(x: Sequence[int]) -> int:
    """Vandermonde product over i < j of (x_j - x_i)."""
    out = 1
    for i, j in itertools.combinations(range(len(x)), 2):
        out *= x[j] - x[i]
    return out


def superfactorial(n: int) -> int:
    """Product 0! 1! ... (n-1)!"""
    return math.prod(math.factorial(k) for k in range(n))


def count_gt_patterns(top: Sequence[int]) -> int:
    """Number of Gelfand-Tsetlin patterns with the given top row."""
    num = vandermonde(top)
    den = superfactorial(len(top))
    q, r = divmod(num, den)
    if r:
        raise AssertionError(f"non-integral pattern count for {tuple(top)}")
    return q


def phi(x: int, y) -> int:
    """Interlacing kernel entry: 1 if y > x; a virtual ``y`` (None) gives 1."""
    if y is None:
        return 1
    return 1 if y > x else 0


def interlacing_matrix(upper: Sequence[int], lower: Sequence[int]) -> list[list[int]]:
    """Square matrix [phi(upper_j, lower_i)] with a virtual last lower entry."""
    n = len(upper)
    if len(lower) + 1 != n:
        raise ContractError("lower level must have one particle fewer than upper")
    rows = list(lower) + [None]
    return [[phi(upper[j], rows[i]) for j in range(n)] for i in range(n)]


def interlacing_det(upper: Sequence[int], lower: Sequence[int]) -> int:
    """Determinant form of the strict interlacing indicator."""
    return int_det(interlacing_matrix(upper, lower))


def enumerate_interlacing(upper: Sequence[int], strict: bool = True) -> list[WeylConfig]:
    """All lower configurations interlacing with ``upper``, lexicographically."""
    n = len(upper)
    if n < 2:
        raise ContractError("upper level must be at least 2")
    ranges = []
    for k in range(n - 1):
        lo = upper[k] + 1 if strict else upper[k]
        ranges.append(range(lo, upper[k + 1] + 1))
    out = []
    for combo in itertools.product(*ranges):
        if all(a < b for a, b in zip(combo, combo[1:])):
            out.append(WeylConfig(combo))
    return out


def enumerate_parallel(upper: Sequence[int]) -> list[WeylConfig]:
    """All lower configurations related to ``upper`` by :func:`parallel_interlaces`."""
    if len(upper) < 2:
        raise ContractError("upper level must be at least 2")
    ranges = [range(upper[k] + 1, upper[k + 1] + 2) for k in range(len(upper) - 1)]
    return [WeylConfig(c) for c in itertools.product(*ranges) if all(a < b for a, b in zip(c, c[1:]))]


def iter_weyl(n: int, lo: int, hi: int) -> Iterator[WeylConfig]:
    """Every level-n configuration with entries in [lo, hi]."""
    for combo in itertools.combinations(range(lo, hi + 1), n):
        yield WeylConfig(combo)


@dataclass(frozen=True)
class GTPattern:
    """An interlacing array x^1 < x^2 < ... < x^N.

    ``strict=False`` describes the state space of the parallel update, where
    consecutive levels are related by :func:`parallel_interlaces`.
    """

    levels: tuple[WeylConfig, ...]
    strict: bool = True

    def __post_init__(self):
        levels = tuple(WeylConfig(level) for level in self.levels)
        object.__setattr__(self, "levels", levels)
        for k, level in enumerate(levels, start=1):
            if len(level) != k:
                raise ContractError(f"level {k} has {len(level)} particles")
        related = interlaces if self.strict else parallel_interlaces
        for lower, upper in zip(levels, levels[1:]):
            if not related(lower, upper):
                raise ContractError(f"{tuple(lower)} does not interlace with {tuple(upper)}")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def __getitem__(self, n: int) -> WeylConfig:
        """Level ``n`` (1-based)."""
        return self.levels[n - 1]

    @classmethod
    def packed(cls, depth: int, strict: bool = True) -> "GTPattern":
        return cls(tuple(packed(n) for n in range(1, depth + 1)), strict=strict)

    def to_json(self) -> dict:
        return {"depth": self.depth, "levels": [list(level) for level in self.levels]}

    @classmethod
    def from_json(cls, data, strict: bool = True) -> "GTPattern":
        if isinstance(data, str):
            data = json.loads(data)
        pattern = cls(tuple(tuple(level) for level in data["levels"]), strict=strict)
        if pattern.depth != data.get("depth", pattern.depth):
            raise ContractError("depth field disagrees with number of levels")
        return pattern


def WeakGTPattern(levels) -> GTPattern:
    """Pattern in the parallel-update state space (levels related by :func:`parallel_interlaces`)."""
    return GTPattern(tuple(levels), strict=False)


def enumerate_patterns(top: Sequence[int], strict: bool = True) -> list[GTPattern]:
    """All patterns below a fixed top row (brute force; small inputs only).

    ``strict=False`` enumerates the parallel-update state space.
    """
    top = WeylConfig(top)
    lowers = (lambda level: enumerate_interlacing(level)) if strict else enumerate_parallel

    def below(level):
        if len(level) == 1:
            yield (level,)
            return
        for lower in lowers(level):
            for chain in below(lower):
                yield chain + (level,)

    return [GTPattern(chain, strict=strict) for chain in below(top)]
