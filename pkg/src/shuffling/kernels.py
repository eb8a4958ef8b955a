"""Transition kernels on Weyl chambers and their Toeplitz-type generalizations.

Everything here is exact: probabilities, weights and symbol coefficients are
``fractions.Fraction``.  Kernels are evaluated entry by entry; ``*_row``
helpers return the (finite) support of a row as a dict.

Conventions
-----------
A *symbol* ``F(z)`` determines the Toeplitz entries ``f(m)`` as the
coefficient of ``z**m`` in the Laurent expansion of ``F`` around the origin.
The one-particle walk has ``F(z) = 1 - p + p/z`` so that ``f(-1) = p`` is a
jump from ``x`` to ``x + 1`` (entries are ``f(x - y)``).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from ._exact import as_fraction, det
from .gt import (
    ContractError,
    WeylConfig,
    enumerate_interlacing,
    interlaces,
    iter_weyl,
    vandermonde,
)


class ParameterError(ValueError):
    """A kernel parameter lies outside its admissible range."""


class DegenerateParameterError(ParameterError):
    """Repeated parameters where the formula needs distinct values."""


class WindowError(ValueError):
    """A window is too small to contain the supports it must hold."""


# ---------------------------------------------------------------------------
# Symbols and Laurent coefficients


@dataclass(frozen=True)
class Symbol:
    """``F(z) = (sum_e c_e z**e) * prod_k (1 - r_k z)**(-m_k)``.

    The expansion is the one valid in the annulus ``0 < |z| < min 1/|r_k|``.
    Finite Laurent polynomials have no poles; ``(1 - z)**-1`` is
    ``Symbol.geometric(1)``.
    """

    terms: tuple[tuple[int, Fraction], ...]
    poles: tuple[tuple[Fraction, int], ...] = ()
    label: str = field(default="", compare=False)

    @classmethod
    def laurent(cls, coeffs: Mapping[int, object], label: str = "") -> "Symbol":
        terms = tuple(sorted((int(e), as_fraction(c)) for e, c in coeffs.items() if c != 0))
        return cls(terms, (), label or _poly_label(terms))

    @classmethod
    def constant(cls, c=1) -> "Symbol":
        return cls.laurent({0: c})

    @classmethod
    def one_particle(cls, p) -> "Symbol":
        p = as_fraction(p)
        return cls.laurent({0: 1 - p, -1: p}, label=f"1-{p}+{p}/z")

    @classmethod
    def geometric(cls, r=1, power: int = 1) -> "Symbol":
        """``(1 - r z)**(-power)``."""
        r = as_fraction(r)
        if r == 0 or power == 0:
            return cls.constant(1)
        if power < 0:
            return cls.binomial(-power, r)
        return cls(((0, Fraction(1)),), ((r, power),), f"(1-{r}z)^-{power}")

    @classmethod
    def binomial(cls, k: int, r=1) -> "Symbol":
        """``(1 - r z)**k`` for ``k >= 0``."""
        r = as_fraction(r)
        coeffs = {j: math.comb(k, j) * (-r) ** j for j in range(k + 1)}
        return cls.laurent(coeffs, label=f"(1-{r}z)^{k}")

    def __mul__(self, other: "Symbol") -> "Symbol":
        prod: dict[int, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                prod[e1 + e2] = prod.get(e1 + e2, Fraction(0)) + c1 * c2
        poles: dict[Fraction, int] = {}
        for r, m in self.poles + other.poles:
            poles[r] = poles.get(r, 0) + m
        terms = tuple(sorted((e, c) for e, c in prod.items() if c != 0))
        label = f"({self.label})*({other.label})"
        return Symbol(terms, tuple(sorted(poles.items())), label)

    def radius(self) -> float:
        """Outer radius of the annulus of convergence (inf for polynomials)."""
        if not self.poles:
            return math.inf
        return min(1 / abs(float(r)) for r, _ in self.poles)

    def analytic_at(self, z) -> bool:
        z = as_fraction(z)
        if z == 0:
            return not any(e < 0 for e, _ in self.terms)
        return all(1 - r * z != 0 for r, _ in self.poles) and abs(z) < self.radius()

    def __call__(self, z) -> Fraction:
        z = as_fraction(z)
        if not self.analytic_at(z):
            raise ParameterError(f"symbol {self.label} is not analytic at {z} in its annulus")
        return self.evaluate(z)

    def evaluate(self, z) -> Fraction:
        """Value of the rational function at z, ignoring the annulus."""
        z = as_fraction(z)
        if any(1 - r * z == 0 for r, _ in self.poles) or (z == 0 and self.terms[0][0] < 0):
            raise ParameterError(f"symbol {self.label} has a pole at {z}")
        val = sum((c * z**e for e, c in self.terms), Fraction(0))
        for r, m in self.poles:
            val /= (1 - r * z) ** m
        return val

    def _series(self, d: int) -> Fraction:
        return _pole_series(self.poles, d)

    def coeff(self, m: int) -> Fraction:
        """Coefficient of ``z**m``."""
        if not self.poles:
            for e, c in self.terms:
                if e == m:
                    return c
            return Fraction(0)
        return sum((c * self._series(m - e) for e, c in self.terms if m - e >= 0), Fraction(0))

    def support(self) -> tuple[int, float]:
        """(lowest exponent, highest exponent or inf)."""
        lo = min(e for e, _ in self.terms)
        hi = math.inf if self.poles else max(e for e, _ in self.terms)
        return lo, hi


def _poly_label(terms) -> str:
    if not terms:
        return "0"
    return "+".join(f"{c}z^{e}" for e, c in terms)


@lru_cache(maxsize=None)
def _pole_series(poles: tuple[tuple[Fraction, int], ...], d: int) -> Fraction:
    if d < 0:
        return Fraction(0)
    if not poles:
        return Fraction(1) if d == 0 else Fraction(0)
    (r, m), rest = poles[0], poles[1:]
    if not rest:
        return math.comb(d + m - 1, m - 1) * r**d
    return sum(
        (math.comb(k + m - 1, m - 1) * r**k * _pole_series(rest, d - k) for k in range(d + 1)),
        Fraction(0),
    )


def laurent_coeff(F: Symbol, m: int) -> Fraction:
    """Coefficient of ``z**m`` of a supported symbol.

    Anything that is not a :class:`Symbol` is outside the supported family.
    """
    if not isinstance(F, Symbol):
        raise NotImplementedError(f"unsupported symbol {F!r}")
    return F.coeff(m)


# ---------------------------------------------------------------------------
# One particle


def _probability(p) -> Fraction:
    p = as_fraction(p)
    if not 0 <= p <= 1:
        raise ParameterError(f"jump probability {p} outside [0, 1]")
    return p


def one_particle_kernel(p) -> Symbol:
    """Symbol of the Bernoulli(p) one-sided walk; entry (x, y) is f(x - y)."""
    return Symbol.one_particle(_probability(p))


def one_step(x: int, y: int, p) -> Fraction:
    """P(x, y) for the one-particle walk."""
    p = as_fraction(p)
    if y == x + 1:
        return p
    if y == x:
        return 1 - p
    return Fraction(0)


def binomial_pt(t: int, x: int, p) -> Fraction:
    """t-step transition probability of the walk from 0 to x."""
    p = as_fraction(p)
    if not 0 <= x <= t:
        return Fraction(0)
    return math.comb(t, x) * p**x * (1 - p) ** (t - x)


# ---------------------------------------------------------------------------
# Level kernel and Markov link


def level_kernel(x: Sequence[int], y: Sequence[int], p) -> Fraction:
    """Doob-conditioned level-n transition probability from x to y."""
    p = _probability(p)
    n = len(x)
    if len(y) != n:
        raise ContractError("level kernel maps a level to itself")
    if any(d not in (0, 1) for d in (b - a for a, b in zip(x, y))):
        return Fraction(0)
    d = det([[one_step(x[i], y[j], p) for j in range(n)] for i in range(n)])
    if d == 0:
        return Fraction(0)
    return Fraction(vandermonde(y), vandermonde(x)) * d


def level_kernel_row(x: Sequence[int], p) -> dict[WeylConfig, Fraction]:
    """Support of row x of the level kernel (jumps in {0, 1} per particle)."""
    row = {}
    for jumps in itertools.product((0, 1), repeat=len(x)):
        y = tuple(a + j for a, j in zip(x, jumps))
        if all(a < b for a, b in zip(y, y[1:])):
            val = level_kernel(x, y, p)
            if val:
                row[WeylConfig(y)] = val
    return row


def markov_link(x: Sequence[int], y: Sequence[int]) -> Fraction:
    """Link from level n (x) to level n-1 (y): uniform GT measure given x."""
    n = len(x)
    if len(y) != n - 1:
        raise ContractError("Markov link maps level n to level n-1")
    if not interlaces(y, x):
        return Fraction(0)
    return Fraction(math.factorial(n - 1) * vandermonde(y), vandermonde(x))


def markov_link_row(x: Sequence[int]) -> dict[WeylConfig, Fraction]:
    return {y: markov_link(x, y) for y in enumerate_interlacing(x)}


# ---------------------------------------------------------------------------
# Toeplitz kernels with distinct parameters


def _check_params(a: Sequence, F: Symbol, count: int, annulus: bool = True) -> list[Fraction]:
    a = [as_fraction(v) for v in a]
    if any(v == 0 for v in a):
        raise ParameterError("parameters a_i must be non-zero")
    if len(set(a)) != len(a):
        raise DegenerateParameterError(f"repeated parameters {a}; use the confluent kernels")
    for v in a[:count]:
        if annulus and not F.analytic_at(1 / v):
            raise ParameterError(f"1/{v} lies outside the annulus of {F.label}")
        if F.evaluate(1 / v) == 0:
            raise ParameterError(f"symbol {F.label} vanishes or is singular at 1/{v}")
    return a


def _power_det(a: Sequence[Fraction], x: Sequence[int]) -> Fraction:
    n = len(x)
    return det([[a[i] ** x[j] for j in range(n)] for i in range(n)])


def toeplitz_same_level(a: Sequence, F: Symbol, x: Sequence[int], y: Sequence[int]) -> Fraction:
    """T_n(a; F)(x, y) for x, y in the same Weyl chamber."""
    n = len(x)
    a = _check_params(a, F, n)
    if len(a) != n or len(y) != n:
        raise ContractError("need n parameters and two level-n configurations")
    fdet = det([[F.coeff(x[i] - y[j]) for j in range(n)] for i in range(n)])
    if fdet == 0:
        return Fraction(0)
    norm = math.prod((F.evaluate(1 / v) for v in a), start=Fraction(1))
    return _power_det(a, y) / _power_det(a, x) * fdet / norm


def toeplitz_level_down(
    a: Sequence, F: Symbol, x: Sequence[int], y: Sequence[int], annulus: bool = True
) -> Fraction:
    """T^n_{n-1}(a; F)(x, y): level n to level n-1, virtual last column a_n**x.

    ``annulus=False`` skips the annulus requirement; it is only safe when the
    row has finite support, as for the generalized Markov link.
    """
    n = len(x)
    a = _check_params(a, F, n - 1, annulus)
    if len(a) != n or len(y) != n - 1:
        raise ContractError("need n parameters, a level-n x and a level-(n-1) y")
    rows = [[F.coeff(x[i] - y[j]) for j in range(n - 1)] + [a[n - 1] ** x[i]] for i in range(n)]
    fdet = det(rows)
    if fdet == 0:
        return Fraction(0)
    norm = math.prod((F.evaluate(1 / v) for v in a[: n - 1]), start=Fraction(1))
    return _power_det(a[: n - 1], y) / _power_det(a, x) * fdet / norm


def toeplitz_row(
    kernel: Callable, a: Sequence, F: Symbol, x: Sequence[int], lo: int, hi: int, down: bool = False
) -> dict[WeylConfig, Fraction]:
    """Entries of a Toeplitz kernel row over targets with entries in [lo, hi]."""
    size = len(x) - 1 if down else len(x)
    row = {}
    for y in iter_weyl(size, lo, hi):
        val = kernel(a, F, x, y)
        if val:
            row[y] = val
    return row


# ---------------------------------------------------------------------------
# Generalized (alpha, beta) kernels


def _all_equal(values: Sequence[Fraction]) -> bool:
    return all(v == values[0] for v in values)


def generalized_level_kernel(
    x: Sequence[int], y: Sequence[int], alpha: Sequence, beta, tau: int = 0
) -> Fraction:
    """Level kernel with column weights ``alpha`` and diagonal weight ``beta``.

    Frozen (identity) for ``tau < 0``.  Equal alphas use the closed form
    ``Delta(y)/Delta(x) * prod (alpha beta)**(y_j - x_j) / (1 + alpha beta)**n``.
    """
    n = len(x)
    alpha = [as_fraction(v) for v in alpha][:n]
    beta = as_fraction(beta)
    if len(alpha) != n or len(y) != n:
        raise ContractError("need n alphas and two level-n configurations")
    if tau < 0 or beta == 0:
        return Fraction(1) if tuple(x) == tuple(y) else Fraction(0)
    steps = [b - a for a, b in zip(x, y)]
    if any(s not in (0, 1) for s in steps):
        return Fraction(0)
    if _all_equal(alpha):
        w = alpha[0] * beta
        return Fraction(vandermonde(y), vandermonde(x)) * w ** sum(steps) / (1 + w) ** n
    return toeplitz_same_level(alpha, Symbol.laurent({0: 1, -1: beta}), x, y)


def generalized_markov_link(x: Sequence[int], y: Sequence[int], alpha: Sequence) -> Fraction:
    """Link with symbol ``(1 - alpha_n z)**-1``; equal alphas give :func:`markov_link`."""
    n = len(x)
    alpha = [as_fraction(v) for v in alpha][:n]
    if len(alpha) != n:
        raise ContractError("need n alphas for a level-n link")
    if _all_equal(alpha):
        return markov_link(x, y)
    if len(set(alpha)) != n:
        raise DegenerateParameterError(f"partially repeated alphas {alpha}")
    return toeplitz_level_down(alpha, Symbol.geometric(alpha[-1]), x, y, annulus=False)


def generalized_link_row(x: Sequence[int], alpha: Sequence) -> dict[WeylConfig, Fraction]:
    # the link is supported on interlacing configurations for this symbol
    return {
        y: v for y in enumerate_interlacing(x) if (v := generalized_markov_link(x, y, alpha))
    }


def generalized_level_row(x: Sequence[int], alpha, beta, tau: int = 0) -> dict[WeylConfig, Fraction]:
    row = {}
    for jumps in itertools.product((0, 1), repeat=len(x)):
        y = tuple(a + j for a, j in zip(x, jumps))
        if all(a < b for a, b in zip(y, y[1:])):
            val = generalized_level_kernel(x, y, alpha, beta, tau)
            if val:
                row[WeylConfig(y)] = val
    return row


# ---------------------------------------------------------------------------
# Kernel tables and the intertwining check


@dataclass
class KernelTable:
    """Rows of a kernel materialized over a window of source configurations."""

    source_level: int
    target_level: int
    window: tuple[int, int]
    rows: dict[WeylConfig, dict[WeylConfig, Fraction]]

    @classmethod
    def build(cls, row_fn: Callable, level: int, target_level: int, window: tuple[int, int]):
        lo, hi = window
        rows = {x: row_fn(x) for x in iter_weyl(level, lo, hi)}
        return cls(level, target_level, window, rows)

    def row_sums(self) -> dict[WeylConfig, Fraction]:
        return {x: sum(row.values(), Fraction(0)) for x, row in self.rows.items()}

    def __matmul__(self, other: "KernelTable") -> dict:
        out = {}
        for x, row in self.rows.items():
            acc: dict[WeylConfig, Fraction] = {}
            for mid, v in row.items():
                if mid not in other.rows:
                    raise WindowError(f"support {tuple(mid)} escapes window {other.window}")
                for y, w in other.rows[mid].items():
                    acc[y] = acc.get(y, Fraction(0)) + v * w
            out[x] = {y: v for y, v in acc.items() if v}
        return out


def compose_rows(first: Mapping, second: Callable) -> dict:
    """Row of ``A @ B`` given row ``first`` of A and a row function for B."""
    acc: dict = {}
    for mid, v in first.items():
        for y, w in second(mid).items():
            acc[y] = acc.get(y, Fraction(0)) + v * w
    return {y: v for y, v in acc.items() if v}


def intertwine_defect(
    n: int,
    p=None,
    window: tuple[int, int] = (0, 8),
    *,
    alpha: Sequence | None = None,
    beta=None,
    tau: int = 0,
) -> Fraction:
    """max |(P_n L)(x, y) - (L P_{n-1})(x, y)| over level-n x in the window.

    Source configurations are taken with entries in ``[lo, hi - 1]`` so that
    one step of the level kernel stays inside ``[lo, hi]``.  With ``alpha``
    given, the generalized kernels (parameters ``alpha``, ``beta``) are used.
    """
    lo, hi = window
    if hi - lo < n:
        raise WindowError(f"window {window} cannot hold a level-{n} configuration")
    if n < 2:
        raise ContractError("intertwining needs n >= 2")
    if alpha is None:
        if p is None:
            raise ContractError("give p or (alpha, beta)")
        P = lambda x: level_kernel_row(x, p)  # noqa: E731
        L = markov_link_row
    else:
        P = lambda x: generalized_level_row(x, alpha, beta, tau)  # noqa: E731
        L = lambda x: generalized_link_row(x, alpha)  # noqa: E731
    worst = Fraction(0)
    for x in iter_weyl(n, lo, hi - 1):
        lhs = compose_rows(P(x), L)
        rhs = compose_rows(L(x), P)
        for key in set(lhs) | set(rhs):
            if any(v < lo or v > hi for v in key):
                raise WindowError(f"support {tuple(key)} escapes window {window}")
            worst = max(worst, abs(lhs.get(key, 0) - rhs.get(key, 0)))
    return worst


def row_sum(row: Mapping) -> Fraction:
    return sum(row.values(), Fraction(0))


def iter_rows(configs: Iterable, row_fn: Callable):
    for x in configs:
        yield x, row_fn(x)
