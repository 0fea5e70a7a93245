"""Closed-form low-order coefficients of scaled series.

Every factor ``(N / a**m)**nu`` with ``nu = log_a d1`` is evaluated as
``d1**(n - m)``, so rational seeds give rational results and the
``d1 == 1`` singularity shows up as an explicit division by zero rather
than a NaN.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .combinatorics import binomial
from .errors import InvalidArgumentError, SingularInputError
from .series import SeedSeries

__all__ = [
    "Additivity",
    "SeedSummary",
    "closed_form_d1",
    "closed_form_d2",
    "closed_form_d3",
    "closed_form_d4_two_coeff",
    "binomial_family",
    "classify_additivity",
    "third_order_expansion",
]


def _exact(x):
    return isinstance(x, Rational) and not isinstance(x, bool)


def _num(x):
    return Fraction(x) if _exact(x) else float(x)


@dataclass(frozen=True)
class SeedSummary:
    """First three seed coefficients at base `a`.

    ``nu`` is only materialized for reporting; no closed form uses it.
    """

    a: int
    d1: float | Fraction
    d2: float | Fraction = 0
    d3: float | Fraction = 0

    def __post_init__(self):
        if not isinstance(self.a, int) or self.a < 2:
            raise InvalidArgumentError(f"a must be an integer >= 2, got {self.a!r}")
        for name in ("d1", "d2", "d3"):
            object.__setattr__(self, name, _num(getattr(self, name)))
        if not self.d1 > 0:
            raise InvalidArgumentError(f"d1 must be positive, got {self.d1}")

    @classmethod
    def from_seed(cls, seed: SeedSeries) -> "SeedSummary":
        return cls(seed.base, *(seed.coefficient(j) for j in (1, 2, 3)))

    @property
    def nu(self) -> float:
        return math.log(self.d1) / math.log(self.a)


class Additivity(str, enum.Enum):
    SUBADDITIVE = "subadditive"
    ADDITIVE_FIRST_ORDER = "additive-first-order"
    SUPERADDITIVE = "superadditive"


def _check_n(n):
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise InvalidArgumentError(f"n must be a nonnegative integer, got {n!r}")


def _require_nonsingular(s: SeedSummary, squared=False):
    if s.d1 == 1:
        what = "a**nu - 1" if not squared else "a**(2 nu) - 1"
        raise SingularInputError(
            f"d1 = 1 makes {what} vanish; use scale_coefficients instead"
        )


def closed_form_d1(s: SeedSummary, n: int):
    """``d_1(a**n) = N**nu = d1**n``."""
    _check_n(n)
    return s.d1**n


def closed_form_d2(s: SeedSummary, n: int):
    """``d_2(N) = d2 (N/a)**nu (N**nu - 1) / (a**nu - 1)``."""
    _check_n(n)
    if n == 0 or s.d2 == 0:
        return s.d2 * 0
    _require_nonsingular(s)
    D = s.d1
    return s.d2 * D ** (n - 1) * (D**n - 1) / (D - 1)


def closed_form_d3(s: SeedSummary, n: int):
    """Third-order coefficient::

        d_3(N) = d3 (N/a)**nu (1 - N**(2nu)) / (1 - a**(2nu))
               + 2 d2**2 (N/a**2)**nu (N**nu - 1)(N**nu - a**nu)
                 / ((a**nu - 1)(a**(2nu) - 1))
    """
    _check_n(n)
    if n == 0 or (s.d2 == 0 and s.d3 == 0):
        return s.d3 * 0
    _require_nonsingular(s, squared=True)
    D = s.d1
    N_nu = D**n
    first = s.d3 * D ** (n - 1) * (1 - N_nu**2) / (1 - D**2)
    second = 2 * s.d2**2 * D ** (n - 2) * (N_nu - 1) * (N_nu - D) / ((D - 1) * (D**2 - 1))
    return first + second


def closed_form_d4_two_coeff(s: SeedSummary, n: int):
    """Fourth-order coefficient for a seed ``d1 e + d2 e**2`` (``d3 == 0``)."""
    _check_n(n)
    if s.d3 != 0:
        raise InvalidArgumentError("the fourth-order closed form needs d3 == 0")
    if n == 0 or s.d2 == 0:
        return s.d2 * 0
    _require_nonsingular(s, squared=True)
    D = s.d1
    N_nu = D**n
    return (
        s.d2**3
        * D ** (n - 3)
        * (N_nu - 1) / (D - 1) ** 2
        * (N_nu - D) / (D**2 - 1)
        * (N_nu * (5 + D) - 1 - 5 * D**2) / (1 + D + D**2)
    )


def binomial_family(d2_of_2, N: int, j: int):
    """``d_j(N) = d2**(j-1) C(N, j)`` for the base-2 seed ``2e + d2 e**2``.

    Exact when `d2_of_2` is rational.
    """
    if not isinstance(N, int) or N < 1 or N & (N - 1):
        raise InvalidArgumentError(f"N must be a power of 2, got {N!r}")
    if not 1 <= j <= N:
        raise InvalidArgumentError(f"need 1 <= j <= N, got j={j}, N={N}")
    return _num(d2_of_2) ** (j - 1) * binomial(N, j)


def classify_additivity(s: SeedSummary, rtol: float = 1e-12) -> Additivity:
    """Compare ``d1`` against ``a``: ``nu < 1`` iff ``d1 < a``.

    Rational ``d1`` is compared exactly; floats within `rtol` of `a` count
    as additive at first order.
    """
    if _exact(s.d1):
        diff = s.d1 - s.a
    else:
        diff = 0.0 if math.isclose(s.d1, s.a, rel_tol=rtol) else s.d1 - s.a
    if diff < 0:
        return Additivity.SUBADDITIVE
    if diff > 0:
        return Additivity.SUPERADDITIVE
    return Additivity.ADDITIVE_FIRST_ORDER


def third_order_expansion(s: SeedSummary, n: int, e):
    """``E_N(e)`` truncated after the ``e**3`` term."""
    if e == 0:
        return e * 0
    return (
        closed_form_d1(s, n) * e
        + closed_form_d2(s, n) * e**2
        + closed_form_d3(s, n) * e**3
    )
