"""N-copy Maclaurin coefficients of a 1-scalable measure.

A measure whose value on `N` copies depends only on its single-copy value
``e`` is described by functions ``E_N(e) = sum_j d_j(N) e**j``.  For copy
counts in ``{1, a, a**2, ...}`` these satisfy ``E_N = E_{N/K} o E_K``, so
the coefficients at ``N = a**n`` follow from those of the seed ``E_a``::

    d_j(N) = sum_l d_l(N/a) * sum_{mu in comp(j, l)} d_mu1(a) ... d_mul(a)

where ``comp(j, l)`` are the ordered compositions of ``j`` into ``l``
positive parts.  Seeds given as integers or :class:`fractions.Fraction`
are carried through in exact arithmetic; any float coefficient switches
the whole pipeline to floats.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import iter_compositions
from .errors import DegreeOverflowError, DomainError, InvalidArgumentError

__all__ = [
    "MAX_SERIES_LENGTH",
    "ConvergenceWarning",
    "SeedSeries",
    "ScaledSeries",
    "CompositionLawReport",
    "degree_law",
    "composition_sum",
    "scale_coefficients",
    "third_order_recurrence",
    "evaluate",
    "check_composition_law",
    "encode_number",
    "decode_number",
]

MAX_SERIES_LENGTH = 4096


class ConvergenceWarning(UserWarning):
    """Evaluation point lies beyond the configured radius hint."""


def _is_exact(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def _normalize(coeffs: Iterable) -> tuple[tuple, bool]:
    values = list(coeffs)
    for c in values:
        if isinstance(c, bool) or not isinstance(c, Real):
            raise InvalidArgumentError(f"coefficient {c!r} is not a real number")
    if all(_is_exact(c) for c in values):
        return tuple(Fraction(c) for c in values), True
    out = tuple(float(c) for c in values)
    if not all(math.isfinite(c) for c in out):
        raise InvalidArgumentError("coefficients must be finite")
    return out, False


def encode_number(x):
    """JSON-friendly form: rationals as ``"p/q"`` strings, floats unchanged."""
    if _is_exact(x):
        return str(Fraction(x))
    return float(x)


def decode_number(x):
    """Inverse of :func:`encode_number`; also accepts decimal strings as floats."""
    if isinstance(x, str):
        s = x.strip()
        if any(ch in s for ch in ".eE") and "/" not in s:
            return float(s)
        try:
            return Fraction(s)
        except ValueError as exc:
            raise InvalidArgumentError(f"cannot parse coefficient {x!r}") from exc
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InvalidArgumentError(f"cannot parse coefficient {x!r}")
    return Fraction(x) if isinstance(x, int) else float(x)


@dataclass(frozen=True)
class SeedSeries:
    """Coefficients ``d_1(a), ..., d_L(a)`` of the measure at `base` copies.

    With ``finite=False`` the listed coefficients are the leading terms of
    an infinite series and every expansion must be truncated at an order
    no larger than ``len(coeffs)``.
    """

    base: int
    coeffs: tuple
    finite: bool = True
    exact: bool = field(init=False)

    def __post_init__(self):
        if isinstance(self.base, bool) or not isinstance(self.base, int) or self.base < 2:
            raise InvalidArgumentError(f"base must be an integer >= 2, got {self.base!r}")
        if len(self.coeffs) == 0:
            raise InvalidArgumentError("seed needs at least one coefficient")
        coeffs, exact = _normalize(self.coeffs)
        # d_1(a) = 0 leaves the scaling exponent log_a d_1(a) undefined
        if not coeffs[0] > 0:
            raise InvalidArgumentError(f"d_1(a) must be positive, got {coeffs[0]}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "exact", exact)

    @property
    def degree(self) -> int | None:
        """``L(a)`` for a finite seed, ``None`` otherwise."""
        return len(self.coeffs) if self.finite else None

    def coefficient(self, j: int):
        """``d_j(a)``, zero beyond the stored coefficients (finite seeds)."""
        if 1 <= j <= len(self.coeffs):
            return self.coeffs[j - 1]
        if not self.finite and j > len(self.coeffs):
            raise InvalidArgumentError(f"d_{j}(a) is not known for this truncated seed")
        return Fraction(0) if self.exact else 0.0

    def to_json(self) -> dict:
        return {
            "base": self.base,
            "coefficients": [encode_number(c) for c in self.coeffs],
            "finite": self.finite,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SeedSeries":
        return cls(
            int(data["base"]),
            tuple(decode_number(c) for c in data["coefficients"]),
            bool(data.get("finite", True)),
        )


@dataclass(frozen=True)
class ScaledSeries:
    """Coefficients ``d_1(N), ..., d_T(N)`` for ``N = base**exponent``."""

    seed: SeedSeries
    exponent: int
    coeffs: tuple
    truncated: bool = False

    @property
    def copies(self) -> int:
        return self.seed.base ** self.exponent

    @property
    def exact(self) -> bool:
        return self.seed.exact

    def __len__(self):
        return len(self.coeffs)

    def __call__(self, e, **kwargs):
        return evaluate(self, e, **kwargs)

    def to_json(self) -> dict:
        return {
            "base": self.seed.base,
            "exponent": self.exponent,
            "coefficients": [encode_number(c) for c in self.coeffs],
            "truncated": self.truncated,
            "seed": self.seed.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ScaledSeries":
        seed = SeedSeries.from_json(data["seed"])
        if int(data["base"]) != seed.base:
            raise InvalidArgumentError("series base does not match its seed")
        coeffs = tuple(decode_number(c) for c in data["coefficients"])
        if seed.exact:
            coeffs = tuple(Fraction(c) for c in coeffs)
        else:
            coeffs = tuple(float(c) for c in coeffs)
        return cls(seed, int(data["exponent"]), coeffs, bool(data.get("truncated", False)))


def degree_law(seed_degree: int, n: int, max_length: int | None = MAX_SERIES_LENGTH) -> int:
    """Polynomial degree ``L(a**n) = L(a)**n`` of the `n`-fold scaled series.

    Raises :class:`DegreeOverflowError` if the result exceeds `max_length`
    (pass ``None`` to disable the cap).
    """
    if seed_degree < 1 or n < 0:
        raise InvalidArgumentError("need seed_degree >= 1 and n >= 0")
    degree = seed_degree ** n
    if max_length is not None and degree > max_length:
        raise DegreeOverflowError(
            f"L(a)**n = {seed_degree}**{n} exceeds the maximum series length {max_length}"
        )
    return degree


def _capped_power(base: int, n: int, cap: int) -> int:
    out = 1
    for _ in range(n):
        out *= base
        if out >= cap:
            return cap
    return out


def composition_sum(coeffs: Sequence, j: int, ell: int):
    """Sum over compositions of `j` into `ell` parts of ``prod d_mu(a)``.

    Explicit enumeration; the cost grows like ``C(j-1, ell-1)``, so this
    is meant for small orders and for cross-checking.
    """
    total = Fraction(0) if all(_is_exact(c) for c in coeffs) else 0.0
    for comp in iter_compositions(j, ell, max_part=len(coeffs)):
        term = 1
        for part in comp.parts:
            term = term * coeffs[part - 1]
        total += term
    return total


def _mul_trunc(p, q, size, exact):
    """Product of two coefficient lists indexed by power, cut to `size`."""
    if not exact:
        return np.convolve(p, q)[:size]
    out = [Fraction(0)] * min(size, len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if not pi or i >= size:
            continue
        for k, qk in enumerate(q[: size - i]):
            if qk:
                out[i + k] += pi * qk
    return out


def _step_by_powers(outer, seed_poly, size, exact):
    """Coefficients of ``outer o seed`` up to power ``size - 1``.

    ``power`` holds ``seed**l``; its entry at index `j` is exactly the
    composition sum of `j` into `l` parts, built from the previous power
    by splitting off the last part.
    """
    zero = Fraction(0) if exact else 0.0
    result = [zero] * size if exact else np.zeros(size)
    power = list(seed_poly[:size]) if exact else np.asarray(seed_poly[:size], dtype=float)
    for ell in range(1, len(outer)):
        if ell >= size:
            break
        d_ell = outer[ell]
        if d_ell and exact:
            for j in range(ell, len(power)):
                result[j] += d_ell * power[j]
        elif d_ell:
            result[: len(power)] += d_ell * power
        if ell + 1 < len(outer) and ell + 1 < size:
            power = _mul_trunc(power, seed_poly, size, exact)
    return result


def _step_by_compositions(outer, seed_coeffs, size, exact):
    zero = Fraction(0) if exact else 0.0
    result = [zero] * size
    for j in range(1, size):
        acc = zero
        for ell in range(1, min(j, len(outer) - 1) + 1):
            if outer[ell]:
                acc += outer[ell] * composition_sum(seed_coeffs, j, ell)
        result[j] = acc
    return result


def scale_coefficients(
    seed: SeedSeries,
    n: int,
    truncation: int | None = None,
    *,
    method: str = "powers",
    max_length: int = MAX_SERIES_LENGTH,
) -> ScaledSeries:
    """Coefficients of ``E_N`` for ``N = seed.base**n``.

    Parameters
    ----------
    seed : SeedSeries
    n : int
        Exponent, ``n >= 0``; ``n = 0`` gives the identity series ``[1]``.
    truncation : int, optional
        Keep orders ``1..truncation`` only. Mandatory for infinite seeds,
        where it may not exceed the number of known seed coefficients.
        Orders up to the truncation depend only on seed orders up to it,
        so the kept coefficients are exact.
    method : {"powers", "compositions"}
        ``"compositions"`` enumerates every composition explicitly and is
        exponential in the order; ``"powers"`` accumulates the same sums
        by repeated multiplication.
    """
    if not isinstance(seed, SeedSeries):
        raise InvalidArgumentError("seed must be a SeedSeries")
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise InvalidArgumentError(f"n must be a nonnegative integer, got {n!r}")
    if truncation is not None and truncation < 1:
        raise InvalidArgumentError("truncation must be a positive integer")
    if method not in ("powers", "compositions"):
        raise InvalidArgumentError(f"unknown method {method!r}")

    if seed.finite:
        if truncation is None:
            length = degree_law(len(seed.coeffs), n, max_length)
        else:
            length = min(_capped_power(len(seed.coeffs), n, truncation), truncation)
    else:
        if truncation is None:
            raise InvalidArgumentError("infinite seeds need a truncation order")
        if truncation > len(seed.coeffs):
            raise InvalidArgumentError(
                f"truncation {truncation} exceeds the {len(seed.coeffs)} known seed coefficients"
            )
        length = truncation
    truncated = truncation is not None and (not seed.finite or length < len(seed.coeffs) ** n)

    exact = seed.exact
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    size = length + 1  # index = power of e; index 0 is d_0 = 0
    seed_poly = [zero] + list(seed.coeffs[: size - 1])

    # scaled series for exponents 0, 1, ..., n in turn; only the last is kept
    current = [zero, one]
    for _ in range(n):
        step_size = min(size, (len(current) - 1) * len(seed.coeffs) + 1)
        if method == "powers":
            with np.errstate(over="ignore", invalid="ignore"):
                current = _step_by_powers(current, seed_poly, step_size, exact)
        else:
            current = _step_by_compositions(current, seed.coeffs, step_size, exact)
    coeffs = list(current[1:size])
    coeffs += [zero] * (length - len(coeffs))
    if not exact:
        coeffs = [float(c) for c in coeffs]
        if not all(math.isfinite(c) for c in coeffs):
            warnings.warn(
                "float coefficients overflowed; use a rational seed for exact values",
                RuntimeWarning,
                stacklevel=2,
            )
    return ScaledSeries(seed, n, tuple(coeffs), truncated)


def third_order_recurrence(seed: SeedSeries, n: int):
    """``d_3(a**n)`` from the dedicated third-order recurrence.

    Iterates, with ``K = a``::

        d_3(N) = d_1(N/K) d_3(K) + d_3(N/K) d_1(K)**3 + 2 d_2(N/K) d_1(K) d_2(K)

    alongside the first- and second-order recurrences it depends on.
    Missing seed coefficients count as zero.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise InvalidArgumentError(f"n must be a nonnegative integer, got {n!r}")
    c = list(seed.coeffs[:3])
    zero = Fraction(0) if seed.exact else 0.0
    c += [zero] * (3 - len(c))
    a1, a2, a3 = c
    p1, p2, p3 = (Fraction(1) if seed.exact else 1.0), zero, zero
    for _ in range(n):
        p1, p2, p3 = (
            p1 * a1,
            p1 * a2 + p2 * a1**2,
            p1 * a3 + p3 * a1**3 + 2 * p2 * a1 * a2,
        )
    return p3


def evaluate(series, e, *, radius_hint: float | None = 1.0, exact: bool = False):
    """``E_N(e) = sum_j d_j(N) e**j`` by Horner's rule.

    `series` is a :class:`ScaledSeries` or a plain coefficient sequence
    ``[d_1, d_2, ...]``.  Returns a float unless ``exact=True``, in which
    case rational coefficients and `e` are combined exactly.  A
    :class:`ConvergenceWarning` is issued when ``e > radius_hint``.
    """
    coeffs = series.coeffs if isinstance(series, ScaledSeries) else tuple(series)
    if e < 0:
        raise DomainError(f"e must be nonnegative, got {e}")
    if radius_hint is not None and e > radius_hint:
        warnings.warn(
            f"e = {float(e):g} exceeds the convergence radius hint {radius_hint:g}",
            ConvergenceWarning,
            stacklevel=2,
        )
    return _horner(coeffs, e, exact)


def _horner(coeffs, e, exact):
    if exact:
        if not all(_is_exact(c) for c in coeffs):
            raise InvalidArgumentError("exact evaluation needs rational coefficients")
        x = Fraction(e)
        acc = Fraction(0)
    else:
        x = float(e)
        coeffs = [float(c) for c in coeffs]
        acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc * x


@dataclass
class CompositionLawReport:
    """Residuals of ``E_N(e) = E_{N/K}(E_K(e))`` over a grid of `e`."""

    N: int
    K: int
    e_grid: list
    residuals: list[float]
    max_residual: float
    tol: float
    passed: bool
    exact: bool
    truncated: bool


def check_composition_law(
    seed: SeedSeries,
    n: int,
    k: int,
    e_grid: Sequence,
    tol: float = 1e-12,
    truncation: int | None = None,
) -> CompositionLawReport:
    """Compare ``E_{a**n}`` with ``E_{a**(n-k)} o E_{a**k}`` pointwise.

    Exact seeds are evaluated in rational arithmetic, where the residual
    is zero for every finite seed.  With a `truncation` the residual
    includes the neglected higher orders and is only reported.  The inner
    value ``E_K(e)`` may be negative for seeds with negative coefficients;
    it is fed to the outer polynomial as is.
    """
    if not 0 < k < n:
        raise InvalidArgumentError(f"need 0 < k < n, got n={n}, k={k}")
    full = scale_coefficients(seed, n, truncation)
    inner = scale_coefficients(seed, k, truncation)
    outer = scale_coefficients(seed, n - k, truncation)
    exact = seed.exact
    residuals = []
    for e in e_grid:
        if e < 0:
            raise DomainError(f"e must be nonnegative, got {e}")
        if exact:
            e = Fraction(e)
        lhs = _horner(full.coeffs, e, exact)
        rhs = _horner(outer.coeffs, _horner(inner.coeffs, e, exact), exact)
        residuals.append(float(abs(lhs - rhs)))
    worst = max(residuals, default=0.0)
    return CompositionLawReport(
        N=seed.base**n,
        K=seed.base**k,
        e_grid=list(e_grid),
        residuals=residuals,
        max_residual=worst,
        tol=tol,
        passed=worst <= tol,
        exact=exact,
        truncated=full.truncated or inner.truncated or outer.truncated,
    )
