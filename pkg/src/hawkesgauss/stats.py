"""Empirical distances to the standard normal, normal special functions,
and the confidence-interval recipe driven by a Wasserstein bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .errors import ParameterError, StatisticalError

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def normal_cdf(x):
    """Standard normal CDF, accurate to full double precision."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * erfc(-x / _SQRT2)
    return out if out.ndim else float(out)


def normal_pdf(x):
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) / _SQRT2PI
    return out if out.ndim else float(out)


# Rational approximation for the inverse normal CDF (Acklam), used only to
# seed Newton refinement on normal_cdf.
_ACKLAM_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
             1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ACKLAM_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
             6.680131188771972e+01, -1.328068155288572e+01)
_ACKLAM_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
             -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ACKLAM_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
             3.754408661907416e+00)
_P_LOW = 0.02425


def _acklam_seed(q: np.ndarray) -> np.ndarray:
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    x = np.empty_like(q)
    lo = q < _P_LOW
    hi = q > 1.0 - _P_LOW
    mid = ~(lo | hi)
    if np.any(mid):
        p = q[mid] - 0.5
        r = p * p
        num = ((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]
        den = ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
        x[mid] = p * num / den
    if np.any(lo):
        r = np.sqrt(-2.0 * np.log(q[lo]))
        num = ((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]
        den = (((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0
        x[lo] = num / den
    if np.any(hi):
        r = np.sqrt(-2.0 * np.log(1.0 - q[hi]))
        num = ((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]
        den = (((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0
        x[hi] = -num / den
    return x


def normal_quantile(q):
    """Inverse standard normal CDF via Newton iterations seeded by a rational
    approximation; satisfies |Phi(Phi^-1(q)) - q| <= 1e-10 on (0, 1)."""
    scalar = np.isscalar(q) or np.asarray(q).ndim == 0
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any(~((q_arr > 0.0) & (q_arr < 1.0))):
        raise ParameterError("quantile argument must lie strictly in (0, 1)")
    x = _acklam_seed(q_arr)
    for _ in range(3):
        err = normal_cdf(x) - q_arr
        pdf = normal_pdf(x)
        stepped = np.where(pdf > 0.0, err / np.maximum(pdf, 1e-320), 0.0)
        x = x - stepped
    return float(x[0]) if scalar else x


@dataclass(frozen=True)
class SampleSet:
    """Sorted replication values with provenance metadata."""

    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.sort(np.asarray(self.values, dtype=float))
        if vals.size < 2:
            raise StatisticalError(f"need at least 2 samples, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise StatisticalError("samples must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def count(self) -> int:
        return int(self.values.size)


def _antideriv(x: np.ndarray) -> np.ndarray:
    """A(x) = x*Phi(x) + pdf(x), an antiderivative of Phi."""
    return x * normal_cdf(x) + normal_pdf(x)


def _w1_sorted(x: np.ndarray, roots: np.ndarray) -> float:
    """Exact integral of |F_M - Phi| for sorted samples x.

    ``roots`` must be Phi^-1(i/M) for i = 1..M-1.  Between consecutive order
    statistics the empirical CDF is the constant c = i/M, so each piece is
    G(l) + G(r) - 2*G(clip(root)) with G(t) = A(t) - c*t; the two tails
    integrate to A(x_1) and A(x_M) - x_M in closed form.
    """
    m = x.size
    total = float(_antideriv(x[0]) + (_antideriv(x[-1]) - x[-1]))
    if m == 1:
        return total
    c = np.arange(1, m) / m
    left, right = x[:-1], x[1:]
    rc = np.clip(roots, left, right)
    g_left = _antideriv(left) - c * left
    g_right = _antideriv(right) - c * right
    g_root = _antideriv(rc) - c * rc
    total += float(np.sum(g_left + g_right - 2.0 * g_root))
    return total


def empirical_w1_to_normal(s: SampleSet) -> float:
    """Wasserstein-1 distance between the empirical distribution and the
    standard normal, computed exactly from the order statistics."""
    m = s.count
    roots = normal_quantile(np.arange(1, m) / m)
    return _w1_sorted(s.values, roots)


def kolmogorov_to_normal(s: SampleSet) -> float:
    """One-sample Kolmogorov-Smirnov statistic against the standard normal."""
    x = s.values
    m = x.size
    cdf = normal_cdf(x)
    upper = np.arange(1, m + 1) / m - cdf
    lower = cdf - np.arange(0, m) / m
    return float(max(np.max(upper), np.max(lower)))


def bootstrap_w1_se(s: SampleSet, n_boot: int = 200, seed: int = 0) -> float:
    """Plain bootstrap standard error of the empirical W1 distance."""
    if n_boot < 2:
        raise ParameterError(f"n_boot must be >= 2, got {n_boot}")
    m = s.count
    roots = normal_quantile(np.arange(1, m) / m)
    rng = np.random.default_rng(seed)
    stats = np.empty(n_boot)
    for b in range(n_boot):
        resample = np.sort(rng.choice(s.values, size=m, replace=True))
        stats[b] = _w1_sorted(resample, roots)
    return float(np.std(stats, ddof=1))


@dataclass(frozen=True)
class ConfidenceInterval:
    """Two-sided interval with a guaranteed coverage floor, or the smallest
    usable beta when the Wasserstein bound is too large."""

    feasible: bool
    lower: float | None
    upper: float | None
    coverage_floor: float | None
    min_feasible_beta: float


def confidence_interval(bound: float, beta: float) -> ConfidenceInterval:
    """Interval (Phi^-1(beta/2), Phi^-1(1-beta/2)] covering the innovation
    with probability at least 1-2*beta, feasible when 2*sqrt(bound) <= beta/2.
    """
    if not (bound >= 0 and math.isfinite(bound)):
        raise ParameterError(f"bound must be a finite nonnegative real, got {bound}")
    if not (0 < beta < 0.5):
        raise ParameterError(f"beta must lie in (0, 1/2), got {beta}")
    min_beta = 4.0 * math.sqrt(bound)
    if 2.0 * math.sqrt(bound) <= beta / 2.0:
        return ConfidenceInterval(
            feasible=True,
            lower=normal_quantile(beta / 2.0),
            upper=normal_quantile(1.0 - beta / 2.0),
            coverage_floor=1.0 - 2.0 * beta,
            min_feasible_beta=min_beta,
        )
    return ConfidenceInterval(
        feasible=False,
        lower=None,
        upper=None,
        coverage_floor=None,
        min_feasible_beta=min_beta,
    )
