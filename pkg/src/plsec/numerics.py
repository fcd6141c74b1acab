"""Numeric substrate: beta-family special functions, quadrature, root bracketing.

The incomplete beta function is evaluated with the modified Lentz continued
fraction, switching to the reflection ``B_x(p, q) = B(p, q) - B_{1-x}(q, p)``
for ``x > p / (p + q)``.  Scalars take a pure-Python path because the
quadrature routines call the densities one point at a time.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate as _spi

_EPS = 1e-16
_TINY = 1e-300
_MAX_CF_TERMS = 300


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class ConvergenceError(ArithmeticError):
    """Adaptive routine failed to reach its tolerance.

    The best available estimate is kept on ``partial`` with its error
    estimate on ``error``.
    """

    def __init__(self, message: str, partial: float = math.nan, error: float = math.inf):
        super().__init__(message)
        self.partial = partial
        self.error = error


class BracketError(ValueError):
    """Residual has the same sign at both ends of the bracket."""


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-9
    abs: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if self.rel < 0 or self.abs < 0:
            raise ValueError("tolerances must be non-negative")
        if self.rel == 0 and self.abs == 0:
            raise ValueError("at least one of rel, abs must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be a positive integer")


DEFAULT_TOL = Tolerance()


class QuadResult(NamedTuple):
    value: float
    error: float


# ---------------------------------------------------------------------------
# beta family
# ---------------------------------------------------------------------------


def _check_pq(p, q):
    if np.any(np.asarray(p) <= 0) or np.any(np.asarray(q) <= 0):
        raise DomainError(f"beta parameters must be positive, got p={p}, q={q}")


def beta_complete(p: float, q: float) -> float:
    """Complete beta function ``B(p, q)``."""
    if p <= 0 or q <= 0:
        raise DomainError(f"beta parameters must be positive, got p={p}, q={q}")
    return _beta_cached(float(p), float(q))


@lru_cache(maxsize=64)
def _beta_cached(p: float, q: float) -> float:
    return math.exp(math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q))


def _cf_scalar(x: float, a: float, b: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_CF_TERMS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ConvergenceError(f"beta continued fraction did not converge at x={x}")


def _reg_scalar(x: float, p: float, q: float) -> float:
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if x > p / (p + q):
        return 1.0 - _reg_scalar(1.0 - x, q, p)
    log_front = (
        p * math.log(x)
        + q * math.log1p(-x)
        - (math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q))
    )
    return math.exp(log_front) * _cf_scalar(x, p, q) / p


def _cf_array(x, a, b):
    qab, qap, qam = a + b, a + 1.0, a - 1.0

    def guard(v):
        return np.where(np.abs(v) < _TINY, _TINY, v)

    c = np.ones_like(x)
    d = 1.0 / guard(1.0 - qab * x / qap)
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for m in range(1, _MAX_CF_TERMS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 / guard(1.0 + aa * d)
        c = guard(1.0 + aa / c)
        h = np.where(done, h, h * d * c)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 / guard(1.0 + aa * d)
        c = guard(1.0 + aa / c)
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < _EPS
        if done.all():
            return h
    raise ConvergenceError("beta continued fraction did not converge")


def _reg_array(x, p, q):
    x, p, q = np.broadcast_arrays(
        np.asarray(x, dtype=float), np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    )
    out = np.empty(x.shape)
    flip = x > p / (p + q)
    xs = np.where(flip, 1.0 - x, x)
    ps = np.where(flip, q, p)
    qs = np.where(flip, p, q)
    inner = (xs > 0.0) & (xs < 1.0)
    val = np.where(xs >= 1.0, 1.0, 0.0)
    if inner.any():
        xi, pi_, qi = xs[inner], ps[inner], qs[inner]
        lbeta = (
            np.vectorize(math.lgamma)(pi_)
            + np.vectorize(math.lgamma)(qi)
            - np.vectorize(math.lgamma)(pi_ + qi)
        )
        front = np.exp(pi_ * np.log(xi) + qi * np.log1p(-xi) - lbeta)
        val[inner] = front * _cf_array(xi, pi_, qi) / pi_
    out[...] = np.where(flip, 1.0 - val, val)
    return out


def _check_x(x):
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)) or np.any(xa < 0.0) or np.any(xa > 1.0):
        raise DomainError("incomplete beta argument must lie in [0, 1]")


def _all_real(*args):
    return all(isinstance(v, (float, int)) for v in args)


def beta_regularized(x, p, q):
    """Regularized incomplete beta ``I_x(p, q)``; accepts scalars or arrays."""
    if _all_real(x, p, q):
        if not 0.0 <= x <= 1.0:
            raise DomainError("incomplete beta argument must lie in [0, 1]")
        if p <= 0 or q <= 0:
            raise DomainError(f"beta parameters must be positive, got p={p}, q={q}")
        return _reg_scalar(float(x), float(p), float(q))
    _check_x(x)
    _check_pq(p, q)
    if np.ndim(x) == 0 and np.ndim(p) == 0 and np.ndim(q) == 0:
        return _reg_scalar(float(x), float(p), float(q))
    return _reg_array(x, p, q)


def beta_incomplete(x, p, q):
    """Incomplete beta ``B_x(p, q) = int_0^x t^(p-1) (1-t)^(q-1) dt``.

    Examples
    --------
    >>> round(beta_incomplete(0.5, 1, 1), 12)
    0.5
    """
    if _all_real(p, q) or (np.ndim(p) == 0 and np.ndim(q) == 0):
        return beta_regularized(x, p, q) * beta_complete(p, q)
    _check_pq(p, q)
    bc = np.exp(
        np.vectorize(math.lgamma)(p) + np.vectorize(math.lgamma)(q) - np.vectorize(math.lgamma)(np.add(p, q))
    )
    return beta_regularized(x, p, q) * bc


def beta_reflect_check(x, p, q):
    """``B(p, q) - B_{1-x}(q, p)``; equals ``B_x(p, q)`` by reflection."""
    _check_x(x)
    _check_pq(p, q)
    one_minus = 1.0 - np.asarray(x, dtype=float)
    if np.ndim(x) == 0:
        one_minus = float(one_minus)
    return beta_complete(p, q) - beta_incomplete(one_minus, q, p)


def _check_unit(a, name):
    aa = np.asarray(a, dtype=float)
    if np.any(np.isnan(aa)) or np.any(aa < 0.0) or np.any(aa > 1.0):
        raise DomainError(f"{name} argument must lie in [0, 1]")


def beta1(a):
    """``a^2 B_a(1/2, 3/2) - B_a(5/2, 3/2)``."""
    if not isinstance(a, float):
        _check_unit(a, "beta1")
    return a * a * beta_incomplete(a, 0.5, 1.5) - beta_incomplete(a, 2.5, 1.5)


def beta2(a):
    """``a B_a(1/2, 3/2) - B_a(5/2, 3/2)``."""
    _check_unit(a, "beta2")
    return a * beta_incomplete(a, 0.5, 1.5) - beta_incomplete(a, 2.5, 1.5)


def beta3(a):
    """``beta1(a) + B_a(5/2, 3/2) / a - B_a(3/2, 3/2)``, with value 0 at ``a = 0``."""
    _check_unit(a, "beta3")
    aa = np.asarray(a, dtype=float)
    safe = np.where(aa > 0.0, aa, 1.0)
    ratio = np.where(aa > 0.0, beta_incomplete(aa, 2.5, 1.5) / safe, 0.0)
    out = beta1(aa) + ratio - beta_incomplete(aa, 1.5, 1.5)
    return float(out) if np.ndim(a) == 0 else out


# ---------------------------------------------------------------------------
# quadrature and root finding
# ---------------------------------------------------------------------------

# QUADPACK flags round-off (ier=2) well before the requested tolerance is
# really lost; accept the estimate unless its error bound is this far off.
_ACCEPT_FACTOR = 1e4


def integrate(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    tol: Tolerance = DEFAULT_TOL,
    points: Sequence[float] | None = None,
    scale: float = 1.0,
) -> QuadResult:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[lower, upper]``.

    ``upper`` may be ``math.inf``; the tail is then mapped onto ``(0, 1]`` by
    ``x = lower + scale * (1 - t) / t``, which keeps polynomially decaying
    integrands finite.  ``points`` marks interior kinks or support edges.

    Raises
    ------
    ConvergenceError
        When the error estimate stays above the tolerance after
        ``tol.max_subdivisions`` bisections.
    """
    if upper < lower:
        res = integrate(f, upper, lower, tol, points, scale)
        return QuadResult(-res.value, res.error)
    if upper == lower:
        return QuadResult(0.0, 0.0)

    if math.isinf(upper):

        def g(t):
            if t <= 0.0:
                return 0.0
            return f(lower + scale * (1.0 - t) / t) * scale / (t * t)

        mapped = None
        if points:
            mapped = sorted(
                1.0 / (1.0 + (p - lower) / scale) for p in points if p > lower and math.isfinite(p)
            )
        return integrate(g, 0.0, 1.0, tol, mapped)

    inner = None
    if points:
        inner = sorted({float(p) for p in points if lower < p < upper})
        inner = inner or None
    out = _spi.quad(
        f,
        lower,
        upper,
        epsabs=tol.abs,
        epsrel=tol.rel,
        limit=tol.max_subdivisions,
        points=inner,
        full_output=1,
    )
    value, err = out[0], out[1]
    if len(out) > 3:  # ier != 0
        target = max(tol.abs, tol.rel * abs(value))
        if not (err <= _ACCEPT_FACTOR * target) or not math.isfinite(value):
            raise ConvergenceError(out[3].strip().splitlines()[0], partial=value, error=err)
    return QuadResult(value, err)


def solve_bracketed(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Root of a monotone residual ``g`` on ``[lo, hi]`` by bisection.

    Stops once ``|g(x)| <= tol.abs`` or the bracket has shrunk below
    ``tol.rel`` relative width.
    """
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: g={g_lo:.3g}, {g_hi:.3g}")
    best_x, best_g = (lo, g_lo) if abs(g_lo) < abs(g_hi) else (hi, g_hi)
    for _ in range(tol.max_subdivisions):
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if abs(g_mid) < abs(best_g):
            best_x, best_g = mid, g_mid
        if abs(g_mid) <= tol.abs:
            return mid
        if np.sign(g_mid) == np.sign(g_lo):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
        if hi - lo <= tol.rel * max(abs(lo), abs(hi)):
            break
    return best_x
