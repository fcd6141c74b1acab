"""Secrecy outage probability, exact and high-SNR, for both attack modes.

The exact values are computed in the distance domain.  Conditioned on the
legitimate distance ``d1 = l`` the outage event is a disk of attacker
distances, so its probability is elementary and only the integral over
``l`` is numeric.  The SNR-domain double integral is kept as an
independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .distance import cdf_disk_line, pdf_disk_line
from .model import AttackMode, DerivedConstants, SystemParams, derive
from .numerics import Tolerance, integrate
from .snr import cdf_ratio_eav, cdf_ratio_jam, pdf_gamma_au, pdf_gamma_sa_effective, pdf_gamma_su

EXACT_DISTANCE = "exact-distance-quadrature"
EXACT_SNR = "exact-snr-quadrature"
ASYMPTOTIC = "asymptotic-closed-form"
MONTE_CARLO = "monte-carlo"

_TOL = Tolerance(rel=1e-10, abs=1e-13)


@dataclass(frozen=True)
class SopResult:
    """Secrecy outage probability with its provenance.

    ``clamped`` is set when a closed form left ``[0, 1]`` and was clipped.
    ``parts`` holds the effective / ineffective attacker components where
    they apply.
    """

    value: float
    method: str
    err: float = 0.0
    clamped: bool = False
    parts: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"probability out of range: {self.value}")
        if self.err < 0:
            raise ValueError(f"error estimate must be >= 0, got {self.err}")


def _clamp(v: float) -> tuple[float, bool]:
    if v < 0.0:
        return 0.0, True
    if v > 1.0:
        return 1.0, True
    return v, False


def sop_ineffective(params: SystemParams, derived: DerivedConstants | None = None) -> float:
    """Outage probability of the legitimate link alone, ``Pr(log2(1 + gamma_SU) < C_st)``.

    With ``d* = (kappa_SU / (2^C_st - 1))^(1/theta)`` this is
    ``[F(D) - F(d*)] / F(D)``, zero once ``d* >= D``.
    """
    if params.c_st <= 0.0:
        return 0.0
    d = derived or derive(params)
    d_star = (d.kappa_su / math.expm1(params.c_st * math.log(2.0))) ** (1.0 / params.theta)
    # d* = D within rounding is the boundary of the zero-outage region
    if d_star >= params.D * (1.0 - 1e-12):
        return 0.0
    return max(0.0, (d.f_d - cdf_disk_line(d_star, params.R)) / d.f_d)


# ---------------------------------------------------------------------------
# exact, distance domain
# ---------------------------------------------------------------------------


def _outer_over_d1(cond, params, f_d, points, tol):
    """``int_0^D f_SU(l) cond(l) dl`` with the truncated disk-line density."""
    R, D = params.R, params.D
    pts = sorted(p for p in points if 0.0 < p < D)
    res = integrate(lambda l: pdf_disk_line(l, R) * cond(l), 0.0, D, tol, points=pts)
    return res.value / f_d, res.error / f_d


def _p_eav_distance(params, d, tol):
    th, r = params.theta, params.r
    g = 2.0**params.c_st

    def cond(l):
        q = (1.0 + d.kappa_su / l**th) / g - 1.0
        if q <= 0.0:
            return 1.0
        return min(1.0, (d.kappa_sa / q) ** (2.0 / th) / (r * r))

    d_o = (d.kappa_su / (g - 1.0)) ** (1.0 / th)
    knee = g * (1.0 + d.kappa_sa / r**th) - 1.0
    l_knee = (d.kappa_su / knee) ** (1.0 / th)
    return _outer_over_d1(cond, params, d.f_d, (d_o, l_knee), tol)


def _p_jam_distance(params, d, tol):
    th, R = params.theta, params.R
    z = math.expm1(params.c_st * math.log(2.0))

    def cond(l):
        q = d.kappa_su / (l**th * z) - 1.0
        if q <= 0.0:
            return 1.0
        return min(1.0, (d.kappa_au / q) ** (2.0 / th) / (R * R))

    d_o = (d.kappa_su / z) ** (1.0 / th)
    l_knee = (d.kappa_su / (z * (1.0 + d.kappa_au / R**th))) ** (1.0 / th)
    return _outer_over_d1(cond, params, d.f_d, (d_o, l_knee), tol)


# ---------------------------------------------------------------------------
# exact, SNR domain (cross-check)
# ---------------------------------------------------------------------------


def _cdf_gamma_su_numeric(x_hi, params, d, tol):
    # Pr(gamma_SU < x_hi) by quadrature of the SNR density in log-SNR
    x_lo = d.kappa_su / params.D**params.theta
    if x_hi <= x_lo:
        return 0.0
    res = integrate(
        lambda v: pdf_gamma_su(math.exp(v), params, d) * math.exp(v),
        math.log(x_lo),
        math.log(x_hi),
        tol,
    )
    return min(1.0, res.value)


def _outer_over_attacker_snr(pdf_att, y_lo, x_of_y, params, d, tol):
    x_lo = d.kappa_su / params.D**params.theta

    def integrand(v):
        y = math.exp(v)
        return pdf_att(y) * y * _cdf_gamma_su_numeric(x_of_y(y), params, d, tol)

    lo = math.log(y_lo)
    # the attacker SNR tail beyond y_lo e^(30 theta) has mass e^-60
    hi = lo + 30.0 * params.theta
    # kink where the legitimate threshold enters the SNR support
    pts = []
    y_x = _invert_monotone(x_of_y, x_lo, y_lo)
    if y_x is not None and y_x > y_lo:
        pts.append(math.log(y_x))
    res = integrate(integrand, lo, hi, tol, points=pts)
    return res.value, res.error


def _invert_monotone(fn, target, y_lo):
    # fn is affine increasing in y for both modes: fn(y) = a (1 + y) - 1 or z (1 + y)
    f0, f1 = fn(0.0), fn(1.0)
    slope = f1 - f0
    if slope <= 0:
        return None
    y = (target - f0) / slope
    return y if y > y_lo else None


def _p_eav_snr(params, d, tol):
    g = 2.0**params.c_st
    y_lo = d.kappa_sa / params.r**params.theta
    return _outer_over_attacker_snr(
        lambda y: pdf_gamma_sa_effective(y, params, d), y_lo, lambda y: g * (1.0 + y) - 1.0, params, d, tol
    )


def _p_jam_snr(params, d, tol):
    z = math.expm1(params.c_st * math.log(2.0))
    y_lo = d.kappa_au / params.R**params.theta
    return _outer_over_attacker_snr(
        lambda y: pdf_gamma_au(y, params, d), y_lo, lambda y: z * (1.0 + y), params, d, tol
    )


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------


def sop_exact_eav(params: SystemParams, method: str = EXACT_DISTANCE, tol: Tolerance = _TOL) -> SopResult:
    """Exact SOP under eavesdropping, ``alpha p_E + (1 - alpha) p_I``.

    Parameters
    ----------
    method : {"exact-distance-quadrature", "exact-snr-quadrature"}
        Distance-domain reference or the SNR-domain double integral.
    """
    if params.c_st <= 0.0:
        return SopResult(0.0, method, 0.0, parts={"p_e": 0.0, "p_i": 0.0})
    d = derive(params)
    if method == EXACT_DISTANCE:
        p_e, err = _p_eav_distance(params, d, tol)
        p_i = sop_ineffective(params, d)
    elif method == EXACT_SNR:
        p_e, err = _p_eav_snr(params, d, tol)
        p_i = _cdf_gamma_su_numeric(2.0**params.c_st - 1.0, params, d, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    value, clamped = _clamp(d.alpha * p_e + (1.0 - d.alpha) * p_i)
    return SopResult(value, method, abs(err), clamped, {"p_e": p_e, "p_i": p_i})


def sop_exact_jam(params: SystemParams, method: str = EXACT_DISTANCE, tol: Tolerance = _TOL) -> SopResult:
    """Exact SOP under jamming, ``Pr(gamma_SU / (1 + gamma_AU) < 2^C_st - 1)``."""
    if params.c_st <= 0.0:
        return SopResult(0.0, method, 0.0)
    d = derive(params)
    if method == EXACT_DISTANCE:
        p, err = _p_jam_distance(params, d, tol)
    elif method == EXACT_SNR:
        p, err = _p_jam_snr(params, d, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    value, clamped = _clamp(p)
    return SopResult(value, method, abs(err), clamped)


def sop_asym_eav(params: SystemParams) -> SopResult:
    """High-SNR SOP under eavesdropping.

    The effective-attacker part is ``Pr(gamma_SU / gamma_SA < 2^C_st)`` from
    the closed-form ratio CDF, whose branch switches at
    ``C_st = log2(lambda_E r^theta / D^theta)``; the ineffective part is the
    exact :func:`sop_ineffective`.
    """
    if params.c_st <= 0.0:
        return SopResult(0.0, ASYMPTOTIC, parts={"p_e": 0.0, "p_i": 0.0})
    d = derive(params)
    p_e = cdf_ratio_eav(2.0**params.c_st, params, d)
    p_i = sop_ineffective(params, d)
    value, clamped = _clamp(d.alpha * p_e + (1.0 - d.alpha) * p_i)
    return SopResult(value, ASYMPTOTIC, 0.0, clamped, {"p_e": p_e, "p_i": p_i})


def sop_asym_jam(params: SystemParams) -> SopResult:
    """High-SNR (interference-limited) SOP under jamming, a lower bound on the exact SOP.

    Equals ``Pr(gamma_SU / gamma_AU < 2^C_st - 1)``; the branch switches at
    ``C_st = log2(1 + lambda_J R^theta / D^theta)``.
    """
    if params.c_st <= 0.0:
        return SopResult(0.0, ASYMPTOTIC)
    d = derive(params)
    value, clamped = _clamp(cdf_ratio_jam(math.expm1(params.c_st * math.log(2.0)), params, d))
    return SopResult(value, ASYMPTOTIC, 0.0, clamped)


def sop_exact(params: SystemParams, mode, method: str = EXACT_DISTANCE) -> SopResult:
    mode = AttackMode(mode)
    return sop_exact_eav(params, method) if mode is AttackMode.EAVESDROP else sop_exact_jam(params, method)


def sop_asym(params: SystemParams, mode) -> SopResult:
    mode = AttackMode(mode)
    return sop_asym_eav(params) if mode is AttackMode.EAVESDROP else sop_asym_jam(params)
