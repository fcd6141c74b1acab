"""QoS-driven design: separation and power thresholds for a target SOP.

Closed forms
------------
``D_o = (kappa_SU / (2^C - 1))^(1/theta)``
    Below it the legitimate link alone always supports ``C``.
``D_sat = (lambda_E r^theta / 2^C)^(1/theta)``, ``r_sat = (2^C D^theta / lambda_E)^(1/theta)``
    Beyond these the eavesdropping range no longer changes the high-SNR SOP.

The solvers bisect the monotone high-SNR SOP residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import AttackMode, SystemParams, derive
from .numerics import Tolerance, solve_bracketed
from .sop import sop_asym, sop_exact

SOLVED = "solved"
UNCONSTRAINED = "unconstrained"
INFEASIBLE = "infeasible"

_SOLVER_TOL = Tolerance(rel=1e-13, abs=1e-10)
_DEFAULT_P_MAX = 10.0
_DEFAULT_P_MIN = 1e-9


@dataclass(frozen=True)
class DesignTarget:
    """Acceptable SOP ``p_o_th`` and optional bounds on the solved variable."""

    p_o_th: float
    mode: AttackMode = AttackMode.EAVESDROP
    bounds: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", AttackMode(self.mode))
        if not 0.0 < self.p_o_th < 1.0:
            raise ValueError(f"p_o_th must lie in (0, 1), got {self.p_o_th}")
        if self.bounds is not None:
            lo, hi = self.bounds
            if not (0.0 <= lo < hi):
                raise ValueError(f"bounds must satisfy 0 <= lo < hi, got {self.bounds}")


@dataclass(frozen=True)
class DesignResult:
    value: float
    residual: float
    feasible: bool
    status: str


def _rate_factor(params: SystemParams) -> float:
    return math.expm1(params.c_st * math.log(2.0))


def threshold_d_o(params: SystemParams) -> float:
    """Largest separation with zero legitimate-link outage; ``inf`` at ``C_st = 0``."""
    z = _rate_factor(params)
    if z <= 0.0:
        return math.inf
    return (derive(params).kappa_su / z) ** (1.0 / params.theta)


def threshold_d_sat(params: SystemParams) -> float:
    lam = derive(params).lambda_e
    return (lam * params.r**params.theta / 2.0**params.c_st) ** (1.0 / params.theta)


def threshold_r_sat(params: SystemParams) -> float:
    lam = derive(params).lambda_e
    return (2.0**params.c_st * params.D**params.theta / lam) ** (1.0 / params.theta)


def _sop_fn(mode, method):
    if method == "asymptotic":
        return lambda p: sop_asym(p, mode).value
    if method == "exact":
        return lambda p: sop_exact(p, mode).value
    raise ValueError(f"method must be 'asymptotic' or 'exact', got {method!r}")


def _solve(residual, lo, hi):
    x = solve_bracketed(residual, lo, hi, _SOLVER_TOL)
    return x, residual(x)


def solve_d_th(params: SystemParams, target: DesignTarget, method: str = "asymptotic") -> DesignResult:
    """Largest separation ``D`` whose SOP does not exceed ``p_o_th``.

    Returns ``2R`` with status ``"unconstrained"`` when even the largest
    separation meets the target, and the lower bound with
    ``feasible=False`` when no separation does.
    """
    sop = _sop_fn(target.mode, method)
    lo, hi = target.bounds or (1e-6 * params.R, 2.0 * params.R)
    hi = min(hi, 2.0 * params.R)

    def residual(D):
        return sop(params.replace(D=D)) - target.p_o_th

    r_hi = residual(hi)
    if r_hi <= 0.0:
        return DesignResult(hi, r_hi, True, UNCONSTRAINED)
    r_lo = residual(lo)
    if r_lo > 0.0:
        return DesignResult(lo, r_lo, False, INFEASIBLE)
    x, res = _solve(residual, lo, hi)
    return DesignResult(x, res, True, SOLVED)


def _require_jam(target):
    if target.mode is not AttackMode.JAM:
        raise ValueError("power thresholds are defined for the jamming mode only")


def solve_ps_th(params: SystemParams, target: DesignTarget, method: str = "asymptotic") -> DesignResult:
    """Smallest source power whose jamming SOP does not exceed ``p_o_th``."""
    _require_jam(target)
    sop = _sop_fn(target.mode, method)
    lo, hi = target.bounds or (_DEFAULT_P_MIN, _DEFAULT_P_MAX)

    def residual(p):
        return sop(params.replace(p_s=p)) - target.p_o_th

    r_lo = residual(lo)
    if r_lo <= 0.0:
        return DesignResult(lo, r_lo, True, UNCONSTRAINED)
    r_hi = residual(hi)
    if r_hi > 0.0:
        return DesignResult(hi, r_hi, False, INFEASIBLE)
    x, res = _solve(residual, lo, hi)
    return DesignResult(x, res, True, SOLVED)


def solve_pj_th(params: SystemParams, target: DesignTarget, method: str = "asymptotic") -> DesignResult:
    """Smallest jamming power that drives the SOP up to ``p_o_th``."""
    _require_jam(target)
    sop = _sop_fn(target.mode, method)
    lo, hi = target.bounds or (_DEFAULT_P_MIN, _DEFAULT_P_MAX)

    def residual(p):
        return sop(params.replace(p_j=p)) - target.p_o_th

    r_lo = residual(lo)
    if r_lo >= 0.0:
        return DesignResult(lo, r_lo, True, UNCONSTRAINED)
    r_hi = residual(hi)
    if r_hi < 0.0:
        return DesignResult(hi, r_hi, False, INFEASIBLE)
    x, res = _solve(residual, lo, hi)
    return DesignResult(x, res, True, SOLVED)
