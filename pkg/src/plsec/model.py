"""System parameters, attack modes, topologies and derived link constants."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from functools import lru_cache


class ParameterError(ValueError):
    """Invalid physical parameter; ``field`` names the offending input."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class AttackMode(enum.Enum):
    EAVESDROP = "eavesdrop"
    JAM = "jam"


class Topology(enum.Enum):
    ATTACKER_AT_ORIGIN = "attacker-origin"
    SOURCE_AT_ORIGIN = "source-origin"
    USER_AT_ORIGIN = "user-origin"


def dbm_to_watt(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watt_to_dbm(p_w: float) -> float:
    return 10.0 * math.log10(p_w) + 30.0


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs of the source/user/attacker deployment.

    Powers are in watts and lengths in meters.  ``D`` defaults to ``2R`` (no
    separation limit) and ``r`` to ``R`` (attacker hears the whole region).
    ``D`` above ``2R`` is clipped to ``2R`` since no pair can be farther apart.
    """

    p_s: float
    p_j: float
    noise: float
    theta: float
    a_su: float
    a_sa: float
    a_au: float
    R: float
    D: float | None = None
    r: float | None = None
    c_st: float = 1.0

    def __post_init__(self):
        for name in ("p_s", "p_j", "noise", "a_su", "a_sa", "a_au", "R"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ParameterError(name, f"must be a finite positive number, got {v!r}")
        if not (math.isfinite(self.theta) and self.theta >= 2):
            raise ParameterError("theta", f"path-loss exponent must be >= 2, got {self.theta!r}")
        if self.D is None or self.D >= 2 * self.R:
            object.__setattr__(self, "D", 2.0 * self.R)
        if self.r is None:
            object.__setattr__(self, "r", float(self.R))
        if not (math.isfinite(self.D) and self.D > 0):
            raise ParameterError("D", f"must satisfy 0 < D <= 2R, got {self.D!r}")
        if not (math.isfinite(self.r) and 0 < self.r <= self.R):
            raise ParameterError("r", f"must satisfy 0 < r <= R, got {self.r!r}")
        if not (math.isfinite(self.c_st) and self.c_st >= 0):
            raise ParameterError("c_st", f"target rate must be >= 0, got {self.c_st!r}")

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def reference_defaults(**overrides) -> SystemParams:
    """Reference deployment: 100 mW powers, -90 dBm noise, theta 3, a = 1e-5,
    R = 100 m, r = 50 m, target rate 1 bit/s/Hz."""
    base = dict(
        p_s=0.1,
        p_j=0.1,
        noise=dbm_to_watt(-90.0),
        theta=3.0,
        a_su=1e-5,
        a_sa=1e-5,
        a_au=1e-5,
        R=100.0,
        D=None,
        r=50.0,
        c_st=1.0,
    )
    base.update(overrides)
    return SystemParams(**base)


@dataclass(frozen=True)
class DerivedConstants:
    kappa_su: float
    kappa_sa: float
    kappa_au: float
    lambda_e: float
    lambda_j: float
    alpha: float
    f_d: float


@lru_cache(maxsize=512)
def derive(params: SystemParams) -> DerivedConstants:
    from .distance import cdf_disk_line

    kappa_su = params.p_s * params.a_su / params.noise
    kappa_sa = params.p_s * params.a_sa / params.noise
    kappa_au = params.p_j * params.a_au / params.noise
    return DerivedConstants(
        kappa_su=kappa_su,
        kappa_sa=kappa_sa,
        kappa_au=kappa_au,
        # ratios taken from the channel constants so common power scaling
        # cannot perturb them by rounding
        lambda_e=params.a_su / params.a_sa,
        lambda_j=(params.p_s * params.a_su) / (params.p_j * params.a_au),
        alpha=1.0 if params.r == params.R else (params.r / params.R) ** 2,
        f_d=cdf_disk_line(params.D, params.R),
    )


def worst_case_snr(params: SystemParams, derived: DerivedConstants | None = None) -> dict:
    """Link SNRs at the largest allowed distances (D, r and R respectively)."""
    d = derived or derive(params)
    th = params.theta
    return {
        "su": d.kappa_su / params.D**th,
        "sa": d.kappa_sa / params.r**th,
        "au": d.kappa_au / params.R**th,
    }
