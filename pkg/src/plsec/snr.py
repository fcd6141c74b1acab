"""SNR densities, legitimate-to-attacker SNR-ratio laws and a ratio oracle.

Every link SNR is ``gamma = kappa / d^theta`` with ``d`` drawn from one of
the disk distance laws, so each density here is a change of variables of a
law from :mod:`plsec.distance`.  Ratio laws ``Z = lam (d2 / d1)^theta`` are
written in terms of ``s = 2 / theta`` and the first moment of the
normalised disk-line law::

    M1(a) = integral_0^a t g(t) dt = 2a^2 - (4/pi) beta1(a)

where ``t = d1^2 / (4R^2)`` has density ``g``.  With ``d2`` uniform in a
disk of radius ``rho`` and ``k = (4R^2 / rho^2) (z / lam)^s`` the CDF is
``k M1(a_D) / F`` while ``k a_D <= 1`` and ``1 + h(1/k) / F`` beyond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .model import AttackMode, DerivedConstants, SystemParams, Topology, derive
from .numerics import DEFAULT_TOL, Tolerance, beta1, beta_incomplete, integrate



def _vectorize(scalar_fn):
    """Broadcast a scalar density over array input, keep scalars as floats."""
    vec = np.vectorize(scalar_fn, otypes=[float])

    def wrapped(x, *args, **kwargs):
        if np.ndim(x) == 0:
            return float(scalar_fn(float(x), *args, **kwargs))
        return vec(np.asarray(x, dtype=float), *args, **kwargs)

    wrapped.__name__ = scalar_fn.__name__
    wrapped.__doc__ = scalar_fn.__doc__
    return wrapped


@dataclass(frozen=True)
class MixedDensity:
    """Continuous density plus a finite set of atoms.

    ``support`` bounds the continuous part and is used for quadrature.
    """

    density: Callable[[float], float]
    point_masses: tuple = ()
    support: tuple = (0.0, math.inf)

    def __post_init__(self):
        for loc, mass in self.point_masses:
            if not 0.0 <= mass <= 1.0:
                raise ValueError(f"point mass at {loc} must lie in [0, 1], got {mass}")

    def __call__(self, y):
        return self.density(y)

    def continuous_mass(self, tol: Tolerance = DEFAULT_TOL) -> float:
        lo, hi = self.support
        return integrate(self.density, lo, hi, tol, scale=max(lo, 1.0)).value

    def total_mass(self, tol: Tolerance = DEFAULT_TOL) -> float:
        return self.continuous_mass(tol) + sum(m for _, m in self.point_masses)


# ---------------------------------------------------------------------------
# generic SNR laws
# ---------------------------------------------------------------------------


@_vectorize
def snr_pdf_disk_point(y: float, kappa: float, radius: float, theta: float) -> float:
    """Density of ``kappa / d^theta`` for ``d`` uniform-in-disk from the centre."""
    if y <= kappa / radius**theta:
        return 0.0
    return 2.0 / (theta * y * radius * radius) * (y / kappa) ** (-2.0 / theta)


@_vectorize
def snr_pdf_disk_line(x: float, kappa: float, R: float, D: float, theta: float, f_d: float) -> float:
    """Density of ``kappa / d^theta`` for ``d`` the disk-line distance given ``d <= D``."""
    if x <= kappa / D**theta:
        return 0.0
    u = (kappa / x) ** (2.0 / theta) / (4.0 * R * R)
    if u >= 1.0:
        return 0.0
    return 8.0 * u / (f_d * x * math.pi * theta) * (math.pi - 2.0 * beta_incomplete(u, 0.5, 1.5))


def _d(params, derived):
    return derived if derived is not None else derive(params)


def pdf_gamma_su(x, params: SystemParams, derived: DerivedConstants | None = None):
    """Legitimate-link SNR density, supported on ``x > kappa_SU / D^theta``."""
    d = _d(params, derived)
    return snr_pdf_disk_line(x, d.kappa_su, params.R, params.D, params.theta, d.f_d)


def pdf_gamma_sa(y, params: SystemParams, derived: DerivedConstants | None = None):
    """Continuous part of the eavesdropping-link SNR law.

    It integrates to ``alpha``; the remaining ``1 - alpha`` sits at ``y = 0``
    (source outside the eavesdropping zone), see :func:`gamma_sa_distribution`.
    """
    d = _d(params, derived)
    return d.alpha * snr_pdf_disk_point(y, d.kappa_sa, params.r, params.theta)


def pdf_gamma_sa_effective(y, params: SystemParams, derived: DerivedConstants | None = None):
    """Eavesdropping-link SNR density given the source lies in the zone."""
    d = _d(params, derived)
    return snr_pdf_disk_point(y, d.kappa_sa, params.r, params.theta)


def gamma_sa_distribution(params: SystemParams, derived: DerivedConstants | None = None) -> MixedDensity:
    d = _d(params, derived)
    atoms = ((0.0, 1.0 - d.alpha),) if d.alpha < 1.0 else ()
    return MixedDensity(
        density=lambda y: pdf_gamma_sa(y, params, d),
        point_masses=atoms,
        support=(d.kappa_sa / params.r**params.theta, math.inf),
    )


def pdf_gamma_au(y, params: SystemParams, derived: DerivedConstants | None = None):
    """Jamming-link SNR density, supported on ``y > kappa_AU / R^theta``."""
    d = _d(params, derived)
    return snr_pdf_disk_point(y, d.kappa_au, params.R, params.theta)


# ---------------------------------------------------------------------------
# attacker-at-origin ratio laws
# ---------------------------------------------------------------------------


def _m1(a: float) -> float:
    return 2.0 * a * a - (4.0 / math.pi) * beta1(a)


def _h(u: float) -> float:
    # CDF tail of the ratio law past the truncation breakpoint, u = 1/k
    return -2.0 * u + (4.0 / math.pi) * (
        u * beta_incomplete(u, 0.5, 1.5)
        - 2.0 * beta_incomplete(u, 1.5, 1.5)
        + beta_incomplete(u, 2.5, 1.5) / u
    )


def ratio_breakpoint(lam: float, rho: float, D: float, theta: float) -> float:
    """``lam rho^theta / D^theta``, where the truncation of ``d1`` stops binding."""
    return lam * (rho / D) ** theta


@_vectorize
def pdf_distance_ratio(z: float, lam: float, rho: float, R: float, D: float, theta: float, f_d: float) -> float:
    """Density of ``lam (d2/d1)^theta`` with ``d1`` truncated disk-line, ``d2`` disk-point on ``rho``.

    Branch 1 (``z`` below the breakpoint) and branch 2 are::

        z^(s-1) lam^-s D^4 / (F theta R^2 rho^2) - 32 R^2 lam^-s z^(s-1) beta1(D^2/4R^2) / (F pi theta rho^2)
        lam^s rho^2 z^(-s-1) / (F theta R^2) - 32 R^2 lam^-s z^(s-1) beta1(t0) / (F pi theta rho^2)

    with ``s = 2/theta`` and ``t0 = lam^s rho^2 / (4 R^2 z^s)``.
    """
    if z <= 0.0:
        return 0.0
    s = 2.0 / theta
    common = 32.0 * R * R * lam ** (-s) * z ** (s - 1.0) / (f_d * math.pi * theta * rho * rho)
    if z < ratio_breakpoint(lam, rho, D, theta):
        a_d = D * D / (4.0 * R * R)
        lead = z ** (s - 1.0) * lam ** (-s) * D**4 / (f_d * theta * R * R * rho * rho)
        return lead - common * beta1(a_d)
    t0 = lam**s * rho * rho / (4.0 * R * R * z**s)
    lead = lam**s * rho * rho * z ** (-s - 1.0) / (f_d * theta * R * R)
    return lead - common * beta1(min(t0, 1.0))


@_vectorize
def cdf_distance_ratio(z: float, lam: float, rho: float, R: float, D: float, theta: float, f_d: float) -> float:
    """CDF matching :func:`pdf_distance_ratio`."""
    if z <= 0.0:
        return 0.0
    s = 2.0 / theta
    k = 4.0 * R * R / (rho * rho) * (z / lam) ** s
    a_d = D * D / (4.0 * R * R)
    if k * a_d <= 1.0:
        val = k * _m1(a_d) / f_d
    else:
        val = 1.0 + _h(1.0 / k) / f_d
    return min(1.0, max(0.0, val))


def pdf_ratio_eav(z, params: SystemParams, derived: DerivedConstants | None = None):
    """Density of ``gamma_SU / gamma_SA`` given an effective eavesdropper.

    Breakpoint at ``lambda_E r^theta / D^theta``; normalises to 1.
    """
    d = _d(params, derived)
    return pdf_distance_ratio(z, d.lambda_e, params.r, params.R, params.D, params.theta, d.f_d)


def cdf_ratio_eav(z, params: SystemParams, derived: DerivedConstants | None = None):
    d = _d(params, derived)
    return cdf_distance_ratio(z, d.lambda_e, params.r, params.R, params.D, params.theta, d.f_d)


def pdf_ratio_jam(z, params: SystemParams, derived: DerivedConstants | None = None):
    """Density of ``gamma_SU / gamma_AU``, breakpoint ``lambda_J R^theta / D^theta``."""
    d = _d(params, derived)
    return pdf_distance_ratio(z, d.lambda_j, params.R, params.R, params.D, params.theta, d.f_d)


def cdf_ratio_jam(z, params: SystemParams, derived: DerivedConstants | None = None):
    d = _d(params, derived)
    return cdf_distance_ratio(z, d.lambda_j, params.R, params.R, params.D, params.theta, d.f_d)


def pdf_log_ratio_eav(c, params: SystemParams, derived: DerivedConstants | None = None):
    """Density of ``log2(gamma_SU / gamma_SA)``: ``ln2 2^c f(2^c)``."""
    w = np.exp2(np.asarray(c, dtype=float))
    out = math.log(2.0) * w * pdf_ratio_eav(w if np.ndim(c) else float(w), params, derived)
    return float(out) if np.ndim(c) == 0 else out


def pdf_log1p_ratio_jam(c, params: SystemParams, derived: DerivedConstants | None = None):
    """Density of ``log2(1 + gamma_SU / gamma_AU)``: ``ln2 2^c f(2^c - 1)``, zero for ``c <= 0``."""
    ca = np.asarray(c, dtype=float)
    w = np.exp2(ca)
    z = np.where(ca > 0.0, w - 1.0, 0.0)
    f = pdf_ratio_jam(z if np.ndim(c) else float(z), params, derived)
    out = np.where(ca > 0.0, math.log(2.0) * w * f, 0.0)
    return float(out) if np.ndim(c) == 0 else out


# ---------------------------------------------------------------------------
# ratio oracle
# ---------------------------------------------------------------------------


def ratio_pdf_oracle(
    num: Callable[[float], float],
    den,
    z: float,
    num_support: tuple = (0.0, math.inf),
    den_support: tuple | None = None,
    tol: Tolerance = DEFAULT_TOL,
    points: Sequence[float] | None = None,
) -> float:
    """Density of ``X / Y`` at ``z`` from ``f(z) = int y f_X(z y) f_Y(y) dy``.

    The lower limit is the larger of the two support constraints
    ``y >= x_lo / z`` and ``y >= y_lo``; likewise for the upper limit.
    ``den`` may be a :class:`MixedDensity`, whose atoms at 0 do not
    contribute for ``z > 0``.
    """
    if z <= 0.0:
        return 0.0
    if isinstance(den, MixedDensity):
        den_support = den.support if den_support is None else den_support
        den = den.density
    den_support = den_support or (0.0, math.inf)
    lo = max(num_support[0] / z, den_support[0])
    hi = min(num_support[1] / z, den_support[1])
    if hi <= lo:
        return 0.0

    def integrand(y):
        return y * num(z * y) * den(y)

    scale = lo if lo > 0.0 else 1.0
    return integrate(integrand, lo, hi, tol, points=points, scale=scale).value


def ratio_oracle_eav(z: float, params: SystemParams, derived: DerivedConstants | None = None) -> float:
    d = _d(params, derived)
    th = params.theta
    return ratio_pdf_oracle(
        lambda x: pdf_gamma_su(x, params, d),
        lambda y: pdf_gamma_sa_effective(y, params, d),
        z,
        num_support=(d.kappa_su / params.D**th, math.inf),
        den_support=(d.kappa_sa / params.r**th, math.inf),
    )


def ratio_oracle_jam(z: float, params: SystemParams, derived: DerivedConstants | None = None) -> float:
    d = _d(params, derived)
    th = params.theta
    return ratio_pdf_oracle(
        lambda x: pdf_gamma_su(x, params, d),
        lambda y: pdf_gamma_au(y, params, d),
        z,
        num_support=(d.kappa_su / params.D**th, math.inf),
        den_support=(d.kappa_au / params.R**th, math.inf),
    )


# ---------------------------------------------------------------------------
# alternative topologies (no separation limit, no eavesdropping zone)
# ---------------------------------------------------------------------------


@_vectorize
def pdf_iid_power_ratio(z: float, lam: float, theta: float, tail_coef: float = 1.0) -> float:
    """Density of ``lam (d2/d1)^theta`` for iid disk-point distances.

    ``W = d2/d1`` has density ``w`` below 1 and ``w^-3`` above, so the
    density is ``lam^-s z^(s-1) / theta`` for ``z < lam`` and
    ``tail_coef lam^s z^(-s-1) / theta`` beyond.  Only ``tail_coef = 1``
    normalises; other values are accepted so that alternative tail
    coefficients can be checked.
    """
    if z <= 0.0:
        return 0.0
    s = 2.0 / theta
    if z < lam:
        return lam ** (-s) * z ** (s - 1.0) / theta
    return tail_coef * lam**s * z ** (-s - 1.0) / theta


@_vectorize
def pdf_point_over_line_ratio(z: float, lam: float, theta: float) -> float:
    """Density of ``lam (d2/d1)^theta`` with ``d1`` disk-point and ``d2`` untruncated disk-line.

    With ``c = (z/lam)^s / 4``: ``lam^-s z^(s-1)/theta - 32 lam^s z^(-s-1)
    beta1(c) / (pi theta)`` for ``c <= 1`` (``z <= 2^theta lam``) and
    ``2 lam^s z^(-s-1) / theta`` beyond.
    """
    if z <= 0.0:
        return 0.0
    s = 2.0 / theta
    c = (z / lam) ** s / 4.0
    if c <= 1.0:
        return lam ** (-s) * z ** (s - 1.0) / theta - 32.0 * lam**s * z ** (-s - 1.0) * beta1(c) / (
            math.pi * theta
        )
    return 2.0 * lam**s * z ** (-s - 1.0) / theta


def _topology_oracle(z, num_kappa, den_kappa, den_law, params):
    R, th = params.R, params.theta

    def num(x):
        return snr_pdf_disk_point(x, num_kappa, R, th)

    if den_law == "point":

        def den(y):
            return snr_pdf_disk_point(y, den_kappa, R, th)

    else:

        def den(y):
            return snr_pdf_disk_line(y, den_kappa, R, 2.0 * R, th, 1.0)

    return ratio_pdf_oracle(
        num,
        den,
        z,
        num_support=(num_kappa / R**th, math.inf),
        den_support=(den_kappa / (2.0 * R if den_law == "line" else R) ** th, math.inf),
    )


def pdf_ratio_topology(
    topology: Topology,
    mode: AttackMode,
    z,
    params: SystemParams,
    derived: DerivedConstants | None = None,
):
    """Legitimate-to-attacker SNR ratio density for a node at the disk centre.

    Source at the centre: ``d_SU`` and ``d_SA`` are both centre distances
    (iid form) under eavesdropping; under jamming ``d_AU`` is a disk-line
    distance.  User at the centre: ``d_SA`` is a disk-line distance under
    eavesdropping, evaluated numerically by :func:`ratio_pdf_oracle`; under
    jamming ``d_SU`` and ``d_AU`` are iid centre distances.

    Raises
    ------
    ValueError
        For the attacker-at-centre topology, served by
        :func:`pdf_ratio_eav` and :func:`pdf_ratio_jam`.
    """
    topology = Topology(topology)
    mode = AttackMode(mode)
    d = _d(params, derived)
    th = params.theta
    if topology is Topology.ATTACKER_AT_ORIGIN:
        raise ValueError("attacker-origin ratio laws are pdf_ratio_eav / pdf_ratio_jam")
    if topology is Topology.SOURCE_AT_ORIGIN:
        if mode is AttackMode.EAVESDROP:
            return pdf_iid_power_ratio(z, d.lambda_e, th)
        return pdf_point_over_line_ratio(z, d.lambda_j, th)
    if mode is AttackMode.JAM:
        return pdf_iid_power_ratio(z, d.lambda_j, th)

    def one(zz):
        return _topology_oracle(zz, d.kappa_su, d.kappa_sa, "line", params)

    if np.ndim(z) == 0:
        return one(float(z))
    return np.array([one(float(v)) for v in np.ravel(z)]).reshape(np.shape(z))


def topology_oracle(
    topology: Topology, mode: AttackMode, z: float, params: SystemParams, derived: DerivedConstants | None = None
) -> float:
    """Numeric ratio density for a centred-node topology, built from the distance laws."""
    topology = Topology(topology)
    mode = AttackMode(mode)
    d = _d(params, derived)
    if topology is Topology.ATTACKER_AT_ORIGIN:
        raise ValueError("attacker-origin ratio laws are pdf_ratio_eav / pdf_ratio_jam")
    if mode is AttackMode.EAVESDROP:
        law = "point" if topology is Topology.SOURCE_AT_ORIGIN else "line"
        return _topology_oracle(z, d.kappa_su, d.kappa_sa, law, params)
    law = "line" if topology is Topology.SOURCE_AT_ORIGIN else "point"
    return _topology_oracle(z, d.kappa_su, d.kappa_au, law, params)
