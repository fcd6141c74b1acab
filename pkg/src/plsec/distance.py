"""Distance laws inside a disk of radius R and exact samplers for them.

``pdf_disk_line`` is the law of the distance between two uniform points in
the disk, ``pdf_disk_point`` that of a uniform point from the centre.  The
disk-line CDF is written in closed form with ``x = d^2 / (4 R^2)``::

    F(d) = 4x - (8/pi) [x B_x(1/2, 3/2) - B_x(3/2, 3/2)]

which follows from integrating the density after the substitution
``t = l^2 / (4R^2)`` and gives ``F(2R) = 1`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .numerics import DomainError, beta_incomplete, beta_regularized


@dataclass(frozen=True)
class DiskGeometry:
    R: float
    D: float
    r: float

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError(f"R must be positive, got {self.R}")
        if not 0 < self.D:
            raise ValueError(f"D must be positive, got {self.D}")
        if self.D > 2 * self.R:
            object.__setattr__(self, "D", 2.0 * self.R)
        if not 0 < self.r <= self.R:
            raise ValueError(f"r must satisfy 0 < r <= R, got {self.r}")

    @classmethod
    def from_params(cls, params) -> "DiskGeometry":
        return cls(params.R, params.D, params.r)


def _scalar_out(v, like):
    return float(v) if np.ndim(like) == 0 else v


def pdf_disk_line(l, R: float):
    """``(2l/R^2) I_{1 - l^2/(4R^2)}(3/2, 1/2)`` on ``(0, 2R]``, zero elsewhere."""
    if isinstance(l, (float, int)):
        if not 0.0 < l <= 2.0 * R:
            return 0.0
        return 2.0 * l / (R * R) * beta_regularized(max(0.0, 1.0 - l * l / (4.0 * R * R)), 1.5, 0.5)
    la = np.asarray(l, dtype=float)
    inside = (la > 0.0) & (la <= 2.0 * R)
    arg = np.clip(1.0 - np.where(inside, la, 0.0) ** 2 / (4.0 * R * R), 0.0, 1.0)
    out = np.where(inside, 2.0 * la / (R * R) * beta_regularized(arg, 1.5, 0.5), 0.0)
    return _scalar_out(out, l)


def _disk_line_cdf_unit(x):
    # x = d^2 / (4 R^2) in [0, 1]
    if isinstance(x, float) and x >= 1.0:
        return 1.0
    return 4.0 * x - (8.0 / math.pi) * (x * beta_incomplete(x, 0.5, 1.5) - beta_incomplete(x, 1.5, 1.5))


def cdf_disk_line(d, R: float):
    """Probability that two uniform points in the R-disk are closer than ``d``."""
    da = np.asarray(d, dtype=float)
    if np.any(da < 0.0) or np.any(da > 2.0 * R * (1.0 + 1e-12)):
        raise DomainError(f"distance must lie in [0, 2R] = [0, {2 * R}], got {d}")
    if isinstance(d, (float, int)):
        x = min(1.0, d * d / (4.0 * R * R))
        return min(1.0, max(0.0, _disk_line_cdf_unit(x)))
    x = np.minimum(1.0, da * da / (4.0 * R * R))
    out = np.where(x >= 1.0, 1.0, np.clip(_disk_line_cdf_unit(x), 0.0, 1.0))
    return _scalar_out(out, d)


def pdf_su_truncated(l, geo: DiskGeometry):
    """Disk-line density conditioned on ``l < D``."""
    f_d = cdf_disk_line(geo.D, geo.R)
    if isinstance(l, (float, int)):
        return pdf_disk_line(l, geo.R) / f_d if 0.0 < l <= geo.D else 0.0
    la = np.asarray(l, dtype=float)
    out = np.where((la > 0) & (la <= geo.D), pdf_disk_line(la, geo.R) / f_d, 0.0)
    return _scalar_out(out, l)


def cdf_su_truncated(l, geo: DiskGeometry):
    la = np.clip(np.asarray(l, dtype=float), 0.0, geo.D)
    out = cdf_disk_line(la if np.ndim(l) else float(la), geo.R) / cdf_disk_line(geo.D, geo.R)
    return _scalar_out(out, l)


def pdf_disk_point(l, radius: float):
    """``2l / radius^2`` on ``(0, radius]``, zero elsewhere."""
    if isinstance(l, (float, int)):
        return 2.0 * l / (radius * radius) if 0.0 < l <= radius else 0.0
    la = np.asarray(l, dtype=float)
    return _scalar_out(np.where((la > 0) & (la <= radius), 2.0 * la / radius**2, 0.0), l)


def cdf_disk_point(l, radius: float):
    la = np.clip(np.asarray(l, dtype=float), 0.0, radius)
    return _scalar_out((la / radius) ** 2, l)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


class DistanceSample(NamedTuple):
    d_su: np.ndarray
    d_sa: np.ndarray
    d_au: np.ndarray
    acceptance: float


def uniform_disk_points(rng: np.random.Generator, n: int, radius: float):
    """Area-uniform points: radius ``R sqrt(u)``, uniform angle."""
    rad = radius * np.sqrt(rng.random(n))
    ang = 2.0 * np.pi * rng.random(n)
    return rad * np.cos(ang), rad * np.sin(ang)


def _truncated_pairs(rng, geo: DiskGeometry, n: int):
    xs, ys, xu, yu = [], [], [], []
    drawn = kept = 0
    while kept < n:
        # oversize the batch by the expected acceptance rate
        want = n - kept
        batch = int(want / max(cdf_disk_line(geo.D, geo.R), 1e-3) * 1.1) + 16
        sx, sy = uniform_disk_points(rng, batch, geo.R)
        ux, uy = uniform_disk_points(rng, batch, geo.R)
        ok = np.hypot(sx - ux, sy - uy) <= geo.D
        drawn += batch
        kept += int(ok.sum())
        xs.append(sx[ok])
        ys.append(sy[ok])
        xu.append(ux[ok])
        yu.append(uy[ok])
    sx, sy, ux, uy = (np.concatenate(a)[:n] for a in (xs, ys, xu, yu))
    return sx, sy, ux, uy, kept / drawn


def sample_pair_distance(rng: np.random.Generator, geo: DiskGeometry, n: int = 1) -> DistanceSample:
    """Place S and U uniformly in the disk with the attacker at the centre.

    The pair is redrawn until ``d_su <= D``; the observed acceptance rate
    estimates ``F(D)``.
    """
    sx, sy, ux, uy, acc = _truncated_pairs(rng, geo, n)
    return DistanceSample(np.hypot(sx - ux, sy - uy), np.hypot(sx, sy), np.hypot(ux, uy), acc)


def sample_independent_distances(
    rng: np.random.Generator, geo: DiskGeometry, n: int = 1
) -> DistanceSample:
    """Draw the three link distances independently from their marginals.

    ``d_su`` follows the truncated disk-line law, ``d_sa`` and ``d_au`` the
    disk-point law on radius R.  This is the independent-link model used by
    the analytic densities; real placements correlate ``d_su`` with the other
    two through the shared node positions.
    """
    sx, sy, ux, uy, acc = _truncated_pairs(rng, geo, n)
    d_su = np.hypot(sx - ux, sy - uy)
    d_sa = geo.R * np.sqrt(rng.random(n))
    d_au = geo.R * np.sqrt(rng.random(n))
    return DistanceSample(d_su, d_sa, d_au, acc)
