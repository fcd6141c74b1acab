"""Seeded Monte Carlo engine for the distance, SNR and secrecy-outage laws.

Trials are split into ``workers`` shards.  Shard ``i`` draws from a
generator seeded by the ``i``-th child of ``SeedSequence(seed)`` and shard
outputs are concatenated in shard order, so results depend only on
``(seed, trials, workers)``.

Two placements are offered.  ``"independent"`` draws every link distance
from its own marginal law, which is the model behind the analytic
densities.  ``"geometric"`` places the nodes and measures the distances,
which correlates links that share a node.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import distance as dist
from . import snr
from .design import INFEASIBLE, UNCONSTRAINED, DesignTarget, solve_d_th
from .model import AttackMode, SystemParams, Topology, derive
from .numerics import Tolerance, integrate

PLACEMENTS = ("independent", "geometric")

_BIN_TOL = Tolerance(rel=1e-8, abs=1e-12)

QUANTITIES = (
    "d_su",
    "d_sa",
    "d_au",
    "gamma_su",
    "gamma_sa",
    "gamma_au",
    "ratio-eav",
    "ratio-jam",
    "log-ratio-eav",
    "log1p-ratio-jam",
    "ratio-topology",
)


@dataclass(frozen=True)
class McConfig:
    trials: int = 10**6
    seed: int = 0
    bins: int = 200
    workers: int = 1
    placement: str = "independent"

    def __post_init__(self):
        if int(self.trials) < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if int(self.bins) < 2:
            raise ValueError(f"bins must be >= 2, got {self.bins}")
        if int(self.workers) < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.placement not in PLACEMENTS:
            raise ValueError(f"placement must be one of {PLACEMENTS}, got {self.placement!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass
class McReport:
    """Monte Carlo estimate.

    ``estimate`` is a probability for SOP runs and a dict with ``edges``,
    ``centers`` and ``density`` for histogram runs.
    """

    estimate: object
    std_err: float
    seed: int
    trials: int
    rmse: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        est = self.estimate
        if isinstance(est, dict):
            est = {k: np.asarray(v).tolist() for k, v in est.items()}
        extra = {k: (np.asarray(v).tolist() if isinstance(v, np.ndarray) else v) for k, v in self.extra.items()}
        return {
            "estimate": est,
            "std_err": self.std_err,
            "seed": self.seed,
            "trials": self.trials,
            "rmse": self.rmse,
            "extra": extra,
        }


# ---------------------------------------------------------------------------
# sharding
# ---------------------------------------------------------------------------


def _shard_sizes(trials: int, workers: int) -> list[int]:
    base, extra = divmod(trials, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def run_sharded(cfg: McConfig, fn: Callable[[np.random.Generator, int], object]) -> list:
    """Run ``fn(rng, n)`` on each shard and return the outputs in shard order."""
    children = np.random.SeedSequence(int(cfg.seed)).spawn(int(cfg.workers))
    sizes = _shard_sizes(int(cfg.trials), int(cfg.workers))
    jobs = [(np.random.default_rng(c), n) for c, n in zip(children, sizes)]
    if cfg.workers == 1:
        return [fn(*jobs[0])]
    with ThreadPoolExecutor(max_workers=int(cfg.workers)) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def _concat(parts, key=None):
    if key is None:
        return np.concatenate(parts)
    return np.concatenate([p[key] for p in parts])


# ---------------------------------------------------------------------------
# link sampling
# ---------------------------------------------------------------------------


def _uniform_radius(rng, n, radius):
    return radius * np.sqrt(rng.random(n))


def _geometric_links(rng, n, R, centre):
    # the node at the centre is `centre`; the other two are uniform
    ax, ay = dist.uniform_disk_points(rng, n, R)
    bx, by = dist.uniform_disk_points(rng, n, R)
    d_cb, d_ca, d_ab = np.hypot(bx, by), np.hypot(ax, ay), np.hypot(ax - bx, ay - by)
    if centre is Topology.SOURCE_AT_ORIGIN:  # a = attacker, b = user
        return d_cb, d_ca, d_ab
    return d_cb, d_ab, d_ca  # user at centre: a = attacker, b = source


def sample_links(
    rng: np.random.Generator,
    params: SystemParams,
    n: int,
    topology: Topology = Topology.ATTACKER_AT_ORIGIN,
    placement: str = "independent",
) -> dict:
    """Draw ``n`` triples ``(d_su, d_sa, d_au)`` and the in-zone indicator.

    For the attacker-centred topology ``d_su`` is restricted to ``D`` and
    the eavesdropper is effective when ``d_sa <= r``.  The other topologies
    use the whole disk and an always-effective eavesdropper.
    """
    topology = Topology(topology)
    R = params.R
    if topology is Topology.ATTACKER_AT_ORIGIN:
        geo = dist.DiskGeometry.from_params(params)
        sampler = dist.sample_independent_distances if placement == "independent" else dist.sample_pair_distance
        s = sampler(rng, geo, n)
        return {"d_su": s.d_su, "d_sa": s.d_sa, "d_au": s.d_au, "in_zone": s.d_sa <= params.r}
    if placement == "geometric":
        d_su, d_sa, d_au = _geometric_links(rng, n, R, topology)
    elif topology is Topology.SOURCE_AT_ORIGIN:
        d_su, d_sa = _uniform_radius(rng, n, R), _uniform_radius(rng, n, R)
        d_au = _disk_line_marginal(rng, n, R)
    else:
        d_su, d_au = _uniform_radius(rng, n, R), _uniform_radius(rng, n, R)
        d_sa = _disk_line_marginal(rng, n, R)
    return {"d_su": d_su, "d_sa": d_sa, "d_au": d_au, "in_zone": np.ones(n, dtype=bool)}


def _disk_line_marginal(rng, n, R):
    ax, ay = dist.uniform_disk_points(rng, n, R)
    bx, by = dist.uniform_disk_points(rng, n, R)
    return np.hypot(ax - bx, ay - by)


def _snrs(params, links, gains=None):
    d = derive(params)
    th = params.theta
    g = gains or {}
    return (
        d.kappa_su * g.get("su", 1.0) / links["d_su"] ** th,
        d.kappa_sa * g.get("sa", 1.0) / links["d_sa"] ** th,
        d.kappa_au * g.get("au", 1.0) / links["d_au"] ** th,
    )


def secrecy_capacity(params, mode, links, asymptotic=False, gains=None) -> np.ndarray:
    """Per-trial secrecy capacity in bit/s/Hz.

    Eavesdropping: ``[log2(1+g_SU) - log2(1+g_SA)]^+`` inside the zone and
    ``log2(1+g_SU)`` outside.  Jamming: ``log2(1 + g_SU / (1 + g_AU))``.
    The high-SNR variants drop the unit terms.
    """
    g_su, g_sa, g_au = _snrs(params, links, gains)
    if AttackMode(mode) is AttackMode.JAM:
        return np.log2(1.0 + g_su / (g_au if asymptotic else 1.0 + g_au))
    legit = np.log2(1.0 + g_su)
    if asymptotic:
        leak = np.log2(g_su / g_sa)
    else:
        leak = legit - np.log2(1.0 + g_sa)
    return np.where(links["in_zone"], np.maximum(leak, 0.0), legit)


# ---------------------------------------------------------------------------
# SOP
# ---------------------------------------------------------------------------


def _draw_gains(rng, n, fading):
    if not fading:
        return None
    return {k: rng.standard_exponential(n) for k in ("su", "sa", "au")}


def mc_sop(
    params: SystemParams,
    mode: AttackMode,
    cfg: McConfig = McConfig(),
    topology: Topology = Topology.ATTACKER_AT_ORIGIN,
    asymptotic: bool = False,
    positive_sc_only: bool = False,
    fading: bool = False,
) -> McReport:
    """Fraction of trials whose secrecy capacity falls below ``C_st``.

    Parameters
    ----------
    asymptotic : bool
        Use the high-SNR capacity instead of the exact one.
    positive_sc_only : bool
        Restrict to trials whose exact secrecy capacity is positive.
    fading : bool
        Multiply each channel constant by a unit-mean exponential gain.
    """
    mode = AttackMode(mode)

    def shard(rng, n):
        links = sample_links(rng, params, n, topology, cfg.placement)
        gains = _draw_gains(rng, n, fading)
        sc = secrecy_capacity(params, mode, links, asymptotic, gains)
        keep = np.ones(n, dtype=bool)
        if positive_sc_only:
            keep = secrecy_capacity(params, mode, links, False, gains) > 0.0
        return int(np.count_nonzero((sc < params.c_st) & keep)), int(np.count_nonzero(keep))

    parts = run_sharded(cfg, shard)
    hits = sum(h for h, _ in parts)
    n = sum(k for _, k in parts)
    p = hits / n if n else 0.0
    se = math.sqrt(p * (1.0 - p) / n) if n else 0.0
    return McReport(p, se, int(cfg.seed), int(cfg.trials), extra={"effective_trials": n, "mode": mode.value})


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------


def _quantity_sampler(quantity, params, placement, topology, mode):
    th = params.theta

    def effective(rng, n):
        # links with the eavesdropper inside its zone
        if placement == "independent":
            links = sample_links(rng, params, n, Topology.ATTACKER_AT_ORIGIN, placement)
            links["d_sa"] = _uniform_radius(rng, n, params.r)
            return links
        chunks, got = [], 0
        while got < n:
            links = sample_links(rng, params, max(2 * (n - got), 64), Topology.ATTACKER_AT_ORIGIN, placement)
            m = links["in_zone"]
            chunks.append({k: v[m] for k, v in links.items()})
            got += int(m.sum())
        return {k: np.concatenate([c[k] for c in chunks])[:n] for k in chunks[0]}

    def base(rng, n):
        return sample_links(rng, params, n, Topology.ATTACKER_AT_ORIGIN, placement)

    d = derive(params)

    if quantity == "d_su":
        return lambda rng, n: base(rng, n)["d_su"]
    if quantity == "d_sa":
        return lambda rng, n: effective(rng, n)["d_sa"]
    if quantity == "d_au":
        return lambda rng, n: base(rng, n)["d_au"]
    if quantity == "gamma_su":
        return lambda rng, n: d.kappa_su / base(rng, n)["d_su"] ** th
    if quantity == "gamma_sa":
        return lambda rng, n: d.kappa_sa / effective(rng, n)["d_sa"] ** th
    if quantity == "gamma_au":
        return lambda rng, n: d.kappa_au / base(rng, n)["d_au"] ** th

    def ratio_eav(rng, n):
        g_su, g_sa, _ = _snrs(params, effective(rng, n))
        return g_su / g_sa

    def ratio_jam(rng, n):
        g_su, _, g_au = _snrs(params, base(rng, n))
        return g_su / g_au

    if quantity == "ratio-eav":
        return ratio_eav
    if quantity == "ratio-jam":
        return ratio_jam
    if quantity == "log-ratio-eav":
        return lambda rng, n: np.log2(ratio_eav(rng, n))
    if quantity == "log1p-ratio-jam":
        return lambda rng, n: np.log2(1.0 + ratio_jam(rng, n))
    if quantity == "ratio-topology":
        topo, m = Topology(topology), AttackMode(mode)
        if topo is Topology.ATTACKER_AT_ORIGIN:
            raise ValueError("ratio-topology needs a source- or user-centred topology")

        def ratio_topo(rng, n):
            g_su, g_sa, g_au = _snrs(params, sample_links(rng, params, n, topo, placement))
            return g_su / (g_sa if m is AttackMode.EAVESDROP else g_au)

        return ratio_topo
    raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")


def analytic_density(quantity, params, topology=None, mode=None) -> Callable:
    """Analytic density matching an ``mc_pdf`` quantity."""
    geo = dist.DiskGeometry.from_params(params)
    table = {
        "d_su": lambda x: dist.pdf_su_truncated(x, geo),
        "d_sa": lambda x: dist.pdf_disk_point(x, params.r),
        "d_au": lambda x: dist.pdf_disk_point(x, params.R),
        "gamma_su": lambda x: snr.pdf_gamma_su(x, params),
        "gamma_sa": lambda x: snr.pdf_gamma_sa_effective(x, params),
        "gamma_au": lambda x: snr.pdf_gamma_au(x, params),
        "ratio-eav": lambda x: snr.pdf_ratio_eav(x, params),
        "ratio-jam": lambda x: snr.pdf_ratio_jam(x, params),
        "log-ratio-eav": lambda x: snr.pdf_log_ratio_eav(x, params),
        "log1p-ratio-jam": lambda x: snr.pdf_log1p_ratio_jam(x, params),
        "ratio-topology": lambda x: snr.pdf_ratio_topology(topology, mode, x, params),
    }
    if quantity not in table:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    return table[quantity]


def mc_samples(
    quantity: str,
    params: SystemParams,
    cfg: McConfig = McConfig(),
    topology: Topology | None = None,
    mode: AttackMode | None = None,
) -> np.ndarray:
    sampler = _quantity_sampler(quantity, params, cfg.placement, topology, mode)
    return _concat(run_sharded(cfg, sampler))


def _bin_averages(density, edges):
    out = np.empty(edges.size - 1)
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        out[i] = integrate(lambda x: float(density(x)), float(a), float(b), _BIN_TOL).value / (b - a)
    return out


def histogram_rmse(samples, density: Callable | None, bins: int, value_range=None, reference: str = "center"):
    """Normalised histogram over ``value_range`` (default observed min..max) and its RMSE.

    The density is normalised by the total sample count, so mass outside
    the range is not redistributed.  ``reference="center"`` compares with
    the density at the bin centres; ``"average"`` with its mean over each
    bin, which stays accurate next to integrable singularities.
    """
    lo, hi = value_range if value_range is not None else (float(samples.min()), float(samples.max()))
    counts, edges = np.histogram(samples, bins=bins, range=(lo, hi))
    dens = counts / (samples.size * np.diff(edges))
    centers = 0.5 * (edges[:-1] + edges[1:])
    rmse = None
    if density is not None:
        if reference == "center":
            ref = np.asarray(density(centers), dtype=float)
        elif reference == "average":
            ref = _bin_averages(density, edges)
        else:
            raise ValueError(f"reference must be 'center' or 'average', got {reference!r}")
        rmse = float(np.sqrt(np.mean((dens - ref) ** 2)))
    return {"edges": edges, "centers": centers, "density": dens}, rmse


def mc_pdf(
    quantity: str,
    params: SystemParams,
    cfg: McConfig = McConfig(),
    topology: Topology | None = None,
    mode: AttackMode | None = None,
    value_range: tuple | None = None,
    reference: str = "center",
) -> McReport:
    """Histogram of ``quantity`` with its RMSE against the analytic density.

    ``quantity`` is one of :data:`QUANTITIES`; ``ratio-topology`` also needs
    ``topology`` and ``mode``.  See :func:`histogram_rmse` for ``reference``.
    """
    samples = mc_samples(quantity, params, cfg, topology, mode)
    density = analytic_density(quantity, params, topology, mode)
    hist, rmse = histogram_rmse(samples, density, cfg.bins, value_range, reference)
    # a bin density is a scaled binomial proportion
    width = hist["edges"][1] - hist["edges"][0]
    p = hist["density"] * width
    se = float(np.max(np.sqrt(p * (1.0 - p) / samples.size)) / width)
    return McReport(hist, se, int(cfg.seed), int(cfg.trials), rmse, {"quantity": quantity})


def binning_sensitivity(
    quantity: str,
    params: SystemParams,
    cfg: McConfig = McConfig(),
    bins: Sequence[int] = (50, 100, 200, 400, 800),
    topology: Topology | None = None,
    mode: AttackMode | None = None,
    value_range: tuple | None = None,
    reference: str = "center",
) -> dict:
    """RMSE of one sample set against the analytic density for several bin counts."""
    samples = mc_samples(quantity, params, cfg, topology, mode)
    density = analytic_density(quantity, params, topology, mode)
    return {int(b): histogram_rmse(samples, density, int(b), value_range, reference)[1] for b in bins}


# ---------------------------------------------------------------------------
# fading
# ---------------------------------------------------------------------------


def mc_fading_dth(
    params: SystemParams,
    target: DesignTarget,
    fading_means: dict | None = None,
    cfg: McConfig = McConfig(trials=1000),
    law: str = "exponential",
) -> McReport:
    """Empirical distribution of ``D_th`` under random channel power gains.

    Each trial draws ``a_SU``, ``a_SA`` and ``a_AU`` (exponential around
    ``fading_means``, or equal to them for ``law="deterministic"``) and
    solves for ``D_th``.  Infeasible trials are counted in
    ``extra["infeasible_mass"]`` and left out of the histogram.
    """
    means = {"su": params.a_su, "sa": params.a_sa, "au": params.a_au}
    means.update(fading_means or {})
    if law not in ("exponential", "deterministic"):
        raise ValueError(f"law must be 'exponential' or 'deterministic', got {law!r}")

    def shard(rng, n):
        if law == "exponential":
            gains = {k: means[k] * rng.standard_exponential(n) for k in ("su", "sa", "au")}
        else:
            gains = {k: np.full(n, means[k]) for k in ("su", "sa", "au")}
        out = np.empty(n)
        status = []
        for i in range(n):
            p = params.replace(a_su=float(gains["su"][i]), a_sa=float(gains["sa"][i]), a_au=float(gains["au"][i]))
            res = solve_d_th(p, target)
            out[i] = res.value
            status.append(res.status)
        return {"d_th": out, "status": np.array(status), **{f"a_{k}": v for k, v in gains.items()}}

    parts = run_sharded(cfg, shard)
    d_th = _concat(parts, "d_th")
    status = _concat(parts, "status")
    feasible = status != INFEASIBLE
    vals = d_th[feasible]
    n = d_th.size
    if vals.size:
        lo, hi = float(vals.min()), float(vals.max())
        if hi <= lo:
            hi = lo + max(1e-9 * abs(lo), 1e-12)
        hist, _ = histogram_rmse(vals, None, cfg.bins, (lo, hi))
        se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    else:
        hist, se = {"edges": np.array([]), "centers": np.array([]), "density": np.array([])}, 0.0
    extra = {
        "samples": d_th,
        "status": status,
        "gain_su": _concat(parts, "a_su"),
        "gain_sa": _concat(parts, "a_sa"),
        "gain_au": _concat(parts, "a_au"),
        "infeasible_mass": float(np.count_nonzero(~feasible) / n),
        "unconstrained_mass": float(np.count_nonzero(status == UNCONSTRAINED) / n),
    }
    return McReport(hist, se, int(cfg.seed), int(cfg.trials), extra=extra)
