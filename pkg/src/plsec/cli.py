"""Command-line front end: ``plsec derive|pdf|sop|solve|sweep|simulate``.

Configuration is a JSON document::

    {
      "params": {"p_s": "20 dBm", "p_j": 0.1, "noise": "-90 dBm", "theta": 3,
                 "a_su": 1e-5, "a_sa": 1e-5, "a_au": 1e-5,
                 "R": 100, "D": null, "r": 50, "c_st": 1},
      "mode": "eavesdrop", "topology": "attacker-origin",
      "mc": {"trials": 1000000, "seed": 0, "bins": 200, "workers": 1, "placement": "independent"},
      "pdf": {"quantity": "log-ratio-eav", "start": -4, "stop": 8, "num": 121, "empirical": false},
      "solve": {"target": "d_th", "p_o_th": 0.1, "bounds": null, "method": "asymptotic"},
      "sweep": {"var": "r", "start": 10, "stop": 150, "step": 5, "exact": false},
      "output": {"path": null, "format": "csv"}
    }

Powers (``p_s``, ``p_j``, ``noise``) are watts when numeric and may carry a
``W``, ``mW`` or ``dBm`` suffix when given as strings.  Every section is
optional; missing parameters take the reference deployment values.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from . import design, mc
from .model import AttackMode, ParameterError, SystemParams, Topology, derive, dbm_to_watt, reference_defaults
from .numerics import ConvergenceError
from .sop import ASYMPTOTIC, EXACT_DISTANCE, MONTE_CARLO, sop_asym, sop_exact

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NONCONVERGENCE = 4

COMMANDS = ("derive", "pdf", "sop", "solve", "sweep", "simulate")
_POWER_FIELDS = ("p_s", "p_j", "noise")
_PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(SystemParams))
_POWER_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*(dBm|mW|W)\s*$")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class InfeasibleError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    var: str
    start: float
    stop: float
    step: float
    exact: bool = False

    def __post_init__(self):
        if self.var not in _PARAM_FIELDS:
            raise ConfigError("sweep.var", f"unknown parameter {self.var!r}; expected one of {_PARAM_FIELDS}")
        if not self.start < self.stop:
            raise ConfigError("sweep", f"start must be < stop, got {self.start}:{self.stop}")
        if not self.step > 0:
            raise ConfigError("sweep.step", f"step must be > 0, got {self.step}")

    def values(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(n)

    @classmethod
    def parse(cls, text: str, exact: bool = False) -> "SweepSpec":
        m = re.fullmatch(r"\s*(\w+)\s*=\s*([^:]+):([^:]+):([^:]+)\s*", text)
        if not m:
            raise ConfigError("sweep", f"expected var=start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(g) for g in m.groups()[1:])
        except ValueError as exc:
            raise ConfigError("sweep", str(exc)) from None
        return cls(m.group(1), start, stop, step, exact)


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    mode: AttackMode = AttackMode.EAVESDROP
    topology: Topology = Topology.ATTACKER_AT_ORIGIN
    mc: mc.McConfig = field(default_factory=mc.McConfig)
    pdf: dict = field(default_factory=dict)
    solve: dict = field(default_factory=dict)
    sweep: SweepSpec | None = None
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.fmt not in ("csv", "json"):
            raise ConfigError("output.format", f"must be 'csv' or 'json', got {self.fmt!r}")

    def to_dict(self) -> dict:
        sweep = None
        if self.sweep is not None:
            sweep = dataclasses.asdict(self.sweep)
        return {
            "params": self.params.to_dict(),
            "mode": self.mode.value,
            "topology": self.topology.value,
            "mc": dataclasses.asdict(self.mc),
            "pdf": dict(self.pdf),
            "solve": dict(self.solve),
            "sweep": sweep,
            "output": {"path": self.out, "format": self.fmt},
        }


def parse_power(value, field_name: str) -> float:
    """Watts from a number or a string with ``W``, ``mW`` or ``dBm`` suffix."""
    if isinstance(value, bool):
        raise ConfigError(field_name, f"expected a power, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _POWER_RE.match(value)
        if m:
            x, unit = float(m.group(1)), m.group(2)
            if unit == "dBm":
                return dbm_to_watt(x)
            return x * 1e-3 if unit == "mW" else x
    raise ConfigError(field_name, f"expected watts or a string like '20 dBm', got {value!r}")


def _enum(cls, value, field_name):
    try:
        return cls(value)
    except ValueError:
        choices = [e.value for e in cls]
        raise ConfigError(field_name, f"expected one of {choices}, got {value!r}") from None


def _build_params(raw: dict) -> SystemParams:
    if not isinstance(raw, dict):
        raise ConfigError("params", "must be an object")
    unknown = set(raw) - set(_PARAM_FIELDS)
    if unknown:
        raise ConfigError(f"params.{sorted(unknown)[0]}", "unknown parameter")
    values = {}
    for k, v in raw.items():
        if k in _POWER_FIELDS:
            values[k] = parse_power(v, f"params.{k}")
        elif v is None:
            values[k] = None
        elif isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"params.{k}", f"expected a number, got {v!r}")
        else:
            values[k] = float(v)
    try:
        return reference_defaults(**values)
    except ParameterError as exc:
        raise ConfigError(f"params.{exc.field}", str(exc)) from None


def config_from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config", "top level must be a JSON object")
    known = {"params", "mode", "topology", "mc", "pdf", "solve", "sweep", "output"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown section")
    params = _build_params(doc.get("params") or {})
    mode = _enum(AttackMode, doc.get("mode", "eavesdrop"), "mode")
    topology = _enum(Topology, doc.get("topology", "attacker-origin"), "topology")
    try:
        mc_cfg = mc.McConfig(**(doc.get("mc") or {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError("mc", str(exc)) from None
    sweep = None
    if doc.get("sweep"):
        try:
            sweep = SweepSpec(**doc["sweep"])
        except TypeError as exc:
            raise ConfigError("sweep", str(exc)) from None
    out = doc.get("output") or {}
    return RunConfig(
        params=params,
        mode=mode,
        topology=topology,
        mc=mc_cfg,
        pdf=dict(doc.get("pdf") or {}),
        solve=dict(doc.get("solve") or {}),
        sweep=sweep,
        out=out.get("path"),
        fmt=out.get("format", "csv"),
    )


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from None


def _apply_overrides(doc: dict, args) -> dict:
    doc = json.loads(json.dumps(doc))  # deep copy
    if args.mode:
        doc["mode"] = args.mode
    if args.topology:
        doc["topology"] = args.topology
    mc_sec = doc.setdefault("mc", {})
    if args.seed is not None:
        mc_sec["seed"] = args.seed
    if args.trials is not None:
        mc_sec["trials"] = args.trials
    if args.workers is not None:
        mc_sec["workers"] = args.workers
    out = doc.setdefault("output", {})
    if args.out:
        out["path"] = args.out
    if args.format:
        out["format"] = args.format
    params = doc.setdefault("params", {})
    for item in args.param or []:
        if "=" not in item:
            raise ConfigError("--param", f"expected name=value, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        try:
            params[k] = float(v)
        except ValueError:
            params[k] = None if v.lower() == "none" else v
    if args.sweep:
        sw = SweepSpec.parse(args.sweep, exact=args.exact)
        doc["sweep"] = dataclasses.asdict(sw)
    elif args.exact and doc.get("sweep"):
        doc["sweep"]["exact"] = True
    return doc


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if v is None:
        return ""
    return str(v)


def render(header: list, rows: list, fmt: str) -> str:
    if fmt == "json":
        recs = [{h: _json_value(v) for h, v in zip(header, row)} for row in rows]
        return json.dumps(recs, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        return float(f"{float(v):.12g}") if math.isfinite(v) else str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _emit(text: str, cfg: RunConfig, stdout):
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

DERIVE_HEADER = ["kappa_su", "kappa_sa", "kappa_au", "lambda_e", "lambda_j", "alpha", "f_d", "d_o", "d_sat", "r_sat"]
PDF_HEADER = ["x", "analytic"]
PDF_MC_HEADER = ["x", "analytic", "empirical"]
SOP_HEADER = ["method", "value", "err", "clamped"]
SOLVE_HEADER = ["quantity", "value", "residual", "feasible", "status"]
SIMULATE_HEADER = ["mode", "topology", "estimate", "std_err", "seed", "trials"]


def cmd_derive(cfg: RunConfig):
    d = derive(cfg.params)
    p = cfg.params
    row = [
        d.kappa_su,
        d.kappa_sa,
        d.kappa_au,
        d.lambda_e,
        d.lambda_j,
        d.alpha,
        d.f_d,
        design.threshold_d_o(p),
        design.threshold_d_sat(p),
        design.threshold_r_sat(p),
    ]
    return DERIVE_HEADER, [row]


def _pdf_analytic(cfg: RunConfig, quantity: str):
    if quantity == "ratio-topology":
        return mc.analytic_density(quantity, cfg.params, cfg.topology, cfg.mode)
    return mc.analytic_density(quantity, cfg.params)


def cmd_pdf(cfg: RunConfig):
    opts = cfg.pdf
    quantity = opts.get("quantity", "log-ratio-eav" if cfg.mode is AttackMode.EAVESDROP else "log1p-ratio-jam")
    if quantity not in mc.QUANTITIES:
        raise ConfigError("pdf.quantity", f"expected one of {mc.QUANTITIES}, got {quantity!r}")
    density = _pdf_analytic(cfg, quantity)
    if opts.get("empirical"):
        rep = mc.mc_pdf(quantity, cfg.params, cfg.mc, cfg.topology, cfg.mode)
        xs = rep.estimate["centers"]
        ana = np.asarray(density(xs), dtype=float)
        return PDF_MC_HEADER, [[x, a, e] for x, a, e in zip(xs, ana, rep.estimate["density"])]
    start, stop = float(opts.get("start", -4.0)), float(opts.get("stop", 8.0))
    num = int(opts.get("num", 121))
    if not (start < stop and num >= 2):
        raise ConfigError("pdf", f"need start < stop and num >= 2, got {start}, {stop}, {num}")
    xs = np.linspace(start, stop, num)
    return PDF_HEADER, [[x, float(density(float(x)))] for x in xs]


def cmd_sop(cfg: RunConfig):
    rows = []
    ex = sop_exact(cfg.params, cfg.mode)
    rows.append([EXACT_DISTANCE, ex.value, ex.err, ex.clamped])
    asym = sop_asym(cfg.params, cfg.mode)
    rows.append([ASYMPTOTIC, asym.value, asym.err, asym.clamped])
    return SOP_HEADER, rows


def cmd_solve(cfg: RunConfig):
    opts = cfg.solve
    what = opts.get("target", "d_th")
    solvers = {"d_th": design.solve_d_th, "ps_th": design.solve_ps_th, "pj_th": design.solve_pj_th}
    if what not in solvers:
        raise ConfigError("solve.target", f"expected one of {sorted(solvers)}, got {what!r}")
    try:
        bounds = opts.get("bounds")
        target = design.DesignTarget(float(opts.get("p_o_th", 0.1)), cfg.mode, tuple(bounds) if bounds else None)
        res = solvers[what](cfg.params, target, opts.get("method", "asymptotic"))
    except ValueError as exc:
        raise ConfigError("solve", str(exc)) from None
    rows = [[what, res.value, res.residual, res.feasible, res.status]]
    if not res.feasible:
        raise InfeasibleError(render(SOLVE_HEADER, rows, cfg.fmt))
    return SOLVE_HEADER, rows


def cmd_sweep(cfg: RunConfig):
    sw = cfg.sweep
    if sw is None:
        raise ConfigError("sweep", "a sweep spec is required (--sweep var=start:stop:step)")
    header = [sw.var, "sop_asymptotic"] + (["sop_exact"] if sw.exact else [])
    rows = []
    for v in sw.values():
        try:
            p = cfg.params.replace(**{sw.var: float(v)})
        except ParameterError as exc:
            raise ConfigError(f"sweep.{exc.field}", str(exc)) from None
        row = [float(v), sop_asym(p, cfg.mode).value]
        if sw.exact:
            row.append(sop_exact(p, cfg.mode).value)
        rows.append(row)
    return header, rows


def cmd_simulate(cfg: RunConfig):
    rep = mc.mc_sop(cfg.params, cfg.mode, cfg.mc, cfg.topology)
    return SIMULATE_HEADER, [[cfg.mode.value, cfg.topology.value, rep.estimate, rep.std_err, rep.seed, rep.trials]]


_HANDLERS = {
    "derive": cmd_derive,
    "pdf": cmd_pdf,
    "sop": cmd_sop,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plsec", description="Secrecy outage analysis toolkit")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON configuration file")
    ap.add_argument("--mode", choices=[m.value for m in AttackMode])
    ap.add_argument("--topology", choices=[t.value for t in Topology])
    ap.add_argument("--seed", type=int)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out", help="output file (default stdout)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--sweep", help="var=start:stop:step")
    ap.add_argument("--exact", action="store_true", help="add exact SOP column to sweeps")
    ap.add_argument("--mc", action="store_true", help="add a Monte Carlo row to sop output")
    ap.add_argument("--param", action="append", metavar="NAME=VALUE", help="override a system parameter")
    ap.add_argument("--emit-config", action="store_true", help="derive: print the resolved config as JSON")
    return ap


def _error(kind: str, message: str, stderr, field_name: str | None = None, **extra) -> None:
    rec = {"error": kind, "message": message}
    if field_name:
        rec["field"] = field_name
    rec.update(extra)
    stderr.write(json.dumps(rec) + "\n")


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        doc = _apply_overrides(load_config(args.config), args)
        cfg = config_from_dict(doc)
        if args.command == "derive" and args.emit_config:
            _emit(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", cfg, stdout)
            return EXIT_OK
        header, rows = _HANDLERS[args.command](cfg)
        if args.command == "sop" and args.mc:
            rep = mc.mc_sop(cfg.params, cfg.mode, cfg.mc, cfg.topology)
            rows.append([MONTE_CARLO, rep.estimate, rep.std_err, False])
        _emit(render(header, rows, cfg.fmt), cfg, stdout)
        return EXIT_OK
    except ConfigError as exc:
        _error("config", str(exc), stderr, exc.field)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        _error("infeasible", "target SOP cannot be met within the bounds", stderr, result=str(exc))
        return EXIT_INFEASIBLE
    except ConvergenceError as exc:
        _error("non-convergence", str(exc), stderr, partial=exc.partial, estimate_error=exc.error)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
