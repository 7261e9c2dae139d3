"""Parameter sweeps and figure reproduction.

A sweep evaluates one or more quantities (coverage, rate, ase, gain) over a
grid of densities (or inter-site distances), antenna heights and thresholds,
with any of the analytic, closed-form and Monte Carlo methods.  Results are
written as CSV with one line per grid point: the axis columns, then one value
column per method (plus an error column for quadrature and a 95% CI column
for Monte Carlo).
"""
from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import analytic, mcsim, rate
from .analytic import Scenario
from .errors import DomainError, UDNError
from .geometry import Deployment, DeploymentKind, density_from_isd, isd_from_density
from .pathloss import PathLossKind, PathLossModel

log = logging.getLogger(__name__)

CONFIG_VERSION = 1
CSV_VERSION = 1
AXIS_COLUMNS = ("quantity", "deployment", "dimension", "model", "alpha", "h",
                "density", "isd", "T")
QUANTITIES = ("coverage", "rate", "ase", "gain")
METHODS = ("analytic", "closed_form", "mc")
ENV_OUTPUT_DIR = "UDN_SG_OUTPUT_DIR"
ENV_THREADS = "UDN_SG_THREADS"


@dataclass
class SweepConfig:
    scenario: Scenario
    densities: list = field(default_factory=list)
    isds: list = field(default_factory=list)
    heights: list = field(default_factory=list)
    thresholds: list = field(default_factory=list)
    quantities: tuple = ("coverage",)
    methods: tuple = ("analytic",)
    mc: mcsim.MCConfig = field(default_factory=lambda: mcsim.MCConfig(trials=10_000))
    output_dir: str = "."
    name: str = "sweep"

    def __post_init__(self):
        if self.densities and self.isds:
            raise DomainError("density and isd axes are mutually exclusive")
        if not (self.densities or self.isds or self.heights or self.thresholds):
            raise DomainError("at least one sweep axis must be non-empty")
        for q in self.quantities:
            if q not in QUANTITIES:
                raise DomainError(f"unknown quantity {q!r}")
        for m in self.methods:
            if m not in METHODS:
                raise DomainError(f"unknown method {m!r}")
        if "coverage" in self.quantities and not self.thresholds:
            raise DomainError("coverage sweeps need a T axis")

    def density_axis(self) -> list:
        d = self.scenario.dimension
        if self.isds:
            return [density_from_isd(float(v), d) for v in self.isds]
        return [float(v) for v in self.densities] or [self.scenario.density]

    def height_axis(self) -> list:
        return [float(v) for v in self.heights] or [self.scenario.model.h]

    @classmethod
    def from_dict(cls, data: dict, base_dir: Optional[str] = None) -> "SweepConfig":
        version = int(data.get("version", CONFIG_VERSION))
        if version != CONFIG_VERSION:
            raise DomainError(f"unsupported config version {version}")
        sc = data["scenario"]
        dep = sc["deployment"]
        dep = dict(dep)
        dep.setdefault("density", 1.0)
        scenario = Scenario.from_dict({**sc, "deployment": dep})
        axes = data.get("axes", {})
        mc = data.get("mc", {})
        out = data.get("output_dir", ".")
        if base_dir and not os.path.isabs(out):
            out = os.path.join(base_dir, out)
        return cls(
            scenario=scenario,
            densities=list(axes.get("density", [])),
            isds=list(axes.get("isd", [])),
            heights=list(axes.get("h", [])),
            thresholds=list(axes.get("T", [])),
            quantities=tuple(data.get("quantities", ["coverage"])),
            methods=tuple(data.get("methods", ["analytic"])),
            mc=mcsim.MCConfig(**mc) if mc else mcsim.MCConfig(trials=10_000),
            output_dir=out,
            name=data.get("name", "sweep"),
        )

    @classmethod
    def load(cls, path) -> "SweepConfig":
        with open(path) as fh:
            data = json.load(fh)
        return cls.from_dict(data)


# ---------------------------------------------------------------- evaluation


def _base_row(quantity: str, sc: Scenario, T, method: str, deployment: Optional[str] = None):
    model = sc.model
    d = sc.dimension
    return {
        "quantity": quantity,
        "deployment": deployment or sc.deployment.kind.value,
        "dimension": d,
        "model": model.kind.value,
        "alpha": model.alpha,
        "h": model.h,
        "density": sc.density,
        "isd": isd_from_density(sc.density, d),
        "T": T,
        "method": method,
        "value": None,
        "error": None,
        "ci95": None,
    }


def _analytic_method(method: str) -> str:
    return "closed_form" if method == "closed_form" else "quadrature"


@lru_cache(maxsize=None)
def _invariant_rate(kind: str, d: int, model_kind: str, alpha: float, c: float,
                    gamma0: float, method: str) -> tuple[float, float]:
    # noise-less rates depend on density and h only through c = h density^(1/d)
    sc = Scenario(Deployment(kind, d, 1.0), PathLossModel(model_kind, c, alpha), 1.0, 0.0, gamma0)
    res = rate.ergodic_rate(sc, method)
    return res.value, res.error_estimate


def _rate(sc: Scenario, method: str) -> tuple[float, float]:
    if sc.noise != 0.0:
        res = rate.ergodic_rate(sc, method)
        return res.value, res.error_estimate
    d = sc.dimension
    c = float("%.14g" % (sc.model.h * sc.density ** (1.0 / d)))
    return _invariant_rate(sc.deployment.kind.value, d, sc.model.kind.value,
                           sc.model.alpha, c, sc.gamma0, method)


def evaluate_task(task) -> list:
    """Evaluate one (quantity, scenario, method, thresholds, mc, stream) task."""
    quantity, sc, method, Ts, mc, stream = task
    rows = []
    if method == "mc":
        if quantity == "gain":
            reg = sc.with_deployment(Deployment.regular_for(sc.dimension, sc.density))
            ppp = sc.with_deployment(Deployment(DeploymentKind.PPP, sc.dimension, sc.density))
            a = mcsim.rate_from_samples(mcsim.simulate_sinr(reg, mc, 2 * stream), sc.gamma0)
            b = mcsim.rate_from_samples(mcsim.simulate_sinr(ppp, mc, 2 * stream + 1), sc.gamma0)
            row = _base_row(quantity, reg, None, method, f"{reg.deployment.kind.value}/ppp")
            g = a.mean / b.mean
            row["value"] = g
            row["ci95"] = abs(g) * math.hypot(a.ci95_halfwidth / a.mean, b.ci95_halfwidth / b.mean)
            return [row]
        samples = mcsim.simulate_sinr(sc, mc, 2 * stream)
        if quantity == "coverage":
            for T in Ts:
                est = mcsim.coverage_from_samples(samples, T)
                row = _base_row(quantity, sc, T, method)
                row["value"], row["ci95"] = est.mean, est.ci95_halfwidth
                rows.append(row)
        else:
            est = mcsim.rate_from_samples(samples, sc.gamma0)
            scale = sc.density if quantity == "ase" else 1.0
            row = _base_row(quantity, sc, None, method)
            row["value"], row["ci95"] = est.mean * scale, est.ci95_halfwidth * scale
            rows.append(row)
        return rows
    amethod = _analytic_method(method)
    if quantity == "coverage":
        for T in Ts:
            row = _base_row(quantity, sc, T, method)
            if method == "closed_form":
                row["value"] = analytic.coverage_closed_form(sc, T)
            else:
                row["value"] = analytic.coverage_probability(sc, T)
            rows.append(row)
        return rows
    if quantity == "gain":
        reg = sc.with_deployment(Deployment.regular_for(sc.dimension, sc.density))
        ppp = sc.with_deployment(Deployment(DeploymentKind.PPP, sc.dimension, sc.density))
        (a, ea), (b, eb) = _rate(reg, amethod), _rate(ppp, amethod)
        row = _base_row(quantity, reg, None, method, f"{reg.deployment.kind.value}/ppp")
        row["value"] = a / b
        row["error"] = abs(a / b) * (ea / a + eb / b)
        return [row]
    value, err = _rate(sc, amethod)
    scale = sc.density if quantity == "ase" else 1.0
    row = _base_row(quantity, sc, None, method)
    row["value"], row["error"] = value * scale, err * scale
    return [row]


def _closed_form_possible(quantity: str, sc: Scenario) -> bool:
    if quantity == "coverage":
        return analytic.closed_form_available(sc)
    if quantity == "gain":
        d = sc.dimension
        pair = (sc.with_deployment(Deployment.regular_for(d, sc.density)),
                sc.with_deployment(Deployment(DeploymentKind.PPP, d, sc.density)))
        return all(_closed_form_possible("rate", x) for x in pair)
    return analytic.closed_form_available(sc) or rate.rate_closed_form_available(sc)


def build_tasks(config: SweepConfig) -> list:
    """Grid points in a fixed order; grid points without a closed form skip that method."""
    tasks = []
    stream = 0
    Ts = tuple(float(t) for t in config.thresholds)
    for quantity in config.quantities:
        for density in config.density_axis():
            for h in config.height_axis():
                model = config.scenario.model.with_h(h)
                sc = config.scenario.with_density(density).with_model(model)
                for method in config.methods:
                    if method == "closed_form" and not _closed_form_possible(quantity, sc):
                        continue
                    tasks.append((quantity, sc, method, Ts, config.mc, stream))
                    stream += 1
    return tasks


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _sort_key(key):
    return tuple((0, v) if isinstance(v, str) else (1, -math.inf if v is None else float(v))
                 for v in key)


def value_columns(methods: Sequence[str]) -> list:
    cols = []
    for m in METHODS:
        if m in methods:
            cols += [m, f"{m}_ci95"] if m == "mc" else [m, f"{m}_error"]
    return cols


def pivot(rows: Sequence[dict], methods: Sequence[str]) -> tuple[list, list]:
    """Wide table: one line per grid point, one value column per method."""
    header = list(AXIS_COLUMNS) + value_columns(methods)
    table = {}
    for r in rows:
        key = tuple(r[c] for c in AXIS_COLUMNS)
        line = table.setdefault(key, dict(zip(AXIS_COLUMNS, key)))
        m = r["method"]
        line[m] = r["value"]
        line[f"{m}_ci95" if m == "mc" else f"{m}_error"] = r["ci95"] if m == "mc" else r["error"]
    lines = [table[k] for k in sorted(table, key=_sort_key)]
    return header, lines


def write_rows(rows: Sequence[dict], path, methods: Sequence[str]) -> None:
    header, lines = pivot(rows, methods)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for line in lines:
            w.writerow([_fmt(line.get(c)) for c in header])


def read_rows(path) -> list:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            parsed = {}
            for k, v in row.items():
                if k in ("quantity", "deployment", "model"):
                    parsed[k] = v
                elif v == "":
                    parsed[k] = None
                else:
                    parsed[k] = float(v)
            out.append(parsed)
    return out


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(ENV_THREADS, "1")))
    except ValueError:
        return 1


def run_tasks(tasks: list, threads: int = 1) -> tuple[list, list]:
    """Run tasks, returning (rows, failures); failures keep their diagnostics."""
    rows, failures = [], []

    def collect(task, fut_result):
        try:
            rows.extend(fut_result())
        except UDNError as exc:
            failures.append((task, exc))

    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(threads) as pool:
            futures = [(t, pool.submit(evaluate_task, t)) for t in tasks]
            for task, fut in futures:
                collect(task, fut.result)
    else:
        for task in tasks:
            collect(task, lambda t=task: evaluate_task(t))
    return rows, failures


def run_sweep(config: SweepConfig, threads: Optional[int] = None) -> list:
    """Evaluate the sweep and write one CSV per quantity; returns the written paths.

    Rows that were computed are flushed even when other grid points fail; the
    failures are then raised as a single error.
    """
    threads = threads or default_threads()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows, failures = run_tasks(build_tasks(config), threads)
    paths = []
    for quantity in config.quantities:
        path = out_dir / f"{config.name}_{quantity}.csv"
        write_rows([r for r in rows if r["quantity"] == quantity], path, config.methods)
        paths.append(path)
    if failures:
        task, exc = failures[0]
        raise SweepError(f"{len(failures)} grid point(s) failed; first: "
                         f"{task[0]} {task[1]} ({type(exc).__name__}: {exc})")
    return paths


class SweepError(UDNError):
    """One or more sweep grid points failed."""


# ---------------------------------------------------------------- figures

# Default grids, spanning inter-site distances from far below to far above
# the antenna height.
_ISD_1D = [float(v) for v in np.logspace(-3, 2, 11)]
_ISD_2D = [float(v) for v in np.logspace(-1.5, 1.5, 5)]


def _rate_sweep(name, kind, d, alpha, heights, densities, quantity, out):
    return SweepConfig(
        scenario=Scenario(Deployment(kind, d, 1.0), PathLossModel(PathLossKind.L1, 0.0, alpha)),
        densities=densities, heights=heights, quantities=(quantity,),
        methods=("analytic",), output_dir=out, name=name)


def figure_configs(name: str, out: str) -> list:
    """The sweeps behind a figure."""
    if name == "fig2":
        lam = [float(v) for v in np.logspace(-2, 3, 11)]
        return [_rate_sweep(f"fig2_{k}", k, 1, 2.0, [0.0, 0.5, 1.0], lam, "rate", out)
                for k in ("ppp", "line")]
    if name == "fig3":
        lam = [float(v) for v in np.logspace(-2, 2, 5)]
        return [_rate_sweep(f"fig3_{k}", k, 2, 4.0, [0.0, 0.5, 1.0], lam, "rate", out)
                for k in ("ppp", "hex")]
    if name in ("fig4", "fig5"):
        d, alpha, isds = (1, 2.0, _ISD_1D) if name == "fig4" else (2, 4.0, _ISD_2D)
        kind = "line" if d == 1 else "hex"
        cfgs = []
        for model in (PathLossModel(PathLossKind.L0, 0.0, alpha),
                      PathLossModel(PathLossKind.L1, 1.0, alpha)):
            cfgs.append(SweepConfig(
                scenario=Scenario(Deployment(kind, d, 1.0), model),
                isds=isds, quantities=("gain",), methods=("analytic",),
                output_dir=out, name=f"{name}_{model.kind.value}"))
        return cfgs
    if name == "fig6":
        lam = [float(v) for v in np.logspace(-1, 3, 9)]
        return [_rate_sweep(f"fig6_{k}", k, 1, 2.0, [1.0], lam, "ase", out)
                for k in ("ppp", "line")]
    if name == "fig7":
        lam = [float(v) for v in np.logspace(-1, 3, 5)]
        return [_rate_sweep(f"fig7_{k}", k, 2, 4.0, [1.0], lam, "ase", out)
                for k in ("ppp", "hex")]
    raise DomainError(f"unknown figure {name!r}; expected one of fig2..fig7")


FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")

_FIG_META = {
    "fig2": ("density", "rate", "Ergodic rate vs density, 1D, alpha = 2"),
    "fig3": ("density", "rate", "Ergodic rate vs density, 2D, alpha = 4"),
    "fig4": ("isd", "gain", "Deployment gain vs ISD, 1D, alpha = 2"),
    "fig5": ("isd", "gain", "Deployment gain vs ISD, 2D, alpha = 4"),
    "fig6": ("density", "ase", "ASE vs density, 1D, alpha = 2, h = 1"),
    "fig7": ("density", "ase", "ASE vs density, 2D, alpha = 4, h = 1"),
}


def reference_lines(name: str) -> list:
    """(label, value) asymptotes drawn alongside the ASE figures."""
    if name == "fig6":
        return [("limit", rate.ase_limit_1d(2.0, 1.0)),
                ("lower_bound", rate.ase_lower_bound(1, 2.0, 1.0))]
    if name == "fig7":
        lo, hi = rate.ase_bounds_2d_alpha4(1.0)
        return [("lower_bound", lo), ("upper_bound", hi)]
    return []


def _series(lines):
    groups = {}
    for r in lines:
        key = (r["deployment"], r["model"], r["h"])
        groups.setdefault(key, []).append(r)
    for key in groups:
        groups[key].sort(key=lambda r: r["density"])
    return dict(sorted(groups.items(), key=lambda kv: tuple(str(k) for k in kv[0])))


def write_gnuplot(name: str, lines: list, out_dir: Path) -> tuple[Path, Path]:
    xcol, ycol, title = _FIG_META[name]
    series = _series(lines)
    dat = out_dir / f"{name}.dat"
    gp = out_dir / f"{name}.gp"
    with open(dat, "w") as fh:
        for (dep, model, h), rs in series.items():
            fh.write(f"# {dep} {model} h={_fmt(h)}\n")
            fh.write(f"# {xcol} {ycol}\n")
            for r in rs:
                fh.write(f"{_fmt(r[xcol])} {_fmt(r['analytic'])}\n")
            fh.write("\n\n")
    script = [
        f"set title '{title}'",
        "set logscale x",
        f"set xlabel '{xcol}'",
        f"set ylabel '{ycol}'",
        "set key outside",
    ]
    plots = []
    for i, (dep, model, h) in enumerate(series):
        plots.append(f"'{dat.name}' index {i} using 1:2 with linespoints "
                     f"title '{dep} {model} h={_fmt(h)}'")
    for label, v in reference_lines(name):
        plots.append(f"{_fmt(v)} with lines dashtype 2 title '{label}'")
    script.append("plot " + ", \\\n     ".join(plots))
    gp.write_text("\n".join(script) + "\n")
    return dat, gp


def reproduce_figure(name: str, output_dir, threads: Optional[int] = None) -> list:
    """Run the sweeps of a figure; writes <name>.csv, <name>.dat and <name>.gp."""
    if name not in FIGURES:
        raise DomainError(f"unknown figure {name!r}; expected one of {', '.join(FIGURES)}")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    threads = threads or default_threads()
    tasks = []
    for cfg in figure_configs(name, str(out)):
        tasks.extend(build_tasks(cfg))
    rows, failures = run_tasks(tasks, threads)
    csv_path = out / f"{name}.csv"
    write_rows(rows, csv_path, ("analytic",))
    dat, gp = write_gnuplot(name, pivot(rows, ("analytic",))[1], out)
    if failures:
        task, exc = failures[0]
        raise SweepError(f"{len(failures)} grid point(s) failed; first: {exc}")
    return [csv_path, dat, gp]
