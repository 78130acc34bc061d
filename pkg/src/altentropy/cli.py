"""Command-line front end.

Subcommands: ``compute``, ``discretize``, ``converge``, ``thresholds`` and
``curves``. Tables go to stdout or ``--out`` as CSV (9 significant digits)
or JSON (one array per column). Exit status is 0 on success, 2 for bad
input and 3 when a numerical quantity fails to converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic
from .discretization import (
    COMPATIBLE_FORMS,
    Functional,
    discretize,
    divergence_series,
    fit_log_rate,
    parse_partition,
    parse_schedule,
)
from .distributions import Exponential, Gaussian, Uniform, parse_distribution
from .functionals import EntropyVariant, evaluate

CROSS_CHECK_TOL = 1e-6

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

FIGURES = {
    "h1-gauss": ("gaussian", ("h1",)),
    "h123-gauss": ("gaussian", ("h1", "h2", "h3")),
    "h123-exp": ("exponential", ("h1", "h2", "h3")),
    "renyi-gauss": ("gaussian", ("r1", "r2", "r3")),
    "renyi-exp": ("exponential", ("r1", "r2", "r3")),
}


class NumericalFailure(Exception):
    """A quantity did not converge or failed its cross-check."""


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def add(self, *row):
        if len(row) != len(self.columns):
            raise AssertionError("row width does not match header")
        self.rows.append(list(row))


@dataclass(frozen=True)
class RunConfig:
    command: str
    dist: str | None = None
    variant: str | None = None
    alpha: tuple[float, ...] = ()
    partition: str | None = None
    schedule: str | None = None
    figure: str | None = None
    range: tuple[float, float, int] | None = None
    format: str = "csv"
    out: str | None = None
    include_tails: bool = False
    literal: bool = False

    def single_alpha(self) -> float | None:
        if len(self.alpha) > 1:
            raise ValueError(f"{self.command} takes a single --alpha")
        return self.alpha[0] if self.alpha else None


@dataclass(frozen=True)
class CurveRequest:
    figure: str
    lo: float
    hi: float
    steps: int
    alpha: float | None = None

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"unknown figure {self.figure!r}; choose from {', '.join(FIGURES)}")
        if not (self.lo > 0 and self.hi > self.lo):
            raise ValueError("curve range needs 0 < lo < hi")
        if self.steps < 2:
            raise ValueError("curve range needs at least 2 steps")
        if self.figure.startswith("renyi"):
            if self.alpha is None:
                raise ValueError(f"figure {self.figure} needs --alpha")
        elif self.alpha is not None:
            raise ValueError(f"figure {self.figure} does not use --alpha")


# --- formatting -----------------------------------------------------------------

def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.9g}"
    return str(v)


def to_csv(t: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(t.columns)
    for r in t.rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(f"{float(v):.9g}")
        return v if math.isfinite(v) else fmt(v)
    if isinstance(v, np.generic):
        return v.item()
    return v


def to_json(t: Table) -> str:
    cols = {c: [_json_value(r[i]) for r in t.rows] for i, c in enumerate(t.columns)}
    return json.dumps(cols, indent=2) + "\n"


def render(t: Table, form: str) -> str:
    return to_json(t) if form == "json" else to_csv(t)


# --- closed-form lookup -------------------------------------------------------------

def closed_form_for(d, variant: EntropyVariant):
    """Closed form for ``d`` under ``variant``, or None when there is none."""
    if isinstance(d, Gaussian):
        family, param = "gaussian", d.sigma
    elif isinstance(d, Exponential):
        family, param = "exponential", d.mu
    elif isinstance(d, Uniform):
        family, param = "uniform", d.b - d.a
    else:
        return None
    return analytic.closed_form(family, param, variant.family, variant.form, variant.alpha)


# --- commands -------------------------------------------------------------------------

def cmd_compute(cfg: RunConfig) -> Table:
    d = parse_distribution(_need(cfg.dist, "--dist"))
    variant = EntropyVariant.from_name(_need(cfg.variant, "--variant"), cfg.single_alpha())
    r = evaluate(d, variant)
    if not r.converged:
        raise NumericalFailure(f"{variant.name} of {d.label} did not converge")
    cf = closed_form_for(d, variant)
    cf_value = cf.value if cf is not None else None
    if cf_value is not None and not r.divergent:
        gap = abs(cf_value - r.value)
        if gap > CROSS_CHECK_TOL * max(1.0, abs(cf_value)):
            raise NumericalFailure(
                f"{variant.name} of {d.label}: quadrature {r.value:.12g} disagrees "
                f"with closed form {cf_value:.12g}")
    t = Table(["distribution", "variant", "alpha", "value", "method",
               "error_estimate", "divergent", "closed_form"])
    t.add(d.label, variant.name, variant.alpha, r.value, r.method,
          r.error_estimate, r.divergent, cf_value)
    return t


FUNCTIONAL_NAMES = (
    "raw-shannon", "raw-renyi", "raw-renyi-inner",
    *(f"compatible-{f}" for f in COMPATIBLE_FORMS),
    "compatible-renyi", "compatible-renyi-inner",
)


def make_functional(name: str, alpha: float | None, include_tails=False,
                    literal=False) -> Functional:
    if name not in FUNCTIONAL_NAMES:
        raise ValueError(f"unknown discrete functional {name!r}; choose from "
                         f"{', '.join(FUNCTIONAL_NAMES)}")
    renyi = "renyi" in name
    if renyi and alpha is None:
        raise ValueError(f"{name} needs --alpha")
    if not renyi and alpha is not None:
        raise ValueError(f"--alpha is not used by {name}")
    component = "inner" if name.endswith("-inner") else "entropy"
    if name.startswith("raw-"):
        kind = "raw-renyi" if renyi else "raw-shannon"
        return Functional(kind, alpha, include_tails=include_tails, component=component)
    if renyi:
        return Functional("compatible-renyi", alpha, component=component)
    return Functional("compatible-shannon", form=name.removeprefix("compatible-"),
                      literal=literal)


def cmd_discretize(cfg: RunConfig) -> Table:
    d = parse_distribution(_need(cfg.dist, "--dist"))
    spec = parse_partition(_need(cfg.partition, "--partition"))
    alpha = cfg.single_alpha()
    if cfg.variant:
        names = [cfg.variant]
    else:
        names = [n for n in FUNCTIONAL_NAMES if ("renyi" in n) == (alpha is not None)]
    dd = discretize(d, spec)
    t = Table(["functional", "value"])
    for n in names:
        f = make_functional(n, alpha, cfg.include_tails, cfg.literal)
        t.add(f.label, f(dd))
    return t


def cmd_converge(cfg: RunConfig) -> Table:
    d = parse_distribution(_need(cfg.dist, "--dist"))
    f = make_functional(_need(cfg.variant, "--variant"), cfg.single_alpha(),
                        cfg.include_tails, cfg.literal)
    schedule = parse_schedule(_need(cfg.schedule, "--schedule"))
    series = divergence_series(d, f, schedule)
    if series.errors:
        p, msg = next(iter(series.errors.items()))
        raise NumericalFailure(f"{f.label} at schedule point {p:g}: {msg}")
    fit = fit_log_rate(series) if len(series.points) >= 3 else None
    t = Table(["param", "value", "slope", "intercept", "rmse"])
    for p, v in series.points:
        t.add(p, v, *((fit.slope, fit.intercept, fit.rmse) if fit else (None,) * 3))
    return t


def cmd_thresholds(cfg: RunConfig) -> Table:
    th = analytic.solve_thresholds()
    t = Table(["quantity", "alpha", "value"])
    t.add("u0", None, th.u0)
    t.add("sigma0", None, th.sigma0)
    t.add("min_h1", None, th.min_value)
    for a in cfg.alpha:
        t.add("sigma_alpha", a, analytic.threshold_sigma_alpha(a))
        t.add("mu_alpha", a, analytic.threshold_mu_alpha(a))
    return t


def curve_grid(req: CurveRequest) -> np.ndarray:
    """Evenly spaced grid with the figure's critical parameters added."""
    family, _ = FIGURES[req.figure]
    grid = set(np.linspace(req.lo, req.hi, req.steps).tolist())
    if req.figure.startswith("renyi"):
        crit = [analytic.threshold_sigma_alpha(req.alpha) if family == "gaussian"
                else analytic.threshold_mu_alpha(req.alpha)]
    elif family == "gaussian":
        crit = [analytic.solve_thresholds().sigma0, 1.0 / analytic.SQRT_2PI]
    else:
        crit = [1.0]
    grid.update(c for c in crit if req.lo < c < req.hi)
    return np.array(sorted(grid))


def emit_curve(req: CurveRequest) -> dict[str, Table]:
    """One (param, value) table per variant of the figure."""
    family, variants = FIGURES[req.figure]
    grid = curve_grid(req)
    name = "sigma" if family == "gaussian" else "mu"
    out = {}
    for v in variants:
        variant = EntropyVariant.from_name(v, req.alpha)
        t = Table([name, "value"])
        for p in grid:
            t.add(float(p), analytic.closed_form(family, float(p), variant.family,
                                                 variant.form, variant.alpha).value)
        out[v] = t
    return out


def parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must be lo:hi:steps, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"range must be lo:hi:steps, got {text!r}") from None


DEFAULT_RANGES = {"gaussian": (0.05, 3.0, 200), "exponential": (0.05, 4.0, 200)}


def cmd_curves(cfg: RunConfig) -> dict[str, Table]:
    figure = _need(cfg.figure, "figure")
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")
    lo, hi, steps = cfg.range or DEFAULT_RANGES[FIGURES[figure][0]]
    return emit_curve(CurveRequest(figure, lo, hi, steps, cfg.single_alpha()))


def _need(value, flag):
    if value is None:
        raise ValueError(f"missing required {flag}")
    return value


# --- entry point -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="altentropy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", help="output file (directory for curves)")

    sp = sub.add_parser("compute", help="entropy of one distribution")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--variant", required=True, help="shannon, h1-h4, renyi, r1-r3")
    sp.add_argument("--alpha", type=float)
    common(sp)

    sp = sub.add_parser("discretize", help="discrete functionals on one partition")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--partition", required=True)
    sp.add_argument("--variant", help="one functional; default is all of them")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--include-tails", action="store_true")
    sp.add_argument("--paper-literal", dest="literal", action="store_true",
                    help="use the sum ΔF(log(ΔF/Δx) + 1) for compatible-log1p")
    common(sp)

    sp = sub.add_parser("converge", help="a functional along a refinement schedule")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--variant", required=True, help=", ".join(FUNCTIONAL_NAMES))
    sp.add_argument("--schedule", required=True)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--include-tails", action="store_true")
    sp.add_argument("--paper-literal", dest="literal", action="store_true")
    common(sp)

    sp = sub.add_parser("thresholds", help="Gaussian minimizer and Renyi zero scales")
    sp.add_argument("--alpha", type=float, nargs="*", default=[])
    common(sp)

    sp = sub.add_parser("curves", help="figure data as (param, value) tables")
    sp.add_argument("figure", choices=tuple(FIGURES))
    sp.add_argument("--range", help="lo:hi:steps")
    sp.add_argument("--alpha", type=float)
    common(sp)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    alpha = ns.alpha if isinstance(ns.alpha, list) else ([ns.alpha] if ns.alpha is not None else [])
    return RunConfig(
        command=ns.command,
        dist=getattr(ns, "dist", None),
        variant=getattr(ns, "variant", None),
        alpha=tuple(alpha),
        partition=getattr(ns, "partition", None),
        schedule=getattr(ns, "schedule", None),
        figure=getattr(ns, "figure", None),
        range=parse_range(ns.range) if getattr(ns, "range", None) else None,
        format=ns.format,
        out=ns.out,
        include_tails=getattr(ns, "include_tails", False),
        literal=getattr(ns, "literal", False),
    )


COMMANDS = {
    "compute": cmd_compute,
    "discretize": cmd_discretize,
    "converge": cmd_converge,
    "thresholds": cmd_thresholds,
}


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        if cfg.command == "curves":
            tables = cmd_curves(cfg)
            ext = "json" if cfg.format == "json" else "csv"
            if cfg.out:
                outdir = Path(cfg.out)
                outdir.mkdir(parents=True, exist_ok=True)
                for v, t in tables.items():
                    (outdir / f"{cfg.figure}-{v}.{ext}").write_text(render(t, cfg.format))
            else:
                long = Table(["variant", *next(iter(tables.values())).columns])
                for v, t in tables.items():
                    for r in t.rows:
                        long.add(v, *r)
                stdout.write(render(long, cfg.format))
            return EXIT_OK
        text = render(COMMANDS[cfg.command](cfg), cfg.format)
    except NumericalFailure as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ArithmeticError as e:
        print(f"error: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        cfg = config_from_args(ns)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
