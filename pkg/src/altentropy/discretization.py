"""Partitions, discretized distributions and the discrete entropy functionals.

Two kinds of functional are computed on the cell masses ``ΔF_k``. The raw
ones (``-Σ ΔF log ΔF`` and the Renyi sum ``Σ ΔF^α``) diverge as the mesh
is refined. The compatible ones divide by the cell width first and
converge to the differential quantities. All cell masses are cdf
differences, never ``pdf * width``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._text import split_spec
from .distributions import DensityModel
from .functionals import check_alpha

COMPATIBLE_FORMS = ("signed", "abs", "pos", "log1p")


# --- partitions -------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Uniform cells of width ``h`` tiling ``[-N, N]``.

    ``h`` is snapped to ``2N / round(2N/h)`` so the cells tile exactly.
    """

    N: float
    h: float

    def __post_init__(self):
        if not (self.N > 0 and self.h > 0):
            raise ValueError("window partition needs N > 0 and h > 0")
        if self.h > 2 * self.N:
            raise ValueError("cell width exceeds the window")

    @property
    def cells(self) -> int:
        return max(int(round(2 * self.N / self.h)), 1)

    @property
    def param(self) -> float:
        return self.N

    def nodes(self) -> np.ndarray:
        return np.linspace(-self.N, self.N, self.cells + 1)


@dataclass(frozen=True)
class Aligned:
    """``n`` equal cells on ``[a, b]``."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("aligned partition needs a < b")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("aligned partition needs an integer n >= 1")

    @property
    def param(self) -> float:
        return self.n

    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, int(self.n) + 1)


@dataclass(frozen=True)
class Rated:
    """``C`` equal cells of width ``2N/C`` on ``[-N, N]``."""

    N: float
    C: int

    def __post_init__(self):
        if not self.N > 0:
            raise ValueError("rated partition needs N > 0")
        if int(self.C) != self.C or self.C < 1:
            raise ValueError("rated partition needs an integer C >= 1")

    @property
    def param(self) -> float:
        return self.C

    def nodes(self) -> np.ndarray:
        return np.linspace(-self.N, self.N, int(self.C) + 1)


PartitionSpec = Window | Aligned | Rated


def parse_partition(text: str) -> PartitionSpec:
    """``"aligned:a=0,b=1,n=64"``, ``"window:N=100,h=0.01"`` or ``"rated:N=10,C=4096"``."""
    name, p = split_spec(text)
    try:
        if name == "window":
            _only(p, {"N", "h"})
            return Window(float(p["N"]), float(p["h"]))
        if name == "aligned":
            _only(p, {"a", "b", "n"})
            return Aligned(float(p["a"]), float(p["b"]), int(p["n"]))
        if name == "rated":
            _only(p, {"N", "C"})
            return Rated(float(p["N"]), int(p["C"]))
    except KeyError as e:
        raise ValueError(f"{name}: missing parameter {e.args[0]}") from None
    raise ValueError(f"unknown partition {name!r}; choose window, aligned or rated")


def _only(params: dict, allowed: set):
    extra = set(params) - allowed
    if extra:
        raise ValueError(f"unknown partition parameter(s): {', '.join(sorted(extra))}")


# --- discretized distribution -----------------------------------------------

@dataclass(frozen=True)
class DiscretizedDistribution:
    nodes: np.ndarray
    increments: np.ndarray
    widths: np.ndarray
    left_tail: float
    right_tail: float

    @property
    def total(self) -> float:
        return math.fsum(self.increments) + self.left_tail + self.right_tail

    @property
    def is_uniform(self) -> bool:
        w = self.widths
        return bool(np.all(np.abs(w - w[0]) <= 1e-9 * w[0]))


def discretize(d: DensityModel, spec: PartitionSpec) -> DiscretizedDistribution:
    """Cell masses of ``d`` on the partition ``spec``.

    Left of the median the masses are cdf differences. Right of it they are
    survival-function differences, which keeps tiny tail cells accurate.
    """
    x = np.asarray(spec.nodes(), dtype=float)
    F = np.asarray(d.cdf(x), dtype=float)
    S = np.asarray(d.sf(x), dtype=float)
    use_sf = F[1:] > 0.5
    inc = np.where(use_sf, S[:-1] - S[1:], F[1:] - F[:-1])
    inc = np.maximum(inc, 0.0)
    dd = DiscretizedDistribution(x, inc, np.diff(x), float(F[0]), float(S[-1]))
    if abs(dd.total - 1.0) > 1e-10:
        raise ArithmeticError(f"cell masses of {d.label} sum to {dd.total}, not 1")
    return dd


def _xlogx(p):
    p = np.asarray(p, dtype=float)
    with np.errstate(all="ignore"):
        return np.where(p > 0, p * np.log(p), 0.0)


def raw_shannon(dd: DiscretizedDistribution, include_tails: bool = False) -> float:
    """``-Σ ΔF log ΔF``, optionally with the two tail-mass terms."""
    s = -math.fsum(_xlogx(dd.increments))
    if include_tails:
        s -= float(_xlogx(dd.left_tail) + _xlogx(dd.right_tail))
    return s


def compatible_shannon(dd: DiscretizedDistribution, form: str = "signed",
                       literal: bool = False) -> float:
    """Width-normalized discrete functionals on a uniform partition.

    ``signed``: ``-Σ ΔF log(ΔF/Δx)`` (estimates differential entropy);
    ``abs``: ``Σ ΔF |log(ΔF/Δx)|``; ``pos``: ``Σ ΔF (log(Δx/ΔF))_+``;
    ``log1p``: ``Σ ΔF log(Δx/ΔF + 1)``. Cells with ``ΔF = 0`` contribute 0.

    ``literal`` replaces the log1p form with ``Σ ΔF (log(ΔF/Δx) + 1)``.
    That sum tends to ``1 - H``, not to the log1p entropy. It is kept only so
    the two can be compared.
    """
    if form not in COMPATIBLE_FORMS:
        raise ValueError(f"unknown form {form!r}; choose from {', '.join(COMPATIBLE_FORMS)}")
    if not dd.is_uniform:
        raise ValueError("compatible functionals need equal cell widths")
    dF, dx = dd.increments, dd.widths
    nz = dF > 0
    dF, dx = dF[nz], dx[nz]
    log_ratio = np.log(dF) - np.log(dx)  # log of the cell-average density
    if form == "signed":
        terms = -dF * log_ratio
    elif form == "abs":
        terms = dF * np.abs(log_ratio)
    elif form == "pos":
        terms = dF * np.maximum(-log_ratio, 0.0)
    elif literal:
        terms = dF * (log_ratio + 1.0)
    else:
        terms = dF * (np.log1p(dF / dx) - log_ratio)
    return math.fsum(terms)


@dataclass(frozen=True)
class RenyiSums:
    entropy_value: float
    inner_sum: float


def raw_renyi(dd: DiscretizedDistribution, alpha: float,
              include_tails: bool = False) -> RenyiSums:
    """``log(Σ ΔF^α) / (1 - α)`` together with the inner sum."""
    alpha = check_alpha(alpha)
    masses = dd.increments
    if include_tails:
        masses = np.concatenate([masses, [dd.left_tail, dd.right_tail]])
    masses = masses[masses > 0]
    inner = math.fsum(masses**alpha)
    return RenyiSums(math.log(inner) / (1.0 - alpha), inner)


def compatible_renyi(dd: DiscretizedDistribution, alpha: float) -> RenyiSums:
    """``log(Σ ΔF^α Δx^{1-α}) / (1 - α)``; the inner sum estimates ``∫ p^α``."""
    alpha = check_alpha(alpha)
    nz = dd.increments > 0
    inner = math.fsum(dd.increments[nz] ** alpha * dd.widths[nz] ** (1.0 - alpha))
    return RenyiSums(math.log(inner) / (1.0 - alpha), inner)


# --- series -------------------------------------------------------------------

@dataclass(frozen=True)
class Functional:
    """One of the discrete functionals, ready to evaluate on a discretization.

    ``kind`` is ``raw-shannon``, ``raw-renyi``, ``compatible-shannon`` or
    ``compatible-renyi``. For the Renyi kinds ``component`` chooses between
    the entropy value and the inner sum.
    """

    kind: str
    alpha: float | None = None
    form: str = "signed"
    include_tails: bool = False
    literal: bool = False
    component: str = "entropy"

    def __post_init__(self):
        if self.kind not in ("raw-shannon", "raw-renyi",
                             "compatible-shannon", "compatible-renyi"):
            raise ValueError(f"unknown functional {self.kind!r}")
        if self.kind.endswith("renyi"):
            check_alpha(self.alpha if self.alpha is not None else float("nan"))
        if self.component not in ("entropy", "inner"):
            raise ValueError("component must be 'entropy' or 'inner'")

    @property
    def label(self) -> str:
        parts = [self.kind]
        if self.kind == "compatible-shannon":
            parts.append(self.form + ("-literal" if self.literal else ""))
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha:g}")
        if self.component == "inner":
            parts.append("inner")
        return ":".join(parts)

    def __call__(self, dd: DiscretizedDistribution) -> float:
        if self.kind == "raw-shannon":
            return raw_shannon(dd, self.include_tails)
        if self.kind == "compatible-shannon":
            return compatible_shannon(dd, self.form, self.literal)
        if self.kind == "raw-renyi":
            r = raw_renyi(dd, self.alpha, self.include_tails)
        else:
            r = compatible_renyi(dd, self.alpha)
        return r.inner_sum if self.component == "inner" else r.entropy_value


@dataclass
class ConvergenceSeries:
    points: list[tuple[float, float]]
    functional_label: str
    errors: dict[float, str] = field(default_factory=dict)

    def __post_init__(self):
        params = [p for p, _ in self.points]
        if any(b <= a for a, b in zip(params, params[1:])):
            raise ValueError("series parameters must be strictly increasing")

    @property
    def params(self) -> np.ndarray:
        return np.array([p for p, _ in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.points])


def schedule_params(schedule: Sequence[PartitionSpec]) -> list[float]:
    """The quantity a schedule varies: ``N`` (or ``1/h`` at fixed ``N``), ``n`` or ``C``."""
    params = [float(s.param) for s in schedule]
    if len(set(params)) == 1 and len(params) > 1 and all(isinstance(s, Window) for s in schedule):
        params = [s.cells / (2 * s.N) for s in schedule]
    return params


def divergence_series(
    d: DensityModel,
    functional: Functional | Callable[[DiscretizedDistribution], float],
    schedule: Sequence[PartitionSpec],
) -> ConvergenceSeries:
    """Evaluate ``functional`` along a refinement schedule.

    A failure at one schedule point is recorded in ``errors`` and the
    remaining points are still evaluated.
    """
    if not schedule:
        raise ValueError("schedule must not be empty")
    points, errors = [], {}
    for param, spec in zip(schedule_params(schedule), schedule):
        try:
            points.append((param, float(functional(discretize(d, spec)))))
        except (ValueError, ArithmeticError) as e:
            errors[param] = str(e)
    label = getattr(functional, "label", getattr(functional, "__name__", "functional"))
    return ConvergenceSeries(points, label, errors)


@dataclass(frozen=True)
class LogRateFit:
    slope: float
    intercept: float
    rmse: float


def fit_log_rate(series: ConvergenceSeries) -> LogRateFit:
    """Least-squares fit of ``value ≈ slope · log(param) + intercept``."""
    if len(series.points) < 3:
        raise ValueError("need at least three points to fit a rate")
    x = series.params
    if (x <= 0).any():
        raise ValueError("parameters must be positive")
    lx = np.log(x)
    if np.ptp(lx) == 0:
        raise ValueError("parameters are all equal")
    y = series.values
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    rmse = float(np.sqrt(np.mean((A @ [slope, intercept] - y) ** 2)))
    return LogRateFit(float(slope), float(intercept), rmse)


# --- named schedules ---------------------------------------------------------------

def _doubling(lo: float, hi: float) -> list[float]:
    if not 0 < lo <= hi:
        raise ValueError("schedule needs 0 < from <= to")
    out, v = [], lo
    while v <= hi * (1 + 1e-12):
        out.append(v)
        v *= 2
    return out


def parse_schedule(text: str) -> list[PartitionSpec]:
    """Named schedule generators.

    ``aligned-doubling:from=2,to=1024[,a=0,b=1]`` gives aligned cells with
    n doubling. ``window-doubling:from=4,to=64[,h=...]`` gives windows with
    N doubling and ``h = 1/N`` unless ``h`` is fixed. ``window-range:from=4,to=64``
    steps N by one, again with ``h = 1/N``.
    ``window-refine:N=100,h=0.1/0.05/0.02`` refines a fixed window.
    ``rated-exponential:N=10,from=6,to=14`` gives ``C = 2^j`` cells.
    """
    name, p = split_spec(text)
    try:
        if name == "aligned-doubling":
            _only(p, {"from", "to", "a", "b"})
            a, b = float(p.get("a", 0.0)), float(p.get("b", 1.0))
            return [Aligned(a, b, int(n)) for n in _doubling(int(p["from"]), int(p["to"]))]
        if name == "window-doubling":
            _only(p, {"from", "to", "h"})
            Ns = _doubling(float(p["from"]), float(p["to"]))
            return [Window(N, float(p["h"]) if "h" in p else 1.0 / N) for N in Ns]
        if name == "window-range":
            _only(p, {"from", "to"})
            return [Window(float(N), 1.0 / N) for N in range(int(p["from"]), int(p["to"]) + 1)]
        if name == "window-refine":
            _only(p, {"N", "h"})
            hs = sorted((float(h) for h in p["h"].split("/")), reverse=True)
            return [Window(float(p["N"]), h) for h in hs]
        if name == "rated-exponential":
            _only(p, {"N", "from", "to"})
            return [Rated(float(p["N"]), 2**j) for j in range(int(p["from"]), int(p["to"]) + 1)]
    except KeyError as e:
        raise ValueError(f"{name}: missing parameter {e.args[0]}") from None
    raise ValueError(f"unknown schedule {name!r}")
