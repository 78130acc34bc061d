"""Adaptive Gauss-Kronrod integration on finite and infinite intervals.

The engine works in three stages: optional change of variables (logarithmic
scale, removal of an algebraic endpoint singularity, compactification of
infinite endpoints), an initial panel set split at caller-supplied
breakpoints, and priority-driven bisection of the panels with the largest
G7/K15 error estimates.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Sequence

import numpy as np

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12
DEFAULT_MAX_EVALS = 1_000_000

# Kronrod nodes on [0, 1]; odd positions (1, 3, 5, 7) are the Gauss nodes.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
WEIGHTS_G = np.zeros(15)
WEIGHTS_G[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG, _WG[-2::-1]])


@dataclass(frozen=True)
class SupportSpec:
    """Interval ``[lower, upper]``; either end may be infinite."""

    lower: float
    upper: float

    def __post_init__(self):
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValueError("support endpoints must not be NaN")
        if not self.lower < self.upper:
            raise ValueError(f"empty support: [{self.lower}, {self.upper}]")

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    def clip(self, lo: float, hi: float) -> SupportSpec | None:
        lo, hi = max(lo, self.lower), min(hi, self.upper)
        return SupportSpec(lo, hi) if lo < hi else None


@dataclass(frozen=True)
class Singularity:
    """Integrable ``|x - endpoint|**(-exponent)`` behaviour, 0 < exponent < 1."""

    endpoint: str  # "lower" or "upper"
    exponent: float

    def __post_init__(self):
        if self.endpoint not in ("lower", "upper"):
            raise ValueError("singularity endpoint must be 'lower' or 'upper'")
        if not 0.0 < self.exponent < 1.0:
            raise ValueError("singularity exponent must lie in (0, 1)")


@dataclass(frozen=True)
class IntegrandSpec:
    """What to integrate.

    ``f`` must accept and return numpy arrays. ``breakpoints`` are interior
    points where ``f`` is not smooth (kinks, jumps, narrow peaks); the initial
    panels are split there. ``log_scale`` integrates in ``y = log x`` and is
    meant for slowly decaying tails on a positive interval.
    """

    f: Callable[[np.ndarray], np.ndarray]
    interval: SupportSpec
    singularity: Singularity | None = None
    breakpoints: tuple[float, ...] = ()
    log_scale: bool = False

    def __post_init__(self):
        if self.singularity is not None:
            end = getattr(self.interval, self.singularity.endpoint)
            if not math.isfinite(end):
                raise ValueError("singular endpoint must be finite")
            if self.log_scale:
                raise ValueError("log_scale cannot be combined with a singularity")
        if self.log_scale and self.interval.lower < 0:
            raise ValueError("log_scale requires a nonnegative interval")


@dataclass
class IntegrationResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool

    def __float__(self):
        return float(self.value)


@dataclass(order=True)
class _Panel:
    neg_err: float
    a: float = field(compare=False)
    b: float = field(compare=False)
    value: float = field(compare=False)
    err: float = field(compare=False)
    resabs: float = field(compare=False)


def _compactify(lo: float, hi: float):
    """Map an interval with infinite ends to a finite one.

    Returns ``(t_lo, t_hi, x_of_t, jac, t_of_x)``.
    """
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi, (lambda t: t), (lambda t: np.ones_like(t)), (lambda x: x)

    def jac(t):
        return (1.0 + t * t) / (1.0 - t * t) ** 2

    def inv(x):
        # solves t / (1 - t^2) = x for t in (-1, 1)
        return 2.0 * x / (1.0 + math.sqrt(1.0 + 4.0 * x * x))

    if not math.isfinite(lo) and not math.isfinite(hi):
        return -1.0, 1.0, (lambda t: t / (1.0 - t * t)), jac, inv
    if math.isfinite(lo):
        return (0.0, 1.0, (lambda t: lo + t / (1.0 - t * t)), jac,
                (lambda x: inv(x - lo)))
    return (0.0, 1.0, (lambda t: hi - t / (1.0 - t * t)), jac,
            (lambda x: inv(hi - x)))


def _transformed(spec: IntegrandSpec):
    """Reduce ``spec`` to a smooth integrand on a finite interval.

    Returns ``(g, t_lo, t_hi, t_breaks)`` with ``int f dx = int g dt``.
    """
    f = spec.f
    lo, hi = spec.interval.lower, spec.interval.upper
    breaks = [b for b in spec.breakpoints if lo < b < hi]

    if spec.log_scale:
        f0 = f

        def f(y, f0=f0):
            x = np.exp(y)
            return f0(x) * x

        lo = math.log(lo) if lo > 0 else -math.inf
        hi = math.log(hi) if math.isfinite(hi) else math.inf
        breaks = [math.log(b) for b in breaks]

    if spec.singularity is not None:
        p = 1.0 / (1.0 - spec.singularity.exponent)
        f0 = f
        span = hi - lo
        if spec.singularity.endpoint == "lower":
            a = lo

            def f(s, f0=f0):
                return f0(a + s**p) * p * s ** (p - 1.0)

            breaks = [(b - a) ** (1.0 / p) for b in breaks]
        else:
            b_ = hi

            def f(s, f0=f0):
                return f0(b_ - s**p) * p * s ** (p - 1.0)

            breaks = sorted((b_ - b) ** (1.0 / p) for b in breaks)
        lo, hi = 0.0, span ** (1.0 / p) if math.isfinite(span) else math.inf

    t_lo, t_hi, x_of_t, jac, t_of_x = _compactify(lo, hi)
    t_breaks = sorted({t_of_x(b) for b in breaks})
    t_breaks = [t for t in t_breaks if t_lo < t < t_hi]

    def g(t):
        with np.errstate(all="ignore"):
            x = x_of_t(t)
            j = jac(t)
            ok = np.isfinite(x) & np.isfinite(j)
            out = np.zeros_like(t)
            if ok.any():
                out[ok] = np.asarray(f(x[ok]), dtype=float) * j[ok]
        return out

    return g, t_lo, t_hi, t_breaks


def _gk15(g, a: np.ndarray, b: np.ndarray):
    """Vectorized G7/K15 over panels ``[a_i, b_i]``."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(g(x.ravel()), dtype=float).reshape(x.shape)
    bad = ~np.isfinite(fx)
    if bad.any():
        fx = np.where(bad, np.nan, fx)
    k = half * (fx @ WEIGHTS_K)
    gauss = half * (fx @ WEIGHTS_G)
    resabs = np.abs(half) * (np.abs(fx) @ WEIGHTS_K)
    err = np.abs(k - gauss)
    return k, err, resabs


def integrate(
    spec: IntegrandSpec,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> IntegrationResult:
    """Integrate ``spec.f`` over ``spec.interval``.

    Stops once the summed panel error estimates fall below
    ``max(abs_tol, rel_tol * |value|)`` (or the floating-point roundoff
    floor). If the evaluation budget runs out first, or a non-finite value
    shows up, the best estimate is returned with ``converged=False``.
    """
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    g, t_lo, t_hi, t_breaks = _transformed(spec)
    edges = np.array([t_lo, *t_breaks, t_hi], dtype=float)
    a, b = edges[:-1], edges[1:]
    vals, errs, resabs = _gk15(g, a, b)
    evals = 15 * len(a)
    heap = [_Panel(-e, ai, bi, v, e, r)
            for ai, bi, v, e, r in zip(a, b, vals, errs, resabs)]
    heapq.heapify(heap)
    total = math.fsum(vals)
    err_total = math.fsum(errs)
    abs_total = math.fsum(resabs)
    frozen: list[_Panel] = []
    eps = np.finfo(float).eps

    def target():
        return max(abs_tol, rel_tol * abs(total), 50 * eps * abs_total)

    finite = math.isfinite(total) and math.isfinite(err_total)
    while finite and heap and err_total > target() and evals < max_evals:
        worst = heap[0].err
        batch = []
        while heap and len(batch) < 64 and heap[0].err >= 0.25 * worst:
            p = heapq.heappop(heap)
            if p.b - p.a <= 8 * eps * max(abs(p.a), abs(p.b), 1e-300):
                frozen.append(p)  # cannot be bisected further
                continue
            batch.append(p)
        if not batch:
            break
        pa = np.array([p.a for p in batch])
        pb = np.array([p.b for p in batch])
        pm = 0.5 * (pa + pb)
        na = np.concatenate([pa, pm])
        nb = np.concatenate([pm, pb])
        nv, ne, nr = _gk15(g, na, nb)
        evals += 15 * len(na)
        total += math.fsum(nv) - math.fsum(p.value for p in batch)
        err_total += math.fsum(ne) - math.fsum(p.err for p in batch)
        abs_total += math.fsum(nr) - math.fsum(p.resabs for p in batch)
        for ai, bi, v, e, r in zip(na, nb, nv, ne, nr):
            heapq.heappush(heap, _Panel(-e, ai, bi, v, e, r))
        finite = math.isfinite(total) and math.isfinite(err_total)

    panels = heap + frozen
    total = math.fsum(p.value for p in panels)
    err_total = math.fsum(p.err for p in panels)
    converged = (math.isfinite(total) and math.isfinite(err_total)
                 and err_total <= target())
    return IntegrationResult(total, err_total, evals, converged)


def _window_pieces(interval: SupportSpec, windows: Sequence[float]):
    prev = None
    for w in windows:
        if w <= 0:
            raise ValueError("windows must be positive")
        if prev is None:
            pieces = [interval.clip(-w, w)]
        else:
            if w <= prev:
                raise ValueError("windows must be increasing")
            pieces = [interval.clip(-w, -prev), interval.clip(prev, w)]
        prev = w
        yield [p for p in pieces if p is not None]


def iter_window_sweep(
    spec: IntegrandSpec,
    windows: Sequence[float] | Iterator[float],
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> Iterator[IntegrationResult]:
    """Lazily yield the integral over ``interval ∩ [-W, W]`` for each window.

    Each step only integrates the two new slabs, so stopping early is cheap.
    """
    value = err = 0.0
    evals = 0
    ok = True
    for pieces in _window_pieces(spec.interval, windows):
        for piece in pieces:
            sing = spec.singularity
            if sing is not None and (getattr(piece, sing.endpoint)
                                     != getattr(spec.interval, sing.endpoint)):
                sing = None
            r = integrate(replace(spec, interval=piece, singularity=sing),
                          rel_tol, abs_tol, max_evals)
            value += r.value
            err += r.error_estimate
            evals += r.evaluations
            ok = ok and r.converged
        yield IntegrationResult(value, err, max(evals, 1), ok)


def integrate_window_sweep(
    spec: IntegrandSpec,
    windows: Sequence[float],
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
) -> list[IntegrationResult]:
    """Integral restricted to ``interval ∩ [-W, W]`` for every ``W`` in ``windows``.

    A divergent integral shows up as a sequence that keeps growing; the
    caller decides what counts as stabilized.
    """
    return list(iter_window_sweep(spec, windows, rel_tol, abs_tol))
