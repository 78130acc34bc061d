"""Entropy functionals of densities and of discrete distributions.

Continuous functionals are computed by quadrature. Before a value is
reported, the integrability of the relevant integrand is probed with a
window sweep. A quantity that never stabilizes is reported as divergent
(value ``±inf``) rather than as a large number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import DensityModel, DiscreteDistribution
from .quadrature import IntegrationResult, integrate, iter_window_sweep

SHANNON_FORMS = ("classical", "abs", "pos", "log1p", "scaled")
RENYI_FORMS = ("classical", "abs", "pos", "log1p")
ALPHA_EXCLUSION = 1e-6

SWEEP_REL_CHANGE = 1e-6
SWEEP_CONFIRMATIONS = 3
SWEEP_MAX_DOUBLINGS = 64

# command-line names
VARIANT_NAMES = {
    "shannon": ("shannon", "classical"),
    "h1": ("shannon", "abs"),
    "h2": ("shannon", "pos"),
    "h3": ("shannon", "log1p"),
    "h4": ("shannon", "scaled"),
    "renyi": ("renyi", "classical"),
    "r1": ("renyi", "abs"),
    "r2": ("renyi", "pos"),
    "r3": ("renyi", "log1p"),
}


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 0 or not math.isfinite(alpha):
        raise ValueError(f"alpha must be positive and finite, got {alpha}")
    if abs(alpha - 1.0) <= ALPHA_EXCLUSION:
        raise ValueError(f"alpha={alpha} is too close to 1; use the Shannon functional")
    return alpha


@dataclass(frozen=True)
class EntropyVariant:
    family: str  # "shannon" or "renyi"
    form: str = "classical"
    alpha: float | None = None

    def __post_init__(self):
        if self.family == "shannon":
            if self.form not in SHANNON_FORMS:
                raise ValueError(f"unknown Shannon form {self.form!r}")
            if self.alpha is not None:
                raise ValueError("alpha is only meaningful for Renyi variants")
        elif self.family == "renyi":
            if self.form not in RENYI_FORMS:
                raise ValueError(f"form {self.form!r} is not defined for Renyi entropy")
            if self.alpha is None:
                raise ValueError("Renyi variants need alpha")
            check_alpha(self.alpha)
        else:
            raise ValueError(f"unknown family {self.family!r}")

    @classmethod
    def from_name(cls, name: str, alpha: float | None = None) -> EntropyVariant:
        try:
            family, form = VARIANT_NAMES[name]
        except KeyError:
            raise ValueError(f"unknown variant {name!r}; choose from "
                             f"{', '.join(VARIANT_NAMES)}") from None
        if family == "shannon" and alpha is not None:
            raise ValueError(f"--alpha is not used by variant {name!r}")
        return cls(family, form, alpha)

    @property
    def name(self) -> str:
        return next(k for k, v in VARIANT_NAMES.items() if v == (self.family, self.form))


@dataclass
class EntropyResult:
    value: float
    method: str  # "quadrature" or "summation"
    error_estimate: float = 0.0
    divergent: bool = False
    converged: bool = True
    inner: float | None = None  # the integral/sum of p**alpha for Renyi
    partial: float | None = None  # truncated value, for divergent summations

    def __float__(self):
        return float(self.value)


# --- integrands -------------------------------------------------------------

def _pointwise(form: str, M: float | None = None) -> Callable[[np.ndarray], np.ndarray]:
    """Integrand as a function of the log-density, with 0 log 0 = 0."""

    def g(lp):
        p = np.exp(lp)
        with np.errstate(all="ignore"):
            if form == "classical":
                v = -p * lp
            elif form == "abs":
                v = p * np.abs(lp)
            elif form == "pos":
                v = p * np.maximum(-lp, 0.0)
            elif form == "log1p":
                v = p * (np.log1p(p) - lp)
            elif form == "scaled":
                v = (p / M) * (math.log(M) - lp)
            else:
                raise ValueError(form)
        return np.where(p > 0, v, 0.0)

    return g


def _power(alpha: float):
    def g(lp):
        with np.errstate(all="ignore"):
            return np.where(np.isneginf(lp), 0.0, np.exp(alpha * lp))
    return g


def _on_density(d: DensityModel, g):
    return lambda x: g(d.logpdf(x))


@dataclass
class _Probe:
    stable: bool
    last: IntegrationResult | None
    windows: list[float]


def _first_window(d: DensityModel) -> float:
    ends = [abs(e) for e in (d.support.lower, d.support.upper) if math.isfinite(e)]
    return 2.0 * max([1.0, *ends, *(abs(b) for b in d.breakpoints)])


def probe_integrability(d: DensityModel, f, kinks: bool = False) -> _Probe:
    """Window sweep of ``f`` over doubling windows until it stabilizes.

    Stable means a relative change of at most ``SWEEP_REL_CHANGE`` on
    ``SWEEP_CONFIRMATIONS`` consecutive doublings. A sweep that is still
    moving after ``SWEEP_MAX_DOUBLINGS`` doublings is classified divergent.
    """
    if d.support.is_finite:
        return _Probe(True, None, [])
    w0 = _first_window(d)
    windows = [w0 * 2.0**j for j in range(SWEEP_MAX_DOUBLINGS + 1)]
    spec = d.integrand_spec(f, d.level_set(1.0) if kinks else ())
    prev = None
    streak = 0
    last = None
    for j, r in enumerate(iter_window_sweep(spec, windows)):
        last = r
        if prev is not None:
            if abs(r.value - prev) <= SWEEP_REL_CHANGE * abs(r.value):
                streak += 1
                if streak >= SWEEP_CONFIRMATIONS:
                    return _Probe(True, r, windows[: j + 1])
            else:
                streak = 0
        prev = r.value
    return _Probe(False, last, windows)


def _divergence_sign(d: DensityModel, f, probe: _Probe) -> float:
    """Sign of the last window increment of ``f``."""
    spec = d.integrand_spec(f)
    *_, before, after = iter_window_sweep(spec, probe.windows)
    return 1.0 if after.value >= before.value else -1.0


def _quadrature(d: DensityModel, f, kinks: bool = False) -> IntegrationResult:
    extra = d.level_set(1.0) if kinks else ()
    return integrate(d.integrand_spec(f, extra))


# --- Shannon ----------------------------------------------------------------

def shannon_differential(d: DensityModel) -> EntropyResult:
    """``-∫ p log p``."""
    probe = probe_integrability(d, _on_density(d, _pointwise("abs")), kinks=True)
    f = _on_density(d, _pointwise("classical"))
    if not probe.stable:
        sign = _divergence_sign(d, f, probe)
        return EntropyResult(sign * math.inf, "quadrature", math.inf, divergent=True)
    r = _quadrature(d, f)
    return EntropyResult(r.value, "quadrature", r.error_estimate, converged=r.converged)


def alt_shannon(d: DensityModel, form: str) -> EntropyResult:
    """Nonnegative alternatives to differential entropy.

    ``abs``: ``∫ p |log p|``; ``pos``: ``∫ p (-log p)_+``;
    ``log1p``: ``∫ p log(1/p + 1)``; ``scaled``: ``∫ (p/M) log(M/p)`` with
    ``M = sup p``, only for bounded densities.
    """
    if form == "classical" or form not in SHANNON_FORMS:
        raise ValueError(f"unknown alternative form {form!r}")
    M = None
    if form == "scaled":
        if d.supremum is None:
            raise ValueError("the scaled form needs a bounded density (supremum)")
        M = d.supremum
    probe = probe_integrability(d, _on_density(d, _pointwise("abs")), kinks=True)
    if not probe.stable:
        return EntropyResult(math.inf, "quadrature", math.inf, divergent=True)
    r = _quadrature(d, _on_density(d, _pointwise(form, M)), kinks=form in ("abs", "pos"))
    return EntropyResult(max(r.value, 0.0), "quadrature", r.error_estimate,
                         converged=r.converged)


# --- Renyi --------------------------------------------------------------------

def _renyi_value(inner: float, alpha: float, form: str) -> float:
    if form == "classical":
        return math.log(inner) / (1.0 - alpha)
    scale = 1.0 / abs(1.0 - alpha)
    if form == "abs":
        return scale * abs(math.log(inner))
    if form == "pos":
        return scale * max(math.log(inner), 0.0)
    if form == "log1p":
        return scale * math.log1p(inner)
    raise ValueError(f"unknown Renyi form {form!r}")


def _renyi_divergent(alpha: float, form: str) -> float:
    if form == "classical":
        return math.inf if alpha < 1 else -math.inf
    return math.inf


def renyi_integral(d: DensityModel, alpha: float) -> tuple[IntegrationResult | None, bool]:
    """``∫ p**alpha``, or ``(None, True)`` when the window sweep diverges."""
    alpha = check_alpha(alpha)
    f = _on_density(d, _power(alpha))
    if not probe_integrability(d, f).stable:
        return None, True
    return _quadrature(d, f), False


def _renyi_result(d: DensityModel, alpha: float, form: str) -> EntropyResult:
    r, divergent = renyi_integral(d, alpha)
    if divergent:
        return EntropyResult(_renyi_divergent(alpha, form), "quadrature", math.inf,
                             divergent=True, inner=math.inf)
    value = _renyi_value(r.value, alpha, form)
    err = r.error_estimate / (abs(r.value) * abs(1.0 - alpha))
    return EntropyResult(value, "quadrature", err, converged=r.converged, inner=r.value)


def renyi(d: DensityModel, alpha: float) -> EntropyResult:
    """``log(∫ p**alpha) / (1 - alpha)``."""
    return _renyi_result(d, alpha, "classical")


def renyi_alt(d: DensityModel, alpha: float, form: str) -> EntropyResult:
    """Nonnegative Renyi alternatives, each scaled by ``1/|1 - alpha|``:
    ``|log I|``, ``(log I)_+`` and ``log(I + 1)`` with ``I = ∫ p**alpha``."""
    if form == "classical" or form not in RENYI_FORMS:
        raise ValueError(f"unknown Renyi alternative form {form!r}")
    return _renyi_result(d, alpha, form)


def evaluate(d: DensityModel, variant: EntropyVariant) -> EntropyResult:
    if variant.family == "shannon":
        if variant.form == "classical":
            return shannon_differential(d)
        return alt_shannon(d, variant.form)
    if variant.form == "classical":
        return renyi(d, variant.alpha)
    return renyi_alt(d, variant.alpha, variant.form)


# --- discrete -----------------------------------------------------------------

def _entr(p: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        return np.where(p > 0, -p * np.log(p), 0.0)


def _doubling_sums(dd: DiscreteDistribution, K: int, term) -> list[float]:
    """Partial sums of ``term(p_k)`` at K, 2K, 4K and 8K."""
    sums, acc, lo = [], 0.0, dd.k_min
    for hi in (K, 2 * K, 4 * K, 8 * K):
        stop = min(hi, dd.k_max)
        if stop >= lo:
            acc += float(np.sum(term(dd.prob(np.arange(lo, stop + 1)))))
        sums.append(acc)
        lo = max(lo, stop + 1)
    return sums


def _summation(dd: DiscreteDistribution, K: int, term):
    if K < dd.k_min:
        raise ValueError(f"K={K} is below k_min={dd.k_min}")
    if K >= dd.k_max:
        s = float(np.sum(term(dd.probs_upto(K))))
        return s, 0.0, False
    sums = _doubling_sums(dd, K, term)
    moving = all(abs(b - a) > SWEEP_REL_CHANGE * abs(b) for a, b in zip(sums, sums[1:]))
    return sums[0], abs(sums[-1] - sums[0]), moving


def shannon_discrete(dd: DiscreteDistribution, K: int) -> EntropyResult:
    """``-Σ_{k<=K} p_k log p_k``, flagged divergent if it keeps growing under doubling of K."""
    s, tail, divergent = _summation(dd, K, _entr)
    if divergent:
        return EntropyResult(math.inf, "summation", math.inf, True, partial=s)
    return EntropyResult(s, "summation", tail, partial=s)


def renyi_discrete(dd: DiscreteDistribution, alpha: float, K: int) -> EntropyResult:
    """``log(Σ_{k<=K} p_k**alpha) / (1 - alpha)``."""
    alpha = check_alpha(alpha)
    s, tail, divergent = _summation(dd, K, lambda p: np.where(p > 0, p**alpha, 0.0))
    partial = math.log(s) / (1.0 - alpha)
    if divergent:
        return EntropyResult(_renyi_divergent(alpha, "classical"), "summation", math.inf,
                             True, inner=math.inf, partial=partial)
    return EntropyResult(partial, "summation", tail / (s * abs(1 - alpha)),
                         inner=s, partial=partial)
