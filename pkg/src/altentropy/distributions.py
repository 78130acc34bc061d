"""Continuous and discrete distribution models.

All density methods are vectorized: they accept scalars or arrays and return
a float for scalar input, an ndarray otherwise.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._text import split_spec
from .quadrature import IntegrandSpec, SupportSpec, integrate

__all__ = [
    "SupportSpec", "DensityModel", "DiscreteDistribution", "LocalComparability",
    "make_gaussian", "make_exponential", "make_uniform", "make_heavy_tail_log",
    "make_staircase_comb", "make_rational_decay", "make_quartic_exp",
    "make_log_square_discrete", "make_finite_discrete",
    "check_local_comparability", "parse_distribution",
]

LOG2 = math.log(2.0)


def _vectorized(method):
    @functools.wraps(method)
    def wrapper(self, x):
        arr = np.asarray(x, dtype=float)
        out = method(self, np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)
    return wrapper


class DensityModel:
    """A univariate density with its log-density, cdf and support.

    Subclasses implement ``_logpdf`` and ``_cdf`` (and ``_sf`` when the
    survival function can be computed more accurately than ``1 - cdf``).
    ``breakpoints`` lists points where the density is not smooth or peaks
    sharply; ``log_scale`` tells the integrator to work in ``log x``.
    """

    label: str = "density"
    support: SupportSpec
    supremum: float | None = None
    breakpoints: tuple[float, ...] = ()
    log_scale: bool = False
    flags: frozenset[str] = frozenset()

    def _inside(self, x):
        return (x >= self.support.lower) & (x <= self.support.upper)

    @_vectorized
    def logpdf(self, x):
        return self._logpdf(x)

    @_vectorized
    def pdf(self, x):
        return np.exp(self._logpdf(x))

    @_vectorized
    def cdf(self, x):
        return self._cdf(x)

    @_vectorized
    def sf(self, x):
        return self._sf(x)

    def _sf(self, x):
        return 1.0 - self._cdf(x)

    def level_set(self, c: float) -> tuple[float, ...]:
        """Points where the density crosses the level ``c`` (kinks of ``|log p|`` at c=1)."""
        return ()

    def integrand_spec(self, f, extra_breaks=(), **kwargs) -> IntegrandSpec:
        """Quadrature spec for ``f`` over this model's support."""
        breaks = tuple(sorted({*self.breakpoints, *extra_breaks}))
        return IntegrandSpec(f, self.support, breakpoints=breaks,
                             log_scale=self.log_scale, **kwargs)

    def __repr__(self):
        return f"<{type(self).__name__} {self.label}>"


class Gaussian(DensityModel):
    def __init__(self, m: float, sigma: float):
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        self.m, self.sigma = float(m), float(sigma)
        self.support = SupportSpec(-math.inf, math.inf)
        self.supremum = 1.0 / (self.sigma * math.sqrt(2 * math.pi))
        self.breakpoints = (self.m,)
        self.label = f"gaussian:m={m:g},sigma={sigma:g}"

    def _logpdf(self, x):
        z = (x - self.m) / self.sigma
        return -0.5 * z * z - math.log(self.sigma * math.sqrt(2 * math.pi))

    def level_set(self, c):
        r = -2.0 * (math.log(c) + math.log(self.sigma * math.sqrt(2 * math.pi)))
        if r <= 0:
            return ()
        dx = self.sigma * math.sqrt(r)
        return (self.m - dx, self.m + dx)

    def _cdf(self, x):
        return special.ndtr((x - self.m) / self.sigma)

    def _sf(self, x):
        return special.ndtr((self.m - x) / self.sigma)


class Exponential(DensityModel):
    def __init__(self, mu: float):
        if not mu > 0:
            raise ValueError(f"mu must be positive, got {mu}")
        self.mu = float(mu)
        self.support = SupportSpec(0.0, math.inf)
        self.supremum = 1.0 / self.mu
        self.label = f"exponential:mu={mu:g}"

    def _logpdf(self, x):
        with np.errstate(invalid="ignore"):
            return np.where(x >= 0, -math.log(self.mu) - x / self.mu, -np.inf)

    def level_set(self, c):
        x = -self.mu * math.log(self.mu * c)
        return (x,) if x > 0 else ()

    def _cdf(self, x):
        return -np.expm1(-np.maximum(x, 0.0) / self.mu)

    def _sf(self, x):
        return np.exp(-np.maximum(x, 0.0) / self.mu)


class Uniform(DensityModel):
    def __init__(self, a: float, b: float):
        if not a < b:
            raise ValueError(f"uniform needs a < b, got a={a}, b={b}")
        self.a, self.b = float(a), float(b)
        self.support = SupportSpec(self.a, self.b)
        self.supremum = 1.0 / (self.b - self.a)
        self.label = f"uniform:a={a:g},b={b:g}"

    def _logpdf(self, x):
        return np.where(self._inside(x), -math.log(self.b - self.a), -np.inf)

    def _cdf(self, x):
        return np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)

    def _sf(self, x):
        return np.clip((self.b - x) / (self.b - self.a), 0.0, 1.0)


class HeavyTailLog(DensityModel):
    """``log 2 / (x log^2 x)`` on ``[2, inf)``: finite mass, infinite entropy."""

    label = "heavytail"
    support = SupportSpec(2.0, math.inf)
    log_scale = True
    flags = frozenset({"infinite-entropy:+"})

    def __init__(self):
        self.supremum = LOG2 / (2.0 * LOG2**2)

    def _logpdf(self, x):
        with np.errstate(all="ignore"):
            lx = np.log(x)
            return np.where(x >= 2.0, math.log(LOG2) - lx - 2.0 * np.log(lx), -np.inf)

    def level_set(self, c):
        if c >= self.supremum:
            return ()
        # log x + 2 log log x = log(log 2 / c) is increasing in x
        target = math.log(LOG2 / c)
        lo, hi = math.log(2.0), max(1.0, target)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid + 2.0 * math.log(mid) < target:
                lo = mid
            else:
                hi = mid
        return (math.exp(0.5 * (lo + hi)),)

    def _cdf(self, x):
        return 1.0 - self._sf(x)

    def _sf(self, x):
        with np.errstate(divide="ignore"):
            return np.where(x > 2.0, LOG2 / np.log(np.maximum(x, 2.0)), 1.0)


def _comb_mass_terms(K: int) -> np.ndarray:
    k = np.arange(2, K + 1, dtype=float)
    return 1.0 / (k * np.log(k) ** 2)


class StaircaseComb(DensityModel):
    """Teeth of height ``k / L_K`` on ``[k, k + 1/(k^2 log^2 k)]``, ``2 <= k <= K``.

    ``L_K`` is the partial sum of ``1/(k log^2 k)``, so the truncated comb
    integrates to one. Its entropy drifts to minus infinity as K grows.
    """

    flags = frozenset({"infinite-entropy:-"})

    def __init__(self, K: int):
        if int(K) != K or K < 2:
            raise ValueError(f"staircase comb needs an integer K >= 2, got {K}")
        self.K = K = int(K)
        terms = _comb_mass_terms(K)
        self.L = math.fsum(terms)
        self.k = np.arange(2, K + 1, dtype=float)
        self.widths = 1.0 / (self.k**2 * np.log(self.k) ** 2)
        self.heights = self.k / self.L
        self.masses = terms / self.L
        self.cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        self.support = SupportSpec(2.0, K + self.widths[-1])
        self.supremum = K / self.L
        self.breakpoints = tuple(np.concatenate([self.k, self.k + self.widths]))
        self.label = f"staircase:K={K}"

    def _tooth(self, x):
        idx = np.floor(np.clip(x, 0.0, self.K + 2.0)).astype(np.int64) - 2
        valid = (idx >= 0) & (idx < self.K - 1)
        idx = np.clip(idx, 0, self.K - 2)
        offset = x - self.k[idx]
        return idx, valid, offset

    def _logpdf(self, x):
        idx, valid, offset = self._tooth(x)
        on = valid & (offset <= self.widths[idx])
        with np.errstate(divide="ignore"):
            return np.where(on, np.log(self.heights[idx]), -np.inf)

    def _cdf(self, x):
        idx, valid, offset = self._tooth(x)
        partial = np.clip(offset, 0.0, self.widths[idx]) * self.heights[idx]
        inner = self.cum[idx] + np.minimum(partial, self.masses[idx])
        return np.where(x < 2.0, 0.0, np.where(valid, inner, 1.0))


class RationalDecay(DensityModel):
    """``1 / (pi (1 + x^2))``."""

    label = "rational"
    support = SupportSpec(-math.inf, math.inf)
    supremum = 1.0 / math.pi
    breakpoints = (0.0,)

    def level_set(self, c):
        r = 1.0 / (math.pi * c) - 1.0
        return (-math.sqrt(r), math.sqrt(r)) if r > 0 else ()

    def _logpdf(self, x):
        return -math.log(math.pi) - np.log1p(x * x)

    def _cdf(self, x):
        return np.arctan2(1.0, -x) / math.pi

    def _sf(self, x):
        return np.arctan2(1.0, x) / math.pi


class QuarticExp(DensityModel):
    """``C exp(-x^4)`` with ``C = 1 / (2 Gamma(5/4))``.

    The cdf has no closed form. It is tabulated once at construction on a
    fixed grid over ``[-R, 0]``. Between grid nodes it is completed by a
    20-point Gauss-Legendre rule. The right half uses symmetry.
    """

    label = "quartic"
    support = SupportSpec(-math.inf, math.inf)
    breakpoints = (0.0,)
    flags = frozenset({"fails-local-comparability"})

    _R = 5.0  # exp(-5**4) underflows any practical tolerance
    _STEP = 1.0 / 32.0

    def __init__(self):
        self.C = 1.0 / (2.0 * math.gamma(1.25))
        self.supremum = self.C
        self._grid = np.arange(-self._R, self._STEP / 2, self._STEP)
        pieces = [
            integrate(IntegrandSpec(self._density, SupportSpec(a, b)),
                      rel_tol=1e-13, abs_tol=1e-300).value
            for a, b in zip(self._grid[:-1], self._grid[1:])
        ]
        # mass left of -R is ~ exp(-625) / 500
        self._table = np.concatenate([[0.0], np.cumsum(pieces)])
        self._gl_x, self._gl_w = np.polynomial.legendre.leggauss(20)

    def _density(self, x):
        return self.C * np.exp(-(x**4))

    def level_set(self, c):
        if c >= self.C:
            return ()
        r = math.log(self.C / c) ** 0.25
        return (-r, r)

    def _logpdf(self, x):
        return math.log(self.C) - x**4

    def _left_cdf(self, x):
        """cdf for x <= 0."""
        x = np.maximum(x, -self._R)
        j = np.clip(np.floor((x + self._R) / self._STEP).astype(np.int64),
                    0, len(self._grid) - 1)
        a = self._grid[j]
        half = 0.5 * (x - a)
        nodes = (a + half)[:, None] + half[:, None] * self._gl_x[None, :]
        tail = half * (self._density(nodes) @ self._gl_w)
        return self._table[j] + tail

    def _cdf(self, x):
        out = np.empty_like(x)
        left = x <= 0
        out[left] = self._left_cdf(x[left])
        out[~left] = 1.0 - self._left_cdf(-x[~left])
        return out

    def _sf(self, x):
        return self._cdf(-x)


def make_gaussian(m: float = 0.0, sigma: float = 1.0) -> DensityModel:
    return Gaussian(m, sigma)


def make_exponential(mu: float = 1.0) -> DensityModel:
    return Exponential(mu)


def make_uniform(a: float = 0.0, b: float = 1.0) -> DensityModel:
    return Uniform(a, b)


def make_heavy_tail_log() -> DensityModel:
    return HeavyTailLog()


def make_staircase_comb(K: int = 1000) -> DensityModel:
    return StaircaseComb(K)


def make_rational_decay() -> DensityModel:
    return RationalDecay()


@functools.lru_cache(maxsize=None)
def make_quartic_exp() -> DensityModel:
    return QuarticExp()


# --- discrete distributions -------------------------------------------------

@dataclass(frozen=True)
class DiscreteDistribution:
    """Probabilities ``p_k`` for ``k >= k_min``.

    ``size`` is the number of atoms, or ``None`` for an infinite sequence.
    ``truncation_index`` is the index beyond which the remaining mass is
    negligible; ``None`` means the tail is too slow for that.
    """

    rule: object  # callable k -> p_k, vectorized over integer arrays
    k_min: int = 1
    size: int | None = None
    truncation_index: int | None = None
    label: str = "discrete"
    flags: frozenset[str] = frozenset()
    normalizer: float | None = None

    @property
    def k_max(self) -> float:
        return self.k_min + self.size - 1 if self.size is not None else math.inf

    def prob(self, k):
        k = np.asarray(k)
        p = np.asarray(self.rule(k), dtype=float)
        return np.where((k >= self.k_min) & (k <= self.k_max), p, 0.0)

    def probs_upto(self, K: int) -> np.ndarray:
        stop = min(K, self.k_max)
        return self.prob(np.arange(self.k_min, stop + 1))

    @property
    def slowly_converging(self) -> bool:
        return "slowly-converging" in self.flags


def make_finite_discrete(probs, label: str = "finite") -> DiscreteDistribution:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0 or (p < 0).any():
        raise ValueError("probabilities must be a nonempty nonnegative vector")
    if abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(f"probabilities sum to {p.sum()}, not 1")

    def rule(k):
        return p[np.clip(k - 1, 0, p.size - 1)]

    return DiscreteDistribution(rule, 1, p.size, p.size, label)


def log_square_constant(rel_tol: float = 1e-10) -> float:
    """``L = sum_{k>=2} 1/(k log^2 k)``.

    Direct partial sum up to ``K0`` plus an Euler-Maclaurin tail, which is
    accurate far beyond ``rel_tol`` because the tail terms are smooth.
    """
    K0 = 10_000
    head = math.fsum(_comb_mass_terms(K0 - 1))
    lk = math.log(K0)
    f = 1.0 / (K0 * lk**2)
    df = -(lk + 2.0) / (K0**2 * lk**3)
    tail = 1.0 / lk + 0.5 * f - df / 12.0
    L = head + tail
    # next Euler-Maclaurin term is O(K0^-4); checked against rel_tol
    assert 1.0 / (K0**4) < rel_tol * L
    return L


@functools.lru_cache(maxsize=None)
def make_log_square_discrete() -> DiscreteDistribution:
    """``p_k = 1/(L k log^2 k)`` for ``k >= 2``; finite mass, infinite entropy."""
    L = log_square_constant()

    def rule(k):
        k = np.maximum(np.asarray(k, dtype=float), 2.0)
        return 1.0 / (L * k * np.log(k) ** 2)

    return DiscreteDistribution(
        rule, 2, None, None, "log-square",
        frozenset({"infinite-entropy:+", "slowly-converging"}), L,
    )


# --- local comparability ----------------------------------------------------

@dataclass(frozen=True)
class LocalComparability:
    holds: bool
    witness: tuple[float, float] | None = None
    log_ratio: float = -math.inf  # max over sampled pairs of log p(x) - log p(y)

    def __bool__(self):
        return self.holds


def check_local_comparability(
    d: DensityModel, D: float, x0: float, K: float, samples: int = 100
) -> LocalComparability:
    """Check ``p(x) <= K p(y)`` for ``|x|, |y|`` in ``(x0, D)`` and ``|x - y| <= 1/D``.

    Pairs come from a deterministic grid with ``samples`` points per unit
    length on each side of the origin, each paired with neighbours at
    offsets ``±1/D``, ``±1/(2D)`` and one grid step. This is a sampling
    check. It can find a counterexample but it cannot prove the
    inequality. The witness is the pair with the largest ratio.
    """
    if not D > x0:
        raise ValueError("need D > x0")
    if samples < 100:
        raise ValueError("need at least 100 samples per unit length")
    if not K >= 1:
        raise ValueError("K must be >= 1")
    n = max(int(math.ceil((D - x0) * samples)), 2)
    pos = np.linspace(x0, D, n + 2)[1:-1]
    x = np.concatenate([-pos[::-1], pos])
    steps = [1.0 / D, 0.5 / D]
    if 1.0 / samples < 0.5 / D:
        steps.append(1.0 / samples)
    offsets = np.array([s * sign for s in steps for sign in (-1.0, 1.0)])
    xx = np.repeat(x, offsets.size)
    yy = xx + np.tile(offsets, x.size)
    keep = (np.abs(yy) > x0) & (np.abs(yy) < D)
    xx, yy = xx[keep], yy[keep]
    if xx.size == 0:
        return LocalComparability(True, None, -math.inf)
    lx, ly = d.logpdf(xx), d.logpdf(yy)
    with np.errstate(invalid="ignore"):
        diff = np.where(np.isneginf(lx), -np.inf, lx - ly)
    diff = np.nan_to_num(diff, nan=-np.inf, posinf=np.inf)
    i = int(np.argmax(diff))
    worst = float(diff[i])
    if worst > math.log(K):
        return LocalComparability(False, (float(xx[i]), float(yy[i])), worst)
    return LocalComparability(True, None, worst)


# --- text form ----------------------------------------------------------------

_FACTORIES = {
    "gaussian": (make_gaussian, {"m": float, "sigma": float}),
    "normal": (make_gaussian, {"m": float, "sigma": float}),
    "exponential": (make_exponential, {"mu": float}),
    "uniform": (make_uniform, {"a": float, "b": float}),
    "heavytail": (make_heavy_tail_log, {}),
    "staircase": (make_staircase_comb, {"K": int}),
    "rational": (make_rational_decay, {}),
    "quartic": (make_quartic_exp, {}),
}


def parse_distribution(text: str) -> DensityModel:
    """Build a model from ``"name:param=value,..."``, e.g. ``"gaussian:m=0,sigma=1"``."""
    name, params = split_spec(text)
    if name not in _FACTORIES:
        raise ValueError(f"unknown distribution {name!r}; "
                         f"choose from {', '.join(sorted(_FACTORIES))}")
    factory, types = _FACTORIES[name]
    unknown = set(params) - set(types)
    if unknown:
        raise ValueError(f"{name}: unknown parameter(s) {', '.join(sorted(unknown))}")
    kwargs = {}
    for key, raw in params.items():
        try:
            kwargs[key] = types[key](raw)
        except ValueError:
            raise ValueError(f"{name}: bad value for {key}: {raw!r}") from None
    return factory(**kwargs)
