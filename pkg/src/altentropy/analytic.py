"""Closed-form entropies for the Gaussian, exponential and uniform families.

For the centred Gaussian the alternative Shannon entropies reduce to a
function of the single parameter ``u = log(sigma sqrt(2 pi))``:

    f(u) = pi^{-1/2} ∫_0^∞ e^{-z} z^{-1/2} g(z + u) dz,

with ``g = |·|`` for the abs form and ``g = (·)_+`` for the pos form. For
``u <= 0`` these are regularized incomplete gamma functions at ``a = -u``.
The log1p form has no closed form. It is evaluated from the same
one-dimensional representation with the ``z^{-1/2}`` endpoint singularity
removed by substitution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .functionals import check_alpha
from .quadrature import IntegrandSpec, Singularity, SupportSpec, integrate

SQRT_2PI = math.sqrt(2.0 * math.pi)
SHANNON_CF_FORMS = ("classical", "abs", "pos", "log1p", "scaled")
RENYI_CF_FORMS = ("classical", "abs", "pos", "log1p")


@dataclass(frozen=True)
class ClosedFormEntry:
    family: str
    param: float
    variant: str
    value: float
    branch: str

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class ThresholdResult:
    u0: float
    sigma0: float
    min_value: float


def _positive(name, x):
    if not x > 0:
        raise ValueError(f"{name} must be positive, got {x}")
    return float(x)


# --- bisection --------------------------------------------------------------

def bisect(g: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of ``g`` in ``[lo, hi]`` to within ``tol``; needs a sign change."""
    glo, ghi = g(lo), g(hi)
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    if glo * ghi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]: g(lo)={glo}, g(hi)={ghi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        gm = g(mid)
        if gm == 0:
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- Gaussian ---------------------------------------------------------------

def gaussian_u(sigma: float) -> float:
    return math.log(_positive("sigma", sigma) * SQRT_2PI)


def gaussian_shannon_cf(sigma: float) -> float:
    return 0.5 * (1.0 + math.log(2.0 * math.pi)) + math.log(_positive("sigma", sigma))


def gaussian_abs_of_u(u: float) -> float:
    if u > 0:
        return 0.5 + u
    a = -u
    p_half = special.erf(math.sqrt(a))
    p_three_halves = special.gammainc(1.5, a)
    return 0.5 - p_three_halves + a * (2.0 * p_half - 1.0)


def gaussian_pos_of_u(u: float) -> float:
    if u > 0:
        return 0.5 + u
    a = -u
    return 0.5 * special.gammaincc(1.5, a) - a * special.erfc(math.sqrt(a))


def _z_integral(g: Callable[[np.ndarray], np.ndarray], **kw):
    """``pi^{-1/2} ∫_0^∞ e^{-z} z^{-1/2} g(z) dz`` with the endpoint singularity removed."""
    spec = IntegrandSpec(
        lambda z: np.exp(-z) / np.sqrt(z) * g(z) / math.sqrt(math.pi),
        SupportSpec(0.0, math.inf),
        singularity=Singularity("lower", 0.5),
        **kw,
    )
    return integrate(spec)


def gaussian_alt_by_z_quadrature(u: float, form: str) -> float:
    """Gaussian alternative entropy from the one-dimensional z-representation."""
    kink = (-u,) if u < 0 else ()
    if form == "abs":
        r = _z_integral(lambda z: np.abs(z + u), breakpoints=kink)
    elif form == "pos":
        r = _z_integral(lambda z: np.maximum(z + u, 0.0), breakpoints=kink)
    elif form == "log1p":
        # log(e^{z+u} + 1)
        r = _z_integral(lambda z: np.logaddexp(z + u, 0.0))
    else:
        raise ValueError(f"no z-representation for form {form!r}")
    if not r.converged:
        raise ArithmeticError(f"z-quadrature did not converge for form {form}")
    return r.value


def gaussian_alt_cf(sigma: float, form: str) -> ClosedFormEntry:
    u = gaussian_u(sigma)
    upper = "sigma>1/sqrt(2pi)" if u > 0 else "sigma<=1/sqrt(2pi)"
    if form == "classical":
        value, branch = gaussian_shannon_cf(sigma), "any"
    elif form == "abs":
        value, branch = gaussian_abs_of_u(u), upper
    elif form == "pos":
        value, branch = gaussian_pos_of_u(u), upper
    elif form == "log1p":
        value, branch = gaussian_alt_by_z_quadrature(u, "log1p"), "quadrature"
    elif form == "scaled":
        value, branch = sigma * math.sqrt(math.pi / 2.0), "any"
    else:
        raise ValueError(f"unknown form {form!r}")
    return ClosedFormEntry("gaussian", sigma, form, value, branch)


# --- exponential --------------------------------------------------------------

def exponential_shannon_cf(mu: float) -> float:
    return 1.0 + math.log(_positive("mu", mu))


def exponential_alt_cf(mu: float, form: str) -> ClosedFormEntry:
    mu = _positive("mu", mu)
    small = mu <= 1.0
    branch = "mu<=1" if small else "mu>1"
    if form == "classical":
        value, branch = exponential_shannon_cf(mu), "any"
    elif form == "abs":
        value = 2.0 * mu - math.log(mu) - 1.0 if small else 1.0 + math.log(mu)
    elif form == "pos":
        value = mu if small else 1.0 + math.log(mu)
    elif form == "log1p":
        value, branch = math.log1p(mu) + mu * math.log1p(1.0 / mu), "any"
    elif form == "scaled":
        value, branch = mu, "any"
    else:
        raise ValueError(f"unknown form {form!r}")
    return ClosedFormEntry("exponential", mu, form, value, branch)


# --- uniform --------------------------------------------------------------------

def uniform_alt_cf(width: float, form: str) -> ClosedFormEntry:
    """Closed forms for a uniform density on an interval of length ``width``."""
    w = _positive("width", width)
    lw = math.log(w)
    values = {
        "classical": lw,
        "abs": abs(lw),
        "pos": max(lw, 0.0),
        "log1p": math.log1p(w),
        "scaled": 0.0,
    }
    if form not in values:
        raise ValueError(f"unknown form {form!r}")
    return ClosedFormEntry("uniform", w, form, values[form], "any")


# --- Renyi ------------------------------------------------------------------------

def threshold_sigma_alpha(alpha: float) -> float:
    """Gaussian scale at which ``∫ p**alpha = 1``."""
    alpha = check_alpha(alpha)
    return alpha ** (1.0 / (2.0 * (1.0 - alpha))) / SQRT_2PI


def threshold_mu_alpha(alpha: float) -> float:
    """Exponential mean at which ``∫ p**alpha = 1``."""
    alpha = check_alpha(alpha)
    return alpha ** (1.0 / (1.0 - alpha))


def renyi_integral_cf(family: str, param: float, alpha: float) -> float:
    alpha = check_alpha(alpha)
    param = _positive("parameter", param)
    if family == "gaussian":
        return (param * SQRT_2PI) ** (1.0 - alpha) / math.sqrt(alpha)
    if family == "exponential":
        return param ** (1.0 - alpha) / alpha
    if family == "uniform":
        return param ** (1.0 - alpha)
    raise ValueError(f"no closed form for family {family!r}")


def _renyi_log_integral(family: str, param: float, alpha: float) -> float:
    # log of the integral, computed without exponentiating
    if family == "gaussian":
        return (1.0 - alpha) * math.log(param * SQRT_2PI) - 0.5 * math.log(alpha)
    if family == "exponential":
        return (1.0 - alpha) * math.log(param) - math.log(alpha)
    if family == "uniform":
        return (1.0 - alpha) * math.log(param)
    raise ValueError(f"no closed form for family {family!r}")


def gaussian_renyi_cf(sigma: float, alpha: float) -> float:
    alpha = check_alpha(alpha)
    return (math.log(_positive("sigma", sigma)) + 0.5 * math.log(2.0 * math.pi)
            + math.log(alpha) / (2.0 * (alpha - 1.0)))


def exponential_renyi_cf(mu: float, alpha: float) -> float:
    alpha = check_alpha(alpha)
    return math.log(_positive("mu", mu)) - math.log(alpha) / (1.0 - alpha)


def renyi_alt_cf(family: str, param: float, alpha: float, form: str) -> ClosedFormEntry:
    """Piecewise Renyi alternatives; ``branch`` names the case that applied.

    Writing ``log I = (1 - alpha) T`` with ``T`` increasing in the scale
    parameter, the abs form is ``|T|``. The pos form is ``T_+`` for
    ``alpha < 1`` and ``(-T)_+`` for ``alpha > 1``. ``T`` vanishes at the
    threshold scale.
    """
    alpha = check_alpha(alpha)
    param = _positive("parameter", param)
    if family == "gaussian":
        threshold, name = threshold_sigma_alpha(alpha), "sigma"
    elif family == "exponential":
        threshold, name = threshold_mu_alpha(alpha), "mu"
    elif family == "uniform":
        threshold, name = 1.0, "width"
    else:
        raise ValueError(f"no closed form for family {family!r}")
    log_i = _renyi_log_integral(family, param, alpha)
    T = log_i / (1.0 - alpha)
    below = param <= threshold
    side = f"{name}<={name}_alpha" if below else f"{name}>{name}_alpha"
    if form == "classical":
        value, branch = T, "any"
    elif form == "abs":
        value, branch = (-T if below else T), side
        value = max(value, 0.0) + 0.0  # + 0.0 turns -0.0 into 0.0
    elif form == "pos":
        if alpha < 1:
            value = 0.0 if below else T
        else:
            value = -T if below else 0.0
        value, branch = max(value, 0.0) + 0.0, f"{side},alpha{'<' if alpha < 1 else '>'}1"
    elif form == "log1p":
        value, branch = math.log1p(math.exp(log_i)) / abs(1.0 - alpha), "any"
    else:
        raise ValueError(f"unknown Renyi form {form!r}")
    return ClosedFormEntry(family, param, f"renyi-{form}", value, branch)


# --- thresholds ---------------------------------------------------------------------

def threshold_equation(u: float) -> float:
    """Zero at the minimizer of the Gaussian abs form: erf(sqrt(-u)) - 1/2."""
    return special.erf(math.sqrt(-u)) - 0.5


def solve_thresholds(tol: float = 1e-12) -> ThresholdResult:
    """Minimizer ``u0`` of the Gaussian abs form, its scale and the minimum.

    ``u0`` solves ``∫_0^{-u} e^{-z} z^{-1/2} dz = ∫_{-u}^∞ e^{-z} z^{-1/2} dz``,
    which is ``erf(sqrt(-u)) = 1/2``. The minimum value is evaluated by
    quadrature of the z-representation.
    """
    u0 = bisect(threshold_equation, -1.0, -0.01, tol)
    return ThresholdResult(u0, math.exp(u0) / SQRT_2PI,
                           gaussian_alt_by_z_quadrature(u0, "abs"))


# --- dispatch -----------------------------------------------------------------------

def closed_form(family: str, param: float, variant_family: str, form: str,
                alpha: float | None = None) -> ClosedFormEntry:
    """Closed form for one variant, or ``ValueError`` when none exists."""
    if variant_family == "renyi":
        return renyi_alt_cf(family, param, alpha, form)
    if family == "gaussian":
        return gaussian_alt_cf(param, form)
    if family == "exponential":
        return exponential_alt_cf(param, form)
    if family == "uniform":
        return uniform_alt_cf(param, form)
    raise ValueError(f"no closed form for family {family!r}")
