import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from altentropy.distributions import (
    check_local_comparability,
    log_square_constant,
    make_exponential,
    make_finite_discrete,
    make_gaussian,
    make_heavy_tail_log,
    make_log_square_discrete,
    make_quartic_exp,
    make_rational_decay,
    make_staircase_comb,
    make_uniform,
    parse_distribution,
)
from altentropy.quadrature import integrate

MODELS = {
    "gaussian": lambda: make_gaussian(0.3, 1.7),
    "exponential": lambda: make_exponential(0.7),
    "uniform": lambda: make_uniform(-1, 2),
    "heavytail": make_heavy_tail_log,
    "staircase": lambda: make_staircase_comb(50),
    "rational": make_rational_decay,
    "quartic": make_quartic_exp,
}


@pytest.fixture(params=list(MODELS))
def model(request):
    return MODELS[request.param]()


def interior_grid(d, n=100):
    lo, hi = d.support.lower, d.support.upper
    lo = lo if math.isfinite(lo) else -6.0
    hi = hi if math.isfinite(hi) else lo + 12.0
    return np.linspace(lo, hi, n + 2)[1:-1]


def test_normalization(model):
    r = integrate(model.integrand_spec(model.pdf))
    assert abs(r.value - 1) <= 1e-9


def test_cdf_limits_and_monotone(model):
    x = interior_grid(model, 400)
    F = model.cdf(x)
    assert np.all(np.diff(F) >= -1e-15)
    lo, hi = model.support.lower, model.support.upper
    far_lo = lo if math.isfinite(lo) else -1e12
    far_hi = hi if math.isfinite(hi) else 1e300
    assert model.cdf(far_lo) == pytest.approx(0, abs=1e-9)
    assert model.cdf(far_hi) == pytest.approx(1, abs=1e-2 if model.label == "heavytail" else 1e-9)


def test_cdf_derivative_matches_pdf(model):
    x = interior_grid(model)
    x = x[[not any(abs(xi - b) < 1e-4 for b in model.breakpoints) for xi in x]]
    h = 1e-5
    fd = (model.cdf(x + h) - model.cdf(x - h)) / (2 * h)
    assert np.max(np.abs(fd - model.pdf(x))) < 1e-5


def test_logpdf_consistent(model):
    x = interior_grid(model)
    p = model.pdf(x)
    pos = p > 0
    assert np.allclose(np.exp(model.logpdf(x))[pos], p[pos], rtol=1e-12, atol=0)


def test_scalar_in_scalar_out():
    assert isinstance(make_gaussian().pdf(0.0), float)
    assert make_gaussian().pdf(np.zeros(3)).shape == (3,)


def test_gaussian_examples():
    g = make_gaussian(0, 1)
    assert g.pdf(0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-12)
    assert g.cdf(0) == 0.5
    assert make_gaussian(2, 0.5).supremum == pytest.approx(0.7978846, abs=1e-7)


def test_exponential_examples():
    assert make_exponential(1).pdf(0) == 1.0
    assert make_exponential(2).cdf(2 * math.log(2)) == pytest.approx(0.5, abs=1e-15)
    assert make_exponential(0.5).supremum == 2.0
    assert make_exponential(1).pdf(-1) == 0.0


def test_uniform_examples():
    assert make_uniform(0, 1).cdf(0.25) == 0.25
    assert make_uniform(0, 2).pdf(1) == 0.5
    assert make_uniform(-1, 1).cdf(2) == 1.0


def test_heavy_tail_examples():
    d = make_heavy_tail_log()
    assert d.cdf(4) == pytest.approx(0.5, abs=1e-15)
    assert d.cdf(2) == 0.0
    assert "infinite-entropy:+" in d.flags


def test_staircase_examples():
    K = 50
    d = make_staircase_comb(K)
    L = math.fsum(1 / (k * math.log(k) ** 2) for k in range(2, K + 1))
    w2 = 1 / (4 * math.log(2) ** 2)
    assert d.pdf(2 + w2 / 2) == pytest.approx(2 / L, rel=1e-12)
    assert d.pdf(2.9) == 0.0
    assert "K=50" in d.label
    assert "infinite-entropy:-" in d.flags


def test_rational_examples():
    d = make_rational_decay()
    assert d.pdf(0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert d.cdf(1) == pytest.approx(0.75, abs=1e-15)
    assert d.cdf(0) == 0.5


def test_quartic_examples():
    d = make_quartic_exp()
    assert d.pdf(0) / d.pdf(1) == pytest.approx(math.e, rel=1e-13)
    assert d.pdf(0) == pytest.approx(1 / (2 * special.gamma(1.25)), rel=1e-14)
    assert d.cdf(0) == pytest.approx(0.5, abs=1e-13)
    # closed form via the regularized incomplete gamma function
    for x in (0.3, 0.9, 1.4):
        assert d.cdf(x) == pytest.approx(0.5 + 0.5 * special.gammainc(0.25, x**4), abs=1e-11)


@pytest.mark.parametrize("t", [0.1, 1.0, 3.7])
def test_symmetric_cdfs(t):
    g = make_gaussian(1.5, 2)
    assert g.cdf(1.5 + t) + g.cdf(1.5 - t) == pytest.approx(1, abs=1e-12)
    u = make_uniform(0, 10)
    assert u.cdf(5 + t) + u.cdf(5 - t) == pytest.approx(1, abs=1e-12)


def test_level_sets_hit_one():
    for d in (make_gaussian(0, 0.2), make_exponential(0.5), make_heavy_tail_log(),
              make_rational_decay(), make_quartic_exp()):
        for x in d.level_set(1.0):
            assert d.pdf(x) == pytest.approx(1.0, rel=1e-9)
    assert make_gaussian(0, 1).level_set(1.0) == ()


def test_log_square_constant():
    L = log_square_constant()
    assert L == pytest.approx(2.10974, abs=1e-4)
    # independent oracle: long direct sum plus integral tail bounds
    K = 200_000
    k = np.arange(2, K + 1, dtype=float)
    head = math.fsum(1 / (k * np.log(k) ** 2))
    assert head + 1 / math.log(K + 1) <= L <= head + 1 / math.log(K)


def test_log_square_discrete():
    dd = make_log_square_discrete()
    L = dd.normalizer
    assert dd.prob(2) * L * 2 * math.log(2) ** 2 == pytest.approx(1, abs=1e-12)
    assert math.fsum(dd.probs_upto(10**6)) < 1
    assert dd.slowly_converging
    assert dd.prob(1) == 0.0


def test_finite_discrete_validation():
    d = make_finite_discrete([0.25, 0.75])
    assert d.k_max == 2
    assert list(d.probs_upto(10)) == [0.25, 0.75]
    for bad in ([0.5, 0.6], [-0.1, 1.1], []):
        with pytest.raises(ValueError):
            make_finite_discrete(bad)


def test_local_comparability_examples():
    assert check_local_comparability(make_gaussian(0, 1), 10, 0, math.e**2)
    assert check_local_comparability(make_exponential(1), 10, 1, math.e)
    r = check_local_comparability(make_quartic_exp(), 100, 1, 10)
    assert not r
    assert abs(r.witness[0]) > 95 and abs(r.witness[1]) > 95


@settings(max_examples=25, deadline=None)
@given(m=st.floats(-3, 3), sigma=st.floats(0.3, 3), extra=st.floats(0.01, 20))
def test_gaussian_comparability_property(m, sigma, extra):
    D = abs(m) + extra
    assert check_local_comparability(make_gaussian(m, sigma), D, abs(m), math.exp(2 / sigma**2))


@pytest.mark.parametrize("bad", [
    dict(D=1, x0=2, K=2), dict(D=10, x0=0, K=0.5), dict(D=10, x0=0, K=2, samples=10),
])
def test_local_comparability_validation(bad):
    with pytest.raises(ValueError):
        check_local_comparability(make_gaussian(), **bad)


def test_parse_distribution():
    assert parse_distribution("gaussian:m=1,sigma=2").sigma == 2
    assert parse_distribution("Normal").sigma == 1
    assert parse_distribution("staircase:K=30").label.endswith("K=30")
    for bad in ("cauchy", "gaussian:s=1", "gaussian:sigma=x", "gaussian:sigma=-1",
                "gaussian:sigma", "uniform:a=1,b=0", "staircase:K=1.5"):
        with pytest.raises(ValueError):
            parse_distribution(bad)
