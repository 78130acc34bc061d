import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from altentropy.discretization import (
    Aligned,
    ConvergenceSeries,
    Functional,
    Rated,
    Window,
    compatible_renyi,
    compatible_shannon,
    discretize,
    divergence_series,
    fit_log_rate,
    parse_partition,
    parse_schedule,
    raw_renyi,
    raw_shannon,
)
from altentropy.distributions import (
    make_exponential,
    make_gaussian,
    make_quartic_exp,
    make_rational_decay,
    make_uniform,
)
from altentropy.functionals import alt_shannon, shannon_differential

H_GAUSS = 0.5 * (1 + math.log(2 * math.pi))
U = make_uniform(0, 1)
G = make_gaussian(0, 1)


def test_discretize_examples():
    dd = discretize(U, Aligned(0, 1, 4))
    assert np.allclose(dd.increments, 0.25, atol=1e-15)
    assert dd.left_tail == 0 and dd.right_tail == 0
    dd = discretize(G, Window(8, 1))
    assert math.fsum(dd.increments) == pytest.approx(1 - 2 * special.ndtr(-8), abs=1e-10)
    assert discretize(make_exponential(1), Window(4, 0.5)).left_tail == 0


def test_window_snaps_width():
    w = Window(1, 0.3)
    x = w.nodes()
    assert x[0] == -1 and x[-1] == 1
    assert np.allclose(np.diff(x), 2 / 7)


def test_raw_shannon_examples():
    assert raw_shannon(discretize(U, Aligned(0, 1, 4))) == pytest.approx(math.log(4), abs=1e-12)
    assert raw_shannon(discretize(U, Aligned(0, 1, 1))) == 0
    v = raw_shannon(discretize(G, Window(16, 1 / 16))) - math.log(16)
    assert v == pytest.approx(H_GAUSS, abs=0.02)


def test_compatible_shannon_examples():
    assert compatible_shannon(discretize(U, Aligned(0, 1, 64))) == pytest.approx(0, abs=1e-12)
    assert compatible_shannon(discretize(G, Window(100, 0.01))) == pytest.approx(H_GAUSS, abs=1e-3)
    dd = discretize(make_exponential(0.5), Window(50, 0.02))
    assert compatible_shannon(dd, "abs") == pytest.approx(math.log(2), abs=2e-3)


def test_compatible_log1p_and_literal():
    dd = discretize(G, Window(100, 0.01))
    h3 = alt_shannon(G, "log1p").value
    assert compatible_shannon(dd, "log1p") == pytest.approx(h3, abs=1e-3)
    # the literal prelimit tends to 1 - H instead
    assert compatible_shannon(dd, "log1p", literal=True) == pytest.approx(1 - H_GAUSS, abs=1e-3)


def test_compatible_rejects_mixed_widths_and_bad_form():
    dd = discretize(U, Aligned(0, 1, 4))
    with pytest.raises(ValueError):
        compatible_shannon(dd, "scaled")
    mixed = type(dd)(np.array([0, 0.5, 1.0, 2.0]), np.array([0.5, 0.5, 0.0]),
                     np.array([0.5, 0.5, 1.0]), 0.0, 0.0)
    with pytest.raises(ValueError):
        compatible_shannon(mixed)


def test_raw_renyi_examples():
    dd = discretize(U, Aligned(0, 1, 16))
    assert raw_renyi(dd, 0.5).entropy_value == pytest.approx(math.log(16), abs=1e-12)
    assert raw_renyi(dd, 2).inner_sum == pytest.approx(1 / 16, abs=1e-15)
    one = discretize(U, Aligned(0, 1, 1))
    for a in (0.3, 3):
        assert raw_renyi(one, a).entropy_value == 0


def test_compatible_renyi_examples():
    r = compatible_renyi(discretize(U, Aligned(0, 1, 32)), 0.7)
    assert r.entropy_value == pytest.approx(0, abs=1e-12) and r.inner_sum == pytest.approx(1)
    r = compatible_renyi(discretize(G, Window(100, 0.01)), 2)
    assert r.inner_sum == pytest.approx(1 / (2 * math.sqrt(math.pi)), abs=1e-3)
    r = compatible_renyi(discretize(make_exponential(1), Window(100, 0.01)), 2)
    assert r.entropy_value == pytest.approx(math.log(2), abs=2e-3)


def test_cells_with_zero_mass_contribute_nothing():
    dd = discretize(make_uniform(0, 1), Window(4, 0.5))
    assert (dd.increments == 0).sum() == 14
    assert compatible_shannon(dd) == pytest.approx(0, abs=1e-14)
    assert compatible_shannon(dd, "log1p") == pytest.approx(math.log(2), abs=1e-14)
    assert raw_shannon(dd) == pytest.approx(math.log(2), abs=1e-14)
    assert compatible_renyi(dd, 0.5).inner_sum == pytest.approx(1, abs=1e-14)


def test_uniform_log_law_series():
    s = divergence_series(U, Functional("raw-shannon"), parse_schedule("aligned-doubling:from=2,to=1024"))
    assert np.allclose(s.values, np.log(s.params), atol=1e-12, rtol=0)
    fit = fit_log_rate(s)
    assert fit.slope == pytest.approx(1, abs=1e-12)
    assert fit.intercept == pytest.approx(0, abs=1e-12)
    assert fit.rmse < 1e-12


def test_gaussian_log_law_series():
    s = divergence_series(G, Functional("raw-shannon"), parse_schedule("window-range:from=4,to=64"))
    assert np.all(np.diff(s.values) > 0)
    assert s.values[-1] - math.log(64) == pytest.approx(H_GAUSS, abs=0.05)
    fit = fit_log_rate(s)
    assert fit.slope == pytest.approx(1, abs=0.05)
    assert fit.intercept == pytest.approx(1.419, abs=0.05)


def test_rated_series_affine_in_j():
    s = divergence_series(G, Functional("raw-shannon"), parse_schedule("rated-exponential:N=10,from=4,to=14"))
    # oracle: cell width 20/C, so raw entropy ≈ H + log C - log 20
    assert s.values[-1] == pytest.approx(H_GAUSS + math.log(2**14 / 20), abs=1e-6)
    slope = fit_log_rate(s).slope
    assert slope >= 0.45


def test_compatible_beats_raw():
    sched = parse_schedule("window-refine:N=30,h=0.2/0.1/0.05/0.02")
    comp = divergence_series(G, Functional("compatible-shannon"), sched)
    raw = divergence_series(G, Functional("raw-shannon"), sched)
    err = np.abs(comp.values - H_GAUSS)
    assert np.all(np.diff(err) < 0)
    assert np.all(np.diff(raw.values) > 0)


def test_renyi_inner_sum_directions():
    sched = [Aligned(0, 1, 2**j) for j in range(1, 13)]
    up = divergence_series(U, Functional("raw-renyi", 0.5, component="inner"), sched).values
    down = divergence_series(U, Functional("raw-renyi", 2.0, component="inner"), sched).values
    assert np.all(np.diff(up) > 0) and np.all(np.diff(down) < 0)
    for a in (0.5, 2.0):
        ent = divergence_series(U, Functional("raw-renyi", a), sched).values
        assert np.all(np.diff(ent) > 0)


@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_compatible_renyi_inner_matches_integral(alpha):
    g = (2 * math.pi) ** ((1 - alpha) / 2) / math.sqrt(alpha)
    e = 1 / alpha
    assert compatible_renyi(discretize(G, Window(100, 0.01)), alpha).inner_sum == pytest.approx(g, abs=1e-3)
    assert compatible_renyi(discretize(make_exponential(1), Window(100, 0.01)), alpha).inner_sum == \
        pytest.approx(e, abs=1e-3)


def test_tail_terms_vanish():
    gaps = [raw_shannon(dd, True) - raw_shannon(dd, False)
            for dd in (discretize(G, Window(N, 1 / N)) for N in (2, 3, 4, 6))]
    assert all(g >= 0 for g in gaps)
    assert np.all(np.diff(gaps) < 0) and gaps[-1] < 1e-6


def test_series_records_failures():
    class Boom:
        label = "boom"

        def __call__(self, dd):
            if len(dd.increments) > 8:
                raise ArithmeticError("too fine")
            return 1.0

    s = divergence_series(U, Boom(), [Aligned(0, 1, n) for n in (2, 4, 8, 16)])
    assert [p for p, _ in s.points] == [2, 4, 8] and 16.0 in s.errors


def test_fit_validation():
    with pytest.raises(ValueError):
        fit_log_rate(ConvergenceSeries([(1, 0), (2, 1)], "x"))
    with pytest.raises(ValueError):
        fit_log_rate(ConvergenceSeries([(-1, 0), (2, 1), (3, 2)], "x"))
    with pytest.raises(ValueError):
        ConvergenceSeries([(1, 0), (1, 1), (3, 2)], "x")
    const = fit_log_rate(ConvergenceSeries([(1, 3), (2, 3), (5, 3)], "x"))
    assert const.slope == pytest.approx(0, abs=1e-14)


def test_parse_partition():
    assert parse_partition("aligned:a=0,b=1,n=64") == Aligned(0, 1, 64)
    assert parse_partition("window:N=100,h=0.01") == Window(100, 0.01)
    assert parse_partition("rated:N=10,C=4096") == Rated(10, 4096)
    for bad in ("grid:n=4", "aligned:a=1,b=0,n=4", "window:N=1", "window:N=1,h=5",
                "rated:N=10,C=0", "aligned:a=0,b=1,n=4,z=2"):
        with pytest.raises(ValueError):
            parse_partition(bad)


def test_parse_schedule():
    assert [s.n for s in parse_schedule("aligned-doubling:from=2,to=16")] == [2, 4, 8, 16]
    assert [s.C for s in parse_schedule("rated-exponential:N=10,from=6,to=8")] == [64, 128, 256]
    assert [s.h for s in parse_schedule("window-doubling:from=4,to=16")] == [0.25, 0.125, 0.0625]
    with pytest.raises(ValueError):
        parse_schedule("aligned-doubling:from=16,to=2")


MODELS = [G, make_exponential(0.3), U, make_rational_decay(), make_quartic_exp()]


@settings(max_examples=40, deadline=None)
@given(i=st.integers(0, len(MODELS) - 1), N=st.floats(0.5, 60), cells=st.integers(1, 3000))
def test_mass_conservation(i, N, cells):
    dd = discretize(MODELS[i], Window(N, 2 * N / cells))
    assert abs(dd.total - 1) <= 1e-10
    assert np.all(dd.increments >= 0)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 4096))
def test_uniform_raw_is_log_n(n):
    assert raw_shannon(discretize(U, Aligned(0, 1, n))) == pytest.approx(math.log(n), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 2000), alpha=st.floats(0.05, 6).filter(lambda a: abs(a - 1) > 1e-3))
def test_raw_renyi_nonnegative_and_compatible_shift(n, alpha):
    dd = discretize(G, Window(10, 20 / n))
    raw, comp = raw_renyi(dd, alpha), compatible_renyi(dd, alpha)
    assert raw.entropy_value >= -1e-12
    # the two differ exactly by the log cell width
    assert comp.entropy_value - raw.entropy_value == pytest.approx(math.log(20 / n), abs=1e-9)
