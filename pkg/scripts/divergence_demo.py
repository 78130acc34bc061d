"""Raw versus compatible discretized entropies, and the infinite-entropy models.

    python scripts/divergence_demo.py
"""

import math

from altentropy.discretization import (
    Functional,
    divergence_series,
    fit_log_rate,
    parse_schedule,
)
from altentropy.distributions import (
    make_gaussian,
    make_heavy_tail_log,
    make_log_square_discrete,
    make_staircase_comb,
    make_uniform,
)
from altentropy.functionals import shannon_differential, shannon_discrete


def show(title, d, functional, schedule, fit=True):
    s = divergence_series(d, functional, parse_schedule(schedule))
    print(f"\n{title}: {functional.label} along {schedule}")
    for p, v in s.points:
        print(f"  {p:>10g}  {v:.9f}")
    if fit:
        r = fit_log_rate(s)
        print(f"  slope in log(param) {r.slope:.4f}  intercept {r.intercept:.4f}  rmse {r.rmse:.2e}")


def main():
    g = make_gaussian(0, 1)
    show("uniform(0,1)", make_uniform(0, 1), Functional("raw-shannon"), "aligned-doubling:from=2,to=1024")
    show("gaussian(0,1)", g, Functional("raw-shannon"), "window-doubling:from=4,to=64")
    show("gaussian(0,1)", g, Functional("raw-shannon"), "rated-exponential:N=10,from=6,to=14")
    show("gaussian(0,1)", g, Functional("compatible-shannon"), "window-refine:N=50,h=0.2/0.1/0.05/0.02/0.01")
    print(f"  differential entropy {0.5 * (1 + math.log(2 * math.pi)):.9f}")
    show("uniform(0,1)", make_uniform(0, 1), Functional("raw-renyi", 0.5, component="inner"),
         "aligned-doubling:from=2,to=1048576", fit=False)

    print("\ninfinite-entropy models")
    r = shannon_differential(make_heavy_tail_log())
    print(f"  heavy tail: value {r.value}, divergent {r.divergent}")
    dd = make_log_square_discrete()
    for K in (10**3, 10**4, 10**5, 10**6):
        r = shannon_discrete(dd, K)
        print(f"  log-square partial sum K={K:>8}: {r.partial:.6f} (divergent flag {r.divergent})")
    for K in (10, 100, 1000, 10000):
        print(f"  staircase K={K:>6}: {shannon_differential(make_staircase_comb(K)).value:.6f}")


if __name__ == "__main__":
    main()
