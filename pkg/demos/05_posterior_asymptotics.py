"""Where the posterior mass sits as n grows: the exponent root alpha_n.

The deterministic exponent surrogate kappa(a) = n a log n -
(n/2) n^{2(a-h)} F(a) peaks at alpha_n = h - F'(h)/(4 log^2 n) + ..., so
the surrogate peak drifts left of the truth (F' > 0) at the 1/log^2 n
scale.  The exact posterior does not inherit that drift: the determinant
term it carries shifts the mode by the opposite amount, since
(log G)' = -F' identically.  Both effects are shown below.

Run: python3 demos/05_posterior_asymptotics.py  (about a minute)
"""
import math

import numpy as np

from hurstbayes import (f_ratio_derivatives, map_estimate, normal_approx_cdf,
                        posterior_grid, replicate_rng, sample_fgn,
                        solve_alpha_n)
from hurstbayes.harness import exponent_peak

H = 0.7
deriv = f_ratio_derivatives(H - 0.5, H).d1
print(f"h = {H}: F'(h) = {deriv:+.4f} > 0, so alpha_n < h\n")

print(f"{'n':>9} {'alpha_n - h':>12} {'-F p/(4 log^2 n)':>17} {'pred. sd':>10}")
for n in (10**3, 10**4, 10**5, 10**6):
    s = solve_alpha_n(n, H)
    first_order = -deriv / (4.0 * math.log(n) ** 2)
    print(f"{n:>9} {s.alpha_n - H:>+12.6f} {first_order:>+17.6f} "
          f"{s.predicted_sd:>10.6f}")

summary = solve_alpha_n(4096, H)
print(f"\nnormal approximation at n = 4096: "
      f"CDF at alpha_n = {normal_approx_cdf(summary.alpha_n, summary, 4096):.3f}, "
      f"at alpha_n + 2 sd = "
      f"{normal_approx_cdf(summary.alpha_n + 2 * summary.predicted_sd, summary, 4096):.3f}")

# Monte Carlo: per path, the determinant-free exponent peak drifts left,
# the exact-posterior MAP does not
N, PATHS = 1024, 10
maps, peaks = [], []
for p in range(PATHS):
    y = sample_fgn(H, N, rng=replicate_rng(99, p)).increments
    maps.append(map_estimate(posterior_grid(y)))
    peaks.append(exponent_peak(y, H, N, deriv))
print(f"\n{PATHS} paths at n = {N}:")
print(f"  mean exact MAP - h:            {np.mean(maps) - H:+.5f}")
print(f"  mean determinant-free peak - h: {np.mean(peaks) - H:+.5f}")
print(f"  (alpha_n - h at this n:         {solve_alpha_n(N, H).alpha_n - H:+.5f})")
