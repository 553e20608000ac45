"""Size-biased draws get lighter as sampling progresses.

Monte Carlo estimate of E[w at draw position l] against the first-order
line 1 + (l/ell)(1 - c_hat). With a third moment above the first
(c_hat > 1) the curve slopes down: heavy items are picked early.
"""

import numpy as np

from irgraph.sbs import mean_curve
from irgraph.weights import generate_pareto_iid

n = 20000
wv = generate_pareto_iid(n, 2 / 3, 4, seed=5)
curve = mean_curve(wv, l_max=n // 10, rounds=4000, seed=8)

print(f"n = {n}, c_hat = {wv.c_hat:.4f}, rounds = {curve.rounds}")
print(f"{'l':>6} {'empirical':>10} {'stderr':>8} {'prediction':>11}")
for l in (1, 2, 5, 20, 100, 500, 1000, 2000):
    k = l - 1
    print(f"{l:>6} {curve.empirical_mean[k]:>10.4f} {curve.stderr[k]:>8.4f} {curve.prediction[k]:>11.4f}")

bins = curve.empirical_mean.reshape(10, len(curve.l) // 10).mean(axis=1)
print("\nbinned means (should decrease):")
print(np.round(bins, 4))
