"""Show the quantile <-> shortfall equivalence and the loss/score conversions.

Run with:  python3 demos/demo_equivalence.py
"""

import numpy as np

import condquant as cq
from condquant import dynamic as dyn

print("Every loss pair (alpha, u1, u2) induces a score")
print("    v(x) = alpha*u1'(x) for x > 0,  -(1-alpha)*u2'(-x) for x <= 0,")
print("and the generalized quantile equals the shortfall level of v: the")
print("smallest z with E[v(X - z) | G] <= 0.")
print()

spec = cq.expectile_spec(0.8)
xs = np.linspace(-2, 2, 9)
print("Score derived from the 0.8-expectile's quadratic losses on a grid:")
print("  x:", xs)
print("  v:", spec.score(xs))
print()

rng = np.random.default_rng(0)
worst = 0.0
for _ in range(200):
    sp = dyn.random_space(rng)
    G = dyn.random_partition(rng, sp)
    X = dyn.random_rv(rng, sp)
    rep = cq.equivalence_check(X, G, spec)
    worst = max(worst, rep.max_discrepancy)
print(f"Across 200 random instances the two routes differ by at most "
      f"{worst:.2e}.")
print()

print("The conversion also runs backwards: integrating a score recovers a")
print("loss pair inducing the same measure.")
u1, u2 = cq.losses_from_score(0.5, cq.entropic_score(1.0))
back = cq.score_from_losses(0.5, u1, u2)
print("  entropic score round trip max error:",
      f"{np.max(np.abs(back(xs) - cq.entropic_score(1.0)(xs))):.2e}")
