"""Walk through conditional generalized quantiles on a three-state space.

Run with:  python3 demos/demo_conditional_quantiles.py
"""

import numpy as np

import condquant as cq

sp = cq.uniform_space(3)
X = cq.rv(sp, [1.0, 2.0, 3.0])
G = cq.partition_from_labels(sp, ["A", "A", "B"])
spec = cq.risk_spec(1.0 / 3.0, cq.quadratic_loss(), cq.exp_integral_loss(1.0))

print("Payoff X on a uniform three-state space:", X.values)
print("Information partition:", G.atoms)
print()

Z = cq.conditional_generalized_quantile(X, G, spec)
print("Conditional generalized quantile (quadratic gain loss, exponential")
print("shortfall loss, alpha = 1/3):", Z.values)
print("On the atom {0,1} the minimizer sits at the smallest outcome; on the")
print("singleton atom it has to match the outcome itself.")
print()

T = cq.trivial_partition(sp)
a = float(cq.conditional_generalized_quantile(X, T, spec).values[0])
print(f"With no information the single value is a = {a:.12g};")
print(f"its stationarity residual exp(a-1)+2a-5 = "
      f"{np.exp(a - 1) + 2 * a - 5:.2e}")
print()

print("Familiar special cases on the same payoff (trivial information):")
for alpha in (0.25, 0.5, 0.75):
    var = float(cq.conditional_var(X, T, alpha).values[0])
    exp_ = float(cq.conditional_expectile(X, T, alpha).values[0])
    print(f"  alpha={alpha:4}:  left quantile {var:3}   expectile {exp_:.6f}")
print(f"  entropic gamma=1: "
      f"{float(cq.conditional_entropic(X, T, 1.0).values[0]):.6f}")
print()

print("The brute-force grid oracle agrees with the bisection solver:")
B = cq.brute_force_quantile(X, G, spec, grid_step=1e-4)
print("  solver:", Z.values, " oracle:", B.values)
