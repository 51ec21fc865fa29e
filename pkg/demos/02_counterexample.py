"""
Light coordinates, heavy supremum
=================================

Disjoint blocks g_n = n**beta on intervals of length C n**(-4 beta - 1)
each have a small L_4 norm, yet their supremum has |.|_p of order
(4 - p)**(-1/4).  Dividing by the milder phi0(p) = (4 - p)**(-1/8) still
blows up, so the supremum leaves the weaker Grand Lebesgue space.
"""

import numpy as np
from scipy.special import zeta

from tailnorms import (CounterexampleProcess, asymptotic_table, build_spec, power_singular,
                       weaker_norm_divergence)
from tailnorms.counterexample import block, block_lp_closed_form
from tailnorms.norms import lp_norm

spec = build_spec(beta=1.0)
print(f"C(1) = {spec.C:.12f}   1/zeta(5) = {1 / zeta(5):.12f}")

# Each block: quadrature against the closed form
for n in (1, 2, 10):
    for p in (2.0, 3.9):
        q = lp_norm(block(spec, n), p).value
        print(f"n={n:2d} p={p}: quadrature {q:.12f}  closed form {block_lp_closed_form(spec, n, p):.12f}")

# |g_n|_4^4 = C / n, uniformly bounded by C
print("max_n |g_n|_4^4 over n<=1000:",
      max(block_lp_closed_form(spec, n, 4.0) ** 4 for n in range(1, 1001)))

# The supremum: (4 - p) |sup g|_p^p settles at C / beta
print("\n k   4-p        (4-p)*series   (4-p)^(1/4)*norm")
for k, p, series, width, scaled, norm, quarter in asymptotic_table(spec, 6, 20)[::2]:
    print(f"{k:2d}  {4 - p:.3e}  {scaled:.8f}     {quarter:.8f}")

# Against phi0 the ratio keeps rising, though only like (4 - p)^(-1/8)
cert = weaker_norm_divergence(spec, power_singular(0.125, 4.0))
print(f"\nverdict: {cert.verdict}, log-log slope {cert.slope:.4f}, growth k=6..20 {cert.growth:.3f}x")
long = weaker_norm_divergence(spec, power_singular(0.125, 4.0),
                              gaps=[2.0 ** -k for k in range(6, 41)])
print(f"same ratio out to k=40: growth {long.growth:.2f}x")

# With the same exponent the ratio stays bounded
print("against (4-p)^(-1/4):", weaker_norm_divergence(spec, power_singular(0.25, 4.0)).verdict)

# The process itself: one block alive at each x
proc = CounterexampleProcess(spec)
x = np.array([0.5, 0.02, 0.001])
n, v = proc.locate(x)
print("\nx:", x, " block:", n, " value:", v)
