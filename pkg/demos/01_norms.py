"""
Four norms of one function
==========================

The Gaussian-tailed function f(x) = sqrt(-ln x) on (0, 1) has every
moment, an exact tail exp(-u**2), and sits on the edge of the
subgaussian class.  We compute its Lebesgue, Grand Lebesgue, Luxemburg
and Lorentz norms.
"""

import numpy as np
from scipy.special import gamma

from tailnorms import (LorentzWeight, gls_norm, lorentz_norm, lp_norm, luxemburg_norm,
                       make_natural_psi, sqrt_psi, young_exp_square)
from tailnorms.measure import sqrt_log

f = sqrt_log()

# Moments come out as Gamma values after the substitution x = exp(-t)
for p in (1, 2, 4, 8):
    print(f"|f|_{p} = {lp_norm(f, p).value:.10f}   Gamma(p/2+1)^(1/p) = "
          f"{gamma(p / 2 + 1) ** (1 / p):.10f}")

# The natural psi-function p -> |f|_p grows like sqrt(p)
nu = make_natural_psi(f, 40.0)
p = np.array([1.0, 4.0, 16.0, 40.0])
print("nu(p) / sqrt(p):", np.round(nu(p) / np.sqrt(p), 4))

# so the GLS norm with psi(p) = sqrt(p) is finite; the sup sits at p = 1
rep = gls_norm(f, sqrt_psi(1.0, 60.0))
print(f"||f|| in G(sqrt) = {rep.value:.8f} at p = {rep.argmax:.4f}")

# The Orlicz space with Phi(u) = exp(u^2/2) - 1 holds the same functions;
# here the Luxemburg norm is exactly 1
rep = luxemburg_norm(f, young_exp_square())
print(f"Luxemburg norm = {rep.value:.12f}, modular at the root = {rep.certificate:.12f}")

# f is unbounded, so the Lorentz norm with v(t) = t diverges, while
# v(t) = sqrt(t) keeps it finite
print("Lorentz, v(t)=t:      ", lorentz_norm(f, LorentzWeight.power(1.0)).to_row()["value"])
rep = lorentz_norm(f, LorentzWeight.power(0.5))
print(f"Lorentz, v(t)=sqrt(t): {rep.value:.6f} at t = {rep.argmax:.3g}")
