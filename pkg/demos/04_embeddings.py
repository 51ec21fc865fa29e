"""
Which spaces are weaker?
========================

Two finite-grid tests of "significantly weaker": phi/psi blowing up at
the right end of the support (Grand Lebesgue), and Psi(lam u)/Phi(u)
dying out for every lam (Orlicz).
"""

from tailnorms import (constant_psi, gls_weaker, orlicz_weaker, power_singular, young_exp,
                       young_exp_square, young_power)

pairs = [
    ("(4-p)^(-1/8) vs 1", power_singular(0.125, 4.0), constant_psi(1.0, 1.0, 4.0)),
    ("(4-p)^(-1/4) vs (4-p)^(-1/8)", power_singular(0.25, 4.0), power_singular(0.125, 4.0)),
    ("(4-p)^(-1/8) vs (4-p)^(-1/4)", power_singular(0.125, 4.0), power_singular(0.25, 4.0)),
    ("1 vs 1", constant_psi(1.0), constant_psi(1.0)),
]
for label, phi, psi in pairs:
    v = gls_weaker(phi, psi)
    print(f"GLS    {label:32s} -> {v.verdict:12s} slope {v.slope:.4f}  {v.note}")

# The last p on the grid shows how slowly (4-p)^(-1/8) escapes
p, f, s, r = gls_weaker(*pairs[0][1:]).trace[-1]
print(f"       at p = 4 - {4 - p:.1e}: phi = {f:.2f}")

for label, Psi, Phi in [("u^2 vs exp(u^2/2)-1", young_power(2.0), young_exp_square()),
                        ("exp(u)-1 vs exp(u^2/2)-1", young_exp(), young_exp_square()),
                        ("exp(u^2/2)-1 vs u^2", young_exp_square(), young_power(2.0))]:
    print(f"Orlicz {label:32s} -> {orlicz_weaker(Psi, Phi).verdict}")
