"""
Sampling the supremum
=====================

Uniform draws on (0, 1) see the envelope sup_n g_n directly.  Tails and
low moments match the exact series; near p = 4 the sample moment falls
short because the mass sits in blocks the sample rarely visits.
"""

from tailnorms import CounterexampleProcess, build_spec, symmetrize
from tailnorms.montecarlo import (borel_cantelli_diagnostic, dyadic_partition, estimate_lp,
                                  make_batch, singleton_partition, tail_curve, union_bound_check)

spec = build_spec(1.0)
proc = CounterexampleProcess(spec)
batch = make_batch(seed=2024, count=1_000_000)

for t in tail_curve(proc, [0.5, 1.5, 2.5, 10.0], batch):
    print(f"P(sup g > {t.u:4}) ~ {t.estimate:.6f} +- {t.stderr:.6f}   exact {t.exact:.6f}")

for p in (1.0, 2.0, 3.0, 3.9):
    m = estimate_lp(proc, p, batch)
    print(f"|sup g|_{p}: sample {m.estimate:.4f} +- {m.stderr:.4f}   series {m.exact:.4f}")

# Borel-Cantelli: the exceedance probabilities are summable
for eps in (0.5, 10.0):
    r = borel_cantelli_diagnostic(spec, eps)
    print(f"eps={eps}: sum P(g_n > eps) = {r.total.mid:.8f} <= {r.bound.mid:.6f}")

# Union bound over a partition of the index set; singletons make it tight
sym = symmetrize(proc, seed=3)
for name, part in (("singleton", singleton_partition(spec.nmax)),
                   ("dyadic", dyadic_partition(spec.nmax))):
    for u in (-0.5, 1.5):
        r = union_bound_check(sym, part, u, batch)
        print(f"{name:9s} u={u:4}: lhs {r.lhs:.6f}  rhs {r.rhs:10.6f}  slack {r.slack:.6f}")
