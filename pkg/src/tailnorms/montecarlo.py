"""Monte Carlo checks: tails, moments, Borel-Cantelli sums and the union bound.

Random streams
--------------
Batch ``i`` of a run with master seed ``m`` draws from
``numpy.random.SeedSequence(m, spawn_key=(i,))`` through a PCG64
generator.  Batch streams therefore do not depend on how many batches are
requested, and identical ``(m, i, count)`` reproduce identical draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .counterexample import INF, CounterexampleProcess, ProcessSpec
from .measure import UnitIntervalFunction
from .norms import distribution_function, lp_norm
from .series import Bracket, power_sum, power_tail_integral

__all__ = [
    "SampleBatch",
    "TailEstimate",
    "MomentEstimate",
    "BorelCantelliReport",
    "UnionBoundReport",
    "make_batch",
    "replicate_batches",
    "estimate_lp",
    "exact_tail",
    "tail_curve",
    "borel_cantelli_diagnostic",
    "union_bound_check",
    "dyadic_partition",
    "PartitionIndex",
    "singleton_partition",
]


@dataclass(frozen=True, eq=False)
class SampleBatch:
    seed: int
    index: int
    count: int
    x: np.ndarray
    signs: np.ndarray

    def summary(self) -> tuple:
        return (self.seed, self.index, self.count, float(self.x.sum()), int(self.signs.sum()))


def make_batch(seed: int, count: int, index: int = 0) -> SampleBatch:
    """``count`` uniform draws on (0, 1] plus fair signs, from stream ``index``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    x = 1.0 - rng.random(count)
    signs = (2 * rng.integers(0, 2, size=count) - 1).astype(np.int8)
    return SampleBatch(seed, index, count, x, signs)


def replicate_batches(seed: int, replications: int, count: int):
    for i in range(replications):
        yield make_batch(seed, count, i)


@dataclass(frozen=True)
class TailEstimate:
    u: float
    estimate: float
    stderr: float
    count: int
    exact: Optional[float] = None

    @property
    def z(self) -> float:
        if self.exact is None:
            return math.nan
        if self.stderr == 0:
            return 0.0 if self.estimate == self.exact else math.inf
        return (self.estimate - self.exact) / self.stderr


@dataclass(frozen=True)
class MomentEstimate:
    p: float
    estimate: float
    stderr: float
    count: int
    exact: Optional[float] = None


Target = Union[CounterexampleProcess, UnitIntervalFunction]


def _values(target: Target, batch: SampleBatch, signed: bool = False) -> np.ndarray:
    if isinstance(target, CounterexampleProcess):
        _, v = target.locate(batch.x)
        return v if signed else np.abs(v)
    v = np.asarray(target(batch.x), dtype=float)
    return v if signed else np.abs(v)


def estimate_lp(target: Target, p: float, batch: SampleBatch) -> MomentEstimate:
    """``(mean |g|**p)**(1/p)`` with a delta-method standard error.

    For a process the exact overlay is the certified series value; close
    to ``p = 4`` the sample moment sits well below it because the mass
    lives in blocks the sample almost never reaches.
    """
    from .counterexample import sup_lp_series

    v = _values(target, batch) ** p
    mean = float(v.mean())
    sd = float(v.std(ddof=1)) if batch.count > 1 else 0.0
    est = mean ** (1.0 / p)
    se = est / (p * mean) * sd / math.sqrt(batch.count) if mean > 0 else 0.0
    if isinstance(target, CounterexampleProcess):
        exact = sup_lp_series(target.spec, p).norm if p < 4 else math.inf
    else:
        exact = lp_norm(target, p).value
    return MomentEstimate(p, est, se, batch.count, exact)


def exact_tail(spec: ProcessSpec, u: float) -> Bracket:
    """``P(sup_n g_n > u) = sum_n Delta_n m_f(u / c_n)`` with a tail bracket."""
    if u < 0:
        return Bracket(1.0, 1.0)
    m = np.asarray(distribution_function(spec.profile, u / spec.c[1:]), dtype=float)
    partial = math.fsum(spec.delta[1:] * m)
    eps = 4.0 * spec.beta
    lo_w = float(distribution_function(spec.profile, u / ((spec.nmax + 1) ** spec.beta)))
    hi_w = float(distribution_function(spec.profile, 0.0))
    lo = spec.normalization.lower * power_tail_integral(spec.nmax + 1, eps) * lo_w
    hi = spec.normalization.upper * power_tail_integral(spec.nmax, eps) * hi_w
    return Bracket(partial + lo, partial + hi)


def _tail_from_values(v, u, exact) -> TailEstimate:
    hits = v > u
    est = float(hits.mean())
    se = math.sqrt(est * (1.0 - est) / v.size)
    return TailEstimate(float(u), est, se, int(v.size), exact)


def tail_curve(target: Target, ugrid: Sequence[float], batch: SampleBatch) -> list:
    """Empirical ``P(|target| > u)`` along ``ugrid`` with exact overlays.

    For a process the target is the envelope ``sup_n |g_n|``.
    """
    u = np.asarray(ugrid, dtype=float)
    if np.any(np.diff(u) <= 0):
        raise ValueError("ugrid must be increasing")
    v = _values(target, batch)
    out = []
    for uu in u:
        if isinstance(target, CounterexampleProcess):
            exact = exact_tail(target.spec, float(uu)).mid
        elif all(pc.tail is not None for pc in target.pieces):
            exact = float(distribution_function(target, float(uu)))
        else:
            exact = None
        out.append(_tail_from_values(v, uu, exact))
    return out


@dataclass(frozen=True)
class BorelCantelliReport:
    epsilon: float
    probabilities: np.ndarray  # P(|g_n| > eps), n = 1..nmax
    partial_sums: np.ndarray
    total: Bracket
    bound: Bracket
    holds: bool

    @property
    def tail_width(self) -> float:
        return self.total.width


def borel_cantelli_diagnostic(spec: ProcessSpec, epsilon: float) -> BorelCantelliReport:
    """Exact ``P(|g_n| > eps)``, their partial sums and the Chebyshev bound.

    The bound is ``C(beta) nu(1) sum n**(-3 beta - 1) / eps``, i.e.
    ``sum |g_n|_1 / eps``; ``holds`` requires every partial sum and the
    upper end of the total to stay below its lower end.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    m = np.asarray(distribution_function(spec.profile, epsilon / spec.c[1:]), dtype=float)
    probs = spec.delta[1:] * m
    partial = np.cumsum(probs)
    exact_partial = math.fsum(probs)
    eps4 = 4.0 * spec.beta
    lo_w = float(distribution_function(spec.profile, epsilon / ((spec.nmax + 1) ** spec.beta)))
    hi_w = float(distribution_function(spec.profile, 0.0))
    total = Bracket(
        exact_partial + spec.normalization.lower * power_tail_integral(spec.nmax + 1, eps4) * lo_w,
        exact_partial + spec.normalization.upper * power_tail_integral(spec.nmax, eps4) * hi_w,
    )
    bound = spec.normalization * power_sum(3.0 * spec.beta, spec.nmax) * (spec.nu(1.0) / epsilon)
    holds = bool(np.all(partial <= bound.lower) and total.upper <= bound.lower)
    return BorelCantelliReport(float(epsilon), probs, partial, total, bound, holds)


# ---------------------------------------------------------------- union bound


def singleton_partition(nmax: int) -> list:
    return [[n] for n in range(1, nmax + 1)] + [[INF]]


def dyadic_partition(nmax: int) -> list:
    """Cells ``{2**j, ..., 2**(j+1) - 1}`` (clipped to ``nmax``) plus ``{inf}``."""
    cells, j = [], 0
    while 2 ** j <= nmax:
        cells.append(range(2 ** j, min(2 ** (j + 1), nmax + 1)))
        j += 1
    return cells + [[INF]]


@dataclass(frozen=True)
class UnionBoundReport:
    u: float
    lhs: float
    rhs: float
    slack: float
    stderr_lhs: float
    stderr_rhs: float
    stderr_slack: float
    cells: int
    count: int

    @property
    def combined_stderr(self) -> float:
        return math.hypot(self.stderr_lhs, self.stderr_rhs)

    def holds(self, k: float = 4.0) -> bool:
        return self.lhs <= self.rhs + k * self.combined_stderr


class PartitionIndex:
    """Validated partition of ``{1..nmax, inf}``; reusable across batches."""

    def __init__(self, partition: Iterable, nmax: int):
        self.nmax = nmax
        self.owner, self.sizes = _cell_index(partition, nmax)

    def __len__(self):
        return int(self.sizes.size)


def _cell_index(partition: Iterable, nmax: int) -> tuple:
    owner = np.full(nmax + 2, -1, dtype=np.int64)  # slot nmax + 1 stands for inf
    problems = []
    sizes = []
    for k, cell in enumerate(partition):
        items = []
        for t in cell:
            if t == INF:
                items.append(nmax + 1)
            elif float(t).is_integer() and 1 <= t <= nmax:
                items.append(int(t))
            else:
                problems.append(f"{t!r} is not a point of T")
        items = np.asarray(items, dtype=np.int64)
        if items.size and np.any(owner[items] >= 0):
            problems.append(f"cell {k} overlaps an earlier cell")
        if items.size:
            owner[items] = k
        sizes.append(items.size)
    missing = np.flatnonzero(owner[1:] < 0) + 1
    if missing.size:
        problems.append(f"{missing.size} points not covered (first: {int(missing[0])})")
    if problems:
        raise ValueError("invalid partition: " + "; ".join(problems))
    return owner, np.asarray(sizes)


def union_bound_check(process: CounterexampleProcess, partition: Iterable, u: float,
                      batch: SampleBatch) -> UnionBoundReport:
    """Estimate both sides of ``P(sup_T k > u) <= sum_k P(sup_{T_k} k > u)``.

    Both sides use the same draws.  At each ``x`` only the block ``n(x)``
    is non-zero, so ``sup`` over a cell is the block value when the cell is
    ``{n(x)}``, ``max(value, 0)`` when the cell also holds other points, and
    0 when it does not contain ``n(x)``.
    """
    nmax = process.spec.nmax
    if not isinstance(partition, PartitionIndex):
        partition = PartitionIndex(partition, nmax)
    elif partition.nmax != nmax:
        raise ValueError("partition was built for a different truncation")
    owner, sizes = partition.owner, partition.sizes
    K = sizes.size
    n, v = process.locate(batch.x)
    live = (n >= 1) & (n <= nmax)
    v = np.where(live, v, 0.0)
    cell = np.where(live, owner[np.clip(n, 0, nmax + 1)], -1)
    lhs_ind = np.maximum(v, 0.0) > u

    own_size = np.where(live, sizes[np.maximum(cell, 0)], 0)
    own_sup = np.where(own_size > 1, np.maximum(v, 0.0), v)
    own_hit = live & (own_sup > u)
    others = np.where(live, K - 1, K)
    count = own_hit.astype(float) + (others if 0.0 > u else 0)

    N = batch.count
    lhs = float(lhs_ind.mean())
    rhs = float(count.mean())
    diff = count - lhs_ind
    se = lambda a: float(np.std(a, ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    return UnionBoundReport(float(u), lhs, rhs, rhs - lhs, se(lhs_ind.astype(float)), se(count),
                            se(diff), K, N)
