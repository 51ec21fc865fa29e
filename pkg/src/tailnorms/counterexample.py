"""Disjoint-block process on T = {1, 2, ..., inf} with light coordinates and
a heavy supremum.

Block ``n`` is ``c_n * f`` transplanted onto ``[a(n+1), a(n))`` where

    c_n = n**beta,   Delta_n = C(beta) n**(-4 beta - 1),   a(n) = sum_{m >= n} Delta_m,

and ``C(beta)`` normalises the total mass to 1.  Every ``|g_n|_p`` with
``p <= 4`` is bounded by ``C(beta) nu(4)**4`` while the supremum
``sup_n g_n`` has ``|.|_p ~ (4 - p)**(-1/4)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import measure
from .measure import DEFAULT_QUADRATURE, QuadratureConfig, UnitIntervalFunction
from .norms import NormReport, gls_norm, lp_norm
from .psi import (
    INCONCLUSIVE,
    PsiFunction,
    log_slope,
)
from .series import Bracket, power_sum, power_tail_integral

__all__ = [
    "MetricSpaceT",
    "ProcessSpec",
    "CounterexampleProcess",
    "SeriesValue",
    "DivergenceCertificate",
    "build_spec",
    "block",
    "block_lp_closed_form",
    "sup_lp_series",
    "theta",
    "gls_continuity_modulus",
    "symmetrize",
    "weaker_norm_divergence",
    "asymptotic_grid",
    "asymptotic_table",
    "richardson_limit",
]

INF = math.inf


class MetricSpaceT:
    """``{1, ..., nmax, inf}`` with ``d(i, j) = |1/i - 1/j|`` (``1/inf = 0``)."""

    def __init__(self, nmax: int):
        if nmax < 1:
            raise ValueError("nmax must be >= 1")
        self.nmax = int(nmax)

    def points(self):
        return list(range(1, self.nmax + 1)) + [INF]

    def __contains__(self, t) -> bool:
        return t == INF or (float(t).is_integer() and 1 <= t <= self.nmax)

    def distance(self, i, j) -> float:
        for t in (i, j):
            if t not in self:
                raise ValueError(f"{t!r} is not a point of T")
        if i == j:
            return 0.0
        return abs(1.0 / i - 1.0 / j)


@dataclass(frozen=True, eq=False)
class ProcessSpec:
    beta: float
    profile: UnitIntervalFunction
    nmax: int
    normalization: Bracket
    c: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    profile_tag: dict = field(default_factory=dict)
    cfg: QuadratureConfig = DEFAULT_QUADRATURE
    _nu_cache: dict = field(default_factory=dict, repr=False)

    # sequences are stored 1-based: index 0 is unused padding
    @property
    def C(self) -> float:
        return self.normalization.mid

    def c_n(self, n: int) -> float:
        return float(self.c[n])

    def delta_n(self, n: int) -> float:
        return float(self.delta[n])

    def a_n(self, n: int) -> float:
        return float(self.a[n])

    def nu(self, p: float) -> float:
        """Natural function of the profile, ``|f|_p``."""
        p = float(p)
        if p not in self._nu_cache:
            rep = lp_norm(self.profile, p, self.cfg)
            if rep.divergent:
                raise ArithmeticError(f"profile is not in L_{p:g}")
            self._nu_cache[p] = rep.value
        return self._nu_cache[p]

    def to_record(self, seed: Optional[int] = None) -> dict:
        rec = {"beta": self.beta, "profile": dict(self.profile_tag), "nmax": self.nmax}
        if seed is not None:
            rec["seed"] = seed
        return rec


def build_spec(beta: float, f: Optional[UnitIntervalFunction] = None, nmax: int = 100_000,
               cfg: QuadratureConfig = DEFAULT_QUADRATURE,
               profile_tag: Optional[dict] = None) -> ProcessSpec:
    """Sequences ``c_n``, ``Delta_n``, ``a(n)`` and the normalisation ``C(beta)``.

    ``1 / C(beta) = sum n**(-4 beta - 1)`` is a partial sum to ``nmax`` plus
    the integral-test bracket; ``a(n)`` are suffix sums accumulated from the
    small end, with the midpoint of the same bracket standing in for the
    terms beyond ``nmax``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive (the normalising series diverges otherwise)")
    if nmax < 10:
        raise ValueError("nmax must be >= 10")
    f = measure.constant(1.0) if f is None else f
    if f.gap_value != 0.0:
        raise ValueError("profile must vanish off its pieces")
    rep4 = lp_norm(f, 4.0, cfg)
    if rep4.divergent or rep4.value == 0.0:
        raise ValueError("profile must be a non-zero element of L_4")

    eps = 4.0 * beta
    total = power_sum(eps, nmax)
    n = np.arange(1, nmax + 1, dtype=float)
    terms = np.exp(-(1.0 + eps) * np.log(n))
    tail_mid = 0.5 * (power_tail_integral(nmax + 1, eps) + power_tail_integral(nmax, eps))
    suffix = np.cumsum(terms[::-1])[::-1] + tail_mid
    C = 1.0 / total.mid

    pad = np.array([np.nan])
    c = np.concatenate([pad, np.power(n, beta)])
    delta = np.concatenate([pad, C * terms])
    a = np.concatenate([pad, C * suffix, [C * tail_mid]])
    a[1] = 1.0
    tag = profile_tag if profile_tag is not None else {"tag": f.label}
    return ProcessSpec(float(beta), f, int(nmax), total.reciprocal(), c, delta, a, tag, cfg,
                       {4.0: rep4.value})


def block(spec: ProcessSpec, n: int) -> UnitIntervalFunction:
    """``g_n``: ``c_n f((a(n) - x) / Delta_n)`` on ``[a(n+1), a(n))``.

    The local variable runs from the right end of the support so the
    profile's domain stays (0, 1).
    """
    if not 1 <= n <= spec.nmax:
        raise IndexError(f"block index {n} outside 1..{spec.nmax}")
    return measure.block(spec.profile, spec.a_n(n + 1), spec.a_n(n), spec.c_n(n))


def block_lp_closed_form(spec: ProcessSpec, n: int, p: float) -> float:
    """``|g_n|_p = [C(beta) n**(p beta - 4 beta - 1)]**(1/p) nu(p)``."""
    if not 1.0 <= p <= 4.0:
        raise ValueError("closed form is stated for 1 <= p <= 4")
    b = spec.beta
    return (spec.C * n ** (p * b - 4.0 * b - 1.0)) ** (1.0 / p) * spec.nu(p)


@dataclass(frozen=True)
class SeriesValue:
    """``|sup_n g_n|_p**p`` with a certified bracket."""

    p: float
    bracket: Bracket
    divergent: bool = False

    @property
    def value(self) -> float:
        return math.inf if self.divergent else self.bracket.mid

    @property
    def norm(self) -> float:
        """``|sup_n g_n|_p``."""
        return math.inf if self.divergent else self.value ** (1.0 / self.p)

    @property
    def norm_bracket(self) -> Bracket:
        return self.bracket.power(1.0 / self.p)


def sup_lp_series(spec: ProcessSpec, p: float, gap: Optional[float] = None) -> SeriesValue:
    """``sum_n |g_n|_p**p = C(beta) nu(p)**p sum_n n**(-1 - beta (4 - p))``.

    By disjointness this is ``|sup_n g_n|_p**p``.  ``gap`` may pass ``4 - p``
    exactly when ``p`` itself has been rounded.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    gap = 4.0 - p if gap is None else float(gap)
    if gap <= 0:
        return SeriesValue(p, Bracket(math.inf, math.inf), True)
    s = power_sum(spec.beta * gap, spec.nmax)
    return SeriesValue(p, spec.normalization * s * spec.nu(p) ** p)


class CounterexampleProcess:
    """The process ``theta(t) = eps(t) g_t`` with ``theta(inf) = 0``.

    ``signs`` is ``None`` for the unsymmetrised process.
    """

    def __init__(self, spec: ProcessSpec, signs: Optional[np.ndarray] = None, seed=None):
        self.spec = spec
        self.seed = seed
        if signs is not None:
            signs = np.asarray(signs, dtype=np.int8)
            if signs.shape != (spec.nmax + 1,) or not np.all(np.abs(signs[1:]) == 1):
                raise ValueError("signs must be +-1 for n = 1..nmax (index 0 unused)")
        self.signs = signs
        self.space = MetricSpaceT(spec.nmax)

    @property
    def symmetrized(self) -> bool:
        return self.signs is not None

    def sign(self, n: int) -> int:
        return 1 if self.signs is None else int(self.signs[n])

    def block(self, n: int) -> UnitIntervalFunction:
        g = block(self.spec, n)
        return g if self.sign(n) == 1 else g.scaled(-1.0)

    def envelope(self, nblocks: Optional[int] = None) -> UnitIntervalFunction:
        """``sup_n |g_n| = sum_n |g_n|`` over the first ``nblocks`` blocks."""
        nblocks = self.spec.nmax if nblocks is None else nblocks
        return measure.block_union([block(self.spec, n) for n in range(1, nblocks + 1)])

    def locate(self, x) -> tuple:
        """Block index carrying each ``x`` (0 when none) and ``theta`` there.

        Points below ``a(nmax + 1)`` belong to blocks past the truncation
        and get index ``nmax + 1`` and value 0.
        """
        spec = self.spec
        x = np.asarray(x, dtype=float)
        asc = spec.a[1:][::-1]
        idx = np.searchsorted(asc, x, side="right")
        n = spec.nmax + 1 - idx
        live = (n >= 1) & (n <= spec.nmax)
        n = np.where(idx == 0, spec.nmax + 1, n)
        n = np.where(live | (n == spec.nmax + 1), n, 0)
        vals = np.zeros(x.shape)
        if np.any(live):
            k = n[live]
            hi, lo = spec.a[k], spec.a[k + 1]
            s = (hi - x[live]) / (hi - lo)
            v = spec.c[k] * np.asarray(spec.profile(s), dtype=float)
            if self.signs is not None:
                v = v * self.signs[k]
            vals[live] = v
        return n, vals

    def __call__(self, t, x):
        return theta(self, t, x)


def theta(process: CounterexampleProcess, t, x):
    """``theta(t)(x)``: the (signed) block ``g_t`` for finite ``t``, 0 at ``inf``."""
    if t not in process.space:
        raise ValueError(f"{t!r} is not a point of T")
    x = np.asarray(x, dtype=float)
    if t == INF:
        out = np.zeros(x.shape)
        return out if out.ndim else 0.0
    return process.block(int(t))(x)


def symmetrize(process: CounterexampleProcess, seed) -> CounterexampleProcess:
    """Attach independent fair signs ``eps(n)`` drawn from ``default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    signs = np.zeros(process.spec.nmax + 1, dtype=np.int8)
    signs[1:] = 2 * rng.integers(0, 2, size=process.spec.nmax, dtype=np.int8) - 1
    return CounterexampleProcess(process.spec, signs, seed)


def gls_continuity_modulus(process, psi: PsiFunction, n, s=INF,
                           cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> NormReport:
    """``||theta(n) - theta(s)||_{G psi}``.

    The difference of two distinct blocks is the disjoint union of
    ``theta(n)`` and ``-theta(s)``, so its L_p norms add in the p-th power.
    """
    if not isinstance(process, CounterexampleProcess):
        process = CounterexampleProcess(process)
    if n == s:
        return NormReport(0.0, "gls", 0.0, None)
    if n == INF:
        n, s = s, n
    if s == INF:
        return gls_norm(process.block(int(n)), psi, cfg)
    diff = measure.block_union([process.block(int(n)), process.block(int(s)).scaled(-1.0)])
    return gls_norm(diff, psi, cfg)


def asymptotic_grid(kmin: int = 6, kmax: int = 20) -> list:
    """``[(k, p_k, 4 - p_k)]`` with ``p_k = 4 - 2**-k``."""
    return [(k, 4.0 - 2.0 ** -k, 2.0 ** -k) for k in range(kmin, kmax + 1)]


def asymptotic_table(spec: ProcessSpec, kmin: int = 6, kmax: int = 20) -> list:
    """Rows ``(k, p, series, rel_width, (4-p) * series, norm, (4-p)**(1/4) * norm)``."""
    rows = []
    for k, p, h in asymptotic_grid(kmin, kmax):
        sv = sup_lp_series(spec, p, gap=h)
        rows.append((k, p, sv.value, sv.bracket.rel_width, h * sv.value, sv.norm,
                     h ** 0.25 * sv.norm))
    return rows


def richardson_limit(h: Sequence[float], values: Sequence[float]) -> float:
    """Limit as ``h -> 0`` from the last two points, assuming ``v = L + O(h)``."""
    h1, h2 = h[-2], h[-1]
    v1, v2 = values[-2], values[-1]
    return (h1 * v2 - h2 * v1) / (h1 - h2)


@dataclass(frozen=True)
class DivergenceCertificate:
    verdict: str  # "divergent", "bounded" or "inconclusive"
    rows: tuple   # (p, sup-norm, phi(p), ratio)
    slope: float
    growth: float

    @property
    def certified(self) -> bool:
        return self.verdict == "divergent"


def weaker_norm_divergence(spec: ProcessSpec, phi: PsiFunction,
                           pgrid: Optional[Sequence[float]] = None, *,
                           gaps: Optional[Sequence[float]] = None, window: int = 10,
                           threshold: float = 1e6, min_slope: float = 1e-3
                           ) -> DivergenceCertificate:
    """Certify ``|| sup_n g_n ||_{G phi} = inf`` from the series.

    The ratio ``|sup g|_p / phi(p)`` must increase strictly over the last
    ``window`` grid points and either exceed ``threshold`` or grow like a
    power of ``1 / (4 - p)`` with log-log slope above ``min_slope``.  A
    strictly decreasing or flat tail gives ``"bounded"``.
    """
    if gaps is None:
        if pgrid is None:
            gaps = [h for _, _, h in asymptotic_grid()]
        else:
            gaps = [4.0 - p for p in pgrid]
    gaps = np.asarray(gaps, dtype=float)
    if gaps.size < window:
        raise ValueError(f"grid needs at least {window} points")
    rows = []
    for h in gaps:
        p = 4.0 - h
        sv = sup_lp_series(spec, p, gap=h)
        ph = float(phi(p))
        rows.append((p, sv.norm, ph, sv.norm / ph))
    ratio = np.asarray([r[3] for r in rows])
    tail = ratio[-window:]
    slope = log_slope(1.0 / gaps[-window:], tail)
    growth = float(ratio[-1] / ratio[0])
    increasing = bool(np.all(np.diff(tail) > 0))
    if increasing and (tail[-1] > threshold or slope > min_slope):
        verdict = "divergent"
    elif abs(slope) <= min_slope or bool(np.all(np.diff(tail) <= 0)):
        verdict = "bounded"
    else:
        verdict = INCONCLUSIVE
    return DivergenceCertificate(verdict, tuple(rows), slope, growth)
