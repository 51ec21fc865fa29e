"""Psi-functions (generators of Grand Lebesgue Spaces) and Young functions.

Both families can be written to and read from small tagged records, e.g.
``{"family": "power-singular", "beta": 0.125, "b": 4.0}``, which is the
form used by the command line front end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "PsiFunction",
    "YoungFunction",
    "Verdict",
    "power_singular",
    "constant_psi",
    "degenerate",
    "sqrt_psi",
    "custom_psi",
    "make_natural_psi",
    "young_power",
    "young_exp_square",
    "young_exp",
    "young_custom",
    "psi_from_record",
    "young_from_record",
    "endpoint_grid",
    "log_slope",
    "gls_weaker",
    "orlicz_weaker",
    "WEAKER",
    "NOT_WEAKER",
    "INCONCLUSIVE",
]

WEAKER = "weaker"
NOT_WEAKER = "not-weaker"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class PsiFunction:
    """A psi-function on ``[a, b]``, equal to ``+inf`` outside.

    ``closed_right`` tells whether ``b`` itself belongs to the support
    (false for the singular power family, where psi(b) is infinite anyway).
    """

    a: float
    b: float
    family: str
    params: dict
    evaluator: Callable = field(repr=False)
    closed_right: bool = True

    def __call__(self, p):
        if self.family == "degenerate":
            return self.evaluator(p)
        p_arr = np.asarray(p, dtype=float)
        inside = (p_arr >= self.a) & (
            (p_arr <= self.b) if self.closed_right else (p_arr < self.b)
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(inside, self.evaluator(np.where(inside, p_arr, self.a)), np.inf)
        return vals if vals.ndim else float(vals)

    @property
    def is_degenerate(self) -> bool:
        return self.family == "degenerate"

    def to_record(self) -> dict:
        if self.family == "natural":
            raise ValueError("natural psi-functions are not serialisable")
        return {"family": self.family, **self.params}


def power_singular(beta: float, b: float) -> PsiFunction:
    """``(b - p)**(-beta)`` on ``[1, b)``."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if not 1.0 < b < math.inf:
        raise ValueError("right endpoint must satisfy 1 < b < inf")
    beta, b = float(beta), float(b)
    return PsiFunction(1.0, b, "power-singular", {"beta": beta, "b": b},
                       lambda p: np.power(b - np.asarray(p, dtype=float), -beta),
                       closed_right=False)


def constant_psi(value: float = 1.0, a: float = 1.0, b: float = 4.0) -> PsiFunction:
    if value <= 0:
        raise ValueError("psi-functions must be bounded away from zero")
    value = float(value)
    return PsiFunction(float(a), float(b), "constant", {"value": value, "a": a, "b": b},
                       lambda p: np.full(np.shape(p), value) if np.ndim(p) else value)


def degenerate(r: float) -> PsiFunction:
    """Equal to 1 at ``p = r`` and ``+inf`` elsewhere; its GLS is plain L_r."""
    r = float(r)
    if r < 1:
        raise ValueError("r must be >= 1")

    def ev(p):
        p = np.asarray(p, dtype=float)
        out = np.where(p == r, 1.0, np.inf)
        return out if out.ndim else float(out)

    return PsiFunction(r, r, "degenerate", {"r": r}, ev)


def sqrt_psi(a: float = 1.0, b: float = math.inf) -> PsiFunction:
    """``sqrt(p)``: the generator of the subgaussian space."""
    return PsiFunction(float(a), float(b), "sqrt", {"a": a, "b": b},
                       lambda p: np.sqrt(np.asarray(p, dtype=float)))


def custom_psi(fn: Callable, a: float, b: float, closed_right: bool = True,
               check_points: int = 257) -> PsiFunction:
    """Wrap ``fn``; positivity of the infimum is checked on a sample grid."""
    if not 1.0 <= a < b:
        raise ValueError("support must satisfy 1 <= a < b")
    hi = b if math.isfinite(b) else a + 100.0
    grid = np.linspace(a, hi, check_points)
    if not closed_right:
        grid = grid[:-1]
    vals = np.asarray([fn(p) for p in grid], dtype=float)
    if not np.all(vals > 0):
        raise ValueError("psi-function must be strictly positive on its support")
    return PsiFunction(float(a), float(b), "custom", {"a": a, "b": b}, fn, closed_right)


def make_natural_psi(f, pmax: float, cfg=None) -> PsiFunction:
    """The natural function ``p -> |f|_p`` on ``[1, pmax]``.

    Raises :class:`~tailnorms.norms.DivergenceError` if ``|f|_pmax`` is
    infinite.  Values are cached per exponent.
    """
    from .measure import DEFAULT_QUADRATURE
    from .norms import DivergenceError, lp_norm

    cfg = cfg or DEFAULT_QUADRATURE
    top = lp_norm(f, pmax, cfg)
    if top.divergent:
        raise DivergenceError(f"|f|_{pmax:g} is infinite", top)
    cache = {float(pmax): top.value}

    def nu(p):
        def one(q):
            q = float(q)
            if q not in cache:
                cache[q] = lp_norm(f, q, cfg).value
            return cache[q]

        if np.ndim(p):
            return np.asarray([one(q) for q in np.ravel(p)]).reshape(np.shape(p))
        return one(p)

    return PsiFunction(1.0, float(pmax), "natural", {"pmax": pmax}, nu)


# ---------------------------------------------------------------- Young functions


@dataclass(frozen=True, eq=False)
class YoungFunction:
    """Even convex Phi with Phi(0) = 0, increasing to infinity.

    ``log_evaluator`` returns ``log Phi(u)`` for ``u > 0`` without
    overflow; when absent it is derived from ``evaluator``.
    """

    family: str
    params: dict
    evaluator: Callable = field(repr=False)
    log_evaluator: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        u = np.linspace(0.0, 8.0, 161)
        vals = np.asarray(self(u), dtype=float)
        if vals[0] != 0.0:
            raise ValueError("Young function must vanish at 0")
        if not np.all(np.diff(vals) > 0):
            raise ValueError("Young function must be strictly increasing on [0, inf)")
        second = vals[2:] - 2 * vals[1:-1] + vals[:-2]
        if np.any(second < -1e-9 * np.maximum(1.0, np.abs(vals[1:-1]))):
            raise ValueError("Young function failed the sampled convexity check")

    def __call__(self, u):
        return self.evaluator(np.abs(np.asarray(u, dtype=float)))

    def log(self, u):
        u = np.abs(np.asarray(u, dtype=float))
        if self.log_evaluator is not None:
            return self.log_evaluator(u)
        with np.errstate(divide="ignore", over="ignore"):
            return np.log(self.evaluator(u))

    def to_record(self) -> dict:
        if self.family == "custom":
            raise ValueError("custom Young functions are not serialisable")
        return {"family": self.family, **self.params}


def young_power(p: float) -> YoungFunction:
    if p < 1:
        raise ValueError("u**p is convex only for p >= 1")
    p = float(p)
    return YoungFunction("power", {"p": p}, lambda u: np.power(u, p),
                         lambda u: p * np.log(u))


def _log_expm1(x):
    # log(exp(x) - 1), stable for tiny and huge x
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        big = x + np.log1p(-np.exp(-x))
        small = np.log(np.expm1(x))
    return np.where(x > 30.0, big, small)


def young_exp_square() -> YoungFunction:
    """``exp(u**2 / 2) - 1``, the subgaussian Orlicz function."""
    return YoungFunction("exp-square", {}, lambda u: np.expm1(np.square(u) / 2.0),
                         lambda u: _log_expm1(np.square(u) / 2.0))


def young_exp() -> YoungFunction:
    """``exp(u) - 1``."""
    return YoungFunction("exp", {}, lambda u: np.expm1(u), _log_expm1)


def young_custom(fn: Callable, log_fn: Optional[Callable] = None) -> YoungFunction:
    return YoungFunction("custom", {}, fn, log_fn)


def psi_from_record(rec: dict) -> PsiFunction:
    rec = dict(rec)
    fam = rec.pop("family")
    if fam == "power-singular":
        return power_singular(rec["beta"], rec["b"])
    if fam == "constant":
        return constant_psi(rec.get("value", 1.0), rec.get("a", 1.0), rec.get("b", 4.0))
    if fam == "degenerate":
        return degenerate(rec["r"])
    if fam == "sqrt":
        return sqrt_psi(rec.get("a", 1.0), rec.get("b", math.inf))
    raise ValueError(f"unknown psi family {fam!r}")


def young_from_record(rec: dict) -> YoungFunction:
    rec = dict(rec)
    fam = rec.pop("family")
    if fam == "power":
        return young_power(rec["p"])
    if fam == "exp-square":
        return young_exp_square()
    if fam == "exp":
        return young_exp()
    raise ValueError(f"unknown Young family {fam!r}")


# ---------------------------------------------------------------- weaker relations

ESCAPE_THRESHOLD = 1e3
DIVERGENCE_THRESHOLD = 1e6
TAIL_WINDOW = 10
MIN_LOG_SLOPE = 1e-6


@dataclass(frozen=True)
class Verdict:
    verdict: str
    trace: tuple
    slope: float = float("nan")
    note: str = ""

    def __str__(self):
        return self.verdict


def endpoint_grid(b: float, kmin: int = 1, kmax: int = 48, a: float = 1.0) -> np.ndarray:
    """Geometric grid ``b - b * 2**-k`` accumulating at ``b``, clipped to ``p >= a``."""
    k = np.arange(kmin, kmax + 1, dtype=float)
    p = b - b * np.exp2(-k)
    p = p[(p >= a) & (p < b)]
    return np.unique(p)


def log_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    if lx.size < 2 or not np.all(np.isfinite(ly)):
        return float("nan")
    return float(np.polyfit(lx, ly, 1)[0])


def _strictly_increasing(v) -> bool:
    v = np.asarray(v, dtype=float)
    return bool(np.all(np.isfinite(v)) and np.all(np.diff(v) > 0))


def _escapes(values, inv_dist, window, threshold, min_slope) -> tuple:
    tail = values[-window:]
    slope = log_slope(inv_dist[-window:], tail)
    grows = _strictly_increasing(tail) and (tail[-1] > threshold or slope > min_slope)
    return grows, slope


def gls_weaker(phi: PsiFunction, psi: PsiFunction, grid: Optional[Sequence[float]] = None,
               *, window: int = TAIL_WINDOW, escape_threshold: float = ESCAPE_THRESHOLD,
               divergence_threshold: float = DIVERGENCE_THRESHOLD,
               min_slope: float = MIN_LOG_SLOPE) -> Verdict:
    """Decide ``phi << psi`` in the GLS sense on a grid accumulating at ``b``.

    ``phi`` escapes to infinity when it is strictly increasing over the last
    ``window`` grid points and either exceeds ``escape_threshold`` or grows
    like a positive power of ``1 / (b - p)`` (log-log slope above
    ``min_slope``).  The ratio ``phi / psi`` diverges under the same rule
    with ``divergence_threshold``.  The thresholds alone are out of reach
    for mild singularities such as ``(4 - p)**(-1/8)``, which only reaches
    about 75 at ``4 - p = 1e-15``; the slope rule covers those.
    """
    if phi.b != psi.b:
        raise ValueError("phi and psi must share the right endpoint")
    b = phi.b
    p = np.asarray(endpoint_grid(b) if grid is None else grid, dtype=float)
    if p.size < window:
        raise ValueError(f"grid needs at least {window} points")
    fv = np.asarray(phi(p), dtype=float)
    sv = np.asarray(psi(p), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = fv / sv
    trace = tuple(zip(p.tolist(), fv.tolist(), sv.tolist(), r.tolist()))
    inv_dist = 1.0 / (b - p)

    escapes, phi_slope = _escapes(fv, inv_dist, window, escape_threshold, min_slope)
    if not escapes:
        return Verdict(INCONCLUSIVE, trace, phi_slope, "phi stays bounded on this grid")
    diverges, r_slope = _escapes(r, inv_dist, window, divergence_threshold, min_slope)
    return Verdict(WEAKER if diverges else NOT_WEAKER, trace, r_slope)


def orlicz_weaker(Psi: YoungFunction, Phi: YoungFunction,
                  lambdas: Sequence[float] = (0.5, 1.0, 2.0, 10.0),
                  ugrid: Optional[Sequence[float]] = None, *, window: int = TAIL_WINDOW,
                  small: float = 1e-6, min_slope: float = MIN_LOG_SLOPE) -> Verdict:
    """Decide ``Psi << Phi``: ``Psi(lam u) / Phi(u) -> 0`` for every ``lam``.

    Ratios are handled as differences of logarithms.  For each ``lam`` the
    log-ratio must be strictly decreasing over the last ``window`` points of
    ``ugrid`` and either drop below ``log(small)`` or fall like a negative
    power of ``u``.  Any non-finite log-ratio makes the verdict inconclusive.
    """
    if any(l <= 0 for l in lambdas):
        raise ValueError("lambda values must be positive")
    u = np.asarray(np.geomspace(1.0, 1e6, 121) if ugrid is None else ugrid, dtype=float)
    if u.size < window or np.any(np.diff(u) <= 0):
        raise ValueError("ugrid must be increasing with enough points")
    rows = []
    verdict = WEAKER
    slopes = []
    log_u = np.log(u)
    for lam in lambdas:
        lr = np.asarray(Psi.log(lam * u) - Phi.log(u), dtype=float)
        rows.extend(zip([float(lam)] * u.size, u.tolist(), lr.tolist()))
        tail = lr[-window:]
        if not np.all(np.isfinite(tail)):
            return Verdict(INCONCLUSIVE, tuple(rows), float("nan"),
                           f"log-ratio indeterminate at lambda={lam:g}")
        slope = float(np.polyfit(log_u[-window:], tail, 1)[0])
        slopes.append(slope)
        decreasing = bool(np.all(np.diff(tail) < 0))
        if not (decreasing and (tail[-1] < math.log(small) or slope < -min_slope)):
            verdict = NOT_WEAKER
    return Verdict(verdict, tuple(rows), max(slopes))
