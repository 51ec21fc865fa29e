"""Lebesgue, Grand Lebesgue, Luxemburg and Lorentz norms on (0, 1).

Every routine returns a :class:`NormReport`.  A norm is either a finite
value with an error estimate or ``DIVERGENT``, in which case the report
carries the witness sequence that justified the call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .measure import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    QuadratureError,
    UnitIntervalFunction,
    from_callable,
    integrate,
)
from .psi import DIVERGENCE_THRESHOLD, TAIL_WINDOW, PsiFunction, YoungFunction

__all__ = [
    "NormReport",
    "LorentzWeight",
    "DivergenceError",
    "RearrangementError",
    "lp_norm",
    "gls_norm",
    "luxemburg_norm",
    "lorentz_norm",
    "distribution_function",
    "decreasing_rearrangement",
    "rearrangement_integral",
]


class DivergenceError(ArithmeticError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class RearrangementError(ArithmeticError):
    """The distribution function could not be inverted (no bracket found)."""


@dataclass(frozen=True)
class NormReport:
    value: float
    method: str
    error: float = 0.0
    argmax: Optional[float] = None
    divergent: bool = False
    witness: tuple = ()
    certificate: Optional[float] = None

    def __post_init__(self):
        if not self.divergent and not self.value >= 0:
            raise ValueError(f"finite norm must be non-negative, got {self.value!r}")

    @classmethod
    def divergence(cls, method, witness, argmax=None):
        return cls(math.inf, method, math.inf, argmax, True, tuple(witness))

    def __float__(self):
        return float(self.value)

    def to_row(self) -> dict:
        return {
            "value": "divergent" if self.divergent else self.value,
            "method": self.method,
            "error": self.error,
            "argmax": "" if self.argmax is None else self.argmax,
        }


def _monotone_witness(values, threshold=DIVERGENCE_THRESHOLD, window=TAIL_WINDOW) -> bool:
    tail = np.asarray(values[-window:], dtype=float)
    return bool(tail.size == window and np.all(np.diff(tail) > 0) and tail[-1] > threshold)


# ---------------------------------------------------------------- L_p


def _power_integral(f: UnitIntervalFunction, p: float, cfg, cutoff=None):
    with np.errstate(over="ignore"):
        return integrate(f.map(lambda y: np.power(np.abs(y), p)), cfg, cutoff)


def lp_norm(f: UnitIntervalFunction, p: float,
            cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> NormReport:
    """``(int |f|**p)**(1/p)``.

    When quadrature fails, truncated integrals over ``t <= 10 j`` in the
    substituted variable are used as witnesses; if they grow monotonically
    past the divergence threshold the norm is reported DIVERGENT, otherwise
    the quadrature error propagates.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    try:
        val, err = _power_integral(f, p, cfg)
    except QuadratureError as exc:
        witness = []
        for j in range(1, 75):  # exp(-t) underflows past t ~ 745
            try:
                witness.append((10.0 * j, _power_integral(f, p, cfg, 10.0 * j).value))
            except QuadratureError:
                break
        if witness and _monotone_witness([w for _, w in witness]):
            return NormReport.divergence("lp", witness, p)
        raise exc
    val = max(val, 0.0)
    norm = val ** (1.0 / p)
    nerr = err * norm / (p * val) if val > 0 else err ** (1.0 / p)
    return NormReport(norm, "lp", nerr, p)


# ---------------------------------------------------------------- Grand Lebesgue


def _golden_max(fn, lo, hi, tol=1e-10, maxiter=200):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fd = fn(c), fn(d)
    for _ in range(maxiter):
        if hi - lo <= tol * max(1.0, abs(hi)):
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def gls_grid(psi: PsiFunction, points: int = 200, pmax: float = 64.0,
             closest: float = 1e-12) -> np.ndarray:
    """Scan grid on ``supp psi``: half linear, half geometric toward ``b``."""
    a = psi.a
    b = psi.b if math.isfinite(psi.b) else max(pmax, a + 1.0)
    span = b - a
    half = points // 2
    lin = np.linspace(a, b, half, endpoint=False)
    geo = b - span * np.geomspace(1.0, closest, points - half)
    grid = np.unique(np.concatenate([lin, geo]))
    grid = grid[(grid >= a) & (grid < b)]
    if psi.closed_right and math.isfinite(psi.b):
        grid = np.append(grid, b)
    return grid


def gls_norm(f: Optional[UnitIntervalFunction], psi: PsiFunction,
             cfg: QuadratureConfig = DEFAULT_QUADRATURE, *,
             grid: Optional[Sequence[float]] = None,
             natural: Optional[Callable[[float], float]] = None,
             pmax: float = 64.0) -> NormReport:
    """``sup_p |f|_p / psi(p)`` over the support of ``psi``.

    A 200-point scan locates the best grid point, then golden-section search
    refines inside its two neighbouring cells.  Ties go to the smallest p.
    ``natural`` may supply ``p -> |f|_p`` directly (e.g. from a closed form
    or a series); otherwise L_p norms come from quadrature.

    The degenerate psi_(r) reduces to ``lp_norm(f, r)`` (C / inf = 0).
    """
    if natural is None:
        if f is None:
            raise ValueError("need either f or natural")

        def natural(p):
            rep = lp_norm(f, p, cfg)
            if rep.divergent:
                raise DivergenceError(f"|f|_{p:g} diverges", rep)
            return rep.value

    if psi.is_degenerate:
        r = psi.params["r"]
        if f is not None:
            rep = lp_norm(f, r, cfg)
            return NormReport(rep.value, "gls", rep.error, r, rep.divergent, rep.witness)
        return NormReport(natural(r), "gls", 0.0, r)

    ps = np.asarray(gls_grid(psi, pmax=pmax) if grid is None else grid, dtype=float)
    ratios = []
    failure = None
    for i, p in enumerate(ps):
        try:
            ratios.append(natural(float(p)) / float(psi(p)))
        except DivergenceError:
            # one divergent |f|_p with finite psi(p) already makes the sup infinite
            wit = tuple((q, r) for q, r in zip(ps[:i].tolist(), ratios) if math.isfinite(r))
            return NormReport.divergence("gls", wit + ((float(p), math.inf),), float(p))
        except QuadratureError as exc:
            # near a divergence boundary; a later grid point may still certify it
            failure = failure or exc
            ratios.append(math.nan)
    if failure is not None:
        raise failure
    ratios = np.asarray(ratios)
    i = int(np.argmax(ratios))  # first occurrence: smallest maximising p
    if i == len(ps) - 1 and _monotone_witness(ratios):
        return NormReport.divergence("gls", zip(ps[-TAIL_WINDOW:].tolist(),
                                                ratios[-TAIL_WINDOW:].tolist()), float(ps[i]))
    best_p, best = float(ps[i]), float(ratios[i])
    lo = float(ps[max(i - 1, 0)])
    hi = float(ps[min(i + 1, len(ps) - 1)])
    if hi > lo:
        p_ref, v_ref = _golden_max(lambda q: natural(q) / float(psi(q)), lo, hi)
        if v_ref > best:
            best_p, best = float(p_ref), float(v_ref)
    return NormReport(best, "gls", abs(best) * max(cfg.rel_tol, 1e-12), best_p)


# ---------------------------------------------------------------- Luxemburg


def _modular(f, Phi: YoungFunction, k: float, cfg) -> float:
    try:
        with np.errstate(over="ignore"):
            val = integrate(f.map(lambda y: Phi(np.asarray(y) / k)), cfg).value
    except QuadratureError:
        return math.inf
    return val if math.isfinite(val) else math.inf


def luxemburg_norm(f: UnitIntervalFunction, Phi: YoungFunction,
                   cfg: QuadratureConfig = DEFAULT_QUADRATURE, *,
                   rel_width: float = 1e-13, max_doublings: int = 200) -> NormReport:
    """Infimal ``k > 0`` with ``int Phi(|f| / k) <= 1``.

    The modular decreases in ``k``, so a bracket is grown geometrically from
    ``k0 = |f|_1`` and then bisected; the upper end is returned so the
    modular at the reported ``k`` never exceeds 1; that modular value is
    kept in ``certificate``.
    """
    k0 = lp_norm(f, 1.0, cfg).value
    if k0 == 0.0:
        return NormReport(0.0, "luxemburg", 0.0, 0.0, certificate=0.0)
    lo = hi = k0
    witness = []
    if _modular(f, Phi, hi, cfg) > 1.0:
        for _ in range(max_doublings):
            hi *= 2.0
            m = _modular(f, Phi, hi, cfg)
            witness.append((hi, m))
            if m <= 1.0:
                break
        else:
            return NormReport.divergence("luxemburg", witness)
        lo = hi / 2.0
    else:
        for _ in range(max_doublings):
            lo /= 2.0
            if _modular(f, Phi, lo, cfg) > 1.0:
                break
        hi = lo * 2.0
    while hi - lo > rel_width * hi:
        mid = 0.5 * (lo + hi)
        if _modular(f, Phi, mid, cfg) > 1.0:
            lo = mid
        else:
            hi = mid
    return NormReport(hi, "luxemburg", hi - lo, hi,
                      certificate=_modular(f, Phi, hi, cfg))


# ---------------------------------------------------------------- tails and Lorentz


def distribution_function(f: UnitIntervalFunction, lam,
                          cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """``|{x : |f(x)| > lam}|``, summed over pieces.

    Pieces with a closed-form local tail use it; others fall back to
    quadrature of the exceedance indicator.
    """
    lam_arr = np.asarray(lam, dtype=float)
    total = np.zeros(lam_arr.shape)
    for pc in f.pieces:
        if pc.tail is not None:
            total = total + pc.width * np.asarray(pc.tail(lam_arr), dtype=float)
        else:
            local = pc.local
            vals = [
                integrate(from_callable(lambda u, l=l: (np.abs(local(u)) > l).astype(float),
                                        singular_at_0=pc.singular_start,
                                        singular_at_1=pc.singular_end),
                          QuadratureConfig(1e-8, 1e-12, 200)).value
                for l in np.ravel(lam_arr)
            ]
            total = total + pc.width * np.asarray(vals).reshape(lam_arr.shape)
    if abs(f.gap_value) > 0:
        total = total + np.where(abs(f.gap_value) > lam_arr, 1.0 - f.support_measure, 0.0)
    total = np.clip(total, 0.0, 1.0)
    return total if total.ndim else float(total)


def _invert_tail(m, s, max_doublings=1100, iters=200):
    """``inf {lam >= 0 : m(lam) <= s}`` elementwise, by bisection."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    lo = np.zeros_like(s)
    hi = np.ones_like(s)
    at_zero = np.asarray(m(lo), dtype=float) <= s
    todo = ~at_zero
    for _ in range(max_doublings):
        open_ = todo & (np.asarray(m(hi), dtype=float) > s)
        if not open_.any():
            break
        lo = np.where(open_, hi, lo)
        hi = np.where(open_, hi * 2.0, hi)
    else:
        raise RearrangementError("distribution function does not fall below the level")
    for _ in range(iters):
        if np.all(hi - lo <= 4e-16 * hi):
            break
        mid = 0.5 * (lo + hi)
        above = np.asarray(m(mid), dtype=float) > s
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return np.where(at_zero, 0.0, hi)


def decreasing_rearrangement(f: UnitIntervalFunction,
                             cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> UnitIntervalFunction:
    """``f*`` as a function on (0, 1), obtained by inverting ``m(lam)``."""
    m = lambda lam: distribution_function(f, lam, cfg)

    def fstar(s):
        out = _invert_tail(m, s)
        return out if np.ndim(s) else float(out[0])

    return from_callable(fstar, singular_at_0=f.bounded is not True,
                         bounded=f.bounded, label=f"{f.label}*")


def rearrangement_integral(f: UnitIntervalFunction, t: float,
                           cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``int_0^t f*(s) ds``.

    Uses ``t * f*(t) + int (|f| - f*(t))_+ dx``: for ``s < t`` one has
    ``f*(s) >= f*(t)`` and the excess integrates to the same value over x
    by equimeasurability, so only one inversion per ``t`` is needed.
    """
    level = float(_invert_tail(lambda lam: distribution_function(f, lam, cfg), t)[0])
    excess = integrate(f.map(lambda y: np.maximum(np.abs(y) - level, 0.0)), cfg).value
    return t * level + excess


@dataclass(frozen=True, eq=False)
class LorentzWeight:
    """Increasing ``v`` on (0, 1] with ``v(0+) = 0``."""

    evaluator: Callable = field(repr=False)
    label: str = "v"

    def __post_init__(self):
        z = np.geomspace(1e-12, 1.0, 200)
        vals = np.asarray(self.evaluator(z), dtype=float)
        if not (np.all(np.diff(vals) > 0) and np.all(vals > 0)):
            raise ValueError("Lorentz weight must be positive and strictly increasing")
        if not float(self.evaluator(1e-300)) < 1e-6 * float(self.evaluator(1.0)):
            raise ValueError("Lorentz weight must vanish at 0+")

    def __call__(self, z):
        return self.evaluator(z)

    @classmethod
    def power(cls, alpha: float = 1.0) -> "LorentzWeight":
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        return cls(lambda z: np.power(z, alpha), f"t^{alpha:g}")


def lorentz_norm(f: UnitIntervalFunction, v: LorentzWeight,
                 tgrid: Optional[Sequence[float]] = None,
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> NormReport:
    """``sup_A int_A |f| / v(|A|)``, reduced to level sets of ``|f|``.

    Among sets of measure t the integral of ``|f|`` is largest on a top
    level set, so the sup runs over ``t`` with ``int_0^t f*``.  The norm is
    DIVERGENT when the maximum sits at the smallest ``t``, the ratio grows
    monotonically over the last 10 grid points toward 0, and either exceeds
    the divergence threshold or ``f`` is known to be unbounded.
    """
    ts = np.sort(np.asarray(np.geomspace(1e-12, 1.0, 200) if tgrid is None else tgrid,
                            dtype=float))[::-1]
    if ts[-1] <= 0 or ts[0] > 1:
        raise ValueError("tgrid must lie in (0, 1]")
    ratios = np.asarray([rearrangement_integral(f, float(t), cfg) / float(v(t)) for t in ts])
    i = int(np.argmax(ratios))
    tail = ratios[-TAIL_WINDOW:]
    growing = tail.size == TAIL_WINDOW and bool(np.all(np.diff(tail) > 0))
    if i == len(ts) - 1 and growing and (tail[-1] > DIVERGENCE_THRESHOLD or f.bounded is False):
        return NormReport.divergence("lorentz", zip(ts[-TAIL_WINDOW:].tolist(), tail.tolist()),
                                     float(ts[i]))
    return NormReport(float(ratios[i]), "lorentz", float(ratios[i]) * cfg.rel_tol, float(ts[i]))
