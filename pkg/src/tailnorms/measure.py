"""Measurable functions on the unit interval (0, 1) with Lebesgue measure.

A :class:`UnitIntervalFunction` is a finite collection of :class:`Piece`
objects with pairwise disjoint supports; the function is zero off the
pieces.  Each piece is evaluated in a local coordinate ``u`` in (0, 1) so
that very short supports (the counterexample blocks get as short as
1e-20) keep full relative precision and so that endpoint singularities
sit at ``u = 0`` or ``u = 1`` where the exponential substitution can deal
with them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as _spi

__all__ = [
    "Piece",
    "UnitIntervalFunction",
    "QuadratureConfig",
    "QuadratureResult",
    "QuadratureError",
    "DisjointnessError",
    "DEFAULT_QUADRATURE",
    "integrate",
    "evaluate_block_union",
    "constant",
    "sqrt_log",
    "indicator",
    "from_callable",
    "block",
    "block_union",
]


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DisjointnessError(ValueError):
    """Supports that were required to be pairwise disjoint overlap."""


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_depth: int = 60
    substitute_singular: bool = True

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be strictly positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float

    def __iter__(self):
        yield self.value
        yield self.error


@dataclass(frozen=True)
class Piece:
    """One support interval ``[lo, hi)`` and its local profile.

    ``x = lo + (hi - lo) * u`` or, when ``reverse`` is set,
    ``x = hi - (hi - lo) * u``.  ``tail(lam)`` is the local distribution
    function ``|{u : |local(u)| > lam}|`` when it is known in closed form.
    """

    lo: float
    hi: float
    local: Callable
    reverse: bool = False
    singular_start: bool = False
    singular_end: bool = False
    tail: Optional[Callable] = None

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def local_coordinate(self, x):
        if self.reverse:
            return (self.hi - x) / self.width
        return (x - self.lo) / self.width


@dataclass(frozen=True)
class UnitIntervalFunction:
    """A function on (0, 1), zero outside its pieces (plus ``gap_value``).

    ``bounded`` is ``True``/``False`` when the essential supremum is known
    to be finite/infinite and ``None`` when unknown.
    """

    kind: str
    pieces: tuple
    bounded: Optional[bool] = True
    gap_value: float = 0.0
    label: str = ""

    def __post_init__(self):
        _check_disjoint(self.pieces)

    @property
    def singular_at_0(self) -> bool:
        return any(_singular_at(pc, 0.0) for pc in self.pieces)

    @property
    def singular_at_1(self) -> bool:
        return any(_singular_at(pc, 1.0) for pc in self.pieces)

    @property
    def support_measure(self) -> float:
        return math.fsum(pc.width for pc in self.pieces)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.gap_value, dtype=float)
        for pc in self.pieces:
            mask = (x >= pc.lo) & (x < pc.hi)
            if np.any(mask):
                u = pc.local_coordinate(x[mask])
                with np.errstate(divide="ignore", invalid="ignore"):
                    out[mask] = pc.local(u)
        return out if out.ndim else float(out)

    def scaled(self, c: float) -> "UnitIntervalFunction":
        """Scalar multiple ``c * f``."""
        c = float(c)
        pieces = tuple(_scale_piece(pc, c) for pc in self.pieces)
        bounded = True if c == 0 else self.bounded
        return UnitIntervalFunction("scaled", pieces, bounded, c * self.gap_value,
                                    f"{c:g}*{self.label}")

    def map(self, g: Callable, label: str = "") -> "UnitIntervalFunction":
        """Pointwise composition ``g(f(x))``; ``g`` must accept arrays."""
        pieces = tuple(
            replace(pc, local=_compose(g, pc.local), tail=None) for pc in self.pieces
        )
        gap = float(g(np.float64(self.gap_value)))
        return UnitIntervalFunction("composed", pieces, None, gap,
                                    label or f"g({self.label})")

    def abs(self) -> "UnitIntervalFunction":
        pieces = tuple(replace(pc, local=_compose(np.abs, pc.local)) for pc in self.pieces)
        return UnitIntervalFunction(self.kind, pieces, self.bounded,
                                    abs(self.gap_value), self.label)


def _compose(g, h):
    return lambda u: g(h(u))


def _scale_piece(pc: Piece, c: float) -> Piece:
    local = pc.local
    tail = None
    if pc.tail is not None:
        if c == 0:
            tail = lambda lam: np.zeros_like(np.asarray(lam, dtype=float))
        else:
            t, ac = pc.tail, abs(c)
            tail = lambda lam: t(np.asarray(lam, dtype=float) / ac)
    return replace(pc, local=lambda u: c * local(u), tail=tail)


def _singular_at(pc: Piece, end: float) -> bool:
    start_x = pc.hi if pc.reverse else pc.lo
    end_x = pc.lo if pc.reverse else pc.hi
    return (pc.singular_start and start_x == end) or (pc.singular_end and end_x == end)


def _check_disjoint(pieces: Sequence[Piece]) -> None:
    for pc in pieces:
        if not (0.0 <= pc.lo < pc.hi <= 1.0):
            raise ValueError(f"piece support [{pc.lo}, {pc.hi}) not inside [0, 1]")
    order = sorted(pieces, key=lambda pc: pc.lo)
    for left, right in zip(order, order[1:]):
        if right.lo < left.hi:
            raise DisjointnessError(
                f"supports [{left.lo!r}, {left.hi!r}) and [{right.lo!r}, {right.hi!r}) overlap"
            )


# ---------------------------------------------------------------- profiles


def constant(c: float = 1.0) -> UnitIntervalFunction:
    c = float(c)
    ac = abs(c)
    piece = Piece(
        0.0, 1.0,
        local=lambda u: np.full(np.shape(u), c) if np.ndim(u) else c,
        tail=lambda lam: np.where(np.asarray(lam, dtype=float) < ac, 1.0, 0.0),
    )
    return UnitIntervalFunction("profile", (piece,), True, 0.0, f"const({c:g})")


def _sqrt_log_local(u):
    with np.errstate(divide="ignore"):
        return np.sqrt(-np.log(u))


def _sqrt_log_tail(lam):
    lam = np.asarray(lam, dtype=float)
    return np.where(lam < 0, 1.0, np.exp(-np.square(np.maximum(lam, 0.0))))


def sqrt_log() -> UnitIntervalFunction:
    """``sqrt(|log x|)``; its tail is ``exp(-u**2)`` and it lies in every L_p."""
    piece = Piece(0.0, 1.0, _sqrt_log_local, singular_start=True, tail=_sqrt_log_tail)
    return UnitIntervalFunction("profile", (piece,), False, 0.0, "sqrt-log")


def indicator(mass: float, value: float = 1.0) -> UnitIntervalFunction:
    """``value`` times the indicator of ``[0, mass)``."""
    if not 0.0 < mass <= 1.0:
        raise ValueError("indicator mass must lie in (0, 1]")
    value = float(value)
    av = abs(value)
    piece = Piece(
        0.0, float(mass),
        local=lambda u: np.full(np.shape(u), value) if np.ndim(u) else value,
        tail=lambda lam: np.where(np.asarray(lam, dtype=float) < av, 1.0, 0.0),
    )
    return UnitIntervalFunction("profile", (piece,), True, 0.0,
                                f"indicator({mass:g},{value:g})")


def from_callable(fn: Callable, *, singular_at_0=False, singular_at_1=False,
                  bounded=None, tail=None, label="custom") -> UnitIntervalFunction:
    """Wrap a vectorised ``fn`` defined on (0, 1)."""
    piece = Piece(0.0, 1.0, fn, singular_start=singular_at_0,
                  singular_end=singular_at_1, tail=tail)
    return UnitIntervalFunction("profile", (piece,), bounded, 0.0, label)


# ---------------------------------------------------------------- blocks


def block(profile: UnitIntervalFunction, lo: float, hi: float, scale: float = 1.0,
          reverse: bool = True) -> UnitIntervalFunction:
    """Transplant ``scale * profile`` onto ``[lo, hi)``.

    With ``reverse`` the local variable is ``s = (hi - x) / (hi - lo)``,
    i.e. the profile's left end sits at ``hi``.
    """
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError("block support must be a non-empty subinterval of [0, 1]")
    if profile.gap_value != 0.0:
        raise ValueError("block profiles must vanish off their pieces")
    w = hi - lo
    pieces = []
    for pc in profile.scaled(scale).pieces:
        if reverse:
            new_lo = lo if pc.hi == 1.0 else hi - pc.hi * w
            new_hi = hi if pc.lo == 0.0 else hi - pc.lo * w
        else:
            new_lo = lo if pc.lo == 0.0 else lo + pc.lo * w
            new_hi = hi if pc.hi == 1.0 else lo + pc.hi * w
        pieces.append(replace(pc, lo=new_lo, hi=new_hi, reverse=pc.reverse != reverse))
    return UnitIntervalFunction("block", tuple(pieces), profile.bounded, 0.0,
                                f"block[{lo:.3g},{hi:.3g})")


def block_union(blocks: Sequence[UnitIntervalFunction]) -> UnitIntervalFunction:
    """Disjoint union (pointwise sum) of functions that vanish off their pieces.

    Raises :class:`DisjointnessError` when two supports overlap.
    """
    pieces = []
    bounded: Optional[bool] = True
    for b in blocks:
        if b.gap_value != 0.0:
            raise ValueError("block union members must vanish off their pieces")
        pieces.extend(b.pieces)
        if b.bounded is False:
            bounded = False
        elif b.bounded is None and bounded is True:
            bounded = None
    return UnitIntervalFunction("union", tuple(pieces), bounded, 0.0,
                                f"union({len(blocks)})")


def evaluate_block_union(blocks: Sequence[UnitIntervalFunction], x: float) -> float:
    """Value at ``x`` of the unique block whose support contains ``x``, else 0.

    For disjoint non-negative blocks this is simultaneously the pointwise
    supremum and the pointwise sum over the family.
    """
    return float(block_union(blocks)(x))


# ---------------------------------------------------------------- quadrature


def _quad(h, a, b, cfg: QuadratureConfig):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", _spi.IntegrationWarning)
        val, err = _spi.quad(h, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                             limit=cfg.max_depth)
    bad = [w for w in caught if issubclass(w.category, _spi.IntegrationWarning)]
    if not math.isfinite(val):
        raise QuadratureError("integral is not finite", val, err)
    if bad and err > 10 * max(cfg.abs_tol, cfg.rel_tol * abs(val)):
        raise QuadratureError(str(bad[-1].message).strip().splitlines()[0], val, err)
    return val, err


def _substituted(h, start, length, toward_end=False):
    # u = start +/- length * e^{-t}; du = length * e^{-t} dt
    def g(t):
        w = math.exp(-t) * length
        if w == 0.0:
            return 0.0
        u = start - w if toward_end else start + w
        return float(h(u)) * w
    return g


def _check_decay(g):
    # an integrable tail in t must not keep growing out to the underflow limit
    probes = [g(t) for t in (100.0, 200.0, 400.0, 700.0)]
    if abs(probes[-1]) > 1e-12 and all(abs(b) >= abs(a) for a, b in zip(probes, probes[1:])):
        raise QuadratureError("substituted integrand does not decay; integral diverges",
                              math.inf, math.inf)


def _quad_substituted(g, upper, cfg):
    if math.isinf(upper):
        _check_decay(g)
    return _quad(g, 0.0, upper, cfg)


def _integrate_local(h, pc: Piece, cfg: QuadratureConfig, cutoff):
    upper = math.inf if cutoff is None else float(cutoff)
    s0, s1 = pc.singular_start, pc.singular_end
    if not cfg.substitute_singular:
        s0 = s1 = False
    if s0 and s1:
        a = _quad_substituted(_substituted(h, 0.0, 0.5), upper, cfg)
        b = _quad_substituted(_substituted(h, 1.0, 0.5, toward_end=True), upper, cfg)
        return a[0] + b[0], a[1] + b[1]
    if s0:
        return _quad_substituted(_substituted(h, 0.0, 1.0), upper, cfg)
    if s1:
        return _quad_substituted(_substituted(h, 1.0, 1.0, toward_end=True), upper, cfg)
    return _quad(lambda u: float(h(u)), 0.0, 1.0, cfg)


def integrate(f: UnitIntervalFunction, cfg: QuadratureConfig = DEFAULT_QUADRATURE,
              cutoff: Optional[float] = None) -> QuadratureResult:
    """Lebesgue integral of ``f`` over (0, 1) with an error estimate.

    Pieces flagged singular at an end are integrated after the substitution
    ``u = exp(-t)``, which turns logarithmic and mild power singularities
    into exponentially decaying integrands on (0, inf).  ``cutoff`` truncates
    the substituted variable to ``[0, cutoff]``; it is used to build
    divergence witnesses.

    Raises :class:`QuadratureError` carrying the best estimate when the
    adaptive rule fails to converge.
    """
    total, err = [], 0.0
    for pc in f.pieces:
        v, e = _integrate_local(pc.local, pc, cfg, cutoff)
        total.append(v * pc.width)
        err += e * pc.width
    if f.gap_value != 0.0:
        total.append(f.gap_value * (1.0 - f.support_measure))
    return QuadratureResult(math.fsum(total), err)
