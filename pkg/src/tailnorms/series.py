"""Certified sums of ``sum_{n >= 1} n**(-s)`` type series.

A partial sum up to ``N`` is added to the integral-test bracket

    int_{N+1}^inf x**-s dx  <=  sum_{n > N} n**-s  <=  int_N^inf x**-s dx,

so every value comes as an interval ``[lower, upper]``.  The exponent is
passed as ``eps = s - 1 > 0`` so callers can keep full relative precision
when ``s`` is within ``1e-12`` of the divergence boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Bracket", "power_tail_integral", "power_sum", "weighted_power_sum"]


@dataclass(frozen=True)
class Bracket:
    lower: float
    upper: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def rel_width(self) -> float:
        return self.width / abs(self.mid) if self.mid else math.inf

    def __mul__(self, c):
        if isinstance(c, Bracket):
            vals = [self.lower * c.lower, self.lower * c.upper,
                    self.upper * c.lower, self.upper * c.upper]
            return Bracket(min(vals), max(vals))
        c = float(c)
        return Bracket(min(self.lower * c, self.upper * c), max(self.lower * c, self.upper * c))

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, Bracket):
            return Bracket(self.lower + other.lower, self.upper + other.upper)
        return Bracket(self.lower + other, self.upper + other)

    def reciprocal(self) -> "Bracket":
        if self.lower <= 0:
            raise ZeroDivisionError("bracket contains zero")
        return Bracket(1.0 / self.upper, 1.0 / self.lower)

    def power(self, q: float) -> "Bracket":
        a, b = self.lower ** q, self.upper ** q
        return Bracket(min(a, b), max(a, b))

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= x <= self.upper + slack


def power_tail_integral(start: float, eps: float) -> float:
    """``int_start^inf x**-(1 + eps) dx = start**-eps / eps``."""
    if eps <= 0:
        return math.inf
    return math.exp(-eps * math.log(start)) / eps


def _terms(nmax: int, eps: float) -> np.ndarray:
    n = np.arange(1, nmax + 1, dtype=float)
    return np.exp(-(1.0 + eps) * np.log(n))


def power_sum(eps: float, nmax: int) -> Bracket:
    """Bracket for ``sum_{n >= 1} n**-(1 + eps)`` (the zeta value at ``1 + eps``)."""
    if eps <= 0:
        raise ValueError("series diverges for exponent <= 1")
    partial = math.fsum(_terms(nmax, eps))
    return Bracket(partial + power_tail_integral(nmax + 1, eps),
                   partial + power_tail_integral(nmax, eps))


def weighted_power_sum(eps: float, weights: np.ndarray, tail_weight: Bracket) -> Bracket:
    """``sum_n w_n n**-(1 + eps)`` for explicit ``w_1..w_N`` and ``w_n`` in
    ``tail_weight`` for every ``n > N``."""
    nmax = len(weights)
    partial = math.fsum(_terms(nmax, eps) * np.asarray(weights, dtype=float))
    tail = Bracket(power_tail_integral(nmax + 1, eps), power_tail_integral(nmax, eps))
    return tail * tail_weight + partial
