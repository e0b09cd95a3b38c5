"""Certified real enclosures with rational endpoints.

Transcendental values (exp, log, square roots) are enclosed by an interval
``[lo, hi]`` of exact fractions. The enclosures come from mpmath's interval
context, which rounds outward, and are converted to fractions without loss,
so every comparison made through this module is sound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import to_rational

DEFAULT_PRECISION = 128

Number = Union[int, Fraction, "CertifiedReal"]


def _context(prec: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


def _to_iv(ctx: MPIntervalContext, q: Fraction):
    q = Fraction(q)
    return ctx.mpf(q.numerator) / ctx.mpf(q.denominator)


def _from_iv(x) -> "CertifiedReal":
    lo, hi = x._mpi_
    p, q = to_rational(lo)
    a = Fraction(int(p), int(q))
    p, q = to_rational(hi)
    b = Fraction(int(p), int(q))
    return CertifiedReal(a, b)


@dataclass(frozen=True)
class CertifiedReal:
    """A real number known to lie in the closed interval ``[lo, hi]``."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("empty enclosure")

    @staticmethod
    def exact(q: Union[int, Fraction]) -> "CertifiedReal":
        q = Fraction(q)
        return CertifiedReal(q, q)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.mid)

    def __neg__(self) -> "CertifiedReal":
        return CertifiedReal(-self.hi, -self.lo)

    def __add__(self, other: Number) -> "CertifiedReal":
        o = as_certified(other)
        return CertifiedReal(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "CertifiedReal":
        return self + (-as_certified(other))

    def __rsub__(self, other: Number) -> "CertifiedReal":
        return as_certified(other) - self

    def __mul__(self, other: Number) -> "CertifiedReal":
        o = as_certified(other)
        prods = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return CertifiedReal(min(prods), max(prods))

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "CertifiedReal":
        o = as_certified(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor enclosure contains zero")
        return self * CertifiedReal(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other: Number) -> "CertifiedReal":
        return as_certified(other) / self

    def __repr__(self) -> str:
        return f"CertifiedReal(~{float(self.mid):.17g}, width {float(self.width):.3g})"


def as_certified(x: Number) -> CertifiedReal:
    if isinstance(x, CertifiedReal):
        return x
    return CertifiedReal.exact(Fraction(x))


def certainly_le(a: Number, b: Number) -> bool:
    """True only if ``a <= b`` holds for every value in both enclosures."""
    return as_certified(a).hi <= as_certified(b).lo


def certainly_lt(a: Number, b: Number) -> bool:
    return as_certified(a).hi < as_certified(b).lo


def _apply(fn_name: str, x: Number, prec: int) -> CertifiedReal:
    ctx = _context(prec)
    c = as_certified(x)
    lo = getattr(ctx, fn_name)(_to_iv(ctx, c.lo))
    hi = getattr(ctx, fn_name)(_to_iv(ctx, c.hi))
    a, b = _from_iv(lo), _from_iv(hi)
    return CertifiedReal(min(a.lo, b.lo), max(a.hi, b.hi))


def exp(x: Number, prec: int = DEFAULT_PRECISION) -> CertifiedReal:
    """Enclosure of ``e**x`` (monotone, so endpoints map to endpoints)."""
    return _apply("exp", x, prec)


def log(x: Number, prec: int = DEFAULT_PRECISION) -> CertifiedReal:
    """Enclosure of the natural logarithm of a positive quantity."""
    if as_certified(x).lo <= 0:
        raise ValueError("log of a non-positive enclosure")
    return _apply("log", x, prec)


def log2(x: Number, prec: int = DEFAULT_PRECISION) -> CertifiedReal:
    return log(x, prec) / log(2, prec)


def sqrt(x: Number, prec: int = DEFAULT_PRECISION) -> CertifiedReal:
    if as_certified(x).lo < 0:
        raise ValueError("sqrt of a negative enclosure")
    return _apply("sqrt", x, prec)


def binary_entropy(q: Fraction, prec: int = DEFAULT_PRECISION) -> CertifiedReal:
    """Enclosure of ``H(q) = q log2(1/q) + (1-q) log2(1/(1-q))``."""
    q = Fraction(q)
    return entropy_of([q, 1 - q], prec)


def entropy_of(probs, prec: int = DEFAULT_PRECISION) -> CertifiedReal:
    """Shannon entropy in bits of a rational probability vector."""
    total = CertifiedReal.exact(0)
    ln2 = log(2, prec)
    for p in probs:
        p = Fraction(p)
        if p < 0:
            raise ValueError("negative probability")
        if p == 0:
            continue
        total = total - p * log(p, prec)
    return total / ln2
