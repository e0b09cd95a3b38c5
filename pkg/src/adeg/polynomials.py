"""Exact multilinear and univariate polynomials over the rationals.

Multilinear polynomials are stored in the character basis: the monomial for a
subset ``S`` (given as a bit mask) is ``chi_S(x) = prod_{i in S} x_i``. On the
cube the 0/1 coordinate of ``x_i`` is ``(1 - x_i) / 2``, so TRUE (``-1``)
corresponds to the 0/1 value 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import InputError, binomial

log = logging.getLogger(__name__)


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def mask_to_vars(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


def vars_to_mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


# ---------------------------------------------------------------------------
# Walsh-Hadamard transforms on dense value tables


def _lcm_denominator(values: Iterable[Fraction]) -> int:
    den = 1
    for v in values:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return den


def walsh_hadamard(values: Sequence[int]) -> list[int]:
    """Unnormalized transform ``out[S] = sum_x values[x] * chi_S(x)``."""
    a = list(values)
    n = len(a)
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            for i in range(start, start + h):
                u, v = a[i], a[i + h]
                a[i], a[i + h] = u + v, u - v
        h *= 2
    return a


def fourier_coefficients(values: Sequence[Fraction]) -> list[Fraction]:
    """Exact character coefficients of a function given by its cube values."""
    vals = [_frac(v) for v in values]
    den = _lcm_denominator(vals)
    ints = [int(v * den) for v in vals]
    size = len(vals)
    return [Fraction(c, den * size) for c in walsh_hadamard(ints)]


# ---------------------------------------------------------------------------
# multilinear polynomials


@dataclass(frozen=True)
class MultilinearPoly:
    """Exact multilinear polynomial ``sum_S c_S chi_S`` on ``n`` variables."""

    n: int
    coeffs: Mapping[int, Fraction]

    def __post_init__(self) -> None:
        clean = {}
        limit = 1 << self.n
        for mask, c in self.coeffs.items():
            if not 0 <= mask < limit:
                raise InputError(f"monomial mask {mask} outside {self.n} variables")
            c = _frac(c)
            if c:
                clean[mask] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def constant(cls, n: int, c) -> "MultilinearPoly":
        return cls(n, {0: _frac(c)})

    @classmethod
    def variable(cls, n: int, i: int) -> "MultilinearPoly":
        return cls(n, {1 << i: Fraction(1)})

    @classmethod
    def from_cube_values(cls, n: int, values: Sequence[Fraction]) -> "MultilinearPoly":
        """Unique multilinear interpolant of a function on the cube."""
        if len(values) != 1 << n:
            raise InputError("need 2^n values")
        coeffs = fourier_coefficients(values)
        return cls(n, {m: c for m, c in enumerate(coeffs) if c})

    @classmethod
    def from_zeroone(cls, n: int, terms: Mapping[int, Fraction]) -> "MultilinearPoly":
        """Convert from the 0/1 monomial basis ``prod_{i in S} b_i``."""
        out: dict[int, Fraction] = {}
        for mask, c in terms.items():
            c = _frac(c)
            k = mask.bit_count()
            scale = c / (1 << k)
            sub = mask
            while True:
                sign = -1 if sub.bit_count() % 2 else 1
                out[sub] = out.get(sub, Fraction(0)) + sign * scale
                if sub == 0:
                    break
                sub = (sub - 1) & mask
        return cls(n, out)

    def to_zeroone(self) -> dict[int, Fraction]:
        """Coefficients in the 0/1 monomial basis (inverse of from_zeroone)."""
        out: dict[int, Fraction] = {}
        for mask, c in self.coeffs.items():
            sub = mask
            while True:
                out[sub] = out.get(sub, Fraction(0)) + c * (-2) ** sub.bit_count()
                if sub == 0:
                    break
                sub = (sub - 1) & mask
        return {m: c for m, c in out.items() if c}

    @property
    def degree(self) -> int:
        return max((m.bit_count() for m in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def evaluate(self, x: Sequence) -> Fraction:
        """Exact value ``sum_S c_S prod_{i in S} x_i`` at a rational vector."""
        if len(x) != self.n:
            raise InputError(f"expected {self.n} coordinates, got {len(x)}")
        xs = [_frac(v) for v in x]
        total = Fraction(0)
        for mask, c in self.coeffs.items():
            term = c
            m, i = mask, 0
            while m:
                if m & 1:
                    term *= xs[i]
                m >>= 1
                i += 1
            total += term
        return total

    def evaluate_zeroone(self, z: Sequence) -> Fraction:
        """Value at a point given in 0/1 coordinates (``x_i = 1 - 2 z_i``)."""
        return self.evaluate([1 - 2 * _frac(v) for v in z])

    def value_at(self, x: int) -> Fraction:
        """Value at a packed cube point."""
        total = Fraction(0)
        for mask, c in self.coeffs.items():
            total += -c if (mask & x).bit_count() % 2 else c
        return total

    def cube_values(self) -> list[Fraction]:
        dense = [Fraction(0)] * (1 << self.n)
        for mask, c in self.coeffs.items():
            dense[mask] = c
        den = _lcm_denominator(dense)
        ints = walsh_hadamard([int(v * den) for v in dense])
        return [Fraction(v, den) for v in ints]

    def __add__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, Fraction(0)) + c
        return MultilinearPoly(self.n, out)

    def __neg__(self) -> "MultilinearPoly":
        return MultilinearPoly(self.n, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        return self + (-other)

    def scale(self, c) -> "MultilinearPoly":
        c = _frac(c)
        return MultilinearPoly(self.n, {m: c * v for m, v in self.coeffs.items()})

    def __mul__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        """Product reduced with ``x_i^2 = 1`` (agrees with the product on the cube)."""
        self._check(other)
        out: dict[int, Fraction] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = m1 ^ m2
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return MultilinearPoly(self.n, out)

    def variables(self) -> int:
        used = 0
        for m in self.coeffs:
            used |= m
        return used

    def embed(self, n: int, offset: int) -> "MultilinearPoly":
        """Same polynomial on variables ``offset .. offset + self.n - 1`` of ``n``."""
        if offset + self.n > n:
            raise InputError("embedding does not fit")
        return MultilinearPoly(n, {m << offset: c for m, c in self.coeffs.items()})

    def _check(self, other: "MultilinearPoly") -> None:
        if other.n != self.n:
            raise InputError("dimension mismatch")


def evaluate(p: MultilinearPoly, x: Sequence) -> Fraction:
    return p.evaluate(x)


# ---------------------------------------------------------------------------
# univariate polynomials


@dataclass(frozen=True)
class UnivariatePoly:
    """Polynomial ``sum_j coeffs[j] t^j`` with exact rational coefficients."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        cs = [_frac(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def of(cls, *coeffs) -> "UnivariatePoly":
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, t) -> Fraction:
        t = _frac(t)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __add__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        a, b = self.coeffs, other.coeffs
        size = max(len(a), len(b))
        return UnivariatePoly(
            tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(size))
        )

    def __neg__(self) -> "UnivariatePoly":
        return UnivariatePoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        return self + (-other)

    def scale(self, c) -> "UnivariatePoly":
        c = _frac(c)
        return UnivariatePoly(tuple(c * v for v in self.coeffs))

    def __mul__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        if self.is_zero() or other.is_zero():
            return UnivariatePoly(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UnivariatePoly(tuple(out))

    def compose(self, inner: "UnivariatePoly") -> "UnivariatePoly":
        """``self(inner(t))`` by Horner's rule."""
        acc = UnivariatePoly(())
        for c in reversed(self.coeffs):
            acc = acc * inner + UnivariatePoly((c,))
        return acc

    @classmethod
    def interpolate(cls, points: Sequence, values: Sequence) -> "UnivariatePoly":
        """Lagrange interpolation through distinct rational nodes."""
        pts = [_frac(p) for p in points]
        if len(set(pts)) != len(pts):
            raise InputError("interpolation nodes must be distinct")
        result = cls(())
        for i, (xi, yi) in enumerate(zip(pts, values)):
            yi = _frac(yi)
            if not yi:
                continue
            basis = cls((Fraction(1),))
            denom = Fraction(1)
            for j, xj in enumerate(pts):
                if j != i:
                    basis = basis * cls((-xj, Fraction(1)))
                    denom *= xi - xj
            result = result + basis.scale(yi / denom)
        return result


@dataclass(frozen=True)
class SymmetricProfile:
    """Values of a symmetric function on the Hamming levels ``0..n``."""

    n: int
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.n + 1:
            raise InputError("profile needs n+1 values")
        object.__setattr__(self, "values", tuple(_frac(v) for v in self.values))

    def __getitem__(self, t: int) -> Fraction:
        return self.values[t]

    @classmethod
    def of_poly(cls, q: UnivariatePoly, n: int) -> "SymmetricProfile":
        return cls(n, tuple(q(t) for t in range(n + 1)))

    def to_multilinear(self) -> MultilinearPoly:
        """Multilinear polynomial taking ``values[|x|]`` at every cube point."""
        n = self.n
        # each character chi_S contributes K_{|S|}(t) on level t; solve for c_{|S|}
        size = n + 1
        matrix = [[Fraction(krawtchouk(s, t, n)) for s in range(size)] for t in range(size)]
        coeff_by_size = _solve(matrix, list(self.values))
        coeffs = {}
        for mask in range(1 << n):
            c = coeff_by_size[mask.bit_count()]
            if c:
                coeffs[mask] = c
        return MultilinearPoly(n, coeffs)


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination for a square non-singular rational system."""
    size = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col] != 0), None)
        if piv is None:
            raise ArithmeticError("singular system")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        for r in range(size):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [vr - f * vc for vr, vc in zip(a[r], a[col])]
    return [a[i][size] for i in range(size)]


def krawtchouk(s: int, t: int, n: int) -> int:
    """Krawtchouk value ``sum_{|S| = s} chi_S(x)`` at any ``x`` of weight ``t``.

    By double counting, the level average of a single ``chi_S`` with
    ``|S| = s`` is ``krawtchouk(s, t, n) / C(n, s)``.
    """
    return sum((-1) ** j * binomial(t, j) * binomial(n - t, s - j) for j in range(0, min(s, t) + 1))


# ---------------------------------------------------------------------------
# Chebyshev constructions


def chebyshev(d: int) -> UnivariatePoly:
    """Chebyshev polynomial of the first kind via the three-term recurrence."""
    if d < 0:
        raise InputError("degree must be non-negative")
    prev, cur = UnivariatePoly.of(1), UnivariatePoly.of(0, 1)
    if d == 0:
        return prev
    x2 = UnivariatePoly.of(0, 2)
    for _ in range(d - 1):
        prev, cur = cur, x2 * cur - prev
    return cur


def chebyshev_value(d: int, x) -> Fraction:
    """``T_d(x)`` by the recurrence, without building coefficients."""
    x = _frac(x)
    prev, cur = Fraction(1), x
    if d == 0:
        return prev
    for _ in range(d - 1):
        prev, cur = cur, 2 * x * cur - prev
    return cur


@dataclass(frozen=True)
class VResult:
    """Output of :func:`build_V`."""

    T: int
    eps: Fraction
    N: int
    d: int
    M: Fraction
    poly: UnivariatePoly
    profile: SymmetricProfile
    magnitude_bound: Fraction

    def checks(self) -> dict[str, bool]:
        lo = 1 - self.eps
        vals = self.profile.values
        return {
            "zero_at_origin": vals[0] == 0,
            "promise_range": all(lo <= vals[t] <= 1 for t in range(1, self.T + 1)),
            "outside_magnitude": all(
                abs(vals[t]) <= self.magnitude_bound for t in range(self.T + 1, self.N + 1)
            ),
            "chebyshev_condition": self.M >= 2 / self.eps,
        }


def build_V(T: int, eps, N: int) -> VResult:
    """Symmetric approximation of OR on Hamming weight at most ``T``.

    With ``d`` the least degree such that ``M = T_d(1 + 1/T) + 1 >= 2/eps``,
    the polynomial is ``(1 - 1/M) - T_d(1 + 1/T - t/T) / M`` in the weight ``t``.
    It vanishes at ``t = 0``, lies in ``[1 - eps, 1]`` for ``1 <= t <= T`` and
    has magnitude at most ``1 + T_d(N/T)/M`` above ``T``.
    """
    eps = _frac(eps)
    if not (1 <= T <= N):
        raise InputError("need 1 <= T <= N")
    if not (0 < eps < 1):
        raise InputError("need 0 < eps < 1")
    shift = 1 + Fraction(1, T)
    d = 0
    while chebyshev_value(d, shift) + 1 < 2 / eps:
        d += 1
    M = chebyshev_value(d, shift) + 1
    inner = UnivariatePoly.of(shift, Fraction(-1, T))
    poly = UnivariatePoly.of(1 - 1 / M) - chebyshev(d).compose(inner).scale(1 / M)
    profile = SymmetricProfile.of_poly(poly, N)
    bound = 1 + abs(chebyshev_value(d, Fraction(N, T))) / M
    ratio = d / (math.sqrt(T) * math.log(1 / float(eps)))
    log.info("build_V T=%d eps=%s: degree %d, degree/(sqrt(T) log(1/eps)) = %.4f", T, eps, d, ratio)
    return VResult(T, eps, N, d, M, poly, profile, bound)


# ---------------------------------------------------------------------------
# symmetrization, composition, growth and amplification


def symmetrize(p: MultilinearPoly) -> UnivariatePoly:
    """Level-average polynomial ``q(t) = avg_{|x| = t} p(x)`` (Minsky-Papert)."""
    n = p.n
    by_size: dict[int, Fraction] = {}
    for mask, c in p.coeffs.items():
        k = mask.bit_count()
        by_size[k] = by_size.get(k, Fraction(0)) + c
    averages = []
    for t in range(n + 1):
        total = sum(
            (c * Fraction(krawtchouk(k, t, n), binomial(n, k)) for k, c in by_size.items()),
            Fraction(0),
        )
        averages.append(total)
    return UnivariatePoly.interpolate(list(range(n + 1)), averages)


def compose_blockwise(
    outer: MultilinearPoly, inner: Sequence[MultilinearPoly], basis: str = "character"
) -> MultilinearPoly:
    """Substitute ``inner[i]`` for variable ``i`` of ``outer``.

    Inner polynomials share one ambient dimension and must use disjoint sets of
    variables, so products of distinct inners need no reduction. With
    ``basis="zeroone"`` the outer polynomial is read in 0/1 coordinates, i.e.
    variable ``i`` takes the value ``1 - 2 inner[i]`` in the character form.
    """
    if len(inner) != outer.n:
        raise InputError("need one inner polynomial per outer variable")
    if basis not in ("character", "zeroone"):
        raise InputError(f"unknown basis {basis!r}")
    if not inner:
        return outer
    n = inner[0].n
    used = 0
    for q in inner:
        if q.n != n:
            raise InputError("inner polynomials must share one dimension")
        vs = q.variables()
        if vs & used:
            raise InputError("inner polynomials overlap")
        used |= vs
    one = MultilinearPoly.constant(n, 1)
    subs = list(inner) if basis == "character" else [one - q.scale(2) for q in inner]
    result = MultilinearPoly(n, {})
    for mask, c in outer.coeffs.items():
        term = MultilinearPoly.constant(n, c)
        for i in mask_to_vars(mask):
            term = term * subs[i]
        result = result + term
    return result


def check_cube_bounded(p: MultilinearPoly, lo=0, hi=1) -> bool:
    return all(lo <= v <= hi for v in p.cube_values())


def growth_bound(p: MultilinearPoly, x: Sequence, check: bool = True) -> Fraction:
    """``prod_i (|1 - x_i| + |x_i|)`` for a point in 0/1 coordinates.

    If ``p`` takes values in ``[0, 1]`` on the cube, the result bounds
    ``|p(x)|`` at the real point ``x``. The boundedness premise is checked
    exhaustively when ``check`` is set and ``n <= 20``.
    """
    if len(x) != p.n:
        raise InputError("dimension mismatch")
    if check and p.n <= 20 and not check_cube_bounded(p):
        raise InputError("polynomial is not [0,1]-bounded on the cube")
    bound = Fraction(1)
    for v in x:
        v = _frac(v)
        bound *= abs(1 - v) + abs(v)
    return bound


def amplifier(z) -> Fraction:
    """``A(z) = 3z^2 - 2z^3``: fixes 0, 1/2 and 1 and pushes values outward."""
    z = _frac(z)
    return 3 * z * z - 2 * z * z * z


AMPLIFIER = UnivariatePoly.of(0, 0, 3, -2)


def amplifier_iterations(eps_start, eps_target) -> int:
    """Least ``k`` with ``A^k(eps_start) <= eps_target`` (``A`` monotone on [0,1])."""
    e, k = _frac(eps_start), 0
    target = _frac(eps_target)
    if not 0 <= e < Fraction(1, 2):
        raise InputError("starting error must lie in [0, 1/2)")
    while e > target:
        e = amplifier(e)
        k += 1
    return k


def amplify(p: MultilinearPoly, eps_target, eps_start=Fraction(1, 3)) -> MultilinearPoly:
    """Compose ``p`` with the amplifier until its 0/1 error is at most ``eps_target``.

    The composition is computed on cube values, which is the same as the
    multilinear reduction of ``A(A(...p...))``.
    """
    k = amplifier_iterations(eps_start, eps_target)
    values = p.cube_values()
    for _ in range(k):
        values = [amplifier(v) for v in values]
    return MultilinearPoly.from_cube_values(p.n, values)
