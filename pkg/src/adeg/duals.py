"""Dual witnesses: norms, pure high degree, correlation and block composition.

Two representations are used:

* :class:`DualWitness` is an explicit sparse map from packed cube points to
  rationals;
* :class:`LevelWitness` describes a function on ``R`` blocks of ``N`` bits that
  is invariant under permutations inside each block. It stores, for every
  tuple of block weights ``t``, the total mass of the orbit of points with
  those weights. Symmetric witnesses are the case ``R = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator, Mapping, Optional, Union

import numpy as np

from .core import FALSE, TRUE, InputError, PartialBoolFn, binomial, block_levels, or_fn, weight
from .polynomials import fourier_coefficients, krawtchouk, walsh_hadamard

DENSE_LIMIT = 20


def _sign(v: Fraction) -> int:
    """Sign with the convention sign(0) = +1."""
    return TRUE if v < 0 else FALSE


@dataclass(frozen=True)
class DualWitness:
    """Sparse rational function on ``{-1, 1}^n``."""

    n: int
    entries: Mapping[int, Fraction]

    def __post_init__(self) -> None:
        limit = 1 << self.n
        clean = {}
        for x, v in self.entries.items():
            if not 0 <= x < limit:
                raise InputError(f"point {x} outside the {self.n}-cube")
            v = Fraction(v)
            if v:
                clean[x] = v
        object.__setattr__(self, "entries", clean)

    def __call__(self, x: int) -> Fraction:
        return self.entries.get(x, Fraction(0))

    def items(self):
        return self.entries.items()

    def scale(self, c) -> "DualWitness":
        c = Fraction(c)
        return DualWitness(self.n, {x: c * v for x, v in self.entries.items()})

    def __sub__(self, other: "DualWitness") -> "DualWitness":
        out = dict(self.entries)
        for x, v in other.entries.items():
            out[x] = out.get(x, Fraction(0)) - v
        return DualWitness(self.n, out)

    def __add__(self, other: "DualWitness") -> "DualWitness":
        return self - other.scale(-1)


@dataclass(frozen=True)
class LevelWitness:
    """Block-symmetric function given by orbit masses on weight tuples."""

    num_blocks: int
    block_size: int
    masses: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self) -> None:
        clean = {}
        for t, v in self.masses.items():
            t = tuple(t)
            if len(t) != self.num_blocks or any(not 0 <= ti <= self.block_size for ti in t):
                raise InputError(f"bad level tuple {t}")
            v = Fraction(v)
            if v:
                clean[t] = v
        object.__setattr__(self, "masses", clean)

    @property
    def n(self) -> int:
        return self.num_blocks * self.block_size

    def orbit_size(self, t: tuple[int, ...]) -> int:
        return math.prod(binomial(self.block_size, ti) for ti in t)

    def point_value(self, t: tuple[int, ...]) -> Fraction:
        return self.masses.get(tuple(t), Fraction(0)) / self.orbit_size(t)

    def __call__(self, x: int) -> Fraction:
        return self.point_value(block_levels(x, self.num_blocks, self.block_size))

    def items(self):
        return self.masses.items()

    def scale(self, c) -> "LevelWitness":
        c = Fraction(c)
        return LevelWitness(
            self.num_blocks, self.block_size, {t: c * v for t, v in self.masses.items()}
        )

    def __sub__(self, other: "LevelWitness") -> "LevelWitness":
        if (other.num_blocks, other.block_size) != (self.num_blocks, self.block_size):
            raise InputError("shape mismatch")
        out = dict(self.masses)
        for t, v in other.masses.items():
            out[t] = out.get(t, Fraction(0)) - v
        return LevelWitness(self.num_blocks, self.block_size, out)

    def support_size(self) -> int:
        return sum(self.orbit_size(t) for t in self.masses)

    def materialize(self, limit: int = 1 << 22) -> DualWitness:
        """Explicit sparse witness (refused when the support is too large)."""
        if self.support_size() > limit:
            raise InputError("support too large to materialize")
        N, R = self.block_size, self.num_blocks
        per_block = {t: [sum(1 << i for i in c) for c in combinations(range(N), t)] for t in range(N + 1)}
        entries = {}
        for t, mass in self.masses.items():
            value = mass / self.orbit_size(t)
            for parts in product(*(per_block[ti] for ti in t)):
                x = 0
                for r, p in enumerate(parts):
                    x |= p << (r * N)
                entries[x] = value
        return DualWitness(self.n, entries)


Witness = Union[DualWitness, LevelWitness]


def symmetric_witness(levels, N: int) -> LevelWitness:
    """Symmetric witness on ``N`` bits with level masses ``levels[t]``."""
    return LevelWitness(1, N, {(t,): Fraction(v) for t, v in enumerate(levels) if v})


# ---------------------------------------------------------------------------
# norms and pure high degree


def l1_norm(psi: Witness) -> Fraction:
    return sum((abs(v) for _, v in psi.items()), Fraction(0))


def inner_product_sum(psi: Witness) -> Fraction:
    return sum((v for _, v in psi.items()), Fraction(0))


def _dense_phd(psi: DualWitness) -> int:
    n = psi.n
    vals = list(psi.entries.values())
    den = 1
    for v in vals:
        den = den * v.denominator // math.gcd(den, v.denominator)
    scaled = {x: int(v * den) for x, v in psi.entries.items()}
    total = sum(abs(v) for v in scaled.values())
    size = 1 << n
    if total < 2**62:
        a = np.zeros(size, dtype=np.int64)
        for x, v in scaled.items():
            a[x] = v
        h = 1
        while h < size:
            a = a.reshape(-1, 2, h)
            u, w = a[:, 0, :].copy(), a[:, 1, :].copy()
            a[:, 0, :], a[:, 1, :] = u + w, u - w
            a = a.reshape(-1)
            h *= 2
        nonzero = np.nonzero(a)[0]
        if nonzero.size == 0:
            return n + 1
        return min(int(s).bit_count() for s in nonzero)
    dense = [0] * size
    for x, v in scaled.items():
        dense[x] = v
    coeffs = walsh_hadamard(dense)
    degrees = [s.bit_count() for s, c in enumerate(coeffs) if c]
    return min(degrees) if degrees else n + 1


def _sparse_phd(psi: DualWitness, max_degree: int) -> int:
    for d in range(max_degree + 1):
        for S in combinations(range(psi.n), d):
            mask = sum(1 << i for i in S)
            total = sum((-v if (x & mask).bit_count() % 2 else v for x, v in psi.entries.items()), Fraction(0))
            if total:
                return d
    return max_degree + 1


def _level_weights(block_size: int, s: tuple[int, ...], t: tuple[int, ...]) -> Fraction:
    """Average of ``chi_S`` over the orbit ``t``, where ``|S cap block i| = s[i]``."""
    out = Fraction(1)
    for si, ti in zip(s, t):
        k = krawtchouk(si, ti, block_size)
        if k == 0:
            return Fraction(0)
        out *= Fraction(k, binomial(block_size, si))
    return out


level_weight = _level_weights


def compositions(total: int, parts: int, cap: int) -> Iterator[tuple[int, ...]]:
    """Tuples of ``parts`` integers in ``[0, cap]`` summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap) + 1):
        for rest in compositions(total - first, parts - 1, cap):
            yield (first,) + rest


def level_character_sum(psi: LevelWitness, s: tuple[int, ...]) -> Fraction:
    """``<psi, chi_S>`` for any ``S`` meeting block ``i`` in ``s[i]`` coordinates."""
    return sum(
        (m * _level_weights(psi.block_size, s, t) for t, m in psi.masses.items()),
        Fraction(0),
    )


def _level_phd(psi: LevelWitness, max_degree: Optional[int]) -> int:
    top = psi.n if max_degree is None else min(max_degree, psi.n)
    for d in range(top + 1):
        for s in compositions(d, psi.num_blocks, psi.block_size):
            if level_character_sum(psi, s):
                return d
    return top + 1


def pure_high_degree(psi: Witness, max_degree: Optional[int] = None) -> int:
    """Least degree of a character not orthogonal to ``psi``.

    Equivalently the largest ``d`` such that every character of degree below
    ``d`` annihilates ``psi``. The zero function gets ``n + 1``. For sparse
    explicit witnesses above the dense limit, ``max_degree`` bounds the sweep
    and a return value of ``max_degree + 1`` means "at least that".
    Block-symmetric witnesses are swept exactly through Krawtchouk sums, one
    character per weight profile.
    """
    if isinstance(psi, LevelWitness):
        return _level_phd(psi, max_degree)
    if not psi.entries:
        return psi.n + 1
    if psi.n <= DENSE_LIMIT:
        return _dense_phd(psi)
    if max_degree is None:
        raise InputError("sparse sweep above the dense limit needs max_degree")
    return _sparse_phd(psi, max_degree)


# ---------------------------------------------------------------------------
# correlation and error masses


@dataclass(frozen=True)
class CorrelationReport:
    """Agreement on the domain, penalized mass off it, and their difference.

    ``outside`` is the mass beyond an outer Hamming promise (double-promise
    correlation only); it is reported but neither added nor penalized.
    """

    agreement: Fraction
    penalty: Fraction
    outside: Fraction = Fraction(0)

    @property
    def net(self) -> Fraction:
        return self.agreement - self.penalty


def _entries_with_values(psi: Witness, f: PartialBoolFn):
    """Yield ``(mass, weight, f-value)`` over the support of ``psi``."""
    if isinstance(psi, LevelWitness):
        if f.blocks != (psi.num_blocks, psi.block_size) or f.level_rule is None:
            raise InputError(f"{f.label} does not match the block shape of the witness")
        for t, m in psi.masses.items():
            yield m, sum(t), f.at_levels(t)
    else:
        if f.n != psi.n:
            raise InputError("dimension mismatch")
        for x, v in psi.entries.items():
            yield v, weight(x), f(x)


def correlation(psi: Witness, f: PartialBoolFn, promise_weight: Optional[int] = None) -> CorrelationReport:
    """Net correlation ``sum_dom psi f - sum_{not dom} |psi|``.

    With ``promise_weight = N`` this is the double-promise correlation: only
    points of weight at most ``N`` are scored and the mass above ``N`` is
    reported in ``outside``.
    """
    agree = pen = out = Fraction(0)
    for m, w, val in _entries_with_values(psi, f):
        if promise_weight is not None and w > promise_weight:
            out += abs(m)
        elif val is None:
            pen += abs(m)
        else:
            agree += m * val
    return CorrelationReport(agree, pen, out)


def error_masses(psi: Witness, f: PartialBoolFn) -> tuple[Fraction, Fraction]:
    """Masses of false positives (psi > 0, f TRUE) and false negatives (psi < 0, f FALSE)."""
    pos = neg = Fraction(0)
    for m, _, val in _entries_with_values(psi, f):
        if val is None:
            continue
        if m > 0 and val == TRUE:
            pos += m
        elif m < 0 and val == FALSE:
            neg -= m
    return pos, neg


# ---------------------------------------------------------------------------
# dual block composition


def dual_block_compose(outer: DualWitness, inner: Witness) -> Witness:
    """``(outer * inner)(x_1..x_M) = 2^M outer(sign inner(x_i)) prod |inner(x_i)|``.

    An explicit inner witness on ``m`` bits gives an explicit witness on
    ``M * m`` bits (block ``i`` on bits ``i*m ..``). A block-symmetric inner
    witness with ``b`` blocks gives a block-symmetric witness with ``M * b``
    blocks, where orbit masses compose by the same formula.
    """
    M = outer.n
    scale = Fraction(2**M)
    if isinstance(inner, LevelWitness):
        items = list(inner.masses.items())
        b = inner.num_blocks
        out: dict[tuple[int, ...], Fraction] = {}
        for combo in product(items, repeat=M):
            z = 0
            mag = scale
            levels: tuple[int, ...] = ()
            for i, (t, m) in enumerate(combo):
                if m < 0:
                    z |= 1 << i
                mag *= abs(m)
                levels += t
            val = outer(z)
            if val:
                out[levels] = out.get(levels, Fraction(0)) + val * mag
        return LevelWitness(M * b, inner.block_size, out)
    m_bits = inner.n
    items = list(inner.entries.items())
    entries: dict[int, Fraction] = {}
    for combo in product(items, repeat=M):
        z = 0
        x = 0
        mag = scale
        for i, (xi, v) in enumerate(combo):
            if v < 0:
                z |= 1 << i
            mag *= abs(v)
            x |= xi << (i * m_bits)
        val = outer(z)
        if val:
            entries[x] = val * mag
    return DualWitness(M * m_bits, entries)


def two_point_witness(M: int) -> DualWitness:
    """``phi(all +1) = 1/2``, ``phi(all -1) = -1/2``, zero elsewhere."""
    return DualWitness(M, {0: Fraction(1, 2), (1 << M) - 1: Fraction(-1, 2)})


# ---------------------------------------------------------------------------
# amplification


@dataclass(frozen=True)
class AmplificationReport:
    delta_plus: Fraction
    delta_minus: Fraction
    composed_plus: Fraction
    composed_minus: Fraction
    bound_plus: Fraction
    bound_minus: Fraction

    @property
    def holds(self) -> bool:
        return self.composed_plus <= self.bound_plus and self.composed_minus <= self.bound_minus


def _require_balanced_unit(psi: Witness) -> None:
    if l1_norm(psi) != 1:
        raise InputError("witness must have unit l1 norm")
    if inner_product_sum(psi) != 0:
        raise InputError("witness must have pure high degree at least 1")


def amplify_error(psi: DualWitness, f: PartialBoolFn, M: int) -> tuple[DualWitness, AmplificationReport]:
    """Compose the two-point witness on ``M`` bits with ``psi``.

    Checks the false-positive mass against ``M * delta_plus`` and the
    false-negative mass against ``(2 delta_minus)^M / 2`` for ``OR_M o f``.
    """
    from .core import block_compose

    _require_balanced_unit(psi)
    dp, dm = error_masses(psi, f)
    composed = dual_block_compose(two_point_witness(M), psi)
    cp, cm = error_masses(composed, block_compose(or_fn(M), f))
    report = AmplificationReport(dp, dm, cp, cm, M * dp, (2 * dm) ** M / 2)
    return composed, report


@dataclass(frozen=True)
class DegreeAmplificationReport:
    outer_correlation: Fraction
    delta_plus: Fraction
    delta_minus: Fraction
    correlation: Fraction
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.correlation >= self.bound


def amplify_degree(
    psi: DualWitness, f: PartialBoolFn, M: int, rho: DualWitness
) -> tuple[DualWitness, DegreeAmplificationReport]:
    """``rho * psi`` with the check ``corr >= 9/10 - 4 M delta_plus - 4 delta_minus``."""
    from .core import block_compose

    _require_balanced_unit(psi)
    if rho.n != M or l1_norm(rho) != 1:
        raise InputError("rho must be a unit-norm witness on M bits")
    outer_corr = correlation(rho, or_fn(M)).net
    if outer_corr < Fraction(9, 10):
        raise InputError(f"rho correlates only {outer_corr} < 9/10 with OR_{M}")
    dp, dm = error_masses(psi, f)
    composed = dual_block_compose(rho, psi)
    corr = correlation(composed, block_compose(or_fn(M), f)).net
    bound = Fraction(9, 10) - 4 * M * dp - 4 * dm
    return composed, DegreeAmplificationReport(outer_corr, dp, dm, corr, bound)


# ---------------------------------------------------------------------------
# one-sided error


def one_sided_check(psi: Witness) -> Optional[bool]:
    """Whether ``psi`` is positive on the all-FALSE point, for ``OR_n``.

    Returns ``None`` (not applicable) unless ``psi`` has pure high degree at
    least 1 and positive correlation with OR.
    """
    if isinstance(psi, LevelWitness):
        f = or_fn(psi.block_size) if psi.num_blocks == 1 else None
        if f is None:
            raise InputError("one-sided check needs an explicit or symmetric witness")
        origin = psi.point_value((0,))
    else:
        f = or_fn(psi.n)
        origin = psi(0)
    if inner_product_sum(psi) != 0 or correlation(psi, f).net <= 0:
        return None
    return origin > 0


def cube_fourier(psi: DualWitness) -> list[Fraction]:
    """Dense normalized character coefficients of an explicit witness."""
    dense = [psi(x) for x in range(1 << psi.n)]
    return fourier_coefficients(dense)
