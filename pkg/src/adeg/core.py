"""Cube points, partial Boolean functions, list inputs and input-level reductions.

Conventions used throughout the package:

* a cube point lives in ``{-1, +1}^n`` and ``-1`` means logical TRUE;
* internally a point is packed into an ``int`` whose bit ``i`` is set iff
  coordinate ``i`` equals ``-1``, so the Hamming weight is the popcount;
* block-structured points on ``R`` blocks of ``N`` bits place block ``r``
  (0-based) on bits ``r*N .. r*N + N - 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator, Optional, Sequence

from . import intervals
from .intervals import CertifiedReal

TRUE = -1
FALSE = 1


class InputError(ValueError):
    """Raised for malformed or out-of-range inputs."""


@dataclass(frozen=True)
class Check:
    """One verified property of a construction.

    Informative checks (asymptotic bounds evaluated at desk scale) are
    reported but never decide whether a certificate is issued.
    """

    name: str
    passed: bool
    detail: str = ""
    informative: bool = False


def all_pass(checks: Sequence[Check]) -> bool:
    return all(c.passed for c in checks if not c.informative)


def weight(x: int) -> int:
    """Hamming weight (number of TRUE coordinates) of a packed point."""
    return x.bit_count()


def block_levels(x: int, num_blocks: int, block_size: int) -> tuple[int, ...]:
    mask = (1 << block_size) - 1
    return tuple(((x >> (r * block_size)) & mask).bit_count() for r in range(num_blocks))


def pack_signs(signs: Sequence[int]) -> int:
    x = 0
    for i, s in enumerate(signs):
        if s == TRUE:
            x |= 1 << i
        elif s != FALSE:
            raise InputError(f"sign values must be +1 or -1, got {s}")
    return x


def unpack_signs(x: int, n: int) -> tuple[int, ...]:
    return tuple(TRUE if (x >> i) & 1 else FALSE for i in range(n))


@dataclass(frozen=True)
class CubePoint:
    """A point of ``{-1, 1}^n``."""

    n: int
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1 or len(self.bits) != self.n:
            raise InputError("CubePoint needs n >= 1 sign values")
        pack_signs(self.bits)

    @classmethod
    def from_packed(cls, x: int, n: int) -> "CubePoint":
        return cls(n, unpack_signs(x, n))

    @classmethod
    def from_string(cls, s: str) -> "CubePoint":
        try:
            bits = tuple({"+": FALSE, "-": TRUE}[ch] for ch in s)
        except KeyError as exc:
            raise InputError(f"cube point strings use '+' and '-' only: {s!r}") from exc
        return cls(len(bits), bits)

    @property
    def packed(self) -> int:
        return pack_signs(self.bits)

    @property
    def hamming_weight(self) -> int:
        return sum(1 for b in self.bits if b == TRUE)

    def to_string(self) -> str:
        return "".join("-" if b == TRUE else "+" for b in self.bits)


def point_to_string(x: int, n: int) -> str:
    return "".join("-" if (x >> i) & 1 else "+" for i in range(n))


def point_from_string(s: str) -> int:
    return CubePoint.from_string(s).packed


# ---------------------------------------------------------------------------
# promise domains


@dataclass(frozen=True)
class PromiseDomain:
    """Membership predicate for the promise sets used by the constructions.

    ``kind`` is one of ``full-cube``, ``hamming-at-most`` (parameter ``T``),
    ``block-hamming-at-most`` (``N`` and ``R``: total weight at most ``N`` on
    ``R`` blocks of ``N`` bits) and ``gap-and-domain`` (``gamma``, ``R`` and
    block size ``N``: the number of blocks containing a TRUE bit is either
    ``R`` or at most ``gamma * R``).
    """

    kind: str
    T: Optional[int] = None
    N: Optional[int] = None
    R: Optional[int] = None
    gamma: Optional[Fraction] = None

    def __post_init__(self) -> None:
        needed = {
            "full-cube": (),
            "hamming-at-most": ("T",),
            "block-hamming-at-most": ("N", "R"),
            "gap-and-domain": ("gamma", "R", "N"),
        }
        if self.kind not in needed:
            raise InputError(f"unknown promise kind {self.kind!r}")
        for name in needed[self.kind]:
            if getattr(self, name) is None:
                raise InputError(f"promise {self.kind} needs parameter {name}")

    def contains(self, x: int) -> bool:
        if self.kind == "full-cube":
            return True
        if self.kind == "hamming-at-most":
            return weight(x) <= self.T
        if self.kind == "block-hamming-at-most":
            return weight(x) <= self.N
        levels = block_levels(x, self.R, self.N)
        return gap_and_count_ok(sum(1 for t in levels if t > 0), self.R, self.gamma)

    def contains_levels(self, levels: Sequence[int]) -> bool:
        if self.kind == "full-cube":
            return True
        if self.kind == "hamming-at-most":
            return sum(levels) <= self.T
        if self.kind == "block-hamming-at-most":
            return sum(levels) <= self.N
        return gap_and_count_ok(sum(1 for t in levels if t > 0), self.R, self.gamma)


def gap_and_count_ok(true_blocks: int, R: int, gamma: Fraction) -> bool:
    return true_blocks == R or true_blocks <= Fraction(gamma) * R


# ---------------------------------------------------------------------------
# partial Boolean functions

Rule = Callable[[int], Optional[int]]
LevelRule = Callable[[tuple[int, ...]], Optional[int]]


@dataclass(frozen=True)
class PartialBoolFn:
    """A (possibly partial) Boolean function on ``{-1, 1}^n``.

    ``rule`` maps a packed point to ``+1``, ``-1`` or ``None`` (outside the
    domain). When the function is invariant under permutations inside each of
    ``R`` blocks of ``N`` bits, ``blocks = (R, N)`` and ``level_rule`` gives the
    value from the tuple of block weights. Symmetric functions use ``(1, n)``.
    """

    n: int
    rule: Rule
    label: str
    blocks: Optional[tuple[int, int]] = None
    level_rule: Optional[LevelRule] = field(default=None, compare=False)

    def __call__(self, x: int) -> Optional[int]:
        return self.rule(x)

    def at_levels(self, levels: Sequence[int]) -> Optional[int]:
        if self.level_rule is None:
            raise InputError(f"{self.label} is not block-symmetric")
        return self.level_rule(tuple(levels))

    @property
    def is_symmetric(self) -> bool:
        return self.blocks == (1, self.n) and self.level_rule is not None

    def points(self) -> Iterator[int]:
        return iter(range(1 << self.n))

    def domain(self) -> Iterator[int]:
        return (x for x in range(1 << self.n) if self.rule(x) is not None)

    def is_total(self) -> bool:
        if self.level_rule is not None and self.blocks is not None:
            R, N = self.blocks
            return all(self.level_rule(t) is not None for t in product(range(N + 1), repeat=R))
        return all(self.rule(x) is not None for x in range(1 << self.n))


def symmetric_fn(n: int, by_weight: Callable[[int], Optional[int]], label: str) -> PartialBoolFn:
    """Symmetric function whose value depends only on the Hamming weight."""
    return PartialBoolFn(
        n=n,
        rule=lambda x: by_weight(weight(x)),
        label=label,
        blocks=(1, n),
        level_rule=lambda t: by_weight(t[0]),
    )


def and_fn(n: int) -> PartialBoolFn:
    return symmetric_fn(n, lambda t: TRUE if t == n else FALSE, f"AND_{n}")


def or_fn(n: int) -> PartialBoolFn:
    return symmetric_fn(n, lambda t: TRUE if t > 0 else FALSE, f"OR_{n}")


def nor_fn(n: int) -> PartialBoolFn:
    return symmetric_fn(n, lambda t: TRUE if t == 0 else FALSE, f"NOR_{n}")


def parity_fn(n: int) -> PartialBoolFn:
    return symmetric_fn(n, lambda t: TRUE if t % 2 else FALSE, f"PARITY_{n}")


def thr_fn(k: int, n: int) -> PartialBoolFn:
    return symmetric_fn(n, lambda t: TRUE if t >= k else FALSE, f"THR^{k}_{n}")


def maj_fn(n: int) -> PartialBoolFn:
    """Strict majority: TRUE iff more than half the coordinates are TRUE."""
    return symmetric_fn(n, lambda t: TRUE if 2 * t > n else FALSE, f"MAJ_{n}")


def constant_fn(n: int, value: int) -> PartialBoolFn:
    return symmetric_fn(n, lambda t: value, f"CONST{value:+d}_{n}")


def dictator_fn(n: int, i: int = 0) -> PartialBoolFn:
    return PartialBoolFn(n, lambda x: TRUE if (x >> i) & 1 else FALSE, f"x{i}_{n}")


def gap_and_fn(R: int, gamma: Fraction) -> PartialBoolFn:
    """GapAND: TRUE on the all-TRUE point, FALSE with at most gamma*R TRUEs."""
    gamma = Fraction(gamma)

    def by_weight(t: int) -> Optional[int]:
        if t == R:
            return TRUE
        if t <= gamma * R:
            return FALSE
        return None

    return symmetric_fn(R, by_weight, f"GapAND^{gamma}_{R}")


def restrict_weight(f: PartialBoolFn, limit: int) -> PartialBoolFn:
    """Restriction of ``f`` to inputs of total Hamming weight at most ``limit``."""
    level_rule = None
    if f.level_rule is not None:
        lr = f.level_rule
        level_rule = lambda t: lr(t) if sum(t) <= limit else None  # noqa: E731
    rule = f.rule
    return PartialBoolFn(
        n=f.n,
        rule=lambda x: rule(x) if weight(x) <= limit else None,
        label=f"{f.label}|H<={limit}",
        blocks=f.blocks,
        level_rule=level_rule,
    )


def block_compose(outer: PartialBoolFn, inner: PartialBoolFn) -> PartialBoolFn:
    """``outer o inner`` on ``outer.n`` blocks, each an input to ``inner``."""
    R, N = outer.n, inner.n

    def rule(x: int) -> Optional[int]:
        mask = (1 << N) - 1
        signs = []
        for r in range(R):
            v = inner((x >> (r * N)) & mask)
            if v is None:
                return None
            signs.append(v)
        return outer(pack_signs(signs))

    level_rule = None
    if inner.is_symmetric:

        def level_rule(t: tuple[int, ...]) -> Optional[int]:
            signs = []
            for ti in t:
                v = inner.at_levels((ti,))
                if v is None:
                    return None
                signs.append(v)
            return outer(pack_signs(signs))

    return PartialBoolFn(
        n=R * N,
        rule=rule,
        label=f"{outer.label}o{inner.label}",
        blocks=(R, N) if inner.is_symmetric else None,
        level_rule=level_rule,
    )


def function_from_spec(name: str, n: int, k: Optional[int] = None) -> PartialBoolFn:
    """Build a named symmetric function (used by the command line)."""
    key = name.upper()
    if key == "AND":
        return and_fn(n)
    if key == "OR":
        return or_fn(n)
    if key == "NOR":
        return nor_fn(n)
    if key == "PARITY":
        return parity_fn(n)
    if key == "MAJ":
        return maj_fn(n)
    if key == "THR":
        if k is None:
            raise InputError("THR needs k")
        return thr_fn(k, n)
    raise InputError(f"unknown function {name!r}")


# ---------------------------------------------------------------------------
# list inputs


@dataclass(frozen=True)
class ListInput:
    """A list of ``N`` items from ``[R]_0 = {0, 1, ..., R}``; 0 is the dummy."""

    N: int
    R: int
    items: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(int(v) for v in self.items))
        if self.N < 1 or self.R < 1:
            raise InputError("N and R must be positive")
        if len(self.items) != self.N:
            raise InputError(f"expected {self.N} items, got {len(self.items)}")
        for v in self.items:
            if not 0 <= v <= self.R:
                raise InputError(f"item {v} outside [0, {self.R}]")

    @property
    def frequencies(self) -> tuple[int, ...]:
        """``f_0, ..., f_R``; index 0 counts dummy items."""
        counts = [0] * (self.R + 1)
        for v in self.items:
            counts[v] += 1
        return tuple(counts)

    @property
    def distribution(self) -> tuple[Fraction, ...]:
        """``p_i = f_i / N`` for ``i = 1..R``."""
        f = self.frequencies
        return tuple(Fraction(f[i], self.N) for i in range(1, self.R + 1))

    def to_json(self) -> str:
        return json.dumps({"N": self.N, "R": self.R, "items": list(self.items)})

    @classmethod
    def from_json(cls, text: str) -> "ListInput":
        try:
            data = json.loads(text)
            return cls(int(data["N"]), int(data["R"]), tuple(data["items"]))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise InputError(f"malformed list input: {exc}") from exc


def all_lists(N: int, R: int, dummy: bool) -> Iterator[ListInput]:
    lo = 0 if dummy else 1
    for items in product(range(lo, R + 1), repeat=N):
        yield ListInput(N, R, items)


def _require_no_dummy(s: ListInput) -> None:
    if 0 in s.items:
        raise InputError("dummy item 0 is not allowed here")


def eval_surj(s: ListInput, dummy: bool = False) -> int:
    if not dummy:
        _require_no_dummy(s)
    f = s.frequencies
    return TRUE if all(f[j] > 0 for j in range(1, s.R + 1)) else FALSE


def eval_dist_k(s: ListInput, k: int, dummy: bool = False) -> int:
    if k < 1 or k > s.N:
        raise InputError(f"k must lie in [1, N], got k={k}, N={s.N}")
    if not dummy:
        _require_no_dummy(s)
    f = s.frequencies
    return TRUE if any(f[j] >= k for j in range(1, s.R + 1)) else FALSE


def eval_ist(s: ListInput, gamma: Fraction) -> Optional[int]:
    """Image size testing; ``None`` marks a gap input."""
    image = sum(1 for j in range(1, s.R + 1) if s.frequencies[j] > 0)
    if image == s.R:
        return TRUE
    if image <= Fraction(gamma) * s.R:
        return FALSE
    return None


def statistical_distance_from_uniform(s: ListInput) -> Fraction:
    u = Fraction(1, s.R)
    return sum((abs(p - u) for p in s.distribution), Fraction(0)) / 2


def shannon_entropy(s: ListInput, prec: int = intervals.DEFAULT_PRECISION) -> CertifiedReal:
    """Entropy in bits of the item distribution, as a certified enclosure.

    The enclosure width is checked to be below ``2**-50``.
    """
    h = intervals.entropy_of(s.distribution, prec)
    if h.width >= Fraction(1, 2**50):
        raise ArithmeticError("entropy enclosure wider than 2^-50; raise prec")
    return h


# ---------------------------------------------------------------------------
# reductions


def reduce_dsurj_to_surj(s: ListInput) -> ListInput:
    fresh = s.R + 1
    items = tuple(fresh if v == 0 else v for v in s.items) + (fresh,)
    return ListInput(s.N + 1, s.R + 1, items)


def reduce_ddist_to_dist(s: ListInput, k: int) -> ListInput:
    if k < 2:
        raise InputError("the dummy reduction for k-distinctness needs k >= 2")
    items = tuple(s.R + i if v == 0 else v for i, v in enumerate(s.items, start=1))
    return ListInput(s.N, s.R + s.N, items)


def pair_code(r: int, b: int) -> int:
    """Encode ``(r, b)`` in ``[R] x {0, 1}`` as the item ``2(r-1) + b + 1``."""
    return 2 * (r - 1) + b + 1


def pair_decode(item: int) -> tuple[int, int]:
    return (item - 1) // 2 + 1, (item - 1) % 2


def entropy_pair_transform(u: ListInput) -> tuple[ListInput, ListInput]:
    """Build the two length-``4N`` lists over ``[R] x {0,1}`` from ``u``.

    For ``i = 1..N`` and ``j = 0..3`` (with ``c_i = ceil(R i / N)``):

    * first list: ``(u_i, j)`` for ``j`` in ``{0, 1}``, ``(c_i, j - 2)`` for
      ``j`` in ``{2, 3}``;
    * second list: ``(u_i, 0)`` for ``j`` in ``{0, 1}``, ``(c_i, 1)`` for ``j``
      in ``{2, 3}``.

    Pairs are encoded with :func:`pair_code`, so both lists have range ``2R``.
    """
    N, R = u.N, u.R
    if N % R:
        raise InputError("R must divide N")
    _require_no_dummy(u)
    first: list[int] = []
    second: list[int] = []
    for i, ui in enumerate(u.items, start=1):
        ci = -(-R * i // N)
        for j in range(4):
            if j < 2:
                first.append(pair_code(ui, j))
                second.append(pair_code(ui, 0))
            else:
                first.append(pair_code(ci, j - 2))
                second.append(pair_code(ci, 1))
    return ListInput(4 * N, 2 * R, tuple(first)), ListInput(4 * N, 2 * R, tuple(second))


def property_to_block(s: ListInput) -> CubePoint:
    """Indicator encoding: block ``r`` has TRUE at position ``i`` iff ``s_i = r``."""
    N, R = s.N, s.R
    x = 0
    for i, v in enumerate(s.items):
        if v:
            x |= 1 << ((v - 1) * N + i)
    return CubePoint.from_packed(x, N * R)


def log2_ceil(m: int) -> int:
    return max(0, (m - 1).bit_length())


def bits_per_item(R: int, dummy: bool) -> int:
    """Bits needed to encode one item of ``[R]_0`` (or ``[R]``), padded up."""
    return max(1, log2_ceil(R + 1 if dummy else R))


def decode_item(code: int, R: int, dummy: bool) -> int:
    """Map a binary code to an item; codes past the range repeat the last item."""
    item = code if dummy else code + 1
    return min(item, R)


def decode_list(x: int, N: int, R: int, dummy: bool) -> ListInput:
    B = bits_per_item(R, dummy)
    mask = (1 << B) - 1
    items = tuple(decode_item((x >> (i * B)) & mask, R, dummy) for i in range(N))
    return ListInput(N, R, items)


def binomial(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0


@dataclass(frozen=True)
class EntropyPairReport:
    source: ListInput
    first: ListInput
    second: ListInput
    h_source: CertifiedReal
    h_first: CertifiedReal
    h_second: CertifiedReal
    distance: Fraction
    checks: tuple[Check, ...]


def entropy_pair_report(u: ListInput, prec: int = intervals.DEFAULT_PRECISION) -> EntropyPairReport:
    """Entropies of the two transformed lists and the comparison inequalities.

    With ``v = H(u)/2 + log2(R)/2`` and ``delta`` the distance of ``u`` from
    uniform, checks ``H(first) = v + 1`` and
    ``1 - delta <= H(first) - H(second) <= H((1 + delta)/2)``. Every comparison
    is decided on enclosure endpoints, so a pass is sound.
    """
    first, second = entropy_pair_transform(u)
    h_u = shannon_entropy(u, prec)
    h1 = shannon_entropy(first, prec)
    h2 = shannon_entropy(second, prec)
    delta = statistical_distance_from_uniform(u)
    v = h_u / 2 + intervals.log2(u.R, prec) / 2
    gap = h1 - (v + 1)
    slack = Fraction(1, 2**50)
    diff = h1 - h2
    upper = intervals.binary_entropy((1 + delta) / 2, prec)
    checks = (
        Check("first-entropy", -slack <= gap.lo and gap.hi <= slack, f"H(first) - v - 1 in [{float(gap.lo):.3g}, {float(gap.hi):.3g}]"),
        Check("difference-lower", intervals.certainly_le(1 - delta, diff), f"1 - {delta} <= {float(diff.mid):.12g}"),
        Check("difference-upper", intervals.certainly_le(diff, upper), f"{float(diff.mid):.12g} <= H((1+delta)/2) = {float(upper.mid):.12g}"),
        Check("multiples-of-quarter-N", all(p * 4 * u.N == int(p * 4 * u.N) for p in first.distribution + second.distribution)),
    )
    return EntropyPairReport(u, first, second, h_u, h1, h2, delta, checks)
