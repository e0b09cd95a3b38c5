import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_witness

from adeg.core import InputError, and_fn, or_fn, thr_fn
from adeg.duals import correlation, dual_block_compose, l1_norm, pure_high_degree, two_point_witness
from adeg.lp import max_correlation_dual
from adeg.witnesses import (
    DegenerateParameters,
    _node_values,
    build_correction,
    build_dist_witness,
    build_ist_witness,
    build_or_witness,
    build_surj_witness,
    build_thr_witness,
    decay_check,
    dist_parameter_block,
    iroot_ceil,
    ist_parameter_block,
    omega_from_levels,
    omega_from_lp,
    or_nodes,
    sqrt_ceil,
    sqrt_floor,
    surj_parameter_block,
    symmetrize_witness,
    tail_exponent,
    tail_mass,
    tail_mass_bruteforce,
    univariate_phd,
    zero_out,
)


def literal_omega(T, nodes, flip):
    """``(-1)^(flip + T - t) C(T, t) prod_{r in [0, T] \\ S} (t - r) / T!``, normalized.

    The product vanishes off the node set, so no support test is needed.
    """
    S = set(nodes)
    raw = []
    for t in range(T + 1):
        prod = 1
        for r in range(T + 1):
            if r not in S:
                prod *= t - r
        raw.append(Fraction((-1) ** (flip + T - t) * math.comb(T, t) * prod, math.factorial(T)))
    total = sum(abs(v) for v in raw)
    return tuple(v / total for v in raw)


@st.composite
def node_sets(draw):
    T = draw(st.integers(1, 40))
    nodes = draw(st.sets(st.integers(0, T), min_size=2, max_size=min(T + 1, 7)))
    return T, sorted(nodes), draw(st.integers(0, 1))


@given(node_sets())
def test_node_values_match_literal_formula(case):
    T, nodes, flip = case
    values = _node_values(T, nodes, flip)
    assert values == literal_omega(T, nodes, flip)
    assert sum(values) == 0
    assert univariate_phd(values) >= len(nodes) - 1


@given(node_sets())
def test_symmetrized_phd_equals_univariate(case):
    T, nodes, flip = case
    values = _node_values(T, nodes, flip)
    psi = symmetrize_witness(values, T)
    assert pure_high_degree(psi) == univariate_phd(values)
    assert omega_from_levels(psi) == values
    if T <= 10:
        assert pure_high_degree(psi.materialize()) == univariate_phd(values)


def test_or_witness_example():
    w = build_or_witness(128, Fraction(1, 2))
    assert or_nodes(128, Fraction(1, 2)) == (16, 2, [0, 1, 16, 32, 128])
    assert w.meta["S"] == (0, 1, 16, 32, 128)
    assert w.passed
    psi = symmetrize_witness(w, 128)
    assert pure_high_degree(psi) == 4
    assert correlation(psi, or_fn(128)).net == w.meta["correlation"] >= Fraction(1, 2)


def test_or_witness_degenerate_and_bad_parameters():
    with pytest.raises(DegenerateParameters):
        build_or_witness(20, Fraction(1, 2))
    with pytest.raises(InputError):
        build_or_witness(10, Fraction(1, 20))


def test_thr_witness_k1_is_two_point():
    w = build_thr_witness(1, 4, 1)
    assert w.values[:2] == (Fraction(1, 2), Fraction(-1, 2))
    assert w.passed


def test_thr_witness_k2_desk_scale():
    w = build_thr_witness(2, 64, 16)
    checks = {c.name: c.passed for c in w.checks}
    assert checks["pure-high-degree"] and checks["unit-norm"] and checks["pivot-negative"]
    # the finite-N false-positive bound is recorded as failing (see the decisions ledger)
    assert not checks["false-positive-mass"]
    assert w.meta["false_positive"] == Fraction(3, 1030)


@given(st.integers(1, 10**6), st.integers(1, 5))
def test_integer_roots(n, k):
    r = iroot_ceil(n, k)
    assert r**k >= n and (r - 1) ** k < n


@given(st.fractions(min_value=0, max_value=10**4, max_denominator=100))
def test_sqrt_rounding(q):
    lo, hi = sqrt_floor(q), sqrt_ceil(q)
    assert lo * lo <= q < (lo + 1) ** 2
    assert hi * hi >= q and (hi == 0 or (hi - 1) ** 2 < q)


def test_decay_check_sound_direction():
    values = (Fraction(0), Fraction(1, 2), Fraction(1, 8))
    assert decay_check(values, 1, 0).passed
    assert decay_check(values, Fraction(1, 2), 0).passed
    assert not decay_check(values, Fraction(1, 2), Fraction(1, 1000)).passes[0]


# ---------------------------------------------------------------------------
# tail mass


@st.composite
def split_witnesses(draw):
    """Random level masses with positive and negative parts of mass 1/2 each."""
    R = draw(st.integers(1, 3))
    N = draw(st.integers(1, 12 // R))
    T = draw(st.integers(1, N))
    mags = [draw(st.integers(0, 3)) for _ in range(T + 1)]
    signs = [draw(st.sampled_from([1, -1])) for _ in range(T + 1)]
    signs[0], signs[-1] = 1, -1
    mags[0], mags[-1] = max(mags[0], 1), max(mags[-1], 1)
    pos = sum(m for m, s in zip(mags, signs) if s > 0)
    neg = sum(m for m, s in zip(mags, signs) if s < 0)
    values = tuple(Fraction(m, 2 * (pos if s > 0 else neg)) * s for m, s in zip(mags, signs))
    seed = draw(st.integers(0, 10**6))
    Phi = random_witness(random.Random(seed), R, 0)
    return Phi, values, N


@given(split_witnesses())
def test_tail_dp_equals_bruteforce(case):
    Phi, values, N = case
    assert tail_mass(Phi, values, N) == tail_mass_bruteforce(Phi, values, N)


def test_tail_requires_split_witness():
    with pytest.raises(InputError):
        tail_mass(two_point_witness(2), (Fraction(1), Fraction(0)), 2)


def test_tail_exponent():
    assert tail_exponent(Fraction(0), 4, 2) is None
    assert tail_exponent(Fraction(1, 2), 4, 2) == 0
    assert tail_exponent(Fraction(1, 16**2), 4, 2) == 1
    assert tail_exponent(Fraction(1, 16**2 + 1), 4, 2) == 1


# ---------------------------------------------------------------------------
# correction and zeroing


def _small_composition():
    _, Phi, _ = max_correlation_dual(and_fn(2), Fraction(2, 3))
    omega = omega_from_lp(or_fn(3), 1)
    xi = dual_block_compose(Phi, symmetrize_witness(omega, 3))
    return Phi, omega, xi


def test_level_correction_is_optimal_among_explicit():
    _, _, xi = _small_composition()
    D = pure_high_degree(xi)
    level = build_correction(xi, 3, D, enforce_precondition=False)
    explicit = build_correction(xi.materialize(), 3, D, R=2, enforce_precondition=False)
    assert level.norm == explicit.norm > 0
    assert pure_high_degree(level.nu) >= D
    assert pure_high_degree(explicit.nu) >= D


def test_correction_enforces_precondition():
    _, _, xi = _small_composition()
    with pytest.raises(InputError):
        build_correction(xi, 3, 2)


def test_zero_out_properties():
    Phi, omega, xi = _small_composition()
    z = zero_out(Phi, omega, 3, degree=pure_high_degree(xi))
    assert all(sum(t) <= 3 for t in z.zeta.masses)
    assert l1_norm(z.zeta) == 1
    assert pure_high_degree(z.zeta) >= z.degree
    nu = z.values["nu_norm"]
    assert l1_norm(z.zeta - z.xi) == z.values["drift"] <= 2 * nu / (1 - nu)


def test_zero_out_default_degree_uses_tail_exponent():
    Phi, omega, _ = _small_composition()
    z = zero_out(Phi, omega, 3)
    assert z.degree == min(z.phd_outer_inner, z.tail_exponent)


def test_pipelines():
    surj = build_surj_witness(2, N=6)
    assert surj.passed
    assert pure_high_degree(surj.witness) >= 2
    assert surj.zeroing.values["nu_norm"] == Fraction(1, 12)
    dist = build_dist_witness(2, 2, N=8)
    assert dist.passed
    assert dist.zeroing.values["nu_norm"] == Fraction(3, 50)
    with pytest.raises(InputError):
        build_surj_witness(2)


# ---------------------------------------------------------------------------
# parameter blocks


def test_surj_block_values():
    b = surj_parameter_block(4)
    assert b["alpha"] == 3400 and b["delta"] == Fraction(1, 20)
    assert b["length_factor"] == 1167 == math.ceil(20 * math.sqrt(3400))
    assert b["d"] == 2 and b["T"] == sqrt_floor(Fraction(4, 2)) ** 2 == 1
    names = {c.name: c.passed for c in b.checks}
    assert names["alpha"] and names["delta"] and not names["N-identity"]


@pytest.mark.parametrize("k", [2, 3, 4])
def test_dist_block_values(k):
    for R in (1, 7, 64):
        b = dist_parameter_block(R, k)
        assert b["alpha"] == (2 * k) ** k
        assert b["T"] == math.isqrt((8 * k) ** k * R)
        assert b.passed


def test_ist_block_and_witness():
    b = ist_parameter_block(3, Fraction(2, 3))
    assert b["delta"] == Fraction(1, 6) and b["N"] == b["T"]
    res = build_ist_witness(3, Fraction(2, 3), N=96)
    assert res.passed
    assert res.correlation >= res.bound.hi
    assert res.zeroing is not None and res.zeroing.passed


def test_ist_accepts_lp_inner_witness():
    res = build_ist_witness(2, Fraction(2, 3), N=8, omega=omega_from_lp(or_fn(8), 1), zero=False)
    assert res.correlation == Fraction(63, 64)


def test_thr_inner_lp_witness_for_dist():
    omega = omega_from_lp(thr_fn(2, 6), 1)
    assert sum(omega) == 0 and sum(abs(v) for v in omega) == 1
