import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_witness

from adeg.core import FALSE, TRUE, InputError, PartialBoolFn, and_fn, block_compose, or_fn, weight
from adeg.duals import (
    DualWitness,
    LevelWitness,
    amplify_error,
    correlation,
    cube_fourier,
    dual_block_compose,
    error_masses,
    inner_product_sum,
    l1_norm,
    one_sided_check,
    pure_high_degree,
    symmetric_witness,
    two_point_witness,
)

HALF = Fraction(1, 2)


def chi(mask: int, x: int) -> int:
    return -1 if (mask & x).bit_count() % 2 else 1


def phd_oracle(psi: DualWitness) -> int:
    """Least |S| with a non-vanishing character sum, by direct summation."""
    n = psi.n
    for d in range(n + 1):
        for S in range(1 << n):
            if S.bit_count() == d and sum(v * chi(S, x) for x, v in psi.items()):
                return d
    return n + 1


@st.composite
def witnesses(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 10**6))
    d = draw(st.integers(0, n))
    return random_witness(random.Random(seed), n, d)


@st.composite
def level_witnesses(draw):
    R = draw(st.integers(1, 2))
    N = draw(st.integers(1, 4))
    keys = list(product(range(N + 1), repeat=R))
    masses = {t: Fraction(draw(st.integers(-4, 4)), draw(st.integers(1, 4))) for t in keys}
    return LevelWitness(R, N, masses)


def test_trivial_examples():
    psi = DualWitness(1, {0: HALF, 1: -HALF})
    assert l1_norm(psi) == 1 and pure_high_degree(psi) == 1
    assert pure_high_degree(DualWitness(3, {5: Fraction(1)})) == 0
    ident = PartialBoolFn(1, lambda x: TRUE if x else FALSE, "id")
    assert correlation(psi, ident).net == 1
    nowhere = PartialBoolFn(1, lambda x: None, "empty")
    assert correlation(psi, nowhere).net == -1


@given(witnesses())
def test_phd_matches_character_sweep(psi):
    assert pure_high_degree(psi) == phd_oracle(psi)


@given(level_witnesses())
def test_level_phd_matches_dense(psi):
    dense = psi.materialize()
    assert pure_high_degree(psi) == pure_high_degree(dense) == phd_oracle(dense)
    assert l1_norm(psi) == l1_norm(dense)


@given(witnesses(max_n=4))
def test_cube_fourier_matches_definition(psi):
    coeffs = cube_fourier(psi)
    for S in range(1 << psi.n):
        assert coeffs[S] == sum((v * chi(S, x) for x, v in psi.items()), Fraction(0)) / 2**psi.n


def test_two_point_composition_example():
    Phi = DualWitness(2, {0: HALF, 3: -HALF})
    psi = DualWitness(1, {0: HALF, 1: -HALF})
    comp = dual_block_compose(Phi, psi)
    assert comp.entries == {0: HALF, 3: -HALF}
    assert l1_norm(comp) == 1
    assert two_point_witness(2) == Phi


@given(st.integers(0, 10**6))
def test_composition_laws(seed):
    rng = random.Random(seed)
    M, m = rng.randint(1, 3), rng.randint(1, 2)
    Phi = random_witness(rng, M, rng.randint(0, M))
    psi = random_witness(rng, m, rng.randint(1, m))
    comp = dual_block_compose(Phi, psi)
    assert l1_norm(comp) == 1
    assert pure_high_degree(comp) >= pure_high_degree(Phi) * pure_high_degree(psi)
    # composition formula at every point
    for x in range(1 << comp.n):
        blocks = [(x >> (i * m)) & ((1 << m) - 1) for i in range(M)]
        vals = [psi(b) for b in blocks]
        z = sum(1 << i for i, v in enumerate(vals) if v < 0)
        expected = 2**M * Phi(z)
        for v in vals:
            expected *= abs(v)
        assert comp(x) == expected


@given(st.integers(0, 10**6))
def test_level_composition_matches_explicit(seed):
    rng = random.Random(seed)
    M, N = rng.randint(1, 2), rng.randint(1, 3)
    Phi = random_witness(rng, M, rng.randint(0, M))
    levels = [Fraction(rng.randint(-3, 3)) for _ in range(N + 1)]
    levels[0] -= sum(levels)
    norm = sum(abs(v) for v in levels)
    if not norm:
        return
    psi = symmetric_witness([v / norm for v in levels], N)
    composed = dual_block_compose(Phi, psi)
    explicit = dual_block_compose(Phi, psi.materialize())
    assert composed.materialize().entries == explicit.entries


@given(witnesses(max_n=3))
def test_error_masses_by_definition(psi):
    f = or_fn(psi.n)
    pos, neg = error_masses(psi, f)
    assert pos == sum((v for x, v in psi.items() if v > 0 and f(x) == TRUE), Fraction(0))
    assert neg == sum((-v for x, v in psi.items() if v < 0 and f(x) == FALSE), Fraction(0))


def test_double_promise_correlation():
    psi = symmetric_witness([HALF, Fraction(-1, 4), Fraction(-1, 4)], 2)
    rep = correlation(psi, or_fn(2), promise_weight=1)
    assert rep.outside == Fraction(1, 4)
    assert rep.net == HALF + Fraction(1, 4)


def test_one_sided_check_applicability():
    assert one_sided_check(DualWitness(1, {0: HALF, 1: -HALF})) is True
    assert one_sided_check(DualWitness(1, {0: -HALF, 1: HALF})) is None
    assert one_sided_check(DualWitness(2, {0: Fraction(1)})) is None


def test_amplify_error_requires_balanced_unit_witness():
    with pytest.raises(InputError):
        amplify_error(DualWitness(1, {0: Fraction(1)}), or_fn(1), 2)


def test_amplify_error_example():
    psi = DualWitness(1, {0: HALF, 1: -HALF})
    composed, rep = amplify_error(psi, or_fn(1), 3)
    assert rep.delta_plus == 0 and rep.delta_minus == 0
    assert rep.holds
    assert composed == dual_block_compose(two_point_witness(3), psi)
    g = block_compose(or_fn(3), or_fn(1))
    assert correlation(composed, g).net == 1


def test_witness_arithmetic():
    a = DualWitness(2, {0: HALF, 3: -HALF})
    b = DualWitness(2, {0: HALF, 1: Fraction(1)})
    assert (a - b).entries == {3: -HALF, 1: Fraction(-1)}
    assert (a + b)(0) == 1
    assert inner_product_sum(a) == 0
    with pytest.raises(InputError):
        DualWitness(1, {2: Fraction(1)})
    with pytest.raises(InputError):
        LevelWitness(1, 2, {(3,): Fraction(1)})


def test_level_correlation_shape_mismatch():
    with pytest.raises(InputError):
        correlation(symmetric_witness([HALF, -HALF], 1), and_fn(2))


def test_symmetric_witness_point_values():
    psi = symmetric_witness([HALF, Fraction(-1, 4), Fraction(-1, 4)], 2)
    dense = psi.materialize()
    assert dense(0) == HALF and dense(1) == Fraction(-1, 8) and dense(3) == Fraction(-1, 4)
    assert all(psi(x) == dense(x) for x in range(4))
    assert sum(weight(x) for x in dense.entries) == 4
