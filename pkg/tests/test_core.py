import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adeg import intervals
from adeg.core import (
    FALSE,
    TRUE,
    CubePoint,
    InputError,
    ListInput,
    all_lists,
    and_fn,
    bits_per_item,
    block_compose,
    decode_list,
    entropy_pair_report,
    entropy_pair_transform,
    eval_dist_k,
    eval_ist,
    eval_surj,
    function_from_spec,
    gap_and_fn,
    maj_fn,
    or_fn,
    pack_signs,
    parity_fn,
    point_from_string,
    point_to_string,
    property_to_block,
    reduce_ddist_to_dist,
    reduce_dsurj_to_surj,
    restrict_weight,
    shannon_entropy,
    statistical_distance_from_uniform,
    thr_fn,
    unpack_signs,
    weight,
)


@st.composite
def lists(draw, max_N=8, max_R=5, dummy=False):
    N = draw(st.integers(1, max_N))
    R = draw(st.integers(1, max_R))
    lo = 0 if dummy else 1
    items = draw(st.lists(st.integers(lo, R), min_size=N, max_size=N))
    return ListInput(N, R, tuple(items))


# ---------------------------------------------------------------------------
# cube points


@given(st.lists(st.sampled_from([TRUE, FALSE]), min_size=1, max_size=12))
def test_pack_roundtrip(signs):
    x = pack_signs(signs)
    assert unpack_signs(x, len(signs)) == tuple(signs)
    assert weight(x) == signs.count(TRUE)
    p = CubePoint(len(signs), tuple(signs))
    assert CubePoint.from_string(p.to_string()) == p
    assert point_from_string(point_to_string(x, len(signs))) == x
    assert p.hamming_weight == weight(p.packed)


def test_point_strings():
    assert point_to_string(0b101, 3) == "-+-"
    with pytest.raises(InputError):
        CubePoint.from_string("+x")
    with pytest.raises(InputError):
        pack_signs([0])


# ---------------------------------------------------------------------------
# functions, checked against their definitions on every point


@pytest.mark.parametrize("n", range(1, 6))
def test_symmetric_functions_by_definition(n):
    for x in range(1 << n):
        signs = unpack_signs(x, n)
        trues = signs.count(TRUE)
        assert and_fn(n)(x) == (TRUE if all(s == TRUE for s in signs) else FALSE)
        assert or_fn(n)(x) == (TRUE if any(s == TRUE for s in signs) else FALSE)
        assert parity_fn(n)(x) == math.prod(signs)
        assert maj_fn(n)(x) == (TRUE if trues > n / 2 else FALSE)
        for k in range(1, n + 1):
            assert thr_fn(k, n)(x) == (TRUE if trues >= k else FALSE)
        assert and_fn(n).at_levels((trues,)) == and_fn(n)(x)


def test_gap_and_domain():
    f = gap_and_fn(3, Fraction(1, 3))
    assert f(0b111) == TRUE
    assert f(0b001) == FALSE and f(0) == FALSE
    assert f(0b011) is None
    assert not f.is_total()


def test_block_compose_by_definition():
    outer, inner = and_fn(2), or_fn(3)
    g = block_compose(outer, inner)
    assert g.n == 6
    for x in range(1 << 6):
        z = pack_signs([inner(x & 7), inner(x >> 3)])
        assert g(x) == outer(z)
        assert g.at_levels((weight(x & 7), weight(x >> 3))) == g(x)


def test_restrict_weight():
    f = restrict_weight(or_fn(4), 2)
    assert f(0b0011) == TRUE and f(0b0111) is None and f(0) == FALSE


def test_function_from_spec():
    assert function_from_spec("THR", 4, 2)(0b11) == TRUE
    with pytest.raises(InputError):
        function_from_spec("NOPE", 3)


# ---------------------------------------------------------------------------
# list inputs


def test_list_validation_and_json():
    s = ListInput(3, 2, (1, 2, 2))
    assert s.frequencies == (0, 1, 2)
    assert s.distribution == (Fraction(1, 3), Fraction(2, 3))
    assert ListInput.from_json(s.to_json()) == s
    for bad in (lambda: ListInput(2, 2, (1,)), lambda: ListInput(1, 2, (3,)), lambda: ListInput.from_json("{}")):
        with pytest.raises(InputError):
            bad()


def test_evaluations():
    assert eval_surj(ListInput(3, 2, (1, 2, 1))) == TRUE
    assert eval_surj(ListInput(3, 2, (1, 1, 1))) == FALSE
    assert eval_dist_k(ListInput(4, 3, (1, 2, 2, 3)), 2) == TRUE
    assert eval_dist_k(ListInput(4, 3, (1, 2, 2, 3)), 3) == FALSE
    assert eval_ist(ListInput(4, 4, (1, 2, 3, 4)), Fraction(1, 2)) == TRUE
    assert eval_ist(ListInput(4, 4, (1, 1, 2, 2)), Fraction(1, 2)) == FALSE
    assert eval_ist(ListInput(4, 4, (1, 2, 3, 3)), Fraction(1, 2)) is None
    with pytest.raises(InputError):
        eval_surj(ListInput(2, 2, (0, 1)))


@given(lists(dummy=True))
def test_dummy_reductions_commute(s):
    assert eval_surj(reduce_dsurj_to_surj(s)) == eval_surj(s, dummy=True)
    for k in range(2, s.N + 1):
        assert eval_dist_k(reduce_ddist_to_dist(s, k), k) == eval_dist_k(s, k, dummy=True)


@given(lists(dummy=True))
def test_property_to_block_indicators(s):
    p = property_to_block(s)
    for r in range(1, s.R + 1):
        for i in range(s.N):
            assert (p.bits[(r - 1) * s.N + i] == TRUE) == (s.items[i] == r)


@given(lists(dummy=True, max_N=4, max_R=6))
def test_decode_list_inverts_binary_encoding(s):
    B = bits_per_item(s.R, dummy=True)
    x = sum(v << (i * B) for i, v in enumerate(s.items))
    assert decode_list(x, s.N, s.R, dummy=True) == s


def test_decode_clamps_padding_codes():
    # R = 2 with the dummy needs 2 bits; code 3 repeats item 2
    assert decode_list(0b11, 1, 2, dummy=True).items == (2,)


def test_statistical_distance():
    assert statistical_distance_from_uniform(ListInput(4, 2, (1, 1, 1, 2))) == Fraction(1, 4)
    assert statistical_distance_from_uniform(ListInput(4, 2, (1, 2, 1, 2))) == 0


@given(lists())
def test_entropy_encloses_float_value(s):
    h = shannon_entropy(s)
    direct = -sum(float(p) * math.log2(p) for p in s.distribution if p)
    assert math.isclose(float(h.mid), direct, abs_tol=1e-12)
    assert h.width < Fraction(1, 2**50)


# ---------------------------------------------------------------------------
# entropy pair transform


def test_entropy_pair_transform_example():
    # worked by hand: c_1 = 1, c_2 = 2, pairs (r, b) coded as 2(r - 1) + b + 1
    first, second = entropy_pair_transform(ListInput(2, 2, (1, 2)))
    assert first.items == (1, 2, 1, 2, 3, 4, 3, 4)
    assert second.items == (1, 1, 2, 2, 3, 3, 4, 4)
    assert first.R == second.R == 4


@st.composite
def divisible_lists(draw):
    R = draw(st.integers(1, 6))
    N = R * draw(st.integers(1, 4))
    return ListInput(N, R, tuple(draw(st.lists(st.integers(1, R), min_size=N, max_size=N))))


@given(divisible_lists())
def test_entropy_pair_observed_identities(u):
    """Identities that hold for the lists as constructed (see the decisions ledger)."""
    rep = entropy_pair_report(u)
    v = rep.h_source / 2 + intervals.log2(u.R) / 2
    gap = rep.h_second - (v + 1)
    assert abs(gap.lo) < Fraction(1, 2**40) and abs(gap.hi) < Fraction(1, 2**40)
    # concavity: the first list is never below the second
    assert rep.h_first.hi >= rep.h_second.lo
    assert dict((c.name, c.passed) for c in rep.checks)["multiples-of-quarter-N"]


def test_entropy_pair_requires_divisibility():
    with pytest.raises(InputError):
        entropy_pair_transform(ListInput(3, 2, (1, 2, 1)))


def test_all_lists_count():
    assert sum(1 for _ in all_lists(3, 2, dummy=True)) == 27
    assert sum(1 for _ in all_lists(3, 2, dummy=False)) == 8
