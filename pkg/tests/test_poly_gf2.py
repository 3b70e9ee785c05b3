import random

import pytest
from hypothesis import given, settings, strategies as st

from polymatch.poly_gf2 import TruncatedPoly, add, clmul, min_degree, monomial, mul

from _oracles import bits_from_poly, poly_from_bits, schoolbook_mul


def P(exps, w_th):
    return TruncatedPoly.from_exponents(exps, w_th)


# -- listed examples ----------------------------------------------------------

def test_monomial_examples():
    one = monomial(0, 4)
    assert one.bits == 0b0001 and one.coefficients() == [1, 0, 0, 0]
    assert monomial(5, 4).is_zero()
    assert monomial(4, 4).is_zero()
    assert monomial(3, 512).exponents() == [3]


def test_monomial_rejects_negative_exponent():
    with pytest.raises(ValueError):
        monomial(-1, 8)


def test_add_examples():
    assert add(P([1, 0], 8), P([1], 8)) == P([0], 8)
    a = P([0, 5, 7], 8)
    assert (a + a).is_zero()
    # (X^2+1) + (X^3+X^2) = X^3+1
    assert add(P([2, 0], 8), P([3, 2], 8)) == P([3, 0], 8)


def test_mul_examples():
    assert mul(P([1, 0], 8), P([1, 0], 8)) == P([2, 0], 8)
    assert mul(P([3], 4), P([2], 4)).is_zero()
    # (X^2+X+1)(X+1) = X^3 + 1
    assert mul(P([2, 1, 0], 8), P([1, 0], 8)) == P([3, 0], 8)


def test_min_degree_examples():
    assert min_degree(P([4, 7], 8)) == 4
    assert min_degree(TruncatedPoly.zero(8)) is None
    assert min_degree(P([0, 2], 8)) == 0
    assert P([0, 2], 8).min_degree() == 0


def test_mismatched_thresholds_rejected():
    with pytest.raises(ValueError):
        add(P([1], 8), P([1], 9))
    with pytest.raises(ValueError):
        mul(P([1], 8), P([1], 16))


def test_bits_must_fit():
    with pytest.raises(ValueError):
        TruncatedPoly(1 << 8, 8)
    with pytest.raises(ValueError):
        TruncatedPoly(1, 0)
    assert TruncatedPoly.truncating(0x1FF, 8).bits == 0xFF


# -- hex serialization --------------------------------------------------------

def test_hex_is_lsb_first_and_zero_padded():
    assert monomial(0, 4).to_hex() == "1"
    assert monomial(4, 8).to_hex() == "10"
    assert P([0, 9], 12).to_hex() == "201"
    assert TruncatedPoly.zero(10).to_hex() == "000"
    assert monomial(511, 512).to_hex() == "8" + "0" * 127


def test_hex_golden_product():
    # (1 + X + X^5 + X^63)^2 = 1 + X^2 + X^10 + X^126, truncated at 100 bits
    a = P([0, 1, 5, 63], 100)
    sq = a * a
    assert sq.exponents() == [0, 2, 10]
    assert sq.to_hex() == "0000000000000000000000405"


@given(st.integers(1, 300), st.data())
def test_hex_round_trip(w_th, data):
    bits = data.draw(st.integers(0, (1 << w_th) - 1))
    a = TruncatedPoly(bits, w_th)
    assert TruncatedPoly.from_hex(a.to_hex(), w_th) == a
    assert len(a.to_hex()) == (w_th + 3) // 4


# -- properties ---------------------------------------------------------------

polys = st.integers(1, 160).flatmap(
    lambda w: st.tuples(*[st.integers(0, (1 << w) - 1)] * 3, st.just(w)))


@settings(max_examples=300)
@given(polys)
def test_ring_axioms(t):
    x, y, z, w = t
    a, b, c = TruncatedPoly(x, w), TruncatedPoly(y, w), TruncatedPoly(z, w)
    one, zero = TruncatedPoly.one(w), TruncatedPoly.zero(w)
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * one == a
    assert a * zero == zero
    assert a + zero == a
    assert a - a == zero


@settings(max_examples=300)
@given(polys)
def test_mul_matches_schoolbook(t):
    x, y, _, w = t
    expect = bits_from_poly(schoolbook_mul(poly_from_bits(x, w), poly_from_bits(y, w), w))
    assert clmul(x, y, w) == expect


@settings(max_examples=100)
@given(st.integers(0, (1 << 1024) - 1), st.integers(0, (1 << 1024) - 1))
def test_truncation_is_a_ring_homomorphism(x, y):
    big = TruncatedPoly(x, 1024) * TruncatedPoly(y, 1024)
    small = TruncatedPoly(x & ((1 << 512) - 1), 512) * TruncatedPoly(y & ((1 << 512) - 1), 512)
    assert big.truncate(512) == small


@given(st.integers(0, 600), st.integers(0, 600), st.integers(1, 1200))
def test_min_degree_of_monomial_product(a, b, w_th):
    prod = monomial(a, w_th) * monomial(b, w_th)
    if a + b < w_th:
        assert prod.min_degree() == a + b
    else:
        assert prod.is_zero()


def test_sparse_operand_order_irrelevant():
    rng = random.Random(5)
    for _ in range(200):
        w = rng.randint(1, 700)
        x = rng.getrandbits(w)
        y = rng.getrandbits(rng.randint(0, 6)) << rng.randint(0, w)
        y &= (1 << w) - 1
        assert clmul(x, y, w) == clmul(y, x, w)


def test_truncate_rejects_larger_threshold():
    with pytest.raises(ValueError):
        monomial(1, 8).truncate(9)


def test_repr_lists_terms():
    assert "X^3" in repr(P([0, 1, 3], 8))
    assert "0;" in repr(TruncatedPoly.zero(8))
