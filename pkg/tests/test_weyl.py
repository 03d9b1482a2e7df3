import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gkzhorn.weyl import (INHOMOGENEOUS, WeylOp, WeylRing, a_degree, apply_to_monomial,
                          apply_to_polynomial, euler_operators, format_op, from_theta_form,
                          multiply, parse_op, theta_form)

from conftest import SEED, TWISTED_CUBIC, random_op, small_fraction

R2 = WeylRing(2, False, "x")
R3 = WeylRing(3, True, "z")


def _test_points(rng, n, count=3):
    # generic rational exponents make the action faithful on the tested terms
    return [tuple(small_fraction(rng, 7) + Fraction(1, 11) for _ in range(n)) for _ in range(count)]


def _act(p, q, rng):
    for a in _test_points(rng, p.ring.n):
        lhs = apply_to_monomial(multiply(p, q), a)
        rhs = apply_to_polynomial(p, apply_to_monomial(q, a))
        if lhs != rhs:
            return False
    return True


def test_multiply_matches_action_oracle():
    rng = random.Random(SEED)
    for _ in range(60):
        ring = rng.choice([R2, R3])
        p = random_op(rng, ring, laurent_neg=ring.laurent)
        q = random_op(rng, ring, laurent_neg=ring.laurent)
        assert _act(p, q, rng)


def test_commutator_is_one():
    x, d = WeylOp.var(R2, 0), WeylOp.der(R2, 0)
    assert d * x - x * d == WeylOp.const(R2, 1)
    assert WeylOp.der(R2, 1) * x == x * WeylOp.der(R2, 1)


def test_multiplication_is_associative():
    rng = random.Random(SEED + 1)
    for _ in range(20):
        p, q, r = (random_op(rng, R2, terms=2) for _ in range(3))
        assert (p * q) * r == p * (q * r)


def test_a_degree_additive_on_homogeneous():
    A = TWISTED_CUBIC
    R = WeylRing(4, False, "x")
    rng = random.Random(SEED)
    checked = 0
    for _ in range(40):
        a = [rng.randint(0, 2) for _ in range(4)]
        b = [rng.randint(0, 2) for _ in range(4)]
        c = [rng.randint(0, 2) for _ in range(4)]
        e = [rng.randint(0, 2) for _ in range(4)]
        p = WeylOp.monomial(R, a, b, 2) + WeylOp.monomial(R, [x + 1 for x in a], [y + 1 for y in b])
        q = WeylOp.monomial(R, c, e, -3)
        pq = p * q
        if not pq:
            continue
        dp, dq = a_degree(p, A), a_degree(q, A)
        assert a_degree(pq, A) == tuple(x + y for x, y in zip(dp, dq))
        checked += 1
    assert checked > 30


def test_a_degree_inhomogeneous():
    R = WeylRing(4, False, "x")
    p = WeylOp.var(R, 0) + WeylOp.var(R, 1)
    assert a_degree(p, TWISTED_CUBIC) is INHOMOGENEOUS


def test_euler_operators_degree_zero():
    for E in euler_operators(TWISTED_CUBIC, (Fraction(1, 2), Fraction(1, 3))):
        assert a_degree(E, TWISTED_CUBIC) == (0, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_theta_form_round_trip(seed):
    rng = random.Random(seed)
    for ring in (R2, R3):
        p = random_op(rng, ring, laurent_neg=ring.laurent)
        assert from_theta_form(ring, theta_form(p)) == p


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_format_parse_round_trip(seed):
    rng = random.Random(seed)
    for ring in (R2, R3):
        p = random_op(rng, ring, laurent_neg=ring.laurent)
        assert parse_op(format_op(p), ring) == p


def test_polynomial_ring_rejects_negative_exponent():
    with pytest.raises(ValueError):
        WeylOp.monomial(R2, (-1, 0), (0, 0))
