from fractions import Fraction

import pytest

from gkzhorn.lattice import LatticeError, matvec
from gkzhorn.systems import (find_positive_diagonal, gkz_system, homogenize_rho, horn_generators,
                             ideal_membership_upto, lattice_basis_ideal, lattice_basis_system,
                             restriction_witnesses, rho_matrix, toric_gens_bounded, zring)
from gkzhorn.weyl import INHOMOGENEOUS, WeylOp, a_degree

from conftest import GAUSS_B, TWISTED_CUBIC


def _binomial_exponents(g):
    (u, _), (v, _) = [(b, c) for (a, b), c in g.items()]
    return u, v


def test_toric_generators_of_twisted_cubic():
    gens = toric_gens_bounded(TWISTED_CUBIC, 3)
    assert len(gens) == 3
    for g in gens:
        u, v = _binomial_exponents(g)
        assert matvec(TWISTED_CUBIC, u) == matvec(TWISTED_CUBIC, v)
        assert sum(u) == sum(v) == 2


def test_ideal_membership():
    gens = [{(1, 0, 1, 0): 1, (0, 2, 0, 0): -1}, {(0, 1, 0, 1): 1, (0, 0, 2, 0): -1},
            {(1, 0, 0, 1): 1, (0, 1, 1, 0): -1}]
    assert ideal_membership_upto(gens, {(2, 0, 0, 1): 1, (0, 3, 0, 0): -1}, 3)
    assert not ideal_membership_upto(gens, {(1, 0, 0, 0): 1, (0, 1, 0, 0): -1}, 3)


def test_gkz_system_parts():
    s = gkz_system(TWISTED_CUBIC, (1, 2))
    assert s.kind == "GKZ"
    assert len(s.eulerOps) == 2
    for E in s.eulerOps:
        assert a_degree(E, TWISTED_CUBIC) == (0, 0)


def test_lattice_basis_ideal_binomials():
    for g in lattice_basis_ideal(((1, 2), (-2, -3), (1, 0), (0, 1))):
        u, v = _binomial_exponents(g)
        assert matvec(TWISTED_CUBIC, u) == matvec(TWISTED_CUBIC, v)


def test_lattice_basis_system_has_euler(cubic_ctx):
    s = lattice_basis_system(cubic_ctx, (0, 0, Fraction(1, 2), Fraction(1, 3)))
    assert len(s.generators) == cubic_ctx.m
    assert len(s.eulerOps) == cubic_ctx.d


def test_horn_generator_is_gauss_operator():
    a, b, c = Fraction(1, 2), Fraction(1, 3), Fraction(5, 7)
    # B = (1, 1, -1, -1)^T with kappa = (0, c-1, -a, -b) gives theta(theta+c-1) - z(theta+a)(theta+b)
    h = horn_generators(GAUSS_B, (0, c - 1, -a, -b))
    R = zring(1)
    t, z = WeylOp.theta(R, 0), WeylOp.var(R, 0)
    gauss = t * (t + (c - 1)) - z * (t + a) * (t + b)
    assert h.generators == (gauss,)


def test_horn_factor_counts():
    B = ((1, 2), (-2, -3), (1, 0), (0, 1))
    h = horn_generators(B, (0, 0, Fraction(1, 2), Fraction(1, 3)))
    for k, f in enumerate(h.factored):
        assert len(f.q) == sum(max(row[k], 0) for row in B)
        assert len(f.p) == sum(max(-row[k], 0) for row in B)


def test_normalized_horn_requirements():
    with pytest.raises(ValueError, match="must vanish"):
        horn_generators(GAUSS_B, (1, 0, 0, 0), normalized=True)
    with pytest.raises(ValueError, match="diagonal"):
        horn_generators(((1, 1), (-1, 0), (0, -1)), (0, 0, 0), normalized=True)
    with pytest.raises(LatticeError):
        horn_generators(((1, 1), (1, 1)), (0, 0))
    assert find_positive_diagonal(((1, 0), (0, 1), (-1, -1))) == (0, 1)


def test_homogenize_rho_is_homogeneous():
    A = ((1, 2),)
    h = homogenize_rho(A, lattice_basis_ideal(((2,), (-1,))), (1,), 0)
    rA = rho_matrix(A)
    assert all(a_degree(g, rA) is not INHOMOGENEOUS for g in h.generators)
    for g in h.generators:
        u, v = _binomial_exponents(g)
        assert matvec(rA, u) == matvec(rA, v)


def test_restriction_witnesses_need_identity_block(cubic_ctx):
    with pytest.raises(ValueError):
        restriction_witnesses(cubic_ctx, (0, 0, 0, 0))
