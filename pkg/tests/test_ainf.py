"""Cyclotomic model: distinguished elements, Frobenius, residue maps."""

import random

import pytest
import sympy
from sympy.abc import x

from aomega.ainf import AinfModel, OCModel, check_notation_identities
from aomega.arith import LaurentElement, laurent_exact_div


def test_xi_is_the_cyclotomic_polynomial():
    for p, n in ((2, 1), (3, 1), (3, 2), (5, 2), (2, 3)):
        model = AinfModel(p, n)
        oracle = sympy.Poly(sympy.cyclotomic_poly(p**n, x), x).all_coeffs()[::-1]
        got = model.xi.terms
        assert got == {e: c for e, c in enumerate(oracle) if c}


def test_mu_factorization():
    for p, n in ((2, 2), (3, 1), (5, 1), (3, 2)):
        model = AinfModel(p, n)
        assert model.xi * model.phi_inv_mu == model.mu
        assert model.phi(model.xi) == model.xi_tilde
        assert model.phi(model.mu) == model.xi_tilde * model.mu


def test_phi_examples():
    model = AinfModel(3, 1)
    assert model.phi(LaurentElement.one(1)) == LaurentElement.one(1)
    assert model.phi(LaurentElement({1: 1}, 1)).terms == {3: 1}


def test_phi_inverse_round_trip():
    model = AinfModel(3, 1)
    mu = model.mu
    deeper = model.phi_inverse(mu)
    assert deeper.depth == 2
    # phi brings it back after depth normalization
    deeper_model = model.deeper()
    assert deeper_model.phi(deeper) == model.raise_depth(mu, 2)
    assert model.phi_inverse(LaurentElement.one(1)) == LaurentElement.one(2)


def test_phi_inverse_depth_budget():
    model = AinfModel(2, 1, max_depth=2)
    once = model.phi_inverse(model.mu)
    with pytest.raises(ValueError):
        AinfModel(2, 2, max_depth=2).phi_inverse(once)


def test_inverse_frobenius_product_formula_depth2():
    # mu = xi * phi^-1(xi) * phi^-2(mu) at p = 2, n = 2
    model = AinfModel(2, 2)
    xi0 = model.raise_depth(model.xi, 4)
    xi1 = model.raise_depth(model.phi_inverse(model.xi), 4)
    tail = model.mu.with_depth(4)  # two inverse-Frobenius steps keep the terms
    assert xi0 * xi1 * tail == model.raise_depth(model.mu, 4)


def test_theta_kills_xi_and_theta_tilde_kills_xi_tilde():
    for p, n in ((2, 1), (3, 1), (3, 2), (5, 1)):
        model = AinfModel(p, n)
        assert model.theta(model.xi).is_zero()
        assert model.theta_tilde(model.xi_tilde).is_zero()


def test_theta_of_q_is_one():
    # oracle: u^(p^n) reduces to 1 modulo the p^n-th cyclotomic polynomial
    p, n = 3, 1
    assert sympy.rem(x**3 - 1, sympy.cyclotomic_poly(3, x), x) == 0
    model = AinfModel(p, n)
    q = LaurentElement({p**n: 1}, n)
    assert model.theta(q) == model.oc_model().one()


def test_theta_tilde_is_theta_after_inverse_frobenius():
    rng = random.Random(9)
    model = AinfModel(3, 1)
    deeper = model.deeper()
    for _ in range(100):
        terms = {rng.randint(-6, 6): rng.randint(-9, 9) for _ in range(rng.randint(1, 5))}
        v = LaurentElement(terms, 1)
        assert model.theta_tilde(v) == deeper.theta(model.phi_inverse(v))


def test_oc_reduction_idempotent_and_linear():
    model = AinfModel(3, 2)
    oc = model.oc_model()
    v = LaurentElement({11: 4, -3: 2, 0: 1}, 2)
    r = oc.reduce(v)
    lifted = LaurentElement({i: c for i, c in enumerate(r.coeffs) if c}, 2)
    assert oc.reduce(lifted) == r
    w = LaurentElement({5: -1}, 2)
    assert oc.reduce(v + w) == oc.reduce(v) + oc.reduce(w)


def test_oc_exact_division_and_units():
    oc = OCModel(3, 1)
    zeta_minus_1 = oc.zeta_power_minus_one(1)
    zeta2_minus_1 = oc.zeta_power_minus_one(2)
    # associates: each divides the other
    assert zeta2_minus_1.exact_div(zeta_minus_1) is not None
    assert zeta_minus_1.exact_div(zeta2_minus_1) is not None
    ratio = zeta2_minus_1.exact_div(zeta_minus_1)
    assert ratio.is_unit()
    assert not oc.constant(3).is_unit()
    # p is a product of the root differences: (zeta-1)(zeta^2-1) = 3 in Z[zeta_3]
    assert zeta_minus_1 * zeta2_minus_1 == oc.constant(3)


def test_congruence_of_q_analog_mod_mu():
    model = AinfModel(5, 1)
    for a in range(-9, 10):
        assert model.reduce_mod_mu(model.q_analog(a)) == model.constant(a)
    assert model.reduce_mod_mu(model.xi_tilde) == model.constant(5)


def test_identity_suite_all_configs():
    for p in (2, 3, 5, 7, 11, 13):
        for n in (1, 2, 3):
            results = check_notation_identities(AinfModel(p, n), samples=50, seed=11)
            failed = [r.name for r in results if not r.passed]
            assert not failed, (p, n, failed)


def test_q_power_divisibility_via_model_elements():
    # (q - 1) divides (q^b - 1) for every integer b
    model = AinfModel(3, 2)
    for b in range(-6, 7):
        if b == 0:
            continue
        assert laurent_exact_div(model.q_power_minus_one(b), model.mu) is not None
