import numpy as np
import pytest
from hypothesis import assume, given, seed
from hypothesis import strategies as st

from atap.errors import DegenerateTrace, NotOnRileyVariety, NotUnimodular
from atap.representations.adjoint_rep import (
    ad,
    ad_geom_sum_closed,
    ad_power_closed,
    det_phi_b_minus_one,
    phi_b_inverse_minus_one,
    phi_factor_s1,
    phi_factor_s2,
    phi_factor_s3,
    phi_one_minus_a,
)
from atap.representations.sl2_reps import (
    KnotParams,
    make_rep,
    rho_a,
    rho_b,
    rho_w_closed,
    riley_roots,
    s_from_x,
    sl2_inverse,
)
from atap.selftest import brute_ad_geom_sum, brute_ad_power, random_sl2, relative_error

entries = st.complex_numbers(min_magnitude=0.3, max_magnitude=2, allow_nan=False, allow_infinity=False)
SIGNED = [-2, -1, 1, 2]


def sl2(a, b, c):
    return np.array([[a, b], [c, (1 + b * c) / a]], dtype=complex)


def test_ad_examples():
    np.testing.assert_allclose(ad(np.eye(2)), np.eye(3))
    s = 1.5 - 0.5j
    np.testing.assert_allclose(ad(np.diag([s, 1 / s])), np.diag([s * s, 1, 1 / (s * s)]))
    np.testing.assert_allclose(ad(rho_a(2)), [[4, -4, -1], [0, 1, 0.5], [0, 0, 0.25]])


def test_ad_conjugation_in_basis(rng):
    M = random_sl2(rng)
    basis = [np.array([[0, 1], [0, 0]]), np.array([[1, 0], [0, -1]]), np.array([[0, 0], [1, 0]])]
    A = ad(M)
    for j, X in enumerate(basis):
        image = M @ X @ sl2_inverse(M)
        coords = [image[0, 1], image[0, 0], image[1, 0]]
        np.testing.assert_allclose(A[:, j], coords, atol=1e-10)


def test_ad_rejects_non_unimodular():
    with pytest.raises(NotUnimodular):
        ad(np.diag([2.0, 1.0]))
    with pytest.raises(NotUnimodular):
        ad(np.eye(3))


@seed(20170)
@given(a1=entries, b1=entries, c1=entries, a2=entries, b2=entries, c2=entries)
def test_ad_is_multiplicative(a1, b1, c1, a2, b2, c2):
    M, N = sl2(a1, b1, c1), sl2(a2, b2, c2)
    assume(np.max(np.abs(M)) < 50 and np.max(np.abs(N)) < 50)
    assert relative_error(ad(M @ N), ad(M) @ ad(N)) <= 1e-9
    assert np.linalg.det(ad(M)) == pytest.approx(1, rel=1e-6, abs=1e-6)


@pytest.mark.parametrize("n", range(-5, 7))
def test_ad_power_closed_matches_brute_force(n, rng):
    M = random_sl2(rng)
    assert relative_error(ad_power_closed(M, n), brute_ad_power(M, n)) <= 1e-8


@pytest.mark.parametrize("n", range(-5, 7))
def test_ad_geom_sum_closed_matches_brute_force(n, rng):
    M = random_sl2(rng)
    assert relative_error(ad_geom_sum_closed(M, n), brute_ad_geom_sum(M, n)) <= 1e-8


def test_ad_closed_forms_small_indices(rng):
    M = random_sl2(rng)
    np.testing.assert_allclose(ad_power_closed(M, 0), np.eye(3), atol=1e-12)
    np.testing.assert_allclose(ad_power_closed(M, 1), ad(M), atol=1e-10)
    np.testing.assert_allclose(ad_geom_sum_closed(M, 0), np.zeros((3, 3)), atol=1e-10)
    np.testing.assert_allclose(ad_geom_sum_closed(M, 1), np.eye(3), atol=1e-10)


def test_ad_geom_sum_degenerate_trace():
    with pytest.raises(DegenerateTrace):
        ad_geom_sum_closed(rho_a(1), 3)
    with pytest.raises(DegenerateTrace):
        ad_geom_sum_closed(-np.eye(2), 2)


def test_factors_at_trefoil(trefoil):
    params, rep = trefoil
    np.testing.assert_allclose(phi_factor_s1(params, rep), np.eye(3), atol=1e-9)
    a_inv_b = sl2_inverse(rep.rho_a) @ rep.rho_b
    np.testing.assert_allclose(phi_factor_s2(params, rep), ad(a_inv_b), atol=1e-9)
    np.testing.assert_allclose(phi_factor_s3(params, rep), np.eye(3), atol=1e-9)


@pytest.mark.parametrize("m", SIGNED)
@pytest.mark.parametrize("n", SIGNED)
def test_factors_match_brute_force(m, n):
    params = KnotParams(m, n)
    s, _ = s_from_x(1.7)
    for rep in riley_roots(params, s):
        w_inv = sl2_inverse(rho_w_closed(m, rep.s, rep.y))
        a_inv_b = sl2_inverse(rep.rho_a) @ rep.rho_b
        a_b_inv = rep.rho_a @ sl2_inverse(rep.rho_b)
        assert relative_error(phi_factor_s1(params, rep), brute_ad_geom_sum(w_inv, n)) <= 1e-6
        assert relative_error(phi_factor_s2(params, rep), brute_ad_power(a_inv_b, m)) <= 1e-8
        assert relative_error(phi_factor_s3(params, rep), brute_ad_geom_sum(a_b_inv, m)) <= 1e-8


def test_phi_factor_s1_needs_riley_root():
    params = KnotParams(1, 2)
    with pytest.raises(NotOnRileyVariety):
        phi_factor_s1(params, make_rep(params, 1, 3.7))


def test_phi_factor_s3_degenerate():
    params = KnotParams(2, 1)
    with pytest.raises(DegenerateTrace):
        phi_factor_s3(params, make_rep(params, 1.2, -2))


def test_linear_factors(trefoil):
    _, rep = trefoil
    for t0 in (0.5, 1.7 - 0.3j):
        np.testing.assert_allclose(phi_one_minus_a(rep).evaluate(t0), np.eye(3) - t0 * ad(rep.rho_a), atol=1e-12)
        np.testing.assert_allclose(
            phi_b_inverse_minus_one(rep).evaluate(t0),
            ad(sl2_inverse(rep.rho_b)) / t0 - np.eye(3),
            atol=1e-12,
        )


def test_det_phi_b_minus_one():
    rep = make_rep(KnotParams(1, 1), 1.3 + 0.2j, 0.4)
    for t0 in (0.5, 2 - 1j):
        expected = np.linalg.det(t0 * ad(rho_b(rep.s, rep.y)) - np.eye(3))
        assert det_phi_b_minus_one(rep)(t0) == pytest.approx(expected, rel=1e-9)
