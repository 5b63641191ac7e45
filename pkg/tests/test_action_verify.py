import numpy as np
import pytest

from hankel_schmidt.action_verify import (blocks_to_flat, extract_theta_tilde, grid_split,
                                          pull_back, innerness_residual,
                                          lemma_ktheta_check, model_space_basis,
                                          projection_identity_check, symmetry_checks,
                                          verify_action)
from hankel_schmidt.errors import NotApplicable, NotInner
from hankel_schmidt.fourier_core import MatrixFourier
from hankel_schmidt.hankel_ops import build_gamma, build_gamma_shifted, columns_matrix
from hankel_schmidt.spectral import eigenspace_at, max_angle, schmidt_subspaces
from hankel_schmidt.structure_verify import full_wandering_check
from hankel_schmidt.symbols import (example_36a, example_36b, example_46, scalar_poly,
                                    symbol_columns, symbol_corpus)


def clusters(U, N=None):
    """(G, s, E, W, U_mat) for every cluster with full wandering dimension."""
    N = U.degree + 4 if N is None else N
    G, Gp = build_gamma(U, N), build_gamma_shifted(U, N)
    Umat = columns_matrix(symbol_columns(U), N)
    cs = schmidt_subspaces(G)
    for c in cs:
        EK = eigenspace_at(Gp, c.s, 1e-8 * cs[0].s)
        try:
            fw = full_wandering_check(c.basis, EK, Umat, U.m, c.s)
        except NotApplicable:
            continue
        yield G, c.s, c.basis, fw.W, Umat


def monomial_residual(seq, k):
    others = np.delete(seq, k)
    return max(abs(abs(seq[k]) - 1), np.max(np.abs(others)))


def test_u_equals_z_chase():
    [(G, s, E, W, Umat)] = list(clusters(scalar_poly([0, 1])))
    assert s == pytest.approx(1)
    ext = extract_theta_tilde(G, s, W)
    assert monomial_residual(ext.theta.coeffs[:, 0, 0], 2) <= 1e-12
    assert ext.theta.coeffs[0, 0, 0] == 0
    assert projection_identity_check(G, E, W, Umat).residual <= 1e-14
    ar = verify_action(G, E, ext)
    assert ar.action_residual <= 1e-12 and ar.model_space_dim == 2


@pytest.mark.parametrize("n", range(1, 7))
def test_z_power_theta(n):
    [(G, s, E, W, _)] = list(clusters(scalar_poly([0] * n + [1])))
    ext = extract_theta_tilde(G, s, W)
    assert monomial_residual(ext.theta.coeffs[:, 0, 0], n + 1) <= 1e-10
    assert all(c.passed for c in ext.checks)


@pytest.mark.parametrize("U", [example_36a([0, 0, 1]), example_36b([0, 0, 1]),
                               example_46([0, 1], [0, 0, 1])],
                         ids=["36A", "36B", "46"])
def test_examples_full_suite(U):
    found = list(clusters(U))
    assert found
    for G, s, E, W, Umat in found:
        ext = extract_theta_tilde(G, s, W)
        assert ext.analyticity_residual <= 1e-9
        assert ext.innerness_residual <= 1e-9
        assert ext.round_trip_residual <= 1e-10
        assert projection_identity_check(G, E, W, Umat).residual <= 1e-10
        ar = verify_action(G, E, ext)
        assert ar.action_residual <= 1e-9
        assert all(c.passed for c in ar.checks)
        at0, sym, checks = symmetry_checks(ext.theta, ext, G, E)
        assert at0 <= 1e-10
        assert all(c.passed for c in checks)
        check, dimK = lemma_ktheta_check(ext.theta)
        assert check.passed and dimK == E.shape[1]


def test_example_36a_theta_diagonal():
    [(G, s, E, W, _)] = list(clusters(example_36a([0, 0, 1])))
    ext = extract_theta_tilde(G, s, W)
    _, sym, checks = symmetry_checks(ext.theta, ext, G, E)
    assert sym
    assert {c.name for c in checks} >= {"action_formula_simplified", "sstar_theta_conj_in_model_space"}


def test_corpus_r_equals_m():
    count = 0
    for U in symbol_corpus():
        for G, s, E, W, Umat in clusters(U):
            ext = extract_theta_tilde(G, s, W)
            ar = verify_action(G, E, ext)
            at0, _, _ = symmetry_checks(ext.theta)
            assert ext.analyticity_residual <= 1e-9
            assert ext.innerness_residual <= 1e-9
            assert ar.action_residual <= 1e-9
            assert at0 <= 1e-10
            count += U.m > 1
    assert count > 0


def test_model_space_basis_spans_pulled_back_schmidt_vectors():
    [(G, s, E, W, _)] = list(clusters(example_46([0, 1], [0, 0, 1])))
    ext = extract_theta_tilde(G, s, W)
    Q = model_space_basis(ext, 8)
    assert Q.shape[1] == E.shape[1]
    neg, pos = grid_split(pull_back(ext, E))
    assert np.linalg.norm(neg) <= 1e-10
    P = blocks_to_flat(pos)
    assert max_angle(Q, P[:Q.shape[0]]) <= 1e-9


def test_extract_needs_full_wandering():
    G = build_gamma(example_36a([0, 1]), 5)
    with pytest.raises(NotApplicable):
        extract_theta_tilde(G, 1.0, np.zeros((12, 1)))


def test_symmetry_checks_non_symmetric_candidate():
    c = np.zeros((3, 2, 2), dtype=complex)
    c[1] = [[0, 1], [0, 0]]
    c[2] = [[1, 0], [0, 0]]
    at0, sym, checks = symmetry_checks(MatrixFourier(c))
    assert not sym
    assert at0 == pytest.approx(np.sqrt(2))
    assert [k.name for k in checks] == ["sstar_theta_symmetric_at_zero"]
    assert not checks[0].passed


def test_lemma_ktheta_z_squared():
    theta = MatrixFourier(np.array([0, 0, 1.0])[:, None, None])
    check, dimK = lemma_ktheta_check(theta)
    assert check.passed and dimK == 2


def test_lemma_ktheta_z_identity():
    theta = MatrixFourier(np.array([np.zeros((2, 2)), np.eye(2)]))
    check, dimK = lemma_ktheta_check(theta)
    assert check.passed and dimK == 2


def test_lemma_ktheta_not_inner():
    theta = MatrixFourier(np.array([0, 0.5])[:, None, None])
    assert innerness_residual(theta) == pytest.approx(0.75)
    with pytest.raises(NotInner):
        lemma_ktheta_check(theta)


def test_projection_identity_orthogonal_columns():
    # U_i orthogonal to E makes both sides vanish
    U = scalar_poly([0, 1])
    G = build_gamma(U, 4)
    E = np.zeros((5, 1))
    E[3] = 1
    W = np.zeros((5, 1))
    W[3] = 1
    assert projection_identity_check(G, E, W, columns_matrix(symbol_columns(U), 4)).residual == 0
