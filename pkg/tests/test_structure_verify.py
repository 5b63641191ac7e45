import numpy as np
import pytest

from hankel_schmidt.errors import NotApplicable, NotInvariant
from hankel_schmidt.hankel_ops import build_gamma, build_gamma_shifted, columns_matrix
from hankel_schmidt.spectral import eigenspace_at, max_angle, schmidt_subspaces
from hankel_schmidt.structure_verify import (Check, backshift_flat, beurling_extract,
                                             full_wandering_check, lemma_24_check,
                                             near_invariance_report, scalar_structure,
                                             shift_flat, v_space)
from hankel_schmidt.symbols import (MatrixSymbol, blaschke_scalar, example_36a,
                                    example_36b, example_46, scalar_poly, symbol_columns,
                                    symbol_corpus)


def setup(U, N=None):
    N = U.degree + 4 if N is None else N
    G, Gp = build_gamma(U, N), build_gamma_shifted(U, N)
    Umat = columns_matrix(symbol_columns(U), N)
    cs = schmidt_subspaces(G)
    out = []
    for c in cs:
        EK = eigenspace_at(Gp, c.s, max(1e-8 * cs[0].s, 2 * U.tail_bound))
        out.append((c, EK))
    return G, Umat, out


def e(n, *idx):
    out = np.zeros((n, len(idx)), dtype=complex)
    for c, i in enumerate(idx):
        out[i, c] = 1
    return out


def test_check_verdicts_and_dict():
    c = Check("x", 1e-12, 1e-9)
    assert c.passed is True
    assert c.to_dict() == {"name": "x", "residual": 1e-12, "tolerance": 1e-9, "pass": True}
    assert Check("y", 1.0, 1e-9).passed is False
    assert Check("z", np.inf, 1e-9).passed is None


def test_shift_flat_and_backshift_flat():
    X = np.arange(6.0)[:, None]
    np.testing.assert_array_equal(backshift_flat(X, 2)[:, 0], [2, 3, 4, 5, 0, 0])
    np.testing.assert_array_equal(shift_flat(X, 2)[:, 0], [0, 0, 0, 1, 2, 3])


def test_u_perp_parts_u_equals_z():
    U = scalar_poly([0, 1])
    _, Umat, [(c, EK)] = setup(U, 5)
    chk, A, B = lemma_24_check(c.basis, EK, Umat)
    assert chk.passed and chk.residual <= 1e-12
    assert max_angle(A, e(6, 0)) <= 1e-12


def test_u_perp_parts_example_36a():
    _, Umat, data = setup(example_36a([0, 0, 1]))
    for c, EK in data:
        assert lemma_24_check(c.basis, EK, Umat, s=c.s)[0].passed


def test_u_perp_parts_nothing_orthogonal():
    # E spanned by a vector with <E, U> != 0, E_K empty: both sides {0}
    Umat = e(4, 1)
    E = (e(4, 0) + e(4, 1)) / np.sqrt(2)
    chk, A, B = lemma_24_check(E, np.zeros((4, 0)), Umat)
    assert chk.passed and A.shape[1] == B.shape[1] == 0


@pytest.mark.parametrize("n", range(1, 7))
def test_near_invariance_z_power(n):
    _, Umat, [(c, EK)] = setup(scalar_poly([0] * n + [1]))
    rep = near_invariance_report(c.basis, EK, Umat, 1, c.s)
    assert rep.p == 0 and rep.r == 1 and rep.passed


def test_near_invariance_example_36b():
    _, Umat, data = setup(example_36b([0, 0, 1]))
    for c, EK in data:
        rep = near_invariance_report(c.basis, EK, Umat, 2, c.s)
        assert rep.p <= 2 and rep.passed


def test_near_invariance_vacuous():
    # E with trivial intersection with zH^2
    E = e(4, 0)
    rep = near_invariance_report(E, np.zeros((4, 0)), e(4, 1), 1, 1.0)
    assert rep.p == 0 and rep.check("backshift_into_ek").passed
    d = rep.to_dict()
    assert [c["name"] for c in d["checks"]] == sorted(c["name"] for c in d["checks"])
    with pytest.raises(KeyError):
        rep.check("nope")


def test_full_wandering_examples():
    for U in (example_36a([0, 0, 1]), example_46([0, 1], [0, 0, 1])):
        _, Umat, data = setup(U)
        for c, EK in data:
            fw = full_wandering_check(c.basis, EK, Umat, 2, c.s)
            assert fw.report.r == 2 and fw.report.passed
            assert fw.condition < 1e8


def test_full_wandering_u_equals_z():
    _, Umat, [(c, EK)] = setup(scalar_poly([0, 1]))
    fw = full_wandering_check(c.basis, EK, Umat, 1, c.s)
    assert fw.report.p == 0 and fw.report.r == 1


def test_full_wandering_not_applicable():
    # U = diag(z, 0): at s = 1, E = K_{z^2} in the first component, r = 1 < 2
    U = MatrixSymbol(np.array([np.zeros((2, 2)), [[1, 0], [0, 0]]]))
    _, Umat, [(c, EK)] = setup(U)
    with pytest.raises(NotApplicable):
        full_wandering_check(c.basis, EK, Umat, 2, c.s)


def test_corpus_near_invariance_and_full_wandering():
    for U in symbol_corpus():
        _, Umat, data = setup(U)
        for c, EK in data:
            rep = near_invariance_report(c.basis, EK, Umat, U.m, c.s)
            assert rep.p <= U.m
            assert rep.check("backshift_into_ek").residual <= 1e-10
            assert lemma_24_check(c.basis, EK, Umat, s=c.s)[0].residual <= 1e-10
            assert v_space(EK, Umat).shape[1] <= U.m
            if rep.r == U.m:
                fw = full_wandering_check(c.basis, EK, Umat, U.m, c.s)
                assert fw.report.p == 0
                assert fw.report.check("ek_perp_u").residual <= 1e-10


@pytest.mark.parametrize("n", [1, 3, 5])
def test_scalar_structure_z_power(n):
    _, _, [(c, _)] = setup(scalar_poly([0] * n + [1]))
    ss = scalar_structure(c.basis, n + 4)
    assert ss.case == "I" and ss.passed
    h = ss.h
    assert abs(abs(h[0]) - 1) <= 1e-12 and np.max(np.abs(h[1:])) <= 1e-12
    assert max_angle(ss.Eprime[:n + 5], e(n + 5, *range(n + 1))) <= 1e-10


def test_scalar_structure_case_two():
    E = e(6, 1)                       # span{z}
    ss = scalar_structure(E, 5)
    assert ss.case == "II" and ss.depth == 1
    assert max_angle(ss.Eprime[:6], e(6, 0)) <= 1e-12
    assert ss.passed


def test_scalar_structure_blaschke():
    seq, tail = blaschke_scalar([0.5], 24)
    U = MatrixSymbol(seq[:, None, None], tail)
    _, _, data = setup(U, 28)
    c = data[0][0]
    ss = scalar_structure(c.basis, 28, tol=10 * tail)
    ratio = np.linalg.norm(ss.g, axis=0) / np.linalg.norm(c.basis, axis=0)
    assert np.all(np.abs(ratio - 1) <= 1e-6)
    assert ss.passed


def test_scalar_corpus_structure():
    for U in symbol_corpus():
        if U.m != 1:
            continue
        _, _, data = setup(U)
        for c, _ in data:
            ss = scalar_structure(c.basis, U.degree + 4)
            inv = [k for k in ss.checks if k.name == "scalar_eprime_invariant"][0]
            iso = [k for k in ss.checks if k.name == "scalar_isometry"][0]
            assert inv.residual <= 1e-9
            if ss.case == "I":
                assert iso.residual <= 1e-9


def test_beurling_z_power():
    for n in (0, 2, 4):
        phi = beurling_extract(e(12, *range(n + 1)), 1)
        assert phi.phi.shape[2] == 1
        coeffs = phi.phi[:, 0, 0]
        assert abs(abs(coeffs[n + 1]) - 1) <= 1e-12
        assert np.max(np.abs(np.delete(coeffs, n + 1))) <= 1e-12
        assert phi.innerness_residual <= 1e-12 and phi.containment_residual <= 1e-12


def test_beurling_whole_window_and_empty():
    full = beurling_extract(np.eye(6), 1, n_pos=5)
    assert full.phi.shape[2] == 0
    empty = beurling_extract(np.zeros((6, 0)), 1, n_pos=5)
    assert empty.degenerate
    assert empty.phi.shape[2] == 1
    np.testing.assert_allclose(np.abs(empty.phi[0, 0, 0]), 1)


def test_beurling_not_invariant():
    with pytest.raises(NotInvariant):
        beurling_extract(e(6, 1), 1)
