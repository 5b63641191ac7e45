"""Finite matrix realization of the block Hankel operator H_U and relatives.

H_U is anti-linear: in coefficient space it acts as ``x -> gamma @ conj(x)``
with ``gamma`` the block Hankel matrix ``[U^(j+k)]``.  Compositions of two
anti-linear maps therefore produce ``gamma @ conj(gamma)``, never
``gamma @ gamma``.

For a polynomial symbol of degree d and a window N >= d the matrix is an
exact representation: rows and columns beyond d vanish, so every nonzero
singular vector lives in degrees <= d.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotAnEigenvector, NotSymmetric, WindowExceeded
from .fourier_core import (FourierVec, analytic_project, backshift,
                           conjugate_boundary, multiply, shift)
from .symbols import MatrixSymbol, shift_symbol


@dataclass(frozen=True)
class BlockHankelMatrix:
    gamma: np.ndarray
    m: int
    N: int
    symbol: MatrixSymbol

    @property
    def tail_bound(self):
        return self.symbol.tail_bound

    @property
    def symbol_degree(self):
        return self.symbol.degree

    @property
    def size(self):
        return self.gamma.shape[0]

    def block(self, j, k):
        m = self.m
        return self.gamma[j * m:(j + 1) * m, k * m:(k + 1) * m]


def opnorm(A):
    """Spectral norm (largest singular value)."""
    A = np.atleast_2d(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def hankel_rect(U, rows, cols):
    """Block Hankel matrix with block (j, k) = U^(j+k), j < rows, k < cols."""
    m = U.m
    padded = np.zeros((rows + cols - 1, m, m), dtype=complex)
    n = min(U.degree + 1, padded.shape[0])
    padded[:n] = U.coeffs[:n]
    j = np.arange(rows)[:, None]
    k = np.arange(cols)[None, :]
    blocks = padded[j + k]                      # (rows, cols, m, m)
    return blocks.transpose(0, 2, 1, 3).reshape(rows * m, cols * m)


def build_gamma(U, N):
    """The (N+1)m x (N+1)m block Hankel matrix of U."""
    if N < 0:
        raise ValueError("N must be >= 0")
    g = hankel_rect(U, N + 1, N + 1)
    g.setflags(write=False)
    return BlockHankelMatrix(g, U.m, N, U)


def build_gamma_shifted(U, N):
    """Gamma' = [U^(j+k+1)], the matrix of K_U = H_{S*U}."""
    return build_gamma(shift_symbol(U), N)


def _coeff_vector(G, f):
    if f.dim != G.m:
        raise ValueError(f"function has dim {f.dim}, operator acts on C^{G.m}")
    if f.n_pos > G.N and np.any(f.coeffs[f.n_neg + G.N + 1:] != 0):
        raise WindowExceeded(f"coefficients beyond degree {G.N}")
    return f.to_flat(G.N)


def apply_H(G, f):
    """H_U(f) = P_m(U conj(f)) via the matrix: gamma @ conj(coeff(f))."""
    x = _coeff_vector(G, f)
    return FourierVec.from_flat(G.gamma @ np.conj(x), G.m)


def apply_H_grid(U, f, N):
    """H_U(f) computed on the circle: analytic part of U * conj(f), window [0, N]."""
    return analytic_project(multiply(U, conjugate_boundary(f))).window(0, N)


def _require_symmetric(G):
    if not G.symbol.symmetric:
        raise NotSymmetric("H_U^2 is only self-adjoint for symmetric symbols")


def hsq_matrix(G):
    """Matrix of the linear operator H_U^2, i.e. gamma @ conj(gamma)."""
    _require_symmetric(G)
    return G.gamma @ np.conj(G.gamma)


def apply_Hsq(G, f):
    x = _coeff_vector(G, f)
    return FourierVec.from_flat(hsq_matrix(G) @ x, G.m)


def k_realizations(G, Gp, f):
    """K_U(f) three ways: H_U S f, S* H_U f and H_{S*U} f."""
    x = _coeff_vector(G, f)
    f = FourierVec.from_flat(x, G.m)
    sf = shift(f)
    rect = hankel_rect(G.symbol, G.N + 1, G.N + 2)
    via_shift = FourierVec.from_flat(rect @ np.conj(sf.to_flat(G.N + 1)), G.m)
    via_back = backshift(apply_H(G, f)).window(0, G.N)
    via_shifted_symbol = apply_H(Gp, f)
    return via_shift, via_back, via_shifted_symbol


def apply_K(G, Gp, f):
    return k_realizations(G, Gp, f)[0]


def k_disagreement(G, Gp, f):
    """Largest pairwise distance between the three K_U realizations."""
    a, b, c = k_realizations(G, Gp, f)
    return max((a - b).norm(), (a - c).norm(), (b - c).norm())


def ksq_matrix(Gp):
    _require_symmetric(Gp)
    return Gp.gamma @ np.conj(Gp.gamma)


def columns_matrix(U_cols, N):
    """Flat coefficient vectors of U_1..U_m stacked as columns."""
    return np.column_stack([u.to_flat(N) for u in U_cols])


def rank_m_identity_residual(G, Gp, U_cols):
    """|| K^2 - (H^2 - sum_i <., U_i> U_i) || in operator norm."""
    _require_symmetric(G)
    C = columns_matrix(U_cols, G.N)
    rhs = hsq_matrix(G) - C @ C.conj().T
    return opnorm(ksq_matrix(Gp) - rhs)


def apply_G(G, f):
    """The linear Hankel G_U(f) = P_m(U J f): gamma @ coeff(f)."""
    return FourierVec.from_flat(G.gamma @ _coeff_vector(G, f), G.m)


def schmidt_pair(G, s, xi, tol=1e-9):
    """Return (xi, eta) with eta = H_U(xi)/s, after certifying H_U^2 xi = s^2 xi.

    Raises NotAnEigenvector when the eigen-residual exceeds tol * s^2 * |xi|.
    """
    if s <= 0:
        raise ValueError("s must be positive")
    x = _coeff_vector(G, xi)
    res = np.linalg.norm(hsq_matrix(G) @ x - s * s * x)
    if res > tol * s * s * max(np.linalg.norm(x), 1.0):
        raise NotAnEigenvector(f"|H^2 xi - s^2 xi| = {res:.3e}")
    eta = (1.0 / s) * apply_H(G, xi)
    back = apply_H(G, eta)
    if (back - s * FourierVec.from_flat(x, G.m)).norm() > tol * s * max(np.linalg.norm(x), 1.0):
        raise NotAnEigenvector("H_U(eta) != s xi")
    return FourierVec.from_flat(x, G.m), eta
