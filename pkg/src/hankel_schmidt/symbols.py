"""Matrix symbols U = [u_ij] built from finite data.

Two kinds of entries are representable: polynomials (exact) and finite
Blaschke products, truncated at some degree with a certified bound on the
discarded tail.  Each symbol carries ``tail_bound``, an upper bound on the
sup-norm (hence Hankel operator norm) of the part that was thrown away.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NotSymmetricWarning, ZeroOnCircle
from .fourier_core import FourierVec, MatrixFourier, multiply

SYMMETRY_ATOL = 1e-14


@dataclass(frozen=True)
class MatrixSymbol:
    """Analytic m x m symbol with coefficients ``coeffs[n] = U^(n)``, n = 0..d."""

    coeffs: np.ndarray
    tail_bound: float = 0.0
    symmetric: bool = field(init=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex, copy=True)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ValueError(f"symbol coeffs must have shape (d+1, m, m), got {c.shape}")
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        sym = bool(np.all(np.abs(c - np.swapaxes(c, 1, 2)) <= SYMMETRY_ATOL))
        object.__setattr__(self, "symmetric", sym)

    @property
    def m(self):
        return self.coeffs.shape[1]

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    @property
    def fourier(self):
        return MatrixFourier(self.coeffs, 0)

    def block(self, n):
        if 0 <= n <= self.degree:
            return self.coeffs[n]
        return np.zeros((self.m, self.m), dtype=complex)

    def is_zero(self, atol=0.0):
        return bool(np.all(np.abs(self.coeffs) <= atol))


def poly_symbol(m, blocks, warn=True):
    """Symbol with prescribed Fourier blocks ``[(n, m x m matrix), ...]``.

    Blocks at the same index are summed.  A non-symmetric result is still
    returned, with a NotSymmetricWarning.
    """
    blocks = list(blocks)
    for n, _ in blocks:
        if n < 0:
            raise ValueError(f"analytic symbol needs n >= 0, got {n}")
    d = max((n for n, _ in blocks), default=0)
    c = np.zeros((d + 1, m, m), dtype=complex)
    for n, mat in blocks:
        mat = np.asarray(mat, dtype=complex).reshape(m, m)
        c[n] += mat
    U = MatrixSymbol(c)
    if warn and not U.symmetric:
        warnings.warn("symbol is not symmetric (U != U^t); Schmidt-subspace "
                      "operations will refuse it", NotSymmetricWarning, stacklevel=2)
    return U


def scalar_poly(seq):
    """1 x 1 symbol from a coefficient sequence."""
    return MatrixSymbol(np.asarray(seq, dtype=complex)[:, None, None])


def blaschke_scalar(zeros, N):
    """Coefficients over [0, N] of prod (a - z)/(1 - conj(a) z), and a tail bound.

    The tail bound majorizes sum_{k>N} |c_k|: each factor's coefficients
    are dominated by the series |a| + (1-|a|^2) sum |a|^(k-1) z^k, whose
    product evaluated at z = 1 equals prod (1 + 2|a|).
    """
    if N < 1:
        raise ValueError("truncation N must be >= 1")
    zeros = [complex(a) for a in zeros]
    for a in zeros:
        if abs(a) >= 1:
            raise ZeroOnCircle(f"zero {a} is not inside the open unit disk")
    k = np.arange(1, N + 1)
    prod = None
    major = np.array([1.0])
    total = 1.0
    for a in zeros:
        r = abs(a)
        fac = np.empty(N + 1, dtype=complex)
        fac[0] = a
        fac[1:] = -(1 - r * r) * np.conj(a) ** (k - 1)
        fac = FourierVec(fac)
        prod = fac if prod is None else multiply(fac, prod).window(0, N)
        maj = np.empty(N + 1)
        maj[0] = r
        maj[1:] = (1 - r * r) * r ** (k - 1)
        major = np.convolve(major, maj)[:N + 1]
        total *= 1 + 2 * r
    tail = total - float(np.sum(major))
    if tail > 0:
        # slack for rounding in the subtraction
        tail += 4 * np.finfo(float).eps * total * (N + 1)
    else:
        tail = 0.0
    if prod is None:
        seq = np.zeros(N + 1, dtype=complex)
        seq[0] = 1.0
    else:
        seq = np.array(prod.coeffs[:, 0])
    return seq, float(tail)


def inner_scalar(zeros=(), monomial=0, N=None):
    """Scalar inner function z^monomial * B(zeros), truncated at N.

    Returns (coefficient sequence, tail_bound).  Without Blaschke zeros the
    result is the exact monomial and N defaults to its degree.
    """
    zeros = list(zeros)
    if not zeros:
        seq = np.zeros(monomial + 1, dtype=complex)
        seq[monomial] = 1.0
        if N is not None and N > monomial:
            seq = np.concatenate([seq, np.zeros(N - monomial)])
        return seq, 0.0
    if N is None:
        raise ValueError("truncation N is required for Blaschke factors")
    base, tail = blaschke_scalar(zeros, max(N - monomial, 1))
    seq = np.concatenate([np.zeros(monomial, dtype=complex), base])[:N + 1]
    if seq.size < N + 1:
        seq = np.concatenate([seq, np.zeros(N + 1 - seq.size)])
    # dropping the top `monomial` coefficients of base adds to the tail
    dropped = float(np.sum(np.abs(base[N + 1 - monomial:]))) if monomial else 0.0
    return seq, tail + dropped


def scalar_times_matrix(seq, matrix, tail_bound=0.0):
    """Symbol u(z) * C for a scalar sequence u and constant matrix C."""
    matrix = np.asarray(matrix, dtype=complex)
    seq = np.asarray(seq, dtype=complex)
    tb = tail_bound * float(np.linalg.norm(matrix, 2))
    return MatrixSymbol(seq[:, None, None] * matrix[None], tb)


def _pad(seq, length):
    seq = np.asarray(seq, dtype=complex)
    return np.concatenate([seq, np.zeros(length - seq.size, dtype=complex)])


def example_36a(phi, tail_bound=0.0):
    """U = [[phi, 0], [0, phi]]."""
    return scalar_times_matrix(phi, np.eye(2), tail_bound)


def example_36b(phi, tail_bound=0.0):
    """U = [[0, phi], [phi, 0]]."""
    return scalar_times_matrix(phi, [[0, 1], [1, 0]], tail_bound)


def example_46(phi, psi, phi_tail=0.0, psi_tail=0.0):
    """U = [[theta, gamma], [gamma, theta]] with theta = phi + psi, gamma = phi - psi."""
    L = max(len(phi), len(psi))
    phi = _pad(phi, L)
    psi = _pad(psi, L)
    theta = phi + psi
    gamma = phi - psi
    c = np.empty((L, 2, 2), dtype=complex)
    c[:, 0, 0] = c[:, 1, 1] = theta
    c[:, 0, 1] = c[:, 1, 0] = gamma
    return MatrixSymbol(c, 2.0 * (phi_tail + psi_tail))


def shift_symbol(U):
    """S*U: blocks move down one index, the constant block is dropped."""
    if U.degree == 0:
        return MatrixSymbol(np.zeros((1, U.m, U.m)), U.tail_bound)
    return MatrixSymbol(U.coeffs[1:], U.tail_bound)


def symbol_columns(U):
    """The columns U_i = U e_i as H^2 elements."""
    return [FourierVec(U.coeffs[:, :, i], 0) for i in range(U.m)]


def random_unitary(rng, m):
    z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_symmetric_symbol(rng, m, d):
    """Random complex symmetric polynomial symbol of degree d."""
    c = rng.standard_normal((d + 1, m, m)) + 1j * rng.standard_normal((d + 1, m, m))
    c = 0.5 * (c + np.swapaxes(c, 1, 2))
    return MatrixSymbol(c)


def random_takagi_symbol(rng, m, d, repeat=True):
    """Q diag(p_1, ..., p_m) Q^t with Q unitary and random scalar polynomials p_i.

    With ``repeat`` all p_i are equal, which produces Schmidt subspaces of
    multiplicity >= m whose wandering part is typically m-dimensional.
    """
    Q = random_unitary(rng, m)
    if repeat:
        p = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
        ps = [p] * m
    else:
        ps = [rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1) for _ in range(m)]
    c = np.einsum("ij,nj,kj->nik", Q, np.stack(ps, axis=1), Q)
    c = 0.5 * (c + np.swapaxes(c, 1, 2))
    return MatrixSymbol(c)


def random_monomial_takagi_symbol(rng, m, d):
    """Q diag(p_1, ..., p_m) Q^t where p_1 = c z^k and the rest are c z^k or generic.

    The monomial entries give Schmidt subspaces of multiplicity k + 1, so
    E_K is nonzero and the intersection statements are not vacuous.
    """
    Q = random_unitary(rng, m)
    ps = []
    for i in range(m):
        p = np.zeros(d + 1, dtype=complex)
        if i == 0 or rng.random() < 0.5:
            p[rng.integers(1, d + 1)] = rng.uniform(0.5, 3.0) * np.exp(2j * np.pi * rng.random())
        else:
            p[:] = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
        ps.append(p)
    c = np.einsum("ij,nj,kj->nik", Q, np.stack(ps, axis=1), Q)
    c = 0.5 * (c + np.swapaxes(c, 1, 2))
    return MatrixSymbol(c)


def symbol_corpus(n=50, seed=20240601, m_values=(1, 2, 3), max_degree=4):
    """Deterministic corpus of random symmetric polynomial symbols.

    Every fifth instance with m > 1 uses the Takagi form with a repeated
    scalar, so the corpus also exercises Schmidt subspaces with full
    wandering dimension. Another fifth carries monomial diagonal entries,
    which give clusters with nonzero E_K.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        m = int(m_values[i % len(m_values)])
        d = int(rng.integers(1, max_degree + 1))
        if i % 5 == 2:
            out.append(random_monomial_takagi_symbol(rng, m, d))
        elif m > 1 and i % 5 == 4:
            out.append(random_takagi_symbol(rng, m, d, repeat=True))
        else:
            out.append(random_symmetric_symbol(rng, m, d))
    return out

