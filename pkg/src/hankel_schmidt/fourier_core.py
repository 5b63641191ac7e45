"""Truncated Fourier series on the unit circle.

A function on the circle is stored by its Fourier coefficients over an
explicit index window ``[-n_neg, n_pos]``.  Coefficient arrays are
index-major and component-minor: ``coeffs[k - (-n_neg)]`` is the vector
(or matrix) coefficient at index ``k``.  This matches the flat layout used
by the block Hankel matrices, where entry ``j*m + c`` holds component ``c``
of coefficient ``j``.

Products are formed on an equispaced grid ``exp(2*pi*i*t/M)`` with ``M``
large enough that the cyclic convolution does not wrap around.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, DimensionMismatch

COEFF_ATOL = 1e-12


def _frozen(arr, dtype=complex):
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def next_pow2(n):
    n = max(int(n), 1)
    return 1 << (n - 1).bit_length()


def default_grid_size(N):
    """Smallest power of two >= 4(N+1)."""
    return next_pow2(4 * (N + 1))


@dataclass(frozen=True)
class FourierVec:
    """A C^m-valued function on the circle with finitely many coefficients.

    ``coeffs`` has shape ``(n_neg + n_pos + 1, m)``.
    """

    coeffs: np.ndarray
    n_neg: int = 0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] < 1:
            raise ValueError(f"coeffs must have shape (L, m), got {c.shape}")
        if self.n_neg < 0 or self.n_neg >= c.shape[0]:
            raise ValueError("n_neg must lie inside the coefficient window")
        object.__setattr__(self, "coeffs", _frozen(c))

    @classmethod
    def zeros(cls, m, n_pos, n_neg=0):
        return cls(np.zeros((n_neg + n_pos + 1, m)), n_neg)

    @classmethod
    def from_dict(cls, entries, m=1):
        """Build from ``{index: value}``; scalar values fill component 0."""
        if not entries:
            return cls.zeros(m, 0)
        lo = min(min(entries), 0)
        hi = max(max(entries), 0)
        c = np.zeros((hi - lo + 1, m), dtype=complex)
        for k, v in entries.items():
            v = np.atleast_1d(np.asarray(v, dtype=complex))
            if v.size == 1 and m > 1:
                c[k - lo, 0] = v[0]
            else:
                c[k - lo] = v
        return cls(c, -lo)

    @classmethod
    def monomial(cls, k, component=0, m=1, scale=1.0):
        return cls.from_dict({k: _unit(component, m) * scale}, m)

    @classmethod
    def from_flat(cls, vec, m):
        """Analytic function from a flat (index-major) coefficient vector."""
        vec = np.asarray(vec, dtype=complex)
        if vec.size % m:
            raise DimensionMismatch(f"length {vec.size} not divisible by m={m}")
        return cls(vec.reshape(-1, m), 0)

    @property
    def dim(self):
        return self.coeffs.shape[1]

    @property
    def n_pos(self):
        return self.coeffs.shape[0] - self.n_neg - 1

    @property
    def indices(self):
        return np.arange(-self.n_neg, self.n_pos + 1)

    def coef(self, k):
        if -self.n_neg <= k <= self.n_pos:
            return self.coeffs[k + self.n_neg]
        return np.zeros(self.dim, dtype=complex)

    def window(self, n_neg, n_pos):
        """Re-window: pad with zeros or cut (cutting discards coefficients)."""
        out = np.zeros((n_neg + n_pos + 1, self.dim), dtype=complex)
        lo = max(-n_neg, -self.n_neg)
        hi = min(n_pos, self.n_pos)
        if lo <= hi:
            out[lo + n_neg:hi + n_neg + 1] = self.coeffs[lo + self.n_neg:hi + self.n_neg + 1]
        return FourierVec(out, n_neg)

    @property
    def negative_mass(self):
        """l2 norm of the coefficients at negative indices."""
        return float(np.linalg.norm(self.coeffs[:self.n_neg]))

    def is_analytic(self, atol=COEFF_ATOL):
        return self.negative_mass <= atol

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def to_flat(self, n_pos=None):
        """Flat coefficient vector of the analytic part over ``[0, n_pos]``."""
        n_pos = self.n_pos if n_pos is None else n_pos
        return self.window(0, n_pos).coeffs.reshape(-1).copy()

    def __add__(self, other):
        if self.dim != other.dim:
            raise DimensionMismatch("dimension mismatch in addition")
        n_neg = max(self.n_neg, other.n_neg)
        n_pos = max(self.n_pos, other.n_pos)
        return FourierVec(self.window(n_neg, n_pos).coeffs
                          + other.window(n_neg, n_pos).coeffs, n_neg)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        return FourierVec(scalar * self.coeffs, self.n_neg)

    def allclose(self, other, atol=COEFF_ATOL):
        if self.dim != other.dim:
            return False
        return (self - other).norm() <= atol


@dataclass(frozen=True)
class MatrixFourier:
    """A p x q matrix function on the circle; ``coeffs`` has shape (L, p, q)."""

    coeffs: np.ndarray
    n_neg: int = 0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 3:
            raise ValueError(f"matrix coeffs must have shape (L, p, q), got {c.shape}")
        object.__setattr__(self, "coeffs", _frozen(c))

    @classmethod
    def scalar(cls, seq, n_neg=0):
        return cls(np.asarray(seq, dtype=complex)[:, None, None], n_neg)

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    @property
    def n_pos(self):
        return self.coeffs.shape[0] - self.n_neg - 1

    def coef(self, k):
        if -self.n_neg <= k <= self.n_pos:
            return self.coeffs[k + self.n_neg]
        return np.zeros(self.shape, dtype=complex)

    def column(self, i):
        return FourierVec(self.coeffs[:, :, i], self.n_neg)

    def transpose(self):
        return MatrixFourier(np.swapaxes(self.coeffs, 1, 2), self.n_neg)


@dataclass(frozen=True)
class GridSamples:
    """Boundary values at the nodes ``exp(2*pi*i*t/M)``, shape (M, ...)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        M = v.shape[0]
        if M < 1 or M & (M - 1):
            raise ValueError(f"grid size must be a power of two, got {M}")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def size(self):
        return self.values.shape[0]


def _unit(i, m):
    e = np.zeros(m, dtype=complex)
    e[i] = 1.0
    return e


def _check_grid(n_neg, n_pos, M):
    if n_neg + n_pos + 1 > M:
        raise AliasingError(
            f"window [-{n_neg}, {n_pos}] needs {n_neg + n_pos + 1} nodes, grid has {M}")


def coeffs_to_grid(coeffs, n_neg, M):
    """Evaluate a coefficient array (axis 0 = index) on the M-point grid."""
    coeffs = np.asarray(coeffs, dtype=complex)
    _check_grid(n_neg, coeffs.shape[0] - n_neg - 1, M)
    buf = np.zeros((M,) + coeffs.shape[1:], dtype=complex)
    idx = (np.arange(coeffs.shape[0]) - n_neg) % M
    buf[idx] = coeffs
    return np.fft.ifft(buf, axis=0) * M


def grid_to_coeffs(values, n_neg, n_pos):
    """Fourier coefficients over ``[-n_neg, n_pos]`` from grid values."""
    values = np.asarray(values, dtype=complex)
    M = values.shape[0]
    _check_grid(n_neg, n_pos, M)
    spec = np.fft.fft(values, axis=0) / M
    idx = np.arange(-n_neg, n_pos + 1) % M
    return spec[idx]


def full_window(M):
    """The natural two-sided window of an M-point grid."""
    return M // 2, M // 2 - 1


def to_grid(f, M=None):
    if M is None:
        M = default_grid_size(max(f.n_neg, f.n_pos))
    return GridSamples(coeffs_to_grid(f.coeffs, f.n_neg, M))


def from_grid(samples, n_neg=None, n_pos=None):
    values = samples.values if isinstance(samples, GridSamples) else samples
    M = values.shape[0]
    dn, dp = full_window(M)
    n_neg = dn if n_neg is None else n_neg
    n_pos = dp if n_pos is None else n_pos
    c = grid_to_coeffs(values, n_neg, n_pos)
    if c.ndim == 1:
        c = c[:, None]
    return FourierVec(c, n_neg)


def matrix_to_grid(a, M):
    return coeffs_to_grid(a.coeffs, a.n_neg, M)


def matrix_from_grid(values, n_neg, n_pos):
    return MatrixFourier(grid_to_coeffs(values, n_neg, n_pos), n_neg)


# ---------------------------------------------------------------------------
# operations

def analytic_project(f):
    """Zero all negative-index coefficients (the Riesz projection)."""
    return f.window(0, max(f.n_pos, 0))


def shift(f):
    """Multiply by z."""
    c = np.vstack([np.zeros((1, f.dim)), f.window(0, f.n_pos).coeffs])
    return FourierVec(c, 0)


def backshift(f):
    """S*f = (f - f(0)) / z on the analytic part of f."""
    c = f.window(0, f.n_pos).coeffs
    if c.shape[0] == 1:
        return FourierVec.zeros(f.dim, 0)
    return FourierVec(c[1:], 0)


def conjugate_boundary(f):
    """Pointwise conjugate on the circle: index j gets conj(coefficient at -j)."""
    return FourierVec(np.conj(f.coeffs[::-1]), f.n_pos)


def inner_product(f, g):
    if f.dim != g.dim:
        raise DimensionMismatch(f"dims {f.dim} and {g.dim} differ")
    lo = min(-f.n_neg, -g.n_neg)
    hi = max(f.n_pos, g.n_pos)
    a = f.window(-lo, hi).coeffs
    b = g.window(-lo, hi).coeffs
    return complex(np.vdot(b, a))


def value_at_zero(f):
    """The 0th coefficient vector (F(0) for an H^2 element)."""
    return f.coef(0).copy()


def _as_matrix(a):
    if isinstance(a, MatrixFourier):
        return a
    if isinstance(a, FourierVec):
        if a.dim != 1:
            raise DimensionMismatch("vector-valued left factor; use a MatrixFourier")
        return MatrixFourier(a.coeffs[:, :, None], a.n_neg)
    fourier = getattr(a, "fourier", None)
    if fourier is not None:
        return fourier
    return MatrixFourier.scalar(np.atleast_1d(a))


def multiply(a, f, n_neg=None, n_pos=None, M=None):
    """Coefficients of the pointwise product ``a(z) f(z)``.

    ``a`` is a scalar FourierVec, a MatrixFourier, or anything exposing a
    ``fourier`` attribute (e.g. a MatrixSymbol).  The default output window
    is the full support of the product.  A smaller requested window raises
    AliasingError rather than silently dropping terms.
    """
    A = _as_matrix(a)
    p, q = A.shape
    scalar = (p, q) == (1, 1)
    if not scalar and q != f.dim:
        raise DimensionMismatch(f"matrix has {q} columns, vector has dim {f.dim}")
    full_neg = A.n_neg + f.n_neg
    full_pos = A.n_pos + f.n_pos
    n_neg = full_neg if n_neg is None else n_neg
    n_pos = full_pos if n_pos is None else n_pos
    if n_neg < full_neg or n_pos < full_pos:
        raise AliasingError(
            f"product support [-{full_neg}, {full_pos}] exceeds window [-{n_neg}, {n_pos}]")
    length = full_neg + full_pos + 1
    if M is None:
        M = max(next_pow2(2 * length + 1), default_grid_size(max(f.n_pos, A.n_pos)))
    elif M < length:
        raise AliasingError(f"grid of {M} nodes cannot hold a product of length {length}")
    ag = coeffs_to_grid(A.coeffs, A.n_neg, M)
    fg = coeffs_to_grid(f.coeffs, f.n_neg, M)
    if scalar:
        pg = ag[:, 0, :] * fg
    else:
        pg = np.einsum("tij,tj->ti", ag, fg)
    return FourierVec(grid_to_coeffs(pg, n_neg, n_pos), n_neg)

