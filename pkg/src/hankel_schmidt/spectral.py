"""Schmidt subspaces and a small toolkit for comparing subspaces.

Subspaces of the truncated Hardy space are carried as matrices with
orthonormal columns in flat coefficient space (index-major, m components
per coefficient).
"""

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousClustering, DimensionMismatch, NotHermitian
from .hankel_ops import BlockHankelMatrix, hsq_matrix

CLUSTER_TOL = 1e-8
S_FLOOR = 1e-8
RANK_TOL = 1e-10


@dataclass(frozen=True)
class SubspaceBasis:
    basis: np.ndarray
    m: int

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def N(self):
        return self.basis.shape[0] // self.m - 1


@dataclass(frozen=True)
class SchmidtSubspace:
    s: float
    basis: np.ndarray
    cluster_residual: float
    operator_tag: str = "H"
    m: int = 1

    @property
    def multiplicity(self):
        return self.basis.shape[1]

    def as_subspace(self):
        return SubspaceBasis(self.basis, self.m)


def _cols(A):
    if isinstance(A, (SubspaceBasis, SchmidtSubspace)):
        return A.basis
    return np.asarray(A)


def hermitian_eig(M, herm_tol=1e-12):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    M = np.asarray(M)
    scale = max(np.linalg.norm(M), np.finfo(float).tiny)
    if np.linalg.norm(M - M.conj().T) > herm_tol * scale:
        raise NotHermitian("matrix is not Hermitian to tolerance")
    return np.linalg.eigh(0.5 * (M + M.conj().T))


def default_s_floor(tail_bound=0.0):
    return max(S_FLOOR, 2.0 * tail_bound)


def _clusters(s_desc, tol):
    groups = [[0]]
    for i in range(1, len(s_desc)):
        if s_desc[groups[-1][-1]] - s_desc[i] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _spectrum(G):
    """Descending s values and matching orthonormal vectors of H_U^2.

    For a BlockHankelMatrix the left singular vectors of gamma are used:
    gamma is complex symmetric, so H_U^2 = gamma gamma^*, and the SVD
    resolves small s far better than an eigensolve of the square.
    """
    if isinstance(G, BlockHankelMatrix):
        hsq_matrix(G)   # symmetry gate
        V, sv, _ = np.linalg.svd(G.gamma)
        return sv, V, G.m
    lam, V = hermitian_eig(np.asarray(G))
    return np.sqrt(np.clip(lam, 0.0, None))[::-1], V[:, ::-1], 1


def schmidt_subspaces(G, cluster_tol=CLUSTER_TOL, s_floor=None, tag="H"):
    """Cluster the spectrum of the squared Hankel into Schmidt subspaces.

    ``G`` is a BlockHankelMatrix (pass the shifted matrix with tag "K" for
    E_K) or a precomputed Hermitian matrix, for which m = 1 is assumed.
    Values with s <= s_floor are dropped.  Clusters are returned with s
    descending; each s is the root mean square of its members.
    """
    if s_floor is None:
        s_floor = default_s_floor(G.tail_bound) if isinstance(G, BlockHankelMatrix) else S_FLOOR
    s_all, V, m = _spectrum(G)
    keep = s_all > s_floor
    if not np.any(keep):
        return []
    s_keep = s_all[keep]
    tol = cluster_tol * s_all[0]
    groups = _clusters(s_keep, tol)
    for a, b in zip(groups, groups[1:]):
        gap = s_keep[a[-1]] - s_keep[b[0]]
        if gap < 3 * tol:
            raise AmbiguousClustering(
                f"clusters at s={s_keep[a[-1]]:.12g} and s={s_keep[b[0]]:.12g} "
                f"are separated by {gap:.3e} < 3*cluster_tol*s_max", gap=gap)
    out = []
    for g in groups:
        idx = np.asarray(g)
        lam = s_keep[idx] ** 2
        s = float(np.sqrt(np.mean(lam)))
        out.append(SchmidtSubspace(
            s=s,
            basis=V[:, idx],
            cluster_residual=float(np.max(np.abs(lam - s * s))),
            operator_tag=tag,
            m=m,
        ))
    return out


def eigenspace_at(G, s, tol):
    """Orthonormal basis of the H_U^2 eigenvectors whose s lies within tol of s.

    ``tol`` is absolute.  The result may be empty.
    """
    sv, V, _ = _spectrum(G)
    return V[:, np.abs(sv - s) <= tol]


def kernel_deficit(G, s_floor=None):
    """Number of eigenvalues dropped as belonging to the kernel (s <= s_floor)."""
    if s_floor is None:
        s_floor = default_s_floor(G.tail_bound)
    return int(np.sum(_spectrum(G)[0] <= s_floor))


def numerical_rank(M, rank_tol=RANK_TOL, scale=None):
    """Count singular values above rank_tol * max(M.shape) * scale.

    ``scale`` defaults to the largest singular value.
    """
    M = np.atleast_2d(np.asarray(M))
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if scale is None:
        scale = sv[0] if sv.size else 0.0
    return int(np.sum(sv > rank_tol * max(M.shape) * scale))


def orthonormalize(X, tol=1e-10, scale=None):
    """Orthonormal basis for the column span of X.

    Singular values above ``tol * scale`` count; ``scale`` defaults to the
    largest column norm.  Pass ``scale=1`` for an absolute threshold.
    """
    X = np.atleast_2d(np.asarray(X))
    if X.shape[1] == 0:
        return X.copy()
    U, sv, _ = np.linalg.svd(X, full_matrices=False)
    if scale is None:
        scale = max(np.max(np.linalg.norm(X, axis=0)), np.finfo(float).tiny)
    return U[:, sv > tol * scale]


def principal_angles(A, B):
    """Principal angles (ascending) between two column spans.

    Small angles come from sines and large ones from cosines, so angles
    near zero are resolved to machine precision.
    """
    A, B = _cols(A), _cols(B)
    if A.shape[0] != B.shape[0]:
        raise DimensionMismatch(f"ambient dims {A.shape[0]} and {B.shape[0]} differ")
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros(0)
    if B.shape[1] > A.shape[1]:
        A, B = B, A
    C = A.conj().T @ B
    cos = np.clip(np.linalg.svd(C, compute_uv=False), 0.0, 1.0)      # descending
    sin = np.sort(np.clip(np.linalg.svd(B - A @ C, compute_uv=False), 0.0, 1.0))
    ang = np.where(cos ** 2 < 0.5, np.arccos(cos), np.arcsin(sin))
    return np.sort(ang)


def max_angle(A, B):
    ang = principal_angles(A, B)
    return float(ang.max()) if ang.size else 0.0


def subspaces_equal(A, B, tol=1e-9):
    A, B = _cols(A), _cols(B)
    if A.shape[1] != B.shape[1]:
        return False
    return max_angle(A, B) <= tol


def evaluation_matrix(E, m):
    """The m x q matrix of values at zero of the basis columns."""
    return _cols(E)[:m, :]


def _split_at_zero(E, m, tol):
    E = _cols(E)
    if E.shape[1] == 0:
        return E[:, :0], E[:, :0]
    Z = evaluation_matrix(E, m)
    _, sv, Vh = np.linalg.svd(Z, full_matrices=True)
    r = int(np.sum(sv > tol))
    Q = Vh.conj().T
    return E @ Q[:, r:], E @ Q[:, :r]


def intersect_with_shifted(E, m, tol=1e-9):
    """Orthonormal basis of {F in E : F(0) = 0} = E intersected with zH^2."""
    return _split_at_zero(E, m, tol)[0]


def wandering_part(E, m, tol=1e-9):
    """Orthonormal basis of E minus (E intersected with zH^2); at most m columns."""
    return _split_at_zero(E, m, tol)[1]


def orth_complement_within(E, vectors, tol=1e-9):
    """Orthonormal basis of {f in span E : <f, v> = 0 for all v}."""
    E = _cols(E)
    V = np.atleast_2d(_cols(vectors))
    if E.shape[1] == 0 or V.shape[1] == 0:
        return E.copy()
    B = V.conj().T @ E
    scale = max(np.max(np.linalg.norm(V, axis=0)), 1.0)
    _, sv, Vh = np.linalg.svd(B, full_matrices=True)
    rank = int(np.sum(sv > tol * scale))
    return E @ Vh.conj().T[:, rank:]


def project(E, X):
    """Orthogonal projection of columns X onto span E (E orthonormal)."""
    E = _cols(E)
    return E @ (E.conj().T @ X)


def outside_residual(E, X):
    """|| (I - P_E) X || in spectral norm."""
    X = np.atleast_2d(X)
    if X.size == 0:
        return 0.0
    R = X - project(E, X) if _cols(E).shape[1] else X
    return float(np.linalg.norm(R, 2))
