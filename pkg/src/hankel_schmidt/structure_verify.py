"""Structural checks on Schmidt subspaces.

Every check produces a :class:`Check` record (residual, tolerance, verdict)
rather than raising, so a report can carry failures alongside passes.  A
verdict of ``None`` means inconclusive.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridSingularity, NotApplicable, NotInvariant
from .fourier_core import coeffs_to_grid, grid_to_coeffs, next_pow2
from .spectral import (intersect_with_shifted, max_angle, orth_complement_within,
                       orthonormalize, outside_residual, project, wandering_part)

DEFAULT_TOL = 1e-9
COND_MAX = 1e8


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool | None = None

    def __post_init__(self):
        self.residual = float(self.residual)
        self.tolerance = float(self.tolerance)
        if self.passed is None and np.isfinite(self.residual):
            self.passed = bool(self.residual <= self.tolerance)

    def to_dict(self):
        return {"name": self.name, "residual": self.residual,
                "tolerance": self.tolerance, "pass": self.passed}


def inconclusive(name, residual, tolerance):
    c = Check(name, residual, tolerance, passed=False)
    c.passed = None
    return c


@dataclass
class StructureReport:
    s: float
    m: int
    dim_E: int
    dim_EK: int
    r: int
    p: int
    checks: list = field(default_factory=list)
    defect_basis: np.ndarray | None = None
    wandering_basis: np.ndarray | None = None
    intersection_basis: np.ndarray | None = None

    @property
    def passed(self):
        return all(c.passed is True for c in self.checks)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {"s": self.s, "dim_E": self.dim_E, "dim_EK": self.dim_EK,
                "r": self.r, "p": self.p,
                "checks": [c.to_dict() for c in sorted(self.checks, key=lambda c: c.name)]}


def backshift_flat(X, m):
    """S* on flat coefficient columns: drop coefficient 0, pad the top with zeros."""
    X = np.atleast_2d(X)
    out = np.zeros_like(X)
    out[:-m] = X[m:]
    return out


def shift_flat(X, m):
    """S on flat columns, truncated to the same window (top block is lost)."""
    X = np.atleast_2d(X)
    out = np.zeros_like(X)
    out[m:] = X[:-m]
    return out


def perp_tol(s, U_mat, tol=DEFAULT_TOL):
    """Threshold on |<x, U_i>| for calling a Schmidt vector at s orthogonal to U.

    K^2 x - s^2 x = -sum <x, U_i> U_i, so orthogonality only means
    something relative to s^2 / |U|^2.  Floored at roundoff level.
    """
    if s is None:
        return tol
    nu = max(float(np.linalg.norm(U_mat, 2)) if U_mat.size else 0.0, 1.0)
    return max(tol * min(1.0, (s / nu) ** 2), 1e3 * np.finfo(float).eps)


def lemma_24_check(E_H, E_K, U_mat, tol=DEFAULT_TOL, s=None):
    """E_H(s) and E_K(s) have the same intersection with {U_1..U_m}^perp."""
    pt = perp_tol(s, U_mat, tol)
    A = orth_complement_within(E_H, U_mat, pt)
    B = orth_complement_within(E_K, U_mat, pt)
    if A.shape[1] != B.shape[1]:
        return Check("u_perp_parts_agree", np.pi / 2, tol, passed=False), A, B
    return Check("u_perp_parts_agree", max_angle(A, B), tol), A, B


def v_space(E_K, U_mat, tol=DEFAULT_TOL):
    """span{P_EK U_i}, which equals E_K minus (E_K cap {U_i}^perp)."""
    if E_K.shape[1] == 0:
        return E_K[:, :0]
    return orthonormalize(project(E_K, U_mat), tol, scale=1.0)


def near_invariance_report(E_H, E_K, U_mat, m, s, tol=DEFAULT_TOL):
    """Near S*-invariance with defect: p <= m and the two inclusions."""
    E_H = np.asarray(E_H)
    X = intersect_with_shifted(E_H, m, tol)
    W = wandering_part(E_H, m, tol)
    SX = backshift_flat(X, m)
    R = SX - project(E_H, SX)
    if R.shape[1]:
        Ul, sv, _ = np.linalg.svd(R, full_matrices=False)
        p = int(np.sum(sv > tol))
        defect = Ul[:, :p]
    else:
        p, defect = 0, R[:, :0]
    V = v_space(E_K, U_mat, tol)
    pt = perp_tol(s, U_mat, tol)
    V_def = orth_complement_within(E_K, U_mat, pt)
    # V defined as E_K minus its U-perp part, against the generator set
    V_alt = orthonormalize(E_K - project(V_def, E_K), tol, scale=1.0) if E_K.shape[1] else E_K
    if V.shape[1] == V_alt.shape[1]:
        gen_res = max_angle(V, V_alt)
    else:
        gen_res = np.pi / 2
    target = orthonormalize(np.hstack([orth_complement_within(E_H, U_mat, pt), V]), tol)
    checks = [
        Check("defect_le_m", p, m, passed=p <= m),
        Check("wandering_le_m", W.shape[1], m, passed=W.shape[1] <= m),
        Check("backshift_into_ek", outside_residual(E_K, SX) if E_K.shape[1] else
              (np.linalg.norm(SX, 2) if SX.size else 0.0), tol),
        Check("inclusion_final", outside_residual(target, SX) if target.shape[1] else
              (np.linalg.norm(SX, 2) if SX.size else 0.0), tol),
        Check("v_space_le_m", V.shape[1], m, passed=V.shape[1] <= m),
        Check("v_space_generators", gen_res, tol),
    ]
    return StructureReport(s=float(s), m=m, dim_E=E_H.shape[1], dim_EK=E_K.shape[1],
                           r=W.shape[1], p=p, checks=checks, defect_basis=defect,
                           wandering_basis=W, intersection_basis=X)


@dataclass
class FullWandering:
    report: StructureReport
    W: np.ndarray
    condition: float


def full_wandering_check(E_H, E_K, U_mat, m, s, tol=DEFAULT_TOL, cond_max=COND_MAX):
    """Checks for the case dim(E minus E cap zH^2) = m.

    Returns the structure report extended with: defect zero, E_K orthogonal
    to every U_i, and W(0) invertible.  The orthonormal wandering basis W
    (columns W_1..W_m, i.e. F_0) is returned alongside.
    """
    rep = near_invariance_report(E_H, E_K, U_mat, m, s, tol)
    if rep.r < m:
        raise NotApplicable(f"wandering dimension {rep.r} < m = {m}")
    W = rep.wandering_basis
    W0 = W[:m, :]
    sv = np.linalg.svd(W0, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    perp = float(np.max(np.abs(E_K.conj().T @ U_mat))) if E_K.shape[1] else 0.0
    rep.checks += [
        Check("defect_zero", rep.p, 0, passed=rep.p == 0),
        Check("ek_perp_u", perp, tol),
    ]
    if cond <= cond_max:
        rep.checks.append(Check("f0_at_zero_invertible", cond, cond_max))
    else:
        rep.checks.append(inconclusive("f0_at_zero_invertible", cond, cond_max))
    return FullWandering(rep, W, cond)


# ---------------------------------------------------------------------------
# scalar case

@dataclass
class ScalarStructure:
    case: str
    depth: int
    h: np.ndarray            # analytic coefficients of the multiplier
    g: np.ndarray            # columns: coefficients of F/h (long window)
    Eprime: np.ndarray       # orthonormal basis of the recovered space
    checks: list
    grid_size: int

    @property
    def passed(self):
        return all(c.passed is True for c in self.checks)


def _grid_quotient(F, h, M):
    Fg = coeffs_to_grid(F, 0, M)
    hg = coeffs_to_grid(h, 0, M)
    return Fg / hg[:, None], float(np.min(np.abs(hg)))


def scalar_structure(E, N, tol=DEFAULT_TOL, min_grid=256, max_grid=1 << 15):
    """Write a scalar Schmidt subspace E as h K for an S*-invariant K.

    Case I (E not inside zH^2): h is the unit wandering vector.  Case II:
    apply S* until some element does not vanish at 0, then h = z^depth W_1.
    """
    E = np.asarray(E)
    if E.shape[1] == 0:
        raise ValueError("E must be nontrivial")
    work = E
    depth = 0
    while True:
        W = wandering_part(work, 1, tol)
        if W.shape[1]:
            break
        if depth >= N:
            raise NotApplicable("every basis vector vanishes to order > N")
        work = backshift_flat(work, 1)
        depth += 1
    case = "I" if depth == 0 else "II"
    h = np.concatenate([np.zeros(depth, dtype=complex), W[:, 0]])[:E.shape[0]]
    M = max(min_grid, next_pow2(8 * E.shape[0]))
    while True:
        vals, hmin = _grid_quotient(E, h, M)
        if hmin < 1e-8:
            raise GridSingularity(f"|h| = {hmin:.2e} on the grid")
        c = grid_to_coeffs(vals, M // 2, M // 2 - 1)
        pos = c[M // 2:]
        tail = np.linalg.norm(pos[M // 4:])
        if tail <= 1e-15 * max(np.linalg.norm(pos), 1.0) or M >= max_grid:
            break
        M *= 2
    neg = float(np.linalg.norm(c[:M // 2]))
    g = pos
    norm_err = float(np.max(np.abs(np.linalg.norm(g, axis=0) - np.linalg.norm(E, axis=0))))
    gram_err = float(np.linalg.norm(g.conj().T @ g - E.conj().T @ E, 2))
    Q = orthonormalize(g, 1e-10)
    inv_res = outside_residual(Q, backshift_flat(Q, 1))
    checks = [
        Check("scalar_g_analytic", neg, tol),
        Check("scalar_isometry", max(norm_err, gram_err), tol),
        Check("scalar_eprime_invariant", inv_res, tol),
        Check("scalar_case_vanishing", 0.0 if case == "I" else
              float(np.max(np.abs(E[:depth, :]))), tol),
    ]
    return ScalarStructure(case, depth, h, g, Q, checks, M)


# ---------------------------------------------------------------------------
# Beurling-Lax data of an S*-invariant subspace

@dataclass
class BeurlingData:
    phi: np.ndarray          # (L, m, r') coefficients of the inner candidate
    innerness_residual: float
    containment_residual: float
    phi_at_zero: float
    degenerate: bool


def _trim_window(X, m, tol=1e-15):
    L = X.shape[0] // m
    blocks = np.linalg.norm(X.reshape(L, m, -1), axis=(1, 2))
    nz = np.nonzero(blocks > tol * max(blocks.max(), 1.0))[0]
    return int(nz[-1]) + 1 if nz.size else 1


def beurling_extract(Eprime, m, n_pos=None, tol=DEFAULT_TOL, n_check=4, mask=2):
    """Inner candidate Phi with Eprime = H^2 minus Phi H^2, within a window.

    ``Eprime`` holds orthonormal flat columns.  The window defaults to the
    last nonzero block plus ``mask + n_check + 1`` blocks of headroom.
    """
    Eprime = np.asarray(Eprime)
    if Eprime.shape[1]:
        inv = outside_residual(Eprime, backshift_flat(Eprime, m))
        if inv > tol:
            raise NotInvariant(f"S*-invariance residual {inv:.3e} exceeds {tol:.1e}")
    if n_pos is None:
        L = (_trim_window(Eprime, m) if Eprime.shape[1] else 1) + mask + n_check + 1
    else:
        L = n_pos + 1
    E = np.zeros((L * m, Eprime.shape[1]), dtype=complex)
    rows = min(L * m, Eprime.shape[0])
    E[:rows] = Eprime[:rows]
    degenerate = E.shape[1] == 0
    # complement of E' in the window
    if E.shape[1]:
        Uf, sv, _ = np.linalg.svd(E, full_matrices=True)
        C = Uf[:, E.shape[1]:]
    else:
        C = np.eye(L * m, dtype=complex)
    if C.shape[1] == 0:
        return BeurlingData(np.zeros((L, m, 0)), 0.0, 0.0, 0.0, degenerate)
    SC = shift_flat(C, m)
    B = SC.conj().T @ C
    _, sv, Vh = np.linalg.svd(B, full_matrices=True)
    rank = int(np.sum(sv > 1e-8))
    wand = C @ Vh.conj().T[:, rank:]
    phi = wand.reshape(L, m, -1)
    rp = phi.shape[2]
    # innerness on a grid
    Mg = max(64, next_pow2(4 * L))
    pg = coeffs_to_grid(phi, 0, Mg)
    gram = np.einsum("tki,tkj->tij", pg.conj(), pg) - np.eye(rp)[None]
    inner_res = float(np.max(np.linalg.norm(gram, ord=2, axis=(1, 2)))) if rp else 0.0
    cont = 0.0
    if E.shape[1]:
        for k in range(n_check + 1):
            X = wand.copy()
            for _ in range(k):
                X = shift_flat(X, m)
            X[(L - mask) * m:] = 0
            cont = max(cont, float(np.linalg.norm(E.conj().T @ X, 2)))
    at0 = float(np.linalg.norm(phi[0])) if rp else 0.0
    return BeurlingData(phi, inner_res, cont, at0, degenerate)
