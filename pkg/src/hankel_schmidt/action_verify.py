"""Extraction of the inner function and checks of the action formula.

Under dim W = m the Schmidt subspace is E = F_0 K_Theta with
F_0 = [W_1 .. W_m], and H_U acts by

    H_U(F_0 G) = s P_+ F_0 [ (S* Theta~) conj(G) ],   Theta~ = Theta A.

Theta~ is recovered pointwise on a grid as z * M with
M = F_0^{-1} [H_U W_1 .. H_U W_m] / s.  Nothing forces M to be analytic
numerically, so the mass of its negative coefficients is the substantive
residual.

Functions on the grid are kept as arrays of shape (M, m) or (M, m, k);
"long" coefficient arrays hold the analytic coefficients 0..M/2-1.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridSingularity, NotApplicable, NotInner
from .fourier_core import MatrixFourier, coeffs_to_grid, grid_to_coeffs, next_pow2
from .spectral import (max_angle, orth_complement_within, orthonormalize,
                       outside_residual, project)
from .structure_verify import Check, backshift_flat

DEFAULT_TOL = 1e-9
AT_ZERO_TOL = 1e-10
MIN_SV = 1e-8


def flat_to_blocks(X, m):
    """(L*m, k) flat columns -> (L, m, k) coefficient array."""
    X = np.asarray(X)
    return X.reshape(X.shape[0] // m, m, -1)


def blocks_to_flat(B):
    return B.reshape(B.shape[0] * B.shape[1], -1)


def grid_split(vals):
    """Two-sided coefficients of grid values: (negative part, analytic part)."""
    M = vals.shape[0]
    c = grid_to_coeffs(vals, M // 2, M // 2 - 1)
    return c[:M // 2], c[M // 2:]


def analytic_grid(vals):
    """Grid values of the analytic projection."""
    M = vals.shape[0]
    _, pos = grid_split(vals)
    return coeffs_to_grid(pos, 0, M)


@dataclass
class ThetaExtraction:
    s: float
    m: int
    grid_size: int
    theta: MatrixFourier          # Theta~ = z M, Theta~(0) = 0
    M_grid: np.ndarray            # (M, m, m) analytic part of M on the grid
    F0_grid: np.ndarray           # (M, m, m)
    HW: np.ndarray                # flat columns H_U W_i
    W: np.ndarray                 # flat columns W_i
    analyticity_residual: float
    innerness_residual: float
    round_trip_residual: float
    min_singular_value: float
    checks: list = field(default_factory=list)


def _pick_grid(F0, HW, s, m, start, max_grid):
    M = start
    while True:
        F0g = coeffs_to_grid(F0, 0, M)
        HWg = coeffs_to_grid(HW, 0, M)
        sv = np.linalg.svd(F0g, compute_uv=False)
        smin = float(sv[:, -1].min())
        if smin < MIN_SV:
            raise GridSingularity(f"F_0 has singular value {smin:.2e} on the grid")
        Mg = np.linalg.solve(F0g, HWg) / s
        neg, pos = grid_split(Mg)
        tail = np.linalg.norm(pos[M // 4:])
        if tail <= 1e-15 * max(np.linalg.norm(pos), 1.0) or M >= max_grid:
            return M, F0g, Mg, neg, pos, smin
        M *= 2


def extract_theta_tilde(G, s, W, tol=DEFAULT_TOL, min_grid=256, max_grid=1 << 14):
    """Recover Theta~ from the wandering basis W (flat columns W_1..W_m)."""
    m = G.m
    W = np.asarray(W)
    if W.shape[1] < m:
        raise NotApplicable(f"wandering dimension {W.shape[1]} < m = {m}")
    HW = G.gamma @ np.conj(W)
    F0 = flat_to_blocks(W, m)
    HWb = flat_to_blocks(HW, m)
    start = max(min_grid, next_pow2(8 * F0.shape[0]))
    Mgrid, F0g, Mg, neg, pos, smin = _pick_grid(F0, HWb, s, m, start, max_grid)
    analytic = float(np.linalg.norm(neg))
    theta = np.zeros((Mgrid // 2 + 1, m, m), dtype=complex)
    theta[1:] = pos
    theta = MatrixFourier(theta)
    Ma = coeffs_to_grid(pos, 0, Mgrid)
    gram = np.einsum("tki,tkj->tij", Ma.conj(), Ma) - np.eye(m)[None]
    inner = float(np.max(np.linalg.norm(gram, ord=2, axis=(1, 2))))
    back = s * np.einsum("tij,tjk->tik", F0g, Ma)
    bneg, bpos = grid_split(back)
    L = F0.shape[0]
    rt = np.zeros_like(bpos)
    rt[:L] = HWb
    round_trip = float(np.sqrt(np.linalg.norm(bpos - rt) ** 2 + np.linalg.norm(bneg) ** 2))
    checks = [
        Check("theta_analytic", analytic, tol),
        Check("theta_inner", inner, tol),
        Check("theta_round_trip", round_trip, tol),
        Check("theta_at_zero", float(np.linalg.norm(theta.coeffs[0])), 0.0, passed=True),
    ]
    return ThetaExtraction(float(s), m, Mgrid, theta, Ma, F0g, HW, W,
                           analytic, inner, round_trip, smin, checks)


def projection_identity_check(G, E, W, U_mat, tol=DEFAULT_TOL):
    """[U_1^s .. U_m^s] = [H_U W_1 .. H_U W_m] [w_ij(0)]^t, U_i^s = P_E U_i."""
    m = G.m
    if W.shape[1] < m:
        raise NotApplicable(f"wandering dimension {W.shape[1]} < m = {m}")
    Us = project(E, U_mat)
    HW = G.gamma @ np.conj(W)
    W0 = W[:m, :]
    res = float(np.linalg.norm(Us - HW @ W0.T, 2))
    return Check("projection_identity", res, tol)


def _grid_cols(X, m, M):
    """Flat columns (any window) -> grid values of shape (M, m, k)."""
    return coeffs_to_grid(flat_to_blocks(X, m), 0, M)


def pull_back(ext, E):
    """G_k = F_0^{-1} F_k on the grid for the Schmidt basis columns F_k."""
    Fg = _grid_cols(E, ext.m, ext.grid_size)
    return np.linalg.solve(ext.F0_grid, Fg)


def _plus_mass(vals):
    """l2 mass of the nonnegative-index coefficients, per column (max)."""
    _, pos = grid_split(vals)
    return float(np.max(np.linalg.norm(pos, axis=(0, 1)))) if vals.shape[-1] else 0.0


def _theta_grid(ext):
    Mg = ext.grid_size
    z = np.exp(2j * np.pi * np.arange(Mg) / Mg)
    return z[:, None, None] * ext.M_grid


def model_membership(ext, Gg):
    """Residual of G in K_Theta~: analyticity of G and P_+(Theta~* G) = 0."""
    if Gg.shape[-1] == 0:
        return 0.0, 0.0
    neg, _ = grid_split(Gg)
    ana = float(np.max(np.linalg.norm(neg, axis=(0, 1))))
    Tg = _theta_grid(ext)
    orth = _plus_mass(np.einsum("tki,tkj->tij", Tg.conj(), Gg))
    return ana, orth


def action_rhs(ext, Gg, project_plus=True):
    """s F_0 (S* Theta~) conj(G) on the grid, optionally followed by P_+."""
    X = ext.s * np.einsum("tij,tjk,tkl->til", ext.F0_grid, ext.M_grid, np.conj(Gg))
    return analytic_grid(X) if project_plus else X


def _action_residual(ext, G, Fflat, Gg, project_plus=True):
    """max_k || H_U F_k - rhs(G_k) || over two-sided coefficients."""
    m = ext.m
    if Gg.shape[-1] == 0:
        return 0.0
    lhs = flat_to_blocks(G.gamma @ np.conj(Fflat), m)
    rhs = action_rhs(ext, Gg, project_plus)
    neg, pos = grid_split(rhs)
    L = lhs.shape[0]
    diff = pos.copy()
    diff[:L] -= lhs
    per = np.sqrt(np.linalg.norm(diff, axis=(0, 1)) ** 2 + np.linalg.norm(neg, axis=(0, 1)) ** 2)
    return float(per.max())


def model_space_basis(ext, n_probe, tol=1e-10):
    """Orthonormal basis (long flat coefficients) of K_Theta~ = H^2 minus Theta~ H^2.

    Built as the span of P_K(z^j e_i), j < n_probe, where
    P_K p = p - Theta~ P_+(Theta~* p).
    """
    return _k_theta_from_inner(ext.theta, ext.m, ext.grid_size, n_probe, tol)[0]


@dataclass
class ActionResult:
    action_residual: float
    model_membership_residual: float
    isometry_residual: float
    norm_decomposition_residual: float
    model_space_dim: int
    checks: list


def verify_action(G, E, ext, tol=DEFAULT_TOL):
    """Action formula over the pulled-back Schmidt basis and over an
    independently built basis of K_Theta~."""
    m = ext.m
    E = np.asarray(E)
    Gg = pull_back(ext, E)
    ana, orth = model_membership(ext, Gg)
    _, Gpos = grid_split(Gg)
    Gflat = blocks_to_flat(Gpos)
    gram = Gflat.conj().T @ Gflat
    iso = float(np.linalg.norm(gram - E.conj().T @ E, 2))
    norm_dec = float(np.max(np.abs(np.linalg.norm(E, axis=0) ** 2
                                   - np.linalg.norm(Gflat, axis=0) ** 2)))
    act = _action_residual(ext, G, E, Gg)
    # independent K_Theta~ basis from the complement of Theta~ H^2
    q = E.shape[1]
    K = model_space_basis(ext, q + 1)
    if K.shape[1] == q:
        match = max_angle(K, orthonormalize(Gflat))
        Kg = _grid_cols(K, m, ext.grid_size)
        FKg = np.einsum("tij,tjk->tik", ext.F0_grid, Kg)
        _, FKpos = grid_split(FKg)
        FK = blocks_to_flat(FKpos)
        Nw = E.shape[0]
        in_window = FK[:Nw]
        beyond = float(np.linalg.norm(FK[Nw:])) if FK.shape[0] > Nw else 0.0
        rep = max(outside_residual(E, in_window), beyond)
        act_K = _action_residual(ext, G, in_window, Kg)
    else:
        match = rep = act_K = np.pi / 2
    checks = [
        Check("model_membership", max(ana, orth), tol),
        Check("isometric_multiplier", iso, tol),
        Check("norm_decomposition", norm_dec, tol),
        Check("action_formula", act, tol),
        Check("model_space_dim", abs(K.shape[1] - q), 0, passed=K.shape[1] == q),
        Check("model_space_span", match, tol),
        Check("representation_F0_K", rep, tol),
        Check("action_formula_model_basis", act_K, tol),
    ]
    return ActionResult(act, max(ana, orth), iso, norm_dec, K.shape[1], checks)


def symmetry_checks(theta, ext=None, G=None, E=None, tol=DEFAULT_TOL, at_zero_tol=AT_ZERO_TOL):
    """(S*Theta~)(0) symmetric; if Theta~ is symmetric also the P_+-free
    action formula and S*Theta~ conj(G) in K_Theta~."""
    c = theta.coeffs
    at0 = c[1] if c.shape[0] > 1 else np.zeros(c.shape[1:])
    at0_res = float(np.linalg.norm(at0 - at0.T))
    full = float(np.linalg.norm(c - np.swapaxes(c, 1, 2)))
    checks = [Check("sstar_theta_symmetric_at_zero", at0_res, at_zero_tol)]
    symmetric = full <= tol
    if symmetric and ext is not None and E is not None:
        Gg = pull_back(ext, E)
        simple = _action_residual(ext, G, E, Gg, project_plus=False)
        X = np.einsum("tij,tjk->tik", ext.M_grid, np.conj(Gg))
        ana, orth = model_membership(ext, X)
        checks += [
            Check("action_formula_simplified", simple, tol),
            Check("sstar_theta_conj_in_model_space", max(ana, orth), tol),
        ]
    return at0_res, symmetric, checks


def _k_theta_from_inner(theta, m, Mg, n_probe, tol=1e-10):
    Tg = coeffs_to_grid(theta.coeffs, theta.n_neg, Mg)
    probes = np.zeros((n_probe, m, n_probe * m), dtype=complex)
    for j in range(n_probe):
        for i in range(m):
            probes[j, i, j * m + i] = 1.0
    Pg = coeffs_to_grid(probes, 0, Mg)
    inner = analytic_grid(np.einsum("tki,tkj->tij", Tg.conj(), Pg))
    Kg = Pg - np.einsum("tij,tjk->tik", Tg, inner)
    _, pos = grid_split(Kg)
    return orthonormalize(blocks_to_flat(pos), tol), Tg


def innerness_residual(theta, Mg=None):
    Mg = Mg or max(256, next_pow2(4 * theta.coeffs.shape[0]))
    Tg = coeffs_to_grid(theta.coeffs, theta.n_neg, Mg)
    r = theta.shape[1]
    gram = np.einsum("tki,tkj->tij", Tg.conj(), Tg) - np.eye(r)[None]
    return float(np.max(np.linalg.norm(gram, ord=2, axis=(1, 2))))


def lemma_ktheta_check(theta, tol=DEFAULT_TOL, max_probe=64, Mg=None):
    """S*(K_Theta cap (C^m)^perp) = K_Theta cap {S*(Theta e_i)}^perp."""
    m, r = theta.shape
    Mg = Mg or max(512, next_pow2(8 * theta.coeffs.shape[0]))
    inner = innerness_residual(theta, Mg)
    if inner > tol:
        raise NotInner(f"innerness residual {inner:.3e} exceeds {tol:.1e}")
    # grow the probe set until dim K_Theta stops changing
    n_probe, prev = 2, -1
    while True:
        K, Tg = _k_theta_from_inner(theta, m, Mg, n_probe)
        if K.shape[1] == prev or n_probe >= max_probe:
            break
        prev = K.shape[1]
        n_probe = min(2 * n_probe, max_probe)
    Z = K[:m, :]
    if K.shape[1]:
        _, sv, Vh = np.linalg.svd(Z, full_matrices=True)
        rank = int(np.sum(sv > 1e-9))
        lhs = orthonormalize(backshift_flat(K @ Vh.conj().T[:, rank:], m))
    else:
        lhs = K
    _, Tpos = grid_split(Tg)
    sstar = blocks_to_flat(Tpos[1:]) if Tpos.shape[0] > 1 else np.zeros((0, r))
    sstar = np.vstack([sstar, np.zeros((m, r))])
    rhs = orth_complement_within(K, sstar, 1e-9)
    if lhs.shape[1] != rhs.shape[1]:
        return Check("backshift_model_space_identity", np.pi / 2, tol, passed=False), K.shape[1]
    return Check("backshift_model_space_identity", max_angle(lhs, rhs) if lhs.shape[1] else 0.0, tol), K.shape[1]
