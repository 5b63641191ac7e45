"""End-to-end analysis of a symbol: Schmidt subspaces plus every structural check.

Checks are grouped in sections so that callers can ask for a subset:

=========  ==========================================================
prop22     anti-symmetry of <H F, G>, intertwining, three-way K_U, grid path
rankm      K^2 = H^2 - sum <., U_i> U_i
lemma24    E_H and E_K share their part orthogonal to the U_i
near       near invariance with defect p <= m
full       the dim W = m case: p = 0, E_K orthogonal to U, W(0) invertible
scalar     m = 1: E = h K with K backward-shift invariant, Beurling data
action     extraction of Theta~ and the action formula
lemmas4    the two model-space lemmas
=========  ==========================================================
"""

from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .action_verify import (extract_theta_tilde, lemma_ktheta_check,
                            projection_identity_check, symmetry_checks,
                            verify_action)
from .errors import GridSingularity, NotApplicable, NotInner
from .hankel_ops import (apply_H, apply_H_grid, build_gamma, build_gamma_shifted,
                         columns_matrix, k_realizations, opnorm,
                         rank_m_identity_residual)
from .fourier_core import FourierVec
from .spectral import (default_s_floor, eigenspace_at, numerical_rank, outside_residual,
                       schmidt_subspaces)
from .structure_verify import (Check, beurling_extract, full_wandering_check,
                               inconclusive, lemma_24_check, near_invariance_report,
                               scalar_structure)
from .symbols import symbol_columns

SECTIONS = ("prop22", "rankm", "lemma24", "near", "full", "scalar", "action", "lemmas4")
_PER_CLUSTER = ("lemma24", "near", "full", "scalar", "action", "lemmas4")
_LEMMAS4 = ("sstar_theta_conj_in_model_space", "backshift_model_space_identity")


@dataclass(frozen=True)
class Tolerances:
    cluster_tol: float = 1e-8
    rank_tol: float = 1e-10
    subspace_tol: float = 1e-9
    identity_tol: float = 1e-11
    at_zero_tol: float = 1e-10
    invariance_tol: float = 1e-10

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not v > 0:
                raise ValueError(f"{k} must be positive, got {v}")

    def widened(self, tail_bound):
        """Structural tolerances raised to 10 * tail_bound for truncated symbols."""
        w = 10.0 * tail_bound
        return replace(self,
                       subspace_tol=max(self.subspace_tol, w),
                       at_zero_tol=max(self.at_zero_tol, w),
                       invariance_tol=max(self.invariance_tol, w))

    def to_dict(self):
        return asdict(self)


@dataclass
class ClusterResult:
    s: float
    multiplicity: int
    cluster_residual: float
    gap: float = float("inf")
    dim_EK: int = 0
    r: int | None = None
    p: int | None = None
    sections: dict = field(default_factory=dict)        # name -> list[Check]
    not_applicable: dict = field(default_factory=dict)  # name -> reason
    basis: np.ndarray | None = None
    wandering: np.ndarray | None = None
    theta: np.ndarray | None = None
    action: dict = field(default_factory=dict)
    scalar: dict = field(default_factory=dict)

    def checks(self):
        out = [c for cs in self.sections.values() for c in cs]
        return sorted(out, key=lambda c: c.name)

    def to_dict(self, with_theta=True):
        d = {"s": self.s, "multiplicity": self.multiplicity,
             "cluster_residual": self.cluster_residual, "gap": self.gap,
             "dim_E": self.multiplicity,
             "dim_EK": self.dim_EK, "r": self.r, "p": self.p,
             "checks": [c.to_dict() for c in self.checks()],
             "not_applicable": dict(sorted(self.not_applicable.items()))}
        if self.action:
            d["action"] = dict(sorted(self.action.items()))
        if self.scalar:
            d["scalar"] = dict(sorted(self.scalar.items()))
        if with_theta and self.theta is not None:
            d["theta_tilde"] = complex_array(self.theta)
        return d


@dataclass
class Analysis:
    N: int
    m: int
    tail_bound: float
    tolerances: Tolerances
    which: tuple
    clusters: list
    global_checks: dict              # section -> list[Check]
    gamma_rank: int

    def all_checks_global(self):
        return [c for cs in self.global_checks.values() for c in cs]

    def all_checks(self):
        out = self.all_checks_global()
        for cl in self.clusters:
            out += cl.checks()
        return out

    def status(self):
        """"pass", "fail" or "not_applicable" (nothing ran, something was refused)."""
        checks = self.all_checks()
        if any(c.passed is not True for c in checks):
            return "fail"
        if checks:
            return "pass"
        if any(cl.not_applicable for cl in self.clusters):
            return "not_applicable"
        return "pass"


def complex_array(a):
    """Nested [re, im] lists for a complex array."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [complex_array(x) for x in a]


def parse_which(which):
    if which is None or which == "all":
        return SECTIONS
    if isinstance(which, str):
        which = [w.strip() for w in which.split(",") if w.strip()]
    out = []
    for w in which:
        if w == "all":
            return SECTIONS
        if w not in SECTIONS:
            raise ValueError(f"unknown check group {w!r}; choose from all, {', '.join(SECTIONS)}")
        if w not in out:
            out.append(w)
    return tuple(w for w in SECTIONS if w in out)


def default_truncation(U):
    return U.degree + 4


def identity_checks(U, G, Gp, tol):
    """Operator-norm residuals of the algebraic identities (prop22, rankm)."""
    n = G.size
    gamma = G.gamma
    antisym = opnorm(gamma - gamma.T)
    cols = [np.empty((n, n), dtype=complex) for _ in range(3)]
    grid_err = 0.0
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        f = FourierVec.from_flat(e, G.m)
        for c, g in zip(cols, k_realizations(G, Gp, f)):
            c[:, k] = g.to_flat(G.N)
        grid = apply_H_grid(U, f, G.N)
        grid_err = max(grid_err, (grid - apply_H(G, f)).norm())
    a, b, c = cols
    return {
        "prop22": [
            Check("h_antisymmetry", antisym, tol.identity_tol),
            Check("h_intertwining", opnorm(a - b), tol.identity_tol),
            Check("k_three_way", max(opnorm(a - b), opnorm(a - c), opnorm(b - c)),
                  tol.identity_tol),
            Check("apply_h_grid_path", grid_err, tol.identity_tol),
        ],
        "rankm": [Check("rank_m_identity",
                        rank_m_identity_residual(G, Gp, symbol_columns(U)),
                        tol.identity_tol)],
    }


def cluster_gap(sv, s, tol):
    """Distance from s to the nearest singular value outside its cluster."""
    other = np.abs(np.asarray(sv) - s)
    other = other[other > tol]
    return float(other.min()) if other.size else float("inf")


def _scalar_section(cl, E, N, tol, min_grid):
    try:
        ss = scalar_structure(E, N, tol.subspace_tol, min_grid=min_grid)
    except (GridSingularity, NotApplicable) as exc:
        return [inconclusive("scalar_structure", np.inf, tol.subspace_tol)], str(exc)
    checks = list(ss.checks)
    b = beurling_extract(ss.Eprime, 1, tol=tol.subspace_tol)
    checks += [Check("beurling_inner", b.innerness_residual, tol.subspace_tol),
               Check("beurling_containment", b.containment_residual, tol.subspace_tol)]
    cl.scalar = {"case": ss.case, "depth": ss.depth, "h": complex_array(ss.h),
                 "dim_Eprime": int(ss.Eprime.shape[1]), "grid_size": ss.grid_size}
    return checks, None


def _action_sections(cl, G, E, fw, U_mat, tol, min_grid, want):
    ext = extract_theta_tilde(G, cl.s, fw.W, tol.subspace_tol, min_grid=min_grid)
    cl.theta = ext.theta.coeffs
    action, lemmas = [], []
    action += ext.checks
    action.append(projection_identity_check(G, E, fw.W, U_mat, tol.subspace_tol))
    ar = verify_action(G, E, ext, tol.subspace_tol)
    action += ar.checks
    at0, sym, sc = symmetry_checks(ext.theta, ext, G, E, tol.subspace_tol,
                                   at_zero_tol=tol.at_zero_tol)
    for c in sc:
        (lemmas if c.name in _LEMMAS4 else action).append(c)
    if "lemmas4" in want:
        try:
            lemmas.append(lemma_ktheta_check(ext.theta, tol.subspace_tol, Mg=ext.grid_size)[0])
        except NotInner as exc:
            lemmas.append(inconclusive("backshift_model_space_identity", np.inf, tol.subspace_tol))
            cl.not_applicable["lemmas4"] = str(exc)
    cl.action = {
        "grid_size": ext.grid_size,
        "innerness_residual": ext.innerness_residual,
        "analyticity_residual": ext.analyticity_residual,
        "round_trip_residual": ext.round_trip_residual,
        "action_residual": ar.action_residual,
        "model_membership_residual": ar.model_membership_residual,
        "model_space_dim": ar.model_space_dim,
        "symmetry_at_zero_residual": at0,
        "full_symmetry": bool(sym),
        "f0_min_singular_value": ext.min_singular_value,
    }
    return action, lemmas


def _cluster(U, G, Gp, U_mat, c, s_max, tol, want, min_grid):
    cl = ClusterResult(c.s, c.multiplicity, c.cluster_residual, basis=c.basis)
    E = c.basis
    k_tol = max(tol.cluster_tol * s_max, 2.0 * U.tail_bound)
    EK = eigenspace_at(Gp, c.s, k_tol)
    cl.dim_EK = EK.shape[1]
    st = tol.subspace_tol
    if "lemma24" in want:
        cl.sections["lemma24"] = [lemma_24_check(E, EK, U_mat, st, s=c.s)[0]]
    rep = near_invariance_report(E, EK, U_mat, U.m, c.s, st)
    cl.r, cl.p = rep.r, rep.p
    cl.wandering = rep.wandering_basis
    if "near" in want:
        HE = G.gamma @ np.conj(E)
        cl.sections["near"] = rep.checks + [
            Check("e_invariant_under_h", outside_residual(E, HE), tol.invariance_tol)]
    if "scalar" in want:
        if U.m == 1:
            checks, reason = _scalar_section(cl, E, G.N, tol, min_grid)
            cl.sections["scalar"] = checks
            if reason:
                cl.not_applicable["scalar"] = reason
        else:
            cl.not_applicable["scalar"] = f"m = {U.m} > 1"
    need_full = {"full", "action", "lemmas4"} & set(want)
    if not need_full:
        return cl
    try:
        fw = full_wandering_check(E, EK, U_mat, U.m, c.s, st)
    except NotApplicable as exc:
        for w in sorted(need_full):
            cl.not_applicable[w] = str(exc)
        return cl
    if "full" in want:
        cl.sections["full"] = fw.report.checks[len(rep.checks):]
    if not {"action", "lemmas4"} & set(want):
        return cl
    if fw.report.check("f0_at_zero_invertible").passed is not True:
        for w in ("action", "lemmas4"):
            if w in want:
                cl.sections[w] = [inconclusive("f0_at_zero_invertible", fw.condition, 1e8)]
        return cl
    try:
        action, lemmas = _action_sections(cl, G, E, fw, U_mat, tol, min_grid, want)
    except GridSingularity as exc:
        for w in ("action", "lemmas4"):
            if w in want:
                cl.sections[w] = [inconclusive("f0_grid_invertible", np.inf, 1e-8)]
                cl.not_applicable[w] = str(exc)
        return cl
    if "action" in want:
        cl.sections["action"] = action
    if "lemmas4" in want:
        cl.sections["lemmas4"] = lemmas
    return cl


def schmidt_only(U, N=None, tol=Tolerances()):
    """Clusters without any verification (the ``schmidt`` command)."""
    N = default_truncation(U) if N is None else N
    G = build_gamma(U, N)
    return schmidt_subspaces(G, tol.cluster_tol, default_s_floor(U.tail_bound)), G


def analyze(U, N=None, tol=Tolerances(), which="all", min_grid=256):
    """Run the selected check groups on every Schmidt cluster of U.

    Raises NotSymmetric for a non-symmetric symbol and AmbiguousClustering
    when clusters cannot be separated.
    """
    want = parse_which(which)
    N = default_truncation(U) if N is None else N
    if U.tail_bound > 0:
        tol = tol.widened(U.tail_bound)
    G = build_gamma(U, N)
    Gp = build_gamma_shifted(U, N)
    U_mat = columns_matrix(symbol_columns(U), N)
    clusters = schmidt_subspaces(G, tol.cluster_tol, default_s_floor(U.tail_bound))
    global_checks = {}
    if {"prop22", "rankm"} & set(want):
        ids = identity_checks(U, G, Gp, tol)
        global_checks = {k: v for k, v in ids.items() if k in want}
    out = []
    if set(want) & set(_PER_CLUSTER):
        s_max = clusters[0].s if clusters else 0.0
        for c in clusters:
            out.append(_cluster(U, G, Gp, U_mat, c, s_max, tol, want, min_grid))
    else:
        out = [ClusterResult(c.s, c.multiplicity, c.cluster_residual, basis=c.basis)
               for c in clusters]
    sv = np.linalg.svd(G.gamma, compute_uv=False)
    for cl in out:
        cl.gap = cluster_gap(sv, cl.s, tol.cluster_tol * sv[0])
    rank = numerical_rank(G.gamma, tol.rank_tol)
    return Analysis(N, U.m, U.tail_bound, tol, want, out, global_checks, rank)
