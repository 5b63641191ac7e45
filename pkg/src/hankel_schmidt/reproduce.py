"""Named example symbols: expected structural facts against observed ones."""

from dataclasses import dataclass

import numpy as np

from .errors import SpecError
from .pipeline import Tolerances, analyze
from .spec_io import SymbolSpec, build_symbol
from .spectral import max_angle, orthonormalize, schmidt_subspaces
from .hankel_ops import build_gamma
from .symbols import MatrixSymbol

EXAMPLES = ("3.6A", "3.6B", "4.6", "scalar-zn")
DEFAULT_ZN = 3
_KIND = {"3.6A": "example-3.6A", "3.6B": "example-3.6B", "4.6": "example-4.6"}


@dataclass
class Fact:
    name: str
    expected: str
    observed: str
    match: bool

    def to_dict(self):
        return {"name": self.name, "expected": self.expected,
                "observed": self.observed, "match": bool(self.match)}


def default_spec(example):
    if example == "scalar-zn":
        one = [[[1.0, 0.0]]]
        return SymbolSpec(m=1, kind="poly", blocks=[(DEFAULT_ZN, one)])
    return SymbolSpec(m=2, kind=_KIND[example])


def _check_kind(example, spec):
    if example == "scalar-zn":
        if spec.kind != "poly" or spec.m != 1 or len(spec.blocks) != 1:
            raise SpecError("scalar-zn needs a poly spec with m = 1 and a single block")
        (n, mat), = spec.blocks
        if mat != [[[1.0, 0.0]]] and mat != [[[1, 0]]]:
            raise SpecError("scalar-zn needs the single block to be the monomial 1 * z^n")
    elif spec.kind != _KIND[example]:
        raise SpecError(f"example {example} needs kind {_KIND[example]}, got {spec.kind}")


def _scalar_seq(U, i, j):
    return U.coeffs[:, i, j]


def _scalar_spaces(seq, tail, N):
    u = MatrixSymbol(np.asarray(seq)[:, None, None], tail)
    return schmidt_subspaces(build_gamma(u, N))


def _embed(basis, comp, m=2):
    """Scalar flat basis into component ``comp`` of C^m-valued flat space."""
    out = np.zeros((basis.shape[0] * m, basis.shape[1]), dtype=complex)
    out[comp::m] = basis
    return out


def _block_space(parts, s, tol):
    """Direct sum over (scalar cluster list, component) of the clusters at s."""
    cols = []
    for spaces, comp in parts:
        for c in spaces:
            if abs(c.s - s) <= tol:
                cols.append(_embed(c.basis, comp))
    if not cols:
        return None
    return orthonormalize(np.hstack(cols))


def _fmt(x):
    return f"{x:.3e}" if isinstance(x, float) else str(x)


def _common_facts(res):
    facts = []
    checks = res.all_checks()
    bad = sorted(c.name for c in checks if c.passed is not True)
    facts.append(Fact("all verification checks pass", "pass",
                      "pass" if not bad else "fail: " + ", ".join(bad), not bad))
    return facts


def _block_facts(res, U, N, example, angle_tol):
    facts = []
    tail = U.tail_bound
    if example in ("3.6A", "3.6B"):
        phi = _scalar_seq(U, 0, 0) if example == "3.6A" else _scalar_seq(U, 0, 1)
        sp = _scalar_spaces(phi, tail, N)
        parts = [(sp, 0), (sp, 1)]
        label = "E = E_scalar + E_scalar"
    else:
        # U = Q diag(2 phi, 2 psi) Q with Q = [[1, 1], [1, -1]] / sqrt 2
        theta, gamma = _scalar_seq(U, 0, 0), _scalar_seq(U, 0, 1)
        a, b = theta + gamma, theta - gamma
        parts = [(_scalar_spaces(a, tail, N), 0), (_scalar_spaces(b, tail, N), 1)]
        label = "E = Q(E_2phi + E_2psi)"
    Q = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    for cl in res.clusters:
        tag = f"s={cl.s:.10g}"
        facts.append(Fact(f"{tag}: dim W", "2", str(cl.r), cl.r == 2))
        if example == "3.6B":
            facts.append(Fact(f"{tag}: defect p", "<= 2", str(cl.p), cl.p <= 2))
        else:
            facts.append(Fact(f"{tag}: defect p", "0", str(cl.p), cl.p == 0))
        ref = _block_space(parts, cl.s, max(1e-8 * res.clusters[0].s, 2 * tail))
        if ref is not None and example == "4.6":
            L = ref.shape[0] // 2
            ref = np.kron(np.eye(L), Q) @ ref
        if ref is None or ref.shape[1] != cl.multiplicity:
            obs = "dimension mismatch" if ref is not None else "no matching scalar cluster"
            facts.append(Fact(f"{tag}: {label}", f"angle <= {angle_tol:.0e}", obs, False))
        else:
            ang = max_angle(cl.basis, ref)
            facts.append(Fact(f"{tag}: {label}", f"angle <= {angle_tol:.0e}", _fmt(ang),
                              ang <= angle_tol))
    return facts


def _zn_facts(res, U, angle_tol):
    n = U.degree
    facts = [Fact("number of Schmidt values", "1", str(len(res.clusters)), len(res.clusters) == 1)]
    if len(res.clusters) != 1:
        return facts
    cl = res.clusters[0]
    facts.append(Fact("s", "1", f"{cl.s:.15g}", abs(cl.s - 1) <= angle_tol))
    facts.append(Fact("multiplicity", str(n + 1), str(cl.multiplicity), cl.multiplicity == n + 1))
    ref = np.eye(res.N + 1)[:, :n + 1]
    ang = max_angle(cl.basis, ref) if cl.multiplicity == n + 1 else np.pi / 2
    facts.append(Fact(f"E = span(1..z^{n})", f"angle <= {angle_tol:.0e}", _fmt(ang), ang <= angle_tol))
    facts.append(Fact("defect p", "0", str(cl.p), cl.p == 0))
    if cl.theta is not None:
        th = cl.theta[:, 0, 0]
        res_t = theta_monomial_residual(th, n + 1)
        facts.append(Fact(f"Theta~ = c z^{n + 1}, |c| = 1", f"<= {angle_tol:.0e}", _fmt(res_t),
                          res_t <= angle_tol))
    else:
        facts.append(Fact(f"Theta~ = c z^{n + 1}, |c| = 1", "extracted", "missing", False))
    if cl.scalar:
        h = np.array([complex(*x) for x in cl.scalar["h"]])
        res_h = theta_monomial_residual(h, 0)
        facts.append(Fact("h = c, |c| = 1", f"<= {angle_tol:.0e}", _fmt(res_h), res_h <= angle_tol))
    return facts


def theta_monomial_residual(coeffs, k):
    """Distance of a scalar coefficient sequence from c z^k with |c| = 1."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.size <= k:
        return float("inf")
    others = np.delete(coeffs, k)
    return float(max(abs(abs(coeffs[k]) - 1.0), np.max(np.abs(others)) if others.size else 0.0))


def reproduce(example, spec=None, N=None, tol=Tolerances(), min_grid=256):
    """Run the full suite on a named example; returns (facts, analysis, symbol)."""
    if example not in EXAMPLES:
        raise SpecError(f"unknown example {example!r}; choose from {', '.join(EXAMPLES)}")
    spec = default_spec(example) if spec is None else spec
    _check_kind(example, spec)
    U = build_symbol(spec)
    res = analyze(U, N, tol, "all", min_grid=min_grid)
    angle_tol = max(1e-10, 10 * U.tail_bound)
    if example == "scalar-zn":
        facts = _zn_facts(res, U, angle_tol)
    else:
        facts = _block_facts(res, U, res.N, example, angle_tol)
    facts += _common_facts(res)
    return facts, res, U


def format_table(facts):
    rows = [("fact", "expected", "observed", "match")]
    rows += [(f.name, f.expected, f.observed, "yes" if f.match else "NO") for f in facts]
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)
