"""Symbol specification files: JSON in, MatrixSymbol out.

Accepted fields::

    {"m": 2, "kind": "poly", "blocks": [{"n": 1, "matrix": [[[1, 0], [0, 0]], ...]}]}

kinds: ``poly``, ``blaschke_matrix`` (scalar inner function times a constant
matrix), ``example-3.6A``, ``example-3.6B``, ``example-4.6``.  Scalar inner
functions are given by ``zeros`` (or ``phi_zeros`` / ``psi_zeros``) plus an
optional power of z (``monomial``, ``phi_monomial``, ``psi_monomial``);
``truncation`` is the degree at which Blaschke factors are cut.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SpecError
from .symbols import (example_36a, example_36b, example_46, inner_scalar, poly_symbol,
                      scalar_times_matrix)

KINDS = ("poly", "blaschke_matrix", "example-3.6A", "example-3.6B", "example-4.6")
DEFAULT_BLASCHKE_TRUNCATION = 24
DEFAULT_PHI_MONOMIAL = 2
DEFAULT_PSI_MONOMIAL = 3
_KNOWN = ("m", "kind", "blocks", "zeros", "phi_zeros", "psi_zeros", "truncation",
          "monomial", "phi_monomial", "psi_monomial")


@dataclass
class SymbolSpec:
    m: int | None
    kind: str
    blocks: list = field(default_factory=list)     # [(n, [[[re, im], ...], ...]), ...]
    zeros: list | None = None                      # [[re, im], ...]
    phi_zeros: list | None = None
    psi_zeros: list | None = None
    truncation: int | None = None
    monomial: int | None = None
    phi_monomial: int | None = None
    psi_monomial: int | None = None

    def to_dict(self):
        d = {"kind": self.kind}
        if self.m is not None:
            d["m"] = self.m
        if self.blocks:
            d["blocks"] = [{"n": n, "matrix": mat} for n, mat in self.blocks]
        for k in _KNOWN[3:]:
            v = getattr(self, k)
            if v is not None:
                d[k] = v
        return d


def _fail(msg):
    raise SpecError(msg)


def _int(v, name, lo=0):
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(f"{name} must be an integer, got {v!r}")
    if v < lo:
        _fail(f"{name} must be >= {lo}, got {v}")
    return v


def _number(v, name):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"{name} must be a number, got {v!r}")
    if not math.isfinite(v):
        _fail(f"{name} must be finite")
    return v


def _pair(v, name):
    if not isinstance(v, list) or len(v) != 2:
        _fail(f"{name} must be a [re, im] pair, got {v!r}")
    return [_number(v[0], name), _number(v[1], name)]


def _zeros(v, name):
    if v is None:
        return None
    if not isinstance(v, list):
        _fail(f"{name} must be a list of [re, im] pairs")
    out = [_pair(z, f"{name}[{i}]") for i, z in enumerate(v)]
    for i, (re, im) in enumerate(out):
        if math.hypot(re, im) >= 1:
            _fail(f"{name}[{i}] lies outside the open unit disk")
    return out


def _matrix(v, m, name):
    if not isinstance(v, list) or len(v) != m:
        _fail(f"{name} must have {m} rows")
    rows = []
    for i, row in enumerate(v):
        if not isinstance(row, list) or len(row) != m:
            _fail(f"{name}[{i}] must have {m} entries")
        rows.append([_pair(x, f"{name}[{i}][{j}]") for j, x in enumerate(row)])
    return rows


def spec_from_dict(d):
    if not isinstance(d, dict):
        _fail("spec must be a JSON object")
    unknown = sorted(set(d) - set(_KNOWN))
    if unknown:
        _fail(f"unknown field(s): {', '.join(unknown)}")
    kind = d.get("kind")
    if kind not in KINDS:
        _fail(f"kind must be one of {', '.join(KINDS)}, got {kind!r}")
    if "m" not in d:
        if kind.startswith("example-"):
            m = 2
        else:
            _fail("missing field m")
    else:
        m = _int(d["m"], "m", lo=1)
    if kind.startswith("example-") and m != 2:
        _fail(f"{kind} is a 2 x 2 symbol, got m = {m}")
    blocks = []
    raw = d.get("blocks", [])
    if not isinstance(raw, list):
        _fail("blocks must be a list")
    for i, b in enumerate(raw):
        if not isinstance(b, dict) or set(b) != {"n", "matrix"}:
            _fail(f"blocks[{i}] must be an object with keys n and matrix")
        blocks.append((_int(b["n"], f"blocks[{i}].n"), _matrix(b["matrix"], m, f"blocks[{i}].matrix")))
    if kind == "poly" and not blocks:
        _fail("poly spec needs at least one block")
    spec = SymbolSpec(
        m=m if "m" in d else None, kind=kind, blocks=blocks,
        zeros=_zeros(d.get("zeros"), "zeros"),
        phi_zeros=_zeros(d.get("phi_zeros"), "phi_zeros"),
        psi_zeros=_zeros(d.get("psi_zeros"), "psi_zeros"),
        truncation=None if d.get("truncation") is None else _int(d["truncation"], "truncation", lo=1),
    )
    for k in ("monomial", "phi_monomial", "psi_monomial"):
        if d.get(k) is not None:
            setattr(spec, k, _int(d[k], k))
    return spec


def _byte_offset(text, char_pos):
    return len(text[:char_pos].encode("utf-8"))


def loads(data):
    """Parse spec bytes (or str).  Malformed JSON raises SpecError with a byte offset."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SpecError(f"invalid UTF-8 at byte offset {exc.start}", offset=exc.start) from None
    else:
        text = data

    def bad_constant(c):
        raise ValueError(f"non-finite constant {c}")

    try:
        obj = json.loads(text, parse_constant=bad_constant)
    except json.JSONDecodeError as exc:
        off = _byte_offset(text, exc.pos)
        raise SpecError(f"malformed JSON at byte offset {off} (line {exc.lineno}, "
                        f"column {exc.colno}): {exc.msg}", offset=off) from None
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    return spec_from_dict(obj)


def load(path):
    with open(path, "rb") as fh:
        return loads(fh.read())


def dumps(spec):
    """Canonical JSON text; loads(dumps(spec)) == spec."""
    return json.dumps(spec.to_dict(), indent=1, sort_keys=True) + "\n"


def dump(spec, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(spec))


def _cplx(pairs):
    return [complex(re, im) for re, im in pairs]


def _inner(zeros, monomial, default_monomial, N):
    zeros = _cplx(zeros or [])
    if monomial is None:
        monomial = 0 if zeros else default_monomial
    return inner_scalar(zeros, monomial, N if zeros else None)


def build_symbol(spec):
    """MatrixSymbol described by ``spec`` (tail_bound set for Blaschke factors)."""
    trunc = spec.truncation or DEFAULT_BLASCHKE_TRUNCATION
    m = spec.m if spec.m is not None else 2
    if spec.kind == "poly":
        mats = [(n, np.array([[complex(*x) for x in row] for row in mat])) for n, mat in spec.blocks]
        return poly_symbol(m, mats, warn=False)
    if spec.kind == "blaschke_matrix":
        seq, tail = _inner(spec.zeros, spec.monomial, 0, trunc)
        C = np.eye(m)
        if len(spec.blocks) == 1 and spec.blocks[0][0] == 0:
            C = np.array([[complex(*x) for x in row] for row in spec.blocks[0][1]])
        elif spec.blocks:
            _fail("blaschke_matrix takes at most one n = 0 block (the constant matrix)")
        return scalar_times_matrix(seq, C, tail)
    phi_z = spec.phi_zeros if spec.phi_zeros is not None else spec.zeros
    phi_m = spec.phi_monomial if spec.phi_monomial is not None else spec.monomial
    phi, phi_tail = _inner(phi_z, phi_m, DEFAULT_PHI_MONOMIAL, trunc)
    if spec.kind == "example-3.6A":
        return example_36a(phi, phi_tail)
    if spec.kind == "example-3.6B":
        return example_36b(phi, phi_tail)
    psi, psi_tail = _inner(spec.psi_zeros, spec.psi_monomial, DEFAULT_PSI_MONOMIAL, trunc)
    return example_46(phi, psi, phi_tail, psi_tail)
