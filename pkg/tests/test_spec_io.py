import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hankel_schmidt.errors import SpecError
from hankel_schmidt.spec_io import build_symbol, dump, dumps, load, loads
from hankel_schmidt.symbols import blaschke_scalar, example_36a, example_46

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
pair = st.tuples(finite, finite).map(list)
disk = st.tuples(st.floats(-0.69, 0.69), st.floats(-0.69, 0.69)).map(list)


@st.composite
def poly_specs(draw):
    m = draw(st.integers(1, 3))
    nb = draw(st.integers(1, 3))
    blocks = [{"n": draw(st.integers(0, 6)),
               "matrix": [[draw(pair) for _ in range(m)] for _ in range(m)]} for _ in range(nb)]
    d = {"m": m, "kind": "poly", "blocks": blocks}
    if draw(st.booleans()):
        d["truncation"] = draw(st.integers(1, 40))
    return d


@st.composite
def inner_specs(draw):
    kind = draw(st.sampled_from(["blaschke_matrix", "example-3.6A", "example-3.6B", "example-4.6"]))
    d = {"kind": kind, "m": 2}
    key = "zeros" if kind != "example-4.6" else "phi_zeros"
    d[key] = draw(st.lists(disk, max_size=3))
    if kind == "example-4.6":
        d["psi_zeros"] = draw(st.lists(disk, max_size=2))
        d["psi_monomial"] = draw(st.integers(0, 3))
    d["truncation"] = draw(st.integers(2, 30))
    return d


@settings(max_examples=80, deadline=None)
@given(st.one_of(poly_specs(), inner_specs()))
def test_round_trip_is_bit_exact(d):
    spec = loads(json.dumps(d))
    text = dumps(spec)
    again = loads(text)
    assert again == spec
    assert dumps(again) == text
    # every float survives unchanged
    assert json.loads(text) == json.loads(json.dumps(spec.to_dict()))


def test_round_trip_through_file(tmp_path):
    d = {"m": 1, "kind": "poly", "blocks": [{"n": 2, "matrix": [[[0.1, -1e-300]]]}]}
    spec = loads(json.dumps(d))
    dump(spec, tmp_path / "s.json")
    assert load(tmp_path / "s.json") == spec
    assert spec.blocks[0][1][0][0] == [0.1, -1e-300]


def test_malformed_json_names_byte_offset():
    data = '{"m": 1,\n "kind": "poly", oops}'.encode()
    with pytest.raises(SpecError) as exc:
        loads(data)
    assert exc.value.offset == data.index(b"oops")
    assert f"byte offset {exc.value.offset}" in str(exc.value)


def test_byte_offset_counts_multibyte_characters():
    data = '{"kind": "é", }'.encode()
    with pytest.raises(SpecError) as exc:
        loads(data)
    assert exc.value.offset == data.index(b"}")


def test_invalid_utf8():
    with pytest.raises(SpecError) as exc:
        loads(b'{"m": \xff}')
    assert exc.value.offset == 6


@pytest.mark.parametrize("d, msg", [
    ({"kind": "poly", "blocks": []}, "missing field m"),
    ({"m": 1, "kind": "nope"}, "kind must be"),
    ({"m": 1, "kind": "poly", "blocks": []}, "at least one block"),
    ({"m": 2, "kind": "poly", "blocks": [{"n": 0, "matrix": [[[1, 0]]]}]}, "must have 2 rows"),
    ({"m": 1, "kind": "poly", "blocks": [{"n": -1, "matrix": [[[1, 0]]]}]}, ">= 0"),
    ({"m": 1, "kind": "poly", "blocks": [{"n": 0, "matrix": [[[1]]]}]}, "pair"),
    ({"m": 1, "kind": "blaschke_matrix", "zeros": [[1, 0]]}, "unit disk"),
    ({"m": 3, "kind": "example-3.6A"}, "2 x 2"),
    ({"m": 1, "kind": "poly", "blocks": [{"n": 0, "matrix": [[[1, 0]]]}], "extra": 1}, "unknown field"),
    ({"m": True, "kind": "poly"}, "integer"),
])
def test_validation_errors(d, msg):
    with pytest.raises(SpecError, match=msg):
        loads(json.dumps(d))


def test_non_finite_rejected():
    with pytest.raises(SpecError):
        loads('{"m": 1, "kind": "poly", "blocks": [{"n": 0, "matrix": [[[NaN, 0]]]}]}')


def test_build_poly():
    spec = loads(json.dumps({"m": 2, "kind": "poly", "blocks": [
        {"n": 1, "matrix": [[[1, 0], [1, 0]], [[1, 0], [1, 0]]]},
        {"n": 2, "matrix": [[[1, 0], [-1, 0]], [[-1, 0], [1, 0]]]}]}))
    U = build_symbol(spec)
    np.testing.assert_array_equal(U.coeffs, example_46([0, 1], [0, 0, 1]).coeffs)


def test_build_examples_defaults():
    U = build_symbol(loads('{"kind": "example-3.6A"}'))
    np.testing.assert_array_equal(U.coeffs, example_36a([0, 0, 1]).coeffs)
    U = build_symbol(loads('{"kind": "example-4.6", "phi_monomial": 1, "psi_monomial": 2}'))
    np.testing.assert_array_equal(U.coeffs, example_46([0, 1], [0, 0, 1]).coeffs)
    assert U.tail_bound == 0


def test_build_blaschke():
    U = build_symbol(loads('{"m": 1, "kind": "blaschke_matrix", "zeros": [[0.5, 0]], "truncation": 24}'))
    seq, tail = blaschke_scalar([0.5], 24)
    np.testing.assert_array_equal(U.coeffs[:, 0, 0], seq)
    assert U.tail_bound == tail
    U = build_symbol(loads('{"m": 2, "kind": "blaschke_matrix", "zeros": [[0.5, 0]], '
                           '"blocks": [{"n": 0, "matrix": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}]}'))
    np.testing.assert_array_equal(U.coeffs[:, 0, 1], seq)
    assert U.coeffs[0, 0, 0] == 0
