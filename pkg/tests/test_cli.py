import csv
import json

import pytest

from hankel_schmidt import __version__
from hankel_schmidt.cli import main

ZN = {"m": 1, "kind": "poly", "blocks": [{"n": 3, "matrix": [[[1, 0]]]}]}
E46 = {"kind": "example-4.6", "phi_monomial": 1, "psi_monomial": 2}
DIAG_Z_0 = {"m": 2, "kind": "poly", "blocks": [{"n": 1, "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}]}
NONSYM = {"m": 2, "kind": "poly", "blocks": [{"n": 1, "matrix": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}]}
CLOSE = {"m": 2, "kind": "poly", "blocks": [{"n": 0, "matrix": [[[1, 0], [0, 0]], [[0, 0], [1.00000002, 0]]]}]}


@pytest.fixture
def spec(tmp_path):
    def write(d, name="spec.json"):
        p = tmp_path / name
        p.write_text(json.dumps(d) if isinstance(d, dict) else d)
        return str(p)
    return write


def test_schmidt_z_cubed(spec, tmp_path):
    out = tmp_path / "o"
    assert main(["schmidt", "--spec", spec(ZN), "--truncation", "7", "--out", str(out)]) == 0
    rows = list(csv.reader(open(out / "singular_values.csv")))
    assert rows == [["s", "multiplicity"], ["1.0", "4"]]
    rep = json.loads((out / "schmidt.json").read_text())
    assert rep["clusters"] == [{"s": 1.0, "multiplicity": 4, "cluster_residual": 0.0}]
    assert rep["library_version"] == __version__
    assert rep["config"]["truncation"] == 7 and rep["tail_bound"] == 0.0
    assert set(rep["tolerances"]) >= {"cluster_tol", "rank_tol", "subspace_tol"}


def test_schmidt_example_36a(spec, tmp_path):
    out = tmp_path / "o"
    assert main(["schmidt", "--spec", spec({"kind": "example-3.6A", "phi_zeros": [], "phi_monomial": 2}),
                 "--out", str(out)]) == 0
    rep = json.loads((out / "schmidt.json").read_text())
    assert [(c["s"], c["multiplicity"]) for c in rep["clusters"]] == [(1.0, 6)]


def test_malformed_spec_exit_2(spec, tmp_path, capsys):
    assert main(["schmidt", "--spec", spec('{"m": 1,, }'), "--out", str(tmp_path)]) == 2
    assert "byte offset 8" in capsys.readouterr().err


def test_missing_spec_file_exit_2(tmp_path):
    assert main(["schmidt", "--spec", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2


def test_truncation_below_degree_exit_2(spec, tmp_path):
    assert main(["schmidt", "--spec", spec(ZN), "--truncation", "2", "--out", str(tmp_path)]) == 2


def test_ambiguous_clustering_exit_3(spec, tmp_path):
    assert main(["schmidt", "--spec", spec(CLOSE), "--out", str(tmp_path)]) == 3
    assert main(["schmidt", "--spec", spec(CLOSE), "--cluster-tol", "1e-11",
                 "--out", str(tmp_path)]) == 0


def test_verify_example_46_all(spec, tmp_path):
    out = tmp_path / "o"
    assert main(["verify", "--spec", spec(E46), "--which", "all", "--out", str(out)]) == 0
    rep = json.loads((out / "verify.json").read_text())
    assert rep["status"] == "pass"
    [cl] = rep["clusters"]
    assert cl["r"] == 2 and cl["p"] == 0
    names = [c["name"] for c in cl["checks"]]
    assert names == sorted(names)
    assert all(c["pass"] for c in cl["checks"])
    assert cl["theta_tilde"][1][0][0] == [pytest.approx(x, abs=1e-12) for x in cl["theta_tilde"][1][0][0]]


def test_verify_non_symmetric_exit_2(spec, tmp_path):
    assert main(["verify", "--spec", spec(NONSYM), "--which", "near", "--out", str(tmp_path)]) == 2


def test_verify_not_applicable_exit_5(spec, tmp_path):
    assert main(["verify", "--spec", spec(DIAG_Z_0), "--which", "action", "--out", str(tmp_path)]) == 5


def test_verify_failure_exit_4(spec, tmp_path):
    # an absurdly small subspace tolerance makes grid-based residuals fail
    assert main(["verify", "--spec", spec(E46), "--subspace-tol", "1e-30",
                 "--out", str(tmp_path)]) == 4


def test_verify_unknown_which_exit_2(spec, tmp_path):
    assert main(["verify", "--spec", spec(E46), "--which", "bogus", "--out", str(tmp_path)]) == 2


def test_verify_output_is_deterministic(spec, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    p = spec(E46)
    main(["verify", "--spec", p, "--out", str(a)])
    main(["verify", "--spec", p, "--out", str(b)])
    assert (a / "verify.json").read_bytes() == (b / "verify.json").read_bytes()


@pytest.mark.parametrize("ex", ["3.6A", "3.6B", "4.6", "scalar-zn"])
def test_reproduce(ex, tmp_path, capsys):
    assert main(["reproduce", ex, "--out", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "all facts match" in text
    rep = json.loads((tmp_path / "reproduce.json").read_text())
    assert all(f["match"] for f in rep["facts"])


def test_reproduce_example_flag_and_override(spec, tmp_path, capsys):
    p = spec({"m": 1, "kind": "poly", "blocks": [{"n": 5, "matrix": [[[1, 0]]]}]})
    assert main(["reproduce", "--example", "scalar-zn", "--spec", p]) == 0
    assert "multiplicity                  6" in capsys.readouterr().out


def test_reproduce_bad_inputs(spec):
    assert main(["reproduce", "9.9"]) == 2
    assert main(["reproduce"]) == 2
    assert main(["reproduce", "4.6", "--spec", spec(ZN)]) == 2
