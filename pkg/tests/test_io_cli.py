import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wordmaps import io
from wordmaps.cli import main
from wordmaps.errors import ParseError, ValidationError
from wordmaps.field import field_make
from wordmaps.linalg import MatrixFq, random_invertible
from wordmaps.words import random_word

from conftest import SMALL_FIELDS


def write(path, obj):
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


@pytest.fixture
def files(tmp_path):
    F = field_make(2)
    rng = np.random.default_rng(0)
    c1 = random_invertible(F, 4, rng)
    while c1.is_scalar():
        c1 = random_invertible(F, 4, rng)
    h1, h2 = random_invertible(F, 4, rng), random_invertible(F, 4, rng)
    consts = {"field": {"p": 2, "e": 1}, "n": 4, "constants": {"c1": io.matrix_rows(c1)}}
    return {
        "word": write(tmp_path / "w.txt", "x1*c1*x2"),
        "consts": write(tmp_path / "c.json", consts),
        "ident": write(tmp_path / "i.json", {"field": {"p": 2}, "n": 3, "matrix": np.eye(3, dtype=int).tolist()}),
        "tuple": write(tmp_path / "t.json", {"field": {"p": 2}, "n": 4, "tuple": [io.matrix_rows(h1), io.matrix_rows(h2)]}),
        "tuple3": write(tmp_path / "t3.json", {"field": {"p": 3}, "n": 4, "tuple": [np.eye(4, dtype=int).tolist()] * 2}),
        "vectors": write(tmp_path / "v.json", {"field": {"p": 2}, "n": 4, "sources": [[1, 0, 0, 0]], "targets": [[0, 1, 0, 0]]}),
        "strong": write(tmp_path / "s.txt", "x1*x2"),
        "x6": write(tmp_path / "x6.txt", "x1*x1*x1*x1*x1*x1"),
        "mats": (c1, h1, h2),
        "dir": tmp_path,
    }


# -- DSL and schemas -------------------------------------------------------------


def test_parse_word_basic(F2):
    c = MatrixFq.from_rows(F2, [[1, 1], [0, 1]])
    w = io.parse_word("c*x1*c*x2^-1", F2, 2, {"c": c})
    assert w.l == 2 and w.r == 2
    assert w.constants[0] == c and w.constants[1] == c and w.constants[2].is_identity()
    # adjacent constants multiply
    w = io.parse_word("x1*c*c", F2, 2, {"c": c})
    assert w.constants[1] == c @ c


def test_parse_word_errors(F2):
    with pytest.raises(ParseError):
        io.parse_word("", F2, 2)
    with pytest.raises(ParseError):
        io.parse_word("x1**x2", F2, 2)
    with pytest.raises(ParseError):
        io.parse_word("x1*", F2, 2)
    with pytest.raises(ParseError):
        io.parse_word("x0", F2, 2)
    with pytest.raises(ParseError):
        io.parse_word("x1 $ x2", F2, 2)
    with pytest.raises(ValidationError):
        io.parse_word("x1*d", F2, 2)


def test_schema_errors(tmp_path):
    with pytest.raises(ParseError):
        io.load_json(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        io.load_json(bad)
    with pytest.raises(ParseError):
        io.matrix_from_json({"n": 2, "matrix": [[1]]})
    with pytest.raises(ValidationError):
        io.matrix_from_json({"field": {"p": 2}, "n": 2, "matrix": [[1, 0, 0]]})
    with pytest.raises(ParseError):
        io.constants_from_json({"field": {"p": 2}, "n": 2, "constants": {"x1": [[1, 0], [0, 1]]}})


@given(st.sampled_from(SMALL_FIELDS), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_matrix_and_word_roundtrip(pe, n, seed):
    F = field_make(*pe)
    rng = np.random.default_rng(seed)
    m = random_invertible(F, n, rng)
    assert io.matrix_from_json(json.loads(io.dumps(io.matrix_to_json(m)))) == m
    w = random_word(F, n, int(rng.integers(0, 5)), 2, rng, boundary=True)
    back = io.word_from_json(json.loads(io.dumps(io.word_to_json(w))))
    assert back.letters == w.letters and back.constants == w.constants


# -- CLI ----------------------------------------------------------------------------


def test_norm_identity(capsys, files):
    code, out = cli(capsys, "norm", "--matrix", files["ident"])
    assert code == 0 and out == {"projective_norm": 0}


def test_eval_and_mismatch(capsys, files):
    code, out = cli(capsys, "eval", "--word", files["word"], "--constants", files["consts"], "--tuple", files["tuple"])
    assert code == 0
    c1, h1, h2 = files["mats"]
    got = io.matrix_from_json(out["matrix"])
    assert got == h1 @ c1 @ h2
    code, out = cli(capsys, "eval", "--word", files["word"], "--constants", files["consts"], "--tuple", files["tuple3"])
    assert code == 1 and out["error"] == "validation_error"


def test_classify_reduce_crit(capsys, files):
    code, out = cli(capsys, "classify", "--word", files["word"], "--constants", files["consts"])
    assert code == 0 and out["J0"] == [1] and out["content"] == "x1*x2" and not out["singular"]
    code, out = cli(capsys, "reduce", "--word", files["word"], "--constants", files["consts"])
    assert code == 0 and out["reduced"]
    code, out = cli(capsys, "crit-length", "--word", files["strong"], "--n", "4", "--p", "2")
    assert code == 0 and out["critical_length"] == 4


def test_witness_command(capsys, files):
    args = ["witness", "--word", files["strong"], "--n", "4", "--p", "2", "--vectors", files["vectors"], "--seed", "3"]
    code, out = cli(capsys, *args)
    assert code == 0 and out["verified"] is True
    h = [io.matrix_from_json(m) for m in out["h"]]
    assert np.array_equal((h[0] @ h[1]).apply([1, 0, 0, 0]), [0, 1, 0, 0])


def test_seed_is_mandatory(capsys, files):
    code = main(["witness", "--word", files["strong"], "--n", "4", "--p", "2", "--vectors", files["vectors"]])
    capsys.readouterr()
    assert code == 2


def test_usage_errors(capsys, files):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    assert main(["norm"]) == 2
    with pytest.raises(SystemExit):
        main(["aq-demo", "--levels", "3..1"])
    capsys.readouterr()


def test_domain_error_json(capsys, files, tmp_path):
    sing = write(tmp_path / "sing.json", {"field": {"p": 2}, "n": 2, "matrix": [[1, 1], [1, 1]]})
    code, out = cli(capsys, "norm", "--matrix", sing)
    assert code == 1 and out["error"] == "not_invertible"
    code, out = cli(capsys, "norm", "--matrix", str(tmp_path / "nope.json"))
    assert code == 1 and out["error"] == "parse_error"


def test_identity_commands(capsys, files):
    code, out = cli(capsys, "check-identity", "--group", "gl", "--n", "2", "--p", "2", "--word", files["x6"])
    assert code == 0 and out["identity"] is True and out["singular"] is False
    code, out = cli(capsys, "search-identity", "--group", "gl", "--n", "2", "--p", "2", "--max-length", "4")
    assert code == 0 and out["minimal_length"] == 4 and "wall_time" not in out
    code, out = cli(capsys, "search-identity", "--group", "gl", "--n", "2", "--p", "3", "--max-length", "4", "--budget", "1000")
    assert code == 1 and out["error"] == "budget_exceeded"


def test_diameter_and_aq(capsys, files):
    code, out = cli(capsys, "diameter", "--word", files["strong"], "--n", "4", "--p", "2", "--seed", "1", "--samples", "4")
    assert code == 0 and out["d"] == 1 and out["realized"] >= 1
    code, out = cli(capsys, "aq-demo", "--word", files["strong"], "--n", "2", "--p", "2", "--levels", "1..3", "--epsilon", "1/4", "--seed", "1")
    assert code == 0 and [lv["level"] for lv in out["levels"]] == [1, 2, 3]
    assert out["levels"][0]["status"] == "hypotheses_fail"
    assert all(lv["within_bound"] for lv in out["levels"])


def test_reproducible_bytes(files, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"o{k}.json"
        main(["diameter", "--word", files["strong"], "--n", "6", "--p", "3", "--seed", "9", "--out", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_pretty_and_selftest(capsys):
    code = main(["selftest", "--seed", "2", "--pretty"])
    text = capsys.readouterr().out
    assert code == 0 and "field_axioms" in text and not text.startswith("{")


def test_console_script_entry(files):
    proc = subprocess.run(
        [sys.executable, "-m", "wordmaps.cli", "norm", "--matrix", files["ident"]],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout) == {"projective_norm": 0}
