import json
import math

import numpy as np
import pytest

from quasigen.cli import dispatch, parse_range
from quasigen.genfunc import GeneralizedFunctionRep
from quasigen.io import read_rep, to_jsonable, write_rep
from quasigen.specgrid import Grid


def _load(path):
    body = json.loads(path.read_text())
    body.pop("timestamp", None)
    return body


def test_parse_range():
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("2..8:3") == [2, 5, 8]
    assert parse_range("4,16") == [4, 16]


def test_jsonable():
    out = to_jsonable({"a": np.float64(math.inf), "b": np.arange(2), "c": 1 + 2j, (1, 2): np.bool_(True)})
    assert out == {"a": None, "b": [0, 1], "c": [1.0, 2.0], "(1, 2)": True}


def test_rep_roundtrip(tmp_path):
    g = Grid(8.0, 64)
    rep = GeneralizedFunctionRep.from_samples(g, [1, 2, 3], lambda n, x: np.cos(n * x) + 1j * x)
    write_rep(tmp_path / "r", rep)
    back = read_rep(tmp_path / "r")
    assert np.array_equal(back.spectra, rep.spectra)
    assert np.array_equal(back.n_values, rep.n_values) and back.domain == rep.domain


def test_weights_check_ok(tmp_path, capsys):
    assert dispatch(["--out", str(tmp_path), "weights", "check", "--seq", "factorial", "--depth", "128"]) == 0
    rpt = _load(tmp_path / "weights-check.json")
    assert rpt["report"]["m2"]["constants"] == {"A": 1.0, "H": 2.0}


def test_unknown_flag(capsys):
    assert dispatch(["weights", "check", "--bogus"]) == 2
    assert "--bogus" in capsys.readouterr().err


def test_bad_value(capsys):
    assert dispatch(["classify", "--input", "/nonexistent", "--K", "1,0"]) == 2


def test_gorny_default(tmp_path):
    assert dispatch(["--out", str(tmp_path), "gorny", "--corpus", "default"]) == 0
    assert _load(tmp_path / "gorny.json")["violations"] == 0


def test_verdict_failure_exit_code():
    # at c = 0.5 with n <= 16 the fit cannot confirm decay: a verdict failure, not misuse
    assert dispatch(["mollifier", "verify-decay", "--n", "1..16", "--c", "0.5"]) == 1


def test_reproducible_from_config(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert dispatch(["--out", str(a), "--seed", "7", "gorny", "--size", "10"]) == 0
    cfg = a / "gorny.config.json"
    assert dispatch(["--out", str(b), "--config", str(cfg), "gorny"]) == 0
    assert _load(a / "gorny.json") == _load(b / "gorny.json")
    assert _load(a / "gorny.json")["seed"] == 7


def test_embed_classify_support_pipeline(tmp_path):
    spec = tmp_path / "f.json"
    spec.write_text(json.dumps({"terms": [{"dirac": {"a": 0, "k": 0, "c": 1}}]}))
    out = tmp_path / "o"
    assert dispatch(["--out", str(out), "embed", "--functional", str(spec), "--n", "1..64"]) == 0
    js = tmp_path / "c.json"
    assert dispatch(["classify", "--input", str(out / "embedded"), "--K", "-1,1",
                     "--mode", "negligible", "--order", "20", "--json", str(js)]) == 0
    assert _load(js)["report"]["verdict"] is False
    assert dispatch(["--out", str(out), "support", "--input", str(out / "embedded"),
                     "--rho", "0.25", "--region", "-4,4"]) == 0
    assert _load(out / "support.json")["support"]["intervals"] == [[-0.25, 0.25]]


def test_functional_single_interval_support(tmp_path):
    fn = tmp_path / "f.json"
    fn.write_text(json.dumps({"terms": [{"dirac": {"a": 0.0}}], "support": [-0.1, 0.1]}))
    assert dispatch(["--out", str(tmp_path), "embed", "--functional", str(fn), "--n", "1..16"]) == 0


def test_malformed_functional_exit_code(tmp_path, capsys):
    fn = tmp_path / "f.json"
    fn.write_text(json.dumps({"support": [-0.1, 0.1]}))
    assert dispatch(["embed", "--functional", str(fn)]) == 2
    assert "KeyError" in capsys.readouterr().err
