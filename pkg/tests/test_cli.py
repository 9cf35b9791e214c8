import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from ahlfors import ScalarField, write_field
from ahlfors.cli import dumps_report, main, make_report, parse_mode_spec

SCHEMA = {
    "type": "object",
    "required": ["inputs", "parameters", "residuals", "norms", "solver", "verdicts"],
    "properties": {
        "inputs": {"type": "object"},
        "parameters": {"type": "object"},
        "residuals": {"type": "object", "additionalProperties": {"type": ["number", "null"]}},
        "norms": {"type": "object"},
        "solver": {"type": "object"},
        "verdicts": {"type": "object", "additionalProperties": {"type": "boolean"}},
        "meta": {"type": "object"},
    },
}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(text):
    rep = json.loads(text)
    jsonschema.validate(rep, SCHEMA)
    assert set(rep["verdicts"]) <= set(rep["residuals"])
    return rep


@pytest.fixture
def momentum_file(tmp_path, capsys):
    path = str(tmp_path / "K.gfld")
    code, _, _ = run(capsys, "gen", "--kind", "momentum", "--f", "cos:1,0", "--c", "0", "--n", "2",
                     "--shape", "32,32", "--out", path, "--no-meta")
    assert code == 0
    return path


def test_theorem3_worked(capsys, momentum_file):
    code, out, _ = run(capsys, "theorem3", "--K", momentum_file, "--no-meta")
    rep = report(out)
    assert code == 0
    assert rep["theorem3"]["fitted_c"] == pytest.approx(0.5, abs=1e-5)
    assert rep["theorem3"]["alt_coefficient"] == pytest.approx(1.5)


def test_decompose_umbilical(capsys, tmp_path):
    path = str(tmp_path / "U.gfld")
    assert run(capsys, "gen", "--kind", "umbilical", "--n", "2", "--shape", "32,32", "--out", path)[0] == 0
    code, out, _ = run(capsys, "decompose", "--K", path, "--no-meta")
    rep = report(out)
    assert code == 0 and all(rep["verdicts"].values())
    assert rep["norms"]["phi_tt"] <= 1e-10


def test_verify_identities_conformal(capsys):
    code, out, _ = run(capsys, "verify-identities", "--metric", "conformal", "--amp", "0.1", "--seed", "42",
                       "--samples", "5", "--no-meta")
    rep = report(out)
    assert code == 0 and len(rep["residuals"]) == 5
    assert max(rep["residuals"].values()) <= 1e-8


def test_constraints_conformal_file_gives_minus_two_lambda(capsys, tmp_path):
    path = str(tmp_path / "ones.gfld")
    write_field(path, ScalarField(np.ones((1, 32, 32))))
    code, out, _ = run(capsys, "constraints", "--metric", f"file:{path}", "--lambda", "0.75", "--no-meta")
    rep = report(out)
    assert rep["residuals"]["hamiltonian_min"] == rep["residuals"]["hamiltonian_max"] == -1.5
    assert code == 2  # a nonzero Hamiltonian residual is a failed constraint


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "constraints", "--n", "3", "--shape", "16,16,16", "--no-meta")[0] == 0
    path = str(tmp_path / "U3.gfld")
    run(capsys, "gen", "--kind", "umbilical", "--n", "3", "--shape", "16,16,16", "--out", path)
    code, out, _ = run(capsys, "constraints", "--K", path, "--no-meta")
    assert code == 2 and report(out)["verdicts"]["hamiltonian"] is False
    code, out, err = run(capsys, "decompose", "--K", str(tmp_path / "missing.gfld"))
    assert code == 1 and out == "" and err.startswith("error:")
    (tmp_path / "bad.gfld").write_bytes(b"nope")
    assert run(capsys, "decompose", "--K", str(tmp_path / "bad.gfld"))[0] == 1


def test_shape_mismatch_is_operational_error(capsys, momentum_file):
    code, _, err = run(capsys, "decompose", "--K", momentum_file, "--shape", "16,16")
    assert code == 1 and "shape" in err


def test_deterministic_output(capsys, momentum_file, tmp_path):
    a = run(capsys, "decompose", "--K", momentum_file, "--no-meta")[1]
    b = run(capsys, "decompose", "--K", momentum_file, "--no-meta")[1]
    assert a == b
    with_meta = json.loads(run(capsys, "decompose", "--K", momentum_file)[1])
    assert "meta" in with_meta


def test_out_flag_writes_report(capsys, momentum_file, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "decompose", "--K", momentum_file, "--out", str(dest), "--no-meta")
    assert code == 0 and out == ""
    report(dest.read_text())


def test_float_formatting():
    text = dumps_report(make_report({}, {"a": 0.1, "b": 2.0, "c": float("nan")}, {}, {}, {}, {}))
    assert '"a": 0.10000000000000001' in text and '"b": 2.0' in text and '"c": null' in text
    assert json.loads(text)["parameters"]["a"] == 0.1


def test_verdict_without_residual_rejected():
    with pytest.raises(ValueError):
        make_report({}, {}, {}, {}, {}, {"x": True})


def test_mode_spec():
    x = np.linspace(0, 6, 7)
    y = np.linspace(1, 2, 7)
    f = parse_mode_spec("cos:1,0*0.5+sin:0,2+const:3", 2)
    assert np.allclose(f(x, y), 0.5 * np.cos(x) + np.sin(2 * y) + 3)
    assert np.allclose(parse_mode_spec("cos:1", 2)(x, y), np.cos(x))


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "ahlfors.cli", "verify-identities", "--shape", "16,16", "--no-meta",
                          "--samples", "1"], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    report(out.stdout)
