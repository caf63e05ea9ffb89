import io
import json
import subprocess
import sys

import pytest

from capax.cli import load_config, run
from capax.errors import CapaxError


def call(argv):
    out = io.StringIO()
    code = run(argv, out)
    return code, out.getvalue()


def call_json(argv):
    code, text = call(argv)
    assert code == 0
    return json.loads(text)


def test_ech_json_and_csv():
    data = call_json(["ech", "--weights", "1,2", "--count", "6"])
    assert data["values"] == ["0/1", "1/1", "2/1", "2/1", "3/1", "3/1"]
    code, text = call(["ech", "--weights", "1,1", "--count", "3", "--format", "csv"])
    assert code == 0
    lines = text.splitlines()
    assert lines[0].startswith("# seed=") and lines[1] == "j,value,value_float"
    assert lines[3].startswith("1,1/1,")


def test_embed():
    data = call_json(["embed", "--src", "1,2", "--dst", "1,1", "--jmax", "100"])
    assert data["factor"] == "1/2" and data["exact_in_limit"] is True
    assert data["volume_bound_sq"] == "1/2" and data["units"] == "pi"


def test_icheck(tmp_path):
    fam = [
        {"a": "0", "values": {"x": "-1", "y": "1/2"}},
        {"a": "1", "values": {"x": "-1", "y": "3/5"}},
    ]
    path = tmp_path / "fam.json"
    path.write_text(json.dumps(fam))
    data = call_json(["icheck", "--family", str(path), "--ell", "2"])
    assert "C0" in data and "hypotheses" in data


def test_shell_all():
    data = call_json(["shell", "--r", "21/20", "--a0", "1/40", "--samples", "3"])
    assert data["admissible"] is True
    assert data["separation"]["separates"] is True
    assert data["normalized"]["pass"] is True


def test_shell_inadmissible_is_domain_error(capsys):
    code, _ = call(["shell", "--r", "6/5", "--a0", "1/10"])
    assert code == 1
    err = json.loads(capsys.readouterr().err)
    assert err["kind"] == "domain"
    data = call_json(["shell", "--r", "6/5", "--a0", "1/10", "--unchecked", "--check", "hypotheses"])
    assert data["admissible"] is False


def test_order(tmp_path):
    inst = {"kind": "vectors", "elements": [{"base": ["1", "2"]}, {"base": ["2", "1"]}]}
    (tmp_path / "i.json").write_text(json.dumps(inst))
    (tmp_path / "t.json").write_text(json.dumps({"max": ["2", "2"]}))
    (tmp_path / "g.json").write_text(json.dumps({"values": ["2", "1"]}))
    base = ["order", "--instance", str(tmp_path / "i.json"), "--table", str(tmp_path / "t.json")]
    data = call_json(base)
    assert data["holds"] is False and data["witness"] is not None
    data = call_json(base + ["--check", "generate", "--target", str(tmp_path / "g.json")])
    assert data["holds"] is False
    assert call(base + ["--check", "generate"])[0] == 1


def test_kink(tmp_path):
    csv_path = tmp_path / "curve.csv"
    data = call_json(["kink", "--a0", "2", "--grid", "1,3", "--curve-csv", str(csv_path)])
    cert = data["certificate"]
    assert cert["left_quotient"] == "1/2" and cert["right_quotient"] == "0/1" and cert["pass"] is True
    assert csv_path.read_text().startswith("a,")


def test_resource_limit(capsys):
    code, _ = call(["ech", "--weights", "1,1", "--count", "2000000"])
    assert code == 2
    assert json.loads(capsys.readouterr().err)["kind"] == "resource_limit"


@pytest.mark.parametrize(
    "argv",
    [[], ["nope"], ["ech", "--weights", "1,2"], ["ech", "--weights", "1", "--count", "x"]],
)
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        run(argv, io.StringIO())
    assert exc.value.code == 64


def test_domain_errors():
    assert call(["ech", "--weights", "1,-2", "--count", "3"])[0] == 1
    assert call(["ech", "--weights", "0.5", "--count", "3"])[0] == 1
    assert call(["icheck", "--family", "/nonexistent.json"])[0] == 1


def test_config_file(tmp_path, monkeypatch):
    monkeypatch.delenv("CAPAX_THREADS", raising=False)
    cfg = tmp_path / "capax.cfg"
    cfg.write_text("default_truncation_j = 7\nseed = 11\noutput_format = json\n")
    c = load_config(str(cfg))
    assert c.default_truncation_j == 7 and c.seed == 11 and c.threads == 1
    data = call_json(["--config", str(cfg), "embed", "--src", "1,2", "--dst", "1,1"])
    assert data["truncation_j"] == 7 and data["seed"] == 11
    data = call_json(["embed", "--src", "1,2", "--dst", "1,1", "--config", str(cfg), "--seed", "3"])
    assert data["seed"] == 3
    cfg.write_text("bogus = 1\n")
    with pytest.raises(CapaxError):
        load_config(str(cfg))


def test_threads_env():
    assert load_config(None, env={"CAPAX_THREADS": "3"}).threads == 3
    assert load_config(None, env={}).threads == 1
    with pytest.raises(CapaxError):
        load_config(None, env={"CAPAX_THREADS": "zero"})


def test_threads_do_not_change_output():
    argv = ["shell", "--r", "21/20", "--a0", "1/40", "--samples", "3", "--check", "separation"]
    assert call(argv) == call(argv + ["--threads", "2"])


def test_deterministic_subprocess():
    argv = [sys.executable, "-m", "capax", "kink", "--a0", "2", "--h", "1/10"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and b"certificate" in a
