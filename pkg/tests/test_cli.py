import json
import subprocess
import sys

import pytest

from ffcircle import cli
from ffcircle.config import DEFAULT_COUNT_LIMIT, get_count_limit, set_count_limit


@pytest.fixture(autouse=True)
def _reset_limit():
    yield
    set_count_limit(DEFAULT_COUNT_LIMIT)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_body(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


def csv_meta(text):
    return dict(line[2:].split(": ", 1) for line in text.splitlines() if line.startswith("# "))


def test_shadow_and_kstar(capsys):
    code, out, _ = run(capsys, "shadow", "--exponents", "3")
    assert code == 0
    assert csv_body(out) == ["j", "1", "2", "3"]
    meta = csv_meta(out)
    assert meta["stamp"] == "conforming" and meta["command"] == "shadow" and meta["K"] == "[3]"
    code, out, _ = run(capsys, "kstar", "--exponents", "1,2", "--format", "json")
    assert code == 0 and json.loads(out)["data"] == {"kStar": []}


def test_approx(capsys):
    code, out, _ = run(capsys, "approx", "t^-1+t^-5", "--precision", "10", "--format", "json")
    data = json.loads(out)["data"]
    assert code == 0 and data["g"] == "t" and data["ordGap"] == -4


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "t^-1", "--precision", "30", "--n", "9", "--format", "json")
    assert code == 0 and json.loads(out)["data"]["major"] is True
    code, out, _ = run(capsys, "classify", "t^-1", "--precision", "30", "--n", "9")
    assert csv_body(out)[0] == "alpha,verdict,center"
    code, _, err = run(capsys, "classify", "t^-1;t^-2", "--n", "9")
    assert code == 2 and "coordinates" in err


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "verify", "orthogonality", "--format", "table")
    assert code == 0
    assert "orthogonality" in out and "pass" in out


def test_override_stamps_output(capsys):
    code, out, _ = run(capsys, "classify", "t^-1", "--precision", "30", "--n", "9",
                       "--override-rho", "1/2")
    meta = csv_meta(out)
    assert code == 0 and meta["stamp"] == "nonconforming parameters"
    assert "rho" in meta["overrides"]


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["report", "nonsense"])
    assert exc.value.code == 2
    assert run(capsys, "shadow", "--exponents", "0")[0] == 2
    assert run(capsys, "shadow", "--field", "4")[0] == 2
    assert run(capsys, "classify", "t^-1", "--override-rho", "x")[0] == 2


def test_limit_exit_code(capsys):
    code, _, err = run(capsys, "report", "gauss", "--exponents", "1", "--s", "4", "--limit", "8")
    assert code == 3 and "limit" in err
    assert get_count_limit() == 8


def test_determinism(capsys, tmp_path):
    argv = ["report", "decay", "--exponents", "3", "--n", "10", "--samples", "10", "--seed", "7"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b
    c = run(capsys, *argv[:-1], "8")[1]
    assert csv_body(a) != csv_body(c) or csv_meta(a)["seed"] != csv_meta(c)["seed"]
    out = tmp_path / "d.csv"
    assert run(capsys, *argv, "--out", str(out))[0] == 0
    assert out.read_text() == a


def test_config_merge(capsys, tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("exponents = 3\nformat = json\nseed = 5\n")
    code, out, _ = run(capsys, "shadow", "--config", str(cfg), "--exponents", "2")
    meta = json.loads(out)["meta"]
    assert code == 0 and meta["K"] == [2] and meta["seed"] == 5
    bad = tmp_path / "bad.ini"
    bad.write_text("colour = blue\n")
    assert run(capsys, "shadow", "--config", str(bad))[0] == 2


def test_gauss_report_exact(capsys):
    code, out, _ = run(capsys, "report", "gauss", "--exponents", "3", "--s", "2")
    body = csv_body(out)
    assert code == 0 and body[0] == "s,h,a1,re,im,abs,max_abs"
    # a = 1, h = t^2+t+1 gives Lambda = 1
    assert "2,t^2+t+1,1,1,0,1,1" in body
    code, out, _ = run(capsys, "report", "gauss", "--exponents", "3", "--s", "2", "--exact",
                       "--format", "json")
    rows = json.loads(out)["data"]
    assert code == 0 and all(sum(r["counts"]) == 2 ** r["s"] for r in rows)


def test_ergodic_sim(capsys):
    code, out, _ = run(capsys, "ergodic-sim", "--exponents", "3", "--format", "json")
    assert code == 0 and json.loads(out)["meta"]["stabilization"] == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ffcircle.cli", "kstar", "--exponents", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and csv_body(proc.stdout) == ["k", "3"]
