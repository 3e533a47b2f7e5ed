import csv
import io
import json
import subprocess
import sys

import pytest

from etaparity import __version__
from etaparity.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def envelope(out):
    env = json.loads(out)
    assert set(env) == {"command", "params", "result", "ok", "wall_time_ms", "version"}
    assert env["version"] == __version__
    return env


def test_coeffs_exact(capsys):
    code, out, _ = run(capsys, "coeffs", "f3/(f1*f6)", "0..8", "--exact")
    assert code == 0
    values = [r["coeff"] for r in envelope(out)["result"]["coefficients"]]
    assert values == [1, 1, 2, 2, 4, 5, 8, 10, 15]


def test_coeffs_mod2(capsys):
    code, out, _ = run(capsys, "coeffs", "f3/(f1*f6)", "0..3")
    assert [r["coeff"] for r in envelope(out)["result"]["coefficients"]] == [1, 1, 0, 0]
    code, out, _ = run(capsys, "--format", "csv", "coeffs", "f1", "0..2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["coeff"]) for r in rows] == [1, 1, 1]


def test_coeffs_usage_errors(capsys):
    assert run(capsys, "coeffs", "f3/(f1", "0..3")[0] == 2
    assert run(capsys, "coeffs", "f1", "0..10", "--trunc", "5")[0] == 2
    assert run(capsys, "coeffs", "f1", "0..3", "--exact", "--trunc", "6000")[0] == 2
    assert run(capsys, "coeffs", "f1", "a..b")[0] == 2


def test_verify_identity(capsys):
    code, out, _ = run(capsys, "verify", "eq44", "--trunc", "100000")
    env = envelope(out)
    assert code == 0 and env["ok"]
    assert env["result"]["reports"][0]["outcome"] == "pass"


def test_verify_proof(capsys):
    code, out, _ = run(capsys, "verify", "proof-second", "--trunc", "10000")
    reports = envelope(out)["result"]["reports"]
    assert code == 0 and len(reports) > 1
    assert all(r["outcome"] == "pass" for r in reports)


def test_verify_theorem_and_failure(capsys):
    code, out, _ = run(capsys, "verify", "theorem", "--trunc", "100000")
    assert code == 0
    code, out, _ = run(capsys, "verify", "theorem", "--trunc", "100", "--expr", "f6/f1")
    rep = envelope(out)["result"]["reports"][0]
    assert code == 1
    assert rep["outcome"] == "fail" and rep["first_mismatch"] == 3


def test_verify_unknown_tag_lists_tags(capsys):
    code, _, err = run(capsys, "verify", "eq7")
    assert code == 2
    assert "eq44" in err and "proof-first" in err


def test_scan_density_csv(capsys, tmp_path):
    target = tmp_path / "d.csv"
    code, out, _ = run(capsys, "scan", "density", "--trunc", "100000", "--mod", "4",
                       "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    rows = list(csv.DictReader(target.open()))
    assert list(rows[0]) == ["residue", "class_size", "odd_count", "odd_fraction"]
    assert [int(r["odd_count"]) for r in rows][2:] == [0, 0]


def test_scan_density_json_keys(capsys):
    code, out, _ = run(capsys, "scan", "density", "--trunc", "10000")
    classes = envelope(out)["result"]["classes"]
    assert set(classes[0]) == {"residue", "class_size", "odd_count", "odd_fraction"}


def test_scan_ap(capsys):
    code, out, _ = run(capsys, "scan", "ap", "--trunc", "100000", "--max-mod", "64")
    res = envelope(out)["result"]
    assert code == 0 and res["all_even_subsumed"]
    assert len(res["even_classes"]) == 272


def test_scan_equi_and_link(capsys):
    code, out, _ = run(capsys, "scan", "equi", "--trunc", "1000", "--mod", "4", "--residue", "1")
    assert code == 0
    assert 0 < envelope(out)["result"]["odd_fraction"] < 1
    code, out, _ = run(capsys, "scan", "link", "--trunc", "100000")
    assert code == 0 and envelope(out)["result"]["passed"]


def test_scan_usage_errors(capsys):
    assert run(capsys, "scan", "ap", "--trunc", "100", "--max-mod", "64")[0] == 2
    assert run(capsys, "scan", "equi", "--trunc", "1000", "--mod", "4", "--residue", "2")[0] == 2
    assert run(capsys, "scan", "equi", "--mod", "4", "--residue", "5")[0] == 2
    assert run(capsys, "scan", "density", "--expr", "f1/")[0] == 2


def test_argparse_usage_exit_code():
    with pytest.raises(SystemExit) as info:
        main(["scan", "spectrum"])
    assert info.value.code == 2


def test_global_flags_before_subcommand(capsys):
    code, out, _ = run(capsys, "--format", "plain", "--trunc", "20", "coeffs", "f1", "0..2")
    assert code == 0 and out.splitlines()[0].split() == ["n", "coeff"]


def test_json_schema_stable(capsys):
    payloads = []
    for threads in ("1", "2", "8"):
        _, out, _ = run(capsys, "scan", "density", "--trunc", "30000", "--mod", "12", "--threads", threads)
        env = envelope(out)
        env.pop("wall_time_ms")
        payloads.append(json.dumps(env, sort_keys=True))
    assert payloads[0] == payloads[1] == payloads[2]


@pytest.mark.parametrize("argv, code", [
    (["verify", "eq33", "--trunc", "1000"], 0),
    (["verify", "theorem", "--trunc", "64", "--expr", "f6/f1"], 1),
    (["verify", "nonsense"], 2),
    (["scan"], 2),
])
def test_exit_codes_end_to_end(argv, code):
    proc = subprocess.run([sys.executable, "-m", "etaparity.cli", *argv],
                          capture_output=True, text=True, env={"ETAQ_THREADS": "2", "PATH": ""})
    assert proc.returncode == code, proc.stderr
