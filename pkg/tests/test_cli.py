import json
import math
import subprocess
import sys

import pytest

from indicyl import cli

HYP_WITH_CODAZZI = """\
b1 0
codazzi 2
scalar 1 2.1 3
oneform 1 1.3 4
tt 1 3.0 2
tt 2 5.2 8
"""

HYP_RHS = """\
b1 0
codazzi 0
scalar 1 2.5 4
oneform 1 2.2 2
tt 1 4.1 6
"""


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr().out
    return code, out


def test_roots_sphere_window(capsys):
    code, out = run_cli(["roots", "--sphere", "--jmax", "4", "--window=-2,2"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    values = sorted({(r["re"], r["im"]) for r in doc["roots"]})
    assert values == [(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]


def test_roots_torus_dims(capsys):
    code, out = run_cli(["roots", "--torus", "6.0,6.0,6.0", "--jmax", "2"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["kernel_dim_at_zero"] == 14
    assert doc["cokernel_dim_at_zero"] == 14


def test_roots_hyperbolic(tmp_path, capsys):
    path = tmp_path / "spec.txt"
    path.write_text(HYP_WITH_CODAZZI)
    code, out = run_cli(["roots", "--hyperbolic", str(path), "--jmax", "9"], capsys)
    assert code == 0
    doc = json.loads(out)
    res = {round(r["re"], 9) for r in doc["roots"]}
    mu, nu = 2.1, 1.3
    assert round(math.sqrt(mu + 2 + 2 * math.sqrt(1 + mu / 3)), 9) in res
    assert round(math.sqrt(nu + 4), 9) in res
    assert round(math.sqrt(nu), 9) in res


def test_exit_code_2_on_bad_spec(capsys):
    code, _ = run_cli(["roots", "--sphere", "--torus", "1,1,1"], capsys)
    assert code == 2
    code, _ = run_cli(["roots", "--lens", "4,2,1", "--jmax", "2"], capsys)
    assert code == 2  # non-coprime rotation parameters


def test_exit_code_3_on_missing_file(capsys):
    code, _ = run_cli(["roots", "--hyperbolic", "/nonexistent/file.txt"], capsys)
    assert code == 3


def test_exit_code_3_on_bad_file(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("b1 0\ncodazzi 0\ntt 1 2.0 1\n")
    code, _ = run_cli(["roots", "--hyperbolic", str(path)], capsys)
    assert code == 3


def test_gap_sphere(capsys):
    code, out = run_cli(["gap", "--sphere", "--jmax", "4"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["window"] == [0.0, 2.0]
    assert doc["gap_above_conformal_killing"] == 2.0


def test_gap_lens(capsys):
    code, out = run_cli(["gap", "--lens", "2,1,1", "--jmax", "4"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["window"] == [0.0, 2.0]


def test_ks_both_ways(tmp_path, capsys):
    with_c = tmp_path / "c.txt"
    with_c.write_text(HYP_WITH_CODAZZI)
    code, out = run_cli(["ks", "--hyperbolic", str(with_c)], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["h2plus_vanishes"] is False
    assert doc["cokernel_dim_at_zero"] == 5

    rhs = tmp_path / "r.txt"
    rhs.write_text(HYP_RHS)
    code, out = run_cli(["ks", "--hyperbolic", str(rhs)], capsys)
    doc = json.loads(out)
    assert doc["h2plus_vanishes"] is True
    assert doc["cokernel_dim_at_zero"] == 1


def test_lens_table(capsys):
    code, out = run_cli(["lens", "--lens", "2,1,1", "--jmax", "5"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["multiplicities"] == [[0, 1], [1, 0], [2, 9], [3, 0], [4, 25], [5, 0]]


def test_json_deterministic(capsys):
    _, out1 = run_cli(["roots", "--sphere", "--jmax", "5"], capsys)
    _, out2 = run_cli(["roots", "--sphere", "--jmax", "5"], capsys)
    assert out1 == out2


def test_csv_matches_json(capsys):
    _, jout = run_cli(["roots", "--sphere", "--jmax", "3"], capsys)
    _, cout = run_cli(["roots", "--sphere", "--jmax", "3", "--format", "csv"], capsys)
    doc = json.loads(jout)
    lines = cout.strip().splitlines()
    header = lines[0].split(",")
    assert header[0] == "re"
    assert len(lines) - 1 == len(doc["roots"])
    first = dict(zip(header, lines[1].split(",")))
    assert float(first["re"]) == doc["roots"][0]["re"]
    assert first["origin_kind"] == doc["roots"][0]["origin_kind"]


def test_verify_identities_exit_zero(capsys):
    code, out = run_cli(["verify", "identities", "--N", "8", "--seed", "7"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"] is True
    assert len(doc["results"]) == 11


def test_verify_identities_rejects_bad_n(capsys):
    code, _ = run_cli(["verify", "identities", "--N", "12"], capsys)
    assert code == 2


def test_verify_oracle(capsys):
    code, out = run_cli(["verify", "oracle", "--jmax", "10"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"] is True
    names = {r["check"] for r in doc["results"]}
    assert "flat_pencil_zero_mode_dimension_14" in names


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "roots.json"
    code, out = run_cli(["roots", "--sphere", "--jmax", "2", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert doc["command"] == "roots"


def test_console_script_entrypoint():
    proc = subprocess.run(
        [sys.executable, "-m", "indicyl.cli", "gap", "--sphere", "--jmax", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["window"] == [0.0, 2.0]


def test_root_record_roundtrip(capsys):
    _, out = run_cli(["roots", "--sphere", "--jmax", "6"], capsys)
    doc = json.loads(out)
    redumped = json.loads(json.dumps(doc))
    assert redumped == doc
    for rec in doc["roots"]:
        assert isinstance(rec["re"], float) and isinstance(rec["im"], float)
        assert rec["case"] in range(6)
