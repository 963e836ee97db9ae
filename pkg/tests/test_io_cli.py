import json
import subprocess
import sys

import numpy as np
import pytest

from kspheres import cli
from kspheres.approx import error_scan
from kspheres.io import Result, dumps_csv, dumps_json, to_plain
from kspheres.lattice import SphereSpec, count_sphere


def run_cli(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = cli.main([*args, "--output", str(out)])
    return code, (out.read_bytes() if out.exists() else b"")


def test_csv_floats_have_17_digits():
    text = dumps_csv([{"a": 0.1, "b": 3, "c": 1 + 2j, "d": [1, 2]}])
    assert text == "a,b,c,d\n0.10000000000000001,3,1+2j,1;2\n"


def test_json_nonfinite_and_nesting():
    text = dumps_json({"x": float("inf"), "y": [1.5, {"z": None}], "w": np.arange(2)})
    assert '"x": Infinity' in text
    assert json.loads(text.replace("Infinity", "1e999"))["w"] == [0, 1]
    assert to_plain(np.complex128(1 - 1j)) == {"re": 1.0, "im": -1.0}


def test_count_example(tmp_path):
    code, data = run_cli(tmp_path, "count", "--k", "2", "--d", "4", "--levels", "4,16,64")
    assert code == 0
    assert data.decode().splitlines() == ["k,d,level,count", "2,4,4,24", "2,4,16,24", "2,4,64,24"]
    code, data = run_cli(tmp_path, "count", "--k", "2", "--d", "2", "--levels", "0")
    assert data.decode().splitlines()[1] == "2,2,0,1"


def test_cli_matches_library_serialization(tmp_path):
    code, data = run_cli(tmp_path, "approx-scan", "--k", "2", "--d", "5", "--level", "100", "--Q", "30",
                         "--M", "64", "--format", "json")
    assert code == 0
    rep = error_scan(SphereSpec(2, 5, 100), 30, 64)
    ref = Result("approx-scan", [cli._report_row(rep)], {"max_normalized_error": rep.normalized_error},
                 "max_normalized_error").render("json")
    assert data.decode() == ref


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k": 2, "d": 3, "levels": "1,2,3"}))
    code, data = run_cli(tmp_path, "count", "--config", str(cfg), "--levels", "5")
    assert code == 0
    assert data.decode().splitlines()[1:] == [f"2,3,5,{count_sphere(SphereSpec(2, 3, 5)).count}"]


def test_exit_codes(tmp_path, capsys):
    assert cli.main(["nope"]) == 2
    assert cli.main(["count", "--k", "1", "--d", "2", "--levels", "3"]) == 2
    assert cli.main(["count", "--k", "2", "--levels", "3"]) == 2
    assert cli.main(["enumerate", "--k", "2", "--d", "3", "--level", "100000", "--enumeration-cap", "10"]) == 3
    assert cli.main(["weyl", "--k", "2", "--N", "10", "--t", "0", "--tau", "bogus"]) == 2
    # a budget failure leaves no partial output behind
    code, data = run_cli(tmp_path, "enumerate", "--k", "2", "--d", "3", "--level", "100000",
                         "--enumeration-cap", "10", name="partial")
    assert code == 3 and data == b""


def test_summary_line(tmp_path, capsys):
    cli.main(["count", "--k", "2", "--d", "4", "--levels", "4,16", "--output", str(tmp_path / "o")])
    err = capsys.readouterr().err.strip().splitlines()
    assert err == ["count: 2 rows, total=48"]


@pytest.mark.parametrize("args", [
    ["enumerate", "--k", "2", "--d", "2", "--level", "25"],
    ["expsum", "--k", "2", "--d", "2", "--levels", "1:30", "--xi", "1/3,0.25"],
    ["weyl", "--k", "3", "--N", "64,128,256", "--t", "1/7"],
    ["gauss", "--k", "2", "--d", "2", "--a", "1", "--q", "7", "--m", "1,2"],
    ["hua", "--k", "3", "--d", "1", "--q-max", "20"],
    ["farey", "--X", "6", "--R", "3"],
    ["classify", "--t", "0.3,1/7", "--R", "3", "--k", "2"],
    ["sigma-hat", "--k", "3", "--d", "2", "--xi", "1,0.5;2,0"],
    ["decay-fit", "--k", "2", "--d", "2", "--direction", "1,0", "--T-max", "100", "--points", "5"],
    ["theta", "--k", "2", "--d", "2", "--z", "0.01,0.01", "--xi", "0,0;0.2,0.1"],
    ["main-term", "--k", "2", "--d", "4", "--level", "50", "--Q", "5", "--xi", "0,0,0,0;0.1,0,0,0"],
    ["error-fit", "--k", "2", "--d", "3", "--R", "1,2,3,4", "--Q", "2"],
    ["average", "--k", "2", "--d", "2", "--L", "12", "--levels", "1:10"],
    ["maxop", "--k", "2", "--d", "2", "--L", "12", "--r-max", "3", "--p", "2"],
    ["probe", "--k", "2", "--d", "5", "--p-list", "5/3,1.9,inf", "--r-max", "50"],
])
def test_every_command_runs_in_both_formats(tmp_path, args):
    for fmt in ("csv", "json"):
        code, data = run_cli(tmp_path, *args, "--format", fmt, name=fmt)
        assert code == 0, args
        assert data
        if fmt == "json":
            json.loads(data.decode().replace("-Infinity", "-1e999").replace("Infinity", "1e999")
                       .replace("NaN", "null"))


def test_ergodic_commands(tmp_path):
    desc = tmp_path / "sys.json"
    desc.write_text(json.dumps({"s": 1, "alphas": [[0.41421356237309515], [0.7320508075688772]],
                                "freqs": [[1]], "coeffs_re": [1.0]}))
    for args in (["ergodic", "--k", "2", "--levels", "25,50"], ["spectral"],
                 ["convergence", "--k", "2", "--levels", "1:100", "--r-j", "5"]):
        code, data = run_cli(tmp_path, *args, "--system", str(desc))
        assert code == 0
    assert data.decode().splitlines()[0] == "level,x_index,dev"


def test_malformed_system_descriptor_is_a_usage_error(capsys):
    bad = json.dumps({"s": 1, "alphas": [[0.5]], "freqs": [[1]]})
    assert cli.main(["ergodic", "--k", "2", "--levels", "5", "--system", bad]) == 2
    assert "malformed system descriptor" in capsys.readouterr().err
    real = json.dumps({"s": 1, "alphas": [[0.5]], "freqs": [[1]], "coeffs": [1]})
    assert cli.main(["spectral", "--system", real]) == 0


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "kspheres.cli", "count", "--k", "2", "--d", "2", "--levels", "5"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.splitlines()[1] == "2,2,5,8"
