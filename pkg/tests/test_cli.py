import io
import json
from contextlib import redirect_stdout

import pytest

from cil.cli import RunConfig, main, render_report
from cil.errors import CilError


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_example_list():
    code, out = run_cli(["example", "list"])
    assert code == 0
    names = {s["name"] for s in json.loads(out)["systems"]}
    assert "cantor-1-3" in names and "shortword" in names


def test_validate_and_exit_codes():
    code, out = run_cli(["validate", "--system", "cantor-1-3"])
    assert code == 0
    report = json.loads(out)
    assert report["distortion"]["K"] == "1"
    code, _ = run_cli(["dim", "--system", "cantor-1-3", "--tol", "1/1000"])
    assert code == 0


def test_unknown_system_is_exit_one(capsys):
    code = main(["validate", "--system", "definitely-not-a-system"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_wsc_count_text_format_mentions_ambiguity():
    report = {"phi_count": 3, "ambiguous": 2, "witnesses": ["11"]}
    text = render_report(report, "text")
    assert "warning" in text and "2 boundary" in text


def test_render_unknown_format():
    with pytest.raises(CilError):
        render_report({}, "yaml")


def test_boxdim_csv():
    code, out = run_cli(
        ["--format", "csv", "boxdim", "--system", "cantor-1-3", "--r", "1/9,1/27,1/81,1/243"]
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "r,n_r"
    assert lines[1].split(",") == ["1/9", "4"]


def test_determinism_byte_identical():
    args = ["dim", "--system", "cantor-1-3", "--tol", "1/100000"]
    out1 = run_cli(args)[1]
    out2 = run_cli(args)[1]
    assert out1 == out2
    args2 = ["wsc-count", "--system", "wsc", "--x", "0", "--r", "1/27", "--unrestricted"]
    assert run_cli(args2)[1] == run_cli(args2)[1]


def test_example_verify_exit_zero():
    code, out = run_cli(["example", "verify", "shortword"])
    assert code == 0
    assert json.loads(out)["passed"]


def test_pressure_command():
    code, out = run_cli(["pressure", "--system", "cantor-1-3", "--s", "1/2", "--depth", "4"])
    assert code == 0
    rep = json.loads(out)
    truth = 0.1438410362258904  # log 2 - (1/2) log 3
    assert abs(rep["lower_approx"] - truth) < 1e-12
    assert abs(rep["upper_approx"] - truth) < 1e-12


def test_tangent_and_amplify_commands():
    code, out = run_cli(["tangent", "--system", "beta-near-overlap", "--n", "3"])
    assert code == 0 and json.loads(out)["feasible"]
    code, out = run_cli(["tangent", "--system", "cantor-1-3", "--n", "3"])
    assert code == 0 and not json.loads(out)["feasible"]
    code, out = run_cli(["amplify", "--system", "beta-near-overlap", "--n", "2"])
    assert code == 0 and json.loads(out)["guarantee_met"]


def test_system_loading_from_json_file(tmp_path):
    import cil

    system = cil.load_system("cantor-1-3")
    path = tmp_path / "cantor.json"
    path.write_text(json.dumps(system.to_json()))
    code, out = run_cli(["validate", "--system", str(path)])
    assert code == 0
    assert json.loads(out)["n_maps"] == 2


def test_generation_cut_sample_lower_source():
    from fractions import Fraction as Q

    import cil

    cant = cil.load_system("cantor-1-3")
    cut = cil.generation_cut(cant, Q(1, 9), diameter_source="sample-lower")
    assert len(cut) == 4  # exact diameters: both sources agree
    assert cut.diameter_source == "sample-lower"


def test_run_config_validation(tmp_path):
    with pytest.raises(ValueError):
        RunConfig(precision_bits=10)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"precision_bits": 64, "r_schedule": ["1/9", "1/27"]}))
    loaded = RunConfig.from_file(str(cfg))
    assert loaded.precision_bits == 64
    assert len(loaded.r_schedule) == 2
