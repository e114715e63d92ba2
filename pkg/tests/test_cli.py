import math
import subprocess
import sys
from dataclasses import replace

import pytest

from udwghost.cli import main
from udwghost.runner import CSV_HEADER, ReportRow, emit_report, format_csv, run_single, run_sweep
from udwghost.scenario import parse_scenario

FAST = """
name = "fast"

[quadrature]
radial_nodes = 32
angular_nodes = 16
error_estimate = false

[sweep]
tau = [0.5, -0.5, 0.0]

[[detectors]]
worldline = "rindler"
acceleration = 1.0

[[detectors]]
position = [-1.0, 0.0, 0.0]
"""


@pytest.fixture
def fast_file(tmp_path):
    path = tmp_path / "fast.toml"
    path.write_text(FAST)
    return path


def test_header_is_exact():
    assert CSV_HEADER == (
        "tau,p_g_given_gprep,p_e_given_gprep,p_g_given_eprep,p_e_given_eprep,"
        "intensity_gprep,intensity_eprep,contrast,negativity,quad_rel_err"
    )


def test_csv_row_counts():
    assert format_csv([]) == CSV_HEADER + "\n"
    row = ReportRow(0.0, 0.75, 0.25, 0.5, 0.5, 0.25, 0.5, float("nan"), 0.0, 1e-12)
    text = format_csv([row])
    assert text.splitlines() == [CSV_HEADER, "0.0,0.75,0.25,0.5,0.5,0.25,0.5,nan,0.0,1e-12"]


def test_zero_coupling_row():
    s = parse_scenario(FAST)
    dets = tuple(replace(d, lam=0.0) for d in s.detectors)
    row = run_single(replace(s, detectors=dets))
    assert row.intensity_gprep == 0.0 and row.p_g_given_gprep == 1.0
    # Alice prepared e never flips to g, so that branch carries no data
    assert math.isnan(row.intensity_eprep) and math.isnan(row.p_g_given_eprep)
    assert math.isnan(row.contrast)
    assert format_csv([row]).splitlines()[1].split(",")[4:8] == ["nan", "0.0", "nan", "nan"]


def test_sweep_ordered_and_parallel():
    s = parse_scenario(FAST)
    rows = run_sweep(s)
    assert [r.tau for r in rows] == [-0.5, 0.0, 0.5]
    assert format_csv(run_sweep(s, workers=2)) == format_csv(rows)


def test_run_stdout(fast_file, capsys):
    assert main(["run", str(fast_file)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 2


def test_sweep_outputs(fast_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["sweep", str(fast_file), "--out", str(out), "--plot"]) == 0
    csv = (out / "fast.csv").read_text()
    assert len(csv.splitlines()) == 4
    meta = (out / "fast.json").read_text()
    assert '"radial_nodes": 32' in meta and '"theta": 1.0' in meta
    svg = (out / "fast.svg").read_bytes()
    assert svg.startswith(b"<?xml")
    assert main(["sweep", str(fast_file), "--out", str(out), "--plot"]) == 0
    assert (out / "fast.svg").read_bytes() == svg


def test_overrides_flow_into_meta(fast_file, tmp_path):
    out = tmp_path / "o"
    assert main(["run", str(fast_file), "--theta", "0.5", "--beta-scale", "0.9", "--radial-nodes", "40", "--out", str(out)]) == 0
    meta = (out / "fast.json").read_text()
    assert '"theta": 0.5' in meta and '"beta_scale": 0.9' in meta and '"radial_nodes": 40' in meta


def test_images_csv_for_multi_pixel(tmp_path):
    text = FAST.replace("[sweep]\ntau = [0.5, -0.5, 0.0]\n", "") + "\n[[detectors]]\nposition = [0.0, 1.0, 0.0]\n"
    text = text.replace('name = "fast"', 'name = "three"\n[protocol]\nalice = [1]\nbob = [2, 3]')
    s = parse_scenario(text)
    rows = [run_single(s)]
    paths = emit_report(rows, s, tmp_path)
    images = (tmp_path / "three.images.csv").read_text().splitlines()
    assert tmp_path / "three.images.csv" in paths
    assert images[0] == "tau,prep,alice_image,pixel_2,pixel_3"
    assert len(images) == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "table9"],
        ["sweep", "table1"],
        ["run", "table1", "--theta", "1000"],
        ["run", "table1", "--plot"],
        ["run"],
        ["frobnicate"],
    ],
)
def test_config_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        sys.exit(main(argv))
    assert info.value.code == 2


def test_convergence_error_exit_3(capsys):
    assert main(["run", "table1", "--radial-nodes", "8"]) == 3
    err = capsys.readouterr().err
    assert "convergence error" in err and "rel_change" in err


def test_bad_output_dir(fast_file, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", str(fast_file), "--out", str(blocker / "sub")]) == 1


def test_presets_commands(capsys):
    assert main(["presets", "list"]) == 0
    out = capsys.readouterr().out
    assert [line.split("\t")[0] for line in out.splitlines()] == ["table1", "table2", "table3"]
    assert main(["presets", "show", "table3"]) == 0
    assert "rindler" in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "udwghost", "presets", "list"], capture_output=True, text=True)
    assert res.returncode == 0 and "table2" in res.stdout


def test_oracle_check(capsys):
    assert main(["oracle-check"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5 and all(line.startswith("PASS") for line in lines)
