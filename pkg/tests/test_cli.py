"""End-to-end runs of the command line client against the in-process app."""

import json

import numpy as np
import pytest

from qidkit.cli import main

SMALL_ATOM_NORMAL = {
    "atoms": [{"x": 0.0, "p": 0.001}],
    "ac": {"weight": 0.999, "kind": "normal", "mean": 1.0, "variance": 1.0},
}
ATOM_UNIFORM_01 = {
    "atoms": [{"x": 0.0, "p": 0.1}],
    "ac": {"weight": 0.9, "kind": "uniform", "left": -1.0, "right": 1.0},
}
ATOM_UNIFORM_05 = {
    "atoms": [{"x": 0.0, "p": 0.5}],
    "ac": {"weight": 0.5, "kind": "uniform", "left": -1.0, "right": 1.0},
}
NORMAL_LAW = {"ac": {"weight": 1.0, "kind": "normal",
                     "mean": 0.0, "variance": 1.0}}
UNIFORM_LAW = {"ac": {"weight": 1.0, "kind": "uniform",
                      "left": -1.0, "right": 1.0}}
MIX_LAW = {"ac": {"weight": 1.0, "kind": "mixture", "components": [
    {"weight": 0.5, "kind": "normal", "mean": 0.0, "variance": 1.0},
    {"weight": 0.5, "kind": "exponential", "rate": 1.0},
]}}


def write_spec(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_analyze_writes_report_and_grids(tmp_path, capsys):
    spec = write_spec(tmp_path, "law.json", SMALL_ATOM_NORMAL)
    out = tmp_path / "out"
    code = main(["analyze", "--spec", spec, "--out", str(out), "--n",
                 "16384"])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["verdict"] == "QID"
    assert report["triplet"]["index"] == 2
    assert "g" not in report
    for name in ("g.csv", "charfn.csv", "recon.csv"):
        lines = (out / name).read_text().splitlines()
        assert len(lines) > 100
    assert (out / "charfn.csv").read_text().splitlines()[0] == "z,re,im"
    assert (out / "recon.csv").read_text().splitlines()[0] == "z,re,im,abs_err"
    assert (out / "g.csv").read_text().splitlines()[0] == "x,g"
    assert "verdict=QID" in capsys.readouterr().out


def test_analyze_reruns_are_byte_identical(tmp_path):
    spec = write_spec(tmp_path, "law.json", SMALL_ATOM_NORMAL)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["analyze", "--spec", spec, "--out", str(out1),
                 "--n", "16384"]) == 0
    assert main(["analyze", "--spec", spec, "--out", str(out2),
                 "--n", "16384"]) == 0
    for name in ("report.json", "g.csv", "charfn.csv", "recon.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_json_only_skips_grids(tmp_path):
    spec = write_spec(tmp_path, "law.json", ATOM_UNIFORM_05)
    out = tmp_path / "out"
    code = main(["analyze", "--spec", spec, "--out", str(out),
                 "--n", "16384", "--json-only"])
    assert code == 0
    assert (out / "report.json").exists()
    assert not (out / "g.csv").exists()
    assert not (out / "charfn.csv").exists()


def test_zeros_exit_codes(tmp_path):
    bad = write_spec(tmp_path, "bad.json", ATOM_UNIFORM_01)
    good = write_spec(tmp_path, "good.json", ATOM_UNIFORM_05)
    assert main(["zeros", "--spec", bad, "--out", str(tmp_path)]) == 3
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["certificate"]["refined_location"] == pytest.approx(
        3.5466509347842936, abs=1e-6)
    assert main(["zeros", "--spec", good, "--out", str(tmp_path)]) == 0


def test_indeterminate_exit_code(tmp_path):
    spec = write_spec(tmp_path, "mix.json", MIX_LAW)
    assert main(["zeros", "--spec", spec, "--out", str(tmp_path)]) == 2


def test_index_subcommand(tmp_path, capsys):
    spec = write_spec(tmp_path, "two.json", {
        "atoms": [{"x": 0.0, "p": 0.3}, {"x": 1.0, "p": 0.7}],
        "lattice": {"r": 0.0, "h": 1.0}})
    assert main(["index", "--spec", spec, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["kind"] == "lattice_period"
    assert report["index"] == 1
    assert "index=1" in capsys.readouterr().out


def test_lattice_subcommand_files(tmp_path):
    spec = write_spec(tmp_path, "two.json", {
        "atoms": [{"x": 0.0, "p": 0.7}, {"x": 1.0, "p": 0.3}],
        "lattice": {"r": 0.0, "h": 1.0}})
    out = tmp_path / "out"
    assert main(["lattice", "--spec", spec, "--out", str(out)]) == 0
    report = json.loads((out / "lattice.json").read_text())
    assert report["verdict"] == "QID"
    assert report["winding"] == 0
    for name in ("series.csv", "inverse.csv", "log_masses.csv"):
        lines = (out / name).read_text().splitlines()
        assert lines[0] == "k,re,im"
        assert len(lines) > 2
    first_log = (out / "log_masses.csv").read_text().splitlines()[1]
    k, re, _ = first_log.split(",")
    assert k == "1"
    assert float(re) == pytest.approx(3.0 / 7.0, abs=1e-10)


def test_lattice_subcommand_zero_exit(tmp_path):
    spec = write_spec(tmp_path, "half.json", {
        "atoms": [{"x": 0.0, "p": 0.5}, {"x": 1.0, "p": 0.5}],
        "lattice": {"r": 0.0, "h": 1.0}})
    assert main(["lattice", "--spec", spec, "--out", str(tmp_path)]) == 3


def test_interpolate_path_csv(tmp_path):
    s1 = write_spec(tmp_path, "d0.json", {"atoms": [{"x": 0.0, "p": 1.0}]})
    s2 = write_spec(tmp_path, "d3.json", {"atoms": [{"x": 0.3, "p": 1.0}]})
    out = tmp_path / "out"
    code = main(["interpolate", "--spec", s1, "--spec2", s2,
                 "--out", str(out), "--t-grid", "0:1:0.5"])
    assert code == 0
    lines = (out / "path.csv").read_text().splitlines()
    assert lines[0] == "t,levy_to_mu1,levy_to_mu2,qid_verdict"
    assert len(lines) == 4
    assert lines[1].split(",")[2] == "0.0"
    assert lines[-1].split(",")[1] == "0.0"
    assert (out / "path.json").exists()


def test_sequence_csv(tmp_path):
    limit = write_spec(tmp_path, "limit.json", NORMAL_LAW)
    factor = write_spec(tmp_path, "factor.json", UNIFORM_LAW)
    out = tmp_path / "out"
    code = main(["sequence", "--spec", limit, "--spec2", factor,
                 "--out", str(out), "--n-ladder", "1,2"])
    assert code == 0
    lines = (out / "sequence.csv").read_text().splitlines()
    assert lines[0] == "n,zero_location,levy_to_limit"
    ns = [row.split(",")[0] for row in lines[1:]]
    assert ns == ["1", "2"]
    assert float(lines[1].split(",")[1]) == pytest.approx(np.pi, abs=1e-8)
    assert (out / "sequence.json").exists()


def test_tabulated_density_file_is_inlined(tmp_path):
    xs = np.linspace(-1.0, 1.0, 2001)
    vals = np.maximum(0.0, 1.0 - np.abs(xs))
    rows = "\n".join(f"{float(x)!r},{float(v)!r}" for x, v in zip(xs, vals))
    (tmp_path / "tri.csv").write_text("x,v\n" + rows + "\n")
    spec = write_spec(tmp_path, "tri.json", {
        "ac": {"weight": 1.0, "kind": "tabulated", "file": "tri.csv"}})
    assert main(["zeros", "--spec", spec, "--out", str(tmp_path)]) == 3
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["certificate"]["refined_location"] == pytest.approx(
        2.0 * np.pi, abs=1e-6)


def test_malformed_spec_exits_1(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["zeros", "--spec", str(path), "--out", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_missing_spec_file_exits_1(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert main(["analyze", "--spec", missing, "--out", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_invalid_spec_contents_exit_1(tmp_path, capsys):
    spec = write_spec(tmp_path, "heavy.json",
                      {"atoms": [{"x": 0.0, "p": 2.0}]})
    assert main(["analyze", "--spec", spec, "--out", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_usage_errors_exit_1(tmp_path, capsys):
    s1 = write_spec(tmp_path, "d0.json", {"atoms": [{"x": 0.0, "p": 1.0}]})
    with pytest.raises(SystemExit) as exc:
        main(["interpolate", "--spec", s1, "--out", str(tmp_path)])
    assert exc.value.code == 1
    capsys.readouterr()


def test_bad_t_grid_exits_1(tmp_path, capsys):
    s1 = write_spec(tmp_path, "d0.json", {"atoms": [{"x": 0.0, "p": 1.0}]})
    s2 = write_spec(tmp_path, "d1.json", {"atoms": [{"x": 1.0, "p": 1.0}]})
    code = main(["interpolate", "--spec", s1, "--spec2", s2,
                 "--out", str(tmp_path), "--t-grid", "0:1"])
    assert code == 1
    assert "error:" in capsys.readouterr().err
