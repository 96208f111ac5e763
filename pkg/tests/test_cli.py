"""Command-line interface: reports, exit codes, determinism, caching."""

import json

import pytest

from buildinglab.cli import main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_ball_command(capsys):
    code, out = run(["ball", "--d", "3", "--p", "2", "--r", "1"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["result"]["vertices"] == 15
    assert rep["result"]["degree_check"] == {"expected": 14, "pass": True}
    assert rep["tool"]["name"] == "buildinglab"
    assert rep["config"]["d"] == 3


def test_ball_exports_edges(tmp_path, capsys):
    prefix = str(tmp_path / "out")
    code, _ = run(["ball", "--d", "2", "--p", "2", "--r", "2", "--out", prefix], capsys)
    assert code == 0
    assert (tmp_path / "out.json").exists()
    edges = (tmp_path / "out.edges").read_text().strip().splitlines()
    assert len(edges) == 9  # tree: 3 + 6 edges


def test_link_command(capsys):
    code, out = run(["link", "--d", "3", "--p", "2"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["result"]["vertices"] == 14
    assert rep["result"]["chambers"] == 21


def test_flags_command(capsys):
    code, out = run(["flags", "--n", "3", "--q", "2"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["result"]["vertices"] == rep["result"]["vertices_expected"] == 14


def test_roots_command(capsys):
    code, out = run(["roots", "--n", "3", "--q", "2"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["result"]["all_passed"] is True
    assert len(rep["result"]["roots"]) == 6
    assert all(r["order"] == 2 for r in rep["result"]["roots"])


def test_quotient_command(capsys):
    code, out = run(["quotient", "--d", "2", "--p", "2", "--g", "1,1,1"], capsys)
    assert code == 0
    rep = json.loads(out)["result"]
    assert rep["order"] == 60
    assert rep["covering"]["passed"] is True
    assert rep["systole"] == 4


def test_spectrum_command(tmp_path, capsys):
    csv = str(tmp_path / "eigs.csv")
    svg = str(tmp_path / "eigs.svg")
    code, out = run(["spectrum", "--d", "2", "--p", "2", "--g", "1,1,1",
                     "--ramanujan", "--csv", csv, "--svg", svg], capsys)
    rep = json.loads(out)
    assert rep["result"]["degree"] == 3.0
    assert (tmp_path / "eigs.csv").read_text().startswith("eigenvalue,multiplicity,trivial")
    assert (tmp_path / "eigs.svg").read_text().startswith("<svg")
    assert code in (0, 2)  # verdict-dependent


def test_cheeger_and_systole_commands(tmp_path, capsys):
    edges = tmp_path / "c6.edges"
    edges.write_text("".join(f"{i} {(i + 1) % 6} 0\n" for i in range(6)))
    code, out = run(["cheeger", "--input", str(edges)], capsys)
    assert code == 0
    assert json.loads(out)["result"]["exact"] == pytest.approx(2 / 3)
    code, out = run(["systole", "--input", str(edges)], capsys)
    assert code == 0
    assert json.loads(out)["result"]["systole"] == 6


def test_qi_check_command_exit_codes(tmp_path, capsys):
    x = tmp_path / "x.edges"
    x.write_text("".join(f"{i} {i + 1} 0\n" for i in range(3)))
    m_good = tmp_path / "good.map"
    m_good.write_text("[0, 1, 2, 3]")
    m_bad = tmp_path / "bad.map"
    m_bad.write_text("[0, 0, 0, 0]")
    code, out = run(["qi-check", "--x", str(x), "--y", str(x), "--map", str(m_good),
                     "--L", "1", "--C", "0"], capsys)
    assert code == 0 and json.loads(out)["result"]["valid"] is True
    code, out = run(["qi-check", "--x", str(x), "--y", str(x), "--map", str(m_bad),
                     "--L", "1", "--C", "0"], capsys)
    assert code == 2 and json.loads(out)["result"]["valid"] is False


def test_distortion_command(tmp_path, capsys):
    xs = tmp_path / "star.edges"
    xs.write_text("".join(f"0 {i} 0\n" for i in range(1, 30)))
    ys = tmp_path / "path.edges"
    ys.write_text("".join(f"{i} {i + 1} 0\n" for i in range(29)))
    code, out = run(["distortion", "--x", str(xs), "--y", str(ys), "--cmax", "0"], capsys)
    assert code == 0
    rep = json.loads(out)["result"]
    assert rep["grid_exhausted"] or rep["L_min"] > 1.0


def test_skeleton_lemma_command(capsys):
    code, out = run(["skeleton-lemma", "--d", "2", "--p", "2", "--r", "2"], capsys)
    assert code == 0
    assert json.loads(out)["result"]["passed"] is True


def test_growth_command(tmp_path, capsys):
    csv = str(tmp_path / "g.csv")
    code, out = run(["growth", "--d", "2", "--p", "3", "--R", "3", "--csv", csv], capsys)
    assert code == 0
    assert json.loads(out)["result"]["sizes"] == [1, 5, 17, 53]
    assert (tmp_path / "g.csv").read_text().splitlines()[1] == "0,1"


def test_usage_errors(capsys):
    assert main(["frobnicate"]) == 1
    assert main([]) == 1
    assert main(["quotient", "--d", "2", "--p", "2", "--g", "1,x"]) == 1
    capsys.readouterr()


def test_capacity_exit_code(capsys):
    code = main(["ball", "--d", "3", "--p", "2", "--r", "3", "--vertex-cap", "10"])
    assert code == 3
    capsys.readouterr()


def test_determinism_byte_identical(capsys):
    args = ["quotient", "--d", "2", "--p", "2", "--g", "1,1,1"]
    _, out1 = run(args, capsys)
    _, out2 = run(args, capsys)
    assert out1 == out2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("d = 3\np = 2\nr = 1\nverify_degree = true\n")
    code, out = run(["ball", "--config", str(cfg)], capsys)
    assert code == 0
    assert json.loads(out)["result"]["vertices"] == 15


def test_cache_dir_roundtrip(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BF_CACHE_DIR", str(tmp_path / "cache"))
    args = ["ball", "--d", "2", "--p", "2", "--r", "2"]
    _, out1 = run(args, capsys)
    cache_files = list((tmp_path / "cache").glob("ball-*.json"))
    assert len(cache_files) == 1
    _, out2 = run(args, capsys)  # served from cache
    assert out1 == out2


def test_experiment_config_roundtrip(tmp_path, capsys):
    from buildinglab.cli import ExperimentConfig

    cfg = ExperimentConfig("growth", {"d": 2, "p": 3, "R": 3})
    path = tmp_path / "replay.cfg"
    path.write_text(cfg.to_file_text())
    loaded = ExperimentConfig.from_file("growth", path)
    assert loaded.parameters == {"R": "3", "d": "2", "p": "3"}
    code, out = run(["growth", "--config", str(path)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["config"]["d"] == 2 and rep["result"]["sizes"] == [1, 5, 17, 53]
