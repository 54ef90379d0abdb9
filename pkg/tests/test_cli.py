import json
import subprocess
import sys

import pytest

from freeinterp.cli import main


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def radial(tmp_path):
    p = tmp_path / "radial.json"
    assert run("generate", "radial", "--q", 0.5, "--n", 20, "--out", p) == 0
    return p


def test_generate_radial(tmp_path):
    p = tmp_path / "r.json"
    assert run("generate", "radial", "--q", 0.5, "--n", 3, "--out", p) == 0
    d = json.loads(p.read_text())
    assert [pt["r"] for pt in d["points"]] == [0.5, 0.75, 0.875]


def test_generate_partnered(tmp_path):
    p = tmp_path / "p.json"
    assert run("generate", "partnered", "--eps", "harmonic", "--n", 20, "--out", p) == 0
    d = json.loads(p.read_text())
    assert len(d["points"]) == 40
    assert d["generator_params"]["eps_scale"] <= 1


def test_generate_partnered_fixed_scale_underflows(tmp_path):
    assert run("generate", "partnered", "--eps", "harmonic", "--n", 20, "--eps-scale", 1,
               "--out", tmp_path / "p.json") == 2


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("generate", "random-separated", "--n", 10, "--seed", 3, "--out", a)
    run("generate", "random-separated", "--n", 10, "--seed", 3, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_classify(radial, tmp_path):
    out = tmp_path / "c.json"
    assert run("classify", radial, "--out", out) == 0
    assert json.loads(out.read_text())["verdicts"]["truncation_limited"] is True


def test_certify_propsep(radial, tmp_path):
    out = tmp_path / "cert.json"
    assert run("certify", radial, "--construction", "propsep", "--out", out) == 0
    assert json.loads(out.read_text())["verdict"] is True


def test_certify_staircase_not_radial(tmp_path):
    p = tmp_path / "s.json"
    run("generate", "stolz", "--n", 10, "--out", p)
    assert run("certify", p, "--construction", "staircase", "--out", tmp_path / "x.json") == 2


def test_certify_zero_measure_fails(radial, tmp_path):
    assert run("certify", radial, "--construction", "custom-measure", "--dirac-mass", 0,
               "--out", tmp_path / "x.json") == 1


@pytest.mark.parametrize("construction", ["maximal", "cs", "staircase", "dirac"])
def test_certify_constructions(radial, tmp_path, construction):
    assert run("certify", radial, "--construction", construction, "--grid-size", 1024,
               "--out", tmp_path / "x.json") == 0


def test_bad_config(radial):
    assert run("maximal", radial, "--aperture", 1.0) == 2
    assert run("maximal", radial, "--grid-size", 8) == 2


def test_maximal_outputs(radial, tmp_path):
    csv_path, stats_path = tmp_path / "m.csv", tmp_path / "m.json"
    assert run("maximal", radial, "--grid-size", 512, "--out", csv_path, "--stats", stats_path) == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "theta,M" and len(lines) == 513
    stats = json.loads(stats_path.read_text())
    assert {"sup_t_sigma", "tail"} <= set(stats)


def test_maximal_singleton_zero(tmp_path):
    p = tmp_path / "one.json"
    p.write_text(json.dumps({"label": "one", "points": [{"r": 0.3, "theta": 0.0}], "generator_params": {}}))
    out = tmp_path / "m.csv"
    run("maximal", p, "--grid-size", 64, "--out", out, "--stats", tmp_path / "s.json")
    assert all(float(line.split(",")[1]) == 0 for line in out.read_text().splitlines()[1:])


def test_maximal_grid_convergence(radial, tmp_path):
    sups = []
    for g in (4096, 8192):
        s = tmp_path / f"{g}.json"
        run("maximal", radial, "--grid-size", g, "--out", tmp_path / f"{g}.csv", "--stats", s)
        sups.append(json.loads(s.read_text())["sup_t_sigma"])
    assert abs(sups[1] - sups[0]) / sups[0] < 0.05


def test_corrupted_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"points": [')
    assert run("classify", p) == 2
    assert run("certify", tmp_path / "missing.json", "--construction", "dirac") == 2


def test_orlicz(tmp_path):
    out = tmp_path / "o.json"
    assert run("orlicz", "--out", out) == 0
    d = json.loads(out.read_text())
    assert {"phi_integral", "min_pair_distance", "verdict", "measure"} <= set(d)


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "freeinterp", "generate", "radial", "--n", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["label"] == "radial q=0.5"


def test_report_quick(tmp_path, capsys):
    code = run("report", "--quick", "--out", tmp_path / "rep")
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("[")]
    assert len(lines) == 10
    assert (tmp_path / "rep" / "summary.md").exists()
    results = json.loads((tmp_path / "rep" / "results.json").read_text())
    assert code == (0 if all(r["passed"] for r in results) else 1)
