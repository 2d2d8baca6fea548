import json
import subprocess
import sys

import pytest

from expforge import cli
from expforge.gadget import CERTIFICATE_SCHEMA
from expforge.graph import parse_complex, parse_graph, validate_biregular
from expforge.base import cyclic_group, parse_generators, parse_group, write_group


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


@pytest.fixture
def gadget4(tmp_path, capsys):
    """A certified (4,4,2,2) gadget for the complete:3:2 base, D = 4."""
    code, rec, _ = run(capsys, "gadget-search", "--DL", 4, "--DR", 4, "--dL", 2, "--dR", 2,
                       "--out", tmp_path / "cert.json", "--gadget-out", tmp_path / "g.bgf")
    assert code == 0 and rec["pass"]
    return tmp_path


# construction commands -------------------------------------------------------------

def test_building_line_plane_graph(tmp_path, capsys):
    code, rec, _ = run(capsys, "building", "--k", 3, "--q", 2, "--i", 1, "--j", 2, "--out", tmp_path / "b.bgf")
    assert code == 0 and rec["schema"] == "certify/v1"
    g = parse_graph((tmp_path / "b.bgf").read_bytes())
    assert (g.n_left, g.n_right, g.m) == (7, 7, 21)
    assert validate_biregular(g, 3, 3).ok


def test_building_flag_complex(tmp_path, capsys):
    code, rec, _ = run(capsys, "building", "--k", 3, "--q", 2, "--out", tmp_path / "f.cxf")
    assert code == 0 and rec["object"] == "flag-complex"
    c = parse_complex((tmp_path / "f.cxf").read_bytes())
    assert (c.k, c.n, len(c.faces)) == (2, 14, 21)


def test_cayley_incidence_truncate(tmp_path, capsys):
    code, rec, _ = run(capsys, "cayley", "--preset", "complete:3:2", "--out", tmp_path / "c.cxf")
    assert code == 0
    c = parse_complex((tmp_path / "c.cxf").read_bytes())
    assert len(c.faces) == 8
    code, rec, _ = run(capsys, "incidence", "--complex", tmp_path / "c.cxf", "--out", tmp_path / "i.bgf",
                       "--structured-out", tmp_path / "i.json")
    assert code == 0
    g = parse_graph((tmp_path / "i.bgf").read_bytes())
    assert (g.n_left, g.n_right) == (8, 6)
    assert json.loads((tmp_path / "i.json").read_text())["k"] == 3
    code, rec, _ = run(capsys, "truncate", "--preset", "window:3:4", "--degree", 1, "--out", tmp_path / "t.json",
                       "--complex-out", tmp_path / "t.cxf")
    assert code == 0 and rec["vertex_degrees_ok"]
    sel = json.loads((tmp_path / "t.json").read_text())["face_generators"]
    assert len(sel) == 1
    assert set(parse_complex((tmp_path / "t.cxf").read_bytes()).vertex_degrees().tolist()) == {1}


def test_cayley_from_files(tmp_path, capsys):
    (tmp_path / "z6.gtf").write_bytes(write_group(cyclic_group(6)))
    (tmp_path / "z6.gens").write_text("gens 1\n1 5\n")
    code, rec, err = run(capsys, "cayley", "--group", tmp_path / "z6.gtf", "--gens", tmp_path / "z6.gens",
                         "--out", tmp_path / "c.cxf")
    assert code == 0, err
    assert parse_complex((tmp_path / "c.cxf").read_bytes()).k == 2
    assert parse_group((tmp_path / "z6.gtf").read_bytes()).order == 6
    assert parse_generators((tmp_path / "z6.gens").read_bytes()) == [[1, 5]]


# gadgets and products --------------------------------------------------------------

def test_gadget_search_and_replay(gadget4, capsys):
    cert = json.loads((gadget4 / "cert.json").read_text())
    assert cert["schema"] == CERTIFICATE_SCHEMA
    code, rec, _ = run(capsys, "gadget-search", "--replay", gadget4 / "cert.json")
    assert code == 0 and rec["match"]


def test_tampered_replay_exits_one(gadget4, capsys):
    cert = json.loads((gadget4 / "cert.json").read_text())
    cert["checks"]["H"]["lossless"]["judged_min_ratio"] = 0.25
    (gadget4 / "bad.json").write_text(json.dumps(cert))
    code, rec, err = run(capsys, "gadget-search", "--replay", gadget4 / "bad.json")
    assert code == 1 and "check failed" in err and rec["failures"]


def test_failed_search_is_reported(tmp_path, capsys):
    code, rec, _ = run(capsys, "gadget-search", "--DL", 2, "--DR", 1, "--dL", 2, "--dR", 4,
                       "--shrink", 0.9, "--max-tries", 2, "--multigraph")
    assert code == 0 and rec["pass"] is False and len(rec["tries"]) == 2


def test_line_product_and_certify_une(gadget4, capsys):
    d = gadget4
    code, rec, err = run(capsys, "line-product", "--preset", "complete:3:2", "--certificate", d / "cert.json",
                         "--out", d / "z.bgf", "--seed-set", "0,3", "--check-size-cap", 2)
    assert code == 0, err
    z = parse_graph((d / "z.bgf").read_bytes())
    assert validate_biregular(z, 6, 6).ok and z.m == 6 * 4 * 2
    assert rec["collisions"]["blue_unique_equals_un"]
    code, rec, _ = run(capsys, "certify-une", "--graph", d / "z.bgf", "--size-cap", 2, "--out-dir", d / "une")
    assert code == 0 and len(rec["profile"]) == 2
    assert (d / "une" / "une_left.csv").exists() and (d / "une" / "une_left.png").stat().st_size > 0


# certification commands ------------------------------------------------------------

def test_certify_commands(tmp_path, capsys):
    run(capsys, "building", "--k", 3, "--q", 2, "--i", 1, "--j", 2, "--out", tmp_path / "b.bgf")
    code, rec, _ = run(capsys, "certify-triangles", "--preset", "complete:3:2", "--U", "0,1,2,3,4,5",
                       "--size-cap", 3)
    assert code == 0 and rec["count"]["faces_with_triangle"] == 8
    code, rec, _ = run(capsys, "certify-skeleton", "--preset", "complete:3:2", "--sets", 10,
                       "--out-dir", tmp_path / "sk")
    assert code == 0 and (tmp_path / "sk" / "skeleton_sets.csv").exists()
    code, rec, _ = run(capsys, "eml", "--graph", tmp_path / "b.bgf", "--pairs", 50)
    assert code == 0 and rec["contained"] == rec["pairs"] == 50
    code, rec, _ = run(capsys, "orient", "--graph", tmp_path / "b.bgf", "--arcs-out", tmp_path / "arcs.txt")
    assert code == 0 and rec["orientation"]["pass"] and rec["degree_product"]["pass"]
    assert (tmp_path / "arcs.txt").read_text().strip()


def test_validate_params_modes(capsys):
    code, rec, _ = run(capsys, "validate-params", "--k", 6, "--exponents", "--D-exp", 15, "--tau-exp", "21/2",
                       "--lambda-exp", "9/2", "--s-min-exp", 4, "--s-max-exp", 6)
    assert code == 0 and rec["window"] == ["9/2", "9/2"] and rec["window_empty"]
    code, rec, _ = run(capsys, "validate-params", "--k", 3, "--q", 2, "--dL", 4, "--dR", 4, "--D", 100,
                       "--tau", 1, "--lambda", 1, "--s-min", 1, "--s-max", 4, "--delta", 0)
    assert code == 0 and rec["pass"] is False


# exit codes ------------------------------------------------------------------------

def test_usage_errors_name_the_flag(tmp_path, capsys):
    code, _, err = run(capsys, "building", "--k", 3, "--q", 2, "--bogus", 1, "--out", tmp_path / "x")
    assert code == 2 and "--bogus" in err
    code, _, err = run(capsys, "truncate", "--preset", "window:3:4", "--degree", 3, "--out", tmp_path / "x")
    assert code == 2 and "--degree" in err
    code, _, err = run(capsys, "certify-une", "--graph", tmp_path / "missing.bgf")
    assert code == 2 and "--graph" in err
    code, _, err = run(capsys, "cayley", "--preset", "nonsense:3:2", "--out", tmp_path / "x")
    assert code == 2 and "--preset" in err
    code, _, err = run(capsys, "orient")
    assert code == 2 and "--graph" in err
    (tmp_path / "bad.bgf").write_text("bgf1 2 3 2\n0 5\n")
    code, _, err = run(capsys, "certify-une", "--graph", tmp_path / "bad.bgf")
    assert code == 2 and "line 2" in err


def test_asserted_failure_exits_one(tmp_path, capsys, monkeypatch):
    run(capsys, "building", "--k", 3, "--q", 2, "--i", 1, "--j", 2, "--out", tmp_path / "b.bgf")
    monkeypatch.setattr(cli, "degree_product_check", lambda g, seed=0: {"pass": False, "lhs": 1, "lambda_sq": 0})
    code, rec, err = run(capsys, "orient", "--graph", tmp_path / "b.bgf")
    assert code == 1 and "check failed" in err


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("EXPFORGE_WORKERS", "3")
    assert cli.default_workers() == 3
    monkeypatch.delenv("EXPFORGE_WORKERS")
    assert cli.default_workers() == 1


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "expforge", "validate-params", "--k", "5", "--exponents",
                        "--D-exp", "10", "--tau-exp", "13/2", "--lambda-exp", "3", "--s-min-exp", "4",
                        "--s-max-exp", "6", "--d-exp", "13/4"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["satisfiable"]
    r = subprocess.run([sys.executable, "-m", "expforge", "nope"], capture_output=True, text=True)
    assert r.returncode == 2


# pipeline --------------------------------------------------------------------------

CONFIG = {"seed": 7, "base": {"source": "cayley", "preset": "complete:3:2"},
          "certify": {"une_size_cap": 3, "skeleton_sets": 20, "eml_pairs": 50}}


def _pipeline(tmp_path, capsys, name, cfg=CONFIG):
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    code, rec, err = run(capsys, "pipeline", "--config", tmp_path / "cfg.json", "--out-dir", tmp_path / name)
    assert code == 0, err
    return json.loads((tmp_path / name / "report.json").read_text())


def test_pipeline_is_deterministic(tmp_path, capsys):
    a = _pipeline(tmp_path, capsys, "a")
    b = _pipeline(tmp_path, capsys, "b")
    assert a["schema"] == "certify/v1"
    assert cli.dumps(a["body"]) == cli.dumps(b["body"])
    assert a["body_sha256"] == b["body_sha256"] == cli._sha(cli.dumps(a["body"]).encode())
    assert not a["body"]["failures"]


def test_pipeline_artifacts_exist_and_parse(tmp_path, capsys):
    rep = _pipeline(tmp_path, capsys, "run")
    out = tmp_path / "run"
    for art in rep["body"]["artifacts"]:
        p = out / art["path"]
        assert p.exists() and p.stat().st_size > 0
        if art["sha256"]:
            assert cli._sha(p.read_bytes()) == art["sha256"]
        if p.suffix == ".bgf":
            parse_graph(p.read_bytes())
        elif p.suffix == ".cxf":
            parse_complex(p.read_bytes())
        elif p.suffix == ".json":
            json.loads(p.read_text())
        elif p.suffix == ".png":
            assert p.read_bytes()[:4] == b"\x89PNG"
    names = {a["path"] for a in rep["body"]["artifacts"]}
    assert {"z.bgf", "une_left.csv", "une_left.png", "collisions_left.json", "gadget.bgf"} <= names


def test_pipeline_config_errors(tmp_path, capsys):
    (tmp_path / "c.json").write_text(json.dumps({"base": {"source": "cayley", "preset": "complete:3:2"}}))
    code, _, err = run(capsys, "pipeline", "--config", tmp_path / "c.json", "--out-dir", tmp_path / "o")
    assert code == 2 and "--config" in err and "seed" in err
    (tmp_path / "c.json").write_text(json.dumps({**CONFIG, "extra": 1}))
    code, _, err = run(capsys, "pipeline", "--config", tmp_path / "c.json", "--out-dir", tmp_path / "o")
    assert code == 2 and "extra" in err
