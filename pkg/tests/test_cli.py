import io
import json

import pytest

from eulergibbs.cli import run_cli
from eulergibbs.graphio import format_graph

D_TEXT = "eulergraph 1\nedge e1 0 1\nedge e2 0 1\nedge f 1 0\nsource 0\nsink 1\n"


def run(argv):
    out = io.StringIO()
    code = run_cli(argv, out)
    text = out.getvalue()
    return code, json.loads(text), text


@pytest.fixture
def files(tmp_path):
    d = tmp_path / "d.graph"
    d.write_text(D_TEXT)
    bad = tmp_path / "bad.graph"
    bad.write_text("eulergraph 1\nedge x 0 1\nedge y 0 1\nsource 0\nsink 1\n")
    broken = tmp_path / "broken.graph"
    broken.write_text("eulergraph 1\nedge x 0\nsource 0\n")
    counts = tmp_path / "c.counts"
    counts.write_text("start 0\ncount 0 0 1\ncount 0 1 1\ncount 1 0 1\n")
    seq = tmp_path / "s.seq"
    seq.write_text("0\n1\n0\n1\n")
    return {"d": str(d), "bad": str(bad), "broken": str(broken), "counts": str(counts),
            "seq": str(seq), "dir": tmp_path}


def test_count_euler(files):
    code, doc, _ = run(["count-euler", "--graph", files["d"]])
    assert code == 0 and doc["outputs"]["count"] == "2"
    assert doc["schema_version"] == 1 and doc["command"] == "count-euler"
    assert set(doc["inputs"]) == {"graph"} and len(doc["inputs"]["graph"]["sha256"]) == 64


def test_count_euler_not_eulerian(files):
    code, doc, _ = run(["count-euler", "--graph", files["bad"]])
    assert code == 1 and doc["outputs"]["error_type"] == "NotEulerianInput"
    assert doc["outputs"]["witness"]["vertex"] == 0


@pytest.mark.parametrize("cmd", [["count-euler"], ["enum-euler"], ["sample-euler"],
                                 ["count-arb", "--root", "0"], ["sample-arb", "--root", "0"]])
def test_malformed_graph_gives_line_and_column(files, cmd):
    code, doc, _ = run(cmd + ["--graph", files["broken"]])
    assert code == 1
    assert (doc["outputs"]["line"], doc["outputs"]["column"]) == (2, 9)


def test_enum_and_sample(files):
    code, doc, _ = run(["enum-euler", "--graph", files["d"]])
    assert code == 0 and doc["outputs"]["count"] == "2"
    assert ["0", "e1"] not in doc["outputs"]["paths"]
    assert [0, "e1", 1, "f", 0, "e2", 1] in doc["outputs"]["paths"]
    code, doc, _ = run(["enum-euler", "--graph", files["d"], "--cap", "1"])
    assert code == 1 and doc["outputs"]["error_type"] == "CapExceeded"
    code, doc, _ = run(["sample-euler", "--graph", files["d"], "--samples", "5", "--seed", "3"])
    assert code == 0 and len(doc["outputs"]["samples"]) == 5 and doc["seed"] == 3


def test_arborescence_commands(files):
    code, doc, _ = run(["count-arb", "--graph", files["d"], "--root", "1"])
    assert code == 0 and doc["outputs"]["count"] == "2"
    code, doc, _ = run(["sample-arb", "--graph", files["d"], "--root", "1", "--samples", "4"])
    assert code == 0 and all(s in (["e1"], ["e2"]) for s in doc["outputs"]["samples"])
    code, doc, _ = run(["count-arb", "--graph", files["d"], "--root", "9"])
    assert code == 1


def test_root_unreachable_witness(tmp_path):
    p = tmp_path / "path.graph"
    p.write_text("eulergraph 1\nedge a 0 1\nsource 0\nsink 1\n")
    code, doc, _ = run(["sample-arb", "--graph", str(p), "--root", "0"])
    assert code == 1 and doc["outputs"]["witness"] == {"vertex": 1}


def test_gibbs_prefix():
    code, doc, _ = run(["gibbs-prefix", "--family", "ladder:2,1", "--k", "4",
                        "--horizon", "500", "--seed", "2"])
    out = doc["outputs"]
    assert code == 0 and len(out["path"]) == 9 and out["stack_exhausted"] is False
    code, doc, _ = run(["gibbs-prefix", "--family", "ladder:2,1", "--k", "3",
                        "--horizon", "500", "--samples", "10"])
    assert code == 0 and len(doc["outputs"]["samples"]) == 10
    code, doc, _ = run(["gibbs-prefix", "--family", "ladder:2,2", "--k", "3"])
    assert code == 1 and doc["outputs"]["witness"]["vertex"] == 0
    code, _, _ = run(["gibbs-prefix", "--family", "grid:2,2", "--k", "3"])
    assert code == 1


def test_condition(files):
    code, doc, _ = run(["condition", "--counts", files["counts"], "--samples", "50"])
    assert code == 0 and doc["outputs"]["end"] == 0
    assert {tuple(s) for s in doc["outputs"]["samples"]} <= {(0, 0, 1, 0), (0, 1, 0, 0)}
    code, doc, _ = run(["condition", "--sequence", files["seq"], "--samples", "3"])
    assert code == 0 and doc["outputs"]["samples"] == [[0, 1, 0, 1]] * 3
    assert set(doc["inputs"]) == {"sequence"}


def test_return_prob():
    code, doc, _ = run(["return-prob", "--family", "ladder:1,0", "--samples", "100",
                        "--horizon", "10"])
    assert code == 0 and doc["outputs"]["point_estimate"] == 0.0


def test_verify_exit_codes():
    code, doc, _ = run(["verify", "--suite", "best", "--seed", "1"])
    assert code == 0 and doc["outputs"]["passed"]
    code, _, _ = run(["verify", "--suite", "nope"])
    assert code == 1


def test_verify_failure_exits_2(monkeypatch):
    from eulergibbs import cli
    from eulergibbs.verify import Check, SuiteReport

    monkeypatch.setattr(cli, "run_suite",
                        lambda name, seed, samples: SuiteReport(name, seed, 0,
                                                                [Check("x", False, {})]))
    code, doc, _ = run(["verify", "--suite", "best"])
    assert code == 2 and not doc["outputs"]["passed"]


def test_bad_arguments():
    assert run(["sample-euler", "--graph", "/nonexistent", "--samples", "0"])[0] == 1
    assert run(["count-euler", "--graph", "/nonexistent"])[0] == 1
    assert run([])[0] == 1
    assert run(["count-euler", "--graph", "x", "--seed", "-1"])[0] == 1


def test_family_file_rejected_by_finite_commands(tmp_path):
    p = tmp_path / "fam.graph"
    p.write_text("eulergraph 1\nfamily ladder 2 1\n")
    code, doc, _ = run(["count-euler", "--graph", str(p)])
    assert code == 1


def test_manifests_are_byte_identical(files, tmp_path):
    other = tmp_path / "elsewhere"
    other.mkdir()
    copy = other / "d.graph"
    copy.write_text(D_TEXT)
    argv = ["sample-euler", "--samples", "20", "--seed", "7", "--graph"]
    a = run(argv + [files["d"]])[2]
    b = run(argv + [str(copy)])[2]
    assert a == b
    v1 = run(["verify", "--suite", "pex", "--seed", "4", "--samples", "3000"])[2]
    v2 = run(["verify", "--suite", "pex", "--seed", "4", "--samples", "3000"])[2]
    assert v1 == v2


def test_graph_file_from_format(graphs, tmp_path):
    p = tmp_path / "k4.graph"
    p.write_text(format_graph(graphs["K4"]))
    assert run(["count-euler", "--graph", str(p)])[1]["outputs"]["count"] == "768"


def test_module_entry_point(files):
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "eulergibbs", "count-euler", "--graph",
                        files["d"]], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["outputs"]["count"] == "2"
