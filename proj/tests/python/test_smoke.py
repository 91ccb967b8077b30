import os
import subprocess
from itertools import combinations

import pytest

import redhyper


def test_orientation_host_is_quarter_dense():
    h = redhyper.orientation_reduced(5)
    assert h.index_count == 5
    assert all(h.density(*t) == "1/4" for t in h.triples())
    assert redhyper.is_box_dense(h, "1/4") == (True, None)
    dense, witness = redhyper.is_box_dense(h, "1/3")
    assert not dense and witness == (1, 2, 3)


def test_text_round_trip():
    h = redhyper.random_box_dense(4, 2, "1/2", 7)
    assert redhyper.ReducedHypergraph.parse(h.to_text()) == h


def test_search_agrees_with_oracle():
    h = redhyper.random_box_dense(4, 2, "1/2", 3)
    for pattern in ["single_edge", "K4minus", "K4"]:
        r = redhyper.find_reduced_image(h, pattern, count_all=True)
        found, count = redhyper.exhaustive_oracle(h, pattern)
        assert (r["outcome"] == "found") == found
        assert r["count"] == count


def test_orientation_host_has_no_k4minus():
    r = redhyper.find_reduced_image(redhyper.orientation_reduced(5), "K4minus")
    assert r["outcome"] == "not-found"
    assert r["map"] is None


def test_pipeline_on_complete_host():
    h = redhyper.random_box_dense(30, 2, "1", 0)
    r = redhyper.find_fstar(h, "7/10", "1/4")
    assert r["ok"] and r["stage"] is None
    assert len(r["map"]["lambda"]) == 5
    g = redhyper.find_glued(h, "7/10", "1/4")
    assert g["ok"]
    assert len(set(g["indices"])) == 4


def test_pipeline_failure_is_structured():
    r = redhyper.find_fstar(redhyper.orientation_reduced(5), "1/10", "1/20")
    assert not r["ok"]
    assert r["stage"] == "clean"


def test_glue_oracle_counts_ordered_tuples():
    assert redhyper.brute_force_glued(redhyper.random_box_dense(4, 1, "1", 0)) == (True, 24)


def test_audit_and_copies():
    edges = [list(t) for t in combinations(range(1, 7), 3)]
    assert redhyper.uniform_density_audit(6, edges, "1", "0")[0] == "pass"
    assert redhyper.uniform_density_audit(6, [], "1/2", "0") == ("fail", [1, 2, 3, 4, 5, 6])
    k5 = [list(t) for t in combinations(range(1, 6), 3)]
    assert redhyper.count_copies(5, k5, "single_edge") == (60, 10)
    g = redhyper.cyclic_triple_3graph(9, 4)
    assert redhyper.count_copies(9, g, "K4minus")[0] == 0


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        redhyper.ReducedHypergraph.parse("M 3\nbogus\n")
    with pytest.raises(ValueError):
        redhyper.random_box_dense(3, 2, "3/2", 0)
    with pytest.raises(RuntimeError):
        redhyper.exhaustive_oracle(redhyper.orientation_reduced(6), "Fstar", cap=10)


@pytest.mark.skipif("REDHYPER_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_density_exit_code(tmp_path):
    host = tmp_path / "o.rh"
    host.write_text(redhyper.orientation_reduced(4).to_text())
    cli = os.environ["REDHYPER_CLI"]
    ok = subprocess.run([cli, "density", "--host", str(host), "--d", "1/4"], capture_output=True, text=True)
    assert ok.returncode == 0
    assert "outcome=dense" in ok.stdout
    bad = subprocess.run([cli, "density", "--nope"], capture_output=True, text=True)
    assert bad.returncode == 3
