import math

import pytest

import biaslens


def test_stems():
    assert biaslens.porter_stem("caresses") == "caress"
    assert biaslens.porter_stem("divorced") == "divorc"
    assert biaslens.tokenize("Her husband divorced", "en") == ["her", "husband", "divorc"]


def test_chi_square():
    r = biaslens.chi_square_2x2(10, 20, 20, 10)
    assert r["statistic"] == pytest.approx(20 / 3)
    assert r["p_value"] == pytest.approx(0.0098, abs=1e-4)
    with pytest.raises(ValueError):
        biaslens.chi_square_2x2(0, 0, 5, 5)


def test_gamma():
    assert biaslens.gamma_p(2.0, 1.0) == pytest.approx(1 - 2 / math.e, rel=1e-12)


def test_kcore_cycle():
    cores = biaslens.in_kcore([("a", "b"), ("b", "c"), ("c", "a")])
    assert cores == {"a": 1, "b": 1, "c": 1}


def test_solve_mixing_hits_targets():
    e = biaslens.solve_mixing(0.2, 0.3, 0.5)
    assert sum(map(sum, e)) == pytest.approx(1.0)
    assert e[0][0] + e[0][1] == pytest.approx(0.2)


def test_synth_and_analyze(tmp_path):
    biaslens.synth(str(tmp_path), n_minority=200, n_majority=800, assortativity=0.3,
                   asymmetry=0.5, seed=3)
    report = biaslens.analyze(tmp_path, null_runs=100, seed=7)
    assert report["structural"]["en"]["state"] == "populated"
    assert report["lexical"]["en"]["state"] == "populated"
    assert report["cross_lingual"]["state"] == "skipped"
    again = biaslens.analyze(tmp_path, null_runs=100, seed=7)
    assert again == report
