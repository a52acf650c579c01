import json

import pytest

from hardy_orlicz.experiments import EXPERIMENTS, rng, run_experiment

FAST = ["lens", "psummming", "blaschke", "counterexample-2", "counterexample-3"]


def test_names():
    assert set(EXPERIMENTS) == {"meme-module", "lens", "psummming", "blaschke", "bergman-zB",
                                "suite-exemple", "counterexample-2", "counterexample-3"}
    with pytest.raises(KeyError):
        run_experiment("nope")


@pytest.mark.parametrize("name", FAST)
def test_fast_experiments_pass(name, tmp_path):
    res = run_experiment(name, out=tmp_path, size=1 << 18)
    assert res.passed, res.verdicts
    assert (tmp_path / "summary.json").exists()
    json.loads((tmp_path / "summary.json").read_text())


@pytest.mark.slow
@pytest.mark.parametrize("name", ["meme-module", "suite-exemple"])
def test_slow_experiments_pass(name, tmp_path):
    res = run_experiment(name, out=tmp_path)
    assert res.passed, res.verdicts


def test_bergman_zb_writes_table(tmp_path):
    res = run_experiment("bergman-zB", out=tmp_path)
    assert any(f.endswith(".csv") for f in res.files)
    assert res.verdicts


def test_rng_is_keyed():
    assert rng(5).random(4).tolist() == rng(5).random(4).tolist()
    assert rng(5).random(4).tolist() != rng(6).random(4).tolist()
