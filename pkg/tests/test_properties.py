import json
import random

from bcl import properties
from bcl.properties import CHECKS, random_measure, run_case, run_property_suite


def test_suite_passes_on_seeded_cases():
    rep = run_property_suite(seed=3, cases=40, max_atoms=16)
    assert rep.passed
    assert set(rep.checks) == set(CHECKS)
    assert all(c["failures"] == 0 for c in rep.checks.values())


def test_case_is_reproducible():
    assert json.dumps(run_case(5, 11), default=str) == json.dumps(run_case(5, 11), default=str)


def test_measures_stay_in_bounds():
    rng = random.Random(0)
    for _ in range(50):
        mu = random_measure(rng, 64)
        assert 1 <= len(mu) <= 64
        assert all(-4 <= a <= 4 for a in mu.atoms)


def test_halving_anchor_is_reported():
    out = run_case(1, 0)["e"]
    assert out["anchor"] in ("upper", "lower") and out["ok"]


def test_failures_write_witness_files(tmp_path, monkeypatch):
    real = properties.run_case

    def broken(seed, case, max_atoms=32, prec=128):
        res = real(seed, case, max_atoms, prec)
        res["a"]["ok"] = False
        return res

    monkeypatch.setattr(properties, "run_case", broken)
    rep = run_property_suite(seed=2, cases=2, max_atoms=8, witness_dir=tmp_path)
    assert not rep.passed and rep.checks["a"]["failures"] == 2
    for f in rep.failures:
        assert f["check_id"] == "a"
        assert json.loads(open(f["witness_file"]).read())["ok"] is False
