import math

import numpy as np
import pytest

from metrikos.axioms import check_f_metric
from metrikos.core import BParams, DistanceSpace, FParams, check_distance_axioms
from metrikos.expr import f_preset
from metrikos.fuzz import run_fuzz, shrink, structure_checker
from metrikos.generators import generate
from metrikos.replay import replay_witness, reproduces

LN0 = FParams(f_preset("ln"), 0.0)
FAM = {"family": "euclidean_squared", "points": 6}


def test_euclidean_is_b_metric_with_one():
    trials = run_fuzz("b", BParams(1.0), {"family": "euclidean", "points": 6}, seed=1, trials=100)
    assert all(t.passed for t in trials)


def test_squared_is_b_metric_with_two():
    assert all(t.passed for t in run_fuzz("b", BParams(2.0), FAM, seed=2, trials=100))


def test_ln_zero_alpha_violations_shrink_to_three_points():
    trials = run_fuzz("f", LN0, FAM, seed=3, trials=100)
    bad = [t for t in trials if not t.passed]
    assert bad
    for t in bad:
        space = DistanceSpace(t.shrunk_space["labels"], t.shrunk_space["matrix"])
        assert len(space) == 3
        assert check_distance_axioms(space).passed
        v = check_f_metric(space, LN0)
        assert not v.passed and v.witness.to_dict() == t.witness
        lhs, rhs, violated = replay_witness(v.witness, space, f=LN0.f, alpha=0.0)
        assert violated and reproduces(v.witness, lhs, rhs)


def test_fuzz_is_deterministic_across_worker_counts():
    a = [t.to_dict() for t in run_fuzz("f", LN0, FAM, seed=9, trials=20, workers=1)]
    b = [t.to_dict() for t in run_fuzz("f", LN0, FAM, seed=9, trials=20, workers=4)]
    assert a == b
    assert [t["seed"] for t in a] == list(range(9, 29))


def test_shrink_rounds_values():
    space = generate("euclidean_squared", np.random.default_rng(0), 8)
    check = structure_checker("f", LN0)
    small = shrink(space, check)
    assert len(small) == 3 and not check(small).passed
    for v in small.d[np.triu_indices(3, 1)]:
        assert round(v, 6) == v


def test_generators_and_errors():
    rng = np.random.default_rng(0)
    s = generate("formula", rng, 5, formula="abs(x-y)^0.5")
    assert check_distance_axioms(s).passed and s.labels[0] == "p0"
    m = generate("random_matrix", rng, 6)
    assert np.array_equal(m.d, m.d.T) and (m.d[~np.eye(6, dtype=bool)] > 0).all()
    with pytest.raises(ValueError, match="unknown family"):
        generate("nope", rng, 3)
    with pytest.raises(ValueError, match="formula"):
        generate("formula", rng, 3)
    with pytest.raises(ValueError):
        run_fuzz("f", LN0, FAM, seed=0, trials=0)
    with pytest.raises(ValueError):
        structure_checker("q", None)


def test_replay_rejects_tolerance_only_witness():
    from metrikos.core import Witness

    space = DistanceSpace(None, [[0, 1, 2 + 1e-12], [1, 0, 1], [2 + 1e-12, 1, 0]])
    w = Witness("b_triangle", ("p0", "p1", "p2"), 2 + 1e-12, 2.0, "D(x,z) <= K*(D(x,y) + D(y,z))")
    lhs, rhs, violated = replay_witness(w, space, K=1.0)
    assert violated and lhs > rhs
    w2 = Witness("b_triangle", ("p0", "p1", "p2"), 2.0, 2.0, "")
    assert not replay_witness(w2, DistanceSpace(None, [[0, 1, 2], [1, 0, 1], [2, 1, 0]]), K=1.0)[2]
    assert not reproduces(w, 1.0, 2.0)
    assert math.isfinite(lhs)
