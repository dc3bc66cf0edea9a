import json

import numpy as np
import pytest

from metrikos.core import (
    AxiomError,
    DistanceSpace,
    SampledSequence,
    SpaceInputError,
    Verdict,
    Witness,
    check_distance_axioms,
    failing,
    fmt_num,
    le,
    load_space,
    lt,
    passing,
    space_from_dict,
    space_from_points,
)

SQ = [[0, 1, 4], [1, 0, 1], [4, 1, 0]]


def test_tolerance_helpers():
    assert lt(1.0, 2.0) and not lt(1.0, 1.0) and not lt(1.0, 1.0 + 1e-12)
    assert le(1.0 + 1e-12, 1.0) and not le(1.1, 1.0)
    # relative scale above 1, absolute below
    assert le(1e6 + 1e-4, 1e6)
    assert le(1e-10, 0.0) and not le(1e-6, 1e-7)


def test_fmt_num():
    assert fmt_num(2.0) == "2" and fmt_num(-3.0) == "-3" and fmt_num(0.5) == "0.5"


def test_verdict_invariants():
    w = Witness("symmetry", ("a", "b"), 1.0, 2.0, "D(x,y) = D(y,x)")
    assert not failing(w) and passing()
    with pytest.raises(ValueError):
        Verdict(True, w)
    with pytest.raises(ValueError):
        Verdict(False, None)
    d = failing(w, margin=0.5).to_dict()
    assert d["pass"] is False and d["witness"]["points"] == ["a", "b"] and d["certificates"]["margin"] == 0.5
    assert passing(heuristic=1).heuristic


def test_space_structure_checks():
    with pytest.raises(SpaceInputError, match="square"):
        DistanceSpace(None, [[0, 1]])
    with pytest.raises(SpaceInputError, match="non-finite"):
        DistanceSpace(None, [[0, np.nan], [np.nan, 0]])
    with pytest.raises(SpaceInputError, match="duplicate label"):
        DistanceSpace(["a", "a"], [[0, 1], [1, 0]])
    with pytest.raises(SpaceInputError, match="labels"):
        DistanceSpace(["a"], [[0, 1], [1, 0]])
    s = DistanceSpace(None, SQ)
    assert s.labels == ("p0", "p1", "p2") and s.dist("p0", "p2") == 4.0
    with pytest.raises(ValueError):
        s.d[0, 1] = 3.0
    with pytest.raises(SpaceInputError, match="unknown label"):
        s.index("zz")


@pytest.mark.parametrize(
    "matrix,kind,points",
    [
        ([[1, 1], [1, 0]], "zero_diagonal", ("p0", "p0")),
        ([[0, 1], [2, 0]], "symmetry", ("p0", "p1")),
        ([[0, 0], [0, 0]], "positivity", ("p0", "p1")),
        ([[0, -1], [-1, 0]], "positivity", ("p0", "p1")),
    ],
)
def test_axiom_witnesses(matrix, kind, points):
    v = check_distance_axioms(DistanceSpace(None, matrix))
    assert not v.passed and v.witness.kind == kind and v.witness.points == points
    with pytest.raises(AxiomError):
        DistanceSpace(None, matrix).validated()


def test_symmetry_tolerance():
    assert check_distance_axioms(DistanceSpace(None, [[0, 1], [1 + 1e-12, 0]])).passed


def test_points_and_loaders(tmp_path):
    s = space_from_points([0, 1, 2], "(x-y)^2")
    assert s.labels == ("0", "1", "2") and s.d.tolist() == SQ
    with pytest.raises(SpaceInputError, match="duplicate point 1"):
        space_from_points([0, 1, 1], "abs(x-y)")
    with pytest.raises(AxiomError):
        space_from_points([0, 1], "x-y")
    assert space_from_dict({"matrix": SQ, "labels": ["a", "b", "c"]}).labels == ("a", "b", "c")
    with pytest.raises(SpaceInputError):
        space_from_dict({"points": [1]})
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"points": [0, 1, 2], "formula": "(x-y)^2"}))
    assert load_space(path) == s


def test_subspace_scaled_roundtrip():
    s = DistanceSpace(["a", "b", "c"], SQ)
    sub = s.subspace([0, 2])
    assert sub.labels == ("a", "c") and sub.d.tolist() == [[0, 4], [4, 0]]
    assert s.scaled(2).d[0, 2] == 8
    assert space_from_dict(s.to_dict()) == s


def test_sampled_sequence():
    assert len(SampledSequence("x", [1, 0.5])) == 2
    with pytest.raises(ValueError, match="n=2"):
        SampledSequence("x", [1, -1])
    with pytest.raises(ValueError, match="empty"):
        SampledSequence("x", [])
