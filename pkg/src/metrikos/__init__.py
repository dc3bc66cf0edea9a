"""Verification and metrization workbench for b-, F- and theta-metric spaces."""

from metrikos.core import (
    DEFAULT_TOL,
    AxiomError,
    BParams,
    DistanceSpace,
    FParams,
    MetrikosError,
    SampledSequence,
    SpaceInputError,
    ThetaParams,
    Verdict,
    Witness,
    check_distance_axioms,
    load_space,
    space_from_dict,
    space_from_points,
)
from metrikos.expr import BinaryFn, ScalarFn, evaluate, parse, pretty_print

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "AxiomError",
    "BParams",
    "BinaryFn",
    "DistanceSpace",
    "FParams",
    "MetrikosError",
    "SampledSequence",
    "ScalarFn",
    "SpaceInputError",
    "ThetaParams",
    "Verdict",
    "Witness",
    "check_distance_axioms",
    "evaluate",
    "load_space",
    "parse",
    "pretty_print",
    "space_from_dict",
    "space_from_points",
]
