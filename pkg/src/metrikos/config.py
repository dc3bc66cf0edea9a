"""Job configuration: JSON file plus command-line overrides."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from metrikos.core import DEFAULT_TOL, BParams, DistanceSpace, FParams, MetrikosError, ThetaParams, space_from_dict
from metrikos.expr import BinaryFn, ScalarFn

STRUCTURES = ("b", "f", "theta")


class ConfigError(MetrikosError, ValueError):
    pass


@dataclass
class JobConfig:
    structure: str
    space_doc: dict | None = None
    params: dict = field(default_factory=dict)
    checks: list[str] | None = None
    eps: list[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])
    k: list[float] = field(default_factory=lambda: [1.0])
    anchors: list[str] | None = None
    transform: str | None = None
    seed: int | None = None
    trials: int = 100
    tol: float = DEFAULT_TOL
    strict: bool = False
    fuzz: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)

    def space(self) -> DistanceSpace:
        if self.space_doc is None:
            raise ConfigError("no space given (use 'space' in the config or --space)")
        return space_from_dict(self.space_doc, self.tol)

    def structure_params(self) -> BParams | FParams | ThetaParams | None:
        p = self.params
        try:
            if self.structure == "b":
                return BParams(float(p["K"])) if p.get("K") is not None else None
            if self.structure == "f":
                if "f" not in p:
                    raise ConfigError("structure f needs params.f")
                return FParams(ScalarFn.parse(str(p["f"])), float(p.get("alpha", 0.0)))
            if "theta" not in p:
                raise ConfigError("structure theta needs params.theta")
            return ThetaParams(BinaryFn.parse(str(p["theta"])))
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"bad params for structure {self.structure}: {exc}") from exc

    def canonical(self) -> dict:
        """Everything that determines the result, for the input digest."""
        return {
            "structure": self.structure,
            "space": self.space_doc,
            "params": self.params,
            "checks": self.checks,
            "eps": self.eps,
            "k": self.k,
            "anchors": self.anchors,
            "transform": self.transform,
            "seed": self.seed,
            "trials": self.trials,
            "tol": self.tol,
            "strict": self.strict,
            "fuzz": self.fuzz,
            "grids": self.grids,
        }


def _floats(value: Any, name: str) -> list[float]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    if not isinstance(value, (list, tuple)):
        value = [value]
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be numbers: {exc}") from exc
    if not out or any(not math.isfinite(v) or v <= 0 for v in out):
        raise ConfigError(f"{name} must be positive reals, got {value!r}")
    return out


def _read_json(path: Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _space_doc(value: Any, base: Path) -> dict:
    if isinstance(value, str):
        doc = _read_json(base / value)
    else:
        doc = value
    if not isinstance(doc, dict):
        raise ConfigError("space must be an object or a path to a JSON file")
    if "matrix" not in doc and not ("points" in doc and "formula" in doc):
        raise ConfigError("space needs 'matrix' (with optional 'labels') or 'points' and 'formula'")
    return doc


def build_config(doc: dict, overrides: dict, base: Path = Path(".")) -> JobConfig:
    doc = dict(doc)
    params = dict(doc.get("params") or {})
    for key in ("K", "f", "alpha", "theta"):
        if overrides.get(key) is not None:
            params[key] = overrides[key]
    structure = overrides.get("structure") or doc.get("structure")
    if structure not in STRUCTURES:
        raise ConfigError(f"structure must be one of {STRUCTURES}, got {structure!r}")
    space_src = overrides.get("space")
    if space_src is not None:
        space_doc = _space_doc(str(space_src), Path("."))
    elif doc.get("space") is not None:
        space_doc = _space_doc(doc["space"], base)
    else:
        space_doc = None
    cfg = JobConfig(structure=structure, space_doc=space_doc, params=params)
    if doc.get("checks") is not None:
        cfg.checks = [str(c) for c in doc["checks"]]
    for key in ("eps", "k"):
        val = overrides.get(key) if overrides.get(key) is not None else doc.get(key)
        if val is not None:
            setattr(cfg, key, _floats(val, key))
    anchors = overrides.get("anchor") or doc.get("anchors")
    if anchors is not None:
        cfg.anchors = [str(a) for a in (anchors if isinstance(anchors, list) else [anchors])]
    cfg.transform = overrides.get("transform") or doc.get("transform")
    seed = overrides.get("seed") if overrides.get("seed") is not None else doc.get("seed")
    if seed is not None:
        if int(seed) < 0:
            raise ConfigError("seed must be an unsigned integer")
        cfg.seed = int(seed)
    trials = overrides.get("trials") if overrides.get("trials") is not None else doc.get("trials")
    if trials is not None:
        cfg.trials = int(trials)
    tol = overrides.get("tol") if overrides.get("tol") is not None else doc.get("tol")
    if tol is not None:
        cfg.tol = float(tol)
        if not (cfg.tol > 0):
            raise ConfigError("tol must be positive")
    cfg.strict = bool(overrides.get("strict") or doc.get("strict", False))
    cfg.fuzz = dict(doc.get("fuzz") or {})
    cfg.grids = dict(doc.get("grids") or {})
    return cfg


def load_config(path: str | Path | None, overrides: dict) -> JobConfig:
    if path is None:
        return build_config({}, overrides)
    path = Path(path)
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return build_config(doc, overrides, path.parent)
