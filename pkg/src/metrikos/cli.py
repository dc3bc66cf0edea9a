"""Command-line front end: ``validate``, ``regularity``, ``metrize``, ``fuzz``.

Exit codes: 0 pass, 1 mathematical failure (with witness), 2 input or
configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from typing import Callable

from metrikos import __version__
from metrikos.axioms import (
    check_b,
    check_b_action,
    check_f1_monotone,
    check_f2_limit,
    check_f_metric,
    check_metric,
    check_theta_metric,
    min_b_constant,
)
from metrikos.config import ConfigError, JobConfig, load_config
from metrikos.core import BParams, DistanceSpace, MetrikosError, Verdict, check_distance_axioms
from metrikos.expr import DomainError, ParseError
from metrikos.fuzz import run_fuzz
from metrikos.grids import GeometricGrid, b_action_grid, log_grid
from metrikos.metrize import WeightTransform, chain_metric, check_f_sandwich, distortion_report, snowflake_exponent
from metrikos.regularity import (
    CertificateNotFound,
    cross_check_conditions,
    delta_theta_at_origin,
    phi_from_f,
    r_for_b,
    r_from_f,
    replay_phi,
    uniform_phi,
    verify_iiiC,
)

SCHEMA = "metrikos-report/1"
EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k != "timing_ms"}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


class Report:
    def __init__(self, command: str, cfg: JobConfig):
        self.cfg = cfg
        self.doc: dict = {
            "schema": SCHEMA,
            "tool": {"name": "metrikos", "version": __version__},
            "command": command,
            "input_digest": hashlib.sha256(canonical_json(cfg.canonical()).encode()).hexdigest(),
            "structure": cfg.structure,
            "strict": cfg.strict,
            "checks": [],
            "heuristic_checks": [],
            "certificates": [],
        }

    def run(self, name: str, fn: Callable[[], Verdict], heuristic: bool = False) -> Verdict:
        start = time.perf_counter()
        verdict = fn()
        elapsed = (time.perf_counter() - start) * 1000.0
        entry = {"name": name, "verdict": verdict.to_dict(), "timing_ms": round(elapsed, 3)}
        self.doc["heuristic_checks" if heuristic else "checks"].append(entry)
        return verdict

    def wanted(self, name: str) -> bool:
        return self.cfg.checks is None or name in self.cfg.checks

    def certificate(self, cert, replays: list[Verdict]) -> bool:
        ok = all(v.passed for v in replays)
        failed = [v.to_dict() for v in replays if not v.passed]
        entry = {"certificate": cert.to_dict(), "replays": len(replays), "replay_pass": ok}
        if failed:
            entry["replay_failure"] = failed[0]
        self.doc["certificates"].append(entry)
        return ok

    def finish(self, extra_ok: bool = True) -> int:
        hard = all(c["verdict"]["pass"] for c in self.doc["checks"])
        soft = all(c["verdict"]["pass"] for c in self.doc["heuristic_checks"])
        overall = hard and extra_ok and (soft or not self.cfg.strict)
        self.doc["overall_pass"] = overall
        body = {k: v for k, v in self.doc.items() if k != "report_digest"}
        self.doc["report_digest"] = hashlib.sha256(canonical_json(_strip_timing(body)).encode()).hexdigest()
        return EXIT_PASS if overall else EXIT_FAIL

    def dumps(self) -> str:
        return json.dumps(self.doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


# -- commands -------------------------------------------------------------------


def _validate(rep: Report, cfg: JobConfig, space: DistanceSpace) -> bool:
    tol = cfg.tol
    if not rep.run("distance_axioms", lambda: check_distance_axioms(space, tol)).passed:
        return False
    params = cfg.structure_params()
    ok = True
    if cfg.structure == "b":
        k_min = min_b_constant(space)
        rep.doc["K_min"] = k_min
        K = params.K if params is not None else k_min
        if rep.wanted("b_triangle"):
            ok &= rep.run("b_triangle", lambda: check_b(space, K, tol)).passed
    elif cfg.structure == "f":
        g = cfg.grids.get("f1", {})
        grid = log_grid(g.get("lo", 1e-6), g.get("hi", 1e3), g.get("per_decade", 20))
        if rep.wanted("f1_monotone"):
            ok &= rep.run("f1_monotone", lambda: check_f1_monotone(params.f, grid, tol)).passed
        if rep.wanted("f2_limit"):
            f2 = cfg.grids.get("f2", {})
            rep.run(
                "f2_limit",
                lambda: check_f2_limit(params.f, f2.get("t0", 1.0), f2.get("q", 0.1), f2.get("M", 3), tol=tol),
                heuristic=True,
            )
        if rep.wanted("f_chain"):
            ok &= rep.run("f_chain", lambda: check_f_metric(space, params, tol)).passed
    else:
        grid = b_action_grid(int(cfg.grids.get("b_action_refine", 0)))
        if rep.wanted("b_action"):
            ok &= rep.run("b_action", lambda: check_b_action(params, grid, tol, ("i", "ii", "iv"))).passed
        if rep.wanted("b_action_iii"):
            rep.run("b_action_iii", lambda: check_b_action(params, grid, tol, ("iii",)), heuristic=True)
        if rep.wanted("theta_triangle"):
            ok &= rep.run("theta_triangle", lambda: check_theta_metric(space, params, tol)).passed
    return ok


def cmd_validate(cfg: JobConfig) -> tuple[Report, int]:
    rep = Report("validate", cfg)
    _validate(rep, cfg, cfg.space())
    return rep, rep.finish()


def _function_grid(cfg: JobConfig) -> GeometricGrid:
    g = cfg.grids.get("function", {})
    return GeometricGrid(g.get("lo", 2.0**-20), g.get("hi", 2.0**10), g.get("resolution", 2.0**-20))


def cmd_regularity(cfg: JobConfig) -> tuple[Report, int]:
    rep = Report("regularity", cfg)
    space = cfg.space()
    if not _validate(rep, cfg, space):
        rep.doc["gated"] = "validation failed; no certificates issued"
        return rep, rep.finish()
    tol = cfg.tol
    anchors = cfg.anchors or list(space.labels)
    for a in anchors:
        space.index(a)
    params = cfg.structure_params()
    grid = _function_grid(cfg)
    ok = True

    def iiiC_replays(r: float, k: float) -> list[Verdict]:
        return [verify_iiiC(space, a, k, r, tol) for a in anchors]

    try:
        if cfg.structure == "b":
            K = params.K if params is not None else min_b_constant(space)
            for k in cfg.k:
                cert = r_for_b(K, k)
                ok &= rep.certificate(cert, iiiC_replays(cert.value, k))
        elif cfg.structure == "f":
            for eps in cfg.eps:
                cert = phi_from_f(params, eps, grid, tol)
                ok &= rep.certificate(cert, [replay_phi(space, cert.value, eps, None, tol)])
            for k in cfg.k:
                cert = r_from_f(params, k, grid, tol)
                ok &= rep.certificate(cert, iiiC_replays(cert.value, k))
        else:
            for k in cfg.k:
                cert = delta_theta_at_origin(params, k, grid, tol)
                ok &= rep.certificate(cert, iiiC_replays(cert.value, k))
    except CertificateNotFound as exc:
        rep.doc["search_failure"] = {"message": str(exc), "trace": exc.trace}
        ok = False
    for eps in cfg.eps:
        cert = uniform_phi(space, eps, tol)
        if cert is None:
            ok = False
            continue
        ok &= rep.certificate(cert, [replay_phi(space, cert.value, eps, None, tol)])
    rep.run("cross_check", lambda: cross_check_conditions(space, cfg.eps, tol))
    return rep, rep.finish(ok)


def cmd_metrize(cfg: JobConfig) -> tuple[Report, int]:
    rep = Report("metrize", cfg)
    space = cfg.space()
    if not _validate(rep, cfg, space):
        rep.doc["gated"] = "validation failed; no metric constructed"
        return rep, rep.finish()
    tol = cfg.tol
    b_params = None
    if cfg.transform:
        transform = WeightTransform.parse(cfg.transform)
    elif cfg.structure == "b":
        k_min = min_b_constant(space)
        b_params = BParams(k_min)
        transform = WeightTransform.power(snowflake_exponent(k_min))
    else:
        transform = WeightTransform.identity()
    result = chain_metric(space, transform)
    rep.doc["result"] = result.to_dict()
    rep.doc["distortion"] = distortion_report(result, space, b_params, tol)
    rep.run("metric_axioms", lambda: check_metric(result.as_space(), tol))
    if cfg.structure == "f" and transform.kind == "identity":
        rep.run("f_sandwich", lambda: check_f_sandwich(space, cfg.structure_params(), result, tol))
    return rep, rep.finish()


def cmd_fuzz(cfg: JobConfig) -> tuple[Report, int]:
    if cfg.seed is None:
        raise ConfigError("fuzz needs a seed")
    if cfg.trials < 1:
        raise ConfigError("trials must be at least 1")
    rep = Report("fuzz", cfg)
    family = {"family": "euclidean_squared", "points": 6}
    family.update({k: v for k, v in cfg.fuzz.items() if k not in ("expect_violations", "workers")})
    params = cfg.structure_params()
    if cfg.structure == "b" and params is None:
        raise ConfigError("fuzzing structure b needs params.K")
    try:
        trials = run_fuzz(cfg.structure, params, family, cfg.seed, cfg.trials, cfg.tol, int(cfg.fuzz.get("workers", 1)))
    except ValueError as exc:
        raise ConfigError(f"invalid generator parameters: {exc}") from exc
    violations = [t for t in trials if not t.passed]
    expected = bool(cfg.fuzz.get("expect_violations", False))
    rep.doc["fuzz"] = {
        "family": family,
        "trials": len(trials),
        "violations": len(violations),
        "expect_violations": expected,
        "results": [t.to_dict() for t in violations],
        "shrunk_sizes": sorted({len(t.shrunk_space["labels"]) for t in violations}),
    }
    return rep, rep.finish(expected or not violations)


COMMANDS = {
    "validate": cmd_validate,
    "regularity": cmd_regularity,
    "metrize": cmd_metrize,
    "fuzz": cmd_fuzz,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metrikos", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"metrikos {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON job configuration")
        p.add_argument("--structure", choices=("b", "f", "theta"))
        p.add_argument("--space", help="space JSON file (matrix or points+formula)")
        p.add_argument("--K", type=float)
        p.add_argument("--f", help="control function in t, e.g. 'ln(t)'")
        p.add_argument("--alpha", type=float)
        p.add_argument("--theta", help="B-action in s, t, e.g. 's+t+s*t'")
        p.add_argument("--eps", help="comma-separated scales for phi certificates")
        p.add_argument("--k", help="comma-separated scales for r certificates")
        p.add_argument("--anchor", action="append", help="anchor label (repeatable)")
        p.add_argument("--transform", help="identity | power:<eps> | custom:<expr in t>")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--strict", action="store_true", help="heuristic checks affect the exit code")
        p.add_argument("--out", help="write the report here instead of stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config", "out")}
    try:
        cfg = load_config(args.config, overrides)
        rep, code = COMMANDS[args.command](cfg)
    except (ConfigError, ParseError, DomainError, MetrikosError, ValueError) as exc:
        print(f"metrikos: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = rep.dumps()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    summary = "PASS" if code == EXIT_PASS else "FAIL"
    if args.command == "metrize":
        summary += f" max_distortion={rep.doc['result']['max_distortion']!r}"
    print(f"metrikos {args.command}: {summary}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
