"""Command-line frontend: solve, bojanov, truncate, sample.

Every command reads a JSON config (--config), writes structured JSON to
--out (or stdout), and maps outcomes to exit codes: 0 success, 1 config or
structural error, 2 solver non-convergence (the report is still written,
since the existence guarantees have hypotheses a user may knowingly break).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .config import (
    ConfigError,
    SCHEMA_VERSION,
    build_problem,
    build_solve_options,
    build_weight_field,
    json_sanitize,
    load_config,
)
from .evaluation import translate_sum_function
from .model import (
    AdmissibilityError,
    Multiplicities,
    Problem,
    ProblemDomain,
    check_admissibility,
    make_log_kernel,
)
from .solver import solve_equioscillation
from .truncation import ensure_certificate, verify_q

__all__ = ["main", "BojanovResult", "cmd_solve", "cmd_bojanov", "cmd_truncate", "cmd_sample"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


@dataclass(frozen=True)
class BojanovResult:
    """Weighted extremal polynomial data recovered from the solver level."""

    roots: tuple
    multiplicities: tuple
    sup_norm: float
    alternation_points: tuple

    def to_json_dict(self) -> dict:
        return {
            "roots": list(self.roots),
            "multiplicities": list(self.multiplicities),
            "sup_norm": self.sup_norm,
            "alternation_points": list(self.alternation_points),
        }


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); keep 2 for non-convergence
        raise _UsageError(message)


def _write_output(payload: dict, out_path: str | None, summary: str) -> None:
    text = json.dumps(json_sanitize(payload), indent=2)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
        print(summary)
    else:
        print(text)


def _report_payload(report, config_echo: dict, command: str) -> dict:
    payload = {"schema": SCHEMA_VERSION, "command": command}
    payload.update(report.to_json_dict())
    payload["config"] = config_echo
    return payload


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    opts = build_solve_options(cfg, seed=args.seed, multistart=args.multistart)
    report = solve_equioscillation(problem, opts)
    summary = (
        f"{'converged' if report.converged else 'NOT converged'} in "
        f"{report.iterations} sweeps: level={report.level:.12g} "
        f"spread={report.spread:.3g} nodes={[round(v, 9) for v in report.nodes.y]}"
    )
    _write_output(_report_payload(report, cfg, "solve"), args.out, summary)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


_DECAY_PROBE = (10.0, 100.0, 1000.0, 10000.0, -10.0, -100.0, -1000.0, -10000.0)


def cmd_bojanov(args) -> int:
    cfg = load_config(args.config)
    weight_cfg = cfg.get("weight")
    if weight_cfg is None:
        raise ConfigError("missing required key 'weight'", "/weight")
    field = build_weight_field(weight_cfg)
    mults = cfg.get("multiplicities")
    if not isinstance(mults, list):
        raise ConfigError("missing required key 'multiplicities'", "/multiplicities")
    multiplicities = Multiplicities(tuple(float(v) for v in mults))
    n = len(multiplicities)
    if len(field.finiteness_witnesses) <= n:
        raise ConfigError(
            f"weight must be nonzero at more than n={n} points", "/weight"
        )
    kernel = make_log_kernel()
    decay = check_admissibility(field, kernel, multiplicities.total, _DECAY_PROBE)
    if not decay.plausible:
        raise AdmissibilityError(
            "weight lacks the required decay: w(x)*x^R must vanish at infinity "
            f"(probe tail value {decay.worst_value:g})"
        )
    problem = Problem(
        kernel=kernel,
        field=field,
        multiplicities=multiplicities,
        domain=ProblemDomain("axis"),
        admissibility_asserted=True,  # just probed above
    )
    opts = build_solve_options(cfg, seed=args.seed, multistart=args.multistart)
    report = solve_equioscillation(problem, opts)
    result = BojanovResult(
        roots=report.nodes.y,
        multiplicities=multiplicities.r,
        sup_norm=math.exp(report.level),
        alternation_points=tuple(float(v) for v in report.maxima.argmax),
    )
    weighted_values = [math.exp(v) if math.isfinite(v) else 0.0 for v in report.maxima.m]
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "bojanov",
        "result": result.to_json_dict(),
        "alternation_values": weighted_values,
        "level": report.level,
        "spread": report.spread,
        "converged": report.converged,
        "iterations": report.iterations,
        "config": cfg,
    }
    summary = (
        f"sup norm {result.sup_norm:.12g} with roots "
        f"{[round(v, 9) for v in result.roots]}"
    )
    _write_output(payload, args.out, summary)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_truncate(args) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    if problem.domain.kind == "segment":
        raise ConfigError("truncation applies to axis or semiaxis problems", "/domain/kind")
    if not problem.admissibility_asserted:
        decay = check_admissibility(
            problem.field, problem.kernel, problem.total_mass, _DECAY_PROBE
        )
        if not decay.plausible:
            raise AdmissibilityError(
                f"field fails the decay probe (tail value {decay.worst_value:g})"
            )
    cert = ensure_certificate(problem, seed=args.seed or 0)
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "truncate",
        "certificate": cert.to_json_dict(),
        "config": cfg,
    }
    if args.verify:
        rep = verify_q(cert, problem, trials=200, seed=args.seed or 0)
        payload["verification"] = {
            "trials": rep.trials,
            "violation_count": rep.violation_count,
            "max_violation": rep.max_violation,
            "tol": rep.tol,
            "examples": list(rep.examples),
        }
    summary = f"q = {cert.q:.9g} from {cert.anchors.size} anchors"
    if args.verify:
        summary += f"; verify: {payload['verification']['violation_count']} violations"
    _write_output(payload, args.out, summary)
    return EXIT_OK


def _format_value(v: float) -> str:
    if v == -math.inf:
        return "-inf"
    if v == math.inf:
        return "inf"
    if math.isnan(v):
        return "nan"
    return repr(float(v))


def cmd_sample(args) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    try:
        nodes = [float(v) for v in args.nodes.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --nodes: {exc}", "/nodes") from exc
    try:
        lo, hi = (float(v) for v in args.range.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad --range: {exc}", "/range") from exc
    if args.count < 2:
        raise ConfigError("--count must be at least 2", "/count")
    if sorted(nodes) != nodes:
        raise ConfigError("nodes must be sorted", "/nodes")
    f = translate_sum_function(problem.kernel, problem.field, problem.multiplicities, nodes)
    ts = np.linspace(lo, hi, args.count)
    vals = f(ts)
    lines = ["t,F"]
    for t, v in zip(ts, vals):
        lines.append(f"{_format_value(float(t))},{_format_value(float(v))}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {args.count} samples to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="equitrans", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON problem configuration")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--seed", type=int, default=None, help="override RNG seed")
        p.add_argument("--multistart", type=int, default=None, help="override multistart count")
        p.add_argument("--grid-budget", type=int, default=None, help="override oracle grid budget")

    p_solve = sub.add_parser("solve", help="compute the equioscillation configuration")
    common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_boj = sub.add_parser("bojanov", help="weighted extremal polynomial frontend")
    common(p_boj)
    p_boj.set_defaults(func=cmd_bojanov)

    p_trunc = sub.add_parser("truncate", help="build a truncation certificate")
    common(p_trunc)
    p_trunc.add_argument("--verify", action="store_true", help="recheck the certificate")
    p_trunc.set_defaults(func=cmd_truncate)

    p_sample = sub.add_parser("sample", help="dump (t, F) rows as CSV")
    common(p_sample)
    p_sample.add_argument("--nodes", required=True, help="comma-separated node positions")
    p_sample.add_argument("--range", required=True, help="t range as 'lo,hi'")
    p_sample.add_argument("--count", type=int, required=True, help="number of samples")
    p_sample.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (AdmissibilityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
