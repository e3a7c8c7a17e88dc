"""Command-line front end.

Exit codes: 0 success (axioms pass, certificate holds, orbit converged, demo
reproduced), 1 failed check, 2 bad input, 3 orbit cycles, 4 iteration budget
exhausted, 5 orbit left the domain.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, fields

from . import __version__
from .contraction import (
    estimate_alpha_cyclic,
    verify_contraction,
    verify_inclusions,
    verify_orbital,
    verify_partial_cyclic_decomp,
    verify_strict,
)
from .core import PartialMetricDescriptor, check_axioms
from .demos import DEMOS
from .errors import DomainEscapeError, PartialFixError
from .grammar import parse_map, parse_metric, parse_set, parse_sets
from .sets import SetDescriptor
from .solver import CONVERGED, CYCLE, TRACE_COLUMNS, SolverConfig, solve_cyclic, picard
from .spaces import CatalogEntry, CyclicDecomposition, get_entry

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CYCLE, EXIT_EXHAUSTED, EXIT_ESCAPE = 0, 1, 2, 3, 4, 5

DEFAULT_DENSITY = 100
DEFAULT_AXIOM_GRID = 50
DEFAULT_CUSTOM_DOMAIN = "[0,1]"


@dataclass
class RunConfig:
    space: str | None = None
    space_custom: str | None = None
    domain: str | None = None
    map: str | None = None
    sets: str | None = None
    alpha: float | None = None
    x0: float | None = None
    grid: int | None = None
    tol: float | None = None
    max_iter: int | None = None
    output: str = "text"

    @classmethod
    def from_sources(cls, args: argparse.Namespace) -> RunConfig:
        values = {}
        if getattr(args, "config", None):
            try:
                with open(args.config) as fh:
                    loaded = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"config {args.config}: {exc}") from None
            if not isinstance(loaded, dict):
                raise UsageError(f"config {args.config}: top level must be an object")
            known = {f.name for f in fields(cls)}
            unknown = set(loaded) - known
            if unknown:
                raise UsageError(f"config {args.config}: unknown keys {sorted(unknown)}")
            values.update(loaded)
        for f in fields(cls):
            v = getattr(args, f.name, None)
            if v is not None:
                values[f.name] = v
        cfg = cls(**values)
        if cfg.output not in ("json", "csv", "text"):
            raise UsageError(f"unknown output format {cfg.output!r}")
        return cfg


class UsageError(Exception):
    pass


@dataclass
class Problem:
    space: PartialMetricDescriptor
    region: SetDescriptor
    map: object = None
    decomposition: CyclicDecomposition | None = None
    notes: tuple = ()
    claimed_alpha: float | None = None


def resolve(cfg: RunConfig) -> Problem:
    if cfg.space and cfg.space_custom:
        raise UsageError("use either --space or --space-custom, not both")
    if cfg.space_custom:
        domain = parse_set(cfg.domain or DEFAULT_CUSTOM_DOMAIN)
        space = PartialMetricDescriptor(
            "custom", domain, "custom-piecewise", parse_metric(cfg.space_custom), cfg.space_custom
        )
        prob = Problem(space, domain)
    else:
        entry: CatalogEntry = get_entry(cfg.space or "max")
        prob = Problem(entry.space, entry.region, entry.map, entry.decomposition, entry.notes, entry.claimed_alpha)
    if cfg.map:
        prob.map = parse_map(cfg.map, prob.space.domain)
        prob.notes = tuple(n for n in prob.notes if "T(1)" not in n and "attached map" not in n)
    if cfg.sets:
        prob.decomposition = CyclicDecomposition(tuple(parse_sets(cfg.sets)))
    return prob


def _emit(cfg: RunConfig, command: str, result: dict, text: str, csv_text: str | None = None, **extra) -> None:
    if cfg.output == "json":
        doc = {"command": command, "config": asdict(cfg), "result": result}
        doc.update({k: v for k, v in extra.items() if v is not None})
        print(json.dumps(doc, indent=2))
    elif cfg.output == "csv":
        print(csv_text if csv_text is not None else _flat_csv(result), end="")
    else:
        print(text)


def _flat_csv(record: dict) -> str:
    flat = {k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in record.items()}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(flat.keys())
    w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in flat.values()])
    return buf.getvalue()


def cmd_check_axioms(cfg: RunConfig) -> int:
    prob = resolve(cfg)
    grid = cfg.grid or DEFAULT_AXIOM_GRID
    tol = cfg.tol if cfg.tol is not None else 1e-12
    pts = prob.region.sample(grid)
    report = check_axioms(prob.space, pts, tol)
    violations = [asdict(v) for v in report.violations]
    result = {"passed": report.passed, "sample_size": report.sample_size, "tol": tol,
              "violation_count": len(violations), "violations": violations}
    lines = [f"space={prob.space.name} sample={report.sample_size} tol={tol} passed={report.passed}"]
    for v in report.violations[:20]:
        lines.append(f"  {v.axiom} witness={v.witness} lhs={v.lhs!r} rhs={v.rhs!r}")
    if len(report.violations) > 20:
        lines.append(f"  ... {len(report.violations) - 20} more")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["axiom", "witness", "lhs", "rhs"])
    for v in report.violations:
        w.writerow([v.axiom, " ".join(repr(p) for p in v.witness), repr(v.lhs), repr(v.rhs)])
    _emit(cfg, "check-axioms", result, "\n".join(lines), buf.getvalue())
    return EXIT_OK if report.passed else EXIT_FAIL


def _need(prob: Problem, what: str, condition: str):
    value = getattr(prob, what)
    if value is None:
        raise UsageError(f"condition {condition} needs a {what}; pass --{'sets' if what == 'decomposition' else 'map'}")
    return value


def cmd_verify(cfg: RunConfig, condition: str) -> int:
    prob = resolve(cfg)
    density = cfg.grid or DEFAULT_DENSITY
    T = _need(prob, "map", condition)
    alpha = cfg.alpha if cfg.alpha is not None else prob.claimed_alpha
    if condition in ("c2", "pc2", "orbital") and alpha is None:
        raise UsageError(f"condition {condition} needs --alpha")
    extra = {}
    if condition == "c1":
        cert = verify_inclusions(T, _need(prob, "decomposition", condition), density)
    elif condition == "c2":
        decomp = _need(prob, "decomposition", condition)
        cert = verify_contraction(prob.space, T, decomp, alpha, density)
        extra["alpha_estimate"] = estimate_alpha_cyclic(prob.space, T, decomp, density).to_record()
    elif condition == "pc2":
        cert = verify_partial_cyclic_decomp(prob.space, T, _need(prob, "decomposition", condition), alpha, density)
    elif condition == "orbital":
        region = prob.decomposition.union if prob.decomposition else prob.region
        cert = verify_orbital(prob.space, T, region.sample(density), alpha)
    else:
        cert = verify_strict(prob.space, T, _need(prob, "decomposition", condition), density)
    rec = cert.to_record()
    text = cert.render()
    if "alpha_estimate" in extra:
        text += f"\nalpha_hat={extra['alpha_estimate']['alpha_hat']!r} at {tuple(extra['alpha_estimate']['witness'])}"
    for n in prob.notes:
        text += f"\nnote: {n}"
    _emit(cfg, "verify", {"holds": cert.holds, "notes": list(prob.notes), **extra}, text,
          _flat_csv(rec), certificate=rec)
    return EXIT_OK if cert.holds else EXIT_FAIL


def cmd_solve(cfg: RunConfig) -> int:
    prob = resolve(cfg)
    T = _need(prob, "map", "solve")
    if cfg.x0 is None:
        raise UsageError("solve needs --x0")
    scfg = SolverConfig(
        tol=cfg.tol if cfg.tol is not None else 1e-9,
        max_iter=cfg.max_iter if cfg.max_iter is not None else 10000,
    )
    if prob.decomposition is not None and any(A.contains(cfg.x0) for A in prob.decomposition.sets):
        res = solve_cyclic(prob.space, T, prob.decomposition, cfg.x0, scfg)
    else:
        res = picard(prob.space, T, cfg.x0, scfg)
    rec = res.to_record()
    rec["notes"] = list(prob.notes)
    lines = [f"status={res.status} iterations={res.iterations}"]
    if res.status == CONVERGED:
        lines.append(f"u={res.u!r} p(u,u)={res.p_uu!r} |p(Tu,u)-p(Tu,Tu)|={res.orbital_residual!r}")
    elif res.status == CYCLE:
        lines.append(f"period={res.period} orbit={list(res.orbit)}")
    if res.membership is not None:
        lines.append(f"membership={res.membership} in_all_sets={res.in_all_sets}")
    lines += [f"note: {n}" for n in prob.notes]
    lines.append(",".join(TRACE_COLUMNS))
    lines += res.trace.to_csv().splitlines()[1:]
    _emit(cfg, "solve", rec, "\n".join(lines), res.trace.to_csv(), trace=res.trace.to_record())
    return {CONVERGED: EXIT_OK, CYCLE: EXIT_CYCLE}.get(res.status, EXIT_EXHAUSTED)


def cmd_demo(cfg: RunConfig, name: str) -> int:
    if name not in DEMOS:
        raise UsageError(f"unknown demo {name!r}; choose from {sorted(DEMOS)}")
    report = DEMOS[name](cfg.grid or DEFAULT_DENSITY)
    _emit(cfg, "demo", report.to_record(), report.render())
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with any of the options below; flags override it")
    common.add_argument("--space", help="catalog space: max, rationals-max, hybrid-unit, counterexample")
    common.add_argument("--space-custom", dest="space_custom", help='custom metric expression in x, y, e.g. "max(x,y)"')
    common.add_argument("--domain", help="domain of a custom metric (default [0,1])")
    common.add_argument("--map", help='affine map, e.g. "x/2", or pieces "1/2 on [0,1); 0 on {1}"')
    common.add_argument("--sets", help='cyclic decomposition, e.g. "[0,1/2]; [1/2,1]"')
    common.add_argument("--alpha", type=float, help="contraction constant in (0,1)")
    common.add_argument("--x0", type=float, help="starting point for solve")
    common.add_argument("--grid", type=int, help=f"sampling density (default {DEFAULT_DENSITY}; check-axioms {DEFAULT_AXIOM_GRID})")
    common.add_argument("--tol", type=float, help="tolerance (default 1e-9; check-axioms 1e-12)")
    common.add_argument("--max-iter", dest="max_iter", type=int, help="Picard iteration budget (default 10000)")
    common.add_argument("--output", choices=("json", "csv", "text"), help="output format (default text)")

    parser = argparse.ArgumentParser(prog="partialfix", description="Fixed-point toolkit for partial metric spaces.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check-axioms", parents=[common], help="check the partial-metric axioms on a grid")
    v = sub.add_parser("verify", parents=[common], help="verify a contraction-type condition")
    v.add_argument("condition", choices=("c1", "c2", "pc2", "orbital", "strict"))
    sub.add_parser("solve", parents=[common], help="run Picard iteration")
    d = sub.add_parser("demo", parents=[common], help="run a scripted example")
    d.add_argument("name", help=", ".join(DEMOS))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_sources(args)
        if args.command == "check-axioms":
            return cmd_check_axioms(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.condition)
        if args.command == "solve":
            return cmd_solve(cfg)
        return cmd_demo(cfg, args.name)
    except DomainEscapeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESCAPE
    except (UsageError, PartialFixError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
