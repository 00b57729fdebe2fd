"""
Command-line front end.

Exit codes: 0 holds / witness accepted / checks passed, 1 fails /
no witness / a check failed, 2 undecided, 64 bad input or usage.
Defaults come from ``Settings`` and can be overridden by environment
variables ``JENSEN_ORDER_<FIELD>`` (e.g. ``JENSEN_ORDER_GRID=513``) and
then by flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import JensenOrderError, NonConvergence
from .instances import paper_example, random_psd, range_fixed_point_instance
from .matrixfile import MatrixFileError, matrix_from_dict, matrix_to_dict, read_matrix, write_matrix
from .linalg import operator_norm
from .order import DecisionConfig, Outcome, Verdict, check_order, check_order_squared, recheck
from .replication import bound_decay_study, range_fixed_point_check, schur_identity_check, schur_tolerance
from .scalar import K_FLOOR, find_d, lattice_min_k, positivity_floor
from .witness import find_contraction, verify_witness

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_UNDECIDED = 2
EXIT_INPUT = 64

ENV_PREFIX = "JENSEN_ORDER_"


@dataclass(frozen=True)
class Settings:
    grid: int = 257
    refine_factor: int = 4
    max_refinements: int = 6
    slack: float = 1e-9
    tol: float = 1e-7
    max_iter: int = 5000
    seed: int = 0

    @classmethod
    def from_env(cls, environ=None) -> "Settings":
        environ = os.environ if environ is None else environ
        values = {}
        for f in dataclasses.fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                try:
                    values[f.name] = int(raw) if f.type in ("int", int) else float(raw)
                except ValueError as exc:
                    raise UsageError(f"bad value for {ENV_PREFIX}{f.name.upper()}: {raw!r}") from exc
        return cls(**values)

    def decision_config(self) -> DecisionConfig:
        return DecisionConfig(self.grid, self.refine_factor, self.max_refinements, self.slack)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


OUTCOME_EXIT = {Outcome.HOLDS: EXIT_OK, Outcome.FAILS: EXIT_FAIL, Outcome.UNDECIDED: EXIT_UNDECIDED}


def _emit(report: dict, json_path: str | None) -> None:
    text = json.dumps(report, indent=1)
    if json_path:
        Path(json_path).write_text(text + "\n")
        print(f"{report['command']}: {report.get('summary', '')} -> {json_path}")
    else:
        print(text)


def _report(command: str, inputs: dict, result: dict, summary: str, started: float, **extra) -> dict:
    out = {
        "command": command,
        "version": __version__,
        "inputs": inputs,
        "result": result,
        "summary": summary,
        "wall_time": time.perf_counter() - started,
    }
    out.update(extra)
    return out


def cmd_check(args, settings: Settings) -> int:
    started = time.perf_counter()
    A = read_matrix(args.a)
    B = read_matrix(args.b)
    cfg = dataclasses.replace(
        settings.decision_config(),
        **{k: v for k, v in (("grid_points", args.grid), ("refine_factor", args.refine),
                             ("max_refinements", args.max_refinements), ("psd_slack", args.slack)) if v is not None},
    )
    verdict = (check_order_squared if args.squared else check_order)(A, B, cfg)
    inputs = {"a": str(Path(args.a).resolve()), "b": str(Path(args.b).resolve()),
              "squared": args.squared, "config": dataclasses.asdict(cfg)}
    residuals = {}
    cert = verdict.certificate
    if verdict.fails:
        residuals["certificate_value"] = cert.value
    elif verdict.holds:
        residuals["lower_bound"] = cert.lower_bound
    _emit(_report("check", inputs, verdict.to_dict(), verdict.outcome.value, started, residuals=residuals), args.json)
    return OUTCOME_EXIT[verdict.outcome]


def cmd_witness(args, settings: Settings) -> int:
    started = time.perf_counter()
    A = read_matrix(args.a)
    B = read_matrix(args.b)
    max_iter = args.max_iter if args.max_iter is not None else settings.max_iter
    tol = args.tol if args.tol is not None else settings.tol
    inputs = {"a": str(Path(args.a).resolve()), "b": str(Path(args.b).resolve()), "max_iter": max_iter, "tol": tol}
    try:
        w = find_contraction(A, B, max_iter=max_iter, tol=tol)
        accepted, code = True, EXIT_OK
    except NonConvergence as exc:
        w = exc.best
        accepted, code = False, EXIT_FAIL
    result = {
        "accepted": accepted,
        "C": matrix_to_dict(w.C),
        "iterations": w.iterations,
        "polished": w.polished,
    }
    residuals = {"equation_residual": w.equation_residual, "norm_excess": w.norm_excess}
    summary = "accepted" if accepted else "no witness"
    _emit(_report("witness", inputs, result, summary, started, residuals=residuals), args.json)
    return code


def cmd_example(args, settings: Settings) -> int:
    ex = paper_example()
    out = Path(args.emit)
    out.mkdir(parents=True, exist_ok=True)
    mats = {"A": ex.A, "B": ex.B, "C": ex.C, "X": ex.X, "Y": ex.Y, **ex.squares()}
    for name, M in mats.items():
        write_matrix(out / f"{name}.json", M)
    print(json.dumps({"command": "example", "written": sorted(f"{k}.json" for k in mats), "dir": str(out)}))
    return EXIT_OK


def _theorem_trials(dim, trials, seed, min_gap, lam_min, lam_max, planted_equal, squared, cfg):
    rng = np.random.default_rng(seed)
    decide = check_order_squared if squared else check_order
    rows = []
    violations = 0
    for k in range(trials):
        A = random_psd(dim, rng, lam_min, lam_max)
        if planted_equal:
            B = A.copy()
        else:
            while True:
                B = random_psd(dim, rng, lam_min, lam_max)
                if operator_norm(A - B) >= min_gap:
                    break
        fwd = decide(A, B, cfg)
        bwd = decide(B, A, cfg)
        gap = operator_norm(A - B)
        violated = fwd.holds and bwd.holds and gap >= min_gap and not planted_equal
        violations += violated
        rows.append({
            "trial": k,
            "A": matrix_to_dict(A),
            "B": matrix_to_dict(B),
            "gap": gap,
            "forward": fwd.to_dict(),
            "backward": bwd.to_dict(),
            "violation": bool(violated),
        })
    return rows, violations


def cmd_verify_theorem(args, settings: Settings) -> int:
    started = time.perf_counter()
    seed = args.seed if args.seed is not None else settings.seed
    cfg = settings.decision_config()
    rows, violations = _theorem_trials(
        args.dim, args.trials, seed, args.min_gap, args.lambda_min, args.lambda_max,
        args.planted_equal, not args.plain, cfg,
    )
    inputs = {"dim": args.dim, "trials": args.trials, "seed": seed, "min_gap": args.min_gap,
              "lambda_min": args.lambda_min, "lambda_max": args.lambda_max,
              "planted_equal": args.planted_equal, "squared": not args.plain, "config": dataclasses.asdict(cfg)}
    counts = {o.value: 0 for o in Outcome}
    for r in rows:
        counts[r["forward"]["outcome"]] += 1
        counts[r["backward"]["outcome"]] += 1
    result = {"violations": violations, "outcome_counts": counts, "trials": rows}
    summary = f"{violations} violations in {args.trials} trials"
    _emit(_report("verify-theorem", inputs, result, summary, started), args.json)
    return EXIT_OK if violations == 0 else EXIT_FAIL


def _replicate_scalar(args):
    grid = args.grid
    params = find_d(args.c, args.eps, grid)
    fine = 4 * (grid - 1) + 1
    kmin = lattice_min_k(args.c, args.eps, params.d, fine)
    floor = positivity_floor(args.c, args.eps, fine)
    expected_floor = 2.0 * (args.c + args.eps) * args.eps
    result = {
        "d": params.d,
        "verification_lattice": fine,
        "k_min": kmin,
        "positivity_floor": floor,
        "positivity_floor_bound": expected_floor,
    }
    ok = kmin >= K_FLOOR and floor >= expected_floor - 1e-12
    inputs = {"c": args.c, "eps": args.eps, "grid": grid}
    return inputs, result, ok


def _replicate_partition(args):
    A = read_matrix(args.a) if args.a else np.diag([1.15, 1.45, 1.75, 1.95]).astype(complex)
    B = read_matrix(args.b) if args.b else A.copy()
    d = args.d if args.d is not None else find_d(args.c, args.eps).d
    n_list = [int(x) for x in args.n.split(",")]
    points = bound_decay_study(A, B, args.c, args.eps, d, n_list)
    reports = [p.report.to_dict() for p in points]
    schur = []
    tol = schur_tolerance(B)
    for p in points:
        for P in p.report.projections:
            if 0 < np.trace(P).real < A.shape[0] - 0.5:
                schur.append(schur_identity_check(B, P))
    bounds = [p.bound for p in points]
    decreasing = all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))
    equal_pair = np.array_equal(A, B)
    checks_ok = all(p.report.all_ok for p in points) if equal_pair else True
    ok = decreasing and checks_ok and all(s <= tol for s in schur)
    result = {
        "d": d,
        "series": [{"n": p.n, "bound": p.bound} for p in points],
        "monotone": decreasing,
        "schur_residuals": schur,
        "schur_tolerance": tol,
        "reports": reports,
    }
    inputs = {"A": matrix_to_dict(A), "B": matrix_to_dict(B), "c": args.c, "eps": args.eps, "n": n_list}
    return inputs, result, ok


def _replicate_range(args):
    rng = np.random.default_rng(args.seed)
    rows = []
    worst = 0.0
    for _ in range(args.trials):
        A, C, _P = range_fixed_point_instance(args.dim, rng)
        r1, r2 = range_fixed_point_check(C, A)
        worst = max(worst, r1, r2)
        rows.append({"A": matrix_to_dict(A), "C": matrix_to_dict(C), "cp_minus_p": r1, "c_minus_i_a": r2})
    inputs = {"dim": args.dim, "trials": args.trials, "seed": args.seed}
    return inputs, {"instances": rows, "worst": worst}, worst <= 1e-7


REPLICATORS = {
    "scalar-bound": _replicate_scalar,
    "partition": _replicate_partition,
    "range-fixed-point": _replicate_range,
}


def cmd_replicate(args, settings: Settings) -> int:
    started = time.perf_counter()
    inputs, result, ok = REPLICATORS[args.target](args)
    inputs["target"] = args.target
    _emit(_report("replicate", inputs, result, "pass" if ok else "fail", started, passed=ok), args.json)
    return EXIT_OK if ok else EXIT_FAIL


def _recheck_report(report: dict, a_path=None, b_path=None) -> bool:
    cmd = report["command"]
    inputs = report["inputs"]
    if cmd == "check":
        A = read_matrix(a_path or inputs["a"])
        B = read_matrix(b_path or inputs["b"])
        return recheck(Verdict.from_dict(report["result"]), A, B)
    if cmd == "witness":
        A = read_matrix(a_path or inputs["a"])
        B = read_matrix(b_path or inputs["b"])
        w = verify_witness(matrix_from_dict(report["result"]["C"]), A, B, inputs["tol"])
        return w.accepted == report["result"]["accepted"]
    if cmd == "verify-theorem":
        for row in report["result"]["trials"]:
            A = matrix_from_dict(row["A"])
            B = matrix_from_dict(row["B"])
            if not recheck(Verdict.from_dict(row["forward"]), A, B):
                return False
            if not recheck(Verdict.from_dict(row["backward"]), B, A):
                return False
        return True
    if cmd == "replicate":
        target = inputs["target"]
        res = report["result"]
        if target == "scalar-bound":
            kmin = lattice_min_k(inputs["c"], inputs["eps"], res["d"], res["verification_lattice"])
            return (kmin >= K_FLOOR) == report["passed"]
        if target == "partition":
            A = matrix_from_dict(inputs["A"])
            B = matrix_from_dict(inputs["B"])
            points = bound_decay_study(A, B, inputs["c"], inputs["eps"], res["d"], inputs["n"])
            return all(p.report.recheck(A, B) for p in points) and all(
                abs(p.bound - s["bound"]) <= 1e-12 for p, s in zip(points, res["series"])
            )
        if target == "range-fixed-point":
            for row in res["instances"]:
                r1, r2 = range_fixed_point_check(matrix_from_dict(row["C"]), matrix_from_dict(row["A"]))
                if max(r1, r2) > 1e-7:
                    return False
            return True
    raise UsageError(f"cannot recheck reports of command {cmd!r}")


def cmd_recheck(args, settings: Settings) -> int:
    try:
        report = json.loads(Path(args.report).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot load report {args.report}: {exc}") from exc
    ok = _recheck_report(report, args.a, args.b)
    print(json.dumps({"command": "recheck", "report": args.report, "valid": ok}))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="jensen-order", description="Decide, certify and refute the Jensen square-root relation.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="decide A ⊴ B (or A^2 ⊴ B^2 with --squared)")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--squared", action="store_true")
    c.add_argument("--grid", type=int)
    c.add_argument("--refine", type=int)
    c.add_argument("--max-refinements", type=int)
    c.add_argument("--slack", type=float)
    c.add_argument("--json")
    c.set_defaults(func=cmd_check)

    w = sub.add_parser("witness", help="search for a contraction C with CB + BC* = 2A")
    w.add_argument("a")
    w.add_argument("b")
    w.add_argument("--max-iter", type=int)
    w.add_argument("--tol", type=float)
    w.add_argument("--json")
    w.set_defaults(func=cmd_witness)

    e = sub.add_parser("example", help="write the 2x2 non-transitivity matrices")
    e.add_argument("--emit", required=True, metavar="DIR")
    e.set_defaults(func=cmd_example)

    t = sub.add_parser("verify-theorem", help="sample pairs and look for two-sided relations with A != B")
    t.add_argument("--dim", type=int, default=3)
    t.add_argument("--trials", type=int, default=200)
    t.add_argument("--seed", type=int)
    t.add_argument("--min-gap", type=float, default=0.1)
    t.add_argument("--lambda-min", type=float, default=0.2)
    t.add_argument("--lambda-max", type=float, default=2.0)
    t.add_argument("--planted-equal", action="store_true", help="use B = A in every trial")
    t.add_argument("--plain", action="store_true", help="test A ⊴ B instead of A^2 ⊴ B^2")
    t.add_argument("--json")
    t.set_defaults(func=cmd_verify_theorem)

    r = sub.add_parser("replicate", help="run a proof-replication pipeline")
    r.add_argument("target", choices=sorted(REPLICATORS))
    r.add_argument("--c", type=float, default=1.0)
    r.add_argument("--eps", type=float, default=0.1)
    r.add_argument("--grid", type=int, default=257)
    r.add_argument("--a")
    r.add_argument("--b")
    r.add_argument("--d", type=float)
    r.add_argument("--n", default="4,16,64,256")
    r.add_argument("--dim", type=int, default=4)
    r.add_argument("--trials", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--json")
    r.set_defaults(func=cmd_replicate)

    k = sub.add_parser("recheck", help="re-validate the certificates in a saved report")
    k.add_argument("report")
    k.add_argument("--a")
    k.add_argument("--b")
    k.set_defaults(func=cmd_recheck)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings.from_env()
        return args.func(args, settings)
    except (MatrixFileError, UsageError, JensenOrderError, ValueError) as exc:
        print(f"jensen-order: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
