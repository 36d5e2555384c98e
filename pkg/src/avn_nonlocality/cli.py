"""Command-line entry point.

Exit codes: 0 success, 1 usage or resource error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

from . import analysis, constraints, lhv
from .statevector import build_w_state

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    n: int | None = None
    n_min: int | None = None
    n_max: int | None = None
    tolerance: float = constraints.DEFAULT_TOLERANCE
    use_completeness: bool = True
    output_format: str = "text"
    output_path: str | None = None
    cap: int = lhv.DEFAULT_CAP
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise UsageError(f"--tolerance must be positive, got {self.tolerance}")
        if self.output_format not in ("text", "json", "csv"):
            raise UsageError(f"unknown format {self.output_format!r}")


def _envelope(kind: str, payload: dict) -> str:
    doc = {"schema": f"avn-nonlocality/{kind}", "schema_version": SCHEMA_VERSION, **payload}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _need_n(cfg: RunConfig, minimum: int) -> int:
    if cfg.n is None:
        raise UsageError("--n is required")
    if cfg.n < minimum:
        raise UsageError(f"--n must be >= {minimum} for this command, got {cfg.n}")
    return cfg.n


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_FAMILY_NOTE = {
    constraints.Z_PAIR: "no two sites occupied together",
    constraints.X_PAIR: "opposite X on r,s with every other site empty",
    constraints.COMPLETENESS: "photon absent from every site",
}


def cmd_verify_constraints(cfg: RunConfig) -> int:
    n = _need_n(cfg, 2)
    cons = constraints.all_constraints(n, cfg.use_completeness)
    report = constraints.verify_constraints(build_w_state(n), cons, cfg.tolerance)
    if cfg.output_format == "json":
        out = _envelope("constraint-report", report.to_dict())
    elif cfg.output_format == "csv":
        rows = [[str(lab), lab.family, repr(v)] for lab, v in zip(report.labels, report.values)]
        out = _csv(["label", "family", "probability"], rows)
    else:
        lines = [f"Zero-probability constraints on the {n}-site W state (tolerance {cfg.tolerance:g})"]
        for fam, note in _FAMILY_NOTE.items():
            vals = [v for lab, v in zip(report.labels, report.values) if lab.family == fam]
            if vals:
                lines.append(f"  {fam:<13} {len(vals):>5} constraints  max P = {max(vals):.3e}  [{note}]")
        lines.append(f"max violation: {report.max_violation:.3e}")
        lines.append(f"verdict: {report.verdict.upper()}")
        out = "\n".join(lines) + "\n"
    _emit(cfg, out)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_verify_theorem(cfg: RunConfig) -> int:
    n = _need_n(cfg, 1)
    report = lhv.verify_theorem(n, cfg.use_completeness, cap=cfg.cap, workers=cfg.workers)
    if cfg.output_format == "json":
        out = _envelope("theorem-report", report.to_dict())
    elif cfg.output_format == "csv":
        survivors = report.survivors or ()
        rows = [[a.encode(), a.pattern("Z"), a.pattern("X")] for a in survivors]
        out = _csv(["encoding", "z_pattern", "x_pattern"], rows)
    else:
        lines = [
            f"Deterministic local models on {n} sites: {report.total_models} enumerated",
            f"constraint families: z-pair, x-pair"
            + (", completeness" if report.completeness_constraint_used else " (completeness off)"),
            f"survivors: {report.survivor_count}",
            f"all survivors predict equal X outcomes: {'yes' if report.all_survivors_x_uniform else 'NO'}",
            f"survivor set is exactly one-site-occupied x uniform-X: "
            f"{'yes' if report.matches_single_occupation_class else 'no'}",
        ]
        if report.z_all_plus_survivors:
            lines.append(
                f"FLAG: {report.z_all_plus_survivors} survivors have every site empty (z all +1); "
                "they are excluded only by the completeness constraint"
            )
        if report.survivors is not None:
            lines.append("encoding  z  x")
            lines += [f"{a.encode():>8}  {a.pattern('Z')}  {a.pattern('X')}" for a in report.survivors]
        else:
            lines.append(f"(survivor list omitted above {lhv.SURVIVOR_LIST_LIMIT} entries)")
        out = "\n".join(lines) + "\n"
    _emit(cfg, out)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_gap(cfg: RunConfig) -> int:
    if cfg.n is not None:
        lo = hi = cfg.n
    else:
        lo = 2 if cfg.n_min is None else cfg.n_min
        hi = 20 if cfg.n_max is None else cfg.n_max
    if not 1 <= lo <= hi <= analysis.GAP_CAP:
        raise UsageError(f"need 1 <= n-min <= n-max <= {analysis.GAP_CAP}, got {lo}..{hi}")
    rows = analysis.gap_sweep(lo, hi)
    cols = ["n", "local_prediction", "quantum_prediction", "gap", "quantum_simulated"]
    if cfg.output_format == "json":
        out = _envelope("gap-table", {"rows": [{c: getattr(r, c) for c in cols} for r in rows]})
    elif cfg.output_format == "csv":
        out = _csv(cols, [[r.n] + [repr(getattr(r, c)) for c in cols[1:]] for r in rows])
    else:
        lines = ["P(all X outcomes equal): local theories vs the W state", f"{'n':>3} {'local':>6} {'quantum':>14} {'gap':>14}"]
        lines += [f"{r.n:>3} {r.local_prediction:>6.0f} {r.quantum_prediction:>14.10f} {r.gap:>14.10f}" for r in rows]
        out = "\n".join(lines) + "\n"
    _emit(cfg, out)
    return EXIT_OK


def cmd_independence(cfg: RunConfig) -> int:
    n = _need_n(cfg, 2)
    pi = analysis.parameter_independence_check(n, cfg.tolerance)
    oi = analysis.outcome_independence_check(n)
    if cfg.output_format == "json":
        out = _envelope(
            "independence-report",
            {"n_sites": n, "parameter_independence": pi.to_dict(), "outcome_independence": oi.to_dict()},
        )
    elif cfg.output_format == "csv":
        out = _csv(
            ["check", "n", "value", "threshold", "result"],
            [
                ["parameter_independence", n, repr(pi.max_deviation), repr(pi.tolerance),
                 "pass" if pi.passed else "fail"],
                ["outcome_independence", n, repr(oi.deviation), repr(oi.threshold),
                 "violated" if oi.found else "not_violated"],
            ],
        )
    else:
        lines = [
            f"Parameter independence on the {n}-site W state: max deviation {pi.max_deviation:.3e} "
            f"over {pi.checked} cases -> {'PASS' if pi.passed else 'FAIL'}",
        ]
        if oi.found:
            i, a, j, b = oi.witness
            lines.append(
                f"Outcome independence violated: P(X{j}={b:+d} | X{i}={a:+d}) = {oi.conditional:.6f} "
                f"vs P(X{j}={b:+d}) = {oi.marginal:.6f}, deviation {oi.deviation:.6f}"
            )
        else:
            lines.append(f"No outcome-independence witness above {oi.threshold}")
        out = "\n".join(lines) + "\n"
    _emit(cfg, out)
    return EXIT_OK if pi.passed and oi.found else EXIT_FAILED


def cmd_emit_constraints(cfg: RunConfig) -> int:
    n = _need_n(cfg, 1)
    cons = constraints.all_constraints(n, cfg.use_completeness)
    if cfg.output_format == "csv":
        rows = [
            [str(c.label), c.label.family, r.site, r.basis.value, r.outcome]
            for c in cons
            for r in c.spec.records
        ]
        out = _csv(["label", "family", "site", "basis", "outcome"], rows)
    elif cfg.output_format == "json":
        out = _envelope("constraint-list", {"n_sites": n, "constraints": [c.to_dict() for c in cons]})
    else:
        lines = []
        for c in cons:
            recs = ", ".join(f"{r.basis.value}{r.site}={r.outcome:+d}" for r in c.spec.records)
            lines.append(f"{str(c.label):<24} P({recs}) = 0")
        out = "\n".join(lines) + "\n"
    _emit(cfg, out)
    return EXIT_OK


COMMANDS = {
    "verify-constraints": cmd_verify_constraints,
    "verify-theorem": cmd_verify_theorem,
    "gap": cmd_gap,
    "independence": cmd_independence,
    "emit-constraints": cmd_emit_constraints,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--tolerance", type=float, default=constraints.DEFAULT_TOLERANCE)
    common.add_argument("--no-completeness", dest="use_completeness", action="store_false")
    common.add_argument("--format", dest="output_format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--output", dest="output_path", metavar="PATH")

    parser = _Parser(prog="avn-nonlocality", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("verify-constraints", parents=[common], help="check the zero-probability constraints on the W state")
    p = sub.add_parser("verify-theorem", parents=[common], help="enumerate deterministic local models")
    p.add_argument("--cap", type=int, default=lhv.DEFAULT_CAP, help=f"largest n to enumerate (hard limit {lhv.HARD_CAP})")
    p.add_argument("--workers", type=int, default=1)
    p = sub.add_parser("gap", parents=[common], help="local vs quantum probability of equal X outcomes")
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    sub.add_parser("independence", parents=[common], help="outcome/parameter independence scans")
    sub.add_parser("emit-constraints", parents=[common], help="print the constraint list")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    opts = vars(args)
    command = opts.pop("command")
    try:
        cfg = RunConfig(**opts)
        return COMMANDS[command](cfg)
    except lhv.EnumerationCapError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
