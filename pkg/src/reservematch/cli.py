"""Command-line front end.

    reservematch solve INSTANCE [INSTANCE ...] [--precedence c1,c2] [--emit-stages] [--out PATH]
    reservematch check INSTANCE MATCHING
    reservematch oracle INSTANCE [--force-oracle]
    reservematch hall INSTANCE
    reservematch gen (--preset NAME | --patients N --categories N ...) [--seed N] [--out PATH]

INSTANCE is a JSON file or ``preset:NAME``. Reports go to stdout as
``key=value`` lines, or as one JSON object with ``--json``. Exit status is
0 on success, 1 when ``check`` finds a violation, 2 on errors.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

from . import io
from .generate import BadSpecError, RandomSpec, generate, preset
from .maxmatch import max_resource_size
from .model import (
    Instance,
    InstanceError,
    check_eligibility,
    check_nonwasteful,
    check_respects_priorities,
    matching_stats,
)
from .oracle import TooLargeError, check_equivalence_prop2, count_matchings, hall_check, oracle_optima
from .pipeline import daim_only, smart_pipeline

EXIT_OK, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2


class _Report:
    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.fields: dict[str, Any] = {}
        self.lines: list[str] = []

    def put(self, key: str, value: Any) -> None:
        self.fields[key] = value
        if isinstance(value, bool):
            text = "yes" if value else "no"
        elif isinstance(value, (list, tuple)):
            text = ",".join(str(v) for v in value)
        elif isinstance(value, dict):
            for k, v in value.items():
                self.lines.append(f"{key}.{k}={v}")
            return
        else:
            text = str(value)
        self.lines.append(f"{key}={text}")

    def emit(self, out=None) -> None:
        out = out or sys.stdout
        if self.as_json:
            out.write(io.dumps(self.fields))
        else:
            for line in self.lines:
                out.write(line + "\n")


def load_instance(ref: str) -> Instance:
    if ref.startswith("preset:"):
        return preset(ref.split(":", 1)[1])
    return io.parse_instance(Path(ref).read_text())


def _precedence(arg: str | None) -> list[str] | None:
    return None if arg is None else [c.strip() for c in arg.split(",") if c.strip()]


def _solve_one(ref: str, precedence: list[str] | None, emit_stages: bool, plain_daim: bool) -> dict[str, Any]:
    inst = load_instance(ref)
    out: dict[str, Any] = {"instance": ref}

    def ordered(m):
        return {p: m[p] for p in inst.patients if p in m}

    if plain_daim:
        m = daim_only(inst, precedence)
        out["assignments"] = ordered(m)
        out["stats"] = matching_stats(inst, m)
        out["precedence"] = list(precedence or inst.category_ids)
        return out
    res = smart_pipeline(inst, precedence)
    out["assignments"] = ordered(res.mu3)
    out["stats"] = res.stats[2]
    out["precedence"] = list(res.precedence.categories)
    if emit_stages:
        out["stages"] = {
            name: {"assignments": ordered(m), "stats": s}
            for name, m, s in zip(("mu1", "mu2", "mu3"), (res.mu1, res.mu2, res.mu3), res.stats)
        }
    return out


def cmd_solve(args: argparse.Namespace) -> int:
    precedence = _precedence(args.precedence)
    if args.out and len(args.instance) > 1:
        raise SystemExit("--out takes a single instance")
    jobs = [(ref, precedence, args.emit_stages, args.daim_only) for ref in args.instance]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_solve_one, *zip(*jobs)))
    else:
        results = [_solve_one(*job) for job in jobs]

    for res in results:
        if args.out:
            Path(args.out).write_text(io.serialize_matching(res["assignments"]))
        rep = _Report(args.json)
        if len(results) > 1:
            rep.put("instance", res["instance"])
        rep.put("precedence", res["precedence"])
        if not args.out:
            rep.put("match", res["assignments"])
        rep.put("assigned", res["stats"].assigned)
        rep.put("beneficiary_assigned", res["stats"].beneficiary_assigned)
        for name, stage in res.get("stages", {}).items():
            rep.put(f"{name}.assigned", stage["stats"].assigned)
            rep.put(f"{name}.beneficiary_assigned", stage["stats"].beneficiary_assigned)
            if args.json:
                rep.fields[f"{name}.match"] = stage["assignments"]
            else:
                rep.put(f"{name}.match", stage["assignments"])
        rep.emit()
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    m = io.parse_matching(Path(args.matching).read_text(), inst)
    verdicts = {
        "eligibility": check_eligibility(inst, m),
        "nonwasteful": check_nonwasteful(inst, m),
        "respects_priorities": check_respects_priorities(inst, m),
    }
    # Pareto optimality is equivalent to maximum size
    pareto = len(m) == max_resource_size(inst)
    rep = _Report(args.json)
    for name, found in verdicts.items():
        rep.put(name, "OK" if not found else "NO")
    rep.put("pareto_optimal", "OK" if pareto else "NO")
    stats = matching_stats(inst, m)
    rep.put("assigned", stats.assigned)
    rep.put("beneficiary_assigned", stats.beneficiary_assigned)
    violations = [str(v) for vs in verdicts.values() for v in vs]
    if args.json:
        rep.fields["violations"] = violations
    else:
        rep.lines += [f"violation {v}" for v in violations]
    rep.emit()
    return EXIT_OK if pareto and not violations else EXIT_VIOLATION


def cmd_oracle(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    guard = -1 if args.force_oracle else None
    if args.force_oracle:
        print(f"# enumeration bound (|C|+1)^|I| = {(len(inst.categories) + 1) ** len(inst.patients)}", file=sys.stderr)
    opt = oracle_optima(inst, guard)
    rep = _Report(args.json)
    rep.put("matchings", opt.n_matchings)
    rep.put("matchings_counted", count_matchings(inst))
    rep.put("max_resource", opt.max_resource)
    rep.put("max_beneficiary", opt.max_beneficiary)
    rep.put("max_in_max", list(opt.max_in_max))
    rep.put("joint", "achievable" if opt.joint_achievable else "unachievable")
    rep.put("pareto_iff_max_resource", "holds" if check_equivalence_prop2(inst, guard) else "fails")
    rep.emit()
    return EXIT_OK


def cmd_hall(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    h = hall_check(inst)
    rep = _Report(args.json)
    rep.put("q", inst.q)
    rep.put("b", h.b)
    rep.put("sparse", sorted(h.sparse))
    rep.put("premise_holds", h.premise_holds)
    rep.put("all_beneficiary_exists", h.all_beneficiary_exists)
    rep.emit()
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    if args.preset:
        inst = generate(args.preset)
    else:
        if args.patients is None or args.categories is None:
            raise BadSpecError("BAD_SPEC: give --preset or both --patients and --categories")
        spec = RandomSpec(
            n_patients=args.patients,
            n_categories=args.categories,
            supply=args.supply,
            reserve_min=args.reserve_min,
            reserve_max=args.reserve_max,
            p_eligible=args.p_eligible,
            p_beneficiary=args.p_beneficiary,
            p_listed=args.p_listed,
        )
        inst = generate(spec, args.seed)
    text = io.serialize_instance(inst)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reservematch", description="Reserve matching with the smart pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--json", action="store_true", help="print one JSON object instead of key=value lines")

    p = sub.add_parser("solve", help="run the pipeline and report the final matching")
    p.add_argument("instance", nargs="+")
    p.add_argument("--precedence", help="comma-separated category order for DAIM")
    p.add_argument("--emit-stages", action="store_true", help="also report the stage 1 and 2 matchings")
    p.add_argument("--daim-only", action="store_true", help="run plain deferred acceptance instead")
    p.add_argument("--out", help="write the matching document here")
    p.add_argument("--jobs", type=int, default=1, help="solve several instance files in parallel")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="audit a matching against the axioms")
    p.add_argument("instance")
    p.add_argument("matching")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("oracle", help="brute-force optima for a small instance")
    p.add_argument("instance")
    p.add_argument("--force-oracle", action="store_true", help="lift the size guard")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("hall", help="check the all-units-to-beneficiaries premise and conclusion")
    p.add_argument("instance")
    common(p)
    p.set_defaults(func=cmd_hall)

    p = sub.add_parser("gen", help="write an instance document")
    p.add_argument("--preset")
    p.add_argument("--patients", type=int)
    p.add_argument("--categories", type=int)
    p.add_argument("--supply", type=int)
    p.add_argument("--reserve-min", type=int, default=1)
    p.add_argument("--reserve-max", type=int, default=3)
    p.add_argument("--p-eligible", type=float, default=0.6)
    p.add_argument("--p-beneficiary", type=float, default=0.5)
    p.add_argument("--p-listed", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, io.ParseError, BadSpecError, TooLargeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
