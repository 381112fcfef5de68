"""Command line interface: ``modsep construct|verify|fibers|oracles|power-sums|search``.

Exit status is 0 when everything checked passes, 1 when a verification fails
(the counterexample is printed) and 2 for invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .field import FieldError, parse_field
from .poly import PolynomialError
from .reps import CYCLIC, SpecError, build, parse_spec
from .sep import ConstructionError, SeparatingSet, generic_search, recursion_levels, separating_set
from .verify import (LimitExceeded, check_fiber_condition, check_separating, lemma_oracles,
                     power_sum, power_sum_rule)


class UsageError(Exception):
    pass


def _spec(args):
    field = parse_field(args.field) if args.field else None
    text = args.spec
    if field is None and not text.strip().startswith(CYCLIC):
        raise UsageError("--field is required for Klein four modules")
    return parse_spec(text, field)


def _emit(args, text: str, data) -> None:
    if args.format == "json":
        out = json.dumps(data, indent=2, sort_keys=True) + "\n"
    else:
        out = text if text.endswith("\n") else text + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _set_text(S: SeparatingSet) -> str:
    lines = [f"# {S.spec} over F_{S.spec.field.name}: {len(S)} invariants in {S.spec.dim} variables"]
    for i, e in enumerate(S.elements, 1):
        lines.append(f"{i:>3}. {e.poly}")
        lines.append(f"     [{e.provenance}] {e.label} (from {e.origin})")
    return "\n".join(lines)


def cmd_construct(args) -> int:
    S = separating_set(_spec(args))
    _emit(args, _set_text(S), S.to_json())
    return 0


def cmd_search(args) -> int:
    S = generic_search(_spec(args), args.degree_bound, args.limit)
    _emit(args, _set_text(S), S.to_json())
    return 0


def cmd_verify(args) -> int:
    if args.set_file:
        with open(args.set_file, encoding="utf-8") as fh:
            S = SeparatingSet.from_json(json.load(fh))
        if args.spec and str(_spec(args)) != str(S.spec):
            raise UsageError(f"--spec {args.spec} does not match the set file ({S.spec})")
    else:
        S = separating_set(_spec(args))
    report = check_separating(build(S.spec), S, args.limit, args.threads)
    _emit(args, report.summary(), report.to_json(args.timing))
    return 0 if report.ok else 1


def cmd_fibers(args) -> int:
    spec = _spec(args)
    reports = []
    for level, phi, T in recursion_levels(spec):
        reports.append(check_fiber_condition(build(level), phi, [t.poly for t in T],
                                             args.limit, args.threads))
    text = "\n".join(r.summary() for r in reports) or f"{spec} has no recursion levels"
    data = {"schema": 1, "spec": str(spec), "field": spec.field.name,
            "levels": [r.to_json(args.timing) for r in reports]}
    _emit(args, text, data)
    return 0 if all(r.ok for r in reports) else 1


def cmd_oracles(args) -> int:
    spec = _spec(args)
    results = lemma_oracles(spec)
    lines = []
    for r in results:
        params = ",".join(f"{k}={v}" for k, v in r.params.items())
        lines.append(f"{'PASS' if r.ok else 'FAIL'} {r.lemma} [{params}]"
                     + ("" if r.ok else f" difference: {r.difference}"))
    text = "\n".join(lines) or f"no congruences apply to {spec}"
    data = {"schema": 1, "spec": str(spec), "field": spec.field.name,
            "results": [r.to_json() for r in results]}
    _emit(args, text, data)
    return 0 if all(r.ok for r in results) else 1


def cmd_power_sums(args) -> int:
    rows, ok = [], True
    for p in args.primes:
        for a in range(1, 2 * (p - 1) + 1):
            value = power_sum(p, a)
            good = value == power_sum_rule(p, a)
            ok &= good
            rows.append({"p": p, "a": a, "sum": value, "divisible": a % (p - 1) == 0, "ok": good})
    text = "\n".join(f"p={r['p']} a={r['a']}: {r['sum']}{'' if r['ok'] else '  MISMATCH'}" for r in rows)
    _emit(args, text, {"schema": 1, "rows": rows})
    return 0 if ok else 1


def _primes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modsep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec_required=True):
        p.add_argument("--spec", required=spec_required,
                       help='module, e.g. "klein-ii:n=3,lambda=t" or "cyclic:p=3,m=4,n=3"')
        p.add_argument("--field", help='field as "p^k", e.g. "2^2" (optional for cyclic)')
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", "-o", help="write to this file instead of stdout")
        p.add_argument("--limit", type=int, default=None,
                       help="maximum number of points to enumerate (default 2^24 or $MODSEP_POINT_LIMIT)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--timing", action="store_true", help="include elapsed time in JSON reports")

    p = sub.add_parser("construct", help="print the separating set")
    common(p)
    p.set_defaults(func=cmd_construct)
    p = sub.add_parser("verify", help="construct (or load) a set and check it exhaustively")
    common(p, spec_required=False)
    p.add_argument("--set-file", help="JSON produced by `construct --format json`")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("fibers", help="check the fiber condition at every recursion level")
    common(p)
    p.set_defaults(func=cmd_fibers)
    p = sub.add_parser("oracles", help="check the congruences symbolically")
    common(p)
    p.set_defaults(func=cmd_oracles)
    p = sub.add_parser("search", help="brute-force separating set from orbit sums and products")
    common(p)
    p.add_argument("--degree-bound", type=int, default=4)
    p.set_defaults(func=cmd_search)
    p = sub.add_parser("power-sums", help="table of sum_{l<p} l^a mod p")
    p.add_argument("--primes", type=_primes, default=[2, 3, 5, 7])
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_power_sums)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify" and not args.spec and not args.set_file:
        print("modsep: error: verify needs --spec or --set-file", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (UsageError, SpecError, FieldError, PolynomialError, ConstructionError,
            LimitExceeded, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"modsep: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
