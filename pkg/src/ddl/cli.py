"""Command-line entry point (``ddl``)."""

from __future__ import annotations

import argparse
import json
import sys

from .model import DefeaterMode, EngineConfig, Literal, Modality
from .parser import TheorySyntaxError, load_theory, serialize_extension, serialize_theory

EXIT_OK, EXIT_ERROR, EXIT_INCONSISTENT = 0, 1, 2
EXIT_NO, EXIT_UNDETERMINED = 3, 4

TAGS = {"+O": ("+", Modality.O), "-O": ("-", Modality.O), "+P": ("+", Modality.P), "-P": ("-", Modality.P)}


def _config(args) -> EngineConfig:
    return EngineConfig(DefeaterMode(args.defeater_mode), args.weak_perm_antecedent)


def _add_semantics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--defeater-mode", default="rules-only", choices=[m.value for m in DefeaterMode])
    p.add_argument("--weak-perm-antecedent", action="store_true",
                   help="let a P l antecedent also be satisfied by -O ~l")


def _load(path: str):
    try:
        return load_theory(path)
    except TheorySyntaxError as exc:
        for err in exc.errors:
            print(f"{path}:{err.span.line}:{err.span.column}: {err.kind}: {err.message}", file=sys.stderr)
    except OSError as exc:
        print(f"{path}: {exc.strerror or exc}", file=sys.stderr)
    return None


def _literal(text: str) -> Literal:
    lit = Literal.parse(text)
    if not lit.atom or not all(ch.isalnum() or ch in "_%'" for ch in lit.atom):
        raise argparse.ArgumentTypeError(f"not a literal: {text!r}")
    return lit


def cmd_check(args) -> int:
    from .queries import check_consistency

    t = _load(args.file)
    if t is None:
        return EXIT_ERROR
    rep = check_consistency(t)
    print(f"consistent: {'yes' if rep.consistent else 'no'}")
    print(f"o-consistent: {'yes' if rep.o_consistent else 'no'}")
    for v in rep.violations:
        print(f"  {v}")
    return EXIT_OK if rep.consistent else EXIT_INCONSISTENT


def cmd_extension(args) -> int:
    from .engine import compute_extension

    t = _load(args.file)
    if t is None:
        return EXIT_ERROR
    ext = compute_extension(t, _config(args))
    sys.stdout.write(serialize_extension(ext, args.format))
    if not ext.consistent:
        print("warning: the theory is inconsistent; results carry no consistency guarantees", file=sys.stderr)
    return EXIT_OK


def _verdict(ext, tag: str, lit: Literal) -> str:
    if tag == "weak":
        from .queries import is_weakly_permitted

        if is_weakly_permitted(ext, lit):
            return "yes"
        return "undetermined" if ~lit in ext.undetermined_O else "no"
    sign, m = TAGS[tag]
    key = m.value
    if ext.status(sign, m, lit):
        return "yes"
    if lit in getattr(ext, f"undetermined_{key}"):
        return "undetermined"
    return "no"


def cmd_query(args) -> int:
    from .engine import compute_extension

    t = _load(args.file)
    if t is None:
        return EXIT_ERROR
    verdict = _verdict(compute_extension(t, _config(args)), args.tag, args.literal)
    print(verdict)
    return {"yes": EXIT_OK, "no": EXIT_NO, "undetermined": EXIT_UNDETERMINED}[verdict]


def cmd_explain(args) -> int:
    from .queries import NotDerivable, explain

    t = _load(args.file)
    if t is None:
        return EXIT_ERROR
    sign, m = TAGS[args.tag]
    res = explain(t, _config(args), (sign, m, args.literal))
    if isinstance(res, NotDerivable):
        print(res.render())
        return EXIT_UNDETERMINED if res.reason == "undetermined" else EXIT_NO
    print(res.to_json() if args.format == "json" else res.render())
    return EXIT_OK


def cmd_oracle_diff(args) -> int:
    from .diff import oracle_diff

    rep = oracle_diff(args.seed, args.cases, args.max_atoms, args.max_rules, workers=args.workers)
    print(f"cases: {rep.cases}  checks: {rep.checks}  disagreements: {len(rep.disagreements)}")
    if rep.ok:
        return EXIT_OK
    d = rep.disagreements[0]
    print(f"first disagreement: seed {d.seed}, defeater-mode {d.cfg.defeater_mode.value}, "
          f"weak-perm-antecedent {d.cfg.weak_perm_antecedent}")
    if d.error:
        print(d.error)
    print("minimized theory:")
    sys.stdout.write(serialize_theory(d.theory))
    for k in d.sets_that_differ():
        print(f"{k}: engine {sorted(map(str, d.engine[k]))} oracle {sorted(map(str, d.oracle[k]))}")
    return EXIT_ERROR


def cmd_bench(args) -> int:
    from .bench import FAMILIES, plot_reports, run_bench

    try:
        sizes = [int(float(s)) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        print(f"bad --sizes {args.sizes!r}", file=sys.stderr)
        return EXIT_ERROR
    if len(sizes) < 2:
        print("--sizes needs at least two values", file=sys.stderr)
        return EXIT_ERROR
    families = list(FAMILIES) if args.family == "all" else [args.family]
    reports = [run_bench(sizes, args.reps, f) for f in families]
    payload = reports[0].to_dict() if len(reports) == 1 else [r.to_dict() for r in reports]
    text = json.dumps(payload, indent=2)
    print(text)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if args.figure:
        plot_reports(reports, args.figure)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ddl", description="Defeasible deontic reasoner")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="consistency report")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("extension", help="compute the extension")
    p.add_argument("file")
    p.add_argument("--format", choices=["json", "text"], default="json")
    _add_semantics(p)
    p.set_defaults(func=cmd_extension)

    p = sub.add_parser("query", help="ask about one literal")
    p.add_argument("file")
    p.add_argument("--tag", required=True, choices=[*TAGS, "weak"])
    p.add_argument("--literal", required=True, type=_literal)
    _add_semantics(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("explain", help="print a proof trace")
    p.add_argument("file")
    p.add_argument("--tag", required=True, choices=list(TAGS))
    p.add_argument("--literal", required=True, type=_literal)
    p.add_argument("--format", choices=["text", "json"], default="text")
    _add_semantics(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("oracle-diff", help="compare engine and oracle on random theories")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--max-atoms", type=int, default=8)
    p.add_argument("--max-rules", type=int, default=12)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_oracle_diff)

    p = sub.add_parser("bench", help="scaling benchmark")
    p.add_argument("--sizes", default="1000,10000,100000")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--family", default="chain", choices=["chain", "dependency", "fan", "all"])
    p.add_argument("--output", help="also write the JSON report here")
    p.add_argument("--figure", help="write a log-log PNG plot here")
    p.set_defaults(func=cmd_bench)
    return ap


def _join_tag_values(argv: list[str]) -> list[str]:
    # argparse would read "--tag -O" as two options
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--tag" and i + 1 < len(argv) and argv[i + 1] in ("-O", "-P"):
            out.append(f"--tag={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_join_tag_values(argv))
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
