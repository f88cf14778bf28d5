"""Command-line front end.

Subcommands: synth, check, bench, gen, serve. Machine output goes to stdout
or to files; diagnostics go to stderr. Exit codes: 0 success, 1 failed
check, 2 specification/input error, 3 timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import format_table, load_suite, run_suite, suite_json
from .dataset import EditRequest, build_specification, load_dataset, load_labels
from .dsl import parse_action, parse_program, print_program, run_program
from .errors import SynthesisTimeout, UserError
from .generator import GeneratorSpec, write_files
from .search import Deadline
from .synth import SynthesisMode, synthesize

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USER_ERROR = 2
EXIT_TIMEOUT = 3


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def cmd_synth(args) -> int:
    dataset = load_dataset(_read(args.dataset), identity_fallback=args.identity_fallback)
    labels = load_labels(_read(args.labels))
    action = parse_action(args.action)
    mode = SynthesisMode.parse(args.mode)
    report = synthesize(
        dataset,
        EditRequest(action, labels),
        mode=mode,
        deadline=Deadline(args.timeout),
    )
    text = print_program(report.program) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    if args.emit_plan:
        plan = run_program(report.program, dataset)
        _write(args.emit_plan, plan.to_json() + "\n")
    if args.stats:
        _write(args.stats, json.dumps(report.stats_dict(), indent=2) + "\n")
    return EXIT_OK


def cmd_check(args) -> int:
    dataset = load_dataset(_read(args.dataset))
    labels = load_labels(_read(args.labels))
    spec = build_specification(dataset, labels)
    program = parse_program(_read(args.program).strip(), dataset)

    failed = False
    selected = set(run_program(program, dataset).object_ids)
    for oid in sorted(spec.positive_ids - selected):
        failed = True
        print(f"missing positive: {oid}", file=sys.stderr)
    for oid in sorted(spec.negative_ids & selected):
        failed = True
        print(f"selected negative: {oid}", file=sys.stderr)

    if args.against:
        other = parse_program(_read(args.against).strip(), dataset)
        mine = set(run_program(program, dataset).object_ids)
        theirs = set(run_program(other, dataset).object_ids)
        if mine != theirs:
            failed = True
            only_mine = sorted(mine - theirs)
            only_theirs = sorted(theirs - mine)
            if only_mine:
                print(f"selected only by {args.program}: {only_mine}", file=sys.stderr)
            if only_theirs:
                print(f"selected only by {args.against}: {only_theirs}", file=sys.stderr)

    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_bench(args) -> int:
    cases = load_suite(args.suite)
    mode = SynthesisMode.parse(args.mode) if args.mode else None
    suite = run_suite(cases, mode=mode, timeout_s=args.timeout)
    print(format_table(suite))
    if args.json:
        _write(args.json, json.dumps(suite_json(suite), indent=2) + "\n")
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = GeneratorSpec(
        attrs=args.attrs,
        range_size=args.range,
        positives=args.pos,
        negatives=args.neg,
        neutral=args.neutral,
        numeric_fraction=args.numeric_frac,
        seed=args.seed,
    )
    dataset_path, labels_path = write_files(spec, args.out)
    print(dataset_path)
    print(labels_path)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(snapshot_dir=args.snapshot_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticeselect",
        description="Synthesize object-selection predicates from labeled examples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a program from a dataset and labels")
    p.add_argument("--dataset", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--action", required=True, help="action expression, e.g. Remove or Cover(Blur)")
    p.add_argument("--mode", default="full", help="full|no-diff|no-abstraction|naive")
    p.add_argument("--timeout", type=float, default=60.0, help="seconds")
    p.add_argument("--out", help="write the program text here (default stdout)")
    p.add_argument("--emit-plan", dest="emit_plan", help="write the edit-plan JSON here")
    p.add_argument("--stats", help="write synthesis statistics JSON here")
    p.add_argument("--identity-fallback", action="store_true", dest="identity_fallback")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("check", help="check a program against labels (and another program)")
    p.add_argument("--dataset", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--program", required=True)
    p.add_argument("--against", help="second program; compare selections on every object")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="run a suite directory of benchmark cases")
    p.add_argument("--suite", required=True)
    p.add_argument("--mode", help="override mode for every case")
    p.add_argument("--timeout", type=float, help="override per-case timeout seconds")
    p.add_argument("--json", help="write the machine-readable report here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="generate a synthetic dataset + labels")
    p.add_argument("--attrs", type=int, required=True)
    p.add_argument("--range", type=int, required=True)
    p.add_argument("--pos", type=int, required=True)
    p.add_argument("--neg", type=int, required=True)
    p.add_argument("--neutral", type=int, default=0)
    p.add_argument("--numeric-frac", dest="numeric_frac", type=float, default=0.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("serve", help="run the interactive labeling service")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--snapshot-dir", dest="snapshot_dir")
    p.add_argument("--ui-dir", dest="ui_dir")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SynthesisTimeout as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    except UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER_ERROR


if __name__ == "__main__":
    sys.exit(main())
