"""Command-line front end.

Exit codes: 0 success / completely positive, 1 negative verdict (not CP,
validation failed), 2 invalid input or I/O error.

    gpc decomp build --name m4-example2 --out m4.json
    gpc decomp validate --in m4.json
    gpc channel check-cp --channel ch.json --method both
    gpc sample --decomp qubit-pauli --count 10000 --seed 7
    gpc verify --suite all
    gpc plot-tetra --lambda3 0 --out slice.svg
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from gpc.channel import (
    GeneralizedPauliChannel,
    InvalidDecomposition,
    analytic_cp,
    apply,
    choi,
    kraus_form,
    numeric_cp,
    sample_cp_agreement,
)
from gpc.constructions import (
    build_decomposition,
    decomposition_from_json,
    decomposition_to_json,
    validate_decomposition,
)
from gpc.matcore import matrix_from_json, matrix_to_json

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def emit(obj, out: str | None) -> None:
    text = dumps(obj)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc}") from exc


def read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_decomposition(spec):
    if isinstance(spec, str):
        return build_decomposition(spec)
    return decomposition_from_json(spec)


def channel_to_json(ch: GeneralizedPauliChannel, decomposition=None) -> dict:
    return {"decomposition": decomposition if decomposition is not None
            else decomposition_to_json(ch.decomposition), "lambda": list(ch.lam)}


def load_channel(path: str) -> GeneralizedPauliChannel:
    obj = read_json(path)
    try:
        D = load_decomposition(obj["decomposition"])
        ch = GeneralizedPauliChannel(D, obj["lambda"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed channel JSON: {exc}") from exc
    report = validate_decomposition(D)
    if not report.passed:
        failed = ", ".join(c.name for c in report.checks if not c.passed)
        raise InvalidDecomposition(f"decomposition {D.name!r} failed: {failed}")
    return ch


def parse_box(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"box must be 'lo,hi', got {text!r}") from exc
    if not lo <= hi:
        raise InputError(f"box lower bound exceeds upper bound: {text!r}")
    return lo, hi


# -- commands --------------------------------------------------------------------

def cmd_decomp(args) -> int:
    if args.action == "build":
        D = build_decomposition(args.name)
        emit(decomposition_to_json(D), args.out)
        return EXIT_OK
    D = decomposition_from_json(read_json(args.input))
    report = validate_decomposition(D)
    emit(report.to_json(), args.out)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_channel(args) -> int:
    ch = load_channel(args.channel)
    if args.action == "apply":
        if not args.state:
            raise InputError("apply needs --state")
        A = matrix_from_json(read_json(args.state))
        emit(matrix_to_json(apply(ch, A)), args.out)
        return EXIT_OK
    if args.action == "choi":
        emit(matrix_to_json(choi(ch)), args.out)
        return EXIT_OK
    if args.action == "kraus":
        emit(kraus_form(ch).to_json(), args.out)
        return EXIT_OK

    if args.method == "numeric":
        ok, lo = numeric_cp(ch)
        emit({"numeric_cp": ok, "min_choi_eigenvalue": lo}, args.out)
        return EXIT_OK if ok else EXIT_NEGATIVE
    report = analytic_cp(ch)
    payload = report.to_json()
    if args.method == "analytic":
        return _finish(payload, report.analytic_cp, args.out)
    if report.analytic_cp != report.numeric_cp:
        payload["disagreement"] = True
        emit(payload, args.out)
        return EXIT_ERROR
    return _finish(payload, report.analytic_cp, args.out)


def _finish(payload, ok: bool, out) -> int:
    emit(payload, out)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_sample(args) -> int:
    D = build_decomposition(args.decomp)
    box = parse_box(args.box)
    stats = sample_cp_agreement(D, args.count, args.seed, box, args.margin,
                                record=bool(args.figure))
    payload = {
        "decomposition": D.name,
        "count": args.count,
        "seed": args.seed,
        "box": list(box),
        "margin": args.margin,
        **stats.to_json(),
    }
    if args.figure:
        from gpc.plotting import plot_sample_scatter

        try:
            plot_sample_scatter(stats.records, args.figure, D.name)
        except OSError as exc:
            raise InputError(f"cannot write {args.figure}: {exc}") from exc
        payload["figure"] = args.figure
    emit(payload, args.out)
    return EXIT_OK if stats.disagree == 0 and stats.kraus_disagree == 0 else EXIT_NEGATIVE


def cmd_verify(args) -> int:
    from gpc.verify import run_suite

    reports = run_suite(args.suite, args.seed)
    passed = all(r.passed for r in reports)
    emit({"suite": args.suite, "seed": args.seed, "passed": passed,
          "reports": [r.to_json() for r in reports]}, args.out)
    return EXIT_OK if passed else EXIT_NEGATIVE


def cmd_plot_tetra(args) -> int:
    from gpc.plotting import plot_tetrahedron_slice

    if args.resolution < 8:
        raise InputError("resolution must be at least 8")
    try:
        summary = plot_tetrahedron_slice(args.lambda3, args.resolution, args.out)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from exc
    summary["figure"] = args.out
    emit(summary, args.report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gpc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decomp", help="build or validate a decomposition")
    p.add_argument("action", choices=["build", "validate"])
    p.add_argument("--name", help="qubit-pauli, m4-example2 or mub-p<k>")
    p.add_argument("--in", dest="input", help="decomposition JSON to validate")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decomp)

    p = sub.add_parser("channel", help="apply, export or certify a channel")
    p.add_argument("action", choices=["apply", "choi", "kraus", "check-cp"])
    p.add_argument("--channel", required=True)
    p.add_argument("--state")
    p.add_argument("--method", choices=["analytic", "numeric", "both"], default="both")
    p.add_argument("--out")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("sample", help="analytic vs numeric CP agreement on random weights")
    p.add_argument("--decomp", required=True)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", default="-1,1", help="lo,hi applied to every coordinate (write --box=-1,1 for negative bounds)")
    p.add_argument("--margin", type=float, default=1e-6)
    p.add_argument("--figure", help="write a margin/eigenvalue scatter (SVG)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="run the identity oracles")
    p.add_argument("--suite", choices=["all", "lemmas", "projections", "fmap"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot-tetra", help="plot a fixed-lambda3 slice of the qubit CP region")
    p.add_argument("--lambda3", type=float, required=True)
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--out", required=True, help="SVG path")
    p.add_argument("--report", help="summary JSON path (default stdout)")
    p.set_defaults(func=cmd_plot_tetra)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        if args.command == "decomp" and args.action == "build" and not args.name:
            raise InputError("build needs --name")
        if args.command == "decomp" and args.action == "validate" and not args.input:
            raise InputError("validate needs --in")
        if args.command == "sample" and args.count < 0:
            raise InputError("count must be non-negative")
        return args.func(args)
    except (InputError, InvalidDecomposition, ValueError) as exc:
        print(f"gpc: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
