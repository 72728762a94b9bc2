"""Command-line front end of the strong-separation logic tools.

Exit codes: 0 for sat, valid, holds and verified; 1 for unsat, invalid and
failing checks; 2 for usage and internal errors.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from tqdm import tqdm

from .abduce import abduce_positive, abduce_weakest, normal_form
from .decide import entails, model_check, sat, verdict_to_json
from .errors import InternalError, SslError, VerificationError
from .formula import NIL, render
from .formula import parse as parse_formula
from .limits import DEFAULT_LIMITS, VERIFY_LIMITS
from .model import model_from_json, model_to_dict
from .oracle import Mode, holds
from .program import parse_program
from .qbf import parse_qbf, qbf_eval, qbf_model_check, qbf_translate
from .symexec import discharge, vcgen

logger = logging.getLogger(__name__)

EXIT_SUCCESS, EXIT_FAILURE, EXIT_ERROR = 0, 1, 2


def _common_flags():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--json", action="store_true", default=False, help="Machine-readable output"
    )
    common.add_argument(
        "--vars",
        type=str,
        metavar="<x,y>",
        default="",
        help="Stack variables besides the free ones (nil is implicit)",
    )
    common.add_argument(
        "-v", "--verbose", action="store_true", default=False, help="Debug logging"
    )
    common.add_argument(
        "--max-vars",
        type=int,
        metavar="<n>",
        default=None,
        help="Limit of non-nil variable classes",
    )
    common.add_argument(
        "--force", action="store_true", default=False, help="Ignore size guards"
    )
    return common


def parse_args(argv=None):
    """Parse command line arguments"""
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="ssl", description="Decision procedures for strong-separation logic"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    cmd = commands.add_parser("sat", parents=[common], help="Satisfiability")
    cmd.add_argument("formula", type=str)

    cmd = commands.add_parser("entail", parents=[common], help="Entailment")
    cmd.add_argument("phi", type=str)
    cmd.add_argument("psi", type=str)

    cmd = commands.add_parser("check", parents=[common], help="Model checking")
    route = cmd.add_mutually_exclusive_group()
    route.add_argument("--ams", action="store_true", help="Abstraction (default)")
    route.add_argument("--oracle", action="store_true", help="Brute-force oracle")
    cmd.add_argument(
        "--differential", action="store_true", help="Run both and compare"
    )
    cmd.add_argument("--weak", action="store_true", help="Weak semantics (oracle)")
    cmd.add_argument("model", type=str, help="Model as JSON text or file")
    cmd.add_argument("formula", type=str)

    cmd = commands.add_parser("nf", parents=[common], help="Normal form")
    cmd.add_argument("formula", type=str)

    cmd = commands.add_parser("abduce", parents=[common], help="Abduction")
    cmd.add_argument("--minimal", action="store_true", help="Spatially minimal")
    cmd.add_argument("--positive", action="store_true", help="Positive fragment")
    cmd.add_argument("--explicit", action="store_true", help="Normal form result")
    cmd.add_argument("phi", type=str)
    cmd.add_argument("psi", type=str)

    cmd = commands.add_parser("verify", parents=[common], help="Verify a program")
    cmd.add_argument("--trace", action="store_true", help="Show symbolic states")
    cmd.add_argument("program", type=Path, metavar="<file>")

    cmd = commands.add_parser("qbf", parents=[common], help="QBF reduction")
    cmd.add_argument(
        "--model-check", action="store_true", help="Model check the empty heap"
    )
    cmd.add_argument("qbf", type=str, metavar="<expr>")

    return parser.parse_args(argv)


def _variables(args):
    names = [name.strip() for name in args.vars.split(",") if name.strip()]
    return set(names) | {NIL}


def _limits(args, base=DEFAULT_LIMITS):
    return base.override(max_vars=args.max_vars, force=args.force or None)


def _emit(args, data, lines):
    if args.json:
        print(json.dumps(data))
    else:
        for line in lines:
            print(line)


def _verdict_lines(verdict):
    lines = [f"status: {verdict.status.value}"]
    if verdict.witness is not None:
        lines.append(f"witness: {verdict.witness}")
    if verdict.ams is not None:
        lines.append(f"ams: {verdict.ams}")
    return lines


def run_sat(args):
    phi = parse_formula(args.formula)
    verdict = sat(phi, _variables(args), _limits(args))
    _emit(args, verdict_to_json(verdict), _verdict_lines(verdict))
    return EXIT_SUCCESS if verdict.success else EXIT_FAILURE


def run_entail(args):
    phi, psi = parse_formula(args.phi), parse_formula(args.psi)
    verdict = entails(phi, psi, _variables(args), limits=_limits(args))
    _emit(args, verdict_to_json(verdict), _verdict_lines(verdict))
    return EXIT_SUCCESS if verdict.success else EXIT_FAILURE


def _load_model(text):
    path = Path(text)
    if not text.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    return model_from_json(text)


def run_check(args):
    model = _load_model(args.model)
    phi = parse_formula(args.formula)
    mode = Mode.WEAK if args.weak else Mode.STRONG
    limits = _limits(args)

    if args.differential:
        by_ams = model_check(model, phi, limits)
        by_oracle = holds(model, phi, Mode.STRONG, limits=limits)
        if by_ams != by_oracle:
            raise InternalError(f"Oracle and abstraction disagree on {render(phi)}")
        result = by_ams
    elif args.oracle or args.weak:
        result = holds(model, phi, mode, limits=limits)
    else:
        result = model_check(model, phi, limits)

    status = "holds" if result else "fails"
    data = {"status": status, "model": model_to_dict(model)}
    _emit(args, data, [f"status: {status}"])
    return EXIT_SUCCESS if result else EXIT_FAILURE


def run_nf(args):
    phi = parse_formula(args.formula)
    nf = normal_form(phi, _variables(args), _limits(args))
    data = {
        "formula": render(nf.formula),
        "disjuncts": [render(d) for d in nf.disjuncts],
    }
    lines = [f"disjuncts: {len(nf)}", f"formula: {render(nf.formula)}"]
    _emit(args, data, lines)
    return EXIT_SUCCESS


def run_abduce(args):
    phi, psi = parse_formula(args.phi), parse_formula(args.psi)
    variables, limits = _variables(args), _limits(args)
    if args.positive:
        result = abduce_positive(phi, psi, variables, args.minimal, limits)
    else:
        result = abduce_weakest(
            phi, psi, variables, args.minimal, args.explicit, limits
        )
    data = {"solution": render(result.formula), "positive": result.positive}
    lines = [f"solution: {render(result.formula)}", f"positive: {result.positive}"]
    _emit(args, data, lines)
    return EXIT_SUCCESS


def run_verify(args):
    program = parse_program(args.program.read_text())
    limits = _limits(args, VERIFY_LIMITS)
    triples = vcgen(program)

    records, lines = [], []
    for triple in tqdm(triples, desc=f"Verifying {args.program.name}", leave=False):
        record = {"label": triple.label, "triple": str(triple)}
        lines.append(f"- condition: {triple.label}")
        try:
            result = discharge(triple, limits=limits)
        except VerificationError as e:
            record["status"] = "error"
            record["message"] = str(e)
            lines += ["  status: error", f"  message: {e}"]
            records.append(record)
            continue

        record.update(verdict_to_json(result.verdict))
        lines.append(f"  status: {result.verdict.status.value}")
        if result.verdict.witness is not None:
            lines.append(f"  countermodel: {result.verdict.witness}")
        if args.trace:
            record["trace"] = [str(state) for state in result.trace]
            lines.append("  trace:")
            lines += [f"    - {state}" for state in result.trace]
        records.append(record)

    verified = all(record["status"] == "valid" for record in records)
    lines.append(f"verified: {verified}")
    _emit(args, {"verified": verified, "conditions": records}, lines)
    return EXIT_SUCCESS if verified else EXIT_FAILURE


def run_qbf(args):
    f = parse_qbf(args.qbf)
    translation = qbf_translate(f)
    expected = qbf_eval(f)
    decided = sat(translation, limits=_limits(args)).success
    checked = qbf_model_check(f) if args.model_check else decided
    if decided != expected or checked != expected:
        raise InternalError(f"Translation disagrees with evaluation of {f}")

    status = "sat" if decided else "unsat"
    data = {"translation": render(translation), "value": expected, "status": status}
    lines = [
        f"translation: {render(translation)}",
        f"value: {str(expected).lower()}",
        f"status: {status}",
    ]
    _emit(args, data, lines)
    return EXIT_SUCCESS if decided else EXIT_FAILURE


COMMANDS = {
    "sat": run_sat,
    "entail": run_entail,
    "check": run_check,
    "nf": run_nf,
    "abduce": run_abduce,
    "verify": run_verify,
    "qbf": run_qbf,
}


def main(argv=None):
    """Run one subcommand and return its exit code"""
    args = parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return COMMANDS[args.command](args)
    except (SslError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
