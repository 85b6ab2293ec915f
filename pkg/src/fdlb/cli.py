"""Command-line interface.

Subcommands::

    fdlb check KB                         consistency + conflict report
    fdlb rank KB --ubox FILE [...]        score and rank choices per expert
    fdlb complete KB --ubox FILE [...]    list undecided (choice, attribute) pairs
    fdlb explain KB -i IND -c CONCEPT     derivation tree behind a bound

Exit codes: 0 success; 1 usage or parse problems; 2 inconsistent knowledge
base; 3 undecided pairs found by ``complete`` or ``rank
--strict-complete``; 4 nothing to explain (the queried bound is still at
its default).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .decision import DecisionReport, UtilityBox, rank as rank_choices
from .kbtext import (
    ParseDiagnostic,
    parse_concept_text,
    parse_kb,
    parse_ubox,
    render_concept,
    render_decimal,
    render_statement,
)
from .model import FdlbError, KnowledgeBase
from .reasoner import (
    Explanation,
    ExplanationStep,
    InconsistencyError,
    SaturatedKb,
    format_conflict,
    format_explanation,
    saturate,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONSISTENT = 2
EXIT_INCOMPLETE = 3
EXIT_NO_DERIVATION = 4


class _CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        self.message = message
        self.code = code
        super().__init__(message)


def _print_diagnostics(path: str, diagnostics: tuple[ParseDiagnostic, ...]) -> None:
    for d in diagnostics:
        where = f"{path}:{d.span.line}:{d.span.column}" if d.span else path
        print(f"{where}: {d.severity}: {d.message}", file=sys.stderr)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_kb(path: str) -> KnowledgeBase:
    result = parse_kb(_read(path))
    _print_diagnostics(path, result.diagnostics)
    if result.kb is None:
        raise _CliError(f"{path}: knowledge base not loaded")
    return result.kb


def _load_ubox(path: str) -> UtilityBox:
    result = parse_ubox(_read(path))
    _print_diagnostics(path, result.diagnostics)
    if result.ubox is None:
        raise _CliError(f"{path}: utility box not loaded")
    return result.ubox


def _saturate(kb: KnowledgeBase) -> SaturatedKb:
    try:
        return saturate(kb)
    except InconsistencyError as exc:
        for conflict in exc.report.conflicts:
            print(format_conflict(conflict), file=sys.stderr)
        raise _CliError("the knowledge base is inconsistent", EXIT_INCONSISTENT) from None


def _choices(args: argparse.Namespace, kb: KnowledgeBase) -> list[str]:
    if args.choices:
        names = [name.strip() for name in args.choices.split(",") if name.strip()]
        if not names:
            raise _CliError("--choices needs at least one individual")
        return names
    return list(kb.individuals)


def _emit_json(payload: object) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


# --------------------------------------------------------------------------
# check


def _cmd_check(args: argparse.Namespace) -> int:
    kb = _load_kb(args.kb)
    try:
        saturate(kb)
        consistent = True
        conflicts = ()
    except InconsistencyError as exc:
        consistent = False
        conflicts = exc.report.conflicts
    if args.format == "structured":
        payload = {
            "kb": args.kb,
            "consistent": consistent,
            "conflicts": [
                {
                    "individual": c.individual,
                    "concept": render_concept(c.expr),
                    "lo": render_decimal(c.lo_value),
                    "hi": render_decimal(c.hi_value),
                }
                for c in conflicts
            ],
        }
        _emit_json(payload)
    else:
        if consistent:
            print("consistent")
        else:
            for c in conflicts:
                print(format_conflict(c))
    return EXIT_OK if consistent else EXIT_INCONSISTENT


# --------------------------------------------------------------------------
# rank / complete


def _report_payload(report: DecisionReport) -> dict:
    return {
        "id": report.expert_id,
        "ideal": report.ideal,
        "complete": report.complete,
        "ranking": [
            {
                "choice": row.choice,
                "score": render_decimal(row.score),
                "contributions": [
                    {
                        "attribute": c.attribute,
                        "weight": render_decimal(c.weight),
                        "bound": None if c.bound is None else render_decimal(c.bound),
                        "contribution": render_decimal(c.contribution),
                    }
                    for c in row.contributions
                ],
            }
            for row in report.rows
        ],
        "undecided": [{"choice": ch, "attribute": attr} for ch, attr in report.undecided],
    }


def _print_report(report: DecisionReport) -> None:
    print(f"== {report.expert_id} ==")
    for position, row in enumerate(report.rows, start=1):
        print(f"{position}. {row.choice}: {render_decimal(row.score)}")
        for c in row.contributions:
            if c.bound is None:
                print(f"   {c.attribute}: weight {render_decimal(c.weight)}, undecided, contributes 0")
            else:
                print(
                    f"   {c.attribute}: weight {render_decimal(c.weight)}, "
                    f"bound {render_decimal(c.bound)}, contributes {render_decimal(c.contribution)}"
                )
    print(f"ideal choice: {report.ideal}")
    if report.undecided:
        pairs = ", ".join(f"{ch}/{attr}" for ch, attr in report.undecided)
        print(f"undecided: {pairs}")


def _cmd_rank(args: argparse.Namespace) -> int:
    kb = _load_kb(args.kb)
    uboxes = [_load_ubox(path) for path in args.ubox]
    sat = _saturate(kb)
    choices = _choices(args, kb)
    try:
        reports = [rank_choices(sat, choices, ubox) for ubox in uboxes]
    except FdlbError as exc:
        raise _CliError(str(exc)) from None
    if args.format == "structured":
        _emit_json({
            "kb": args.kb,
            "consistent": True,
            "experts": [_report_payload(r) for r in reports],
        })
    else:
        for i, report in enumerate(reports):
            if i:
                print()
            _print_report(report)
    if args.strict_complete and any(not r.complete for r in reports):
        return EXIT_INCOMPLETE
    return EXIT_OK


def _cmd_complete(args: argparse.Namespace) -> int:
    kb = _load_kb(args.kb)
    uboxes = [_load_ubox(path) for path in args.ubox]
    sat = _saturate(kb)
    choices = _choices(args, kb)
    try:
        reports = [rank_choices(sat, choices, ubox) for ubox in uboxes]
    except FdlbError as exc:
        raise _CliError(str(exc)) from None
    if args.format == "structured":
        _emit_json({
            "kb": args.kb,
            "consistent": True,
            "experts": [
                {
                    "id": r.expert_id,
                    "complete": r.complete,
                    "undecided": [{"choice": ch, "attribute": attr} for ch, attr in r.undecided],
                }
                for r in reports
            ],
        })
    else:
        for report in reports:
            if report.complete:
                print(f"{report.expert_id}: complete")
            else:
                print(f"{report.expert_id}: incomplete ({len(report.undecided)} undecided)")
                for choice, attr in report.undecided:
                    print(f"  {choice} / {attr}")
    if any(not r.complete for r in reports):
        return EXIT_INCOMPLETE
    return EXIT_OK


# --------------------------------------------------------------------------
# explain


def _explain_payload(args: argparse.Namespace, explanation: Explanation) -> dict:
    def tree(step: ExplanationStep) -> dict:
        node = step.node
        out = {
            "bound": node.kind,
            "individual": node.individual,
            "concept": render_concept(node.expr),
            "value": render_decimal(node.value),
            "rule": node.rule,
            "source": None if node.source is None else render_statement(node.source),
            "note": node.note or None,
            "cyclic": step.cyclic,
            "children": [tree(child) for child in step.children],
        }
        return out

    return {
        "kb": args.kb,
        "individual": explanation.individual,
        "concept": render_concept(explanation.expr),
        "bound": explanation.kind,
        "value": render_decimal(explanation.value),
        "tree": tree(explanation.root),
    }


def _cmd_explain(args: argparse.Namespace) -> int:
    kb = _load_kb(args.kb)
    concept_result = parse_concept_text(args.concept, dict(kb.roles))
    _print_diagnostics("<concept>", concept_result.diagnostics)
    if concept_result.concept is None:
        raise _CliError("concept expression not parsed")
    sat = _saturate(kb)
    from .reasoner import NoDerivationError, UnknownIndividualError

    try:
        explanation = sat.explain(args.individual, concept_result.concept, args.bound)
    except NoDerivationError as exc:
        raise _CliError(str(exc), EXIT_NO_DERIVATION) from None
    except UnknownIndividualError as exc:
        raise _CliError(str(exc)) from None
    except InconsistencyError as exc:
        for conflict in exc.report.conflicts:
            print(format_conflict(conflict), file=sys.stderr)
        raise _CliError("the knowledge base is inconsistent", EXIT_INCONSISTENT) from None
    if args.format == "structured":
        _emit_json(_explain_payload(args, explanation))
    else:
        print(format_explanation(explanation))
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; 2 means "inconsistent" here
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise _CliError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="fdlb",
        description="Reason over fuzzy knowledge bases and rank choices by expert utilities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("text", "structured"), default="text",
                       help="output as readable text (default) or JSON")

    p_check = sub.add_parser("check", help="check consistency and report conflicts")
    p_check.add_argument("kb", help="knowledge-base file")
    add_format(p_check)
    p_check.set_defaults(func=_cmd_check)

    def add_selection(p: argparse.ArgumentParser) -> None:
        p.add_argument("--ubox", action="append", required=True, metavar="FILE",
                       help="utility-box file; repeat for several experts")
        group = p.add_mutually_exclusive_group()
        group.add_argument("--choices", metavar="A,B,C",
                           help="comma-separated choice individuals")
        group.add_argument("--all-individuals", action="store_true",
                           help="rank every individual (the default)")

    p_rank = sub.add_parser("rank", help="score and rank choices for each expert")
    p_rank.add_argument("kb", help="knowledge-base file")
    add_selection(p_rank)
    p_rank.add_argument("--strict-complete", action="store_true",
                        help="exit with status 3 when any (choice, attribute) pair is undecided")
    add_format(p_rank)
    p_rank.set_defaults(func=_cmd_rank)

    p_complete = sub.add_parser("complete", help="list undecided (choice, attribute) pairs")
    p_complete.add_argument("kb", help="knowledge-base file")
    add_selection(p_complete)
    add_format(p_complete)
    p_complete.set_defaults(func=_cmd_complete)

    p_explain = sub.add_parser("explain", help="show the derivation behind an entailed bound")
    p_explain.add_argument("kb", help="knowledge-base file")
    p_explain.add_argument("--individual", "-i", required=True, help="individual to query")
    p_explain.add_argument("--concept", "-c", required=True, help="concept expression to query")
    p_explain.add_argument("--bound", choices=("lo", "hi"), default="lo",
                           help="which bound to explain (default: lo)")
    add_format(p_explain)
    p_explain.set_defaults(func=_cmd_explain)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _CliError as exc:
        print(f"fdlb: error: {exc.message}", file=sys.stderr)
        return exc.code
    except FdlbError as exc:
        print(f"fdlb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
