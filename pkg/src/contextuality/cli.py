"""Command-line front end.

Exit codes: 0 analysis ran, 1 parse/usage error, 2 validation error,
3 an ``--assert-*`` flag failed.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import analysis, formats, kochen_specker, logic, quantum, relational
from .errors import ContextualityError, ParseError, StateSpaceError, ValidationError
from .scenario import EmpiricalModel, Semiring, enumerate_sections, format_rational

OK, PARSE_ERROR, VALIDATION_ERROR, ASSERTION_FAILED = 0, 1, 2, 3


@dataclass
class CommandOutcome:
    exit_code: int
    stdout: str = ""
    stderr: str = ""
    lines: list = field(default_factory=list, repr=False)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")

    def print_help(self, file=None):
        raise _HelpShown(self.format_help())

    def exit(self, status=0, message=None):
        if status:
            raise _UsageError(message or "")
        raise _HelpShown(message or "")


class _HelpShown(Exception):
    pass


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    p.add_argument(
        "--assert-noncontextual",
        action="store_true",
        default=argparse.SUPPRESS,
        help="exit 3 if the analysed object is contextual",
    )
    p.add_argument("--bound", type=int, default=argparse.SUPPRESS, help="state-space bound on global assignments")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = _Parser(prog="ctx", description="Contextuality analysis of empirical models.", parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="validate any supported JSON file")
    p.add_argument("file")

    p = sub.add_parser("check", parents=[common], help="full contextuality report for a model")
    p.add_argument("model")
    p.add_argument("--events", help="also evaluate a logical Bell inequality from this event file")

    p = sub.add_parser("bell", parents=[common], help="logical Bell inequality for a model")
    p.add_argument("model")
    p.add_argument("--events", required=True)

    p = sub.add_parser("quantum", parents=[common], help="Born-rule predictions")
    qsub = p.add_subparsers(dest="quantum_command", parser_class=_Parser)
    q = qsub.add_parser("bell-table", parents=[common], help="Bell-scenario table from a two-qubit state")
    q.add_argument("--angles", required=True, help="e.g. a1=0,a2=60,b1=0,b2=60")
    q.add_argument("--degrees", action="store_true", help="angles are in degrees (default radians)")
    q.add_argument("--state", choices=["bell", "upup"], default="bell")

    p = sub.add_parser("ks", parents=[common], help="Kochen-Specker covers")
    ksub = p.add_subparsers(dest="ks_command", parser_class=_Parser)
    for name, text in [("check", "direct satisfiability search"), ("criterion", "divisor criterion")]:
        k = ksub.add_parser(name, parents=[common], help=text)
        k.add_argument("cover")
    k = ksub.add_parser("realize", parents=[common], help="check an orthonormal vector labeling")
    k.add_argument("cover")
    k.add_argument("--vectors", required=True)
    k.add_argument("--exhaustive", action="store_true")
    k.add_argument("--assert-realized", action="store_true", help="exit 3 if the labeling fails")

    p = sub.add_parser("db", parents=[common], help="relational-database view")
    dsub = p.add_subparsers(dest="db_command", parser_class=_Parser)
    for name, text in [("join", "natural join"), ("universal", "universal relation")]:
        d = dsub.add_parser(name, parents=[common], help=text)
        d.add_argument("instance")
    d = dsub.add_parser("acyclic", parents=[common], help="GYO acyclicity of the schema")
    d.add_argument("instance")
    d.add_argument("--assert-acyclic", action="store_true", help="exit 3 if the schema is cyclic")
    d = dsub.add_parser("extend", parents=[common], help="glue a probability model on an acyclic cover")
    d.add_argument("model")
    return parser


def _bound(args) -> Optional[int]:
    if getattr(args, "bound", None) is not None:
        return args.bound
    env = os.environ.get("CTX_BOUND")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ParseError(f"CTX_BOUND must be an integer, got {env!r}") from None
    return None


def render_model(model: EmpiricalModel) -> list[str]:
    """Rows are contexts, columns joint outcomes."""
    sc = model.scenario

    def cell(d, s):
        w = d.weight(s)
        if model.kind is Semiring.BOOLEAN:
            return "1" if w else "0"
        return format_rational(w)

    labels = [[f"({','.join(str(s[m]) for m in c)})" for s in enumerate_sections(sc, c)] for c in sc.contexts]
    names = [" ".join(map(str, c)) for c in sc.contexts]
    lead = max(len(n) for n in names)
    if all(lab == labels[0] for lab in labels):
        rows = [[cell(d, s) for s in enumerate_sections(sc, c)] for c, d in zip(sc.contexts, model.tables)]
        width = max(len(x) for x in labels[0] + [v for r in rows for v in r])
        out = [" " * lead + " | " + " ".join(x.ljust(width) for x in labels[0])]
        out.append("-" * len(out[0]))
        for n, r in zip(names, rows):
            out.append(n.ljust(lead) + " | " + " ".join(v.ljust(width) for v in r))
        return [line.rstrip() for line in out]
    out = []
    for n, c, d in zip(names, sc.contexts, model.tables):
        entries = [f"{lab}={cell(d, s)}" for lab, s in zip(labels[sc.contexts.index(c)], enumerate_sections(sc, c))]
        out.append(n.ljust(lead) + " | " + " ".join(entries))
    return out


def _load_model(path) -> EmpiricalModel:
    _, model = formats.load_model(formats.read_json(path))
    if model is None:
        raise ValidationError(f"{path} describes a scenario but no model")
    return model


def _fmt_section(c, s) -> str:
    return "(" + ", ".join(f"{m}={s[m]}" for m in c) + ")"


def _cmd_validate(args, out) -> int:
    data = formats.read_json(args.file)
    kind = formats.detect_format(data)
    if kind in ("model", "scenario"):
        formats.load_model(data)
    elif kind == "cover":
        formats.load_cover(data)
    elif kind == "instance":
        formats.load_instance(data)
    elif kind == "labeling":
        formats.load_labeling(data)
    else:
        formats.load_events(data)
    if args.json:
        out.append(formats.dumps({"file": args.file, "format": kind, "valid": True}))
    else:
        out.append(f"{args.file}: valid {kind}")
    return OK


def _cmd_check(args, out) -> int:
    model = _load_model(args.model)
    bound = _bound(args)
    report = analysis.classify(model, bound)
    certificate = None
    if args.events:
        events = formats.load_events(formats.read_json(args.events), model.scenario)
        certificate = logic.bell_violation(model, events, bound)
    functional = None
    if model.is_rational and report.compatible and report.probabilistically_contextual:
        functional = analysis.separating_functional(model, bound)

    if args.json:
        payload = report.to_json()
        if certificate is not None:
            payload = {"report": payload, "bell": certificate.to_json()}
        out.append(formats.dumps(payload))
    else:
        out.extend(render_model(model))
        out.append("")
        out.append(f"compatible (no-signalling):     {_yn(report.compatible)}")
        if report.probabilistically_contextual is not None:
            out.append(f"probabilistically contextual:   {_yn(report.probabilistically_contextual)}")
        out.append(f"logically contextual:           {_yn(report.logically_contextual)}")
        if report.logical_witness:
            c, s = report.logical_witness
            out.append(f"  witness: context {{{', '.join(map(str, c))}}}, section {_fmt_section(c, s)}")
        out.append(f"strongly contextual:            {_yn(report.strongly_contextual)}")
        if report.signed_measure_exists is not None:
            out.append(f"signed global measure exists:   {_yn(report.signed_measure_exists)}")
        if functional is not None:
            value = analysis.functional_value(model, functional)
            out.append(
                f"violation certificate: separating functional evaluates to {format_rational(value)} > 0 "
                "(at most 0 on every global assignment)"
            )
        if certificate is not None:
            out.extend(_bell_lines(certificate))
    contextual = report.logically_contextual or report.strongly_contextual or bool(report.probabilistically_contextual)
    if getattr(args, "assert_noncontextual", False) and contextual:
        return ASSERTION_FAILED
    return OK


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def _bell_lines(cert) -> list[str]:
    lines = []
    for i, (e, p) in enumerate(zip(cert.events, cert.probabilities), 1):
        lines.append(f"  p{i} = {format_rational(p):>6}   on {{{', '.join(map(str, e.context))}}}: {e.formula}")
    lines.append(f"sum p_i = {format_rational(cert.total)}, bound N-1 = {cert.bound}, violation = {format_rational(cert.violation)}")
    return lines


def _cmd_bell(args, out) -> int:
    model = _load_model(args.model)
    events = formats.load_events(formats.read_json(args.events), model.scenario)
    cert = logic.bell_violation(model, events, _bound(args))
    if args.json:
        out.append(formats.dumps(cert.to_json()))
    else:
        out.extend(_bell_lines(cert))
    if getattr(args, "assert_noncontextual", False) and cert.violation > 0:
        return ASSERTION_FAILED
    return OK


def parse_angles(text: str, degrees: bool) -> dict:
    angles = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or not name:
            raise ParseError(f"bad angle specification {part!r}; expected name=value")
        try:
            x = float(value)
        except ValueError:
            raise ParseError(f"bad angle value {value!r}") from None
        if not math.isfinite(x):
            raise ValidationError(f"angle for {name} is not finite")
        angles[name] = math.radians(x) if degrees else x
    missing = sorted({"a1", "a2", "b1", "b2"} - set(angles))
    extra = sorted(set(angles) - {"a1", "a2", "b1", "b2"})
    if missing or extra:
        raise ValidationError(f"angles needed for a1, a2, b1, b2 (missing {missing}, unknown {extra})")
    return angles


def _cmd_quantum(args, out) -> int:
    if args.quantum_command != "bell-table":
        raise _UsageError("quantum: expected subcommand 'bell-table'")
    angles = parse_angles(args.angles, args.degrees)
    state = quantum.bell_state() if args.state == "bell" else quantum.tensor_product(quantum.UP, quantum.UP)
    model = quantum.bell_table(angles, state)
    if args.json:
        out.append(formats.dumps(formats.model_to_json(model)))
    else:
        out.extend(render_model(model))
    return OK


def _cmd_ks(args, out) -> int:
    if args.ks_command is None:
        raise _UsageError("ks: expected subcommand check, criterion or realize")
    cover = formats.load_cover(formats.read_json(args.cover))
    if args.ks_command == "check":
        contextual = kochen_specker.is_ks_contextual(cover)
        if args.json:
            out.append(formats.dumps({"contextual": contextual}))
        else:
            out.append("contextual" if contextual else "non-contextual")
        failed = contextual and getattr(args, "assert_noncontextual", False)
    elif args.ks_command == "criterion":
        rep = kochen_specker.divisor_criterion(cover)
        if args.json:
            out.append(formats.dumps(rep.to_json()))
        elif rep.failing_divisor:
            out.append(
                f"contextual by divisor criterion: gcd of degrees {rep.gcd}, "
                f"{rep.failing_divisor} does not divide {rep.cover_size} contexts"
            )
        else:
            out.append(f"inconclusive: every divisor of gcd {rep.gcd} divides {rep.cover_size}")
        failed = rep.failing_divisor is not None and getattr(args, "assert_noncontextual", False)
    else:
        labeling = formats.load_labeling(formats.read_json(args.vectors))
        ok, why = kochen_specker.verify_orthonormal_realization(labeling, cover, args.exhaustive)
        if args.json:
            out.append(formats.dumps({"realized": ok, "failure": why}))
        else:
            out.append("realized" if ok else f"not realized: {why}")
        failed = not ok and args.assert_realized
    return ASSERTION_FAILED if failed else OK


def _cmd_db(args, out) -> int:
    if args.db_command is None:
        raise _UsageError("db: expected subcommand join, universal, acyclic or extend")
    if args.db_command == "extend":
        model = _load_model(args.model)
        dist = relational.vorobev_extend(model)
        if args.json:
            out.append(formats.dumps(formats.global_distribution_to_json(dist)))
        else:
            sc = dist.scenario
            out.append(" ".join(map(str, sc.measurements)) + " | weight")
            for g, w in dist.sorted_items():
                out.append(" ".join(str(g[m]) for m in sc.measurements) + " | " + format_rational(w))
        return OK

    instance = formats.load_instance(formats.read_json(args.instance))
    if args.db_command == "acyclic":
        red = relational.is_acyclic(instance.schema)
        if args.json:
            out.append(formats.dumps({"acyclic": red.acyclic, "trace": [list(map(_jsonable, t)) for t in red.trace]}))
        else:
            out.append("acyclic" if red.acyclic else "cyclic")
            for step in red.trace:
                if step[0] == "attribute":
                    out.append(f"  delete attribute {step[1]} from element {step[2]}")
                else:
                    tail = f" (contained in element {step[2]})" if step[2] is not None else " (last)"
                    out.append(f"  delete element {step[1]}{tail}")
        return ASSERTION_FAILED if (args.assert_acyclic and not red.acyclic) else OK

    joined = relational.natural_join(instance)
    if args.db_command == "join":
        if args.json:
            out.append(formats.dumps(formats.relation_to_json(joined)))
        else:
            out.extend(_relation_lines(joined))
        return OK
    universal = relational.universal_relation(instance)
    if args.json:
        payload = {"exists": universal is not None}
        if universal is not None:
            payload["relation"] = formats.relation_to_json(universal)
        out.append(formats.dumps(payload))
    elif universal is None:
        out.append("no universal relation: the join does not project back onto every relation")
    else:
        out.append("universal relation:")
        out.extend(_relation_lines(universal))
    if getattr(args, "assert_noncontextual", False) and universal is None:
        return ASSERTION_FAILED
    return OK


def _jsonable(x):
    return x if x is None or isinstance(x, int) else str(x)


def _relation_lines(rel) -> list[str]:
    lines = [" ".join(map(str, rel.attributes))]
    lines.extend(" ".join(map(str, r)) for r in rel.rows())
    lines.append(f"({len(rel)} tuple{'s' if len(rel) != 1 else ''})")
    return lines


COMMANDS = {
    "validate": _cmd_validate,
    "check": _cmd_check,
    "bell": _cmd_bell,
    "quantum": _cmd_quantum,
    "ks": _cmd_ks,
    "db": _cmd_db,
}


def run(argv: Sequence[str]) -> CommandOutcome:
    """Execute one command and capture its output and exit code."""
    parser = build_parser()
    out: list[str] = []
    try:
        args = parser.parse_args(list(argv))
        for flag in ("json", "assert_noncontextual"):
            if not hasattr(args, flag):
                setattr(args, flag, False)
        if args.command is None:
            raise _UsageError(parser.format_usage() + "ctx: error: a command is required")
        code = COMMANDS[args.command](args, out)
    except _HelpShown as exc:
        return CommandOutcome(OK, str(exc))
    except _UsageError as exc:
        return CommandOutcome(PARSE_ERROR, "", str(exc))
    except ParseError as exc:
        return CommandOutcome(PARSE_ERROR, "", f"parse error: {exc}")
    except (ValidationError, StateSpaceError, ContextualityError) as exc:
        return CommandOutcome(VALIDATION_ERROR, "", f"error: {exc}")
    text = "\n".join(out) + ("\n" if out else "")
    return CommandOutcome(code, text, "", out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    outcome = run(sys.argv[1:] if argv is None else argv)
    if outcome.stdout:
        sys.stdout.write(outcome.stdout)
    if outcome.stderr:
        sys.stderr.write(outcome.stderr.rstrip("\n") + "\n")
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
