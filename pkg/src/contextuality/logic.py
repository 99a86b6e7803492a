"""Propositional events over measurement outcomes and logical Bell inequalities.

Atoms are equalities ``m = o``.  Formulas are evaluated against a section
(or a global assignment) by looking up the outcome of each atom's
measurement.

Text syntax is prefix, s-expression style::

    (iff (= a1 0) (= b1 0))
    (xor (= a2 0) (= b2 0))
    (and (= x 1) (not (= x 1)))

with connectives ``not and or imp iff xor``; ``and``/``or`` are n-ary.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .analysis import enumerate_global_assignments
from .errors import IncompatibleModelError, ParseError, SatisfiableFamilyError, ValidationError
from .scenario import EmpiricalModel, LocalSection, MeasurementScenario, is_compatible


class Formula:
    def evaluate(self, valuation: Mapping) -> bool:
        raise NotImplementedError

    def measurements(self) -> frozenset:
        raise NotImplementedError

    def atoms(self) -> list["Atom"]:
        raise NotImplementedError


@dataclass(frozen=True)
class Atom(Formula):
    measurement: object
    outcome: object

    def evaluate(self, valuation):
        return valuation[self.measurement] == self.outcome

    def measurements(self):
        return frozenset([self.measurement])

    def atoms(self):
        return [self]

    def __str__(self):
        return f"(= {self.measurement} {self.outcome})"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def evaluate(self, valuation):
        return not self.arg.evaluate(valuation)

    def measurements(self):
        return self.arg.measurements()

    def atoms(self):
        return self.arg.atoms()

    def __str__(self):
        return f"(not {self.arg})"


@dataclass(frozen=True)
class _Connective(Formula):
    args: tuple

    name = ""

    def measurements(self):
        return frozenset().union(*(a.measurements() for a in self.args))

    def atoms(self):
        return [x for a in self.args for x in a.atoms()]

    def __str__(self):
        return "(" + " ".join([self.name, *map(str, self.args)]) + ")"


class And(_Connective):
    name = "and"

    def evaluate(self, valuation):
        return all(a.evaluate(valuation) for a in self.args)


class Or(_Connective):
    name = "or"

    def evaluate(self, valuation):
        return any(a.evaluate(valuation) for a in self.args)


class Imp(_Connective):
    name = "imp"

    def evaluate(self, valuation):
        p, q = self.args
        return (not p.evaluate(valuation)) or q.evaluate(valuation)


class Iff(_Connective):
    name = "iff"

    def evaluate(self, valuation):
        p, q = self.args
        return p.evaluate(valuation) == q.evaluate(valuation)


class Xor(_Connective):
    name = "xor"

    def evaluate(self, valuation):
        p, q = self.args
        return p.evaluate(valuation) != q.evaluate(valuation)


_BINARY = {"imp": Imp, "iff": Iff, "xor": Xor}
_NARY = {"and": And, "or": Or}
_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_formula(text: str, scenario: Optional[MeasurementScenario] = None) -> Formula:
    """Parse prefix syntax into a :class:`Formula`.

    With a ``scenario``, measurement names and outcome tokens are resolved
    against it (so the token ``0`` matches an integer outcome ``0``) and
    unknown names are rejected.
    """
    tokens = _TOKEN.findall(text)
    pos = 0

    def resolve_measurement(tok):
        if scenario is None:
            return tok
        for m in scenario.measurements:
            if str(m) == tok:
                return m
        raise ParseError(f"unknown measurement {tok!r}")

    def resolve_outcome(m, tok):
        if scenario is None:
            return tok
        for o in scenario.domain(m):
            if str(o) == tok:
                return o
        raise ParseError(f"outcome {tok!r} not in domain of {m!r}")

    def expr():
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of formula")
        tok = tokens[pos]
        if tok != "(":
            raise ParseError(f"expected '(' at token {pos}, got {tok!r}")
        pos += 1
        if pos >= len(tokens):
            raise ParseError("unexpected end of formula")
        head = tokens[pos]
        pos += 1
        if head == "=":
            if pos + 2 > len(tokens):
                raise ParseError("incomplete atom")
            m_tok, o_tok = tokens[pos], tokens[pos + 1]
            if "(" in (m_tok, o_tok) or ")" in (m_tok, o_tok):
                raise ParseError("atom arguments must be names")
            pos += 2
            m = resolve_measurement(m_tok)
            node = Atom(m, resolve_outcome(m, o_tok))
        else:
            args = []
            while pos < len(tokens) and tokens[pos] != ")":
                args.append(expr())
            if head == "not":
                if len(args) != 1:
                    raise ParseError("'not' takes one argument")
                node = Not(args[0])
            elif head in _BINARY:
                if len(args) != 2:
                    raise ParseError(f"'{head}' takes two arguments")
                node = _BINARY[head](tuple(args))
            elif head in _NARY:
                if not args:
                    raise ParseError(f"'{head}' needs at least one argument")
                node = _NARY[head](tuple(args))
            else:
                raise ParseError(f"unknown connective {head!r}")
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ParseError("missing ')'")
        pos += 1
        return node

    node = expr()
    if pos != len(tokens):
        raise ParseError(f"trailing tokens after formula: {tokens[pos:]!r}")
    return node


@dataclass(frozen=True)
class EventFormula:
    """A formula tagged with the context whose table it is read against."""

    context: tuple
    formula: Formula

    def __post_init__(self):
        outside = self.formula.measurements() - set(self.context)
        if outside:
            raise ValidationError(f"formula {self.formula} mentions {sorted(map(str, outside))} outside {self.context!r}")


def event(scenario: MeasurementScenario, context, formula: Union[str, Formula]) -> EventFormula:
    """Tag ``formula`` with a cover context, checking atoms against the domains."""
    if isinstance(formula, str):
        formula = parse_formula(formula, scenario)
    c = scenario.contexts[scenario.context_index(context)]
    for a in formula.atoms():
        if a.measurement in c and a.outcome not in scenario.domain(a.measurement):
            raise ValidationError(f"outcome {a.outcome!r} not in domain of {a.measurement!r}")
    return EventFormula(c, formula)


def event_probability(model: EmpiricalModel, ev: EventFormula) -> Fraction:
    """Total weight of the sections of ``ev.context`` satisfying the formula."""
    if not model.is_rational:
        raise ValidationError("event probabilities need a rational model")
    d = model.table(ev.context)
    return sum((w for s, w in d.weights.items() if ev.formula.evaluate(s)), Fraction(0))


def jointly_satisfiable(
    formulas: Sequence[Union[EventFormula, Formula]],
    scenario: MeasurementScenario,
    bound: Optional[int] = None,
) -> tuple[bool, Optional[LocalSection]]:
    """Exhaustive search for a global assignment satisfying every formula.

    Returns ``(True, first satisfying assignment)`` or ``(False, None)``.
    """
    fs = [f.formula if isinstance(f, EventFormula) else f for f in formulas]
    for g in enumerate_global_assignments(scenario, bound):
        if all(f.evaluate(g) for f in fs):
            return True, g
    return False, None


@dataclass(frozen=True)
class BellCertificate:
    events: tuple
    probabilities: tuple
    bound: int

    @property
    def total(self) -> Fraction:
        return sum(self.probabilities, Fraction(0))

    @property
    def violation(self) -> Fraction:
        return max(Fraction(0), self.total - self.bound)

    def to_json(self) -> dict:
        from .scenario import format_rational

        return {
            "events": [{"context": [str(m) for m in e.context], "formula": str(e.formula)} for e in self.events],
            "probabilities": [format_rational(p) for p in self.probabilities],
            "sum": format_rational(self.total),
            "bound": self.bound,
            "violation": format_rational(self.violation),
        }


def bell_violation(model: EmpiricalModel, events: Sequence[EventFormula], bound: Optional[int] = None) -> BellCertificate:
    """Evaluate the logical Bell inequality ``sum p_i <= N - 1`` on ``model``.

    The family must be jointly unsatisfiable; otherwise
    :class:`SatisfiableFamilyError` is raised.
    """
    if not model.is_rational:
        raise ValidationError("Bell violations need a rational model")
    if not is_compatible(model):
        raise IncompatibleModelError("model is signalling")
    sat, witness = jointly_satisfiable(events, model.scenario, bound)
    if sat:
        raise SatisfiableFamilyError(f"formulas are satisfied together by {witness!r}")
    probs = tuple(event_probability(model, e) for e in events)
    return BellCertificate(tuple(events), probs, len(events) - 1)
