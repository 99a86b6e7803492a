"""Measurement scenarios, local sections and semiring-valued empirical models.

A scenario is a finite set of measurements, an outcome domain per measurement
and a cover of measurement contexts.  An empirical model assigns to each
context a normalised distribution over its local sections, valued either in
the booleans (possibility tables) or in exact rationals (probability tables).

Canonical orders
----------------
Contexts are stored as tuples following the scenario's measurement order.
Sections of a context are enumerated with the *first* measurement varying
fastest, so the Bell context ``(a1, b1)`` yields ``(0,0), (1,0), (0,1), (1,1)``.
:func:`section_key` gives the matching sort key and every "lexicographically
first" choice in the package uses it.
"""
from __future__ import annotations

import enum
import itertools
import re
from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from fractions import Fraction
from typing import NamedTuple, Optional, Union

from .errors import ValidationError

Context = tuple  # tuple of measurement labels in canonical order
Weight = Union[bool, Fraction]


class Semiring(str, enum.Enum):
    BOOLEAN = "boolean"
    PROBABILITY = "probability"
    SIGNED = "signed"

    @property
    def is_rational(self) -> bool:
        return self is not Semiring.BOOLEAN


_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


def parse_rational(value) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` / integer strings to a Fraction.

    Floats and decimal literals are refused so that no rounding can sneak
    into the exact analysis path.
    """
    if isinstance(value, bool):
        raise ValidationError(f"boolean {value!r} is not a rational weight")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        if not _RATIONAL_RE.match(value):
            raise ValidationError(f"not an exact rational literal: {value!r}")
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise ValidationError(f"zero denominator in {value!r}") from None
    raise ValidationError(f"unsupported weight type {type(value).__name__}: {value!r}")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class LocalSection(Mapping):
    """An assignment of outcomes to the measurements of one context.

    Behaves as an immutable mapping; equality and hashing ignore the order in
    which the pairs were supplied.
    """

    __slots__ = ("_items", "_dict", "_hash")

    def __init__(self, items: Union[Mapping, Iterable[tuple]] = ()):
        pairs = tuple(items.items()) if isinstance(items, Mapping) else tuple(items)
        d = dict(pairs)
        if len(d) != len(pairs):
            raise ValidationError(f"repeated measurement in section {pairs!r}")
        self._items = pairs
        self._dict = d
        self._hash = hash(frozenset(pairs))

    def __getitem__(self, m):
        return self._dict[m]

    def __iter__(self) -> Iterator:
        return (m for m, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, LocalSection):
            return self._hash == other._hash and self._dict == other._dict
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{m}={o}" for m, o in self._items)
        return f"LocalSection({inner})"

    @property
    def domain(self) -> frozenset:
        return frozenset(self._dict)

    def values_for(self, context: Sequence) -> tuple:
        return tuple(self._dict[m] for m in context)

    def restrict(self, sub_context: Iterable) -> "LocalSection":
        return restrict_section(self, sub_context)


def restrict_section(s: LocalSection, sub_context: Iterable) -> LocalSection:
    """Pointwise restriction of ``s`` to ``sub_context``."""
    sub = set(sub_context)
    if not sub <= s.domain:
        raise ValidationError(f"{sorted(map(str, sub - s.domain))} not in section domain")
    return LocalSection((m, o) for m, o in s._items if m in sub)


class MeasurementScenario:
    """Measurements, per-measurement outcome domains and a cover of contexts.

    Contexts may be given in any order of their members; they are stored
    sorted by measurement order.  The cover keeps the order it was given in.
    """

    def __init__(
        self,
        measurements: Sequence[Hashable],
        outcome_domains: Mapping[Hashable, Sequence[Hashable]],
        cover: Iterable[Iterable[Hashable]],
    ):
        measurements = tuple(measurements)
        if len(set(measurements)) != len(measurements):
            raise ValidationError(f"duplicate measurement label in {measurements!r}")
        index = {m: i for i, m in enumerate(measurements)}
        unknown = set(outcome_domains) - set(index)
        if unknown:
            raise ValidationError(f"outcome domain given for unknown measurement(s) {sorted(map(str, unknown))}")
        domains = {}
        for m in measurements:
            if m not in outcome_domains:
                raise ValidationError(f"no outcome domain for measurement {m!r}")
            dom = tuple(outcome_domains[m])
            if not dom:
                raise ValidationError(f"empty outcome domain for measurement {m!r}")
            if len(set(dom)) != len(dom):
                raise ValidationError(f"duplicate outcome in domain of {m!r}")
            domains[m] = dom

        contexts = []
        seen = set()
        for raw in cover:
            members = list(raw)
            bad = [m for m in members if m not in index]
            if bad:
                raise ValidationError(f"context {members!r} references unknown measurement(s) {bad!r}")
            if len(set(members)) != len(members):
                raise ValidationError(f"context {members!r} repeats a measurement")
            if not members:
                raise ValidationError("empty context in cover")
            key = frozenset(members)
            if key in seen:
                raise ValidationError(f"duplicate context {sorted(map(str, members))}")
            seen.add(key)
            contexts.append(tuple(sorted(members, key=index.__getitem__)))
        if not contexts:
            raise ValidationError("cover has no contexts")
        covered = set().union(*seen)
        missing = [m for m in measurements if m not in covered]
        if missing:
            raise ValidationError(f"measurement(s) {missing!r} appear in no context")

        self.measurements = measurements
        self.contexts: tuple[Context, ...] = tuple(contexts)
        self._domains = domains
        self._index = index
        self._outcome_index = {m: {o: i for i, o in enumerate(d)} for m, d in domains.items()}

    def domain(self, m) -> tuple:
        return self._domains[m]

    @property
    def outcome_domains(self) -> dict:
        return dict(self._domains)

    def canonical(self, context: Iterable) -> Context:
        """Return ``context`` as a tuple in measurement order, validating its members."""
        members = set(context)
        bad = [m for m in members if m not in self._index]
        if bad:
            raise ValidationError(f"unknown measurement(s) {sorted(map(str, bad))}")
        return tuple(sorted(members, key=self._index.__getitem__))

    def context_index(self, context: Iterable) -> int:
        c = self.canonical(context)
        try:
            return self.contexts.index(c)
        except ValueError:
            raise ValidationError(f"{c!r} is not a context of the cover") from None

    def degree(self, m) -> int:
        return sum(1 for c in self.contexts if m in c)

    def section_key(self, s: LocalSection) -> tuple:
        """Sort key matching :func:`enumerate_sections` order (last measurement most significant)."""
        ordered = sorted(s, key=self._index.__getitem__, reverse=True)
        return tuple(self._outcome_index[m][s[m]] for m in ordered)

    def num_global_assignments(self) -> int:
        n = 1
        for m in self.measurements:
            n *= len(self._domains[m])
        return n

    def _key(self):
        return (self.measurements, tuple(self._domains[m] for m in self.measurements), self.contexts)

    def __eq__(self, other) -> bool:
        if isinstance(other, MeasurementScenario):
            return self._key() == other._key()
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        cover = ", ".join("{" + ",".join(map(str, c)) + "}" for c in self.contexts)
        return f"MeasurementScenario(X={list(self.measurements)}, cover=[{cover}])"


def new_scenario(measurements, outcome_domains, cover) -> MeasurementScenario:
    """Build a validated scenario.

    ``outcome_domains`` may be a mapping or a single sequence shared by all
    measurements.
    """
    measurements = tuple(measurements)
    if not isinstance(outcome_domains, Mapping):
        shared = tuple(outcome_domains)
        outcome_domains = {m: shared for m in measurements}
    return MeasurementScenario(measurements, outcome_domains, cover)


def enumerate_sections(scenario: MeasurementScenario, context: Iterable) -> list[LocalSection]:
    """All sections over ``context``; the first measurement varies fastest."""
    c = scenario.canonical(context)
    domains = [scenario.domain(m) for m in reversed(c)]
    out = []
    for combo in itertools.product(*domains):
        out.append(LocalSection(zip(c, reversed(combo))))
    return out


class Distribution:
    """A finite-support normalised distribution over the sections of one context.

    Only the support is stored.  Boolean distributions map sections to
    ``True``; rational ones to :class:`~fractions.Fraction`.
    """

    __slots__ = ("context", "kind", "weights")

    def __init__(self, context: Sequence, weights: Mapping[LocalSection, object], kind: Semiring):
        kind = Semiring(kind)
        context = tuple(context)
        cset = set(context)
        stored: dict[LocalSection, Weight] = {}
        for s, w in weights.items():
            if not isinstance(s, LocalSection):
                s = LocalSection(s)
            if s.domain != cset:
                raise ValidationError(f"section {s!r} is not over context {context!r}")
            if kind is Semiring.BOOLEAN:
                if w not in (0, 1, True, False):
                    raise ValidationError(f"boolean weight must be 0/1, got {w!r}")
                if w:
                    stored[s] = True
            else:
                q = parse_rational(w)
                if q < 0 and kind is Semiring.PROBABILITY:
                    raise ValidationError(f"negative probability {q} for {s!r}")
                if q != 0:
                    stored[s] = q
        if kind is Semiring.BOOLEAN:
            if not stored:
                raise ValidationError(f"boolean distribution over {context!r} has empty support")
        else:
            total = sum(stored.values(), Fraction(0))
            if total != 1:
                raise ValidationError(f"weights over {context!r} sum to {total}, not 1")
        self.context = context
        self.kind = kind
        self.weights = stored

    def weight(self, s: LocalSection) -> Weight:
        if self.kind is Semiring.BOOLEAN:
            return s in self.weights
        return self.weights.get(s, Fraction(0))

    def support(self) -> frozenset:
        return frozenset(self.weights)

    def marginal(self, sub_context: Iterable) -> "Distribution":
        return marginalise(self, sub_context)

    def total(self) -> Weight:
        if self.kind is Semiring.BOOLEAN:
            return bool(self.weights)
        return sum(self.weights.values(), Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, Distribution):
            return (
                self.kind is other.kind
                and set(self.context) == set(other.context)
                and self.weights == other.weights
            )
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.kind, frozenset(self.context), frozenset(self.weights.items())))

    def __repr__(self) -> str:
        return f"Distribution({self.kind.value}, {self.context!r}, {self.weights!r})"


def marginalise(d: Distribution, sub_context: Iterable) -> Distribution:
    """Restrict ``d`` to ``sub_context`` by summing over extensions (projection for booleans)."""
    sub = set(sub_context)
    if not sub <= set(d.context):
        raise ValidationError(f"{sorted(map(str, sub))} is not a subset of {d.context!r}")
    sub_ctx = tuple(m for m in d.context if m in sub)
    acc: dict[LocalSection, Weight] = {}
    if d.kind is Semiring.BOOLEAN:
        for s in d.weights:
            acc[restrict_section(s, sub)] = True
    else:
        for s, w in d.weights.items():
            r = restrict_section(s, sub)
            acc[r] = acc.get(r, Fraction(0)) + w
    return Distribution(sub_ctx, acc, d.kind)


class EmpiricalModel:
    """One distribution per context of a scenario, all over one semiring."""

    def __init__(self, scenario: MeasurementScenario, tables: Union[Sequence[Distribution], Mapping]):
        if isinstance(tables, Mapping):
            by_ctx = {scenario.canonical(c): d for c, d in tables.items()}
            missing = [c for c in scenario.contexts if c not in by_ctx]
            if missing or len(by_ctx) != len(scenario.contexts):
                raise ValidationError("tables must cover exactly the contexts of the scenario")
            tables = [by_ctx[c] for c in scenario.contexts]
        tables = tuple(tables)
        if len(tables) != len(scenario.contexts):
            raise ValidationError(f"expected {len(scenario.contexts)} tables, got {len(tables)}")
        kinds = {d.kind for d in tables}
        if len(kinds) != 1:
            raise ValidationError(f"tables mix semirings: {sorted(k.value for k in kinds)}")
        for c, d in zip(scenario.contexts, tables):
            if set(d.context) != set(c):
                raise ValidationError(f"table over {d.context!r} does not match context {c!r}")
            for s in d.weights:
                for m in c:
                    if s[m] not in scenario._outcome_index[m]:
                        raise ValidationError(f"outcome {s[m]!r} not in domain of {m!r}")
        self.scenario = scenario
        self.tables = tuple(
            d if d.context == c else Distribution(c, d.weights, d.kind) for c, d in zip(scenario.contexts, tables)
        )
        self.kind: Semiring = tables[0].kind

    @classmethod
    def from_rows(cls, scenario: MeasurementScenario, rows: Sequence[Sequence], kind=Semiring.PROBABILITY):
        """Build from one row per context, entries in :func:`enumerate_sections` order."""
        kind = Semiring(kind)
        if len(rows) != len(scenario.contexts):
            raise ValidationError(f"expected {len(scenario.contexts)} rows, got {len(rows)}")
        tables = []
        for c, row in zip(scenario.contexts, rows):
            sections = enumerate_sections(scenario, c)
            if len(row) != len(sections):
                raise ValidationError(f"row for {c!r} has {len(row)} entries, expected {len(sections)}")
            tables.append(Distribution(c, dict(zip(sections, row)), kind))
        return cls(scenario, tables)

    @classmethod
    def from_supports(cls, scenario: MeasurementScenario, supports: Sequence[Iterable[Sequence]]):
        """Boolean model from, per context, the possible outcome tuples (context order)."""
        tables = []
        for c, possible in zip(scenario.contexts, supports, strict=True):
            tables.append(Distribution(c, {LocalSection(zip(c, t)): True for t in possible}, Semiring.BOOLEAN))
        return cls(scenario, tables)

    def table(self, context: Iterable) -> Distribution:
        return self.tables[self.scenario.context_index(context)]

    @property
    def is_rational(self) -> bool:
        return self.kind.is_rational

    def __eq__(self, other) -> bool:
        if isinstance(other, EmpiricalModel):
            return self.scenario == other.scenario and self.tables == other.tables
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.scenario, self.tables))

    def __repr__(self) -> str:
        return f"EmpiricalModel({self.kind.value}, {self.scenario!r})"


class Compatibility(NamedTuple):
    compatible: bool
    witness: Optional[tuple]  # (context, other_context, section) of the first disagreement

    def __bool__(self) -> bool:
        return self.compatible


def is_compatible(model: EmpiricalModel, tolerance: Fraction = Fraction(0)) -> Compatibility:
    """No-signalling check: every pair of tables agrees on shared marginals.

    ``tolerance`` (rational models only) admits absolute differences up to
    the given value; the default demands exact equality.
    """
    sc = model.scenario
    tol = Fraction(tolerance)
    for i, j in itertools.combinations(range(len(sc.contexts)), 2):
        c, c2 = sc.contexts[i], sc.contexts[j]
        shared = tuple(m for m in c if m in set(c2))
        left = marginalise(model.tables[i], shared)
        right = marginalise(model.tables[j], shared)
        for s in enumerate_sections(sc, shared) if shared else [LocalSection()]:
            a, b = left.weight(s), right.weight(s)
            if model.kind is Semiring.BOOLEAN:
                bad = a != b
            else:
                bad = abs(a - b) > tol
            if bad:
                return Compatibility(False, (c, c2, s))
    return Compatibility(True, None)


def support(model: EmpiricalModel) -> EmpiricalModel:
    """The possibility model: a section is possible iff its weight is strictly positive."""
    if model.kind is Semiring.BOOLEAN:
        return model
    tables = []
    for d in model.tables:
        if any(w < 0 for w in d.weights.values()):
            raise ValidationError(f"negative weight in table over {d.context!r}; support undefined")
        tables.append(Distribution(d.context, {s: True for s in d.weights}, Semiring.BOOLEAN))
    return EmpiricalModel(model.scenario, tables)
