"""Relational-database reading of possibility models.

Attributes are measurements, a schema is a cover, tuples are local sections
and a relation is the support of a boolean distribution.  The natural join of
the relations is exactly the set of consistent global assignments.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .analysis import GlobalDistribution
from .errors import CyclicCoverError, IncompatibleModelError, ValidationError
from .scenario import (
    Distribution,
    EmpiricalModel,
    LocalSection,
    MeasurementScenario,
    Semiring,
    is_compatible,
    marginalise,
    restrict_section,
)


@dataclass(frozen=True)
class RelationInstance:
    attributes: tuple
    tuples: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        attrs = frozenset(self.attributes)
        for t in self.tuples:
            if not isinstance(t, LocalSection) or t.domain != attrs:
                raise ValidationError(f"tuple {t!r} is not total on {self.attributes!r}")

    def __len__(self) -> int:
        return len(self.tuples)

    def rows(self) -> list[tuple]:
        return sorted((t.values_for(self.attributes) for t in self.tuples), key=lambda r: tuple(map(str, r)))


@dataclass(frozen=True)
class DatabaseInstance:
    """Relations over a schema; ``domains`` fixes the attribute order and data values."""

    domains: Mapping
    schema: tuple
    relations: tuple

    def __post_init__(self):
        order = list(self.domains)
        if len(self.schema) != len(self.relations):
            raise ValidationError("one relation per schema element is required")
        for a_set, rel in zip(self.schema, self.relations):
            unknown = set(a_set) - set(order)
            if unknown:
                raise ValidationError(f"schema element mentions unknown attribute(s) {sorted(map(str, unknown))}")
            if set(a_set) != set(rel.attributes):
                raise ValidationError(f"relation attributes {rel.attributes!r} do not match schema {a_set!r}")
            for t in rel.tuples:
                for a in a_set:
                    if t[a] not in self.domains[a]:
                        raise ValidationError(f"value {t[a]!r} not in domain of attribute {a!r}")

    @property
    def attributes(self) -> tuple:
        return tuple(self.domains)


def project(relation: RelationInstance, attributes: Iterable) -> RelationInstance:
    sub = set(attributes)
    if not sub <= set(relation.attributes):
        raise ValidationError(f"{sorted(map(str, sub))} is not a subset of {relation.attributes!r}")
    attrs = tuple(a for a in relation.attributes if a in sub)
    return RelationInstance(attrs, frozenset(restrict_section(t, sub) for t in relation.tuples))


def _join2(left: RelationInstance, right: RelationInstance, order: Sequence) -> RelationInstance:
    common = [a for a in left.attributes if a in set(right.attributes)]
    index: dict = {}
    for t in right.tuples:
        index.setdefault(tuple(t[a] for a in common), []).append(t)
    attrs = tuple(a for a in order if a in set(left.attributes) | set(right.attributes))
    out = set()
    for t in left.tuples:
        for u in index.get(tuple(t[a] for a in common), ()):
            merged = {**t, **u}
            out.add(LocalSection((a, merged[a]) for a in attrs))
    return RelationInstance(attrs, frozenset(out))


def natural_join(instance: DatabaseInstance) -> RelationInstance:
    """Left fold of pairwise joins in schema order."""
    order = instance.attributes
    result = RelationInstance((), frozenset([LocalSection()]))
    for rel in instance.relations:
        result = _join2(result, rel, order)
    return result


def universal_relation(instance: DatabaseInstance) -> Optional[RelationInstance]:
    """The join, if it projects back onto every relation; otherwise None."""
    joined = natural_join(instance)
    for rel in instance.relations:
        if project(joined, rel.attributes).tuples != rel.tuples:
            return None
    return joined


@dataclass(frozen=True)
class Reduction:
    """GYO reduction result.

    ``trace`` holds ``("attribute", a, i)`` for deleting attribute ``a`` from
    element ``i`` and ``("element", i, j)`` for deleting element ``i``
    contained in element ``j`` (``j`` is None for the last element).
    """

    acyclic: bool
    trace: tuple
    elimination_order: tuple  # element indices in deletion order

    def __bool__(self) -> bool:
        return self.acyclic


def is_acyclic(schema: Sequence[Iterable]) -> Reduction:
    """GYO ear removal.

    Repeatedly delete attributes that occur in a single remaining element,
    then delete the first element contained in another remaining one.  The
    schema is acyclic iff everything gets deleted.
    """
    edges = {i: list(e) for i, e in enumerate(schema)}
    trace = []
    eliminated = []
    while edges:
        changed = False
        counts: dict = {}
        for e in edges.values():
            for a in e:
                counts[a] = counts.get(a, 0) + 1
        for i in sorted(edges):
            lonely = [a for a in edges[i] if counts[a] == 1]
            for a in lonely:
                edges[i].remove(a)
                trace.append(("attribute", a, i))
                changed = True
        if len(edges) == 1:
            (i,) = edges
            if not edges[i]:
                del edges[i]
                trace.append(("element", i, None))
                eliminated.append(i)
                break
        for i in sorted(edges):
            witness = next((j for j in sorted(edges) if j != i and set(edges[i]) <= set(edges[j])), None)
            if witness is not None:
                del edges[i]
                trace.append(("element", i, witness))
                eliminated.append(i)
                changed = True
                break
        if not changed:
            break
    return Reduction(not edges, tuple(trace), tuple(eliminated))


def vorobev_extend(model: EmpiricalModel) -> GlobalDistribution:
    """Glue a compatible probability model on an acyclic cover into a global distribution.

    Contexts are visited in reverse GYO elimination order; each one
    contributes the conditional weight ``d_C(s) / d_C|sep(s|sep)`` where
    ``sep`` is its intersection with the contexts already placed (0/0 = 0).
    """
    if not model.is_rational:
        raise ValidationError("gluing needs a rational model")
    sc = model.scenario
    reduction = is_acyclic(sc.contexts)
    if not reduction:
        raise CyclicCoverError(f"cover {list(sc.contexts)} is not acyclic")
    compat = is_compatible(model)
    if not compat:
        raise IncompatibleModelError(f"tables disagree: {compat.witness!r}")

    order = list(reversed(reduction.elimination_order))
    placed: set = set()
    partial = {LocalSection(): Fraction(1)}
    for k in order:
        c, d = sc.contexts[k], model.tables[k]
        sep = tuple(m for m in c if m in placed)
        sep_marginal = marginalise(d, sep)
        by_sep: dict = {}
        for s, w in d.weights.items():
            by_sep.setdefault(restrict_section(s, sep), []).append((s, w))
        nxt: dict = {}
        for p, pw in partial.items():
            key = restrict_section(p, sep)
            denom = sep_marginal.weight(key)
            if denom == 0:
                continue
            for s, w in by_sep.get(key, ()):
                merged = LocalSection(list(p.items()) + [(m, s[m]) for m in c if m not in placed])
                nxt[merged] = nxt.get(merged, Fraction(0)) + pw * w / denom
        partial = nxt
        placed.update(c)

    weights = {LocalSection((m, p[m]) for m in sc.measurements): w for p, w in partial.items() if w != 0}
    dist = GlobalDistribution(sc, weights)
    if not dist.reproduces(model):
        raise AssertionError("glued distribution does not reproduce the model")
    return dist


def model_to_instance(model: EmpiricalModel) -> DatabaseInstance:
    """Possibility model as a database instance (rational models via their support)."""
    sc = model.scenario
    relations = tuple(RelationInstance(c, frozenset(d.weights)) for c, d in zip(sc.contexts, model.tables))
    return DatabaseInstance(sc.outcome_domains, sc.contexts, relations)


def instance_to_model(instance: DatabaseInstance, scenario: Optional[MeasurementScenario] = None) -> EmpiricalModel:
    """Database instance as a possibility model; empty relations are rejected."""
    if scenario is None:
        scenario = MeasurementScenario(instance.attributes, instance.domains, instance.schema)
    tables = {}
    for a_set, rel in zip(instance.schema, instance.relations):
        if not rel.tuples:
            raise ValidationError(f"relation over {a_set!r} is empty; a possibility table needs a possible tuple")
        tables[tuple(a_set)] = Distribution(a_set, {t: True for t in rel.tuples}, Semiring.BOOLEAN)
    return EmpiricalModel(scenario, tables)
