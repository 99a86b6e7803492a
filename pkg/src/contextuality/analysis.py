"""Global assignments, global distributions and the contextuality hierarchy.

The hierarchy, from weakest to strongest:

* probabilistic: no nonnegative global distribution reproduces the tables;
* logical: some possible section extends to no globally consistent assignment;
* strong: no global assignment is consistent with the support at all.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple, Optional

from . import exact_lp
from .errors import IncompatibleModelError, StateSpaceError, ValidationError
from .scenario import (
    Distribution,
    EmpiricalModel,
    LocalSection,
    MeasurementScenario,
    Semiring,
    enumerate_sections,
    is_compatible,
    restrict_section,
    support,
)

DEFAULT_BOUND = 2**20


def _check_bound(count: int, bound: Optional[int]) -> None:
    limit = DEFAULT_BOUND if bound is None else bound
    if count > limit:
        raise StateSpaceError(f"{count} global assignments exceed the bound {limit}")


@dataclass(frozen=True)
class GlobalDistribution:
    """Weights on global assignments (sections over every measurement).

    ``signed`` distributions may carry negative weights; all weights sum to 1.
    Only nonzero weights are stored.
    """

    scenario: MeasurementScenario
    weights: dict
    signed: bool = False

    def __post_init__(self):
        total = sum(self.weights.values(), Fraction(0))
        if total != 1:
            raise ValidationError(f"global weights sum to {total}, not 1")
        if not self.signed and any(w < 0 for w in self.weights.values()):
            raise ValidationError("negative weight in an unsigned global distribution")
        full = frozenset(self.scenario.measurements)
        if any(s.domain != full for s in self.weights):
            raise ValidationError("global distribution contains a non-global section")

    def marginal(self, context) -> Distribution:
        c = self.scenario.canonical(context)
        acc: dict = {}
        for s, w in self.weights.items():
            r = restrict_section(s, c)
            acc[r] = acc.get(r, Fraction(0)) + w
        return Distribution(c, acc, Semiring.SIGNED if self.signed else Semiring.PROBABILITY)

    def reproduces(self, model: EmpiricalModel) -> bool:
        """Exact check that every table of ``model`` is a marginal of this distribution."""
        for c, d in zip(model.scenario.contexts, model.tables):
            if self.marginal(c).weights != d.weights:
                return False
        return True

    def sorted_items(self) -> list:
        return sorted(self.weights.items(), key=lambda kv: self.scenario.section_key(kv[0]))


def enumerate_global_assignments(scenario: MeasurementScenario, bound: Optional[int] = None) -> list[LocalSection]:
    """Every function from measurements to outcomes, in canonical order."""
    _check_bound(scenario.num_global_assignments(), bound)
    return enumerate_sections(scenario, scenario.measurements)


def _as_boolean(model: EmpiricalModel) -> EmpiricalModel:
    return model if model.kind is Semiring.BOOLEAN else support(model)


def _search(model: EmpiricalModel) -> Iterator[LocalSection]:
    """Backtracking over measurements, yielding assignments consistent with every support.

    Variables are tried in order of decreasing context degree (ties by
    measurement order); values in outcome-domain order.  A partial assignment
    is kept only while each touched context still has a support tuple that
    agrees with it.
    """
    sc = model.scenario
    order = sorted(sc.measurements, key=lambda m: (-sc.degree(m), sc.measurements.index(m)))
    supports = [[s.values_for(c) for s in d.weights] for c, d in zip(sc.contexts, model.tables)]
    touching = {m: [k for k, c in enumerate(sc.contexts) if m in c] for m in sc.measurements}
    positions = [{m: i for i, m in enumerate(c)} for c in sc.contexts]
    assigned: dict = {}

    def alive(k: int) -> bool:
        pos = positions[k]
        fixed = [(pos[m], assigned[m]) for m in sc.contexts[k] if m in assigned]
        return any(all(t[i] == o for i, o in fixed) for t in supports[k])

    def rec(depth: int):
        if depth == len(order):
            yield LocalSection((m, assigned[m]) for m in sc.measurements)
            return
        m = order[depth]
        for o in sc.domain(m):
            assigned[m] = o
            if all(alive(k) for k in touching[m]):
                yield from rec(depth + 1)
            del assigned[m]

    yield from rec(0)


def consistent_global_assignments(model: EmpiricalModel, bound: Optional[int] = None) -> list[LocalSection]:
    """Global assignments whose restriction to each context is possible, sorted canonically.

    Rational models are read through their support.  ``bound`` caps the
    number of assignments returned.
    """
    model = _as_boolean(model)
    limit = DEFAULT_BOUND if bound is None else bound
    found = []
    for g in _search(model):
        found.append(g)
        if len(found) > limit:
            raise StateSpaceError(f"more than {limit} consistent global assignments")
    found.sort(key=model.scenario.section_key)
    return found


class LogicalVerdict(NamedTuple):
    contextual: bool
    witness: Optional[tuple]  # (context, section)

    def __bool__(self) -> bool:
        return self.contextual


def is_logically_contextual(model: EmpiricalModel, bound: Optional[int] = None) -> LogicalVerdict:
    """Whether some possible section fails to extend to a consistent global assignment.

    The witness is the first such (context, section) in cover order, then
    section order.
    """
    model = _as_boolean(model)
    sc = model.scenario
    globals_ = consistent_global_assignments(model, bound)
    for c, d in zip(sc.contexts, model.tables):
        reachable = {restrict_section(g, c) for g in globals_}
        for s in sorted(d.weights, key=sc.section_key):
            if s not in reachable:
                return LogicalVerdict(True, (c, s))
    return LogicalVerdict(False, None)


def is_strongly_contextual(model: EmpiricalModel) -> bool:
    """True iff no global assignment is consistent with the support."""
    return next(_search(_as_boolean(model)), None) is None


@dataclass(frozen=True)
class _LPOutcome:
    distribution: Optional[GlobalDistribution]
    certificate: Optional[dict]  # (context, section) -> Fraction


def _global_lp(model: EmpiricalModel, bound: Optional[int]) -> _LPOutcome:
    if not model.is_rational:
        raise ValidationError("a global probability distribution needs a rational model")
    if model.kind is Semiring.SIGNED and any(w < 0 for d in model.tables for w in d.weights.values()):
        raise ValidationError("model has negative weights")
    compat = is_compatible(model)
    if not compat:
        c, c2, s = compat.witness
        raise IncompatibleModelError(f"tables over {c!r} and {c2!r} disagree at {s!r}")
    sc = model.scenario
    _check_bound(sc.num_global_assignments(), bound)

    # Assignments hitting a zero-weight section must get weight zero, so only
    # assignments consistent with the support become variables.
    columns = consistent_global_assignments(model, bound)
    row_keys = []
    rhs = []
    for c, d in zip(sc.contexts, model.tables):
        for s in sorted(d.weights, key=sc.section_key):
            row_keys.append((c, s))
            rhs.append(d.weights[s])
    A = [[1 if restrict_section(g, c) == s else 0 for g in columns] for c, s in row_keys]
    result = exact_lp.phase_one(A, rhs)

    if result.feasible:
        weights = {g: x for g, x in zip(columns, result.solution) if x != 0}
        dist = GlobalDistribution(sc, weights)
        if not dist.reproduces(model):
            raise AssertionError("phase-one solution does not reproduce the model")
        return _LPOutcome(dist, None)

    # Extend the certificate to the dropped zero-weight rows so that it also
    # separates the pruned assignments.
    y = dict(zip(row_keys, result.certificate))
    kept = set(y)
    penalty = Fraction(0)
    for g in enumerate_sections(sc, sc.measurements):
        value = sum((y.get((c, restrict_section(g, c)), Fraction(0)) for c in sc.contexts), Fraction(0))
        penalty = max(penalty, value)
    for c in sc.contexts:
        for s in enumerate_sections(sc, c):
            if (c, s) not in kept:
                y[(c, s)] = -penalty
    return _LPOutcome(None, y)


def find_global_distribution(model: EmpiricalModel, bound: Optional[int] = None) -> Optional[GlobalDistribution]:
    """A nonnegative global distribution marginalising to every table, or None.

    Solved as exact linear feasibility (phase-one simplex, Bland's rule).
    Raises :class:`IncompatibleModelError` for signalling models.
    """
    return _global_lp(model, bound).distribution


def separating_functional(model: EmpiricalModel, bound: Optional[int] = None) -> Optional[dict]:
    """Farkas certificate for probabilistic contextuality, or None if noncontextual.

    Returns coefficients ``y[(context, section)]`` such that
    ``sum_C y[C, g|C] <= 0`` for every global assignment ``g`` while
    ``sum_{C,s} y[C, s] * d_C(s) > 0`` for the model.
    """
    return _global_lp(model, bound).certificate


def functional_value(model: EmpiricalModel, functional: dict) -> Fraction:
    return sum(
        (w * d.weight(s) for (c, s), w in functional.items() for d in [model.table(c)]),
        Fraction(0),
    )


def find_signed_global_measure(model: EmpiricalModel, bound: Optional[int] = None) -> Optional[GlobalDistribution]:
    """A possibly negative global measure reproducing every table, or None.

    Exact Gauss-Jordan elimination over all global assignments; free
    variables are set to zero.
    """
    if not model.is_rational:
        raise ValidationError("a signed measure needs a rational model")
    sc = model.scenario
    columns = enumerate_global_assignments(sc, bound)
    A, rhs = [], []
    for c, d in zip(sc.contexts, model.tables):
        for s in enumerate_sections(sc, c):
            A.append([1 if restrict_section(g, c) == s else 0 for g in columns])
            rhs.append(d.weight(s))
    x = exact_lp.solve_affine(A, rhs)
    if x is None:
        return None
    dist = GlobalDistribution(sc, {g: v for g, v in zip(columns, x) if v != 0}, signed=True)
    if not dist.reproduces(model):
        raise AssertionError("elimination result does not reproduce the model")
    return dist


@dataclass(frozen=True)
class ContextualityReport:
    compatible: bool
    probabilistically_contextual: Optional[bool]
    logically_contextual: bool
    logical_witness: Optional[tuple]
    strongly_contextual: bool
    signed_measure_exists: Optional[bool]

    def to_json(self) -> dict:
        witness = None
        if self.logical_witness is not None:
            c, s = self.logical_witness
            witness = {"context": [str(m) for m in c], "section": {str(m): str(s[m]) for m in c}}
        return {
            "compatible": self.compatible,
            "probabilistically_contextual": self.probabilistically_contextual,
            "logically_contextual": self.logically_contextual,
            "logical_witness": witness,
            "strongly_contextual": self.strongly_contextual,
            "signed_measure_exists": self.signed_measure_exists,
        }


def classify(model: EmpiricalModel, bound: Optional[int] = None) -> ContextualityReport:
    """Run every check of the hierarchy on ``model``.

    For a signalling rational model no global distribution can exist, so it
    is reported probabilistically contextual without solving the LP.
    """
    compatible = bool(is_compatible(model))
    logical = is_logically_contextual(model, bound)
    strong = is_strongly_contextual(model)
    probabilistic = signed = None
    if model.is_rational:
        if compatible:
            probabilistic = find_global_distribution(model, bound) is None
        else:
            probabilistic = True
        signed = find_signed_global_measure(model, bound) is not None
    return ContextualityReport(
        compatible=compatible,
        probabilistically_contextual=probabilistic,
        logically_contextual=logical.contextual,
        logical_witness=logical.witness,
        strongly_contextual=strong,
        signed_measure_exists=signed,
    )
