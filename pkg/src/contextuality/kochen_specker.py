"""Kochen-Specker models over a hypergraph of binary measurements.

In the KS model of a cover, the possible sections of a context are exactly
those assigning 1 to one measurement and 0 to the rest.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .analysis import is_strongly_contextual
from .errors import ValidationError
from .scenario import Distribution, EmpiricalModel, LocalSection, MeasurementScenario, Semiring, new_scenario

ORTHO_TOL = 1e-9


def ks_cover(measurements: Sequence, contexts: Iterable[Iterable]) -> MeasurementScenario:
    """Scenario with outcome domain (0, 1) for every measurement."""
    return new_scenario(measurements, (0, 1), contexts)


def _one_of(scenario: MeasurementScenario, m):
    dom = scenario.domain(m)
    if len(dom) != 2 or {str(o) for o in dom} != {"0", "1"}:
        raise ValidationError(f"measurement {m!r} must have outcome domain {{0, 1}}, got {dom!r}")
    return next(o for o in dom if str(o) == "1"), next(o for o in dom if str(o) == "0")


def ks_model(scenario: MeasurementScenario) -> EmpiricalModel:
    """The boolean model whose supports are the exactly-one-1 sections."""
    labels = {m: _one_of(scenario, m) for m in scenario.measurements}
    tables = []
    for c in scenario.contexts:
        support = {}
        for hot in c:
            support[LocalSection((m, labels[m][0] if m == hot else labels[m][1]) for m in c)] = True
        tables.append(Distribution(c, support, Semiring.BOOLEAN))
    return EmpiricalModel(scenario, tables)


def one_formula(context: Sequence):
    """The formula ONE(C): exactly one measurement of the context reads 1."""
    from .logic import And, Atom, Not, Or

    terms = []
    for x in context:
        lits = [Atom(x, 1)] + [Not(Atom(y, 1)) for y in context if y != x]
        terms.append(And(tuple(lits)))
    return Or(tuple(terms))


class Verdict(str, enum.Enum):
    CONTEXTUAL_BY_CRITERION = "contextual-by-criterion"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DivisorReport:
    verdict: Verdict
    degrees: dict
    cover_size: int
    gcd: int
    failing_divisor: Optional[int]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "degrees": {str(k): v for k, v in self.degrees.items()},
            "cover_size": self.cover_size,
            "gcd": self.gcd,
            "failing_divisor": self.failing_divisor,
        }


def divisor_criterion(scenario: MeasurementScenario) -> DivisorReport:
    """Contrapositive of the divisor test for noncontextual KS models.

    If some common divisor d > 1 of the measurement degrees does not divide
    the number of contexts, the KS model is contextual.  Only divisors of the
    gcd need checking; the smallest failing one is reported.
    """
    degrees = {m: scenario.degree(m) for m in scenario.measurements}
    g = 0
    for d in degrees.values():
        g = math.gcd(g, d)
    n = len(scenario.contexts)
    failing = next((d for d in range(2, g + 1) if g % d == 0 and n % d != 0), None)
    verdict = Verdict.CONTEXTUAL_BY_CRITERION if failing else Verdict.INCONCLUSIVE
    return DivisorReport(verdict, degrees, n, g, failing)


def is_ks_contextual(scenario: MeasurementScenario) -> bool:
    """True iff no global 0/1 assignment satisfies ONE(C) for every context."""
    return is_strongly_contextual(ks_model(scenario))


class RealVectorLabeling:
    """Unit vectors in R^n, one per measurement."""

    def __init__(self, vectors: Mapping[object, Sequence[float]]):
        vecs = {m: np.asarray(v, dtype=float) for m, v in vectors.items()}
        dims = {v.shape for v in vecs.values()}
        if len(dims) != 1 or len(next(iter(dims))) != 1:
            raise ValidationError(f"vectors must share one dimension, got shapes {sorted(dims)}")
        for m, v in vecs.items():
            if abs(np.linalg.norm(v) - 1) > ORTHO_TOL:
                raise ValidationError(f"vector for {m!r} is not a unit vector")
        self.vectors = vecs
        self.dimension = next(iter(dims))[0]


def _is_orthonormal_basis(vectors: Sequence[np.ndarray], n: int) -> bool:
    if len(vectors) != n:
        return False
    return all(abs(float(np.dot(u, v))) <= ORTHO_TOL for u, v in itertools.combinations(vectors, 2))


def verify_orthonormal_realization(
    labeling: RealVectorLabeling,
    scenario: MeasurementScenario,
    exhaustive: bool = False,
) -> tuple[bool, Optional[str]]:
    """Check that every context is labelled by an orthonormal basis.

    With ``exhaustive`` also check that no other n-subset of measurements
    forms an orthonormal basis absent from the cover.
    """
    missing = [m for m in scenario.measurements if m not in labeling.vectors]
    if missing:
        raise ValidationError(f"no vector for measurement(s) {missing!r}")
    n = labeling.dimension
    vec = labeling.vectors
    for c in scenario.contexts:
        if len(c) != n:
            return False, f"context {list(c)} has {len(c)} elements, dimension is {n}"
        if not _is_orthonormal_basis([vec[m] for m in c], n):
            return False, f"context {list(c)} is not orthogonal"
    if exhaustive:
        cover = {frozenset(c) for c in scenario.contexts}
        for combo in itertools.combinations(scenario.measurements, n):
            if frozenset(combo) not in cover and _is_orthonormal_basis([vec[m] for m in combo], n):
                return False, f"{list(combo)} is an orthonormal basis missing from the cover"
    return True, None
