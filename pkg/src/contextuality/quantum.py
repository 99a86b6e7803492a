"""Two-qubit Born-rule predictions for equatorial spin measurements.

Basis order is |uu>, |ud>, |du>, |dd> (u = spin up, d = spin down), qubit 1
first.  Outcome index 0 of a measurement is spin up and index 1 spin down.
"""
from __future__ import annotations

import cmath
import enum
import math
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import ValidationError
from .scenario import Distribution, EmpiricalModel, MeasurementScenario, Semiring, enumerate_sections

NORM_TOL = 1e-12
SNAP_TOL = 1e-9
MAX_DENOMINATOR = 2**16

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)


class Spin(enum.IntEnum):
    UP = 0
    DOWN = 1


def _unit(v: np.ndarray, what: str = "vector") -> np.ndarray:
    if abs(np.linalg.norm(v) - 1) > NORM_TOL:
        raise ValidationError(f"{what} is not normalised (norm {np.linalg.norm(v)!r})")
    return v


def canonical_angle(phi: float) -> float:
    if not math.isfinite(phi):
        raise ValidationError(f"angle must be finite, got {phi!r}")
    return math.fmod(math.fmod(phi, 2 * math.pi) + 2 * math.pi, 2 * math.pi)


def equatorial_outcome_vector(phi: float, outcome: Spin) -> np.ndarray:
    """Outcome vector for a measurement at angle ``phi`` to the X axis.

    Up is (|u> + e^{i phi}|d>)/sqrt 2, Down is the same with phi + pi.
    """
    phi = canonical_angle(phi)
    shift = 0.0 if Spin(outcome) is Spin.UP else math.pi
    return np.array([1, cmath.exp(1j * (phi + shift))], dtype=complex) / math.sqrt(2)


def tensor_product(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(v, dtype=complex), np.asarray(w, dtype=complex))


def bell_state() -> np.ndarray:
    return np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)


def born_probability(state: np.ndarray, outcome: np.ndarray) -> float:
    """|<state|outcome>|^2, clamped to [0, 1] after a tolerance check."""
    state = np.asarray(state, dtype=complex)
    outcome = np.asarray(outcome, dtype=complex)
    if state.shape != outcome.shape:
        raise ValidationError(f"dimension mismatch: {state.shape} vs {outcome.shape}")
    p = abs(np.vdot(state, outcome)) ** 2
    if p < -NORM_TOL or p > 1 + NORM_TOL:
        raise ValidationError(f"probability {p} outside [0, 1]")
    return min(1.0, max(0.0, float(p)))


def snap(p: float) -> Fraction:
    """Nearest small-denominator rational if within tolerance, else the exact float value."""
    q = Fraction(p).limit_denominator(MAX_DENOMINATOR)
    if abs(float(q) - p) <= SNAP_TOL:
        return q
    return Fraction(p)


def _repair(row: list[Fraction]) -> list[Fraction]:
    excess = sum(row, Fraction(0)) - 1
    if abs(excess) >= SNAP_TOL:
        raise ValidationError(f"row sums to 1{float(excess):+.3g}; repair exceeds tolerance")
    if excess:
        k = max(range(len(row)), key=lambda i: row[i])
        row = list(row)
        row[k] -= excess
    return row


def snap_row(probs: list[float]) -> list[Fraction]:
    """Snap a row of Born probabilities and renormalise it to sum exactly 1.

    The snapped row is used when its sum is within tolerance of 1; otherwise
    independent snapping has drifted too far and the exact float values are
    kept instead.
    """
    snapped = [snap(p) for p in probs]
    if abs(sum(snapped, Fraction(0)) - 1) < SNAP_TOL:
        return _repair(snapped)
    return _repair([Fraction(p) for p in probs])


def quantum_empirical_model(
    state: np.ndarray,
    assignment: Mapping[object, tuple[int, float]],
    scenario: MeasurementScenario,
) -> EmpiricalModel:
    """Probability model predicted by the Born rule.

    ``assignment`` maps each measurement to ``(qubit, angle)`` with qubit 1
    or 2.  Every context must pair one qubit-1 and one qubit-2 measurement.
    """
    state = _unit(np.asarray(state, dtype=complex), "state")
    if state.shape != (4,):
        raise ValidationError("state must be a two-qubit vector of dimension 4")
    for m in scenario.measurements:
        if m not in assignment:
            raise ValidationError(f"no angle for measurement {m!r}")
        if assignment[m][0] not in (1, 2):
            raise ValidationError(f"measurement {m!r} assigned to qubit {assignment[m][0]!r}")
        if len(scenario.domain(m)) != 2:
            raise ValidationError(f"measurement {m!r} must have two outcomes")
    tables = []
    for c in scenario.contexts:
        qubits = sorted(assignment[m][0] for m in c)
        if qubits != [1, 2]:
            raise ValidationError(f"context {c!r} does not pair a qubit-1 and a qubit-2 measurement")
        first = next(m for m in c if assignment[m][0] == 1)
        second = next(m for m in c if assignment[m][0] == 2)
        sections = enumerate_sections(scenario, c)
        probs = []
        for s in sections:
            u = equatorial_outcome_vector(assignment[first][1], scenario.domain(first).index(s[first]))
            v = equatorial_outcome_vector(assignment[second][1], scenario.domain(second).index(s[second]))
            probs.append(born_probability(state, tensor_product(u, v)))
        tables.append(Distribution(c, dict(zip(sections, snap_row(probs))), Semiring.PROBABILITY))
    return EmpiricalModel(scenario, tables)


def bell_table(angles: Mapping[str, float], state: np.ndarray | None = None) -> EmpiricalModel:
    """Bell-scenario model for Alice's a1, a2 on qubit 1 and Bob's b1, b2 on qubit 2 (radians)."""
    from .fixtures import bell_scenario

    sc = bell_scenario()
    assignment = {m: (1 if m.startswith("a") else 2, float(angles[m])) for m in sc.measurements}
    return quantum_empirical_model(bell_state() if state is None else state, assignment, sc)
