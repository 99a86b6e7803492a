"""Ready-made scenarios and models: Bell and Hardy tables, KS covers."""
from __future__ import annotations

from fractions import Fraction as F

from .kochen_specker import ks_cover, ks_model
from .logic import event
from .scenario import EmpiricalModel, MeasurementScenario, Semiring, new_scenario

BELL_MEASUREMENTS = ("a1", "a2", "b1", "b2")


def bell_scenario() -> MeasurementScenario:
    """Two parties, two binary measurements each; rows in Bell-table order."""
    return new_scenario(BELL_MEASUREMENTS, (0, 1), [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")])


def bell_table() -> EmpiricalModel:
    """The Bell table; columns (0,0), (1,0), (0,1), (1,1)."""
    h, e, t = F(1, 2), F(1, 8), F(3, 8)
    return EmpiricalModel.from_rows(
        bell_scenario(),
        [
            [h, 0, 0, h],
            [t, e, e, t],
            [t, e, e, t],
            [e, t, t, e],
        ],
    )


def correlated_table() -> EmpiricalModel:
    h = F(1, 2)
    return EmpiricalModel.from_rows(bell_scenario(), [[h, 0, 0, h]] * 4)


def uniform_table() -> EmpiricalModel:
    q = F(1, 4)
    return EmpiricalModel.from_rows(bell_scenario(), [[q] * 4] * 4)


def pr_box() -> EmpiricalModel:
    """Perfect correlation on three rows, perfect anticorrelation on (a2, b2)."""
    h = F(1, 2)
    return EmpiricalModel.from_rows(bell_scenario(), [[h, 0, 0, h]] * 3 + [[0, h, h, 0]])


def hardy_scenario() -> MeasurementScenario:
    return new_scenario(BELL_MEASUREMENTS, (0, 1), [("a1", "b1"), ("a2", "b1"), ("a1", "b2"), ("a2", "b2")])


def hardy_table() -> EmpiricalModel:
    """The possibility table of the Hardy paradox, rows (a1,b1), (a2,b1), (a1,b2), (a2,b2)."""
    return EmpiricalModel.from_rows(
        hardy_scenario(),
        [
            [1, 1, 1, 1],
            [0, 1, 1, 1],
            [0, 1, 1, 1],
            [1, 1, 1, 0],
        ],
        kind=Semiring.BOOLEAN,
    )


def bell_events(scenario: MeasurementScenario | None = None) -> list:
    """Correlation events on the first three rows, anticorrelation on (a2, b2)."""
    sc = scenario or bell_scenario()
    return [
        event(sc, ("a1", "b1"), "(iff (= a1 0) (= b1 0))"),
        event(sc, ("a1", "b2"), "(iff (= a1 0) (= b2 0))"),
        event(sc, ("a2", "b1"), "(iff (= a2 0) (= b1 0))"),
        event(sc, ("a2", "b2"), "(xor (= a2 0) (= b2 0))"),
    ]


def triangle_cover() -> MeasurementScenario:
    return ks_cover(("a", "b", "c"), [("a", "b"), ("b", "c"), ("a", "c")])


def square_cover() -> MeasurementScenario:
    return ks_cover(("a", "b", "c", "d"), [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])


# Each inner list is one four-element context.
EIGHTEEN_NINE_CONTEXTS = (
    (1, 2, 3, 4),
    (1, 5, 6, 7),
    (8, 9, 3, 10),
    (8, 11, 7, 12),
    (2, 5, 13, 14),
    (9, 11, 14, 15),
    (16, 17, 4, 10),
    (16, 18, 6, 12),
    (17, 18, 13, 15),
)


def eighteen_nine_cover() -> MeasurementScenario:
    """18 measurements, 9 contexts of four, every measurement in exactly two contexts."""
    return ks_cover(
        [f"m{i}" for i in range(1, 19)],
        [[f"m{i}" for i in col] for col in EIGHTEEN_NINE_CONTEXTS],
    )


def triangle_model() -> EmpiricalModel:
    return ks_model(triangle_cover())


def eighteen_nine_model() -> EmpiricalModel:
    return ks_model(eighteen_nine_cover())
