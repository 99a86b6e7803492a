"""Contextuality analysis of empirical models.

Measurement scenarios and semiring-valued empirical models, the
contextuality hierarchy (probabilistic, logical, strong), logical Bell
inequalities, Born-rule predictions for two qubits, Kochen-Specker covers and
the relational-database reading of possibility tables.
"""
from .analysis import (
    DEFAULT_BOUND,
    ContextualityReport,
    GlobalDistribution,
    classify,
    consistent_global_assignments,
    enumerate_global_assignments,
    find_global_distribution,
    find_signed_global_measure,
    is_logically_contextual,
    is_strongly_contextual,
    separating_functional,
)
from .errors import (
    ContextualityError,
    CyclicCoverError,
    IncompatibleModelError,
    ParseError,
    SatisfiableFamilyError,
    StateSpaceError,
    ValidationError,
)
from .kochen_specker import divisor_criterion, is_ks_contextual, ks_cover, ks_model, verify_orthonormal_realization
from .logic import bell_violation, event, event_probability, jointly_satisfiable, parse_formula
from .relational import (
    DatabaseInstance,
    RelationInstance,
    instance_to_model,
    is_acyclic,
    model_to_instance,
    natural_join,
    project,
    universal_relation,
    vorobev_extend,
)
from .scenario import (
    Distribution,
    EmpiricalModel,
    LocalSection,
    MeasurementScenario,
    Semiring,
    enumerate_sections,
    is_compatible,
    marginalise,
    new_scenario,
    restrict_section,
    support,
)

__version__ = "0.1.0"
