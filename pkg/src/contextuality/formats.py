"""JSON file formats: models, KS covers, vector labelings, database instances, events.

All labels are read as strings.  Rational weights are ``"p/q"`` or integer
strings (plain JSON integers are accepted too); decimals are rejected.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

from .errors import ParseError, ValidationError
from .kochen_specker import RealVectorLabeling, ks_cover
from .logic import EventFormula, event, parse_formula
from .relational import DatabaseInstance, RelationInstance
from .scenario import (
    Distribution,
    EmpiricalModel,
    LocalSection,
    MeasurementScenario,
    Semiring,
    format_rational,
    parse_rational,
)

MODEL_KINDS = {"probability": Semiring.PROBABILITY, "possibility": Semiring.BOOLEAN}


def read_json(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None


def dumps(data: Any) -> str:
    """Canonical serialisation: sorted keys, two-space indent."""
    return json.dumps(data, sort_keys=True, indent=2)


def _require(data: dict, key: str, kind: type, where: str):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"{where}: missing field {key!r}")
    value = data[key]
    if not isinstance(value, kind):
        raise ParseError(f"{where}: field {key!r} must be a {kind.__name__}")
    return value


def _label(x, where: str) -> str:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise ParseError(f"{where}: label {x!r} must be a string or integer")
    return str(x)


def _str_list(values, where: str) -> list[str]:
    if not isinstance(values, list):
        raise ParseError(f"{where}: expected a list")
    return [_label(v, where) for v in values]


def _contexts(data: dict, where: str) -> list[list[str]]:
    return [_str_list(c, where) for c in _require(data, "contexts", list, where)]


def _context_ref(ref, scenario: MeasurementScenario, where: str):
    if isinstance(ref, bool):
        raise ParseError(f"{where}: bad context reference {ref!r}")
    if isinstance(ref, int):
        if not 0 <= ref < len(scenario.contexts):
            raise ValidationError(f"{where}: context index {ref} out of range")
        return scenario.contexts[ref]
    if isinstance(ref, list):
        return scenario.contexts[scenario.context_index(_str_list(ref, where))]
    raise ParseError(f"{where}: context must be an index or a list of measurements")


# -- scenarios and models ---------------------------------------------------

def load_scenario(data: dict) -> MeasurementScenario:
    where = "scenario"
    measurements = _str_list(_require(data, "measurements", list, where), where)
    outcomes = _require(data, "outcomes", dict, where)
    domains = {}
    for m, dom in outcomes.items():
        labels = _str_list(dom, f"outcomes of {m}")
        if any("," in o for o in labels):
            raise ValidationError(f"outcome labels of {m!r} may not contain ','")
        domains[m] = labels
    return MeasurementScenario(measurements, domains, _contexts(data, where))


def load_model(data: dict) -> tuple[MeasurementScenario, Optional[EmpiricalModel]]:
    """Scenario plus model; the model is None when the file only describes a scenario."""
    scenario = load_scenario(data)
    if "model" not in data:
        return scenario, None
    body = _require(data, "model", dict, "model")
    kind_name = _require(body, "kind", str, "model")
    if kind_name not in MODEL_KINDS:
        raise ParseError(f"model kind must be one of {sorted(MODEL_KINDS)}, got {kind_name!r}")
    kind = MODEL_KINDS[kind_name]
    tables = {}
    for k, entry in enumerate(_require(body, "tables", list, "model")):
        where = f"model table {k}"
        if not isinstance(entry, dict) or "context" not in entry:
            raise ParseError(f"{where}: missing field 'context'")
        c = _context_ref(entry["context"], scenario, where)
        if c in tables:
            raise ValidationError(f"{where}: second table for context {list(c)}")
        rows = _require(entry, "rows", dict, where)
        weights = {}
        for key, value in rows.items():
            parts = key.split(",") if c else []
            if len(parts) != len(c):
                raise ParseError(f"{where}: row key {key!r} does not name {len(c)} outcomes")
            s = LocalSection(zip(c, parts))
            if kind is Semiring.BOOLEAN:
                if value in (True, 1, "1"):
                    weights[s] = True
                elif value in (False, 0, "0"):
                    continue
                else:
                    raise ParseError(f"{where}: possibility entry must be 0/1, got {value!r}")
            else:
                if isinstance(value, float):
                    raise ValidationError(f"{where}: decimal weight {value!r}; use 'p/q'")
                weights[s] = parse_rational(value)
        tables[c] = Distribution(c, weights, kind)
    missing = [list(c) for c in scenario.contexts if c not in tables]
    if missing:
        raise ValidationError(f"no table for context(s) {missing}")
    return scenario, EmpiricalModel(scenario, tables)


def scenario_to_json(scenario: MeasurementScenario) -> dict:
    return {
        "measurements": [str(m) for m in scenario.measurements],
        "outcomes": {str(m): [str(o) for o in scenario.domain(m)] for m in scenario.measurements},
        "contexts": [[str(m) for m in c] for c in scenario.contexts],
    }


def model_to_json(model: EmpiricalModel) -> dict:
    if model.kind is Semiring.SIGNED:
        raise ValidationError("signed models have no file representation")
    sc = model.scenario
    data = scenario_to_json(sc)
    tables = []
    for i, (c, d) in enumerate(zip(sc.contexts, model.tables)):
        rows = {}
        for s in sorted(d.weights, key=sc.section_key):
            key = ",".join(str(s[m]) for m in c)
            rows[key] = 1 if model.kind is Semiring.BOOLEAN else format_rational(d.weights[s])
        tables.append({"context": i, "rows": rows})
    data["model"] = {"kind": "possibility" if model.kind is Semiring.BOOLEAN else "probability", "tables": tables}
    return data


# -- KS covers and labelings ------------------------------------------------

def load_cover(data: dict) -> MeasurementScenario:
    where = "cover"
    return ks_cover(_str_list(_require(data, "measurements", list, where), where), _contexts(data, where))


def cover_to_json(scenario: MeasurementScenario) -> dict:
    return {
        "measurements": [str(m) for m in scenario.measurements],
        "contexts": [[str(m) for m in c] for c in scenario.contexts],
    }


def load_labeling(data: dict) -> RealVectorLabeling:
    vectors = _require(data, "vectors", dict, "labeling")
    parsed = {}
    for m, v in vectors.items():
        if not isinstance(v, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
            raise ParseError(f"labeling: vector for {m!r} must be a list of numbers")
        parsed[str(m)] = v
    return RealVectorLabeling(parsed)


# -- database instances -----------------------------------------------------

def load_instance(data: dict) -> DatabaseInstance:
    where = "instance"
    attrs = _require(data, "attributes", dict, where)
    domains = {str(a): tuple(_str_list(dom, f"domain of {a}")) for a, dom in attrs.items()}
    schema = [tuple(_str_list(a, where)) for a in _require(data, "schema", list, where)]
    for a_set in schema:
        unknown = [a for a in a_set if a not in domains]
        if unknown:
            raise ValidationError(f"schema element {list(a_set)} mentions unknown attribute(s) {unknown}")
    found: dict = {}
    for k, entry in enumerate(_require(data, "relations", list, where)):
        rwhere = f"relation {k}"
        idx = _require(entry, "schema", int, rwhere)
        if not 0 <= idx < len(schema):
            raise ValidationError(f"{rwhere}: schema index {idx} out of range")
        if idx in found:
            raise ValidationError(f"{rwhere}: second relation for schema element {idx}")
        a_set = schema[idx]
        tuples = set()
        for t in _require(entry, "tuples", list, rwhere):
            values = _str_list(t, rwhere)
            if len(values) != len(a_set):
                raise ParseError(f"{rwhere}: tuple {t!r} has {len(values)} values for {len(a_set)} attributes")
            tuples.add(LocalSection(zip(a_set, values)))
        found[idx] = RelationInstance(a_set, frozenset(tuples))
    relations = tuple(found.get(i, RelationInstance(a, frozenset())) for i, a in enumerate(schema))
    return DatabaseInstance(domains, tuple(schema), relations)


def relation_to_json(rel: RelationInstance) -> dict:
    return {"attributes": [str(a) for a in rel.attributes], "tuples": [[str(v) for v in r] for r in rel.rows()]}


def instance_to_json(instance: DatabaseInstance) -> dict:
    return {
        "attributes": {str(a): [str(v) for v in dom] for a, dom in instance.domains.items()},
        "schema": [[str(a) for a in s] for s in instance.schema],
        "relations": [
            {"schema": i, "tuples": [[str(v) for v in r] for r in rel.rows()]} for i, rel in enumerate(instance.relations)
        ],
    }


# -- event files ------------------------------------------------------------

def load_events(data, scenario: Optional[MeasurementScenario] = None) -> list:
    """Events as ``[{"context": i, "formula": "..."}]`` (or wrapped in ``{"events": [...]}``).

    Without a scenario only the formula syntax is checked and raw
    ``(context, Formula)`` pairs are returned.
    """
    if isinstance(data, dict):
        data = _require(data, "events", list, "events")
    if not isinstance(data, list):
        raise ParseError("events: expected a list")
    out = []
    for k, entry in enumerate(data):
        where = f"event {k}"
        if not isinstance(entry, dict) or "context" not in entry:
            raise ParseError(f"{where}: missing field 'context'")
        text = _require(entry, "formula", str, where)
        if scenario is None:
            out.append((entry["context"], parse_formula(text)))
        else:
            c = _context_ref(entry["context"], scenario, where)
            out.append(event(scenario, c, text))
    return out


def events_to_json(events: list[EventFormula], scenario: MeasurementScenario) -> list:
    return [{"context": scenario.context_index(e.context), "formula": str(e.formula)} for e in events]


def global_distribution_to_json(dist) -> dict:
    sc = dist.scenario
    return {
        "measurements": [str(m) for m in sc.measurements],
        "signed": dist.signed,
        "weights": [
            {"assignment": [str(g[m]) for m in sc.measurements], "weight": format_rational(w)}
            for g, w in dist.sorted_items()
        ],
    }


def detect_format(data) -> str:
    if isinstance(data, list) or (isinstance(data, dict) and "events" in data):
        return "events"
    if not isinstance(data, dict):
        raise ParseError("unrecognised file: top level must be an object or list")
    if "schema" in data:
        return "instance"
    if "vectors" in data:
        return "labeling"
    if "outcomes" in data:
        return "model" if "model" in data else "scenario"
    if "measurements" in data and "contexts" in data:
        return "cover"
    raise ParseError("unrecognised file format")

