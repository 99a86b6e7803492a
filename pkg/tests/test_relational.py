import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contextuality import (
    DatabaseInstance,
    EmpiricalModel,
    LocalSection,
    RelationInstance,
    instance_to_model,
    is_acyclic,
    is_logically_contextual,
    is_strongly_contextual,
    model_to_instance,
    natural_join,
    new_scenario,
    project,
    universal_relation,
    vorobev_extend,
)
from contextuality.errors import CyclicCoverError, IncompatibleModelError, ValidationError
from contextuality.fixtures import bell_scenario, bell_table, hardy_table, triangle_model

from oracles import (
    brute_consistent,
    marginal_of_global,
    random_acyclic_cover,
    random_boolean_model,
    random_compatible_model,
    random_scenario,
)

BIN = (0, 1)


def rel(attrs, rows):
    return RelationInstance(tuple(attrs), frozenset(LocalSection(zip(attrs, r)) for r in rows))


def db(domains, relations):
    return DatabaseInstance(domains, tuple(r.attributes for r in relations), tuple(relations))


def chain_instance():
    doms = dict.fromkeys("ABC", BIN)
    return db(doms, [rel("AB", [(0, 0), (1, 1)]), rel("BC", [(0, 0), (1, 1)])])


def triangle_instance():
    doms = dict.fromkeys("ABC", BIN)
    eq = [(0, 0), (1, 1)]
    return db(doms, [rel("AB", eq), rel("BC", eq), rel("AC", [(0, 1), (1, 0)])])


def _brute_join(instance):
    attrs = instance.attributes
    out = set()
    for vals in itertools.product(*(instance.domains[a] for a in attrs)):
        g = dict(zip(attrs, vals))
        if all(tuple(g[a] for a in r.attributes) in set(r.rows()) for r in instance.relations):
            out.add(vals)
    return out


def test_project():
    r = rel("AB", [(0, 0), (1, 1)])
    assert project(r, "A").rows() == [(0,), (1,)]
    assert project(r, "AB") == r
    assert len(project(rel("AB", []), "A")) == 0
    with pytest.raises(ValidationError):
        project(r, "C")


def test_chain_join():
    assert set(natural_join(chain_instance()).rows()) == {(0, 0, 0), (1, 1, 1)}


def test_empty_relation_gives_empty_join():
    doms = dict.fromkeys("AB", BIN)
    inst = db(doms, [rel("A", [(0,)]), rel("B", [])])
    assert len(natural_join(inst)) == 0


def test_hardy_join_contains_expected_tuple():
    inst = model_to_instance(hardy_table())
    joined = natural_join(inst)
    assert len(joined) > 0
    assert LocalSection({"a1": 1, "a2": 1, "b1": 0, "b2": 0}) in joined.tuples


def test_universal_relation_examples():
    assert universal_relation(triangle_instance()) is None
    assert universal_relation(model_to_instance(hardy_table())) is None
    u = universal_relation(chain_instance())
    assert u is not None and set(u.rows()) == {(0, 0, 0), (1, 1, 1)}


def test_acyclicity_examples():
    assert not is_acyclic(bell_scenario().contexts)
    r = is_acyclic(["AB", "BC", "CD"])
    assert r.acyclic
    assert [t[1] for t in r.trace if t[0] == "attribute"][:1] == ["A"]
    assert is_acyclic(["ABC"])
    assert not is_acyclic(["AB", "BC", "AC"])


def test_vorobev_single_context():
    sc = new_scenario("xy", BIN, ["xy"])
    m = EmpiricalModel.from_rows(sc, [[F(1, 2), F(1, 4), F(1, 8), F(1, 8)]])
    g = vorobev_extend(m)
    assert g.marginal(("x", "y")) == m.tables[0]


def test_vorobev_chain():
    sc = new_scenario("ABC", BIN, ["AB", "BC"])
    h = F(1, 2)
    m = EmpiricalModel.from_rows(sc, [[h, 0, 0, h], [h, 0, 0, h]])
    g = vorobev_extend(m)
    assert {tuple(s[a] for a in "ABC"): w for s, w in g.weights.items()} == {(0, 0, 0): h, (1, 1, 1): h}


def test_vorobev_errors():
    with pytest.raises(CyclicCoverError):
        vorobev_extend(bell_table())
    sc = new_scenario("ABC", BIN, ["AB", "BC"])
    h = F(1, 2)
    signalling = EmpiricalModel.from_rows(sc, [[h, 0, 0, h], [1, 0, 0, 0]])
    with pytest.raises(IncompatibleModelError):
        vorobev_extend(signalling)


def test_model_instance_roundtrip():
    inst = model_to_instance(hardy_table())
    assert len(inst.relations) == 4
    assert instance_to_model(inst, hardy_table().scenario) == hardy_table()


def test_ks_triangle_instance():
    inst = model_to_instance(triangle_model())
    assert [set(r.rows()) for r in inst.relations] == [{(0, 1), (1, 0)}] * 3
    assert len(natural_join(inst)) == 0


def test_empty_relation_rejected_as_model():
    doms = dict.fromkeys("AB", BIN)
    with pytest.raises(ValidationError):
        instance_to_model(db(doms, [rel("AB", [])]))


# -- properties ---------------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_join_matches_brute_force(seed):
    rng = random.Random(seed)
    m = random_boolean_model(rng, random_scenario(rng, max_measurements=4))
    inst = model_to_instance(m)
    assert set(natural_join(inst).rows()) == _brute_join(inst)
    assert {tuple(g.values()) for g in brute_consistent(m)} == _brute_join(inst)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_database_equivalences(seed):
    rng = random.Random(seed)
    m = random_boolean_model(rng, random_scenario(rng, max_measurements=4))
    inst = model_to_instance(m)
    assert (universal_relation(inst) is not None) == (not is_logically_contextual(m))
    assert (len(natural_join(inst)) == 0) == is_strongly_contextual(m)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_generated_acyclic_covers_pass_gyo(seed):
    _, cover = random_acyclic_cover(random.Random(seed))
    assert is_acyclic(cover)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_vorobev_reproduces_random_models(seed):
    rng = random.Random(seed)
    attrs, cover = random_acyclic_cover(rng)
    sc = new_scenario(attrs, BIN, cover)
    m = random_compatible_model(rng, sc)
    g = vorobev_extend(m)
    for c, d in zip(sc.contexts, m.tables):
        assert marginal_of_global(sc, g.weights, c) == {s.values_for(c): w for s, w in d.weights.items() if w}
