"""Independent brute-force oracles and random model generators for the tests.

Nothing here calls the search, LP or elimination code under test: global
assignments are enumerated with itertools, vertex search uses its own small
Fraction elimination and no-signalling nullspaces come from sympy.
"""
from __future__ import annotations

import functools
import itertools
import random
from fractions import Fraction

import sympy

from contextuality.scenario import (
    Distribution,
    EmpiricalModel,
    LocalSection,
    MeasurementScenario,
    Semiring,
    enumerate_sections,
    new_scenario,
)


def all_global_assignments(scenario: MeasurementScenario) -> list[dict]:
    ms = scenario.measurements
    return [dict(zip(ms, vals)) for vals in itertools.product(*(scenario.domain(m) for m in ms))]


def brute_consistent(model: EmpiricalModel) -> list[dict]:
    """Global assignments whose every restriction lies in the support."""
    sc = model.scenario
    supports = [{tuple(s[m] for m in c) for s in d.weights} for c, d in zip(sc.contexts, model.tables)]
    return [
        g
        for g in all_global_assignments(sc)
        if all(tuple(g[m] for m in c) in sup for c, sup in zip(sc.contexts, supports))
    ]


def brute_logical(model: EmpiricalModel) -> bool:
    sc = model.scenario
    good = brute_consistent(model)
    for c, d in zip(sc.contexts, model.tables):
        reach = {tuple(g[m] for m in c) for g in good}
        if any(tuple(s[m] for m in c) not in reach for s in d.weights):
            return True
    return False


def brute_strong(model: EmpiricalModel) -> bool:
    return not brute_consistent(model)


def _system(model: EmpiricalModel):
    sc = model.scenario
    cols = all_global_assignments(sc)
    rows, rhs = [], []
    for c, d in zip(sc.contexts, model.tables):
        for s in enumerate_sections(sc, c):
            rows.append([Fraction(1 if all(g[m] == s[m] for m in c) else 0) for g in cols])
            rhs.append(Fraction(d.weight(s)))
    return cols, rows, rhs


def _unique_solution(A: list, b: list, cols: tuple):
    """Unique exact solution of A[:, cols] x = b, or None (inconsistent or not unique)."""
    M = [[row[j] for j in cols] + [bi] for row, bi in zip(A, b)]
    k = len(cols)
    r = 0
    for c in range(k):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            return None
        M[r], M[p] = M[p], M[r]
        M[r] = [v / M[r][c] for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b_ for a, b_ in zip(M[i], M[r])]
        r += 1
    if any(M[i][k] != 0 for i in range(r, len(M))):
        return None
    return [M[i][k] for i in range(k)]


def brute_global_feasible(model: EmpiricalModel) -> bool:
    """Vertex search: some set of independent columns carries a nonnegative exact solution."""
    _, A, b = _system(model)
    n = len(A[0])
    for k in range(1, min(n, len(A)) + 1):
        for cols in itertools.combinations(range(n), k):
            x = _unique_solution(A, b, cols)
            if x is not None and all(v >= 0 for v in x):
                return True
    return False


def marginal_of_global(scenario, weights: dict, context) -> dict:
    out: dict = {}
    for g, w in weights.items():
        key = tuple(g[m] for m in context)
        out[key] = out.get(key, Fraction(0)) + w
    return {k: v for k, v in out.items() if v != 0}


# -- random generators ------------------------------------------------------

def random_cover(rng: random.Random, n_measurements: int, max_contexts: int = 4, max_size: int | None = None):
    ms = [f"x{i}" for i in range(n_measurements)]
    max_size = max_size or n_measurements
    while True:
        k = rng.randint(1, max_contexts)
        contexts = set()
        for _ in range(k):
            size = rng.randint(1, min(max_size, n_measurements))
            contexts.add(frozenset(rng.sample(ms, size)))
        if set().union(*contexts) == set(ms):
            return ms, [sorted(c) for c in sorted(contexts, key=sorted)]


TRIANGLE = (["x0", "x1", "x2"], [["x0", "x1"], ["x1", "x2"], ["x0", "x2"]])


def random_scenario(
    rng: random.Random, max_measurements: int = 4, domain=(0, 1), cyclic_prob: float = 0.0, **kw
) -> MeasurementScenario:
    """Random cover; with ``cyclic_prob`` the three-cycle cover is returned instead."""
    if rng.random() < cyclic_prob:
        return new_scenario(TRIANGLE[0], domain, TRIANGLE[1])
    n = rng.randint(1, max_measurements)
    ms, cover = random_cover(rng, n, **kw)
    return new_scenario(ms, domain, cover)


def random_boolean_model(rng: random.Random, scenario: MeasurementScenario) -> EmpiricalModel:
    tables = []
    for c in scenario.contexts:
        sections = enumerate_sections(scenario, c)
        chosen = [s for s in sections if rng.random() < 0.6] or [rng.choice(sections)]
        tables.append(Distribution(c, {s: True for s in chosen}, Semiring.BOOLEAN))
    return EmpiricalModel(scenario, tables)


@functools.lru_cache(maxsize=None)
def _no_signalling_space(scenario: MeasurementScenario):
    """Uniform point and a nullspace basis of the normalisation + no-signalling equations."""
    index = []
    for k, c in enumerate(scenario.contexts):
        for s in enumerate_sections(scenario, c):
            index.append((k, s))
    pos = {key: i for i, key in enumerate(index)}
    rows = []
    for k, c in enumerate(scenario.contexts):
        rows.append([1 if key[0] == k else 0 for key in index])
    for i, j in itertools.combinations(range(len(scenario.contexts)), 2):
        ci, cj = scenario.contexts[i], scenario.contexts[j]
        shared = [m for m in ci if m in cj]
        if not shared:
            continue
        for t in enumerate_sections(scenario, shared):
            row = [0] * len(index)
            for s in enumerate_sections(scenario, ci):
                if all(s[m] == t[m] for m in shared):
                    row[pos[(i, s)]] += 1
            for s in enumerate_sections(scenario, cj):
                if all(s[m] == t[m] for m in shared):
                    row[pos[(j, s)]] -= 1
            rows.append(row)
    basis = sympy.Matrix(rows).nullspace()
    uniform = []
    for k, s in index:
        size = len(enumerate_sections(scenario, scenario.contexts[k]))
        uniform.append(Fraction(1, size))
    vecs = [[Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) for v in b] for b in basis]
    return index, uniform, vecs


def random_compatible_model(rng: random.Random, scenario: MeasurementScenario, boundary_prob: float = 0.5) -> EmpiricalModel:
    """A random point of the no-signalling polytope, built without any global-distribution code.

    Moves from the uniform model along a random integer combination of the
    no-signalling nullspace; with probability ``boundary_prob`` it goes all
    the way to the boundary so that zeros (and hence non-trivial supports)
    appear.
    """
    index, point, basis = _no_signalling_space(scenario)
    point = list(point)
    if basis:
        direction = [Fraction(0)] * len(point)
        for b in basis:
            c = rng.randint(-3, 3)
            if c:
                direction = [d + c * v for d, v in zip(direction, b)]
        negative = [point[i] / -direction[i] for i in range(len(point)) if direction[i] < 0]
        if negative:
            t_max = min(negative)
            t = t_max if rng.random() < boundary_prob else t_max * Fraction(rng.randint(0, 8), 8)
            point = [p + t * d for p, d in zip(point, direction)]
    by_ctx: dict = {}
    for (k, s), w in zip(index, point):
        by_ctx.setdefault(k, {})[s] = w
    tables = [Distribution(scenario.contexts[k], by_ctx[k], Semiring.PROBABILITY) for k in range(len(scenario.contexts))]
    return EmpiricalModel(scenario, tables)


def random_rational_distribution(rng: random.Random, scenario, context, zero_prob: float = 0.3) -> Distribution:
    sections = enumerate_sections(scenario, context)
    raw = [0 if rng.random() < zero_prob else rng.randint(1, 6) for _ in sections]
    if not any(raw):
        raw[rng.randrange(len(raw))] = 1
    total = sum(raw)
    return Distribution(context, {s: Fraction(r, total) for s, r in zip(sections, raw)}, Semiring.PROBABILITY)


def random_acyclic_cover(rng: random.Random, max_attributes: int = 6):
    """Join-tree construction: each new context shares a subset of one earlier context."""
    attrs = [f"v{i}" for i in range(max_attributes)]
    used: list = []
    fresh = iter(attrs)

    def take(k):
        out = []
        for _ in range(k):
            a = next(fresh, None)
            if a is None:
                break
            out.append(a)
            used.append(a)
        return out

    contexts = [take(rng.randint(1, 3))]
    for _ in range(rng.randint(0, 4)):
        parent = rng.choice(contexts)
        shared = [a for a in parent if rng.random() < 0.5]
        new = take(rng.randint(0 if shared else 1, 2))
        ctx = shared + new
        if ctx and frozenset(ctx) not in {frozenset(c) for c in contexts}:
            contexts.append(ctx)
    return used, contexts


def brute_signalling(model: EmpiricalModel) -> bool:
    """Some pair of tables disagrees on a shared marginal (dict arithmetic only)."""
    sc = model.scenario
    for i, j in itertools.combinations(range(len(sc.contexts)), 2):
        shared = [m for m in sc.contexts[i] if m in sc.contexts[j]]
        sums = []
        for k in (i, j):
            acc: dict = {}
            for s, w in model.tables[k].weights.items():
                key = tuple(s[m] for m in shared)
                acc[key] = acc.get(key, Fraction(0)) + w
            sums.append({k_: v for k_, v in acc.items() if v})
        if sums[0] != sums[1]:
            return True
    return False
