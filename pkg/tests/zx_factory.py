"""Random ZX-diagrams with a planted match for each rewrite rule."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

import numpy as np

from pqec.symphase import ParamExpr
from pqec.zx import rules
from pqec.zx.diagram import BOUNDARY, H, S, X, Z, ZXDiagram, fuse
from pqec.zx.tensor import diagram_matrix

PARAMS = ("theta", "phi")


def pi(q) -> ParamExpr:
    return ParamExpr.pi(Fraction(q))


def random_phase(rng: random.Random) -> ParamExpr:
    pool = [
        pi(0),
        pi(1),
        pi(Fraction(1, 2)),
        pi(Fraction(-1, 2)),
        pi(Fraction(1, 4)),
        pi(Fraction(-3, 4)),
        ParamExpr.param("theta"),
        ParamExpr.param("theta", -1) + pi(Fraction(1, 2)),
        ParamExpr.param("phi", 2) + pi(Fraction(1, 4)),
        ParamExpr.param("theta") + ParamExpr.param("phi"),
        ParamExpr.radians(0.3),
    ]
    return rng.choice(pool)


def pauli(rng: random.Random) -> ParamExpr:
    return pi(rng.choice([0, 1]))


def proper_clifford(rng: random.Random) -> ParamExpr:
    return pi(rng.choice([Fraction(1, 2), Fraction(-1, 2)]))


def non_pauli(rng: random.Random) -> ParamExpr:
    while True:
        p = random_phase(rng)
        if not p.is_pauli():
            return p


def random_graph_like(rng: random.Random, n_io: int | None = None, extra: int | None = None) -> ZXDiagram:
    """Graph-like diagram: each boundary on its own spider, H edges inside."""
    n_io = rng.randint(1, 4) if n_io is None else n_io
    extra = rng.randint(1, 4) if extra is None else extra
    d = ZXDiagram()
    spiders = [d.add_vertex(Z, random_phase(rng)) for _ in range(2 * n_io + extra)]
    for k in range(n_io):
        b = d.add_vertex(BOUNDARY, qubit=k)
        d.inputs.append(b)
        d.add_edge(b, spiders[k], rng.choice([S, H]))
    for k in range(n_io):
        b = d.add_vertex(BOUNDARY, qubit=k)
        d.outputs.append(b)
        d.add_edge(b, spiders[n_io + k], rng.choice([S, H]))
    for i, v in enumerate(spiders):
        for w in spiders[i + 1 :]:
            if rng.random() < 0.45:
                d.add_edge(v, w, H)
    return d


def interior_spiders(d: ZXDiagram) -> list[int]:
    return [v for v in d.spiders() if d.is_interior(v)]


def _ensure_edge(d: ZXDiagram, v: int, w: int) -> None:
    if w not in d.adj[v]:
        d.add_edge(v, w, H)


def leg_candidates(d: ZXDiagram) -> list[int]:
    """Spiders that cannot turn into a second leaf once a gadget attaches."""
    return [v for v in d.spiders() if d.degree(v) >= 1]


def add_gadget(d: ZXDiagram, legs: list[int], phase: ParamExpr, axis_phase: ParamExpr | None = None) -> int:
    axis = d.add_vertex(Z, axis_phase or pi(0))
    leaf = d.add_vertex(Z, phase)
    d.add_edge(axis, leaf, H)
    for leg in legs:
        d.add_edge(axis, leg, H)
    return axis


Planted = tuple[ZXDiagram, Callable[[ZXDiagram], None]]


def plant_fusion(rng: random.Random) -> Planted:
    d = random_graph_like(rng)
    v, w = rng.sample(d.spiders(), 2)
    colour = rng.choice([Z, X])
    d.types[v] = d.types[w] = colour
    d.adj[v].pop(w, None)
    d.adj[w].pop(v, None)
    d.add_edge(v, w, S)
    return d, lambda dd: fuse(dd, v, w)


def plant_identity(rng: random.Random) -> Planted:
    d = random_graph_like(rng)
    u, w, et = rng.choice(d.edges())
    d.remove_edge(u, w)
    m = d.add_vertex(Z)
    first = rng.choice([S, H])
    d.add_edge(u, m, first)
    # the two halves compose to the original edge type
    d.add_edge(m, w, et if first is S else et.toggled())
    return d, lambda dd: rules.remove_identity(dd, m)


def plant_lc(rng: random.Random) -> Planted:
    while True:
        d = random_graph_like(rng)
        cands = interior_spiders(d)
        if cands:
            break
    v = rng.choice(cands)
    d.phases[v] = proper_clifford(rng)
    return d, lambda dd: rules.local_complementation(dd, v)


def _pair(rng: random.Random, second_interior: bool, second_pauli: bool) -> Planted | None:
    d = random_graph_like(rng, extra=rng.randint(2, 4))
    inner = interior_spiders(d)
    if not inner:
        return None
    v = rng.choice(inner)
    if second_interior:
        others = [w for w in inner if w != v]
    else:
        others = [w for w in d.spiders() if d.boundary_neighbors(w)]
    if not others:
        return None
    w = rng.choice(others)
    _ensure_edge(d, v, w)
    d.phases[v] = pauli(rng)
    d.phases[w] = pauli(rng) if second_pauli else non_pauli(rng)
    if not d.is_interior(v):
        return None
    return d, (v, w)


def plant_pivot(rng: random.Random) -> Planted:
    while True:
        got = _pair(rng, True, True)
        if got and rules.match_pivot(got[0], *got[1]):
            d, (v, w) = got
            return d, lambda dd: rules.pivot(dd, v, w)


def plant_pivot_gadget(rng: random.Random) -> Planted:
    while True:
        got = _pair(rng, True, False)
        if got and rules.match_pivot_gadget(got[0], *got[1]):
            d, (v, w) = got
            return d, lambda dd: rules.pivot_gadget(dd, v, w)


def plant_gadget_boundary(rng: random.Random) -> Planted:
    while True:
        got = _pair(rng, False, rng.random() < 0.5)
        if got and rules.match_gadget_boundary(got[0], *got[1]):
            d, (v, w) = got
            return d, lambda dd: rules.gadget_boundary(dd, v, w)


def plant_unary_gadget(rng: random.Random) -> Planted:
    d = random_graph_like(rng)
    leg = rng.choice(leg_candidates(d))
    axis = add_gadget(d, [leg], non_pauli(rng), pauli(rng))
    return d, lambda dd: rules.unary_gadget(dd, axis)


def plant_gadget_fusion(rng: random.Random) -> Planted:
    d = random_graph_like(rng)
    cands = leg_candidates(d)
    legs = rng.sample(cands, min(len(cands), rng.randint(2, 3)))
    a1 = add_gadget(d, legs, non_pauli(rng), pauli(rng))
    a2 = add_gadget(d, legs, non_pauli(rng), pauli(rng))
    return d, lambda dd: rules.gadget_fusion(dd, a1, a2)


def plant_pauli_gadget(rng: random.Random) -> Planted:
    d = random_graph_like(rng)
    cands = leg_candidates(d)
    legs = rng.sample(cands, rng.randint(1, min(3, len(cands))))
    axis = add_gadget(d, legs, pauli(rng), pauli(rng))
    return d, lambda dd: rules.remove_pauli_gadget(dd, axis)


def plant_gadget_normalize(rng: random.Random) -> Planted:
    d = random_graph_like(rng)
    cands = leg_candidates(d)
    legs = rng.sample(cands, rng.randint(1, min(3, len(cands))))
    axis = add_gadget(d, legs, non_pauli(rng), pi(1))
    return d, lambda dd: rules.normalize_gadget(dd, rules.gadget_at(dd, axis))


def plant_edge_merge(rng: random.Random) -> Planted:
    """An extra edge, held apart by a phase-free spider, then merged directly."""
    d = random_graph_like(rng)
    spiders = d.spiders()
    v = rng.choice(spiders)
    w = v if rng.random() < 0.25 else rng.choice(spiders)
    if rng.random() < 0.5:
        d.types[w] = X
    et = rng.choice([S, H])
    # two phase-free spiders keep the graph simple even when v == w
    m1, m2 = d.add_vertex(Z), d.add_vertex(Z)
    d.add_edge(v, m1, S)
    d.add_edge(m1, m2, S)
    d.add_edge(m2, w, et)

    def apply(dd: ZXDiagram) -> None:
        dd.remove_vertex(m1)
        dd.remove_vertex(m2)
        dd.add_edge_smart(v, w, et)

    return d, apply


PLANTERS: dict[str, Callable[[random.Random], Planted]] = {
    "fusion": plant_fusion,
    "identity": plant_identity,
    "local_complementation": plant_lc,
    "pivot": plant_pivot,
    "pivot_gadget": plant_pivot_gadget,
    "gadget_boundary": plant_gadget_boundary,
    "unary_gadget": plant_unary_gadget,
    "gadget_fusion": plant_gadget_fusion,
    "pauli_gadget": plant_pauli_gadget,
    "gadget_normalize": plant_gadget_normalize,
    "edge_merge": plant_edge_merge,
}


def random_values(rng: random.Random) -> dict[str, float]:
    return {p: rng.uniform(-np.pi, np.pi) for p in PARAMS}


def nondegenerate(d: ZXDiagram, assignments: list[dict[str, float]]) -> list[np.ndarray] | None:
    """Matrices of ``d`` under each assignment, or None if any is (near) zero."""
    out = []
    for vals in assignments:
        m = diagram_matrix(d, vals)
        if np.linalg.norm(m) < 1e-6:
            return None
        out.append(m)
    return out
