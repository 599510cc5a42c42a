"""ZX-diagrams: conversion, individual rewrite rules, simplification and identity detection."""

from __future__ import annotations

import random
import zlib
from fractions import Fraction

import numpy as np
import pytest
from conftest import DATA, commuted_rz, random_circuit, random_values
from zx_factory import PLANTERS, nondegenerate

from pqec.circuit import Circuit, concatenate, inverse, load, parse, unitary
from pqec.symphase import ParamExpr
from pqec.zx import rules
from pqec.zx.diagram import BOUNDARY, H, S, X, Z, ZXDiagram, circuit_to_graph_like, from_circuit, fuse, to_graph_like
from pqec.zx.simplify import SimplifyReport, full_simplify, is_identity, measure
from pqec.zx.tensor import diagram_matrix, equal_up_to_scalar


def pi(q) -> ParamExpr:
    return ParamExpr.pi(Fraction(q))


def P(name: str, c=1) -> ParamExpr:
    return ParamExpr.param(name, c)


def z_matrix(alpha: float) -> np.ndarray:
    """One-in one-out Z spider, written out directly."""
    return np.diag([1, np.exp(1j * alpha)])


def wire(d: ZXDiagram, v: int, qubit: int) -> None:
    """Attach an input and an output boundary to spider ``v``."""
    i = d.add_vertex(BOUNDARY, qubit=qubit)
    o = d.add_vertex(BOUNDARY, qubit=qubit)
    d.inputs.append(i)
    d.outputs.append(o)
    d.add_edge(i, v, S)
    d.add_edge(v, o, S)


def same_semantics(a: ZXDiagram, b: ZXDiagram, params=("theta", "phi", "a0", "a1", "a2"), trials: int = 10) -> bool:
    rng = random.Random(0)
    for _ in range(trials):
        vals = random_values(rng, params)
        if not equal_up_to_scalar(diagram_matrix(a, vals), diagram_matrix(b, vals)):
            return False
    return True


# -- conversion --------------------------------------------------------------


def test_from_circuit_matches_unitary():
    rng = random.Random(1)
    for _ in range(60):
        c = random_circuit(rng, rng.randint(1, 4), rng.randint(0, 12), ["theta"])
        vals = random_values(rng, ["theta"])
        u = unitary(c.instantiate(vals))
        assert equal_up_to_scalar(diagram_matrix(from_circuit(c), vals), u)
        g = circuit_to_graph_like(c)
        assert g.is_graph_like()
        assert equal_up_to_scalar(diagram_matrix(g, vals), u)


def test_empty_circuit_is_bare_wires():
    d = from_circuit(Circuit(2))
    assert d.num_spiders() == 0
    assert is_identity(d).is_identity


def test_qaoa_block_has_three_theta_gadgets():
    d = from_circuit(load(DATA / "qaoa3.pqasm"))
    leaves = [v for v in d.spiders() if d.degree(v) == 1 and d.phases[v] == P("theta")]
    assert len(leaves) == 3
    for leaf in leaves:
        (axis,) = d.neighbors(leaf)
        assert d.phases[axis].is_zero() and d.degree(axis) == 3


def test_single_cx_has_two_spiders():
    cx = parse("qubits 2;\ncx q[0], q[1];\n")
    d = from_circuit(cx)
    assert d.num_spiders() == 2
    g = to_graph_like(d)
    # each of the two spiders touches two boundaries and gets one phase-free splitter
    assert g.num_spiders() == 4
    assert sum(1 for v in g.spiders() if len(g.boundary_neighbors(v)) == 1) == 4
    assert equal_up_to_scalar(diagram_matrix(g), unitary(cx))


def test_graph_like_fusion_count_on_qaoa_block():
    d = from_circuit(load(DATA / "qaoa3.pqasm"))
    plain = [
        (v, w)
        for v, w, t in d.edges()
        if t is S and not d.is_boundary(v) and not d.is_boundary(w) and d.types[v] == d.types[w]
    ]
    assert len(plain) == 3
    assert to_graph_like(d).num_spiders() == d.num_spiders() - len(plain)


# -- edge resolution ---------------------------------------------------------


def _two_spiders(colour_w=Z) -> tuple[ZXDiagram, int, int]:
    d = ZXDiagram()
    v = d.add_vertex(Z, P("a0"))
    w = d.add_vertex(colour_w, P("a1"))
    wire(d, v, 0)
    wire(d, w, 1)
    return d, v, w


def test_parallel_hadamard_edges_cancel():
    d, v, w = _two_spiders()
    d.add_edge(v, w, H)
    d.add_edge_smart(v, w, H)
    assert d.num_edges() == 4 and d.edge_type(v, w) is None


def test_plain_self_loop_is_dropped():
    d, v, _ = _two_spiders()
    d.add_edge_smart(v, v, S)
    assert d.phases[v] == P("a0") and v not in d.adj[v]


def test_hadamard_self_loop_adds_pi():
    # explicit loop through two phase-free spiders, compared to Z(alpha + pi)
    d = ZXDiagram()
    v = d.add_vertex(Z, ParamExpr.radians(0.7))
    wire(d, v, 0)
    m1, m2 = d.add_vertex(Z), d.add_vertex(Z)
    d.add_edge(v, m1, S)
    d.add_edge(m1, m2, S)
    d.add_edge(m2, v, H)
    assert equal_up_to_scalar(diagram_matrix(d), z_matrix(0.7 + np.pi))
    assert not equal_up_to_scalar(diagram_matrix(d), z_matrix(0.7 + np.pi / 2))
    loop = ZXDiagram()
    u = loop.add_vertex(Z, ParamExpr.radians(0.7))
    wire(loop, u, 0)
    loop.add_edge_smart(u, u, H)
    assert equal_up_to_scalar(diagram_matrix(loop), diagram_matrix(d))


# -- individual rules ------------------------------------------------------


def test_fusion_of_adjacent_rx_spiders():
    c = parse("qubits 1;\ninput angle t1;\ninput angle t3;\nrx(t1) q[0];\nrx(t3) q[0];\n")
    g = circuit_to_graph_like(c)
    phases = sorted((g.phases[v] for v in g.spiders()), key=str)
    assert phases == [ParamExpr.zero(), P("t1") + P("t3")]


def test_fusion_with_phase_free_spider_keeps_phase():
    d = ZXDiagram()
    v = d.add_vertex(Z, P("theta"))
    w = d.add_vertex(Z)
    i, o = d.add_vertex(BOUNDARY), d.add_vertex(BOUNDARY)
    d.inputs.append(i)
    d.outputs.append(o)
    d.add_edge(i, v)
    d.add_edge(v, w)
    d.add_edge(w, o)
    fuse(d, v, w)
    assert d.phases[v] == P("theta") and d.num_spiders() == 1


def _gadget_cancel(n: int = 3) -> tuple[ZXDiagram, int, int, list[int]]:
    """A (theta + pi/4) spider with legs a_i and a (-theta + pi/4) unary gadget."""
    d = ZXDiagram()
    legs = []
    for k in range(n):
        a = d.add_vertex(Z, P(f"a{k}"))
        wire(d, a, k)
        legs.append(a)
    top = d.add_vertex(Z, P("theta") + pi(Fraction(1, 4)))
    for a in legs:
        d.add_edge(top, a, H)
    axis = d.add_vertex(Z)
    leaf = d.add_vertex(Z, -P("theta") + pi(Fraction(1, 4)))
    d.add_edge(top, axis, H)
    d.add_edge(axis, leaf, H)
    return d, top, axis, legs


def test_unary_gadget_cancels_parameter():
    d, top, axis, _ = _gadget_cancel()
    before = d.copy()
    rules.unary_gadget(d, axis)
    assert d.phases[top] == pi(Fraction(1, 2))
    assert d.phases[top].is_proper_clifford()
    assert same_semantics(before, d)


def test_local_complementation_after_unary_gadget():
    d, top, axis, legs = _gadget_cancel()
    rules.unary_gadget(d, axis)
    before = d.copy()
    rules.local_complementation(d, top)
    assert top not in d.types
    for k, a in enumerate(legs):
        assert d.phases[a] == P(f"a{k}") - pi(Fraction(1, 2))
    for i, a in enumerate(legs):
        for b in legs[i + 1 :]:
            assert d.edge_type(a, b) is H
    assert same_semantics(before, d)


def test_local_complementation_single_neighbour():
    d = ZXDiagram()
    a = d.add_vertex(Z, P("a0"))
    wire(d, a, 0)
    v = d.add_vertex(Z, pi(Fraction(-1, 2)))
    d.add_edge(a, v, H)
    rules.local_complementation(d, v)
    assert d.phases[a] == P("a0") + pi(Fraction(1, 2))
    assert d.num_edges() == 2


def test_local_complementation_rejects_non_clifford():
    d, top, _, _ = _gadget_cancel()
    with pytest.raises(rules.RuleMismatch):
        rules.local_complementation(d, top)


def _pivot_pair(j: int, k: int, shared: bool) -> tuple[ZXDiagram, int, int, int, int, int | None]:
    d = ZXDiagram()
    a = d.add_vertex(Z, P("a0"))
    b = d.add_vertex(Z, P("a1"))
    wire(d, a, 0)
    wire(d, b, 1)
    v = d.add_vertex(Z, pi(j))
    w = d.add_vertex(Z, pi(k))
    d.add_edge(v, w, H)
    d.add_edge(v, a, H)
    d.add_edge(w, b, H)
    c = None
    if shared:
        c = d.add_vertex(Z, P("a2"))
        wire(d, c, 2)
        d.add_edge(v, c, H)
        d.add_edge(w, c, H)
    return d, v, w, a, b, c


def test_smallest_pivot():
    d, v, w, a, b, _ = _pivot_pair(0, 0, shared=False)
    before = d.copy()
    rules.pivot(d, v, w)
    assert v not in d.types and w not in d.types
    assert d.edge_type(a, b) is H
    assert d.phases[a] == P("a0") and d.phases[b] == P("a1")
    assert same_semantics(before, d)


def test_pivot_phase_update():
    d, v, w, a, b, c = _pivot_pair(1, 1, shared=True)
    before = d.copy()
    rules.pivot(d, v, w)
    # A gains k*pi, B gains j*pi, C gains (j + k + 1)*pi
    assert d.phases[a] == P("a0") + pi(1)
    assert d.phases[b] == P("a1") + pi(1)
    assert d.phases[c] == P("a2") + pi(1)
    assert same_semantics(before, d)


def test_gadget_boundary_single_qubit():
    d = ZXDiagram()
    w = d.add_vertex(Z, P("a0"))
    wire(d, w, 0)
    v = d.add_vertex(Z, pi(1))
    u = d.add_vertex(Z, P("theta"))
    d.add_edge(v, w, H)
    d.add_edge(v, u, H)
    d.add_edge(u, w, H)
    before = d.copy()
    assert rules.match_gadget_boundary(d, v, w)
    rules.gadget_boundary(d, v, w)
    assert v not in d.types
    assert same_semantics(before, d)


def test_gadget_boundary_rejects_non_matching():
    d = ZXDiagram()
    w = d.add_vertex(Z, P("a0"))
    wire(d, w, 0)
    v = d.add_vertex(Z, P("theta"))
    d.add_edge(v, w, H)
    with pytest.raises(rules.RuleMismatch):
        rules.gadget_boundary(d, v, w)


def test_zero_phase_unary_gadget_leaves_leg():
    d, top, axis, _ = _gadget_cancel()
    leaf = rules.gadget_at(d, axis).leaf
    d.phases[leaf] = pi(0)
    rules.unary_gadget(d, axis)
    assert d.phases[top] == P("theta") + pi(Fraction(1, 4))


def _gadget_pair(p1: ParamExpr, p2: ParamExpr, k: int, j: int):
    d = ZXDiagram()
    legs = []
    for q in range(3):
        a = d.add_vertex(Z, P(f"a{q}"))
        wire(d, a, q)
        legs.append(a)
    axes = []
    for phase, ax in ((p1, k), (p2, j)):
        axis = d.add_vertex(Z, pi(ax))
        leaf = d.add_vertex(Z, phase)
        d.add_edge(axis, leaf, H)
        for a in legs:
            d.add_edge(axis, a, H)
        axes.append(axis)
    return d, axes


def test_gadget_fusion_cancels_opposite_phases():
    d, (a1, a2) = _gadget_pair(P("theta"), -P("theta"), 0, 0)
    before = d.copy()
    rules.gadget_fusion(d, a1, a2)
    leaf = rules.gadget_at(d, a1).leaf
    assert d.phases[leaf].is_zero()
    rules.remove_pauli_gadget(d, a1)
    assert d.num_spiders() == 3
    assert same_semantics(before, d)


def test_gadget_fusion_with_pi_axis():
    d, (a1, a2) = _gadget_pair(P("theta"), P("phi"), 1, 0)
    before = d.copy()
    rules.gadget_fusion(d, a1, a2)
    g = rules.gadget_at(d, a1)
    assert d.phases[g.leaf] == -P("theta") + P("phi")
    assert d.phases[a1].is_zero()
    assert same_semantics(before, d)


def test_gadget_fusion_needs_equal_legs():
    d, (a1, a2) = _gadget_pair(P("theta"), P("phi"), 0, 0)
    leg = next(iter(rules.gadget_at(d, a2).legs))
    d.remove_edge(a2, leg)
    with pytest.raises(rules.RuleMismatch):
        rules.gadget_fusion(d, a1, a2)


@pytest.mark.parametrize("rule", sorted(PLANTERS))
def test_rule_preserves_semantics_sample(rule):
    rng = random.Random(zlib.crc32(rule.encode()))
    done = 0
    while done < 15:
        d, apply = PLANTERS[rule](rng)
        vals = [random_values(rng, ["theta", "phi"]) for _ in range(3)]
        before = nondegenerate(d, vals)
        if before is None:
            continue
        after = d.copy()
        apply(after)
        for m, v in zip(before, vals):
            assert equal_up_to_scalar(m, diagram_matrix(after, v))
        done += 1


# -- simplification ----------------------------------------------------------


def _simplified(a: Circuit, b: Circuit, trace: list | None = None) -> tuple[ZXDiagram, SimplifyReport]:
    d = circuit_to_graph_like(concatenate(inverse(a), b))
    d.trace = trace
    report = SimplifyReport()
    full_simplify(d, report=report)
    return d, report


def test_self_pair_of_qaoa_block_is_identity():
    c = load(DATA / "qaoa3.pqasm")
    d, _ = _simplified(c, c)
    assert is_identity(d).is_identity


def test_gadget_cancel_parameters_cancel_with_lc():
    # the one-legged axis is a bare degree-two spider here, so identity
    # removal does the work of the unary gadget rule
    d, _, _, _ = _gadget_cancel()
    trace: list = []
    d.trace = trace
    full_simplify(d)
    assert "lc" in [r for r, _ in trace]
    assert "theta" not in d.params()


def test_gadget_cancel_circuit_trace():
    empty = Circuit(2, params=["theta"])
    trace: list = []
    d, _ = _simplified(empty, load(DATA / "gadget_cancel.pqasm"), trace)
    names = [r for r, _ in trace]
    assert "lc" in names[names.index("unary_gadget") :]
    assert not d.params()


def test_commuted_rz_is_not_reduced_to_identity():
    a, b = commuted_rz()
    d, _ = _simplified(a, b)
    assert not is_identity(d).is_wiring
    assert {"alpha", "beta"} <= d.params()


def test_measure_never_increases():
    rng = random.Random(7)
    for _ in range(60):
        a = random_circuit(rng, 3, 15, ["theta", "phi"])
        b = random_circuit(rng, 3, 15, ["theta", "phi"])
        _, report = _simplified(a, b)
        assert all(y <= x for x, y in zip(report.measures, report.measures[1:]))
        assert report.measures[-1] == measure(_simplified(a, b)[0])


def test_round_bound_is_respected():
    c = load(DATA / "qaoa3.pqasm")
    d = circuit_to_graph_like(concatenate(inverse(c), c))
    report = SimplifyReport()
    full_simplify(d, max_rounds=0, report=report)
    assert report.rounds == 0 and report.hit_limit


def test_identity_verdict_is_sound():
    rng = random.Random(11)
    proved = 0
    for _ in range(80):
        n = rng.randint(1, 6)
        a = random_circuit(rng, n, 12, ["theta", "phi"])
        b = a if rng.random() < 0.5 else random_circuit(rng, n, 12, ["theta", "phi"])
        d, _ = _simplified(a, b)
        if not is_identity(d).is_identity:
            continue
        proved += 1
        for _ in range(10):
            vals = random_values(rng, ["theta", "phi"])
            assert equal_up_to_scalar(unitary(a.instantiate(vals)), unitary(b.instantiate(vals)))
    assert proved >= 30


# -- identity detection ------------------------------------------------------


def test_empty_three_wire_diagram_is_identity():
    res = is_identity(from_circuit(Circuit(3)))
    assert res.is_identity and res.permutation == (0, 1, 2)


def test_leftover_spider_is_not_identity():
    d = from_circuit(parse("qubits 1;\ninput angle theta;\nrz(theta) q[0];\n"))
    full_simplify(d)
    assert not is_identity(d).is_wiring


def test_swap_is_a_permutation_not_identity():
    d = circuit_to_graph_like(parse("qubits 2;\nswap q[0], q[1];\n"))
    full_simplify(d)
    res = is_identity(d)
    assert res.is_wiring and res.permutation == (1, 0)
    assert not res.is_identity


def test_dot_export_mentions_phases():
    d = from_circuit(parse("qubits 1;\ninput angle theta;\nrz(theta) q[0];\nh q[0];\n"))
    dot = d.to_dot()
    assert dot.startswith("graph") and "theta" in dot


def test_x_spiders_become_z_in_graph_like_form():
    d = from_circuit(parse("qubits 2;\ncx q[0], q[1];\n"))
    assert X in d.types.values()
    assert X not in to_graph_like(d).types.values()
