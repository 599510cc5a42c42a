"""Rewrite rules on graph-like diagrams with symbolic phases.

Each rule has a ``match_*`` predicate and an application function that
raises :class:`RuleMismatch` when its preconditions fail.  Rules preserve
the linear map up to a non-zero scalar for every parameter assignment.
"""

from __future__ import annotations

from itertools import combinations
from typing import NamedTuple

from ..symphase import ParamExpr
from .diagram import BOUNDARY, H, S, Z, ZXDiagram, fuse

_PI = ParamExpr.pi(1)


class RuleMismatch(ValueError):
    """A rule was applied to vertices that do not match its left-hand side."""


def _toggle(d: ZXDiagram, v: int, w: int) -> None:
    # complement a hadamard edge between two Z spiders
    if d.adj[v].get(w) is H:
        d.remove_edge(v, w)
    else:
        d.add_edge_smart(v, w, H)


def _toggle_between(d: ZXDiagram, xs: list[int], ys: list[int]) -> None:
    for x in xs:
        for y in ys:
            _toggle(d, x, y)


# -- identity removal ------------------------------------------------------


def match_identity(d: ZXDiagram, v: int) -> bool:
    return d.types.get(v) is Z and d.degree(v) == 2 and d.phases[v].is_zero()


def remove_identity(d: ZXDiagram, v: int) -> None:
    """Drop a phase-free degree-two spider, fusing its neighbours if needed."""
    if not match_identity(d, v):
        raise RuleMismatch(f"identity removal does not match vertex {v}")
    (a, ea), (b, eb) = sorted(d.adj[v].items())
    d.remove_vertex(v)
    et = S if ea is eb else H
    if d.types[a] is BOUNDARY or d.types[b] is BOUNDARY:
        d.add_edge(a, b, et)
    else:
        d.add_edge_smart(a, b, et)
    d.record("id", v)
    if d.adj[a].get(b) is S and d.types[a] is Z and d.types[b] is Z:
        fuse(d, a, b)


# -- local complementation -------------------------------------------------


def match_lc(d: ZXDiagram, v: int) -> bool:
    return d.is_interior(v) and d.phases[v].is_proper_clifford()


def local_complementation(d: ZXDiagram, v: int) -> None:
    """Remove an interior spider with phase +-pi/2.

    Its neighbourhood is complemented and every neighbour loses the removed
    phase.
    """
    if not match_lc(d, v):
        raise RuleMismatch(f"local complementation does not match vertex {v}")
    alpha = d.phases[v]
    ns = sorted(d.adj[v])
    d.remove_vertex(v)
    for u in ns:
        d.phases[u] = d.phases[u] - alpha
    for x, y in combinations(ns, 2):
        _toggle(d, x, y)
    d.record("lc", v)


# -- pivoting ---------------------------------------------------------------


def is_gadget_axis(d: ZXDiagram, v: int) -> bool:
    """A Pauli spider carrying a degree-one neighbour with a non-Pauli phase."""
    if d.types.get(v) is not Z or not d.phases[v].is_pauli():
        return False
    return any(
        d.degree(w) == 1 and d.types[w] is Z and not d.phases[w].is_pauli() for w in d.adj[v]
    )


def match_pivot(d: ZXDiagram, v: int, w: int) -> bool:
    return (
        d.adj.get(v, {}).get(w) is H
        and d.is_interior(v)
        and d.is_interior(w)
        and d.phases[v].is_pauli()
        and d.phases[w].is_pauli()
        and not is_gadget_axis(d, v)
        and not is_gadget_axis(d, w)
    )


def _pivot(d: ZXDiagram, v: int, w: int) -> None:
    nv = set(d.adj[v]) - {w}
    nw = set(d.adj[w]) - {v}
    a_set, b_set, c_set = sorted(nv - nw), sorted(nw - nv), sorted(nv & nw)
    j, k = d.phases[v], d.phases[w]
    d.remove_vertex(v)
    d.remove_vertex(w)
    for u in a_set:
        d.phases[u] = d.phases[u] + k
    for u in b_set:
        d.phases[u] = d.phases[u] + j
    jk = j + k + _PI
    for u in c_set:
        d.phases[u] = d.phases[u] + jk
    _toggle_between(d, a_set, b_set)
    _toggle_between(d, a_set, c_set)
    _toggle_between(d, b_set, c_set)


def pivot(d: ZXDiagram, v: int, w: int) -> None:
    """Remove two adjacent interior Pauli spiders.

    With ``v = j*pi`` and ``w = k*pi``, neighbours of ``v`` only gain ``k*pi``,
    neighbours of ``w`` only gain ``j*pi`` and shared neighbours gain
    ``(j+k+1)*pi``; the three neighbour classes are pairwise complemented.
    """
    if not match_pivot(d, v, w):
        raise RuleMismatch(f"pivot does not match edge {v}-{w}")
    _pivot(d, v, w)
    d.record("pivot", v, w)


def gadgetize(d: ZXDiagram, w: int) -> tuple[int, int]:
    """Move the phase of ``w`` onto a new one-legged phase gadget.

    Returns ``(axis, leaf)``.
    """
    alpha = d.phases[w]
    axis = d.add_vertex(Z)
    leaf = d.add_vertex(Z, alpha)
    d.phases[w] = ParamExpr.zero()
    d.add_edge(w, axis, H)
    d.add_edge(axis, leaf, H)
    return axis, leaf


def match_pivot_gadget(d: ZXDiagram, v: int, w: int) -> bool:
    return (
        d.adj.get(v, {}).get(w) is H
        and d.is_interior(v)
        and d.is_interior(w)
        and d.phases[v].is_pauli()
        and not d.phases[w].is_pauli()
        and d.degree(w) > 1
        and not is_gadget_axis(d, v)
    )


def pivot_gadget(d: ZXDiagram, v: int, w: int) -> None:
    """Pivot an interior Pauli spider against a non-Pauli neighbour.

    The phase of ``w`` is first moved onto a fresh gadget so that the pair
    becomes pivotable; the net effect removes ``v`` and turns ``w`` into a
    phase gadget.
    """
    if not match_pivot_gadget(d, v, w):
        raise RuleMismatch(f"gadget pivot does not match edge {v}-{w}")
    gadgetize(d, w)
    _pivot(d, v, w)
    d.record("pivot_gadget", v, w)


def match_gadget_boundary(d: ZXDiagram, v: int, w: int) -> bool:
    if d.adj.get(v, {}).get(w) is not H:
        return False
    if not (d.is_interior(v) and d.phases[v].is_pauli()) or is_gadget_axis(d, v):
        return False
    if d.types[w] is not Z or d.degree(w) < 2:
        return False
    bs = d.boundary_neighbors(w)
    if not bs:
        return False
    return all(d.types[u] is Z and t is H for u, t in d.adj[w].items() if d.types[u] is not BOUNDARY)


def gadget_boundary(d: ZXDiagram, v: int, w: int) -> None:
    """Pivot an interior Pauli spider against a boundary-adjacent spider.

    Each boundary wire of ``w`` first gets a new phase-free spider so that
    ``w`` becomes interior; a non-Pauli phase on ``w`` is moved to a gadget.
    Then ``v`` and ``w`` are pivoted away.
    """
    if not match_gadget_boundary(d, v, w):
        raise RuleMismatch(f"boundary pivot does not match edge {v}-{w}")
    for b in sorted(d.boundary_neighbors(w)):
        et = d.adj[w][b]
        nb = d.add_vertex(Z, qubit=d.qubit.get(b, -1))
        d.remove_edge(w, b)
        d.add_edge(w, nb, H)
        d.add_edge(nb, b, et.toggled())
    if not d.phases[w].is_pauli():
        gadgetize(d, w)
    _pivot(d, v, w)
    d.record("gadget_boundary", v, w)


# -- phase gadgets ----------------------------------------------------------


class Gadget(NamedTuple):
    axis: int
    leaf: int
    legs: frozenset[int]


def gadget_at(d: ZXDiagram, axis: int) -> Gadget | None:
    """Gadget rooted at ``axis``: a Pauli interior spider with a Z leaf."""
    if not d.is_interior(axis) or not d.phases[axis].is_pauli():
        return None
    leaves = sorted(w for w in d.adj[axis] if d.degree(w) == 1)
    if not leaves:
        return None
    # prefer a non-Pauli leaf so that Pauli leaves remain pivot candidates
    leaf = next((w for w in leaves if not d.phases[w].is_pauli()), leaves[0])
    legs = frozenset(d.adj[axis]) - {leaf}
    if not legs:
        return None
    return Gadget(axis, leaf, legs)


def normalize_gadget(d: ZXDiagram, g: Gadget) -> bool:
    """Make the axis phase zero by negating the leaf phase."""
    if d.phases[g.axis].is_zero():
        return False
    d.phases[g.axis] = ParamExpr.zero()
    d.phases[g.leaf] = -d.phases[g.leaf]
    d.record("gadget_normalize", g.axis)
    return True


def match_unary_gadget(d: ZXDiagram, axis: int) -> bool:
    g = gadget_at(d, axis)
    return g is not None and len(g.legs) == 1


def unary_gadget(d: ZXDiagram, axis: int) -> None:
    """Absorb a one-legged gadget into its leg: ``leg += (-1)^k * phase``."""
    g = gadget_at(d, axis)
    if g is None or len(g.legs) != 1:
        raise RuleMismatch(f"unary gadget does not match vertex {axis}")
    (leg,) = g.legs
    phase = d.phases[g.leaf]
    if not d.phases[axis].is_zero():
        phase = -phase
    d.phases[leg] = d.phases[leg] + phase
    d.remove_vertex(g.leaf)
    d.remove_vertex(axis)
    d.record("unary_gadget", axis)


def match_gadget_fusion(d: ZXDiagram, a1: int, a2: int) -> bool:
    if a1 == a2:
        return False
    g1, g2 = gadget_at(d, a1), gadget_at(d, a2)
    return g1 is not None and g2 is not None and g1.legs == g2.legs


def gadget_fusion(d: ZXDiagram, a1: int, a2: int) -> None:
    """Merge two gadgets on the same legs: ``(-1)^k a + (-1)^j b``."""
    if not match_gadget_fusion(d, a1, a2):
        raise RuleMismatch(f"gadget fusion does not match axes {a1}, {a2}")
    g1, g2 = gadget_at(d, a1), gadget_at(d, a2)
    p1, p2 = d.phases[g1.leaf], d.phases[g2.leaf]
    if not d.phases[a1].is_zero():
        p1 = -p1
    if not d.phases[a2].is_zero():
        p2 = -p2
    d.phases[a1] = ParamExpr.zero()
    d.phases[g1.leaf] = p1 + p2
    d.remove_vertex(g2.leaf)
    d.remove_vertex(a2)
    d.record("gadget_fusion", a1, a2)


def match_pauli_gadget(d: ZXDiagram, axis: int) -> bool:
    g = gadget_at(d, axis)
    return g is not None and d.phases[g.leaf].is_pauli()


def remove_pauli_gadget(d: ZXDiagram, axis: int) -> None:
    """A gadget with phase 0 vanishes; with phase pi it becomes pi on each leg.

    The axis phase only changes the global scalar here.
    """
    g = gadget_at(d, axis)
    if g is None or not d.phases[g.leaf].is_pauli():
        raise RuleMismatch(f"pauli gadget removal does not match vertex {axis}")
    # equivalent to pivoting the leaf against the axis
    leaf_pi = not d.phases[g.leaf].is_zero()
    if leaf_pi:
        for leg in sorted(g.legs):
            d.phases[leg] = d.phases[leg] + _PI
    d.remove_vertex(g.leaf)
    d.remove_vertex(axis)
    d.record("gadget_remove", axis)
