"""ZX-diagrams with symbolic phases and conversion from circuits."""

from __future__ import annotations

import enum
import logging
from fractions import Fraction
from typing import Iterable

from ..circuit import Circuit, GateKind
from ..symphase import ParamExpr

log = logging.getLogger("pqec.zx")

_PI = ParamExpr.pi(1)
_HALF_PI = ParamExpr.pi(Fraction(1, 2))


class VertexType(enum.IntEnum):
    BOUNDARY = 0
    Z = 1
    X = 2


class EdgeType(enum.IntEnum):
    SIMPLE = 1
    HADAMARD = 2

    def toggled(self) -> EdgeType:
        return EdgeType.HADAMARD if self is EdgeType.SIMPLE else EdgeType.SIMPLE


S, H = EdgeType.SIMPLE, EdgeType.HADAMARD
BOUNDARY, Z, X = VertexType.BOUNDARY, VertexType.Z, VertexType.X


class ZXDiagram:
    """Undirected graph of spiders with at most one edge per vertex pair.

    Parallel edges and self-loops are resolved on insertion by
    :meth:`add_edge_smart`, so the stored graph is always simple.  Global
    scalars are not tracked.
    """

    def __init__(self):
        self._next = 0
        self.types: dict[int, VertexType] = {}
        self.phases: dict[int, ParamExpr] = {}
        self.adj: dict[int, dict[int, EdgeType]] = {}
        self.qubit: dict[int, int] = {}
        self.inputs: list[int] = []
        self.outputs: list[int] = []
        self.trace: list[tuple[str, tuple[int, ...]]] | None = None
        self.rule_counts: dict[str, int] = {}

    # -- construction -----------------------------------------------------
    def add_vertex(self, vtype: VertexType, phase: ParamExpr | None = None, qubit: int = -1) -> int:
        v = self._next
        self._next += 1
        self.types[v] = VertexType(vtype)
        self.phases[v] = phase if phase is not None else ParamExpr.zero()
        self.adj[v] = {}
        self.qubit[v] = qubit
        return v

    def add_edge(self, v: int, w: int, etype: EdgeType = S) -> None:
        if v == w or w in self.adj[v]:
            raise ValueError(f"edge {v}-{w} would not be simple")
        self.adj[v][w] = etype
        self.adj[w][v] = etype

    def add_edge_smart(self, v: int, w: int, etype: EdgeType) -> None:
        """Add an edge, resolving self-loops and parallel edges in place."""
        if v == w:
            if etype is H:
                self.phases[v] = self.phases[v] + _PI
            return
        old = self.adj[v].get(w)
        if old is None:
            self.add_edge(v, w, etype)
            return
        tv, tw = self.types[v], self.types[w]
        if BOUNDARY in (tv, tw):
            raise ValueError(f"parallel edge at boundary {v}-{w}")
        same_colour = tv == tw
        if old is etype:
            if (etype is H) == same_colour:
                self.remove_edge(v, w)
            # S+S same colour and H+H different colour collapse to one edge
            return
        # one simple, one hadamard: the pair reduces to one edge plus a pi phase
        keep = S if same_colour else H
        self.adj[v][w] = keep
        self.adj[w][v] = keep
        self.phases[v] = self.phases[v] + _PI

    def remove_edge(self, v: int, w: int) -> None:
        del self.adj[v][w]
        del self.adj[w][v]

    def remove_vertex(self, v: int) -> None:
        for w in self.adj.pop(v):
            del self.adj[w][v]
        del self.types[v]
        del self.phases[v]
        self.qubit.pop(v, None)

    def set_edge_type(self, v: int, w: int, etype: EdgeType) -> None:
        self.adj[v][w] = etype
        self.adj[w][v] = etype

    def copy(self) -> ZXDiagram:
        d = ZXDiagram()
        d._next = self._next
        d.types = dict(self.types)
        d.phases = dict(self.phases)
        d.adj = {v: dict(n) for v, n in self.adj.items()}
        d.qubit = dict(self.qubit)
        d.inputs = list(self.inputs)
        d.outputs = list(self.outputs)
        d.rule_counts = dict(self.rule_counts)
        return d

    def restore(self, snapshot: ZXDiagram) -> None:
        """Reset the graph to ``snapshot`` in place, keeping the trace."""
        self._next = snapshot._next
        self.types = dict(snapshot.types)
        self.phases = dict(snapshot.phases)
        self.adj = {v: dict(n) for v, n in snapshot.adj.items()}
        self.qubit = dict(snapshot.qubit)
        self.inputs = list(snapshot.inputs)
        self.outputs = list(snapshot.outputs)
        self.rule_counts = dict(snapshot.rule_counts)

    # -- queries ----------------------------------------------------------
    def vertices(self) -> list[int]:
        return sorted(self.types)

    def spiders(self) -> list[int]:
        return sorted(v for v, t in self.types.items() if t is not BOUNDARY)

    def num_spiders(self) -> int:
        return sum(1 for t in self.types.values() if t is not BOUNDARY)

    def num_edges(self) -> int:
        return sum(len(n) for n in self.adj.values()) // 2

    def neighbors(self, v: int) -> Iterable[int]:
        return self.adj[v].keys()

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edge_type(self, v: int, w: int) -> EdgeType | None:
        return self.adj[v].get(w)

    def edges(self) -> list[tuple[int, int, EdgeType]]:
        return sorted((v, w, t) for v, n in self.adj.items() for w, t in n.items() if v < w)

    def is_boundary(self, v: int) -> bool:
        return self.types[v] is BOUNDARY

    def boundary_neighbors(self, v: int) -> list[int]:
        return [w for w in self.adj[v] if self.types[w] is BOUNDARY]

    def is_interior(self, v: int) -> bool:
        """Z spider whose neighbours are all Z spiders joined by hadamard edges."""
        if self.types.get(v) is not Z:
            return False
        types = self.types
        return all(types[w] is Z and t is H for w, t in self.adj[v].items())

    def params(self) -> frozenset[str]:
        out: set[str] = set()
        for p in self.phases.values():
            out |= p.params
        return frozenset(out)

    def is_graph_like(self) -> bool:
        for v, t in self.types.items():
            if t is X:
                return False
            if t is BOUNDARY:
                if self.degree(v) != 1:
                    return False
                continue
            for w, et in self.adj[v].items():
                if self.types[w] is Z and et is not H:
                    return False
        return True

    def record(self, rule: str, *vs: int) -> None:
        self.rule_counts[rule] = self.rule_counts.get(rule, 0) + 1
        if self.trace is not None:
            self.trace.append((rule, vs))
        if log.isEnabledFor(logging.DEBUG):
            log.debug("%s %s", rule, " ".join(map(str, vs)))

    def stats(self) -> dict[str, int]:
        return {"spiders": self.num_spiders(), "edges": self.num_edges()}

    def __repr__(self) -> str:
        return f"ZXDiagram(spiders={self.num_spiders()}, edges={self.num_edges()}, io={len(self.inputs)})"

    # -- export -----------------------------------------------------------
    def to_dot(self) -> str:
        """Graphviz text; hadamard edges are dashed blue, phases symbolic."""
        lines = ["graph zx {", "  rankdir=LR;"]
        for v in self.vertices():
            t = self.types[v]
            if t is BOUNDARY:
                role = f"in{self.inputs.index(v)}" if v in self.inputs else f"out{self.outputs.index(v)}"
                lines.append(f'  v{v} [shape=plaintext, label="{role}"];')
            else:
                colour = "green" if t is Z else "red"
                phase = self.phases[v]
                label = "" if phase.is_zero() else str(phase)
                lines.append(f'  v{v} [shape=circle, style=filled, fillcolor={colour}, label="{label}"];')
        for v, w, et in self.edges():
            style = ' [style=dashed, color=blue]' if et is H else ""
            lines.append(f"  v{v} -- v{w}{style};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# circuits -> diagrams


def from_circuit(c: Circuit) -> ZXDiagram:
    """Build a diagram whose linear map equals ``unitary(c)`` up to a scalar.

    Rotations become single spiders, ``H`` becomes a hadamard edge, ``CX`` a
    Z/X spider pair and ``RZZ`` a phase gadget.  The result is not graph-like;
    see :func:`to_graph_like`.
    """
    d = ZXDiagram()
    n = c.width
    last = []
    pending = [S] * n
    for q in range(n):
        b = d.add_vertex(BOUNDARY, qubit=q)
        d.inputs.append(b)
        last.append(b)

    def spider(q: int, vtype: VertexType, phase: ParamExpr | None = None) -> int:
        v = d.add_vertex(vtype, phase, q)
        d.add_edge(last[q], v, pending[q])
        last[q] = v
        pending[q] = S
        return v

    for g in c.gates:
        k = g.kind
        q = g.qubits[0]
        if k is GateKind.H:
            pending[q] = pending[q].toggled()
        elif k in _Z_PHASES:
            spider(q, Z, _Z_PHASES[k])
        elif k is GateKind.RZ or k is GateKind.P:
            spider(q, Z, g.angle)
        elif k is GateKind.X:
            spider(q, X, _PI)
        elif k is GateKind.RX:
            spider(q, X, g.angle)
        elif k is GateKind.Y:
            spider(q, Z, _PI)
            spider(q, X, _PI)
        elif k is GateKind.RY:
            spider(q, Z, -_HALF_PI)
            spider(q, X, g.angle)
            spider(q, Z, _HALF_PI)
        elif k is GateKind.CX:
            t = g.qubits[1]
            vc = spider(q, Z)
            vt = spider(t, X)
            d.add_edge(vc, vt, S)
        elif k is GateKind.CZ:
            t = g.qubits[1]
            va = spider(q, Z)
            vb = spider(t, Z)
            d.add_edge(va, vb, H)
        elif k is GateKind.SWAP:
            t = g.qubits[1]
            last[q], last[t] = last[t], last[q]
            pending[q], pending[t] = pending[t], pending[q]
        elif k is GateKind.RZZ:
            t = g.qubits[1]
            va = spider(q, Z)
            vb = spider(t, Z)
            axis = d.add_vertex(Z)
            leaf = d.add_vertex(Z, g.angle)
            d.add_edge(axis, va, H)
            d.add_edge(axis, vb, H)
            d.add_edge(axis, leaf, H)
        else:  # pragma: no cover - GateKind is closed
            raise ValueError(f"unsupported gate {k}")
    for q in range(n):
        b = d.add_vertex(BOUNDARY, qubit=q)
        d.outputs.append(b)
        d.add_edge(last[q], b, pending[q])
    return d


_Z_PHASES = {
    GateKind.Z: _PI,
    GateKind.S: _HALF_PI,
    GateKind.SDG: -_HALF_PI,
    GateKind.T: ParamExpr.pi(Fraction(1, 4)),
    GateKind.TDG: ParamExpr.pi(Fraction(-1, 4)),
}


def fuse(d: ZXDiagram, v: int, w: int) -> None:
    """Spider fusion: merge ``w`` into ``v`` along a simple edge."""
    if d.types.get(v) is not d.types.get(w) or d.types[v] is BOUNDARY:
        raise ValueError(f"cannot fuse {v} and {w}: need two spiders of one colour")
    if d.adj[v].get(w) is not S:
        raise ValueError(f"cannot fuse {v} and {w}: not joined by a simple edge")
    d.phases[v] = d.phases[v] + d.phases[w]
    d.remove_edge(v, w)
    for u, et in list(d.adj[w].items()):
        d.add_edge_smart(v, u, et)
    d.remove_vertex(w)
    d.record("fuse", v, w)


def to_graph_like(d: ZXDiagram) -> ZXDiagram:
    """Return an equivalent graph-like copy of ``d``.

    X spiders become Z spiders by toggling their edges, simple Z-Z edges are
    fused away (parallel hadamard pairs cancel, hadamard self-loops add pi)
    and spiders touching several boundaries get one extra spider per extra
    boundary.
    """
    d = d.copy()
    for v in sorted(d.types):
        if d.types[v] is X:
            for w, et in list(d.adj[v].items()):
                d.set_edge_type(v, w, et.toggled())
            d.types[v] = Z
    changed = True
    while changed:
        changed = False
        for v in sorted(d.types):
            if v not in d.types or d.types[v] is not Z:
                continue
            while True:
                w = next((u for u, et in d.adj[v].items() if et is S and d.types[u] is Z), None)
                if w is None:
                    break
                fuse(d, v, w)
                changed = True
    for v in d.spiders():
        bs = sorted(d.boundary_neighbors(v))
        for b in bs[1:]:
            et = d.adj[v][b]
            nv = d.add_vertex(Z, qubit=d.qubit.get(b, -1))
            d.remove_edge(v, b)
            d.add_edge(v, nv, H)
            d.add_edge(nv, b, et.toggled())
    return d


def circuit_to_graph_like(c: Circuit) -> ZXDiagram:
    return to_graph_like(from_circuit(c))
