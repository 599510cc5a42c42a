"""Simplification strategy and identity detection."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field

from .diagram import BOUNDARY, S, ZXDiagram
from .rules import (
    gadget_at,
    gadget_boundary,
    gadget_fusion,
    local_complementation,
    match_gadget_boundary,
    match_identity,
    match_lc,
    match_pivot,
    match_pivot_gadget,
    normalize_gadget,
    pivot,
    pivot_gadget,
    remove_identity,
    remove_pauli_gadget,
    unary_gadget,
)

log = logging.getLogger("pqec.zx")

DEFAULT_MAX_ROUNDS = 10_000


class SimplifyLimitError(RuntimeError):
    """The iteration bound was hit before reaching a fixpoint."""


def measure(d: ZXDiagram) -> tuple[int, int, int]:
    """Termination measure: (non-Clifford spiders, spiders, edges)."""
    non_clifford = sum(1 for v in d.phases if d.types[v] is not BOUNDARY and not d.phases[v].is_clifford())
    return non_clifford, d.num_spiders(), d.num_edges()


def _id_pass(d: ZXDiagram) -> int:
    n = 0
    for v in d.spiders():
        if v in d.types and match_identity(d, v):
            remove_identity(d, v)
            n += 1
    return n


def _lc_pass(d: ZXDiagram) -> int:
    n = 0
    for v in d.spiders():
        if v in d.types and match_lc(d, v):
            local_complementation(d, v)
            n += 1
    return n


def _pair_pass(d: ZXDiagram, match, apply) -> int:
    n = 0
    for v in d.spiders():
        if v not in d.types or not d.phases[v].is_pauli():
            continue
        for w in sorted(d.adj[v]):
            if match(d, v, w):
                apply(d, v, w)
                n += 1
                break
    return n


def _gadget_pass(d: ZXDiagram) -> int:
    n = 0
    groups: dict[frozenset[int], list[int]] = defaultdict(list)
    for a in d.spiders():
        if a not in d.types:
            continue
        g = gadget_at(d, a)
        if g is None:
            continue
        if d.phases[g.leaf].is_pauli():
            remove_pauli_gadget(d, a)
            n += 1
        elif len(g.legs) == 1:
            unary_gadget(d, a)
            n += 1
        else:
            groups[g.legs].append(a)
    for axes in groups.values():
        first = axes[0]
        if normalize_gadget(d, gadget_at(d, first)):
            n += 1
        for other in axes[1:]:
            gadget_fusion(d, first, other)
            n += 1
        if d.phases[gadget_at(d, first).leaf].is_pauli():
            remove_pauli_gadget(d, first)
            n += 1
    return n


def interior_clifford_simp(d: ZXDiagram) -> int:
    total = 0
    while True:
        n = _id_pass(d)
        n += _pivot_pass(d)
        n += _lc_pass(d)
        if not n:
            return total
        total += n


def _pivot_pass(d: ZXDiagram) -> int:
    return _pair_pass(d, match_pivot, pivot)


def clifford_simp(d: ZXDiagram) -> int:
    total = 0
    while True:
        total += interior_clifford_simp(d)
        n = _pair_pass(d, match_gadget_boundary, gadget_boundary)
        if not n:
            return total
        total += n


@dataclass
class SimplifyReport:
    rounds: int = 0
    measures: list[tuple[int, int, int]] = field(default_factory=list)
    hit_limit: bool = False
    rolled_back: bool = False


def full_simplify(d: ZXDiagram, max_rounds: int = DEFAULT_MAX_ROUNDS, report: SimplifyReport | None = None) -> ZXDiagram:
    """Rewrite ``d`` in place towards a normal form and return it.

    Rule passes visit vertices in increasing id order.  Each outer round
    runs the Clifford rules to a fixpoint, then the gadget rules and gadget
    pivots; the loop stops when a round changes nothing or after
    ``max_rounds`` rounds.  A round that ends with a larger :func:`measure`
    than it started with is undone and ends the loop, so the recorded
    measures never increase.
    """
    report = report if report is not None else SimplifyReport()
    interior_clifford_simp(d)
    _pair_pass(d, match_pivot_gadget, pivot_gadget)
    report.measures.append(measure(d))
    while True:
        if report.rounds >= max_rounds:
            report.hit_limit = True
            log.warning("full_simplify stopped after %d rounds", report.rounds)
            break
        report.rounds += 1
        snapshot = d.copy()
        n = clifford_simp(d)
        n += _gadget_pass(d)
        n += interior_clifford_simp(d)
        n += _pair_pass(d, match_pivot_gadget, pivot_gadget)
        m = measure(d)
        if m > report.measures[-1]:
            log.debug("measure rose from %s to %s; round undone", report.measures[-1], m)
            d.restore(snapshot)
            d.record("rollback")
            report.rolled_back = True
            break
        report.measures.append(m)
        if not n:
            break
    return d


@dataclass(frozen=True)
class IdentityResult:
    is_wiring: bool
    permutation: tuple[int, ...] | None

    @property
    def is_identity(self) -> bool:
        return self.is_wiring and self.permutation == tuple(range(len(self.permutation)))

    def __bool__(self) -> bool:
        return self.is_identity


def is_identity(d: ZXDiagram) -> IdentityResult:
    """Whether ``d`` is bare wiring; ``permutation[i]`` is the output of input ``i``."""
    if d.num_spiders() or len(d.inputs) != len(d.outputs):
        return IdentityResult(False, None)
    out_pos = {b: k for k, b in enumerate(d.outputs)}
    perm = []
    for b in d.inputs:
        if d.degree(b) != 1:
            return IdentityResult(False, None)
        ((w, et),) = d.adj[b].items()
        if et is not S or w not in out_pos:
            return IdentityResult(False, None)
        perm.append(out_pos[w])
    return IdentityResult(True, tuple(perm))
