"""Dense evaluation of small ZX-diagrams by tensor contraction.

Used as the reference semantics when testing rewrite rules; the cost grows
exponentially with the width of the contraction, so keep diagrams small.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ..symphase import AngleValue
from .diagram import BOUNDARY, H, X, ZXDiagram

_HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_ID = np.eye(2, dtype=complex)


def _spider_tensor(degree: int, phase: float, x_colour: bool) -> np.ndarray:
    t = np.zeros((2,) * degree, dtype=complex)
    if degree == 0:
        return np.array(1 + np.exp(1j * phase))
    t[(0,) * degree] = 1
    t[(1,) * degree] = np.exp(1j * phase)
    if x_colour:
        for axis in range(degree):
            t = np.moveaxis(np.tensordot(_HAD, t, axes=([1], [axis])), 0, axis)
    return t


def _contract(tensors: list[tuple[np.ndarray, list[int]]], open_labels: list[int]) -> np.ndarray:
    """Greedy pairwise contraction; every label occurs in at most two tensors."""
    tensors = list(tensors)
    while len(tensors) > 1:
        where: dict[int, list[int]] = {}
        for i, (_, labels) in enumerate(tensors):
            for lab in labels:
                where.setdefault(lab, []).append(i)
        best = None
        for idx in where.values():
            if len(idx) == 2:
                i, j = idx
                li, lj = tensors[i][1], tensors[j][1]
                shared = set(li) & set(lj)
                size = len(li) + len(lj) - 2 * len(shared)
                if best is None or size < best[0]:
                    best = (size, i, j)
        if best is None:
            # disconnected components: take an outer product of the two smallest
            order = sorted(range(len(tensors)), key=lambda k: tensors[k][0].ndim)
            i, j = order[0], order[1]
            ti, li = tensors[i]
            tj, lj = tensors[j]
            merged = (np.multiply.outer(ti, tj), li + lj)
        else:
            _, i, j = best
            ti, li = tensors[i]
            tj, lj = tensors[j]
            shared = [lab for lab in li if lab in lj]
            ax_i = [li.index(lab) for lab in shared]
            ax_j = [lj.index(lab) for lab in shared]
            t = np.tensordot(ti, tj, axes=(ax_i, ax_j))
            labels = [lab for lab in li if lab not in shared] + [lab for lab in lj if lab not in shared]
            merged = (t, labels)
        tensors = [tensors[k] for k in range(len(tensors)) if k not in (i, j)]
        tensors.append(merged)
    t, labels = tensors[0]
    return np.transpose(t, [labels.index(lab) for lab in open_labels])


def diagram_matrix(d: ZXDiagram, values: Mapping[str, AngleValue] | None = None) -> np.ndarray:
    """Linear map of ``d`` as a ``2**n_out x 2**n_in`` matrix, up to a scalar.

    Qubit ``k`` is bit ``k`` of the row and column index, matching
    :func:`pqec.circuit.unitary`.
    """
    values = values or {}
    label_at: dict[tuple[int, int], int] = {}
    tensors: list[tuple[np.ndarray, list[int]]] = []
    nxt = 0
    for v, w, et in d.edges():
        a, b = nxt, nxt + 1
        nxt += 2
        label_at[(v, w)] = a
        label_at[(w, v)] = b
        tensors.append((_HAD if et is H else _ID, [a, b]))
    for v in d.vertices():
        if d.types[v] is BOUNDARY:
            continue
        nbrs = sorted(d.adj[v])
        phase = d.phases[v].evaluate(values).radians_value()
        labels = [label_at[(v, w)] for w in nbrs]
        tensors.append((_spider_tensor(len(nbrs), phase, d.types[v] is X), labels))
    # the label held by a boundary is the open leg of its only edge
    def open_label(b: int) -> int:
        (w,) = d.adj[b]
        return label_at[(b, w)]

    outs = [open_label(b) for b in d.outputs]
    ins = [open_label(b) for b in d.inputs]
    # most significant qubit first so that reshape gives little-endian indices
    order = outs[::-1] + ins[::-1]
    if not tensors:
        raise ValueError("empty diagram")
    t = _contract(tensors, order)
    return t.reshape(2 ** len(outs), 2 ** len(ins))


def equal_up_to_scalar(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """Frobenius distance of the two maps after normalising norm and phase."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < 1e-12 or nb < 1e-12:
        return na < 1e-12 and nb < 1e-12
    a = a / na
    b = b / nb
    inner = np.vdot(a, b)
    if abs(inner) < 1e-12:
        return False
    b = b * (abs(inner) / inner)
    return float(np.linalg.norm(a - b)) < tol
