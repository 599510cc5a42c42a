"""Equivalence oracles for parameter-free circuits.

Three complete-or-falsifying checks are combined by :func:`oracle_equiv`:

* exact Pauli propagation: ``W = U^dagger U'`` is a global phase iff it fixes
  every ``X_j`` and ``Z_j`` under conjugation.  Clifford gates map a Pauli
  string to one Pauli string, so Clifford-heavy circuits are checked in time
  linear in the gate count.  Each non-Clifford rotation may split a term in
  two, and propagation gives up past a term budget.
* dense comparison of ``W`` against ``e^{i gamma} I``.
* random-state stimuli, which find a mismatch with probability one but only
  give a probabilistic "equivalent".
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .circuit import (
    DEFAULT_DENSE_LIMIT,
    Circuit,
    CircuitError,
    Gate,
    GateKind,
    WidthLimitError,
    apply_gate,
    concatenate,
    inverse,
)

DENSE_TOL = 1e-10
STIMULI_TOL = 1e-8
DEFAULT_STIMULI = 16
DEFAULT_DENSE_WORK = 1 << 28
DEFAULT_PAULI_TERMS = 1 << 12

EQUIVALENT = "Equivalent"
NON_EQUIVALENT = "NonEquivalent"


@dataclass(frozen=True)
class EquivalenceResult:
    status: str
    method: str
    global_phase: float | None = None
    witness: dict[str, Any] | None = None
    exact: bool = True

    @property
    def equivalent(self) -> bool:
        return self.status == EQUIVALENT

    def __bool__(self) -> bool:
        return self.equivalent


def _check_widths(g: Circuit, g2: Circuit) -> None:
    if g.width != g2.width:
        raise CircuitError(f"width mismatch: {g.width} vs {g2.width}")
    if g.is_parameterized() or g2.is_parameterized():
        raise CircuitError("oracle inputs must be parameter-free")


def _miter(g: Circuit, g2: Circuit) -> Circuit:
    # unitary of the miter is U'^dagger U, a global phase iff U ~ U'
    return concatenate(g, inverse(g2))


# -- dense -------------------------------------------------------------------


def dense_equiv(
    g: Circuit, g2: Circuit, tol: float = DENSE_TOL, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> EquivalenceResult:
    """Compare ``U^dagger U'`` with a multiple of the identity."""
    _check_widths(g, g2)
    n = g.width
    if n > dense_limit:
        raise WidthLimitError(f"width {n} exceeds dense limit {dense_limit}")
    v = np.eye(2**n, dtype=complex)
    for gate in _miter(g2, g).gates:
        apply_gate(v, gate, n)
    diag = np.diagonal(v)
    k = int(np.argmax(np.abs(diag) > tol)) if np.any(np.abs(diag) > tol) else None
    if k is None:
        return EquivalenceResult(NON_EQUIVALENT, "dense", witness={"index": [0, 0], "amplitudes": [[0.0, 0.0], [1.0, 0.0]]})
    phase = diag[k] / abs(diag[k])
    v[np.diag_indices_from(v)] -= phase
    err = np.abs(v)
    worst = np.unravel_index(int(np.argmax(err)), err.shape)
    if err[worst] <= tol:
        return EquivalenceResult(EQUIVALENT, "dense", global_phase=cmath.phase(phase))
    row, col = int(worst[0]), int(worst[1])
    got = v[row, col] + (phase if row == col else 0)
    want = phase if row == col else 0
    return EquivalenceResult(
        NON_EQUIVALENT,
        "dense",
        witness={"index": [row, col], "amplitudes": [_cplx(got), _cplx(want)]},
    )


def _cplx(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


# -- stimuli -----------------------------------------------------------------


def stimuli_equiv(
    g: Circuit, g2: Circuit, k: int = DEFAULT_STIMULI, seed: int | None = 0, tol: float = STIMULI_TOL
) -> EquivalenceResult:
    """Compare both circuits on ``k`` seeded random states.

    The stimuli are complex Gaussian vectors rather than basis states, since
    basis states are blind to relative phases.  A mismatch carries the index
    of the failing stimulus; agreement is only probabilistic.
    """
    if k < 1:
        raise ValueError("need at least one stimulus")
    _check_widths(g, g2)
    n = g.width
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal((2**n, k)) + 1j * rng.standard_normal((2**n, k))
    psi /= np.linalg.norm(psi, axis=0)
    a = np.ascontiguousarray(psi)
    b = a.copy()
    for gate in g.gates:
        apply_gate(a, gate, n)
    for gate in g2.gates:
        apply_gate(b, gate, n)
    overlaps = np.einsum("ij,ij->j", a.conj(), b)
    ref = overlaps[0] / abs(overlaps[0]) if abs(overlaps[0]) > 0 else 1.0
    for j, ov in enumerate(overlaps):
        if abs(1 - abs(ov)) > tol or abs(ov - ref) > max(tol, 1e-6):
            return EquivalenceResult(
                NON_EQUIVALENT,
                "stimuli",
                witness={"stimulus": j, "seed": seed, "overlap": _cplx(ov)},
            )
    return EquivalenceResult(EQUIVALENT, "stimuli", global_phase=cmath.phase(ref), exact=False)


# -- Pauli propagation -------------------------------------------------------


class _Budget(Exception):
    pass


def _clifford_quarter_turns(angle) -> int | None:
    """Return ``k`` when ``angle`` is exactly ``k * pi/2``."""
    if angle is None or not angle.is_exact() or not angle.is_constant():
        return None
    q = angle.const * 2
    return int(q) % 4 if q.denominator == 1 else None


def is_clifford_gate(g: Gate) -> bool:
    if not g.kind.parameterized:
        return g.kind not in (GateKind.T, GateKind.TDG)
    return _clifford_quarter_turns(g.angle) is not None


def _rz_turns(kind: GateKind) -> Fraction | None:
    return {GateKind.S: Fraction(1, 2), GateKind.SDG: Fraction(-1, 2), GateKind.T: Fraction(1, 4), GateKind.TDG: Fraction(-1, 4)}.get(kind)


def _rotation(q: int, angle) -> tuple:
    k = _clifford_quarter_turns(angle)
    return ("s", q, k) if k is not None else ("rz", q, angle.radians_value())


@functools.lru_cache(maxsize=4096)
def _primitives(g: Gate) -> tuple[tuple, ...]:
    """Decompose ``g`` into H, S^k, RZ, X, Z, CX and SWAP up to global phase."""
    k, qs = g.kind, g.qubits
    q = qs[0]
    if k is GateKind.H:
        return (("h", q),)
    if k is GateKind.X:
        return (("x_", q),)
    if k is GateKind.Z:
        return (("z_", q),)
    if k is GateKind.Y:
        return (("x_", q), ("z_", q))
    if k in (GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG):
        turns = _rz_turns(k)
        if turns.denominator <= 2:
            return (("s", q, int(turns * 2)),)
        return (("rz", q, float(turns) * math.pi),)
    if k in (GateKind.RZ, GateKind.P):
        return (_rotation(q, g.angle),)
    if k is GateKind.RX:
        return (("h", q), _rotation(q, g.angle), ("h", q))
    if k is GateKind.RY:
        return (("s", q, 3), ("h", q), _rotation(q, g.angle), ("h", q), ("s", q, 1))
    if k is GateKind.CX:
        return (("cx", q, qs[1]),)
    if k is GateKind.CZ:
        return (("h", qs[1]), ("cx", q, qs[1]), ("h", qs[1]))
    if k is GateKind.SWAP:
        return (("swap", q, qs[1]),)
    if k is GateKind.RZZ:
        return (("cx", q, qs[1]), _rotation(qs[1], g.angle), ("cx", q, qs[1]))
    raise ValueError(f"unsupported gate {k}")  # pragma: no cover - GateKind is closed


class _Tableau:
    """Bit-sliced Clifford propagation of many Pauli strings at once.

    Bit ``j`` of ``x[q]`` and ``z[q]`` is the X and Z exponent of string
    ``j`` on qubit ``q``; bits of ``p0`` and ``p1`` hold each string's phase
    as a power of ``i``.
    """

    def __init__(self, n: int, strings: list[tuple[int, int]]):
        self.n = n
        self.x = [0] * n
        self.z = [0] * n
        for j, (xs, zs) in enumerate(strings):
            for q in range(n):
                if xs >> q & 1:
                    self.x[q] |= 1 << j
                if zs >> q & 1:
                    self.z[q] |= 1 << j
        self.p0 = 0
        self.p1 = 0

    def _add(self, mask: int, k: int) -> None:
        if k & 1:
            self.p1 ^= self.p0 & mask
            self.p0 ^= mask
        if k & 2:
            self.p1 ^= mask

    def h(self, q: int) -> None:
        self._add(self.x[q] & self.z[q], 2)
        self.x[q], self.z[q] = self.z[q], self.x[q]

    def s(self, q: int, turns: int) -> None:
        turns %= 4
        m = self.x[q]
        self._add(m, turns)
        if turns & 1:
            self.z[q] ^= m

    def x_(self, q: int) -> None:
        self._add(self.z[q], 2)

    def z_(self, q: int) -> None:
        self._add(self.x[q], 2)

    def cx(self, c: int, t: int) -> None:
        self.x[t] ^= self.x[c]
        self.z[c] ^= self.z[t]

    def swap(self, a: int, b: int) -> None:
        self.x[a], self.x[b] = self.x[b], self.x[a]
        self.z[a], self.z[b] = self.z[b], self.z[a]

    def columns(self, width: int) -> list[tuple[int, int, int]]:
        """``(x mask, z mask, phase)`` of strings ``0 .. width-1``."""
        xs, zs = [0] * width, [0] * width
        for q in range(self.n):
            for masks, bits in ((xs, self.x[q]), (zs, self.z[q])):
                while bits:
                    j = (bits & -bits).bit_length() - 1
                    bits &= bits - 1
                    masks[j] |= 1 << q
        return [(xs[j], zs[j], (self.p0 >> j & 1) + 2 * (self.p1 >> j & 1)) for j in range(width)]


def _split(
    tab: _Tableau, owner: list[int], coef: list[complex], q: int, phi: float, max_terms: int
) -> tuple[_Tableau, list[int], list[complex]]:
    """Conjugate by ``RZ(phi)`` on qubit ``q``, merging like terms per generator."""
    m = 1 << q
    cs, sn = math.cos(phi), math.sin(phi)
    sums: dict[tuple[int, int, int], complex] = {}
    for j, (xs, zs, ph) in enumerate(tab.columns(len(owner))):
        c = coef[j] * 1j**ph
        if xs & m:
            parts = (((owner[j], xs, zs), c * cs), ((owner[j], xs, zs ^ m), c * 1j * sn))
        else:
            parts = (((owner[j], xs, zs), c),)
        for key, val in parts:
            sums[key] = sums.get(key, 0) + val
    kept = [(key, val) for key, val in sums.items() if abs(val) >= 1e-14]
    per_owner: dict[int, int] = {}
    for (o, _, _), _ in kept:
        per_owner[o] = per_owner.get(o, 0) + 1
        if per_owner[o] > max_terms:
            raise _Budget
    new = _Tableau(tab.n, [(xs, zs) for (_, xs, zs), _ in kept])
    return new, [o for (o, _, _), _ in kept], [val for _, val in kept]


def pauli_equiv(
    g: Circuit, g2: Circuit, max_terms: int = DEFAULT_PAULI_TERMS, tol: float = DENSE_TOL
) -> EquivalenceResult | None:
    """Exact check by conjugating each ``X_j`` and ``Z_j`` through the miter.

    All strings move together through a bit-sliced tableau.  A non-Clifford
    rotation splits each string it touches into two columns of the same
    tableau, so Clifford gates stay cheap however many terms exist.  Returns
    ``None`` when a generator's expansion exceeds ``max_terms`` terms.
    """
    _check_widths(g, g2)
    gates = g.gates + tuple(x.dagger() for x in reversed(g2.gates))
    n = g.width
    strings = []
    for q in range(n):
        strings += [(1 << q, 0), (0, 1 << q)]
    tab = _Tableau(n, strings)
    owner = list(range(len(strings)))
    coef: list[complex] = [1.0] * len(strings)
    try:
        for gate in gates:
            for op in _primitives(gate):
                if op[0] == "rz":
                    if tab.x[op[1]]:
                        tab, owner, coef = _split(tab, owner, coef, op[1], op[2], max_terms)
                else:
                    getattr(tab, op[0])(*op[1:])
    except _Budget:
        return None
    sums: list[dict[tuple[int, int], complex]] = [{} for _ in strings]
    for j, (xs, zs, ph) in enumerate(tab.columns(len(owner))):
        sums[owner[j]][(xs, zs)] = coef[j] * 1j**ph
    bound = tol * max(1, len(gates))
    for j, key in enumerate(strings):
        terms = sums[j]
        err = sum(abs(c - (1 if k == key else 0)) for k, c in terms.items())
        if key not in terms:
            err += 1.0
        if err > bound:
            return EquivalenceResult(NON_EQUIVALENT, "pauli", witness={"generator": f"{'XZ'[j % 2]}{j // 2}"})
    return EquivalenceResult(EQUIVALENT, "pauli")


# -- cascade -----------------------------------------------------------------


@dataclass(frozen=True)
class OracleConfig:
    dense_limit: int = DEFAULT_DENSE_LIMIT
    dense_work: int = DEFAULT_DENSE_WORK
    stimuli: int = DEFAULT_STIMULI
    tol: float = DENSE_TOL
    stimuli_tol: float = STIMULI_TOL
    pauli_terms: int = DEFAULT_PAULI_TERMS
    max_non_clifford: int = 24
    stimuli_first: bool = False
    seed: int | None = 0
    extra: dict[str, Any] = field(default_factory=dict, compare=False)


def oracle_equiv(g: Circuit, g2: Circuit, cfg: OracleConfig | None = None) -> EquivalenceResult:
    """Decide equivalence of two parameter-free circuits up to global phase.

    Tries Pauli propagation when the pair has few non-Clifford gates, then a
    dense comparison if the width and gate count are affordable, and
    otherwise random-state stimuli.
    """
    cfg = cfg or OracleConfig()
    _check_widths(g, g2)
    if cfg.stimuli_first:
        res = stimuli_equiv(g, g2, cfg.stimuli, cfg.seed, cfg.stimuli_tol)
        if not res.equivalent:
            return res
    non_clifford = sum(1 for gate in (*g.gates, *g2.gates) if not is_clifford_gate(gate))
    if non_clifford <= cfg.max_non_clifford:
        res = pauli_equiv(g, g2, cfg.pauli_terms, cfg.tol)
        if res is not None:
            return res
    n = g.width
    if n <= cfg.dense_limit and (4**n) * (len(g) + len(g2) + 1) <= cfg.dense_work:
        return dense_equiv(g, g2, cfg.tol, cfg.dense_limit)
    return stimuli_equiv(g, g2, cfg.stimuli, cfg.seed, cfg.stimuli_tol)
