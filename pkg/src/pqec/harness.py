"""Benchmark pairs: ansatz families, a compile-like pipeline and error injection.

Family layouts (``n`` qubits, ``L`` repetitions):

* ``TwoLocalRY``: an RY layer, then ``L`` times (entangling CX block, RY
  layer).  ``n * (L + 1)`` parameters ``theta_0, theta_1, ...``.
* ``TwoLocalRYRZ``: as above with each rotation layer being RY on every
  qubit followed by RZ on every qubit.  ``2 * n * (L + 1)`` parameters.
* ``QAOA``: an H layer, then per repetition ``l`` an RZZ(``theta_l``) on
  every entangling pair and RX(``gamma_l``) on every qubit.  ``2 * L``
  parameters.

Entangling pairs: ``linear`` is the chain ``(0,1), (1,2), ...``;
``circular`` prepends ``(n-1, 0)``; ``full`` is every ``(i, j)`` with
``i < j``; ``sca`` rotates the circular list by the repetition index and
reverses each pair on odd repetitions.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .circuit import Circuit, Gate, GateKind
from .symphase import ParamExpr

FAMILIES = ("TwoLocalRY", "TwoLocalRYRZ", "QAOA")
ENTANGLEMENTS = ("linear", "circular", "full", "sca")


@dataclass(frozen=True)
class AnsatzSpec:
    family: str
    n: int
    layers: int = 1
    entanglement: str = "linear"
    prefix: str = "theta"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.entanglement not in ENTANGLEMENTS:
            raise ValueError(f"unknown entanglement {self.entanglement!r}")
        if self.n < 2:
            raise ValueError("ansatz needs at least two qubits")
        if self.layers < 1:
            raise ValueError("ansatz needs at least one layer")

    @property
    def num_parameters(self) -> int:
        if self.family == "TwoLocalRY":
            return self.n * (self.layers + 1)
        if self.family == "TwoLocalRYRZ":
            return 2 * self.n * (self.layers + 1)
        return 2 * self.layers

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ErrorModel:
    flip_prob: float = 0.005
    shift_prob: float = 0.01
    shift_amount: Fraction = Fraction(1, 8)
    seed: int = 0

    def __post_init__(self):
        for name in ("flip_prob", "shift_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")


def entangling_pairs(n: int, pattern: str, rep: int = 0) -> list[tuple[int, int]]:
    linear = [(i, i + 1) for i in range(n - 1)]
    if pattern == "linear":
        return linear
    circular = [(n - 1, 0)] + linear if n > 2 else linear
    if pattern == "circular":
        return circular
    if pattern == "full":
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    if pattern == "sca":
        k = rep % len(circular)
        shifted = circular[len(circular) - k :] + circular[: len(circular) - k]
        return [(b, a) for a, b in shifted] if rep % 2 else shifted
    raise ValueError(f"unknown entanglement {pattern!r}")


def generate(spec: AnsatzSpec) -> Circuit:
    """Build the ansatz circuit for ``spec`` deterministically."""
    n = spec.n
    gates: list[Gate] = []
    if spec.family == "QAOA":
        gates += [Gate(GateKind.H, (q,)) for q in range(n)]
        for rep in range(spec.layers):
            theta = ParamExpr.param(f"{spec.prefix}_{rep}")
            gamma = ParamExpr.param(f"gamma_{rep}")
            gates += [Gate(GateKind.RZZ, pair, theta) for pair in entangling_pairs(n, spec.entanglement, rep)]
            gates += [Gate(GateKind.RX, (q,), gamma) for q in range(n)]
        return Circuit(n, gates)

    kinds = [GateKind.RY] if spec.family == "TwoLocalRY" else [GateKind.RY, GateKind.RZ]
    counter = iter(range(spec.num_parameters))

    def rotation_layer() -> None:
        for kind in kinds:
            for q in range(n):
                gates.append(Gate(kind, (q,), ParamExpr.param(f"{spec.prefix}_{next(counter)}")))

    rotation_layer()
    for rep in range(spec.layers):
        gates.extend(Gate(GateKind.CX, pair) for pair in entangling_pairs(n, spec.entanglement, rep))
        rotation_layer()
    return Circuit(n, gates)


# -- compilation --------------------------------------------------------------


def line_coupling(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def _adjacency(n: int, coupling: Iterable[tuple[int, int]]) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {q: set() for q in range(n)}
    for a, b in coupling:
        if not (0 <= a < n and 0 <= b < n) or a == b:
            raise ValueError(f"bad coupling edge ({a}, {b}) for width {n}")
        adj[a].add(b)
        adj[b].add(a)
    seen, todo = {0}, deque([0])
    while todo:
        for w in adj[todo.popleft()]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    if len(seen) != n:
        raise ValueError("coupling graph is disconnected or misses qubits")
    return adj


def _shortest_path(adj: dict[int, set[int]], a: int, b: int) -> list[int]:
    prev = {a: a}
    todo = deque([a])
    while todo:
        v = todo.popleft()
        if v == b:
            break
        for w in sorted(adj[v]):
            if w not in prev:
                prev[w] = v
                todo.append(w)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def synthesize_rzz(c: Circuit) -> Circuit:
    out = []
    for g in c.gates:
        if g.kind is GateKind.RZZ:
            a, b = g.qubits
            out += [Gate(GateKind.CX, (a, b)), Gate(GateKind.RZ, (b,), g.angle), Gate(GateKind.CX, (a, b))]
        else:
            out.append(g)
    return Circuit(c.width, out, c.params)


def route(c: Circuit, coupling: Sequence[tuple[int, int]]) -> Circuit:
    """Insert SWAPs so every two-qubit gate acts on coupled physical qubits.

    Logical qubit ``i`` starts on physical qubit ``i``.  The layout is not
    swapped back after each gate; a final SWAP network restores the initial
    layout so the output has no residual permutation.
    """
    n = c.width
    adj = _adjacency(n, coupling)
    phys = list(range(n))  # logical -> physical
    log_at = list(range(n))  # physical -> logical
    out: list[Gate] = []

    def swap(p: int, q: int) -> None:
        out.append(Gate(GateKind.SWAP, (p, q)))
        la, lb = log_at[p], log_at[q]
        log_at[p], log_at[q] = lb, la
        phys[la], phys[lb] = q, p

    for g in c.gates:
        if len(g.qubits) == 2:
            pa, pb = phys[g.qubits[0]], phys[g.qubits[1]]
            if pb not in adj[pa]:
                path = _shortest_path(adj, pa, pb)
                for u, w in zip(path[:-2], path[1:-1]):
                    swap(u, w)
        out.append(Gate(g.kind, tuple(phys[q] for q in g.qubits), g.angle))
    _restore_layout(adj, log_at, swap)
    return Circuit(n, out, c.params)


def _restore_layout(adj: dict[int, set[int]], log_at: list[int], swap: Callable[[int, int], None]) -> None:
    # token swapping on a BFS spanning tree: fill leaves one at a time
    n = len(log_at)
    parent = {0: None}
    order = [0]
    for v in order:
        for w in sorted(adj[v]):
            if w not in parent:
                parent[w] = v
                order.append(w)
    tree = {v: set() for v in range(n)}
    for v, p in parent.items():
        if p is not None:
            tree[v].add(p)
            tree[p].add(v)
    alive = set(range(n))
    for leaf in reversed(order):
        if log_at[leaf] != leaf:
            src = log_at.index(leaf)
            path = _tree_path(tree, alive, src, leaf)
            for u, w in zip(path, path[1:]):
                swap(u, w)
        alive.discard(leaf)


def _tree_path(tree: dict[int, set[int]], alive: set[int], a: int, b: int) -> list[int]:
    prev = {a: a}
    todo = deque([a])
    while todo:
        v = todo.popleft()
        for w in sorted(tree[v]):
            if w in alive and w not in prev:
                prev[w] = v
                todo.append(w)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def decompose_swaps(c: Circuit) -> Circuit:
    out = []
    for g in c.gates:
        if g.kind is GateKind.SWAP:
            a, b = g.qubits
            out += [Gate(GateKind.CX, (a, b)), Gate(GateKind.CX, (b, a)), Gate(GateKind.CX, (a, b))]
        else:
            out.append(g)
    return Circuit(c.width, out, c.params)


_Z_LIKE = frozenset({GateKind.RZ, GateKind.P, GateKind.Z, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG})
_X_LIKE = frozenset({GateKind.RX, GateKind.X})
_MERGEABLE = frozenset({GateKind.RZ, GateKind.RX, GateKind.P})


def _commutes(h: Gate, g: Gate) -> bool:
    """Sufficient syntactic test that ``h`` and ``g`` commute."""
    if not set(h.qubits) & set(g.qubits):
        return True
    for a, b in ((h, g), (g, h)):
        if a.kind is GateKind.CX and len(b.qubits) == 1:
            c, t = a.qubits
            q = b.qubits[0]
            if (q == c and b.kind in _Z_LIKE) or (q == t and b.kind in _X_LIKE):
                return True
    if h.kind is GateKind.CX and g.kind is GateKind.CX:
        return h.qubits[0] != g.qubits[1] and h.qubits[1] != g.qubits[0]
    if len(h.qubits) == 1 and len(g.qubits) == 1:
        return (h.kind in _Z_LIKE and g.kind in _Z_LIKE) or (h.kind in _X_LIKE and g.kind in _X_LIKE)
    return False


def _is_zero_rotation(g: Gate) -> bool:
    return g.kind in _MERGEABLE and g.angle.is_zero()


def optimize(c: Circuit) -> Circuit:
    """Peephole pass: CX cancellation, rotation merging, H-Z-H to X.

    Gates are matched across intermediate gates that commute with them, so
    ``RZ`` slides through CX controls and ``RX`` through CX targets.
    """
    out: list[Gate | None] = []
    on_qubit: list[list[int]] = [[] for _ in range(c.width)]

    def candidates(g: Gate):
        # earlier live gates on g's qubits, most recent first
        idx = sorted({i for q in g.qubits for i in on_qubit[q] if out[i] is not None}, reverse=True)
        return idx

    for g in c.gates:
        if _is_zero_rotation(g):
            continue
        done = False
        for i in candidates(g):
            h = out[i]
            if g.kind is GateKind.CX and h == g:
                out[i] = None
                done = True
                break
            if g.kind in _MERGEABLE and h.kind is g.kind and h.qubits == g.qubits:
                merged = Gate(g.kind, g.qubits, h.angle + g.angle)
                out[i] = None if _is_zero_rotation(merged) else merged
                done = True
                break
            if g.kind is GateKind.H and h.kind is GateKind.H and h.qubits == g.qubits:
                out[i] = None
                done = True
                break
            if not _commutes(h, g):
                break
        if not done:
            out.append(g)
            for q in g.qubits:
                on_qubit[q].append(len(out) - 1)
    gates = [g for g in out if g is not None]
    return Circuit(c.width, _hzh_to_x(c.width, gates), c.params)


def _hzh_to_x(n: int, gates: list[Gate]) -> list[Gate]:
    last: list[list[int]] = [[] for _ in range(n)]
    out: list[Gate | None] = []
    for g in gates:
        out.append(g)
        k = len(out) - 1
        if g.kind is GateKind.H:
            q = g.qubits[0]
            hist = [i for i in last[q] if out[i] is not None][-2:]
            if (
                len(hist) == 2
                and out[hist[1]].kind is GateKind.Z
                and out[hist[0]].kind is GateKind.H
            ):
                out[hist[0]] = Gate(GateKind.X, (q,))
                out[hist[1]] = None
                out[k] = None
                continue
        for q in g.qubits:
            last[q].append(k)
    return [g for g in out if g is not None]


def translate_basis(c: Circuit) -> Circuit:
    """Rewrite RX and RY into H, S and RZ gates."""
    out = []
    for g in c.gates:
        q = g.qubits
        if g.kind is GateKind.RX:
            out += [Gate(GateKind.H, q), Gate(GateKind.RZ, q, g.angle), Gate(GateKind.H, q)]
        elif g.kind is GateKind.RY:
            out += [
                Gate(GateKind.SDG, q),
                Gate(GateKind.H, q),
                Gate(GateKind.RZ, q, g.angle),
                Gate(GateKind.H, q),
                Gate(GateKind.S, q),
            ]
        else:
            out.append(g)
    return Circuit(c.width, out, c.params)


def compile_like(
    c: Circuit,
    coupling: Sequence[tuple[int, int]] | None = None,
    opt: bool = True,
    basis: bool = False,
) -> Circuit:
    """Equivalence-preserving compilation to ``coupling`` (a line by default).

    Steps: RZZ synthesis, SWAP routing, SWAP decomposition into three CX,
    then optionally basis translation and peephole optimisation.
    """
    coupling = line_coupling(c.width) if coupling is None else list(coupling)
    out = synthesize_rzz(c)
    out = route(out, coupling)
    out = decompose_swaps(out)
    if basis:
        out = translate_basis(out)
    if opt:
        out = optimize(out)
    return out


# -- error injection ----------------------------------------------------------


@dataclass(frozen=True)
class Mutation:
    index: int
    kind: str  # "flip" or "shift"
    before: str
    after: str

    def to_dict(self) -> dict:
        return asdict(self)


def _mutate(c: Circuit, m: ErrorModel, rng: random.Random) -> tuple[Circuit, list[Mutation]]:
    gates = list(c.gates)
    log: list[Mutation] = []
    shift = ParamExpr.pi(m.shift_amount)
    for i, g in enumerate(gates):
        if g.kind is GateKind.CX:
            if rng.random() < m.flip_prob:
                new = Gate(GateKind.CX, g.qubits[::-1])
                log.append(Mutation(i, "flip", str(g), str(new)))
                gates[i] = new
        elif g.angle is not None and not g.angle.is_constant():
            if rng.random() < m.shift_prob:
                new = Gate(g.kind, g.qubits, g.angle + shift)
                log.append(Mutation(i, "shift", str(g), str(new)))
                gates[i] = new
    return Circuit(c.width, gates, c.params), log


def inject_errors(
    c: Circuit,
    m: ErrorModel,
    is_neutral: Callable[[Circuit, Circuit], bool] | None = None,
    max_attempts: int = 100,
) -> tuple[Circuit, list[Mutation]]:
    """Flip CX gates and shift parameterized angles at random.

    Only CX is flipped since CZ, SWAP and RZZ are symmetric.  A shift adds
    ``shift_amount * pi`` to the constant part of the angle.  When a
    non-empty mutation set leaves the circuit equivalent according to
    ``is_neutral`` (a random-instantiation oracle check by default), the
    draw is repeated.
    """
    rng = random.Random(m.seed)
    neutral = is_neutral if is_neutral is not None else _neutral_by_sampling
    for _ in range(max_attempts):
        mutated, log = _mutate(c, m, rng)
        if not log or not neutral(c, mutated):
            return mutated, log
    raise RuntimeError("could not draw a non-neutral mutation set")


def _neutral_by_sampling(a: Circuit, b: Circuit) -> bool:
    from .densecheck import OracleConfig, oracle_equiv
    from .instantiator import random_assignment

    params = list(dict.fromkeys([*a.params, *b.params]))
    sigma = random_assignment(params, seed=12345)
    return oracle_equiv(a.instantiate(sigma.values), b.instantiate(sigma.values), OracleConfig()).equivalent


@dataclass
class BenchmarkPair:
    spec: AnsatzSpec
    original: Circuit
    compiled: Circuit
    errors: list[Mutation] = field(default_factory=list)
    seed: int | None = None

    @property
    def equivalent(self) -> bool:
        return not self.errors


def make_pair(
    spec: AnsatzSpec,
    model: ErrorModel | None = None,
    coupling: Sequence[tuple[int, int]] | None = None,
    opt: bool = True,
) -> BenchmarkPair:
    original = generate(spec)
    compiled = compile_like(original, coupling, opt)
    if model is None:
        return BenchmarkPair(spec, original, compiled)
    mutated, log = inject_errors(compiled, model)
    return BenchmarkPair(spec, original, mutated, log, model.seed)
