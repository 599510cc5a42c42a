"""Parameterized circuit IR, ``.pqasm`` reader/writer and dense semantics.

Qubit ``k`` is bit ``k`` of a basis-state index (little endian).  Gate phase
conventions: ``RZ(e) = diag(exp(-ie/2), exp(ie/2))``, ``P(e) = diag(1, exp(ie))``,
``RZZ(e) = exp(-ie/2 Z(x)Z)``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .symphase import (
    AngleValue,
    NonLinearExpressionError,
    ParamExpr,
    UnboundParameterError,
    format_expr,
    parse_expr,
)

DEFAULT_DENSE_LIMIT = 12


class GateKind(str, enum.Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    P = "p"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"
    RZZ = "rzz"

    @property
    def num_qubits(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def parameterized(self) -> bool:
        return self in _ROTATIONS


_TWO_QUBIT = frozenset({GateKind.CX, GateKind.CZ, GateKind.SWAP, GateKind.RZZ})
_ROTATIONS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.P, GateKind.RZZ})
_SELF_INVERSE = frozenset(
    {GateKind.H, GateKind.X, GateKind.Y, GateKind.Z, GateKind.CX, GateKind.CZ, GateKind.SWAP}
)
_DAGGER = {GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S, GateKind.T: GateKind.TDG, GateKind.TDG: GateKind.T}
_ALIASES = {"cnot": GateKind.CX, "phase": GateKind.P, "sdag": GateKind.SDG, "tdag": GateKind.TDG}


class CircuitError(ValueError):
    pass


class ParseError(CircuitError):
    """Syntax or semantic error in circuit source, with a 1-based position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class UnsupportedGateError(ParseError):
    pass


class NonLinearAngleError(ParseError):
    pass


class UnboundParameterParseError(ParseError):
    pass


class ParameterizedCircuitError(CircuitError):
    pass


class WidthLimitError(CircuitError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: ParamExpr | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != self.kind.num_qubits:
            raise CircuitError(f"{self.kind.value} acts on {self.kind.num_qubits} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"repeated qubit in {self.kind.value} {self.qubits}")
        if self.kind.parameterized != (self.angle is not None):
            raise CircuitError(f"angle must be given exactly for rotation gates ({self.kind.value})")

    def dagger(self) -> Gate:
        if self.kind in _SELF_INVERSE:
            return self
        if self.kind in _DAGGER:
            return Gate(_DAGGER[self.kind], self.qubits)
        return Gate(self.kind, self.qubits, -self.angle)

    def __str__(self) -> str:
        args = f"({format_expr(self.angle)})" if self.angle is not None else ""
        qs = ", ".join(f"q[{q}]" for q in self.qubits)
        return f"{self.kind.value}{args} {qs};"


class Circuit:
    """Ordered gate list over ``width`` qubits with declared parameter names."""

    __slots__ = ("width", "gates", "params")

    def __init__(self, width: int, gates: Iterable[Gate] = (), params: Sequence[str] | None = None):
        if width < 1:
            raise CircuitError("circuit width must be at least 1")
        self.width = int(width)
        self.gates: tuple[Gate, ...] = tuple(gates)
        used: list[str] = []
        seen: set[str] = set()
        for g in self.gates:
            if any(q >= self.width or q < 0 for q in g.qubits):
                raise CircuitError(f"gate {g} out of range for width {self.width}")
            if g.angle is not None:
                for name in sorted(g.angle.params):
                    if name not in seen:
                        seen.add(name)
                        used.append(name)
        if params is None:
            self.params: tuple[str, ...] = tuple(used)
        else:
            self.params = tuple(dict.fromkeys(params))
            missing = seen.difference(self.params)
            if missing:
                raise CircuitError(f"undeclared parameters: {sorted(missing)}")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.width == other.width and self.gates == other.gates and self.params == other.params

    def __repr__(self) -> str:
        return f"Circuit(width={self.width}, gates={len(self.gates)}, params={list(self.params)})"

    def is_parameterized(self) -> bool:
        return any(g.angle is not None and not g.angle.is_constant() for g in self.gates)

    def count(self, kind: GateKind | str) -> int:
        kind = GateKind(kind)
        return sum(1 for g in self.gates if g.kind is kind)

    def inverse(self) -> Circuit:
        return inverse(self)

    def instantiate(self, values: Mapping[str, AngleValue], drop_zero: bool = True) -> Circuit:
        return instantiate(self, values, drop_zero)

    def unitary(self, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
        return unitary(self, dense_limit)

    def dumps(self) -> str:
        return dumps(self)


# ---------------------------------------------------------------------------
# circuit transformations


def inverse(c: Circuit) -> Circuit:
    return Circuit(c.width, [g.dagger() for g in reversed(c.gates)], c.params)


def concatenate(a: Circuit, b: Circuit) -> Circuit:
    """``a`` followed by ``b``; parameters with equal names are identified."""
    if a.width != b.width:
        raise CircuitError(f"width mismatch: {a.width} vs {b.width}")
    return Circuit(a.width, a.gates + b.gates, a.params + tuple(p for p in b.params if p not in a.params))


def instantiate(c: Circuit, values: Mapping[str, AngleValue], drop_zero: bool = True) -> Circuit:
    """Bind every parameter; rotations whose angle evaluates to exactly 0 are dropped."""
    for name in c.params:
        if name not in values:
            raise UnboundParameterError(name)
    out = []
    for g in c.gates:
        if g.angle is None:
            out.append(g)
            continue
        angle = g.angle.evaluate(values)
        if drop_zero and angle.is_zero():
            continue
        out.append(Gate(g.kind, g.qubits, angle))
    return Circuit(c.width, out, ())


# ---------------------------------------------------------------------------
# text format

_HEADER = re.compile(r"qubits\s+(\d+)$")
_QREG = re.compile(r"qubit\s*\[\s*(\d+)\s*\]\s*[A-Za-z_]\w*$")
_INPUT = re.compile(r"input\s+angle\s+([A-Za-z_]\w*)$")
_GATE = re.compile(r"([A-Za-z_]\w*)\s*(?:\((.*)\))?\s+(.+)$", re.S)
_QARG = re.compile(r"\s*[A-Za-z_]\w*\s*\[\s*(\d+)\s*\]\s*$")
_REJECTED = {"measure", "reset", "if", "while", "for", "barrier", "gate", "def", "bit", "creg"}


def _statements(text: str):
    """Yield ``(statement, line, col)`` for ``;``-terminated statements."""
    buf: list[str] = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0]
        col0 = 0
        while True:
            semi = line.find(";", col0)
            chunk = line[col0:] if semi < 0 else line[col0:semi]
            if chunk.strip() and start is None:
                start = (lineno, col0 + len(chunk) - len(chunk.lstrip()) + 1)
            buf.append(chunk)
            if semi < 0:
                buf.append("\n")
                break
            stmt = "".join(buf).strip()
            if stmt:
                yield stmt, start[0], start[1]
            elif start is None:
                raise ParseError("empty statement", lineno, semi + 1)
            buf, start = [], None
            col0 = semi + 1
    if "".join(buf).strip():
        raise ParseError("missing ';' at end of input", start[0], start[1])


def parse(text: str) -> Circuit:
    """Parse ``.pqasm`` source into a :class:`Circuit`."""
    width: int | None = None
    params: list[str] = []
    gates: list[Gate] = []
    for stmt, line, col in _statements(text):
        if re.match(r"OPENQASM\b", stmt) or stmt.startswith("include"):
            continue
        m = _HEADER.match(stmt) or _QREG.match(stmt)
        if m:
            if width is not None:
                raise ParseError("qubit count declared twice", line, col)
            width = int(m.group(1))
            if width < 1:
                raise ParseError("qubit count must be positive", line, col)
            continue
        m = _INPUT.match(stmt)
        if m:
            if gates:
                raise ParseError("parameter declared after gates", line, col)
            if m.group(1) in params or m.group(1) == "pi":
                raise ParseError(f"parameter {m.group(1)!r} declared twice", line, col)
            params.append(m.group(1))
            continue
        m = _GATE.match(stmt)
        if not m:
            raise ParseError(f"cannot parse statement {stmt!r}", line, col)
        name, arg, qargs = m.group(1).lower(), m.group(2), m.group(3)
        if width is None:
            raise ParseError("gate before 'qubits <n>;' header", line, col)
        if name in _REJECTED or "->" in qargs:
            raise UnsupportedGateError(f"'{name}' is not supported (unitary circuits only)", line, col)
        try:
            kind = _ALIASES.get(name) or GateKind(name)
        except ValueError:
            raise UnsupportedGateError(f"unsupported gate '{name}'", line, col) from None
        angle = None
        if kind.parameterized:
            if arg is None or not arg.strip():
                raise ParseError(f"gate '{name}' needs an angle", line, col)
            try:
                angle = parse_expr(arg, params)
            except NonLinearExpressionError as e:
                raise NonLinearAngleError(str(e), line, col) from None
            except UnboundParameterError as e:
                raise UnboundParameterParseError(str(e), line, col) from None
            except (SyntaxError, ZeroDivisionError) as e:
                raise ParseError(f"bad angle expression: {e}", line, col) from None
        elif arg is not None:
            raise ParseError(f"gate '{name}' takes no angle", line, col)
        qubits = []
        for part in qargs.split(","):
            qm = _QARG.match(part)
            if not qm:
                raise ParseError(f"bad qubit argument {part.strip()!r}", line, col)
            q = int(qm.group(1))
            if q >= width:
                raise ParseError(f"qubit index {q} out of range for {width} qubits", line, col)
            qubits.append(q)
        try:
            gates.append(Gate(kind, tuple(qubits), angle))
        except CircuitError as e:
            raise ParseError(str(e), line, col) from None
    if width is None:
        raise ParseError("missing 'qubits <n>;' header")
    return Circuit(width, gates, params)


def dumps(c: Circuit) -> str:
    lines = [f"qubits {c.width};"]
    lines += [f"input angle {p};" for p in c.params]
    lines += [str(g) for g in c.gates]
    return "\n".join(lines) + "\n"


def load(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse(text)
    except ParseError as exc:
        exc.args = (f"{path}:{exc}",)
        raise


def dump(c: Circuit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(c))


# ---------------------------------------------------------------------------
# dense semantics

_SQ2 = 1 / math.sqrt(2)
_FIXED_1Q = {
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.diag([1, -1]).astype(complex),
    GateKind.S: np.diag([1, 1j]),
    GateKind.SDG: np.diag([1, -1j]),
    GateKind.T: np.diag([1, np.exp(1j * math.pi / 4)]),
    GateKind.TDG: np.diag([1, np.exp(-1j * math.pi / 4)]),
}


def _angle_radians(g: Gate) -> float:
    if not g.angle.is_constant():
        raise ParameterizedCircuitError(f"gate {g} still has free parameters")
    return g.angle.radians_value()


def gate_matrix(g: Gate) -> np.ndarray:
    """Matrix of ``g``; two-qubit matrices use ``g.qubits[0]`` as the high bit."""
    k = g.kind
    if k in _FIXED_1Q:
        return _FIXED_1Q[k]
    if k is GateKind.CX:
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if k is GateKind.CZ:
        return np.diag([1, 1, 1, -1]).astype(complex)
    if k is GateKind.SWAP:
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    a = _angle_radians(g)
    c, s = math.cos(a / 2), math.sin(a / 2)
    if k is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]])
    if k is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if k is GateKind.RZ:
        return np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)])
    if k is GateKind.P:
        return np.diag([1, np.exp(1j * a)])
    if k is GateKind.RZZ:
        m, p = np.exp(-0.5j * a), np.exp(0.5j * a)
        return np.diag([m, p, p, m])
    raise CircuitError(f"no matrix for {k}")


def _view1(state: np.ndarray, n: int, q: int) -> np.ndarray:
    return state.reshape(1 << (n - 1 - q), 2, -1)


def _view2(state: np.ndarray, n: int, q0: int, q1: int) -> tuple[np.ndarray, bool]:
    hi, lo = (q0, q1) if q0 > q1 else (q1, q0)
    v = state.reshape(1 << (n - 1 - hi), 2, 1 << (hi - lo - 1), 2, -1)
    return v, q0 > q1


def apply_gate(state: np.ndarray, g: Gate, n: int) -> None:
    """Apply ``g`` in place to ``state`` of shape ``(2**n,)`` or ``(2**n, m)``.

    Columns of a 2-d state are independent vectors, so passing the identity
    matrix builds the circuit unitary.
    """
    if not state.flags.c_contiguous:
        raise ValueError("state must be C-contiguous for in-place updates")
    k = g.kind
    if k.num_qubits == 1:
        v = _view1(state, n, g.qubits[0])
        if k is GateKind.X:
            tmp = v[:, 0].copy()
            v[:, 0] = v[:, 1]
            v[:, 1] = tmp
            return
        m = gate_matrix(g)
        if m[0, 1] == 0 and m[1, 0] == 0:
            if m[0, 0] != 1:
                v[:, 0] *= m[0, 0]
            if m[1, 1] != 1:
                v[:, 1] *= m[1, 1]
            return
        a = v[:, 0].copy()
        b = v[:, 1]
        v[:, 0] *= m[0, 0]
        v[:, 0] += m[0, 1] * b
        b *= m[1, 1]
        b += m[1, 0] * a
        return
    q0, q1 = g.qubits
    v, first_is_hi = _view2(state, n, q0, q1)

    def sl(b0: int, b1: int):
        # b0 is the bit of q0, b1 the bit of q1
        hi, lo = (b0, b1) if first_is_hi else (b1, b0)
        return (slice(None), hi, slice(None), lo)

    if k is GateKind.CX:
        tmp = v[sl(1, 0)].copy()
        v[sl(1, 0)] = v[sl(1, 1)]
        v[sl(1, 1)] = tmp
    elif k is GateKind.CZ:
        v[sl(1, 1)] *= -1
    elif k is GateKind.SWAP:
        tmp = v[sl(0, 1)].copy()
        v[sl(0, 1)] = v[sl(1, 0)]
        v[sl(1, 0)] = tmp
    elif k is GateKind.RZZ:
        a = _angle_radians(g)
        m, p = np.exp(-0.5j * a), np.exp(0.5j * a)
        v[sl(0, 0)] *= m
        v[sl(1, 1)] *= m
        v[sl(0, 1)] *= p
        v[sl(1, 0)] *= p
    else:
        raise CircuitError(f"cannot apply {k}")


def unitary(c: Circuit, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Dense ``2**n x 2**n`` unitary of a parameter-free circuit."""
    if c.width > dense_limit:
        raise WidthLimitError(f"width {c.width} exceeds dense limit {dense_limit}")
    if c.is_parameterized():
        raise ParameterizedCircuitError("cannot build the unitary of a parameterized circuit")
    u = np.eye(1 << c.width, dtype=complex)
    for g in c.gates:
        apply_gate(u, g, c.width)
    return u


def simulate(c: Circuit, state: np.ndarray) -> np.ndarray:
    """Statevector simulation; returns a new array."""
    out = np.array(state, dtype=complex, copy=True)
    for g in c.gates:
        apply_gate(out, g, c.width)
    return out
