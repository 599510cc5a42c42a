"""Exact linear phase expressions.

A phase is ``sum(c_i * theta_i) + q*pi (+ f)`` where the coefficients ``c_i``
and ``q`` are exact rationals and ``f`` is an optional float remainder in
radians for constants that are not rational multiples of pi.  Parameters are
identified by name.
"""

from __future__ import annotations

import enum
import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]
AngleValue = Union[Fraction, float]  # Fraction -> multiple of pi, float -> radians


class UnboundParameterError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"parameter {self.name!r} is not bound"


class NonLinearExpressionError(ValueError):
    pass


class PhaseClass(enum.Enum):
    ZERO = "zero"
    PAULI = "pauli"
    PROPER_CLIFFORD = "proper_clifford"
    NON_CLIFFORD = "non_clifford"
    PARAMETERIZED = "parameterized"


def wrap_pi_multiple(q: Fraction) -> Fraction:
    """Reduce ``q`` (meaning ``q*pi``) into ``(-1, 1]``."""
    r = Fraction(q) % 2
    if r > 1:
        r -= 2
    return r


def wrap_radians(x: float) -> float:
    """Reduce ``x`` into ``(-pi, pi]``."""
    r = math.fmod(x, 2 * math.pi)
    if r <= -math.pi:
        r += 2 * math.pi
    elif r > math.pi:
        r -= 2 * math.pi
    return r


class ParamExpr:
    """Immutable linear phase expression.

    Instances are normalized on construction: zero coefficients are dropped,
    the pi-rational constant lives in ``(-1, 1]`` and the float remainder in
    ``(-pi, pi]``.
    """

    __slots__ = ("_terms", "_const", "_fconst", "_hash")

    def __init__(
        self,
        terms: Mapping[str, Number] | Iterable[tuple[str, Number]] = (),
        const: Number = 0,
        fconst: float = 0.0,
    ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[str, Fraction] = {}
        for name, c in items:
            acc[name] = acc.get(name, Fraction(0)) + Fraction(c)
        self._terms = tuple(sorted((k, v) for k, v in acc.items() if v != 0))
        self._const = wrap_pi_multiple(Fraction(const))
        self._fconst = wrap_radians(float(fconst)) if fconst else 0.0
        if self._fconst == 0.0:
            self._fconst = 0.0  # drop -0.0
        self._hash = hash((self._terms, self._const, self._fconst))

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> ParamExpr:
        return _ZERO

    @classmethod
    def pi(cls, q: Number = 1) -> ParamExpr:
        """The constant ``q*pi``."""
        return cls((), q)

    @classmethod
    def param(cls, name: str, coeff: Number = 1) -> ParamExpr:
        return cls(((name, coeff),))

    @classmethod
    def radians(cls, x: float) -> ParamExpr:
        """A float constant; snaps to an exact value when ``x`` is 0."""
        return cls((), 0, x)

    @classmethod
    def from_value(cls, value: AngleValue | ParamExpr) -> ParamExpr:
        if isinstance(value, ParamExpr):
            return value
        if isinstance(value, (Fraction, int)):
            return cls.pi(value)
        return cls.radians(float(value))

    # -- accessors --------------------------------------------------------
    @property
    def terms(self) -> dict[str, Fraction]:
        return dict(self._terms)

    @property
    def const(self) -> Fraction:
        """Pi-rational part of the constant, as a multiple of pi."""
        return self._const

    @property
    def fconst(self) -> float:
        """Float remainder of the constant in radians."""
        return self._fconst

    @property
    def params(self) -> frozenset[str]:
        return frozenset(k for k, _ in self._terms)

    def coefficient(self, name: str) -> Fraction:
        return dict(self._terms).get(name, Fraction(0))

    def is_constant(self) -> bool:
        return not self._terms

    def is_exact(self) -> bool:
        return self._fconst == 0.0

    def is_zero(self) -> bool:
        return not self._terms and self._const == 0 and self._fconst == 0.0

    # -- algebra ----------------------------------------------------------
    def __add__(self, other: ParamExpr) -> ParamExpr:
        if not isinstance(other, ParamExpr):
            return NotImplemented
        return ParamExpr(
            self._terms + other._terms, self._const + other._const, self._fconst + other._fconst
        )

    def __neg__(self) -> ParamExpr:
        return ParamExpr(((k, -v) for k, v in self._terms), -self._const, -self._fconst)

    def __sub__(self, other: ParamExpr) -> ParamExpr:
        if not isinstance(other, ParamExpr):
            return NotImplemented
        return self + (-other)

    def scale(self, k: int) -> ParamExpr:
        """Multiply by an integer (integers keep the 2pi wrap sound)."""
        return ParamExpr(((n, v * k) for n, v in self._terms), self._const * k, self._fconst * k)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ParamExpr):
            return NotImplemented
        return (
            self._terms == other._terms
            and self._const == other._const
            and self._fconst == other._fconst
        )

    def __hash__(self) -> int:
        return self._hash

    def normalize(self) -> ParamExpr:
        return self

    # -- classification / evaluation --------------------------------------
    def classify(self) -> PhaseClass:
        if self._terms:
            return PhaseClass.PARAMETERIZED
        if self._fconst != 0.0:
            return PhaseClass.NON_CLIFFORD
        if self._const == 0:
            return PhaseClass.ZERO
        if self._const == 1:
            return PhaseClass.PAULI
        if abs(self._const) == Fraction(1, 2):
            return PhaseClass.PROPER_CLIFFORD
        return PhaseClass.NON_CLIFFORD

    def is_pauli(self) -> bool:
        """Phase is exactly 0 or pi."""
        return self.classify() in (PhaseClass.ZERO, PhaseClass.PAULI)

    def is_proper_clifford(self) -> bool:
        return self.classify() is PhaseClass.PROPER_CLIFFORD

    def is_clifford(self) -> bool:
        return self.classify() in (PhaseClass.ZERO, PhaseClass.PAULI, PhaseClass.PROPER_CLIFFORD)

    def evaluate(self, values: Mapping[str, AngleValue]) -> ParamExpr:
        """Substitute ``values`` and return a constant expression.

        Fraction values are multiples of pi and keep the result exact; float
        values are radians and push the result into the float channel.
        """
        q = self._const
        f = self._fconst
        for name, c in self._terms:
            try:
                v = values[name]
            except KeyError:
                raise UnboundParameterError(name) from None
            if isinstance(v, (Fraction, int)):
                q += c * Fraction(v)
            else:
                f += float(c) * float(v)
        return ParamExpr((), q, f)

    def radians_value(self) -> float:
        """Float value in ``(-pi, pi]``; only defined for constants."""
        if self._terms:
            raise ValueError(f"{self} is not constant")
        return wrap_radians(float(self._const) * math.pi + self._fconst)

    def __float__(self) -> float:
        return self.radians_value()

    # -- printing ---------------------------------------------------------
    def __str__(self) -> str:
        return format_expr(self)

    def __repr__(self) -> str:
        return f"ParamExpr({format_expr(self)!r})"


_ZERO = ParamExpr()


def add(a: ParamExpr, b: ParamExpr) -> ParamExpr:
    return a + b


def negate(a: ParamExpr) -> ParamExpr:
    return -a


def classify(a: ParamExpr) -> PhaseClass:
    return a.classify()


def evaluate(a: ParamExpr, values: Mapping[str, AngleValue]) -> ParamExpr:
    return a.evaluate(values)


# ---------------------------------------------------------------------------
# text format


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_term(coeff: Fraction, atom: str) -> tuple[str, str]:
    sign = "-" if coeff < 0 else "+"
    mag = abs(coeff)
    body = atom if mag == 1 else f"{_format_rational(mag)}*{atom}"
    return sign, body


def format_expr(e: ParamExpr) -> str:
    """Render ``e`` in the textual grammar accepted by :func:`parse_expr`."""
    parts: list[tuple[str, str]] = [_format_term(c, name) for name, c in e._terms]
    if e.const != 0:
        parts.append(_format_term(e.const, "pi"))
    if e.fconst != 0.0:
        parts.append(("-" if e.fconst < 0 else "+", repr(abs(e.fconst))))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/()^]))"
)


class _Lin:
    """Linear form used while parsing: parameter terms, pi multiple, bare radians."""

    __slots__ = ("terms", "q", "r", "is_num")

    def __init__(self, terms=None, q=Fraction(0), r=Fraction(0), is_num=False):
        self.terms: dict[str, Fraction] = terms or {}
        self.q = q
        self.r = r
        self.is_num = is_num

    def scaled(self, k: Fraction) -> _Lin:
        return _Lin({n: c * k for n, c in self.terms.items()}, self.q * k, self.r * k, self.is_num)

    def plus(self, other: _Lin) -> _Lin:
        t = dict(self.terms)
        for n, c in other.terms.items():
            t[n] = t.get(n, Fraction(0)) + c
        return _Lin(t, self.q + other.q, self.r + other.r, self.is_num and other.is_num)


class _ExprParser:
    def __init__(self, text: str, known: frozenset[str] | None):
        self.text = text
        self.known = known
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise SyntaxError(f"unexpected character {text[pos]!r} at column {pos + 1}")
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self) -> _Lin:
        v = self.expr()
        kind, val, col = self.peek()
        if kind is not None:
            raise SyntaxError(f"unexpected token {val!r} at column {col + 1}")
        return v

    def expr(self) -> _Lin:
        v = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            v = v.plus(rhs if op == "+" else rhs.scaled(Fraction(-1)))
        return v

    def term(self) -> _Lin:
        v = self.unary()
        if self.peek()[1] == "^":
            raise NonLinearExpressionError("powers are not linear")
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                if v.is_num:
                    v = rhs.scaled(v.r)
                elif rhs.is_num:
                    v = v.scaled(rhs.r)
                else:
                    raise NonLinearExpressionError(f"non-linear product in {self.text!r}")
            else:
                if not rhs.is_num:
                    raise NonLinearExpressionError(f"division by a non-constant in {self.text!r}")
                if rhs.r == 0:
                    raise ZeroDivisionError(f"division by zero in {self.text!r}")
                v = v.scaled(1 / rhs.r)
            if self.peek()[1] == "^":
                raise NonLinearExpressionError("powers are not linear")
        return v

    def unary(self) -> _Lin:
        val = self.peek()[1]
        if val == "-":
            self.take()
            return self.unary().scaled(Fraction(-1))
        if val == "+":
            self.take()
            return self.unary()
        return self.atom()

    def atom(self) -> _Lin:
        kind, val, col = self.take()
        if kind is None:
            raise SyntaxError(f"unexpected end of expression {self.text!r}")
        if kind == "num":
            return _Lin(r=Fraction(val), is_num=True)
        if kind == "name":
            if self.peek()[1] == "(":
                raise NonLinearExpressionError(f"function call {val}(...) is not linear")
            if val == "pi":
                return _Lin(q=Fraction(1))
            if self.known is not None and val not in self.known:
                raise UnboundParameterError(val)
            return _Lin({val: Fraction(1)})
        if val == "(":
            v = self.expr()
            tok, c = self.take()[1:]
            if tok != ")":
                raise SyntaxError(f"expected ')' at column {c + 1}")
            return v
        if val == "^":
            raise NonLinearExpressionError("powers are not linear")
        raise SyntaxError(f"unexpected token {val!r} at column {col + 1}")


def parse_expr(text: str, known: Iterable[str] | None = None) -> ParamExpr:
    """Parse a linear angle expression such as ``2*theta - pi/4``.

    ``known`` restricts identifiers to declared parameters.  Products of two
    non-constant factors, powers and function calls are rejected with
    :class:`NonLinearExpressionError`.  Bare numbers are radians and land in
    the float channel.
    """
    lin = _ExprParser(text, None if known is None else frozenset(known)).parse()
    if lin.q == 0 and not lin.terms and lin.r == 0 and lin.is_num:
        return ParamExpr()
    return ParamExpr(lin.terms, lin.q, float(lin.r))
