"""Linear systems over parameterized angles and the assignments solving them.

A targeted instantiation asks that every parameterized angle of both
circuits evaluate to one target value.  The resulting rational linear
system is generally overdetermined, so rows are accepted greedily in
construction order whenever they stay consistent with the rows accepted so
far.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .circuit import Circuit
from .symphase import AngleValue, ParamExpr, wrap_pi_multiple, wrap_radians

EXACT = "ExactRationalPi"
RANDOM = "RandomFloat"


@dataclass(frozen=True)
class Assignment:
    """Parameter values: ``Fraction`` means a multiple of pi, ``float`` radians."""

    values: dict[str, AngleValue]
    flavor: str = EXACT
    seed: int | None = None

    def __getitem__(self, name: str) -> AngleValue:
        return self.values[name]

    def __len__(self) -> int:
        return len(self.values)

    def radians(self, name: str) -> float:
        v = self.values[name]
        return float(v) * math.pi if isinstance(v, Fraction) else float(v)

    def to_json_obj(self) -> dict:
        vals: dict[str, str | float] = {}
        for k, v in self.values.items():
            vals[k] = format_pi_multiple(v) if isinstance(v, Fraction) else float(v)
        return {"flavor": self.flavor, "seed": self.seed, "values": vals}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> Assignment:
        values: dict[str, AngleValue] = {}
        for k, v in obj.get("values", {}).items():
            values[k] = parse_pi_multiple(v) if isinstance(v, str) else float(v)
        return cls(values, obj.get("flavor", EXACT), obj.get("seed"))

    @classmethod
    def from_json(cls, text: str) -> Assignment:
        return cls.from_json_obj(json.loads(text))


def format_pi_multiple(q: Fraction) -> str:
    if q == 0:
        return "0"
    if q == 1:
        return "pi"
    if q == -1:
        return "-pi"
    return f"{q}*pi"


def parse_pi_multiple(text: str) -> Fraction:
    m = _PI_TEXT.fullmatch(text.replace(" ", ""))
    if m is None:
        raise ValueError(f"not a multiple of pi: {text!r}")
    if m.group("zero"):
        return Fraction(0)
    coeff = m.group("coeff")
    q = Fraction(coeff[:-1]) if coeff else Fraction(1)
    if m.group("sign") == "-":
        q = -q
    if m.group("den"):
        q /= int(m.group("den"))
    return q


_PI_TEXT = re.compile(r"(?P<zero>[+-]?0)|(?P<sign>[+-]?)(?P<coeff>\d+(?:/\d+)?\*)?pi(?:/(?P<den>\d+))?")


@dataclass(frozen=True)
class Row:
    expr: ParamExpr
    target: Fraction

    @property
    def rhs(self) -> Fraction:
        """Target minus the constant part, as a multiple of pi."""
        return self.target - self.expr.const


@dataclass
class AngleSystem:
    """Rows ``expr = target`` with columns in ``params`` order."""

    params: tuple[str, ...]
    rows: list[Row] = field(default_factory=list)

    @property
    def matrix(self) -> list[list[Fraction]]:
        return [[r.expr.coefficient(p) for p in self.params] for r in self.rows]

    @property
    def rhs(self) -> list[Fraction]:
        return [r.rhs for r in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


def parameterized_angles(c: Circuit) -> Iterable[ParamExpr]:
    for g in c.gates:
        if g.angle is not None and not g.angle.is_constant():
            yield g.angle


def collect_system(g: Circuit, g2: Circuit, target: Fraction = Fraction(0)) -> AngleSystem:
    """One row per distinct parameterized angle of ``g`` then ``g2``."""
    params = list(g.params)
    params += [p for p in g2.params if p not in set(params)]
    seen: set[ParamExpr] = set()
    rows = []
    target = Fraction(target)
    for expr in [*parameterized_angles(g), *parameterized_angles(g2)]:
        if expr in seen:
            continue
        seen.add(expr)
        rows.append(Row(expr, target))
    return AngleSystem(tuple(params), rows)


class _Echelon:
    """Reduced row echelon form over the rationals with sparse rows."""

    def __init__(self):
        self.pivots: dict[str, tuple[dict[str, Fraction], Fraction]] = {}

    def reduce(self, coeffs: dict[str, Fraction], rhs: Fraction) -> tuple[dict[str, Fraction], Fraction]:
        coeffs = dict(coeffs)
        for col in [c for c in coeffs if c in self.pivots]:
            k = coeffs.get(col)
            if not k:
                continue
            prow, prhs = self.pivots[col]
            for c, v in prow.items():
                nv = coeffs.get(c, Fraction(0)) - k * v
                if nv:
                    coeffs[c] = nv
                else:
                    coeffs.pop(c, None)
            rhs -= k * prhs
        return coeffs, rhs

    def try_add(self, coeffs: dict[str, Fraction], rhs: Fraction, order: Mapping[str, int]) -> bool:
        coeffs, rhs = self.reduce(coeffs, rhs)
        if not coeffs:
            return rhs == 0
        col = min(coeffs, key=order.__getitem__)
        k = coeffs[col]
        row = {c: v / k for c, v in coeffs.items()}
        rhs = rhs / k
        for pcol, (prow, prhs) in list(self.pivots.items()):
            f = prow.get(col)
            if f:
                new = dict(prow)
                for c, v in row.items():
                    nv = new.get(c, Fraction(0)) - f * v
                    if nv:
                        new[c] = nv
                    else:
                        new.pop(c, None)
                self.pivots[pcol] = (new, prhs - f * rhs)
        self.pivots[col] = (row, rhs)
        return True

    def solution(self) -> dict[str, Fraction]:
        # free variables are zero, so each pivot takes its right-hand side
        return {col: rhs for col, (_, rhs) in self.pivots.items()}


def _eligible(row: Row) -> bool:
    # rows with a floating constant cannot be met exactly in multiples of pi
    return row.expr.fconst == 0.0


def greedy_solve(system: AngleSystem) -> tuple[Assignment, frozenset[int]]:
    """Accept rows in order while consistent; return the assignment and accepted rows.

    Values are exact multiples of pi.  A value is wrapped into (-pi, pi] only
    when every coefficient of its parameter is an integer, so wrapping never
    changes a satisfied row modulo 2*pi.
    """
    order = {p: i for i, p in enumerate(system.params)}
    ech = _Echelon()
    satisfied = set()
    for i, row in enumerate(system.rows):
        if _eligible(row) and ech.try_add(row.expr.terms, row.rhs, order):
            satisfied.add(i)
    sol = ech.solution()
    integral = {p: True for p in system.params}
    for row in system.rows:
        for p, c in row.expr.terms.items():
            if c.denominator != 1:
                integral[p] = False
    values: dict[str, AngleValue] = {}
    for p in system.params:
        v = sol.get(p, Fraction(0))
        values[p] = wrap_pi_multiple(v) if integral[p] else v
    return Assignment(values, EXACT), frozenset(satisfied)


def row_satisfied(row: Row, a: Assignment) -> bool:
    """Exact check that ``row`` evaluates to its target modulo 2*pi."""
    val = row.expr.evaluate(a.values)
    return val.is_exact() and val.const == wrap_pi_multiple(row.target)


_TARGETS = (Fraction(0), Fraction(1), Fraction(1, 2))
_CYCLE = (Fraction(1, 4), Fraction(3, 4), Fraction(-3, 4), Fraction(-1, 4))


def target_schedule(run: int) -> Fraction:
    """Uniform target of run ``run`` as a multiple of pi."""
    if run < 0:
        raise ValueError("run index must be non-negative")
    if run < len(_TARGETS):
        return _TARGETS[run]
    return _CYCLE[(run - len(_TARGETS)) % len(_CYCLE)]


def random_assignment(params: Iterable[str], seed: int | None = None) -> Assignment:
    """Independent uniform angles on (-pi, pi] in radians."""
    rng = random.Random(seed)
    values: dict[str, AngleValue] = {}
    for p in params:
        values[p] = wrap_radians(math.pi - 2 * math.pi * rng.random())
    return Assignment(values, RANDOM, seed)
