"""Shared fixtures and random circuit builders."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from pqec.circuit import Circuit, Gate, GateKind, load
from pqec.symphase import ParamExpr

DATA = Path(__file__).parent / "data"

ONE_QUBIT = [GateKind.H, GateKind.X, GateKind.Y, GateKind.Z, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG]
ROTATIONS = [GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.P]
TWO_QUBIT = [GateKind.CX, GateKind.CZ, GateKind.SWAP]


def random_angle(rng: random.Random, params: list[str]) -> ParamExpr:
    e = ParamExpr.pi(Fraction(rng.randint(-7, 8), 4))
    for p in params:
        if rng.random() < 0.5:
            e = e + ParamExpr.param(p, rng.choice([-2, -1, 1, 1, 2]))
    if rng.random() < 0.15:
        e = e + ParamExpr.radians(rng.uniform(-3, 3))
    return e


def random_circuit(rng: random.Random, n: int, size: int, params: list[str] | None = None) -> Circuit:
    """Random circuit over the full gate set; ``params`` may appear in angles."""
    params = params or []
    gates = []
    for _ in range(size):
        r = rng.random()
        if n > 1 and r < 0.3:
            kind = rng.choice(TWO_QUBIT + [GateKind.RZZ])
            qs = tuple(rng.sample(range(n), 2))
            angle = random_angle(rng, params) if kind is GateKind.RZZ else None
            gates.append(Gate(kind, qs, angle))
        elif r < 0.6:
            gates.append(Gate(rng.choice(ONE_QUBIT), (rng.randrange(n),)))
        else:
            gates.append(Gate(rng.choice(ROTATIONS), (rng.randrange(n),), random_angle(rng, params)))
    return Circuit(n, gates, params)


def random_values(rng: random.Random, params) -> dict[str, float]:
    return {p: rng.uniform(-np.pi, np.pi) for p in params}


def commuted_rz() -> tuple[Circuit, Circuit]:
    return load(DATA / "commuted_rz_a.pqasm"), load(DATA / "commuted_rz_b.pqasm")


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240)


def rational_consistent(rows: list[tuple[dict[str, Fraction], Fraction]]) -> bool:
    """Whether a rational linear system has a solution (Fraction Gaussian elimination)."""
    names = sorted({n for coeffs, _ in rows for n in coeffs})
    m = [[coeffs.get(n, Fraction(0)) for n in names] + [rhs] for coeffs, rhs in rows]
    r = 0
    for c in range(len(names)):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return all(any(x != 0 for x in row[:-1]) or row[-1] == 0 for row in m)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
