"""Multi-stage equivalence check for parameterized circuits.

Stages run in a fixed order and stop at the first conclusive one:

1. ZX: simplify the diagram of ``G^-1 G'``; bare identity wiring proves
   equivalence for every assignment.
2. Targeted runs: solve the angle system greedily for a uniform target and
   compare the instantiated circuits.  Any mismatch is a genuine
   counterexample.
3. Random run: compare at a uniformly random assignment.  Agreement implies
   equivalence with probability one.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, TypeVar

from .circuit import DEFAULT_DENSE_LIMIT, Circuit, CircuitError, concatenate, inverse
from .densecheck import DEFAULT_STIMULI, DENSE_TOL, EquivalenceResult, OracleConfig, oracle_equiv
from .instantiator import Assignment, collect_system, greedy_solve, random_assignment, target_schedule
from .zx.diagram import circuit_to_graph_like
from .zx.simplify import DEFAULT_MAX_ROUNDS, SimplifyReport, full_simplify, is_identity

EQUIVALENT_SYMBOLIC = "EquivalentSymbolic"
EQUIVALENT_PROBABILISTIC = "EquivalentProbabilistic"
NON_EQUIVALENT = "NonEquivalent"

STAGE_ZX = "ZX"
STAGE_RANDOM = "RandomRun"

SEED_ENV = "PQEC_SEED"

T = TypeVar("T")


def targeted_stage(i: int) -> str:
    return f"TargetedRun({i})"


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


@dataclass(frozen=True)
class CheckConfig:
    runs: int = 2
    seed: int = field(default_factory=default_seed)
    allow_permutation: bool = False
    dense_limit: int = DEFAULT_DENSE_LIMIT
    stimuli: int = DEFAULT_STIMULI
    tol: float = DENSE_TOL
    timeout_per_stage: float | None = None
    skip_zx: bool = False
    stimuli_first: bool = False
    max_rounds: int = DEFAULT_MAX_ROUNDS

    def __post_init__(self):
        if self.runs < 0:
            raise ValueError("runs must be non-negative")
        if self.stimuli < 1:
            raise ValueError("stimuli must be at least 1")
        if self.dense_limit < 1:
            raise ValueError("dense limit must be positive")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.timeout_per_stage is not None and self.timeout_per_stage <= 0:
            raise ValueError("timeout must be positive")

    def oracle(self, seed_offset: int = 0) -> OracleConfig:
        return OracleConfig(
            dense_limit=self.dense_limit,
            stimuli=self.stimuli,
            tol=self.tol,
            stimuli_first=self.stimuli_first,
            seed=self.seed + seed_offset,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "runs": self.runs,
            "seed": self.seed,
            "allow_permutation": self.allow_permutation,
            "dense_limit": self.dense_limit,
            "stimuli": self.stimuli,
            "tol": self.tol,
            "timeout_per_stage": self.timeout_per_stage,
            "skip_zx": self.skip_zx,
            "stimuli_first": self.stimuli_first,
            "max_rounds": self.max_rounds,
        }


@dataclass
class StageOutcome:
    stage: str
    conclusive: bool
    time_ms: float
    assignment: Assignment | None = None
    result: EquivalenceResult | None = None
    satisfied: int | None = None
    rows: int | None = None
    timed_out: bool = False
    oracle_ms: float = 0.0


@dataclass
class Verdict:
    status: str
    stage: str
    seed: int
    runs: int
    witness: Assignment | None = None
    stages: list[StageOutcome] = field(default_factory=list)
    zx_rules: dict[str, int] = field(default_factory=dict)
    zx_spiders: int | None = None
    permutation: tuple[int, ...] | None = None
    config: CheckConfig | None = None

    @property
    def equivalent(self) -> bool:
        return self.status != NON_EQUIVALENT

    def timings_ms(self) -> dict[str, Any]:
        zx = next((s.time_ms for s in self.stages if s.stage == STAGE_ZX), None)
        runs = [s.time_ms for s in self.stages if s.stage.startswith("TargetedRun")]
        rnd = next((s.time_ms for s in self.stages if s.stage == STAGE_RANDOM), None)
        return {"zx": zx, "runs": runs, "random": rnd}

    def stage_outcome(self, stage: str) -> StageOutcome | None:
        return next((s for s in self.stages if s.stage == stage), None)

    def to_json_obj(self) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "status": "equivalent" if self.equivalent else "not_equivalent",
            "verdict": self.status,
            "proof": {
                EQUIVALENT_SYMBOLIC: "zx-symbolic",
                EQUIVALENT_PROBABILISTIC: "random-instantiation",
                NON_EQUIVALENT: "counterexample",
            }[self.status],
            "stage": self.stage,
            "runs": self.runs,
            "seed": self.seed,
            "zx": {"rules_applied": dict(sorted(self.zx_rules.items())), "spiders_remaining": self.zx_spiders},
            "timings_ms": self.timings_ms(),
            "stages": [
                {
                    "stage": s.stage,
                    "conclusive": s.conclusive,
                    "timed_out": s.timed_out,
                    "oracle": s.result.method if s.result is not None else None,
                    "rows_satisfied": s.satisfied,
                    "rows": s.rows,
                }
                for s in self.stages
            ],
        }
        if self.witness is not None:
            obj["witness"] = self.witness.to_json_obj()
        if self.permutation is not None:
            obj["zx"]["permutation"] = list(self.permutation)
        if self.config is not None:
            obj["config"] = self.config.to_dict()
        return obj


class StageTimeout(Exception):
    pass


class ResourceLimitError(RuntimeError):
    """The final random run exceeded its time budget, so no verdict exists."""


def _run_with_timeout(fn: Callable[[], T], timeout: float | None) -> T:
    """Run ``fn`` in a daemon thread; raise :class:`StageTimeout` past ``timeout``.

    A timed-out stage keeps running in the background until it returns; its
    result is discarded.
    """
    if timeout is None:
        return fn()
    box: dict[str, Any] = {}

    def target():
        try:
            box["value"] = fn()
        except BaseException as exc:  # re-raised in the caller
            box["error"] = exc

    th = threading.Thread(target=target, daemon=True)
    th.start()
    th.join(timeout)
    if th.is_alive():
        raise StageTimeout
    if "error" in box:
        raise box["error"]
    return box["value"]


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000.0


def zx_stage(g: Circuit, g2: Circuit, cfg: CheckConfig, trace: list | None = None):
    """Simplify ``G^-1 G'``; return (diagram, identity result, report)."""
    d = circuit_to_graph_like(concatenate(inverse(g), g2))
    d.trace = trace
    report = SimplifyReport()
    full_simplify(d, cfg.max_rounds, report)
    return d, is_identity(d), report


def _oracle_on(g: Circuit, g2: Circuit, sigma: Assignment, cfg: OracleConfig) -> tuple[EquivalenceResult, float]:
    a, b = g.instantiate(sigma.values), g2.instantiate(sigma.values)
    t0 = time.perf_counter()
    res = oracle_equiv(a, b, cfg)
    return res, _ms(t0)


def check(g: Circuit, g2: Circuit, cfg: CheckConfig | None = None) -> Verdict:
    """Decide whether ``g`` and ``g2`` agree up to global phase for all assignments."""
    cfg = cfg or CheckConfig()
    if g.width != g2.width:
        raise CircuitError(f"width mismatch: {g.width} vs {g2.width}")
    verdict = Verdict(NON_EQUIVALENT, STAGE_ZX, cfg.seed, cfg.runs, config=cfg)

    if not cfg.skip_zx:
        t0 = time.perf_counter()
        try:
            d, ident, _ = _run_with_timeout(lambda: zx_stage(g, g2, cfg), cfg.timeout_per_stage)
            verdict.zx_rules = dict(d.rule_counts)
            verdict.zx_spiders = d.num_spiders()
            verdict.permutation = ident.permutation
            proved = ident.is_identity or (cfg.allow_permutation and ident.is_wiring)
            verdict.stages.append(StageOutcome(STAGE_ZX, proved, _ms(t0)))
            if proved:
                verdict.status, verdict.stage = EQUIVALENT_SYMBOLIC, STAGE_ZX
                return verdict
        except StageTimeout:
            verdict.stages.append(StageOutcome(STAGE_ZX, False, _ms(t0), timed_out=True))

    for i in range(cfg.runs):
        stage = targeted_stage(i)
        t0 = time.perf_counter()
        try:
            def targeted(i=i):
                system = collect_system(g, g2, target_schedule(i))
                sigma, sat = greedy_solve(system)
                res, oms = _oracle_on(g, g2, sigma, cfg.oracle(i + 1))
                return system, sigma, sat, res, oms

            system, sigma, sat, res, oms = _run_with_timeout(targeted, cfg.timeout_per_stage)
        except StageTimeout:
            verdict.stages.append(StageOutcome(stage, False, _ms(t0), timed_out=True))
            continue
        out = StageOutcome(stage, not res.equivalent, _ms(t0), sigma, res, len(sat), len(system), oracle_ms=oms)
        verdict.stages.append(out)
        if not res.equivalent:
            verdict.stage, verdict.witness = stage, sigma
            return verdict

    # the random run is never skipped, so the flow always ends with a verdict
    t0 = time.perf_counter()
    params = list(dict.fromkeys([*g.params, *g2.params]))
    sigma = random_assignment(params, cfg.seed)
    try:
        res, oms = _run_with_timeout(lambda: _oracle_on(g, g2, sigma, cfg.oracle(0)), cfg.timeout_per_stage)
    except StageTimeout:
        raise ResourceLimitError(f"random run exceeded {cfg.timeout_per_stage} s") from None
    verdict.stages.append(StageOutcome(STAGE_RANDOM, True, _ms(t0), sigma, res, oracle_ms=oms))
    verdict.stage = STAGE_RANDOM
    if res.equivalent:
        verdict.status = EQUIVALENT_PROBABILISTIC
    else:
        verdict.status, verdict.witness = NON_EQUIVALENT, sigma
    return verdict


def check_report(verdict: Verdict, indent: int | None = 2) -> str:
    return json.dumps(verdict.to_json_obj(), indent=indent, sort_keys=False)


class EquivalenceChecker:
    """Reusable checker configuration.

    >>> EquivalenceChecker(runs=3).get_params()["runs"]
    3
    """

    def __init__(self, **params: Any):
        self.config = CheckConfig(**params)

    def get_params(self) -> dict[str, Any]:
        return self.config.to_dict()

    def check(self, g: Circuit, g2: Circuit) -> Verdict:
        return check(g, g2, self.config)
