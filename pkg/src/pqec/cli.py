"""Command-line interface: ``pqec check|gen|instantiate|trace``.

Exit codes: 0 equivalent, 1 not equivalent, 2 usage or parse error,
3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .circuit import DEFAULT_DENSE_LIMIT, CircuitError, WidthLimitError, dump, dumps, load
from .densecheck import DEFAULT_STIMULI, DENSE_TOL
from .flow import SEED_ENV, CheckConfig, ResourceLimitError, check, check_report, default_seed, zx_stage
from .harness import ENTANGLEMENTS, FAMILIES, AnsatzSpec, ErrorModel, make_pair
from .instantiator import Assignment, parse_pi_multiple
from .symphase import UnboundParameterError

EXIT_EQUIVALENT = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3


class _PrintingTrace(list):
    """Rule log that echoes each entry as it is recorded."""

    def __init__(self, stream):
        super().__init__()
        self.stream = stream

    def append(self, item):
        super().append(item)
        rule, vs = item
        print(f"{rule} {' '.join(map(str, vs))}", file=self.stream)


def _add_check_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("a", type=Path, help="first circuit (.pqasm)")
    p.add_argument("b", type=Path, help="second circuit (.pqasm)")
    p.add_argument("--allow-output-permutation", action="store_true", help="accept a ZX result that is a pure wire permutation")
    p.add_argument("--max-rounds", type=int, default=10_000, help="bound on outer ZX simplification rounds (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pqec",
        description="Equivalence checking of parameterized quantum circuits.",
        epilog=f"The default seed is read from ${SEED_ENV} (0 when unset).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check two circuits for equivalence")
    _add_check_options(c)
    c.add_argument("--runs", type=int, default=2, help="targeted instantiation runs (default: %(default)s)")
    c.add_argument("--seed", type=int, default=None, help=f"seed for random stages (default: ${SEED_ENV} or 0)")
    c.add_argument("--dense-limit", type=int, default=DEFAULT_DENSE_LIMIT, help="widest circuit for dense checks (default: %(default)s)")
    c.add_argument("--stimuli", type=int, default=DEFAULT_STIMULI, help="random states for the stimuli oracle (default: %(default)s)")
    c.add_argument("--tol", type=float, default=DENSE_TOL, help="dense comparison tolerance (default: %(default)s)")
    c.add_argument("--timeout-per-stage", type=float, default=None, help="seconds per stage; a timed-out stage counts as inconclusive")
    c.add_argument("--skip-zx", action="store_true", help="start directly with instantiation")
    c.add_argument("--format", choices=("human", "json"), default="human")

    t = sub.add_parser("trace", help="run only the ZX stage and print each rewrite")
    _add_check_options(t)

    g = sub.add_parser("gen", help="generate a benchmark pair and manifest")
    g.add_argument("--family", choices=FAMILIES, default="QAOA")
    g.add_argument("--qubits", "-n", type=int, default=3)
    g.add_argument("--layers", type=int, default=1)
    g.add_argument("--entanglement", choices=ENTANGLEMENTS, default="linear")
    g.add_argument("--coupling", type=str, default=None, help="edge list like '0-1,1-2' (default: a line)")
    g.add_argument("--no-opt", action="store_true", help="skip peephole optimisation")
    g.add_argument("--flip-prob", type=float, default=0.0)
    g.add_argument("--shift-prob", type=float, default=0.0)
    g.add_argument("--shift", type=str, default="1/8", help="shift as a multiple of pi (default: %(default)s)")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", type=Path, required=True, help="output directory")

    i = sub.add_parser("instantiate", help="substitute parameter values into a circuit")
    i.add_argument("circuit", type=Path)
    i.add_argument("--assignment", type=Path, help="assignment JSON file")
    i.add_argument("--set", action="append", default=[], metavar="NAME=VALUE", help="value in radians, or a multiple of pi like 1/2*pi")
    i.add_argument("--keep-zero", action="store_true", help="keep rotations whose angle becomes zero")
    i.add_argument("-o", "--output", type=Path, default=None)
    return parser


def _seed(arg: int | None) -> int:
    return default_seed() if arg is None else arg


def _cmd_check(args) -> int:
    cfg = CheckConfig(
        runs=args.runs,
        seed=_seed(args.seed),
        allow_permutation=args.allow_output_permutation,
        dense_limit=args.dense_limit,
        stimuli=args.stimuli,
        tol=args.tol,
        timeout_per_stage=args.timeout_per_stage,
        skip_zx=args.skip_zx,
        max_rounds=args.max_rounds,
    )
    a, b = load(args.a), load(args.b)
    verdict = check(a, b, cfg)
    if args.format == "json":
        print(check_report(verdict))
    else:
        print(f"{verdict.status} at {verdict.stage}")
        for s in verdict.stages:
            extra = f" oracle={s.result.method}" if s.result is not None else ""
            extra += " (timed out)" if s.timed_out else ""
            print(f"  {s.stage}: {'conclusive' if s.conclusive else 'inconclusive'} in {s.time_ms:.1f} ms{extra}")
        if verdict.witness is not None:
            print(f"  witness: {verdict.witness.to_json()}")
    return EXIT_EQUIVALENT if verdict.equivalent else EXIT_NOT_EQUIVALENT


def _cmd_trace(args) -> int:
    cfg = CheckConfig(allow_permutation=args.allow_output_permutation, max_rounds=args.max_rounds)
    a, b = load(args.a), load(args.b)
    if a.width != b.width:
        raise CircuitError(f"width mismatch: {a.width} vs {b.width}")
    trace = _PrintingTrace(sys.stdout)
    d, ident, report = zx_stage(a, b, cfg, trace)
    print(f"rounds: {report.rounds}, rules applied: {len(trace)}")
    if ident.is_identity:
        print("identity reached")
        return EXIT_EQUIVALENT
    if ident.is_wiring:
        print(f"permutation reached: {list(ident.permutation)}")
        return EXIT_EQUIVALENT if cfg.allow_permutation else EXIT_NOT_EQUIVALENT
    print(f"residual spiders: {d.num_spiders()}")
    return EXIT_NOT_EQUIVALENT


def _parse_coupling(text: str | None):
    if text is None:
        return None
    edges = []
    for part in text.split(","):
        a, _, b = part.strip().partition("-")
        edges.append((int(a), int(b)))
    return edges


def _cmd_gen(args) -> int:
    seed = _seed(args.seed)
    spec = AnsatzSpec(args.family, args.qubits, args.layers, args.entanglement)
    coupling = _parse_coupling(args.coupling)
    model = None
    if args.flip_prob or args.shift_prob:
        model = ErrorModel(args.flip_prob, args.shift_prob, Fraction(args.shift), seed)
    pair = make_pair(spec, model, coupling, opt=not args.no_opt)
    args.out.mkdir(parents=True, exist_ok=True)
    dump(pair.original, args.out / "original.pqasm")
    dump(pair.compiled, args.out / "compiled.pqasm")
    manifest = {
        "spec": spec.to_dict(),
        "coupling": coupling if coupling is not None else "line",
        "optimized": not args.no_opt,
        "seed": seed,
        "error_model": None
        if model is None
        else {"flip_prob": model.flip_prob, "shift_prob": model.shift_prob, "shift": str(model.shift_amount)},
        "errors": [e.to_dict() for e in pair.errors],
        "ground_truth": "equivalent" if pair.equivalent else "not_equivalent",
    }
    (args.out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {args.out}/original.pqasm, compiled.pqasm, manifest.json ({manifest['ground_truth']})")
    return 0


def _cmd_instantiate(args) -> int:
    c = load(args.circuit)
    values = {}
    if args.assignment:
        values.update(Assignment.from_json(args.assignment.read_text()).values)
    for item in args.set:
        name, sep, val = item.partition("=")
        if not sep:
            raise CircuitError(f"expected NAME=VALUE, got {item!r}")
        values[name.strip()] = parse_pi_multiple(val) if "pi" in val else float(val)
    out = c.instantiate(values, drop_zero=not args.keep_zero) if c.is_parameterized() else c
    text = dumps(out)
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    handlers = {"check": _cmd_check, "trace": _cmd_trace, "gen": _cmd_gen, "instantiate": _cmd_instantiate}
    try:
        return handlers[args.command](args)
    except (ResourceLimitError, WidthLimitError, MemoryError) as exc:
        print(f"pqec: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (OSError, CircuitError, UnboundParameterError, ValueError) as exc:
        print(f"pqec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
