"""Command-line front end.

``qflfactor factor N``   run the pipeline and report the factors
``qflfactor inspect N``  show the multiplication table, clauses and simplification trace
``qflfactor circuit N``  write the QFL circuit as OpenQASM 2.0
``qflfactor verify``     run the built-in self-checks

Exit codes: 0 success, 1 invalid input (even N, N < 9, bad arguments) or
capacity exceeded, 2 no factors found.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .checks import SWEEP_GENERIC_MAX_VARS, SWEEP_MAX_QUBITS, run_all
from .circuit import depth, export_qasm, gate_counts
from .errors import CapacityExceeded, EvenInput, TooManyVariables, TooSmall, Unsatisfiable
from .problem import FactorInstance, build_multiplication_table, estimate_bit_lengths, generate_clauses
from .search import SearchResult, VqsConfig, factor
from .simplify import format_trace, simplify
from .simulator import MAX_QUBITS
from .synthesis import GENERIC_MAX_VARS, synth_qfl

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_NONE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {value}")
    return value


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("N", type=_positive_int, help="odd biprime to factor")
    p.add_argument("--trial-division", action="store_true", help="prune bit-length candidates by trial division")
    p.add_argument("--max-qubits", type=int, default=MAX_QUBITS, help=f"circuit size cap (default {MAX_QUBITS})")
    p.add_argument(
        "--generic-max-vars",
        type=int,
        default=GENERIC_MAX_VARS,
        help=f"variable cap for truth-table modules (default {GENERIC_MAX_VARS})",
    )
    p.add_argument("--clean", action="store_true", help="uncompute ancillas in every module, including the last")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qflfactor", description="Factor odd biprimes with quantum feasibility labeling.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("factor", help="run the full pipeline")
    _add_pipeline_flags(p)
    p.add_argument("--method", choices=("exhaustive", "vqs"), default="exhaustive")
    p.add_argument("--seed", type=int, default=0, help="seed for the variational search")
    p.add_argument("--json", action="store_true", help="print the run report as JSON")
    p.add_argument("--dump-trace", action="store_true", help="include the simplification trace")
    p.add_argument("--out", type=Path, help="also write the JSON report to this file")

    p = sub.add_parser("inspect", help="show table, clauses and simplification trace")
    _add_pipeline_flags(p)
    p.add_argument("--bits", type=int, nargs=2, metavar=("NP", "NQ"), help="bit lengths to inspect")

    p = sub.add_parser("circuit", help="write the QFL circuit as OpenQASM 2.0")
    _add_pipeline_flags(p)
    p.add_argument("--bits", type=int, nargs=2, metavar=("NP", "NQ"), help="bit lengths to synthesize")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")

    p = sub.add_parser("verify", help="run the built-in self-checks")
    p.add_argument("--sweep-limit", type=int, default=256, help="oracle sweep covers odd biprimes below this")
    return parser


def _run_factor(args, **overrides) -> SearchResult | None:
    kwargs = dict(
        method=getattr(args, "method", "exhaustive"),
        seed=getattr(args, "seed", 0),
        trial_division=args.trial_division,
        max_qubits=args.max_qubits,
        generic_max_vars=args.generic_max_vars,
        clean=args.clean,
    )
    kwargs.update(overrides)
    kwargs["config"] = VqsConfig(seed=kwargs["seed"])
    return factor(args.N, **kwargs)


def build_report(N: int, result: SearchResult | None, method: str, seed: int, trace: bool = False) -> dict:
    """JSON-ready run report (schema version 1)."""
    report: dict = {"schema": SCHEMA_VERSION, "N": N, "method": method, "seed": seed}
    if result is None:
        report["chosen"] = None
        return report
    reduced = result.reduced
    report["chosen"] = [result.n_p, result.n_q]
    report["attempts"] = [{"n_p": a, "n_q": b, "outcome": o} for a, b, o in result.attempts]
    report["bindings"] = {str(b.variable): b.value if b.is_constant else str(b.value) for b in reduced.bindings}
    report["residual"] = [str(c) for c in reduced.residual]
    report["variables"] = [str(v) for v in result.variables]
    report["pinned"] = {str(v): b for v, b in sorted(reduced.pinned.items())}
    report["feasible"] = [list(a) for a in result.feasible]
    if result.circuit is not None:
        report["circuit"] = {
            "qubits": result.circuit.n_qubits,
            "depth": depth(result.circuit),
            "gates": gate_counts(result.circuit),
            "modules": [m.shape for m in result.layout.modules],
        }
    else:
        report["circuit"] = None
    report["search"] = {k: v for k, v in result.stats.items() if k not in ("qubits", "depth", "gates", "modules")}
    if result.factors:
        report["factors"] = list(result.factors[0])
    if trace:
        report["trace"] = [str(s) for s in result.trace]
    return report


def _render_text(report: dict, result: SearchResult | None) -> str:
    N = report["N"]
    if "factors" not in report:
        return f"{N}: no factors found"
    p, q = report["factors"]
    lines = [f"{N} = {p} x {q}"]
    n_p, n_q = report["chosen"]
    lines.append(f"bit lengths: n_p={n_p}, n_q={n_q}")
    lines.append("residual clauses:")
    lines += [f"  {c}" for c in report["residual"]] or ["  (none)"]
    if report["circuit"]:
        c = report["circuit"]
        gates = ", ".join(f"{k}={v}" for k, v in sorted(c["gates"].items()))
        lines.append(f"circuit: {c['qubits']} qubits, depth {c['depth']}, gates {gates}")
    names = report["variables"]
    if names:
        lines.append("feasible (" + ", ".join(names) + "):")
        lines += ["  " + " ".join(map(str, a)) for a in report["feasible"]]
    if "trace" in report:
        lines.append("simplification trace:")
        lines += [f"  {s}" for s in report["trace"]]
    return "\n".join(lines)


def cmd_factor(args) -> int:
    result = _run_factor(args)
    report = build_report(args.N, result, args.method, args.seed, args.dump_trace)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        args.out.write_text(text + "\n")
    print(text if args.json else _render_text(report, result))
    return EXIT_OK if "factors" in report else EXIT_NONE


def _pick_bits(args) -> tuple[int, int]:
    if getattr(args, "bits", None):
        return tuple(args.bits)
    result = _run_factor(args)
    if result is not None:
        return result.n_p, result.n_q
    return estimate_bit_lengths(args.N, args.trial_division).candidates[0]


def cmd_inspect(args) -> int:
    FactorInstance(args.N)
    plan = estimate_bit_lengths(args.N, args.trial_division)
    try:
        n_p, n_q = _pick_bits(args)
    except (CapacityExceeded, TooManyVariables):
        n_p, n_q = plan.candidates[0]
    table = build_multiplication_table(n_p, n_q, args.N)
    raw = generate_clauses(table, args.N)
    out = [f"N = {args.N} ({args.N:b})"]
    out.append("bit-length candidates: " + ", ".join(f"({a},{b})" for a, b in plan.candidates))
    out.append(f"inspecting n_p={n_p}, n_q={n_q}")
    out += ["", "multiplication table:", table.render()]
    out += ["", "raw clauses:"]
    out += [f"  {v} = {b}  (most significant bit)" for v, b in raw.fixed]
    out += [f"  {c}" for c in raw.clauses]
    out += ["", "simplification trace:"]
    try:
        reduced, trace = simplify(raw)
    except Unsatisfiable as exc:
        out.append(f"  unsatisfiable: {exc}")
        print("\n".join(out))
        return EXIT_NONE
    out += [f"  {line}" for line in format_trace(trace).splitlines()]
    out += ["", "bindings:"] + [f"  {b}" for b in reduced.bindings]
    out += ["", "residual:"] + ([f"  {c}" for c in reduced.residual] or ["  (none)"])
    print("\n".join(out))
    return EXIT_OK


def cmd_circuit(args) -> int:
    FactorInstance(args.N)
    n_p, n_q = _pick_bits(args)
    table = build_multiplication_table(n_p, n_q, args.N)
    reduced, _ = simplify(generate_clauses(table, args.N))
    if not reduced.residual:
        print(f"{args.N}: simplification fixes every variable; no circuit needed", file=sys.stderr)
        return EXIT_NONE
    circuit, _ = synth_qfl(
        reduced, clean=args.clean, max_qubits=args.max_qubits, generic_max_vars=args.generic_max_vars
    )
    qasm = export_qasm(circuit)
    if args.out:
        args.out.write_text(qasm)
        print(f"wrote {args.out}: {circuit.n_qubits} qubits, depth {depth(circuit)}", file=sys.stderr)
    else:
        sys.stdout.write(qasm)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_all(args.sweep_limit)
    width = max(len(r.name) for r in results)
    print(f"{'suite':<{width}}  cases  result")
    for r in results:
        print(f"{r.name:<{width}}  {r.cases:>5}  {'pass' if r.ok else 'FAIL'}")
        for f in r.failures[:10]:
            print(f"    {f}")
    print(f"(sweep caps: {SWEEP_MAX_QUBITS} qubits, {SWEEP_GENERIC_MAX_VARS} generic variables)")
    return EXIT_OK if all(r.ok for r in results) else EXIT_INPUT


COMMANDS = {"factor": cmd_factor, "inspect": cmd_inspect, "circuit": cmd_circuit, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except EvenInput as exc:
        print(f"error: even input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TooSmall as exc:
        print(f"error: input too small: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CapacityExceeded, TooManyVariables) as exc:
        print(f"error: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
