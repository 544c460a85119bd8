"""Command line interface: ``qfactor {factorize,reduce,spectrum,emit-qasm,tomography} N``.

Exit codes: 0 success, 1 usage error, 2 prime input or no feasible layout,
3 a decoded result failed verification.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import pipeline
from .compiler import dump_circuit_json, export_qasm, lower
from .eqgen import EquationSyntaxError, LayoutError, format_system
from .hamiltonian import FactorizationError
from .polynomial import format_poly
from .searchplan import NoSolutionError, plan as make_plan
from .simulator import dump_state_json
from .tomography import format_density

EXIT_USAGE = 1
EXIT_NO_LAYOUT = 2
EXIT_VERIFY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bits(text: str) -> List[int]:
    try:
        out = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if any(b < 0 for b in out):
        raise argparse.ArgumentTypeError("bit counts must be non-negative")
    return out


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("N", type=int, help="integer to factor")
    common.add_argument("--equations", metavar="FILE", help="equation file, or the name of a bundled one (175, 4088459, 966887)")
    common.add_argument("--bits", type=_bits, metavar="m,n", help="interior bit counts of the factors")
    common.add_argument("--mode", choices=("exact", "paper"), default="exact", help="search parameter rule (default exact)")
    common.add_argument("--theta", type=float, metavar="X", help="override the oracle angle (radians)")
    common.add_argument("--baseline", type=float, metavar="E", help="override the baseline eigenvalue")
    common.add_argument("--oracle", choices=("compiled", "ideal"), default="compiled",
                        help="simulate the compiled gate oracle or the ideal marking phase (default compiled)")
    common.add_argument("--shots", type=_positive, default=8192, metavar="K", help="measurement shots (default 8192)")
    common.add_argument("--seed", type=int, metavar="R", help="sampling seed")
    common.add_argument("--json", metavar="FILE", help="write a JSON report")
    common.add_argument("--deterministic", action="store_true", help="omit wall-clock time from reports")

    parser = _Parser(prog="qfactor", description="Factor small integers with a simulated exact quantum search.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("factorize", parents=[common], help="run the full pipeline")
    p.add_argument("--emit-qasm", metavar="FILE", help="also write the lowered search circuit as OpenQASM 2.0")
    p.add_argument("--tomography", action="store_true", help="reconstruct the final state by simulated tomography")
    p.add_argument("--histogram", metavar="FILE", help="write the measurement histogram as CSV")
    p.add_argument("--state", metavar="FILE", help="write the final amplitudes as JSON")

    p = sub.add_parser("reduce", parents=[common], help="print the reduced equations")
    p = sub.add_parser("spectrum", parents=[common], help="eigenvalues and oracle phases as CSV")
    p.add_argument("--csv", metavar="FILE", help="write the table here instead of stdout")

    p = sub.add_parser("emit-qasm", parents=[common], help="print the lowered search circuit")
    p.add_argument("--emit-qasm", metavar="FILE", help="write the QASM here instead of stdout")
    p.add_argument("--circuit-json", metavar="FILE", help="also write the unlowered circuit as JSON")

    p = sub.add_parser("tomography", parents=[common], help="simulated state tomography of the final state")
    return parser


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _dump(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _warn_clamped(plan):
    if plan.clamped:
        print(
            "warning: no real marking phase exists for one iteration; "
            "mu was clamped to pi and the search is not exact",
            file=sys.stderr,
        )


def _prepare(args):
    inst = pipeline.prepare(args.N, args.equations, args.bits)
    plan = make_plan(inst.spectrum, args.mode, theta=args.theta, baseline=args.baseline)
    return inst, plan


def cmd_factorize(args) -> int:
    report, art = pipeline.factorize(
        args.N,
        mode=args.mode,
        shots=args.shots,
        seed=args.seed,
        equations=args.equations,
        bits=args.bits,
        theta=args.theta,
        baseline=args.baseline,
        oracle=args.oracle,
        tomography=args.tomography,
        deterministic=args.deterministic,
    )
    plan = art["plan"]
    _warn_clamped(plan)
    lay = report["layout"]
    print(f"N = {args.N}  layout: interior bits {','.join(map(str, lay['bits']))}")
    red = report["reduction"]
    print(f"reduction: {red['variables']} variables, {red['fixed']} fixed, "
          f"{red['substituted']} substituted, {len(red['free'])} free {red['free']}")
    print(f"plan: mode {plan.mode}, j = {plan.j}, theta = {plan.theta!r}, mu = {plan.mu!r}, M = {plan.M}")
    for s in report["solutions"]:
        print(f"  P({s['state']}) = {s['probability']:.6f}  -> {' x '.join(map(str, s['factors']))}")
    print(f"success probability {report['success_probability']:.6f}")
    top = art["histogram"].most_common(4)
    print("most frequent outcomes: " + ", ".join(f"{art['histogram'].label(b)}:{c}" for b, c in top))
    factors = report["factors"]
    twos = ["2"] * report["twos"]
    print(f"factors: {' x '.join(twos + [str(f) for f in factors])}")
    if report["tomography"] is not None:
        print(f"tomography fidelity {report['tomography']['fidelity']:.6f}")
        print(format_density(art["rho_estimate"]), end="")
    if args.json:
        _write(args.json, _dump(report))
    if args.emit_qasm:
        _write(args.emit_qasm, export_qasm(lower(art["circuit"])))
    if args.histogram:
        _write(args.histogram, art["histogram"].to_csv())
    if args.state:
        _write(args.state, dump_state_json(art["state"]))
    return 0


def cmd_reduce(args) -> int:
    inst = pipeline.prepare(args.N, args.equations, args.bits)
    red = inst.reduction
    print(f"N = {args.N}  layout: interior bits {','.join(map(str, inst.layout.bits))}  source {inst.source}")
    for v, val in red.fixed.items():
        print(f"{v} = {val}")
    for v, expr in red.substitutions.items():
        print(f"{v} = {format_poly(expr)}")
    if not red.residual.equations:
        print("trivial layout: empty residual")
    else:
        print(format_system(red.residual), end="")
    if args.json:
        report = {
            "schema_version": pipeline.SCHEMA_VERSION,
            "N": args.N,
            "layout": {"N": inst.layout.N, "bits": list(inst.layout.bits), "twos": inst.layout.twos},
            "fixed": red.fixed,
            "substitutions": {v: format_poly(e) for v, e in red.substitutions.items()},
            "free": list(red.free_order),
            "residual": [str(eq) + " = 0" for eq in red.residual.equations],
        }
        _write(args.json, _dump(report))
    return 0


def cmd_spectrum(args) -> int:
    inst, plan = _prepare(args)
    _warn_clamped(plan)
    _write(args.csv, pipeline.spectrum_csv(inst, plan))
    if args.json:
        report = {
            "schema_version": pipeline.SCHEMA_VERSION,
            "N": args.N,
            "plan": plan.to_dict(),
            "rows": pipeline.spectrum_rows(inst, plan),
        }
        _write(args.json, _dump(report))
    return 0


def cmd_emit_qasm(args) -> int:
    inst, plan = _prepare(args)
    _warn_clamped(plan)
    circuit = pipeline.search_circuit(inst, plan)
    _write(args.emit_qasm, export_qasm(lower(circuit)))
    if args.circuit_json:
        _write(args.circuit_json, dump_circuit_json(circuit) + "\n")
    return 0


def cmd_tomography(args) -> int:
    inst, plan = _prepare(args)
    _warn_clamped(plan)
    state = pipeline.final_state(inst, plan, args.oracle)
    seed = pipeline.resolve_seed(args.seed)
    report, art = pipeline.run_tomography(state, args.shots, seed)
    print("reconstructed density matrix:")
    print(format_density(art["rho_estimate"]), end="")
    print(f"fidelity {report['fidelity']:.6f}")
    if args.json:
        report = {"schema_version": pipeline.SCHEMA_VERSION, "N": args.N, "seed": seed, **report}
        _write(args.json, _dump(report))
    return 0


COMMANDS = {
    "factorize": cmd_factorize,
    "reduce": cmd_reduce,
    "spectrum": cmd_spectrum,
    "emit-qasm": cmd_emit_qasm,
    "tomography": cmd_tomography,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (pipeline.NoLayoutError, NoSolutionError, LayoutError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_LAYOUT
    except (pipeline.VerificationError, FactorizationError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (FileNotFoundError, EquationSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
