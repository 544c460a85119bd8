"""End-to-end factorization runs and their JSON reports."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from sympy import isprime

from .compiler import Circuit, assemble_search
from .eqgen import (
    EquationSystem,
    FactorLayout,
    LayoutError,
    generate_biprime_system,
    infer_layout,
    layout_candidates,
    parse_equations,
    strip_twos,
)
from .hamiltonian import (
    MAX_QUBITS,
    DiagonalSpectrum,
    FactorizationError,
    ZHamiltonian,
    build_hamiltonian,
    decode_factors,
    diagonal,
)
from .searchplan import SearchPlan, plan as make_plan
from .simplify import InfeasibleSystemError, ReducedSystem, reduce
from .simulator import CountHistogram, StateVector, run, run_ideal_search, sample
from . import tomography as tomo

SCHEMA_VERSION = "1.0"
MAX_TOMOGRAPHY_QUBITS = 6


class NoLayoutError(ValueError):
    """``N`` is prime, too small, or no layout admits a solution."""


class VerificationError(RuntimeError):
    """A decoded result failed its consistency check."""


@dataclass
class Instance:
    N: int
    system: EquationSystem
    layout: FactorLayout
    reduction: ReducedSystem
    hamiltonian: ZHamiltonian
    spectrum: DiagonalSpectrum
    source: str
    tried: List[dict]

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits


def bundled_equations() -> List[str]:
    return sorted(p.name for p in resources.files("qfactor.data").iterdir() if p.name.endswith(".eqs"))


def read_equations(name: str) -> tuple[str, str]:
    """Text of an equation file.  Bundled files can be named by file name or stem."""
    path = Path(name)
    if path.is_file():
        return path.read_text(), str(path)
    stem = path.name if path.name.endswith(".eqs") else path.name + ".eqs"
    data = resources.files("qfactor.data").joinpath(stem)
    if data.is_file():
        return data.read_text(), f"bundled:{stem}"
    raise FileNotFoundError(f"no equation file {name!r} (bundled: {', '.join(bundled_equations())})")


def _finish(N, system, layout, source, tried) -> Instance:
    red = reduce(system)
    if red.n_qubits > MAX_QUBITS:
        raise NoLayoutError(f"{red.n_qubits} free variables exceed the {MAX_QUBITS}-qubit limit")
    h = build_hamiltonian(red.residual.equations, red.free_order)
    return Instance(N, system, layout, red, h, diagonal(h), source, tried)


def prepare(N: int, equations: Optional[str] = None, bits: Optional[Sequence[int]] = None) -> Instance:
    """Build, reduce and encode the problem for ``N``.

    Without ``equations`` the two-factor layouts of :func:`layout_candidates`
    are tried in order (or only ``bits`` if given) and the first feasible one
    is used.
    """
    if N < 2:
        raise NoLayoutError(f"{N} has no factors to find")
    odd, twos = strip_twos(N)
    if equations is not None:
        text, source = read_equations(equations)
        system = parse_equations(text)
        if bits:
            layout = FactorLayout(odd, tuple(bits), twos)
        else:
            layout = infer_layout(N, system.variables)
        system.layout = layout
        try:
            return _finish(N, system, layout, source, [])
        except InfeasibleSystemError as exc:
            raise NoLayoutError(f"equations in {source} have no solution") from exc
    if odd < 9 or isprime(odd):
        what = "prime" if isprime(N) else f"odd part {odd} is prime or 1"
        raise NoLayoutError(f"{N}: {what}; nothing to search")
    candidates = [tuple(bits)] if bits else layout_candidates(odd)
    tried = []
    for m, n in candidates:
        try:
            system = generate_biprime_system(N, m, n)
        except LayoutError as exc:
            tried.append({"bits": [m, n], "result": str(exc)})
            continue
        try:
            inst = _finish(N, system, system.layout, "generated", tried)
        except InfeasibleSystemError:
            tried.append({"bits": [m, n], "result": "infeasible"})
            continue
        tried.append({"bits": [m, n], "result": "feasible"})
        return inst
    raise NoLayoutError(f"no feasible factor layout for {N}")


def resolve_seed(seed: Optional[int]) -> int:
    """``seed`` itself, or a fresh one drawn from OS entropy so the report can replay it."""
    if seed is not None:
        return seed
    return int(np.random.SeedSequence().entropy % (1 << 63))


def search_circuit(inst: Instance, plan: SearchPlan) -> Circuit:
    return assemble_search(inst.hamiltonian, plan)


def final_state(inst: Instance, plan: SearchPlan, oracle: str = "compiled") -> StateVector:
    if oracle == "ideal":
        return run_ideal_search(inst.spectrum, plan)
    if oracle != "compiled":
        raise ValueError(f"unknown oracle {oracle!r}")
    return run(search_circuit(inst, plan))


def _label(n: int, b: int) -> str:
    return format(b, f"0{n}b") if n else ""


def _terms(h: ZHamiltonian) -> dict:
    return {label: str(c) for label, c in h.labels().items()} if h.n_qubits else {"": str(h.identity)}


def spectrum_rows(inst: Instance, plan: SearchPlan) -> List[dict]:
    """Eigenvalue and oracle phase of every basis state.

    The phase is measured relative to the baseline class, in units of theta
    and in radians.
    """
    sp = inst.spectrum
    E_b = Fraction(plan.baseline_eigenvalue).limit_denominator(1 << 20)
    rows = []
    for b in range(1 << sp.n_qubits):
        E = sp.exact(b)
        rows.append({
            "state": _label(sp.n_qubits, b),
            "eigenvalue": str(E),
            "phase_over_theta": str(E_b - E),
            "phase_rad": (plan.baseline_eigenvalue - float(E)) * plan.theta,
        })
    return rows


def spectrum_csv(inst: Instance, plan: SearchPlan) -> str:
    lines = ["state,eigenvalue,phase_over_theta,phase_rad"]
    for r in spectrum_rows(inst, plan):
        lines.append(f"{r['state']},{r['eigenvalue']},{r['phase_over_theta']},{r['phase_rad']!r}")
    return "\n".join(lines) + "\n"


def decode_outcomes(inst: Instance, hist: CountHistogram) -> Optional[List[int]]:
    """Factors from the most frequent outcome that decodes to a valid factorization."""
    for b, _ in hist.most_common():
        try:
            return decode_factors(b, inst.reduction, inst.layout)
        except FactorizationError:
            continue
    return None


def factorize(
    N: int,
    *,
    mode: str = "exact",
    shots: int = 8192,
    seed: Optional[int] = None,
    equations: Optional[str] = None,
    bits: Optional[Sequence[int]] = None,
    theta: Optional[float] = None,
    baseline: Optional[float] = None,
    oracle: str = "compiled",
    tomography: bool = False,
    deterministic: bool = False,
) -> tuple[dict, dict]:
    """Run the whole pipeline.  Returns ``(report, artifacts)``.

    ``artifacts`` holds the non-JSON objects (state, histogram, circuit, ...)
    for callers that want to write them out.
    """
    start = time.perf_counter()
    seed = resolve_seed(seed)
    inst = prepare(N, equations, bits)
    plan = make_plan(inst.spectrum, mode, theta=theta, baseline=baseline)
    circuit = search_circuit(inst, plan)
    state = final_state(inst, plan, oracle)
    hist = sample(state, shots, seed)
    factors = decode_outcomes(inst, hist)
    if factors is None:
        raise VerificationError("no measured outcome decodes to a factorization of N")
    if math.prod(factors) << inst.layout.twos != N:
        raise VerificationError(f"factors {factors} do not multiply to {N}")

    n = inst.n_qubits
    probs = state.probabilities()
    ground = inst.spectrum.ground_states
    solutions = []
    for b in ground:
        solutions.append({
            "state": _label(n, b),
            "factors": decode_factors(b, inst.reduction, inst.layout),
            "probability": float(probs[b]),
        })
    report = {
        "schema_version": SCHEMA_VERSION,
        "N": N,
        "source": inst.source,
        "layout": {"N": inst.layout.N, "bits": list(inst.layout.bits), "twos": inst.layout.twos},
        "layouts_tried": inst.tried,
        "reduction": {
            "variables": len(inst.reduction.original_variables),
            "fixed": len(inst.reduction.fixed),
            "substituted": len(inst.reduction.substitutions),
            "free": list(inst.reduction.free_order),
            "residual": [str(eq) + " = 0" for eq in inst.reduction.residual.equations],
        },
        "hamiltonian": {"n_qubits": n, "terms": _terms(inst.hamiltonian)},
        "plan": plan.to_dict(),
        "oracle": oracle,
        "circuit": {"gates": len(circuit), "ops": circuit.count_ops(), "global_phase": circuit.global_phase},
        "probabilities": {_label(n, b): float(p) for b, p in enumerate(probs) if p >= 1e-12},
        "success_probability": float(sum(probs[b] for b in ground)),
        "solutions": solutions,
        "shots": shots,
        "seed": seed,
        "counts": {_label(n, b): c for b, c in hist.counts.items()},
        "factors": sorted(factors),
        "twos": inst.layout.twos,
        "tomography": None,
        "wall_time": None,
    }
    artifacts = {"instance": inst, "plan": plan, "circuit": circuit, "state": state, "histogram": hist}
    if tomography:
        tomo_report, tomo_art = run_tomography(state, shots, seed)
        report["tomography"] = tomo_report
        artifacts.update(tomo_art)
    if not deterministic:
        report["wall_time"] = time.perf_counter() - start
    return report, artifacts


def run_tomography(state: StateVector, shots: int, seed: Optional[int]) -> tuple[dict, dict]:
    if state.n_qubits > MAX_TOMOGRAPHY_QUBITS:
        raise NoLayoutError(f"tomography is limited to {MAX_TOMOGRAPHY_QUBITS} qubits")
    rhoT = tomo.theoretical_density(state)
    rhoE = tomo.reconstruct(tomo.measure_all(state, shots, seed))
    F = tomo.fidelity(rhoT, rhoE)
    report = {
        "shots_per_setting": shots,
        "settings": 3 ** state.n_qubits,
        "fidelity": F,
        "rho_theory": tomo.density_to_dict(rhoT),
        "rho_estimate": tomo.density_to_dict(rhoE),
    }
    return report, {"rho_theory": rhoT, "rho_estimate": rhoE}


def report_schema() -> dict:
    """JSON schema of the ``factorize`` report."""
    import json

    return json.loads(resources.files("qfactor.schemas").joinpath("run_report.schema.json").read_text())
