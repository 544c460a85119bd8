"""Dense state-vector simulation and seeded sampling.

Amplitude index ``b`` is read with qubit 0 as its most significant bit, the
same convention as :mod:`qfactor.hamiltonian`.  Internally the amplitudes are
viewed as an ``n``-dimensional ``2 x 2 x ... x 2`` array so a gate on qubit
``q`` acts on axis ``q`` through strided views, never materializing a full
matrix.

Sampling contract: ``numpy.random.Generator(PCG64(seed))`` draws ``shots``
uniforms with ``random()`` and maps each through the inverse CDF of the
probabilities (``searchsorted(cumsum(p), u, side="right")``).  Any histogram
produced with a given seed depends only on that algorithm and the state.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Union

import numpy as np

from .compiler import Circuit, Gate
from .hamiltonian import MAX_QUBITS, DiagonalSpectrum
from .searchplan import SearchPlan

Seed = Union[int, Sequence[int], None]
PRNG_NAME = "numpy.PCG64/inverse-cdf/v1"

_SQRT_HALF = 1 / math.sqrt(2)


class StateVector:
    """``2**n`` complex amplitudes."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: Optional[np.ndarray] = None):
        if n_qubits < 0 or n_qubits > MAX_QUBITS:
            raise ValueError(f"qubit count {n_qubits} outside [0, {MAX_QUBITS}]")
        self.n_qubits = n_qubits
        if amplitudes is None:
            amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
            amplitudes[0] = 1
        else:
            amplitudes = np.array(amplitudes, dtype=np.complex128).reshape(-1)
            if amplitudes.size != 1 << n_qubits:
                raise ValueError(f"expected {1 << n_qubits} amplitudes, got {amplitudes.size}")
        self.amplitudes = amplitudes

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        return cls(n)

    @classmethod
    def uniform(cls, n: int) -> "StateVector":
        return cls(n, np.full(1 << n, 2 ** (-n / 2), dtype=np.complex128))

    @classmethod
    def basis(cls, n: int, b: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[b] = 1
        return cls(n, amps)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def tensor(self) -> np.ndarray:
        # trailing unit axis keeps fully indexed slices as writable views
        return self.amplitudes.reshape((2,) * self.n_qubits + (1,))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities())))

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def label(self, b: int) -> str:
        return format(b, f"0{self.n_qubits}b") if self.n_qubits else ""


def _slice(n: int, fixed: Dict[int, int]) -> tuple:
    idx = [slice(None)] * (n + 1)
    for q, v in fixed.items():
        idx[q] = v
    return tuple(idx)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply ``gate`` in place and return ``state``."""
    n = state.n_qubits
    if any(q >= n for q in gate.qubits):
        raise ValueError(f"{gate} does not fit {n} qubits")
    t = state.tensor()
    kind = gate.kind
    if kind in ("H", "X", "RZ"):
        q = gate.qubits[0]
        a0 = t[_slice(n, {q: 0})]
        a1 = t[_slice(n, {q: 1})]
        if kind == "H":
            s = a0 + a1
            a1 -= a0
            a1 *= -_SQRT_HALF
            a0[...] = s * _SQRT_HALF
        elif kind == "X":
            tmp = a0.copy()
            a0[...] = a1
            a1[...] = tmp
        else:
            a0 *= np.exp(-0.5j * gate.angle)
            a1 *= np.exp(0.5j * gate.angle)
    elif kind == "CNOT":
        c, tq = gate.qubits
        a0 = t[_slice(n, {c: 1, tq: 0})]
        a1 = t[_slice(n, {c: 1, tq: 1})]
        tmp = a0.copy()
        a0[...] = a1
        a1[...] = tmp
    else:  # CPHASE, NCPHASE
        t[_slice(n, {q: 1 for q in gate.qubits})] *= np.exp(1j * gate.angle)
    return state


def run(circuit: Circuit, initial: Optional[StateVector] = None) -> StateVector:
    """Final state of ``circuit`` including its global phase."""
    state = StateVector.zero(circuit.n_qubits) if initial is None else initial.copy()
    if state.n_qubits != circuit.n_qubits:
        raise ValueError(f"state has {state.n_qubits} qubits, circuit has {circuit.n_qubits}")
    for g in circuit.gates:
        apply_gate(state, g)
    if circuit.global_phase:
        state.amplitudes *= np.exp(1j * circuit.global_phase)
    return state


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense matrix of ``circuit`` built column by column (small circuits only)."""
    dim = 1 << circuit.n_qubits
    cols = [run(circuit, StateVector.basis(circuit.n_qubits, b)).amplitudes for b in range(dim)]
    return np.stack(cols, axis=1)


def apply_diagonal_phase(state: StateVector, spectrum: DiagonalSpectrum, theta: float) -> StateVector:
    """Exact oracle: ``a_b -> a_b exp(-i theta E(b))``."""
    if spectrum.n_qubits != state.n_qubits:
        raise ValueError("spectrum and state sizes differ")
    return StateVector(state.n_qubits, state.amplitudes * np.exp(-1j * theta * spectrum.eigenvalues))


def apply_marking_phase(state: StateVector, marked: Iterable[int], mu: float) -> StateVector:
    """Ideal oracle: ``exp(i mu)`` on the marked states only."""
    out = state.copy()
    idx = np.fromiter(marked, dtype=np.int64)
    out.amplitudes[idx] *= np.exp(1j * mu)
    return out


def _hadamard_all(state: StateVector) -> StateVector:
    for q in range(state.n_qubits):
        apply_gate(state, Gate("H", (q,)))
    return state


def run_ideal_search(spectrum: DiagonalSpectrum, plan: SearchPlan) -> StateVector:
    """The search of :func:`qfactor.compiler.assemble_search` with the ideal oracle."""
    n = spectrum.n_qubits
    ground = spectrum.ground_states
    state = _hadamard_all(StateVector.zero(n))
    for _ in range(plan.j):
        state = apply_marking_phase(state, ground, plan.mu)
        _hadamard_all(state)
        state.amplitudes[0] *= np.exp(1j * plan.mu)
        _hadamard_all(state)
    return state


def success_probability(state: StateVector, ground: Iterable[int]) -> float:
    p = state.probabilities()
    return float(sum(p[b] for b in ground))


# --------------------------------------------------------------------------
# sampling


def _seed_repr(seed: Seed):
    if seed is None or isinstance(seed, int):
        return seed
    return [int(s) for s in seed]


@dataclass
class CountHistogram:
    """Measurement counts keyed by basis index."""

    n_qubits: int
    counts: Dict[int, int]
    shots: int
    seed: Seed = None

    def __post_init__(self):
        self.counts = {int(b): int(c) for b, c in sorted(self.counts.items()) if c}
        total = sum(self.counts.values())
        if total != self.shots:
            raise ValueError(f"counts sum to {total}, expected {self.shots} shots")

    def probabilities(self) -> np.ndarray:
        p = np.zeros(1 << self.n_qubits)
        for b, c in self.counts.items():
            p[b] = c / self.shots
        return p

    def label(self, b: int) -> str:
        return format(b, f"0{self.n_qubits}b") if self.n_qubits else ""

    def most_common(self, k: Optional[int] = None):
        ranked = sorted(self.counts.items(), key=lambda bc: (-bc[1], bc[0]))
        return ranked if k is None else ranked[:k]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["state", "count", "probability"])
        for b in range(1 << self.n_qubits):
            c = self.counts.get(b, 0)
            w.writerow([self.label(b), c, repr(c / self.shots)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "shots": self.shots,
            "seed": _seed_repr(self.seed),
            "prng": PRNG_NAME,
            "counts": {self.label(b): c for b, c in self.counts.items()},
        }


def sample(state: StateVector, shots: int, seed: Seed = None) -> CountHistogram:
    """``shots`` independent computational-basis measurements of ``state``."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    cdf = np.cumsum(state.probabilities())
    u = rng.random(shots) * cdf[-1]
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)
    counts = np.bincount(idx, minlength=cdf.size)
    return CountHistogram(state.n_qubits, {b: int(c) for b, c in enumerate(counts) if c}, shots, seed)


# --------------------------------------------------------------------------
# state dump


def state_to_dict(state: StateVector) -> dict:
    return {
        "n_qubits": state.n_qubits,
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
    }


def state_from_dict(data: dict) -> StateVector:
    amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
    return StateVector(int(data["n_qubits"]), amps)


def dump_state_json(state: StateVector) -> str:
    return json.dumps(state_to_dict(state), indent=2)
