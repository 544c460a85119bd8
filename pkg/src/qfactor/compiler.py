"""Gate-level circuits for the phase oracle and the search iteration.

Conventions:

* ``RZ(l) = diag(exp(-i l/2), exp(i l/2))``
* ``CPHASE(l, c, t)`` multiplies ``|11>`` on ``(c, t)`` by ``exp(i l)``
* ``NCPHASE(l, controls, t)`` multiplies the all-ones state of controls and
  target by ``exp(i l)``; with no controls it is a single-qubit phase gate.

``Circuit.global_phase`` collects scalar phases dropped while compiling, so
``exp(i * global_phase) * gates`` is the intended unitary exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

from .hamiltonian import ZHamiltonian, mask_qubits
from .searchplan import SearchPlan

GATE_KINDS = ("H", "X", "RZ", "CNOT", "CPHASE", "NCPHASE")
LOWERED_KINDS = frozenset({"H", "X", "RZ", "CNOT", "CPHASE"})


class UnloweredGateError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: Tuple[int, ...]
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"repeated qubit in {self}")
        arity = {"H": 1, "X": 1, "RZ": 1, "CNOT": 2, "CPHASE": 2}.get(self.kind)
        if arity is not None and len(self.qubits) != arity:
            raise ValueError(f"{self.kind} acts on {arity} qubit(s), got {self.qubits}")
        if self.kind == "NCPHASE" and not self.qubits:
            raise ValueError("NCPHASE needs a target")

    @property
    def target(self) -> int:
        return self.qubits[-1]

    @property
    def controls(self) -> Tuple[int, ...]:
        return self.qubits[:-1]


def H(q: int) -> Gate:
    return Gate("H", (q,))


def X(q: int) -> Gate:
    return Gate("X", (q,))


def RZ(angle: float, q: int) -> Gate:
    return Gate("RZ", (q,), float(angle))


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def CPHASE(angle: float, control: int, target: int) -> Gate:
    return Gate("CPHASE", (control, target), float(angle))


def NCPHASE(angle: float, controls: Sequence[int], target: int) -> Gate:
    return Gate("NCPHASE", tuple(controls) + (target,), float(angle))


@dataclass
class Circuit:
    n_qubits: int
    gates: List[Gate] = field(default_factory=list)
    global_phase: float = 0.0

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate):
        if any(q < 0 or q >= self.n_qubits for q in g.qubits):
            raise ValueError(f"{g} outside {self.n_qubits} qubits")

    def append(self, gate: Gate) -> "Circuit":
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        for g in other.gates:
            self.append(g)
        self.global_phase += other.global_phase
        return self

    def is_lowered(self) -> bool:
        return all(g.kind in LOWERED_KINDS for g in self.gates)

    def count_ops(self) -> dict:
        out: dict = {}
        for g in self.gates:
            out[g.kind] = out.get(g.kind, 0) + 1
        return out

    def __len__(self) -> int:
        return len(self.gates)


def _parity_rotation(qubits: Sequence[int], angle: float) -> List[Gate]:
    """``exp(-i angle/2 Z_S)``: CNOT ladder onto the last qubit, RZ, unladder."""
    ladder = [CNOT(a, b) for a, b in zip(qubits, qubits[1:])]
    return ladder + [RZ(angle, qubits[-1])] + ladder[::-1]


def compile_phase_oracle(h: ZHamiltonian, theta: float) -> Circuit:
    """Gate sequence for ``exp(-i H theta)`` (one Z-string at a time)."""
    circuit = Circuit(h.n_qubits)
    for mask, c in sorted(h.terms.items(), key=lambda mc: (bin(mc[0]).count("1"), mask_qubits(h.n_qubits, mc[0]))):
        angle = float(c) * theta
        if mask == 0:
            circuit.global_phase -= angle
            continue
        for g in _parity_rotation(mask_qubits(h.n_qubits, mask), 2 * angle):
            circuit.append(g)
    return circuit


def compile_zero_phase(n: int, mu: float) -> Circuit:
    """``exp(i mu)`` on ``|0...0>``, identity elsewhere."""
    if n < 1:
        raise ValueError("need at least one qubit")
    circuit = Circuit(n)
    for q in range(n):
        circuit.append(X(q))
    circuit.append(NCPHASE(mu, range(n - 1), n - 1))
    for q in range(n):
        circuit.append(X(q))
    return circuit


def hadamard_layer(n: int) -> Circuit:
    return Circuit(n, [H(q) for q in range(n)])


def assemble_search(h: ZHamiltonian, plan: SearchPlan) -> Circuit:
    """``H^n`` then ``plan.j`` rounds of oracle, ``H^n``, zero phase, ``H^n``."""
    n = h.n_qubits
    if plan.n_qubits != n:
        raise ValueError(f"plan is for {plan.n_qubits} qubits, Hamiltonian has {n}")
    circuit = hadamard_layer(n)
    for _ in range(plan.j):
        circuit.extend(compile_phase_oracle(h, plan.theta))
        circuit.extend(hadamard_layer(n))
        circuit.extend(compile_zero_phase(n, plan.mu))
        circuit.extend(hadamard_layer(n))
    return circuit


def _lower_ncphase(angle: float, controls: Tuple[int, ...], target: int) -> Tuple[List[Gate], float]:
    """Ancilla-free multi-controlled phase.  Returns ``(gates, global phase)``.

    C^k P(l) = CP(l/2)(c_k, t) . C^{k-1}X(c_k) . CP(-l/2)(c_k, t) . C^{k-1}X(c_k)
               . C^{k-1}P(l/2)(t)
    with C^{k-1}X = H . C^{k-1}P(pi) . H on the flipped control.
    """
    k = len(controls)
    if k == 0:
        # P(l) = exp(i l/2) RZ(l)
        return [RZ(angle, target)], angle / 2
    if k == 1:
        return [CPHASE(angle, controls[0], target)], 0.0
    *rest, last = controls
    rest = tuple(rest)
    flip, flip_phase = _lower_ncphase(math.pi, rest, last)
    toffoli = [H(last)] + flip + [H(last)]
    tail, tail_phase = _lower_ncphase(angle / 2, rest, target)
    gates = (
        [CPHASE(angle / 2, last, target)]
        + toffoli
        + [CPHASE(-angle / 2, last, target)]
        + toffoli
        + tail
    )
    return gates, 2 * flip_phase + tail_phase


def lower(c: Circuit) -> Circuit:
    """Rewrite NCPHASE gates over {H, X, RZ, CNOT, CPHASE}; other gates pass through."""
    out = Circuit(c.n_qubits, global_phase=c.global_phase)
    for g in c.gates:
        if g.kind != "NCPHASE":
            out.append(g)
            continue
        gates, phase = _lower_ncphase(g.angle, g.controls, g.target)
        for lg in gates:
            out.append(lg)
        out.global_phase += phase
    return out


# --------------------------------------------------------------------------
# export


def _fmt(angle: float) -> str:
    text = f"{angle:.12g}"
    return "0" if text in ("0", "-0") else text


def export_qasm(c: Circuit) -> str:
    """OpenQASM 2.0 text using h, x, rz, cx, cu1."""
    if not c.is_lowered():
        bad = sorted({g.kind for g in c.gates if g.kind not in LOWERED_KINDS})
        raise UnloweredGateError(f"lower the circuit first; found {bad}")
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"// global phase dropped: {_fmt(c.global_phase)} rad",
        "// rz(l) here means diag(exp(-i*l/2), exp(i*l/2)); q[0] is the leftmost bit of a basis label",
        f"qreg q[{c.n_qubits}];",
        f"creg c[{c.n_qubits}];",
    ]
    for g in c.gates:
        if g.kind == "H":
            lines.append(f"h q[{g.qubits[0]}];")
        elif g.kind == "X":
            lines.append(f"x q[{g.qubits[0]}];")
        elif g.kind == "RZ":
            lines.append(f"rz({_fmt(g.angle)}) q[{g.qubits[0]}];")
        elif g.kind == "CNOT":
            lines.append(f"cx q[{g.qubits[0]}],q[{g.qubits[1]}];")
        else:
            lines.append(f"cu1({_fmt(g.angle)}) q[{g.qubits[0]}],q[{g.qubits[1]}];")
    return "\n".join(lines) + "\n"


def circuit_to_dict(c: Circuit) -> dict:
    return {
        "n_qubits": c.n_qubits,
        "global_phase": c.global_phase,
        "gates": [{"kind": g.kind, "qubits": list(g.qubits), "angle": g.angle} for g in c.gates],
    }


def circuit_from_dict(data: dict) -> Circuit:
    gates = [Gate(g["kind"], tuple(g["qubits"]), float(g.get("angle", 0.0))) for g in data["gates"]]
    return Circuit(int(data["n_qubits"]), gates, float(data.get("global_phase", 0.0)))


def dump_circuit_json(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c), indent=2)
