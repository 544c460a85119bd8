"""Relative oracle phases for 966887, and how one iteration compares with two."""
import numpy as np

from qfactor.compiler import assemble_search, compile_phase_oracle
from qfactor.pipeline import prepare, spectrum_csv
from qfactor.searchplan import plan
from qfactor.simulator import circuit_unitary, run, run_ideal_search, success_probability

inst = prepare(966887)
print("free variables:", inst.reduction.free_order)
print("H =", inst.hamiltonian)
print("multiplicities:", {str(k): v for k, v in inst.spectrum.multiplicities.items()})

# phases imprinted by exp(-iH theta), read relative to |0000>
theta = 0.25
U = circuit_unitary(compile_phase_oracle(inst.hamiltonian, theta))
rel = np.angle(np.diag(U) / U[0, 0]) / theta
for b in range(16):
    print(f"|{b:04b}>  E = {inst.spectrum.eigenvalues[b]:.0f}  phase = {rel[b]:+.0f} theta")

ground = inst.spectrum.ground_states
one = plan(inst.spectrum, "paper")
two = plan(inst.spectrum, "exact")
print(f"one iteration: mu = {one.mu:.4f} (clamped: {one.clamped})")
print("  compiled oracle success:", success_probability(run(assemble_search(inst.hamiltonian, one)), ground))
print(f"two iterations: mu = {two.mu:.4f}")
print("  ideal oracle success:   ", success_probability(run_ideal_search(inst.spectrum, two), ground))
print("  compiled oracle success:", success_probability(run(assemble_search(inst.hamiltonian, two)), ground))

# the compiled oracle gives the eigenvalue-4 class a different phase from the
# eigenvalue-3 class, so only the ideal oracle reaches certainty
print(spectrum_csv(inst, one))
