"""Walk 4088459 through every stage of the pipeline."""
import numpy as np

from qfactor.compiler import assemble_search, export_qasm, lower
from qfactor.eqgen import generate_biprime_system, layout_candidates
from qfactor.hamiltonian import build_hamiltonian, decode_factors, diagonal
from qfactor.searchplan import plan
from qfactor.simplify import reduce, verify_equivalence
from qfactor.simulator import run, sample

N = 4088459

# both factors are 11 bits long, so 9 unknown bits each
print("layouts to try:", layout_candidates(N)[:3])
system = generate_biprime_system(N, 9, 9)
print(system.n_variables, "variables,", len(system.equations), "column equations")

red = reduce(system)
print("fixed:", {v: x for v, x in red.fixed.items() if v[0] in "pq"})
print("substituted:", {v: str(e) for v, e in red.substitutions.items()})
print("residual:", [str(e) for e in red.residual.equations])
print("equivalent to the original system:", verify_equivalence(system, red))

h = build_hamiltonian(red.residual.equations, red.free_order)
print("H =", h)
spectrum = diagonal(h)
print("eigenvalues:", spectrum.eigenvalues)  # zero on |00> and |11>

p = plan(spectrum)
print(f"j = {p.j}, theta = {p.theta:.6f} (pi/2 = {np.pi / 2:.6f})")

circuit = assemble_search(h, p)
state = run(circuit)
print("final probabilities:", np.round(state.probabilities(), 6))

counts = sample(state, 8192, seed=1)
for b, c in counts.most_common():
    print(f"  |{counts.label(b)}>  {c:5d}  ->  factors {decode_factors(b, red)}")

print(export_qasm(lower(circuit)))
