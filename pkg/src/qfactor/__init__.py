"""Integer factorization as an exact quantum search, simulated on a state vector.

The pipeline turns ``N = p * q`` into binary multiplication-table equations
(:mod:`~qfactor.eqgen`), reduces them (:mod:`~qfactor.simplify`), encodes the
residual as a diagonal Z-string Hamiltonian (:mod:`~qfactor.hamiltonian`),
picks phase-matched search parameters (:mod:`~qfactor.searchplan`), compiles
the search to gates (:mod:`~qfactor.compiler`) and simulates it
(:mod:`~qfactor.simulator`, :mod:`~qfactor.tomography`).
"""
from .compiler import Circuit, Gate, assemble_search, compile_phase_oracle, compile_zero_phase, export_qasm, lower
from .eqgen import EquationSystem, FactorLayout, generate_biprime_system, layout_candidates, parse_equations
from .hamiltonian import DiagonalSpectrum, ZHamiltonian, build_hamiltonian, decode_factors, diagonal
from .pipeline import factorize, prepare
from .searchplan import SearchPlan, plan
from .simplify import ReducedSystem, reduce, verify_equivalence
from .simulator import CountHistogram, StateVector, run, sample, success_probability
from .tomography import fidelity, reconstruct, theoretical_density

__version__ = "0.1.0"
