"""Reconstruct the 175 search output from simulated Pauli measurements."""
import numpy as np

from qfactor.pipeline import final_state, prepare
from qfactor.searchplan import plan
from qfactor.tomography import (
    fidelity,
    format_density,
    measure_all,
    reconstruct,
    setting_probabilities,
    theoretical_density,
)

inst = prepare(175, equations="175")
psi = final_state(inst, plan(inst.spectrum))
rhoT = theoretical_density(psi)
print("theory:")
print(format_density(rhoT))

# with exact outcome probabilities the linear inversion is exact
print("max error at infinite shots:", np.abs(reconstruct(setting_probabilities(psi)) - rhoT).max())

rhoE = reconstruct(measure_all(psi, 8192, seed=3))
print("8192 shots per setting:")
print(format_density(rhoE))
print("smallest eigenvalue:", np.linalg.eigvalsh(rhoE).min())  # may dip below zero
print("fidelity:", fidelity(rhoT, rhoE))

fids = [fidelity(rhoT, reconstruct(measure_all(psi, 8192, seed=s))) for s in range(20)]
print(f"mean over 20 seeds: {np.mean(fids):.5f} +- {np.std(fids):.5f}")
