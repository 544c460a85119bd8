"""Linear-inversion state tomography from Pauli-basis measurements.

Every qubit is measured in one of X, Y, Z, giving ``3**n`` settings.  For an
axis word ``v`` in ``{I, X, Y, Z}**n`` the Stokes coefficient ``T_v`` is the
average of the product of ``+-1`` outcomes over the non-identity positions,
read from the setting obtained by replacing each ``I`` in ``v`` with ``Z``.
The estimate is

    rho = 2**-n * sum_v T_v sigma_v1 (x) ... (x) sigma_vn

which is Hermitian with unit trace by construction but need not be positive.
"""
from __future__ import annotations

import itertools
import json
import math
from typing import Dict, Mapping, Optional, Sequence, Union

import numpy as np

from .compiler import Gate
from .simulator import CountHistogram, Seed, StateVector, apply_gate, sample

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HERMITIAN_TOL = 1e-9


class TomographyError(ValueError):
    pass


def settings(n: int) -> list:
    """All measurement settings, e.g. ``['XX', 'XY', ..., 'ZZ']`` for two qubits."""
    return ["".join(w) for w in itertools.product("XYZ", repeat=n)]


def theoretical_density(psi: StateVector) -> np.ndarray:
    a = psi.amplitudes
    return np.outer(a, a.conj())


def rotate_to_basis(psi: StateVector, axes: str) -> StateVector:
    """Apply the per-qubit basis change that turns an ``axes`` measurement into a Z measurement."""
    if len(axes) != psi.n_qubits or set(axes) - set("XYZ"):
        raise TomographyError(f"bad measurement setting {axes!r} for {psi.n_qubits} qubits")
    out = psi.copy()
    for q, a in enumerate(axes):
        if a == "X":
            apply_gate(out, Gate("H", (q,)))
        elif a == "Y":
            # S^dagger = RZ(-pi/2) up to a global phase, which measurement ignores
            apply_gate(out, Gate("RZ", (q,), -math.pi / 2))
            apply_gate(out, Gate("H", (q,)))
    return out


def measure_setting(psi: StateVector, axes: str, shots: int, seed: Seed = None) -> CountHistogram:
    return sample(rotate_to_basis(psi, axes), shots, seed)


def setting_probabilities(psi: StateVector) -> Dict[str, np.ndarray]:
    """Exact outcome distributions for every setting (the infinite-shot limit)."""
    return {s: rotate_to_basis(psi, s).probabilities() for s in settings(psi.n_qubits)}


def measure_all(psi: StateVector, shots: int, seed: Optional[int] = None) -> Dict[str, CountHistogram]:
    """Sample every setting; setting ``k`` uses the seed ``(seed, k)``."""
    out = {}
    for k, s in enumerate(settings(psi.n_qubits)):
        sub = None if seed is None else (seed, k)
        out[s] = measure_setting(psi, s, shots, sub)
    return out


def _parity_signs(n: int, positions: Sequence[int]) -> np.ndarray:
    """``(-1)**(number of ones of b at positions)`` for every basis index ``b``."""
    b = np.arange(1 << n)
    parity = np.zeros(1 << n, dtype=np.int64)
    for q in positions:
        parity ^= (b >> (n - 1 - q)) & 1
    return 1 - 2 * parity


def stokes_parameters(data: Mapping[str, Union[CountHistogram, np.ndarray]]) -> Dict[str, float]:
    """``T_v`` for every word ``v`` in ``{I, X, Y, Z}**n``."""
    if not data:
        raise TomographyError("no measurement data")
    n = len(next(iter(data)))
    missing = [s for s in settings(n) if s not in data]
    if missing:
        raise TomographyError(f"missing settings {missing[:5]}{'...' if len(missing) > 5 else ''}")
    shots = {d.shots for d in data.values() if isinstance(d, CountHistogram)}
    if len(shots) > 1:
        raise TomographyError(f"settings use different shot counts {sorted(shots)}")
    probs = {
        s: (d.probabilities() if isinstance(d, CountHistogram) else np.asarray(d, dtype=float))
        for s, d in data.items()
    }
    out = {}
    for word in itertools.product("IXYZ", repeat=n):
        word = "".join(word)
        setting = word.replace("I", "Z")
        active = [q for q, a in enumerate(word) if a != "I"]
        out[word] = float(probs[setting] @ _parity_signs(n, active))
    return out


def density_from_stokes(T: Mapping[str, float]) -> np.ndarray:
    n = len(next(iter(T)))
    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    for word, t in T.items():
        if t == 0:
            continue
        op = np.array([[1.0 + 0j]])
        for a in word:
            op = np.kron(op, PAULI[a])
        rho += t * op
    return rho / (1 << n)


def reconstruct(data: Mapping[str, Union[CountHistogram, np.ndarray]]) -> np.ndarray:
    """Density matrix from all ``3**n`` settings (histograms or exact probability arrays)."""
    return density_from_stokes(stokes_parameters(data))


def _check_hermitian(rho: np.ndarray, name: str):
    if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
        raise TomographyError(f"{name} is not Hermitian")


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(rhoT: np.ndarray, rhoE: np.ndarray) -> float:
    """``Tr sqrt(sqrt(rhoT) rhoE sqrt(rhoT))``, with a shortcut for pure ``rhoT``.

    A linear-inversion ``rhoE`` need not be positive, so ``<psi|rhoE|psi>`` can
    fall outside ``[0, 1]``; the result is clipped to that interval.
    """
    rhoT = np.asarray(rhoT, dtype=complex)
    rhoE = np.asarray(rhoE, dtype=complex)
    if rhoT.shape != rhoE.shape:
        raise TomographyError(f"shape mismatch {rhoT.shape} vs {rhoE.shape}")
    _check_hermitian(rhoT, "rhoT")
    _check_hermitian(rhoE, "rhoE")
    w, v = np.linalg.eigh(rhoT)
    if np.sum(w > 1e-9) == 1:
        psi = v[:, -1]
        overlap = float(np.real(psi.conj() @ rhoE @ psi)) * w[-1]
        return min(1.0, math.sqrt(max(0.0, overlap)))
    s = _psd_sqrt(rhoT)
    inner = s @ rhoE @ s
    inner = (inner + inner.conj().T) / 2
    ev = np.linalg.eigvalsh(inner)
    return min(1.0, float(np.sum(np.sqrt(np.clip(ev, 0, None)))))


# --------------------------------------------------------------------------
# export


def density_to_dict(rho: np.ndarray) -> dict:
    return {
        "dim": int(rho.shape[0]),
        "real": rho.real.tolist(),
        "imag": rho.imag.tolist(),
    }


def density_from_dict(data: dict) -> np.ndarray:
    return np.array(data["real"], dtype=float) + 1j * np.array(data["imag"], dtype=float)


def dump_density_json(rho: np.ndarray) -> str:
    return json.dumps(density_to_dict(rho), indent=2)


def format_density(rho: np.ndarray, decimals: int = 6) -> str:
    """Aligned text with ``decimals`` places; imaginary parts are shown only if present."""

    def cell(z: complex) -> str:
        re = f"{round(z.real, decimals) + 0.0:.{decimals}f}"
        if abs(z.imag) < 0.5 * 10 ** -decimals:
            return re
        sign = "+" if z.imag >= 0 else "-"
        return f"{re}{sign}{abs(z.imag):.{decimals}f}i"

    cells = [[cell(z) for z in row] for row in rho]
    width = max(len(c) for row in cells for c in row)
    return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells) + "\n"
