"""Parameters of the phase-matched exact search.

With ``M`` marked states out of ``2**n`` the uniform start state has overlap
``sin(phi) = sqrt(M / 2**n)`` with the marked subspace.  Running ``j``
iterations with equal oracle and diffusion phase

    mu = 2 * arcsin(sin(pi / (4j + 2)) / sin(phi))

lands on the marked subspace with certainty; ``j`` is the smallest integer
``>= pi / (4 phi) - 1/2``.  The compiled oracle ``exp(-i H theta)`` gives the
marked states the phase ``mu`` relative to states of the baseline eigenvalue
``E_b`` when ``theta = mu / E_b``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Optional

from .hamiltonian import DiagonalSpectrum

_INTEGER_TOL = 1e-9
_ARCSIN_TOL = 1e-12


class NoSolutionError(ValueError):
    """The spectrum has no zero eigenvalue."""


@dataclass(frozen=True)
class SearchPlan:
    n_qubits: int
    M: int
    phi: float
    j: int
    mu: float
    baseline_eigenvalue: float
    theta: float
    mode: str
    clamped: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def iteration_count(phi: float) -> int:
    bound = math.pi / (4 * phi) - 0.5
    nearest = round(bound)
    if abs(bound - nearest) < _INTEGER_TOL:
        return max(int(nearest), 1)
    return math.floor(bound) + 1


def marking_phase(j: int, phi: float) -> tuple[float, bool]:
    """``(mu, clamped)``; the arcsin argument is clamped to 1 when it exceeds it."""
    arg = math.sin(math.pi / (4 * j + 2)) / math.sin(phi)
    if arg > 1 + _ARCSIN_TOL:
        return math.pi, True
    return 2 * math.asin(min(arg, 1.0)), False


def baseline_eigenvalue(spectrum: DiagonalSpectrum) -> float:
    """Most frequent non-zero eigenvalue; the smaller one wins ties."""
    counts = Counter(int(x) for x in spectrum.numerators if x != 0)
    if not counts:
        return 1.0
    best = min(counts, key=lambda v: (-counts[v], v))
    return best / spectrum.denominator


def plan(
    spectrum: DiagonalSpectrum,
    mode: str = "exact",
    *,
    theta: Optional[float] = None,
    baseline: Optional[float] = None,
) -> SearchPlan:
    """Search parameters for ``spectrum``.

    ``mode="exact"`` picks ``j`` so the search succeeds with certainty.
    ``mode="paper"`` always uses one iteration and clamps the marking phase to
    ``pi`` when no real phase exists (``clamped`` is then set).  ``theta`` and
    ``baseline`` override the derived oracle angle and baseline eigenvalue.
    """
    if mode not in ("exact", "paper"):
        raise ValueError(f"unknown mode {mode!r}")
    n = spectrum.n_qubits
    M = len(spectrum.ground_states)
    size = 1 << n
    if M == 0:
        raise NoSolutionError("no ground state with eigenvalue 0")
    E_b = float(baseline) if baseline is not None else baseline_eigenvalue(spectrum)
    if E_b <= 0:
        raise ValueError("baseline eigenvalue must be positive")
    phi = math.asin(math.sqrt(M / size))
    if M == size:
        return SearchPlan(n, M, phi, 0, 0.0, E_b, 0.0, mode)
    j = iteration_count(phi) if mode == "exact" else 1
    mu, clamped = marking_phase(j, phi)
    if theta is not None:
        mu = float(theta) * E_b
    else:
        theta = mu / E_b
    return SearchPlan(n, M, phi, j, mu, E_b, float(theta), mode, clamped)
