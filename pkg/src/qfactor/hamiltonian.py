"""Diagonal Z-string Hamiltonians whose ground states encode the residual solutions.

Qubit ``i`` carries the ``i``-th free variable.  Throughout the package qubit 0
is the most significant bit of a basis index, so ``|0111>`` is index 7 and
reads left to right as qubits 0..3.  A Z-string is stored as a bitmask in the
same convention: qubit ``i`` is bit ``1 << (n - 1 - i)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from .eqgen import FactorLayout
from .polynomial import BinaryPolynomial, FACTOR_LETTERS, factor_bit, var_info
from .simplify import ReducedSystem

MAX_QUBITS = 24


class FactorizationError(RuntimeError):
    """Decoded factors do not multiply back to N."""


def qubit_mask(n: int, qubit: int) -> int:
    return 1 << (n - 1 - qubit)


def mask_qubits(n: int, mask: int) -> List[int]:
    return [i for i in range(n) if mask & qubit_mask(n, i)]


@dataclass
class ZHamiltonian:
    """``H = sum_S c_S Z_S`` with exact rational coefficients."""

    n_qubits: int
    terms: Dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {int(m): Fraction(c) for m, c in self.terms.items() if c != 0}
        for m in self.terms:
            if m >> self.n_qubits:
                raise ValueError(f"mask {m:b} outside {self.n_qubits} qubits")

    @property
    def identity(self) -> Fraction:
        return self.terms.get(0, Fraction(0))

    def labels(self) -> Dict[str, Fraction]:
        """Terms keyed by Pauli label, e.g. ``'ZIZI'``."""
        out = {}
        for m, c in sorted(self.terms.items()):
            out["".join("Z" if m & qubit_mask(self.n_qubits, i) else "I" for i in range(self.n_qubits))] = c
        return out

    def matrix(self) -> np.ndarray:
        return np.diag(diagonal(self).eigenvalues.astype(complex))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        order = lambda mc: (bin(mc[0]).count("1"), mask_qubits(self.n_qubits, mc[0]))
        for m, c in sorted(self.terms.items(), key=order):
            op = " ".join(f"Z{i + 1}" for i in mask_qubits(self.n_qubits, m)) or "I"
            parts.append(f"({c}) {op}")
        return " + ".join(parts)


@dataclass
class DiagonalSpectrum:
    """Exact diagonal of a Z-string Hamiltonian.

    ``numerators / denominator`` is the eigenvalue of each basis index.
    """

    n_qubits: int
    numerators: np.ndarray
    denominator: int = 1

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.numerators.astype(float) / self.denominator

    def exact(self, b: int) -> Fraction:
        return Fraction(int(self.numerators[b]), self.denominator)

    @property
    def ground_states(self) -> List[int]:
        return [int(b) for b in np.flatnonzero(self.numerators == 0)]

    @property
    def multiplicities(self) -> Dict[Fraction, int]:
        values, counts = np.unique(self.numerators, return_counts=True)
        return {Fraction(int(v), self.denominator): int(c) for v, c in zip(values, counts)}

    def label(self, b: int) -> str:
        return format(b, f"0{self.n_qubits}b") if self.n_qubits else ""


def _z_expand(poly: BinaryPolynomial, index: Mapping[str, int], n: int) -> Dict[int, Fraction]:
    """Substitute ``x_i = (1 - z_i) / 2`` into a multilinear polynomial."""
    out: Dict[int, Fraction] = {}
    for mono, c in poly.coeffs.items():
        qubits = [index[v] for v in mono]
        scale = Fraction(c, 1 << len(qubits))
        # prod (1 - z_i)/2 = 2^-k sum_{S subset} (-1)^|S| z_S
        for sub in range(1 << len(qubits)):
            mask = 0
            sign = 1
            for k, q in enumerate(qubits):
                if sub >> k & 1:
                    mask |= qubit_mask(n, q)
                    sign = -sign
            out[mask] = out.get(mask, Fraction(0)) + sign * scale
    return {m: c for m, c in out.items() if c}


def build_hamiltonian(residual: Sequence[BinaryPolynomial], order: Sequence[str]) -> ZHamiltonian:
    """``H = sum_k r_k(a)^2`` with ``a_i = (I - Z_i)/2`` on qubit ``order.index(var)``."""
    n = len(order)
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds limit {MAX_QUBITS}")
    index = {v: i for i, v in enumerate(order)}
    square = BinaryPolynomial()
    for r in residual:
        missing = r.variables - index.keys()
        if missing:
            raise ValueError(f"residual uses variables outside the qubit order: {sorted(missing)}")
        square = square + r * r
    return ZHamiltonian(n, _z_expand(square, index, n))


def _walsh_hadamard(values: np.ndarray) -> np.ndarray:
    out = values.copy()
    h = 1
    size = len(out)
    while h < size:
        view = out.reshape(-1, 2, h)
        a = view[:, 0, :].copy()
        b = view[:, 1, :]
        view[:, 0, :] = a + b
        view[:, 1, :] = a - b
        h *= 2
    return out


def diagonal(h: ZHamiltonian) -> DiagonalSpectrum:
    """``E(b) = sum_S c_S (-1)^{|b & S|}`` evaluated exactly."""
    n = h.n_qubits
    denom = 1
    for c in h.terms.values():
        denom = denom * c.denominator // gcd(denom, c.denominator)
    nums = [0] * (1 << n)
    for m, c in h.terms.items():
        nums[m] = int(c * denom)
    bound = sum(abs(x) for x in nums)
    dtype = np.int64 if bound < 2**62 else object
    out = _walsh_hadamard(np.array(nums, dtype=dtype))
    # reduce the fraction when every eigenvalue shares the factor
    g = denom
    for v in out.tolist():
        g = gcd(g, int(v))
        if g == 1:
            break
    g = int(g) or 1
    if g > 1:
        out = out // g
        denom //= g
    if dtype is object:
        try:
            out = out.astype(np.int64)
        except OverflowError:
            pass
    return DiagonalSpectrum(n, out, int(denom))


def evaluate_residual(residual: Sequence[BinaryPolynomial], order: Sequence[str]) -> np.ndarray:
    """``sum_k r_k(bits(b))^2`` by direct evaluation, independent of the Z expansion."""
    n = len(order)
    out = np.zeros(1 << n, dtype=np.int64)
    for b in range(1 << n):
        assignment = {v: (b >> (n - 1 - i)) & 1 for i, v in enumerate(order)}
        out[b] = sum(r.evaluate(assignment) ** 2 for r in residual)
    return out


def factor_values(assignment: Mapping[str, int], layout: FactorLayout) -> List[int]:
    """Integers ``1 x_k ... x_1 1`` for each factor of the layout."""
    out = []
    for f, width in enumerate(layout.bits):
        value = 1 | (1 << (width + 1))
        for i in range(1, width + 1):
            if assignment[factor_bit(f, i)]:
                value |= 1 << i
        out.append(value)
    return out


def decode_factors(ground_state: int, reduction: ReducedSystem, layout: Optional[FactorLayout] = None) -> List[int]:
    """Factors encoded by a basis state; raises if their product is not N."""
    layout = layout or reduction.layout
    if layout is None:
        raise ValueError("a factor layout is required to decode")
    assignment = reduction.lift_index(ground_state)
    factors = factor_values(assignment, layout)
    if prod(factors) << layout.twos != layout.original:
        raise FactorizationError(
            f"state {ground_state} decodes to {factors} whose product is not {layout.original}"
        )
    return factors
