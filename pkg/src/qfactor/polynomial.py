"""Multilinear integer polynomials over {0, 1} variables.

Variables are plain strings.  Names of the form ``p3`` / ``q1`` / ``r1`` are
factor bits (letter picks the factor, digits the bit index); ``c4_6`` is the
carry produced by column 4 and consumed by column 6.  Anything else is an
auxiliary variable.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Tuple

FACTOR_LETTERS = "pqrstuvw"

_FACTOR_RE = re.compile(r"^([pqrstuvw])(\d+)$")
_CARRY_RE = re.compile(r"^c(\d+)_(\d+)$")


@dataclass(frozen=True)
class VarInfo:
    name: str
    kind: str  # "factor-bit" | "carry" | "aux"
    factor: int = -1
    bit: int = -1
    column: int = -1
    dest: int = -1


@lru_cache(maxsize=None)
def var_info(name: str) -> VarInfo:
    m = _FACTOR_RE.match(name)
    if m:
        return VarInfo(name, "factor-bit", FACTOR_LETTERS.index(m.group(1)), int(m.group(2)))
    m = _CARRY_RE.match(name)
    if m:
        return VarInfo(name, "carry", column=int(m.group(1)), dest=int(m.group(2)))
    return VarInfo(name, "aux")


@lru_cache(maxsize=None)
def var_key(name: str) -> tuple:
    """Total order: factor bits by (factor, bit), then auxiliaries, then carries."""
    info = var_info(name)
    if info.kind == "factor-bit":
        return (0, info.factor, info.bit, name)
    if info.kind == "aux":
        return (1, 0, 0, name)
    return (2, info.column, info.dest, name)


def factor_bit(factor: int, bit: int) -> str:
    return f"{FACTOR_LETTERS[factor]}{bit}"


def carry(column: int, dest: int) -> str:
    return f"c{column}_{dest}"


Monomial = Tuple[str, ...]


@lru_cache(maxsize=65536)
def _sorted_monomial(variables: frozenset) -> Monomial:
    return tuple(sorted(variables, key=var_key))


def _monomial(variables: Iterable[str]) -> Monomial:
    # idempotence: x*x == x over {0, 1}
    return _sorted_monomial(frozenset(variables))


class BinaryPolynomial:
    """Integer polynomial in {0,1} variables, kept multilinear.

    ``coeffs`` maps a sorted variable tuple to its coefficient; the empty tuple
    holds the constant.  Zero coefficients are never stored.
    """

    __slots__ = ("_coeffs", "_hash", "_terms", "_vars")

    def __init__(self, coeffs: Mapping[Monomial, int] | None = None):
        clean: Dict[Monomial, int] = {}
        for mono, c in (coeffs or {}).items():
            if c:
                key = _monomial(mono)
                clean[key] = clean.get(key, 0) + int(c)
        self._coeffs = {k: v for k, v in clean.items() if v}
        self._hash = None
        self._terms = None
        self._vars = None

    @classmethod
    def _raw(cls, coeffs: Dict[Monomial, int]) -> "BinaryPolynomial":
        # trusted constructor: keys already canonical, no zero coefficients
        self = cls.__new__(cls)
        self._coeffs = coeffs
        self._hash = self._terms = self._vars = None
        return self

    @classmethod
    def const(cls, value: int) -> "BinaryPolynomial":
        return cls({(): value})

    @classmethod
    def var(cls, name: str) -> "BinaryPolynomial":
        return cls({(name,): 1})

    @classmethod
    def monomial(cls, names: Iterable[str], coeff: int = 1) -> "BinaryPolynomial":
        return cls({tuple(names): coeff})

    @property
    def coeffs(self) -> Dict[Monomial, int]:
        return dict(self._coeffs)

    @property
    def constant(self) -> int:
        return self._coeffs.get((), 0)

    @property
    def terms(self) -> list:
        """Non-constant ``(coefficient, variables)`` pairs in canonical order."""
        if self._terms is None:
            items = [(c, m) for m, c in self._coeffs.items() if m]
            items.sort(key=lambda cm: (len(cm[1]), [var_key(v) for v in cm[1]]))
            self._terms = items
        return list(self._terms)

    @property
    def variables(self) -> frozenset:
        if self._vars is None:
            self._vars = frozenset(v for m in self._coeffs for v in m)
        return self._vars

    @property
    def degree(self) -> int:
        return max((len(m) for m in self._coeffs), default=0)

    def is_constant(self) -> bool:
        return all(not m for m in self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_linear(self) -> bool:
        return self.degree <= 1

    # arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "BinaryPolynomial":
        other = _coerce(other)
        out = dict(self._coeffs)
        for m, c in other._coeffs.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return BinaryPolynomial._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "BinaryPolynomial":
        return BinaryPolynomial._raw({m: -c for m, c in self._coeffs.items()})

    def __sub__(self, other) -> "BinaryPolynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "BinaryPolynomial":
        return _coerce(other) - self

    def __mul__(self, other) -> "BinaryPolynomial":
        if isinstance(other, int):
            if not other:
                return BinaryPolynomial()
            return BinaryPolynomial._raw({m: c * other for m, c in self._coeffs.items()})
        other = _coerce(other)
        out: Dict[Monomial, int] = {}
        for m1, c1 in self._coeffs.items():
            for m2, c2 in other._coeffs.items():
                key = _monomial(m1 + m2) if m1 and m2 else (m1 or m2)
                out[key] = out.get(key, 0) + c1 * c2
        return BinaryPolynomial._raw({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = BinaryPolynomial.const(other)
        if not isinstance(other, BinaryPolynomial):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    # evaluation ---------------------------------------------------------
    def evaluate(self, assignment: Mapping[str, int]) -> int:
        total = 0
        for m, c in self._coeffs.items():
            if all(assignment[v] for v in m):
                total += c
        return total

    def substitute(self, mapping: Mapping[str, "BinaryPolynomial | int"]) -> "BinaryPolynomial":
        if not mapping or not (self.variables & mapping.keys()):
            return self
        out: Dict[Monomial, int] = {}
        for m, c in self._coeffs.items():
            partial: Dict[Monomial, int] = {tuple(v for v in m if v not in mapping): c}
            for v in m:
                if v in mapping:
                    repl = _coerce(mapping[v])._coeffs
                    nxt: Dict[Monomial, int] = {}
                    for m1, c1 in partial.items():
                        for m2, c2 in repl.items():
                            key = _monomial(m1 + m2) if m1 and m2 else (m1 or m2)
                            nxt[key] = nxt.get(key, 0) + c1 * c2
                    partial = nxt
            for k, v in partial.items():
                out[k] = out.get(k, 0) + v
        return BinaryPolynomial._raw({k: v for k, v in out.items() if v})

    def bounds(self) -> Tuple[int, int]:
        """Cheap interval enclosure of the value over all {0,1} assignments."""
        lo = hi = self.constant
        for m, c in self._coeffs.items():
            if m:
                if c > 0:
                    hi += c
                else:
                    lo += c
        return lo, hi

    def normalized(self) -> "BinaryPolynomial":
        """Canonical form of the equation ``self == 0``.

        Divides by the coefficient gcd and fixes the sign so the first term in
        canonical order is positive.
        """
        if not self._coeffs:
            return self
        g = 0
        for c in self._coeffs.values():
            g = math.gcd(g, c)
        terms = self.terms
        lead = terms[0][0] if terms else self.constant
        if lead < 0:
            g = -g
        if g == 1:
            return self
        return BinaryPolynomial._raw({m: c // g for m, c in self._coeffs.items()})

    def __repr__(self) -> str:
        return f"BinaryPolynomial({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)


def _coerce(x) -> BinaryPolynomial:
    if isinstance(x, BinaryPolynomial):
        return x
    if isinstance(x, int):
        return BinaryPolynomial.const(x)
    raise TypeError(f"cannot combine BinaryPolynomial with {type(x).__name__}")


def format_poly(poly: BinaryPolynomial) -> str:
    """Render in the equation-file syntax, e.g. ``q1 + q3 - 2 q1*q3``."""
    parts = []
    items = [(c, "*".join(m)) for c, m in poly.terms]
    if poly.constant:
        items.append((poly.constant, ""))
    if not items:
        return "0"
    for i, (c, mono) in enumerate(items):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag} {mono}"
        else:
            body = str(mag)
        if i == 0:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)
