"""Binary multiplication-table constraints and the equation file format.

A factor with ``m`` interior bits is written ``1 p_m ... p_1 1`` in binary, so
it lies in ``[2**(m+1) + 1, 2**(m+2) - 1]``.  :func:`generate_biprime_system`
writes one equation per output column of the long multiplication ``p * q``,
with binary carry variables ``c{k}_{k+l}`` of weight ``2**l`` in column ``k``.

Equation files look like::

    # N = 175
    vars p1 q1 r1
    p1 + q1 + r1 = 1
    p1*q1 + q1*r1 + p1*r1 = 0

Statements are separated by newlines or ``;``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

from .polynomial import (
    BinaryPolynomial,
    carry,
    factor_bit,
    format_poly,
    var_info,
    var_key,
)

__all__ = [
    "EquationSystem",
    "FactorLayout",
    "LayoutError",
    "EquationSyntaxError",
    "generate_biprime_system",
    "layout_candidates",
    "parse_equations",
    "format_system",
    "strip_twos",
    "infer_layout",
]


class LayoutError(ValueError):
    """The requested bit layout cannot produce ``N``."""


class EquationSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class FactorLayout:
    """Bit layout of the factors of ``N``.

    ``bits[i]`` is the number of interior (unknown) bits of factor ``i``;
    leading and trailing bits are fixed to 1.  ``twos`` records how many
    factors of two were divided out of the original input.
    """

    N: int
    bits: Tuple[int, ...]
    twos: int = 0

    def __post_init__(self):
        if self.N <= 0 or self.N % 2 == 0:
            raise LayoutError(f"N must be a positive odd integer, got {self.N}")
        if any(b < 0 for b in self.bits):
            raise LayoutError("interior bit counts must be non-negative")

    @property
    def n_factors(self) -> int:
        return len(self.bits)

    @property
    def original(self) -> int:
        return self.N << self.twos

    def factor_range(self, i: int) -> Tuple[int, int]:
        b = self.bits[i]
        return (1 << (b + 1)) + 1, (1 << (b + 2)) - 1

    def admits(self) -> bool:
        lo = hi = 1
        for i in range(self.n_factors):
            a, b = self.factor_range(i)
            lo *= a
            hi *= b
        return lo <= self.N <= hi


@dataclass
class EquationSystem:
    """Polynomial equations ``poly == 0`` over binary variables."""

    variables: List[str]
    equations: List[BinaryPolynomial]
    layout: Optional[FactorLayout] = None

    def __post_init__(self):
        self.variables = sorted(set(self.variables), key=var_key)
        declared = set(self.variables)
        for eq in self.equations:
            missing = eq.variables - declared
            if missing:
                raise ValueError(f"undeclared variables {sorted(missing)}")

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    def is_satisfied(self, assignment) -> bool:
        return all(eq.evaluate(assignment) == 0 for eq in self.equations)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EquationSystem):
            return NotImplemented
        return self.variables == other.variables and self.equations == other.equations

    def __str__(self) -> str:
        return format_system(self)


def strip_twos(N: int) -> Tuple[int, int]:
    """Divide out powers of two; returns ``(odd part, exponent)``."""
    if N <= 0:
        raise ValueError("N must be positive")
    twos = (N & -N).bit_length() - 1
    return N >> twos, twos


def layout_candidates(N: int) -> List[Tuple[int, int]]:
    """Two-factor layouts ``(m, n)`` with ``m <= n`` whose product range contains N.

    Ordered by ``|m - n|`` so equal-length factors come first.
    """
    L = N.bit_length()
    out = []
    for total in (L - 4, L - 3):
        if total < 0:
            continue
        for m in range(0, total // 2 + 1):
            n = total - m
            if FactorLayout(N, (m, n)).admits():
                out.append((m, n))
    out.sort(key=lambda mn: (mn[1] - mn[0], mn[0] + mn[1]))
    return out


def generate_biprime_system(N: int, m: int, n: int) -> EquationSystem:
    """Column equations for ``p * q == N`` with ``m`` / ``n`` interior bits.

    Even ``N`` is reduced to its odd part first; the exponent is kept on the
    returned layout.
    """
    N, twos = strip_twos(N)
    if N < 9:
        raise LayoutError(f"odd part {N} is too small to have two odd factors > 1")
    if m > n:
        raise LayoutError("expected m <= n")
    layout = FactorLayout(N, (m, n), twos)
    if not layout.admits():
        raise LayoutError(f"no factors with {m} and {n} interior bits multiply to {N}")

    def bit(factor: int, i: int, width: int) -> BinaryPolynomial:
        if i == 0 or i == width + 1:
            return BinaryPolynomial.const(1)
        return BinaryPolynomial.var(factor_bit(factor, i))

    variables = [factor_bit(0, i) for i in range(1, m + 1)]
    variables += [factor_bit(1, j) for j in range(1, n + 1)]

    incoming: dict = {}
    equations = []
    top = m + n + 2
    k = 0
    while k <= top or incoming.get(k) or k < N.bit_length():
        column = BinaryPolynomial()
        for i in range(max(0, k - n - 1), min(m + 1, k) + 1):
            column = column + bit(0, i, m) * bit(1, k - i, n)
        for c in incoming.pop(k, []):
            column = column + BinaryPolynomial.var(c)
        target = (N >> k) & 1
        _, hi = column.bounds()
        n_carries = (max(hi - target, 0) // 2).bit_length()
        for l in range(1, n_carries + 1):
            name = carry(k, k + l)
            variables.append(name)
            incoming.setdefault(k + l, []).append(name)
            column = column - BinaryPolynomial.monomial([name], 1 << l)
        if not (column - target).is_zero():
            equations.append(column - target)
        k += 1
    return EquationSystem(variables, equations, layout)


# --------------------------------------------------------------------------
# equation file format

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<sep>[\n;])
  | (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*=])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> Iterator[_Token]:
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise EquationSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            yield _Token(kind, m.group(), line, pos - line_start + 1)
        if m.group() == "\n":
            line += 1
            line_start = m.end()
        pos = m.end()
    yield _Token("eof", "", line, pos - line_start + 1)


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.i = 0
        self.declared: Optional[List[str]] = None

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok: Optional[_Token] = None):
        tok = tok or self.tok
        raise EquationSyntaxError(msg, tok.line, tok.col)

    def skip_separators(self):
        while self.tok.kind == "sep":
            self.advance()

    def parse(self) -> EquationSystem:
        self.skip_separators()
        if not (self.tok.kind == "name" and self.tok.text == "vars"):
            self.fail("expected 'vars' declaration")
        self.advance()
        names = []
        while self.tok.kind == "name":
            t = self.advance()
            if t.text in names:
                self.fail(f"variable {t.text!r} declared twice", t)
            names.append(t.text)
        if not names:
            self.fail("'vars' needs at least one variable")
        self.declared = names
        equations = []
        while True:
            self.skip_separators()
            if self.tok.kind == "eof":
                break
            equations.append(self.equation())
            if self.tok.kind not in ("sep", "eof"):
                self.fail(f"unexpected {self.tok.text!r} after equation")
        return EquationSystem(names, equations)

    def equation(self) -> BinaryPolynomial:
        lhs = self.poly()
        if self.tok.text != "=":
            self.fail("expected '='")
        self.advance()
        rhs = self.poly()
        return lhs - rhs

    def poly(self) -> BinaryPolynomial:
        total = BinaryPolynomial()
        sign = 1
        if self.tok.text in "+-" and self.tok.kind == "op":
            sign = -1 if self.advance().text == "-" else 1
        total = total + sign * self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            sign = -1 if self.advance().text == "-" else 1
            total = total + sign * self.term()
        return total

    def term(self) -> BinaryPolynomial:
        coeff = 1
        names: List[str] = []
        if self.tok.kind == "num":
            t = self.advance()
            if not t.text.isdigit():
                self.fail(f"non-integer coefficient {t.text!r}", t)
            coeff = int(t.text)
            if self.tok.text == "*":
                self.advance()
            elif self.tok.kind != "name":
                return BinaryPolynomial.const(coeff)
        while True:
            if self.tok.kind != "name":
                self.fail("expected variable name")
            t = self.advance()
            if t.text not in self.declared:
                self.fail(f"unknown variable {t.text!r}", t)
            names.append(t.text)
            if self.tok.text != "*":
                break
            self.advance()
            if self.tok.kind == "num":
                t = self.advance()
                if not t.text.isdigit():
                    self.fail(f"non-integer coefficient {t.text!r}", t)
                coeff *= int(t.text)
                if self.tok.text != "*":
                    break
                self.advance()
        return BinaryPolynomial.monomial(names, coeff)


def parse_equations(text: str, layout: Optional[FactorLayout] = None) -> EquationSystem:
    """Parse equation-file text.  See the module docstring for the syntax."""
    system = _Parser(text).parse()
    system.layout = layout
    return system


def format_system(system: EquationSystem) -> str:
    lines = []
    if system.layout is not None:
        lay = system.layout
        lines.append(f"# N = {lay.original}, interior bits {','.join(map(str, lay.bits))}")
    lines.append("vars " + " ".join(system.variables))
    for eq in system.equations:
        rhs = -eq.constant
        lhs = eq - eq.constant
        lines.append(f"{format_poly(lhs)} = {rhs}")
    return "\n".join(lines) + "\n"


def infer_layout(N: int, variables: Sequence[str], n_factors: Optional[int] = None) -> FactorLayout:
    """Guess factor widths from the highest bit index of each factor letter."""
    odd, twos = strip_twos(N)
    widths: dict = {}
    for v in variables:
        info = var_info(v)
        if info.kind == "factor-bit":
            widths[info.factor] = max(widths.get(info.factor, 0), info.bit)
    count = n_factors or (max(widths) + 1 if widths else 2)
    return FactorLayout(odd, tuple(widths.get(i, 0) for i in range(count)), twos)
