"""Reduction of binary constraint systems to a small residual problem.

:func:`reduce` runs a local rule loop to a fixpoint, then an exhaustive
implication pass (complete enumeration of what is left) that recovers values
the local rules cannot see.  Every recorded fix or substitution is implied by
the system, so the solution set is preserved exactly; :func:`verify_equivalence`
checks that claim against a brute-force enumeration.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from .eqgen import EquationSystem, FactorLayout
from .polynomial import BinaryPolynomial, factor_bit, var_info, var_key

log = logging.getLogger(__name__)

BRUTE_FORCE_MAX_VARS = 26
MAX_REDUCE_VARS = 128
MAX_PASSES = 10_000
# solution count above which the implication pass gives up
IMPLICATION_LIMIT = 1 << 14

ONE = BinaryPolynomial.const(1)


class InfeasibleSystemError(ValueError):
    """The system has no {0,1} solution (for generated systems: wrong layout)."""


class ReductionError(RuntimeError):
    pass


@dataclass
class ReducedSystem:
    original_variables: List[str]
    fixed: Dict[str, int]
    substitutions: Dict[str, BinaryPolynomial]
    residual: EquationSystem
    free_order: List[str]
    layout: Optional[FactorLayout] = None
    passes: int = 0

    @property
    def n_qubits(self) -> int:
        return len(self.free_order)

    def lift(self, free_values: Mapping[str, int] | Sequence[int]) -> Dict[str, int]:
        """Full assignment of the original variables from free-variable values."""
        if not isinstance(free_values, Mapping):
            free_values = dict(zip(self.free_order, free_values))
        out = dict(self.fixed)
        out.update({v: int(free_values[v]) for v in self.free_order})
        for v, expr in self.substitutions.items():
            out[v] = expr.evaluate(free_values)
        return out

    def lift_index(self, b: int) -> Dict[str, int]:
        """Lift a computational-basis index; qubit 0 is the most significant bit."""
        n = self.n_qubits
        return self.lift([(b >> (n - 1 - i)) & 1 for i in range(n)])

    def summary(self) -> dict:
        return {
            "fixed": len(self.fixed),
            "substituted": len(self.substitutions),
            "free": list(self.free_order),
            "residual": [str(eq) + " = 0" for eq in self.residual.equations],
        }


# --------------------------------------------------------------------------
# enumeration


def brute_force_solutions(system: EquationSystem) -> Set[Tuple[int, ...]]:
    """Every satisfying assignment, by exhaustive enumeration.

    Tuples follow ``system.variables``.  Limited to 26 variables.
    """
    names = system.variables
    n = len(names)
    if n > BRUTE_FORCE_MAX_VARS:
        raise ValueError(f"{n} variables exceeds brute-force limit {BRUTE_FORCE_MAX_VARS}")
    if n == 0:
        return {()} if all(eq.constant == 0 for eq in system.equations) else set()
    pos = {v: i for i, v in enumerate(names)}
    chunk = 1 << min(n, 20)
    found = []
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, start + chunk, dtype=np.int64)
        bits = [((idx >> (n - 1 - i)) & 1).astype(np.int64) for i in range(n)]
        ok = np.ones(chunk, dtype=bool)
        for eq in system.equations:
            val = np.full(chunk, eq.constant, dtype=np.int64)
            for c, mono in eq.terms:
                prod = bits[pos[mono[0]]]
                for v in mono[1:]:
                    prod = prod & bits[pos[v]]
                val += c * prod
            ok &= val == 0
        found.extend(idx[ok].tolist())
    return {tuple((b >> (n - 1 - i)) & 1 for i in range(n)) for b in found}


def search_solutions(
    equations: Sequence[BinaryPolynomial],
    variables: Sequence[str],
    limit: Optional[int] = None,
) -> Iterator[Tuple[int, ...]]:
    """Complete depth-first enumeration with interval pruning.

    Yields tuples ordered like ``variables``.  Variables are branched on in
    order of first appearance in ``equations`` so that column systems are
    decided low bit first.  Stops after ``limit`` solutions if given.
    """
    variables = list(variables)
    order: List[str] = []
    seen = set()
    for eq in equations:
        for _, mono in eq.terms:
            for v in mono:
                if v not in seen:
                    seen.add(v)
                    order.append(v)
    order += [v for v in variables if v not in seen]
    index = {v: i for i, v in enumerate(order)}
    compiled = []
    touching: List[List[int]] = [[] for _ in order]
    for e, eq in enumerate(equations):
        terms = [(c, tuple(index[v] for v in mono)) for c, mono in eq.terms]
        compiled.append((eq.constant, terms))
        for i in {i for _, t in terms for i in t}:
            touching[i].append(e)
        if not terms and eq.constant != 0:
            return
    vals = [-1] * len(order)
    out_pos = [index[v] for v in variables]
    n = len(order)

    def consistent(var: int) -> bool:
        for e in touching[var]:
            lo = hi = compiled[e][0]
            for c, t in compiled[e][1]:
                state = 1
                for i in t:
                    x = vals[i]
                    if x == 0:
                        state = 0
                        break
                    if x < 0:
                        state = -1
                if state == 1:
                    lo += c
                    hi += c
                elif state == -1:
                    if c > 0:
                        hi += c
                    else:
                        lo += c
            if lo > 0 or hi < 0:
                return False
        return True

    def branch(depth: int):
        if depth == n:
            yield tuple(vals[i] for i in out_pos)
            return
        for value in (0, 1):
            vals[depth] = value
            if consistent(depth):
                yield from branch(depth + 1)
        vals[depth] = -1

    for emitted, sol in enumerate(branch(0), start=1):
        yield sol
        if limit is not None and emitted >= limit:
            return


def _solutions(system: EquationSystem) -> Set[Tuple[int, ...]]:
    if system.n_variables <= 20:
        return brute_force_solutions(system)
    return set(search_solutions(system.equations, system.variables))


def verify_equivalence(original: EquationSystem, reduced: ReducedSystem) -> bool:
    """True iff lifting the residual solutions gives exactly the original solutions."""
    names = original.variables
    covered = list(reduced.fixed) + list(reduced.substitutions) + list(reduced.free_order)
    if len(covered) != len(set(covered)) or set(covered) != set(names):
        return False
    if set(reduced.residual.variables) != set(reduced.free_order):
        return False
    lifted = set()
    order = reduced.residual.variables
    for sol in _solutions(reduced.residual):
        full = reduced.lift(dict(zip(order, sol)))
        if any(full[v] not in (0, 1) for v in names):
            return False
        lifted.add(tuple(full[v] for v in names))
    return lifted == _solutions(original)


# --------------------------------------------------------------------------
# rule engine


def _elimination_rank(v: str) -> tuple:
    """Higher rank is eliminated first: carries, then auxiliaries, then factor bits."""
    info = var_info(v)
    kind = {"carry": 2, "aux": 1, "factor-bit": 0}[info.kind]
    return (kind, info.factor, info.bit)


class _Reducer:
    def __init__(self, system: EquationSystem):
        self.system = system
        self.fixed: Dict[str, int] = {}
        self.subs: Dict[str, BinaryPolynomial] = {}
        self.eqs: List[BinaryPolynomial] = []
        self.passes = 0
        self._set_equations(system.equations)

    # bookkeeping ------------------------------------------------------
    def _set_equations(self, eqs):
        out, seen = [], set()
        for eq in eqs:
            eq = eq.normalized()
            if eq.is_zero():
                continue
            if eq.is_constant():
                raise InfeasibleSystemError(f"contradiction {eq.constant} = 0")
            if eq not in seen:
                seen.add(eq)
                out.append(eq)
        self.eqs = out

    def assign(self, var: str, expr: BinaryPolynomial):
        if var in self.fixed or var in self.subs:
            raise ReductionError(f"{var} assigned twice")
        if expr.is_constant():
            value = expr.constant
            if value not in (0, 1):
                raise InfeasibleSystemError(f"{var} would be {value}")
            self.fixed[var] = value
        else:
            self.subs[var] = expr
        mapping = {var: expr}
        for v in list(self.subs):
            if v != var:
                new = self.subs[v].substitute(mapping)
                if new.is_constant():
                    del self.subs[v]
                    if new.constant not in (0, 1):
                        raise InfeasibleSystemError(f"{v} would be {new.constant}")
                    self.fixed[v] = new.constant
                else:
                    self.subs[v] = new
        self._set_equations([eq.substitute(mapping) for eq in self.eqs])

    def _add_equations(self, extra):
        self._set_equations(self.eqs + list(extra))

    # rules ------------------------------------------------------------
    def r5_constants(self) -> bool:
        """Single-monomial equations ``a*m + b = 0`` decide the monomial."""
        for eq in self.eqs:
            terms = eq.terms
            if len(terms) != 1:
                continue
            (a, mono), b = terms[0], eq.constant
            if b == 0:
                if len(mono) == 1:
                    self.assign(mono[0], BinaryPolynomial.const(0))
                    return True
                continue
            if b == -a:
                for v in mono:
                    if v not in self.fixed and v not in self.subs:
                        self.assign(v, ONE)
                return True
            raise InfeasibleSystemError(f"{eq} = 0 has no binary solution")
        return False

    def r3_saturated(self) -> bool:
        """Positive sum equal to its maximum: every monomial is 1."""
        for eq in self.eqs:
            terms = eq.terms
            if terms and all(c > 0 for c, _ in terms) and -eq.constant == sum(c for c, _ in terms):
                for v in sorted({v for _, m in terms for v in m}, key=var_key):
                    if v not in self.fixed and v not in self.subs:
                        self.assign(v, ONE)
                return True
        return False

    def r4_linear_pairs(self) -> bool:
        """``x + y = 1`` -> complement; ``x - y = 0`` with a carry -> equality;
        ``x1 + ... + xk = 1`` (k >= 3) -> eliminate one variable."""
        for eq in self.eqs:
            if not eq.is_linear():
                continue
            terms = eq.terms
            names = [m[0] for _, m in terms]
            coeffs = [c for c, _ in terms]
            if len(terms) == 2 and coeffs == [1, 1] and eq.constant == -1:
                # eliminate the lower-factor bit (p), keep q; carries go first
                x, y = sorted(names, key=lambda v: (-_elimination_rank(v)[0], _elimination_rank(v)[1:]))
                self.assign(x, ONE - BinaryPolynomial.var(y))
                return True
            if len(terms) == 2 and sorted(coeffs) == [-1, 1] and eq.constant == 0:
                ranked = sorted(names, key=_elimination_rank, reverse=True)
                if var_info(ranked[0]).kind == "carry":
                    self.assign(ranked[0], BinaryPolynomial.var(ranked[1]))
                    return True
            if len(terms) >= 3 and all(c == 1 for c in coeffs) and eq.constant == -1:
                target = max(names, key=_elimination_rank)
                rest = [v for v in names if v != target]
                expr = ONE
                for v in rest:
                    expr = expr - BinaryPolynomial.var(v)
                # keep the eliminated variable binary: at most one of the rest is 1
                domain = [BinaryPolynomial.monomial([a, b]) for a, b in itertools.combinations(rest, 2)]
                self.assign(target, expr)
                self._add_equations(domain)
                return True
        return False

    def r2_nonnegative_zero(self) -> bool:
        """Sum of positive monomials equal to zero: each monomial is zero."""
        for i, eq in enumerate(self.eqs):
            terms = eq.terms
            if eq.constant == 0 and len(terms) > 1 and all(c > 0 for c, _ in terms):
                singles = [m[0] for _, m in terms if len(m) == 1]
                if singles:
                    self.assign(singles[0], BinaryPolynomial.const(0))
                    return True
                rest = self.eqs[:i] + self.eqs[i + 1:]
                self._set_equations(rest + [BinaryPolynomial.monomial(m) for _, m in terms])
                return True
        return False

    def r6_range(self) -> bool:
        """Interval bounds: reject impossible equations, fix variables whose
        opposite value would make an equation impossible."""
        for eq in self.eqs:
            lo, hi = eq.bounds()
            if lo > 0 or hi < 0:
                raise InfeasibleSystemError(f"{eq} = 0 is out of range [{lo}, {hi}]")
        for eq in self.eqs:
            for v in sorted(eq.variables, key=var_key):
                ok = [_probe_feasible(eq, v, value) for value in (0, 1)]
                if not any(ok):
                    raise InfeasibleSystemError(f"{eq} = 0 infeasible for both values of {v}")
                if not all(ok):
                    self.assign(v, BinaryPolynomial.const(ok.index(True)))
                    return True
        return False

    def rule_loop(self):
        rules = (self.r5_constants, self.r3_saturated, self.r4_linear_pairs, self.r2_nonnegative_zero, self.r6_range)
        while True:
            self.passes += 1
            if self.passes > MAX_PASSES:
                raise ReductionError("rule loop did not converge")
            if not any(rule() for rule in rules):
                return

    # exhaustive implication -------------------------------------------
    def implications(self) -> bool:
        """Enumerate what is left; fix constants and pair up p_i/q_i complements."""
        live = sorted({v for eq in self.eqs for v in eq.variables}, key=var_key)
        if not live:
            return False
        sols = list(search_solutions(self.eqs, live, limit=IMPLICATION_LIMIT + 1))
        if not sols:
            raise InfeasibleSystemError("no assignment satisfies the reduced system")
        if len(sols) > IMPLICATION_LIMIT:
            log.info("implication pass skipped: more than %d solutions", IMPLICATION_LIMIT)
            return False
        cols = np.array(sols, dtype=np.int8).T
        changed = False
        for v, col in zip(live, cols):
            if col.min() == col.max():
                self.assign(v, BinaryPolynomial.const(int(col[0])))
                changed = True
        if changed:
            return True
        pos = {v: i for i, v in enumerate(live)}
        for v in live:
            info = var_info(v)
            if info.kind != "factor-bit" or info.factor != 0:
                continue
            partner = factor_bit(1, info.bit)
            if partner in pos and np.all(cols[pos[v]] != cols[pos[partner]]):
                self.assign(v, ONE - BinaryPolynomial.var(partner))
                changed = True
        return changed

    def run(self) -> ReducedSystem:
        self.rule_loop()
        while self.implications():
            self.rule_loop()
        free = [v for v in self.system.variables if v not in self.fixed and v not in self.subs]
        residual = _pairwise_residual(free, self.subs, self.eqs)
        if residual is None:
            residual = list(self.eqs)
        return ReducedSystem(
            original_variables=list(self.system.variables),
            fixed=dict(sorted(self.fixed.items(), key=lambda kv: var_key(kv[0]))),
            substitutions=dict(sorted(self.subs.items(), key=lambda kv: var_key(kv[0]))),
            residual=EquationSystem(free, residual, self.system.layout),
            free_order=free,
            layout=self.system.layout,
            passes=self.passes,
        )


def _probe_feasible(eq: BinaryPolynomial, var: str, value: int) -> bool:
    lo = hi = eq.constant
    for c, mono in eq.terms:
        if var in mono:
            if value == 0:
                continue
            if len(mono) == 1:
                lo += c
                hi += c
                continue
        if c > 0:
            hi += c
        else:
            lo += c
    return lo <= 0 <= hi


def _pairwise_residual(free, subs, eqs) -> Optional[List[BinaryPolynomial]]:
    """Rewrite the residual as pairwise constraints ``p_i q_j + p_j q_i = z``.

    Applies when every free variable is a q-bit whose p-partner was replaced
    by ``1 - q``.  Returns None when the pairwise system would not have the
    same solutions as ``eqs``.
    """
    if len(free) < 2 or len(free) > 20:
        return None
    for v in free:
        info = var_info(v)
        if info.kind != "factor-bit" or info.factor != 1:
            return None
        if subs.get(factor_bit(0, info.bit)) != ONE - BinaryPolynomial.var(v):
            return None
    current = brute_force_solutions(EquationSystem(free, eqs))
    if not current:
        return None
    pairs = []
    for i, j in itertools.combinations(range(len(free)), 2):
        z = {s[i] ^ s[j] for s in current}
        if len(z) != 1:
            return None
        qi, qj = free[i], free[j]
        pi, pj = factor_bit(0, var_info(qi).bit), factor_bit(0, var_info(qj).bit)
        pair = (
            BinaryPolynomial.monomial([pi, qj]) + BinaryPolynomial.monomial([pj, qi]) - z.pop()
        )
        pairs.append(pair.substitute(subs).normalized())
    if brute_force_solutions(EquationSystem(free, pairs)) != current:
        return None
    return pairs


def reduce(system: EquationSystem) -> ReducedSystem:
    """Reduce ``system`` to fixed values, substitutions and a residual system.

    Raises :class:`InfeasibleSystemError` if no binary assignment satisfies
    the system.
    """
    if system.n_variables > MAX_REDUCE_VARS:
        raise ValueError(f"{system.n_variables} variables exceeds limit {MAX_REDUCE_VARS}")
    return _Reducer(system).run()
