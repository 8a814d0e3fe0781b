"""Racah generators L1, L2, L3 and the exact solve for {L2, L3}.

The bracket {L2, L3} is matched against the ansatz

    sum_k F_k(gamma, H) L1^(2k+1),   k = 0 .. N-1,

where F_k is polynomial in the gammas and in a formal commuting symbol H.
H is replaced by the phase-space polynomial H_N before matching, so the
identity is certified in phase space, not in an abstract algebra.

Two scalings leave every object homogeneous: q -> s q, p -> p / s (gammas
and H weigh -2) and (q, p) -> t (q, p) (gamma_n weighs 2 - 2n, H and L1
weigh 2).  Only ansatz monomials with the weights of {L2, L3} can
contribute, which keeps the linear system small.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple

from .linsolve import InconsistentSystem, nullity, solve_sparse
from .phasepoly import ParamPolynomial, PhasePolynomial, format_param, parse, poisson_bracket, symbol_key
from .zernike import ModelSpec, build_c, build_hamiltonian, build_i, build_i_prime

MAX_H_DEGREE = 2


class DecompositionFailed(RuntimeError):
    def __init__(self, order: int, residual: PhasePolynomial):
        super().__init__(f"no decomposition of {{L2, L3}} of the expected form at N={order}")
        self.order = order
        self.residual = residual


@dataclass(frozen=True)
class RacahGenerators:
    L1: PhasePolynomial
    L2: PhasePolynomial
    L3: PhasePolynomial


@dataclass
class RacahDecomposition:
    """``coefficients[k]`` multiplies L1^(2k+1); it may contain the symbol H."""

    order: int
    coefficients: List[ParamPolynomial]
    residual: PhasePolynomial
    h_degree_cap: int = 1
    unknowns: int = 0
    free_unknowns: int = 0

    @property
    def alpha(self) -> List[ParamPolynomial]:
        return [_h_part(c, 0) for c in self.coefficients]

    @property
    def beta(self) -> List[ParamPolynomial]:
        return [_h_part(c, 1) for c in self.coefficients]

    def table_coefficients(self) -> List[ParamPolynomial]:
        """Coefficients as laid out in the published table: L1, (2L1)^3, (2L1)^5, ..."""
        return to_table_layout(self.coefficients)

    def lines(self) -> List[str]:
        return format_table_lines(self.table_coefficients())


def _h_part(c: ParamPolynomial, h: int) -> ParamPolynomial:
    out = {}
    for m, v in c.terms.items():
        d = dict(m)
        if d.pop("H", 0) == h:
            out[tuple(sorted(d.items(), key=lambda se: symbol_key(se[0])))] = v
    return ParamPolynomial(out)


def to_table_layout(coefficients: Sequence[ParamPolynomial]) -> List[ParamPolynomial]:
    return [c if k == 0 else c * Fraction(1, 2 ** (2 * k + 1)) for k, c in enumerate(coefficients)]


def from_table_layout(coefficients: Sequence[ParamPolynomial]) -> List[ParamPolynomial]:
    return [c if k == 0 else c * 2 ** (2 * k + 1) for k, c in enumerate(coefficients)]


def power_label(k: int) -> str:
    return "L1" if k == 0 else f"(2L1)^{2 * k + 1}"


def format_table_lines(table: Sequence[ParamPolynomial]) -> List[str]:
    return [f"{power_label(k)}: {format_param(c)}" for k, c in enumerate(table)]


def build_generators(spec: ModelSpec) -> RacahGenerators:
    l1 = build_c() * Fraction(1, 2)
    l2 = (build_i_prime(spec) - build_i(spec)) * Fraction(1, 2)
    return RacahGenerators(l1, l2, poisson_bracket(l1, l2))


def _weights(pm, phase) -> Tuple[int, int]:
    # (q -> s q, p -> p/s) and ((q, p) -> t (q, p))
    w1 = phase[0] + phase[1] - phase[2] - phase[3]
    w2 = sum(phase)
    for s, e in pm:
        if s == "H":
            w1 += -2 * e
            w2 += 2 * e
        elif s[0] == "g":
            w1 += -2 * e
            w2 += (2 - 2 * int(s[1:])) * e
        else:
            raise ValueError(f"unexpected symbol {s} in a Racah bracket")
    return w1, w2


def _flatten(p: PhasePolynomial) -> Dict[tuple, object]:
    return {(m, pm): c for m, coeff in p.terms.items() for pm, c in coeff.terms.items()}


@dataclass
class _Unknown:
    k: int
    h: int
    gammas: Tuple[int, ...]

    def monomial(self) -> ParamPolynomial:
        out = ParamPolynomial.const(1)
        for n in self.gammas:
            out = out * ParamPolynomial.symbol(f"g{n}")
        if self.h:
            out = out * ParamPolynomial.symbol("H", self.h)
        return out


def _enumerate_unknowns(order: int, h_cap: int, target: Tuple[int, int], gamma_degree: int) -> List[_Unknown]:
    out = []
    for h in range(h_cap + 1):
        for k in range(order):
            for d in range(gamma_degree + 1):
                for gs in combinations_with_replacement(range(1, order + 1), d):
                    pm = tuple((f"g{n}", gs.count(n)) for n in sorted(set(gs)))
                    if h:
                        pm = pm + (("H", h),)
                    # weight of L1^(2k+1): (0, 2(2k+1))
                    w1, w2 = _weights(pm, (0, 0, 0, 0))
                    if (w1, w2 + 2 * (2 * k + 1)) == target:
                        out.append(_Unknown(k, h, gs))
    return out


def substitute_hamiltonian(coefficients: Sequence[ParamPolynomial], spec: ModelSpec,
                           l1: PhasePolynomial) -> PhasePolynomial:
    """sum_k F_k(H -> H_N) L1^(2k+1)."""
    h = build_hamiltonian(spec)
    total = PhasePolynomial()
    l1sq = l1 * l1
    power = l1
    for c in coefficients:
        if not c.is_zero():
            total = total + PhasePolynomial.const(c).substitute_param("H", h) * power
        power = power * l1sq
    return total


def decompose(spec: ModelSpec, column_order: Optional[str] = None) -> RacahDecomposition:
    """Solve {L2, L3} = sum_k F_k(gamma, H) L1^(2k+1) exactly.

    The H-degree cap starts at 1 and is raised to 2 if the system is
    inconsistent.  ``column_order="reversed"`` pivots the unknowns in the
    opposite order, to check that the solution does not depend on it.
    Raises DecompositionFailed carrying the nonzero residual.
    """
    if not spec.symbolic:
        raise ValueError("the Racah decomposition is computed with symbolic gammas")
    gens = build_generators(spec)
    rhs = poisson_bracket(gens.L2, gens.L3)
    n = spec.order
    flat_rhs = _flatten(rhs)
    weights = {_weights(pm, m) for (m, pm) in flat_rhs}
    if len(weights) != 1:
        raise DecompositionFailed(n, rhs)
    (target,) = weights
    gamma_degree = max(c.degree() for c in rhs.terms.values())

    h_poly = build_hamiltonian(spec)
    l1_powers = [gens.L1 ** (2 * k + 1) for k in range(n)]
    h_powers = [PhasePolynomial.const(1), h_poly, h_poly * h_poly]

    last_residual = rhs
    for cap in range(1, MAX_H_DEGREE + 1):
        unknowns = _enumerate_unknowns(n, cap, target, gamma_degree)
        columns = []
        for u in unknowns:
            g = ParamPolynomial.const(1)
            for idx in u.gammas:
                g = g * ParamPolynomial.symbol(f"g{idx}")
            columns.append(_flatten(h_powers[u.h] * l1_powers[u.k] * g))
        rows: Dict[tuple, Dict[int, object]] = {}
        for j, col in enumerate(columns):
            for key, v in col.items():
                rows.setdefault(key, {})[j] = v
        for key in flat_rhs:
            rows.setdefault(key, {})
        system = [(coeffs, flat_rhs.get(key, 0)) for key, coeffs in rows.items()]
        # H-carrying unknowns pivot last so they stay zero when the system is under-determined
        order = sorted(range(len(unknowns)), key=lambda j: (unknowns[j].h, unknowns[j].k, unknowns[j].gammas))
        if column_order == "reversed":
            order = order[::-1]
        try:
            x = solve_sparse(system, len(unknowns), order)
        except InconsistentSystem:
            x = solve_sparse(system, len(unknowns), order, strict=False)
            coefficients = _collect(unknowns, x, n)
            last_residual = rhs - substitute_hamiltonian(coefficients, spec, gens.L1)
            continue
        coefficients = _collect(unknowns, x, n)
        residual = rhs - substitute_hamiltonian(coefficients, spec, gens.L1)
        if not residual.is_zero():
            last_residual = residual
            continue
        free = nullity([c for c, _ in system], len(unknowns))
        return RacahDecomposition(n, coefficients, residual, cap, len(unknowns), free)
    raise DecompositionFailed(n, last_residual)


def _collect(unknowns: Sequence[_Unknown], x: Sequence[Fraction], order: int) -> List[ParamPolynomial]:
    coefficients = [ParamPolynomial() for _ in range(order)]
    for u, v in zip(unknowns, x):
        if v:
            coefficients[u.k] = coefficients[u.k] + u.monomial() * (v.numerator if v.denominator == 1 else v)
    return coefficients


def l1_l3_residual(spec: ModelSpec) -> PhasePolynomial:
    """{L1, L3} + L2, exactly zero."""
    g = build_generators(spec)
    return poisson_bracket(g.L1, g.L3) + g.L2


# Published closed forms of {L2, L3}, one entry per power L1, (2L1)^3, ...,
# each given as (scale, inner) meaning scale * inner.
_TABLE2_SOURCE = {
    1: [(-1, "1 * g1^2")],
    2: [(-1, "1 * g1^2 + 2 * g2 H"), (-1, "1 * g2^2")],
    3: [(-1, "1 * g1^2 + 2 * g2 H"), (-1, "1 * g2^2 - 2 * g1 g3"), (Fraction(-3, 2), "1 * g3^2")],
    4: [(-1, "1 * g1^2 + 2 * g2 H"), (-1, "1 * g2^2 - 2 * g1 g3 - 2 * g4 H"),
        (Fraction(-3, 2), "1 * g3^2 - 2 * g2 g4"), (-2, "1 * g4^2")],
    5: [(-1, "1 * g1^2 + 2 * g2 H"), (-1, "1 * g2^2 - 2 * g1 g3 - 2 * g4 H"),
        (Fraction(-3, 2), "1 * g3^2 - 2 * g2 g4 + 2 * g1 g5"), (-2, "1 * g4^2 - 2 * g3 g5"),
        (Fraction(-5, 2), "1 * g5^2")],
    6: [(-1, "1 * g1^2 + 2 * g2 H"), (-1, "1 * g2^2 - 2 * g1 g3 - 2 * g4 H"),
        (Fraction(-3, 2), "1 * g3^2 - 2 * g2 g4 + 2 * g1 g5 + 2 * g6 H"),
        (-2, "1 * g4^2 - 2 * g3 g5 + 2 * g2 g6"), (Fraction(-5, 2), "1 * g5^2 - 2 * g4 g6"),
        (-3, "1 * g6^2")],
}


def table2_reference(order: int) -> List[ParamPolynomial]:
    """Published {L2, L3} coefficients in table layout, N <= 6."""
    if order not in _TABLE2_SOURCE:
        raise KeyError(f"no published Racah coefficients for N={order}")
    return [parse(inner).coefficient((0, 0, 0, 0)) * scale for scale, inner in _TABLE2_SOURCE[order]]


@dataclass
class Table2Comparison:
    order: int
    matches: List[bool] = field(default_factory=list)
    computed: List[ParamPolynomial] = field(default_factory=list)
    expected: List[ParamPolynomial] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.matches) and all(self.matches)


def verify_table2(max_order: int = 6) -> List[Table2Comparison]:
    if not 1 <= max_order <= 6:
        raise ValueError("the published table covers 1 <= N <= 6")
    out = []
    for n in range(1, max_order + 1):
        got = decompose(ModelSpec(n)).table_coefficients()
        want = table2_reference(n)
        size = max(len(got), len(want))
        got += [ParamPolynomial()] * (size - len(got))
        want += [ParamPolynomial()] * (size - len(want))
        out.append(Table2Comparison(n, [a == b for a, b in zip(got, want)], got, want))
    return out
