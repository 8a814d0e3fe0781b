"""Symplectic realizations of the Poisson sl(2, R) coalgebra.

Bracket normalization follows

    {J3, J+} = 2 J+,   {J3, J-} = -2 J-,   {J-, J+} = 4 J3,

with Casimir J- J+ - J3^2.  This differs from the usual sl(2) conventions by
constant factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .phasepoly import ParamPolynomial, PhasePolynomial, poisson_bracket
from .zernike import IdentityCheck, ModelSpec, build_c, build_hamiltonian


@dataclass(frozen=True)
class Sl2Realization:
    Jminus: PhasePolynomial
    Jplus: PhasePolynomial
    J3: PhasePolynomial
    particles: int
    lambdas: Tuple[Optional[object], ...]

    def generators(self):
        return {"J3": self.J3, "J+": self.Jplus, "J-": self.Jminus}


def _lambda(i: int, value) -> ParamPolynomial:
    if value is None:
        return ParamPolynomial.symbol(f"l{i}")
    return ParamPolynomial.coerce(value)


def one_particle(index: int, lam=None) -> Tuple[PhasePolynomial, PhasePolynomial, PhasePolynomial]:
    """(J-, J+, J3) on the canonical pair (q_index, p_index), index in {1, 2}."""
    qi, pi = index - 1, index + 1
    jm = PhasePolynomial.var(qi, 2)
    jp = PhasePolynomial.var(pi, 2) + PhasePolynomial.var(qi, -2) * _lambda(index, lam)
    j3 = PhasePolynomial.var(qi) * PhasePolynomial.var(pi)
    return jm, jp, j3


def build_realization(particles: int = 2, lambdas=(None, None)) -> Sl2Realization:
    """One- or two-particle realization.  ``None`` lambdas stay symbolic (l1, l2)."""
    if particles not in (1, 2):
        raise ValueError("particles must be 1 or 2")
    jm = jp = j3 = PhasePolynomial()
    for i in range(1, particles + 1):
        a, b, c = one_particle(i, lambdas[i - 1])
        jm, jp, j3 = jm + a, jp + b, j3 + c
    return Sl2Realization(jm, jp, j3, particles, tuple(lambdas[:particles]))


def casimir(r: Sl2Realization) -> PhasePolynomial:
    return r.Jminus * r.Jplus - r.J3 * r.J3


def build_coalgebra_hamiltonian(spec: ModelSpec, realization: Optional[Sl2Realization] = None) -> PhasePolynomial:
    """J+ + sum_n gamma_n J3^n on the two-particle realization.

    With the default (lambda = 0) realization this is H_N; with nonzero
    lambdas it is the centrifugal extension, which still commutes with the
    Casimir.
    """
    r = realization or build_realization(2, (0, 0))
    out = r.Jplus
    power = PhasePolynomial.const(1)
    for n in range(1, spec.order + 1):
        power = power * r.J3
        g = spec.gamma(n)
        if not g.is_zero():
            out = out + power * g
    return out


def defining_bracket_residuals(r: Sl2Realization) -> List[Tuple[str, PhasePolynomial]]:
    return [
        ("{J3, J+} = 2 J+", poisson_bracket(r.J3, r.Jplus) - r.Jplus * 2),
        ("{J3, J-} = -2 J-", poisson_bracket(r.J3, r.Jminus) + r.Jminus * 2),
        ("{J-, J+} = 4 J3", poisson_bracket(r.Jminus, r.Jplus) - r.J3 * 4),
    ]


def coalgebra_checks(max_order: int = 8) -> List[IdentityCheck]:
    """Every exact coalgebra identity, one record each."""
    checks = []
    for particles in (1, 2):
        r = build_realization(particles)
        for name, res in defining_bracket_residuals(r):
            checks.append(IdentityCheck(f"{particles}-particle {name}", res.is_zero()))
    r1 = build_realization(1)
    checks.append(IdentityCheck("1-particle Casimir = l1",
                                (casimir(r1) - PhasePolynomial.param("l1")).is_zero()))

    r2 = build_realization(2)
    c2 = casimir(r2)
    for name, g in r2.generators().items():
        checks.append(IdentityCheck(f"{{C(2), {name}}} = 0", poisson_bracket(c2, g).is_zero()))

    c = build_c()
    explicit = (c * c
                + PhasePolynomial.monomial((-2, 2, 0, 0), ParamPolynomial.symbol("l1"))
                + PhasePolynomial.monomial((2, -2, 0, 0), ParamPolynomial.symbol("l2"))
                + PhasePolynomial.param("l1") + PhasePolynomial.param("l2"))
    checks.append(IdentityCheck("C(2) = C^2 + l1 q2^2/q1^2 + l2 q1^2/q2^2 + l1 + l2",
                                (c2 - explicit).is_zero()))

    a, b = one_particle(1), one_particle(2)
    coproduct = (r2.Jminus == a[0] + b[0]) and (r2.Jplus == a[1] + b[1]) and (r2.J3 == a[2] + b[2])
    checks.append(IdentityCheck("two-particle generators = sum of one-particle ones", coproduct))

    r0 = build_realization(2, (0, 0))
    checks.append(IdentityCheck("C(2) at l = 0 equals C^2", (casimir(r0) - c * c).is_zero()))

    for n in range(1, max_order + 1):
        spec = ModelSpec(n, max_order=max(max_order, n))
        hc = build_coalgebra_hamiltonian(spec)
        checks.append(IdentityCheck(f"coalgebra H{n} = direct H{n}", hc == build_hamiltonian(spec)))
        checks.append(IdentityCheck(f"{{H{n}, C(2)}} = 0", poisson_bracket(hc, casimir(r0)).is_zero()))
        hl = build_coalgebra_hamiltonian(spec, r2)
        checks.append(IdentityCheck(f"{{H{n} with l, C(2)}} = 0", poisson_bracket(hl, c2).is_zero()))
    return checks
