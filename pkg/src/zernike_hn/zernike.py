"""Builders for H_N, its integrals I_N, I'_N, C and the auxiliary G_N, J_N.

Everything here is exact.  With ``ModelSpec(order=N)`` the gammas stay symbolic
(``g1 .. gN``); a ``bound`` mapping fixes some of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, List, Mapping, Optional

import numpy as np

from .phasepoly import (
    Q1,
    Q2,
    ParamPolynomial,
    PhasePolynomial,
    poisson_bracket,
)

DEFAULT_MAX_ORDER = 12


class IndexOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    """Order N plus either symbolic gammas (``bound=None``) or fixed values.

    In bound mode, gammas missing from the mapping are zero.  Bound values
    that are exact rationals are folded into the polynomials; any other
    value keeps its symbol ``g<n>`` and is supplied at evaluation time via
    :meth:`numeric_params`.
    """

    order: int
    bound: Optional[Mapping[int, complex]] = None
    max_order: int = DEFAULT_MAX_ORDER

    def __post_init__(self):
        if not isinstance(self.order, int) or self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order!r}")
        if self.order > self.max_order:
            raise ValueError(f"order {self.order} exceeds the configured maximum {self.max_order}")
        if self.bound is not None:
            bad = [n for n in self.bound if not (1 <= n <= self.order)]
            if bad:
                raise ValueError(f"bound gamma indices {bad} outside 1..{self.order}")
            object.__setattr__(self, "bound", dict(self.bound))

    @property
    def symbolic(self) -> bool:
        return self.bound is None

    def gamma(self, n: int) -> ParamPolynomial:
        if self.bound is None:
            return ParamPolynomial.symbol(f"g{n}")
        exact = _exact_value(self.bound.get(n, 0))
        if exact is not None:
            return ParamPolynomial.const(exact)
        return ParamPolynomial.symbol(f"g{n}")

    def numeric_params(self) -> Dict[str, complex]:
        if self.bound is None:
            return {}
        return {f"g{n}": complex(v) for n, v in self.bound.items()
                if _exact_value(v) is None}

    def with_bound(self, bound: Mapping[int, complex]) -> "ModelSpec":
        return ModelSpec(self.order, bound, self.max_order)


def _exact_value(v):
    if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
        return v
    c = complex(v)
    if c.imag == 0 and c.real.is_integer():
        return int(c.real)
    return None


def theta(m: int) -> int:
    if m < 0:
        raise ValueError("theta is defined on non-negative integers")
    return 1 if m % 2 == 0 else 0


def phi(n: int) -> int:
    """Greatest even integer strictly below n."""
    if n < 1:
        raise ValueError("phi is defined for n >= 1")
    return n - 2 if n % 2 == 0 else n - 1


def _q(a: int, b: int) -> PhasePolynomial:
    return PhasePolynomial.monomial((a, b, 0, 0))


def _q_ee(n: int, j: int) -> PhasePolynomial:
    s = (-1) ** (n // 2 + 1)
    out = PhasePolynomial()
    for k in range(j // 2 + 1):
        c = (-1) ** k * comb(n, 2 * k)
        out = out + (s * _q(n - 2 * k, 2 * k) + _q(2 * k, n - 2 * k)) * c
    return out * (-1) ** (j // 2)


def _q_eo(n: int, j: int) -> PhasePolynomial:
    s = (-1) ** (n // 2)
    out = PhasePolynomial()
    for k in range((j - 1) // 2 + 1):
        c = (-1) ** k * comb(n, 2 * k + 1)
        out = out + (s * _q(n - 2 * k - 1, 2 * k + 1) + _q(2 * k + 1, n - 2 * k - 1)) * c
    return out * (-1) ** ((j - 1) // 2)


def _q_oe(n: int, j: int) -> PhasePolynomial:
    s = (-1) ** ((n + 1) // 2)
    out = PhasePolynomial()
    # the first sum is empty when j == 0
    for k in range(j // 2):
        out = out + _q(n - 2 * k - 1, 2 * k + 1) * ((-1) ** k * s * comb(n, 2 * k + 1))
    for k in range(j // 2 + 1):
        out = out + _q(2 * k, n - 2 * k) * ((-1) ** k * comb(n, 2 * k))
    return out * (-1) ** (j // 2)


def _q_oo(n: int, j: int) -> PhasePolynomial:
    s = (-1) ** ((n + 1) // 2)
    out = PhasePolynomial()
    for k in range((j - 1) // 2 + 1):
        term = _q(n - 2 * k, 2 * k) * (s * comb(n, 2 * k)) + _q(2 * k + 1, n - 2 * k - 1) * comb(n, 2 * k + 1)
        out = out + term * (-1) ** k
    return out * (-1) ** ((j - 1) // 2)


@lru_cache(maxsize=None)
def build_q(n: int, j: int) -> PhasePolynomial:
    """Homogeneous degree-n polynomial Q^(n-j, j)(q1, q2)."""
    if n < 1:
        raise ValueError("n must be positive")
    if not (0 <= j <= phi(n)):
        raise IndexOutOfRange(f"j={j} outside 0..phi({n})={phi(n)}")
    te, tj = theta(n), theta(j)
    if te and tj:
        return _q_ee(n, j)
    if te:
        return _q_eo(n, j)
    if tj:
        return _q_oe(n, j)
    return _q_oo(n, j)


def _dot() -> PhasePolynomial:
    return PhasePolynomial({(1, 0, 1, 0): 1, (0, 1, 0, 1): 1})


def free_hamiltonian() -> PhasePolynomial:
    return PhasePolynomial({(0, 0, 2, 0): 1, (0, 0, 0, 2): 1})


@lru_cache(maxsize=None)
def build_g(n: int) -> PhasePolynomial:
    """G_n = (q1 p1 + q2 p2)^n."""
    if n < 1:
        raise ValueError("n must be positive")
    return _dot() ** n


@lru_cache(maxsize=None)
def build_j(n: int) -> PhasePolynomial:
    """J_n = sum_j p2^(n-j) p1^j Q^(n-j, j)."""
    if n < 1:
        raise ValueError("n must be positive")
    out = PhasePolynomial()
    for j in range(phi(n) + 1):
        out = out + PhasePolynomial.monomial((0, 0, j, n - j)) * build_q(n, j)
    return out


def build_j_prime(n: int) -> PhasePolynomial:
    return build_j(n).swap12()


def build_c() -> PhasePolynomial:
    """Angular momentum q1 p2 - q2 p1."""
    return PhasePolynomial({(1, 0, 0, 1): 1, (0, 1, 1, 0): -1})


def build_hamiltonian(spec: ModelSpec) -> PhasePolynomial:
    out = free_hamiltonian()
    for n in range(1, spec.order + 1):
        g = spec.gamma(n)
        if not g.is_zero():
            out = out + build_g(n) * g
    return out


def build_i(spec: ModelSpec) -> PhasePolynomial:
    out = PhasePolynomial.monomial((0, 0, 0, 2))
    for n in range(1, spec.order + 1):
        g = spec.gamma(n)
        if not g.is_zero():
            out = out + build_j(n) * g
    return out


def build_i_prime(spec: ModelSpec) -> PhasePolynomial:
    return build_i(spec).swap12()


def casimir_correction(spec: ModelSpec) -> PhasePolynomial:
    """sum_{k=1}^{phi(N+1)/2} (-1)^k gamma_{2k} C^{2k}."""
    c = build_c()
    out = PhasePolynomial()
    for k in range(1, phi(spec.order + 1) // 2 + 1):
        g = spec.gamma(2 * k)
        if not g.is_zero():
            out = out + c ** (2 * k) * (g * (-1) ** k)
    return out


def relation_residual(spec: ModelSpec) -> PhasePolynomial:
    """H_N - I_N - I'_N - correction; exactly zero when the relation holds."""
    return build_hamiltonian(spec) - build_i(spec) - build_i_prime(spec) - casimir_correction(spec)


def relation_text(order: int) -> str:
    """Human-readable relation among H_N, I_N, I'_N, C, e.g. ``H2 = I2 + I2' - g2*C^2``."""
    text = f"H{order} = I{order} + I{order}'"
    for k in range(1, phi(order + 1) // 2 + 1):
        text += f" {'-' if k % 2 else '+'} g{2 * k}*C^{2 * k}"
    return text


def parity_split(n: int) -> PhasePolynomial:
    """G_n - J_n - J'_n - [n even] (-1)^(n/2) C^n; exactly zero."""
    out = build_g(n) - build_j(n) - build_j_prime(n)
    if n % 2 == 0:
        out = out - build_c() ** n * (-1) ** (n // 2)
    return out


def euler_residual(n: int, j: int) -> PhasePolynomial:
    q = build_q(n, j)
    return (PhasePolynomial.monomial((1, 0, 0, 0)) * q.partial(Q1)
            + PhasePolynomial.monomial((0, 1, 0, 0)) * q.partial(Q2) - q * n)


def recurrence_residual(n: int, a: int) -> PhasePolynomial:
    """dQ^(n-a,a)/dq1 + dQ^(n-a-1,a+1)/dq2 - (n-a-1) C(n,a+1) q2^(n-a-2) q1^(a+1); needs a+1 <= phi(n)."""
    lhs = build_q(n, a).partial(Q1) + build_q(n, a + 1).partial(Q2)
    rhs = PhasePolynomial.monomial((a + 1, n - a - 2, 0, 0), (n - a - 1) * comb(n, a + 1))
    return lhs - rhs


def lemma_gj(m: int, n: int) -> PhasePolynomial:
    return poisson_bracket(build_g(m), build_j(n))


def lemma_free(n: int) -> PhasePolynomial:
    """{G_n, p2^2} + {p1^2 + p2^2, J_n}."""
    return (poisson_bracket(build_g(n), PhasePolynomial.monomial((0, 0, 0, 2)))
            + poisson_bracket(free_hamiltonian(), build_j(n)))


@dataclass
class IdentityCheck:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{self.name} : {'PASS' if self.passed else 'FAIL'}" + (f" ({self.detail})" if self.detail else "")


@dataclass
class CertificationReport:
    order: int
    checks: List[IdentityCheck] = field(default_factory=list)
    jacobian_ranks: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "passed": self.passed,
            "checks": [{"identity": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "jacobian_ranks": self.jacobian_ranks,
        }


def _random_params(symbols, rng) -> Dict[str, complex]:
    return {s: complex(rng.normal(), rng.normal()) for s in sorted(symbols)}


def jacobian_rank(funcs, point, params, rel_tol: float = 1e-8) -> int:
    rows = []
    for f in funcs:
        rows.append([f.partial(i).evaluate(point, params) for i in range(4)])
    s = np.linalg.svd(np.array(rows, dtype=complex), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def certify_superintegrability(spec: ModelSpec, points: int = 10, seed: int = 0) -> CertificationReport:
    """Exact bracket checks plus a random-point Jacobian rank test of (H, I, C)."""
    h, i, ip, c = build_hamiltonian(spec), build_i(spec), build_i_prime(spec), build_c()
    n = spec.order
    report = CertificationReport(order=n)
    report.checks.append(IdentityCheck(f"{{H{n}, I{n}}} = 0", poisson_bracket(h, i).is_zero()))
    report.checks.append(IdentityCheck(f"{{H{n}, I{n}'}} = 0", poisson_bracket(h, ip).is_zero()))
    report.checks.append(IdentityCheck(f"{{H{n}, C}} = 0", poisson_bracket(h, c).is_zero()))

    rng = np.random.default_rng(seed)
    symbols = h.parameters() | i.parameters()
    base = spec.numeric_params()
    for _ in range(points):
        params = dict(base)
        params.update(_random_params(symbols - set(base), rng))
        point = rng.normal(size=4) + 1j * rng.normal(size=4)
        report.jacobian_ranks.append(jacobian_rank((h, i, c), point, params))
    ok = all(r == 3 for r in report.jacobian_ranks)
    report.checks.append(IdentityCheck(
        f"rank d(H{n}, I{n}, C) = 3", ok, f"{points} random complex points"))
    return report


def lemma_checks(n: int, max_order: int) -> List[IdentityCheck]:
    """Proof-lemma identities at order n."""
    checks = [IdentityCheck(f"q.grad Q({n - j},{j}) = {n} Q({n - j},{j})", euler_residual(n, j).is_zero())
              for j in range(phi(n) + 1)]
    checks += [IdentityCheck(f"recurrence n={n} a={a}", recurrence_residual(n, a).is_zero())
               for a in range(phi(n))]
    checks += [IdentityCheck(f"{{G{m}, J{n}}} = 0", lemma_gj(m, n).is_zero())
               for m in range(1, max_order + 1)]
    checks.append(IdentityCheck(f"{{G{n}, p2^2}} + {{p^2, J{n}}} = 0", lemma_free(n).is_zero()))
    return checks


def verification_checks(max_order: int, seed: int = 0, points: int = 5) -> List[IdentityCheck]:
    """Everything `verify` certifies for 1 <= N <= max_order, in report order."""
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    checks: List[IdentityCheck] = []
    for n in range(1, max_order + 1):
        spec = ModelSpec(n, max_order=max(max_order, DEFAULT_MAX_ORDER))
        checks += certify_superintegrability(spec, points=points, seed=seed + n).checks
        checks.append(IdentityCheck(relation_text(n), relation_residual(spec).is_zero()))
        split = f"G{n} = J{n} + J{n}'" + ("" if n % 2 else f" {'-' if n % 4 else '+'} C^{n}")
        checks.append(IdentityCheck(split, parity_split(n).is_zero()))
        checks += lemma_checks(n, max_order)
    return checks
