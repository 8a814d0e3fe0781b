"""Curvature-dependent trigonometry, coordinate charts and curved forms of H_N.

The curvature ``kappa`` is a runtime real: positive for the sphere, negative
for the hyperbolic plane, and anything with ``|kappa| < KAPPA_ZERO`` is
treated as the flat plane.  All functions accept complex arguments; only
real chart coordinates are checked against the chart domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from math import comb
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .zernike import ModelSpec, build_hamiltonian

KAPPA_ZERO = 1e-14
POLE_GUARD = 1e-10

CHARTS = ("cartesian", "polar", "geodesic_polar", "shifted_geodesic_polar")


class DomainError(ValueError):
    pass


class PoleError(ZeroDivisionError):
    pass


def _flat(kappa: float) -> bool:
    return abs(kappa) < KAPPA_ZERO


def ck(kappa: float, x):
    if _flat(kappa):
        return np.ones_like(x) if isinstance(x, np.ndarray) else 1.0 + 0 * x
    if kappa > 0:
        return np.cos(math.sqrt(kappa) * x)
    return np.cosh(math.sqrt(-kappa) * x)


def sk(kappa: float, x):
    if _flat(kappa):
        return x
    if kappa > 0:
        r = math.sqrt(kappa)
        return np.sin(r * x) / r
    r = math.sqrt(-kappa)
    return np.sinh(r * x) / r


def tk(kappa: float, x):
    c = ck(kappa, x)
    if np.any(np.abs(c) < POLE_GUARD):
        raise PoleError(f"Ck_{kappa}({x}) vanishes")
    return sk(kappa, x) / c


def rho_max(kappa: float) -> float:
    """Upper end of the radial domain: pi / (2 sqrt(kappa)) on the sphere, inf otherwise."""
    return math.pi / (2 * math.sqrt(kappa)) if kappa >= KAPPA_ZERO else math.inf


@dataclass(frozen=True)
class CurvedPoint:
    """A phase-space point in one of the four charts.

    ``unchecked`` is set when complex chart coordinates bypassed the domain
    check.
    """

    chart: str
    coords: Tuple[complex, complex]
    momenta: Tuple[complex, complex]
    kappa: float = 0.0
    gamma1: complex = 0.0
    unchecked: bool = False

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}")

    def as_vector(self) -> np.ndarray:
        return np.array([*self.coords, *self.momenta], dtype=complex)


def _is_real(x) -> bool:
    return complex(x).imag == 0


def check_domain(point: CurvedPoint) -> CurvedPoint:
    if not all(_is_real(c) for c in point.coords):
        return replace(point, unchecked=True)
    a, b = (complex(c).real for c in point.coords)
    if point.chart == "polar":
        if not a > 0:
            raise DomainError(f"polar radius must be positive, got {a}")
    elif point.chart in ("geodesic_polar", "shifted_geodesic_polar"):
        if not 0 < a < rho_max(point.kappa):
            raise DomainError(f"rho={a} outside (0, {rho_max(point.kappa)}) for kappa={point.kappa}")
    if point.chart != "cartesian" and not 0 <= b < 2 * math.pi:
        raise DomainError(f"phi={b} outside [0, 2 pi)")
    return point


def to_cartesian(point: CurvedPoint) -> CurvedPoint:
    point = check_domain(point)
    if point.chart == "cartesian":
        return point
    x, ang = point.coords
    pa, pb = point.momenta
    c, s = np.cos(ang), np.sin(ang)
    if point.chart == "polar":
        q = (x * c, x * s)
        p = (c * pa - s / x * pb, s * pa + c / x * pb)
    else:
        kap = point.kappa
        S, C = sk(kap, x), ck(kap, x)
        if abs(C) < POLE_GUARD:
            raise PoleError(f"Ck vanishes at rho={x}")
        if point.chart == "shifted_geodesic_polar":
            pa = pa - point.gamma1 / 2 * tk(kap, x)
        q = (S * c, S * s)
        p = (c * pa / C - s / S * pb, s * pa / C + c / S * pb)
    return CurvedPoint("cartesian", tuple(complex(v) for v in q), tuple(complex(v) for v in p),
                       point.kappa, point.gamma1, point.unchecked)


def chart_map(chart: str, kappa: float = 0.0, gamma1: complex = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    def f(z):
        ang = z[1] % (2 * math.pi) if chart != "cartesian" else z[1]
        pt = CurvedPoint(chart, (z[0], ang), (z[2], z[3]), kappa, gamma1)
        return to_cartesian(pt).as_vector()
    return f


def _five_point(fn, x, i, h):
    e = np.zeros(4)
    e[i] = h
    return (-fn(x + 2 * e) + 8 * fn(x + e) - 8 * fn(x - e) + fn(x - 2 * e)) / (12 * h)


def numeric_jacobian(fn: Callable[[np.ndarray], np.ndarray], x: Sequence[float],
                     steps: Sequence[float] = (1e-2, 1e-2, 1e-2, 1e-2)) -> np.ndarray:
    """Five-point central differences, Richardson-extrapolated over h and h/2."""
    x = np.asarray(x, dtype=float)
    jac = np.zeros((4, 4), dtype=complex)
    for i, h in enumerate(steps):
        coarse, fine = _five_point(fn, x, i, h), _five_point(fn, x, i, h / 2)
        jac[:, i] = (16 * fine - coarse) / 15
    return jac


def symplectic_defect(fn: Callable[[np.ndarray], np.ndarray], x: Sequence[float],
                      steps: Sequence[float] = (1e-2, 1e-2, 1e-2, 1e-2)) -> float:
    """max |J^T Omega J - Omega| for the numerically evaluated Jacobian J."""
    jac = numeric_jacobian(fn, x, steps)
    omega = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
    return float(np.max(np.abs(jac.T @ omega @ jac - omega)))


def chart_steps(kappa: float, rho: float) -> Tuple[float, float, float, float]:
    """Stencil steps for a polar-type chart at radius rho.

    The radial step shrinks near the origin and the pole.  Chart maps are
    linear in the momenta, so a unit step there is exact.
    """
    room = min(rho, rho_max(kappa) - rho, 1.0)
    return (5e-3 * room, 5e-3, 1.0, 1.0)


def gamma_values(spec: ModelSpec) -> Dict[int, complex]:
    if spec.symbolic:
        raise ValueError("numeric gamma values are required")
    return {n: complex(spec.bound.get(n, 0)) for n in range(1, spec.order + 1)}


def _require_curvature_match(g: Dict[int, complex], kappa: float):
    if abs(g.get(2, 0) + kappa) > 1e-12:
        raise ValueError(f"curved forms need gamma2 = -kappa; got gamma2={g.get(2, 0)}, kappa={kappa}")


def curved_hamiltonian(spec: ModelSpec, kappa: float, rho, phi, p_rho, p_phi) -> complex:
    """p_rho^2 + p_phi^2/Sk^2 + gamma1 Tk p_rho + sum_{n>=3} gamma_n (Tk p_rho)^n."""
    g = gamma_values(spec)
    _require_curvature_match(g, kappa)
    t = tk(kappa, rho) * p_rho
    out = p_rho**2 + p_phi**2 / sk(kappa, rho) ** 2 + g.get(1, 0) * t
    for n in range(3, spec.order + 1):
        if g[n]:
            out = out + g[n] * t**n
    return complex(out)


def eval_curved_hamiltonian(spec: ModelSpec, point: CurvedPoint) -> complex:
    if point.chart != "geodesic_polar":
        raise ValueError("expected a geodesic_polar point")
    point = check_domain(point)
    return curved_hamiltonian(spec, point.kappa, *point.coords, *point.momenta)


def natural_form_potentials(spec: ModelSpec, kappa: float):
    """Central potential U(rho) and momentum-dependent V(rho, p_rho) of the natural form."""
    g = gamma_values(spec)
    _require_curvature_match(g, kappa)
    half = g.get(1, 0) / 2
    higher = [(n, g[n]) for n in range(3, spec.order + 1) if g[n]]

    def U(rho):
        t = tk(kappa, rho)
        out = -(half**2) * t**2
        for n, gn in higher:
            out = out + (-1) ** n * gn * half**n * t ** (2 * n)
        return out

    def V(rho, p_rho):
        t = tk(kappa, rho)
        out = 0j
        for n, gn in higher:
            for k in range(1, n + 1):
                out = out + gn * (-1) ** (n - k) * comb(n, k) * half ** (n - k) * t ** (2 * n - k) * p_rho**k
        return out

    return U, V


def kinetic(kappa: float, rho, p_rho, p_phi):
    return p_rho**2 + p_phi**2 / sk(kappa, rho) ** 2


def natural_form_hamiltonian(spec: ModelSpec, kappa: float, rho, phi, p_rho, p_phi) -> complex:
    U, V = natural_form_potentials(spec, kappa)
    return complex(kinetic(kappa, rho, p_rho, p_phi) + U(rho) + V(rho, p_rho))


def polar_hamiltonian(spec: ModelSpec, r, phi, p_r, p_phi) -> complex:
    """p_r^2 + p_phi^2/r^2 + sum_n gamma_n (r p_r)^n."""
    g = gamma_values(spec)
    out = p_r**2 + p_phi**2 / r**2
    for n in range(1, spec.order + 1):
        if g[n]:
            out = out + g[n] * (r * p_r) ** n
    return complex(out)


def polar_kinetic(r, p_r, p_phi, gamma2):
    """Quadratic-in-momenta part of the polar Zernike form."""
    return p_r**2 + p_phi**2 / r**2 + gamma2 * (r * p_r) ** 2


# Isometries of the curved metric and their closed-form gradients in
# (rho, phi, p_rho, p_phi).

def isometries(kappa: float, rho, phi, p_rho, p_phi):
    t = tk(kappa, rho)
    j01 = np.cos(phi) * p_rho - np.sin(phi) / t * p_phi
    j02 = np.sin(phi) * p_rho + np.cos(phi) / t * p_phi
    return j01, j02, p_phi


def isometry_gradients(kappa: float, rho, phi, p_rho, p_phi):
    t, s = tk(kappa, rho), sk(kappa, rho)
    c, n = np.cos(phi), np.sin(phi)
    d01 = (n * p_phi / s**2, -n * p_rho - c * p_phi / t, c, -n / t)
    d02 = (-c * p_phi / s**2, c * p_rho - n * p_phi / t, n, c / t)
    d12 = (0.0, 0.0, 0.0, 1.0)
    return d01, d02, d12


def bracket_from_gradients(df, dg):
    return df[0] * dg[2] - df[2] * dg[0] + df[1] * dg[3] - df[3] * dg[1]


def random_geodesic_points(kappa: float, samples: int, rng: np.random.Generator,
                           margin: float = 0.05) -> np.ndarray:
    top = rho_max(kappa)
    top = 2.0 if math.isinf(top) else top * (1 - margin)
    rho = rng.uniform(margin * min(top, 1.0), top, samples)
    phi = rng.uniform(0, 2 * math.pi, samples)
    pr, pp = rng.normal(size=samples), rng.normal(size=samples)
    return np.stack([rho, phi, pr, pp], axis=1)


@dataclass
class CheckRow:
    name: str
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation < self.tolerance)


def isometry_check(kappa: float, samples: int = 100, seed: int = 0) -> List[CheckRow]:
    """Max absolute deviation of the isometry brackets and the Casimir identity."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    pts = random_geodesic_points(kappa, samples, rng)
    devs = np.zeros((samples, 4))
    for i, (rho, phi, pr, pp) in enumerate(pts):
        j01, j02, j12 = isometries(kappa, rho, phi, pr, pp)
        d01, d02, d12 = isometry_gradients(kappa, rho, phi, pr, pp)
        devs[i] = [
            abs(bracket_from_gradients(d12, d01) - j02),
            abs(bracket_from_gradients(d12, d02) + j01),
            abs(bracket_from_gradients(d01, d02) - kappa * j12),
            abs(kinetic(kappa, rho, pr, pp) - (j01**2 + j02**2 + kappa * j12**2)),
        ]
    tol = 1e-9
    names = ["{J12,J01} = J02", "{J12,J02} = -J01", "{J01,J02} = kappa J12",
             "T = J01^2 + J02^2 + kappa J12^2"]
    return [CheckRow(n, float(d), tol) for n, d in zip(names, devs.max(axis=0))]


def _rel(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


def random_curved_spec(order: int, kappa: float, rng: np.random.Generator,
                       scale: float = 0.3) -> ModelSpec:
    bound = {1: 2j * rng.normal()}
    if order >= 2:
        bound[2] = -kappa
    for n in range(3, order + 1):
        bound[n] = scale * complex(rng.normal(), rng.normal())
    return ModelSpec(order, bound, max_order=max(order, 12))


def transform_check(kappa: float, order: int, samples: int = 100, seed: int = 0) -> List[CheckRow]:
    """Cross-chart consistency and isometry table for one curvature and order."""
    if order < 2 and not _flat(kappa):
        raise ValueError("curved charts need gamma2 = -kappa, so order must be >= 2 when kappa != 0")
    rng = np.random.default_rng(seed)
    spec = random_curved_spec(order, kappa, rng)
    g1 = spec.bound[1]
    h = build_hamiltonian(spec)
    params = spec.numeric_params()
    pts = random_geodesic_points(kappa, samples, rng)
    dev = {"geodesic": 0.0, "shifted": 0.0, "shift": 0.0, "canon": 0.0, "canon_shift": 0.0}
    for rho, phi, pr, pp in pts:
        direct = curved_hamiltonian(spec, kappa, rho, phi, pr, pp)
        cart = to_cartesian(CurvedPoint("geodesic_polar", (rho, phi), (pr, pp), kappa))
        dev["geodesic"] = max(dev["geodesic"], _rel(direct, h.evaluate(cart.as_vector(), params)))

        natural = natural_form_hamiltonian(spec, kappa, rho, phi, pr, pp)
        cart2 = to_cartesian(CurvedPoint("shifted_geodesic_polar", (rho, phi), (pr, pp), kappa, g1))
        dev["shifted"] = max(dev["shifted"], _rel(natural, h.evaluate(cart2.as_vector(), params)))

        shifted = curved_hamiltonian(spec, kappa, rho, phi, pr - g1 / 2 * tk(kappa, rho), pp)
        dev["shift"] = max(dev["shift"], _rel(natural, shifted))

        dev["canon"] = max(dev["canon"], symplectic_defect(chart_map("geodesic_polar", kappa), (rho, phi, pr, pp),
                                                         chart_steps(kappa, rho)))
        dev["canon_shift"] = max(dev["canon_shift"],
                                 symplectic_defect(chart_map("shifted_geodesic_polar", kappa, g1), (rho, phi, pr, pp),
                                                   chart_steps(kappa, rho)))
    rows = [
        CheckRow("geodesic-polar form = Cartesian H", dev["geodesic"], 1e-10),
        CheckRow("natural form (shifted chart) = Cartesian H", dev["shifted"], 1e-10),
        CheckRow("momentum shift maps one form to the other", dev["shift"], 1e-10),
        CheckRow("geodesic-polar chart is canonical", dev["canon"], 1e-9),
        CheckRow("shifted chart is canonical", dev["canon_shift"], 1e-9),
    ]
    return rows + isometry_check(kappa, samples, seed)
