"""Complexified Hamiltonian flow of H_N and conservation monitoring.

Hamilton's equations are applied verbatim to the complex Hamiltonian.  The
state (q1, q2, p1, p2) is complex and is handed to the integrator as eight
real components.  Plots and the SVG export show (Re q1, Re q2).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .phasepoly import PhasePolynomial, UnboundParameter
from .zernike import ModelSpec, build_c, build_hamiltonian, build_i

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_TSPAN = (0.0, 20.0)
DEFAULT_SAMPLES = 2000

CONSERVED = ("H", "C", "I")
CSV_HEADER = ["t", "reQ1", "imQ1", "reQ2", "imQ2", "reP1", "imP1", "reP2", "imP2",
              "reH", "imH", "reC", "imC", "reI", "imI"]

PRESET_ORDERS = {"cubic": 3, "quartic": 4, "quintic": 5, "sextic": 6}

# below this magnitude the initial value is too small to divide by, and the
# drift is reported in absolute terms
DRIFT_FLOOR = 1e-12


class StepSizeUnderflow(RuntimeError):
    def __init__(self, message: str, t: float, state: np.ndarray):
        super().__init__(message)
        self.t = t
        self.state = state


class RealityViolation(ValueError):
    pass


class EmptyRecord(ValueError):
    pass


class CompiledPolynomial:
    """A PhasePolynomial with its parameters bound, evaluated vectorised."""

    def __init__(self, f: PhasePolynomial, params: Dict[str, complex]):
        exps, coeffs = [], []
        for m, c in f.terms.items():
            exps.append(m)
            coeffs.append(c.evaluate(params))
        self.exps = np.array(exps, dtype=np.int64).reshape(-1, 4)
        self.coeffs = np.array(coeffs, dtype=complex)
        self._max = self.exps.max(axis=0) if len(exps) else np.zeros(4, dtype=np.int64)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        flat = z.reshape(-1, 4)
        if not len(self.coeffs):
            out = np.zeros(len(flat), dtype=complex)
        else:
            # power tables per variable, then a gather per monomial
            terms = np.ones((len(flat), len(self.coeffs)), dtype=complex)
            for i in range(4):
                if self._max[i] == 0:
                    continue
                table = flat[:, i, None] ** np.arange(self._max[i] + 1)
                terms *= table[:, self.exps[:, i]]
            out = terms @ self.coeffs
        return out.reshape(z.shape[:-1])


def _require_bound(spec: ModelSpec) -> Dict[str, complex]:
    if spec.symbolic:
        raise UnboundParameter("all gamma values must be bound for numerical work")
    return spec.numeric_params()


def _scalar_source(name: str, polys: Sequence[CompiledPolynomial]) -> str:
    """Python source for a scalar evaluator returning every polynomial at once."""
    names = ("q1", "q2", "p1", "p2")
    need = np.max([p._max for p in polys], axis=0)
    lines = [f"def {name}(q1, q2, p1, p2):"]
    for i, v in enumerate(names):
        for e in range(2, need[i] + 1):
            lines.append(f"    {v}_{e} = {v}_{e - 1} * {v}" if e > 2 else f"    {v}_2 = {v} * {v}")
    outs = []
    for k, p in enumerate(polys):
        terms = []
        for m, c in zip(p.exps, p.coeffs):
            factors = [repr(complex(c))]
            factors += [v if e == 1 else f"{v}_{e}" for v, e in zip(names, m) if e]
            terms.append(" * ".join(factors))
        lines.append(f"    r{k} = " + (" + ".join(terms) if terms else "0j"))
        outs.append(f"r{k}")
    lines.append("    return (" + ", ".join(outs) + ",)")
    return "\n".join(lines)


class VectorField:
    """(dH/dp1, dH/dp2, -dH/dq1, -dH/dq2), compiled once from the exact partials."""

    def __init__(self, spec: ModelSpec):
        params = _require_bound(spec)
        h = build_hamiltonian(spec)
        self.hamiltonian = CompiledPolynomial(h, params)
        self.components = [CompiledPolynomial(h.partial(2), params),
                           CompiledPolynomial(h.partial(3), params),
                           CompiledPolynomial(-h.partial(0), params),
                           CompiledPolynomial(-h.partial(1), params)]
        # generated straight-line code; much cheaper per call than numpy for one state
        scope: Dict[str, object] = {}
        exec(_scalar_source("field", self.components), scope)
        self._scalar = scope["field"]

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape == (4,):
            return np.array(self._scalar(*z.tolist()), dtype=complex)
        return np.stack([c(z) for c in self.components], axis=-1)

    def packed(self, _t, y) -> np.ndarray:
        """Right-hand side on the eight real components."""
        d = self._scalar(complex(y[0], y[1]), complex(y[2], y[3]), complex(y[4], y[5]), complex(y[6], y[7]))
        return np.array([d[0].real, d[0].imag, d[1].real, d[1].imag,
                         d[2].real, d[2].imag, d[3].real, d[3].imag])


def hamiltons_equations(spec: ModelSpec) -> VectorField:
    return VectorField(spec)


@dataclass(frozen=True)
class FlowProblem:
    spec: ModelSpec
    initial_state: Tuple[complex, complex, complex, complex]
    time_span: Tuple[float, float] = DEFAULT_TSPAN
    sample_count: int = DEFAULT_SAMPLES

    def __post_init__(self):
        _require_bound(self.spec)
        state = tuple(complex(v) for v in self.initial_state)
        if len(state) != 4:
            raise ValueError("initial state needs four components")
        object.__setattr__(self, "initial_state", state)
        t0, t1 = (float(t) for t in self.time_span)
        if not t1 > t0:
            raise ValueError(f"time span must satisfy t1 > t0, got {self.time_span}")
        object.__setattr__(self, "time_span", (t0, t1))
        if not isinstance(self.sample_count, int) or self.sample_count < 2:
            raise ValueError("sample_count must be an integer >= 2")


@dataclass(frozen=True)
class TrajectoryRecord:
    times: np.ndarray
    states: np.ndarray
    conserved: np.ndarray
    drift: Dict[str, float]
    problem: Optional[FlowProblem] = None
    dense: Optional[object] = field(default=None, repr=False, compare=False)
    nfev: int = 0

    def __post_init__(self):
        n = len(self.times)
        if self.states.shape != (n, 4) or self.conserved.shape != (n, 3):
            raise ValueError("times, states and conserved values disagree in length")
        for a in (self.times, self.states, self.conserved):
            a.setflags(write=False)

    def __len__(self):
        return len(self.times)

    def state_at(self, t: float) -> np.ndarray:
        if self.dense is None:
            raise ValueError("record was built without dense output")
        return unpack(self.dense(t))


def pack(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (8,))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def unpack(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return y[..., 0::2] + 1j * y[..., 1::2]


def conserved_functions(spec: ModelSpec):
    params = _require_bound(spec)
    return [CompiledPolynomial(f, params) for f in (build_hamiltonian(spec), build_c(), build_i(spec))]


def drift_stats(conserved: np.ndarray) -> Dict[str, float]:
    """Max over samples of |X(t) - X(t0)| / |X(t0)| per conserved quantity."""
    out = {}
    for k, name in enumerate(CONSERVED):
        ref = abs(conserved[0, k])
        scale = ref if ref > DRIFT_FLOOR else 1.0
        out[name] = float(np.max(np.abs(conserved[:, k] - conserved[0, k])) / scale)
    return out


def integrate(problem: FlowProblem, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> TrajectoryRecord:
    field_ = hamiltons_equations(problem.spec)
    sol = solve_ivp(field_.packed, problem.time_span, pack(problem.initial_state), method="RK45",
                    rtol=rtol, atol=atol, dense_output=True)
    if sol.status != 0:
        last = unpack(sol.y[:, -1])
        raise StepSizeUnderflow(f"integration stopped at t={sol.t[-1]:.6g}: {sol.message}",
                                float(sol.t[-1]), last)
    times = np.linspace(*problem.time_span, problem.sample_count)
    states = unpack(sol.sol(times).T)
    conserved = np.stack([f(states) for f in conserved_functions(problem.spec)], axis=1)
    return TrajectoryRecord(times, states, conserved, drift_stats(conserved), problem, sol.sol, sol.nfev)


def real_slice_state(q: Sequence[float], p: Sequence[float], gamma1: complex, kappa: float) -> Tuple[complex, ...]:
    """Cartesian state whose shifted-chart coordinates are the real data (q, p).

    The shifted chart moves p_rho by -(gamma1/2) Tk(rho); in Cartesian terms
    this is p -> p - (gamma1/2) q / (1 - kappa |q|^2).
    """
    q1, q2 = (float(v) for v in q)
    p1, p2 = (float(v) for v in p)
    denom = 1 - kappa * (q1 * q1 + q2 * q2)
    if denom <= 0:
        raise ValueError(f"|q|^2 must stay below 1/kappa, got {q1 * q1 + q2 * q2}")
    shift = gamma1 / 2 / denom
    return (complex(q1), complex(q2), p1 - shift * q1, p2 - shift * q2)


def zernike_spec(omega: float, kappa: float, order: int = 2, extra: Optional[Dict[int, complex]] = None,
                 max_order: int = 12) -> ModelSpec:
    bound = {1: 2j * omega, 2: -kappa}
    bound.update(extra or {})
    return ModelSpec(max(order, 2), bound, max_order=max(max_order, order))


def check_parity(n: int, value: complex, override: bool):
    value = complex(value)
    ok = value.real == 0 if n % 2 else value.imag == 0
    if ok:
        return
    msg = (f"gamma{n} = {value} breaks the reality rule: odd orders need purely imaginary "
           f"values, even orders real ones")
    if not override:
        raise RealityViolation(msg)
    warnings.warn(msg, RuntimeWarning, stacklevel=3)


def perturbation_preset(kind: str, omega: float, kappa: float, gamma_extra: complex,
                        override: bool = False) -> ModelSpec:
    """Zernike plus one higher-order term: gamma1 = 2 i omega, gamma2 = -kappa, gamma_N = gamma_extra."""
    if kind not in PRESET_ORDERS:
        raise ValueError(f"unknown preset {kind!r}; choose from {sorted(PRESET_ORDERS)}")
    n = PRESET_ORDERS[kind]
    check_parity(n, gamma_extra, override)
    for k, v in ((1, 2j * omega), (2, -kappa)):
        check_parity(k, v, override)
    return zernike_spec(omega, kappa, n, {n: gamma_extra})


def estimate_period(record: TrajectoryRecord, min_fraction: float = 0.5) -> Tuple[float, float]:
    """First return of the orbit to its start, refined on the dense output.

    The return is located with the distance of the full complex state, since
    a thin real-part orbit can pass close to its start half a period early.
    Returns ``(period, gap)`` where ``gap`` is the distance in (Re q1, Re q2)
    at the refined return time.  The search starts once the state has moved
    away by ``min_fraction`` of its largest excursion and only accepts minima
    below a quarter of it (at the default fraction).
    """
    if len(record) < 3:
        raise EmptyRecord("need at least three samples")
    z0 = record.states[0]
    d = np.linalg.norm(record.states - z0, axis=1)
    if d.max() == 0:
        return math.nan, math.inf
    first = np.nonzero(d >= min_fraction * d.max())[0][0]
    tail = d[first:]
    # a return is a local minimum well below the excursion; plateaus near the
    # far side of the orbit can wiggle
    interior = []
    if len(tail) >= 3:
        mid = tail[1:-1]
        interior = np.nonzero((mid <= tail[:-2]) & (mid <= tail[2:]) & (mid < (1 - min_fraction) * 0.5 * d.max()))[0]
    if not len(interior):
        return math.nan, float(np.linalg.norm(record.states[-1, :2].real - z0[:2].real))
    i = first + 1 + interior[0]
    t = record.times

    def position_gap(z):
        return float(np.linalg.norm(z[:2].real - z0[:2].real))

    if record.dense is None:
        return float(t[i]), position_gap(record.states[i])
    res = minimize_scalar(lambda s: float(np.linalg.norm(record.state_at(s) - z0)),
                          bounds=(t[i - 1], t[i + 1]), method="bounded", options={"xatol": 1e-12})
    return float(res.x), position_gap(record.state_at(res.x))


def closure_gap(record: TrajectoryRecord) -> float:
    return estimate_period(record)[1]


def time_reversal_error(problem: FlowProblem, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> float:
    """Integrate forward, then backward from the end state; relative mismatch at t0."""
    fwd = integrate(problem, rtol, atol)
    t0, t1 = problem.time_span
    # the flow is autonomous, so integrating with -X from 0 to t1 - t0 runs it backwards
    back_field = hamiltons_equations(problem.spec)
    sol = solve_ivp(lambda t, y: -back_field.packed(t, y), (0.0, t1 - t0), pack(fwd.states[-1]),
                    method="RK45", rtol=rtol, atol=atol)
    if sol.status != 0:
        raise StepSizeUnderflow(sol.message, float(sol.t[-1]), unpack(sol.y[:, -1]))
    z0 = np.array(problem.initial_state)
    return float(np.linalg.norm(unpack(sol.y[:, -1]) - z0) / max(np.linalg.norm(z0), DRIFT_FLOOR))


def export_csv(record: TrajectoryRecord, path) -> None:
    if len(record) == 0:
        raise EmptyRecord("cannot export an empty trajectory")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for t, z, c in zip(record.times, record.states, record.conserved):
            row = [t]
            for v in (*z, *c):
                row += [v.real, v.imag]
            w.writerow([repr(float(x)) for x in row])


def svg_polyline(xs: np.ndarray, ys: np.ndarray, pad: float = 0.05) -> str:
    """One polyline, y flipped so that up is positive, viewBox padded by ``pad``."""
    xmin, xmax, ymin, ymax = xs.min(), xs.max(), -ys.max(), -ys.min()
    w = (xmax - xmin) or 1.0
    h = (ymax - ymin) or 1.0
    box = (xmin - pad * w, ymin - pad * h, w * (1 + 2 * pad), h * (1 + 2 * pad))
    pts = " ".join(f"{x:.9g},{-y:.9g}" for x, y in zip(xs, ys))
    stroke = max(box[2], box[3]) / 400
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{" ".join(f"{v:.9g}" for v in box)}">\n'
        f'  <polyline fill="none" stroke="black" stroke-width="{stroke:.6g}" points="{pts}"/>\n'
        "</svg>\n"
    )


def export_svg(record: TrajectoryRecord, path) -> None:
    if len(record) == 0:
        raise EmptyRecord("cannot export an empty trajectory")
    q = record.states[:, :2].real
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg_polyline(q[:, 0], q[:, 1]))


def export_trajectory(record: TrajectoryRecord, fmt: str, path) -> None:
    if fmt == "csv":
        export_csv(record, path)
    elif fmt == "svg":
        export_svg(record, path)
    else:
        raise ValueError(f"unknown export format {fmt!r}")


def parse_svg_points(text: str) -> np.ndarray:
    """Read back the polyline points of an exported SVG."""
    start = text.index('points="') + len('points="')
    body = text[start:text.index('"', start)]
    return np.array([[float(v) for v in pair.split(",")] for pair in body.split()])
