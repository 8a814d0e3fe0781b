import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zernike_hn.dynamics import (
    CSV_HEADER, EmptyRecord, FlowProblem, RealityViolation, StepSizeUnderflow, TrajectoryRecord,
    estimate_period, export_trajectory, hamiltons_equations, integrate, parse_svg_points, perturbation_preset,
    real_slice_state, time_reversal_error, zernike_spec,
)
from zernike_hn.geometry import CurvedPoint, to_cartesian
from zernike_hn.phasepoly import UnboundParameter
from zernike_hn.zernike import ModelSpec, build_hamiltonian

Q0, PR0 = (0.5, 0.1), (0.1, 0.6)


def zernike_problem(order=2, extra=None, tspan=(0.0, 20.0), samples=2000, q=Q0, p=PR0):
    spec = zernike_spec(1.0, 1.0, order, extra)
    return FlowProblem(spec, real_slice_state(q, p, 2j, 1.0), tspan, samples)


def test_free_field():
    field = hamiltons_equations(ModelSpec(2, {}))
    z = np.array([0.3, -0.2, 0.7 + 0.1j, 1.5])
    assert np.allclose(field(z), [2 * z[2], 2 * z[3], 0, 0])


def test_linear_field_term():
    g1 = 0.4 - 0.3j
    field = hamiltons_equations(ModelSpec(1, {1: g1}))
    z = np.array([0.3, -0.2, 0.7 + 0.1j, 1.5])
    assert field(z)[2] == pytest.approx(-g1 * z[2])


@given(st.integers(1, 6), st.integers(0, 2**31))
@settings(max_examples=20)
def test_field_matches_finite_differences(order, seed):
    rng = np.random.default_rng(seed)
    bound = {n: 0.3 * complex(*rng.normal(size=2)) for n in range(1, order + 1)}
    spec = ModelSpec(order, bound)
    h, field = build_hamiltonian(spec), hamiltons_equations(spec)
    params = spec.numeric_params()
    z = 0.5 * (rng.normal(size=4) + 1j * rng.normal(size=4))
    step = 1e-4
    grad = []
    for i in range(4):
        e = np.zeros(4, dtype=complex)
        e[i] = step
        v = [h.evaluate(z + k * e, params) for k in (2, 1, -1, -2)]
        grad.append((-v[0] + 8 * v[1] - 8 * v[2] + v[3]) / (12 * step))
    expected = np.array([grad[2], grad[3], -grad[0], -grad[1]])
    got = field(z)
    assert np.linalg.norm(got - expected) <= 1e-6 * max(np.linalg.norm(expected), 1.0)
    # scalar and vectorised paths agree
    assert np.allclose(field(z[None, :])[0], got, rtol=1e-13, atol=1e-14)


def test_unbound_parameters_rejected():
    with pytest.raises(UnboundParameter):
        hamiltons_equations(ModelSpec(2))
    with pytest.raises(UnboundParameter):
        FlowProblem(ModelSpec(2), (0, 0, 1, 0))


def test_problem_validation():
    spec = ModelSpec(2, {})
    with pytest.raises(ValueError):
        FlowProblem(spec, (0, 0, 1, 0), (1.0, 1.0))
    with pytest.raises(ValueError):
        FlowProblem(spec, (0, 0, 1, 0), (0.0, 1.0), 1)
    with pytest.raises(ValueError):
        FlowProblem(spec, (0, 0, 1), (0.0, 1.0))


def test_free_flight():
    rec = integrate(FlowProblem(ModelSpec(2, {}), (0, 0, 1, 0), (0.0, 1.0), 11))
    assert np.allclose(rec.states[:, 0], 2 * rec.times, atol=1e-10)
    assert np.allclose(rec.states[:, 1:], [[0, 1, 0]] * 11, atol=1e-12)


def test_record_is_immutable():
    rec = integrate(FlowProblem(ModelSpec(2, {}), (0, 0, 1, 0), (0.0, 1.0), 5))
    with pytest.raises(ValueError):
        rec.states[0, 0] = 1
    assert len(rec.times) == len(rec.states) == len(rec.conserved) == 5


def test_real_slice_matches_shifted_chart():
    g1, kappa = 2j, 1.0
    q = (0.3, -0.4)
    z = real_slice_state(q, (0.2, 0.7), g1, kappa)
    rho = math.asin(math.hypot(*q))
    ang = math.atan2(q[1], q[0]) % (2 * math.pi)
    # real Cartesian momenta (0.2, 0.7) expressed in the geodesic chart
    c, s = math.cos(ang), math.sin(ang)
    p_rho = math.cos(rho) * (c * 0.2 + s * 0.7)
    p_phi = math.sin(rho) * (-s * 0.2 + c * 0.7)
    via_chart = to_cartesian(CurvedPoint("shifted_geodesic_polar", (rho, ang), (p_rho, p_phi), kappa, g1))
    assert np.allclose(via_chart.as_vector(), z, atol=1e-14)
    with pytest.raises(ValueError):
        real_slice_state((1.0, 0.5), (0, 0), g1, kappa)


def test_zernike_orbit_closes():
    rec = integrate(zernike_problem())
    period, gap = estimate_period(rec)
    assert 0 < period < 20
    assert gap < 1e-6
    # the real slice stays real
    assert np.abs(rec.states[:, :2].imag).max() < 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_zernike_periodicity_random_real_data(seed):
    rng = np.random.default_rng(seed)
    r, a = rng.uniform(0.05, 0.8), rng.uniform(0, 2 * math.pi)
    q, p = (r * math.cos(a), r * math.sin(a)), tuple(rng.uniform(-1, 1, 2))
    rec = integrate(zernike_problem(q=q, p=p))
    period, gap = estimate_period(rec)
    assert gap < 1e-5, (q, p, period)


@pytest.mark.parametrize("order", [2, 3, 4, 5, 6])
def test_conservation(order):
    extra = {n: (0.05j if n % 2 else 0.05) for n in range(3, order + 1)}
    rec = integrate(zernike_problem(order, extra, tspan=(0.0, 10.0), samples=500))
    for name in ("H", "C", "I"):
        assert rec.drift[name] < 1e-8, (name, rec.drift)


def test_cubic_perturbation_bounded():
    rec = integrate(zernike_problem(3, {3: 0.1j}))
    assert rec.drift["H"] < 1e-8
    assert np.abs(rec.states[:, :2].real).max() < 1.0
    unperturbed = integrate(zernike_problem())
    # deformed: the orbit differs from the pure Zernike one
    assert np.abs(rec.states[:, :2] - unperturbed.states[:, :2]).max() > 1e-3


def test_presets():
    cubic = perturbation_preset("cubic", 1.0, 1.0, 0.05j)
    assert cubic.order == 3 and cubic.bound == {1: 2j, 2: -1.0, 3: 0.05j}
    quartic = perturbation_preset("quartic", 1.0, 1.0, 0.2)
    assert quartic.bound.get(3, 0) == 0 and quartic.bound[4] == 0.2
    assert perturbation_preset("sextic", 0.5, -1.0, 0.01).bound[1] == 1j
    with pytest.raises(RealityViolation):
        perturbation_preset("cubic", 1.0, 1.0, 0.05)
    with pytest.raises(RealityViolation):
        perturbation_preset("quartic", 1.0, 1.0, 0.05j)
    with pytest.raises(ValueError):
        perturbation_preset("septic", 1.0, 1.0, 0.05j)
    with pytest.warns(RuntimeWarning):
        spec = perturbation_preset("cubic", 1.0, 1.0, 0.05, override=True)
    assert spec.bound[3] == 0.05


def test_time_reversal():
    assert time_reversal_error(zernike_problem(3, {3: 0.05j}, tspan=(0.0, 10.0), samples=10)) < 1e-7


def test_step_halving_convergence():
    problem = zernike_problem(3, {3: 0.05j}, tspan=(0.0, 5.0), samples=2)
    ref = integrate(problem, 1e-13, 1e-15).states[-1]
    errors, work = [], []
    for tol in (1e-5, 5e-6, 2.5e-6, 1.25e-6):
        rec = integrate(problem, tol, tol * 1e-2)
        errors.append(np.linalg.norm(rec.states[-1] - ref))
        work.append(rec.nfev)
    assert all(b < a for a, b in zip(errors, errors[1:]))
    # error ~ h^p with h ~ 1 / nfev
    order = -np.polyfit(np.log(work), np.log(errors), 1)[0]
    assert order >= 4, order


def test_step_size_underflow():
    with pytest.raises(StepSizeUnderflow) as info:
        integrate(FlowProblem(ModelSpec(3, {3: 1}), (1, 1, 1, 1), (0.0, 100.0), 10))
    assert 0 < info.value.t < 100
    assert info.value.state.shape == (4,)


def test_csv_export(tmp_path):
    rec = integrate(FlowProblem(ModelSpec(2, {}), (0, 0, 1, 0), (0.0, 1.0), 2))
    path = tmp_path / "t.csv"
    export_trajectory(rec, "csv", path)
    lines = path.read_text().splitlines()
    assert len(lines) == 3
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[0] == "t,reQ1,imQ1,reQ2,imQ2,reP1,imP1,reP2,imP2,reH,imH,reC,imC,reI,imI"
    last = [float(v) for v in lines[2].split(",")]
    assert last[0] == 1.0 and last[1] == pytest.approx(2.0)


def test_svg_closed_orbit(tmp_path):
    rec = integrate(zernike_problem())
    period, _ = estimate_period(rec)
    one = integrate(zernike_problem(tspan=(0.0, period), samples=500))
    path = tmp_path / "orbit.svg"
    export_trajectory(one, "svg", path)
    text = path.read_text()
    assert text.count("<polyline") == 1
    pts = parse_svg_points(text)
    diag = np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))
    assert np.linalg.norm(pts[0] - pts[-1]) < 1e-6 * diag
    box = [float(v) for v in text.split('viewBox="')[1].split('"')[0].split()]
    width = pts[:, 0].max() - pts[:, 0].min()
    assert box[2] == pytest.approx(1.1 * width, rel=1e-6)


def test_empty_record_rejected(tmp_path):
    empty = TrajectoryRecord(np.zeros(0), np.zeros((0, 4), complex), np.zeros((0, 3), complex), {})
    for fmt in ("csv", "svg"):
        with pytest.raises(EmptyRecord):
            export_trajectory(empty, fmt, tmp_path / f"x.{fmt}")
    with pytest.raises(ValueError):
        export_trajectory(empty, "pdf", tmp_path / "x.pdf")


def test_export_io_error(tmp_path):
    rec = integrate(FlowProblem(ModelSpec(2, {}), (0, 0, 1, 0), (0.0, 1.0), 2))
    with pytest.raises(OSError):
        export_trajectory(rec, "csv", tmp_path / "missing" / "t.csv")


def test_figure_rendering(tmp_path):
    from zernike_hn.figures import render_trajectory
    rec = integrate(zernike_problem(samples=200))
    path = tmp_path / "orbit.png"
    render_trajectory(rec, path, title="test")
    assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
