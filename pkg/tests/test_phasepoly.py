from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zernike_hn.phasepoly import (
    P2, Q1, Q2, ParamPolynomial, PhasePolynomial, SingularEvaluation, UnboundParameter,
    add, evaluate_complex, gamma, is_zero, mul, p1, p2, parse, partial, poisson_bracket, q1, q2, serialize,
)
from zernike_hn.zernike import ModelSpec, build_c, build_hamiltonian, build_i

from strategies import param_polys, phase_polys


def test_add_examples():
    assert add(q1(), PhasePolynomial()) == q1()
    assert is_zero(add(q1(), -q1()))
    kinetic = p1() ** 2 + p2() ** 2
    assert add(kinetic, gamma(1) * q1() * p1()) == kinetic + gamma(1) * q1() * p1()
    assert len((kinetic + gamma(1) * q1() * p1()).terms) == 3


def test_mul_examples():
    assert mul(q1(), PhasePolynomial.var(Q1, -1)) == PhasePolynomial.const(1)
    dot = q1() * p1() + q2() * p2()
    expected = (PhasePolynomial.monomial((2, 0, 2, 0)) + PhasePolynomial.monomial((1, 1, 1, 1), 2)
                + PhasePolynomial.monomial((0, 2, 0, 2)))
    assert mul(dot, dot) == expected


def _enumerate_product(a, b):
    # schoolbook product over every pair of terms, independent of __mul__
    acc = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            acc[m] = acc.get(m, ParamPolynomial()) + ca * cb
    return PhasePolynomial({m: c for m, c in acc.items() if not c.is_zero()})


def test_casimir_square_matches_enumeration():
    c = q1() * p2() - q2() * p1()
    expected = (PhasePolynomial.monomial((2, 0, 0, 2)) - PhasePolynomial.monomial((1, 1, 1, 1), 2)
                + PhasePolynomial.monomial((0, 2, 2, 0)))
    assert c * c == expected == _enumerate_product(c, c)


@given(phase_polys(), phase_polys())
def test_mul_matches_enumeration(a, b):
    assert a * b == _enumerate_product(a, b)


def test_partial_examples():
    assert partial(q1() ** 3, Q1) == PhasePolynomial.monomial((2, 0, 0, 0), 3)
    assert partial(PhasePolynomial.var(Q1, -2), Q1) == PhasePolynomial.monomial((-3, 0, 0, 0), -2)
    assert partial(q1() * p1() + q2() * p2(), P2) == q2()


def test_bracket_examples():
    assert poisson_bracket(q1(), p1()) == PhasePolynomial.const(1)
    assert poisson_bracket(q1(), p2()).is_zero()
    assert poisson_bracket(q2(), p2()) == PhasePolynomial.const(1)
    assert poisson_bracket(q1(), q2()).is_zero()
    c = q1() * p2() - q2() * p1()
    assert poisson_bracket(c, p1() ** 2 + p2() ** 2).is_zero()


@given(phase_polys(max_exp=3))
def test_self_bracket_vanishes(f):
    assert poisson_bracket(f, f).is_zero()


@given(phase_polys(max_exp=3), phase_polys(max_exp=3))
def test_antisymmetry(f, g):
    assert (poisson_bracket(f, g) + poisson_bracket(g, f)).is_zero()


@given(phase_polys(max_terms=3), phase_polys(max_terms=3), phase_polys(max_terms=3))
def test_leibniz(f, g, h):
    assert poisson_bracket(f, g * h) == poisson_bracket(f, g) * h + g * poisson_bracket(f, h)


@given(phase_polys(max_terms=3, max_exp=2), phase_polys(max_terms=3, max_exp=2),
       phase_polys(max_terms=3, max_exp=2))
def test_jacobi(f, g, h):
    total = (poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f))
             + poisson_bracket(h, poisson_bracket(f, g)))
    assert total.is_zero()


@given(phase_polys(min_exp=-2, max_exp=2), phase_polys(min_exp=-2, max_exp=2))
def test_laurent_antisymmetry(f, g):
    assert (poisson_bracket(f, g) + poisson_bracket(g, f)).is_zero()


@given(param_polys(), param_polys(), param_polys())
def test_param_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@given(phase_polys(), phase_polys(), phase_polys())
def test_phase_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


def test_rational_coefficients_are_reduced():
    c = ParamPolynomial.const(Fraction(6, 4))
    assert c.constant_value() == Fraction(3, 2)
    assert (c - c).constant_value() == 0
    with pytest.raises(TypeError):
        ParamPolynomial.const(0.5)


def _fd_gradient(f, z, params, h=1e-4):
    # fourth-order central differences; f is holomorphic, so a real step suffices
    grad = []
    for i in range(4):
        e = np.zeros(4, dtype=complex)
        e[i] = h
        vals = [f.evaluate(z + k * e, params) for k in (2, 1, -1, -2)]
        grad.append((-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * h))
    return grad


@given(phase_polys(max_exp=3), phase_polys(max_exp=3), st.integers(0, 2**32 - 1))
def test_bracket_matches_finite_differences(f, g, seed):
    rng = np.random.default_rng(seed)
    params = {s: complex(*rng.normal(size=2)) for s in ("g1", "g2", "g3", "l1")}
    bracket = poisson_bracket(f, g)
    for _ in range(20):
        z = rng.normal(size=4) + 1j * rng.normal(size=4)
        df, dg = _fd_gradient(f, z, params), _fd_gradient(g, z, params)
        numeric = df[0] * dg[2] - df[2] * dg[0] + df[1] * dg[3] - df[3] * dg[1]
        exact = bracket.evaluate(z, params)
        # differencing error follows the size of the individual products, which can
        # cancel to a much smaller bracket
        terms = abs(df[0] * dg[2]) + abs(df[2] * dg[0]) + abs(df[1] * dg[3]) + abs(df[3] * dg[1])
        scale = max(abs(exact), terms, 1.0)
        assert abs(exact - numeric) / scale < 1e-6


def test_h8_i8_bracket_matches_finite_difference_oracle():
    spec = ModelSpec(8)
    h, i = build_hamiltonian(spec), build_i(spec)
    assert poisson_bracket(h, i).is_zero()
    rng = np.random.default_rng(5)
    for _ in range(20):
        params = {f"g{n}": 0.3 * complex(*rng.normal(size=2)) for n in range(1, 9)}
        z = 0.5 * (rng.normal(size=4) + 1j * rng.normal(size=4))
        dh, di = _fd_gradient(h, z, params), _fd_gradient(i, z, params)
        numeric = dh[0] * di[2] - dh[2] * di[0] + dh[1] * di[3] - dh[3] * di[1]
        scale = max(abs(a * b) for a in dh for b in di)
        assert abs(numeric) / scale < 1e-6


def test_evaluate_examples():
    h2_free = build_hamiltonian(ModelSpec(2, {}))
    assert evaluate_complex(h2_free, (0, 0, 1, 0)) == 1
    assert evaluate_complex(build_c(), (1, 0, 0, 1)) == 1
    h2 = build_hamiltonian(ModelSpec(2))
    assert evaluate_complex(h2, (1, 1, 1, 1), {"g1": 2j, "g2": -1}) == pytest.approx(-2 + 4j)


def test_evaluate_errors():
    with pytest.raises(UnboundParameter):
        evaluate_complex(gamma(1) * q1(), (1, 0, 0, 0))
    with pytest.raises(SingularEvaluation):
        evaluate_complex(PhasePolynomial.var(Q2, -2), (1, 1e-13, 0, 0))
    assert evaluate_complex(PhasePolynomial.var(Q2, -2), (1, 2, 0, 0)) == pytest.approx(0.25)


def test_is_zero_examples():
    assert is_zero(PhasePolynomial())
    assert is_zero(q1() - q1())
    assert not is_zero(q1())


def test_serialization_format():
    f = gamma(1) * gamma(2) ** 2 * q1() ** 2 * p2() - Fraction(3, 2) * q2() + PhasePolynomial.const(4)
    assert serialize(f) == "1 * g1 g2^2 * q1^2 p2 - 3/2 * q2 + 4"
    assert serialize(PhasePolynomial()) == "0"
    assert serialize(PhasePolynomial.var(Q1, -2) * PhasePolynomial.param("l1")) == "1 * l1 * q1^-2"


def test_graded_lex_order():
    f = q2() + q1() + p2() ** 3 + q1() * q2() + PhasePolynomial.const(1)
    assert serialize(f) == "1 * p2^3 + 1 * q1 q2 + 1 * q1 + 1 * q2 + 1"


@given(phase_polys(min_exp=-2, max_exp=3))
def test_parse_roundtrip(f):
    assert parse(serialize(f)) == f


def test_exponent_overflow_is_checked():
    big = PhasePolynomial.var(Q1, 2**30)
    with pytest.raises(OverflowError):
        big * big * big
