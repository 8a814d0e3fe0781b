from fractions import Fraction

import pytest

from zernike_hn.phasepoly import ParamPolynomial, PhasePolynomial, gamma, p1, p2, poisson_bracket, q1, q2
from zernike_hn.racah import (
    build_generators, decompose, from_table_layout, l1_l3_residual, power_label,
    table2_reference, to_table_layout, verify_table2,
)
from zernike_hn.zernike import ModelSpec, build_c, build_hamiltonian


def sym(name, power=1):
    return ParamPolynomial.symbol(name, power)


def test_generators_n2():
    g = build_generators(ModelSpec(2))
    assert g.L1 == build_c() * Fraction(1, 2)
    expected = ((1 + gamma(2) * (q1() ** 2 + q2() ** 2)) * p1() * p2()
                + Fraction(1, 2) * gamma(1) * (q1() * p2() + q2() * p1()))
    assert g.L3 == expected


def test_generators_free_limit():
    assert build_generators(ModelSpec(3, {})).L3 == p1() * p2()


@pytest.mark.parametrize("n", range(1, 9))
def test_left_brackets(n):
    spec = ModelSpec(n)
    g = build_generators(spec)
    assert poisson_bracket(g.L1, g.L2) == g.L3
    assert l1_l3_residual(spec).is_zero()


@pytest.mark.parametrize("n", range(1, 9))
def test_generators_are_integrals(n):
    spec = ModelSpec(n)
    h, g = build_hamiltonian(spec), build_generators(spec)
    for gen in (g.L1, g.L2, g.L3):
        assert poisson_bracket(h, gen).is_zero()


def test_n1_and_n2():
    assert decompose(ModelSpec(1)).table_coefficients() == [-sym("g1", 2)]
    t2 = decompose(ModelSpec(2)).table_coefficients()
    assert t2 == [-(sym("g1", 2) + 2 * sym("g2") * sym("H")), -sym("g2", 2)]


def test_n3_alpha_beta():
    dec = decompose(ModelSpec(3))
    table = dec.table_coefficients()
    assert table[0] == -sym("g1", 2) - 2 * sym("g2") * sym("H")
    assert table[1] == -(sym("g2", 2) - 2 * sym("g1") * sym("g3"))
    assert table[2] == Fraction(-3, 2) * sym("g3", 2)
    assert dec.beta[0] == -2 * sym("g2")
    assert dec.beta[1].is_zero() and dec.beta[2].is_zero()


def test_n4_and_n5_entries():
    t4 = decompose(ModelSpec(4)).table_coefficients()
    assert t4[3] == -2 * sym("g4", 2)
    assert t4[1] == -(sym("g2", 2) - 2 * sym("g1") * sym("g3") - 2 * sym("g4") * sym("H"))
    t5 = decompose(ModelSpec(5)).table_coefficients()
    assert t5[4] == Fraction(-5, 2) * sym("g5", 2)


def test_n6_leading():
    assert decompose(ModelSpec(6)).table_coefficients()[5] == -3 * sym("g6", 2)


def test_verify_table2():
    report = verify_table2(6)
    assert [r.order for r in report] == list(range(1, 7))
    assert all(r.passed for r in report)
    with pytest.raises(ValueError):
        verify_table2(7)


@pytest.mark.parametrize("n", range(2, 7))
def test_leading_coefficient_pattern(n):
    table = decompose(ModelSpec(n)).table_coefficients()
    assert len(table) == n
    assert table[-1] == Fraction(-n, 2) * sym(f"g{n}", 2)


@pytest.mark.parametrize("n", range(1, 9))
def test_residual_and_substitution(n):
    spec = ModelSpec(n)
    dec = decompose(spec)
    assert dec.residual.is_zero()
    assert dec.free_unknowns == 0
    g = build_generators(spec)
    # independent re-check: substitute H_N into each coefficient and rebuild
    h = build_hamiltonian(spec)
    rebuilt = PhasePolynomial()
    power = g.L1
    for c in dec.coefficients:
        rebuilt = rebuilt + (PhasePolynomial.const(1) * c).substitute_param("H", h) * power
        power = power * g.L1 * g.L1
    bracket = poisson_bracket(g.L2, g.L3)
    assert (bracket - rebuilt).is_zero()


@pytest.mark.parametrize("n", range(1, 9))
def test_ordering_independence(n):
    a = decompose(ModelSpec(n))
    b = decompose(ModelSpec(n), column_order="reversed")
    assert a.coefficients == b.coefficients


def test_no_h_squared_terms():
    for n in range(1, 9):
        for c in decompose(ModelSpec(n)).coefficients:
            assert all(dict(m).get("H", 0) <= 1 for m in c.terms)


def test_layout_helpers():
    coeffs = [sym("g1"), sym("g2"), sym("g3")]
    assert from_table_layout(to_table_layout(coeffs)) == coeffs
    assert to_table_layout(coeffs)[1] == sym("g2") * Fraction(1, 8)
    assert [power_label(k) for k in range(3)] == ["L1", "(2L1)^3", "(2L1)^5"]


def test_table2_reference_extent():
    assert len(table2_reference(6)) == 6
    with pytest.raises(KeyError):
        table2_reference(7)


def test_lines_layout():
    assert decompose(ModelSpec(2)).lines() == ["L1: -1 * g1^2 - 2 * g2 H", "(2L1)^3: -1 * g2^2"]
