"""Hypothesis strategies for random parameter and phase-space polynomials."""

from fractions import Fraction

from hypothesis import strategies as st

from zernike_hn.phasepoly import ParamPolynomial, PhasePolynomial

SYMBOLS = ("g1", "g2", "g3", "l1")

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


@st.composite
def param_polys(draw, max_terms=3, max_exp=2):
    out = ParamPolynomial()
    for _ in range(draw(st.integers(0, max_terms))):
        term = ParamPolynomial.const(draw(rationals))
        for s in draw(st.lists(st.sampled_from(SYMBOLS), max_size=2)):
            term = term * ParamPolynomial.symbol(s, draw(st.integers(1, max_exp)))
        out = out + term
    return out


@st.composite
def phase_polys(draw, max_terms=4, min_exp=0, max_exp=3, with_params=True):
    out = PhasePolynomial()
    exps = st.tuples(*[st.integers(min_exp, max_exp)] * 4)
    for _ in range(draw(st.integers(0, max_terms))):
        coeff = draw(param_polys(max_terms=2)) if with_params else ParamPolynomial.const(draw(rationals))
        out = out + PhasePolynomial.monomial(draw(exps), coeff)
    return out
