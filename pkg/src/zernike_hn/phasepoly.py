"""Exact sparse Laurent polynomials in (q1, q2, p1, p2) with symbolic parameters.

Coefficients live in :class:`ParamPolynomial`, a sparse polynomial ring over
the rationals in the symbols ``g1 .. gN`` (the gammas), ``l1``, ``l2`` and a
formal ``H``.  Rationals are Python ``int`` when integral and
``fractions.Fraction`` otherwise, so arithmetic stays exact throughout.

Both polynomial types are immutable: every operation returns a new value.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple, Union

__all__ = [
    "ParamPolynomial",
    "PhasePolynomial",
    "UnboundParameter",
    "SingularEvaluation",
    "Q1",
    "Q2",
    "P1",
    "P2",
    "VARIABLES",
    "poisson_bracket",
    "partial",
    "symbol_key",
    "parse_rational",
]

Rational = Union[int, Fraction]
ParamMonomial = Tuple[Tuple[str, int], ...]
PhaseMonomial = Tuple[int, int, int, int]

VARIABLES = ("q1", "q2", "p1", "p2")
Q1, Q2, P1, P2 = range(4)

SINGULAR_THRESHOLD = 1e-12
_EXPONENT_LIMIT = 2**31 - 1

_SYMBOL_RE = re.compile(r"^(g|l)([1-9][0-9]*)$|^H$")


class UnboundParameter(KeyError):
    """A parameter symbol had no value at numeric evaluation."""


class SingularEvaluation(ZeroDivisionError):
    """A negative exponent was evaluated at a coordinate too close to zero."""


def symbol_key(name: str) -> tuple:
    """Sort key for parameter symbols: g1 < g2 < ... < l1 < l2 < H."""
    m = _SYMBOL_RE.match(name)
    if m is None:
        raise ValueError(f"unknown parameter symbol {name!r}")
    if name == "H":
        return (2, 0)
    return (0 if m.group(1) == "g" else 1, int(m.group(2)))


def _norm(c) -> Rational:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def parse_rational(text: str) -> Rational:
    return _norm(Fraction(text))


def _check_exponent(e: int) -> int:
    if abs(e) > _EXPONENT_LIMIT:
        raise OverflowError(f"exponent {e} exceeds signed 32-bit range")
    return e


def _mono_mul(a: ParamMonomial, b: ParamMonomial) -> ParamMonomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for s, e in b:
        exps[s] = exps.get(s, 0) + e
    return tuple(sorted(exps.items(), key=lambda se: symbol_key(se[0])))


def _grlex_key(exps: Tuple[int, ...]) -> tuple:
    # descending graded-lex: larger total degree first, then lex
    return (-sum(exps), tuple(-e for e in exps))


class ParamPolynomial:
    """Sparse polynomial over the rationals in the parameter symbols."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[ParamMonomial, Rational] | None = None):
        clean: Dict[ParamMonomial, Rational] = {}
        if terms:
            for m, c in terms.items():
                if not isinstance(c, (int, Fraction)):
                    raise TypeError(f"exact coefficients only, got {type(c).__name__}")
                if c != 0:
                    clean[m] = _norm(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[ParamMonomial, Rational]) -> "ParamPolynomial":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: Rational) -> "ParamPolynomial":
        return cls({(): c})

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> "ParamPolynomial":
        symbol_key(name)
        if power < 0:
            raise ValueError("parameter symbols take non-negative powers")
        if power == 0:
            return cls.const(1)
        return cls._raw({((name, power),): 1})

    @staticmethod
    def coerce(x) -> "ParamPolynomial":
        if isinstance(x, ParamPolynomial):
            return x
        if isinstance(x, (int, Fraction)):
            return ParamPolynomial.const(x)
        raise TypeError(f"cannot use {type(x).__name__} as a parameter polynomial")

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> Rational | None:
        """The rational value if this polynomial is a constant, else None."""
        if not self.terms:
            return 0
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return None

    def symbols(self) -> set:
        return {s for m in self.terms for s, _ in m}

    def degree(self, name: str | None = None) -> int:
        if not self.terms:
            return -1
        if name is None:
            return max(sum(e for _, e in m) for m in self.terms)
        return max(dict(m).get(name, 0) for m in self.terms)

    def __add__(self, other):
        other = ParamPolynomial.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = _norm(v)
            else:
                out.pop(m, None)
        return ParamPolynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return ParamPolynomial._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-ParamPolynomial.coerce(other))

    def __rsub__(self, other):
        return ParamPolynomial.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return ParamPolynomial._raw({})
            return ParamPolynomial._raw({m: _norm(c * other) for m, c in self.terms.items()})
        other = ParamPolynomial.coerce(other)
        out: Dict[ParamMonomial, Rational] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    del out[m]
        return ParamPolynomial._raw({m: _norm(c) for m, c in out.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a parameter polynomial")
        result = ParamPolynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ParamPolynomial.const(other)
        if not isinstance(other, ParamPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def substitute(self, name: str, value) -> "ParamPolynomial":
        """Replace ``name`` by a rational or another ParamPolynomial."""
        value = ParamPolynomial.coerce(value)
        out = ParamPolynomial()
        cache: Dict[int, ParamPolynomial] = {}
        for m, c in self.terms.items():
            rest = tuple((s, e) for s, e in m if s != name)
            e = dict(m).get(name, 0)
            if e not in cache:
                cache[e] = value**e
            out = out + ParamPolynomial._raw({rest: c}) * cache[e]
        return out

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        total = 0j
        for m, c in self.terms.items():
            v = complex(c)
            for s, e in m:
                if s not in values:
                    raise UnboundParameter(s)
                v *= complex(values[s]) ** e
            total += v
        return total

    def sorted_terms(self):
        return sorted(
            self.terms.items(),
            key=lambda mc: _param_order_key(mc[0]),
        )

    def __repr__(self):
        return f"ParamPolynomial({format_param(self)!r})"

    def __str__(self):
        return format_param(self)


def _param_order_key(m: ParamMonomial) -> tuple:
    # graded-lex descending over symbols in the order g1, g2, ..., l1, l2, H
    deg = sum(e for _, e in m)
    return (-deg, tuple((symbol_key(s), -e) for s, e in m))


_ONE = ParamPolynomial.const(1)


class PhasePolynomial:
    """Sparse Laurent polynomial in (q1, q2, p1, p2) with ParamPolynomial coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Iterable[int], object] | None = None):
        clean: Dict[PhaseMonomial, ParamPolynomial] = {}
        if terms:
            for m, c in terms.items():
                m = tuple(_check_exponent(int(e)) for e in m)
                if len(m) != 4:
                    raise ValueError("phase monomials have exactly four exponents")
                c = ParamPolynomial.coerce(c)
                if c.terms:
                    prev = clean.get(m)
                    c = c if prev is None else prev + c
                    if c.terms:
                        clean[m] = c
                    else:
                        clean.pop(m, None)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[PhaseMonomial, ParamPolynomial]) -> "PhasePolynomial":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def var(cls, index: int, power: int = 1) -> "PhasePolynomial":
        exps = [0, 0, 0, 0]
        exps[index] = _check_exponent(power)
        return cls._raw({tuple(exps): _ONE})

    @classmethod
    def const(cls, c) -> "PhasePolynomial":
        c = ParamPolynomial.coerce(c)
        return cls._raw({(0, 0, 0, 0): c} if c.terms else {})

    @classmethod
    def monomial(cls, exps: Iterable[int], coeff=1) -> "PhasePolynomial":
        return cls({tuple(exps): coeff})

    @classmethod
    def param(cls, name: str, power: int = 1) -> "PhasePolynomial":
        return cls.const(ParamPolynomial.symbol(name, power))

    @staticmethod
    def coerce(x) -> "PhasePolynomial":
        if isinstance(x, PhasePolynomial):
            return x
        return PhasePolynomial.const(x)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = PhasePolynomial.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m)
            if prev is None:
                out[m] = c
            else:
                s = prev + c
                if s.terms:
                    out[m] = s
                else:
                    del out[m]
        return PhasePolynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return PhasePolynomial._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-PhasePolynomial.coerce(other))

    def __rsub__(self, other):
        return PhasePolynomial.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ParamPolynomial)):
            c = ParamPolynomial.coerce(other)
            if not c.terms:
                return PhasePolynomial._raw({})
            return PhasePolynomial._raw({m: v * c for m, v in self.terms.items()})
        other = PhasePolynomial.coerce(other)
        out: Dict[PhaseMonomial, ParamPolynomial] = {}
        for (a0, a1, a2, a3), c1 in self.terms.items():
            for (b0, b1, b2, b3), c2 in other.terms.items():
                m = (a0 + b0, a1 + b1, a2 + b2, a3 + b3)
                prod = c1 * c2
                prev = out.get(m)
                if prev is None:
                    out[m] = prod
                else:
                    s = prev + prod
                    if s.terms:
                        out[m] = s
                    else:
                        del out[m]
        for m in out:
            for e in m:
                _check_exponent(e)
        return PhasePolynomial._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) == 1:
                ((m, c),) = self.terms.items()
                if c == _ONE:
                    return PhasePolynomial._raw({tuple(e * n for e in m): _ONE})
            raise ValueError("negative powers only of unit monomials")
        result = PhasePolynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, PhasePolynomial):
            try:
                other = PhasePolynomial.coerce(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def degree_in(self, index: int) -> int:
        return max((m[index] for m in self.terms), default=-1)

    def momentum_degree(self) -> int:
        return max((m[2] + m[3] for m in self.terms), default=-1)

    def parameters(self) -> set:
        out = set()
        for c in self.terms.values():
            out |= c.symbols()
        return out

    def partial(self, index: int) -> "PhasePolynomial":
        return partial(self, index)

    def permute(self, perm: Tuple[int, int, int, int]) -> "PhasePolynomial":
        """Rename variables: variable ``i`` of the input becomes ``perm[i]``."""
        out = {}
        for m, c in self.terms.items():
            new = [0, 0, 0, 0]
            for i, e in enumerate(m):
                new[perm[i]] = e
            out[tuple(new)] = c
        return PhasePolynomial._raw(out)

    def swap12(self) -> "PhasePolynomial":
        """The index interchange 1 <-> 2 on both positions and momenta."""
        return self.permute((Q2, Q1, P2, P1))

    def map_coefficients(self, fn) -> "PhasePolynomial":
        return PhasePolynomial({m: fn(c) for m, c in self.terms.items()})

    def substitute_param(self, name: str, value) -> "PhasePolynomial":
        """Substitute a parameter symbol by a constant or by a PhasePolynomial."""
        if isinstance(value, PhasePolynomial):
            out = PhasePolynomial()
            powers: Dict[int, PhasePolynomial] = {}
            for m, c in self.terms.items():
                for pm, pc in c.terms.items():
                    d = dict(pm)
                    e = d.pop(name, 0)
                    if e not in powers:
                        powers[e] = value**e
                    rest = ParamPolynomial._raw({tuple(sorted(d.items(), key=lambda se: symbol_key(se[0]))): pc})
                    out = out + PhasePolynomial._raw({m: rest}) * powers[e]
            return out
        return self.map_coefficients(lambda c: c.substitute(name, value))

    def coefficient(self, exps: Iterable[int]) -> ParamPolynomial:
        return self.terms.get(tuple(exps), ParamPolynomial())

    def flat_terms(self):
        """Yield ``(phase_monomial, param_monomial, rational)`` in canonical order."""
        for m in sorted(self.terms, key=_grlex_key):
            for pm, c in self.terms[m].sorted_terms():
                yield m, pm, c

    def evaluate(self, point, params: Mapping[str, complex] | None = None,
                 threshold: float = SINGULAR_THRESHOLD) -> complex:
        """Evaluate numerically in double-precision complex arithmetic."""
        params = params or {}
        z = [complex(x) for x in point]
        if len(z) != 4:
            raise ValueError("a phase-space point has four components")
        total = 0j
        for m, c in self.terms.items():
            v = c.evaluate(params)
            for i, e in enumerate(m):
                if e < 0 and abs(z[i]) < threshold:
                    raise SingularEvaluation(
                        f"{VARIABLES[i]}^{e} at |{VARIABLES[i]}| = {abs(z[i]):.3g}"
                    )
                if e:
                    v *= z[i] ** e
            total += v
        return total

    def serialize(self) -> str:
        return serialize(self)

    def __str__(self):
        return serialize(self)

    def __repr__(self):
        return f"PhasePolynomial({serialize(self)!r})"


def partial(f: PhasePolynomial, index: int) -> PhasePolynomial:
    """Formal Laurent derivative with respect to variable ``index``."""
    if index not in (0, 1, 2, 3):
        raise ValueError(f"variable index must be 0..3, got {index}")
    out = {}
    for m, c in f.terms.items():
        e = m[index]
        if e == 0:
            continue
        new = list(m)
        new[index] = e - 1
        out[tuple(new)] = c * e
    return PhasePolynomial._raw(out)


def poisson_bracket(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    """Canonical bracket sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i)."""
    out = PhasePolynomial()
    for qi, pi in ((Q1, P1), (Q2, P2)):
        out = out + partial(f, qi) * partial(g, pi) - partial(f, pi) * partial(g, qi)
    return out


def _format_rational(c: Rational) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def _format_param_mono(m: ParamMonomial) -> str:
    return " ".join(s if e == 1 else f"{s}^{e}" for s, e in m)


def _format_phase_mono(m: PhaseMonomial) -> str:
    return " ".join(
        VARIABLES[i] if e == 1 else f"{VARIABLES[i]}^{e}"
        for i, e in enumerate(m)
        if e != 0
    )


def _format_term(c: Rational, parts) -> str:
    return " * ".join([_format_rational(c)] + [p for p in parts if p])


def _join(terms) -> str:
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        if t.startswith("-"):
            out += " - " + t[1:]
        else:
            out += " + " + t
    return out


def format_param(p: ParamPolynomial) -> str:
    return _join([_format_term(c, [_format_param_mono(m)]) for m, c in p.sorted_terms()])


def serialize(f: PhasePolynomial) -> str:
    """Canonical text form: ``coeff * g1^a ... * q1^e ...`` per term, grlex order."""
    return _join([
        _format_term(c, [_format_param_mono(pm), _format_phase_mono(m)])
        for m, pm, c in f.flat_terms()
    ])


_TERM_RE = re.compile(r"^(?P<coeff>[0-9]+(?:/[0-9]+)?)(?P<rest>(?: \* [^*]+)*)$")


def parse(text: str) -> PhasePolynomial:
    """Inverse of :func:`serialize`."""
    text = text.strip()
    if text == "0":
        return PhasePolynomial()
    pieces = re.split(r" (?=[+-] )", text)
    result = PhasePolynomial()
    for i, piece in enumerate(pieces):
        sign = 1
        if i == 0 and piece.startswith("-"):
            sign, piece = -1, piece[1:]
        elif i > 0:
            sign = -1 if piece[0] == "-" else 1
            piece = piece[2:]
        m = _TERM_RE.match(piece)
        if m is None:
            raise ValueError(f"cannot parse term {piece!r}")
        coeff = Fraction(m.group("coeff")) * sign
        phase = [0, 0, 0, 0]
        pmono = {}
        for factor in m.group("rest").split(" * ")[1:]:
            for tok in factor.split():
                name, _, e = tok.partition("^")
                e = int(e) if e else 1
                if name in VARIABLES:
                    phase[VARIABLES.index(name)] += e
                else:
                    pmono[name] = pmono.get(name, 0) + e
        pm = tuple(sorted(pmono.items(), key=lambda se: symbol_key(se[0])))
        result = result + PhasePolynomial._raw({tuple(phase): ParamPolynomial({pm: _norm(coeff)})})
    return result


def q1() -> PhasePolynomial:
    return PhasePolynomial.var(Q1)


def q2() -> PhasePolynomial:
    return PhasePolynomial.var(Q2)


def p1() -> PhasePolynomial:
    return PhasePolynomial.var(P1)


def p2() -> PhasePolynomial:
    return PhasePolynomial.var(P2)


def gamma(n: int) -> PhasePolynomial:
    return PhasePolynomial.param(f"g{n}")


def evaluate_complex(f: PhasePolynomial, point, params=None) -> complex:
    return f.evaluate(point, params)


def is_zero(f: PhasePolynomial) -> bool:
    return f.is_zero()


def add(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    return a + b


def mul(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    return a * b

