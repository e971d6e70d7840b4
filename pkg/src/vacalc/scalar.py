"""Exact rational-function arithmetic over the rationals.

A Scalar is an element of Q(p1, ..., pn) for a declared tuple of parameter
names.  Internally we keep a cancelled numerator/denominator pair of sparse
polynomials (sympy's polys rings, gmpy-backed), so equality of canonical
forms is plain ``==``.  Scalars with different parameter tuples unify to the
union tuple automatically, which keeps tensor constructions and parameter
substitutions painless.
"""

from fractions import Fraction

from sympy import QQ
from sympy import Poly as SymPoly
from sympy import Symbol
from sympy.polys.fields import FracField

RatQ = Fraction


class ScalarError(ArithmeticError):
    pass


class DivisionByZero(ScalarError):
    pass


class PoleAtPoint(ScalarError):
    pass


_FIELDS = {}


def _field(params):
    fld = _FIELDS.get(params)
    if fld is None:
        fld = FracField(list(params), QQ)
        _FIELDS[params] = fld
    return fld


def _to_qq(x):
    f = Fraction(x)
    return QQ(f.numerator, f.denominator)


def _qq_to_frac(x):
    return Fraction(int(x.numerator), int(x.denominator))


class Scalar:
    """An exact rational function in a finite set of named parameters."""

    __slots__ = ("params", "_elt")

    def __init__(self, params, elt):
        self.params = params
        self._elt = elt

    # -- constructors -------------------------------------------------

    @staticmethod
    def rational(x, params=()):
        fld = _field(tuple(params))
        return Scalar(tuple(params), fld.ground_new(_to_qq(x)))

    @staticmethod
    def param(name, params=None):
        if params is None:
            params = (name,)
        params = tuple(params)
        fld = _field(params)
        return Scalar(params, fld.gens[params.index(name)])

    @staticmethod
    def zero(params=()):
        return Scalar.rational(0, params)

    @staticmethod
    def one(params=()):
        return Scalar.rational(1, params)

    # -- context unification ------------------------------------------

    def to_params(self, params):
        params = tuple(params)
        if params == self.params:
            return self
        if not set(self.params) <= set(params):
            raise ScalarError(
                "cannot narrow %r into parameter set %r" % (self.params, params))
        fld = _field(params)
        ring = fld.ring
        pos = [params.index(p) for p in self.params]

        def convert(poly):
            d = {}
            for mono, coeff in poly.terms():
                new = [0] * len(params)
                for i, e in enumerate(mono):
                    new[pos[i]] = e
                d[tuple(new)] = coeff
            return ring.from_dict(d)

        return Scalar(params, fld.raw_new(convert(self._elt.numer),
                                          convert(self._elt.denom)))

    def _unify(self, other):
        if not isinstance(other, Scalar):
            other = Scalar.rational(other, self.params)
        if self.params == other.params:
            return self, other
        merged = tuple(dict.fromkeys(self.params + other.params))
        return self.to_params(merged), other.to_params(merged)

    @staticmethod
    def _coercible(other):
        return isinstance(other, (Scalar, int, Fraction))

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        if not self._coercible(other):
            return NotImplemented
        a, b = self._unify(other)
        return Scalar(a.params, a._elt + b._elt)

    __radd__ = __add__

    def __sub__(self, other):
        if not self._coercible(other):
            return NotImplemented
        a, b = self._unify(other)
        return Scalar(a.params, a._elt - b._elt)

    def __rsub__(self, other):
        if not self._coercible(other):
            return NotImplemented
        a, b = self._unify(other)
        return Scalar(a.params, b._elt - a._elt)

    def __mul__(self, other):
        if not self._coercible(other):
            return NotImplemented
        a, b = self._unify(other)
        return Scalar(a.params, a._elt * b._elt)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not self._coercible(other):
            return NotImplemented
        a, b = self._unify(other)
        if not b._elt:
            raise DivisionByZero("division by zero scalar")
        return Scalar(a.params, a._elt / b._elt)

    def __rtruediv__(self, other):
        if not self._coercible(other):
            return NotImplemented
        a, b = self._unify(other)
        if not a._elt:
            raise DivisionByZero("division by zero scalar")
        return Scalar(a.params, b._elt / a._elt)

    def __pow__(self, n):
        if n >= 0:
            return Scalar(self.params, self._elt ** n)
        if not self._elt:
            raise DivisionByZero("zero to a negative power")
        return Scalar(self.params, self._elt ** n)

    def __neg__(self):
        return Scalar(self.params, -self._elt)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.rational(other, self.params)
        if not isinstance(other, Scalar):
            return NotImplemented
        a, b = self._unify(other)
        return a._elt == b._elt

    def __hash__(self):
        # hash like a rational when constant so Scalar(2) == 2 hashes equal
        c = self.as_rational()
        if c is not None:
            return hash(c)
        return hash((self.params, self._elt))

    def __bool__(self):
        return bool(self._elt)

    @property
    def is_zero(self):
        return not self._elt

    # -- structure -----------------------------------------------------

    def numer_terms(self):
        """Numerator as {exponent tuple: Fraction}."""
        return {tuple(m): _qq_to_frac(c) for m, c in self._elt.numer.terms()}

    def denom_terms(self):
        return {tuple(m): _qq_to_frac(c) for m, c in self._elt.denom.terms()}

    def as_rational(self):
        """This scalar as a Fraction if it is constant, else None."""
        num, den = self._elt.numer, self._elt.denom
        if num.is_ground and den.is_ground:
            if not num:
                return Fraction(0)
            return _qq_to_frac(num.coeff(1)) / _qq_to_frac(den.coeff(1))
        return None

    def degree(self, name):
        i = self.params.index(name)
        dn = max((m[i] for m, _ in self._elt.numer.terms()), default=0)
        dd = max((m[i] for m, _ in self._elt.denom.terms()), default=0)
        return dn, dd

    # -- maps ------------------------------------------------------------

    def eval(self, point):
        """Exact evaluation at a rational point {param: Fraction}."""
        s = self
        for name, val in point.items():
            if name in s.params:
                s = s.subst(name, Scalar.rational(val))
        c = s.as_rational()
        if c is None:
            raise ScalarError("point does not fix all parameters of %r" % (self,))
        return c

    def subst(self, name, value):
        """Ring map sending one parameter to a Scalar (exact)."""
        if name not in self.params:
            return self
        if not isinstance(value, Scalar):
            value = Scalar.rational(value)
        rest = tuple(p for p in self.params if p != name)
        target = tuple(dict.fromkeys(rest + value.params))
        i = self.params.index(name)

        def map_poly(poly):
            out = Scalar.zero(target)
            for mono, coeff in poly.terms():
                term = Scalar.rational(_qq_to_frac(coeff), target)
                for j, e in enumerate(mono):
                    if e == 0:
                        continue
                    if j == i:
                        term = term * value.to_params(target) ** e
                    else:
                        term = term * Scalar.param(self.params[j], target) ** e
                out = out + term
            return out

        num = map_poly(self._elt.numer)
        den = map_poly(self._elt.denom)
        if den.is_zero:
            raise PoleAtPoint("substitution hits a pole of %r" % (self,))
        return num / den

    # -- presentation ----------------------------------------------------

    def __repr__(self):
        return "Scalar(%s)" % (self._elt,)

    def __str__(self):
        return str(self._elt)

    def text(self):
        """Canonical text form, reparseable by parse_scalar."""
        num, den = self._elt.numer, self._elt.denom
        s = _poly_text(num, self.params)
        if den != self._elt.field.ring.one:
            s = "(%s)/(%s)" % (s, _poly_text(den, self.params))
        return s


def _frac_text(f):
    return str(f) if f.denominator != 1 else str(f.numerator)


def _poly_text(poly, params):
    terms = sorted(poly.terms(), reverse=True)
    if not terms:
        return "0"
    parts = []
    for mono, coeff in terms:
        c = _qq_to_frac(coeff)
        factors = []
        for name, e in zip(params, mono):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append("%s^%d" % (name, e))
        body = "*".join(factors)
        if not body:
            item = _frac_text(abs(c))
        elif abs(c) == 1:
            item = body
        else:
            item = "%s*%s" % (_frac_text(abs(c)), body)
        parts.append(("-" if c < 0 else "+", item))
    sign, first = parts[0]
    out = ("-" if sign == "-" else "") + first
    for sign, item in parts[1:]:
        out += " %s %s" % (sign, item)
    return out


# -- scalar expression parsing -----------------------------------------

def parse_scalar(text, params):
    """Parse `+ - * / ^ ( )`, integers, fractions and parameter names."""
    from .dsl import ScalarParser
    return ScalarParser(text, params).parse()


# -- polynomial utilities ----------------------------------------------

def linear_factor_decompose(p):
    """Split a univariate polynomial Scalar into rational linear factors.

    Returns (constant, [(root, multiplicity), ...], residual) with
    p == constant * prod (x - root)^mult * residual and residual free of
    rational roots.  The residual is returned as a monic Scalar.
    """
    if p.is_zero:
        raise ScalarError("zero polynomial")
    live = [name for name in p.params
            if any(m[p.params.index(name)] for m in p.numer_terms())]
    if len(live) > 1:
        raise ScalarError("polynomial is not univariate: %r" % (live,))
    if p.denom_terms() != {(0,) * len(p.params): Fraction(1)} and \
            len(p.denom_terms()) != 1:
        raise ScalarError("not a polynomial: %r" % (p,))
    den = next(iter(p.denom_terms().values()))
    if not live:
        c = p.as_rational()
        return c, [], Scalar.one(p.params)
    name = live[0]
    x = Symbol(name)
    i = p.params.index(name)
    expr = sum((c / den) * x ** m[i] for m, c in p.numer_terms().items())
    poly = SymPoly(expr, x, domain=QQ)
    roots = poly.ground_roots()
    factors = []
    for root, mult in sorted(roots.items(), key=lambda t: Fraction(str(t[0]))):
        r = Fraction(str(root))
        factors.append((r, mult))
        lin = SymPoly(x - r, x, domain=QQ)
        for _ in range(mult):
            poly = poly.exquo(lin)
    lead = Fraction(str(poly.LC()))
    poly = poly.monic()
    residual = Scalar.zero(p.params)
    for (e,), c in poly.terms():
        residual = residual + Scalar.rational(Fraction(str(c)), p.params) * \
            Scalar.param(name, p.params) ** e
    return lead, factors, residual


def equal_up_to_constant(a, b):
    """The nonzero rational q with a == q*b, if one exists."""
    if a.is_zero and b.is_zero:
        return Fraction(1)
    if a.is_zero or b.is_zero:
        return None
    q = a / b
    return q.as_rational()
