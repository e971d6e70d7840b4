"""States of a vertex algebra in canonical PBW form.

A state is a finite linear combination of right-nested normally ordered
words :a1(:a2(...):): in derivatives of generators.  Letters are small
tuples so that words hash fast and sort under the fixed total order
(ordinary letters by generator index then derivative order, exponential
letters last, by lattice index then exponent).

Raw, un-normalized expressions are nested tuples ("trees") built by the
helpers at the bottom; the engine turns trees into canonical states.
"""

from fractions import Fraction


class ExprError(Exception):
    pass


class UnknownGenerator(ExprError):
    pass


class InhomogeneousState(ExprError):
    pass


EVEN, ODD = 0, 1


class GeneratorDecl:
    """A declared generator: name, conformal weight, parity, gradings."""

    __slots__ = ("name", "weight", "parity", "charges")

    def __init__(self, name, weight, parity=EVEN, charges=None):
        self.name = name
        self.weight = Fraction(weight)
        self.parity = parity
        self.charges = dict(charges or {})
        if (2 * self.weight).denominator != 1:
            raise ExprError("weight of %s not a half-integer" % name)

    def __repr__(self):
        return "GeneratorDecl(%r, %s)" % (self.name, self.weight)

    def __eq__(self, other):
        return (isinstance(other, GeneratorDecl)
                and (self.name, self.weight, self.parity, self.charges)
                == (other.name, other.weight, other.parity, other.charges))


class LatticeDecl:
    """An isotropic lattice line with exponential states exp(n*base).

    ``pairings`` maps ordinary generator names to (g, base); the only
    nonzero lambda-brackets of exp(n) are [g_L exp(n)] = n*(g,base) exp(n).
    The derivative acts by d exp(n) = n :base exp(n):.
    """

    __slots__ = ("base", "step", "pairings")

    def __init__(self, base, step, pairings):
        self.base = base
        self.step = Fraction(step)
        self.pairings = {g: Fraction(v) for g, v in pairings.items()}

    def __eq__(self, other):
        return (isinstance(other, LatticeDecl)
                and (self.base, self.step, self.pairings)
                == (other.base, other.step, other.pairings))


# Letters ----------------------------------------------------------------
#
# ordinary:    (0, gen_index, deriv_order)
# exponential: (1, lattice_index, exponent)   -- always derivative-free

def letter(gen_index, deriv=0):
    return (0, gen_index, deriv)


def exp_letter(lattice_index, exponent):
    return (1, lattice_index, Fraction(exponent))


def is_exp(l):
    return l[0] == 1


VACUUM = ()


# Raw expression trees ----------------------------------------------------

def gen(name):
    return ("gen", name)


def dn(n, node):
    if n == 0:
        return node
    return ("d", n, node)


def no(a, b):
    return ("no", a, b)


def nos(*nodes):
    """Right-nested normal product :n1(:n2(...):):."""
    if not nodes:
        return one()
    out = nodes[-1]
    for x in reversed(nodes[:-1]):
        out = no(x, out)
    return out


def add(*nodes):
    return ("add", list(nodes))


def smul(scalar, node):
    return ("smul", scalar, node)


def exp(n, lattice=0):
    return ("exp", Fraction(n), lattice)


def one():
    return ("one",)


def mode(n, a, b):
    """The n-th product A_(n)B as a raw tree node."""
    return ("mode", n, a, b)


def tree_subst(node, mapping):
    """Replace ("gen", name) leaves by trees from ``mapping``."""
    tag = node[0]
    if tag == "gen":
        return mapping.get(node[1], node)
    if tag == "d":
        return ("d", node[1], tree_subst(node[2], mapping))
    if tag == "no":
        return ("no", tree_subst(node[1], mapping), tree_subst(node[2], mapping))
    if tag == "add":
        return ("add", [tree_subst(x, mapping) for x in node[1]])
    if tag == "smul":
        return ("smul", node[1], tree_subst(node[2], mapping))
    if tag == "mode":
        return ("mode", node[1], tree_subst(node[2], mapping),
                tree_subst(node[3], mapping))
    return node


def tree_map_scalars(node, f):
    tag = node[0]
    if tag == "d":
        return ("d", node[1], tree_map_scalars(node[2], f))
    if tag == "no":
        return ("no", tree_map_scalars(node[1], f), tree_map_scalars(node[2], f))
    if tag == "add":
        return ("add", [tree_map_scalars(x, f) for x in node[1]])
    if tag == "smul":
        return ("smul", f(node[1]), tree_map_scalars(node[2], f))
    if tag == "mode":
        return ("mode", node[1], tree_map_scalars(node[2], f),
                tree_map_scalars(node[3], f))
    return node


class State:
    """A canonical state: {word: Scalar} over a fixed algebra."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg, terms):
        self.alg = alg
        self.terms = terms

    def __eq__(self, other):
        return (isinstance(other, State) and self.alg is other.alg
                and self.terms == other.terms)

    def __bool__(self):
        return bool(self.terms)

    @property
    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        from . import bracket
        out = dict(self.terms)
        bracket.sadd(out, other.terms)
        return State(self.alg, out)

    def __sub__(self, other):
        from . import bracket
        out = dict(self.terms)
        bracket.sadd(out, other.terms, -1)
        return State(self.alg, out)

    def __mul__(self, c):
        from . import bracket
        return State(self.alg, bracket.sscale(self.terms, c))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def weight(self):
        return weight_of_terms(self.alg, self.terms)

    def __repr__(self):
        return "State(%s)" % (format_terms(self.alg, self.terms),)


def letter_weight(alg, l):
    if l[0] == 1:
        return Fraction(0)
    return alg.generators[l[1]].weight + l[2]


def word_weight(alg, w):
    return sum((letter_weight(alg, l) for l in w), Fraction(0))


def weight_of_terms(alg, terms):
    if not terms:
        return None
    weights = {word_weight(alg, w) for w in terms}
    if len(weights) > 1:
        raise InhomogeneousState("weights %s" % sorted(weights))
    return weights.pop()


def letter_name(alg, l):
    if l[0] == 1:
        n = l[2]
        base = alg.lattices[l[1]].base
        return "exp(%s%s)" % (n, "*" + base if False else "")
    g = alg.generators[l[1]].name
    return g + "'" * l[2] if l[2] <= 3 else "d(%d,%s)" % (l[2], g)


def format_terms(alg, terms):
    if not terms:
        return "0"
    parts = []
    for w in sorted(terms):
        body = ":".join(letter_name(alg, l) for l in w) or "1"
        parts.append("(%s)*%s" % (terms[w], body))
    return " + ".join(parts)
