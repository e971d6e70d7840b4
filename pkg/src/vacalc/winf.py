"""The two-parameter algebra of type W(2, 3, 4, ...) and its specializations.

The bracket table P[n, m] covers the weight range n + m <= 9 in generators
W2..W7 (W2 = L); pairs beyond that range raise MissingBracket, never an
extrapolation.  The structure constants are polynomials in the central
charge c and the coupling lam.

Specialized sectors inside the bundled W-algebras use the same table after
the substitution c -> c(k), lam -> lam(k), with the printed normalizers:
the weight-r field maps to n^(1-r/2) * Omega_r, so every specialized
bracket is polynomial in n after pairing the half-integer powers.  The
expansion tracks a formal parameter s with s^2 = n and checks that only
even powers survive.
"""

from fractions import Fraction

from . import expr as ex
from .dsl import Context, ExprParser, tokenize
from .scalar import Scalar

GEN_NAMES = ["W2", "W3", "W4", "W5", "W6", "W7"]

P = {
    (2, 2): {3: "c/2", 1: "2*W2", 0: "d(1,W2)"},
    (2, 3): {1: "3*W3", 0: "d(1,W3)"},
    (3, 3): {5: "c/3", 3: "2*W2", 2: "d(1,W2)", 1: "W4",
             0: "(1/2)*d(1,W4) - (1/12)*d(3,W2)"},
    (2, 4): {5: "3*c", 3: "10*W2", 2: "3*d(1,W2)", 1: "4*W4", 0: "d(1,W4)"},
    (2, 5): {3: "-5*(-37+16*(2+c)*lam)*W3",
             2: "-(-55+16*(2+c)*lam)*d(1,W3)",
             1: "5*W5", 0: "d(1,W5)"},
    (3, 4): {3: "-(-31+16*(2+c)*lam)*W3",
             2: "-(8/3)*(-5+2*(2+c)*lam)*d(1,W3)",
             1: "W5",
             0: "(2/15)*(48*lam*no(W2,d(1,W3)) - 72*lam*no(d(1,W2),W3)"
                " + 3*d(1,W5) + (-5+2*(-1+c)*lam)*d(3,W3))"},
    (2, 6): {7: "-13*c*(-55+16*lam*(2+c))",
             5: "(2100-768*lam*(2+c))*W2",
             4: "(770-224*lam*(2+c))*d(1,W2)",
             3: "(660-80*lam*(13+5*c))*W4 + 640*lam*no(W2,W2)"
                " + (50+40*lam*(-1+c))*d(2,W2)",
             2: "(195-12*lam*(17+7*c))*d(1,W4) + 192*lam*no(d(1,W2),W2)"
                " + (1/6)*(-65+4*lam*(31+17*c))*d(3,W2)",
             1: "6*W6", 0: "d(1,W6)"},
    (3, 5): {7: "-c*(-55+16*lam*(2+c))",
             5: "-(4/3)*(-175+64*lam*(2+c))*W2",
             4: "(110-32*lam*(2+c))*d(1,W2)",
             3: "(95-16*lam*(11+4*c))*W4 + 128*lam*no(W2,W2)"
                " + (10+8*lam*(-1+c))*d(2,W2)",
             2: "64*lam*no(d(1,W2),W2) + (75/2-4*lam*(13+5*c))*d(1,W4)"
                " + (1/12)*(-25+8*lam*(9+5*c))*d(3,W2)",
             1: "W6",
             0: "(1/3)*d(1,W6) + (32*lam/3)*no(W2,d(1,W4))"
                " - (64*lam/3)*no(d(1,W2),W4) - (16*lam/3)*no(d(3,W2),W2)"
                " + (-5/4+(2/3)*lam*(1+c))*d(3,W4)"
                " + (5/72-(1/45)*lam*(13+5*c))*d(5,W2)"},
    (4, 4): {7: "-(1/3)*c*(-139+16*lam*(2+c))",
             5: "-(4/3)*(-125+32*lam*(2+c))*W2",
             4: "(250/3-(64/3)*lam*(2+c))*d(1,W2)",
             3: "(72-48*lam*(3+c))*W4 + 128*lam*no(W2,W2)"
                " + (10+8*lam*(-1+c))*d(2,W2)",
             2: "128*lam*no(d(1,W2),W2) + (36-24*lam*(3+c))*d(1,W4)"
                " + (1/18)*(-35+8*lam*(23+13*c))*d(3,W2)",
             1: "(4/5)*W6 + (64*lam/5)*no(W2,W4) - (288*lam/5)*no(W3,W3)"
                " + 32*lam*no(d(2,W2),W2) + 16*lam*no(d(1,W2),d(1,W2))"
                " + (1/15)*(35-4*lam*(19+11*c))*d(2,W4)"
                " + (1/90)*(-5+4*lam*(7+23*c))*d(4,W2)",
             # the printed constant term is the negative of the one forced
             # by skew-symmetry of the diagonal pair; sign restored here
             0: "(2/5)*d(1,W6) + (32*lam/5)*no(W2,d(1,W4))"
                " - (288*lam/5)*no(d(1,W3),W3) + (32*lam/5)*no(d(1,W2),W4)"
                " + (16*lam/3)*no(d(3,W2),W2)"
                " + (-11/6+(16/15)*lam+(8/15)*lam*c)*d(3,W4)"
                " + (1/4-(8/25)*lam)*d(5,W2)"},
    (2, 7): {5: "18*(4725-4784*lam*(2+c)+256*lam^2*(26+23*c+5*c^2))*W3",
             4: "14*(2225-1920*lam*(2+c)+64*lam^2*(34+31*c+7*c^2))*d(1,W3)",
             3: "-5*(-357+8*lam*(97+31*c))*W5"
                " - 640*lam*(-35+8*lam*(2+c))*no(W2,W3)"
                " + (5/2)*(805-8*lam*(19+27*c)+128*lam^2*(6+5*c+c^2))*d(2,W3)",
             2: "-(3/5)*(-875+32*lam*(39+14*c))*d(1,W5)"
                " - (64/5)*lam*(-425+4*lam*(79+29*c))*no(W2,d(1,W3))"
                " + (288/5)*lam*(5+4*lam*(13+3*c))*no(d(1,W2),W3)"
                " + (-875/2+152*lam*(5+3*c)"
                "-(32/5)*lam^2*(-23+15*c+8*c^2))*d(3,W3)",
             1: "7*W7", 0: "d(1,W7)"},
    (3, 6): {5: "2*(4375-4656*lam*(2+c)+256*lam^2*(26+23*c+5*c^2))*W3",
             4: "4*(975-920*lam*(2+c)+32*lam^2*(34+31*c+7*c^2))*d(1,W3)",
             3: "(225-8*lam*(71+21*c))*W5"
                " - 128*lam*(-29+8*lam*(2+c))*no(W2,W3)"
                " + (665/2-4*lam*(53+41*c)+64*lam^2*(6+5*c+c^2))*d(2,W3)",
             2: "(84-(4/5)*lam*(193+63*c))*d(1,W5)"
                " - (32/15)*lam*(-505+4*lam*(107+37*c))*no(W2,d(1,W3))"
                " - (48/5)*lam*(-55+4*lam*(-9+c))*no(d(1,W2),W3)"
                " + (-70+lam*(490/3+82*c)"
                "-(16/15)*lam^2*(-29+20*c+9*c^2))*d(3,W3)",
             1: "W7",
             0: "(2/7)*d(1,W7) + (496*lam/35)*no(W2,d(1,W5))"
                " - (248*lam/7)*no(d(1,W2),W5) + (192*lam/7)*no(W3,d(1,W4))"
                " - (256*lam/7)*no(d(1,W3),W4)"
                " + (1536*lam^2/35)*no(d(1,W2),no(W2,W3))"
                " - (1024*lam^2/35)*no(W2,no(W2,d(1,W3)))"
                " + (8/35)*lam*(-455+4*lam*(135+41*c))*no(d(3,W2),W3)"
                " - (192/35)*lam*(5+2*lam*(-3+c))*no(d(2,W2),d(1,W3))"
                " + (12/35)*lam*(95+8*lam*(-3+c))*no(d(1,W2),d(2,W3))"
                " + (8/105)*lam*(-455+8*lam*(-25+7*c))*no(W2,d(3,W3))"
                " + (-2+(2/35)*lam*(17+21*c))*d(3,W5)"
                " + (1/105)*(175-lam*(149+205*c)+24*lam^2*(11+c^2))*d(5,W3)"},
    (4, 5): {5: "(4950-4928*lam*(2+c)+256*lam^2*(26+23*c+5*c^2))*W3",
             4: "(2/3)*(3625-3600*lam*(2+c)"
                "+128*lam^2*(34+31*c+7*c^2))*d(1,W3)",
             3: "(140-8*lam*(49+13*c))*W5"
                " - 128*lam*(-23+8*lam*(2+c))*no(W2,W3)"
                " + (525/2-4*lam*(87+55*c)+64*lam^2*(6+5*c+c^2))*d(2,W3)",
             2: "(64-(16/5)*lam*(51+14*c))*d(1,W5)"
                " - (32/15)*lam*(-485+16*lam*(34+11*c))*no(W2,d(1,W3))"
                " - (48/5)*lam*(-145+16*lam*(2+3*c))*no(d(1,W2),W3)"
                " + (1/30)*(-1575+40*lam*(127+43*c)"
                "-256*lam^2*(-4+3*c+c^2))*d(3,W3)",
             1: "(2/3)*W7 + (64*lam/3)*no(W2,W5) - 128*lam*no(W3,W4)"
                " - (32/5)*lam*(-95+2*lam*(65+19*c))*no(d(2,W2),W3)"
                " - (32/15)*lam*(-125+2*lam*(65+19*c))*no(d(1,W2),d(1,W3))"
                " - (32/15)*lam*(35+4*lam*(-25+c))*no(W2,d(2,W3))"
                " + (5/2-(8/5)*lam*(5+2*c))*d(2,W5)"
                " + (1/180)*(-175+80*lam*(33+c)"
                "-64*lam^2*(65-6*c+c^2))*d(4,W3)",
             0: "(2/7)*d(1,W7) + (384*lam/35)*no(W2,d(1,W5))"
                " + (32*lam/7)*no(d(1,W2),W5) + (192*lam/7)*no(W3,d(1,W4))"
                " - (1152*lam/7)*no(d(1,W3),W4)"
                " - (9216*lam^2/35)*no(d(1,W2),no(W2,W3))"
                " + (6144*lam^2/35)*no(W2,no(W2,d(1,W3)))"
                " - (8/105)*lam*(-2345+8*lam*(389+145*c))*no(d(3,W2),W3)"
                " - (32/35)*lam*(-145+8*lam*(13+5*c))*no(d(2,W2),d(1,W3))"
                " + (8/35)*lam*(-295+8*lam*(13+5*c))*no(d(1,W2),d(2,W3))"
                " + (16/35)*lam*(-245+8*lam*(11+7*c))*no(W2,d(3,W3))"
                " + (-17/6+(4/105)*lam*(43+35*c))*d(3,W5)"
                " + (1/420)*(1925-16*lam*(-87+130*c)"
                "+64*lam^2*(-29+5*c^2))*d(5,W3)"},
}


def _ctx():
    return Context(("c", "lam"), set(GEN_NAMES), set())


def bracket_tree(n, m):
    """{lambda power: raw tree over params (c, lam)} for the pair (n, m)."""
    ctx = _ctx()
    out = {}
    for lp, text in P[(n, m)].items():
        out[lp] = ctx.to_state_tree(ExprParser(tokenize(text)).parse())
    return out


def build():
    """The builtin w_inf algebra: generators W2..W7 over (c, lam)."""
    from .registry import AlgebraDef
    gens = [ex.GeneratorDecl(n, w) for n, w in zip(GEN_NAMES, range(2, 8))]
    table = {}
    for (n, m) in P:
        table[("W%d" % n, "W%d" % m)] = bracket_tree(n, m)
    return AlgebraDef("w_inf", ("c", "lam"), gens, table)


class SectorSpec:
    """A specialized W(2,3,...) sector inside a bundled algebra.

    images[r] is a raw tree for n^(r/2-1) W_r in the target algebra; the
    table pair (p, q) then expands to s^(p+q-4) P_{p,q} with
    W_r -> s^(2-r) images[r] and s^2 = n.
    """

    def __init__(self, c_val, lam_val, n_val, images):
        self.c_val = c_val
        self.lam_val = lam_val
        self.n_val = n_val
        self.images = images

    def max_weight(self):
        return max(self.images)


def sector_entry_tree(spec, p, q, params):
    """Raw tree table {lam power: tree} in target params + ('s',)."""
    sp = tuple(dict.fromkeys(params + ("s",)))
    s = Scalar.param("s", sp)
    c_val = spec.c_val.to_params(sp)
    lam_val = spec.lam_val.to_params(sp)

    def fix_scalar(x):
        return x.to_params(("c", "lam") + sp) \
            .subst("c", c_val).subst("lam", lam_val).to_params(sp)

    mapping = {}
    for r, tree in spec.images.items():
        mapping["W%d" % r] = ex.smul(s ** (2 - r), tree)
    out = {}
    for lp, tree in bracket_tree(p, q).items():
        t = ex.tree_map_scalars(tree, fix_scalar)
        t = ex.tree_subst(t, mapping)
        out[lp] = ex.smul(s ** (p + q - 4), t)
    return out


def eliminate_sqrt(scalar, n_val, s_name="s"):
    """Substitute s^2 -> n_val; odd powers of s are a hard error."""
    params = scalar.params
    if s_name not in params:
        return scalar
    i = params.index(s_name)
    rest = tuple(p for p in params if p != s_name)
    target = tuple(dict.fromkeys(rest + n_val.params))

    def map_poly(terms):
        out = Scalar.zero(target)
        for mono, coeff in terms.items():
            e = mono[i]
            if e % 2:
                raise ValueError("odd power of %s survives: %r"
                                 % (s_name, scalar))
            term = Scalar.rational(coeff, target) * \
                n_val.to_params(target) ** (e // 2)
            for j, ee in enumerate(mono):
                if j != i and ee:
                    term = term * Scalar.param(params[j], target) ** ee
            out = out + term
        return out

    num = map_poly(scalar.numer_terms())
    den = map_poly(scalar.denom_terms())
    return num / den
