"""Canonical .vadef serialization (inverse of dsl.parse_vadef)."""

from fractions import Fraction

from . import bracket as br
from . import expr as ex


def frac_text(f):
    f = Fraction(f)
    return str(f.numerator) if f.denominator == 1 else \
        "%d/%d" % (f.numerator, f.denominator)


def letter_text(alg, l):
    if l[0] == 1:
        return "exp(%s)" % frac_text(l[2])
    name = alg.generators[l[1]].name
    return name if l[2] == 0 else "d(%d,%s)" % (l[2], name)


def word_text(alg, w):
    if not w:
        return "1"
    return "*".join(letter_text(alg, l) for l in w)


def terms_text(alg, terms, lam=None):
    if not terms:
        return None
    parts = []
    for w in sorted(terms):
        c = terms[w]
        bit = "(%s)*%s" % (c.text(), word_text(alg, w))
        if lam:
            bit += "*l(%d)" % lam
        parts.append(bit)
    return " + ".join(parts)


def state_text(alg, terms):
    return terms_text(alg, terms) or "0"


def entry_text(alg, coeffs):
    parts = []
    for n, c in enumerate(coeffs):
        t = terms_text(alg, c, lam=n if n else None)
        if t:
            parts.append(t)
    return " + ".join(parts) if parts else "0"


def serialize_algebra(alg):
    eng = br.engine_for(alg)
    lines = ["algebra %s" % alg.name]
    if alg.params:
        lines.append("params %s" % " ".join(alg.params))
    for g in alg.generators:
        bits = ["gen %s weight %s" % (g.name, frac_text(g.weight))]
        if g.parity:
            bits.append("parity odd")
        for cname in sorted(g.charges):
            bits.append("charge %s = %s" % (cname, frac_text(g.charges[cname])))
        lines.append(" ".join(bits))
    for l in alg.lattices:
        bits = ["lattice %s step %s" % (l.base, frac_text(l.step))]
        for g in sorted(l.pairings):
            bits.append("pair %s %s" % (g, frac_text(l.pairings[g])))
        lines.append(" ".join(bits))
    for dname, tree in alg.derived.items():
        if dname == "L_tensor":
            pass
        lines.append("derived %s = %s"
                     % (dname, state_text(alg, eng.eval_tree(tree))))
    for (ia, ib) in sorted(alg.table):
        coeffs = alg.normalized_entry((ia, ib))
        lines.append("bracket %s %s = %s"
                     % (alg.generators[ia].name, alg.generators[ib].name,
                        entry_text(alg, coeffs)))
    for gi in sorted(alg.raw_resolutions):
        n, at, bt, ct = alg.resolutions[gi]
        txt = "resolve %s = mode(%d, %s, %s)" % (
            alg.generators[gi].name, n, state_text(alg, at),
            state_text(alg, bt))
        if ct:
            txt += " - (%s)" % state_text(alg, ct)
        lines.append(txt)
    if alg.conformal is not None:
        lines.append("conformal %s" % alg.conformal)
    for tree in alg.relations:
        lines.append("relation %s" % state_text(alg, eng.eval_tree(tree)))
    return "\n".join(lines) + "\n"
