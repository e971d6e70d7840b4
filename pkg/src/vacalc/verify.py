"""Mathematical checks: Jacobi identities, conformal data, central charges,
commutants, homomorphisms, Shapovalov/Gram determinants, singular vectors."""

from fractions import Fraction
from math import comb, factorial

from . import bracket as br
from . import expr as ex
from .bracket import LambdaPoly, MissingBracket
from .expr import State
from .scalar import Scalar


class NonVacuumTop(Exception):
    pass


class CheckReport:
    """Outcome of one check: pass/fail/skipped plus witnesses and scalars."""

    def __init__(self, check_id, status, witnesses=None, scalars=None,
                 detail=None):
        self.check_id = check_id
        self.status = status
        self.witnesses = witnesses or []
        self.scalars = scalars or {}
        self.detail = detail

    @property
    def passed(self):
        return self.status == "pass"

    def to_json(self):
        out = {"check": self.check_id, "status": self.status}
        if self.witnesses:
            out["witness"] = [self._fmt(w) for w in self.witnesses[:8]]
        if self.scalars:
            out["scalars"] = {k: self._fmt(v) for k, v in self.scalars.items()}
        if self.detail:
            out["detail"] = self.detail
        return out

    @staticmethod
    def _fmt(v):
        if isinstance(v, Scalar):
            return v.text()
        if isinstance(v, (list, tuple)):
            return [CheckReport._fmt(x) for x in v]
        if isinstance(v, Fraction):
            return str(v)
        return str(v)

    def __repr__(self):
        return "CheckReport(%r, %r)" % (self.check_id, self.status)


def _combine(check_id, reports):
    bad = [r.check_id for r in reports if r.status == "fail"]
    skipped = [r.detail or r.check_id for r in reports
               if r.status == "skipped"]
    status = "fail" if bad else "pass"
    detail = None
    if bad:
        detail = "failed: %s" % ", ".join(map(str, bad[:10]))
    elif skipped:
        detail = "skipped: %s" % ", ".join(sorted(set(map(str, skipped)))[:10])
    return CheckReport(check_id, status, witnesses=[], detail=detail), skipped


# -- Jacobi ------------------------------------------------------------------


def jacobi_residual(alg, A, B, C):
    """[A_l [B_m C]] - (+-)[B_m [A_l C]] - [[A_l B]_{l+m} C].

    Returns {(i, j): state dict} for the l^(i) m^(j) coefficients of the
    residual, all in normal form; empty dict means the identity holds.
    """
    eng = br.engine_for(alg)
    pa = eng._terms_parity(A.terms)
    pb = eng._terms_parity(B.terms)
    sign = -1 if (pa and pb) else 1
    out = {}

    def put(i, j, terms, factor=1):
        if not terms:
            return
        cur = out.setdefault((i, j), {})
        br.sadd(cur, terms, factor)
        if not cur:
            del out[(i, j)]

    bc = eng.lb_states(B.terms, C.terms)
    for j, c in enumerate(bc):
        for i, d in enumerate(eng.lb_states(A.terms, c)):
            put(i, j, d)
    ac = eng.lb_states(A.terms, C.terms)
    for i, c in enumerate(ac):
        for j, d in enumerate(eng.lb_states(B.terms, c)):
            put(i, j, d, -sign)
    ab = eng.lb_states(A.terms, B.terms)
    for n, c in enumerate(ab):
        for p, d in enumerate(eng.lb_states(c, C.terms)):
            # (l+m)^(p) = sum_{i+j=p} l^(i) m^(j); l^(n) l^(i) = C(n+i,n) l^(n+i)
            for i in range(p + 1):
                j = p - i
                put(n + i, j, d, -comb(n + i, n))
    return out


def jacobi_check(alg, a, b, c):
    cid = "jacobi[%s;%s,%s,%s]" % (alg.name, a, b, c)
    try:
        res = jacobi_residual(alg, alg.gen_state(a), alg.gen_state(b),
                              alg.gen_state(c))
    except MissingBracket as e:
        return CheckReport(cid, "skipped", detail="missing %s" % (e.pair,))
    if not res:
        return CheckReport(cid, "pass")
    witnesses = [((a, b, c), (ij, ex.format_terms(alg, terms)))
                 for ij, terms in sorted(res.items())]
    return CheckReport(cid, "fail", witnesses=witnesses)


def jacobi_suite(alg, triples=None):
    names = alg.gen_names()
    if triples is None:
        triples = [(a, b, c) for a in names for b in names for c in names]
    reports = [jacobi_check(alg, a, b, c) for a, b, c in triples]
    top, _ = _combine("jacobi_suite[%s]" % alg.name, reports)
    top.witnesses = [w for r in reports for w in r.witnesses]
    top.scalars["triples"] = len(reports)
    top.scalars["skipped"] = sum(r.status == "skipped" for r in reports)
    return top


# -- conformal structure -------------------------------------------------------


def conformal_report(alg, fields=None):
    """Checks [L_l L] and the weight/primary data of each generator."""
    L = alg.conformal_state()
    eng = br.engine_for(alg)
    cid = "conformal[%s]" % alg.name
    witnesses = []
    scalars = {}
    LL = br.lambda_bracket(alg, L, L)
    ok = True
    expect0 = br.deriv(alg, L)
    if LL.coefficient(0) != expect0 or LL.coefficient(1) != 2 * L or \
            LL.coefficient(2) or len(LL.coeffs) > 4:
        ok = False
        witnesses.append(("L", "not a Virasoro vector"))
    cc = central_charge(alg)
    scalars["central_charge"] = cc
    names = fields if fields is not None else alg.gen_names()
    for name in names:
        g = alg.gen_state(name)
        w = g.weight()
        lb = br.lambda_bracket(alg, L, g)
        if lb.coefficient(0) != br.deriv(alg, g) or lb.coefficient(1) != w * g:
            ok = False
            witnesses.append((name, "not an eigenfield of weight %s" % w))
            continue
        if len(lb.coeffs) <= 2:
            kind = "primary"
        elif not lb.coefficient(2):
            kind = "quasi-primary"
        else:
            kind = "descendant-mixed"
        scalars[name] = "%s, weight %s" % (kind, w)
    return CheckReport(cid, "pass" if ok else "fail", witnesses=witnesses,
                       scalars=scalars)


def central_charge(alg, L=None):
    """2 x the vacuum coefficient at l^(3) of [L_l L]."""
    if L is None:
        L = alg.conformal_state()
    LL = br.lambda_bracket(alg, L, L)
    c3 = LL.coefficient(3)
    for w in c3.terms:
        if w != ex.VACUUM:
            raise NonVacuumTop("l^(3) coefficient is not scalar")
    return 2 * c3.terms.get(ex.VACUUM, Scalar.zero(alg.params))


def commutant_check(alg, A, B, ids=("A", "B")):
    """pass iff [a_l b] = 0 for all pairs from the two lists of states."""
    witnesses = []
    status = "pass"
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            try:
                lb = br.lambda_bracket(alg, a, b)
            except MissingBracket as e:
                return CheckReport("commutant[%s]" % alg.name, "skipped",
                                   detail="missing %s" % (e.pair,))
            if not lb.is_zero:
                status = "fail"
                witnesses.append(((ids[0], i, ids[1], j), repr(lb)))
    return CheckReport("commutant[%s]" % alg.name, status,
                       witnesses=witnesses)


# -- homomorphisms ------------------------------------------------------------


def hom_check(hom, pairs=None, rewrite=None):
    """pass iff [phi(a)_l phi(b)] = phi([a_l b]) for source generator pairs.

    ``rewrite`` (optional) reduces target residuals by a saturated rewrite
    system before the zero test (relations mode).
    """
    src, tgt = hom.source, hom.target
    names = [g.name for g in src.generators]
    if pairs is None:
        pairs = [(a, b) for a in names for b in names]
    witnesses = []
    skipped = []
    images = {n: hom.image_state(n) for n in names}
    for a, b in pairs:
        try:
            lhs = br.lambda_bracket(tgt, images[a], images[b])
            srcbr = br.lambda_bracket(src, src.gen_state(a), src.gen_state(b))
        except MissingBracket as e:
            skipped.append((a, b, e.pair))
            continue
        rhs = LambdaPoly(tgt, [dict(hom.push(s).terms) for s in srcbr.states()])
        diff = lhs - rhs
        if rewrite is not None:
            diff = LambdaPoly(tgt, [dict(rewrite(State(tgt, c)).terms)
                                    for c in diff.coeffs])
        if not diff.is_zero:
            witnesses.append(((a, b), repr(diff)))
    status = "fail" if witnesses else "pass"
    cid = "hom[%s]" % hom.name
    detail = None
    if skipped:
        detail = "skipped pairs: %s" % (sorted(set(s[:2] for s in skipped)),)
    return CheckReport(cid, status, witnesses=witnesses, detail=detail,
                       scalars={"pairs": len(pairs),
                                "skipped": len(skipped)})


# -- Gram / Shapovalov ---------------------------------------------------------


def gram_pairing(alg, u, v):
    """Plain-power coefficient of l^(2D-1) in [u_l v], vacuum part."""
    wu, wv = u.weight(), v.weight()
    if wu is None or wv is None:
        return Scalar.zero(alg.params)
    if wu != wv:
        return Scalar.zero(alg.params)
    n = int(2 * wu) - 1
    if n < 0:
        raise NonVacuumTop("weight too small for the pairing")
    lb = br.lambda_bracket(alg, u, v)
    top = lb.coefficient(n)
    for w in top.terms:
        if w != ex.VACUUM:
            raise NonVacuumTop("top coefficient is not scalar: %r" % (top,))
    c = top.terms.get(ex.VACUUM, Scalar.zero(alg.params))
    return c * Fraction(1, factorial(n))


def gram_det(alg, weight, basis):
    """Gram matrix and determinant of the Shapovalov pairing at one weight."""
    states = []
    for b in basis:
        s = alg.gen_state(b) if isinstance(b, str) else b
        if s.weight() != Fraction(weight):
            raise ValueError("basis element of weight %s, expected %s"
                             % (s.weight(), weight))
        states.append(s)
    n = len(states)
    mat = [[gram_pairing(alg, states[i], states[j]) for j in range(n)]
           for i in range(n)]
    return mat, _det(mat, alg.params)


def _det(mat, params):
    n = len(mat)
    a = [row[:] for row in mat]
    det = Scalar.one(params)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not a[r][col].is_zero:
                piv = r
                break
        if piv is None:
            return Scalar.zero(params)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col]
        inv = Scalar.one(params) / a[col][col]
        for r in range(col + 1, n):
            if a[r][col].is_zero:
                continue
            f = a[r][col] * inv
            for c in range(col, n):
                a[r][c] = a[r][c] - f * a[col][c]
    return det


def pbw_weight_basis(alg, weight, field_names):
    """All normally ordered monomials of the given weight in derivatives of
    the named fields, in the canonical order.  Returns (labels, states)."""
    weight = Fraction(weight)
    fields = [(n, alg.weight_of(n)) for n in field_names]
    out = []

    def rec(i, min_d, remaining, acc):
        if remaining == 0:
            out.append(list(acc))
            return
        for j in range(i, len(fields)):
            name, w0 = fields[j]
            d = min_d if j == i else 0
            while w0 + d <= remaining:
                acc.append((j, d))
                rec(j, d, remaining - w0 - d, acc)
                acc.pop()
                d += 1

    rec(0, 0, weight, [])
    labels = []
    states = []
    for combo in out:
        label = "*".join(
            ("d(%d,%s)" % (d, fields[j][0])) if d else fields[j][0]
            for j, d in combo)
        tree = ex.nos(*[ex.dn(d, ex.gen(fields[j][0])) for j, d in combo])
        labels.append(label)
        states.append(br.normal_form(alg, tree))
    return labels, states


# -- singular vectors ----------------------------------------------------------


def apply_modes(alg, modes, base):
    """Apply [(name, n), ...] right to left: the n-th products A_(n)(...)."""
    s = base if isinstance(base, State) else alg.gen_state(base)
    for name, n in reversed(modes):
        s = br.nth_product(alg, alg.gen_state(name), n, s)
    return s


def singular_vector_check(alg, terms, base, check_id=None):
    """Evaluate sum_i c_i * modes_i(base); pass iff the state vanishes.

    ``terms`` is a list of (coefficient, [(field, n), ...]).
    """
    total = State(alg, {})
    for coeff, modes in terms:
        total = total + apply_modes(alg, modes, base) * coeff
    cid = check_id or "singular[%s;%s]" % (alg.name, base)
    if total.is_zero:
        return CheckReport(cid, "pass")
    return CheckReport(cid, "fail", witnesses=[(base, repr(total))])
