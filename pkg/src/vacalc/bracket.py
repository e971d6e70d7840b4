"""The lambda-bracket calculus engine.

Brackets of composite states are expanded from the generator table with
sesquilinearity, skew-symmetry and the two non-commutative Wick formulas;
normally ordered words are rewritten to the sorted PBW form with
quasi-commutativity and quasi-associativity corrections.  Lambda
polynomials are kept in divided powers: [A_L B] = sum_n A_(n)B L^(n)
with L^(n) = L^n/n!.

All operations are pure given an immutable algebra; results are memoized
per algebra (and optionally on disk, see cache_dir).
"""

import hashlib
import os
import pickle
from fractions import Fraction
from math import comb, factorial

from .expr import (EVEN, InhomogeneousState, State, UnknownGenerator,
                   VACUUM, is_exp, letter, word_weight)
from .scalar import Scalar


class BracketError(Exception):
    pass


class MissingBracket(BracketError):
    def __init__(self, a, b):
        super().__init__("no bracket for generator pair (%s, %s)" % (a, b))
        self.pair = (a, b)


# -- state dict helpers ---------------------------------------------------

def sadd(dst, src, factor=1):
    """dst += factor * src, dropping cancelled words (in place)."""
    if factor == 0:
        return dst
    for w, c in src.items():
        cur = dst.get(w)
        if cur is None:
            v = c * factor if factor != 1 else c
            if v:
                dst[w] = v
        else:
            v = cur + c * factor
            if v:
                dst[w] = v
            else:
                del dst[w]
    return dst


def sscale(src, factor):
    if factor == 0 or not src:
        return {}
    if factor == 1:
        return dict(src)
    out = {}
    for w, c in src.items():
        v = c * factor
        if v:
            out[w] = v
    return out


class LambdaPoly:
    """sum_n coeffs[n] * L^(n), coefficients are state dicts."""

    __slots__ = ("alg", "coeffs")

    def __init__(self, alg, coeffs):
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.alg = alg
        self.coeffs = coeffs

    @property
    def is_zero(self):
        return not self.coeffs

    def states(self):
        return [State(self.alg, c) for c in self.coeffs]

    def coefficient(self, n):
        if 0 <= n < len(self.coeffs):
            return State(self.alg, dict(self.coeffs[n]))
        return State(self.alg, {})

    def plain_coefficient(self, n):
        """Coefficient of the plain power L^n (divided by n!)."""
        c = self.coefficient(n)
        return c * Fraction(1, factorial(n))

    def __eq__(self, other):
        return (isinstance(other, LambdaPoly) and self.alg is other.alg
                and self.coeffs == other.coeffs)

    def __sub__(self, other):
        out = [dict(c) for c in self.coeffs]
        while len(out) < len(other.coeffs):
            out.append({})
        for n, c in enumerate(other.coeffs):
            sadd(out[n], c, -1)
        return LambdaPoly(self.alg, out)

    def __repr__(self):
        from .expr import format_terms
        if not self.coeffs:
            return "LambdaPoly(0)"
        bits = ["l(%d)*[%s]" % (n, format_terms(self.alg, c))
                for n, c in enumerate(self.coeffs) if c]
        return "LambdaPoly(%s)" % " + ".join(bits)


def _zero(n=0):
    return [{} for _ in range(n)]


class Engine:
    """Bracket and normal-form computations over one algebra."""

    def __init__(self, alg):
        self.alg = alg
        self._lb = {}
        self._np = {}
        self._entry = {}
        self._resolving = set()
        self._disk = None

    # -- cache plumbing --------------------------------------------------

    def attach_disk_cache(self, path):
        self._disk = DiskCache(path, self.alg)

    def _disk_get(self, kind, key):
        if self._disk is None:
            return None
        return self._disk.get(kind, key)

    def _disk_put(self, kind, key, value):
        if self._disk is not None:
            self._disk.put(kind, key, value)

    # -- generator-level brackets -----------------------------------------

    def table_entry(self, i, j):
        """[g_i L g_j] as a list of state dicts, from the table or by skew."""
        key = (i, j)
        got = self._entry.get(key)
        if got is not None:
            return got
        alg = self.alg
        raw = alg.table.get(key)
        if raw is not None:
            val = [dict(c) for c in alg.normalized_entry(key)]
        elif (j, i) in alg.table:
            rev = self.table_entry(j, i)
            sign = -1 if alg.generators[i].parity and alg.generators[j].parity \
                else 1
            val = self._skew(rev, -sign)
        elif key in self._resolving:
            raise MissingBracket(alg.generators[i].name, alg.generators[j].name)
        elif j in alg.resolutions or i in alg.resolutions:
            self._resolving.add(key)
            try:
                val = self._resolve_entry(i, j)
            finally:
                self._resolving.discard(key)
        else:
            raise MissingBracket(alg.generators[i].name, alg.generators[j].name)
        self._entry[key] = val
        return val

    def _skew(self, coeffs, outer_sign):
        """outer_sign * [direct image of L -> -L-d], d on coefficients."""
        out = _zero(len(coeffs))
        for n, c in enumerate(coeffs):
            cur = dict(c)
            for jj in range(0, n + 1):
                term = sscale(cur, outer_sign * (-1) ** n)
                sadd(out[n - jj], term)
                if jj < n:
                    cur = self._deriv_terms(cur, Fraction(1, jj + 1))
        return out

    def _resolve_entry(self, i, j):
        """Derive a missing entry from a declared mode-product resolution."""
        alg = self.alg
        if j in alg.resolutions:
            n, a_terms, b_terms, corr = alg.resolutions[j]
            left = {(letter(i),): Scalar.one(alg.params)}
            res = self.lb_mode_product(left, n, a_terms, b_terms)
            corr_b = self.lb_states(left, corr)
            for m, c in enumerate(corr_b):
                if m < len(res):
                    sadd(res[m], c, -1)
                else:
                    res.append(sscale(c, -1))
            return LambdaPoly(alg, res).coeffs
        # resolve on the left through skew-symmetry
        rev = self.table_entry(j, i)
        sign = -1 if alg.generators[i].parity and alg.generators[j].parity else 1
        return self._skew(rev, -sign)

    def lb_mode_product(self, left, n, a_terms, b_terms):
        """[left_L (A_(n)B)] via the non-commutative Jacobi identity.

        Extracts the mu^(n) coefficient of
        [[left_L A]_{L+mu} B] + (-1)^{p(left)p(A)} [A_mu [left_L B]].
        """
        alg = self.alg
        pl = self._terms_parity(left)
        pa = self._terms_parity(a_terms)
        out = []
        la = self.lb_states(left, a_terms)
        for m, c in enumerate(la):
            inner = self.lb_states(c, b_terms)  # [C_m nu B], nu = L + mu
            for p, d in enumerate(inner):
                # nu^(p) -> sum_{i+j=p} L^(i) mu^(j); keep j = n
                if p < n:
                    continue
                i = p - n
                tot = m + i
                while len(out) <= tot:
                    out.append({})
                sadd(out[tot], d, comb(tot, m))
        lb_b = self.lb_states(left, b_terms)
        sign = -1 if (pl and pa) else 1
        for m, c in enumerate(lb_b):
            amc = self.lb_states(a_terms, c)
            if n < len(amc):
                while len(out) <= m:
                    out.append({})
                sadd(out[m], amc[n], sign)
        return out

    def _terms_parity(self, terms):
        ps = {sum(self.alg.letter_parity(l) for l in w) % 2 for w in terms}
        if len(ps) > 1:
            raise BracketError("mixed parity state")
        return ps.pop() if ps else EVEN

    # -- derivatives -------------------------------------------------------

    def _deriv_word(self, w):
        out = {}
        one_ = Scalar.one(self.alg.params)
        for idx, l in enumerate(w):
            if is_exp(l):
                _, li, n = l
                if n == 0:
                    continue
                base = self.alg.lattice_base_letter(li)
                raw = w[:idx] + (base, l) + w[idx + 1:]
                sadd(out, self.normalize_word(raw), n)
            else:
                raw = w[:idx] + ((0, l[1], l[2] + 1),) + w[idx + 1:]
                sadd(out, self.normalize_word(raw), one_)
        return out

    def _deriv_terms(self, terms, factor=1):
        out = {}
        for w, c in terms.items():
            f = c * factor if factor != 1 else c
            sadd(out, self._deriv_word(w), f)
        return out

    def divided_deriv(self, terms, m):
        """d^(m)/m! applied to a state dict."""
        out = terms
        for j in range(m):
            out = self._deriv_terms(out, Fraction(1, j + 1))
        return out

    # -- normal ordering ----------------------------------------------------

    def normalize_word(self, w):
        """Canonical state of the right-nested raw word w."""
        if not w:
            return {VACUUM: Scalar.one(self.alg.params)}
        state = self._letter_state(w[-1])
        for l in reversed(w[:-1]):
            state = self.insert_letter(l, state)
        return state

    def _letter_state(self, l):
        if is_exp(l) and l[2] == 0:
            return {VACUUM: Scalar.one(self.alg.params)}
        return {(l,): Scalar.one(self.alg.params)}

    def insert_letter(self, a, state):
        out = {}
        for w, c in state.items():
            sadd(out, self._insert_letter_word(a, w), c)
        return out

    def _insert_letter_word(self, a, v):
        if is_exp(a) and a[2] == 0:
            return {v: Scalar.one(self.alg.params)}
        if not v:
            return {(a,): Scalar.one(self.alg.params)}
        b = v[0]
        rest = v[1:]
        pa, pb = self.alg.letter_parity(a), self.alg.letter_parity(b)
        if is_exp(a) and is_exp(b) and a[1] == b[1]:
            merged = (1, a[1], a[2] + b[2])
            if merged[2] == 0:
                return {rest: Scalar.one(self.alg.params)}
            return {(merged,) + rest: Scalar.one(self.alg.params)}
        if a < b or (a == b and not pa):
            return {(a,) + v: Scalar.one(self.alg.params)}
        # swap a past b:  :a(:bw:): = +- :b(:aw:): + corrections
        corr = {}
        ab = self.lb_letters(a, b)
        rest_state = {rest: Scalar.one(self.alg.params)}
        for j, cj in enumerate(ab):
            if not cj:
                continue
            dj = self.divided_deriv(cj, j + 1)
            sadd(corr, self.nprod_states(dj, rest_state), (-1) ** j)
        if a == b and pa:
            return sscale(corr, Fraction(1, 2))
        sign = -1 if (pa and pb) else 1
        out = sscale(self.insert_letter(b, self._insert_letter_word(a, rest)),
                     sign)
        sadd(out, corr)
        return out

    def nprod_states(self, A, B):
        out = {}
        for u, cu in A.items():
            for v, cv in B.items():
                sadd(out, self.nprod_words(u, v), cu * cv)
        return out

    def nprod_words(self, u, v):
        if not u:
            return {v: Scalar.one(self.alg.params)}
        if not v:
            return {u: Scalar.one(self.alg.params)}
        key = (u, v)
        got = self._np.get(key)
        if got is not None:
            return got
        got = self._disk_get(b"np", key)
        if got is None:
            got = self._nprod_words(u, v)
            self._disk_put(b"np", key, got)
        self._np[key] = got
        return got

    def _nprod_words(self, u, v):
        if len(u) == 1:
            return self._insert_letter_word(u[0], v)
        a, u1 = u[0], u[1:]
        #  :(a u1) v: = :a(:u1 v:): + sum_j :(d^(j+1)a)(u1_(j)v):
        #              + (+-) sum_j :(d^(j+1)u1)(a_(j)v):
        out = self.insert_letter(a, self.nprod_words(u1, v))
        a_state = self._letter_state(a)
        u1_state = {u1: Scalar.one(self.alg.params)}
        u1v = self.lb_words(u1, v)
        for j, cj in enumerate(u1v):
            if not cj:
                continue
            da = self.divided_deriv(a_state, j + 1)
            sadd(out, self.nprod_states(da, cj))
        pa = self.alg.letter_parity(a)
        pu1 = sum(self.alg.letter_parity(l) for l in u1) % 2
        sign = -1 if (pa and pu1) else 1
        av = self.lb_words((a,), v)
        for j, cj in enumerate(av):
            if not cj:
                continue
            du = self.divided_deriv(u1_state, j + 1)
            sadd(out, self.nprod_states(du, cj), sign)
        return out

    # -- lambda brackets ----------------------------------------------------

    def lb_letters(self, a, b):
        """[a_L b] for two letters, from the table with sesquilinearity."""
        if is_exp(a) and is_exp(b):
            return []
        if is_exp(b):
            if is_exp(a):
                return []
            _, li, n = b
            if b[2] == 0:
                return []
            pairing = self.alg.lattice_pairing(li, a[1])
            if a[2] > 0:
                base = self.lb_letters((0, a[1], 0), b)
                return self._mul_minus_lambda(base, a[2])
            if not pairing:
                return []
            return [{(b,): Scalar.rational(n * pairing, self.alg.params)}]
        if is_exp(a):
            rev = self.lb_letters(b, a)
            return self._skew(rev, -1)
        if a[2] > 0:
            base = self.lb_letters((0, a[1], 0), b)
            return self._mul_minus_lambda(base, a[2])
        if b[2] > 0:
            base = self.lb_letters(a, (0, b[1], 0))
            for _ in range(b[2]):
                base = self._apply_lambda_plus_d(base)
            return base
        return self.table_entry(a[1], b[1])

    def _mul_minus_lambda(self, coeffs, d):
        """(-L)^d * coeffs in divided powers."""
        out = coeffs
        for _ in range(d):
            new = _zero(len(out) + 1)
            for n, c in enumerate(out):
                sadd(new[n + 1], c, -(n + 1))
            out = new
        return out

    def _apply_lambda_plus_d(self, coeffs):
        out = _zero(len(coeffs) + 1)
        for n, c in enumerate(coeffs):
            sadd(out[n], self._deriv_terms(c))
            sadd(out[n + 1], c, n + 1)
        return out

    def lb_states(self, A, B):
        out = []
        for u, cu in A.items():
            for v, cv in B.items():
                f = cu * cv
                for n, c in enumerate(self.lb_words(u, v)):
                    if not c:
                        continue
                    while len(out) <= n:
                        out.append({})
                    sadd(out[n], c, f)
        return out

    def lb_words(self, u, v):
        if not u or not v:
            return []
        key = (u, v)
        got = self._lb.get(key)
        if got is not None:
            return got
        got = self._disk_get(b"lb", key)
        if got is None:
            got = self._lb_words(u, v)
            self._disk_put(b"lb", key, got)
        self._lb[key] = got
        return got

    def _lb_words(self, u, v):
        if len(u) == 1 and len(v) == 1:
            return self.lb_letters(u[0], v[0])
        if len(u) == 1:
            return self._right_wick(u[0], v)
        return self._left_wick(u, v)

    def _right_wick(self, a, v):
        #  [a_L :b w:] = :[a_L b] w: + (+-) :b [a_L w]: + int_0^L [[a_L b]_m w]
        b, w = v[0], v[1:]
        w_state = {w: Scalar.one(self.alg.params)}
        ab = self.lb_letters(a, b)
        out = []
        for n, c in enumerate(ab):
            if not c:
                continue
            while len(out) <= n:
                out.append({})
            sadd(out[n], self.nprod_states(c, w_state))
        aw = self.lb_words((a,), w)
        pa, pb = self.alg.letter_parity(a), self.alg.letter_parity(b)
        sign = -1 if (pa and pb) else 1
        for n, c in enumerate(aw):
            if not c:
                continue
            while len(out) <= n:
                out.append({})
            sadd(out[n], self.insert_letter(b, c), sign)
        for n, c in enumerate(ab):
            if not c:
                continue
            inner = self.lb_states(c, w_state)
            for m, d in enumerate(inner):
                if not d:
                    continue
                tot = n + m + 1
                while len(out) <= tot:
                    out.append({})
                sadd(out[tot], d, comb(tot, n))
        return out

    def _left_wick(self, u, v):
        #  [:a u1:_L v] = :(e^{dL'}a)[u1_L v]: + (+-):(e^{dL'}u1)[a_L v]:
        #               + (+-) int_0^L [u1_m [a_{L-m} v]] dm
        a, u1 = u[0], u[1:]
        a_state = self._letter_state(a)
        u1_state = {u1: Scalar.one(self.alg.params)}
        pa = self.alg.letter_parity(a)
        pu1 = sum(self.alg.letter_parity(l) for l in u1) % 2
        sign = -1 if (pa and pu1) else 1
        out = []
        u1v = self.lb_words(u1, v)
        for n, c in enumerate(u1v):
            if not c:
                continue
            for j in range(n + 1):
                da = self.divided_deriv(a_state, j)
                term = self.nprod_states(da, c)
                while len(out) <= n - j:
                    out.append({})
                sadd(out[n - j], term)
        av = self.lb_words((a,), v)
        for m, c in enumerate(av):
            if not c:
                continue
            for j in range(m + 1):
                du = self.divided_deriv(u1_state, j)
                term = self.nprod_states(du, c)
                while len(out) <= m - j:
                    out.append({})
                sadd(out[m - j], term, sign)
            inner = self.lb_states(u1_state, c)
            for n, d in enumerate(inner):
                if not d:
                    continue
                tot = n + m + 1
                while len(out) <= tot:
                    out.append({})
                sadd(out[tot], d, sign)
        return out

    # -- raw trees ------------------------------------------------------------

    def eval_tree(self, node):
        """Raw expression tree -> canonical state dict."""
        alg = self.alg
        tag = node[0]
        if tag == "gen":
            idx = alg.index.get(node[1])
            if idx is None:
                if node[1] in alg.derived:
                    return self.eval_tree(alg.derived[node[1]])
                raise UnknownGenerator(node[1])
            return {(letter(idx),): Scalar.one(alg.params)}
        if tag == "one":
            return {VACUUM: Scalar.one(alg.params)}
        if tag == "exp":
            _, n, li = node
            if not alg.lattices:
                raise UnknownGenerator("exp: no lattice declared")
            step = alg.lattices[li].step
            if n % step != 0:
                raise UnknownGenerator("exp(%s) not on step %s lattice" % (n, step))
            if n == 0:
                return {VACUUM: Scalar.one(alg.params)}
            return {((1, li, Fraction(n)),): Scalar.one(alg.params)}
        if tag == "d":
            return self._plain_deriv(self.eval_tree(node[2]), node[1])
        if tag == "no":
            return self.nprod_states(self.eval_tree(node[1]),
                                     self.eval_tree(node[2]))
        if tag == "add":
            out = {}
            for x in node[1]:
                sadd(out, self.eval_tree(x))
            return out
        if tag == "smul":
            c = node[1]
            if not isinstance(c, Scalar):
                c = Scalar.rational(c, alg.params)
            return sscale(self.eval_tree(node[2]), c)
        if tag == "mode":
            _, n, a, b = node
            A, B = self.eval_tree(a), self.eval_tree(b)
            if n == -1:
                return self.nprod_states(A, B)
            if n < -1:
                return self.nprod_states(self.divided_deriv(A, -n - 1), B)
            lb = self.lb_states(A, B)
            return dict(lb[n]) if n < len(lb) else {}
        raise BracketError("bad tree node %r" % (node,))

    def _plain_deriv(self, terms, m):
        out = terms
        for _ in range(m):
            out = self._deriv_terms(out)
        return out


class DiskCache:
    """Content-addressed pickle records keyed by (algebra hash, kind, words)."""

    def __init__(self, path, alg):
        self.path = path
        os.makedirs(path, exist_ok=True)
        self.alg_hash = alg.content_hash()

    def _name(self, kind, key):
        h = hashlib.sha256()
        h.update(self.alg_hash)
        h.update(kind)
        h.update(repr(key).encode())
        return os.path.join(self.path, h.hexdigest()[:32] + ".rec")

    def get(self, kind, key):
        fn = self._name(kind, key)
        if not os.path.exists(fn):
            return None
        with open(fn, "rb") as fh:
            return pickle.load(fh)

    def put(self, kind, key, value):
        fn = self._name(kind, key)
        tmp = fn + ".tmp.%d" % os.getpid()
        with open(tmp, "wb") as fh:
            pickle.dump(value, fh, protocol=pickle.HIGHEST_PROTOCOL)
        os.replace(tmp, fn)


# -- public API -------------------------------------------------------------

def engine_for(alg):
    eng = getattr(alg, "_engine", None)
    if eng is None:
        eng = Engine(alg)
        alg._engine = eng
        cache_dir = os.environ.get("VAC_CACHE_DIR")
        if cache_dir:
            eng.attach_disk_cache(cache_dir)
    return eng


def normal_form(alg, tree):
    """Canonical State of a raw expression tree."""
    return State(alg, engine_for(alg).eval_tree(tree))


def lambda_bracket(alg, A, B):
    eng = engine_for(alg)
    return LambdaPoly(alg, eng.lb_states(A.terms, B.terms))


def nth_product(alg, A, n, B):
    eng = engine_for(alg)
    if n == -1:
        return State(alg, eng.nprod_states(A.terms, B.terms))
    if n < -1:
        return State(alg, eng.nprod_states(eng.divided_deriv(A.terms, -n - 1),
                                           B.terms))
    lb = eng.lb_states(A.terms, B.terms)
    return State(alg, dict(lb[n]) if n < len(lb) else {})


def nprod(alg, A, B):
    return nth_product(alg, A, -1, B)


def deriv(alg, A, m=1):
    return State(alg, engine_for(alg)._plain_deriv(A.terms, m))


def weight_of(A):
    w = A.weight()
    if w is None:
        raise InhomogeneousState("weight of zero state is undefined")
    return w
