"""Algebra and homomorphism definitions: validation, serialization, builtins."""

import hashlib
from fractions import Fraction

from . import bracket as br
from . import expr as ex
from .expr import GeneratorDecl, LatticeDecl, State
from .scalar import Scalar


class ValidationError(Exception):
    pass


class UnknownBuiltin(Exception):
    pass


class AlgebraDef:
    """Generators, bracket table and derived fields of one vertex algebra.

    The table is stored one-directionally as raw expression trees keyed by
    generator-name pairs; entries are normalized lazily and reverse brackets
    are produced by skew-symmetry.  ``components`` marks tensor factors:
    brackets across factors vanish without explicit entries.
    """

    def __init__(self, name, params, generators, table, lattices=(),
                 derived=None, conformal=None, relations=(), resolutions=None,
                 components=None):
        self.name = name
        self.params = tuple(params)
        self.generators = list(generators)
        self.lattices = list(lattices)
        self.index = {g.name: i for i, g in enumerate(self.generators)}
        if len(self.index) != len(self.generators):
            raise ValidationError("duplicate generator names")
        self.derived = dict(derived or {})
        self.conformal = conformal
        self.relations = list(relations)
        self.components = list(components) if components is not None \
            else [0] * len(self.generators)
        self.table = {}
        for (a, b), entry in table.items():
            self.table[(self._gidx(a), self._gidx(b))] = entry
        self.raw_resolutions = {}
        for gname, tup in (resolutions or {}).items():
            self.raw_resolutions[self._gidx(gname)] = tup
        self._norm_cache = {}
        self._res_cache = {}
        self._derived_cache = {}
        self._hash = None

    def _gidx(self, name):
        if name not in self.index:
            raise ValidationError("unknown generator %r" % (name,))
        return self.index[name]

    # -- engine support ----------------------------------------------------

    def letter_parity(self, l):
        if l[0] == 1:
            return ex.EVEN
        return self.generators[l[1]].parity

    def lattice_base_letter(self, li):
        return ex.letter(self.index[self.lattices[li].base])

    def lattice_pairing(self, li, gen_idx):
        return self.lattices[li].pairings.get(self.generators[gen_idx].name,
                                              Fraction(0))

    def normalized_entry(self, key):
        got = self._norm_cache.get(key)
        if got is None:
            eng = br.engine_for(self)
            raw = self.table[key]
            n_max = max(raw) if raw else -1
            got = [eng.eval_tree(raw[n]) if n in raw else {}
                   for n in range(n_max + 1)]
            got = br.LambdaPoly(self, got).coeffs
            self._norm_cache[key] = got
        return got

    @property
    def resolutions(self):
        if self._res_cache.keys() != self.raw_resolutions.keys():
            eng = br.engine_for(self)
            for idx, (n, at, bt, ct) in self.raw_resolutions.items():
                if idx not in self._res_cache:
                    self._res_cache[idx] = (n, eng.eval_tree(at),
                                            eng.eval_tree(bt),
                                            eng.eval_tree(ct))
        return self._res_cache

    # -- convenience -------------------------------------------------------

    def state(self, tree_or_text):
        if isinstance(tree_or_text, str):
            from .dsl import Context, ExprParser, tokenize
            ctx = Context(self.params, set(self.index), set(self.derived),
                          has_lattice=bool(self.lattices))
            tree_or_text = ctx.to_state_tree(
                ExprParser(tokenize(tree_or_text)).parse())
        return br.normal_form(self, tree_or_text)

    def gen_state(self, name):
        if name in self.index:
            return State(self, {(ex.letter(self.index[name]),):
                                Scalar.one(self.params)})
        if name in self.derived:
            got = self._derived_cache.get(name)
            if got is None:
                got = br.normal_form(self, self.derived[name])
                self._derived_cache[name] = got
            return got
        raise ValidationError("no generator or derived field %r" % (name,))

    def gen_names(self):
        return [g.name for g in self.generators]

    def conformal_state(self):
        if self.conformal is None:
            raise ValidationError("algebra %s declares no conformal vector"
                                  % self.name)
        return self.gen_state(self.conformal)

    def scalar(self, text):
        from .scalar import parse_scalar
        return parse_scalar(text, self.params)

    def weight_of(self, name):
        if name in self.index:
            return self.generators[self.index[name]].weight
        return self.gen_state(name).weight()

    # -- validation ----------------------------------------------------------

    def validate(self, full=True):
        for gname in (self.conformal,):
            if gname is not None and gname not in self.index and \
                    gname not in self.derived:
                raise ValidationError("conformal field %r undeclared" % gname)
        for l in self.lattices:
            if l.base not in self.index:
                raise ValidationError("lattice base %r undeclared" % l.base)
            for g in l.pairings:
                if g not in self.index:
                    raise ValidationError("lattice pairing with unknown %r" % g)
        if not full:
            return
        eng = br.engine_for(self)
        for (ia, ib) in sorted(self.table):
            coeffs = self.normalized_entry((ia, ib))
            wa = self.generators[ia].weight
            wb = self.generators[ib].weight
            for n, c in enumerate(coeffs):
                if not c:
                    continue
                w = ex.weight_of_terms(self, c)
                if w != wa + wb - n - 1:
                    raise ValidationError(
                        "entry [%s,%s]: weight %s at l(%d), expected %s" %
                        (self.generators[ia].name, self.generators[ib].name,
                         w, n, wa + wb - n - 1))
            if ia == ib or (ib, ia) in self.table:
                sign = -1 if (self.generators[ia].parity
                              and self.generators[ib].parity) else 1
                skew = eng._skew(coeffs, -sign)
                other = eng.table_entry(ib, ia)
                if br.LambdaPoly(self, [dict(x) for x in skew]) != \
                        br.LambdaPoly(self, [dict(x) for x in other]):
                    raise ValidationError(
                        "skew-symmetry fails for (%s, %s)" %
                        (self.generators[ia].name, self.generators[ib].name))

    # -- identity ------------------------------------------------------------

    def content_hash(self):
        if self._hash is None:
            from .dsl_out import serialize_algebra
            self._hash = hashlib.sha256(
                serialize_algebra(self).encode()).digest()
        return self._hash

    def same_content(self, other):
        from .dsl_out import serialize_algebra
        return serialize_algebra(self) == serialize_algebra(other)

    def __repr__(self):
        return "AlgebraDef(%r, %d generators)" % (self.name,
                                                  len(self.generators))


class HomMap:
    """A homomorphism candidate: images of source generators in the target."""

    def __init__(self, name, source, target, images):
        self.name = name
        self.source = source
        self.target = target
        self.images = dict(images)
        missing = [g.name for g in source.generators
                   if g.name not in self.images]
        if missing:
            raise ValidationError("map %s lacks images for %s"
                                  % (name, missing))

    def image_state(self, gen_name):
        return br.normal_form(self.target, self.images[gen_name])

    def push(self, state):
        """Apply the map to a source state (word by word, then normalize)."""
        out = {}
        eng = br.engine_for(self.target)
        for word, coeff in state.terms.items():
            tree = ex.one()
            for l in reversed(word):
                if ex.is_exp(l):
                    raise ValidationError("cannot push lattice letters")
                gname = self.source.generators[l[1]].name
                tree = ex.no(ex.dn(l[2], self.images[gname]), tree)
            c = coeff.to_params(self.target.params) \
                if isinstance(coeff, Scalar) else coeff
            br.sadd(out, eng.eval_tree(tree), c)
        return State(self.target, out)


def _raw_table_by_name(alg_params, table):
    return table


def make_algebra(name, params, generators, table_by_name, **kw):
    """AlgebraDef constructor used by builders (table keyed by names)."""
    return AlgebraDef(name, params, generators, table_by_name, **kw)


def tensor(*algs, name=None):
    """Tensor product; generator names must stay distinct."""
    params = ()
    for a in algs:
        params = tuple(dict.fromkeys(params + a.params))
    gens, lattices, components = [], [], []
    table, derived, resolutions = {}, {}, {}
    conformal_parts = []
    lat_shift = []
    for ci, a in enumerate(algs):
        lat_shift.append(len(lattices))
        for g in a.generators:
            gens.append(GeneratorDecl(g.name, g.weight, g.parity, g.charges))
            components.append(ci)
        for l in a.lattices:
            lattices.append(LatticeDecl(l.base, l.step, l.pairings))

    def retree(node, ci):
        tag = node[0]
        if tag == "exp":
            return ("exp", node[1], node[2] + lat_shift[ci])
        if tag == "d":
            return ("d", node[1], retree(node[2], ci))
        if tag == "no":
            return ("no", retree(node[1], ci), retree(node[2], ci))
        if tag == "add":
            return ("add", [retree(x, ci) for x in node[1]])
        if tag == "smul":
            return ("smul", node[1].to_params(params), retree(node[2], ci))
        if tag == "mode":
            return ("mode", node[1], retree(node[2], ci), retree(node[3], ci))
        return node

    for ci, a in enumerate(algs):
        for (ia, ib), entry in a.table.items():
            key = (a.generators[ia].name, a.generators[ib].name)
            table[key] = {n: retree(t, ci) for n, t in entry.items()}
        for dname, tree in a.derived.items():
            if dname in derived:
                raise ValidationError("derived name clash %r" % dname)
            derived[dname] = retree(tree, ci)
        for gi, (n, at, bt, ct) in a.raw_resolutions.items():
            resolutions[a.generators[gi].name] = (
                n, retree(at, ci), retree(bt, ci), retree(ct, ci))
        if a.conformal is not None:
            conformal_parts.append(a.conformal)
    conformal = None
    if algs and len(conformal_parts) == len(algs):
        conformal = "L_tensor"
        derived["L_tensor"] = ("add", [ex.gen(p) for p in conformal_parts])
    return AlgebraDef(name or "@".join(a.name for a in algs), params, gens,
                      table, lattices=lattices, derived=derived,
                      conformal=conformal, resolutions=resolutions,
                      components=components)


# cross-component generator pairs bracket to zero without table entries
_orig_table_entry = br.Engine.table_entry


def _table_entry(self, i, j):
    alg = self.alg
    if (i, j) not in alg.table and (j, i) not in alg.table and \
            i not in alg.raw_resolutions and j not in alg.raw_resolutions and \
            alg.components[i] != alg.components[j]:
        return []
    return _orig_table_entry(self, i, j)


br.Engine.table_entry = _table_entry


# -- builtin catalogue --------------------------------------------------------

def builtin_algebra(ident):
    """The AlgebraDef of a builtin id, e.g. ``w_sl4_f22``,
    ``affine_sl2(1)``, ``w_sl2_f2(k+1)`` or ``tensor(betagamma, virasoro)``."""
    from . import tables
    tree = _parse_ident(ident)
    return _build_ident(tree, tables.CATALOG)


def builtin_ids():
    from . import tables
    return sorted(tables.CATALOG)


def parse_vadef(text):
    from .dsl import parse_vadef as p
    alg = p(text)
    alg.validate()
    return alg


def parse_vamap(text):
    from .dsl import parse_vamap as p
    return p(text, builtin_algebra)


def serialize(alg):
    from .dsl_out import serialize_algebra
    return serialize_algebra(alg)


class _IdentParser:
    def __init__(self, s):
        from .dsl import tokenize
        self.toks = tokenize(s)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self):
        t = self.peek()
        if t is None:
            raise UnknownBuiltin("truncated builtin id")
        self.pos += 1
        return t

    def ident(self):
        t = self.take()
        if t[0] != "name":
            raise UnknownBuiltin("bad builtin id")
        name = t[1]
        args = []
        if self.peek() and self.peek()[:2] == ("sym", "("):
            self.take()
            if name == "tensor":
                while True:
                    args.append(self.ident())
                    t = self.take()
                    if t[:2] == ("sym", ")"):
                        break
                    if t[:2] != ("sym", ","):
                        raise UnknownBuiltin("bad tensor id")
            else:
                cur, depth = [], 0
                while True:
                    t = self.take()
                    if t[:2] == ("sym", "("):
                        depth += 1
                    elif t[:2] == ("sym", ")"):
                        if depth == 0:
                            if cur:
                                args.append(cur)
                            break
                        depth -= 1
                    elif t[:2] == ("sym", ",") and depth == 0:
                        args.append(cur)
                        cur = []
                        continue
                    cur.append(t)
        return (name, args)


def _parse_ident(s):
    p = _IdentParser(s)
    out = p.ident()
    if p.peek() is not None:
        raise UnknownBuiltin(s)
    return out


def _build_ident(tree, catalog):
    name, args = tree
    if name == "tensor":
        return tensor(*[_build_ident(a, catalog) for a in args])
    if name not in catalog:
        raise UnknownBuiltin(name)
    spec = catalog[name]
    alg = spec.build()
    if args:
        from .dsl import Context, ExprParser
        if len(args) != len(spec.args):
            raise UnknownBuiltin("%s takes %d argument(s)"
                                 % (name, len(spec.args)))
        for pname, toklist in zip(spec.args, args):
            free = tuple(sorted({t[1] for t in toklist if t[0] == "name"}))
            val = Context(free, set(), set()).to_scalar(
                ExprParser(list(toklist)).parse())
            alg = specialize_param(alg, pname, val)
    return alg


def specialize_param(alg, pname, value):
    """Substitute a Scalar for one parameter throughout an algebra."""
    if pname not in alg.params:
        raise ValidationError("no parameter %r in %s" % (pname, alg.name))
    rest = tuple(p for p in alg.params if p != pname)
    params = tuple(dict.fromkeys(rest + value.params))

    def fs(s):
        return s.subst(pname, value).to_params(params)

    def retree(node):
        return ex.tree_map_scalars(node, fs)

    table = {}
    for (ia, ib), entry in alg.table.items():
        table[(alg.generators[ia].name, alg.generators[ib].name)] = \
            {n: retree(t) for n, t in entry.items()}
    derived = {d: retree(t) for d, t in alg.derived.items()}
    resolutions = {alg.generators[gi].name:
                   (n, retree(a), retree(b), retree(c))
                   for gi, (n, a, b, c) in alg.raw_resolutions.items()}
    return AlgebraDef(alg.name, params, list(alg.generators), table,
                      lattices=list(alg.lattices), derived=derived,
                      conformal=alg.conformal,
                      relations=[retree(t) for t in alg.relations],
                      resolutions=resolutions,
                      components=list(alg.components))
