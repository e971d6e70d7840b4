"""Parsing for scalar/state expressions and the .vadef/.vamap formats.

Expression grammar (shared by scalars, states and bracket right-hand sides):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' INT)?
    atom   := INT | NAME | '(' expr ')'
            | 'l' '(' INT ')'                -- divided power L^(n), brackets only
            | 'd' '(' INT ',' expr ')'       -- n-th derivative
            | 'no' '(' expr ',' expr ')'     -- normally ordered product
            | 'exp' '(' expr ')'             -- lattice exponential e^{n*base}
            | 'mode' '(' INT ',' expr ',' expr ')'  -- A_(n)B

A product of state factors is read right-nested: x*y*z = no(x, no(y, z)).
Division is only by scalar factors.  Names resolve against the declared
parameters, generators and derived fields.
"""

from fractions import Fraction

from . import expr as ex
from .scalar import Scalar


class SyntaxError_(Exception):
    def __init__(self, msg, line=None, col=None):
        where = "" if line is None else " at line %s, col %s" % (line, col)
        super().__init__(msg + where)
        self.line, self.col = line, col


SYMBOLS = ("->", "+", "-", "*", "/", "^", "(", ")", ",", "=", ":")


def tokenize(text, line_no=None):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        if ch == "#":
            break
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("name", text[i:j], i))
            i = j
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                toks.append(("sym", sym, i))
                i += len(sym)
                break
        else:
            raise SyntaxError_("bad character %r" % ch, line_no, i + 1)
    return toks


class ExprParser:
    """Parses the shared expression grammar into raw trees.

    Leaves are ("num", Fraction) and ("name", str); structural nodes are
    ("lam", n), ("d", n, x), ("no", a, b), ("mode", n, a, b), ("exp", x),
    ("mul", a, b), ("div", a, b), ("add", [..]), ("neg", x).
    Name resolution happens in Context.to_* below.
    """

    def __init__(self, toks, line=None):
        self.toks = toks
        self.pos = 0
        self.line = line

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, kind=None, value=None):
        t = self.peek()
        if t is None or (kind and t[0] != kind) or (value and t[1] != value):
            raise SyntaxError_("expected %s%r, got %r" %
                               (kind or "", value or "", t and t[1]),
                               self.line, t[2] + 1 if t else None)
        self.pos += 1
        return t

    def at_end(self):
        return self.pos >= len(self.toks)

    def parse(self):
        node = self.expr()
        if not self.at_end():
            t = self.peek()
            raise SyntaxError_("trailing input %r" % (t[1],), self.line, t[2] + 1)
        return node

    def expr(self):
        t = self.peek()
        neg = False
        if t and t[:2] == ("sym", "-"):
            self.take()
            neg = True
        elif t and t[:2] == ("sym", "+"):
            self.take()
        node = self.term()
        if neg:
            node = ("neg", node)
        items = [node]
        while True:
            t = self.peek()
            if t and t[0] == "sym" and t[1] in "+-":
                self.take()
                nxt = self.term()
                items.append(("neg", nxt) if t[1] == "-" else nxt)
            else:
                break
        return items[0] if len(items) == 1 else ("add", items)

    def term(self):
        node = self.factor()
        while True:
            t = self.peek()
            if t and t[0] == "sym" and t[1] in "*/":
                self.take()
                rhs = self.factor()
                node = ("mul" if t[1] == "*" else "div", node, rhs)
            else:
                break
        return node

    def factor(self):
        node = self.atom()
        t = self.peek()
        if t and t[:2] == ("sym", "^"):
            self.take()
            e = self.int_()
            node = ("pow", node, e)
        return node

    def int_(self):
        neg = False
        t = self.peek()
        if t and t[:2] == ("sym", "-"):
            self.take()
            neg = True
        t = self.take("int")
        return -t[1] if neg else t[1]

    def atom(self):
        t = self.peek()
        if t is None:
            raise SyntaxError_("unexpected end of expression", self.line)
        if t[0] == "int":
            self.take()
            return ("num", Fraction(t[1]))
        if t[:2] == ("sym", "("):
            self.take()
            node = self.expr()
            self.take("sym", ")")
            return node
        if t[:2] == ("sym", "-"):
            self.take()
            return ("neg", self.atom())
        if t[0] == "name":
            name = t[1]
            self.take()
            nxt = self.peek()
            if name in ("l", "d", "no", "exp", "mode") and \
                    nxt and nxt[:2] == ("sym", "("):
                self.take()
                if name == "l":
                    n = self.int_()
                    self.take("sym", ")")
                    return ("lam", n)
                if name == "d":
                    n = self.int_()
                    self.take("sym", ",")
                    node = self.expr()
                    self.take("sym", ")")
                    return ("d", n, node)
                if name == "no":
                    a = self.expr()
                    self.take("sym", ",")
                    b = self.expr()
                    self.take("sym", ")")
                    return ("no", a, b)
                if name == "exp":
                    node = self.expr()
                    self.take("sym", ")")
                    return ("exp", node)
                if name == "mode":
                    n = self.int_()
                    self.take("sym", ",")
                    a = self.expr()
                    self.take("sym", ",")
                    b = self.expr()
                    self.take("sym", ")")
                    return ("mode", n, a, b)
            return ("name", name)
        raise SyntaxError_("unexpected %r" % (t[1],), self.line, t[2] + 1)


class ScalarParser:
    def __init__(self, text, params):
        self.text = text
        self.params = tuple(params)

    def parse(self):
        tree = ExprParser(tokenize(self.text)).parse()
        ctx = Context(self.params, set(), set())
        return ctx.to_scalar(tree)


class Context:
    """Classifies parsed trees into Scalars, state trees or lambda tables."""

    def __init__(self, params, gen_names, derived_names, has_lattice=False):
        self.params = tuple(params)
        self.gens = set(gen_names)
        self.derived = set(derived_names)
        self.has_lattice = has_lattice

    def is_scalar_tree(self, node):
        tag = node[0]
        if tag == "num":
            return True
        if tag == "name":
            if node[1] in self.params:
                return True
            if node[1] in self.gens or node[1] in self.derived:
                return False
            raise SyntaxError_("unknown name %r" % (node[1],))
        if tag in ("neg", "pow"):
            return self.is_scalar_tree(node[1])
        if tag in ("mul", "div", "add"):
            kids = node[1] if tag == "add" else [node[1], node[2]]
            return all(self.is_scalar_tree(k) for k in kids)
        return False

    def to_scalar(self, node):
        tag = node[0]
        if tag == "num":
            return Scalar.rational(node[1], self.params)
        if tag == "name":
            if node[1] not in self.params:
                raise SyntaxError_("%r is not a parameter" % (node[1],))
            return Scalar.param(node[1], self.params)
        if tag == "neg":
            return -self.to_scalar(node[1])
        if tag == "pow":
            return self.to_scalar(node[1]) ** node[2]
        if tag == "mul":
            return self.to_scalar(node[1]) * self.to_scalar(node[2])
        if tag == "div":
            return self.to_scalar(node[1]) / self.to_scalar(node[2])
        if tag == "add":
            out = Scalar.zero(self.params)
            for k in node[1]:
                out = out + self.to_scalar(k)
            return out
        raise SyntaxError_("not a scalar expression: %r" % (node,))

    def to_state_tree(self, node):
        """Convert to the raw tree language of expr.py (no lam nodes)."""
        tag = node[0]
        if tag == "num":
            return ex.smul(Scalar.rational(node[1], self.params), ex.one())
        if tag == "name":
            if node[1] in self.params:
                return ex.smul(Scalar.param(node[1], self.params), ex.one())
            return ex.gen(node[1])
        if tag == "neg":
            return ex.smul(Scalar.rational(-1, self.params),
                           self.to_state_tree(node[1]))
        if tag == "add":
            return ex.add(*[self.to_state_tree(k) for k in node[1]])
        if tag == "d":
            return ex.dn(node[1], self.to_state_tree(node[2]))
        if tag == "no":
            return ex.no(self.to_state_tree(node[1]), self.to_state_tree(node[2]))
        if tag == "mode":
            return ex.mode(node[1], self.to_state_tree(node[2]),
                           self.to_state_tree(node[3]))
        if tag == "exp":
            if not self.has_lattice:
                raise SyntaxError_("exp(..) used but no lattice declared")
            n = self.to_scalar(node[1]).as_rational()
            if n is None:
                raise SyntaxError_("exp argument must be rational")
            return ex.exp(n)
        if tag == "pow":
            base = node[1]
            if self.is_scalar_tree(base):
                return ex.smul(self.to_scalar(node), ex.one())
            if node[2] < 1:
                raise SyntaxError_("state power must be positive")
            return ex.nos(*([self.to_state_tree(base)] * node[2]))
        if tag == "div":
            den = self.to_scalar(node[2])
            num = self.to_state_tree(node[1])
            return ex.smul(Scalar.one(self.params) / den, num)
        if tag == "mul":
            if self.is_scalar_tree(node[1]):
                return ex.smul(self.to_scalar(node[1]),
                               self.to_state_tree(node[2]))
            if self.is_scalar_tree(node[2]):
                return ex.smul(self.to_scalar(node[2]),
                               self.to_state_tree(node[1]))
            return ex.no(self.to_state_tree(node[1]), self.to_state_tree(node[2]))
        if tag == "lam":
            raise SyntaxError_("l(n) is only allowed in bracket definitions")
        raise SyntaxError_("cannot read %r as a state" % (node,))

    def to_lambda_table(self, node):
        """Split a bracket right-hand side into {lambda power: state tree}."""
        out = {}
        for coeff, factors in self._expand(node):
            lam = [f for f in factors if f[0] == "lam"]
            rest = [f for f in factors if f[0] != "lam"]
            if len(lam) > 1:
                raise SyntaxError_("two l(..) factors in one term")
            n = lam[0][1] if lam else 0
            if n < 0:
                raise SyntaxError_("negative lambda power")
            scal = [f for f in rest if self.is_scalar_tree(f)]
            states = [f for f in rest if not self.is_scalar_tree(f)]
            tree = ex.nos(*[self.to_state_tree(s) for s in states]) \
                if states else ex.one()
            c = Scalar.rational(1, self.params)
            for s in scal:
                c = c * self.to_scalar(s)
            if coeff != 1:
                c = c * coeff
            out.setdefault(n, []).append(ex.smul(c, tree))
        return {n: ex.add(*trees) for n, trees in out.items()}

    def _expand(self, node, coeff=Fraction(1)):
        """Yield (rational coeff, [multiplicative factors]) summands."""
        tag = node[0]
        if tag == "add":
            for k in node[1]:
                yield from self._expand(k, coeff)
        elif tag == "neg":
            yield from self._expand(node[1], -coeff)
        elif tag == "mul":
            for c1, f1 in self._expand(node[1]):
                for c2, f2 in self._expand(node[2]):
                    yield coeff * c1 * c2, f1 + f2
        elif tag == "div":
            for c1, f1 in self._expand(node[1]):
                yield coeff * c1, f1 + [("div", ("num", Fraction(1)), node[2])]
        else:
            yield coeff, [node]


# -- .vadef ----------------------------------------------------------------


def parse_vadef(text):
    from .registry import AlgebraDef
    name = None
    params = ()
    gens = []
    lattices = []
    table = {}
    derived = {}
    derived_order = []
    resolutions = {}
    conformal = None
    relations = []

    def ctx():
        return Context(params, {g.name for g in gens}, set(derived_order),
                       has_lattice=bool(lattices))

    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = tokenize(line, line_no)
        head = toks[0]
        if head[0] != "name":
            raise SyntaxError_("bad statement", line_no, 1)
        kw = head[1]
        rest = toks[1:]
        try:
            if kw == "algebra":
                name = rest[0][1]
            elif kw == "params":
                params = tuple(t[1] for t in rest if t[0] == "name")
            elif kw == "gen":
                gens.append(_parse_gen(rest, line_no))
            elif kw == "lattice":
                lattices.append(_parse_lattice(rest, line_no))
            elif kw == "bracket":
                a, b = rest[0][1], rest[1][1]
                p = ExprParser(rest[3:], line_no)
                # position 2 must be '='
                if rest[2][:2] != ("sym", "="):
                    raise SyntaxError_("expected '='", line_no)
                tree = p.parse()
                table[(a, b)] = ctx().to_lambda_table(tree)
            elif kw == "derived":
                gname = rest[0][1]
                if rest[1][:2] != ("sym", "="):
                    raise SyntaxError_("expected '='", line_no)
                tree = ExprParser(rest[2:], line_no).parse()
                derived[gname] = ctx().to_state_tree(tree)
                derived_order.append(gname)
            elif kw == "resolve":
                gname = rest[0][1]
                if rest[1][:2] != ("sym", "="):
                    raise SyntaxError_("expected '='", line_no)
                tree = ExprParser(rest[2:], line_no).parse()
                resolutions[gname] = _split_resolution(tree, ctx(), line_no)
            elif kw == "conformal":
                conformal = rest[0][1]
            elif kw == "relation":
                tree = ExprParser(rest, line_no).parse()
                relations.append(ctx().to_state_tree(tree))
            else:
                raise SyntaxError_("unknown keyword %r" % kw, line_no, 1)
        except IndexError:
            raise SyntaxError_("truncated %r statement" % kw, line_no, 1)
    if name is None:
        raise SyntaxError_("missing 'algebra' header")
    alg = AlgebraDef(name, params, gens, table, lattices=lattices,
                     derived=derived, conformal=conformal,
                     relations=relations, resolutions=resolutions)
    return alg


def _parse_gen(toks, line_no):
    name = toks[0][1]
    weight = None
    parity = ex.EVEN
    charges = {}
    i = 1
    while i < len(toks):
        key = toks[i][1]
        if key == "weight":
            p = ExprParser([], line_no)
            j = i + 1
            depth = 0
            sub = []
            while j < len(toks):
                t = toks[j]
                if t[0] == "name" and t[1] in ("parity", "charge") and depth == 0:
                    break
                if t[:2] == ("sym", "("):
                    depth += 1
                if t[:2] == ("sym", ")"):
                    depth -= 1
                sub.append(t)
                j += 1
            weight = Context((), set(), set()).to_scalar(
                ExprParser(sub, line_no).parse()).as_rational()
            i = j
        elif key == "parity":
            parity = ex.ODD if toks[i + 1][1] == "odd" else ex.EVEN
            i += 2
        elif key == "charge":
            cname = toks[i + 1][1]
            if toks[i + 2][:2] != ("sym", "="):
                raise SyntaxError_("expected '=' in charge", line_no)
            j = i + 3
            sub = []
            while j < len(toks) and not (toks[j][0] == "name"
                                         and toks[j][1] in ("parity", "charge",
                                                            "weight")):
                sub.append(toks[j])
                j += 1
            charges[cname] = Context((), set(), set()).to_scalar(
                ExprParser(sub, line_no).parse()).as_rational()
            i = j
        else:
            raise SyntaxError_("unknown gen attribute %r" % key, line_no)
    if weight is None:
        raise SyntaxError_("gen %s lacks a weight" % name, line_no)
    return ex.GeneratorDecl(name, weight, parity, charges)


def _parse_lattice(toks, line_no):
    base = toks[0][1]
    step = Fraction(1)
    pairings = {}
    i = 1
    while i < len(toks):
        key = toks[i][1]
        if key == "step":
            j = i + 1
            sub = []
            while j < len(toks) and not (toks[j][0] == "name"
                                         and toks[j][1] in ("pair", "step")):
                sub.append(toks[j])
                j += 1
            step = Context((), set(), set()).to_scalar(
                ExprParser(sub, line_no).parse()).as_rational()
            i = j
        elif key == "pair":
            gname = toks[i + 1][1]
            j = i + 2
            sub = []
            while j < len(toks) and not (toks[j][0] == "name"
                                         and toks[j][1] in ("pair", "step")):
                sub.append(toks[j])
                j += 1
            pairings[gname] = Context((), set(), set()).to_scalar(
                ExprParser(sub, line_no).parse()).as_rational()
            i = j
        else:
            raise SyntaxError_("unknown lattice attribute %r" % key, line_no)
    return ex.LatticeDecl(base, step, pairings)


def _split_resolution(tree, ctx, line_no):
    """resolve G = mode(n, A, B) + rest  ->  (n, A_tree, B_tree, -rest)."""
    summands = []

    def flatten(node, sign):
        if node[0] == "add":
            for k in node[1]:
                flatten(k, sign)
        elif node[0] == "neg":
            flatten(node[1], -sign)
        else:
            summands.append((sign, node))

    flatten(tree, 1)
    mode_nodes = [(s, n) for s, n in summands if n[0] == "mode"]
    if len(mode_nodes) != 1 or mode_nodes[0][0] != 1:
        raise SyntaxError_("resolve needs exactly one +mode(..) term", line_no)
    _, m = mode_nodes[0]
    corr = [("neg", n) if s > 0 else n for s, n in summands if n[0] != "mode"]
    corr_tree = ctx.to_state_tree(("add", corr)) if corr \
        else ex.smul(Scalar.zero(ctx.params), ex.one())
    return (m[1], ctx.to_state_tree(m[2]), ctx.to_state_tree(m[3]),
            corr_tree)


# -- .vamap ----------------------------------------------------------------


def parse_vamap(text, resolver):
    """Parse a homomorphism file; ``resolver`` maps algebra ids to AlgebraDefs."""
    from .registry import HomMap
    name = None
    source = target = None
    images = {}
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = tokenize(line, line_no)
        kw = toks[0][1]
        if kw == "map":
            name = toks[1][1]
            arrow = [i for i, t in enumerate(toks) if t[:2] == ("sym", "->")]
            if toks[2][:2] != ("sym", ":") or not arrow:
                raise SyntaxError_("map NAME : SRC -> TGT", line_no)
            src_toks = toks[3:arrow[0]]
            tgt_toks = toks[arrow[0] + 1:]
            source = resolver(_id_text(src_toks))
            target = resolver(_id_text(tgt_toks))
        elif kw == "send":
            gname = toks[1][1]
            if toks[2][:2] != ("sym", "="):
                raise SyntaxError_("send GEN = EXPR", line_no)
            if target is None:
                raise SyntaxError_("send before map header", line_no)
            tree = ExprParser(toks[3:], line_no).parse()
            ctx = Context(target.params, set(target.index),
                          set(target.derived), has_lattice=bool(target.lattices))
            images[gname] = ctx.to_state_tree(tree)
        else:
            raise SyntaxError_("unknown keyword %r" % kw, line_no)
    if source is None or target is None:
        raise SyntaxError_("missing map header")
    return HomMap(name, source, target, images)


def _id_text(toks):
    out = []
    for t in toks:
        out.append(str(t[1]))
    return "".join(out)
