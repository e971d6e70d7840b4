"""Partition/pyramid combinatorics for the type-A reductions.

Covers the symmetric-pyramid grading, per-block root data for the direct
and the staged reduction, strong generating types, central-charge
formulas, the staged-reduction character comparison и the two-parameter
coset specializations (c, lam, truncation weight, Heisenberg norms).
"""

from fractions import Fraction

from .scalar import Scalar
from .verify import CheckReport


class Partition:
    """parts weakly increasing, N = sum."""

    def __init__(self, parts):
        parts = tuple(int(p) for p in parts)
        if not parts or any(p <= 0 for p in parts) or \
                any(parts[i] > parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError("parts must be weakly increasing positive: %r"
                             % (parts,))
        self.parts = parts
        self.N = sum(parts)

    @staticmethod
    def of(spec):
        if isinstance(spec, Partition):
            return spec
        if isinstance(spec, str):
            spec = [int(x) for x in spec.replace(" ", "").split(",")]
        return Partition(sorted(spec))

    def __repr__(self):
        return "Partition(%s)" % (",".join(map(str, self.parts)))

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


def all_partitions(N):
    out = []

    def rec(rest, maxpart, acc):
        if rest == 0:
            out.append(Partition(tuple(reversed(acc))))
            return
        for p in range(min(rest, maxpart), 0, -1):
            acc.append(p)
            rec(rest - p, p, acc)
            acc.pop()

    rec(N, N, [])
    return out


def _coords(lam):
    """x-eigenvalues of the boxes, row by row (each row decreasing)."""
    rows = []
    for p in lam.parts:
        rows.append([Fraction(p - 1, 2) - i for i in range(p)])
    return rows


def grading_table(lam):
    """(N x N matrix of x_p - x_q, block index per cell, x_norm)."""
    rows = _coords(lam)
    flat = [v for row in rows for v in row]
    rowof = []
    for r, row in enumerate(rows):
        rowof += [r] * len(row)
    N = lam.N
    table = [[flat[p] - flat[q] for q in range(N)] for p in range(N)]
    blocks = [[(rowof[p], rowof[q]) for q in range(N)] for p in range(N)]
    x_norm = sum((v * v for v in flat), Fraction(0))
    return table, blocks, x_norm


class BlockRootData:
    def __init__(self, variant, plus_values, half_values):
        self.variant = variant
        self.plus_values = sorted(plus_values)
        self.half_values = sorted(half_values)


def block_root_data(lam):
    """{(i, j): (direct BlockRootData, staged BlockRootData)} per block."""
    rows = _coords(lam)
    n = len(rows)
    out = {}
    for i in range(n):
        for j in range(n):
            direct_p, direct_h = [], []
            staged_p, staged_h = [], []
            t = max(i, j)
            for pi, xp in enumerate(rows[i]):
                for qi, xq in enumerate(rows[j]):
                    if i == j and pi == qi:
                        continue
                    v = xp - xq
                    if v > 0:
                        direct_p.append(v)
                    if v == Fraction(1, 2):
                        direct_h.append(v)
                    # stage t grading: x_t vanishes off row t
                    g = (xp if i == t else 0) - (xq if j == t else 0)
                    if g > 0:
                        staged_p.append(v)
                    if g == Fraction(1, 2):
                        staged_h.append(v)
            out[(i, j)] = (BlockRootData("direct", direct_p, direct_h),
                           BlockRootData("staged", staged_p, staged_h))
    return out


def grading_and_roots(lam):
    lam = Partition.of(lam)
    table, blocks, x_norm = grading_table(lam)
    data = block_root_data(lam)
    direct = {b: d for b, (d, s) in data.items()}
    staged = {b: s for b, (d, s) in data.items()}
    return table, x_norm, direct, staged


def strong_gen_type(lam, kind="gl"):
    """Weight multiset {weight: multiplicity} of the strong generators."""
    lam = Partition.of(lam)
    out = {}
    for a in lam.parts:
        for b in lam.parts:
            start = Fraction(abs(b - a), 2) + 1
            for t in range(min(a, b)):
                w = start + t
                out[w] = out.get(w, 0) + 1
    if kind == "sl":
        out[Fraction(1)] -= 1
        if not out[Fraction(1)]:
            del out[Fraction(1)]
    return out


def centralizer_dim(lam, kind="gl"):
    lam = Partition.of(lam)
    d = sum(min(a, b) for a in lam.parts for b in lam.parts)
    return d if kind == "gl" else d - 1


def c_bracket(t):
    """c[t] = 12 t (t - 1) + 2."""
    t = Fraction(t)
    return 12 * t * (t - 1) + 2


def ghost_cc_block(data):
    """Ghost central charge of one block: charged -c[a], neutral +c[a]/2."""
    out = Fraction(0)
    for a in data.plus_values:
        out -= c_bracket(a)
    for a in data.half_values:
        out += Fraction(c_bracket(a), 2)
    return out


def krw_central_charge(kind, lam, level):
    """c_aff + c_gh for the W-algebra of the partition at the given level."""
    lam = Partition.of(lam)
    N = lam.N
    if not isinstance(level, Scalar):
        level = Scalar.rational(level)
    _, _, x_norm = grading_table(lam)
    if kind == "sl":
        dim = N * N - 1
    elif kind == "gl":
        return krw_central_charge("sl", lam, level) + 1
    else:
        raise ValueError(kind)
    c = level * dim / (level + N) - 12 * x_norm * level
    for (i, j), (direct, _) in block_root_data(lam).items():
        c = c + ghost_cc_block(direct)
    return c


def stage_sequence(lam):
    """[(hook partition, N_i, level shift a_i)] with stage level k + a_i."""
    lam = Partition.of(lam)
    parts = lam.parts
    n = len(parts)
    out = []
    a = Fraction(0)
    Ni = lam.N
    for i in range(n - 1, -1, -1):
        hook = Partition(tuple([1] * (Ni - parts[i])) + (parts[i],)) \
            if Ni > parts[i] else Partition((parts[i],))
        out.append((hook, Ni, a))
        a = a + parts[i] - 1
        Ni -= parts[i]
    out.reverse()
    return out


def signed_multiset(data):
    """Charged root of value a: +1 at a and +1 at 1-a; neutral: -1 at 1-a."""
    out = {}

    def bump(v, m):
        out[v] = out.get(v, 0) + m
        if not out[v]:
            del out[v]

    for a in data.plus_values:
        bump(a, 1)
        bump(1 - a, 1)
    for a in data.half_values:
        bump(1 - a, -1)
    return out


def thm22_check(lam, order=None):
    """Per-block equality of staged and direct ghost data (character level)."""
    lam = Partition.of(lam)
    witnesses = []
    scalars = {}
    total_direct = Fraction(0)
    total_staged = Fraction(0)
    for (i, j), (direct, staged) in sorted(block_root_data(lam).items()):
        md, ms = signed_multiset(direct), signed_multiset(staged)
        cd, cs = ghost_cc_block(direct), ghost_cc_block(staged)
        total_direct += cd
        total_staged += cs
        if md != ms:
            witnesses.append(((i + 1, j + 1), "multisets differ: %s vs %s"
                              % (md, ms)))
        if cd != cs:
            witnesses.append(((i + 1, j + 1), "ghost cc differ: %s vs %s"
                              % (cd, cs)))
    scalars["ghost_cc_direct"] = total_direct
    scalars["ghost_cc_staged"] = total_staged
    cid = "thm22[%s]" % ",".join(map(str, lam.parts))
    return CheckReport(cid, "fail" if witnesses else "pass",
                       witnesses=witnesses, scalars=scalars)


# -- coset parameters ----------------------------------------------------------


def c_param(N, m, level):
    """Central charge of the two-parameter coset specialization."""
    if not isinstance(level, Scalar):
        level = Scalar.rational(level)
    N, m = int(N), int(m)
    n = N - m
    psi = level + N
    return -(n * psi - N - 1) * (n * psi - psi - N + 1) * \
        (n * psi + psi - N) / ((psi - 1) * psi)


def lam_param(N, m, level):
    if not isinstance(level, Scalar):
        level = Scalar.rational(level)
    N, m = int(N), int(m)
    n = N - m
    psi = level + N
    return -(psi - 1) * psi / ((n * psi - N - 2) * (n * psi - 2 * psi - N + 2)
                               * (n * psi + 2 * psi - N))


def heisenberg_norm(N, m, level):
    """Level of the u(1) field of the hook-type W-algebra: [J_L J]."""
    if not isinstance(level, Scalar):
        level = Scalar.rational(level)
    N, m = int(N), int(m)
    n = N - m
    return Scalar.rational(-m) + Fraction(n * m, N) * (level + N)


def params(N, m, level=None):
    """(c, lam, truncation weight, coset type, Heisenberg norm)."""
    if level is None:
        level = Scalar.param("k")
    N, m = int(N), int(m)
    if not N > m >= 0:
        raise ValueError("need N > m >= 0")
    trunc = (m + 1) * (N + 1)
    coset_type = {Fraction(w): 1 for w in range(2, trunc)}
    return {
        "c": c_param(N, m, level),
        "lam": lam_param(N, m, level),
        "truncation_weight": trunc,
        "coset_type": coset_type,
        "heisenberg_norm": heisenberg_norm(N, m, level),
    }


def virasoro_h(r1, s1, level):
    """Highest weight h_{r+1,s+1} of the level-l Virasoro minimal series."""
    if not isinstance(level, Scalar):
        level = Scalar.rational(level)
    r, s = int(r1), int(s1)
    return ((r * (level + 2) - s) ** 2 - (level + 1) ** 2) / (4 * (level + 2))


def sugawara_c(M, level):
    """Central charge of the affine sl_M vacuum algebra (0 for M <= 1)."""
    if M <= 1:
        return Scalar.rational(0)
    if not isinstance(level, Scalar):
        level = Scalar.rational(level)
    return level * (M * M - 1) / (level + M)


def principal_c(M, level):
    """c of the regular W-algebra of sl_M (0 for M <= 1)."""
    if M <= 1:
        return Scalar.rational(0)
    return c_param(M, 0, level)


# -- q-series ------------------------------------------------------------------


class QSeries:
    """Truncated series in q^(1/2); coefficients keyed by doubled exponent."""

    def __init__(self, coeffs, order2):
        self.coeffs = {e: c for e, c in coeffs.items() if c and e <= order2}
        self.order2 = order2

    @staticmethod
    def one(order2):
        return QSeries({0: 1}, order2)

    def mul(self, other):
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                if e1 + e2 <= self.order2:
                    out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return QSeries(out, self.order2)

    def coefficient(self, exponent):
        return self.coeffs.get(int(2 * Fraction(exponent)), 0)

    def __eq__(self, other):
        return self.coeffs == other.coeffs and self.order2 == other.order2

    def to_json(self):
        return {str(e): c for e, c in sorted(self.coeffs.items())}

    def __repr__(self):
        bits = ["%d*q^%s" % (c, Fraction(e, 2)) for e, c in
                sorted(self.coeffs.items())]
        return "QSeries(%s)" % " + ".join(bits or ["0"])


def _geometric_factor(e2, mult, order2):
    """(1 - q^(e2/2))^(-mult) truncated, e2 > 0; mult may be negative."""
    out = QSeries.one(order2)
    if mult > 0:
        base = {0: 1}
        # 1/(1-x)^mult via repeated multiplication by 1/(1-x)
        for _ in range(mult):
            acc = {}
            for e, c in base.items():
                k = e
                while k <= order2:
                    acc[k] = acc.get(k, 0) + c
                    k += e2
            base = acc
        out = QSeries(base, order2)
    else:
        for _ in range(-mult):
            out = out.mul(QSeries({0: 1, e2: -1}, order2))
    return out


def pbw_char(type_multiset, order):
    """prod over generators of weight D: prod_{n >= D, n = D mod 1}
    (1 - q^n)^(-1), truncated at q^order."""
    order2 = int(2 * Fraction(order))
    out = QSeries.one(order2)
    for w, mult in sorted(type_multiset.items()):
        e2 = int(2 * Fraction(w))
        while e2 <= order2:
            out = out.mul(_geometric_factor(e2, mult, order2))
            e2 += 2
    return out


class LedgerNotRegular(Exception):
    pass


class PochhammerLedger:
    """Multiset of infinite factors (q^e; q)_inf with integer multiplicities,
    plus finite factors (1 - q^e).  Exponents are kept doubled."""

    def __init__(self):
        self.inf = {}
        self.fin = {}

    def add_inf(self, e, mult=1):
        e2 = int(2 * Fraction(e))
        self.inf[e2] = self.inf.get(e2, 0) + mult
        if not self.inf[e2]:
            del self.inf[e2]

    def add_fin(self, e, mult=1):
        e2 = int(2 * Fraction(e))
        self.fin[e2] = self.fin.get(e2, 0) + mult
        if not self.fin[e2]:
            del self.fin[e2]

    def reduce(self):
        """Use (q^a;q) = (1-q^a)(q^(a+1);q) to push every infinite factor of
        a residue class up to the class maximum; multiplicities must then
        cancel, leaving finite factors only."""
        classes = {}
        for e2, mult in self.inf.items():
            classes.setdefault(e2 % 2, {})[e2] = mult
        self.inf = {}
        for cls in classes.values():
            if sum(cls.values()) != 0:
                raise LedgerNotRegular(
                    "infinite factors survive cancellation: %r" % (cls,))
            top = max(cls)
            for e2, mult in cls.items():
                e = e2
                while e < top:
                    self.add_fin(e, mult)
                    e += 2
        for e2, mult in list(self.fin.items()):
            if e2 <= 0 and mult != 0:
                raise LedgerNotRegular("non-positive exponent %s remains"
                                       % Fraction(e2, 2))

    def expand(self, order):
        order2 = int(2 * Fraction(order))
        out = QSeries.one(order2)
        for e2, mult in sorted(self.fin.items()):
            if e2 > order2:
                continue
            out = out.mul(_geometric_factor(e2, -mult, order2))
        for e2, mult in sorted(self.inf.items()):
            e = e2
            while e <= order2:
                out = out.mul(_geometric_factor(e, -mult, order2))
                e += 2
        return out


def kw_char_ledger(lam, kind="sl"):
    """Ledger of the full reduction complex: currents x ghosts."""
    lam = Partition.of(lam)
    led = PochhammerLedger()
    table, _, _ = grading_table(lam)
    N = lam.N
    rank = N - 1 if kind == "sl" else N
    for _ in range(rank):
        led.add_inf(1, -1)
    for p in range(N):
        for q in range(N):
            if p != q:
                led.add_inf(1 - table[p][q], -1)
    for (i, j), (direct, _) in block_root_data(lam).items():
        for a in direct.plus_values:
            led.add_inf(a, 1)
            led.add_inf(1 - a, 1)
        for a in direct.half_values:
            led.add_inf(1 - a, -1)
    return led


def kw_char_identity(lam, order, kind="sl"):
    """Euler character of the complex vs the PBW character of the type.

    The complex ledger is divided by the PBW ledger; all infinite factors
    must cancel after integer shifts, the surviving finite product must be
    exactly 1 through the requested order.
    """
    lam = Partition.of(lam)
    cid = "kw_char[%s]" % ",".join(map(str, lam.parts))
    led = kw_char_ledger(lam, kind)
    gen_type = strong_gen_type(lam, kind)
    for w, mult in gen_type.items():
        led.add_inf(w, mult)
    try:
        led.reduce()
    except LedgerNotRegular as e:
        return CheckReport(cid, "fail", witnesses=[("ledger", str(e))])
    ratio = led.expand(order)
    if ratio == QSeries.one(ratio.order2):
        series = pbw_char(gen_type, order)
        return CheckReport(cid, "pass", scalars={"series": series.to_json()})
    return CheckReport(cid, "fail",
                       witnesses=[("ratio", repr(ratio))])


# -- central-charge ledgers of conformal embeddings -----------------------------


def embedding_ledger(case):
    """Exact central-charge additivity for one bundled embedding instance.

    Case ids:
      thmD1:p=<odd p>      regular x regular x pi inside the rank-4
                           rectangular W-algebra at level -4 + p/2
      thm42_3              coset x Virasoro x pi, symbolic level
      thm43_3              coset x rank-2 hook x pi, symbolic level
      thm61:n=..,m=..,p=.. hook-type branching at level -(n+m) + p/n
      collapse:sl5_f23:k=-8/3   the rank-4 (2,3) case at the exceptional level
    """
    segments = case.split(":")
    name = segments[0]
    opts = {}
    tags = []
    for seg in segments[1:]:
        for bit in seg.split(","):
            key, eq, val = bit.partition("=")
            if eq:
                opts[key.strip()] = val.strip()
            elif bit.strip():
                tags.append(bit.strip())
    if name == "thmD1":
        p = int(opts["p"])
        if p < 5 or p % 2 == 0:
            raise ValueError("need odd p >= 5")
        k = Fraction(-4) + Fraction(p, 2)
        lhs = krw_central_charge("sl", (2, 2), k).as_rational()
        M = p - 4
        c1 = principal_c(M, Fraction(-M) + Fraction(p, p - 2)).as_rational()
        c2 = principal_c(M, Fraction(-M) + Fraction(p - 2, p - 4)).as_rational()
        rhs = c1 + c2 + 1
        scalars = {"c_total": lhs, "c_factors": [c1, c2, Fraction(1)]}
    elif name == "thm42_3":
        k = Scalar.param("k")
        lhs = krw_central_charge("sl", (2, 3), k)
        rhs = c_param(5, 2, k) + c_param(2, 0, k + 2) + 1
        scalars = {"c_total": lhs}
    elif name == "thm43_3":
        k = Scalar.param("k")
        lhs = krw_central_charge("sl", (1, 2, 2), k)
        rhs = c_param(5, 3, k) + krw_central_charge("sl", (1, 2), k + 1) + 1
        scalars = {"c_total": lhs}
    elif name == "thm61":
        n, m, p = int(opts["n"]), int(opts["m"]), int(opts["p"])
        from math import gcd
        if gcd(p, n) != 1 or p < n or p < n + m:
            raise ValueError("need p >= max(n, n+m), (p, n) = 1")
        N = n + m
        k = Fraction(-N) + Fraction(p, n)
        hook = Partition(tuple([1] * m) + (n,))
        lhs = krw_central_charge("sl", hook, k).as_rational()
        M = p - N
        c1 = principal_c(M, Fraction(-M) + Fraction(p, p - n)).as_rational()
        ks = Fraction(-m) + Fraction(p - n, n)
        c2 = sugawara_c(m, ks).as_rational()
        rhs = c1 + c2 + 1
        scalars = {"c_total": lhs, "c_factors": [c1, c2, Fraction(1)]}
    elif name == "collapse" and opts.get("k") is not None:
        k = Fraction(opts["k"])
        c2 = c_param(2, 0, k + 2).as_rational()
        lhs, rhs = c2, Fraction(1, 2)
        scalars = {"c_L2": c2}
    else:
        raise ValueError("unknown case %r" % case)
    status = "pass" if lhs == rhs else "fail"
    witnesses = [] if status == "pass" else [(case, "%s != %s" % (lhs, rhs))]
    return CheckReport("ledger[%s]" % case, status, witnesses=witnesses,
                       scalars=scalars)
