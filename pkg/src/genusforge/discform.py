"""Finite quadratic forms and gluing.

A form lives on the group Z/n_1 + ... + Z/n_k.  Values are kept as
integers scaled by M = lcm(n_i): q(x) * M is known modulo 2M and
b(x, y) * M modulo M.  Elements are tuples of residues.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd, lcm, prod

from sympy import factorint

from .genus import (
    GenusError,
    GenusSymbol,
    _distributions,
    _TwoAdicState,
    chi,
    constituents_from_blocks,
    odd_diagonal,
)

ELEMENT_CAP = 1 << 20


class FormError(ValueError):
    pass


class WittFailure(FormError):
    """Complements of two embeddings of the same form are not isometric."""


def small_snf(a):
    """Smith form of a small integer matrix with transforms.

    Returns (left, left_inverse, diag, right) with left * a * right == diag.
    Used for subgroup bookkeeping, where sympy's per-call overhead dominates.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    a = [list(r) for r in a]
    left = [[int(i == j) for j in range(m)] for i in range(m)]
    linv = [[int(i == j) for j in range(m)] for i in range(m)]
    right = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]
        for row in linv:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x + c * y for x, y in zip(left[dst], left[src])]
        for row in linv:
            row[src] -= c * row[dst]

    def swap_cols(i, j):
        for mat in (a, right):
            for row in mat:
                row[i], row[j] = row[j], row[i]

    def add_col(dst, src, c):
        for mat in (a, right):
            for row in mat:
                row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            piv = None
            for i in range(t, m):
                for j in range(t, n):
                    if a[i][j] and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                break
            swap_rows(t, piv[0])
            swap_cols(t, piv[1])
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    done = done and a[i][t] == 0
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    done = done and a[t][j] == 0
            if not done:
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(a[i][j] % a[t][t] for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < m and a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]
            for row in linv:
                row[t] = -row[t]
    return left, linv, a, right


def _matmul(x, y):
    return [[sum(x[i][k] * y[k][j] for k in range(len(y))) for j in range(len(y[0]))]
            for i in range(len(x))]


def _lattice_basis(orders, gens):
    """Basis (columns) of the lattice spanned by gens and the n_i e_i, with its diagonal."""
    k = len(orders)
    cols = [list(g) for g in gens] + [[orders[i] if r == i else 0 for r in range(k)] for i in range(k)]
    a = [[cols[c][r] for c in range(len(cols))] for r in range(k)]
    left, linv, d, _ = small_snf(a)
    diag = [d[i][i] for i in range(k)]
    basis = [[linv[r][i] * diag[i] for i in range(k)] for r in range(k)]
    return basis, left, diag


def _quotient_basis(orders, num_gens, den_gens):
    """Invariant factors and generators of <num>/<den> inside the group."""
    k = len(orders)
    if k == 0:
        return [], []
    b1, left1, diag1 = _lattice_basis(orders, num_gens)
    b0, _, _ = _lattice_basis(orders, den_gens)
    # b1^{-1} = diag(1/d) * left1
    lb0 = _matmul(left1, b0)
    c = [[lb0[i][j] // diag1[i] for j in range(k)] for i in range(k)]
    _, linv2, d, _ = small_snf(c)
    basis = _matmul(b1, linv2)
    out_orders, out_gens = [], []
    for i in range(k):
        di = abs(d[i][i])
        if di > 1:
            out_orders.append(di)
            out_gens.append(tuple(basis[r][i] % orders[r] for r in range(k)))
    return out_orders, out_gens


class FiniteQuadraticForm:
    """Quadratic form q: A -> Q/2Z on a finite abelian group with chosen generators."""

    def __init__(self, orders, gram):
        orders = [int(n) for n in orders]
        if any(n < 1 for n in orders):
            raise FormError("orders must be positive")
        keep = [i for i, n in enumerate(orders) if n > 1]
        self.orders = tuple(orders[i] for i in keep)
        k = len(self.orders)
        g = [[Fraction(gram[i][j]) for j in keep] for i in keep]
        self.modulus = lcm(*self.orders) if k else 1
        m = self.modulus
        self._q = []
        self._b = [[0] * k for _ in range(k)]
        for i in range(k):
            qi = g[i][i] * m
            if qi.denominator != 1:
                raise FormError("q value does not have the right denominator")
            self._q.append(int(qi) % (2 * m))
            for j in range(k):
                if g[i][j] != g[j][i]:
                    raise FormError("Gram matrix is not symmetric")
                bij = g[i][j] * m
                if bij.denominator != 1:
                    raise FormError("b value does not have the right denominator")
                self._b[i][j] = int(bij) % m
        for i in range(k):
            n = self.orders[i]
            # q(n e_i) = n^2 q_ii must vanish in Q/2Z, b(n e_i, e_j) in Q/Z
            if (n * n * self._q[i]) % (2 * m):
                raise FormError(f"q is not well defined on generator {i}")
            for j in range(k):
                if (n * self._b[i][j]) % m:
                    raise FormError(f"b is not well defined on generators {i},{j}")

    # basic data

    @property
    def rank(self):
        return len(self.orders)

    @property
    def order(self):
        return prod(self.orders)

    @property
    def gram(self):
        m = self.modulus
        k = self.rank
        return [[Fraction(self._q[i] if i == j else self._b[i][j], m) for j in range(k)] for i in range(k)]

    def __repr__(self):
        g = self.gram
        return f"FiniteQuadraticForm({list(self.orders)}, {[[str(x) for x in r] for r in g]})"

    def zero(self):
        return (0,) * self.rank

    def elements(self):
        if self.order > ELEMENT_CAP:
            raise FormError(f"group of order {self.order} exceeds the enumeration cap")
        return product(*[range(n) for n in self.orders])

    def add(self, x, y):
        return tuple((a + b) % n for a, b, n in zip(x, y, self.orders))

    def scale(self, x, c):
        return tuple((a * c) % n for a, n in zip(x, self.orders))

    def element_order(self, x):
        o = 1
        for a, n in zip(x, self.orders):
            o = lcm(o, n // gcd(a, n))
        return o

    def q_scaled(self, x):
        m = self.modulus
        k = self.rank
        t = 0
        for i in range(k):
            if x[i]:
                t += x[i] * x[i] * self._q[i]
                for j in range(i + 1, k):
                    if x[j]:
                        t += 2 * x[i] * x[j] * self._b[i][j]
        return t % (2 * m)

    def b_scaled(self, x, y):
        t = 0
        k = len(x)
        for i in range(k):
            if x[i]:
                row = self._b[i]
                for j in range(k):
                    if y[j]:
                        t += x[i] * y[j] * row[j]
        return t % self.modulus

    def q(self, x):
        return Fraction(self.q_scaled(x), self.modulus)

    def b(self, x, y):
        return Fraction(self.b_scaled(x, y), self.modulus)

    # constructions

    def negate(self):
        return FiniteQuadraticForm(self.orders, [[-v for v in r] for r in self.gram])

    def __neg__(self):
        return self.negate()

    def direct_sum(self, other):
        k, l = self.rank, other.rank
        g1, g2 = self.gram, other.gram
        gram = [[Fraction(0)] * (k + l) for _ in range(k + l)]
        for i in range(k):
            for j in range(k):
                gram[i][j] = g1[i][j]
        for i in range(l):
            for j in range(l):
                gram[k + i][k + j] = g2[i][j]
        return FiniteQuadraticForm(self.orders + other.orders, gram)

    def restrict(self, basis, orders):
        """Form on the subgroup with the given basis elements of the given orders."""
        m = self.modulus
        gram = [[Fraction(self.q_scaled(x) if i == j else self.b_scaled(x, y), m)
                 for j, y in enumerate(basis)] for i, x in enumerate(basis)]
        return FiniteQuadraticForm(orders, gram)

    def subgroup(self, gens):
        """(form on <gens>, basis elements)."""
        orders, basis = _quotient_basis(self.orders, list(gens), [])
        return self.restrict(basis, orders), basis

    def quotient(self, num_gens, den_gens):
        """Form on <num>/<den>; den must be isotropic and orthogonal to num."""
        for x in den_gens:
            if self.q_scaled(x):
                raise FormError("quotient by a non-isotropic subgroup")
            for y in num_gens:
                if self.b_scaled(x, y):
                    raise FormError("quotient subgroup is not orthogonal")
        orders, basis = _quotient_basis(self.orders, list(num_gens), list(den_gens))
        return self.restrict(basis, orders)

    def span(self, gens):
        seen = {self.zero()}
        frontier = [self.zero()]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def orthogonal_generators(self, gens):
        """Generators of {x : b(x, g) = 0 for all g}, by solving the congruences."""
        k, m = self.rank, self.modulus
        gens = list(gens)
        if not gens or k == 0:
            return [tuple(1 if r == i else 0 for r in range(k)) for i in range(k)]
        # b(x, g) * m = sum_i x_i c_i (mod m)
        cols = [[sum(self._b[i][j] * g[j] for j in range(k)) % m for i in range(k)] for g in gens]
        rows = [c + [m if t == s else 0 for t in range(len(gens))] for s, c in enumerate(cols)]
        _, _, d, right = small_snf(rows)
        rank = sum(1 for i in range(min(len(rows), k + len(gens))) if d[i][i])
        out = []
        for j in range(rank, k + len(gens)):
            v = tuple(right[i][j] % self.orders[i] for i in range(k))
            if any(v):
                out.append(v)
        return out

    def orthogonal_elements(self, gens):
        return [x for x in self.elements() if all(self.b_scaled(x, g) == 0 for g in gens)]

    def generating_set(self, elements):
        """Small generating set for a subgroup given by all its elements."""
        gens = []
        span = {self.zero()}
        for x in sorted(elements, key=self.element_order, reverse=True):
            if x in span:
                continue
            gens.append(x)
            new = set(span)
            for s in span:
                y = s
                for _ in range(self.element_order(x) - 1):
                    y = self.add(y, x)
                    new.add(y)
            span = new
        return gens

    def is_nondegenerate(self):
        cached = getattr(self, "_nondegenerate", None)
        if cached is None:
            basis = _unit_vectors(self)
            radical = (x for x in self.elements() if all(self.b_scaled(x, e) == 0 for e in basis))
            next(radical)
            cached = next(radical, None) is None
            self._nondegenerate = cached
        return cached

    def primes(self):
        ps = set()
        for n in self.orders:
            ps |= set(factorint(n))
        return sorted(ps)

    def primary_part(self, p):
        """(p-primary form, basis elements in this group)."""
        gens = []
        for i, n in enumerate(self.orders):
            v = 0
            while n % p ** (v + 1) == 0:
                v += 1
            if v:
                c = n // p ** v
                gens.append(tuple(c if r == i else 0 for r in range(self.rank)))
        if not gens:
            return FiniteQuadraticForm([], []), []
        return self.subgroup(gens)

    def p_rank(self, p):
        return sum(1 for n in self.orders if n % p == 0)

    def invariant_factors(self, p):
        """Sorted prime-power orders of the p-part."""
        out = []
        for n in self.orders:
            v = 0
            while n % p == 0:
                n //= p
                v += 1
            if v:
                out.append(p ** v)
        return sorted(out)

    def census(self):
        """Counts of (element order, q value), q given as a reduced fraction pair."""
        cached = getattr(self, "_census", None)
        if cached is not None:
            return cached
        c = {}
        two_m = 2 * self.modulus
        for x in self.elements():
            qs = self.q_scaled(x)
            g = gcd(qs, two_m)
            key = (self.element_order(x), qs // g, two_m // g)
            c[key] = c.get(key, 0) + 1
        self._census = c
        return c


# embeddings and isometries

def _qkey(form, x):
    qs = form.q_scaled(x)
    two_m = 2 * form.modulus
    g = gcd(qs, two_m)
    return form.element_order(x), qs // g, two_m // g


def _candidates(form):
    cached = getattr(form, "_cand", None)
    if cached is None:
        cached = {}
        for y in form.elements():
            cached.setdefault(_qkey(form, y), []).append(y)
        form._cand = cached
    return cached


def _homs(source, target, first=False):
    """Form-preserving maps sending the generators of source into target."""
    k = source.rank
    if k == 0:
        return [()]
    cand = _candidates(target)
    gens = _unit_vectors(source)
    lists = [cand.get(_qkey(source, g), []) for g in gens]
    if any(not l for l in lists):
        return []
    # source b values rewritten over the target modulus
    mt = target.modulus
    bvals = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i):
            v = source.b(gens[i], gens[j]) * mt
            if v.denominator != 1:
                return []
            bvals[i][j] = int(v) % mt
    out = []
    images = []

    def rec(i):
        if i == k:
            out.append(tuple(images))
            return first
        row = bvals[i]
        for y in lists[i]:
            if all(target.b_scaled(y, images[j]) == row[j] for j in range(i)):
                images.append(y)
                if rec(i + 1):
                    return True
                images.pop()
        return False

    rec(0)
    return out


def embeddings(source, target):
    """All injective form-preserving maps, as tuples of generator images."""
    maps = _homs(source, target)
    if source.order > 1 and not source.is_nondegenerate():
        maps = [m for m in maps if len(target.span(list(m))) == source.order]
    return maps


def _isometric_primary(a, b):
    if a.order != b.order:
        return False
    if a.order == 1:
        return True
    if a.census() != b.census():
        return False
    # a generated by its standard basis; any form-preserving map onto b of
    # the right size is bijective once a is nondegenerate
    if a.is_nondegenerate():
        return bool(_homs(a, b, first=True))
    for m in _homs(a, b):
        if len(b.span(list(m))) == b.order:
            return True
    return False


def isometric(a, b):
    if a.order != b.order:
        return False
    primes = sorted(set(a.primes()) | set(b.primes()))
    for p in primes:
        if a.invariant_factors(p) != b.invariant_factors(p):
            return False
    for p in primes:
        ap = a if len(primes) == 1 else a.primary_part(p)[0]
        bp = b if len(primes) == 1 else b.primary_part(p)[0]
        if not _isometric_primary(ap, bp):
            return False
    return True


def orthogonal_complement(sub_gens, form):
    """Form on the orthogonal complement of the nondegenerate subgroup <sub_gens>."""
    sub, _ = form.subgroup(sub_gens)
    if not sub.is_nondegenerate():
        raise FormError("subgroup is degenerate; its complement is not a summand")
    return form.subgroup(form.orthogonal_generators(list(sub_gens)))[0]


def elementary_subspaces(form, p, k):
    """Every subgroup of form[p] isomorphic to (Z/p)^k, once each, as basis lists.

    The p-torsion is a vector space over F_p; subspaces are walked through
    their reduced echelon bases.
    """
    torsion = [i for i, n in enumerate(form.orders) if n % p == 0]
    r = len(torsion)

    def vector(coords):
        x = [0] * form.rank
        for c, i in zip(coords, torsion):
            x[i] = c * (form.orders[i] // p)
        return tuple(x)

    out = []
    for pivots in combinations(range(r), k):
        free = [(row, col) for row, pc in enumerate(pivots)
                for col in range(pc + 1, r) if col not in pivots]
        for values in product(range(p), repeat=len(free)):
            rows = [[0] * r for _ in range(k)]
            for row, pc in enumerate(pivots):
                rows[row][pc] = 1
            for (row, col), v in zip(free, values):
                rows[row][col] = v
            out.append([vector(rw) for rw in rows])
    return out


def _is_elementary_two_sum(sub):
    return sub.order > 1 and set(sub.invariant_factors(2)) == {2} and sub.order == 2 ** sub.rank \
        and all(sub.q_scaled(x) % sub.modulus == 0 for x in _unit_vectors(sub))


def _unit_vectors(form):
    return [tuple(1 if r == i else 0 for r in range(form.rank)) for i in range(form.rank)]


def witt_complement(form, sub):
    """Complement of an embedded copy of ``sub``; checks all embeddings agree.

    For a sum of u(2)/v(2) blocks the images are 2-elementary, so every
    embedding is reached by walking the subspaces of the 2-torsion and
    keeping those isometric to ``sub``; other forms go through the full
    embedding search.
    """
    if _is_elementary_two_sum(sub):
        images = []
        for basis in elementary_subspaces(form, 2, sub.rank):
            restricted = form.restrict(basis, [2] * len(basis))
            if restricted.is_nondegenerate() and isometric(restricted, sub):
                images.append(basis)
    else:
        seen = {}
        for m in embeddings(sub, form):
            seen.setdefault(frozenset(form.span(list(m))), list(m))
        images = list(seen.values())
    if not images:
        raise FormError("no embedding exists")
    first = orthogonal_complement(images[0], form)
    checked = {(first.orders, tuple(map(tuple, first.gram)))}
    for basis in images[1:]:
        comp = orthogonal_complement(basis, form)
        key = (comp.orders, tuple(map(tuple, comp.gram)))
        if key in checked:
            continue
        if not isometric(first, comp):
            raise WittFailure("complements of different embeddings are not isometric")
        checked.add(key)
    return first


# gluing

@dataclass(frozen=True)
class GluingDatum:
    """Isotropic graph subgroup of left + right, given by generators."""

    left: FiniteQuadraticForm
    right: FiniteQuadraticForm
    graph: tuple

    def __post_init__(self):
        s = self.total()
        elems = s.span(list(self.graph))
        for g in self.graph:
            if s.q_scaled(g):
                raise FormError("gluing subgroup is not isotropic")
        k = self.left.rank
        if len({x[:k] for x in elems}) != len(elems) or len({x[k:] for x in elems}) != len(elems):
            raise FormError("gluing subgroup is not the graph of an isomorphism")

    def total(self):
        return self.left.direct_sum(self.right)

    @property
    def order(self):
        return len(self.total().span(list(self.graph)))


def glue(datum):
    s = datum.total()
    gens = list(datum.graph)
    return s.quotient(s.orthogonal_generators(gens), gens)


def _subgroups(form, max_rank=None, elementary_prime=None):
    """Distinct subgroups (as (element set, basis)) of a small form."""
    found = {frozenset([form.zero()]): []}
    frontier = [(frozenset([form.zero()]), [])]
    pool = list(form.elements())
    if elementary_prime:
        pool = [x for x in pool if form.element_order(x) == elementary_prime]
    while frontier:
        nxt = []
        for elems, basis in frontier:
            if max_rank is not None and len(basis) >= max_rank:
                continue
            for x in pool:
                if x in elems:
                    continue
                new = frozenset(form.span(basis + [x]))
                if new not in found:
                    found[new] = basis + [x]
                    nxt.append((new, basis + [x]))
        frontier = nxt
    return found


def enumerate_gluings(left, right, p, elementary=True, max_rank=2):
    """Gluing data along p-subgroups of ``right``.

    With ``elementary`` only p-elementary subgroups of rank <= max_rank are
    used; otherwise every subgroup of the p-part of ``right``.
    """
    rp, rbasis = right.primary_part(p)
    lp, lbasis = left.primary_part(p)
    k = left.rank

    def lift(basis, coords, orders):
        out = [0] * len(orders)
        for c, b in zip(coords, basis):
            for i in range(len(orders)):
                out[i] = (out[i] + c * b[i]) % orders[i]
        return tuple(out)

    if elementary:
        subs = _subgroups(rp, max_rank=max_rank, elementary_prime=p)
    else:
        subs = _subgroups(rp)
    data = [GluingDatum(left, right, ())]
    seen = {frozenset()}
    for elems, basis in subs.items():
        if not basis:
            continue
        h, hb = rp.subgroup(basis)
        neg = h.negate()
        for m in _homs(neg, lp):
            if len(lp.span(list(m))) != h.order:
                continue
            gens = []
            for x, y in zip(m, hb):
                lx = lift(lbasis, x, left.orders)
                ry = lift(rbasis, y, right.orders)
                gens.append(lx + ry)
            s = left.direct_sum(right)
            key = frozenset(s.span(gens))
            if key in seen:
                continue
            seen.add(key)
            data.append(GluingDatum(left, right, tuple(gens)))
    return data


# forms from symbols and symbols from forms

def _non_residue(p):
    return next(a for a in range(2, p) if chi(a, p) == -1)


def form_of_constituent_blocks(cons):
    """List of (orders, gram) blocks for the non-unimodular constituents at one prime."""
    blocks = []
    if not cons:
        return blocks
    p = cons[0].prime
    if p != 2:
        for c in cons:
            if c.scale_exp == 0:
                continue
            q = c.scale
            nr = _non_residue(p)
            for i in range(c.dim):
                # q(x) = u/q with u even; sign of u mod p sets the Legendre class
                want = c.sign if i == 0 else 1
                base = 2 if chi(2, p) == want else 2 * nr
                blocks.append(([q], [[Fraction(base, q)]]))
        return blocks
    st = _TwoAdicState(list(cons))
    signs, totals = st.start()
    odd = {}
    for k, comp in enumerate(st.comps):
        members = [cons[i] for i in comp]
        vec = _distributions(members, [signs[i] for i in comp], totals[k])
        if vec is None:
            raise GenusError("illegal 2-adic compartment")
        for i, t in zip(comp, vec):
            odd[i] = t
    for i, c in enumerate(cons):
        if c.scale_exp == 0:
            continue
        q = c.scale
        if c.is_odd_type:
            for u in odd_diagonal(c.dim, c.sign, odd[i]):
                blocks.append(([q], [[Fraction(u, q)]]))
        else:
            pairs = c.dim // 2
            kinds = ["u"] * pairs
            if c.sign < 0:
                kinds[-1] = "v"
            for kd in kinds:
                d = Fraction(1, q)
                g = [[0, d], [d, 0]] if kd == "u" else [[2 * d, d], [d, 2 * d]]
                blocks.append(([q, q], g))
    return blocks


def from_genus(symbol):
    """Discriminant form of a genus (or fragment) symbol."""
    orders, diag_blocks = [], []
    for p, cons in symbol.local:
        for o, g in form_of_constituent_blocks(list(cons)):
            orders.extend(o)
            diag_blocks.append(g)
    n = len(orders)
    gram = [[Fraction(0)] * n for _ in range(n)]
    at = 0
    for g in diag_blocks:
        for i in range(len(g)):
            for j in range(len(g)):
                gram[at + i][at + j] = Fraction(g[i][j])
        at += len(g)
    return FiniteQuadraticForm(orders, gram)


def _val(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def jordan_constituents(form, p):
    """Non-unimodular p-adic constituents of a finite quadratic form.

    Splits off 1-dimensional blocks <x> with b(x,x) of exact denominator
    ord(x), or 2-dimensional even blocks at p = 2, then recurses on the
    orthogonal complement.
    """
    a, _ = form.primary_part(p)
    blocks = []
    while a.order > 1:
        elems = list(a.elements())
        top = max(a.element_order(x) for x in elems)
        e = _val(top, p)
        chosen = None
        for x in elems:
            if a.element_order(x) != top:
                continue
            bxx = a.b(x, x)
            if bxx.denominator == top:
                chosen = ("d", [x])
                break
        if chosen is None:
            # b(x, -) has order top for any x of top order, so a partner exists
            x = next(x for x in elems if a.element_order(x) == top)
            for y in elems:
                if (a.b(x, y) * top).denominator == 1 and (a.b(x, y) * top).numerator % p:
                    chosen = ("e", [x, y])
                    break
        if chosen is None:
            raise FormError("form is degenerate")
        kind, gens = chosen
        if kind == "d":
            x = gens[0]
            qv = a.q(x) * top  # in Q/2^(e+1)Z for p = 2, Q/pZ otherwise
            if p == 2:
                u = int(qv % (2 * top))
                blocks.append((e, "d", u % 8))
            else:
                bv = int(a.b(x, x) * top) % p
                blocks.append((e, "d", bv))
        else:
            x, y = gens
            qx = a.q(x) * top
            qy = a.q(y) * top
            bxy = a.b(x, y) * top
            # Gram of the 2-dim block scaled by 2^e: [[qx, bxy], [bxy, qy]]
            det = int(qx) * int(qy) - int(bxy) ** 2
            blocks.append((e, "e", det % 8))
        a = orthogonal_complement(gens, a)
    return constituents_from_blocks(blocks, p)


def symbol_of_form(form):
    """Fragment symbol of a finite quadratic form (non-unimodular parts only)."""
    return GenusSymbol({p: jordan_constituents(form, p) for p in form.primes()})
