"""Conway-Sloane genus symbols.

A symbol records the signature (when known) and, for each relevant prime,
the Jordan constituents ``q^{eps n}`` with an oddity or the type-II marker
at p = 2.  Symbols written without an ``II_{a,b}`` prefix are treated as
fragments: only the non-unimodular constituents are known and global
checks are skipped.
"""

import re
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import prod

from sympy import factorint, legendre_symbol

from .lattice import GramMatrix, determinant, signature as _signature

TYPE_II = "II"


class GenusError(ValueError):
    pass


class IllegalSymbol(GenusError):
    """Raised for 2-adic data that no diagonal form realizes."""

    def __init__(self, message, constituents=()):
        super().__init__(message)
        self.constituents = tuple(constituents)


def chi(d, p):
    """Legendre symbol for odd p; for p = 2 the +-1 mod 8 square-class test."""
    d = int(d)
    if p == 2:
        if d % 2 == 0:
            raise GenusError(f"{d} is not a 2-adic unit")
        return 1 if d % 8 in (1, 7) else -1
    r = d % p
    if r == 0:
        raise GenusError(f"{d} is not a {p}-adic unit")
    return int(legendre_symbol(r, p))


def _valuation(n, p):
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _prime_power(n):
    f = factorint(n)
    if len(f) != 1:
        raise GenusError(f"scale {n} is not a prime power")
    (p, e), = f.items()
    return p, e


@dataclass(frozen=True, order=True)
class Constituent:
    prime: int
    scale_exp: int
    dim: int
    sign: int
    oddity: object = None

    def __post_init__(self):
        if self.dim < 1:
            raise GenusError("constituent dimension must be positive")
        if self.sign not in (1, -1):
            raise GenusError("sign must be +1 or -1")
        if self.scale_exp < 0:
            raise GenusError("negative scale exponent")
        if self.prime == 2:
            if self.oddity == TYPE_II:
                if self.dim % 2:
                    raise GenusError("type II constituent needs even dimension")
            elif isinstance(self.oddity, int):
                object.__setattr__(self, "oddity", self.oddity % 8)
                if (self.oddity - self.dim) % 2:
                    raise GenusError("oddity and dimension have different parity")
            else:
                raise GenusError("2-adic constituent needs an oddity or II")
        elif self.oddity is not None:
            raise GenusError("odd primes carry no oddity")

    @property
    def scale(self):
        return self.prime ** self.scale_exp

    @property
    def is_odd_type(self):
        return self.prime == 2 and self.oddity != TYPE_II

    def legal(self):
        """Per-constituent realizability (ignores oddity fusion)."""
        if not self.is_odd_type:
            return True
        return (self.oddity, self.sign) in legal_odd_pairs(self.dim)

    def __str__(self):
        s = "+" if self.sign > 0 else "-"
        if self.prime == 2:
            return f"{self.scale}_{self.oddity}^{s}{self.dim}"
        return f"{self.scale}^{s}{self.dim}"


@lru_cache(maxsize=None)
def _odd_diagonals(n):
    """Map (oddity, sign) -> one multiset of units in {1,3,5,7} realizing it."""
    out = {}
    for c1 in range(n + 1):
        for c3 in range(n + 1 - c1):
            for c5 in range(n + 1 - c1 - c3):
                c7 = n - c1 - c3 - c5
                key = ((c1 + 3 * c3 + 5 * c5 + 7 * c7) % 8, (-1) ** (c3 + c5))
                out.setdefault(key, (1,) * c1 + (3,) * c3 + (5,) * c5 + (7,) * c7)
    return out


def legal_odd_pairs(n):
    return frozenset(_odd_diagonals(n))


def odd_diagonal(n, sign, oddity):
    """Units realizing an odd 2-adic constituent, or None when illegal."""
    return _odd_diagonals(n).get((oddity % 8, sign))


@dataclass(frozen=True)
class GenusSymbol:
    """Genus symbol; ``signature`` is None for fragments."""

    local: tuple
    signature: tuple = None
    even: bool = True

    def __post_init__(self):
        loc = {}
        for p, cons in (self.local.items() if isinstance(self.local, dict) else self.local):
            cons = tuple(sorted(cons, key=lambda c: c.scale_exp))
            if not cons:
                continue
            for c in cons:
                if c.prime != p:
                    raise GenusError("constituent filed under the wrong prime")
            exps = [c.scale_exp for c in cons]
            if len(set(exps)) != len(exps):
                raise GenusError(f"repeated scale at p={p}")
            loc[p] = cons
        object.__setattr__(self, "local", tuple(sorted(loc.items())))
        if self.signature is not None:
            a, b = self.signature
            object.__setattr__(self, "signature", (int(a), int(b)))
            n = a + b
            for p, cons in self.local:
                if sum(c.dim for c in cons) != n:
                    raise GenusError(f"dimensions at p={p} do not add up to the rank {n}")

    @property
    def sig_plus(self):
        return self.signature[0] if self.signature else None

    @property
    def sig_minus(self):
        return self.signature[1] if self.signature else None

    @property
    def per_prime(self):
        return dict(self.local)

    @property
    def is_fragment(self):
        return self.signature is None

    @property
    def rank(self):
        if self.signature:
            return sum(self.signature)
        return None

    def primes(self):
        return [p for p, _ in self.local]

    def constituents(self, p):
        return self.per_prime.get(p, ())

    def abs_det(self):
        return prod(c.scale ** c.dim for _, cons in self.local for c in cons)

    def det(self):
        if self.signature is None:
            raise GenusError("fragment has no determinant sign")
        return (-1) ** self.signature[1] * self.abs_det()

    def fragment(self):
        """Drop the signature and all unimodular constituents."""
        loc = {p: tuple(c for c in cons if c.scale_exp > 0) for p, cons in self.local}
        return GenusSymbol(loc)

    def part(self, p):
        """Fragment holding only the non-unimodular constituents at p."""
        return GenusSymbol({p: tuple(c for c in self.constituents(p) if c.scale_exp > 0)})

    def __str__(self):
        return print_symbol(self)


# parsing and printing

_PREFIX = re.compile(r"^(II|I)_\{?(\d+),(\d+)\}?$")
_TOKEN = re.compile(r"^(\d+)(?:_\{?(II|[0-7])\}?)?\^\{?([+\-−])(\d+)\}?$")


def parse_symbol(text, signature=None, even=True):
    """Parse e.g. ``"II_{1,21} 2_II^-2"`` or ``"4_5^-1 8_1^+1 3^+1"``."""
    tokens = text.replace("−", "-").split()
    if tokens:
        m = _PREFIX.match(tokens[0])
        if m:
            if signature is not None:
                raise GenusError("signature given twice")
            even = m.group(1) == "II"
            signature = (int(m.group(2)), int(m.group(3)))
            tokens = tokens[1:]
    loc = {}
    for tok in tokens:
        m = _TOKEN.match(tok)
        if not m:
            raise GenusError(f"malformed constituent {tok!r}")
        scale, odd, s, dim = m.groups()
        scale = int(scale)
        if scale == 1:
            raise GenusError("write unimodular parts through the signature prefix")
        p, e = _prime_power(scale)
        if p == 2:
            if odd is None:
                raise GenusError(f"2-adic constituent {tok!r} needs an oddity or II")
            oddity = TYPE_II if odd == TYPE_II else int(odd)
        else:
            if odd is not None:
                raise GenusError(f"odd prime constituent {tok!r} cannot carry an oddity")
            oddity = None
        c = Constituent(p, e, int(dim), 1 if s == "+" else -1, oddity)
        if any(x.scale_exp == e for x in loc.get(p, [])):
            raise GenusError(f"scale {scale} appears twice")
        loc.setdefault(p, []).append(c)
    frag = GenusSymbol(loc)
    if signature is None:
        return frag
    return with_signature(frag, signature[0], signature[1], even=even)


def print_symbol(s):
    parts = []
    if s.signature is not None:
        parts.append(f"{'II' if s.even else 'I'}_{{{s.signature[0]},{s.signature[1]}}}")
    for p, cons in s.local:
        for c in cons:
            if c.scale_exp == 0 and s.signature is not None:
                continue
            parts.append(str(c))
    return " ".join(parts)


def _unit_part(d, p):
    v = _valuation(d, p)
    return d // p ** v


def with_signature(frag, plus, minus, even=True):
    """Complete a fragment with the unimodular constituents forced by rank and det."""
    n = plus + minus
    cons = {p: [c for c in cs if c.scale_exp > 0] for p, cs in frag.local}
    det = (-1) ** minus * frag.abs_det()
    primes = sorted(set(cons) | ({2} if n else set()))
    loc = {}
    for p in primes:
        cs = cons.get(p, [])
        rest = n - sum(c.dim for c in cs)
        if rest < 0:
            raise GenusError(f"constituents at p={p} exceed the rank {n}")
        sign0 = chi(_unit_part(det, p), p)
        for c in cs:
            sign0 *= c.sign
        if rest == 0:
            if sign0 != 1:
                raise GenusError(f"determinant incompatible with the signs at p={p}")
            loc[p] = cs
            continue
        if p != 2:
            loc[p] = [Constituent(p, 0, rest, sign0)] + cs
        elif even:
            if rest % 2:
                raise GenusError("even lattice needs an even-dimensional unimodular 2-adic part")
            loc[p] = [Constituent(2, 0, rest, sign0, TYPE_II)] + cs
        else:
            loc[p] = cs  # placeholder, oddity fixed below
    sym = GenusSymbol(loc, (plus, minus), even)
    if not even and n:
        cs = cons.get(2, [])
        rest = n - sum(c.dim for c in cs)
        if rest:
            sign0 = chi(_unit_part(det, 2), 2)
            for c in cs:
                sign0 *= c.sign
            partial = GenusSymbol({q: v for q, v in loc.items() if q != 2})
            target = (plus - minus) + sum(p_excess(partial, q) for q in partial.primes())
            t0 = (target - _oddity_of(cs)) % 8
            loc[2] = [Constituent(2, 0, rest, sign0, t0)] + cs
            sym = GenusSymbol(loc, (plus, minus), even)
    return sym


# invariants

def p_excess(s, p):
    if p == 2:
        raise GenusError("p-excess is defined for odd p")
    total = 0
    for c in s.constituents(p):
        total += c.dim * (c.scale - 1)
        if c.sign < 0 and c.scale_exp % 2:
            total += 4
    return total % 8


def _oddity_of(cons):
    total = 0
    for c in cons:
        if c.is_odd_type:
            total += c.oddity
        if c.sign < 0 and c.scale_exp % 2:
            total += 4
    return total % 8


def oddity(s):
    return _oddity_of(s.constituents(2))


def p_length(s, p):
    return sum(c.dim for c in s.constituents(p) if c.scale_exp > 0)


def negate(s):
    loc = {}
    for p, cons in s.local:
        new = []
        for c in cons:
            if p == 2:
                odd = c.oddity if c.oddity == TYPE_II else (-c.oddity) % 8
                new.append(replace(c, oddity=odd))
            else:
                new.append(replace(c, sign=c.sign * chi(-1, p) ** c.dim))
        loc[p] = new
    sig = None if s.signature is None else (s.signature[1], s.signature[0])
    return GenusSymbol(loc, sig, s.even)


# 2-adic compartments and sign walking

def compartments(cons):
    """Index runs of consecutive-scale odd constituents."""
    out, cur = [], []
    for i, c in enumerate(cons):
        if c.is_odd_type and cur and cons[cur[-1]].scale_exp + 1 == c.scale_exp:
            cur.append(i)
        elif c.is_odd_type:
            if cur:
                out.append(cur)
            cur = [i]
        else:
            if cur:
                out.append(cur)
            cur = []
    if cur:
        out.append(cur)
    return out


def trains(cons):
    """Index runs joined by sign-walk moves (see ``_walk_moves``)."""
    if not cons:
        return []
    out = [[0]]
    for i in range(1, len(cons)):
        a, b = cons[i - 1], cons[i]
        gap = b.scale_exp - a.scale_exp
        linked = (gap == 1 and (a.is_odd_type or b.is_odd_type)) or (
            gap == 2 and a.is_odd_type and b.is_odd_type)
        if linked:
            out[-1].append(i)
        else:
            out.append([i])
    return out


def _distributions(members, signs, total):
    """Lexicographically least oddity vector for a compartment, or None."""
    options = [sorted(t for (t, s) in legal_odd_pairs(m.dim) if s == sg)
               for m, sg in zip(members, signs)]
    # reachable[i] = sums achievable by members i..end
    reach = [set() for _ in range(len(members) + 1)]
    reach[-1] = {0}
    for i in range(len(members) - 1, -1, -1):
        reach[i] = {(t + r) % 8 for t in options[i] for r in reach[i + 1]}
    if total % 8 not in reach[0]:
        return None
    vec, need = [], total % 8
    for i in range(len(members)):
        for t in options[i]:
            if (need - t) % 8 in reach[i + 1]:
                vec.append(t)
                need = (need - t) % 8
                break
    return tuple(vec)


class _TwoAdicState:
    def __init__(self, cons):
        self.cons = list(cons)
        self.comps = compartments(self.cons)
        self.comp_of = {}
        for k, comp in enumerate(self.comps):
            for i in comp:
                self.comp_of[i] = k

    def start(self):
        signs = tuple(c.sign for c in self.cons)
        totals = tuple(sum(self.cons[i].oddity for i in comp) % 8 for comp in self.comps)
        return signs, totals

    def legal(self, state):
        signs, totals = state
        for k, comp in enumerate(self.comps):
            members = [self.cons[i] for i in comp]
            if _distributions(members, [signs[i] for i in comp], totals[k]) is None:
                return False
        return True

    def moves(self, state):
        signs, totals = state
        cons = self.cons
        for i in range(len(cons) - 1):
            a, b = cons[i], cons[i + 1]
            gap = b.scale_exp - a.scale_exp
            bumps = []
            if gap == 1 and (a.is_odd_type or b.is_odd_type):
                bumps = [self.comp_of[i if a.is_odd_type else i + 1]]
            elif gap == 2 and a.is_odd_type and b.is_odd_type:
                bumps = [self.comp_of[i], self.comp_of[i + 1]]
            else:
                continue
            s = list(signs)
            s[i], s[i + 1] = -s[i], -s[i + 1]
            t = list(totals)
            for k in bumps:
                t[k] = (t[k] + 4) % 8
            yield tuple(s), tuple(t)

    def build(self, state):
        signs, totals = state
        out = []
        odd = {}
        for k, comp in enumerate(self.comps):
            members = [self.cons[i] for i in comp]
            vec = _distributions(members, [signs[i] for i in comp], totals[k])
            for i, t in zip(comp, vec):
                odd[i] = t
        for i, c in enumerate(self.cons):
            out.append(replace(c, sign=signs[i], oddity=odd.get(i, c.oddity)))
        return out


def _key(state):
    signs, totals = state
    return (sum(1 for s in signs if s < 0), tuple(0 if s < 0 else 1 for s in signs), totals)


def move_closure(s):
    """All 2-adic spellings reachable by oddity fusion and sign walking."""
    cons = s.constituents(2)
    st = _TwoAdicState(cons)
    start = st.start()
    if not st.legal(start):
        bad = [cons[i] for comp in st.comps for i in comp]
        raise IllegalSymbol("illegal 2-adic compartment", bad)
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nxt in st.moves(cur):
            if nxt not in seen and st.legal(nxt):
                seen.add(nxt)
                queue.append(nxt)
    return st, seen


def canonicalize_2adic(s):
    if 2 not in s.per_prime:
        return s
    st, states = move_closure(s)
    best = min(states, key=_key)
    loc = dict(s.local)
    loc[2] = st.build(best)
    return GenusSymbol(loc, s.signature, s.even)


def two_adic_equivalent(a, b):
    """Same 2-adic class after canonicalization (scales and dims must agree)."""
    ca, cb = canonicalize_2adic(a), canonicalize_2adic(b)
    return ca.constituents(2) == cb.constituents(2)


def check_legal(s):
    """Raise IllegalSymbol unless every 2-adic compartment is realizable."""
    cons = s.constituents(2)
    st = _TwoAdicState(cons)
    signs, totals = st.start()
    for k, comp in enumerate(st.comps):
        members = [cons[i] for i in comp]
        if _distributions(members, [signs[i] for i in comp], totals[k]) is None:
            raise IllegalSymbol("no diagonal form realizes " + " ".join(map(str, members)), members)


@dataclass
class Existence:
    ok: bool
    reasons: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def exists(s):
    """Local legality plus, for full symbols, the global conditions."""
    check_legal(s)
    if s.signature is None:
        return Existence(True, ["fragment: global conditions not checked"])
    reasons = []
    det = s.det()
    for p, cons in s.local:
        prodsign = 1
        for c in cons:
            prodsign *= c.sign
        if prodsign != chi(_unit_part(det, p), p):
            reasons.append(f"signs at p={p} disagree with the determinant")
    if s.even:
        for c in s.constituents(2):
            if c.scale_exp == 0 and c.is_odd_type:
                reasons.append("even lattice with odd unimodular 2-adic part")
    if s.rank and 2 not in s.per_prime:
        reasons.append("missing 2-adic data")
    lhs = (s.signature[0] - s.signature[1]) + sum(p_excess(s, p) for p in s.primes() if p != 2)
    if (lhs - oddity(s)) % 8:
        reasons.append(f"oddity formula fails: signature + excesses = {lhs % 8}, oddity = {oddity(s)}")
    if reasons:
        return Existence(False, reasons)
    return Existence(True, ["signature, excess and oddity balance modulo 8"])


# Jordan decomposition of an integral Gram matrix

def _fval(x, p):
    return _valuation(x.numerator, p) - _valuation(x.denominator, p)


def _funit(x, p, mod):
    num = x.numerator // p ** _valuation(x.numerator, p)
    den = x.denominator // p ** _valuation(x.denominator, p)
    return (num * pow(den, -1, mod)) % mod


def local_jordan(entries, p):
    """Split a symmetric rational matrix into p-adic Jordan blocks.

    Returns (exponent, kind, data) triples; kind 'd' carries the unit of a
    1x1 block, kind 'e' the unit determinant of an even 2x2 block (p = 2).
    """
    a = [[Fraction(x) for x in row] for row in entries]
    n = len(a)
    live = list(range(n))
    blocks = []
    mod = 8 if p == 2 else p
    while live:
        best = None
        for i in live:
            for j in live:
                if j < i or a[i][j] == 0:
                    continue
                v = _fval(a[i][j], p)
                # prefer diagonal pivots at equal valuation
                key = (v, 0 if i == j else 1)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            raise GenusError("degenerate form")
        (v, off), i, j = best
        if off and p != 2:
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            off = 0
        if not off:
            piv = a[i][i]
            blocks.append((_fval(piv, p), "d", _funit(piv, p, mod)))
            live.remove(i)
            for k in live:
                c = a[k][i] / piv
                if c:
                    for m in live:
                        a[k][m] -= c * a[i][m]
                    a[k][i] = Fraction(0)
            for k in live:
                a[i][k] = a[k][i] = Fraction(0)
            continue
        x, y, z = a[i][i], a[i][j], a[j][j]
        det = x * z - y * y
        blocks.append((v, "e", _funit(det, p, 8)))
        live.remove(i)
        live.remove(j)
        for k in live:
            u, w = a[k][i], a[k][j]
            # coefficients of e_i, e_j in the projection of e_k
            ci = (u * z - w * y) / det
            cj = (w * x - u * y) / det
            if ci or cj:
                for m in live:
                    a[k][m] -= ci * a[i][m] + cj * a[j][m]
        for k in range(n):
            if k not in (i, j):
                a[k][i] = a[k][j] = a[i][k] = a[j][k] = Fraction(0)
    return blocks


def constituents_from_blocks(blocks, p):
    by_exp = {}
    for v, kind, data in blocks:
        by_exp.setdefault(v, []).append((kind, data))
    out = []
    for v in sorted(by_exp):
        items = by_exp[v]
        dim = sum(1 if k == "d" else 2 for k, _ in items)
        sign = 1
        for k, d in items:
            sign *= chi(d, p)
        if p == 2:
            units = [d for k, d in items if k == "d"]
            odd = sum(units) % 8 if units else TYPE_II
            out.append(Constituent(2, v, dim, sign, odd))
        else:
            out.append(Constituent(p, v, dim, sign))
    return out


def symbol_from_gram(g):
    if not isinstance(g, GramMatrix):
        g = GramMatrix(g)
    d = determinant(g)
    primes = sorted(set(factorint(abs(d))) | {2})
    loc = {}
    for p in primes:
        loc[p] = constituents_from_blocks(local_jordan(g.entries, p), p)
    return GenusSymbol(loc, _signature(g), g.is_even)


def rank_one_symbol(m):
    """Symbol of <m> without matrix work."""
    return symbol_from_gram(GramMatrix([[m]], allow_odd=True))
