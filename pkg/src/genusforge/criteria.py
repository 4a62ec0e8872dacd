"""Decision criteria for symplectic actions on the Artin-invariant-one
supersingular K3 surface, phrased on the coinvariant lattice.

Entries are any objects with ``genus`` (a full GenusSymbol of the
coinvariant lattice), ``rank_fixed`` and ``order`` attributes; see
:class:`genusforge.classify.ClassificationEntry`.
"""

from dataclasses import dataclass, field

from sympy import factorint

from .discform import (
    enumerate_gluings,
    from_genus,
    glue,
    isometric,
    jordan_constituents,
    symbol_of_form,
    embeddings,
    witt_complement,
)
from .genus import (
    GenusSymbol,
    Constituent,
    chi,
    exists,
    negate,
    p_length,
    parse_symbol,
    rank_one_symbol,
    with_signature,
)

PASS, FAIL, NA = "pass", "fail", "n/a"


@dataclass(frozen=True)
class Check:
    status: str
    reason: str = ""

    def __bool__(self):
        return self.status != FAIL

    def __str__(self):
        return f"{self.status} {self.reason}".strip()


@dataclass(frozen=True)
class Reason:
    criterion: str
    explanation: str
    anchor: str


@dataclass
class Verdict:
    realized: str
    reasons: list = field(default_factory=list)
    regime: str = None

    def add(self, criterion, explanation, anchor=None):
        self.reasons.append(Reason(criterion, explanation, anchor or criterion))
        return self

    def chain(self):
        return "; ".join(f"{r.criterion}: {r.explanation}" for r in self.reasons)


# characteristic context

def epsilon(p):
    """Sign of the p-adic constituent of the Artin-invariant-one NS lattice."""
    return -chi(-1, p)


def h_fragment(p):
    if p == 2:
        return parse_symbol("2_II^-2")
    return GenusSymbol({p: [Constituent(p, 1, 2, epsilon(p))]})


@dataclass(frozen=True)
class CharacteristicContext:
    p: int
    artin_invariant: int = 1

    def __post_init__(self):
        if self.artin_invariant != 1:
            raise ValueError("only Artin invariant one is supported")
        if len(factorint(self.p)) != 1 or factorint(self.p).get(self.p) != 1:
            raise ValueError(f"{self.p} is not prime")

    @property
    def ns_genus(self):
        return with_signature(h_fragment(self.p), 1, 21)

    @property
    def h_genus(self):
        return with_signature(h_fragment(self.p), 0, 4)

    def h_form(self):
        return from_genus(h_fragment(self.p))

    def consistent(self):
        return bool(exists(self.ns_genus)) and bool(exists(self.h_genus))


# small helpers

def squarefree_part(n):
    s = 1 if n > 0 else -1
    for q, e in factorint(abs(n)).items():
        if e % 2:
            s *= q
    return s


def strip_prime(n, p):
    while n % p == 0:
        n //= p
    return n


def coinvariant_det(e):
    """Signed determinant of the negative definite coinvariant lattice."""
    n = 24 - e.rank_fixed
    return (-1) ** n * e.genus.abs_det()


def det_primes(e):
    return sorted(factorint(e.genus.abs_det()))


def sign_options(cons):
    """Products of signs compatible with a non-unimodular 2-adic part.

    An odd constituent at scale 2 can exchange a sign with the (absent or
    hidden) unimodular part, so both products are possible then.
    """
    prod = 1
    for c in cons:
        prod *= c.sign
    if cons and cons[0].prime == 2 and any(c.is_odd_type and c.scale_exp == 1 for c in cons):
        return {prod, -prod}
    return {prod}


def _legendre_text(d, p):
    return f"({d}/{p})={chi(d, p)}"


def _nonunimodular(s, p):
    return [c for c in s.constituents(p) if c.scale_exp > 0]


# single criteria

def length_criterion(e):
    """Primes where the coinvariant length exceeds rk - 2; size >= 2 excludes."""
    r = e.rank_fixed
    return {p for p in e.genus.primes() if p_length(e.genus, p) > r - 2}


def constituent_criterion(e, p):
    r = e.rank_fixed
    if p_length(e.genus, p) != r:
        return Check(NA, f"l_{p} != {r}")
    high = sum(c.dim for c in e.genus.constituents(p) if c.scale_exp > 1)
    if high > r - 2:
        return Check(FAIL, f"{high} dimensions above scale {p} exceed {r - 2}")
    return Check(PASS, f"{high} dimensions above scale {p}")


def determinant_condition(e, p, p_prime):
    """Determinant condition at p_prime for the complement inside NS."""
    r = e.rank_fixed
    if p_prime == p:
        return Check(NA, "same prime as the characteristic")
    if p_length(e.genus, p_prime) != r - 2 or r - 2 == 0:
        return Check(NA, f"l_{p_prime} != {r - 2}")
    d = strip_prime(-coinvariant_det(e), p_prime)
    comp = negate(e.genus.part(p_prime)).constituents(p_prime)
    options = sign_options(list(comp))
    want = chi(d, p_prime)
    text = f"{_legendre_text(d, p_prime)}, complement signs {sorted(options)}"
    if want in options:
        return Check(PASS, text)
    return Check(FAIL, text)


def tame_conditions(e, p):
    """Order, length, Legendre and determinant tests for rank-4 coinvariant lattices.

    The order test is reported but not enforced when p divides the group
    order and not the determinant; the remaining tests still decide.
    """
    if e.rank_fixed != 4:
        return Verdict("undetermined").add("tame", "needs rank 4 fixed lattice")
    v = Verdict("yes", regime="tame" if e.order % p else "wild, p does not divide det")
    det = e.genus.abs_det()
    if e.order % p:
        v.add("tame-order", f"{p} does not divide |G|")
    else:
        v.add("tame-order", f"{p} divides |G|; using the p-coprime determinant variant")
    if det % p == 0:
        v.realized = "no" if e.order % p else "undetermined"
        v.add("tame-legendre", f"{p} divides det")
        return v
    lengths = {q: p_length(e.genus, q) for q in e.genus.primes()}
    if max(lengths.values(), default=0) > 2:
        v.realized = "no"
        v.add("tame-length", f"length {max(lengths.values())} > 2")
        return v
    v.add("tame-length", "length <= 2")
    sq = squarefree_part(det)
    if chi(det, p) != -1:
        v.realized = "no"
        v.add("tame-legendre", f"({sq}/{p})=1")
        return v
    v.add("tame-legendre", f"({sq}/{p})=-1")
    for q, l in sorted(lengths.items()):
        if l != 2:
            continue
        d = strip_prime(det, q)
        opts = sign_options(_nonunimodular(e.genus, q))
        if chi(-d, q) not in opts:
            v.realized = "no"
            v.add("tame-det", f"at {q}: signs {sorted(opts)} vs ({-d}/{q})={chi(-d, q)}")
            return v
        v.add("tame-det", f"at {q}: ({-d}/{q})={chi(-d, q)} matches")
    return v


def legendre_orbit_condition(lengths, p):
    lengths = tuple(int(x) for x in lengths)
    if len(lengths) != 4 or any(x < 1 for x in lengths) or sum(lengths) != 24:
        raise ValueError("need four positive orbit lengths summing to 24")
    prod = lengths[0] * lengths[1] * lengths[2] * lengths[3]
    if prod % p == 0:
        return Check(NA, f"{p} divides the orbit length product")
    sq = squarefree_part(prod)
    if chi(prod, p) == -1:
        return Check(PASS, f"({sq}/{p})=-1")
    return Check(FAIL, f"({sq}/{p})=1")


# rank 3

@dataclass
class GlueCandidate:
    v2: int
    glues_at: frozenset
    form_glues_at: frozenset
    p: int = None
    realized: bool = False


def _fragment_at(s, p):
    return tuple(c for c in s.constituents(p) if c.scale_exp > 0)


def _p_part(form, p):
    return form.primary_part(p)[0]


def _residual_ok(a_lam, a_v, p):
    target = from_genus(h_fragment(p))
    for d in enumerate_gluings(a_lam, a_v, p, elementary=False):
        if isometric(glue(d), target):
            return True
    return False


def _rank3_candidate(e, v2, a_lam, diagnose=False):
    zv = rank_one_symbol(v2)
    lam_neg = negate(e.genus)
    primes = sorted(set(e.genus.primes()) | set(zv.primes()))
    primes = [q for q in primes if _fragment_at(e.genus, q) or _fragment_at(zv, q)]
    glues = {q for q in primes if _fragment_at(lam_neg, q) == _fragment_at(zv, q)}
    unglued = [q for q in primes if q not in glues]
    if not diagnose and len(unglued) != 1:
        return GlueCandidate(v2, frozenset(glues), frozenset())
    a_v = from_genus(zv)
    fglues = set()
    if diagnose:
        fglues = {q for q in primes if isometric(_p_part(a_lam, q), _p_part(a_v, q).negate())}
    cand = GlueCandidate(v2, frozenset(glues), frozenset(fglues))
    if len(unglued) == 1:
        p = unglued[0]
        if _residual_ok(_p_part(a_lam, p), _p_part(a_v, p), p):
            cand.p = p
            cand.realized = True
    return cand


def rank3_glue_search(e, bound_factor=4):
    """Candidates for v^2 in search order; stops at the first realization."""
    if e.rank_fixed != 3:
        raise ValueError("needs rank 3 fixed lattice")
    det = e.genus.abs_det()
    a_lam = from_genus(e.genus)
    order = [det] + [v for v in range(2, bound_factor * det + 1, 2) if v != det]
    out = []
    for v2 in order:
        cand = _rank3_candidate(e, v2, a_lam, diagnose=v2 == det)
        if v2 == det or cand.realized:
            out.append(cand)
        if cand.realized:
            break
    return out


@dataclass
class Char2Result:
    embeds: bool
    complement: object = None
    complement_symbol: GenusSymbol = None
    v2: int = None
    realized: bool = False


def rank3_char2_analysis(e):
    v2form = from_genus(parse_symbol("2_II^-2"))
    a = from_genus(e.genus)
    if not embeddings(v2form, a):
        return Char2Result(False)
    comp = witt_complement(a, v2form)
    sym = symbol_of_form(comp)
    v2 = comp.order
    target = from_genus(rank_one_symbol(v2)).negate()
    return Char2Result(True, comp, sym, v2, isometric(comp, target))


def rank3_char2_workflow(e):
    res = rank3_char2_analysis(e)
    v = Verdict("no", regime="wild, p = 2")
    if not res.embeds:
        return v.add("char2-embed", "v(2) does not embed into A(coinvariant)")
    v.add("char2-embed", "v(2) embeds; complement unique up to isometry")
    text = f"L' = {res.complement_symbol}, v^2 = {res.v2}"
    if res.realized:
        v.realized = "yes"
        return v.add("char2-glue", text + " glues to <v^2>")
    return v.add("char2-glue", text + " does not glue to <v^2>")


# glue-then-determinant pipeline (rank >= 4)

@dataclass
class GluingOutcome:
    gamma_order: int
    form: object
    ok: bool
    detail: str
    left_isotropic: bool = True


def _det_condition(form_q, q, total_order):
    """Determinant condition at q for the rank-2 hyperbolic complement.

    ``form_q`` is the q-part of the discriminant form of the auxiliary
    lattice; the complement carries its negative and det = -total_order.
    """
    cons = jordan_constituents(form_q.negate(), q)
    d = strip_prime(-total_order, q)
    opts = sign_options(cons)
    want = chi(d, q)
    return want in opts, f"at {q}: ({d}/{q})={want}, signs {sorted(opts)}"


def glue_pipeline(e, p):
    """Glue the coinvariant form to the H-form along every admissible subgroup.

    Only the p-parts interact; the other primary parts pass through.
    """
    r = e.rank_fixed
    ap = from_genus(e.genus.part(p))
    h = CharacteristicContext(p).h_form()
    others = {q: from_genus(e.genus.part(q)) for q in e.genus.primes() if q != p}
    other_order = 1
    for f in others.values():
        other_order *= f.order
    outcomes = []
    for d in enumerate_gluings(ap, h, p):
        lp = glue(d)
        total = lp.order * other_order
        parts = dict(others)
        parts[p] = lp
        ok, details = True, []
        for q in sorted(parts):
            l = parts[q].p_rank(q)
            if l > r - 2:
                ok = False
                details.append(f"length {l} at {q} exceeds {r - 2}")
                break
            if l == r - 2 == 2:
                good, text = _det_condition(parts[q], q, total)
                details.append(text)
                if not good:
                    ok = False
                    break
        left_iso = all(ap.q_scaled(g[:ap.rank]) == 0 for g in d.graph)
        outcomes.append(GluingOutcome(d.order, lp, ok, "; ".join(details), left_iso))
    return outcomes


def wild_rank4_reasons(e, p):
    """Run the pipeline; excluded iff every gluing fails."""
    if e.rank_fixed != 4:
        raise ValueError("needs rank 4 fixed lattice")
    outcomes = glue_pipeline(e, p)
    v = Verdict("undetermined", regime="wild")
    if any(o.ok for o in outcomes):
        good = [o for o in outcomes if o.ok]
        return v.add("pipeline", f"{len(good)} of {len(outcomes)} gluings survive")
    v.realized = "no"
    nontrivial = [o for o in outcomes if o.gamma_order > 1]
    if not nontrivial:
        return v.add("**", "no nontrivial glue with H; length too large")
    v2form = from_genus(parse_symbol("2_II^-2"))
    if p == 2 and not embeddings(v2form, from_genus(e.genus)):
        return v.add("*", "v(2) does not embed; every partial glue fails the determinant condition")
    if p == 3 and all(not o.left_isotropic for o in nontrivial):
        return v.add("***", "only non-isotropic 3-torsion glues; determinant condition fails")
    return v.add("pipeline", "every gluing fails: " + " | ".join(o.detail for o in outcomes))
