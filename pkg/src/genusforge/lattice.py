"""Exact integer linear algebra on Gram matrices.

Everything here works with Python ints and Fractions. Lattices are given
by their Gram matrix only; the standard root lattices are negative
definite unless ``negative=False`` is passed.
"""

from dataclasses import dataclass
from fractions import Fraction

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp


class LatticeError(ValueError):
    pass


def _as_rows(entries):
    return tuple(tuple(int(x) for x in row) for row in entries)


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric nondegenerate integer matrix.

    Even diagonals are required unless ``allow_odd`` is set, which is only
    meant for building oracle examples.
    """

    entries: tuple
    allow_odd: bool = False

    def __post_init__(self):
        rows = _as_rows(self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if n == 0:
            raise LatticeError("empty Gram matrix")
        for row in rows:
            if len(row) != n:
                raise LatticeError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise LatticeError(f"not symmetric at ({i},{j})")
        if not self.allow_odd:
            for i in range(n):
                if rows[i][i] % 2:
                    raise LatticeError(f"odd diagonal entry {rows[i][i]} at {i}")
        if _bareiss_det(rows) == 0:
            raise LatticeError("degenerate Gram matrix")

    @property
    def dim(self):
        return len(self.entries)

    @property
    def is_even(self):
        return all(self.entries[i][i] % 2 == 0 for i in range(self.dim))

    def __repr__(self):
        return f"GramMatrix({[list(r) for r in self.entries]})"


def _bareiss_det(rows):
    a = [list(r) for r in rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def determinant(g):
    return _bareiss_det(g.entries)


def signature(g):
    """Return (n_plus, n_minus) by symmetric elimination over Q."""
    a = [[Fraction(x) for x in row] for row in g.entries]
    n = len(a)
    plus = minus = 0
    live = list(range(n))
    while live:
        i = live[0]
        if a[i][i] == 0:
            j = next((j for j in live[1:] if a[j][j] != 0), None)
            if j is not None:
                live.remove(j)
                live.insert(0, j)
                i = j
            else:
                j = next((j for j in live[1:] if a[i][j] != 0), None)
                if j is None:
                    raise LatticeError("degenerate matrix")
                # e_i <- e_i + e_j makes the pivot 2 a_ij
                for k in range(n):
                    a[i][k] += a[j][k]
                for k in range(n):
                    a[k][i] += a[k][j]
        piv = a[i][i]
        if piv > 0:
            plus += 1
        else:
            minus += 1
        live.remove(i)
        for k in live:
            c = a[k][i] / piv
            if c:
                for m in live:
                    a[k][m] -= c * a[i][m]
    return plus, minus


@dataclass(frozen=True)
class SnfDecomposition:
    """left * M * right == diag with a divisibility chain on the diagonal."""

    left: tuple
    diag: tuple
    right: tuple

    def invariant_factors(self):
        n = min(len(self.diag), len(self.diag[0]) if self.diag else 0)
        return tuple(abs(self.diag[i][i]) for i in range(n))


def smith_normal_form(m):
    """Smith normal form with unimodular transforms.

    The reduction itself is delegated to sympy.
    """
    rows = _as_rows(m.entries if isinstance(m, GramMatrix) else m)
    mat = Matrix(rows)
    diag, left, right = smith_normal_decomp(mat)
    tolist = lambda x: tuple(tuple(int(v) for v in r) for r in x.tolist())
    return SnfDecomposition(tolist(left), tolist(diag), tolist(right))


def direct_sum(a, b):
    n, m = a.dim, b.dim
    rows = [list(r) + [0] * m for r in a.entries]
    rows += [[0] * n + list(r) for r in b.entries]
    return GramMatrix(rows, allow_odd=a.allow_odd or b.allow_odd)


def rescale(a, k):
    if k == 0:
        raise LatticeError("cannot rescale by zero")
    return GramMatrix([[k * x for x in r] for r in a.entries], allow_odd=a.allow_odd)


def discriminant_form(g):
    """Discriminant form of an even lattice, read off from the SNF."""
    from .discform import FiniteQuadraticForm

    if not g.is_even:
        raise LatticeError("discriminant quadratic form needs an even lattice")
    snf = smith_normal_form(g)
    n = g.dim
    gens, orders = [], []
    for i in range(n):
        d = snf.diag[i][i]
        if abs(d) == 1:
            continue
        # R e_i / d lies in the dual and has order |d| modulo the lattice
        gens.append([Fraction(snf.right[k][i], d) for k in range(n)])
        orders.append(abs(d))
    G = g.entries
    gram = []
    for x in gens:
        gx = [sum(G[r][c] * x[c] for c in range(n)) for r in range(n)]
        gram.append([sum(y[r] * gx[r] for r in range(n)) for y in gens])
    return FiniteQuadraticForm(orders, gram)


# constructors

def _signed(rows, negative):
    s = -1 if negative else 1
    return GramMatrix([[s * x for x in r] for r in rows])


def hyperbolic_plane(k=1):
    """U(k). Negation gives an isometric lattice, so no sign flag."""
    return GramMatrix([[0, k], [k, 0]])


def rank_one(m, negative=True):
    if m == 0:
        raise LatticeError("<0> is degenerate")
    return GramMatrix([[-m if negative else m]])


def root_lattice_a(n, negative=True):
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 2
        if i + 1 < n:
            rows[i][i + 1] = rows[i + 1][i] = -1
    return _signed(rows, negative)


def root_lattice_d(n, negative=True):
    if n < 3:
        raise LatticeError("D_n needs n >= 3")
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 2
    for i in range(n - 2):
        rows[i][i + 1] = rows[i + 1][i] = -1
    rows[n - 3][n - 1] = rows[n - 1][n - 3] = -1
    return _signed(rows, negative)


def root_lattice_e(n, negative=True):
    if n not in (6, 7, 8):
        raise LatticeError("E_n needs n in 6, 7, 8")
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 2
    # chain 0-1-...-(n-2), branch node n-1 hangs off node 2
    for i in range(n - 2):
        rows[i][i + 1] = rows[i + 1][i] = -1
    rows[2][n - 1] = rows[n - 1][2] = -1
    return _signed(rows, negative)
