"""Chevalley-Eilenberg cochains of the commutator Lie algebra, the Pi map
and the KV extension problem with its obstruction.

Sign convention: (d w)(a_1..a_{q+1}) = sum_{i<j} (-1)^{i+j+1} w([a_i,a_j], ...),
so (d w)(a, b) = w([a, b]) in degree 1.  With this sign the cyclic sum of
the KV boundary of a 2-chain equals 2 d Pi of it.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .algebra import KVAlgebra, Verdict, is_kv, lie_algebra, trivial_module
from .complex import Chain, KVComplex, tuple_index
from .linalg import Echelon, Matrix, kernel_basis, solve

__all__ = ["CECochain", "ce_boundary", "ce_matrix", "pi_map", "cyclic_identity_check",
           "ObstructionReport", "obstruction", "kv_extension", "ExtensionResult",
           "cocycle_basis"]


def _perm_sign(t):
    """Sign sorting t, or 0 with a repeated entry; returns (sign, sorted tuple)."""
    t = list(t)
    if len(set(t)) != len(t):
        return 0, None
    sign = 1
    for i in range(len(t)):
        for j in range(len(t) - 1 - i):
            if t[j] > t[j + 1]:
                t[j], t[j + 1] = t[j + 1], t[j]
                sign = -sign
    return sign, tuple(t)


class CECochain:
    """Alternating q-form on the Lie algebra, stored on increasing index tuples."""

    __slots__ = ("L", "q", "coeffs")

    def __init__(self, L, q, coeffs=None):
        self.L, self.q = L, q
        self.coeffs = {tuple(k): v for k, v in (coeffs or {}).items() if v}
        for k in self.coeffs:
            if list(k) != sorted(set(k)) or len(k) != q:
                raise ValueError("coefficients must sit on strictly increasing tuples")

    @classmethod
    def from_tensor(cls, L, q, values):
        """From values on all ordered tuples; rejects non-alternating input."""
        c = {}
        for t, v in values.items():
            s, k = _perm_sign(t)
            if s == 0:
                if v:
                    raise ValueError("non-alternating input: nonzero on a repeated index")
                continue
            if k in c and c[k] != s * v:
                raise ValueError(f"non-alternating input at {t}")
            c[k] = s * v
        return cls(L, q, c)

    def on_basis(self, t):
        s, k = _perm_sign(t)
        if s == 0:
            return Fraction(0)
        return s * self.coeffs.get(k, Fraction(0))

    def __call__(self, *args):
        total = Fraction(0)
        for t in product(range(self.L.dim), repeat=self.q):
            x = self.on_basis(t)
            for slot, i in enumerate(t):
                if not x:
                    break
                x = x * args[slot][i]
            total += x
        return total

    def vector(self, index):
        return {index[k]: v for k, v in self.coeffs.items()}

    def __add__(self, other):
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0) + v
        return CECochain(self.L, self.q, c)

    def scale(self, s):
        return CECochain(self.L, self.q, {k: s * v for k, v in self.coeffs.items()})

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, CECochain) and self.q == other.q and self.coeffs == other.coeffs

    def __repr__(self):
        return f"CECochain(q={self.q}, nnz={len(self.coeffs)})"


def _alt_basis(n, q):
    return list(combinations(range(n), q))


def ce_boundary(w):
    """Coboundary of an alternating q-cochain with trivial coefficients."""
    L, q = w.L, w.q
    n = L.dim
    if q == 0:
        return CECochain(L, 1, {})
    br = L.sparse
    out = {}
    for t in _alt_basis(n, q + 1):
        total = Fraction(0)
        for i, j in combinations(range(q + 1), 2):
            rest = t[:i] + t[i + 1:j] + t[j + 1:]
            sign = (-1) ** (i + j + 1)
            for k, c in br.get((t[i], t[j]), ()):
                total += sign * c * w.on_basis((k,) + rest)
        if total:
            out[t] = total
    return CECochain(L, q + 1, out)


def ce_matrix(L, q):
    """Matrix of the coboundary Lambda^q -> Lambda^{q+1} in increasing-tuple bases."""
    src = _alt_basis(L.dim, q)
    tgt = _alt_basis(L.dim, q + 1)
    tindex = {t: i for i, t in enumerate(tgt)}
    cols = []
    for k in src:
        img = ce_boundary(CECochain(L, q, {k: Fraction(1)}))
        cols.append({tindex[t]: v for t, v in img.coeffs.items()})
    return Matrix.from_columns(cols, len(tgt), L.field)


def pi_map(theta, L=None):
    """(Pi theta)(a, b) = (theta(a, b) - theta(b, a)) / 2 for an F-valued 2-chain."""
    A = theta.A
    if theta.q != 2 or theta.W.dim != 1:
        raise ValueError("Pi needs a 2-chain with values in the trivial module")
    L = L or lie_algebra(A, check=False)
    n = A.dim
    c = {}
    for i, j in combinations(range(n), 2):
        v = (theta.value_on_basis((i, j))[0] - theta.value_on_basis((j, i))[0]) / 2
        if v:
            c[(i, j)] = v
    return CECochain(L, 2, c)


def cyclic_identity_check(theta, complex_=None):
    """Cyclic sum of (delta theta) against 2 d(Pi theta) on every basis triple."""
    A = theta.A
    L = lie_algebra(A, check=False)
    cx = complex_ or KVComplex(A, theta.W)
    d = Chain(A, theta.W, 3, cx.apply(2, theta.coeffs))
    rhs = ce_boundary(pi_map(theta, L))
    n = A.dim
    for t in product(range(n), repeat=3):
        a, b, c = t
        cyc = d.value_on_basis((a, b, c))[0] + d.value_on_basis((b, c, a))[0] \
            + d.value_on_basis((c, a, b))[0]
        if cyc != 2 * rhs.on_basis(t):
            return Verdict("cyclic_identity", False, tuple(A.labels[i] for i in t),
                           {"cyclic": cyc, "2dPi": 2 * rhs.on_basis(t)})
    return Verdict("cyclic_identity", True)


@dataclass
class ObstructionReport:
    dim_H2_kv: int
    dim_H2_ce: int
    pi_matrix: list
    rank_pi: int
    dim_ker_pi: int
    dim_obstruction: int
    # internal data for class computations
    _ce_index: dict = None
    _spaces: dict = None

    def exactness(self):
        return (self.dim_H2_kv == self.dim_ker_pi + self.rank_pi
                and self.dim_obstruction == self.dim_H2_ce - self.rank_pi)

    def sigma(self, w):
        """Residue of a 2-cocycle modulo coboundaries + im(Pi); zero iff liftable."""
        sp = self._spaces
        v = {self._ce_index[k]: x for k, x in w.coeffs.items()}
        cols = sp["B2"] + sp["PiZ"] + sp["Orep"]
        M = Matrix.from_columns(cols, sp["ambient"])
        x = solve(M, v)
        if x is None:
            raise ValueError("not a cocycle")
        off = len(sp["B2"]) + len(sp["PiZ"])
        return [x[off + i] for i in range(len(sp["Orep"]))]


def _span_basis(vectors):
    """Independent subset (greedy, order preserving)."""
    out = []
    for v in vectors:
        if Echelon(out + [v]).rank > len(out):
            out.append(v)
    return out


def _complement(base, vectors):
    chosen = []
    cur = list(base)
    r = Echelon(cur).rank
    for v in vectors:
        r2 = Echelon(cur + [v]).rank
        if r2 > r:
            cur.append(v)
            chosen.append(v)
            r = r2
    return chosen


def cocycle_basis(L, q=2):
    return kernel_basis(ce_matrix(L, q))


def obstruction(A):
    """H_2(A, F), H^2(A_L, F), the induced Pi and the cokernel dimension."""
    v = is_kv(A)
    if not v.ok:
        raise ValueError(f"not a KV algebra: witness {v.witness}")
    L = lie_algebra(A)
    n = A.dim
    F = trivial_module(A)
    cx = KVComplex(A, F)
    # KV side: cycles and boundaries in C_2
    Z2 = kernel_basis(cx.matrix(2)).vectors
    B2kv = list(Echelon(cx.matrix(1).column_dicts()).pivots.values())
    dim_H2 = len(Z2) - len(B2kv)
    H2reps = _complement(B2kv, Z2)
    # CE side
    alt2 = _alt_basis(n, 2)
    ce_index = {t: i for i, t in enumerate(alt2)}
    Zce = kernel_basis(ce_matrix(L, 2)).vectors
    Bce = _span_basis(ce_matrix(L, 1).column_dicts())
    dim_H2ce = len(Zce) - len(Bce)
    Hce_reps = _complement(Bce, Zce)

    def pi_vec(vec):
        th = Chain(A, F, 2, vec)
        return pi_map(th, L).vector(ce_index)

    PiZ = [pi_vec(z) for z in H2reps]
    PiZ_ind = _complement(Bce, PiZ)
    rank_pi = len(PiZ_ind)
    Orep = _complement(Bce + PiZ_ind, Hce_reps)
    # matrix of Pi in the bases H2reps -> Hce_reps
    pi_matrix = []
    if Hce_reps:
        M = Matrix.from_columns(Bce + Hce_reps, len(alt2))
        for col in PiZ:
            x = solve(M, col)
            pi_matrix.append([x[len(Bce) + i] for i in range(len(Hce_reps))])
    rep = ObstructionReport(dim_H2, dim_H2ce, pi_matrix, rank_pi, dim_H2 - rank_pi,
                            dim_H2ce - rank_pi)
    rep._ce_index = ce_index
    rep._spaces = {"B2": Bce, "PiZ": PiZ_ind, "Orep": Orep, "ambient": len(alt2),
                   "Zce": Zce}
    return rep


@dataclass
class ExtensionResult:
    phi: object
    algebra: object
    sigma: list

    @property
    def solvable(self):
        return self.algebra is not None


def kv_extension(A, w, name=None):
    """Solve delta_2 phi = 0 and 2 Pi phi = w; build the product on F (+) A.

    The extended basis is (c, e_1, ..., e_n) with (l,a)(m,b) = (phi(a,b), ab).
    When no phi exists the obstruction residue is returned instead.
    """
    if not ce_boundary(w).is_zero():
        raise ValueError("w is not a 2-cocycle")
    n = A.dim
    F = trivial_module(A)
    cx = KVComplex(A, F)
    D = cx.matrix(2)
    rows = D.row_dicts()
    rhs = {}
    for (i, j) in _alt_basis(n, 2):
        row = {tuple_index((i, j), n): Fraction(1), tuple_index((j, i), n): Fraction(-1)}
        rows.append(row)
        val = w.on_basis((i, j))
        if val:
            rhs[len(rows) - 1] = val
    M = Matrix(len(rows), n * n, {(r, c): v for r, row in enumerate(rows) for c, v in row.items()},
               A.field)
    x = solve(M, [rhs.get(r, 0) for r in range(len(rows))])
    if x is None:
        rep = obstruction(A)
        return ExtensionResult(None, None, rep.sigma(w))
    phi = Chain(A, F, 2, {k: v for k, v in enumerate(x) if v})
    table = {}
    for (i, j), row in A.mul_sparse.items():
        table[(i + 1, j + 1)] = {k + 1: c for k, c in row}
    for k, v in phi.coeffs.items():
        i, j = divmod(k, n)
        table.setdefault((i + 1, j + 1), {})[0] = v
    labels = ["c"] + list(A.labels)
    ext = KVAlgebra.from_sparse(n + 1, table, labels, A.field, name or f"{A.name}+ext")
    return ExtensionResult(phi, ext, [])
