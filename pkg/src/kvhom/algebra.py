"""Finite-dimensional KV algebras and modules given by structure constants.

Vectors are tuples of exact scalars in the basis order.  Structure tensors
are stored densely (``mul[i][j][k]``) with sparse shadows for fast loops.
"""

from dataclasses import dataclass, field as dc_field
from itertools import product

from .linalg import Matrix, kernel_basis
from .scalars import QQ, field_for

__all__ = ["Verdict", "KVAlgebra", "KVModule", "LieAlgebra", "associator",
           "is_kv", "is_kv_module", "lie_algebra", "j_space", "regular_module",
           "trivial_module", "tensor_module", "hom_module", "tensor_power"]


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check: ``ok`` plus the first witness on failure."""

    name: str
    ok: bool
    witness: object = None
    detail: dict = dc_field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _sparse3(t, n1, n2, n3):
    sp = {}
    for i in range(n1):
        for j in range(n2):
            row = [(k, t[i][j][k]) for k in range(n3) if t[i][j][k]]
            if row:
                sp[(i, j)] = row
    return sp


def _dense3(n1, n2, n3, sparse, zero):
    t = [[[zero] * n3 for _ in range(n2)] for _ in range(n1)]
    for (i, j), row in sparse.items():
        for k, c in row:
            t[i][j][k] = t[i][j][k] + c
    return t


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


class KVAlgebra:
    """Algebra with ``e_i e_j = sum_k mul[i][j][k] e_k``."""

    def __init__(self, mul, labels=None, field=QQ, name=None):
        self.field = field_for(field)
        f = self.field
        self.dim = len(mul)
        n = self.dim
        self.mul_tensor = [
            [[f.coerce(mul[i][j][k]) for k in range(n)] for j in range(n)]
            for i in range(n)]
        for i in range(n):
            if len(mul[i]) != n or any(len(mul[i][j]) != n for j in range(n)):
                raise ValueError("structure tensor must have shape n x n x n")
        self.labels = list(labels) if labels else [f"e{i + 1}" for i in range(n)]
        if len(self.labels) != n:
            raise ValueError("label count differs from dimension")
        self.name = name or "algebra"
        self.mul_sparse = _sparse3(self.mul_tensor, n, n, n)
        into = {}
        for (i, j), row in self.mul_sparse.items():
            for k, c in row:
                into.setdefault(k, []).append((i, j, c))
        self.mul_into = into

    @classmethod
    def from_sparse(cls, dim, table, labels=None, field=QQ, name=None):
        """Build from ``{(i, j): {k: c}}`` (0-based)."""
        f = field_for(field)
        sp = {ij: [(k, f.coerce(c)) for k, c in row.items()] for ij, row in table.items()}
        return cls(_dense3(dim, dim, dim, sp, f.zero), labels, f, name)

    def zero(self):
        return (self.field.zero,) * self.dim

    def basis(self, i):
        f = self.field
        return tuple(f.one if k == i else f.zero for k in range(self.dim))

    def mul(self, x, y):
        out = [self.field.zero] * self.dim
        for (i, j), row in self.mul_sparse.items():
            a = x[i]
            if not a:
                continue
            b = y[j]
            if not b:
                continue
            ab = a * b
            for k, c in row:
                out[k] += ab * c
        return tuple(out)

    def commutator(self, x, y):
        return _sub(self.mul(x, y), self.mul(y, x))

    def __repr__(self):
        return f"KVAlgebra({self.name!r}, dim={self.dim})"


class KVModule:
    """Two-sided module: ``e_i w_a = sum left[i][a][b] w_b`` and ``w_a e_i = sum right[a][i][b] w_b``."""

    def __init__(self, algebra, left, right, labels=None, name=None):
        self.algebra = algebra
        f = algebra.field
        self.field = f
        n = algebra.dim
        self.dim = len(right)
        w = self.dim
        if len(left) != n:
            raise ValueError("left action tensor must have algebra dimension first")
        self.left_tensor = [[[f.coerce(left[i][a][b]) for b in range(w)] for a in range(w)]
                            for i in range(n)]
        self.right_tensor = [[[f.coerce(right[a][i][b]) for b in range(w)] for i in range(n)]
                             for a in range(w)]
        self.labels = list(labels) if labels else [f"w{a + 1}" for a in range(w)]
        self.name = name or "module"
        self.left_sparse = _sparse3(self.left_tensor, n, w, w)
        self.right_sparse = _sparse3(self.right_tensor, w, n, w)

    @classmethod
    def from_sparse(cls, algebra, dim, left, right, labels=None, name=None):
        f = algebra.field
        n = algebra.dim
        ls = {ij: [(k, f.coerce(c)) for k, c in row.items()] for ij, row in left.items()}
        rs = {ij: [(k, f.coerce(c)) for k, c in row.items()] for ij, row in right.items()}
        return cls(algebra, _dense3(n, dim, dim, ls, f.zero), _dense3(dim, n, dim, rs, f.zero),
                   labels, name)

    def zero(self):
        return (self.field.zero,) * self.dim

    def basis(self, a):
        f = self.field
        return tuple(f.one if k == a else f.zero for k in range(self.dim))

    def act_left(self, x, v):
        out = [self.field.zero] * self.dim
        for (i, a), row in self.left_sparse.items():
            s = x[i]
            if not s:
                continue
            t = v[a]
            if not t:
                continue
            st = s * t
            for b, c in row:
                out[b] += st * c
        return tuple(out)

    def act_right(self, v, x):
        out = [self.field.zero] * self.dim
        for (a, i), row in self.right_sparse.items():
            s = v[a]
            if not s:
                continue
            t = x[i]
            if not t:
                continue
            st = s * t
            for b, c in row:
                out[b] += st * c
        return tuple(out)

    def __repr__(self):
        return f"KVModule({self.name!r}, dim={self.dim}, over={self.algebra.name!r})"


class LieAlgebra:
    """Lie algebra with ``[e_i, e_j] = sum_k bracket[i][j][k] e_k``."""

    def __init__(self, bracket, labels=None, field=QQ, name=None):
        self.field = field_for(field)
        self.dim = len(bracket)
        self.bracket_tensor = bracket
        self.labels = list(labels) if labels else [f"e{i + 1}" for i in range(self.dim)]
        self.name = name or "lie"
        self.sparse = _sparse3(bracket, self.dim, self.dim, self.dim)

    def bracket(self, x, y):
        out = [self.field.zero] * self.dim
        for (i, j), row in self.sparse.items():
            if x[i] and y[j]:
                ab = x[i] * y[j]
                for k, c in row:
                    out[k] += ab * c
        return tuple(out)

    def is_abelian(self):
        return not self.sparse


def associator(A, a, b, c):
    """(a, b, c) = a(bc) - (ab)c."""
    for v in (a, b, c):
        if len(v) != A.dim:
            raise ValueError(f"vector of length {len(v)} in an algebra of dimension {A.dim}")
    return _sub(A.mul(a, A.mul(b, c)), A.mul(A.mul(a, b), c))


def is_kv(A):
    """Scan all basis triples for (a,b,c) = (b,a,c)."""
    n = A.dim
    E = [A.basis(i) for i in range(n)]
    for i, j, k in product(range(n), repeat=3):
        if j < i:
            continue
        lhs = associator(A, E[i], E[j], E[k])
        rhs = associator(A, E[j], E[i], E[k])
        if lhs != rhs:
            return Verdict("is_kv", False, (A.labels[i], A.labels[j], A.labels[k]),
                           {"lhs": lhs, "rhs": rhs})
    return Verdict("is_kv", True)


def module_associators(W, a, b, v):
    A = W.algebra
    return _sub(W.act_left(a, W.act_left(b, v)), W.act_left(A.mul(a, b), v))


def is_kv_module(A, W):
    """Scan basis triples for (a,b,w) = (b,a,w) and (a,w,b) = (w,a,b)."""
    if W.algebra is not A and W.algebra.dim != A.dim:
        raise ValueError("module over a different algebra")
    n, w = A.dim, W.dim
    E = [A.basis(i) for i in range(n)]
    V = [W.basis(b) for b in range(w)]
    for i, j in product(range(n), repeat=2):
        if j < i:
            continue
        for b in range(w):
            lhs = module_associators(W, E[i], E[j], V[b])
            rhs = module_associators(W, E[j], E[i], V[b])
            if lhs != rhs:
                return Verdict("is_kv_module", False,
                               ("(a,b,w)", A.labels[i], A.labels[j], W.labels[b]))
    for i, j in product(range(n), repeat=2):
        for b in range(w):
            a_e, b_e, v = E[i], E[j], V[b]
            awb = _sub(W.act_left(a_e, W.act_right(v, b_e)), W.act_right(W.act_left(a_e, v), b_e))
            wab = _sub(W.act_right(v, A.mul(a_e, b_e)), W.act_right(W.act_right(v, a_e), b_e))
            if awb != wab:
                return Verdict("is_kv_module", False,
                               ("(a,w,b)", A.labels[i], W.labels[b], A.labels[j]))
    return Verdict("is_kv_module", True)


def lie_algebra(A, check=True):
    """Commutator Lie algebra; antisymmetry and Jacobi are asserted unless ``check`` is off."""
    n = A.dim
    E = [A.basis(i) for i in range(n)]
    br = [[list(A.commutator(E[i], E[j])) for j in range(n)] for i in range(n)]
    L = LieAlgebra(br, A.labels, A.field, name=f"{A.name}_L")
    if not check:
        return L
    for i, j in product(range(n), repeat=2):
        if any(x + y for x, y in zip(br[i][j], br[j][i])):
            raise ValueError("commutator not antisymmetric")
    for i, j, k in product(range(n), repeat=3):
        if not i < j < k:
            continue
        t1 = L.bracket(E[i], L.bracket(E[j], E[k]))
        t2 = L.bracket(E[j], L.bracket(E[k], E[i]))
        t3 = L.bracket(E[k], L.bracket(E[i], E[j]))
        if any(x + y + z for x, y, z in zip(t1, t2, t3)):
            raise ValueError(f"Jacobi fails on {A.labels[i]},{A.labels[j]},{A.labels[k]}: "
                             "input is not a KV algebra")
    return L


def j_space(A, W):
    """Basis of {w : (a,b,w) = 0 for all basis a, b} as a kernel."""
    n, w = A.dim, W.dim
    E = [A.basis(i) for i in range(n)]
    ent = {}
    row = 0
    for i, j in product(range(n), repeat=2):
        cols = [module_associators(W, E[i], E[j], W.basis(b)) for b in range(w)]
        for out in range(w):
            for b in range(w):
                if cols[b][out]:
                    ent[(row, b)] = cols[b][out]
            row += 1
    return kernel_basis(Matrix(row, w, ent, A.field))


def regular_module(A):
    """A as a module over itself."""
    t = A.mul_tensor
    n = A.dim
    right = [[t[a][i] for i in range(n)] for a in range(n)]
    return KVModule(A, t, right, labels=A.labels, name=f"{A.name}_reg")


def trivial_module(A, dim=1):
    """Zero actions on F^dim."""
    z = A.field.zero
    n = A.dim
    left = [[[z] * dim for _ in range(dim)] for _ in range(n)]
    right = [[[z] * dim for _ in range(n)] for _ in range(dim)]
    labels = ["1"] if dim == 1 else None
    return KVModule(A, left, right, labels=labels, name="trivial")


def _check_module(A, M, what):
    v = is_kv_module(A, M)
    if not v.ok:
        raise ValueError(f"{what} fails the module axioms at {v.witness}")
    return M


def tensor_module(V, W, check=True):
    """V (x) W with a(v(x)w) = av(x)w + v(x)aw and (v(x)w)a = v(x)wa."""
    A = V.algebra
    dv, dw = V.dim, W.dim
    left, right = {}, {}
    for (i, a), row in V.left_sparse.items():
        for w in range(dw):
            for b, c in row:
                d = left.setdefault((i, a * dw + w), {})
                d[b * dw + w] = d.get(b * dw + w, 0) + c
    for (i, a), row in W.left_sparse.items():
        for v in range(dv):
            for b, c in row:
                d = left.setdefault((i, v * dw + a), {})
                d[v * dw + b] = d.get(v * dw + b, 0) + c
    for (a, i), row in W.right_sparse.items():
        for v in range(dv):
            for b, c in row:
                d = right.setdefault((v * dw + a, i), {})
                d[v * dw + b] = d.get(v * dw + b, 0) + c
    labels = [f"{x}*{y}" for x in V.labels for y in W.labels]
    M = KVModule.from_sparse(A, dv * dw, left, right, labels, name=f"{V.name}(x){W.name}")
    return _check_module(A, M, "tensor module") if check else M


def tensor_power(W, r, check=False):
    M = W
    for _ in range(r - 1):
        M = tensor_module(M, W, check=check)
    return M


def hom_module(r, W, s, V, check=True):
    """Hom(T^r W, T^s V) with (a t)(x) = a(t(x)) - t(a x) and (t a)(x) = t(x) a.

    Basis element ``E[beta, alpha]`` sends source basis alpha to target beta; its
    index is ``beta * dim_src + alpha``.
    """
    if r < 1 or s < 1:
        raise ValueError("powers must be at least 1")
    A = W.algebra
    src = tensor_power(W, r)
    tgt = tensor_power(V, s)
    ds, dt = src.dim, tgt.dim
    left, right = {}, {}

    def add(d, key, idx, c):
        row = d.setdefault(key, {})
        row[idx] = row.get(idx, 0) + c

    for beta in range(dt):
        for alpha in range(ds):
            col = beta * ds + alpha
            for i in range(A.dim):
                for gamma, c in tgt.left_sparse.get((i, beta), ()):
                    add(left, (i, col), gamma * ds + alpha, c)
                # -(E L_i): coefficient L_i[alpha][delta] on E[beta, delta]
                for delta in range(ds):
                    for g2, c in src.left_sparse.get((i, delta), ()):
                        if g2 == alpha:
                            add(left, (i, col), beta * ds + delta, -c)
                for gamma, c in tgt.right_sparse.get((beta, i), ()):
                    add(right, (col, i), gamma * ds + alpha, c)
    labels = [f"[{tgt.labels[b]}<-{src.labels[a]}]" for b in range(dt) for a in range(ds)]
    M = KVModule.from_sparse(A, dt * ds, left, right, labels, name=f"Hom(T{r}{W.name},T{s}{V.name})")
    return _check_module(A, M, "Hom module") if check else M
