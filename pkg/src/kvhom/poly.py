"""Polynomial models: exact polynomials, vector fields, jet-line and cotangent
algebroids, and multidifferential chains with their jet decomposition.

Two flavours of every model exist.  *Finite* models are the truncated
quotients (coefficients of positive degree, everything modulo degree > d),
which are honest KV algebras and feed the matrix complex.  *Functional*
models work with untruncated polynomials so that operators of negative
degree (constant vector fields, constant bivectors) act exactly; identities
there are certified on monomial spanning sets up to a named degree.
"""

from fractions import Fraction
from itertools import combinations_with_replacement, product

from .algebra import KVAlgebra, KVModule
from .complex import SplitPair

__all__ = ["Poly", "monomials", "PolyVectorField", "formal_vf_product", "Section",
           "PolyOps", "JetLineAlgebroid", "CotangentModel", "MultiDiffChain", "Term",
           "jet_decompose", "symbol", "chain_degree", "jet_support", "mul_trunc"]


def monomials(nvars, maxdeg, mindeg=0):
    """Exponent tuples of degree in [mindeg, maxdeg], graded then lexicographic."""
    out = []
    for deg in range(mindeg, maxdeg + 1):
        layer = []
        for combo in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            layer.append(tuple(e))
        out.extend(sorted(layer, reverse=True))
    return out


class Poly:
    """Sparse exact polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        t = {}
        for e, c in (terms or {}).items():
            if c:
                e = tuple(e)
                if len(e) != nvars:
                    raise ValueError("exponent length differs from variable count")
                t[e] = c
        self.terms = t
        self._hash = None

    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: Fraction(c)} if c else {})

    @classmethod
    def var(cls, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def mono(cls, exp, c=1):
        return cls(len(exp), {tuple(exp): Fraction(c) if not hasattr(c, "re") else c})

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    def _new(self, terms):
        p = Poly.__new__(Poly)
        p.nvars = self.nvars
        p.terms = terms
        p._hash = None
        return p

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.nvars, other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            x = t.get(e, 0) + c
            if x:
                t[e] = x
            else:
                t.pop(e, None)
        return self._new(t)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if not other:
                return self._new({})
            return self._new({e: c * other for e, c in self.terms.items()})
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                x = t.get(e, 0) + c1 * c2
                if x:
                    t[e] = x
                else:
                    t.pop(e, None)
        return self._new(t)

    __rmul__ = __mul__

    def diff(self, i, times=1):
        p = self
        for _ in range(times):
            t = {}
            for e, c in p.terms.items():
                if e[i]:
                    e2 = list(e)
                    e2[i] -= 1
                    t[tuple(e2)] = c * e[i]
            p = p._new(t)
        return p

    def partial(self, alpha):
        """Apply the multi-index derivative d^alpha."""
        p = self
        for i, k in enumerate(alpha):
            if k:
                p = p.diff(i, k)
        return p

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def homogeneous(self, k):
        return self._new({e: c for e, c in self.terms.items() if sum(e) == k})

    def truncate(self, d):
        """(truncated polynomial, whether any term was discarded)."""
        kept = {e: c for e, c in self.terms.items() if sum(e) <= d}
        return self._new(kept), len(kept) != len(self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def coefficient(self, e):
        return self.terms.get(tuple(e), Fraction(0))

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def depends_on(self, i):
        return any(e[i] for e in self.terms)

    def compose(self, subs):
        """Substitute polynomial ``subs[i]`` for variable i."""
        if len(subs) != self.nvars:
            raise ValueError("substitution length differs from variable count")
        nv = subs[0].nvars if subs else 0
        out = Poly(nv)
        cache = {}
        for e, c in self.terms.items():
            term = Poly.const(nv, 1) * c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        pw = Poly.const(nv, 1)
                        for _ in range(k):
                            pw = pw * subs[i]
                        cache[key] = pw
                    term = term * cache[key]
            out = out + term
        return out

    def extend(self, nvars, offset=0):
        """Embed into a ring with more variables, shifting indices by ``offset``."""
        t = {}
        for e, c in self.terms.items():
            e2 = [0] * nvars
            e2[offset:offset + self.nvars] = e
            t[tuple(e2)] = c
        return Poly(nvars, t)

    def restrict(self, keep):
        """Drop variables not in ``keep`` (they must not occur)."""
        t = {}
        for e, c in self.terms.items():
            if any(e[i] for i in range(self.nvars) if i not in keep):
                raise ValueError("polynomial depends on a dropped variable")
            t[tuple(e[i] for i in keep)] = c
        return Poly(len(keep), t)

    def key(self):
        return tuple(sorted(self.terms.items()))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if not other:
            return not self.terms
        return self.is_constant() and self.constant_term() == other

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({self.format()})"

    def format(self, names=None):
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), kv[0]), reverse=False):
            mon = "*".join(f"{names[i]}^{k}" if k > 1 else names[i]
                           for i, k in enumerate(e) if k)
            parts.append(f"{c}" + (f"*{mon}" if mon else ""))
        return " + ".join(parts)


def mul_trunc(f, g, d):
    """Product truncated at degree d, with the loss flag."""
    return (f * g).truncate(d)


class PolyVectorField:
    """Polynomial vector field sum_i X_i d/dx_i; ``lost`` flags truncation."""

    __slots__ = ("comps", "lost")

    def __init__(self, comps, lost=False):
        self.comps = tuple(comps)
        self.lost = lost

    @property
    def nvars(self):
        return len(self.comps)

    @classmethod
    def zero(cls, m):
        return cls([Poly(m)] * m)

    def __call__(self, f):
        out = Poly(f.nvars)
        for i, c in enumerate(self.comps):
            if c:
                out = out + c * f.diff(i)
        return out

    def __add__(self, other):
        return PolyVectorField([a + b for a, b in zip(self.comps, other.comps)],
                               self.lost or other.lost)

    def __sub__(self, other):
        return PolyVectorField([a - b for a, b in zip(self.comps, other.comps)],
                               self.lost or other.lost)

    def __mul__(self, c):
        return PolyVectorField([a * c for a in self.comps], self.lost)

    __rmul__ = __mul__

    def bracket(self, other):
        return PolyVectorField([self(b) - other(a) for a, b in zip(self.comps, other.comps)])

    def is_zero(self):
        return not any(self.comps)

    def __eq__(self, other):
        return isinstance(other, PolyVectorField) and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def __repr__(self):
        return f"PolyVectorField({[c.format() for c in self.comps]})"


def formal_vf_product(X, Y, d=None, reading="flat"):
    """Product of formal vector fields.

    ``flat``: XY = sum_j (sum_i X_i dY_j/dx_i) d/dx_j, the flat connection.
    ``literal``: output component i is sum_j X_i dY_j/dx_i (printed indices).
    With ``d`` the result is truncated and ``lost`` reports discarded terms.
    """
    if X.nvars != Y.nvars:
        raise ValueError("vector fields in different dimensions")
    m = X.nvars
    if reading == "flat":
        comps = [X(Y.comps[j]) for j in range(m)]
    elif reading == "literal":
        comps = [sum((X.comps[i] * Y.comps[j].diff(i) for j in range(m)), Poly(Y.comps[0].nvars))
                 for i in range(m)]
    else:
        raise ValueError("reading must be 'flat' or 'literal'")
    lost = X.lost or Y.lost
    if d is not None:
        out = []
        for c in comps:
            t, flag = c.truncate(d)
            out.append(t)
            lost = lost or flag
        comps = out
    return PolyVectorField(comps, lost)


class Section:
    """Section (s, f) of the split algebra: vector field part and function part."""

    __slots__ = ("vf", "fn", "_hash")

    def __init__(self, vf, fn):
        self.vf = vf if isinstance(vf, PolyVectorField) else PolyVectorField(vf)
        self.fn = fn
        self._hash = None

    @classmethod
    def function(cls, f):
        return cls(PolyVectorField.zero(f.nvars) if f.nvars else PolyVectorField([]), f)

    @classmethod
    def field(cls, comps):
        n = comps[0].nvars
        return cls(PolyVectorField(comps), Poly(n))

    def __add__(self, other):
        return Section(self.vf + other.vf, self.fn + other.fn)

    def __sub__(self, other):
        return Section(self.vf - other.vf, self.fn - other.fn)

    def __neg__(self):
        return Section(self.vf * -1, -self.fn)

    def scale(self, c):
        return Section(self.vf * c, self.fn * c)

    def is_zero(self):
        return self.vf.is_zero() and not self.fn

    def __eq__(self, other):
        return isinstance(other, Section) and self.vf == other.vf and self.fn == other.fn

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vf, self.fn))
        return self._hash

    def __repr__(self):
        return f"Section({self.vf!r}, {self.fn.format()})"


class PolyOps:
    """Split-algebra operations on untruncated polynomial sections.

    Product (s,f)(s',f') = (D_s s', f f' + s(f')) with D the flat connection.
    ``values="W"``: the function module, left (s,f).g = f g + s(g), right
    g.(s,f) = g f.  ``values="G"``: the regular module.
    """

    def __init__(self, nvars, values="W"):
        self.nvars = nvars
        self.values = values

    def mul(self, x, y):
        return Section(formal_vf_product(x.vf, y.vf), x.fn * y.fn + x.vf(y.fn))

    def left(self, a, v):
        if self.values == "G":
            return self.mul(a, v)
        return a.fn * v + a.vf(v)

    def right(self, v, a):
        if self.values == "G":
            return self.mul(v, a)
        return v * a.fn

    def add(self, u, v):
        return u + v

    def sub(self, u, v):
        return u - v

    def neg(self, u):
        return -u

    def zero(self):
        if self.values == "G":
            return Section(PolyVectorField.zero(self.nvars), Poly(self.nvars))
        return Poly(self.nvars)

    def embed(self, value):
        """View a value as a section (functions sit in the W summand)."""
        if isinstance(value, Section):
            return value
        return Section(PolyVectorField.zero(self.nvars), value)


def _dense_from(table, n1, n2, n3):
    t = [[[Fraction(0)] * n3 for _ in range(n2)] for _ in range(n1)]
    for (i, j, k), c in table.items():
        t[i][j][k] += c
    return t


class _FiniteSplitBuilder:
    """Shared assembly of G = A (+) W and the function module W over G."""

    def _assemble(self, name):
        nA, w = len(self.A_basis), len(self.W_basis)
        n = nA + w
        mul = {}

        def add(i, j, k, c):
            if c:
                mul[(i, j, k)] = mul.get((i, j, k), 0) + c

        for i in range(nA):
            for j in range(nA):
                for k, c in self.a_mul(i, j).items():
                    add(i, j, k, c)
            for b in range(w):
                for k, c in self.anchor(i, b).items():
                    add(i, nA + b, nA + k, c)
        for a in range(w):
            for b in range(w):
                for k, c in self.w_mul(a, b).items():
                    add(nA + a, nA + b, nA + k, c)
        labels = self.A_labels + self.W_labels
        G = KVAlgebra(_dense_from(mul, n, n, n), labels, name=name)
        left, right = {}, {}
        for i in range(nA):
            for b in range(w):
                for k, c in self.anchor(i, b).items():
                    left[(i, b, k)] = left.get((i, b, k), 0) + c
        for a in range(w):
            for b in range(w):
                for k, c in self.w_mul(a, b).items():
                    left[(nA + a, b, k)] = left.get((nA + a, b, k), 0) + c
                    right[(b, nA + a, k)] = right.get((b, nA + a, k), 0) + c
        Wm = KVModule(G, _dense_from(left, n, w, w), _dense_from(right, w, n, w),
                      self.W_labels, name=f"{name}_W")
        A = KVAlgebra(_dense_from({(i, j, k): c for i in range(nA) for j in range(nA)
                                   for k, c in self.a_mul(i, j).items()}, nA, nA, nA),
                      self.A_labels, name=f"{name}_A")
        Wa = KVModule(A, _dense_from({(i, b, k): c for i in range(nA) for b in range(w)
                                      for k, c in self.anchor(i, b).items()}, nA, w, w),
                      _dense_from({}, w, nA, w), self.W_labels, name=f"{name}_W_over_A")
        return G, Wm, A, Wa


class JetLineAlgebroid(_FiniteSplitBuilder):
    """Jet-line model of depth d.

    W = F[x]/(x^{d+1}), A = {f d/dx : f in (x)}, (f d)(g d) = f g' d and
    anchor (f d).g = f g'.  G = A (+) W with A listed first.
    """

    def __init__(self, d):
        if d < 1:
            raise ValueError("depth must be at least 1")
        self.d = d
        self.A_basis = list(range(1, d + 1))      # x^k d/dx
        self.W_basis = list(range(0, d + 1))      # x^k
        self.A_labels = [f"x^{k}d" for k in self.A_basis]
        self.W_labels = [f"x^{k}" for k in self.W_basis]
        self.G, self.W, self.A, self.W_over_A = self._assemble(f"jetline{d}")
        self.split = SplitPair(self.G, self.W, len(self.A_basis), unit=0, name=f"jetline{d}")

    def a_mul(self, i, j):
        a, b = self.A_basis[i], self.A_basis[j]
        k = a + b - 1
        if b and k <= self.d:
            return {self.A_basis.index(k): Fraction(b)}
        return {}

    def anchor(self, i, bidx):
        a, b = self.A_basis[i], self.W_basis[bidx]
        k = a + b - 1
        if b and k <= self.d:
            return {k: Fraction(b)}
        return {}

    def w_mul(self, i, j):
        k = self.W_basis[i] + self.W_basis[j]
        return {k: Fraction(1)} if k <= self.d else {}

    def section(self, s_coeffs, f_coeffs):
        """Vector of G from coefficient lists for A (x^1..x^d) and W (x^0..x^d)."""
        return tuple(Fraction(c) for c in list(s_coeffs) + list(f_coeffs))


class CotangentModel(_FiniteSplitBuilder):
    """Cotangent model on (q_1..q_m, p_1..p_m) with vertical fields.

    Variables 0..m-1 are q, m..2m-1 are p.  The finite quotient uses vertical
    fields S d/dp_i with S in the ideal (p) and degree <= d; functions of
    degree <= d.
    """

    def __init__(self, m, d, finite=True):
        self.m, self.d = m, d
        self.nvars = 2 * m
        self.names = [f"q{i + 1}" for i in range(m)] + [f"p{i + 1}" for i in range(m)]
        self.W_basis = monomials(self.nvars, d)
        self.W_index = {e: k for k, e in enumerate(self.W_basis)}
        self.A_basis = [(e, i) for e in monomials(self.nvars, d, 1)
                        if any(e[m:]) for i in range(m)]
        self.A_index = {a: k for k, a in enumerate(self.A_basis)}
        self.W_labels = [self._mon(e) for e in self.W_basis]
        self.A_labels = [f"{self._mon(e)}dp{i + 1}" for e, i in self.A_basis]
        if finite:
            self.G, self.W, self.A, self.W_over_A = self._assemble(f"cotangent{m}_{d}")
            unit = self.W_index[(0,) * self.nvars]
            self.split = SplitPair(self.G, self.W, len(self.A_basis), unit=unit,
                                   name=f"cotangent{m}_{d}")

    def _mon(self, e):
        s = "*".join(f"{self.names[i]}^{k}" if k > 1 else self.names[i]
                     for i, k in enumerate(e) if k)
        return s or "1"

    def _poly_to_w(self, p):
        out = {}
        for e, c in p.terms.items():
            if sum(e) <= self.d:
                out[self.W_index[e]] = c
        return out

    def a_mul(self, i, j):
        (e1, c1), (e2, c2) = self.A_basis[i], self.A_basis[j]
        S2 = Poly.mono(e2).diff(self.m + c1) * Poly.mono(e1)
        out = {}
        for e, c in S2.terms.items():
            if sum(e) <= self.d:
                out[self.A_index[(e, c2)]] = c
        return out

    def anchor(self, i, b):
        e1, c1 = self.A_basis[i]
        return self._poly_to_w(Poly.mono(self.W_basis[b]).diff(self.m + c1) * Poly.mono(e1))

    def w_mul(self, a, b):
        return self._poly_to_w(Poly.mono(self.W_basis[a]) * Poly.mono(self.W_basis[b]))

    # functional side

    def var(self, i):
        return Poly.var(self.nvars, i)

    def q(self, i):
        return self.var(i)

    def p(self, i):
        return self.var(self.m + i)

    def vertical(self, comps):
        """Section (sum_i S_i d/dp_i, 0)."""
        z = Poly(self.nvars)
        return Section.field([z] * self.m + list(comps))

    def ops(self, values="W"):
        return PolyOps(self.nvars, values)

    def function_basis(self, deg):
        return [Section.function(Poly.mono(e)) for e in monomials(self.nvars, deg)]

    def vertical_basis(self, deg, ideal=True):
        out = []
        lo = 1 if ideal else 0
        z = Poly(self.nvars)
        for e in monomials(self.nvars, deg, lo):
            if ideal and not any(e[self.m:]):
                continue
            for i in range(self.m):
                comps = [z] * self.m
                comps[i] = Poly.mono(e)
                out.append(self.vertical(comps))
        return out

    def section_basis(self, deg, ideal=True):
        return self.function_basis(deg) + self.vertical_basis(deg, ideal)

    def pullback(self, f0):
        """f0(q) as a function on the cotangent model."""
        return f0.extend(self.nvars, 0)

    def is_first_integral(self, f, deg):
        return all(not s.vf(f) for s in self.vertical_basis(deg, ideal=False))


class Term:
    """One summand c(x) * prod_j d^{alpha_j}(slot_j) of a multidifferential chain.

    ``slots[j]`` is ``("f", alpha)`` to read the function part of argument j or
    ``("v", i, alpha)`` to read component i of its vector field part.
    """

    __slots__ = ("slots", "coeff")

    def __init__(self, slots, coeff):
        self.slots = tuple(("f", tuple(s[1])) if s[0] == "f" else ("v", s[1], tuple(s[2]))
                           for s in slots)
        self.coeff = coeff

    @property
    def jet_type(self):
        return tuple(sum(s[1]) if s[0] == "f" else sum(s[2]) for s in self.slots)

    def __call__(self, args):
        out = self.coeff
        for s, a in zip(self.slots, args):
            if s[0] == "f":
                base, alpha = a.fn, s[1]
            else:
                base, alpha = a.vf.comps[s[1]], s[2]
            out = out * base.partial(alpha)
            if not out:
                return out
        return out

    def __repr__(self):
        return f"Term({self.slots}, {self.coeff.format()})"


class MultiDiffChain:
    """Order-<=k multidifferential chain valued in functions."""

    def __init__(self, arity, nvars, terms):
        self.arity, self.nvars = arity, nvars
        self.terms = [t for t in terms if t.coeff]
        for t in self.terms:
            if len(t.slots) != arity:
                raise ValueError("term arity differs from chain arity")

    @classmethod
    def bidifferential(cls, nvars, table):
        """From ``{(alpha, beta): coeff}`` acting on function parts."""
        return cls(2, nvars, [Term([("f", a), ("f", b)], c if isinstance(c, Poly) else Poly.const(nvars, c))
                              for (a, b), c in table.items()])

    @property
    def order(self):
        return max((max(t.jet_type) for t in self.terms), default=0)

    def __call__(self, *args):
        if len(args) != self.arity:
            raise ValueError(f"chain of arity {self.arity} called with {len(args)} arguments")
        args = tuple(a if isinstance(a, Section) else Section.function(a) for a in args)
        out = Poly(self.nvars)
        for t in self.terms:
            out = out + t(args)
        return out

    def transpose(self):
        if self.arity != 2:
            raise ValueError("transpose needs arity 2")
        return MultiDiffChain(2, self.nvars, [Term(t.slots[::-1], t.coeff) for t in self.terms])

    def scale(self, c):
        return MultiDiffChain(self.arity, self.nvars, [Term(t.slots, t.coeff * c) for t in self.terms])

    def __add__(self, other):
        return MultiDiffChain(self.arity, self.nvars, self.terms + other.terms).simplify()

    def __sub__(self, other):
        return self + other.scale(-1)

    def simplify(self):
        acc = {}
        for t in self.terms:
            acc[t.slots] = acc.get(t.slots, Poly(self.nvars)) + t.coeff
        return MultiDiffChain(self.arity, self.nvars,
                              [Term(s, c) for s, c in sorted(acc.items(), key=lambda kv: repr(kv[0])) if c])

    def is_zero(self):
        return not self.simplify().terms

    def skew(self):
        """theta - theta^T (twice the Pi map)."""
        return (self - self.transpose()).simplify()

    def __repr__(self):
        return f"MultiDiffChain(arity={self.arity}, terms={len(self.terms)})"


def jet_decompose(theta):
    """[(I, theta^I)] with disjoint jet types, zero components omitted."""
    groups = {}
    for t in theta.simplify().terms:
        groups.setdefault(t.jet_type, []).append(t)
    return [(I, MultiDiffChain(theta.arity, theta.nvars, ts)) for I, ts in sorted(groups.items())]


def symbol(theta):
    """Component of type (k, ..., k), k the largest jet index present."""
    k = theta.order
    target = (k,) * theta.arity
    for I, comp in jet_decompose(theta):
        if I == target:
            return comp
    return MultiDiffChain(theta.arity, theta.nvars, [])


def chain_degree(component):
    I = component[0] if isinstance(component, tuple) else component
    return sum(I)


def jet_support(T, arity, model, kmax, kinds=("f", "v")):
    """Jet types J where the arity-ary operator T has a nonzero value at 0.

    Arguments run over monomials x^beta with |beta| <= kmax in function slots
    and, when ``"v"`` is in kinds, vertical monomial fields x^beta d/dp_i.
    T(x^beta_1, ...)(0) is nonzero only through terms whose derivative orders
    match the beta's, so the support is the set of (|beta_1|, ...) found.
    """
    probes = []
    z = Poly(model.nvars)
    for e in monomials(model.nvars, kmax):
        probes.append((sum(e), Section.function(Poly.mono(e))))
        if "v" in kinds:
            for i in range(model.m):
                comps = [z] * model.m
                comps[i] = Poly.mono(e)
                probes.append((sum(e), model.vertical(comps)))
    found = set()
    for combo in product(probes, repeat=arity):
        J = tuple(c[0] for c in combo)
        if J in found:
            continue
        val = T(*(c[1] for c in combo))
        c0 = val.constant_term() if isinstance(val, Poly) else val
        if c0:
            found.add(J)
    return found
