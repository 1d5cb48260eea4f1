"""Standard contact model on F^{2n+1}: forms and multivectors with polynomial
coefficients, the Reeb algebroid, the isomorphism # = beta^{-1} from the
volume form, invariant chains and their cycle checks.

Coordinates are ordered q_1, p_1, ..., q_n, p_n, z; alpha = dz - sum p_i dq_i,
R = d/dz and v = alpha ^ (d alpha)^n = n! dq_1 ^ dp_1 ^ ... ^ dz.  The
contraction i(e_I) for I = (i_1 < ... < i_k) feeds e_{i_1}, ..., e_{i_k} into
the leading slots, so i(e_I) omega = omega(e_{i_1}, ..., e_{i_k}, ...).
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product

from .algebra import Verdict
from .complex import boundary_value
from .linalg import Matrix, solve
from .poisson import Bivector, jacobi_defect
from .poly import Poly, PolyVectorField, Section, Term, monomials

__all__ = ["ContactModel", "Form", "Multivector", "ReebOps", "reeb_product",
           "invariant_chain", "InvariantChain", "contact_cycle_checks",
           "check_equivariance", "ContactMap", "reeb_kv_check"]


def _sort_sign(idx):
    """(sign, sorted tuple) of a tuple of distinct indices; sign 0 on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class _Graded:
    """Shared storage: ``coeffs`` maps strictly increasing index tuples to Polys."""

    __slots__ = ("nvars", "degree", "coeffs")

    def __init__(self, nvars, degree, coeffs=None):
        self.nvars, self.degree = nvars, degree
        c = {}
        for k, v in (coeffs or {}).items():
            v = v if isinstance(v, Poly) else Poly.const(nvars, v)
            s, key = _sort_sign(k)
            if len(k) != degree:
                raise ValueError(f"index tuple {k} has the wrong length for degree {degree}")
            if s == 0 or not v:
                continue
            c[key] = c.get(key, Poly(nvars)) + v * s
        self.coeffs = {k: v for k, v in sorted(c.items()) if v}

    def _new(self, degree, coeffs):
        return type(self)(self.nvars, degree, coeffs)

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValueError("degrees differ")
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, Poly(self.nvars)) + v
        return self._new(self.degree, c)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        return self._new(self.degree, {k: v * s for k, v in self.coeffs.items()})

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return type(other) is type(self) and self.degree == other.degree \
            and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.degree, tuple(self.coeffs.items())))

    def to_json(self, names):
        return {"^".join(names[i] for i in k) or "1": v.format(names)
                for k, v in self.coeffs.items()}


class Form(_Graded):
    """Differential form sum_J w_J dx_J."""

    __slots__ = ()

    def wedge(self, other):
        c = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                s, key = _sort_sign(k1 + k2)
                if s:
                    c[key] = c.get(key, Poly(self.nvars)) + v1 * v2 * s
        return Form(self.nvars, self.degree + other.degree, c)

    def d(self):
        c = {}
        for k, v in self.coeffs.items():
            for i in range(self.nvars):
                dv = v.diff(i)
                if dv:
                    s, key = _sort_sign((i,) + k)
                    if s:
                        c[key] = c.get(key, Poly(self.nvars)) + dv * s
        return Form(self.nvars, self.degree + 1, c)

    def interior(self, xi):
        """i(xi) of this form for a Multivector xi (leading-slot contraction)."""
        out = Form(self.nvars, self.degree - xi.degree)
        for I, a in xi.coeffs.items():
            for J, w in self.coeffs.items():
                if not set(I) <= set(J):
                    continue
                rest = tuple(j for j in J if j not in I)
                s, _ = _sort_sign(I + rest)
                out = out + Form(self.nvars, len(rest), {rest: a * w * (s * _sort_sign(J)[0])})
        return out

    def pullback(self, phi):
        """phi^* of the form for a polynomial map given by component Polys."""
        dphi = [Form(self.nvars, 1, {(j,): c.diff(j) for j in range(self.nvars)
                                     if c.diff(j)}) for c in phi]
        out = Form(self.nvars, self.degree)
        for J, w in self.coeffs.items():
            term = Form(self.nvars, 0, {(): w.compose(list(phi))})
            for j in J:
                term = term.wedge(dphi[j])
            out = out + term
        return out

    def is_constant(self):
        return all(v.is_constant() for v in self.coeffs.values())


class Multivector(_Graded):
    """Multivector field sum_I a_I e_I with e_I = e_{i_1} ^ ... ^ e_{i_k}."""

    __slots__ = ()

    def __call__(self, *fs):
        """Evaluate on df_1, ..., df_k: sum_I a_I det[d_{i_a} f_b]."""
        if len(fs) != self.degree:
            raise ValueError(f"{self.degree}-vector evaluated on {len(fs)} functions")
        out = Poly(self.nvars)
        if self.degree == 0:
            return self.coeffs.get((), Poly(self.nvars)) * 1
        for I, a in self.coeffs.items():
            for perm in permutations(range(self.degree)):
                s, _ = _sort_sign(perm)
                term = a * s
                for slot, k in enumerate(perm):
                    term = term * fs[slot].diff(I[k])
                    if not term:
                        break
                out = out + term
        return out

    def lie_along(self, X):
        """Lie derivative along a constant-coefficient vector field X (list of scalars)."""
        c = {}
        for I, a in self.coeffs.items():
            acc = Poly(self.nvars)
            for i, xi in enumerate(X):
                if xi:
                    acc = acc + a.diff(i) * xi
            c[I] = acc
        return Multivector(self.nvars, self.degree, c)

    def as_bivector(self):
        if self.degree != 2:
            raise ValueError("not a bivector")
        return Bivector(self.nvars, dict(self.coeffs))


class ContactModel:
    """Darboux model with truncation degree ``d`` for monomial certification."""

    def __init__(self, n, d=3):
        if n < 1:
            raise ValueError("n must be positive")
        self.n, self.d = n, d
        self.nvars = N = 2 * n + 1
        self.names = []
        for i in range(n):
            self.names += [f"q{i + 1}", f"p{i + 1}"]
        self.names.append("z")
        self.qi = [2 * i for i in range(n)]
        self.pi = [2 * i + 1 for i in range(n)]
        self.zi = 2 * n
        one = Poly.const(N, 1)
        c = {(self.zi,): one}
        for i in range(n):
            c[(self.qi[i],)] = -Poly.var(N, self.pi[i])
        self.alpha = Form(N, 1, c)
        self.dalpha = self.alpha.d()
        self.reeb = [0] * (N - 1) + [1]
        self.volume = self.alpha.wedge(self.power(self.dalpha, n))
        self.volume_constant = self.volume.coeffs[tuple(range(N))].constant_term()

    def var(self, i):
        return Poly.var(self.nvars, i)

    def q(self, i):
        return self.var(self.qi[i])

    def p(self, i):
        return self.var(self.pi[i])

    @property
    def z(self):
        return self.var(self.zi)

    def power(self, form, k):
        out = Form(self.nvars, 0, {(): 1})
        for _ in range(k):
            out = out.wedge(form)
        return out

    def beta(self, xi):
        """i(xi) v."""
        return self.volume.interior(xi)

    def sharp(self, omega):
        """Inverse of beta; exact because v has a constant coefficient."""
        N = self.nvars
        r = N - omega.degree
        full = tuple(range(N))
        c = {}
        for J, w in omega.coeffs.items():
            I = tuple(i for i in full if i not in J)
            s, _ = _sort_sign(I + J)
            c[I] = w * (Fraction(1) / (self.volume_constant * s))
        xi = Multivector(N, r, c)
        if self.beta(xi) != omega:
            raise ArithmeticError("beta(sharp(omega)) differs from omega")
        return xi

    def reeb_field(self):
        return Multivector(self.nvars, 1, {(self.zi,): 1})

    def pi2(self):
        """Pi_2 = #(alpha ^ (d alpha)^{n-1})."""
        return self.sharp(self.alpha.wedge(self.power(self.dalpha, self.n - 1)))

    def functions(self, degree=None):
        return [Poly.mono(e) for e in monomials(self.nvars, self.d if degree is None else degree)]

    def section(self, c, f):
        """Section c R + f of the Reeb algebroid (c a Poly or scalar)."""
        N = self.nvars
        c = c if isinstance(c, Poly) else Poly.const(N, c)
        return Section(PolyVectorField([c]), f)

    def sections(self, degree=None, constant_reeb=True):
        """R (or monomial multiples of R) followed by monomial functions."""
        N = self.nvars
        deg = self.d if degree is None else degree
        fs = self.functions(deg)
        zero = Poly(N)
        if constant_reeb:
            alg = [self.section(1, zero)]
        else:
            alg = [self.section(f, zero) for f in fs]
        return alg + [self.section(0, f) for f in fs]

    def label(self, x):
        if x.vf.comps[0]:
            return f"({x.vf.comps[0].format(self.names)})R"
        return x.fn.format(self.names)


class ReebOps:
    """Split-algebra operations for sections c R + f: (cR, f)(c'R, f') =
    (c dz(c') R, f f' + c dz(f')).  ``values="W"`` uses the function module.
    """

    def __init__(self, model, values="W"):
        self.model, self.values = model, values
        self.N = model.nvars

    def _R(self, f):
        return f.diff(self.model.zi)

    def mul(self, x, y):
        c, c2 = x.vf.comps[0], y.vf.comps[0]
        return Section(PolyVectorField([c * self._R(c2)]), x.fn * y.fn + c * self._R(y.fn))

    def left(self, a, v):
        if self.values == "G":
            return self.mul(a, v)
        return a.fn * v + a.vf.comps[0] * self._R(v)

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
            return Section(PolyVectorField([Poly(self.N)]), Poly(self.N))
        return Poly(self.N)

    def embed(self, value):
        if isinstance(value, Section):
            return value
        return Section(PolyVectorField([Poly(self.N)]), value)


def reeb_product(model, f, g):
    """f R . g R = f <dg, R> R, returned as the coefficient of R."""
    return f * g.diff(model.zi)


def reeb_kv_check(model, degree=None):
    """KV identity of the Reeb product on monomial triples."""
    fs = model.functions(degree)

    def assoc(a, b, c):
        return reeb_product(model, a, reeb_product(model, b, c)) - \
            reeb_product(model, reeb_product(model, a, b), c)

    for a, b, c in product(range(len(fs)), repeat=3):
        if b < a:
            continue
        v = assoc(fs[a], fs[b], fs[c]) - assoc(fs[b], fs[a], fs[c])
        if v:
            return Verdict("reeb_kv", False, [fs[i].format(model.names) for i in (a, b, c)])
    return Verdict("reeb_kv", True, None, {"degree": model.d if degree is None else degree})


class InvariantChain:
    """alpha^l (x) Pi: alpha pairs the first l arguments, Pi eats the rest."""

    def __init__(self, model, ell, multivector, name):
        self.model, self.ell, self.pi, self.name = model, ell, multivector, name
        self.arity = ell + multivector.degree

    def __call__(self, *xs):
        if len(xs) != self.arity:
            raise ValueError(f"{self.name} takes {self.arity} arguments")
        out = Poly.const(self.model.nvars, 1)
        for x in xs[:self.ell]:
            # alpha(c R) = c since alpha(R) = 1
            out = out * x.vf.comps[0]
            if not out:
                return out
        if self.pi.degree == 0:
            return out * self.pi()
        return out * self.pi(*(x.fn for x in xs[self.ell:]))


def invariant_chain(model, ell, m, kind=None):
    """alpha^l (x) #(alpha ^ (d alpha)^m) or alpha^l (x) #((d alpha)^m).

    ``kind`` is ``"alpha"`` (even multivector degree 2(n-m)) or ``"dalpha"``
    (odd degree 2(n-m)+1).  By default m = n picks ``"dalpha"`` so that
    (0, n) is the Reeb field, and every other m picks ``"alpha"``.
    """
    n = model.n
    if not 0 <= m <= n:
        raise ValueError(f"m must lie in 0..{n}")
    if ell < 0 or ell > 3:
        raise ValueError("l must lie in 0..3")
    kind = kind or ("dalpha" if m == n else "alpha")
    if kind == "alpha":
        form = model.alpha.wedge(model.power(model.dalpha, m))
    elif kind == "dalpha":
        form = model.power(model.dalpha, m)
    else:
        raise ValueError("kind must be 'alpha' or 'dalpha'")
    P = model.sharp(form)
    if not P.lie_along(model.reeb).is_zero():
        raise ArithmeticError("L_R of the invariant multivector is nonzero")
    return InvariantChain(model, ell, P, f"alpha^{ell}(x)#({kind},{m})")


def _scan_boundary(name, chain, ops, basis, labels, degree):
    q = chain.arity
    for t in product(range(len(basis)), repeat=q + 1):
        v = boundary_value(chain, tuple(basis[i] for i in t), ops)
        if v:
            return Verdict(name, False, [labels[i] for i in t], {"value": v.format(ops.model.names)})
    return Verdict(name, True, None, {"degree": degree})


def _not_a_boundary(model, target, degree, order=2, coeff_degree=2):
    """Solve delta_1 eta = target for eta in a truncated family of 1-chains.

    eta(cR + f) = c phi + D f with phi of degree <= coeff_degree and D a
    differential operator of order <= ``order`` with coefficients of degree
    <= coeff_degree.  True when the linear system has no solution.
    """
    N = model.nvars
    ops = ReebOps(model)
    coeffs = [Poly.mono(e) for e in monomials(N, coeff_degree)]
    terms = [Term([("v", 0, (0,) * N)], c) for c in coeffs]
    terms += [Term([("f", a)], c) for a in monomials(N, order) for c in coeffs]
    basis = model.sections(degree)
    pairs = list(product(basis, repeat=2))
    big = 2 * degree + coeff_degree + 2
    index = {e: k for k, e in enumerate(monomials(N, big))}
    width = len(index)

    class _One:
        def __init__(self, t):
            self.t = t

        def __call__(self, x):
            return self.t((x,))

    cols = []
    for t in terms:
        col = {}
        ch = _One(t)
        for k, (a, b) in enumerate(pairs):
            v = boundary_value(ch, (a, b), ops)
            for e, x in v.terms.items():
                col[k * width + index[e]] = x
        cols.append(col)
    rhs = [Fraction(0)] * (len(pairs) * width)
    for k, (a, b) in enumerate(pairs):
        for e, x in target(a, b).terms.items():
            rhs[k * width + index[e]] = x
    M = Matrix.from_columns(cols, len(rhs))
    return solve(M, rhs) is None, len(terms)


@dataclass
class ContactReport:
    n: int
    degree: int
    verdicts: list
    conventions: dict

    @property
    def ok(self):
        return all(self.verdicts)


def contact_cycle_checks(model, degree=None, boundary_degree=1):
    """Cycle, Poisson and class verdicts for R, alpha (x) R and Pi_2 in C(G_R, W)."""
    n = model.n
    degree = min(model.d, 2) if degree is None else degree
    ops = ReebOps(model)
    basis = model.sections(degree)
    labels = [model.label(x) for x in basis]
    names = model.names
    R = invariant_chain(model, 0, n)
    aR = invariant_chain(model, 1, n)
    P2 = model.pi2()
    Pi2 = InvariantChain(model, 0, P2, "Pi_2")
    verdicts = [
        _scan_boundary("delta1_R", R, ops, basis, labels, degree),
        _scan_boundary("delta1_alphaR", aR, ops, basis, labels, degree),
        _scan_boundary("delta2_Pi2", Pi2, ops, basis, labels, degree),
    ]
    jac = jacobi_defect(P2.as_bivector(), model.d, names).verdict("jacobi_Pi2")
    verdicts.append(jac)
    verdicts.append(Verdict("LR_Pi2", P2.lie_along(model.reeb).is_zero()))
    verdicts.append(Verdict("LR_volume", Multivector(model.nvars, 0, {(): model.volume_constant})
                            .lie_along(model.reeb).is_zero() and model.volume.is_constant()))
    # transverse bracket against the d alpha symplectic bracket on (q, p) monomials
    qp = [i for i in range(model.nvars) if i != model.zi]
    fs = [f for f in model.functions() if not f.depends_on(model.zi)]
    # {q_1, p_1} = 1 / n with v = n! times the coordinate volume
    scale = P2(model.q(0), model.p(0)).constant_term()
    bad = None if scale else ["q1", "p1"]
    for f, g in combinations_with_replacement(fs, 2):
        if bad:
            break
        want = Poly(model.nvars)
        for i in range(n):
            qi, pi = model.qi[i], model.pi[i]
            want = want + f.diff(qi) * g.diff(pi) - f.diff(pi) * g.diff(qi)
        if P2(f, g) != want * scale:
            bad = [f.format(names), g.format(names)]
    verdicts.append(Verdict("transverse_bracket", bad is None, bad,
                            {"convention": "{q_i, p_i} = c", "c": str(scale),
                             "variables": [names[i] for i in qp]}))
    # Pi_2 annihilates alpha: the z (Reeb) direction is the degenerate one
    kernel_ok = True
    for g in model.functions(1):
        val = Poly(model.nvars)
        for (j,), aj in model.alpha.coeffs.items():
            val = val + aj * P2(model.var(j), g)
        if val:
            kernel_ok = False
    verdicts.append(Verdict("degenerate_direction", kernel_ok, None,
                            {"kernel": "alpha", "rank": 2 * n}))
    # nonvanishing classes within the truncated complex
    nb, size = _not_a_boundary(model, lambda a, b: Pi2(a, b), boundary_degree)
    verdicts.append(Verdict("Pi2_not_boundary", nb, None,
                            {"truncated": True, "unknowns": size, "degree": boundary_degree}))
    # delta_0 vanishes on J(W) = first integrals of R, so R is not a boundary
    Rnb = any(R(x) for x in basis)
    d0 = all(not boundary_value(lambda w=w: w, (x,), ops)
             for w in [f for f in model.functions(degree) if not f.depends_on(model.zi)]
             for x in basis)
    verdicts.append(Verdict("R_not_boundary", Rnb and d0, None,
                            {"truncated": True, "delta0_zero": d0}))
    verdicts.append(reeb_kv_check(model))
    conventions = {"order": names, "volume_constant": str(model.volume_constant),
                   "sharp_dalpha_n": "R", "Pi2": P2.to_json(names)}
    return ContactReport(n, degree, verdicts, conventions)


class ContactMap:
    """Polynomial map with a polynomial inverse, both given by component lists."""

    def __init__(self, model, forward, inverse, name="phi"):
        self.model, self.forward, self.inverse, self.name = model, list(forward), list(inverse), name
        N = model.nvars
        ident = [Poly.var(N, i) for i in range(N)]
        comp = [f.compose(self.inverse) for f in self.forward]
        if comp != ident or [f.compose(self.forward) for f in self.inverse] != ident:
            raise ValueError("maps are not mutually inverse")

    @classmethod
    def translation_z(cls, model, c):
        N = model.nvars
        fw = [Poly.var(N, i) for i in range(N)]
        inv = list(fw)
        fw[model.zi] = fw[model.zi] + c
        inv[model.zi] = inv[model.zi] - c
        return cls(model, fw, inv, f"z+{c}")

    @classmethod
    def scaling(cls, model, lam):
        """q_i -> lam q_i, p_i -> p_i / lam, z -> z."""
        N = model.nvars
        lam = Fraction(lam)
        fw = [Poly.var(N, i) for i in range(N)]
        inv = list(fw)
        for i in range(model.n):
            qi, pi = model.qi[i], model.pi[i]
            fw[qi], inv[qi] = fw[qi] * lam, inv[qi] * (1 / lam)
            fw[pi], inv[pi] = fw[pi] * (1 / lam), inv[pi] * lam
        return cls(model, fw, inv, f"scale({lam})")

    def push_function(self, f):
        """phi^* h = h o phi^{-1}."""
        return f.compose(self.inverse)


def check_equivariance(chain, phi, degree=None):
    """theta(phi~ xi_1, ...) = theta(xi_1, ...) o phi^{-1} on monomial sections.

    phi~(cR, f) = (cR, f o phi^{-1}); phi must preserve alpha and R.
    """
    model = phi.model
    if model.alpha.pullback(phi.forward) != model.alpha:
        raise ValueError(f"{phi.name} does not preserve alpha")
    N = model.nvars
    # phi_* R = R: the z-column of the Jacobian is e_z
    col = [c.diff(model.zi) for c in phi.forward]
    if col != [Poly.const(N, 1 if i == model.zi else 0) for i in range(N)]:
        raise ArithmeticError(f"{phi.name} preserves alpha but moves R")
    degree = min(model.d, 2) if degree is None else degree
    basis = model.sections(degree)

    def act(x):
        return model.section(x.vf.comps[0].compose(phi.inverse), phi.push_function(x.fn))

    moved = [act(x) for x in basis]
    for t in product(range(len(basis)), repeat=chain.arity):
        lhs = chain(*(moved[i] for i in t))
        rhs = phi.push_function(chain(*(basis[i] for i in t)))
        if lhs != rhs:
            return Verdict(f"equivariance[{phi.name}]", False,
                           [model.label(basis[i]) for i in t])
    return Verdict(f"equivariance[{phi.name}]", True, None, {"degree": degree,
                                                            "chain": chain.name})
