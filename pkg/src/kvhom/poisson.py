"""KV chains and cycles, Poisson extraction from symbols, the cotangent lift
and its projection, and lifts of vector fields.

Bracket convention: the bivector sum_{i<j} P_ij d_i ^ d_j acts by
{f, g} = sum_{i<j} P_ij (d_i f d_j g - d_j f d_i g), so {x_i, x_j} = P_ij.
The skew part of a 2-chain is theta - theta^T; its order-1 symbol is read
directly as such a bivector.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product

from .algebra import Verdict
from .complex import boundary_value
from .linalg import Echelon, Matrix, kernel_basis, rank
from .poly import (CotangentModel, MultiDiffChain, Poly, PolyOps, PolyVectorField,
                   Section, Term, monomials, symbol)

__all__ = ["Bivector", "JacobiReport", "jacobi_defect", "jacobi_scan", "leibniz_scan",
           "theta_associator", "KVCycleReport", "is_kv_cycle", "PoissonReport",
           "TheoremCheckFailure", "ProjectionError", "extract_poisson",
           "first_integral_closure", "parallel_check", "project_to_base", "LiftResult",
           "lift_poisson", "roundtrip_check", "VectorFieldLift", "lift_vector_field",
           "lift_independence", "cycle_space", "LIFT_MODES", "model_kv_cycle",
           "cotangent_generators", "zero_section", "lifted_bracket", "vertical_compatibility",
           "cotangent_lift_field", "j_space_functional", "lie_action"]

LIFT_MODES = ("zero-section", "local-24", "horizontal")


class TheoremCheckFailure(Exception):
    """A proved statement failed on a concrete input; ``diagnostics`` has the data."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ProjectionError(ValueError):
    """The bracket of two pullbacks depends on the fibre coordinates."""


def _poly(nvars, v):
    return v if isinstance(v, Poly) else Poly.const(nvars, v)


class Bivector:
    """Antisymmetric polynomial bivector, stored on pairs i < j."""

    __slots__ = ("nvars", "coeffs")

    def __init__(self, nvars, coeffs=None):
        self.nvars = nvars
        c = {}
        for (i, j), v in (coeffs or {}).items():
            v = _poly(nvars, v)
            if not (0 <= i < nvars and 0 <= j < nvars):
                raise IndexError(f"index pair {(i, j)} outside 0..{nvars - 1}")
            if i == j:
                if v:
                    raise ValueError("diagonal coefficient must vanish")
                continue
            key, val = ((i, j), v) if i < j else ((j, i), -v)
            if key in c and c[key] != val:
                raise ValueError(f"coefficients at {(i, j)} violate antisymmetry")
            c[key] = val
        self.coeffs = {k: v for k, v in sorted(c.items()) if v}

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def so3(cls):
        """P_12 = x3, P_23 = x1, P_31 = x2."""
        x = [Poly.var(3, i) for i in range(3)]
        return cls(3, {(0, 1): x[2], (1, 2): x[0], (2, 0): x[1]})

    @classmethod
    def symplectic(cls, m):
        """Constant sum_i d_{2i} ^ d_{2i+1} on 2m variables."""
        return cls(2 * m, {(2 * i, 2 * i + 1): 1 for i in range(m)})

    def coeff(self, i, j):
        if i == j:
            return Poly(self.nvars)
        if i < j:
            return self.coeffs.get((i, j), Poly(self.nvars))
        return -self.coeffs.get((j, i), Poly(self.nvars))

    def bracket(self, f, g):
        out = Poly(self.nvars)
        for (i, j), c in self.coeffs.items():
            fi, fj = f.diff(i), f.diff(j)
            gi, gj = g.diff(i), g.diff(j)
            if (fi and gj) or (fj and gi):
                out = out + c * (fi * gj - fj * gi)
        return out

    __call__ = bracket

    def jacobiator(self, f, g, h):
        br = self.bracket
        return br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))

    def is_zero(self):
        return not self.coeffs

    def is_constant(self):
        return all(c.is_constant() for c in self.coeffs.values())

    def degree(self):
        return max((c.degree() for c in self.coeffs.values()), default=-1)

    def extend(self, nvars, offset=0):
        return Bivector(nvars, {(i + offset, j + offset): c.extend(nvars, offset)
                                for (i, j), c in self.coeffs.items()})

    def __add__(self, other):
        keys = set(self.coeffs) | set(other.coeffs)
        return Bivector(self.nvars, {k: self.coeff(*k) + other.coeff(*k) for k in keys})

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        return Bivector(self.nvars, {k: c * s for k, c in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, Bivector) and self.nvars == other.nvars \
            and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.nvars, tuple(self.coeffs.items())))

    def __repr__(self):
        return f"Bivector({self.nvars}, {self.to_json()})"

    def to_json(self, names=None):
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        return {f"{names[i]}^{names[j]}": c.format(names) for (i, j), c in self.coeffs.items()}


def _coords(n):
    return [Poly.var(n, i) for i in range(n)]


def _mono_functions(nvars, degree):
    return [Poly.mono(e) for e in monomials(nvars, degree)]


def jacobi_scan(bracket, functions, labels=None, limit=1):
    """Cyclic sum over unordered triples; returns (ok, [(labels, defect)], count)."""
    labels = labels or [f.format() for f in functions]
    cache = {}

    def br(i, j):
        key = (i, j)
        if key not in cache:
            cache[key] = bracket(functions[i], functions[j])
        return cache[key]

    bad, count = [], 0
    for i, j, k in combinations_with_replacement(range(len(functions)), 3):
        f, g, h = functions[i], functions[j], functions[k]
        val = bracket(f, br(j, k)) + bracket(g, br(k, i)) + bracket(h, br(i, j))
        count += 1
        if val:
            bad.append(((labels[i], labels[j], labels[k]), val))
            if len(bad) >= limit:
                break
    return not bad, bad, count


def leibniz_scan(bracket, functions, labels=None, limit=1):
    """bracket(g, f h) = f bracket(g, h) + bracket(g, f) h on ordered triples."""
    labels = labels or [f.format() for f in functions]
    bad, count = [], 0
    n = len(functions)
    for i, j, k in product(range(n), repeat=3):
        g, f, h = functions[i], functions[j], functions[k]
        val = bracket(g, f * h) - f * bracket(g, h) - bracket(g, f) * h
        count += 1
        if val:
            bad.append(((labels[i], labels[j], labels[k]), val))
            if len(bad) >= limit:
                break
    return not bad, bad, count


@dataclass
class JacobiReport:
    ok: bool
    coordinate_ok: bool
    degree: int
    triples_checked: int
    defects: list = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def verdict(self, name="jacobi"):
        w = None
        if self.defects:
            t, v = self.defects[0]
            w = {"triple": list(t), "defect": v.format()}
        return Verdict(name, self.ok, w, {"degree": self.degree,
                                          "triples": self.triples_checked})


def jacobi_defect(P, degree=2, names=None):
    """Jacobi identity: exact on coordinate triples, then a monomial scan.

    The jacobiator of a bivector is a trivector, so the coordinate check is
    already complete; the scan certifies the bracket itself up to ``degree``.
    """
    n = P.nvars
    names = names or [f"x{i + 1}" for i in range(n)]
    coords = _coords(n)
    defects = []
    for i, j, k in combinations(range(n), 3):
        v = P.jacobiator(coords[i], coords[j], coords[k])
        if v:
            defects.append(((names[i], names[j], names[k]), v))
            break
    coord_ok = not defects
    fs = _mono_functions(n, degree)
    ok, bad, count = jacobi_scan(P.bracket, fs, [f.format(names) for f in fs])
    return JacobiReport(coord_ok and ok, coord_ok, degree, count, defects + bad)


def theta_associator(theta, x1, x2, x3, ops=None, embed=None):
    """theta(x1, theta(x2, x3)) - theta(theta(x1, x2), x3)."""
    emb = embed or (getattr(ops, "embed", None) if ops is not None else None) or (lambda v: v)
    a = theta(x1, emb(theta(x2, x3)))
    b = theta(emb(theta(x1, x2)), x3)
    return ops.sub(a, b) if ops is not None else a - b


@dataclass
class KVCycleReport:
    kv_chain: Verdict
    delta_theta: Verdict
    delta_pi: Verdict
    degree: object = None

    @property
    def ok(self):
        return bool(self.kv_chain and self.delta_theta and self.delta_pi)

    def __bool__(self):
        return self.ok

    def verdicts(self):
        return [self.kv_chain, self.delta_theta, self.delta_pi]


def _is_zero_value(v):
    if isinstance(v, (Poly, Section)):
        return v.is_zero()
    return not any(v)


def _fmt_value(v):
    if isinstance(v, Poly):
        return v.format()
    if isinstance(v, Section):
        return repr(v)
    return [str(x) for x in v]


def is_kv_cycle(theta, ops, basis, labels=None, embed=None, degree=None,
                grouping="A"):
    """The three KV-cycle conditions on all basis triples, first witness each.

    (i) the theta-associator is symmetric in its first two arguments;
    (ii) delta theta = 0; (iii) delta Pi_theta = 0, Pi_theta = (theta - theta^T)/2.
    """
    labels = labels or [repr(b) for b in basis]
    n = len(basis)
    half = Fraction(1, 2)
    theta = _memo(theta)

    def pi(x, y):
        d = ops.sub(theta(x, y), theta(y, x))
        return _scale(d, half)

    def scan(name, fn, triples):
        for t in triples:
            v = fn(*(basis[i] for i in t))
            if not _is_zero_value(v):
                return Verdict(name, False, [labels[i] for i in t],
                               {"value": _fmt_value(v), "degree": degree})
        return Verdict(name, True, None, {"degree": degree, "basis": n})

    def sym(a, b, c):
        return ops.sub(theta_associator(theta, a, b, c, ops, embed),
                       theta_associator(theta, b, a, c, ops, embed))

    pairs = [(i, j, k) for i in range(n) for j in range(i + 1, n) for k in range(n)]
    triples = list(product(range(n), repeat=3))
    return KVCycleReport(
        scan("kv_chain", sym, pairs),
        scan("delta_theta", lambda a, b, c: boundary_value(theta, (a, b, c), ops, grouping),
             triples),
        scan("delta_pi", lambda a, b, c: boundary_value(pi, (a, b, c), ops, grouping),
             triples),
        degree)


def _memo(fn):
    cache = {}

    def wrapped(*args):
        if not all(isinstance(a, (Poly, Section)) for a in args):
            return fn(*args)
        if args not in cache:
            cache[args] = fn(*args)
        return cache[args]
    return wrapped


def _scale(v, s):
    if isinstance(v, (Poly,)):
        return v * s
    if isinstance(v, Section):
        return v.scale(s)
    return tuple(s * x for x in v)


def _model_basis(model, degree, ideal=True):
    """Functions first, then vertical fields, with readable labels."""
    basis = model.section_basis(degree, ideal)
    labels = []
    for s in basis:
        if s.vf.is_zero():
            labels.append(s.fn.format(model.names))
        else:
            i = next(k for k, c in enumerate(s.vf.comps) if c)
            labels.append(f"({s.vf.comps[i].format(model.names)})d{model.names[i]}")
    return basis, labels


def model_kv_cycle(theta, model, degree=2):
    """is_kv_cycle for a W-valued chain on the functional cotangent model."""
    basis, labels = _model_basis(model, degree)
    return is_kv_cycle(theta, model.ops("W"), basis, labels, degree=degree)


@dataclass
class PoissonReport:
    order: int
    bivector: Bivector
    cycle: KVCycleReport = None
    jacobi: Verdict = None
    leibniz: Verdict = None
    first_integral: Verdict = None
    parallel: Verdict = None
    diagnostics: dict = field(default_factory=dict)

    def verdicts(self):
        out = []
        if self.bivector is not None and not self.bivector.is_zero():
            out.append(Verdict("order_one", self.order == 1, None, {"order": self.order}))
        if self.cycle is not None:
            out.extend(self.cycle.verdicts())
        for v in (self.jacobi, self.leibniz, self.first_integral, self.parallel):
            if v is not None:
                out.append(v)
        return out

    @property
    def ok(self):
        return all(self.verdicts())


def _skew_bivector(skew, nvars):
    """Bivector read off the order-1 function-slot terms of a skew symbol."""
    table, other = {}, []
    for t in skew.terms:
        s1, s2 = t.slots
        if s1[0] == "f" and s2[0] == "f" and sum(s1[1]) == 1 and sum(s2[1]) == 1:
            i, j = s1[1].index(1), s2[1].index(1)
            table[(i, j)] = table.get((i, j), Poly(nvars)) + t.coeff
        else:
            other.append(t)
    for (i, j), c in table.items():
        if table.get((j, i), Poly(nvars)) != -c:
            raise TheoremCheckFailure("skew symbol is not antisymmetric",
                                      {"pair": [i, j]})
    return Bivector(nvars, {k: v for k, v in table.items() if k[0] < k[1]}), other


def extract_poisson(theta, model=None, degree=2, check_cycle=False, cycle_degree=2):
    """Poisson bivector from the skew part of the symbol of an order-k chain.

    A nonzero skew symbol in order k > 1 contradicts the order theorem and
    raises TheoremCheckFailure carrying the offending terms.  With
    ``check_cycle`` the KV-cycle conditions are evaluated on ``model``.
    """
    n = theta.nvars
    k = theta.order
    sym = symbol(theta)
    skew = sym.skew()
    cycle = model_kv_cycle(theta, model, cycle_degree) if check_cycle else None
    diag = {"symbol_terms": len(sym.terms), "skew_terms": len(skew.terms)}
    if skew.is_zero():
        P = Bivector.zero(n)
    elif k > 1:
        raise TheoremCheckFailure(
            f"nonzero skew symbol in order {k}",
            {"order": k, "terms": [repr(t) for t in skew.terms]})
    elif k == 1:
        P, other = _skew_bivector(skew, n)
        if other:
            diag["non_function_terms"] = [repr(t) for t in other]
    else:
        P = Bivector.zero(n)
        diag["order_zero_skew"] = [repr(t) for t in skew.terms]
    names = model.names if model is not None else None
    jac = jacobi_defect(P, degree, names).verdict()
    fs = _mono_functions(n, degree)
    lok, lbad, lcount = leibniz_scan(P.bracket, fs)
    leib = Verdict("leibniz", lok, [list(lbad[0][0])] if lbad else None,
                   {"degree": degree, "triples": lcount})
    return PoissonReport(k, P, cycle, jac, leib, None, parallel_check(P), diag)


def first_integral_closure(bracket, f, g, generators, name="first_integral_closure"):
    """Vertical derivations: s.{f,g} = {s.f,g} + {f,s.g} and {f,g} again a first integral.

    ``generators`` are callables acting on functions (anchor images).
    """
    for s in generators:
        if s(f) or s(g):
            raise ValueError("arguments are not first integrals")
    h = bracket(f, g)
    for idx, s in enumerate(generators):
        lhs = s(h)
        rhs = bracket(s(f), g) + bracket(f, s(g))
        if lhs != rhs or lhs:
            return Verdict(name, False, {"generator": idx, "value": lhs.format()})
    return Verdict(name, True, None, {"generators": len(generators),
                                      "bracket": h.format()})


def cotangent_generators(model, degree):
    """Anchor images of the vertical fields up to ``degree`` (unit fields included)."""
    return [s.vf for s in model.vertical_basis(degree, ideal=False)]


def parallel_check(P):
    """On a flat model a bivector is parallel iff its coefficients are constant."""
    bad = next((k for k, c in P.coeffs.items() if not c.is_constant()), None)
    return Verdict("parallel", bad is None,
                   None if bad is None else {"pair": list(bad),
                                             "coefficient": P.coeffs[bad].format()})


def project_to_base(bracket, model, degree=2):
    """Base bivector {q_i, q_j} from pullbacks, after checking p-independence.

    Every pair of monomial pullbacks up to ``degree`` is bracketed; any
    p-dependence raises ProjectionError, and the base bivector must reproduce
    each bracket exactly.
    """
    m = model.m
    keep = list(range(m))
    base = [Poly.mono(e) for e in monomials(m, degree)]
    ups = [model.pullback(f) for f in base]
    coeffs = {}
    for i, j in combinations(range(m), 2):
        v = bracket(model.pullback(Poly.var(m, i)), model.pullback(Poly.var(m, j)))
        if any(v.depends_on(m + k) for k in range(m)):
            raise ProjectionError(f"bracket of q{i + 1}, q{j + 1} depends on p: {v.format(model.names)}")
        coeffs[(i, j)] = v.restrict(keep)
    P = Bivector(m, coeffs)
    for a, b in combinations_with_replacement(range(len(base)), 2):
        v = bracket(ups[a], ups[b])
        if any(v.depends_on(m + k) for k in range(m)):
            raise ProjectionError(
                f"bracket of pullbacks {base[a].format()}, {base[b].format()} depends on p")
        if v.restrict(keep) != P.bracket(base[a], base[b]):
            raise ProjectionError(
                f"pullback bracket of {base[a].format()}, {base[b].format()} is not a biderivation")
    return P


def zero_section(model, f):
    """f restricted to p = 0, as a function of q."""
    m = model.m
    return Poly(m, {e[:m]: c for e, c in f.terms.items() if not any(e[m:])})


@dataclass
class LiftResult:
    mode: str
    bracket: object
    bivector: object
    theta: object
    model: object
    verdicts: list
    cycle: KVCycleReport = None

    @property
    def ok(self):
        return all(self.all_verdicts())

    def all_verdicts(self):
        return list(self.verdicts) + (self.cycle.verdicts() if self.cycle is not None else [])


def lifted_bracket(P, model, mode="zero-section"):
    """(bracket callable, Bivector or None) for the cotangent lift of P."""
    m, N = model.m, model.nvars
    if mode == "zero-section":
        def bracket(f, g):
            return model.pullback(P.bracket(zero_section(model, f), zero_section(model, g)))
        return bracket, None
    if mode == "local-24":
        c = {}
        for i in range(m):
            for j in range(m):
                pij = P.coeff(i, j)
                if pij:
                    c[(m + i, j)] = pij.extend(N, 0)
        B = Bivector(N, c)
        return B.bracket, B
    if mode == "horizontal":
        B = P.extend(N, 0)
        return B.bracket, B
    raise ValueError(f"lift mode must be one of {LIFT_MODES}")


def _fmt_field(X, names):
    return " + ".join(f"({c.format(names)})d{names[i]}" for i, c in enumerate(X.comps) if c) or "0"


def vertical_compatibility(bracket, model, degree):
    """Vertical compatibility: s.P(f,g) - P(s.f, g) - P(f, s.g) = 0 for vertical s in the (p) ideal."""
    fs = _mono_functions(model.nvars, degree)
    pairs = list(combinations_with_replacement(range(len(fs)), 2))
    table = {(a, b): bracket(fs[a], fs[b]) for a, b in pairs}
    for s in model.vertical_basis(degree, ideal=True):
        for a, b in pairs:
            f, g = fs[a], fs[b]
            v = s.vf(table[(a, b)]) - bracket(s.vf(f), g) - bracket(f, s.vf(g))
            if v:
                return Verdict("vertical_compatibility", False,
                               {"field": _fmt_field(s.vf, model.names), "f": f.format(model.names),
                                "g": g.format(model.names), "value": v.format(model.names)})
    return Verdict("vertical_compatibility", True, None, {"degree": degree})


def lift_poisson(P, mode="zero-section", degree=2, cycle_degree=2, check_cycle=True,
                 require_poisson=True):
    """Cotangent lift of a base Poisson bivector and theta = P~/2 on function parts.

    Every mode measures Jacobi, Leibniz and vertical compatibility on monomials
    up to ``degree``; ``check_cycle`` adds the KV-cycle report of theta.
    """
    if mode not in LIFT_MODES:
        raise ValueError(f"lift mode must be one of {LIFT_MODES}")
    if require_poisson and not jacobi_defect(P, degree):
        raise ValueError("P is not a Poisson bivector")
    model = CotangentModel(P.nvars, degree, finite=False)
    bracket, B = lifted_bracket(P, model, mode)
    half = Fraction(1, 2)

    def theta(x, y):
        return bracket(x.fn, y.fn) * half

    fs = _mono_functions(model.nvars, degree)
    labels = [f.format(model.names) for f in fs]
    jok, jbad, jn = jacobi_scan(bracket, fs, labels)
    lok, lbad, ln = leibniz_scan(bracket, fs, labels)
    verdicts = [
        Verdict("lift_jacobi", jok, list(jbad[0][0]) if jbad else None,
                {"degree": degree, "triples": jn}),
        Verdict("lift_leibniz", lok, list(lbad[0][0]) if lbad else None,
                {"degree": degree, "triples": ln}),
        vertical_compatibility(bracket, model, degree),
    ]
    cycle = model_kv_cycle(theta, model, cycle_degree) if check_cycle else None
    return LiftResult(mode, bracket, B, theta, model, verdicts, cycle)


def roundtrip_check(P, degree=2, mode="zero-section"):
    """Project the lift back and compare with P; probe uniqueness against a second lift.

    The probe lifts P horizontally as well: the two brackets differ on the
    total space yet agree on pullbacks, so the projected difference is zero.
    """
    model = CotangentModel(P.nvars, degree, finite=False)
    bracket, _ = lifted_bracket(P, model, mode)
    try:
        back = project_to_base(bracket, model, degree)
    except ProjectionError as exc:
        return Verdict("roundtrip", False, str(exc))
    if back != P:
        return Verdict("roundtrip", False, {"projected": back.to_json(), "input": P.to_json()})
    other, _ = lifted_bracket(P, model, "horizontal")

    def diff(f, g):
        return bracket(f, g) - other(f, g)

    probe = project_to_base(diff, model, degree)
    if not probe.is_zero():
        return Verdict("roundtrip", False, {"difference": probe.to_json()})
    fs = _mono_functions(model.nvars, degree)
    differs = any(diff(f, g) for f, g in combinations(fs, 2))
    return Verdict("roundtrip", True, None,
                   {"degree": degree, "mode": mode, "lifts_differ": differs})


# vector field lifts


def cotangent_lift_field(X, model):
    """X~ = sum X_i d/dq_i - sum_{i,j} p_j (dX_j/dq_i) d/dp_i on the cotangent model."""
    m, N = model.m, model.nvars
    if X.nvars != m:
        raise ValueError("vector field on a base of a different dimension")
    Xs = [c.extend(N, 0) for c in X.comps]
    comps = list(Xs) + [Poly(N)] * m
    for i in range(m):
        acc = Poly(N)
        for j in range(m):
            acc = acc + model.p(j) * Xs[j].diff(i)
        comps[m + i] = -acc
    return PolyVectorField(comps)


def lie_action(Xt, ops):
    """L(s, f) = ([X~, s], X~ f): the Lie derivative acting on sections."""
    def L(x):
        return Section(Xt.bracket(x.vf), Xt(x.fn))
    return L


@dataclass
class VectorFieldLift:
    field: PolyVectorField
    lift: PolyVectorField
    L: object
    closed: Verdict


def lift_vector_field(X, model, degree=None):
    """Cotangent lift X~, its Lie-derivative 1-chain L and the verdict delta_1 L = 0."""
    degree = model.d if degree is None else degree
    if max((c.degree() for c in X.comps), default=-1) > degree - 1:
        raise ValueError("vector field degree exceeds the truncation bound")
    Xt = cotangent_lift_field(X, model)
    ops = PolyOps(model.nvars, "G")
    L = lie_action(Xt, ops)
    basis, labels = _model_basis(model, degree)
    closed = Verdict("delta_L", True, None, {"degree": degree})
    for a, b in product(range(len(basis)), repeat=2):
        v = boundary_value(lambda x: L(x), (basis[a], basis[b]), ops)
        if not v.is_zero():
            closed = Verdict("delta_L", False, [labels[a], labels[b]], {"value": repr(v)})
            break
    return VectorFieldLift(X, Xt, L, closed)


def _section_coords(x, model, degree, index):
    """Coordinates of a section in the monomial basis of sections up to ``degree``."""
    out = {}
    for i, c in enumerate(x.vf.comps):
        for e, v in c.terms.items():
            out[index[("v", i, e)]] = v
    for e, v in x.fn.terms.items():
        out[index[("f", e)]] = v
    return out


def _section_index(model, degree):
    idx = {}
    for e in monomials(model.nvars, degree):
        idx[("f", e)] = len(idx)
    for i in range(model.nvars):
        for e in monomials(model.nvars, degree):
            idx[("v", i, e)] = len(idx)
    return idx


def j_space_functional(model, degree, probe_degree):
    """Sections w of degree <= ``degree`` with (a, b, w) = 0 on probe pairs.

    Probing with finitely many a, b gives a space containing J(G) in this
    degree range, so independence modulo its image is conservative.
    """
    ops = PolyOps(model.nvars, "G")
    cands, _ = _model_basis(model, degree, ideal=False)
    probes, _ = _model_basis(model, probe_degree, ideal=False)
    big = degree + 2 * probe_degree + 2
    index = _section_index(model, big)
    cols = []
    for w in cands:
        col = {}
        off = 0
        for a, b in product(probes, repeat=2):
            assoc = ops.mul(a, ops.mul(b, w)) - ops.mul(ops.mul(a, b), w)
            for k, v in _section_coords(assoc, model, big, index).items():
                col[off + k] = v
            off += len(index)
        cols.append(col)
    M = Matrix.from_columns(cols, max(1, len(probes) ** 2 * len(index)))
    K = kernel_basis(M).vectors
    out = []
    for vec in K:
        s = Section(PolyVectorField.zero(model.nvars), Poly(model.nvars))
        for k, v in vec.items():
            s = s + cands[k].scale(v)
        out.append(s)
    return out


def lift_independence(fields, model, degree=None, j_degree=None, probe_degree=1):
    """Rank of the stacked matrix of the L-chains modulo delta_0(J), on sections
    of degree <= ``degree``.  Returns (rank of the L part mod im delta_0, verdict).
    """
    degree = model.d if degree is None else degree
    j_degree = degree + 1 if j_degree is None else j_degree
    ops = PolyOps(model.nvars, "G")
    basis, _ = _model_basis(model, degree)
    out_deg = degree + max(j_degree, max(c.degree() for X in fields for c in X.comps)) + 1
    index = _section_index(model, out_deg)

    def column(op):
        col = {}
        for n, x in enumerate(basis):
            for k, v in _section_coords(op(x), model, out_deg, index).items():
                col[n * len(index) + k] = v
        return col

    Lcols = [column(lift_vector_field(X, model, degree).L) for X in fields]
    J = j_space_functional(model, j_degree, probe_degree)
    Dcols = [column(lambda a, w=w: ops.mul(w, a) - ops.mul(a, w)) for w in J]
    nrows = len(basis) * len(index)
    r0 = rank(Matrix.from_columns(Dcols, nrows)) if Dcols else 0
    r1 = rank(Matrix.from_columns(Dcols + Lcols, nrows))
    rel = r1 - r0
    return rel, Verdict("lift_independence", rel == len(fields), None,
                        {"rank": rel, "fields": len(fields), "dim_J": len(J),
                         "degree": degree})


# searching for constant-coefficient cycles


def _slot_options(model, order, kinds=("f", "v")):
    N = model.nvars
    opts = []
    for e in monomials(N, order):
        if "f" in kinds:
            opts.append(("f", e))
        if "v" in kinds:
            for i in range(model.m):
                opts.append(("v", model.m + i, e))
    return opts


def cycle_space(model, order, degree=2, kinds=("f", "v"), skew_closed=False,
                coeff_degree=0, jet_degree=None, ideal=True, bidegree=None):
    """W-valued 2-chains of order <= ``order`` with delta theta = 0 on probes.

    Coefficients are polynomials of degree <= ``coeff_degree`` (constants by
    default).  The condition is imposed on all triples of monomial sections
    up to ``degree``; with ``skew_closed`` also delta(theta - theta^T) = 0.
    Chains vanishing on every probe pair are discarded, so the result spans
    the probed cycle space modulo chains the probes cannot see.  With
    ``jet_degree`` only terms of that total jet degree |I| are used; with
    ``bidegree=(r, s)`` only terms reading r vector-field and s function slots.
    """
    N = model.nvars
    opts = _slot_options(model, order, kinds)
    coeffs = [Poly.mono(e) for e in monomials(N, coeff_degree)]
    terms = [Term([a, b], c) for a, b in product(opts, repeat=2) for c in coeffs]
    if jet_degree is not None:
        terms = [t for t in terms if sum(t.jet_type) == jet_degree]
    if bidegree is not None:
        terms = [t for t in terms if sum(1 for x in t.slots if x[0] == "v") == bidegree[0]]
    ops = model.ops("W")
    basis, _ = _model_basis(model, degree, ideal)
    big = 3 * degree + coeff_degree + 1
    index = {e: k for k, e in enumerate(monomials(N, big))}
    width = len(index)

    def columns(chains_of, args_list):
        cols = []
        for t in terms:
            col = {}
            off = 0
            for c in chains_of(MultiDiffChain(2, N, [t])):
                for args in args_list:
                    v = c(*args) if len(args) == 2 else boundary_value(c, args, ops)
                    for e, x in v.terms.items():
                        col[off + index[e]] = x
                    off += width
            cols.append(col)
        return cols, off

    pairs = list(product(basis, repeat=2))
    vis, nv = columns(lambda th: [th], pairs)
    tri = list(product(basis, repeat=3))
    if skew_closed:
        cyc, nc = columns(lambda th: [th, th - th.transpose()], tri)
    else:
        cyc, nc = columns(lambda th: [th], tri)
    # visible part: pick a complement of the chains invisible on the probes
    Kinv = kernel_basis(Matrix.from_columns(vis, max(nv, 1))).vectors
    K = kernel_basis(Matrix.from_columns(cyc, max(nc, 1))).vectors
    span = list(Kinv)
    r = Echelon(span).rank
    chosen = []
    for vec in K:
        r2 = Echelon(span + [vec]).rank
        if r2 > r:
            span.append(vec)
            chosen.append(vec)
            r = r2
    out = []
    for vec in chosen:
        out.append(MultiDiffChain(2, N, [Term(terms[k].slots, terms[k].coeff * v)
                                         for k, v in sorted(vec.items())]).simplify())
    return out
