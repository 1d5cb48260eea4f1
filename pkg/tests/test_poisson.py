from fractions import Fraction

import pytest
import sympy

from kvhom.poisson import (Bivector, ProjectionError, TheoremCheckFailure, cotangent_lift_field,
                           extract_poisson, jacobi_defect, lift_independence, lift_poisson,
                           lift_vector_field, lifted_bracket, project_to_base, roundtrip_check,
                           zero_section)
from kvhom.poly import CotangentModel, MultiDiffChain, Poly, PolyVectorField

HALF = Fraction(1, 2)


def sympy_jacobiator(P, n):
    """Coordinate jacobiator of a bivector computed with sympy."""
    xs = sympy.symbols(f"x1:{n + 1}")

    def to_s(p):
        return sum((sympy.Rational(c.numerator, c.denominator) * sympy.prod(x ** k for x, k in zip(xs, e))
                    for e, c in p.terms.items()), sympy.Integer(0))

    M = [[to_s(P.coeff(i, j)) for j in range(n)] for i in range(n)]

    def br(f, g):
        return sum(M[i][j] * sympy.diff(f, xs[i]) * sympy.diff(g, xs[j])
                   for i in range(n) for j in range(n))

    a, b, c = xs[:3]
    return sympy.expand(br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b)))


def test_bivector_validation():
    with pytest.raises(ValueError):
        Bivector(2, {(0, 0): 1})
    with pytest.raises(ValueError):
        Bivector(2, {(0, 1): 1, (1, 0): 1})
    with pytest.raises(IndexError):
        Bivector(2, {(0, 2): 1})
    B = Bivector(2, {(1, 0): 3})
    assert B.coeff(0, 1) == -3


def test_so3_is_poisson_matches_sympy():
    P = Bivector.so3()
    assert sympy_jacobiator(P, 3) == 0
    assert jacobi_defect(P, 2).ok
    x = [Poly.var(3, i) for i in range(3)]
    assert P.bracket(x[0], x[1]) == x[2]


def test_broken_bivector_defect():
    x = [Poly.var(3, i) for i in range(3)]
    P = Bivector(3, {(0, 1): x[0] * x[1], (1, 2): x[0]})
    rep = jacobi_defect(P, 2)
    expected = sympy_jacobiator(P, 3)
    assert expected != 0 and not rep.ok and not rep.coordinate_ok
    assert rep.defects[0][1] == P.jacobiator(*x)
    assert rep.defects[0][1] == -x[0] * x[0]
    assert expected == -sympy.Symbol("x1") ** 2


def test_extract_first_order_example():
    # theta(f, g) = 1/2 (d_p f d_q g - d_q f d_p g)
    th = MultiDiffChain.bidifferential(2, {((0, 1), (1, 0)): HALF, ((1, 0), (0, 1)): -HALF})
    rep = extract_poisson(th)
    assert rep.order == 1
    assert rep.bivector == Bivector(2, {(1, 0): 1})
    assert rep.jacobi and rep.leibniz


def test_extract_symmetric_is_zero():
    th = MultiDiffChain.bidifferential(2, {((0, 0), (0, 0)): 1})
    rep = extract_poisson(th)
    assert rep.bivector.is_zero()


def test_extract_higher_order_skew_raises():
    th = MultiDiffChain.bidifferential(2, {((2, 0), (0, 2)): 1})
    with pytest.raises(TheoremCheckFailure) as exc:
        extract_poisson(th)
    assert exc.value.diagnostics["order"] == 2


def test_cotangent_lift_formulas():
    model = CotangentModel(1, 3, finite=False)
    q, p = model.q(0), model.p(0)
    base_q = Poly.var(1, 0)
    Xt = cotangent_lift_field(PolyVectorField([base_q]), model)
    assert Xt.comps == (q, -p)
    Xt2 = cotangent_lift_field(PolyVectorField([base_q * base_q]), model)
    assert Xt2.comps == (q * q, -2 * q * p)
    with pytest.raises(ValueError):
        cotangent_lift_field(PolyVectorField([base_q, base_q]), model)


def test_lifted_brackets_agree_on_pullbacks():
    P = Bivector.so3()
    model = CotangentModel(3, 2, finite=False)
    fs = [model.q(i) for i in range(3)]
    zero, _ = lifted_bracket(P, model, "zero-section")
    local, B = lifted_bracket(P, model, "local-24")
    for i, f in enumerate(fs):
        for j, g in enumerate(fs):
            assert zero(f, g) == model.pullback(P.bracket(zero_section(model, f),
                                                          zero_section(model, g)))
            # the local lift pairs fibre and base coordinates
            assert local(model.p(i), g) == model.pullback(P.coeff(i, j))
            assert not local(f, g)
    with pytest.raises(ValueError):
        lifted_bracket(P, model, "other")


def test_lift_verdict_patterns():
    # neither lift mode has both the Leibniz rule and vertical compatibility
    P = Bivector.symplectic(1)
    zero = {v.name: v.ok for v in lift_poisson(P, "zero-section", 2, check_cycle=False).all_verdicts()}
    assert zero == {"lift_jacobi": True, "lift_leibniz": False, "vertical_compatibility": True}
    local = {v.name: v.ok for v in lift_poisson(P, "local-24", 2, check_cycle=False).all_verdicts()}
    assert local == {"lift_jacobi": True, "lift_leibniz": True, "vertical_compatibility": False}
    with pytest.raises(ValueError):
        lift_poisson(P, "other", check_cycle=False)
    with pytest.raises(ValueError):
        x = [Poly.var(3, i) for i in range(3)]
        lift_poisson(Bivector(3, {(0, 1): x[0] * x[1], (1, 2): x[0]}), check_cycle=False)


def test_roundtrip_and_projection():
    for P in (Bivector.symplectic(1), Bivector.so3(), Bivector.zero(2)):
        v = roundtrip_check(P, degree=2)
        assert v.ok, v
    model = CotangentModel(1, 2, finite=False)
    p = model.p(0)
    with pytest.raises(ProjectionError):
        project_to_base(lambda f, g: p * f.diff(0) * g.diff(0), model, 2)


def test_lift_vector_fields_closed_and_independent():
    x = Poly.var(1, 0)
    one = Poly.const(1, 1)
    model = CotangentModel(1, 3, finite=False)
    fields = [PolyVectorField([one]), PolyVectorField([x]), PolyVectorField([x * x])]
    for X in fields:
        assert lift_vector_field(X, model, 3).closed.ok
    with pytest.raises(ValueError):
        lift_vector_field(PolyVectorField([x * x * x]), model, 3)
    r, verdict = lift_independence(fields, model, 3)
    assert r == 3 and verdict.ok
