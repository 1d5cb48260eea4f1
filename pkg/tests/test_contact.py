from fractions import Fraction

import pytest

from kvhom.complex import boundary_value
from kvhom.contact import (ContactMap, Form, Multivector, ReebOps, _not_a_boundary,
                           check_equivariance, contact_cycle_checks, invariant_chain,
                           reeb_kv_check, reeb_product)
from kvhom.poly import Poly


@pytest.fixture(scope="module")
def m1():
    from kvhom.contact import ContactModel
    return ContactModel(1, 3)


def test_alpha_and_reeb(m1):
    q, p, z = m1.q(0), m1.p(0), m1.z
    assert m1.names == ["q1", "p1", "z"]
    assert m1.alpha.coeffs == {(0,): -p, (2,): Poly.const(3, 1)}
    assert m1.dalpha.coeffs == {(0, 1): Poly.const(3, 1)}
    R = m1.reeb_field()
    assert m1.alpha.interior(R).coeffs[()] == 1
    assert m1.dalpha.interior(R).is_zero()
    assert m1.volume_constant == 1
    assert q.nvars == z.nvars == 3


def test_form_calculus(m1):
    assert m1.alpha.d().d().is_zero()
    w = m1.alpha.wedge(m1.alpha)
    assert w.is_zero()
    assert m1.alpha.is_constant() is False and m1.dalpha.is_constant()


def test_sharp_beta_roundtrip(m1):
    one = Poly.const(3, 1)
    v = m1.sharp(m1.volume)
    assert v.degree == 0 and v.coeffs[()] == one
    xi = Multivector(3, 2, {(0, 2): m1.p(0)})
    assert m1.sharp(m1.beta(xi)) == xi


def test_pi2_form(m1):
    P = m1.pi2()
    assert P.coeffs == {(0, 1): Poly.const(3, 1), (1, 2): -m1.p(0)}
    B = P.as_bivector()
    assert B.bracket(m1.q(0), m1.p(0)) == 1


def test_pi2_scale_for_two_pairs():
    from kvhom.contact import ContactModel
    m2 = ContactModel(2, 2)
    assert m2.names == ["q1", "p1", "q2", "p2", "z"]
    P = m2.pi2()
    assert P(m2.q(0), m2.p(0)) == Fraction(1, 2)
    assert P(m2.q(1), m2.p(1)) == Fraction(1, 2)


def test_multivector_arity(m1):
    with pytest.raises(ValueError):
        m1.pi2()(m1.q(0))


def test_reeb_product(m1):
    one, z = Poly.const(3, 1), m1.z
    assert reeb_product(m1, one, z) == one
    assert reeb_product(m1, z, z * z) == 2 * z * z
    assert reeb_kv_check(m1, 2).ok


def test_invariant_chain(m1):
    R = invariant_chain(m1, 0, 1)
    assert R.arity == 1
    assert R(m1.section(0, m1.z)) == 1
    aR = invariant_chain(m1, 1, 1)
    assert aR(m1.section(3, Poly(3)), m1.section(0, m1.z)) == 3
    with pytest.raises(ValueError):
        aR(m1.section(1, Poly(3)))
    with pytest.raises(ValueError):
        invariant_chain(m1, 4, 0)
    with pytest.raises(ValueError):
        invariant_chain(m1, 0, 2)
    with pytest.raises(ValueError):
        invariant_chain(m1, 0, 0, kind="other")


def test_not_a_boundary_sanity(m1):
    ops = ReebOps(m1)

    class Eta:
        def __call__(self, x):
            return x.fn.diff(0) + x.vf.comps[0] * m1.p(0)

    eta = Eta()
    no_solution, unknowns = _not_a_boundary(
        m1, lambda a, b: boundary_value(eta, (a, b), ops), 1)
    assert not no_solution and unknowns > 0


def test_cycle_checks_small(m1):
    rep = contact_cycle_checks(m1, degree=1)
    got = {v.name: v.ok for v in rep.verdicts}
    assert got["delta1_R"] and got["delta1_alphaR"] and got["delta2_Pi2"]
    assert got["LR_Pi2"] and got["LR_volume"] and got["degenerate_direction"]
    assert got["transverse_bracket"] and got["reeb_kv"]


def test_equivariance(m1):
    for phi in (ContactMap.translation_z(m1, 2), ContactMap.scaling(m1, 3)):
        for chain in (invariant_chain(m1, 0, 1), invariant_chain(m1, 1, 1), invariant_chain(m1, 0, 0)):
            assert check_equivariance(chain, phi, 1).ok


def test_non_contact_map_rejected(m1):
    N = 3
    x = [Poly.var(N, i) for i in range(N)]
    phi = ContactMap(m1, [x[0] * 2, x[1], x[2]], [x[0] * Fraction(1, 2), x[1], x[2]], "stretch")
    with pytest.raises(ValueError):
        check_equivariance(invariant_chain(m1, 0, 1), phi)
    with pytest.raises(ValueError):
        ContactMap(m1, [x[0] * 2, x[1], x[2]], x, "bad")


def test_form_pullback_identity(m1):
    x = [Poly.var(3, i) for i in range(3)]
    assert m1.alpha.pullback(x) == m1.alpha
    f = Form(3, 0, {(): x[0] * x[1]})
    assert f.d().coeffs == {(0,): x[1], (1,): x[0]}
