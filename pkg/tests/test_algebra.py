import json
from fractions import Fraction

import pytest
import sympy

from oracles import kv_associator_ok
from kvhom.algebra import (KVAlgebra, associator, is_kv, is_kv_module, j_space, lie_algebra,
                           regular_module, trivial_module)
from kvhom.catalog import algebra_from_json, algebra_to_json, builtin, module_from_json


def _e2_from_formula():
    """Structure constants of XX' = ((y+t)z' - tt', zz' - t(x'+t'), (y-t)t', 0)."""
    x, y, z, t, x2, y2, z2, t2 = sympy.symbols("x y z t x2 y2 z2 t2")
    XX = [(y + t) * z2 - t * t2, z * z2 - t * (x2 + t2), (y - t) * t2, 0]
    X, Xp = [x, y, z, t], [x2, y2, z2, t2]
    mul = [[[Fraction(str(sympy.Poly(XX[k], *X, *Xp).coeff_monomial(X[i] * Xp[j])))
             for k in range(4)] for j in range(4)] for i in range(4)]
    return mul


def test_e2_table_matches_formula():
    A = builtin("e2")
    assert A.mul_tensor == _e2_from_formula()


def test_e2_is_not_kv_with_witness():
    A = builtin("e2")
    v = is_kv(A)
    assert not v.ok
    assert v.witness == ("e1", "e4", "e3")
    # independent: dense oracle and the symbolic product agree
    assert not kv_associator_ok(_e2_from_formula())
    E = [A.basis(i) for i in range(4)]
    assert associator(A, E[0], E[3], E[2]) != associator(A, E[3], E[0], E[2])


def test_broken_fixture_fails():
    v = is_kv(builtin("broken"))
    assert not v.ok and v.witness


@pytest.mark.parametrize("name", ["zero2", "poly2", "poly3", "idempotent", "upper2", "empty"])
def test_catalog_kv(name):
    A = builtin(name)
    assert is_kv(A).ok
    assert kv_associator_ok(A.mul_tensor) or A.dim == 0
    assert is_kv_module(A, regular_module(A)).ok
    assert is_kv_module(A, trivial_module(A)).ok


def test_lie_algebra_of_kv_algebra():
    L = lie_algebra(builtin("upper2"))
    assert L.dim == 3


def test_j_space_trivial_module_is_everything():
    A = builtin("poly2")
    assert j_space(A, trivial_module(A)).dim == 1


def test_json_roundtrip():
    A = builtin("poly2")
    doc = json.loads(json.dumps(algebra_to_json(A)))
    B = algebra_from_json(doc)
    assert B.mul_tensor == A.mul_tensor


def test_json_unknown_keys_rejected():
    with pytest.raises(ValueError, match="unknown keys"):
        algebra_from_json({"dim": 1, "mul": [[["0"]]], "colour": "red"})


def test_json_qi_scalars():
    doc = {"dim": 1, "field": "Qi", "mul": [[["1/2+1 i"]]]}
    A = algebra_from_json(doc)
    assert A.field.tag == "Qi"
    assert algebra_to_json(A)["mul"] == [[["1/2+1 i"]]]


def test_json_module():
    A = builtin("idempotent")
    doc = {"dim": 1, "mul": [[["1"]]], "left": [[["1"]]], "right": [[["1"]]]}
    B = algebra_from_json(doc)
    W = module_from_json(doc, B)
    assert is_kv_module(B, W).ok
    assert A.mul_tensor == B.mul_tensor


def test_bad_module_detected():
    A = builtin("idempotent")
    # e w = w, w e = 2w: (w, e, e) = 2w - 4w while (e, w, e) = 0
    W = module_from_json({"dim": 1, "mul": [[["1"]]], "left": [[["1"]]],
                          "right": [[["2"]]]}, A)
    assert not is_kv_module(A, W).ok


def test_from_sparse_rejects_bad_index():
    with pytest.raises((ValueError, IndexError)):
        KVAlgebra.from_sparse(1, {(0, 1): {0: 1}})
