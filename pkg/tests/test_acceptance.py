"""Acceptance suite, one group of tests per criterion (see the summary lines
printed at the end of the run)."""

import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from itertools import combinations, product

import pytest

import oracles
from conftest import record
from kvhom.algebra import is_kv, lie_algebra, trivial_module, regular_module
from kvhom.catalog import builtin
from kvhom.complex import (KVComplex, bigraded_homology, boundary_value,
                           homotopy_identity_check, random_cycles)
from kvhom.contact import (ContactMap, ContactModel, InvariantChain, check_equivariance,
                           contact_cycle_checks, invariant_chain)
from kvhom.families import extension_family, seed_from_env
from kvhom.lie import CECochain, cocycle_basis, kv_extension, obstruction
from kvhom.poisson import (Bivector, TheoremCheckFailure, cycle_space, extract_poisson,
                           jacobi_defect, lift_independence, lift_poisson,
                           lift_vector_field, model_kv_cycle, roundtrip_check)
from kvhom.poly import (CotangentModel, JetLineAlgebroid, MultiDiffChain, Poly,
                        PolyVectorField, jet_decompose, jet_support, symbol)

SEED = seed_from_env(0)
KV_CATALOG = ("zero1", "zero2", "zero3", "poly2", "poly3", "idempotent", "upper2")


@pytest.fixture(scope="module")
def family():
    return extension_family(25, seed=SEED)


# 1 ------------------------------------------------------------------------

def test_c1_e2_is_kv():
    t = time.time()
    v = is_kv(builtin("e2"))
    dt = time.time() - t
    record(1, "e2 passes is_kv", v.ok, f"witness {v.witness}")
    record(1, "e2 runtime < 1 s", dt < 1, f"{dt:.2f}s")
    assert v.ok, f"e2 fails the KV identity at {v.witness}"


def test_c1_broken_fixture_fails():
    v = is_kv(builtin("broken"))
    ok = not v.ok and v.witness is not None
    record(1, "broken fixture fails with witness", ok)
    assert ok


# 2 ------------------------------------------------------------------------

def _d2_pairs(family):
    jl2, jl3, ct = JetLineAlgebroid(2), JetLineAlgebroid(3), CotangentModel(1, 2)
    pairs = [("jetline2", jl2.G, jl2.W), ("jetline3", jl3.G, jl3.W),
             ("cotangent1_2", ct.G, ct.W)]
    pairs += [(E.name, E, trivial_module(E)) for E in family]
    return pairs


@pytest.mark.parametrize("grouping", ["A", "B"])
def test_c2_d2_models_and_family(family, grouping):
    t = time.time()
    bad = []
    pairs = _d2_pairs(family)
    for name, A, W in pairs:
        v = KVComplex(A, W, grouping).verify_d2(3)
        if not v.ok:
            bad.append((name, v.witness))
    dt = time.time() - t
    record(2, f"d2 on {len(pairs)} pairs [{grouping}]", not bad, str(bad[:1]))
    record(2, f"runtime < 2 min [{grouping}]", dt < 120, f"{dt:.1f}s")
    assert len(family) == 25
    assert not bad


def test_c2_d2_e2_trivial():
    A = builtin("e2")
    v = KVComplex(A, trivial_module(A)).verify_d2(3)
    record(2, "d2 on e2 + trivial F", v.ok, f"witness {v.witness}")
    assert v.ok, f"delta^2 != 0 on e2 + F: {v.witness}"


# 3 ------------------------------------------------------------------------

def _oracle_instances(family):
    out = []
    for name in KV_CATALOG:
        A = builtin(name)
        out.append((name, A, trivial_module(A)))
        out.append((name + "+reg", A, regular_module(A)))
    for d in (2, 3):
        jl = JetLineAlgebroid(d)
        out.append((f"jetline{d}", jl.G, jl.W))
    ct = CotangentModel(1, 2)
    out.append(("cotangent1_2", ct.G, ct.W))
    out += [(E.name, E, trivial_module(E)) for E in family]
    return out


def test_c3_homology_matches_oracle(family):
    t = time.time()
    bad = []
    count = 0
    for name, A, W in _oracle_instances(family):
        qtop = max([q for q in (1, 2) if A.dim ** q * W.dim <= 200], default=0)
        lib = KVComplex(A, W).homology(qtop).dims()
        orc = oracles.homology_dims(A.mul_tensor, W.left_tensor, W.right_tensor, qtop)
        count += 1
        if lib != orc:
            bad.append((name, lib, orc))
    dt = time.time() - t
    record(3, f"oracle dims equal on {count} instances", not bad, str(bad[:1]))
    record(3, "runtime < 2 min", dt < 120, f"{dt:.1f}s")
    assert not bad


# 4 ------------------------------------------------------------------------

@pytest.mark.parametrize("which", ["jetline2", "jetline3", "cotangent1_2"])
def test_c4_theorem_one(which):
    model = {"jetline2": lambda: JetLineAlgebroid(2), "jetline3": lambda: JetLineAlgebroid(3),
             "cotangent1_2": lambda: CotangentModel(1, 2)}[which]()
    split = model.split
    cx = KVComplex(split.G, split.module)
    vanish = {r: bigraded_homology(split, r, cx)[(r, 0)] for r in (1, 2)}
    ok_vanish = all(v == 0 for v in vanish.values())
    rng = random.Random(SEED)
    failures = []
    nonzero = 0
    for q in (1, 2):
        for theta in random_cycles(cx, q, 20, rng):
            nonzero += not theta.is_zero()
            v = homotopy_identity_check(split, theta, cx)
            if not v.ok:
                failures.append((q, v.witness))
    record(4, f"H_r,0 = 0 on {which}", ok_vanish, str(vanish))
    record(4, f"homotopy identity on {which} (20 cycles per degree)", not failures,
           str(failures[:1]))
    assert ok_vanish and not failures
    assert nonzero >= 20


# 5 ------------------------------------------------------------------------

def _cyclic_oracle(A, rows, theta_vec):
    """Cyclic sum of delta theta against 2 d Pi theta, both by brute force."""
    n = A.dim
    d = [sum(r[k] * theta_vec[k] for k in range(n * n)) for r in rows]

    def dval(a, b, c):
        return d[(a * n + b) * n + c]

    def br(i, j):
        return [A.mul_tensor[i][j][k] - A.mul_tensor[j][i][k] for k in range(n)]

    def pi(u, v):
        return sum(u[i] * v[j] * (theta_vec[i * n + j] - theta_vec[j * n + i]) / 2
                   for i in range(n) for j in range(n))

    E = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for a, b, c in product(range(n), repeat=3):
        cyc = dval(a, b, c) + dval(b, c, a) + dval(c, a, b)
        args = (a, b, c)
        dpi = 0
        for i, j in combinations(range(3), 2):
            rest = [k for k in range(3) if k not in (i, j)][0]
            dpi += (-1) ** (i + j + 1 + 2) * pi(br(args[i], args[j]), E[args[rest]])
        if cyc != 2 * dpi:
            return False
    return True


def test_c5_cyclic_identity():
    rng = random.Random(SEED)
    names = ("e2", "broken") + KV_CATALOG
    algebras = [builtin(nm) for nm in names] + [JetLineAlgebroid(2).G]
    bad = []
    for A in algebras:
        n = A.dim
        F = trivial_module(A)
        rows = oracles.boundary_rows(A.mul_tensor, F.left_tensor, F.right_tensor, 2)
        for _ in range(50):
            vec = [Fraction(rng.randint(-4, 4)) for _ in range(n * n)]
            if not _cyclic_oracle(A, rows, vec):
                bad.append(A.name)
                break
    record(5, f"cyclic identity, 50 chains x {len(algebras)} algebras", not bad, str(bad))
    assert not bad


def test_c5_extension_iff_sigma(family):
    algebras = [builtin(nm) for nm in KV_CATALOG] + list(family[:6])
    disagreements = []
    solvable = unsolvable = 0
    for A in algebras:
        L = lie_algebra(A)
        rep = obstruction(A)
        alt2 = list(combinations(range(A.dim), 2))
        for vec in cocycle_basis(L, 2).vectors:
            w = CECochain(L, 2, {alt2[i]: x for i, x in vec.items()})
            res = kv_extension(A, w)
            sig_zero = not any(rep.sigma(w))
            if res.solvable:
                solvable += 1
                if not is_kv(res.algebra).ok:
                    disagreements.append((A.name, "extension not KV"))
            else:
                unsolvable += 1
            if res.solvable != sig_zero:
                disagreements.append((A.name, dict(w.coeffs)))
    record(5, f"kv_extension iff sigma = 0 ({solvable} solvable, {unsolvable} obstructed)",
           not disagreements, str(disagreements[:1]))
    assert not disagreements


# 6 ------------------------------------------------------------------------

def _homogeneous_cycles(model, count, rng):
    pools = []
    for bd in ((1, 1), (0, 2), (2, 0)):
        Z = cycle_space(model, 1, degree=2, bidegree=bd)
        if Z:
            pools.append(Z)
    out = []
    while len(out) < count:
        Z = pools[len(out) % len(pools)]
        theta = MultiDiffChain(2, model.nvars, [])
        while theta.is_zero():
            for z in Z:
                theta = theta + z.scale(Fraction(rng.randint(-3, 3)))
        out.append(theta)
    return out


def test_c6_symbol_proposition():
    model = CotangentModel(1, 3, finite=False)
    ops = model.ops("W")
    rng = random.Random(SEED)
    cycles = _homogeneous_cycles(model, 20, rng)
    from kvhom.poisson import _model_basis
    basis, _ = _model_basis(model, 2)
    bad_cycle, bad_symbol, bad_law = [], [], []
    components = nonvacuous = 0
    for theta in cycles:
        assert theta.order <= 1
        sym = symbol(theta)
        for args in product(basis, repeat=3):
            if boundary_value(theta, args, ops):
                bad_cycle.append(theta)
                break
            if boundary_value(sym, args, ops):
                bad_symbol.append(theta)
                break
        for I, comp in jet_decompose(theta):
            T = lambda a, b, c, comp=comp: boundary_value(comp, (a, b, c), ops)
            degs = {sum(J) for J in jet_support(T, 3, model, 2)}
            components += 1
            nonvacuous += bool(degs)
            if not degs <= {sum(I) + 1}:
                bad_law.append((I, sorted(degs)))
    record(6, "20 homogeneous order<=1 cycles are cycles", not bad_cycle)
    record(6, "boundary(symbol) = 0", not bad_symbol)
    record(6, f"jet components raise |I| by 1 ({nonvacuous} of {components} nonzero)",
           not bad_law, str(bad_law[:1]))
    assert not bad_cycle and not bad_symbol and not bad_law


# 7 ------------------------------------------------------------------------

def _candidates():
    out = []
    m1 = CotangentModel(1, 3, finite=False)
    for theta in cycle_space(m1, 1, degree=2):
        out.append((m1, theta))
    m2 = CotangentModel(2, 3, finite=False)
    e = lambda *a: tuple(a)
    for a, b in [(e(1, 0, 0, 0), e(0, 1, 0, 0)), (e(0, 1, 0, 0), e(1, 0, 0, 0))]:
        out.append((m2, MultiDiffChain.bidifferential(4, {(a, b): 1})))
    for P, m in ((Bivector.symplectic(1), 2), (Bivector.so3(), 3)):
        res = lift_poisson(P, degree=2, check_cycle=False)
        out.append((res.model, res.theta))
    return out


def test_c7_certified_cycles_are_poisson():
    certified = checked = 0
    bad = []
    cands = _candidates()
    for model, theta in cands:
        if not model_kv_cycle(theta, model, 2).ok:
            continue
        certified += 1
        if symbol(theta).skew().is_zero():
            continue
        checked += 1
        try:
            rep = extract_poisson(theta, model, degree=4)
        except TheoremCheckFailure as exc:
            bad.append(str(exc))
            continue
        jac = jacobi_defect(rep.bivector, 4)
        if rep.order != 1 or not jac.ok or not rep.leibniz.ok:
            bad.append(repr(rep.bivector.coeffs))
    detail = f"{len(cands)} candidates, {certified} certified, {checked} with skew symbol"
    record(7, f"certified cycles yield Poisson bivectors ({detail})", not bad, str(bad[:1]))
    assert not bad


def test_c7_order_two_skew_is_hard_failure():
    model = CotangentModel(1, 3, finite=False)
    theta = MultiDiffChain.bidifferential(2, {((2, 0), (0, 2)): 1})
    with pytest.raises(TheoremCheckFailure) as info:
        extract_poisson(theta, model)
    ok = bool(info.value.diagnostics)
    record(7, "order-2 skew symbol raises a theorem-check failure", ok)
    assert ok


# 8 ------------------------------------------------------------------------

ROUNDTRIP_CASES = [("zero", Bivector.zero(2)), ("constant-m2", Bivector.symplectic(1)),
                   ("so3-m3", Bivector.so3())]


@pytest.mark.parametrize("name,P", ROUNDTRIP_CASES)
def test_c8_roundtrip(name, P):
    t = time.time()
    pre = jacobi_defect(P, 3)
    rt = roundtrip_check(P, degree=3)
    dt = time.time() - t
    record(8, f"{name}: Poisson pre-check and lift/project round trip", pre.ok and rt.ok,
           str(rt.witness))
    record(8, f"{name}: round trip runtime < 1 min", dt < 60, f"{dt:.1f}s")
    assert pre.ok and rt.ok


@pytest.mark.parametrize("name,P", ROUNDTRIP_CASES)
def test_c8_lift_theta_is_kv_cycle(name, P):
    t = time.time()
    res = lift_poisson(P, "zero-section", degree=2)
    dt = time.time() - t
    failing = [f"{v.name}@{v.witness}" for v in res.cycle.verdicts() if not v.ok]
    record(8, f"{name}: lift theta passes is_kv_cycle", res.cycle.ok, ", ".join(failing))
    record(8, f"{name}: lift runtime < 1 min", dt < 60, f"{dt:.1f}s")
    assert res.cycle.ok, f"lift theta is not a KV cycle: {failing}"


# 9 ------------------------------------------------------------------------

def test_c9_vector_field_classes():
    model = CotangentModel(1, 3, finite=False)
    q = Poly.var(1, 0)
    fam = [PolyVectorField([Poly.const(1, 1)]), PolyVectorField([q]), PolyVectorField([q * q])]
    closed = [lift_vector_field(X, model, 3).closed for X in fam]
    rank, verdict = lift_independence(fam, model, degree=3)
    record(9, "delta_1 L = 0 for the three lifts", all(v.ok for v in closed))
    record(9, "classes independent mod im delta_0 (rank 3)", rank == 3 and verdict.ok,
           f"rank {rank}")
    assert all(v.ok for v in closed) and rank == 3


# 10 -----------------------------------------------------------------------

def test_c10_contact_suite():
    t = time.time()
    model = ContactModel(1, 4)
    rep = contact_cycle_checks(model)
    names = ["delta1_R", "delta1_alphaR", "delta2_Pi2", "jacobi_Pi2", "LR_Pi2",
             "transverse_bracket", "degenerate_direction"]
    got = {v.name: v for v in rep.verdicts}
    for nm in names:
        record(10, nm, got[nm].ok, str(got[nm].witness))
    chains = [invariant_chain(model, 0, 1), invariant_chain(model, 1, 1),
              InvariantChain(model, 0, model.pi2(), "Pi2")]
    eq = [check_equivariance(ch, phi) for phi in (ContactMap.translation_z(model, 2),
                                                  ContactMap.scaling(model, 2))
          for ch in chains]
    dt = time.time() - t
    record(10, "equivariance (z-translation, q->2q p->p/2)", all(v.ok for v in eq))
    record(10, "runtime < 1 min", dt < 60, f"{dt:.1f}s")
    failing = [nm for nm in names if not got[nm].ok]
    assert all(v.ok for v in eq)
    assert not failing, f"contact verdicts failing: {[(nm, got[nm].witness) for nm in failing]}"


# 11 -----------------------------------------------------------------------

SUITE = [["check", "poly3", "--qmax", "3"], ["homology", "jetline", "--degree", "2"],
         ["poisson", "extract", "example"], ["poisson", "roundtrip", "so3"],
         ["poisson", "contact"], ["check", "e2"]]


def _run_suite():
    env = dict(os.environ, KVH_SEED=str(SEED))
    outs = []
    for argv in SUITE:
        p = subprocess.run([sys.executable, "-m", "kvhom.cli", *argv], capture_output=True,
                           env=env, check=False)
        outs.append((p.returncode, p.stdout))
    return outs


def test_c11_determinism():
    a, b = _run_suite(), _run_suite()
    same = a == b and all(out for _, out in a)
    record(11, f"byte-identical reports over {len(SUITE)} commands", same)
    assert same
