"""Command-line front end: ``kvh check|homology|poisson ...`` writing one JSON report."""

import argparse
import json
import random
import sys
from fractions import Fraction

from .algebra import is_kv, is_kv_module, trivial_module
from .catalog import algebra_from_json, builtin, module_from_json
from .complex import (KVComplex, bigraded_homology, homotopy_identity_check,
                      random_cycles)
from .families import seed_from_env
from .poly import CotangentModel, JetLineAlgebroid, MultiDiffChain, Poly
from .reports import Report
from .scalars import parse

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
QMAX_LIMIT, DEGREE_LIMIT = 4, 5
_MODEL_KEYS = {"m", "d", "k"}
_CHAIN_KEYS = {"m", "terms"}
_TERM_KEYS = {"left", "right", "coeff"}
_BIVECTOR_KEYS = {"m", "P"}


class InputError(ValueError):
    """Bad command-line input; maps to exit status 2."""


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _is_path(s):
    return s.endswith(".json") or "/" in s


def _check_keys(doc, allowed, what):
    if not isinstance(doc, dict):
        raise InputError(f"{what} must be a JSON object")
    unknown = set(doc) - allowed
    if unknown:
        raise InputError(f"{what}: unknown keys {sorted(unknown)}")


def _int_key(doc, key, what, lo, hi):
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or not lo <= v <= hi:
        raise InputError(f"{what}: key {key!r} must be an integer in {lo}..{hi}")
    return v


def load_model(doc, args):
    """``{"m","d","k"}`` for the cotangent model; d falls back to --degree."""
    _check_keys(doc, _MODEL_KEYS, "model")
    m = _int_key(doc, "m", "model", 1, 3)
    d = _int_key(dict(doc, d=doc.get("d", args.degree)), "d", "model", 1, DEGREE_LIMIT)
    if "k" in doc:
        _int_key(doc, "k", "model", 0, 4)
    return m, d, doc.get("k", args.jet)


def load_target(source, args):
    """Algebra (with optional module) or split model from a builtin name or JSON file.

    Returns ``(A, W, split)``; ``split`` is a SplitPair for model inputs.
    """
    if _is_path(source):
        doc = _load_json(source)
        if isinstance(doc, dict) and set(doc) <= _MODEL_KEYS and "m" in doc:
            m, d, _ = load_model(doc, args)
            model = CotangentModel(m, d)
            return model.G, model.W, model.split
        try:
            A = algebra_from_json(doc)
            W = module_from_json(doc, A)
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{source}: {exc}") from exc
        return A, W, None
    if source == "jetline":
        jl = JetLineAlgebroid(args.degree)
        return jl.G, jl.W, jl.split
    if source == "cotangent":
        model = CotangentModel(1, args.degree)
        return model.G, model.W, model.split
    try:
        return builtin(source, args.field), None, None
    except (KeyError, ValueError) as exc:
        raise InputError(f"unknown built-in input {source!r}") from exc


def _config(args):
    keys = ("command", "action", "input", "field", "qmax", "degree", "jet",
            "boundary_grouping", "lift_mode")
    cfg = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    cfg["seed"] = args.seed
    return cfg


def _conventions(args):
    return {"boundary_grouping": args.boundary_grouping,
            "ce_sign": "(-1)^(i+j+1)",
            "bracket": "{x_i, x_j} = P_ij",
            "lift_mode": args.lift_mode}


def cmd_check(args, report):
    A, W, split = load_target(args.input, args)
    report.add(is_kv(A))
    if W is not None:
        report.add(is_kv_module(A, W))
    module = W if W is not None else trivial_module(A)
    cx = KVComplex(A, module, args.boundary_grouping)
    report.add(cx.verify_d2(args.qmax))
    report.section("input", {"algebra": A.name, "dim": A.dim, "module_dim": module.dim})


def cmd_homology(args, report):
    A, W, split = load_target(args.input, args)
    module = W if W is not None else trivial_module(A)
    cx = KVComplex(A, module, args.boundary_grouping)
    d2 = report.add(cx.verify_d2(args.qmax))
    if not d2.ok:
        report.section("aborted", "boundary does not square to zero")
        return
    rep = cx.homology(args.qmax)
    report.section("homology", [{"q": d.q, "dim_chains": d.dim_chains, "rank": d.rank,
                                 "dim_kernel": d.dim_kernel, "dim_homology": d.dim_homology,
                                 "representatives": [{str(k): v for k, v in sorted(r.items())}
                                                     for r in d.representatives]}
                                for d in rep.degrees])
    if split is not None:
        _theorem_one(split, cx, args, report)


def _theorem_one(split, cx, args, report):
    rng = random.Random(args.seed)
    table = {}
    for q in (1, 2):
        if q > args.qmax:
            break
        bh = bigraded_homology(split, q, cx)
        table[str(q)] = {f"{r},{s}": v for (r, s), v in sorted(bh.items())}
        report.add(_verdict(f"H_{q},0", bh[(q, 0)] == 0, None, {"dim": bh[(q, 0)]}))
        bad = None
        for theta in random_cycles(cx, q, 20, rng):
            v = homotopy_identity_check(split, theta, cx)
            if not v.ok:
                bad = v.witness
                break
        report.add(_verdict(f"homotopy_identity_q{q}", bad is None, bad, {"samples": 20}))
    report.section("theorem_one", table)


def _verdict(name, ok, witness=None, detail=None):
    from .algebra import Verdict
    return Verdict(name, bool(ok), witness, detail or {})


def _load_chain(source, args):
    if source == "example":
        # theta(f, g) = (dp f dq g - dp g dq f) / 2 on m = 1
        return 1, MultiDiffChain.bidifferential(2, {((0, 1), (1, 0)): Fraction(1, 2),
                                                    ((1, 0), (0, 1)): Fraction(-1, 2)})
    if source == "symmetric":
        return 1, MultiDiffChain.bidifferential(2, {((0, 0), (0, 0)): 1})
    if not _is_path(source):
        raise InputError(f"unknown built-in chain {source!r}")
    doc = _load_json(source)
    _check_keys(doc, _CHAIN_KEYS, "chain")
    m = _int_key(doc, "m", "chain", 1, 3)
    N = 2 * m
    table = {}
    for i, t in enumerate(doc.get("terms", [])):
        _check_keys(t, _TERM_KEYS, f"chain term {i}")
        try:
            a, b = tuple(t["left"]), tuple(t["right"])
            c = parse(t.get("coeff", "1"))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"chain term {i}: {exc}") from exc
        if len(a) != N or len(b) != N or min(a + b, default=0) < 0:
            raise InputError(f"chain term {i}: multi-indices need {N} non-negative entries")
        table[(a, b)] = table.get((a, b), 0) + c
    return m, MultiDiffChain.bidifferential(N, table)


def _load_bivector(source, args):
    from .poisson import Bivector
    if source == "zero":
        return Bivector.zero(2)
    if source == "symplectic":
        return Bivector.symplectic(1)
    if source == "constant":
        return Bivector(2, {(0, 1): 1})
    if source == "so3":
        return Bivector.so3()
    if not _is_path(source):
        raise InputError(f"unknown built-in bivector {source!r}")
    doc = _load_json(source)
    _check_keys(doc, _BIVECTOR_KEYS, "bivector")
    m = _int_key(doc, "m", "bivector", 1, 3)
    coeffs = {}
    for k, entry in enumerate(doc.get("P", [])):
        try:
            i, j, terms = entry
            poly = Poly(m, {tuple(e): parse(c) for e, c in terms})
        except (ValueError, TypeError) as exc:
            raise InputError(f"bivector entry {k}: expected [i, j, [[exponents, coeff], ...]]") \
                from exc
        if not (0 <= i < m and 0 <= j < m) or i == j:
            raise InputError(f"bivector entry {k}: bad index pair ({i}, {j})")
        coeffs[(i, j)] = poly
    try:
        return Bivector(m, coeffs)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_poisson(args, report):
    from . import poisson as ps
    action = args.action
    if action == "extract":
        m, theta = _load_chain(args.input, args)
        model = CotangentModel(m, args.degree, finite=False)
        try:
            rep = ps.extract_poisson(theta, model, args.degree)
        except ps.TheoremCheckFailure as exc:
            report.add(_verdict("order_theorem", False, str(exc), exc.diagnostics))
            return
        report.extend(rep.verdicts())
        report.section("bivector", rep.bivector.to_json(model.names))
        report.section("order", rep.order)
        return
    if action == "contact":
        from .contact import (ContactMap, ContactModel, InvariantChain, check_equivariance,
                              contact_cycle_checks, invariant_chain)
        try:
            n = int(args.input or 1)
        except ValueError as exc:
            raise InputError("contact takes the half-dimension n as its input") from exc
        if not 1 <= n <= 2 or args.degree > 4:
            raise InputError("contact needs n in 1..2 and degree <= 4")
        model = ContactModel(n, args.degree)
        rep = contact_cycle_checks(model)
        report.extend(rep.verdicts)
        chains = [invariant_chain(model, 0, n), invariant_chain(model, 1, n),
                  InvariantChain(model, 0, model.pi2(), "Pi2")]
        for phi in (ContactMap.translation_z(model, 1), ContactMap.scaling(model, 2)):
            for ch in chains:
                report.add(check_equivariance(ch, phi))
        report.section("contact", rep.conventions)
        report.flag_truncation("class_verdicts_truncated", True)
        return
    P = _load_bivector(args.input, args)
    jac = ps.jacobi_defect(P, args.degree)
    report.add(jac.verdict("input_jacobi"))
    if not jac.ok:
        return
    if action == "lift":
        res = ps.lift_poisson(P, args.lift_mode, degree=args.degree)
        report.extend(res.all_verdicts(), prefix="lift")
        report.section("lift", {"mode": res.mode})
    elif action == "roundtrip":
        verdicts = ps.roundtrip_check(P, degree=args.degree, mode=args.lift_mode)
        report.extend(verdicts if isinstance(verdicts, list) else [verdicts])


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", choices=("Q", "Qi"), default="Q")
    common.add_argument("--qmax", type=int, default=2)
    common.add_argument("--degree", type=int, default=2)
    common.add_argument("--jet", type=int, default=1)
    common.add_argument("--boundary-grouping", choices=("A", "B"), default="A")
    common.add_argument("--lift-mode", choices=("zero-section", "local-24"),
                        default="zero-section")
    common.add_argument("--out", default=None)
    p = argparse.ArgumentParser(prog="kvh",
                                description="Exact KV homology checks with JSON reports.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", parents=[common], help="KV axioms and delta^2 = 0")
    c.add_argument("input")
    h = sub.add_parser("homology", parents=[common], help="homology dimensions and ranks")
    h.add_argument("input")
    ps = sub.add_parser("poisson", parents=[common], help="Poisson and contact engines")
    ps.add_argument("action", choices=("extract", "lift", "roundtrip", "contact"))
    ps.add_argument("input", nargs="?", default=None)
    return p


def run(argv=None):
    """Return (exit status, report text or None, error message or None, out path)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_INPUT), None, None, None
    try:
        args.seed = seed_from_env()
        if not 0 <= args.qmax <= QMAX_LIMIT:
            raise InputError(f"--qmax must lie in 0..{QMAX_LIMIT}")
        if not 1 <= args.degree <= DEGREE_LIMIT:
            raise InputError(f"--degree must lie in 1..{DEGREE_LIMIT}")
        if not 0 <= args.jet <= 4:
            raise InputError("--jet must lie in 0..4")
        if args.command != "poisson" or args.action != "contact":
            if args.input is None:
                raise InputError("an input is required")
        report = Report(args.command, _config(args), _conventions(args))
        handler = {"check": cmd_check, "homology": cmd_homology,
                   "poisson": cmd_poisson}[args.command]
        handler(args, report)
    except ValueError as exc:
        return EXIT_INPUT, None, str(exc), None
    return (EXIT_OK if report.ok else EXIT_FAIL), report.dumps(), None, args.out


def main(argv=None):
    status, text, err, out = run(argv)
    if err:
        print(f"kvh: error: {err}", file=sys.stderr)
    if text is not None:
        if out:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
