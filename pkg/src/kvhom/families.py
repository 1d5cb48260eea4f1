"""Seeded families of KV algebras built by central extension."""

import os
import random
from fractions import Fraction
from itertools import combinations

from .algebra import is_kv, lie_algebra
from .catalog import builtin
from .lie import CECochain, cocycle_basis, kv_extension

__all__ = ["seed_from_env", "EXTENSION_BASES", "random_cocycle", "extension_family"]

EXTENSION_BASES = ("zero1", "zero2", "zero3", "poly2", "poly3", "idempotent", "upper2")


def seed_from_env(default=0):
    raw = os.environ.get("KVH_SEED")
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"KVH_SEED must be an integer, got {raw!r}") from exc


def random_cocycle(L, rng, span=3):
    """Integer combination of a CE 2-cocycle basis with entries in [-span, span]."""
    alt2 = list(combinations(range(L.dim), 2))
    w = {}
    for vec in cocycle_basis(L, 2).vectors:
        c = rng.randint(-span, span)
        for i, x in vec.items():
            w[alt2[i]] = w.get(alt2[i], 0) + c * x
    return CECochain(L, 2, {k: Fraction(v) for k, v in w.items()})


def extension_family(count=25, seed=0, max_dim=4, field="Q"):
    """``count`` KV algebras F (+) A from liftable random cocycles on small bases.

    Bases cycle through EXTENSION_BASES; extensions whose dimension stays
    within ``max_dim`` are fed back as further bases.  Deterministic in ``seed``.
    """
    rng = random.Random(seed)
    pool = [builtin(name, field) for name in EXTENSION_BASES]
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count:
            raise RuntimeError("extension family did not fill up")
        A = pool[rng.randrange(len(pool))]
        L = lie_algebra(A, check=False)
        w = random_cocycle(L, rng)
        res = kv_extension(A, w, name=f"ext{len(out)}_{A.name}")
        if not res.solvable:
            continue
        E = res.algebra
        if not is_kv(E).ok:
            raise ArithmeticError(f"extension of {A.name} is not KV")
        out.append(E)
        if E.dim < max_dim:
            pool.append(E)
    return out
