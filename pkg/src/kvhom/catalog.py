"""Built-in example algebras and the JSON algebra/module format."""

from .algebra import KVAlgebra, KVModule
from .scalars import field_for, fmt

__all__ = ["e2_algebra", "broken_algebra", "zero_algebra", "idempotent_algebra",
           "truncated_poly_algebra", "upper_triangular_algebra", "matrix_algebra",
           "algebra_from_json", "module_from_json", "algebra_to_json", "builtin"]


def e2_algebra(field="Q"):
    """Four-dimensional KV algebra of polynomial maps X X' on F^4.

    With X = (x, y, z, t), XX' = ((y+t)z' - t t', z z' - t(x'+t'), (y-t)t', 0).
    """
    table = {
        (1, 2): {0: 1},            # e2 e3 = e1
        (3, 2): {0: 1},            # e4 e3 = e1
        (2, 2): {1: 1},            # e3 e3 = e2
        (3, 0): {1: -1},           # e4 e1 = -e2
        (1, 3): {2: 1},            # e2 e4 = e3
        (3, 3): {0: -1, 1: -1, 2: -1},
    }
    return KVAlgebra.from_sparse(4, table, field=field, name="e2")


def broken_algebra(field="Q"):
    """Fixture failing the KV identity: e1 e1 = e2, e2 e1 = e1."""
    return KVAlgebra.from_sparse(4, {(0, 0): {1: 1}, (1, 0): {0: 1}}, field=field,
                                 name="broken")


def zero_algebra(n=1, field="Q"):
    return KVAlgebra.from_sparse(n, {}, field=field, name=f"zero{n}")


def idempotent_algebra(field="Q"):
    """One-dimensional algebra e e = e."""
    return KVAlgebra.from_sparse(1, {(0, 0): {0: 1}}, labels=["e"], field=field,
                                 name="idempotent")


def truncated_poly_algebra(n, unital=True, field="Q"):
    """F[x]/(x^{n+1}) on basis 1, x, ..., x^n (or x, ..., x^n when not unital)."""
    lo = 0 if unital else 1
    powers = list(range(lo, n + 1))
    idx = {p: i for i, p in enumerate(powers)}
    table = {}
    for a in powers:
        for b in powers:
            if a + b <= n:
                table[(idx[a], idx[b])] = {idx[a + b]: 1}
    labels = [f"x^{p}" for p in powers]
    name = f"poly{n}" if unital else f"poly{n}_nu"
    return KVAlgebra.from_sparse(len(powers), table, labels, field, name)


def matrix_algebra(entries, n, field="Q", name=None):
    """Subalgebra of n x n matrices spanned by elementary E_ij, (i, j) in entries."""
    entries = list(entries)
    idx = {e: k for k, e in enumerate(entries)}
    table = {}
    for (i, j) in entries:
        for (k, l) in entries:
            if j == k:
                if (i, l) not in idx:
                    raise ValueError("entry set not closed under multiplication")
                table[(idx[(i, j)], idx[(k, l)])] = {idx[(i, l)]: 1}
    labels = [f"E{i + 1}{j + 1}" for i, j in entries]
    return KVAlgebra.from_sparse(len(entries), table, labels, field, name or f"mat{n}")


def upper_triangular_algebra(n=2, field="Q"):
    return matrix_algebra([(i, j) for i in range(n) for j in range(i, n)], n, field,
                          name=f"upper{n}")


def _parse_tensor(t, shape, field, key):
    f = field_for(field)
    if len(t) != shape[0]:
        raise ValueError(f"{key}: expected {shape[0]} rows, got {len(t)}")
    out = []
    for i, plane in enumerate(t):
        if len(plane) != shape[1]:
            raise ValueError(f"{key}[{i}]: expected length {shape[1]}")
        rows = []
        for j, row in enumerate(plane):
            if len(row) != shape[2]:
                raise ValueError(f"{key}[{i}][{j}]: expected length {shape[2]}")
            try:
                rows.append([f.parse(x) if isinstance(x, str) else f.coerce(x) for x in row])
            except ValueError as exc:
                raise ValueError(f"{key}[{i}][{j}]: {exc}") from exc
        out.append(rows)
    return out


_ALG_KEYS = {"dim", "field", "mul", "labels", "name", "left", "right", "module_dim",
             "module_labels"}


def algebra_from_json(doc):
    unknown = set(doc) - _ALG_KEYS
    if unknown:
        raise ValueError(f"unknown keys: {sorted(unknown)}")
    for req in ("dim", "mul"):
        if req not in doc:
            raise ValueError(f"missing key {req!r}")
    n = doc["dim"]
    if not isinstance(n, int) or n < 0:
        raise ValueError("dim must be a non-negative integer")
    field = doc.get("field", "Q")
    if field not in ("Q", "Qi"):
        raise ValueError(f"field must be 'Q' or 'Qi', got {field!r}")
    mul = _parse_tensor(doc["mul"], (n, n, n), field, "mul")
    return KVAlgebra(mul, doc.get("labels"), field, doc.get("name", "input"))


def module_from_json(doc, A):
    if "left" not in doc or "right" not in doc:
        return None
    left = doc["left"]
    w = len(left[0]) if left else doc.get("module_dim", 0)
    left = _parse_tensor(left, (A.dim, w, w), A.field.tag, "left")
    right = _parse_tensor(doc["right"], (w, A.dim, w), A.field.tag, "right")
    return KVModule(A, left, right, doc.get("module_labels"), name="input_module")


def algebra_to_json(A):
    return {"dim": A.dim, "field": A.field.tag, "labels": list(A.labels),
            "mul": [[[fmt(c) for c in row] for row in plane] for plane in A.mul_tensor]}


def builtin(name, field="Q"):
    """Resolve a built-in algebra name such as ``e2``, ``broken``, ``zero``, ``poly3``."""
    if name == "e2":
        return e2_algebra(field)
    if name == "broken":
        return broken_algebra(field)
    if name == "empty":
        return zero_algebra(0, field)
    if name.startswith("zero"):
        return zero_algebra(int(name[4:] or 1), field)
    if name == "idempotent":
        return idempotent_algebra(field)
    if name.startswith("poly"):
        return truncated_poly_algebra(int(name[4:]), True, field)
    if name.startswith("upper"):
        return upper_triangular_algebra(int(name[5:] or 2), field)
    raise KeyError(name)
