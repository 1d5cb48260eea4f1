"""Pure-Python hot loops: integer row echelon and boundary-column assembly.

The compiled module ``_ckernels`` mirrors these functions one for one.
"""

from math import gcd
import heapq

__all__ = ["echelon_int", "echelon_field", "boundary_columns"]


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        for k in row:
            row[k] //= g
    return row


def echelon_int(rows):
    """Fraction-free row echelon of integer rows (dicts col -> int).

    Pivot: smallest bit-size entry in the first remaining column, ties by
    original row order.  Every stored row is kept primitive (content 1).
    Returns ``[(pivot_col, row), ...]`` sorted by pivot column.
    """
    buckets = {}
    heap = []
    for idx, r in enumerate(rows):
        if r:
            c = min(r)
            if c not in buckets:
                buckets[c] = []
                heapq.heappush(heap, c)
            buckets[c].append((idx, _primitive(dict(r))))
    out = []
    while heap:
        c = heapq.heappop(heap)
        cand = buckets.pop(c)
        best = 0
        best_key = None
        for pos, (idx, r) in enumerate(cand):
            key = (abs(r[c]).bit_length(), idx)
            if best_key is None or key < best_key:
                best_key, best = key, pos
        pidx, piv = cand[best]
        a = piv[c]
        for pos, (idx, r) in enumerate(cand):
            if pos == best:
                continue
            b = r[c]
            new = {k: a * v for k, v in r.items()}
            for k, v in piv.items():
                x = new.get(k, 0) - b * v
                if x:
                    new[k] = x
                else:
                    new.pop(k, None)
            if new:
                _primitive(new)
                nc = min(new)
                if nc not in buckets:
                    buckets[nc] = []
                    heapq.heappush(heap, nc)
                buckets[nc].append((idx, new))
        out.append((c, piv))
    return out


def echelon_field(rows):
    """Row echelon over any exact field (pivot rows scaled to leading 1)."""
    buckets = {}
    heap = []
    for idx, r in enumerate(rows):
        r = {k: v for k, v in r.items() if v}
        if r:
            c = min(r)
            if c not in buckets:
                buckets[c] = []
                heapq.heappush(heap, c)
            buckets[c].append((idx, r))
    out = []
    while heap:
        c = heapq.heappop(heap)
        cand = buckets.pop(c)
        pidx, piv = cand[0]
        inv = 1 / piv[c]
        piv = {k: v * inv for k, v in piv.items()}
        for idx, r in cand[1:]:
            b = r[c]
            new = dict(r)
            for k, v in piv.items():
                x = new.get(k, 0) - b * v
                if x:
                    new[k] = x
                else:
                    new.pop(k, None)
            if new:
                nc = min(new)
                if nc not in buckets:
                    buckets[nc] = []
                    heapq.heappush(heap, nc)
                buckets[nc].append((idx, new))
        out.append((c, piv))
    return out


def _tuple_of(index, n, q):
    t = [0] * q
    for pos in range(q - 1, -1, -1):
        index, t[pos] = divmod(index, n)
    return t


def _index_of(t, n):
    x = 0
    for v in t:
        x = x * n + v
    return x


def boundary_columns(q, n, w, mul_into, left, right, cols,
                     grouping="A", alternating=True):
    """Sparse columns of the boundary on basis chains of degree ``q >= 1``.

    Chain index ``tuple_index * w + b`` encodes theta(e_I) = w_b.
    ``mul_into[x]`` lists ``(k, r, c)`` with e_k e_r having e_x-coefficient c;
    ``left[(k, b)]`` / ``right[(b, k)]`` list ``(b2, c)`` for e_k w_b / w_b e_k.
    """
    result = []
    for col in cols:
        tindex, b = divmod(col, w)
        I = _tuple_of(tindex, n, q)
        acc = {}
        for j in range(q):
            s = (-1) ** (j + 1) if alternating else -1
            # a_j acting on the value theta(rest), rest = I
            for k in range(n):
                K = I[:j] + [k] + I[j:]
                base = _index_of(K, n) * w
                for b2, c in left.get((k, b), ()):
                    key = base + b2
                    acc[key] = acc.get(key, 0) + s * c
            # derivation on the argument tensor (all q remaining slots)
            for t in range(q):
                for k, r, c in mul_into.get(I[t], ()):
                    R = list(I)
                    R[t] = r
                    K = R[:j] + [k] + R[j:]
                    key = _index_of(K, n) * w + b
                    acc[key] = acc.get(key, 0) - s * c
            # insertion at the last slot, then right action by a_{q+1}
            if grouping == "A":
                for k2 in range(n):
                    for b2, c in right.get((b, k2), ()):
                        R = I[:-1] + [k2]
                        K = R[:j] + [I[-1]] + R[j:]
                        key = _index_of(K, n) * w + b2
                        acc[key] = acc.get(key, 0) + s * c
            else:
                # right action on the chain first, then insertion
                for k2 in range(n):
                    shifted = right.get((b, k2), ())
                    if not shifted:
                        continue
                    for k in range(n):
                        if k != I[-1]:
                            continue
                        R = I[:-1] + [k2]
                        K = R[:j] + [k] + R[j:]
                        base = _index_of(K, n) * w
                        for b2, c in shifted:
                            key = base + b2
                            acc[key] = acc.get(key, 0) + s * c
        result.append({k: v for k, v in acc.items() if v})
    return result
