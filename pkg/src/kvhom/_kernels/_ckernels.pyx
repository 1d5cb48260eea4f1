# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the loops in ``_pykernels``."""

from math import gcd
import heapq


cdef object _primitive(dict row):
    cdef object g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        for k in row:
            row[k] //= g
    return row


def echelon_int(rows):
    cdef dict buckets = {}
    cdef list heap = []
    cdef list out = []
    cdef Py_ssize_t idx, pos, best, c, nc
    cdef dict r, piv, new
    cdef list cand
    for idx, r0 in enumerate(rows):
        if r0:
            c = min(r0)
            if c not in buckets:
                buckets[c] = []
                heapq.heappush(heap, c)
            buckets[c].append((idx, _primitive(dict(r0))))
    while heap:
        c = heapq.heappop(heap)
        cand = buckets.pop(c)
        best = 0
        best_key = None
        for pos in range(len(cand)):
            idx, r = cand[pos]
            key = ((<object>abs(r[c])).bit_length(), idx)
            if best_key is None or key < best_key:
                best_key = key
                best = pos
        piv = cand[best][1]
        a = piv[c]
        for pos in range(len(cand)):
            if pos == best:
                continue
            idx, r = cand[pos]
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
    cdef dict buckets = {}
    cdef list heap = []
    cdef list out = []
    cdef Py_ssize_t idx, c, nc
    cdef dict r, piv, new
    cdef list cand
    for idx, r0 in enumerate(rows):
        r = {k: v for k, v in r0.items() if v}
        if r:
            c = min(r)
            if c not in buckets:
                buckets[c] = []
                heapq.heappush(heap, c)
            buckets[c].append((idx, r))
    while heap:
        c = heapq.heappop(heap)
        cand = buckets.pop(c)
        piv = cand[0][1]
        inv = 1 / piv[c]
        piv = {k: v * inv for k, v in piv.items()}
        for item in cand[1:]:
            idx, r = item
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


cdef inline Py_ssize_t _index_of(long[:] t, Py_ssize_t q1, Py_ssize_t n):
    cdef Py_ssize_t x = 0, i
    for i in range(q1):
        x = x * n + t[i]
    return x


def boundary_columns(int q, int n, int w, dict mul_into, dict left, dict right,
                     cols, grouping="A", alternating=True):
    import array
    cdef list result = []
    cdef Py_ssize_t tindex, b, j, k, t, pos, k2, r, key, base, i
    cdef int s
    cdef dict acc
    cdef long[:] I = array.array("l", [0] * max(q, 1))
    cdef long[:] K = array.array("l", [0] * (q + 1))
    cdef long[:] R = array.array("l", [0] * max(q, 1))
    cdef bint mode_a = grouping == "A"
    for col in cols:
        tindex, b = divmod(col, w)
        for pos in range(q - 1, -1, -1):
            tindex, I[pos] = divmod(tindex, n)
        acc = {}
        for j in range(q):
            if alternating:
                s = -1 if j % 2 == 0 else 1
            else:
                s = -1
            for k in range(n):
                lst = left.get((k, b))
                if not lst:
                    continue
                for i in range(j):
                    K[i] = I[i]
                K[j] = k
                for i in range(j, q):
                    K[i + 1] = I[i]
                base = _index_of(K, q + 1, n) * w
                for b2, c in lst:
                    key = base + b2
                    acc[key] = acc.get(key, 0) + s * c
            for t in range(q):
                lst = mul_into.get(I[t])
                if not lst:
                    continue
                for k, r, c in lst:
                    for i in range(q):
                        R[i] = I[i]
                    R[t] = r
                    for i in range(j):
                        K[i] = R[i]
                    K[j] = k
                    for i in range(j, q):
                        K[i + 1] = R[i]
                    key = _index_of(K, q + 1, n) * w + b
                    acc[key] = acc.get(key, 0) - s * c
            for k2 in range(n):
                lst = right.get((b, k2))
                if not lst:
                    continue
                for i in range(q - 1):
                    R[i] = I[i]
                R[q - 1] = k2
                for i in range(j):
                    K[i] = R[i]
                K[j] = I[q - 1]
                for i in range(j, q):
                    K[i + 1] = R[i]
                base = _index_of(K, q + 1, n) * w
                for b2, c in lst:
                    key = base + b2
                    acc[key] = acc.get(key, 0) + s * c
        result.append({kk: v for kk, v in acc.items() if v})
    return result
