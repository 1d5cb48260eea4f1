"""Independent brute-force oracles: dense Gauss-Jordan ranks and KV boundaries
built straight from the structure tensors, with no shared code paths."""

from itertools import product


def dense_rank(rows):
    """Rank by textbook Gauss-Jordan on a list of dense rows (field entries)."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][c]
        m[rank] = [x * inv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


def nullspace_dim(rows, ncols):
    return ncols - dense_rank(rows) if rows else ncols


def kv_associator_ok(mul):
    """(a,b,c) = (b,a,c) on basis triples from the dense tensor mul[i][j][k]."""
    n = len(mul)

    def prod(u, v):
        out = [0] * n
        for i in range(n):
            if u[i]:
                for j in range(n):
                    if v[j]:
                        for k in range(n):
                            out[k] += u[i] * v[j] * mul[i][j][k]
        return out

    E = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def assoc(a, b, c):
        return [x - y for x, y in zip(prod(a, prod(b, c)), prod(prod(a, b), c))]

    for a, b, c in product(E, repeat=3):
        if assoc(a, b, c) != assoc(b, a, c):
            return False
    return True


def _key(t, n):
    k = 0
    for i in t:
        k = k * n + i
    return k


def boundary_rows(mul, left, right, q):
    """Dense matrix of delta_q (q >= 1): rows (s, out), columns (t, b).

    (delta theta)(a_1..a_{q+1}) = sum_j (-1)^j [a_j theta(r) - sum_t theta(r | r_t -> a_j r_t)
    + theta(r_1..r_{q-1}, a_j) a_{q+1}],  r = (a_1..a_{q+1}) without a_j.
    """
    n = len(mul)
    w = len(right)
    ncols = n ** q * w
    rows = []
    for s in product(range(n), repeat=q + 1):
        block = [[0] * ncols for _ in range(w)]
        for j in range(q):
            sign = (-1) ** (j + 1)
            aj = s[j]
            r = s[:j] + s[j + 1:]
            # a_j . theta(r)
            base = _key(r, n) * w
            for b in range(w):
                for out in range(w):
                    c = left[aj][b][out]
                    if c:
                        block[out][base + b] += sign * c
            # - theta(r with slot t multiplied)
            for t in range(q):
                for k in range(n):
                    c = mul[aj][r[t]][k]
                    if c:
                        moved = r[:t] + (k,) + r[t + 1:]
                        base = _key(moved, n) * w
                        for out in range(w):
                            block[out][base + out] -= sign * c
            # theta(r_1..r_{q-1}, a_j) . a_{q+1}
            base = _key(r[:-1] + (aj,), n) * w
            last = s[q]
            for b in range(w):
                for out in range(w):
                    c = right[b][last][out]
                    if c:
                        block[out][base + b] += sign * c
        rows.extend(block)
    return rows


def j_rows(mul, left):
    """Linear conditions a(bw) - (ab)w = 0 cutting out J(W)."""
    n, w = len(mul), len(left[0])
    rows = []
    for i, j in product(range(n), repeat=2):
        for out in range(w):
            row = [0] * w
            for b in range(w):
                v = 0
                for m in range(w):
                    v += left[j][b][m] * left[i][m][out]
                for k in range(n):
                    v -= mul[i][j][k] * left[k][b][out]
                row[b] = v
            rows.append(row)
    return rows


def _j_basis(mul, left):
    """Dense nullspace basis of the J conditions via reduced row echelon form."""
    w = len(left[0])
    rows = [list(r) for r in j_rows(mul, left) if any(r)]
    piv_cols = []
    m = rows
    rank = 0
    for c in range(w):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][c]
        m[rank] = [x * inv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        piv_cols.append(c)
        rank += 1
    free = [c for c in range(w) if c not in piv_cols]
    basis = []
    for f in free:
        v = [0] * w
        v[f] = 1
        for r, c in enumerate(piv_cols):
            v[c] = -m[r][f]
        basis.append(v)
    return basis


def delta0_rank(mul, left, right):
    n, w = len(mul), len(right)
    J = _j_basis(mul, left)
    cols = []
    for v in J:
        col = []
        for k in range(n):
            for out in range(w):
                col.append(sum(v[b] * (right[b][k][out] - left[k][b][out]) for b in range(w)))
        cols.append(col)
    return (dense_rank(cols) if cols else 0), len(J)


def homology_dims(mul, left, right, qmax):
    """dim H_q = dim ker delta_q - rank delta_{q-1} for q <= qmax."""
    n, w = len(mul), len(right)
    r0, dimJ = delta0_rank(mul, left, right)
    ranks = {0: r0}
    for q in range(1, qmax + 1):
        rows = boundary_rows(mul, left, right, q)
        ranks[q] = dense_rank(rows)
    dims = []
    for q in range(qmax + 1):
        dimC = dimJ if q == 0 else n ** q * w
        prev = ranks[q - 1] if q > 0 else 0
        dims.append(dimC - ranks[q] - prev)
    return dims


def chain_dims(n, w, dimJ, qmax):
    return [dimJ] + [n ** q * w for q in range(1, qmax + 1)]
