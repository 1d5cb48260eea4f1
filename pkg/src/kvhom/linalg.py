"""Exact sparse linear algebra over Q and Q(i).

Rational matrices go through fraction-free integer elimination (rows cleared
of denominators and kept primitive).  Gaussian-rational matrices use plain
field elimination.  Vectors are sparse dicts ``{index: scalar}``.
"""

from fractions import Fraction
from math import lcm

from . import _kernels
from .scalars import GaussianRational, QQ, field_for

__all__ = ["Matrix", "SubspaceBasis", "Echelon", "ContainmentError",
           "rank", "kernel_basis", "solve", "quotient_dim", "image_basis"]


class ContainmentError(ValueError):
    """Raised when a subspace is not contained in another; carries a witness."""

    def __init__(self, msg, witness):
        super().__init__(msg)
        self.witness = witness


class Matrix:
    """Sparse matrix in coordinate form; no explicit zeros are stored."""

    __slots__ = ("rows", "cols", "entries", "field")

    def __init__(self, rows, cols, entries=None, field=QQ):
        self.rows, self.cols = rows, cols
        self.field = field_for(field)
        self.entries = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")
            if v:
                self.entries[(i, j)] = v

    @classmethod
    def from_dense(cls, data, field=QQ):
        f = field_for(field)
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ent = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(row):
                v = f.coerce(v)
                if v:
                    ent[(i, j)] = v
        return cls(rows, cols, ent, f)

    @classmethod
    def from_columns(cls, columns, rows, field=QQ):
        ent = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    ent[(i, j)] = v
        return cls(rows, len(columns), ent, field)

    @classmethod
    def identity(cls, n, field=QQ):
        f = field_for(field)
        return cls(n, n, {(i, i): f.one for i in range(n)}, f)

    @classmethod
    def zeros(cls, rows, cols, field=QQ):
        return cls(rows, cols, {}, field)

    def row_dicts(self):
        out = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def column_dicts(self):
        out = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            out[j][i] = v
        return out

    def transpose(self):
        return Matrix(self.cols, self.rows,
                      {(j, i): v for (i, j), v in self.entries.items()}, self.field)

    def todense(self):
        z = self.field.zero
        out = [[z] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def matvec(self, v):
        """Product with a sparse dict vector or a dense sequence."""
        if not isinstance(v, dict):
            v = {i: x for i, x in enumerate(v) if x}
        out = {}
        for (i, j), a in self.entries.items():
            x = v.get(j)
            if x:
                out[i] = out.get(i, 0) + a * x
        return {i: x for i, x in out.items() if x}

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row = {}
        for (k, j), b in other.entries.items():
            by_row.setdefault(k, []).append((j, b))
        acc = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                acc[(i, j)] = acc.get((i, j), 0) + a * b
        return Matrix(self.rows, other.cols, acc, self.field)

    def is_zero(self):
        return not self.entries

    @property
    def nnz(self):
        return len(self.entries)

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, nnz={self.nnz}, {self.field.tag})"


def _is_gaussian(rows):
    for r in rows:
        for v in r.values():
            if isinstance(v, GaussianRational):
                return True
    return False


def _to_int_row(row):
    den = 1
    for v in row.values():
        d = v.denominator if isinstance(v, Fraction) else 1
        if d != 1:
            den = lcm(den, d)
    return {k: int(v * den) for k, v in row.items() if v}


class Echelon:
    """Reduced row echelon form of a list of sparse rows.

    ``pivots`` maps pivot column to its reduced row (pivot entry 1).
    """

    def __init__(self, rows):
        rows = [r for r in rows if r]
        if _is_gaussian(rows):
            ech = _kernels.echelon_field([{k: v for k, v in r.items()} for r in rows])
        else:
            ech = _kernels.echelon_int([_to_int_row(r) for r in rows])
        red = {}
        for p, row in reversed(ech):
            inv = 1 / Fraction(row[p]) if not isinstance(row[p], GaussianRational) else 1 / row[p]
            r = {k: v * inv for k, v in row.items()}
            for k in [k for k in r if k != p and k in red]:
                c = r.get(k)
                if c:
                    for kk, vv in red[k].items():
                        x = r.get(kk, 0) - c * vv
                        if x:
                            r[kk] = x
                        else:
                            r.pop(kk, None)
            red[p] = r
        self.pivots = dict(sorted(red.items()))

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, v):
        """Residual of ``v`` after eliminating every pivot column."""
        r = {k: x for k, x in v.items() if x}
        for p in sorted(k for k in r if k in self.pivots):
            c = r.get(p)
            if c:
                for k, x in self.pivots[p].items():
                    y = r.get(k, 0) - c * x
                    if y:
                        r[k] = y
                    else:
                        r.pop(k, None)
        return r

    def contains(self, v):
        return not self.reduce(v)


class SubspaceBasis:
    """Linearly independent sparse vectors in an ambient space of given dimension."""

    __slots__ = ("ambient", "vectors")

    def __init__(self, ambient, vectors=(), check=False):
        self.ambient = ambient
        self.vectors = [dict(v) for v in vectors]
        if check and Echelon(self.vectors).rank != len(self.vectors):
            raise ValueError("vectors are linearly dependent")

    @property
    def dim(self):
        return len(self.vectors)

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def dense(self, field=QQ):
        z = field_for(field).zero
        out = []
        for v in self.vectors:
            row = [z] * self.ambient
            for i, x in v.items():
                row[i] = x
            out.append(row)
        return out

    def echelon(self):
        return Echelon(self.vectors)

    def __repr__(self):
        return f"SubspaceBasis(ambient={self.ambient}, dim={self.dim})"


def rank(m):
    """Rank over the exact field of ``m``."""
    return Echelon(m.row_dicts()).rank


def kernel_basis(m):
    """Basis of the right null space of ``m``."""
    ech = Echelon(m.row_dicts())
    one = m.field.one
    free = [j for j in range(m.cols) if j not in ech.pivots]
    vecs = {f: {f: one} for f in free}
    for p, row in ech.pivots.items():
        for k, v in row.items():
            if k != p:
                vecs[k][p] = -v
    return SubspaceBasis(m.cols, [vecs[f] for f in free])


def image_basis(m):
    """Basis of the column space, as reduced vectors."""
    ech = Echelon(m.column_dicts())
    return SubspaceBasis(m.rows, list(ech.pivots.values()))


def solve(m, b):
    """Some ``x`` with ``m x = b`` or ``None`` when the system is inconsistent."""
    if not isinstance(b, dict):
        if len(b) != m.rows:
            raise ValueError("right-hand side length differs from row count")
        b = {i: x for i, x in enumerate(b) if x}
    rows = m.row_dicts()
    aug = m.cols
    for i, x in b.items():
        rows[i][aug] = m.field.coerce(x)
    ech = Echelon(rows)
    if aug in ech.pivots:
        return None
    z = m.field.zero
    x = [z] * m.cols
    for p, row in ech.pivots.items():
        x[p] = row.get(aug, z)
    return x


def quotient_dim(cycles, boundaries):
    """dim span(cycles) - dim span(boundaries), after checking containment."""
    ech = cycles.echelon()
    for v in boundaries:
        if not ech.contains(v):
            raise ContainmentError("boundary vector outside the cycle space", v)
    return ech.rank - Echelon(boundaries.vectors).rank
