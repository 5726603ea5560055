"""Exact sparse integer linear algebra.

Everything homological in the package reduces to three primitives here:

* ``smith_normal_form`` with optional unimodular transforms,
* ``homology_at`` returning free rank plus invariant factors,
* ``HomologyBasis`` which additionally keeps cycle representatives and a
  coordinate map so that chain maps can be pushed to homology.

Vectors are sparse ``dict[int, int]``; matrices act on column vectors.

>>> smith_normal_form(IntMatrix.from_dense([[2, 4], [6, 8]])).diag
(2, 4)
>>> homology_at(IntMatrix.from_dense([[2]]), IntMatrix.zero(0, 1))
GradedAbelianGroup(free_rank=0, torsion=(2,))
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd


class CompositionNotZero(ValueError):
    pass


class InconsistentSystem(ValueError):
    pass


def xgcd(a, b):
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, rem = divmod(a, b)
        a, b = b, rem
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


# ----------------------------------------------------------------------------
# sparse vectors

def vec_add(u, v, c=1):
    """Return u + c*v as a new sparse vector."""
    out = dict(u)
    for k, x in v.items():
        y = out.get(k, 0) + c * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def vec_scale(v, c):
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


# ----------------------------------------------------------------------------

class IntMatrix:
    """Immutable sparse integer matrix stored by rows."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows, cols, data=None):
        self.rows = rows
        self.cols = cols
        clean = {}
        if data:
            for i, row in data.items():
                if not 0 <= i < rows:
                    raise IndexError(f"row {i} out of range")
                r = {}
                for j, v in row.items():
                    if not 0 <= j < cols:
                        raise IndexError(f"column {j} out of range")
                    if v:
                        r[j] = int(v)
                if r:
                    clean[i] = r
        self._data = clean

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {i: {i: 1} for i in range(n)})

    @classmethod
    def from_dense(cls, rows_list, cols=None):
        nrows = len(rows_list)
        if cols is None:
            cols = len(rows_list[0]) if nrows else 0
        return cls(nrows, cols, {i: {j: v for j, v in enumerate(r) if v} for i, r in enumerate(rows_list)})

    @classmethod
    def from_entries(cls, rows, cols, entries):
        data = {}
        for (i, j), v in entries.items():
            if v:
                data.setdefault(i, {})[j] = v
        return cls(rows, cols, data)

    @classmethod
    def from_columns(cls, rows, columns):
        """Build from a list of sparse column vectors."""
        data = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    data.setdefault(i, {})[j] = v
        return cls(rows, len(columns), data)

    @property
    def entries(self):
        return {(i, j): v for i, r in self._data.items() for j, v in r.items()}

    @property
    def shape(self):
        return (self.rows, self.cols)

    def row(self, i):
        return dict(self._data.get(i, {}))

    def nnz(self):
        return sum(len(r) for r in self._data.values())

    def is_zero(self):
        return not self._data

    def to_dense(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for i, r in self._data.items():
            for j, v in r.items():
                out[i][j] = v
        return out

    def columns(self):
        cols = [dict() for _ in range(self.cols)]
        for i, r in self._data.items():
            for j, v in r.items():
                cols[j][i] = v
        return cols

    def transpose(self):
        data = {}
        for i, r in self._data.items():
            for j, v in r.items():
                data.setdefault(j, {})[i] = v
        return IntMatrix(self.cols, self.rows, data)

    def apply(self, v):
        """Matrix times sparse column vector."""
        out = {}
        for i, r in self._data.items():
            s = 0
            for j, a in r.items():
                b = v.get(j)
                if b:
                    s += a * b
            if s:
                out[i] = s
        return out

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        odata = other._data
        data = {}
        for i, r in self._data.items():
            acc = {}
            for k, a in r.items():
                orow = odata.get(k)
                if orow:
                    for j, b in orow.items():
                        acc[j] = acc.get(j, 0) + a * b
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                data[i] = acc
        return IntMatrix(self.rows, other.cols, data)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        data = {i: dict(r) for i, r in self._data.items()}
        for i, r in other._data.items():
            row = data.setdefault(i, {})
            for j, v in r.items():
                row[j] = row.get(j, 0) + v
        return IntMatrix(self.rows, self.cols, data)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return IntMatrix(self.rows, self.cols, {i: {j: c * v for j, v in r.items()} for i, r in self._data.items()})

    def submatrix(self, rows=None, cols=None):
        """Select rows/columns (index lists, re-indexed in the given order)."""
        rmap = {i: k for k, i in enumerate(rows)} if rows is not None else None
        cmap = {j: k for k, j in enumerate(cols)} if cols is not None else None
        data = {}
        for i, r in self._data.items():
            if rmap is not None:
                if i not in rmap:
                    continue
                ni = rmap[i]
            else:
                ni = i
            nr = {}
            for j, v in r.items():
                if cmap is not None:
                    if j in cmap:
                        nr[cmap[j]] = v
                else:
                    nr[j] = v
            if nr:
                data[ni] = nr
        return IntMatrix(len(rows) if rows is not None else self.rows,
                         len(cols) if cols is not None else self.cols, data)

    @staticmethod
    def hstack(blocks, rows=None):
        if rows is None:
            rows = blocks[0].rows
        data = {}
        off = 0
        for b in blocks:
            if b.rows != rows:
                raise ValueError("row mismatch in hstack")
            for i, r in b._data.items():
                row = data.setdefault(i, {})
                for j, v in r.items():
                    row[j + off] = v
            off += b.cols
        return IntMatrix(rows, off, data)

    @staticmethod
    def vstack(blocks, cols=None):
        if cols is None:
            cols = blocks[0].cols
        data = {}
        off = 0
        for b in blocks:
            if b.cols != cols:
                raise ValueError("column mismatch in vstack")
            for i, r in b._data.items():
                data[i + off] = dict(r)
            off += b.rows
        return IntMatrix(off, cols, data)

    @staticmethod
    def block(blocks, row_sizes, col_sizes):
        """Assemble from a dict {(bi, bj): IntMatrix}; missing blocks are zero."""
        roff = [0]
        for s in row_sizes:
            roff.append(roff[-1] + s)
        coff = [0]
        for s in col_sizes:
            coff.append(coff[-1] + s)
        data = {}
        for (bi, bj), m in blocks.items():
            if m.shape != (row_sizes[bi], col_sizes[bj]):
                raise ValueError(f"block {(bi, bj)} has shape {m.shape}")
            for i, r in m._data.items():
                row = data.setdefault(i + roff[bi], {})
                for j, v in r.items():
                    k = j + coff[bj]
                    row[k] = row.get(k, 0) + v
        return IntMatrix(roff[-1], coff[-1], data)

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedAbelianGroup:
    """Finitely generated abelian group Z^free_rank + sum Z/t."""

    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        t = tuple(int(x) for x in self.torsion)
        if any(x <= 1 for x in t):
            raise ValueError("torsion factors must exceed 1")
        for a, b in zip(t, t[1:]):
            if b % a:
                raise ValueError("torsion factors must form a divisibility chain")
        object.__setattr__(self, "torsion", t)
        if self.free_rank < 0:
            raise ValueError("negative rank")

    @classmethod
    def from_factors(cls, free_rank, factors):
        """Normalize an arbitrary list of cyclic orders into invariant factors."""
        fs = [abs(int(f)) for f in factors if abs(int(f)) != 1]
        free_rank += sum(1 for f in fs if f == 0)
        fs = [f for f in fs if f]
        if not fs:
            return cls(free_rank, ())
        m = IntMatrix(len(fs), len(fs), {i: {i: f} for i, f in enumerate(fs)})
        diag = smith_normal_form(m).diag
        return cls(free_rank, tuple(d for d in diag if d > 1))

    def is_zero(self):
        return self.free_rank == 0 and not self.torsion

    def torsion_order(self):
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def __add__(self, other):
        return GradedAbelianGroup.from_factors(self.free_rank + other.free_rank, self.torsion + other.torsion)

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        for t in self.torsion:
            parts.append(f"Z/{t}")
        return " + ".join(parts) if parts else "0"


ZERO_GROUP = GradedAbelianGroup()


# ----------------------------------------------------------------------------
# Smith normal form

@dataclass(frozen=True)
class SnfResult:
    """diag holds the nonzero invariant factors; the transforms satisfy
    U @ M @ V == D where D has diag on its leading diagonal."""

    diag: tuple
    U: IntMatrix | None = None
    V: IntMatrix | None = None
    U_inv: IntMatrix | None = None
    V_inv: IntMatrix | None = None

    @property
    def rank(self):
        return len(self.diag)


class _Elim:
    """Mutable working state for one SNF pass."""

    def __init__(self, m, track_rows, track_cols):
        self.R = {i: dict(r) for i, r in m._data.items()}
        self.C = {}
        for i, r in self.R.items():
            for j in r:
                self.C.setdefault(j, set()).add(i)
        self.tr, self.tc = track_rows, track_cols
        n, k = m.rows, m.cols
        # U by rows, U^{-1} by columns, V by columns, V^{-1} by rows
        self.U = {i: {i: 1} for i in range(n)} if track_rows else None
        self.Ui = {i: {i: 1} for i in range(n)} if track_rows else None
        self.V = {j: {j: 1} for j in range(k)} if track_cols else None
        self.Vi = {j: {j: 1} for j in range(k)} if track_cols else None

    # row i += c * row p
    def row_add(self, i, p, c):
        Ri = self.R.setdefault(i, {})
        for j, v in self.R.get(p, {}).items():
            y = Ri.get(j, 0) + c * v
            if y:
                if j not in Ri:
                    self.C.setdefault(j, set()).add(i)
                Ri[j] = y
            elif j in Ri:
                del Ri[j]
                self.C[j].discard(i)
        if self.tr:
            self.U[i] = vec_add(self.U[i], self.U[p], c)
            self.Ui[p] = vec_add(self.Ui[p], self.Ui[i], -c)

    # col j += c * col q
    def col_add(self, j, q, c):
        R, C = self.R, self.C
        for i in list(C.get(q, ())):
            Ri = R[i]
            y = Ri.get(j, 0) + c * Ri[q]
            if y:
                if j not in Ri:
                    C.setdefault(j, set()).add(i)
                Ri[j] = y
            elif j in Ri:
                del Ri[j]
                C[j].discard(i)
        if self.tc:
            self.V[j] = vec_add(self.V[j], self.V[q], c)
            self.Vi[q] = vec_add(self.Vi[q], self.Vi[j], -c)

    # rows (p, i) <- [[s, t], [u, v]] (p, i), determinant 1
    def row_mix(self, p, i, s, t, u, v):
        Rp, Ri = self.R.get(p, {}), self.R.get(i, {})
        newp = vec_add(vec_scale(Rp, s), Ri, t)
        newi = vec_add(vec_scale(Rp, u), Ri, v)
        for j in set(Rp) | set(Ri):
            col = self.C.setdefault(j, set())
            if j in newp:
                col.add(p)
            else:
                col.discard(p)
            if j in newi:
                col.add(i)
            else:
                col.discard(i)
        self.R[p], self.R[i] = newp, newi
        if self.tr:
            Up, Uq = self.U[p], self.U[i]
            self.U[p] = vec_add(vec_scale(Up, s), Uq, t)
            self.U[i] = vec_add(vec_scale(Up, u), Uq, v)
            a, b = self.Ui[p], self.Ui[i]
            self.Ui[p] = vec_add(vec_scale(a, v), b, -u)
            self.Ui[i] = vec_add(vec_scale(a, -t), b, s)

    # cols (q, j) <- (q, j) [[s, u], [t, v]]: new q = s q + t j, new j = u q + v j
    def col_mix(self, q, j, s, t, u, v):
        R, C = self.R, self.C
        rows = set(C.get(q, ())) | set(C.get(j, ()))
        for i in rows:
            Ri = R[i]
            a, b = Ri.get(q, 0), Ri.get(j, 0)
            na, nb = s * a + t * b, u * a + v * b
            for col, val in ((q, na), (j, nb)):
                if val:
                    Ri[col] = val
                    C.setdefault(col, set()).add(i)
                else:
                    Ri.pop(col, None)
                    C.setdefault(col, set()).discard(i)
        if self.tc:
            Vq, Vj = self.V[q], self.V[j]
            self.V[q] = vec_add(vec_scale(Vq, s), Vj, t)
            self.V[j] = vec_add(vec_scale(Vq, u), Vj, v)
            a, b = self.Vi[q], self.Vi[j]
            self.Vi[q] = vec_add(vec_scale(a, v), b, -u)
            self.Vi[j] = vec_add(vec_scale(a, -t), b, s)

    def negate_row(self, p):
        for j in self.R[p]:
            self.R[p][j] = -self.R[p][j]
        if self.tr:
            self.U[p] = vec_scale(self.U[p], -1)
            self.Ui[p] = vec_scale(self.Ui[p], -1)

    def pick_pivot(self):
        best = None
        C = self.C
        for i, r in self.R.items():
            if not r:
                continue
            lr = len(r) - 1
            for j, v in r.items():
                a = v if v > 0 else -v
                key = (a, lr * (len(C[j]) - 1), i, j)
                if best is None or key < best:
                    best = key
                    if a == 1 and key[1] == 0:
                        return i, j
        return None if best is None else (best[2], best[3])

    def clear(self, p, q):
        R, C = self.R, self.C
        while True:
            a = R[p][q]
            dirty = False
            for i in sorted(C[q] - {p}):
                b = R[i].get(q, 0)
                if not b:
                    continue
                a = R[p][q]
                if b % a == 0:
                    self.row_add(i, p, -(b // a))
                else:
                    g, s, t = xgcd(a, b)
                    self.row_mix(p, i, s, t, -b // g, a // g)
            for j in sorted(set(R[p]) - {q}):
                b = R[p].get(j, 0)
                if not b:
                    continue
                a = R[p][q]
                if b % a == 0:
                    self.col_add(j, q, -(b // a))
                else:
                    g, s, t = xgcd(a, b)
                    self.col_mix(q, j, s, t, -b // g, a // g)
                    dirty = True
            if not dirty and len(C[q]) == 1:
                return

    def run(self):
        pivots = []
        while True:
            pv = self.pick_pivot()
            if pv is None:
                break
            p, q = pv
            self.clear(p, q)
            if self.R[p][q] < 0:
                self.negate_row(p)
            pivots.append((p, q, self.R[p][q]))
            del self.R[p]
            del self.C[q]
        return pivots


def _diag_fix(d, st, n_rows, n_cols):
    """Turn a diagonal into a divisibility chain (acting on leading k x k)."""
    k = len(d)
    for i in range(k):
        for j in range(i + 1, k):
            a, b = d[i], d[j]
            if b % a == 0:
                continue
            g, s, t = xgcd(a, b)
            l_ = a // g * b
            if st is not None:
                st.append((i, j, a, b, g, s, t))
            d[i], d[j] = g, l_
    return d


def smith_normal_form(M, transforms=False, track_rows=None, track_cols=None):
    """Smith normal form of an IntMatrix.

    With ``transforms=True`` (or the finer track_rows/track_cols switches) the
    result carries U, V and their inverses with U @ M @ V == diag.
    """
    tr = transforms if track_rows is None else track_rows
    tc = transforms if track_cols is None else track_cols
    el = _Elim(M, tr, tc)
    pivots = el.run()
    d = [v for _, _, v in pivots]
    ops = [] if (tr or tc) else None
    _diag_fix(d, ops, M.rows, M.cols)
    if not (tr or tc):
        return SnfResult(tuple(d))

    n, m = M.rows, M.cols
    prow = [p for p, _, _ in pivots]
    pcol = [q for _, q, _ in pivots]
    pset_r, pset_c = set(prow), set(pcol)
    row_order = prow + [i for i in range(n) if i not in pset_r]
    col_order = pcol + [j for j in range(m) if j not in pset_c]

    U = Ui = V = Vi = None
    if tr:
        Urows = [el.U[i] for i in row_order]          # new row k = old row row_order[k]
        Uicols = [el.Ui[i] for i in row_order]         # columns permuted consistently
        for (i, j, a, b, g, s, t) in ops:
            # rows (i, j) <- L (i, j), L = [[s, t], [-b/g, a/g]]
            ri, rj = Urows[i], Urows[j]
            Urows[i] = vec_add(vec_scale(ri, s), rj, t)
            Urows[j] = vec_add(vec_scale(ri, -b // g), rj, a // g)
            ci, cj = Uicols[i], Uicols[j]
            Uicols[i] = vec_add(vec_scale(ci, a // g), cj, b // g)
            Uicols[j] = vec_add(vec_scale(ci, -t), cj, s)
        U = IntMatrix(n, n, {k: r for k, r in enumerate(Urows)})
        Ui = IntMatrix.from_columns(n, Uicols)
    if tc:
        Vcols = [el.V[j] for j in col_order]
        Virows = [el.Vi[j] for j in col_order]
        for (i, j, a, b, g, s, t) in ops:
            # cols (i, j) <- (i, j) R, R = [[1, -t b/g], [1, s a/g]]
            ci, cj = Vcols[i], Vcols[j]
            Vcols[i] = vec_add(ci, cj)
            Vcols[j] = vec_add(vec_scale(ci, -t * b // g), cj, s * a // g)
            ri, rj = Virows[i], Virows[j]
            Virows[i] = vec_add(vec_scale(ri, s * a // g), rj, t * b // g)
            Virows[j] = vec_add(rj, ri, -1)
        V = IntMatrix.from_columns(m, Vcols)
        Vi = IntMatrix(m, m, {k: r for k, r in enumerate(Virows)})
    return SnfResult(tuple(d), U, V, Ui, Vi)


def rank(M):
    return smith_normal_form(M).rank


# ----------------------------------------------------------------------------
# homology

def _check_composition(d_in, d_out):
    if d_in.rows != d_out.cols:
        raise ValueError(f"d_in has {d_in.rows} rows but d_out has {d_out.cols} columns")
    if not (d_out @ d_in).is_zero():
        raise CompositionNotZero("d_out . d_in != 0")


def homology_at(d_in, d_out, check=True):
    """ker(d_out) / im(d_in) as free rank plus invariant factors."""
    if check:
        _check_composition(d_in, d_out)
    dim = d_in.rows
    r_out = smith_normal_form(d_out).rank if not d_out.is_zero() else 0
    snf_in = smith_normal_form(d_in) if not d_in.is_zero() else SnfResult(())
    free = dim - r_out - snf_in.rank
    return GradedAbelianGroup(free, tuple(x for x in snf_in.diag if x > 1))


class KernelBasis:
    """Saturated lattice basis of ker(M) with an integral coordinate map."""

    def __init__(self, M):
        self.ambient = M.cols
        if M.is_zero():
            self.basis = [{j: 1} for j in range(M.cols)]
            self._coord_rows = [{j: 1} for j in range(M.cols)]
            return
        snf = smith_normal_form(M, track_rows=False, track_cols=True)
        r = snf.rank
        cols = snf.V.columns()
        self.basis = cols[r:]
        self._coord_rows = [snf.V_inv.row(k) for k in range(r, M.cols)]

    @property
    def dim(self):
        return len(self.basis)

    def coords(self, v):
        out = {}
        for k, row in enumerate(self._coord_rows):
            s = 0
            for j, a in row.items():
                b = v.get(j)
                if b:
                    s += a * b
            if s:
                out[k] = s
        return out

    def coord_matrix(self, M):
        """Coordinates of every column of M (which must lie in the kernel)."""
        cols = [self.coords(c) for c in M.columns()]
        return IntMatrix.from_columns(self.dim, cols)

    def lift(self, c):
        out = {}
        for k, a in c.items():
            out = vec_add(out, self.basis[k], a)
        return out


class HomologyBasis:
    """Homology ker(d_out)/im(d_in) together with representatives.

    ``generators`` are cycles whose classes form a basis of the free part;
    ``torsion_generators`` pair with ``group.torsion``.  ``coords`` sends a cycle
    to (free coordinates, torsion coordinates).
    """

    def __init__(self, d_in, d_out, check=True):
        if check:
            _check_composition(d_in, d_out)
        self.dim = d_in.rows
        self.kernel = KernelBasis(d_out)
        A = self.kernel.coord_matrix(d_in)
        if A.is_zero():
            rA, diag = 0, ()
            self._U = None
            n = A.rows
            Ui_cols = [{i: 1} for i in range(n)]
        else:
            snf = smith_normal_form(A, track_rows=True, track_cols=False)
            rA, diag = snf.rank, snf.diag
            self._U = snf.U
            Ui_cols = snf.U_inv.columns()
        self._rank_A = rA
        self._tors_idx = [k for k in range(rA) if diag[k] > 1]
        self._tors_mod = [diag[k] for k in self._tors_idx]
        self.generators = [self.kernel.lift(Ui_cols[k]) for k in range(rA, self.kernel.dim)]
        self.torsion_generators = [self.kernel.lift(Ui_cols[k]) for k in self._tors_idx]
        self.group = GradedAbelianGroup(len(self.generators), tuple(self._tors_mod))

    @property
    def rank(self):
        return len(self.generators)

    def _w(self, z):
        c = self.kernel.coords(z)
        return self._U.apply(c) if self._U is not None else c

    def coords(self, z):
        """Free coordinates (tuple) of the class of the cycle z."""
        w = self._w(z)
        return tuple(w.get(k, 0) for k in range(self._rank_A, self.kernel.dim))

    def torsion_coords(self, z):
        w = self._w(z)
        return tuple(w.get(k, 0) % m for k, m in zip(self._tors_idx, self._tors_mod))

    def class_coords_matrix(self, cycles):
        """Matrix whose columns are free coordinates of the given cycles."""
        cols = []
        for z in cycles:
            c = self.coords(z)
            cols.append({i: v for i, v in enumerate(c) if v})
        return IntMatrix.from_columns(self.rank, cols)


# ----------------------------------------------------------------------------
# lattices

def quotient_group(sub_basis_coords, dim):
    """Group Z^dim / span(columns of sub_basis_coords)."""
    if sub_basis_coords.is_zero():
        return GradedAbelianGroup(dim, ())
    snf = smith_normal_form(sub_basis_coords)
    return GradedAbelianGroup(dim - snf.rank, tuple(x for x in snf.diag if x > 1))


def solve_integer(A, b):
    """One integral solution x of A x = b, or raise InconsistentSystem."""
    snf = smith_normal_form(A, transforms=True)
    c = snf.U.apply(b)
    y = {}
    for k, v in c.items():
        if k < snf.rank:
            if v % snf.diag[k]:
                raise InconsistentSystem("no integral solution")
            y[k] = v // snf.diag[k]
        else:
            raise InconsistentSystem("no rational solution")
    return snf.V.apply(y)


def hermite_reduce(v, lattice_cols, dim):
    """Reduce v modulo the lattice spanned by lattice_cols.

    Uses a row-style Hermite echelon form so the result is a canonical coset
    representative (entries at pivot positions lie in [0, pivot)).
    """
    echelon = hermite_echelon(lattice_cols, dim)
    out = dict(v)
    for piv, col in echelon:
        a = out.get(piv, 0)
        if a:
            q = a // col[piv]
            if q:
                out = vec_add(out, col, -q)
    return out


def hermite_echelon(cols, dim):
    """Echelon basis of the lattice spanned by cols: list of (pivot, vector),
    pivots strictly increasing, pivot entries positive, entries above each
    later pivot reduced."""
    work = [dict(c) for c in cols if c]
    basis = []
    for piv in range(dim):
        holders = [c for c in work if c.get(piv)]
        if not holders:
            continue
        rest = [c for c in work if not c.get(piv)]
        cur = holders[0]
        for other in holders[1:]:
            a, b = cur[piv], other[piv]
            g, s, t = xgcd(a, b)
            newcur = vec_add(vec_scale(cur, s), other, t)
            newother = vec_add(vec_scale(cur, -b // g), other, a // g)
            cur = newcur
            if newother:
                rest.append(newother)
        if cur[piv] < 0:
            cur = vec_scale(cur, -1)
        for k, (p2, c2) in enumerate(basis):
            a = c2.get(piv, 0)
            if a:
                q = a // cur[piv]
                if q:
                    basis[k] = (p2, vec_add(c2, cur, -q))
        basis.append((piv, cur))
        work = rest
    return basis
