"""Spectral sequences of bounded double complexes of free abelian groups.

Pages come straight from lattice subquotients of the total complex:
with F^k the sum of columns p >= k,

    Z_r^p = {x in F^p : D x in F^{p+r}},   Z_{-1}^p = F^p,
    E_r^p = Z_r^p / (Z_{r-1}^{p+1} + D Z_{r-1}^{p-r+1}).

The horizontal filtration is handled by transposing.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .exactalg import GradedAbelianGroup, HomologyBasis, IntMatrix, homology_at


class InvariantViolation(ValueError):
    pass


class NotStabilized(RuntimeError):
    pass


@dataclass
class DoubleComplex:
    """ranks[(p, q)]; dh[(p, q)]: (p, q) -> (p+1, q); dv[(p, q)]: (p, q) -> (p, q+1)."""

    ranks: dict
    dh: dict = field(default_factory=dict)
    dv: dict = field(default_factory=dict)

    def __post_init__(self):
        self.ranks = {k: v for k, v in self.ranks.items() if v}

    def rank(self, p, q):
        return self.ranks.get((p, q), 0)

    def h(self, p, q):
        m = self.dh.get((p, q))
        return m if m is not None else IntMatrix.zero(self.rank(p + 1, q), self.rank(p, q))

    def v(self, p, q):
        m = self.dv.get((p, q))
        return m if m is not None else IntMatrix.zero(self.rank(p, q + 1), self.rank(p, q))

    def check(self):
        for (p, q), m in self.dh.items():
            if m.shape != (self.rank(p + 1, q), self.rank(p, q)):
                raise InvariantViolation(f"d_h at {(p, q)} has the wrong shape")
        for (p, q), m in self.dv.items():
            if m.shape != (self.rank(p, q + 1), self.rank(p, q)):
                raise InvariantViolation(f"d_v at {(p, q)} has the wrong shape")
        for (p, q) in self.ranks:
            if not (self.h(p + 1, q) @ self.h(p, q)).is_zero():
                raise InvariantViolation(f"d_h^2 != 0 at {(p, q)}")
            if not (self.v(p, q + 1) @ self.v(p, q)).is_zero():
                raise InvariantViolation(f"d_v^2 != 0 at {(p, q)}")
            if not (self.v(p + 1, q) @ self.h(p, q) + self.h(p, q + 1) @ self.v(p, q)).is_zero():
                raise InvariantViolation(f"d_h and d_v do not anticommute at {(p, q)}")
        return True

    def transpose(self):
        return DoubleComplex({(q, p): r for (p, q), r in self.ranks.items()},
                             {(q, p): m for (p, q), m in self.dv.items()},
                             {(q, p): m for (p, q), m in self.dh.items()})

    @property
    def p_span(self):
        ps = [p for p, _ in self.ranks]
        return (min(ps), max(ps)) if ps else (0, -1)

    def total_degrees(self):
        return sorted({p + q for p, q in self.ranks})

    # ------------------------------------------------------------ total
    def layout(self, N):
        """[(p, rank, offset)] of the total degree N, p ascending."""
        out, off = [], 0
        lo, hi = self.p_span
        for p in range(lo, hi + 1):
            r = self.rank(p, N - p)
            if r:
                out.append((p, r, off))
                off += r
        return out

    def total(self, N):
        """Total differential C^N -> C^{N+1}."""
        src, tgt = self.layout(N), self.layout(N + 1)
        tpos = {p: i for i, (p, _, _) in enumerate(tgt)}
        blocks = {}
        for j, (p, _, _) in enumerate(src):
            q = N - p
            if p + 1 in tpos:
                blocks[(tpos[p + 1], j)] = self.h(p, q)
            if p in tpos:
                m = self.v(p, q)
                key = (tpos[p], j)
                blocks[key] = blocks[key] + m if key in blocks else m
        return IntMatrix.block(blocks, [r for _, r, _ in tgt], [r for _, r, _ in src])

    def total_homology(self, N):
        dim = sum(r for _, r, _ in self.layout(N))
        return homology_at(self.total(N - 1), self.total(N), check=False) if dim else GradedAbelianGroup()


@dataclass
class SSPage:
    r: int
    groups: dict                     # (p, q) -> GradedAbelianGroup
    differentials: dict = field(default_factory=dict)   # (p, q) -> free-part matrix of d_r
    final: bool = False
    filtration: str = "vertical"

    def target(self, p, q):
        """Bidegree hit by d_r from (p, q)."""
        r = self.r
        return (p + r, q - r + 1) if self.filtration == "vertical" else (p - r + 1, q + r)

    def support(self):
        return {k for k, g in self.groups.items() if not g.is_zero()}

    def total_ranks(self):
        out = {}
        for (p, q), g in self.groups.items():
            out[p + q] = out.get(p + q, 0) + g.free_rank
        return {k: v for k, v in out.items() if v}


class _Filtered:
    """Lattice computations for the column filtration of one double complex."""

    def __init__(self, C):
        self.C = C
        self.lo, self.hi = C.p_span
        self._lay = {}
        self._D = {}
        self._Z = {}

    def lay(self, N):
        hit = self._lay.get(N)
        if hit is None:
            hit = self.C.layout(N)
            self._lay[N] = hit
        return hit

    def dim(self, N):
        return sum(r for _, r, _ in self.lay(N))

    def D(self, N):
        hit = self._D.get(N)
        if hit is None:
            hit = self.C.total(N)
            self._D[N] = hit
        return hit

    def f_cols(self, N, p):
        """Full coordinates of F^p C^N."""
        return [o + i for q, r, o in self.lay(N) if q >= p for i in range(r)]

    def f_rows(self, N, p):
        return [o + i for q, r, o in self.lay(N) if q < p for i in range(r)]

    def Z(self, r, p, N):
        """Lattice basis of Z_r^{p, N} in full coordinates of C^N."""
        key = (r, p, N)
        hit = self._Z.get(key)
        if hit is not None:
            return hit
        cols = self.f_cols(N, p)
        if r < 0 or not cols:
            hit = [{c: 1} for c in cols]
        else:
            rows = self.f_rows(N + 1, p + r)
            M = self.D(N).submatrix(rows, cols) if rows else IntMatrix.zero(0, len(cols))
            from .exactalg import KernelBasis
            kb = KernelBasis(M)
            hit = [{cols[i]: v for i, v in vec.items()} for vec in kb.basis]
        self._Z[key] = hit
        return hit

    def page_slice(self, r, p, N):
        """(HomologyBasis in F^p coordinates, F^p columns) for E_r^{p, N}."""
        cols = self.f_cols(N, p)
        if not cols:
            return None, cols
        pos = {c: i for i, c in enumerate(cols)}
        rows_out = self.f_rows(N + 1, p + r) if r >= 0 else []
        M = self.D(N).submatrix(rows_out, cols) if rows_out else IntMatrix.zero(0, len(cols))
        subs = []
        for z in self.Z(r - 1, p + 1, N):
            subs.append({pos[c]: v for c, v in z.items()})
        if r >= 1:
            for y in self.Z(r - 1, p - r + 1, N - 1):
                dy = self.D(N - 1).apply(y)
                subs.append({pos[c]: v for c, v in dy.items()})
        L = IntMatrix.from_columns(len(cols), [s for s in subs if s])
        return HomologyBasis(L, M, check=False), cols


def _column_pages(C, r_stop):
    F = _Filtered(C)
    lo, hi = F.lo, F.hi
    degs = C.total_degrees()
    out = []
    for r in range(0, r_stop + 1):
        groups, bases = {}, {}
        for N in degs:
            for p in range(lo, hi + 1):
                hb, cols = F.page_slice(r, p, N)
                if hb is None:
                    continue
                if not hb.group.is_zero():
                    groups[(p, N - p)] = hb.group
                bases[(p, N)] = (hb, cols)
        diffs = {}
        for (p, N), (hb, cols) in bases.items():
            tgt = bases.get((p + r, N + 1))
            if not hb.rank or tgt is None or not tgt[0].rank:
                continue
            thb, tcols = tgt
            tpos = {c: i for i, c in enumerate(tcols)}
            images = []
            for g in hb.generators:
                full = {cols[i]: v for i, v in g.items()}
                dx = F.D(N).apply(full)
                images.append({tpos[c]: v for c, v in dx.items()})
            diffs[(p, N - p)] = thb.class_coords_matrix(images)
        out.append(SSPage(r, groups, diffs))
    return out


def pages(C, filtration="vertical", r_max=None, check=True):
    """All pages E_0 .. E_R of the spectral sequence of the given filtration.

    'vertical' filters by columns p (d_0 = d_v); 'horizontal' by rows q
    (d_0 = d_h).  R is the stabilization bound unless r_max is smaller, in
    which case the last page is not marked final."""
    if check:
        C.check()
    if filtration not in ("vertical", "horizontal"):
        raise ValueError("filtration must be 'vertical' or 'horizontal'")
    work = C if filtration == "vertical" else C.transpose()
    lo, hi = work.p_span
    bound = max(hi - lo + 2, 1)
    r_stop = bound if r_max is None else min(r_max, bound)
    pg = _column_pages(work, r_stop)
    if filtration == "horizontal":
        for page in pg:
            page.groups = {(q, p): g for (p, q), g in page.groups.items()}
            page.differentials = {(q, p): m for (p, q), m in page.differentials.items()}
            page.filtration = "horizontal"
    if r_stop >= bound:
        pg[-1].final = True
    return pg


@dataclass
class CollapseReport:
    page: int
    certificate: bool
    differentials_vanish: bool


def collapse_report(pg):
    """First page r with E_r = E_infinity on the computed support."""
    if not pg or not pg[-1].final:
        raise NotStabilized("pages did not reach the stabilization bound")
    inf = pg[-1].groups
    first = len(pg) - 1
    for r in range(len(pg) - 1, -1, -1):
        if pg[r].groups == inf:
            first = r
        else:
            break
    cert, vanish = True, True
    for page in pg[first:]:
        sup = page.support()
        if any(page.target(p, q) in sup for p, q in sup):
            cert = False
        for m in page.differentials.values():
            if not m.is_zero():
                vanish = False
    return CollapseReport(first, cert, vanish)
