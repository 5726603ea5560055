"""Koszul model CH(B) = B (x) Lambda(xhat_1..xhat_r) and its homology.

The model is generic over an algebra that can enumerate a Z-basis per
degree and multiply a basis element by (x_i - y_i).  Two such algebras are
used: B_J (``SoergelAlgebra``) and the flag algebra (``schubert.FlagAlgebra``).

Gradings: q is cohomological (deg x = deg delta = 2, deg xhat = 1) and h is
the number of exterior factors.  d_H lowers h by one and raises q by one.
Exterior monomials are bitmasks over strands, ascending order positive.
"""
from __future__ import annotations

from .exactalg import HomologyBasis, IntMatrix, ZERO_GROUP


class NotChainMap(ValueError):
    pass


def popcount(m):
    return bin(m).count("1")


def exterior_masks(r, h):
    return [m for m in range(1 << r) if popcount(m) == h]


def wedge_sign(E, i):
    """Sign of moving xhat_i to the front of the ascending monomial E (i in E)."""
    return -1 if popcount(E & ((1 << (i - 1)) - 1)) % 2 else 1


def wedge(E, F):
    """xhat_E ^ xhat_F = sign * xhat_{E|F}, or (0, None) if they overlap."""
    if E & F:
        return 0, None
    sign = 1
    for i in range(F.bit_length()):
        if F >> i & 1:
            # every element of E above i must pass xhat_i
            if popcount(E >> (i + 1)) % 2:
                sign = -sign
    return sign, E | F


class SoergelAlgebra:
    """Adapter exposing B_J to the Koszul model."""

    def __init__(self, B):
        self.B = B
        self.r = B.r
        self._xy = [None] + [B.x_minus_y_terms(i) for i in range(1, self.r + 1)]
        self._cache = {}

    def basis(self, d):
        return self.B.basis(d) if d >= 0 else []

    def degree(self, key):
        return soergel_degree(key)

    def mul_xy(self, key, i):
        ck = (key, i)
        hit = self._cache.get(ck)
        if hit is None:
            hit = self.B.mul_terms({key: 1}, self._xy[i])
            self._cache[ck] = hit
        return hit

    def multiply(self, a, b):
        return self.B.mul_terms(a, b)


class KoszulComplex:
    """CH(A) for an algebra adapter A, sliced by (h, q)."""

    def __init__(self, alg):
        self.alg = alg
        self.r = alg.r
        self._basis = {}
        self._index = {}
        self._d = {}

    def basis(self, h, q):
        key = (h, q)
        hit = self._basis.get(key)
        if hit is not None:
            return hit
        out = []
        if 0 <= h <= self.r and q >= h and (q - h) % 2 == 0:
            ab = self.alg.basis((q - h) // 2)
            for E in exterior_masks(self.r, h):
                out.extend((E, k) for k in ab)
        self._basis[key] = out
        self._index[key] = {k: n for n, k in enumerate(out)}
        return out

    def index(self, h, q):
        self.basis(h, q)
        return self._index[(h, q)]

    def dim(self, h, q):
        return len(self.basis(h, q))

    def d_terms(self, key):
        """d_H of a single basis element, as a dict of basis keys."""
        E, a = key
        out = {}
        k = 0
        for i in range(1, self.r + 1):
            if E >> (i - 1) & 1:
                sign = -1 if k % 2 else 1
                F = E & ~(1 << (i - 1))
                for b, c in self.alg.mul_xy(a, i).items():
                    kk = (F, b)
                    v = out.get(kk, 0) + sign * c
                    if v:
                        out[kk] = v
                    else:
                        out.pop(kk)
                k += 1
        return out

    def d_apply(self, z):
        out = {}
        for key, c in z.items():
            for k2, c2 in self.d_terms(key).items():
                v = out.get(k2, 0) + c * c2
                if v:
                    out[k2] = v
                else:
                    out.pop(k2)
        return out

    def d(self, h, q):
        """Matrix of d_H: CH(h, q) -> CH(h-1, q+1)."""
        key = (h, q)
        hit = self._d.get(key)
        if hit is not None:
            return hit
        src = self.basis(h, q)
        tgt_index = self.index(h - 1, q + 1)
        cols = []
        for b in src:
            col = {}
            for k2, c in self.d_terms(b).items():
                col[tgt_index[k2]] = c
            cols.append(col)
        m = IntMatrix.from_columns(len(tgt_index), cols)
        self._d[key] = m
        return m

    def to_vector(self, h, q, z):
        idx = self.index(h, q)
        out = {}
        for k, c in z.items():
            if k not in idx:
                raise ValueError(f"term {k} not in slice (h={h}, q={q})")
            out[idx[k]] = c
        return out

    def from_vector(self, h, q, v):
        b = self.basis(h, q)
        return {b[i]: c for i, c in v.items()}

    def map_matrix(self, f, src, tgt, other=None):
        """Matrix of a linear map given on basis keys, from slice src of this
        complex to slice tgt of `other` (default: this complex)."""
        other = other or self
        tidx = other.index(*tgt)
        cols = []
        for b in self.basis(*src):
            col = {}
            for k, c in f(b).items():
                if k not in tidx:
                    raise ValueError(f"map leaves the target slice {tgt}: {k}")
                col[tidx[k]] = col.get(tidx[k], 0) + c
            cols.append({i: v for i, v in col.items() if v})
        return IntMatrix.from_columns(len(tidx), cols)


class HochschildElement:
    """Element of CH(B): {(exterior_mask, algebra_key): coefficient}."""

    __slots__ = ("cx", "terms")

    def __init__(self, cx, terms):
        self.cx = cx
        self.terms = {k: v for k, v in terms.items() if v}

    def d_H(self):
        return HochschildElement(self.cx, self.cx.d_apply(self.terms))

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return HochschildElement(self.cx, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return HochschildElement(self.cx, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, HochschildElement) and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def gradings(self):
        """Set of (h, q) bidegrees present."""
        out = set()
        for E, a in self.terms:
            h = popcount(E)
            out.add((h, h + 2 * self.cx.alg.degree(a)))
        return out

    def __repr__(self):
        return f"HochschildElement({self.terms})"


def soergel_degree(key):
    m, e = key
    return popcount(m) + sum(e)


class HHGroup:
    """Hochschild homology slices with stored representatives.

    Slices are computed lazily and exactly; ``q_max`` only bounds what
    ``slices`` reports.
    """

    def __init__(self, cx, q_max=None):
        self.cx = cx
        self.q_max = q_max
        self._slices = {}

    @property
    def r(self):
        return self.cx.r

    def slice(self, h, q):
        key = (h, q)
        hit = self._slices.get(key)
        if hit is None:
            cx = self.cx
            hit = HomologyBasis(cx.d(h + 1, q - 1), cx.d(h, q), check=False)
            self._slices[key] = hit
        return hit

    def group(self, h, q):
        if not (0 <= h <= self.r) or q < h or (q - h) % 2:
            return ZERO_GROUP
        return self.slice(h, q).group

    @property
    def slices(self):
        out = {}
        for q in range(0, (self.q_max or 0) + 1):
            for h in range(0, self.r + 1):
                g = self.group(h, q)
                if not g.is_zero():
                    out[(h, q)] = g
        return out

    def representatives(self, h, q):
        return [self.cx.from_vector(h, q, g) for g in self.slice(h, q).generators]

    def class_of(self, h, q, z):
        """Free coordinates of the class of a cycle given as a key dict."""
        return self.slice(h, q).coords(self.cx.to_vector(h, q, z))


def hochschild_homology(B, q_max):
    """HH(B_J) for a SoergelBimodule, exact for every slice with q <= q_max."""
    cx = KoszulComplex(SoergelAlgebra(B))
    hh = HHGroup(cx, q_max)
    for q in range(q_max + 1):
        for h in range(B.r + 1):
            hh.group(h, q)
    return hh


def chain_map_check(src, tgt, f, h, q, dh, dq, parity=0):
    """Check f d = (-1)^parity d f from CH(h, q) of src into tgt.

    f sends src slice (h, q) to tgt slice (h+dh, q+dq)."""
    F_top = src.map_matrix(f, (h, q), (h + dh, q + dq), tgt)
    F_low = src.map_matrix(f, (h - 1, q + 1), (h - 1 + dh, q + 1 + dq), tgt)
    left = F_low @ src.d(h, q)
    right = tgt.d(h + dh, q + dq) @ F_top
    if parity % 2:
        right = -right
    return left == right


def induced_map(f, source, target, src_slice, dh=0, dq=0, parity=0, check=True):
    """Matrix of the map induced on homology by a chain map f.

    `f` acts on basis keys of the source complex and lands in the target
    complex; the result is expressed in the stored representative bases.
    """
    h, q = src_slice
    th, tq = h + dh, q + dq
    if check and not (chain_map_check(source.cx, target.cx, f, h + 1, q - 1, dh, dq, parity)
                      and chain_map_check(source.cx, target.cx, f, h, q, dh, dq, parity)):
        raise NotChainMap(f"map does not commute with d_H at {src_slice}")
    srank = source.group(h, q).free_rank
    trank = target.group(th, tq).free_rank
    if srank == 0 or trank == 0:
        return IntMatrix.zero(trank, srank)
    tslice = target.slice(th, tq)
    tcx = target.cx
    tdout = tcx.d(th, tq)
    cols = []
    for z in source.representatives(h, q):
        img = {}
        for k, c in z.items():
            for k2, c2 in f(k).items():
                v = img.get(k2, 0) + c * c2
                if v:
                    img[k2] = v
                else:
                    img.pop(k2)
        vec = tcx.to_vector(th, tq, img)
        if tdout.apply(vec):
            raise NotChainMap("image of a cycle is not a cycle")
        c = tslice.coords(vec)
        cols.append({i: v for i, v in enumerate(c) if v})
    return IntMatrix.from_columns(tslice.rank, cols)
