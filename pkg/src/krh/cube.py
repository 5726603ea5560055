"""Cube of resolutions over Hochschild homology and the link homologies built on it.

Every vertex J carries HH(B_J) with exact lazy slices.  Edge maps act on CH
basis keys and carry the sign (-1)^{|e|}; d_v runs from edge.target to
edge.source and raises the cubical degree t.  Keys are shifted by n_J so
that edge maps preserve (h, Q) with Q = q - n_J.

The second differential d_- is multiplication by a Koszul class of
Hochschild degree 1 and degree 2n+1: the potential cycle
kappa' = sum pi(x_j, y_j) xhat_j, or the pullback of beta_n from CH(F).
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .braid import Cube, Subword
from .exactalg import (GradedAbelianGroup, HomologyBasis, IntMatrix, ZERO_GROUP, homology_at,
                       smith_normal_form)
from .hochschild import (HHGroup, KoszulComplex, SoergelAlgebra, induced_map, wedge)
from .report import LinkHomologyReport, WindowTooSmall
from .soergel import SoergelBimodule, monomials


class IntermediateTorsion(ArithmeticError):
    """Torsion at an intermediate stage of an integral iterated homology."""


def default_jobs():
    try:
        return max(1, int(os.environ.get("KRH_JOBS", "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------------- d_minus

@dataclass(frozen=True)
class DMinus:
    """Description of d_-: kind is 'kappa' (potential X^{n+1}) or 'beta'."""

    kind: str
    n: int
    scale: int = 1
    beta_class: object = None

    @property
    def degree(self):
        return 2 * self.n + 1

    @property
    def key(self):
        tag = id(self.beta_class) if self.beta_class is not None else None
        return (self.kind, self.n, self.scale, tag)

    def terms(self, B):
        if self.kind == "kappa":
            t = kappa_prime_terms(B, self.n)
        elif self.kind == "beta":
            from .equivariant import beta
            cls = self.beta_class or beta(self.n, B.r)
            t = cls.pullback(B)
        else:
            raise ValueError(f"unknown d_- kind {self.kind!r}")
        return {k: self.scale * v for k, v in t.items()} if self.scale != 1 else t


def kappa_prime_terms(B, n):
    """sum_j pi(x_j, y_j) xhat_j in CH(B_J) for p = X^{n+1}."""
    out = {}
    for j in range(1, B.r + 1):
        yj = B.y(j)
        acc = B.element()
        ypow = B.one()
        for b in range(n + 1):
            acc = acc + (B.x(j) ** (n - b)) * ypow
            ypow = ypow * yj
        for key, c in acc.terms.items():
            out[(1 << (j - 1), key)] = c
    return out


def _left_multiply(B, cls_terms):
    """Chain map z -> cls * z on CH(B_J) basis keys."""
    cache = {}

    def f(key):
        hit = cache.get(key)
        if hit is None:
            E, a = key
            hit = {}
            for (F, b), c in cls_terms.items():
                sign, G = wedge(F, E)
                if not sign:
                    continue
                for k2, v in B.mul_terms({b: 1}, {a: 1}).items():
                    kk = (G, k2)
                    w = hit.get(kk, 0) + sign * c * v
                    if w:
                        hit[kk] = w
                    else:
                        hit.pop(kk)
            cache[key] = hit
        return hit
    return f


# ---------------------------------------------------------------------- vertex

class Vertex:
    def __init__(self, word, mask):
        self.mask = mask
        self.sub = Subword(word, mask)
        self.B = SoergelBimodule(word, mask)
        self.cx = KoszulComplex(SoergelAlgebra(self.B))
        self.hh = HHGroup(self.cx)
        self.shift = self.sub.shift
        self.degree = self.sub.cubical_degree

    def group(self, h, q):
        return self.hh.group(h, q)

    def rank(self, h, q, coeff="Z"):
        g = self.hh.group(h, q)
        if coeff == "Z" and g.torsion:
            raise IntermediateTorsion(f"HH(B_J) has torsion at J={self.mask:b}, (h, q)=({h}, {q})")
        return g.free_rank


def _slice_worker(args):
    word, mask, keys = args
    v = Vertex(word, mask)
    return mask, [(k, v.hh.slice(*k)) for k in keys]


# ---------------------------------------------------------------------- engine

class CubeEngine:
    def __init__(self, word, jobs=None, check=False):
        self.word = word
        self.r = word.strands
        self.N = word.n
        self.cube = Cube(word)
        self.levels = self.cube.by_degree()
        self.jobs = default_jobs() if jobs is None else max(1, int(jobs))
        self.check = check
        self._vertices = {}
        self._edge_f = {}
        self._edge_hh = {}
        self._minus_f = {}
        self._minus_hh = {}
        self._stage2 = {}
        self._top_t = max(self.levels)
        self.max_shift = max(self.vertex(m).shift for m in range(1 << self.N)) if self.N else 0

    # ----------------------------------------------------------- vertices
    def vertex(self, mask):
        v = self._vertices.get(mask)
        if v is None:
            v = Vertex(self.word, mask)
            self._vertices[mask] = v
        return v

    def masks(self):
        return range(1 << self.N)

    def edges_out(self, mask):
        return self.cube.outgoing(mask)

    def prefetch(self, wanted):
        """Compute HH slices {mask: [(h, q), ...]} in worker processes."""
        todo = {}
        for mask, keys in wanted.items():
            v = self.vertex(mask)
            miss = [k for k in keys if k not in v.hh._slices and 0 <= k[0] <= self.r
                    and k[1] >= k[0] and (k[1] - k[0]) % 2 == 0]
            if miss:
                todo[mask] = sorted(set(miss))
        if self.jobs <= 1 or len(todo) <= 1:
            return
        with ProcessPoolExecutor(max_workers=self.jobs) as ex:
            for mask, items in ex.map(_slice_worker, [(self.word, m, ks) for m, ks in sorted(todo.items())]):
                slices = self.vertex(mask).hh._slices
                for k, hb in items:
                    slices.setdefault(k, hb)

    # ----------------------------------------------------------- edge maps
    def edge_chain(self, edge):
        """Chain map on CH keys from edge.target to edge.source, sign included."""
        f = self._edge_f.get(edge)
        if f is not None:
            return f
        j = edge.position
        sign = edge.sign
        if edge.kind == "positive":
            bit = 1 << j

            def f(key):
                E, (m, e) = key
                return {} if m & bit else {key: sign}
        else:
            Bs = self.vertex(edge.source.mask).B
            iota = (Bs.delta_at(j) + Bs.alpha_at(j)).terms
            cache = {}

            def f(key):
                hit = cache.get(key)
                if hit is None:
                    E, a = key
                    hit = {(E, k): sign * c for k, c in Bs.mul_terms({a: 1}, iota).items()}
                    cache[key] = hit
                return hit
        self._edge_f[edge] = f
        return f

    @staticmethod
    def edge_dq(edge):
        return 0 if edge.kind == "positive" else 2

    def edge_hh(self, edge, h, q):
        """Induced map HH_top(h, q) -> HH_bottom(h, q + dq)."""
        key = (edge, h, q)
        hit = self._edge_hh.get(key)
        if hit is None:
            top = self.vertex(edge.target.mask)
            bot = self.vertex(edge.source.mask)
            hit = induced_map(self.edge_chain(edge), top.hh, bot.hh, (h, q), 0, self.edge_dq(edge),
                              0, check=self.check)
            self._edge_hh[key] = hit
        return hit

    # ----------------------------------------------------------- d_minus
    def minus_chain(self, mask, dm):
        key = (mask, dm.key)
        f = self._minus_f.get(key)
        if f is None:
            B = self.vertex(mask).B
            f = _left_multiply(B, dm.terms(B))
            self._minus_f[key] = f
        return f

    def minus_hh(self, mask, dm, h, q):
        """Induced map HH(h, q) -> HH(h+1, q + 2n+1)."""
        key = (mask, dm.key, h, q)
        hit = self._minus_hh.get(key)
        if hit is None:
            v = self.vertex(mask)
            hit = induced_map(self.minus_chain(mask, dm), v.hh, v.hh, (h, q), 1, dm.degree, 1,
                              check=self.check)
            self._minus_hh[key] = hit
        return hit

    # ----------------------------------------------------------- generic H_v
    def _hv(self, rank, block, coeff):
        """Homology of the cube complex with vertex ranks rank(mask) and edge
        matrices block(edge).  Returns {t: group}."""
        mats = {}
        order = {t: [m for m in ms] for t, ms in self.levels.items()}
        sizes = {t: [rank(m) for m in ms] for t, ms in order.items()}
        if not any(any(s) for s in sizes.values()):
            return {}
        pos = {t: {m: i for i, m in enumerate(ms)} for t, ms in order.items()}
        for t in order:
            if t + 1 not in order:
                continue
            blocks = {}
            for m in order[t]:
                if not sizes[t][pos[t][m]]:
                    continue
                for e in self.edges_out(m):
                    b = e.source.mask
                    if not sizes[t + 1][pos[t + 1][b]]:
                        continue
                    M = block(e)
                    if not M.is_zero():
                        blocks[(pos[t + 1][b], pos[t][m])] = M
            mats[t] = IntMatrix.block(blocks, sizes[t + 1], sizes[t])
        out = {}
        for t in order:
            dim = sum(sizes[t])
            if not dim:
                continue
            d_out = mats.get(t, IntMatrix.zero(0, dim))
            d_in = mats.get(t - 1, IntMatrix.zero(dim, 0))
            g = homology_at(d_in, d_out, check=self.check)
            if coeff == "Q":
                g = GradedAbelianGroup(g.free_rank)
            if not g.is_zero():
                out[t] = g
        return out

    def q_range(self, h, q_max):
        lo = h - self.max_shift
        return [Q for Q in range(lo, q_max + 1) if (Q - h) % 2 == 0]

    # ----------------------------------------------------------- HOMFLY-PT
    def homfly(self, q_max, coeff="Z"):
        self.prefetch({m: [(h, Q + self.vertex(m).shift) for h in range(self.r + 1)
                           for Q in self.q_range(h, q_max)] for m in self.masks()})
        groups = {}
        for h in range(self.r + 1):
            for Q in self.q_range(h, q_max):
                res = self._hv(lambda m: self.vertex(m).rank(h, Q + self.vertex(m).shift, coeff),
                               lambda e: self.edge_hh(e, h, Q + self.vertex(e.target.mask).shift),
                               coeff)
                for t, g in res.items():
                    groups[(t, h, Q)] = g
        return groups

    def dv_squared_ok(self, h, Q):
        """d_v o d_v = 0 on the HH level at shifted slice (h, Q)."""
        for t in self.levels:
            if t + 2 not in self.levels:
                continue
            for m in self.levels[t]:
                for bottom in self.levels[t + 2]:
                    total = None
                    for e1 in self.edges_out(m):
                        for e2 in self.edges_out(e1.source.mask):
                            if e2.source.mask != bottom:
                                continue
                            M = self.edge_hh(e2, h, Q + self.vertex(e1.source.mask).shift) @ \
                                self.edge_hh(e1, h, Q + self.vertex(m).shift)
                            total = M if total is None else total + M
                    if total is not None and not total.is_zero():
                        return False
        return True

    def face_check_chain(self, h, q_top_shifted):
        """Every square anticommutes at chain level on CH(h, Q) basis keys."""
        for top, (a, b), ((e1, f1), (e2, f2)) in self.cube.squares():
            vt = self.vertex(top)
            q = q_top_shifted + vt.shift
            for key in vt.cx.basis(h, q):
                p1 = self._compose(f1, e1, key)
                p2 = self._compose(f2, e2, key)
                s = dict(p1)
                for k, c in p2.items():
                    s[k] = s.get(k, 0) + c
                if any(s.values()):
                    return False
        return True

    def _compose(self, second, first, key):
        out = {}
        g = self.edge_chain(second)
        for k, c in self.edge_chain(first)(key).items():
            for k2, c2 in g(k).items():
                out[k2] = out.get(k2, 0) + c * c2
        return {k: v for k, v in out.items() if v}

    # ----------------------------------------------------------- stage 2
    def stage2(self, mask, dm, h, Q):
        """H(HH(B_J), d_-) at shifted (h, Q), in HH free coordinates."""
        key = (mask, dm.key, h, Q)
        hit = self._stage2.get(key)
        if hit is not None:
            return hit
        v = self.vertex(mask)
        q = Q + v.shift
        deg = dm.degree
        rk = v.rank(h, q)
        if h + 1 <= self.r:
            d_out = self.minus_hh(mask, dm, h, q)
        else:
            d_out = IntMatrix.zero(0, rk)
        if h - 1 >= 0 and q - deg >= h - 1:
            d_in = self.minus_hh(mask, dm, h - 1, q - deg)
        else:
            d_in = IntMatrix.zero(rk, 0)
        hit = HomologyBasis(d_in, d_out, check=self.check)
        self._stage2[key] = hit
        return hit

    def annihilated(self, mask, dm, h, Q, i, power):
        """Whether x_i^power kills H(HH(B_J), d_-) at shifted (h, Q)."""
        st = self.stage2(mask, dm, h, Q)
        if not st.rank and not st.group.torsion:
            return True
        v = self.vertex(mask)
        q = Q + v.shift
        reps = v.hh.representatives(h, q)
        mul = _left_multiply(v.B, {(0, k): c for k, c in (v.B.x(i) ** power).terms.items()})
        target = self.stage2(mask, dm, h, Q + 2 * power)
        for g in st.generators + st.torsion_generators:
            z = {}
            for k, a in g.items():
                for key, c in reps[k].items():
                    for k2, c2 in mul(key).items():
                        z[k2] = z.get(k2, 0) + a * c * c2
            z = {k: c for k, c in z.items() if c}
            hh = v.hh.class_of(h, q + 2 * power, z)
            vec = {j: c for j, c in enumerate(hh) if c}
            if any(target.coords(vec)) or any(target.torsion_coords(vec)):
                return False
        return True

    def stage2_edge(self, edge, dm, h, Q):
        top = self.stage2(edge.target.mask, dm, h, Q)
        bot = self.stage2(edge.source.mask, dm, h, Q)
        if not top.rank or not bot.rank:
            return IntMatrix.zero(bot.rank, top.rank)
        E = self.edge_hh(edge, h, Q + self.vertex(edge.target.mask).shift)
        return bot.class_coords_matrix([E.apply(g) for g in top.generators])

    def iterated_minus(self, dm, q_max, coeff="Z"):
        """H_v(H(HH, d_-)) keyed (gr_v, h, Q)."""
        groups = {}
        deg = dm.degree
        self.prefetch({m: [(h, Q + self.vertex(m).shift + dd) for h in range(self.r + 1)
                           for Q in self.q_range(h, q_max) for dd in (-deg, 0, deg)]
                       for m in self.masks()})
        for h in range(self.r + 1):
            for Q in self.q_range(h, q_max):
                def rank(m):
                    hb = self.stage2(m, dm, h, Q)
                    if coeff == "Z" and hb.group.torsion:
                        raise IntermediateTorsion(f"d_- homology has torsion at J={m:b}, (h, Q)=({h}, {Q})")
                    return hb.rank
                res = self._hv(rank, lambda e: self.stage2_edge(e, dm, h, Q), coeff)
                for t, g in res.items():
                    groups[(t, h, Q)] = g
        return groups

    # ----------------------------------------------------------- total complex
    def s_range(self, dm, s_max):
        lo = -self.max_shift - dm.degree * self.r
        return [s for s in range(lo, s_max + 1) if s % 2 == 0]

    def total_minus(self, dm, s_max, coeff="Z"):
        """H(d_v + d_-) keyed (t, s) with t = gr_v + h and s = Q - (2n+1) h."""
        deg = dm.degree
        out = {}
        for s in self.s_range(dm, s_max):
            blocks_at = {}
            for t in range(self._top_t + self.r + 1):
                bl = []
                for h in range(self.r + 1):
                    for m in self.levels.get(t - h, []):
                        v = self.vertex(m)
                        q = s + deg * h + v.shift
                        rk = v.rank(h, q, coeff) if q >= h else 0
                        if rk:
                            bl.append((m, h, rk))
                blocks_at[t] = bl
            if not any(blocks_at.values()):
                continue
            mats = {}
            for t, bl in blocks_at.items():
                nxt = blocks_at.get(t + 1, [])
                if not bl or not nxt:
                    continue
                idx = {(m, h): i for i, (m, h, _) in enumerate(nxt)}
                blocks = {}
                for j, (m, h, rk) in enumerate(bl):
                    v = self.vertex(m)
                    q = s + deg * h + v.shift
                    for e in self.edges_out(m):
                        i = idx.get((e.source.mask, h))
                        if i is not None:
                            blocks[(i, j)] = self.edge_hh(e, h, q)
                    i = idx.get((m, h + 1))
                    if i is not None:
                        M = self.minus_hh(m, dm, h, q)
                        blocks[(i, j)] = M if v.degree % 2 == 0 else -M
                mats[t] = IntMatrix.block(blocks, [b[2] for b in nxt], [b[2] for b in bl])
            for t, bl in blocks_at.items():
                dim = sum(b[2] for b in bl)
                if not dim:
                    continue
                d_out = mats.get(t, IntMatrix.zero(sum(b[2] for b in blocks_at.get(t + 1, [])), dim))
                d_in = mats.get(t - 1, IntMatrix.zero(dim, sum(b[2] for b in blocks_at.get(t - 1, []))))
                g = homology_at(d_in, d_out, check=self.check)
                if coeff == "Q":
                    g = GradedAbelianGroup(g.free_rank)
                if not g.is_zero():
                    out[(t, s)] = g
        return out

    def double_complex(self, dm, s, coeff="Z"):
        """The (d_-, d_v) double complex at slice s: p = h, q = cubical degree."""
        from .specseq import DoubleComplex
        deg = dm.degree
        ranks, layout = {}, {}
        for h in range(self.r + 1):
            for t, ms in self.levels.items():
                bl = []
                for m in ms:
                    v = self.vertex(m)
                    q = s + deg * h + v.shift
                    rk = v.rank(h, q, coeff) if q >= h else 0
                    if rk:
                        bl.append((m, rk))
                if bl:
                    ranks[(h, t)] = sum(rk for _, rk in bl)
                    layout[(h, t)] = bl
        dh, dv = {}, {}
        for (h, t), bl in layout.items():
            col_sizes = [rk for _, rk in bl]
            if (h + 1, t) in layout:
                nxt = layout[(h + 1, t)]
                idx = {m: i for i, (m, _) in enumerate(nxt)}
                blocks = {}
                for j, (m, rk) in enumerate(bl):
                    if m in idx:
                        v = self.vertex(m)
                        M = self.minus_hh(m, dm, h, s + deg * h + v.shift)
                        blocks[(idx[m], j)] = M if t % 2 == 0 else -M
                dh[(h, t)] = IntMatrix.block(blocks, [rk for _, rk in nxt], col_sizes)
            if (h, t + 1) in layout:
                nxt = layout[(h, t + 1)]
                idx = {m: i for i, (m, _) in enumerate(nxt)}
                blocks = {}
                for j, (m, rk) in enumerate(bl):
                    v = self.vertex(m)
                    for e in self.edges_out(m):
                        if e.source.mask in idx:
                            blocks[(idx[e.source.mask], j)] = self.edge_hh(e, h, s + deg * h + v.shift)
                dv[(h, t)] = IntMatrix.block(blocks, [rk for _, rk in nxt], col_sizes)
        return DoubleComplex(ranks, dh, dv)

    # ----------------------------------------------------------- H_{+-}
    def vertex_plus_minus(self, mask, dm, U):
        """H(CH(B_J), d_H + d_-) at shifted u-degree U = q - n h - n_J."""
        n = dm.n
        key = ("pm", mask, dm.key, U)
        hit = self._stage2.get(key)
        if hit is not None:
            return hit
        v = self.vertex(mask)
        u = U + v.shift
        hit = HomologyBasis(self._pm_matrix(v, dm, u - n - 1), self._pm_matrix(v, dm, u),
                            check=self.check)
        self._stage2[key] = hit
        return hit

    def _pm_layout(self, v, n, u):
        return [(h, u + n * h, v.cx.dim(h, u + n * h)) for h in range(self.r + 1)
                if u + n * h >= h and v.cx.dim(h, u + n * h)]

    def _pm_matrix(self, v, dm, u):
        n = dm.n
        src = self._pm_layout(v, n, u)
        tgt = self._pm_layout(v, n, u + n + 1)
        idx = {h: i for i, (h, _, _) in enumerate(tgt)}
        f = self.minus_chain(v.mask, dm)
        blocks = {}
        for j, (h, q, _) in enumerate(src):
            if h - 1 in idx:
                blocks[(idx[h - 1], j)] = v.cx.d(h, q)
            if h + 1 in idx:
                blocks[(idx[h + 1], j)] = v.cx.map_matrix(f, (h, q), (h + 1, q + dm.degree))
        return IntMatrix.block(blocks, [d for _, _, d in tgt], [d for _, _, d in src])

    def pm_edge(self, edge, dm, U):
        n = dm.n
        top = self.vertex(edge.target.mask)
        bot = self.vertex(edge.source.mask)
        htop = self.vertex_plus_minus(top.mask, dm, U)
        hbot = self.vertex_plus_minus(bot.mask, dm, U)
        if not htop.rank or not hbot.rank:
            return IntMatrix.zero(hbot.rank, htop.rank)
        dq = self.edge_dq(edge)
        src = self._pm_layout(top, n, U + top.shift)
        tgt = self._pm_layout(bot, n, U + bot.shift)
        idx = {h: i for i, (h, _, _) in enumerate(tgt)}
        blocks = {}
        f = self.edge_chain(edge)
        for j, (h, q, _) in enumerate(src):
            if h in idx:
                blocks[(idx[h], j)] = top.cx.map_matrix(f, (h, q), (h, q + dq), bot.cx)
        E = IntMatrix.block(blocks, [d for _, _, d in tgt], [d for _, _, d in src])
        return hbot.class_coords_matrix([E.apply(g) for g in htop.generators])

    def plus_minus_then_v(self, dm, U_max, coeff="Q"):
        """H_v H_{+-} keyed (gr_v, U)."""
        n = dm.n
        lo = -self.max_shift - n * self.r
        groups = {}
        for U in range(lo, U_max + 1):
            res = self._hv(lambda m: self.vertex_plus_minus(m, dm, U).rank,
                           lambda e: self.pm_edge(e, dm, U), coeff)
            for t, g in res.items():
                groups[(t, U)] = g
        return groups

    # ----------------------------------------------------------- universal
    def _uni_layout(self, v, k, h, qt, m):
        out = []
        for a in monomials(k, m):
            q = qt + 2 * sum((i + 1) * e for i, e in enumerate(a))
            rk = v.rank(h, q) if 0 <= h <= self.r and q >= h else 0
            out.append((a, q, rk))
        return out

    def _uni_matrix(self, v, betas, h, qt, m):
        k = len(betas)
        src = self._uni_layout(v, k, h, qt, m)
        tgt = self._uni_layout(v, k, h + 1, qt + 1, m + 1)
        idx = {a: i for i, (a, _, _) in enumerate(tgt)}
        blocks = {}
        for j, (a, q, rk) in enumerate(src):
            if not rk:
                continue
            for i, dm in enumerate(betas):
                b = tuple(e + (1 if x == i else 0) for x, e in enumerate(a))
                ti = idx[b]
                if tgt[ti][2]:
                    blocks[(ti, j)] = self.minus_hh(v.mask, dm, h, q)
        return IntMatrix.block(blocks, [rk for _, _, rk in tgt], [rk for _, _, rk in src])

    def uni_stage2(self, mask, betas, h, qt, m):
        key = ("uni", mask, tuple(d.key for d in betas), h, qt, m)
        hit = self._stage2.get(key)
        if hit is None:
            v = self.vertex(mask)
            d_out = self._uni_matrix(v, betas, h, qt, m)
            if m >= 1:
                d_in = self._uni_matrix(v, betas, h - 1, qt - 1, m - 1)
            else:
                d_in = IntMatrix.zero(d_out.cols, 0)
            hit = HomologyBasis(d_in, d_out, check=self.check)
            self._stage2[key] = hit
        return hit

    def _betas(self, k):
        from .equivariant import beta_universal
        bu = beta_universal(k, self.r)
        return [DMinus("beta", i + 1, 1, bu.classes[i]) for i in range(k)]

    def vertex_universal(self, mask, k, B, q_max):
        """Unshifted universal d_- homology of one vertex keyed (h, qt, m)."""
        betas = self._betas(k)
        out = {}
        for m in range(B):
            for h in range(self.r + 1):
                for qt in range(h - 2 * k * m, q_max + 1):
                    if (qt - h) % 2:
                        continue
                    g = self.uni_stage2(mask, betas, h, qt, m).group
                    if not g.is_zero():
                        out[(h, qt, m)] = g
        return out

    def universal(self, k, B, q_max, coeff="Z"):
        betas = self._betas(k)
        groups = {}
        for m in range(B):
            for h in range(self.r + 1):
                for Q in range(h - 2 * k * m - self.max_shift, q_max + 1):
                    if (Q - h) % 2:
                        continue

                    def rank(mask):
                        hb = self.uni_stage2(mask, betas, h, Q + self.vertex(mask).shift, m)
                        if coeff == "Z" and hb.group.torsion:
                            raise IntermediateTorsion(f"universal d_- homology has torsion at J={mask:b}")
                        return hb.rank

                    def block(e):
                        top = self.vertex(e.target.mask)
                        bot = self.vertex(e.source.mask)
                        ht = self.uni_stage2(top.mask, betas, h, Q + top.shift, m)
                        hb = self.uni_stage2(bot.mask, betas, h, Q + bot.shift, m)
                        if not ht.rank or not hb.rank:
                            return IntMatrix.zero(hb.rank, ht.rank)
                        src = self._uni_layout(top, k, h, Q + top.shift, m)
                        tgt = self._uni_layout(bot, k, h, Q + bot.shift, m)
                        blocks = {(i, i): self.edge_hh(e, h, src[i][1])
                                  for i in range(len(src)) if src[i][2] and tgt[i][2]}
                        E = IntMatrix.block(blocks, [x[2] for x in tgt], [x[2] for x in src])
                        return hb.class_coords_matrix([E.apply(g) for g in ht.generators])

                    res = self._hv(rank, block, coeff)
                    for t, g in res.items():
                        groups[(t, h, Q, m)] = g
        return LinkHomologyReport(self.word.text(), self.r, f"equivariant:{k}",
                                  {"q_max": q_max, "b_cap": B}, groups)

    # ----------------------------------------------------------- theories
    def _report(self, theory, q_max, groups, **checks):
        rep = LinkHomologyReport(self.word.text(), self.r, theory, {"q_max": q_max}, groups)
        rep.checks.update(checks)
        return rep

    def normalized(self, n, q_max, coeff="Z", beta_class=None, verify_total=True):
        from .equivariant import beta
        cls = beta_class if beta_class is not None else beta(n, self.r)
        dm = DMinus("beta", n, 1, cls)
        it = self.iterated_minus(dm, q_max, coeff)
        groups = {k: g for k, g in it.items() if k[2] <= q_max}
        checks = {}
        if verify_total:
            checks["total_isomorphic"] = self._compare_total(dm, it, q_max, coeff)
        checks["concentrated"] = all(k[1] == self.r for k in groups)
        return self._report(f"sln:{n}", q_max, groups, **checks)

    def _compare_total(self, dm, iterated, q_max, coeff):
        deg = dm.degree
        tot = self.total_minus(dm, q_max - deg * self.r, coeff)
        placed = {}
        for (t, s), g in tot.items():
            placed[(t - self.r, self.r, s + deg * self.r)] = g
        lhs = {k: g for k, g in iterated.items() if k[2] - deg * k[1] <= q_max - deg * self.r}
        rhs = {}
        for k, g in lhs.items():
            kk = (k[0] + k[1] - self.r, self.r, k[2] + deg * (self.r - k[1]))
            rhs[kk] = rhs.get(kk, ZERO_GROUP) + g
        return placed == rhs

    def unnormalized(self, n, q_max, dm=None):
        dm = dm or DMinus("kappa", n)
        deg = dm.degree
        tot = self.total_minus(dm, q_max - deg * self.r)
        groups = {(t - self.r, self.r, s + deg * self.r): g for (t, s), g in tot.items()}
        return self._report(f"sln-raw:{n}", q_max, groups)

    def rational(self, n, q_max):
        dm = DMinus("kappa", n)
        deg = dm.degree
        it = self.iterated_minus(dm, q_max, "Q")
        groups = {k: g for k, g in it.items() if k[2] <= q_max}
        g_cut = q_max - n * self.r
        tot = self.total_minus(dm, g_cut, "Q")
        pm = self.plus_minus_then_v(dm, g_cut, "Q")
        A, Bt, C = {}, {}, {}
        for (v, h, Q), g in it.items():
            gg = (n + 1) * v + Q - n * h
            if gg <= g_cut:
                A[gg] = A.get(gg, 0) + g.free_rank
        for (t, s), g in tot.items():
            gg = (n + 1) * t + s
            if gg <= g_cut:
                Bt[gg] = Bt.get(gg, 0) + g.free_rank
        for (v, U), g in pm.items():
            gg = (n + 1) * v + U
            if gg <= g_cut:
                C[gg] = C.get(gg, 0) + g.free_rank
        clean = lambda d: {k: v for k, v in d.items() if v}
        rep = self._report(f"sln-rational:{n}", q_max, groups,
                           orders_agree=clean(A) == clean(Bt) == clean(C),
                           concentrated=all(k[1] == self.r for k in groups))
        rep.checks["order_tables"] = {"HvHmHp": clean(A), "Hvm": clean(Bt), "HvHpm": clean(C)}
        return rep

    def krasner(self, n, q_max, r_max=None):
        from .specseq import pages
        dm = DMinus("kappa", n)
        deg = dm.degree
        out = {}
        for s in self.s_range(dm, q_max - deg * self.r):
            C = self.double_complex(dm, s)
            if not C.ranks:
                continue
            out[s] = pages(C, "vertical", r_max)
        return out


# --------------------------------------------------------------------- API

def _engine(D, jobs=None, check=False):
    return D if isinstance(D, CubeEngine) else CubeEngine(D, jobs=jobs, check=check)


def _window(q_max):
    if q_max < 0:
        raise WindowTooSmall("q_max must be non-negative")


def homfly_homology(D, q_max, coeff="Z", jobs=None):
    _window(q_max)
    eng = _engine(D, jobs)
    groups = eng.homfly(q_max, coeff)
    return LinkHomologyReport(eng.word.text(), eng.r, "homfly", {"q_max": q_max}, groups)


def sln_unnormalized(D, n, q_max, jobs=None):
    if n < 1:
        raise ValueError("n must be at least 1")
    _window(q_max)
    return _engine(D, jobs).unnormalized(n, q_max)


def sln_normalized(D, n, q_max, coeff="Z", jobs=None):
    if n < 0:
        raise ValueError("n must be non-negative")
    _window(q_max)
    return _engine(D, jobs).normalized(n, q_max, coeff)


def sln_scaled(D, n, q_max, jobs=None):
    """H_{v-}H_+ with d_- = (n+1) beta_n, graded like sln_unnormalized."""
    from .equivariant import beta
    _window(q_max)
    eng = _engine(D, jobs)
    dm = DMinus("beta", n, n + 1, beta(n, eng.r))
    rep = eng.unnormalized(n, q_max, dm)
    rep.theory = f"sln-scaled:{n}"
    return rep


def rational_sln(D, n, q_max, jobs=None):
    if n < 1:
        raise ValueError("n must be at least 1")
    _window(q_max)
    return _engine(D, jobs).rational(n, q_max)


def krasner_homology(D, n, q_max, r_max=None, jobs=None):
    _window(q_max)
    return _engine(D, jobs).krasner(n, q_max, r_max)


def krasner_report(D, n, q_max, jobs=None):
    """Associated graded E_infinity of the Krasner spectral sequence as a report
    keyed (gr_v, gr_h, gr_q)."""
    _window(q_max)
    eng = _engine(D, jobs)
    deg = 2 * n + 1
    groups = {}
    for s, pg in eng.krasner(n, q_max).items():
        for (p, q), g in pg[-1].groups.items():
            groups[(q, p, s + deg * p)] = g
    groups = {k: g for k, g in groups.items() if k[2] <= q_max}
    return LinkHomologyReport(eng.word.text(), eng.r, f"krasner:{n}", {"q_max": q_max}, groups)


# --------------------------------------------------------------------- INS

@dataclass
class INSReport:
    kind: str
    verdicts: dict          # (J mask, h, Q) -> "injective" | "surjective" | "split-injective" | ...

    @property
    def passed(self):
        want = {"positive": ("injective", "split-injective", "bijective", "null-domain", "zero"),
                "negative": ("surjective", "bijective", "null-target", "zero"),
                "u3": ("split-injective", "bijective", "null-domain", "zero")}[self.kind]
        return all(v in want for v in self.verdicts.values())


def _classify(M):
    if M.cols == 0 and M.rows == 0:
        return "zero"
    if M.cols == 0:
        return "null-domain"
    if M.rows == 0:
        return "null-target"
    snf = smith_normal_form(M)
    rk = snf.rank
    inj = rk == M.cols
    surj = rk == M.rows and all(d == 1 for d in snf.diag)
    if inj and surj:
        return "bijective"
    if surj:
        return "surjective"
    if inj:
        return "split-injective" if all(d == 1 for d in snf.diag) else "injective"
    return "neither"


def check_ins(word, kind, n=2, q_max=6):
    """INS verdicts on d_- homology of HH (d_- = beta_n).

    positive/negative: the word ends in a fresh letter +-(r-1); every vertex
    pair across that letter is checked.  u3: the word ends in (s, s-1, s) or
    (s-1, s, s-1); the inclusion of the U(3) subalgebra is checked at the
    all-singular vertex."""
    eng = CubeEngine(word)
    dm = DMinus("beta", n)
    verdicts = {}
    r = word.strands
    if kind in ("positive", "negative"):
        last = word.n - 1
        lt = word.letters[last]
        if abs(lt) != r - 1 or any(abs(l) == r - 1 for l in word.letters[:-1]):
            raise ValueError("the last letter must be the only occurrence of +-(r-1)")
        if (lt > 0) != (kind == "positive"):
            raise ValueError("edge kind does not match the sign of the last letter")
        for e in eng.cube.edges:
            if e.position != last:
                continue
            for h in range(r + 1):
                for Q in eng.q_range(h, q_max):
                    M = eng.stage2_edge(e, dm, h, Q)
                    verdicts[(e.target.mask, h, Q)] = _classify(M)
        return INSReport(kind, verdicts)
    if kind == "u3":
        from .u3 import u3_inclusion_verdicts
        return INSReport(kind, u3_inclusion_verdicts(eng, dm, q_max))
    raise ValueError(f"unknown INS kind {kind!r}")
