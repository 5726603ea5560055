"""The U(3) subalgebra of B_J for words ending in (s, s-1, s) or (s-1, s, s-1).

A is generated by the x's, the y's, every delta before the last three
letters, delta_{l-2} + delta_l and delta_{l-1}.  Its degree pieces are
saturated sublattices of B_J; A is exposed to the Koszul model with keys
('A', d, i) indexing a Hermite basis of A_d.
"""
from __future__ import annotations

from itertools import combinations_with_replacement

from .exactalg import InconsistentSystem, IntMatrix, hermite_echelon, solve_integer
from .hochschild import HHGroup, KoszulComplex, induced_map, soergel_degree, wedge


class NotSubalgebra(ValueError):
    pass


class U3Algebra:
    def __init__(self, B):
        l = len(B.positions)
        if l < 3:
            raise ValueError("need at least three letters")
        self.B = B
        self.r = B.r
        pos = B.positions
        gens = [B.x(i) for i in range(1, self.r + 1)] + [B.y(i) for i in range(1, self.r + 1)]
        gens += [B.delta_at(p) for p in pos[:-3]]
        gens += [B.delta_at(pos[-3]) + B.delta_at(pos[-1]), B.delta_at(pos[-2])]
        self.gens = [g.terms for g in gens]
        self._lat = {}
        self._xy = {}

    # lattice of A_d inside B_d
    def lattice(self, d):
        hit = self._lat.get(d)
        if hit is not None:
            return hit
        bb = self.B.basis(d)
        idx = {k: i for i, k in enumerate(bb)}
        span = []
        for combo in combinations_with_replacement(range(len(self.gens)), d):
            t = {(0, (0,) * self.r): 1}
            for g in combo:
                t = self.B.mul_terms(t, self.gens[g])
            if t:
                span.append({idx[k]: c for k, c in t.items()})
        ech = [v for _, v in hermite_echelon(span, len(bb))]
        M = IntMatrix.from_columns(len(bb), ech)
        hit = (bb, idx, ech, M)
        self._lat[d] = hit
        return hit

    def basis(self, d):
        if d < 0:
            return []
        return [("A", d, i) for i in range(len(self.lattice(d)[2]))]

    def degree(self, key):
        return key[1]

    def to_B(self, key):
        _, d, i = key
        bb, _, ech, _ = self.lattice(d)
        return {bb[j]: c for j, c in ech[i].items()}

    def from_B(self, terms, d):
        """A-coordinates of a homogeneous B_J element of degree d."""
        if not terms:
            return {}
        bb, idx, _, M = self.lattice(d)
        v = {idx[k]: c for k, c in terms.items()}
        try:
            sol = solve_integer(M, v)
        except InconsistentSystem as exc:
            raise NotSubalgebra(f"element of degree {d} not in A") from exc
        return {("A", d, i): c for i, c in sol.items() if c}

    def mul_xy(self, key, i):
        ck = (key, i)
        hit = self._xy.get(ck)
        if hit is None:
            t = self.B.mul_terms(self.to_B(key), self.B.x_minus_y_terms(i))
            hit = self.from_B(t, key[1] + 1)
            self._xy[ck] = hit
        return hit

    def multiply(self, a, b):
        out = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                t = self.B.mul_terms(self.to_B(ka), self.to_B(kb))
                for k, c in self.from_B(t, ka[1] + kb[1]).items():
                    out[k] = out.get(k, 0) + ca * cb * c
        return {k: v for k, v in out.items() if v}

    def restrict_class(self, cls_terms):
        """CH(B_J) terms of a class known to lie in CH(A), in A keys."""
        by_E = {}
        for (E, k), c in cls_terms.items():
            by_E.setdefault(E, {})[k] = c
        out = {}
        for E, t in by_E.items():
            d = {soergel_degree(k) for k in t}
            if len(d) != 1:
                raise ValueError("class is not homogeneous")
            for k, c in self.from_B(t, d.pop()).items():
                out[(E, k)] = c
        return out


def _left_multiply_A(A, cls):
    cache = {}

    def f(key):
        hit = cache.get(key)
        if hit is None:
            E, a = key
            hit = {}
            for (F, b), c in cls.items():
                sign, G = wedge(F, E)
                if not sign:
                    continue
                for k2, v in A.multiply({b: 1}, {a: 1}).items():
                    hit[(G, k2)] = hit.get((G, k2), 0) + sign * c * v
            hit = {k: v for k, v in hit.items() if v}
            cache[key] = hit
        return hit
    return f


def u3_inclusion_verdicts(eng, dm, q_max):
    """Classify H(HH(A), d_-) -> H(HH(B_J), d_-) per (h, Q) at the full vertex."""
    from .cube import _classify
    from .exactalg import HomologyBasis

    word = eng.word
    a, b, c = word.letters[-3:]
    if not (a == c and a > 0 and b > 0 and abs(a - b) == 1):
        raise ValueError("the word must end in (s, s-1, s) or (s-1, s, s-1)")
    mask = (1 << word.n) - 1
    v = eng.vertex(mask)
    A = U3Algebra(v.B)
    cx = KoszulComplex(A)
    hhA = HHGroup(cx)
    cls = A.restrict_class(dm.terms(v.B))
    mul = _left_multiply_A(A, cls)
    incl = lambda key: {(key[0], k): c for k, c in A.to_B(key[1]).items()}
    deg = dm.degree
    r = eng.r

    def minus_A(h, q):
        return induced_map(mul, hhA, hhA, (h, q), 1, deg, 1, check=eng.check)

    verdicts = {}
    for h in range(r + 1):
        for Q in eng.q_range(h, q_max):
            q = Q + v.shift
            rk = hhA.group(h, q).free_rank
            d_out = minus_A(h, q) if h + 1 <= r else IntMatrix.zero(0, rk)
            d_in = (minus_A(h - 1, q - deg) if h >= 1 and q - deg >= h - 1
                    else IntMatrix.zero(rk, 0))
            src = HomologyBasis(d_in, d_out, check=eng.check)
            tgt = eng.stage2(mask, dm, h, Q)
            if not src.rank:
                verdicts[(mask, h, Q)] = "null-domain" if tgt.rank else "zero"
                continue
            if not tgt.rank:
                verdicts[(mask, h, Q)] = "neither"
                continue
            I = induced_map(incl, hhA, v.hh, (h, q), 0, 0, 0, check=eng.check)
            M = tgt.class_coords_matrix([I.apply(g) for g in src.generators])
            verdicts[(mask, h, Q)] = _classify(M)
    return verdicts
