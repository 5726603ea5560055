"""Koszul vertex complexes K_p(D_J) over Z[X_e] and their reduction to CH(B_J).

Generators are named ('g', j, l) for the mark on strand l of layer j and
('u', j), ('x', j) for the singular crossing of layer j; exterior monomials
are sorted tuples of names.  Polynomials are {exponent tuple: int} over the
arc variables of the diagram in layer-major order.

At a crossing on strands a, a+1 of layer j the local variables are
X1 = X[j-1, a], X2 = X[j-1, a+1] (incoming) and X3 = X[j, a], X4 = X[j, a+1]
(outgoing).  A mark m has X_{m,1} incoming and X_{m,2} outgoing.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import sympy

from .braid import resolution_diagram
from .exactalg import IntMatrix, homology_at
from .soergel import monomials


class DivisibilityFailure(ArithmeticError):
    pass


# ------------------------------------------------------------------ potentials

_X, _Y, _Z, _W = sympy.symbols("X Y Z W")


def _to_dict(expr, gens):
    poly = sympy.Poly(sympy.expand(expr), *gens, domain="ZZ")
    return {tuple(m): int(c) for m, c in poly.terms() if c}


@dataclass(frozen=True)
class Potential:
    coeffs: tuple            # p = sum coeffs[k] X^k
    pi: dict                 # over (X, Y)
    u1: dict                 # over (X, Y, Z, W)
    u2: dict
    correction: dict         # (u1 + X1 u2 - pi(X2, X4)) / (X3 - X1) over (X1..X4)

    @property
    def degree(self):
        return max((k for k, c in enumerate(self.coeffs) if c), default=0)

    def p_expr(self, X=_X):
        return sum(c * X ** k for k, c in enumerate(self.coeffs))

    def check(self):
        """Exact verification of both factorization identities."""
        p = self.p_expr
        pi = _expr(self.pi, (_X, _Y))
        u1 = _expr(self.u1, (_X, _Y, _Z, _W))
        u2 = _expr(self.u2, (_X, _Y, _Z, _W))
        ok1 = sympy.expand((_X - _Y) * pi - (p(_X) - p(_Y))) == 0
        lhs = p(_X) + p(_Y) - p(_Z) - p(_W)
        ok2 = sympy.expand((_X + _Y - _Z - _W) * u1 + (_X * _Y - _Z * _W) * u2 - lhs) == 0
        return ok1 and ok2


def _expr(d, gens):
    return sum((c * sympy.prod([g ** e for g, e in zip(gens, m)]) for m, c in d.items()),
               sympy.Integer(0))


def _power_sum_g(coeffs):
    """g(s, t) with p(X) + p(Y) = g(X+Y, XY)."""
    s, t = sympy.symbols("s t")
    P = [sympy.Integer(2), s]
    for k in range(2, len(coeffs)):
        P.append(sympy.expand(s * P[-1] - t * P[-2]))
    return s, t, sympy.expand(sum(c * P[k] for k, c in enumerate(coeffs)))


def potential_data(p, twist=0):
    """Factorization data (pi, u1, u2) for p given as coefficient list or sympy
    polynomial in one variable.  `twist` h shifts to the admissible choice
    u1 + (XY - ZW) h, u2 - (X + Y - Z - W) h.  A nonzero integer twist keeps
    the data homogeneous only for deg p = 3."""
    if isinstance(p, (list, tuple)):
        coeffs = tuple(int(c) for c in p)
    else:
        poly = sympy.Poly(p)
        coeffs = tuple(int(c) for c in reversed(poly.all_coeffs()))
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    pX = sum((c * _X ** k for k, c in enumerate(coeffs)), sympy.Integer(0))
    pi = sympy.cancel((pX - pX.subs(_X, _Y)) / (_X - _Y)) if coeffs else sympy.Integer(0)
    s, t, g = _power_sum_g(coeffs)
    s1, s2, t1, t2 = _X + _Y, _Z + _W, _X * _Y, _Z * _W
    u1 = sympy.cancel((g.subs({s: s1, t: t1}) - g.subs({s: s2, t: t1})) / (s1 - s2))
    u2 = sympy.cancel((g.subs({s: s2, t: t1}) - g.subs({s: s2, t: t2})) / (t1 - t2))
    u1 = sympy.expand(u1 + (t1 - t2) * twist)
    u2 = sympy.expand(u2 - (s1 - s2) * twist)
    X1, X2, X3, X4 = _Z, _W, _X, _Y
    num = sympy.expand(u1 + X1 * u2 - pi.subs(_X, X2))
    q, rem = sympy.div(sympy.Poly(num, _X, _Y, _Z, _W), sympy.Poly(X3 - X1, _X, _Y, _Z, _W))
    if not rem.is_zero:
        raise DivisibilityFailure("edge-map correction term is not a polynomial")
    # correction stored over (X1, X2, X3, X4) = (Z, W, X, Y)
    corr = _to_dict(q.as_expr(), (_Z, _W, _X, _Y))
    P = Potential(coeffs, _to_dict(pi, (_X, _Y)), _to_dict(u1, (_X, _Y, _Z, _W)),
                  _to_dict(u2, (_X, _Y, _Z, _W)), corr)
    if not P.check():
        raise DivisibilityFailure("factorization identities fail")
    return P


def power_potential(n):
    """p = X^{n+1}."""
    return potential_data([0] * (n + 1) + [1])


# ---------------------------------------------------------------- polynomials

def _padd(a, b, c=1):
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, 0) + c * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def _pmul(a, b):
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            w = out.get(k, 0) + va * vb
            if w:
                out[k] = w
            else:
                del out[k]
    return out


def _subst(local, images, nvars):
    """Evaluate a polynomial in local variables at given polynomials."""
    out = {}
    for mon, c in local.items():
        term = {(0,) * nvars: c}
        for v, e in zip(images, mon):
            for _ in range(e):
                term = _pmul(term, v)
        out = _padd(out, term)
    return out


def _wedge_sorted(a, b):
    """Product of sorted name tuples: (sign, tuple) or (0, None)."""
    if set(a) & set(b):
        return 0, None
    merged = list(a) + list(b)
    sign = 1
    # count inversions between a and b
    for y in b:
        for x in a:
            if x > y:
                sign = -sign
    return sign, tuple(sorted(merged))


# ------------------------------------------------------------- vertex complex

_KIND_DEG = {"g": 1, "u": 1, "x": 3}


class KRVertexComplex:
    """K_p(D_J) = Z[X_e] (x) Lambda(gamma_m, upsilon_c, xi_c) with d_+ and d_-.

    Elements are {(exterior tuple, exponent tuple): int}.  Gradings: h is the
    number of exterior factors, q the cohomological degree.
    """

    def __init__(self, diagram, potential=None):
        self.diagram = diagram
        self.P = potential
        self.vars = diagram.arc_variables()
        self.var_index = {v: i for i, v in enumerate(self.vars)}
        self.nvars = len(self.vars)
        gens = []
        for L in diagram.layers:
            for l in L.marks:
                gens.append(("g", L.index, l))
            if L.crossing is not None:
                gens.append(("u", L.index))
                gens.append(("x", L.index))
        self.generators = tuple(sorted(gens))
        self._basis = {}
        self._index = {}

    # variables
    def X(self, arc):
        e = [0] * self.nvars
        e[self.var_index[arc]] = 1
        return {tuple(e): 1}

    def mark_vars(self, j, l):
        return self.diagram.incoming(j, l), self.diagram.outgoing(j, l)

    def crossing_vars(self, j):
        a = self.diagram.layers[j].crossing
        return (j - 1, a), (j - 1, a + 1), (j, a), (j, a + 1)

    def gen_degree(self, g):
        return _KIND_DEG[g[0]]

    @cached_property
    def relation(self):
        """d_+ of each generator, as a polynomial."""
        out = {}
        for g in self.generators:
            if g[0] == "g":
                a, b = self.mark_vars(g[1], g[2])
                out[g] = _padd(self.X(b), self.X(a), -1)
            else:
                X1, X2, X3, X4 = (self.X(v) for v in self.crossing_vars(g[1]))
                if g[0] == "u":
                    out[g] = _padd(_padd(X3, X4), _padd(X1, X2), -1)
                else:
                    out[g] = _padd(_pmul(X3, X4), _pmul(X1, X2), -1)
        return out

    def closing_gamma(self, i):
        return ("g", 0, i)

    # bases
    def basis(self, h, q):
        key = (h, q)
        hit = self._basis.get(key)
        if hit is not None:
            return hit
        out = []
        from itertools import combinations
        for S in (combinations(self.generators, h) if h >= 0 else ()):
            d = q - sum(self.gen_degree(g) for g in S)
            if d >= 0 and d % 2 == 0:
                out.extend((S, m) for m in monomials(self.nvars, d // 2))
        self._basis[key] = out
        self._index[key] = {k: i for i, k in enumerate(out)}
        return out

    def index(self, h, q):
        self.basis(h, q)
        return self._index[(h, q)]

    # algebra
    def multiply(self, u, v):
        out = {}
        for (E, a), c in u.items():
            for (F, b), d in v.items():
                sign, G = _wedge_sorted(E, F)
                if not sign:
                    continue
                k = (G, tuple(x + y for x, y in zip(a, b)))
                w = out.get(k, 0) + sign * c * d
                if w:
                    out[k] = w
                else:
                    out.pop(k, None)
        return out

    def poly(self, p):
        return {((), m): c for m, c in p.items()}

    def d_plus(self, z):
        out = {}
        for (E, m), c in z.items():
            for k, g in enumerate(E):
                sign = -1 if k % 2 else 1
                rest = E[:k] + E[k + 1:]
                for m2, c2 in self.relation[g].items():
                    key = (rest, tuple(x + y for x, y in zip(m, m2)))
                    w = out.get(key, 0) + sign * c * c2
                    if w:
                        out[key] = w
                    else:
                        out.pop(key, None)
        return out

    @cached_property
    def kappa(self):
        return kappa(self)

    def d_minus(self, z):
        return self.multiply(self.kappa, z)

    def d_total(self, z):
        return _padd(self.d_plus(z), self.d_minus(z))

    def matrix(self, f, src, tgt):
        tidx = self.index(*tgt)
        cols = []
        for b in self.basis(*src):
            col = {}
            for k, c in f({b: 1}).items():
                col[tidx[k]] = col.get(tidx[k], 0) + c
            cols.append(col)
        return IntMatrix.from_columns(len(tidx), cols)

    def d_plus_matrix(self, h, q):
        return self.matrix(self.d_plus, (h, q), (h - 1, q + 1))

    def h_plus(self, h, q):
        """H(K_p(D_J), d_+) at (h, q), exact over Z."""
        return homology_at(self.d_plus_matrix(h + 1, q - 1), self.d_plus_matrix(h, q), check=False)

    # total complex: g = q - n*h is raised by n + 1 by both differentials
    def total_layout(self, g):
        n = self.P.degree - 1
        return [(h, g + n * h) for h in range(len(self.generators) + 1) if g + n * h >= 0]

    def total_matrix(self, g):
        src, tgt = self.total_layout(g), self.total_layout(g + self.P.degree)
        toff, off = {}, 0
        for hq in tgt:
            toff[hq] = off
            off += len(self.basis(*hq))
        cols = []
        for hq in src:
            for b in self.basis(*hq):
                col = {}
                for k, c in self.d_total({b: 1}).items():
                    hk = (len(k[0]), sum(map(self.gen_degree, k[0])) + 2 * sum(k[1]))
                    i = toff[hk] + self.index(*hk)[k]
                    col[i] = col.get(i, 0) + c
                cols.append(col)
        return IntMatrix.from_columns(off, cols)

    def total_group(self, g):
        """H(K_p(D_J), d_+ + d_-) in total degree g, exact over Z."""
        return homology_at(self.total_matrix(g - self.P.degree), self.total_matrix(g), check=False)


def kr_vertex(diagram, P=None):
    return KRVertexComplex(diagram, P)


def kappa(K, P=None):
    """kappa_J = sum_m pi^m gamma_m + sum_c u1^c upsilon_c + u2^c xi_c."""
    P = P or K.P
    if P is None:
        raise ValueError("kappa needs a potential")
    n = K.nvars
    out = {}
    for g in K.generators:
        if g[0] == "g":
            a, b = K.mark_vars(g[1], g[2])
            coeff = _subst(P.pi, (K.X(b), K.X(a)), n)
        else:
            X1, X2, X3, X4 = (K.X(v) for v in K.crossing_vars(g[1]))
            coeff = _subst(P.u1 if g[0] == "u" else P.u2, (X3, X4, X1, X2), n)
        for m, c in coeff.items():
            out[((g,), m)] = out.get(((g,), m), 0) + c
    return {k: v for k, v in out.items() if v}


# ------------------------------------------------------------------ edge maps

class KREdgeMap:
    """A-module map between the vertex complexes of a cube edge, running in
    the direction of d_v (from edge.target to edge.source)."""

    def __init__(self, edge, P, include_correction=True):
        word = edge.source.parent
        self.edge = edge
        self.P = P
        self.src = KRVertexComplex(resolution_diagram(word, edge.target.mask), P)
        self.tgt = KRVertexComplex(resolution_diagram(word, edge.source.mask), P)
        j = edge.position + 1
        a = abs(word.letters[edge.position])
        self.layer = j
        self.kind = edge.kind
        K = self.src if edge.kind == "positive" else self.tgt
        n = K.nvars
        X1, X2, X3, X4 = (K.X(v) for v in K.crossing_vars(j))
        corr = _subst(P.correction, (X1, X2, X3, X4), n) if include_correction else {}
        m1, m2 = ("g", j, a), ("g", j, a + 1)
        u, x = ("u", j), ("x", j)
        one = {(0,) * n: 1}
        P_ = lambda p, E=(): {(E, m): c for m, c in p.items()}
        if edge.kind == "positive":
            self.local = (u, x)
            self.images = {
                (): _padd(P_(one), P_(corr, (m1, m2))),
                (u,): _padd(P_(one, (m1,)), P_(one, (m2,))),
                (x,): _padd(P_(X4, (m1,)), P_(X1, (m2,))),
                (u, x): P_(_padd(X1, X4, -1), (m1, m2)),
            }
        else:
            self.local = (m1, m2)
            self.images = {
                (): _padd(P_(_padd(X1, X4, -1)), P_(corr, (u, x)), -1),
                (m1,): _padd(P_(X1, (u,)), P_(one, (x,)), -1),
                (m2,): _padd(P_(one, (x,)), P_(X4, (u,)), -1),
                (m1, m2): P_(one, (u, x)),
            }

    def apply(self, z):
        out = {}
        loc = set(self.local)
        for (E, m), c in z.items():
            A = tuple(g for g in E if g not in loc)
            L = tuple(g for g in E if g in loc)
            s0, _ = _wedge_sorted(A, L)
            # E = s0 * (A ^ L) as sorted tuples
            img = self.images[L]
            part = self.tgt.multiply({(A, m): s0 * c}, img)
            out = _padd(out, part)
        return out


def edge_map(edge, P, include_correction=True):
    return KREdgeMap(edge, P, include_correction)


# ------------------------------------------------------------------ reduction

class Reduction:
    """Quotient K_p(D_J) -> CH(B_J): arcs to their X-form images, closing
    gammas to xhat_i, every other exterior generator to zero."""

    def __init__(self, K, B):
        self.K = K
        self.B = B
        self._img = {v: B.arc_image_terms(*v) for v in K.vars}
        self._mon = {}

    def _monomial(self, m):
        hit = self._mon.get(m)
        if hit is None:
            B = self.B
            hit = {(0, (0,) * B.r): 1}
            for v, e in zip(self.K.vars, m):
                for _ in range(e):
                    hit = B.mul_terms(hit, self._img[v])
            self._mon[m] = hit
        return hit

    def apply(self, z):
        out = {}
        for (E, m), c in z.items():
            if any(g[0] != "g" or g[1] != 0 for g in E):
                continue
            # closing gammas are sorted by strand, matching ascending xhat order
            mask = sum(1 << (g[2] - 1) for g in E)
            for key, v in self._monomial(m).items():
                k = (mask, key)
                w = out.get(k, 0) + c * v
                if w:
                    out[k] = w
                else:
                    out.pop(k, None)
        return out


def reduce_to_CH(K, B):
    return Reduction(K, B)
