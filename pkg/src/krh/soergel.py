"""Soergel bimodules B_J in delta normal form.

B_J = Z[x_1..x_r][delta_t : t in J] / ((delta_t + [alpha_{i_t}]_t) delta_t), with

    [alpha_i]_t = x_i - x_{i+1} + 2 sum_{s<t, i_s = i} delta_s - sum_{s<t, |i_s - i| = 1} delta_s.

An element is a dict ``{(delta_mask, x_exponents): coefficient}``.  The
delta mask is indexed by positions of the parent braid word, so edge maps
between neighbouring vertices of the cube never renumber anything.
Degrees are counted in units of 2 (deg x_i = deg delta_t = 2).
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from .braid import BraidWord


class ContextMismatch(ValueError):
    pass


def monomials(nvars, degree):
    """Exponent tuples of total degree `degree`, in lexicographically decreasing order."""
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []
    for a in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - a):
            out.append((a,) + rest)
    return out


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _acc(out, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


class SoergelBimodule:
    """The algebra B_J attached to the selected letters of a braid word."""

    def __init__(self, word, mask=None):
        self.word = word
        self.mask = word.full if mask is None else mask
        self.r = word.strands
        self.positions = word.positions(self.mask)
        self.letter = {j: abs(word.letters[j]) for j in self.positions}
        self._zero = (0,) * self.r
        self._dmul_cache = {}
        self._dprod_cache = {}

    @classmethod
    def from_letters(cls, strands, letters):
        """B_J for a positive word given directly, e.g. B_(1,1) in Br(2)."""
        return cls(BraidWord(strands, tuple(letters)))

    def __eq__(self, other):
        return isinstance(other, SoergelBimodule) and (self.word, self.mask) == (other.word, other.mask)

    def __hash__(self):
        return hash((self.word, self.mask))

    def __repr__(self):
        return f"B{self.word.positive_letters(self.mask)} in Br({self.r})"

    @property
    def k(self):
        return len(self.positions)

    # ------------------------------------------------------------------ basics
    def x_exp(self, i, power=1):
        e = [0] * self.r
        e[i - 1] = power
        return tuple(e)

    def element(self, terms=None):
        return SoergelElement(self, terms or {})

    def one(self):
        return self.element({(0, self._zero): 1})

    def x(self, i):
        return self.element({(0, self.x_exp(i)): 1})

    def delta(self, t):
        """delta_t for the t-th selected letter (1-based)."""
        if not 1 <= t <= self.k:
            raise IndexError(f"delta index {t} out of range 1..{self.k}")
        return self.element({(1 << self.positions[t - 1], self._zero): 1})

    def delta_at(self, pos):
        if pos not in self.letter:
            raise IndexError(f"position {pos} not selected")
        return self.element({(1 << pos, self._zero): 1})

    def delta_hat(self, i):
        return self.element({(1 << p, self._zero): 1 for p in self.positions if self.letter[p] == i})

    def _alpha_terms(self, pos):
        i = self.letter[pos]
        out = {}
        _acc(out, (0, self.x_exp(i)), 1)
        if i + 1 <= self.r:
            _acc(out, (0, self.x_exp(i + 1)), -1)
        for s in self.positions:
            if s >= pos:
                break
            if self.letter[s] == i:
                _acc(out, (1 << s, self._zero), 2)
            elif abs(self.letter[s] - i) == 1:
                _acc(out, (1 << s, self._zero), -1)
        return out

    def alpha_at(self, pos):
        return self.element(self._alpha_terms(pos))

    def alpha_bracket(self, t):
        """[alpha_{i_t}]_t for the t-th selected letter (1-based)."""
        if not 1 <= t <= self.k:
            raise IndexError(f"alpha index {t} out of range 1..{self.k}")
        return self.alpha_at(self.positions[t - 1])

    # ---------------------------------------------------------- multiplication
    def _dmul(self, S, pos):
        """delta_S * delta_pos in normal form."""
        key = (S, pos)
        hit = self._dmul_cache.get(key)
        if hit is not None:
            return hit
        bit = 1 << pos
        if not S & bit:
            res = {(S | bit, self._zero): 1}
        else:
            # delta_S delta_t = -[alpha]_t delta_S, and each delta_s inside [alpha]_t
            # (s < t) contributes delta_S delta_s, reduced recursively
            res = {}
            for (m, e), c in self._alpha_terms(pos).items():
                if m == 0:
                    _acc(res, (S, e), -c)
                else:
                    s = m.bit_length() - 1
                    for (m2, e2), c2 in self._dmul(S, s).items():
                        _acc(res, (m2, e2), -c * c2)
        self._dmul_cache[key] = res
        return res

    def delta_product(self, S, T):
        key = (S, T) if S <= T else (T, S)
        hit = self._dprod_cache.get(key)
        if hit is not None:
            return hit
        acc = {(key[0], self._zero): 1}
        rest = key[1]
        while rest:
            low = rest & -rest
            pos = low.bit_length() - 1
            rest ^= low
            nxt = {}
            for (m, e), c in acc.items():
                for (m2, e2), c2 in self._dmul(m, pos).items():
                    _acc(nxt, (m2, _add_exp(e, e2)), c * c2)
            acc = nxt
        self._dprod_cache[key] = acc
        return acc

    def mul_terms(self, a, b):
        out = {}
        for (ma, ea), ca in a.items():
            for (mb, eb), cb in b.items():
                e = _add_exp(ea, eb)
                if ma & mb:
                    for (m, e2), c in self.delta_product(ma, mb).items():
                        _acc(out, (m, _add_exp(e, e2)), ca * cb * c)
                else:
                    _acc(out, (ma | mb, e), ca * cb)
        return out

    # ------------------------------------------------------------------ actions
    def y_terms(self, i):
        """Right action of y_i: x_i + delta_hat_i - delta_hat_{i-1}."""
        out = {(0, self.x_exp(i)): 1}
        for p in self.positions:
            if self.letter[p] == i:
                _acc(out, (1 << p, self._zero), 1)
            elif self.letter[p] == i - 1:
                _acc(out, (1 << p, self._zero), -1)
        return out

    def y(self, i):
        if not 1 <= i <= self.r:
            raise IndexError(f"strand {i} out of range")
        return self.element(self.y_terms(i))

    def x_minus_y_terms(self, i):
        """x_i - y_i = delta_hat_{i-1} - delta_hat_i."""
        out = {}
        for p in self.positions:
            if self.letter[p] == i:
                _acc(out, (1 << p, self._zero), -1)
            elif self.letter[p] == i - 1:
                _acc(out, (1 << p, self._zero), 1)
        return out

    def right_action(self, i, z):
        self._check(z)
        return self.y(i) * z

    def left_action(self, i, z):
        self._check(z)
        return self.x(i) * z

    def _check(self, z):
        if z.ctx != self:
            raise ContextMismatch(f"{z.ctx!r} vs {self!r}")

    # ------------------------------------------------------------------- bases
    def basis(self, d):
        """Z-basis of the degree-2d piece: (delta_mask, x_exponents) keys."""
        out = []
        for b in range(min(self.k, d) + 1):
            for sub in combinations(self.positions, b):
                m = sum(1 << p for p in sub)
                for e in monomials(self.r, d - b):
                    out.append((m, e))
        return out

    def rank_in_degree(self, d):
        return len(self.basis(d))

    # ------------------------------------------------------------------ X-form
    def arc_image_terms(self, j, l):
        """Normal form of the arc variable X_{j,l} (layer j, strand l)."""
        out = {(0, self.x_exp(l)): 1}
        for p in self.positions:
            if p + 1 > j:
                break
            if self.letter[p] == l:
                _acc(out, (1 << p, self._zero), 1)
            elif self.letter[p] == l - 1:
                _acc(out, (1 << p, self._zero), -1)
        return out

    def x_form_ring(self):
        from sympy.polys.rings import ring
        from sympy import ZZ
        n = self.word.n
        names = [f"X{j}_{l}" for j in range(n + 1) for l in range(1, self.r + 1)]
        R, *gens = ring(",".join(names), ZZ)
        table = {(j, l): gens[j * self.r + (l - 1)] for j in range(n + 1) for l in range(1, self.r + 1)}
        return R, table

    def x_form_map(self, z):
        """Image in Z[X_{j,l}]: x_i -> X_{0,i}, delta_t -> X_{j_t,i_t} - X_{j_t-1,i_t}."""
        self._check(z)
        R, X = self.x_form_ring()
        out = R.zero
        for (m, e), c in z.terms.items():
            term = R(c)
            for i, a in enumerate(e, start=1):
                if a:
                    term *= X[(0, i)] ** a
            for p in self.positions:
                if m >> p & 1:
                    j, i = p + 1, self.letter[p]
                    term *= X[(j, i)] - X[(j - 1, i)]
            out += term
        return out

    def x_form_relations(self):
        """Generators of the layered presentation's ideal of relations."""
        R, X = self.x_form_ring()
        rels = []
        for j in range(1, self.word.n + 1):
            p = j - 1
            if p in self.letter:
                a = self.letter[p]
                rels.append(X[(j, a)] + X[(j, a + 1)] - X[(j - 1, a)] - X[(j - 1, a + 1)])
                rels.append(X[(j, a)] * X[(j, a + 1)] - X[(j - 1, a)] * X[(j - 1, a + 1)])
                others = [l for l in range(1, self.r + 1) if l not in (a, a + 1)]
            else:
                others = range(1, self.r + 1)
            for l in others:
                rels.append(X[(j, l)] - X[(j - 1, l)])
        return rels

    def from_x_form(self, poly):
        """Normal form of a polynomial in the arc variables (inverse of x_form_map)."""
        n = self.word.n
        gens_img = [self.element(self.arc_image_terms(j, l)) for j in range(n + 1) for l in range(1, self.r + 1)]
        powers = {}
        out = self.element()
        for mon, c in poly.items():
            term = self.element({(0, self._zero): int(c)})
            for g, a in enumerate(mon):
                if a:
                    key = (g, a)
                    if key not in powers:
                        powers[key] = gens_img[g] ** a
                    term = term * powers[key]
            out = out + term
        return out

    # -------------------------------------------------------------- flag unit
    def flag_unit(self, z):
        """Image of a flag-algebra element under F -> B_J (S_{sigma_i} -> delta_hat_i)."""
        from .schubert import FlagElement, borel_representative
        if not isinstance(z, FlagElement):
            raise TypeError("flag_unit expects a FlagElement")
        if z.r != self.r:
            raise ContextMismatch("flag element lives on a different number of strands")
        out = self.element()
        for w, coeff in z.coeffs.items():
            img = self.evaluate_xy(borel_representative(self.r, w))
            out = out + img * self.evaluate_xy(coeff)
        return out

    def evaluate_xy(self, poly):
        """Evaluate a polynomial in x_1..x_r (and optionally y_1..y_r) inside B_J."""
        nvars = len(poly.ring.gens)
        r = self.r
        ypow = {}
        out = {}
        for mon, c in poly.items():
            ex = tuple(mon[:r])
            term = {(0, ex): int(c)}
            if nvars > r:
                for i, a in enumerate(mon[r:2 * r], start=1):
                    if a:
                        if (i, a) not in ypow:
                            ypow[(i, a)] = (self.y(i) ** a).terms
                        term = self.mul_terms(term, ypow[(i, a)])
            for k, v in term.items():
                _acc(out, k, v)
        return self.element(out)


class SoergelElement:
    """Immutable element of B_J in normal form."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms):
        self.ctx = ctx
        self.terms = {k: v for k, v in terms.items() if v}

    def _coerce(self, other):
        if isinstance(other, SoergelElement):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")
            return other.terms
        if isinstance(other, int):
            return {(0, self.ctx._zero): other} if other else {}
        return NotImplemented

    def __add__(self, other):
        t = self._coerce(other)
        if t is NotImplemented:
            return t
        out = dict(self.terms)
        for k, v in t.items():
            _acc(out, k, v)
        return SoergelElement(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return SoergelElement(self.ctx, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        t = self._coerce(other)
        if t is NotImplemented:
            return t
        return self + SoergelElement(self.ctx, {k: -v for k, v in t.items()})

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return SoergelElement(self.ctx, {k: other * v for k, v in self.terms.items()})
        t = self._coerce(other)
        if t is NotImplemented:
            return t
        return SoergelElement(self.ctx, self.ctx.mul_terms(self.terms, t))

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __pow__(self, n):
        out = self.ctx.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.element({(0, self.ctx._zero): other})
        return isinstance(other, SoergelElement) and self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def degrees(self):
        """Set of degrees (in units of 2) of the homogeneous components."""
        return {bin(m).count("1") + sum(e) for (m, e) in self.terms}

    @property
    def cohomological_degree(self):
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("inhomogeneous element")
        return 2 * ds.pop() if ds else 0

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        pos_index = {p: t for t, p in enumerate(self.ctx.positions, start=1)}
        for (m, e), c in sorted(self.terms.items(), key=lambda kv: (bin(kv[0][0]).count("1"), kv[0][0], kv[0][1])):
            xs = "".join(f"x{i}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e, start=1) if a)
            ds = "".join(f"d{pos_index[p]}" for p in self.ctx.positions if m >> p & 1)
            mono = xs + ds
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")
