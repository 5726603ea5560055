"""Equivariant Schubert calculus on the flag algebra F = H_T(U(r)/T).

Polynomial (Borel) description: F = Z[x] (x)_{Sym} Z[y].  The Schubert class
S_w is represented by the double Schubert polynomial in the y variables with
equivariant parameters x, normalized so that S_{sigma_k} = sum_{i<=k} (y_i - x_i).

Permutations are one-line tuples (w(1), ..., w(r)).  Localization at w
substitutes y_i -> x_{w(i)}.  The right divided difference Delta_i acts on y
with denominator (y_i - y_{i+1}); Newton interpolation recovers the Schubert
coefficients as Delta_w f(x, x) along lexicographically least reduced words.

Products of classes are labelled by reduced words: S[(a, b, c)] is S_w for
w = sigma_a sigma_b sigma_c, and any label with an index outside 1..r-1 is 0.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import permutations

from sympy import ZZ
from sympy.polys.rings import ring

MAX_STRANDS = 6


class NonSimpleClass(ValueError):
    pass


# --------------------------------------------------------------- permutations

def identity(r):
    return tuple(range(1, r + 1))


def length(w):
    return sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])


def compose(u, v):
    """(u v)(k) = u(v(k))."""
    return tuple(u[v[k] - 1] for k in range(len(v)))


def inverse(w):
    out = [0] * len(w)
    for i, wi in enumerate(w, start=1):
        out[wi - 1] = i
    return tuple(out)


def simple(r, i):
    w = list(range(1, r + 1))
    w[i - 1], w[i] = w[i], w[i - 1]
    return tuple(w)


def from_word(r, word):
    w = identity(r)
    for i in word:
        w = compose(w, simple(r, i))
    return w


def left_descents(w):
    """i with l(sigma_i w) < l(w): value i+1 sits left of value i."""
    pos = inverse(w)
    return [i for i in range(1, len(w)) if pos[i] < pos[i - 1]]


def reduced_word(w):
    """Lexicographically least reduced word."""
    word = []
    r = len(w)
    while True:
        ds = left_descents(w)
        if not ds:
            return tuple(word)
        i = ds[0]
        word.append(i)
        w = compose(simple(r, i), w)


def all_reduced_words(w):
    r = len(w)
    ds = left_descents(w)
    if not ds:
        return [()]
    out = []
    for i in ds:
        for rest in all_reduced_words(compose(simple(r, i), w)):
            out.append((i,) + rest)
    return out


@lru_cache(maxsize=None)
def weyl_group(r):
    """S_r sorted by (length, lex-least reduced word)."""
    return tuple(sorted(permutations(range(1, r + 1)), key=lambda w: (length(w), reduced_word(w))))


def longest(r):
    return tuple(range(r, 0, -1))


# --------------------------------------------------------------------- rings

@lru_cache(maxsize=None)
def flag_ring(r):
    if r > MAX_STRANDS:
        raise ValueError(f"flag algebra computations are guarded to r <= {MAX_STRANDS}")
    names = [f"x{i}" for i in range(1, r + 1)] + [f"y{i}" for i in range(1, r + 1)]
    R, *gens = ring(",".join(names), ZZ)
    return R, tuple(gens[:r]), tuple(gens[r:])


def _from_terms(R, terms):
    return R.from_dict({k: v for k, v in terms.items() if v}) if terms else R.zero


def divided_difference(i, f):
    """(f(x, y) - f(x, sigma_i y)) / (y_i - y_{i+1}), computed monomialwise."""
    R = f.ring
    r = len(R.gens) // 2
    a_idx, b_idx = r + i - 1, r + i
    out = {}
    for mon, c in f.items():
        a, b = mon[a_idx], mon[b_idx]
        if a == b:
            continue
        base = list(mon)
        if a > b:
            sign, lo, hi, p_hi, p_lo = 1, b, a, a_idx, b_idx
        else:
            sign, lo, hi, p_hi, p_lo = -1, a, b, b_idx, a_idx
        # (u^hi v^lo - u^lo v^hi)/(u - v) = (uv)^lo * sum_{k} u^{hi-lo-1-k} v^k
        for k in range(hi - lo):
            m = list(base)
            m[p_hi] = lo + (hi - lo - 1 - k)
            m[p_lo] = lo + k
            t = tuple(m)
            out[t] = out.get(t, 0) + sign * c
    return _from_terms(R, out)


def divided_difference_by_division(i, f):
    """Same operator via generic exact division (used as an independent check)."""
    R = f.ring
    r = len(R.gens) // 2
    swapped = swap_y(f, i)
    return (f - swapped).exquo(R.gens[r + i - 1] - R.gens[r + i])


def swap_y(f, i):
    R = f.ring
    r = len(R.gens) // 2
    a, b = r + i - 1, r + i
    out = {}
    for mon, c in f.items():
        m = list(mon)
        m[a], m[b] = m[b], m[a]
        out[tuple(m)] = c
    return R.from_dict(out) if out else R.zero


def diagonal(f):
    """f(x, x)."""
    R = f.ring
    r = len(R.gens) // 2
    out = {}
    for mon, c in f.items():
        m = tuple(mon[k] + mon[r + k] for k in range(r)) + (0,) * r
        out[m] = out.get(m, 0) + c
    return _from_terms(R, out)


def substitute_y(f, w):
    """f(x, y_i -> x_{w(i)})."""
    R = f.ring
    r = len(R.gens) // 2
    out = {}
    for mon, c in f.items():
        m = list(mon[:r]) + [0] * r
        for i in range(r):
            m[w[i] - 1] += mon[r + i]
        t = tuple(m)
        out[t] = out.get(t, 0) + c
    return _from_terms(R, out)


@lru_cache(maxsize=None)
def _borel_table(r):
    R, xs, ys = flag_ring(r)
    top = R.one
    for i in range(1, r + 1):
        for j in range(1, r + 1):
            if i + j <= r:
                top *= ys[i - 1] - xs[j - 1]
    table = {longest(r): top}
    frontier = [longest(r)]
    while frontier:
        nxt = []
        for w in frontier:
            for i in range(1, r):
                if w[i - 1] > w[i]:
                    v = compose(w, simple(r, i))
                    if v not in table:
                        table[v] = divided_difference(i, table[w])
                        nxt.append(v)
        frontier = nxt
    return table


def borel_representative(r, w):
    """Polynomial representative of S_w in Z[x, y]."""
    return _borel_table(r)[tuple(w)]


# ------------------------------------------------------------- flag elements

class FlagElement:
    """Element of F: {w: polynomial in x} in the Schubert basis."""

    __slots__ = ("r", "coeffs")

    def __init__(self, r, coeffs=None):
        self.r = r
        self.coeffs = {tuple(w): c for w, c in (coeffs or {}).items() if c}

    @classmethod
    def schubert(cls, r, w):
        R = flag_ring(r)[0]
        return cls(r, {tuple(w): R.one})

    @classmethod
    def from_word(cls, r, word):
        """S labelled by a reduced word; 0 if any index leaves 1..r-1 or the word is not reduced."""
        if any(not 1 <= i <= r - 1 for i in word):
            return cls(r)
        w = from_word(r, word)
        if length(w) != len(word):
            return cls(r)
        return cls.schubert(r, w)

    @classmethod
    def simple(cls, r, k):
        """S_{sigma_k}, zero outside 1..r-1."""
        return cls.from_word(r, (k,))

    @classmethod
    def scalar(cls, r, poly):
        return cls(r, {identity(r): poly})

    @classmethod
    def x(cls, r, i):
        return cls.scalar(r, flag_ring(r)[1][i - 1])

    @classmethod
    def y(cls, r, i):
        return newton_interpolate(flag_ring(r)[2][i - 1], r)

    def ring(self):
        return flag_ring(self.r)[0]

    def to_polynomial(self):
        R = self.ring()
        out = R.zero
        for w, c in self.coeffs.items():
            out += c * borel_representative(self.r, w)
        return out

    def __add__(self, other):
        if isinstance(other, int):
            other = FlagElement.scalar(self.r, self.ring()(other))
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, self.ring().zero) + c
        return FlagElement(self.r, out)

    __radd__ = __add__

    def __neg__(self):
        return FlagElement(self.r, {w: -c for w, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return FlagElement(self.r, {w: other * c for w, c in self.coeffs.items()})
        if not isinstance(other, FlagElement):
            # polynomial in x
            return FlagElement(self.r, {w: other * c for w, c in self.coeffs.items()})
        return multiply_flag(self, other)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, n):
        out = FlagElement.scalar(self.r, self.ring().one)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, FlagElement) and self.r == other.r and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.r, frozenset((w, str(c)) for w, c in self.coeffs.items())))

    def is_zero(self):
        return not self.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for w in weyl_group(self.r):
            if w in self.coeffs:
                label = "S" + "".join(map(str, reduced_word(w))) if length(w) else "1"
                parts.append(f"({self.coeffs[w].as_expr()})*{label}")
        return " + ".join(parts)


def newton_interpolate(f, r=None, check_words=False):
    """Schubert coefficients Delta_w f(x, x) of a polynomial f(x, y)."""
    if r is None:
        r = len(f.ring.gens) // 2
    D = {identity(r): f}
    coeffs = {}
    for w in weyl_group(r):
        if w not in D:
            word = reduced_word(w)
            D[w] = divided_difference(word[0], D[compose(simple(r, word[0]), w)])
        c = diagonal(D[w])
        if c:
            coeffs[w] = c
        if check_words and length(w) >= 2:
            for i in left_descents(w):
                alt = divided_difference(i, D[compose(simple(r, i), w)])
                if alt != D[w]:
                    raise AssertionError(f"divided differences depend on the reduced word at {w}")
    return FlagElement(r, coeffs)


def multiply_flag(a, b):
    if a.r != b.r:
        raise ValueError("flag elements on different numbers of strands")
    return newton_interpolate(a.to_polynomial() * b.to_polynomial(), a.r)


# -------------------------------------------------------------- localization

def localize(z, r=None):
    """Localization tuple {w: polynomial in x} of a FlagElement or polynomial."""
    if isinstance(z, FlagElement):
        f, r = z.to_polynomial(), z.r
    else:
        f = z
        r = r or len(f.ring.gens) // 2
    return {w: substitute_y(f, w) for w in weyl_group(r)}


def reflections(r):
    """Transpositions (i, j), i < j, with root alpha = x_i - x_j."""
    return [(i, j) for i in range(1, r + 1) for j in range(i + 1, r + 1)]


def transposition(r, i, j):
    w = list(range(1, r + 1))
    w[i - 1], w[j - 1] = j, i
    return tuple(w)


def gkm_condition(tup, r):
    """h_v - h_{sigma_alpha v} divisible by alpha for every reflection."""
    R, xs, _ = flag_ring(r)
    for v in weyl_group(r):
        for (i, j) in reflections(r):
            u = compose(transposition(r, i, j), v)
            diff = tup[v] - tup[u]
            if diff:
                try:
                    diff.exquo(xs[i - 1] - xs[j - 1])
                except Exception:
                    return False
    return True


def schubert_conditions(w, r):
    """Check the four localization conditions characterizing S_w."""
    R, xs, _ = flag_ring(r)
    tup = localize(FlagElement.schubert(r, w))
    lw = length(w)
    # (1) homogeneous of degree l(w) in x
    for v, h in tup.items():
        for mon in h.monoms():
            if sum(mon) != lw:
                return False
    # (2) GKM
    if not gkm_condition(tup, r):
        return False
    # (3) vanishing on shorter or equal-length elements other than w
    for v, h in tup.items():
        if v != w and length(v) <= lw and h:
            return False
    # (4) h_w = prod (-alpha) over reflections lowering w
    expected = R.one
    for (i, j) in reflections(r):
        v = compose(transposition(r, i, j), w)
        if length(v) < lw:
            expected *= -(xs[i - 1] - xs[j - 1])
    return tup[w] == expected


# ------------------------------------------------------------ identities

def product_formulas(r):
    """The six product formulas, each as (name, lhs, rhs) FlagElements, for all k."""
    R, xs, _ = flag_ring(r)
    S = lambda *word: FlagElement.from_word(r, word)
    x = lambda i: xs[i - 1] if 1 <= i <= r else R.zero
    out = []
    for k in range(1, r):
        a_k = x(k) - x(k + 1)
        a_k1 = x(k + 1) - x(k + 2) if k + 2 <= r else None
        sk = S(k)
        out.append((f"S_{k} as sum of y-x", newton_interpolate(sum((flag_ring(r)[2][i - 1] - xs[i - 1] for i in range(1, k + 1)), R.zero), r), sk))
        out.append((f"S_{k}^2", sk * sk, S(k) * (-a_k) + S(k - 1, k) + S(k + 1, k)))
        if k + 1 <= r - 1:
            sk1 = S(k + 1)
            out.append((f"S_{k}S_{k+1}", sk * sk1, S(k + 1, k) + S(k, k + 1)))
            out.append((f"S_{k}^2S_{k+1}", sk * sk * sk1,
                        S(k, k + 1) * (-a_k) + S(k + 1, k) * (-(a_k + a_k1)) + S(k - 1, k, k + 1)
                        + S(k - 1, k + 1, k) + S(k + 2, k + 1, k) + S(k, k + 1, k)))
            out.append((f"S_{k}S_{k+1}^2", sk * sk1 * sk1,
                        S(k, k + 1) * (-(a_k + a_k1)) + S(k + 1, k) * (-a_k1) + S(k - 1, k, k + 1)
                        + S(k, k + 2, k + 1) + S(k + 2, k + 1, k) + S(k, k + 1, k)))
    return out


def summation_identities(r):
    """Both summation identities as (name, lhs, rhs) FlagElements."""
    R, xs, _ = flag_ring(r)
    S = lambda k: FlagElement.simple(r, k)
    x = lambda i: xs[i - 1]
    zero = FlagElement(r)
    lhs1 = sum((S(k) * (x(k + 1) - x(k)) for k in range(1, r)), zero)
    rhs1 = sum((S(k) * (S(k) - S(k + 1)) for k in range(1, r)), zero)
    lhs2 = sum((S(k) * (x(k + 1) ** 2 - x(k) ** 2) for k in range(1, r)), zero)
    rhs2 = sum((((S(k) - S(k + 1)) * x(k + 1) + S(k) * S(k + 1)) * (S(k) - S(k + 1)) for k in range(0, r)), zero)
    return [("linear", lhs1, rhs1), ("quadratic", lhs2, rhs2)]


def check_summation_identities(r):
    return all(l == rr for _, l, rr in summation_identities(r))


# ------------------------------------------------------ additive structure

def flag_basis(r, d):
    """Z-basis of F in degree 2d: keys (w, x_exponents)."""
    from .soergel import monomials
    out = []
    for w in weyl_group(r):
        lw = length(w)
        if lw <= d:
            for e in monomials(r, d - lw):
                out.append((w, e))
    return out


def element_to_terms(z):
    out = {}
    r = z.r
    for w, c in z.coeffs.items():
        for mon, a in c.items():
            out[(w, tuple(mon[:r]))] = int(a)
    return out


def terms_to_element(r, terms):
    R = flag_ring(r)[0]
    coeffs = {}
    for (w, e), c in terms.items():
        coeffs[w] = coeffs.get(w, R.zero) + R({tuple(e) + (0,) * r: c})
    return FlagElement(r, coeffs)


def localization_matrix(r, d):
    """Matrix of localization on the degree-2d piece of F."""
    from .exactalg import IntMatrix
    from .soergel import monomials
    basis = flag_basis(r, d)
    rows = {}
    mons = monomials(r, d)
    for v in weyl_group(r):
        for e in mons:
            rows[(v, e)] = len(rows)
    cols = []
    for (w, e) in basis:
        R = flag_ring(r)[0]
        z = FlagElement(r, {w: R({tuple(e) + (0,) * r: 1})})
        col = {}
        for v, h in localize(z).items():
            for mon, a in h.items():
                col[rows[(v, tuple(mon[:r]))]] = int(a)
        cols.append(col)
    return IntMatrix.from_columns(len(rows), cols)


def localization_injective(r, d):
    from .exactalg import rank
    m = localization_matrix(r, d)
    return rank(m) == m.cols


class FlagAlgebra:
    """Adapter exposing F to the Koszul model: d_H(xhat_i) = S_{i-1} - S_i."""

    def __init__(self, r):
        self.r = r
        self._mul = {}
        self._xy = {}

    def basis(self, d):
        return flag_basis(self.r, d) if d >= 0 else []

    def degree(self, key):
        w, e = key
        return length(w) + sum(e)

    def _schubert_times(self, w, z):
        k = (w, id(z))
        hit = self._mul.get(k)
        if hit is None:
            hit = element_to_terms(FlagElement.schubert(self.r, w) * z)
            self._mul[k] = hit
        return hit

    def x_minus_y(self, i):
        z = self._xy.get(i)
        if z is None:
            z = FlagElement.simple(self.r, i - 1) - FlagElement.simple(self.r, i)
            self._xy[i] = z
        return z

    def mul_xy(self, key, i):
        w, e = key
        prod = self._schubert_times(w, self.x_minus_y(i))
        return {(v, tuple(a + b for a, b in zip(e, e2))): c for (v, e2), c in prod.items()}

    def multiply(self, a, b):
        return element_to_terms(terms_to_element(self.r, a) * terms_to_element(self.r, b))


def hochschild_of_flag(r, q_max):
    from .hochschild import HHGroup, KoszulComplex
    cx = KoszulComplex(FlagAlgebra(r))
    hh = HHGroup(cx, q_max)
    for q in range(q_max + 1):
        for h in range(r + 1):
            hh.group(h, q)
    return hh


# ------------------------------------------------------------ self-test

def random_polynomial(r, max_degree, rng, terms=6, bound=5):
    R, xs, ys = flag_ring(r)
    gens = xs + ys
    f = R.zero
    for _ in range(terms):
        deg = rng.randint(0, max_degree)
        mon = R.one
        for _ in range(deg):
            mon *= rng.choice(gens)
        f += rng.randint(-bound, bound) * mon
    return f


def newton_round_trip(f, r):
    """Interpolation followed by the Borel representative localizes like f,
    and interpolating that representative gives the same element back."""
    z = newton_interpolate(f, r)
    p = z.to_polynomial()
    same_points = all(substitute_y(p, w) == substitute_y(f, w) for w in weyl_group(r))
    return same_points and newton_interpolate(p, r) == z


def selftest(r, max_degree=8, samples=50, seed=0):
    """[(name, passed)] for the product formulas, the summation identities,
    localization injectivity per degree and Newton round trips."""
    import random
    out = [(f"r={r} {name}", lhs == rhs) for name, lhs, rhs in product_formulas(r)]
    out += [(f"r={r} summation {name}", lhs == rhs) for name, lhs, rhs in summation_identities(r)]
    for d in range(max_degree // 2 + 1):
        out.append((f"r={r} localization injective in degree {2 * d}", localization_injective(r, d)))
    rng = random.Random(seed)
    ok = all(newton_round_trip(random_polynomial(r, 6, rng), r) for _ in range(samples))
    out.append((f"r={r} Newton round trip x{samples}", ok))
    return out
