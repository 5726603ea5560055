"""Differential classes on the flag algebra and universal equivariant homology.

A class is stored as its components z_1..z_r in F, representing
sum_k z_k xhat_k in CH(F).  Closed forms exist for n <= 2; higher n are found
by solving the integral system {d_H z = 0, iota* z = sum x_k^n xhat_k} on the
finite-rank slice of Hochschild degree 1 and cohomological degree 2n+1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .exactalg import InconsistentSystem, IntMatrix, hermite_reduce, solve_integer
from .hochschild import KoszulComplex
from .schubert import (FlagAlgebra, FlagElement, element_to_terms, flag_ring, identity,
                       localize, newton_interpolate, terms_to_element)


class LiftNotFound(RuntimeError):
    pass


class BetaUnavailable(RuntimeError):
    pass


@dataclass(frozen=True)
class TruncatedCoeffs:
    """Z[b_1..b_k] truncated at b-degree B, with |b_i| = -2i."""

    k: int = 2
    B: int = 4

    def __post_init__(self):
        if self.k < 1 or self.B < 1:
            raise ValueError("need k >= 1 and B >= 1")

    def monomials(self, m):
        """Exponent tuples of b-degree m."""
        from .soergel import monomials
        return monomials(self.k, m)

    @staticmethod
    def weight(a):
        """sum i * a_i, so the cohomological degree of b^a is -2 * weight."""
        return sum((i + 1) * e for i, e in enumerate(a))


_flag_complexes = {}


def flag_complex(r):
    cx = _flag_complexes.get(r)
    if cx is None:
        cx = KoszulComplex(FlagAlgebra(r))
        _flag_complexes[r] = cx
    return cx


@dataclass
class BetaClass:
    n: int
    r: int
    components: tuple
    provenance: str = "closed-form"
    _pullbacks: dict = field(default_factory=dict, repr=False, compare=False)

    def representative(self):
        """Terms of sum_k z_k xhat_k in CH(F) keyed by (exterior mask, (w, exps))."""
        out = {}
        for k, z in enumerate(self.components, start=1):
            for key, c in element_to_terms(z).items():
                out[(1 << (k - 1), key)] = c
        return out

    def d_H(self):
        return flag_complex(self.r).d_apply(self.representative())

    def is_cycle(self):
        return not self.d_H()

    def localization_image(self):
        """Component k of iota* at the identity fixed point, as a polynomial in x."""
        e = identity(self.r)
        return tuple(localize(z)[e] for z in self.components)

    def expected_image(self):
        _, xs, _ = flag_ring(self.r)
        return tuple(x ** self.n for x in xs)

    def localization_ok(self):
        return self.localization_image() == self.expected_image()

    def pullback(self, B):
        """Image in CH(B_J): {(exterior mask, (delta mask, exps)): coeff}."""
        key = (B.word, B.mask)
        hit = self._pullbacks.get(key)
        if hit is None:
            hit = {}
            for k, z in enumerate(self.components, start=1):
                for t, c in B.flag_unit(z).terms.items():
                    hit[(1 << (k - 1), t)] = c
            self._pullbacks[key] = hit
        return hit

    @property
    def degree(self):
        return 2 * self.n + 1


def beta_closed_form(n, r):
    if n not in (0, 1, 2):
        raise ValueError("closed forms exist for n = 0, 1, 2")
    R, xs, _ = flag_ring(r)
    S = lambda k: FlagElement.simple(r, k)
    one = FlagElement.scalar(r, R.one)
    comps = []
    for k in range(1, r + 1):
        x = xs[k - 1]
        if n == 0:
            z = one
        elif n == 1:
            z = one * x - S(k - 1)
        else:
            z = one * (x ** 2) + (S(k) - S(k - 1)) * x - S(k) * S(k - 1)
        comps.append(z)
    return BetaClass(n, r, tuple(comps), "closed-form")


def _lift_system(n, r):
    cx = flag_complex(r)
    h, q = 1, 2 * n + 1
    basis = cx.basis(h, q)
    D = cx.d(h, q)
    e = identity(r)
    from .soergel import monomials
    rows = []
    target = {}
    mons = monomials(r, n)
    idx = cx.index(h, q)
    for k in range(1, r + 1):
        for mon in mons:
            row_id = len(rows)
            key = (1 << (k - 1), (e, mon))
            rows.append({idx[key]: 1} if key in idx else {})
            want = tuple(n if i == k - 1 else 0 for i in range(r))
            if mon == want:
                target[D.rows + row_id] = 1
    I = IntMatrix(len(rows), len(basis), {i: r_ for i, r_ in enumerate(rows) if r_})
    return cx, IntMatrix.vstack([D, I]), target


def beta_lift(n, r):
    """An integral d_H-cycle with localization sum_k x_k^n xhat_k, reduced
    modulo boundaries to a canonical Hermite representative."""
    cx, A, b = _lift_system(n, r)
    try:
        sol = solve_integer(A, b)
    except InconsistentSystem as exc:
        raise LiftNotFound(f"no integral lift for n={n}, r={r}") from exc
    h, q = 1, 2 * n + 1
    bd = cx.d(h + 1, q - 1)
    sol = hermite_reduce(sol, bd.columns(), cx.dim(h, q))
    terms = cx.from_vector(h, q, sol)
    comps = []
    for k in range(1, r + 1):
        part = {key: c for (E, key), c in terms.items() if E == 1 << (k - 1)}
        comps.append(terms_to_element(r, part))
    beta = BetaClass(n, r, tuple(comps), "lifted")
    if not beta.is_cycle() or not beta.localization_ok():
        raise LiftNotFound("lifted class failed verification")
    return beta


_beta_cache = {}


def beta(n, r):
    """beta_n on r strands: closed form for n <= 2, lifted otherwise."""
    key = (n, r)
    hit = _beta_cache.get(key)
    if hit is None:
        try:
            hit = beta_closed_form(n, r) if n <= 2 else beta_lift(n, r)
        except LiftNotFound as exc:
            raise BetaUnavailable(str(exc)) from exc
        _beta_cache[key] = hit
    return hit


def is_flag_boundary(terms, r, h, q):
    """Whether a CH(F) element of bidegree (h, q) is d_H of an integral chain."""
    cx = flag_complex(r)
    v = cx.to_vector(h, q, terms)
    if not v:
        return True
    try:
        solve_integer(cx.d(h + 1, q - 1), v)
    except InconsistentSystem:
        return False
    return True


def kappa_prime_flag(n, r):
    """sum_j pi(x_j, y_j) xhat_j in CH(F) for the potential X^{n+1}."""
    R, xs, ys = flag_ring(r)
    comps = []
    for j in range(r):
        pi = sum((xs[j] ** a * ys[j] ** (n - a) for a in range(n + 1)), R.zero)
        comps.append(newton_interpolate(pi, r))
    return BetaClass(n, r, tuple(comps), "potential")


def scaled_kappa_check(n, r):
    """(n+1) beta_n - kappa' is a d_H-boundary in CH(F)."""
    b = beta(n, r).representative()
    k = kappa_prime_flag(n, r).representative()
    diff = {key: (n + 1) * b.get(key, 0) - k.get(key, 0) for key in set(b) | set(k)}
    diff = {key: c for key, c in diff.items() if c}
    return is_flag_boundary(diff, r, 1, 2 * n + 1)


@dataclass
class BetaUniversal:
    coeffs: TruncatedCoeffs
    r: int
    classes: tuple          # beta_1 .. beta_k

    def component(self, i):
        return self.classes[i - 1]

    def localization_ok(self):
        return all(b.localization_ok() for b in self.classes)

    def is_cycle(self):
        return all(b.is_cycle() for b in self.classes)


def beta_universal(k, r, B=4):
    coeffs = TruncatedCoeffs(k, B)
    return BetaUniversal(coeffs, r, tuple(beta(i, r) for i in range(1, k + 1)))


def koszul_product(alg, u, v):
    """Product in CH(A) = A (x) Lambda of two term dicts."""
    from .hochschild import wedge
    out = {}
    for (E, a), c in u.items():
        for (F, b), d in v.items():
            sign, G = wedge(E, F)
            if not sign:
                continue
            for key, e in alg.multiply({a: 1}, {b: 1}).items():
                kk = (G, key)
                out[kk] = out.get(kk, 0) + sign * c * d * e
    return {k: v for k, v in out.items() if v}


# ----------------------------------------------------------- universal theory

def universal_homology(word, k=2, B=4, q_max=8, coeff="Z", jobs=1):
    from .cube import CubeEngine, _window
    _window(q_max)
    return CubeEngine(word, jobs=jobs).universal(k, B, q_max, coeff=coeff)


def specialize(word, k, B, n, q_max, jobs=1):
    """Set b_n -> 1 and the other b_i -> 0 on the chain level, then take homology.

    The specialized complex (HH (x) R, beta_u) (x)_R Z is (HH, beta_n)."""
    if not 1 <= n <= k:
        raise ValueError("specialized variable must be among b_1..b_k")
    from .cube import CubeEngine
    bu = beta_universal(k, word.strands, B)
    return CubeEngine(word, jobs=jobs).normalized(n, q_max, beta_class=bu.component(n))


@dataclass
class DegenerationReport:
    word: object
    parity_ok: bool
    offending: list
    slices_checked: int

    @property
    def ok(self):
        return self.parity_ok


def degeneration_check(word, k=2, B=4, q_max=8):
    """Parity of the universal homology of a single positive word (one vertex)."""
    from .cube import CubeEngine
    if any(l < 0 for l in word.letters):
        raise ValueError("degeneration check expects a positive word")
    eng = CubeEngine(word)
    slices = eng.vertex_universal(word.full, k, B, q_max)
    bad = [key for key, g in slices.items() if not g.is_zero() and (key[1] - word.strands) % 2]
    return DegenerationReport(word, not bad, bad, len(slices))
