"""Braid words, their cube of resolutions, and layered singular diagrams.

A subword is a bitmask over positions of the parent word (bit j set means
letter j is resolved singularly).  The cube is ordered so that I_plus (all
positive letters on, all negative letters off) is the maximum; cubical degree
is the edge distance from I_plus.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property


class ParseError(ValueError):
    pass


class RangeError(ValueError):
    pass


_TOKEN = re.compile(r"^[+-]?\d+$")


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple = ()

    def __post_init__(self):
        if self.strands < 1:
            raise RangeError("a braid needs at least one strand")
        object.__setattr__(self, "letters", tuple(int(l) for l in self.letters))
        for l in self.letters:
            if l == 0 or abs(l) >= self.strands:
                raise RangeError(f"generator {l} out of range for Br({self.strands})")

    def __len__(self):
        return len(self.letters)

    @property
    def n(self):
        return len(self.letters)

    @property
    def full(self):
        return (1 << self.n) - 1

    @property
    def i_plus(self):
        """Selector with every positive letter on and every negative letter off."""
        return sum(1 << j for j, l in enumerate(self.letters) if l > 0)

    @property
    def i_minus(self):
        return sum(1 << j for j, l in enumerate(self.letters) if l < 0)

    def positive_letters(self, mask):
        """Strand indices |l_j| of the letters selected by mask, in order."""
        return tuple(abs(self.letters[j]) for j in range(self.n) if mask >> j & 1)

    def positions(self, mask):
        return tuple(j for j in range(self.n) if mask >> j & 1)

    def text(self):
        return " ".join(str(l) for l in self.letters)

    def __str__(self):
        return f"({', '.join(map(str, self.letters))}) in Br({self.strands})"


def parse_braid(text, strands):
    """Parse "1 1 1", "[1,-2,1]" or "1,-2, 1" into a BraidWord."""
    body = text.strip()
    if body.startswith("[") or body.startswith("("):
        closing = "]" if body[0] == "[" else ")"
        if not body.endswith(closing):
            raise ParseError(f"unbalanced bracket in {text!r}")
        body = body[1:-1]
    tokens = [t for t in re.split(r"[\s,]+", body) if t]
    letters = []
    for t in tokens:
        if not _TOKEN.match(t):
            raise ParseError(f"malformed token {t!r}")
        letters.append(int(t))
    return BraidWord(strands, tuple(letters))


# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Subword:
    parent: BraidWord
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.parent.n:
            raise ValueError("selector does not match word length")

    @property
    def selector(self):
        return tuple(self.mask >> j & 1 for j in range(self.parent.n))

    @property
    def letters(self):
        return self.parent.positive_letters(self.mask)

    @property
    def negative_count(self):
        return sum(1 for j in self.parent.positions(self.mask) if self.parent.letters[j] < 0)

    @property
    def shift(self):
        """n_J: twice the number of negative letters resolved singularly."""
        return 2 * self.negative_count

    @property
    def cubical_degree(self):
        return bin(self.mask ^ self.parent.i_plus).count("1")

    def leq(self, other):
        for j, l in enumerate(self.parent.letters):
            a, b = self.mask >> j & 1, other.mask >> j & 1
            if (a - b) * (1 if l > 0 else -1) > 0:
                return False
        return True


@dataclass(frozen=True)
class CubeEdge:
    """Edge source <= target differing at `position`.

    The differential d_v runs from `target` (closer to I_plus) to `source`.
    """

    source: Subword
    target: Subword
    kind: str
    position: int
    sign_exponent: int

    @property
    def sign(self):
        return -1 if self.sign_exponent % 2 else 1


@dataclass(frozen=True)
class Cube:
    word: BraidWord

    @cached_property
    def vertices(self):
        return tuple(Subword(self.word, m) for m in range(1 << self.word.n))

    @cached_property
    def edges(self):
        out = []
        w = self.word
        for m in range(1 << w.n):
            for j, l in enumerate(w.letters):
                if m >> j & 1:
                    continue
                lo, hi = m, m | 1 << j
                if l > 0:
                    src, tgt, kind = lo, hi, "positive"
                else:
                    src, tgt, kind = hi, lo, "negative"
                e = bin(lo & ((1 << j) - 1)).count("1")
                out.append(CubeEdge(Subword(w, src), Subword(w, tgt), kind, j, e))
        out.sort(key=lambda e: (e.target.mask, e.position))
        return tuple(out)

    def shift(self, mask):
        return Subword(self.word, mask).shift

    def degree(self, mask):
        return Subword(self.word, mask).cubical_degree

    def by_degree(self):
        levels = {}
        for v in self.vertices:
            levels.setdefault(v.cubical_degree, []).append(v.mask)
        return {t: sorted(ms) for t, ms in sorted(levels.items())}

    def outgoing(self, mask):
        """Edges whose differential leaves the vertex `mask`."""
        return [e for e in self.edges if e.target.mask == mask]

    def squares(self):
        """All 2-faces as (top, (a, b), [(edge path 1), (edge path 2)])."""
        n = self.word.n
        emap = {(e.target.mask, e.source.mask): e for e in self.edges}
        faces = []
        for top in range(1 << n):
            for a in range(n):
                for b in range(a + 1, n):
                    out1 = [e for e in self.edges if e.target.mask == top and e.position == a]
                    out2 = [e for e in self.edges if e.target.mask == top and e.position == b]
                    if not out1 or not out2:
                        continue
                    e1, e2 = out1[0], out2[0]
                    bottom = top ^ (1 << a) ^ (1 << b)
                    f1 = emap.get((e1.source.mask, bottom))
                    f2 = emap.get((e2.source.mask, bottom))
                    if f1 is None or f2 is None:
                        continue
                    faces.append((top, (a, b), ((e1, f1), (e2, f2))))
        return faces


def cube(word):
    return Cube(word)


# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Layer:
    index: int
    crossing: int | None     # strand a when strands a, a+1 meet singularly
    marks: tuple             # strands carrying a mark


@dataclass(frozen=True)
class SingularDiagram:
    """Layered closed singular braid diagram D_J.

    Arc variable X[j, l] leaves layer j on strand l (0 <= j <= n); the closing
    arcs are X[n, l], so x_i = X[0, i] and y_i = X[n, i].  Layer 0 holds the r
    closing marks.
    """

    strands: int
    layers: tuple

    @property
    def n(self):
        return len(self.layers) - 1

    def arc_variables(self):
        return [(j, l) for j in range(self.n + 1) for l in range(1, self.strands + 1)]

    def x_var(self, i):
        return (0, i)

    def y_var(self, i):
        return (self.n, i)

    def incoming(self, j, l):
        """Arc entering layer j on strand l."""
        return (j - 1, l) if j > 0 else (self.n, l)

    def outgoing(self, j, l):
        return (j, l)

    @property
    def crossings(self):
        return [(L.index, L.crossing) for L in self.layers if L.crossing is not None]

    @property
    def marks(self):
        return [(L.index, l) for L in self.layers for l in L.marks]

    @property
    def closing_marks(self):
        return [(0, l) for l in range(1, self.strands + 1)]


def resolution_diagram(word, J):
    mask = J.mask if isinstance(J, Subword) else int(J)
    if mask >> word.n:
        raise ValueError("selector does not match word length")
    r = word.strands
    layers = [Layer(0, None, tuple(range(1, r + 1)))]
    for j, l in enumerate(word.letters):
        if mask >> j & 1:
            a = abs(l)
            layers.append(Layer(j + 1, a, tuple(s for s in range(1, r + 1) if s not in (a, a + 1))))
        else:
            layers.append(Layer(j + 1, None, tuple(range(1, r + 1))))
    return SingularDiagram(r, tuple(layers))
