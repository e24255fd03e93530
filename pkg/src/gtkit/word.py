"""Exact reduced-word algebra in free groups.

Words are stored run-length, as tuples of (generator, exponent) syllables
with adjacent generators distinct and exponents nonzero.  All operations are
pure; Word and Generator values are immutable and hashable.  Syllable length
(the number of syllables) and letter length (the number of letters) are kept
distinct throughout: ``l(w)`` in the alternating-product sense is
``w.syllable_len``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Iterator, NamedTuple, Optional

from .errors import NotMemberError, UnknownGeneratorError


@dataclass(frozen=True)
class Generator:
    """A named generator, optionally carrying an integer index (a[i] families)."""

    name: str
    index: Optional[int] = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("generator name must be nonempty")

    def sort_key(self):
        return (self.name, self.index is not None, self.index or 0)

    def __str__(self):
        if self.index is None:
            return self.name
        return f"{self.name}[{self.index}]"

    __repr__ = __str__


_GEN_CACHE: dict[tuple[str, Optional[int]], Generator] = {}


def gen(name: str, index: Optional[int] = None) -> Generator:
    """Interned Generator constructor."""
    key = (name, index)
    g = _GEN_CACHE.get(key)
    if g is None:
        g = Generator(name, index)
        _GEN_CACHE[key] = g
    return g


class Syllable(NamedTuple):
    generator: Generator
    exponent: int


def _normalize_syllables(pairs) -> tuple:
    out = []
    for g, e in pairs:
        e = int(e)
        if e == 0:
            continue
        if out and out[-1][0] == g:
            s = out[-1][1] + e
            out.pop()
            if s:
                out.append((g, s))
        else:
            out.append((g, e))
    return tuple(out)


class Word:
    """A freely reduced word, represented by its syllable decomposition."""

    __slots__ = ("syls", "_hash")

    def __init__(self, syls: Iterable[tuple] = (), _normalized: bool = False):
        syls = tuple(syls) if _normalized else _normalize_syllables(syls)
        object.__setattr__(self, "syls", syls)
        object.__setattr__(self, "_hash", hash(syls))

    # -- basic structure ---------------------------------------------------

    @property
    def is_identity(self) -> bool:
        return not self.syls

    @property
    def syllable_len(self) -> int:
        return len(self.syls)

    @property
    def letter_len(self) -> int:
        return sum(abs(e) for _, e in self.syls)

    def letters(self) -> Iterator[tuple]:
        """Yield (generator, sign) letter by letter."""
        for g, e in self.syls:
            s = 1 if e > 0 else -1
            for _ in range(abs(e)):
                yield (g, s)

    def generators(self) -> set:
        return {g for g, _ in self.syls}

    def exponent_sum(self, g: Generator) -> int:
        return sum(e for h, e in self.syls if h == g)

    # -- 1-based syllable accessors (components of the alternating form) ---

    def component(self, i: int) -> Syllable:
        """The i-th component B_i, 1-based."""
        return Syllable(*self.syls[i - 1])

    def component_from_right(self, i: int) -> Syllable:
        """RB_i, the i-th component counted from the right end."""
        return Syllable(*self.syls[len(self.syls) - i])

    def left(self, i: int) -> "Word":
        """L_i: the first i syllables."""
        return Word(self.syls[:i], _normalized=True)

    def right(self, i: int) -> "Word":
        """R_i: the last i syllables."""
        return Word(self.syls[len(self.syls) - i:], _normalized=True)

    def segment(self, i: int, j: int) -> "Word":
        """B_[i,j]: syllables i..j inclusive, 1-based."""
        return Word(self.syls[i - 1:j], _normalized=True)

    # -- group operations --------------------------------------------------

    def __mul__(self, other: "Word") -> "Word":
        a, b = self.syls, other.syls
        if not a:
            return other
        if not b:
            return self
        stack = list(a)
        j = 0
        nb = len(b)
        while stack and j < nb:
            g1, e1 = stack[-1]
            g2, e2 = b[j]
            if g1 != g2:
                break
            s = e1 + e2
            stack.pop()
            j += 1
            if s:
                stack.append((g1, s))
                break
        return Word(tuple(stack) + b[j:], _normalized=True)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.syls)), _normalized=True)

    __invert__ = inverse

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word()
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    def conj(self, g: "Word") -> "Word":
        """The conjugate g^{-1} * self * g."""
        return g.inverse() * self * g

    # -- equality / display --------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Word) and self.syls == other.syls

    def __hash__(self):
        return self._hash

    def __str__(self):
        if not self.syls:
            return "1"
        parts = []
        for g, e in self.syls:
            parts.append(str(g) if e == 1 else f"{g}^{e}")
        return " ".join(parts)

    __repr__ = __str__

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.letter_len, tuple((g.sort_key(), e) for g, e in self.syls))


IDENTITY = Word()


def commutator(x: Word, y: Word) -> Word:
    """[x, y] = x y x^-1 y^-1."""
    return x * y * x.inverse() * y.inverse()


def cancellation_syllables(g: Word, h: Word) -> int:
    """Number of syllables that annihilate exactly at the junction of g*h.

    This is the cancellation number of the product when the free group is
    viewed as the free product of its cyclic generator subgroups.
    """
    gs, hs = g.syls, h.syls
    m = min(len(gs), len(hs))
    k = 0
    while k < m:
        g1, e1 = gs[len(gs) - 1 - k]
        g2, e2 = hs[k]
        if g1 == g2 and e1 + e2 == 0:
            k += 1
        else:
            break
    return k


# ---------------------------------------------------------------------------
# Construction, parsing, formatting
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"^([A-Za-z_][A-Za-z0-9_']*)(?:\[(-?\d+)\])?(?:\^(-?\d+))?$"
)


def parse_word(text: str, alphabet: Optional[Iterable[Generator]] = None) -> Word:
    """Parse whitespace-separated tokens ``g``, ``g^k``, ``g^-k``, ``g[i]^k``."""
    allowed = set(alphabet) if alphabet is not None else None
    pairs = []
    text = text.strip()
    if text in ("", "1"):
        return IDENTITY
    for tok in text.split():
        m = _TOKEN_RE.match(tok)
        if not m:
            raise UnknownGeneratorError(f"cannot parse token {tok!r}")
        name, idx, exp = m.groups()
        g = gen(name, int(idx) if idx is not None else None)
        if allowed is not None and g not in allowed:
            raise UnknownGeneratorError(f"generator {g} not in alphabet")
        pairs.append((g, int(exp) if exp is not None else 1))
    return Word(pairs)


def reduce(letters, alphabet: Optional[Iterable[Generator]] = None) -> Word:
    """Freely reduce a raw letter (or syllable) sequence into a Word.

    Accepts an iterable of (Generator, exponent) pairs or a text string in
    the parse_word format.  Idempotent on already reduced input.
    """
    if isinstance(letters, str):
        return parse_word(letters, alphabet)
    if isinstance(letters, Word):
        return letters
    allowed = set(alphabet) if alphabet is not None else None
    pairs = []
    for g, e in letters:
        if not isinstance(g, Generator):
            raise UnknownGeneratorError(f"not a generator: {g!r}")
        if allowed is not None and g not in allowed:
            raise UnknownGeneratorError(f"generator {g} not in alphabet")
        pairs.append((g, e))
    return Word(pairs)


# ---------------------------------------------------------------------------
# Syllable decompositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SyllableWord:
    """The alternating syllable decomposition of a reduced word."""

    syllables: tuple

    @property
    def length(self) -> int:
        return len(self.syllables)

    def __iter__(self):
        return iter(self.syllables)

    def __str__(self):
        return str(flatten(self))


def syllables(w: Word, alphabet: Optional[Iterable[Generator]] = None) -> SyllableWord:
    """Decompose w into maximal generator powers.

    When ``alphabet`` is given, a strict decomposition over exactly those
    generators is requested and any other generator is an error.
    """
    if alphabet is not None:
        allowed = set(alphabet)
        extra = w.generators() - allowed
        if extra:
            raise UnknownGeneratorError(
                f"word uses generators outside the declared alphabet: {sorted(map(str, extra))}"
            )
    return SyllableWord(tuple(Syllable(g, e) for g, e in w.syls))


def flatten(sw: SyllableWord) -> Word:
    """Inverse of syllables()."""
    return Word(tuple(sw.syllables))


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------

class HomSpec:
    """A homomorphism between free groups given by generator images."""

    def __init__(self, mapping: dict):
        self.mapping = dict(mapping)

    @classmethod
    def identity(cls, alphabet: Iterable[Generator]) -> "HomSpec":
        return cls({g: Word([(g, 1)]) for g in alphabet})

    def __contains__(self, g: Generator) -> bool:
        return g in self.mapping

    def image(self, g: Generator) -> Word:
        try:
            return self.mapping[g]
        except KeyError:
            raise UnknownGeneratorError(f"generator {g} outside hom domain") from None

    def apply(self, w: Word) -> Word:
        out = IDENTITY
        for g, e in w.syls:
            out = out * (self.image(g) ** e)
        return out

    def compose(self, inner: "HomSpec") -> "HomSpec":
        """self after inner, on inner's domain."""
        return HomSpec({g: self.apply(w) for g, w in inner.mapping.items()})


def apply_hom(h: HomSpec, w: Word) -> Word:
    """Image of w under h, freely reduced."""
    return h.apply(w)


def weight(w: Word, t: Generator, basis: Optional[HomSpec] = None) -> int:
    """Exponent sum of t after rewriting w over the given free basis.

    With no basis (or an identity basis) this is the plain exponent sum.
    Otherwise ``basis`` maps a basis alphabet to words of the ambient group;
    w must lie in the subgroup those images generate, and is rewritten over
    the basis before summing exponents of t.  A homomorphism to the integers
    in either case.
    """
    if basis is None:
        return w.exponent_sum(t)
    items = sorted(basis.mapping.items(), key=lambda kv: kv[0].sort_key())
    if all(_is_single_positive(g, img) for g, img in items):
        return w.exponent_sum(t)
    if t not in basis:
        raise UnknownGeneratorError(f"{t} is not a basis generator")
    from .stallings import SubgroupAutomaton

    basis_gens = [g for g, _ in items]
    aut = SubgroupAutomaton([img for _, img in items])
    try:
        expr = aut.express(w)
    except NotMemberError:
        raise NotMemberError(
            f"word is not expressible over the given basis: {w}"
        ) from None
    total = 0
    for wg, e in expr.syls:
        if basis_gens[wg.index - 1] == t:
            total += e
    return total


def _is_single_positive(g: Generator, img: Word) -> bool:
    return img.syls == ((g, 1),)


# ---------------------------------------------------------------------------
# Presentations and abelianization
# ---------------------------------------------------------------------------

@dataclass
class Presentation:
    """A finite presentation: generators plus relator words."""

    generators: list
    relators: list

    def to_json(self) -> dict:
        return {
            "generators": [str(g) for g in self.generators],
            "relators": [str(r) for r in self.relators],
        }

    @classmethod
    def from_json(cls, data) -> "Presentation":
        if isinstance(data, str):
            data = json.loads(data)
        gens = [parse_word(g).syls[0][0] for g in data["generators"]]
        rels = [parse_word(r, gens) for r in data["relators"]]
        return cls(gens, rels)


@dataclass(frozen=True)
class AbelianInvariants:
    """Smith-normal-form summary of an abelianized presentation."""

    free_rank: int
    torsion: tuple

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "1"


def smith_invariants(matrix: list) -> list:
    """Invariant factors of an integer matrix, exact arithmetic throughout.

    Returns the positive diagonal entries d_1 | d_2 | ... of the Smith
    normal form (zeros dropped).  Entries may be arbitrarily large Python
    ints; no magnitude cap.
    """
    a = [[int(x) for x in row] for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        pi, pj = piv
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            dirty = False
            for i in range(rows):
                if i != t and a[i][t]:
                    q = a[i][t] // a[t][t]
                    for j in range(cols):
                        a[i][j] -= q * a[t][j]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        dirty = True
            for j in range(cols):
                if j != t and a[t][j]:
                    q = a[t][j] // a[t][t]
                    for i in range(rows):
                        a[i][j] -= q * a[i][t]
                    if a[t][j]:
                        for i in range(rows):
                            a[i][t], a[i][j] = a[i][j], a[i][t]
                        dirty = True
            if not dirty:
                break
        diag.append(abs(a[t][t]))
        t += 1
    # enforce divisibility d_1 | d_2 | ...
    changed = True
    while changed:
        changed = False
        for i in range(len(diag) - 1):
            x, y = diag[i], diag[i + 1]
            if x and y % x:
                g = gcd(x, y)
                diag[i], diag[i + 1] = g, x * y // g
                changed = True
    return [d for d in diag if d]


def abelianize_snf(presentation: Presentation) -> AbelianInvariants:
    """Abelianization invariants from the relator exponent matrix."""
    gens = list(presentation.generators)
    matrix = [[r.exponent_sum(g) for g in gens] for r in presentation.relators]
    if not matrix:
        return AbelianInvariants(len(gens), ())
    diag = smith_invariants(matrix)
    free_rank = len(gens) - len(diag)
    torsion = tuple(d for d in diag if d > 1)
    return AbelianInvariants(free_rank, torsion)
