"""Elements and arithmetic of free products with amalgamation G = *_C G_i.

Factor groups are either free (membership and expression in the edge
subgroup delegated to Stallings automata) or free-abelian (exact integer
lattice arithmetic; supported with a rank-one edge, which is what the
Baumslag-Solitar style examples need).  Elements are kept in alternating
normal form: an edge-word head c followed by components g_1..g_n from
alternating factors, none lying in the edge subgroup.  Equality is decided
by normalizing x * y^-1, never via canonical coset representatives.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InternalInvariantError, NotMemberError, PreconditionError
from .stallings import SubgroupAutomaton
from .word import Generator, Word, gen, parse_word

EDGE_TAG = "C"


class FreeFactor:
    """A free factor group together with its edge-subgroup data."""

    kind = "free"

    def __init__(self, name: str, alphabet: Sequence[Generator]):
        self.name = name
        self.alphabet = tuple(alphabet)
        self.edge_images: tuple = ()
        self._aut: Optional[SubgroupAutomaton] = None

    def _attach_edge(self, images: Sequence[Word], edge_rank: int):
        self.edge_images = tuple(images)
        if edge_rank:
            self._aut = SubgroupAutomaton(self.edge_images)
            if self._aut.rank != edge_rank:
                raise PreconditionError(
                    f"edge images in factor {self.name} do not freely generate: "
                    f"rank {self._aut.rank} != {edge_rank}"
                )

    # group operations on elements (plain reduced words)
    def canonical(self, x: Word) -> Word:
        return x

    def mul(self, x: Word, y: Word) -> Word:
        return x * y

    def inv(self, x: Word) -> Word:
        return x.inverse()

    def is_identity(self, x: Word) -> bool:
        return x.is_identity

    # edge subgroup
    def in_edge(self, x: Word) -> bool:
        if x.is_identity:
            return True
        if self._aut is None:
            return False
        return self._aut.contains(x)

    def to_edge(self, x: Word) -> Optional[Word]:
        """Expression of x over the edge alphabet, or None when x is outside."""
        if x.is_identity:
            return Word()
        if self._aut is None or not self._aut.contains(x):
            return None
        expr = self._aut.express(x)
        return Word([(self._edge_gen(g.index - 1), e) for g, e in expr.syls])

    def from_edge(self, ew: Word) -> Word:
        out = Word()
        for g, e in ew.syls:
            out = out * (self.edge_images[self._edge_pos(g)] ** e)
        return out

    def ball(self, max_letters: int):
        """All nontrivial reduced words with letter length <= max_letters."""
        out = []
        letters = [(g, s) for g in self.alphabet for s in (1, -1)]
        frontier = [Word()]
        for _ in range(max_letters):
            nxt = []
            for w in frontier:
                for g, s in letters:
                    w2 = w * Word([(g, s)])
                    if w2.letter_len == w.letter_len + 1:
                        nxt.append(w2)
            out.extend(nxt)
            frontier = nxt
        return out

    def parse(self, text: str) -> Word:
        return parse_word(text, self.alphabet)

    # wiring set by the Amalgam
    def _edge_gen(self, pos: int) -> Generator:
        return self._edge_alphabet[pos]

    def _edge_pos(self, g: Generator) -> int:
        return self._edge_positions[g]


class AbelianFactor:
    """A finitely generated free-abelian factor; elements are sorted words."""

    kind = "free-abelian"

    def __init__(self, name: str, alphabet: Sequence[Generator]):
        self.name = name
        self.alphabet = tuple(sorted(alphabet, key=lambda g: g.sort_key()))
        self.edge_images: tuple = ()

    def _attach_edge(self, images: Sequence[Word], edge_rank: int):
        if edge_rank > 1:
            raise PreconditionError(
                "free-abelian factors support a rank-one edge subgroup only"
            )
        images = tuple(self.canonical(w) for w in images)
        if edge_rank == 1 and images[0].is_identity:
            raise PreconditionError("edge image in abelian factor must be nontrivial")
        self.edge_images = images

    def canonical(self, x: Word) -> Word:
        sums = {}
        for g, e in x.syls:
            sums[g] = sums.get(g, 0) + e
        return Word(sorted(
            ((g, e) for g, e in sums.items() if e),
            key=lambda p: p[0].sort_key(),
        ))

    def mul(self, x: Word, y: Word) -> Word:
        return self.canonical(Word(tuple(x.syls) + tuple(y.syls)))

    def inv(self, x: Word) -> Word:
        return self.canonical(x.inverse())

    def is_identity(self, x: Word) -> bool:
        return self.canonical(x).is_identity

    def _vec(self, x: Word) -> tuple:
        x = self.canonical(x)
        return tuple(x.exponent_sum(g) for g in self.alphabet)

    def in_edge(self, x: Word) -> bool:
        return self.to_edge(x) is not None

    def to_edge(self, x: Word) -> Optional[Word]:
        x = self.canonical(x)
        if x.is_identity:
            return Word()
        if not self.edge_images:
            return None
        v = self._vec(x)
        u = self._vec(self.edge_images[0])
        k = None
        for a, b in zip(v, u):
            if b == 0:
                if a != 0:
                    return None
            else:
                if a % b:
                    return None
                q = a // b
                if k is None:
                    k = q
                elif k != q:
                    return None
        if k is None:
            return None
        if tuple(b * k for b in u) != v:
            return None
        return Word([(self._edge_alphabet[0], k)])

    def from_edge(self, ew: Word) -> Word:
        out = Word()
        for g, e in ew.syls:
            if self._edge_positions[g] != 0:
                raise NotMemberError(f"unknown edge generator {g}")
            out = self.mul(out, self.canonical(self.edge_images[0] ** e))
        return out

    def ball(self, max_letters: int):
        rng = range(-max_letters, max_letters + 1)
        out = []
        for combo in itertools.product(rng, repeat=len(self.alphabet)):
            if 0 < sum(abs(c) for c in combo) <= max_letters:
                out.append(Word([(g, c) for g, c in zip(self.alphabet, combo) if c]))
        return out

    def parse(self, text: str) -> Word:
        return self.canonical(parse_word(text, self.alphabet))

    def _edge_gen(self, pos: int) -> Generator:
        return self._edge_alphabet[pos]

    def _edge_pos(self, g: Generator) -> int:
        return self._edge_positions[g]


@dataclass
class EdgeIdentification:
    """Edge alphabet plus, for each factor, the images of its generators."""

    alphabet: tuple
    images: tuple  # images[i][j]: Word in factor i for edge generator j


class Amalgam:
    """A free product of factor groups amalgamated over a common subgroup."""

    def __init__(self, factors: Sequence, edge: EdgeIdentification, name: str = "G"):
        self.name = name
        self.factors = tuple(factors)
        self.edge = edge
        if len(edge.images) != len(self.factors):
            raise PreconditionError("one edge image tuple per factor required")
        rank = len(edge.alphabet)
        positions = {g: i for i, g in enumerate(edge.alphabet)}
        for f, images in zip(self.factors, edge.images):
            if len(images) != rank:
                raise PreconditionError("edge image tuple has wrong arity")
            f._edge_alphabet = edge.alphabet
            f._edge_positions = positions
            f._attach_edge(images, rank)
        names = [f.name for f in self.factors]
        if len(set(names)) != len(names):
            raise PreconditionError("factor names must be distinct")
        self._by_name = {f.name: i for i, f in enumerate(self.factors)}

    # -- element construction ------------------------------------------------

    def identity(self) -> "AmalgamElement":
        return AmalgamElement(self, Word(), ())

    def element(self, raw) -> "AmalgamElement":
        return normalize(self, raw)

    def edge_element(self, ew: Word) -> "AmalgamElement":
        return normalize(self, [(EDGE_TAG, ew)])

    def factor_index(self, ref) -> int:
        if isinstance(ref, int):
            return ref
        return self._by_name[ref]

    # -- parsing / formatting -------------------------------------------------

    def parse_element(self, text: str) -> "AmalgamElement":
        raw = []
        for tag, body in re.findall(r"\[([^:\]]+):([^\]]*)\]", text):
            tag = tag.strip()
            if tag == EDGE_TAG and tag not in self._by_name:
                raw.append((EDGE_TAG, parse_word(body, self.edge.alphabet)))
            else:
                i = self.factor_index(tag)
                raw.append((i, self.factors[i].parse(body)))
        if not raw and text.strip() not in ("", "1"):
            raise PreconditionError(f"cannot parse element: {text!r}")
        return normalize(self, raw)

    def to_json(self) -> dict:
        return {
            "kind": "amalgam",
            "name": self.name,
            "factors": [
                {
                    "kind": f.kind,
                    "name": f.name,
                    "alphabet": [str(g) for g in f.alphabet],
                }
                for f in self.factors
            ],
            "edge": {
                "alphabet": [str(g) for g in self.edge.alphabet],
                "images": [
                    [str(w) for w in images] for images in self.edge.images
                ],
            },
        }

    @classmethod
    def from_json(cls, data) -> "Amalgam":
        if isinstance(data, str):
            data = json.loads(data)
        factors = []
        for fd in data["factors"]:
            alphabet = [_parse_gen(t) for t in fd["alphabet"]]
            klass = FreeFactor if fd["kind"] == "free" else AbelianFactor
            factors.append(klass(fd["name"], alphabet))
        edge_alpha = tuple(_parse_gen(t) for t in data["edge"]["alphabet"])
        images = tuple(
            tuple(parse_word(w, f.alphabet) for w in images)
            for f, images in zip(factors, data["edge"]["images"])
        )
        return cls(factors, EdgeIdentification(edge_alpha, images),
                   name=data.get("name", "G"))


def _parse_gen(token: str) -> Generator:
    w = parse_word(token)
    if w.syllable_len != 1 or w.syls[0][1] != 1:
        raise PreconditionError(f"not a generator token: {token!r}")
    return w.syls[0][0]


class AmalgamElement:
    """Alternating normal form: head edge word, then components (factor, word)."""

    __slots__ = ("amalgam", "head", "comps")

    def __init__(self, amalgam: Amalgam, head: Word, comps: tuple):
        self.amalgam = amalgam
        self.head = head
        self.comps = comps

    # -- structure -------------------------------------------------------------

    @property
    def length(self) -> int:
        return len(self.comps)

    @property
    def is_identity(self) -> bool:
        return not self.comps and self.head.is_identity

    @property
    def index_vector(self) -> tuple:
        return tuple(i for i, _ in self.comps)

    @property
    def lei(self) -> Optional[int]:
        return self.comps[0][0] if self.comps else None

    @property
    def rei(self) -> Optional[int]:
        return self.comps[-1][0] if self.comps else None

    def raw(self) -> list:
        out = []
        if not self.head.is_identity:
            out.append((EDGE_TAG, self.head))
        out.extend(self.comps)
        return out

    # -- group operations --------------------------------------------------------

    def __mul__(self, other: "AmalgamElement") -> "AmalgamElement":
        return normalize(self.amalgam, self.raw() + other.raw())

    def inverse(self) -> "AmalgamElement":
        raw = [(i, self.amalgam.factors[i].inv(x)) for i, x in reversed(self.comps)]
        if not self.head.is_identity:
            raw.append((EDGE_TAG, self.head.inverse()))
        return normalize(self.amalgam, raw)

    __invert__ = inverse

    def __pow__(self, n: int) -> "AmalgamElement":
        out = self.amalgam.identity()
        base = self if n > 0 else self.inverse()
        for _ in range(abs(n)):
            out = out * base
        return out

    def conj(self, h: "AmalgamElement") -> "AmalgamElement":
        return h.inverse() * self * h

    def equals(self, other: "AmalgamElement") -> bool:
        """Group-element equality, decided by normalizing self * other^-1."""
        return (self * other.inverse()).is_identity

    # -- structural identity (for dicts / dedup keys) ------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, AmalgamElement)
            and self.head == other.head
            and self.comps == other.comps
        )

    def __hash__(self):
        return hash((self.head, self.comps))

    def serialize(self) -> str:
        parts = []
        if not self.head.is_identity:
            parts.append(f"[{EDGE_TAG}: {self.head}]")
        for i, x in self.comps:
            parts.append(f"[{self.amalgam.factors[i].name}: {x}]")
        return "".join(parts) if parts else "1"

    __str__ = serialize
    __repr__ = serialize


# ---------------------------------------------------------------------------
# Normal form
# ---------------------------------------------------------------------------

def normalize(G: Amalgam, raw) -> AmalgamElement:
    """Alternating normal form of a raw (factor, element) sequence.

    Edge entries may be interleaved with the tag EDGE_TAG.  Two raw
    sequences representing the same group element normalize to forms that
    compare equal under AmalgamElement.equals (the head placement itself is
    not canonical).
    """
    head = Word()
    comps: list = []
    for entry in reversed(list(raw)):
        tag, x = entry
        if tag == EDGE_TAG:
            head = x * head
            continue
        fi = G.factor_index(tag)
        f = G.factors[fi]
        y = f.canonical(x)
        if not head.is_identity:
            y = f.mul(y, f.from_edge(head))
            head = Word()
        if f.is_identity(y):
            continue
        if comps and comps[0][0] == fi:
            z = f.mul(y, comps[0][1])
            e = f.to_edge(z)
            if e is not None:
                head = e
                comps.pop(0)
            else:
                comps[0] = (fi, z)
        else:
            e = f.to_edge(y)
            if e is not None:
                head = e
            else:
                comps.insert(0, (fi, y))
    return AmalgamElement(G, head, tuple(comps))


def length(g: AmalgamElement) -> int:
    """Component count of the alternating normal form."""
    return g.length


# ---------------------------------------------------------------------------
# Cancellation calculus
# ---------------------------------------------------------------------------

def cancellation_number(g: AmalgamElement, h: AmalgamElement) -> int:
    """The maximal k >= 0 with x_k..x_1 y_1..y_k in C.

    Computed incrementally from the normalized forms, consuming matched
    component pairs at the junction while their product stays in the edge
    subgroup.  Representative independent (h's head is absorbed into the
    running edge element; g's head cannot affect any proper suffix).
    """
    G = g.amalgam
    gs, hs = g.comps, h.comps
    cur = h.head
    k = 0
    m = min(len(gs), len(hs))
    while k < m:
        fi, x = gs[len(gs) - 1 - k]
        fj, y = hs[k]
        if fi != fj:
            break
        f = G.factors[fi]
        z = f.mul(f.mul(x, f.from_edge(cur)), y)
        e = f.to_edge(z)
        if e is None:
            break
        cur = e
        k += 1
    return k


def is_reduced(elems: Sequence[AmalgamElement]) -> bool:
    """Whether l(g_1...g_n) = l(g_1) + ... + l(g_n)."""
    elems = list(elems)
    if not elems:
        return True
    prod = elems[0]
    for x in elems[1:]:
        prod = prod * x
    return prod.length == sum(x.length for x in elems)


def end_preserving(elems: Sequence[AmalgamElement], side: str = "both") -> bool:
    """Whether the extremal nontrivial entry's end index survives the product."""
    elems = list(elems)
    nontrivial = [i for i, x in enumerate(elems) if x.length >= 1]
    if not nontrivial:
        raise PreconditionError("all entries have length 0")
    prod = elems[0]
    for x in elems[1:]:
        prod = prod * x
    if prod.length == 0:
        return False
    left_ok = prod.lei == elems[nontrivial[0]].lei
    right_ok = prod.rei == elems[nontrivial[-1]].rei
    if side == "left":
        return left_ok
    if side == "right":
        return right_ok
    if side == "both":
        return left_ok and right_ok
    raise PreconditionError(f"side must be left, right or both: {side!r}")


def factors(g: AmalgamElement, side: str = "left"):
    """All l(g)+1 reduced splittings g = g' g'' as (factor, cofactor) pairs.

    side selects which part is reported first: the left parts for
    side="left", the right parts for side="right".  One canonical
    representative per splitting position is returned; edge-subgroup
    translates of a factor behave identically in every membership test.
    """
    G = g.amalgam
    out = []
    n = g.length
    for j in range(n + 1):
        left = AmalgamElement(G, g.head, g.comps[:j])
        right = AmalgamElement(G, Word(), g.comps[j:])
        if side == "left":
            out.append((left, right))
        elif side == "right":
            out.append((right, left))
        else:
            raise PreconditionError(f"side must be left or right: {side!r}")
    return out


def left_factors(g: AmalgamElement):
    return [lf for lf, _ in factors(g, "left")]


def right_factors(g: AmalgamElement):
    return [rf for rf, _ in factors(g, "right")]


# ---------------------------------------------------------------------------
# Sandwich nontriviality (two-sided cancellation bound)
# ---------------------------------------------------------------------------

@dataclass
class SandwichDecomposition:
    """A product T = g_0 a_1 g_1 a_2 ... a_n g_n, n >= 1."""

    g: list
    alphas: list

    def __post_init__(self):
        if len(self.g) != len(self.alphas) + 1 or not self.alphas:
            raise PreconditionError("need n >= 1 alphas and n+1 g entries")

    def product(self) -> AmalgamElement:
        out = self.g[0]
        for a, gg in zip(self.alphas, self.g[1:]):
            out = out * a * gg
        return out


@dataclass
class SandwichResult:
    verified: bool
    violation_index: Optional[int] = None
    witness: Optional[tuple] = None
    product_trivial: bool = False

    def __bool__(self):
        return self.verified


def check_sandwich_nontrivial(d: SandwichDecomposition) -> SandwichResult:
    """Verify the two-sided cancellation condition and conclude T != 1.

    For each interior index i, the maximum of K(R a_i, g_i) over right
    factors R of g_{i-1} plus the maximum of K(g_i, a_{i+1} L) over left
    factors L of g_{i+1} must not exceed l(g_i) - 2 (exhaustive over the
    canonical factor enumerations).  When the condition holds the product is
    also normalized and confirmed nontrivial.
    """
    n = len(d.alphas)
    for i in range(1, n):
        gi = d.g[i]
        li, l_wit = 0, None
        for r in right_factors(d.g[i - 1]):
            k = cancellation_number(r * d.alphas[i - 1], gi)
            if k >= li:
                li, l_wit = k, r
        ri, r_wit = 0, None
        for lf in left_factors(d.g[i + 1]):
            k = cancellation_number(gi, d.alphas[i] * lf)
            if k >= ri:
                ri, r_wit = k, lf
        if li + ri > gi.length - 2:
            return SandwichResult(False, i, (l_wit, r_wit))
    t = d.product()
    if t.is_identity:
        if n >= 2:
            raise InternalInvariantError(
                "sandwich condition held for n >= 2 but the product is trivial"
            )
        return SandwichResult(False, 1, None, product_trivial=True)
    return SandwichResult(True)


# ---------------------------------------------------------------------------
# Common constructions
# ---------------------------------------------------------------------------

def free_product_of_free(alphabets: Sequence[Sequence[str]],
                         names: Optional[Sequence[str]] = None) -> Amalgam:
    """Free product of free groups (trivial edge subgroup)."""
    names = names or [chr(ord("A") + i) for i in range(len(alphabets))]
    factors = [
        FreeFactor(nm, [gen(a) for a in alpha])
        for nm, alpha in zip(names, alphabets)
    ]
    edge = EdgeIdentification((), tuple(() for _ in factors))
    return Amalgam(factors, edge)


def free_as_free_product(alphabet: Sequence[str]) -> Amalgam:
    """A free group seen as the free product of its cyclic generator subgroups."""
    return free_product_of_free([[a] for a in alphabet],
                                names=[a.upper() for a in alphabet])


def element_from_free_word(G: Amalgam, w: Word) -> AmalgamElement:
    """Interpret a free-group word in a free product of cyclics."""
    by_gen = {}
    for i, f in enumerate(G.factors):
        for a in f.alphabet:
            by_gen[a] = i
    raw = [(by_gen[g], Word([(g, e)])) for g, e in w.syls]
    return normalize(G, raw)


def free_word_from_element(g: AmalgamElement) -> Word:
    out = g.head
    if not out.is_identity:
        raise PreconditionError("nontrivial head has no free-word image")
    out = Word()
    for _, x in g.comps:
        out = out * x
    return out
