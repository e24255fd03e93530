"""Truncated integer noncommutative power series for the Magnus embedding.

Words over an indexed generator family x_i map to units of Z<<X_i>> via
x_i -> 1 + X_i, truncated at a degree cap.  Leading terms (lowest nonzero
homogeneous part) exist for every nontrivial word at degree at most its
letter length, which makes adaptive truncation exact.  Two relation
families are supported for annihilation checks: zeroing a set of variables
and identifying variables along an index map; both are quotient maps, so
annihilation of words is decided exactly at the letter-length cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .errors import InternalInvariantError, PreconditionError
from .word import Generator, Word

Monomial = tuple  # tuple of variable indices, possibly empty


class TruncatedSeries:
    """Integer series sum of c_m * X_{i_1}..X_{i_k}, degrees <= cap."""

    __slots__ = ("cap", "coeffs")

    def __init__(self, cap: int, coeffs: Optional[dict] = None):
        if cap < 1:
            raise PreconditionError("cap must be >= 1")
        self.cap = cap
        self.coeffs = {}
        if coeffs:
            for m, c in coeffs.items():
                if c and len(m) <= cap:
                    self.coeffs[tuple(m)] = c

    @classmethod
    def one(cls, cap: int) -> "TruncatedSeries":
        return cls(cap, {(): 1})

    @classmethod
    def var(cls, i: int, cap: int) -> "TruncatedSeries":
        return cls(cap, {(i,): 1})

    def copy(self) -> "TruncatedSeries":
        s = TruncatedSeries(self.cap)
        s.coeffs = dict(self.coeffs)
        return s

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries)
            and self.cap == other.cap
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.cap, frozenset(self.coeffs.items())))

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        res = TruncatedSeries(min(self.cap, other.cap))
        res.coeffs = {m: c for m, c in out.items() if len(m) <= res.cap}
        return res

    def __neg__(self) -> "TruncatedSeries":
        res = TruncatedSeries(self.cap)
        res.coeffs = {m: -c for m, c in self.coeffs.items()}
        return res

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        cap = min(self.cap, other.cap)
        out: dict = {}
        by_deg: dict = {}
        for m, c in other.coeffs.items():
            by_deg.setdefault(len(m), []).append((m, c))
        for m1, c1 in self.coeffs.items():
            room = cap - len(m1)
            if room < 0:
                continue
            for d, items in by_deg.items():
                if d > room:
                    continue
                for m2, c2 in items:
                    m = m1 + m2
                    s = out.get(m, 0) + c1 * c2
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        res = TruncatedSeries(cap)
        res.coeffs = out
        return res

    def homogeneous_part(self, d: int) -> dict:
        return {m: c for m, c in self.coeffs.items() if len(m) == d}

    def min_positive_degree(self) -> Optional[int]:
        degs = [len(m) for m in self.coeffs if m]
        return min(degs) if degs else None

    def variables(self) -> set:
        out = set()
        for m in self.coeffs:
            out.update(m)
        return out

    def __str__(self):
        if not self.coeffs:
            return "0"
        items = sorted(self.coeffs.items(), key=lambda mc: (len(mc[0]), mc[0]))
        parts = []
        for m, c in items:
            mono = "".join(f"X_{i}" for i in m) or "1"
            parts.append(f"{c}*{mono}" if mono != "1" else str(c))
        return " + ".join(parts)

    __repr__ = __str__


def _syllable_series(i: int, k: int, cap: int) -> TruncatedSeries:
    """(1 + X_i)^k truncated, valid for negative k via the binomial series."""
    coeffs = {(): 1}
    for j in range(1, cap + 1):
        if k > 0 and j > k:
            break
        if k > 0:
            c = math.comb(k, j)
        else:
            c = (-1) ** j * math.comb(-k + j - 1, j)
        coeffs[(i,) * j] = c
    return TruncatedSeries(cap, coeffs)


def _variable_index(g: Generator) -> int:
    if g.index is None:
        raise PreconditionError(f"generator {g} carries no index for the embedding")
    return g.index


def mu(w: Word, d: int) -> TruncatedSeries:
    """Magnus image of w truncated at degree d: multiplicative on products.

    Words must be spelled over a single indexed generator family; the
    generator index is the variable index.
    """
    if len({g.name for g, _ in w.syls}) > 1:
        raise PreconditionError("the embedding needs one indexed family; "
                                "relabel mixed alphabets first")
    out = TruncatedSeries.one(d)
    for g, e in w.syls:
        out = out * _syllable_series(_variable_index(g), e, d)
    return out


def relabel_for_embedding(w: Word) -> Word:
    """Map an arbitrary finite alphabet onto one indexed family, canonically."""
    from .word import gen as _gen

    order = {g: i for i, g in
             enumerate(sorted({g for g, _ in w.syls}, key=lambda g: g.sort_key()))}
    return Word((_gen("x", order[g]), e) for g, e in w.syls)


@dataclass(frozen=True)
class LeadingTerm:
    """Lowest-degree nonzero homogeneous part of a Magnus image."""

    degree: int
    coeffs: dict

    def variables(self) -> set:
        out = set()
        for m in self.coeffs:
            out.update(m)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, LeadingTerm)
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.degree, frozenset(self.coeffs.items())))

    def __str__(self):
        s = TruncatedSeries(max(self.degree, 1))
        s.coeffs = dict(self.coeffs)
        return str(s)


def leading_term(w: Word, max_d: Optional[int] = None) -> Optional[LeadingTerm]:
    """Leading term of mu(w), or None for the trivial word.

    The truncation degree is raised geometrically; letter length is a
    sufficient cap because a nontrivial word of letter length L never lies
    in the (L+1)-st lower central term, so its leading degree is <= L.
    """
    if w.is_identity:
        return None
    limit = w.letter_len if max_d is None else min(max_d, w.letter_len)
    d = 1
    while True:
        s = mu(w, d)
        s.coeffs.pop((), None)
        md = s.min_positive_degree()
        if md is not None:
            return LeadingTerm(md, s.homogeneous_part(md))
        if d >= limit:
            break
        d = min(2 * d, limit)
    if max_d is not None and max_d < w.letter_len:
        return None
    raise InternalInvariantError(
        f"no leading term for nontrivial word at cap {limit}: {w}"
    )


def apply_sigma(s, sigma) -> "TruncatedSeries | LeadingTerm":
    """Monomial substitution X_{i_1}..X_{i_k} -> X_{s(i_1)}..X_{s(i_k)}."""
    f = sigma if callable(sigma) else (lambda i: sigma.get(i, i))
    if isinstance(s, LeadingTerm):
        out: dict = {}
        for m, c in s.coeffs.items():
            key = tuple(f(i) for i in m)
            v = out.get(key, 0) + c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return LeadingTerm(s.degree, out)
    res = TruncatedSeries(s.cap)
    for m, c in s.coeffs.items():
        key = tuple(f(i) for i in m)
        v = res.coeffs.get(key, 0) + c
        if v:
            res.coeffs[key] = v
        else:
            res.coeffs.pop(key, None)
    return res


# ---------------------------------------------------------------------------
# Relation families and annihilation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroVars:
    """Relations X_i = 0 for i in the index set."""

    indices: frozenset

    def __init__(self, indices):
        object.__setattr__(self, "indices", frozenset(indices))


@dataclass(frozen=True)
class Identify:
    """Relations X_i - X_{sigma(i)} = 0 along an index map."""

    sigma: tuple  # sorted (i, sigma(i)) pairs

    def __init__(self, sigma):
        if callable(sigma):
            raise PreconditionError("Identify needs an explicit finite index map")
        object.__setattr__(self, "sigma", tuple(sorted(sigma.items())))

    def as_dict(self) -> dict:
        return dict(self.sigma)


RelationSpec = Union[ZeroVars, Identify]


def _identify_classes(rel: Identify, indices: Iterable[int]) -> dict:
    """Union-find representative map induced by i ~ sigma(i)."""
    sigma = rel.as_dict()
    parent: dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in sigma.items():
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    return {i: find(i) for i in set(indices) | set(sigma) | set(sigma.values())}


def _project_series(s: TruncatedSeries, rel: RelationSpec) -> TruncatedSeries:
    if isinstance(rel, ZeroVars):
        res = TruncatedSeries(s.cap)
        res.coeffs = {
            m: c for m, c in s.coeffs.items() if not (set(m) & rel.indices)
        }
        return res
    if isinstance(rel, Identify):
        reps = _identify_classes(rel, s.variables())
        return apply_sigma(s, lambda i: reps.get(i, i))
    raise PreconditionError(f"unsupported relation family: {rel!r}")


def _quotient_word(w: Word, rel: RelationSpec) -> Word:
    """Image of w under the group map induced by the relation quotient.

    Zeroing X_i sends x_i to 1 (the letter is deleted); identifying
    variables relabels letters by class representatives.  The projected
    Magnus image of w is exactly the Magnus image of this quotient word.
    """
    if isinstance(rel, ZeroVars):
        return Word((g, e) for g, e in w.syls if g.index not in rel.indices)
    if isinstance(rel, Identify):
        reps = _identify_classes(rel, (g.index for g, _ in w.syls))
        from .word import gen as _gen

        return Word((_gen(g.name, reps.get(g.index, g.index)), e)
                    for g, e in w.syls)
    raise PreconditionError(f"unsupported relation family: {rel!r}")


def annihilates(rel: RelationSpec, target) -> bool:
    """Whether the relation family kills the target in the quotient ring.

    For a Word: the projection of its Magnus image equals the image of the
    quotient word, so annihilation holds iff that word freely reduces to
    the identity; this is exact at every degree.  The degree-capped series
    comparison is kept as a cross-check at low cost.  For a LeadingTerm
    (a homogeneous part) the projection is compared with 0 directly.
    """
    if isinstance(target, LeadingTerm):
        if isinstance(rel, ZeroVars):
            return all(set(m) & rel.indices for m in target.coeffs)
        reps = _identify_classes(rel, target.variables())
        projected = apply_sigma(target, lambda i: reps.get(i, i))
        return not projected.coeffs
    w: Word = target
    if w.is_identity:
        return True
    result = _quotient_word(w, rel).is_identity
    cap = min(3, max(1, w.letter_len))
    series_view = _project_series(mu(w, cap), rel) == TruncatedSeries.one(cap)
    if result and not series_view:
        raise InternalInvariantError("series projection disagrees with quotient word")
    return result


# ---------------------------------------------------------------------------
# Magnus (graded-lex) positivity and the basis-variables check
# ---------------------------------------------------------------------------

def magnus_positive(w: Word) -> bool:
    """Positivity in the graded-lexicographic Magnus bi-ordering.

    The sign of the coefficient of the graded-lex least monomial of the
    leading term.  Defines a positive cone: closed under products and
    conjugation, and partitions nontrivial elements with their inverses.
    Arbitrary alphabets are relabeled canonically first.
    """
    if w.is_identity:
        raise PreconditionError("the identity is neither positive nor negative")
    lt = leading_term(relabel_for_embedding(w))
    key = min(lt.coeffs)
    return lt.coeffs[key] > 0


def check_c_leading_vars(alpha: Word, v0: Word, v1: Word) -> bool:
    """For weight-zero members of <v0, v1>: X_0, X_1, X_2 all appear in L(alpha).

    alpha must lie in the subgroup generated by v0 and v1 with both basis
    weights zero (checked; PreconditionError otherwise).  A False return
    value contradicts the quotient-transfer argument and is reported by the
    property suites as a violation.
    """
    from .stallings import SubgroupAutomaton

    aut = SubgroupAutomaton([v0, v1])
    if alpha.is_identity or not aut.contains(alpha):
        raise PreconditionError("alpha must be a nontrivial member of <v0, v1>")
    expr = aut.express(alpha)
    w0 = expr.exponent_sum(expr_gen(1))
    w1 = expr.exponent_sum(expr_gen(2))
    if (w0, w1) != (0, 0):
        raise PreconditionError(f"basis weights must vanish, got ({w0}, {w1})")
    lt = leading_term(alpha)
    return {0, 1, 2} <= lt.variables()


def expr_gen(i: int) -> Generator:
    from .stallings import _witness_gen

    return _witness_gen(i - 1)
