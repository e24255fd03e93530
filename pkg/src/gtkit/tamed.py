"""Tamedness of conjugate tuples and the length bound for tamed products.

A conjugate tuple ((t_1, g_1), ..., (t_n, g_n)) in an amalgam represents the
product of conjugates t_1^{g_1} ... t_n^{g_n}; boundary entries t_0, t_{n+1},
g_0, g_{n+1} are the identity.  Tamedness (single-syllable reduced
conjugates, no adjacent collapse, no cancellable t_i) forces the product's
alternating length to grow linearly, which is what rules out products of
conjugates collapsing to the identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .amalgam import (
    Amalgam,
    AmalgamElement,
    is_reduced,
    left_factors,
    right_factors,
)
from .errors import NotTamedError, PreconditionError
from .word import Word


@dataclass
class ConjTuple:
    """Entries (t_i, g_i); the associated product is prod of t_i^{g_i}."""

    amalgam: Amalgam
    entries: list

    def __post_init__(self):
        if not self.entries:
            raise PreconditionError("conjugate tuple needs n >= 1 entries")

    @property
    def n(self) -> int:
        return len(self.entries)

    def t(self, i: int) -> AmalgamElement:
        """t_i with the boundary convention t_0 = t_{n+1} = 1."""
        if 1 <= i <= self.n:
            return self.entries[i - 1][0]
        return self.amalgam.identity()

    def g(self, i: int) -> AmalgamElement:
        if 1 <= i <= self.n:
            return self.entries[i - 1][1]
        return self.amalgam.identity()

    def conjugate(self, i: int) -> AmalgamElement:
        """C_i = t_i^{g_i}."""
        return self.t(i).conj(self.g(i))

    def product(self) -> AmalgamElement:
        out = self.amalgam.identity()
        for i in range(1, self.n + 1):
            out = out * self.conjugate(i)
        return out

    def to_json(self) -> dict:
        return {
            "entries": [
                {"t": t.serialize(), "g": g.serialize()} for t, g in self.entries
            ]
        }

    @classmethod
    def from_json(cls, G: Amalgam, data) -> "ConjTuple":
        if isinstance(data, str):
            data = json.loads(data)
        entries = [
            (G.parse_element(e["t"]), G.parse_element(e["g"]))
            for e in data["entries"]
        ]
        return cls(G, entries)


@dataclass
class Cancellability:
    kind: str  # "LHS" | "RHS" | "two-sided" | "none"
    witness: Optional[tuple] = None

    @property
    def cancellable(self) -> bool:
        return self.kind != "none"


def cancellability(v: ConjTuple, i: int) -> Cancellability:
    """Classify whether t_i is cancellable, with witnessing factors.

    Enumerates the canonical right factors R of g_{i-1} and left factors L
    of g_{i+1}^{-1} and tests the three membership conditions
    R g_i^{-1} t_i in C,  t_i g_i L in C,  R t_i^{g_i} L in C.
    """
    if not 1 <= i <= v.n:
        raise PreconditionError(f"index out of range: {i}")
    t_i, g_i = v.t(i), v.g(i)
    g_prev, g_next = v.g(i - 1), v.g(i + 1)
    rights = right_factors(g_prev)
    lefts = left_factors(g_next.inverse())
    gi_inv_ti = g_i.inverse() * t_i
    for r in rights:
        if (r * gi_inv_ti).length == 0:
            return Cancellability("LHS", (r, None))
    ti_gi = t_i * g_i
    for lf in lefts:
        if (ti_gi * lf).length == 0:
            return Cancellability("RHS", (None, lf))
    ci = t_i.conj(g_i)
    for r in rights:
        rci = r * ci
        for lf in lefts:
            if (rci * lf).length == 0:
                return Cancellability("two-sided", (r, lf))
    return Cancellability("none")


@dataclass
class TamedReport:
    tamed: bool
    violated_clause: Optional[int] = None
    detail: str = ""

    def __bool__(self):
        return self.tamed


def is_tamed(v: ConjTuple) -> TamedReport:
    """Check the three tamedness clauses, reporting the first failure.

    (1) every l(t_i) = 1 with g_i^{-1} t_i g_i reduced as a 3-term product;
    (2) l(g_i g_{i+1}^{-1}) = 0 implies l(t_i t_{i+1}) = 2;
    (3) no t_i is cancellable.
    """
    for i in range(1, v.n + 1):
        t_i, g_i = v.t(i), v.g(i)
        if t_i.length != 1:
            return TamedReport(False, 1, f"l(t_{i}) = {t_i.length} != 1")
        if not is_reduced([g_i.inverse(), t_i, g_i]):
            return TamedReport(False, 1, f"t_{i}^g_{i} is not reduced")
    for i in range(1, v.n):
        if (v.g(i) * v.g(i + 1).inverse()).length == 0:
            if (v.t(i) * v.t(i + 1)).length != 2:
                return TamedReport(
                    False, 2, f"g_{i} g_{i+1}^-1 in C but l(t_{i} t_{i+1}) != 2"
                )
    for i in range(1, v.n + 1):
        c = cancellability(v, i)
        if c.cancellable:
            return TamedReport(False, 3, f"t_{i} cancellable from {c.kind}")
    return TamedReport(True)


@dataclass
class DeltaFactorization:
    """Per index i: delta_i and the reduced triple assembling T_i."""

    deltas: list
    triples: list  # (T_{i-1} g_{i-1}^-1 d_i, d_i^-1 g_{i-1} g_i^-1 t_i, g_i)
    partials: list  # T_1 .. T_n


def _first_component(g: AmalgamElement) -> AmalgamElement:
    """The first component of the alternating form, head absorbed into it."""
    G = g.amalgam
    fi, x = g.comps[0]
    f = G.factors[fi]
    if not g.head.is_identity:
        x = f.mul(f.from_edge(g.head), x)
    return AmalgamElement(G, Word(), ((fi, x),))


def delta_factorize(v: ConjTuple) -> DeltaFactorization:
    """The iterative three-term reduced factorization of partial products.

    delta_i is the leading component e_{i,1} of g_{i-1} g_i^{-1} exactly when
    that product has positive length and l(t_{i-1} e_{i,1}) = 1, and is the
    identity otherwise.  Every returned triple is verified reduced and the
    triples telescope to the partial products of conjugates.
    """
    rep = is_tamed(v)
    if not rep:
        raise NotTamedError(f"tuple is not tamed: clause {rep.violated_clause}, {rep.detail}")
    G = v.amalgam
    deltas, triples, partials = [], [], []
    prev_T = G.identity()
    for i in range(1, v.n + 1):
        g_prev, g_i, t_i = v.g(i - 1), v.g(i), v.t(i)
        diff = g_prev * g_i.inverse()
        delta = G.identity()
        if diff.length >= 1:
            e1 = _first_component(diff)
            if (v.t(i - 1) * e1).length == 1:
                delta = e1
        a = prev_T * g_prev.inverse() * delta
        b = delta.inverse() * g_prev * g_i.inverse() * t_i
        triple = (a, b, g_i)
        if not is_reduced(list(triple)):
            raise NotTamedError(f"triple at index {i} failed to be reduced")
        T_i = a * b * g_i
        check = prev_T * t_i.conj(g_i)
        if not T_i.equals(check):
            raise NotTamedError(f"triple at index {i} does not telescope")
        deltas.append(delta)
        triples.append(triple)
        partials.append(T_i)
        prev_T = T_i
    return DeltaFactorization(deltas, triples, partials)


class TamedSampler:
    """Rejection sampler for conjugate tuples, tamed ones by default.

    Draws random g_i from alternating components, then t_i as a length-one
    component chosen so that t_i^{g_i} is reduced, and rejects until the
    remaining tamedness clauses hold.
    """

    def __init__(self, G: Amalgam, rng, max_g_len: int = 3, elt_letters: int = 3,
                 reject: bool = True, max_tries: int = 500):
        self.G = G
        self.rng = rng
        self.max_g_len = max_g_len
        self.reject = reject
        self.max_tries = max_tries
        self.balls = [
            sorted((x for x in f.ball(elt_letters) if not f.in_edge(x)),
                   key=lambda w: w.sort_key())
            for f in G.factors
        ]

    def _rand_elt(self, max_len: int) -> AmalgamElement:
        n = self.rng.randint(0, max_len)
        comps = []
        last = None
        for _ in range(n):
            fi = self.rng.choice(
                [i for i in range(len(self.G.factors)) if i != last]
            )
            ball = self.balls[fi]
            comps.append((fi, ball[self.rng.randrange(len(ball))]))
            last = fi
        return AmalgamElement(self.G, Word(), tuple(comps))

    def _rand_t(self, g: AmalgamElement) -> AmalgamElement:
        banned = g.lei
        fi = self.rng.choice(
            [i for i in range(len(self.G.factors)) if i != banned]
        )
        ball = self.balls[fi]
        return AmalgamElement(
            self.G, Word(), ((fi, ball[self.rng.randrange(len(ball))]),)
        )

    def raw_tuple(self, n: int) -> ConjTuple:
        entries = []
        for _ in range(n):
            g = self._rand_elt(self.max_g_len)
            entries.append((self._rand_t(g), g))
        return ConjTuple(self.G, entries)

    def sample(self, n: Optional[int] = None) -> ConjTuple:
        target = n or self.rng.randint(1, 3)
        for _ in range(self.max_tries):
            v = self.raw_tuple(target)
            if not self.reject or is_tamed(v):
                return v
        raise PreconditionError("tamed sampler exhausted its retry budget")


def tamed_length_bound(v: ConjTuple):
    """Exact evaluation of l(T_n) against l(g_1) + n + l(g_n).

    Returns (lhs, rhs, holds).  A False value contradicts the tamed-product
    length bound and is treated as a fatal invariant breach by callers.
    """
    rep = is_tamed(v)
    if not rep:
        raise NotTamedError(f"tuple is not tamed: clause {rep.violated_clause}, {rep.detail}")
    lhs = v.product().length
    rhs = v.g(1).length + v.n + v.g(v.n).length
    return lhs, rhs, lhs >= rhs
