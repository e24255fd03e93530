"""Folded subgroup automata for finitely generated subgroups of free groups.

A SubgroupAutomaton is the Stallings core graph of the subgroup generated by
a tuple of reduced words: a deterministic, involution-closed labeled graph
whose base-to-base loops spell exactly the subgroup's elements.  Besides
membership it supports rewriting members over the original generator tuple
(edges carry expression tags maintained through the folds, so a member's
expression is read off its accepting path) and deciding syllable-exact
prefix acceptance, i.e. membership of an alternating word p with l(p) = i
in the sets L_i(C) and R_i(C).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import InternalInvariantError, NotMemberError, PreconditionError
from .word import Generator, Word, SyllableWord, gen, flatten

WITNESS_NAME = "g"


@dataclass(frozen=True)
class MembershipWitness:
    """An expression over the subgroup's generator symbols g[1], g[2], ...

    Evaluating the expression through the generator images reproduces the
    queried word; this is checked before any witness is returned.
    """

    expression: Word

    def __str__(self):
        return str(self.expression)


def _witness_gen(i: int) -> Generator:
    return gen(WITNESS_NAME, i + 1)


class SubgroupAutomaton:
    """Folded labeled graph deciding membership in <generators>."""

    def __init__(self, generators: Iterable[Word]):
        self.generators = tuple(generators)
        if not self.generators:
            raise PreconditionError("subgroup needs at least one generator")
        self._build()

    # -- construction -------------------------------------------------------

    def _build(self):
        """Fold the bouquet of generator petals, carrying expression tags.

        Each edge record (a, b, g, tag) realizes a --g--> b and stores an
        immutable word over the witness symbols; each state carries a
        witness-word offset in a weighted union-find.  The invariant is
        that evaluating the effective tag phi(a) tag phi(b)^-1 of an edge
        gives P(class a) g P(class b)^-1 for a fixed realization P of the
        state classes with P = 1 at the base class.  A fold of two edges
        with equal source and label sets the dying class's offset to the
        discrepancy of their effective tags, which preserves the invariant
        without touching any edge.  Expressions of members are then read
        off by concatenating effective tags along the accepting path.
        """
        parent = [0]
        offset = [Word()]  # phi(x) = phi(parent[x]) * offset[x]; phi(root) = 1
        adj = [dict()]     # root state -> {(gen, sign): edge id}
        edges = {}         # eid -> (a, b, gen, tag); a --gen(+1)--> b
        dead = set()

        def find_phi(x):
            path = []
            while parent[x] != x:
                path.append(x)
                x = parent[x]
            root = x
            acc = Word()
            for y in reversed(path):
                acc = acc * offset[y]
                offset[y] = acc
                parent[y] = root
            return root, (offset[path[0]] if path else Word())

        def find(x):
            return find_phi(x)[0]

        def new_state():
            s = len(parent)
            parent.append(s)
            offset.append(Word())
            adj.append(dict())
            return s

        def effective(eid):
            a, b, g, tag = edges[eid]
            ra, pa = find_phi(a)
            rb, pb = find_phi(b)
            return ra, rb, pa * tag * pb.inverse()

        queue = []

        def insert(eid):
            if eid in dead:
                return
            a, b, g, _ = edges[eid]
            for raw, lab in ((a, (g, 1)), (b, (g, -1))):
                state = find(raw)
                cur = adj[state].get(lab)
                if cur is not None and cur in dead:
                    cur = None
                if cur is None:
                    adj[state][lab] = eid
                    continue
                if cur == eid:
                    continue
                # fold: one edge survives, the other dies; effective tags
                # are read from the shared source side
                keep, gone = cur, eid
                kt, ktag = _directed(keep, state, lab)
                dt, dtag = _directed(gone, state, lab)
                if kt != dt and find(0) == dt:
                    # the base class must survive so that its realization
                    # stays trivial; swap the roles
                    keep, gone = gone, keep
                    kt, dt = dt, kt
                    ktag, dtag = dtag, ktag
                    adj[state][lab] = keep
                dead.add(gone)
                if kt != dt:
                    delta = ktag.inverse() * dtag
                    parent[dt] = kt
                    offset[dt] = delta
                    moved, adj[dt] = adj[dt], {}
                    for _mlab, meid in moved.items():
                        if meid not in dead:
                            queue.append(meid)
                # the survivor may still owe a registration on its other
                # side (registration is idempotent), the dead edge stops
                queue.append(keep)
                return

        def _directed(eid, state, lab):
            ra, rb, tag = effective(eid)
            if lab[1] > 0:
                return rb, tag
            return ra, tag.inverse()

        next_eid = 0
        for i, w in enumerate(self.generators):
            cur = 0
            letters = list(w.letters())
            witness = Word([(_witness_gen(i), 1)])
            for k, (g, s) in enumerate(letters):
                last = k == len(letters) - 1
                nxt = 0 if last else new_state()
                tag = witness if last else Word()
                next_eid += 1
                if s > 0:
                    edges[next_eid] = (cur, nxt, g, tag)
                else:
                    edges[next_eid] = (nxt, cur, g, tag.inverse())
                queue.append(next_eid)
                while queue:
                    insert(queue.pop())
                cur = nxt  # raw id: tags are stated relative to raw states

        # Compact reachable representative states, base first.
        base = find(0)
        final_adj: dict = {}
        for eid, (a, b, g, tag) in edges.items():
            if eid in dead:
                continue
            ra, rb, eff = effective(eid)
            final_adj.setdefault(ra, {})[(g, 1)] = (rb, eff)
            final_adj.setdefault(rb, {})[(g, -1)] = (ra, eff.inverse())
        order = {base: 0}
        stack = [base]
        while stack:
            s = stack.pop()
            for lab in sorted(final_adj.get(s, {}), key=_lab_key):
                t = final_adj[s][lab][0]
                if t not in order:
                    order[t] = len(order)
                    stack.append(t)
        self.base = 0
        self.delta = [dict() for _ in range(len(order))]
        self._tags = [dict() for _ in range(len(order))]
        for s, i in order.items():
            for lab, (t, tag) in final_adj.get(s, {}).items():
                self.delta[i][lab] = order[t]
                self._tags[i][lab] = tag

    # -- basic queries -------------------------------------------------------

    @property
    def num_states(self) -> int:
        return len(self.delta)

    @property
    def num_edges(self) -> int:
        """Undirected edge count."""
        return sum(len(d) for d in self.delta) // 2

    @property
    def rank(self) -> int:
        """First Betti number: the rank of the subgroup."""
        return self.num_edges - self.num_states + 1

    def degree(self, state: int) -> int:
        return len(self.delta[state])

    def step(self, state: int, g: Generator, sign: int) -> Optional[int]:
        return self.delta[state].get((g, sign))

    def trace(self, w: Word, start: int = 0) -> Optional[int]:
        """Read w from a state; None if some transition is missing."""
        cur = start
        for g, e in w.syls:
            s = 1 if e > 0 else -1
            lab = (g, s)
            for _ in range(abs(e)):
                cur = self.delta[cur].get(lab)
                if cur is None:
                    return None
        return cur

    def contains(self, w: Word) -> bool:
        return self.trace(w) == self.base

    # -- canonical form (for isomorphism/confluence checks) ------------------

    def canonical_form(self):
        """BFS-renumbered transition table; equal iff automata are isomorphic."""
        order = {self.base: 0}
        queue = [self.base]
        i = 0
        while i < len(queue):
            s = queue[i]
            i += 1
            for lab in sorted(self.delta[s], key=_lab_key):
                t = self.delta[s][lab]
                if t not in order:
                    order[t] = len(order)
                    queue.append(t)
        table = []
        for s in queue:
            table.append(tuple(sorted(
                ((str(lab[0]), lab[1], order[t]) for lab, t in self.delta[s].items())
            )))
        return tuple(table)

    def to_json(self) -> dict:
        edges = []
        for s, d in enumerate(self.delta):
            for (g, sign), t in d.items():
                if sign > 0:
                    edges.append([s, str(g), t])
        return {"states": self.num_states, "base": self.base, "edges": sorted(edges)}

    # -- expression over the original generators -----------------------------

    def express(self, w: Word) -> Word:
        """A word over witness generators g[1]..g[k] evaluating to w.

        Raises NotMemberError when w is not in the subgroup.  The
        expression is the concatenation of the edge tags along the
        accepting path; it is re-evaluated through the generator images
        before being returned, so an internal bookkeeping error can only
        surface loudly, never as a wrong answer.
        """
        cur = self.base
        out = Word()
        for g, s in w.letters():
            lab = (g, s)
            nxt = self.delta[cur].get(lab)
            if nxt is None:
                raise NotMemberError(f"not a member: {w}")
            out = out * self._tags[cur][lab]
            cur = nxt
        if cur != self.base:
            raise NotMemberError(f"not a member: {w}")
        if self.evaluate(out) != w:
            raise InternalInvariantError("expression failed evaluation check")
        return out

    def evaluate(self, expr: Word) -> Word:
        """Evaluate a witness-alphabet word through the generator images."""
        out = Word()
        for g, e in expr.syls:
            if g.name != WITNESS_NAME or g.index is None or not (
                1 <= g.index <= len(self.generators)
            ):
                raise NotMemberError(f"not a witness symbol: {g}")
            out = out * (self.generators[g.index - 1] ** e)
        return out

    # -- syllable-exact prefix acceptance ------------------------------------

    def prefix_acceptable(self, p, i: int, side: str = "left") -> bool:
        """Whether some member c with l(c) >= i has L_i(c) = p (or R_i(c) = p).

        p must be alternating with l(p) = i >= 1.  A completion must either
        continue on the opposite generator of p's last syllable or stop at
        the base with the final syllable exponent consumed exactly; this is
        what syllable-exact prefix equality requires.
        """
        w = flatten(p) if isinstance(p, SyllableWord) else p
        if i < 1 or w.syllable_len != i:
            raise PreconditionError(f"prefix length mismatch: l(p)={w.syllable_len}, i={i}")
        if side == "right":
            w = w.inverse()
        elif side != "left":
            raise PreconditionError(f"side must be left or right: {side!r}")
        q = self.trace(w)
        if q is None:
            return False
        if q == self.base:
            return True
        last_gen = w.syls[-1][0]
        return any(g != last_gen for (g, _s) in self.delta[q])


def _lab_key(lab):
    g, sign = lab
    return (g.sort_key(), sign)


# -- module-level operation surface ----------------------------------------

def fold(generators: Iterable[Word]) -> SubgroupAutomaton:
    """Fold the bouquet of the given reduced words into a core automaton."""
    return SubgroupAutomaton(generators)


def contains(aut: SubgroupAutomaton, w: Word) -> bool:
    return aut.contains(w)


def express(aut: SubgroupAutomaton, w: Word) -> MembershipWitness:
    return MembershipWitness(aut.express(w))


def prefix_acceptable(aut: SubgroupAutomaton, p, i: int, side: str = "left") -> bool:
    return aut.prefix_acceptable(p, i, side)


def lambda_value(aut: SubgroupAutomaton, w: Word) -> int:
    """Largest i <= l(w) with L_i(w) syllable-exactly extendable in the subgroup."""
    val = 0
    for i in range(1, w.syllable_len + 1):
        if aut.prefix_acceptable(w.left(i), i, "left"):
            val = i
        else:
            break
    return val


def rho_value(aut: SubgroupAutomaton, w: Word) -> int:
    """Right-side analogue of lambda_value."""
    val = 0
    for i in range(1, w.syllable_len + 1):
        if aut.prefix_acceptable(w.right(i), i, "right"):
            val = i
        else:
            break
    return val


def automaton_to_json(aut: SubgroupAutomaton) -> str:
    return json.dumps(aut.to_json(), sort_keys=True)
