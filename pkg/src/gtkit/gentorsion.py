"""Generalized-torsion certificates and bounded normal-subsemigroup searches.

Everything here is finite and bounded: NSS balls are truncations of the
(generally infinite) normal subsemigroup generated by a set, and searches
over conjugator tuples run in a fixed canonical order under a node cap.
A "none-found" outcome corroborates a freeness statement inside the stated
bounds; it never proves it.  Certificates, in contrast, are exact: each is
re-verified by normalization before being surfaced.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .amalgam import (
    AbelianFactor,
    Amalgam,
    AmalgamElement,
    EdgeIdentification,
    FreeFactor,
    normalize,
)
from .errors import InternalInvariantError, PreconditionError
from .stallings import SubgroupAutomaton
from .word import Generator, Word, gen, parse_word


@dataclass(frozen=True)
class SearchBounds:
    """Bounds for balls and searches.

    radius: conjugator size (components for amalgam balls, letters for
    free-group balls, factors for subgroup-product balls).
    max_n: maximal number of terms in a product (of conjugates, or of
    g h_i blocks).
    max_elt_letters: letter bound for single factor elements.
    node_cap: hard bound on examined candidates; exceeding it flags the
    result as capped/partial rather than aborting.
    """

    radius: int = 2
    max_n: int = 3
    max_elt_letters: int = 2
    node_cap: int = 10 ** 6
    seed: int = 0

    def __post_init__(self):
        if min(self.radius, self.max_n, self.max_elt_letters) < 0 or self.node_cap <= 0:
            raise PreconditionError("bounds must be positive")

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "max_n": self.max_n,
            "max_elt_letters": self.max_elt_letters,
            "node_cap": self.node_cap,
            "seed": self.seed,
        }


@dataclass
class GtCertificate:
    """A witness g^{h_1} ... g^{h_n} = 1 with g != 1."""

    base: AmalgamElement
    conjugators: list

    def __post_init__(self):
        if not self.conjugators:
            raise PreconditionError("certificate needs n >= 1 conjugators")

    def to_json(self) -> dict:
        return {
            "base": self.base.serialize(),
            "conjugators": [h.serialize() for h in self.conjugators],
        }

    @classmethod
    def from_json(cls, G: Amalgam, data) -> "GtCertificate":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            G.parse_element(data["base"]),
            [G.parse_element(t) for t in data["conjugators"]],
        )


def verify_gt_certificate(G: Amalgam, cert: GtCertificate) -> bool:
    """True iff the conjugate product normalizes to 1 and the base does not."""
    if cert.base.is_identity:
        return False
    prod = G.identity()
    for h in cert.conjugators:
        prod = prod * cert.base.conj(h)
    return prod.is_identity


@dataclass
class NclWitness:
    """target = product of conjugated signed relators, as a free identity."""

    target: Word
    terms: list  # (relator index, sign, conjugator Word)

    def to_json(self) -> dict:
        return {
            "target": str(self.target),
            "terms": [[i, s, str(c)] for i, s, c in self.terms],
        }

    @classmethod
    def from_json(cls, data) -> "NclWitness":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            parse_word(data["target"]),
            [(i, s, parse_word(c)) for i, s, c in data["terms"]],
        )


def verify_ncl_witness(relators: Sequence[Word], w: NclWitness) -> bool:
    """Free-reduction check that the conjugated relator product is the target."""
    prod = Word()
    for idx, sign, conj in w.terms:
        if not 0 <= idx < len(relators):
            raise PreconditionError(f"relator index out of range: {idx}")
        prod = prod * (relators[idx] ** sign).conj(conj)
    return prod == w.target


# ---------------------------------------------------------------------------
# Balls
# ---------------------------------------------------------------------------

def free_ball(alphabet: Sequence[Generator], max_letters: int,
              include_identity: bool = True) -> list:
    """Reduced words of letter length <= max_letters, in canonical order."""
    out = [Word()] if include_identity else []
    letters = [(g, s) for g in sorted(alphabet, key=lambda g: g.sort_key())
               for s in (1, -1)]
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


def amalgam_conjugator_ball(G: Amalgam, bounds: SearchBounds) -> list:
    """Identity, edge heads, and alternating products of <= radius components.

    Components are drawn from the factor balls (letter length bounded by
    max_elt_letters) minus the edge subgroup.  Deterministic order: by
    component count, then serialization.
    """
    factor_balls = []
    for f in G.factors:
        ball = [x for x in f.ball(bounds.max_elt_letters) if not f.in_edge(x)]
        ball.sort(key=lambda w: w.sort_key())
        factor_balls.append(ball)
    out = [G.identity()]
    if G.edge.alphabet:
        for ew in free_ball(G.edge.alphabet, bounds.max_elt_letters,
                            include_identity=False):
            out.append(AmalgamElement(G, ew, ()))
    level = [()]
    for _ in range(bounds.radius):
        nxt = []
        for comps in level:
            last = comps[-1][0] if comps else None
            for fi in range(len(G.factors)):
                if fi == last:
                    continue
                for x in factor_balls[fi]:
                    nxt.append(comps + ((fi, x),))
        out.extend(AmalgamElement(G, Word(), comps) for comps in nxt)
        level = nxt
    return out


@dataclass
class NssBall:
    """Bounded truncation of a normal subsemigroup, deduplicated."""

    elements: list
    capped: bool = False

    def serial_set(self) -> set:
        return {x.serialize() for x in self.elements}


def nss_ball(G: Amalgam, R: Sequence[AmalgamElement], bounds: SearchBounds,
             max_elements: int = 200_000) -> NssBall:
    """Products s_1^{g_1} ... s_k^{g_k}, k <= max_n, conjugators in the ball."""
    R = list(R)
    if not R or any(s.is_identity for s in R):
        raise PreconditionError("R must be nonempty and avoid the identity")
    conjs = amalgam_conjugator_ball(G, bounds)
    level1 = []
    seen = set()
    capped = False
    nodes = 0
    for s in R:
        for h in conjs:
            nodes += 1
            if nodes > bounds.node_cap or len(seen) >= max_elements:
                capped = True
                break
            x = s.conj(h)
            key = x.serialize()
            if key not in seen:
                seen.add(key)
                level1.append(x)
        if capped:
            break
    out = list(level1)
    frontier = list(level1)
    for _ in range(bounds.max_n - 1):
        if capped:
            break
        nxt = []
        for x in frontier:
            for y in level1:
                nodes += 1
                if nodes > bounds.node_cap or len(seen) >= max_elements:
                    capped = True
                    break
                z = x * y
                key = z.serialize()
                if key not in seen:
                    seen.add(key)
                    nxt.append(z)
            if capped:
                break
        out.extend(nxt)
        frontier = nxt
    return NssBall(out, capped)


def nss_ball_free(alphabet: Sequence[Generator], seeds: Sequence[Word],
                  bounds: SearchBounds,
                  conjugators: Optional[Sequence[Word]] = None,
                  max_elements: int = 200_000):
    """Free-group NSS ball over Word values; returns (set of Words, capped).

    Both the node cap and the element cap flag the result as capped
    (partial) rather than failing; a capped ball is still a sound inner
    approximation of the normal subsemigroup.
    """
    seeds = list(seeds)
    if not seeds or any(w.is_identity for w in seeds):
        raise PreconditionError("seeds must be nonempty and avoid the identity")
    if conjugators is None:
        conjugators = free_ball(alphabet, bounds.radius)
    level1 = []
    seen = set()
    capped = False
    nodes = 0
    for s in seeds:
        for h in conjugators:
            nodes += 1
            if nodes > bounds.node_cap or len(seen) >= max_elements:
                capped = True
                break
            x = s.conj(h)
            if x not in seen:
                seen.add(x)
                level1.append(x)
        if capped:
            break
    frontier = list(level1)
    for _ in range(bounds.max_n - 1):
        if capped:
            break
        nxt = []
        for x in frontier:
            for y in level1:
                nodes += 1
                if nodes > bounds.node_cap or len(seen) >= max_elements:
                    capped = True
                    break
                z = x * y
                if z not in seen:
                    seen.add(z)
                    nxt.append(z)
            if capped:
                break
        frontier = nxt
    return seen, capped


# ---------------------------------------------------------------------------
# Certificate search
# ---------------------------------------------------------------------------

@dataclass
class SearchResult:
    certificate: Optional[GtCertificate]
    capped: bool
    nodes: int

    @property
    def found(self) -> bool:
        return self.certificate is not None


def search_gt(G: Amalgam, g: AmalgamElement, bounds: SearchBounds) -> SearchResult:
    """Breadth-first search for a product of conjugates of g equal to 1.

    Tuples are enumerated by (n, total conjugator component count,
    lexicographic), so the first certificate found is canonical.  A
    none-found outcome with capped=False exhausts the stated bounds; it is
    not a proof of generalized-torsion-freeness.
    """
    if g.is_identity:
        raise PreconditionError("the base element must be nontrivial")
    ball = amalgam_conjugator_ball(G, bounds)
    ball.sort(key=lambda x: (x.length, x.serialize()))
    conj_cache = [g.conj(h) for h in ball]
    by_len: dict = {}
    for idx, h in enumerate(ball):
        by_len.setdefault(h.length, []).append(idx)
    lengths = sorted(by_len)
    nodes = 0

    def extend(slots: int, total: int, partial, tail: list):
        nonlocal nodes
        if slots == 0:
            if total == 0 and partial.is_identity:
                return list(tail)
            return None
        for ln in lengths:
            rest = total - ln
            if rest < 0 or rest > (slots - 1) * lengths[-1]:
                continue
            for idx in by_len[ln]:
                nodes += 1
                if nodes > bounds.node_cap:
                    raise _Capped()
                res = extend(slots - 1, rest, partial * conj_cache[idx],
                             tail + [idx])
                if res is not None:
                    return res
        return None

    try:
        for n in range(1, bounds.max_n + 1):
            for total in range(0, lengths[-1] * n + 1):
                res = extend(n, total, G.identity(), [])
                if res is not None:
                    cert = GtCertificate(g, [ball[i] for i in res])
                    if not verify_gt_certificate(G, cert):
                        raise InternalInvariantError("found certificate fails verification")
                    return SearchResult(cert, False, nodes)
    except _Capped:
        return SearchResult(None, True, nodes)
    return SearchResult(None, False, nodes)


class _Capped(Exception):
    pass


# ---------------------------------------------------------------------------
# Explicit certificate constructions
# ---------------------------------------------------------------------------

def doubled_amalgam(alphabet: Sequence[str], edge_gens: Sequence[Word]) -> Amalgam:
    """A *_C A' : two copies of a free group glued along <edge_gens>."""
    prime = {gen(a): gen(a + "'") for a in alphabet}
    hom = {g: Word([(gp, 1)]) for g, gp in prime.items()}
    primed = []
    for w in edge_gens:
        primed.append(Word([(prime[g], e) for g, e in w.syls]))
    f1 = FreeFactor("A", [gen(a) for a in alphabet])
    f2 = FreeFactor("A'", list(prime.values()))
    edge_alpha = tuple(gen("e", i + 1) for i in range(len(edge_gens)))
    return Amalgam(
        [f1, f2],
        EdgeIdentification(edge_alpha, (tuple(edge_gens), tuple(primed))),
    )


def bergman_witness(alphabet: Sequence[str], edge_gens: Sequence[Word],
                    a: Word, cs: Sequence[Word]):
    """Certificate for a' a^-1 in A *_C A' from an RTF violation in (A, C).

    Requires a outside C, each c_i in C, n >= 2, and the alternating
    product a c_1 a c_2 ... a c_n to land in C.  The conjugators are the
    suffix products (a c_i)(a c_{i+1})...(a c_n), which telescope the two
    spellings of the C-element against each other.
    """
    cs = list(cs)
    if len(cs) < 2:
        raise PreconditionError("need n >= 2 conjugating constants")
    aut = SubgroupAutomaton(edge_gens)
    if aut.contains(a):
        raise PreconditionError("a must lie outside C")
    for c in cs:
        if not aut.contains(c):
            raise PreconditionError(f"not an element of C: {c}")
    t = Word()
    for c in cs:
        t = t * a * c
    if not aut.contains(t):
        raise PreconditionError(f"a c_1 ... a c_n lies outside C: {t}")
    G0 = doubled_amalgam(alphabet, edge_gens)
    prime = {gen(x): gen(x + "'") for x in alphabet}
    a_primed = Word([(prime[g], e) for g, e in a.syls])
    base = normalize(G0, [(1, a_primed), (0, a.inverse())])
    conjugators = []
    for i in range(len(cs)):
        w = Word()
        for c in cs[i:]:
            w = w * a * c
        conjugators.append(normalize(G0, [(0, w)]))
    cert = GtCertificate(base, conjugators)
    if not verify_gt_certificate(G0, cert):
        raise InternalInvariantError("constructed certificate fails verification")
    return G0, cert


def bs_amalgam(m: int) -> Amalgam:
    """<a> *_{a^m = c} <b, c | bc = cb>."""
    if m < 2:
        raise PreconditionError("need m >= 2")
    fa = FreeFactor("A", [gen("a")])
    fb = AbelianFactor("B", [gen("b"), gen("c")])
    e = gen("e")
    return Amalgam(
        [fa, fb],
        EdgeIdentification((e,), ((parse_word(f"a^{m}"),), (parse_word("c"),))),
    )


def bs_commutator_witness(m: int):
    """m-term certificate for [a, b] from expanding [a^m, b] = 1.

    Iterating [xy, z] = [y, z]^{x^-1} [x, z] on [a^m, b] gives conjugators
    a^{-(m-1)}, ..., a^{-1}, 1.
    """
    G = bs_amalgam(m)
    a, b = parse_word("a"), parse_word("b")
    base = normalize(G, [(0, a), (1, b), (0, a.inverse()), (1, b.inverse())])
    conjugators = [
        normalize(G, [(0, a ** (-(m - i)))]) for i in range(1, m + 1)
    ]
    cert = GtCertificate(base, conjugators)
    if not verify_gt_certificate(G, cert):
        raise InternalInvariantError("constructed certificate fails verification")
    return G, cert


# ---------------------------------------------------------------------------
# Bounded freeness checks (RTF, multi-malnormality, families)
# ---------------------------------------------------------------------------

@dataclass
class Violation:
    kind: str
    data: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.data}


@dataclass
class SuiteReport:
    """Outcome of a bounded or randomized property check."""

    name: str
    trials: int
    violations: list = field(default_factory=list)
    skips: int = 0
    inconclusive: int = 0
    capped: bool = False
    seed: int = 0
    params: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "violations": [v.to_json() for v in self.violations],
            "skips": self.skips,
            "inconclusive": self.inconclusive,
            "capped": self.capped,
            "seed": self.seed,
            "params": self.params,
            "ok": self.ok,
        }


def subgroup_product_ball(generators: Sequence[Word], radius: int,
                          include_identity: bool = True) -> list:
    """Products of <= radius generators (and inverses), deduplicated."""
    units = list(generators) + [w.inverse() for w in generators]
    seen = {Word()} if include_identity else set()
    out = [Word()] if include_identity else []
    frontier = [Word()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for u in units:
                w2 = w * u
                if w2 not in seen:
                    seen.add(w2)
                    nxt.append(w2)
                    out.append(w2)
        frontier = nxt
    return out


def check_rtf(alphabet: Sequence[Generator], subgroup_gens: Sequence[Word],
              bounds: SearchBounds) -> SuiteReport:
    """Bounded search for g h_1 g h_2 ... g h_k = 1 with g outside H.

    g runs over the letter ball minus H; the h_i over products of at most
    ``radius`` subgroup generators; k <= max_n.  Finding such a product
    refutes relative torsion-freeness; none-found within bounds (possibly
    capped) merely corroborates it.
    """
    aut = SubgroupAutomaton(subgroup_gens)
    gball = [w for w in free_ball(alphabet, bounds.max_elt_letters)
             if not aut.contains(w)]
    if not gball:
        raise PreconditionError("subgroup contains the whole ball; not proper here")
    hball = subgroup_product_ball(subgroup_gens, bounds.radius)
    report = SuiteReport("rtf", 0, seed=bounds.seed, params={
        "bounds": bounds.to_json(),
        "g_candidates": len(gball),
        "h_candidates": len(hball),
    })
    nodes = 0

    def rec(g: Word, partial: Word, k: int, tail: list) -> bool:
        nonlocal nodes
        if k >= bounds.max_n:
            return False
        for h in hball:
            nodes += 1
            if nodes > bounds.node_cap:
                report.capped = True
                return True
            cur = partial * g * h
            if cur.is_identity:
                report.violations.append(Violation("rtf-violation", {
                    "g": str(g), "h": [str(x) for x in tail + [h]],
                }))
                return True
            if rec(g, cur, k + 1, tail + [h]):
                return True
        return False

    for g in gball:
        report.trials += 1
        if rec(g, Word(), 0, []):
            break
    report.params["nodes"] = nodes
    return report


def check_multimalnormal(alphabet: Sequence[Generator],
                         subgroup_gens: Sequence[Word],
                         seeds: Sequence[Word],
                         bounds: SearchBounds) -> SuiteReport:
    """Bounded search for c_1^{a_1} ... c_n^{a_n} in C with all a_i outside C.

    The c_i run over the bounded normal subsemigroup of C generated by the
    seeds (conjugators are products of subgroup generators); products that
    normalize into C are violations of the defining condition.
    """
    aut = SubgroupAutomaton(subgroup_gens)
    for s in seeds:
        if not aut.contains(s):
            raise PreconditionError(f"seed lies outside C: {s}")
    conj_in_c = subgroup_product_ball(subgroup_gens, bounds.radius)
    cball, capped = nss_ball_free(alphabet, seeds, bounds, conjugators=conj_in_c,
                                  max_elements=20_000)
    if any(w.is_identity for w in cball):
        raise PreconditionError("the identity lies in the seed ball; invalid C'")
    cball = sorted(cball, key=lambda w: w.sort_key())
    aball = [w for w in free_ball(alphabet, bounds.max_elt_letters)
             if not aut.contains(w)]
    report = SuiteReport("multimalnormal", 0, capped=capped, seed=bounds.seed, params={
        "bounds": bounds.to_json(),
        "c_candidates": len(cball),
        "a_candidates": len(aball),
    })
    nodes = 0

    def rec(partial: Word, n: int, tail: list) -> bool:
        nonlocal nodes
        if n >= bounds.max_n:
            return False
        for c in cball:
            for a in aball:
                nodes += 1
                if nodes > bounds.node_cap:
                    report.capped = True
                    return True
                cur = partial * c.conj(a)
                if aut.contains(cur):
                    report.violations.append(Violation("multimalnormal-violation", {
                        "terms": [str(t) for t in tail + [(c, a)]],
                        "product": str(cur),
                    }))
                    return True
                if rec(cur, n + 1, tail + [(c, a)]):
                    return True
        return False

    report.trials = 1
    rec(Word(), 0, [])
    report.params["nodes"] = nodes
    return report


def check_nss_intersection(alphabet: Sequence[Generator],
                           subgroup_gens: Sequence[Word],
                           alpha: Word,
                           bounds: SearchBounds,
                           boost: int = 2) -> SuiteReport:
    """Ball corroboration of NSS_A({alpha}) cap C = NSS_C({alpha}).

    Every element of the ambient NSS ball landing in C must reappear in the
    C-internal NSS ball computed at boosted bounds.  Misses are reported as
    inconclusive (radius effects), never as violations.
    """
    aut = SubgroupAutomaton(subgroup_gens)
    if not aut.contains(alpha) or alpha.is_identity:
        raise PreconditionError("alpha must be a nontrivial element of C")
    ambient, capped1 = nss_ball_free(alphabet, [alpha], bounds)
    members = sorted((w for w in ambient if aut.contains(w)),
                     key=lambda w: w.sort_key())
    big = SearchBounds(
        radius=bounds.radius * boost,
        max_n=bounds.max_n * boost,
        max_elt_letters=bounds.max_elt_letters,
        node_cap=bounds.node_cap,
        seed=bounds.seed,
    )
    conj_in_c = subgroup_product_ball(subgroup_gens, big.radius)
    inner, capped2 = nss_ball_free(alphabet, [alpha], big, conjugators=conj_in_c)
    report = SuiteReport("nss-intersection", len(members),
                         capped=capped1 or capped2, seed=bounds.seed,
                         params={"bounds": bounds.to_json(), "alpha": str(alpha)})
    for w in members:
        if w not in inner:
            report.inconclusive += 1
    return report


@dataclass
class FamilySpec:
    """Per factor, a list of named seed sets, each generating an NSS."""

    seeds: list  # seeds[i] = list of (name, [Word, ...]) for factor i

    def __post_init__(self):
        for per_factor in self.seeds:
            if not per_factor:
                raise PreconditionError("every factor needs at least one seed set")


def _factor_nss_ball(f, seeds: Sequence[Word], bounds: SearchBounds):
    if f.kind == "free":
        ball, capped = nss_ball_free(f.alphabet, seeds, bounds)
        return ball, capped
    # abelian: conjugation is trivial, the NSS is the set of sums
    seen = set()
    frontier = [f.canonical(Word())]
    for _ in range(bounds.max_n):
        nxt = []
        for w in frontier:
            for s in seeds:
                z = f.mul(w, s)
                if z not in seen:
                    seen.add(z)
                    nxt.append(z)
        frontier = nxt
    return seen, False


def check_family(G: Amalgam, fam: FamilySpec, bounds: SearchBounds) -> SuiteReport:
    """Ball check of the two family conditions for the GTF criterion.

    (1) every nontrivial factor-ball element lies in some seed set's NSS
    ball; (2) for each seed set P of factor i and each other factor j, some
    seed set Q of factor j has the same edge trace: P-ball cap C equals
    Q-ball cap C as sets of edge words.
    """
    if len(fam.seeds) != len(G.factors):
        raise PreconditionError("one seed family per factor required")
    report = SuiteReport("family", 0, seed=bounds.seed,
                         params={"bounds": bounds.to_json()})
    balls = []
    capped = False
    for f, per_factor in zip(G.factors, fam.seeds):
        named = {}
        for name, seeds in per_factor:
            ball, c = _factor_nss_ball(f, seeds, bounds)
            capped = capped or c
            named[name] = ball
        balls.append(named)
    report.capped = capped
    # condition (1)
    for fi, f in enumerate(G.factors):
        for w in f.ball(bounds.max_elt_letters):
            if f.is_identity(w):
                continue
            report.trials += 1
            if not any(w in ball for ball in balls[fi].values()):
                report.violations.append(Violation("family-coverage", {
                    "factor": f.name, "element": str(w),
                }))
    # condition (2): matching edge traces
    traces = []
    for fi, f in enumerate(G.factors):
        tr = {}
        for name, ball in balls[fi].items():
            tr[name] = frozenset(
                str(f.to_edge(w)) for w in ball if f.in_edge(w)
            )
        traces.append(tr)
    for fi in range(len(G.factors)):
        for name, trace in traces[fi].items():
            for fj in range(len(G.factors)):
                if fj == fi:
                    continue
                report.trials += 1
                if not any(trace == other for other in traces[fj].values()):
                    report.violations.append(Violation("family-edge-mismatch", {
                        "factor": G.factors[fi].name,
                        "seed_set": name,
                        "against_factor": G.factors[fj].name,
                        "trace": sorted(trace),
                    }))
    return report


# ---------------------------------------------------------------------------
# Property-suite front door (registry lives in suites.py)
# ---------------------------------------------------------------------------

def run_suite(name: str, trials: int = 200, seed: int = 7, **params) -> SuiteReport:
    """Run one registered property suite; deterministic given the seed."""
    from .suites import run_suite as _run

    return _run(name, trials, seed, **params)


def available_suites() -> list:
    from .suites import SUITES

    return sorted(SUITES)
