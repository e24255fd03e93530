"""Registered randomized and exhaustive property suites.

Each suite samples hypothesis instances for one structural fact and checks
the conclusion exactly, reporting violations with reproducer data.  All
randomness flows from the suite seed; instances whose hypotheses cannot be
established are skipped and counted.
"""

from __future__ import annotations

import functools
import random
from typing import Optional, Sequence

from . import casestudy
from .amalgam import (
    Amalgam,
    AmalgamElement,
    SandwichDecomposition,
    cancellation_number,
    check_sandwich_nontrivial,
    end_preserving,
    factors as amalgam_factors,
    free_as_free_product,
    is_reduced,
    normalize,
)
from .errors import PreconditionError
from .gentorsion import SuiteReport, Violation, subgroup_product_ball
from .magnus import (
    Identify,
    TruncatedSeries,
    ZeroVars,
    annihilates,
    check_c_leading_vars,
    leading_term,
    mu,
)
from .stallings import SubgroupAutomaton
from .tamed import (
    ConjTuple,
    TamedSampler,
    cancellability,
    delta_factorize,
    tamed_length_bound,
)
from .word import (
    Generator,
    HomSpec,
    Presentation,
    Word,
    abelianize_snf,
    cancellation_syllables,
    commutator,
    gen,
    parse_word,
)


# ---------------------------------------------------------------------------
# Shared fixtures and samplers
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _fp2() -> Amalgam:
    return free_as_free_product(["a", "b"])


@functools.lru_cache(maxsize=None)
def _z2z() -> Amalgam:
    from .amalgam import EdgeIdentification, FreeFactor

    fa = FreeFactor("A", [gen("a")])
    fb = FreeFactor("B", [gen("b")])
    return Amalgam(
        [fa, fb],
        EdgeIdentification((gen("e"),), ((parse_word("a^2"),), (parse_word("b^2"),))),
    )


@functools.lru_cache(maxsize=None)
def _csystem(s: int = 10, m: int = 8, seed: int = 0):
    e = casestudy.sample_exponents(s, m, seed)
    return casestudy.CSubgroup.from_matrix(e)


@functools.lru_cache(maxsize=None)
def _onerelator():
    return casestudy.build_onerelator_amalgam()


def _rand_word(rng, alphabet: Sequence[Generator], max_letters: int,
               nonempty: bool = False) -> Word:
    n = rng.randint(1 if nonempty else 0, max_letters)
    w = Word()
    while w.letter_len < n:
        g = alphabet[rng.randrange(len(alphabet))]
        w = w * Word([(g, rng.choice((1, -1)))])
    return w


_AB = (gen("a"), gen("b"))


def _rand_elt(G: Amalgam, rng, max_len: int = 3, max_exp: int = 3,
              balls=None) -> AmalgamElement:
    if balls is None:
        balls = _factor_balls(G, max_exp)
    n = rng.randint(0, max_len)
    comps = []
    last = None
    for _ in range(n):
        fi = rng.choice([i for i in range(len(G.factors)) if i != last])
        comps.append((fi, balls[fi][rng.randrange(len(balls[fi]))]))
        last = fi
    return AmalgamElement(G, Word(), tuple(comps))


def _factor_balls(G: Amalgam, max_exp: int):
    return [
        sorted((x for x in f.ball(max_exp) if not f.in_edge(x)),
               key=lambda w: w.sort_key())
        for f in G.factors
    ]


def _indexed_word(rng, max_letters: int, index_lo: int = -2, index_hi: int = 2,
                  nonempty: bool = False) -> Word:
    alphabet = [casestudy.a_i(i) for i in range(index_lo, index_hi + 1)]
    return _rand_word(rng, alphabet, max_letters, nonempty)


def _report(name, trials, seed, **params) -> SuiteReport:
    return SuiteReport(name, trials, seed=seed, params=params)


# ---------------------------------------------------------------------------
# Oracle-equivalence suites
# ---------------------------------------------------------------------------

def suite_oracle_cancellation_number(trials: int, seed: int) -> SuiteReport:
    """cancellation_number against the brute-force prefix oracle."""
    rng = random.Random(seed)
    rep = _report("oracle_cancellation_number", trials, seed)
    groups = [_fp2(), _z2z()]
    balls = {id(G): _factor_balls(G, 3) for G in groups}
    for t in range(trials):
        G = groups[t % 2]
        g = _rand_elt(G, rng, 4, balls=balls[id(G)])
        h = _rand_elt(G, rng, 4, balls=balls[id(G)])
        got = cancellation_number(g, h)
        want = _brute_cancellation(G, g, h)
        if got != want:
            rep.violations.append(Violation("k-mismatch", {
                "g": str(g), "h": str(h), "got": got, "want": want,
            }))
    return rep


def _brute_cancellation(G: Amalgam, g: AmalgamElement, h: AmalgamElement) -> int:
    best = 0
    for k in range(min(g.length, h.length) + 1):
        suffix = AmalgamElement(G, Word(), g.comps[g.length - k:])
        prefix = AmalgamElement(G, h.head, h.comps[:k])
        if (suffix * prefix).length == 0:
            best = k
    return best


def suite_oracle_normalize_shuffle(trials: int, seed: int) -> SuiteReport:
    """Normal-form soundness and index-vector invariance under shuffles."""
    rng = random.Random(seed)
    rep = _report("oracle_normalize_shuffle", trials, seed)
    groups = [_fp2(), _z2z()]
    balls = {id(G): _factor_balls(G, 3) for G in groups}
    for t in range(trials):
        G = groups[t % 2]
        raw = []
        for _ in range(rng.randint(0, 5)):
            fi = rng.randrange(len(G.factors))
            ball = balls[id(G)][fi]
            raw.append((fi, ball[rng.randrange(len(ball))]))
        x = normalize(G, raw)
        rev = []
        for fi, w in reversed(raw):
            rev.append((fi, G.factors[fi].inv(w)))
        if not (normalize(G, raw + rev).is_identity):
            rep.violations.append(Violation("inverse-not-trivial", {
                "raw": [(fi, str(w)) for fi, w in raw]}))
            continue
        # C-shuffle: distribute a random edge element across a cut
        if G.edge.alphabet and raw:
            cut = rng.randrange(len(raw))
            ew = Word([(G.edge.alphabet[0], rng.choice((1, -1)))])
            shuffled = list(raw)
            fi, w = shuffled[cut]
            f = G.factors[fi]
            shuffled[cut] = (fi, f.mul(w, f.from_edge(ew)))
            shuffled.insert(cut + 1, ("C", ew.inverse()))
            y = normalize(G, shuffled)
            if y.index_vector != x.index_vector or not x.equals(y):
                rep.violations.append(Violation("shuffle-changed-element", {
                    "raw": [(fi, str(w)) for fi, w in raw]}))
    return rep


def suite_oracle_prefix_acceptable(trials: int, seed: int) -> SuiteReport:
    """prefix_acceptable against constructive and enumerative brute force."""
    rng = random.Random(seed)
    rep = _report("oracle_prefix_acceptable", trials, seed)
    for _ in range(trials):
        gens = []
        for _ in range(rng.randint(1, 3)):
            w = _rand_word(rng, _AB, 4, nonempty=True)
            gens.append(w)
        aut = SubgroupAutomaton(gens)
        i = rng.randint(1, 3)
        # candidate prefix: either from a member, or random
        if rng.random() < 0.5:
            c = Word()
            for _ in range(rng.randint(1, 3)):
                u = gens[rng.randrange(len(gens))]
                c = c * (u ** rng.choice((1, -1)))
            if c.syllable_len < i:
                rep.skips += 1
                continue
            p = c.left(i)
        else:
            p = _rand_word(rng, _AB, i * 2, nonempty=True)
            if p.syllable_len != i:
                rep.skips += 1
                continue
        got = aut.prefix_acceptable(p, i, "left")
        witness = _prefix_witness(aut, p, i)
        if got != (witness is not None):
            rep.violations.append(Violation("acceptance-vs-witness", {
                "gens": [str(g) for g in gens], "p": str(p), "i": i, "got": got,
            }))
            continue
        if witness is not None:
            if not (aut.contains(witness) and witness.syllable_len >= i
                    and witness.left(i) == p):
                rep.violations.append(Violation("bad-witness", {
                    "gens": [str(g) for g in gens], "p": str(p), "i": i,
                    "witness": str(witness),
                }))
        else:
            # enumerative cross-check: no short member product has prefix p
            for c in subgroup_product_ball(gens, i + 2, include_identity=False):
                if c.syllable_len >= i and c.left(i) == p:
                    rep.violations.append(Violation("rejected-but-present", {
                        "gens": [str(g) for g in gens], "p": str(p), "i": i,
                        "member": str(c),
                    }))
                    break
    return rep


def _prefix_witness(aut: SubgroupAutomaton, p: Word, i: int) -> Optional[Word]:
    """Construct a member c with l(c) >= i and L_i(c) = p, if any exists."""
    q = aut.trace(p)
    if q is None:
        return None
    if q == aut.base:
        return p
    last_gen = p.syls[-1][0]
    for (g, s), nxt in sorted(aut.delta[q].items(),
                              key=lambda kv: (kv[0][0].sort_key(), kv[0][1])):
        if g == last_gen:
            continue
        path = _immersed_path_to_base(aut, q, (g, s))
        if path is not None:
            return p * path
    return None


def _immersed_path_to_base(aut, state, first_lab) -> Optional[Word]:
    """BFS over (state, last label) for a reduced path with a forced first edge."""
    start = (aut.delta[state][first_lab], first_lab)
    seen = {start}
    queue = [(start, Word([(first_lab[0], first_lab[1])]))]
    while queue:
        (cur, last), w = queue.pop(0)
        if cur == aut.base:
            return w
        for lab, nxt in sorted(aut.delta[cur].items(),
                               key=lambda kv: (kv[0][0].sort_key(), kv[0][1])):
            if lab == (last[0], -last[1]):
                continue
            key = (nxt, lab)
            if key in seen:
                continue
            seen.add(key)
            queue.append((key, w * Word([(lab[0], lab[1])])))
    return None


def suite_express_soundness(trials: int, seed: int) -> SuiteReport:
    """Every returned witness evaluates back to the queried word."""
    rng = random.Random(seed)
    rep = _report("express_soundness", trials, seed)
    for _ in range(trials):
        gens = [
            _rand_word(rng, _AB, 4, nonempty=True)
            for _ in range(rng.randint(1, 3))
        ]
        aut = SubgroupAutomaton(gens)
        w = Word()
        for _ in range(rng.randint(0, 4)):
            w = w * (gens[rng.randrange(len(gens))] ** rng.choice((1, -1)))
        expr = aut.express(w)
        if aut.evaluate(expr) != w:
            rep.violations.append(Violation("bad-expression", {
                "gens": [str(g) for g in gens], "w": str(w), "expr": str(expr),
            }))
    return rep


def suite_fold_confluence(trials: int, seed: int) -> SuiteReport:
    """Shuffling the generator tuple yields an isomorphic automaton."""
    rng = random.Random(seed)
    rep = _report("fold_confluence", trials, seed)
    for _ in range(trials):
        gens = [
            _rand_word(rng, _AB, 5, nonempty=True)
            for _ in range(rng.randint(1, 4))
        ]
        base = SubgroupAutomaton(gens).canonical_form()
        shuffled = list(gens)
        rng.shuffle(shuffled)
        if SubgroupAutomaton(shuffled).canonical_form() != base:
            rep.violations.append(Violation("fold-order-dependent", {
                "gens": [str(g) for g in gens]}))
    return rep


def suite_subgroup_closure(trials: int, seed: int) -> SuiteReport:
    """Membership is closed under products (many products per automaton)."""
    rng = random.Random(seed)
    rep = _report("subgroup_closure", trials, seed)
    per_automaton = 50
    for _ in range(max(1, trials // per_automaton)):
        gens = [
            _rand_word(rng, _AB, 4, nonempty=True)
            for _ in range(rng.randint(1, 3))
        ]
        aut = SubgroupAutomaton(gens)
        for _ in range(per_automaton):
            u = Word()
            v = Word()
            for _ in range(rng.randint(0, 3)):
                u = u * (gens[rng.randrange(len(gens))] ** rng.choice((1, -1)))
            for _ in range(rng.randint(0, 3)):
                v = v * (gens[rng.randrange(len(gens))] ** rng.choice((1, -1)))
            if not (aut.contains(u) and aut.contains(v) and aut.contains(u * v)):
                rep.violations.append(Violation("closure", {
                    "gens": [str(g) for g in gens], "u": str(u), "v": str(v)}))
    return rep


def suite_snf_row_invariance(trials: int, seed: int) -> SuiteReport:
    """Abelianization invariants are stable under relator Tietze moves."""
    rng = random.Random(seed)
    rep = _report("snf_row_invariance", trials, seed)
    gens = [gen("x"), gen("y"), gen("z")]
    for _ in range(trials):
        relators = [
            _rand_word(rng, gens, 6, nonempty=True)
            for _ in range(rng.randint(1, 3))
        ]
        base = abelianize_snf(Presentation(gens, relators))
        moved = list(relators)
        for _ in range(rng.randint(1, 4)):
            k = rng.randrange(len(moved))
            j = rng.randrange(len(moved))
            move = rng.randrange(3)
            if move == 0:
                moved[k] = moved[k].inverse()
            elif move == 1 and j != k:
                conj = _rand_word(rng, gens, 3)
                moved[k] = moved[k] * moved[j].conj(conj) ** rng.choice((1, -1))
            else:
                rng.shuffle(moved)
        got = abelianize_snf(Presentation(gens, moved))
        if got != base:
            rep.violations.append(Violation("snf-not-invariant", {
                "relators": [str(r) for r in relators],
                "moved": [str(r) for r in moved],
                "base": str(base), "got": str(got),
            }))
    return rep


# ---------------------------------------------------------------------------
# Amalgam cancellation lemma suites
# ---------------------------------------------------------------------------

def suite_lemma_end_preserving(trials: int, seed: int) -> SuiteReport:
    """End-preservation iff k < l(alpha), and inheritance by left factors."""
    rng = random.Random(seed)
    rep = _report("lemma_end_preserving", trials, seed)
    groups = [_fp2(), _z2z()]
    balls = {id(G): _factor_balls(G, 3) for G in groups}
    for t in range(trials):
        G = groups[t % 2]
        alpha = _rand_elt(G, rng, 4, balls=balls[id(G)])
        beta = _rand_elt(G, rng, 4, balls=balls[id(G)])
        if alpha.length == 0:
            rep.skips += 1
            continue
        k = cancellation_number(alpha, beta)
        lhs = end_preserving([alpha, beta], "left")
        if lhs != (k < alpha.length):
            rep.violations.append(Violation("iff-failed", {
                "alpha": str(alpha), "beta": str(beta), "k": k}))
            continue
        if lhs:
            for b1, _ in amalgam_factors(beta, "left"):
                if alpha.length > 0 or b1.length > 0:
                    if not end_preserving([alpha, b1], "left"):
                        rep.violations.append(Violation("left-factor-failed", {
                            "alpha": str(alpha), "beta": str(beta), "b1": str(b1)}))
                        break
    return rep


def suite_length_subadditivity(trials: int, seed: int) -> SuiteReport:
    """l(gh) <= l(g) + l(h) and l(gh) >= l(g) + l(h) - 2K(g,h) - 1."""
    rng = random.Random(seed)
    rep = _report("length_subadditivity", trials, seed)
    groups = [_fp2(), _z2z()]
    balls = {id(G): _factor_balls(G, 3) for G in groups}
    for t in range(trials):
        G = groups[t % 2]
        g = _rand_elt(G, rng, 4, balls=balls[id(G)])
        h = _rand_elt(G, rng, 4, balls=balls[id(G)])
        k = cancellation_number(g, h)
        n = (g * h).length
        if not (n <= g.length + h.length and n >= g.length + h.length - 2 * k - 1):
            rep.violations.append(Violation("length-bound", {
                "g": str(g), "h": str(h), "k": k, "l": n}))
    return rep


def suite_sandwich_nontrivial(trials: int, seed: int) -> SuiteReport:
    """When the two-sided condition holds the sandwich product is nontrivial."""
    rng = random.Random(seed)
    rep = _report("sandwich_nontrivial", trials, seed)
    G = _fp2()
    balls = _factor_balls(G, 3)
    for _ in range(trials):
        n = rng.randint(1, 3)
        gs = [_rand_elt(G, rng, 3, balls=balls) for _ in range(n + 1)]
        alphas = [_rand_elt(G, rng, 2, balls=balls) for _ in range(n)]
        d = SandwichDecomposition(gs, alphas)
        res = check_sandwich_nontrivial(d)
        if res.verified and d.product().is_identity:
            rep.violations.append(Violation("verified-but-trivial", {
                "g": [str(x) for x in gs], "alphas": [str(x) for x in alphas]}))
        if not res.verified:
            rep.skips += 1
    return rep


# ---------------------------------------------------------------------------
# Tamedness suites
# ---------------------------------------------------------------------------

def suite_lemma_cancellable_one_side(trials: int, seed: int) -> SuiteReport:
    """One-sided cancellability shortens the adjacent conjugated g."""
    rng = random.Random(seed)
    rep = _report("lemma_cancellable_one_side", trials, seed)
    for G in (_fp2(), _z2z()):
        sampler = TamedSampler(G, rng, reject=False)
        for _ in range(trials // 2):
            v = sampler.raw_tuple(rng.randint(1, 3))
            for i in range(1, v.n + 1):
                if v.t(i).length == 0:
                    continue
                c = cancellability(v, i)
                ci = v.conjugate(i)
                if c.kind == "LHS":
                    if not (v.g(i - 1) * ci).length < v.g(i - 1).length:
                        rep.violations.append(Violation("lhs-not-shorter", {
                            "tuple": v.to_json(), "i": i}))
                elif c.kind == "RHS":
                    if not (v.g(i + 1) * ci.inverse()).length < v.g(i + 1).length:
                        rep.violations.append(Violation("rhs-not-shorter", {
                            "tuple": v.to_json(), "i": i}))
                else:
                    rep.skips += 1
    rep.trials = trials
    return rep


def suite_prop_two_sided(trials: int, seed: int) -> SuiteReport:
    """Two-sided cancellability with non-shortening forces exact equalities."""
    rng = random.Random(seed)
    rep = _report("prop_two_sided", trials, seed)
    G = _fp2()
    balls = _factor_balls(G, 3)
    for _ in range(trials):
        # reverse construction: pick c in C (trivial here: c = 1), L, t, g
        t_pick = _rand_elt(G, rng, 1, balls=balls)
        while t_pick.length != 1:
            t_pick = _rand_elt(G, rng, 1, balls=balls)
        g_mid = _rand_elt(G, rng, 2, balls=balls)
        if g_mid.length and g_mid.lei == t_pick.lei:
            rep.skips += 1
            continue
        x = t_pick.conj(g_mid)
        lf = _rand_elt(G, rng, 2, balls=balls)
        rf_val = x.inverse() * lf.inverse()
        g_prev = _rand_elt(G, rng, 2, balls=balls) * rf_val
        g_next = (lf * _rand_elt(G, rng, 2, balls=balls)).inverse()
        v = ConjTuple(G, [
            (t_pick, g_prev),
            (t_pick, g_mid),
            (t_pick, g_next),
        ])
        if not is_reduced([g_mid.inverse(), t_pick, g_mid]):
            rep.skips += 1
            continue
        c = cancellability(v, 2)
        if not c.cancellable:
            rep.skips += 1
            continue
        ci = v.conjugate(2)
        gp = v.g(1) * ci
        gn = v.g(3) * ci.inverse()
        if gp.length < v.g(1).length or gn.length < v.g(3).length:
            rep.skips += 1
            continue
        ok = (
            gp.length == v.g(1).length > v.g(2).length
            and gn.length == v.g(3).length > v.g(2).length
        )
        if not ok:
            rep.violations.append(Violation("two-sided-equalities", {
                "tuple": v.to_json()}))
    return rep


def suite_prop_length_bound(trials: int, seed: int, group: str = "both") -> SuiteReport:
    """Tamed products satisfy l(T) >= l(g_1) + n + l(g_n)."""
    rng = random.Random(seed)
    rep = _report("prop_length_bound", trials, seed, group=group)
    groups = {"fp2": [_fp2()], "z2z": [_z2z()], "both": [_fp2(), _z2z()]}[group]
    samplers = [TamedSampler(G, rng) for G in groups]
    for t in range(trials):
        sampler = samplers[t % len(samplers)]
        v = sampler.sample()
        lhs, rhs, holds = tamed_length_bound(v)
        if not holds:
            rep.violations.append(Violation("length-bound", {
                "tuple": v.to_json(), "lhs": lhs, "rhs": rhs}))
    return rep


def suite_delta_factorization(trials: int, seed: int) -> SuiteReport:
    """Delta triples are reduced and telescope to the conjugate product."""
    rng = random.Random(seed)
    rep = _report("delta_factorization", trials, seed)
    samplers = [TamedSampler(_fp2(), rng), TamedSampler(_z2z(), rng)]
    for t in range(trials):
        v = samplers[t % 2].sample()
        try:
            fact = delta_factorize(v)
        except Exception as exc:  # NotTamedError covers failed assertions
            rep.violations.append(Violation("delta-failed", {
                "tuple": v.to_json(), "error": str(exc)}))
            continue
        if not fact.partials[-1].equals(v.product()):
            rep.violations.append(Violation("delta-product-mismatch", {
                "tuple": v.to_json()}))
    return rep


# ---------------------------------------------------------------------------
# Magnus suites
# ---------------------------------------------------------------------------

def suite_magnus_homomorphism(trials: int, seed: int, cap: int = 4) -> SuiteReport:
    rng = random.Random(seed)
    rep = _report("magnus_homomorphism", trials, seed, cap=cap)
    for _ in range(trials):
        u = _indexed_word(rng, 5)
        v = _indexed_word(rng, 5)
        if mu(u, cap) * mu(v, cap) != mu(u * v, cap):
            rep.violations.append(Violation("hom", {"u": str(u), "v": str(v)}))
    return rep


def suite_magnus_inverse(trials: int, seed: int, cap: int = 4) -> SuiteReport:
    rng = random.Random(seed)
    rep = _report("magnus_inverse", trials, seed, cap=cap)
    one = TruncatedSeries.one(cap)
    for _ in range(trials):
        w = _indexed_word(rng, 6)
        if mu(w, cap) * mu(w.inverse(), cap) != one:
            rep.violations.append(Violation("inverse", {"w": str(w)}))
    return rep


def suite_magnus_leading_conjugation(trials: int, seed: int) -> SuiteReport:
    rng = random.Random(seed)
    rep = _report("magnus_leading_conjugation", trials, seed)
    for _ in range(trials):
        alpha = _indexed_word(rng, 5, nonempty=True)
        if alpha.is_identity:
            rep.skips += 1
            continue
        g = _indexed_word(rng, 4)
        if leading_term(alpha.conj(g)) != leading_term(alpha):
            rep.violations.append(Violation("conjugation", {
                "alpha": str(alpha), "g": str(g)}))
    return rep


def suite_magnus_degree1(trials: int, seed: int) -> SuiteReport:
    """Degree-1 part of mu equals the weight functional."""
    rng = random.Random(seed)
    rep = _report("magnus_degree1", trials, seed)
    for _ in range(trials):
        w = _indexed_word(rng, 6)
        got = mu(w, 2).homogeneous_part(1)
        want = {}
        for g in w.generators():
            c = w.exponent_sum(g)
            if c:
                want[(g.index,)] = c
        if got != want:
            rep.violations.append(Violation("degree1", {"w": str(w)}))
    return rep


def suite_magnus_ideal_transfer(trials: int, seed: int) -> SuiteReport:
    """Relations annihilating a word annihilate its leading term."""
    rng = random.Random(seed)
    rep = _report("magnus_ideal_transfer", trials, seed)
    for t in range(trials):
        if t % 2 == 0:
            rel = ZeroVars({0})
            seed_word = Word([(casestudy.a_i(0), rng.choice((1, -1)))])
        else:
            rel = Identify({1: 2})
            seed_word = Word([(casestudy.a_i(1), 1), (casestudy.a_i(2), -1)]) \
                ** rng.choice((1, -1))
        alpha = Word()
        for _ in range(rng.randint(1, 3)):
            conj = _indexed_word(rng, 3)
            alpha = alpha * seed_word.conj(conj)
        if alpha.is_identity:
            rep.skips += 1
            continue
        if not annihilates(rel, alpha):
            rep.violations.append(Violation("construction-not-annihilated", {
                "alpha": str(alpha)}))
            continue
        if not annihilates(rel, leading_term(alpha)):
            rep.violations.append(Violation("leading-term-not-annihilated", {
                "alpha": str(alpha)}))
    return rep


def suite_magnus_c_degree1(trials: int, seed: int) -> SuiteReport:
    """Weights against the basis v_0 = a_0, v_1 = a_2 a_1^-1 shape L(alpha)."""
    rng = random.Random(seed)
    rep = _report("magnus_c_degree1", trials, seed)
    v_alphabet = [casestudy.v_i(0), casestudy.v_i(1)]
    expand = HomSpec({
        casestudy.v_i(0): Word([(casestudy.a_i(0), 1)]),
        casestudy.v_i(1): Word([(casestudy.a_i(2), 1), (casestudy.a_i(1), -1)]),
    })
    for _ in range(trials):
        vw = _rand_word(rng, v_alphabet, 6, nonempty=True)
        alpha = expand.apply(vw)
        if alpha.is_identity:
            rep.skips += 1
            continue
        w0 = vw.exponent_sum(casestudy.v_i(0))
        w1 = vw.exponent_sum(casestudy.v_i(1))
        lt = leading_term(alpha)
        if (w0, w1) != (0, 0):
            want = {}
            if w0:
                want[(0,)] = w0
            if w1:
                want[(2,)] = w1
                want[(1,)] = -w1
            if lt.degree != 1 or lt.coeffs != want:
                rep.violations.append(Violation("degree1-formula", {
                    "vw": str(vw), "w0": w0, "w1": w1, "lt": str(lt)}))
        elif lt.degree < 2:
            rep.violations.append(Violation("unexpected-degree1", {
                "vw": str(vw)}))
    return rep


def suite_magnus_c_leading_vars(trials: int, seed: int) -> SuiteReport:
    """Weight-zero members of <v0, v1> show X_0, X_1, X_2 in the leading term."""
    rng = random.Random(seed)
    rep = _report("magnus_c_leading_vars", trials, seed)
    v0 = Word([(casestudy.a_i(0), 1)])
    v1 = Word([(casestudy.a_i(2), 1), (casestudy.a_i(1), -1)])
    for _ in range(trials):
        # zero-weight words: products of commutators of random v-words
        alpha = Word()
        for _ in range(rng.randint(1, 2)):
            x = (v0 ** rng.randint(1, 2)) * (v1 ** rng.randint(1, 2))
            y = (v1 ** rng.randint(1, 2)) * (v0 ** rng.randint(1, 2))
            alpha = alpha * commutator(x, y)
        if alpha.is_identity:
            rep.skips += 1
            continue
        if not check_c_leading_vars(alpha, v0, v1):
            rep.violations.append(Violation("vars-missing", {"alpha": str(alpha)}))
    return rep


# ---------------------------------------------------------------------------
# Small-cancellation and K-calculus suites (on the non-LO subgroup C)
# ---------------------------------------------------------------------------

def suite_lemma_small_cancellation(trials: int, seed: int, s: int = 10,
                                   m: int = 8) -> SuiteReport:
    csub = _csystem(s, m, 0)
    data = casestudy.small_cancellation_report(csub, trials=max(trials, 50),
                                               seed=seed)
    rep = _report("lemma_small_cancellation", data["trials"], seed, s=s, m=m,
                  pairs_checked=data["pairs_checked"])
    for v in data["violations"]:
        rep.violations.append(Violation("small-cancellation", {"case": v}))
    return rep


def _random_c_element(rng, csub, max_factors: int = 3) -> Word:
    units = csub.gen_set()
    c = Word()
    while c.is_identity:
        c = Word()
        for _ in range(rng.randint(1, max_factors)):
            c = c * units[rng.randrange(len(units))]
    return c


def _random_left_factor_of_c(rng, csub) -> Word:
    c = _random_c_element(rng, csub)
    return c.left(rng.randint(0, c.syllable_len))


def suite_lemma_k_beta_h(trials: int, seed: int) -> SuiteReport:
    """K(g, beta h) <= K(g, beta) + 1 for beta outside C, h a member prefix."""
    rng = random.Random(seed)
    rep = _report("lemma_k_beta_h", trials, seed)
    csub = _csystem()
    for _ in range(trials):
        g = _random_c_element(rng, csub)
        beta = _rand_word(rng, _AB, 12, nonempty=True)
        if csub.contains(beta):
            rep.skips += 1
            continue
        h = _random_left_factor_of_c(rng, csub)
        if cancellation_syllables(g, beta * h) > cancellation_syllables(g, beta) + 1:
            rep.violations.append(Violation("k-beta-h", {
                "g": str(g), "beta": str(beta), "h": str(h)}))
    return rep


def suite_lemma_k_alpha_n(trials: int, seed: int) -> SuiteReport:
    """alpha^n stays outside C and K(g, alpha^n) <= K(g, alpha) + 1."""
    rng = random.Random(seed)
    rep = _report("lemma_k_alpha_n", trials, seed)
    csub = _csystem()
    for _ in range(trials):
        g = _random_c_element(rng, csub)
        alpha = _rand_word(rng, _AB, 10, nonempty=True)
        if csub.contains(alpha):
            rep.skips += 1
            continue
        n = rng.randint(2, 4)
        power = alpha ** n
        if csub.contains(power):
            rep.violations.append(Violation("power-in-c", {"alpha": str(alpha)}))
            continue
        if cancellation_syllables(g, power) > cancellation_syllables(g, alpha) + 1:
            rep.violations.append(Violation("k-alpha-n", {
                "g": str(g), "alpha": str(alpha), "n": n}))
    return rep


def suite_cor_k_alpha_n_h(trials: int, seed: int) -> SuiteReport:
    """K(g, alpha^n h) <= K(g, alpha) + 2."""
    rng = random.Random(seed)
    rep = _report("cor_k_alpha_n_h", trials, seed)
    csub = _csystem()
    for _ in range(trials):
        g = _random_c_element(rng, csub)
        alpha = _rand_word(rng, _AB, 10, nonempty=True)
        if csub.contains(alpha):
            rep.skips += 1
            continue
        n = rng.randint(1, 3)
        h = _random_left_factor_of_c(rng, csub)
        if cancellation_syllables(g, (alpha ** n) * h) > \
                cancellation_syllables(g, alpha) + 2:
            rep.violations.append(Violation("cor-k", {
                "g": str(g), "alpha": str(alpha), "n": n, "h": str(h)}))
    return rep


def suite_prop_two_sided_bound(trials: int, seed: int) -> SuiteReport:
    """Oversized two-sided cancellation forces g into S and pins the middle.

    Constructed instances realize the extreme cancellation pattern; random
    instances almost always fail the hypothesis and are skipped.
    """
    rng = random.Random(seed)
    rep = _report("prop_two_sided_bound", trials, seed)
    csub = _csystem()
    s = csub.s
    units = csub.gen_set()
    for t in range(trials):
        if t % 2 == 0:
            g = units[rng.randrange(len(units))]
            i, j = (s - 1, s - 2) if rng.random() < 0.5 else (s - 2, s - 1)
            alpha = _two_sided_alpha(g, i, j)
            h2 = g.right(rng.randint(j + 2, 2 * s))
            h1 = g.left(rng.randint(i + 2, 2 * s))
            mm, nn = 1, 1
        else:
            g = _random_c_element(rng, csub)
            alpha = _rand_word(rng, _AB, 8, nonempty=True)
            if csub.contains(alpha):
                rep.skips += 1
                continue
            c1, alpha, c2 = casestudy.c_simplify(csub, alpha)
            if alpha.is_identity or csub.contains(alpha):
                rep.skips += 1
                continue
            h2 = _random_left_factor_of_c(rng, csub).inverse()
            h1 = _random_left_factor_of_c(rng, csub)
            mm, nn = rng.randint(1, 2), rng.randint(1, 2)
        if not csub.is_simplified(alpha):
            rep.skips += 1
            continue
        lhs = cancellation_syllables(h2 * alpha ** mm, g) + \
            cancellation_syllables(g, (alpha ** nn) * h1)
        if lhs <= g.syllable_len - 2:
            rep.skips += 1
            continue
        in_s = any(g == u for u in units)
        middle = g.right(s) * alpha * g.left(s)
        b_s = Word([tuple(g.component(s))])
        b_s1 = Word([tuple(g.component(s + 1))])
        if not (in_s and middle in (b_s, b_s1)):
            rep.violations.append(Violation("two-sided-bound", {
                "g": str(g), "alpha": str(alpha), "lhs": lhs}))
    return rep


def _two_sided_alpha(g: Word, i: int, j: int) -> Word:
    """A_{2s}^-1 .. A_{2s-j+1}^-1 (A_{2s-j}^-1 A_{i+1}^-1) A_i^-1 .. A_1^-1."""
    two_s = g.syllable_len
    syls = []
    for k in range(two_s, two_s - j, -1):
        gk, ek = g.component(k)
        syls.append((gk, -ek))
    gm, em = g.component(two_s - j)
    gi, ei = g.component(i + 1)
    assert gm == gi
    syls.append((gm, -em - ei))
    for k in range(i, 0, -1):
        gk, ek = g.component(k)
        syls.append((gk, -ek))
    return Word(syls)


# ---------------------------------------------------------------------------
# Left-first product suites
# ---------------------------------------------------------------------------

def _random_word_tuple(rng, count, max_letters=8):
    return [_rand_word(rng, _AB, max_letters) for _ in range(count)]


def suite_lfp_multiplicativity(trials: int, seed: int) -> SuiteReport:
    """Unaltered in the full product iff unaltered in both half products."""
    rng = random.Random(seed)
    rep = _report("lfp_multiplicativity", trials, seed)
    for _ in range(trials):
        n = rng.randint(3, 5)
        words = _random_word_tuple(rng, n)
        k = rng.randint(2, n - 1)
        if words[k - 1].syllable_len == 0:
            rep.skips += 1
            continue
        pos = rng.randint(1, words[k - 1].syllable_len)
        full = casestudy.lfp_trace(words)
        left = casestudy.lfp_trace(words[:k])
        right = casestudy.lfp_trace(words[k - 1:])
        got = full.is_unaltered(k, pos)
        want = left.is_unaltered(k, pos) and right.is_unaltered(1, pos)
        if got != want:
            rep.violations.append(Violation("multiplicativity", {
                "words": [str(w) for w in words], "k": k, "pos": pos}))
    return rep


def suite_lfp_restriction(trials: int, seed: int) -> SuiteReport:
    """Cancellation in the full product restricts to the inner product."""
    rng = random.Random(seed)
    rep = _report("lfp_restriction", trials, seed)
    for _ in range(trials):
        n = rng.randint(3, 5)
        words = _random_word_tuple(rng, n)
        full = casestudy.lfp_trace(words)
        if not full.cancel_pairs:
            rep.skips += 1
            continue
        for (i, p), (j, q) in full.cancel_pairs:
            if i == j:
                continue
            sub = casestudy.lfp_trace(words[i - 1:j])
            if not sub.cancels((1, p), (j - i + 1, q)):
                rep.violations.append(Violation("restriction", {
                    "words": [str(w) for w in words],
                    "pair": [[i, p], [j, q]]}))
                break
    return rep


def suite_lfp_pair_cancellation(trials: int, seed: int) -> SuiteReport:
    """A reported cancellation annihilates the entire enclosed product."""
    rng = random.Random(seed)
    rep = _report("lfp_pair_cancellation", trials, seed)
    for _ in range(trials):
        n = rng.randint(2, 5)
        words = _random_word_tuple(rng, n)
        full = casestudy.lfp_trace(words)
        if not full.cancel_pairs:
            rep.skips += 1
            continue
        for (i, p), (j, q) in full.cancel_pairs:
            r = words[i - 1].syllable_len - p + 1
            mid = words[i - 1].right(r)
            for w in words[i:j - 1]:
                mid = mid * w
            mid = mid * words[j - 1].left(q)
            if not mid.is_identity:
                rep.violations.append(Violation("pair-cancellation", {
                    "words": [str(w) for w in words],
                    "pair": [[i, p], [j, q]]}))
                break
    return rep


# ---------------------------------------------------------------------------
# Conjugate / standard-form suites
# ---------------------------------------------------------------------------

def _random_simplified_g(rng, csub) -> Word:
    while True:
        w = _rand_word(rng, _AB, rng.randint(1, 14), nonempty=True)
        if csub.contains(w):
            continue
        _, g, _ = casestudy.c_simplify(csub, w)
        if not g.is_identity and not csub.contains(g):
            return g


def suite_conjugate_local_property(trials: int, seed: int) -> SuiteReport:
    """Every component of mu links back into C through its prefix."""
    rng = random.Random(seed)
    rep = _report("conjugate_local_property", trials, seed)
    csub = _csystem()
    for _ in range(trials):
        c = _random_c_element(rng, csub)
        g = _random_simplified_g(rng, csub)
        d = casestudy.standard_form(csub, c, g)
        conj = d.conjugate()
        nl = d.lam.syllable_len
        nmu = d.mu.syllable_len
        nall = conj.syllable_len
        for t in range(nl + 1, nl + nmu + 1):
            dt = Word([tuple(conj.component(t))])
            if not csub.in_sc(dt):
                rep.violations.append(Violation("component-outside-sc", {
                    "c": str(c), "g": str(g), "t": t}))
                break
            p = csub.prefix(dt)
            first = g * conj.left(t - 1) * p.inverse()
            second = p * conj.segment(t, nall) * g.inverse()
            if not (csub.contains(first) or csub.contains(second)):
                rep.violations.append(Violation("local-property", {
                    "c": str(c), "g": str(g), "t": t}))
                break
    return rep


def suite_block_cancellation(trials: int, seed: int) -> SuiteReport:
    """Detected mu-mu cancellations certify C-membership of the bridge.

    Fixtures force a cancellation between the mu parts of two conjugates;
    whenever the tracer reports one, the bridge g_r C_{r+1}..C_{t-1} g_t^-1
    must normalize into C and the rewriting with one fewer conjugate must
    reproduce the product.
    """
    rng = random.Random(seed)
    rep = _report("block_cancellation", trials, seed)
    csub = _csystem()
    units = csub.gens
    for _ in range(trials):
        u1 = units[rng.randrange(len(units))]
        u2 = units[rng.randrange(len(units))]
        u3 = units[rng.randrange(len(units))]
        if (u1 * u2).is_identity or (u2.inverse() * u3).is_identity:
            rep.skips += 1
            continue
        c1 = u1 * u2
        c2 = u2.inverse() * u3
        g = _random_simplified_g(rng, csub)
        conj1 = g.inverse() * c1 * g
        conj2 = g.inverse() * c2 * g
        trace = casestudy.lfp_trace([conj1, conj2])
        d1 = casestudy.standard_form(csub, c1, g)
        d2 = casestudy.standard_form(csub, c2, g)
        mu1_range = range(d1.lam.syllable_len + 1,
                          d1.lam.syllable_len + d1.mu.syllable_len + 1)
        mu2_range = range(d2.lam.syllable_len + 1,
                          d2.lam.syllable_len + d2.mu.syllable_len + 1)
        mumu = [
            pair for pair in trace.cancel_pairs
            if pair[0][0] == 1 and pair[1][0] == 2
            and pair[0][1] in mu1_range and pair[1][1] in mu2_range
        ]
        if not mumu:
            rep.skips += 1
            continue
        bridge = g * g.inverse()  # r = 1, t = 2: empty middle
        if not csub.contains(bridge):
            rep.violations.append(Violation("bridge-outside-c", {
                "c1": str(c1), "c2": str(c2), "g": str(g)}))
            continue
        rewritten = (c1 * (c2.conj(bridge.inverse()))).conj(g)
        if rewritten != conj1 * conj2:
            rep.violations.append(Violation("rewriting-mismatch", {
                "c1": str(c1), "c2": str(c2), "g": str(g)}))
    return rep


def suite_claim_a_shortening(trials: int, seed: int) -> SuiteReport:
    """Oversized gamma cancellation admits the conjugate-shortening rewrite.

    For products of conjugates of C-elements, whenever the tail gamma_r of
    C_r is eaten beyond one component by the following partial product, the
    conjugate C_r rewritten through that partial product gets strictly
    shorter, which is the rewriting that a minimal counterexample forbids.
    """
    rng = random.Random(seed)
    rep = _report("claim_a_shortening", trials, seed)
    csub = _csystem()
    for _ in range(trials):
        n = rng.randint(2, 3)
        cs = [_random_c_element(rng, csub) for _ in range(n)]
        gs = [_random_simplified_g(rng, csub) for _ in range(n)]
        conjs = [g.inverse() * c * g for c, g in zip(cs, gs)]
        forms = [casestudy.standard_form(csub, c, g) for c, g in zip(cs, gs)]
        tested = False
        for r in range(n - 1):
            pi = Word()
            for w in conjs[r + 1:]:
                pi = pi * w
            gamma = forms[r].gamma
            tested = True
            if (gamma * pi).syllable_len < gamma.syllable_len - 1:
                new_conj = pi.inverse() * conjs[r] * pi
                if new_conj.syllable_len >= conjs[r].syllable_len:
                    rep.violations.append(Violation("no-shortening", {
                        "cs": [str(c) for c in cs], "gs": [str(g) for g in gs],
                        "r": r + 1}))
        if not tested:
            rep.skips += 1
    return rep


# ---------------------------------------------------------------------------
# Case-study wrappers
# ---------------------------------------------------------------------------

def suite_nonlo_witnesses(trials: int, seed: int, s: int = 10, m: int = 8) -> SuiteReport:
    rep = _report("nonlo_witnesses", 8, seed, s=s, m=m)
    g = casestudy.build_nonlo(casestudy.sample_exponents(s, m, seed))
    for row in casestudy.verify_nonlo_witnesses(g):
        if not (row["identity"] and row["signs_ok"]):
            rep.violations.append(Violation("witness", row))
    return rep


def suite_exponent_condition_a(trials: int, seed: int) -> SuiteReport:
    """Sampled matrices validate; tampered ones are rejected."""
    rng = random.Random(seed)
    rep = _report("exponent_condition_a", trials, seed)
    for t in range(max(1, trials // 10)):
        e = casestudy.sample_exponents(10, 8, seed + t)
        # tamper: duplicate one absolute value
        bad = casestudy.ExponentMatrix(
            e.s, e.m,
            [row[:] for row in e.a_exp],
            [row[:] for row in e.b_exp],
        )
        bad.a_exp[0][1] = -bad.a_exp[2][3]
        try:
            casestudy.validate_exponent_matrix(bad)
            rep.violations.append(Violation("tamper-accepted", {"seed": seed + t}))
        except PreconditionError:
            pass
    return rep


def suite_factor_multimalnormal(trials: int, seed: int) -> SuiteReport:
    """In a free product, P-conjugate products with outside conjugators leave A."""
    rng = random.Random(seed)
    rep = _report("factor_multimalnormal", trials, seed)
    from .amalgam import free_product_of_free

    G = free_product_of_free([["a"], ["x"]])
    balls = _factor_balls(G, 2)
    a_seed = normalize(G, [(0, parse_word("a"))])
    for _ in range(trials):
        n = rng.randint(1, 3)
        prod = G.identity()
        for _ in range(n):
            d = a_seed ** rng.randint(1, 2)
            conj_elt = _rand_elt(G, rng, 3, balls=balls)
            if not any(fi == 1 for fi, _ in conj_elt.comps):
                conj_elt = conj_elt * normalize(G, [(1, parse_word("x"))])
            prod = prod * d.conj(conj_elt)
        in_a = prod.is_identity or (prod.length == 1 and prod.lei == 0)
        if in_a:
            rep.violations.append(Violation("landed-in-factor", {
                "product": str(prod)}))
    return rep


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

SUITES: dict = {
    "oracle_cancellation_number": suite_oracle_cancellation_number,
    "oracle_normalize_shuffle": suite_oracle_normalize_shuffle,
    "oracle_prefix_acceptable": suite_oracle_prefix_acceptable,
    "express_soundness": suite_express_soundness,
    "fold_confluence": suite_fold_confluence,
    "subgroup_closure": suite_subgroup_closure,
    "snf_row_invariance": suite_snf_row_invariance,
    "lemma_end_preserving": suite_lemma_end_preserving,
    "length_subadditivity": suite_length_subadditivity,
    "sandwich_nontrivial": suite_sandwich_nontrivial,
    "lemma_cancellable_one_side": suite_lemma_cancellable_one_side,
    "prop_two_sided": suite_prop_two_sided,
    "prop_length_bound": suite_prop_length_bound,
    "delta_factorization": suite_delta_factorization,
    "magnus_homomorphism": suite_magnus_homomorphism,
    "magnus_inverse": suite_magnus_inverse,
    "magnus_leading_conjugation": suite_magnus_leading_conjugation,
    "magnus_degree1": suite_magnus_degree1,
    "magnus_ideal_transfer": suite_magnus_ideal_transfer,
    "magnus_c_degree1": suite_magnus_c_degree1,
    "magnus_c_leading_vars": suite_magnus_c_leading_vars,
    "lemma_small_cancellation": suite_lemma_small_cancellation,
    "lemma_k_beta_h": suite_lemma_k_beta_h,
    "lemma_k_alpha_n": suite_lemma_k_alpha_n,
    "cor_k_alpha_n_h": suite_cor_k_alpha_n_h,
    "prop_two_sided_bound": suite_prop_two_sided_bound,
    "lfp_multiplicativity": suite_lfp_multiplicativity,
    "lfp_restriction": suite_lfp_restriction,
    "lfp_pair_cancellation": suite_lfp_pair_cancellation,
    "conjugate_local_property": suite_conjugate_local_property,
    "block_cancellation": suite_block_cancellation,
    "claim_a_shortening": suite_claim_a_shortening,
    "nonlo_witnesses": suite_nonlo_witnesses,
    "exponent_condition_a": suite_exponent_condition_a,
    "factor_multimalnormal": suite_factor_multimalnormal,
}


def run_suite(name: str, trials: int = 200, seed: int = 7, **params) -> SuiteReport:
    """Run a registered property suite; deterministic given the seed."""
    if name not in SUITES:
        raise PreconditionError(f"unknown suite: {name!r}")
    if trials <= 0:
        return SuiteReport(name, 0, seed=seed, params=params)
    return SUITES[name](trials, seed, **params)


def run_all(trials: int = 120, seed: int = 7) -> list:
    return [run_suite(name, trials, seed) for name in sorted(SUITES)]
