import pytest

from gtkit.errors import NotMemberError, PreconditionError
from gtkit.stallings import (
    SubgroupAutomaton,
    contains,
    express,
    fold,
    lambda_value,
    prefix_acceptable,
)
from gtkit.suites import run_suite
from gtkit.word import Word, gen, parse_word as W

A, B = gen("a"), gen("b")


def c6_generators():
    """C = <a, a^{b^2} (a^b)^-1 a> inside F(a, b)."""
    second = W("b^-2 a b^2") * W("b^-1 a^-1 b") * W("a")
    return [W("a"), second]


def test_cyclic_subgroup_is_one_looped_state():
    aut = fold([W("a")])
    assert aut.num_states == 1
    assert aut.contains(W("a^5"))
    assert not aut.contains(W("b"))


def test_c6_rejects_b():
    aut = fold(c6_generators())
    assert aut.rank == 2
    assert not contains(aut, W("b"))
    # independent reason: both generators have b-weight zero, b does not
    for g in c6_generators():
        assert g.exponent_sum(B) == 0


def test_contains_examples():
    aut = fold(c6_generators())
    assert contains(aut, W("a"))
    a2 = fold([W("a^2")])
    assert not a2.contains(W("a"))
    assert a2.contains(W("a^6"))


def test_express_generator_and_product():
    g1, g2 = c6_generators()
    aut = fold([g1, g2])
    assert express(aut, W("a")).expression == W("g[1]")
    assert express(aut, g2 * g1).expression == W("g[2] g[1]")
    assert express(fold([W("a^2")]), W("a^6")).expression == W("g[1]^3")


def test_express_rejects_nonmembers():
    aut = fold(c6_generators())
    with pytest.raises(NotMemberError):
        express(aut, W("b"))


def test_express_handles_dependent_generators():
    aut = fold([W("a"), W("a^3"), W("b a b^-1")])
    assert aut.rank == 2
    w = W("a^2") * W("b a^2 b^-1") * W("a^-1")
    expr = aut.express(w)
    assert aut.evaluate(expr) == w


def test_fold_deterministic_in_generator_order():
    g1, g2 = c6_generators()
    assert fold([g1, g2]).canonical_form() == fold([g2, g1]).canonical_form()


def test_automaton_json_shape():
    aut = fold([W("a")])
    data = aut.to_json()
    assert data["states"] == 1 and data["base"] == 0
    assert data["edges"] == [[0, "a", 0]]


# ---------------------------------------------------------------------------
# prefix acceptance
# ---------------------------------------------------------------------------

def test_prefix_acceptable_on_generator_prefixes():
    g1, g2 = c6_generators()
    aut = fold([g1, g2])
    assert prefix_acceptable(aut, g2.left(1), 1, "left")
    assert prefix_acceptable(aut, g2.left(3), 3, "left")
    assert prefix_acceptable(aut, g2.right(2), 2, "right")


def test_prefix_acceptable_requires_exact_exponent():
    # L_1 candidates must match a first syllable exactly, not extend it
    aut = fold([W("a^3 b a^-1")])
    assert prefix_acceptable(aut, W("a^3"), 1, "left")
    assert not prefix_acceptable(aut, W("a^4"), 1, "left")
    assert not prefix_acceptable(aut, W("a^2 b"), 2, "left")


def test_prefix_acceptable_length_mismatch():
    aut = fold([W("a")])
    with pytest.raises(PreconditionError):
        prefix_acceptable(aut, W("a"), 2, "left")


def test_lambda_value_against_small_enumeration():
    gens = [W("a b a"), W("b^2 a^-1")]
    aut = fold(gens)
    w = W("a b a b^2")
    lam = lambda_value(aut, w)
    # brute force: members as short products of generators
    from gtkit.gentorsion import subgroup_product_ball

    best = 0
    for c in subgroup_product_ball(gens, 4, include_identity=False):
        for i in range(1, min(c.syllable_len, w.syllable_len) + 1):
            if c.left(i) == w.left(i):
                best = max(best, i)
    assert lam >= best
    assert w.left(lam) in [c.left(lam) for c in
                           subgroup_product_ball(gens, 6, include_identity=False)
                           if c.syllable_len >= lam] or lam == 0


# ---------------------------------------------------------------------------
# randomized suites
# ---------------------------------------------------------------------------

def test_suite_fold_confluence():
    assert run_suite("fold_confluence", trials=150, seed=11).ok


def test_suite_subgroup_closure():
    assert run_suite("subgroup_closure", trials=300, seed=12).ok


def test_suite_express_soundness():
    assert run_suite("express_soundness", trials=300, seed=13).ok


def test_suite_oracle_prefix_acceptable():
    rep = run_suite("oracle_prefix_acceptable", trials=300, seed=14)
    assert rep.ok, rep.violations[0].to_json()


def test_express_regression_whole_group_tuple():
    # <a^2, a b^2, b^-1 a> is all of F(a,b); expression must still work
    gens = [W("a^2"), W("a b^2"), W("b^-1 a"), W("a^2")]
    aut = fold(gens)
    assert aut.num_states == 1 and aut.rank == 2
    for w in (W("a"), W("b"), W("a b a^-1"), W("b^-5 a^3")):
        assert aut.evaluate(aut.express(w)) == w


def test_express_regression_offset_through_fold():
    # the second generator's petal rides through a fold with the first's
    gens = [W("a^3"), W("a^-1 b a b")]
    aut = fold(gens)
    for w in gens + [gens[0] * gens[1], gens[1].inverse() * gens[0]]:
        assert aut.evaluate(aut.express(w)) == w


def test_fold_confluence_regression():
    gens = [W("a b^-1 a^-1"), W("b"), W("b a^-1 b a b")]
    forms = set()
    import itertools

    for perm in itertools.permutations(gens):
        forms.add(fold(list(perm)).canonical_form())
    assert len(forms) == 1


def test_express_adversarial_stress():
    import random

    rng = random.Random(99)
    alphabet = [gen("a"), gen("b"), gen("c")]

    def rand_word(maxlen, alpha):
        w = Word()
        n = rng.randint(1, maxlen)
        while w.letter_len < n:
            w = w * Word([(alpha[rng.randrange(len(alpha))], rng.choice((1, -1)))])
        return w

    for trial in range(1500):
        alpha = alphabet[:rng.choice((2, 2, 3))]
        k = rng.randint(1, 5)
        gens = [rand_word(rng.choice((3, 5, 8)), alpha) for _ in range(k)]
        if k > 1 and rng.random() < 0.4:
            gens[rng.randrange(k)] = gens[0] ** rng.choice((1, -1, 2))
        if rng.random() < 0.3:
            gens[rng.randrange(k)] = gens[rng.randrange(k)].conj(rand_word(3, alpha))
        aut = fold(gens)
        w = Word()
        for _ in range(rng.randint(0, 6)):
            w = w * (gens[rng.randrange(k)] ** rng.choice((1, -1)))
        assert aut.evaluate(aut.express(w)) == w
        if trial % 10 == 0:
            shuffled = list(gens)
            rng.shuffle(shuffled)
            assert fold(shuffled).canonical_form() == aut.canonical_form()
