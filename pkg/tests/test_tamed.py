import random

import pytest

from gtkit.amalgam import free_as_free_product, element_from_free_word
from gtkit.errors import NotTamedError, PreconditionError
from gtkit.suites import run_suite
from gtkit.tamed import (
    ConjTuple,
    TamedSampler,
    cancellability,
    delta_factorize,
    is_tamed,
    tamed_length_bound,
)
from gtkit.word import parse_word as W


@pytest.fixture(scope="module")
def fp2():
    return free_as_free_product(["a", "b"])


def el(G, text):
    return element_from_free_word(G, W(text))


def test_cancellability_lhs_example(fp2):
    v = ConjTuple(fp2, [(el(fp2, "a"), el(fp2, "a b^2")),
                        (el(fp2, "b^-1"), el(fp2, "b"))])
    c = cancellability(v, 2)
    assert c.kind == "LHS"
    r, _ = c.witness
    # witness satisfies the defining membership: R g_2^-1 t_2 in C
    assert (r * v.g(2).inverse() * v.t(2)).length == 0


def test_cancellability_none_for_trivial_neighbors(fp2):
    v = ConjTuple(fp2, [(el(fp2, "a"), fp2.identity())])
    assert cancellability(v, 1).kind == "none"


def test_cancellability_two_sided_reverse_construction(fp2):
    # choose c = 1 in C, split: R * t^g * L = 1 with R, L nontrivial
    t = el(fp2, "a")
    g = el(fp2, "b")
    x = t.conj(g)  # b^-1 a b
    r = el(fp2, "b")
    lf = el(fp2, "b^-1 a^-1")
    assert (r * x * lf).length == 0
    g_prev = el(fp2, "a") * r
    g_next = (lf * el(fp2, "b^2")).inverse()
    v = ConjTuple(fp2, [(el(fp2, "b"), g_prev), (t, g), (el(fp2, "b"), g_next)])
    c = cancellability(v, 2)
    assert c.kind in ("LHS", "RHS", "two-sided")


def test_is_tamed_single_reduced_conjugate(fp2):
    assert is_tamed(ConjTuple(fp2, [(el(fp2, "a"), el(fp2, "b"))]))


def test_is_tamed_clause1(fp2):
    rep = is_tamed(ConjTuple(fp2, [(el(fp2, "a b"), fp2.identity())]))
    assert not rep and rep.violated_clause == 1
    rep = is_tamed(ConjTuple(fp2, [(el(fp2, "a"), el(fp2, "a"))]))
    assert not rep and rep.violated_clause == 1


def test_is_tamed_clause2(fp2):
    rep = is_tamed(ConjTuple(fp2, [(el(fp2, "a"), fp2.identity()),
                                   (el(fp2, "a^-1"), fp2.identity())]))
    assert not rep and rep.violated_clause == 2


def test_is_tamed_clause3(fp2):
    # t_2 is LHS-cancellable via the right factor a^-1 b of g_1
    v = ConjTuple(fp2, [(el(fp2, "a"), el(fp2, "b a^-1 b")),
                        (el(fp2, "a"), el(fp2, "b"))])
    rep = is_tamed(v)
    assert not rep and rep.violated_clause == 3
    assert cancellability(v, 2).kind == "LHS"


def test_delta_factorize_single_trivial_g(fp2):
    fact = delta_factorize(ConjTuple(fp2, [(el(fp2, "a"), fp2.identity())]))
    a, b, c = fact.triples[0]
    assert fact.deltas[0].is_identity
    assert a.is_identity and c.is_identity
    assert b.equals(el(fp2, "a"))


def test_delta_factorize_merge_case(fp2):
    # g_1 g_2^-1 = a (b^-1 a)^-1 = b: its leading component b merges with
    # t_1 = b, so delta_2 = e_{2,1} = b
    v = ConjTuple(fp2, [(el(fp2, "b"), el(fp2, "a")),
                        (el(fp2, "a"), el(fp2, "b^-1 a"))])
    assert is_tamed(v)
    fact = delta_factorize(v)
    assert fact.deltas[1].equals(el(fp2, "b"))
    assert fact.partials[-1].equals(v.product())


def test_delta_factorize_requires_tamed(fp2):
    with pytest.raises(NotTamedError):
        delta_factorize(ConjTuple(fp2, [(el(fp2, "a b"), fp2.identity())]))


def test_tamed_length_bound_examples(fp2):
    lhs, rhs, holds = tamed_length_bound(
        ConjTuple(fp2, [(el(fp2, "a"), fp2.identity())]))
    assert (lhs, rhs, holds) == (1, 1, True)
    v = ConjTuple(fp2, [(el(fp2, "a"), el(fp2, "b")),
                        (el(fp2, "a"), el(fp2, "b^2"))])
    assert is_tamed(v)
    lhs, rhs, holds = tamed_length_bound(v)
    assert holds and lhs == 5 and rhs == 4


def test_tamed_length_bound_requires_tamed(fp2):
    with pytest.raises(NotTamedError):
        tamed_length_bound(ConjTuple(fp2, [(el(fp2, "a b"), fp2.identity())]))


def test_sampler_produces_tamed_tuples(fp2):
    rng = random.Random(0)
    sampler = TamedSampler(fp2, rng)
    for _ in range(50):
        v = sampler.sample()
        assert is_tamed(v)


def test_conjtuple_json_roundtrip(fp2):
    v = ConjTuple(fp2, [(el(fp2, "a"), el(fp2, "b")),
                        (el(fp2, "b"), el(fp2, "a b"))])
    back = ConjTuple.from_json(fp2, v.to_json())
    assert all(
        t1.equals(t2) and g1.equals(g2)
        for (t1, g1), (t2, g2) in zip(v.entries, back.entries)
    )


def test_suite_cancellable_one_side():
    assert run_suite("lemma_cancellable_one_side", trials=400, seed=31).ok


def test_suite_prop_two_sided():
    rep = run_suite("prop_two_sided", trials=400, seed=32)
    assert rep.ok
    assert rep.skips < 400  # the reverse construction does hit the hypotheses


def test_suite_length_bound_small():
    assert run_suite("prop_length_bound", trials=400, seed=33).ok


def test_suite_delta_factorization():
    assert run_suite("delta_factorization", trials=300, seed=34).ok


def test_delta_factorize_power_block_merge(fp2):
    # g_1 trivial, g_1 g_2^-1 = b^3 a and t_1 = b^2: delta_2 = b^3
    v = ConjTuple(fp2, [(el(fp2, "b^2"), fp2.identity()),
                        (el(fp2, "b"), el(fp2, "a^-1 b^-3"))])
    assert is_tamed(v)
    fact = delta_factorize(v)
    assert fact.deltas[1].equals(el(fp2, "b^3"))
    assert fact.partials[-1].equals(v.product())
