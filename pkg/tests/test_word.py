import pytest
from hypothesis import given, settings, strategies as st

from gtkit.errors import NotMemberError, UnknownGeneratorError
from gtkit.word import (
    AbelianInvariants,
    HomSpec,
    Presentation,
    Word,
    abelianize_snf,
    apply_hom,
    cancellation_syllables,
    commutator,
    flatten,
    gen,
    parse_word as W,
    reduce,
    smith_invariants,
    syllables,
    weight,
)

A, B = gen("a"), gen("b")
X, Y = gen("x"), gen("y")


# ---------------------------------------------------------------------------
# reduce
# ---------------------------------------------------------------------------

def test_reduce_inverse_pair():
    assert reduce("a a^-1").is_identity


def test_reduce_inner_cancellation():
    assert reduce("a b b^-1 a") == W("a^2")


def test_reduce_idempotent_on_letters():
    w = reduce([(A, 1), (A, 1), (B, -1), (B, 1), (A, -1)])
    assert w == W("a")
    assert reduce(w.syls) == w


def test_reduce_unknown_generator():
    with pytest.raises(UnknownGeneratorError):
        reduce("q", alphabet=[A, B])


def test_parse_indexed_and_exponents():
    w = W("a[3]^-2 b a[3]")
    assert w.syls == ((gen("a", 3), -2), (B, 1), (gen("a", 3), 1))
    assert str(w) == "a[3]^-2 b a[3]"
    assert W(str(w)) == w


letters = st.lists(
    st.tuples(st.sampled_from([A, B, X]), st.sampled_from([1, -1])),
    max_size=30,
)


@given(letters)
@settings(max_examples=200, deadline=None)
def test_reduce_involution(pairs):
    w = reduce(pairs)
    assert (w * w.inverse()).is_identity
    assert w.inverse().inverse() == w
    assert w.letter_len <= len(pairs)


@given(letters, letters)
@settings(max_examples=200, deadline=None)
def test_product_associates_with_reduction(p1, p2):
    assert reduce(list(p1) + list(p2)) == reduce(p1) * reduce(p2)


# ---------------------------------------------------------------------------
# syllables
# ---------------------------------------------------------------------------

def test_syllables_basic():
    sw = syllables(W("a^3 b^-2"), alphabet=[A, B])
    assert [(s.generator, s.exponent) for s in sw] == [(A, 3), (B, -2)]
    assert sw.length == 2


def test_syllables_identity():
    assert syllables(W("")).length == 0


def test_syllables_strict_alphabet():
    with pytest.raises(UnknownGeneratorError):
        syllables(W("a x"), alphabet=[A, B])


@given(letters)
@settings(max_examples=100, deadline=None)
def test_syllable_roundtrip(pairs):
    w = reduce(pairs)
    assert flatten(syllables(w)) == w


def test_component_accessors():
    w = W("a^2 b^-1 a^3")
    assert tuple(w.component(2)) == (B, -1)
    assert tuple(w.component_from_right(1)) == (A, 3)
    assert w.left(2) == W("a^2 b^-1")
    assert w.right(1) == W("a^3")
    assert w.segment(2, 3) == W("b^-1 a^3")


def test_cancellation_syllables():
    assert cancellation_syllables(W("a b"), W("b^-1 a^-1")) == 2
    assert cancellation_syllables(W("a b"), W("b^-1 a")) == 1
    assert cancellation_syllables(W("a b"), W("a b")) == 0
    assert cancellation_syllables(W("a b^2"), W("b^-1 a")) == 0  # merge, not full


# ---------------------------------------------------------------------------
# weight
# ---------------------------------------------------------------------------

LAMBDA = W("y x^-1 y^-1 x^2 y^-1 x^-1 y")


def test_weight_of_longitude_vanishes():
    assert weight(LAMBDA, X) == 0
    assert weight(LAMBDA, Y) == 0


def test_weight_plain_exponent_sum():
    w = W("a[0]^3 a[1]^-1")
    assert weight(w, gen("a", 0)) == 3
    assert weight(w, gen("a", 1)) == -1


def test_weight_under_vbasis():
    basis = HomSpec({
        gen("v", 0): W("a[0]"),
        gen("v", 1): W("a[2] a[1]^-1"),
        gen("v", 2): W("a[2]"),
    })
    assert weight(W("a[2] a[1]^-1"), gen("v", 1), basis) == 1
    assert weight(W("a[2] a[1]^-1"), gen("v", 0), basis) == 0


def test_weight_not_expressible_is_reported():
    basis = HomSpec({gen("v", 0): W("a[0]^2")})
    with pytest.raises(NotMemberError):
        weight(W("a[0]"), gen("v", 0), basis)


@given(letters, letters)
@settings(max_examples=100, deadline=None)
def test_weight_homomorphism(p1, p2):
    u, v = reduce(p1), reduce(p2)
    for t in (A, B, X):
        assert weight(u * v, t) == weight(u, t) + weight(v, t)


# ---------------------------------------------------------------------------
# apply_hom
# ---------------------------------------------------------------------------

def test_apply_hom_identity():
    h = HomSpec.identity([A, B])
    assert apply_hom(h, W("a b")) == W("a b")


def test_apply_hom_expansion():
    h = HomSpec({gen("a", 1): W("b^-1 a b")})
    assert apply_hom(h, W("a[1]^2")) == W("b^-1 a^2 b")


def test_apply_hom_outside_domain():
    h = HomSpec({A: W("a")})
    with pytest.raises(UnknownGeneratorError):
        apply_hom(h, W("b"))


@given(letters, letters)
@settings(max_examples=100, deadline=None)
def test_apply_hom_respects_products(p1, p2):
    h = HomSpec({A: W("x y"), B: W("y^-1"), X: W("x^2")})
    u, v = reduce(p1), reduce(p2)
    assert apply_hom(h, u * v) == apply_hom(h, u) * apply_hom(h, v)


# ---------------------------------------------------------------------------
# Smith normal form / abelianization
# ---------------------------------------------------------------------------

def test_smith_invariants_against_sympy_oracle():
    import random

    from sympy import Matrix
    from sympy.matrices.normalforms import invariant_factors

    rng = random.Random(1)
    for _ in range(60):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 4)
        mat = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
        want = [int(d) for d in invariant_factors(Matrix(mat)) if d != 0]
        assert smith_invariants(mat) == want, mat


def test_abelianize_commutator_relator():
    # <x, y | w x (y w)^-1> with w = x y^-1 x^-1 y
    w = W("x y^-1 x^-1 y")
    relator = w * W("x") * (W("y") * w).inverse()
    inv = abelianize_snf(Presentation([X, Y], [relator]))
    assert inv == AbelianInvariants(1, ())


def test_abelianize_free_group():
    assert abelianize_snf(Presentation([A, B], [])) == AbelianInvariants(2, ())


def test_abelianize_large_entries_exact():
    # huge exponents must not overflow: gcd of the single row is 10^30
    inv = abelianize_snf(Presentation([A, B], [W(f"a^{10**30} b^{2 * 10**30}")]))
    assert inv.free_rank == 1
    assert inv.torsion == (10 ** 30,)


def test_presentation_json_roundtrip():
    p = Presentation([X, Y], [W("x y x^-1 y^-1")])
    assert Presentation.from_json(p.to_json()).relators == p.relators


def test_commutator_convention():
    x, y = W("x"), W("y")
    assert commutator(x, y) == W("x y x^-1 y^-1")
