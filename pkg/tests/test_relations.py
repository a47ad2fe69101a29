import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistops.errors import ValidationError
from twistops.relations import (
    Letter,
    Signature,
    adjoint,
    adjoint_normal,
    format_word,
    monomial_word,
    multiply,
    normal_form,
    parse_word,
    random_word,
    rewrite,
    words_equal,
)

SIGS = [Signature(0, 2), Signature(1, 1), Signature(0, 3), Signature(2, 1), Signature(1, 2)]


def nf(text, m=0, n=2):
    sig = Signature(m, n)
    return normal_form(parse_word(text, sig), sig)


@pytest.mark.parametrize(
    "text, twist, alpha, beta",
    [
        ("s1* s2", {"(1,2)": -1}, [0, 1], [1, 0]),
        ("s1* s1", {}, [0, 0], [0, 0]),
        ("s2 s1", {"(1,2)": -1}, [1, 1], [0, 0]),
        ("s2* s1", {"(1,2)": 1}, [1, 0], [0, 1]),
        ("", {}, [0, 0], [0, 0]),
        ("u12 u12^-1", {}, [0, 0], [0, 0]),
    ],
)
def test_normal_form_examples(text, twist, alpha, beta):
    assert nf(text).to_json() == {"twist": twist, "alpha": alpha, "beta": beta}


def test_identity_flag():
    assert nf("s1* s1").is_identity
    assert not nf("s1 s1*").is_identity


def test_unitary_generator_uses_signed_exponent():
    sig = Signature(1, 1)
    w = normal_form(parse_word("s1* s1* s2", sig), sig)
    assert w.alpha[0] == -2 and w.beta == (0, 0)


@pytest.mark.parametrize(
    "text, expected",
    [("s1 s2", "s2* s1*"), ("u12", "u12^-1"), ("s1* s2", "s2* s1")],
)
def test_adjoint_examples(text, expected):
    assert format_word(adjoint(parse_word(text))) == expected


@pytest.mark.parametrize(
    "a, b, m, n, expected",
    [
        ("s1* s2", "u12^-1 s2 s1*", 0, 2, True),
        ("s1 s1*", "", 1, 1, True),
        ("s1 s1*", "", 0, 2, False),
        ("s1", "s2", 0, 2, False),
    ],
)
def test_words_equal_examples(a, b, m, n, expected):
    sig = Signature(m, n)
    assert words_equal(parse_word(a, sig), parse_word(b, sig), sig) is expected


@pytest.mark.parametrize("bad", ["u21", "u11", "s3", "x1", "s0", "u13"])
def test_parse_rejects(bad):
    with pytest.raises(ValidationError):
        sig = Signature(0, 2)
        normal_form(parse_word(bad, sig), sig)


@pytest.mark.parametrize("text", ["0,0", "-1,2", "a,b", "1"])
def test_bad_signature(text):
    with pytest.raises(ValidationError):
        Signature.parse(text)


def test_large_index_pair_syntax():
    sig = Signature(0, 12)
    w = parse_word("u3,11 s11", sig)
    assert w[0] == Letter(pair=(3, 11))
    assert normal_form(w, sig).twist_dict == {(3, 11): 1}


def test_confluence_random_rule_order():
    rng = random.Random(7)
    for k in range(1000):
        sig = SIGS[k % len(SIGS)]
        w = random_word(sig, rng.randint(0, 10), rng)
        target = normal_form(w, sig)
        assert rewrite(w, sig, random.Random(k)) == target
        assert rewrite(w, sig) == target


word_case = st.tuples(st.sampled_from(SIGS), st.integers(0, 10), st.integers(0, 2**32 - 1))


@settings(max_examples=300, deadline=None)
@given(word_case)
def test_idempotence(case):
    sig, length, seed = case
    w = normal_form(random_word(sig, length, random.Random(seed)), sig)
    assert normal_form(monomial_word(w), sig) == w


@settings(max_examples=300, deadline=None)
@given(word_case)
def test_adjoint_compatibility(case):
    sig, length, seed = case
    w = random_word(sig, length, random.Random(seed))
    assert normal_form(adjoint(w), sig) == adjoint_normal(normal_form(w, sig), sig)


@settings(max_examples=300, deadline=None)
@given(word_case, st.integers(0, 2**32 - 1))
def test_multiplicative(case, seed2):
    sig, length, seed = case
    a = random_word(sig, length, random.Random(seed))
    b = random_word(sig, length, random.Random(seed2))
    assert normal_form(a + b, sig) == multiply(normal_form(a, sig), normal_form(b, sig), sig)


@settings(max_examples=200, deadline=None)
@given(word_case)
def test_format_parse_roundtrip(case):
    sig, length, seed = case
    w = random_word(sig, length, random.Random(seed))
    assert parse_word(format_word(w), sig) == w
