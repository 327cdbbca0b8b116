import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mathsearch.formulas import (
    EmptyFormula,
    MalformedLatex,
    canonical_key,
    gram_set,
    key_low64,
    make_formula,
    normalize,
    similarity,
)

# Tokens that survive tokenization unchanged when joined with spaces.
ATOMS = st.sampled_from(
    ["x", "y", "z", "a", "b", "c", "+", "-", "=", "^", "_", "(", ")",
     "1", "7", "12", "365", "\\frac", "\\alpha", "\\sum", "\\sqrt"]
)
TOKEN_SEQS = st.lists(ATOMS, min_size=1, max_size=14).map(tuple)


class TestNormalize:
    def test_frac_tokenization(self):
        assert normalize(r"\frac{a}{b}") == ("\\frac", "{", "a", "}", "{", "b", "}")

    def test_whitespace_insensitive(self):
        assert normalize("x + y") == normalize("x+y") == ("x", "+", "y")
        assert normalize("  x\t+\n y ") == ("x", "+", "y")

    def test_unbalanced_brace_rejected(self):
        with pytest.raises(MalformedLatex):
            normalize("x+{")
        with pytest.raises(MalformedLatex):
            normalize("}x{")

    def test_escaped_braces_are_not_structural(self):
        assert normalize(r"\{x") == ("\\{", "x")

    def test_spacing_commands_dropped(self):
        assert normalize(r"x \, + \; y \quad \left( z \right)") == tuple("x+y(z)")

    def test_empty_rejected(self):
        for s in ("", "   ", r"\,\;\!", r"\quad"):
            with pytest.raises(EmptyFormula):
                normalize(s)

    def test_digit_runs_are_single_tokens(self):
        assert normalize("365 + 12") == ("365", "+", "12")

    def test_multi_letter_runs_split(self):
        assert normalize("ab") == ("a", "b")

    @given(TOKEN_SEQS)
    def test_idempotent_on_serialized_tokens(self, tokens):
        assert normalize(" ".join(tokens)) == tokens

    @given(TOKEN_SEQS, st.integers(0, 2**31))
    def test_extra_whitespace_between_tokens_irrelevant(self, tokens, seed):
        rng = random.Random(seed)
        spaced = "".join(t + " " * rng.randint(1, 4) for t in tokens)
        assert normalize(spaced) == normalize(" ".join(tokens))


class TestCanonicalKey:
    def test_equal_sequences_equal_keys(self):
        assert canonical_key(normalize("x+y")) == canonical_key(normalize("x + y"))

    def test_order_sensitive(self):
        assert canonical_key(normalize("x+y")) != canonical_key(normalize("y+x"))

    def test_stable_across_calls(self):
        tokens = normalize(r"\frac{a}{b} + 12")
        assert canonical_key(tokens) == canonical_key(tokens)

    def test_known_width_and_low64(self):
        key = canonical_key(("x",))
        assert len(key) == 16
        assert 0 <= key_low64(key) < 2**64

    @given(TOKEN_SEQS, TOKEN_SEQS)
    def test_injective_on_distinct_sequences(self, a, b):
        if a == b:
            assert canonical_key(a) == canonical_key(b)
        else:
            assert canonical_key(a) != canonical_key(b)

    def test_empty_rejected(self):
        with pytest.raises(EmptyFormula):
            canonical_key(())


class TestGramSet:
    def test_single_token(self):
        assert gram_set(("x",)) == frozenset({("x",)})

    def test_three_tokens(self):
        got = gram_set(("x", "+", "y"))
        assert got == frozenset(
            {("x",), ("+",), ("y",), ("x", "+"), ("+", "y"), ("x", "+", "y")}
        )
        assert len(got) == 6

    def test_duplicates_collapse(self):
        assert gram_set(("a", "a")) == frozenset({("a",), ("a", "a")})

    def test_redundant_braces_elided(self):
        assert gram_set(normalize("x^{2}")) == gram_set(normalize("x^2"))
        assert gram_set(normalize("{{x}}+y")) == gram_set(normalize("x+y"))

    def test_multi_token_braces_kept(self):
        assert gram_set(normalize("{x+y}")) != gram_set(normalize("x+y"))

    @given(TOKEN_SEQS)
    def test_size_bound(self, tokens):
        assert len(gram_set(tokens)) <= 3 * len(tokens)

    @given(TOKEN_SEQS)
    def test_deterministic(self, tokens):
        assert gram_set(tokens) == gram_set(tuple(tokens))


class TestSimilarity:
    def test_identity(self):
        g = gram_set(normalize(r"\frac{a}{b}"))
        assert similarity(g, g) == 1.0

    def test_disjoint(self):
        assert similarity(gram_set(normalize("x+y")), gram_set(normalize("u-v"))) == 0.0

    def test_hand_enumerated_example(self):
        a = gram_set(normalize("x+y"))
        b = gram_set(normalize("x+z"))
        # shared: (x), (+), (x,+); union: 6 + 6 - 3 = 9
        assert similarity(a, b) == pytest.approx(3 / 9, abs=1e-15)

    @given(TOKEN_SEQS, TOKEN_SEQS)
    def test_symmetric_and_bounded(self, ta, tb):
        a, b = gram_set(ta), gram_set(tb)
        s = similarity(a, b)
        assert s == similarity(b, a)
        assert 0.0 <= s <= 1.0
        assert (s == 1.0) == (a == b)


class TestMakeFormula:
    def test_fields(self):
        f = make_formula(3, "wiki", "x + y")
        assert (f.id, f.source, f.latex) == (3, "wiki", "x + y")
        assert f.tokens == ("x", "+", "y")
        assert f.canonical_key == canonical_key(f.tokens)

    def test_rejects_bad_latex(self):
        with pytest.raises(MalformedLatex):
            make_formula(1, "s", "x}{")
