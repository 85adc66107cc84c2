import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tagcorrupt.annotate import (
    Edit,
    align,
    annotate_pair,
    apply_edits,
    classify,
    detokenize,
    tokenize,
)
from tagcorrupt.tags import ERROR_TAGS, ErrorTag

from conftest import fuzz_sentences


# ---------------------------------------------------------------------------
# tokenize / detokenize


def test_tokenize_sheep_sentence():
    assert tokenize("There were a lot of sheep.") == ["There", "were", "a", "lot", "of", "sheep", "."]


def test_tokenize_apostrophe_splits_before():
    assert tokenize("I'm learning") == ["I", "'m", "learning"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_wrapping_punctuation():
    assert tokenize('(He said "yes"!)') == ["(", "He", "said", '"', "yes", '"', "!", ")"]


@pytest.mark.parametrize(
    "text",
    [
        "There were a lot of sheep.",
        "I'm learning a lot and the students are very friendly.",
        "He said it was the teacher's dog!",
        "Was it here, or there?",
    ],
)
def test_detokenize_round_trip(text):
    assert detokenize(tokenize(text)) == text


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=80))
@settings(max_examples=200)
def test_tokenize_token_shape(text):
    for token in tokenize(text):
        assert token
        assert not any(ch.isspace() for ch in token)


@given(st.text(alphabet="abc ABC.,!?'() ", max_size=60))
@settings(max_examples=200)
def test_tokenize_detokenize_fixed_point(text):
    tokens = tokenize(text)
    assert tokenize(detokenize(tokens)) == tokens


# ---------------------------------------------------------------------------
# align


def brute_force_cost(src, tgt, lexicon, sub_cost):
    """Exhaustive minimum alignment cost (for short sequences only)."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(src) and j == len(tgt):
            return 0.0
        best = float("inf")
        if i < len(src) and j < len(tgt):
            step = 0.0 if src[i] == tgt[j] else sub_cost(src[i], tgt[j])
            best = min(best, step + go(i + 1, j + 1))
        if i < len(src):
            best = min(best, 1.0 + go(i + 1, j))
        if j < len(tgt):
            best = min(best, 1.0 + go(i, j + 1))
        if (
            i + 1 < len(src)
            and j + 1 < len(tgt)
            and src[i].lower() == tgt[j + 1].lower()
            and src[i + 1].lower() == tgt[j].lower()
            and src[i].lower() != src[i + 1].lower()
        ):
            best = min(best, 1.0 + go(i + 2, j + 2))
        return best

    return go(0, 0)


def edits_cost(src, spans, lexicon, sub_cost):
    """Recompute the cost of returned spans via their own best sub-alignment."""
    total = 0.0
    for start, end, repl in spans:
        total += brute_force_cost(tuple(src[start:end]), tuple(repl), lexicon, sub_cost)
    return total


def test_align_sva_single_span(lexicon):
    spans = align(tokenize("There were a lot of sheep."), tokenize("There was a lot of sheep."), lexicon)
    assert spans == [(1, 2, ("was",))]


def test_align_identity_empty(lexicon):
    toks = tokenize("There were a lot of sheep.")
    assert align(toks, toks, lexicon) == []


def test_align_transposition(lexicon):
    assert align(["a", "b", "c"], ["a", "c", "b"], lexicon) == [(1, 3, ("c", "b"))]


def test_align_cost_matches_brute_force(lexicon):
    def sub_cost(a, b):
        if a.lower() == b.lower():
            return 0.1
        if lexicon.inflectional_variant(a, b):
            return 0.3
        return 1.0

    vocab = ["the", "a", "dog", "dogs", "was", "were", "big", "Big", "lake", ".", "cat"]
    rng = np.random.default_rng(42)
    for _ in range(200):
        src = [vocab[i] for i in rng.integers(0, len(vocab), rng.integers(0, 8))]
        tgt = [vocab[i] for i in rng.integers(0, len(vocab), rng.integers(0, 8))]
        spans = align(src, tgt, lexicon)
        got = edits_cost(src, spans, lexicon, sub_cost)
        want = brute_force_cost(tuple(src), tuple(tgt), lexicon, sub_cost)
        assert got <= want + 1e-9, (src, tgt, spans)


# ---------------------------------------------------------------------------
# classify


def test_classify_table_rows(lexicon):
    src = tokenize("There were a lot of sheep.")
    assert classify(src, (5, 6, ("sheeps",)), lexicon) is ErrorTag.NOUN_INFL
    assert classify(src, (6, 7, ()), lexicon) is ErrorTag.PUNCT
    assert classify(src, (2, 4, ("alot",)), lexicon) is ErrorTag.ORTH


def test_classify_deterministic(lexicon):
    src = tokenize("The dog was here.")
    span = (1, 2, ("dogs",))
    assert classify(src, span, lexicon) is classify(src, span, lexicon)


def test_classify_total_on_arbitrary_spans(lexicon):
    src = tokenize("The quick dog was watching the lake.")
    for span in [(0, 3, ("xyzzy",)), (2, 2, ("qqq", "zzz")), (0, 7, ())]:
        assert classify(src, span, lexicon) in ERROR_TAGS


def test_classify_morph_requires_derivational_remainders(lexicon):
    src = tokenize("The dog was very friendly.")
    assert classify(src, (4, 5, ("friendship",)), lexicon) is ErrorTag.MORPH
    # A shared 4-char prefix alone is not derivational morphology.
    src2 = tokenize("A bottle was here.")
    assert classify(src2, (1, 2, ("bottom",)), lexicon) is not ErrorTag.MORPH


def test_classify_ly_adjectives_are_not_adverbs(lexicon):
    src = tokenize("The dog was very friendly.")
    assert classify(src, (4, 5, ()), lexicon) is ErrorTag.UNK
    src2 = tokenize("He ran quickly.")
    assert classify(src2, (2, 3, ()), lexicon) is ErrorTag.ADV


# ---------------------------------------------------------------------------
# annotate_pair


def test_annotate_pair_sva_row(lexicon):
    edits = annotate_pair("There were a lot of sheep.", "There was a lot of sheep.", lexicon)
    assert len(edits) == 1
    e = edits[0]
    assert (e.src_start, e.src_end, e.replacement, e.tag) == (1, 2, ("was",), ErrorTag.VERB_SVA)


def test_annotate_pair_identity(lexicon):
    s = "There were a lot of sheep."
    assert annotate_pair(s, s, lexicon) == []


def test_annotate_pair_three_edit_composite(lexicon):
    edits = annotate_pair("There were a lot of sheep.", "There was a lot of sheeps", lexicon)
    assert [e.tag for e in edits] == [ErrorTag.VERB_SVA, ErrorTag.NOUN_INFL, ErrorTag.PUNCT]
    starts = [e.src_start for e in edits]
    assert starts == sorted(starts)


def test_edit_invariants():
    with pytest.raises(ValueError):
        Edit(2, 1, (), ErrorTag.DET)
    with pytest.raises(ValueError):
        Edit(1, 1, (), ErrorTag.DET)
    with pytest.raises(ValueError):
        Edit(0, 1, ("x",), ErrorTag.SELF)


@given(
    st.text(alphabet="ab cd. theDog's!", max_size=60),
    st.text(alphabet="ab cd. theDog's!", max_size=60),
)
@settings(max_examples=300)
def test_patch_round_trip_universal(a, b):
    """The returned edits always rebuild the target, for any string pair."""
    edits = annotate_pair(a, b)
    assert apply_edits(tokenize(a), edits) == tokenize(b)


@given(
    st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=40),
    st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=40),
)
@settings(max_examples=150)
def test_annotate_pair_total_on_arbitrary_unicode(a, b):
    for edit in annotate_pair(a, b):
        assert edit.tag in ERROR_TAGS


def test_patch_round_trip_on_fuzz_corpus(lexicon, engine):
    """Applying annotate_pair's edits to the clean side rebuilds the corrupted side."""
    rng = np.random.default_rng(3)
    families = [ErrorTag.PUNCT, ErrorTag.DET, ErrorTag.WO, ErrorTag.NOUN_NUM,
                ErrorTag.CONTR, ErrorTag.ORTH, ErrorTag.VERB_SVA, ErrorTag.NOUN_POSS,
                ErrorTag.SPELL, ErrorTag.UNK, ErrorTag.PREP]
    for clean in fuzz_sentences(120, seed=9):
        tag = families[int(rng.integers(len(families)))]
        candidates = engine.propose(clean, tag, limit=4)
        if not candidates:
            continue
        corrupted = candidates[int(rng.integers(len(candidates)))].text()
        src = tokenize(clean)
        tgt = tokenize(corrupted)
        edits = annotate_pair(clean, corrupted, lexicon)
        assert apply_edits(src, edits) == tgt, (clean, corrupted, edits)
