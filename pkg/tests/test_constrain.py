import re

import numpy as np
import pytest

from tagcorrupt.constrain import (
    ConstraintFst,
    ConstraintMode,
    accepts,
    build_constraint,
    constrained_decode,
)
from tagcorrupt.errors import Infeasible, ReservedTag
from tagcorrupt.tags import ErrorTag

from conftest import fuzz_sentences

SHEEP = "There were a lot of sheep."


def regex_oracle(mode: ConstraintMode, tag: ErrorTag):
    """Mode semantics over single-character encodings of tag sequences."""
    if mode is ConstraintMode.NO_SIGMA:
        pattern = r"s*t[st]*"
    elif mode is ConstraintMode.POST_SIGMA:
        pattern = r"s*t.*"
    else:
        pattern = r".*t.*"
    compiled = re.compile(pattern, re.DOTALL)

    def check(tags):
        encoded = "".join("t" if x is tag else "s" if x is ErrorTag.SELF else "o" for x in tags)
        return bool(compiled.fullmatch(encoded))

    return check


def random_tag_sequences(count, max_len, tag, seed):
    rng = np.random.default_rng(seed)
    # Bias the alphabet toward the constrained tag and SELF so accepting
    # sequences actually occur.
    alphabet = [tag, ErrorTag.SELF, ErrorTag.DET, ErrorTag.WO, tag, ErrorTag.SELF]
    for _ in range(count):
        n = int(rng.integers(0, max_len + 1))
        yield [alphabet[int(i)] for i in rng.integers(0, len(alphabet), n)]


def test_build_constraint_rejects_self():
    with pytest.raises(ReservedTag):
        build_constraint(ErrorTag.SELF, ConstraintMode.NO_SIGMA)


def test_build_constraint_arc_structure():
    fst = build_constraint(ErrorTag.SPELL, ConstraintMode.NO_SIGMA)
    assert fst.arcs == (
        (0, ErrorTag.SELF, 0),
        (0, ErrorTag.SPELL, 1),
        (1, ErrorTag.SELF, 1),
        (1, ErrorTag.SPELL, 1),
    )
    assert fst.finals == frozenset({1})


def test_dump_format():
    fst = build_constraint(ErrorTag.SPELL, ConstraintMode.POST_SIGMA)
    assert fst.dump() == "0\tSELF\t0\n0\tSPELL\t1\n1\tSIGMA\t1\nFINAL:\n1\n"


def test_accepts_examples():
    ns = build_constraint(ErrorTag.SPELL, ConstraintMode.NO_SIGMA)
    assert accepts(ns, [ErrorTag.SELF, ErrorTag.SPELL, ErrorTag.SELF])
    assert not accepts(ns, [ErrorTag.SELF, ErrorTag.DET, ErrorTag.SPELL])
    ps = build_constraint(ErrorTag.SPELL, ConstraintMode.POST_SIGMA)
    assert not accepts(ps, [ErrorTag.DET, ErrorTag.SPELL])
    assert accepts(ps, [ErrorTag.SPELL, ErrorTag.DET])
    pps = build_constraint(ErrorTag.SPELL, ConstraintMode.PRE_POST_SIGMA)
    assert accepts(pps, [ErrorTag.DET, ErrorTag.SPELL, ErrorTag.WO])


def test_empty_sequence_rejected_in_all_modes():
    for mode in ConstraintMode:
        assert not accepts(build_constraint(ErrorTag.SPELL, mode), [])


def test_accepts_agrees_with_regex_oracle():
    for mode in ConstraintMode:
        for tag in (ErrorTag.SPELL, ErrorTag.VERB_SVA):
            fst = build_constraint(tag, mode)
            oracle = regex_oracle(mode, tag)
            for seq in random_tag_sequences(2000, 12, tag, seed=hash((mode.value, tag.value)) % 2**32):
                assert accepts(fst, seq) == oracle(seq), (mode, tag, seq)


def test_mode_nesting():
    tag = ErrorTag.PUNCT
    ns = build_constraint(tag, ConstraintMode.NO_SIGMA)
    ps = build_constraint(tag, ConstraintMode.POST_SIGMA)
    pps = build_constraint(tag, ConstraintMode.PRE_POST_SIGMA)
    for seq in random_tag_sequences(3000, 10, tag, seed=5):
        if accepts(ns, seq):
            assert accepts(ps, seq)
        if accepts(ps, seq):
            assert accepts(pps, seq)


def test_sigma_precedence_is_specific_label_first():
    # A machine where SIGMA and a specific label leave the same state but
    # lead to different states must follow the specific arc.
    fst = ConstraintFst(
        initial=0,
        finals=frozenset({2}),
        arcs=((0, ErrorTag.DET, 1), (0, "SIGMA", 2)),
    )
    assert fst.step(0, ErrorTag.DET) == 1
    assert fst.step(0, ErrorTag.WO) == 2


# ---------------------------------------------------------------------------
# constrained decoding


def test_constrained_decode_punct_nosigma(engine):
    fst = build_constraint(ErrorTag.PUNCT, ConstraintMode.NO_SIGMA)
    cand = constrained_decode(SHEEP, fst, beam_size=4, scorer=engine.scorer)
    tags = set(cand.tag_sequence())
    assert tags <= {ErrorTag.PUNCT, ErrorTag.SELF}
    assert ErrorTag.PUNCT in tags
    assert cand.text() == "There were a lot of sheep"


def test_constrained_decode_infeasible_one_token(engine):
    fst = build_constraint(ErrorTag.WO, ConstraintMode.NO_SIGMA)
    with pytest.raises(Infeasible):
        constrained_decode("sheep", fst, beam_size=4, scorer=engine.scorer)


def test_constrained_decode_soundness(engine):
    for clean in fuzz_sentences(30, seed=8):
        for mode in ConstraintMode:
            for tag in (ErrorTag.PUNCT, ErrorTag.DET, ErrorTag.VERB_SVA):
                fst = build_constraint(tag, mode)
                try:
                    cand = constrained_decode(clean, fst, beam_size=4, scorer=engine.scorer)
                except Infeasible:
                    continue
                assert accepts(fst, cand.tag_sequence()), (clean, mode, tag, cand)


def test_constrained_decode_matches_enumeration_oracle(engine):
    """On small sentences the decode equals the best accepted proposal."""
    for clean in ["The dog was here.", "A cat was near the lake.", "He was watching dogs."]:
        for mode in ConstraintMode:
            for tag in (ErrorTag.PUNCT, ErrorTag.DET, ErrorTag.WO, ErrorTag.VERB_SVA, ErrorTag.NOUN_NUM):
                fst = build_constraint(tag, mode)
                candidates = [
                    c for c in engine.propose(clean, tag, limit=64)
                    if accepts(fst, c.tag_sequence())
                ]
                try:
                    got = constrained_decode(clean, fst, beam_size=64, scorer=engine.scorer)
                except Infeasible:
                    assert not candidates
                    continue
                assert candidates, (clean, mode, tag)
                best = max(c.log_prob for c in candidates)
                assert got.log_prob >= best - 1e-9
