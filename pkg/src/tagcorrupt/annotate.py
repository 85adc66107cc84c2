"""Span-edit extraction and error-type classification for sentence pairs.

Given a (clean, corrupted) pair, ``annotate_pair`` tokenizes both sides,
computes a minimum-cost token alignment, merges non-match operations into
contiguous span edits, and labels each edit with one of the 25 error tags
via an ordered rule cascade (first match wins, OTHER is the total
fallback).  Applying the returned edits to the clean token sequence
always reconstructs the corrupted token sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lexicon as lx
from .lexicon import Lexicon, default_lexicon
from .tags import ErrorTag

# Alignment costs.
_COST_INDEL = 1.0
_COST_SUB = 1.0
_COST_SUB_CASE = 0.1
_COST_SUB_INFLECTION = 0.3
_COST_TRANSPOSE = 1.0


@dataclass(frozen=True)
class Edit:
    """A span edit on the source token sequence.

    ``src_start == src_end`` means a pure insertion (replacement must be
    non-empty).  ``tag`` is never SELF.
    """

    src_start: int
    src_end: int
    replacement: tuple[str, ...]
    tag: ErrorTag

    def __post_init__(self):
        if not 0 <= self.src_start <= self.src_end:
            raise ValueError(f"bad span [{self.src_start}, {self.src_end})")
        if self.src_start == self.src_end and not self.replacement:
            raise ValueError("empty span with empty replacement")
        if self.tag is ErrorTag.SELF:
            raise ValueError("edits never carry SELF")


# ---------------------------------------------------------------------------
# Tokenization


def tokenize(sentence: str) -> list[str]:
    """Whitespace tokenization with punctuation and clitic detachment.

    Leading/trailing punctuation characters become separate tokens and a
    word-internal apostrophe starts a new token ("I'm" -> ["I", "'m"]).
    """
    tokens: list[str] = []
    for chunk in sentence.split():
        lead: list[str] = []
        trail: list[str] = []
        while chunk and chunk[0] in lx.PUNCT_CHARS:
            lead.append(chunk[0])
            chunk = chunk[1:]
        while chunk and chunk[-1] in lx.PUNCT_CHARS:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            start = 0
            for i in range(1, len(chunk)):
                if chunk[i] == "'":
                    tokens.append(chunk[start:i])
                    start = i
            tokens.append(chunk[start:])
        tokens.extend(reversed(trail))
    return tokens


_NO_SPACE_BEFORE = set(".,;:!?')")


def detokenize(tokens: list[str]) -> str:
    """Inverse of tokenize up to whitespace normalization."""
    out: list[str] = []
    for tok in tokens:
        if out and (tok[0] in _NO_SPACE_BEFORE or tok.startswith("'") or tok.startswith("n't")):
            out[-1] = out[-1] + tok
        elif out and out[-1].endswith("("):
            out[-1] = out[-1] + tok
        else:
            out.append(tok)
    return " ".join(out)


# ---------------------------------------------------------------------------
# Alignment


def _sub_cost(a: str, b: str, lexicon: Lexicon) -> float:
    if a == b:
        return 0.0
    if a.lower() == b.lower():
        return _COST_SUB_CASE
    if lexicon.inflectional_variant(a, b):
        return _COST_SUB_INFLECTION
    return _COST_SUB


def align(src: list[str], tgt: list[str], lexicon: Lexicon | None = None) -> list[tuple[int, int, tuple[str, ...]]]:
    """Minimum-cost alignment returning untagged span edits.

    Operations: match (0), substitution (graded), insertion/deletion (1),
    adjacent transposition (1).  Maximal runs of non-match operations merge
    into contiguous spans, except that punctuation-only operations never
    merge with word operations (so a trailing deleted period stays a
    separate edit).  Ties prefer substitutions over insert+delete, then
    leftmost spans.
    """
    lexicon = lexicon or default_lexicon()
    n, m = len(src), len(tgt)
    INF = float("inf")
    cost = [[INF] * (m + 1) for _ in range(n + 1)]
    # Backpointer op per cell, chosen with tie priority M > T > S > D > I.
    back = [[None] * (m + 1) for _ in range(n + 1)]
    cost[0][0] = 0.0
    for i in range(1, n + 1):
        cost[i][0] = i * _COST_INDEL
        back[i][0] = "D"
    for j in range(1, m + 1):
        cost[0][j] = j * _COST_INDEL
        back[0][j] = "I"
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if src[i - 1] == tgt[j - 1]:
                candidates = [(cost[i - 1][j - 1], "M")]
            else:
                candidates = [
                    (cost[i - 1][j - 1] + _sub_cost(src[i - 1], tgt[j - 1], lexicon), "S"),
                    (cost[i - 1][j] + _COST_INDEL, "D"),
                    (cost[i][j - 1] + _COST_INDEL, "I"),
                ]
            if (
                i >= 2
                and j >= 2
                and src[i - 2].lower() == tgt[j - 1].lower()
                and src[i - 1].lower() == tgt[j - 2].lower()
                and src[i - 2].lower() != src[i - 1].lower()
            ):
                candidates.append((cost[i - 2][j - 2] + _COST_TRANSPOSE, "T"))
            best = INF
            op = None
            for c, o in sorted(candidates, key=lambda x: (x[0], "MTSDI".index(x[1]))):
                if c < best:
                    best, op = c, o
            cost[i][j] = best
            back[i][j] = op

    # Recover the op sequence (reversed), then walk forward.
    ops: list[str] = []
    i, j = n, m
    while i > 0 or j > 0:
        op = back[i][j]
        ops.append(op)
        if op == "M" or op == "S":
            i, j = i - 1, j - 1
        elif op == "D":
            i -= 1
        elif op == "I":
            j -= 1
        else:  # T
            i, j = i - 2, j - 2
    ops.reverse()

    return _merge_ops(ops, src, tgt)


def _merge_ops(ops: list[str], src: list[str], tgt: list[str]) -> list[tuple[int, int, tuple[str, ...]]]:
    spans: list[tuple[int, int, tuple[str, ...]]] = []
    i = j = 0
    run: tuple[int, int, int, int] | None = None  # (si, sj, ti, tj)
    run_punct: bool | None = None

    def flush():
        nonlocal run
        if run is not None:
            si, sj, ti, tj = run
            spans.append((si, sj, tuple(tgt[ti:tj])))
            run = None

    for op in ops:
        if op == "M":
            flush()
            i += 1
            j += 1
            continue
        if op == "D":
            di, dj = 1, 0
        elif op == "I":
            di, dj = 0, 1
        elif op == "S":
            di, dj = 1, 1
        else:  # T
            di, dj = 2, 2
        touched = src[i : i + di] + tgt[j : j + dj]
        punct_op = all(lx.is_punct_token(t) for t in touched)
        if run is not None and punct_op != run_punct:
            flush()
        if run is None:
            run = (i, i + di, j, j + dj)
            run_punct = punct_op
        else:
            run = (run[0], i + di, run[2], j + dj)
        i += di
        j += dj
    flush()
    return spans


def apply_edits(src: list[str], edits: list[Edit]) -> list[str]:
    """Apply span edits (sorted, non-overlapping) to a token sequence."""
    out: list[str] = []
    pos = 0
    for e in edits:
        out.extend(src[pos : e.src_start])
        out.extend(e.replacement)
        pos = e.src_end
    out.extend(src[pos:])
    return out


# ---------------------------------------------------------------------------
# Classification cascade


_LY_ADJECTIVES = frozenset(a for a in lx.ADJECTIVES if a.endswith("ly"))


def _all_in_class(tokens, cls) -> bool:
    return bool(tokens) and all(t.lower() in cls for t in tokens)


def _closed_class_tag(affected: list[str]) -> ErrorTag | None:
    if _all_in_class(affected, lx.DETERMINERS):
        return ErrorTag.DET
    if _all_in_class(affected, lx.PREPOSITIONS):
        return ErrorTag.PREP
    if _all_in_class(affected, lx.PARTICLES):
        return ErrorTag.PART
    if _all_in_class(affected, lx.CONJUNCTIONS):
        return ErrorTag.CONJ
    if _all_in_class(affected, lx.PRONOUNS):
        return ErrorTag.PRON
    if affected and all(
        t.lower() in lx.ADVERBS
        or (t.lower().endswith("ly") and t.lower() not in _LY_ADJECTIVES)
        for t in affected
    ):
        return ErrorTag.ADV
    return None


def _suffix_pos(token: str, lexicon: Lexicon) -> ErrorTag:
    t = token.lower()
    if t in lx.BE_FORMS or lexicon.is_verb_form(t):
        return ErrorTag.VERB
    if t.endswith(lx.ADJ_SUFFIXES) or t in lexicon.adjectives or t in lexicon.comparatives:
        return ErrorTag.ADJ
    if t.endswith(lx.NOUN_SUFFIXES) or lexicon.is_noun_form(t):
        return ErrorTag.NOUN
    return ErrorTag.NOUN


def _shares_stem(a: str, b: str) -> bool:
    """Same stem with different derivational endings (friendly/friendship)."""
    a, b = a.lower(), b.lower()
    prefix = 0
    for ca, cb in zip(a, b):
        if ca != cb:
            break
        prefix += 1
    if prefix < 4:
        return False
    rest_a, rest_b = a[prefix:], b[prefix:]
    suffixes = set(lx.DERIVATIONAL_SUFFIXES)
    return rest_a in suffixes and rest_b in suffixes


def _char_edit_distance(a: str, b: str, limit: int = 3) -> int:
    if abs(len(a) - len(b)) > limit:
        return limit + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def classify(src: list[str], span: tuple[int, int, tuple[str, ...]], lexicon: Lexicon | None = None) -> ErrorTag:
    """Label one span edit with an error tag.  Total and deterministic."""
    lexicon = lexicon or default_lexicon()
    start, end, repl = span
    deleted = src[start:end]
    inserted = list(repl)

    # ORTH: case-only difference or whitespace join/split.
    if deleted and inserted:
        if len(deleted) == len(inserted) and all(
            a.lower() == b.lower() for a, b in zip(deleted, inserted)
        ):
            return ErrorTag.ORTH
        if (
            len(deleted) != len(inserted)
            and "".join(deleted).lower() == "".join(inserted).lower()
        ):
            return ErrorTag.ORTH

    # PUNCT: everything touched is punctuation.
    if all(lx.is_punct_token(t) for t in deleted + inserted):
        return ErrorTag.PUNCT

    # CONTR: contraction/expansion substitution, or a dropped/added clitic verb.
    if len(deleted) == 1 and len(inserted) == 1 and lx.is_contraction_pair(deleted[0], inserted[0]):
        return ErrorTag.CONTR
    if not inserted and len(deleted) == 1 and deleted[0].lower() in lx.DROPPABLE_CONTRACTIONS:
        return ErrorTag.CONTR
    if not deleted and len(inserted) == 1 and inserted[0].lower() in lx.DROPPABLE_CONTRACTIONS | {"n't"}:
        return ErrorTag.CONTR

    # NOUN:POSS: 's toggled (the CONTR rules above never claim a bare 's).
    if not deleted and inserted == ["'s"]:
        return ErrorTag.NOUN_POSS
    if not inserted and deleted == ["'s"]:
        return ErrorTag.NOUN_POSS
    if len(deleted) == 1 and len(inserted) == 2 and inserted[1] == "'s" and deleted[0].lower() == inserted[0].lower() + "s":
        return ErrorTag.NOUN_POSS
    if len(deleted) == 2 and len(inserted) == 1 and deleted[1] == "'s" and inserted[0].lower() == deleted[0].lower() + "s":
        return ErrorTag.NOUN_POSS

    # WO: the span is a permutation of itself.
    if (
        len(deleted) >= 2
        and len(deleted) == len(inserted)
        and sorted(t.lower() for t in deleted) == sorted(t.lower() for t in inserted)
        and [t.lower() for t in deleted] != [t.lower() for t in inserted]
    ):
        return ErrorTag.WO

    one_to_one = len(deleted) == 1 and len(inserted) == 1
    if one_to_one:
        s_tok, t_tok = deleted[0], inserted[0]
        s_low, t_low = s_tok.lower(), t_tok.lower()

        # NOUN:INFL / VERB:INFL: over-regularized irregular word.
        if not lexicon.known(t_low):
            if t_low in lexicon.noun_misinflections(s_low):
                return ErrorTag.NOUN_INFL
            if t_low in lexicon.verb_misinflections(s_low):
                return ErrorTag.VERB_INFL

        # NOUN:NUM: regular plural toggled on a noun.
        if lexicon.noun_plural.get(s_low) == t_low and s_low not in lexicon.irregular_nouns:
            return ErrorTag.NOUN_NUM
        if lexicon.noun_plural.get(t_low) == s_low and t_low not in lexicon.irregular_nouns:
            return ErrorTag.NOUN_NUM

        # VERB:SVA: agreement-pair swap, or singular -s toggled on a verb.
        if lx.AGREEMENT_PARTNER.get(s_low) == t_low:
            return ErrorTag.VERB_SVA
        for shorter, longer in ((s_low, t_low), (t_low, s_low)):
            entry = lexicon.form_to_verb.get(shorter)
            if entry and entry[1] == "base" and lx.third_person(shorter) == longer:
                return ErrorTag.VERB_SVA

        # VERB:TENSE: tense-pair swap of the same verb.
        if lx.BE_PRESENT_OF.get(s_low) == t_low or lx.BE_PAST_OF.get(s_low) == t_low:
            return ErrorTag.VERB_TENSE
        es, et = lexicon.form_to_verb.get(s_low), lexicon.form_to_verb.get(t_low)
        if es and et and es[0] == et[0]:
            slots = {es[1], et[1]}
            if "past" in slots and slots & {"base", "third"}:
                return ErrorTag.VERB_TENSE
            # VERB:FORM: any other form swap of the same verb.
            if es[1] != et[1]:
                return ErrorTag.VERB_FORM
        if s_low in lx.BE_FORMS and t_low in lx.BE_FORMS:
            return ErrorTag.VERB_FORM

    # ADJ:FORM: comparative/superlative malformation.
    if inserted:
        has_degree = any(t.lower() in ("more", "most") for t in inserted)
        has_graded = any(
            t.lower() in lexicon.comparatives
            or t.lower() in lx.SUPERLATIVE_WORDS
            or (t.lower().endswith(("er", "est")) and t.lower() not in lexicon.words)
            for t in inserted
        )
        if has_degree and has_graded and len(inserted) > len(deleted):
            return ErrorTag.ADJ_FORM
    if one_to_one and not lexicon.known(inserted[0]):
        t_low = inserted[0].lower()
        for suf in ("est", "er"):
            if t_low.endswith(suf):
                stem = t_low[: -len(suf)]
                if stem in lexicon.adjectives or stem.rstrip(stem[-1:]) in lexicon.adjectives:
                    return ErrorTag.ADJ_FORM

    # Closed-class membership: replacement tokens if any, else the deletion.
    affected = inserted if inserted else deleted
    closed = _closed_class_tag(affected)
    if closed is not None:
        return closed

    if one_to_one:
        s_tok, t_tok = deleted[0], inserted[0]
        s_low, t_low = s_tok.lower(), t_tok.lower()

        # MORPH: same stem, different derivational suffix, real words.
        if lexicon.known(t_low) and s_low != t_low and _shares_stem(s_low, t_low):
            return ErrorTag.MORPH
        if t_low in lx.DERIVATIONS.get(s_low, ()) or s_low in lx.DERIVATIONS.get(t_low, ()):
            return ErrorTag.MORPH

        # SPELL: near-miss of a lexicon word that is itself out-of-lexicon.
        if (
            not lexicon.known(t_low)
            and lexicon.known(s_low)
            and _char_edit_distance(t_low, s_low, 2) <= 2
        ):
            return ErrorTag.SPELL

        # Open-class substitution by POS heuristic on the source token.
        return _suffix_pos(s_tok, lexicon)

    # UNK: a deleted span with no recoverable structure.
    if deleted and not inserted:
        return ErrorTag.UNK

    return ErrorTag.OTHER


def annotate_pair(clean: str, corrupted: str, lexicon: Lexicon | None = None) -> list[Edit]:
    """Extract classified edits transforming ``clean`` into ``corrupted``."""
    lexicon = lexicon or default_lexicon()
    src = tokenize(clean)
    tgt = tokenize(corrupted)
    spans = align(src, tgt, lexicon)
    return [Edit(s, e, repl, classify(src, (s, e, repl), lexicon)) for s, e, repl in spans]
