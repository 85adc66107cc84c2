"""Per-tag corruption rule families.

Each family enumerates candidate span edits for its error tag on a token
sequence, in a fixed deterministic order (the order is the ranking used
by the scorer).  Every returned edit is verified against the classifier
for the intended span, so corruptions generated under a tag annotate
back to the same tag whenever the alignment recovers the span.

Enumeration is capped at 64 edits per tag per sentence.
"""

from __future__ import annotations

from . import lexicon as lx
from .annotate import classify
from .lexicon import Lexicon
from .tags import ErrorTag

MAX_SITES = 64

SpanEdit = tuple[int, int, tuple[str, ...]]


def _match_case(word: str, template: str) -> str:
    if template[:1].isupper() and word[:1].islower():
        return word[0].upper() + word[1:]
    return word


def _alpha(token: str) -> bool:
    return token.isalpha()


def _flip_case(token: str) -> str:
    first = token[0]
    return (first.lower() if first.isupper() else first.upper()) + token[1:]


def _final_word_index(toks: list[str]) -> int:
    """Index of the last non-punctuation token, or -1."""
    for i in range(len(toks) - 1, -1, -1):
        if not lx.is_punct_token(toks[i]):
            return i
    return -1


def _insertion_point(toks: list[str]) -> int:
    """Position just after the last non-punctuation token."""
    return _final_word_index(toks) + 1 if toks else 0


# ---------------------------------------------------------------------------
# Family enumerators.  All take (toks, lexicon) and yield SpanEdit tuples.


def _adj(toks, lex):
    for i, tok in enumerate(toks):
        for partner in lex.adj_confusion.get(tok.lower(), ()):
            yield i, i + 1, (_match_case(partner, tok),)


def _noun(toks, lex):
    for i, tok in enumerate(toks):
        for partner in lex.noun_confusion.get(tok.lower(), ()):
            yield i, i + 1, (_match_case(partner, tok),)


def _verb(toks, lex):
    for i, tok in enumerate(toks):
        low = tok.lower()
        if low in lx.AUX_CONFUSION:
            yield i, i + 1, (_match_case(lx.AUX_CONFUSION[low], tok),)
        entry = lex.form_to_verb.get(low)
        if entry:
            base, slot = entry
            for partner in lex.verb_confusion.get(base, ()):
                form = _verb_form(lex, partner, slot)
                if form and form != low:
                    yield i, i + 1, (_match_case(form, tok),)


def _verb_form(lex, base, slot):
    forms = lex.verb_forms.get(base)
    if not forms:
        return None
    third, past, part, ger = forms
    return {"base": base, "third": third, "past": past, "part": part, "ger": ger}[slot]


def _adj_form(toks, lex):
    for i, tok in enumerate(toks):
        low = tok.lower()
        if low in lex.comparatives:
            yield i, i + 1, ("more", tok)
        elif low in lx.SUPERLATIVE_WORDS:
            yield i, i + 1, ("most", tok)
        elif low in lex.adjectives:
            if low in lx.IRREGULAR_COMPARATIVE:
                naive = low + "er"
                if not lex.known(naive):
                    yield i, i + 1, (_match_case(naive, tok),)
            else:
                yield i, i + 1, ("more", _match_case(lx.comparative(low), tok))


def _adv(toks, lex):
    for i, tok in enumerate(toks):
        low = tok.lower()
        if low in lx.ADVERBS or (low.endswith("ly") and lex.known(low) and low not in lex.adjectives):
            yield i, i + 1, ()
    for group in lx.ADV_GROUPS:
        for i, tok in enumerate(toks):
            if tok.lower() in group:
                for partner in sorted(group - {tok.lower()}):
                    yield i, i + 1, (_match_case(partner, tok),)
    pos = _insertion_point(toks)
    for adv in lx.INSERTABLE_ADVERBS:
        yield pos, pos, (adv,)


def _conj(toks, lex):
    for group in lx.CONJ_GROUPS:
        for i, tok in enumerate(toks):
            if tok.lower() in group:
                for partner in sorted(group - {tok.lower()}):
                    yield i, i + 1, (_match_case(partner, tok),)
    for i, tok in enumerate(toks):
        if tok.lower() in lx.CONJUNCTIONS:
            yield i, i + 1, ()
    yield 0, 0, ("And",)
    for i, tok in enumerate(toks):
        if tok == ",":
            yield i + 1, i + 1, ("and",)


def _contr(toks, lex):
    for i, tok in enumerate(toks):
        low = tok.lower()
        if low in lx.CONTRACT_OF and i > 0 and _alpha(toks[i - 1]):
            yield i, i + 1, (lx.CONTRACT_OF[low],)
    for i, tok in enumerate(toks):
        if tok.lower() in lx.EXPAND_TO:
            yield i, i + 1, (lx.EXPAND_TO[tok.lower()],)
    for i, tok in enumerate(toks):
        if tok.lower() in lx.DROPPABLE_CONTRACTIONS:
            yield i, i + 1, ()


_CORE_DETS = ("a", "an", "the")


def _det(toks, lex):
    for i, tok in enumerate(toks):
        if tok.lower() in _CORE_DETS:
            yield i, i + 1, ()
    for i, tok in enumerate(toks):
        low = tok.lower()
        if low in ("a", "an"):
            yield i, i + 1, (_match_case("the", tok),)
        elif low == "the":
            yield i, i + 1, (_match_case("a", tok),)
    for i, tok in enumerate(toks):
        # Insert before a bare noun: no determiner/adjective/noun attached.
        if lex.is_noun_form(tok) and (
            i == 0
            or not (
                toks[i - 1].lower() in lx.DETERMINERS
                or toks[i - 1].lower() in lex.adjectives
                or toks[i - 1].lower() in lex.noun_forms
            )
        ):
            yield i, i, ("the",)
            yield i, i, ("a",)


def _morph(toks, lex):
    for i, tok in enumerate(toks):
        for variant in lx.DERIVATIONS.get(tok.lower(), ()):
            yield i, i + 1, (_match_case(variant, tok),)


def _noun_infl(toks, lex):
    for i, tok in enumerate(toks):
        for bad in lex.noun_misinflections(tok):
            yield i, i + 1, (_match_case(bad, tok),)


def _verb_infl(toks, lex):
    for i, tok in enumerate(toks):
        for bad in lex.verb_misinflections(tok):
            yield i, i + 1, (_match_case(bad, tok),)


def _noun_num(toks, lex):
    for i, tok in enumerate(toks):
        low = tok.lower()
        if low in lex.noun_plural and low not in lex.irregular_nouns:
            yield i, i + 1, (_match_case(lex.noun_plural[low], tok),)
        elif low in lex.noun_singular and lex.noun_singular[low] not in lex.irregular_nouns:
            yield i, i + 1, (_match_case(lex.noun_singular[low], tok),)


def _noun_poss(toks, lex):
    for i, tok in enumerate(toks):
        if tok == "'s" and i > 0 and lex.is_noun_form(toks[i - 1]):
            yield i, i + 1, ()
    # Possessive attaches to the head noun, so prefer rightmost sites.
    for i in range(len(toks) - 1, -1, -1):
        if lex.is_noun_form(toks[i]) and (i + 1 == len(toks) or toks[i + 1] != "'s"):
            yield i + 1, i + 1, ("'s",)


def _orth(toks, lex):
    for i in range(len(toks) - 1):
        joined = lx.ORTH_JOINS.get((toks[i].lower(), toks[i + 1].lower()))
        if joined:
            yield i, i + 2, (_match_case(joined, toks[i]),)
    for i, tok in enumerate(toks):
        pair = lx.ORTH_SPLITS.get(tok.lower())
        if pair:
            yield i, i + 1, (_match_case(pair[0], tok), pair[1])
    for i, tok in enumerate(toks):
        if _alpha(tok):
            yield i, i + 1, (_flip_case(tok),)


def _other(toks, lex):
    lows = [t.lower() for t in toks]
    for pattern, repl in lx.PARAPHRASE_TEMPLATES:
        k = len(pattern)
        for i in range(len(toks) - k + 1):
            if tuple(lows[i : i + k]) == pattern:
                yield i, i + k, tuple(_match_case(r, toks[i]) if j == 0 else r for j, r in enumerate(repl))


def _part(toks, lex):
    for a, b in lx.PARTICLE_PAIRS:
        for i, tok in enumerate(toks):
            if tok.lower() == a:
                yield i, i + 1, (_match_case(b, tok),)
            elif tok.lower() == b:
                yield i, i + 1, (_match_case(a, tok),)
    for i, tok in enumerate(toks):
        if tok.lower() in lx.PARTICLES:
            yield i, i + 1, ()
    for i, tok in enumerate(toks):
        if lex.is_verb_form(tok) and tok.lower() not in lx.BE_FORMS:
            yield i + 1, i + 1, ("up",)
            break


def _prep(toks, lex):
    for i, tok in enumerate(toks):
        if tok.lower() in lx.PREPOSITIONS:
            yield i, i + 1, ()
    for group in lx.PREP_GROUPS:
        for i, tok in enumerate(toks):
            if tok.lower() in group:
                for partner in sorted(group - {tok.lower()}):
                    yield i, i + 1, (_match_case(partner, tok),)


def _pron(toks, lex):
    for group in lx.PRONOUN_GROUPS:
        for i, tok in enumerate(toks):
            if tok.lower() in group:
                for partner in sorted(group - {tok.lower()}):
                    repl = "I" if partner == "i" else _match_case(partner, tok)
                    yield i, i + 1, (repl,)
    for i, tok in enumerate(toks):
        if tok.lower() in lx.PRONOUNS:
            yield i, i + 1, ()


def _punct(toks, lex):
    for i, tok in enumerate(toks):
        if lx.is_punct_token(tok):
            yield i, i + 1, ()
    for i, tok in enumerate(toks):
        for sub in lx.PUNCT_SUBSTITUTES.get(tok, ()):
            yield i, i + 1, (sub,)
    for i in range(1, len(toks)):
        if not lx.is_punct_token(toks[i - 1]) and not lx.is_punct_token(toks[i]) and toks[i] != "'s":
            yield i, i, (",",)
    if toks and toks[-1] not in lx.SENTENCE_PUNCT:
        yield len(toks), len(toks), (".",)


_SPELL_VOWELS = "aeiou"


def _spell_variants(word: str):
    # adjacent transpositions, vowel deletions, letter doublings
    for i in range(1, len(word) - 1):
        if word[i] != word[i + 1]:
            yield word[:i] + word[i + 1] + word[i] + word[i + 2 :]
    for i in range(1, len(word)):
        if word[i] in _SPELL_VOWELS:
            yield word[:i] + word[i + 1 :]
    for i in range(1, len(word)):
        yield word[: i + 1] + word[i] + word[i + 1 :]


def _spell(toks, lex):
    for i, tok in enumerate(toks):
        low = tok.lower()
        if len(low) < 4 or not _alpha(tok) or not lex.known(low) or not lex.is_content_word(tok):
            continue
        emitted = 0
        seen = set()
        for variant in _spell_variants(low):
            if variant in seen or variant == low or lex.known(variant):
                continue
            if variant == low + "s" or (low.endswith("s") and variant == low[:-1]):
                continue
            seen.add(variant)
            yield i, i + 1, (_match_case(variant, tok),)
            emitted += 1
            if emitted >= 3:
                break


def _unk(toks, lex):
    last = _final_word_index(toks)
    for k in (1, 2, 3):
        start = last - k + 1
        if start <= 0:
            break
        if _final_word_index(toks[:start]) < 0:
            break
        yield start, last + 1, ()


def _verb_form_family(toks, lex):
    for i, tok in enumerate(toks):
        entry = lex.form_to_verb.get(tok.lower())
        if not entry:
            continue
        base, slot = entry
        forms = lex.verb_forms[base]
        third, past, part, ger = forms
        order = {"base": (ger, part), "third": (ger, part), "past": (ger, part), "part": (ger, base), "ger": (part, base)}[slot]
        for target in order:
            if target != tok.lower():
                yield i, i + 1, (_match_case(target, tok),)


def _verb_sva(toks, lex):
    for i, tok in enumerate(toks):
        low = tok.lower()
        if low in lx.AGREEMENT_PARTNER:
            yield i, i + 1, (_match_case(lx.AGREEMENT_PARTNER[low], tok),)
            continue
        entry = lex.form_to_verb.get(low)
        if entry:
            base, slot = entry
            if slot == "base":
                yield i, i + 1, (_match_case(lx.third_person(low), tok),)
            elif slot == "third":
                yield i, i + 1, (_match_case(base, tok),)


def _verb_tense(toks, lex):
    for i, tok in enumerate(toks):
        low = tok.lower()
        if low in lx.BE_PRESENT_OF:
            yield i, i + 1, (_match_case(lx.BE_PRESENT_OF[low], tok),)
            continue
        if low in lx.BE_PAST_OF:
            yield i, i + 1, (_match_case(lx.BE_PAST_OF[low], tok),)
            continue
        entry = lex.form_to_verb.get(low)
        if entry:
            base, slot = entry
            past = lex.verb_forms[base][1]
            if slot in ("base", "third") and past != low:
                yield i, i + 1, (_match_case(past, tok),)
            elif slot == "past" and base != low:
                yield i, i + 1, (_match_case(base, tok),)


def _wo(toks, lex):
    content_pairs = []
    other_pairs = []
    for i in range(len(toks) - 1):
        a, b = toks[i], toks[i + 1]
        if lx.is_punct_token(a) or lx.is_punct_token(b) or a.lower() == b.lower():
            continue
        if a.startswith("'") or b.startswith("'"):
            continue
        bucket = content_pairs if (lex.is_content_word(a) or lex.is_content_word(b)) else other_pairs
        bucket.append(i)
    # Transpositions prefer content words; within a bucket, rightmost first.
    for i in reversed(content_pairs):
        yield i, i + 2, (toks[i + 1], toks[i])
    for i in reversed(other_pairs):
        yield i, i + 2, (toks[i + 1], toks[i])


FAMILIES = {
    ErrorTag.ADJ: _adj,
    ErrorTag.ADJ_FORM: _adj_form,
    ErrorTag.ADV: _adv,
    ErrorTag.CONJ: _conj,
    ErrorTag.CONTR: _contr,
    ErrorTag.DET: _det,
    ErrorTag.MORPH: _morph,
    ErrorTag.NOUN: _noun,
    ErrorTag.NOUN_INFL: _noun_infl,
    ErrorTag.NOUN_NUM: _noun_num,
    ErrorTag.NOUN_POSS: _noun_poss,
    ErrorTag.ORTH: _orth,
    ErrorTag.OTHER: _other,
    ErrorTag.PART: _part,
    ErrorTag.PREP: _prep,
    ErrorTag.PRON: _pron,
    ErrorTag.PUNCT: _punct,
    ErrorTag.SPELL: _spell,
    ErrorTag.UNK: _unk,
    ErrorTag.VERB: _verb,
    ErrorTag.VERB_FORM: _verb_form_family,
    ErrorTag.VERB_INFL: _verb_infl,
    ErrorTag.VERB_SVA: _verb_sva,
    ErrorTag.VERB_TENSE: _verb_tense,
    ErrorTag.WO: _wo,
}


def enumerate_edits(toks: tuple[str, ...], tag: ErrorTag, lexicon: Lexicon) -> tuple[SpanEdit, ...]:
    """Ordered candidate edits for one tag, classifier-verified, capped."""
    toks_list = list(toks)
    out: list[SpanEdit] = []
    seen: set[SpanEdit] = set()
    for start, end, repl in FAMILIES[tag](toks_list, lexicon):
        edit = (start, end, tuple(repl))
        if edit in seen:
            continue
        if list(repl) == toks_list[start:end]:
            continue
        seen.add(edit)
        if classify(toks_list, edit, lexicon) is not tag:
            continue
        out.append(edit)
        if len(out) >= MAX_SITES:
            break
    return tuple(out)
