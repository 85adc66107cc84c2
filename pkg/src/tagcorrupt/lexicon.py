"""Shared word lists, inflection tables and morphology helpers.

Both the annotator's classification cascade and the corruption rule
families read from one Lexicon instance so that a corruption produced
under a tag is classified back to the same tag.  The word list ships as
a plain UTF-8 file (one form per line) and can be replaced via the CLI;
the irregular noun/verb tables ship as TSV data files.
"""

from __future__ import annotations

import functools
from importlib import resources
from pathlib import Path

# ---------------------------------------------------------------------------
# Closed-class vocabulary.  Words deliberately appear in at most one class so
# the classifier's class-membership test is unambiguous.

DETERMINERS = frozenset(
    "a an the this that these those my your his its our their "
    "some any no each every another both either neither".split()
)
PREPOSITIONS = frozenset(
    "of in on at to for with from by about as into through over under "
    "between during against among without within along across behind "
    "beyond near since until upon toward towards inside outside onto "
    "after before".split()
)
PARTICLES = frozenset("up out off down away back".split())
CONJUNCTIONS = frozenset("and but or so because although though while if when unless whereas".split())
PRONOUNS = frozenset(
    "i you he she it we they me him us them someone anyone everyone "
    "something anything everything nothing".split()
)
ADVERBS = frozenset(
    "very really quite too also there here now then today yesterday "
    "tomorrow soon later often always never sometimes usually still just "
    "almost already yet again everywhere somewhere maybe perhaps together well".split()
)

PUNCT_CHARS = set(".,;:!?\"()'")
SENTENCE_PUNCT = (".", "!", "?")


def is_punct_token(token: str) -> bool:
    return bool(token) and all(ch in PUNCT_CHARS or ch == "-" for ch in token)


# ---------------------------------------------------------------------------
# Contractions.  Keys are full forms, values the clitic written after the
# host word ("There" + "'re").  "'s" is never treated as a droppable verb so
# possessive edits stay distinguishable from contraction edits.

CONTRACT_OF = {
    "am": "'m",
    "are": "'re",
    "were": "'re",
    "is": "'s",
    "was": "'s",
    "has": "'s",
    "have": "'ve",
    "had": "'d",
    "will": "'ll",
    "would": "'d",
    "not": "n't",
}
EXPAND_TO = {
    "'m": "am",
    "'re": "are",
    "'ve": "have",
    "'ll": "will",
    "'s": "is",
    "'d": "would",
    "n't": "not",
}
DROPPABLE_CONTRACTIONS = frozenset({"'m", "'re", "'ve", "'ll", "'d"})


def is_contraction_pair(a: str, b: str) -> bool:
    a, b = a.lower(), b.lower()
    return CONTRACT_OF.get(a) == b or CONTRACT_OF.get(b) == a


# ---------------------------------------------------------------------------
# Subject-verb agreement sets and the forms of "be".

AGREEMENT_SETS = ({"is", "are"}, {"was", "were"}, {"has", "have"}, {"does", "do"})
AGREEMENT_PARTNER = {}
for _pair in AGREEMENT_SETS:
    _a, _b = sorted(_pair)
    AGREEMENT_PARTNER[_a] = _b
    AGREEMENT_PARTNER[_b] = _a

BE_PRESENT_OF = {"was": "is", "were": "are"}
BE_PAST_OF = {"is": "was", "are": "were", "am": "was"}
BE_FORMS = {"be", "am", "is", "are", "was", "were", "been", "being"}

# ---------------------------------------------------------------------------
# Open-class vocabulary used by the rule families and the POS heuristics.
# Regular nouns only (irregulars live in the TSV table); no word appears in
# more than one of NOUNS / VERBS / ADJECTIVES.

NOUNS = tuple(
    """lot amount time way day year thing world school state family student group
    country problem hand part place case week company system program question
    government number night point home water room mother area money story fact
    month book eye job word business issue side kind head house friend father
    power hour game line member city community name president team minute idea
    body level office door health art war history party result morning reason
    girl guy moment teacher force education boy age policy process music market
    sense nation college interest car dog cat bird horse tree garden street
    road river mountain beach sea sky sun moon star farm field flower grass
    rain snow wind summer winter spring evening lesson test class letter paper
    picture movie film song table chair window computer phone town shop park
    food breakfast lunch dinner kitchen bedroom bathroom building bridge train
    bus plane boat ticket bag box cup plate bottle key clock wall floor roof
    village island forest lake hill stone rock sand fire air cloud storm
    weather season holiday trip journey hotel station airport library museum
    church hospital doctor nurse driver farmer worker writer artist singer
    player runner baby sister brother uncle aunt cousin neighbor guest customer
    price size shape color sound voice noise meal gift toy ball shirt dress
    shoe hat coat pocket wallet card camera radio newspaper magazine page
    sentence subject object verb noun language country""".split()
)

VERBS = tuple(
    """learn walk talk play watch like want look use call try ask need seem
    help turn start show open close visit study live stay cook clean jump
    laugh listen wait move believe happen remember love hate enjoy finish
    change explain follow carry push pull lift drop pick paint dance cry smile
    travel arrive return agree decide describe discuss expect improve include
    increase introduce invite join miss notice offer prefer prepare promise
    protect receive remain repeat replace reply save search serve share shout
    solve suggest support surprise thank translate wash wish wonder worry add
    allow appear avoid borrow breathe brush burn collect compare complete
    consider contain continue count cover create cross damage deliver depend
    destroy develop disappear discover divide earn employ encourage
    enter escape examine exist fail fill fit fix fold gather greet guess
    handle hope hunt imagine impress insist intend invent knock land last
    lock manage marry measure mention mind mix obtain occur order organize
    pack pass perform plant practice present press prevent produce
    pronounce pump punish record refuse regret relax remind remove rent
    repair rescue rest rub rush scream seal settle shave shift sign slip
    spell stare stretch succeed suffer supply suppose tease tour trade
    treat trust unlock vote wander warn waste wave weigh welcome whisper
    wrap yell""".split()
)

ADJECTIVES = tuple(
    """good bad big small large little long short high low old new young late
    hot cold warm cool happy glad sad easy hard fast quick slow strong weak rich poor
    nice fine great important beautiful friendly busy quiet loud dirty full
    empty heavy dark bright deep wide narrow tall cheap expensive difficult
    simple interesting boring funny serious angry hungry thirsty tired healthy
    sick safe dangerous popular famous modern ancient comfortable careful
    useful useless helpful wonderful terrible lovely pretty ugly clever smart
    stupid brave shy polite rude honest fair true false real wrong ready
    common rare special normal strange perfect main major minor local national
    foreign private public silly gentle wild calm proud lazy noisy windy rainy
    sunny cloudy fresh sweet sour bitter soft rough smooth tight loose thick
    thin flat round square sharp blunt wet dry clear vague""".split()
)

IRREGULAR_COMPARATIVE = {
    "good": ("better", "best"),
    "bad": ("worse", "worst"),
    "little": ("less", "least"),
    "far": ("farther", "farthest"),
    "much": ("more", "most"),
    "many": ("more", "most"),
}
COMPARATIVE_WORDS = frozenset(
    c for c, _ in IRREGULAR_COMPARATIVE.values()
) | frozenset({"more"})
SUPERLATIVE_WORDS = frozenset(s for _, s in IRREGULAR_COMPARATIVE.values()) | frozenset({"most"})

# ---------------------------------------------------------------------------
# Confusion sets for open-class substitution families.

ADJ_CONFUSION = (
    {"big", "large", "great"},
    {"small", "little"},
    {"good", "nice", "fine"},
    {"bad", "poor", "terrible"},
    {"happy", "glad"},
    {"quick", "fast"},
    {"hot", "warm"},
    {"cold", "cool"},
    {"easy", "simple"},
    {"hard", "difficult"},
    {"old", "ancient"},
    {"new", "modern"},
    {"beautiful", "pretty", "lovely"},
    {"smart", "clever"},
)
NOUN_CONFUSION = (
    {"lot", "number", "amount"},
    {"street", "road"},
    {"city", "town", "village"},
    {"house", "home"},
    {"school", "college"},
    {"teacher", "student"},
    {"car", "bus", "train"},
    {"book", "letter", "newspaper"},
    {"day", "night", "morning", "evening"},
    {"summer", "winter", "spring"},
    {"movie", "film"},
    {"dog", "cat"},
    {"sea", "lake", "river"},
)
VERB_CONFUSION = (
    {"go", "come"},
    {"say", "tell"},
    {"see", "look", "watch"},
    {"make", "do"},
    {"take", "give", "bring"},
    {"learn", "study", "teach"},
    {"like", "love", "hate"},
    {"speak", "talk"},
    {"get", "receive"},
    {"keep", "hold"},
    {"start", "begin"},
    {"walk", "run"},
)
# Auxiliary mix-ups ("There had a lot of sheep."): be-form -> have-form.
AUX_CONFUSION = {"was": "had", "were": "had", "is": "has", "are": "have"}

# ---------------------------------------------------------------------------
# Derivational morphology (MORPH family) and suffix heuristics.

DERIVATIONS = {
    "friendly": ("friendship", "friendliness"),
    "happy": ("happiness",),
    "beautiful": ("beauty",),
    "strong": ("strength",),
    "different": ("difference",),
    "important": ("importance",),
    "difficult": ("difficulty",),
    "dangerous": ("danger",),
    "healthy": ("health",),
    "noisy": ("noise",),
    "windy": ("wind",),
    "rainy": ("rain",),
    "sunny": ("sun",),
    "quick": ("quickness",),
    "kind": ("kindness",),
    "dark": ("darkness",),
    "weak": ("weakness",),
    "sad": ("sadness",),
    "polite": ("politeness",),
    "careful": ("care",),
    "useful": ("use",),
    "helpful": ("help",),
    "teach": ("teacher",),
    "learn": ("learner",),
    "write": ("writer",),
    "play": ("player",),
    "sing": ("singer",),
    "visit": ("visitor",),
    "move": ("movement",),
    "agree": ("agreement",),
    "develop": ("development",),
    "govern": ("government",),
    "educate": ("education",),
}

DERIVATIONAL_SUFFIXES = (
    "ation", "ment", "ness", "ship", "tion", "sion", "able", "ible", "ance",
    "ence", "hood", "less", "ful", "ous", "ive", "ish", "ity", "ion", "dom",
    "al", "er", "or", "ist", "ly", "y", "ing", "ed", "e", "",
)
NOUN_SUFFIXES = ("ness", "ment", "ship", "tion", "sion", "ity", "ance", "ence", "hood", "dom")
ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish", "less")

# ---------------------------------------------------------------------------
# Orthography: known join/split pairs and paraphrase templates.

ORTH_JOINS = {
    ("a", "lot"): "alot",
    ("in", "to"): "into",
    ("on", "to"): "onto",
    ("may", "be"): "maybe",
    ("every", "one"): "everyone",
    ("some", "times"): "sometimes",
    ("any", "more"): "anymore",
    ("every", "day"): "everyday",
    ("some", "one"): "someone",
    ("all", "ready"): "already",
    ("summer", "time"): "summertime",
    ("every", "thing"): "everything",
    ("home", "work"): "homework",
}
ORTH_SPLITS = {joined: pair for pair, joined in ORTH_JOINS.items()}

PARAPHRASE_TEMPLATES = (
    (("a", "lot", "of"), ("many",)),
    (("a", "lot"), ("much",)),
    (("really",), ("very", "much")),
    (("very",), ("so", "very")),
    (("often",), ("many", "times")),
    (("still",), ("even", "now")),
    (("always",), ("all", "the", "time")),
)

PRONOUN_GROUPS = (
    {"i", "you", "he", "she", "it", "we", "they"},
    {"me", "him", "us", "them"},
)
ADV_GROUPS = (
    {"very", "really", "quite"},
    {"always", "often", "never", "sometimes", "usually"},
    {"here", "there"},
    {"now", "then"},
)
CONJ_GROUPS = ({"and", "but", "or", "so"}, {"because", "although", "while", "if"})
PREP_GROUPS = (
    {"of", "for", "from"},
    {"in", "on", "at"},
    {"to", "into", "toward"},
    {"with", "by"},
    {"over", "under"},
)
PARTICLE_PAIRS = (("of", "off"),)
INSERTABLE_ADVERBS = ("there", "too", "also", "really", "still")
PUNCT_SUBSTITUTES = {".": ("!", "?"), ",": (";", ":"), "!": (".",), "?": (".",), ";": (",",), ":": (",",)}

_VOWELS = set("aeiou")


def pluralize(noun: str) -> str:
    """Regular plural of a noun (irregulars are handled by the table)."""
    if noun.endswith(("s", "x", "z", "ch", "sh")):
        return noun + "es"
    if noun.endswith("y") and len(noun) > 1 and noun[-2] not in _VOWELS:
        return noun[:-1] + "ies"
    return noun + "s"


def _doubles_final(word: str) -> bool:
    return (
        len(word) >= 3
        and word[-1] in "bdgmnprt"
        and word[-2] in _VOWELS
        and word[-3] not in _VOWELS
    )


def third_person(verb: str) -> str:
    if verb.endswith(("s", "x", "z", "ch", "sh")):
        return verb + "es"
    if verb.endswith("y") and len(verb) > 1 and verb[-2] not in _VOWELS:
        return verb[:-1] + "ies"
    return verb + "s"


def past_tense(verb: str) -> str:
    if verb.endswith("e"):
        return verb + "d"
    if verb.endswith("y") and len(verb) > 1 and verb[-2] not in _VOWELS:
        return verb[:-1] + "ied"
    if _doubles_final(verb):
        return verb + verb[-1] + "ed"
    return verb + "ed"


def gerund(verb: str) -> str:
    if verb.endswith("e") and not verb.endswith("ee"):
        return verb[:-1] + "ing"
    if _doubles_final(verb):
        return verb + verb[-1] + "ing"
    return verb + "ing"


def comparative(adj: str) -> str:
    if adj in IRREGULAR_COMPARATIVE:
        return IRREGULAR_COMPARATIVE[adj][0]
    if adj.endswith("e"):
        return adj + "r"
    if adj.endswith("y") and len(adj) > 1 and adj[-2] not in _VOWELS:
        return adj[:-1] + "ier"
    if _doubles_final(adj):
        return adj + adj[-1] + "er"
    return adj + "er"


DATA_DIR = resources.files("tagcorrupt") / "data"
DEFAULT_WORDLIST = Path(str(DATA_DIR / "wordlist.txt"))


class Lexicon:
    """Immutable word knowledge shared by the annotator and the corruptor.

    Loaded once and treated as read-only afterwards; safe to share between
    threads and cheap to ship to worker processes.
    """

    def __init__(self, wordlist_path=None):
        self.words = self._load_words(wordlist_path)
        self.irregular_nouns = self._load_pairs("irregular_nouns.tsv")
        self.irregular_verbs = self._load_verb_table("irregular_verbs.tsv")

        # Noun lookups: singular <-> plural over regulars and irregulars.
        self.noun_plural = {n: pluralize(n) for n in NOUNS}
        self.noun_plural.update(self.irregular_nouns)
        self.noun_singular = {p: s for s, p in self.noun_plural.items()}
        self.irregular_noun_forms = set(self.irregular_nouns) | set(self.irregular_nouns.values())
        self.noun_forms = set(self.noun_plural) | set(self.noun_singular)

        # Verb form table: base -> (third, past, participle, gerund).
        self.verb_forms: dict[str, tuple[str, str, str, str]] = {}
        for base in VERBS:
            self.verb_forms[base] = (third_person(base), past_tense(base), past_tense(base), gerund(base))
        self.verb_forms.update(self.irregular_verbs)
        self.verb_forms["be"] = ("is", "was", "been", "being")

        # Reverse index from any verb form to (base, slot); base maps to itself.
        self.form_to_verb: dict[str, tuple[str, str]] = {}
        for base, (third, past, part, ger) in self.verb_forms.items():
            for form, slot in ((base, "base"), (third, "third"), (past, "past"), (part, "part"), (ger, "ger")):
                self.form_to_verb.setdefault(form, (base, slot))
        for form in ("am", "are", "were"):
            self.form_to_verb[form] = ("be", "third" if form == "are" else "past" if form == "were" else "base")

        self.adjectives = set(ADJECTIVES)
        self.comparatives = {comparative(a) for a in ADJECTIVES} | COMPARATIVE_WORDS

        self.adj_confusion = self._index_groups(ADJ_CONFUSION)
        self.noun_confusion = self._index_groups(NOUN_CONFUSION)
        self.verb_confusion = self._index_groups(VERB_CONFUSION)

    @staticmethod
    def _index_groups(groups) -> dict[str, list[str]]:
        index: dict[str, list[str]] = {}
        for group in groups:
            for w in group:
                index.setdefault(w, []).extend(sorted(group - {w}))
        return index

    @staticmethod
    def _load_words(wordlist_path) -> frozenset[str]:
        path = Path(wordlist_path) if wordlist_path else DEFAULT_WORDLIST
        words = set()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                word = line.strip()
                if word:
                    words.add(word.lower())
        return frozenset(words)

    @staticmethod
    def _load_pairs(name) -> dict[str, str]:
        pairs = {}
        with (DATA_DIR / name).open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                sing, plur = line.split("\t")
                pairs[sing] = plur
        return pairs

    @staticmethod
    def _load_verb_table(name) -> dict[str, tuple[str, str, str, str]]:
        table = {}
        with (DATA_DIR / name).open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                base, third, past, part, ger = line.split("\t")
                table[base] = (third, past, part, ger)
        return table

    # -- membership helpers -------------------------------------------------

    def known(self, token: str) -> bool:
        return token.lower() in self.words

    def is_noun_form(self, token: str) -> bool:
        return token.lower() in self.noun_forms

    def is_verb_form(self, token: str) -> bool:
        t = token.lower()
        return t in self.form_to_verb or t in BE_FORMS

    def is_closed_class(self, token: str) -> bool:
        t = token.lower()
        return any(
            t in cls
            for cls in (DETERMINERS, PREPOSITIONS, PARTICLES, CONJUNCTIONS, PRONOUNS, ADVERBS)
        )

    def is_content_word(self, token: str) -> bool:
        t = token.lower()
        if is_punct_token(token) or token.startswith("'"):
            return False
        if self.is_closed_class(token):
            return False
        if t in BE_FORMS or t in AGREEMENT_PARTNER:
            return False
        return True

    # -- morphology helpers -------------------------------------------------

    @functools.lru_cache(maxsize=65536)
    def inflectional_variant(self, a: str, b: str) -> bool:
        """True when two distinct tokens look like inflections of one lemma."""
        a, b = a.lower(), b.lower()
        if a == b:
            return False
        if a in BE_FORMS and b in BE_FORMS:
            return True
        va = self.form_to_verb.get(a)
        vb = self.form_to_verb.get(b)
        if va and vb and va[0] == vb[0]:
            return True
        if self.noun_plural.get(a) == b or self.noun_plural.get(b) == a:
            return True
        return self._stem(a) == self._stem(b) and self._stem(a) in self.words

    @staticmethod
    def _stem(word: str) -> str:
        for suffix in ("ies", "ing", "ed", "es", "s", "d"):
            if word.endswith(suffix) and len(word) > len(suffix) + 2:
                return word[: -len(suffix)]
        return word

    def noun_misinflections(self, token: str) -> list[str]:
        """Over-regularized forms of an irregular noun ('sheep' -> 'sheeps')."""
        t = token.lower()
        out = []
        if t in self.irregular_nouns:  # singular side
            naive = t + "s"
            if naive != self.irregular_nouns[t]:
                out.append(naive)
        if t in self.irregular_nouns.values():  # plural side
            sing = next(s for s, p in self.irregular_nouns.items() if p == t)
            for naive in (sing + "s", t + "s"):
                if naive != t and naive not in out and not self.known(naive):
                    out.append(naive)
        return [w for w in out if not self.known(w)]

    def verb_misinflections(self, token: str) -> list[str]:
        """Malformed regularizations of a verb form ('went' -> 'goed')."""
        t = token.lower()
        entry = self.form_to_verb.get(t)
        out = []
        if entry:
            base, slot = entry
            if slot in ("past", "part") and base in self.irregular_verbs:
                out.append(base + "ed")
            if slot in ("past", "part") and base.endswith("e"):
                out.append(base + "ed")  # keeps the silent e: "introduceed"
            if slot == "third":
                naive = t[:-1] + "es" if t.endswith("s") and not t.endswith("es") else None
                if naive:
                    out.append(naive)  # "learnes"
        if t == "were" or t == "was":
            out.append("beed")
        seen = []
        for w in out:
            if w != t and not self.known(w) and w not in seen:
                seen.append(w)
        return seen


@functools.lru_cache(maxsize=4)
def default_lexicon(wordlist_path=None) -> Lexicon:
    """Process-wide cached lexicon (keyed by word-list path)."""
    return Lexicon(wordlist_path)
