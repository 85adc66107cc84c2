import numpy as np
import pytest

from tagcorrupt.corrupt import CorruptionEngine, RuleScorer
from tagcorrupt.lexicon import default_lexicon


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def engine(lexicon):
    return CorruptionEngine(RuleScorer(lexicon))


# Template vocabulary.  Chosen so that every generated sentence supports
# all 25 corruption families: a pronoun subject, an agreement auxiliary,
# an adverb, confusion-set adjectives and nouns, a derivational adjective,
# an irregular noun, prepositions, and final punctuation.

SUBJECTS = ("He", "She", "It")
AUXES = ("was", "is")
ADVERBS = ("really", "often", "still")
GERUNDS = ("watching", "learning", "studying", "holding", "keeping", "making", "taking")
CONF_ADJS = ("big", "small", "good", "nice", "happy", "quick", "hot", "cold", "easy", "hard")
DERIV_ADJS = ("friendly", "happy", "strong", "dark", "weak", "kind", "quick")
CONF_NOUNS = ("dog", "cat", "street", "road", "city", "town", "house", "school",
              "teacher", "student", "car", "bus", "book", "letter", "river", "lake")
IRREGULAR_NOUNS = ("children", "men", "women", "people", "mice", "sheep", "teeth")
PREPS = ("near", "in", "of", "under", "behind")


def rich_sentence(rng: np.random.Generator) -> str:
    """A sentence on which every one of the 25 tags is applicable."""
    return (
        f"{rng.choice(SUBJECTS)} {rng.choice(AUXES)} {rng.choice(ADVERBS)} "
        f"{rng.choice(GERUNDS)} a {rng.choice(CONF_ADJS)} {rng.choice(DERIV_ADJS)} "
        f"{rng.choice(CONF_NOUNS)} {rng.choice(PREPS)} the {rng.choice(IRREGULAR_NOUNS)} "
        f"{rng.choice(PREPS)} the {rng.choice(CONF_NOUNS)}."
    )


def rich_sentences(n: int, seed: int = 0) -> list[str]:
    rng = np.random.default_rng(seed)
    return [rich_sentence(rng) for _ in range(n)]


def fuzz_sentence(rng: np.random.Generator) -> str:
    """Shorter varied sentence; the eight deterministic families always apply."""
    subject = rng.choice(("The", "A", "My"))
    out = (
        f"{subject} {rng.choice(CONF_ADJS)} {rng.choice(CONF_NOUNS)} "
        f"{rng.choice(AUXES)} {rng.choice(GERUNDS)} "
        f"the {rng.choice(CONF_NOUNS)} {rng.choice(PREPS)} the {rng.choice(CONF_NOUNS)}"
    )
    if rng.random() < 0.3:
        out += f" {rng.choice(ADVERBS)}"
    return out + rng.choice((".", ".", ".", "!", "?"))


def fuzz_sentences(n: int, seed: int = 0) -> list[str]:
    rng = np.random.default_rng(seed)
    return [fuzz_sentence(rng) for _ in range(n)]
