"""Error-tag taxonomy, target distributions, quotas and divergence helpers.

The tag set is the 25 coarse error categories used by ERRANT-style
annotation (``VERB:SVA``, ``NOUN:INFL``, ...) plus the reserved ``SELF``
label that marks unmodified spans on edit tapes.  ``SELF`` is never part
of a distribution's domain.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import EmptyCorpus, UnknownTag


class ErrorTag(enum.Enum):
    ADJ = "ADJ"
    ADJ_FORM = "ADJ:FORM"
    ADV = "ADV"
    CONJ = "CONJ"
    CONTR = "CONTR"
    DET = "DET"
    MORPH = "MORPH"
    NOUN = "NOUN"
    NOUN_INFL = "NOUN:INFL"
    NOUN_NUM = "NOUN:NUM"
    NOUN_POSS = "NOUN:POSS"
    ORTH = "ORTH"
    OTHER = "OTHER"
    PART = "PART"
    PREP = "PREP"
    PRON = "PRON"
    PUNCT = "PUNCT"
    SPELL = "SPELL"
    UNK = "UNK"
    VERB = "VERB"
    VERB_FORM = "VERB:FORM"
    VERB_INFL = "VERB:INFL"
    VERB_SVA = "VERB:SVA"
    VERB_TENSE = "VERB:TENSE"
    WO = "WO"
    SELF = "SELF"

    def __str__(self) -> str:
        return self.value


# The 25 error tags in lexical label order; SELF is deliberately excluded.
ERROR_TAGS: tuple[ErrorTag, ...] = tuple(
    sorted((t for t in ErrorTag if t is not ErrorTag.SELF), key=lambda t: t.value)
)
NUM_TAGS = len(ERROR_TAGS)

_BY_LABEL = {t.value: t for t in ErrorTag}
# Historical table label for the unknown/uncorrectable category.
_BY_LABEL["K"] = ErrorTag.UNK


def parse_tag(text: str) -> ErrorTag:
    """Parse a canonical (case-sensitive) tag label.

    Accepts the 25 error labels, ``SELF``, and the alias ``K`` for ``UNK``.
    """
    try:
        return _BY_LABEL[text]
    except KeyError:
        raise UnknownTag(f"unknown tag label: {text!r}") from None


def render_tag(tag: ErrorTag) -> str:
    return tag.value


@dataclass(frozen=True)
class TagDistribution:
    """A probability distribution over the 25 error tags.

    All 25 tags are always present in ``probs``; unobserved tags carry
    probability 0.  The mass must sum to 1 within 1e-9.
    """

    probs: Mapping[ErrorTag, float]

    def __post_init__(self):
        probs = dict(self.probs)
        if set(probs) != set(ERROR_TAGS):
            missing = [t.value for t in ERROR_TAGS if t not in probs]
            extra = [t.value for t in probs if t not in ERROR_TAGS]
            raise ValueError(f"distribution domain mismatch (missing={missing}, extra={extra})")
        for t, p in probs.items():
            if p < 0:
                raise ValueError(f"negative probability for {t.value}: {p}")
        total = math.fsum(probs.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_partial(cls, partial: Mapping[ErrorTag, float]) -> "TagDistribution":
        """Build a distribution from a map that may omit zero-probability tags."""
        probs = {t: float(partial.get(t, 0.0)) for t in ERROR_TAGS}
        return cls(probs)

    @classmethod
    def uniform(cls) -> "TagDistribution":
        return cls({t: 1.0 / NUM_TAGS for t in ERROR_TAGS})

    def __getitem__(self, tag: ErrorTag) -> float:
        return self.probs[tag]

    def items(self):
        return ((t, self.probs[t]) for t in ERROR_TAGS)

    def support(self) -> tuple[ErrorTag, ...]:
        return tuple(t for t in ERROR_TAGS if self.probs[t] > 0)


def estimate_distribution(annotated_pairs: Iterable) -> TagDistribution:
    """Relative tag frequency over all edits in a stream of annotated pairs.

    Each element is a ``(source, target, edits)`` triple where ``edits``
    carry a ``tag`` attribute.  Counting is per edit, not per sentence, so
    multi-error sentences contribute several observations.
    """
    counts = {t: 0 for t in ERROR_TAGS}
    total = 0
    for _source, _target, edits in annotated_pairs:
        for edit in edits:
            counts[edit.tag] += 1
            total += 1
    if total == 0:
        raise EmptyCorpus("no edits observed in the input stream")
    return TagDistribution({t: counts[t] / total for t in ERROR_TAGS})


def target_counts(dist: TagDistribution, n: int) -> dict[ErrorTag, int]:
    """Integer per-tag quotas summing exactly to ``n``.

    Largest-remainder rounding of ``p(t) * n``: every tag gets the floor,
    leftovers go to the largest fractional remainders, ties broken by
    lexical tag order.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    quotas = {}
    remainders = []
    assigned = 0
    for t in ERROR_TAGS:
        exact = dist[t] * n
        base = math.floor(exact)
        quotas[t] = base
        assigned += base
        remainders.append((-(exact - base), t.value, t))
    leftovers = n - assigned
    for _, _, t in sorted(remainders)[:leftovers]:
        quotas[t] += 1
    return quotas


def tv_distance(p: TagDistribution, q: TagDistribution) -> float:
    """Total variation distance, ``0.5 * sum |p(t) - q(t)|``."""
    return 0.5 * math.fsum(abs(p[t] - q[t]) for t in ERROR_TAGS)


def load_distribution(path) -> TagDistribution:
    """Read a tag distribution from a JSON object file.

    The file maps tag labels to floats.  Missing tags read as 0.  If the
    mass sums to within [0.99, 1.01] it is renormalized, otherwise the
    file is rejected.
    """
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: distribution file must be a JSON object")
    partial = {}
    for label, value in raw.items():
        tag = parse_tag(label)
        if tag is ErrorTag.SELF:
            raise ValueError(f"{path}: SELF cannot carry probability mass")
        if not isinstance(value, (int, float)) or value < 0:
            raise ValueError(f"{path}: bad probability for {label}: {value!r}")
        partial[tag] = partial.get(tag, 0.0) + float(value)
    total = math.fsum(partial.values())
    if not 0.99 <= total <= 1.01:
        raise ValueError(f"{path}: probabilities sum to {total:.6f}, outside [0.99, 1.01]")
    return TagDistribution.from_partial({t: v / total for t, v in partial.items()})


def save_distribution(dist: TagDistribution, path) -> None:
    payload = {t.value: dist[t] for t in ERROR_TAGS}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
