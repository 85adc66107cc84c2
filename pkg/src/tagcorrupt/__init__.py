"""Tag-controlled grammatical-error corpus synthesis.

A library and CLI that corrupts clean sentences under explicit error-type
tags, matches corpus-level tag frequencies to a target distribution
(greedy online sampling, probabilistic offline sampling, or exact
quota-constrained assignment), and annotates parallel sentence pairs with
span-level error tags.
"""

__version__ = "0.1.0"

from .errors import (
    EmptyCorpus,
    EmptySupport,
    Infeasible,
    InfeasibleQuota,
    MalformedLine,
    ReservedTag,
    ScorerProtocolError,
    TagCorruptError,
    UnknownTag,
)
from .tags import ERROR_TAGS, ErrorTag, TagDistribution, parse_tag, target_counts, tv_distance

__all__ = [
    "ERROR_TAGS",
    "ErrorTag",
    "TagDistribution",
    "parse_tag",
    "target_counts",
    "tv_distance",
    "EmptyCorpus",
    "EmptySupport",
    "Infeasible",
    "InfeasibleQuota",
    "MalformedLine",
    "ReservedTag",
    "ScorerProtocolError",
    "TagCorruptError",
    "UnknownTag",
]
