"""Tagged corruption engine.

``propose`` enumerates scored corruption candidates for a (sentence, tag)
pair as edit-tuple sequences; ``decode`` picks one by beam rank or by
softmax sampling; ``score_target`` scores an arbitrary target sentence
under a tag.  The built-in RuleScorer is deterministic and factorizes
over edit operations; an ExternalScorer subprocess can replace it to
score candidates with a real model.
"""

from __future__ import annotations

import json
import math
import shlex
import subprocess
from dataclasses import dataclass, field

import numpy as np

from .annotate import align, classify, detokenize, tokenize
from .errors import Infeasible, ScorerProtocolError, UnknownTag
from .families import MAX_SITES, SpanEdit, enumerate_edits
from .lexicon import Lexicon, default_lexicon
from .tags import ERROR_TAGS, ErrorTag, parse_tag

MIN_SCORE = -1e9

DEFAULT_BEAM_SIZE = 4
DEFAULT_TEMPERATURE = 1.0


@dataclass(frozen=True)
class EditOp:
    """One edit-tape operation: (tag, source span end, replacement).

    The span start is implicit (the previous op's end).  SELF ops copy the
    span unchanged and carry ``replacement=None``.
    """

    tag: ErrorTag
    span_end: int
    replacement: tuple[str, ...] | None = None

    def is_self(self) -> bool:
        return self.tag is ErrorTag.SELF


@dataclass(frozen=True)
class CorruptionCandidate:
    target: tuple[str, ...]
    ops: tuple[EditOp, ...]
    log_prob: float

    def text(self) -> str:
        return detokenize(list(self.target))

    def tag_sequence(self) -> tuple[ErrorTag, ...]:
        return tuple(op.tag for op in self.ops)


def apply_ops(source: tuple[str, ...], ops: tuple[EditOp, ...]) -> tuple[str, ...]:
    out: list[str] = []
    pos = 0
    for op in ops:
        if op.is_self():
            out.extend(source[pos : op.span_end])
        else:
            out.extend(op.replacement)
        pos = op.span_end
    return tuple(out)


def ops_from_edit(source_len: int, edit: SpanEdit, tag: ErrorTag) -> tuple[EditOp, ...]:
    start, end, repl = edit
    ops: list[EditOp] = []
    if start > 0:
        ops.append(EditOp(ErrorTag.SELF, start))
    ops.append(EditOp(tag, end, tuple(repl)))
    if end < source_len:
        ops.append(EditOp(ErrorTag.SELF, source_len))
    return tuple(ops)


def merge_self_ops(ops: list[EditOp]) -> tuple[EditOp, ...]:
    """Collapse adjacent SELF ops into one maximal copied span."""
    merged: list[EditOp] = []
    for op in ops:
        if op.is_self() and merged and merged[-1].is_self():
            merged[-1] = EditOp(ErrorTag.SELF, op.span_end)
        else:
            merged.append(op)
    return tuple(merged)


# ---------------------------------------------------------------------------
# Scorers


class RuleScorer:
    """Deterministic decomposable surrogate for a corruption model.

    SELF ops score 0.  An edit op with tag t at site rank k (out of K
    enumerated sites) scores ``log prior(t) + log p_site(k)`` where the
    site distribution decays geometrically, ``p_site(k) = 2^-k / Z``.
    Geometric decay keeps candidate scores strictly ordered so beam rank,
    softmax sampling and the temperature -> 0 limit all agree.
    """

    def __init__(self, lexicon: Lexicon | None = None, tag_priors=None):
        self.lexicon = lexicon or default_lexicon()
        if tag_priors is None:
            tag_priors = {t: 1.0 / len(ERROR_TAGS) for t in ERROR_TAGS}
        for t, p in tag_priors.items():
            if not 0.0 < p <= 1.0:
                raise ValueError(f"tag prior out of (0, 1] for {t}: {p}")
        self.tag_priors = dict(tag_priors)
        self._edit_cache: dict[tuple[tuple[str, ...], ErrorTag], tuple[SpanEdit, ...]] = {}

    def edits_for(self, source: tuple[str, ...], tag: ErrorTag) -> tuple[SpanEdit, ...]:
        key = (source, tag)
        hit = self._edit_cache.get(key)
        if hit is None:
            if len(self._edit_cache) > 8192:
                self._edit_cache.clear()
            hit = enumerate_edits(source, tag, self.lexicon)
            self._edit_cache[key] = hit
        return hit

    @staticmethod
    def _site_log_prob(rank: int, total: int) -> float:
        z = 2.0 - 2.0 ** (1 - total)
        return rank * math.log(0.5) - math.log(z)

    def score_edit(self, source: tuple[str, ...], edit: SpanEdit, tag: ErrorTag) -> float:
        sites = self.edits_for(source, tag)
        if not sites:
            return MIN_SCORE
        try:
            rank = sites.index(edit)
        except ValueError:
            rank = len(sites)  # off-enumeration edit: one step below the last site
        return math.log(self.tag_priors[tag]) + self._site_log_prob(rank, len(sites))

    def score_op(self, source: tuple[str, ...], prior_ops: tuple[EditOp, ...], op: EditOp) -> float:
        if op.is_self():
            return 0.0
        start = prior_ops[-1].span_end if prior_ops else 0
        return self.score_edit(source, (start, op.span_end, op.replacement), op.tag)

    def score_candidate(self, source: tuple[str, ...], tag: ErrorTag, candidate: CorruptionCandidate) -> float:
        total = 0.0
        prior: list[EditOp] = []
        for op in candidate.ops:
            s = self.score_op(source, tuple(prior), op)
            if s <= MIN_SCORE:
                return MIN_SCORE
            total += s
            prior.append(op)
        return max(total, MIN_SCORE)


class ExternalScorer(RuleScorer):
    """Scores candidates through a line-based subprocess protocol.

    One JSON object per line on stdin: {"source": str, "tag": str,
    "target": str}; one float (natural-log probability) per line on
    stdout.  Candidate generation still comes from the rule families; only
    the scores are replaced.  A non-numeric reply aborts the run.
    """

    def __init__(self, command: str, lexicon: Lexicon | None = None):
        super().__init__(lexicon)
        self.command = command
        self._proc: subprocess.Popen | None = None

    def _process(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                shlex.split(self.command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        return self._proc

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)
        self._proc = None

    def score_candidate(self, source: tuple[str, ...], tag: ErrorTag, candidate: CorruptionCandidate) -> float:
        proc = self._process()
        request = {"source": detokenize(list(source)), "tag": tag.value, "target": candidate.text()}
        try:
            proc.stdin.write(json.dumps(request) + "\n")
            proc.stdin.flush()
            reply = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise ScorerProtocolError(f"scorer subprocess died: {exc}") from exc
        if not reply:
            raise ScorerProtocolError("scorer subprocess closed its output")
        try:
            value = float(reply.strip())
        except ValueError:
            raise ScorerProtocolError(f"non-numeric scorer reply: {reply.strip()!r}") from None
        if not math.isfinite(value):
            raise ScorerProtocolError(f"non-finite scorer reply: {value!r}")
        return min(value, 0.0)


# ---------------------------------------------------------------------------
# Engine


def as_tokens(sentence) -> tuple[str, ...]:
    if isinstance(sentence, str):
        return tuple(tokenize(sentence))
    return tuple(sentence)


@dataclass
class CorruptionEngine:
    """Facade bundling a lexicon and a scorer."""

    scorer: RuleScorer = field(default_factory=RuleScorer)

    @property
    def lexicon(self) -> Lexicon:
        return self.scorer.lexicon

    def propose(self, clean, tag: ErrorTag, limit: int = MAX_SITES) -> list[CorruptionCandidate]:
        """Up to ``limit`` candidates for the tag, best first.

        Every candidate contains exactly one non-SELF op carrying the
        requested tag; an empty list means the tag is inapplicable.
        """
        if limit < 1:
            raise ValueError("limit must be >= 1")
        if tag is ErrorTag.SELF:
            raise UnknownTag("SELF is not a requestable corruption tag")
        source = as_tokens(clean)
        edits = self.scorer.edits_for(source, tag)
        candidates = []
        for edit in edits:
            ops = ops_from_edit(len(source), edit, tag)
            target = apply_ops(source, ops)
            if target == source:
                continue
            cand = CorruptionCandidate(target, ops, 0.0)
            score = self.scorer.score_candidate(source, tag, cand)
            candidates.append(CorruptionCandidate(target, ops, score))
        candidates.sort(key=lambda c: -c.log_prob)
        return candidates[:limit]

    def decode(
        self,
        clean,
        tag: ErrorTag,
        mode: str = "beam",
        beam_size: int = DEFAULT_BEAM_SIZE,
        temperature: float = DEFAULT_TEMPERATURE,
        rng: np.random.Generator | None = None,
    ) -> CorruptionCandidate:
        """Pick one corruption: beam rank 1, or a softmax sample."""
        if beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if mode not in ("beam", "sample"):
            raise ValueError(f"unknown decode mode: {mode!r}")
        candidates = self.propose(clean, tag, limit=MAX_SITES if mode == "sample" else beam_size)
        if not candidates:
            raise Infeasible(f"no {tag.value} corruption applies")
        if mode == "beam":
            return candidates[0]
        if temperature <= 0:
            raise ValueError("temperature must be > 0")
        rng = rng if rng is not None else np.random.default_rng()
        return sample_candidates(candidates, temperature, rng)

    def score_target(self, clean, tag: ErrorTag, target) -> float:
        """Log-probability of reaching ``target`` from ``clean`` under ``tag``.

        Aligns the pair, classifies each span, and sums per-op scores;
        returns MIN_SCORE when no op of the requested tag is present.
        """
        source = as_tokens(clean)
        tgt = as_tokens(target)
        spans = align(list(source), list(tgt), self.lexicon)
        tags = [classify(list(source), span, self.lexicon) for span in spans]
        if tag not in tags:
            return MIN_SCORE
        total = 0.0
        for span, span_tag in zip(spans, tags):
            s = self.scorer.score_edit(source, span, span_tag)
            if s <= MIN_SCORE:
                return MIN_SCORE
            total += s
        return max(total, MIN_SCORE)

    def corrupt_prepend(self, tagged_input: str, **decode_kwargs) -> CorruptionCandidate:
        """Drive corruption from a "<TAG> <sentence>" text line."""
        head, _, rest = tagged_input.partition(" ")
        if not rest.strip():
            raise UnknownTag("expected '<TAG> <sentence>'")
        tag = parse_tag(head)
        if tag is ErrorTag.SELF:
            raise UnknownTag("SELF is not a requestable corruption tag")
        return self.decode(rest.strip(), tag, **decode_kwargs)


def sample_candidates(
    candidates: list[CorruptionCandidate], temperature: float, rng: np.random.Generator
) -> CorruptionCandidate:
    """Draw one candidate with probability proportional to exp(lp / T)."""
    scores = np.array([c.log_prob for c in candidates], dtype=float) / temperature
    scores -= scores.max()
    weights = np.exp(scores)
    weights /= weights.sum()
    idx = int(np.searchsorted(np.cumsum(weights), rng.random(), side="right"))
    return candidates[min(idx, len(candidates) - 1)]
