"""The three tag-assignment methods that match a corpus to a distribution.

* ``assign_online``: i.i.d. tag draws from the target distribution; no
  corruption-model scores needed; Theta(N).
* ``assign_offline_optimal``: maximize the total corruption log-probability
  subject to exact per-tag quotas, solved as min-cost flow.
* ``assign_offline_prob``: draw a tag from the target distribution, then a
  sentence with probability proportional to its corruption score for that
  tag (with replacement, so sentences may repeat or be left out).

Scores live in a dense N x |T| matrix with a large negative sentinel for
infeasible (sentence, tag) pairs; both offline methods require the full
matrix, which is why they cost N*|T| corruption-model calls.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corrupt import MIN_SCORE
from .errors import EmptySupport, InfeasibleQuota
from .flow import reduced_costs_nonnegative, solve_quota_assignment
from .tags import ERROR_TAGS, ErrorTag, TagDistribution, target_counts

# Fixed-point resolution for integer flow costs, in log-prob units.
COST_SCALE = 1e6

_MAGIC = b"TCSM\x01"


@dataclass
class ScoreMatrix:
    """Dense log P(y_t,n | t, x_n) matrix over (sentence, tag) pairs.

    Columns follow ``ERROR_TAGS`` order.  Entries at or below MIN_SCORE
    mark infeasible pairs and are excluded from every computation.
    """

    scores: np.ndarray

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.ndim != 2:
            raise ValueError("score matrix must be 2-D")
        finite = self.feasible_mask()
        if np.any(self.scores[finite] > 0):
            raise ValueError("log-probabilities must be <= 0")

    @property
    def n_sentences(self) -> int:
        return self.scores.shape[0]

    @property
    def n_tags(self) -> int:
        return self.scores.shape[1]

    def feasible_mask(self) -> np.ndarray:
        return self.scores > MIN_SCORE / 2

    def save(self, path) -> None:
        """Binary cache: magic, N, |T| header then row-major float64."""
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<QQ", self.n_sentences, self.n_tags))
            fh.write(np.ascontiguousarray(self.scores, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "ScoreMatrix":
        raw = Path(path).read_bytes()
        if raw[: len(_MAGIC)] != _MAGIC:
            raise ValueError(f"{path}: not a score-matrix cache file")
        n, t = struct.unpack_from("<QQ", raw, len(_MAGIC))
        offset = len(_MAGIC) + 16
        expected = n * t * 8
        if len(raw) - offset != expected:
            raise ValueError(f"{path}: truncated score-matrix cache")
        scores = np.frombuffer(raw[offset:], dtype="<f8").reshape(n, t).astype(np.float64)
        return cls(scores)


@dataclass(frozen=True)
class Assignment:
    """Chosen tag per output sentence, plus how the choice was made.

    ``indices`` maps each output slot to a source-sentence index; it is a
    straight 0..N-1 range except for the probabilistic method, which
    samples with replacement.
    """

    tags: tuple[ErrorTag, ...]
    indices: tuple[int, ...]
    method: str
    objective: float | None = None

    def __post_init__(self):
        if any(t is ErrorTag.SELF for t in self.tags):
            raise ValueError("assignments never contain SELF")
        if len(self.tags) != len(self.indices):
            raise ValueError("tags and indices length mismatch")

    def counts(self) -> dict[ErrorTag, int]:
        out = {t: 0 for t in ERROR_TAGS}
        for t in self.tags:
            out[t] += 1
        return out


def _distribution_cdf(dist: TagDistribution) -> np.ndarray:
    probs = np.array([dist[t] for t in ERROR_TAGS])
    cdf = np.cumsum(probs)
    # Pin the last edge to exactly 1 so a uniform draw can never fall past
    # the final nonzero interval onto a zero-probability tag.
    cdf /= cdf[-1]
    return cdf


def assign_online(dist: TagDistribution, n: int, rng: np.random.Generator) -> Assignment:
    """n i.i.d. draws from the target distribution; consumes exactly n draws."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cdf = _distribution_cdf(dist)
    draws = rng.random(n)
    picks = np.searchsorted(cdf, draws, side="right")
    picks = np.minimum(picks, len(ERROR_TAGS) - 1)
    tags = tuple(ERROR_TAGS[int(i)] for i in picks)
    return Assignment(tags=tags, indices=tuple(range(n)), method="online")


def assign_offline_optimal(matrix: ScoreMatrix, dist: TagDistribution) -> Assignment:
    """Quota-exact assignment maximizing the total corruption score.

    Builds the bipartite flow instance (sentences -> tags -> sink with
    per-tag capacities from largest-remainder quotas), solves it exactly,
    and verifies the reduced-cost optimality certificate.
    """
    n = matrix.n_sentences
    quotas_map = target_counts(dist, n)
    quotas = np.array([quotas_map[t] for t in ERROR_TAGS])

    feasible = matrix.feasible_mask()
    starved_upfront = [
        t for j, t in enumerate(ERROR_TAGS) if quotas[j] > int(feasible[:, j].sum())
    ]
    if starved_upfront:
        raise InfeasibleQuota(starved_upfront)

    costs = np.where(feasible, np.round(-matrix.scores * COST_SCALE), np.inf)
    solution = solve_quota_assignment(costs, quotas)
    if not reduced_costs_nonnegative(costs, solution):
        raise RuntimeError("flow solution failed its optimality certificate")

    objective = float(matrix.scores[np.arange(n), solution.assignment].sum())
    tags = tuple(ERROR_TAGS[int(j)] for j in solution.assignment)
    return Assignment(tags=tags, indices=tuple(range(n)), method="offline-optimal", objective=objective)


def posterior_tag(matrix: ScoreMatrix, n: int, tag: ErrorTag) -> float:
    """P(t | x, y) under uniform tag priors: exp(score) / |T|."""
    j = ERROR_TAGS.index(tag)
    score = matrix.scores[n, j]
    if score <= MIN_SCORE / 2:
        return 0.0
    return float(np.exp(score)) / matrix.n_tags


def assign_offline_prob(
    matrix: ScoreMatrix, dist: TagDistribution, n_out: int, rng: np.random.Generator
) -> Assignment:
    """Tag from the target distribution, then a sentence by softmax score.

    Sampling is with replacement: the output may repeat source sentences
    and is not guaranteed to cover the pool.
    """
    if n_out < 1:
        raise ValueError("n_out must be >= 1")
    feasible = matrix.feasible_mask()
    weights = np.where(feasible, np.exp(matrix.scores), 0.0)
    support = dist.support()
    for t in support:
        j = ERROR_TAGS.index(t)
        if weights[:, j].sum() <= 0:
            raise EmptySupport(f"no sentence has a finite score for {t.value}")

    tag_cdf = _distribution_cdf(dist)
    tag_picks = np.minimum(
        np.searchsorted(tag_cdf, rng.random(n_out), side="right"), len(ERROR_TAGS) - 1
    )
    sent_draws = rng.random(n_out)
    indices = np.empty(n_out, dtype=int)
    for j in np.unique(tag_picks):
        mask = tag_picks == j
        col = weights[:, j]
        cdf = np.cumsum(col)
        cdf /= cdf[-1]
        indices[mask] = np.minimum(
            np.searchsorted(cdf, sent_draws[mask], side="right"), matrix.n_sentences - 1
        )
    tags = tuple(ERROR_TAGS[int(j)] for j in tag_picks)
    return Assignment(tags=tags, indices=tuple(int(i) for i in indices), method="offline-prob")
