"""Corpus-level orchestration behind the CLI.

Reads one sentence per line, filters over-long sentences, assigns a tag
per sentence with the configured method, corrupts each sentence under
its tag, and writes ``corrupted<TAB>clean`` pairs (GEC training
orientation).  Per-sentence RNG streams are derived from
(global seed, sentence index) so any worker count produces byte-identical
output.  Sentences whose corruption stays infeasible after the online
redraw budget are dropped and recorded in the skip log.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .annotate import annotate_pair, tokenize
from .assign import ScoreMatrix, assign_offline_optimal, assign_offline_prob
from .constrain import ConstraintMode, accepts, build_constraint, constrained_decode
from .corrupt import MIN_SCORE, CorruptionEngine, ExternalScorer, RuleScorer, sample_candidates
from .errors import EmptyCorpus, Infeasible, MalformedLine
from .lexicon import default_lexicon
from .tags import (
    ERROR_TAGS,
    ErrorTag,
    TagDistribution,
    estimate_distribution,
    load_distribution,
    save_distribution,
    tv_distance,
)

METHODS = ("online", "offline-optimal", "offline-prob")
CONDITIONINGS = ("direct", "nosigma", "postsigma", "prepostsigma")
ONLINE_REDRAWS = 5


@dataclass(frozen=True)
class JobConfig:
    input_path: str
    output_path: str
    method: str = "online"
    conditioning: str = "direct"
    decode: str = "beam"
    beam_size: int = 4
    temperature: float = 1.0
    seed: int = 13
    max_words: int = 250
    dist_path: str | None = None
    lexicon_path: str | None = None
    scorer: str = "rule"
    workers: int = 1
    swap: bool = False
    skip_log_path: str | None = None
    score_cache_path: str | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.conditioning not in CONDITIONINGS:
            raise ValueError(f"conditioning must be one of {CONDITIONINGS}")
        if self.decode not in ("beam", "sample"):
            raise ValueError("decode must be beam or sample")

    @property
    def skip_log(self) -> str:
        return self.skip_log_path or self.output_path + ".skipped"


@dataclass
class GenerationStats:
    """Corruption-model call accounting for the complexity audit."""

    decode_calls: int = 0
    matrix_score_calls: int = 0
    skipped: list[tuple[int, str]] = field(default_factory=list)
    written: int = 0


def make_engine(lexicon_path=None, scorer_spec: str = "rule") -> CorruptionEngine:
    lexicon = default_lexicon(lexicon_path)
    if scorer_spec == "rule":
        return CorruptionEngine(RuleScorer(lexicon))
    if scorer_spec.startswith("external:"):
        return CorruptionEngine(ExternalScorer(scorer_spec[len("external:"):], lexicon))
    raise ValueError(f"unknown scorer spec: {scorer_spec!r} (use 'rule' or 'external:<command>')")


def sentence_rng(seed: int, index: int, salt: int = 0) -> np.random.Generator:
    """Deterministic per-sentence stream derived from the global seed."""
    return np.random.default_rng([seed, index, salt])


# ---------------------------------------------------------------------------
# Single-sentence corruption under one conditioning mode.


def corrupt_under(
    engine: CorruptionEngine,
    tokens: tuple[str, ...],
    tag: ErrorTag,
    conditioning: str,
    decode: str,
    beam_size: int,
    temperature: float,
    rng: np.random.Generator | None,
):
    if conditioning == "direct":
        return engine.decode(tokens, tag, mode=decode, beam_size=beam_size, temperature=temperature, rng=rng)
    fst = build_constraint(tag, ConstraintMode(conditioning))
    if decode == "beam":
        return constrained_decode(tokens, fst, beam_size=beam_size, scorer=engine.scorer)
    candidates = [c for c in engine.propose(tokens, tag) if accepts(fst, c.tag_sequence())]
    if not candidates:
        raise Infeasible(f"no {tag.value} corruption satisfies the constraint")
    return sample_candidates(candidates, temperature, rng if rng is not None else np.random.default_rng())


# Workers run these with a process-local engine built by the initializer.
_ENGINE: CorruptionEngine | None = None


def _init_worker(lexicon_path, scorer_spec):
    global _ENGINE
    _ENGINE = make_engine(lexicon_path, scorer_spec)


def _online_task(args):
    idx, text, tag_value, cfg = args
    tokens = tuple(tokenize(text))
    tag = ErrorTag(tag_value)
    rng = sentence_rng(cfg["seed"], idx)
    calls = 0
    for _attempt in range(1 + ONLINE_REDRAWS):
        calls += 1
        try:
            cand = corrupt_under(
                _ENGINE, tokens, tag, cfg["conditioning"], cfg["decode"],
                cfg["beam_size"], cfg["temperature"], rng,
            )
            return idx, cand.text(), calls
        except Infeasible:
            cdf = np.cumsum([cfg["dist"][t.value] for t in ERROR_TAGS])
            cdf /= cdf[-1]
            pick = int(min(np.searchsorted(cdf, rng.random(), side="right"), len(ERROR_TAGS) - 1))
            tag = ERROR_TAGS[pick]
    return idx, None, calls


def _matrix_row_task(args):
    idx, text, cfg = args
    tokens = tuple(tokenize(text))
    row = np.full(len(ERROR_TAGS), MIN_SCORE, dtype=float)
    texts: list[str | None] = [None] * len(ERROR_TAGS)
    calls = 0
    for j, tag in enumerate(ERROR_TAGS):
        rng = sentence_rng(cfg["seed"], idx, salt=j + 1) if cfg["decode"] == "sample" else None
        calls += 1
        try:
            cand = corrupt_under(
                _ENGINE, tokens, tag, cfg["conditioning"], cfg["decode"],
                cfg["beam_size"], cfg["temperature"], rng,
            )
            row[j] = cand.log_prob
            texts[j] = cand.text()
        except Infeasible:
            pass
    return idx, row, texts, calls


def _map_ordered(task, items, workers: int, lexicon_path, scorer_spec):
    if workers <= 1:
        _init_worker(lexicon_path, scorer_spec)
        return [task(item) for item in items]
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(lexicon_path, scorer_spec)
    ) as pool:
        chunk = max(1, len(items) // (workers * 8) or 1)
        return list(pool.map(task, items, chunksize=chunk))


# ---------------------------------------------------------------------------
# Corpus generation.


def _read_corpus(cfg: JobConfig, stats: GenerationStats) -> list[tuple[int, str]]:
    retained = []
    with open(cfg.input_path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            text = raw.rstrip("\r\n")
            if not text.strip():
                stats.skipped.append((line_no, "empty"))
                continue
            if len(text.split()) > cfg.max_words:
                stats.skipped.append((line_no, "too_long"))
                continue
            retained.append((line_no, text))
    return retained


# Sentences processed per worker-pool round in online streaming mode.
STREAM_CHUNK = 512


def _cfg_map(cfg: JobConfig, dist: TagDistribution) -> dict:
    return {
        "seed": cfg.seed,
        "conditioning": cfg.conditioning,
        "decode": cfg.decode,
        "beam_size": cfg.beam_size,
        "temperature": cfg.temperature,
        "dist": {t.value: dist[t] for t in ERROR_TAGS},
    }


def stream_online(cfg: JobConfig, dist: TagDistribution, stats: GenerationStats):
    """Yield (corrupted, clean) rows holding only one chunk in memory.

    Tags are drawn from the method RNG in input order while reading, so
    the draw stream is identical for any worker count; redraws after an
    infeasible corruption come from the per-sentence RNG instead.
    """
    cfg_map = _cfg_map(cfg, dist)
    method_rng = np.random.default_rng(cfg.seed)
    cdf = np.cumsum([dist[t] for t in ERROR_TAGS])
    cdf /= cdf[-1]

    def chunks():
        buffer = []
        idx = 0
        with open(cfg.input_path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, 1):
                text = raw.rstrip("\r\n")
                if not text.strip():
                    stats.skipped.append((line_no, "empty"))
                    continue
                if len(text.split()) > cfg.max_words:
                    stats.skipped.append((line_no, "too_long"))
                    continue
                pick = int(min(np.searchsorted(cdf, method_rng.random(), side="right"), len(ERROR_TAGS) - 1))
                buffer.append((idx, line_no, text, ERROR_TAGS[pick].value))
                idx += 1
                if len(buffer) >= STREAM_CHUNK:
                    yield buffer
                    buffer = []
        if buffer:
            yield buffer

    pool = None
    try:
        if cfg.workers > 1:
            pool = ProcessPoolExecutor(
                max_workers=cfg.workers,
                initializer=_init_worker,
                initargs=(cfg.lexicon_path, cfg.scorer),
            )
        else:
            _init_worker(cfg.lexicon_path, cfg.scorer)
        seen = 0
        for chunk in chunks():
            seen += len(chunk)
            items = [(idx, text, tag, cfg_map) for idx, _line_no, text, tag in chunk]
            if pool is None:
                results = [_online_task(item) for item in items]
            else:
                results = list(pool.map(_online_task, items, chunksize=max(1, len(items) // (cfg.workers * 4))))
            for (idx, line_no, text, _tag), (_i, corrupted, calls) in zip(chunk, results):
                stats.decode_calls += calls
                if corrupted is None:
                    stats.skipped.append((line_no, "infeasible"))
                else:
                    stats.written += 1
                    yield corrupted, text
        if seen == 0:
            raise EmptyCorpus(f"{cfg.input_path}: no usable sentences")
    finally:
        if pool is not None:
            pool.shutdown()


def run_generation(cfg: JobConfig, dist: TagDistribution) -> tuple[list[tuple[str, str]], GenerationStats]:
    """Produce (corrupted, clean) rows for the whole corpus.

    Returns the rows in input order plus call-count statistics: the
    online method costs one decode per sentence (plus bounded redraws on
    infeasibility); both offline methods cost exactly N * |T| scoring
    decodes to populate the score matrix.
    """
    stats = GenerationStats()
    if cfg.method == "online":
        rows = list(stream_online(cfg, dist, stats))
        return rows, stats

    retained = _read_corpus(cfg, stats)
    if not retained:
        raise EmptyCorpus(f"{cfg.input_path}: no usable sentences")
    cfg_map = _cfg_map(cfg, dist)
    n = len(retained)

    # Offline methods: populate (or load) the score matrix, then assign.
    matrix, texts = _build_matrix(cfg, retained, cfg_map, stats)

    row_ok = matrix.feasible_mask().any(axis=1)
    feasible_rows = [i for i in range(n) if row_ok[i]]
    for i in range(n):
        if not row_ok[i]:
            stats.skipped.append((retained[i][0], "infeasible"))
    if not feasible_rows:
        raise EmptyCorpus("no sentence has any feasible corruption")
    sub = ScoreMatrix(matrix.scores[feasible_rows])

    if cfg.method == "offline-optimal":
        assignment = assign_offline_optimal(sub, dist)
        picks = [(feasible_rows[k], assignment.tags[k]) for k in range(len(feasible_rows))]
    else:
        assignment = assign_offline_prob(sub, dist, len(feasible_rows), np.random.default_rng(cfg.seed))
        picks = [
            (feasible_rows[assignment.indices[k]], assignment.tags[k])
            for k in range(len(feasible_rows))
        ]
        picks.sort(key=lambda p: p[0])  # keep output in input order

    rows = []
    for sentence_idx, tag in picks:
        j = ERROR_TAGS.index(tag)
        corrupted = texts[sentence_idx][j]
        if corrupted is None:  # score-cache hit: decode only the chosen cell
            corrupted = _decode_cell(cfg, retained[sentence_idx][1], sentence_idx, j, cfg_map)
            stats.decode_calls += 1
        rows.append((corrupted, retained[sentence_idx][1]))
    stats.written = len(rows)
    return rows, stats


def _build_matrix(cfg: JobConfig, retained, cfg_map, stats: GenerationStats):
    n = len(retained)
    cache = Path(cfg.score_cache_path) if cfg.score_cache_path else None
    if cache and cache.exists():
        matrix = ScoreMatrix.load(cache)
        if matrix.n_sentences != n or matrix.n_tags != len(ERROR_TAGS):
            raise ValueError(f"{cache}: cache shape {matrix.scores.shape} does not match corpus")
        texts: list[list[str | None]] = [[None] * len(ERROR_TAGS) for _ in range(n)]
        return matrix, texts

    items = [(i, text, cfg_map) for i, (_line_no, text) in enumerate(retained)]
    results = _map_ordered(_matrix_row_task, items, cfg.workers, cfg.lexicon_path, cfg.scorer)
    scores = np.full((n, len(ERROR_TAGS)), MIN_SCORE, dtype=float)
    texts = [[None] * len(ERROR_TAGS) for _ in range(n)]
    for idx, row, row_texts, calls in results:
        scores[idx] = row
        texts[idx] = row_texts
        stats.matrix_score_calls += calls
    matrix = ScoreMatrix(scores)
    if cache:
        matrix.save(cache)
    return matrix, texts


def _decode_cell(cfg: JobConfig, text: str, idx: int, tag_index: int, cfg_map) -> str:
    if _ENGINE is None:
        _init_worker(cfg.lexicon_path, cfg.scorer)
    tokens = tuple(tokenize(text))
    rng = sentence_rng(cfg.seed, idx, salt=tag_index + 1) if cfg.decode == "sample" else None
    cand = corrupt_under(
        _ENGINE, tokens, ERROR_TAGS[tag_index], cfg.conditioning, cfg.decode,
        cfg.beam_size, cfg.temperature, rng,
    )
    return cand.text()


# ---------------------------------------------------------------------------
# CLI operations.


def cmd_corrupt(cfg: JobConfig) -> GenerationStats:
    if cfg.dist_path:
        dist = load_distribution(cfg.dist_path)
    else:
        dist = TagDistribution.uniform()
    if cfg.method == "online":
        stats = GenerationStats()
        rows = stream_online(cfg, dist, stats)
    else:
        rows, stats = run_generation(cfg, dist)
    with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
        for corrupted, clean in rows:
            if cfg.swap:
                corrupted, clean = clean, corrupted
            fh.write(f"{corrupted}\t{clean}\n")
    with open(cfg.skip_log, "w", encoding="utf-8", newline="\n") as fh:
        for line_no, reason in sorted(stats.skipped):
            fh.write(f"{line_no}\t{reason}\n")
    print(
        f"corrupt: wrote {stats.written} pairs to {cfg.output_path} "
        f"({len(stats.skipped)} skipped, method={cfg.method})",
        file=sys.stderr,
    )
    return stats


def read_pairs(path, swap: bool = False) -> list[tuple[str, str]]:
    """Read a TSV pair file; raises MalformedLine with a 1-based number."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise MalformedLine(line_no, "expected two TAB-separated fields")
            left, _, right = line.partition("\t")
            pairs.append((right, left) if swap else (left, right))
    return pairs


def _annotate_task(args):
    src, tgt = args
    lexicon = _ENGINE.lexicon if _ENGINE is not None else default_lexicon()
    return annotate_pair(src, tgt, lexicon)


def annotate_pairs(pairs, lexicon_path=None, workers: int = 1):
    """Annotate (clean, corrupted) pairs, optionally over a worker pool."""
    return _map_ordered(_annotate_task, list(pairs), workers, lexicon_path, "rule")


def cmd_estimate(pairs_path, output_path=None, lexicon_path=None, plot_path=None, workers: int = 1) -> TagDistribution:
    """Estimate a tag distribution from a `clean<TAB>corrupted` pair file."""
    pairs = read_pairs(pairs_path)
    edit_lists = annotate_pairs(pairs, lexicon_path, workers)
    annotated = [(src, tgt, edits) for (src, tgt), edits in zip(pairs, edit_lists)]
    dist = estimate_distribution(annotated)

    counts = {t: 0 for t in ERROR_TAGS}
    total = 0
    for _src, _tgt, edits in annotated:
        for edit in edits:
            counts[edit.tag] += 1
            total += 1
    print(f"estimate: {total} edits over {len(pairs)} pairs", file=sys.stderr)
    for t in ERROR_TAGS:
        if counts[t]:
            print(f"  {t.value}\t{counts[t]}", file=sys.stderr)

    if output_path:
        save_distribution(dist, output_path)
    else:
        print(json.dumps({t.value: dist[t] for t in ERROR_TAGS}, indent=2, sort_keys=True))
    if plot_path:
        from .report import render_distribution_figure

        render_distribution_figure({"estimated": dist}, plot_path)
    return dist


def cmd_annotate(pairs_path, output_path=None, lexicon_path=None, workers: int = 1) -> int:
    """Write JSONL edit records for a `clean<TAB>corrupted` pair file."""
    pairs = read_pairs(pairs_path)
    edit_lists = annotate_pairs(pairs, lexicon_path, workers)
    out = open(output_path, "w", encoding="utf-8", newline="\n") if output_path else sys.stdout
    try:
        for (src, tgt), edits in zip(pairs, edit_lists):
            record = {
                "source": src,
                "target": tgt,
                "edits": [
                    {
                        "start": e.src_start,
                        "end": e.src_end,
                        "replacement": " ".join(e.replacement),
                        "tag": e.tag.value,
                    }
                    for e in edits
                ],
            }
            out.write(json.dumps(record, ensure_ascii=False) + "\n")
    finally:
        if output_path:
            out.close()
    return len(pairs)


@dataclass
class EvalReport:
    observed: TagDistribution
    target: TagDistribution
    tv: float
    tolerance: float
    n_pairs: int
    n_edits: int

    @property
    def passed(self) -> bool:
        return self.tv <= self.tolerance


def cmd_evaldist(
    pairs_path,
    dist_path,
    tolerance: float = 0.05,
    swap: bool = False,
    lexicon_path=None,
    plot_path=None,
    out=None,
    workers: int = 1,
) -> EvalReport:
    """Compare a generated corpus' tag frequencies against a target.

    The pair file uses cmd_corrupt orientation (`corrupted<TAB>clean`);
    pass swap=True for `clean<TAB>corrupted`.  Prints a per-tag delimited
    report and the total variation distance; the CLI exits nonzero when
    the distance exceeds the tolerance.
    """
    out = out or sys.stdout
    target = load_distribution(dist_path)
    pairs = read_pairs(pairs_path, swap=swap)
    if not pairs:
        raise EmptyCorpus(f"{pairs_path}: no pairs")

    counts = {t: 0 for t in ERROR_TAGS}
    total = 0
    edit_lists = annotate_pairs([(clean, corrupted) for corrupted, clean in pairs], lexicon_path, workers)
    for edits in edit_lists:
        for edit in edits:
            counts[edit.tag] += 1
            total += 1
    if total == 0:
        raise EmptyCorpus("no edits observed in the corpus")
    observed = TagDistribution({t: counts[t] / total for t in ERROR_TAGS})
    tv = tv_distance(observed, target)

    out.write("tag\tobserved\ttarget\n")
    for t in ERROR_TAGS:
        out.write(f"{t.value}\t{observed[t]:.6f}\t{target[t]:.6f}\n")
    out.write(f"tv_distance\t{tv:.6f}\t(tolerance {tolerance})\n")

    if plot_path:
        from .report import render_distribution_figure

        render_distribution_figure({"observed": observed, "target": target}, plot_path)
    return EvalReport(observed, target, tv, tolerance, len(pairs), total)
