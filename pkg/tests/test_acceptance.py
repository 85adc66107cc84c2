"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from tagcorrupt.annotate import annotate_pair
from tagcorrupt.assign import (
    ScoreMatrix,
    assign_offline_optimal,
    assign_offline_prob,
    assign_online,
)
from tagcorrupt.constrain import ConstraintMode, accepts, build_constraint, constrained_decode
from tagcorrupt.corrupt import MIN_SCORE
from tagcorrupt.errors import Infeasible
from tagcorrupt.pipeline import JobConfig, cmd_corrupt, cmd_evaldist, run_generation
from tagcorrupt.tags import (
    ERROR_TAGS,
    ErrorTag,
    TagDistribution,
    parse_tag,
    target_counts,
    tv_distance,
)

from conftest import fuzz_sentences, rich_sentences


class Reporter:
    def __init__(self, name, budget_s):
        self.name = name
        self.budget = budget_s
        self.start = time.perf_counter()

    def finish(self, ok: bool, detail: str = ""):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if ok else "FAIL"
        print(f"ACCEPTANCE {self.name}: {status} ({elapsed:.1f}s / budget {self.budget}s) {detail}")
        assert ok, f"{self.name}: {detail}"
        assert elapsed < self.budget, f"{self.name} exceeded its {self.budget}s budget ({elapsed:.1f}s)"


def brute_force_best(scores, quotas):
    """Exhaustive optimum over quota-respecting assignments (small N only)."""
    n, t = scores.shape
    best = None
    best_assignments = []
    for combo in itertools.product(range(t), repeat=n):
        counts = [0] * t
        total = 0.0
        ok = True
        for s, j in enumerate(combo):
            if scores[s, j] <= MIN_SCORE / 2:
                ok = False
                break
            counts[j] += 1
            total += scores[s, j]
        if not ok or counts != list(quotas):
            continue
        if best is None or total > best + 1e-12:
            best = total
            best_assignments = [combo]
        elif abs(total - best) <= 1e-12:
            best_assignments.append(combo)
    return best, best_assignments


def full_matrix(active_scores: dict[ErrorTag, list[float]]) -> ScoreMatrix:
    n = len(next(iter(active_scores.values())))
    scores = np.full((n, len(ERROR_TAGS)), MIN_SCORE)
    for tag, col in active_scores.items():
        scores[:, ERROR_TAGS.index(tag)] = col
    return ScoreMatrix(scores)


def test_criterion_1_flow_oracle_equivalence():
    rep = Reporter("1 flow-oracle equivalence", 60)
    rng = np.random.default_rng(101)
    pool = [ErrorTag.ADJ, ErrorTag.DET, ErrorTag.PUNCT, ErrorTag.WO]
    checked = 0
    ok = True
    detail = ""
    while checked < 200:
        n = int(rng.integers(2, 9))
        k = int(rng.integers(2, 5))
        active = pool[:k]
        cols = {}
        for t in active:
            # 1e-3 grid keeps the 1e-6 fixed-point flow costs exact.
            col = -np.round(rng.uniform(0.001, 9.0, n), 3)
            col = np.where(rng.random(n) < 0.2, MIN_SCORE, col)
            cols[t] = col.tolist()
        matrix = full_matrix(cols)
        if not matrix.feasible_mask().any(axis=1).all():
            continue
        counts = {t: 0 for t in active}
        for s in range(n):
            feasible = [t for t in active if matrix.scores[s, ERROR_TAGS.index(t)] > MIN_SCORE / 2]
            counts[feasible[int(rng.integers(len(feasible)))]] += 1
        dist = TagDistribution.from_partial({t: counts[t] / n for t in active})
        quotas = target_counts(dist, n)
        small = matrix.scores[:, [ERROR_TAGS.index(t) for t in active]]
        want, _ = brute_force_best(small, [quotas[t] for t in active])
        if want is None:
            continue
        assignment = assign_offline_optimal(matrix, dist)
        got = assignment.objective
        counts_ok = all(assignment.counts()[t] == quotas[t] for t in active)
        if not counts_ok or abs(got - want) > 1e-6:
            ok = False
            detail = f"instance {checked}: got {got}, want {want}, counts_ok={counts_ok}"
            break
        checked += 1
    rep.finish(ok, detail or f"200 instances exact at 1e-6")


def test_criterion_2_flow_example_reproduction():
    rep = Reporter("2 four-sentence quota example", 1)
    sva, wo = ErrorTag.VERB_SVA, ErrorTag.WO
    matrix = full_matrix({
        sva: [-3.0, -0.1, -2.5, -2.8],
        wo: [-0.5, -0.6, -0.4, -0.5],
    })
    dist = TagDistribution.from_partial({sva: 0.25, wo: 0.75})
    quotas = target_counts(dist, 4)
    assert quotas[sva] == 1 and quotas[wo] == 3

    small = matrix.scores[:, [ERROR_TAGS.index(sva), ERROR_TAGS.index(wo)]]
    _, optima = brute_force_best(small, [1, 3])
    assert optima == [(1, 0, 1, 1)], "constructed instance must have a unique optimum"

    assignment = assign_offline_optimal(matrix, dist)
    ok = assignment.tags == (wo, sva, wo, wo)
    rep.finish(ok, f"tags={[t.value for t in assignment.tags]}")


def test_criterion_3_fst_regex_oracle():
    import re

    rep = Reporter("3 FST regex-oracle equivalence", 10)
    rng = np.random.default_rng(33)
    tags = [ERROR_TAGS[int(i)] for i in rng.choice(len(ERROR_TAGS), size=5, replace=False)]
    patterns = {
        ConstraintMode.NO_SIGMA: r"s*t[st]*",
        ConstraintMode.POST_SIGMA: r"s*t.*",
        ConstraintMode.PRE_POST_SIGMA: r".*t.*",
    }
    checked = mismatches = 0
    for mode, pattern in patterns.items():
        compiled = re.compile(pattern, re.DOTALL)
        for tag in tags:
            fst = build_constraint(tag, mode)
            others = [t for t in ERROR_TAGS if t is not tag][:3]
            alphabet = [tag, tag, ErrorTag.SELF, ErrorTag.SELF] + others
            lengths = rng.integers(0, 13, size=10_000)
            for n in lengths:
                seq = [alphabet[int(i)] for i in rng.integers(0, len(alphabet), int(n))]
                encoded = "".join("t" if x is tag else "s" if x is ErrorTag.SELF else "o" for x in seq)
                want = bool(compiled.fullmatch(encoded))
                if accepts(fst, seq) != want:
                    mismatches += 1
                checked += 1
    rep.finish(mismatches == 0, f"{checked} sequences, {mismatches} mismatches")


def test_criterion_4_constrained_decode_soundness(engine):
    rep = Reporter("4 constrained-decode soundness", 120)
    rng = np.random.default_rng(44)
    sentences = fuzz_sentences(1000, seed=44)
    successes = violations = 0
    for clean in sentences:
        tag = ERROR_TAGS[int(rng.integers(len(ERROR_TAGS)))]
        for mode in ConstraintMode:
            fst = build_constraint(tag, mode)
            try:
                cand = constrained_decode(clean, fst, beam_size=4, scorer=engine.scorer)
            except Infeasible:
                continue
            successes += 1
            if not accepts(fst, cand.tag_sequence()):
                violations += 1
    rep.finish(
        violations == 0 and successes > 1000,
        f"{successes} successful decodes, {violations} constraint violations",
    )


def test_criterion_5_online_distribution_matching():
    rep = Reporter("5 online distribution matching", 30)
    weights = {t: (i + 1) ** 1.5 for i, t in enumerate(ERROR_TAGS)}
    total = sum(weights.values())
    dist = TagDistribution.from_partial({t: w / total for t, w in weights.items()})
    worst = 0.0
    for seed in range(5):
        assignment = assign_online(dist, 100_000, np.random.default_rng(seed))
        counts = assignment.counts()
        observed = TagDistribution.from_partial({t: counts[t] / 100_000 for t in ERROR_TAGS})
        worst = max(worst, tv_distance(observed, dist))
    rep.finish(worst < 0.01, f"worst tv over 5 seeds = {worst:.4f}")


def test_criterion_6_offline_probabilistic():
    rep = Reporter("6 offline-probabilistic correctness", 60)
    # (a) tag marginal matches the target distribution.
    rng = np.random.default_rng(66)
    n = 50
    cols = {t: (-rng.uniform(0.05, 6.0, n)).tolist() for t in ERROR_TAGS}
    matrix = full_matrix(cols)
    weights = {t: (i % 7) + 1 for i, t in enumerate(ERROR_TAGS)}
    total = sum(weights.values())
    dist = TagDistribution.from_partial({t: w / total for t, w in weights.items()})
    assignment = assign_offline_prob(matrix, dist, 100_000, np.random.default_rng(6))
    counts = assignment.counts()
    observed = TagDistribution.from_partial({t: counts[t] / 100_000 for t in ERROR_TAGS})
    tv = tv_distance(observed, dist)

    # (b) sentence pick rates follow softmax(-1, -2, -3).
    pool = full_matrix({ErrorTag.DET: [-1.0, -2.0, -3.0]})
    det_only = TagDistribution.from_partial({ErrorTag.DET: 1.0})
    picks = assign_offline_prob(pool, det_only, 1_000_000, np.random.default_rng(7))
    freq = np.bincount(picks.indices, minlength=3) / 1_000_000
    z = math.exp(-1) + math.exp(-2) + math.exp(-3)
    want = np.array([math.exp(-1), math.exp(-2), math.exp(-3)]) / z
    max_err = float(np.max(np.abs(freq - want)))
    rep.finish(
        tv < 0.01 and max_err < 0.01,
        f"tag-marginal tv={tv:.4f}, softmax max err={max_err:.4f} (want {want.round(3)})",
    )


TABLE_ROWS = {
    "VERB:SVA": "There was a lot of sheep.",
    "NOUN:INFL": "There were a lot of sheeps.",
    "PUNCT": "There were a lot of sheep",
    "WO": "There were a lot sheep of.",
    "CONTR": "There're a lot of sheep.",
    "NOUN:POSS": "There were a lot of sheep's.",
    "NOUN:NUM": "There were a lots of sheep.",
    "ORTH": "There were alot of sheep.",
}


def test_criterion_7_table_reproduction(engine):
    rep = Reporter("7 corruption-table reproduction", 1)
    clean = "There were a lot of sheep."
    got = {}
    for label, want in TABLE_ROWS.items():
        got[label] = engine.decode(clean, parse_tag(label), mode="beam").text()
    exact = sum(got[label] == want for label, want in TABLE_ROWS.items())
    rep.finish(exact == 8, f"{exact}/8 exact row matches")


DETERMINISTIC_FAMILIES = [
    ErrorTag.PUNCT, ErrorTag.NOUN_NUM, ErrorTag.NOUN_POSS, ErrorTag.VERB_SVA,
    ErrorTag.CONTR, ErrorTag.ORTH, ErrorTag.WO, ErrorTag.DET,
]


def test_criterion_8_round_trip(engine, lexicon):
    rep = Reporter("8 corrupt/annotate round-trip", 120)
    sentences = fuzz_sentences(1000, seed=88)
    feasible = recovered = 0
    for clean in sentences:
        for tag in DETERMINISTIC_FAMILIES:
            try:
                cand = engine.decode(clean, tag, mode="beam")
            except Infeasible:
                continue
            feasible += 1
            tags = {e.tag for e in annotate_pair(clean, cand.text(), lexicon)}
            recovered += tag in tags
    rate = recovered / feasible if feasible else 0.0
    rep.finish(
        feasible >= 7000 and rate >= 0.95,
        f"{recovered}/{feasible} recovered ({rate:.3f})",
    )


def test_criterion_9_complexity_audit(tmp_path):
    rep = Reporter("9 complexity audit", 30)
    sentences = rich_sentences(100, seed=99)
    src = tmp_path / "clean.txt"
    src.write_text("".join(s + "\n" for s in sentences))
    uniform = TagDistribution.uniform()

    results = {}
    for method in ("online", "offline-optimal", "offline-prob"):
        cfg = JobConfig(input_path=str(src), output_path="unused", method=method, seed=9)
        _rows, stats = run_generation(cfg, uniform)
        results[method] = (stats.decode_calls, stats.matrix_score_calls)

    ok = (
        results["online"] == (100, 0)
        and results["offline-optimal"] == (0, 2500)
        and results["offline-prob"] == (0, 2500)
    )
    rep.finish(ok, f"calls={results}")


def test_criterion_10_end_to_end(tmp_path):
    rep = Reporter("10 end-to-end determinism and closed loop", 300)
    sentences = rich_sentences(10_000, seed=1010)
    src = tmp_path / "clean.txt"
    src.write_text("".join(s + "\n" for s in sentences))
    dist_path = tmp_path / "dist.json"
    dist_path.write_text(json.dumps({
        "PUNCT": 0.20, "DET": 0.15, "VERB:SVA": 0.15, "NOUN:NUM": 0.10,
        "NOUN:POSS": 0.10, "CONTR": 0.10, "ORTH": 0.10, "WO": 0.10,
    }))

    outputs = {}
    for workers in (1, 8):
        out = tmp_path / f"online.w{workers}.tsv"
        cfg = JobConfig(
            input_path=str(src), output_path=str(out), method="online",
            decode="sample", seed=4242, dist_path=str(dist_path), workers=workers,
        )
        cmd_corrupt(cfg)
        outputs[workers] = out.read_bytes()
    identical = outputs[1] == outputs[8]

    tvs = {}
    report = cmd_evaldist(str(tmp_path / "online.w1.tsv"), str(dist_path), tolerance=0.05, workers=8)
    tvs["online"] = report.tv
    for method in ("offline-optimal", "offline-prob"):
        out = tmp_path / f"{method}.tsv"
        cfg = JobConfig(
            input_path=str(src), output_path=str(out), method=method,
            seed=4242, dist_path=str(dist_path), workers=8,
        )
        cmd_corrupt(cfg)
        report = cmd_evaldist(str(out), str(dist_path), tolerance=0.05, workers=8)
        tvs[method] = report.tv

    ok = identical and all(tv <= 0.05 for tv in tvs.values())
    rep.finish(
        ok,
        f"workers byte-identical={identical}, tv={{{', '.join(f'{k}: {v:.4f}' for k, v in tvs.items())}}}",
    )
