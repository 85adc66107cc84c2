"""Constraint acceptors over the tag tape and FST-constrained decoding.

Three two-state machine shapes force at least one occurrence of a chosen
tag during edit-sequence decoding:

* NO_SIGMA: only the tag and SELF may appear.
* POST_SIGMA: the hypothesis must start with SELF or the tag; anything
  may follow.  (Applying the constraint from the first step avoids beam
  garden paths that commit to an incompatible corruption early.)
* PRE_POST_SIGMA: anything may appear before and after the tag.

SIGMA arcs match any label, SELF included; a specific-label arc takes
precedence over a SIGMA arc from the same state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .corrupt import (
    CorruptionCandidate,
    EditOp,
    RuleScorer,
    apply_ops,
    merge_self_ops,
    as_tokens,
)
from .errors import Infeasible, ReservedTag
from .tags import ERROR_TAGS, ErrorTag

SIGMA = "SIGMA"

Label = object  # ErrorTag or the SIGMA sentinel
ScoredEdit = tuple  # ((start, end, replacement), log-prob)


class ConstraintMode(enum.Enum):
    NO_SIGMA = "nosigma"
    POST_SIGMA = "postsigma"
    PRE_POST_SIGMA = "prepostsigma"


@dataclass(frozen=True)
class ConstraintFst:
    """Deterministic acceptor over tag labels with SIGMA wildcard arcs."""

    initial: int
    finals: frozenset[int]
    arcs: tuple[tuple[int, Label, int], ...]
    _trans: dict[int, dict[Label, int]] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        trans: dict[int, dict[Label, int]] = {}
        for src, label, dst in self.arcs:
            row = trans.setdefault(src, {})
            if label in row:
                raise ValueError(f"nondeterministic arc from {src} on {label}")
            row[label] = dst
        object.__setattr__(self, "_trans", trans)

    def step(self, state: int, tag: ErrorTag) -> int | None:
        row = self._trans.get(state, {})
        if tag in row:
            return row[tag]
        if SIGMA in row:
            return row[SIGMA]
        return None

    def allowed(self, state: int) -> set[Label]:
        return set(self._trans.get(state, {}))

    def is_final(self, state: int) -> bool:
        return state in self.finals

    def dump(self) -> str:
        """Textual arc list for golden-file tests."""
        lines = []
        for src, label, dst in self.arcs:
            name = label.value if isinstance(label, ErrorTag) else str(label)
            lines.append(f"{src}\t{name}\t{dst}")
        lines.append("FINAL:")
        for state in sorted(self.finals):
            lines.append(str(state))
        return "\n".join(lines) + "\n"


def build_constraint(tag: ErrorTag, mode: ConstraintMode) -> ConstraintFst:
    """The two-state acceptor for one tag in one mode.

    State 0 is initial, state 1 is the only final state, so every accepted
    sequence contains the tag at least once.
    """
    if tag is ErrorTag.SELF:
        raise ReservedTag("constraints are built for error tags, not SELF")
    if mode is ConstraintMode.NO_SIGMA:
        arcs = (
            (0, ErrorTag.SELF, 0),
            (0, tag, 1),
            (1, ErrorTag.SELF, 1),
            (1, tag, 1),
        )
    elif mode is ConstraintMode.POST_SIGMA:
        arcs = ((0, ErrorTag.SELF, 0), (0, tag, 1), (1, SIGMA, 1))
    else:
        arcs = ((0, SIGMA, 0), (0, tag, 1), (1, SIGMA, 1))
    return ConstraintFst(initial=0, finals=frozenset({1}), arcs=arcs)


def accepts(fst: ConstraintFst, tags) -> bool:
    """Standard acceptance; the empty sequence needs a final initial state."""
    state = fst.initial
    for tag in tags:
        state = fst.step(state, tag)
        if state is None:
            return False
    return fst.is_final(state)


def constrained_decode(
    clean,
    fst: ConstraintFst,
    beam_size: int = 4,
    scorer: RuleScorer | None = None,
) -> CorruptionCandidate:
    """Beam search over edit sequences whose tag tape the FST accepts.

    Each hypothesis carries its FST state; ops whose tag has no arc from
    the current state are pruned, and only hypotheses ending in a final
    state complete.  Hypotheses are recombined on (position, FST state,
    pending-insertion) keeping the higher score.  Raises Infeasible when
    no hypothesis reaches a final state, which happens routinely when the
    constrained tag and the sentence are incompatible.
    """
    if beam_size < 1:
        raise ValueError("beam_size must be >= 1")
    scorer = scorer or RuleScorer()
    source = as_tokens(clean)
    n = len(source)

    edits_by_start: dict[int, list[tuple[ErrorTag, ScoredEdit]]] = {}
    for tag in ERROR_TAGS:
        for edit in scorer.edits_for(source, tag):
            score = scorer.score_edit(source, edit, tag)
            edits_by_start.setdefault(edit[0], []).append((tag, (edit, score)))

    # hypothesis: (score, ops, fst_state, just_inserted)
    start_hyp = (0.0, (), fst.initial, False)
    beams: dict[int, dict] = {0: {(fst.initial, False): start_hyp}}
    completed: list[tuple[float, int, tuple[EditOp, ...]]] = []
    order = 0

    for pos in range(n + 1):
        bucket = beams.pop(pos, None)
        if not bucket:
            continue
        hyps = sorted(bucket.values(), key=lambda h: -h[0])[:beam_size]
        # Insertions stay at the same position; allow at most one in a row.
        frontier = list(hyps)
        for score, ops, state, just_inserted in hyps:
            if just_inserted:
                continue
            for tag, (edit, edit_score) in edits_by_start.get(pos, []):
                if edit[1] != pos:  # not an insertion
                    continue
                nxt = fst.step(state, tag)
                if nxt is None:
                    continue
                op = EditOp(tag, edit[1], edit[2])
                frontier.append((score + edit_score, ops + (op,), nxt, True))
        frontier = sorted(frontier, key=lambda h: -h[0])[: beam_size * 2]

        for score, ops, state, just_inserted in frontier:
            if pos == n:
                if fst.is_final(state) and any(not op.is_self() for op in ops):
                    completed.append((score, order, ops))
                    order += 1
                continue
            # SELF step over one source token.
            nxt = fst.step(state, ErrorTag.SELF)
            if nxt is not None:
                _push(beams, pos + 1, (score, ops + (EditOp(ErrorTag.SELF, pos + 1),), nxt, False))
            # Consuming edits starting here.
            for tag, (edit, edit_score) in edits_by_start.get(pos, []):
                if edit[1] == pos:
                    continue
                nxt = fst.step(state, tag)
                if nxt is None:
                    continue
                op = EditOp(tag, edit[1], edit[2])
                _push(beams, edit[1], (score + edit_score, ops + (op,), nxt, False))

    if not completed:
        raise Infeasible("no hypothesis satisfies the constraint")
    best_score, _, best_ops = max(completed, key=lambda c: (c[0], -c[1]))
    ops = merge_self_ops(list(best_ops))
    target = apply_ops(source, ops)
    return CorruptionCandidate(target, ops, best_score)


def _push(beams: dict, pos: int, hyp) -> None:
    bucket = beams.setdefault(pos, {})
    key = (hyp[2], hyp[3])
    existing = bucket.get(key)
    if existing is None or hyp[0] > existing[0]:
        bucket[key] = hyp
