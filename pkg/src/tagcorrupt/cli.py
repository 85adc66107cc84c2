"""Command-line entry point.

Subcommands:
    estimate   annotate a clean<TAB>corrupted pair file, write a tag
               distribution JSON
    corrupt    corrupt a one-sentence-per-line corpus following a target
               tag distribution
    annotate   emit JSONL span edits for a pair file
    eval-dist  compare a generated corpus against a target distribution
               (exits nonzero when the TV distance exceeds the tolerance)
"""

from __future__ import annotations

import argparse
import sys

from .errors import TagCorruptError
from .pipeline import JobConfig, cmd_annotate, cmd_corrupt, cmd_estimate, cmd_evaldist


def _add_lexicon(parser):
    parser.add_argument("--lexicon", help="path to a one-word-per-line lexicon file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tagcorrupt", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate a tag distribution from annotated pairs")
    p.add_argument("--input", required=True, help="TSV file, clean<TAB>corrupted per line")
    p.add_argument("--output", help="distribution JSON path (default: stdout)")
    p.add_argument("--plot", help="also render a distribution bar chart to this file")
    p.add_argument("--workers", type=int, default=1)
    _add_lexicon(p)

    p = sub.add_parser("corrupt", help="generate a tagged synthetic error corpus")
    p.add_argument("--input", required=True, help="clean corpus, one sentence per line")
    p.add_argument("--output", required=True, help="output TSV, corrupted<TAB>clean")
    p.add_argument("--method", default="online", choices=["online", "offline-optimal", "offline-prob"])
    p.add_argument("--constraint", default="direct",
                   choices=["direct", "nosigma", "postsigma", "prepostsigma"],
                   help="tag conditioning: direct decoding or an FST constraint shape")
    p.add_argument("--decode", default="beam", choices=["beam", "sample"])
    p.add_argument("--beam-size", type=int, default=4)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=13)
    p.add_argument("--max-words", type=int, default=250,
                   help="drop sentences with more than this many words")
    p.add_argument("--dist", help="target distribution JSON (default: uniform)")
    p.add_argument("--scorer", default="rule", help="'rule' or 'external:<command>'")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--swap", action="store_true", help="write clean<TAB>corrupted instead")
    p.add_argument("--skip-log", help="skip log path (default: <output>.skipped)")
    p.add_argument("--score-cache", help="score-matrix cache file for offline methods")
    _add_lexicon(p)

    p = sub.add_parser("annotate", help="extract classified span edits from pairs")
    p.add_argument("--input", required=True, help="TSV file, clean<TAB>corrupted per line")
    p.add_argument("--output", help="JSONL output path (default: stdout)")
    p.add_argument("--workers", type=int, default=1)
    _add_lexicon(p)

    p = sub.add_parser("eval-dist", help="verify corpus tag frequencies against a target")
    p.add_argument("--input", required=True, help="TSV pair file (corrupted<TAB>clean)")
    p.add_argument("--dist", required=True, help="target distribution JSON")
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--swap", action="store_true", help="input is clean<TAB>corrupted")
    p.add_argument("--plot", help="render observed-vs-target bar chart to this file")
    p.add_argument("--workers", type=int, default=1)
    _add_lexicon(p)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "estimate":
            cmd_estimate(args.input, args.output, args.lexicon, args.plot, workers=args.workers)
            return 0
        if args.command == "corrupt":
            cfg = JobConfig(
                input_path=args.input,
                output_path=args.output,
                method=args.method,
                conditioning=args.constraint,
                decode=args.decode,
                beam_size=args.beam_size,
                temperature=args.temperature,
                seed=args.seed,
                max_words=args.max_words,
                dist_path=args.dist,
                lexicon_path=args.lexicon,
                scorer=args.scorer,
                workers=args.workers,
                swap=args.swap,
                skip_log_path=args.skip_log,
                score_cache_path=args.score_cache,
            )
            cmd_corrupt(cfg)
            return 0
        if args.command == "annotate":
            cmd_annotate(args.input, args.output, args.lexicon, workers=args.workers)
            return 0
        if args.command == "eval-dist":
            report = cmd_evaldist(
                args.input, args.dist, args.tolerance,
                swap=args.swap, lexicon_path=args.lexicon, plot_path=args.plot,
                workers=args.workers,
            )
            return 0 if report.passed else 1
    except (TagCorruptError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
