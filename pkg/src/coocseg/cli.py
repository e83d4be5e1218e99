"""Command-line interface.

Subcommands mirror the pipeline stages so each step can run standalone on
files, while `run` executes everything in one go from flags or a JSON
config. All commands exit 0 on success and 1 with an `error:` line on
stderr when a stage fails; argparse usage problems exit 2.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .clustering import KMeansConfig, fit_clusters, hard_assign, score_sequence
from .cooccur import (
    RefineConfig,
    build_cooccurrence,
    occurrence_ratios,
    refine_scores,
    select_salience_pool,
)
from .decode import DecodeConfig, argmax_decode, viterbi_decode
from .evaluation import evaluate
from .fileio import (
    format_report,
    load_features,
    load_ground_truth,
    load_model,
    load_path,
    load_segmentations,
    load_stats,
    save_model,
    save_path,
    save_stats,
    write_features,
    write_ground_truth,
    write_report,
    write_segmentations,
)
from .pipeline import PipelineConfig, run_pipeline
from .plot import plot_segmentation
from .synth import SynthSpec, generate, spread_means
from .temporal import PathConfig, build_histograms, extract_path
from .types import CoocsegError, Segmentation

logger = logging.getLogger(__name__)


def _parse_grammar(text: str) -> tuple[tuple[int, ...], ...]:
    """'0,1,0;2,3' -> ((0, 1, 0), (2, 3))."""
    try:
        return tuple(
            tuple(int(s) for s in part.split(",")) for part in text.split(";") if part
        )
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad grammar {text!r}: {e}") from e


def _parse_int_list(text: str) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(s) for s in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}: {e}") from e


def _parse_float_list(text: str) -> tuple[float, ...]:
    if not text:
        return ()
    try:
        return tuple(float(s) for s in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}: {e}") from e


def _cmd_synth(args: argparse.Namespace) -> int:
    means = spread_means(args.n_subactions, args.dim, args.separation, rng_seed=args.seed)
    spec = SynthSpec(
        n_subactions=args.n_subactions,
        dim=args.dim,
        n_videos=args.n_videos,
        means=means,
        sigma=args.sigma,
        grammar=args.grammar,
        segment_frames=(args.segment_frames[0], args.segment_frames[1]),
        grammar_weights=args.weights or None,
        optional_subactions=args.optional,
        drop_prob=args.drop_prob,
        rng_seed=args.seed,
    )
    corpus, ground_truth = generate(spec)
    out = Path(args.out)
    manifest = write_features(corpus, out / "features", fmt=args.format)
    write_ground_truth(ground_truth, out / "gt")
    print(f"wrote {len(corpus)} sequences to {manifest}")
    print(f"wrote ground truth to {out / 'gt'}")
    return 0


def _cmd_cluster(args: argparse.Namespace) -> int:
    corpus = load_features(args.features)
    cfg = KMeansConfig(
        k=args.k,
        max_iters=args.max_iters,
        restarts=args.restarts,
        rng_seed=args.seed,
        convergence_tol=args.tol,
    )
    model = fit_clusters(corpus, cfg)
    save_model(model, args.out)
    print(f"fitted {model.k} clusters on {len(corpus)} sequences -> {args.out}")
    return 0


def _cmd_parse(args: argparse.Namespace) -> int:
    corpus = load_features(args.features)
    model = load_model(args.model)
    stats = build_cooccurrence(model, corpus, RefineConfig(tau1=args.tau1))
    save_stats(stats, args.out)
    print(f"co-occurrence statistics for {stats.k} clusters -> {args.out}")
    return 0


def _cmd_path(args: argparse.Namespace) -> int:
    corpus = load_features(args.features)
    model = load_model(args.model)
    cfg = PathConfig(bin_count=args.bins, theta=args.theta)
    histograms = build_histograms(model, corpus, cfg)
    path = extract_path(histograms, cfg)
    save_path(path, args.out)
    print(f"temporal path with {len(path)} steps -> {args.out}")
    return 0


def _cmd_decode(args: argparse.Namespace) -> int:
    corpus = load_features(args.features)
    model = load_model(args.model)
    stats = load_stats(args.stats) if args.stats else None
    path = load_path(args.path) if args.path else None
    refine_cfg = RefineConfig(tau1=args.tau1, tau2=args.tau2, eta=args.eta)
    decode_cfg = DecodeConfig(
        stay_log_prob=args.stay_log_prob, advance_log_prob=args.advance_log_prob
    )
    segmentations = []
    for seq in corpus:
        scores = score_sequence(model, seq)
        if stats is not None:
            if seq.id in model.frame_assignments:
                ratios = occurrence_ratios(model, seq.id)
            else:
                assignments = hard_assign(model, seq)
                ratios = np.bincount(assignments, minlength=model.k) / seq.n_frames
            pool = select_salience_pool(ratios, stats, refine_cfg)
            scores = refine_scores(scores, pool, refine_cfg)
        if path is not None:
            segmentations.append(viterbi_decode(scores, path, decode_cfg))
        else:
            segmentations.append(argmax_decode(scores))
    write_segmentations(segmentations, args.out)
    mode = f"{'refined' if stats else 'raw'} scores, {'path' if path else 'argmax'} decoding"
    print(f"decoded {len(segmentations)} sequences ({mode}) -> {args.out}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    segmentations = load_segmentations(args.segments)
    lengths = {seg.sequence_id: seg.n_frames for seg in segmentations}
    ground_truth = load_ground_truth(args.ground_truth, lengths)
    n_clusters = max(int(seg.labels.max()) for seg in segmentations) + 1
    report = evaluate(segmentations, ground_truth, n_clusters)
    text = format_report(report)
    print(text, end="")
    if args.out:
        write_report(report, args.out)
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    if args.config:
        cfg = PipelineConfig.from_file(args.config)
    else:
        for name in ("features", "out", "k"):
            if getattr(args, name) is None:
                raise CoocsegError(f"run needs --config or --features/--out/--k (missing --{name})")
        cfg = PipelineConfig(
            n_clusters=args.k,
            features=args.features,
            out_dir=args.out,
            ground_truth=args.ground_truth,
            use_cooccurrence=not args.no_cooccurrence,
            use_multi_occur_path=not args.no_multi_occur_path,
            n_jobs=args.n_jobs,
            kmeans=KMeansConfig(
                k=args.k,
                max_iters=args.max_iters,
                restarts=args.restarts,
                rng_seed=args.seed,
                convergence_tol=args.tol,
            ),
            refine=RefineConfig(tau1=args.tau1, tau2=args.tau2, eta=args.eta),
            path=PathConfig(bin_count=args.bins, theta=args.theta),
        )
    result = run_pipeline(cfg)
    print(f"wrote pipeline outputs to {cfg.out_dir}")
    if result.report is not None:
        print(f"mof={result.report.mof:.6f}")
        print(f"f1={result.report.f1:.6f}")
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    gt_file = Path(args.ground_truth) / f"{args.id}.txt"
    if not gt_file.exists():
        raise CoocsegError(f"{gt_file}: no ground-truth file for sequence {args.id!r}")
    tokens = [t.strip() for t in gt_file.read_text().splitlines() if t.strip()]
    vocabulary = sorted(set(tokens))
    index = {token: i for i, token in enumerate(vocabulary)}
    gt = np.array([index[t] for t in tokens], dtype=np.intp)
    predictions = []
    for seg_dir in args.segments or []:
        seg_file = Path(seg_dir) / f"{args.id}.txt"
        if not seg_file.exists():
            raise CoocsegError(f"{seg_file}: no segmentation for sequence {args.id!r}")
        labels = np.array([int(line) for line in seg_file.read_text().split()], dtype=np.intp)
        predictions.append(Segmentation(sequence_id=args.id, labels=labels))
    plot_segmentation(gt, predictions, args.out, label_names=vocabulary)
    print(f"wrote plot for {args.id!r} -> {args.out}")
    return 0


def _add_kmeans_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int, default=10, help="k-means restarts (default 10)")
    p.add_argument("--max-iters", type=int, default=300, help="k-means iteration cap")
    p.add_argument("--tol", type=float, default=1e-6, help="centroid shift convergence tolerance")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")


def _add_refine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau1", type=float, default=0.1, help="appearance ratio threshold")
    p.add_argument("--tau2", type=float, default=0.1, help="salience pool admission threshold")
    p.add_argument("--eta", type=float, default=0.5, help="decay for clusters outside the pool")


def _add_path_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bins", type=int, default=20, help="temporal histogram bin count")
    p.add_argument("--theta", type=float, default=0.15, help="histogram bin threshold")


def _add_decode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--stay-log-prob", type=float, default=math.log(0.5))
    p.add_argument("--advance-log-prob", type=float, default=math.log(0.5))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coocseg",
        description="Unsupervised temporal segmentation of feature-vector sequences.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log stage progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    p.add_argument("--out", required=True, help="output directory (features/ and gt/)")
    p.add_argument("--n-subactions", type=int, default=6)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--n-videos", type=int, default=50)
    p.add_argument("--sigma", type=float, default=1.0, help="isotropic noise level (0 = noiseless)")
    p.add_argument("--separation", type=float, default=6.0, help="minimum distance between means")
    p.add_argument("--grammar", type=_parse_grammar, default=((0, 1, 2, 3, 4, 5),),
                   help="semicolon-separated step sequences, e.g. '0,1,0,2;0,2'")
    p.add_argument("--weights", type=_parse_float_list, default=(),
                   help="sampling weight per grammar sequence")
    p.add_argument("--optional", type=_parse_int_list, default=(),
                   help="sub-actions that may be dropped per video")
    p.add_argument("--drop-prob", type=float, default=0.0)
    p.add_argument("--segment-frames", type=int, nargs=2, default=(20, 40),
                   metavar=("LO", "HI"), help="frames per step, uniform range")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("capf", "csv"), default="capf")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("cluster", help="fit the cluster model")
    p.add_argument("--features", required=True, help="feature manifest or its directory")
    p.add_argument("--k", type=int, required=True, help="number of clusters")
    p.add_argument("--out", required=True, help="output model JSON")
    _add_kmeans_flags(p)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("parse", help="estimate corpus co-occurrence statistics")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="output statistics JSON")
    p.add_argument("--tau1", type=float, default=0.1, help="appearance ratio threshold")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("path", help="extract the corpus temporal path")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="output path JSON")
    _add_path_flags(p)
    p.set_defaults(func=_cmd_path)

    p = sub.add_parser("decode", help="segment sequences with the fitted artifacts")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--stats", help="co-occurrence JSON; omit to skip refinement")
    p.add_argument("--path", help="temporal path JSON; omit for per-frame argmax")
    p.add_argument("--out", required=True, help="output segments directory")
    _add_refine_flags(p)
    _add_decode_flags(p)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("eval", help="score segmentations against ground truth")
    p.add_argument("--segments", required=True, help="directory of per-sequence label files")
    p.add_argument("--ground-truth", required=True, help="directory of ground-truth files")
    p.add_argument("--out", help="also write the report to this file")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("run", help="full pipeline in one invocation")
    p.add_argument("--config", help="JSON config file; overrides the flags below")
    p.add_argument("--features")
    p.add_argument("--ground-truth")
    p.add_argument("--out", help="output directory")
    p.add_argument("--k", type=int)
    p.add_argument("--no-cooccurrence", action="store_true",
                   help="disable co-occurrence refinement")
    p.add_argument("--no-multi-occur-path", action="store_true",
                   help="disable path-constrained decoding (argmax instead)")
    p.add_argument("--n-jobs", type=int, default=1)
    _add_kmeans_flags(p)
    _add_refine_flags(p)
    _add_path_flags(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("plot", help="render ground truth and predictions as SVG bars")
    p.add_argument("--ground-truth", required=True, help="ground-truth directory")
    p.add_argument("--id", required=True, help="sequence id to plot")
    p.add_argument("--segments", action="append",
                   help="segments directory; repeat for several prediction rows")
    p.add_argument("--out", required=True, help="output SVG file")
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (CoocsegError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
