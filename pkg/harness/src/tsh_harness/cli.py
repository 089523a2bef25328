"""Harness command line: corpus synthesis, nested CV runs, permutation nulls."""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from pathlib import Path

from .nested import (
    BaselineProducer,
    CorePipelineProducer,
    build_plan,
    nested_cv,
    permuted_reader_labels,
    result_row,
    text_table,
)
from .pipeline_client import CorpusIndex
from .search import SearchSpace
from .synthetic import ClassParams, generate_synthetic_corpus

DEFAULT_CORE_CONFIG = {
    "image": {"bandwidth_sigma": 0.01, "resolution": [16, 16]},
    "pca_components": 24,
    "min_fixations": 5,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsh-harness", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="generate a labeled synthetic corpus")
    synth.add_argument("--output", required=True)
    synth.add_argument("--readers", type=int, default=40)
    synth.add_argument("--trials", type=int, default=20)
    synth.add_argument("--regression-rate-a", type=float, default=0.05)
    synth.add_argument("--regression-rate-b", type=float, default=0.30)
    synth.add_argument("--seed", type=int, default=0)

    run = commands.add_parser("run", help="nested cross-validation for one model")
    run.add_argument("--input", required=True, help="fixation CSV with labels")
    run.add_argument("--model", default="tsh-svm")
    run.add_argument("--level", choices=("trial", "reader"), default="trial")
    run.add_argument("--outer-k", type=int, default=None, help="5 trial / 10 reader")
    run.add_argument("--inner-k", type=int, default=3)
    run.add_argument("--iterations", type=int, default=None, help="default 200")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--baseline-csv")
    run.add_argument("--core-config", help="JSON file of core pipeline settings")
    run.add_argument("--persistence-mode", choices=("ordinary", "extended"), default="ordinary")
    run.add_argument("--setting", default="including_l2")
    run.add_argument("--shuffle-labels", action="store_true", help="permutation null run")
    run.add_argument("--output", required=True, help="results JSON path")

    return parser


def cmd_synth(args) -> int:
    params = (
        ClassParams(regression_rate=args.regression_rate_a),
        ClassParams(regression_rate=args.regression_rate_b),
    )
    text = generate_synthetic_corpus(args.readers, args.trials, params, args.seed)
    Path(args.output).write_text(text, encoding="utf-8")
    print(f"wrote {args.readers} readers x {args.trials} trials to {args.output}")
    return 0


def cmd_run(args) -> int:
    corpus = CorpusIndex.from_file(args.input)
    if args.shuffle_labels:
        corpus = permuted_reader_labels(corpus, args.seed)
    core_config = dict(DEFAULT_CORE_CONFIG)
    if args.core_config:
        core_config.update(json.loads(Path(args.core_config).read_text(encoding="utf-8")))
    core_config["persistence_mode"] = args.persistence_mode
    outer_k = args.outer_k if args.outer_k is not None else (5 if args.level == "trial" else 10)
    baseline = Path(args.baseline_csv) if args.baseline_csv else None
    if args.model in ("bl-svm", "bl-rf"):
        if baseline is None:
            print("error: baseline models need --baseline-csv", file=sys.stderr)
            return 1
        producer = BaselineProducer(corpus, baseline, level=args.level)
    else:
        if args.model.startswith("hybrid") and baseline is None:
            print("error: hybrid models need --baseline-csv", file=sys.stderr)
            return 1
        with tempfile.TemporaryDirectory(prefix="tsh_harness_") as scratch:
            return _run_core_model(args, corpus, core_config, baseline, outer_k, Path(scratch))
    return _finish_run(args, producer, outer_k)


def _run_core_model(args, corpus, core_config, baseline, outer_k, scratch: Path) -> int:
    producer = CorePipelineProducer(
        corpus,
        core_config,
        workdir=scratch,
        level=args.level,
        baseline_csv=baseline if args.model.startswith("hybrid") else None,
    )
    return _finish_run(args, producer, outer_k)


def _finish_run(args, producer, outer_k) -> int:
    plan = build_plan(producer, outer_k, args.seed)
    space = SearchSpace()
    result = nested_cv(
        producer,
        plan,
        space,
        model=args.model,
        seed=args.seed,
        inner_k=args.inner_k,
        iterations=args.iterations,
        jobs=args.jobs,
    )
    persistence = "ordinary"
    if isinstance(producer, CorePipelineProducer):
        persistence = producer.base_config.get("persistence_mode", "ordinary")
    setting = args.setting + ("_shuffled" if args.shuffle_labels else "")
    rows = [result_row(result, setting=setting, persistence=persistence)]
    payload = {"rows": rows, "seed": args.seed, "level": args.level, "outer_k": outer_k}
    Path(args.output).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(text_table(rows), end="")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "synth":
        return cmd_synth(args)
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
