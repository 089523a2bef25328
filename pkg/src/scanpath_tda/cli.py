"""Command line interface: diagrams, features, goldens, show-config.

Exit codes: 0 on success, 1 on validation or data errors, 2 on internal
errors. All outputs are deterministic functions of (input, config, seed).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import traceback
from pathlib import Path

from .errors import PipelineError
from .goldens import run_goldens
from .pipeline import (
    PipelineConfig,
    compute_features,
    config_from_dict,
    config_to_dict,
    diagram_file_record,
    feature_csv_text,
    load_baseline_csv,
    load_config,
    load_fit_ids,
    parse_input_csv,
    run_diagrams,
)
from .timeseries import filter_trials
from .vectorization import save_pca


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scanpath-tda", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    def add_io(sub, needs_output=True):
        sub.add_argument("--input", required=True, help="fixation CSV")
        sub.add_argument("--config", help="pipeline config JSON")
        if needs_output:
            sub.add_argument("--output-dir", required=True)
        sub.add_argument("--seed", type=int, help="override the config seed")

    diagrams = commands.add_parser("diagrams", help="persistence diagrams per trial and axis")
    add_io(diagrams)

    features = commands.add_parser("features", help="feature matrix CSV plus fitted transforms")
    add_io(features)
    features.add_argument("--baseline-csv", help="precomputed baseline features to concatenate")
    features.add_argument(
        "--fit-ids", help="CSV of reader_id,trial_id keys the transforms are fitted on"
    )

    commands.add_parser("goldens", help="run the built-in golden and oracle checks")

    show = commands.add_parser("show-config", help="print the effective configuration")
    show.add_argument("--config", help="pipeline config JSON")

    return parser


def _load_config(args) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    if getattr(args, "seed", None) is not None:
        config = config_from_dict({**config_to_dict(config), "seed": args.seed})
    return config


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name)


def cmd_diagrams(args) -> int:
    config = _load_config(args)
    sequences = parse_input_csv(args.input)
    results, skips = run_diagrams(sequences, config)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for index, trial in enumerate(results):
        for axis in ("x", "y"):
            record = diagram_file_record(trial, axis, config)
            name = f"{index:05d}_{_safe(trial.reader_id)}_{_safe(trial.trial_id)}_{axis}.json"
            _write_json(out / name, record)
    n_filtered = len(filter_trials(sequences, config.min_fixations))
    _write_json(
        out / "report.json",
        {
            "n_input_trials": n_filtered,
            "n_output_trials": len(results),
            "skipped": skips,
        },
    )
    print(f"wrote {2 * len(results)} diagram files, skipped {len(skips)} trials")
    return 0


def cmd_features(args) -> int:
    config = _load_config(args)
    sequences = parse_input_csv(args.input)
    fit_keys = None
    if args.fit_ids:
        fit_keys = load_fit_ids(Path(args.fit_ids).read_text(encoding="utf-8"))
    baseline = None
    if args.baseline_csv:
        baseline = load_baseline_csv(Path(args.baseline_csv).read_text(encoding="utf-8"))
    table = compute_features(sequences, config, fit_keys=fit_keys, baseline=baseline)

    out = Path(args.output_dir)
    transforms = out / "transforms"
    transforms.mkdir(parents=True, exist_ok=True)
    (out / "features.csv").write_text(feature_csv_text(table), encoding="utf-8")
    save_pca(table.pca, transforms / "pca.json")
    for slot, spec in table.image_specs.items():
        _write_json(transforms / f"image_spec_{slot}.json", spec.to_dict())
    _write_json(
        out / "report.json",
        {
            "n_rows": len(table.keys),
            "tsh_width": int(table.tsh.shape[1]),
            "baseline_width": 0 if table.baseline is None else int(table.baseline.shape[1]),
            "skipped": table.skips,
            "config": config_to_dict(config),
        },
    )
    print(f"wrote {len(table.keys)} feature rows of tsh width {table.tsh.shape[1]}")
    return 0


def cmd_goldens(_args) -> int:
    results = run_goldens()
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        suffix = f" ({result.detail})" if result.detail else ""
        print(f"{status} {result.name}{suffix}")
    return 0 if all(r.passed for r in results) else 1


def cmd_show_config(args) -> int:
    config = load_config(args.config) if args.config else PipelineConfig()
    print(json.dumps(config_to_dict(config), indent=2, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    handlers = {
        "diagrams": cmd_diagrams,
        "features": cmd_features,
        "goldens": cmd_goldens,
        "show-config": cmd_show_config,
    }
    try:
        return handlers[args.command](args)
    except PipelineError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    except Exception:
        traceback.print_exc()
        return 2


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


if __name__ == "__main__":
    sys.exit(main())
