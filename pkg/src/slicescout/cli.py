"""Command-line front-end.

Subcommands: select, profile, compare, committee, ablate, cohort.  Batch
commands fan out over subjects with per-subject isolation: one bad volume
produces an error row, never a dead run.  Exit codes: 0 all subjects fine,
1 at least one subject failed, 2 usage or input-format error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import cohort as cohort_mod
from . import committee as committee_mod
from .edges import (CannyParams, PROFILE_KINDS, edge_sum_profile, entropy_profile,
                    write_profile_csv)
from .errors import NoForegroundError, SliceScoutError
from .resize import RESIZE_MODES, ResizeSpec, downsample, downsample_plane
from .roi import BoundingBox
from .stack_io import save_stack, save_top_k
from .volume import Slice2D, Volume3D, read_nifti, read_raw, slice_plane
from .window import (DEFAULT_WINDOW, METHODS, SelectedStack, compare_methods,
                     select_slices, select_top_k, window_from_spacing)

log = logging.getLogger("slicescout")

VOLUME_SUFFIXES = (".nii", ".nii.gz", ".ssv")

BATCH_SUMMARY_NAME = "batch_summary.csv"
ERRORS_NAME = "errors.csv"
SELECT_SUMMARY_FIELDS = ("subject_id", "start", "window", "total_score",
                         "roi", "duration_ms")
PROFILE_SUMMARY_FIELDS = ("subject_id", "n_slices", "kind", "total_score",
                          "duration_ms")
COMPARE_FIELDS = ("subject_id", "edge_start", "entropy_start", "window",
                  "overlap", "jaccard")
ERROR_FIELDS = ("path", "error")


class UsageError(Exception):
    """Bad invocation or unreadable configuration; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Pipeline settings shared by the batch subcommands.

    Built from defaults, then the --config file, then explicit flags, in that
    order of increasing precedence.
    """

    inputs: Tuple[str, ...] = ()
    output: str = ""
    axis: int = 2
    window: int = DEFAULT_WINDOW
    window_mm: Optional[float] = None
    method: str = "edge_sum"
    kind: str = "edge_sum"
    sigma: float = 1.4
    radius: int = 2
    low_frac: float = 0.10
    high_frac: float = 0.20
    threshold_base: str = "gradient"
    resize: int = 1
    resize_mode: str = "area_average"
    roi_mode: str = "largest"
    top_k_mode: bool = False
    jobs: int = 0
    seed: int = 0
    plot: bool = False

    def __post_init__(self):
        if self.axis not in (0, 1, 2):
            raise ValueError(f"axis must be 0, 1 or 2, got {self.axis}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.window_mm is not None and self.window_mm <= 0:
            raise ValueError(f"window_mm must be positive, got {self.window_mm}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"kind must be one of {PROFILE_KINDS}, got {self.kind!r}")
        if not 0.0 < self.low_frac < self.high_frac <= 1.0:
            raise ValueError(
                f"need 0 < low_frac < high_frac <= 1, got "
                f"{self.low_frac}/{self.high_frac}")
        if self.resize < 1:
            raise ValueError(f"resize must be >= 1, got {self.resize}")
        if self.resize_mode not in RESIZE_MODES:
            raise ValueError(f"resize_mode must be one of {RESIZE_MODES}")
        if self.roi_mode not in ("largest", "union"):
            raise ValueError(f"roi_mode must be largest or union, got {self.roi_mode!r}")
        if self.jobs < 0:
            raise ValueError(f"jobs must be >= 0, got {self.jobs}")

    def canny_params(self) -> CannyParams:
        return CannyParams(sigma=self.sigma, radius=self.radius,
                           low_frac=self.low_frac, high_frac=self.high_frac,
                           threshold_base=self.threshold_base)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_CONFIG_COERCIONS = {
    "input": str,
    "output": str,
    "axis": int,
    "window": int,
    "window_mm": float,
    "method": str,
    "kind": str,
    "sigma": float,
    "radius": int,
    "low_frac": float,
    "high_frac": float,
    "absolute_intensity_thresholds": _parse_bool,
    "resize": int,
    "resize_mode": str,
    "roi_mode": str,
    "top_k_mode": _parse_bool,
    "jobs": int,
    "seed": int,
    "plot": _parse_bool,
}


def read_config(path) -> Dict[str, object]:
    """Parse a key=value config file; # starts a comment line."""
    values: Dict[str, object] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        key = key.strip()
        if not sep or not key:
            raise UsageError(f"{path}: line {lineno}: expected key=value")
        coerce = _CONFIG_COERCIONS.get(key)
        if coerce is None:
            raise UsageError(f"{path}: line {lineno}: unknown key {key!r}")
        try:
            values[key] = coerce(value.strip())
        except ValueError as exc:
            raise UsageError(f"{path}: line {lineno}: {exc}") from exc
    return values


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file and CLI flags into a RunConfig."""
    merged: Dict[str, object] = {f.name: f.default for f in fields(RunConfig)
                                 if f.name != "inputs"}
    merged["inputs"] = ()
    absolute = False
    if getattr(args, "config", None):
        file_values = read_config(args.config)
        absolute = bool(file_values.pop("absolute_intensity_thresholds", False))
        if "input" in file_values:
            parts = str(file_values.pop("input")).split(",")
            merged["inputs"] = tuple(p.strip() for p in parts if p.strip())
        merged.update(file_values)
    for key in _CONFIG_COERCIONS:
        if key in ("input", "absolute_intensity_thresholds"):
            continue
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if getattr(args, "absolute_intensity_thresholds", None):
        absolute = True
    merged["threshold_base"] = "intensity" if absolute else "gradient"
    if getattr(args, "input", None):
        merged["inputs"] = tuple(args.input)
    try:
        return RunConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _input_stem(path: Path) -> str:
    name = path.name
    for suffix in (".nii.gz", ".nii", ".ssv"):
        if name.endswith(suffix):
            return name[:-len(suffix)]
    return path.stem


def resolve_inputs(patterns: Sequence[str]) -> List[Path]:
    """Expand files, directories and glob patterns into a sorted path list."""
    if not patterns:
        raise UsageError("no inputs given (use --input)")
    found: List[Path] = []
    for pattern in patterns:
        path = Path(pattern)
        if path.is_dir():
            hits = [p for p in sorted(path.iterdir())
                    if p.is_file() and p.name.endswith(VOLUME_SUFFIXES)]
        elif path.is_file():
            hits = [path]
        else:
            import glob as globlib
            hits = [Path(p) for p in sorted(globlib.glob(pattern))
                    if Path(p).is_file()]
        found.extend(hits)
    unique = sorted(set(found))
    if not unique:
        raise UsageError(f"no inputs matched {list(patterns)}")
    stems: Dict[str, Path] = {}
    for path in unique:
        stem = _input_stem(path)
        if stem in stems:
            raise UsageError(
                f"duplicate subject id {stem!r}: {stems[stem]} and {path}")
        stems[stem] = path
    return unique


def load_volume(path, slice_axis: int = 2) -> Volume3D:
    """Read a .nii / .nii.gz / .ssv volume, picking the parser by suffix."""
    name = str(path)
    if name.endswith(".ssv"):
        return read_raw(path, slice_axis=slice_axis)
    if name.endswith((".nii", ".nii.gz")):
        return read_nifti(path, slice_axis=slice_axis)
    raise UsageError(f"unsupported input {path} (expected .nii, .nii.gz or .ssv)")


def _full_frame_roi(vol: Volume3D) -> BoundingBox:
    plane = slice_plane(vol, 0)
    return BoundingBox(min_x=0, min_y=0,
                       max_x=plane.shape[1] - 1, max_y=plane.shape[0] - 1)


def _fmt_score(value) -> str:
    number = float(value)
    if number.is_integer():
        return str(int(number))
    return repr(number)


def _roi_cell(roi: BoundingBox) -> str:
    return f"{roi.min_x}:{roi.min_y}:{roi.max_x}:{roi.max_y}"


def _window_length(config: RunConfig, vol: Volume3D) -> int:
    if config.window_mm is not None:
        return window_from_spacing(vol.slice_spacing, config.window_mm)
    return config.window


def _select_worker(path: str, config: RunConfig) -> Dict[str, object]:
    started = time.perf_counter()
    result: Dict[str, object] = {"path": path, "error": None, "row": None}
    try:
        vol = load_volume(path, slice_axis=config.axis)
        params = config.canny_params()
        length = _window_length(config, vol)
        out_dir = Path(config.output) / vol.subject_id
        if config.top_k_mode:
            indices, roi, profile = select_top_k(
                vol, count=length, method=config.method, params=params,
                roi_mode=config.roi_mode)
            slices = []
            for k in indices:
                pixels = np.array(slice_plane(vol, k))
                if config.resize > 1:
                    pixels = downsample_plane(pixels, config.resize,
                                              config.resize_mode)
                slices.append(Slice2D(pixels=pixels, index=k))
            picked = profile.scores[list(indices)].sum()
            total = int(picked) if profile.kind == "edge_sum" else float(picked)
            save_top_k(vol.subject_id, slices, roi, config.method, total,
                       out_dir, params=params,
                       extra={"source": Path(path).name, "resize": config.resize})
            start = indices[0]
        else:
            stack = select_slices(vol, length=length, method=config.method,
                                  params=params, roi_mode=config.roi_mode)
            if config.resize > 1:
                stack = downsample(stack, ResizeSpec(factor=config.resize,
                                                     mode=config.resize_mode))
            save_stack(stack, out_dir, params=params,
                       extra={"source": Path(path).name, "resize": config.resize})
            total = stack.window.total_score
            roi = stack.roi
            start = stack.window.start
        duration_ms = round((time.perf_counter() - started) * 1000.0)
        result["row"] = (vol.subject_id, start, length, _fmt_score(total),
                         _roi_cell(roi), duration_ms)
    except Exception as exc:  # per-subject isolation: record, keep the batch alive
        result["error"] = f"{type(exc).__name__}: {exc}"
    return result


def _plot_profile(profile, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(8.0, 3.0))
    ax.plot(np.arange(len(profile)), profile.scores, linewidth=1.0)
    ax.set_xlabel("slice index")
    ax.set_ylabel(profile.kind)
    ax.set_title(profile.subject_id)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _profile_worker(path: str, config: RunConfig) -> Dict[str, object]:
    started = time.perf_counter()
    result: Dict[str, object] = {"path": path, "error": None, "row": None}
    try:
        vol = load_volume(path, slice_axis=config.axis)
        if config.kind == "entropy":
            profile = entropy_profile(vol)
        else:
            try:
                from .window import compute_patient_roi
                roi = compute_patient_roi(vol, mode=config.roi_mode)
            except NoForegroundError:
                # featureless volume: profile the full frame, which yields zeros
                roi = _full_frame_roi(vol)
            profile = edge_sum_profile(vol, roi, config.canny_params())
        out_dir = Path(config.output)
        write_profile_csv(profile, out_dir / f"{vol.subject_id}_profile.csv")
        if config.plot:
            _plot_profile(profile, out_dir / f"{vol.subject_id}_profile.png")
        duration_ms = round((time.perf_counter() - started) * 1000.0)
        result["row"] = (vol.subject_id, len(profile), profile.kind,
                         _fmt_score(profile.scores.sum()), duration_ms)
    except Exception as exc:
        result["error"] = f"{type(exc).__name__}: {exc}"
    return result


def _compare_worker(path: str, config: RunConfig) -> Dict[str, object]:
    result: Dict[str, object] = {"path": path, "error": None, "row": None}
    try:
        vol = load_volume(path, slice_axis=config.axis)
        length = _window_length(config, vol)
        report = compare_methods(vol, length=length,
                                 params=config.canny_params(),
                                 roi_mode=config.roi_mode)
        result["row"] = (report.subject_id, report.edge_window.start,
                         report.entropy_window.start, length,
                         report.overlap_count, repr(report.jaccard))
    except Exception as exc:
        result["error"] = f"{type(exc).__name__}: {exc}"
    return result


def _run_batch(worker, paths: Sequence[Path], config: RunConfig) -> List[Dict[str, object]]:
    names = [str(p) for p in paths]
    jobs = config.jobs if config.jobs > 0 else (os.cpu_count() or 1)
    jobs = min(jobs, len(names))
    if jobs <= 1:
        return [worker(name, config) for name in names]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(partial(worker, config=config), names))


def _write_csv(path, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _finish_batch(results: List[Dict[str, object]], config: RunConfig,
                  summary_fields: Sequence[str], summary_name: str) -> int:
    out_dir = Path(config.output)
    rows = sorted((r["row"] for r in results if r["row"] is not None),
                  key=lambda row: row[0])
    failures = sorted((r["path"], r["error"]) for r in results
                      if r["error"] is not None)
    _write_csv(out_dir / summary_name, summary_fields, rows)
    _write_csv(out_dir / ERRORS_NAME, ERROR_FIELDS, failures)
    for path, error in failures:
        print(f"error: {path}: {error}", file=sys.stderr)
    print(f"{len(rows)} subject(s) processed, {len(failures)} failed; "
          f"reports in {out_dir}")
    return 1 if failures else 0


def _batch_command(args: argparse.Namespace, worker,
                   summary_fields: Sequence[str],
                   summary_name: str = BATCH_SUMMARY_NAME) -> int:
    config = build_run_config(args)
    if not config.output:
        raise UsageError("no output directory given (use --output)")
    paths = resolve_inputs(config.inputs)
    Path(config.output).mkdir(parents=True, exist_ok=True)
    log.info("processing %d input(s) with %s", len(paths), worker.__name__)
    results = _run_batch(worker, paths, config)
    return _finish_batch(results, config, summary_fields, summary_name)


def cmd_select(args: argparse.Namespace) -> int:
    return _batch_command(args, _select_worker, SELECT_SUMMARY_FIELDS)


def cmd_profile(args: argparse.Namespace) -> int:
    return _batch_command(args, _profile_worker, PROFILE_SUMMARY_FIELDS)


def cmd_compare(args: argparse.Namespace) -> int:
    return _batch_command(args, _compare_worker, COMPARE_FIELDS,
                          summary_name="compare_report.csv")


def _registry_from_flag(models: Optional[str]) -> Optional[Tuple[str, ...]]:
    if models is None:
        return None
    registry = tuple(m.strip() for m in models.split(",") if m.strip())
    if not registry:
        raise UsageError("--models must list at least one model id")
    if len(set(registry)) != len(registry):
        raise UsageError("--models lists a model twice")
    return registry


def cmd_committee(args: argparse.Namespace) -> int:
    records = committee_mod.read_predictions(args.predictions)
    if not records:
        raise UsageError(f"{args.predictions}: no prediction records")
    truth = committee_mod.read_truth(args.truth)
    registry = _registry_from_flag(args.models)
    decisions, warnings = committee_mod.decide_batch(records, registry=registry)
    for line in warnings:
        print(f"warning: {line}", file=sys.stderr)
    cm = committee_mod.confusion(decisions, truth)
    report = committee_mod.metrics(cm)
    counts = committee_mod.contribution_counts(
        decisions, registry=registry or tuple(sorted({r.model_id for r in records})))
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    committee_mod.write_decisions_csv(out_dir / "decisions.csv", decisions)
    committee_mod.write_metrics_csv(out_dir / "metrics.csv", cm, report)
    committee_mod.write_contribution_csv(out_dir / "contribution.csv", counts)
    def show(value):
        return "undefined" if value is None else f"{value:.4f}"
    print(f"{len(decisions)} subjects: accuracy {show(report.accuracy)}, "
          f"sensitivity {show(report.sensitivity)}, "
          f"specificity {show(report.specificity)}")
    return 0


def _parse_subsets(text: Optional[str]) -> Optional[List[Tuple[str, ...]]]:
    if text is None:
        return None
    subsets: List[Tuple[str, ...]] = []
    for chunk in text.split(","):
        models = tuple(m.strip() for m in chunk.split("+") if m.strip())
        if not models:
            raise UsageError(f"empty subset in {text!r}")
        subsets.append(models)
    return subsets


def cmd_ablate(args: argparse.Namespace) -> int:
    records = committee_mod.read_predictions(args.predictions)
    if not records:
        raise UsageError(f"{args.predictions}: no prediction records")
    truth = committee_mod.read_truth(args.truth)
    registry = _registry_from_flag(args.models)
    subsets = _parse_subsets(args.subsets)
    rows = committee_mod.ablation(records, truth, subsets=subsets,
                                  registry=registry)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    committee_mod.write_ablation_csv(out_dir / "ablation.csv", rows)
    for row in rows:
        accuracy = row.report.accuracy
        shown = "undefined" if accuracy is None else f"{accuracy:.4f}"
        print(f"{'+'.join(row.models)}: accuracy {shown}")
    return 0


def cmd_cohort(args: argparse.Namespace) -> int:
    records = cohort_mod.read_metadata(args.metadata)
    rules = cohort_mod.CohortRules(min_age=args.min_age,
                                   required_session=args.session)
    entries, exclusions = cohort_mod.build_cohort(records, rules)
    if not entries:
        raise UsageError("cohort is empty after filtering")
    split = cohort_mod.stratified_split(entries, test_fraction=args.test_fraction,
                                        seed=args.seed)
    for line in split.warnings:
        print(f"warning: {line}", file=sys.stderr)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    cohort_mod.write_cohort_csv(out_dir / "cohort.csv", entries)
    cohort_mod.write_exclusions_csv(out_dir / "exclusions.csv", exclusions)
    cohort_mod.write_split_csv(out_dir / "split.csv", split)
    labels = [e.label for e in entries]
    print(f"cohort {len(entries)} subjects "
          f"({labels.count('demented')} demented / "
          f"{labels.count('non_demented')} non_demented), "
          f"{len(exclusions)} excluded, "
          f"split {len(split.train)} train / {len(split.test)} test")
    return 0


def _add_pipeline_flags(parser: argparse.ArgumentParser, with_resize: bool = False,
                        with_profile: bool = False) -> None:
    parser.add_argument("--input", action="append", metavar="PATH",
                        help="volume file, directory or glob (repeatable)")
    parser.add_argument("--output", metavar="DIR", help="output directory")
    parser.add_argument("--config", metavar="FILE",
                        help="key=value config file; flags override it")
    parser.add_argument("--axis", type=int, choices=(0, 1, 2),
                        help="slice axis (default 2)")
    parser.add_argument("--window", type=int, metavar="W",
                        help=f"window length in slices (default {DEFAULT_WINDOW})")
    parser.add_argument("--window-mm", type=float, metavar="MM", dest="window_mm",
                        help="derive window length from slice spacing")
    parser.add_argument("--method", choices=METHODS,
                        help="slice scoring method (default edge_sum)")
    parser.add_argument("--sigma", type=float, help="Gaussian sigma (default 1.4)")
    parser.add_argument("--radius", type=int, help="Gaussian radius (default 2)")
    parser.add_argument("--low-frac", type=float, dest="low_frac",
                        help="weak-edge threshold fraction (default 0.10)")
    parser.add_argument("--high-frac", type=float, dest="high_frac",
                        help="strong-edge threshold fraction (default 0.20)")
    parser.add_argument("--absolute-intensity-thresholds", action="store_const",
                        const=True, dest="absolute_intensity_thresholds",
                        help="scale Canny thresholds by peak intensity instead "
                             "of peak gradient")
    parser.add_argument("--roi-mode", choices=("largest", "union"), dest="roi_mode",
                        help="patient ROI rule (default largest)")
    parser.add_argument("--jobs", type=int,
                        help="worker processes (default: all cores)")
    parser.add_argument("--seed", type=int, help="seed recorded in the config")
    if with_resize:
        parser.add_argument("--resize", type=int, metavar="FACTOR",
                            help="downsample factor applied to saved slices")
        parser.add_argument("--resize-mode", choices=RESIZE_MODES,
                            dest="resize_mode",
                            help="downsample mode (default area_average)")
        parser.add_argument("--top-k-mode", action="store_const", const=True,
                            dest="top_k_mode",
                            help="pick the W highest-scoring slices instead of "
                                 "a contiguous window")
    if with_profile:
        parser.add_argument("--kind", choices=PROFILE_KINDS,
                            help="profile score kind (default edge_sum)")
        parser.add_argument("--plot", action="store_const", const=True,
                            help="also render score-vs-slice curves (PNG)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slicescout",
        description="Slice-window selection and committee evaluation for "
                    "volumetric brain MRI.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_select = sub.add_parser("select", help="pick the best slice window per volume")
    _add_pipeline_flags(p_select, with_resize=True)
    p_select.set_defaults(func=cmd_select)

    p_profile = sub.add_parser("profile", help="write per-slice score profiles")
    _add_pipeline_flags(p_profile, with_profile=True)
    p_profile.set_defaults(func=cmd_profile)

    p_compare = sub.add_parser("compare",
                               help="compare edge-density vs entropy windows")
    _add_pipeline_flags(p_compare)
    p_compare.set_defaults(func=cmd_compare)

    p_committee = sub.add_parser("committee",
                                 help="max-confidence committee over predictions")
    p_committee.add_argument("--predictions", required=True, metavar="JSONL")
    p_committee.add_argument("--truth", required=True, metavar="CSV")
    p_committee.add_argument("--output", required=True, metavar="DIR")
    p_committee.add_argument("--models", metavar="IDS",
                             help="comma-separated registry order for tie-breaks")
    p_committee.set_defaults(func=cmd_committee)

    p_ablate = sub.add_parser("ablate", help="score every model subset")
    p_ablate.add_argument("--predictions", required=True, metavar="JSONL")
    p_ablate.add_argument("--truth", required=True, metavar="CSV")
    p_ablate.add_argument("--output", required=True, metavar="DIR")
    p_ablate.add_argument("--models", metavar="IDS")
    p_ablate.add_argument("--subsets", metavar="SPEC",
                          help='subsets like "m1,m2,m1+m2" (default: all)')
    p_ablate.set_defaults(func=cmd_ablate)

    p_cohort = sub.add_parser("cohort", help="build a labeled cohort from metadata")
    p_cohort.add_argument("--metadata", required=True, metavar="CSV")
    p_cohort.add_argument("--output", required=True, metavar="DIR")
    p_cohort.add_argument("--min-age", type=float, default=60.0, dest="min_age")
    p_cohort.add_argument("--session", default="mpr-1")
    p_cohort.add_argument("--test-fraction", type=float, default=0.10,
                          dest="test_fraction")
    p_cohort.add_argument("--seed", type=int, default=0)
    p_cohort.set_defaults(func=cmd_cohort)
    return parser


def _configure_logging() -> None:
    name = os.environ.get("SLICESCOUT_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SliceScoutError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
