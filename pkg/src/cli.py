"""
Command-line entry point: saliency / extract / report / synth.

Exit codes: 0 ok, 1 usage, 2 I/O, 3 format, 4 empty trial, 5 too few trials.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from src.features.extract import extract_stream_features
from src.features.writer import write_feature_csvs
from src.ingest.images import list_frame_files, read_bytes, read_gray_image, write_saliency_frame
from src.ingest.labels import read_labels_csv
from src.ingest.loader import load_saliency_stream
from src.ingest.manifest import load_manifest
from src.pipeline.jobs import JobStatus, run_parallel
from src.report.analysis import analyze_corpus
from src.report.emit import plot_tables, write_report
from src.report.synth import LABELS_CSV, SynthConfig, synth_corpus
from src.report.validator import (
    validate_feature_outputs,
    validate_report_outputs,
    validate_saliency_outputs,
)
from src.saliency.spectral_residual import DEFAULT_SIGMA, GrayImage, spectral_residual_saliency
from src.utils.config import RunConfig, build_run_config
from src.utils.errors import InputUnavailable, SalienceAffectError
from src.utils.logger import set_log_level, setup_logger

logger = setup_logger(__name__)

PROG = "salience-affect"
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 instead of argparse's 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default(model: type, name: str):
    return model.model_fields[name].default


def _size(text: str) -> Tuple[int, int]:
    try:
        width, height = (int(part) for part in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like WxH, got {text!r}") from None
    return width, height


def _remove(paths: Sequence[Path]) -> None:
    for path in paths:
        try:
            Path(path).unlink()
        except FileNotFoundError:
            pass
        except OSError as e:
            logger.warning(f"Could not remove partial output {path}: {e}")


def _raise_first_failure(jobs) -> None:
    for job_id in sorted(jobs):
        job = jobs[job_id]
        if job.status == JobStatus.FAILED:
            raise job.error


def cmd_saliency(input_dir: Path, out_dir: Path, sigma: float = DEFAULT_SIGMA,
                 workers: Optional[int] = None, show_progress: bool = False) -> int:
    """Write one spectral residual saliency map per input frame, same file names."""
    files = list_frame_files(input_dir)
    if not files:
        raise InputUnavailable(f"no frame_%06d.pgm|png images in {input_dir}")
    if sigma <= 0:
        raise UsageError(f"--sigma must be positive, got {sigma}")

    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InputUnavailable(f"cannot create {out_dir}: {e}") from e

    by_name = {path.name: path for path in files}

    def process(name: str) -> Path:
        image = GrayImage.from_grid(read_gray_image(read_bytes(by_name[name])))
        target = out_dir / name
        write_saliency_frame(spectral_residual_saliency(image, sigma), target)
        return target

    jobs = run_parallel(by_name, process, workers=workers, show_progress=show_progress, description="frames")
    written = [job.result for job in jobs.values() if job.status == JobStatus.COMPLETED]
    try:
        _raise_first_failure(jobs)
        validate_saliency_outputs(out_dir, len(files))
    except Exception:
        _remove(written)
        raise
    logger.info(f"Wrote {len(written)} saliency maps to {out_dir}")
    return EXIT_OK


def cmd_extract(manifest: Path, config: RunConfig, show_progress: bool = False) -> int:
    """Write frame- and trial-level feature CSVs for every trial in the manifest."""
    entries = load_manifest(manifest)
    by_id = {entry.trial_id: entry for entry in entries}
    feature_config = config.feature_config()

    jobs = run_parallel(
        by_id,
        lambda trial_id: extract_stream_features(
            load_saliency_stream(by_id[trial_id], config.target_fps), feature_config
        ),
        workers=config.workers,
        show_progress=show_progress,
        description="trials",
    )
    _raise_first_failure(jobs)

    out_dir = Path(config.out_dir)
    written: List[Path] = []
    try:
        written = list(write_feature_csvs([job.result for job in jobs.values()], out_dir))
        validate_feature_outputs(out_dir, expected_trials=by_id)
    except OSError as e:
        _remove(written)
        raise InputUnavailable(f"cannot write features to {out_dir}: {e}") from e
    except Exception:
        _remove(written)
        raise
    return EXIT_OK


def cmd_report(manifest: Path, labels: Path, config: RunConfig, show_progress: bool = False) -> int:
    """Run the analyses and write report.json plus the plot CSVs."""
    report = analyze_corpus(manifest, labels, config, show_progress=show_progress)

    out_dir = Path(config.out_dir)
    written: List[Path] = []
    try:
        written = write_report(report, out_dir)
        validate_report_outputs(out_dir, plot_tables(report))
    except OSError as e:
        _remove(written)
        raise InputUnavailable(f"cannot write report to {out_dir}: {e}") from e
    except Exception:
        _remove(written)
        raise
    return EXIT_OK


def cmd_synth(config: SynthConfig, out_dir: Path, show_progress: bool = False) -> int:
    """Materialize a synthetic corpus and check it reads back."""
    try:
        manifest = synth_corpus(config, out_dir, show_progress=show_progress)
    except OSError as e:
        raise InputUnavailable(f"cannot write corpus to {out_dir}: {e}") from e

    entries = load_manifest(manifest)
    with open(Path(out_dir) / LABELS_CSV, "r", encoding="utf-8", newline="") as handle:
        labels = read_labels_csv(handle)
    if len(entries) != config.trial_count or len(labels) != config.trial_count:
        raise SalienceAffectError(
            f"corpus holds {len(entries)} manifest entries and {len(labels)} labels, "
            f"expected {config.trial_count}"
        )
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    parser.add_argument("--progress", action="store_true", help="Show progress bars")


def _add_feature_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--manifest", type=Path, required=True, help="Trial manifest JSON")
    parser.add_argument("--out", type=Path, required=True, help="Output directory")
    parser.add_argument("--config", type=Path, default=None,
                        help="YAML file of settings; explicit flags take precedence (default: none)")
    parser.add_argument("--threshold", type=float, default=None,
                        help=f"Binarization threshold (default: {_default(RunConfig, 'threshold')})")
    parser.add_argument("--connectivity", type=int, choices=(4, 8), default=None,
                        help=f"Region adjacency (default: {_default(RunConfig, 'connectivity')})")
    parser.add_argument("--min-region-frac", type=float, default=None,
                        help=f"Drop regions below this share of the frame "
                             f"(default: {_default(RunConfig, 'min_region_fraction')})")
    parser.add_argument("--fps", type=float, default=None,
                        help=f"Target sampling rate (default: {_default(RunConfig, 'target_fps')})")
    parser.add_argument("--workers", type=int, default=None,
                        help="Worker threads (default: min(8, CPU count))")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Saliency features, facial AUs and felt emotions.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    saliency = commands.add_parser("saliency", help="Spectral residual saliency maps for a frame directory")
    saliency.add_argument("--in", dest="input_dir", type=Path, required=True, help="Input frame directory")
    saliency.add_argument("--out", type=Path, required=True, help="Output directory for maps")
    saliency.add_argument("--sigma", type=float, default=DEFAULT_SIGMA,
                          help=f"Gaussian smoothing in pixels (default: {DEFAULT_SIGMA})")
    saliency.add_argument("--workers", type=int, default=None, help="Worker threads (default: min(8, CPU count))")
    _add_common(saliency)

    extract = commands.add_parser("extract", help="Frame- and trial-level saliency features")
    _add_feature_flags(extract)
    _add_common(extract)

    report = commands.add_parser("report", help="PCC, CCA and quadrant analyses")
    _add_feature_flags(report)
    report.add_argument("--labels", type=Path, required=True, help="trial_id,valence,arousal CSV")
    report.add_argument("--ridge", type=float, default=None,
                        help=f"CCA covariance ridge (default: {_default(RunConfig, 'ridge')})")
    _add_common(report)

    synth = commands.add_parser("synth", help="Synthetic corpus with planted effects")
    synth.add_argument("--seed", type=int, default=_default(SynthConfig, "seed"),
                       help=f"RNG seed (default: {_default(SynthConfig, 'seed')})")
    synth.add_argument("--trials", type=int, default=_default(SynthConfig, "trial_count"),
                       help=f"Number of trials (default: {_default(SynthConfig, 'trial_count')})")
    synth.add_argument("--frames", type=int, default=_default(SynthConfig, "frames_per_trial"),
                       help=f"Frames per trial (default: {_default(SynthConfig, 'frames_per_trial')})")
    synth.add_argument("--size", type=_size, default=(_default(SynthConfig, "width"), _default(SynthConfig, "height")),
                       help=f"Frame size WxH (default: {_default(SynthConfig, 'width')}x{_default(SynthConfig, 'height')})")
    synth.add_argument("--out", type=Path, required=True, help="Output directory")
    synth.add_argument("--fps", type=float, default=_default(SynthConfig, "fps"),
                       help=f"Native rate of both streams (default: {_default(SynthConfig, 'fps')})")
    synth.add_argument("--multi-share", type=float, default=_default(SynthConfig, "multi_region_share"),
                       help=f"Share of multi-region trials (default: {_default(SynthConfig, 'multi_region_share')})")
    for flag, field in (
        ("--region-valence-slope", "region_valence_slope"),
        ("--region-arousal-slope", "region_arousal_slope"),
        ("--area-valence-slope", "area_valence_slope"),
        ("--area-arousal-slope", "area_arousal_slope"),
    ):
        synth.add_argument(flag, type=float, default=_default(SynthConfig, field),
                           help=f"Planted effect (default: {_default(SynthConfig, field)})")
    synth.add_argument("--noise", type=float, default=_default(SynthConfig, "noise_sd"),
                       help=f"Label noise standard deviation (default: {_default(SynthConfig, 'noise_sd')})")
    _add_common(synth)

    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    return build_run_config(
        config_file=args.config,
        threshold=args.threshold,
        connectivity=args.connectivity,
        min_region_fraction=args.min_region_frac,
        target_fps=args.fps,
        ridge=getattr(args, "ridge", None),
        workers=args.workers,
        out_dir=args.out,
        manifest=args.manifest,
    )


def _synth_config(args: argparse.Namespace) -> SynthConfig:
    width, height = args.size
    return SynthConfig(
        seed=args.seed,
        trial_count=args.trials,
        frames_per_trial=args.frames,
        width=width,
        height=height,
        fps=args.fps,
        multi_region_share=args.multi_share,
        region_valence_slope=args.region_valence_slope,
        region_arousal_slope=args.region_arousal_slope,
        area_valence_slope=args.area_valence_slope,
        area_arousal_slope=args.area_arousal_slope,
        noise_sd=args.noise,
    )


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "saliency":
        return cmd_saliency(args.input_dir, args.out, args.sigma, args.workers, args.progress)
    if args.command == "extract":
        return cmd_extract(args.manifest, _run_config(args), args.progress)
    if args.command == "report":
        return cmd_report(args.manifest, args.labels, _run_config(args), args.progress)
    if args.command == "synth":
        return cmd_synth(_synth_config(args), args.out, args.progress)
    raise UsageError(f"unknown command {args.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        set_log_level(logging.DEBUG)
    elif args.quiet:
        set_log_level(logging.WARNING)

    try:
        return _dispatch(args)
    except ValidationError as e:
        logger.error(f"Invalid settings: {e}")
        return EXIT_USAGE
    except UsageError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except SalienceAffectError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO



if __name__ == "__main__":
    sys.exit(main())
