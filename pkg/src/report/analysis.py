"""
The three corpus analyses: saliency features vs felt emotions (PCC),
saliency features vs facial AUs (frame-level CCA) and facial AUs vs felt
emotions (trial-level CCA), plus the circumplex census.
"""

import os
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.au_catalog import AU_CATALOG
from src.core.quadrant import Quadrant, classify_quadrant
from src.core.types import AUFrame, EmotionLabel, TrialFeatures, au_presence_matrix
from src.features.extract import extract_stream_features
from src.ingest.labels import read_labels_csv
from src.ingest.loader import load_au_stream, load_saliency_stream
from src.ingest.manifest import TrialManifestEntry, corpus_digest, load_manifest
from src.pipeline.jobs import JobStatus, run_parallel
from src.report.models import (
    AnalysisReport,
    CcaSection,
    Contributor,
    ExcludedTrial,
    PccCell,
    Provenance,
    QuadrantProfile,
    TopContributors,
)
from src.stats.cca import cca
from src.stats.correlation import pearson
from src.stats.matrix import DataMatrix, drop_constant_columns
from src.stats.shares import top_k_by_sign, top_k_contributors
from src.utils.config import RunConfig
from src.utils.errors import (
    EmptyTrial,
    InputUnavailable,
    StatsError,
    TooFewTrials,
    error_marker,
)
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

FEATURES = ("saliency_area", "region_count")
EMOTIONS = ("valence", "arousal")
TOP_K = 5
MIN_TRIALS = 3
HISTOGRAM_BINS = ("0", "1", "2", "3", "4+")

# Only an absent stream excludes a trial; format and rate errors abort the run.
MISSING_STREAM_ERRORS = (InputUnavailable, EmptyTrial)


@dataclass(frozen=True)
class TrialRecord:
    """Whatever could be loaded for one trial; missing streams are None."""
    trial_id: str
    features: Optional[TrialFeatures] = None
    au_frames: Optional[Tuple[AUFrame, ...]] = None
    label: Optional[EmotionLabel] = None


@dataclass(frozen=True)
class Corpus:
    trials: Tuple[TrialRecord, ...]
    exclusions: Tuple[ExcludedTrial, ...] = ()
    digest: str = ""


def _feature_value(trial: TrialFeatures, feature: str) -> float:
    return trial.mean_saliency_area if feature == "saliency_area" else trial.mean_region_count


def _frame_feature_values(trial: TrialFeatures, feature: str) -> List[float]:
    if feature == "saliency_area":
        return [frame.saliency_area for frame in trial.frames]
    return [float(frame.region_count) for frame in trial.frames]


def pcc_table(records: Sequence[TrialRecord]) -> List[PccCell]:
    """Trial-level PCC of each saliency feature against each emotion dimension."""
    usable = [record for record in records if record.features is not None and record.label is not None]
    cells: List[PccCell] = []
    for feature in FEATURES:
        xs = [_feature_value(record.features, feature) for record in usable]
        for emotion in EMOTIONS:
            ys = [getattr(record.label, emotion) for record in usable]
            try:
                result = pearson(xs, ys)
            except StatsError as e:
                logger.warning(f"PCC {feature} vs {emotion}: {e}")
                cells.append(PccCell(feature=feature, emotion=emotion, n=len(usable), error=error_marker(e)))
                continue
            cells.append(PccCell(feature=feature, emotion=emotion, r=result.r, p=result.p, n=result.n))
    return cells


def _contributors(pairs: Sequence[Tuple[str, float]]) -> List[Contributor]:
    return [Contributor(name=name, share=share) for name, share in pairs]


def target_contributors(target: DataMatrix, block: DataMatrix, ridge: float) -> TopContributors:
    """
    CCA of a single target variable against a block, ranked.

    The target sits on the X side so its weight is positive and block share
    signs read as contributions to a high target value.
    """
    name = target.columns[0]
    try:
        target_kept, _ = drop_constant_columns(target)
        block_kept, dropped = drop_constant_columns(block)
        result = cca(target_kept, block_kept, ridge=ridge)
    except StatsError as e:
        logger.warning(f"CCA for {name}: {e}")
        return TopContributors(target=name, error=error_marker(e))

    shares = list(zip(result.y_names, (float(s) for s in result.y_shares)))
    positive, negative = top_k_by_sign(shares, TOP_K)
    return TopContributors(
        target=name,
        correlation=float(result.correlations[0]),
        all=_contributors(top_k_contributors(shares, min(TOP_K, len(shares)))),
        positive=_contributors(positive),
        negative=_contributors(negative),
        dropped_columns=dropped,
    )


def cca_section(
    x: DataMatrix,
    y: DataMatrix,
    ridge: float,
    level: str,
    targets: DataMatrix,
    block: DataMatrix,
) -> CcaSection:
    """Joint CCA of x against y, plus one ranked CCA per column of ``targets`` against ``block``."""
    section = CcaSection(level=level, n_observations=x.n_rows)
    try:
        x_kept, x_dropped = drop_constant_columns(x)
        y_kept, y_dropped = drop_constant_columns(y)
        result = cca(x_kept, y_kept, ridge=ridge)
    except StatsError as e:
        logger.warning(f"{level}-level CCA: {e}")
        section.error = error_marker(e)
    else:
        section.x_variables = list(result.x_names)
        section.y_variables = list(result.y_names)
        section.dropped_columns = x_dropped + y_dropped
        section.correlations = [float(rho) for rho in result.correlations]
        section.x_shares = result.named_x_shares()
        section.y_shares = result.named_y_shares()

    for name in targets.columns:
        section.top_contributors[name] = target_contributors(targets.select([name]), block, ridge)
    return section


def saliency_vs_au(records: Sequence[TrialRecord], ridge: float) -> CcaSection:
    """Frame-level CCA; the streams of a trial are paired by sample ordinal."""
    feature_rows: List[List[float]] = []
    au_rows: List[np.ndarray] = []
    for record in records:
        if record.features is None or record.au_frames is None:
            continue
        count = min(len(record.features.frames), len(record.au_frames))
        columns = [_frame_feature_values(record.features, feature)[:count] for feature in FEATURES]
        feature_rows.extend(zip(*columns))
        au_rows.append(au_presence_matrix(record.au_frames[:count]))

    saliency = DataMatrix(columns=FEATURES, values=np.array(feature_rows, dtype=np.float64).reshape(-1, len(FEATURES)))
    aus = DataMatrix(
        columns=tuple(AU_CATALOG.codes),
        values=np.vstack(au_rows) if au_rows else np.zeros((0, len(AU_CATALOG))),
    )
    return cca_section(saliency, aus, ridge, level="frame", targets=saliency, block=aus)


def au_vs_emotion(records: Sequence[TrialRecord], ridge: float) -> CcaSection:
    """Trial-level CCA of mean AU presence against valence and arousal."""
    usable = [record for record in records if record.au_frames and record.label is not None]
    rates = [au_presence_matrix(record.au_frames).mean(axis=0) for record in usable]
    aus = DataMatrix(
        columns=tuple(AU_CATALOG.codes),
        values=np.array(rates, dtype=np.float64).reshape(-1, len(AU_CATALOG)),
    )
    emotions = DataMatrix(
        columns=EMOTIONS,
        values=np.array(
            [[record.label.valence, record.label.arousal] for record in usable], dtype=np.float64
        ).reshape(-1, len(EMOTIONS)),
    )
    return cca_section(aus, emotions, ridge, level="trial", targets=emotions, block=aus)


def quadrant_census(records: Sequence[TrialRecord]) -> Dict[str, int]:
    counts = Counter(classify_quadrant(record.label) for record in records if record.label is not None)
    return {quadrant.value: counts.get(quadrant, 0) for quadrant in Quadrant}


def quadrant_profile(records: Sequence[TrialRecord]) -> Dict[str, QuadrantProfile]:
    """Mean trial-level saliency features of the trials in each quadrant."""
    grouped: Dict[Quadrant, List[TrialFeatures]] = {quadrant: [] for quadrant in Quadrant}
    for record in records:
        if record.label is not None and record.features is not None:
            grouped[classify_quadrant(record.label)].append(record.features)

    profile: Dict[str, QuadrantProfile] = {}
    for quadrant, trials in grouped.items():
        if not trials:
            profile[quadrant.value] = QuadrantProfile(trials=0)
            continue
        profile[quadrant.value] = QuadrantProfile(
            trials=len(trials),
            mean_saliency_area=sum(t.mean_saliency_area for t in trials) / len(trials),
            mean_region_count=sum(t.mean_region_count for t in trials) / len(trials),
        )
    return profile


def region_count_histogram(records: Sequence[TrialRecord]) -> Dict[str, int]:
    counts = {name: 0 for name in HISTOGRAM_BINS}
    for record in records:
        if record.features is None:
            continue
        for frame in record.features.frames:
            key = str(frame.region_count) if frame.region_count < 4 else "4+"
            counts[key] += 1
    return counts


def run_analysis(corpus: Corpus, config: RunConfig) -> AnalysisReport:
    """
    Compute every report section from loaded trial data.

    Each analysis uses the trials that carry the streams it needs; a failing
    statistic is recorded in its cell rather than aborting the report.

    Raises:
        TooFewTrials: fewer than 3 trials have features, AUs and a label
    """
    records = sorted(corpus.trials, key=lambda record: record.trial_id)
    exclusions = list(corpus.exclusions)
    for record in records:
        if record.label is None:
            exclusions.append(ExcludedTrial(trial_id=record.trial_id, stream="labels", reason="no label row"))

    complete = [
        record for record in records
        if record.features is not None and record.au_frames is not None and record.label is not None
    ]
    if len(complete) < MIN_TRIALS:
        raise TooFewTrials(
            f"{len(complete)} trials have complete data; at least {MIN_TRIALS} are required"
        )

    logger.info(f"Analyzing {len(records)} trials ({len(complete)} complete)")
    return AnalysisReport(
        pcc_table=pcc_table(records),
        cca_saliency_vs_au=saliency_vs_au(records, config.ridge),
        cca_au_vs_emotion=au_vs_emotion(records, config.ridge),
        quadrant_census=quadrant_census(records),
        quadrant_profile=quadrant_profile(records),
        region_count_histogram=region_count_histogram(records),
        provenance=Provenance(
            **config.provenance(),
            corpus_digest=corpus.digest,
            trials_in_manifest=len(records),
            trials_complete=len(complete),
            excluded=sorted(exclusions, key=lambda item: (item.trial_id, item.stream)),
        ),
    )


def _portable_reason(error: Exception, corpus_root: Optional[Path]) -> str:
    message = error_marker(error)
    if corpus_root is None or str(corpus_root) in ("", "."):
        return message
    return message.replace(str(corpus_root) + os.sep, "")


def load_corpus(
    entries: Sequence[TrialManifestEntry],
    labels: Sequence[EmotionLabel],
    config: RunConfig,
    digest: str = "",
    show_progress: bool = False,
    corpus_root: Optional[Path] = None,
) -> Corpus:
    """
    Load every trial's streams on the worker pool.

    A missing stream excludes the trial from analyses needing it; its reason
    names paths relative to ``corpus_root``. Any other load failure is raised
    (first failing trial in id order).
    """
    by_id = {entry.trial_id: entry for entry in entries}
    label_by_id = {label.trial_id: label for label in labels}
    unmatched = sorted(set(label_by_id) - set(by_id))
    if unmatched:
        logger.warning(f"{len(unmatched)} labels have no manifest entry and are ignored")
    feature_config = config.feature_config()

    saliency_jobs = run_parallel(
        by_id,
        lambda trial_id: extract_stream_features(
            load_saliency_stream(by_id[trial_id], config.target_fps), feature_config
        ),
        workers=config.workers,
        show_progress=show_progress,
        description="saliency streams",
    )
    au_jobs = run_parallel(
        by_id,
        lambda trial_id: load_au_stream(by_id[trial_id], config.target_fps),
        workers=config.workers,
        show_progress=show_progress,
        description="AU streams",
    )

    records: List[TrialRecord] = []
    exclusions: List[ExcludedTrial] = []
    for trial_id in sorted(by_id):
        streams = {"saliency": saliency_jobs[trial_id], "au": au_jobs[trial_id]}
        for stream, job in streams.items():
            if job.status == JobStatus.FAILED:
                if not isinstance(job.error, MISSING_STREAM_ERRORS):
                    raise job.error
                reason = _portable_reason(job.error, corpus_root)
                exclusions.append(ExcludedTrial(trial_id=trial_id, stream=stream, reason=reason))
        records.append(TrialRecord(
            trial_id=trial_id,
            features=saliency_jobs[trial_id].result if saliency_jobs[trial_id].status == JobStatus.COMPLETED else None,
            au_frames=au_jobs[trial_id].result if au_jobs[trial_id].status == JobStatus.COMPLETED else None,
            label=label_by_id.get(trial_id),
        ))
    return Corpus(trials=tuple(records), exclusions=tuple(exclusions), digest=digest)


def analyze_corpus(
    manifest_path: Path,
    labels_path: Path,
    config: RunConfig,
    show_progress: bool = False,
) -> AnalysisReport:
    """Read manifest and labels from disk, load all trials, run the analyses."""
    entries = load_manifest(manifest_path)
    try:
        with open(labels_path, "r", encoding="utf-8", newline="") as handle:
            labels = read_labels_csv(handle)
    except OSError as e:
        raise InputUnavailable(f"cannot read labels {labels_path}: {e}") from e

    digest = corpus_digest(entries, labels_path)
    corpus = load_corpus(
        entries, labels, config, digest=digest, show_progress=show_progress,
        corpus_root=Path(manifest_path).parent,
    )
    return run_analysis(corpus, config)
