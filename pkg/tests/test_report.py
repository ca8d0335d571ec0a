import json
import shutil

import numpy as np
import pytest

from src.core.au_catalog import AU_COUNT
from src.core.types import AUFrame, EmotionLabel, FrameFeatures, SaliencyMap
from src.features.extract import FeatureConfig, aggregate_trial, extract_frame_features
from src.ingest.manifest import load_manifest, write_manifest
from src.report.analysis import (
    HISTOGRAM_BINS,
    Corpus,
    TrialRecord,
    analyze_corpus,
    run_analysis,
)
from src.report.emit import (
    CCA_EMOTION_CSV,
    CCA_SALIENCY_CSV,
    PCC_CSV,
    canonical_json,
    emit_json,
    emit_plot_data,
    format_float,
    plot_tables,
)
from src.report.synth import LABELS_CSV, MANIFEST_JSON, SynthConfig, render_frame, synth_corpus
from src.utils.config import RunConfig
from src.utils.errors import CorruptImage, TooFewTrials


@pytest.fixture(scope="module")
def report(corpus_dir):
    return analyze_corpus(corpus_dir / MANIFEST_JSON, corpus_dir / LABELS_CSV, RunConfig())


def _cell(report, feature, emotion):
    return next(cell for cell in report.pcc_table if (cell.feature, cell.emotion) == (feature, emotion))


class TestCanonicalJson:
    def test_layout(self):
        assert canonical_json({"b": 1.5, "a": None, "c": [1, True]}) == (
            b'{\n  "a": null,\n  "b": 1.5,\n  "c": [\n    1,\n    true\n  ]\n}\n'
        )

    def test_float_spelling(self):
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(2.0) == "2"
        with pytest.raises(ValueError):
            format_float(float("nan"))

    def test_report_round_trip(self, report):
        emitted = emit_json(report)
        assert canonical_json(json.loads(emitted)) == emitted


class TestRunAnalysis:
    def test_sections(self, report):
        assert len(report.pcc_table) == 4
        assert all(cell.error is None for cell in report.pcc_table)
        assert report.cca_saliency_vs_au.level == "frame"
        assert report.cca_au_vs_emotion.level == "trial"
        assert report.cca_saliency_vs_au.n_observations == 30 * 6
        assert report.cca_au_vs_emotion.n_observations == 30
        assert set(report.cca_saliency_vs_au.top_contributors) == {"saliency_area", "region_count"}
        assert set(report.cca_au_vs_emotion.top_contributors) == {"valence", "arousal"}

    def test_planted_directions(self, report):
        assert _cell(report, "region_count", "valence").r > 0
        assert _cell(report, "region_count", "arousal").r < 0

    def test_top_lists_are_bounded(self, report):
        for section in (report.cca_saliency_vs_au, report.cca_au_vs_emotion):
            for top in section.top_contributors.values():
                assert top.error is None
                assert len(top.all) <= 5
                assert len(top.positive) <= 5 and all(item.share > 0 for item in top.positive)
                assert len(top.negative) <= 5 and all(item.share < 0 for item in top.negative)

    def test_census_and_profile(self, report):
        assert sum(report.quadrant_census.values()) == 30
        assert sum(profile.trials for profile in report.quadrant_profile.values()) == 30
        assert list(report.region_count_histogram) == list(HISTOGRAM_BINS)
        assert sum(report.region_count_histogram.values()) == 30 * 6
        assert report.region_count_histogram["0"] == 0

    def test_provenance(self, report):
        provenance = report.provenance
        assert (provenance.threshold, provenance.connectivity, provenance.target_fps) == (0.5, 8, 2.0)
        assert provenance.trials_in_manifest == provenance.trials_complete == 30
        assert provenance.excluded == []
        assert len(provenance.corpus_digest) == 64

    def test_rerun_is_byte_identical(self, corpus_dir, report):
        again = analyze_corpus(corpus_dir / MANIFEST_JSON, corpus_dir / LABELS_CSV, RunConfig(workers=1))
        assert emit_json(again) == emit_json(report)

    def test_manifest_order_does_not_matter(self, corpus_copy, report):
        manifest = corpus_copy / MANIFEST_JSON
        entries = json.loads(manifest.read_text())["trials"]
        manifest.write_text(json.dumps({"trials": entries[::-1]}))
        shuffled = analyze_corpus(manifest, corpus_copy / LABELS_CSV, RunConfig())
        assert emit_json(shuffled) == emit_json(report)

    def test_missing_au_table_excludes_trial(self, corpus_copy):
        (corpus_copy / "trials" / "trial_0003" / "au.csv").unlink()
        result = analyze_corpus(corpus_copy / MANIFEST_JSON, corpus_copy / LABELS_CSV, RunConfig())
        excluded = [(item.trial_id, item.stream) for item in result.provenance.excluded]
        assert excluded == [("trial_0003", "au")]
        assert result.provenance.excluded[0].reason.startswith("InputUnavailable")
        assert _cell(result, "region_count", "valence").n == 30
        assert result.cca_au_vs_emotion.n_observations == 29
        assert result.provenance.trials_complete == 29

    def test_exclusion_reason_does_not_depend_on_location(self, corpus_dir, tmp_path):
        reports = []
        for name in ("first", "second/nested"):
            corpus = tmp_path / name
            shutil.copytree(corpus_dir, corpus)
            shutil.rmtree(corpus / "trials" / "trial_0004" / "saliency")
            reports.append(analyze_corpus(corpus / MANIFEST_JSON, corpus / LABELS_CSV, RunConfig()))
        reason = reports[0].provenance.excluded[0].reason
        assert reason.startswith("EmptyTrial")
        assert str(tmp_path) not in reason
        assert "trials/trial_0004/saliency" in reason
        assert emit_json(reports[0]) == emit_json(reports[1])

    def test_corrupt_frame_aborts_instead_of_excluding(self, corpus_copy):
        frame = corpus_copy / "trials" / "trial_0001" / "saliency" / "frame_000000.pgm"
        frame.write_bytes(frame.read_bytes()[:40])
        with pytest.raises(CorruptImage):
            analyze_corpus(corpus_copy / MANIFEST_JSON, corpus_copy / LABELS_CSV, RunConfig())


def _records(labels, seed=0):
    rng = np.random.default_rng(seed)
    records = []
    for i, (valence, arousal) in enumerate(labels):
        frames = [
            FrameFeatures(frame_index=j, timestamp=j / 2, saliency_area=0.05 * (i + 1), region_count=1 + (i + j) % 3)
            for j in range(4)
        ]
        au_frames = tuple(
            AUFrame(frame_index=j, timestamp=j / 2, presence=tuple(rng.integers(0, 2, AU_COUNT)))
            for j in range(4)
        )
        records.append(TrialRecord(
            trial_id=f"t{i:02d}",
            features=aggregate_trial(f"t{i:02d}", frames),
            au_frames=au_frames,
            label=EmotionLabel(f"t{i:02d}", valence, arousal),
        ))
    return records


class TestDegenerateCorpora:
    def test_identical_labels_reported_per_cell(self):
        result = run_analysis(Corpus(trials=tuple(_records([(6, 4)] * 5))), RunConfig())
        assert len(result.pcc_table) == 4
        for cell in result.pcc_table:
            assert cell.r is None
            assert cell.error.startswith("DegenerateInput")
        assert b'"r": null' in emit_json(result)

    def test_small_corpus_keeps_cca_errors_inside_report(self):
        result = run_analysis(Corpus(trials=tuple(_records([(6, 4), (3, 7), (7, 7), (2, 2)]))), RunConfig())
        assert result.cca_au_vs_emotion.error is not None
        assert result.cca_au_vs_emotion.correlations is None
        assert b'"correlations": null' in emit_json(result)

    def test_too_few_trials(self):
        with pytest.raises(TooFewTrials):
            run_analysis(Corpus(trials=tuple(_records([(6, 4), (3, 7)]))), RunConfig())

    def test_unlabeled_trial_is_excluded(self):
        records = _records([(6, 4), (3, 7), (7, 7), (2, 2)])
        records[1] = TrialRecord(trial_id=records[1].trial_id, features=records[1].features,
                                 au_frames=records[1].au_frames)
        result = run_analysis(Corpus(trials=tuple(records)), RunConfig())
        assert [(item.trial_id, item.stream) for item in result.provenance.excluded] == [("t01", "labels")]
        assert sum(result.quadrant_census.values()) == 3


class TestPlotData:
    def test_files_and_values(self, report, tmp_path):
        tables = plot_tables(report)
        pcc_rows = tables[PCC_CSV]
        assert len(pcc_rows) == 4
        for (name, value, sign), cell in zip(pcc_rows, report.pcc_table):
            assert name == f"{cell.feature}_vs_{cell.emotion}"
            assert value == format_float(cell.r)
            assert sign == ("+" if cell.r > 0 else "-")

        shares = report.cca_saliency_vs_au.y_shares
        assert len(tables[CCA_SALIENCY_CSV]) == len(shares)
        assert len(tables[CCA_EMOTION_CSV]) == len(report.cca_au_vs_emotion.x_shares)
        top_tables = [name for name in tables if name.startswith("top5_")]
        assert len(top_tables) == 12
        assert all(len(tables[name]) <= 5 for name in top_tables)

        written = emit_plot_data(report, tmp_path)
        assert sorted(path.name for path in written) == sorted(tables)
        lines = (tmp_path / PCC_CSV).read_text().splitlines()
        assert lines[0] == "name,value,sign"
        assert len(lines) == 5

    def test_json_and_csv_agree(self, report):
        document = json.loads(emit_json(report))
        csv_values = {name: value for name, value, _ in plot_tables(report)[CCA_EMOTION_CSV]}
        for name, share in document["cca_au_vs_emotion"]["x_shares"].items():
            assert csv_values[name] == format_float(share)


class TestSynth:
    def test_three_rectangles_are_three_regions(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            grid, covered = render_frame(rng, 64, 64, 3)
            features = extract_frame_features(SaliencyMap.from_grid(grid), FeatureConfig(), 0, 0.0)
            assert features.region_count == 3
            assert features.saliency_area == pytest.approx(covered / (64 * 64))

    def test_deterministic(self, tmp_path):
        config = SynthConfig(seed=5, trial_count=10, frames_per_trial=2, width=32, height=32)
        synth_corpus(config, tmp_path / "a")
        synth_corpus(config, tmp_path / "b")
        files_a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
        assert files_a == files_b
        assert len(files_a) == 2 + 10 * 3
        for relative in files_a:
            assert (tmp_path / "a" / relative).read_bytes() == (tmp_path / "b" / relative).read_bytes()

    def test_noiseless_plant_is_recovered_exactly(self, tmp_path):
        config = SynthConfig(seed=3, trial_count=12, frames_per_trial=3, width=32, height=32, noise_sd=0.0)
        manifest = synth_corpus(config, tmp_path)
        assert len(load_manifest(manifest)) == 12
        result = analyze_corpus(manifest, tmp_path / LABELS_CSV, RunConfig())
        assert _cell(result, "region_count", "valence").r == pytest.approx(1.0, abs=1e-9)
        assert _cell(result, "region_count", "arousal").r == pytest.approx(-1.0, abs=1e-9)

    def test_config_bounds(self):
        with pytest.raises(ValueError):
            SynthConfig(trial_count=9)
        with pytest.raises(ValueError):
            SynthConfig(frames_per_trial=1)

    def test_manifest_round_trip(self, tmp_path, corpus_dir):
        entries = load_manifest(corpus_dir / MANIFEST_JSON)
        assert [entry.trial_id for entry in entries] == sorted(entry.trial_id for entry in entries)
        write_manifest(entries, tmp_path / "copy.json")
        assert load_manifest(tmp_path / "copy.json")[0].saliency_dir == entries[0].saliency_dir

