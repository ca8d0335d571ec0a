import io
import json

import numpy as np
import pytest
from PIL import Image

from src.core.au_catalog import AU_CATALOG, AU_COUNT
from src.core.types import AUFrame, SaliencyMap
from src.ingest.au_csv import read_au_csv
from src.ingest.images import (
    frame_file_name,
    list_frame_files,
    read_gray_image,
    read_saliency_frame,
    write_saliency_frame,
)
from src.ingest.labels import read_labels_csv
from src.ingest.loader import load_au_stream, load_trial
from src.ingest.manifest import (
    TrialManifestEntry,
    corpus_digest,
    load_manifest,
    parse_manifest,
    write_manifest,
)
from src.ingest.sampling import sample_frames
from src.report.emit import emit_au_csv
from src.utils.errors import (
    CorruptImage,
    EmptyTrial,
    InputUnavailable,
    MalformedRow,
    ManifestError,
    MissingColumn,
    NonBinaryPresence,
    ScoreOutOfRange,
    TargetRateExceedsNative,
    UnsupportedFormat,
)


def _image_bytes(samples, fmt="PPM", mode=None) -> bytes:
    image = Image.fromarray(np.asarray(samples, dtype=np.uint8))
    if mode is not None:
        image = image.convert(mode)
    buffer = io.BytesIO()
    image.save(buffer, format=fmt)
    return buffer.getvalue()


def _au_header(columns=None) -> str:
    return ",".join(["frame", "timestamp"] + (columns or AU_CATALOG.presence_columns))


class TestImages:
    def test_endpoint_mapping(self):
        saliency_map = read_saliency_frame(_image_bytes([[0, 255]]))
        assert (saliency_map.width, saliency_map.height) == (2, 1)
        assert saliency_map.intensities.tolist() == [0.0, 1.0]

    def test_linear_scaling(self):
        saliency_map = read_saliency_frame(_image_bytes([[128]], fmt="PNG"))
        assert saliency_map.intensities[0] == pytest.approx(0.50196, abs=1e-5)

    def test_truncated_file(self):
        content = _image_bytes(np.full((16, 16), 200))
        with pytest.raises(CorruptImage):
            read_saliency_frame(content[:-100])

    def test_unsupported_format(self):
        with pytest.raises(UnsupportedFormat):
            read_saliency_frame(b"not an image at all")
        with pytest.raises(UnsupportedFormat):
            read_saliency_frame(_image_bytes([[1, 2], [3, 4]], fmt="BMP"))

    def test_color_image_rejected_as_saliency_map(self):
        with pytest.raises(UnsupportedFormat):
            read_saliency_frame(_image_bytes([[10, 20]], fmt="PNG", mode="RGB"))

    def test_gray_image_accepts_color(self):
        grid = read_gray_image(_image_bytes([[0, 255]], fmt="PNG", mode="RGB"))
        assert grid.shape == (1, 2)
        assert grid[0, 1] == pytest.approx(1.0)

    @pytest.mark.parametrize("suffix", [".pgm", ".png"])
    def test_written_map_reads_back(self, tmp_path, suffix):
        original = SaliencyMap.from_grid(np.arange(12).reshape(3, 4) / 11.0)
        path = tmp_path / frame_file_name(3, suffix)
        write_saliency_frame(original, path)
        restored = read_saliency_frame(path.read_bytes())
        assert np.abs(restored.intensities - original.intensities).max() <= 0.5 / 255 + 1e-12

    def test_list_frame_files_sorts_numerically(self, tmp_path):
        for index in (10, 2, 1):
            (tmp_path / f"frame_{index}.pgm").write_bytes(_image_bytes([[0]]))
        (tmp_path / "notes.txt").write_text("x")
        assert [path.name for path in list_frame_files(tmp_path)] == [
            "frame_1.pgm", "frame_2.pgm", "frame_10.pgm"
        ]

    def test_missing_directory(self, tmp_path):
        with pytest.raises(InputUnavailable):
            list_frame_files(tmp_path / "absent")


class TestAUCsv:
    def test_all_absent_row(self):
        frames = read_au_csv(_au_header() + "\n1,0.0," + ",".join(["0"] * AU_COUNT) + "\n")
        assert len(frames) == 1
        assert frames[0].presence == (0,) * AU_COUNT

    def test_single_au12(self):
        values = ["1" if code == "AU12" else "0" for code in AU_CATALOG.codes]
        frames = read_au_csv(_au_header() + "\n5,2.5," + ",".join(values) + "\n")
        assert frames[0].presence.index(1) == AU_CATALOG.index_of("AU12")
        assert sum(frames[0].presence) == 1
        assert frames[0].frame_index == 5
        assert frames[0].timestamp == 2.5

    def test_missing_column(self):
        columns = [name for name in AU_CATALOG.presence_columns if name != "AU45_c"]
        text = _au_header(columns) + "\n1,0.0," + ",".join(["0"] * (AU_COUNT - 1)) + "\n"
        with pytest.raises(MissingColumn) as excinfo:
            read_au_csv(text)
        assert excinfo.value.column == "AU45_c"

    def test_openface_style_header(self):
        # Leading spaces, mixed case, extra intensity columns.
        columns = [" " + name.lower() for name in AU_CATALOG.presence_columns] + [" AU12_r", " AU99_c"]
        header = "frame, timestamp," + ",".join(columns)
        row = "1, 0.5," + ",".join(["1"] * AU_COUNT) + ", 3.2, 1"
        frames = read_au_csv(header + "\n" + row + "\n")
        assert frames[0].presence == (1,) * AU_COUNT

    def test_near_binary_values_rounded(self):
        values = ["1.0000001"] + ["0.0"] * (AU_COUNT - 1)
        frames = read_au_csv(_au_header() + "\n1,0," + ",".join(values) + "\n")
        assert frames[0].presence[0] == 1

    def test_non_binary_presence(self):
        values = ["0"] * AU_COUNT
        values[3] = "0.5"
        with pytest.raises(NonBinaryPresence) as excinfo:
            read_au_csv(_au_header() + "\n1,0," + ",".join(values) + "\n")
        assert excinfo.value.line == 2
        assert excinfo.value.column == AU_CATALOG.presence_columns[3]

    def test_malformed_row_reports_file_line(self):
        zeros = ",".join(["0"] * AU_COUNT)
        text = _au_header() + f"\n1,0,{zeros}\nabc,0.5,{zeros}\n"
        with pytest.raises(MalformedRow) as excinfo:
            read_au_csv(text)
        assert excinfo.value.line == 3

    def test_emitted_table_reads_back(self):
        rng = np.random.default_rng(3)
        frames = [
            AUFrame(frame_index=i + 1, timestamp=i / 30, presence=tuple(rng.integers(0, 2, AU_COUNT)))
            for i in range(5)
        ]
        assert read_au_csv(emit_au_csv(frames)) == frames

    @pytest.mark.parametrize("timestamp", [1 / 30, 0.1 + 0.2, 2 / 3, 1e-17, 12345.678901234567])
    def test_timestamps_are_read_exactly(self, timestamp):
        zeros = ",".join(["0"] * AU_COUNT)
        frames = read_au_csv(_au_header() + f"\n1,{timestamp!r},{zeros}\n")
        assert frames[0].timestamp == timestamp


class TestLabels:
    def test_parse(self):
        labels = read_labels_csv("trial_id,valence,arousal\nt01,7,3\nt03,4.5,6.5\n")
        assert [(label.trial_id, label.valence, label.arousal) for label in labels] == [
            ("t01", 7.0, 3.0),
            ("t03", 4.5, 6.5),
        ]

    def test_out_of_range(self):
        with pytest.raises(ScoreOutOfRange):
            read_labels_csv("trial_id,valence,arousal\nt02,10,4\n")

    def test_duplicate_trial(self):
        with pytest.raises(MalformedRow) as excinfo:
            read_labels_csv("trial_id,valence,arousal\nt01,7,3\nt01,6,3\n")
        assert excinfo.value.line == 3

    def test_non_numeric(self):
        with pytest.raises(MalformedRow):
            read_labels_csv("trial_id,valence,arousal\nt01,high,3\n")

    def test_missing_column(self):
        with pytest.raises(MissingColumn):
            read_labels_csv("trial_id,valence\nt01,7\n")


class TestSampling:
    @pytest.mark.parametrize(
        "native,target,count,expected",
        [
            (30, 2, 90, [0, 15, 30, 45, 60, 75]),
            (25, 2, 50, [0, 12, 25, 37]),
            (2, 2, 4, [0, 1, 2, 3]),
            (30, 2, 0, []),
        ],
    )
    def test_examples(self, native, target, count, expected):
        assert sample_frames(native, target, count) == expected

    def test_target_above_native(self):
        with pytest.raises(TargetRateExceedsNative):
            sample_frames(2, 30, 10)

    def test_strictly_increasing_for_close_rates(self):
        indices = sample_frames(2.5, 2.0, 100)
        assert all(b > a for a, b in zip(indices, indices[1:]))
        assert indices[-1] < 100


def _write_trial(root, frame_count, native_fps=30.0, trial_id="t01"):
    frames_dir = root / trial_id / "frames"
    frames_dir.mkdir(parents=True)
    for i in range(frame_count):
        (frames_dir / frame_file_name(i)).write_bytes(_image_bytes(np.full((4, 4), i % 256)))
    au_frames = [AUFrame(frame_index=i, timestamp=i / native_fps, presence=(0,) * AU_COUNT) for i in range(frame_count)]
    (root / trial_id / "au.csv").write_text(emit_au_csv(au_frames))
    return TrialManifestEntry(
        trial_id=trial_id,
        saliency_dir=frames_dir,
        saliency_fps=native_fps,
        au_csv=root / trial_id / "au.csv",
        au_fps=native_fps,
    )


class TestManifestAndLoader:
    def test_array_and_object_forms(self, tmp_path):
        raw = [{"trial_id": "a", "saliency_dir": "a/s", "saliency_fps": 30, "au_csv": "a/au.csv", "au_fps": 30}]
        as_array = parse_manifest(json.dumps(raw), base_dir=tmp_path)
        as_object = parse_manifest(json.dumps({"trials": raw}), base_dir=tmp_path)
        assert as_array == as_object
        assert as_array[0].saliency_dir == tmp_path / "a/s"

    def test_duplicate_trial_id(self):
        raw = {"trial_id": "a", "saliency_dir": "s", "saliency_fps": 30, "au_csv": "au.csv", "au_fps": 30}
        with pytest.raises(ManifestError):
            parse_manifest(json.dumps([raw, raw]))

    def test_invalid_entry(self):
        with pytest.raises(ManifestError):
            parse_manifest(json.dumps([{"trial_id": "a", "saliency_fps": -1}]))
        with pytest.raises(ManifestError):
            parse_manifest("{not json")

    def test_write_then_load_resolves_relative_paths(self, tmp_path):
        entry = TrialManifestEntry(
            trial_id="a", saliency_dir="trials/a/saliency", saliency_fps=2, au_csv="trials/a/au.csv", au_fps=2
        )
        write_manifest([entry], tmp_path / "manifest.json")
        loaded = load_manifest(tmp_path / "manifest.json")
        assert loaded[0].au_csv == tmp_path / "trials/a/au.csv"

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(InputUnavailable):
            load_manifest(tmp_path / "absent.json")

    def test_load_trial_samples_both_streams(self, tmp_path):
        streams = load_trial(_write_trial(tmp_path, 90), target_fps=2.0)
        assert len(streams.saliency_maps) == 6
        assert streams.saliency.frame_indices == (0, 15, 30, 45, 60, 75)
        assert streams.saliency.timestamps[1] == pytest.approx(0.5)
        assert [frame.frame_index for frame in streams.au_frames] == [0, 15, 30, 45, 60, 75]

    def test_empty_directory(self, tmp_path):
        entry = _write_trial(tmp_path, 0)
        with pytest.raises(EmptyTrial) as excinfo:
            load_trial(entry, 2.0)
        assert excinfo.value.trial_id == "t01"

    def test_unreadable_au_table(self, tmp_path):
        entry = _write_trial(tmp_path, 4)
        entry.au_csv.write_text("frame,timestamp\n1,0\n")
        with pytest.raises(MissingColumn):
            load_au_stream(entry, 2.0)

    def test_corpus_digest_ignores_order(self, tmp_path):
        first = _write_trial(tmp_path, 3, trial_id="a")
        second = _write_trial(tmp_path, 3, trial_id="b")
        before = corpus_digest([first, second])
        assert before == corpus_digest([second, first])
        (second.saliency_dir / frame_file_name(0)).write_bytes(_image_bytes(np.full((4, 4), 99)))
        assert corpus_digest([first, second]) != before
