"""
Shared fixtures: small synthetic corpora written to temporary directories.
"""

import shutil
from pathlib import Path

import pytest

from src.report.synth import LABELS_CSV, SynthConfig, synth_corpus


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    """30 trials, 6 frames each, 32x32, default planted effects."""
    out = tmp_path_factory.mktemp("corpus")
    synth_corpus(SynthConfig(seed=7, trial_count=30, frames_per_trial=6, width=32, height=32), out)
    return out


@pytest.fixture
def corpus_copy(corpus_dir, tmp_path) -> Path:
    """A private copy of the session corpus that a test may damage."""
    target = tmp_path / "corpus"
    shutil.copytree(corpus_dir, target)
    return target


@pytest.fixture
def labels_path(corpus_dir) -> Path:
    return corpus_dir / LABELS_CSV
