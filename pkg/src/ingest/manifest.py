"""
Trial manifests: which saliency frames and AU table belong to each trial.
"""

import hashlib
import json
from pathlib import Path
from typing import Iterable, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.ingest.images import list_frame_files
from src.utils.errors import InputUnavailable, ManifestError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


class TrialManifestEntry(BaseModel):
    """One trial's data streams. Paths are resolved against the manifest directory."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    trial_id: str = Field(..., min_length=1, description="Trial identifier, unique per manifest")
    saliency_dir: Path = Field(..., description="Directory of frame_%06d.pgm|png saliency maps")
    saliency_fps: float = Field(..., gt=0, description="Native rate of the saliency frames")
    au_csv: Path = Field(..., description="AU presence CSV for the facial video")
    au_fps: float = Field(..., gt=0, description="Native rate of the facial video")


def parse_manifest(text: str, base_dir: Optional[Path] = None) -> List[TrialManifestEntry]:
    """
    Parse manifest JSON: either an array of entries or ``{"trials": [...]}``.

    Raises:
        ManifestError: invalid JSON, invalid entry or duplicate trial id
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ManifestError(f"manifest is not valid JSON: {e}") from e

    if isinstance(document, dict):
        document = document.get("trials")
    if not isinstance(document, list):
        raise ManifestError("manifest must be an array of entries or an object with a 'trials' array")

    entries: List[TrialManifestEntry] = []
    seen = set()
    for position, raw in enumerate(document):
        try:
            entry = TrialManifestEntry.model_validate(raw)
        except ValidationError as e:
            raise ManifestError(f"manifest entry {position}: {e}") from e
        if entry.trial_id in seen:
            raise ManifestError(f"duplicate trial_id {entry.trial_id!r} in manifest")
        seen.add(entry.trial_id)
        if base_dir is not None:
            entry = entry.model_copy(update={
                "saliency_dir": Path(base_dir) / entry.saliency_dir,
                "au_csv": Path(base_dir) / entry.au_csv,
            })
        entries.append(entry)

    return entries


def load_manifest(path: Path) -> List[TrialManifestEntry]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputUnavailable(f"cannot read manifest {path}: {e}") from e
    entries = parse_manifest(text, base_dir=path.parent)
    logger.info(f"Loaded manifest {path} with {len(entries)} trials")
    return entries


def write_manifest(entries: Iterable[TrialManifestEntry], path: Path) -> None:
    """Write entries as ``{"trials": [...]}`` with paths as given (usually relative)."""
    document = {
        "trials": [
            {
                "trial_id": entry.trial_id,
                "saliency_dir": entry.saliency_dir.as_posix(),
                "saliency_fps": entry.saliency_fps,
                "au_csv": entry.au_csv.as_posix(),
                "au_fps": entry.au_fps,
            }
            for entry in entries
        ]
    }
    Path(path).write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _hash_file(digest, path: Path) -> None:
    try:
        with open(path, "rb") as handle:
            for chunk in iter(lambda: handle.read(1 << 16), b""):
                digest.update(chunk)
    except OSError:
        digest.update(b"<missing>")


def corpus_digest(entries: Iterable[TrialManifestEntry], labels_path: Optional[Path] = None) -> str:
    """
    SHA-256 over every input byte, independent of manifest order and location.

    Missing files hash as a fixed marker so excluded trials still yield a digest.
    """
    digest = hashlib.sha256()
    for entry in sorted(entries, key=lambda e: e.trial_id):
        digest.update(f"trial:{entry.trial_id}:{entry.saliency_fps!r}:{entry.au_fps!r}\n".encode("utf-8"))
        try:
            frames = list_frame_files(entry.saliency_dir)
        except InputUnavailable:
            frames = []
        for frame in frames:
            digest.update(f"frame:{frame.name}\n".encode("utf-8"))
            _hash_file(digest, frame)
        digest.update(b"au:\n")
        _hash_file(digest, entry.au_csv)
    if labels_path is not None:
        digest.update(b"labels:\n")
        _hash_file(digest, Path(labels_path))
    return digest.hexdigest()
