"""
Frame image I/O: saved saliency maps (8-bit PGM/PNG) and raw frames.
"""

import io
import re
from pathlib import Path
from typing import List, Tuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.core.types import SaliencyMap
from src.utils.errors import CorruptImage, InputUnavailable, UnsupportedFormat
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

SUPPORTED_FORMATS = {"PPM": ".pgm", "PNG": ".png"}
FRAME_PATTERN = re.compile(r"^frame_(\d+)\.(pgm|png)$", re.IGNORECASE)


def _open_image(content: bytes) -> Image.Image:
    try:
        image = Image.open(io.BytesIO(content))
    except UnidentifiedImageError as e:
        raise UnsupportedFormat(f"unrecognized image content: {e}") from e
    if image.format not in SUPPORTED_FORMATS:
        raise UnsupportedFormat(f"image format {image.format!r} is not PGM or PNG")
    try:
        image.load()
    except (OSError, SyntaxError, ValueError) as e:
        raise CorruptImage(f"cannot decode {image.format} image: {e}") from e
    return image


def read_saliency_frame(content: bytes) -> SaliencyMap:
    """
    Decode a saved saliency map.

    Args:
        content: bytes of an 8-bit single-channel PGM ("P5") or PNG file

    Returns:
        SaliencyMap with each sample v mapped to v / 255
    """
    image = _open_image(content)
    if image.mode != "L":
        raise UnsupportedFormat(f"expected 8-bit single-channel image, got mode {image.mode!r}")
    samples = np.asarray(image, dtype=np.uint8)
    return SaliencyMap.from_grid(samples.astype(np.float64) / 255.0)


def read_gray_image(content: bytes) -> np.ndarray:
    """Decode any PGM/PNG frame into a (height, width) luminance grid in [0, 1]."""
    image = _open_image(content)
    if image.mode != "L":
        image = image.convert("L")
    return np.asarray(image, dtype=np.uint8).astype(np.float64) / 255.0


def write_saliency_frame(saliency_map: SaliencyMap, path: Path) -> None:
    """Save a map as an 8-bit grayscale image; format follows the file suffix."""
    path = Path(path)
    samples = np.rint(saliency_map.grid * 255.0).astype(np.uint8)
    image = Image.fromarray(samples)
    if path.suffix.lower() == ".pgm":
        image.save(path, format="PPM")
    elif path.suffix.lower() == ".png":
        image.save(path, format="PNG", optimize=False)
    else:
        raise UnsupportedFormat(f"cannot write saliency map as {path.suffix!r}")


def frame_file_name(index: int, suffix: str = ".pgm") -> str:
    return f"frame_{index:06d}{suffix}"


def list_frame_files(directory: Path) -> List[Path]:
    """
    List ``frame_%06d.pgm|png`` files in a directory, sorted numerically.

    Raises:
        InputUnavailable: directory missing or unreadable
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise InputUnavailable(f"frame directory not found: {directory}")

    numbered: List[Tuple[int, Path]] = []
    try:
        entries = list(directory.iterdir())
    except OSError as e:
        raise InputUnavailable(f"cannot list {directory}: {e}") from e

    for entry in entries:
        match = FRAME_PATTERN.match(entry.name)
        if match and entry.is_file():
            numbered.append((int(match.group(1)), entry))

    numbered.sort(key=lambda item: item[0])
    logger.debug(f"{len(numbered)} frame files in {directory}")
    return [path for _, path in numbered]


def read_bytes(path: Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise InputUnavailable(f"cannot read {path}: {e}") from e
