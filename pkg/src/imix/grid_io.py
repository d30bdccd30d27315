"""Binary PPM/PGM and CSV readers and writers for grids.

Formats follow the netpbm conventions: P6 with maxval 255 for 3-channel
images (intensities scaled from [0, 1]), P5 with maxval 255 for label
maps and masks (gray value = class index).  CSV label maps are plain
integer rows, one image row per line.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import DataError, DimensionError
from .grids import ImageGrid, LabelMap, MixMask

__all__ = [
    "write_ppm",
    "read_ppm",
    "write_pgm",
    "read_pgm",
    "write_mask_pgm",
    "read_mask_pgm",
    "write_labels_csv",
    "read_labels_csv",
]


def _read_pnm_tokens(raw: bytes, count: int, offset: int) -> tuple[list[int], int]:
    """Read `count` whitespace-separated integer tokens, skipping # comments."""
    tokens: list[int] = []
    i = offset
    n = len(raw)
    while len(tokens) < count:
        while i < n and raw[i : i + 1].isspace():
            i += 1
        if i < n and raw[i : i + 1] == b"#":
            while i < n and raw[i : i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < n and not raw[i : i + 1].isspace():
            i += 1
        if start == i:
            raise DataError("truncated PNM header")
        try:
            tokens.append(int(raw[start:i]))
        except ValueError as exc:
            raise DataError(f"bad PNM header token {raw[start:i]!r}") from exc
    if i >= n or not raw[i : i + 1].isspace():
        raise DataError("PNM header not terminated by whitespace")
    return tokens, i + 1


def _read_pnm(path, magic: bytes) -> tuple[int, int, int, np.ndarray]:
    raw = Path(path).read_bytes()
    if not raw.startswith(magic):
        raise DataError(f"{path}: expected {magic.decode()} file")
    (width, height, maxval), start = _read_pnm_tokens(raw, 3, len(magic))
    if maxval != 255:
        raise DataError(f"{path}: only maxval 255 is supported, got {maxval}")
    depth = 3 if magic == b"P6" else 1
    expected = width * height * depth
    body = raw[start : start + expected]
    if len(body) != expected:
        raise DataError(
            f"{path}: expected {expected} data bytes, got {len(body)}"
        )
    return width, height, maxval, np.frombuffer(body, dtype=np.uint8)


def write_ppm(image: ImageGrid, path) -> None:
    """Write a 3-channel image as binary PPM (P6), scaled to [0, 255]."""
    if image.channels != 3:
        raise DimensionError(f"PPM requires 3 channels, got {image.channels}")
    scaled = np.rint(image.data * 255.0).astype(np.uint8)
    header = f"P6\n{image.width} {image.height}\n255\n".encode()
    # interleave to H×W×3 pixel order
    body = scaled.transpose(1, 2, 0).tobytes()
    Path(path).write_bytes(header + body)


def read_ppm(path) -> ImageGrid:
    width, height, _, flat = _read_pnm(path, b"P6")
    pixels = flat.reshape(height, width, 3).transpose(2, 0, 1)
    return ImageGrid(pixels.astype(np.float64) / 255.0)


def write_pgm(labels: LabelMap, path) -> None:
    """Write a label map as binary PGM (P5), gray value = class index."""
    if labels.num_classes > 256:
        raise DataError(
            f"PGM stores 8-bit indices; num_classes={labels.num_classes} exceeds 256"
        )
    header = f"P5\n{labels.width} {labels.height}\n255\n".encode()
    Path(path).write_bytes(header + labels.data.astype(np.uint8).tobytes())


def read_pgm(path, num_classes: int | None = None) -> LabelMap:
    """Read a P5 label map; num_classes defaults to max index + 1."""
    width, height, _, flat = _read_pnm(path, b"P5")
    data = flat.reshape(height, width).astype(np.int64)
    if num_classes is None:
        num_classes = int(data.max()) + 1 if data.size else 1
    return LabelMap(data, num_classes=num_classes)


def write_mask_pgm(mask: MixMask, path) -> None:
    """Write a binary mask as P5 with gray values 0/1."""
    header = f"P5\n{mask.width} {mask.height}\n255\n".encode()
    Path(path).write_bytes(header + mask.data.astype(np.uint8).tobytes())


def read_mask_pgm(path) -> MixMask:
    width, height, _, flat = _read_pnm(path, b"P5")
    return MixMask(flat.reshape(height, width))


def write_labels_csv(labels: LabelMap, path) -> None:
    """Write a label map as integer CSV, one image row per line."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in labels.data:
            writer.writerow([int(v) for v in row])


def read_labels_csv(path, num_classes: int | None = None) -> LabelMap:
    rows: list[list[int]] = []
    with open(path, newline="") as fh:
        for line in csv.reader(fh):
            if not line:
                continue
            rows.append([int(v) for v in line])
    if not rows:
        raise DataError(f"{path}: empty label CSV")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DataError(f"{path}: ragged rows, widths {sorted(widths)}")
    data = np.array(rows, dtype=np.int64)
    if num_classes is None:
        num_classes = int(data.max()) + 1
    return LabelMap(data, num_classes=num_classes)
