"""Snapshot <-> image mapping and the PGM / CSV interchange formats.

Images are plain ``uint8`` numpy arrays: ``(height, width)`` for gray,
``(height, width, 3)`` for RGB.
"""

from __future__ import annotations

import csv
import os
import re

import numpy as np

from .fieldsim import Modality, SensorField, Snapshot

__all__ = [
    "LUMA_WEIGHTS",
    "REACHABLE_GRAY_MAX",
    "clamp_to_reachable",
    "gray_delta_to_sensor_deltas",
    "read_pgm",
    "read_snapshot_csv",
    "rgb_to_gray",
    "round_half_away",
    "snapshot_to_gray",
    "snapshot_to_rgb",
    "write_pgm",
    "write_snapshot_csv",
]

# Rec.-601 luma, indexed by Modality (red, green, blue).
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

_CHANNEL_LEVELS = np.arange(256, dtype=np.float64)


def round_half_away(x):
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _to_channel(values) -> np.ndarray:
    return np.clip(round_half_away(values), 0, 255).astype(np.uint8)


def snapshot_to_rgb(snapshot: Snapshot, field: SensorField) -> np.ndarray:
    if snapshot.shape != field.shape:
        raise ValueError(f"snapshot shape {snapshot.shape} != field shape {field.shape}")
    rgb = np.zeros(field.shape + (3,), dtype=np.uint8)
    levels = _to_channel(snapshot.readings)
    for m in Modality:
        mask = field.modality == m
        rgb[..., m][mask] = levels[mask]
    return rgb


def rgb_to_gray(image: np.ndarray) -> np.ndarray:
    luma = np.asarray(image, dtype=np.float64) @ LUMA_WEIGHTS
    return _to_channel(luma)


def snapshot_to_gray(snapshot: Snapshot, field: SensorField) -> np.ndarray:
    return rgb_to_gray(snapshot_to_rgb(snapshot, field))


def _inverse_luma_table() -> np.ndarray:
    """``table[m, g]``: channel level of modality ``m`` whose luma is nearest ``g``.

    Ties go to the level nearest the analytic inverse ``g / weight``.
    """
    table = np.empty((3, 256), dtype=np.int64)
    for m, weight in enumerate(LUMA_WEIGHTS):
        rendered = round_half_away(_CHANNEL_LEVELS * weight)
        for g in range(256):
            miss = np.abs(rendered - g)
            closeness = np.abs(_CHANNEL_LEVELS - g / weight)
            table[m, g] = np.lexsort((closeness, miss))[0]
    return table


_INVERSE_LUMA = _inverse_luma_table()

# Highest gray level a sensor of each modality can render (channel at 255).
REACHABLE_GRAY_MAX = round_half_away(255 * LUMA_WEIGHTS).astype(np.int64)


def clamp_to_reachable(gray: np.ndarray, field: SensorField) -> np.ndarray:
    """Clip each pixel to the gray range its sensor's channel can produce."""
    limit = REACHABLE_GRAY_MAX[field.modality]
    return np.minimum(np.asarray(gray, dtype=np.int64), limit).clip(0, 255).astype(np.uint8)


def gray_delta_to_sensor_deltas(
    before: np.ndarray,
    after: np.ndarray,
    field: SensorField,
    snapshot: Snapshot,
) -> list[tuple[tuple[int, int], float]]:
    """Sensor edits that turn the rendering of ``snapshot`` from ``before`` into ``after``.

    Only pixels where the two gray images differ produce an edit.  The new
    reading is the channel level whose luma reproduces the target gray value;
    targets beyond a channel's reachable range are clamped to it.
    """
    before = np.asarray(before)
    after = np.asarray(after)
    if before.shape != after.shape:
        raise ValueError(f"image shapes differ: {before.shape} vs {after.shape}")
    if before.shape != field.shape or snapshot.shape != field.shape:
        raise ValueError("images, field and snapshot must share one shape")
    ys, xs = np.nonzero(before != after)
    levels = _INVERSE_LUMA[field.modality[ys, xs], after[ys, xs]]
    return [((x, y), float(v)) for x, y, v in zip(xs.tolist(), ys.tolist(), levels.tolist())]


_PGM_HEADER = re.compile(rb"\AP5\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s")


def write_pgm(image: np.ndarray, path) -> None:
    image = np.asarray(image)
    if image.ndim != 2 or image.dtype != np.uint8:
        raise ValueError("PGM output needs a 2-D uint8 image")
    height, width = image.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (width, height))
        fh.write(np.ascontiguousarray(image).tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    match = _PGM_HEADER.match(data)
    if match is None:
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = (int(g) for g in match.groups())
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    payload = data[match.end():]
    if len(payload) < width * height:
        raise ValueError(f"{path}: truncated payload ({len(payload)} of {width * height} bytes)")
    return np.frombuffer(payload, dtype=np.uint8, count=width * height).reshape(height, width).copy()


def write_snapshot_csv(snapshot: Snapshot, field: SensorField, path) -> None:
    height, width = snapshot.shape
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y", "modality", "reading"])
        for y in range(height):
            for x in range(width):
                writer.writerow([x, y, Modality(int(field.modality[y, x])).name.lower(),
                                 repr(float(snapshot.readings[y, x]))])


def read_snapshot_csv(path, time: int) -> Snapshot:
    rows = np.genfromtxt(path, delimiter=",", skip_header=1, usecols=(0, 1, 3), dtype=np.float64)
    rows = np.atleast_2d(rows)
    xs = rows[:, 0].astype(np.int64)
    ys = rows[:, 1].astype(np.int64)
    readings = np.full((ys.max() + 1, xs.max() + 1), np.nan)
    readings[ys, xs] = rows[:, 2]
    if np.isnan(readings).any():
        raise ValueError(f"{os.fspath(path)}: snapshot CSV does not cover the full grid")
    return Snapshot(time=time, readings=readings)
