"""Plain LSB replacement in the pixel domain, the classic detectors' target."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .common import TAG_LSB, CapacityExceeded, keyed_rng

__all__ = ["lsb_extract", "lsb_replace_embed"]


def _pixel_order(size: int, key: int) -> np.ndarray:
    return keyed_rng(key, TAG_LSB).permutation(size)


def lsb_replace_embed(image: np.ndarray, message: Sequence[int], key: int) -> np.ndarray:
    image = np.asarray(image, dtype=np.uint8)
    bits = np.asarray(message, dtype=np.uint8) & 1
    if len(bits) > image.size:
        raise CapacityExceeded(f"{len(bits)} bits exceed {image.size} pixels")
    flat = image.ravel().copy()
    chosen = _pixel_order(image.size, key)[:len(bits)]
    flat[chosen] = (flat[chosen] & 0xFE) | bits
    return flat.reshape(image.shape)


def lsb_extract(image: np.ndarray, key: int, length: int) -> np.ndarray:
    image = np.asarray(image, dtype=np.uint8)
    if length > image.size:
        raise CapacityExceeded(f"{length} bits exceed {image.size} pixels")
    return image.ravel()[_pixel_order(image.size, key)[:length]] & 1
