"""First-order LSB detectors adapted to 8-bit gray images.

Close pairs are the value pairs ``(2k, 2k + 1)`` that differ only in the
least significant bit.
"""

from __future__ import annotations

import numpy as np

from ..stegocodec.common import keyed_rng
from ..stegocodec.lsb import lsb_replace_embed

__all__ = ["close_color_pairs_stat", "close_pair_ratio", "lsb_enhance", "lsb_plane_entropy", "rqp_test"]

_RQP_TAG = 0x5290


def _pair_histogram(image: np.ndarray) -> np.ndarray:
    return np.bincount(np.asarray(image, dtype=np.uint8).ravel(), minlength=256).reshape(128, 2)


def close_color_pairs_stat(image: np.ndarray) -> float:
    """Mean relative imbalance ``|h(2k) - h(2k+1)| / (h(2k) + h(2k+1))`` over occupied pairs.

    LSB replacement pulls both members of a pair toward their average, so
    values near 0 are suspicious.
    """
    hist = _pair_histogram(image)
    totals = hist.sum(axis=1)
    occupied = totals > 0
    imbalance = np.abs(hist[:, 0] - hist[:, 1])[occupied] / totals[occupied]
    return float(imbalance.mean())


def close_pair_ratio(image: np.ndarray) -> float:
    """Share of pixels left unmatched within their close pair, ``sum |h(2k) - h(2k+1)| / N``.

    Pixel-weighted, so sparse tail values (where a pair of counts 1 and 2
    reads as 33% imbalance) do not dominate as they do in the per-pair mean.
    """
    hist = _pair_histogram(image)
    return float(np.abs(hist[:, 0] - hist[:, 1]).sum() / max(hist.sum(), 1))


def rqp_test(image: np.ndarray, key: int, test_fraction: float = 0.5) -> float:
    """Ratio of the close-pair ratio after and before a test LSB embedding.

    A clean image loses much of its pair imbalance to the test message
    (about ``1 - test_fraction``); an image already carrying a full LSB
    payload only reshuffles sampling noise, so the ratio stays near 1.
    """
    image = np.asarray(image, dtype=np.uint8)
    if not 0.01 <= test_fraction <= 1:
        raise ValueError("test message must cover between 1% and 100% of the pixels")
    length = max(1, int(round(test_fraction * image.size)))
    message = keyed_rng(key, _RQP_TAG).integers(0, 2, size=length)
    before = close_pair_ratio(image)
    after = close_pair_ratio(lsb_replace_embed(image, message, key))
    if before == 0:
        return 1.0 if after == 0 else float("inf")
    return after / before


def lsb_enhance(image: np.ndarray) -> np.ndarray:
    """Visual attack filter: white where the LSB is set, black elsewhere."""
    return ((np.asarray(image, dtype=np.uint8) & 1) * 255).astype(np.uint8)


def lsb_plane_entropy(image: np.ndarray) -> float:
    """Shannon entropy (bits/pixel) of the LSB plane."""
    ones = float(np.mean(np.asarray(image, dtype=np.uint8) & 1))
    if ones in (0.0, 1.0):
        return 0.0
    return float(-(ones * np.log2(ones) + (1 - ones) * np.log2(1 - ones)))
