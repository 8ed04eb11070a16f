"""Calibrated DCT-domain features (a reduced relative of CC-PEV).

Per plane, the base block is:

====================  =====  ==================================================
group                 dims   content
====================  =====  ==================================================
global histogram       17    AC values clamped to [-8, 8], per AC coefficient
mode histograms        25    modes (0,1) (1,0) (1,1) (0,2) (2,0), values
                             clamped to [-2, 2], per block
co-occurrence          81    adjacent intra-block AC pairs (right and down
                             neighbours), clamped to [-4, 4], per pair
blockiness              1    mean |jump| across 8x8 boundaries of the
                             decompressed image
====================  =====  ==================================================

The full vector is ``base(plane)`` followed by ``base(plane) - base(ref)``
where ``ref`` is the plane decompressed, cropped by 4 pixels at the top and
left, and re-quantized at the same quality.
"""

from __future__ import annotations

import numpy as np

from ..dctmodel import BLOCK, DctPlane, ac_mask, blockify, forward, inverse

__all__ = ["BASE_DIM", "FEATURE_DIM", "LOW_MODES", "base_features", "extract_features", "feature_names"]

LOW_MODES = ((0, 1), (1, 0), (1, 1), (0, 2), (2, 0))
_HIST_T = 8
_MODE_T = 2
_COOC_T = 4

BASE_DIM = (2 * _HIST_T + 1) + len(LOW_MODES) * (2 * _MODE_T + 1) + (2 * _COOC_T + 1) ** 2 + 1
FEATURE_DIM = 2 * BASE_DIM


def _histogram(values: np.ndarray, t: int) -> np.ndarray:
    counts = np.bincount(np.clip(values, -t, t) + t, minlength=2 * t + 1).astype(np.float64)
    return counts / max(len(values), 1)


def _cooccurrence(blocks: np.ndarray) -> np.ndarray:
    t = _COOC_T
    side = 2 * t + 1
    clamped = np.clip(blocks, -t, t) + t
    right = (clamped[..., :, :-1], clamped[..., :, 1:])
    down = (clamped[..., :-1, :], clamped[..., 1:, :])
    counts = np.zeros(side * side)
    total = 0
    for (a, b), skip in ((right, (0, 0)), (down, (0, 0))):
        keep = np.ones(a.shape[-2:], dtype=bool)
        keep[skip] = False  # pairs touching the DC term
        pair = (a[..., keep] * side + b[..., keep]).ravel()
        counts += np.bincount(pair, minlength=side * side)
        total += pair.size
    return counts / max(total, 1)


def _blockiness(image: np.ndarray) -> float:
    img = image.astype(np.float64)
    h, w = img.shape
    cols = np.arange(BLOCK, w, BLOCK)
    rows = np.arange(BLOCK, h, BLOCK)
    jumps = [np.abs(img[:, cols - 1] - img[:, cols]).ravel(), np.abs(img[rows - 1, :] - img[rows, :]).ravel()]
    jumps = np.concatenate(jumps)
    return float(jumps.mean()) if jumps.size else 0.0


def base_features(plane: DctPlane, image: np.ndarray | None = None) -> np.ndarray:
    coeffs = plane.coeffs.astype(np.int64)
    blocks = blockify(coeffs)
    ac = coeffs[ac_mask(coeffs.shape)]
    modes = [_histogram(blocks[:, :, i, j].ravel(), _MODE_T) for i, j in LOW_MODES]
    if image is None:
        image = inverse(plane)
    return np.concatenate([
        _histogram(ac, _HIST_T),
        *modes,
        _cooccurrence(blocks),
        [_blockiness(image)],
    ])


def extract_features(plane: DctPlane) -> np.ndarray:
    decompressed = inverse(plane)
    reference = forward(decompressed[4:, 4:], plane.quality)
    own = base_features(plane, decompressed)
    return np.concatenate([own, own - base_features(reference)])


def feature_names() -> list[str]:
    names = [f"hist[{v}]" for v in range(-_HIST_T, _HIST_T + 1)]
    for i, j in LOW_MODES:
        names += [f"mode{i}{j}[{v}]" for v in range(-_MODE_T, _MODE_T + 1)]
    names += [f"cooc[{a},{b}]" for a in range(-_COOC_T, _COOC_T + 1) for b in range(-_COOC_T, _COOC_T + 1)]
    names.append("blockiness")
    return names + [f"cal_{name}" for name in names]
