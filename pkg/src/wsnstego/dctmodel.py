"""JPEG-style 8x8 block DCT and quantization of grayscale images.

Only the coefficient domain is modelled: no entropy coding, no chroma.
Coefficients are stored in their natural spatial tiling, so coefficient
``(i, j)`` of block ``(br, bc)`` lives at ``coeffs[8 * br + i, 8 * bc + j]``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from .imageio import round_half_away

__all__ = [
    "BLOCK",
    "LUMINANCE_TABLE",
    "DctPlane",
    "ac_mask",
    "block_dct",
    "block_idct",
    "blockify",
    "forward",
    "inverse",
    "nonzero_ac_count",
    "quant_table",
    "unblockify",
    "write_plane_csv",
]

BLOCK = 8

# ITU T.81 Annex K, table K.1.
LUMINANCE_TABLE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.int64)


def quant_table(quality: int) -> np.ndarray:
    """Luminance table scaled to ``quality`` with the IJG convention."""
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must be in [1, 100], got {quality}")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    table = (LUMINANCE_TABLE * scale + 50) // 100
    return np.clip(table, 1, 255)


@dataclass(frozen=True, eq=False)
class DctPlane:
    coeffs: np.ndarray  # int32, padded height x padded width
    quality: int
    shape: tuple[int, int]  # original image (height, width)

    @property
    def blocks_shape(self) -> tuple[int, int]:
        return self.coeffs.shape[0] // BLOCK, self.coeffs.shape[1] // BLOCK

    def with_coeffs(self, coeffs: np.ndarray) -> "DctPlane":
        return DctPlane(coeffs=coeffs, quality=self.quality, shape=self.shape)

    def same_as(self, other: "DctPlane") -> bool:
        return (self.quality == other.quality and self.shape == other.shape
                and np.array_equal(self.coeffs, other.coeffs))


def blockify(array: np.ndarray) -> np.ndarray:
    """(H, W) -> (H/8, W/8, 8, 8)."""
    h, w = array.shape
    return array.reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK).swapaxes(1, 2)


def unblockify(blocks: np.ndarray) -> np.ndarray:
    bh, bw = blocks.shape[:2]
    return blocks.swapaxes(1, 2).reshape(bh * BLOCK, bw * BLOCK)


def ac_mask(shape: tuple[int, int]) -> np.ndarray:
    mask = np.ones(shape, dtype=bool)
    mask[::BLOCK, ::BLOCK] = False
    return mask


def _pad(image: np.ndarray) -> np.ndarray:
    h, w = image.shape
    return np.pad(image, ((0, -h % BLOCK), (0, -w % BLOCK)), mode="edge")


def block_dct(blocks: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT-II over the last two axes (unquantized)."""
    return dctn(np.asarray(blocks, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def block_idct(spectrum: np.ndarray) -> np.ndarray:
    return idctn(np.asarray(spectrum, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def forward(image: np.ndarray, quality: int = 80) -> DctPlane:
    table = quant_table(quality)
    image = np.asarray(image)
    if image.ndim != 2 or image.size == 0:
        raise ValueError("forward expects a non-empty 2-D gray image")
    shifted = _pad(image).astype(np.float64) - 128.0
    spectrum = block_dct(blockify(shifted))
    quantized = round_half_away(spectrum / table).astype(np.int32)
    return DctPlane(coeffs=unblockify(quantized), quality=quality, shape=image.shape)


def inverse(plane: DctPlane) -> np.ndarray:
    table = quant_table(plane.quality)
    dequantized = blockify(plane.coeffs).astype(np.float64) * table
    pixels = block_idct(dequantized) + 128.0
    image = np.clip(round_half_away(unblockify(pixels)), 0, 255).astype(np.uint8)
    h, w = plane.shape
    return image[:h, :w]


def nonzero_ac_count(plane: DctPlane) -> int:
    return int(np.count_nonzero(plane.coeffs[ac_mask(plane.coeffs.shape)]))


def write_plane_csv(plane: DctPlane, path) -> None:
    blocks = blockify(plane.coeffs)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["block_row", "block_col", "i", "j", "coeff"])
        for idx in np.ndindex(blocks.shape):
            writer.writerow([*idx, int(blocks[idx])])
