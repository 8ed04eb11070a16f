from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from ..dctmodel import BLOCK, DctPlane, ac_mask

__all__ = [
    "CapacityExceeded",
    "EmbedReport",
    "EmbeddingFailed",
    "ac_order",
    "attack_map",
    "bits_from_bytes",
    "bytes_from_bits",
    "keyed_rng",
]

# Stream tags keep the per-purpose generators of one key independent.
TAG_F5 = 0xF5
TAG_NSF5_ORDER = 0x75F5
TAG_NSF5_MATRIX = 0x75F6
TAG_LSB = 0x1B


class CapacityExceeded(ValueError):
    pass


class EmbeddingFailed(RuntimeError):
    """Wet paper blocks stayed unsolvable after every retry."""


@dataclass(frozen=True)
class EmbedReport:
    algorithm: str
    bits_embedded: int
    coefficients_changed: int
    shrinkage_events: int
    nonzero_ac: int
    achieved_rate: float
    p: Optional[int] = None
    relaxed_blocks: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def keyed_rng(key: int, *tags: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(key), *map(int, tags)])))


def ac_order(shape: tuple[int, int], key: int, tag: int) -> np.ndarray:
    """Flat indices of every AC position, in a key-seeded pseudorandom order."""
    positions = np.flatnonzero(ac_mask(shape))
    return keyed_rng(key, tag).permutation(positions)


def attack_map(before: DctPlane, after: DctPlane) -> list[tuple[tuple[int, int], int, int, int, int]]:
    """Every changed coefficient as ``((block_row, block_col), i, j, old, new)``."""
    if before.coeffs.shape != after.coeffs.shape or before.shape != after.shape:
        raise ValueError("planes have different geometry")
    rows, cols = np.nonzero(before.coeffs != after.coeffs)
    return [
        ((r // BLOCK, c // BLOCK), r % BLOCK, c % BLOCK, int(before.coeffs[r, c]), int(after.coeffs[r, c]))
        for r, c in zip(rows.tolist(), cols.tolist())
    ]


def bits_from_bytes(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bytes_from_bits(bits) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()
