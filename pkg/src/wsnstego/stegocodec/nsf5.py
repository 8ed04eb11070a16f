"""nsF5: wet paper syndrome coding over key-permuted nonzero AC coefficients.

The nonzero AC coefficients of the cover, visited in key order, are cut into
blocks of about ``block_size``.  Block ``b`` carries ``k_b`` message bits as
the syndrome ``D_b x`` of its coefficient parities, where ``D_b`` is a keyed
random matrix with distinct nonzero columns.  Changes always step a
coefficient by one away from its value and never make it zero, so the set of
nonzero coefficients (and thus the block layout) is identical for the
receiver, who only evaluates ``D_b x``.

Magnitude-1 coefficients are wet: decrementing them would zero them.  If a
block is unsolvable on its dry coefficients alone, the embedder retries once
letting magnitude-1 coefficients move away from zero (1 -> 2, -1 -> -2),
which flips the parity just as well.

Each block system is solved by GF(2) elimination followed by a greedy
null-space pass that lowers the number of changed coefficients.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..dctmodel import DctPlane, nonzero_ac_count
from .codes import Unsolvable, bits_to_int, f5_lsb, int_to_bits, solve_columns
from .common import (
    TAG_NSF5_MATRIX,
    TAG_NSF5_ORDER,
    CapacityExceeded,
    EmbeddingFailed,
    EmbedReport,
    ac_order,
    keyed_rng,
)

__all__ = ["DEFAULT_BLOCK_SIZE", "block_columns", "block_layout", "nsf5_capacity", "nsf5_embed", "nsf5_extract"]

DEFAULT_BLOCK_SIZE = 256


def nsf5_capacity(nonzero: int, rate: float) -> int:
    return math.floor(rate * nonzero)


def block_layout(nonzero: int, rate: float, length: int, block_size: int = DEFAULT_BLOCK_SIZE) -> list[tuple[int, int, int]]:
    """``(start, size, bits)`` per block.

    Block sizes differ by at most one; per-block capacities come from the
    cumulative floor of ``rate * coefficients`` so they sum to the total
    capacity exactly.  The message fills blocks in order.
    """
    if nonzero == 0:
        return []
    n_blocks = -(-nonzero // block_size)
    base, extra = divmod(nonzero, n_blocks)
    layout = []
    start = 0
    remaining = length
    for b in range(n_blocks):
        size = base + (b < extra)
        cap = nsf5_capacity(start + size, rate) - nsf5_capacity(start, rate)
        bits = min(cap, remaining)
        layout.append((start, size, bits))
        remaining -= bits
        start += size
    return layout


def block_columns(key: int, block: int, k: int, n: int) -> list[int]:
    """Columns of ``D`` for one block as k-bit ints.

    Columns are distinct and nonzero whenever ``n <= 2**k - 1``; for smaller
    ``k`` replicates are unavoidable and columns are drawn independently.
    """
    rng = keyed_rng(key, TAG_NSF5_MATRIX, block, k)
    top = (1 << k) - 1
    if n > top:
        return (rng.integers(0, top, size=n) + 1).tolist()
    if k <= 62:
        return (rng.choice(top, size=n, replace=False) + 1).tolist()
    columns: list[int] = []
    seen = set()
    while len(columns) < n:
        value = bits_to_int(rng.integers(0, 2, size=k))
        if value and value not in seen:
            seen.add(value)
            columns.append(value)
    return columns


def _checked(rate: float, block_size: int) -> None:
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    if block_size < 1:
        raise ValueError("block_size must be positive")


def _coefficient_order(plane: DctPlane, key: int) -> np.ndarray:
    order = ac_order(plane.coeffs.shape, key, TAG_NSF5_ORDER)
    return order[plane.coeffs.ravel()[order] != 0]


def nsf5_embed(
    plane: DctPlane,
    message: Sequence[int],
    key: int,
    rate_bpac: float,
    block_size: int = DEFAULT_BLOCK_SIZE,
    minimize_changes: bool = True,
) -> tuple[DctPlane, EmbedReport]:
    _checked(rate_bpac, block_size)
    order = _coefficient_order(plane, key)
    nonzero = len(order)
    capacity = nsf5_capacity(nonzero, rate_bpac)
    if len(message) > capacity:
        raise CapacityExceeded(f"{len(message)} bits exceed capacity {capacity} at {rate_bpac} bpac")

    bits = [int(b) & 1 for b in message]
    flat = plane.coeffs.ravel().copy()
    values = flat[order].tolist()
    changed = relaxed = 0
    offset = 0
    for b, (start, size, k) in enumerate(block_layout(nonzero, rate_bpac, len(bits), block_size)):
        if k == 0:
            break
        columns = block_columns(key, b, k, size)
        block = values[start:start + size]
        syndrome = 0
        for col, v in zip(columns, block):
            if f5_lsb(v):
                syndrome ^= col
        delta = syndrome ^ bits_to_int(bits[offset:offset + k])
        offset += k
        dry = [j for j, v in enumerate(block) if abs(v) >= 2]
        try:
            combo = solve_columns(columns, dry, delta, minimize=minimize_changes)
        except Unsolvable:
            relaxed += 1
            try:
                combo = solve_columns(columns, range(size), delta, minimize=minimize_changes)
            except Unsolvable:
                raise EmbeddingFailed(f"block {b} unsolvable after retry") from None
        j = 0
        while combo:
            if combo & 1:
                v = block[j]
                # Step toward zero when that keeps the value nonzero, else away from it.
                step = -1 if abs(v) >= 2 else 1
                values[start + j] = v + step if v > 0 else v - step
                changed += 1
            combo >>= 1
            j += 1

    flat[order] = values
    report = EmbedReport(
        algorithm="nsf5",
        bits_embedded=len(bits),
        coefficients_changed=changed,
        shrinkage_events=0,
        nonzero_ac=nonzero_ac_count(plane),
        achieved_rate=len(bits) / nonzero if nonzero else 0.0,
        relaxed_blocks=relaxed,
    )
    return plane.with_coeffs(flat.reshape(plane.coeffs.shape)), report


def nsf5_extract(
    plane: DctPlane,
    key: int,
    length: int,
    rate_bpac: float,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> np.ndarray:
    _checked(rate_bpac, block_size)
    order = _coefficient_order(plane, key)
    nonzero = len(order)
    if length > nsf5_capacity(nonzero, rate_bpac):
        raise CapacityExceeded(f"{length} bits exceed capacity at {rate_bpac} bpac")
    values = plane.coeffs.ravel()[order].tolist()
    bits: list[int] = []
    for b, (start, size, k) in enumerate(block_layout(nonzero, rate_bpac, length, block_size)):
        if k == 0:
            break
        syndrome = 0
        for col, v in zip(block_columns(key, b, k, size), values[start:start + size]):
            if f5_lsb(v):
                syndrome ^= col
        bits.extend(int_to_bits(syndrome, k))
    return np.array(bits, dtype=np.uint8)
