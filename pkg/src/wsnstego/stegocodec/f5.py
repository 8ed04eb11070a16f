"""F5: Hamming matrix embedding over key-permuted nonzero AC coefficients."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..dctmodel import DctPlane, nonzero_ac_count
from .codes import bits_to_int, f5_lsb, int_to_bits
from .common import TAG_F5, CapacityExceeded, EmbedReport, ac_order

__all__ = ["f5_embed", "f5_embed_auto", "f5_extract"]


def _padded_groups(message: Sequence[int], p: int) -> list[int]:
    bits = [int(b) & 1 for b in message]
    bits += [0] * (-len(bits) % p)
    return [bits_to_int(bits[i:i + p]) for i in range(0, len(bits), p)]


def f5_embed(plane: DctPlane, message: Sequence[int], key: int, p: int) -> tuple[DctPlane, EmbedReport]:
    n = 2**p - 1
    order = ac_order(plane.coeffs.shape, key, TAG_F5)
    flat = plane.coeffs.ravel()
    values = flat[order].tolist()
    total = len(values)
    changed = shrinkage = 0
    pos = 0

    for target in _padded_groups(message, p):
        while True:
            group = []
            while len(group) < n and pos < total:
                if values[pos]:
                    group.append(pos)
                pos += 1
            if len(group) < n:
                raise CapacityExceeded(f"ran out of nonzero AC coefficients at p={p}")
            syndrome = 0
            for j, idx in enumerate(group, start=1):
                if f5_lsb(values[idx]):
                    syndrome ^= j
            flip = syndrome ^ target
            if not flip:
                break
            idx = group[flip - 1]
            values[idx] += -1 if values[idx] > 0 else 1
            changed += 1
            if values[idx]:
                break
            # Shrinkage: the zeroed coefficient drops out and the same bits are
            # embedded again in the group that follows it.
            shrinkage += 1
            pos = group[0]

    coeffs = flat.copy()
    coeffs[order] = values
    nonzero = nonzero_ac_count(plane)
    report = EmbedReport(
        algorithm="f5",
        bits_embedded=len(message),
        coefficients_changed=changed,
        shrinkage_events=shrinkage,
        nonzero_ac=nonzero,
        achieved_rate=len(message) / nonzero if nonzero else 0.0,
        p=p,
    )
    return plane.with_coeffs(coeffs.reshape(plane.coeffs.shape)), report


def f5_embed_auto(plane: DctPlane, message: Sequence[int], key: int, max_p: int = 7) -> tuple[DctPlane, EmbedReport]:
    """Embed with the largest code parameter ``p`` that still fits the message."""
    nonzero = nonzero_ac_count(plane)
    for p in range(max_p, 0, -1):
        # Groups needed even without shrinkage; skip codes that cannot fit.
        if -(-len(message) // p) * (2**p - 1) > nonzero:
            continue
        try:
            return f5_embed(plane, message, key, p)
        except CapacityExceeded:
            continue
    raise CapacityExceeded("message does not fit even at p=1")


def f5_extract(plane: DctPlane, key: int, length: int, p: int) -> np.ndarray:
    n = 2**p - 1
    order = ac_order(plane.coeffs.shape, key, TAG_F5)
    values = [v for v in plane.coeffs.ravel()[order].tolist() if v]
    n_groups = -(-length // p)
    if n_groups * n > len(values):
        raise CapacityExceeded(f"{length} bits need {n_groups * n} coefficients, plane has {len(values)}")
    bits = []
    for g in range(n_groups):
        syndrome = 0
        for j, v in enumerate(values[g * n:(g + 1) * n], start=1):
            if f5_lsb(v):
                syndrome ^= j
        bits.extend(int_to_bits(syndrome, p))
    return np.array(bits[:length], dtype=np.uint8)
