"""Binary codes used for syndrome embedding: Hamming matrix embedding and wet paper codes.

Bit vectors are packed into Python ints with the first row as the most
significant bit, so column ``j`` of the Hamming matrix is simply ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "HammingCode",
    "Unsolvable",
    "WetPaperSystem",
    "bits_to_int",
    "f5_lsb",
    "hamming_embed",
    "hamming_syndrome",
    "int_to_bits",
    "solve_columns",
    "wet_paper_solve",
]


class Unsolvable(ArithmeticError):
    """The syndrome is not in the span of the changeable columns."""


def f5_lsb(c: int) -> int:
    """F5 parity: odd/even for positive values, shifted by one for negatives.

    Decrementing the magnitude of any nonzero coefficient always flips it.
    """
    return (1 - c) % 2 if c < 0 else c % 2


def bits_to_int(bits: Sequence[int]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | (int(b) & 1)
    return value


def int_to_bits(value: int, width: int) -> list[int]:
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


@dataclass(frozen=True)
class HammingCode:
    p: int
    H: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("Hamming code needs p >= 1")
        n = 2**self.p - 1
        H = np.array([int_to_bits(j, self.p) for j in range(1, n + 1)], dtype=np.uint8).T
        object.__setattr__(self, "H", H)

    @property
    def n(self) -> int:
        return 2**self.p - 1


def hamming_syndrome(x: Sequence[int]) -> int:
    s = 0
    for j, bit in enumerate(x, start=1):
        if bit:
            s ^= j
    return s


def hamming_embed(x: Sequence[int], m: Sequence[int], code: HammingCode) -> np.ndarray:
    """Return ``y`` with ``H y = m`` differing from ``x`` in at most one place."""
    x = np.asarray(x, dtype=np.uint8)
    if len(x) != code.n or len(m) != code.p:
        raise ValueError(f"need |x| = {code.n} and |m| = {code.p}")
    y = x.copy()
    flip = hamming_syndrome(x) ^ bits_to_int(m)
    if flip:
        y[flip - 1] ^= 1
    return y


def solve_columns(
    columns: Sequence[int],
    candidates: Sequence[int],
    target: int,
    minimize: bool = False,
    sweeps: int = 8,
) -> int:
    """GF(2) elimination: find a subset of ``candidates`` whose columns XOR to ``target``.

    Returns the subset as a bitmask over column indices, raises Unsolvable.
    Without ``minimize`` elimination stops once the basis spans the target
    space.  With it, every candidate is reduced and the dependent ones give
    null-space vectors; the solution is then greedily XORed with those
    vectors while that lowers its weight.
    """
    basis: dict[int, tuple[int, int]] = {}
    null: list[int] = []
    full = max((columns[i].bit_length() for i in candidates), default=0)
    for idx in candidates:
        vec = columns[idx]
        combo = 1 << idx
        while vec:
            top = vec.bit_length() - 1
            pivot = basis.get(top)
            if pivot is None:
                basis[top] = (vec, combo)
                break
            vec ^= pivot[0]
            combo ^= pivot[1]
        if not vec:
            null.append(combo)
        if not minimize and len(basis) == full:
            break
    combo = 0
    vec = target
    while vec:
        pivot = basis.get(vec.bit_length() - 1)
        if pivot is None:
            raise Unsolvable("syndrome outside the span of the dry columns")
        vec ^= pivot[0]
        combo ^= pivot[1]
    if minimize:
        weight = combo.bit_count()
        for _ in range(sweeps):
            improved = False
            for z in null:
                candidate = combo ^ z
                if candidate.bit_count() < weight:
                    combo, weight, improved = candidate, candidate.bit_count(), True
            if not improved:
                break
    return combo


@dataclass(frozen=True, eq=False)
class WetPaperSystem:
    """``D`` is a k x n binary matrix; ``dry`` lists the 0-based changeable columns."""

    D: np.ndarray
    dry: tuple[int, ...]

    def __post_init__(self):
        D = np.asarray(self.D, dtype=np.uint8)
        if D.ndim != 2:
            raise ValueError("D must be a 2-D binary matrix")
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "dry", tuple(sorted(set(int(i) for i in self.dry))))
        if any(not 0 <= i < D.shape[1] for i in self.dry):
            raise ValueError("dry index out of range")

    @property
    def k(self) -> int:
        return self.D.shape[0]

    @property
    def n(self) -> int:
        return self.D.shape[1]

    def columns(self) -> list[int]:
        return [bits_to_int(col) for col in self.D.T]

    def check_columns(self) -> None:
        cols = self.columns()
        if 0 in cols:
            raise ValueError("D has a null column")
        if len(set(cols)) != len(cols):
            raise ValueError("D has replicated columns")


def wet_paper_solve(system: WetPaperSystem, delta: Sequence[int]) -> np.ndarray:
    """Solve ``D v = delta`` over GF(2) with ``v`` supported on the dry columns."""
    if len(delta) != system.k:
        raise ValueError(f"delta must have {system.k} bits")
    columns = system.columns()
    combo = solve_columns(columns, system.dry, bits_to_int(delta))
    v = np.array([(combo >> j) & 1 for j in range(system.n)], dtype=np.uint8)
    assert np.array_equal(system.D.astype(np.int64) @ v % 2, np.asarray(delta) % 2)
    return v
