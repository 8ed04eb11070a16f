"""Synthetic sensor field and its timestamped snapshots.

A field is a ``side x side`` grid of sensors.  Each sensor measures one
modality (temperature, pressure or humidity) and belongs to one homogeneous
zone; zones are the Voronoi cells of seeded centers.  Modalities are dealt
to whole cells so that area totals approach the configured fractions, and a
few boundary sensors then change zone to hit them exactly.  A snapshot draws one Gaussian reading per sensor.

Randomness comes from the Philox4x64-10 counter-based generator (numpy's
``Philox`` bit generator, a published and stream-stable algorithm).  Only the
raw 64-bit outputs are used; the uniform and Gaussian conversions are done
here so that results never depend on numpy's sampling routines:

* uniform:  ``(raw >> 11) * 2**-53`` in ``[0, 1)``
* normal:   Box-Muller on two raw words of the sensor's own counter block,
  ``sqrt(-2 ln u1) * cos(2 pi u2)`` with ``u1 = ((raw0 >> 11) + 1) * 2**-53``

Sensor ``i = y * side + x`` at tick ``t`` reads counter block ``i`` under the
key ``(noise_seed, t)``, so any single reading can be reproduced in isolation
with :func:`sensor_noise`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "FieldConfig",
    "Modality",
    "SensorField",
    "Snapshot",
    "analytic_means",
    "apply_attack",
    "build_field",
    "sense_snapshot",
    "sensor_noise",
]

_MASK64 = (1 << 64) - 1
_CENTERS_TAG = 0x5A0E5  # second key word for zone-center draws
_TWO_POW_M53 = 2.0**-53


class Modality(enum.IntEnum):
    TEMPERATURE = 0
    PRESSURE = 1
    HUMIDITY = 2


@dataclass(frozen=True)
class FieldConfig:
    side_length: int = 256
    zone_counts: tuple[int, int, int] = (50, 40, 10)
    modality_fractions: tuple[float, float, float] = (0.5, 0.4, 0.1)
    drift_rates: tuple[float, float, float] = (0.005, 0.01, 0.001)
    base_mean: float = 40.0
    std_dev: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.side_length < 8:
            raise ValueError(f"side_length must be >= 8, got {self.side_length}")
        if len(self.zone_counts) != 3 or any(z <= 0 for z in self.zone_counts):
            raise ValueError(f"zone counts must be three positive integers, got {self.zone_counts}")
        if len(self.modality_fractions) != 3 or any(f <= 0 for f in self.modality_fractions):
            raise ValueError("modality fractions must be three positive numbers")
        if abs(sum(self.modality_fractions) - 1.0) > 1e-9:
            raise ValueError(f"modality fractions must sum to 1, got {self.modality_fractions}")
        if len(self.drift_rates) != 3:
            raise ValueError("expected one drift rate per modality")
        if self.std_dev < 0:
            raise ValueError("std_dev must be non-negative")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def n_sensors(self) -> int:
        return self.side_length**2

    def modality_targets(self) -> np.ndarray:
        """Sensor count per modality, largest-remainder rounding of the fractions."""
        exact = np.asarray(self.modality_fractions) * self.n_sensors
        counts = np.floor(exact).astype(np.int64)
        short = self.n_sensors - int(counts.sum())
        order = np.argsort(-(exact - counts), kind="stable")
        counts[order[:short]] += 1
        return counts


@dataclass(frozen=True, eq=False)
class SensorField:
    """Sensor grid. Arrays are indexed ``[y, x]``."""

    config: FieldConfig
    modality: np.ndarray  # uint8, Modality value per sensor
    zone_id: np.ndarray  # int32
    zone_centers: np.ndarray  # (n_zones, 2) integer (x, y)
    zone_modality: np.ndarray  # uint8, per zone

    @property
    def shape(self) -> tuple[int, int]:
        return self.modality.shape

    @property
    def n_zones(self) -> int:
        return len(self.zone_centers)

    def sensor(self, x: int, y: int) -> dict:
        return {
            "position": (x, y),
            "modality": Modality(int(self.modality[y, x])),
            "zone_id": int(self.zone_id[y, x]),
        }

    def same_as(self, other: "SensorField") -> bool:
        return (
            self.config == other.config
            and np.array_equal(self.modality, other.modality)
            and np.array_equal(self.zone_id, other.zone_id)
            and np.array_equal(self.zone_centers, other.zone_centers)
        )


@dataclass(frozen=True, eq=False)
class Snapshot:
    time: int
    readings: np.ndarray  # float64, [y, x]

    @property
    def shape(self) -> tuple[int, int]:
        return self.readings.shape

    def same_as(self, other: "Snapshot") -> bool:
        return self.time == other.time and np.array_equal(self.readings, other.readings)


def _philox(word0: int, word1: int, counter: int = 0) -> np.random.Philox:
    key = np.array([word0 & _MASK64, word1 & _MASK64], dtype=np.uint64)
    return np.random.Philox(key=key, counter=counter)


def _uniform(raw: np.ndarray) -> np.ndarray:
    return (raw >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53


def _box_muller(raw0: np.ndarray, raw1: np.ndarray) -> np.ndarray:
    u1 = ((raw0 >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * _TWO_POW_M53
    u2 = _uniform(raw1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def sensor_noise(noise_seed: int, t: int, index: int) -> float:
    """Standard-normal draw of sensor ``index`` at tick ``t``."""
    raw = _philox(noise_seed, t, counter=index).random_raw(4)
    return float(_box_muller(raw[:1], raw[1:2])[0])


def _standard_normals(noise_seed: int, t: int, count: int) -> np.ndarray:
    raw = _philox(noise_seed, t).random_raw(4 * count).reshape(count, 4)
    return _box_muller(raw[:, 0], raw[:, 1])


def _assign_modalities(areas: np.ndarray, zone_counts: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Modality per zone with the configured zone counts and area totals near the targets.

    Starts from the draw order and applies the best zone swap between two
    modalities while it lowers the total absolute excess.
    """
    zone_modality = np.repeat(np.arange(3, dtype=np.uint8), zone_counts)
    while True:
        excess = np.bincount(zone_modality, weights=areas, minlength=3) - targets
        base = np.abs(excess).sum()
        best = (base, None)
        for a in range(3):
            for b in range(a + 1, 3):
                za = np.flatnonzero(zone_modality == a)
                zb = np.flatnonzero(zone_modality == b)
                # Swapping za[i] (a -> b) with zb[j] (b -> a) moves diff[i, j] sensors from a to b.
                diff = areas[za][:, None] - areas[zb][None, :]
                rest = base - abs(excess[a]) - abs(excess[b])
                total = rest + np.abs(excess[a] - diff) + np.abs(excess[b] + diff)
                i, j = np.unravel_index(np.argmin(total), total.shape)
                if total[i, j] < best[0]:
                    best = (total[i, j], (za[i], zb[j], a, b))
        if best[1] is None:
            return zone_modality
        zi, zj, a, b = best[1]
        zone_modality[zi], zone_modality[zj] = b, a


_NEIGHBOURS = ((0, 1), (0, -1), (1, 0), (-1, 0))


def _absorb_fragments(zone_id: np.ndarray, centers: np.ndarray) -> None:
    """Hand every zone piece cut off from its center to a bordering zone, in place.

    Equidistant pixels go to the lower zone index, which can strand a pixel
    diagonally from the rest of its zone.
    """
    from scipy import ndimage

    side = zone_id.shape[0]
    changed = True
    while changed:
        changed = False
        for z, (cx, cy) in enumerate(centers):
            labels, parts = ndimage.label(zone_id == z)
            if parts <= 1:
                continue
            keep = labels[cy, cx]
            for y, x in zip(*np.nonzero((labels > 0) & (labels != keep))):
                near = [int(zone_id[y + dy, x + dx]) for dy, dx in _NEIGHBOURS
                        if 0 <= y + dy < side and 0 <= x + dx < side and zone_id[y + dy, x + dx] != z]
                if near:
                    zone_id[y, x] = max(set(near), key=lambda v: (near.count(v), -v))
                    changed = True


def _touching(mask: np.ndarray) -> np.ndarray:
    """Cells with a 4-neighbour inside ``mask``."""
    out = np.zeros_like(mask)
    out[1:] |= mask[:-1]
    out[:-1] |= mask[1:]
    out[:, 1:] |= mask[:, :-1]
    out[:, :-1] |= mask[:, 1:]
    return out


def _settle(modality, zone_id, per_mod_dist, centers, pinned, targets) -> None:
    """Move single boundary sensors between modalities until counts hit their targets.

    A moved sensor joins a zone it touches, and a move is skipped if it would
    split the zone it leaves, so every zone stays 4-connected.  When the
    surplus modality cannot give directly to the short one it gives to the
    third, which passes sensors on.  No sensor moves twice.  Works in place
    on the ``[y, x]`` grids.
    """
    from scipy import ndimage

    side = modality.shape[0]
    frozen = pinned.copy()

    def move_one(src: int, dst: int) -> bool:
        ys, xs = np.nonzero((modality == src) & ~frozen & _touching(modality == dst))
        cost = per_mod_dist[dst][ys, xs] - per_mod_dist[src][ys, xs]
        for i in np.argsort(cost, kind="stable"):
            y, x = int(ys[i]), int(xs[i])
            old = int(zone_id[y, x])
            zone_id[y, x] = -1
            if ndimage.label(zone_id == old)[1] != 1:
                zone_id[y, x] = old
                continue
            near = [int(zone_id[y + dy, x + dx]) for dy, dx in _NEIGHBOURS
                    if 0 <= y + dy < side and 0 <= x + dx < side and modality[y + dy, x + dx] == dst]
            d2 = [(centers[z, 0] - x) ** 2 + (centers[z, 1] - y) ** 2 for z in near]
            zone_id[y, x] = near[int(np.argmin(d2))]
            modality[y, x] = dst
            frozen[y, x] = True
            return True
        return False

    excess = np.bincount(modality.ravel(), minlength=3) - targets
    while np.any(excess != 0):
        src = int(np.argmax(excess))
        for dst in np.argsort(excess, kind="stable"):
            if dst != src and move_one(src, int(dst)):
                excess[src] -= 1
                excess[dst] += 1
                break
        else:
            raise ValueError("cannot balance modality fractions for this configuration")


def build_field(config: FieldConfig) -> SensorField:
    side = config.side_length
    n = config.n_sensors
    zone_counts = np.asarray(config.zone_counts)
    n_zones = int(zone_counts.sum())
    targets = config.modality_targets()
    if n_zones > n:
        raise ValueError(f"{n_zones} zones do not fit in {n} sensors")
    if np.any(targets < zone_counts):
        raise ValueError("a modality has fewer sensors than zones")

    # Distinct grid cells as zone centers: order cells by their raw draw.
    raw = _philox(config.seed, _CENTERS_TAG).random_raw(n)
    cells = np.argsort(raw, kind="stable")[:n_zones]
    centers = np.stack([cells % side, cells // side], axis=1).astype(np.int64)

    ys, xs = np.divmod(np.arange(n), side)
    d2 = (xs[:, None] - centers[:, 0]) ** 2 + (ys[:, None] - centers[:, 1]) ** 2
    zone_id = np.argmin(d2, axis=1).reshape(side, side)
    _absorb_fragments(zone_id, centers)
    areas = np.bincount(zone_id.ravel(), minlength=n_zones).astype(np.float64)
    zone_modality = _assign_modalities(areas, zone_counts, targets)

    # Distance to the nearest center of each modality prices boundary moves.
    per_mod_dist = np.stack([d2[:, zone_modality == m].min(axis=1) for m in range(3)])
    pinned = np.zeros(n, dtype=bool)
    pinned[cells] = True
    modality = zone_modality[zone_id]
    _settle(modality, zone_id, per_mod_dist.reshape(3, side, side), centers,
            pinned.reshape(side, side), targets)
    return SensorField(
        config=config,
        modality=modality.astype(np.uint8),
        zone_id=zone_id.astype(np.int32),
        zone_centers=centers,
        zone_modality=zone_modality,
    )


def zone_means(field: SensorField, t: int) -> np.ndarray:
    """Analytic mean of each zone at tick ``t``, evaluated at the zone center."""
    cfg = field.config
    unit = cfg.side_length - 1
    radius = np.hypot(field.zone_centers[:, 0] / unit, field.zone_centers[:, 1] / unit)
    rates = np.asarray(cfg.drift_rates)[field.zone_modality]
    return cfg.base_mean * (1.0 + rates * (t / 4.0) * radius)


def analytic_means(field: SensorField, t: int) -> np.ndarray:
    return zone_means(field, t)[field.zone_id]


def sense_snapshot(field: SensorField, t: int, noise_seed: int) -> Snapshot:
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    noise = _standard_normals(noise_seed, t, field.config.n_sensors).reshape(field.shape)
    readings = analytic_means(field, t) + field.config.std_dev * noise
    return Snapshot(time=t, readings=readings)


def apply_attack(snapshot: Snapshot, deltas: Iterable[tuple[Sequence[int], float]]) -> Snapshot:
    """Copy of ``snapshot`` with the listed ``((x, y), value)`` readings replaced."""
    readings = snapshot.readings.copy()
    height, width = readings.shape
    for (x, y), value in deltas:
        if not (0 <= x < width and 0 <= y < height):
            raise IndexError(f"position {(x, y)} outside {width}x{height} grid")
        readings[y, x] = value
    return Snapshot(time=snapshot.time, readings=readings)
