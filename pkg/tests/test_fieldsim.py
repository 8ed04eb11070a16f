import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import ndimage

from wsnstego.fieldsim import (
    FieldConfig,
    Modality,
    Snapshot,
    analytic_means,
    apply_attack,
    build_field,
    sense_snapshot,
    sensor_noise,
    zone_means,
)


def test_full_size_field_has_100_zones(field256):
    assert field256.n_zones == 100
    assert len(np.unique(field256.zone_id)) == 100
    assert np.array_equal(np.bincount(field256.zone_modality), [50, 40, 10])


def test_minimal_field_assigns_every_sensor():
    field = build_field(FieldConfig(side_length=8, zone_counts=(1, 1, 1), seed=0))
    assert field.n_zones == 3
    assert field.zone_id.shape == (8, 8)
    assert set(np.unique(field.zone_id)) == {0, 1, 2}


def test_build_is_deterministic():
    cfg = FieldConfig(side_length=64, zone_counts=(6, 4, 2), seed=9)
    assert build_field(cfg).same_as(build_field(cfg))
    assert not build_field(cfg).same_as(build_field(FieldConfig(side_length=64, zone_counts=(6, 4, 2), seed=10)))


@pytest.mark.parametrize("kwargs", [
    {"side_length": 7},
    {"zone_counts": (0, 40, 10)},
    {"modality_fractions": (0.5, 0.4, 0.2)},
    {"seed": -1},
])
def test_config_rejects_invalid(kwargs):
    with pytest.raises(ValueError):
        FieldConfig(**kwargs)


def _check_field(field):
    cfg = field.config
    # One zone per sensor, zone modality matches sensor modality.
    assert np.array_equal(field.modality, field.zone_modality[field.zone_id])
    # Modality shares within 1% of the configured fractions.
    shares = np.bincount(field.modality.ravel(), minlength=3) / cfg.n_sensors
    assert np.all(np.abs(shares - np.asarray(cfg.modality_fractions)) <= 0.01)
    # Zones are 4-connected and contain their own center.
    for z, (cx, cy) in enumerate(field.zone_centers):
        assert field.zone_id[cy, cx] == z
        assert ndimage.label(field.zone_id == z)[1] == 1
    assert np.array_equal(np.bincount(field.zone_modality, minlength=3), cfg.zone_counts)


def test_full_size_field_invariants(field256):
    _check_field(field256)
    assert np.array_equal(np.bincount(field256.modality.ravel()), field256.config.modality_targets())


@settings(max_examples=40, deadline=None)
@given(
    side=st.integers(8, 40),
    zones=st.tuples(st.integers(1, 5), st.integers(1, 4), st.integers(1, 3)),
    seed=st.integers(0, 2**64 - 1),
)
def test_field_invariants_property(side, zones, seed):
    _check_field(build_field(FieldConfig(side_length=side, zone_counts=zones, seed=seed)))


def test_mean_at_t0_is_base(field256):
    assert np.all(analytic_means(field256, 0) == 40.0)


def test_mean_formula_temperature_at_unit_radius():
    # Put one temperature center at (255, 0), normalized radius exactly 1: 40 * (1 + 0.005 * 25 * 1) = 45.
    field = build_field(FieldConfig(seed=1))
    hot = np.flatnonzero(field.zone_modality == Modality.TEMPERATURE)
    centers = field.zone_centers.copy()
    centers[hot[0]] = (255, 0)
    moved = type(field)(field.config, field.modality, field.zone_id, centers, field.zone_modality)
    assert zone_means(moved, 100)[hot[0]] == pytest.approx(45.0, abs=1e-12)


def test_zone_homogeneity(field256):
    means = analytic_means(field256, 75)
    for z in range(field256.n_zones):
        assert np.ptp(means[field256.zone_id == z]) == 0.0


def test_snapshot_deterministic_and_finite(field256):
    a = sense_snapshot(field256, 50, 3)
    b = sense_snapshot(field256, 50, 3)
    assert a.same_as(b)
    assert np.all(np.isfinite(a.readings))
    assert a.shape == field256.shape
    assert not a.same_as(sense_snapshot(field256, 50, 4))


def test_single_sensor_reproducible_in_isolation(field256, snapshot256):
    std = field256.config.std_dev
    means = analytic_means(field256, snapshot256.time)
    for x, y in [(0, 0), (17, 200), (255, 255)]:
        i = y * 256 + x
        expected = means[y, x] + std * sensor_noise(7, snapshot256.time, i)
        assert snapshot256.readings[y, x] == expected


def test_empirical_mean_within_three_sigma(small_field):
    # Sensor (x=59, y=1) over 10,000 independent noise seeds.
    x, y, t = 59, 1, 60
    mean = analytic_means(small_field, t)[y, x]
    draws = np.array([sense_snapshot(small_field, t, seed).readings[y, x] for seed in range(10_000)])
    assert abs(draws.mean() - mean) <= 3 * 5 / np.sqrt(10_000)
    assert draws.std() == pytest.approx(5.0, rel=0.03)


def test_negative_tick_rejected(small_field):
    with pytest.raises(ValueError):
        sense_snapshot(small_field, -1, 0)


def test_noise_matches_hand_rolled_box_muller():
    # Oracle: Philox4x64-10 raw words of counter block i, converted in plain Python.
    seed, t, i = 0xDEADBEEF, 42, 1000
    bits = np.random.Philox(key=np.array([seed, t], dtype=np.uint64), counter=i)
    raw0, raw1 = (int(v) for v in bits.random_raw(2))
    u1 = ((raw0 >> 11) + 1) * 2.0**-53
    u2 = (raw1 >> 11) * 2.0**-53
    expected = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
    assert sensor_noise(seed, t, i) == pytest.approx(expected, rel=1e-15)


def test_apply_attack_identity_and_point_update():
    snap = Snapshot(time=3, readings=np.arange(64, dtype=float).reshape(8, 8))
    assert apply_attack(snap, []).same_as(snap)
    hit = apply_attack(snap, [((0, 0), 99.0)])
    assert np.count_nonzero(hit.readings != snap.readings) == 1
    assert hit.readings[0, 0] == 99.0
    assert snap.readings[0, 0] == 0.0


def test_apply_attack_out_of_grid():
    snap = Snapshot(time=0, readings=np.zeros((8, 8)))
    with pytest.raises(IndexError):
        apply_attack(snap, [((8, 0), 1.0)])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 15), st.integers(0, 15), st.floats(-50, 300)), max_size=40))
def test_apply_attack_changes_exactly_listed_cells(deltas):
    snap = Snapshot(time=0, readings=np.full((16, 16), 1000.0))
    out = apply_attack(snap, [((x, y), v) for x, y, v in deltas])
    changed = {(int(x), int(y)) for y, x in zip(*np.nonzero(out.readings != snap.readings))}
    assert changed == {(x, y) for x, y, _ in deltas}
