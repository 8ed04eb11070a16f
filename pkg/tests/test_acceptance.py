"""Acceptance criteria 1-9, each reporting one PASS/FAIL line."""

import itertools
import time

import numpy as np
import pytest

from wsnstego.dctmodel import block_dct, forward, inverse, nonzero_ac_count
from wsnstego.fieldsim import FieldConfig, build_field, sense_snapshot
from wsnstego.harness import ExperimentConfig, cmd_experiment
from wsnstego.harness.pipeline import _load_dataset
from wsnstego.imageio import snapshot_to_gray
from wsnstego.steganalysis import oob_error, paired_error, train_ensemble
from wsnstego.steganalysis.ensemble import BaseLearner, EnsembleModel
from wsnstego.stegocodec import (
    HammingCode,
    Unsolvable,
    WetPaperSystem,
    f5_embed_auto,
    f5_extract,
    hamming_embed,
    nsf5_capacity,
    nsf5_embed,
    nsf5_extract,
    wet_paper_solve,
)
from wsnstego.stegocodec.codes import int_to_bits

from test_dctmodel import direct_dct


# --- 1: codec round trips ----------------------------------------------------------

def test_criterion_1_codec_roundtrips(criterion):
    start = time.perf_counter()
    planes = []
    for i in range(10):
        field = build_field(FieldConfig(side_length=128, zone_counts=(13, 10, 3), seed=500 + i))
        snap = sense_snapshot(field, (50, 75, 90, 100)[i % 4], 900 + i)
        planes.append(forward(snapshot_to_gray(snap, field), 80))
    rng = np.random.default_rng(2024)
    failures = {"f5": 0, "nsf5": 0}
    runs = 0
    for rate in (0.05, 0.1, 0.2):
        for trial in range(1000):
            plane = planes[trial % 10]
            length = int(rng.integers(1, nsf5_capacity(nonzero_ac_count(plane), rate) + 1))
            msg = rng.integers(0, 2, size=length)
            key = int(rng.integers(0, 2**63))
            stego, report = f5_embed_auto(plane, msg, key)
            failures["f5"] += not np.array_equal(f5_extract(stego, key, length, report.p), msg)
            stego, _ = nsf5_embed(plane, msg, key, rate)
            failures["nsf5"] += not np.array_equal(nsf5_extract(stego, key, length, rate), msg)
            runs += 1
    elapsed = time.perf_counter() - start
    ok = failures == {"f5": 0, "nsf5": 0} and elapsed < 60
    criterion(1, ok, f"codec round-trips: {runs} messages per codec, failures {failures}, {elapsed:.1f} s (< 60 s)")
    assert ok


# --- 2: Hamming matrix embedding vs exhaustive search ---------------------------

def test_criterion_2_hamming_oracle(criterion):
    rng = np.random.default_rng(7)
    disagreements = 0
    for p in (1, 2, 3, 4):
        code = HammingCode(p)
        n = code.n
        # All candidate outputs: no flip, then each single flip.
        flips = np.vstack([np.zeros(n, dtype=np.uint8), np.eye(n, dtype=np.uint8)])
        for _ in range(10_000):
            x = rng.integers(0, 2, size=n, dtype=np.uint8)
            m = rng.integers(0, 2, size=p, dtype=np.uint8)
            candidates = x ^ flips
            valid = np.all(candidates @ code.H.T % 2 == m, axis=1)
            y = hamming_embed(x, m, code)
            ok = (np.count_nonzero(y != x) <= 1 and np.array_equal(code.H @ y % 2, m)
                  and valid.sum() == 1 and np.array_equal(candidates[np.argmax(valid)], y))
            disagreements += not ok
    ok = disagreements == 0
    criterion(2, ok, f"Hamming embedding vs exhaustive search, p=1..4, 4 x 10000 trials, {disagreements} disagreements")
    assert ok


# --- 3: wet paper solver vs exhaustive search -----------------------------------

def _reachable(columns: list[int], dry: list[int]) -> np.ndarray:
    """Syndrome of every subset of the dry columns (2^|dry| entries)."""
    subsets = np.arange(2 ** len(dry), dtype=np.int64)
    syndromes = np.zeros_like(subsets)
    for bit, j in enumerate(dry):
        syndromes ^= ((subsets >> bit) & 1) * columns[j]
    return syndromes


def test_criterion_3_wet_paper_oracle(criterion):
    rng = np.random.default_rng(11)
    disagreements = solvable = 0
    for _ in range(10_000):
        k = int(rng.integers(1, 11))
        n = int(rng.integers(1, min(16, 2**k - 1) + 1))
        columns = (rng.choice(2**k - 1, size=n, replace=False) + 1).tolist()
        dry = np.flatnonzero(rng.random(n) < rng.random()).tolist()
        delta = int(rng.integers(0, 2**k))
        D = np.array([int_to_bits(c, k) for c in columns], dtype=np.uint8).T
        system = WetPaperSystem(D, dry)
        oracle = bool(np.any(_reachable(columns, dry) == delta))
        try:
            v = wet_paper_solve(system, int_to_bits(delta, k))
            found = True
            valid = (np.array_equal(D.astype(int) @ v % 2, int_to_bits(delta, k))
                     and set(np.flatnonzero(v).tolist()) <= set(dry))
        except Unsolvable:
            found, valid = False, True
        solvable += oracle
        disagreements += (found != oracle) or not valid
    ok = disagreements == 0
    criterion(3, ok, f"wet paper solver vs exhaustive search, 10000 systems ({solvable} solvable), "
                     f"{disagreements} disagreements")
    assert ok


# --- 4: out-of-bag error identities ----------------------------------------------

def test_criterion_4_oob_identities(criterion):
    n = 500
    rng = np.random.default_rng(4)
    covers = rng.normal(0, 1, size=(n, 8))
    stegos = covers + 20.0  # every learner separates the classes
    model = train_ensemble(covers, stegos, L=25, d_sub=4, seed=1)
    perfect = oob_error(model, covers, stegos)
    flipped = EnsembleModel(
        learners=[BaseLearner(l.subspace, -l.weights, -l.bias, l.in_bag) for l in model.learners],
        dim=model.dim, d_sub=model.d_sub, seed=model.seed, n_train=model.n_train)
    inverted = oob_error(flipped, covers, stegos)
    noise_c, noise_s = rng.normal(size=(2, n, 8))
    coin_model = oob_error(train_ensemble(noise_c, noise_s, L=25, d_sub=4, seed=2), noise_c, noise_s)
    coin_votes = paired_error(rng.integers(0, 2, size=n), rng.integers(0, 2, size=n))
    ok = (perfect == 0.0 and inverted == 1.0 and abs(coin_model - 0.5) <= 0.05 and abs(coin_votes - 0.5) <= 0.05)
    criterion(4, ok, f"OOB identities at N=500: perfect {perfect}, inverted {inverted}, "
                     f"coin-flip {coin_model:.4f} (ensemble on noise) / {coin_votes:.4f} (random votes)")
    assert ok


# --- 5-8: the full default experiment ----------------------------------------------

@pytest.fixture(scope="module")
def default_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("default")
    cfg = ExperimentConfig(out=str(out))
    start = time.perf_counter()
    summary = cmd_experiment(cfg)
    elapsed = time.perf_counter() - start
    curve = np.loadtxt(out / "train_eval" / "oob_curve.csv", delimiter=",", skiprows=1)[:, 1]
    return {"cfg": cfg, "summary": summary, "elapsed": elapsed, "curve": curve,
            "data": _load_dataset(out / "train_eval")}


def test_criterion_5_nsf5_undetectable(criterion, default_run):
    summary, curve, elapsed = default_run["summary"], default_run["curve"], default_run["elapsed"]
    drift = float(np.max(np.abs(curve[29:] - curve[29])))
    ok = summary["pairs"] >= 200 and summary["auc"] <= 0.65 and drift <= 0.05 and elapsed <= 600
    criterion(5, ok, f"ensemble vs nsF5 at 0.1 bpac, {summary['pairs']} pairs: AUC {summary['auc']:.3f} (<= 0.65), "
                     f"OOB {summary['oob']:.3f}, OOB drift beyond L=30 {drift:.3f} (<= 0.05), {elapsed:.0f} s (<= 600)")
    assert ok


def test_criterion_6_classic_detectors_catch_lsb(criterion, default_run):
    summary = default_run["summary"]
    ok = summary["close_pairs_auc"] >= 0.9 and summary["rqp_auc"] >= 0.9
    criterion(6, ok, f"LSB replacement at {summary['lsb_rate']} bpp: close-pairs AUC {summary['close_pairs_auc']:.3f}, "
                     f"RQP AUC {summary['rqp_auc']:.3f} (both >= 0.9)")
    assert ok


def test_criterion_7_embedding_rate(criterion, default_run):
    rates = np.concatenate([default_run["data"]["achieved_rate"],
                            [a["achieved_rate"] for a in default_run["summary"]["attack"]]])
    worst = float(np.max(np.abs(rates - 0.1)))
    ok = worst <= 0.001
    criterion(7, ok, f"achieved rate on {len(rates)} 256x256 snapshots: {rates.min():.5f}..{rates.max():.5f} "
                     f"bpac, worst deviation {worst:.5f} (<= 0.001)")
    assert ok


def _tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_criterion_8_determinism(criterion, tmp_path):
    values = dict(side_length=64, zone_counts=(6, 4, 2), pairs=24, learners=12, d_sub_sweep=(16, 62))
    runs = []
    for name, workers in (("a", 1), ("b", 1), ("c", 2), ("d", 3)):
        cmd_experiment(ExperimentConfig(out=str(tmp_path / name), workers=workers, **values))
        runs.append(_tree(tmp_path / name))
    identical = all(run == runs[0] for run in runs[1:])
    text_files = [k for k in runs[0] if k.endswith((".csv", ".json", ".jsonl"))]
    ok = identical and len(text_files) > 0
    criterion(8, ok, f"4 experiment runs (workers 1, 1, 2, 3): {len(runs[0])} files each "
                     f"({len(text_files)} CSV/JSON), byte-identical: {identical}")
    assert ok


# --- 9: DCT sanity -------------------------------------------------------------------

def test_criterion_9_dct_sanity(criterion):
    rng = np.random.default_rng(9)
    worst_pixel = 0
    for _ in range(100):
        shape = tuple(rng.integers(8, 65, size=2))
        image = rng.integers(0, 256, size=shape, dtype=np.uint8)
        worst_pixel = max(worst_pixel, int(np.max(np.abs(inverse(forward(image, 100)).astype(int) - image))))
    worst_rel = 0.0
    for _ in range(100):
        block = rng.uniform(-128, 127, size=(8, 8))
        ref = direct_dct(block)
        fast = block_dct(block)
        worst_rel = max(worst_rel, float(np.max(np.abs(fast - ref)) / np.max(np.abs(ref))))
        energy = abs((fast**2).sum() - (block**2).sum()) / (block**2).sum()
        worst_rel = max(worst_rel, float(energy))
    ok = worst_pixel <= 1 and worst_rel <= 1e-9
    criterion(9, ok, f"DCT: quality-100 round-trip max error {worst_pixel} px on 100 images (<= 1), "
                     f"direct-oracle relative error {worst_rel:.2e} (<= 1e-9)")
    assert ok
