"""simulate -> attack -> train/evaluate, with deterministic file outputs.

Output layout under ``config.out``::

    snapshots/snapshot_tNNN.pgm|.csv      gray sink view and raw readings
    attack/attacked_tNNN.pgm|.csv         attacked sink view and readings
    attack/deltas_tNNN.csv                x,y,old,new per modified sensor
    attack/reports.jsonl                  one embedding report per tick
    train_eval/features.csv               one row per exemplar, label column
    train_eval/classic_scores.csv         close-pair and RQP scores
    train_eval/roc.csv                    threshold,fpr,tpr of the ensemble
    train_eval/roc_summary.json           AUC and OOB on one line
    train_eval/oob_curve.csv              OOB error against ensemble size
    train_eval/dsub_sweep.csv             OOB and AUC against subspace size
    train_eval/summary.json
    summary.json                          written by the experiment command
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..dctmodel import DctPlane, forward, inverse, nonzero_ac_count
from ..fieldsim import SensorField, Snapshot, apply_attack, build_field, sense_snapshot
from ..imageio import (
    clamp_to_reachable,
    gray_delta_to_sensor_deltas,
    read_snapshot_csv,
    snapshot_to_gray,
    write_pgm,
    write_snapshot_csv,
)
from ..steganalysis import (
    close_color_pairs_stat,
    extract_features,
    feature_names,
    oob_curve,
    oob_error,
    roc_curve,
    rqp_test,
    train_ensemble,
)
from ..stegocodec import (
    CapacityExceeded,
    EmbedReport,
    bits_from_bytes,
    f5_embed_auto,
    lsb_replace_embed,
    nsf5_capacity,
    nsf5_embed,
)
from ..stegocodec.common import keyed_rng
from .config import ExperimentConfig

__all__ = [
    "AttackResult",
    "attack_snapshot",
    "build_dataset",
    "cmd_attack",
    "cmd_experiment",
    "cmd_simulate",
    "cmd_train_eval",
    "evaluate",
    "exemplar",
]

log = logging.getLogger(__name__)

_TAG_MESSAGE = 0x3E55
_TAG_SPLIT = 0x5B17


@dataclass(frozen=True, eq=False)
class AttackResult:
    attacked: Snapshot
    report: EmbedReport
    deltas: list
    cover_gray: np.ndarray
    attacked_gray: np.ndarray
    cover_plane: DctPlane
    stego_plane: Optional[DctPlane]

    def record(self, **extra) -> dict:
        row = dict(json.loads(self.report.to_json()))
        row["sensors_changed"] = len(self.deltas)
        row["pixels_changed"] = int(np.count_nonzero(self.cover_gray != self.attacked_gray))
        row.update(extra)
        return row


def _message(key: int, salt: int, length: int) -> np.ndarray:
    return keyed_rng(key, _TAG_MESSAGE, salt).integers(0, 2, size=length, dtype=np.uint8)


def _checked_length(message: np.ndarray, capacity: int) -> int:
    if len(message) > capacity:
        raise CapacityExceeded(f"message of {len(message)} bits exceeds capacity {capacity}")
    return len(message)


def attack_snapshot(
    field: SensorField,
    snapshot: Snapshot,
    algorithm: str,
    rate: float,
    key: int,
    quality: int = 80,
    block_size: int = 256,
    message: Optional[np.ndarray] = None,
) -> AttackResult:
    """Embed a payload in the sink's view and map it back onto sensors.

    JPEG-domain attacks add the pixel-domain footprint of the coefficient
    changes, ``inverse(stego) - inverse(cover)``, to the raw gray view; the
    LSB attack edits the raw gray view directly.  Targets are clipped to what
    each sensor's channel can render, then turned into sensor edits.
    Without an explicit ``message`` a keyed random one fills the capacity.
    """
    cover_gray = snapshot_to_gray(snapshot, field)
    cover_plane = forward(cover_gray, quality)
    stego_plane = None
    salt = snapshot.time

    if algorithm == "lsb":
        length = int(np.floor(rate * cover_gray.size))
        if message is not None:
            length = _checked_length(message, length)
        bits = _message(key, salt, length) if message is None else message
        target = lsb_replace_embed(cover_gray, bits, key)
        report = EmbedReport("lsb", length, int(np.count_nonzero(target != cover_gray)), 0,
                             nonzero_ac_count(cover_plane), length / cover_gray.size)
    else:
        nonzero = nonzero_ac_count(cover_plane)
        length = nsf5_capacity(nonzero, rate)
        if message is not None:
            length = _checked_length(message, length)
        else:
            message = _message(key, salt, length)
        if length == 0:
            stego_plane = cover_plane
            report = EmbedReport(algorithm, 0, 0, 0, nonzero, 0.0)
        elif algorithm == "nsf5":
            stego_plane, report = nsf5_embed(cover_plane, message, key, rate, block_size)
        else:
            stego_plane, report = f5_embed_auto(cover_plane, message, key)
        footprint = inverse(stego_plane).astype(np.int64) - inverse(cover_plane).astype(np.int64)
        target = np.clip(cover_gray.astype(np.int64) + footprint, 0, 255)

    target = clamp_to_reachable(target, field)
    deltas = gray_delta_to_sensor_deltas(cover_gray, target, field, snapshot)
    attacked = apply_attack(snapshot, deltas)
    return AttackResult(
        attacked=attacked,
        report=report,
        deltas=deltas,
        cover_gray=cover_gray,
        attacked_gray=snapshot_to_gray(attacked, field),
        cover_plane=cover_plane,
        stego_plane=stego_plane,
    )


# --- simulate / attack -------------------------------------------------------


def _snapshot_paths(out: Path, t: int) -> tuple[Path, Path]:
    base = out / "snapshots" / f"snapshot_t{t:03d}"
    return base.with_suffix(".pgm"), base.with_suffix(".csv")


def cmd_simulate(cfg: ExperimentConfig, resume: bool = False) -> list[Path]:
    out = Path(cfg.out)
    (out / "snapshots").mkdir(parents=True, exist_ok=True)
    field = build_field(cfg.field_config())
    written = []
    for t in cfg.ticks:
        pgm, table = _snapshot_paths(out, t)
        if not (resume and pgm.exists() and table.exists()):
            snapshot = sense_snapshot(field, t, cfg.seed)
            write_pgm(snapshot_to_gray(snapshot, field), pgm)
            write_snapshot_csv(snapshot, field, table)
        written += [pgm, table]
    return written


def _write_deltas(deltas, snapshot: Snapshot, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y", "old", "new"])
        for (x, y), value in deltas:
            writer.writerow([x, y, repr(float(snapshot.readings[y, x])), repr(float(value))])


def cmd_attack(cfg: ExperimentConfig, resume: bool = False) -> list[dict]:
    out = Path(cfg.out)
    attack_dir = out / "attack"
    attack_dir.mkdir(parents=True, exist_ok=True)
    reports_path = attack_dir / "reports.jsonl"
    expected = [attack_dir / f"attacked_t{t:03d}.pgm" for t in cfg.ticks]
    if resume and reports_path.exists() and all(p.exists() for p in expected):
        return [json.loads(line) for line in reports_path.read_text().splitlines() if line]

    field = build_field(cfg.field_config())
    message = bits_from_bytes(Path(cfg.message_file).read_bytes()) if cfg.message_file else None
    records = []
    for t in cfg.ticks:
        _, table = _snapshot_paths(out, t)
        if not table.exists():
            raise FileNotFoundError(f"{table} missing; run the simulate command first")
        snapshot = read_snapshot_csv(table, t)
        result = attack_snapshot(field, snapshot, cfg.algorithm, cfg.rate, cfg.key, cfg.quality,
                                 cfg.block_size, message)
        base = attack_dir / f"attacked_t{t:03d}"
        write_pgm(result.attacked_gray, base.with_suffix(".pgm"))
        write_snapshot_csv(result.attacked, field, base.with_suffix(".csv"))
        _write_deltas(result.deltas, snapshot, attack_dir / f"deltas_t{t:03d}.csv")
        records.append(result.record(tick=t))
    reports_path.write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in records))
    return records


# --- dataset -----------------------------------------------------------------


def exemplar(cfg: ExperimentConfig, index: int) -> dict:
    """One cover/stego pair plus the LSB contrast pair, a pure function of (cfg, index)."""
    if not cfg.ticks:
        raise ValueError("the dataset needs at least one tick")
    field_seed, noise_seed, key = (int(v) for v in
                                   np.random.SeedSequence([cfg.seed, index]).generate_state(3, np.uint64))
    field = build_field(cfg.field_config(seed=field_seed))
    t = cfg.ticks[index % len(cfg.ticks)]
    snapshot = sense_snapshot(field, t, noise_seed)
    result = attack_snapshot(field, snapshot, cfg.algorithm, cfg.rate, key, cfg.quality, cfg.block_size)
    cover_gray = result.cover_gray
    lsb_gray = lsb_replace_embed(
        cover_gray, _message(key, ~index & 0xFFFF, int(np.floor(cfg.lsb_rate * cover_gray.size))), key)
    return {
        "index": index,
        "tick": t,
        "cover": extract_features(result.cover_plane),
        "stego": extract_features(forward(result.attacked_gray, cfg.quality)),
        "ccp_cover": close_color_pairs_stat(cover_gray),
        "ccp_lsb": close_color_pairs_stat(lsb_gray),
        "rqp_cover": rqp_test(cover_gray, key),
        "rqp_lsb": rqp_test(lsb_gray, key),
        "achieved_rate": result.report.achieved_rate,
        "coefficients_changed": result.report.coefficients_changed,
        "sensors_changed": len(result.deltas),
    }


def _exemplar_job(args):
    return exemplar(*args)


def _write_rows(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value) -> str:
    return repr(float(value))


def _save_dataset(data: dict, directory: Path) -> None:
    names = feature_names()
    rows = []
    for i in range(len(data["index"])):
        for label in ("cover", "stego"):
            rows.append([data["index"][i], label, *map(_fmt, data[label][i])])
    _write_rows(directory / "features.csv", ["exemplar", "label", *names], rows)
    columns = ["index", "tick", "ccp_cover", "ccp_lsb", "rqp_cover", "rqp_lsb",
               "achieved_rate", "coefficients_changed", "sensors_changed"]
    rows = [[data[c][i] if c in ("index", "tick", "coefficients_changed", "sensors_changed") else _fmt(data[c][i])
             for c in columns] for i in range(len(data["index"]))]
    _write_rows(directory / "classic_scores.csv", columns, rows)


def _load_dataset(directory: Path) -> dict:
    with open(directory / "features.csv", newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    data = {"cover": np.array([[float(v) for v in r[2:]] for r in rows if r[1] == "cover"]),
            "stego": np.array([[float(v) for v in r[2:]] for r in rows if r[1] == "stego"])}
    with open(directory / "classic_scores.csv", newline="") as fh:
        reader = csv.DictReader(fh)
        table = list(reader)
    for column in reader.fieldnames:
        cast = int if column in ("index", "tick", "coefficients_changed", "sensors_changed") else float
        data[column] = np.array([cast(r[column]) for r in table])
    return data


def build_dataset(cfg: ExperimentConfig, directory: Path | None = None, resume: bool = False) -> dict:
    if directory is not None and resume and (directory / "features.csv").exists() \
            and (directory / "classic_scores.csv").exists():
        return _load_dataset(directory)
    jobs = [(cfg, i) for i in range(cfg.pairs)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_exemplar_job, jobs, chunksize=4))
    else:
        results = [exemplar(*job) for job in jobs]
    data = {key: np.array([r[key] for r in results]) for key in results[0]}
    if directory is not None:
        directory.mkdir(parents=True, exist_ok=True)
        _save_dataset(data, directory)
        # Reload so a fresh run and a resumed run see bit-identical inputs.
        data = _load_dataset(directory)
    return data


# --- train / evaluate --------------------------------------------------------


def _split(cfg: ExperimentConfig, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = keyed_rng(cfg.seed, _TAG_SPLIT).permutation(n)
    n_train = int(n * cfg.train_fraction)
    return np.sort(order[:n_train]), np.sort(order[n_train:])


def evaluate(cfg: ExperimentConfig, data: dict, directory: Path | None = None) -> dict:
    covers, stegos = data["cover"], data["stego"]
    if len(covers) == 0 or len(stegos) == 0 or len(covers) != len(stegos):
        raise ValueError("training needs paired, nonempty cover and stego exemplars")
    train, test = _split(cfg, len(covers))
    dim = covers.shape[1]
    d_sub = cfg.d_sub or -(-dim // 4)
    model = train_ensemble(covers[train], stegos[train], L=cfg.learners, d_sub=d_sub, seed=cfg.seed)
    oob = oob_error(model, covers[train], stegos[train])
    curve = oob_curve(model, covers[train], stegos[train])
    roc = roc_curve(model.score(covers[test]), model.score(stegos[test]))

    sweep = []
    for size in cfg.d_sub_sweep:
        if not 1 <= size <= dim:
            continue
        sub = train_ensemble(covers[train], stegos[train], L=cfg.learners, d_sub=size, seed=cfg.seed)
        sub_roc = roc_curve(sub.score(covers[test]), sub.score(stegos[test]))
        sweep.append((size, oob_error(sub, covers[train], stegos[train]), sub_roc.auc))

    ccp_auc = roc_curve(1.0 - data["ccp_cover"], 1.0 - data["ccp_lsb"]).auc
    rqp_auc = roc_curve(-np.abs(1.0 - data["rqp_cover"]), -np.abs(1.0 - data["rqp_lsb"])).auc
    summary = {
        "config_hash": cfg.config_hash(),
        "algorithm": cfg.algorithm,
        "rate": cfg.rate,
        "pairs": int(len(covers)),
        "n_train": int(len(train)),
        "n_test": int(len(test)),
        "learners": cfg.learners,
        "d_sub": d_sub,
        "auc": roc.auc,
        "oob": oob,
        "oob_at_30": float(curve[min(29, len(curve) - 1)]),
        "oob_final": float(curve[-1]),
        "achieved_rate": float(np.mean(data["achieved_rate"])),
        "coefficients_changed_mean": float(np.mean(data["coefficients_changed"])),
        "sensors_changed_mean": float(np.mean(data["sensors_changed"])),
        "lsb_rate": cfg.lsb_rate,
        "close_pairs_auc": ccp_auc,
        "rqp_auc": rqp_auc,
    }
    if directory is not None:
        directory.mkdir(parents=True, exist_ok=True)
        roc.write_csv(directory / "roc.csv")
        (directory / "roc_summary.json").write_text(json.dumps({"auc": roc.auc, "oob": oob}, sort_keys=True) + "\n")
        _write_rows(directory / "oob_curve.csv", ["learners", "oob"],
                    [[l + 1, _fmt(v)] for l, v in enumerate(curve)])
        _write_rows(directory / "dsub_sweep.csv", ["d_sub", "oob", "auc"],
                    [[s, _fmt(o), _fmt(a)] for s, o, a in sweep])
        (directory / "summary.json").write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return summary


def cmd_train_eval(cfg: ExperimentConfig, resume: bool = False) -> dict:
    directory = Path(cfg.out) / "train_eval"
    data = build_dataset(cfg, directory, resume=resume)
    return evaluate(cfg, data, directory)


def cmd_experiment(cfg: ExperimentConfig, resume: bool = False) -> dict:
    cmd_simulate(cfg, resume=resume)
    attacks = cmd_attack(cfg, resume=resume)
    summary = cmd_train_eval(cfg, resume=resume)
    summary = dict(summary)
    summary["attack"] = [
        {k: r[k] for k in ("tick", "achieved_rate", "bits_embedded", "coefficients_changed",
                           "sensors_changed", "pixels_changed")}
        for r in attacks
    ]
    path = Path(cfg.out) / "summary.json"
    path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return summary
