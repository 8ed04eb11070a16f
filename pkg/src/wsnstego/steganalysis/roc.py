from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = ["RocCurve", "roc_curve"]


@dataclass(frozen=True, eq=False)
class RocCurve:
    thresholds: np.ndarray  # first entry is +inf (nothing flagged)
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["threshold", "fpr", "tpr"])
            for row in zip(self.thresholds, self.fpr, self.tpr):
                writer.writerow([repr(float(v)) for v in row])


def roc_curve(cover_scores, stego_scores) -> RocCurve:
    """Sweep "stego iff score >= threshold" over every distinct score.

    Tied scores move both rates in one step, so ties contribute a diagonal
    segment; the AUC is the trapezoidal area under the points.
    """
    cover = np.asarray(cover_scores, dtype=np.float64).ravel()
    stego = np.asarray(stego_scores, dtype=np.float64).ravel()
    if cover.size == 0 or stego.size == 0:
        raise ValueError("roc_curve needs nonempty cover and stego scores")
    thresholds = np.unique(np.concatenate([cover, stego]))[::-1]
    cover_sorted = np.sort(cover)
    stego_sorted = np.sort(stego)
    # count of scores >= threshold
    fp = cover.size - np.searchsorted(cover_sorted, thresholds, side="left")
    tp = stego.size - np.searchsorted(stego_sorted, thresholds, side="left")
    fpr = np.concatenate([[0.0], fp / cover.size])
    tpr = np.concatenate([[0.0], tp / stego.size])
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(thresholds=np.concatenate([[np.inf], thresholds]), fpr=fpr, tpr=tpr, auc=auc)
