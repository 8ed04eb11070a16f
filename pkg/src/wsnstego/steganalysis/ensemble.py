"""Random-subspace ensemble of Fisher linear discriminants with out-of-bag error.

Base learners see a random feature subspace and a bootstrap sample of the
cover/stego *pairs*; the pairs a learner never saw are its out-of-bag set.
Decisions use 1 for stego and 0 for cover.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BaseLearner",
    "DegenerateData",
    "EnsembleModel",
    "fld_train",
    "oob_curve",
    "oob_error",
    "paired_error",
    "train_ensemble",
]


class DegenerateData(ValueError):
    pass


def fld_train(covers: np.ndarray, stegos: np.ndarray) -> tuple[np.ndarray, float]:
    """Fisher linear discriminant; ``x`` is called stego iff ``w @ x + b > 0``."""
    covers = np.atleast_2d(np.asarray(covers, dtype=np.float64))
    stegos = np.atleast_2d(np.asarray(stegos, dtype=np.float64))
    if len(covers) < 2 or len(stegos) < 2:
        raise ValueError("need at least two exemplars per class")
    if covers.shape[1] != stegos.shape[1]:
        raise ValueError("class feature dimensions differ")
    mu_c = covers.mean(axis=0)
    mu_s = stegos.mean(axis=0)
    dc = covers - mu_c
    ds = stegos - mu_s
    scatter = dc.T @ dc + ds.T @ ds
    dim = scatter.shape[0]
    trace = np.trace(scatter)
    if trace <= 0:
        raise DegenerateData("within-class scatter is zero")
    ridge = 1e-6 * trace / dim
    weights = np.linalg.solve(scatter + ridge * np.eye(dim), mu_s - mu_c)
    bias = -float(weights @ (mu_s + mu_c)) / 2.0
    return weights, bias


@dataclass(frozen=True, eq=False)
class BaseLearner:
    subspace: np.ndarray
    weights: np.ndarray
    bias: float
    in_bag: np.ndarray  # bool per training pair

    def decide(self, features: np.ndarray) -> np.ndarray:
        projection = np.asarray(features)[:, self.subspace] @ self.weights + self.bias
        return (projection > 0).astype(np.int8)


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    learners: list[BaseLearner]
    dim: int
    d_sub: int
    seed: int
    n_train: int
    threshold: float = field(default=0.5)

    @property
    def L(self) -> int:
        return len(self.learners)

    def votes(self, features: np.ndarray) -> np.ndarray:
        """(n_samples, L) matrix of 0/1 learner decisions."""
        features = np.atleast_2d(features)
        return np.stack([lrn.decide(features) for lrn in self.learners], axis=1)

    def score(self, features: np.ndarray) -> np.ndarray:
        """Fraction of learners voting stego."""
        return self.votes(features).mean(axis=1)

    def predict(self, features: np.ndarray) -> np.ndarray:
        return (self.score(features) > self.threshold).astype(np.int8)


def _learner_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(index)])))


def train_ensemble(
    covers: np.ndarray,
    stegos: np.ndarray,
    L: int = 100,
    d_sub: int | None = None,
    seed: int = 0,
    max_redraws: int = 10,
) -> EnsembleModel:
    covers = np.asarray(covers, dtype=np.float64)
    stegos = np.asarray(stegos, dtype=np.float64)
    if covers.shape != stegos.shape or covers.ndim != 2:
        raise ValueError("covers and stegos must be paired (n, d) arrays")
    n, dim = covers.shape
    if n < 2:
        raise ValueError("need at least two training pairs")
    if L < 1:
        raise ValueError("L must be >= 1")
    if d_sub is None:
        d_sub = -(-dim // 4)
    if not 1 <= d_sub <= dim:
        raise ValueError(f"d_sub must be in [1, {dim}], got {d_sub}")

    learners = []
    for index in range(L):
        rng = _learner_rng(seed, index)
        bag = rng.integers(0, n, size=n)
        in_bag = np.bincount(bag, minlength=n) > 0
        for _ in range(max_redraws):
            subspace = np.sort(rng.choice(dim, size=d_sub, replace=False))
            try:
                weights, bias = fld_train(covers[bag][:, subspace], stegos[bag][:, subspace])
                break
            except DegenerateData:
                continue
        else:
            raise DegenerateData(f"learner {index}: every drawn subspace is constant")
        learners.append(BaseLearner(subspace=subspace, weights=weights, bias=bias, in_bag=in_bag))
    return EnsembleModel(learners=learners, dim=dim, d_sub=d_sub, seed=seed, n_train=n)


def paired_error(b_cover, b_stego) -> float:
    """Mean of ``B(X_m) + 1 - B(Xbar_m)`` over pairs, halved."""
    b_cover = np.asarray(b_cover, dtype=np.float64)
    b_stego = np.asarray(b_stego, dtype=np.float64)
    if b_cover.shape != b_stego.shape or b_cover.size == 0:
        raise ValueError("need equally many, and some, cover and stego decisions")
    return float((b_cover + 1.0 - b_stego).sum() / (2 * b_cover.size))


def _oob_votes(model: EnsembleModel, covers, stegos):
    covers = np.atleast_2d(covers)
    stegos = np.atleast_2d(stegos)
    if len(covers) != model.n_train or len(stegos) != model.n_train:
        raise ValueError("OOB error needs the training pairs the model was fit on")
    out = ~np.stack([lrn.in_bag for lrn in model.learners], axis=1)
    return model.votes(covers), model.votes(stegos), out


def _majority(stego_votes: np.ndarray, voters: np.ndarray) -> np.ndarray:
    return (2 * stego_votes > voters).astype(np.int8)


def oob_error(model: EnsembleModel, covers, stegos) -> float:
    """Out-of-bag paired error; each pair is judged only by learners that never saw it."""
    vc, vs, out = _oob_votes(model, covers, stegos)
    voters = out.sum(axis=1)
    has = voters > 0
    if not has.any():
        return float("nan")
    b_cover = _majority((vc * out).sum(axis=1), voters)
    b_stego = _majority((vs * out).sum(axis=1), voters)
    return paired_error(b_cover[has], b_stego[has])


def oob_curve(model: EnsembleModel, covers, stegos) -> np.ndarray:
    """OOB error of the first ``l`` learners, for ``l = 1 .. L``."""
    vc, vs, out = _oob_votes(model, covers, stegos)
    voters = np.cumsum(out, axis=1)
    cum_c = np.cumsum(vc * out, axis=1)
    cum_s = np.cumsum(vs * out, axis=1)
    curve = np.full(model.L, np.nan)
    for l in range(model.L):
        has = voters[:, l] > 0
        if has.any():
            curve[l] = paired_error(_majority(cum_c[has, l], voters[has, l]),
                                    _majority(cum_s[has, l], voters[has, l]))
    return curve
