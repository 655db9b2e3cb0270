"""Small-scale tSNE on a distance or similarity matrix.

Gradient descent on KL(P || Q) with perplexity-calibrated Gaussian
conditionals (binary search per row), symmetrized P, and Student-t Q.
Defaults sized for a few dozen points: perplexity 5, 1000 iterations,
learning rate 100, early exaggeration x4 for the first 100 iterations,
seed 0.

The second half of the run switches from momentum descent to monotone
mode: a step that raises KL is rolled back and the learning rate halved,
which keeps KL non-increasing (within 1e-6) over the final iterations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytics import DistanceMatrix, SimilarityMatrix
from .errors import DegenerateInputError, PerplexityTooLargeError

_EPS = 1e-12


@dataclass
class Embedding:
    labels: list[str]
    points: np.ndarray        # (k, d)
    final_kl: float
    seed: int
    kl_history: np.ndarray    # per-iteration KL


def similarity_to_distance(sim: SimilarityMatrix,
                           unobserved: str = "max") -> np.ndarray:
    """d = 1 - s for observed pairs; unobserved pairs get the maximum
    observed distance ("max", default) or 1.0 ("one")."""
    s = np.asarray(sim.values, float)
    d = 1.0 - s
    np.fill_diagonal(d, 0.0)
    mask = ~np.asarray(sim.observed, bool)
    np.fill_diagonal(mask, False)
    if mask.any():
        observed_off = d[~mask & ~np.eye(len(d), dtype=bool)]
        fill = float(observed_off.max()) if unobserved == "max" else 1.0
        d = np.where(mask, fill, d)
    return d


def conditional_probabilities(d2: np.ndarray, perplexity: float,
                              tol: float = 1e-7, max_iter: int = 128
                              ) -> np.ndarray:
    """Row-stochastic conditionals p(j|i) matching log2-perplexity entropy."""
    k = d2.shape[0]
    P = np.zeros((k, k))
    target = np.log(perplexity)
    for i in range(k):
        lo, hi = 1e-12, 1e12
        beta = 1.0
        di = np.delete(d2[i], i)
        for _ in range(max_iter):
            w = np.exp(-di * beta)
            sw = w.sum()
            if sw <= 0:
                beta = lo = max(lo / 2.0, 1e-15)
                continue
            p = w / sw
            h = float(-(p * np.log(np.maximum(p, _EPS))).sum())
            if abs(h - target) < tol:
                break
            if h > target:
                lo = beta
                beta = beta * 2.0 if hi >= 1e12 else (beta + hi) / 2.0
            else:
                hi = beta
                beta = (lo + beta) / 2.0
        row = np.insert(p, i, 0.0)
        P[i] = row
    return P


def _kl_and_grad(P: np.ndarray, Y: np.ndarray) -> tuple[float, np.ndarray]:
    diff = Y[:, None, :] - Y[None, :, :]
    d2 = (diff ** 2).sum(axis=2)
    w = 1.0 / (1.0 + d2)
    np.fill_diagonal(w, 0.0)
    Q = w / max(w.sum(), _EPS)
    Q = np.maximum(Q, _EPS)
    kl = float((P * np.log(np.maximum(P, _EPS) / Q)).sum())
    PQw = (P - Q) * w
    grad = 4.0 * (PQw.sum(axis=1)[:, None] * Y - PQw @ Y)
    return kl, grad


def tsne(matrix: DistanceMatrix | SimilarityMatrix | np.ndarray,
         labels: list[str] | None = None, d: int = 2, perplexity: float = 5.0,
         iterations: int = 1000, seed: int = 0, learning_rate: float = 100.0,
         early_exaggeration: float = 4.0, exaggeration_iters: int = 100,
         unobserved: str = "max") -> Embedding:
    """Embed a square symmetric distance (or similarity) matrix into d dims."""
    if d not in (2, 3):
        raise ValueError("d must be 2 or 3")
    if isinstance(matrix, SimilarityMatrix):
        labels = labels or list(matrix.labels)
        D = similarity_to_distance(matrix, unobserved)
    elif isinstance(matrix, DistanceMatrix):
        labels = labels or list(matrix.labels)
        D = np.asarray(matrix.values, float)
    else:
        D = np.asarray(matrix, float)
        labels = labels or [str(i) for i in range(len(D))]
    k = len(D)
    if D.shape != (k, k) or not np.allclose(D, D.T, atol=1e-9):
        raise ValueError("tsne needs a square symmetric matrix")
    if k < d + 1:
        raise ValueError(f"need at least {d + 1} points for a {d}D embedding")
    if perplexity > (k - 1) / 3.0:
        raise PerplexityTooLargeError(
            f"perplexity {perplexity} exceeds (k-1)/3 = {(k - 1) / 3:.2f}")
    off = D[~np.eye(k, dtype=bool)]
    if np.ptp(off) < 1e-12:
        raise DegenerateInputError("all pairwise distances are equal")

    P = conditional_probabilities(D ** 2, perplexity)
    P = (P + P.T) / (2.0 * k)
    P = np.maximum(P, _EPS)

    rng = np.random.default_rng(seed)
    Y = 1e-4 * rng.standard_normal((k, d))
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)
    lr = learning_rate
    momentum_switch = min(250, iterations // 2)
    monotone_from = iterations // 2
    kl_history = np.empty(iterations)
    Pex = P * early_exaggeration

    for it in range(iterations):
        Puse = Pex if it < exaggeration_iters else P
        kl0, grad = _kl_and_grad(Puse, Y)
        if it < monotone_from:
            momentum = 0.5 if it < momentum_switch else 0.8
            inc = (update * grad) < 0
            gains[inc] += 0.2
            gains[~inc] *= 0.8
            np.clip(gains, 0.01, None, out=gains)
            update = momentum * update - lr * gains * grad
            # adaptive step control: a small-k problem has large P entries,
            # so unclamped steps at the default learning rate can run away
            np.clip(update, -2.0, 2.0, out=update)
            Y = Y + update
            Y = Y - Y.mean(axis=0)
            kl_history[it], _ = _kl_and_grad(Puse, Y)
        else:
            # monotone phase: backtracking plain gradient steps so KL never
            # increases over the final half of the run
            recorded = kl0
            for _ in range(60):
                Ynew = Y - lr * grad
                Ynew = Ynew - Ynew.mean(axis=0)
                kl_after, _ = _kl_and_grad(Puse, Ynew)
                if kl_after <= kl0 + 1e-9:
                    Y = Ynew
                    recorded = min(kl_after, kl0)
                    break
                lr *= 0.5
            kl_history[it] = recorded
    final_kl, _ = _kl_and_grad(P, Y)
    return Embedding(list(labels), Y, final_kl, seed, kl_history)


def embedding_to_rgb(emb: Embedding) -> dict[str, tuple[int, int, int]]:
    """Per-axis min-max map of a 3D embedding to RGB in [0, 255].

    A degenerate axis (zero range) maps to the mid value 128.
    """
    if emb.points.shape[1] != 3:
        raise ValueError("embedding_to_rgb needs a 3D embedding")
    Y = emb.points
    out = {}
    chans = np.empty_like(Y)
    for a in range(3):
        lo, hi = float(Y[:, a].min()), float(Y[:, a].max())
        if hi - lo < 1e-12:
            chans[:, a] = 128.0
        else:
            chans[:, a] = (Y[:, a] - lo) / (hi - lo) * 255.0
    for i, label in enumerate(emb.labels):
        out[label] = tuple(int(v) for v in np.rint(chans[i]))
    return out
