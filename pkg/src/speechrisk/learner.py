"""Margin classifier and model-selection plumbing.

The classifier is an L2-regularized hinge-loss linear model trained in
the dual by coordinate descent. The intercept rides along as an extra
constant-1 feature, so it is regularized together with the weights and
the dual stays box-constrained. Epoch order is a seeded permutation;
training stops when no coordinate's projected gradient exceeds the
tolerance, or at the epoch cap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .errors import (
    EmptyMatrixError,
    EmptyPredictionListError,
    MissingClassError,
    NonFiniteInputError,
    SingleClassTrainingError,
)

log = logging.getLogger(__name__)

DEFAULT_C_GRID = (1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7)
DEFAULT_TOL = 1e-4
DEFAULT_MAX_EPOCHS = 10_000
STD_CLAMP = 1e-8
INNER_FOLDS = 5


@dataclass(frozen=True)
class Scaler:
    """Per-column standardization fit on training rows only."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Scaler":
        X = _check_matrix(X)
        std = X.std(axis=0)  # population
        std = np.where(std < STD_CLAMP, 1.0, std)
        return cls(mean=X.mean(axis=0), std=std)

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = _check_matrix(X)
        if X.shape[1] != len(self.mean):
            raise EmptyMatrixError(
                f"scaler fit on {len(self.mean)} columns, got {X.shape[1]}"
            )
        return (X - self.mean) / self.std


def _check_matrix(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise EmptyMatrixError(f"expected a non-empty 2-D matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteInputError("matrix contains non-finite values")
    return X


def _check_labels(y: np.ndarray, n: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (n,):
        raise EmptyMatrixError(f"labels shape {y.shape} does not match {n} rows")
    if not np.all(np.isin(y, (0, 1))):
        raise NonFiniteInputError("labels must be 0 or 1")
    return y.astype(np.int64)


@dataclass(frozen=True)
class LinearSvmModel:
    weights: np.ndarray
    bias: float
    c: float
    training_meta: dict = field(default_factory=dict)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = _check_matrix(X)
        if X.shape[1] != len(self.weights):
            raise EmptyMatrixError(
                f"model has {len(self.weights)} weights, got {X.shape[1]} columns"
            )
        return X @ self.weights + self.bias

    def predict(self, X: np.ndarray) -> np.ndarray:
        # a decision of exactly 0 resolves to the high-risk class
        return (self.decision_function(X) >= 0.0).astype(np.int64)


def svm_objective(weights: np.ndarray, bias: float, X: np.ndarray,
                  y01: np.ndarray, c: float) -> float:
    """Primal value: 0.5 (||w||^2 + b^2) + C * sum of hinge losses."""
    s = np.where(np.asarray(y01) == 1, 1.0, -1.0)
    margins = s * (X @ weights + bias)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * (float(np.dot(weights, weights)) + bias * bias) + c * float(hinge.sum())


@njit(cache=True)
def _cd_epoch(Xa, s, q_diag, alpha, v, c, order):
    """One sweep of dual coordinate updates in the given visit order.

    Mutates alpha and v in place and returns the sweep's worst projected
    gradient. Compiled because the epoch cap makes the pure-Python loop
    the pipeline's bottleneck.
    """
    worst = 0.0
    for k in range(order.shape[0]):
        i = order[k]
        xi = Xa[i]
        grad = s[i] * np.dot(v, xi) - 1.0
        a = alpha[i]
        if a <= 0.0:
            pg = min(grad, 0.0)
        elif a >= c:
            pg = max(grad, 0.0)
        else:
            pg = grad
        if pg != 0.0:
            if abs(pg) > worst:
                worst = abs(pg)
            new_a = min(max(a - grad / q_diag[i], 0.0), c)
            if new_a != a:
                delta = (new_a - a) * s[i]
                for j in range(v.shape[0]):
                    v[j] += delta * xi[j]
                alpha[i] = new_a
    return worst


def _dual_cd(Xa: np.ndarray, s: np.ndarray, c: float, tol: float,
             max_epochs: int, rng: np.random.Generator) -> tuple[np.ndarray, int, float]:
    """Coordinate descent over the box-constrained dual.

    Xa already carries the constant-1 intercept column. Returns the
    primal-composite vector v = sum alpha_i s_i x_i, the epoch count and
    the final epoch's worst projected gradient.
    """
    n, d = Xa.shape
    Xa = np.ascontiguousarray(Xa)
    q_diag = np.einsum("ij,ij->i", Xa, Xa)
    alpha = np.zeros(n)
    v = np.zeros(d)
    worst = np.inf
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        order = rng.permutation(n)
        worst = _cd_epoch(Xa, s, q_diag, alpha, v, float(c), order)
        if worst < tol:
            break
    return v, epoch, worst


def train_linear_svm(X: np.ndarray, y: np.ndarray, c: float,
                     seed: int = 0, tol: float = DEFAULT_TOL,
                     max_epochs: int = DEFAULT_MAX_EPOCHS) -> LinearSvmModel:
    """Fit the hinge-loss linear model at a fixed cost parameter."""
    X = _check_matrix(X)
    y = _check_labels(y, X.shape[0])
    if len(np.unique(y)) < 2:
        raise SingleClassTrainingError("training rows cover only one class")
    if not np.isfinite(c) or c <= 0.0:
        raise ValueError(f"cost parameter must be positive, got {c}")
    s = np.where(y == 1, 1.0, -1.0)
    Xa = np.hstack([X, np.ones((X.shape[0], 1))])
    rng = np.random.default_rng(seed)
    v, epochs, worst = _dual_cd(Xa, s, c, tol, max_epochs, rng)
    if worst >= tol:
        log.warning("solver hit the %d-epoch cap with violation %.3g", epochs, worst)
    weights, bias = v[:-1].copy(), float(v[-1])
    meta = {
        "epochs": epochs,
        "final_violation": worst,
        "converged": bool(worst < tol),
        "objective": svm_objective(weights, bias, X, y, c),
        "seed": seed,
    }
    return LinearSvmModel(weights=weights, bias=bias, c=c, training_meta=meta)


def balanced_accuracy(y_true, y_pred) -> float:
    """Mean recall over the classes present in the reference labels."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.size == 0:
        raise EmptyPredictionListError("no predictions to score")
    if y_true.shape != y_pred.shape:
        raise EmptyPredictionListError(
            f"shape mismatch: {y_true.shape} labels, {y_pred.shape} predictions"
        )
    classes = np.unique(y_true)
    if classes.size == 0:
        raise MissingClassError("reference labels are empty")
    recalls = [
        float(np.mean(y_pred[y_true == cls] == cls)) for cls in classes
    ]
    return float(np.mean(recalls))


def _grouped_stratified_folds(groups: np.ndarray, y: np.ndarray, k: int,
                              rng: np.random.Generator) -> list[np.ndarray]:
    """Assign whole groups to folds, round-robin inside each class.

    Groups are single-class here (labels live at the subject level), so
    stratification reduces to dealing each class's shuffled groups out in
    turn. Folds with no rows are dropped.
    """
    group_class: dict = {}
    for g, cls in zip(groups, y):
        group_class.setdefault(g, int(cls))
    fold_of: dict = {}
    for cls in sorted(set(group_class.values())):
        members = sorted(g for g, c in group_class.items() if c == cls)
        order = rng.permutation(len(members))
        for slot, j in enumerate(order):
            fold_of[members[j]] = slot % k
    folds = []
    for f in range(k):
        idx = np.asarray([i for i, g in enumerate(groups) if fold_of[g] == f],
                         dtype=np.intp)
        if len(idx):
            folds.append(idx)
    return folds


def select_c(X: np.ndarray, y: np.ndarray, groups: Sequence,
             c_grid: Sequence[float] = DEFAULT_C_GRID, k: int = INNER_FOLDS,
             seed: int = 0, tol: float = DEFAULT_TOL,
             max_epochs: int = DEFAULT_MAX_EPOCHS) -> tuple[float, dict]:
    """Pick the cost parameter by grouped stratified cross-validation.

    Validation predictions are pooled over folds and scored once with
    balanced accuracy. Ties prefer the smaller cost. When one class has a
    single group, cross-validation is impossible and the smallest cost in
    the grid wins by default.
    """
    X = _check_matrix(X)
    y = _check_labels(y, X.shape[0])
    groups = np.asarray(groups)
    if groups.shape != y.shape:
        raise EmptyMatrixError("groups must align with labels")
    if not c_grid:
        raise ValueError("c_grid must be non-empty")
    grid = sorted(set(float(c) for c in c_grid), reverse=True)

    counts = {
        cls: len(set(groups[y == cls])) for cls in np.unique(y)
    }
    if len(counts) < 2:
        raise SingleClassTrainingError("model selection needs both classes")
    k_eff = min(k, min(counts.values()))
    if k_eff < 2:
        log.warning(
            "a class has only one subject in the training fold; "
            "defaulting to the smallest cost %.3g", grid[-1]
        )
        return grid[-1], {"fallback": "single_group_class", "scores": {}}
    if k_eff < k:
        log.info("inner folds reduced from %d to %d by class group counts", k, k_eff)

    rng = np.random.default_rng(seed)
    folds = _grouped_stratified_folds(groups, y, k_eff, rng)
    fold_seeds = [int(rng.integers(0, 2**31 - 1)) for _ in folds]

    scores: dict[float, float] = {}
    best_c, best_score = None, -np.inf
    for c in grid:
        truths, preds = [], []
        for fold_idx, val_idx in enumerate(folds):
            train_mask = np.ones(len(y), dtype=bool)
            train_mask[val_idx] = False
            y_train = y[train_mask]
            if len(np.unique(y_train)) < 2:
                continue
            model = train_linear_svm(X[train_mask], y_train, c,
                                     seed=fold_seeds[fold_idx],
                                     tol=tol, max_epochs=max_epochs)
            truths.append(y[val_idx])
            preds.append(model.predict(X[val_idx]))
        if not truths:
            continue
        score = balanced_accuracy(np.concatenate(truths), np.concatenate(preds))
        scores[c] = score
        if score >= best_score:  # >= so the later, smaller cost wins ties
            best_c, best_score = c, score
    if best_c is None:
        log.warning("no scoreable inner split; defaulting to the smallest cost")
        return grid[-1], {"fallback": "no_scoreable_split", "scores": {}}
    return best_c, {"scores": scores, "k_eff": k_eff}
