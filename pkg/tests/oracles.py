"""Independent reference computations the test suite checks against.

Everything here is deliberately written with a different algorithm or a
plainer structure than the package code it validates: the margin
classifier is solved by projected subgradient descent instead of dual
coordinate descent, the metric by explicit per-class loops, and the mel
band prediction from a freshly derived filter grid.
"""

from __future__ import annotations

import numpy as np


def svm_oracle_objective(X: np.ndarray, y01: np.ndarray, c: float,
                         n_iters: int = 200_000) -> float:
    """Best primal value found by projected subgradient descent.

    Minimizes 0.5 (||w||^2 + b^2) + c * sum hinge with the intercept
    folded into the variable vector. The objective is 1-strongly convex,
    so a 1/t step with best-iterate tracking converges to the optimum.
    """
    X = np.asarray(X, dtype=np.float64)
    s = np.where(np.asarray(y01) == 1, 1.0, -1.0)
    A = np.hstack([X, np.ones((X.shape[0], 1))])
    u = np.zeros(A.shape[1])
    best = _primal_value(u, A, s, c)
    for t in range(1, n_iters + 1):
        margins = s * (A @ u)
        active = margins < 1.0
        grad = u - c * (s[active] @ A[active])
        u = u - grad / t
        value = _primal_value(u, A, s, c)
        if value < best:
            best = value
    return best


def _primal_value(u: np.ndarray, A: np.ndarray, s: np.ndarray, c: float) -> float:
    hinge = np.maximum(0.0, 1.0 - s * (A @ u))
    return 0.5 * float(u @ u) + c * float(hinge.sum())


def balanced_accuracy_oracle(y_true, y_pred) -> float:
    """Per-class recall average computed with explicit loops."""
    y_true = list(y_true)
    y_pred = list(y_pred)
    recalls = []
    for cls in sorted(set(y_true)):
        hits = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p == cls)
        total = sum(1 for t in y_true if t == cls)
        recalls.append(hits / total)
    return sum(recalls) / len(recalls)


def mel_oracle_band(tone_hz: float, n_mels: int, fmin_hz: float, fmax_hz: float,
                    sample_rate_hz: int) -> tuple[int, float]:
    """Band a pure tone should dominate, from first principles.

    Rebuilds the warped band grid (2595 * log10(1 + f/700), evenly spaced
    band edges, unit-peak triangles) and evaluates each triangle at the
    tone frequency. Returns the winning band and its response margin over
    the runner-up; tests should only use tones with a clear margin, since
    spectral leakage in the real analysis blurs near-ties.
    """
    def warp(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def unwarp(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    edges = unwarp(np.linspace(warp(fmin_hz), warp(fmax_hz), n_mels + 2))
    responses = np.zeros(n_mels)
    for m in range(n_mels):
        left, center, right = edges[m], edges[m + 1], edges[m + 2]
        if left < tone_hz < center:
            responses[m] = (tone_hz - left) / (center - left)
        elif center <= tone_hz < right:
            responses[m] = (right - tone_hz) / (right - center)
    order = np.argsort(responses)
    margin = float(responses[order[-1]] - responses[order[-2]])
    return int(order[-1]), margin


def loso_mirror(X: np.ndarray, segment_subjects: list[str],
                subject_labels: dict[str, int], seed: int,
                c_grid: tuple[float, ...], inner_k: int = 5):
    """Re-run the documented leave-one-subject-out protocol from scratch.

    Uses only training-partition rows for every fitted statistic, via the
    package's own primitive ops but restructured as plain loops. Returns
    per-subject predictions and decision values for comparison against
    the orchestrated run.
    """
    from speechrisk.evaluation import fold_seed, majority_vote
    from speechrisk.learner import Scaler, select_c, train_linear_svm

    segment_subjects = list(segment_subjects)
    subjects = sorted(set(segment_subjects))
    out = {}
    for held_out in subjects:
        test_idx = [i for i, s in enumerate(segment_subjects) if s == held_out]
        train_idx = [i for i, s in enumerate(segment_subjects) if s != held_out]
        y_train = np.asarray([subject_labels[segment_subjects[i]] for i in train_idx])
        if len(set(y_train.tolist())) < 2:
            out[held_out] = None
            continue
        scaler = Scaler.fit(X[train_idx])
        X_train = scaler.transform(X[train_idx])
        X_test = scaler.transform(X[test_idx])
        fs = fold_seed(seed, held_out)
        groups = [segment_subjects[i] for i in train_idx]
        best_c, _ = select_c(X_train, y_train, groups, c_grid=c_grid,
                             k=inner_k, seed=fs)
        model = train_linear_svm(X_train, y_train, best_c, seed=fs)
        preds = model.predict(X_test)
        decisions = model.decision_function(X_test)
        out[held_out] = {
            "best_c": best_c,
            "preds": preds,
            "decisions": decisions,
            "subject_pred": majority_vote(preds, decisions),
        }
    return out
