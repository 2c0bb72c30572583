"""Dev-time validation of the test oracles. Not part of the deliverable."""

import sys
import time

import numpy as np
from scipy.optimize import minimize

sys.path.insert(0, "tests")
from oracles import balanced_accuracy_oracle, mel_oracle_band, svm_oracle_objective

from speechrisk.learner import svm_objective, train_linear_svm


def qp_reference(X, y01, c):
    """Exact-ish QP solve with slack variables via SLSQP."""
    n, d = X.shape
    s = np.where(y01 == 1, 1.0, -1.0)
    A = np.hstack([X, np.ones((n, 1))])

    def fun(z):
        u, xi = z[: d + 1], z[d + 1 :]
        return 0.5 * float(u @ u) + c * float(xi.sum())

    def jac(z):
        u, xi = z[: d + 1], z[d + 1 :]
        return np.concatenate([u, np.full(n, c)])

    cons = [
        {
            "type": "ineq",
            "fun": lambda z, i=i: z[d + 1 + i] - (1.0 - s[i] * (A[i] @ z[: d + 1])),
            "jac": lambda z, i=i: np.concatenate(
                [s[i] * A[i], np.eye(n)[i]]
            ),
        }
        for i in range(n)
    ]
    bounds = [(None, None)] * (d + 1) + [(0.0, None)] * n
    z0 = np.zeros(d + 1 + n)
    z0[d + 1 :] = 1.0
    res = minimize(fun, z0, jac=jac, constraints=cons, bounds=bounds,
                   method="SLSQP", options={"maxiter": 500, "ftol": 1e-12})
    return res.fun


rng = np.random.default_rng(42)
print("=== subgradient oracle vs SLSQP QP vs CD solver ===")
for trial in range(6):
    n = int(rng.integers(8, 21))
    d = int(rng.integers(2, 6))
    X = rng.standard_normal((n, d))
    y = rng.integers(0, 2, n)
    while len(set(y.tolist())) < 2:
        y = rng.integers(0, 2, n)
    c = [1.0, 0.1, 0.01][trial % 3]
    t0 = time.time()
    qp = qp_reference(X, y, c)
    t1 = time.time()
    sub50 = svm_oracle_objective(X, y, c, n_iters=50_000)
    t2 = time.time()
    sub200 = svm_oracle_objective(X, y, c, n_iters=200_000)
    t3 = time.time()
    model = train_linear_svm(X, y, c, seed=7)
    cd = svm_objective(model.weights, model.bias, X, y, c)
    print(f"n={n:2d} d={d} c={c:g}: qp={qp:.6f} sub50k={sub50:.6f} "
          f"(rel {abs(sub50-qp)/qp:.2e}, {t2-t1:.2f}s) "
          f"sub200k={sub200:.6f} (rel {abs(sub200-qp)/qp:.2e}, {t3-t2:.2f}s) "
          f"cd={cd:.6f} (rel vs sub200k {abs(cd-sub200)/sub200:.2e})")

print()
print("=== pitch on criterion tones ===")
from speechrisk.features.pitch import pitch_track

sr = 16000
for f in (100.0, 220.0, 330.0, 440.0):
    t = np.arange(int(1.0 * sr)) / sr
    x = 0.8 * np.sin(2 * np.pi * f * t)
    tr = pitch_track(x, sr)
    voiced = tr.f0_hz[tr.voiced]
    print(f"{f:6.1f} Hz: voiced {tr.voiced.mean():.2%}, "
          f"f0 range [{voiced.min():.3f}, {voiced.max():.3f}], "
          f"max abs err {np.max(np.abs(voiced - f)):.4f}")

print()
print("=== mel band margin + agreement for candidate tones ===")
from speechrisk.features.spectral import MelSpecConfig, mel_spectrogram

cfg = MelSpecConfig()
fmax = sr / 2.0
for f in (250.0, 500.0, 750.0, 1000.0, 1500.0, 2000.0, 3000.0, 4000.0, 6000.0):
    band, margin = mel_oracle_band(f, cfg.n_mels, cfg.fmin_hz, fmax, sr)
    t = np.arange(int(0.5 * sr)) / sr
    x = 0.8 * np.sin(2 * np.pi * f * t)
    spec = mel_spectrogram(x, sr, cfg)
    got = np.argmax(spec, axis=1)
    agree = np.all(got == band)
    print(f"{f:6.1f} Hz: oracle band {band:3d} margin {margin:.3f} "
          f"spectrogram bands {sorted(set(got.tolist()))} all-agree={agree}")

print()
print("=== balanced accuracy oracle spot check ===")
from speechrisk.learner import balanced_accuracy

rng = np.random.default_rng(0)
ok = True
for _ in range(200):
    n = int(rng.integers(2, 40))
    yt = rng.integers(0, 2, n)
    if len(set(yt.tolist())) < 2:
        continue
    yp = rng.integers(0, 2, n)
    a = balanced_accuracy(yt, yp)
    b = balanced_accuracy_oracle(yt, yp)
    if a != b:
        ok = False
        print("MISMATCH", yt, yp, a, b)
print("all equal:", ok)
