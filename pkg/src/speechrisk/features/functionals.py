"""Statistical functionals that collapse a descriptor contour to scalars.

Every functional maps an empty contour to 0.0 so the feature vector stays
finite when a segment has no voiced frames; the matching presence
indicator (voiced fraction) is appended by the vector builder.
"""

from __future__ import annotations

import numpy as np

COMPACT_FUNCTIONALS = (
    "mean",
    "cov",
    "p20",
    "p50",
    "p80",
    "range_p20_p80",
    "mean_rising_slope",
    "mean_falling_slope",
)

EXTENDED_FUNCTIONALS = COMPACT_FUNCTIONALS + (
    "min",
    "max",
    "skewness",
    "kurtosis",
    "linreg_slope",
    "linreg_offset",
    "quadreg_a",
    "quadreg_b",
    "quadreg_c",
    "upcross25_rate",
    "upcross50_rate",
    "upcross75_rate",
)

_MOMENT_EPS = 1e-12


def contour_delta(x: np.ndarray) -> np.ndarray:
    """First difference with a leading 0 so length is preserved."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    if len(x) > 1:
        out[1:] = np.diff(x)
    return out


def _slopes(x: np.ndarray, hop_s: float) -> tuple[float, float]:
    if len(x) < 2:
        return 0.0, 0.0
    d = np.diff(x) / hop_s
    rising = d[d > 0]
    falling = d[d < 0]
    return (
        float(rising.mean()) if len(rising) else 0.0,
        float(-falling.mean()) if len(falling) else 0.0,
    )


def _linreg(x: np.ndarray, t: np.ndarray) -> tuple[float, float]:
    if len(x) < 2:
        return 0.0, float(x[0]) if len(x) else 0.0
    t_c = t - t.mean()
    denom = float(np.dot(t_c, t_c))
    if denom <= 0.0:
        return 0.0, float(x.mean())
    slope = float(np.dot(t_c, x - x.mean()) / denom)
    return slope, float(x.mean() - slope * t.mean())


def _quadreg(x: np.ndarray, t: np.ndarray) -> tuple[float, float, float]:
    if len(x) < 3:
        slope, offset = _linreg(x, t)
        return 0.0, slope, offset
    a, b, c = np.polyfit(t, x, 2)
    return float(a), float(b), float(c)


def _upcross_rate(x: np.ndarray, level: float, duration_s: float) -> float:
    if len(x) < 2 or duration_s <= 0.0:
        return 0.0
    below = x[:-1] <= level
    above = x[1:] > level
    return float(np.count_nonzero(below & above) / duration_s)


def apply_functionals(contour: np.ndarray, hop_s: float,
                      names: tuple[str, ...] = COMPACT_FUNCTIONALS) -> np.ndarray:
    """Evaluate the named functionals on one contour.

    hop_s sets the time base for slopes, regressions and crossing rates.
    """
    x = np.asarray(contour, dtype=np.float64)
    if len(x) == 0:
        return np.zeros(len(names))

    mean = float(x.mean())
    std = float(x.std())  # population
    p20, p25, p50, p75, p80 = (float(np.percentile(x, q)) for q in (20, 25, 50, 75, 80))
    rising, falling = _slopes(x, hop_s)

    values = {
        "mean": mean,
        "cov": std / abs(mean) if abs(mean) > _MOMENT_EPS else 0.0,
        "p20": p20,
        "p50": p50,
        "p80": p80,
        "range_p20_p80": p80 - p20,
        "mean_rising_slope": rising,
        "mean_falling_slope": falling,
    }
    extra = set(names) - set(COMPACT_FUNCTIONALS)
    if extra:
        t = np.arange(len(x), dtype=np.float64) * hop_s
        m2 = float(np.mean((x - mean) ** 2))
        if m2 > _MOMENT_EPS:
            m3 = float(np.mean((x - mean) ** 3))
            m4 = float(np.mean((x - mean) ** 4))
            skew = m3 / m2**1.5
            kurt = m4 / m2**2 - 3.0
        else:
            skew = kurt = 0.0
        lin_slope, lin_offset = _linreg(x, t)
        qa, qb, qc = _quadreg(x, t)
        duration = len(x) * hop_s
        values.update({
            "min": float(x.min()),
            "max": float(x.max()),
            "skewness": skew,
            "kurtosis": kurt,
            "linreg_slope": lin_slope,
            "linreg_offset": lin_offset,
            "quadreg_a": qa,
            "quadreg_b": qb,
            "quadreg_c": qc,
            "upcross25_rate": _upcross_rate(x, p25, duration),
            "upcross50_rate": _upcross_rate(x, p50, duration),
            "upcross75_rate": _upcross_rate(x, p75, duration),
        })
    return np.asarray([values[name] for name in names])
