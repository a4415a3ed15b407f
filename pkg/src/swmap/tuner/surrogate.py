"""Self-validating quadratic regression surrogate and the density-ratio suggester."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .space import SearchSpaceDef, SpaceExhausted

MIN_SAMPLES = 20
CV_FOLDS = 5
R2_THRESHOLD = 0.85
TOP_FRACTION = 0.2


def encode(space: SearchSpaceDef, indices: np.ndarray) -> np.ndarray:
    """Ordinal ranks scaled to [0, 1] per parameter."""
    scale = np.array([max(n - 1, 1) for n in space.lengths], dtype=float)
    return np.asarray(indices, dtype=float) / scale


def design(x: np.ndarray) -> np.ndarray:
    """Intercept, linear, squared and pairwise interaction columns."""
    n, d = x.shape
    cols = [np.ones(n)]
    cols.extend(x[:, j] for j in range(d))
    cols.extend(x[:, j] ** 2 for j in range(d))
    cols.extend(x[:, i] * x[:, j] for i in range(d) for j in range(i + 1, d))
    return np.column_stack(cols)


def fit_targets(values: Sequence[float]) -> np.ndarray | None:
    """Replace failed (infinite) objectives by a finite penalty above the worst finite one."""
    y = np.asarray(values, dtype=float)
    finite = np.isfinite(y)
    if not finite.any():
        return None
    lo, hi = y[finite].min(), y[finite].max()
    y = y.copy()
    y[~finite] = hi + max(hi - lo, 1.0)
    return y


@dataclass
class Surrogate:
    space: SearchSpaceDef
    coef: np.ndarray
    r2: float

    def predict(self, indices) -> np.ndarray:
        ix = np.atleast_2d(np.asarray(indices, dtype=float))
        return design(encode(self.space, ix)) @ self.coef


def cross_validated_r2(X: np.ndarray, y: np.ndarray, folds: int = CV_FOLDS) -> float:
    n = len(y)
    pred = np.empty(n)
    fold = np.arange(n) % folds
    for f in range(folds):
        test = fold == f
        if not test.any():
            continue
        coef, *_ = np.linalg.lstsq(X[~test], y[~test], rcond=None)
        pred[test] = X[test] @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot <= 0:
        return -math.inf
    return 1.0 - float(np.sum((y - pred) ** 2)) / ss_tot


def fit_and_validate(measured: Mapping[tuple[int, ...], float], space: SearchSpaceDef,
                     threshold: float = R2_THRESHOLD, min_samples: int = MIN_SAMPLES) -> Surrogate | None:
    """Fit the surrogate; ``None`` means "not validated".

    Samples are ordered by their flat index before being dealt into folds,
    so the result does not depend on measurement order.
    """
    if len(measured) < min_samples:
        return None
    keys = sorted(measured, key=space.flat)
    y = fit_targets([measured[k] for k in keys])
    if y is None:
        return None
    X = design(encode(space, np.array(keys)))
    if not np.all(np.isfinite(X)):
        return None
    r2 = cross_validated_r2(X, y)
    if not (r2 >= threshold):
        return None
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return Surrogate(space, coef, r2)


def _grid(space: SearchSpaceDef) -> np.ndarray:
    cache = getattr(space, "_grid_cache", None)
    if cache is None:
        cache = np.array(list(space.all_indices()), dtype=np.int64).reshape(space.size, space.dim)
        space._grid_cache = cache
    return cache


def density_log_ratio(space: SearchSpaceDef, measured: Mapping[tuple[int, ...], float],
                      candidates: np.ndarray) -> np.ndarray:
    """log of prod_d good_d(v) / bad_d(v) for each candidate row.

    Measured configurations are split at the median objective: the better
    half (ties by flat index) is "good". Per-parameter categorical densities
    use add-one smoothing.
    """
    keys = sorted(measured, key=lambda k: (measured[k], space.flat(k)))
    n_good = max(1, len(keys) // 2)
    good, bad = keys[:n_good], keys[n_good:]
    out = np.zeros(len(candidates))
    for d, n in enumerate(space.lengths):
        g = np.ones(n)
        b = np.ones(n)
        for k in good:
            g[k[d]] += 1
        for k in bad:
            b[k[d]] += 1
        g /= len(good) + n
        b /= len(bad) + n
        out += np.log(g[candidates[:, d]]) - np.log(b[candidates[:, d]])
    return out


def suggest(space: SearchSpaceDef, measured: Mapping[tuple[int, ...], float], surrogate: Surrogate | None,
            variant: str = "combined", top_fraction: float = TOP_FRACTION) -> tuple[int, ...]:
    """Index tuple of the next configuration to measure.

    ``regression`` takes the lowest prediction, ``bayesian`` the highest
    density ratio, ``combined`` the highest density ratio among the
    ``top_fraction`` best-predicted unmeasured configurations. Ties fall to
    the lower prediction, then the lower flat index.
    """
    grid = _grid(space)
    mask = np.ones(space.size, dtype=bool)
    for k in measured:
        mask[space.flat(k)] = False
    free = np.flatnonzero(mask)
    if free.size == 0:
        raise SpaceExhausted
    cand = grid[free]
    if variant == "bayesian" or surrogate is None:
        pred = np.zeros(len(free))
    else:
        pred = surrogate.predict(cand)
    if variant == "regression" and surrogate is not None:
        order = np.lexsort((free, pred))
        return tuple(int(v) for v in cand[order[0]])
    if variant == "combined" and surrogate is not None:
        keep = max(1, math.ceil(top_fraction * len(free)))
        order = np.lexsort((free, pred))[:keep]
        free, cand, pred = free[order], cand[order], pred[order]
    score = density_log_ratio(space, measured, cand)
    order = np.lexsort((free, pred, -score))
    return tuple(int(v) for v in cand[order[0]])
