"""Randomized hyperparameter sampling and deterministic seed derivation.

The slope is sampled uniformly with respect to angle over
[-4, -0.5] u [0.5, 4] (sign uniform, magnitude tan of a uniform angle,
clamped so float rounding can never produce |c| < 0.5). Bandwidth, C and
gamma are sampled log-uniformly, kernels uniformly. Classifier grids for
the baseline models are configuration, not re-derived.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> int:
    """One splitmix64 step; the documented seed derivation primitive."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(master: int, *parts) -> int:
    """Seed for (fold, model, ...) derived from the master seed via splitmix64."""
    state = splitmix64(master & _MASK)
    for part in parts:
        if isinstance(part, str):
            digest = hashlib.sha256(part.encode("utf-8")).digest()
            part = int.from_bytes(digest[:8], "little")
        state = splitmix64((state ^ (int(part) & _MASK)) & _MASK)
    return state


@dataclass(frozen=True)
class SearchSpace:
    """Randomized-search domains; defaults follow the published tuning table."""

    slope_magnitude: tuple[float, float] = (0.5, 4.0)
    bandwidth_sigma: tuple[float, float] = (1e-3, 1e-1)
    kernels: tuple[str, ...] = ("linear", "rbf")
    c_linear: tuple[float, float] = (1e-2, 1e1)
    c_rbf: tuple[float, float] = (1e-1, 1e2)
    gamma_rbf: tuple[float, float] = (1e-4, 1e-2)
    # the filtration family competes inside the search here; restrict to a
    # single kind to reproduce one fixed-filtration model variant
    filtration_kinds: tuple[str, ...] = ("horizontal", "sloped", "sigmoid", "arctan")
    # baseline random forest grids are configuration (original implementations)
    rf_n_estimators: tuple[int, int] = (100, 500)
    rf_max_depth: tuple[int, int] = (2, 16)
    iterations: int = 200

    def with_kinds(self, kinds) -> "SearchSpace":
        return replace(self, filtration_kinds=tuple(kinds))


def _log_uniform(rng: np.random.Generator, low: float, high: float) -> float:
    return float(math.exp(rng.uniform(math.log(low), math.log(high))))


def sample_slope(space: SearchSpace, rng: np.random.Generator) -> float:
    low, high = space.slope_magnitude
    angle = rng.uniform(math.atan(low), math.atan(high))
    magnitude = min(max(math.tan(angle), low), high)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    return sign * magnitude


def sample_hyperparameters(space: SearchSpace, rng: np.random.Generator) -> dict:
    """One randomized-search draw: filtration, image and classifier parameters."""
    kind = str(rng.choice(list(space.filtration_kinds)))
    params = {
        "kind": kind,
        "slope_c": sample_slope(space, rng) if kind != "horizontal" else 1.0,
        "bandwidth_sigma": _log_uniform(rng, *space.bandwidth_sigma),
        "kernel": str(rng.choice(list(space.kernels))),
        "rf_n_estimators": int(round(_log_uniform(rng, *space.rf_n_estimators))),
        "rf_max_depth": int(rng.integers(space.rf_max_depth[0], space.rf_max_depth[1] + 1)),
    }
    if params["kernel"] == "linear":
        params["svm_c"] = _log_uniform(rng, *space.c_linear)
        params["svm_gamma"] = None
    else:
        params["svm_c"] = _log_uniform(rng, *space.c_rbf)
        params["svm_gamma"] = _log_uniform(rng, *space.gamma_rbf)
    return params
