"""Filtration values on the graph of a time series for four sweep families.

A sweep is a continuous bijection F from an interval onto [0, 1]. Rescaled
to the (padded) value range of the series and shifted in time, its graph
sweeps out the strip containing the series, and the filtration value of a
graph point (t, x) is the unique shift at which the sweep curve passes
through the point. Inverting the sweep gives closed forms, with
u = (x - low) / (high - low) over the padded range (low, high):

    horizontal   f = x
    sloped       f = t - (u - 1/2) / c
    sigmoid      f = t + log((high - x) / (x - low)) / (4 c)
    arctan       f = t - tan(pi (u - 1/2)) / (c pi)

All three parametric sweeps have derivative c at the origin, so c controls
their slope consistently. The sigmoid and arctan filtrations diverge as x
approaches the range boundary, which is why the range must be padded by a
positive fraction of its width for those kinds.

On a straight segment between consecutive samples the sloped filtration is
affine in t, but the sigmoid and arctan filtrations may have up to two
interior stationary points. ``augment`` inserts those points as extra
vertices so that the filtration is monotone between consecutive vertices,
which is the form the persistence sweep requires.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateRangeError, NonFiniteResultError
from .timeseries import TimeSeries

# Roots this close (in u) to a segment endpoint are not inserted; the
# endpoint vertex already carries that filtration value.
_ENDPOINT_TOL = 1e-12


class FiltrationKind(str, enum.Enum):
    HORIZONTAL = "horizontal"
    SLOPED = "sloped"
    SIGMOID = "sigmoid"
    ARCTAN = "arctan"


CURVED_KINDS = frozenset({FiltrationKind.SIGMOID, FiltrationKind.ARCTAN})


@dataclass(frozen=True)
class FiltrationSpec:
    """Which sweep to use, its slope parameter, and the range padding fraction."""

    kind: FiltrationKind
    slope_c: float = 1.0
    padding_eps: float = 0.05

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", FiltrationKind(self.kind))
        if self.kind is not FiltrationKind.HORIZONTAL and self.slope_c == 0:
            raise ValueError("slope_c must be nonzero for non-horizontal filtrations")
        if self.padding_eps < 0:
            raise ValueError(f"padding_eps must be >= 0, got {self.padding_eps}")
        if self.kind in CURVED_KINDS and self.padding_eps <= 0:
            raise ValueError(f"{self.kind.value} filtration requires padding_eps > 0")


@dataclass(frozen=True, eq=False)
class AugmentedSeries:
    """Series vertices annotated with filtration values, monotone per segment.

    ``inserted`` marks vertices added at interior stationary points of the
    filtration; original samples appear unchanged and in order.
    """

    t: np.ndarray
    value: np.ndarray
    filtration: np.ndarray
    inserted: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        value = np.asarray(self.value, dtype=float)
        filtration = np.asarray(self.filtration, dtype=float)
        inserted = np.asarray(self.inserted, dtype=bool)
        if not (t.shape == value.shape == filtration.shape == inserted.shape):
            raise ValueError("all vertex arrays must have the same shape")
        if t.size > 1 and not (np.diff(t) > 0).all():
            raise ValueError("vertex times must be strictly increasing")
        for arr in (t, value, filtration, inserted):
            arr.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "filtration", filtration)
        object.__setattr__(self, "inserted", inserted)

    def __len__(self) -> int:
        return int(self.t.size)


def padded_range(ts: TimeSeries | np.ndarray, eps: float) -> tuple[float, float]:
    """Value range widened by ``eps`` times its width on both sides."""
    values = ts.x if isinstance(ts, TimeSeries) else np.asarray(ts, dtype=float)
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    lo = float(values.min())
    hi = float(values.max())
    width = hi - lo
    if width <= 0:
        raise DegenerateRangeError(f"degenerate value range [{lo}, {hi}]")
    return lo - eps * width, hi + eps * width


def sweep_function(kind: FiltrationKind | str, slope_c: float) -> Callable[[float], float]:
    """The forward sweep F: J -> [0, 1] for a non-horizontal kind.

    Exposed for verification: substituting a filtration value back through
    the rescaled sweep must reproduce the original sample value.
    """
    kind = FiltrationKind(kind)
    if kind is FiltrationKind.SLOPED:
        return lambda t: slope_c * t + 0.5
    if kind is FiltrationKind.SIGMOID:
        return lambda t: 1.0 / (1.0 + math.exp(-4.0 * slope_c * t))
    if kind is FiltrationKind.ARCTAN:
        return lambda t: math.atan(slope_c * math.pi * t) / math.pi + 0.5
    raise ValueError("the horizontal filtration has no associated sweep function")


def filtration_values(
    spec: FiltrationSpec,
    value_range: tuple[float, float],
    t: np.ndarray,
    x: np.ndarray,
) -> np.ndarray:
    """Vectorized filtration values; no finiteness check (see filtration_value)."""
    lo, hi = value_range
    width = hi - lo
    if width <= 0:
        raise DegenerateRangeError(f"degenerate range [{lo}, {hi}]")
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    c = spec.slope_c
    if spec.kind is FiltrationKind.HORIZONTAL:
        return x.copy()
    u = (x - lo) / width
    if spec.kind is FiltrationKind.SLOPED:
        return t - (u - 0.5) / c
    with np.errstate(divide="ignore", invalid="ignore"):
        if spec.kind is FiltrationKind.SIGMOID:
            return t + np.log((hi - x) / (x - lo)) / (4.0 * c)
        return t - np.tan(np.pi * (u - 0.5)) / (c * np.pi)


def filtration_value(
    spec: FiltrationSpec,
    value_range: tuple[float, float],
    point: tuple[float, float],
) -> float:
    """Filtration value of one graph point (t, x) under the given sweep."""
    t0, x0 = point
    result = float(filtration_values(spec, value_range, np.array([t0]), np.array([x0]))[0])
    if not math.isfinite(result):
        raise NonFiniteResultError(
            f"non-finite {spec.kind.value} filtration value at (t={t0}, x={x0}) "
            f"over range {value_range}; pad the range"
        )
    return result


def interior_critical_points(
    spec: FiltrationSpec,
    value_range: tuple[float, float],
    segment: tuple[tuple[float, float], tuple[float, float]],
) -> list[tuple[float, float, float]]:
    """Strict interior points of a straight segment where the filtration is stationary.

    With u(t) affine along the segment and beta its slope in u per unit t,
    the stationarity condition d/dt [t - F^{-1}(u(t))] = 0 reduces to
    u (1 - u) = beta / (4 c) for the sigmoid sweep and
    tan^2(pi (u - 1/2)) = c / beta - 1 for the arctan sweep. The horizontal
    and sloped filtrations are affine in t on segments and never yield any.
    Returns up to two (t, x, filtration) triples, sorted by t.
    """
    (t_a, x_a), (t_b, x_b) = segment
    if not t_a < t_b:
        raise ValueError(f"segment must have t_a < t_b, got {t_a} >= {t_b}")
    if spec.kind not in CURVED_KINDS:
        return []
    lo, hi = value_range
    width = hi - lo
    if width <= 0:
        raise DegenerateRangeError(f"degenerate range [{lo}, {hi}]")

    slope = (x_b - x_a) / (t_b - t_a)
    beta = slope / width
    if beta == 0.0:
        return []
    c = spec.slope_c

    roots: list[float] = []
    if spec.kind is FiltrationKind.SIGMOID:
        ratio = beta / c
        if 0.0 < ratio <= 1.0:
            half_gap = math.sqrt(1.0 - ratio) / 2.0
            roots = [0.5 - half_gap, 0.5 + half_gap]
    else:
        ratio = c / beta
        if ratio >= 1.0:
            offset = math.atan(math.sqrt(ratio - 1.0)) / math.pi
            roots = [0.5 - offset, 0.5 + offset]

    u_a = (x_a - lo) / width
    u_b = (x_b - lo) / width
    u_lo, u_hi = min(u_a, u_b), max(u_a, u_b)

    points: list[tuple[float, float, float]] = []
    last_u: float | None = None
    for u in sorted(roots):
        if not (u_lo + _ENDPOINT_TOL < u < u_hi - _ENDPOINT_TOL):
            continue
        if last_u is not None and abs(u - last_u) <= _ENDPOINT_TOL:
            continue  # double root: one stationary point
        last_u = u
        t = t_a + (u - u_a) / beta
        x = lo + u * width
        points.append((t, x, filtration_value(spec, value_range, (t, x))))
    points.sort(key=lambda p: p[0])
    return points


def augment(
    ts: TimeSeries,
    spec: FiltrationSpec,
    vertex_only: bool = False,
) -> AugmentedSeries:
    """Annotate a series with filtration values, inserting interior critical points.

    ``vertex_only`` skips the insertion and evaluates the filtration at the
    original vertices only; the per-segment monotonicity guarantee is then
    lost for curved kinds. It exists for comparison and as a mutation hook
    for the golden checks.
    """
    if len(ts) < 2:
        raise ValueError("augment needs a series of length >= 2")
    value_range = padded_range(ts, spec.padding_eps)
    base = filtration_values(spec, value_range, ts.t, ts.x)
    if not np.isfinite(base).all():
        raise NonFiniteResultError(
            f"non-finite {spec.kind.value} filtration values; increase padding_eps"
        )

    if vertex_only or spec.kind not in CURVED_KINDS:
        return AugmentedSeries(ts.t, ts.x, base, np.zeros(len(ts), dtype=bool))

    t_out: list[float] = []
    x_out: list[float] = []
    f_out: list[float] = []
    ins_out: list[bool] = []
    n = len(ts)
    for i in range(n - 1):
        t_out.append(float(ts.t[i]))
        x_out.append(float(ts.x[i]))
        f_out.append(float(base[i]))
        ins_out.append(False)
        segment = ((float(ts.t[i]), float(ts.x[i])), (float(ts.t[i + 1]), float(ts.x[i + 1])))
        for t, x, f in interior_critical_points(spec, value_range, segment):
            t_out.append(t)
            x_out.append(x)
            f_out.append(f)
            ins_out.append(True)
    t_out.append(float(ts.t[-1]))
    x_out.append(float(ts.x[-1]))
    f_out.append(float(base[-1]))
    ins_out.append(False)
    return AugmentedSeries(
        np.array(t_out), np.array(x_out), np.array(f_out), np.array(ins_out, dtype=bool)
    )
