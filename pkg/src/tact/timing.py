"""Value/timing encoding and the exact firing-time solver for one rail.

A rail is an integrate-and-fire accumulator fed by same-signed inputs. Each
input spike at time ``t_i`` starts a linear ramp of slope ``k_i``; the rail
fires at the first time the summed ramps reach the threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "DomainError",
    "EncodingConfig",
    "SpikeEvent",
    "RailSpec",
    "FiringResult",
    "NO_FIRE",
    "encode",
    "decode_time",
    "choose_threshold",
    "solve_firing_time",
    "decode_same_sign_sum",
]


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


@dataclass(frozen=True)
class EncodingConfig:
    """Timing parameters shared by every rail of a computation.

    Attributes:
        t_in: width of the input window.
        lam: slope scale, mapping a weight ``a`` to a ramp slope ``lam * a``.
        epsilon: width of the gap between the input and output windows,
            as a fraction of ``t_in``.
    """

    t_in: float = 1.0
    lam: float = 1.0
    epsilon: float = 0.1

    def __post_init__(self):
        if not (math.isfinite(self.t_in) and self.t_in > 0):
            raise ValueError(f"t_in must be positive, got {self.t_in}")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")

    @property
    def layer_advance(self) -> float:
        """Offset between an input window start and its output window start."""
        return (1.0 + self.epsilon) * self.t_in


class SpikeEvent(NamedTuple):
    time: float
    slope: float


@dataclass(frozen=True)
class RailSpec:
    """Input events of one rail plus its firing threshold.

    Events are held as two parallel float arrays. An empty rail never fires
    and may carry a zero threshold; any rail with events needs ``theta > 0``.
    """

    times: np.ndarray
    slopes: np.ndarray
    theta: float
    window_start: float = 0.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        slopes = np.asarray(self.slopes, dtype=float).reshape(-1)
        if times.shape != slopes.shape:
            raise ValueError("times and slopes must have equal length")
        if not np.all(np.isfinite(times)):
            raise ValueError("event times must be finite")
        if not np.all(np.isfinite(slopes)) or np.any(slopes < 0):
            raise ValueError("slopes must be finite and nonnegative")
        if times.size and not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if not times.size and not self.theta >= 0:
            raise ValueError(f"theta must be nonnegative, got {self.theta}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "slopes", slopes)

    @classmethod
    def from_events(cls, events: Iterable[SpikeEvent], theta: float,
                    window_start: float = 0.0) -> "RailSpec":
        events = list(events)
        times = [e.time for e in events]
        slopes = [e.slope for e in events]
        return cls(np.array(times, dtype=float), np.array(slopes, dtype=float),
                   theta, window_start)

    @property
    def events(self) -> list[SpikeEvent]:
        return [SpikeEvent(float(t), float(k)) for t, k in zip(self.times, self.slopes)]

    @property
    def total_slope(self) -> float:
        return math.fsum(self.slopes)

    def in_window(self, t_in: float, tol: float = 1e-9) -> bool:
        """True if every event lies in ``[window_start, window_start + t_in]``."""
        if not self.times.size:
            return True
        slack = tol * max(t_in, abs(self.window_start))
        return bool(self.times.min() >= self.window_start - slack
                    and self.times.max() <= self.window_start + t_in + slack)


class FiringResult(NamedTuple):
    fired: bool
    t_nu: float = math.nan


NO_FIRE = FiringResult(False, math.nan)


def _check_unit(x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"input value {x!r} outside [0, 1]")


def encode(x: float, cfg: EncodingConfig, window_start: float = 0.0) -> float:
    """Spike time for value ``x``: 1 fires at the window start, 0 at its end."""
    _check_unit(x)
    return window_start + cfg.t_in * (1.0 - x)


def decode_time(t: float, cfg: EncodingConfig, window_start: float = 0.0) -> float:
    offset = t - window_start
    # absorb the rounding of window_start + t_in at the window edges
    slack = 1e-12 * max(cfg.t_in, abs(window_start), abs(t))
    if not -slack <= offset <= cfg.t_in + slack:
        raise DomainError(f"time {t!r} outside window starting at {window_start!r}")
    return min(1.0, max(0.0, 1.0 - offset / cfg.t_in))


def choose_threshold(beta: float, cfg: EncodingConfig) -> float:
    """Threshold ``(1 + epsilon) * lam * beta * t_in`` for a rail of total weight ``beta``.

    The factor ``1 + epsilon`` keeps the earliest possible firing time after
    the last input of the window.
    """
    if beta < 0:
        raise DomainError(f"beta must be nonnegative, got {beta}")
    return (1.0 + cfg.epsilon) * cfg.lam * beta * cfg.t_in


def solve_firing_time(rail: RailSpec) -> FiringResult:
    """Solve for the first time the rail potential reaches its threshold.

    The potential ``V(t) = sum_{t_i <= t} k_i (t - t_i)`` is piecewise linear
    with breakpoints at the event times, so the sweep walks the sorted events
    and solves the crossing in closed form on the first segment that reaches
    the threshold. Rails that can never reach it return ``NO_FIRE``.
    """
    keep = rail.slopes > 0
    if not np.any(keep):
        return NO_FIRE
    times, inverse = np.unique(rail.times[keep], return_inverse=True)
    slopes = np.bincount(inverse, weights=rail.slopes[keep])

    cum_slope = np.cumsum(slopes)
    cum_moment = np.cumsum(slopes * times)
    # potential at each next event time, counting only events already arrived
    v_next = cum_slope[:-1] * times[1:] - cum_moment[:-1]
    hits = np.flatnonzero(v_next >= rail.theta)
    last = int(hits[0]) if hits.size else times.size - 1

    # closed form relative to the earliest event keeps the products small
    origin = float(times[0])
    arrived_slope = math.fsum(slopes[: last + 1])
    moment = math.fsum(slopes[: last + 1] * (times[: last + 1] - origin))
    t_nu = origin + (rail.theta + moment) / arrived_slope
    return FiringResult(True, max(t_nu, float(times[last])))


def decode_same_sign_sum(result: FiringResult, beta: float, cfg: EncodingConfig,
                         window_start: float = 0.0) -> float:
    if not result.fired:
        raise DomainError("cannot decode a rail that did not fire")
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    return beta * (2.0 + cfg.epsilon - (result.t_nu - window_start) / cfg.t_in)
