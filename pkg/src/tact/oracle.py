"""Reference implementations the timing path is checked against.

Both are deliberately written in a different shape from the code they
check: the feedforward pass is plain per-neuron loops over values, and the
firing-time reference samples the rail potential on a uniform time grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .network import Activation, LayeredModel, forward
from .timing import DomainError, FiringResult, NO_FIRE, RailSpec

__all__ = [
    "oracle_forward",
    "GridSimConfig",
    "grid_fire",
    "ComparisonReport",
    "compare",
    "relative_error",
]


def oracle_forward(model: LayeredModel, x: Sequence[float]):
    """Conventional dense forward pass.

    Returns ``(final_preactivations, per_layer_activations)`` where the second
    item lists each layer's output after its activation.
    """
    values = [float(v) for v in x]
    if len(values) != model.layers[0].fan_in:
        raise DomainError(f"input width {len(values)} != model fan-in")
    activations = []
    pre = []
    for layer in model.layers:
        if len(values) != layer.fan_in:
            raise DomainError("dimension mismatch")
        pre = []
        for k in range(layer.fan_out):
            terms = [layer.weights[j, k] * values[j] for j in range(layer.fan_in)]
            pre.append(math.fsum(terms) + float(layer.biases[k]))
        if layer.activation is Activation.RELU:
            values = [max(0.0, v) for v in pre]
        else:
            values = list(pre)
        activations.append(np.array(values))
    return np.array(pre), activations


@dataclass(frozen=True)
class GridSimConfig:
    step: float
    horizon: float
    start: float = 0.0

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if not self.horizon > self.start:
            raise ValueError("horizon must lie after start")


def grid_fire(rail: RailSpec, cfg: GridSimConfig) -> FiringResult:
    """First grid time at which the sampled potential reaches the threshold."""
    n = int(math.floor((cfg.horizon - cfg.start) / cfg.step)) + 1
    grid = cfg.start + np.arange(n) * cfg.step
    v = np.zeros(n)
    for t_i, k_i in zip(rail.times, rail.slopes):
        v += k_i * np.clip(grid - t_i, 0.0, None)
    above = np.flatnonzero(v >= rail.theta)
    if not above.size or not rail.times.size:
        return NO_FIRE
    return FiringResult(True, float(grid[above[0]]))


def relative_error(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-12)
    return np.abs(a - b) / denom


@dataclass
class ComparisonReport:
    max_abs_err: list[float] = field(default_factory=list)
    max_rel_err: list[float] = field(default_factory=list)
    argmax_match: list[bool] = field(default_factory=list)

    @property
    def n_inputs(self) -> int:
        return len(self.argmax_match)

    @property
    def overall_max_abs(self) -> float:
        return max(self.max_abs_err, default=0.0)

    @property
    def overall_max_rel(self) -> float:
        return max(self.max_rel_err, default=0.0)

    @property
    def agreement(self) -> int:
        return sum(self.argmax_match)

    def summary(self) -> str:
        return (f"max_abs_err={self.overall_max_abs:.3e} "
                f"max_rel_err={self.overall_max_rel:.3e} "
                f"argmax_match={self.agreement}/{self.n_inputs}")

    def to_dict(self) -> dict:
        return {
            "n_inputs": self.n_inputs,
            "max_abs_err": self.overall_max_abs,
            "max_rel_err": self.overall_max_rel,
            "argmax_match": self.agreement,
            "per_input": [
                {"max_abs_err": a, "max_rel_err": r, "argmax_match": m}
                for a, r, m in zip(self.max_abs_err, self.max_rel_err, self.argmax_match)
            ],
        }


def compare(model: LayeredModel, inputs, **forward_kwargs) -> ComparisonReport:
    """Run every input through both paths and collect the discrepancies."""
    report = ComparisonReport()
    for x in inputs:
        timed = forward(model, x, **forward_kwargs)
        ref, _ = oracle_forward(model, x)
        report.max_abs_err.append(float(np.max(np.abs(timed - ref))))
        report.max_rel_err.append(float(np.max(relative_error(timed, ref))))
        report.argmax_match.append(bool(np.argmax(timed) == np.argmax(ref)))
    return report
