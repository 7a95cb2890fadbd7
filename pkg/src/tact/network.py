"""Multi-layer inference carried out on timing pairs.

Each layer hands its raw ``(t_plus, t_minus)`` pairs to the next one; signed
values are only materialised when the final layer is decoded. A neuron's
value is ``gain * (t_minus - t_plus) / t_in`` where ``gain`` is the total
magnitude of its rails. To keep that exact across layers, the synapse from
upstream neuron ``j`` into neuron ``k`` carries the slope ``|w_jk| * gain_j``,
so the upstream gain is folded into the downstream conductance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .dualrail import TimingPair, build_dual_input_neuron, fire_dual
from .timing import DomainError, EncodingConfig, encode

__all__ = [
    "Activation",
    "DenseLayer",
    "LayeredModel",
    "TimingState",
    "PoolSpec",
    "encode_layer0",
    "propagate",
    "decode_output",
    "max_pool",
    "forward",
    "forward_states",
]


class Activation(enum.Enum):
    RELU = "relu"
    NONE = "none"


@dataclass
class DenseLayer:
    weights: np.ndarray  # (fan_in, fan_out)
    biases: np.ndarray
    activation: Activation = Activation.RELU

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.biases = np.asarray(self.biases, dtype=float).reshape(-1)
        self.activation = Activation(self.activation)
        if self.weights.ndim != 2:
            raise DomainError(f"weights must be 2-D, got shape {self.weights.shape}")
        if self.biases.size != self.weights.shape[1]:
            raise DomainError(
                f"{self.biases.size} biases for fan-out {self.weights.shape[1]}")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.biases))):
            raise DomainError("weights and biases must be finite")

    @property
    def fan_in(self) -> int:
        return self.weights.shape[0]

    @property
    def fan_out(self) -> int:
        return self.weights.shape[1]


@dataclass
class LayeredModel:
    layers: list[DenseLayer]
    cfg: EncodingConfig = field(default_factory=EncodingConfig)

    def __post_init__(self):
        if not self.layers:
            raise DomainError("model needs at least one layer")
        for i, (a, b) in enumerate(zip(self.layers, self.layers[1:])):
            if a.fan_out != b.fan_in:
                raise DomainError(
                    f"layer {i} fan-out {a.fan_out} != layer {i + 1} fan-in {b.fan_in}")
        if self.layers[-1].activation is not Activation.NONE:
            raise DomainError("final layer must have activation 'none'")

    @property
    def widths(self) -> list[int]:
        return [self.layers[0].fan_in] + [layer.fan_out for layer in self.layers]


@dataclass
class TimingState:
    """Timing pairs of one layer's neurons plus their decode gains."""

    t_plus: np.ndarray
    t_minus: np.ndarray
    gains: np.ndarray
    window_start: float

    @property
    def pairs(self) -> list[TimingPair]:
        return [TimingPair(float(p), float(m)) for p, m in zip(self.t_plus, self.t_minus)]

    def __len__(self):
        return self.t_plus.size


@dataclass(frozen=True)
class PoolSpec:
    group_size: int

    def __post_init__(self):
        if self.group_size < 1:
            raise DomainError(f"group_size must be positive, got {self.group_size}")


def encode_layer0(x: Sequence[float], cfg: EncodingConfig) -> TimingState:
    x = np.asarray(x, dtype=float).reshape(-1)
    t_plus = np.array([encode(float(v), cfg, 0.0) for v in x])
    return TimingState(t_plus, np.full(x.size, cfg.t_in), np.ones(x.size), 0.0)


def propagate(state: TimingState, layer: DenseLayer, cfg: EncodingConfig,
              threshold_factor: float | None = None) -> TimingState:
    """Fire every neuron of ``layer`` on the incoming timing pairs.

    ``threshold_factor`` replaces ``1 + epsilon`` in the firing threshold
    while leaving the window schedule alone. It exists to inject a faulty
    threshold for negative-control checks.
    """
    if layer.fan_in != len(state):
        raise DomainError(f"layer fan-in {layer.fan_in} != state width {len(state)}")
    pairs = np.column_stack([state.t_plus, state.t_minus])
    t_plus = np.empty(layer.fan_out)
    t_minus = np.empty(layer.fan_out)
    gains = np.empty(layer.fan_out)
    for k in range(layer.fan_out):
        eff = layer.weights[:, k] * state.gains
        neuron = build_dual_input_neuron(eff, layer.biases[k], pairs, cfg, state.window_start,
                                         check_window=threshold_factor is None)
        if threshold_factor is not None and not neuron.degenerate:
            theta = threshold_factor * cfg.lam * neuron.beta_o * cfg.t_in
            neuron = replace(neuron, pos_rail=replace(neuron.pos_rail, theta=theta),
                             neg_rail=replace(neuron.neg_rail, theta=theta))
        pair = fire_dual(neuron)
        t_plus[k], t_minus[k] = pair
        gains[k] = neuron.beta_o
    if layer.activation is Activation.RELU:
        # a negative sum is clamped to zero by equalising the two timings
        t_minus = np.maximum(t_minus, t_plus)
    return TimingState(t_plus, t_minus, gains, state.window_start + cfg.layer_advance)


def decode_output(state: TimingState, cfg: EncodingConfig) -> np.ndarray:
    return state.gains * (state.t_minus - state.t_plus) / cfg.t_in


def max_pool(state: TimingState, pool: PoolSpec) -> TimingState:
    """Keep, per group, the neuron with the largest ``t_minus - t_plus``.

    Raw timing differences are only comparable when the gains agree, so
    groups with unequal gains are rejected. Ties go to the lowest index.
    """
    n, g = len(state), pool.group_size
    if n % g:
        raise DomainError(f"{n} neurons not divisible by pool size {g}")
    gains = state.gains.reshape(-1, g)
    if np.any(gains != gains[:, :1]):
        raise DomainError("max pooling needs equal gains within each group")
    diff = (state.t_minus - state.t_plus).reshape(-1, g)
    pick = np.arange(n // g) * g + np.argmax(diff, axis=1)
    return TimingState(state.t_plus[pick], state.t_minus[pick], state.gains[pick],
                       state.window_start)


def forward_states(model: LayeredModel, x: Sequence[float],
                   threshold_factor: float | None = None) -> list[TimingState]:
    """Input encoding followed by the state after every layer."""
    states = [encode_layer0(x, model.cfg)]
    for layer in model.layers:
        states.append(propagate(states[-1], layer, model.cfg, threshold_factor))
    return states


def forward(model: LayeredModel, x: Sequence[float],
            threshold_factor: float | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != model.layers[0].fan_in:
        raise DomainError(f"input width {x.size} != model fan-in {model.layers[0].fan_in}")
    return decode_output(forward_states(model, x, threshold_factor)[-1], model.cfg)
