"""Signed weighted sums on a pair of same-signed rails.

Positive and negative weights accumulate on separate rails. Both rails are
simulated as positive accumulations of ``|a_i|`` slopes and share one
threshold, so the signed sum is read off the difference of the two firing
times. Two constructions are provided:

* dummy weight: every input drives one rail; a synthetic zero-input weight
  tops up the lighter rail so both carry the same total weight;
* dual input: every synapse drives both rails with opposite-signed copies of
  its weight, so the rails balance without any extra weight.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .timing import (
    DomainError,
    EncodingConfig,
    RailSpec,
    choose_threshold,
    encode,
    solve_firing_time,
)

__all__ = [
    "WeightingMode",
    "SignedWeightedSumSpec",
    "TimingPair",
    "DualRailNeuron",
    "build_dummy_weight_neuron",
    "build_dual_input_neuron",
    "build_neuron",
    "fire_dual",
    "decode_signed_sum",
    "signed_weighted_sum",
]


class WeightingMode(enum.Enum):
    DUMMY_WEIGHT = "dummy"
    DUAL_INPUT = "dual"


@dataclass(frozen=True)
class SignedWeightedSumSpec:
    weights: Sequence[float]
    inputs: Sequence[float]
    cfg: EncodingConfig = EncodingConfig()
    mode: WeightingMode = WeightingMode.DUMMY_WEIGHT

    def __post_init__(self):
        if len(self.weights) != len(self.inputs):
            raise DomainError(
                f"{len(self.weights)} weights but {len(self.inputs)} inputs")
        if len(self.weights) == 0:
            raise DomainError("need at least one weight")


class TimingPair(NamedTuple):
    t_plus: float
    t_minus: float


@dataclass(frozen=True)
class DualRailNeuron:
    """Positive and negative rails with a common magnitude ``beta_o``.

    A neuron with ``beta_o == 0`` has no nonzero weights; it is degenerate
    and decodes to zero.
    """

    pos_rail: RailSpec
    neg_rail: RailSpec
    beta_o: float
    cfg: EncodingConfig
    window_start: float = 0.0

    @property
    def degenerate(self) -> bool:
        return self.beta_o == 0.0

    def rail_imbalance(self) -> float:
        return abs(self.pos_rail.total_slope - self.neg_rail.total_slope)


def _rails(pos_t, pos_k, neg_t, neg_k, beta_o, cfg, window_start) -> DualRailNeuron:
    theta = choose_threshold(beta_o, cfg)
    return DualRailNeuron(
        RailSpec(np.asarray(pos_t, float), np.asarray(pos_k, float), theta, window_start),
        RailSpec(np.asarray(neg_t, float), np.asarray(neg_k, float), theta, window_start),
        beta_o,
        cfg,
        window_start,
    )


def build_dummy_weight_neuron(spec: SignedWeightedSumSpec,
                              window_start: float = 0.0) -> DualRailNeuron:
    cfg = spec.cfg
    weights = np.asarray(spec.weights, dtype=float)
    times = np.array([encode(float(x), cfg, window_start) for x in spec.inputs])
    pos = weights > 0
    neg = weights < 0

    beta_pos = math.fsum(weights[pos])
    beta_neg = math.fsum(weights[neg])
    dummy = -(beta_pos + beta_neg)
    beta_o = max(beta_pos, -beta_neg)

    pos_t, pos_k = list(times[pos]), list(cfg.lam * weights[pos])
    neg_t, neg_k = list(times[neg]), list(cfg.lam * -weights[neg])
    # the dummy carries a zero input, i.e. fires at the window end
    if dummy > 0:
        pos_t.append(window_start + cfg.t_in)
        pos_k.append(cfg.lam * dummy)
    elif dummy < 0:
        neg_t.append(window_start + cfg.t_in)
        neg_k.append(cfg.lam * -dummy)
    return _rails(pos_t, pos_k, neg_t, neg_k, beta_o, cfg, window_start)


def build_dual_input_neuron(weights: Sequence[float], bias: float,
                            input_pairs, cfg: EncodingConfig,
                            window_start: float = 0.0,
                            check_window: bool = True) -> DualRailNeuron:
    """Build a neuron in which every synapse feeds both rails.

    ``input_pairs`` holds one ``(t_plus, t_minus)`` pair per synapse, either
    as :class:`TimingPair` objects or as an ``(n, 2)`` array. A weight
    ``w >= 0`` puts ``t_plus`` on the positive rail and ``t_minus`` on the
    negative rail; ``w < 0`` swaps them. The bias behaves like a weight whose
    input pair is pinned to ``(window_start, window_start + t_in)``.
    """
    weights = np.asarray(weights, dtype=float).reshape(-1)
    pairs = np.asarray(input_pairs, dtype=float).reshape(-1, 2)
    if pairs.shape[0] != weights.size:
        raise DomainError(
            f"{weights.size} weights but {pairs.shape[0]} input pairs")
    if check_window and pairs.size:
        lo, hi = window_start, window_start + cfg.t_in
        slack = 1e-9 * max(cfg.t_in, abs(window_start))
        if pairs.min() < lo - slack or pairs.max() > hi + slack:
            raise DomainError(f"input timings outside window [{lo}, {hi}]")

    nz = weights != 0
    w = weights[nz]
    t_plus, t_minus = pairs[nz, 0], pairs[nz, 1]
    up = w > 0
    mag = cfg.lam * np.abs(w)
    pos_t = np.where(up, t_plus, t_minus)
    neg_t = np.where(up, t_minus, t_plus)

    beta_o = math.fsum(np.abs(w)) + abs(bias)
    if bias != 0:
        early, late = window_start, window_start + cfg.t_in
        b_pos, b_neg = (early, late) if bias > 0 else (late, early)
        pos_t = np.append(pos_t, b_pos)
        neg_t = np.append(neg_t, b_neg)
        mag = np.append(mag, cfg.lam * abs(bias))
    return _rails(pos_t, mag, neg_t, mag, beta_o, cfg, window_start)


def build_neuron(spec: SignedWeightedSumSpec, window_start: float = 0.0) -> DualRailNeuron:
    """Build with whichever construction ``spec.mode`` names."""
    if spec.mode is WeightingMode.DUMMY_WEIGHT:
        return build_dummy_weight_neuron(spec, window_start)
    cfg = spec.cfg
    end = window_start + cfg.t_in
    pairs = [(encode(float(x), cfg, window_start), end) for x in spec.inputs]
    return build_dual_input_neuron(spec.weights, 0.0, pairs, cfg, window_start)


def fire_dual(neuron: DualRailNeuron) -> TimingPair:
    if neuron.degenerate:
        t = neuron.window_start + (2.0 + neuron.cfg.epsilon) * neuron.cfg.t_in
        return TimingPair(t, t)
    plus = solve_firing_time(neuron.pos_rail)
    minus = solve_firing_time(neuron.neg_rail)
    if not (plus.fired and minus.fired):
        raise DomainError("balanced rail failed to fire")
    return TimingPair(plus.t_nu, minus.t_nu)


def decode_signed_sum(pair: TimingPair, beta_o: float, cfg: EncodingConfig) -> float:
    if beta_o < 0:
        raise DomainError(f"beta_o must be nonnegative, got {beta_o}")
    return beta_o * (pair.t_minus - pair.t_plus) / cfg.t_in


def signed_weighted_sum(spec: SignedWeightedSumSpec, window_start: float = 0.0) -> float:
    """Compute ``sum(a_i * x_i)`` entirely through firing times."""
    neuron = build_neuron(spec, window_start)
    return decode_signed_sum(fire_dual(neuron), neuron.beta_o, spec.cfg)
