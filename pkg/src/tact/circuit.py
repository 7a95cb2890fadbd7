"""RC realisation of a rail, crossbar energy accounting and current limits.

A rail is built as a capacitor charged through rectifying resistors, one per
input. A resistor conducts once its input steps to ``v_dd``; before that it
is an open circuit. Between activations the node relaxes exponentially
towards ``v_dd``, so the trajectory and the comparator crossing are solved
segment by segment in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dualrail import (
    SignedWeightedSumSpec,
    TimingPair,
    build_dummy_weight_neuron,
    decode_signed_sum,
    fire_dual,
)
from .timing import (
    EncodingConfig,
    FiringResult,
    NO_FIRE,
    RailSpec,
    solve_firing_time,
)

__all__ = [
    "RcRailSpec",
    "RcSegment",
    "RcTrajectory",
    "rc_transient",
    "rc_fire_time",
    "PhysicalMapping",
    "rc_rail_from_ideal",
    "ideal_rail_from_rc",
    "TimingErrorReport",
    "timing_error_report",
    "CrossbarParams",
    "POC_250NM",
    "EnergyReport",
    "energy_report",
    "CurrentCheck",
    "subthreshold_current_check",
    "RcComparison",
    "compare_rc_ideal",
]

CURRENT_LIMIT = 1e-9  # amperes per synapse
MIN_RESISTANCE = 1e9  # ohms
GATE_SOURCE_BIAS = -0.37  # volts, recorded only


@dataclass(frozen=True)
class RcRailSpec:
    """Branches are ``(t_on, conductance)`` pairs feeding one capacitor."""

    branches: Sequence[tuple[float, float]]
    cap: float
    v_dd: float = 1.0
    theta_v: float = 0.3
    v_init: float = 0.0

    def __post_init__(self):
        if not self.cap > 0:
            raise ValueError(f"cap must be positive, got {self.cap}")
        if not self.v_dd > 0:
            raise ValueError(f"v_dd must be positive, got {self.v_dd}")
        if not 0 < self.theta_v < self.v_dd:
            raise ValueError("theta_v must lie strictly between 0 and v_dd")
        if not self.v_init < self.v_dd:
            raise ValueError("v_init must be below v_dd")
        branches = tuple((float(t), float(g)) for t, g in self.branches)
        for t, g in branches:
            if not (math.isfinite(t) and g > 0):
                raise ValueError(f"bad branch ({t}, {g})")
        object.__setattr__(self, "branches", branches)


@dataclass(frozen=True)
class RcSegment:
    t_start: float
    t_end: float  # math.inf for the final segment
    v_start: float
    tau: float  # math.inf while no branch conducts

    def voltage(self, t, v_dd):
        if math.isinf(self.tau):
            return np.full_like(np.asarray(t, dtype=float), self.v_start)
        return v_dd - (v_dd - self.v_start) * np.exp(-(np.asarray(t) - self.t_start) / self.tau)


@dataclass(frozen=True)
class RcTrajectory:
    segments: list[RcSegment]
    v_dd: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)
        for seg in self.segments:
            mask = (t >= seg.t_start) & (t < seg.t_end)
            out[mask] = seg.voltage(t[mask], self.v_dd)
        first = self.segments[0]
        out[t < first.t_start] = first.v_start
        return out

    @property
    def breakpoints(self) -> list[float]:
        return [s.t_start for s in self.segments]


def _activation_steps(rail: RcRailSpec):
    """Merge branches that switch on together: ``[(t_on, total_g), ...]``."""
    steps: dict[float, float] = {}
    for t, g in rail.branches:
        steps[t] = steps.get(t, 0.0) + g
    return sorted(steps.items())


def rc_transient(rail: RcRailSpec, until: float) -> RcTrajectory:
    """Piecewise-exponential node voltage from the first activation onwards.

    The trajectory begins at the earliest ``t_on`` (or at 0 when there are no
    branches) and its last segment is unbounded; ``until`` only limits which
    activations are taken into account.
    """
    steps = [s for s in _activation_steps(rail) if s[0] <= until]
    if not steps:
        return RcTrajectory([RcSegment(0.0, math.inf, rail.v_init, math.inf)], rail.v_dd)
    segments = []
    v = rail.v_init
    g_total = 0.0
    for i, (t_on, g) in enumerate(steps):
        g_total += g
        t_end = steps[i + 1][0] if i + 1 < len(steps) else math.inf
        seg = RcSegment(t_on, t_end, v, rail.cap / g_total)
        segments.append(seg)
        if math.isfinite(t_end):
            v = float(seg.voltage(t_end, rail.v_dd))
    return RcTrajectory(segments, rail.v_dd)


def rc_fire_time(rail: RcRailSpec) -> FiringResult:
    if not rail.branches:
        return NO_FIRE
    if rail.v_init >= rail.theta_v:
        return FiringResult(True, min(t for t, _ in rail.branches))
    traj = rc_transient(rail, math.inf)
    for seg in traj.segments:
        v_end = rail.v_dd if math.isinf(seg.t_end) else float(seg.voltage(seg.t_end, rail.v_dd))
        if v_end >= rail.theta_v:
            gap = (rail.v_dd - seg.v_start) / (rail.v_dd - rail.theta_v)
            t = seg.t_start + seg.tau * math.log(gap)
            return FiringResult(True, min(t, seg.t_end))
    return NO_FIRE  # unreachable: v tends to v_dd > theta_v


@dataclass(frozen=True)
class PhysicalMapping:
    """How abstract ramp slopes become conductances.

    ``calibration="initial"`` matches the charging rate at 0 V, giving
    ``g = k * cap / v_dd``; ``"threshold"`` matches it at ``theta_v``,
    giving ``g = k * cap / (v_dd - theta_v)``.
    """

    cap: float = 1e-12
    v_dd: float = 1.0
    theta_v: float = 0.3
    calibration: str = "initial"

    def __post_init__(self):
        if self.calibration not in ("initial", "threshold"):
            raise ValueError(f"unknown calibration {self.calibration!r}")

    def conductance(self, slope: float) -> float:
        drive = self.v_dd if self.calibration == "initial" else self.v_dd - self.theta_v
        return slope * self.cap / drive


def rc_rail_from_ideal(rail: RailSpec, mapping: PhysicalMapping) -> RcRailSpec:
    """Physical rail whose linearised model fires when ``rail`` does.

    Slopes are first rescaled so the abstract threshold lands on ``theta_v``;
    the firing time of the linear model is unchanged by that rescaling.
    """
    scale = mapping.theta_v / rail.theta if rail.theta > 0 else 1.0
    branches = [(float(t), mapping.conductance(k * scale))
                for t, k in zip(rail.times, rail.slopes) if k > 0]
    return RcRailSpec(branches, mapping.cap, mapping.v_dd, mapping.theta_v)


def ideal_rail_from_rc(rail: RcRailSpec) -> RailSpec:
    """Tangent-line model: each branch ramps at its initial rate ``g * v_dd / cap``."""
    times = [t for t, _ in rail.branches]
    slopes = [g * rail.v_dd / rail.cap for _, g in rail.branches]
    return RailSpec(np.array(times, float), np.array(slopes, float),
                    rail.theta_v if times else 0.0)


def relative_deviation(t_rc: float, t_ideal: float, t_first: float) -> float:
    """Firing-time deviation relative to the ideal time elapsed since the first input."""
    return (t_rc - t_ideal) / (t_ideal - t_first)


@dataclass
class TimingErrorReport:
    ideal: TimingPair | None
    rc: TimingPair | None
    abs_deviation: TimingPair | None
    rel_deviation: TimingPair | None
    sum_ideal: float
    sum_rc: float
    extra: dict = field(default_factory=dict)

    @property
    def fired(self) -> bool:
        return self.ideal is not None

    @property
    def sum_error(self) -> float:
        return self.sum_rc - self.sum_ideal


def timing_error_report(weights: Sequence[float], inputs: Sequence[float],
                        mapping: PhysicalMapping,
                        cfg: EncodingConfig = EncodingConfig()) -> TimingErrorReport:
    """Compare the RC rails of a signed weighted sum with their ideal ramps.

    Both rails of the dummy-weight neuron are mapped onto capacitors, fired
    through the exponential model, and decoded with the ideal decoder; the
    gap between the two decodes is the weighted-sum error the RC
    nonlinearity induces.
    """
    neuron = build_dummy_weight_neuron(SignedWeightedSumSpec(weights, inputs, cfg))
    if neuron.degenerate:
        return TimingErrorReport(None, None, None, None, 0.0, 0.0)
    ideal = fire_dual(neuron)
    rails = (neuron.pos_rail, neuron.neg_rail)
    rc_times = []
    for rail in rails:
        result = rc_fire_time(rc_rail_from_ideal(rail, mapping))
        rc_times.append(result.t_nu)
    rc = TimingPair(*rc_times)
    firsts = [float(r.times.min()) for r in rails]
    abs_dev = TimingPair(rc.t_plus - ideal.t_plus, rc.t_minus - ideal.t_minus)
    rel_dev = TimingPair(relative_deviation(rc.t_plus, ideal.t_plus, firsts[0]),
                         relative_deviation(rc.t_minus, ideal.t_minus, firsts[1]))
    return TimingErrorReport(
        ideal, rc, abs_dev, rel_dev,
        decode_signed_sum(ideal, neuron.beta_o, cfg),
        decode_signed_sum(rc, neuron.beta_o, cfg),
        {"beta_o": neuron.beta_o},
    )


@dataclass(frozen=True)
class CrossbarParams:
    """Geometry and per-synapse parasitics of an N x M crossbar."""

    n_inputs: int
    m_outputs: int
    c_dl_per_syn: float
    c_al_per_syn: float
    v_dd: float = 1.0
    e_neuron: float = 1.67e-12
    r_syn: float = 1e9
    c_in_neuron: float = 0.0

    def __post_init__(self):
        for name in ("n_inputs", "m_outputs", "c_dl_per_syn", "c_al_per_syn",
                     "v_dd", "e_neuron", "r_syn"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.c_in_neuron < 0:
            raise ValueError("c_in_neuron must be nonnegative")


POC_250NM = CrossbarParams(
    n_inputs=500, m_outputs=20, c_dl_per_syn=1.76e-15, c_al_per_syn=1.78e-15,
    v_dd=1.0, e_neuron=1.67e-12, r_syn=1e9,
)


@dataclass(frozen=True)
class EnergyReport:
    e_syn: float
    e_neuron_per_syn: float
    e_total_per_syn: float
    ops_per_syn: int
    efficiency: float  # operations per joule
    e_c_in_per_syn: float  # not included in e_syn

    @property
    def tops_per_watt(self) -> float:
        return self.efficiency / 1e12

    def lines(self) -> list[str]:
        return [
            f"e_syn_fj={self.e_syn * 1e15:.4f}",
            f"e_neuron_per_syn_fj={self.e_neuron_per_syn * 1e15:.4f}",
            f"e_total_per_syn_fj={self.e_total_per_syn * 1e15:.4f}",
            f"e_c_in_per_syn_fj={self.e_c_in_per_syn * 1e15:.4f}",
            f"ops_per_syn={self.ops_per_syn}",
            f"efficiency_tops_per_watt={self.tops_per_watt:.1f}",
        ]


def energy_report(params: CrossbarParams) -> EnergyReport:
    e_syn = (params.c_dl_per_syn + params.c_al_per_syn) * params.v_dd ** 2
    # neuron energy is a fixed cost per firing, shared by its N synapses
    e_neuron = params.e_neuron / params.n_inputs
    total = e_syn + e_neuron
    ops = 2
    return EnergyReport(
        e_syn=e_syn,
        e_neuron_per_syn=e_neuron,
        e_total_per_syn=total,
        ops_per_syn=ops,
        efficiency=ops / total,
        e_c_in_per_syn=params.c_in_neuron * params.v_dd ** 2 / params.n_inputs,
    )


@dataclass(frozen=True)
class CurrentCheck:
    i_max: float
    limit: float
    ok: bool
    resistance_ok: bool
    gate_source_bias: float = GATE_SOURCE_BIAS

    def lines(self) -> list[str]:
        return [
            f"i_max_na={self.i_max * 1e9:.4g}",
            f"current_limit_na={self.limit * 1e9:.4g}",
            f"current_ok={'yes' if self.ok else 'no'}",
            f"resistance_ok={'yes' if self.resistance_ok else 'no'}",
            f"gate_source_bias_v={self.gate_source_bias}",
        ]


def subthreshold_current_check(params: CrossbarParams) -> CurrentCheck:
    """Worst-case branch current ``v_dd / r_syn`` against the 1 nA budget."""
    i_max = params.v_dd / params.r_syn
    return CurrentCheck(
        i_max, CURRENT_LIMIT,
        ok=i_max <= CURRENT_LIMIT * (1 + 1e-12),
        resistance_ok=params.r_syn >= MIN_RESISTANCE * (1 - 1e-12),
    )


@dataclass(frozen=True)
class RcComparison:
    rc: FiringResult
    ideal: FiringResult
    rel_deviation: float

    def lines(self) -> list[str]:
        if not self.rc.fired:
            return ["no-fire"]
        return [
            f"t_rc={self.rc.t_nu!r}",
            f"t_ideal={self.ideal.t_nu!r}",
            f"rel_deviation={self.rel_deviation:.6f}",
        ]


def compare_rc_ideal(rail: RcRailSpec) -> RcComparison:
    """Fire ``rail`` with the exponential model and with its tangent-line model."""
    rc = rc_fire_time(rail)
    if not rc.fired:
        return RcComparison(rc, NO_FIRE, math.nan)
    ideal = solve_firing_time(ideal_rail_from_rc(rail))
    first = min(t for t, _ in rail.branches)
    return RcComparison(rc, ideal, relative_deviation(rc.t_nu, ideal.t_nu, first))
