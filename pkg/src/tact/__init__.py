"""Time-domain analog weighted-sum computation.

Values are encoded as spike times, weighted sums are read off the firing
times of integrate-and-fire rails, and multi-layer networks pass timing
pairs between layers without decoding them.
"""

from .timing import (
    DomainError,
    EncodingConfig,
    FiringResult,
    RailSpec,
    SpikeEvent,
    choose_threshold,
    decode_same_sign_sum,
    decode_time,
    encode,
    solve_firing_time,
)
from .dualrail import (
    DualRailNeuron,
    SignedWeightedSumSpec,
    TimingPair,
    WeightingMode,
    build_dual_input_neuron,
    build_dummy_weight_neuron,
    decode_signed_sum,
    fire_dual,
    signed_weighted_sum,
)
from .network import (
    Activation,
    DenseLayer,
    LayeredModel,
    PoolSpec,
    TimingState,
    decode_output,
    encode_layer0,
    forward,
    max_pool,
    propagate,
)
from .oracle import GridSimConfig, compare, grid_fire, oracle_forward

__version__ = "0.1.0"
