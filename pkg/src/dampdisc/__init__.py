"""Discrimination of single-qubit amplitude damping channels.

Closed-form and numerically optimized success probabilities for telling two
damping channels apart, Monte Carlo simulation of the corresponding
measurement protocols, and parameter-sweep dataset generation.
"""

__version__ = "0.1.0"

from .channel import (  # noqa: E402
    DampingChannel,
    InputState,
    KrausPair,
    SideEntangledInput,
    kraus_from_dilation,
    two_shot_entangled_ket,
)
from .discrimination import (  # noqa: E402
    EQUAL_PRIORS,
    HelstromResult,
    MonteCarloEstimate,
    Povm,
    PriorPair,
    Protocol,
    exact_psucc,
    helstrom,
    helstrom_psucc,
    maximize_scalar,
    monte_carlo_psucc,
    pure_state_psucc,
    sample_protocol,
)
from .protocols import MC_STRATEGIES, build_protocol  # noqa: E402
from .strategies import (  # noqa: E402
    ChannelPair,
    StrategyResult,
    adaptive_feedback_closed_form,
    adaptive_feedback_psucc,
    adaptive_forward_optimal,
    adaptive_forward_psucc,
    backward_adaptive_optimal,
    backward_adaptive_psucc,
    damping_polar_curve,
    feedback_optimal,
    feedback_optimal_numeric,
    feedback_psucc,
    fwd_bwd_difference,
    one_shot_optimal,
    one_shot_optimal_numeric,
    one_shot_psucc,
    sequential_two_shot_optimal,
    sequential_two_shot_psucc,
    side_ent_optimal,
    side_ent_psucc,
    two_shot_entangled_optimal,
    two_shot_entangled_psucc,
    two_shot_product_optimal,
    two_shot_product_psucc,
)
from .sweep import (  # noqa: E402
    PRESETS,
    STRATEGIES,
    CurveFamily,
    FigurePreset,
    SweepConfig,
    SweepGrid,
    emit,
    run_mc,
    run_point,
    run_sweep,
)

__all__ = [
    "__version__",
    "DampingChannel",
    "InputState",
    "KrausPair",
    "SideEntangledInput",
    "kraus_from_dilation",
    "two_shot_entangled_ket",
    "EQUAL_PRIORS",
    "HelstromResult",
    "MonteCarloEstimate",
    "Povm",
    "PriorPair",
    "Protocol",
    "exact_psucc",
    "helstrom",
    "helstrom_psucc",
    "maximize_scalar",
    "monte_carlo_psucc",
    "pure_state_psucc",
    "sample_protocol",
    "MC_STRATEGIES",
    "build_protocol",
    "ChannelPair",
    "StrategyResult",
    "adaptive_feedback_closed_form",
    "adaptive_feedback_psucc",
    "adaptive_forward_optimal",
    "adaptive_forward_psucc",
    "backward_adaptive_optimal",
    "backward_adaptive_psucc",
    "damping_polar_curve",
    "feedback_optimal",
    "feedback_optimal_numeric",
    "feedback_psucc",
    "fwd_bwd_difference",
    "one_shot_optimal",
    "one_shot_optimal_numeric",
    "one_shot_psucc",
    "sequential_two_shot_optimal",
    "sequential_two_shot_psucc",
    "side_ent_optimal",
    "side_ent_psucc",
    "two_shot_entangled_optimal",
    "two_shot_entangled_psucc",
    "two_shot_product_optimal",
    "two_shot_product_psucc",
    "PRESETS",
    "STRATEGIES",
    "CurveFamily",
    "FigurePreset",
    "SweepConfig",
    "SweepGrid",
    "emit",
    "run_mc",
    "run_point",
    "run_sweep",
]
