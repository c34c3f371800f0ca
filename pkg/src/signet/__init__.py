"""Coupled SAIS spreading and structural-balance sign dynamics on signed networks."""

from .dynamics import (
    EdgeConfig,
    GateMode,
    GateScope,
    Params,
    TransitionKind,
    TransitionOutcome,
    sample_transition,
    transition_distribution,
)
from .energy import (
    EdgeClass,
    EnergyBreakdown,
    NodeState,
    NormalizationMode,
    classify_edge,
    delta_pairwise_energy,
    delta_total_energy,
    delta_triad_energy,
    pairwise_energy,
    total_energy,
    total_pairwise_energy,
    total_triad_energy,
    triad_energy,
)
from .engine import (
    AcceptanceDecision,
    ClusterReport,
    EnsembleStats,
    InitialConditions,
    NetworkState,
    RunRecord,
    RunSpec,
    apply_with_acceptance,
    detect_clusters,
    initialize,
    run,
    run_ensemble,
    step,
)
from .graph import SignedGraph, triad_count_upper_bound
from .rng import SplitMix64

__version__ = "0.1.0"

__all__ = [
    "AcceptanceDecision",
    "ClusterReport",
    "EdgeClass",
    "EdgeConfig",
    "EnergyBreakdown",
    "EnsembleStats",
    "GateMode",
    "GateScope",
    "InitialConditions",
    "NetworkState",
    "NodeState",
    "NormalizationMode",
    "Params",
    "RunRecord",
    "RunSpec",
    "SignedGraph",
    "SplitMix64",
    "TransitionKind",
    "TransitionOutcome",
    "apply_with_acceptance",
    "classify_edge",
    "delta_pairwise_energy",
    "delta_total_energy",
    "delta_triad_energy",
    "detect_clusters",
    "initialize",
    "pairwise_energy",
    "run",
    "run_ensemble",
    "sample_transition",
    "step",
    "total_energy",
    "total_pairwise_energy",
    "total_triad_energy",
    "transition_distribution",
    "triad_count_upper_bound",
    "triad_energy",
    "__version__",
]
