//! Route-hijacking analysis for payment channel networks.

pub mod analysis;
pub mod attack;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod graph;
pub mod routing;

pub use analysis::{
    centrality, eclair_hijack_metrics, fee_volume_distribution, path_length_distribution,
    top_central_nodes, CentralityReport, EclairHijackMetrics, PairSample, TargetSet,
};
pub use attack::{greedy_attack, AttackConfig, AttackPlan, DistanceOracle, HijackMetric};
pub use error::{AnalysisError, AttackError, GameError, GraphError, RoutingError};
pub use game::{
    attacker_utility, clique_game_matrices, clique_game_solve, defender_utility,
    solve_bimatrix_2x2, verify_equilibrium, GameMatrices, GameParams, GameSolution,
    StrategyProfile,
};
pub use graph::{
    compute_stats, generate_synthetic, parse_snapshot, serialize_snapshot, AttackLink, Channel,
    ChannelGraph, ChannelIndex, ChannelPolicy, Direction, Msat, NetworkStats, NodeId, NodeIndex,
    PolicySampler, SyntheticSpec,
};
pub use routing::{
    channel_fee, evaluate_path, find_route, k_shortest_routes, routes_to_target, FailureMemory,
    Hop, PolicyKind, Route, RouteLimits, RoutingPolicy,
};
