//! Route centrality of node and channel sets, greedy top-k coverage curves,
//! Eclair's top-k hijack exposure and route length and fee histograms.
//!
//! Pairs are ordered. A node set hijacks a route only from strictly inside
//! it, and unroutable pairs stay out of every denominator.

mod centrality;
mod distribution;
mod pairs;

pub(crate) use centrality::greedy_cover;
pub use centrality::{
    centrality, curve_from_routes, eclair_hijack_metrics, mean_centrality, report_from_routes,
    route_pairs, top_central_nodes, CentralityCurve, CentralityReport, CurvePoint,
    EclairHijackMetrics, PairOutcome, TargetSet,
};
pub use distribution::{fee_volume_distribution, path_length_distribution, Histogram};
pub use pairs::PairSample;
