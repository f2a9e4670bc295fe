//! Network optimisation kernels shared by the assignment phases.
//!
//! * [`min_cost_flow`]: exact integer min-cost flow with arbitrary bounds and
//!   negative costs.
//! * [`residual_shortest_paths`]: Bellman-Ford on the residual graph, used to
//!   read node potentials off an optimal flow.
//! * [`hungarian_matching`]: maximum-cardinality minimum-cost bipartite
//!   matching.

mod matching;
mod network;
mod residual;
mod simplex;

pub use matching::{hungarian_matching, Matching};
pub use network::{min_cost_flow, min_cost_flow_ssp, Arc, FlowNetwork, FlowResult};
pub use residual::residual_shortest_paths;
