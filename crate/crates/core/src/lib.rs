//! Densest-k-subgraph through the Lovász relaxation.
//!
//! The relaxation `min f_L(x)` over `{x in [0,1]^n : 1^T x = k}` with the
//! closed-form extension `f_L(x) = -d^T x + sum_{(i,j)} w_ij |x_i - x_j|` is
//! solved by linearized ADMM ([`ladmm`]), rounded by top-k projection or
//! Frank-Wolfe refinement ([`rounding`]), and compared against greedy,
//! truncated-power and rank-1 baselines with a spectral upper bound on the
//! optimal density ([`baselines`]).

pub mod baselines;
pub mod error;
pub mod graph;
pub mod io;
pub mod ladmm;
mod linalg;
pub mod oracles;
pub mod prox;
pub mod rounding;

pub use baselines::{
    degree_topk_start, density_upper_bound, greedy_feige, rank1_dks, top_two_singular,
    truncated_power_method, Rank1Output, SpectralPair, TpmOutput,
};
pub use error::{DksError, Result};
pub use graph::{DuplicatePolicy, Graph, VertexSet};
pub use io::{
    load_edge_list, load_edge_list_with, load_graph, load_graph_with, read_cache, read_graph,
    read_graph_with, write_cache, write_edge_list, LoadOptions,
};
pub use ladmm::{
    lovasz_objective, relaxation_value, solve_lrelax, ProxScale, SolverConfig, SolverReport,
};
pub use prox::{phi, prox_g_bisection, shrinkage, ProxGOutput, ProxGParams};
pub use rounding::{
    adjacency_spectral_norm, frank_wolfe_refine, project_topk, FwConfig, FwOutput,
    SpectralEstimate, StepMode,
};
