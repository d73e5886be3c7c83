//! Shared fixtures for the criterion benches.

use dks_core::oracles::generate_planted;
use dks_core::Graph;

/// Largest component of a planted-clique instance.
pub fn planted(n: usize, k: usize, p: f64, seed: u64) -> Graph {
    generate_planted(n, k, p, seed)
        .expect("valid planted parameters")
        .graph
        .largest_component()
}
