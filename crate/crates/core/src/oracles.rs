//! Independent ground truth for tests and acceptance runs: exhaustive DkS,
//! the sorted-prefix (greedy) evaluation of the Lovász extension, an
//! exhaustive submodularity checker, dense linear algebra, and seeded
//! instance generators.
//!
//! Nothing here calls into the solver or the closed-form objective.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, DksError, Result};
use crate::graph::{DuplicatePolicy, Graph, VertexSet};

pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;
pub const EXHAUSTIVE_SUBMODULAR_MAX_N: usize = 12;
pub const DENSE_MAX_N: usize = 500;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exhaustive maximum of `1_S^T W 1_S` over all k-subsets, enumerated in
/// lexicographic order; the first maximizer wins ties.
pub fn brute_force_dks(g: &Graph, k: usize) -> Result<(VertexSet, f64)> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(DksError::domain(format!("k = {k} outside [2, n] for n = {n}")));
    }
    let count = binomial(n, k);
    if count > BRUTE_FORCE_LIMIT {
        return Err(DksError::TooLarge {
            what: "C(n, k)",
            size: count,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    // partial[d]: internal edge weight of the first d chosen vertices
    let mut chosen: Vec<usize> = (0..k).collect();
    let mut partial = vec![0.0; k + 1];
    let mut best_weight = f64::NEG_INFINITY;
    let mut best = chosen.clone();
    let gain = |chosen: &[usize], depth: usize, v: usize| -> f64 {
        chosen[..depth].iter().map(|&u| g.edge_weight(u, v)).sum()
    };
    for d in 0..k {
        partial[d + 1] = partial[d] + gain(&chosen, d, chosen[d]);
    }
    loop {
        if partial[k] > best_weight {
            best_weight = partial[k];
            best.copy_from_slice(&chosen);
        }
        // next combination in lexicographic order
        let mut i = k;
        while i > 0 && chosen[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        chosen[i - 1] += 1;
        for j in i..k {
            chosen[j] = chosen[j - 1] + 1;
        }
        for d in i - 1..k {
            partial[d + 1] = partial[d] + gain(&chosen, d, chosen[d]);
        }
    }
    let set = VertexSet::new(g, best)?;
    Ok((set, 2.0 * best_weight))
}

/// `F(S) = -1_S^T W 1_S`.
fn set_function(g: &Graph, members: &[usize]) -> f64 {
    -g.subgraph_weight(members).expect("members are in range")
}

/// Lovász extension by the sorted-prefix formula:
/// `Σ_i x_σ(i) (F(S_i) - F(S_{i-1}))` with `σ` sorting `x` in decreasing
/// order (stable, ties by index).
pub fn edmonds_lovasz(g: &Graph, x: &[f64]) -> Result<f64> {
    check_len("x", x.len(), g.n())?;
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]));
    let mut prefix = Vec::with_capacity(g.n());
    let mut prev = 0.0;
    let mut value = 0.0;
    for &v in &order {
        prefix.push(v);
        let cur = set_function(g, &prefix);
        value += x[v] * (cur - prev);
        prev = cur;
    }
    Ok(value)
}

/// Checks `F(A ∪ B) + F(A ∩ B) <= F(A) + F(B) + tol` for every pair of
/// subsets of an `n`-element ground set. Sets are bitmasks.
pub fn is_submodular<F>(n: usize, f: F, tol: f64) -> Result<bool>
where
    F: Fn(u32) -> f64,
{
    if n > EXHAUSTIVE_SUBMODULAR_MAX_N {
        return Err(DksError::TooLarge {
            what: "ground set size",
            size: n as u128,
            limit: EXHAUSTIVE_SUBMODULAR_MAX_N as u128,
        });
    }
    let full = 1u32 << n;
    let values: Vec<f64> = (0..full).map(&f).collect();
    for a in 0..full {
        for b in a + 1..full {
            let lhs = values[(a | b) as usize] + values[(a & b) as usize];
            if lhs > values[a as usize] + values[b as usize] + tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn mask_members(n: usize, mask: u32) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

fn submodular_tol(g: &Graph) -> f64 {
    1e-9 * (1.0 + g.total_weight())
}

/// Exhaustive submodularity check of `F(S) = -1_S^T W 1_S` for `n <= 12`,
/// otherwise 100 000 sampled pairs.
pub fn check_submodular(g: &Graph) -> bool {
    if g.n() <= EXHAUSTIVE_SUBMODULAR_MAX_N {
        let n = g.n();
        is_submodular(n, |s| set_function(g, &mask_members(n, s)), submodular_tol(g))
            .expect("n within the exhaustive limit")
    } else {
        check_submodular_sampled(g, 100_000, 0)
    }
}

/// Random-pair submodularity check.
pub fn check_submodular_sampled(g: &Graph, samples: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let tol = submodular_tol(g);
    let f = |mask: &[bool]| -g.weight_of_mask(mask);
    let mut a = vec![false; n];
    let mut b = vec![false; n];
    let mut union = vec![false; n];
    let mut inter = vec![false; n];
    for _ in 0..samples {
        for i in 0..n {
            a[i] = rng.gen_bool(0.5);
            b[i] = rng.gen_bool(0.5);
            union[i] = a[i] || b[i];
            inter[i] = a[i] && b[i];
        }
        if f(&union) + f(&inter) > f(&a) + f(&b) + tol {
            return false;
        }
    }
    true
}

/// A background random graph with a planted clique.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub graph: Graph,
    pub planted: VertexSet,
    pub background_p: f64,
    pub seed: u64,
}

/// `G(n, p)` plus a clique on `k` uniformly chosen vertices. Isolated
/// vertices are kept; deterministic for a fixed seed.
pub fn generate_planted(n: usize, k: usize, p: f64, seed: u64) -> Result<PlantedInstance> {
    if k < 2 || k > n {
        return Err(DksError::domain(format!("clique size {k} outside [2, n = {n}]")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(DksError::domain(format!("p = {p} outside [0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j, 1.0));
            }
        }
    }
    let mut clique = sample(&mut rng, n, k).into_vec();
    clique.sort_unstable();
    for (a, &i) in clique.iter().enumerate() {
        for &j in &clique[a + 1..] {
            edges.push((i, j, 1.0));
        }
    }
    let graph = Graph::from_edges(n, edges, DuplicatePolicy::Collapse)?;
    let planted = VertexSet::new(&graph, clique)?;
    Ok(PlantedInstance {
        graph,
        planted,
        background_p: p,
        seed,
    })
}

/// Edge weights for [`random_graph`].
#[derive(Debug, Clone, Copy)]
pub enum WeightDist {
    Unit,
    /// Uniform on `(0, max]`.
    Uniform { max: f64 },
}

/// `G(n, p)` with the given weight distribution. May have no edges.
pub fn random_graph(n: usize, p: f64, weights: WeightDist, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(DksError::domain(format!("p = {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                let w = match weights {
                    WeightDist::Unit => 1.0,
                    // 1 - U[0,1) lies in (0, 1]
                    WeightDist::Uniform { max } => max * (1.0 - rng.gen::<f64>()),
                };
                edges.push((i, j, w));
            }
        }
    }
    Graph::from_edges(n, edges, DuplicatePolicy::Sum)
}

/// Dense materializations of the graph operators and their exact spectra.
#[derive(Debug, Clone)]
pub struct DenseCheck {
    pub adjacency: DMatrix<f64>,
    /// `n x m`, column `e` is `e_i - e_j`.
    pub incidence: DMatrix<f64>,
    /// `B B^T`.
    pub laplacian: DMatrix<f64>,
    /// Eigenvalues of `W`, decreasing.
    pub adjacency_spectrum: Vec<f64>,
    /// Eigenvalues of `B B^T`, decreasing.
    pub laplacian_spectrum: Vec<f64>,
}

impl DenseCheck {
    /// Singular values of `W` (absolute eigenvalues), decreasing.
    pub fn adjacency_singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.adjacency_spectrum.iter().map(|v| v.abs()).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

pub fn dense_cross_check(g: &Graph) -> Result<DenseCheck> {
    let (n, m) = (g.n(), g.m());
    if n > DENSE_MAX_N {
        return Err(DksError::TooLarge {
            what: "n",
            size: n as u128,
            limit: DENSE_MAX_N as u128,
        });
    }
    let mut adjacency = DMatrix::zeros(n, n);
    let mut incidence = DMatrix::zeros(n, m);
    for (e, (&(i, j), &w)) in g.edges().iter().zip(g.weights()).enumerate() {
        adjacency[(i, j)] = w;
        adjacency[(j, i)] = w;
        incidence[(i, e)] = 1.0;
        incidence[(j, e)] = -1.0;
    }
    let laplacian = &incidence * incidence.transpose();
    Ok(DenseCheck {
        adjacency_spectrum: sorted_eigenvalues(adjacency.clone()),
        laplacian_spectrum: sorted_eigenvalues(laplacian.clone()),
        adjacency,
        incidence,
        laplacian,
    })
}

/// Small named graphs used across the test suites.
pub mod fixtures {
    use crate::graph::Graph;

    pub fn complete(n: usize) -> Graph {
        Graph::from_unweighted_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
            .expect("valid fixture")
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::from_unweighted_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid fixture")
    }

    pub fn path(n: usize) -> Graph {
        Graph::from_unweighted_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid fixture")
    }

    /// Star with center 0.
    pub fn star(n: usize) -> Graph {
        Graph::from_unweighted_edges(n, (1..n).map(|i| (0, i))).expect("valid fixture")
    }

    /// Disjoint union of K4 on `{0,1,2,3}` and K2 on `{4,5}`.
    pub fn k4_k2() -> Graph {
        let mut e: Vec<_> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
        e.push((4, 5));
        Graph::from_unweighted_edges(6, e).expect("valid fixture")
    }
}
