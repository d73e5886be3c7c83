//! Weighted undirected simple graphs and the matrix-free operators built on them.
//!
//! Edges are stored once, as `(i, j)` with `i < j`, sorted lexicographically.
//! The signed incidence matrix `B` is never materialized: column `e` of `B`
//! is `e_i - e_j` for the stored edge `e = (i, j)`, so `B^T x` is the vector
//! of edge differences and `B B^T` is the unweighted combinatorial Laplacian.

use std::collections::BTreeMap;

use crate::error::{check_len, DksError, Result};
use crate::linalg::{lanczos_extremes, random_start};

/// How repeated `{i, j}` pairs are merged when building a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuplicatePolicy {
    /// Weights of repeated pairs are added.
    Sum,
    /// Repeated pairs collapse to a single edge of weight 1.
    Collapse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
    // CSR adjacency
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    neighbor_weights: Vec<f64>,
    degree: Vec<f64>,
    labels: Vec<u64>,
}

const LANCZOS_STEP_CAP: usize = 400;

impl Graph {
    /// Builds a graph on `n` vertices from `(u, v, w)` triples.
    ///
    /// Pairs are oriented so that `u < v`; repeated pairs are merged according
    /// to `policy`. Self-loops, out-of-range ids and non-positive or
    /// non-finite weights are rejected.
    pub fn from_edges<I>(n: usize, edges: I, policy: DuplicatePolicy) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(DksError::domain("graph must have at least one vertex"));
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(DksError::domain(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(DksError::domain(format!("self-loop at vertex {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(DksError::domain(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            let key = (u.min(v), u.max(v));
            match policy {
                DuplicatePolicy::Sum => *merged.entry(key).or_insert(0.0) += w,
                DuplicatePolicy::Collapse => {
                    merged.insert(key, 1.0);
                }
            }
        }
        let (edges, weights): (Vec<_>, Vec<_>) = merged.into_iter().unzip();
        Ok(Self::from_sorted(n, edges, weights, (0..n as u64).collect()))
    }

    /// Convenience constructor for unweighted graphs.
    pub fn from_unweighted_edges<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(
            n,
            pairs.into_iter().map(|(u, v)| (u, v, 1.0)),
            DuplicatePolicy::Collapse,
        )
    }

    // Caller guarantees: sorted, i < j, unique, positive weights, labels.len() == n.
    pub(crate) fn from_sorted(
        n: usize,
        edges: Vec<(usize, usize)>,
        weights: Vec<f64>,
        labels: Vec<u64>,
    ) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(i, j) in &edges {
            counts[i + 1] += 1;
            counts[j + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0usize; 2 * edges.len()];
        let mut neighbor_weights = vec![0.0; 2 * edges.len()];
        for (&(i, j), &w) in edges.iter().zip(&weights) {
            neighbors[cursor[i]] = j;
            neighbor_weights[cursor[i]] = w;
            cursor[i] += 1;
            neighbors[cursor[j]] = i;
            neighbor_weights[cursor[j]] = w;
            cursor[j] += 1;
        }
        let degree = (0..n)
            .map(|i| neighbor_weights[offsets[i]..offsets[i + 1]].iter().sum())
            .collect();
        Graph {
            n,
            edges,
            weights,
            offsets,
            neighbors,
            neighbor_weights,
            degree,
            labels,
        }
    }

    /// Replaces the reporting labels (original vertex ids).
    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Self> {
        check_len("labels", labels.len(), self.n)?;
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted degree vector `d = W 1`.
    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Original vertex ids, indexed by dense id.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    /// Neighbors of `v` with edge weights, in increasing id order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.neighbors[r.clone()]
            .iter()
            .copied()
            .zip(self.neighbor_weights[r].iter().copied())
    }

    /// Weight of edge `{u, v}`, or 0 when absent.
    pub fn edge_weight(&self, u: usize, v: usize) -> f64 {
        let r = self.offsets[u]..self.offsets[u + 1];
        match self.neighbors[r.clone()].binary_search(&v) {
            Ok(pos) => self.neighbor_weights[r.start + pos],
            Err(_) => 0.0,
        }
    }

    /// Number of neighbors of `v`.
    pub fn unweighted_degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_unweighted_degree(&self) -> usize {
        (0..self.n).map(|v| self.unweighted_degree(v)).max().unwrap_or(0)
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// True when every edge has weight exactly 1.
    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// `B^T x`: entry `e` is `x_i - x_j` for the stored edge `e = (i, j)`.
    pub fn incidence_apply_t(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("x", x.len(), self.n)?;
        let mut out = vec![0.0; self.m()];
        self.incidence_t_into(x, &mut out);
        Ok(out)
    }

    pub(crate) fn incidence_t_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, &(i, j)) in out.iter_mut().zip(&self.edges) {
            *o = x[i] - x[j];
        }
    }

    /// `B f`, the adjoint of [`Graph::incidence_apply_t`].
    pub fn incidence_apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len("f", f.len(), self.m())?;
        let mut out = vec![0.0; self.n];
        self.incidence_into(f, &mut out);
        Ok(out)
    }

    pub(crate) fn incidence_into(&self, f: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&fe, &(i, j)) in f.iter().zip(&self.edges) {
            out[i] += fe;
            out[j] -= fe;
        }
    }

    /// `W x` by a scan of the neighbor lists.
    pub fn adjacency_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("x", x.len(), self.n)?;
        let mut out = vec![0.0; self.n];
        self.adjacency_into(x, &mut out);
        Ok(out)
    }

    pub(crate) fn adjacency_into(&self, x: &[f64], out: &mut [f64]) {
        for (v, o) in out.iter_mut().enumerate() {
            *o = self.neighbors(v).map(|(u, w)| w * x[u]).sum();
        }
    }

    /// Unweighted Laplacian `L x = deg ∘ x - A x`, which equals `B B^T x`.
    pub(crate) fn laplacian_into(&self, x: &[f64], out: &mut [f64]) {
        for (v, o) in out.iter_mut().enumerate() {
            let nbrs = &self.neighbors[self.offsets[v]..self.offsets[v + 1]];
            *o = nbrs.len() as f64 * x[v] - nbrs.iter().map(|&u| x[u]).sum::<f64>();
        }
    }

    /// Safe over-estimate of `||B||_2^2 = λ_max(B B^T)`.
    ///
    /// Lanczos on the unweighted Laplacian until the top Ritz value has a
    /// residual bound below `tol / 10` relative; the Ritz value plus that bound
    /// is then inflated by `1 + tol`. Never exceeds `2 * max_degree`, which is
    /// also returned when the step cap is hit.
    pub fn incidence_spectral_norm_sq(&self, tol: f64) -> f64 {
        let cap = 2.0 * self.max_unweighted_degree() as f64;
        if self.m() == 0 {
            return 0.0;
        }
        let out = lanczos_extremes(
            |x, y| self.laplacian_into(x, y),
            random_start(self.n, 0x5eed_1a91),
            0.1 * tol,
            LANCZOS_STEP_CAP,
            None,
            false,
        );
        if !out.converged {
            return cap;
        }
        ((out.max + out.max_bound) * (1.0 + tol)).min(cap)
    }

    fn membership(&self, s: &[usize]) -> Result<(Vec<bool>, usize)> {
        let mut mask = vec![false; self.n];
        let mut count = 0;
        for &v in s {
            if v >= self.n {
                return Err(DksError::domain(format!(
                    "vertex {v} is outside 0..{}",
                    self.n
                )));
            }
            if !mask[v] {
                mask[v] = true;
                count += 1;
            }
        }
        Ok((mask, count))
    }

    /// `1_S^T W 1_S`, i.e. twice the total weight of edges inside `s`.
    pub fn subgraph_weight(&self, s: &[usize]) -> Result<f64> {
        let (mask, _) = self.membership(s)?;
        Ok(self.weight_of_mask(&mask))
    }

    pub(crate) fn weight_of_mask(&self, mask: &[bool]) -> f64 {
        2.0 * self
            .edges
            .iter()
            .zip(&self.weights)
            .filter(|(&(i, j), _)| mask[i] && mask[j])
            .map(|(_, &w)| w)
            .sum::<f64>()
    }

    /// `1_S^T W 1_S / (k (k - 1))`; 1.0 for an unweighted clique.
    pub fn edge_density(&self, s: &[usize]) -> Result<f64> {
        let (mask, k) = self.membership(s)?;
        if k < 2 {
            return Err(DksError::domain(format!(
                "edge density needs at least 2 vertices, got {k}"
            )));
        }
        Ok(self.weight_of_mask(&mask) / (k * (k - 1)) as f64)
    }

    /// Connected components as lists of vertex ids; each list is sorted and
    /// the lists are ordered by their smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for root in 0..self.n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            stack.push(root);
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for (u, _) in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced by `vertices` (sorted, distinct), relabeled densely in
    /// the given order. Labels are carried over.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Graph> {
        if vertices.is_empty() {
            return Err(DksError::domain("induced subgraph of an empty vertex set"));
        }
        let mut index = vec![usize::MAX; self.n];
        for (new, &old) in vertices.iter().enumerate() {
            if old >= self.n {
                return Err(DksError::domain(format!("vertex {old} out of range")));
            }
            if index[old] != usize::MAX {
                return Err(DksError::domain(format!("vertex {old} repeated")));
            }
            index[old] = new;
        }
        let mut pairs: Vec<((usize, usize), f64)> = self
            .edges
            .iter()
            .zip(&self.weights)
            .filter(|(&(i, j), _)| index[i] != usize::MAX && index[j] != usize::MAX)
            .map(|(&(i, j), &w)| {
                let (a, b) = (index[i], index[j]);
                ((a.min(b), a.max(b)), w)
            })
            .collect();
        pairs.sort_by_key(|p| p.0);
        let (edges, weights) = pairs.into_iter().unzip();
        let labels = vertices.iter().map(|&v| self.labels[v]).collect();
        Ok(Graph::from_sorted(vertices.len(), edges, weights, labels))
    }

    /// The largest connected component; ties go to the component holding the
    /// smallest vertex id.
    pub fn largest_component(&self) -> Graph {
        let comps = self.components();
        let best = comps
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.induced_subgraph(&comps[best])
            .expect("component ids are valid and distinct")
    }
}

/// A set of `k` distinct vertices with its cached subgraph weight and density.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    members: Vec<usize>,
    subgraph_weight: f64,
    density: f64,
}

impl VertexSet {
    /// Sorts `members`; rejects duplicates, out-of-range ids and sets of
    /// fewer than two vertices.
    pub fn new(g: &Graph, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(DksError::domain("vertex set contains duplicates"));
        }
        let subgraph_weight = g.subgraph_weight(&members)?;
        let density = g.edge_density(&members)?;
        Ok(VertexSet {
            members,
            subgraph_weight,
            density,
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn subgraph_weight(&self) -> f64 {
        self.subgraph_weight
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Indicator vector of length `n`.
    pub fn indicator(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for &v in &self.members {
            x[v] = 1.0;
        }
        x
    }

    /// Members translated to the graph's original ids.
    pub fn original_ids(&self, g: &Graph) -> Vec<u64> {
        self.members.iter().map(|&v| g.label(v)).collect()
    }
}
