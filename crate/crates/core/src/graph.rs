//! Thresholded attribute graphs built by one sweep over sorted edges.
//!
//! All `n(n-1)/2` feature pairs are sorted once by weight, highest first.
//! Lowering the threshold only ever activates a prefix of that list, so a
//! full sweep over any descending schedule touches every edge once.

use std::io::Write;

use crate::error::{FraneError, Result};
use crate::similarity::SimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub j: usize,
    pub k: usize,
    pub w: f64,
}

/// Every unordered pair `j < k`, sorted by weight descending and then by
/// `(j, k)` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    n: usize,
    edges: Vec<Edge>,
}

impl EdgeList {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edges with weight at least `threshold`, in list order.
    pub fn active_at(&self, threshold: f64) -> &[Edge] {
        let end = self.edges.partition_point(|e| e.w >= threshold);
        &self.edges[..end]
    }

    /// Writes the graph at `threshold` as `j k w` lines.
    pub fn dump_at<W: Write>(&self, threshold: f64, mut out: W) -> Result<()> {
        for e in self.active_at(threshold) {
            writeln!(out, "{} {} {}", e.j, e.k, e.w).map_err(|e| FraneError::io("<graph dump>", e))?;
        }
        Ok(())
    }
}

pub fn build_edge_list(w: &SimilarityMatrix) -> Result<EdgeList> {
    let n = w.n();
    if n < 2 {
        return Err(FraneError::InvalidParameter("graph needs at least 2 nodes".into()));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n {
        for k in j + 1..n {
            edges.push(Edge { j, k, w: w.get(j, k) });
        }
    }
    // Pairs were generated in (j, k) order, so a stable sort keeps the tie rule.
    edges.sort_by(|a, b| b.w.total_cmp(&a.w));
    Ok(EdgeList { n, edges })
}

/// Undirected weighted graph over `n` nodes holding the active edges.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGraph {
    n: usize,
    adjacency: Vec<Vec<(usize, f64)>>,
    weighted_degree: Vec<f64>,
    active_edges: usize,
    threshold: f64,
}

impl ThresholdGraph {
    /// Graph with no edges, ready to sweep `edges` downward.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adjacency: vec![Vec::new(); n],
            weighted_degree: vec![0.0; n],
            active_edges: 0,
            threshold: f64::INFINITY,
        }
    }

    /// Builds the graph at `threshold` directly, without a sweep.
    pub fn at_threshold(edges: &EdgeList, threshold: f64) -> Self {
        let mut g = Self::empty(edges.n());
        g.advance(edges, threshold)
            .expect("fresh graph accepts any threshold");
        g
    }

    /// Activates every edge with `w >= threshold` that is not yet active and
    /// returns how many were added. Thresholds must not increase between calls.
    pub fn advance(&mut self, edges: &EdgeList, threshold: f64) -> Result<usize> {
        if threshold > self.threshold || threshold.is_nan() {
            return Err(FraneError::ThresholdIncreased {
                requested: threshold,
                previous: self.threshold,
            });
        }
        debug_assert_eq!(edges.n(), self.n);
        self.threshold = threshold;
        let start = self.active_edges;
        let list = edges.edges();
        while self.active_edges < list.len() && list[self.active_edges].w >= threshold {
            let Edge { j, k, w } = list[self.active_edges];
            self.adjacency[j].push((k, w));
            self.adjacency[k].push((j, w));
            self.weighted_degree[j] += w;
            self.weighted_degree[k] += w;
            self.active_edges += 1;
        }
        Ok(self.active_edges - start)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn active_edge_count(&self) -> usize {
        self.active_edges
    }

    pub fn adjacency(&self) -> &[Vec<(usize, f64)>] {
        &self.adjacency
    }

    pub fn weighted_degree(&self) -> &[f64] {
        &self.weighted_degree
    }

    /// Threshold most recently applied (`+inf` before the first call).
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Undirected edges per node, each edge counted once.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.active_edges as f64 / self.n as f64
        }
    }

    /// Whether the edge list was exhausted (every pair active).
    pub fn is_complete(&self) -> bool {
        self.active_edges == self.n * (self.n - 1) / 2
    }
}
