//! Weighted PageRank on undirected threshold graphs.
//!
//! A walker at node `k` moves to neighbour `j` with probability
//! `w(k, j) / weighted_degree(k)`. Nodes with zero weighted degree are
//! dangling and spread their mass uniformly. With probability `1 - damping`
//! the walker teleports to a uniformly random node.

use crate::error::{FraneError, Result};
use crate::graph::ThresholdGraph;

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
    pub damping: f64,
    pub iterations: usize,
    /// L1 change of the last iteration.
    pub delta: f64,
    pub converged: bool,
}

impl ScoreVector {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.scores.iter().sum()
    }
}

/// Power iteration from the uniform vector until the L1 change drops below
/// `tol` or `max_iter` iterations have run. Hitting the cap is not an error;
/// `converged` reports it.
pub fn weighted_pagerank(
    graph: &ThresholdGraph,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<ScoreVector> {
    if !(damping > 0.0 && damping < 1.0) {
        return Err(FraneError::InvalidParameter(format!(
            "damping must lie in (0, 1), got {damping}"
        )));
    }
    if !(tol > 0.0) {
        return Err(FraneError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let n = graph.n();
    if n == 0 {
        return Err(FraneError::InvalidParameter("PageRank on an empty graph".into()));
    }
    let nf = n as f64;
    let degree = graph.weighted_degree();
    let adjacency = graph.adjacency();
    let teleport = (1.0 - damping) / nf;

    let mut scores = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut share = vec![0.0; n];
    let mut delta = f64::INFINITY;
    let mut iterations = 0;

    while iterations < max_iter {
        let mut dangling = 0.0;
        for k in 0..n {
            if degree[k] > 0.0 {
                share[k] = scores[k] / degree[k];
            } else {
                share[k] = 0.0;
                dangling += scores[k];
            }
        }
        let base = teleport + damping * dangling / nf;
        for (j, neighbours) in adjacency.iter().enumerate() {
            let inflow: f64 = neighbours.iter().map(|&(k, w)| w * share[k]).sum();
            next[j] = base + damping * inflow;
        }
        delta = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut scores, &mut next);
        iterations += 1;
        if delta < tol {
            break;
        }
    }

    Ok(ScoreVector {
        scores,
        damping,
        iterations,
        delta,
        converged: delta < tol,
    })
}
