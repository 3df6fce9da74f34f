//! Test-only reference implementations and data generators.
//!
//! Nothing here calls into the library's numeric code: similarities,
//! thresholds, graphs and PageRank are recomputed from their textbook
//! definitions with dense matrices and plain loops.

#![allow(dead_code)]

use frane::{DataMatrix, SimilarityMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DataMatrix {
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect();
    DataMatrix::from_rows(&rows).unwrap()
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Layout of the two-group synthetic dataset.
pub struct GroupData {
    pub data: DataMatrix,
    /// Column of the least-noisy member of each group.
    pub representatives: [usize; 2],
    pub noise: Vec<usize>,
}

/// `m x 12`: two groups of four features driven by a shared latent signal,
/// plus four independent noise columns. Each group's representative is the
/// latent signal with the smallest added noise.
pub fn group_dataset(seed: u64, m: usize) -> GroupData {
    let mut r = rng(seed);
    let group_noise = [0.15, 0.6, 0.7, 0.8];
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let za = normal(&mut r);
        let zb = normal(&mut r);
        let mut row = Vec::with_capacity(12);
        for &s in &group_noise {
            row.push(za + s * normal(&mut r));
        }
        for &s in &group_noise {
            row.push(zb + s * normal(&mut r));
        }
        for _ in 0..4 {
            row.push(normal(&mut r));
        }
        rows.push(row);
    }
    GroupData {
        data: DataMatrix::from_rows(&rows).unwrap(),
        representatives: [0, 4],
        noise: vec![8, 9, 10, 11],
    }
}

fn column(data: &DataMatrix, j: usize) -> Vec<f64> {
    (0..data.m()).map(|i| data.get(i, j)).collect()
}

/// Dense `n x n` similarity by the defining double loop.
pub fn naive_similarity(data: &DataMatrix, measure: SimilarityMeasure) -> Vec<Vec<f64>> {
    let n = data.n();
    let m = data.m() as f64;
    let cols: Vec<Vec<f64>> = (0..n).map(|j| column(data, j)).collect();
    match measure {
        SimilarityMeasure::Pearson => {
            let mut w = vec![vec![0.0; n]; n];
            for j in 0..n {
                for k in 0..n {
                    let (a, b) = (&cols[j], &cols[k]);
                    let ma = a.iter().sum::<f64>() / m;
                    let mb = b.iter().sum::<f64>() / m;
                    let mut cov = 0.0;
                    let mut va = 0.0;
                    let mut vb = 0.0;
                    for i in 0..a.len() {
                        cov += (a[i] - ma) * (b[i] - mb);
                        va += (a[i] - ma) * (a[i] - ma);
                        vb += (b[i] - mb) * (b[i] - mb);
                    }
                    let constant = |v: &[f64]| v.iter().all(|&x| x == v[0]);
                    let corr = if constant(a) || constant(b) {
                        0.0
                    } else {
                        (cov / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0)
                    };
                    w[j][k] = corr + 1.0;
                }
            }
            w
        }
        other => {
            let mut d = vec![vec![0.0; n]; n];
            for j in 0..n {
                for k in 0..n {
                    if j == k {
                        continue;
                    }
                    let (a, b) = (&cols[j], &cols[k]);
                    let mut acc = 0.0f64;
                    for i in 0..a.len() {
                        let diff = (b[i] - a[i]).abs();
                        acc = match other {
                            SimilarityMeasure::Canberra => {
                                let den = a[i].abs() + b[i].abs();
                                acc + if den == 0.0 { 0.0 } else { diff / den }
                            }
                            SimilarityMeasure::Chebyshev => acc.max(diff),
                            SimilarityMeasure::Manhattan => acc + diff,
                            SimilarityMeasure::Euclidean => acc + diff * diff,
                            SimilarityMeasure::Pearson => unreachable!(),
                        };
                    }
                    d[j][k] = if other == SimilarityMeasure::Euclidean { acc.sqrt() } else { acc };
                }
            }
            let top = (0..n)
                .flat_map(|j| (0..n).filter(move |&k| k != j).map(move |k| (j, k)))
                .map(|(j, k)| d[j][k])
                .fold(f64::MIN, f64::max);
            (0..n).map(|j| (0..n).map(|k| top - d[j][k]).collect()).collect()
        }
    }
}

/// Geometric thresholds straight from their closed form; the last one is
/// `min(W')` (where the closed form lands at `M' - max(D)`).
pub fn naive_geometric(w: &[Vec<f64>], count: usize) -> Vec<f64> {
    let n = w.len();
    let mut offdiag = Vec::new();
    for j in 0..n {
        for k in 0..n {
            if j < k {
                offdiag.push(w[j][k]);
            }
        }
    }
    let top = offdiag.iter().copied().fold(f64::MIN, f64::max);
    let bottom = offdiag.iter().copied().fold(f64::MAX, f64::min);
    let dissim: Vec<f64> = offdiag.iter().filter(|&&x| x < top).map(|&x| top - x).collect();
    if dissim.is_empty() {
        return vec![top];
    }
    let lo = dissim.iter().copied().fold(f64::MAX, f64::min);
    let hi = dissim.iter().copied().fold(f64::MIN, f64::max);
    (1..=count)
        .map(|i| {
            if i == count {
                bottom
            } else {
                top - lo * (hi / lo).powf((i - 1) as f64 / (count - 1) as f64)
            }
        })
        .collect()
}

/// Stationary vector of `damping * P + (1 - damping) / n` by repeated
/// application of the dense Google matrix, until the L1 change is below `tol`.
pub fn dense_pagerank(adj: &[Vec<f64>], damping: f64, tol: f64) -> Vec<f64> {
    let n = adj.len();
    let nf = n as f64;
    let degree: Vec<f64> = adj.iter().map(|row| row.iter().sum()).collect();
    // google[j][k]: probability of stepping from k to j.
    let mut google = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in 0..n {
            let walk = if degree[k] > 0.0 { adj[k][j] / degree[k] } else { 1.0 / nf };
            google[j][k] = damping * walk + (1.0 - damping) / nf;
        }
    }
    let mut p = vec![1.0 / nf; n];
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|k| google[j][k] * p[k]).sum())
            .collect();
        let change: f64 = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        p = next;
        if change < tol {
            break;
        }
    }
    p
}

/// Dense adjacency of the graph keeping off-diagonal weights `>= t`.
pub fn threshold_adjacency(w: &[Vec<f64>], t: f64) -> Vec<Vec<f64>> {
    let n = w.len();
    (0..n)
        .map(|j| (0..n).map(|k| if j != k && w[j][k] >= t { w[j][k] } else { 0.0 }).collect())
        .collect()
}

pub fn edge_count(w: &[Vec<f64>], t: f64) -> usize {
    let n = w.len();
    (0..n).map(|j| (j + 1..n).filter(|&k| w[j][k] >= t).count()).sum()
}

/// Second largest over second smallest.
pub fn naive_rqh(scores: &[f64]) -> f64 {
    let mut s = scores.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s[s.len() - 2] / s[1]
}

pub struct OracleResult {
    pub chosen_threshold: f64,
    /// Position of the chosen threshold in the distinct descending list.
    pub chosen_index: usize,
    pub importances: Vec<f64>,
    pub candidate_count: usize,
}

/// The whole ranking pipeline with no incremental state: every threshold
/// rebuilds its graph, PageRank is a dense eigen-iteration, and the best
/// spread is found by scanning all candidates.
pub fn naive_frane(
    data: &DataMatrix,
    measure: SimilarityMeasure,
    count: usize,
    min_avg_degree: f64,
    damping: f64,
) -> Option<OracleResult> {
    let w = naive_similarity(data, measure);
    let n = w.len();
    let mut thresholds = naive_geometric(&w, count);
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();

    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut candidates = 0;
    for (idx, &t) in thresholds.iter().enumerate() {
        if (edge_count(&w, t) as f64) / (n as f64) < min_avg_degree {
            continue;
        }
        candidates += 1;
        let scores = dense_pagerank(&threshold_adjacency(&w, t), damping, 1e-10);
        let q = naive_rqh(&scores);
        if best.as_ref().map_or(true, |(bq, _, _)| q > *bq) {
            best = Some((q, idx, scores));
        }
    }
    best.map(|(_, idx, scores)| OracleResult {
        chosen_threshold: thresholds[idx],
        chosen_index: idx,
        importances: scores,
        candidate_count: candidates,
    })
}

/// Indices by descending value, ties by index.
pub fn ordering(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    idx
}

/// Brute-force kNN reconstruction error for one train/test split.
pub fn naive_rmae(train: &DataMatrix, test: &DataMatrix, selected: &[usize], k: usize) -> f64 {
    let n = train.n();
    let mt = train.m() as f64;
    let sigma: Vec<f64> = (0..n)
        .map(|j| {
            let c = column(train, j);
            let mean = c.iter().sum::<f64>() / mt;
            (c.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / mt).sqrt()
        })
        .collect();
    let mut per_feature = vec![0.0; n];
    for t in 0..test.m() {
        let mut dists: Vec<(f64, usize)> = (0..train.m())
            .map(|r| {
                let d: f64 = selected.iter().map(|&j| (train.get(r, j) - test.get(t, j)).powi(2)).sum();
                (d.sqrt(), r)
            })
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let kk = k.min(train.m());
        for j in 0..n {
            let pred = dists[..kk].iter().map(|&(_, r)| train.get(r, j)).sum::<f64>() / kk as f64;
            per_feature[j] += (pred - test.get(t, j)).abs();
        }
    }
    let used: Vec<usize> = (0..n).filter(|&j| sigma[j] > 0.0).collect();
    used.iter().map(|&j| per_feature[j] / test.m() as f64 / sigma[j]).sum::<f64>() / used.len() as f64
}

/// Whether `order` ranks `reference` descending, treating values within
/// `tol` of each other as tied (in any order).
pub fn consistent_ordering(order: &[usize], reference: &[f64], tol: f64) -> bool {
    let mut seen = vec![false; reference.len()];
    for &j in order {
        if j >= reference.len() || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    order.len() == reference.len()
        && order.windows(2).all(|p| reference[p[0]] >= reference[p[1]] - tol)
}
