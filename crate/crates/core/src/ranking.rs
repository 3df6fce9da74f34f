//! The ranking pipeline: similarity matrix, threshold schedule, descending
//! graph sweep with PageRank at each qualifying threshold, and selection of
//! the candidate ranking with the largest score spread.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::DataMatrix;
use crate::error::{FraneError, Result};
use crate::graph::{build_edge_list, EdgeList, ThresholdGraph};
use crate::pagerank::{weighted_pagerank, ScoreVector, DEFAULT_DAMPING, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};
use crate::similarity::{compute_similarity, offdiag_stats, SimilarityMatrix, SimilarityMeasure};
use crate::thresholds::{build_schedule, Progression};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// Largest ranking-quality heuristic.
    Rqh,
    /// Seeded uniform draw among qualifying candidates.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FraneConfig {
    pub similarity: SimilarityMeasure,
    pub progression: Progression,
    /// Number of thresholds `I`.
    pub iterations: usize,
    /// Graphs with fewer undirected edges per node are skipped.
    pub min_avg_degree: f64,
    pub damping: f64,
    pub pagerank_tol: f64,
    pub pagerank_max_iter: usize,
    pub selection: Selection,
    pub seed: u64,
}

impl Default for FraneConfig {
    fn default() -> Self {
        Self {
            similarity: SimilarityMeasure::Pearson,
            progression: Progression::Geometric,
            iterations: 100,
            min_avg_degree: 1.0,
            damping: DEFAULT_DAMPING,
            pagerank_tol: DEFAULT_TOLERANCE,
            pagerank_max_iter: DEFAULT_MAX_ITER,
            selection: Selection::Rqh,
            seed: 0,
        }
    }
}

impl FraneConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FraneError::InvalidParameter(msg));
        if self.iterations < 2 {
            return bad(format!("iterations must be at least 2, got {}", self.iterations));
        }
        if !(self.min_avg_degree >= 0.0) || !self.min_avg_degree.is_finite() {
            return bad(format!("min average degree must be >= 0, got {}", self.min_avg_degree));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return bad(format!("damping must lie in (0, 1), got {}", self.damping));
        }
        if !(self.pagerank_tol > 0.0) || self.pagerank_max_iter == 0 {
            return bad("PageRank tolerance and iteration cap must be positive".into());
        }
        Ok(())
    }
}

/// One PageRank score vector from a graph that passed the degree gate.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingCandidate {
    pub threshold: f64,
    pub scores: ScoreVector,
    pub avg_degree: f64,
    pub rqh: f64,
    /// Position of `threshold` in the descending, deduplicated sweep.
    pub schedule_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    pub feature_names: Vec<String>,
    pub importances: Vec<f64>,
    /// Feature indices by importance, descending; ties by ascending index.
    pub order: Vec<usize>,
    pub chosen_threshold: f64,
    pub chosen_rqh: f64,
    pub similarity: SimilarityMeasure,
    pub progression: Progression,
}

#[derive(Serialize)]
struct RankedEntry<'a> {
    rank: usize,
    feature: &'a str,
    importance: f64,
}

#[derive(Serialize)]
struct RankingDocument<'a> {
    similarity: SimilarityMeasure,
    progression: Progression,
    threshold: f64,
    rqh: f64,
    ranking: Vec<RankedEntry<'a>>,
}

impl FeatureRanking {
    pub fn new(
        feature_names: Vec<String>,
        importances: Vec<f64>,
        chosen_threshold: f64,
        chosen_rqh: f64,
        similarity: SimilarityMeasure,
        progression: Progression,
    ) -> Self {
        let order = order_by_importance(&importances);
        Self {
            feature_names,
            importances,
            order,
            chosen_threshold,
            chosen_rqh,
            similarity,
            progression,
        }
    }

    /// The `count` most important feature indices.
    pub fn top(&self, count: usize) -> &[usize] {
        &self.order[..count.min(self.order.len())]
    }

    fn entries(&self) -> Vec<RankedEntry<'_>> {
        self.order
            .iter()
            .enumerate()
            .map(|(pos, &j)| RankedEntry {
                rank: pos + 1,
                feature: &self.feature_names[j],
                importance: self.importances[j],
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = RankingDocument {
            similarity: self.similarity,
            progression: self.progression,
            threshold: self.chosen_threshold,
            rqh: self.chosen_rqh,
            ranking: self.entries(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// `rank,feature,importance` rows in rank order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["rank", "feature", "importance"])?;
        for e in self.entries() {
            writer.write_record([e.rank.to_string(), e.feature.to_owned(), e.importance.to_string()])?;
        }
        writer.flush().map_err(|e| FraneError::io("<ranking output>", e))?;
        Ok(())
    }
}

/// Indices sorted by value descending, ties by ascending index.
pub fn order_by_importance(importances: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..importances.len()).collect();
    order.sort_by(|&a, &b| importances[b].total_cmp(&importances[a]).then(a.cmp(&b)));
    order
}

fn median_of_three(v: &[f64]) -> f64 {
    let mut t = [v[0], v[1], v[2]];
    t.sort_by(f64::total_cmp);
    t[1]
}

/// Ranking quality heuristic: median of the three largest scores over the
/// median of the three smallest.
pub fn rqh(scores: &[f64]) -> Result<f64> {
    let n = scores.len();
    if n < 3 {
        return Err(FraneError::TooFewFeatures(n));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(median_of_three(&sorted[n - 3..]) / median_of_three(&sorted[..3]))
}

/// Index of the chosen candidate.
pub fn select_best(candidates: &[RankingCandidate], selection: Selection, seed: u64) -> Result<usize> {
    if candidates.is_empty() {
        return Err(FraneError::NoCandidates);
    }
    let index = match selection {
        Selection::Rqh => {
            let mut best = 0;
            for (i, c) in candidates.iter().enumerate().skip(1) {
                let incumbent = &candidates[best];
                if c.rqh > incumbent.rqh
                    || (c.rqh == incumbent.rqh && c.schedule_index < incumbent.schedule_index)
                {
                    best = i;
                }
            }
            best
        }
        Selection::Random => ChaCha8Rng::seed_from_u64(seed).random_range(0..candidates.len()),
    };
    Ok(index)
}

/// Everything a ranking run produces.
#[derive(Debug, Clone)]
pub struct FraneRun {
    pub ranking: FeatureRanking,
    pub candidates: Vec<RankingCandidate>,
    /// Index into `candidates` of the selected ranking.
    pub chosen: usize,
    /// Sorted edges, so any candidate graph can be rebuilt or dumped.
    pub edges: EdgeList,
}

pub fn run_frane(data: &DataMatrix, config: &FraneConfig) -> Result<FraneRun> {
    config.validate()?;
    let similarity = compute_similarity(data, config.similarity);
    rank_from_similarity(&similarity, data.feature_names(), config)
}

/// Pipeline from a precomputed similarity matrix.
pub fn rank_from_similarity(
    similarity: &SimilarityMatrix,
    feature_names: &[String],
    config: &FraneConfig,
) -> Result<FraneRun> {
    config.validate()?;
    let n = similarity.n();
    if n < 3 {
        return Err(FraneError::TooFewFeatures(n));
    }
    if feature_names.len() != n {
        return Err(FraneError::Shape(format!(
            "{} names for {n} features",
            feature_names.len()
        )));
    }
    let stats = offdiag_stats(similarity)?;
    let schedule = build_schedule(&stats, config.progression, config.iterations)?;
    let edges = build_edge_list(similarity)?;

    let mut graph = ThresholdGraph::empty(n);
    let mut candidates: Vec<RankingCandidate> = Vec::new();
    for (schedule_index, threshold) in schedule.sweep_order().into_iter().enumerate() {
        let added = graph.advance(&edges, threshold)?;
        let avg_degree = graph.average_degree();
        if avg_degree < config.min_avg_degree {
            continue;
        }
        // An unchanged graph has the same PageRank vector.
        let scores = match candidates.last() {
            Some(prev) if added == 0 => prev.scores.clone(),
            _ => weighted_pagerank(&graph, config.damping, config.pagerank_tol, config.pagerank_max_iter)?,
        };
        let quality = rqh(&scores.scores)?;
        candidates.push(RankingCandidate {
            threshold,
            scores,
            avg_degree,
            rqh: quality,
            schedule_index,
        });
    }

    if candidates.is_empty() {
        return Err(FraneError::NoQualifyingGraph {
            min_avg_degree: config.min_avg_degree,
            n,
        });
    }
    let chosen = select_best(&candidates, config.selection, config.seed)?;
    let best = &candidates[chosen];
    let ranking = FeatureRanking::new(
        feature_names.to_vec(),
        best.scores.scores.clone(),
        best.threshold,
        best.rqh,
        similarity.measure(),
        config.progression,
    );
    Ok(FraneRun {
        ranking,
        candidates,
        chosen,
        edges,
    })
}
