//! Unsupervised feature ranking on attribute networks.
//!
//! Features become nodes of a weighted graph whose edges carry pairwise
//! feature similarities. Edges below a threshold are dropped, PageRank
//! scores the remaining graph, and among a schedule of thresholds the
//! ranking whose scores are most spread out is kept. The [`eval`] module
//! scores rankings by how well the top features reconstruct all others
//! with a k-nearest-neighbour model.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod ranking;
pub mod graph;
pub mod pagerank;
pub mod similarity;
pub mod thresholds;

pub use dataset::{load_csv, read_csv, split_folds, take_fold, DataMatrix, FoldSplit};
pub use error::{FraneError, Result};
pub use eval::{error_curve_points, evaluate_ranking, knn_reconstruct, rmae, EvalConfig, EvalReport};
pub use ranking::{rank_from_similarity, rqh, run_frane, select_best, FeatureRanking, FraneConfig, FraneRun, RankingCandidate, Selection};
pub use graph::{build_edge_list, Edge, EdgeList, ThresholdGraph};
pub use pagerank::{weighted_pagerank, ScoreVector};
pub use similarity::{
    compute_similarity, distance_similarity, offdiag_stats, pearson_similarity, OffDiagStats, SimilarityMatrix,
    SimilarityMeasure,
};
pub use thresholds::{build_schedule, geometric_schedule, linear_schedule, quantile_schedule, Progression, ThresholdSchedule};
