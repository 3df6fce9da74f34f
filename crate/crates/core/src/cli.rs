//! Command-line driver.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{load_csv, DataMatrix};
use crate::eval::{error_curve_points, evaluate_ranking, EvalConfig, EvalReport};
use crate::ranking::{rank_from_similarity, run_frane, FraneConfig, Selection};
use crate::similarity::{compute_similarity, SimilarityMatrix, SimilarityMeasure};
use crate::thresholds::Progression;

/// Flag misuse detected after parsing; the binary exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Parser)]
#[command(name = "frane", version, about = "Unsupervised feature ranking on attribute networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank the features of a CSV file.
    Rank(RankArgs),
    /// Cross-validated kNN reconstruction error of the ranking.
    Evaluate(EvaluateArgs),
    /// Reconstruction error for n' = 1, 2, 4, ..., n.
    Curve(CurveArgs),
    /// Evaluate every (similarity, progression) combination.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input CSV with a header row.
    #[arg(short, long)]
    pub input: PathBuf,

    /// Columns to drop before ranking, e.g. class labels.
    #[arg(long, value_delimiter = ',')]
    pub ignore_columns: Vec<String>,

    /// Worker threads (defaults to available parallelism). Output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    /// Write output here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankFlags {
    #[arg(long, value_enum, default_value_t = SimilarityMeasure::Pearson)]
    pub similarity: SimilarityMeasure,

    #[arg(long, value_enum, default_value_t = Progression::Geometric)]
    pub progression: Progression,

    /// Number of thresholds.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(2..))]
    pub iterations: u32,

    /// Skip graphs with fewer undirected edges per node than this.
    #[arg(long, default_value_t = 1.0)]
    pub min_avg_degree: f64,

    /// PageRank damping factor.
    #[arg(long, default_value_t = 0.85)]
    pub damping: f64,

    #[arg(long, value_enum, default_value_t = Selection::Rqh)]
    pub selection: Selection,

    /// Seed for fold shuffling and random candidate selection.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RankFlags {
    pub fn to_config(&self) -> Result<FraneConfig, UsageError> {
        let config = FraneConfig {
            similarity: self.similarity,
            progression: self.progression,
            iterations: self.iterations as usize,
            min_avg_degree: self.min_avg_degree,
            damping: self.damping,
            selection: self.selection,
            seed: self.seed,
            ..FraneConfig::default()
        };
        config.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub rank: RankFlags,

    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Write the chosen graph as `j k w` lines.
    #[arg(long)]
    pub dump_graph: Option<PathBuf>,

    /// Reuse the similarity matrix stored here, or store it if the file is missing.
    #[arg(long)]
    pub similarity_cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalFlags {
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(2..))]
    pub folds: u32,

    /// Neighbours in the reconstruction model.
    #[arg(short, long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub rank: RankFlags,
    #[command(flatten)]
    pub eval: EvalFlags,

    /// Numbers of top-ranked features to evaluate [default: 16, capped at n].
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..))]
    pub n_prime: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub rank: RankFlags,
    #[command(flatten)]
    pub eval: EvalFlags,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub rank: RankFlags,
    #[command(flatten)]
    pub eval: EvalFlags,

    /// Similarity measures to try [default: all].
    #[arg(long, value_enum, value_delimiter = ',')]
    pub similarities: Vec<SimilarityMeasure>,

    /// Threshold progressions to try [default: all].
    #[arg(long, value_enum, value_delimiter = ',')]
    pub progressions: Vec<Progression>,

    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..))]
    pub n_prime: Vec<u32>,
}

impl Command {
    fn input(&self) -> &InputArgs {
        match self {
            Command::Rank(a) => &a.input,
            Command::Evaluate(a) => &a.input,
            Command::Curve(a) => &a.input,
            Command::Sweep(a) => &a.input,
        }
    }
}

/// Runs a parsed command on a dedicated thread pool.
pub fn run(cli: Cli) -> anyhow::Result<()> {
    let threads = cli
        .command
        .input()
        .threads
        .map(usize::from)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("cannot start worker threads")?;
    pool.install(|| match &cli.command {
        Command::Rank(args) => cmd_rank(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Sweep(args) => cmd_sweep(args),
    })
}

fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(input: &InputArgs) -> anyhow::Result<DataMatrix> {
    Ok(load_csv(&input.input, &input.ignore_columns)?)
}

fn cached_similarity(data: &DataMatrix, measure: SimilarityMeasure, cache: &Path) -> anyhow::Result<SimilarityMatrix> {
    if cache.exists() {
        let file = File::open(cache).with_context(|| format!("cannot open {}", cache.display()))?;
        let w = SimilarityMatrix::read_cache(BufReader::new(file))?;
        if w.n() != data.n() || w.measure() != measure {
            anyhow::bail!(
                "similarity cache {} holds {} weights for {} features; need {} for {}",
                cache.display(),
                w.measure(),
                w.n(),
                measure,
                data.n()
            );
        }
        Ok(w)
    } else {
        let w = compute_similarity(data, measure);
        let file = File::create(cache).with_context(|| format!("cannot create {}", cache.display()))?;
        let mut out = BufWriter::new(file);
        w.write_cache(&mut out)?;
        out.flush()?;
        Ok(w)
    }
}

pub fn cmd_rank(args: &RankArgs) -> anyhow::Result<()> {
    let config = args.rank.to_config()?;
    let data = load(&args.input)?;
    let run = match &args.similarity_cache {
        Some(cache) => {
            let w = cached_similarity(&data, config.similarity, cache)?;
            rank_from_similarity(&w, data.feature_names(), &config)?
        }
        None => run_frane(&data, &config)?,
    };
    if let Some(path) = &args.dump_graph {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut out = BufWriter::new(file);
        run.edges.dump_at(run.ranking.chosen_threshold, &mut out)?;
        out.flush()?;
    }
    let mut out = open_output(args.input.output.as_deref())?;
    match args.format {
        OutputFormat::Json => writeln!(out, "{}", run.ranking.to_json()?)?,
        OutputFormat::Csv => run.ranking.write_csv(&mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn n_prime_list(requested: &[u32], n: usize) -> Result<Vec<usize>, UsageError> {
    if requested.is_empty() {
        return Ok(vec![16.min(n)]);
    }
    let list: Vec<usize> = requested.iter().map(|&p| p as usize).collect();
    if let Some(&bad) = list.iter().find(|&&p| p > n) {
        return Err(UsageError(format!("--n-prime {bad} exceeds the {n} available features")));
    }
    Ok(list)
}

fn evaluate(data: &DataMatrix, config: &FraneConfig, eval: &EvalFlags, n_primes: Vec<usize>) -> anyhow::Result<EvalReport> {
    let eval_config = EvalConfig {
        folds: eval.folds as usize,
        k_neighbors: eval.k as usize,
        n_prime_list: n_primes,
        seed: config.seed,
    };
    if data.m() < eval_config.folds {
        return Err(UsageError(format!("--folds {} exceeds the {} rows", eval_config.folds, data.m())).into());
    }
    let report = evaluate_ranking(data, |train| Ok(run_frane(train, config)?.ranking), &eval_config)?;
    let excluded: usize = report.excluded_features.iter().sum();
    if excluded > 0 {
        eprintln!("warning: {excluded} zero-variance feature/fold combinations left out of RMAE");
    }
    Ok(report)
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> anyhow::Result<()> {
    let config = args.rank.to_config()?;
    let data = load(&args.input)?;
    let n_primes = n_prime_list(&args.n_prime, data.n())?;
    let report = evaluate(&data, &config, &args.eval, n_primes)?;
    let mut out = open_output(args.input.output.as_deref())?;
    report.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

pub fn cmd_curve(args: &CurveArgs) -> anyhow::Result<()> {
    let config = args.rank.to_config()?;
    let data = load(&args.input)?;
    let report = evaluate(&data, &config, &args.eval, error_curve_points(data.n()))?;
    let mut out = csv::Writer::from_writer(open_output(args.input.output.as_deref())?);
    out.write_record(["n_prime", "mean_rmae"])?;
    for (p, v) in report.curve() {
        out.write_record([p.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let base = args.rank.to_config()?;
    let data = load(&args.input)?;
    let n_primes = n_prime_list(&args.n_prime, data.n())?;
    let similarities = if args.similarities.is_empty() {
        SimilarityMeasure::ALL.to_vec()
    } else {
        args.similarities.clone()
    };
    let progressions = if args.progressions.is_empty() {
        Progression::ALL.to_vec()
    } else {
        args.progressions.clone()
    };

    let mut out = csv::Writer::from_writer(open_output(args.input.output.as_deref())?);
    out.write_record(["similarity", "progression", "fold", "n_prime", "rmae"])?;
    for &similarity in &similarities {
        for &progression in &progressions {
            let config = FraneConfig {
                similarity,
                progression,
                ..base.clone()
            };
            let report = evaluate(&data, &config, &args.eval, n_primes.clone())
                .with_context(|| format!("{similarity}/{progression}"))?;
            for (fold, p, v) in report.rows() {
                out.write_record([
                    similarity.to_string(),
                    progression.to_string(),
                    fold,
                    p.to_string(),
                    v.to_string(),
                ])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
