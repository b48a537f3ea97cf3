//! `sts-embed`: generate Steiner triple systems and hypertrees, split and
//! embed trees, verify embeddings and run benchmark grids.
//!
//! Exit codes: 0 success, 1 embedding or verification failure, 2 usage or
//! parse error.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sts_embed::embed::{embed_hypertree, verify_embedding, EmbedError, PipelineConfig};
use sts_embed::hypertree::{random_hypertree, TreeShape};
use sts_embed::io;
use sts_embed::split::split_hypertree;
use sts_embed::sts::{construct, hill_climb_random, StsMethod, DEFAULT_HILL_CLIMB_STEPS};

#[derive(Parser)]
#[command(name = "sts-embed", version, about = "Embed hypertrees into Steiner triple systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Steiner triple system of order n.
    GenSts {
        n: usize,
        #[arg(value_enum)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a random hypertree with the given number of edges.
    GenTree {
        edges: usize,
        #[arg(long, default_value = "uniform-attach")]
        shape: TreeShape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the split plan of a tree for host order n.
    Split {
        tree: PathBuf,
        /// Host order the plan is sized for.
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed a tree into a system.
    Embed {
        sts: PathBuf,
        tree: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Embedding output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-stage telemetry CSV.
        #[arg(long)]
        telemetry: Option<PathBuf>,
        /// Add wall-clock columns to the telemetry.
        #[arg(long)]
        timing: bool,
    },
    /// Check an embedding file against a system and a tree.
    Verify {
        sts: PathBuf,
        tree: PathBuf,
        embedding: PathBuf,
    },
    /// Run embedding trials over a grid and write a CSV summary.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "63,99,255")]
        ns: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.25")]
        epss: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "uniform-attach,path-biased,star-biased")]
        shapes: Vec<TreeShape>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Tree size as a fraction of n, further capped by 1 - eps.
        #[arg(long, default_value_t = 0.75)]
        fill: f64,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Bose,
    Skolem,
    Hillclimb,
}

/// Pipeline knobs shared by the commands that split or embed.
#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    mu: f64,
    #[arg(long)]
    degree_threshold: Option<usize>,
    #[arg(long)]
    path_length: Option<usize>,
    #[arg(long, default_value_t = 20)]
    max_retries: usize,
    #[arg(long, default_value_t = 0.25)]
    tol_large: f64,
    #[arg(long, default_value_t = 0.5)]
    tol_small: f64,
}

impl RunArgs {
    fn config(&self) -> Result<PipelineConfig, Failure> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Failure::Usage(anyhow!("--eps must lie in (0, 1)")));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(Failure::Usage(anyhow!("--mu must lie in (0, 1)")));
        }
        if self.max_retries < 1 {
            return Err(Failure::Usage(anyhow!("--max-retries must be at least 1")));
        }
        if self.degree_threshold == Some(0) || self.path_length.is_some_and(|m| m < 2) {
            return Err(Failure::Usage(anyhow!("--degree-threshold must be positive and --path-length at least 2")));
        }
        Ok(PipelineConfig {
            eps: self.eps,
            mu: self.mu,
            degree_threshold: self.degree_threshold,
            path_length: self.path_length,
            max_retries: self.max_retries,
            tol_large: self.tol_large,
            tol_small: self.tol_small,
            ..PipelineConfig::default()
        })
    }
}

enum Failure {
    /// Exit 1.
    Embed(anyhow::Error),
    /// Exit 2.
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenSts { n, method, seed, out } => {
            let m = match method {
                Method::Bose => StsMethod::Bose,
                Method::Skolem => StsMethod::Skolem,
                Method::Hillclimb => StsMethod::HillClimb,
            };
            let g = construct(n, m, seed).map_err(|e| anyhow!("{e}"))?;
            emit(out.as_deref(), &io::write_sts(g.graph()))?;
        }
        Command::GenTree { edges, shape, seed, out } => {
            if edges == 0 {
                return Err(Failure::Usage(anyhow!("a tree needs at least one edge")));
            }
            emit(out.as_deref(), &io::write_hypertree(&random_hypertree(edges, seed, shape)))?;
        }
        Command::Split { tree, n, run, out } => {
            let t = io::read_hypertree(&read(&tree)?).with_context(|| tree.display().to_string())?;
            let cfg = run.config()?;
            let plan = split_hypertree(&t, &cfg.split_params(n));
            emit(out.as_deref(), &io::write_split_plan(&plan))?;
        }
        Command::Embed {
            sts,
            tree,
            run,
            out,
            telemetry,
            timing,
        } => {
            let g = io::read_sts(&read(&sts)?).with_context(|| sts.display().to_string())?;
            let t = io::read_hypertree(&read(&tree)?).with_context(|| tree.display().to_string())?;
            let cfg = run.config()?;
            match embed_hypertree(&g, &t, &cfg, run.seed) {
                Ok(outcome) => {
                    emit(out.as_deref(), &io::write_embedding(&outcome.embedding))?;
                    if let Some(p) = telemetry {
                        emit(Some(&p), &outcome.telemetry_csv(timing))?;
                    }
                    eprintln!(
                        "embedded {} vertices after {} retries; reservoir {}/{} used",
                        t.n(),
                        outcome.retries,
                        outcome.reservoir_used,
                        outcome.reservoir_total_budget
                    );
                }
                Err(EmbedError::Config(msg)) => return Err(Failure::Usage(anyhow!(msg))),
                Err(EmbedError::RetryBudgetExhausted { attempts, history }) => {
                    for h in &history {
                        eprintln!("attempt {}: {:?}", h.attempt, h.failure);
                    }
                    return Err(Failure::Embed(anyhow!("gave up after {attempts} attempts")));
                }
                Err(e) => return Err(Failure::Embed(anyhow!("{e}"))),
            }
        }
        Command::Verify { sts, tree, embedding } => {
            let g = io::read_sts(&read(&sts)?).with_context(|| sts.display().to_string())?;
            let t = io::read_hypertree(&read(&tree)?).with_context(|| tree.display().to_string())?;
            let phi = io::read_embedding(&read(&embedding)?, t.n(), g.n())
                .with_context(|| embedding.display().to_string())?;
            let report = verify_embedding(g.graph(), &t, &phi);
            if !report.is_valid() {
                return Err(Failure::Embed(anyhow!("invalid embedding: {report}")));
            }
            eprintln!("valid embedding of {} vertices", t.n());
        }
        Command::Bench {
            ns,
            epss,
            shapes,
            trials,
            fill,
            run,
            out,
        } => {
            if trials == 0 || !(fill > 0.0 && fill <= 1.0) {
                return Err(Failure::Usage(anyhow!("--trials must be positive and --fill in (0, 1]")));
            }
            let mut csv = String::from("n,eps,shape,trials,successes,mean_retries,mean_ms\n");
            for &n in &ns {
                let g = hill_climb_random(n, run.seed, DEFAULT_HILL_CLIMB_STEPS).map_err(|e| anyhow!("n = {n}: {e}"))?;
                for &eps in &epss {
                    let cfg = RunArgs { eps, ..run.clone() }.config()?;
                    for &shape in &shapes {
                        let frac = fill.min(1.0 - eps);
                        let edges = (((frac * n as f64).floor() as usize).saturating_sub(1) / 2).max(1);
                        let mut seeds = ChaCha8Rng::seed_from_u64(run.seed);
                        seeds.set_stream(n as u64 ^ ((shape as u64) << 32) ^ (eps.to_bits() << 8));
                        let jobs: Vec<(u64, u64)> = (0..trials).map(|_| (seeds.gen(), seeds.gen())).collect();
                        let results: Vec<(bool, usize, f64)> = jobs
                            .par_iter()
                            .map(|&(tree_seed, embed_seed)| {
                                let t = random_hypertree(edges, tree_seed, shape);
                                let clock = Instant::now();
                                let r = embed_hypertree(&g, &t, &cfg, embed_seed);
                                let ms = clock.elapsed().as_secs_f64() * 1e3;
                                match r {
                                    Ok(o) => {
                                        assert!(verify_embedding(g.graph(), &t, &o.embedding).is_valid());
                                        (true, o.retries, ms)
                                    }
                                    Err(_) => (false, cfg.max_retries, ms),
                                }
                            })
                            .collect();
                        let successes = results.iter().filter(|r| r.0).count();
                        let mean_retries = results.iter().map(|r| r.1 as f64).sum::<f64>() / trials as f64;
                        let mean_ms = results.iter().map(|r| r.2).sum::<f64>() / trials as f64;
                        csv.push_str(&format!(
                            "{n},{eps},{shape},{trials},{successes},{mean_retries:.3},{mean_ms:.3}\n"
                        ));
                    }
                }
            }
            emit(out.as_deref(), &csv)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Embed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
