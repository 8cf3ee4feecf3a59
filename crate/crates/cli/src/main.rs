//! Command-line front end: prove, verify, random search, benchmarks and
//! stable-set bounds.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use krivine::agent::{save_model, ModelMeta};
use krivine::certificate::{render_proof, verify_for, Certificate};
use krivine::poly::parse_rational;
use krivine::problem::{benchmark, bundled_benchmarks, Problem};
use krivine::prover::{
    bench, prove, random_search, timed, BenchReport, ConfigPatch, ProveOutcome, RandomSummary, RunConfig, Status,
};
use krivine::stableset::parse_graph;

#[derive(Parser)]
#[command(name = "krivine", version, about = "Certified polynomial inequalities on boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a search policy on a problem and emit a verified certificate.
    Prove {
        /// Problem file, or a bundled benchmark name such as `C1`.
        problem: String,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: ProveOutputs,
    },
    /// Check a certificate against a problem.
    Verify {
        certificate: PathBuf,
        /// Problem file, bundled benchmark name, or graph file with `--bound`.
        problem: String,
        /// Treat PROBLEM as a graph and check the stable-set bound.
        #[arg(long)]
        bound: Option<String>,
    },
    /// Uniformly random action selection, for comparison.
    RandomSearch {
        problem: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        run: RunArgs,
        /// One JSON line per trial.
        #[arg(long)]
        log_out: Option<PathBuf>,
        /// Machine-readable report.
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Prove every problem file in a directory (the bundled suite by default).
    Bench {
        suite: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        /// Also run this many random-search trials per problem.
        #[arg(long, default_value_t = 0)]
        random_trials: usize,
        #[arg(long)]
        cert_dir: Option<PathBuf>,
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Prove that a graph has no stable set larger than `--bound`.
    Stableset {
        graph: PathBuf,
        #[arg(long)]
        bound: u64,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: ProveOutputs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long, value_name = "W")]
    hidden: Option<usize>,
    #[arg(long, value_name = "L")]
    layers: Option<usize>,
    #[arg(long)]
    discount: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    capacity: Option<usize>,
    #[arg(long)]
    target_sync: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    eps_penalty: Option<f64>,
    #[arg(long)]
    lemma_degree_cap: Option<u32>,
}

#[derive(Args)]
struct ProveOutputs {
    #[arg(long)]
    model_out: Option<PathBuf>,
    #[arg(long)]
    cert_out: Option<PathBuf>,
    /// Proof listing; printed to stdout when absent.
    #[arg(long)]
    proof_out: Option<PathBuf>,
    /// One JSON line per training episode.
    #[arg(long)]
    log_out: Option<PathBuf>,
    /// One JSON line per step of the greedy rollout.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

/// Failures split by exit code.
enum Failure {
    /// Bad arguments or unreadable input: exit 2.
    Input(anyhow::Error),
    /// Anything that went wrong while running: exit 1.
    Run(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Run(e.into())
    }
}

fn input<T, E: Into<anyhow::Error>>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(e.into()))
}

impl RunArgs {
    fn patch(&self) -> ConfigPatch {
        ConfigPatch {
            seed: self.seed,
            max_steps: self.max_steps,
            episodes: self.episodes,
            hidden: self.hidden,
            layers: self.layers,
            discount: self.discount,
            lr: self.lr,
            batch: self.batch,
            capacity: self.capacity,
            target_sync: self.target_sync,
            eps_penalty: self.eps_penalty,
            lemma_degree_cap: self.lemma_degree_cap,
        }
    }

    fn base(&self) -> Result<RunConfig, Failure> {
        match &self.config {
            Some(path) => input(RunConfig::load(path).with_context(|| format!("config {}", path.display()))),
            None => Ok(RunConfig::default()),
        }
    }

    fn resolve(&self, problem: &Problem) -> Result<RunConfig, Failure> {
        input(self.base()?.resolve(&problem.overrides, &self.patch()))
    }
}

fn load_problem(arg: &str) -> Result<Problem, Failure> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(p) = benchmark(arg) {
            return Ok(p);
        }
    }
    input(Problem::load(path).with_context(|| format!("problem {arg}")))
}

fn load_graph_problem(path: &Path, bound: &str) -> Result<Problem, Failure> {
    let text = input(std::fs::read_to_string(path).with_context(|| format!("graph {}", path.display())))?;
    let graph = input(parse_graph(&text).with_context(|| format!("graph {}", path.display())))?;
    let bound = input(parse_rational(bound).context("bound"))?;
    Ok(Problem::stable_set(&graph_name(path), &graph, bound))
}

fn graph_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "graph".into(), |s| s.to_string_lossy().into_owned())
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_lines<T: serde::Serialize>(path: &Path, items: &[T]) -> anyhow::Result<()> {
    let mut w = create(path)?;
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn emit_outcome(problem: &Problem, out: &ProveOutcome, secs: f64, files: &ProveOutputs) -> anyhow::Result<ExitCode> {
    if let Some(path) = &files.model_out {
        save_model(&out.model, ModelMeta { nvars: problem.nvars(), seed: out.seed }, path)?;
    }
    if let Some(path) = &files.log_out {
        write_lines(path, &out.episodes)?;
    }
    if let Some(path) = &files.trace_out {
        write_lines(path, &out.rollout_trace)?;
    }
    let Some(cert) = out.certificate.as_ref().filter(|_| out.status == Status::Proved) else {
        println!(
            "{}: unknown after {} environment steps, best bound {:.6e} ({secs:.2} s)",
            problem.name, out.total_steps, out.best_gamma
        );
        return Ok(ExitCode::from(1));
    };
    println!(
        "{}: proved in {} steps, rollout {} steps, {} environment steps ({secs:.2} s)",
        problem.name,
        out.proof_steps.unwrap_or(0),
        out.rollout_steps,
        out.total_steps
    );
    if let Some(path) = &files.cert_out {
        std::fs::write(path, cert.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    let proof = render_proof(cert);
    match &files.proof_out {
        Some(path) => std::fs::write(path, proof).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{proof}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn problems_in(dir: &Path) -> Result<Vec<Problem>, Failure> {
    let mut paths: Vec<PathBuf> = input(std::fs::read_dir(dir).with_context(|| format!("suite {}", dir.display())))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    paths.iter().map(|p| input(Problem::load(p).with_context(|| format!("problem {}", p.display())))).collect()
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Prove { problem, run, out } => {
            let problem = load_problem(&problem)?;
            let config = run.resolve(&problem)?;
            let (result, secs) = timed(|| prove(&problem, &config));
            Ok(emit_outcome(&problem, &result?, secs, &out)?)
        }
        Command::Stableset { graph, bound, run, out } => {
            let problem = load_graph_problem(&graph, &bound.to_string())?;
            let config = run.resolve(&problem)?;
            let (result, secs) = timed(|| prove(&problem, &config));
            Ok(emit_outcome(&problem, &result?, secs, &out)?)
        }
        Command::Verify { certificate, problem, bound } => {
            let problem = match bound {
                Some(b) => load_graph_problem(Path::new(&problem), &b)?,
                None => load_problem(&problem)?,
            };
            let text = input(
                std::fs::read_to_string(&certificate).with_context(|| format!("certificate {}", certificate.display())),
            )?;
            let cert = input(Certificate::from_json(&text).with_context(|| format!("certificate {}", certificate.display())))?;
            match verify_for(&cert, &problem) {
                Ok(()) => {
                    println!("verified: {} ≥ 0 with bound {}", problem.name, krivine::poly::format_rational(&cert.gamma));
                    Ok(ExitCode::SUCCESS)
                }
                Err(r) => {
                    println!("rejected: {r}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::RandomSearch { problem, trials, run, log_out, report_out } => {
            if trials == 0 {
                return Err(Failure::Input(anyhow!("--trials must be at least 1")));
            }
            let problem = load_problem(&problem)?;
            let config = run.resolve(&problem)?;
            let report = random_search(&problem, &config, trials)?;
            if let Some(path) = &log_out {
                std::fs::write(path, report.trial_log()).with_context(|| format!("writing {}", path.display()))?;
            }
            let summary = BenchReport { rows: Vec::new(), random: vec![RandomSummary::from(&report)] };
            print!("{}", summary.render_table());
            if let Some(path) = &report_out {
                std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(if report.failures < trials { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bench { suite, run, random_trials, cert_dir, report_out } => {
            let problems = match &suite {
                Some(dir) => problems_in(dir)?,
                None => bundled_benchmarks(),
            };
            let base = run.base()?;
            input(base.clone().patched(&run.patch()).validate())?;
            if let Some(dir) = &cert_dir {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            let mut report = bench(&problems, &base, &run.patch(), cert_dir.as_deref());
            if random_trials > 0 {
                for p in &problems {
                    let config = run.resolve(p)?;
                    let r = random_search(p, &config, random_trials)?;
                    report.random.push(RandomSummary::from(&r));
                }
            }
            print!("{}", report.render_table());
            if let Some(path) = &report_out {
                std::fs::write(path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
            let all = report.rows.iter().all(|r| r.status == Status::Proved);
            Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
