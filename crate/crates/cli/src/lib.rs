//! Command-line frontend. [`run`] takes the full argument vector and returns
//! the process exit code: 0 on success, 1 on a usage error, 2 on a data error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use cloneguard::eval::{
    alpha_sweep, evaluate_with, inject_clone, write_sweep_csv, CloneInjectionSpec, ClusterReport, GroundTruth,
    InjectedClone, TRUTH_FILE,
};
use cloneguard::io::{load_graph, save_csv_dir, LoadOptions};
use cloneguard::{
    augment_by_alpha, run_mcl, weigh_graph, DetectionConfig, Detector, Error, GroundTruthOracle, MclParams, NodeId,
    SocialGraph, StochasticOracle, StopPolicy, VerificationOracle,
};

#[derive(Parser, Debug)]
#[command(name = "cloneguard", version, about = "Detect cloned profiles in a social graph")]
struct Cli {
    /// Worker threads for internal parallelism; results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a graph and print node, edge and degree statistics.
    Validate {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Augment and cluster a graph; prints the clusters as JSON.
    Cluster {
        input: PathBuf,
        #[command(flatten)]
        mcl: MclArgs,
        #[arg(long, default_value_t = 0.68, value_parser = non_negative)]
        alpha: f64,
        /// Write the per-iteration convergence trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the detection pipeline for one victim; prints the suspect report.
    Detect {
        input: PathBuf,
        #[arg(long)]
        victim: u64,
        #[command(flatten)]
        detection: DetectionArgs,
        /// Clone ids for the oracle; defaults to truth.json next to the input.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forge a clone of a victim and write the enlarged graph.
    Inject {
        input: PathBuf,
        #[arg(long)]
        victim: u64,
        /// JSON with the fractions, perturbations and seed of the clone.
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the seed in the injection file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect for a list of victims and count true and false positives.
    Eval {
        input: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// `all` for every victim in the truth file, or a comma-separated id list.
        #[arg(long, default_value = "all")]
        victims: String,
        #[command(flatten)]
        detection: DetectionArgs,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cluster once per alpha and tabulate K, cluster sizes and similarity rates.
    Sweep {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true, value_parser = non_negative)]
        alphas: Vec<f64>,
        #[command(flatten)]
        mcl: MclArgs,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the interaction weight of every friendship as CSV.
    Weights {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    /// Flag checks that clap cannot express; failures are usage errors.
    fn check(&self) -> Result<(), String> {
        let result = match self {
            Command::Cluster { mcl, .. } | Command::Sweep { mcl, .. } => mcl.params().validate(),
            Command::Detect { detection, .. } | Command::Eval { detection, .. } => detection.config().validate(),
            _ => Ok(()),
        };
        result.map_err(|e| e.to_string())
    }
}

#[derive(Args, Debug)]
struct MclArgs {
    #[arg(long, default_value_t = 2.0)]
    inflation: f64,
    #[arg(long, default_value_t = 1e-4)]
    prune: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
}

impl MclArgs {
    fn params(&self) -> MclParams {
        MclParams {
            inflation: self.inflation,
            prune_threshold: self.prune,
            max_iterations: self.max_iter,
            ..MclParams::default()
        }
    }
}

#[derive(Args, Debug)]
struct DetectionArgs {
    #[arg(long, default_value_t = 0.68, value_parser = non_negative)]
    alpha: f64,
    #[arg(long, default_value_t = 0.75)]
    name_threshold: f64,
    /// `ground-truth`, or `stochastic:TP,FP` with flag probabilities for clones
    /// and genuine profiles.
    #[arg(long, value_parser = parse_oracle)]
    oracle: Option<OracleKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Stop::Exhaustive)]
    stop: Stop,
    #[command(flatten)]
    mcl: MclArgs,
}

impl DetectionArgs {
    fn config(&self) -> DetectionConfig {
        DetectionConfig {
            alpha: self.alpha,
            mcl: self.mcl.params(),
            name_threshold: self.name_threshold,
            stop_policy: match self.stop {
                Stop::Exhaustive => StopPolicy::Exhaustive,
                Stop::FirstHit => StopPolicy::FirstHit,
            },
            ..DetectionConfig::default()
        }
    }

    fn oracle(&self, default: OracleKind, truth: &GroundTruth) -> Box<dyn VerificationOracle> {
        match self.oracle.unwrap_or(default) {
            OracleKind::GroundTruth => Box::new(GroundTruthOracle::new(truth.ids())),
            OracleKind::Stochastic { tp, fp } => {
                Box::new(StochasticOracle::new(truth.ids(), self.seed).with_rates(tp, fp))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Stop {
    Exhaustive,
    FirstHit,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum OracleKind {
    GroundTruth,
    Stochastic { tp: f64, fp: f64 },
}

fn probability(text: &str) -> Result<f64, String> {
    let p: f64 = text.trim().parse().map_err(|_| format!("`{text}` is not a number"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("{p} is not a probability"))
    }
}

fn parse_oracle(text: &str) -> Result<OracleKind, String> {
    if text == "ground-truth" {
        return Ok(OracleKind::GroundTruth);
    }
    let rates = text
        .strip_prefix("stochastic:")
        .ok_or_else(|| format!("unknown oracle `{text}`; expected ground-truth or stochastic:TP,FP"))?;
    let (tp, fp) = rates
        .split_once(',')
        .ok_or_else(|| "stochastic oracle needs two rates, e.g. stochastic:0.9,0.1".to_string())?;
    Ok(OracleKind::Stochastic {
        tp: probability(tp)?,
        fp: probability(fp)?,
    })
}

fn non_negative(text: &str) -> Result<f64, String> {
    match text.trim().parse::<f64>() {
        Ok(x) if x >= 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{text}` is not a non-negative number")),
    }
}

/// Failure after argument parsing; exit code 2.
#[derive(Debug)]
struct DataError(String);

impl From<Error> for DataError {
    fn from(e: Error) -> Self {
        DataError(e.to_string())
    }
}

impl From<io::Error> for DataError {
    fn from(e: io::Error) -> Self {
        DataError(e.to_string())
    }
}

impl From<serde_json::Error> for DataError {
    fn from(e: serde_json::Error) -> Self {
        DataError(e.to_string())
    }
}

type Outcome = Result<(), DataError>;

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    if let Err(message) = cli.command.check() {
        let _ = writeln!(stderr, "error: {message}");
        return 1;
    }
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, stdout, stderr)),
            Err(e) => Err(DataError(e.to_string())),
        },
        None => dispatch(cli.command, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(DataError(message)) => {
            let _ = writeln!(stderr, "error: {message}");
            2
        }
    }
}

fn load(path: &Path) -> Result<SocialGraph, DataError> {
    Ok(load_graph(path, &LoadOptions::default())?)
}

/// Writes `bytes` to `out` if given, to stdout otherwise.
fn emit(bytes: &[u8], out: Option<&Path>, stdout: &mut dyn Write) -> Outcome {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| DataError(format!("{}: {e}", path.display()))),
        None => Ok(stdout.write_all(bytes)?),
    }
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, DataError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn truth_for(input: &Path, explicit: Option<&Path>, stderr: &mut dyn Write) -> Result<GroundTruth, DataError> {
    if let Some(path) = explicit {
        return Ok(GroundTruth::load(path)?);
    }
    let dir = if input.is_dir() {
        input
    } else {
        input.parent().unwrap_or(Path::new("."))
    };
    let path = dir.join(TRUTH_FILE);
    if path.exists() {
        Ok(GroundTruth::load(&path)?)
    } else {
        writeln!(stderr, "note: no {TRUTH_FILE} found; every suspect counts as genuine")?;
        Ok(GroundTruth::default())
    }
}

fn parse_victims(text: &str, truth: &GroundTruth) -> Result<Vec<NodeId>, DataError> {
    if text == "all" {
        return Ok(truth.victims());
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map(NodeId)
                .map_err(|_| DataError(format!("`{t}` is not a node id")))
        })
        .collect()
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { input, json } => {
            let report = load(&input)?.validate();
            if json {
                emit(&json_bytes(&report)?, None, stdout)
            } else {
                emit(report.to_string().as_bytes(), None, stdout)
            }
        }
        Command::Cluster {
            input,
            mcl,
            alpha,
            trace,
            out,
        } => {
            let graph = load(&input)?;
            let w = augment_by_alpha(&graph, alpha, Default::default())?;
            let clustering = run_mcl(&w, &mcl.params())?;
            if let Some(path) = trace {
                let mut bytes = Vec::new();
                cloneguard::mcl::write_trace_csv(&clustering.trace, &mut bytes)?;
                emit(&bytes, Some(&path), stdout)?;
            }
            let report = ClusterReport::new(&graph, alpha, &clustering);
            emit(&json_bytes(&report)?, out.as_deref(), stdout)
        }
        Command::Detect {
            input,
            victim,
            detection,
            truth,
            out,
        } => {
            let graph = load(&input)?;
            let truth = truth_for(&input, truth.as_deref(), stderr)?;
            writeln!(stderr, "seed: {}", detection.seed)?;
            let oracle = detection.oracle(OracleKind::GroundTruth, &truth);
            let report = cloneguard::detect(&graph, NodeId(victim), &detection.config(), oracle.as_ref())?;
            emit(&json_bytes(&report)?, out.as_deref(), stdout)
        }
        Command::Inject {
            input,
            victim,
            spec,
            seed,
            out,
        } => {
            let graph = load(&input)?;
            let text = fs::read_to_string(&spec).map_err(|e| DataError(format!("{}: {e}", spec.display())))?;
            let mut value: serde_json::Value = serde_json::from_str(&text)?;
            let object = value
                .as_object_mut()
                .ok_or_else(|| DataError(format!("{}: expected a JSON object", spec.display())))?;
            object.insert("victim".into(), victim.into());
            if let Some(seed) = seed {
                object.insert("seed".into(), seed.into());
            }
            object.entry("seed").or_insert(0.into());
            let spec: CloneInjectionSpec = serde_json::from_value(value)?;
            writeln!(stderr, "seed: {}", spec.seed)?;
            let (enlarged, clone) = inject_clone(&graph, &spec)?;
            fs::create_dir_all(&out).map_err(|e| DataError(format!("{}: {e}", out.display())))?;
            save_csv_dir(&enlarged, &out)?;
            let mut truth = truth_for(&input, None, &mut io::sink())?;
            truth.clones.push(InjectedClone {
                id: clone,
                victim: spec.victim,
            });
            truth.save(out.join(TRUTH_FILE))?;
            writeln!(stdout, "{clone}")?;
            Ok(())
        }
        Command::Eval {
            input,
            truth,
            victims,
            detection,
            format,
            out,
        } => {
            let graph = load(&input)?;
            let truth = GroundTruth::load(&truth)?;
            let victims = parse_victims(&victims, &truth)?;
            writeln!(stderr, "seed: {}", detection.seed)?;
            let default = OracleKind::Stochastic {
                tp: StochasticOracle::DEFAULT_CLONE_RATE,
                fp: StochasticOracle::DEFAULT_FALSE_ALARM_RATE,
            };
            let oracle = detection.oracle(default, &truth);
            let detector = Detector::new(&graph, detection.config())?;
            let report = evaluate_with(&detector, &truth.ids(), &victims, oracle.as_ref())?;
            let bytes = match format {
                TableFormat::Json => json_bytes(&report)?,
                TableFormat::Csv => {
                    let mut bytes = Vec::new();
                    report.write_csv(&mut bytes)?;
                    bytes
                }
            };
            emit(&bytes, out.as_deref(), stdout)
        }
        Command::Sweep {
            input,
            alphas,
            mcl,
            format,
            out,
        } => {
            let graph = load(&input)?;
            let rows = alpha_sweep(&graph, &alphas, &mcl.params())?;
            let bytes = match format {
                TableFormat::Json => json_bytes(&rows)?,
                TableFormat::Csv => {
                    let mut bytes = Vec::new();
                    write_sweep_csv(&rows, &mut bytes)?;
                    bytes
                }
            };
            emit(&bytes, out.as_deref(), stdout)
        }
        Command::Weights { input, out } => {
            let graph = load(&input)?;
            let mut bytes = Vec::new();
            weigh_graph(&graph).write_csv(&graph, &mut bytes)?;
            emit(&bytes, out.as_deref(), stdout)
        }
    }
}
