mod names;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use ergoxeb::analytic::{
    gi_covariance, haar_covariance, haar_joint_moment, plogp_covariance, HaarMeanMode, MomentQuery,
};
use ergoxeb::ensembles::{
    design_moment_discrepancy, member_distribution, DesignCheckConfig, EnsembleSpec,
};
use ergoxeb::estimators::{
    deviation_of_ergodicity, fidelity_from_report, linear_xeb, log_xeb, ErgodicityReport,
    SchemeFunction, Verdict, DEFAULT_ALPHA,
};
use ergoxeb::formats::{read_probabilities, read_samples, write_probabilities, write_samples};
use ergoxeb::harness::{
    run_covariance_verification, run_ergodicity_scan, run_moment_scaling, run_normalized_de,
    CovarianceConfig, IngestPair, MomentScalingConfig, NormalizedDeConfig, NormalizedDeSource,
    ResultTable, ScanConfig,
};
use ergoxeb::noise::{sample_experimental, NoiseModel};
use ergoxeb::rng::derive_seed;
use ergoxeb::statevector::SystemDims;

use table::{Cell, Table};

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[cfg(debug_assertions)]
const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (debug build)");
#[cfg(not(debug_assertions))]
const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (release build)");

const THREADS_ENV: &str = "ERGOXEB_THREADS";

const NAMES_HELP: &str = "\
Schemes:   monomial<i> (i >= 1), normmonomial<i> (i >= 2), plogp, neglog, power<q> (q > 0)
Ensembles: haar, pauli, brickwork, fixed
Noise:     noiseless, depolarizing, completely-noisy, custom

Exit status: 0 success, 1 usage or I/O error, 2 violated verdict under --strict.
Set ERGOXEB_THREADS to fix the worker count.";

#[derive(Parser)]
#[command(
    name = "ergoxeb",
    version = VERSION,
    about = "Ergodicity-based cross-entropy benchmarking of random circuits",
    after_help = NAMES_HELP
)]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Also write CSV and JSON result files here.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Format printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Deviation of ergodicity over register sizes and circuit instances.
    Scan(ScanArgs),
    /// Linear and logarithmic XEB and deviation of ergodicity from files.
    Xeb(XebArgs),
    /// Analytic Haar moments and covariances.
    Oracle(OracleArgs),
    /// Monte-Carlo check of the first and second Haar moments.
    Moments(MomentsArgs),
    /// Monte-Carlo check of Haar covariances.
    Covariance(CovarianceArgs),
    /// Normalized deviation of ergodicity for several degrees.
    NormalizedDe(NormalizedDeArgs),
    /// Write the ideal probabilities and sampled bitstrings of one circuit.
    Simulate(SimulateArgs),
    /// Compare the t-th moment tensor of an ensemble against Haar.
    DesignCheck(DesignCheckArgs),
}

#[derive(Clone, Debug)]
struct QubitRange(Vec<u32>);

/// `a..b` (inclusive), `a..=b`, `a,b,c` or a single `n`.
fn parse_qubits(s: &str) -> Result<QubitRange, String> {
    let bad = || format!("invalid qubit range '{s}' (expected n, a..b or a,b,c)");
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    let values: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if values.is_empty() || values.contains(&0) {
        return Err(bad());
    }
    Ok(QubitRange(values))
}

fn parse_mode(s: &str) -> Result<HaarMeanMode, String> {
    s.parse().map_err(|e: ergoxeb::Error| e.to_string())
}

#[derive(Args)]
struct EnsembleArgs {
    /// Circuit ensemble: haar, pauli, brickwork or fixed.
    #[arg(long, default_value = "haar", value_parser = names::parse_ensemble)]
    ensemble: &'static str,

    /// Brickwork layer count (default 5n).
    #[arg(long)]
    depth: Option<u32>,

    /// JSON list of gate programs for the fixed ensemble.
    #[arg(long)]
    programs: Option<PathBuf>,
}

impl EnsembleArgs {
    fn spec(&self, n: u32, seed: u64) -> CliResult<EnsembleSpec> {
        if self.depth.is_some() && self.ensemble != "brickwork" {
            return Err("--depth applies only to the brickwork ensemble".into());
        }
        if self.programs.is_some() != (self.ensemble == "fixed") {
            return Err("--programs is required for, and only for, the fixed ensemble".into());
        }
        let dims = SystemDims::dense(n)?;
        Ok(match self.ensemble {
            "haar" => EnsembleSpec::haar(dims, seed),
            "pauli" => EnsembleSpec::pauli(dims),
            "brickwork" => EnsembleSpec::brickwork(dims, self.depth, seed)?,
            _ => EnsembleSpec::fixed(self.programs.as_deref().unwrap_or(Path::new("")))?,
        })
    }
}

#[derive(Args)]
struct NoiseArgs {
    /// Noise: noiseless, depolarizing, completely-noisy or custom.
    #[arg(long, default_value = "noiseless", value_parser = names::parse_noise)]
    noise: &'static str,

    /// Circuit fidelity F for depolarizing and custom noise.
    #[arg(long)]
    fidelity: Option<f64>,

    /// Quasiprobability file for custom noise: one value per line, in bitstring-index order.
    #[arg(long)]
    chi: Option<PathBuf>,
}

impl NoiseArgs {
    fn model(&self) -> CliResult<NoiseModel> {
        let needs_fidelity = matches!(self.noise, "depolarizing" | "custom");
        if needs_fidelity != self.fidelity.is_some() {
            return Err(if needs_fidelity {
                format!("--noise {} requires --fidelity", self.noise).into()
            } else {
                format!("--fidelity does not apply to --noise {}", self.noise).into()
            });
        }
        if self.chi.is_some() != (self.noise == "custom") {
            return Err("--chi is required for, and only for, custom noise".into());
        }
        let f = self.fidelity.unwrap_or(0.0);
        Ok(match self.noise {
            "noiseless" => NoiseModel::Noiseless,
            "depolarizing" => NoiseModel::depolarizing(f)?,
            "completely-noisy" => NoiseModel::CompletelyNoisy,
            _ => NoiseModel::custom(
                f,
                read_values(self.chi.as_deref().unwrap_or(Path::new("")))?,
            )?,
        })
    }
}

/// Numbers one per line; blank lines and `#` comments are skipped.
fn read_values(path: &Path) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        let v = s
            .parse::<f64>()
            .map_err(|_| format!("{}:{}: '{s}' is not a number", path.display(), i + 1))?;
        out.push(v);
    }
    Ok(out)
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,

    /// Register sizes: n, a..b or a,b,c.
    #[arg(long, value_parser = parse_qubits)]
    qubits: QubitRange,

    #[arg(long, default_value_t = 10)]
    instances: usize,

    /// Scheme function (see below).
    #[arg(long, default_value = "monomial2", value_parser = names::parse_scheme)]
    scheme: SchemeFunction,

    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,

    #[command(flatten)]
    noise: NoiseArgs,

    /// Bitstrings per instance; 0 evaluates the correlation exactly.
    #[arg(long, default_value_t = 0)]
    samples: usize,

    /// Law for the ensemble mean: exact or porter-thomas.
    #[arg(long, default_value = "exact", value_parser = parse_mode)]
    mean_mode: HaarMeanMode,

    /// Exit with status 2 if any instance violates the bound.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct XebArgs {
    /// Ideal probability file (`bitstring,probability` per line).
    #[arg(long)]
    probs: PathBuf,

    /// Sampled bitstrings, one per line.
    #[arg(long)]
    samples: PathBuf,

    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,

    #[arg(long, default_value = "exact", value_parser = parse_mode)]
    mean_mode: HaarMeanMode,

    /// Exit with status 2 if a deviation exceeds its threshold.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("quantity").required(true).multiple(false)))]
struct OracleArgs {
    /// E[P(x)^q1 P(y)^q2] (q2 = 0 gives E[P^q1]).
    #[arg(long, num_args = 3, value_names = ["Q1", "Q2", "N"], group = "quantity")]
    moment: Option<Vec<String>>,

    /// Cov(P(x)^q1, P(y)^q2), x != y.
    #[arg(long, num_args = 3, value_names = ["Q1", "Q2", "N"], group = "quantity")]
    covariance: Option<Vec<String>>,

    /// Cov(P ln P (x), P ln P (y)).
    #[arg(long, value_name = "N", group = "quantity")]
    plogp_cov: Option<u64>,

    /// Cov(g_i(x), g_i(y)) with g_i(p) = p (p^i - 1) / i.
    #[arg(long, num_args = 2, value_names = ["I", "N"], group = "quantity")]
    gi_cov: Option<Vec<String>>,

    /// Ensemble mean of a scheme function.
    #[arg(long, num_args = 2, value_names = ["SCHEME", "N"], group = "quantity")]
    haar_mean: Option<Vec<String>>,

    /// Standard deviation of a scheme function.
    #[arg(long, num_args = 2, value_names = ["SCHEME", "N"], group = "quantity")]
    sigma_f: Option<Vec<String>>,

    #[arg(long, default_value = "exact", value_parser = parse_mode)]
    mean_mode: HaarMeanMode,
}

#[derive(Args)]
struct MomentsArgs {
    /// Register sizes (at most 10 qubits).
    #[arg(long, value_parser = parse_qubits)]
    qubits: QubitRange,

    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Args)]
struct CovarianceArgs {
    /// Hilbert-space dimension N.
    #[arg(long)]
    dim: u64,

    /// Exponent pairs `q1:q2`, comma separated.
    #[arg(long, default_value = "1:1", value_delimiter = ',', value_parser = parse_pair)]
    grid: Vec<(f64, f64)>,

    /// Also check the p ln p covariance.
    #[arg(long)]
    plogp: bool,

    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let bad = || format!("invalid exponent pair '{s}' (expected q1:q2)");
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

#[derive(Args)]
struct NormalizedDeArgs {
    /// Register sizes to simulate (optional filter when ingesting).
    #[arg(long, value_parser = parse_qubits)]
    qubits: Option<QubitRange>,

    /// Monomial degrees, comma separated.
    #[arg(long, default_value = "2,3,4", value_delimiter = ',')]
    degrees: Vec<u32>,

    /// Simulated circuit instances per size.
    #[arg(long, default_value_t = 1)]
    instances: usize,

    /// Bitstrings per instance (when ingesting, 0 uses the whole file).
    #[arg(long, default_value_t = 0)]
    samples: usize,

    #[command(flatten)]
    ensemble: EnsembleArgs,

    #[command(flatten)]
    noise: NoiseArgs,

    /// Ideal probability files to ingest (paired in order with --bitstrings).
    #[arg(long)]
    probs: Vec<PathBuf>,

    /// Sample files to ingest.
    #[arg(long)]
    bitstrings: Vec<PathBuf>,

    #[arg(long, default_value = "exact", value_parser = parse_mode)]
    mean_mode: HaarMeanMode,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,

    #[arg(long)]
    qubits: u32,

    /// Ensemble member index.
    #[arg(long, default_value_t = 0)]
    instance: u64,

    #[command(flatten)]
    noise: NoiseArgs,

    #[arg(long)]
    samples: usize,

    /// Where to write the ideal probabilities.
    #[arg(long)]
    probs_out: PathBuf,

    /// Where to write the sampled bitstrings.
    #[arg(long)]
    samples_out: PathBuf,
}

#[derive(Args)]
struct DesignCheckArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,

    #[arg(long)]
    qubits: u32,

    /// Design order.
    #[arg(long, default_value_t = 2)]
    t: u32,

    /// Monte-Carlo draws for sampled sides.
    #[arg(long, default_value_t = 20_000)]
    mc_samples: u64,
}

struct Output {
    format: Format,
    out_dir: Option<PathBuf>,
}

impl Output {
    fn result<R: ResultTable>(&self, result: &R) -> CliResult<()> {
        match self.format {
            Format::Csv => print!("{}", result.to_csv()),
            Format::Json => print!("{}", result.to_json()?),
        }
        if let Some(dir) = &self.out_dir {
            let files = result.write(dir)?;
            eprintln!("wrote {} and {}", files.csv.display(), files.json.display());
        }
        Ok(())
    }

    fn table(&self, stem: &str, table: &Table) -> CliResult<()> {
        let (csv, json) = (table.to_csv(), table.to_json());
        match self.format {
            Format::Csv => print!("{csv}"),
            Format::Json => print!("{json}"),
        }
        if let Some(dir) = &self.out_dir {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{stem}.csv")), csv)?;
            std::fs::write(dir.join(format!("{stem}.json")), json)?;
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match configure_threads().and_then(|()| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads = v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    let out = Output {
        format: cli.format,
        out_dir: cli.out_dir,
    };
    let seed = cli.seed;
    match cli.command {
        Command::Scan(a) => cmd_scan(a, seed, &out),
        Command::Xeb(a) => cmd_xeb(a, &out),
        Command::Oracle(a) => cmd_oracle(a, &out).map(|()| ExitCode::SUCCESS),
        Command::Moments(a) => {
            let cfg = MomentScalingConfig {
                n_range: a.qubits.0,
                samples: a.samples,
                base_seed: seed,
            };
            out.result(&run_moment_scaling(&cfg)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Covariance(a) => {
            let cfg = CovarianceConfig {
                n_dim: a.dim,
                grid: a.grid,
                plogp: a.plogp,
                samples: a.samples,
                base_seed: seed,
            };
            out.result(&run_covariance_verification(&cfg)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::NormalizedDe(a) => cmd_normalized_de(a, seed, &out).map(|()| ExitCode::SUCCESS),
        Command::Simulate(a) => cmd_simulate(a, seed).map(|()| ExitCode::SUCCESS),
        Command::DesignCheck(a) => cmd_design_check(a, seed, &out).map(|()| ExitCode::SUCCESS),
    }
}

fn cmd_scan(a: ScanArgs, seed: u64, out: &Output) -> CliResult<ExitCode> {
    let spec = a.ensemble.spec(a.qubits.0[0], seed)?;
    let mut cfg = ScanConfig::new(spec, a.qubits.0, a.scheme);
    cfg.instances = a.instances;
    cfg.alpha = a.alpha;
    cfg.samples = a.samples;
    cfg.noise = a.noise.model()?;
    cfg.base_seed = seed;
    cfg.haar_mean_mode = a.mean_mode;
    let result = run_ergodicity_scan(&cfg)?;
    out.result(&result)?;
    for s in &result.summary {
        let f_hat = match (s.mean_f_hat, s.mean_f_hat_se) {
            (Some(f), Some(se)) => format!(", mean F_hat {f:.6} +/- {se:.2e}"),
            _ => String::new(),
        };
        eprintln!(
            "n={}: median deviation {:.4e} (sigma_f/sqrt(N) {:.4e}), {} of {} violated{f_hat}",
            s.n, s.median_deviation, s.reference_scale, s.violations, s.instances
        );
    }
    let violated = result.rows.iter().any(|r| r.verdict == Verdict::Violated);
    Ok(if a.strict && violated {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn report_row(name: &str, r: &ErgodicityReport) -> Vec<Cell> {
    let f_hat = fidelity_from_report(r).ok().map(|f| f.f_hat);
    vec![
        name.into(),
        r.estimate.value.into(),
        r.estimate.std_error.into(),
        r.haar_mean.into(),
        r.deviation.into(),
        r.threshold.into(),
        r.verdict.as_str().into(),
        f_hat.into(),
    ]
}

fn cmd_xeb(a: XebArgs, out: &Output) -> CliResult<ExitCode> {
    let table = read_probabilities(&a.probs)?;
    let samples = read_samples(&a.samples, Some(table.dims()))?;
    let linear = linear_xeb(&table, &samples)?;
    let log = log_xeb(&table, &samples)?;
    let m2 = deviation_of_ergodicity(
        &table,
        &samples,
        &SchemeFunction::Monomial(2),
        a.alpha,
        a.mean_mode,
    )?;
    let pl = deviation_of_ergodicity(
        &table,
        &samples,
        &SchemeFunction::PLogP,
        a.alpha,
        a.mean_mode,
    )?;
    let mut t = Table::new(&[
        "metric",
        "value",
        "std_error",
        "haar_mean",
        "deviation",
        "threshold",
        "verdict",
        "f_hat",
    ]);
    let plain = |name: &str, v: f64, se: f64| {
        vec![
            name.into(),
            v.into(),
            se.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]
    };
    t.push(plain("f_xeb", linear.f_hat, linear.std_error));
    t.push(plain("log_xeb", log.value, log.std_error));
    t.push(report_row("de_monomial2", &m2));
    t.push(report_row("de_plogp", &pl));
    out.table("xeb", &t)?;
    eprintln!(
        "n={} T={}: F_XEB = {:.6} +/- {:.2e}",
        table.dims().qubits(),
        samples.len(),
        linear.f_hat,
        linear.std_error
    );
    let violated = [m2.verdict, pl.verdict].contains(&Verdict::Violated);
    Ok(if a.strict && violated {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<T> {
    s.parse()
        .map_err(|_| format!("invalid {what} '{s}'").into())
}

fn cmd_oracle(a: OracleArgs, out: &Output) -> CliResult<()> {
    let (quantity, value) = if let Some(v) = &a.moment {
        let q = MomentQuery::new(num(&v[0], "q1")?, num(&v[1], "q2")?, num(&v[2], "N")?)?;
        ("moment", haar_joint_moment(&q)?)
    } else if let Some(v) = &a.covariance {
        let q = MomentQuery::new(num(&v[0], "q1")?, num(&v[1], "q2")?, num(&v[2], "N")?)?;
        ("covariance", haar_covariance(&q)?)
    } else if let Some(n) = a.plogp_cov {
        ("plogp_covariance", plogp_covariance(n)?)
    } else if let Some(v) = &a.gi_cov {
        (
            "gi_covariance",
            gi_covariance(num(&v[0], "i")?, num(&v[1], "N")?)?,
        )
    } else if let Some(v) = &a.haar_mean {
        let scheme = names::parse_scheme(&v[0])?;
        (
            "haar_mean",
            scheme.haar_mean(num(&v[1], "N")?, a.mean_mode)?,
        )
    } else if let Some(v) = &a.sigma_f {
        let scheme = names::parse_scheme(&v[0])?;
        ("sigma_f", scheme.sigma_f(num(&v[1], "N")?, a.mean_mode)?)
    } else {
        return Err("no oracle quantity requested".into());
    };
    match out.format {
        // Shortest representation that round-trips.
        Format::Csv => println!("{value:?}"),
        Format::Json => {
            let mut t = Table::new(&["quantity", "value"]);
            t.push(vec![quantity.into(), value.into()]);
            print!("{}", t.to_json());
        }
    }
    Ok(())
}

fn cmd_normalized_de(a: NormalizedDeArgs, seed: u64, out: &Output) -> CliResult<()> {
    let n_range = a.qubits.map(|q| q.0).unwrap_or_default();
    let source = if a.probs.is_empty() && a.bitstrings.is_empty() {
        let first = *n_range
            .first()
            .ok_or("--qubits is required when simulating")?;
        NormalizedDeSource::Simulate {
            ensemble: a.ensemble.spec(first, seed)?,
            noise: a.noise.model()?,
            instances: a.instances,
        }
    } else {
        if a.probs.len() != a.bitstrings.len() {
            return Err("--probs and --bitstrings must be given the same number of times".into());
        }
        NormalizedDeSource::Ingest {
            pairs: a
                .probs
                .into_iter()
                .zip(a.bitstrings)
                .map(|(probabilities, samples)| IngestPair {
                    probabilities,
                    samples,
                })
                .collect(),
        }
    };
    let cfg = NormalizedDeConfig {
        n_range,
        degrees: a.degrees,
        source,
        samples: a.samples,
        base_seed: seed,
        haar_mean_mode: a.mean_mode,
    };
    let result = run_normalized_de(&cfg)?;
    out.result(&result)?;
    for r in &result.rows {
        eprintln!(
            "n={} i={}: F_hat = {:.6} +/- {:.2e}",
            r.n, r.degree, r.f_hat, r.f_hat_se
        );
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs, seed: u64) -> CliResult<()> {
    let spec = a
        .ensemble
        .spec(a.qubits, seed)?
        .with_seed(derive_seed(seed, &[u64::from(a.qubits)]));
    let noise = a.noise.model()?;
    let p = member_distribution(&spec, a.instance)?;
    let sample_seed = derive_seed(seed, &[u64::from(a.qubits), a.instance, 1]);
    let samples = sample_experimental(&p, &noise, a.samples, sample_seed)?;
    write_probabilities(&a.probs_out, &p)?;
    write_samples(&a.samples_out, &samples)?;
    eprintln!(
        "wrote {} and {} ({} samples, {} noise)",
        a.probs_out.display(),
        a.samples_out.display(),
        samples.len(),
        noise.name()
    );
    Ok(())
}

fn cmd_design_check(a: DesignCheckArgs, seed: u64, out: &Output) -> CliResult<()> {
    let spec = a.ensemble.spec(a.qubits, seed)?;
    let cfg = DesignCheckConfig::new(a.t, a.mc_samples)?;
    let r = design_moment_discrepancy(&spec, &cfg)?;
    let mut t = Table::new(&[
        "ensemble",
        "n",
        "t",
        "discrepancy",
        "std_error",
        "z",
        "ensemble_members",
        "haar_exact",
    ]);
    t.push(vec![
        spec.name().into(),
        u64::from(a.qubits).into(),
        u64::from(a.t).into(),
        r.discrepancy.into(),
        r.std_error.into(),
        r.z.into(),
        r.ensemble_members.into(),
        r.haar_exact.to_string().into(),
    ]);
    out.table("design-check", &t)
}
