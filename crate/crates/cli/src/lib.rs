//! Subcommands of the `netweight` binary.
//!
//! [`run`] parses arguments, executes one subcommand and returns what to
//! print plus the process exit code, so the binary and the tests share a
//! single code path.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use netweight::bounds::{BoundInputs, CoveringModel};
use netweight::format::{g12, g12_opt};
use netweight::hypergraph::{families, parse_hypergraph, ExactCaps, KPartiteHypergraph};
use netweight::learner::{risk_report, weighted_erm_with, FitOptions, FitPath, RiskReport};
use netweight::simulator::{
    concentration_experiment, erm_comparison_experiment, ConcentrationConfig, ErmConfig,
    ExperimentMetadata, GenerativeModel, InstanceSummary,
};
use netweight::weighting::{
    eqw_weights, exact_matching_weights, greedy_matching_weights, matching_weights,
    optimal_weighting, optimal_weighting_with_certificate,
};
use netweight::{Error, Example, Method, Weighting};
use serde::Serialize;

/// Exit status: success.
pub const EXIT_OK: i32 = 0;
/// Exit status: bad flags or arguments.
pub const EXIT_USAGE: i32 = 1;
/// Exit status: unreadable or invalid data.
pub const EXIT_DATA: i32 = 2;
/// Exit status: an exact computation exceeds its size cap.
pub const EXIT_TOO_LARGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "netweight",
    version,
    about = "Weighted learning from networked examples"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a hypergraph file and report its structure.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate an instance from a standard family.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Partition sizes for `random`, comma separated (default: m in every partition).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FileFormat::Text)]
        format: FileFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Per-edge weights as CSV `edge_index,weight`.
    Weights {
        #[arg(long, value_enum)]
        method: WeightMethod,
        #[arg(long)]
        input: PathBuf,
        /// Scan order for greedy matching: a permutation of 0..m, whitespace separated.
        #[arg(long)]
        order: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// The s-value and its dual certificate.
    Svalue {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the bounds on an ε grid as CSV `epsilon,method,bound`.
    Bounds {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        sigma2: f64,
        #[arg(long = "M")]
        range: f64,
        /// `one` (ℕ ≡ 1) or `linear:d,R`.
        #[arg(long, default_value = "one")]
        covering: String,
        /// Tail probabilities of the weighted mean, or sample-error bounds.
        #[arg(long, value_enum, default_value_t = BoundKind::SampleError)]
        kind: BoundKind,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Weighted ERM on a networked sample; prints coefficients and risks as JSON.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// CSV rows `edge_index,x_1,...,x_d,y`.
        #[arg(long)]
        data: PathBuf,
        /// eqw, ind or opt.
        #[arg(long)]
        method: Method,
        #[arg(long = "R")]
        radius: f64,
        /// Generative model (JSON), for the expected-risk estimate.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        n_test: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo tail frequencies against the concentration bounds.
    SimulateConcentration {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// CSV destination; metadata goes to `<output>.meta.json`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// ERM sample errors of each weighting against the sample-error bounds.
    SimulateErm {
        #[arg(long)]
        config: PathBuf,
        /// Replaces the config seeds with this single seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Structural comparison of instances: m, α, χ*, greedy, s and bounds.
    Compare {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long = "M", default_value_t = 1.0)]
        range: f64,
        #[arg(long, default_value = "one")]
        covering: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    Disjoint,
    Star,
    Cycle,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightMethod {
    Eqw,
    /// Greedy maximal matching in scan order.
    Ind,
    /// Maximum matching (exact, capped).
    IndExact,
    Opt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Tail,
    SampleError,
}

/// What a finished invocation wants written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    TooLarge(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::TooLarge(_) => EXIT_TOO_LARGE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::TooLarge(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InstanceTooLarge { what, .. } => {
                let knob = match what {
                    "independence number" => Some(ExactCaps::ALPHA_ENV),
                    "maximal independent sets" => Some(ExactCaps::CHI_ENV),
                    _ => None,
                };
                CliError::TooLarge(match knob {
                    Some(var) => format!("{e} (raise it with {var})"),
                    None => e.to_string(),
                })
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok(stdout) => Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.code(),
            stdout: String::new(),
            stderr: format!("error: {}\n", e.message()),
        },
    }
}

/// Runs a parsed subcommand. Returns the text destined for stdout; when the
/// command has `--output`, the text is written there instead and stdout
/// is empty.
pub fn execute(command: &Command) -> CliResult<String> {
    let caps = ExactCaps::from_env()?;
    match command {
        Command::Validate { input, output } => emit(output, validate(&read(input)?)?),
        Command::Generate {
            family,
            m,
            k,
            sizes,
            seed,
            format,
            output,
        } => {
            let g = generate(*family, *m, *k, sizes, *seed)?;
            let text = match format {
                FileFormat::Text => g.to_text(),
                FileFormat::Json => g.to_json(),
            };
            emit(output, text)
        }
        Command::Weights {
            method,
            input,
            order,
            output,
        } => {
            let g = load(input)?;
            let order = order.as_ref().map(|p| read_order(p)).transpose()?;
            let w = match method {
                WeightMethod::Eqw => eqw_weights(&g)?,
                WeightMethod::Ind => greedy_matching_weights(&g, order.as_deref())?,
                WeightMethod::IndExact => exact_matching_weights(&g, caps.alpha)?,
                WeightMethod::Opt => optimal_weighting(&g)?,
            };
            emit(output, weights_csv(&w))
        }
        Command::Svalue { input, output } => emit(output, svalue(&load(input)?)?),
        Command::Bounds {
            input,
            epsilon,
            sigma2,
            range,
            covering,
            kind,
            output,
        } => {
            let g = load(input)?;
            let covering = parse_covering(covering)?;
            emit(
                output,
                bounds_csv(&g, epsilon, *sigma2, *range, &covering, *kind, caps)?,
            )
        }
        Command::Fit {
            input,
            data,
            method,
            radius,
            model,
            n_test,
            seed,
            output,
        } => {
            let g = load(input)?;
            let examples = read_sample(&read(data)?, g.m())?;
            let model: Option<GenerativeModel> = model
                .as_ref()
                .map(|p| parse_json(&read(p)?, p))
                .transpose()?;
            let w = weights_for(&g, *method, caps)?;
            emit(
                output,
                fit(&examples, &w, *radius, model.as_ref(), *n_test, *seed)?,
            )
        }
        Command::SimulateConcentration {
            config,
            seed,
            output,
        } => {
            let mut cfg: ConcentrationConfig = parse_json(&read(config)?, config)?;
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            let g = cfg.hypergraph.load(config.parent())?;
            let report = concentration_experiment(&g, &cfg, caps)?;
            emit_with_metadata(output, report.to_csv(), &report.metadata)
        }
        Command::SimulateErm {
            config,
            seed,
            output,
        } => {
            let mut cfg: ErmConfig = parse_json(&read(config)?, config)?;
            if let Some(s) = seed {
                cfg.seeds = vec![*s];
            }
            let g = cfg.hypergraph.load(config.parent())?;
            let report = erm_comparison_experiment(&g, &cfg, caps)?;
            emit_with_metadata(output, report.to_csv(), &report.metadata)
        }
        Command::Compare {
            input,
            epsilon,
            range,
            covering,
            output,
        } => {
            let covering = parse_covering(covering)?;
            let instances = input
                .iter()
                .map(|p| Ok((p.display().to_string(), load(p)?)))
                .collect::<CliResult<Vec<_>>>()?;
            emit(
                output,
                compare_csv(&instances, *epsilon, *range, &covering, caps)?,
            )
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> CliResult<KPartiteHypergraph> {
    parse_hypergraph(&read(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, path: &Path) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn emit(output: &Option<PathBuf>, text: String) -> CliResult<String> {
    match output {
        None => Ok(text),
        Some(p) => {
            write_file(p, &text)?;
            Ok(String::new())
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// CSV to `output` plus metadata to `<output>.meta.json`; without an
/// output path both go to stdout, the metadata as `# meta=` JSON on the
/// last line.
fn emit_with_metadata(
    output: &Option<PathBuf>,
    csv: String,
    metadata: &ExperimentMetadata,
) -> CliResult<String> {
    match output {
        Some(p) => {
            write_file(p, &csv)?;
            let mut meta = p.clone().into_os_string();
            meta.push(".meta.json");
            write_file(Path::new(&meta), &metadata.to_json())?;
            Ok(String::new())
        }
        None => {
            let compact = serde_json::to_string(metadata).expect("metadata serializes");
            Ok(format!("{csv}# meta={compact}\n"))
        }
    }
}

pub fn generate(
    family: Family,
    m: usize,
    k: usize,
    sizes: &[usize],
    seed: u64,
) -> CliResult<KPartiteHypergraph> {
    Ok(match family {
        Family::Disjoint => families::disjoint(m, k)?,
        Family::Star => families::star(m, k)?,
        Family::Cycle => families::cycle(m, k)?,
        Family::Random => {
            let sizes = if sizes.is_empty() {
                vec![m; k]
            } else {
                sizes.to_vec()
            };
            if sizes.len() != k {
                return Err(CliError::Usage(format!(
                    "--sizes lists {} partitions but k = {k}",
                    sizes.len()
                )));
            }
            families::random(k, m, &sizes, seed)?
        }
    })
}

/// Structure report: header line, then warnings and per-partition degree
/// statistics.
pub fn validate(text: &str) -> CliResult<String> {
    let g = parse_hypergraph(text)?;
    let mut out = format!(
        "OK, k={}, m={}, max degree {}\n",
        g.k(),
        g.m(),
        g.max_degree()
    );
    if g.m() == 0 {
        out.push_str("warning: empty edge list, m=0\n");
    }
    for (a, b) in g.duplicate_edges() {
        writeln!(out, "warning: edges {a} and {b} are duplicates").unwrap();
    }
    let degrees = g.degrees();
    for (i, d) in degrees.iter().enumerate() {
        let active = d.iter().filter(|&&x| x > 0).count();
        let max = d.iter().copied().max().unwrap_or(0);
        let mean = if d.is_empty() {
            0.0
        } else {
            g.m() as f64 / d.len() as f64
        };
        writeln!(
            out,
            "partition {i}: n={} active={active} max_degree={max} mean_degree={}",
            d.len(),
            g12(mean)
        )
        .unwrap();
    }
    Ok(out)
}

fn read_order(path: &Path) -> CliResult<Vec<usize>> {
    read(path)?
        .split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| {
                CliError::Data(format!("{}: `{t}` is not an edge index", path.display()))
            })
        })
        .collect()
}

pub fn weights_csv(w: &Weighting) -> String {
    let mut out = String::from("edge_index,weight\n");
    for (i, x) in w.weights.iter().enumerate() {
        writeln!(out, "{i},{}", g12(*x)).unwrap();
    }
    writeln!(out, "# normalizer={}", g12(w.normalizer)).unwrap();
    out
}

pub fn svalue(g: &KPartiteHypergraph) -> CliResult<String> {
    let opt = optimal_weighting_with_certificate(g)?;
    let mut out = format!("s={}\n", g12(opt.s_value()));
    writeln!(out, "cover_total={}", g12(opt.cover_total())).unwrap();
    writeln!(
        out,
        "duality_gap={}",
        g12((opt.cover_total() - opt.s_value()).abs())
    )
    .unwrap();
    writeln!(out, "cover_violation={}", g12(opt.cover_violation(g))).unwrap();
    out.push_str("partition,vertex,cover\n");
    for (p, ys) in opt.vertex_cover.iter().enumerate() {
        for (v, y) in ys.iter().enumerate() {
            writeln!(out, "{p},{v},{}", g12(*y)).unwrap();
        }
    }
    Ok(out)
}

pub fn parse_covering(spec: &str) -> CliResult<CoveringModel> {
    let usage = || {
        CliError::Usage(format!(
            "--covering must be `one` or `linear:d,R`, got `{spec}`"
        ))
    };
    if spec == "one" {
        return Ok(CoveringModel::unit());
    }
    let rest = spec.strip_prefix("linear:").ok_or_else(usage)?;
    let (d, r) = rest.split_once(',').ok_or_else(usage)?;
    let d: usize = d.trim().parse().map_err(|_| usage())?;
    let r: f64 = r.trim().parse().map_err(|_| usage())?;
    CoveringModel::linear(d, r).map_err(|e| CliError::Usage(e.to_string()))
}

fn weights_for(g: &KPartiteHypergraph, method: Method, caps: ExactCaps) -> CliResult<Weighting> {
    Ok(match method {
        Method::Eqw => eqw_weights(g)?,
        Method::Ind => matching_weights(g, caps.alpha)?,
        Method::Opt => optimal_weighting(g)?,
    })
}

/// Rows sorted by ε, then method in the order iid, eqw, ind, weighted.
pub fn bounds_csv(
    g: &KPartiteHypergraph,
    epsilons: &[f64],
    sigma2: f64,
    range: f64,
    covering: &CoveringModel,
    kind: BoundKind,
    caps: ExactCaps,
) -> CliResult<String> {
    let summary = InstanceSummary::compute(g, caps)?;
    let m = g.m() as f64;
    if m == 0.0 {
        return Err(CliError::Data("bounds need at least one edge".into()));
    }
    let matching = summary.matching as f64;
    let mut eps = epsilons.to_vec();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    let mut out = String::from("epsilon,method,bound\n");
    for &e in &eps {
        let at = |n: f64, s: f64| {
            BoundInputs::new(n, s, e, sigma2, range).with_covering(covering.clone())
        };
        let chi = |b: BoundInputs| summary.chi_star.map(|c| b.with_chi_star(c));
        let rows: [(&str, Option<f64>); 4] = match kind {
            BoundKind::Tail => [
                ("iid", Some(at(m, m).bernstein_tail()?)),
                (
                    "eqw",
                    chi(at(m, m)).map(|b| b.chromatic_tail()).transpose()?,
                ),
                ("ind", Some(at(matching, matching).bernstein_tail()?)),
                (
                    "weighted",
                    Some(at(m, summary.s).weighted_bernstein_tail()?),
                ),
            ],
            BoundKind::SampleError => [
                ("iid", Some(at(m, m).sample_error_bound_iid()?)),
                (
                    "eqw",
                    chi(at(m, m))
                        .map(|b| b.sample_error_bound_eqw())
                        .transpose()?,
                ),
                (
                    "ind",
                    Some(at(matching, matching).sample_error_bound_iid()?),
                ),
                (
                    "weighted",
                    Some(at(m, summary.s).sample_error_bound_weighted()?),
                ),
            ],
        };
        for (name, value) in rows {
            writeln!(out, "{},{name},{}", g12(e), g12_opt(value)).unwrap();
        }
    }
    Ok(out)
}

/// Reads `edge_index,x_1,...,x_d,y` rows; every edge must appear exactly
/// once. A first line whose leading field is not an integer is a header.
pub fn read_sample(text: &str, m: usize) -> CliResult<Vec<Example>> {
    let mut slots: Vec<Option<Example>> = vec![None; m];
    let mut dim = None;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let Ok(edge) = fields[0].parse::<usize>() else {
            if dim.is_none() && slots.iter().all(Option::is_none) {
                continue; // header
            }
            return Err(CliError::Data(format!(
                "line {}: bad edge index `{}`",
                n + 1,
                fields[0]
            )));
        };
        if fields.len() < 3 {
            return Err(CliError::Data(format!(
                "line {}: need edge_index, features and y",
                n + 1
            )));
        }
        let values = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Data(format!("line {}: {e}", n + 1)))?;
        let d = values.len() - 1;
        if *dim.get_or_insert(d) != d {
            return Err(CliError::Data(format!(
                "line {}: expected {} features, found {d}",
                n + 1,
                dim.unwrap()
            )));
        }
        let slot = slots.get_mut(edge).ok_or_else(|| {
            CliError::Data(format!("line {}: edge {edge} out of range [0, {m})", n + 1))
        })?;
        if slot.is_some() {
            return Err(CliError::Data(format!(
                "line {}: edge {edge} appears twice",
                n + 1
            )));
        }
        *slot = Some(Example {
            x: values[..d].to_vec(),
            y: values[d],
        });
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(e, z)| z.ok_or_else(|| CliError::Data(format!("no data row for edge {e}"))))
        .collect()
}

/// Rounds to the report precision so JSON output carries 12 significant
/// digits like the CSV output.
fn r12(x: f64) -> f64 {
    if x.is_finite() {
        g12(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

#[derive(Serialize)]
struct FitOutput {
    method: Method,
    norm_bound: f64,
    coefficients: Vec<f64>,
    path: FitPath,
    iterations: usize,
    stationarity: f64,
    risk: RiskReport,
}

pub fn fit(
    examples: &[Example],
    w: &Weighting,
    radius: f64,
    model: Option<&GenerativeModel>,
    n_test: usize,
    seed: u64,
) -> CliResult<String> {
    let fit = weighted_erm_with(
        examples,
        &w.weights,
        w.normalizer,
        radius,
        &FitOptions::default(),
    )?;
    let mut risk = risk_report(
        &fit.hypothesis,
        examples,
        w,
        model.map(|m| (m, n_test, seed)),
    )?;
    risk.empirical_weighted = r12(risk.empirical_weighted);
    risk.empirical_unweighted = r12(risk.empirical_unweighted);
    if let Some(e) = risk.expected_estimate.as_mut() {
        e.estimate = r12(e.estimate);
        e.std_error = r12(e.std_error);
    }
    let out = FitOutput {
        method: w.method,
        norm_bound: r12(radius),
        coefficients: fit
            .hypothesis
            .coefficients
            .iter()
            .map(|&b| r12(b))
            .collect(),
        path: fit.path,
        iterations: fit.iterations,
        stationarity: r12(fit.stationarity),
        risk,
    };
    let mut text = serde_json::to_string_pretty(&out).expect("fit output serializes");
    text.push('\n');
    Ok(text)
}

/// One row per instance, in input order. Checks `m/χ* <= α <= s <= m`
/// wherever the quantities are available.
pub fn compare_csv(
    instances: &[(String, KPartiteHypergraph)],
    epsilon: f64,
    range: f64,
    covering: &CoveringModel,
    caps: ExactCaps,
) -> CliResult<String> {
    let mut out =
        String::from("instance,m,alpha,chi_star,greedy,s,eqw_bound,ind_bound,weighted_bound\n");
    for (name, g) in instances {
        let sm = InstanceSummary::compute(g, caps)?;
        let m = sm.m as f64;
        let tol = 1e-9;
        let chain_ok = sm.s <= m + tol
            && sm.alpha.is_none_or(|a| a as f64 <= sm.s + tol)
            && match (sm.alpha, sm.chi_star) {
                (Some(a), Some(c)) => m / c <= a as f64 + tol,
                _ => true,
            };
        if !chain_ok {
            return Err(CliError::Data(format!(
                "{name}: structural chain m/χ* <= α <= s <= m violated"
            )));
        }
        let at = |n: f64, s: f64| {
            BoundInputs::new(n, s, epsilon, 0.0, range).with_covering(covering.clone())
        };
        let eqw = sm
            .chi_star
            .map(|c| at(m, m).with_chi_star(c).sample_error_bound_eqw())
            .transpose()?;
        let matching = sm.matching as f64;
        let ind = at(matching, matching).sample_error_bound_iid()?;
        let weighted = at(m, sm.s).sample_error_bound_weighted()?;
        writeln!(
            out,
            "{name},{},{},{},{},{},{},{},{}",
            sm.m,
            sm.alpha.map_or_else(|| "n/a".into(), |a| a.to_string()),
            g12_opt(sm.chi_star),
            sm.greedy_matching,
            g12(sm.s),
            g12_opt(eqw),
            g12(ind),
            g12(weighted)
        )
        .unwrap();
    }
    Ok(out)
}
