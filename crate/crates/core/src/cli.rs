//! The `qme` command line.
//!
//! Commands read JSON documents from files and write JSON (or TSV where a
//! table makes sense) to standard output or `--output`. Exit codes: 0 success,
//! 1 a verified property failed, 2 usage or parse error, 3 a domain invariant
//! was violated by the inputs.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::ensembles::{random_effect, random_instrument, random_observable, random_state, RngSeed};
use crate::entropy::{effect_entropy, effect_entropy_bounds, instrument_entropy, observable_entropy, von_neumann_entropy};
use crate::error::QmeError;
use crate::interchange::{
    parse_effect, parse_instrument, parse_model, parse_observable, parse_state, to_json,
};
use crate::model::{model_entropy_gap, model_observable};
use crate::objects::{Effect, Observable, State};
use crate::sequential::{
    coarse_grain, holevo_instrument, holevo_operation, luders_instrument, luders_operation, observable_sequential,
    sequential_product_effect, CoarseGraining,
};
use crate::suite::{self, CheckReport, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Seed used when neither `--seed` nor `QME_DEFAULT_SEED` is given.
pub const FALLBACK_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "qme", version, about = "Entropy of quantum effects, observables and measurement models")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ρ-entropy of a state, effect, observable or instrument.
    #[command(subcommand)]
    Entropy(EntropyTarget),
    /// Sequential products of effects or observables.
    #[command(subcommand)]
    Seqprod(SeqprodKind),
    /// Coarse-grain an observable along a label map.
    Coarse(CoarseArgs),
    /// Observable and entropy gap induced by a measurement model.
    Model(ModelArgs),
    /// Run the randomized property suite.
    Verify(VerifyArgs),
    /// Emit a random object as JSON.
    #[command(subcommand)]
    Gen(GenKind),
}

#[derive(Debug, Subcommand)]
pub enum EntropyTarget {
    /// Von Neumann entropy S(ρ).
    State {
        #[arg(long)]
        state: PathBuf,
    },
    /// S_a(ρ), with its spectral bounds.
    Effect {
        #[arg(long)]
        effect: PathBuf,
        #[arg(long)]
        state: PathBuf,
        /// Scale the effect over a grid, e.g. `lambda=0:1:0.01`.
        #[arg(long)]
        sweep: Option<String>,
    },
    Observable {
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    Instrument {
        #[arg(long)]
        instrument: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
}

/// Operands of a product. Both files hold effects, or both hold observables.
#[derive(Debug, Args)]
pub struct Operands {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    /// Also report the entropy of the product in this state.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SeqprodKind {
    /// a∘b = a^{1/2} b a^{1/2}.
    Luders(Operands),
    /// a∘b = tr(αb) a. Observables need one `--alpha` per outcome.
    Holevo {
        #[command(flatten)]
        operands: Operands,
        #[arg(long, required = true)]
        alpha: Vec<PathBuf>,
    },
    /// A∘B through a given instrument measuring A.
    CustomInstrument {
        #[command(flatten)]
        operands: Operands,
        #[arg(long)]
        instrument: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct CoarseArgs {
    #[arg(long)]
    pub observable: PathBuf,
    /// JSON object mapping every outcome label to its coarse label.
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub state: PathBuf,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    #[arg(long, env = "QME_DEFAULT_SEED", default_value_t = FALLBACK_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long, default_value_t = suite::DEFAULT_TRIALS)]
    pub trials: usize,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', default_values_t = suite::DEFAULT_DIMS)]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = suite::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Run only these checks (repeatable).
    #[arg(long)]
    pub only: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    State {
        #[arg(long)]
        dim: usize,
        /// Defaults to full rank.
        #[arg(long)]
        rank: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
    },
    Effect {
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    Observable {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        outcomes: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    Instrument {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        outcomes: usize,
        #[arg(long, default_value_t = 1)]
        kraus: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(QmeError),
}

impl From<QmeError> for Failure {
    fn from(e: QmeError) -> Self {
        match e {
            QmeError::Parse(_) | QmeError::UnknownCheck(_) | QmeError::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Domain(other),
        }
    }
}

type CmdResult = std::result::Result<(String, i32), Failure>;

/// Parses `args` (including the program name) and runs the command.
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
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Entropy(t) => cmd_entropy(t, cli.format),
        Command::Seqprod(k) => json_only(cli.format).and_then(|_| cmd_seqprod(k)),
        Command::Coarse(a) => json_only(cli.format).and_then(|_| cmd_coarse(a)),
        Command::Model(a) => cmd_model(a, cli.format),
        Command::Verify(a) => cmd_verify(a, cli.format),
        Command::Gen(k) => json_only(cli.format).and_then(|_| cmd_gen(k)),
    };
    match result {
        Ok((text, code)) => match &cli.output {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
                Err(e) => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: format!("error: cannot write {}: {e}\n", path.display()),
                },
            },
            None => Outcome { code, stdout: text, stderr: String::new() },
        },
        Err(Failure::Usage(msg)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Domain(e)) => Outcome {
            code: EXIT_DOMAIN,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn json_only(format: Format) -> std::result::Result<(), Failure> {
    match format {
        Format::Json => Ok(()),
        Format::Tsv => Err(Failure::Usage(
            "tsv output is available for entropy, model and verify only".into(),
        )),
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn with_file<T>(path: &Path, parse: fn(&str) -> crate::Result<T>) -> std::result::Result<T, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| match e {
        QmeError::Parse(msg) => Failure::Usage(format!("{}: parse error: {msg}", path.display())),
        other => Failure::Domain(QmeError::InvariantViolation {
            invariant: format!("valid input in {}", path.display()),
            detail: other.to_string(),
        }),
    })
}

/// Twelve significant digits in plain decimal notation.
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.11}", 0.0);
    }
    let before = x.abs().log10().floor() as i32 + 1;
    let decimals = (12 - before).max(0) as usize;
    format!("{x:.decimals$}")
}

fn sig12_value(x: f64) -> Value {
    format_sig12(x).parse::<f64>().map(|v| json!(v)).unwrap_or(Value::Null)
}

fn tsv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join("\t"));
        out.push('\n');
    }
    out
}

fn cmd_entropy(target: &EntropyTarget, format: Format) -> CmdResult {
    let (name, nats, extra) = match target {
        EntropyTarget::State { state } => {
            let rho = with_file(state, parse_state)?;
            ("state", von_neumann_entropy(&rho).nats(), None)
        }
        EntropyTarget::Effect { effect, state, sweep } => {
            let a = with_file(effect, parse_effect)?;
            let rho = with_file(state, parse_state)?;
            if let Some(spec) = sweep {
                return entropy_sweep(&a, &rho, spec, format);
            }
            let s = effect_entropy(&a, &rho)?.nats();
            let bounds = effect_entropy_bounds(&a, &rho).ok();
            ("effect", s, bounds)
        }
        EntropyTarget::Observable { observable, state } => {
            let obs = with_file(observable, parse_observable)?;
            let rho = with_file(state, parse_state)?;
            ("observable", observable_entropy(&obs, &rho)?.nats(), None)
        }
        EntropyTarget::Instrument { instrument, state } => {
            let inst = with_file(instrument, parse_instrument)?;
            let rho = with_file(state, parse_state)?;
            ("instrument", instrument_entropy(&inst, &rho)?.nats(), None)
        }
    };
    let text = match format {
        Format::Json => {
            let mut v = json!({ "target": name, "nats": sig12_value(nats) });
            if let Some(b) = extra {
                v["lower_bound"] = sig12_value(b.lower);
                v["upper_bound"] = sig12_value(b.upper);
            }
            to_json(&v)
        }
        Format::Tsv => {
            let mut header = vec!["target", "nats"];
            let mut row = vec![name.to_string(), format_sig12(nats)];
            if let Some(b) = extra {
                header.extend(["lower_bound", "upper_bound"]);
                row.extend([format_sig12(b.lower), format_sig12(b.upper)]);
            }
            tsv(&header, &[row])
        }
    };
    Ok((text, EXIT_OK))
}

/// Parses `lambda=start:stop:step` into grid points, endpoint included.
pub fn parse_sweep(spec: &str) -> crate::Result<Vec<f64>> {
    let bad = |why: &str| QmeError::Config(format!("bad sweep `{spec}`: {why}"));
    let range = spec.strip_prefix("lambda=").ok_or_else(|| bad("expected lambda=start:stop:step"))?;
    let parts: Vec<f64> = range
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad("bounds must be numbers"))?;
    let [start, stop, step] = parts[..] else {
        return Err(bad("expected three fields"));
    };
    if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) || stop < start {
        return Err(bad("need a positive step and start ≤ stop"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn entropy_sweep(a: &Effect, rho: &State, spec: &str, format: Format) -> CmdResult {
    let grid = parse_sweep(spec)?;
    let mut points = Vec::with_capacity(grid.len());
    for lambda in grid {
        // λ = 0 gives the zero operator, whose entropy is 0 by the dropped-term convention.
        let s = if lambda == 0.0 {
            0.0
        } else {
            effect_entropy(&a.scale(lambda)?, rho)?.nats()
        };
        points.push((lambda, s));
    }
    let text = match format {
        Format::Json => to_json(
            &points
                .iter()
                .map(|&(l, s)| json!({ "lambda": l, "nats": sig12_value(s) }))
                .collect::<Vec<_>>(),
        ),
        Format::Tsv => tsv(
            &["lambda", "nats"],
            &points.iter().map(|&(l, s)| vec![l.to_string(), format_sig12(s)]).collect::<Vec<_>>(),
        ),
    };
    Ok((text, EXIT_OK))
}

fn is_observable_doc(path: &Path) -> std::result::Result<bool, Failure> {
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: parse error: {e}", path.display())))?;
    Ok(v.get("outcomes").is_some())
}

enum Operand {
    Effects(Effect, Effect),
    Observables(Observable, Observable),
}

fn operands(ops: &Operands) -> std::result::Result<(Operand, Option<State>), Failure> {
    let a_obs = is_observable_doc(&ops.a)?;
    let b_obs = is_observable_doc(&ops.b)?;
    let pair = match (a_obs, b_obs) {
        (false, false) => Operand::Effects(with_file(&ops.a, parse_effect)?, with_file(&ops.b, parse_effect)?),
        (true, true) => Operand::Observables(
            with_file(&ops.a, parse_observable)?,
            with_file(&ops.b, parse_observable)?,
        ),
        _ => return Err(Failure::Usage("--a and --b must both be effects or both be observables".into())),
    };
    let state = ops.state.as_deref().map(|p| with_file(p, parse_state)).transpose()?;
    Ok((pair, state))
}

fn cmd_seqprod(kind: &SeqprodKind) -> CmdResult {
    let (kind_name, ops) = match kind {
        SeqprodKind::Luders(o) => ("luders", o),
        SeqprodKind::Holevo { operands, .. } => ("holevo", operands),
        SeqprodKind::CustomInstrument { operands, .. } => ("custom-instrument", operands),
    };
    let (pair, state) = operands(ops)?;
    let mut out = json!({ "kind": kind_name });
    match pair {
        Operand::Effects(a, b) => {
            let op = match kind {
                SeqprodKind::Luders(_) => luders_operation(&a)?,
                SeqprodKind::Holevo { alpha, .. } => {
                    if alpha.len() != 1 {
                        return Err(Failure::Usage(format!(
                            "an effect product takes one --alpha, got {}",
                            alpha.len()
                        )));
                    }
                    holevo_operation(&a, &with_file(&alpha[0], parse_state)?)?
                }
                SeqprodKind::CustomInstrument { .. } => {
                    return Err(Failure::Usage("custom-instrument takes observables for --a and --b".into()))
                }
            };
            let prod = sequential_product_effect(&op, &b)?;
            if let Some(rho) = &state {
                out["entropy"] = json!(effect_entropy(&prod, rho)?.nats());
            }
            out["product"] = serde_json::to_value(&prod).expect("effects serialize");
        }
        Operand::Observables(a, b) => {
            let inst = match kind {
                SeqprodKind::Luders(_) => luders_instrument(&a)?,
                SeqprodKind::Holevo { alpha, .. } => {
                    let alphas = alpha
                        .iter()
                        .map(|p| with_file(p, parse_state))
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    holevo_instrument(&a, &alphas)?
                }
                SeqprodKind::CustomInstrument { instrument, .. } => with_file(instrument, parse_instrument)?,
            };
            let prod = observable_sequential(&a, &inst, &b)?;
            if let Some(rho) = &state {
                out["entropy"] = json!(observable_entropy(&prod.observable, rho)?.nats());
            }
            out["product"] = serde_json::to_value(&prod.observable).expect("observables serialize");
            out["dropped"] = json!(prod.dropped);
        }
    }
    Ok((to_json(&out), EXIT_OK))
}

fn cmd_coarse(args: &CoarseArgs) -> CmdResult {
    let obs = with_file(&args.observable, parse_observable)?;
    let text = read(&args.map)?;
    let map: serde_json::Map<String, Value> = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: parse error: {e}", args.map.display())))?;
    let mut pairs = Vec::with_capacity(map.len());
    // Coarse labels are ordered by first appearance along the observable.
    for label in obs.labels() {
        if let Some(v) = map.get(label) {
            pairs.push((label.to_string(), coarse_label(&args.map, label, v)?));
        }
    }
    for (k, v) in &map {
        if obs.get(k).is_none() {
            pairs.push((k.clone(), coarse_label(&args.map, k, v)?));
        }
    }
    let coarse = coarse_grain(&obs, &CoarseGraining::from_pairs(pairs))?;
    let mut out = json!({ "observable": serde_json::to_value(&coarse).expect("observables serialize") });
    if let Some(p) = &args.state {
        let rho = with_file(p, parse_state)?;
        out["entropy_before"] = json!(observable_entropy(&obs, &rho)?.nats());
        out["entropy_after"] = json!(observable_entropy(&coarse, &rho)?.nats());
    }
    Ok((to_json(&out), EXIT_OK))
}

fn coarse_label(path: &Path, key: &str, v: &Value) -> std::result::Result<String, Failure> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| Failure::Usage(format!("{}: label `{key}` must map to a string", path.display())))
}

fn cmd_model(args: &ModelArgs, format: Format) -> CmdResult {
    let model = with_file(&args.model, parse_model)?;
    let rho = with_file(&args.state, parse_state)?;
    let a = model_observable(&model)?;
    let g = model_entropy_gap(&model, &rho)?;
    let text = match format {
        Format::Json => to_json(&json!({
            "observable": serde_json::to_value(&a).expect("observables serialize"),
            "observable_entropy": g.observable_entropy,
            "probe_entropy": g.probe_entropy,
            "gap": g.gap,
            "gap_nonpositive": g.gap <= 0.0,
        })),
        Format::Tsv => tsv(
            &["observable_entropy", "probe_entropy", "gap", "gap_nonpositive"],
            &[vec![
                format_sig12(g.observable_entropy),
                format_sig12(g.probe_entropy),
                format_sig12(g.gap),
                (g.gap <= 0.0).to_string(),
            ]],
        ),
    };
    Ok((text, EXIT_OK))
}

fn cmd_verify(args: &VerifyArgs, format: Format) -> CmdResult {
    let config = SuiteConfig {
        trials: args.trials,
        dims: args.dims.clone(),
        tolerance: args.tolerance,
        seed: RngSeed(args.seed.seed),
    };
    let reports: Vec<CheckReport> = if args.only.is_empty() {
        suite::run_suite(&config)?
    } else {
        let checks = args.only.iter().map(|id| config.check(id)).collect::<crate::Result<Vec<_>>>()?;
        checks
            .iter()
            .map(|c| suite::run_check(c, config.seed))
            .collect::<crate::Result<Vec<_>>>()?
    };
    let all_passed = reports.iter().all(|r| r.passed);
    let text = match format {
        Format::Json => to_json(&reports),
        Format::Tsv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.id.clone(),
                        r.passed.to_string(),
                        format!("{:e}", r.worst_margin),
                        r.trials.to_string(),
                        r.skipped.to_string(),
                        format!("{:.3}", r.elapsed),
                    ]
                })
                .collect();
            tsv(&["id", "passed", "worst_margin", "trials", "skipped", "elapsed_s"], &rows)
        }
    };
    Ok((text, if all_passed { EXIT_OK } else { EXIT_VIOLATION }))
}

fn cmd_gen(kind: &GenKind) -> CmdResult {
    let text = match kind {
        GenKind::State { dim, rank, seed } => {
            let mut rng = RngSeed(seed.seed).rng();
            to_json(&random_state(*dim, rank.unwrap_or(*dim), &mut rng)?)
        }
        GenKind::Effect { dim, seed } => {
            let mut rng = RngSeed(seed.seed).rng();
            to_json(&random_effect(*dim, &mut rng)?)
        }
        GenKind::Observable { dim, outcomes, seed } => {
            let mut rng = RngSeed(seed.seed).rng();
            to_json(&random_observable(*dim, *outcomes, &mut rng)?)
        }
        GenKind::Instrument { dim, outcomes, kraus, seed } => {
            let mut rng = RngSeed(seed.seed).rng();
            to_json(&random_instrument(*dim, *outcomes, *kraus, &mut rng)?)
        }
    };
    Ok((text, EXIT_OK))
}
