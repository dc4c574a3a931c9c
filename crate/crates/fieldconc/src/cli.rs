//! Command-line surface: bound computation, band-width optimization, seeded
//! simulation, verification suites, rate reports, and the tightness witness.
//!
//! All commands read a JSON config (unknown keys rejected), with `--seed`,
//! `--out` and `--threads` overriding file values. Output is UTF-8 CSV with
//! a stable header, decimal points, and 17 significant digits. Exit codes:
//! 0 success / all checks pass, 1 verification failure, 2 invalid config,
//! 3 band-width budget violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::bounds::{
    analytic_delta, cube_rate_bound, optimize_delta, psi, rate_exponents, theorem_bound, Decay,
    DecayModel, PNorm, RateRegime,
};
use crate::error::{Error, Result};
use crate::fields::FieldModel;
use crate::frames::DeltaSeq;
use crate::lattice::Rectangle;
use crate::mc::{estimate_lp_norm, linear_fit};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_BAD_CONFIG: i32 = 2;
pub const EXIT_CONSTRAINT: i32 = 3;

#[derive(Parser)]
#[command(
    name = "fieldconc",
    version,
    about = "Moment bounds and verification for weakly dependent random fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the multiscale functional and the moment / sub-Gaussian bound
    Bound(CommonArgs),
    /// Report analytic and numerically refined band-width sequences
    Delta(CommonArgs),
    /// Seeded Monte Carlo estimates of partial-sum norms against the bound
    Simulate(CommonArgs),
    /// Run a verification suite and report pass/fail per check
    Verify {
        /// order | frames | martingale | wd | compression | all
        suite: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Rate-exponent report over a family of cubes
    Rates(CommonArgs),
    /// Saturation witness: the block field meets its rate exactly
    Tightness(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config path
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; all randomness flows from it
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; never affects output values
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Deserialize, Clone, Debug)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Iid {
        dim: usize,
    },
    Block {
        dim: usize,
        side: u64,
        alpha: f64,
    },
    MovingAverage {
        dim: usize,
        radius: u64,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    CausalLinear {
        dim: usize,
        beta: f64,
        trunc: u64,
    },
}

impl FieldSpec {
    fn build(&self) -> Result<FieldModel> {
        match self {
            FieldSpec::Iid { dim } => FieldModel::iid(*dim),
            FieldSpec::Block { dim, side, alpha } => FieldModel::block(*dim, *side, *alpha),
            FieldSpec::MovingAverage {
                dim,
                radius,
                weights,
            } => match weights {
                Some(w) => FieldModel::moving_average(*dim, *radius, w.clone()),
                None => FieldModel::uniform_moving_average(*dim, *radius),
            },
            FieldSpec::CausalLinear { dim, beta, trunc } => {
                FieldModel::causal_linear(*dim, *beta, *trunc)
            }
        }
    }

    fn dim(&self) -> usize {
        match self {
            FieldSpec::Iid { dim }
            | FieldSpec::Block { dim, .. }
            | FieldSpec::MovingAverage { dim, .. }
            | FieldSpec::CausalLinear { dim, .. } => *dim,
        }
    }
}

#[derive(Deserialize, Clone, Debug)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DecaySpec {
    Polynomial {
        c: f64,
        alpha: f64,
        m_p: f64,
    },
    Exponential {
        c: f64,
        gamma: f64,
        eta: f64,
        m_p: f64,
    },
    FiniteRange {
        width: u64,
        m_p: f64,
    },
}

impl DecaySpec {
    fn build(&self, p: PNorm) -> Result<DecayModel> {
        match *self {
            DecaySpec::Polynomial { c, alpha, m_p } => {
                DecayModel::new(Decay::Polynomial { c, alpha }, m_p, p)
            }
            DecaySpec::Exponential { c, gamma, eta, m_p } => {
                DecayModel::new(Decay::Exponential { c, gamma, eta }, m_p, p)
            }
            DecaySpec::FiniteRange { width, m_p } => {
                DecayModel::new(Decay::FiniteRange { width }, m_p, p)
            }
        }
    }

    fn label(&self) -> String {
        match self {
            DecaySpec::Polynomial { c, alpha, .. } => format!("polynomial(c={c} alpha={alpha})"),
            DecaySpec::Exponential { c, gamma, eta, .. } => {
                format!("exponential(c={c} gamma={gamma} eta={eta})")
            }
            DecaySpec::FiniteRange { width, .. } => format!("finite_range(width={width})"),
        }
    }
}

#[derive(Deserialize, Clone, Debug, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeltaSpec {
    #[default]
    Analytic,
    Numeric {
        #[serde(default = "default_budget")]
        budget: u32,
    },
    Explicit {
        values: Vec<u64>,
    },
}

fn default_budget() -> u32 {
    32
}

#[derive(Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum PSpec {
    Number(f64),
    Word(String),
}

impl PSpec {
    fn build(&self) -> Result<PNorm> {
        match self {
            PSpec::Number(v) => PNorm::finite(*v),
            PSpec::Word(w) if w == "inf" || w == "infinity" => Ok(PNorm::Infinity),
            PSpec::Word(w) => Err(Error::InvalidConfig(format!(
                "p must be a number >= 2 or \"inf\", got \"{w}\""
            ))),
        }
    }
}

/// Machine-readable experiment description. Every command validates the
/// subset of keys it needs; unknown keys are rejected at parse time.
#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub field: Option<FieldSpec>,
    pub decay: Option<DecaySpec>,
    pub rectangle: Option<Vec<u64>>,
    pub p: Option<PSpec>,
    pub delta: Option<DeltaSpec>,
    pub seed: Option<u64>,
    pub replicates: Option<u32>,
    pub n_list: Option<Vec<u64>>,
    pub alphas: Option<Vec<f64>>,
    pub lambda_grid: Option<Vec<f64>>,
    pub dim: Option<usize>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                Ok(serde_json::from_str(&text)?)
            }
        }
    }

    fn rectangle(&self) -> Result<Rectangle> {
        let sides = self
            .rectangle
            .clone()
            .ok_or_else(|| Error::InvalidConfig("missing \"rectangle\"".into()))?;
        Rectangle::new(sides)
    }

    fn p(&self) -> Result<PNorm> {
        self.p
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("missing \"p\"".into()))?
            .build()
    }

    /// Decay model from the explicit spec, or derived from the field model.
    fn decay_model(&self, p: PNorm) -> Result<(DecayModel, String)> {
        if let Some(spec) = &self.decay {
            return Ok((spec.build(p)?, spec.label()));
        }
        if let Some(field) = &self.field {
            let model = field.build()?;
            let envelope = model.wd_envelope(p);
            let label = format!("envelope({:?})", field).to_lowercase();
            return Ok((envelope, label));
        }
        Err(Error::InvalidConfig(
            "either \"decay\" or \"field\" is required".into(),
        ))
    }

    fn delta_for(&self, rect: &Rectangle, model: &DecayModel) -> Result<(DeltaSeq, &'static str)> {
        match self.delta.clone().unwrap_or_default() {
            DeltaSpec::Analytic => Ok((analytic_delta(rect, model), "analytic")),
            DeltaSpec::Numeric { budget } => Ok((optimize_delta(rect, model, budget)?, "numeric")),
            DeltaSpec::Explicit { values } => Ok((DeltaSeq::new(values)?, "explicit")),
        }
    }
}

/// 17 significant digits, locale-independent.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn join<T: std::fmt::Display>(values: &[T], sep: &str) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn write_csv(out: Option<&Path>, header: &str, rows: &[String]) -> Result<()> {
    let mut text = String::with_capacity(rows.len() * 64 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            stdout.lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn regime_label(r: RateRegime) -> &'static str {
    match r {
        RateRegime::Power => "power",
        RateRegime::LogFactor => "log_factor",
        RateRegime::Direct => "direct",
    }
}

fn cmd_bound(cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let rect = cfg.rectangle()?;
    let p = cfg.p()?;
    let (model, label) = cfg.decay_model(p)?;
    let (delta, mode) = cfg.delta_for(&rect, &model)?;
    let report = theorem_bound(&rect, &model, &delta)?;
    // closed-form rate only applies to cubes of side >= 2
    let cube_side = rect.sides().first().copied().unwrap_or(1);
    let rate = if rect.sides().iter().all(|&n| n == cube_side) && cube_side >= 2 {
        Some(cube_rate_bound(cube_side, rect.dim(), &model)?)
    } else {
        None
    };
    let header = "d,sides,p,model,m_p,delta_mode,delta,constraint,psi,lp_bound,sg_bound,corollary_rate,constant,regime";
    let p_label = match p {
        PNorm::Finite(v) => v.to_string(),
        PNorm::Infinity => "inf".into(),
    };
    let row = format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        rect.dim(),
        join(rect.sides(), "x"),
        p_label,
        label,
        num(model.m_p),
        mode,
        join(delta.values(), ";"),
        report.constraint,
        num(report.psi),
        opt_num(report.lp_bound),
        opt_num(report.sg_bound),
        opt_num(rate.as_ref().map(|r| r.bound)),
        opt_num(rate.as_ref().and_then(|r| r.constant)),
        rate.map(|r| regime_label(r.regime)).unwrap_or(""),
    );
    write_csv(out, header, &[row])
}

fn cmd_delta(cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let rect = cfg.rectangle()?;
    let p = cfg.p()?;
    let (model, _) = cfg.decay_model(p)?;
    let budget = match cfg.delta.clone().unwrap_or_default() {
        DeltaSpec::Numeric { budget } => budget,
        _ => default_budget(),
    };
    let m = rect.max_scale();
    let analytic = analytic_delta(&rect, &model);
    let numeric = optimize_delta(&rect, &model, budget)?;
    let header = "mode,scales,delta,constraint,psi";
    let mut rows = Vec::new();
    for (mode, seq) in [("analytic", &analytic), ("numeric", &numeric)] {
        rows.push(format!(
            "{},{},{},{},{}",
            mode,
            m,
            join(seq.values(), ";"),
            seq.constraint_sum(m)?,
            num(psi(seq, &rect, &model)?),
        ));
    }
    write_csv(out, header, &rows)
}

fn cmd_simulate(cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let field_spec = cfg
        .field
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("simulate requires \"field\"".into()))?;
    let field = field_spec.build()?;
    let seed = cfg.seed.ok_or_else(|| {
        Error::InvalidConfig("simulate requires a seed (no hidden entropy)".into())
    })?;
    let p = match cfg.p()? {
        PNorm::Finite(v) => v,
        PNorm::Infinity => {
            return Err(Error::InvalidConfig(
                "simulate estimates moment norms; use finite p".into(),
            ))
        }
    };
    let replicates = cfg.replicates.unwrap_or(2048);
    let rects: Vec<Rectangle> = match &cfg.n_list {
        Some(ns) => ns
            .iter()
            .map(|&n| Rectangle::cube(field.dim(), n))
            .collect::<Result<_>>()?,
        None => vec![cfg.rectangle()?],
    };
    let envelope = field.wd_envelope(PNorm::Finite(p));
    let header = "n,N,p,estimate,se,bound,ratio,seed";
    let mut rows = Vec::new();
    for rect in &rects {
        let delta = match cfg.delta.clone().unwrap_or_default() {
            DeltaSpec::Explicit { values } => DeltaSeq::new(values)?,
            DeltaSpec::Numeric { budget } => optimize_delta(rect, &envelope, budget)?,
            DeltaSpec::Analytic => analytic_delta(rect, &envelope),
        };
        let bound = theorem_bound(rect, &envelope, &delta)?.bound();
        let est = estimate_lp_norm(&field, rect, p, replicates, seed)?;
        let ratio = if est.estimate > 0.0 {
            bound / est.estimate
        } else {
            f64::INFINITY
        };
        rows.push(format!(
            "{},{},{},{},{},{},{},{}",
            rect.sides().iter().max().unwrap(),
            rect.cardinality(),
            p,
            num(est.estimate),
            num(est.std_error),
            num(bound),
            num(ratio),
            seed,
        ));
    }
    write_csv(out, header, &rows)
}

fn cmd_rates(cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let alphas = cfg
        .alphas
        .clone()
        .ok_or_else(|| Error::InvalidConfig("rates requires \"alphas\"".into()))?;
    let sides = cfg
        .n_list
        .clone()
        .ok_or_else(|| Error::InvalidConfig("rates requires \"n_list\"".into()))?;
    if sides.len() < 4 {
        return Err(Error::InvalidConfig("rates needs at least 4 sides".into()));
    }
    let dim = cfg.dim.unwrap_or(2);
    let p = match &cfg.p {
        Some(spec) => spec.build()?,
        None => PNorm::Finite(2.0),
    };
    let (c, m_p) = match &cfg.decay {
        Some(DecaySpec::Polynomial { c, m_p, .. }) => (*c, *m_p),
        _ => (1.0, 1.0),
    };
    let header =
        "alpha,d,psi_slope,expected_slope,slope_gap,exponent_multiscale,exponent_projective";
    let mut rows = Vec::new();
    for &alpha in &alphas {
        let model = DecayModel::new(Decay::Polynomial { c, alpha }, m_p, p)?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &n in &sides {
            let rect = Rectangle::cube(dim, n)?;
            let delta = analytic_delta(&rect, &model);
            xs.push((rect.cardinality() as f64).ln());
            ys.push((psi(&delta, &rect, &model)? / m_p).ln());
        }
        let fit = linear_fit(&xs, &ys)?;
        let expected = 1.0 - 0.5f64.min(alpha / dim as f64);
        let (ours, projective) = rate_exponents(dim, alpha)?;
        rows.push(format!(
            "{},{},{},{},{},{},{}",
            alpha,
            dim,
            num(fit.slope),
            num(expected),
            num((fit.slope - expected).abs()),
            num(ours),
            num(projective),
        ));
    }
    write_csv(out, header, &rows)
}

fn cmd_tightness(cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let sides = cfg
        .n_list
        .clone()
        .ok_or_else(|| Error::InvalidConfig("tightness requires \"n_list\"".into()))?;
    let alpha = match (&cfg.field, &cfg.decay) {
        (Some(FieldSpec::Block { alpha, .. }), _) => *alpha,
        (_, Some(DecaySpec::Polynomial { alpha, .. })) => *alpha,
        _ => {
            return Err(Error::InvalidConfig(
                "tightness requires a block field or polynomial decay for alpha".into(),
            ))
        }
    };
    let dim = cfg.field.as_ref().map(|f| f.dim()).or(cfg.dim).unwrap_or(2);
    let p = match &cfg.p {
        Some(spec) => match spec.build()? {
            PNorm::Finite(v) => v,
            PNorm::Infinity => return Err(Error::InvalidConfig("tightness uses finite p".into())),
        },
        None => 2.0,
    };
    let replicates = cfg.replicates.unwrap_or(64);
    let seed = cfg.seed.unwrap_or(0); // value is seed-independent: |S| is constant
    let header = "n,N,alpha,exact,estimate,se,bound_norm,ratio";
    let mut rows = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &n in &sides {
        let model = FieldModel::block(dim, n, alpha)?;
        let rect = Rectangle::cube(dim, n)?;
        let big_n = rect.cardinality() as f64;
        let exact = (n as f64).powf(-alpha);
        let est = estimate_lp_norm(&model, &rect, p, replicates, seed)?;
        let envelope = model.wd_envelope(PNorm::Finite(p));
        let delta = analytic_delta(&rect, &envelope);
        let bound_norm = theorem_bound(&rect, &envelope, &delta)?.bound() / big_n;
        rows.push(format!(
            "{},{},{},{},{},{},{},{}",
            n,
            rect.cardinality(),
            alpha,
            num(exact),
            num(est.estimate / big_n),
            num(est.std_error / big_n),
            num(bound_norm),
            num(bound_norm / exact),
        ));
        xs.push(big_n.ln());
        ys.push(exact.ln());
    }
    write_csv(out, header, &rows)?;
    if xs.len() >= 2 {
        let fit = linear_fit(&xs, &ys)?;
        eprintln!(
            "tightness slope {} (expected {})",
            num(fit.slope),
            num(-alpha / dim as f64)
        );
    }
    Ok(())
}

fn cmd_verify(suite_name: &str) -> Result<bool> {
    let checks = verify::suite(suite_name)?;
    let mut all_pass = true;
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    for check in &checks {
        let status = if check.pass { "PASS" } else { "FAIL" };
        all_pass &= check.pass;
        if check.detail.is_empty() {
            writeln!(w, "{status} {}", check.name)?;
        } else {
            writeln!(w, "{status} {} - {}", check.name, check.detail)?;
        }
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    writeln!(w, "{passed}/{} checks passed", checks.len())?;
    Ok(all_pass)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::ConstraintViolated(_) => EXIT_CONSTRAINT,
        _ => EXIT_BAD_CONFIG,
    }
}

fn dispatch(command: &Command) -> i32 {
    let common = match command {
        Command::Bound(c)
        | Command::Delta(c)
        | Command::Simulate(c)
        | Command::Rates(c)
        | Command::Tightness(c) => c,
        Command::Verify { common, .. } => common,
    };
    let mut cfg = match RunConfig::load(common.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_CONFIG;
        }
    };
    // flags override file values
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    let run = || -> Result<i32> {
        let out = cfg.out.as_deref();
        match command {
            Command::Bound(_) => cmd_bound(&cfg, out).map(|_| EXIT_OK),
            Command::Delta(_) => cmd_delta(&cfg, out).map(|_| EXIT_OK),
            Command::Simulate(_) => cmd_simulate(&cfg, out).map(|_| EXIT_OK),
            Command::Rates(_) => cmd_rates(&cfg, out).map(|_| EXIT_OK),
            Command::Tightness(_) => cmd_tightness(&cfg, out).map(|_| EXIT_OK),
            Command::Verify { suite, .. } => {
                let name = suite.clone().unwrap_or_else(|| "all".into());
                cmd_verify(&name).map(|ok| if ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
            }
        }
    };
    let result = match cfg.threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_BAD_CONFIG;
            }
        },
        _ => run(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(&cli.command),
        Err(e) => {
            // clap handles --help/--version as "errors" with success status
            let code = if e.use_stderr() {
                EXIT_BAD_CONFIG
            } else {
                EXIT_OK
            };
            let _ = e.print();
            code
        }
    }
}
