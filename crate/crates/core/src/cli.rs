//! Command-line front end. Every subcommand renders to a string so the
//! binary only has to print it.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::channel::{Builtin, ChannelError, McChannel};
use crate::decoders::{DecoderConfig, DecoderError, Family, Rule};
use crate::format::{fixed6, from_bits, to_bits};
use crate::infomeasures::{
    channel_summary, chernoff_root, drift, increment_law, info_triple, lambda_condition_check, log_mgf, max_increment,
    InfoError, ProductInput, WalkKind,
};
use crate::regions::{
    block_capacity_region, eq1_point, feedback_outer_region, outer_region, rectangle_region, region_corners,
    timeshare_rates, InputGrid, RegionError, RegionQuery,
};
use crate::schemes::{SchemeError, SchemeSpec};
use crate::sim::{
    concentration_check, decision_times, entropy_slack_check, records_csv, run_trials, summarize, summary_json,
    truth_crossings, wald_check, ExperimentConfig, SimError,
};

pub const SEED_ENV: &str = "MACVLC_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{path}: {msg}")]
    Invalid { path: PathBuf, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{failed} check(s) failed")]
    CheckFailed { failed: usize, report: String },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Decoder(#[from] DecoderError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Parser)]
#[command(
    name = "macvlc",
    version,
    about = "Variable-length coding over two-user multiple-access channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-user capacities and the information triple at an input.
    Capacity(CapacityArgs),
    /// Vertices of a rate region.
    Region(RegionArgs),
    /// Corner-curve boundary and the rates of the mixed concatenated scheme.
    Curve(CurveArgs),
    /// Monte Carlo run of a coding scheme and decoder.
    Simulate(SimulateArgs),
    /// Achievable rates over a grid of message-size ratios.
    Sweep(SweepArgs),
    /// Diagnostic suites.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ChannelArgs {
    /// Channel JSON file.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Built-in channel: adder, noisy_adder(d), multiplier, erasure_adder(g).
    #[arg(long)]
    pub builtin: Option<String>,
}

impl ChannelArgs {
    pub fn load(&self) -> Result<McChannel, CliError> {
        match (&self.channel, &self.builtin) {
            (Some(path), _) => load_channel(path),
            (None, Some(name)) => {
                let b: Builtin = name.parse()?;
                Ok(McChannel::builtin(b)?)
            }
            (None, None) => Err(CliError::Usage("one of --channel or --builtin is required".into())),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_channel(path: &Path) -> Result<McChannel, CliError> {
    McChannel::from_json(&read(path)?).map_err(|e| {
        let full = e.to_string();
        if e.line() == 0 {
            return CliError::Invalid {
                path: path.to_path_buf(),
                msg: full,
            };
        }
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        CliError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            msg: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
        }
    })
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// User-1 input pmf, comma separated (default uniform).
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub p1: Option<Vec<f64>>,
    /// User-2 input pmf, comma separated (default uniform).
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub p2: Option<Vec<f64>>,
}

impl InputArgs {
    fn resolve(&self, ch: &McChannel) -> Result<Option<ProductInput>, CliError> {
        if self.p1.is_none() && self.p2.is_none() {
            return Ok(None);
        }
        let uni = ProductInput::uniform(ch);
        let p1 = self.p1.clone().unwrap_or(uni.p1);
        let p2 = self.p2.clone().unwrap_or(uni.p2);
        let input = ProductInput::new(&p1, &p2)?;
        input.check_against(ch)?;
        Ok(Some(input))
    }

    fn resolve_or_uniform(&self, ch: &McChannel) -> Result<ProductInput, CliError> {
        Ok(self.resolve(ch)?.unwrap_or_else(|| ProductInput::uniform(ch)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionKind {
    Rmac,
    Outer,
    Feedback,
    Rect,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_enum, default_value = "rmac")]
    pub kind: RegionKind,
    /// `E[min(N1,N2)]/E[N1]`
    #[arg(long)]
    pub r1: Option<f64>,
    /// `E[min(N1,N2)]/E[N2]`
    #[arg(long)]
    pub r2: Option<f64>,
    /// `E[N1]/E[N2]`; derived from r2/r1 when omitted.
    #[arg(long)]
    pub s: Option<f64>,
    /// Points per input-simplex edge (default depends on the alphabets and,
    /// for feedback, on the joint alphabet).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Number of evenly spaced values of p (and lambda) in [0, 1].
    #[arg(long, default_value_t = 11)]
    pub p_grid: usize,
    /// Rate back-off of the concatenated codes, bits per use.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// `log M1 / log M2` of the mixed scheme (default `(C1-eps)/(C2-eps)`).
    #[arg(long)]
    pub m_ratio: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Decoding rule.
    #[arg(long, default_value = "combined", value_parser = parse_rule)]
    pub rule: Rule,
    /// Threshold inflation: thresholds are (1+epsilon) ln M.
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Master seed; the MACVLC_SEED environment variable takes precedence.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    pub workers: Option<usize>,
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    s.parse()
}

impl RunArgs {
    fn decoder(&self) -> Result<DecoderConfig, CliError> {
        let mut cfg = DecoderConfig::new(self.rule, self.epsilon)?;
        cfg.max_steps = self.max_steps;
        cfg.validate()?;
        Ok(cfg)
    }

    fn seed(&self) -> Result<u64, CliError> {
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned 64-bit integer"))),
            Err(_) => Ok(self.seed),
        }
    }

    fn workers(&self) -> Result<usize, CliError> {
        match self.workers {
            Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
            Some(w) => Ok(w),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }

    fn check(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Scheme JSON file; without it a random scheme with --m1/--m2 is used.
    #[arg(long, conflicts_with_all = ["m1", "m2"])]
    pub scheme: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub m1: u64,
    #[arg(long, default_value_t = 64)]
    pub m2: u64,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Also write per-trial CSV here.
    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioToken {
    Value(f64),
    /// `I(X1;Y|X2) / I(X2;Y)`
    CornerA,
    /// `I(X1;Y) / I(X2;Y|X1)`
    CornerB,
}

fn parse_ratio(s: &str) -> Result<RatioToken, String> {
    match s.trim() {
        "corner_a" => Ok(RatioToken::CornerA),
        "corner_b" => Ok(RatioToken::CornerB),
        t => match t.parse::<f64>() {
            Ok(v) if v > 0.0 => Ok(RatioToken::Value(v)),
            _ => Err(format!("`{t}`: expected a positive number, inf, corner_a or corner_b")),
        },
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Comma-separated values of log M1 / log M2 (numbers, inf, corner_a, corner_b).
    #[arg(long, value_delimiter = ',', value_parser = parse_ratio, default_value = "1,corner_a,corner_b")]
    pub m_ratio_grid: Vec<RatioToken>,
    /// Fixed M2; M1 follows from the ratio.
    #[arg(long, conflicts_with = "m1")]
    pub m2: Option<u64>,
    /// Fixed M1; M2 follows from the ratio.
    #[arg(long)]
    pub m1: Option<u64>,
    /// Same as --rule.
    #[arg(long, value_parser = parse_rule)]
    pub decoder: Option<Rule>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Drift,
    Roots,
    Wald,
    Concentration,
    Slack,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    pub input: InputArgs,
    /// Messages per user in the simulated suites.
    #[arg(long, default_value_t = 64)]
    pub m: u64,
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 2000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
}

fn grid_for(ch: &McChannel, grid: Option<usize>) -> Result<InputGrid, CliError> {
    Ok(match grid {
        Some(g) => InputGrid::new(g)?,
        None => InputGrid::default_for(ch),
    })
}

fn pmf_text(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|&v| fixed6(v)).collect();
    format!("[{}]", parts.join(", "))
}

fn rate_text(nats: f64) -> String {
    format!("{} bits/use ({} nats/use)", fixed6(to_bits(nats)), fixed6(nats))
}

pub fn cmd_capacity(a: &CapacityArgs) -> Result<String, CliError> {
    let ch = a.channel.load()?;
    let summary = channel_summary(&ch)?;
    let input = a.input.resolve_or_uniform(&ch)?;
    let t = info_triple(&ch, &input)?;
    Ok(match a.format {
        OutputFormat::Json => {
            let both = |v: f64| serde_json::json!({ "bits": to_bits(v), "nats": v });
            let v = serde_json::json!({
                "c1": both(summary.c1),
                "c2": both(summary.c2),
                "c1_argmax": summary.c1_argmax,
                "c2_argmax": summary.c2_argmax,
                "input": input,
                "i1": both(t.i1),
                "i2": both(t.i2),
                "i12": both(t.i12),
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        OutputFormat::Csv => {
            let mut out = String::from("quantity,bits_per_use,nats_per_use\n");
            for (name, v) in [
                ("C1", summary.c1),
                ("C2", summary.c2),
                ("I(X1;Y|X2)", t.i1),
                ("I(X2;Y|X1)", t.i2),
                ("I(X1,X2;Y)", t.i12),
            ] {
                out.push_str(&format!("{name},{},{}\n", fixed6(to_bits(v)), fixed6(v)));
            }
            out
        }
        OutputFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "C1 = {} at p1 = {}, p2 = {}\n",
                rate_text(summary.c1),
                pmf_text(&summary.c1_argmax.p1),
                pmf_text(&summary.c1_argmax.p2)
            ));
            out.push_str(&format!(
                "C2 = {} at p1 = {}, p2 = {}\n",
                rate_text(summary.c2),
                pmf_text(&summary.c2_argmax.p1),
                pmf_text(&summary.c2_argmax.p2)
            ));
            out.push_str(&format!(
                "input p1 = {}, p2 = {}\n",
                pmf_text(&input.p1),
                pmf_text(&input.p2)
            ));
            out.push_str(&format!("I(X1;Y|X2) = {}\n", rate_text(t.i1)));
            out.push_str(&format!("I(X2;Y|X1) = {}\n", rate_text(t.i2)));
            out.push_str(&format!("I(X1,X2;Y) = {}\n", rate_text(t.i12)));
            out
        }
    })
}

fn region_query(a: &RegionArgs) -> Result<RegionQuery, CliError> {
    let (r1, r2) = match (a.r1, a.r2) {
        (Some(r1), Some(r2)) => (r1, r2),
        _ => {
            return Err(CliError::Usage(
                "--r1 and --r2 are required for this region kind".into(),
            ))
        }
    };
    Ok(match a.s {
        Some(s) => RegionQuery::new(r1, r2, s)?,
        None if r1 == 0.0 && r2 == 0.0 => RegionQuery::new(0.0, 0.0, 1.0)?,
        None => RegionQuery::from_ratios(r1, r2)?,
    })
}

pub fn cmd_region(a: &RegionArgs) -> Result<String, CliError> {
    let ch = a.channel.load()?;
    let grid = grid_for(&ch, a.grid)?;
    let (region, query) = match a.kind {
        RegionKind::Rmac => (block_capacity_region(&ch, grid)?, None),
        RegionKind::Rect => (rectangle_region(&channel_summary(&ch)?), None),
        RegionKind::Outer => {
            let q = region_query(a)?;
            (outer_region(&ch, q, grid)?, Some(q))
        }
        RegionKind::Feedback => {
            let q = region_query(a)?;
            let grid = match a.grid {
                Some(_) => grid,
                None => InputGrid::default_joint_for(&ch),
            };
            (feedback_outer_region(&ch, q, grid)?, Some(q))
        }
    };
    Ok(match a.format {
        OutputFormat::Json => region.to_json(query) + "\n",
        _ => region.to_csv(),
    })
}

pub fn cmd_curve(a: &CurveArgs) -> Result<String, CliError> {
    if a.p_grid < 2 {
        return Err(CliError::Usage("--p-grid must be at least 2".into()));
    }
    if a.epsilon.is_nan() || a.epsilon <= 0.0 {
        return Err(CliError::Usage("--epsilon must be positive".into()));
    }
    let ch = a.channel.load()?;
    let summary = channel_summary(&ch)?;
    let corners = region_corners(&ch, &summary, grid_for(&ch, a.grid)?)?;
    let eps = from_bits(a.epsilon);
    let ratio = match a.m_ratio {
        Some(r) if r > 0.0 => r,
        Some(r) => return Err(CliError::Usage(format!("--m-ratio {r} must be positive"))),
        None => (summary.c1 - eps) / (summary.c2 - eps),
    };
    let mut out = String::from("p,R1_bits,R2_bits,lambda,R1_ts_bits,R2_ts_bits\n");
    for k in 0..a.p_grid {
        let p = k as f64 / (a.p_grid - 1) as f64;
        let (r1, r2) = eq1_point(&summary, &corners, p);
        let (t1, t2) = timeshare_rates(&summary, &corners, p, ratio, 1.0, eps);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fixed6(p),
            fixed6(to_bits(r1)),
            fixed6(to_bits(r2)),
            fixed6(p),
            fixed6(to_bits(t1)),
            fixed6(to_bits(t2))
        ));
    }
    Ok(out)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<String, CliError> {
    a.run.check()?;
    let ch = a.channel.load()?;
    let seed = a.run.seed()?;
    let mut scheme = match &a.scheme {
        Some(path) => SchemeSpec::from_json(&read(path)?)?,
        None => SchemeSpec::random(a.m1, a.m2, seed),
    };
    if let Some(input) = a.input.resolve(&ch)? {
        scheme.input = Some(input);
    }
    let cfg = ExperimentConfig {
        channel: ch,
        scheme,
        decoder: a.run.decoder()?,
        trials: a.run.trials,
        master_seed: seed,
        workers: a.run.workers()?,
    };
    let records = run_trials(&cfg)?;
    if let Some(path) = &a.records {
        std::fs::write(path, records_csv(&records)).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    let (l1, l2) = crate::sim::log_sizes(&cfg);
    Ok(summary_json(&cfg, &summarize(&records, l1, l2)) + "\n")
}

/// `(M1, M2)` for a target `log M1 / log M2`, holding one side fixed.
pub fn sizes_for_ratio(ratio: f64, m1: Option<u64>, m2: Option<u64>) -> (u64, u64) {
    let round = |x: f64| {
        if x.is_finite() {
            (x.round() as u64).max(1)
        } else {
            u64::MAX
        }
    };
    match (m1, m2) {
        (Some(m1), _) => (m1, round((m1 as f64).powf(1.0 / ratio))),
        (None, m2) => {
            let m2 = m2.unwrap_or(64);
            (round((m2 as f64).powf(ratio)), m2)
        }
    }
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<String, CliError> {
    a.run.check()?;
    let ch = a.channel.load()?;
    let input = a.input.resolve_or_uniform(&ch)?;
    let t = info_triple(&ch, &input)?;
    let seed = a.run.seed()?;
    let mut decoder = a.run.decoder()?;
    if let Some(rule) = a.decoder {
        decoder.rule = rule;
    }
    let workers = a.run.workers()?;
    let mut out =
        String::from("log_m1_over_log_m2,m1,m2,rate1_bits_per_use,rate2_bits_per_use,pe,pe_lo,pe_hi,capped_fraction\n");
    for token in &a.m_ratio_grid {
        let ratio = match *token {
            RatioToken::Value(v) => v,
            RatioToken::CornerA => t.i1 / (t.i12 - t.i1),
            RatioToken::CornerB => (t.i12 - t.i2) / t.i2,
        };
        if ratio.is_nan() || ratio <= 0.0 {
            return Err(CliError::Usage(format!("ratio {token:?} evaluates to {ratio}")));
        }
        let (m1, m2) = sizes_for_ratio(ratio, a.m1, a.m2);
        if m1.checked_mul(m2).is_none_or(|p| p > 1 << 24) {
            return Err(CliError::Usage(format!(
                "ratio {ratio} needs M1 = {m1}, M2 = {m2}: too many hypotheses"
            )));
        }
        let mut scheme = SchemeSpec::random(m1, m2, seed);
        scheme.input = Some(input.clone());
        let cfg = ExperimentConfig {
            channel: ch.clone(),
            scheme,
            decoder,
            trials: a.run.trials,
            master_seed: seed,
            workers,
        };
        let records = run_trials(&cfg)?;
        let (l1, l2) = crate::sim::log_sizes(&cfg);
        let s = summarize(&records, l1, l2);
        let actual = if l2 > 0.0 { l1 / l2 } else { f64::INFINITY };
        let bits = |r: Option<f64>| r.map_or_else(|| "NA".to_string(), |v| fixed6(to_bits(v)));
        out.push_str(&format!(
            "{},{m1},{m2},{},{},{},{},{},{}\n",
            if actual.is_finite() {
                fixed6(actual)
            } else {
                "inf".into()
            },
            bits(s.rate1),
            bits(s.rate2),
            fixed6(s.pe_hat),
            fixed6(s.pe_wilson95.0),
            fixed6(s.pe_wilson95.1),
            fixed6(s.capped_fraction)
        ));
    }
    Ok(out)
}

struct Report {
    lines: Vec<String>,
    failed: usize,
}

impl Report {
    fn new() -> Self {
        Report {
            lines: Vec::new(),
            failed: 0,
        }
    }

    fn item(&mut self, pass: bool, text: String) {
        if !pass {
            self.failed += 1;
        }
        self.lines
            .push(format!("{} {text}", if pass { "PASS" } else { "FAIL" }));
    }

    fn note(&mut self, text: String) {
        self.lines.push(format!("SKIP {text}"));
    }

    fn finish(self) -> Result<String, CliError> {
        let out = self.lines.join("\n") + "\n";
        if self.failed > 0 {
            Err(CliError::CheckFailed {
                failed: self.failed,
                report: out,
            })
        } else {
            Ok(out)
        }
    }
}

fn kind_name(k: WalkKind) -> String {
    serde_json::to_value(k)
        .expect("kind")
        .as_str()
        .expect("unit")
        .to_string()
}

/// Information quantity a correct walk's drift must equal.
fn expected_drift(ch: &McChannel, input: &ProductInput, k: WalkKind) -> Result<Option<f64>, CliError> {
    let t = info_triple(ch, input)?;
    let (u1, u2) = crate::infomeasures::marginal_informations(ch, input)?;
    Ok(match k {
        WalkKind::JointCorrect => Some(t.i12),
        WalkKind::CondCorrectGivenX2 => Some(t.i1),
        WalkKind::CondCorrectGivenX1 => Some(t.i2),
        WalkKind::SingleCorrectUser1 => Some(u1),
        WalkKind::SingleCorrectUser2 => Some(u2),
        _ => None,
    })
}

fn check_drift(ch: &McChannel, input: &ProductInput) -> Result<String, CliError> {
    let mut r = Report::new();
    for k in WalkKind::ALL {
        let d = drift(ch, input, k)?;
        let name = kind_name(k);
        match expected_drift(ch, input, k)? {
            Some(e) => r.item(
                (d - e).abs() <= 1e-9,
                format!("{name}: drift {} nats/use, information {}", fixed6(d), fixed6(e)),
            ),
            None => r.item(d <= 1e-12, format!("{name}: drift {} nats/use <= 0", fixed6(d))),
        }
    }
    r.finish()
}

fn check_roots(ch: &McChannel, input: &ProductInput) -> Result<String, CliError> {
    let mut r = Report::new();
    for k in WalkKind::ALL.into_iter().filter(|k| !k.is_correct()) {
        let name = kind_name(k);
        match chernoff_root(ch, input, k) {
            Ok(root) => {
                let atoms = increment_law(ch, input, k)?;
                let f = log_mgf(&atoms, root);
                let unit = !k.has_unit_root() || (root - 1.0).abs() <= 1e-9;
                r.item(
                    unit && f.abs() <= 1e-8,
                    format!("{name}: root {root:.9}, log-MGF there {f:.2e}"),
                );
            }
            Err(InfoError::NonNegativeDrift { drift, .. }) => {
                r.note(format!("{name}: drift {} is not negative, no root", fixed6(drift)))
            }
            Err(InfoError::NoPositiveRoot(_)) => r.note(format!("{name}: log-MGF stays negative, no root")),
            Err(e) => return Err(e.into()),
        }
    }
    let (w2_side, w1_side) = lambda_condition_check(ch, input)?;
    r.lines.push(format!(
        "INFO joint rule alone covers the pentagon: w2-wrong side {w2_side}, w1-wrong side {w1_side}"
    ));
    r.finish()
}

fn check_cfg(
    a: &CheckArgs,
    ch: &McChannel,
    input: &ProductInput,
    rule: Rule,
    eps: f64,
) -> Result<ExperimentConfig, CliError> {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let mut scheme = SchemeSpec::random(a.m, a.m, a.seed);
    scheme.input = Some(input.clone());
    Ok(ExperimentConfig {
        channel: ch.clone(),
        scheme,
        decoder: DecoderConfig::new(rule, eps)?,
        trials: a.trials,
        master_seed: a.seed,
        workers: match a.workers {
            Some(0) => return Err(CliError::Usage("--workers must be at least 1".into())),
            Some(w) => w,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    })
}

fn check_wald(a: &CheckArgs, ch: &McChannel, input: &ProductInput) -> Result<String, CliError> {
    let mut r = Report::new();
    let t = info_triple(ch, input)?;
    if t.i1 <= 0.0 {
        r.note("conditional drift is zero; nothing to stop".into());
        return r.finish();
    }
    let cfg = check_cfg(a, ch, input, Rule::GenieCondUser1, a.epsilon)?;
    let recs = run_trials(&cfg)?;
    let top = max_increment(ch, input, WalkKind::CondCorrectGivenX2)?;
    let w = wald_check(&recs, Family::GivenX2, t.i1, top);
    r.item(
        w.pass,
        format!(
            "genie_cond_user1: E[S(N)] = {:.4}, drift*E[N] = {:.4}, overshoot {:.4} (max {:.4}), gap/threshold {:.4}",
            w.mean_final_score.mean, w.predicted_score, w.gap, top, w.gap_ratio
        ),
    );
    r.finish()
}

fn check_concentration(a: &CheckArgs, ch: &McChannel, input: &ProductInput) -> Result<String, CliError> {
    let mut r = Report::new();
    let t = info_triple(ch, input)?;
    if t.i1 <= 0.0 {
        r.note("conditional drift is zero; crossing times are not defined".into());
        return r.finish();
    }
    // Four times the threshold at the same codebook size.
    let eps4 = 4.0 * (1.0 + a.epsilon) - 1.0;
    let base = run_trials(&check_cfg(a, ch, input, Rule::GenieCondUser1, a.epsilon)?)?;
    let scaled = run_trials(&check_cfg(a, ch, input, Rule::GenieCondUser1, eps4)?)?;
    let times = |recs: &[crate::decoders::TrialRecord]| -> Vec<u64> {
        truth_crossings(recs, Family::GivenX2).iter().map(|c| c.0).collect()
    };
    let c = concentration_check(&times(&base), &times(&scaled), 0.2);
    r.item(
        c.pass,
        format!(
            "tail Pr(|N - E N| > 0.2 E N): {:.4} at threshold x1, {:.4} at x4",
            c.tail_base, c.tail_scaled
        ),
    );
    r.finish()
}

fn check_slack(a: &CheckArgs, ch: &McChannel, input: &ProductInput) -> Result<String, CliError> {
    let mut r = Report::new();
    for rule in [
        Rule::Joint,
        Rule::GenieCondUser1,
        Rule::GenieCondUser2,
        Rule::Combined,
        Rule::Successive,
        Rule::SuccessiveIc,
    ] {
        let recs = run_trials(&check_cfg(a, ch, input, rule, a.epsilon)?)?;
        let ns = decision_times(&recs);
        match entropy_slack_check(&ns) {
            Ok(s) => r.item(
                s.pass,
                format!(
                    "{rule}: H(N) = {:.4} nats (corrected), ln(e E[N]) = {:.4}, slack {:.4}",
                    s.h_corrected, s.bound, s.estimation_slack
                ),
            ),
            Err(SimError::TooFewRecords { got, .. }) => r.note(format!("{rule}: only {got} decision times")),
            Err(e) => return Err(e.into()),
        }
    }
    r.finish()
}

pub fn cmd_check(a: &CheckArgs) -> Result<String, CliError> {
    let ch = a.channel.load()?;
    let input = a.input.resolve_or_uniform(&ch)?;
    match a.suite {
        Suite::Drift => check_drift(&ch, &input),
        Suite::Roots => check_roots(&ch, &input),
        Suite::Wald => check_wald(a, &ch, &input),
        Suite::Concentration => check_concentration(a, &ch, &input),
        Suite::Slack => check_slack(a, &ch, &input),
    }
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Capacity(a) => cmd_capacity(a),
        Command::Region(a) => cmd_region(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Check(a) => cmd_check(a),
    }
}
