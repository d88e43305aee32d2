//! Monte Carlo experiments: parallel trials, estimators and diagnostics.
//!
//! Trial `t` uses ChaCha8 stream `t` under `master_seed` for the transmitted
//! messages, channel noise and any scheme randomness, and fresh codebooks
//! keyed by `(scheme seed, t)`. Results are collected in trial order, so a
//! summary does not depend on the worker count.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::channel::McChannel;
use crate::decoders::{self, DecoderConfig, DecoderError, Family, Rule, TrialRecord};
use crate::format::{to_bits, BITS};
use crate::infomeasures::{channel_summary, point_mass, ChannelSummary, InfoError, ProductInput};
use crate::regions::{lemma_slack, max_sum_rate_input, region_corners, InputGrid, RegionError};
use crate::schemes::{Codebook, ConcatScheme, Order, SchemeError, SchemeSpec, SchemeType, User};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;
/// Fraction of capped trials above which a summary carries a warning.
pub const CAPPED_WARNING: f64 = 0.01;
/// Smallest sample accepted by [`entropy_slack_check`].
pub const MIN_SLACK_RECORDS: usize = 1000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("workers must be at least 1")]
    NoWorkers,
    #[error("need at least {need} records, got {got}")]
    TooFewRecords { need: usize, got: usize },
    #[error("rule {0} cannot decode the first phase of a concatenated scheme")]
    PhaseRule(Rule),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Decoder(#[from] DecoderError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Info(#[from] InfoError),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub channel: McChannel,
    pub scheme: SchemeSpec,
    pub decoder: DecoderConfig,
    pub trials: u64,
    pub master_seed: u64,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        if self.workers == 0 {
            return Err(SimError::NoWorkers);
        }
        self.scheme.validate()?;
        self.decoder.validate()?;
        if let Some(input) = &self.scheme.input {
            input.check_against(&self.channel)?;
        }
        Ok(())
    }
}

/// Random stream of trial `t`.
pub fn trial_rng(master_seed: u64, t: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(t);
    rng
}

/// Seed of codebook `slot` in trial `t`.
pub fn codebook_seed(scheme_seed: u64, t: u64, slot: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(scheme_seed);
    rng.set_stream(t);
    rng.set_word_pos(2 * slot as u128);
    rng.next_u64()
}

/// One concatenated code prepared for simulation.
#[derive(Debug, Clone)]
struct Phases {
    order: Order,
    /// Messages of the early user, and of the late user in each phase.
    m_early: u64,
    m_late1: u64,
    m_late2: u64,
    phase1: ProductInput,
    /// Fixed letter of the early user and the late user's pmf in phase two.
    fixed_letter: usize,
    late_pmf: Vec<f64>,
}

impl Phases {
    fn new(cs: &ConcatScheme, phase1: &ProductInput, summary: &ChannelSummary) -> Self {
        let (m_early, m_late, early_rate, late_rate) = match cs.order {
            Order::V1 => (cs.m1, cs.m2, cs.phase1_rates.0, cs.phase1_rates.1),
            Order::V2 => (cs.m2, cs.m1, cs.phase1_rates.1, cs.phase1_rates.0),
        };
        let carried = (m_early as f64).ln() * late_rate / early_rate;
        let m_late1 = (carried.exp().round() as u64).clamp(1, m_late);
        let m_late2 = m_late.div_ceil(m_late1).max(1);
        let argmax = |p: &[f64]| (1..p.len()).fold(0, |b, k| if p[k] > p[b] { k } else { b });
        let (fixed_letter, late_pmf) = match cs.order {
            Order::V1 => (argmax(&summary.c2_argmax.p1), summary.c2_argmax.p2.clone()),
            Order::V2 => (argmax(&summary.c1_argmax.p2), summary.c1_argmax.p1.clone()),
        };
        Phases {
            order: cs.order,
            m_early,
            m_late1,
            m_late2,
            phase1: phase1.clone(),
            fixed_letter,
            late_pmf,
        }
    }
}

/// Everything a trial needs that does not depend on the trial index.
#[derive(Debug, Clone)]
enum Plan {
    Random { input: ProductInput },
    Concat(Phases),
    Mixed { lambda: f64, v1: Phases, v2: Phases },
}

fn plan(cfg: &ExperimentConfig) -> Result<Plan, SimError> {
    let spec = &cfg.scheme;
    if spec.kind == SchemeType::Random {
        let input = spec
            .input
            .clone()
            .unwrap_or_else(|| ProductInput::uniform(&cfg.channel));
        return Ok(Plan::Random { input });
    }
    if !matches!(cfg.decoder.rule, Rule::Joint | Rule::Combined) {
        return Err(SimError::PhaseRule(cfg.decoder.rule));
    }
    let summary = channel_summary(&cfg.channel)?;
    let grid = InputGrid::default_for(&cfg.channel);
    let corners = region_corners(&cfg.channel, &summary, grid).ok();
    let phase1 = match &spec.input {
        Some(p) => p.clone(),
        None => max_sum_rate_input(&cfg.channel, grid)?.0,
    };
    match spec.kind {
        SchemeType::Concat => {
            let cs = spec.concat(&summary, corners.as_ref())?;
            Ok(Plan::Concat(Phases::new(&cs, &phase1, &summary)))
        }
        _ => {
            let corners = match corners {
                Some(c) => c,
                None => region_corners(&cfg.channel, &summary, grid)?,
            };
            let lambda = spec.lambda.expect("validated mixed spec");
            let ms = crate::schemes::MixedScheme::from_corners(
                &summary,
                &corners,
                spec.m1,
                spec.m2,
                spec.epsilon_nats(),
                lambda,
            )?;
            Ok(Plan::Mixed {
                lambda,
                v1: Phases::new(&ms.v1, &phase1, &summary),
                v2: Phases::new(&ms.v2, &phase1, &summary),
            })
        }
    }
}

fn random_trial(
    cfg: &ExperimentConfig,
    input: &ProductInput,
    t: u64,
    rng: &mut ChaCha8Rng,
) -> Result<TrialRecord, SimError> {
    let s = &cfg.scheme;
    let cb1 = Codebook::new(s.m1, &input.p1, codebook_seed(s.seed, t, 0), User::One)?;
    let cb2 = Codebook::new(s.m2, &input.p2, codebook_seed(s.seed, t, 1), User::Two)?;
    let truth = [rng.random_range(0..s.m1), rng.random_range(0..s.m2)];
    Ok(decoders::run_trial(&cfg.channel, &cb1, &cb2, truth, &cfg.decoder, rng)?)
}

fn concat_trial(cfg: &ExperimentConfig, ph: &Phases, t: u64, rng: &mut ChaCha8Rng) -> Result<TrialRecord, SimError> {
    let ch = &cfg.channel;
    let seed = cfg.scheme.seed;
    let w_early = rng.random_range(0..ph.m_early);
    let w_a = rng.random_range(0..ph.m_late1);
    let w_b = rng.random_range(0..ph.m_late2);

    // Phase one: both users on the sum-rate input.
    let (m1a, m2a, truth_a) = match ph.order {
        Order::V1 => (ph.m_early, ph.m_late1, [w_early, w_a]),
        Order::V2 => (ph.m_late1, ph.m_early, [w_a, w_early]),
    };
    let cb1 = Codebook::new(m1a, &ph.phase1.p1, codebook_seed(seed, t, 0), User::One)?;
    let cb2 = Codebook::new(m2a, &ph.phase1.p2, codebook_seed(seed, t, 1), User::Two)?;
    let first = decoders::run_trial(ch, &cb1, &cb2, truth_a, &cfg.decoder, rng)?;
    let (got_early, got_a) = match ph.order {
        Order::V1 => (first.decoded[0], first.decoded[1]),
        Order::V2 => (first.decoded[1], first.decoded[0]),
    };
    let n_a = first.n1;

    // Phase two: the early user repeats a fixed letter.
    let (n_b, got_b, capped_b, walks_b) = if ph.m_late2 == 1 {
        (0, Some(0), false, Vec::new())
    } else {
        let (n_x1, n_x2) = (ch.x1_size(), ch.x2_size());
        let (p1, p2, rule, known) = match ph.order {
            Order::V1 => (
                point_mass(n_x1, ph.fixed_letter),
                ph.late_pmf.clone(),
                Rule::GenieCondUser2,
                User::One,
            ),
            Order::V2 => (
                ph.late_pmf.clone(),
                point_mass(n_x2, ph.fixed_letter),
                Rule::GenieCondUser1,
                User::Two,
            ),
        };
        let (m1b, m2b, truth_b) = match ph.order {
            Order::V1 => (1, ph.m_late2, [0, w_b]),
            Order::V2 => (ph.m_late2, 1, [w_b, 0]),
        };
        let cb1 = Codebook::new(m1b, &p1, codebook_seed(seed, t, 2), User::One)?;
        let cb2 = Codebook::new(m2b, &p2, codebook_seed(seed, t, 3), User::Two)?;
        let cfg_b = DecoderConfig { rule, ..cfg.decoder };
        let rec = decoders::run_genie_conditional(ch, &cb1, &cb2, truth_b, known, &cfg_b, rng)?;
        let late_side = usize::from(ph.order == Order::V1);
        (rec.n1.max(rec.n2), rec.decoded[late_side], rec.capped, rec.truth_walks)
    };

    let late_truth = w_a * ph.m_late2 + w_b;
    let late_got = match (got_a, got_b) {
        (Some(a), Some(b)) => Some(a * ph.m_late2 + b),
        _ => None,
    };
    let (n1, n2, decoded, truth) = match ph.order {
        Order::V1 => (n_a, n_a + n_b, [got_early, late_got], [w_early, late_truth]),
        Order::V2 => (n_a + n_b, n_a, [late_got, got_early], [late_truth, w_early]),
    };
    let capped = first.capped || capped_b;
    let error1 = decoded[0] != Some(truth[0]);
    let error2 = decoded[1] != Some(truth[1]);
    let mut truth_walks = first.truth_walks;
    truth_walks.extend(walks_b);
    Ok(TrialRecord {
        n1,
        n2,
        n_min: n1.min(n2),
        decoded,
        truth,
        error: capped || error1 || error2,
        error1,
        error2,
        capped,
        truth_walks,
    })
}

fn one_trial(cfg: &ExperimentConfig, plan: &Plan, t: u64) -> Result<TrialRecord, SimError> {
    let mut rng = trial_rng(cfg.master_seed, t);
    match plan {
        Plan::Random { input } => random_trial(cfg, input, t, &mut rng),
        Plan::Concat(ph) => concat_trial(cfg, ph, t, &mut rng),
        Plan::Mixed { lambda, v1, v2 } => {
            let ph = if rng.random::<f64>() < *lambda { v1 } else { v2 };
            concat_trial(cfg, ph, t, &mut rng)
        }
    }
}

/// Runs every trial on a pool of `cfg.workers` threads, in trial order.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>, SimError> {
    cfg.validate()?;
    let plan = plan(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| one_trial(cfg, &plan, t))
            .collect()
    })
}

/// `ln M1`, `ln M2` reported for the configured scheme (nats).
///
/// Concatenated schemes round the late user's message set to a product of
/// two phase sizes; the nominal sizes from the spec are reported.
pub fn log_sizes(cfg: &ExperimentConfig) -> (f64, f64) {
    ((cfg.scheme.m1 as f64).ln(), (cfg.scheme.m2 as f64).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn of(xs: impl Iterator<Item = f64> + Clone) -> Estimate {
        let n = xs.clone().count() as f64;
        if n == 0.0 {
            return Estimate {
                mean: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let mean = xs.clone().sum::<f64>() / n;
        let stderr = if n > 1.0 {
            let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Estimate { mean, stderr }
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    pub trials_used: u64,
    pub errors: u64,
    pub pe_hat: f64,
    pub pe_wilson95: (f64, f64),
    pub pe1_hat: f64,
    pub pe2_hat: f64,
    pub en1: Estimate,
    pub en2: Estimate,
    pub en_min: Estimate,
    /// `E[N]/E[N1]`; undefined when a side is revealed (zero decode time).
    pub r1_hat: Option<f64>,
    pub r2_hat: Option<f64>,
    pub log_m1: f64,
    pub log_m2: f64,
    /// `ln M1 / E[N1]`, nats per use.
    pub rate1: Option<f64>,
    pub rate2: Option<f64>,
    pub capped_fraction: f64,
    pub warnings: Vec<String>,
}

impl SimSummary {
    pub fn rate1_bits(&self) -> Option<f64> {
        self.rate1.map(to_bits)
    }

    pub fn rate2_bits(&self) -> Option<f64> {
        self.rate2.map(to_bits)
    }
}

/// Aggregates records; sums run in record order.
pub fn summarize(records: &[TrialRecord], log_m1: f64, log_m2: f64) -> SimSummary {
    let n = records.len() as u64;
    let count = |f: fn(&TrialRecord) -> bool| records.iter().filter(|r| f(r)).count() as u64;
    let errors = count(|r| r.error);
    let capped = count(|r| r.capped);
    let frac = |k: u64| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    let en1 = Estimate::of(records.iter().map(|r| r.n1 as f64));
    let en2 = Estimate::of(records.iter().map(|r| r.n2 as f64));
    let en_min = Estimate::of(records.iter().map(|r| r.n_min as f64));
    let ratio = |num: f64, den: f64| (num > 0.0 && den > 0.0).then(|| num / den);
    let rate = |lm: f64, en: f64| (en > 0.0).then(|| lm / en);
    let capped_fraction = frac(capped);
    let mut warnings = Vec::new();
    if capped_fraction > CAPPED_WARNING {
        let msg = format!(
            "{:.2}% of trials hit the step cap and were counted as errors",
            100.0 * capped_fraction
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    SimSummary {
        trials_used: n,
        errors,
        pe_hat: frac(errors),
        pe_wilson95: wilson_interval(errors, n, Z95),
        pe1_hat: frac(count(|r| r.error1 || r.capped)),
        pe2_hat: frac(count(|r| r.error2 || r.capped)),
        en1,
        en2,
        en_min,
        r1_hat: ratio(en_min.mean, en1.mean),
        r2_hat: ratio(en_min.mean, en2.mean),
        log_m1,
        log_m2,
        rate1: rate(log_m1, en1.mean),
        rate2: rate(log_m2, en2.mean),
        capped_fraction,
        warnings,
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SimSummary, SimError> {
    let records = run_trials(cfg)?;
    let (l1, l2) = log_sizes(cfg);
    Ok(summarize(&records, l1, l2))
}

fn estimate_json(e: &Estimate) -> serde_json::Value {
    json!({ "mean": e.mean, "stderr": e.stderr, "unit": "channel uses" })
}

fn rate_json(r: Option<f64>) -> serde_json::Value {
    match r {
        Some(v) => json!({ "nats_per_use": v, "bits_per_use": v * BITS }),
        None => serde_json::Value::Null,
    }
}

/// Summary with a config echo and explicit units. The worker count is left
/// out so that output is identical for any pool size.
pub fn summary_json(cfg: &ExperimentConfig, s: &SimSummary) -> String {
    let v = json!({
        "config": {
            "channel": cfg.channel,
            "scheme": cfg.scheme,
            "decoder": cfg.decoder,
            "trials": cfg.trials,
            "master_seed": cfg.master_seed,
        },
        "summary": {
            "trials_used": s.trials_used,
            "errors": s.errors,
            "pe_hat": s.pe_hat,
            "pe_wilson95": [s.pe_wilson95.0, s.pe_wilson95.1],
            "pe1_hat": s.pe1_hat,
            "pe2_hat": s.pe2_hat,
            "en1": estimate_json(&s.en1),
            "en2": estimate_json(&s.en2),
            "en_min": estimate_json(&s.en_min),
            "r1_hat": s.r1_hat,
            "r2_hat": s.r2_hat,
            "log_m1": { "nats": s.log_m1, "bits": s.log_m1 * BITS },
            "log_m2": { "nats": s.log_m2, "bits": s.log_m2 * BITS },
            "rate1": rate_json(s.rate1),
            "rate2": rate_json(s.rate2),
            "capped_fraction": s.capped_fraction,
            "warnings": s.warnings,
        }
    });
    serde_json::to_string_pretty(&v).expect("summary serializes")
}

/// `trial,n1,n2,error,capped`, one row per trial.
pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("trial,n1,n2,error,capped\n");
    for (t, r) in records.iter().enumerate() {
        out.push_str(&format!(
            "{t},{},{},{},{}\n",
            r.n1,
            r.n2,
            u8::from(r.error),
            u8::from(r.capped)
        ));
    }
    out
}

/// Crossing times of the true message's walk in `family`, skipping trials
/// where it never crossed.
pub fn truth_crossings(records: &[TrialRecord], family: Family) -> Vec<(u64, f64)> {
    records
        .iter()
        .filter_map(|r| r.truth_walk(family))
        .filter_map(|w| w.crossed_at.map(|n| (n, w.score)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaldReport {
    pub samples: usize,
    pub threshold: f64,
    pub mean_final_score: Estimate,
    pub mean_n: Estimate,
    /// `drift * E[N]`
    pub predicted_score: f64,
    /// `drift * E[N] - threshold`: the mean overshoot implied by Wald's identity.
    pub gap: f64,
    pub gap_stderr: f64,
    pub gap_ratio: f64,
    /// Mean of `S(N) - drift * N`, zero under Wald's identity.
    pub residual: Estimate,
    pub max_increment: f64,
    pub pass: bool,
}

/// Wald's identity on the true message's walk: its mean final score matches
/// `drift * E[N]`, and the implied overshoot lies in `[0, max_increment]`,
/// both within 3 standard errors.
pub fn wald_check(records: &[TrialRecord], family: Family, drift: f64, max_increment: f64) -> WaldReport {
    let crossings = truth_crossings(records, family);
    let threshold = records
        .iter()
        .find_map(|r| r.truth_walk(family))
        .map_or(f64::NAN, |w| w.threshold);
    let mean_final_score = Estimate::of(crossings.iter().map(|c| c.1));
    let mean_n = Estimate::of(crossings.iter().map(|c| c.0 as f64));
    let residual = Estimate::of(crossings.iter().map(|&(n, s)| s - drift * n as f64));
    let predicted_score = drift * mean_n.mean;
    let gap = predicted_score - threshold;
    let gap_stderr = drift.abs() * mean_n.stderr;
    let pass = !crossings.is_empty()
        && gap >= -3.0 * gap_stderr
        && gap <= max_increment + 3.0 * gap_stderr
        && residual.mean.abs() <= 3.0 * residual.stderr + 1e-12;
    WaldReport {
        samples: crossings.len(),
        threshold,
        mean_final_score,
        mean_n,
        predicted_score,
        gap,
        gap_stderr,
        gap_ratio: gap / threshold,
        residual,
        max_increment,
        pass,
    }
}

/// Empirical `Pr(|N - mean(N)| > eps_star * mean(N))`.
pub fn concentration_tail(ns: &[u64], eps_star: f64) -> f64 {
    if ns.is_empty() {
        return 0.0;
    }
    let mean = ns.iter().map(|&n| n as f64).sum::<f64>() / ns.len() as f64;
    let far = ns
        .iter()
        .filter(|&&n| (n as f64 - mean).abs() > eps_star * mean)
        .count();
    far as f64 / ns.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub eps_star: f64,
    pub tail_base: f64,
    pub tail_scaled: f64,
    pub pass: bool,
}

/// Passes when the tail shrinks from `base` to `scaled` (crossing times at
/// a larger threshold), or is already zero in both.
pub fn concentration_check(base: &[u64], scaled: &[u64], eps_star: f64) -> ConcentrationReport {
    let tail_base = concentration_tail(base, eps_star);
    let tail_scaled = concentration_tail(scaled, eps_star);
    ConcentrationReport {
        eps_star,
        tail_base,
        tail_scaled,
        pass: tail_scaled < tail_base || (tail_base == 0.0 && tail_scaled == 0.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlackReport {
    pub samples: usize,
    pub mean_n: f64,
    /// Plug-in entropy of the empirical law of `N`, nats.
    pub h_plugin: f64,
    /// Plug-in entropy plus the Miller-Madow bias correction.
    pub h_corrected: f64,
    /// `ln(e * E[N])`
    pub bound: f64,
    /// Three standard errors of the entropy estimate.
    pub estimation_slack: f64,
    pub pass: bool,
}

/// Checks `H(N) <= ln(e E[N])` on an empirical sample of stopping times.
pub fn entropy_slack_check(ns: &[u64]) -> Result<SlackReport, SimError> {
    if ns.len() < MIN_SLACK_RECORDS {
        return Err(SimError::TooFewRecords {
            need: MIN_SLACK_RECORDS,
            got: ns.len(),
        });
    }
    let n = ns.len() as f64;
    let mut sorted = ns.to_vec();
    sorted.sort_unstable();
    let mut counts = Vec::new();
    for chunk in sorted.chunk_by(|a, b| a == b) {
        counts.push(chunk.len() as f64);
    }
    let logs: Vec<(f64, f64)> = counts.iter().map(|&c| (c, -(c / n).ln())).collect();
    let h_plugin: f64 = logs.iter().map(|&(c, l)| c / n * l).sum();
    let second: f64 = logs.iter().map(|&(c, l)| c / n * l * l).sum();
    let var = (second - h_plugin * h_plugin).max(0.0);
    let h_corrected = h_plugin + (counts.len() as f64 - 1.0) / (2.0 * n);
    let estimation_slack = 3.0 * (var / n).sqrt();
    let mean_n = sorted.iter().map(|&x| x as f64).sum::<f64>() / n;
    let bound = lemma_slack(mean_n);
    Ok(SlackReport {
        samples: ns.len(),
        mean_n,
        h_plugin,
        h_corrected,
        bound,
        estimation_slack,
        pass: h_corrected <= bound + estimation_slack,
    })
}

/// Decision times of the decoded users: `n1` and `n2` of every record,
/// leaving out revealed (zero) sides.
pub fn decision_times(records: &[TrialRecord]) -> Vec<u64> {
    records.iter().flat_map(|r| [r.n1, r.n2]).filter(|&n| n > 0).collect()
}
