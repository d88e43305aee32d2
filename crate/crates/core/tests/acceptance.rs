//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use macvlc::cli::{self, Cli, CliError};
use macvlc::decoders::{DecoderConfig, Family, Rule};
use macvlc::format::{from_bits, to_bits};
use macvlc::infomeasures::{
    channel_summary, chernoff_root, info_triple, marginal_informations, ProductInput, WalkKind,
};
use macvlc::regions::{
    block_capacity_region, eq1_point, outer_region, rectangle_region, region_corners, timeshare_rates, InputGrid,
    RegionQuery,
};
use macvlc::sim::{run_trials, summarize, wilson_interval, ExperimentConfig};
use macvlc::{Builtin, McChannel, SchemeSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn adder() -> McChannel {
    McChannel::builtin(Builtin::Adder).unwrap()
}

fn noisy() -> McChannel {
    McChannel::builtin(Builtin::NoisyAdder(0.1)).unwrap()
}

fn within_time(t: Duration, limit: Duration) -> (bool, String) {
    (
        t <= limit,
        format!("{:.2}s (limit {}s)", t.as_secs_f64(), limit.as_secs()),
    )
}

fn cli_output(args: &[&str]) -> Result<String, CliError> {
    let mut full = vec!["macvlc"];
    full.extend_from_slice(args);
    let parsed = Cli::try_parse_from(full).map_err(|e| CliError::Usage(e.to_string()))?;
    cli::run(&parsed)
}

fn crit1() -> Outcome {
    let start = Instant::now();
    let ch = adder();
    let s = channel_summary(&ch).unwrap();
    let t = info_triple(&ch, &ProductInput::uniform(&ch)).unwrap();
    let (ok_t, time) = within_time(start.elapsed(), Duration::from_secs(1));
    let got = [
        to_bits(s.c1),
        to_bits(s.c2),
        to_bits(t.i1),
        to_bits(t.i2),
        to_bits(t.i12),
    ];
    let want = [1.0, 1.0, 1.0, 1.0, 1.5];
    let err = got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    outcome(
        err <= 1e-4 && ok_t,
        format!(
            "adder C1={:.6} C2={:.6} bits, triple ({:.6}, {:.6}, {:.6}) bits, max error {err:.1e}, {time}",
            got[0], got[1], got[2], got[3], got[4]
        ),
    )
}

fn random_pmf(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn random_instance(rng: &mut ChaCha8Rng) -> (McChannel, ProductInput) {
    let (a, b, c) = (
        rng.random_range(2..=3),
        rng.random_range(2..=3),
        rng.random_range(2..=4),
    );
    let mut t = Vec::with_capacity(a * b * c);
    for _ in 0..a * b {
        t.extend(random_pmf(rng, c));
    }
    let ch = McChannel::new(a, b, c, t).unwrap();
    let input = ProductInput::new(&random_pmf(rng, a), &random_pmf(rng, b)).unwrap();
    (ch, input)
}

/// log E[exp(lambda Z)] for a partially wrong joint hypothesis, straight from the channel.
/// `wrong_user` is the user whose hypothesised codeword is independent of Y.
fn partial_log_mgf(ch: &McChannel, p: &ProductInput, wrong_user: usize, lambda: f64) -> f64 {
    let (a, b, c) = (ch.x1_size(), ch.x2_size(), ch.y_size());
    let py: Vec<f64> = (0..c)
        .map(|y| {
            (0..a)
                .flat_map(|i| (0..b).map(move |j| (i, j)))
                .map(|(i, j)| p.p1[i] * p.p2[j] * ch.prob(i, j, y))
                .sum()
        })
        .collect();
    let mut total = 0.0;
    for i in 0..a {
        for j in 0..b {
            for (y, &q) in py.iter().enumerate() {
                // Law of Y given the correct user's true symbol.
                let law = if wrong_user == 1 {
                    (0..a).map(|k| p.p1[k] * ch.prob(k, j, y)).sum::<f64>()
                } else {
                    (0..b).map(|k| p.p2[k] * ch.prob(i, k, y)).sum::<f64>()
                };
                total += p.p1[i] * p.p2[j] * law * (ch.prob(i, j, y) / q).powf(lambda);
            }
        }
    }
    total.ln()
}

/// First sign change of `f` on a grid of step 1e-4 over (0, 1.5], refined by bisection.
fn grid_root(f: impl Fn(f64) -> f64) -> Option<f64> {
    let step = 1e-4;
    let mut prev = step;
    if f(prev) >= 0.0 {
        return None;
    }
    for k in 2..=15_000 {
        let x = k as f64 * step;
        if f(x) >= 0.0 {
            let (mut lo, mut hi) = (prev, x);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if f(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = x;
    }
    None
}

fn crit2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut unit_err, mut partial_err) = (0.0f64, 0.0f64);
    let mut compared = 0;
    let mut mismatched = 0;
    for _ in 0..20 {
        let (ch, p) = random_instance(&mut rng);
        for k in [
            WalkKind::JointBothWrong,
            WalkKind::CondWrongGivenX2,
            WalkKind::CondWrongGivenX1,
        ] {
            match chernoff_root(&ch, &p, k) {
                Ok(r) => unit_err = unit_err.max((r - 1.0).abs()),
                Err(_) => unit_err = f64::INFINITY,
            }
        }
        for (kind, wrong) in [(WalkKind::JointW1Wrong, 1), (WalkKind::JointW2Wrong, 2)] {
            let oracle = grid_root(|l| partial_log_mgf(&ch, &p, wrong, l));
            match (chernoff_root(&ch, &p, kind).ok(), oracle) {
                (Some(r), Some(o)) => {
                    partial_err = partial_err.max((r - o).abs());
                    compared += 1;
                }
                (None, None) => {}
                _ => mismatched += 1,
            }
        }
    }
    let (ok_t, time) = within_time(start.elapsed(), Duration::from_secs(5));
    outcome(
        unit_err <= 1e-9 && partial_err <= 1e-6 && mismatched == 0 && compared > 0 && ok_t,
        format!(
            "20 random instances: unit roots max |r-1| = {unit_err:.1e}, partial roots vs grid oracle max {partial_err:.1e} over {compared} roots, {mismatched} existence mismatches, {time}"
        ),
    )
}

fn crit3() -> Outcome {
    let start = Instant::now();
    let ch = adder();
    let grid = InputGrid::new(101).unwrap();
    let rmac = block_capacity_region(&ch, grid).unwrap();
    let full = outer_region(&ch, RegionQuery::new(1.0, 1.0, 1.0).unwrap(), grid).unwrap();
    let rect = rectangle_region(&channel_summary(&ch).unwrap());
    let zero = outer_region(&ch, RegionQuery::new(0.0, 0.0, 1.0).unwrap(), grid).unwrap();
    let (d1, d0) = (full.distance(&rmac), zero.distance(&rect));
    let (ok_t, time) = within_time(start.elapsed(), Duration::from_secs(10));
    outcome(
        d1 <= 1e-6 && d0 <= 1e-6 && ok_t,
        format!("adder grid 101: d(outer(1,1,1), R_MAC) = {d1:.1e}, d(outer(0,0), rectangle) = {d0:.1e} nats, {time}"),
    )
}

fn crit4() -> Outcome {
    let ch = adder();
    let s = channel_summary(&ch).unwrap();
    let corners = region_corners(&ch, &s, InputGrid::default_for(&ch)).unwrap();
    let bits = |p: (f64, f64)| (to_bits(p.0), to_bits(p.1));
    let p0 = bits(eq1_point(&s, &corners, 0.0));
    let p1 = bits(eq1_point(&s, &corners, 1.0));
    let endpoint_err = [p0.0 - 2.0 / 3.0, p0.1 - 1.0, p1.0 - 1.0, p1.1 - 2.0 / 3.0]
        .iter()
        .map(|d| d.abs())
        .fold(0.0, f64::max);
    let mut gaps = Vec::new();
    let mut ok = endpoint_err <= 1e-9;
    for eps_bits in [0.1, 0.01, 0.001] {
        let eps = from_bits(eps_bits);
        let ratio = (s.c1 - eps) / (s.c2 - eps);
        let gap = (0..=100)
            .map(|k| {
                let lambda = k as f64 / 100.0;
                let a = bits(timeshare_rates(&s, &corners, lambda, ratio, 1.0, eps));
                let b = bits(eq1_point(&s, &corners, lambda));
                (a.0 - b.0).abs().max((a.1 - b.1).abs())
            })
            .fold(0.0, f64::max);
        ok &= gap <= 10.0 * eps_bits;
        gaps.push(gap);
    }
    ok &= gaps.windows(2).all(|w| w[1] < w[0]);
    outcome(
        ok,
        format!(
            "p=0 ({:.9}, {:.9}), p=1 ({:.9}, {:.9}) bits; lambda-sweep max gap {:.2e}/{:.2e}/{:.2e} bits at eps 0.1/0.01/0.001",
            p0.0, p0.1, p1.0, p1.1, gaps[0], gaps[1], gaps[2]
        ),
    )
}

fn joint_setup(rule: Rule, trials: u64) -> ExperimentConfig {
    ExperimentConfig {
        channel: noisy(),
        scheme: SchemeSpec::random(64, 64, 1),
        decoder: DecoderConfig::new(rule, 0.2).unwrap(),
        trials,
        master_seed: 1,
        workers: 1,
    }
}

fn crit5() -> Outcome {
    let start = Instant::now();
    let cfg = joint_setup(Rule::Joint, 10_000);
    let recs = run_trials(&cfg).unwrap();
    let s = summarize(&recs, 64f64.ln(), 64f64.ln());
    let ch = noisy();
    let i12 = info_triple(&ch, &ProductInput::uniform(&ch)).unwrap().i12;
    let predicted = 1.2 * (4096f64).ln() / i12;
    let rel = (s.en_min.mean - predicted).abs() / predicted;
    let (ok_t, time) = within_time(start.elapsed(), Duration::from_secs(120));
    outcome(
        rel <= 0.10 && ok_t,
        format!(
            "E[N] = {:.3} +- {:.3} vs {predicted:.3} predicted ({:.1}% off), {time}",
            s.en_min.mean,
            s.en_min.stderr,
            100.0 * rel
        ),
    )
}

fn crit6() -> Outcome {
    let cfg = joint_setup(Rule::Combined, 10_000);
    let recs = run_trials(&cfg).unwrap();
    let n = recs.len() as u64;
    let errors = recs.iter().filter(|r| r.error).count() as u64;
    let pe = errors as f64 / n as f64;
    let (lo, hi) = wilson_interval(errors, n, 1.959964);
    let m: f64 = 64.0;
    let bound = (m * m).powf(-0.2) + 2.0 * m.powf(-0.2) + 3.0 * (hi - lo);
    let mut violations = 0;
    for r in &recs {
        let slowest = [Family::Joint, Family::GivenX2, Family::GivenX1]
            .iter()
            .map(|&f| r.truth_walk(f).and_then(|w| w.crossed_at).unwrap_or(u64::MAX))
            .max()
            .unwrap();
        if r.n_min > slowest {
            violations += 1;
        }
    }
    outcome(
        pe <= bound && violations == 0,
        format!("Pe = {pe:.4} (bound {bound:.4}); N_comb above slowest truth crossing in {violations} of {n} trials"),
    )
}

fn parse_sweep(csv: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[3].parse().unwrap_or(f64::NAN), f[4].parse().unwrap_or(f64::NAN))
        })
        .collect()
}

fn crit7() -> Outcome {
    let ch = noisy();
    let u = ProductInput::uniform(&ch);
    let t = info_triple(&ch, &u).unwrap();
    let (m1, m2) = marginal_informations(&ch, &u).unwrap();
    let deflate = |x: f64| to_bits(x) / 1.2;
    let predicted = [
        (deflate(t.i12 / 2.0), deflate(t.i12 / 2.0)),
        (deflate(t.i1), deflate(t.i12 - t.i1)),
    ];
    let rows = match cli_output(&[
        "sweep",
        "--builtin",
        "noisy_adder(0.1)",
        "--m-ratio-grid",
        "1,corner_a",
        "--m2",
        "16",
        "--trials",
        "1000",
        "--seed",
        "7",
    ]) {
        Ok(csv) => parse_sweep(&csv),
        Err(e) => return outcome(false, format!("sweep failed: {e}")),
    };
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    let mut worst = 0.0f64;
    for (got, want) in rows.iter().zip(&predicted) {
        worst = worst.max(rel(got.0, want.0)).max(rel(got.1, want.1));
    }
    if rows.len() != 2 {
        worst = f64::INFINITY;
    }
    let succ = match cli_output(&[
        "sweep",
        "--builtin",
        "noisy_adder(0.1)",
        "--m-ratio-grid",
        "1",
        "--m2",
        "64",
        "--trials",
        "1000",
        "--decoder",
        "successive",
        "--seed",
        "7",
    ]) {
        Ok(csv) => parse_sweep(&csv),
        Err(e) => return outcome(false, format!("successive sweep failed: {e}")),
    };
    let floor = (0.85 * deflate(m1), 0.85 * deflate(m2));
    let succ_ok = succ.len() == 1 && succ[0].0 >= floor.0 && succ[0].1 >= floor.1;
    outcome(
        worst <= 0.15 && succ_ok,
        format!(
            "ratio 1: ({:.4}, {:.4}) vs ({:.4}, {:.4}); corner: ({:.4}, {:.4}) vs ({:.4}, {:.4}) bits, worst {:.1}% off; successive ({:.4}, {:.4}) >= ({:.4}, {:.4})",
            rows.first().map_or(f64::NAN, |r| r.0),
            rows.first().map_or(f64::NAN, |r| r.1),
            predicted[0].0,
            predicted[0].1,
            rows.get(1).map_or(f64::NAN, |r| r.0),
            rows.get(1).map_or(f64::NAN, |r| r.1),
            predicted[1].0,
            predicted[1].1,
            100.0 * worst,
            succ.first().map_or(f64::NAN, |r| r.0),
            succ.first().map_or(f64::NAN, |r| r.1),
            floor.0,
            floor.1
        ),
    )
}

fn check_suite(suite: &str) -> (bool, String) {
    match cli_output(&[
        "check",
        "--builtin",
        "noisy_adder(0.1)",
        "--suite",
        suite,
        "--seed",
        "3",
    ]) {
        Ok(report) => (!report.contains("SKIP"), report),
        Err(CliError::CheckFailed { report, .. }) => (false, report),
        Err(e) => (false, e.to_string()),
    }
}

fn crit8() -> Outcome {
    let (conc_ok, conc) = check_suite("concentration");
    let (slack_ok, slack) = check_suite("slack");
    let rules = slack.lines().filter(|l| l.starts_with("PASS")).count();
    outcome(
        conc_ok && slack_ok && rules == 6,
        format!(
            "{}; entropy bound holds for {rules}/6 rules",
            conc.trim().trim_start_matches("PASS ").trim_start_matches("FAIL ")
        ),
    )
}

fn crit9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mixed = dir.path().join("mixed.json");
    std::fs::write(&mixed, r#"{"type":"mixed","m1":64,"m2":64,"lambda":0.5,"seed":11}"#).unwrap();
    let mixed = mixed.to_str().unwrap().to_string();
    let runs: [Vec<&str>; 2] = [
        vec![
            "simulate",
            "--builtin",
            "noisy_adder(0.1)",
            "--trials",
            "400",
            "--seed",
            "5",
        ],
        vec![
            "simulate",
            "--builtin",
            "noisy_adder(0.1)",
            "--scheme",
            &mixed,
            "--trials",
            "200",
            "--seed",
            "5",
        ],
    ];
    let mut same = true;
    let mut sizes = Vec::new();
    for base in &runs {
        let mut outs = Vec::new();
        for w in ["1", "4", "3"] {
            let mut args = base.clone();
            args.extend(["--workers", w]);
            match cli_output(&args) {
                Ok(o) => outs.push(o),
                Err(e) => return outcome(false, format!("simulate failed: {e}")),
            }
        }
        same &= outs.windows(2).all(|w| w[0] == w[1]);
        sizes.push(outs[0].len());
    }
    outcome(
        same,
        format!(
            "random and mixed schemes, workers 1/4/3: JSON byte-identical ({} and {} bytes)",
            sizes[0], sizes[1]
        ),
    )
}

fn main() -> ExitCode {
    if std::env::var_os(macvlc::cli::SEED_ENV).is_some() {
        eprintln!(
            "{} is set; the acceptance suite uses fixed seeds",
            macvlc::cli::SEED_ENV
        );
        return ExitCode::FAILURE;
    }
    let criteria: [Criterion; 9] = [
        ("capacity oracle", crit1),
        ("chernoff roots", crit2),
        ("region endpoints", crit3),
        ("corner curve", crit4),
        ("stopping time", crit5),
        ("combined error bound", crit6),
        ("achievability sweep", crit7),
        ("diagnostics", crit8),
        ("determinism", crit9),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
