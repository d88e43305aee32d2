//! Sequential decoders over random codebooks.
//!
//! Every hypothesis carries a running log-likelihood-ratio score; a decoder
//! stops when a score first reaches its threshold `(1 + eps) ln M`. Walks
//! whose likelihood hits zero are eliminated for good.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelError, McChannel};
use crate::infomeasures::{info_triple, marginal_informations, InfoError, OutputLaws, ProductInput};
use crate::schemes::{Codebook, SchemeError, User};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecoderError {
    #[error("output {y} has zero probability under the hypothesis' reference law")]
    DegenerateOutput { y: usize },
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("max_steps must be at least 1")]
    BadMaxSteps,
    #[error("rule {rule:?} cannot be run by {runner}")]
    RuleMismatch { rule: Rule, runner: &'static str },
    #[error("codebook alphabets ({a1}, {a2}) do not match the channel ({x1}, {x2})")]
    AlphabetMismatch { a1: usize, a2: usize, x1: usize, x2: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Info(#[from] InfoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Joint,
    /// Decode user 1 with user 2's message revealed.
    GenieCondUser1,
    /// Decode user 2 with user 1's message revealed.
    GenieCondUser2,
    Combined,
    Successive,
    SuccessiveIc,
}

impl std::str::FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown decoder rule `{s}`"))
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = serde_json::to_value(self).expect("rule serializes");
        f.write_str(v.as_str().expect("unit variant"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    /// Threshold inflation: thresholds are `(1 + epsilon) ln M`.
    pub epsilon: f64,
    /// Step cap; `None` picks a default from the thresholds and drifts.
    pub max_steps: Option<u64>,
    pub rule: Rule,
}

impl DecoderConfig {
    pub fn new(rule: Rule, epsilon: f64) -> Result<Self, DecoderError> {
        let c = DecoderConfig {
            epsilon,
            max_steps: None,
            rule,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = Some(max_steps);
        self
    }

    pub fn validate(&self) -> Result<(), DecoderError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(DecoderError::BadEpsilon(self.epsilon));
        }
        if self.max_steps == Some(0) {
            return Err(DecoderError::BadMaxSteps);
        }
        Ok(())
    }
}

/// Walk families a decoder can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `ln p(y|x1,x2)/p(y)`
    Joint,
    /// `ln p(y|x1,x2)/p(y|x2)`, decoding user 1.
    GivenX2,
    /// `ln p(y|x1,x2)/p(y|x1)`, decoding user 2.
    GivenX1,
    /// `ln p(y|x1)/p(y)`
    Single1,
    /// `ln p(y|x2)/p(y)`
    Single2,
}

/// A hypothesis whose increment is evaluated by [`walk_increment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Pair {
        w1: u64,
        w2: u64,
    },
    /// User-1 candidate `w1` with user 2's codeword `w2` taken as known.
    GivenW2 {
        w1: u64,
        w2: u64,
    },
    /// User-2 candidate `w2` with user 1's codeword `w1` taken as known.
    GivenW1 {
        w1: u64,
        w2: u64,
    },
    User1 {
        w1: u64,
    },
    User2 {
        w2: u64,
    },
}

/// Increment of a hypothesis at (0-based) position `i` for output `y`.
///
/// Reference laws are the model marginals under the codebooks' pmfs.
/// Returns `-inf` when the hypothesis gives `y` zero probability.
pub fn walk_increment(
    ch: &McChannel,
    cb1: &Codebook,
    cb2: &Codebook,
    hyp: Hypothesis,
    y: usize,
    i: u64,
) -> Result<f64, DecoderError> {
    let input = ProductInput {
        p1: cb1.pmf().to_vec(),
        p2: cb2.pmf().to_vec(),
    };
    input.check_against(ch)?;
    let laws = OutputLaws::new(ch, &input);
    let ratio = |num: f64, den: f64| {
        if den == 0.0 {
            Err(DecoderError::DegenerateOutput { y })
        } else {
            Ok((num / den).ln())
        }
    };
    match hyp {
        Hypothesis::Pair { w1, w2 } => {
            let (a, b) = (cb1.codeword_symbol(w1, i)?, cb2.codeword_symbol(w2, i)?);
            ratio(ch.prob(a, b, y), laws.py[y])
        }
        Hypothesis::GivenW2 { w1, w2 } => {
            let (a, b) = (cb1.codeword_symbol(w1, i)?, cb2.codeword_symbol(w2, i)?);
            ratio(ch.prob(a, b, y), laws.py_x2[b][y])
        }
        Hypothesis::GivenW1 { w1, w2 } => {
            let (a, b) = (cb1.codeword_symbol(w1, i)?, cb2.codeword_symbol(w2, i)?);
            ratio(ch.prob(a, b, y), laws.py_x1[a][y])
        }
        Hypothesis::User1 { w1 } => {
            let a = cb1.codeword_symbol(w1, i)?;
            ratio(laws.py_x1[a][y], laws.py[y])
        }
        Hypothesis::User2 { w2 } => {
            let b = cb2.codeword_symbol(w2, i)?;
            ratio(laws.py_x2[b][y], laws.py[y])
        }
    }
}

/// Precomputed increments for every `(family, x1, x2, y)`.
///
/// A zero reference probability only occurs together with a zero numerator
/// (the hypothesised codeword symbol can never produce `y`), and is stored
/// as `-inf` so the walk is eliminated.
#[derive(Debug, Clone)]
pub struct IncrementTables {
    n2: usize,
    ny: usize,
    joint: Vec<f64>,
    given_x2: Vec<f64>,
    given_x1: Vec<f64>,
    single1: Vec<f64>,
    single2: Vec<f64>,
}

fn log_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 || den == 0.0 {
        f64::NEG_INFINITY
    } else {
        (num / den).ln()
    }
}

impl IncrementTables {
    pub fn new(ch: &McChannel, input: &ProductInput) -> Self {
        let laws = OutputLaws::new(ch, input);
        let (n1, n2, ny) = (ch.x1_size(), ch.x2_size(), ch.y_size());
        let mut joint = Vec::with_capacity(n1 * n2 * ny);
        let mut given_x2 = Vec::with_capacity(n1 * n2 * ny);
        let mut given_x1 = Vec::with_capacity(n1 * n2 * ny);
        for x1 in 0..n1 {
            for x2 in 0..n2 {
                for y in 0..ny {
                    let w = ch.prob(x1, x2, y);
                    joint.push(log_ratio(w, laws.py[y]));
                    given_x2.push(log_ratio(w, laws.py_x2[x2][y]));
                    given_x1.push(log_ratio(w, laws.py_x1[x1][y]));
                }
            }
        }
        let single1 = (0..n1)
            .flat_map(|x1| (0..ny).map(move |y| (x1, y)))
            .map(|(x1, y)| log_ratio(laws.py_x1[x1][y], laws.py[y]))
            .collect();
        let single2 = (0..n2)
            .flat_map(|x2| (0..ny).map(move |y| (x2, y)))
            .map(|(x2, y)| log_ratio(laws.py_x2[x2][y], laws.py[y]))
            .collect();
        IncrementTables {
            n2,
            ny,
            joint,
            given_x2,
            given_x1,
            single1,
            single2,
        }
    }

    #[inline]
    pub fn pair(&self, family: Family, x1: usize, x2: usize, y: usize) -> f64 {
        let k = (x1 * self.n2 + x2) * self.ny + y;
        match family {
            Family::Joint => self.joint[k],
            Family::GivenX2 => self.given_x2[k],
            Family::GivenX1 => self.given_x1[k],
            Family::Single1 => self.single1[x1 * self.ny + y],
            Family::Single2 => self.single2[x2 * self.ny + y],
        }
    }
}

/// The true message's walk in one family, followed until it crosses even
/// if the decoder stopped earlier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthWalk {
    pub family: Family,
    pub threshold: f64,
    /// First step with score at or above the threshold; `None` if it never
    /// crossed within the step cap.
    pub crossed_at: Option<u64>,
    /// Score at `crossed_at`, or at the cap.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Decode time of user 1 in channel uses (0 when revealed by a genie).
    pub n1: u64,
    pub n2: u64,
    pub n_min: u64,
    pub decoded: [Option<u64>; 2],
    pub truth: [u64; 2],
    /// Either message wrong, or the cap was hit.
    pub error: bool,
    pub error1: bool,
    pub error2: bool,
    pub capped: bool,
    pub truth_walks: Vec<TruthWalk>,
}

impl TrialRecord {
    fn finish(
        n1: u64,
        n2: u64,
        decoded: [Option<u64>; 2],
        truth: [u64; 2],
        capped: bool,
        truth_walks: Vec<TruthWalk>,
    ) -> Self {
        let error1 = decoded[0] != Some(truth[0]);
        let error2 = decoded[1] != Some(truth[1]);
        TrialRecord {
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
        }
    }

    pub fn truth_walk(&self, family: Family) -> Option<&TruthWalk> {
        self.truth_walks.iter().find(|t| t.family == family)
    }
}

pub const MAX_STEPS_FLOOR: u64 = 1_000;
pub const MAX_STEPS_NO_DRIFT: u64 = 100_000;

/// `(1 + eps) ln M`
pub fn threshold(eps: f64, m: u64) -> f64 {
    (1.0 + eps) * (m as f64).ln()
}

/// Default step cap: 50 expected crossing times of the slowest family.
pub fn default_max_steps(
    ch: &McChannel,
    input: &ProductInput,
    m1: u64,
    m2: u64,
    cfg: &DecoderConfig,
) -> Result<u64, DecoderError> {
    let t = info_triple(ch, input)?;
    let (u1, u2) = marginal_informations(ch, input)?;
    let eps = cfg.epsilon;
    let (t1, t2, t12) = (
        threshold(eps, m1),
        threshold(eps, m2),
        threshold(eps, m1.saturating_mul(m2)),
    );
    let pairs: Vec<(f64, f64)> = match cfg.rule {
        Rule::Joint => vec![(t12, t.i12)],
        Rule::GenieCondUser1 => vec![(t1, t.i1)],
        Rule::GenieCondUser2 => vec![(t2, t.i2)],
        Rule::Combined => vec![(t12, t.i12), (t1, t.i1), (t2, t.i2)],
        Rule::Successive | Rule::SuccessiveIc => vec![(t1, u1), (t2, u2)],
    };
    let mut worst: f64 = 0.0;
    for (thr, d) in pairs {
        if thr > 0.0 && d <= 0.0 {
            return Ok(MAX_STEPS_NO_DRIFT);
        }
        if thr > 0.0 {
            worst = worst.max(thr / d);
        }
    }
    Ok(((50.0 * worst).ceil() as u64).max(MAX_STEPS_FLOOR))
}

/// Shared per-trial state: codebooks, the transmitted pair and the channel.
struct Transmission<'a, R: Rng> {
    ch: &'a McChannel,
    tables: IncrementTables,
    cb1: &'a Codebook,
    cb2: &'a Codebook,
    truth: [u64; 2],
    rng: &'a mut R,
    streams1: Vec<crate::schemes::CodewordStream<'a>>,
    streams2: Vec<crate::schemes::CodewordStream<'a>>,
    x1: Vec<usize>,
    x2: Vec<usize>,
    outputs: Vec<usize>,
    max_steps: u64,
}

impl<'a, R: Rng> Transmission<'a, R> {
    fn new(
        ch: &'a McChannel,
        cb1: &'a Codebook,
        cb2: &'a Codebook,
        truth: [u64; 2],
        cfg: &DecoderConfig,
        rng: &'a mut R,
    ) -> Result<Self, DecoderError> {
        cfg.validate()?;
        if cb1.pmf().len() != ch.x1_size() || cb2.pmf().len() != ch.x2_size() {
            return Err(DecoderError::AlphabetMismatch {
                a1: cb1.pmf().len(),
                a2: cb2.pmf().len(),
                x1: ch.x1_size(),
                x2: ch.x2_size(),
            });
        }
        let input = ProductInput {
            p1: cb1.pmf().to_vec(),
            p2: cb2.pmf().to_vec(),
        };
        let max_steps = match cfg.max_steps {
            Some(m) => m,
            None => default_max_steps(ch, &input, cb1.m(), cb2.m(), cfg)?,
        };
        let streams1 = (0..cb1.m()).map(|w| cb1.stream(w)).collect::<Result<Vec<_>, _>>()?;
        let streams2 = (0..cb2.m()).map(|w| cb2.stream(w)).collect::<Result<Vec<_>, _>>()?;
        // Validates the truth indices.
        cb1.codeword_symbol(truth[0], 0)?;
        cb2.codeword_symbol(truth[1], 0)?;
        Ok(Transmission {
            ch,
            tables: IncrementTables::new(ch, &input),
            cb1,
            cb2,
            truth,
            rng,
            x1: vec![0; cb1.m() as usize],
            x2: vec![0; cb2.m() as usize],
            streams1,
            streams2,
            outputs: Vec::new(),
            max_steps,
        })
    }

    /// Advances every codeword by one symbol and draws the channel output.
    fn step(&mut self) -> Result<usize, DecoderError> {
        for (x, s) in self.x1.iter_mut().zip(self.streams1.iter_mut()) {
            *x = s.next().expect("infinite stream");
        }
        for (x, s) in self.x2.iter_mut().zip(self.streams2.iter_mut()) {
            *x = s.next().expect("infinite stream");
        }
        let y = self.ch.sample_output(
            self.x1[self.truth[0] as usize],
            self.x2[self.truth[1] as usize],
            self.rng,
        )?;
        self.outputs.push(y);
        Ok(y)
    }

    fn m1(&self) -> usize {
        self.cb1.m() as usize
    }

    fn m2(&self) -> usize {
        self.cb2.m() as usize
    }
}

/// Running score of one truth walk.
#[derive(Debug, Clone, Copy)]
struct Tracker {
    walk: TruthWalk,
}

impl Tracker {
    fn new(family: Family, threshold: f64) -> Self {
        Tracker {
            walk: TruthWalk {
                family,
                threshold,
                crossed_at: None,
                score: 0.0,
            },
        }
    }

    fn add(&mut self, inc: f64, n: u64) {
        if self.walk.crossed_at.is_none() {
            self.walk.score += inc;
            if self.walk.score >= self.walk.threshold {
                self.walk.crossed_at = Some(n);
            }
        }
    }

    fn done(&self) -> bool {
        self.walk.crossed_at.is_some()
    }
}

/// Keeps stepping only the truth walks until they all cross or the cap hits.
fn finish_trackers<R: Rng>(
    tx: &mut Transmission<'_, R>,
    trackers: &mut [Tracker],
    mut n: u64,
) -> Result<(), DecoderError> {
    let (t1, t2) = (tx.truth[0] as usize, tx.truth[1] as usize);
    while n < tx.max_steps && trackers.iter().any(|t| !t.done()) {
        n += 1;
        let y = tx.step()?;
        let (a, b) = (tx.x1[t1], tx.x2[t2]);
        for t in trackers.iter_mut() {
            t.add(tx.tables.pair(t.walk.family, a, b, y), n);
        }
    }
    Ok(())
}

fn check_rule(cfg: &DecoderConfig, allowed: &[Rule], runner: &'static str) -> Result<(), DecoderError> {
    if allowed.contains(&cfg.rule) {
        Ok(())
    } else {
        Err(DecoderError::RuleMismatch { rule: cfg.rule, runner })
    }
}

/// Joint rule over all `M1 * M2` pairs with threshold `(1 + eps) ln(M1 M2)`.
pub fn run_joint<R: Rng>(
    ch: &McChannel,
    cb1: &Codebook,
    cb2: &Codebook,
    truth: [u64; 2],
    cfg: &DecoderConfig,
    rng: &mut R,
) -> Result<TrialRecord, DecoderError> {
    check_rule(cfg, &[Rule::Joint], "run_joint")?;
    let mut tx = Transmission::new(ch, cb1, cb2, truth, cfg, rng)?;
    let (m1, m2) = (tx.m1(), tx.m2());
    let thr = threshold(cfg.epsilon, cb1.m().saturating_mul(cb2.m()));
    let mut scores = vec![0.0f64; m1 * m2];
    let mut active: Vec<u32> = (0..(m1 * m2) as u32).collect();
    let truth_idx = truth[0] as usize * m2 + truth[1] as usize;
    let mut tracker = Tracker::new(Family::Joint, thr);

    let mut n = 0;
    while n < tx.max_steps {
        n += 1;
        let y = tx.step()?;
        let mut winner = None;
        for &k in &active {
            let k = k as usize;
            let inc = tx.tables.pair(Family::Joint, tx.x1[k / m2], tx.x2[k % m2], y);
            scores[k] += inc;
            if winner.is_none() && scores[k] >= thr {
                winner = Some(k);
            }
        }
        active.retain(|&k| scores[k as usize] > f64::NEG_INFINITY);
        if !tracker.done() {
            tracker.walk.score = scores[truth_idx];
            if scores[truth_idx] >= thr {
                tracker.walk.crossed_at = Some(n);
            }
        }
        if let Some(k) = winner {
            let mut trackers = [tracker];
            finish_trackers(&mut tx, &mut trackers, n)?;
            let decoded = [Some((k / m2) as u64), Some((k % m2) as u64)];
            return Ok(TrialRecord::finish(n, n, decoded, truth, false, vec![trackers[0].walk]));
        }
    }
    Ok(TrialRecord::finish(n, n, [None, None], truth, true, vec![tracker.walk]))
}

/// Decodes one user with the other's message revealed. The revealed side is
/// reported with decode time 0 and its true message.
pub fn run_genie_conditional<R: Rng>(
    ch: &McChannel,
    cb1: &Codebook,
    cb2: &Codebook,
    truth: [u64; 2],
    known_side: User,
    cfg: &DecoderConfig,
    rng: &mut R,
) -> Result<TrialRecord, DecoderError> {
    let expected = match known_side {
        User::Two => Rule::GenieCondUser1,
        User::One => Rule::GenieCondUser2,
    };
    check_rule(cfg, &[expected], "run_genie_conditional")?;
    let mut tx = Transmission::new(ch, cb1, cb2, truth, cfg, rng)?;
    let (family, m, target) = match known_side {
        User::Two => (Family::GivenX2, tx.m1(), truth[0] as usize),
        User::One => (Family::GivenX1, tx.m2(), truth[1] as usize),
    };
    let thr = threshold(cfg.epsilon, m as u64);
    let mut scores = vec![0.0f64; m];
    let mut active: Vec<u32> = (0..m as u32).collect();
    let mut tracker = Tracker::new(family, thr);
    let (k1, k2) = (truth[0] as usize, truth[1] as usize);

    let report = |n: u64, got: Option<u64>, capped: bool, walk: TruthWalk| {
        let (n1, n2, decoded) = match known_side {
            User::Two => (n, 0, [got, Some(truth[1])]),
            User::One => (0, n, [Some(truth[0]), got]),
        };
        TrialRecord::finish(n1, n2, decoded, truth, capped, vec![walk])
    };

    let mut n = 0;
    while n < tx.max_steps {
        n += 1;
        let y = tx.step()?;
        let mut winner = None;
        for &w in &active {
            let w = w as usize;
            let (a, b) = match known_side {
                User::Two => (tx.x1[w], tx.x2[k2]),
                User::One => (tx.x1[k1], tx.x2[w]),
            };
            scores[w] += tx.tables.pair(family, a, b, y);
            if winner.is_none() && scores[w] >= thr {
                winner = Some(w);
            }
        }
        active.retain(|&w| scores[w as usize] > f64::NEG_INFINITY);
        if !tracker.done() {
            tracker.walk.score = scores[target];
            if scores[target] >= thr {
                tracker.walk.crossed_at = Some(n);
            }
        }
        if let Some(w) = winner {
            let mut trackers = [tracker];
            finish_trackers(&mut tx, &mut trackers, n)?;
            return Ok(report(n, Some(w as u64), false, trackers[0].walk));
        }
    }
    Ok(report(n, None, true, tracker.walk))
}

const JOINT_FLAG: u8 = 1;
const GIVEN_X2_FLAG: u8 = 2;
const GIVEN_X1_FLAG: u8 = 4;
const ALL_FLAGS: u8 = 7;

/// Joint and both conditional families over all pairs; stops at the first
/// step where some pair has crossed in all three (crossings are sticky).
pub fn run_combined<R: Rng>(
    ch: &McChannel,
    cb1: &Codebook,
    cb2: &Codebook,
    truth: [u64; 2],
    cfg: &DecoderConfig,
    rng: &mut R,
) -> Result<TrialRecord, DecoderError> {
    check_rule(cfg, &[Rule::Combined], "run_combined")?;
    let mut tx = Transmission::new(ch, cb1, cb2, truth, cfg, rng)?;
    let (m1, m2) = (tx.m1(), tx.m2());
    let thresholds = [
        threshold(cfg.epsilon, cb1.m().saturating_mul(cb2.m())),
        threshold(cfg.epsilon, cb1.m()),
        threshold(cfg.epsilon, cb2.m()),
    ];
    let families = [Family::Joint, Family::GivenX2, Family::GivenX1];
    let flags_of = [JOINT_FLAG, GIVEN_X2_FLAG, GIVEN_X1_FLAG];
    let pairs = m1 * m2;
    let mut scores = [vec![0.0f64; pairs], vec![0.0f64; pairs], vec![0.0f64; pairs]];
    let mut flags = vec![0u8; pairs];
    let mut active: Vec<u32> = (0..pairs as u32).collect();
    let truth_idx = truth[0] as usize * m2 + truth[1] as usize;
    let mut trackers = [
        Tracker::new(Family::Joint, thresholds[0]),
        Tracker::new(Family::GivenX2, thresholds[1]),
        Tracker::new(Family::GivenX1, thresholds[2]),
    ];

    let mut n = 0;
    while n < tx.max_steps {
        n += 1;
        let y = tx.step()?;
        let mut winner = None;
        for &k in &active {
            let k = k as usize;
            let (a, b) = (tx.x1[k / m2], tx.x2[k % m2]);
            for f in 0..3 {
                let s = &mut scores[f][k];
                *s += tx.tables.pair(families[f], a, b, y);
                if *s >= thresholds[f] {
                    flags[k] |= flags_of[f];
                }
            }
            if winner.is_none() && flags[k] == ALL_FLAGS {
                winner = Some(k);
            }
        }
        // A zero-likelihood pair is -inf in every family at once.
        active.retain(|&k| scores[0][k as usize] > f64::NEG_INFINITY);
        for (f, t) in trackers.iter_mut().enumerate() {
            if !t.done() {
                t.walk.score = scores[f][truth_idx];
                if t.walk.score >= thresholds[f] {
                    t.walk.crossed_at = Some(n);
                }
            }
        }
        if let Some(k) = winner {
            finish_trackers(&mut tx, &mut trackers, n)?;
            let decoded = [Some((k / m2) as u64), Some((k % m2) as u64)];
            let walks = trackers.iter().map(|t| t.walk).collect();
            return Ok(TrialRecord::finish(n, n, decoded, truth, false, walks));
        }
    }
    let walks = trackers.iter().map(|t| t.walk).collect();
    Ok(TrialRecord::finish(n, n, [None, None], truth, true, walks))
}

/// One family of single-message walks sharing a threshold.
struct SingleFamily {
    scores: Vec<f64>,
    active: Vec<u32>,
    threshold: f64,
    decided: Option<(u64, u64)>,
}

impl SingleFamily {
    fn new(m: usize, threshold: f64) -> Self {
        SingleFamily {
            scores: vec![0.0; m],
            active: (0..m as u32).collect(),
            threshold,
            decided: None,
        }
    }

    /// Adds increments and returns the smallest crossing message, if any.
    fn advance(&mut self, inc: impl Fn(usize) -> f64) -> Option<usize> {
        let mut winner = None;
        for &w in &self.active {
            let w = w as usize;
            self.scores[w] += inc(w);
            if winner.is_none() && self.scores[w] >= self.threshold {
                winner = Some(w);
            }
        }
        let scores = &self.scores;
        self.active.retain(|&w| scores[w as usize] > f64::NEG_INFINITY);
        winner
    }
}

/// Single-user decoders treating the other user as noise. With
/// [`Rule::SuccessiveIc`], once one message is decoded the other user is
/// re-scored from the first symbol with the decoded codeword known, and its
/// decode time is `max(conditional crossing, first decode time)`.
pub fn run_successive<R: Rng>(
    ch: &McChannel,
    cb1: &Codebook,
    cb2: &Codebook,
    truth: [u64; 2],
    cfg: &DecoderConfig,
    rng: &mut R,
) -> Result<TrialRecord, DecoderError> {
    check_rule(cfg, &[Rule::Successive, Rule::SuccessiveIc], "run_successive")?;
    let ic = cfg.rule == Rule::SuccessiveIc;
    let mut tx = Transmission::new(ch, cb1, cb2, truth, cfg, rng)?;
    let (m1, m2) = (tx.m1(), tx.m2());
    let (t1, t2) = (truth[0] as usize, truth[1] as usize);
    let mut fam = [
        SingleFamily::new(m1, threshold(cfg.epsilon, cb1.m())),
        SingleFamily::new(m2, threshold(cfg.epsilon, cb2.m())),
    ];
    let mut trackers = vec![
        Tracker::new(Family::Single1, fam[0].threshold),
        Tracker::new(Family::Single2, fam[1].threshold),
    ];
    // In IC mode, the late user's conditional family: (user index, family).
    let mut switched: Option<(usize, SingleFamily)> = None;

    let mut n = 0;
    while n < tx.max_steps && (fam[0].decided.is_none() || fam[1].decided.is_none()) {
        n += 1;
        let y = tx.step()?;
        let tables = &tx.tables;
        let (x1, x2) = (&tx.x1, &tx.x2);

        match switched.as_mut() {
            None => {
                if fam[0].decided.is_none() {
                    if let Some(w) = fam[0].advance(|w| tables.pair(Family::Single1, x1[w], 0, y)) {
                        fam[0].decided = Some((w as u64, n));
                    }
                }
                if fam[1].decided.is_none() {
                    if let Some(w) = fam[1].advance(|w| tables.pair(Family::Single2, 0, x2[w], y)) {
                        fam[1].decided = Some((w as u64, n));
                    }
                }
            }
            Some((late, cond)) => {
                let late = *late;
                let known = fam[1 - late].decided.expect("switch follows a decode").0 as usize;
                let hit = if late == 0 {
                    cond.advance(|w| tables.pair(Family::GivenX2, x1[w], x2[known], y))
                } else {
                    cond.advance(|w| tables.pair(Family::GivenX1, x1[known], x2[w], y))
                };
                if let Some(w) = hit {
                    fam[late].decided = Some((w as u64, n));
                }
            }
        }
        for t in trackers.iter_mut() {
            let inc = match t.walk.family {
                Family::Single1 => tables.pair(Family::Single1, x1[t1], 0, y),
                Family::Single2 => tables.pair(Family::Single2, 0, x2[t2], y),
                f => tables.pair(f, x1[t1], x2[t2], y),
            };
            t.add(inc, n);
        }

        let undecided: Vec<usize> = (0..2).filter(|&u| fam[u].decided.is_none()).collect();
        if ic && switched.is_none() && undecided.len() == 1 {
            let late = undecided[0];
            let known = fam[1 - late].decided.expect("one user decoded").0;
            let (cond, crossed) = replay_conditional(&tx, late, known, fam[late].threshold)?;
            if let Some(w) = crossed {
                fam[late].decided = Some((w, n));
            }
            let family = if late == 0 { Family::GivenX2 } else { Family::GivenX1 };
            // Replace the late user's single-user truth walk by its conditional one.
            let mut tr = Tracker::new(family, cond.threshold);
            tr.walk.score = cond.scores[truth[late] as usize];
            trackers.retain(|t| t.walk.family != if late == 0 { Family::Single1 } else { Family::Single2 });
            if known == truth[1 - late] {
                let (s, at) = replay_truth(&tx, late, known, cond.threshold)?;
                tr.walk.score = s;
                tr.walk.crossed_at = at;
                trackers.push(tr);
            }
            switched = Some((late, cond));
        }
    }

    finish_trackers(&mut tx, &mut trackers, n)?;
    let capped = fam[0].decided.is_none() || fam[1].decided.is_none();
    let n1 = fam[0].decided.map_or(n, |d| d.1);
    let n2 = fam[1].decided.map_or(n, |d| d.1);
    let decoded = [fam[0].decided.map(|d| d.0), fam[1].decided.map(|d| d.0)];
    Ok(TrialRecord::finish(
        n1,
        n2,
        decoded,
        truth,
        capped,
        trackers.iter().map(|t| t.walk).collect(),
    ))
}

/// Conditional scores of every message of user `late` over the outputs so
/// far, given the decoded codeword `known` of the other user. Returns the
/// family and the first (earliest, then smallest) crossing message.
fn replay_conditional<R: Rng>(
    tx: &Transmission<'_, R>,
    late: usize,
    known: u64,
    thr: f64,
) -> Result<(SingleFamily, Option<u64>), DecoderError> {
    let (cb_late, cb_known) = if late == 0 { (tx.cb1, tx.cb2) } else { (tx.cb2, tx.cb1) };
    let family = if late == 0 { Family::GivenX2 } else { Family::GivenX1 };
    let m = cb_late.m() as usize;
    let mut fam = SingleFamily::new(m, thr);
    let known_syms: Vec<usize> = cb_known.stream(known)?.take(tx.outputs.len()).collect();
    let late_syms: Vec<Vec<usize>> = (0..m as u64)
        .map(|w| cb_late.stream(w).map(|s| s.take(tx.outputs.len()).collect()))
        .collect::<Result<_, _>>()?;
    let mut crossed = None;
    for (i, &y) in tx.outputs.iter().enumerate() {
        let hit = fam.advance(|w| {
            let (a, b) = if late == 0 {
                (late_syms[w][i], known_syms[i])
            } else {
                (known_syms[i], late_syms[w][i])
            };
            tx.tables.pair(family, a, b, y)
        });
        if crossed.is_none() {
            crossed = hit.map(|w| w as u64);
        }
    }
    Ok((fam, crossed))
}

/// Score and first crossing of the truth message's conditional walk over the outputs so far.
fn replay_truth<R: Rng>(
    tx: &Transmission<'_, R>,
    late: usize,
    known: u64,
    thr: f64,
) -> Result<(f64, Option<u64>), DecoderError> {
    let family = if late == 0 { Family::GivenX2 } else { Family::GivenX1 };
    let (w1, w2) = if late == 0 {
        (tx.truth[0], known)
    } else {
        (known, tx.truth[1])
    };
    let s1: Vec<usize> = tx.cb1.stream(w1)?.take(tx.outputs.len()).collect();
    let s2: Vec<usize> = tx.cb2.stream(w2)?.take(tx.outputs.len()).collect();
    let mut score = 0.0;
    for (i, &y) in tx.outputs.iter().enumerate() {
        score += tx.tables.pair(family, s1[i], s2[i], y);
        if score >= thr {
            return Ok((score, Some(i as u64 + 1)));
        }
    }
    Ok((score, None))
}

/// Dispatches on `cfg.rule`.
pub fn run_trial<R: Rng>(
    ch: &McChannel,
    cb1: &Codebook,
    cb2: &Codebook,
    truth: [u64; 2],
    cfg: &DecoderConfig,
    rng: &mut R,
) -> Result<TrialRecord, DecoderError> {
    match cfg.rule {
        Rule::Joint => run_joint(ch, cb1, cb2, truth, cfg, rng),
        Rule::GenieCondUser1 => run_genie_conditional(ch, cb1, cb2, truth, User::Two, cfg, rng),
        Rule::GenieCondUser2 => run_genie_conditional(ch, cb1, cb2, truth, User::One, cfg, rng),
        Rule::Combined => run_combined(ch, cb1, cb2, truth, cfg, rng),
        Rule::Successive | Rule::SuccessiveIc => run_successive(ch, cb1, cb2, truth, cfg, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Builtin;
    use crate::infomeasures::uniform;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn books(m1: u64, m2: u64, seed: u64) -> (Codebook, Codebook) {
        (
            Codebook::new(m1, &uniform(2), seed, User::One).unwrap(),
            Codebook::new(m2, &uniform(2), seed + 1, User::Two).unwrap(),
        )
    }

    fn cfg(rule: Rule) -> DecoderConfig {
        DecoderConfig::new(rule, 0.2).unwrap().with_max_steps(5_000)
    }

    #[test]
    fn config_validation() {
        assert!(DecoderConfig::new(Rule::Joint, 0.0).is_err());
        assert!(cfg(Rule::Joint).with_max_steps(0).validate().is_err());
        assert_eq!("successive_ic".parse::<Rule>().unwrap(), Rule::SuccessiveIc);
        assert_eq!(Rule::GenieCondUser1.to_string(), "genie_cond_user1");
        assert!("nope".parse::<Rule>().is_err());
    }

    #[test]
    fn increments_on_the_adder() {
        let ch = McChannel::builtin(Builtin::Adder).unwrap();
        let (cb1, cb2) = books(2, 2, 3);
        let (a, b) = (cb1.codeword_symbol(0, 0).unwrap(), cb2.codeword_symbol(0, 0).unwrap());
        let y = a + b;
        let py: f64 = [0.25, 0.5, 0.25][y];
        let z = walk_increment(&ch, &cb1, &cb2, Hypothesis::Pair { w1: 0, w2: 0 }, y, 0).unwrap();
        assert!((z - (1.0 / py).ln()).abs() < 1e-12);
        // An output the pair cannot produce.
        let other = if y == 0 { 2 } else { 0 };
        let z = walk_increment(&ch, &cb1, &cb2, Hypothesis::Pair { w1: 0, w2: 0 }, other, 0).unwrap();
        assert_eq!(z, f64::NEG_INFINITY);
        // Given x2 the output pins x1, against a reference of 1/2.
        let z = walk_increment(&ch, &cb1, &cb2, Hypothesis::GivenW2 { w1: 0, w2: 0 }, y, 0).unwrap();
        assert!((z - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_reference_is_degenerate() {
        let ch = McChannel::builtin(Builtin::Adder).unwrap();
        let cb1 = Codebook::new(1, &[1.0, 0.0], 1, User::One).unwrap();
        let cb2 = Codebook::new(1, &[1.0, 0.0], 2, User::Two).unwrap();
        let r = walk_increment(&ch, &cb1, &cb2, Hypothesis::Pair { w1: 0, w2: 0 }, 2, 0);
        assert_eq!(r, Err(DecoderError::DegenerateOutput { y: 2 }));
    }

    #[test]
    fn single_hypothesis_crosses_at_first_nonnegative_step() {
        let ch = McChannel::builtin(Builtin::NoisyAdder(0.1)).unwrap();
        let (cb1, cb2) = books(1, 1, 8);
        for rule in [Rule::Joint, Rule::Combined, Rule::GenieCondUser1] {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let rec = run_trial(&ch, &cb1, &cb2, [0, 0], &cfg(rule), &mut rng).unwrap();
            assert!(!rec.error);
            assert!(rec.truth_walks.iter().all(|w| w.crossed_at.is_some()));
            let n = rec.n1.max(rec.n2);
            // Every walk is at or above zero at the stop.
            assert!(rec.truth_walks.iter().all(|w| w.crossed_at.unwrap() <= n));
        }
    }

    #[test]
    fn replay_is_exact() {
        let ch = McChannel::builtin(Builtin::Adder).unwrap();
        let (cb1, cb2) = books(2, 2, 11);
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            run_joint(&ch, &cb1, &cb2, [1, 0], &cfg(Rule::Joint), &mut rng).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn wrong_runner_is_rejected() {
        let ch = McChannel::builtin(Builtin::Adder).unwrap();
        let (cb1, cb2) = books(2, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = run_joint(&ch, &cb1, &cb2, [0, 0], &cfg(Rule::Combined), &mut rng);
        assert!(matches!(r, Err(DecoderError::RuleMismatch { .. })));
    }

    #[test]
    fn noiseless_adder_decodes_correctly() {
        let ch = McChannel::builtin(Builtin::Adder).unwrap();
        for rule in [Rule::Joint, Rule::Combined, Rule::Successive, Rule::SuccessiveIc] {
            for seed in 0..20 {
                let (cb1, cb2) = books(8, 8, 100 + seed);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let truth = [seed % 8, (seed * 3) % 8];
                let rec = run_trial(&ch, &cb1, &cb2, truth, &cfg(rule), &mut rng).unwrap();
                assert!(!rec.capped);
                assert_eq!(rec.n_min, rec.n1.min(rec.n2));
            }
        }
    }

    #[test]
    fn combined_stops_no_later_than_slowest_truth_walk() {
        let ch = McChannel::builtin(Builtin::NoisyAdder(0.1)).unwrap();
        for seed in 0..30 {
            let (cb1, cb2) = books(8, 8, 7 * seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rec = run_combined(&ch, &cb1, &cb2, [3, 5], &cfg(Rule::Combined), &mut rng).unwrap();
            let slowest = rec.truth_walks.iter().map(|w| w.crossed_at.unwrap()).max().unwrap();
            assert!(rec.n1 <= slowest);
        }
    }

    #[test]
    fn ic_never_slower_than_first_decode() {
        let ch = McChannel::builtin(Builtin::NoisyAdder(0.05)).unwrap();
        for seed in 0..20 {
            let (cb1, cb2) = books(16, 4, 31 * seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rec = run_successive(&ch, &cb1, &cb2, [2, 1], &cfg(Rule::SuccessiveIc), &mut rng).unwrap();
            // A wrong first decode can strand the other user; a right one cannot.
            let first = if rec.n1 <= rec.n2 { 0 } else { 1 };
            if rec.decoded[first] == Some(rec.truth[first]) {
                assert!(!rec.capped, "{rec:?}");
            }
            assert!(rec.n1 >= rec.n_min && rec.n2 >= rec.n_min);
        }
    }

    #[test]
    fn genie_reports_known_side_as_free() {
        let ch = McChannel::builtin(Builtin::NoisyAdder(0.1)).unwrap();
        let (cb1, cb2) = books(4, 4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rec =
            run_genie_conditional(&ch, &cb1, &cb2, [1, 2], User::Two, &cfg(Rule::GenieCondUser1), &mut rng).unwrap();
        assert_eq!(rec.n2, 0);
        assert_eq!(rec.decoded[1], Some(2));
        assert_eq!(rec.n_min, 0);
    }

    #[test]
    fn cap_counts_as_error() {
        let ch = McChannel::builtin(Builtin::NoisyAdder(0.1)).unwrap();
        let (cb1, cb2) = books(64, 64, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rec = run_joint(&ch, &cb1, &cb2, [0, 0], &cfg(Rule::Joint).with_max_steps(2), &mut rng).unwrap();
        assert!(rec.capped && rec.error);
        assert_eq!(rec.decoded, [None, None]);
    }
}
