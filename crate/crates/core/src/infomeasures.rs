//! Information quantities for product inputs, single-user capacities, walk
//! drifts and Chernoff roots of walk increments.
//!
//! Everything here is in nats.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::McChannel;

const PMF_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("invalid pmf: {0}")]
    BadPmf(String),
    #[error("input pmf has {got} entries but the alphabet has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("Blahut-Arimoto did not converge within {iterations} iterations (gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },
    #[error("increment of kind {0:?} is never positive; the walk cannot cross (root = +inf)")]
    NoPositiveRoot(WalkKind),
    #[error("increment of kind {kind:?} has non-negative drift {drift}")]
    NonNegativeDrift { kind: WalkKind, drift: f64 },
    #[error("{0:?} is a correct-message kind; roots are defined for wrong kinds only")]
    NotWrongKind(WalkKind),
}

/// Checks a pmf, rescaling away round-off below the tolerance.
pub fn validate_pmf(p: &[f64]) -> Result<Vec<f64>, InfoError> {
    if p.is_empty() {
        return Err(InfoError::BadPmf("empty".into()));
    }
    if let Some(v) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(InfoError::BadPmf(format!("entry {v} is not a probability")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() >= PMF_TOLERANCE {
        return Err(InfoError::BadPmf(format!("sums to {sum}")));
    }
    Ok(p.iter().map(|v| v / sum).collect())
}

pub fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Point mass on `k` in an alphabet of size `n`.
pub fn point_mass(n: usize, k: usize) -> Vec<f64> {
    let mut p = vec![0.0; n];
    p[k] = 1.0;
    p
}

/// Independent input distributions `p(x1) p(x2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductInput {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
}

impl ProductInput {
    pub fn new(p1: &[f64], p2: &[f64]) -> Result<Self, InfoError> {
        Ok(ProductInput {
            p1: validate_pmf(p1)?,
            p2: validate_pmf(p2)?,
        })
    }

    pub fn uniform(ch: &McChannel) -> Self {
        ProductInput {
            p1: uniform(ch.x1_size()),
            p2: uniform(ch.x2_size()),
        }
    }

    pub fn check_against(&self, ch: &McChannel) -> Result<(), InfoError> {
        if self.p1.len() != ch.x1_size() {
            return Err(InfoError::SizeMismatch {
                expected: ch.x1_size(),
                got: self.p1.len(),
            });
        }
        if self.p2.len() != ch.x2_size() {
            return Err(InfoError::SizeMismatch {
                expected: ch.x2_size(),
                got: self.p2.len(),
            });
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        ProductInput {
            p1: self.p2.clone(),
            p2: self.p1.clone(),
        }
    }
}

/// Mixture of at most two product inputs through a time-sharing variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSharedInput {
    pub weights: Vec<f64>,
    pub components: Vec<ProductInput>,
}

impl TimeSharedInput {
    pub fn new(weights: &[f64], components: Vec<ProductInput>) -> Result<Self, InfoError> {
        if !(1..=2).contains(&weights.len()) || weights.len() != components.len() {
            return Err(InfoError::BadPmf(format!(
                "time sharing needs 1 or 2 components with matching weights, got {} weights and {} components",
                weights.len(),
                components.len()
            )));
        }
        Ok(TimeSharedInput {
            weights: validate_pmf(weights)?,
            components,
        })
    }
}

/// `(I(X1;Y|X2), I(X2;Y|X1), I(X1,X2;Y))` in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoTriple {
    pub i1: f64,
    pub i2: f64,
    pub i12: f64,
}

impl InfoTriple {
    pub fn swapped(self) -> Self {
        InfoTriple {
            i1: self.i2,
            i2: self.i1,
            i12: self.i12,
        }
    }

    pub fn scaled(self, k: f64) -> Self {
        InfoTriple {
            i1: k * self.i1,
            i2: k * self.i2,
            i12: k * self.i12,
        }
    }
}

/// Output laws induced by a channel and a product input.
#[derive(Debug, Clone)]
pub struct OutputLaws {
    /// `p(y)`
    pub py: Vec<f64>,
    /// `p(y|x1)`, indexed `[x1][y]`, user 2 marginalized.
    pub py_x1: Vec<Vec<f64>>,
    /// `p(y|x2)`, indexed `[x2][y]`, user 1 marginalized.
    pub py_x2: Vec<Vec<f64>>,
}

impl OutputLaws {
    pub fn new(ch: &McChannel, input: &ProductInput) -> Self {
        let ny = ch.y_size();
        let mut py = vec![0.0; ny];
        let mut py_x1 = vec![vec![0.0; ny]; ch.x1_size()];
        let mut py_x2 = vec![vec![0.0; ny]; ch.x2_size()];
        for (x1, &a) in input.p1.iter().enumerate() {
            for (x2, &b) in input.p2.iter().enumerate() {
                for (y, &w) in ch.row(x1, x2).iter().enumerate() {
                    py[y] += a * b * w;
                    py_x1[x1][y] += b * w;
                    py_x2[x2][y] += a * w;
                }
            }
        }
        OutputLaws { py, py_x1, py_x2 }
    }
}

/// `p * ln(num/den)` with the `0 ln(.) = 0` convention.
#[inline]
fn plogratio(p: f64, num: f64, den: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * (num / den).ln()
    }
}

pub fn info_triple(ch: &McChannel, input: &ProductInput) -> Result<InfoTriple, InfoError> {
    input.check_against(ch)?;
    let laws = OutputLaws::new(ch, input);
    let (mut i1, mut i2, mut i12) = (0.0, 0.0, 0.0);
    for (x1, &a) in input.p1.iter().enumerate() {
        for (x2, &b) in input.p2.iter().enumerate() {
            for (y, &w) in ch.row(x1, x2).iter().enumerate() {
                let m = a * b * w;
                i12 += plogratio(m, w, laws.py[y]);
                i1 += plogratio(m, w, laws.py_x2[x2][y]);
                i2 += plogratio(m, w, laws.py_x1[x1][y]);
            }
        }
    }
    Ok(InfoTriple {
        i1: i1.max(0.0),
        i2: i2.max(0.0),
        i12: i12.max(0.0),
    })
}

/// `(I(X1;Y), I(X2;Y))`: each user's information treating the other as noise.
pub fn marginal_informations(ch: &McChannel, input: &ProductInput) -> Result<(f64, f64), InfoError> {
    input.check_against(ch)?;
    let laws = OutputLaws::new(ch, input);
    let side = |p: &[f64], rows: &[Vec<f64>]| {
        let mut acc = 0.0;
        for (x, &px) in p.iter().enumerate() {
            for (y, &q) in rows[x].iter().enumerate() {
                acc += plogratio(px * q, q, laws.py[y]);
            }
        }
        acc.max(0.0)
    };
    Ok((side(&input.p1, &laws.py_x1), side(&input.p2, &laws.py_x2)))
}

/// Weighted sum of per-component triples.
pub fn info_triple_timeshared(ch: &McChannel, input: &TimeSharedInput) -> Result<InfoTriple, InfoError> {
    let mut acc = InfoTriple {
        i1: 0.0,
        i2: 0.0,
        i12: 0.0,
    };
    for (&w, comp) in input.weights.iter().zip(&input.components) {
        let t = info_triple(ch, comp)?;
        acc.i1 += w * t.i1;
        acc.i2 += w * t.i2;
        acc.i12 += w * t.i12;
    }
    Ok(acc)
}

/// Mutual information of a single-user channel `rows[x][y]` under input `p`.
pub fn single_user_information(rows: &[Vec<f64>], p: &[f64]) -> f64 {
    let ny = rows.first().map_or(0, Vec::len);
    let mut q = vec![0.0; ny];
    for (row, &px) in rows.iter().zip(p) {
        for (qy, &w) in q.iter_mut().zip(row) {
            *qy += px * w;
        }
    }
    let mut acc = 0.0;
    for (row, &px) in rows.iter().zip(p) {
        for (&w, &qy) in row.iter().zip(&q) {
            acc += plogratio(px * w, w, qy);
        }
    }
    acc.max(0.0)
}

pub const BA_TOLERANCE: f64 = 1e-9;
pub const BA_MAX_ITERATIONS: usize = 100_000;

/// Capacity of a single-user channel by Blahut-Arimoto.
///
/// Stops once the bracket `[I(p), max_x D(W(.|x) || q)]` is narrower than
/// `tol` and returns its midpoint with the current input pmf.
pub fn single_user_capacity(rows: &[Vec<f64>]) -> Result<(f64, Vec<f64>), InfoError> {
    single_user_capacity_with(rows, BA_TOLERANCE, BA_MAX_ITERATIONS)
}

pub fn single_user_capacity_with(
    rows: &[Vec<f64>],
    tol: f64,
    max_iterations: usize,
) -> Result<(f64, Vec<f64>), InfoError> {
    let nx = rows.len();
    if nx == 0 {
        return Err(InfoError::BadPmf("channel with no inputs".into()));
    }
    let ny = rows[0].len();
    let mut p = uniform(nx);
    let mut q = vec![0.0; ny];
    let mut d = vec![0.0; nx];
    let mut gap = f64::INFINITY;
    for _ in 0..max_iterations {
        q.iter_mut().for_each(|v| *v = 0.0);
        for (row, &px) in rows.iter().zip(&p) {
            for (qy, &w) in q.iter_mut().zip(row) {
                *qy += px * w;
            }
        }
        // d[x] = D(W(.|x) || q); every y with W>0 for a supported x has q>0,
        // and unsupported x keep a finite divergence because p > 0 throughout.
        for (dx, row) in d.iter_mut().zip(rows) {
            *dx = row.iter().zip(&q).map(|(&w, &qy)| plogratio(w, w, qy)).sum();
        }
        let lower: f64 = p.iter().zip(&d).map(|(px, dx)| px * dx).sum();
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        gap = upper - lower;
        if gap < tol {
            return Ok((0.5 * (upper + lower).max(0.0), p));
        }
        let mut norm = 0.0;
        for (px, dx) in p.iter_mut().zip(&d) {
            *px *= (dx - upper).exp();
            norm += *px;
        }
        p.iter_mut().for_each(|v| *v /= norm);
    }
    Err(InfoError::NoConvergence {
        iterations: max_iterations,
        gap,
    })
}

/// Individual-link capacities `C1 = max I(X1;Y|X2)`, `C2 = max I(X2;Y|X1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSummary {
    pub c1: f64,
    pub c2: f64,
    pub c1_argmax: ProductInput,
    pub c2_argmax: ProductInput,
}

impl ChannelSummary {
    pub fn swapped(&self) -> Self {
        ChannelSummary {
            c1: self.c2,
            c2: self.c1,
            c1_argmax: self.c2_argmax.swapped(),
            c2_argmax: self.c1_argmax.swapped(),
        }
    }
}

/// `I(X1;Y|X2)` is linear in `p(x2)`, so `C1` is attained with user 2 fixed
/// at a single letter; likewise for `C2`.
pub fn channel_summary(ch: &McChannel) -> Result<ChannelSummary, InfoError> {
    let mut best1 = (f64::NEG_INFINITY, Vec::new(), 0);
    for x2 in 0..ch.x2_size() {
        let (c, p) = single_user_capacity(&ch.section_given_x2(x2))?;
        if c > best1.0 {
            best1 = (c, p, x2);
        }
    }
    let mut best2 = (f64::NEG_INFINITY, Vec::new(), 0);
    for x1 in 0..ch.x1_size() {
        let (c, p) = single_user_capacity(&ch.section_given_x1(x1))?;
        if c > best2.0 {
            best2 = (c, p, x1);
        }
    }
    Ok(ChannelSummary {
        c1: best1.0,
        c2: best2.0,
        c1_argmax: ProductInput {
            p1: best1.1,
            p2: point_mass(ch.x2_size(), best1.2),
        },
        c2_argmax: ProductInput {
            p1: point_mass(ch.x1_size(), best2.2),
            p2: best2.1,
        },
    })
}

/// Which walk an increment belongs to, and whether its hypothesis is the
/// transmitted one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkKind {
    JointCorrect,
    JointBothWrong,
    /// Joint walk with the wrong user-1 message and the right user-2 message.
    JointW1Wrong,
    /// Joint walk with the right user-1 message and the wrong user-2 message.
    JointW2Wrong,
    /// Decoding user 1 with user 2's codeword known.
    CondCorrectGivenX2,
    CondWrongGivenX2,
    /// Decoding user 2 with user 1's codeword known.
    CondCorrectGivenX1,
    CondWrongGivenX1,
    SingleCorrectUser1,
    SingleWrongUser1,
    SingleCorrectUser2,
    SingleWrongUser2,
}

impl WalkKind {
    pub const ALL: [WalkKind; 12] = [
        WalkKind::JointCorrect,
        WalkKind::JointBothWrong,
        WalkKind::JointW1Wrong,
        WalkKind::JointW2Wrong,
        WalkKind::CondCorrectGivenX2,
        WalkKind::CondWrongGivenX2,
        WalkKind::CondCorrectGivenX1,
        WalkKind::CondWrongGivenX1,
        WalkKind::SingleCorrectUser1,
        WalkKind::SingleWrongUser1,
        WalkKind::SingleCorrectUser2,
        WalkKind::SingleWrongUser2,
    ];

    pub fn is_correct(self) -> bool {
        matches!(
            self,
            WalkKind::JointCorrect
                | WalkKind::CondCorrectGivenX2
                | WalkKind::CondCorrectGivenX1
                | WalkKind::SingleCorrectUser1
                | WalkKind::SingleCorrectUser2
        )
    }

    /// Wrong kinds whose increment satisfies `E[exp Z] = 1`.
    pub fn has_unit_root(self) -> bool {
        matches!(
            self,
            WalkKind::JointBothWrong
                | WalkKind::CondWrongGivenX2
                | WalkKind::CondWrongGivenX1
                | WalkKind::SingleWrongUser1
                | WalkKind::SingleWrongUser2
        )
    }
}

/// One atom of an increment distribution: `Pr(Z = value) += prob`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub prob: f64,
    /// Log-likelihood ratio in nats; `-inf` when the hypothesis is impossible.
    pub value: f64,
}

/// Distribution of a single increment of the given walk kind.
///
/// Correct kinds draw the output from the hypothesised codeword symbols;
/// wrong kinds draw the hypothesised symbols independently of the output,
/// with the output following the law induced by whatever part of the
/// hypothesis is correct.
pub fn increment_law(ch: &McChannel, input: &ProductInput, kind: WalkKind) -> Result<Vec<Atom>, InfoError> {
    input.check_against(ch)?;
    let laws = OutputLaws::new(ch, input);
    let (p1, p2) = (&input.p1, &input.p2);
    let mut atoms = Vec::new();
    let mut push = |prob: f64, num: f64, den: f64| {
        if prob > 0.0 {
            atoms.push(Atom {
                prob,
                value: (num / den).ln(),
            });
        }
    };
    for (x1, &a) in p1.iter().enumerate() {
        for (x2, &b) in p2.iter().enumerate() {
            let row = ch.row(x1, x2);
            for (y, &w) in row.iter().enumerate() {
                let py = laws.py[y];
                let py1 = laws.py_x1[x1][y];
                let py2 = laws.py_x2[x2][y];
                match kind {
                    WalkKind::JointCorrect => push(a * b * w, w, py),
                    WalkKind::JointBothWrong => push(a * b * py, w, py),
                    WalkKind::JointW2Wrong => push(a * b * py1, w, py),
                    WalkKind::JointW1Wrong => push(a * b * py2, w, py),
                    WalkKind::CondCorrectGivenX2 => push(a * b * w, w, py2),
                    WalkKind::CondWrongGivenX2 => push(a * b * py2, w, py2),
                    WalkKind::CondCorrectGivenX1 => push(a * b * w, w, py1),
                    WalkKind::CondWrongGivenX1 => push(a * b * py1, w, py1),
                    _ => {}
                }
            }
        }
    }
    match kind {
        WalkKind::SingleCorrectUser1 | WalkKind::SingleWrongUser1 => {
            for (x1, &a) in p1.iter().enumerate() {
                for (y, &q) in laws.py_x1[x1].iter().enumerate() {
                    let law = if kind == WalkKind::SingleCorrectUser1 {
                        q
                    } else {
                        laws.py[y]
                    };
                    push(a * law, q, laws.py[y]);
                }
            }
        }
        WalkKind::SingleCorrectUser2 | WalkKind::SingleWrongUser2 => {
            for (x2, &b) in p2.iter().enumerate() {
                for (y, &q) in laws.py_x2[x2].iter().enumerate() {
                    let law = if kind == WalkKind::SingleCorrectUser2 {
                        q
                    } else {
                        laws.py[y]
                    };
                    push(b * law, q, laws.py[y]);
                }
            }
        }
        _ => {}
    }
    Ok(atoms)
}

/// Expected increment; `-inf` if the increment is `-inf` with positive probability.
pub fn drift(ch: &McChannel, input: &ProductInput, kind: WalkKind) -> Result<f64, InfoError> {
    let atoms = increment_law(ch, input, kind)?;
    if atoms.iter().any(|a| a.value == f64::NEG_INFINITY) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(atoms.iter().map(|a| a.prob * a.value).sum())
}

/// `ln E[exp(lambda Z)]` over finite atoms; `-inf` atoms contribute nothing.
pub fn log_mgf(atoms: &[Atom], lambda: f64) -> f64 {
    let m = atoms
        .iter()
        .filter(|a| a.value.is_finite())
        .map(|a| lambda * a.value)
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = atoms
        .iter()
        .filter(|a| a.value.is_finite())
        .map(|a| a.prob * (lambda * a.value - m).exp())
        .sum();
    m + s.ln()
}

/// Relative width of the final bracket around a root.
pub const ROOT_TOLERANCE: f64 = 1e-13;

/// Positive root of the log-MGF of a wrong-kind increment, by bracketing and
/// bisection.
pub fn chernoff_root(ch: &McChannel, input: &ProductInput, kind: WalkKind) -> Result<f64, InfoError> {
    if kind.is_correct() {
        return Err(InfoError::NotWrongKind(kind));
    }
    let atoms = increment_law(ch, input, kind)?;
    chernoff_root_of(&atoms, kind)
}

pub fn chernoff_root_of(atoms: &[Atom], kind: WalkKind) -> Result<f64, InfoError> {
    let drift: f64 = if atoms.iter().any(|a| a.value == f64::NEG_INFINITY) {
        f64::NEG_INFINITY
    } else {
        atoms.iter().map(|a| a.prob * a.value).sum()
    };
    if atoms.iter().all(|a| a.value <= 0.0) {
        return Err(InfoError::NoPositiveRoot(kind));
    }
    if drift >= 0.0 {
        return Err(InfoError::NonNegativeDrift { kind, drift });
    }
    let f = |l: f64| log_mgf(atoms, l);

    // Small lambda sits left of the root since the slope at 0+ is the drift.
    let mut lo = 1e-3;
    while f(lo) >= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(InfoError::NonNegativeDrift { kind, drift });
        }
    }
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    // The log-MGF can be flat near the root, so stop on the bracket width.
    while hi - lo > ROOT_TOLERANCE * hi {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Whether the partial-mismatch roots clear the thresholds under which the
/// plain joint rule alone reaches the whole pentagon:
/// `(lambda*(w1 right, w2 wrong) >= i2/i12, lambda*(w1 wrong, w2 right) >= i1/i12)`.
pub fn lambda_condition_check(ch: &McChannel, input: &ProductInput) -> Result<(bool, bool), InfoError> {
    let t = info_triple(ch, input)?;
    let side = |kind: WalkKind, numer: f64| -> Result<bool, InfoError> {
        if numer <= 0.0 || t.i12 <= 0.0 {
            return Ok(true);
        }
        match chernoff_root(ch, input, kind) {
            Ok(root) => Ok(root >= numer / t.i12),
            Err(InfoError::NoPositiveRoot(_)) => Ok(true),
            Err(e) => Err(e),
        }
    };
    Ok((side(WalkKind::JointW2Wrong, t.i2)?, side(WalkKind::JointW1Wrong, t.i1)?))
}

/// Largest finite value a correct-kind increment can take; bounds the
/// overshoot of a threshold crossing.
pub fn max_increment(ch: &McChannel, input: &ProductInput, kind: WalkKind) -> Result<f64, InfoError> {
    Ok(increment_law(ch, input, kind)?
        .iter()
        .filter(|a| a.value.is_finite())
        .map(|a| a.value)
        .fold(f64::NEG_INFINITY, f64::max))
}
