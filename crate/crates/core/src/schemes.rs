//! Codes: lazily generated i.i.d. random codebooks and the concatenated
//! two-phase schemes with their random mixture.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::sample_index;
use crate::format::from_bits;
use crate::infomeasures::{validate_pmf, ChannelSummary, InfoError, ProductInput};
use crate::regions::PentagonCorners;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("message {w} out of range for a codebook of {m} messages")]
    MessageOutOfRange { w: u64, m: u64 },
    #[error("codebook needs at least one message")]
    EmptyCodebook,
    #[error("rate {name} = {value} must be positive")]
    NonPositiveRate { name: &'static str, value: f64 },
    #[error("second phase would be negative: the first phase already carries {carried} nats of a {total}-nat message")]
    PhaseTwoNegative { carried: f64, total: f64 },
    #[error("mixing probability {0} outside [0, 1]")]
    BadLambda(f64),
    #[error("scheme spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Info(#[from] InfoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum User {
    One,
    Two,
}

/// Infinite i.i.d. codewords for one user.
///
/// Symbol `i` of message `w` is word `i` of ChaCha8 stream `w` under a key
/// derived from `(seed, user)`, pushed through the inverse CDF of the pmf.
/// Messages and positions are 0-based.
#[derive(Debug, Clone)]
pub struct Codebook {
    m: u64,
    pmf: Vec<f64>,
    seed: u64,
    user: User,
    key: [u8; 32],
}

#[inline]
fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl Codebook {
    pub fn new(m: u64, pmf: &[f64], seed: u64, user: User) -> Result<Self, SchemeError> {
        if m == 0 {
            return Err(SchemeError::EmptyCodebook);
        }
        let pmf = validate_pmf(pmf)?;
        let mut keygen = ChaCha8Rng::seed_from_u64(seed);
        let mut keys = [0u8; 64];
        keygen.fill_bytes(&mut keys);
        let mut key = [0u8; 32];
        let off = match user {
            User::One => 0,
            User::Two => 32,
        };
        key.copy_from_slice(&keys[off..off + 32]);
        Ok(Codebook {
            m,
            pmf,
            seed,
            user,
            key,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn user(&self) -> User {
        self.user
    }

    /// `ln M`
    pub fn log_size(&self) -> f64 {
        (self.m as f64).ln()
    }

    pub fn codeword_symbol(&self, w: u64, i: u64) -> Result<usize, SchemeError> {
        if w >= self.m {
            return Err(SchemeError::MessageOutOfRange { w, m: self.m });
        }
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(w);
        rng.set_word_pos(2 * i as u128);
        Ok(sample_index(&self.pmf, unit_interval(rng.next_u64())))
    }

    /// Sequential reader over codeword `w`, starting at position 0.
    pub fn stream(&self, w: u64) -> Result<CodewordStream<'_>, SchemeError> {
        if w >= self.m {
            return Err(SchemeError::MessageOutOfRange { w, m: self.m });
        }
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(w);
        Ok(CodewordStream { rng, pmf: &self.pmf })
    }
}

pub struct CodewordStream<'a> {
    rng: ChaCha8Rng,
    pmf: &'a [f64],
}

impl Iterator for CodewordStream<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        Some(sample_index(self.pmf, unit_interval(self.rng.next_u64())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// User 1 is decoded at the end of the first phase.
    #[default]
    V1,
    /// User 2 is decoded at the end of the first phase.
    V2,
}

/// Two block codes back to back with deterministic decode times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcatScheme {
    pub m1: u64,
    pub m2: u64,
    /// `(R1*, R2*)` of the first-phase code, nats/use.
    pub phase1_rates: (f64, f64),
    /// Rate of the late user in phase two, nats/use.
    pub phase2_rate: f64,
    pub n1: f64,
    pub n2: f64,
    pub order: Order,
}

impl ConcatScheme {
    pub fn log_sizes(&self) -> (f64, f64) {
        ((self.m1 as f64).ln(), (self.m2 as f64).ln())
    }

    /// Length of the first phase.
    pub fn phase1_len(&self) -> f64 {
        match self.order {
            Order::V1 => self.n1,
            Order::V2 => self.n2,
        }
    }
}

/// Builds `V1` (or `V2`): a first block code at `phase1_rates` ends when
/// the early user is decoded; the late user then finishes alone at
/// `c_other - eps` while the early user sends a fixed letter.
pub fn build_concat(
    m1: u64,
    m2: u64,
    phase1_rates: (f64, f64),
    c_other: f64,
    eps: f64,
    order: Order,
) -> Result<ConcatScheme, SchemeError> {
    if m1 == 0 || m2 == 0 {
        return Err(SchemeError::EmptyCodebook);
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(SchemeError::NonPositiveRate {
            name: "epsilon",
            value: eps,
        });
    }
    let phase2_rate = c_other - eps;
    if phase2_rate.is_nan() || phase2_rate <= 0.0 {
        return Err(SchemeError::NonPositiveRate {
            name: "C - epsilon",
            value: phase2_rate,
        });
    }
    let (r1, r2) = phase1_rates;
    let (lm1, lm2) = ((m1 as f64).ln(), (m2 as f64).ln());
    let (early_rate, late_rate, early_log, late_log, early_name) = match order {
        Order::V1 => (r1, r2, lm1, lm2, "R1*"),
        Order::V2 => (r2, r1, lm2, lm1, "R2*"),
    };
    if early_rate.is_nan() || early_rate <= 0.0 {
        return Err(SchemeError::NonPositiveRate {
            name: early_name,
            value: early_rate,
        });
    }
    if late_rate < 0.0 {
        return Err(SchemeError::NonPositiveRate {
            name: "late-user phase-1 rate",
            value: late_rate,
        });
    }
    let early_n = early_log / early_rate;
    let carried = late_rate * early_n;
    if carried > late_log * (1.0 + 1e-12) + 1e-12 {
        return Err(SchemeError::PhaseTwoNegative {
            carried,
            total: late_log,
        });
    }
    let late_n = early_n + late_log / phase2_rate - (late_rate / phase2_rate) * early_n;
    let (n1, n2) = match order {
        Order::V1 => (early_n, late_n),
        Order::V2 => (late_n, early_n),
    };
    Ok(ConcatScheme {
        m1,
        m2,
        phase1_rates,
        phase2_rate,
        n1,
        n2,
        order,
    })
}

/// With probability `lambda` the pair is sent with `v1`, otherwise with `v2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedScheme {
    pub lambda: f64,
    pub v1: ConcatScheme,
    pub v2: ConcatScheme,
}

impl MixedScheme {
    pub fn new(lambda: f64, v1: ConcatScheme, v2: ConcatScheme) -> Result<Self, SchemeError> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(SchemeError::BadLambda(lambda));
        }
        if v1.order != Order::V1 || v2.order != Order::V2 {
            return Err(SchemeError::BadSpec("mixture needs a V1 and a V2 component".into()));
        }
        Ok(MixedScheme { lambda, v1, v2 })
    }

    /// Components built on the corners `(C1 - eps, d2)` and `(d1, C2 - eps)`.
    pub fn from_corners(
        summary: &ChannelSummary,
        corners: &PentagonCorners,
        m1: u64,
        m2: u64,
        eps: f64,
        lambda: f64,
    ) -> Result<Self, SchemeError> {
        let d1 = corners.corner_b.0;
        let d2 = corners.corner_a.1;
        let v1 = build_concat(m1, m2, (summary.c1 - eps, d2), summary.c2, eps, Order::V1)?;
        let v2 = build_concat(m1, m2, (d1, summary.c2 - eps), summary.c1, eps, Order::V2)?;
        MixedScheme::new(lambda, v1, v2)
    }
}

/// Receiver-side rates and expected decode times of the mixture.
pub fn mixed_rates(ms: &MixedScheme, log_m1: f64, log_m2: f64) -> ((f64, f64), (f64, f64)) {
    let l = ms.lambda;
    let en1 = l * ms.v1.n1 + (1.0 - l) * ms.v2.n1;
    let en2 = l * ms.v1.n2 + (1.0 - l) * ms.v2.n2;
    ((log_m1 / en1, log_m2 / en2), (en1, en2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeType {
    Concat,
    Mixed,
    Random,
}

/// JSON description of a scheme. Rates and `epsilon` are in bits per use.
///
/// `order` (concat only) and `input` (random only, default uniform) are
/// optional extensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    #[serde(rename = "type")]
    pub kind: SchemeType,
    pub m1: u64,
    pub m2: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase1_rates_bits: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Order>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<ProductInput>,
}

pub const DEFAULT_SCHEME_EPSILON_BITS: f64 = 0.01;

impl SchemeSpec {
    pub fn random(m1: u64, m2: u64, seed: u64) -> Self {
        SchemeSpec {
            kind: SchemeType::Random,
            m1,
            m2,
            lambda: None,
            phase1_rates_bits: None,
            epsilon: None,
            seed,
            order: None,
            input: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SchemeError> {
        let spec: SchemeSpec = serde_json::from_str(text).map_err(|e| SchemeError::BadSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        if self.m1 == 0 || self.m2 == 0 {
            return Err(SchemeError::EmptyCodebook);
        }
        if let Some(l) = self.lambda {
            if !(0.0..=1.0).contains(&l) {
                return Err(SchemeError::BadLambda(l));
            }
        }
        match self.kind {
            SchemeType::Mixed if self.lambda.is_none() => {
                Err(SchemeError::BadSpec("mixed scheme needs `lambda`".into()))
            }
            _ => Ok(()),
        }
    }

    /// Rate back-off in nats.
    pub fn epsilon_nats(&self) -> f64 {
        from_bits(self.epsilon.unwrap_or(DEFAULT_SCHEME_EPSILON_BITS))
    }

    /// Concatenated scheme for a `concat` spec; the phase-1 rates default
    /// to the corner matching the order.
    pub fn concat(
        &self,
        summary: &ChannelSummary,
        corners: Option<&PentagonCorners>,
    ) -> Result<ConcatScheme, SchemeError> {
        let eps = self.epsilon_nats();
        let order = self.order.unwrap_or_default();
        let rates = match (self.phase1_rates_bits, corners, order) {
            (Some([a, b]), _, _) => (from_bits(a), from_bits(b)),
            (None, Some(c), Order::V1) => (summary.c1 - eps, c.corner_a.1),
            (None, Some(c), Order::V2) => (c.corner_b.0, summary.c2 - eps),
            (None, None, _) => {
                return Err(SchemeError::BadSpec(
                    "concat scheme needs `phase1_rates_bits` on a channel without pentagon corners".into(),
                ))
            }
        };
        let c_other = match order {
            Order::V1 => summary.c2,
            Order::V2 => summary.c1,
        };
        build_concat(self.m1, self.m2, rates, c_other, eps, order)
    }
}
