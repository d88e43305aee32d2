//! Two-input discrete memoryless multiple-access channels.
//!
//! A channel is a transition law `W[x1][x2][y]` over 0-based integer
//! alphabets, stored flat in row-major order (x1 outermost, y innermost).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Row sums further than this from 1 are rejected; closer ones are renormalized.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("alphabet sizes must be positive (got |X1|={x1}, |X2|={x2}, |Y|={y})")]
    EmptyAlphabet { x1: usize, x2: usize, y: usize },
    #[error("transition table has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("row (x1={x1}, x2={x2}) sums to {sum}, not 1")]
    NonStochastic { x1: usize, x2: usize, sum: f64 },
    #[error("negative transition probability at (x1={x1}, x2={x2}, y={y})")]
    NegativeEntry { x1: usize, x2: usize, y: usize },
    #[error("non-finite transition probability at (x1={x1}, x2={x2}, y={y})")]
    NonFinite { x1: usize, x2: usize, y: usize },
    #[error("input symbols ({x1}, {x2}) out of range for |X1|={x1_size}, |X2|={x2_size}")]
    SymbolOutOfRange {
        x1: usize,
        x2: usize,
        x1_size: usize,
        x2_size: usize,
    },
    #[error("unknown builtin channel `{0}`")]
    UnknownName(String),
    #[error("builtin parameter {0} must lie in [0, 1)")]
    BadParameter(f64),
}

/// Transition law `p(y | x1, x2)` of a two-user DM-MAC.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McChannel {
    x1_size: usize,
    x2_size: usize,
    y_size: usize,
    transition: Vec<f64>,
}

/// On-disk representation; validated through [`McChannel::new`].
#[derive(Debug, Deserialize)]
struct RawChannel {
    x1_size: usize,
    x2_size: usize,
    y_size: usize,
    transition: Vec<f64>,
}

impl<'de> Deserialize<'de> for McChannel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawChannel::deserialize(d)?;
        McChannel::new(raw.x1_size, raw.x2_size, raw.y_size, raw.transition).map_err(serde::de::Error::custom)
    }
}

impl McChannel {
    /// Validates a flat transition table.
    ///
    /// Rows whose sum is within [`ROW_SUM_TOLERANCE`] of 1 are rescaled to
    /// sum to 1; anything further off is rejected.
    pub fn new(x1_size: usize, x2_size: usize, y_size: usize, mut transition: Vec<f64>) -> Result<Self, ChannelError> {
        if x1_size == 0 || x2_size == 0 || y_size == 0 {
            return Err(ChannelError::EmptyAlphabet {
                x1: x1_size,
                x2: x2_size,
                y: y_size,
            });
        }
        let expected = x1_size * x2_size * y_size;
        if transition.len() != expected {
            return Err(ChannelError::DimensionMismatch {
                expected,
                got: transition.len(),
            });
        }
        for (r, row) in transition.chunks_mut(y_size).enumerate() {
            let (x1, x2) = (r / x2_size, r % x2_size);
            for (y, &p) in row.iter().enumerate() {
                if !p.is_finite() {
                    return Err(ChannelError::NonFinite { x1, x2, y });
                }
                if p < 0.0 {
                    return Err(ChannelError::NegativeEntry { x1, x2, y });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() >= ROW_SUM_TOLERANCE {
                return Err(ChannelError::NonStochastic { x1, x2, sum });
            }
            if sum != 1.0 {
                row.iter_mut().for_each(|p| *p /= sum);
            }
        }
        Ok(McChannel {
            x1_size,
            x2_size,
            y_size,
            transition,
        })
    }

    /// Builds a channel from a deterministic map `(x1, x2) -> y`.
    pub fn deterministic<F>(x1_size: usize, x2_size: usize, y_size: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> usize,
    {
        let mut t = vec![0.0; x1_size * x2_size * y_size];
        for x1 in 0..x1_size {
            for x2 in 0..x2_size {
                t[(x1 * x2_size + x2) * y_size + f(x1, x2)] = 1.0;
            }
        }
        McChannel::new(x1_size, x2_size, y_size, t).expect("deterministic map is stochastic")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("channel serializes")
    }

    pub fn builtin(b: Builtin) -> Result<Self, ChannelError> {
        let check = |v: f64| {
            if (0.0..1.0).contains(&v) {
                Ok(v)
            } else {
                Err(ChannelError::BadParameter(v))
            }
        };
        Ok(match b {
            Builtin::Adder => McChannel::deterministic(2, 2, 3, |a, b| a + b),
            Builtin::Multiplier => McChannel::deterministic(2, 2, 2, |a, b| a * b),
            Builtin::NoisyAdder(delta) => {
                let delta = check(delta)?;
                let mut t = Vec::with_capacity(12);
                for x1 in 0..2 {
                    for x2 in 0..2 {
                        for y in 0..3 {
                            t.push(if y == x1 + x2 { 1.0 - delta } else { delta / 2.0 });
                        }
                    }
                }
                McChannel::new(2, 2, 3, t)?
            }
            Builtin::ErasureAdder(gamma) => {
                let gamma = check(gamma)?;
                let mut t = Vec::with_capacity(16);
                for x1 in 0..2 {
                    for x2 in 0..2 {
                        for y in 0..3 {
                            t.push(if y == x1 + x2 { 1.0 - gamma } else { 0.0 });
                        }
                        t.push(gamma);
                    }
                }
                McChannel::new(2, 2, 4, t)?
            }
        })
    }

    pub fn x1_size(&self) -> usize {
        self.x1_size
    }

    pub fn x2_size(&self) -> usize {
        self.x2_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    /// Output pmf for the input pair `(x1, x2)`. Panics on out-of-range symbols.
    #[inline]
    pub fn row(&self, x1: usize, x2: usize) -> &[f64] {
        let start = (x1 * self.x2_size + x2) * self.y_size;
        &self.transition[start..start + self.y_size]
    }

    #[inline]
    pub fn prob(&self, x1: usize, x2: usize, y: usize) -> f64 {
        self.transition[(x1 * self.x2_size + x2) * self.y_size + y]
    }

    /// `ln p(y|x1,x2)`, with `ln 0 = -inf`.
    #[inline]
    pub fn log_prob(&self, x1: usize, x2: usize, y: usize) -> f64 {
        self.prob(x1, x2, y).ln()
    }

    pub fn transition(&self) -> &[f64] {
        &self.transition
    }

    /// Cross-section `p(y | x1)` with user 2 held at the letter `x2`.
    pub fn section_given_x2(&self, x2: usize) -> Vec<Vec<f64>> {
        (0..self.x1_size).map(|x1| self.row(x1, x2).to_vec()).collect()
    }

    /// Cross-section `p(y | x2)` with user 1 held at the letter `x1`.
    pub fn section_given_x1(&self, x1: usize) -> Vec<Vec<f64>> {
        (0..self.x2_size).map(|x2| self.row(x1, x2).to_vec()).collect()
    }

    /// Same channel with the two users' roles exchanged.
    pub fn swap_users(&self) -> McChannel {
        let mut t = Vec::with_capacity(self.transition.len());
        for x2 in 0..self.x2_size {
            for x1 in 0..self.x1_size {
                t.extend_from_slice(self.row(x1, x2));
            }
        }
        McChannel {
            x1_size: self.x2_size,
            x2_size: self.x1_size,
            y_size: self.y_size,
            transition: t,
        }
    }

    /// Draws one output symbol for the input pair `(x1, x2)`.
    pub fn sample_output<R: Rng + ?Sized>(&self, x1: usize, x2: usize, rng: &mut R) -> Result<usize, ChannelError> {
        if x1 >= self.x1_size || x2 >= self.x2_size {
            return Err(ChannelError::SymbolOutOfRange {
                x1,
                x2,
                x1_size: self.x1_size,
                x2_size: self.x2_size,
            });
        }
        Ok(sample_index(self.row(x1, x2), rng.random::<f64>()))
    }
}

/// Inverse-CDF lookup of `u in [0,1)` in `pmf`; never returns a zero-mass index.
pub(crate) fn sample_index(pmf: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in pmf.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Named test channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// `Y = X1 + X2` over binary inputs.
    Adder,
    /// Adder followed by a symmetric ternary channel with crossover `delta`.
    NoisyAdder(f64),
    /// `Y = X1 * X2`.
    Multiplier,
    /// Adder whose output is erased to symbol 3 with probability `gamma`.
    ErasureAdder(f64),
}

impl FromStr for Builtin {
    type Err = ChannelError;

    /// Accepts `adder`, `multiplier`, `noisy_adder(0.1)`, `noisy_adder:0.1`,
    /// `erasure_adder(0.3)` and `erasure_adder:0.3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let unknown = || ChannelError::UnknownName(s.to_string());
        let (name, param) = match s.find(['(', ':']) {
            Some(i) => {
                let rest = s[i + 1..].trim_end_matches(')');
                let v: f64 = rest.trim().parse().map_err(|_| unknown())?;
                (&s[..i], Some(v))
            }
            None => (s, None),
        };
        match (name.trim(), param) {
            ("adder", None) => Ok(Builtin::Adder),
            ("multiplier", None) => Ok(Builtin::Multiplier),
            ("noisy_adder", Some(d)) => Ok(Builtin::NoisyAdder(d)),
            ("erasure_adder", Some(g)) => Ok(Builtin::ErasureAdder(g)),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Adder => write!(f, "adder"),
            Builtin::Multiplier => write!(f, "multiplier"),
            Builtin::NoisyAdder(d) => write!(f, "noisy_adder({d})"),
            Builtin::ErasureAdder(g) => write!(f, "erasure_adder({g})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn accepts_exact_pmf_rows() {
        let ch = McChannel::builtin(Builtin::Adder).unwrap();
        assert_eq!(ch.row(1, 1), &[0.0, 0.0, 1.0]);
        assert_eq!(ch.row(0, 1), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn rejects_half_row() {
        let err = McChannel::new(1, 1, 2, vec![0.25, 0.25]).unwrap_err();
        assert!(matches!(err, ChannelError::NonStochastic { sum, .. } if sum == 0.5));
    }

    #[test]
    fn rejects_negative_entry() {
        let err = McChannel::new(1, 1, 3, vec![-0.1, 0.6, 0.5]).unwrap_err();
        assert_eq!(err, ChannelError::NegativeEntry { x1: 0, x2: 0, y: 0 });
    }

    #[test]
    fn renormalizes_round_off() {
        let ch = McChannel::new(1, 1, 3, vec![0.3333333333, 0.3333333333, 0.3333333334]).unwrap();
        assert!((ch.row(0, 0).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(McChannel::new(1, 1, 2, vec![0.5, 0.5 + 2e-9]).is_err());
    }

    #[test]
    fn builtin_rows() {
        let na = McChannel::builtin(Builtin::NoisyAdder(0.1)).unwrap();
        let r = na.row(0, 1);
        assert!((r[1] - 0.9).abs() < 1e-15);
        assert!((r[0] - 0.05).abs() < 1e-15 && (r[2] - 0.05).abs() < 1e-15);

        let ea = McChannel::builtin(Builtin::ErasureAdder(0.3)).unwrap();
        assert_eq!(ea.y_size(), 4);
        let r = ea.row(0, 0);
        assert!((r[0] - 0.7).abs() < 1e-15 && (r[3] - 0.3).abs() < 1e-15);

        let m = McChannel::builtin(Builtin::Multiplier).unwrap();
        assert_eq!(m.row(1, 1), &[0.0, 1.0]);
        assert_eq!(m.row(1, 0), &[1.0, 0.0]);
    }

    #[test]
    fn builtin_names() {
        assert_eq!("adder".parse::<Builtin>().unwrap(), Builtin::Adder);
        assert_eq!("noisy_adder(0.1)".parse::<Builtin>().unwrap(), Builtin::NoisyAdder(0.1));
        assert_eq!(
            "erasure_adder:0.3".parse::<Builtin>().unwrap(),
            Builtin::ErasureAdder(0.3)
        );
        assert!(matches!("xor".parse::<Builtin>(), Err(ChannelError::UnknownName(_))));
        assert!(McChannel::builtin(Builtin::NoisyAdder(1.0)).is_err());
    }

    #[test]
    fn json_round_trip_and_field_names() {
        let ch = McChannel::builtin(Builtin::NoisyAdder(0.2)).unwrap();
        let text = ch.to_json();
        for key in ["\"x1_size\"", "\"x2_size\"", "\"y_size\"", "\"transition\""] {
            assert!(text.contains(key));
        }
        assert_eq!(McChannel::from_json(&text).unwrap(), ch);
        let bad = r#"{"x1_size":1,"x2_size":1,"y_size":2,"transition":[0.2,0.2]}"#;
        assert!(McChannel::from_json(bad).is_err());
    }

    #[test]
    fn sampling_deterministic_row_and_range() {
        let ch = McChannel::builtin(Builtin::Adder).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(ch.sample_output(0, 0, &mut rng).unwrap(), 0);
        }
        assert!(matches!(
            ch.sample_output(2, 0, &mut rng),
            Err(ChannelError::SymbolOutOfRange { .. })
        ));
    }

    #[test]
    fn sampling_reproducible() {
        let ch = McChannel::builtin(Builtin::NoisyAdder(0.3)).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..256)
                .map(|i| ch.sample_output(i % 2, (i / 2) % 2, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn swap_users_transposes() {
        let ch = McChannel::new(
            2,
            3,
            2,
            (0..6)
                .flat_map(|k| {
                    let p = k as f64 / 10.0;
                    [p, 1.0 - p]
                })
                .collect(),
        )
        .unwrap();
        let sw = ch.swap_users();
        for x1 in 0..2 {
            for x2 in 0..3 {
                assert_eq!(ch.row(x1, x2), sw.row(x2, x1));
            }
        }
    }
}
