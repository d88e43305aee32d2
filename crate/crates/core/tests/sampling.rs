//! Channel sampling and codebook symbol statistics.

use macvlc::{Builtin, Codebook, McChannel, User};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_frequencies(counts: &[u64], pmf: &[f64], n: u64) {
    for (k, (&c, &p)) in counts.iter().zip(pmf).enumerate() {
        let f = c as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        if p == 0.0 {
            assert_eq!(c, 0, "symbol {k} has zero mass");
        } else {
            assert!((f - p).abs() <= 4.0 * se, "symbol {k}: {f} vs {p} (se {se})");
        }
    }
}

#[test]
fn output_frequencies_match_rows() {
    let ch = McChannel::new(
        2,
        2,
        3,
        vec![0.7, 0.2, 0.1, 0.0, 0.5, 0.5, 0.25, 0.25, 0.5, 1.0, 0.0, 0.0],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 1_000_000;
    for x1 in 0..2 {
        for x2 in 0..2 {
            let mut counts = [0u64; 3];
            for _ in 0..n {
                counts[ch.sample_output(x1, x2, &mut rng).unwrap()] += 1;
            }
            let row: Vec<f64> = (0..3).map(|y| ch.prob(x1, x2, y)).collect();
            assert_frequencies(&counts, &row, n);
        }
    }
    assert!(ch.sample_output(2, 0, &mut rng).is_err());
}

#[test]
fn deterministic_channel_never_errs() {
    let ch = McChannel::builtin(Builtin::Adder).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        assert_eq!(ch.sample_output(1, 1, &mut rng).unwrap(), 2);
        assert_eq!(ch.sample_output(0, 1, &mut rng).unwrap(), 1);
    }
}

#[test]
fn codeword_symbols_follow_pmf() {
    let pmf = [0.2, 0.0, 0.5, 0.3];
    let cb = Codebook::new(1000, &pmf, 7, User::Two).unwrap();
    let mut counts = [0u64; 4];
    for w in 0..1000 {
        for s in cb.stream(w).unwrap().take(1000) {
            counts[s] += 1;
        }
    }
    assert_frequencies(&counts, &pmf, 1_000_000);
}

#[test]
fn codewords_are_independent_across_messages() {
    // Adjacent messages should agree at a position with probability sum p^2.
    let pmf = [0.5, 0.5];
    let cb = Codebook::new(2001, &pmf, 3, User::One).unwrap();
    let n = 2000 * 500;
    let mut same = 0u64;
    for w in 0..2000 {
        let a = cb.stream(w).unwrap();
        let b = cb.stream(w + 1).unwrap();
        same += a.zip(b).take(500).filter(|(x, y)| x == y).count() as u64;
    }
    assert_frequencies(&[same, n - same], &[0.5, 0.5], n);
}

#[test]
fn prefixes_separate_quickly() {
    let cb = Codebook::new(64, &[0.5, 0.5], 11, User::One).unwrap();
    let words: Vec<Vec<usize>> = (0..64).map(|w| cb.stream(w).unwrap().take(64).collect()).collect();
    for i in 0..64 {
        for j in i + 1..64 {
            assert_ne!(words[i], words[j]);
        }
    }
}

#[test]
fn codebooks_depend_on_seed_only() {
    let a = Codebook::new(4, &[0.3, 0.7], 5, User::One).unwrap();
    let b = Codebook::new(4, &[0.3, 0.7], 5, User::One).unwrap();
    let c = Codebook::new(4, &[0.3, 0.7], 6, User::One).unwrap();
    let word = |cb: &Codebook| cb.stream(2).unwrap().take(200).collect::<Vec<_>>();
    assert_eq!(word(&a), word(&b));
    assert_ne!(word(&a), word(&c));
    assert_eq!(a.codeword_symbol(2, 150).unwrap(), word(&a)[150]);
}
