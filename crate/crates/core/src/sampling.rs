//! Seeded random streams and multinomial draws.
//!
//! Every random quantity in the crate comes from a ChaCha stream selected by
//! `(seed, stream)`. Work that may run in parallel (bootstrap replicates,
//! chunks of simulated shots) gets its own stream index, so results do not
//! depend on how the work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// Independent generator for sub-stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `trials` outcomes over `probs` and writes the cell counts to `out`.
///
/// Uses the conditional-binomial decomposition, so the cost is one binomial
/// draw per cell regardless of `trials`. `probs` need not be exactly
/// normalized; the last non-zero cell absorbs what is left.
pub fn multinomial<R: Rng + ?Sized>(rng: &mut R, trials: u64, probs: &[f64], out: &mut [u64]) {
    assert_eq!(probs.len(), out.len(), "multinomial output length mismatch");
    out.iter_mut().for_each(|c| *c = 0);
    let Some(last) = probs.iter().rposition(|&p| p > 0.0) else {
        return;
    };
    let mut remaining = trials;
    let mut mass: f64 = probs[..=last].iter().sum();
    for (i, &p) in probs[..last].iter().enumerate() {
        if remaining == 0 {
            return;
        }
        if p <= 0.0 {
            continue;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let k = if q >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, q)
                .expect("binomial parameters in range")
                .sample(rng)
        };
        out[i] = k;
        remaining -= k;
        mass -= p;
        if !(mass > 0.0) {
            // rounding ate the tail; keep the rest in the last cell
            mass = f64::MIN_POSITIVE;
        }
    }
    out[last] = remaining;
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn conserves_trials() {
        let mut rng = stream_rng(1, 0);
        let probs = [0.1, 0.0, 0.3, 0.6, 0.0];
        let mut out = [0u64; 5];
        multinomial(&mut rng, 123_457, &probs, &mut out);
        assert_eq!(out.iter().sum::<u64>(), 123_457);
        assert_eq!(out[1], 0);
        assert_eq!(out[4], 0);
    }

    #[test]
    fn degenerate_cell_gets_everything() {
        let mut rng = stream_rng(5, 0);
        let mut out = vec![0u64; 4];
        multinomial(&mut rng, 100, &[0.0, 0.0, 1.0, 0.0], &mut out);
        assert_eq!(out, vec![0, 0, 100, 0]);
    }

    #[test]
    fn streams_differ_and_repeat() {
        let a: u64 = stream_rng(9, 0).random();
        let b: u64 = stream_rng(9, 1).random();
        let c: u64 = stream_rng(9, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
