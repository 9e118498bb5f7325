//! BPSK over AWGN with rate-aware Eb/N0 bookkeeping.
//!
//! Bit `0` maps to `+1.0` and bit `1` to `-1.0`. Symbols have unit energy, so
//! the per-dimension noise variance is `σ² = 1 / (2·R·Eb/N0)`.
//!
//! Gaussian samples come from `rand_distr::StandardNormal` (ziggurat) driven by
//! ChaCha8. Independent trial streams are derived by [`trial_rng`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::analytic::db_to_linear;
use crate::gf2::BitVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("code rate {0} outside (0, 1]")]
    Rate(f64),
    #[error("Eb/N0 {0} dB is not finite")]
    Snr(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self, ChannelError> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(ChannelError::Rate(rate));
        }
        if !ebn0_db.is_finite() {
            return Err(ChannelError::Snr(ebn0_db));
        }
        let sigma = (1.0 / (2.0 * rate * db_to_linear(ebn0_db))).sqrt();
        Ok(ChannelParams {
            ebn0_db,
            rate,
            sigma,
        })
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Channel LLR `log P(0|y)/P(1|y) = 2y/σ²`.
    #[inline]
    pub fn llr(&self, y: f64) -> f64 {
        2.0 * y / self.variance()
    }
}

/// Per-trial generator: ChaCha8 keyed by the master seed, with the trial index
/// selecting the stream. Streams are disjoint, so a trial's draws do not depend
/// on which other trials ran or in what order.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

pub fn modulate(c: &BitVector) -> Vec<f64> {
    c.iter().map(|b| if b { -1.0 } else { 1.0 }).collect()
}

pub fn add_noise<R: Rng + ?Sized>(x: &[f64], params: &ChannelParams, rng: &mut R) -> Vec<f64> {
    x.iter()
        .map(|&s| s + params.sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Adds noise whose sign is referenced to the transmitted symbol: `y = x·(1 + σ·n)`.
/// Equal in distribution to [`add_noise`]; the error pattern then depends only
/// on the noise draws, which lets different codewords share channel realizations.
pub fn add_symbol_relative_noise<R: Rng + ?Sized>(
    x: &[f64],
    params: &ChannelParams,
    rng: &mut R,
) -> Vec<f64> {
    x.iter()
        .map(|&s| s * (1.0 + params.sigma * rng.sample::<f64, _>(StandardNormal)))
        .collect()
}

/// `y ≥ 0 → 0`, otherwise `1`; an exact zero maps to `0`.
pub fn hard_decision(y: &[f64]) -> BitVector {
    let mut out = BitVector::zeros(y.len());
    for (i, &v) in y.iter().enumerate() {
        if v < 0.0 {
            out.set(i, true);
        }
    }
    out
}
