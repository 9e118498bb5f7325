//! Systematic linear block codes: the unitary-rate code and an ideal
//! bounded-distance decoder model for a t-error-correcting code.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector, Gf2Error};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("invalid code parameters: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeSpec {
    /// `n = k`, `G = I_k`.
    Unitary { k: usize },
    /// `(n, k)` code correcting every pattern of at most `t` errors.
    BoundedDistance { n: usize, k: usize, t: usize },
}

impl CodeSpec {
    /// The (2047, 1354) BCH code with t = 69, taken as model parameters.
    pub const BCH_2047: CodeSpec = CodeSpec::BoundedDistance {
        n: 2047,
        k: 1354,
        t: 69,
    };

    pub fn n(&self) -> usize {
        match *self {
            CodeSpec::Unitary { k } => k,
            CodeSpec::BoundedDistance { n, .. } => n,
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            CodeSpec::Unitary { k } | CodeSpec::BoundedDistance { k, .. } => k,
        }
    }

    /// Correction radius; zero for the unitary code.
    pub fn t(&self) -> usize {
        match *self {
            CodeSpec::Unitary { .. } => 0,
            CodeSpec::BoundedDistance { t, .. } => t,
        }
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn validate(&self) -> Result<(), CodeError> {
        match *self {
            CodeSpec::Unitary { k } if k == 0 => {
                Err(CodeError::InvalidSpec("unitary code needs k >= 1".into()))
            }
            CodeSpec::BoundedDistance { n, k, t } if k == 0 || n < k || t > n => Err(
                CodeError::InvalidSpec(format!("need n >= k >= 1 and t <= n, got ({n}, {k}, {t})")),
            ),
            _ => Ok(()),
        }
    }
}

/// `G = [I | C]` stored through its parity part `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystematicGenerator {
    c: BitMatrix,
}

impl SystematicGenerator {
    pub fn new(c: BitMatrix) -> Self {
        SystematicGenerator { c }
    }

    pub fn unitary(k: usize) -> Self {
        SystematicGenerator {
            c: BitMatrix::zeros(k, 0),
        }
    }

    /// Uniformly random parity part for an `(n, k)` code.
    pub fn random(n: usize, k: usize, seed: u64) -> Result<Self, CodeError> {
        if k == 0 || n < k {
            return Err(CodeError::InvalidSpec(format!("need n >= k >= 1, got ({n}, {k})")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<BitVector> = (0..k).map(|_| BitVector::random(n - k, &mut rng)).collect();
        Ok(SystematicGenerator {
            c: BitMatrix::from_row_vectors(&rows, n - k)?,
        })
    }

    pub fn k(&self) -> usize {
        self.c.rows()
    }

    pub fn n(&self) -> usize {
        self.c.rows() + self.c.cols()
    }

    pub fn parity(&self) -> &BitMatrix {
        &self.c
    }

    /// The full `k × n` generator matrix.
    pub fn matrix(&self) -> BitMatrix {
        let (k, n) = (self.k(), self.n());
        let mut g = BitMatrix::zeros(k, n);
        for r in 0..k {
            g.set(r, r, true);
            for c in self.c.row_ones(r) {
                g.set(r, k + c, true);
            }
        }
        g
    }

    /// `[x | x·C]`.
    pub fn encode(&self, x: &BitVector) -> Result<BitVector, CodeError> {
        if x.len() != self.k() {
            return Err(Gf2Error::Dimension {
                what: "message length vs code dimension",
                left: x.len(),
                right: self.k(),
            }
            .into());
        }
        if self.c.cols() == 0 {
            return Ok(x.clone());
        }
        Ok(x.concat(&self.c.left_mul(x)?))
    }
}

/// Outcome of the genie-aided bounded-distance decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedDecode {
    pub decoded: BitVector,
    pub frame_error: bool,
    /// Channel errors seen in the frame.
    pub channel_errors: usize,
}

/// Ideal bounded-distance decoding: up to `t` errors are corrected, otherwise
/// the received word passes through untouched (no miscorrection).
pub fn bounded_distance_decode(
    received: &BitVector,
    transmitted: &BitVector,
    t: usize,
) -> Result<BoundedDecode, CodeError> {
    let errors = received.distance(transmitted)?;
    Ok(if errors <= t {
        BoundedDecode {
            decoded: transmitted.clone(),
            frame_error: false,
            channel_errors: errors,
        }
    } else {
        BoundedDecode {
            decoded: received.clone(),
            frame_error: true,
            channel_errors: errors,
        }
    })
}
