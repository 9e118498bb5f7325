//! Scrambler pairs `(S, S⁻¹)` and the scramble/descramble maps.
//!
//! Density constraints are imposed on `S⁻¹`, whose columns govern how residual
//! channel errors spread after descrambling; `S` is obtained by inversion.

use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector, Gf2Error};

/// Whole-matrix sampling attempts before giving up on an invertible `S⁻¹`.
pub const RETRY_BUDGET: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScramblerError {
    #[error("invalid scrambler spec: {0}")]
    InvalidSpec(String),
    #[error("no invertible {kind} scrambler found after {attempts} attempts")]
    Construction { kind: String, attempts: usize },
    #[error("the perfect-scrambling model has no matrix realization")]
    PerfectModel,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScramblerKind {
    Identity,
    /// Every column of `S⁻¹` has Hamming weight exactly `w`.
    Regular { w: usize },
    /// I.i.d. Bernoulli entries of `S⁻¹` with the given density.
    Dense { density: f64 },
    /// Analysis-only marker: any residual error randomizes half the message.
    PerfectModel,
}

impl fmt::Display for ScramblerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScramblerKind::Identity => write!(f, "identity"),
            ScramblerKind::Regular { w } => write!(f, "regular w={w}"),
            ScramblerKind::Dense { density } => write!(f, "dense density={density}"),
            ScramblerKind::PerfectModel => write!(f, "perfect"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScramblerSpec {
    pub kind: ScramblerKind,
    pub k: usize,
    pub seed: u64,
}

impl ScramblerSpec {
    pub fn new(kind: ScramblerKind, k: usize, seed: u64) -> Self {
        ScramblerSpec { kind, k, seed }
    }

    pub fn validate(&self) -> Result<(), ScramblerError> {
        if self.k == 0 {
            return Err(ScramblerError::InvalidSpec("k must be positive".into()));
        }
        match self.kind {
            ScramblerKind::Regular { w } if w == 0 || w > self.k => Err(
                ScramblerError::InvalidSpec(format!("column weight {w} outside 1..={}", self.k)),
            ),
            ScramblerKind::Dense { density } if !(density > 0.0 && density <= 1.0) => Err(
                ScramblerError::InvalidSpec(format!("density {density} outside (0, 1]")),
            ),
            _ => Ok(()),
        }
    }
}

/// A scrambling matrix together with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct ScramblerPair {
    spec: ScramblerSpec,
    s: BitMatrix,
    s_inv: BitMatrix,
}

impl ScramblerPair {
    /// Samples a pair according to `spec`; deterministic in `spec.seed`.
    pub fn generate(spec: &ScramblerSpec) -> Result<Self, ScramblerError> {
        spec.validate()?;
        let k = spec.k;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let (s, s_inv) = match spec.kind {
            ScramblerKind::PerfectModel => return Err(ScramblerError::PerfectModel),
            ScramblerKind::Identity => (BitMatrix::identity(k), BitMatrix::identity(k)),
            // A weight-1 invertible matrix is a permutation.
            ScramblerKind::Regular { w: 1 } => {
                let perm = index::sample(&mut rng, k, k).into_vec();
                let mut p = BitMatrix::zeros(k, k);
                for (col, &row) in perm.iter().enumerate() {
                    p.set(row, col, true);
                }
                (p.transpose(), p)
            }
            // With every column of even weight, the all-ones vector lies in the
            // left kernel, so no candidate can be invertible.
            ScramblerKind::Regular { w } if w % 2 == 0 => {
                return Err(ScramblerError::Construction {
                    kind: format!("{} (even column weight is always singular)", spec.kind),
                    attempts: 0,
                })
            }
            ScramblerKind::Regular { w } => {
                sample_invertible(spec, &mut rng, |rng| regular_candidate(k, w, rng))?
            }
            ScramblerKind::Dense { density } => {
                sample_invertible(spec, &mut rng, |rng| dense_candidate(k, density, rng))?
            }
        };
        Ok(ScramblerPair {
            spec: *spec,
            s,
            s_inv,
        })
    }

    pub fn spec(&self) -> &ScramblerSpec {
        &self.spec
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn s(&self) -> &BitMatrix {
        &self.s
    }

    pub fn s_inv(&self) -> &BitMatrix {
        &self.s_inv
    }

    /// `u · S`.
    pub fn scramble(&self, u: &BitVector) -> Result<BitVector, ScramblerError> {
        Ok(self.s.left_mul(u)?)
    }

    /// `c_l · S⁻¹`. With `c_l = u·S + e_l` this returns `u + e_l·S⁻¹`.
    pub fn descramble(&self, c_l: &BitVector) -> Result<BitVector, ScramblerError> {
        Ok(self.s_inv.left_mul(c_l)?)
    }

    /// Column weights of `S⁻¹`, i.e. how many outputs each residual error touches
    /// per descrambled position.
    pub fn inverse_column_weights(&self) -> Vec<usize> {
        let t = self.s_inv.transpose();
        (0..self.k()).map(|c| t.row_weight(c)).collect()
    }

    /// Header comment followed by `S` then `S⁻¹` in the matrix text format.
    pub fn write_text<W: Write>(&self, out: &mut W) -> Result<(), ScramblerError> {
        let param = match self.spec.kind {
            ScramblerKind::Identity | ScramblerKind::PerfectModel => String::new(),
            ScramblerKind::Regular { w } => format!(" w={w}"),
            ScramblerKind::Dense { density } => format!(" density={density}"),
        };
        let kind = match self.spec.kind {
            ScramblerKind::Identity => "identity",
            ScramblerKind::Regular { .. } => "regular",
            ScramblerKind::Dense { .. } => "dense",
            ScramblerKind::PerfectModel => "perfect",
        };
        writeln!(
            out,
            "# scrambler kind={kind} k={}{param} seed={}",
            self.spec.k, self.spec.seed
        )
        .map_err(Gf2Error::from)?;
        self.s.write_text(out)?;
        self.s_inv.write_text(out)?;
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: &mut R) -> Result<Self, ScramblerError> {
        let mut header = String::new();
        input.read_line(&mut header).map_err(Gf2Error::from)?;
        let spec = parse_header(header.trim())?;
        let s = BitMatrix::read_text(input, 2)?;
        let s_inv = BitMatrix::read_text(input, 3 + s.rows())?;
        if s.rows() != spec.k || s_inv.rows() != spec.k {
            return Err(ScramblerError::InvalidSpec(format!(
                "header says k={} but matrices are {}x{} and {}x{}",
                spec.k,
                s.rows(),
                s.cols(),
                s_inv.rows(),
                s_inv.cols()
            )));
        }
        if !s.mul(&s_inv)?.is_identity() {
            return Err(ScramblerError::InvalidSpec(
                "stored matrices are not inverses of each other".into(),
            ));
        }
        Ok(ScramblerPair { spec, s, s_inv })
    }
}

fn parse_header(line: &str) -> Result<ScramblerSpec, ScramblerError> {
    let bad = |why: &str| ScramblerError::InvalidSpec(format!("scrambler header: {why}"));
    let body = line
        .strip_prefix("# scrambler")
        .ok_or_else(|| bad("missing `# scrambler` prefix"))?;
    let mut kind = None;
    let mut k = None;
    let mut w = None;
    let mut density = None;
    let mut seed = None;
    for field in body.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| bad(field))?;
        match key {
            "kind" => kind = Some(value.to_string()),
            "k" => k = value.parse().ok(),
            "w" => w = value.parse().ok(),
            "density" => density = value.parse().ok(),
            "seed" => seed = value.parse().ok(),
            _ => return Err(bad(&format!("unknown field {key}"))),
        }
    }
    let kind = match kind.as_deref() {
        Some("identity") => ScramblerKind::Identity,
        Some("regular") => ScramblerKind::Regular {
            w: w.ok_or_else(|| bad("regular scrambler without w"))?,
        },
        Some("dense") => ScramblerKind::Dense {
            density: density.ok_or_else(|| bad("dense scrambler without density"))?,
        },
        _ => return Err(bad("unknown kind")),
    };
    Ok(ScramblerSpec {
        kind,
        k: k.ok_or_else(|| bad("missing k"))?,
        seed: seed.ok_or_else(|| bad("missing seed"))?,
    })
}

fn sample_invertible(
    spec: &ScramblerSpec,
    rng: &mut ChaCha8Rng,
    mut candidate: impl FnMut(&mut ChaCha8Rng) -> BitMatrix,
) -> Result<(BitMatrix, BitMatrix), ScramblerError> {
    for _ in 0..RETRY_BUDGET {
        let s_inv = candidate(rng);
        if let Some(s) = s_inv.invert()? {
            return Ok((s, s_inv));
        }
    }
    Err(ScramblerError::Construction {
        kind: spec.kind.to_string(),
        attempts: RETRY_BUDGET,
    })
}

fn regular_candidate(k: usize, w: usize, rng: &mut ChaCha8Rng) -> BitMatrix {
    let mut m = BitMatrix::zeros(k, k);
    for col in 0..k {
        for row in index::sample(rng, k, w) {
            m.set(row, col, true);
        }
    }
    m
}

fn dense_candidate(k: usize, density: f64, rng: &mut ChaCha8Rng) -> BitMatrix {
    let rows: Vec<BitVector> = if density == 0.5 {
        (0..k).map(|_| BitVector::random(k, rng)).collect()
    } else {
        (0..k)
            .map(|_| {
                let bits: Vec<bool> = (0..k).map(|_| rng.random_bool(density)).collect();
                BitVector::from_bools(&bits)
            })
            .collect()
    };
    BitMatrix::from_row_vectors(&rows, k).expect("rows have length k")
}
