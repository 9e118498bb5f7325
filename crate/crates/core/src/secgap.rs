//! Bob/Eve thresholds and the security gap.
//!
//! Bob's threshold is the smallest Eb/N0 with BER ≤ P̄ₑᴮ, Eve's the smallest
//! with BER ≤ P̄ₑᴱ; the gap is their difference in dB. Both are read off one
//! BER curve, which may be analytic or a list of simulated points.

use thiserror::Error;

use crate::analytic::AnalyticScheme;
use crate::montecarlo::{CsvRow, SimResult};

pub const DEFAULT_PE_B: f64 = 1e-5;
pub const DEFAULT_PE_E: f64 = 0.4;

/// Bisection stops once the bracket is narrower than this (dB).
pub const BISECTION_TOL_DB: f64 = 1e-9;

pub const GAP_CSV_HEADER: &str = "scheme,pe_b_target,pe_e_target,ebn0_b_db,ebn0_e_db,gap_db";
pub const BER_VS_GAP_CSV_HEADER: &str = "scheme,gap_db,pe_e";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GapError {
    #[error("target BER {target:e} outside the achieved range [{min_ber:e}, {max_ber:e}]")]
    OutOfRange {
        target: f64,
        min_ber: f64,
        max_ber: f64,
    },
    #[error("Eb/N0 {ebn0_db} dB outside the curve domain [{lo}, {hi}] dB")]
    Domain { ebn0_db: f64, lo: f64, hi: f64 },
    #[error(
        "BER rises from {ber_a:e} at {db_a} dB to {ber_b:e} at {db_b} dB, beyond 2-sigma slack"
    )]
    NonMonotonic {
        db_a: f64,
        ber_a: f64,
        db_b: f64,
        ber_b: f64,
    },
    #[error("a simulated curve needs at least 2 points with errors, found {0}")]
    TooFewPoints(usize),
    #[error("invalid targets: {0}")]
    Targets(String),
}

/// A simulated operating point; `bits` is the number of message bits observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub ebn0_db: f64,
    pub ber: f64,
    pub bits: f64,
}

impl CurvePoint {
    fn sigma(&self) -> f64 {
        (self.ber * (1.0 - self.ber) / self.bits).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveSource {
    Analytic(AnalyticScheme),
    /// Sorted by Eb/N0, zero-error points removed.
    Simulated(Vec<CurvePoint>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub tag: String,
    pub source: CurveSource,
    pub domain: (f64, f64),
}

impl BerCurve {
    /// Analytic curve searched over `domain` (dB).
    pub fn analytic(scheme: AnalyticScheme, domain: (f64, f64)) -> Self {
        BerCurve {
            tag: scheme.tag(),
            source: CurveSource::Analytic(scheme),
            domain,
        }
    }

    /// Simulated curve; points without bit errors are dropped.
    pub fn simulated(tag: &str, points: Vec<CurvePoint>) -> Result<Self, GapError> {
        let mut pts: Vec<CurvePoint> = points.into_iter().filter(|p| p.ber > 0.0).collect();
        if pts.len() < 2 {
            return Err(GapError::TooFewPoints(pts.len()));
        }
        pts.sort_by(|a, b| a.ebn0_db.total_cmp(&b.ebn0_db));
        for w in pts.windows(2) {
            let slack = 2.0 * (w[0].sigma().powi(2) + w[1].sigma().powi(2)).sqrt();
            if w[1].ber > w[0].ber + slack {
                return Err(GapError::NonMonotonic {
                    db_a: w[0].ebn0_db,
                    ber_a: w[0].ber,
                    db_b: w[1].ebn0_db,
                    ber_b: w[1].ber,
                });
            }
        }
        let domain = (pts[0].ebn0_db, pts[pts.len() - 1].ebn0_db);
        Ok(BerCurve {
            tag: tag.to_string(),
            source: CurveSource::Simulated(pts),
            domain,
        })
    }

    pub fn from_sim_result(result: &SimResult) -> Result<Self, GapError> {
        let pts = result
            .points
            .iter()
            .map(|p| CurvePoint {
                ebn0_db: p.ebn0_db,
                ber: p.ber(),
                bits: p.frames as f64 * p.k as f64,
            })
            .collect();
        Self::simulated(&result.label, pts)
    }

    /// Builds a curve from parsed CSV rows carrying the given label. The number
    /// of observed bits is recovered as `bit_errors / ber`.
    pub fn from_csv_rows(tag: &str, rows: &[CsvRow]) -> Result<Self, GapError> {
        let pts = rows
            .iter()
            .filter(|r| r.label == tag && r.ber > 0.0)
            .map(|r| CurvePoint {
                ebn0_db: r.ebn0_db,
                ber: r.ber,
                bits: r.bit_errors as f64 / r.ber,
            })
            .collect();
        Self::simulated(tag, pts)
    }

    /// BER at `ebn0_db`; simulated curves interpolate in log10(BER).
    pub fn evaluate(&self, ebn0_db: f64) -> Result<f64, GapError> {
        let (lo, hi) = self.domain;
        if !(ebn0_db >= lo && ebn0_db <= hi) {
            return Err(GapError::Domain { ebn0_db, lo, hi });
        }
        match &self.source {
            CurveSource::Analytic(s) => Ok(s.ber(ebn0_db)),
            CurveSource::Simulated(pts) => {
                let j = pts
                    .iter()
                    .position(|p| p.ebn0_db >= ebn0_db)
                    .expect("inside the domain");
                if j == 0 || pts[j].ebn0_db == ebn0_db {
                    return Ok(pts[j].ber);
                }
                let (a, b) = (pts[j - 1], pts[j]);
                let frac = (ebn0_db - a.ebn0_db) / (b.ebn0_db - a.ebn0_db);
                Ok(10f64.powf(a.ber.log10() + frac * (b.ber.log10() - a.ber.log10())))
            }
        }
    }

    fn achieved_range(&self) -> (f64, f64) {
        match &self.source {
            CurveSource::Analytic(s) => (s.ber(self.domain.1), s.ber(self.domain.0)),
            CurveSource::Simulated(pts) => pts.iter().fold((f64::INFINITY, 0.0f64), |(mn, mx), p| {
                (mn.min(p.ber), mx.max(p.ber))
            }),
        }
    }

    /// Smallest Eb/N0 (dB) with BER ≤ `target`.
    pub fn invert(&self, target: f64) -> Result<f64, GapError> {
        let (min_ber, max_ber) = self.achieved_range();
        let out_of_range = GapError::OutOfRange {
            target,
            min_ber,
            max_ber,
        };
        match &self.source {
            CurveSource::Analytic(s) => {
                let (mut lo, mut hi) = self.domain;
                if s.ber(hi) > target || s.ber(lo) < target {
                    return Err(out_of_range);
                }
                while hi - lo > BISECTION_TOL_DB {
                    let mid = 0.5 * (lo + hi);
                    if s.ber(mid) <= target {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Ok(hi)
            }
            CurveSource::Simulated(pts) => {
                let j = pts.iter().position(|p| p.ber <= target).ok_or(out_of_range.clone())?;
                if pts[j].ber == target {
                    return Ok(pts[j].ebn0_db);
                }
                if j == 0 {
                    return Err(out_of_range);
                }
                let (a, b) = (pts[j - 1], pts[j]);
                let (la, lb, lt) = (a.ber.log10(), b.ber.log10(), target.log10());
                Ok(a.ebn0_db + (la - lt) / (la - lb) * (b.ebn0_db - a.ebn0_db))
            }
        }
    }
}

/// Free-function form of [`BerCurve::invert`].
pub fn invert_ber(curve: &BerCurve, target_pe: f64) -> Result<f64, GapError> {
    curve.invert(target_pe)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapResult {
    pub pe_b_target: f64,
    pub pe_e_target: f64,
    pub ebn0_b_db: f64,
    pub ebn0_e_db: f64,
    pub gap_db: f64,
}

impl GapResult {
    pub fn csv_row(&self, scheme: &str) -> String {
        format!(
            "{scheme},{:e},{:e},{:.6},{:.6},{:.6}",
            self.pe_b_target, self.pe_e_target, self.ebn0_b_db, self.ebn0_e_db, self.gap_db
        )
    }
}

pub fn security_gap(curve: &BerCurve, pe_b_target: f64, pe_e_target: f64) -> Result<GapResult, GapError> {
    if !(pe_b_target > 0.0 && pe_b_target <= pe_e_target && pe_e_target < 1.0) {
        return Err(GapError::Targets(format!(
            "need 0 < P_B ({pe_b_target}) <= P_E ({pe_e_target}) < 1"
        )));
    }
    let ebn0_b_db = curve.invert(pe_b_target)?;
    let ebn0_e_db = curve.invert(pe_e_target)?;
    Ok(GapResult {
        pe_b_target,
        pe_e_target,
        ebn0_b_db,
        ebn0_e_db,
        gap_db: ebn0_b_db - ebn0_e_db,
    })
}

/// Eve's BER at each gap, with Bob fixed at his threshold for `pe_b_target`.
pub fn ber_vs_gap(
    curve: &BerCurve,
    pe_b_target: f64,
    gaps: &[f64],
) -> Result<Vec<(f64, Result<f64, GapError>)>, GapError> {
    let bob = curve.invert(pe_b_target)?;
    Ok(gaps
        .iter()
        .map(|&g| (g, curve.evaluate(bob - g)))
        .collect())
}
