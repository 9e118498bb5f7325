//! Closed-form bit and frame error rates for BPSK with unitary-rate coding,
//! with an ideal t-error-correcting code, and with or without scrambling.
//!
//! Binomial tails are accumulated in the log domain with compensated
//! summation, so `n` in the thousands neither overflows `C(n, i)` nor loses
//! the small tail terms.

use std::fmt;

/// `10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Complementary error function (musl/FreeBSD algorithm, sub-ulp accuracy).
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Uncoded BPSK bit error probability at `Eb/N0 · rate`.
pub fn bpsk_bit_error(ebn0_db: f64, rate: f64) -> f64 {
    0.5 * erfc((db_to_linear(ebn0_db) * rate).sqrt())
}

/// `ln C(n, i)`.
pub fn ln_binomial(n: usize, i: usize) -> f64 {
    debug_assert!(i <= n);
    if i == 0 || i == n {
        return 0.0;
    }
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(i as f64 + 1.0) - libm::lgamma((n - i) as f64 + 1.0)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Upper binomial tail starting at `from`:
/// returns `(Σ_{i≥from} C(n,i)p^i(1-p)^(n-i), Σ_{i≥from} (i/n)·C(n,i)p^i(1-p)^(n-i))`.
pub fn binomial_tails(n: usize, from: usize, p: f64) -> (f64, f64) {
    if from > n || n == 0 {
        return (0.0, 0.0);
    }
    if p <= 0.0 {
        return if from == 0 { (1.0, 0.0) } else { (0.0, 0.0) };
    }
    if p >= 1.0 {
        return (1.0, 1.0);
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let log_terms: Vec<f64> = (from..=n)
        .map(|i| ln_binomial(n, i) + i as f64 * ln_p + (n - i) as f64 * ln_q)
        .collect();
    let peak = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut mass = CompensatedSum::default();
    let mut weighted = CompensatedSum::default();
    for (offset, &lt) in log_terms.iter().enumerate() {
        let term = (lt - peak).exp();
        mass.add(term);
        weighted.add(term * (from + offset) as f64 / n as f64);
    }
    let scale = peak.exp();
    (
        (mass.value() * scale).min(1.0),
        (weighted.value() * scale).min(1.0),
    )
}

/// Error rates at one operating point. `p_r` is the bit error rate
/// conditioned on an erred frame (zero when `p_f` is zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPoint {
    pub ebn0_db: f64,
    pub p_e: f64,
    pub p_f: f64,
    pub p_r: f64,
}

impl AnalyticPoint {
    fn new(ebn0_db: f64, p_e: f64, p_f: f64) -> Self {
        AnalyticPoint {
            ebn0_db,
            p_e,
            p_f,
            p_r: conditional_ber(p_e, p_f),
        }
    }
}

/// `P_r = P_e / P_f`.
pub fn conditional_ber(p_e: f64, p_f: f64) -> f64 {
    if p_f > 0.0 {
        p_e / p_f
    } else {
        0.0
    }
}

/// `1 - (1 - p)^k` without cancellation for small `p`.
fn any_of(p: f64, k: usize) -> f64 {
    -((k as f64) * (-p).ln_1p()).exp_m1()
}

/// Framed uncoded BPSK, no scrambling.
pub fn unitary_unscrambled(ebn0_db: f64, k: usize) -> AnalyticPoint {
    let p_e = bpsk_bit_error(ebn0_db, 1.0);
    AnalyticPoint::new(ebn0_db, p_e, any_of(p_e, k))
}

/// Framed uncoded BPSK with perfect scrambling: half the frame error rate.
pub fn unitary_perfect_scrambling(ebn0_db: f64, k: usize) -> AnalyticPoint {
    let p_f = unitary_unscrambled(ebn0_db, k).p_f;
    AnalyticPoint::new(ebn0_db, 0.5 * p_f, p_f)
}

/// Bit error rate after descrambling through a column of `S⁻¹` of weight `w`:
/// `P_f · (1 - (1 - 2P_r)^w) / 2`.
pub fn scrambled_ber(p_f: f64, p_r: f64, w: usize) -> f64 {
    let base = 1.0 - 2.0 * p_r;
    let vanish = if base > 0.0 {
        // 1 - base^w, accurate when p_r is tiny
        -((w as f64) * (-2.0 * p_r).ln_1p()).exp_m1()
    } else {
        1.0 - base.powi(w as i32)
    };
    0.5 * p_f * vanish
}

/// Per-position version for irregular scramblers, with the average over positions.
pub fn scrambled_ber_per_position(p_f: f64, p_r: f64, column_weights: &[usize]) -> (Vec<f64>, f64) {
    let per: Vec<f64> = column_weights
        .iter()
        .map(|&w| scrambled_ber(p_f, p_r, w))
        .collect();
    let avg = if per.is_empty() {
        0.0
    } else {
        per.iter().sum::<f64>() / per.len() as f64
    };
    (per, avg)
}

/// `(n, k)` code correcting up to `t` errors with hard decisions; failed frames
/// keep every channel error, spread over the whole codeword.
pub fn t_error_code(ebn0_db: f64, n: usize, k: usize, t: usize) -> AnalyticPoint {
    let p0 = bpsk_bit_error(ebn0_db, k as f64 / n as f64);
    let (p_f, p_e) = binomial_tails(n, t + 1, p0);
    AnalyticPoint::new(ebn0_db, p_e, p_f)
}

/// `P_f / 2` for the t-error-correcting code.
pub fn t_error_perfect_scrambling(ebn0_db: f64, n: usize, k: usize, t: usize) -> f64 {
    0.5 * t_error_code(ebn0_db, n, k, t).p_f
}

/// Scrambling applied on top of a base code, for curve evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scrambling {
    None,
    Regular(usize),
    Perfect,
}

impl fmt::Display for Scrambling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scrambling::None => write!(f, "none"),
            Scrambling::Regular(w) => write!(f, "w{w}"),
            Scrambling::Perfect => write!(f, "perfect"),
        }
    }
}

/// An analytic BER-versus-Eb/N0 curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticScheme {
    Unitary { k: usize, scrambling: Scrambling },
    TErrorCode {
        n: usize,
        k: usize,
        t: usize,
        scrambling: Scrambling,
    },
}

impl AnalyticScheme {
    pub fn scrambling(&self) -> Scrambling {
        match *self {
            AnalyticScheme::Unitary { scrambling, .. }
            | AnalyticScheme::TErrorCode { scrambling, .. } => scrambling,
        }
    }

    /// Base code error rates before descrambling.
    pub fn base_point(&self, ebn0_db: f64) -> AnalyticPoint {
        match *self {
            AnalyticScheme::Unitary { k, .. } => unitary_unscrambled(ebn0_db, k),
            AnalyticScheme::TErrorCode { n, k, t, .. } => t_error_code(ebn0_db, n, k, t),
        }
    }

    /// Bit error rate of the message after descrambling.
    pub fn ber(&self, ebn0_db: f64) -> f64 {
        let base = self.base_point(ebn0_db);
        match self.scrambling() {
            Scrambling::None => base.p_e,
            Scrambling::Regular(w) => scrambled_ber(base.p_f, base.p_r, w),
            Scrambling::Perfect => 0.5 * base.p_f,
        }
    }

    pub fn fer(&self, ebn0_db: f64) -> f64 {
        self.base_point(ebn0_db).p_f
    }

    /// Short tag such as `unitary_k1576_perfect` or `bch_model_2047_1354_69_w20`.
    pub fn tag(&self) -> String {
        match *self {
            AnalyticScheme::Unitary { k, scrambling } => format!("unitary_k{k}_{scrambling}"),
            AnalyticScheme::TErrorCode {
                n,
                k,
                t,
                scrambling,
            } => format!("bch_model_{n}_{k}_{t}_{scrambling}"),
        }
    }
}
