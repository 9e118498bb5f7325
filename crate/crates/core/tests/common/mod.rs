//! Reference implementations used as test oracles. Nothing here calls into
//! the library's numerical routines.

#![allow(dead_code)]

use std::collections::HashSet;

pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Kahan-compensated sum.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// erfc from the positive-term series `erf(x) = 2/√π·e^(-x²)·Σ 2ⁿx^(2n+1)/(2n+1)!!`
/// below 2 and the Laplace continued fraction above.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        let x2 = x * x;
        let mut term = x;
        let mut n = 0.0;
        let mut terms = vec![term];
        while term > 1e-30 * terms[0].max(1e-300) {
            n += 1.0;
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            terms.push(term);
            if n > 500.0 {
                break;
            }
        }
        let erf = 2.0 / SQRT_PI * (-x2).exp() * kahan_sum(terms);
        1.0 - erf
    } else {
        // erfc(x) = e^(-x²)/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let mut f = x;
        for j in (1..5000).rev() {
            f = x + (j as f64 / 2.0) / f;
        }
        (-x * x).exp() / SQRT_PI / f
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Uncoded BPSK error probability at `rate · Eb/N0`.
pub fn bpsk(ebn0_db: f64, rate: f64) -> f64 {
    0.5 * erfc((rate * db_to_linear(ebn0_db)).sqrt())
}

/// `ln m!` by compensated summation of logs.
pub fn ln_factorial(m: usize) -> f64 {
    kahan_sum((2..=m).map(|j| (j as f64).ln()))
}

/// `(Σ_{i≥from} C(n,i)pⁱqⁿ⁻ⁱ, Σ_{i≥from} (i/n)·C(n,i)pⁱqⁿ⁻ⁱ)` from a
/// log-factorial table.
pub fn binomial_tails(n: usize, from: usize, p: f64) -> (f64, f64) {
    let mut lf = vec![0.0f64; n + 1];
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for (m, slot) in lf.iter_mut().enumerate().skip(2) {
        let y = (m as f64).ln() - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
        *slot = sum;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let terms: Vec<(usize, f64)> = (from..=n)
        .map(|i| (i, (lf[n] - lf[i] - lf[n - i] + i as f64 * lp + (n - i) as f64 * lq).exp()))
        .collect();
    (
        kahan_sum(terms.iter().map(|&(_, t)| t)),
        kahan_sum(terms.iter().map(|&(i, t)| t * i as f64 / n as f64)),
    )
}

/// Same tails by enumerating all 2ⁿ error patterns (small `n` only).
pub fn enumerate_tails(n: usize, from: usize, p: f64) -> (f64, f64) {
    assert!(n <= 20);
    let (mut pf, mut pe) = (Vec::new(), Vec::new());
    for pattern in 0u32..(1 << n) {
        let w = pattern.count_ones() as usize;
        if w >= from {
            let pr = p.powi(w as i32) * (1.0 - p).powi((n - w) as i32);
            pf.push(pr);
            pe.push(pr * w as f64 / n as f64);
        }
    }
    (kahan_sum(pf), kahan_sum(pe))
}

/// Probability that the XOR of `w` independent bits, each one with
/// probability `p`, is one; by enumeration of all 2ʷ patterns.
pub fn odd_parity_enumerated(w: usize, p: f64) -> f64 {
    assert!(w <= 20);
    kahan_sum((0u32..(1 << w)).filter(|x| x.count_ones() % 2 == 1).map(|x| {
        let ones = x.count_ones() as i32;
        p.powi(ones) * (1.0 - p).powi(w as i32 - ones)
    }))
}

/// Same probability by the exact recursion `q ← q(1-p) + (1-q)p`.
pub fn odd_parity_recursive(w: usize, p: f64) -> f64 {
    let mut q = 0.0;
    for _ in 0..w {
        q = q * (1.0 - p) + (1.0 - q) * p;
    }
    q
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

/// True when two checks share two variables, i.e. the graph has a 4-cycle.
pub fn has_four_cycle(checks: &[Vec<usize>]) -> bool {
    let mut seen = HashSet::new();
    for row in checks {
        for (a, &u) in row.iter().enumerate() {
            for &v in &row[a + 1..] {
                if !seen.insert((u.min(v), u.max(v))) {
                    return true;
                }
            }
        }
    }
    false
}

/// `|observed - expected| ≤ z · se`.
pub fn within_se(observed: f64, expected: f64, se: f64, z: f64) -> bool {
    (observed - expected).abs() <= z * se
}

/// Binomial standard error of a proportion `p` over `trials`.
pub fn binomial_se(p: f64, trials: f64) -> f64 {
    (p * (1.0 - p) / trials).sqrt()
}
