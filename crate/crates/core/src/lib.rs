//! Scrambled non-systematic coding for the AWGN wire-tap channel.
//!
//! A message `u` is scrambled by a dense invertible matrix before systematic
//! encoding, `c = u·S·G`. A receiver left with residual errors `e` after
//! decoding recovers `u + e_l·S⁻¹`, so a few errors are spread over many
//! message bits. The crate provides the GF(2) machinery, the codes (unitary,
//! ideal bounded-distance, PEG-built LDPC), closed-form error rates, a seeded
//! Monte Carlo engine and the security-gap computation built on top.

pub mod analytic;
pub mod block_codes;
pub mod channel;
pub mod cli;
pub mod gf2;
pub mod ldpc;
pub mod montecarlo;
pub mod scrambling;
pub mod secgap;
