mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wiretap::gf2::{BitMatrix, BitVector};
use wiretap::ldpc::{LdpcPreset, PunctureSet};
use wiretap::scrambling::{ScramblerKind, ScramblerPair, ScramblerSpec};

fn random_matrix(k: usize, rng: &mut ChaCha8Rng) -> BitMatrix {
    let rows: Vec<BitVector> = (0..k).map(|_| BitVector::random(k, rng)).collect();
    BitMatrix::from_row_vectors(&rows, k).unwrap()
}

/// `v·M` as the XOR of the rows selected by `v`.
fn row_combination(v: &BitVector, m: &BitMatrix) -> BitVector {
    let mut acc = BitVector::zeros(m.cols());
    for i in v.iter_ones() {
        acc.xor_assign(&m.row(i)).unwrap();
    }
    acc
}

#[test]
fn exhaustive_small_inversion() {
    // |GL(k, 2)| for k = 1..4
    let expected = [1usize, 6, 168, 20160];
    for k in 1..=4usize {
        let mut invertible = 0;
        for bits in 0u32..(1 << (k * k)) {
            let rows: Vec<Vec<u8>> = (0..k)
                .map(|r| (0..k).map(|c| ((bits >> (r * k + c)) & 1) as u8).collect())
                .collect();
            let m = BitMatrix::from_rows(&rows).unwrap();
            match m.invert().unwrap() {
                Some(inv) => {
                    invertible += 1;
                    assert!(m.mul(&inv).unwrap().is_identity());
                    assert!(inv.mul(&m).unwrap().is_identity());
                    assert_eq!(m.rank(), k);
                }
                None => assert!(m.rank() < k),
            }
        }
        assert_eq!(invertible, expected[k - 1], "k={k}");
    }
}

#[test]
fn random_inversion_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &(k, tries) in &[(64usize, 20usize), (1576, 2)] {
        let mut found = 0;
        while found < tries {
            let m = random_matrix(k, &mut rng);
            let Some(inv) = m.invert().unwrap() else { continue };
            found += 1;
            assert!(m.mul(&inv).unwrap().is_identity());
            for _ in 0..5 {
                let u = BitVector::random(k, &mut rng);
                let there = m.left_mul(&u).unwrap();
                assert_eq!(there, row_combination(&u, &m));
                assert_eq!(inv.left_mul(&there).unwrap(), u);
            }
        }
    }
}

#[test]
fn scramblers_are_inverse_pairs() {
    for (kind, k) in [
        (ScramblerKind::Regular { w: 21 }, 1576),
        (ScramblerKind::Dense { density: 0.5 }, 64),
        (ScramblerKind::Regular { w: 1 }, 64),
        (ScramblerKind::Identity, 16),
    ] {
        let pair = ScramblerPair::generate(&ScramblerSpec::new(kind, k, 3)).unwrap();
        assert!(pair.s().mul(pair.s_inv()).unwrap().is_identity(), "{kind}");
        if let ScramblerKind::Regular { w } = kind {
            assert!(pair.inverse_column_weights().iter().all(|&c| c == w));
        }
    }
}

#[test]
fn error_spreading_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pairs = [
        ScramblerPair::generate(&ScramblerSpec::new(ScramblerKind::Dense { density: 0.5 }, 64, 1)).unwrap(),
        ScramblerPair::generate(&ScramblerSpec::new(ScramblerKind::Regular { w: 21 }, 800, 2)).unwrap(),
    ];
    for trial in 0..1000 {
        let pair = &pairs[trial % 2];
        let k = pair.k();
        let u = BitVector::random(k, &mut rng);
        let mut e = BitVector::zeros(k);
        for _ in 0..rng.random_range(1..=8) {
            e.set(rng.random_range(0..k), true);
        }
        let received = pair.scramble(&u).unwrap().xor(&e).unwrap();
        let got = pair.descramble(&received).unwrap();
        let want = u.xor(&row_combination(&e, pair.s_inv())).unwrap();
        assert_eq!(got, want);
    }
}

#[test]
fn ldpc_codewords_satisfy_every_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for preset in [LdpcPreset::Desk, LdpcPreset::DeskMother] {
        let code = preset.build().unwrap();
        let h = code.graph().to_matrix();
        for _ in 0..500 {
            let u = BitVector::random(code.k(), &mut rng);
            let c = code.encode(&u).unwrap();
            assert_eq!(c.slice(0, code.k()), u);
            // H·cᵀ computed from the dense matrix rows
            for r in 0..h.rows() {
                let ones = h.row(r).iter().zip(c.iter()).filter(|&(a, b)| a && b).count();
                assert_eq!(ones % 2, 0);
            }
        }
    }
}

#[test]
fn presets_have_no_four_cycles() {
    for preset in [LdpcPreset::Desk, LdpcPreset::DeskMother, LdpcPreset::Paper] {
        let code = preset.build().unwrap();
        let g = code.graph();
        let checks: Vec<Vec<usize>> = (0..g.m()).map(|c| g.check(c).to_vec()).collect();
        assert!(!common::has_four_cycle(&checks), "{}", preset.name());
        assert!(g.girth().is_some_and(|x| x >= 6));
        assert!(g.is_lower_triangular());
        assert_eq!((g.n(), g.k()), preset.dimensions());
    }
}

#[test]
fn punctured_message_is_never_observed() {
    let code = LdpcPreset::DeskMother.build().unwrap();
    let ps = PunctureSet::first(code.n(), code.k()).unwrap();
    assert_eq!(ps.transmitted_len(), 1200);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let u = BitVector::random(code.k(), &mut rng);
    let c = code.encode(&u).unwrap();
    let tx = ps.puncture(&c).unwrap();
    assert_eq!(tx, c.slice(code.k(), code.n()));
    let llr: Vec<f64> = (0..tx.len()).map(|_| rng.random_range(-5.0..5.0)).collect();
    let full = ps.depuncture(&llr).unwrap();
    assert!(full[..code.k()].iter().all(|&x| x == 0.0));
    assert_eq!(&full[code.k()..], &llr[..]);
}
