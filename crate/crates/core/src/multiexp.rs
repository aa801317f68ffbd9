//! Double exponentiation `a^{e1} · b^{e2} mod N`, the verifier's hot path.
//!
//! Two kernels are provided. The naive one runs two independent
//! square-and-multiply passes and multiplies the results. The interleaved one
//! scans both exponents together in base `2^w` digits against a table of
//! `a^i · b^j`, so the squarings are shared between the two exponents.
//!
//! Both kernels are generic over [`ModRing`] and count every multiplication
//! they request, so the reported [`MultiExpStats`] can be checked against a
//! [`Counting`](crate::arith::Counting) wrapper.

use std::path::Path;

use num_bigint::{BigUint, RandBigInt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{GroupElement, ModRing, RsaGroup};
use crate::error::{Error, Result};
use crate::stats::{mad, median, time_once};

/// Window width used by verification unless told otherwise.
pub const DEFAULT_WINDOW: u32 = 2;

/// Largest supported window width (a 65536-entry table).
pub const MAX_WINDOW: u32 = 8;

/// Operation counts for one double exponentiation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MultiExpStats {
    pub squarings: u64,
    /// Multiplications during the scan, the final combine included.
    pub multiplications: u64,
    /// Multiplications spent building the window table.
    pub precompute_mults: u64,
    /// Window width; 1 for the naive method.
    pub window_bits: u32,
}

impl MultiExpStats {
    pub fn total(&self) -> u64 {
        self.squarings + self.multiplications + self.precompute_mults
    }
}

fn check_window(w: u32) -> Result<()> {
    if !(1..=MAX_WINDOW).contains(&w) {
        return Err(Error::Parameter(format!(
            "window width {w} outside 1..={MAX_WINDOW}"
        )));
    }
    Ok(())
}

/// Left-to-right square-and-multiply starting from the top set bit.
fn pow_counted<R: ModRing>(ring: &R, base: &R::Elem, e: &BigUint, stats: &mut MultiExpStats) -> R::Elem {
    let bits = e.bits();
    if bits == 0 {
        return ring.one();
    }
    let mut acc = base.clone();
    for i in (0..bits - 1).rev() {
        acc = ring.square(&acc);
        stats.squarings += 1;
        if e.bit(i) {
            acc = ring.mul(&acc, base);
            stats.multiplications += 1;
        }
    }
    acc
}

/// Two separate exponentiations and one final multiplication, always
/// performed.
pub fn naive_in<R: ModRing>(
    ring: &R,
    a: &R::Elem,
    e1: &BigUint,
    b: &R::Elem,
    e2: &BigUint,
) -> (R::Elem, MultiExpStats) {
    let mut stats = MultiExpStats {
        window_bits: 1,
        ..Default::default()
    };
    let pa = pow_counted(ring, a, e1, &mut stats);
    let pb = pow_counted(ring, b, e2, &mut stats);
    let out = ring.mul(&pa, &pb);
    stats.multiplications += 1;
    (out, stats)
}

/// Digit `d` (base `2^w`, little-endian digit order) of `e`.
fn digit(e: &BigUint, d: u64, w: u32) -> usize {
    let base = d * u64::from(w);
    (0..u64::from(w))
        .filter(|&i| e.bit(base + i))
        .fold(0, |acc, i| acc | (1usize << i))
}

/// Interleaved fixed-window simultaneous exponentiation.
///
/// The table holds `a^i · b^j` for `0 ≤ i, j < 2^w` and costs `4^w − 3`
/// multiplications. The scan performs exactly `w` squarings and one table
/// multiplication per digit position, so for exponents of a given length the
/// operation count does not depend on their values.
pub fn interleaved_in<R: ModRing>(
    ring: &R,
    a: &R::Elem,
    e1: &BigUint,
    b: &R::Elem,
    e2: &BigUint,
    w: u32,
) -> Result<(R::Elem, MultiExpStats)> {
    check_window(w)?;
    let mut stats = MultiExpStats {
        window_bits: w,
        ..Default::default()
    };
    let side = 1usize << w;

    // table[i * side + j] = a^i · b^j
    let mut table: Vec<R::Elem> = Vec::with_capacity(side * side);
    let mut a_pows = vec![ring.one(), a.clone()];
    for i in 2..side {
        let next = ring.mul(&a_pows[i - 1], a);
        stats.precompute_mults += 1;
        a_pows.push(next);
    }
    let mut b_pows = vec![ring.one(), b.clone()];
    for j in 2..side {
        let next = ring.mul(&b_pows[j - 1], b);
        stats.precompute_mults += 1;
        b_pows.push(next);
    }
    for (i, ai) in a_pows.iter().enumerate() {
        for (j, bj) in b_pows.iter().enumerate() {
            let entry = if i == 0 {
                bj.clone()
            } else if j == 0 {
                ai.clone()
            } else {
                stats.precompute_mults += 1;
                ring.mul(ai, bj)
            };
            table.push(entry);
        }
    }

    let bits = e1.bits().max(e2.bits());
    let digits = bits.div_ceil(u64::from(w));
    let mut acc = ring.one();
    for d in (0..digits).rev() {
        for _ in 0..w {
            acc = ring.square(&acc);
            stats.squarings += 1;
        }
        // Multiplying by the identity entry on an all-zero digit pair keeps
        // the schedule a function of the exponent length alone.
        let (i, j) = (digit(e1, d, w), digit(e2, d, w));
        acc = ring.mul(&acc, &table[i * side + j]);
        stats.multiplications += 1;
    }
    Ok((acc, stats))
}

fn same_group(a: &GroupElement, b: &GroupElement) -> Result<()> {
    if a.group() != b.group() {
        return Err(Error::Parameter("operands belong to different groups".into()));
    }
    Ok(())
}

fn lift(a: &GroupElement, value: BigUint) -> GroupElement {
    a.group().element(value).expect("ring output is reduced")
}

pub fn multiexp_naive(
    a: &GroupElement,
    e1: &BigUint,
    b: &GroupElement,
    e2: &BigUint,
) -> Result<(GroupElement, MultiExpStats)> {
    same_group(a, b)?;
    let mont = a.group().montgomery();
    let (out, stats) = naive_in(mont, &mont.import(a.value()), e1, &mont.import(b.value()), e2);
    Ok((lift(a, mont.export(&out)), stats))
}

pub fn multiexp_interleaved(
    a: &GroupElement,
    e1: &BigUint,
    b: &GroupElement,
    e2: &BigUint,
    w: u32,
) -> Result<(GroupElement, MultiExpStats)> {
    same_group(a, b)?;
    let mont = a.group().montgomery();
    let (out, stats) =
        interleaved_in(mont, &mont.import(a.value()), e1, &mont.import(b.value()), e2, w)?;
    Ok((lift(a, mont.export(&out)), stats))
}

/// Grid and repetition count for [`bench_multiexp`].
#[derive(Clone, Debug)]
pub struct MultiExpBenchPlan {
    pub lambdas: Vec<u64>,
    pub ks: Vec<u32>,
    pub windows: Vec<u32>,
    pub reps: usize,
    pub seed: u64,
}

impl Default for MultiExpBenchPlan {
    fn default() -> Self {
        Self {
            lambdas: vec![1024, 2048, 4096],
            ks: vec![96, 128, 160],
            windows: vec![2],
            reps: 30,
            seed: 1,
        }
    }
}

/// One CSV row of the multiexp comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiExpRow {
    pub lambda: u64,
    pub k: u32,
    pub w: u32,
    pub method: String,
    pub median_ns: f64,
    pub mad_ns: f64,
    pub squarings: u64,
    pub mults: u64,
}

/// Random odd modulus with exactly `bits` bits. Timing only needs the
/// operand size, not a hard-to-factor modulus.
fn timing_modulus(bits: u64, rng: &mut ChaCha8Rng) -> Result<RsaGroup> {
    let mut n = rng.gen_biguint(bits);
    n.set_bit(bits - 1, true);
    n.set_bit(0, true);
    RsaGroup::from_modulus(n)
}

/// Times both methods on verification-shaped inputs: a 2k-bit `e1` (like l)
/// and an `e2 < e1` (like r). Every iteration checks that both methods agree.
/// Naive and interleaved runs alternate so drift affects both equally.
pub fn bench_multiexp(plan: &MultiExpBenchPlan) -> Result<Vec<MultiExpRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut rows = Vec::new();
    for &lambda in &plan.lambdas {
        let group = timing_modulus(lambda, &mut rng)?;
        let mont = group.montgomery();
        for &k in &plan.ks {
            for &w in &plan.windows {
                check_window(w)?;
                let mut naive_ns = Vec::with_capacity(plan.reps);
                let mut inter_ns = Vec::with_capacity(plan.reps);
                let mut naive_stats = MultiExpStats::default();
                let mut inter_stats = MultiExpStats::default();
                for _ in 0..plan.reps {
                    let a = mont.import(group.random_element(&mut rng).value());
                    let b = mont.import(group.random_element(&mut rng).value());
                    let mut e1 = rng.gen_biguint(u64::from(2 * k));
                    e1.set_bit(u64::from(2 * k) - 1, true);
                    let e2 = rng.gen_biguint_below(&e1);

                    let (t_n, (y_n, s_n)) = time_once(|| naive_in(mont, &a, &e1, &b, &e2));
                    let (t_i, res) = time_once(|| interleaved_in(mont, &a, &e1, &b, &e2, w));
                    let (y_i, s_i) = res?;
                    if mont.export(&y_n) != mont.export(&y_i) {
                        return Err(Error::Integrity(format!(
                            "multiexp methods disagree at λ={lambda}, k={k}, w={w}"
                        )));
                    }
                    naive_ns.push(t_n as f64);
                    inter_ns.push(t_i as f64);
                    naive_stats = s_n;
                    inter_stats = s_i;
                }
                for (method, ns, stats) in [
                    ("naive", &naive_ns, naive_stats),
                    ("interleaved", &inter_ns, inter_stats),
                ] {
                    rows.push(MultiExpRow {
                        lambda,
                        k,
                        w,
                        method: method.to_string(),
                        median_ns: median(ns),
                        mad_ns: mad(ns),
                        squarings: stats.squarings,
                        mults: stats.multiplications + stats.precompute_mults,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with header
/// `lambda,k,w,method,median_ns,mad_ns,squarings,mults`.
pub fn write_multiexp_csv(rows: &[MultiExpRow], path: &Path) -> Result<()> {
    let mut out = csv::Writer::from_path(path)?;
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Counting, PlainModulus};
    use proptest::prelude::*;
    use rand::Rng;

    fn toy() -> RsaGroup {
        RsaGroup::from_modulus(BigUint::from(35u32)).unwrap()
    }

    fn el(g: &RsaGroup, v: u32) -> GroupElement {
        g.element(BigUint::from(v)).unwrap()
    }

    #[test]
    fn small_examples() {
        let g = toy();
        let (a, b) = (el(&g, 3), el(&g, 2));
        let zero = BigUint::from(0u32);
        let one = BigUint::from(1u32);
        assert_eq!(multiexp_naive(&a, &zero, &b, &zero).unwrap().0, el(&g, 1));
        assert_eq!(multiexp_naive(&a, &one, &b, &one).unwrap().0, el(&g, 6));
        let (y, _) = multiexp_naive(&a, &BigUint::from(5u32), &b, &BigUint::from(4u32)).unwrap();
        assert_eq!(y, el(&g, 3));
        for w in 1..=4 {
            let (y, _) =
                multiexp_interleaved(&a, &BigUint::from(5u32), &b, &BigUint::from(4u32), w).unwrap();
            assert_eq!(y, el(&g, 3));
        }
    }

    #[test]
    fn exhaustive_small_exponents() {
        let g = toy();
        let (a, b) = (el(&g, 12), el(&g, 17));
        for e1 in 0u32..64 {
            for e2 in 0u32..64 {
                let (e1, e2) = (BigUint::from(e1), BigUint::from(e2));
                let expected = (a.value().modpow(&e1, g.modulus())
                    * b.value().modpow(&e2, g.modulus()))
                    % g.modulus();
                let (n, _) = multiexp_naive(&a, &e1, &b, &e2).unwrap();
                assert_eq!(n.value(), &expected);
                for w in 1..=3 {
                    let (i, _) = multiexp_interleaved(&a, &e1, &b, &e2, w).unwrap();
                    assert_eq!(i, n);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_window_and_mixed_groups() {
        let g = toy();
        let a = el(&g, 3);
        let e = BigUint::from(3u32);
        assert!(multiexp_interleaved(&a, &e, &a, &e, 0).is_err());
        assert!(multiexp_interleaved(&a, &e, &a, &e, 9).is_err());
        let other = RsaGroup::from_modulus(BigUint::from(391u32)).unwrap();
        let b = other.element(BigUint::from(3u32)).unwrap();
        assert!(multiexp_naive(&a, &e, &b, &e).is_err());
    }

    #[test]
    fn stats_match_counting_wrapper() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let n = timing_modulus(256, &mut rng).unwrap();
        let plain = PlainModulus::new(n.modulus().clone());
        for w in 1..=5 {
            for _ in 0..20 {
                let a = rng.gen_biguint_below(n.modulus());
                let b = rng.gen_biguint_below(n.modulus());
                let (b1, b2) = (rng.gen_range(0..300), rng.gen_range(0..300));
                let e1 = rng.gen_biguint(b1);
                let e2 = rng.gen_biguint(b2);

                let counting = Counting::new(&plain);
                let (_, s) = interleaved_in(&counting, &a, &e1, &b, &e2, w).unwrap();
                assert_eq!(counting.squarings(), s.squarings);
                assert_eq!(counting.multiplications(), s.multiplications + s.precompute_mults);
                assert_eq!(s.precompute_mults, (1u64 << (2 * w)) - 3);
                let bits = e1.bits().max(e2.bits());
                assert_eq!(s.squarings, bits.div_ceil(u64::from(w)) * u64::from(w));
                assert_eq!(s.multiplications, bits.div_ceil(u64::from(w)));

                let counting = Counting::new(&plain);
                let (_, s) = naive_in(&counting, &a, &e1, &b, &e2);
                assert_eq!(counting.squarings(), s.squarings);
                assert_eq!(counting.multiplications(), s.multiplications);
                assert_eq!(s.precompute_mults, 0);
            }
        }
    }

    #[test]
    fn verification_shaped_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let g = timing_modulus(2048, &mut rng).unwrap();
        for _ in 0..10 {
            let a = g.random_element(&mut rng);
            let b = g.random_element(&mut rng);
            let e1 = rng.gen_biguint(256);
            let e2 = rng.gen_biguint_below(&e1);
            let (_, s) = multiexp_interleaved(&a, &e1, &b, &e2, 2).unwrap();
            assert!(s.squarings <= 256);
            assert!(s.multiplications <= 128);
            assert!(s.precompute_mults <= 16);
        }
    }

    #[test]
    fn bench_rows_have_both_methods() {
        let plan = MultiExpBenchPlan {
            lambdas: vec![256],
            ks: vec![64],
            windows: vec![1, 2],
            reps: 3,
            seed: 2,
        };
        let rows = bench_multiexp(&plan).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().any(|r| r.method == "naive"));
        assert!(rows.iter().any(|r| r.method == "interleaved" && r.w == 2));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("multiexp.csv");
        write_multiexp_csv(&rows, &path).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "lambda,k,w,method,median_ns,mad_ns,squarings,mults"
        );
    }

    proptest! {
        #[test]
        fn interleaved_equals_naive(seed in any::<u64>(), w in 1u32..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bits = rng.gen_range(3..600);
            let n = timing_modulus(bits, &mut rng).unwrap();
            let a = n.random_element(&mut rng);
            let b = n.random_element(&mut rng);
            let (b1, b2) = (rng.gen_range(0..400), rng.gen_range(0..400));
            let e1 = rng.gen_biguint(b1);
            let e2 = rng.gen_biguint(b2);
            let (x, _) = multiexp_naive(&a, &e1, &b, &e2).unwrap();
            let (y, _) = multiexp_interleaved(&a, &e1, &b, &e2, w).unwrap();
            prop_assert_eq!(x, y);
        }
    }
}
