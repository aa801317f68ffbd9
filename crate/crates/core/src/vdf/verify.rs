use num_bigint::BigUint;
use num_traits::One;

use super::{derive_x, VdfInput, VdfProof};
use crate::arith::{h_prime, is_probable_prime, GroupElement, ModRing, RsaGroup};
use crate::error::{Error, Result};
use crate::multiexp::{interleaved_in, MultiExpStats, DEFAULT_WINDOW};

/// Verdict plus cost instrumentation.
#[derive(Clone, Debug, Default)]
pub struct Verification {
    pub accepted: bool,
    /// Cost of rebuilding `π^l · x^r`; zero when rejected before that step.
    pub multiexp: MultiExpStats,
    /// Squarings of small (2k-bit) numbers spent on `r = 2^τ mod l`.
    pub r_steps: u64,
}

impl Verification {
    /// Multiplications over λ-bit numbers, precomputation included.
    pub fn lambda_mults(&self) -> u64 {
        self.multiexp.total()
    }

    fn rejected() -> Self {
        Self::default()
    }
}

/// `2^τ mod l` by left-to-right square-and-double, never building `2^τ`.
fn pow2_mod(tau: u64, l: &BigUint) -> (BigUint, u64) {
    let mut acc = BigUint::one() % l;
    let mut steps = 0;
    for i in (0..64 - tau.leading_zeros()).rev() {
        acc = (&acc * &acc) % l;
        steps += 1;
        if (tau >> i) & 1 == 1 {
            acc <<= 1u32;
            if acc >= *l {
                acc -= l;
            }
        }
    }
    (acc, steps)
}

/// Checks `proof` for the declared difficulty `tau` using the default
/// window width.
///
/// `proof.tau` is not consulted; the verifier always uses the difficulty it
/// was told to expect.
pub fn verify(
    group: &RsaGroup,
    k: u32,
    input: &VdfInput,
    tau: u64,
    proof: &VdfProof,
) -> Result<Verification> {
    verify_with_window(group, k, input, tau, proof, DEFAULT_WINDOW)
}

pub fn verify_with_window(
    group: &RsaGroup,
    k: u32,
    input: &VdfInput,
    tau: u64,
    proof: &VdfProof,
    window: u32,
) -> Result<Verification> {
    if proof.pi.group() != group {
        return Err(Error::MalformedProof("π belongs to a different group".into()));
    }
    let x = derive_x(group, k, input)?;
    verify_element(&x, k, tau, proof, window)
}

pub(crate) fn verify_element(
    x: &GroupElement,
    k: u32,
    tau: u64,
    proof: &VdfProof,
    window: u32,
) -> Result<Verification> {
    let group = x.group();
    if proof.pi.value() >= group.modulus() {
        return Err(Error::MalformedProof("π is not reduced modulo N".into()));
    }
    let l = &proof.l;
    if l.bits() > u64::from(2 * k) || !is_probable_prime(l) {
        return Ok(Verification::rejected());
    }

    let (r, r_steps) = pow2_mod(tau, l);
    let mont = group.montgomery();
    let (y, multiexp) = interleaved_in(
        mont,
        &mont.import(proof.pi.value()),
        l,
        &mont.import(x.value()),
        &r,
        window,
    )?;
    let y = mont.export(&y);

    let accepted = match h_prime(x.value(), &y, k) {
        Ok(expected) => &expected == l,
        Err(Error::OverflowNegligible { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok(Verification {
        accepted,
        multiexp,
        r_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vdf::{evaluate, prove_long_division, VdfChallenge};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pow2_mod_matches_modpow() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..200 {
            let l = BigUint::from(rng.gen_range(2u64..1 << 50));
            let tau = rng.gen_range(0u64..1 << 24);
            let (r, steps) = pow2_mod(tau, &l);
            assert_eq!(r, BigUint::from(2u32).modpow(&BigUint::from(tau), &l));
            assert_eq!(steps, u64::from(64 - tau.leading_zeros()));
        }
    }

    fn honest(seed: u64, tau: u64) -> (RsaGroup, VdfChallenge, VdfProof) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = RsaGroup::generate(512, &mut rng).unwrap();
        let ch = VdfChallenge::from_message(&g, 128, b"verify me", tau).unwrap();
        let y = evaluate(&ch, None).unwrap().output;
        let (proof, _) = prove_long_division(&ch, &y).unwrap();
        (g, ch, proof)
    }

    #[test]
    fn accepts_honest_and_rejects_tampering() {
        let (g, ch, proof) = honest(31, 300);
        let ok = verify(&g, 128, ch.input(), 300, &proof).unwrap();
        assert!(ok.accepted);
        assert!(ok.lambda_mults() > 0);

        let mut bumped = proof.clone();
        let pi = (proof.pi.value() + 1u32) % g.modulus();
        bumped.pi = g.element(pi).unwrap();
        assert!(!verify(&g, 128, ch.input(), 300, &bumped).unwrap().accepted);

        assert!(!verify(&g, 128, ch.input(), 299, &proof).unwrap().accepted);

        let other = VdfInput::Message(b"verify mf".to_vec());
        assert!(!verify(&g, 128, &other, 300, &proof).unwrap().accepted);
    }

    #[test]
    fn composite_or_oversized_l_is_rejected_not_an_error() {
        let (g, ch, proof) = honest(32, 100);
        let mut bad = proof.clone();
        bad.l = &proof.l + 1u32;
        let v = verify(&g, 128, ch.input(), 100, &bad).unwrap();
        assert!(!v.accepted);
        assert_eq!(v.lambda_mults(), 0);

        bad.l = crate::arith::next_prime(&(BigUint::one() << 256));
        assert!(!verify(&g, 128, ch.input(), 100, &bad).unwrap().accepted);
    }

    #[test]
    fn foreign_group_is_malformed() {
        let (g, ch, mut proof) = honest(33, 50);
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let other = RsaGroup::generate(512, &mut rng).unwrap();
        proof.pi = other.identity();
        assert!(matches!(
            verify(&g, 128, ch.input(), 50, &proof),
            Err(Error::MalformedProof(_))
        ));
    }

    #[test]
    fn lambda_cost_independent_of_tau() {
        let (g, ch, proof) = honest(35, 1 << 10);
        let short = verify(&g, 128, ch.input(), 1 << 10, &proof).unwrap();
        // same (l, π) checked against a much larger declared τ
        let long = verify(&g, 128, ch.input(), 1 << 20, &proof).unwrap();
        assert!(short.accepted && !long.accepted);
        assert_eq!(short.multiexp, long.multiexp);
        assert_eq!(short.lambda_mults(), long.lambda_mults());
        assert!(long.r_steps > short.r_steps);

        let ch2 = VdfChallenge::from_message(&g, 128, b"verify me", 1 << 14).unwrap();
        let y2 = evaluate(&ch2, None).unwrap().output;
        let (p2, _) = prove_long_division(&ch2, &y2).unwrap();
        let other = verify(&g, 128, ch2.input(), 1 << 14, &p2).unwrap();
        assert!(other.accepted);
        assert_eq!(
            other.lambda_mults() == short.lambda_mults(),
            p2.l.bits() == proof.l.bits()
        );
    }
}
