//! Wesolowski-style VDF over an RSA group.
//!
//! Evaluation computes `y = x^{2^τ} mod N` by τ sequential squarings. The
//! proof is the pair `(l, π)` with `l = H_prime(x + y)` and
//! `π = x^{⌊2^τ / l⌋}`; a verifier rebuilds `y = π^l · x^{2^τ mod l}` and
//! checks that it hashes back to `l`.

mod encoding;
mod prove;
mod verify;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::arith::group::square_chain;
use crate::arith::hash::check_k;
use crate::arith::{hash_to_int, GroupElement, RsaGroup};
use crate::error::{Error, Result};

pub use encoding::{decode_proof, encode_proof, proof_len};
pub use prove::{prove_direct, prove_long_division, prove_parallel, LongDivisionStats};
pub use verify::{verify, verify_with_window, Verification};

/// Default security parameter k.
pub const DEFAULT_K: u32 = 128;

/// Where the VDF input comes from: a message to hash, or a residue given
/// directly (toy groups, tests).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VdfInput {
    Message(Vec<u8>),
    Element(BigUint),
}

/// Maps the input to `x` with `2 ≤ x < N`.
///
/// Messages hash to 2k bits, so the group must have λ > 2k. A hash below 2
/// is re-drawn from `m ‖ counter` since x ∈ {0, 1} is a fixed point of
/// squaring.
pub fn derive_x(group: &RsaGroup, k: u32, input: &VdfInput) -> Result<GroupElement> {
    check_k(k)?;
    match input {
        VdfInput::Element(v) => {
            if *v < BigUint::from(2u32) {
                return Err(Error::Parameter("VDF input must be at least 2".into()));
            }
            group.element(v.clone())
        }
        VdfInput::Message(m) => {
            if group.lambda() <= u64::from(2 * k) {
                return Err(Error::Config(format!(
                    "{}-bit modulus cannot hold {}-bit hashes",
                    group.lambda(),
                    2 * k
                )));
            }
            let mut x = hash_to_int(m, k)?.value;
            let mut counter = 0u8;
            while x.to_u8().is_some_and(|v| v < 2) {
                let mut retry = m.clone();
                retry.push(counter);
                x = hash_to_int(&retry, k)?.value;
                counter = counter.wrapping_add(1);
            }
            group.element(x)
        }
    }
}

/// Input, difficulty and parameters for one evaluation.
#[derive(Clone, Debug)]
pub struct VdfChallenge {
    input: VdfInput,
    x: GroupElement,
    tau: u64,
    k: u32,
}

impl VdfChallenge {
    pub fn new(group: &RsaGroup, k: u32, input: VdfInput, tau: u64) -> Result<Self> {
        if tau == 0 {
            return Err(Error::Parameter("difficulty τ must be at least 1".into()));
        }
        let x = derive_x(group, k, &input)?;
        Ok(Self { input, x, tau, k })
    }

    pub fn from_message(group: &RsaGroup, k: u32, message: &[u8], tau: u64) -> Result<Self> {
        Self::new(group, k, VdfInput::Message(message.to_vec()), tau)
    }

    pub fn from_element(group: &RsaGroup, k: u32, x: BigUint, tau: u64) -> Result<Self> {
        Self::new(group, k, VdfInput::Element(x), tau)
    }

    pub fn input(&self) -> &VdfInput {
        &self.input
    }

    pub fn x(&self) -> &GroupElement {
        &self.x
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn group(&self) -> &RsaGroup {
        self.x.group()
    }
}

/// Output of [`evaluate`].
#[derive(Clone, Debug)]
pub struct EvalTranscript {
    pub output: GroupElement,
    /// `x^{2^{i·τ/s}}` for `i = 0..=s` when checkpointing was requested.
    pub checkpoints: Option<Vec<GroupElement>>,
    pub squarings: u64,
}

impl EvalTranscript {
    pub fn segments(&self) -> Option<u64> {
        self.checkpoints.as_ref().map(|c| c.len() as u64 - 1)
    }
}

/// Runs the squaring chain, optionally recording `s + 1` evenly spaced
/// checkpoints from the same chain. `s` must divide τ.
pub fn evaluate(ch: &VdfChallenge, segments: Option<u64>) -> Result<EvalTranscript> {
    let stride = match segments {
        None => None,
        Some(0) => return Err(Error::Parameter("checkpoint count must be positive".into())),
        Some(s) if ch.tau % s != 0 => {
            return Err(Error::Parameter(format!(
                "checkpoint count {s} does not divide τ = {}",
                ch.tau
            )))
        }
        Some(s) => Some(ch.tau / s),
    };
    let (output, snapshots, squarings) = square_chain(&ch.x, ch.tau, stride);
    Ok(EvalTranscript {
        output,
        checkpoints: stride.map(|_| snapshots),
        squarings,
    })
}

/// The proof pair `(l, π)` plus the difficulty it was produced for.
///
/// `tau` does not travel inside the encoded blob; on the wire it sits in the
/// transaction header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VdfProof {
    pub l: BigUint,
    pub pi: GroupElement,
    pub tau: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn toy(n: u32) -> RsaGroup {
        RsaGroup::from_modulus(BigUint::from(n)).unwrap()
    }

    #[test]
    fn evaluate_toy_examples() {
        let ch = VdfChallenge::from_element(&toy(35), 128, BigUint::from(2u32), 3).unwrap();
        let t = evaluate(&ch, None).unwrap();
        assert_eq!(t.output.value(), &BigUint::from(11u32));
        assert_eq!(t.squarings, 3);
        assert!(t.checkpoints.is_none());

        let ch = VdfChallenge::from_element(&toy(391), 128, BigUint::from(5u32), 4).unwrap();
        let t = evaluate(&ch, Some(2)).unwrap();
        assert_eq!(t.output.value(), &BigUint::from(256u32));
        let cps: Vec<_> = t.checkpoints.unwrap().iter().map(|c| c.value().clone()).collect();
        assert_eq!(cps, [5u32, 234, 256].map(BigUint::from));
        assert_eq!(t.squarings, 4);
    }

    #[test]
    fn single_squaring() {
        let ch = VdfChallenge::from_element(&toy(391), 128, BigUint::from(7u32), 1).unwrap();
        assert_eq!(evaluate(&ch, None).unwrap().output.value(), &BigUint::from(49u32));
    }

    #[test]
    fn checkpoint_count_must_divide_tau() {
        let ch = VdfChallenge::from_element(&toy(391), 128, BigUint::from(5u32), 6).unwrap();
        assert!(matches!(evaluate(&ch, Some(4)), Err(Error::Parameter(_))));
        assert!(matches!(evaluate(&ch, Some(0)), Err(Error::Parameter(_))));
        let t = evaluate(&ch, Some(3)).unwrap();
        assert_eq!(t.squarings, 6);
        assert_eq!(t.segments(), Some(3));
    }

    #[test]
    fn challenge_validation() {
        let g = toy(391);
        assert!(VdfChallenge::from_element(&g, 128, BigUint::from(5u32), 0).is_err());
        assert!(VdfChallenge::from_element(&g, 128, BigUint::one(), 3).is_err());
        assert!(VdfChallenge::from_element(&g, 128, BigUint::from(391u32), 3).is_err());
        // 9-bit modulus cannot take 256-bit hashes
        assert!(matches!(
            VdfChallenge::from_message(&g, 128, b"m", 3),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn message_input_is_hashed() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let g = RsaGroup::generate(512, &mut rng).unwrap();
        let ch = VdfChallenge::from_message(&g, 128, b"abc", 10).unwrap();
        assert_eq!(ch.x().value(), &hash_to_int(b"abc", 128).unwrap().value);
    }
}
