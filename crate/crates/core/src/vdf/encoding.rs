//! Fixed-width proof blob: `l` in 2k bits then `π` in λ bits, big-endian.

use num_bigint::BigUint;

use super::VdfProof;
use crate::arith::{be_bytes_fixed, RsaGroup};
use crate::error::{Error, Result};

/// Size in bytes of an encoded proof, `(λ + 2k) / 8`.
pub fn proof_len(lambda: u64, k: u32) -> usize {
    ((lambda + 2 * u64::from(k)) / 8) as usize
}

fn check_widths(lambda: u64, k: u32) -> Result<()> {
    if lambda % 8 != 0 || k % 8 != 0 {
        return Err(Error::Parameter(format!(
            "λ = {lambda} and k = {k} must be multiples of 8"
        )));
    }
    Ok(())
}

pub fn encode_proof(proof: &VdfProof, lambda: u64, k: u32) -> Result<Vec<u8>> {
    check_widths(lambda, k)?;
    if proof.pi.group().lambda() > lambda {
        return Err(Error::Parameter(format!(
            "{}-bit group does not fit a {lambda}-bit field",
            proof.pi.group().lambda()
        )));
    }
    let mut out = be_bytes_fixed(&proof.l, (2 * k / 8) as usize)?;
    out.extend(be_bytes_fixed(proof.pi.value(), (lambda / 8) as usize)?);
    debug_assert_eq!(out.len(), proof_len(lambda, k));
    Ok(out)
}

/// Parses a blob produced by [`encode_proof`] with λ taken from `group`.
/// The difficulty travels separately and is attached as `tau`.
pub fn decode_proof(bytes: &[u8], group: &RsaGroup, k: u32, tau: u64) -> Result<VdfProof> {
    let lambda = group.lambda().div_ceil(8) * 8;
    check_widths(lambda, k)?;
    let expected = proof_len(lambda, k);
    if bytes.len() != expected {
        return Err(Error::MalformedProof(format!(
            "expected {expected} bytes, got {}",
            bytes.len()
        )));
    }
    let (l_bytes, pi_bytes) = bytes.split_at((2 * k / 8) as usize);
    let l = BigUint::from_bytes_be(l_bytes);
    let pi = group
        .element(BigUint::from_bytes_be(pi_bytes))
        .map_err(|_| Error::MalformedProof("π is not reduced modulo N".into()))?;
    Ok(VdfProof { l, pi, tau })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    fn group() -> &'static RsaGroup {
        static G: OnceLock<RsaGroup> = OnceLock::new();
        G.get_or_init(|| RsaGroup::generate(256, &mut ChaCha8Rng::seed_from_u64(40)).unwrap())
    }

    #[test]
    fn sizes() {
        assert_eq!(proof_len(2048, 128), 288);
        assert_eq!(proof_len(1024, 128), 160);
        assert_eq!(proof_len(3072, 128), 416);
    }

    #[test]
    fn rejects_wrong_length_and_unreduced_pi() {
        let g = group();
        let blob = vec![0u8; proof_len(256, 64)];
        assert!(decode_proof(&blob, g, 64, 1).is_ok());
        assert!(matches!(
            decode_proof(&blob[1..], g, 64, 1),
            Err(Error::MalformedProof(_))
        ));
        let mut high = blob.clone();
        for b in &mut high[16..] {
            *b = 0xff;
        }
        assert!(matches!(decode_proof(&high, g, 64, 1), Err(Error::MalformedProof(_))));
    }

    #[test]
    fn rejects_unaligned_parameters() {
        let g = group();
        let proof = VdfProof {
            l: BigUint::from(7u32),
            pi: g.identity(),
            tau: 1,
        };
        assert!(encode_proof(&proof, 256, 60).is_err());
        assert!(encode_proof(&proof, 250, 64).is_err());
        assert!(encode_proof(&proof, 128, 64).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(l_bytes in proptest::collection::vec(any::<u8>(), 16), seed in any::<u64>()) {
            let g = group();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let proof = VdfProof {
                l: BigUint::from_bytes_be(&l_bytes),
                pi: g.random_element(&mut rng),
                tau: seed,
            };
            let blob = encode_proof(&proof, 256, 64).unwrap();
            prop_assert_eq!(blob.len(), 48);
            prop_assert_eq!(decode_proof(&blob, g, 64, seed).unwrap(), proof);
        }
    }
}
