//! Hashing byte strings to 2k-bit integers and to primes.

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use super::prime::next_prime;
use crate::error::{Error, Result};

/// Smallest supported security parameter k (bits).
pub const MIN_K: u32 = 48;
/// Largest supported security parameter k (bits).
pub const MAX_K: u32 = 256;

/// A hash value in `[0, 2^{2k})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashOutput {
    pub value: BigUint,
    pub k: u32,
}

pub fn check_k(k: u32) -> Result<()> {
    if !(MIN_K..=MAX_K).contains(&k) {
        return Err(Error::Config(format!(
            "security parameter k = {k} outside [{MIN_K}, {MAX_K}]"
        )));
    }
    Ok(())
}

/// Hashes `m` to a 2k-bit integer.
///
/// For 2k = 256 this is SHA-256 read big-endian. Otherwise the leading 2k
/// bits of `SHA-256(0x00‖m) ‖ SHA-256(0x01‖m)` are used.
pub fn hash_to_int(m: &[u8], k: u32) -> Result<HashOutput> {
    check_k(k)?;
    let out_bits = 2 * k;
    let value = if out_bits == 256 {
        BigUint::from_bytes_be(&Sha256::digest(m))
    } else {
        let mut wide = Vec::with_capacity(64);
        for prefix in [0u8, 1u8] {
            let mut h = Sha256::new();
            h.update([prefix]);
            h.update(m);
            wide.extend_from_slice(&h.finalize());
        }
        BigUint::from_bytes_be(&wide) >> (512 - out_bits)
    };
    Ok(HashOutput { value, k })
}

/// Minimal big-endian encoding; zero encodes as a single `0x00`.
pub fn be_bytes_minimal(v: &BigUint) -> Vec<u8> {
    // num-bigint already yields [0] for zero and no leading zero bytes otherwise
    v.to_bytes_be()
}

/// Fixed-width big-endian encoding, left-padded with zeros.
pub fn be_bytes_fixed(v: &BigUint, width: usize) -> Result<Vec<u8>> {
    let raw = v.to_bytes_be();
    let raw: &[u8] = if raw == [0] { &[] } else { &raw };
    if raw.len() > width {
        return Err(Error::Parameter(format!(
            "integer needs {} bytes, field holds {width}",
            raw.len()
        )));
    }
    let mut out = vec![0u8; width - raw.len()];
    out.extend_from_slice(raw);
    Ok(out)
}

/// `next_prime(H(BE(x + y)))`, the Fiat–Shamir prime binding input and output.
pub fn h_prime(x: &BigUint, y: &BigUint, k: u32) -> Result<BigUint> {
    let sum = x + y;
    let h = hash_to_int(&be_bytes_minimal(&sum), k)?;
    let l = next_prime(&h.value);
    if l.bits() > u64::from(2 * k) {
        return Err(Error::OverflowNegligible { bits: 2 * k });
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::prime::is_probable_prime;
    use num_traits::Num;

    fn hex(s: &str) -> BigUint {
        BigUint::from_str_radix(s, 16).unwrap()
    }

    // Expected digests computed with Python's hashlib.
    const SHA256_EMPTY: &str = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";
    const SHA256_ABC: &str = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";

    #[test]
    fn sha256_vectors() {
        assert_eq!(hash_to_int(b"", 128).unwrap().value, hex(SHA256_EMPTY));
        assert_eq!(hash_to_int(b"abc", 128).unwrap().value, hex(SHA256_ABC));
    }

    #[test]
    fn extended_rule_vectors() {
        // Leading bits of sha256(00||"abc") || sha256(01||"abc"), via hashlib.
        let wide = "609f6e36d2405585188d5cfd761f407c7cc46a7d3f314c88270469dde315fcd1\
                    1e18834c426d00e57788444cb3ccd62c771b420c095bb0c4e040a8c122c4570d";
        assert_eq!(hash_to_int(b"abc", 256).unwrap().value, hex(wide));
        assert_eq!(
            hash_to_int(b"abc", 96).unwrap().value,
            hex("609f6e36d2405585188d5cfd761f407c7cc46a7d3f314c88")
        );
        assert_eq!(
            hash_to_int(b"abc", 160).unwrap().value,
            hex("609f6e36d2405585188d5cfd761f407c7cc46a7d3f314c88270469dde315fcd11e18834c426d00e5")
        );
    }

    #[test]
    fn deterministic_and_bounded() {
        for k in [48, 64, 96, 128, 160, 192, 256] {
            let a = hash_to_int(b"message", k).unwrap();
            assert_eq!(a, hash_to_int(b"message", k).unwrap());
            assert!(a.value.bits() <= u64::from(2 * k));
        }
    }

    #[test]
    fn rejects_unsupported_k() {
        assert!(matches!(hash_to_int(b"", 47), Err(Error::Config(_))));
        assert!(matches!(hash_to_int(b"", 257), Err(Error::Config(_))));
    }

    #[test]
    fn minimal_encoding() {
        assert_eq!(be_bytes_minimal(&BigUint::from(0u32)), vec![0]);
        assert_eq!(be_bytes_minimal(&BigUint::from(261u32)), vec![1, 5]);
        assert_eq!(be_bytes_minimal(&BigUint::from(255u32)), vec![255]);
    }

    #[test]
    fn fixed_encoding() {
        assert_eq!(be_bytes_fixed(&BigUint::from(0u32), 3).unwrap(), vec![0, 0, 0]);
        assert_eq!(be_bytes_fixed(&BigUint::from(261u32), 3).unwrap(), vec![0, 1, 5]);
        assert!(be_bytes_fixed(&BigUint::from(1u32 << 24), 3).is_err());
    }

    #[test]
    fn h_prime_vectors() {
        // sympy.nextprime(sha256(b"\x00") - 1) and the same for BE(261) = 01 05.
        let zero = BigUint::from(0u32);
        assert_eq!(
            h_prime(&zero, &zero, 128).unwrap(),
            hex("6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa0dd")
        );
        assert_eq!(
            h_prime(&BigUint::from(5u32), &BigUint::from(256u32), 128).unwrap(),
            hex("bc5959f43bc6e47175374b6716e53c9a7d72c59424c821336995bad760d9af33")
        );
    }

    #[test]
    fn h_prime_commutes_and_is_prime() {
        let a = BigUint::from(123_456_789u64);
        let b = BigUint::from(987_654_321u64);
        let l = h_prime(&a, &b, 128).unwrap();
        assert_eq!(l, h_prime(&b, &a, 128).unwrap());
        assert!(is_probable_prime(&l));
    }
}
