//! Primality testing and next-prime search.
//!
//! Integers below 2^16 are decided exactly by trial division. Larger
//! candidates go through 64 Miller–Rabin rounds whose bases are drawn from
//! a ChaCha20 stream keyed by the candidate itself, so the verdict is a pure
//! function of the input and prover and verifier always agree.

use std::sync::OnceLock;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use super::montgomery::{ModRing, Montgomery};

/// Inputs below this bound are decided by exact trial division.
pub const TRIAL_DIVISION_BOUND: u64 = 1 << 16;

/// Miller–Rabin rounds above [`TRIAL_DIVISION_BOUND`]; error below 4^-64.
pub const MILLER_RABIN_ROUNDS: usize = 64;

/// Small primes used to pre-sieve large candidates.
const SIEVE_LIMIT: u32 = 2048;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = SIEVE_LIMIT as usize;
        let mut composite = vec![false; limit];
        let mut primes = Vec::new();
        for i in 2..limit {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j < limit {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

fn is_prime_small(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Deterministic primality verdict under the configured test.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        if small < TRIAL_DIVISION_BOUND {
            return is_prime_small(small);
        }
    }
    if !n.bit(0) {
        return false;
    }
    for &p in small_primes() {
        if (n % p).is_zero() {
            return false;
        }
    }
    miller_rabin(n, MILLER_RABIN_ROUNDS)
}

/// Miller–Rabin with `rounds` bases derived from the candidate. `n` must be
/// odd and at least 5.
fn miller_rabin(n: &BigUint, rounds: usize) -> bool {
    let mont = Montgomery::new(n).expect("odd modulus");
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;

    let one = mont.one();
    let minus_one = mont.import(&n_minus_1);

    let mut seed_hasher = Sha256::new();
    seed_hasher.update(b"miller-rabin-bases");
    seed_hasher.update(n.to_bytes_be());
    let mut rng = ChaCha20Rng::from_seed(seed_hasher.finalize().into());
    let two = BigUint::from(2u32);

    'witness: for _ in 0..rounds {
        // base in [2, n-2]
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        let mut x = mont.pow(&mont.import(&a), &d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = mont.square(&x);
            if x == minus_one {
                continue 'witness;
            }
            if x == one {
                return false;
            }
        }
        return false;
    }
    true
}

/// Smallest `x ≥ n` that passes [`is_probable_prime`].
pub fn next_prime(n: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if *n <= two {
        return two;
    }
    let mut candidate = n.clone();
    if candidate.is_even() {
        candidate += 1u32;
    }

    while candidate.to_u64().is_some_and(|c| c < TRIAL_DIVISION_BOUND) {
        if is_probable_prime(&candidate) {
            return candidate;
        }
        candidate += 2u32;
    }

    // Incremental sieve: track candidate mod p for each small prime and
    // only run Miller–Rabin on survivors.
    let primes = small_primes();
    let mut residues: Vec<u32> = primes
        .iter()
        .map(|&p| (&candidate % p).to_u32().expect("residue below p"))
        .collect();
    let mut offset = 0u32;
    loop {
        let sieved = primes
            .iter()
            .zip(&residues)
            .any(|(&p, &r)| (r + offset) % p == 0);
        if !sieved {
            let c = &candidate + offset;
            if miller_rabin(&c, MILLER_RABIN_ROUNDS) {
                return c;
            }
        }
        offset += 2;
        if offset >= 1 << 20 {
            candidate += offset;
            for (r, &p) in residues.iter_mut().zip(primes) {
                *r = ((*r as u64 + offset as u64) % p as u64) as u32;
            }
            offset = 0;
        }
    }
}

/// Random prime of exactly `bits` bits with the top two bits set, so that
/// a product of two such primes has exactly `2·bits` bits.
pub fn random_prime<R: rand::Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 8, "prime too small");
    loop {
        let mut c = rng.gen_biguint(bits);
        c.set_bit(bits - 1, true);
        c.set_bit(bits - 2, true);
        let p = next_prime(&c);
        if p.bits() == bits {
            return p;
        }
    }
}

/// [`is_probable_prime`] for `u64` call sites.
pub fn is_prime_u64(n: u64) -> bool {
    is_probable_prime(&BigUint::from(n))
}
