//! Hashcash proof of work: find a nonce whose SHA-256 digest starts with `d`
//! zero bits. This is the embarrassingly parallel baseline the VDF is
//! compared against.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::thread;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MAX_DIFFICULTY: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowPuzzle {
    message: Vec<u8>,
    difficulty: u32,
}

impl PowPuzzle {
    pub fn new(message: impl Into<Vec<u8>>, difficulty: u32) -> Result<Self> {
        if difficulty > MAX_DIFFICULTY {
            return Err(Error::Parameter(format!(
                "PoW difficulty {difficulty} exceeds {MAX_DIFFICULTY}"
            )));
        }
        Ok(Self {
            message: message.into(),
            difficulty,
        })
    }

    pub fn message(&self) -> &[u8] {
        &self.message
    }

    pub fn difficulty(&self) -> u32 {
        self.difficulty
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowSolution {
    pub nonce: u64,
    /// `nonce − start + 1`, the candidates a sequential search would try.
    pub attempts: u64,
}

/// Leading zero bits of `SHA-256(message ‖ BE64(nonce))`.
pub fn leading_zero_bits(message: &[u8], nonce: u64) -> u32 {
    let digest = Sha256::new()
        .chain_update(message)
        .chain_update(nonce.to_be_bytes())
        .finalize();
    let mut zeros = 0;
    for byte in digest {
        zeros += byte.leading_zeros();
        if byte != 0 {
            break;
        }
    }
    zeros
}

/// One hash, whatever the difficulty.
pub fn pow_verify(p: &PowPuzzle, nonce: u64) -> bool {
    p.difficulty == 0 || leading_zero_bits(&p.message, nonce) >= p.difficulty
}

/// Smallest valid nonce `≥ start`, searched sequentially.
pub fn pow_solve(p: &PowPuzzle, start: u64) -> Result<PowSolution> {
    let mut nonce = start;
    loop {
        if pow_verify(p, nonce) {
            return Ok(PowSolution {
                nonce,
                attempts: nonce - start + 1,
            });
        }
        nonce = nonce.checked_add(1).ok_or(Error::NonceExhausted)?;
    }
}

/// Same answer as [`pow_solve`], with the nonce space split across
/// `workers` threads by residue class. Worker `i` tries `start + i`,
/// `start + i + workers`, and so on. A shared bound lets workers stop once
/// a smaller valid nonce is known, so the returned nonce is the global
/// minimum regardless of scheduling.
pub fn pow_solve_partitioned(p: &PowPuzzle, start: u64, workers: u64) -> Result<PowSolution> {
    if workers == 0 {
        return Err(Error::Parameter("need at least one worker".into()));
    }
    let best = AtomicU64::new(u64::MAX);
    let found = AtomicBool::new(false);
    thread::scope(|scope| {
        for w in 0..workers {
            let best = &best;
            let found = &found;
            scope.spawn(move || {
                let Some(mut nonce) = start.checked_add(w) else {
                    return;
                };
                while nonce < best.load(Ordering::Relaxed) {
                    if pow_verify(p, nonce) {
                        best.fetch_min(nonce, Ordering::Relaxed);
                        found.store(true, Ordering::Relaxed);
                        return;
                    }
                    match nonce.checked_add(workers) {
                        Some(n) => nonce = n,
                        None => return,
                    }
                }
            });
        }
    });
    if !found.load(Ordering::Relaxed) {
        return Err(Error::NonceExhausted);
    }
    let nonce = best.load(Ordering::Relaxed);
    Ok(PowSolution {
        nonce,
        attempts: nonce - start + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_difficulty_accepts_start() {
        let p = PowPuzzle::new(b"x".to_vec(), 0).unwrap();
        assert_eq!(pow_solve(&p, 42).unwrap(), PowSolution { nonce: 42, attempts: 1 });
        assert!(pow_verify(&p, 7));
        assert!(PowPuzzle::new(b"x".to_vec(), 65).is_err());
    }

    #[test]
    fn known_digest_prefix() {
        // hashlib.sha256(b"" + (0).to_bytes(8, "big")).hexdigest() starts "af5570f5"
        assert_eq!(leading_zero_bits(b"", 0), 0);
        // hashlib.sha256(b"abc" + (17).to_bytes(8, "big")).hexdigest() starts "00efe217"
        assert_eq!(leading_zero_bits(b"abc", 17), 8);
    }

    #[test]
    fn solve_returns_minimum_and_verifies() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for _ in 0..50 {
            let msg: [u8; 16] = rng.gen();
            let p = PowPuzzle::new(msg.to_vec(), 6).unwrap();
            let s = pow_solve(&p, 0).unwrap();
            assert!(pow_verify(&p, s.nonce));
            assert!((0..s.nonce).all(|n| !pow_verify(&p, n)));
            assert_eq!(s.attempts, s.nonce + 1);
        }
    }

    #[test]
    fn partitioned_matches_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..30 {
            let msg: [u8; 16] = rng.gen();
            let p = PowPuzzle::new(msg.to_vec(), 8).unwrap();
            let start = rng.gen_range(0..1000);
            let seq = pow_solve(&p, start).unwrap();
            for workers in [1, 2, 4, 7] {
                assert_eq!(pow_solve_partitioned(&p, start, workers).unwrap(), seq);
            }
        }
    }

    #[test]
    fn exhaustion_at_top_of_nonce_space() {
        let p = PowPuzzle::new(b"edge".to_vec(), 64).unwrap();
        assert!(matches!(pow_solve(&p, u64::MAX), Err(Error::NonceExhausted)));
        assert!(matches!(
            pow_solve_partitioned(&p, u64::MAX - 2, 4),
            Err(Error::NonceExhausted)
        ));
    }
}
