//! Issuing side: a node's signing key and its chain of transactions.

use std::sync::atomic::{AtomicBool, Ordering};

use ed25519_dalek::{Signer, SigningKey};

use super::reputation::NodeId;
use super::transaction::{timestamp_link, Transaction, VERSION};
use crate::arith::RsaGroup;
use crate::error::{Error, Result};
use crate::vdf::{encode_proof, evaluate, prove_long_division, VdfChallenge};

/// Proof blobs are sized for λ rounded up to whole bytes.
pub fn wire_lambda(group: &RsaGroup) -> u64 {
    group.lambda().div_ceil(8) * 8
}

/// A node able to sign and issue transactions.
///
/// Issuing is strictly sequential per identity: transaction n's VDF input is
/// the hash of transaction n−1, and a second `issue` call while one is
/// running fails with [`Error::Sequencing`].
#[derive(Debug)]
pub struct NodeIdentity {
    key: SigningKey,
    in_flight: AtomicBool,
}

struct InFlight<'a>(&'a AtomicBool);

impl Drop for InFlight<'_> {
    fn drop(&mut self) {
        self.0.store(false, Ordering::Release);
    }
}

impl NodeIdentity {
    pub fn from_secret(secret: [u8; 32]) -> Self {
        Self {
            key: SigningKey::from_bytes(&secret),
            in_flight: AtomicBool::new(false),
        }
    }

    pub fn generate<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_secret(rng.gen())
    }

    pub fn secret(&self) -> [u8; 32] {
        self.key.to_bytes()
    }

    pub fn public_key(&self) -> NodeId {
        self.key.verifying_key().to_bytes()
    }

    /// Builds, proves and signs the next transaction in this node's chain.
    ///
    /// `prev` is the node's previous transaction, or `None` for its first,
    /// in which case the link is the timestamp itself.
    pub fn issue(
        &self,
        group: &RsaGroup,
        k: u32,
        payload: &[u8],
        prev: Option<&Transaction>,
        tau: u64,
        timestamp: u64,
    ) -> Result<Transaction> {
        if self
            .in_flight
            .compare_exchange(false, true, Ordering::Acquire, Ordering::Relaxed)
            .is_err()
        {
            return Err(Error::Sequencing);
        }
        let _guard = InFlight(&self.in_flight);

        if payload.len() > u32::MAX as usize {
            return Err(Error::Parameter("payload too large".into()));
        }
        let prev_link = match prev {
            Some(tx) if tx.issuer != self.public_key() => {
                return Err(Error::Parameter(
                    "previous transaction was issued by another node".into(),
                ))
            }
            Some(tx) => tx.hash(),
            None => timestamp_link(timestamp),
        };

        let ch = VdfChallenge::from_message(group, k, &prev_link, tau)?;
        let y = evaluate(&ch, None)?.output;
        let (proof, _) = prove_long_division(&ch, &y)?;
        let proof = encode_proof(&proof, wire_lambda(group), k)?;

        let mut tx = Transaction {
            version: VERSION,
            issuer: self.public_key(),
            prev_link,
            timestamp,
            tau,
            payload: payload.to_vec(),
            proof,
            signature: [0; 64],
        };
        tx.signature = self.key.sign(&tx.signed_bytes()).to_bytes();
        Ok(tx)
    }

    #[cfg(test)]
    pub(crate) fn hold_in_flight(&self) -> impl Drop + '_ {
        self.in_flight.store(true, Ordering::Release);
        InFlight(&self.in_flight)
    }
}
