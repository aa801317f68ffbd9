//! Transaction wire format.
//!
//! ```text
//! version      1 B
//! issuer pk   32 B
//! prev_link   32 B
//! timestamp    8 B  big-endian unix seconds
//! tau          8 B  big-endian
//! payload len  4 B  big-endian
//! payload      payload len bytes
//! proof        (λ + 2k) / 8 bytes
//! signature   64 B  over every preceding byte
//! ```

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const VERSION: u8 = 1;
pub const SIGNATURE_LEN: usize = 64;
/// Bytes before the payload.
pub const HEADER_LEN: usize = 1 + 32 + 32 + 8 + 8 + 4;
/// Fixed bytes outside payload and proof.
pub const FIXED_OVERHEAD: usize = HEADER_LEN + SIGNATURE_LEN;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transaction {
    pub version: u8,
    pub issuer: [u8; 32],
    pub prev_link: [u8; 32],
    pub timestamp: u64,
    pub tau: u64,
    pub payload: Vec<u8>,
    pub proof: Vec<u8>,
    pub signature: [u8; 64],
}

/// Link used by a node's first transaction: the timestamp as 8 big-endian
/// bytes, left-padded with zeros to 32 bytes.
pub fn timestamp_link(timestamp: u64) -> [u8; 32] {
    let mut link = [0u8; 32];
    link[24..].copy_from_slice(&timestamp.to_be_bytes());
    link
}

impl Transaction {
    pub fn encoded_len(&self) -> usize {
        FIXED_OVERHEAD + self.payload.len() + self.proof.len()
    }

    /// Every byte covered by the signature.
    pub fn signed_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.push(self.version);
        out.extend_from_slice(&self.issuer);
        out.extend_from_slice(&self.prev_link);
        out.extend_from_slice(&self.timestamp.to_be_bytes());
        out.extend_from_slice(&self.tau.to_be_bytes());
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out.extend_from_slice(&self.proof);
        out
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.signed_bytes();
        out.extend_from_slice(&self.signature);
        out
    }

    /// SHA-256 of the full encoding; the next transaction's `prev_link`.
    pub fn hash(&self) -> [u8; 32] {
        Sha256::digest(self.to_bytes()).into()
    }

    /// Parses a transaction whose proof blob is `proof_len` bytes.
    pub fn decode(bytes: &[u8], proof_len: usize) -> Result<Self> {
        let malformed = |what: &str| Error::MalformedTransaction(what.to_string());
        if bytes.len() < FIXED_OVERHEAD + proof_len {
            return Err(malformed("truncated"));
        }
        let version = bytes[0];
        if version != VERSION {
            return Err(Error::MalformedTransaction(format!(
                "unknown version {version}"
            )));
        }
        let field = |from: usize, len: usize| &bytes[from..from + len];
        let issuer: [u8; 32] = field(1, 32).try_into().expect("32 bytes");
        let prev_link: [u8; 32] = field(33, 32).try_into().expect("32 bytes");
        let timestamp = u64::from_be_bytes(field(65, 8).try_into().expect("8 bytes"));
        let tau = u64::from_be_bytes(field(73, 8).try_into().expect("8 bytes"));
        let payload_len = u32::from_be_bytes(field(81, 4).try_into().expect("4 bytes")) as usize;
        if bytes.len() != FIXED_OVERHEAD + payload_len + proof_len {
            return Err(Error::MalformedTransaction(format!(
                "length {} does not match payload {payload_len} and proof {proof_len}",
                bytes.len()
            )));
        }
        let payload = field(HEADER_LEN, payload_len).to_vec();
        let proof = field(HEADER_LEN + payload_len, proof_len).to_vec();
        let signature: [u8; 64] = bytes[bytes.len() - SIGNATURE_LEN..]
            .try_into()
            .expect("64 bytes");
        Ok(Self {
            version,
            issuer,
            prev_link,
            timestamp,
            tau,
            payload,
            proof,
            signature,
        })
    }
}
