//! Verifier side: decide whether to forward or drop a transaction.
//!
//! Checks run in a fixed order and the first failure is reported:
//! structural decode, signature, difficulty, chain link, then the VDF.
//! Nothing here ever evaluates the VDF; admission costs one signature check
//! and at most one proof verification per transaction.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, RwLock};

use ed25519_dalek::{Signature, VerifyingKey};
use serde::Serialize;

use super::config::ProtocolConfig;
use super::identity::wire_lambda;
use super::reputation::{difficulty_for, CalibrationCurve, NodeId, ReputationMap, TauBounds};
use super::transaction::{timestamp_link, Transaction};
use crate::arith::RsaGroup;
use crate::error::{Error, Result};
use crate::vdf::{decode_proof, proof_len, verify_with_window, VdfInput};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectReason {
    Malformed { detail: String },
    BadSignature,
    NotPermitted,
    InsufficientDifficulty { declared: u64, required: u64 },
    StaleLink,
    ClockSkew { timestamp: u64, now: u64 },
    InvalidProof,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Accept {
        #[serde(with = "hex_bytes")]
        hash: [u8; 32],
    },
    Reject(RejectReason),
}

mod hex_bytes {
    pub fn serialize<S: serde::Serializer>(v: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept { .. })
    }
}

/// Work counters, for checking that admission never squares.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AdmissionCounters {
    pub received: u64,
    pub signature_checks: u64,
    pub vdf_verifications: u64,
    pub accepted: u64,
}

/// Stateful admission filter. Holds, per issuer, the hash of the last
/// accepted transaction.
#[derive(Debug)]
pub struct Admission {
    group: RsaGroup,
    k: u32,
    window: u32,
    proof_len: usize,
    bounds: TauBounds,
    clock_skew: u64,
    cal: CalibrationCurve,
    reputation: RwLock<ReputationMap>,
    links: Mutex<HashMap<NodeId, [u8; 32]>>,
    received: AtomicU64,
    signature_checks: AtomicU64,
    vdf_verifications: AtomicU64,
    accepted: AtomicU64,
}

impl Admission {
    pub fn new(group: RsaGroup, cfg: &ProtocolConfig) -> Result<Self> {
        cfg.validate()?;
        let lambda = wire_lambda(&group);
        if lambda != cfg.lambda {
            return Err(Error::Config(format!(
                "group has {} bits but the configuration says λ = {}",
                group.lambda(),
                cfg.lambda
            )));
        }
        Ok(Self {
            group,
            k: cfg.k,
            window: cfg.window,
            proof_len: proof_len(lambda, cfg.k),
            bounds: cfg.bounds()?,
            clock_skew: cfg.clock_skew_secs,
            cal: cfg.calibration()?,
            reputation: RwLock::new(cfg.reputation_map()?),
            links: Mutex::new(HashMap::new()),
            received: AtomicU64::new(0),
            signature_checks: AtomicU64::new(0),
            vdf_verifications: AtomicU64::new(0),
            accepted: AtomicU64::new(0),
        })
    }

    pub fn set_reputation(&self, node: NodeId, mass: f64) -> Result<()> {
        self.reputation.write().expect("reputation lock").set(node, mass)
    }

    /// τ the verifier demands from `node`.
    pub fn required_tau(&self, node: &NodeId) -> Result<u64> {
        let rep = self.reputation.read().expect("reputation lock");
        difficulty_for(node, &rep, &self.cal, &self.bounds)
    }

    pub fn last_link(&self, node: &NodeId) -> Option<[u8; 32]> {
        self.links.lock().expect("link lock").get(node).copied()
    }

    pub fn counters(&self) -> AdmissionCounters {
        AdmissionCounters {
            received: self.received.load(Ordering::Relaxed),
            signature_checks: self.signature_checks.load(Ordering::Relaxed),
            vdf_verifications: self.vdf_verifications.load(Ordering::Relaxed),
            accepted: self.accepted.load(Ordering::Relaxed),
        }
    }

    /// Runs the admission checks on raw bytes with verifier clock `now`
    /// (unix seconds). Accepting updates the issuer's link record.
    pub fn admit(&self, bytes: &[u8], now: u64) -> Verdict {
        self.received.fetch_add(1, Ordering::Relaxed);
        match self.check(bytes, now) {
            Ok(hash) => {
                self.accepted.fetch_add(1, Ordering::Relaxed);
                Verdict::Accept { hash }
            }
            Err(reason) => Verdict::Reject(reason),
        }
    }

    fn check(&self, bytes: &[u8], now: u64) -> std::result::Result<[u8; 32], RejectReason> {
        let malformed = |e: Error| RejectReason::Malformed {
            detail: e.to_string(),
        };

        // 1. structure
        let tx = Transaction::decode(bytes, self.proof_len).map_err(malformed)?;
        if tx.tau == 0 {
            return Err(RejectReason::Malformed {
                detail: "τ must be at least 1".into(),
            });
        }
        let proof = decode_proof(&tx.proof, &self.group, self.k, tx.tau).map_err(malformed)?;

        // 2. signature
        self.signature_checks.fetch_add(1, Ordering::Relaxed);
        let key = VerifyingKey::from_bytes(&tx.issuer).map_err(|_| RejectReason::BadSignature)?;
        key.verify_strict(&tx.signed_bytes(), &Signature::from_bytes(&tx.signature))
            .map_err(|_| RejectReason::BadSignature)?;

        // 3. difficulty
        let required = self
            .required_tau(&tx.issuer)
            .map_err(|_| RejectReason::NotPermitted)?;
        if tx.tau < required {
            return Err(RejectReason::InsufficientDifficulty {
                declared: tx.tau,
                required,
            });
        }

        // 4. chain link
        let expected = self.last_link(&tx.issuer);
        match expected {
            Some(link) if link != tx.prev_link => return Err(RejectReason::StaleLink),
            Some(_) => {}
            None => {
                if tx.prev_link != timestamp_link(tx.timestamp) {
                    return Err(RejectReason::StaleLink);
                }
                if tx.timestamp.abs_diff(now) > self.clock_skew {
                    return Err(RejectReason::ClockSkew {
                        timestamp: tx.timestamp,
                        now,
                    });
                }
            }
        }

        // 5. VDF
        self.vdf_verifications.fetch_add(1, Ordering::Relaxed);
        let input = VdfInput::Message(tx.prev_link.to_vec());
        let verdict = verify_with_window(&self.group, self.k, &input, tx.tau, &proof, self.window)
            .map_err(malformed)?;
        if !verdict.accepted {
            return Err(RejectReason::InvalidProof);
        }

        // Commit only if no other admission for this issuer won the race.
        let hash = tx.hash();
        let mut links = self.links.lock().expect("link lock");
        if links.get(&tx.issuer).copied() != expected {
            return Err(RejectReason::StaleLink);
        }
        links.insert(tx.issuer, hash);
        Ok(hash)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::identity::NodeIdentity;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(seed: u64) -> (RsaGroup, NodeIdentity, Admission) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = RsaGroup::generate(512, &mut rng).unwrap();
        let node = NodeIdentity::generate(&mut rng);
        let cfg = ProtocolConfig {
            lambda: 512,
            k: 128,
            alpha: 1.0,
            tau_min: 16,
            tau_max: 1 << 20,
            squarings_per_sec: 200.0,
            test_mode: true,
            reputation: [(hex::encode(node.public_key()), 2.0)].into(),
            ..Default::default()
        };
        let adm = Admission::new(g.clone(), &cfg).unwrap();
        (g, node, adm)
    }

    #[test]
    fn honest_chain_is_accepted() {
        let (g, node, adm) = setup(80);
        assert_eq!(adm.required_tau(&node.public_key()).unwrap(), 100);
        let t1 = node.issue(&g, 128, b"a", None, 100, 500).unwrap();
        let t2 = node.issue(&g, 128, b"b", Some(&t1), 120, 501).unwrap();
        assert!(adm.admit(&t1.to_bytes(), 510).is_accept());
        assert_eq!(adm.last_link(&node.public_key()), Some(t1.hash()));
        assert!(adm.admit(&t2.to_bytes(), 9_999).is_accept());
        let c = adm.counters();
        assert_eq!((c.signature_checks, c.vdf_verifications, c.accepted), (2, 2, 2));
    }

    #[test]
    fn replay_is_stale() {
        let (g, node, adm) = setup(81);
        let t1 = node.issue(&g, 128, b"a", None, 100, 500).unwrap();
        assert!(adm.admit(&t1.to_bytes(), 500).is_accept());
        assert_eq!(
            adm.admit(&t1.to_bytes(), 500),
            Verdict::Reject(RejectReason::StaleLink)
        );
    }

    #[test]
    fn rejection_reasons_in_order() {
        let (g, node, adm) = setup(82);
        let low = node.issue(&g, 128, b"a", None, 99, 500).unwrap();
        assert!(matches!(
            adm.admit(&low.to_bytes(), 500),
            Verdict::Reject(RejectReason::InsufficientDifficulty {
                declared: 99,
                required: 100
            })
        ));

        let tx = node.issue(&g, 128, b"a", None, 100, 500).unwrap();
        let mut bytes = tx.to_bytes();
        bytes[86] ^= 1; // first byte of the proof blob, covered by the signature
        assert_eq!(
            adm.admit(&bytes, 500),
            Verdict::Reject(RejectReason::BadSignature)
        );
        assert!(matches!(
            adm.admit(&bytes[1..], 500),
            Verdict::Reject(RejectReason::Malformed { .. })
        ));
        assert!(matches!(
            adm.admit(&tx.to_bytes(), 500 + 301),
            Verdict::Reject(RejectReason::ClockSkew { .. })
        ));

        let stranger = NodeIdentity::from_secret([9; 32]);
        let tx = stranger.issue(&g, 128, b"a", None, 100, 500).unwrap();
        assert_eq!(
            adm.admit(&tx.to_bytes(), 500),
            Verdict::Reject(RejectReason::NotPermitted)
        );
        assert_eq!(adm.counters().vdf_verifications, 0);
    }

    #[test]
    fn forged_proof_is_invalid() {
        let (g, node, adm) = setup(83);
        let honest = node.issue(&g, 128, b"a", None, 100, 500).unwrap();
        // re-sign a transaction whose proof belongs to a different τ
        let other = node.issue(&g, 128, b"a", None, 101, 500).unwrap();
        let mut forged = honest.clone();
        forged.proof = other.proof.clone();
        let key = ed25519_dalek::SigningKey::from_bytes(&node.secret());
        use ed25519_dalek::Signer;
        forged.signature = key.sign(&forged.signed_bytes()).to_bytes();
        assert_eq!(
            adm.admit(&forged.to_bytes(), 500),
            Verdict::Reject(RejectReason::InvalidProof)
        );
        assert!(adm.admit(&honest.to_bytes(), 500).is_accept());
    }

    #[test]
    fn config_lambda_must_match_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(84);
        let g = RsaGroup::generate(512, &mut rng).unwrap();
        let cfg = ProtocolConfig {
            lambda: 1024,
            ..Default::default()
        };
        assert!(Admission::new(g, &cfg).is_err());
    }
}
