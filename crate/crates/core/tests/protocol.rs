use std::sync::Barrier;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vdfgate::arith::{trapdoor_eval, RsaGroup};
use vdfgate::rate::{Admission, NodeIdentity, ProtocolConfig, RejectReason, Transaction, Verdict};
use vdfgate::vdf::{decode_proof, encode_proof, evaluate, proof_len, prove_long_division, verify, VdfChallenge};
use vdfgate::Error;

fn test_config(lambda: u64) -> ProtocolConfig {
    ProtocolConfig {
        lambda,
        tau_min: 64,
        tau_max: 1 << 20,
        squarings_per_sec: 1e4,
        test_mode: true,
        ..Default::default()
    }
}

fn group(seed: u64) -> RsaGroup {
    RsaGroup::generate(512, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

#[test]
fn blob_roundtrip_through_wire_encoding() {
    let g = group(1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let msg: [u8; 20] = rng.gen();
        let tau = rng.gen_range(1..2000);
        let ch = VdfChallenge::from_message(&g, 128, &msg, tau).unwrap();
        let y = evaluate(&ch, None).unwrap().output;
        assert_eq!(y, trapdoor_eval(ch.x(), tau).unwrap());
        let (proof, _) = prove_long_division(&ch, &y).unwrap();
        let blob = encode_proof(&proof, 512, 128).unwrap();
        assert_eq!(blob.len(), proof_len(512, 128));
        let back = decode_proof(&blob, &g, 128, tau).unwrap();
        assert_eq!(back, proof);
        assert!(verify(&g, 128, ch.input(), tau, &back).unwrap().accepted);
    }
}

#[test]
fn concurrent_issue_on_one_identity_is_refused() {
    let g = group(3);
    let node = NodeIdentity::from_secret([9; 32]);
    let barrier = Barrier::new(2);
    let results: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = (0..2)
            .map(|i| {
                let (g, node, barrier) = (&g, &node, &barrier);
                s.spawn(move || {
                    barrier.wait();
                    node.issue(g, 128, &[i], None, 400_000, 1_000)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let ok = results.iter().filter(|r| r.is_ok()).count();
    let refused = results
        .iter()
        .filter(|r| matches!(r, Err(Error::Sequencing)))
        .count();
    assert_eq!((ok, refused), (1, 1));

    // once the first call returns the identity is free again
    assert!(node.issue(&g, 128, b"after", None, 100, 1_000).is_ok());
}

#[test]
fn altering_a_chain_member_breaks_admission() {
    let g = group(4);
    let cfg = test_config(512);
    let node = NodeIdentity::from_secret([5; 32]);
    let admission = Admission::new(g.clone(), &cfg).unwrap();
    admission.set_reputation(node.public_key(), 1.0).unwrap();
    let tau = admission.required_tau(&node.public_key()).unwrap();

    let t1 = node.issue(&g, 128, b"one", None, tau, 500).unwrap();
    let t2 = node.issue(&g, 128, b"two", Some(&t1), tau, 501).unwrap();
    let t3 = node.issue(&g, 128, b"three", Some(&t2), tau, 502).unwrap();

    // a different t2 signed by the same node, so only the link is wrong for t3
    let forked = node.issue(&g, 128, b"two'", Some(&t1), tau, 501).unwrap();

    assert!(admission.admit(&t1.to_bytes(), 510).is_accept());
    assert!(admission.admit(&forked.to_bytes(), 510).is_accept());
    assert_eq!(
        admission.admit(&t3.to_bytes(), 510),
        Verdict::Reject(RejectReason::StaleLink)
    );
    assert_eq!(admission.last_link(&node.public_key()), Some(forked.hash()));
}

#[test]
fn tampered_payload_fails_signature_before_vdf() {
    let g = group(5);
    let cfg = test_config(512);
    let node = NodeIdentity::from_secret([6; 32]);
    let admission = Admission::new(g.clone(), &cfg).unwrap();
    admission.set_reputation(node.public_key(), 1.0).unwrap();
    let tau = admission.required_tau(&node.public_key()).unwrap();
    let tx = node.issue(&g, 128, b"payload", None, tau, 700).unwrap();

    let mut bytes = tx.to_bytes();
    let at = bytes.len() - 64 - proof_len(512, 128) - 1;
    bytes[at] ^= 1;
    assert_eq!(admission.admit(&bytes, 700), Verdict::Reject(RejectReason::BadSignature));
    assert_eq!(admission.counters().vdf_verifications, 0);

    let decoded = Transaction::decode(&tx.to_bytes(), proof_len(512, 128)).unwrap();
    assert_eq!(decoded, tx);
    assert!(admission.admit(&tx.to_bytes(), 700).is_accept());
}
