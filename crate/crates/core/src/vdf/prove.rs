use std::thread;

use num_bigint::BigUint;
use num_traits::One;

use super::verify::verify_element;
use super::{EvalTranscript, VdfChallenge, VdfProof};
use crate::arith::{h_prime, mod_exp, GroupElement, ModRing};
use crate::error::{Error, Result};
use crate::multiexp::DEFAULT_WINDOW;

/// Group-operation tally of a long-division proof.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LongDivisionStats {
    pub squarings: u64,
    pub multiplications: u64,
}

impl LongDivisionStats {
    pub fn group_ops(&self) -> u64 {
        self.squarings + self.multiplications
    }
}

/// `x^{⌊2^τ/l⌋}` with the quotient materialized as a τ-bit integer.
pub(crate) fn quotient_power_direct(x: &GroupElement, tau: u64, l: &BigUint) -> GroupElement {
    let q = (BigUint::one() << tau) / l;
    mod_exp(x, &q)
}

/// `x^{⌊2^τ/l⌋}` by binary long division: one squaring per quotient bit and a
/// multiplication by x for every set bit. Memory stays O(λ).
pub(crate) fn quotient_power_long_division(
    x: &GroupElement,
    tau: u64,
    l: &BigUint,
) -> (GroupElement, LongDivisionStats) {
    long_division_segment(x, l, BigUint::one(), tau)
}

/// Runs `steps` long-division steps starting from remainder `r`, with
/// accumulator 1 and base `base`. Returns `base^{q}` where q collects the
/// quotient bits produced by those steps.
fn long_division_segment(
    base: &GroupElement,
    l: &BigUint,
    mut r: BigUint,
    steps: u64,
) -> (GroupElement, LongDivisionStats) {
    let group = base.group();
    let mont = group.montgomery();
    let base_m = mont.import(base.value());
    let mut acc = mont.one();
    let mut scratch = mont.scratch();
    let mut stats = LongDivisionStats::default();
    for _ in 0..steps {
        mont.square_assign(&mut acc.0, &mut scratch);
        stats.squarings += 1;
        r <<= 1u32;
        if r >= *l {
            r -= l;
            mont.mul_assign(&mut acc.0, &base_m.0, &mut scratch);
            stats.multiplications += 1;
        }
    }
    let value = mont.export(&acc);
    (group.element(value).expect("reduced"), stats)
}

/// Reference prover: explicit big-integer division of `2^τ` by `l`.
///
/// Memory grows linearly with τ; intended for τ up to about 2^20.
pub fn prove_direct(ch: &VdfChallenge, y: &GroupElement) -> Result<VdfProof> {
    let l = h_prime(ch.x().value(), y.value(), ch.k())?;
    let pi = quotient_power_direct(ch.x(), ch.tau(), &l);
    Ok(VdfProof {
        l,
        pi,
        tau: ch.tau(),
    })
}

/// Streaming prover in at most 2τ group operations.
pub fn prove_long_division(
    ch: &VdfChallenge,
    y: &GroupElement,
) -> Result<(VdfProof, LongDivisionStats)> {
    let l = h_prime(ch.x().value(), y.value(), ch.k())?;
    let (pi, stats) = quotient_power_long_division(ch.x(), ch.tau(), &l);
    Ok((
        VdfProof {
            l,
            pi,
            tau: ch.tau(),
        },
        stats,
    ))
}

/// Checkpointed prover. With s segments of length B = τ/s, segment j owns
/// quotient bits `jB+1 ..= (j+1)B` and contributes `c_{s-1-j}^{q_j}`, where
/// `c_i = x^{2^{iB}}` is checkpoint i and `q_j < 2^B` is the segment's block
/// of the quotient. The product over all segments is `x^{⌊2^τ/l⌋}`.
///
/// Segments run on separate threads with no shared mutable state. The
/// combined proof is checked against the public verifier; a corrupted
/// checkpoint surfaces as [`Error::Integrity`].
pub fn prove_parallel(ch: &VdfChallenge, transcript: &EvalTranscript) -> Result<VdfProof> {
    let checkpoints = transcript
        .checkpoints
        .as_ref()
        .ok_or_else(|| Error::Parameter("transcript has no checkpoints".into()))?;
    if checkpoints.len() < 2 {
        return Err(Error::Parameter("need at least two checkpoints".into()));
    }
    let segments = checkpoints.len() as u64 - 1;
    let tau = ch.tau();
    if tau % segments != 0 {
        return Err(Error::Parameter(format!(
            "{segments} segments do not divide τ = {tau}"
        )));
    }
    if &checkpoints[0] != ch.x() {
        return Err(Error::Integrity("first checkpoint is not the input".into()));
    }
    if checkpoints.last() != Some(&transcript.output) {
        return Err(Error::Integrity("last checkpoint is not the output".into()));
    }
    if checkpoints.iter().any(|c| c.group() != ch.group()) {
        return Err(Error::Integrity("checkpoint from another group".into()));
    }

    let block = tau / segments;
    let l = h_prime(ch.x().value(), transcript.output.value(), ch.k())?;
    let two = BigUint::from(2u32);

    let workers = thread::available_parallelism()
        .map(|n| n.get() as u64)
        .unwrap_or(1)
        .min(segments);
    let mut parts: Vec<Option<GroupElement>> = vec![None; segments as usize];
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let l = &l;
                let two = &two;
                scope.spawn(move || {
                    (w..segments)
                        .step_by(workers as usize)
                        .map(|j| {
                            let base = &checkpoints[(segments - 1 - j) as usize];
                            let r0 = two.modpow(&BigUint::from(j * block), l);
                            let (part, _) = long_division_segment(base, l, r0, block);
                            (j, part)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (j, part) in h.join().expect("proof worker panicked") {
                parts[j as usize] = Some(part);
            }
        }
    });

    let pi = parts
        .into_iter()
        .map(|p| p.expect("every segment computed"))
        .fold(ch.group().identity(), |acc, p| acc.mul(&p));
    let proof = VdfProof { l, pi, tau };

    let check = verify_element(ch.x(), ch.k(), tau, &proof, DEFAULT_WINDOW)?;
    if !check.accepted {
        return Err(Error::Integrity(
            "checkpoints are inconsistent with the squaring chain".into(),
        ));
    }
    Ok(proof)
}
