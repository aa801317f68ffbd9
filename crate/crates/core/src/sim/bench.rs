//! Timing harness: evaluation, proof and verification time over a τ grid,
//! the multiexp comparison, local calibration, and least-squares fits.
//!
//! Timing groups are random odd moduli of the requested size. Operation
//! costs depend only on operand length, so factoring hardness is irrelevant
//! here and skipping prime generation keeps large-λ runs fast.

use std::path::Path;

use num_bigint::{BigUint, RandBigInt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{sequential_square, RsaGroup};
use crate::error::{Error, Result};
use crate::multiexp::{bench_multiexp, write_multiexp_csv, MultiExpBenchPlan, MultiExpRow};
use crate::pow::{pow_verify, PowPuzzle};
use crate::stats::{mad, mean, median, time_once, time_reps, LinearFit};
use crate::vdf::{
    evaluate, prove_direct, prove_long_division, verify, VdfChallenge, VdfProof, DEFAULT_K,
};

/// Random odd modulus with exactly `bits` bits, for timing only.
pub fn timing_group(bits: u64, seed: u64) -> Result<RsaGroup> {
    if bits < 3 {
        return Err(Error::Parameter("timing modulus needs at least 3 bits".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = rng.gen_biguint(bits);
    n.set_bit(bits - 1, true);
    n.set_bit(0, true);
    RsaGroup::from_modulus(n)
}

/// Squarings per second on this machine, from one chain of `squarings`.
pub fn calibrate_squaring_rate(group: &RsaGroup, squarings: u64) -> f64 {
    let x = group
        .element(BigUint::from(3u32) % group.modulus())
        .expect("reduced");
    let (ns, _) = time_once(|| sequential_square(&x, squarings));
    squarings as f64 / (ns.max(1) as f64 / 1e9)
}

fn honest_proof(group: &RsaGroup, k: u32, message: &[u8], tau: u64) -> Result<(VdfChallenge, VdfProof)> {
    let ch = VdfChallenge::from_message(group, k, message, tau)?;
    let y = evaluate(&ch, None)?.output;
    let (proof, _) = prove_long_division(&ch, &y)?;
    Ok((ch, proof))
}

/// Median wall-clock verification time in nanoseconds.
pub fn measure_vdf_verify_ns(group: &RsaGroup, k: u32, reps: usize) -> Result<u64> {
    let (ch, proof) = honest_proof(group, k, b"calibrate", 1 << 10)?;
    let mut err = None;
    let (med, _) = time_reps(reps.max(1), || {
        if let Err(e) = verify(group, k, ch.input(), ch.tau(), &proof) {
            err = Some(e);
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(med.round() as u64),
    }
}

/// Median PoW verification time (one hash) in nanoseconds.
pub fn measure_pow_verify_ns(reps: usize) -> u64 {
    let puzzle = PowPuzzle::new(vec![0u8; 1600], 20).expect("difficulty in range");
    let mut nonce = 0u64;
    let (med, _) = time_reps(reps.max(1), || {
        nonce += 1;
        pow_verify(&puzzle, nonce)
    });
    med.round().max(1.0) as u64
}

#[derive(Clone, Debug)]
pub struct BenchPlan {
    pub lambdas: Vec<u64>,
    /// τ = 2^e for each exponent.
    pub tau_exponents: Vec<u32>,
    pub k: u32,
    pub eval_reps: usize,
    /// Distinct proofs timed per τ, so prime-size variation averages out.
    pub verify_proofs: usize,
    pub verify_reps: usize,
    pub proof_reps: usize,
    /// Multiexp comparison; `None` skips it.
    pub multiexp: Option<MultiExpBenchPlan>,
    pub seed: u64,
}

impl Default for BenchPlan {
    fn default() -> Self {
        Self {
            lambdas: vec![1024, 2048, 3072],
            tau_exponents: (10..=16).collect(),
            k: DEFAULT_K,
            eval_reps: 5,
            verify_proofs: 4,
            verify_reps: 30,
            proof_reps: 3,
            multiexp: Some(MultiExpBenchPlan::default()),
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalRow {
    pub lambda: u64,
    pub tau: u64,
    pub median_ns: f64,
    pub mad_ns: f64,
    pub reps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyRow {
    pub lambda: u64,
    pub tau: u64,
    pub median_ns: f64,
    pub mad_ns: f64,
    /// Mean λ-bit multiplications over the timed proofs.
    pub lambda_mults: f64,
    pub reps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProofRow {
    pub lambda: u64,
    pub tau: u64,
    pub method: String,
    pub median_ns: f64,
    pub mad_ns: f64,
    /// Group operations for the long-division path; empty for direct.
    pub group_ops: Option<u64>,
}

/// Per-λ fit summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitRow {
    pub lambda: u64,
    pub eval_r_squared: f64,
    pub eval_ns_per_squaring: f64,
    pub verify_slope_ns_per_tau: f64,
    pub verify_mean_ns: f64,
    /// `|slope| · τ_max / mean`; below 0.1 counts as flat.
    pub verify_relative_drift: f64,
    pub eval_linear: bool,
    pub verify_flat: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BenchReport {
    pub eval: Vec<EvalRow>,
    pub verify: Vec<VerifyRow>,
    pub proof: Vec<ProofRow>,
    pub multiexp: Vec<MultiExpRow>,
    pub fits: Vec<FitRow>,
}

/// Evaluation time per τ.
pub fn bench_eval(group: &RsaGroup, taus: &[u64], reps: usize) -> Vec<EvalRow> {
    let x = group
        .element(BigUint::from(3u32) % group.modulus())
        .expect("reduced");
    taus.iter()
        .map(|&tau| {
            let samples: Vec<f64> = (0..reps.max(1))
                .map(|_| time_once(|| sequential_square(&x, tau)).0 as f64)
                .collect();
            EvalRow {
                lambda: group.lambda(),
                tau,
                median_ns: median(&samples),
                mad_ns: mad(&samples),
                reps: samples.len(),
            }
        })
        .collect()
}

/// Verification time per τ over `proofs` distinct honest proofs, each
/// verified `reps` times. Taus are visited round-robin per repetition so
/// slow drift in machine speed is spread evenly.
pub fn bench_verify(
    group: &RsaGroup,
    k: u32,
    taus: &[u64],
    proofs: usize,
    reps: usize,
) -> Result<Vec<VerifyRow>> {
    let mut cases = Vec::new();
    for &tau in taus {
        let mut set = Vec::new();
        for i in 0..proofs.max(1) {
            let msg = format!("bench-{tau}-{i}");
            set.push(honest_proof(group, k, msg.as_bytes(), tau)?);
        }
        cases.push(set);
    }
    let mut samples = vec![Vec::new(); taus.len()];
    let mut mults = vec![Vec::new(); taus.len()];
    for _ in 0..reps.max(1) {
        for (t, set) in cases.iter().enumerate() {
            for (ch, proof) in set {
                let (ns, v) = time_once(|| verify(group, k, ch.input(), ch.tau(), proof));
                let v = v?;
                if !v.accepted {
                    return Err(Error::Integrity("honest proof rejected".into()));
                }
                samples[t].push(ns as f64);
                mults[t].push(v.lambda_mults() as f64);
            }
        }
    }
    Ok(taus
        .iter()
        .enumerate()
        .map(|(t, &tau)| VerifyRow {
            lambda: group.lambda(),
            tau,
            median_ns: median(&samples[t]),
            mad_ns: mad(&samples[t]),
            lambda_mults: mean(&mults[t]),
            reps: samples[t].len(),
        })
        .collect())
}

/// Proof time for the direct and long-division provers.
pub fn bench_proof(group: &RsaGroup, k: u32, taus: &[u64], reps: usize) -> Result<Vec<ProofRow>> {
    let mut rows = Vec::new();
    for &tau in taus {
        let ch = VdfChallenge::from_message(group, k, format!("proof-{tau}").as_bytes(), tau)?;
        let y = evaluate(&ch, None)?.output;
        let mut direct = Vec::new();
        let mut ld = Vec::new();
        let mut ops = 0;
        for _ in 0..reps.max(1) {
            let (ns, p) = time_once(|| prove_direct(&ch, &y));
            p?;
            direct.push(ns as f64);
            let (ns, p) = time_once(|| prove_long_division(&ch, &y));
            ops = p?.1.group_ops();
            ld.push(ns as f64);
        }
        for (method, s, group_ops) in [("direct", direct, None), ("long_division", ld, Some(ops))] {
            rows.push(ProofRow {
                lambda: group.lambda(),
                tau,
                method: method.into(),
                median_ns: median(&s),
                mad_ns: mad(&s),
                group_ops,
            });
        }
    }
    Ok(rows)
}

/// Linear fit of evaluation time and flatness of verification time.
pub fn fit_rows(lambda: u64, eval: &[EvalRow], verify: &[VerifyRow]) -> Option<FitRow> {
    let ex: Vec<f64> = eval.iter().map(|r| r.tau as f64).collect();
    let ey: Vec<f64> = eval.iter().map(|r| r.median_ns).collect();
    let vx: Vec<f64> = verify.iter().map(|r| r.tau as f64).collect();
    let vy: Vec<f64> = verify.iter().map(|r| r.median_ns).collect();
    let e = LinearFit::fit(&ex, &ey)?;
    let v = LinearFit::fit(&vx, &vy)?;
    let tau_max = vx.iter().copied().fold(0.0, f64::max);
    let verify_mean_ns = mean(&vy);
    let drift = v.slope.abs() * tau_max / verify_mean_ns;
    Some(FitRow {
        lambda,
        eval_r_squared: e.r_squared,
        eval_ns_per_squaring: e.slope,
        verify_slope_ns_per_tau: v.slope,
        verify_mean_ns,
        verify_relative_drift: drift,
        eval_linear: e.r_squared >= 0.99,
        verify_flat: drift < 0.1,
    })
}

fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the whole plan and writes `eval_time.csv`, `verify_time.csv`,
/// `proof_time.csv`, `multiexp.csv` and `fit_report.json` into `out_dir`.
pub fn bench_all(out_dir: &Path, plan: &BenchPlan) -> Result<BenchReport> {
    std::fs::create_dir_all(out_dir)?;
    let taus: Vec<u64> = plan.tau_exponents.iter().map(|&e| 1u64 << e).collect();
    let mut report = BenchReport::default();
    for (i, &lambda) in plan.lambdas.iter().enumerate() {
        let group = timing_group(lambda, plan.seed + i as u64)?;
        log::info!("bench λ = {lambda}");
        let eval = bench_eval(&group, &taus, plan.eval_reps);
        let verify = bench_verify(&group, plan.k, &taus, plan.verify_proofs, plan.verify_reps)?;
        let proof = bench_proof(&group, plan.k, &taus, plan.proof_reps)?;
        if let Some(fit) = fit_rows(lambda, &eval, &verify) {
            report.fits.push(fit);
        }
        report.eval.extend(eval);
        report.verify.extend(verify);
        report.proof.extend(proof);
    }
    if let Some(mp) = &plan.multiexp {
        report.multiexp = bench_multiexp(mp)?;
    }
    write_csv(&report.eval, &out_dir.join("eval_time.csv"))?;
    write_csv(&report.verify, &out_dir.join("verify_time.csv"))?;
    write_csv(&report.proof, &out_dir.join("proof_time.csv"))?;
    write_multiexp_csv(&report.multiexp, &out_dir.join("multiexp.csv"))?;
    std::fs::write(
        out_dir.join("fit_report.json"),
        serde_json::to_string_pretty(&report.fits)?,
    )?;
    Ok(report)
}
