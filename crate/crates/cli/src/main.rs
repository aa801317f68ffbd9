use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use vdfgate::arith::{validate_production_lambda, GroupFile, RsaGroup};
use vdfgate::multiexp::MultiExpBenchPlan;
use vdfgate::pow::{pow_solve, pow_solve_partitioned, pow_verify, PowPuzzle};
use vdfgate::rate::{difficulty_for, wire_lambda, Admission, NodeIdentity, ProtocolConfig, Transaction};
use vdfgate::sim::bench::{calibrate_squaring_rate, measure_pow_verify_ns, measure_vdf_verify_ns, timing_group};
use vdfgate::sim::{bench_all, run_gossip_sim, spam_potential, speedup_report, BenchPlan, Function, ScenarioConfig};
use vdfgate::vdf::{
    decode_proof, encode_proof, evaluate, prove_direct, prove_long_division, prove_parallel,
    verify_with_window, VdfChallenge, VdfInput,
};
use vdfgate::Error;

/// VDF-based rate control toolkit.
#[derive(Parser)]
#[command(name = "vdfgate", version)]
struct Cli {
    /// JSON configuration with optional "protocol" and "scenario" sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an RSA test modulus.
    Setup(SetupArgs),
    /// Evaluate y = x^(2^τ) mod N.
    Eval(ChallengeArgs),
    /// Evaluate and produce a proof blob.
    Prove(ProveArgs),
    /// Check a proof blob.
    Verify(VerifyArgs),
    /// Hashcash proof of work.
    #[command(subcommand)]
    Pow(PowCommand),
    /// Build, prove and sign the next transaction of a node.
    Issue(IssueArgs),
    /// Run transactions through the admission filter, in order.
    Admit(AdmitArgs),
    /// Spam potential per device and function.
    SpamTable,
    /// Speedup over the weakest device, optionally pooled.
    Speedup(SpeedupArgs),
    /// Discrete-event gossip simulation.
    Simulate(SimulateArgs),
    /// Timing benchmarks written as CSV.
    Bench(BenchArgs),
    /// Measure this machine's squaring rate and verification costs.
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct SetupArgs {
    /// Modulus bit length; defaults to the configured λ.
    #[arg(long)]
    bits: Option<u64>,
    /// Keep the factorization in the output file (test oracles only).
    #[arg(long)]
    trapdoor: bool,
    /// Allow moduli outside the production sizes.
    #[arg(long)]
    test_mode: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InputArgs {
    /// UTF-8 message hashed to x.
    #[arg(long, group = "input")]
    message: Option<String>,
    /// Hex message hashed to x.
    #[arg(long, group = "input")]
    message_hex: Option<String>,
    /// Decimal residue used directly as x.
    #[arg(long, group = "input")]
    x: Option<String>,
}

impl InputArgs {
    fn input(&self) -> anyhow::Result<VdfInput> {
        if let Some(m) = &self.message {
            return Ok(VdfInput::Message(m.as_bytes().to_vec()));
        }
        if let Some(h) = &self.message_hex {
            return Ok(VdfInput::Message(hex::decode(h).context("--message-hex")?));
        }
        if let Some(x) = &self.x {
            let v: BigUint = x.parse().map_err(|_| anyhow!("--x must be a decimal integer"))?;
            return Ok(VdfInput::Element(v));
        }
        bail!("one of --message, --message-hex or --x is required")
    }
}

#[derive(Args)]
struct ChallengeArgs {
    /// Group file written by `setup`.
    #[arg(long)]
    group: PathBuf,
    #[arg(long)]
    tau: u64,
    /// Security parameter; defaults to the configured k.
    #[arg(long)]
    k: Option<u32>,
    /// Record this many evenly spaced checkpoints.
    #[arg(long)]
    checkpoints: Option<u64>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProveMethod {
    LongDivision,
    Direct,
    Parallel,
}

#[derive(Args)]
struct ProveArgs {
    #[command(flatten)]
    challenge: ChallengeArgs,
    #[arg(long, value_enum, default_value = "long-division")]
    method: ProveMethod,
    /// Write the raw proof blob here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    group: PathBuf,
    #[arg(long)]
    tau: u64,
    #[arg(long)]
    k: Option<u32>,
    /// Proof blob as hex.
    #[arg(long, group = "blob", required = true)]
    proof: Option<String>,
    /// Proof blob as a raw file.
    #[arg(long, group = "blob")]
    proof_file: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Subcommand)]
enum PowCommand {
    Solve {
        #[arg(long)]
        message: String,
        #[arg(long)]
        difficulty: u32,
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long, default_value_t = 1)]
        workers: u64,
    },
    Verify {
        #[arg(long)]
        message: String,
        #[arg(long)]
        difficulty: u32,
        #[arg(long)]
        nonce: u64,
    },
}

#[derive(Args)]
struct IssueArgs {
    #[arg(long)]
    group: PathBuf,
    /// 32-byte Ed25519 secret key as hex.
    #[arg(long)]
    secret: String,
    #[arg(long, default_value = "")]
    payload: String,
    /// This node's previous transaction file.
    #[arg(long)]
    prev: Option<PathBuf>,
    /// Difficulty; defaults to what the configured reputation requires.
    #[arg(long)]
    tau: Option<u64>,
    /// Unix seconds; defaults to now.
    #[arg(long)]
    timestamp: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AdmitArgs {
    #[arg(long)]
    group: PathBuf,
    /// Transaction files, admitted in the given order.
    #[arg(long = "tx", required = true, num_args = 1..)]
    txs: Vec<PathBuf>,
    /// Verifier clock in unix seconds; defaults to now.
    #[arg(long)]
    now: Option<u64>,
}

#[derive(Args)]
struct SpeedupArgs {
    #[arg(long, default_value_t = 1)]
    pool: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimFunction {
    Pow,
    Vdf,
    Both,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "both")]
    function: SimFunction,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    out: PathBuf,
    /// Small grid for a fast smoke run.
    #[arg(long)]
    quick: bool,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Modulus size to measure at; defaults to the configured λ.
    #[arg(long)]
    bits: Option<u64>,
    #[arg(long, default_value_t = 200_000)]
    squarings: u64,
    #[arg(long, default_value_t = 30)]
    reps: usize,
    /// Store the measurements into this configuration file.
    #[arg(long)]
    write: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CliConfig {
    protocol: ProtocolConfig,
    scenario: ScenarioConfig,
}

fn load_config(path: Option<&Path>) -> anyhow::Result<CliConfig> {
    let Some(path) = path else {
        return Ok(CliConfig::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: CliConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    cfg.protocol.validate()?;
    cfg.scenario.validate()?;
    Ok(cfg)
}

fn load_group(path: &Path) -> anyhow::Result<RsaGroup> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: GroupFile = serde_json::from_str(&text)?;
    Ok(RsaGroup::from_file(&file)?)
}

fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Result of a command: a JSON document, its human rendering, and whether
/// the command's check passed.
struct Outcome {
    json: Value,
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Self {
        Self { json, text, ok: true }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Setup(a) => setup(&cfg, a),
        Command::Eval(a) => eval(&cfg, a),
        Command::Prove(a) => prove(&cfg, a),
        Command::Verify(a) => verify_cmd(&cfg, a),
        Command::Pow(c) => pow(c),
        Command::Issue(a) => issue(&cfg, a),
        Command::Admit(a) => admit(&cfg, a),
        Command::SpamTable => spam_table(&cfg),
        Command::Speedup(a) => speedup(&cfg, a),
        Command::Simulate(a) => simulate(&cfg, a),
        Command::Bench(a) => bench(a),
        Command::Calibrate(a) => calibrate(&cfg, a),
    }
}

fn setup(cfg: &CliConfig, a: &SetupArgs) -> anyhow::Result<Outcome> {
    let bits = a.bits.unwrap_or(cfg.protocol.lambda);
    if !(a.test_mode || cfg.protocol.test_mode) {
        validate_production_lambda(bits)?;
    }
    let mut rng = match a.seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    };
    let group = RsaGroup::generate(bits, &mut rng)?;
    let stored = if a.trapdoor { group.clone() } else { group.public() };
    fs::write(&a.out, serde_json::to_string_pretty(&stored.to_file())?)?;
    let modulus = group.modulus().to_str_radix(16);
    Ok(Outcome::ok(
        json!({ "bits": group.lambda(), "modulus": modulus, "trapdoor": a.trapdoor, "out": a.out }),
        format!("wrote {}-bit modulus to {}", group.lambda(), a.out.display()),
    ))
}

fn challenge(cfg: &CliConfig, a: &ChallengeArgs) -> anyhow::Result<VdfChallenge> {
    let group = load_group(&a.group)?;
    let k = a.k.unwrap_or(cfg.protocol.k);
    Ok(VdfChallenge::new(&group, k, a.input.input()?, a.tau)?)
}

fn eval(cfg: &CliConfig, a: &ChallengeArgs) -> anyhow::Result<Outcome> {
    let ch = challenge(cfg, a)?;
    let t = evaluate(&ch, a.checkpoints)?;
    let y = t.output.value().to_str_radix(16);
    let checkpoints: Option<Vec<String>> = t
        .checkpoints
        .as_ref()
        .map(|c| c.iter().map(|e| e.value().to_str_radix(16)).collect());
    Ok(Outcome::ok(
        json!({ "x": ch.x().value().to_str_radix(16), "y": y, "tau": ch.tau(),
                "squarings": t.squarings, "checkpoints": checkpoints }),
        format!("y = 0x{y}"),
    ))
}

fn prove(cfg: &CliConfig, a: &ProveArgs) -> anyhow::Result<Outcome> {
    let ch = challenge(cfg, &a.challenge)?;
    let segments = match a.method {
        ProveMethod::Parallel => Some(a.challenge.checkpoints.unwrap_or(2)),
        _ => None,
    };
    let t = evaluate(&ch, segments)?;
    let (proof, group_ops) = match a.method {
        ProveMethod::LongDivision => {
            let (p, s) = prove_long_division(&ch, &t.output)?;
            (p, Some(s.group_ops()))
        }
        ProveMethod::Direct => (prove_direct(&ch, &t.output)?, None),
        ProveMethod::Parallel => (prove_parallel(&ch, &t)?, None),
    };
    let blob = encode_proof(&proof, wire_lambda(ch.group()), ch.k())?;
    if let Some(out) = &a.out {
        fs::write(out, &blob)?;
    }
    let hex_blob = hex::encode(&blob);
    Ok(Outcome::ok(
        json!({ "y": t.output.value().to_str_radix(16), "l": proof.l.to_str_radix(16),
                "pi": proof.pi.value().to_str_radix(16), "tau": proof.tau,
                "proof": hex_blob, "bytes": blob.len(), "group_ops": group_ops }),
        hex_blob,
    ))
}

fn verify_cmd(cfg: &CliConfig, a: &VerifyArgs) -> anyhow::Result<Outcome> {
    let group = load_group(&a.group)?;
    let k = a.k.unwrap_or(cfg.protocol.k);
    let blob = match (&a.proof, &a.proof_file) {
        (Some(h), _) => hex::decode(h.trim()).context("--proof")?,
        (None, Some(p)) => fs::read(p)?,
        (None, None) => bail!("a proof is required"),
    };
    let input = a.input.input()?;
    let verdict = decode_proof(&blob, &group, k, a.tau)
        .and_then(|proof| verify_with_window(&group, k, &input, a.tau, &proof, cfg.protocol.window));
    match verdict {
        Ok(v) => Ok(Outcome {
            json: json!({ "accepted": v.accepted, "lambda_mults": v.lambda_mults(),
                          "r_steps": v.r_steps, "multiexp": v.multiexp }),
            text: if v.accepted { "accept".into() } else { "reject".into() },
            ok: v.accepted,
        }),
        Err(e @ Error::MalformedProof(_)) => Ok(Outcome {
            json: json!({ "accepted": false, "error": e.to_string() }),
            text: format!("reject: {e}"),
            ok: false,
        }),
        Err(e) => Err(e.into()),
    }
}

fn pow(c: &PowCommand) -> anyhow::Result<Outcome> {
    match c {
        PowCommand::Solve {
            message,
            difficulty,
            start,
            workers,
        } => {
            let p = PowPuzzle::new(message.as_bytes(), *difficulty)?;
            let s = if *workers > 1 {
                pow_solve_partitioned(&p, *start, *workers)?
            } else {
                pow_solve(&p, *start)?
            };
            Ok(Outcome::ok(
                json!({ "nonce": s.nonce, "attempts": s.attempts }),
                format!("nonce {} after {} attempts", s.nonce, s.attempts),
            ))
        }
        PowCommand::Verify {
            message,
            difficulty,
            nonce,
        } => {
            let p = PowPuzzle::new(message.as_bytes(), *difficulty)?;
            let ok = pow_verify(&p, *nonce);
            Ok(Outcome {
                json: json!({ "accepted": ok }),
                text: if ok { "accept".into() } else { "reject".into() },
                ok,
            })
        }
    }
}

fn issue(cfg: &CliConfig, a: &IssueArgs) -> anyhow::Result<Outcome> {
    let group = load_group(&a.group)?;
    let secret: [u8; 32] = hex::decode(a.secret.trim())
        .context("--secret")?
        .try_into()
        .map_err(|_| anyhow!("--secret must be 32 bytes"))?;
    let node = NodeIdentity::from_secret(secret);
    let prev = match &a.prev {
        Some(p) => {
            let lambda = wire_lambda(&group);
            let bytes = fs::read(p)?;
            Some(Transaction::decode(&bytes, vdfgate::vdf::proof_len(lambda, cfg.protocol.k))?)
        }
        None => None,
    };
    let tau = match a.tau {
        Some(t) => t,
        None => difficulty_for(
            &node.public_key(),
            &cfg.protocol.reputation_map()?,
            &cfg.protocol.calibration()?,
            &cfg.protocol.bounds()?,
        )?,
    };
    let timestamp = a.timestamp.unwrap_or_else(now_secs);
    let tx = node.issue(&group, cfg.protocol.k, a.payload.as_bytes(), prev.as_ref(), tau, timestamp)?;
    let bytes = tx.to_bytes();
    fs::write(&a.out, &bytes)?;
    let hash = hex::encode(tx.hash());
    Ok(Outcome::ok(
        json!({ "issuer": hex::encode(tx.issuer), "hash": hash, "tau": tau,
                "timestamp": timestamp, "bytes": bytes.len(), "out": a.out }),
        format!("issued {hash} ({} bytes, τ = {tau})", bytes.len()),
    ))
}

fn admit(cfg: &CliConfig, a: &AdmitArgs) -> anyhow::Result<Outcome> {
    let group = load_group(&a.group)?;
    let admission = Admission::new(group, &cfg.protocol)?;
    let now = a.now.unwrap_or_else(now_secs);
    let mut verdicts = Vec::new();
    let mut lines = Vec::new();
    let mut all_ok = true;
    for path in &a.txs {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let v = admission.admit(&bytes, now);
        all_ok &= v.is_accept();
        lines.push(format!("{}: {}", path.display(), serde_json::to_string(&v)?));
        verdicts.push(json!({ "file": path, "verdict": v }));
    }
    Ok(Outcome {
        json: json!({ "verdicts": verdicts, "counters": admission.counters() }),
        text: lines.join("\n"),
        ok: all_ok,
    })
}

fn fmt_rate(bps: Option<f64>) -> String {
    match bps {
        None => "n/a".into(),
        Some(b) => {
            let units = [("Tbps", 1e12), ("Gbps", 1e9), ("Mbps", 1e6), ("kbps", 1e3)];
            for (unit, scale) in units {
                if b >= scale {
                    return format!("{:.3} {unit}", b / scale);
                }
            }
            format!("{b:.3} bps")
        }
    }
}

fn spam_table(cfg: &CliConfig) -> anyhow::Result<Outcome> {
    let rows = spam_potential(&cfg.scenario)?;
    let mut text = format!("τ = {} (VDF), tx sizes {} / {} bytes\n", cfg.scenario.tau()?,
        cfg.scenario.tx_size(Function::Pow), cfg.scenario.tx_size(Function::Vdf));
    for r in &rows {
        text.push_str(&format!(
            "{:<6} {:<4} {:>14}  tx/s {}\n",
            r.device,
            r.function.to_string(),
            fmt_rate(r.bandwidth_bps),
            r.tx_per_sec.map_or("n/a".into(), |t| format!("{t:.4}"))
        ));
    }
    Ok(Outcome::ok(serde_json::to_value(&rows)?, text.trim_end().into()))
}

fn speedup(cfg: &CliConfig, a: &SpeedupArgs) -> anyhow::Result<Outcome> {
    let rows = speedup_report(&cfg.scenario, a.pool)?;
    let text = rows
        .iter()
        .map(|r| {
            format!(
                "{:<6} {:<4} pool {:<6} speedup {:>12}  cost/h {}",
                r.device,
                r.function.to_string(),
                r.pool_size,
                r.speedup.map_or("n/a".into(), |s| format!("{s:.4e}")),
                r.cost_usd_per_hour.map_or("n/a".into(), |c| format!("{c:.2}"))
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome::ok(serde_json::to_value(&rows)?, text))
}

fn simulate(cfg: &CliConfig, a: &SimulateArgs) -> anyhow::Result<Outcome> {
    let mut scenario = cfg.scenario.clone();
    let sim = &mut scenario.simulation;
    if sim.pow_verify_ns.is_none() {
        sim.pow_verify_ns = Some(measure_pow_verify_ns(1000));
    }
    if sim.vdf_verify_ns.is_none() {
        let group = timing_group(scenario.lambda, 1)?;
        let ns = measure_vdf_verify_ns(&group, scenario.k, 30)?;
        scenario.simulation.vdf_verify_ns = Some(ns);
    }
    let functions: &[Function] = match a.function {
        SimFunction::Pow => &[Function::Pow],
        SimFunction::Vdf => &[Function::Vdf],
        SimFunction::Both => &[Function::Pow, Function::Vdf],
    };
    let mut runs = Vec::new();
    let mut text = Vec::new();
    for &f in functions {
        let m = run_gossip_sim(&scenario, f)?;
        text.push(format!(
            "{f}: attacker {} delivered, honest median delay {}, max verify utilization {:.3}, dropped {}",
            fmt_rate(Some(m.attacker_bandwidth_bps)),
            m.honest_median_delay_ms.map_or("n/a".into(), |d| format!("{d:.1} ms")),
            m.verify_utilization.iter().copied().fold(0.0, f64::max),
            m.dropped_overload
        ));
        runs.push(m);
    }
    let ratio = match runs.as_slice() {
        [p, v] if v.attacker_bandwidth_bps > 0.0 => Some(p.attacker_bandwidth_bps / v.attacker_bandwidth_bps),
        _ => None,
    };
    if let Some(r) = ratio {
        text.push(format!("PoW/VDF attacker bandwidth ratio: {r:.3e}"));
    }
    Ok(Outcome::ok(
        json!({ "runs": runs, "pow_vdf_ratio": ratio,
                "pow_verify_ns": scenario.simulation.pow_verify_ns,
                "vdf_verify_ns": scenario.simulation.vdf_verify_ns }),
        text.join("\n"),
    ))
}

fn bench(a: &BenchArgs) -> anyhow::Result<Outcome> {
    let plan = if a.quick {
        BenchPlan {
            lambdas: vec![1024],
            tau_exponents: (10..=13).collect(),
            eval_reps: 3,
            verify_proofs: 2,
            verify_reps: 30,
            proof_reps: 1,
            multiexp: Some(MultiExpBenchPlan {
                lambdas: vec![2048],
                ks: vec![128],
                windows: vec![2],
                reps: 30,
                seed: 1,
            }),
            ..Default::default()
        }
    } else {
        BenchPlan::default()
    };
    let report = bench_all(&a.out, &plan)?;
    let text = report
        .fits
        .iter()
        .map(|f| {
            format!(
                "λ={}: eval R²={:.5} ({:.1} ns/squaring), verify drift {:.3} (flat: {})",
                f.lambda, f.eval_r_squared, f.eval_ns_per_squaring, f.verify_relative_drift, f.verify_flat
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome::ok(
        json!({ "out": a.out, "fits": report.fits }),
        format!("wrote CSV files to {}\n{text}", a.out.display()),
    ))
}

fn calibrate(cfg: &CliConfig, a: &CalibrateArgs) -> anyhow::Result<Outcome> {
    let bits = a.bits.unwrap_or(cfg.protocol.lambda);
    let group = timing_group(bits, 1)?;
    let sigma = calibrate_squaring_rate(&group, a.squarings);
    let vdf_ns = measure_vdf_verify_ns(&group, cfg.protocol.k, a.reps)?;
    let pow_ns = measure_pow_verify_ns(a.reps.max(100));
    if let Some(path) = &a.write {
        let mut updated = cfg.clone();
        updated.protocol.squarings_per_sec = sigma;
        updated.scenario.simulation.vdf_verify_ns = Some(vdf_ns);
        updated.scenario.simulation.pow_verify_ns = Some(pow_ns);
        fs::write(path, serde_json::to_string_pretty(&updated)?)?;
    }
    Ok(Outcome::ok(
        json!({ "lambda": bits, "squarings_per_sec": sigma,
                "vdf_verify_ns": vdf_ns, "pow_verify_ns": pow_ns }),
        format!("σ = {sigma:.0} squarings/s at λ = {bits}; verify {vdf_ns} ns (VDF), {pow_ns} ns (PoW)"),
    ))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            // a closed pipe (e.g. `| head`) is not an error worth a panic
            let _ = if cli.json {
                writeln!(io::stdout(), "{}", out.json)
            } else {
                writeln!(io::stdout(), "{}", out.text)
            };
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": format!("{e:#}") }));
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
