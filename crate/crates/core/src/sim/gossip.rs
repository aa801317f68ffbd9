//! Deterministic discrete-event gossip simulation.
//!
//! Honest nodes issue at their allowed rate and a single attacker issues as
//! fast as its device permits. Every node verifies each transaction at most
//! once on a single FIFO verification server, then forwards it to its
//! neighbors. Time is integer nanoseconds and ties are broken by insertion
//! order, so a run is a pure function of the configuration.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::scenario::{Function, ScenarioConfig};
use crate::error::{Error, Result};
use crate::stats::median;

const NS_PER_SEC: f64 = 1e9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimMetrics {
    pub function: Function,
    pub attacker_tx_issued: u64,
    /// Attacker bytes accepted by honest nodes, summed over nodes, as bits
    /// per second of simulated time.
    pub attacker_bandwidth_bps: f64,
    pub honest_tx_issued: u64,
    /// Median delay from issue to acceptance over every (tx, node) delivery.
    pub honest_median_delay_ms: Option<f64>,
    /// Busy fraction of each honest node's verification server.
    pub verify_utilization: Vec<f64>,
    /// Arrivals dropped because the verification queue was full.
    pub dropped_overload: u64,
    /// Arrivals discarded because the node had already seen the tx.
    pub duplicates_suppressed: u64,
    /// Verifications of a tx a node had already verified; 0 when dedup holds.
    pub repeat_verifications: u64,
    pub verifications: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Issue { origin: usize, attacker: bool },
    Arrive { node: usize, tx: u64 },
    VerifyDone { node: usize, tx: u64 },
}

#[derive(Clone, Copy, Debug)]
struct TxInfo {
    issued_at: u64,
    attacker: bool,
}

/// Honest nodes `0..n` on a ring plus random chords until each has at least
/// `m` neighbors. The attacker, node `n`, links to `m` honest nodes.
fn topology(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); n + 1];
    let link = |adj: &mut Vec<HashSet<usize>>, a: usize, b: usize| {
        adj[a].insert(b);
        adj[b].insert(a);
    };
    for i in 0..n {
        link(&mut adj, i, (i + 1) % n);
    }
    for i in 0..n {
        while adj[i].len() < m {
            let j = rng.gen_range(0..n);
            if j != i {
                link(&mut adj, i, j);
            }
        }
    }
    let mut honest: Vec<usize> = (0..n).collect();
    honest.shuffle(rng);
    for &j in &honest[..m] {
        link(&mut adj, n, j);
    }
    adj.into_iter()
        .map(|s| {
            let mut v: Vec<usize> = s.into_iter().collect();
            v.sort_unstable();
            v
        })
        .collect()
}

/// Runs the simulation for one puzzle function.
pub fn run_gossip_sim(cfg: &ScenarioConfig, function: Function) -> Result<SimMetrics> {
    cfg.validate()?;
    let sim = &cfg.simulation;
    let verify_ns = match function {
        Function::Pow => sim.pow_verify_ns,
        Function::Vdf => sim.vdf_verify_ns,
    }
    .ok_or_else(|| {
        Error::Config(format!(
            "no {function} verification cost configured; run `calibrate` first"
        ))
    })?;

    let n = sim.nodes;
    let end = (sim.duration_secs * NS_PER_SEC) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
    let adj = topology(n, sim.neighbors, &mut rng);
    let tx_size = cfg.tx_size(function);

    let period = |rate: f64| -> Option<u64> {
        (rate > 0.0).then(|| ((NS_PER_SEC / rate).round() as u64).max(1))
    };
    let honest_period = period(sim.honest_tx_per_sec);
    let attacker_period = match &sim.attacker {
        Some(name) => cfg.tx_rate(cfg.device(name)?, function)?.and_then(period),
        None => None,
    };

    let mut queue: BinaryHeap<Reverse<(u64, u64, Kind)>> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |queue: &mut BinaryHeap<_>, t: u64, kind: Kind| {
        seq += 1;
        queue.push(Reverse((t, seq, kind)));
    };

    if let Some(p) = honest_period {
        for origin in 0..n {
            push(&mut queue, rng.gen_range(0..p), Kind::Issue { origin, attacker: false });
        }
    }
    if let Some(p) = attacker_period {
        // the first solution takes a full period
        push(&mut queue, p, Kind::Issue { origin: n, attacker: true });
    }

    let mut txs: Vec<TxInfo> = Vec::new();
    let mut seen: Vec<HashSet<u64>> = vec![HashSet::new(); n];
    let mut verified: Vec<HashSet<u64>> = vec![HashSet::new(); n];
    let mut busy_until = vec![0u64; n];
    let mut busy_ns = vec![0u64; n];
    let mut pending = vec![0usize; n];

    let mut m = SimMetrics {
        function,
        attacker_tx_issued: 0,
        attacker_bandwidth_bps: 0.0,
        honest_tx_issued: 0,
        honest_median_delay_ms: None,
        verify_utilization: Vec::new(),
        dropped_overload: 0,
        duplicates_suppressed: 0,
        repeat_verifications: 0,
        verifications: 0,
    };
    let mut attacker_bytes = 0u64;
    let mut delays_ms = Vec::new();

    while let Some(Reverse((now, _, kind))) = queue.pop() {
        if now > end {
            break;
        }
        match kind {
            Kind::Issue { origin, attacker } => {
                let id = txs.len() as u64;
                txs.push(TxInfo {
                    issued_at: now,
                    attacker,
                });
                if attacker {
                    m.attacker_tx_issued += 1;
                } else {
                    m.honest_tx_issued += 1;
                    seen[origin].insert(id);
                    verified[origin].insert(id);
                }
                for &peer in &adj[origin] {
                    push(&mut queue, now + sim.link_latency_ns, Kind::Arrive { node: peer, tx: id });
                }
                let next = if attacker { attacker_period } else { honest_period };
                if let Some(p) = next {
                    push(&mut queue, now + p, Kind::Issue { origin, attacker });
                }
            }
            Kind::Arrive { node, tx } => {
                if node == n {
                    continue; // the attacker does not relay
                }
                if !seen[node].insert(tx) {
                    m.duplicates_suppressed += 1;
                    continue;
                }
                if pending[node] >= sim.verify_queue_bound {
                    m.dropped_overload += 1;
                    continue;
                }
                let start = now.max(busy_until[node]);
                busy_until[node] = start + verify_ns;
                busy_ns[node] += verify_ns;
                pending[node] += 1;
                push(&mut queue, busy_until[node], Kind::VerifyDone { node, tx });
            }
            Kind::VerifyDone { node, tx } => {
                pending[node] -= 1;
                m.verifications += 1;
                if !verified[node].insert(tx) {
                    m.repeat_verifications += 1;
                    continue;
                }
                let info = txs[tx as usize];
                if info.attacker {
                    attacker_bytes += tx_size;
                } else {
                    delays_ms.push((now - info.issued_at) as f64 / 1e6);
                }
                for &peer in &adj[node] {
                    push(&mut queue, now + sim.link_latency_ns, Kind::Arrive { node: peer, tx });
                }
            }
        }
    }

    m.attacker_bandwidth_bps = attacker_bytes as f64 * 8.0 / sim.duration_secs;
    m.honest_median_delay_ms = (!delays_ms.is_empty()).then(|| median(&delays_ms));
    m.verify_utilization = busy_ns
        .iter()
        .map(|&b| (b.min(end)) as f64 / end as f64)
        .collect();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(attacker: Option<&str>) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.simulation.attacker = attacker.map(str::to_string);
        cfg.simulation.pow_verify_ns = Some(1_000);
        cfg.simulation.vdf_verify_ns = Some(2_000_000);
        cfg.simulation.honest_tx_per_sec = 5.0;
        cfg
    }

    #[test]
    fn topology_is_connected_with_min_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let adj = topology(12, 3, &mut rng);
        assert_eq!(adj[12].len(), 3);
        for (i, peers) in adj.iter().enumerate().take(12) {
            assert!(peers.len() >= 3, "node {i}");
            assert!(!peers.contains(&i));
        }
    }

    #[test]
    fn no_attacker_no_attack_bandwidth() {
        let m = run_gossip_sim(&scenario(None), Function::Vdf).unwrap();
        assert_eq!(m.attacker_bandwidth_bps, 0.0);
        assert_eq!(m.attacker_tx_issued, 0);
        assert!(m.honest_tx_issued > 0);
        assert!(m.honest_median_delay_ms.is_some());
        assert_eq!(m.repeat_verifications, 0);
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = scenario(Some("CPU"));
        let a = run_gossip_sim(&cfg, Function::Pow).unwrap();
        let b = run_gossip_sim(&cfg, Function::Pow).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn requires_calibrated_costs() {
        let mut cfg = scenario(None);
        cfg.simulation.vdf_verify_ns = None;
        assert!(matches!(run_gossip_sim(&cfg, Function::Vdf), Err(Error::Config(_))));
    }

    #[test]
    fn overload_is_a_metric() {
        let mut cfg = scenario(Some("FPGA"));
        cfg.simulation.duration_secs = 0.2;
        cfg.simulation.pow_verify_ns = Some(100_000);
        cfg.simulation.verify_queue_bound = 50;
        cfg.simulation.link_latency_ns = 1_000_000;
        let m = run_gossip_sim(&cfg, Function::Pow).unwrap();
        assert!(m.dropped_overload > 0);
        assert!(m.verify_utilization.iter().any(|&u| u > 0.9));
    }
}
