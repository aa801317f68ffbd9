//! Device-profile analytics, gossip simulation and benchmark orchestration.

pub mod bench;
pub mod devices;
pub mod gossip;
pub mod scenario;
pub mod spam;

pub use bench::{bench_all, BenchPlan, BenchReport};
pub use devices::{default_devices, parse_devices, DeviceProfile};
pub use gossip::{run_gossip_sim, SimMetrics};
pub use scenario::{Function, ScenarioConfig, SimConfig};
pub use spam::{spam_potential, speedup_report, SpamRow, SpeedupRow};
