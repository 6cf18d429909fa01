//! Throughput against coherence time at 26 dBm, with the proposed policy's
//! gain over each baseline.

use rismac::harness::{run_sweep, Axis, SweepSpec};
use rismac::simulator::worker_threads;
use rismac::{NetworkConfig, PolicyKind};

fn main() -> rismac::Result<()> {
    let cfg = NetworkConfig::reference_scenario().with_tx_power_dbm(26.0);
    let spec = SweepSpec {
        axis: Axis::CoherenceTime,
        values: vec![5.0, 15.0, 25.0],
        policies: PolicyKind::ALL.to_vec(),
        n_rounds: 20_000,
        seed: 1,
    };
    let rows = run_sweep(&cfg, &spec, worker_threads())?;
    for chunk in rows.chunks(spec.policies.len()) {
        let ours = chunk[0].simulated_mean;
        print!("tau_d {:>4} ms: proposed {ours:.3}", chunk[0].axis_value);
        for r in &chunk[1..] {
            print!(", {} {:+.1}%", r.policy, 100.0 * (ours / r.simulated_mean - 1.0));
        }
        println!();
    }
    Ok(())
}
