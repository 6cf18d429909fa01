//! Throughput of every policy against transmit power, as CSV on stdout.

use rismac::harness::{run_sweep, write_rows, Axis, SweepSpec};
use rismac::simulator::worker_threads;
use rismac::{NetworkConfig, PolicyKind};

fn main() -> rismac::Result<()> {
    let spec = SweepSpec {
        axis: Axis::TxPower,
        values: vec![20.0, 25.0, 30.0],
        policies: PolicyKind::ALL.to_vec(),
        n_rounds: 20_000,
        seed: 1,
    };
    let rows = run_sweep(&NetworkConfig::reference_scenario(), &spec, worker_threads())?;
    write_rows(std::io::stdout().lock(), &rows)
}
