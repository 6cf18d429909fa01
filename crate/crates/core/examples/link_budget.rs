//! Per-pair geometry, link budget and cascaded-amplitude moments.

use rismac::channel::{cascaded_moments, linear_budget, pair_geometry, rate_direct, PairStats};
use rismac::NetworkConfig;

fn main() -> rismac::Result<()> {
    let cfg = NetworkConfig::reference_scenario();
    let rho = linear_budget(&cfg);
    println!("link budget rho = {rho:.4e} ({:.1} dB)", 10.0 * rho.log10());
    println!("pair  direct(m)  via RIS(m)   E|h|^2       mean sum    sd sum");
    for k in 0..cfg.pairs() {
        let g = pair_geometry(&cfg, k)?;
        let m = cascaded_moments(&cfg, k)?;
        let direct_power = PairStats::new(&cfg, k)?.direct_power;
        println!(
            "{:>4}  {:>9.2}  {:>10.2}  {direct_power:.3e}  {:.3e}  {:.3e}",
            k + 1,
            g.direct,
            g.to_ris + g.from_ris,
            m.mean,
            m.std_dev
        );
    }
    let h = cascaded_moments(&cfg, 0)?.mean;
    println!(
        "a direct amplitude equal to the mean surface sum gives {:.3} bit/s/Hz",
        rate_direct(rho, h)
    );
    Ok(())
}
