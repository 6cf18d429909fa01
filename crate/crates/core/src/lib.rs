//! Optimal-stopping channel access for CSMA/CA networks with an
//! opportunistically probed reconfigurable intelligent surface (RIS).
//!
//! A contention winner observes its direct channel and either transmits,
//! gives up the channel, or pays a pilot/CTS overhead to learn the cascaded
//! RIS channel first. The crate solves the optimal rule offline as a
//! [`ThresholdTable`] (maximal throughput `lambda*` plus two amplitude
//! thresholds per pair) and checks it against a discrete-event simulator.
//!
//! ```no_run
//! use rismac::{build_threshold_table, NetworkConfig};
//!
//! let cfg = NetworkConfig::reference_scenario();
//! let table = build_threshold_table(&cfg)?;
//! println!("lambda* = {:.4} bit/s/Hz", table.lambda_star);
//! # Ok::<(), rismac::Error>(())
//! ```

pub mod channel;
pub mod config;
pub mod contention;
pub mod error;
pub mod harness;
pub mod quadrature;
pub mod roots;
pub mod simulator;
pub mod solver;
pub mod special;
pub mod strategies;

pub use config::NetworkConfig;
pub use error::{Error, Result};
pub use simulator::{run_campaign, Simulation, ThroughputEstimate};
pub use solver::{build_threshold_table, PairRule, ThresholdTable, ThroughputProblem};
pub use strategies::{Decision, PolicyKind, Strategy};
