use std::fmt::Write as _;
use std::str::FromStr;

use super::{FixedPointOptions, FixedPointSolution, ThroughputProblem};
use crate::config::NetworkConfig;
use crate::error::{Error, Result};

/// Online rule for one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairRule {
    /// Probing never pays: stop iff the direct rate reaches `lambda*`.
    DirectOnly,
    /// Give up at or below `zeta`, transmit directly at or above `eta`,
    /// probe the RIS in between.
    Probe { zeta: f64, eta: f64 },
}

/// Everything the pure-threshold policy needs at run time.
///
/// Serialized as flat `key = value` text:
///
/// ```text
/// config_fingerprint = 3f2a...
/// lambda_star = 6.19707993662652
/// pairs = 2
/// pair.1.rule = probe
/// pair.1.zeta = 0.00027
/// pair.1.eta = 0.00061
/// pair.2.rule = direct
/// ```
///
/// Pairs are numbered from 1. Floats are written in shortest round-trip
/// form, so parsing the output reproduces the table bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTable {
    /// [`NetworkConfig::fingerprint`] of the config the table was solved for.
    pub config_fingerprint: String,
    pub lambda_star: f64,
    pub rules: Vec<PairRule>,
}

impl ThresholdTable {
    /// 0-based indices of the pairs that may probe.
    pub fn probing_set(&self) -> Vec<usize> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, PairRule::Probe { .. }))
            .map(|(k, _)| k)
            .collect()
    }

    pub fn pairs(&self) -> usize {
        self.rules.len()
    }

    /// Fails unless the table was solved for `cfg`.
    pub fn check_config(&self, cfg: &NetworkConfig) -> Result<()> {
        let expected = cfg.fingerprint();
        if self.config_fingerprint != expected {
            return Err(Error::Table(format!(
                "table was solved for config {}, not {expected}; re-run solve",
                self.config_fingerprint
            )));
        }
        if self.rules.len() != cfg.pairs() {
            return Err(Error::Table(format!(
                "table has {} pairs, config has {}",
                self.rules.len(),
                cfg.pairs()
            )));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "config_fingerprint = {}", self.config_fingerprint);
        let _ = writeln!(s, "lambda_star = {}", self.lambda_star);
        let _ = writeln!(s, "pairs = {}", self.rules.len());
        for (i, rule) in self.rules.iter().enumerate() {
            let n = i + 1;
            match rule {
                PairRule::DirectOnly => {
                    let _ = writeln!(s, "pair.{n}.rule = direct");
                }
                PairRule::Probe { zeta, eta } => {
                    let _ = writeln!(s, "pair.{n}.rule = probe");
                    let _ = writeln!(s, "pair.{n}.zeta = {zeta}");
                    let _ = writeln!(s, "pair.{n}.eta = {eta}");
                }
            }
        }
        s
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_float(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Table(format!("{key}: not a finite number: {value:?}")))
}

impl FromStr for ThresholdTable {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut fingerprint = None;
        let mut lambda_star = None;
        let mut pairs: Option<usize> = None;
        // (rule, zeta, eta) per pair, filled in any order.
        let mut slots: Vec<(Option<bool>, Option<f64>, Option<f64>)> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Table(format!("line {}: expected key = value", lineno + 1)))?;
            let dup = || Error::Table(format!("duplicate key {key}"));
            match key {
                "config_fingerprint" => {
                    if fingerprint.replace(value.to_string()).is_some() {
                        return Err(dup());
                    }
                }
                "lambda_star" => {
                    if lambda_star.replace(parse_float(key, value)?).is_some() {
                        return Err(dup());
                    }
                }
                "pairs" => {
                    let n = value
                        .parse()
                        .map_err(|_| Error::Table(format!("pairs: not an integer: {value:?}")))?;
                    if pairs.replace(n).is_some() {
                        return Err(dup());
                    }
                }
                _ => {
                    let mut parts = key.splitn(3, '.');
                    let (Some("pair"), Some(idx), Some(field)) = (parts.next(), parts.next(), parts.next()) else {
                        return Err(Error::Table(format!("unknown key {key}")));
                    };
                    let idx: usize = idx
                        .parse()
                        .ok()
                        .filter(|&i| i >= 1)
                        .ok_or_else(|| Error::Table(format!("{key}: pair numbers start at 1")))?;
                    if slots.len() < idx {
                        slots.resize(idx, (None, None, None));
                    }
                    let slot = &mut slots[idx - 1];
                    let taken = match field {
                        "rule" => {
                            let probe = match value {
                                "probe" => true,
                                "direct" => false,
                                _ => return Err(Error::Table(format!("{key}: expected probe or direct"))),
                            };
                            slot.0.replace(probe).is_some()
                        }
                        "zeta" => slot.1.replace(parse_float(key, value)?).is_some(),
                        "eta" => slot.2.replace(parse_float(key, value)?).is_some(),
                        _ => return Err(Error::Table(format!("unknown key {key}"))),
                    };
                    if taken {
                        return Err(dup());
                    }
                }
            }
        }

        let config_fingerprint = fingerprint.ok_or_else(|| Error::Table("missing config_fingerprint".into()))?;
        let lambda_star = lambda_star.ok_or_else(|| Error::Table("missing lambda_star".into()))?;
        if lambda_star < 0.0 {
            return Err(Error::Table("lambda_star is negative".into()));
        }
        let pairs = pairs.ok_or_else(|| Error::Table("missing pairs".into()))?;
        if slots.len() > pairs {
            return Err(Error::Table(format!("pair.{} exceeds pairs = {pairs}", slots.len())));
        }
        slots.resize(pairs, (None, None, None));
        let rules = slots
            .into_iter()
            .enumerate()
            .map(|(i, slot)| {
                let n = i + 1;
                match slot {
                    (Some(false), None, None) => Ok(PairRule::DirectOnly),
                    (Some(false), _, _) => Err(Error::Table(format!("pair.{n}: direct rule takes no thresholds"))),
                    (Some(true), Some(zeta), Some(eta)) if 0.0 <= zeta && zeta < eta => {
                        Ok(PairRule::Probe { zeta, eta })
                    }
                    (Some(true), Some(_), Some(_)) => Err(Error::Table(format!("pair.{n}: need 0 <= zeta < eta"))),
                    (Some(true), _, _) => Err(Error::Table(format!("pair.{n}: probe rule needs zeta and eta"))),
                    (None, _, _) => Err(Error::Table(format!("missing pair.{n}.rule"))),
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            config_fingerprint,
            lambda_star,
            rules,
        })
    }
}

/// Pairs for which probing beats both alternatives at the break-even
/// amplitude, i.e. the only pairs that may ever probe at price `lambda`.
pub fn pair_set_kstar(cfg: &NetworkConfig, lambda: f64) -> Result<Vec<usize>> {
    let p = ThroughputProblem::new(cfg)?;
    (0..p.pairs())
        .filter_map(|k| match p.probes(k, lambda) {
            Ok(true) => Some(Ok(k)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect()
}

pub fn solve_zeta(cfg: &NetworkConfig, k: usize, lambda: f64) -> Result<f64> {
    ThroughputProblem::new(cfg)?.zeta(k, lambda)
}

pub fn solve_eta(cfg: &NetworkConfig, k: usize, lambda: f64) -> Result<f64> {
    ThroughputProblem::new(cfg)?.eta(k, lambda)
}

impl ThroughputProblem {
    /// Thresholds for every pair at price `lambda`.
    pub fn rules(&self, lambda: f64) -> Result<Vec<PairRule>> {
        (0..self.pairs())
            .map(|k| {
                if self.probes(k, lambda)? {
                    Ok(PairRule::Probe {
                        zeta: self.zeta(k, lambda)?,
                        eta: self.eta(k, lambda)?,
                    })
                } else {
                    Ok(PairRule::DirectOnly)
                }
            })
            .collect()
    }
}

/// Solves `lambda*` with the default midband step and derives all thresholds.
pub fn build_threshold_table(cfg: &NetworkConfig) -> Result<ThresholdTable> {
    build_threshold_table_with(cfg, &FixedPointOptions::default()).map(|(t, _)| t)
}

/// As [`build_threshold_table`], also returning the fixed-point diagnostics.
pub fn build_threshold_table_with(
    cfg: &NetworkConfig,
    opts: &FixedPointOptions,
) -> Result<(ThresholdTable, FixedPointSolution)> {
    let problem = ThroughputProblem::new(cfg)?;
    let solution = problem.solve_lambda_star(opts)?;
    let table = ThresholdTable {
        config_fingerprint: cfg.fingerprint(),
        lambda_star: solution.lambda,
        rules: problem.rules(solution.lambda)?,
    };
    Ok((table, solution))
}
