//! Static network parameters and their text format.
//!
//! Scenario files are `key = value [unit]` lines; `#` starts a comment.
//! Powers take `dBm`, `mW` or `W`; gains and the reference path loss take
//! `dB`, `dBi` or `lin`; durations require one of `s`, `ms`, `us`;
//! positions are `x,y` pairs separated by `;` with an optional trailing `m`.
//! All values are converted to linear SI units on ingestion.
//!
//! ```text
//! tx_power = 30 dBm
//! coherence_time = 15 ms
//! source_positions = 0,0; 0,10 m
//! destination_positions = 150,0; 150,10 m
//! contention_prob = 0.3
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A point in the deployment plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Every static parameter of a scenario, in linear SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Number of RIS reflecting elements `M`.
    pub ris_elements: usize,
    /// Transmit power (W).
    pub tx_power: f64,
    /// Transmit antenna gain (linear).
    pub tx_gain: f64,
    /// Receive antenna gain (linear).
    pub rx_gain: f64,
    /// Path loss at the 1 m reference distance (linear).
    pub ref_path_loss: f64,
    /// Noise power (W).
    pub noise_power: f64,
    /// Carrier frequency (Hz). Recorded only; no formula consumes it.
    pub carrier_frequency: f64,
    /// Path-loss exponent of the direct link.
    pub alpha_direct: f64,
    /// Path-loss exponent of both RIS hops.
    pub alpha_ris: f64,
    pub sources: Vec<Point>,
    pub destinations: Vec<Point>,
    pub ris: Point,
    /// Channel coherence time `tau_d` (s).
    pub coherence_time: f64,
    /// RTS duration (s).
    pub rts: f64,
    /// CTS duration (s).
    pub cts: f64,
    /// RIS pilot period (s).
    pub pilot: f64,
    /// Minimum contention slot duration (s).
    pub slot: f64,
    /// Per-pair RTS transmission probability.
    pub contention_probs: Vec<f64>,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl NetworkConfig {
    /// The evaluation scenario: eight parallel pairs 150 m apart, a
    /// 32-element RIS at (75, 100), 30 dBm transmit power and 15 ms
    /// coherence time.
    pub fn reference_scenario() -> Self {
        let pairs = 8;
        Self {
            ris_elements: 32,
            tx_power: dbm_to_watts(30.0),
            tx_gain: db_to_linear(0.0),
            rx_gain: db_to_linear(0.0),
            ref_path_loss: db_to_linear(-30.0),
            noise_power: dbm_to_watts(-80.0),
            carrier_frequency: 2e9,
            alpha_direct: 3.0,
            alpha_ris: 2.5,
            sources: (0..pairs).map(|k| Point::new(0.0, 10.0 * k as f64)).collect(),
            destinations: (0..pairs).map(|k| Point::new(150.0, 10.0 * k as f64)).collect(),
            ris: Point::new(75.0, 100.0),
            coherence_time: 15.0 / 1e3,
            rts: 50.0 / 1e6,
            cts: 50.0 / 1e6,
            pilot: 500.0 / 1e6,
            slot: 25.0 / 1e6,
            contention_probs: vec![0.3; pairs],
        }
    }

    /// Number of source-destination pairs `K`.
    pub fn pairs(&self) -> usize {
        self.sources.len()
    }

    /// RTS/CTS handshake time `tau_M1`.
    pub fn handshake_time(&self) -> f64 {
        self.rts + self.cts
    }

    /// Handshake plus RIS probing time `tau_M2`.
    pub fn probed_handshake_time(&self) -> f64 {
        self.handshake_time() + self.pilot + self.cts
    }

    /// Extra time one RIS probe costs, `tau_p + tau_C`.
    pub fn probe_overhead(&self) -> f64 {
        self.pilot + self.cts
    }

    /// Payload window of a direct-link transmission, `tau_d - tau_M1`.
    pub fn direct_window(&self) -> f64 {
        self.coherence_time - self.handshake_time()
    }

    /// Payload window of an RIS-assisted transmission, `tau_d - tau_M2`.
    pub fn ris_window(&self) -> f64 {
        self.coherence_time - self.probed_handshake_time()
    }

    pub fn with_tx_power_dbm(mut self, dbm: f64) -> Self {
        self.tx_power = dbm_to_watts(dbm);
        self
    }

    pub fn with_coherence_time(mut self, seconds: f64) -> Self {
        self.coherence_time = seconds;
        self
    }

    pub fn with_ris_elements(mut self, m: usize) -> Self {
        self.ris_elements = m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.pairs();
        if k == 0 {
            return Err(Error::config("source_positions", "at least one pair is required"));
        }
        if self.destinations.len() != k {
            return Err(Error::config(
                "destination_positions",
                format!("{} destinations for {} sources", self.destinations.len(), k),
            ));
        }
        if self.contention_probs.len() != k {
            return Err(Error::config(
                "contention_prob",
                format!("{} probabilities for {} pairs", self.contention_probs.len(), k),
            ));
        }
        for (key, v) in [
            ("tx_power", self.tx_power),
            ("noise_power", self.noise_power),
            ("ref_path_loss", self.ref_path_loss),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, "must be positive and finite"));
            }
        }
        for (key, v) in [("tx_gain", self.tx_gain), ("rx_gain", self.rx_gain)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(key, "must be a non-negative linear gain"));
            }
        }
        for (key, v) in [("alpha_direct", self.alpha_direct), ("alpha_ris", self.alpha_ris)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::config(key, "must be a non-negative finite exponent"));
            }
        }
        for (key, v) in [
            ("coherence_time", self.coherence_time),
            ("rts_duration", self.rts),
            ("cts_duration", self.cts),
            ("pilot_duration", self.pilot),
            ("slot_duration", self.slot),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, "duration must be positive"));
            }
        }
        if self.coherence_time <= self.probed_handshake_time() {
            return Err(Error::config(
                "coherence_time",
                format!(
                    "{} s does not exceed tau_M2 = {} s",
                    self.coherence_time,
                    self.probed_handshake_time()
                ),
            ));
        }
        for p in &self.contention_probs {
            if !(*p > 0.0 && *p <= 1.0) {
                return Err(Error::config("contention_prob", format!("{p} is outside (0, 1]")));
            }
        }
        if crate::contention::success_probability(&self.contention_probs)? <= 0.0 {
            return Err(Error::config(
                "contention_prob",
                "no slot can ever carry exactly one RTS",
            ));
        }
        for (i, (s, d)) in self.sources.iter().zip(&self.destinations).enumerate() {
            for (link, dist) in [
                ("direct", s.distance(d)),
                ("source-RIS", s.distance(&self.ris)),
                ("RIS-destination", self.ris.distance(d)),
            ] {
                if dist <= 0.0 {
                    return Err(Error::DegenerateGeometry { pair: i, link });
                }
            }
        }
        Ok(())
    }

    /// Canonical text form in linear units. Parsing it yields a config
    /// equal to `self` bit for bit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let fmt_points = |pts: &[Point]| {
            pts.iter()
                .map(|p| format!("{},{}", p.x, p.y))
                .collect::<Vec<_>>()
                .join("; ")
        };
        let probs = self
            .contention_probs
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "pairs = {}", self.pairs());
        let _ = writeln!(out, "ris_elements = {}", self.ris_elements);
        let _ = writeln!(out, "tx_power = {} W", self.tx_power);
        let _ = writeln!(out, "tx_gain = {} lin", self.tx_gain);
        let _ = writeln!(out, "rx_gain = {} lin", self.rx_gain);
        let _ = writeln!(out, "ref_path_loss = {} lin", self.ref_path_loss);
        let _ = writeln!(out, "noise_power = {} W", self.noise_power);
        let _ = writeln!(out, "carrier_frequency = {} Hz", self.carrier_frequency);
        let _ = writeln!(out, "alpha_direct = {}", self.alpha_direct);
        let _ = writeln!(out, "alpha_ris = {}", self.alpha_ris);
        let _ = writeln!(out, "source_positions = {} m", fmt_points(&self.sources));
        let _ = writeln!(out, "destination_positions = {} m", fmt_points(&self.destinations));
        let _ = writeln!(out, "ris_position = {},{} m", self.ris.x, self.ris.y);
        let _ = writeln!(out, "coherence_time = {} s", self.coherence_time);
        let _ = writeln!(out, "rts_duration = {} s", self.rts);
        let _ = writeln!(out, "cts_duration = {} s", self.cts);
        let _ = writeln!(out, "pilot_duration = {} s", self.pilot);
        let _ = writeln!(out, "slot_duration = {} s", self.slot);
        let _ = writeln!(out, "contention_prob = {probs}");
        out
    }

    /// Short hex digest of the canonical text; threshold tables carry it so
    /// a table can be matched to the scenario it was solved for.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        text.parse()
    }
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self::reference_scenario()
    }
}

const KEYS: &[&str] = &[
    "pairs",
    "ris_elements",
    "tx_power",
    "tx_gain",
    "rx_gain",
    "ref_path_loss",
    "noise_power",
    "carrier_frequency",
    "alpha_direct",
    "alpha_ris",
    "source_positions",
    "destination_positions",
    "ris_position",
    "coherence_time",
    "rts_duration",
    "cts_duration",
    "pilot_duration",
    "slot_duration",
    "contention_prob",
];

/// Splits `"15 ms"` / `"15ms"` into the number and its unit suffix.
fn split_unit(raw: &str) -> (&str, &str) {
    let raw = raw.trim();
    let idx = raw
        .char_indices()
        .find(|&(i, c)| {
            c.is_ascii_alphabetic()
                && !((c == 'e' || c == 'E')
                    && raw[i + 1..]
                        .chars()
                        .next()
                        .is_some_and(|n| n.is_ascii_digit() || n == '-' || n == '+'))
        })
        .map(|(i, _)| i)
        .unwrap_or(raw.len());
    (raw[..idx].trim(), raw[idx..].trim())
}

fn number(key: &str, s: &str) -> Result<f64> {
    f64::from_str(s.trim())
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::config(key, format!("`{s}` is not a finite number")))
}

fn plain(key: &str, raw: &str) -> Result<f64> {
    let (num, unit) = split_unit(raw);
    if !unit.is_empty() {
        return Err(Error::config(key, format!("unexpected unit `{unit}`")));
    }
    number(key, num)
}

fn power(key: &str, raw: &str) -> Result<f64> {
    let (num, unit) = split_unit(raw);
    let v = number(key, num)?;
    match unit {
        "dBm" => Ok(dbm_to_watts(v)),
        "mW" => Ok(v / 1e3),
        "W" => Ok(v),
        "" => Err(Error::config(key, "power needs a unit (dBm, mW, W)")),
        u => Err(Error::config(key, format!("unknown power unit `{u}`"))),
    }
}

fn gain(key: &str, raw: &str) -> Result<f64> {
    let (num, unit) = split_unit(raw);
    let v = number(key, num)?;
    match unit {
        "dB" | "dBi" => Ok(db_to_linear(v)),
        "lin" => Ok(v),
        "" => Err(Error::config(key, "gain needs a unit (dB, dBi, lin)")),
        u => Err(Error::config(key, format!("unknown gain unit `{u}`"))),
    }
}

fn duration(key: &str, raw: &str) -> Result<f64> {
    let (num, unit) = split_unit(raw);
    let v = number(key, num)?;
    match unit {
        "s" => Ok(v),
        "ms" => Ok(v / 1e3),
        "us" | "µs" => Ok(v / 1e6),
        "" => Err(Error::config(key, "duration needs a unit (s, ms, us)")),
        u => Err(Error::config(key, format!("unknown duration unit `{u}`"))),
    }
}

fn frequency(key: &str, raw: &str) -> Result<f64> {
    let (num, unit) = split_unit(raw);
    let v = number(key, num)?;
    match unit {
        "Hz" => Ok(v),
        "kHz" => Ok(v * 1e3),
        "MHz" => Ok(v * 1e6),
        "GHz" => Ok(v * 1e9),
        _ => Err(Error::config(key, "frequency needs a unit (Hz, kHz, MHz, GHz)")),
    }
}

fn points(key: &str, raw: &str) -> Result<Vec<Point>> {
    let body = raw.trim();
    let body = body.strip_suffix('m').unwrap_or(body).trim();
    body.split(';')
        .map(|pair| {
            let mut it = pair.split(',');
            match (it.next(), it.next(), it.next()) {
                (Some(x), Some(y), None) => Ok(Point::new(number(key, x)?, number(key, y)?)),
                _ => Err(Error::config(key, format!("`{}` is not an `x,y` pair", pair.trim()))),
            }
        })
        .collect()
}

impl FromStr for NetworkConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", lineno + 1), "expected `key = value`"))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::config(key, "unknown key"));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::config(key, "given more than once"));
            }
        }
        let get = |key: &str| -> Result<&str> {
            entries
                .get(key)
                .map(String::as_str)
                .ok_or_else(|| Error::config(key, "missing"))
        };

        let sources = points("source_positions", get("source_positions")?)?;
        let destinations = points("destination_positions", get("destination_positions")?)?;
        let ris = match points("ris_position", get("ris_position")?)?.as_slice() {
            [p] => *p,
            _ => return Err(Error::config("ris_position", "expected a single `x,y`")),
        };
        let probs: Vec<f64> = get("contention_prob")?
            .split(',')
            .map(|p| plain("contention_prob", p))
            .collect::<Result<_>>()?;
        let contention_probs = if probs.len() == 1 {
            vec![probs[0]; sources.len()]
        } else {
            probs
        };
        let ris_elements = plain("ris_elements", get("ris_elements")?)?;
        if ris_elements < 0.0 || ris_elements.fract() != 0.0 {
            return Err(Error::config("ris_elements", "must be a non-negative integer"));
        }

        let cfg = NetworkConfig {
            ris_elements: ris_elements as usize,
            tx_power: power("tx_power", get("tx_power")?)?,
            tx_gain: gain("tx_gain", get("tx_gain")?)?,
            rx_gain: gain("rx_gain", get("rx_gain")?)?,
            ref_path_loss: gain("ref_path_loss", get("ref_path_loss")?)?,
            noise_power: power("noise_power", get("noise_power")?)?,
            carrier_frequency: match entries.get("carrier_frequency") {
                Some(v) => frequency("carrier_frequency", v)?,
                None => 2e9,
            },
            alpha_direct: plain("alpha_direct", get("alpha_direct")?)?,
            alpha_ris: plain("alpha_ris", get("alpha_ris")?)?,
            sources,
            destinations,
            ris,
            coherence_time: duration("coherence_time", get("coherence_time")?)?,
            rts: duration("rts_duration", get("rts_duration")?)?,
            cts: duration("cts_duration", get("cts_duration")?)?,
            pilot: duration("pilot_duration", get("pilot_duration")?)?,
            slot: duration("slot_duration", get("slot_duration")?)?,
            contention_probs,
        };
        if let Some(k) = entries.get("pairs") {
            let k = plain("pairs", k)?;
            if k != cfg.pairs() as f64 {
                return Err(Error::config(
                    "pairs",
                    format!("declares {k} pairs but {} positions are given", cfg.pairs()),
                ));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
