//! Experiment description read from a single JSON document.
//!
//! Every field has a default, so `{}` is a valid configuration describing
//! the `h = (0.9, 0.1)`, `N = 16384`, rate one-half scenario at 10.37 dB.

use std::path::PathBuf;

use parpolar::allocation::AllocationMethod;
use parpolar::codec::{CheckNode, CrcSpec, DecoderConfig, StopRule};
use parpolar::construction::MappingKind;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Largest number of points a power sweep may contain.
pub const MAX_SWEEP_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub code: CodeConfig,
    pub power: PowerConfig,
    pub allocation: AllocationConfig,
    pub decoder: DecoderSection,
    pub sim: SimSection,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub h1: f64,
    pub h2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodeConfig {
    /// Code exponent, `N = 2^n`.
    pub n: u32,
    pub k: usize,
    pub mapping: MappingKind,
}

/// Either a single average power or an inclusive sweep, both in dB. The
/// 10.37 dB default applies only when the whole section is absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerConfig {
    #[serde(default)]
    pub p_avg_db: Option<f64>,
    #[serde(default)]
    pub sweep: Option<PowerSweep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSweep {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AllocationConfig {
    pub method: AllocationMethod,
    /// Power fraction of the first channel; `manual` only.
    pub rho: Option<f64>,
    pub grid_points: usize,
    /// Target FER of the normal-approximation rate.
    pub na_target_fer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderType {
    Sc,
    Scl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoderSection {
    #[serde(rename = "type")]
    pub kind: DecoderType,
    pub list_size: usize,
    /// Zero disables the outer CRC.
    pub crc_width: u32,
    /// Generator without the leading term; defaults to `x^20 + x^3 + 1`
    /// for width 20 and is required for other widths.
    pub crc_polynomial: Option<u64>,
    pub check_node: CheckNode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub seed: u64,
    pub max_frames: u64,
    pub target_frame_errors: u64,
    pub genie: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::default(),
            code: CodeConfig::default(),
            power: PowerConfig::default(),
            allocation: AllocationConfig::default(),
            decoder: DecoderSection::default(),
            sim: SimSection::default(),
            output: PathBuf::from("out"),
        }
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Self { h1: 0.9, h2: 0.1 }
    }
}

impl Default for CodeConfig {
    fn default() -> Self {
        Self {
            n: 14,
            k: 8192,
            mapping: MappingKind::Sorted,
        }
    }
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            p_avg_db: Some(10.37),
            sweep: None,
        }
    }
}

impl Default for AllocationConfig {
    fn default() -> Self {
        Self {
            method: AllocationMethod::FerOptimal,
            rho: None,
            grid_points: 201,
            na_target_fer: 1e-4,
        }
    }
}

impl Default for DecoderSection {
    fn default() -> Self {
        Self {
            kind: DecoderType::Sc,
            list_size: 32,
            crc_width: 0,
            crc_polynomial: None,
            check_node: CheckNode::Exact,
        }
    }
}

impl Default for SimSection {
    fn default() -> Self {
        let stop = StopRule::default();
        Self {
            seed: 0,
            max_frames: stop.max_frames,
            target_frame_errors: stop.target_frame_errors,
            genie: false,
        }
    }
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

macro_rules! require {
    ($cond:expr, $($arg:tt)+) => {
        {
            let holds: bool = $cond;
            if !holds {
                return Err(config_error(format!($($arg)+)));
            }
        }
    };
}

impl ExperimentConfig {
    /// Parses a JSON document and validates it.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| config_error(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The fully resolved configuration, defaults included.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let Scenario { h1, h2 } = self.scenario;
        require!(
            h1 > 0.0 && h1.is_finite() && h2 > 0.0 && h2.is_finite(),
            "channel gains must be positive"
        );

        let CodeConfig { n, k, .. } = self.code;
        require!(
            (1..=parpolar::construction::density::MAX_N).contains(&n),
            "code exponent {n} out of range"
        );
        require!(
            k <= 1usize << n,
            "dimension {k} exceeds the block length {}",
            1usize << n
        );

        match (self.power.p_avg_db, self.power.sweep) {
            (Some(db), None) => require!(
                db.is_finite() && db.abs() <= 100.0,
                "p_avg_db {db} out of range"
            ),
            (None, Some(s)) => {
                require!(
                    s.start_db.is_finite()
                        && s.stop_db.is_finite()
                        && s.start_db.abs() <= 100.0
                        && s.stop_db.abs() <= 100.0,
                    "sweep bounds out of range"
                );
                require!(
                    s.step_db > 0.0 && s.start_db <= s.stop_db,
                    "sweep needs start ≤ stop and a positive step"
                );
                require!(
                    (s.stop_db - s.start_db) / s.step_db < MAX_SWEEP_POINTS as f64,
                    "sweep has more than {MAX_SWEEP_POINTS} points"
                );
            }
            _ => {
                return Err(config_error(
                    "power needs exactly one of p_avg_db and sweep",
                ))
            }
        }

        let a = &self.allocation;
        match (a.method, a.rho) {
            (AllocationMethod::Manual, Some(rho)) => {
                require!((0.0..=1.0).contains(&rho), "rho {rho} outside [0, 1]")
            }
            (AllocationMethod::Manual, None) => {
                return Err(config_error("manual allocation needs rho"))
            }
            (_, Some(_)) => return Err(config_error("rho is only used with the manual method")),
            (_, None) => {}
        }
        require!(a.grid_points >= 3, "grid_points must be at least 3");
        require!(
            a.na_target_fer > 0.0 && a.na_target_fer < 1.0,
            "na_target_fer must lie in (0, 1)"
        );

        let d = &self.decoder;
        require!(d.list_size >= 1, "list_size must be at least 1");
        if d.crc_width > 0 {
            require!(d.kind == DecoderType::Scl, "a CRC needs the scl decoder");
            require!(
                (d.crc_width as usize) < k,
                "CRC width {} must be below k = {k}",
                d.crc_width
            );
        } else {
            require!(
                d.crc_polynomial.is_none(),
                "crc_polynomial given without crc_width"
            );
        }
        if let Some(crc) = self.crc()? {
            crc.validate().map_err(|e| config_error(e.to_string()))?;
        }

        let s = &self.sim;
        require!(
            s.max_frames >= 1 && s.target_frame_errors >= 1,
            "stop rule needs positive limits"
        );
        require!(
            !s.genie || d.kind == DecoderType::Sc,
            "genie mode needs the sc decoder"
        );
        Ok(())
    }

    pub fn crc(&self) -> Result<Option<CrcSpec>, CliError> {
        let d = &self.decoder;
        if d.crc_width == 0 {
            return Ok(None);
        }
        let default = CrcSpec::default();
        let polynomial = match d.crc_polynomial {
            Some(p) => p,
            None if d.crc_width == default.width => default.polynomial,
            None => {
                return Err(config_error(format!(
                    "crc_polynomial required for width {}",
                    d.crc_width
                )))
            }
        };
        Ok(Some(CrcSpec {
            width: d.crc_width,
            polynomial,
            ..default
        }))
    }

    pub fn decoder_config(&self) -> Result<DecoderConfig, CliError> {
        let crc = self.crc()?;
        let mut dec = match self.decoder.kind {
            DecoderType::Sc => DecoderConfig::sc(),
            DecoderType::Scl => DecoderConfig::scl(self.decoder.list_size, crc),
        };
        dec.check_node = self.decoder.check_node;
        Ok(dec)
    }

    pub fn stop_rule(&self) -> StopRule {
        StopRule {
            max_frames: self.sim.max_frames,
            target_frame_errors: self.sim.target_frame_errors,
        }
    }

    /// Average powers in dB, in increasing order.
    pub fn power_points(&self) -> Vec<f64> {
        match (self.power.p_avg_db, self.power.sweep) {
            (Some(db), _) => vec![db],
            (None, Some(s)) => {
                let count = ((s.stop_db - s.start_db) / s.step_db + 1e-9).floor() as usize + 1;
                (0..count)
                    .map(|i| s.start_db + i as f64 * s.step_db)
                    .collect()
            }
            (None, None) => Vec::new(),
        }
    }

    /// The single configured power; commands without sweep support use it.
    pub fn single_power_db(&self) -> Result<f64, CliError> {
        self.power
            .p_avg_db
            .ok_or_else(|| config_error("this command needs power.p_avg_db, not a sweep"))
    }
}
