//! Run configuration and the small parsers behind the command-line flags.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use roi_core::states::CanonicalState;
use roi_core::{PolKet, C64};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Macrorealistic,
    Retrieving,
    NoRetrieving,
    Table,
    BlwScan,
    JmCheck,
    Corr,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Macrorealistic,
        Scenario::Retrieving,
        Scenario::NoRetrieving,
        Scenario::Table,
        Scenario::BlwScan,
        Scenario::JmCheck,
        Scenario::Corr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Macrorealistic => "macrorealistic",
            Scenario::Retrieving => "retrieving",
            Scenario::NoRetrieving => "no-retrieving",
            Scenario::Table => "table",
            Scenario::BlwScan => "blw-scan",
            Scenario::JmCheck => "jm-check",
            Scenario::Corr => "corr",
        }
    }

    /// Angles used when none are given.
    pub fn default_gammas(self) -> Vec<f64> {
        match self {
            Scenario::Macrorealistic | Scenario::Table => vec![0.0, PI / 8.0, PI / 4.0],
            _ => vec![PI / 8.0],
        }
    }
}

impl FromStr for Scenario {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('_', "-").to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|sc| sc.name() == norm)
            .ok_or_else(|| LabError::Config(format!("unknown scenario {s:?}")))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(LabError::Config(format!("unknown format {s:?}, expected csv or json"))),
        }
    }
}

/// A named canonical state or a user-supplied ket.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Named(CanonicalState),
    Custom(PolKet),
}

impl StateSpec {
    pub fn ket(&self) -> PolKet {
        match self {
            StateSpec::Named(s) => s.ket(),
            StateSpec::Custom(k) => *k,
        }
    }

    pub fn name(&self) -> String {
        match self {
            StateSpec::Named(s) => s.name().to_string(),
            StateSpec::Custom(k) => format!(
                "({}{:+}i)H+({}{:+}i)V",
                k.h.re, k.h.im, k.v.re, k.v.im
            ),
        }
    }

    pub fn experiment() -> Vec<StateSpec> {
        CanonicalState::EXPERIMENT.into_iter().map(StateSpec::Named).collect()
    }
}

impl FromStr for StateSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        CanonicalState::from_name(s)
            .map(StateSpec::Named)
            .ok_or_else(|| {
                LabError::Config(format!(
                    "unknown state {s:?}; expected one of H, V, plus, minus, psi-minus, psi-plus"
                ))
            })
    }
}

/// Parses `re,im,re,im` into a normalised ket.
pub fn parse_alpha_beta(s: &str) -> Result<StateSpec> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| LabError::Config(format!("--alpha-beta {s:?}: {e}")))?;
    let [ar, ai, br, bi] = parts[..] else {
        return Err(LabError::Config(format!(
            "--alpha-beta expects four numbers re,im,re,im, got {}",
            parts.len()
        )));
    };
    let ket = PolKet::new(C64::new(ar, ai), C64::new(br, bi))
        .map_err(|e| LabError::Config(format!("--alpha-beta {s:?}: {e}")))?;
    Ok(StateSpec::Custom(ket))
}

/// Angle in radians, either a number or `[k]pi[/n]` such as `pi/8`, `3pi/16`, `0.5*pi`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return finite(s, v);
    }
    let bad = || LabError::Config(format!("cannot parse angle {s:?}"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coeff = num.strip_suffix("pi").ok_or_else(bad)?;
    let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
    let k = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    finite(s, k * PI / den)
}

fn finite(s: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(LabError::Config(format!("angle {s:?} is not finite")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub gammas: Vec<f64>,
    pub states: Vec<StateSpec>,
    pub shots: Option<u64>,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// Grid size for `blw-scan`.
    pub points: usize,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            gammas: scenario.default_gammas(),
            states: StateSpec::experiment(),
            shots: None,
            seed: 0,
            format: Format::Csv,
            output: None,
            points: 101,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == Some(0) {
            return Err(LabError::Config("--shots must be at least 1".into()));
        }
        if self.gammas.is_empty() {
            return Err(LabError::Config("no angles configured".into()));
        }
        for &g in &self.gammas {
            if !(0.0..=PI / 4.0 + 1e-15).contains(&g) {
                return Err(LabError::Config(format!("gamma {g} outside [0, pi/4]")));
            }
        }
        if self.states.is_empty() {
            return Err(LabError::Config("no input states configured".into()));
        }
        for s in &self.states {
            let n = s.ket().norm_sqr();
            if (n - 1.0).abs() > 1e-12 {
                return Err(LabError::Config(format!("state {} has squared norm {n}", s.name())));
            }
        }
        if self.scenario == Scenario::BlwScan && self.points < 3 {
            return Err(LabError::Config("blw-scan needs at least 3 grid points".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/8").unwrap(), PI / 8.0);
        assert_eq!(parse_angle("3pi/16").unwrap(), 3.0 * PI / 16.0);
        assert_eq!(parse_angle("0.25*pi").unwrap(), 0.25 * PI);
        assert_eq!(parse_angle("0.3").unwrap(), 0.3);
        assert_eq!(parse_angle(" PI / 4 ").unwrap(), PI / 4.0);
        assert!(parse_angle("tau/2").is_err());
        assert!(parse_angle("pi/0").is_err());
    }

    #[test]
    fn states() {
        assert_eq!(
            "psi-minus".parse::<StateSpec>().unwrap(),
            StateSpec::Named(CanonicalState::PsiMinus)
        );
        assert!("diagonal".parse::<StateSpec>().is_err());
        let s = parse_alpha_beta("0.6,0,0,0.8").unwrap();
        assert!((s.ket().v.im - 0.8).abs() < 1e-15);
        assert!(parse_alpha_beta("1,0,1,0").is_err());
        assert!(parse_alpha_beta("1,0").is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = ScenarioConfig::new(Scenario::Table);
        assert!(cfg.validate().is_ok());
        cfg.shots = Some(0);
        assert!(cfg.validate().is_err());
        cfg.shots = None;
        cfg.gammas = vec![1.0];
        assert!(cfg.validate().is_err());
        assert_eq!("no_retrieving".parse::<Scenario>().unwrap(), Scenario::NoRetrieving);
    }
}
