//! Experiment configuration: per-kind defaults, a flat `key = value` file
//! format, and CLI overrides applied on top.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use modrec_core::recovery::{IstaInit, DEFAULT_HOD_ORDER, MAX_HOD_ORDER};
use modrec_core::IstaConfig;

use crate::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    SnrSweep,
    OfSweep,
    Grid,
    OnebitCompare,
    BoundTable,
    Timing,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::SnrSweep,
        ExperimentKind::OfSweep,
        ExperimentKind::Grid,
        ExperimentKind::OnebitCompare,
        ExperimentKind::BoundTable,
        ExperimentKind::Timing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::SnrSweep => "snr_sweep",
            ExperimentKind::OfSweep => "of_sweep",
            ExperimentKind::Grid => "grid",
            ExperimentKind::OnebitCompare => "onebit_compare",
            ExperimentKind::BoundTable => "bound_table",
            ExperimentKind::Timing => "timing",
        }
    }

    /// Sweeps draw many cheap trials; grids fewer per cell.
    fn is_sweep(self) -> bool {
        matches!(self, ExperimentKind::SnrSweep | ExperimentKind::OfSweep)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ConfigError::new(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    LassoB2r2,
    LsOnebit,
    Hod,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::LassoB2r2 => "lasso_b2r2",
            Algorithm::LsOnebit => "ls_onebit",
            Algorithm::Hod => "hod",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Algorithm::LassoB2r2, Algorithm::LsOnebit, Algorithm::Hod]
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| ConfigError::new(format!("unknown algorithm `{s}`")))
    }
}

pub const DESK_SWEEP_TRIALS: usize = 25;
pub const DESK_GRID_TRIALS: usize = 20;
pub const PAPER_SWEEP_TRIALS: usize = 250;
pub const PAPER_GRID_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub lambdas: Vec<f64>,
    pub ofs: Vec<f64>,
    /// `f64::INFINITY` is the noiseless case.
    pub snrs_db: Vec<f64>,
    /// ADC word length; `None` leaves samples unquantized.
    pub bits: Option<u32>,
    pub trials: usize,
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub ista: IstaConfig,
    pub hod_order: usize,
    pub dilation: usize,
    pub envelope_width: f64,
    /// Signal peak used by `bound_table`.
    pub peak: f64,
    pub out: Option<PathBuf>,
}

const GRID_LAMBDAS: [f64; 5] = [0.15, 0.2, 0.25, 0.3, 0.4];
const GRID_OFS: [f64; 6] = [1.5, 2.0, 2.5, 3.0, 3.5, 4.0];

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind, paper_scale: bool) -> Self {
        use Algorithm::*;
        let trials = match (kind.is_sweep(), paper_scale) {
            (true, false) => DESK_SWEEP_TRIALS,
            (true, true) => PAPER_SWEEP_TRIALS,
            (false, false) => DESK_GRID_TRIALS,
            (false, true) => PAPER_GRID_TRIALS,
        };
        let base = Self {
            kind,
            n: 1024,
            lambdas: vec![0.25],
            ofs: vec![6.0],
            snrs_db: vec![f64::INFINITY],
            bits: None,
            trials,
            base_seed: 0,
            algorithms: vec![LassoB2r2],
            ista: IstaConfig::default(),
            hod_order: DEFAULT_HOD_ORDER,
            dilation: 0,
            envelope_width: 0.5,
            peak: 1.0,
            out: None,
        };
        match kind {
            ExperimentKind::SnrSweep => Self {
                snrs_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
                algorithms: vec![LassoB2r2, Hod],
                ..base
            },
            ExperimentKind::OfSweep => Self {
                ofs: (1..=11).map(|i| 2.0 * f64::from(i)).collect(),
                snrs_db: vec![5.0, 10.0],
                algorithms: vec![LassoB2r2, Hod],
                ..base
            },
            ExperimentKind::Grid | ExperimentKind::Timing => Self {
                lambdas: GRID_LAMBDAS.to_vec(),
                ofs: GRID_OFS.to_vec(),
                bits: Some(6),
                algorithms: vec![LassoB2r2, LsOnebit],
                ..base
            },
            ExperimentKind::OnebitCompare => Self {
                lambdas: vec![0.2],
                ofs: vec![3.0],
                bits: Some(6),
                algorithms: vec![LassoB2r2, LsOnebit],
                ..base
            },
            ExperimentKind::BoundTable => Self {
                lambdas: vec![0.75, 0.5, 0.25, 0.05],
                ofs: vec![4.0, 6.0, 8.0],
                algorithms: Vec::new(),
                ..base
            },
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "experiment" => {
                let kind: ExperimentKind = value.parse()?;
                if kind != self.kind {
                    return Err(ConfigError::new(format!(
                        "config is for `{kind}` but the experiment is `{}`",
                        self.kind
                    )));
                }
            }
            "n" => self.n = scalar(key, value)?,
            "lambda" => self.lambdas = list(key, value)?,
            "of" => self.ofs = list(key, value)?,
            "snr_db" => self.snrs_db = list(key, value)?,
            "bits" => {
                self.bits = match value {
                    "none" | "unquantized" => None,
                    v => Some(scalar(key, v)?),
                }
            }
            "trials" => self.trials = scalar(key, value)?,
            "seed" | "base_seed" => self.base_seed = scalar(key, value)?,
            "algorithms" | "algorithm" => self.algorithms = list(key, value)?,
            "gamma_scale" => self.ista.gamma_scale = scalar(key, value)?,
            "gamma" => self.ista.gamma = Some(scalar(key, value)?),
            "tau" => self.ista.tau = Some(scalar(key, value)?),
            "max_iterations" => self.ista.max_iterations = scalar(key, value)?,
            "tolerance" => self.ista.tolerance = scalar(key, value)?,
            "ista_init" => {
                self.ista.init = match value {
                    "zero" => IstaInit::Zero,
                    "normal" => IstaInit::Normal,
                    other => return Err(ConfigError::new(format!("ista_init must be zero or normal, got `{other}`"))),
                }
            }
            "hod_order" => self.hod_order = scalar(key, value)?,
            "dilation" => self.dilation = scalar(key, value)?,
            "envelope_width" => self.envelope_width = scalar(key, value)?,
            "peak" => self.peak = scalar(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(ConfigError::new(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::new(msg));
        if self.n < modrec_core::signal::MIN_SIGNAL_LEN {
            return fail(format!("n must be at least {}, got {}", modrec_core::signal::MIN_SIGNAL_LEN, self.n));
        }
        if self.lambdas.is_empty() || self.ofs.is_empty() || self.snrs_db.is_empty() {
            return fail("lambda, of and snr_db lists must be non-empty".into());
        }
        if let Some(l) = self.lambdas.iter().find(|&&l| !(l.is_finite() && l > 0.0)) {
            return fail(format!("lambda must be > 0, got {l}"));
        }
        if let Some(of) = self.ofs.iter().find(|&&of| !(of.is_finite() && of > 1.0)) {
            return fail(format!("of must be > 1, got {of}"));
        }
        if let Some(s) = self.snrs_db.iter().find(|&&s| s.is_nan() || s == f64::NEG_INFINITY) {
            return fail(format!("snr_db must be finite or inf, got {s}"));
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.kind != ExperimentKind::BoundTable && self.algorithms.is_empty() {
            return fail("at least one algorithm is required".into());
        }
        if let Some(b) = self.bits {
            if !(1..=modrec_core::modulo::MAX_BITS).contains(&b) {
                return fail(format!("bits must lie in 1..={}, got {b}", modrec_core::modulo::MAX_BITS));
            }
            if b < 2 && self.algorithms.contains(&Algorithm::LsOnebit) {
                return fail("ls_onebit needs bits >= 2 to reserve the folding flag".into());
            }
        }
        if !(1..=MAX_HOD_ORDER).contains(&self.hod_order) {
            return fail(format!("hod_order must lie in 1..={MAX_HOD_ORDER}, got {}", self.hod_order));
        }
        if !(self.envelope_width > 0.0 && self.envelope_width <= 1.0) {
            return fail(format!("envelope_width must lie in (0, 1], got {}", self.envelope_width));
        }
        if !(self.peak.is_finite() && self.peak >= 0.0) {
            return fail(format!("peak must be finite and >= 0, got {}", self.peak));
        }
        self.ista.validate().map_err(|e| ConfigError::new(e.to_string()))
    }

    /// Defaults for `kind`, then the config file, then CLI overrides.
    pub fn load(
        kind: Option<ExperimentKind>,
        file_text: Option<&str>,
        overrides: &[(String, String)],
        paper_scale: bool,
    ) -> Result<Self, ConfigError> {
        let entries = match file_text {
            Some(text) => parse_entries(text)?,
            None => Vec::new(),
        };
        let from_file = entries
            .iter()
            .find(|(k, _)| k == "experiment")
            .map(|(_, v)| v.parse::<ExperimentKind>())
            .transpose()?;
        let kind = kind
            .or(from_file)
            .ok_or_else(|| ConfigError::new("no experiment kind given (use --experiment or `experiment =`)"))?;
        let mut cfg = Self::defaults(kind, paper_scale);
        for (k, v) in entries.iter().chain(overrides) {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn scalar<V: FromStr>(key: &str, value: &str) -> Result<V, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError::new(format!("invalid value `{value}` for `{key}`")))
}

fn list<V: FromStr>(key: &str, value: &str) -> Result<Vec<V>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| scalar(key, s))
        .collect()
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::new(format!("line {}: expected `key = value`", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::new(format!("line {}: empty key", i + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.as_str().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
        assert_eq!("ls_onebit".parse::<Algorithm>().unwrap(), Algorithm::LsOnebit);
    }

    #[test]
    fn defaults_follow_scale() {
        assert_eq!(ExperimentConfig::defaults(ExperimentKind::SnrSweep, false).trials, 25);
        assert_eq!(ExperimentConfig::defaults(ExperimentKind::SnrSweep, true).trials, 250);
        assert_eq!(ExperimentConfig::defaults(ExperimentKind::Grid, false).trials, 20);
        assert_eq!(ExperimentConfig::defaults(ExperimentKind::Timing, true).trials, 100);
        let of = ExperimentConfig::defaults(ExperimentKind::OfSweep, false);
        assert_eq!(of.ofs.first(), Some(&2.0));
        assert_eq!(of.ofs.last(), Some(&22.0));
        for k in ExperimentKind::ALL {
            ExperimentConfig::defaults(k, false).validate().unwrap();
        }
    }

    #[test]
    fn file_then_overrides() {
        let text = "# comment\nexperiment = grid\nlambda = 0.2, 0.3\nof=2,3 # trailing\ntrials = 4\nbits = none\n";
        let cfg = ExperimentConfig::load(None, Some(text), &[("trials".into(), "2".into())], true).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Grid);
        assert_eq!(cfg.lambdas, vec![0.2, 0.3]);
        assert_eq!(cfg.ofs, vec![2.0, 3.0]);
        assert_eq!(cfg.trials, 2);
        assert_eq!(cfg.bits, None);
        let cfg = ExperimentConfig::load(Some(ExperimentKind::SnrSweep), Some("snr_db = 5, inf"), &[], false).unwrap();
        assert_eq!(cfg.snrs_db, vec![5.0, f64::INFINITY]);
    }

    #[test]
    fn bad_configs_rejected() {
        let cases = [
            "lambda = 0",
            "of = 1.0",
            "trials = 0",
            "bogus = 1",
            "lambda",
            "algorithms = lasso, nope",
            "bits = 1",
            "hod_order = 9",
            "snr_db = -inf",
            "experiment = timing",
            "n = abc",
            "gamma_scale = -1",
        ];
        for text in cases {
            assert!(ExperimentConfig::load(Some(ExperimentKind::Grid), Some(text), &[], false).is_err(), "{text}");
        }
        assert!(ExperimentConfig::load(None, None, &[], false).is_err());
    }
}
