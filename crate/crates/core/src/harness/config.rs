//! Experiment configuration and a small key=value config-file parser.
//!
//! Config files are flat `key = value` lines grouped under cosmetic
//! `[section]` headers. Section names are ignored; keys must be unique
//! across the whole file and mirror the `ExperimentConfig` field names.
//! Blank lines and `#` comments are allowed.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::recovery::Algorithm;
use crate::signal::{ParameterGrid, ParametricModel};

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SeparationSweep,
    DecaySweep,
    CompressionSweep,
    SnrSweep,
    Single,
}

impl ExperimentKind {
    /// Stable name used in CSV records and as the CLI subcommand.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SeparationSweep => "separation",
            ExperimentKind::DecaySweep => "decay",
            ExperimentKind::CompressionSweep => "compression",
            ExperimentKind::SnrSweep => "snr",
            ExperimentKind::Single => "single",
        }
    }

    /// Stable integer folded into per-trial seed derivation.
    pub fn id(self) -> u64 {
        match self {
            ExperimentKind::SeparationSweep => 1,
            ExperimentKind::DecaySweep => 2,
            ExperimentKind::CompressionSweep => 3,
            ExperimentKind::SnrSweep => 4,
            ExperimentKind::Single => 5,
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "separation" => Ok(ExperimentKind::SeparationSweep),
            "decay" => Ok(ExperimentKind::DecaySweep),
            "compression" => Ok(ExperimentKind::CompressionSweep),
            "snr" => Ok(ExperimentKind::SnrSweep),
            "single" => Ok(ExperimentKind::Single),
            other => Err(Error::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

/// Signal model family the experiment runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Chirp time-delay estimation.
    Tde,
    /// Complex-exponential frequency estimation.
    Fe,
}

impl ModelKind {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "tde" => Ok(ModelKind::Tde),
            "fe" => Ok(ModelKind::Fe),
            other => Err(Error::Config(format!("unknown model '{other}'"))),
        }
    }
}

/// Which variable the decay experiment sweeps along its axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayAxis {
    /// Chirp sweep bandwidth; axis values are frequencies in Hz.
    SweepRate,
    /// Coefficient dynamic range; axis values are r >= 1.
    DynamicRange,
    /// Proxy threshold; axis values are t in [0, 1).
    Threshold,
}

impl DecayAxis {
    pub fn name(self) -> &'static str {
        match self {
            DecayAxis::SweepRate => "fa",
            DecayAxis::DynamicRange => "r",
            DecayAxis::Threshold => "t",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "fa" => Ok(DecayAxis::SweepRate),
            "r" => Ok(DecayAxis::DynamicRange),
            "t" => Ok(DecayAxis::Threshold),
            other => Err(Error::Config(format!("unknown decay_axis '{other}'"))),
        }
    }
}

/// Full description of one experiment run. Field names double as config
/// file keys.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub model: ModelKind,
    /// Chirp sweep bandwidth in Hz; ignored by the frequency model and by
    /// the decay sweep-rate axis, which overrides it per axis point.
    pub f_sweep: f64,
    /// Record length of the frequency model; ignored by the chirp model.
    pub samples: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Grid step in model parameter units.
    pub delta: f64,
    /// Components per scene.
    pub k: usize,
    /// Trials per axis point (per bisection probe for the decay sweep).
    pub trials: usize,
    /// Master seed; every per-trial stream is derived from it.
    pub seed: u64,
    /// Estimators to run. The separation and decay sweeps ignore this and
    /// always run plain clustering on identity-operator proxies.
    pub algorithms: Vec<Algorithm>,
    /// Sweep axis values: separations, sweep rates / ranges / thresholds,
    /// compression rates, or SNR levels in dB, depending on the experiment.
    pub axis: Vec<f64>,
    pub decay_axis: DecayAxis,
    /// Scene minimum separation for the compression, SNR, and single
    /// experiments (the separation and decay sweeps derive it per point).
    pub zeta: f64,
    /// Scene distance to both grid edges.
    pub epsilon: f64,
    /// Proxy magnitude threshold.
    pub t: f64,
    /// Coherence band-exclusion level for the band-excluded estimator.
    pub nu: f64,
    /// Coefficient dynamic range; 1 means unit magnitudes, larger values
    /// draw log-uniform magnitudes spanning [1, r].
    pub r: f64,
    /// Compression rate for the SNR sweep and the single run.
    pub kappa: f64,
    /// Measurement SNR in dB for the single run; infinite means noiseless.
    pub snr_db: f64,
    /// Record wall-clock runtime per trial. Off by default so that repeated
    /// runs of one config produce byte-identical CSV output.
    pub timing: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "model",
    "f_sweep",
    "samples",
    "theta_min",
    "theta_max",
    "delta",
    "k",
    "trials",
    "seed",
    "algorithms",
    "axis",
    "decay_axis",
    "zeta",
    "epsilon",
    "t",
    "nu",
    "r",
    "kappa",
    "snr_db",
    "timing",
];

impl ExperimentConfig {
    /// Parses a config file. Missing keys fall back to defaults; `experiment`,
    /// `model`, and `delta` are always required, and each experiment checks
    /// its own requirements in `validate`.
    pub fn parse(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        for key in map.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown key '{key}'")));
            }
        }
        let experiment = ExperimentKind::parse(&require(&map, "experiment")?)?;
        let model = ModelKind::parse(&require(&map, "model")?)?;
        let (theta_max_default, epsilon_default) = match model {
            ModelKind::Tde => (10e-6, 1e-6),
            ModelKind::Fe => (500.0, 0.0),
        };
        let algorithms = match map.get("algorithms") {
            Some(raw) => parse_algorithms(raw)?,
            None => default_algorithms(experiment),
        };
        let cfg = Self {
            experiment,
            model,
            f_sweep: get_f64(&map, "f_sweep", 20e6)?,
            samples: get_usize(&map, "samples", 1000)?,
            theta_min: get_f64(&map, "theta_min", 0.0)?,
            theta_max: get_f64(&map, "theta_max", theta_max_default)?,
            delta: require(&map, "delta")?.parse().map_err(|_| bad_num("delta"))?,
            k: get_usize(&map, "k", 4)?,
            trials: get_usize(&map, "trials", 100)?,
            seed: get_u64(&map, "seed", 0)?,
            algorithms,
            axis: get_f64_list(&map, "axis")?,
            decay_axis: match map.get("decay_axis") {
                Some(raw) => DecayAxis::parse(raw)?,
                None => DecayAxis::SweepRate,
            },
            zeta: get_f64(&map, "zeta", 0.0)?,
            epsilon: get_f64(&map, "epsilon", epsilon_default)?,
            t: get_f64(&map, "t", 0.0)?,
            nu: get_f64(&map, "nu", 1.0)?,
            r: get_f64(&map, "r", 1.0)?,
            kappa: get_f64(&map, "kappa", 0.4)?,
            snr_db: get_f64(&map, "snr_db", f64::INFINITY)?,
            timing: get_bool(&map, "timing", false)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every invariant a run relies on.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::Config("delta must be positive and finite".into()));
        }
        if self.experiment != ExperimentKind::Single && self.axis.is_empty() {
            return Err(Error::Config("sweep axis must be nonempty".into()));
        }
        if !self.axis.iter().all(|v| v.is_finite()) && self.experiment != ExperimentKind::SnrSweep {
            return Err(Error::Config("axis values must be finite".into()));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(Error::Config("t must be finite and nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(Error::Config("nu must lie in [0, 1]".into()));
        }
        if !(self.r >= 1.0) || !self.r.is_finite() {
            return Err(Error::Config("r must be finite and at least 1".into()));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config("epsilon must be finite and nonnegative".into()));
        }
        if self.model == ModelKind::Tde && !(self.f_sweep > 0.0) {
            return Err(Error::Config("f_sweep must be positive".into()));
        }
        if self.model == ModelKind::Fe && self.samples < 2 {
            return Err(Error::Config("samples must be at least 2".into()));
        }
        match self.experiment {
            ExperimentKind::SeparationSweep => {
                if self.axis.iter().any(|&z| z <= 0.0) {
                    return Err(Error::Config("separations must be positive".into()));
                }
            }
            ExperimentKind::DecaySweep => {
                if self.model != ModelKind::Tde {
                    return Err(Error::Config("decay sweep requires the tde model".into()));
                }
                if self.k < 2 {
                    return Err(Error::Config(
                        "decay sweep needs k >= 2 so separation binds".into(),
                    ));
                }
                let ok = match self.decay_axis {
                    DecayAxis::SweepRate => self.axis.iter().all(|&v| v > 0.0),
                    DecayAxis::DynamicRange => self.axis.iter().all(|&v| v >= 1.0),
                    DecayAxis::Threshold => self.axis.iter().all(|&v| (0.0..1.0).contains(&v)),
                };
                if !ok {
                    return Err(Error::Config(format!(
                        "axis values out of range for decay_axis {}",
                        self.decay_axis.name()
                    )));
                }
            }
            ExperimentKind::CompressionSweep => {
                self.check_recovery_algorithms(false)?;
                self.check_fixed_zeta()?;
                if self.axis.iter().any(|&v| !(0.0 < v && v <= 1.0)) {
                    return Err(Error::Config("compression rates must lie in (0, 1]".into()));
                }
            }
            ExperimentKind::SnrSweep => {
                self.check_recovery_algorithms(false)?;
                self.check_fixed_zeta()?;
                self.check_kappa()?;
            }
            ExperimentKind::Single => {
                self.check_recovery_algorithms(true)?;
                self.check_fixed_zeta()?;
                self.check_kappa()?;
            }
        }
        Ok(())
    }

    fn check_recovery_algorithms(&self, allow_clustering: bool) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("algorithm list must be nonempty".into()));
        }
        for &alg in &self.algorithms {
            let ok = matches!(alg, Algorithm::Csp | Algorithm::Bsp)
                || (allow_clustering && alg == Algorithm::KMedianOnly);
            if !ok {
                return Err(Error::Config(format!(
                    "algorithm {} not allowed for experiment {}",
                    algorithm_name(alg),
                    self.experiment.name()
                )));
            }
        }
        Ok(())
    }

    fn check_fixed_zeta(&self) -> Result<()> {
        if !(self.zeta > 0.0) || !self.zeta.is_finite() {
            return Err(Error::Config("zeta must be positive for this experiment".into()));
        }
        Ok(())
    }

    fn check_kappa(&self) -> Result<()> {
        if !(0.0 < self.kappa && self.kappa <= 1.0) {
            return Err(Error::Config("kappa must lie in (0, 1]".into()));
        }
        Ok(())
    }

    /// Model instance for this config; the decay sweep passes an override
    /// when it walks the sweep-rate axis.
    pub fn build_model(&self, f_sweep_override: Option<f64>) -> ParametricModel {
        match self.model {
            ModelKind::Tde => {
                ParametricModel::chirp_tde_with_sweep(f_sweep_override.unwrap_or(self.f_sweep))
            }
            ModelKind::Fe => ParametricModel::ComplexExpFe { samples: self.samples },
        }
    }

    /// Parameter grid for this config.
    pub fn build_grid(&self) -> Result<ParameterGrid> {
        ParameterGrid::new(self.theta_min, self.theta_max, self.delta)
    }
}

/// Display name of an estimator as it appears in records and config files.
pub fn algorithm_name(alg: Algorithm) -> &'static str {
    match alg {
        Algorithm::Csp => "csp",
        Algorithm::Bsp => "bsp",
        Algorithm::KMedianOnly => "kmedian",
        Algorithm::ThresholdOnly => "threshold",
    }
}

fn default_algorithms(experiment: ExperimentKind) -> Vec<Algorithm> {
    match experiment {
        ExperimentKind::SeparationSweep | ExperimentKind::DecaySweep => {
            vec![Algorithm::KMedianOnly]
        }
        ExperimentKind::CompressionSweep | ExperimentKind::SnrSweep => {
            vec![Algorithm::Csp, Algorithm::Bsp]
        }
        ExperimentKind::Single => vec![Algorithm::Csp],
    }
}

fn parse_algorithms(raw: &str) -> Result<Vec<Algorithm>> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let name = part.trim();
        if name.is_empty() {
            continue;
        }
        let alg = match name {
            "csp" => Algorithm::Csp,
            "bsp" => Algorithm::Bsp,
            "kmedian" => Algorithm::KMedianOnly,
            other => return Err(Error::Config(format!("unknown algorithm '{other}'"))),
        };
        if out.contains(&alg) {
            return Err(Error::Config(format!("algorithm '{name}' listed twice")));
        }
        out.push(alg);
    }
    if out.is_empty() {
        return Err(Error::Config("algorithm list must be nonempty".into()));
    }
    Ok(out)
}

fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(Error::Config(format!(
                    "line {}: malformed section header",
                    lineno + 1
                )));
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected 'key = value'",
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!("duplicate key '{key}'")));
        }
    }
    Ok(map)
}

fn require(map: &BTreeMap<String, String>, key: &str) -> Result<String> {
    map.get(key)
        .cloned()
        .ok_or_else(|| Error::Config(format!("missing required key '{key}'")))
}

fn bad_num(key: &str) -> Error {
    Error::Config(format!("key '{key}' is not a valid number"))
}

fn get_f64(map: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64> {
    match map.get(key) {
        Some(raw) => raw.parse().map_err(|_| bad_num(key)),
        None => Ok(default),
    }
}

fn get_usize(map: &BTreeMap<String, String>, key: &str, default: usize) -> Result<usize> {
    match map.get(key) {
        Some(raw) => raw.parse().map_err(|_| bad_num(key)),
        None => Ok(default),
    }
}

fn get_u64(map: &BTreeMap<String, String>, key: &str, default: u64) -> Result<u64> {
    match map.get(key) {
        Some(raw) => raw.parse().map_err(|_| bad_num(key)),
        None => Ok(default),
    }
}

fn get_bool(map: &BTreeMap<String, String>, key: &str, default: bool) -> Result<bool> {
    match map.get(key) {
        Some(raw) => match raw.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(Error::Config(format!("key '{key}' must be true or false"))),
        },
        None => Ok(default),
    }
}

fn get_f64_list(map: &BTreeMap<String, String>, key: &str) -> Result<Vec<f64>> {
    let Some(raw) = map.get(key) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(part.parse().map_err(|_| bad_num(key))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEPARATION_CFG: &str = "
        [experiment]
        experiment = separation
        model = tde
        trials = 10
        seed = 7

        [grid]
        delta = 0.005e-6  # desk-scale step

        [sweep]
        axis = 0.07e-6, 0.08e-6, 0.09e-6, 0.1e-6
    ";

    #[test]
    fn a_minimal_file_parses_with_defaults() {
        let cfg = ExperimentConfig::parse(SEPARATION_CFG).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::SeparationSweep);
        assert_eq!(cfg.model, ModelKind::Tde);
        assert_eq!(cfg.trials, 10);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.axis.len(), 4);
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.theta_max, 10e-6);
        assert_eq!(cfg.epsilon, 1e-6);
        assert_eq!(cfg.algorithms, vec![Algorithm::KMedianOnly]);
        assert!(!cfg.timing);
        let grid = cfg.build_grid().unwrap();
        assert_eq!(grid.len(), 2001);
    }

    #[test]
    fn frequency_model_defaults_differ() {
        let text = "
            experiment = compression
            model = fe
            delta = 0.5
            zeta = 5.0
            axis = 0.4, 0.7, 1.0
            t = 0.4
            nu = 0.2
        ";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.theta_max, 500.0);
        assert_eq!(cfg.epsilon, 0.0);
        assert_eq!(cfg.samples, 1000);
        assert_eq!(cfg.algorithms, vec![Algorithm::Csp, Algorithm::Bsp]);
    }

    #[test]
    fn unknown_keys_and_malformed_lines_are_rejected() {
        let bad_key = "experiment = separation\nmodel = tde\ndelta = 1.0\naxis = 1.0\nbogus = 3";
        assert!(matches!(
            ExperimentConfig::parse(bad_key),
            Err(Error::Config(msg)) if msg.contains("bogus")
        ));
        let bad_line = "experiment separation";
        assert!(ExperimentConfig::parse(bad_line).is_err());
        let dup = "experiment = separation\nexperiment = decay";
        assert!(matches!(
            ExperimentConfig::parse(dup),
            Err(Error::Config(msg)) if msg.contains("duplicate")
        ));
    }

    #[test]
    fn experiment_specific_validation_fires() {
        let decay_fe = "
            experiment = decay
            model = fe
            delta = 0.5
            axis = 2e6
        ";
        assert!(ExperimentConfig::parse(decay_fe).is_err());

        let no_zeta = "
            experiment = compression
            model = tde
            delta = 0.02e-6
            axis = 0.4
        ";
        assert!(ExperimentConfig::parse(no_zeta).is_err());

        let bad_alg = "
            experiment = compression
            model = tde
            delta = 0.02e-6
            zeta = 0.2e-6
            axis = 0.4
            algorithms = csp, kmedian
        ";
        assert!(ExperimentConfig::parse(bad_alg).is_err());

        let empty_axis = "
            experiment = separation
            model = tde
            delta = 0.02e-6
        ";
        assert!(matches!(
            ExperimentConfig::parse(empty_axis),
            Err(Error::Config(msg)) if msg.contains("axis")
        ));
    }

    #[test]
    fn decay_axes_parse_and_validate() {
        let base = "
            experiment = decay
            model = tde
            delta = 0.02e-6
            k = 2
        ";
        let fa = format!("{base}\naxis = 2e6, 6e6, 14e6");
        let cfg = ExperimentConfig::parse(&fa).unwrap();
        assert_eq!(cfg.decay_axis, DecayAxis::SweepRate);

        let r = format!("{base}\ndecay_axis = r\naxis = 1, 2, 4, 8\nt = 0.9\nf_sweep = 10e6");
        let cfg = ExperimentConfig::parse(&r).unwrap();
        assert_eq!(cfg.decay_axis, DecayAxis::DynamicRange);

        let bad_t = format!("{base}\ndecay_axis = t\naxis = 0.5, 1.5");
        assert!(ExperimentConfig::parse(&bad_t).is_err());
    }
}
