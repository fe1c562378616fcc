//! JSON experiment configuration and grid expansion.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use krr_core::analysis::method_label;
use krr_core::problems::{blur2d, phillips, shaw, ProblemInstance, DEFAULT_BAND, DEFAULT_SIGMA};
use krr_core::solvers::BasisKind;
use serde::{Deserialize, Serialize};

use crate::error::{config, io_error, CliError, Result};

pub const DEFAULT_ETA: f64 = 1.01;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_OUTPUT_DIR: &str = "krr-output";
/// Environment variable that overrides the configured output directory.
pub const OUTPUT_ENV: &str = "KRR_OUT";

const MAX_DENSE_N: usize = 4096;
const MAX_IMAGE_SIDE: usize = 512;
const MAX_ITER_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    /// `phillips`, `shaw` or `blur2d`.
    pub name: String,
    /// Grid size for the 1D problems, image side for `blur2d`.
    pub n: usize,
    /// PSF half-bandwidth (`blur2d` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<usize>,
    /// PSF width (`blur2d` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemKind {
    Phillips,
    Shaw,
    Blur2d { band: usize, sigma: f64 },
}

impl ProblemSpec {
    pub fn phillips(n: usize) -> Self {
        Self {
            name: "phillips".into(),
            n,
            band: None,
            sigma: None,
        }
    }

    pub fn kind(&self) -> Result<ProblemKind> {
        let one_d = |kind| {
            if self.band.is_some() || self.sigma.is_some() {
                return Err(config(format!(
                    "band and sigma only apply to blur2d, not {}",
                    self.name
                )));
            }
            if !(8..=MAX_DENSE_N).contains(&self.n) {
                return Err(config(format!(
                    "{} needs n in 8..={MAX_DENSE_N}, got {}",
                    self.name, self.n
                )));
            }
            Ok(kind)
        };
        match self.name.as_str() {
            "phillips" => one_d(ProblemKind::Phillips),
            "shaw" => one_d(ProblemKind::Shaw),
            "blur2d" => {
                let band = self.band.unwrap_or(DEFAULT_BAND.min(self.n));
                let sigma = self.sigma.unwrap_or(DEFAULT_SIGMA);
                if !(8..=MAX_IMAGE_SIDE).contains(&self.n) {
                    return Err(config(format!(
                        "blur2d needs n in 8..={MAX_IMAGE_SIDE}, got {}",
                        self.n
                    )));
                }
                if band == 0 || band > self.n {
                    return Err(config(format!(
                        "blur2d band must be in 1..={}, got {band}",
                        self.n
                    )));
                }
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(config(format!(
                        "blur2d sigma must be positive, got {sigma}"
                    )));
                }
                Ok(ProblemKind::Blur2d { band, sigma })
            }
            other => Err(CliError::UnknownProblem(other.to_string())),
        }
    }

    pub fn build(&self) -> Result<ProblemInstance> {
        Ok(match self.kind()? {
            ProblemKind::Phillips => phillips(self.n)?,
            ProblemKind::Shaw => shaw(self.n)?,
            ProblemKind::Blur2d { band, sigma } => blur2d(self.n, band, sigma)?,
        })
    }
}

/// A solver entry. `shifts` lists the ℓ values to run; it defaults to `[0]`
/// for gmres/qmr and `[1]` for rrgmres/rrqmr and must stay empty for tsvd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shifts: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Krylov(BasisKind),
    Tsvd,
}

impl SolverSpec {
    pub fn new(name: &str, shifts: &[usize]) -> Self {
        Self {
            name: name.into(),
            shifts: shifts.to_vec(),
        }
    }

    /// `(method, ℓ)` pairs this entry expands to.
    pub fn resolve(&self) -> Result<Vec<(Method, usize)>> {
        let (method, default_shift, min_shift) = match self.name.as_str() {
            "gmres" => (Method::Krylov(BasisKind::Arnoldi), 0, 0),
            "qmr" => (Method::Krylov(BasisKind::BiLanczos), 0, 0),
            "rrgmres" => (Method::Krylov(BasisKind::Arnoldi), 1, 1),
            "rrqmr" => (Method::Krylov(BasisKind::BiLanczos), 1, 1),
            "tsvd" => {
                if !self.shifts.is_empty() {
                    return Err(config("tsvd takes no shifts"));
                }
                return Ok(vec![(Method::Tsvd, 0)]);
            }
            other => return Err(CliError::UnknownSolver(other.to_string())),
        };
        if self.shifts.is_empty() {
            return Ok(vec![(method, default_shift)]);
        }
        self.shifts
            .iter()
            .map(|&s| {
                if s < min_shift {
                    Err(config(format!("{} needs shifts >= {min_shift}", self.name)))
                } else if s > 16 {
                    Err(config(format!("shift {s} is larger than the supported 16")))
                } else {
                    Ok((method, s))
                }
            })
            .collect()
    }
}

pub fn solver_label(method: Method, shift: usize) -> String {
    match method {
        Method::Krylov(basis) => method_label(basis, shift),
        Method::Tsvd => "tsvd".into(),
    }
}

/// One cell of the experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub method: Method,
    pub shift: usize,
    pub noise_percent: f64,
    pub assumed_noise_percent: f64,
    pub seed: u64,
}

impl GridPoint {
    pub fn label(&self) -> String {
        solver_label(self.method, self.shift)
    }

    /// File-name friendly identifier, unique within a grid.
    pub fn id(&self) -> String {
        format!(
            "{}_l{}_v{}_s{}",
            self.label(),
            self.shift,
            self.noise_percent,
            self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub solvers: Vec<SolverSpec>,
    pub noise_levels_percent: Vec<f64>,
    /// Noise levels fed to the discrepancy principle, paired by position
    /// with `noise_levels_percent`. Defaults to the actual levels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assumed_noise_levels_percent: Option<Vec<f64>>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_eta() -> f64 {
    DEFAULT_ETA
}

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(DEFAULT_OUTPUT_DIR)
}

impl ExperimentConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error("read", path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Replaces `output_dir` with the value of `KRR_OUT` when it is set and
    /// non-empty.
    pub fn apply_output_override(&mut self, value: Option<OsString>) {
        if let Some(v) = value.filter(|v| !v.is_empty()) {
            self.output_dir = PathBuf::from(v);
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.kind()?;
        if self.solvers.is_empty() {
            return Err(config("solver list is empty"));
        }
        if self.seeds.is_empty() {
            return Err(config("seed list is empty"));
        }
        if self.noise_levels_percent.is_empty() {
            return Err(config("noise level list is empty"));
        }
        if !(self.eta > 1.0 && self.eta.is_finite()) {
            return Err(config(format!("eta must be > 1, got {}", self.eta)));
        }
        if !(1..=MAX_ITER_CAP).contains(&self.max_iter) {
            return Err(config(format!(
                "max_iter must be in 1..={MAX_ITER_CAP}, got {}",
                self.max_iter
            )));
        }
        check_levels("noise_levels_percent", &self.noise_levels_percent)?;
        if let Some(assumed) = &self.assumed_noise_levels_percent {
            check_levels("assumed_noise_levels_percent", assumed)?;
            if assumed.len() != self.noise_levels_percent.len() {
                return Err(config(format!(
                    "assumed_noise_levels_percent has {} entries, noise_levels_percent has {}",
                    assumed.len(),
                    self.noise_levels_percent.len()
                )));
            }
        }
        let mut levels = HashSet::new();
        if !self
            .noise_levels_percent
            .iter()
            .all(|v| levels.insert(v.to_bits()))
        {
            return Err(config("duplicate noise level"));
        }
        let mut seeds = HashSet::new();
        if !self.seeds.iter().all(|s| seeds.insert(*s)) {
            return Err(config("duplicate seed"));
        }
        let mut solvers = HashSet::new();
        for spec in &self.solvers {
            for (method, shift) in spec.resolve()? {
                if !solvers.insert((method, shift)) {
                    return Err(config(format!(
                        "solver {} with shift {shift} listed twice",
                        solver_label(method, shift)
                    )));
                }
            }
        }
        Ok(())
    }

    /// `(actual, assumed)` noise pairs in configuration order.
    pub fn noise_pairs(&self) -> Vec<(f64, f64)> {
        let assumed = self
            .assumed_noise_levels_percent
            .as_ref()
            .unwrap_or(&self.noise_levels_percent);
        self.noise_levels_percent
            .iter()
            .copied()
            .zip(assumed.iter().copied())
            .collect()
    }

    /// Expands the grid: solvers (in listed order, then by shift), then noise
    /// levels, then seeds.
    pub fn grid(&self) -> Result<Vec<GridPoint>> {
        self.validate()?;
        let mut points = Vec::new();
        for spec in &self.solvers {
            for (method, shift) in spec.resolve()? {
                for (noise, assumed) in self.noise_pairs() {
                    for &seed in &self.seeds {
                        points.push(GridPoint {
                            method,
                            shift,
                            noise_percent: noise,
                            assumed_noise_percent: assumed,
                            seed,
                        });
                    }
                }
            }
        }
        Ok(points)
    }
}

fn check_levels(field: &str, levels: &[f64]) -> Result<()> {
    match levels
        .iter()
        .find(|v| !(v.is_finite() && (0.0..=100.0).contains(*v)))
    {
        Some(bad) => Err(config(format!(
            "{field} entries must be in [0, 100], got {bad}"
        ))),
        None => Ok(()),
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemKind::Phillips => f.write_str("phillips"),
            ProblemKind::Shaw => f.write_str("shaw"),
            ProblemKind::Blur2d { band, sigma } => write!(f, "blur2d(band={band}, sigma={sigma})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{
                "problem": {"name": "phillips", "n": 64},
                "solvers": [{"name": "gmres"}, {"name": "rrqmr", "shifts": [1, 2]}],
                "noise_levels_percent": [0.1, 1.0, 5.0],
                "seeds": [1, 2]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_applied() {
        let cfg = base();
        assert_eq!(cfg.eta, DEFAULT_ETA);
        assert_eq!(cfg.max_iter, DEFAULT_MAX_ITER);
        assert_eq!(cfg.output_dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
        assert_eq!(cfg.noise_pairs(), vec![(0.1, 0.1), (1.0, 1.0), (5.0, 5.0)]);
    }

    #[test]
    fn grid_order_and_size() {
        let grid = base().grid().unwrap();
        assert_eq!(grid.len(), 3 * 3 * 2);
        assert_eq!(grid[0].label(), "gmres");
        assert_eq!((grid[0].noise_percent, grid[0].seed), (0.1, 1));
        assert_eq!((grid[1].noise_percent, grid[1].seed), (0.1, 2));
        assert_eq!(grid[6].label(), "rrqmr");
        assert_eq!(grid[6].shift, 1);
        assert_eq!(grid[17].shift, 2);
        let ids: HashSet<_> = grid.iter().map(GridPoint::id).collect();
        assert_eq!(ids.len(), grid.len());
    }

    #[test]
    fn unknown_names() {
        let mut cfg = base();
        cfg.solvers.push(SolverSpec::new("minres", &[]));
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("unknown solver"), "{err}");
        let mut cfg = base();
        cfg.problem.name = "heat".into();
        assert!(matches!(cfg.validate(), Err(CliError::UnknownProblem(_))));
    }

    type Mutation = Box<dyn Fn(&mut ExperimentConfig)>;

    #[test]
    fn invalid_values() {
        let cases: Vec<Mutation> = vec![
            Box::new(|c| c.eta = 1.0),
            Box::new(|c| c.seeds.clear()),
            Box::new(|c| c.solvers.clear()),
            Box::new(|c| c.seeds.push(1)),
            Box::new(|c| c.noise_levels_percent.push(-1.0)),
            Box::new(|c| c.assumed_noise_levels_percent = Some(vec![0.01])),
            Box::new(|c| c.solvers.push(SolverSpec::new("rrgmres", &[0]))),
            Box::new(|c| c.solvers.push(SolverSpec::new("tsvd", &[1]))),
            Box::new(|c| c.solvers.push(SolverSpec::new("qmr", &[1, 2]))),
            Box::new(|c| c.problem.sigma = Some(2.0)),
            Box::new(|c| c.max_iter = 0),
        ];
        for (i, mutate) in cases.iter().enumerate() {
            let mut cfg = base();
            mutate(&mut cfg);
            assert!(cfg.validate().is_err(), "case {i} accepted");
        }
    }

    #[test]
    fn blur_defaults_and_limits() {
        let spec = ProblemSpec {
            name: "blur2d".into(),
            n: 32,
            band: None,
            sigma: None,
        };
        assert_eq!(
            spec.kind().unwrap(),
            ProblemKind::Blur2d {
                band: DEFAULT_BAND,
                sigma: DEFAULT_SIGMA
            }
        );
        let wide = ProblemSpec {
            band: Some(40),
            ..spec.clone()
        };
        assert!(wide.kind().is_err());
    }

    #[test]
    fn json_roundtrip_and_unknown_fields() {
        let cfg = base();
        assert_eq!(
            ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap(),
            cfg
        );
        let err =
            ExperimentConfig::from_json(r#"{"problem": {"name": "shaw", "n": 32}, "bogus": 1}"#);
        assert!(matches!(err, Err(CliError::Json(_))));
    }

    #[test]
    fn env_override() {
        let mut cfg = base();
        cfg.apply_output_override(None);
        assert_eq!(cfg.output_dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
        cfg.apply_output_override(Some(OsString::new()));
        assert_eq!(cfg.output_dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
        cfg.apply_output_override(Some("elsewhere".into()));
        assert_eq!(cfg.output_dir, PathBuf::from("elsewhere"));
    }
}
