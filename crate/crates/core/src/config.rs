//! Run configuration: every tolerance, window, output path, and seed a run
//! depends on, loadable from a JSON file so results are reproducible from
//! the config alone.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::quad::QuadratureSpec;
use crate::radial::SolverSettings;
use crate::tolerances;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Mixed absolute/relative tolerance of the shooting integrator.
    pub integrator_tol: f64,
    /// Admissibility threshold: a solution is accepted when |β| ≤ defect_tol·|α|.
    pub defect_tol: f64,
    /// Controls for the adaptive quadratures (Green's function route).
    pub quadrature: QuadratureSpec,
    /// Boundary matching offset δ; the frame is fitted at r = 1−δ.
    pub match_delta: f64,
    /// Admissible mass range (excludes the small linear-response family).
    pub mass_window: (f64, f64),
    /// Center-value range scanned when solving at fixed λ.
    pub c_window: (f64, f64),
    /// Grid size of the defect scan over c_window.
    pub n_scan: usize,
    /// Destination for solution JSON documents.
    pub solution_out: Option<PathBuf>,
    /// Destination for branch CSV tables.
    pub branch_out: Option<PathBuf>,
    /// Destination for verification report JSON.
    pub report_out: Option<PathBuf>,
    /// Seed for the sampled spot checks in reports.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            integrator_tol: tolerances::INTEGRATOR_TOL,
            defect_tol: tolerances::DEFECT_REL_TOL,
            quadrature: QuadratureSpec::default(),
            match_delta: tolerances::MATCH_DELTA,
            mass_window: tolerances::MASS_WINDOW,
            c_window: tolerances::C_WINDOW,
            n_scan: tolerances::N_SCAN,
            solution_out: None,
            branch_out: None,
            report_out: None,
            seed: 7,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.integrator_tol > 0.0 && self.integrator_tol < 1e-2) {
            return Err(Error::Domain(format!(
                "integrator tolerance {} outside (0, 1e-2)",
                self.integrator_tol
            )));
        }
        if !(self.defect_tol > 0.0) {
            return Err(Error::Domain(format!("defect tolerance {} must be positive", self.defect_tol)));
        }
        self.quadrature.validate()?;
        let (dlo, dhi) = tolerances::MATCH_DELTA_RANGE;
        if !(self.match_delta >= dlo && self.match_delta <= dhi) {
            return Err(Error::Domain(format!(
                "match_delta {} outside [{dlo:.0e}, {dhi}]",
                self.match_delta
            )));
        }
        if !(self.mass_window.0 >= 0.0 && self.mass_window.1 > self.mass_window.0) {
            return Err(Error::Domain(format!(
                "empty mass window ({}, {})",
                self.mass_window.0, self.mass_window.1
            )));
        }
        if !(self.c_window.0 > 0.0 && self.c_window.1 > self.c_window.0) {
            return Err(Error::Domain(format!(
                "empty c window ({}, {})",
                self.c_window.0, self.c_window.1
            )));
        }
        if self.n_scan < 2 {
            return Err(Error::Domain(format!("n_scan {} below 2", self.n_scan)));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: Self = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn solver_settings(&self) -> SolverSettings {
        SolverSettings { tol: self.integrator_tol, match_delta: self.match_delta }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn validation_catches_bad_fields() {
        let mut cfg = RunConfig::default();
        cfg.integrator_tol = -1.0;
        assert!(cfg.validate().is_err());

        let mut cfg = RunConfig::default();
        cfg.c_window = (30.0, 30.0);
        assert!(cfg.validate().is_err());

        let mut cfg = RunConfig::default();
        cfg.mass_window = (20.0, 10.0);
        assert!(cfg.validate().is_err());

        let mut cfg = RunConfig::default();
        cfg.n_scan = 1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn load_round_trips_and_rejects_unknown_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");

        let mut cfg = RunConfig::default();
        cfg.seed = 99;
        cfg.c_window = (10.0, 50.0);
        std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
        let loaded = RunConfig::load(&path).unwrap();
        assert_eq!(loaded.seed, 99);
        assert_eq!(loaded.c_window, (10.0, 50.0));

        std::fs::write(&path, r#"{"integator_tol": 1e-9}"#).unwrap();
        assert!(RunConfig::load(&path).is_err());

        std::fs::write(&path, r#"{"seed": 3,"#).unwrap();
        assert!(RunConfig::load(&path).is_err());

        assert!(RunConfig::load(Path::new("/nonexistent/config.json")).is_err());
    }

    #[test]
    fn partial_config_fills_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        std::fs::write(&path, r#"{"n_scan": 48}"#).unwrap();
        let loaded = RunConfig::load(&path).unwrap();
        assert_eq!(loaded.n_scan, 48);
        assert_eq!(loaded.match_delta, tolerances::MATCH_DELTA);
    }
}
