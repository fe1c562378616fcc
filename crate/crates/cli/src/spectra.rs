//! Singular values of the projected matrices of GMRES and QMR.

use std::fs;
use std::path::{Path, PathBuf};

use krr_core::analysis::{projected_spectrum, SpectrumReport};
use krr_core::problems::{add_noise, phillips};
use krr_core::solvers::BasisKind;

use crate::error::{config, io_error, Result};
use crate::output::{line_chart_svg, spectra_to_csv, write_file, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectraSettings {
    /// Phillips grid size.
    pub n: usize,
    /// Columns of the projected matrix.
    pub m: usize,
    pub noise_percent: f64,
    pub seed: u64,
    pub shifts: Vec<usize>,
}

impl Default for SpectraSettings {
    fn default() -> Self {
        Self {
            n: 200,
            m: 30,
            noise_percent: 1.0,
            seed: 1,
            shifts: vec![0, 1, 2],
        }
    }
}

/// Reports for GMRES then QMR, each over the configured shifts, all built
/// from the same noisy right-hand side.
pub fn compute_spectra(settings: &SpectraSettings) -> Result<Vec<SpectrumReport>> {
    if settings.shifts.is_empty() {
        return Err(config("spectra needs at least one shift"));
    }
    let problem = phillips(settings.n)?;
    let data = add_noise(&problem, settings.noise_percent, settings.seed)?;
    let mut reports = Vec::new();
    for basis in [BasisKind::Arnoldi, BasisKind::BiLanczos] {
        for &ell in &settings.shifts {
            reports.push(projected_spectrum(
                basis,
                &*problem.operator,
                &data.b,
                settings.m,
                ell,
            )?);
        }
    }
    Ok(reports)
}

/// Writes `spectra.csv` and `spectra.svg` (relative singular values).
pub fn write_spectra(reports: &[SpectrumReport], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_error("create output directory", dir, e))?;
    let csv_path = dir.join("spectra.csv");
    write_file(&csv_path, &spectra_to_csv(reports)?)?;

    let relative: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| {
            let first = r.singular_values.first().copied().unwrap_or(1.0);
            r.singular_values.iter().map(|s| s / first).collect()
        })
        .collect();
    let names: Vec<String> = reports
        .iter()
        .map(|r| format!("{} l={}", r.method, r.shift))
        .collect();
    let series: Vec<Series<'_>> = names
        .iter()
        .zip(&relative)
        .map(|(name, values)| Series { name, values })
        .collect();
    let svg = line_chart_svg(
        "singular values of the projected matrix / sigma_1",
        "index",
        &series,
    );
    let svg_path = dir.join("spectra.svg");
    write_file(&svg_path, svg.as_bytes())?;
    Ok(vec![csv_path, svg_path])
}
