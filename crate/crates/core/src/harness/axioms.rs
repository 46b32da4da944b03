//! Empirical checks of the operator and scheme axioms for a configuration.

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::operator::log_spaced;
use crate::schemes::{
    commutation_defect, growth_constant, probe_set, qualification_check, saturation_probe,
    QualificationReport, RegularizerConfig, SaturationProbe, SchemeSpec,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub empirical: f64,
    pub c_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub kappa_star: f64,
    pub op_norm: f64,
    pub omega: f64,
    pub alpha_grid: Vec<f64>,
    pub qualification: Vec<QualificationReport>,
    pub saturation: Option<SaturationProbe>,
    pub growth: GrowthReport,
    pub commutation_defect: f64,
    pub caveat: Option<String>,
}

/// Runs qualification (integer `p ≤ p0` and `p = 1/2`), saturation,
/// growth and commutation checks on `[10^-4‖A‖, ‖A‖]`.
pub fn check_axioms(config: &ExperimentConfig) -> Result<AxiomReport> {
    config.validate()?;
    let op = config.build_operator()?;
    let cfg = RegularizerConfig::new(&op, config.scheme)?;
    let alpha_grid = log_spaced(1e-4 * op.op_norm(), op.op_norm(), 9);
    let mut powers = vec![0.0, 0.5, 1.0];
    let saturation = match config.scheme {
        SchemeSpec::Lavrentiev { m } => {
            powers.extend((2..=m).map(f64::from));
            Some(saturation_probe(&op, &cfg, m as f64 + 0.5, &alpha_grid)?)
        }
        SchemeSpec::Cauchy { .. } => None,
    };
    let qualification = powers
        .into_iter()
        .filter(|p| cfg.p0().is_none_or(|p0| *p <= p0))
        .map(|p| qualification_check(&op, &cfg, p, &alpha_grid))
        .collect::<Result<_>>()?;
    let probes = probe_set(&op);
    Ok(AxiomReport {
        kappa_star: op.kappa_star(),
        op_norm: op.op_norm(),
        omega: op.omega(),
        growth: GrowthReport {
            empirical: growth_constant(&op, &cfg, &alpha_grid, &probes)?,
            c_star: cfg.c_star(),
        },
        commutation_defect: commutation_defect(&op, &cfg, &alpha_grid, &probes)?,
        alpha_grid,
        qualification,
        saturation,
        caveat: cfg.caveat().map(str::to_owned),
    })
}
