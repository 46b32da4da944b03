//! Rate experiments over a ladder of noise levels.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{build_problem, ExperimentConfig, Problem, RuleSpec};
use super::noise::add_noise;
use crate::choice::{alpha_lower_bound_ratio, apriori_alpha, discrepancy_alpha};
use crate::error::{Error, Result};
use crate::schemes::{regularize, RegularizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportRow {
    pub delta: f64,
    /// `f64::INFINITY` when the discrepancy principle keeps `ū`.
    pub alpha: f64,
    pub error: f64,
    pub residual: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSummary {
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub min_ratio: f64,
    /// `max_ratio / min_ratio`.
    pub ratio_spread: f64,
    pub spread_tolerance: f64,
    pub pass: bool,
    /// Exponent `e` of a least-squares fit `error ≈ C δ^e log(1/δ)^{−ν/(p+1)}`.
    pub fitted_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundSummary {
    /// `α_δ / (δ^{1/(p+1)} log(1/δ)^{ν/(p+1)})` for rows with finite `α`.
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub summary: RateSummary,
    pub alpha_lower_bound: Option<LowerBoundSummary>,
    pub d_w: f64,
    pub kappa_star: f64,
    pub caveat: Option<String>,
}

/// `δ^{p/(p+1)} log(1/δ)^{−ν/(p+1)}`.
pub fn rate_profile(delta: f64, p: f64, nu: u32) -> f64 {
    let e = 1.0 / (p + 1.0);
    delta.powf(p * e) * (-delta.ln()).powf(-(nu as f64) * e)
}

/// Ratio statistics and the apparent Hölder exponent.
pub fn fit_rate(rows: &[ReportRow], p: f64, nu: u32, spread_tolerance: f64) -> Result<RateSummary> {
    if rows.len() < 3 {
        return Err(Error::domain(format!(
            "rate fit needs at least 3 rows, got {}",
            rows.len()
        )));
    }
    let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let k = ratios.len();
    let median_ratio = if k % 2 == 1 {
        ratios[k / 2]
    } else {
        0.5 * (ratios[k / 2 - 1] + ratios[k / 2])
    };
    let (min_ratio, max_ratio) = (ratios[0], ratios[k - 1]);
    let ratio_spread = max_ratio / min_ratio;

    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error > 0.0)
        .map(|r| {
            let log_factor = (-r.delta.ln()).powf(-(nu as f64) / (p + 1.0));
            (r.delta.ln(), (r.error / log_factor).ln())
        })
        .collect();
    let fitted_exponent = if pts.len() >= 2 {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    Ok(RateSummary {
        max_ratio,
        median_ratio,
        min_ratio,
        ratio_spread,
        spread_tolerance,
        pass: ratio_spread <= spread_tolerance,
        fitted_exponent,
    })
}

fn run_row(
    config: &ExperimentConfig,
    problem: &Problem,
    cfg: &RegularizerConfig,
    dcfg: Option<&crate::choice::DiscrepancyConfig>,
    index: usize,
    delta: f64,
    d_w: f64,
) -> Result<ReportRow> {
    let op = &problem.op;
    let f_delta = if config.exact_data {
        problem.f_star.clone()
    } else {
        add_noise(
            &problem.f_star,
            delta,
            config.seed.wrapping_add(index as u64),
        )?
    };
    let (alpha, u) = match (&config.rule, dcfg) {
        (RuleSpec::Apriori { c0 }, _) => {
            let alpha = apriori_alpha(delta, config.source.p, config.source.nu, *c0)?;
            (alpha, regularize(op, cfg, alpha, &f_delta, &problem.ubar)?)
        }
        (RuleSpec::Discrepancy { .. }, Some(d)) => {
            let out = discrepancy_alpha(op, cfg, d, &f_delta, delta, &problem.ubar)?;
            (out.alpha, out.u)
        }
        (RuleSpec::Discrepancy { .. }, None) => unreachable!("discrepancy config resolved"),
    };
    let error = u.distance(&problem.u_star)?;
    let residual = op.apply(&u)?.distance(&f_delta)?;
    let bound = d_w * rate_profile(delta, config.source.p, config.source.nu);
    Ok(ReportRow {
        delta,
        alpha,
        error,
        residual,
        bound,
        ratio: error / bound,
    })
}

pub fn run_rate_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let problem = build_problem(config)?;
    let cfg = RegularizerConfig::new(&problem.op, config.scheme)?;
    let dcfg = config.discrepancy_config(&problem.op, &cfg)?;
    let d_w = problem.source.w().norm().max(1.0);
    let rows: Vec<ReportRow> = config
        .delta_ladder
        .par_iter()
        .enumerate()
        .map(|(i, &delta)| {
            run_row(config, &problem, &cfg, dcfg.as_ref(), i, delta, d_w).map_err(|e| Error::Row {
                delta,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let summary = fit_rate(
        &rows,
        config.source.p,
        config.source.nu,
        config.spread_tolerance,
    )?;
    let alpha_lower_bound = if dcfg.is_some() {
        let ratios: Vec<f64> = rows
            .iter()
            .filter(|r| r.alpha.is_finite())
            .map(|r| alpha_lower_bound_ratio(r.alpha, r.delta, config.source.p, config.source.nu))
            .collect::<Result<_>>()?;
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(LowerBoundSummary {
            spread: max / min,
            ratios,
            min,
            max,
        })
    } else {
        None
    };
    Ok(ExperimentReport {
        rows,
        summary,
        alpha_lower_bound,
        d_w,
        kappa_star: problem.op.kappa_star(),
        caveat: cfg.caveat().map(str::to_owned),
    })
}
