//! Choice of the regularization parameter: the a priori rule and the
//! discrepancy principle.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::operator::DiscreteOperator;
use crate::schemes::{qualification_check, regularize, RegularizerConfig};

/// `α = c0 · δ^{1/(p+1)} · log(1/δ)^{ν/(p+1)}`.
pub fn apriori_alpha(delta: f64, p: f64, nu: u32, c0: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("need 0 < delta < 1, got {delta}")));
    }
    if !(p >= 0.0) || !(c0 > 0.0) {
        return Err(Error::domain("need p >= 0 and c0 > 0"));
    }
    let e = 1.0 / (p + 1.0);
    Ok(c0 * delta.powf(e) * (-delta.ln()).powf(nu as f64 * e))
}

/// `α / (δ^{1/(p+1)} log(1/δ)^{ν/(p+1)})`.
pub fn alpha_lower_bound_ratio(alpha: f64, delta: f64, p: f64, nu: u32) -> Result<f64> {
    Ok(alpha / apriori_alpha(delta, p, nu, 1.0)?)
}

fn default_ratio() -> f64 {
    0.5
}

fn default_bisect_tol() -> f64 {
    1e-3
}

fn default_alpha_min() -> f64 {
    1e-14
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyConfig {
    pub b0: f64,
    pub b1: f64,
    /// Start of the geometric walk; `‖A‖` when absent.
    #[serde(default)]
    pub alpha_max: Option<f64>,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    /// Bisection stops when `log(α_hi/α_lo)` falls below this.
    #[serde(default = "default_bisect_tol")]
    pub bisect_tol: f64,
    #[serde(default = "default_alpha_min")]
    pub alpha_min: f64,
}

impl DiscrepancyConfig {
    pub fn new(b0: f64, b1: f64) -> Self {
        Self {
            b0,
            b1,
            alpha_max: None,
            ratio: default_ratio(),
            bisect_tol: default_bisect_tol(),
            alpha_min: default_alpha_min(),
        }
    }

    /// Band `[1.5 c0, 2 c0]` around the `‖S_α‖` bound `c0`.
    pub fn default_for(op: &DiscreteOperator, cfg: &RegularizerConfig) -> Result<Self> {
        let c0 = companion_bound(op, cfg)?;
        Ok(Self::new(1.5 * c0, 2.0 * c0))
    }

    pub fn validate(&self, c0: f64) -> Result<()> {
        if !(self.b1 >= self.b0 && self.b0 > c0) {
            return Err(Error::domain(format!(
                "need b1 >= b0 > c0, got b0 = {}, b1 = {}, c0 = {c0}",
                self.b0, self.b1
            )));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::domain("ratio must lie in (0, 1)"));
        }
        if !(self.bisect_tol > 0.0 && self.alpha_min > 0.0) {
            return Err(Error::domain("bisect_tol and alpha_min must be positive"));
        }
        Ok(())
    }
}

/// Certified `c_0`, or the empirical `sup ‖S_α‖` over the default grid.
pub fn companion_bound(op: &DiscreteOperator, cfg: &RegularizerConfig) -> Result<f64> {
    match cfg.c_p(0.0) {
        Some(c) => Ok(c),
        None => Ok(qualification_check(op, cfg, 0.0, &op.default_kappa_grid())?.sup_ratio),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyOutcome {
    /// `f64::INFINITY` in the degenerate case.
    pub alpha: f64,
    pub u: GridFunction,
    pub residual: f64,
    pub evaluations: usize,
}

/// Walks `α_k = α_max · ratio^k` down until `‖A u_α − f^δ‖ ≤ b1 δ`, then
/// bisects in `log α` until the residual lies in `[b0 δ, b1 δ]`.
pub fn discrepancy_alpha(
    op: &DiscreteOperator,
    cfg: &RegularizerConfig,
    dcfg: &DiscrepancyConfig,
    f_delta: &GridFunction,
    delta: f64,
    ubar: &GridFunction,
) -> Result<DiscrepancyOutcome> {
    if !(delta > 0.0) {
        return Err(Error::domain(format!("delta = {delta} must be > 0")));
    }
    if let Some(p0) = cfg.p0() {
        if p0 <= 1.0 {
            return Err(Error::domain(
                "discrepancy principle needs saturation p0 > 1 (lavrentiev m >= 2)",
            ));
        }
    }
    dcfg.validate(0.0)?;
    let lo_band = dcfg.b0 * delta;
    let hi_band = dcfg.b1 * delta;
    let count = Cell::new(0usize);
    let eval = |alpha: f64| -> Result<(GridFunction, f64)> {
        count.set(count.get() + 1);
        let u = regularize(op, cfg, alpha, f_delta, ubar)?;
        let r = op.apply(&u)?.distance(f_delta)?;
        Ok((u, r))
    };

    let r0 = op.apply(ubar)?.distance(f_delta)?;
    if r0 <= hi_band {
        return Ok(DiscrepancyOutcome {
            alpha: f64::INFINITY,
            u: ubar.clone(),
            residual: r0,
            evaluations: 0,
        });
    }

    let alpha_max = dcfg.alpha_max.unwrap_or_else(|| op.op_norm());
    let (mut u, mut r) = eval(alpha_max)?;
    let mut alpha = alpha_max;
    if (lo_band..=hi_band).contains(&r) {
        return Ok(DiscrepancyOutcome {
            alpha,
            u,
            residual: r,
            evaluations: count.get(),
        });
    }
    // (big, small): residual above the band at big, below it at small
    let (mut big, mut small);
    if r > hi_band {
        loop {
            let next = alpha * dcfg.ratio;
            if next < dcfg.alpha_min {
                return Err(Error::BandUnreachable(format!(
                    "residual {r:e} still above {hi_band:e} at alpha = {alpha:e}"
                )));
            }
            let prev = alpha;
            alpha = next;
            (u, r) = eval(alpha)?;
            if r <= hi_band {
                if r >= lo_band {
                    return Ok(DiscrepancyOutcome {
                        alpha,
                        u,
                        residual: r,
                        evaluations: count.get(),
                    });
                }
                big = prev;
                small = alpha;
                break;
            }
        }
    } else {
        // below the band already at alpha_max: walk up
        let mut steps = 0;
        loop {
            let prev = alpha;
            alpha /= dcfg.ratio;
            steps += 1;
            (u, r) = eval(alpha)?;
            if r >= lo_band {
                if r <= hi_band {
                    return Ok(DiscrepancyOutcome {
                        alpha,
                        u,
                        residual: r,
                        evaluations: count.get(),
                    });
                }
                big = alpha;
                small = prev;
                break;
            }
            if steps > 200 {
                return Err(Error::BandUnreachable(format!(
                    "residual {r:e} still below {lo_band:e} at alpha = {alpha:e}"
                )));
            }
        }
    }

    while (big / small).ln() > dcfg.bisect_tol {
        let mid = (big * small).sqrt();
        let (um, rm) = eval(mid)?;
        if rm > hi_band {
            big = mid;
        } else if rm < lo_band {
            small = mid;
        } else {
            return Ok(DiscrepancyOutcome {
                alpha: mid,
                u: um,
                residual: rm,
                evaluations: count.get(),
            });
        }
    }
    Err(Error::BandUnreachable(format!(
        "bracket [{small:e}, {big:e}] collapsed without hitting [{lo_band:e}, {hi_band:e}]"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::NormKind;

    #[test]
    fn apriori_examples() {
        let e = std::f64::consts::E;
        let a = apriori_alpha(e.powi(-10), 0.0, 1, 1.0).unwrap();
        assert!((a - 10.0 * e.powi(-10)).abs() < 1e-15);
        let a = apriori_alpha(e.powi(-4), 1.0, 2, 1.0).unwrap();
        assert!((a - 4.0 * e.powi(-2)).abs() < 1e-14);
        assert!(apriori_alpha(1.0, 0.0, 1, 1.0).is_err());
        assert!(apriori_alpha(0.0, 0.0, 1, 1.0).is_err());
    }

    #[test]
    fn degenerate_branch() {
        let op = DiscreteOperator::diagonal(vec![1.0, 0.5], NormKind::Sup).unwrap();
        let cfg = RegularizerConfig::lavrentiev(&op, 2).unwrap();
        let ustar = op.vector(vec![1.0, 2.0]).unwrap();
        let f = op.apply(&ustar).unwrap();
        let d = DiscrepancyConfig::default_for(&op, &cfg).unwrap();
        let out = discrepancy_alpha(&op, &cfg, &d, &f, 1e-3, &ustar).unwrap();
        assert!(out.alpha.is_infinite());
        assert_eq!(out.u, ustar);
    }

    #[test]
    fn needs_saturation_above_one() {
        let op = DiscreteOperator::diagonal(vec![1.0], NormKind::Sup).unwrap();
        let cfg = RegularizerConfig::lavrentiev(&op, 1).unwrap();
        let f = op.vector(vec![1.0]).unwrap();
        let d = DiscrepancyConfig::new(1.5, 2.0);
        assert!(discrepancy_alpha(&op, &cfg, &d, &f, 1e-3, &op.zeros()).is_err());
    }

    #[test]
    fn band_validation() {
        assert!(DiscrepancyConfig::new(1.5, 2.0).validate(1.0).is_ok());
        assert!(DiscrepancyConfig::new(1.0, 2.0).validate(1.0).is_err());
        assert!(DiscrepancyConfig::new(2.5, 2.0).validate(1.0).is_err());
    }
}
