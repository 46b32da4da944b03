//! Fractional powers `A^p`.
//!
//! Volterra kinds have closed forms (`J_β^p = J_{pβ}`), the diagonal kind is
//! componentwise. The Balakrishnan integral is the generic path and the
//! cross-check.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::operator::{DiscreteOperator, ProductWeights};

/// Composite trapezoid rule in `τ = log s` on `[tau_min, tau_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalakrishnanQuadrature {
    pub tau_min: f64,
    pub tau_max: f64,
    pub nodes: usize,
}

impl BalakrishnanQuadrature {
    pub const DEFAULT_NODES: usize = 2000;

    pub fn new(tau_min: f64, tau_max: f64, nodes: usize) -> Result<Self> {
        if !(tau_min < tau_max) || !tau_min.is_finite() || !tau_max.is_finite() {
            return Err(Error::Quadrature(format!(
                "need finite tau_min < tau_max, got [{tau_min}, {tau_max}]"
            )));
        }
        if nodes < 16 {
            return Err(Error::Quadrature(format!("need >= 16 nodes, got {nodes}")));
        }
        Ok(Self {
            tau_min,
            tau_max,
            nodes,
        })
    }

    /// `τ ∈ [log(1e-16‖A‖), log(1e6‖A‖)]` with 2000 nodes. Spectral
    /// values below the lower end contribute about `σ^q` each, so the
    /// lower end sits far below `‖A‖`.
    pub fn default_for(op: &DiscreteOperator) -> Self {
        Self::with_nodes(op, Self::DEFAULT_NODES)
    }

    pub fn with_nodes(op: &DiscreteOperator, nodes: usize) -> Self {
        let a = op.op_norm();
        Self {
            tau_min: (1e-16 * a).ln(),
            tau_max: (1e6 * a).ln(),
            nodes: nodes.max(16),
        }
    }

    /// A message when `[e^tau_min, e^tau_max]` does not bracket
    /// `[1e-6‖A‖, 1e2‖A‖]`.
    pub fn coverage_warning(&self, op: &DiscreteOperator) -> Option<String> {
        let a = op.op_norm();
        let (lo, hi) = (self.tau_min.exp(), self.tau_max.exp());
        if lo > 1e-6 * a || hi < 1e2 * a {
            Some(format!(
                "quadrature range [{lo:.3e}, {hi:.3e}] does not bracket [{:.3e}, {:.3e}]",
                1e-6 * a,
                1e2 * a
            ))
        } else {
            None
        }
    }
}

/// `A^p u` by closed formulas; `p = 0` returns `u`.
pub fn fractional_power_exact(
    op: &DiscreteOperator,
    p: f64,
    u: &GridFunction,
) -> Result<GridFunction> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::domain(format!("power p = {p} must be >= 0")));
    }
    u.check_len(op.dim())?;
    if p == 0.0 {
        return Ok(u.clone());
    }
    let out = if let Some(sigma) = op.sigma() {
        sigma
            .iter()
            .zip(u.values())
            .map(|(s, v)| s.powf(p) * v)
            .collect()
    } else {
        let base = op.base_order().expect("volterra kind");
        ProductWeights::new(p * base, op.n()).apply(u.values())
    };
    Ok(GridFunction::from_raw(out, u.norm_kind()))
}

/// `A^p u` as `A^{⌊p⌋}` (repeated application) times the closed-form
/// power of the fractional part. Unlike [`fractional_power_exact`], integer
/// powers are exact powers of the discrete matrix.
pub fn fractional_power_composed(
    op: &DiscreteOperator,
    p: f64,
    u: &GridFunction,
) -> Result<GridFunction> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::domain(format!("power p = {p} must be >= 0")));
    }
    let whole = p.floor();
    let mut v = fractional_power_exact(op, p - whole, u)?;
    for _ in 0..whole as usize {
        v = op.apply(&v)?;
    }
    Ok(v)
}

/// `A^p u` by the Balakrishnan integral for the fractional part of `p`,
/// composed with exact integer powers of `A`.
pub fn fractional_power_balakrishnan(
    op: &DiscreteOperator,
    p: f64,
    u: &GridFunction,
    quad: &BalakrishnanQuadrature,
) -> Result<GridFunction> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::domain(format!("power p = {p} must be > 0")));
    }
    u.check_len(op.dim())?;
    let whole = p.floor();
    let q = p - whole;
    let mut v = if q > 0.0 {
        balakrishnan_fraction(op, q, u, quad)?
    } else {
        u.clone()
    };
    for _ in 0..whole as usize {
        v = op.apply(&v)?;
    }
    Ok(v)
}

fn balakrishnan_fraction(
    op: &DiscreteOperator,
    q: f64,
    u: &GridFunction,
    quad: &BalakrishnanQuadrature,
) -> Result<GridFunction> {
    let au = op.apply(u)?;
    let count = quad.nodes;
    let h = (quad.tau_max - quad.tau_min) / (count - 1) as f64;
    let samples: Vec<Vec<f64>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let s = (quad.tau_min + h * i as f64).exp();
            op.shifted_solve(s, &au).map(|v| v.into_values())
        })
        .collect::<Result<_>>()?;

    let dim = op.dim();
    let mut acc = vec![0.0; dim];
    for (i, v) in samples.iter().enumerate() {
        let s = (quad.tau_min + h * i as f64).exp();
        let mut weight = h * s.powf(q);
        if i == 0 || i == count - 1 {
            weight *= 0.5;
        }
        for (a, x) in acc.iter_mut().zip(v) {
            *a += weight * x;
        }
    }
    // near s = 0 the integrand is ≈ s^{q−1} v(s_min); near ∞ it is ≈ s^{q−2} s_max v(s_max)
    let s_min = quad.tau_min.exp();
    let s_max = quad.tau_max.exp();
    let lo = s_min.powf(q) / q;
    let hi = s_max.powf(q) / (1.0 - q);
    for k in 0..dim {
        acc[k] += lo * samples[0][k] + hi * samples[count - 1][k];
    }
    let scale = (PI * q).sin() / PI;
    Ok(GridFunction::from_raw(
        acc.into_iter().map(|a| a * scale).collect(),
        u.norm_kind(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `2(κ*+1)` when `q = 1`; no certified constant otherwise.
    pub constant_used: Option<f64>,
    /// `lhs/rhs`, or 0 when both vanish.
    pub ratio: f64,
    pub holds: Option<bool>,
}

/// Compares `‖A^p u‖` with `‖A^q u‖^{p/q} ‖u‖^{1−p/q}`.
pub fn check_interpolation_inequality(
    op: &DiscreteOperator,
    p: f64,
    q: f64,
    u: &GridFunction,
) -> Result<InterpolationReport> {
    if !(p > 0.0 && p < q) {
        return Err(Error::domain(format!(
            "need 0 < p < q, got p = {p}, q = {q}"
        )));
    }
    let lhs = fractional_power_exact(op, p, u)?.norm();
    let aq = fractional_power_exact(op, q, u)?.norm();
    let theta = p / q;
    let rhs = aq.powf(theta) * u.norm().powf(1.0 - theta);
    let constant_used = (q == 1.0).then(|| 2.0 * (op.kappa_star() + 1.0));
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    let holds = constant_used.map(|c| lhs <= c * rhs);
    Ok(InterpolationReport {
        lhs,
        rhs,
        constant_used,
        ratio,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::NormKind;

    #[test]
    fn zero_power_is_identity() {
        let op = DiscreteOperator::integration(16, NormKind::Sup).unwrap();
        let u = op.sample(|x| x.sin());
        assert_eq!(fractional_power_exact(&op, 0.0, &u).unwrap(), u);
    }

    #[test]
    fn diagonal_square_root() {
        let op = DiscreteOperator::diagonal(vec![4.0], NormKind::Sup).unwrap();
        let u = op.vector(vec![1.0]).unwrap();
        let v = fractional_power_exact(&op, 0.5, &u).unwrap();
        assert!((v.values()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn balakrishnan_scalar() {
        let op = DiscreteOperator::diagonal(vec![1.0], NormKind::Sup).unwrap();
        let u = op.vector(vec![1.0]).unwrap();
        let quad = BalakrishnanQuadrature::default_for(&op);
        let v = fractional_power_balakrishnan(&op, 0.5, &u, &quad).unwrap();
        assert!((v.values()[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn balakrishnan_rejects_nonpositive_power() {
        let op = DiscreteOperator::diagonal(vec![1.0], NormKind::Sup).unwrap();
        let u = op.vector(vec![1.0]).unwrap();
        let quad = BalakrishnanQuadrature::default_for(&op);
        assert!(fractional_power_balakrishnan(&op, 0.0, &u, &quad).is_err());
    }

    #[test]
    fn coverage_warning_on_narrow_range() {
        let op = DiscreteOperator::diagonal(vec![1.0], NormKind::Sup).unwrap();
        assert!(BalakrishnanQuadrature::default_for(&op)
            .coverage_warning(&op)
            .is_none());
        let narrow = BalakrishnanQuadrature::new(-5.0, 2.0, 100).unwrap();
        assert!(narrow.coverage_warning(&op).is_some());
        assert!(BalakrishnanQuadrature::new(1.0, 0.0, 100).is_err());
        assert!(BalakrishnanQuadrature::new(0.0, 1.0, 8).is_err());
    }

    #[test]
    fn interpolation_scalar_equality_and_zero() {
        let op = DiscreteOperator::diagonal(vec![0.3], NormKind::Sup).unwrap();
        let u = op.vector(vec![1.0]).unwrap();
        let r = check_interpolation_inequality(&op, 0.4, 1.0, &u).unwrap();
        assert!((r.lhs - 0.3f64.powf(0.4)).abs() < 1e-15);
        assert!((r.ratio - 1.0).abs() < 1e-14);
        assert_eq!(r.holds, Some(true));
        let r = check_interpolation_inequality(&op, 0.4, 1.7, &u).unwrap();
        assert!(r.holds.is_none());
        let z = op.zeros();
        let r = check_interpolation_inequality(&op, 0.4, 1.0, &z).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (0.0, 0.0, Some(true)));
        assert!(check_interpolation_inequality(&op, 1.0, 1.0, &u).is_err());
    }
}
