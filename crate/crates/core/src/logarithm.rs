//! The operator logarithm and the shifted resolvent powers
//! `(λI − log A)^{−ν}` used to build elements of prescribed smoothness.

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractional::{fractional_power_composed, fractional_power_exact};
use crate::grid::GridFunction;
use crate::operator::DiscreteOperator;

/// Mixed smoothness `u = A^p (λI − log A)^{−ν} w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceCondition {
    p: f64,
    nu: u32,
    lambda: f64,
    w: GridFunction,
}

impl SourceCondition {
    /// Requires `p ≥ 0`, `ν ≥ 1` and `λ > log‖A‖`.
    pub fn new(
        op: &DiscreteOperator,
        p: f64,
        nu: u32,
        lambda: f64,
        w: GridFunction,
    ) -> Result<Self> {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::domain(format!("p = {p} must be >= 0")));
        }
        if nu < 1 {
            return Err(Error::domain("nu must be >= 1"));
        }
        check_shift(op, lambda)?;
        w.check_len(op.dim())?;
        Ok(Self { p, nu, lambda, w })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn w(&self) -> &GridFunction {
        &self.w
    }
}

fn check_shift(op: &DiscreteOperator, lambda: f64) -> Result<()> {
    if !(lambda > op.omega()) {
        return Err(Error::domain(format!(
            "shift below spectral bound: lambda = {lambda} <= omega = {}",
            op.omega()
        )));
    }
    Ok(())
}

/// Composite 10-point Gauss–Legendre rule on `[0, q_max]`.
///
/// In units of `L = 1/(λ − ω)` the panels are `[0, 2^-10]`, then dyadic up
/// to 1, then unit width up to `q_max/L`. The dyadic panels resolve the fast
/// decay of strongly damped modes.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceQuadrature {
    q_max: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LaplaceQuadrature {
    const GAUSS_POINTS: usize = 10;
    const DYADIC_LEVELS: i32 = 10;
    const DEFAULT_SPAN: f64 = 40.0;

    /// `q_max = 40/(λ − ω)`.
    pub fn new(lambda: f64, omega: f64) -> Result<Self> {
        Self::with_span(lambda, omega, Self::DEFAULT_SPAN)
    }

    /// `q_max = span/(λ − ω)`; `span` must be an integer `≥ 10`.
    pub fn with_span(lambda: f64, omega: f64, span: f64) -> Result<Self> {
        if !(lambda > omega) {
            return Err(Error::domain(format!(
                "shift below spectral bound: lambda = {lambda} <= omega = {omega}"
            )));
        }
        if !(span >= 10.0 && span.fract() == 0.0) {
            return Err(Error::Quadrature(format!(
                "span must be an integer >= 10, got {span}"
            )));
        }
        let unit = 1.0 / (lambda - omega);
        let mut edges = vec![0.0];
        for k in (0..=Self::DYADIC_LEVELS).rev() {
            edges.push(unit * 2f64.powi(-k));
        }
        for k in 2..=span as usize {
            edges.push(unit * k as f64);
        }
        let rule =
            GaussLegendre::new(Self::GAUSS_POINTS).map_err(|e| Error::Quadrature(e.to_string()))?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for &(x, w) in rule.as_node_weight_pairs() {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        Ok(Self {
            q_max: unit * span,
            nodes,
            weights,
        })
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `(λI − log A)^{−ν} w = 1/(ν−1)! ∫₀^∞ q^{ν−1} e^{−λq} A^q w dq`.
pub fn shifted_log_resolvent_power(
    op: &DiscreteOperator,
    lambda: f64,
    nu: u32,
    w: &GridFunction,
    quad: &LaplaceQuadrature,
) -> Result<GridFunction> {
    check_shift(op, lambda)?;
    if nu < 1 {
        return Err(Error::domain("nu must be >= 1"));
    }
    w.check_len(op.dim())?;
    let log_fact: f64 = (1..nu).map(|k| (k as f64).ln()).sum();
    let omega = op.omega();
    let terms: Vec<(f64, Vec<f64>)> = quad
        .nodes
        .par_iter()
        .zip(quad.weights.par_iter())
        .map(|(&q, &wt)| {
            let factor = wt * ((nu - 1) as f64 * q.ln() - (lambda - omega) * q - log_fact).exp();
            let v = match op.sigma() {
                Some(sigma) => sigma
                    .iter()
                    .zip(w.values())
                    .map(|(s, x)| ((s.ln() - omega) * q).exp() * x)
                    .collect(),
                None => {
                    let scale = (-omega * q).exp();
                    fractional_power_exact(op, q, w)?
                        .into_values()
                        .into_iter()
                        .map(|x| x * scale)
                        .collect()
                }
            };
            Ok((factor, v))
        })
        .collect::<Result<_>>()?;
    let mut acc = vec![0.0; op.dim()];
    for (factor, v) in &terms {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += factor * x;
        }
    }
    Ok(GridFunction::from_raw(acc, w.norm_kind()))
}

/// `A^p (λI − log A)^{−ν} w` with the default Laplace quadrature.
pub fn make_mixed_smooth_element(
    op: &DiscreteOperator,
    sc: &SourceCondition,
) -> Result<GridFunction> {
    let quad = LaplaceQuadrature::new(sc.lambda, op.omega())?;
    let v = shifted_log_resolvent_power(op, sc.lambda, sc.nu, &sc.w, &quad)?;
    fractional_power_composed(op, sc.p, &v)
}

/// Closed form `(log σ_k) u_k` on the diagonal kind.
pub fn log_apply_diagonal(op: &DiscreteOperator, u: &GridFunction) -> Result<GridFunction> {
    let sigma = op
        .sigma()
        .ok_or_else(|| Error::domain("closed-form logarithm needs the diagonal kind"))?;
    u.check_len(op.dim())?;
    Ok(GridFunction::from_raw(
        sigma
            .iter()
            .zip(u.values())
            .map(|(s, v)| s.ln() * v)
            .collect(),
        u.norm_kind(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogConvergence {
    pub schedule: Vec<f64>,
    /// `‖d_{p_{k+1}} − d_{p_k}‖` for consecutive schedule entries.
    pub distances: Vec<f64>,
    /// Last distance at most 2/3 of the one before it.
    pub cauchy: bool,
}

/// `2^-3, …, 2^-12`.
pub fn default_schedule() -> Vec<f64> {
    (3..=12).map(|k| 2f64.powi(-k)).collect()
}

/// Difference quotients `(A^p u − u)/p` along `p_schedule`, with one
/// Richardson step on the two smallest entries.
pub fn log_apply(
    op: &DiscreteOperator,
    u: &GridFunction,
    p_schedule: &[f64],
) -> Result<(GridFunction, LogConvergence)> {
    if p_schedule.len() < 3 {
        return Err(Error::domain("schedule needs at least three entries"));
    }
    if p_schedule.iter().any(|p| !(*p > 0.0)) || p_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain(
            "schedule must be positive and strictly decreasing",
        ));
    }
    let quotients: Vec<GridFunction> = p_schedule
        .iter()
        .map(|&p| {
            fractional_power_exact(op, p, u)
                .and_then(|v| v.sub(u))
                .map(|d| d.scale(1.0 / p))
        })
        .collect::<Result<_>>()?;
    let distances: Vec<f64> = quotients
        .windows(2)
        .map(|w| w[1].distance(&w[0]))
        .collect::<Result<_>>()?;

    let k = p_schedule.len() - 1;
    let r = p_schedule[k - 1] / p_schedule[k];
    let extrapolated = quotients[k].lincomb(r / (r - 1.0), &quotients[k - 1], -1.0 / (r - 1.0))?;

    let last = distances[distances.len() - 1];
    let prev = distances[distances.len() - 2];
    let floor = 1e-12 * (1.0 + quotients[k].norm());
    let cauchy = last.is_finite() && (last <= prev / 1.5 || (last <= floor && prev <= floor));
    Ok((
        extrapolated,
        LogConvergence {
            schedule: p_schedule.to_vec(),
            distances,
            cauchy,
        },
    ))
}

/// The operator `a·A` with `a = 0.5/‖A‖`, so that `log(aA)` is negative
/// and no shift is needed. Diagonal kind only.
pub fn rescale_for_unshifted(op: &DiscreteOperator) -> Result<(DiscreteOperator, f64)> {
    let a = 0.5 / op.op_norm();
    Ok((op.rescaled(a)?, a))
}
