//! The low-order example `u(ξ) = (−log cξ)^{−κ}` with the log-kernel
//! Volterra operator `(Su)(x) = ∫₀^x log(x − ξ) u(ξ) dξ` and
//! `w(x) = ∫₀^x log(x − ξ) u'(ξ) dξ`, the candidate for `(Su)'`.

use gauss_quad::GaussLegendre;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractional::fractional_power_exact;
use crate::grid::{GridFunction, NormKind};
use crate::logarithm::{default_schedule, log_apply};
use crate::operator::DiscreteOperator;

/// `Γ'(1) = −γ`, Euler's constant with the sign of the digamma value.
pub const GAMMA_PRIME_ONE: f64 = -0.577_215_664_901_532_9;

/// Relative tolerance of the adaptive evaluation of `w`.
pub const W_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogExampleParams {
    pub c: f64,
    pub kappa: f64,
    pub grid_sizes: Vec<usize>,
}

impl LogExampleParams {
    /// Requires `0 < c < 1` and `κ > 1`.
    pub fn new(c: f64, kappa: f64) -> Result<Self> {
        if !(kappa > 1.0) {
            return Err(Error::domain(format!("kappa = {kappa} must exceed 1")));
        }
        Self::probe(c, kappa)
    }

    /// Like [`new`](Self::new) but accepts any `κ > 0`, to probe the
    /// boundary of the sufficient condition.
    pub fn probe(c: f64, kappa: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::domain(format!("c = {c} must lie in (0, 1)")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::domain(format!("kappa = {kappa} must be positive")));
        }
        Ok(Self {
            c,
            kappa,
            grid_sizes: vec![256, 512],
        })
    }

    pub fn with_grid_sizes(mut self, sizes: Vec<usize>) -> Self {
        self.grid_sizes = sizes;
        self
    }

    pub fn u(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        let l = -(self.c * xi).ln();
        assert!(l > 0.0, "c·ξ must stay below 1");
        l.powf(-self.kappa)
    }

    pub fn u_prime(&self, xi: f64) -> f64 {
        let l = -(self.c * xi).ln();
        self.kappa * l.powf(-self.kappa - 1.0) / xi
    }
}

pub fn sample_u_log(params: &LogExampleParams, n: usize) -> Result<GridFunction> {
    GridFunction::sample(n, NormKind::Sup, |x| params.u(x))
}

fn gauss(points: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(points)
        .expect("at least two points")
        .as_node_weight_pairs()
        .to_vec()
}

/// `∫₀¹ log(k + r) dr` and `∫₀¹ r log(k + r) dr`.
fn log_moments(k: usize, rule: &[(f64, f64)]) -> (f64, f64) {
    if k == 0 {
        return (-1.0, -0.25);
    }
    let kf = k as f64;
    let (mut g, mut h) = (0.0, 0.0);
    for &(x, w) in rule {
        let r = 0.5 * (x + 1.0);
        let l = (kf + r).ln();
        g += 0.5 * w * l;
        h += 0.5 * w * r * l;
    }
    (g, h)
}

/// `(Su)(x_j)` by product integration of the piecewise linear interpolant
/// with exact log moments per cell.
pub fn log_kernel_apply(u: &GridFunction) -> Result<GridFunction> {
    let n = u.len() - 1;
    if n < 1 {
        return Err(Error::domain("log kernel needs at least two nodes"));
    }
    let h = 1.0 / n as f64;
    let half_log_h = 0.5 * h.ln();
    let rule = gauss(20);
    // row j: Σ_k a_k u_{j−1−k} + b_k u_{j−k}
    let (a, b): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|k| {
            let (g, m) = log_moments(k, &rule);
            (h * (half_log_h + m), h * (half_log_h + g - m))
        })
        .unzip();
    let v = u.values();
    let mut out = vec![0.0; n + 1];
    for j in 1..=n {
        let mut acc = 0.0;
        for k in 0..j {
            acc += a[k] * v[j - 1 - k] + b[k] * v[j - k];
        }
        out[j] = acc;
    }
    Ok(GridFunction::from_raw(out, u.norm_kind()))
}

fn adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, what: &str, x: f64) -> Result<(f64, f64)> {
    let out = quadrature::integrate(f, a, b, 1e-14);
    if !out.integral.is_finite() {
        return Err(Error::Quadrature(format!(
            "{what} at x = {x}: non-finite result"
        )));
    }
    Ok((out.integral, out.error_estimate))
}

/// `w(x)` by double-exponential quadrature.
///
/// On `[0, x/2]` the substitution `r = u(ξ)/u(x/2)` absorbs the
/// singularity of `u'` at 0; on `[x/2, x]` the variable `y = x − ξ` puts
/// the log singularity at an endpoint.
pub fn log_kernel_derivative_at(params: &LogExampleParams, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::domain(format!("x = {x} must lie in (0, 1]")));
    }
    let half = 0.5 * x;
    let eta0 = -(params.c * half).ln();
    let inv_kappa = 1.0 / params.kappa;
    let xi_of = |r: f64| (-eta0 * r.powf(-inv_kappa)).exp() / params.c;
    let (left, e1) = adaptive(|r| (x - xi_of(r)).ln(), 0.0, 1.0, "left half of w", x)?;
    let left = left * params.u(half);
    let e1 = e1 * params.u(half);
    let (right, e2) = adaptive(
        |y| {
            if y > 0.0 {
                y.ln() * params.u_prime(x - y)
            } else {
                0.0
            }
        },
        0.0,
        half,
        "right half of w",
        x,
    )?;
    let total = left + right;
    let err = e1 + e2;
    if err > W_REL_TOL * total.abs() + 1e-14 {
        return Err(Error::Quadrature(format!(
            "w({x}) = {total:e}: error estimate {err:e} exceeds relative tolerance {W_REL_TOL:e}"
        )));
    }
    Ok(total)
}

pub fn log_kernel_derivative(params: &LogExampleParams, x_points: &[f64]) -> Result<Vec<f64>> {
    x_points
        .iter()
        .map(|&x| log_kernel_derivative_at(params, x))
        .collect()
}

/// `w(x)` by composite Gauss–Legendre, independent of the adaptive path.
///
/// `[ξ₁, x/2]` in the variable `s = −log ξ` on panels of growing width,
/// `[x/2, x]` on a mesh graded with exponent 2 toward `ξ = x`, and the
/// remainder `[0, ξ₁]` as `log(x)·u(ξ₁)`.
pub fn log_kernel_derivative_graded(params: &LogExampleParams, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::domain(format!("x = {x} must lie in (0, 1]")));
    }
    let rule = gauss(16);
    let half = 0.5 * x;
    let xi1 = 1e-300_f64;
    let (s_lo, s_hi) = (-half.ln(), -xi1.ln());
    let mut total = x.ln() * params.u(xi1);

    // panel edges in s: widths 0.25, 0.5, 1, … up to s_hi
    let mut edges = vec![s_lo];
    let mut width = 0.25;
    while *edges.last().expect("nonempty") < s_hi {
        let next = (edges.last().expect("nonempty") + width).min(s_hi);
        edges.push(next);
        width = (width * 1.25).min(8.0);
    }
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        for &(t, w) in &rule {
            let s = 0.5 * (a + b) + 0.5 * (b - a) * t;
            let xi = (-s).exp();
            total += 0.5 * (b - a) * w * (x - xi).ln() * params.u_prime(xi) * xi;
        }
    }

    let panels = 400;
    for i in 0..panels {
        let y0 = half * (i as f64 / panels as f64).powi(2);
        let y1 = half * ((i + 1) as f64 / panels as f64).powi(2);
        for &(t, w) in &rule {
            let y = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * t;
            total += 0.5 * (y1 - y0) * w * y.ln() * params.u_prime(x - y);
        }
    }
    Ok(total)
}

/// `(Su)(x)` at an arbitrary point by double-exponential quadrature.
pub fn log_kernel_value(params: &LogExampleParams, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::domain(format!("x = {x} must lie in (0, 1]")));
    }
    let half = 0.5 * x;
    let (left, _) = adaptive(|xi| (x - xi).ln() * params.u(xi), 0.0, half, "Su", x)?;
    let (right, _) = adaptive(
        |y| {
            if y > 0.0 {
                y.ln() * params.u(x - y)
            } else {
                0.0
            }
        },
        0.0,
        half,
        "Su",
        x,
    )?;
    Ok(left + right)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCurve {
    /// `(k, 2^{-k}, w(2^{-k}))` for `k = 4..=20`.
    pub points: Vec<(u32, f64, f64)>,
    /// `|w(2^{-k})|` strictly decreasing in `k`.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeMatch {
    pub x: f64,
    pub h: f64,
    pub finite_difference: f64,
    pub w: f64,
    pub relative_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelDerivativeCheck {
    pub n: usize,
    pub epsilon: f64,
    pub points: Vec<f64>,
    pub relative_errors: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub params: LogExampleParams,
    pub w_decay_curve: DecayCurve,
    pub derivative_match: DerivativeMatch,
    pub cauchy_from_log_apply: bool,
    pub abel_derivative: AbelDerivativeCheck,
    pub verdict: bool,
}

pub fn w_decay_curve(params: &LogExampleParams) -> Result<DecayCurve> {
    let points: Vec<(u32, f64, f64)> = (4..=20)
        .map(|k| {
            let x = 2f64.powi(-(k as i32));
            log_kernel_derivative_at(params, x).map(|w| (k, x, w))
        })
        .collect::<Result<_>>()?;
    let monotone = points.windows(2).all(|p| p[1].2.abs() < p[0].2.abs());
    Ok(DecayCurve { points, monotone })
}

/// Central difference of `Su` against `w` at `x`.
pub fn derivative_match(params: &LogExampleParams, x: f64, h: f64) -> Result<DerivativeMatch> {
    let fd = (log_kernel_value(params, x + h)? - log_kernel_value(params, x - h)?) / (2.0 * h);
    let w = log_kernel_derivative_at(params, x)?;
    let relative_error = (fd - w).abs() / w.abs();
    Ok(DerivativeMatch {
        x,
        h,
        finite_difference: fd,
        w,
        relative_error,
        pass: relative_error <= 1e-3,
    })
}

/// Compares the central `p`-difference of `J_p u` at `p = 1` with
/// `Su − Γ'(1)·Ju` on a grid of size `n`.
pub fn abel_derivative_check(
    u: &GridFunction,
    points: &[f64],
    epsilon: f64,
) -> Result<AbelDerivativeCheck> {
    let n = u.len() - 1;
    let op = DiscreteOperator::integration(n, u.norm_kind())?;
    let up = fractional_power_exact(&op, 1.0 + epsilon, u)?;
    let down = fractional_power_exact(&op, 1.0 - epsilon, u)?;
    let dp = up.lincomb(0.5 / epsilon, &down, -0.5 / epsilon)?;
    let su = log_kernel_apply(u)?;
    let ju = op.apply(u)?;
    let rhs = su.lincomb(1.0, &ju, -GAMMA_PRIME_ONE)?;
    let mut relative_errors = Vec::with_capacity(points.len());
    for &x in points {
        let j = (x * n as f64).round() as usize;
        let (l, r) = (dp.values()[j], rhs.values()[j]);
        relative_errors.push((l - r).abs() / r.abs());
    }
    let pass = relative_errors.iter().all(|e| *e <= 1e-3);
    Ok(AbelDerivativeCheck {
        n,
        epsilon,
        points: points.to_vec(),
        relative_errors,
        pass,
    })
}

/// Interior points used for the identity check.
pub const ABEL_CHECK_POINTS: [f64; 5] = [0.125, 0.25, 0.375, 0.5, 0.75];

pub fn verify_membership(params: &LogExampleParams) -> Result<MembershipReport> {
    let w_decay_curve = w_decay_curve(params)?;
    let derivative_match = derivative_match(params, 0.5, 1e-4)?;
    let n_log = params.grid_sizes.first().copied().unwrap_or(256);
    let u = sample_u_log(params, n_log)?;
    let op = DiscreteOperator::integration(n_log, NormKind::Sup)?;
    let (_, conv) = log_apply(&op, &u, &default_schedule())?;
    let n_abel = params.grid_sizes.iter().copied().max().unwrap_or(512);
    let u_fine = sample_u_log(params, n_abel)?;
    let abel_derivative = abel_derivative_check(&u_fine, &ABEL_CHECK_POINTS, 1e-4)?;
    let verdict =
        w_decay_curve.monotone && derivative_match.pass && conv.cauchy && abel_derivative.pass;
    Ok(MembershipReport {
        params: params.clone(),
        w_decay_curve,
        derivative_match,
        cauchy_from_log_apply: conv.cauchy,
        abel_derivative,
        verdict,
    })
}
