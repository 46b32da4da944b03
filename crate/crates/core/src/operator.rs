//! Discretized operators of positive type.
//!
//! Volterra kinds (the integration operator `J` and the Abel operators `J_α`)
//! are discretized by node-centred product integration: the grid value `u_i`
//! is held constant on `[x_i − h/2, x_i + h/2] ∩ [0, x_j]` and the kernel
//! `(x_j − ξ)^{α−1}/Γ(α)` is integrated exactly over each piece. The result is
//! a lower-triangular matrix that is Toeplitz on the columns `i ≥ 1` and has a
//! half-cell column for `u_0`; it reproduces `J_α 1 = x^α/Γ(α+1)` exactly and
//! reduces to the trapezoidal rule for `α = 1`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, NormKind};

/// Number of points in the default positive-type probe grid.
pub const DEFAULT_KAPPA_GRID_POINTS: usize = 60;

const POWER_ITERATION_TOL: f64 = 1e-8;
const POWER_ITERATION_MAX: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    Integration,
    Abel { order: f64 },
    Diagonal,
}

/// `a^β − b^β` for `a > b ≥ 0`, divided by `Γ(β+1)`, without overflow or
/// cancellation for small `β`.
fn scaled_power_diff(a: f64, b: f64, beta: f64, lg: f64) -> f64 {
    if b <= 0.0 {
        return (beta * a.ln() - lg).exp();
    }
    (beta * b.ln() - lg).exp() * (beta * (a / b).ln()).exp_m1()
}

/// Product-integration weights of a given order on `n` intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductWeights {
    order: f64,
    n: usize,
    /// `toeplitz[k]` multiplies `u_{j−k}` in row `j` (for `j − k ≥ 1`).
    toeplitz: Vec<f64>,
    /// `first_column[j]` multiplies `u_0` in row `j`; `first_column[0] = 0`.
    first_column: Vec<f64>,
}

impl ProductWeights {
    /// Weights of `J_β`; `β = 0` yields the identity on indices `≥ 1`.
    pub fn new(order: f64, n: usize) -> Self {
        assert!(order >= 0.0 && order.is_finite(), "order must be >= 0");
        assert!(n >= 1, "need at least one interval");
        let h = 1.0 / n as f64;
        let lg = if order == 0.0 || order == 1.0 {
            0.0
        } else {
            ln_gamma(order + 1.0)
        };
        let mut toeplitz = Vec::with_capacity(n);
        toeplitz.push(scaled_power_diff(0.5 * h, 0.0, order, lg));
        for k in 1..n {
            let kf = k as f64;
            toeplitz.push(scaled_power_diff((kf + 0.5) * h, (kf - 0.5) * h, order, lg));
        }
        let mut first_column = vec![0.0; n + 1];
        for (j, c) in first_column.iter_mut().enumerate().skip(1) {
            let jf = j as f64;
            *c = scaled_power_diff(jf * h, (jf - 0.5) * h, order, lg);
        }
        Self {
            order,
            n,
            toeplitz,
            first_column,
        }
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn toeplitz(&self) -> &[f64] {
        &self.toeplitz
    }

    pub fn first_column(&self) -> &[f64] {
        &self.first_column
    }

    /// Matrix entry `(j, i)`.
    pub fn entry(&self, j: usize, i: usize) -> f64 {
        if j == 0 || i > j {
            0.0
        } else if i == 0 {
            self.first_column[j]
        } else {
            self.toeplitz[j - i]
        }
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        debug_assert_eq!(u.len(), self.n + 1);
        let mut out = vec![0.0; self.n + 1];
        for j in 1..=self.n {
            let mut acc = self.first_column[j] * u[0];
            for i in 1..=j {
                acc += self.toeplitz[j - i] * u[i];
            }
            out[j] = acc;
        }
        out
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        out[0] = (1..=self.n).map(|j| self.first_column[j] * y[j]).sum();
        for i in 1..=self.n {
            let mut acc = 0.0;
            for j in i..=self.n {
                acc += self.toeplitz[j - i] * y[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Forward substitution for `(A + αI) v = f`.
    pub fn shifted_solve(&self, alpha: f64, f: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.n + 1];
        v[0] = f[0] / alpha;
        let pivot = self.toeplitz[0] + alpha;
        for j in 1..=self.n {
            let mut acc = f[j] - self.first_column[j] * v[0];
            for i in 1..j {
                acc -= self.toeplitz[j - i] * v[i];
            }
            v[j] = acc / pivot;
        }
        v
    }

    /// Back substitution for `(A + αI)ᵀ v = f`.
    pub fn shifted_solve_transpose(&self, alpha: f64, f: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.n + 1];
        let pivot = self.toeplitz[0] + alpha;
        for i in (1..=self.n).rev() {
            let mut acc = f[i];
            for j in i + 1..=self.n {
                acc -= self.toeplitz[j - i] * v[j];
            }
            v[i] = acc / pivot;
        }
        let tail: f64 = (1..=self.n).map(|j| self.first_column[j] * v[j]).sum();
        v[0] = (f[0] - tail) / alpha;
        v
    }

    /// Exact `‖(A + αI)^{-1}‖_∞` (maximum absolute row sum).
    ///
    /// The lower-right block of the inverse is Toeplitz with first column
    /// equal to the reciprocal power series of `(w_0 + α, w_1, …)`.
    fn inverse_sup_norm(&self, alpha: f64) -> f64 {
        let n = self.n;
        let pivot = self.toeplitz[0] + alpha;
        let mut g = vec![0.0; n];
        g[0] = 1.0 / pivot;
        for k in 1..n {
            let mut acc = 0.0;
            for i in 1..=k {
                acc += self.toeplitz[i] * g[k - i];
            }
            g[k] = -acc / pivot;
        }
        // column 0 of the inverse: −(T + α)^{-1} c / α
        let mut rhs = self.first_column.clone();
        rhs[0] = 0.0;
        let mut tc = vec![0.0; n + 1];
        for j in 1..=n {
            let mut acc = 0.0;
            for i in 1..=j {
                acc += g[j - i] * rhs[i];
            }
            tc[j] = acc;
        }
        let mut best = 1.0 / alpha;
        let mut partial = 0.0;
        for j in 1..=n {
            partial += g[j - 1].abs();
            best = best.max(partial + tc[j].abs() / alpha);
        }
        best
    }
}

/// How the diagonal entries of a diagonal operator are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SigmaRule {
    /// `σ_k = exp(−rate·k)`, `k = 1..=modes`.
    Exponential {
        modes: usize,
        rate: f64,
    },
    /// `σ_k = k^{−exponent}`, `k = 1..=modes`.
    Power {
        modes: usize,
        exponent: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
}

impl SigmaRule {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SigmaRule::Exponential { modes, rate } => {
                (1..=*modes).map(|k| (-rate * k as f64).exp()).collect()
            }
            SigmaRule::Power { modes, exponent } => {
                (1..=*modes).map(|k| (k as f64).powf(-exponent)).collect()
            }
            SigmaRule::Explicit { values } => values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KindSpec {
    Integration { n: usize },
    Abel { n: usize, order: f64 },
    Diagonal { sigma: SigmaRule },
}

/// Serializable description of a [`DiscreteOperator`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    #[serde(flatten)]
    pub kind: KindSpec,
    #[serde(default)]
    pub norm: NormKind,
}

impl OperatorSpec {
    /// Replaces the grid size (Volterra kinds) or the mode count (generated
    /// diagonal rules).
    pub fn with_grid_n(mut self, n: usize) -> Self {
        match &mut self.kind {
            KindSpec::Integration { n: m } | KindSpec::Abel { n: m, .. } => *m = n,
            KindSpec::Diagonal { sigma } => match sigma {
                SigmaRule::Exponential { modes, .. } | SigmaRule::Power { modes, .. } => *modes = n,
                SigmaRule::Explicit { .. } => {}
            },
        }
        self
    }

    pub fn build(&self) -> Result<DiscreteOperator> {
        match &self.kind {
            KindSpec::Integration { n } => DiscreteOperator::integration(*n, self.norm),
            KindSpec::Abel { n, order } => DiscreteOperator::abel(*n, *order, self.norm),
            KindSpec::Diagonal { sigma } => DiscreteOperator::diagonal(sigma.values(), self.norm),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Volterra(ProductWeights),
    Diagonal(Vec<f64>),
}

/// An immutable discretized positive-type operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    kind: OperatorKind,
    norm_kind: NormKind,
    repr: Repr,
    kappa_star: f64,
    op_norm: f64,
}

/// `count` log-spaced points over `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && count >= 1);
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

impl DiscreteOperator {
    pub fn integration(n: usize, norm_kind: NormKind) -> Result<Self> {
        Self::volterra(OperatorKind::Integration, 1.0, n, norm_kind)
    }

    pub fn abel(n: usize, order: f64, norm_kind: NormKind) -> Result<Self> {
        if !(order > 0.0 && order <= 1.0) {
            return Err(Error::domain(format!("Abel order {order} outside (0, 1]")));
        }
        Self::volterra(OperatorKind::Abel { order }, order, n, norm_kind)
    }

    fn volterra(kind: OperatorKind, order: f64, n: usize, norm_kind: NormKind) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("grid needs n >= 1 intervals"));
        }
        let mut op = Self {
            kind,
            norm_kind,
            repr: Repr::Volterra(ProductWeights::new(order, n)),
            kappa_star: f64::NAN,
            op_norm: f64::NAN,
        };
        op.op_norm = op.compute_op_norm();
        op.kappa_star = op.estimate_postype_constant(&op.default_kappa_grid())?;
        Ok(op)
    }

    /// Diagonal operator; `sigma` must be positive and nonincreasing.
    /// Its positive-type constant is exactly 1 (self-adjoint case).
    pub fn diagonal(sigma: Vec<f64>, norm_kind: NormKind) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::domain("diagonal operator needs at least one entry"));
        }
        if sigma.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::domain(
                "diagonal entries must be finite and positive",
            ));
        }
        if sigma.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::domain("diagonal entries must be nonincreasing"));
        }
        let op_norm = sigma[0];
        Ok(Self {
            kind: OperatorKind::Diagonal,
            norm_kind,
            repr: Repr::Diagonal(sigma),
            kappa_star: 1.0,
            op_norm,
        })
    }

    /// The scaled operator `a·A` (`a > 0`).
    pub fn rescaled(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::domain("rescaling factor must be positive"));
        }
        match &self.repr {
            Repr::Diagonal(s) => Self::diagonal(s.iter().map(|v| a * v).collect(), self.norm_kind),
            Repr::Volterra(_) => Err(Error::domain(
                "rescaling is only provided for the diagonal kind",
            )),
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm_kind
    }

    /// Length of the grid functions this operator acts on.
    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Volterra(w) => w.n + 1,
            Repr::Diagonal(s) => s.len(),
        }
    }

    /// Number of grid intervals (Volterra) or modes (diagonal).
    pub fn n(&self) -> usize {
        match &self.repr {
            Repr::Volterra(w) => w.n,
            Repr::Diagonal(s) => s.len(),
        }
    }

    pub fn is_volterra(&self) -> bool {
        matches!(self.repr, Repr::Volterra(_))
    }

    /// Kernel order of the base operator (1 for `J`, `α` for `J_α`).
    pub fn base_order(&self) -> Option<f64> {
        match &self.repr {
            Repr::Volterra(w) => Some(w.order),
            Repr::Diagonal(_) => None,
        }
    }

    pub fn weights(&self) -> Option<&ProductWeights> {
        match &self.repr {
            Repr::Volterra(w) => Some(w),
            Repr::Diagonal(_) => None,
        }
    }

    pub fn sigma(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Diagonal(s) => Some(s),
            Repr::Volterra(_) => None,
        }
    }

    pub fn kappa_star(&self) -> f64 {
        self.kappa_star
    }

    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    /// `ω = log ‖A‖`.
    pub fn omega(&self) -> f64 {
        self.op_norm.ln()
    }

    pub fn zeros(&self) -> GridFunction {
        GridFunction::zeros(self.dim(), self.norm_kind)
    }

    /// Grid function in this operator's space from raw values.
    pub fn vector(&self, values: Vec<f64>) -> Result<GridFunction> {
        let u = GridFunction::new(values, self.norm_kind)?;
        u.check_len(self.dim())?;
        Ok(u)
    }

    /// Samples `f` on the grid nodes; for the diagonal kind, at `k/len`.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        let d = self.dim();
        let values = match &self.repr {
            Repr::Volterra(w) => (0..d).map(|j| f(j as f64 / w.n as f64)).collect(),
            Repr::Diagonal(_) => (0..d).map(|k| f((k + 1) as f64 / d as f64)).collect(),
        };
        GridFunction::from_raw(values, self.norm_kind)
    }

    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        u.check_len(self.dim())?;
        let out = match &self.repr {
            Repr::Volterra(w) => w.apply(u.values()),
            Repr::Diagonal(s) => s.iter().zip(u.values()).map(|(s, v)| s * v).collect(),
        };
        Ok(GridFunction::from_raw(out, u.norm_kind()))
    }

    /// Solves `(A + αI) v = f`.
    pub fn shifted_solve(&self, alpha: f64, f: &GridFunction) -> Result<GridFunction> {
        if !(alpha > 0.0) {
            return Err(Error::domain(format!("shift alpha = {alpha} must be > 0")));
        }
        f.check_len(self.dim())?;
        let out = match &self.repr {
            Repr::Volterra(w) => w.shifted_solve(alpha, f.values()),
            Repr::Diagonal(s) => s
                .iter()
                .zip(f.values())
                .map(|(s, v)| v / (s + alpha))
                .collect(),
        };
        Ok(GridFunction::from_raw(out, f.norm_kind()))
    }

    /// Default probe grid: 60 log-spaced points over `[1e-8‖A‖, 1e4‖A‖]`.
    pub fn default_kappa_grid(&self) -> Vec<f64> {
        log_spaced(
            1e-8 * self.op_norm,
            1e4 * self.op_norm,
            DEFAULT_KAPPA_GRID_POINTS,
        )
    }

    /// `max_α α‖(A + αI)^{-1}‖` over `alpha_grid`, in the induced norm.
    pub fn estimate_postype_constant(&self, alpha_grid: &[f64]) -> Result<f64> {
        if alpha_grid.is_empty() {
            return Err(Error::domain("empty alpha grid"));
        }
        if alpha_grid.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::domain("alpha grid must be positive"));
        }
        Ok(alpha_grid
            .iter()
            .map(|&a| a * self.resolvent_norm(a))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// `‖(A + αI)^{-1}‖` in the induced operator norm.
    pub fn resolvent_norm(&self, alpha: f64) -> f64 {
        match (&self.repr, self.norm_kind) {
            (Repr::Diagonal(s), _) => s.iter().map(|s| 1.0 / (s + alpha)).fold(0.0, f64::max),
            (Repr::Volterra(w), NormKind::Sup) => w.inverse_sup_norm(alpha),
            (Repr::Volterra(w), NormKind::L2Scaled) => power_iteration(w.n + 1, |x| {
                let y = w.shifted_solve(alpha, x);
                w.shifted_solve_transpose(alpha, &y)
            }),
        }
    }

    fn compute_op_norm(&self) -> f64 {
        match (&self.repr, self.norm_kind) {
            (Repr::Diagonal(s), _) => s[0],
            (Repr::Volterra(w), NormKind::Sup) => (0..=w.n)
                .map(|j| (0..=j).map(|i| w.entry(j, i).abs()).sum::<f64>())
                .fold(0.0, f64::max),
            (Repr::Volterra(w), NormKind::L2Scaled) => {
                power_iteration(w.n + 1, |x| w.apply_transpose(&w.apply(x)))
            }
        }
    }
}

/// Square root of the dominant eigenvalue of the symmetric positive
/// semidefinite map `gram` (so the spectral norm of the underlying operator).
fn power_iteration<F: Fn(&[f64]) -> Vec<f64>>(dim: usize, gram: F) -> f64 {
    let mut x = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATION_MAX {
        let y = gram(&x);
        let rayleigh: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ny == 0.0 {
            return 0.0;
        }
        x = y.into_iter().map(|v| v / ny).collect();
        if (rayleigh - estimate).abs() <= POWER_ITERATION_TOL * rayleigh.abs() {
            return rayleigh.sqrt();
        }
        estimate = rayleigh;
    }
    estimate.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(w: &ProductWeights) -> Vec<Vec<f64>> {
        (0..=w.n())
            .map(|j| (0..=w.n()).map(|i| w.entry(j, i)).collect())
            .collect()
    }

    #[test]
    fn integration_is_exact_on_constants() {
        let op = DiscreteOperator::integration(64, NormKind::Sup).unwrap();
        let one = op.sample(|_| 1.0);
        let ju = op.apply(&one).unwrap();
        for (x, v) in one.nodes().iter().zip(ju.values()) {
            assert!((v - x).abs() < 1e-14);
        }
    }

    #[test]
    fn abel_row_sums_match_gamma_formula() {
        let alpha = 0.3;
        let w = ProductWeights::new(alpha, 50);
        let gamma = statrs::function::gamma::gamma(alpha + 1.0);
        for j in 0..=50 {
            let x = j as f64 / 50.0;
            let row: f64 = (0..=j).map(|i| w.entry(j, i)).sum();
            assert!((row - x.powf(alpha) / gamma).abs() < 1e-13, "row {j}");
            assert!((0..=j).all(|i| w.entry(j, i) >= 0.0));
        }
    }

    #[test]
    fn integration_matches_dense_product_on_linear() {
        let n = 40;
        let op = DiscreteOperator::integration(n, NormKind::Sup).unwrap();
        let u = op.sample(|x| x);
        let got = op.apply(&u).unwrap();
        let m = dense(op.weights().unwrap());
        for j in 0..=n {
            let want: f64 = (0..=n).map(|i| m[j][i] * u.values()[i]).sum();
            assert!((got.values()[j] - want).abs() < 1e-14);
            let x = j as f64 / n as f64;
            assert!((want - x * x / 2.0).abs() < 1.0 / n as f64);
        }
    }

    #[test]
    fn order_zero_is_identity_off_the_origin() {
        let w = ProductWeights::new(0.0, 8);
        for j in 1..=8 {
            for i in 0..=8 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(w.entry(j, i), want);
            }
        }
    }

    #[test]
    fn diagonal_apply_and_solve() {
        let op = DiscreteOperator::diagonal(vec![1.0, 0.5, 0.25], NormKind::Sup).unwrap();
        let u = op.vector(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(op.apply(&u).unwrap().values(), &[1.0, 0.5, 0.25]);
        let one = DiscreteOperator::diagonal(vec![1.0], NormKind::Sup).unwrap();
        let v = one
            .shifted_solve(1.0, &one.vector(vec![2.0]).unwrap())
            .unwrap();
        assert_eq!(v.values(), &[1.0]);
        assert_eq!(op.kappa_star(), 1.0);
        assert_eq!(op.omega(), 0.0);
    }

    #[test]
    fn diagonal_validation() {
        assert!(DiscreteOperator::diagonal(vec![], NormKind::Sup).is_err());
        assert!(DiscreteOperator::diagonal(vec![1.0, 0.0], NormKind::Sup).is_err());
        assert!(DiscreteOperator::diagonal(vec![0.5, 1.0], NormKind::Sup).is_err());
    }

    #[test]
    fn shifted_solve_rejects_nonpositive_alpha() {
        let op = DiscreteOperator::integration(8, NormKind::Sup).unwrap();
        let f = op.sample(|x| x);
        assert!(matches!(op.shifted_solve(0.0, &f), Err(Error::Domain(_))));
        assert!(matches!(op.shifted_solve(-1.0, &f), Err(Error::Domain(_))));
    }

    #[test]
    fn apply_rejects_wrong_dimension() {
        let op = DiscreteOperator::integration(8, NormKind::Sup).unwrap();
        let u = GridFunction::zeros(5, NormKind::Sup);
        assert!(matches!(
            op.apply(&u),
            Err(Error::DimensionMismatch {
                expected: 9,
                found: 5
            })
        ));
    }

    #[test]
    fn large_shift_is_neumann_leading_term() {
        for op in [
            DiscreteOperator::integration(32, NormKind::Sup).unwrap(),
            DiscreteOperator::abel(32, 0.5, NormKind::Sup).unwrap(),
            DiscreteOperator::diagonal(vec![1.0, 0.1, 0.01], NormKind::Sup).unwrap(),
        ] {
            let f = op.sample(|x| 1.0 + x * x);
            let alpha = 1e6 * op.op_norm();
            let v = op.shifted_solve(alpha, &f).unwrap();
            let lead = f.scale(1.0 / alpha);
            assert!(v.distance(&lead).unwrap() / lead.norm() <= 1e-5);
        }
    }

    #[test]
    fn transpose_solve_is_adjoint() {
        let w = ProductWeights::new(0.7, 12);
        let x: Vec<f64> = (0..13).map(|i| (i as f64 * 0.37).sin()).collect();
        let y: Vec<f64> = (0..13).map(|i| (i as f64 * 0.91).cos()).collect();
        let lhs: f64 = w
            .shifted_solve(0.3, &x)
            .iter()
            .zip(&y)
            .map(|(a, b)| a * b)
            .sum();
        let rhs: f64 = x
            .iter()
            .zip(w.shifted_solve_transpose(0.3, &y))
            .map(|(a, b)| a * b)
            .sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn inverse_sup_norm_matches_explicit_inverse() {
        let w = ProductWeights::new(1.0, 20);
        for alpha in [1e-3, 0.1, 2.0] {
            let mut best: f64 = 0.0;
            let cols: Vec<Vec<f64>> = (0..=20)
                .map(|i| {
                    let mut e = vec![0.0; 21];
                    e[i] = 1.0;
                    w.shifted_solve(alpha, &e)
                })
                .collect();
            for j in 0..=20 {
                best = best.max((0..=20).map(|i| cols[i][j].abs()).sum());
            }
            let fast = w.inverse_sup_norm(alpha);
            assert!((fast - best).abs() <= 1e-12 * best, "{fast} vs {best}");
        }
    }

    #[test]
    fn singleton_grid_on_unit_scalar() {
        let op = DiscreteOperator::diagonal(vec![1.0], NormKind::Sup).unwrap();
        let k = op.estimate_postype_constant(&[1.0]).unwrap();
        assert!((k - 0.5).abs() < 1e-15);
        assert!(op.estimate_postype_constant(&[]).is_err());
    }

    #[test]
    fn spec_round_trip_and_override() {
        let spec = OperatorSpec {
            kind: KindSpec::Diagonal {
                sigma: SigmaRule::Exponential {
                    modes: 5,
                    rate: 1.0,
                },
            },
            norm: NormKind::Sup,
        };
        let text = toml::to_string(&spec).unwrap();
        let back: OperatorSpec = toml::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let op = back.with_grid_n(7).build().unwrap();
        assert_eq!(op.dim(), 7);
        assert!((op.omega() + 1.0).abs() < 1e-15);
    }
}
