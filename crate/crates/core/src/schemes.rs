//! Regularization schemes `u_α = ū − R_α(Aū − f)` with companion
//! `S_α = I − R_α A`: iterated Lavrentiev and the abstract Cauchy method.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional::fractional_power_composed;
use crate::grid::GridFunction;
use crate::operator::{DiscreteOperator, OperatorKind};

/// Default implicit Euler substeps per unit time.
pub const DEFAULT_SUBSTEPS: usize = 64;
/// Refinement stops once the step count per unit time would exceed this.
pub const MAX_SUBSTEPS_PER_UNIT_TIME: usize = 1 << 14;
const CAUCHY_REL_TOL: f64 = 1e-6;

fn default_substeps() -> usize {
    DEFAULT_SUBSTEPS
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SchemeSpec {
    Lavrentiev {
        m: u32,
    },
    /// Implicit Euler with one Richardson step, integrated to `t = 1/α`.
    Cauchy {
        #[serde(default = "default_substeps")]
        substeps_per_unit_time: usize,
    },
}

/// A scheme bound to an operator, with its saturation and constants.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizerConfig {
    scheme: SchemeSpec,
    kappa_star: f64,
    diagonal: bool,
    uncertified: bool,
}

impl RegularizerConfig {
    pub fn new(op: &DiscreteOperator, scheme: SchemeSpec) -> Result<Self> {
        match scheme {
            SchemeSpec::Lavrentiev { m } if m < 1 => {
                return Err(Error::domain("lavrentiev needs m >= 1"))
            }
            SchemeSpec::Cauchy {
                substeps_per_unit_time,
            } if substeps_per_unit_time < 1 => {
                return Err(Error::domain("cauchy needs substeps_per_unit_time >= 1"))
            }
            _ => {}
        }
        let uncertified =
            matches!(scheme, SchemeSpec::Cauchy { .. }) && op.kind() == OperatorKind::Integration;
        Ok(Self {
            scheme,
            kappa_star: op.kappa_star(),
            diagonal: op.sigma().is_some(),
            uncertified,
        })
    }

    pub fn lavrentiev(op: &DiscreteOperator, m: u32) -> Result<Self> {
        Self::new(op, SchemeSpec::Lavrentiev { m })
    }

    pub fn cauchy(op: &DiscreteOperator, substeps_per_unit_time: usize) -> Result<Self> {
        Self::new(
            op,
            SchemeSpec::Cauchy {
                substeps_per_unit_time,
            },
        )
    }

    pub fn scheme(&self) -> SchemeSpec {
        self.scheme
    }

    /// Saturation; `None` stands for `∞`.
    pub fn p0(&self) -> Option<f64> {
        match self.scheme {
            SchemeSpec::Lavrentiev { m } => Some(m as f64),
            SchemeSpec::Cauchy { .. } => None,
        }
    }

    /// Certified `c_p` in `‖S_α A^p‖ ≤ c_p α^p`, when one is known.
    ///
    /// On the diagonal kind these are the sharp scalar maxima. Otherwise
    /// Lavrentiev uses `(κ*+1)^m` for integer `p` and `2(κ*+1)^{p+1}`
    /// for fractional `p`.
    pub fn c_p(&self, p: f64) -> Option<f64> {
        if p < 0.0 {
            return None;
        }
        match self.scheme {
            SchemeSpec::Lavrentiev { m } => {
                let m = m as f64;
                if p > m {
                    None
                } else if self.diagonal {
                    let r = p / m;
                    Some(pow0(r, p) * pow0(1.0 - r, m - p))
                } else if p.fract() == 0.0 {
                    Some((self.kappa_star + 1.0).powf(m))
                } else {
                    Some(2.0 * (self.kappa_star + 1.0).powf(p + 1.0))
                }
            }
            SchemeSpec::Cauchy { .. } => self.diagonal.then(|| pow0(p / std::f64::consts::E, p)),
        }
    }

    /// Growth constant in `α‖R_α‖ ≤ c*`.
    pub fn c_star(&self) -> Option<f64> {
        match self.scheme {
            SchemeSpec::Lavrentiev { m } => {
                let k = self.kappa_star;
                Some(m as f64 * k * (k + 1.0).powi(m as i32 - 1))
            }
            SchemeSpec::Cauchy { .. } => self.diagonal.then_some(1.0),
        }
    }

    /// Set when the scheme runs outside the setting where it is certified.
    pub fn caveat(&self) -> Option<&'static str> {
        self.uncertified.then_some(
            "cauchy method on the integration operator: the strong sectorial condition fails, results are not certified",
        )
    }
}

/// `x^y` with `0^0 = 1`.
fn pow0(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        1.0
    } else {
        x.powf(y)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha = {alpha} must be > 0")));
    }
    Ok(())
}

/// `m` steps of `(A + αI) v_k = α v_{k−1} + f`, `v_0 = ū`.
pub fn lavrentiev_iterated(
    op: &DiscreteOperator,
    m: u32,
    alpha: f64,
    f: &GridFunction,
    ubar: &GridFunction,
) -> Result<GridFunction> {
    check_alpha(alpha)?;
    let mut v = ubar.clone();
    for _ in 0..m {
        let rhs = v.lincomb(alpha, f, 1.0)?;
        v = op.shifted_solve(alpha, &rhs)?;
    }
    Ok(v)
}

/// Solves `u' + Au = f`, `u(0) = ū` up to `t = 1/α`.
pub fn cauchy_method(
    op: &DiscreteOperator,
    alpha: f64,
    f: &GridFunction,
    ubar: &GridFunction,
    substeps_per_unit_time: usize,
) -> Result<GridFunction> {
    check_alpha(alpha)?;
    f.check_len(op.dim())?;
    ubar.check_len(op.dim())?;
    let t = 1.0 / alpha;
    if let Some(sigma) = op.sigma() {
        let out = sigma
            .iter()
            .zip(f.values().iter().zip(ubar.values()))
            .map(|(&s, (&fk, &uk))| {
                let decay = (-t * s).exp();
                let flow = -(-t * s).exp_m1() / s;
                decay * uk + flow * fk
            })
            .collect();
        return Ok(GridFunction::from_raw(out, f.norm_kind()));
    }
    let first = ((substeps_per_unit_time.max(1) as f64) * t).ceil().max(1.0) as usize;
    let cap = (MAX_SUBSTEPS_PER_UNIT_TIME as f64 * t.max(1.0)).ceil() as usize;
    let mut coarse = implicit_euler(op, t, first, f, ubar)?;
    let mut steps = first;
    let mut best: Option<GridFunction> = None;
    loop {
        let fine = implicit_euler(op, t, 2 * steps, f, ubar)?;
        let extrapolated = fine.lincomb(2.0, &coarse, -1.0)?;
        if let Some(prev) = &best {
            let change = extrapolated.distance(prev)?;
            if change <= CAUCHY_REL_TOL * extrapolated.norm().max(f64::MIN_POSITIVE) {
                return Ok(extrapolated);
            }
        }
        best = Some(extrapolated);
        steps *= 2;
        if 2 * steps > cap {
            return Ok(best.expect("set above"));
        }
        coarse = fine;
    }
}

fn implicit_euler(
    op: &DiscreteOperator,
    t: f64,
    steps: usize,
    f: &GridFunction,
    u0: &GridFunction,
) -> Result<GridFunction> {
    let tau = t / steps as f64;
    let shift = 1.0 / tau;
    let mut u = u0.clone();
    for _ in 0..steps {
        let rhs = u.lincomb(shift, f, 1.0)?;
        u = op.shifted_solve(shift, &rhs)?;
    }
    Ok(u)
}

/// `u_α = ū − R_α(Aū − f^δ)`.
pub fn regularize(
    op: &DiscreteOperator,
    cfg: &RegularizerConfig,
    alpha: f64,
    f_delta: &GridFunction,
    ubar: &GridFunction,
) -> Result<GridFunction> {
    match cfg.scheme {
        SchemeSpec::Lavrentiev { m } => lavrentiev_iterated(op, m, alpha, f_delta, ubar),
        SchemeSpec::Cauchy {
            substeps_per_unit_time,
        } => cauchy_method(op, alpha, f_delta, ubar, substeps_per_unit_time),
    }
}

/// `R_α g`.
pub fn regularizer_apply(
    op: &DiscreteOperator,
    cfg: &RegularizerConfig,
    alpha: f64,
    g: &GridFunction,
) -> Result<GridFunction> {
    regularize(op, cfg, alpha, g, &op.zeros().with_norm(g.norm_kind()))
}

/// `S_α u`: `α^m (A + αI)^{−m} u` or `e^{−A/α} u`.
pub fn companion_apply(
    op: &DiscreteOperator,
    cfg: &RegularizerConfig,
    alpha: f64,
    u: &GridFunction,
) -> Result<GridFunction> {
    check_alpha(alpha)?;
    match cfg.scheme {
        SchemeSpec::Lavrentiev { m } => {
            let mut v = u.clone();
            for _ in 0..m {
                v = op.shifted_solve(alpha, &v)?.scale(alpha);
            }
            Ok(v)
        }
        SchemeSpec::Cauchy {
            substeps_per_unit_time,
        } => {
            let zero = op.zeros().with_norm(u.norm_kind());
            cauchy_method(op, alpha, &zero, u, substeps_per_unit_time)
        }
    }
}

/// Probe vectors for operator-norm estimates: unit vectors on the diagonal
/// kind (exact), a fixed family of grid functions otherwise.
pub fn probe_set(op: &DiscreteOperator) -> Vec<GridFunction> {
    if op.sigma().is_some() {
        return (0..op.dim())
            .map(|k| {
                let mut v = vec![0.0; op.dim()];
                v[k] = 1.0;
                GridFunction::from_raw(v, op.norm_kind())
            })
            .collect();
    }
    let n = op.n();
    let mut out = vec![
        op.sample(|_| 1.0),
        op.sample(|x| x),
        op.sample(f64::sqrt),
        op.sample(|x| (std::f64::consts::PI * x).sin()),
        op.sample(|x| (5.0 * std::f64::consts::PI * x).cos()),
        op.sample(|x| (1.0 - x) * (1.0 - x)),
    ];
    out.push(GridFunction::from_raw(
        (0..=n)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 })
            .collect(),
        op.norm_kind(),
    ));
    out
}

/// `‖S_α A^p u‖/(α^p ‖u‖)` maximized over the probe set, per `α`.
fn qualification_ratios(
    op: &DiscreteOperator,
    cfg: &RegularizerConfig,
    p: f64,
    alpha_grid: &[f64],
) -> Result<Vec<f64>> {
    let probes: Vec<(GridFunction, f64)> = probe_set(op)
        .into_iter()
        .map(|u| {
            let nu = u.norm();
            fractional_power_composed(op, p, &u).map(|v| (v, nu))
        })
        .collect::<Result<_>>()?;
    alpha_grid
        .iter()
        .map(|&alpha| {
            let mut best: f64 = 0.0;
            for (apu, nu) in &probes {
                let s = companion_apply(op, cfg, alpha, apu)?;
                best = best.max(s.norm() / (alpha.powf(p) * nu));
            }
            Ok(best)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualificationReport {
    pub p: f64,
    pub sup_ratio: f64,
    pub bound: Option<f64>,
    /// `sup_ratio ≤ bound` when a certified bound exists.
    pub pass: Option<bool>,
}

/// Empirical `sup_α ‖S_α A^p‖/α^p` against the certified `c_p`.
pub fn qualification_check(
    op: &DiscreteOperator,
    cfg: &RegularizerConfig,
    p: f64,
    alpha_grid: &[f64],
) -> Result<QualificationReport> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::domain(format!("p = {p} must be finite and >= 0")));
    }
    if let Some(p0) = cfg.p0() {
        if p > p0 {
            return Err(Error::domain(format!(
                "beyond saturation: p = {p} > p0 = {p0}"
            )));
        }
    }
    if alpha_grid.is_empty() {
        return Err(Error::domain("empty alpha grid"));
    }
    let sup_ratio = qualification_ratios(op, cfg, p, alpha_grid)?
        .into_iter()
        .fold(0.0, f64::max);
    let bound = cfg.c_p(p);
    // relative slack for rounding in the sharp bounds
    let pass = bound.map(|c| sup_ratio <= c * (1.0 + 1e-12));
    Ok(QualificationReport {
        p,
        sup_ratio,
        bound,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaturationProbe {
    pub p: f64,
    pub alphas: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Least-squares slope of `−log ratio` against `−log α` on the smaller
    /// half of the grid.
    pub growth_exponent: f64,
    pub diverging: bool,
}

/// Growth rate of `‖S_α A^p‖/α^p` as `α ↓ 0`, for any `p ≥ 0`.
pub fn saturation_probe(
    op: &DiscreteOperator,
    cfg: &RegularizerConfig,
    p: f64,
    alpha_grid: &[f64],
) -> Result<SaturationProbe> {
    if alpha_grid.len() < 4 {
        return Err(Error::domain("saturation probe needs at least four alphas"));
    }
    let mut alphas = alpha_grid.to_vec();
    alphas.sort_by(|a, b| b.total_cmp(a));
    let ratios = qualification_ratios(op, cfg, p, &alphas)?;
    let lower = alphas.len() / 2;
    let xs: Vec<f64> = alphas[lower..].iter().map(|a| -a.ln()).collect();
    let ys: Vec<f64> = ratios[lower..].iter().map(|r| r.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let growth_exponent = sxy / sxx;
    Ok(SaturationProbe {
        p,
        alphas,
        ratios,
        growth_exponent,
        diverging: growth_exponent > 0.02,
    })
}

/// `sup α‖R_α f‖/‖f‖` over the probe set and `alpha_grid`.
pub fn growth_constant(
    op: &DiscreteOperator,
    cfg: &RegularizerConfig,
    alpha_grid: &[f64],
    probes: &[GridFunction],
) -> Result<f64> {
    let mut best: f64 = 0.0;
    for &alpha in alpha_grid {
        for f in probes {
            let nf = f.norm();
            if nf == 0.0 {
                continue;
            }
            best = best.max(alpha * regularizer_apply(op, cfg, alpha, f)?.norm() / nf);
        }
    }
    Ok(best)
}

/// `‖R_α A u − A R_α u‖/‖u‖`, maximized over inputs.
pub fn commutation_defect(
    op: &DiscreteOperator,
    cfg: &RegularizerConfig,
    alpha_grid: &[f64],
    probes: &[GridFunction],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &alpha in alpha_grid {
        for u in probes {
            let nu = u.norm();
            if nu == 0.0 {
                continue;
            }
            let left = regularizer_apply(op, cfg, alpha, &op.apply(u)?)?;
            let right = op.apply(&regularizer_apply(op, cfg, alpha, u)?)?;
            worst = worst.max(left.distance(&right)? / nu);
        }
    }
    Ok(worst)
}
