//! Rate functions `χ_{q,±μ}(t) = t^q log(1/t)^{±μ}` on `(0, 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiParams {
    pub q: f64,
    pub mu: f64,
    pub sign: ChiSign,
}

impl ChiParams {
    pub fn new(q: f64, mu: f64, sign: ChiSign) -> Result<Self> {
        if !(q >= 0.0 && q.is_finite()) || !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::domain(format!(
                "need q >= 0 and mu > 0, got q = {q}, mu = {mu}"
            )));
        }
        Ok(Self { q, mu, sign })
    }

    pub fn minus(q: f64, mu: f64) -> Result<Self> {
        Self::new(q, mu, ChiSign::Minus)
    }

    pub fn plus(q: f64, mu: f64) -> Result<Self> {
        Self::new(q, mu, ChiSign::Plus)
    }
}

pub fn chi(params: ChiParams, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::domain(format!("chi needs 0 < t < 1, got {t}")));
    }
    let log = -t.ln();
    let mu = match params.sign {
        ChiSign::Plus => params.mu,
        ChiSign::Minus => -params.mu,
    };
    Ok(t.powf(params.q) * log.powf(mu))
}

/// Solves `χ_{q,−μ}(t) = s` for `t ∈ (0, 1)`.
///
/// `χ_{q,−μ}` increases from 0 to ∞ on `(0, 1)`, so every `s > 0` has
/// exactly one preimage. Newton on `y = log(1/t)` with a bisection
/// safeguard, started from `q^{−μ/q} s^{1/q} log(1/s)^{μ/q}`.
pub fn chi_inverse(q: f64, mu: f64, s: f64) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) || !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!(
            "need q > 0 and mu > 0, got q = {q}, mu = {mu}"
        )));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain(format!(
            "chi_inverse needs finite s > 0, got {s}"
        )));
    }
    let ls = s.ln();
    // g is strictly decreasing in y, from +∞ at 0 to −∞
    let g = |y: f64| -q * y - mu * y.ln() - ls;
    let dg = |y: f64| -q - mu / y;

    let mut lo = 1e-300_f64.max(f64::MIN_POSITIVE);
    let mut hi = 1.0;
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::domain(format!("chi_inverse: s = {s} out of range")));
        }
    }
    let mut y = if s < 1.0 {
        let t0 = q.powf(-mu / q) * s.powf(1.0 / q) * (-ls).powf(mu / q);
        -t0.ln()
    } else {
        0.5 * (lo + hi)
    };
    if !(y > lo && y < hi) {
        y = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let gy = g(y);
        if gy.abs() <= 1e-15 * (1.0 + ls.abs()) {
            break;
        }
        if gy > 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let step = y - gy / dg(y);
        y = if step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    Ok((-y).exp())
}
