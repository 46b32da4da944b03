//! Experiment configuration (TOML, `schema_version = 1`).

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::choice::DiscrepancyConfig;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::logarithm::{make_mixed_smooth_element, SourceCondition};
use crate::operator::{DiscreteOperator, OperatorSpec};
use crate::schemes::{RegularizerConfig, SchemeSpec};

pub const SCHEMA_VERSION: u32 = 1;

fn default_delta0() -> f64 {
    0.1
}

fn default_lambda_offset() -> f64 {
    1.0
}

fn default_c0() -> f64 {
    1.0
}

fn default_spread_tolerance() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_delta0")]
    pub delta0: f64,
    pub delta_ladder: Vec<f64>,
    /// Use `f†` itself as data (the noise level still drives the rule).
    #[serde(default)]
    pub exact_data: bool,
    #[serde(default = "default_spread_tolerance")]
    pub spread_tolerance: f64,
    pub operator: OperatorSpec,
    pub source: SourceSpec,
    pub scheme: SchemeSpec,
    pub rule: RuleSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub p: f64,
    pub nu: u32,
    /// `λ = log‖A‖ + lambda_offset`.
    #[serde(default = "default_lambda_offset")]
    pub lambda_offset: f64,
    pub w: WSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WSpec {
    Zero,
    /// Unit coordinate `e_k`, `k` counted from 1.
    Unit {
        k: usize,
    },
    /// Uniform entries in `(−1, 1)`, scaled to norm 1.
    Random {
        seed: u64,
    },
    /// One of `ones`, `linear`, `sqrt`, `sine`, `cosine`.
    Function {
        name: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RuleSpec {
    Apriori {
        #[serde(default = "default_c0")]
        c0: f64,
    },
    /// Omitted fields fall back to the band `[1.5 c0, 2 c0]` and the
    /// default walk.
    Discrepancy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b0: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b1: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha_max: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ratio: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bisect_tol: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub report_csv: String,
    pub plot_csv: String,
    pub summary_json: String,
    pub axioms_json: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            report_csv: "report.csv".into(),
            plot_csv: "plot.csv".into(),
            summary_json: "summary.json".into(),
            axioms_json: "axioms.json".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let path = e
                .span()
                .map(|s| format!("bytes {}..{}", s.start, s.end))
                .unwrap_or_else(|| "<root>".into());
            Error::config(path, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<root>", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        if !(self.delta0 > 0.0 && self.delta0 < 1.0) {
            return Err(Error::config("delta0", "must lie in (0, 1)"));
        }
        if self.delta_ladder.is_empty() {
            return Err(Error::config("delta_ladder", "must not be empty"));
        }
        for (i, d) in self.delta_ladder.iter().enumerate() {
            if !(*d > 0.0 && *d <= self.delta0) {
                return Err(Error::config(
                    format!("delta_ladder[{i}]"),
                    format!("{d} outside (0, delta0 = {}]", self.delta0),
                ));
            }
            if i > 0 && *d >= self.delta_ladder[i - 1] {
                return Err(Error::config(
                    format!("delta_ladder[{i}]"),
                    "ladder must be strictly decreasing",
                ));
            }
        }
        if !(self.spread_tolerance >= 1.0) {
            return Err(Error::config("spread_tolerance", "must be >= 1"));
        }
        let s = &self.source;
        if !(s.p >= 0.0 && s.p.is_finite()) {
            return Err(Error::config("source.p", "must be finite and >= 0"));
        }
        if s.nu < 1 {
            return Err(Error::config("source.nu", "must be >= 1"));
        }
        if !(s.lambda_offset > 0.0) {
            return Err(Error::config("source.lambda_offset", "must be > 0"));
        }
        let p0 = match self.scheme {
            SchemeSpec::Lavrentiev { m } => {
                if m < 1 {
                    return Err(Error::config("scheme.m", "must be >= 1"));
                }
                Some(m as f64)
            }
            SchemeSpec::Cauchy {
                substeps_per_unit_time,
            } => {
                if substeps_per_unit_time < 1 {
                    return Err(Error::config(
                        "scheme.substeps_per_unit_time",
                        "must be >= 1",
                    ));
                }
                None
            }
        };
        if let Some(p0) = p0 {
            if s.p >= p0 {
                return Err(Error::config(
                    "source.p",
                    format!("p = {} must stay below the saturation p0 = {p0}", s.p),
                ));
            }
        }
        match &self.rule {
            RuleSpec::Apriori { c0 } => {
                if !(*c0 > 0.0) {
                    return Err(Error::config("rule.c0", "must be > 0"));
                }
            }
            RuleSpec::Discrepancy { ratio, .. } => {
                if let Some(p0) = p0 {
                    if p0 <= 1.0 {
                        return Err(Error::config(
                            "scheme.m",
                            "discrepancy principle needs saturation p0 > 1",
                        ));
                    }
                    if s.p >= p0 - 1.0 {
                        return Err(Error::config(
                            "source.p",
                            format!("discrepancy principle needs p < p0 - 1 = {}", p0 - 1.0),
                        ));
                    }
                }
                if let Some(r) = ratio {
                    if !(*r > 0.0 && *r < 1.0) {
                        return Err(Error::config("rule.ratio", "must lie in (0, 1)"));
                    }
                }
            }
        }
        if let WSpec::Function { name } = &s.w {
            if named_function(name).is_none() {
                return Err(Error::config(
                    "source.w.name",
                    format!("unknown function `{name}`"),
                ));
            }
        }
        Ok(())
    }

    /// Applies the `--seed` and `--grid-n` overrides.
    pub fn with_overrides(mut self, seed: Option<u64>, grid_n: Option<usize>) -> Self {
        if let Some(seed) = seed {
            self.seed = seed;
        }
        if let Some(n) = grid_n {
            self.operator = self.operator.clone().with_grid_n(n);
        }
        self
    }

    pub fn build_operator(&self) -> Result<DiscreteOperator> {
        self.operator
            .build()
            .map_err(|e| Error::config("operator", e.to_string()))
    }

    pub fn discrepancy_config(
        &self,
        op: &DiscreteOperator,
        cfg: &RegularizerConfig,
    ) -> Result<Option<DiscrepancyConfig>> {
        let RuleSpec::Discrepancy {
            b0,
            b1,
            alpha_max,
            ratio,
            bisect_tol,
        } = &self.rule
        else {
            return Ok(None);
        };
        let mut d = DiscrepancyConfig::default_for(op, cfg)?;
        if let Some(v) = b0 {
            d.b0 = *v;
        }
        if let Some(v) = b1 {
            d.b1 = *v;
        }
        d.alpha_max = *alpha_max;
        if let Some(v) = ratio {
            d.ratio = *v;
        }
        if let Some(v) = bisect_tol {
            d.bisect_tol = *v;
        }
        let c0 = crate::choice::companion_bound(op, cfg)?;
        d.validate(c0)
            .map_err(|e| Error::config("rule", e.to_string()))?;
        Ok(Some(d))
    }
}

fn named_function(name: &str) -> Option<fn(f64) -> f64> {
    use std::f64::consts::PI;
    Some(match name {
        "ones" => |_| 1.0,
        "linear" => |x| x,
        "sqrt" => f64::sqrt,
        "sine" => |x| (PI * x).sin(),
        "cosine" => |x| (PI * x).cos(),
        _ => return None,
    })
}

impl WSpec {
    pub fn build(&self, op: &DiscreteOperator) -> Result<GridFunction> {
        match self {
            WSpec::Zero => Ok(op.zeros()),
            WSpec::Unit { k } => {
                if *k < 1 || *k > op.dim() {
                    return Err(Error::config(
                        "source.w.k",
                        format!("k = {k} outside 1..={}", op.dim()),
                    ));
                }
                let mut v = vec![0.0; op.dim()];
                v[k - 1] = 1.0;
                op.vector(v)
            }
            WSpec::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let v: Vec<f64> = (0..op.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let w = op.vector(v)?;
                let norm = w.norm();
                Ok(w.scale(1.0 / norm))
            }
            WSpec::Function { name } => {
                let f = named_function(name).ok_or_else(|| {
                    Error::config("source.w.name", format!("unknown function `{name}`"))
                })?;
                Ok(op.sample(f))
            }
        }
    }
}

/// The exact solution, the initial guess and the exact data.
#[derive(Debug, Clone)]
pub struct Problem {
    pub op: DiscreteOperator,
    pub source: SourceCondition,
    pub u_star: GridFunction,
    pub ubar: GridFunction,
    pub f_star: GridFunction,
}

/// `ū = 0`, `u† = ū − A^p(λI − log A)^{−ν} w`, `f† = A u†`.
pub fn build_problem(config: &ExperimentConfig) -> Result<Problem> {
    let op = config.build_operator()?;
    let w = config.source.w.build(&op)?;
    let lambda = op.omega() + config.source.lambda_offset;
    let source = SourceCondition::new(&op, config.source.p, config.source.nu, lambda, w)
        .map_err(|e| Error::config("source", e.to_string()))?;
    let element = make_mixed_smooth_element(&op, &source)?;
    let ubar = op.zeros();
    let u_star = ubar.sub(&element)?;
    let f_star = op.apply(&u_star)?;
    Ok(Problem {
        op,
        source,
        u_star,
        ubar,
        f_star,
    })
}
