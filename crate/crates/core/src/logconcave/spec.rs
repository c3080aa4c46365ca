use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{generalized_covariogram, mollify, CovariogramKind, IntegrationMode, LogConcaveFn, MollifySpec};
use crate::error::{Error, Result};
use crate::geometry::BodySpec;

/// `{"family": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    Gaussian {
        covariance: Vec<Vec<f64>>,
    },
    ExpNorm {
        dim: usize,
        c: f64,
    },
    Indicator {
        body: BodySpec,
    },
    /// `e^{-(b·x + xᵀ Q x)}`.
    QuadraticExponential {
        quadratic: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        linear: Option<Vec<f64>>,
    },
    Product {
        factors: Vec<FunctionSpec>,
    },
    Restriction {
        function: Box<FunctionSpec>,
        body: BodySpec,
    },
    Mollified {
        function: Box<FunctionSpec>,
        k: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mc_samples: Option<usize>,
    },
}

/// `{"covariogram": {"kind": ..., "body": {...}, "samples": N, "seed": s}}`.
/// Without `samples` the deterministic cubature path is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovariogramSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<Box<FunctionSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Box<FunctionSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "Value")]
pub enum FunctionSpec {
    Family(FamilySpec),
    Covariogram { covariogram: CovariogramSpec },
}

impl TryFrom<Value> for FunctionSpec {
    type Error = String;

    fn try_from(v: Value) -> std::result::Result<Self, String> {
        let obj = v.as_object().ok_or("function spec must be a JSON object")?;
        if obj.contains_key("covariogram") {
            if obj.len() != 1 {
                return Err("a covariogram spec has the single key `covariogram`".into());
            }
            let c = serde_json::from_value(obj["covariogram"].clone()).map_err(|e| format!("covariogram: {e}"))?;
            Ok(FunctionSpec::Covariogram { covariogram: c })
        } else if obj.contains_key("family") {
            let name = obj["family"].as_str().unwrap_or("?").to_string();
            serde_json::from_value(v)
                .map(FunctionSpec::Family)
                .map_err(|e| format!("family `{name}`: {e}"))
        } else {
            Err("function spec needs a `family` or a `covariogram` key".into())
        }
    }
}

fn need<T: Clone>(field: &Option<T>, name: &str, kind: &str) -> Result<T> {
    field
        .clone()
        .ok_or_else(|| Error::Spec(format!("covariogram kind `{kind}` needs `{name}`")))
}

impl CovariogramSpec {
    pub fn build(&self) -> Result<LogConcaveFn> {
        let mode = match self.samples {
            Some(samples) => IntegrationMode::MonteCarlo {
                samples,
                seed: self.seed.unwrap_or(0),
            },
            None => IntegrationMode::Exact {
                nodes: self.nodes.unwrap_or(12),
            },
        };
        let k = self.kind.as_str();
        let kind = match k {
            "classical" => CovariogramKind::Classical {
                body: need(&self.body, "body", k)?.build()?,
            },
            "weighted" => CovariogramKind::Weighted {
                body: need(&self.body, "body", k)?.build()?,
                density: need(&self.density, "density", k)?.build()?,
            },
            "l1" => CovariogramKind::L1 {
                f: need(&self.function, "function", k)?.build()?,
            },
            "l2" => CovariogramKind::L2 {
                f: need(&self.function, "function", k)?.build()?,
            },
            "m-order" => CovariogramKind::MOrder {
                body: need(&self.body, "body", k)?.build()?,
                m: need(&self.m, "m", k)?,
            },
            "l1-m-order" => CovariogramKind::L1MOrder {
                f: need(&self.function, "function", k)?.build()?,
                m: need(&self.m, "m", k)?,
            },
            other => {
                return Err(Error::Spec(format!(
                    "unknown covariogram kind `{other}` (expected classical, weighted, l1, l2, m-order, l1-m-order)"
                )))
            }
        };
        if k == "classical" && self.samples.is_none() {
            // the exact polytope path
            if let CovariogramKind::Classical { body } = &kind {
                return LogConcaveFn::covariogram(body);
            }
        }
        generalized_covariogram(kind, mode)
    }
}

impl FamilySpec {
    pub fn build(&self) -> Result<LogConcaveFn> {
        match self {
            FamilySpec::Gaussian { covariance } => LogConcaveFn::gaussian(covariance),
            FamilySpec::ExpNorm { dim, c } => LogConcaveFn::exp_norm(*dim, *c),
            FamilySpec::Indicator { body } => LogConcaveFn::indicator(body.build()?),
            FamilySpec::QuadraticExponential { quadratic, linear } => {
                let b = linear.clone().unwrap_or_else(|| vec![0.0; quadratic.len()]);
                LogConcaveFn::quadratic_exponential(b, quadratic)
            }
            FamilySpec::Product { factors } => {
                LogConcaveFn::product(factors.iter().map(|f| f.build()).collect::<Result<Vec<_>>>()?)
            }
            FamilySpec::Restriction { function, body } => LogConcaveFn::restrict(function.build()?, body.build()?),
            FamilySpec::Mollified {
                function,
                k,
                seed,
                mc_samples,
            } => {
                let mut spec = MollifySpec::default();
                if let Some(s) = seed {
                    spec.seed = *s;
                }
                if let Some(m) = mc_samples {
                    spec.mc_samples = *m;
                }
                Ok(mollify(&function.build()?, *k, &spec)?.function)
            }
        }
    }
}

impl FunctionSpec {
    pub fn build(&self) -> Result<LogConcaveFn> {
        match self {
            FunctionSpec::Family(f) => f.build(),
            FunctionSpec::Covariogram { covariogram } => covariogram.build(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
