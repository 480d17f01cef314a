//! JSON problem files.
//!
//! ```json
//! {
//!   "interval": [0.0, 1.0],
//!   "p":   {"kind": "expr", "name": "sin"},
//!   "u":   {"kind": "expr", "name": "step", "params": {"x0": 0.5, "height": 2.0}},
//!   "rho": {"kind": "samples", "x": [0.0, 1.0], "values": [1.0, 2.0]},
//!   "rho_prime": {"kind": "expr", "name": "constant", "params": {"value": 1.0}},
//!   "breakpoints": [0.5]
//! }
//! ```
//!
//! `p` and `u` default to zero. Expression profiles may carry a complex
//! multiplier `"scale": [re, im]`; sample values may be real numbers or
//! `[re, im]` pairs.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientSet, IngestOptions, Interval, Primitive, Profile, SampledProfile};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SampleValue {
    Real(f64),
    Complex([f64; 2]),
}

impl SampleValue {
    fn to_complex(&self) -> Complex64 {
        match self {
            SampleValue::Real(v) => Complex64::new(*v, 0.0),
            SampleValue::Complex([re, im]) => Complex64::new(*re, *im),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    Expr {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, serde_json::Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<[f64; 2]>,
    },
    Samples {
        x: Vec<f64>,
        values: Vec<SampleValue>,
    },
}

impl ProfileSpec {
    pub fn constant(value: f64) -> Self {
        let mut params = BTreeMap::new();
        params.insert("value".into(), value.into());
        ProfileSpec::Expr { name: "constant".into(), params, scale: None }
    }

    pub fn to_profile(&self) -> Result<Profile> {
        match self {
            ProfileSpec::Expr { name, params, scale } => {
                let primitive = primitive_from(name, params)?;
                let scale = scale.map(|[re, im]| Complex64::new(re, im)).unwrap_or(Complex64::new(1.0, 0.0));
                Ok(Profile::scaled(primitive, scale))
            }
            ProfileSpec::Samples { x, values } => {
                let values = values.iter().map(SampleValue::to_complex).collect();
                Ok(Profile::Samples(SampledProfile::new(x.clone(), values)?))
            }
        }
    }
}

fn primitive_from(name: &str, params: &BTreeMap<String, serde_json::Value>) -> Result<Primitive> {
    let allowed: &[&str] = match name {
        "constant" => &["value"],
        "polynomial" => &["coeffs"],
        "sin" | "cos" => &["amplitude", "frequency", "phase", "offset"],
        "exp" => &["amplitude", "rate", "offset"],
        "step" => &["x0", "height", "base"],
        "sawtooth" => &["period", "amplitude", "origin"],
        other => return Err(Error::Spec(format!("unknown primitive '{other}'"))),
    };
    if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Spec(format!("primitive '{name}' has no parameter '{bad}'")));
    }
    let num = |key: &str, default: Option<f64>| -> Result<f64> {
        match params.get(key) {
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Spec(format!("parameter '{key}' of '{name}' must be a finite number"))),
            None => default.ok_or_else(|| Error::Spec(format!("primitive '{name}' requires '{key}'"))),
        }
    };
    Ok(match name {
        "constant" => Primitive::Constant { value: num("value", None)? },
        "polynomial" => {
            let coeffs = params
                .get("coeffs")
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::Spec("polynomial requires 'coeffs' array".into()))?
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| Error::Spec("polynomial coeffs must be numbers".into())))
                .collect::<Result<Vec<_>>>()?;
            Primitive::Polynomial { coeffs }
        }
        "sin" => Primitive::Sin {
            amplitude: num("amplitude", Some(1.0))?,
            frequency: num("frequency", Some(1.0))?,
            phase: num("phase", Some(0.0))?,
            offset: num("offset", Some(0.0))?,
        },
        "cos" => Primitive::Cos {
            amplitude: num("amplitude", Some(1.0))?,
            frequency: num("frequency", Some(1.0))?,
            phase: num("phase", Some(0.0))?,
            offset: num("offset", Some(0.0))?,
        },
        "exp" => Primitive::Exp {
            amplitude: num("amplitude", Some(1.0))?,
            rate: num("rate", Some(1.0))?,
            offset: num("offset", Some(0.0))?,
        },
        "step" => Primitive::Step {
            x0: num("x0", None)?,
            height: num("height", Some(1.0))?,
            base: num("base", Some(0.0))?,
        },
        "sawtooth" => {
            let period = num("period", None)?;
            if period <= 0.0 {
                return Err(Error::Spec("sawtooth period must be positive".into()));
            }
            Primitive::Sawtooth { period, amplitude: num("amplitude", Some(1.0))?, origin: num("origin", Some(0.0))? }
        }
        _ => unreachable!(),
    })
}

fn zero_profile() -> ProfileSpec {
    ProfileSpec::constant(0.0)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub interval: [f64; 2],
    #[serde(default = "zero_profile")]
    pub p: ProfileSpec,
    #[serde(default = "zero_profile")]
    pub u: ProfileSpec,
    pub rho: ProfileSpec,
    pub rho_prime: ProfileSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breakpoints: Vec<f64>,
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Spec(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Build and validate a [`CoefficientSet`] from a problem description.
pub fn ingest_coefficients(spec: &ProblemSpec, opts: &IngestOptions) -> Result<CoefficientSet> {
    let interval = Interval::new(spec.interval[0], spec.interval[1])?;
    CoefficientSet::new(
        interval,
        spec.p.to_profile()?,
        spec.u.to_profile()?,
        spec.rho.to_profile()?,
        spec.rho_prime.to_profile()?,
        &spec.breakpoints,
        opts,
    )
}
