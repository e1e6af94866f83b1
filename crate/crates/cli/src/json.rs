//! JSON shapes of the artifacts. Complex numbers are `{re, im}` objects.

use serde::{Deserialize, Serialize};
use viscap::{Method, ResonanceEstimate, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

impl From<Cx> for C64 {
    fn from(z: Cx) -> Self {
        C64::new(z.re, z.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateJson {
    pub lambda: Cx,
    pub multiplicity: usize,
    pub method: Method,
    pub epsilon: Option<f64>,
    pub error_estimate: f64,
}

impl From<&ResonanceEstimate> for EstimateJson {
    fn from(e: &ResonanceEstimate) -> Self {
        EstimateJson {
            lambda: e.lambda.into(),
            multiplicity: e.multiplicity,
            method: e.method,
            epsilon: e.epsilon,
            error_estimate: e.error_estimate,
        }
    }
}

impl From<&EstimateJson> for ResonanceEstimate {
    fn from(e: &EstimateJson) -> Self {
        ResonanceEstimate {
            lambda: e.lambda.into(),
            multiplicity: e.multiplicity,
            method: e.method,
            epsilon: e.epsilon,
            error_estimate: e.error_estimate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorJson {
    pub exit_code: i32,
    pub kind: String,
    pub message: String,
}
