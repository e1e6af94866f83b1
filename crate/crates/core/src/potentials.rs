//! Admissible potentials `|V(x)| ≤ C e^{-2γ|x|}` and their signed square-root
//! factorization.

use crate::assembly::Grid1D;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Catalog entry as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum PotentialKind {
    /// `V0 sech²(x)`
    Sech2 {
        #[serde(rename = "V0")]
        v0: f64,
    },
    /// `-V0 e^{-2γ|x|}`
    Expwell {
        #[serde(rename = "V0")]
        v0: f64,
        #[serde(default = "one")]
        gamma: f64,
    },
    /// `-V0 1[|x| ≤ a]`, half depth exactly at the jump.
    Square {
        #[serde(rename = "V0")]
        v0: f64,
        a: f64,
    },
    /// `V0 e^{-αx²}`
    Gaussian {
        #[serde(rename = "V0")]
        v0: f64,
        #[serde(default = "one")]
        alpha: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl PotentialKind {
    /// Smallest catalog envelope `|V(x)| ≤ C e^{-2γ|x|}` with γ = 1 (γ of the
    /// well itself for `expwell`).
    pub fn default_envelope(&self) -> Envelope {
        let pos = |c: f64| c.max(f64::MIN_POSITIVE);
        match *self {
            PotentialKind::Sech2 { v0 } => Envelope { c: pos(4.0 * v0.abs()), gamma: 1.0 },
            PotentialKind::Expwell { v0, gamma } => Envelope { c: pos(v0.abs()), gamma },
            PotentialKind::Square { v0, a } => Envelope { c: pos(v0.abs() * (2.0 * a).exp()), gamma: 1.0 },
            PotentialKind::Gaussian { v0, alpha } => {
                Envelope { c: pos(v0.abs() * (1.0 / alpha).exp()), gamma: 1.0 }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    #[serde(rename = "C")]
    pub c: f64,
    pub gamma: f64,
}

/// `{"kind": .., "params": {..}, "envelope": {"C": .., "gamma": ..}}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub kind: PotentialKind,
    pub envelope: Envelope,
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        Potential::from_kind(&self.kind, self.envelope.c, self.envelope.gamma)
    }
}

#[derive(Clone)]
pub struct Potential {
    pub name: String,
    evaluator: Evaluator,
    pub envelope_c: f64,
    pub envelope_gamma: f64,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("name", &self.name)
            .field("envelope_c", &self.envelope_c)
            .field("envelope_gamma", &self.envelope_gamma)
            .finish()
    }
}

impl Potential {
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        envelope_c: f64,
        envelope_gamma: f64,
    ) -> Result<Self> {
        if !(envelope_c > 0.0 && envelope_c.is_finite()) {
            return Err(Error::Config(format!("envelope C must be positive, got {envelope_c}")));
        }
        if !(envelope_gamma > 0.0 && envelope_gamma.is_finite()) {
            return Err(Error::Config(format!(
                "envelope gamma must be positive, got {envelope_gamma}"
            )));
        }
        Ok(Potential {
            name: name.into(),
            evaluator: Arc::new(f),
            envelope_c,
            envelope_gamma,
        })
    }

    pub fn from_kind(kind: &PotentialKind, c: f64, gamma: f64) -> Result<Self> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Config(format!("{what} must be finite")))
            }
        };
        match *kind {
            PotentialKind::Sech2 { v0 } => {
                let v0 = finite(v0, "V0")?;
                Self::custom(format!("sech2(V0={v0})"), move |x| v0 / x.cosh().powi(2), c, gamma)
            }
            PotentialKind::Expwell { v0, gamma: g } => {
                let v0 = finite(v0, "V0")?;
                if !(g > 0.0) {
                    return Err(Error::Config("expwell gamma must be positive".into()));
                }
                Self::custom(
                    format!("expwell(V0={v0},gamma={g})"),
                    move |x| -v0 * (-2.0 * g * x.abs()).exp(),
                    c,
                    gamma,
                )
            }
            PotentialKind::Square { v0, a } => {
                let v0 = finite(v0, "V0")?;
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::Config("square well half-width must be positive".into()));
                }
                Self::custom(
                    format!("square(V0={v0},a={a})"),
                    move |x| {
                        let t = x.abs();
                        if t < a {
                            -v0
                        } else if t == a {
                            -0.5 * v0
                        } else {
                            0.0
                        }
                    },
                    c,
                    gamma,
                )
            }
            PotentialKind::Gaussian { v0, alpha } => {
                let v0 = finite(v0, "V0")?;
                if !(alpha > 0.0) {
                    return Err(Error::Config("gaussian alpha must be positive".into()));
                }
                Self::custom(
                    format!("gaussian(V0={v0},alpha={alpha})"),
                    move |x| v0 * (-alpha * x * x).exp(),
                    c,
                    gamma,
                )
            }
        }
    }

    pub fn sech2(v0: f64) -> Self {
        Self::from_kind(&PotentialKind::Sech2 { v0 }, 4.0 * v0.abs().max(f64::MIN_POSITIVE), 1.0)
            .expect("catalog potential")
    }

    pub fn zero() -> Self {
        Self::custom("zero", |_| 0.0, 1.0, 1.0).expect("catalog potential")
    }

    /// Unchecked evaluation for hot loops.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        (self.evaluator)(x)
    }

    pub fn sample(&self, g: &Grid1D) -> Vec<f64> {
        g.points.iter().map(|&x| self.value(x)).collect()
    }
}

pub fn eval_potential(p: &Potential, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("potential evaluated at non-finite x = {x}")));
    }
    let v = p.value(x);
    if !v.is_finite() {
        return Err(Error::Domain(format!("{} is not finite at x = {x}", p.name)));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub pass: bool,
    /// min over the grid of `C e^{-2γ|x|} - |V(x)|`
    pub margin: f64,
    pub worst_x: f64,
}

pub fn verify_envelope(p: &Potential, g: &Grid1D) -> EnvelopeReport {
    let mut margin = f64::INFINITY;
    let mut worst_x = f64::NAN;
    let mut pass = true;
    for &x in &g.points {
        let bound = p.envelope_c * (-2.0 * p.envelope_gamma * x.abs()).exp();
        let v = p.value(x).abs();
        // Far tails compare two numbers below the rounding level of each other.
        if !(v <= bound * (1.0 + 1e-12)) {
            pass = false;
        }
        let m = bound - v;
        if m < margin || worst_x.is_nan() {
            margin = m;
            worst_x = x;
        }
    }
    EnvelopeReport { pass, margin, worst_x }
}

/// `v = sign(V)|V|^{1/2}`, `w = |V|^{1/2}` on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub source: String,
}

impl Factorization {
    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|&w| w == 0.0)
    }

    pub fn potential_values(&self) -> Vec<f64> {
        self.v.iter().zip(&self.w).map(|(a, b)| a * b).collect()
    }
}

pub fn factorize(p: &Potential, g: &Grid1D) -> Factorization {
    let (v, w) = g
        .points
        .iter()
        .map(|&x| {
            let val = p.value(x);
            let r = val.abs().sqrt();
            (if val < 0.0 { -r } else { r }, r)
        })
        .unzip();
    Factorization { v, w, source: p.name.clone() }
}
