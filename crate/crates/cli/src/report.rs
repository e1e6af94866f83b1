//! Cross-method count check: CAP eigenvalues at the last ε against the
//! Birman-Schwinger zeros.

use serde::Serialize;
use viscap::{Error, ResonanceEstimate, Result, C64};

use crate::json::Cx;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareEntry {
    pub oracle: Cx,
    pub multiplicity: usize,
    /// Final-ε CAP eigenvalues (sector images) in the open disc of radius δ.
    pub cap_count: usize,
    pub pass: bool,
    pub nearest_cap: Option<Cx>,
    pub distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub delta: f64,
    pub epsilon_last: Option<f64>,
    pub pass: bool,
    pub entries: Vec<CompareEntry>,
    /// Largest |λ_CAP - λ_BS| over oracle resonances with a CAP eigenvalue in the disc.
    pub max_pair_distance: Option<f64>,
}

pub fn compare_report(final_lambdas: &[C64], epsilon_last: Option<f64>, oracle: &[ResonanceEstimate], delta: f64) -> Result<CompareReport> {
    if !(delta > 0.0) {
        return Err(Error::Config(format!("delta must be positive, got {delta}")));
    }
    for (i, a) in oracle.iter().enumerate() {
        for b in &oracle[i + 1..] {
            let sep = (a.lambda - b.lambda).norm();
            if !(delta < 0.5 * sep) {
                return Err(Error::Config(format!(
                    "delta = {delta} is not below half the oracle separation {sep} ({} vs {})",
                    a.lambda, b.lambda
                )));
            }
        }
    }
    let mut entries = Vec::new();
    let mut max_pair: Option<f64> = None;
    for o in oracle.iter().filter(|o| o.multiplicity >= 1) {
        let inside: Vec<C64> = final_lambdas.iter().copied().filter(|l| (l - o.lambda).norm() < delta).collect();
        let nearest = final_lambdas
            .iter()
            .copied()
            .min_by(|a, b| (a - o.lambda).norm().total_cmp(&(b - o.lambda).norm()));
        let distance = nearest.map(|l| (l - o.lambda).norm());
        if !inside.is_empty() {
            let d = distance.unwrap_or(f64::NAN);
            max_pair = Some(max_pair.map_or(d, |m: f64| m.max(d)));
        }
        let pass = inside.len() == o.multiplicity;
        let diagnostic = (!pass).then(|| match distance {
            Some(d) => format!(
                "{} CAP eigenvalues within {delta} of {} (multiplicity {}); nearest at distance {d:e}",
                inside.len(),
                o.lambda,
                o.multiplicity
            ),
            None => format!("no CAP eigenvalues in omega at the last epsilon; expected {}", o.multiplicity),
        });
        entries.push(CompareEntry {
            oracle: o.lambda.into(),
            multiplicity: o.multiplicity,
            cap_count: inside.len(),
            pass,
            nearest_cap: nearest.map(Cx::from),
            distance,
            diagnostic,
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(CompareReport { delta, epsilon_last, pass, entries, max_pair_distance: max_pair })
}
