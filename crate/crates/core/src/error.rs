use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("QR iteration did not converge for {name} (order {order}) after {sweeps} sweeps")]
    NoConvergence {
        name: String,
        order: usize,
        sweeps: usize,
    },

    #[error("branch cut: {0}")]
    BranchCut(String),

    #[error("near-singular matrix in {context}: sigma_min = {sigma_min:e}")]
    Singular { context: String, sigma_min: f64 },

    #[error("contour failure: {0}")]
    Contour(String),

    #[error("unresolved region: {0}")]
    Unresolved(String),

    #[error("discrepancy: {0}")]
    Discrepancy(String),
}

impl Error {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Domain(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Domain(_) => "domain",
            Error::NoConvergence { .. } => "no_convergence",
            Error::BranchCut(_) => "branch_cut",
            Error::Singular { .. } => "singular",
            Error::Contour(_) => "contour",
            Error::Unresolved(_) => "unresolved",
            Error::Discrepancy(_) => "discrepancy",
        }
    }
}
