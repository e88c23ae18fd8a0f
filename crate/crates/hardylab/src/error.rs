//! Crate-wide error type.
//!
//! Numerical verdicts that are expected outcomes (a quotient that does not
//! exist at a given degree, an infeasible similarity certificate) are *not*
//! errors; they are encoded in the result types of the operations that
//! produce them. Errors are reserved for inputs outside an operation's
//! contract and for numerical failures that make the output meaningless.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Grid length must be a power of two and at least the series order.
    #[error("invalid grid: M={m} for series order {n} ({reason})")]
    InvalidGrid { m: usize, n: usize, reason: &'static str },

    /// Series order or matrix dimension outside the operation's contract.
    #[error("invalid order: {0}")]
    InvalidOrder(String),

    /// Point outside the operation's domain (e.g. kernel parameter with |a| >= 1).
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally degenerate input (empty basis, zero vector where a
    /// direction is required, rank-deficient column family).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Evaluation at a singularity (boundary atom of a singular inner function).
    #[error("singularity: evaluation at an atom of the singular part ({0})")]
    Singularity(String),

    /// A matrix was asked to act beyond its trusted block.
    #[error("trust violation: {0}")]
    TrustViolation(String),

    /// Geometry too ill-conditioned to certify (e.g. nearly coincident
    /// Blaschke zeros that the basis builder cannot separate).
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// The spectral-gap rule could not classify the singular spectrum;
    /// reports the values straddling the cut instead of guessing.
    #[error("gap ambiguity: sigma values {below:.3e} / {above:.3e} straddle cutoff {cutoff:.3e}")]
    GapAmbiguity { below: f64, above: f64, cutoff: f64 },

    /// The smallest eigenvalue of T*T fell under the left-invertibility floor.
    #[error("not left-invertible: min eig(T*T) = {min_eig:.3e} <= {floor:.3e}")]
    NotLeftInvertible { min_eig: f64, floor: f64 },

    /// A numerical routine failed to converge or lost too much accuracy;
    /// carries a short condition report.
    #[error("numerical failure in {op}: {report}")]
    NumericalFailure { op: &'static str, report: String },

    /// Configuration rejected before any computation ran.
    #[error("config error: {0}")]
    Config(String),

    /// I/O while reading config or writing reports.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Machine-readable error object used by the CLI (exit code 2 payloads).
    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            Error::InvalidGrid { .. } => "invalid-grid",
            Error::InvalidOrder(_) => "invalid-order",
            Error::Domain(_) => "domain",
            Error::Degenerate(_) => "degenerate-input",
            Error::Singularity(_) => "singularity",
            Error::TrustViolation(_) => "trust-violation",
            Error::Conditioning(_) => "conditioning",
            Error::GapAmbiguity { .. } => "gap-ambiguity",
            Error::NotLeftInvertible { .. } => "not-left-invertible",
            Error::NumericalFailure { .. } => "numerical-failure",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        };
        serde_json::json!({ "error": { "kind": kind, "message": self.to_string() } })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
