use thiserror::Error;

/// Errors produced by state construction, transforms, and the gate pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("state must have at least one mode")]
    EmptyState,
    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeIndex { index: usize, n_modes: usize },
    #[error("duplicate mode index {0} in selection")]
    DuplicateMode(usize),
    #[error("empty mode selection")]
    EmptySelection,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symplectic (max |S Omega S^T - Omega| = {defect:.3e})")]
    NotSymplectic { defect: f64 },
    #[error("mixing matrix must be orthogonal (max |M M^T - I| = {defect:.3e})")]
    NotOrthogonal { defect: f64 },
    #[error("permutation is not a bijection on mode indices")]
    BadPermutation,
    #[error("covariance must be symmetric (max |C - C^T| = {defect:.3e})")]
    NotSymmetric { defect: f64 },
    #[error("uncertainty relation violated (min eigenvalue of cov + i*Omega = {min_eig:.3e})")]
    UncertaintyViolated { min_eig: f64 },
    #[error("squeezing parameter must be finite and nonnegative, got {0}")]
    InvalidSqueezing(f64),
    #[error("feed-forward gain must be finite, got {0}")]
    InvalidGain(f64),
    #[error("input mean must be finite, got {0}")]
    InvalidMean(f64),
    #[error("single-mode covariance violates det(A) >= 1 (det = {det})")]
    UnphysicalSingleMode { det: f64 },
    #[error("exact engines disagree on {quantity}: covariance={covariance}, heisenberg={heisenberg}")]
    EngineMismatch {
        quantity: String,
        covariance: f64,
        heisenberg: f64,
    },
    #[error("monte carlo sample count must be at least {min}, got {got}")]
    TooFewSamples { min: u64, got: u64 },
    #[error("scan range is empty (r_min={r_min}, r_max={r_max}, step={step}); need r_min <= r_max and step > 0")]
    EmptyScan { r_min: f64, r_max: f64, step: f64 },
    #[error("dB conversion needs positive variance and SNL, got variance={variance}, snl={snl}")]
    NonPositiveDb { variance: f64, snl: f64 },
    #[error("modulation power must be a nonnegative dB value, got {0}")]
    NegativeModulationPower(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
