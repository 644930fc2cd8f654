//! Desk-scale simulator for a measurement-based continuous-variable
//! controlled-X (sum) gate built on a linear four-mode cluster state.
//!
//! The crate models the full optical protocol — off-line cluster
//! preparation from four squeezed seeds, 50:50 coupling of the input
//! target and control signals, homodyne detection, and classical
//! feed-forward displacements — and reports output variances against the
//! shot-noise limit, Gaussian fidelities against the ideal gate, and a
//! two-mode inseparability witness on the output pair.
//!
//! Two exact engines cover every run: a covariance engine that pushes
//! mean vectors and covariance matrices through the symplectic pipeline,
//! and a Heisenberg engine that tracks each output quadrature as an exact
//! linear combination of independent noise operators. A seeded Monte
//! Carlo sampler serves as an independent oracle for both.
//!
//! Quadrature convention: X = a + a†, Y = (a − a†)/i, vacuum variance 1;
//! quadratures are ordered (X₁, Y₁, …, X_N, Y_N).

pub mod cluster;
pub mod error;
pub mod gaussian;
pub mod heisenberg;
pub mod mc;
pub mod metrics;
pub mod protocol;
pub mod selftest;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, Homodyne, SqueezeAxis, SymplecticTransform, TransformSpec};
pub use mc::{mc_crosscheck, mc_estimate, McEstimate, McSettings};
pub use metrics::{
    duan_witness, entanglement_threshold_scan, gaussian_fidelity, ideal_reference, to_db,
    SingleModeGaussian, ThresholdScan,
};
pub use protocol::{
    ideal_controlled_x, modulation_scenarios, run_gate, EngineChoice, ExperimentConfig, GateReport,
    Gains, InputMeans, ModulationReport, OutQuad,
};
