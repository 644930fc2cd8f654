//! Gaussian states, symplectic transforms, and homodyne measurement.

pub mod measure;
pub mod state;
pub mod symplectic;

pub use measure::Homodyne;
pub use state::{symplectic_form, x_index, y_index, GaussianState, SYMMETRY_TOL, UNCERTAINTY_TOL};
pub use symplectic::{SqueezeAxis, SymplecticTransform, TransformSpec, SYMPLECTIC_TOL};
