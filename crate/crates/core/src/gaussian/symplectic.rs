//! Linear phase-space maps: squeezers, rotations, beamsplitters,
//! permutations, and displacements, all checked against S Ω Sᵀ = Ω.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::state::{symplectic_form, x_index, y_index};

/// Tolerance on the symplectic invariant |S Ω Sᵀ - Ω|∞.
pub const SYMPLECTIC_TOL: f64 = 1e-12;
/// Tolerance on orthogonality of user-supplied mixing matrices.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Which quadrature a squeezer attenuates: X-axis squeezing maps
/// X → e⁻ʳX, Y → e⁺ʳY; Y-axis the reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqueezeAxis {
    X,
    Y,
}

/// Declarative description of an elementary transform, convenient for
/// property tests over random specs.
#[derive(Debug, Clone)]
pub enum TransformSpec {
    Squeezer { mode: usize, r: f64, axis: SqueezeAxis },
    Rotation { mode: usize, theta: f64 },
    Beamsplitter { mode_a: usize, mode_b: usize, mix: [[f64; 2]; 2] },
    Permutation(Vec<usize>),
    Displacement(Vec<f64>),
}

/// A symplectic matrix plus a phase-space displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
    shift: DVector<f64>,
}

impl SymplecticTransform {
    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
            shift: DVector::zeros(2 * n_modes),
        }
    }

    pub fn make(n_modes: usize, spec: &TransformSpec) -> Result<Self> {
        match spec {
            TransformSpec::Squeezer { mode, r, axis } => Self::squeezer(n_modes, *mode, *r, *axis),
            TransformSpec::Rotation { mode, theta } => Self::rotation(n_modes, *mode, *theta),
            TransformSpec::Beamsplitter { mode_a, mode_b, mix } => {
                Self::beamsplitter(n_modes, *mode_a, *mode_b, *mix)
            }
            TransformSpec::Permutation(perm) => Self::permutation(perm),
            TransformSpec::Displacement(shift) => {
                Self::displacement(n_modes, DVector::from_vec(shift.clone()))
            }
        }
    }

    /// Single-mode squeezer with parameter r ≥ 0 along the given axis.
    pub fn squeezer(n_modes: usize, mode: usize, r: f64, axis: SqueezeAxis) -> Result<Self> {
        check_mode(n_modes, mode)?;
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidSqueezing(r));
        }
        let mut matrix = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let (down, up) = ((-r).exp(), r.exp());
        let (fx, fy) = match axis {
            SqueezeAxis::X => (down, up),
            SqueezeAxis::Y => (up, down),
        };
        matrix[(x_index(mode), x_index(mode))] = fx;
        matrix[(y_index(mode), y_index(mode))] = fy;
        Ok(Self {
            matrix,
            shift: DVector::zeros(2 * n_modes),
        })
    }

    /// Phase rotation by θ: X → cosθ·X + sinθ·Y, Y → −sinθ·X + cosθ·Y.
    pub fn rotation(n_modes: usize, mode: usize, theta: f64) -> Result<Self> {
        check_mode(n_modes, mode)?;
        let mut matrix = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let (c, s) = (theta.cos(), theta.sin());
        matrix[(x_index(mode), x_index(mode))] = c;
        matrix[(x_index(mode), y_index(mode))] = s;
        matrix[(y_index(mode), x_index(mode))] = -s;
        matrix[(y_index(mode), y_index(mode))] = c;
        Ok(Self {
            matrix,
            shift: DVector::zeros(2 * n_modes),
        })
    }

    /// Two-mode mixer: the orthogonal 2×2 `mix` acts identically on the X
    /// and Y quadratures of the pair, pinning all sign conventions
    /// explicitly rather than through a transmittance.
    pub fn beamsplitter(
        n_modes: usize,
        mode_a: usize,
        mode_b: usize,
        mix: [[f64; 2]; 2],
    ) -> Result<Self> {
        check_mode(n_modes, mode_a)?;
        check_mode(n_modes, mode_b)?;
        if mode_a == mode_b {
            return Err(Error::DuplicateMode(mode_a));
        }
        let defect = orthogonality_defect_2(&mix);
        if defect > ORTHOGONALITY_TOL {
            return Err(Error::NotOrthogonal { defect });
        }
        let mut matrix = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let modes = [mode_a, mode_b];
        for (bi, &mi) in modes.iter().enumerate() {
            // clear the identity rows of the pair
            matrix[(x_index(mi), x_index(mi))] = 0.0;
            matrix[(y_index(mi), y_index(mi))] = 0.0;
            for (bj, &mj) in modes.iter().enumerate() {
                matrix[(x_index(mi), x_index(mj))] = mix[bi][bj];
                matrix[(y_index(mi), y_index(mj))] = mix[bi][bj];
            }
        }
        Ok(Self {
            matrix,
            shift: DVector::zeros(2 * n_modes),
        })
    }

    /// Relabel modes: output mode i is input mode perm[i].
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        if n == 0 {
            return Err(Error::EmptyState);
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::BadPermutation);
            }
            seen[p] = true;
        }
        let mut matrix = DMatrix::zeros(2 * n, 2 * n);
        for (i, &p) in perm.iter().enumerate() {
            matrix[(x_index(i), x_index(p))] = 1.0;
            matrix[(y_index(i), y_index(p))] = 1.0;
        }
        Ok(Self {
            matrix,
            shift: DVector::zeros(2 * n),
        })
    }

    /// Pure phase-space displacement.
    pub fn displacement(n_modes: usize, shift: DVector<f64>) -> Result<Self> {
        if shift.len() != 2 * n_modes {
            return Err(Error::DimensionMismatch(format!(
                "displacement has length {}, expected {}",
                shift.len(),
                2 * n_modes
            )));
        }
        Ok(Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
            shift,
        })
    }

    /// N-mode mixer: an orthogonal N×N matrix applied identically to the
    /// X vector and the Y vector (a general passive linear network with
    /// real coefficients).
    pub fn orthogonal_mix(o: &DMatrix<f64>) -> Result<Self> {
        let n = o.nrows();
        if n == 0 {
            return Err(Error::EmptyState);
        }
        if o.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "mixing matrix is {}x{}, expected square",
                o.nrows(),
                o.ncols()
            )));
        }
        let gram = o * o.transpose();
        let defect = (gram - DMatrix::identity(n, n)).abs().max();
        if defect > ORTHOGONALITY_TOL {
            return Err(Error::NotOrthogonal { defect });
        }
        let mut matrix = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                matrix[(x_index(i), x_index(j))] = o[(i, j)];
                matrix[(y_index(i), y_index(j))] = o[(i, j)];
            }
        }
        Ok(Self {
            matrix,
            shift: DVector::zeros(2 * n),
        })
    }

    /// Build from an explicit matrix and shift, enforcing the symplectic
    /// invariant.
    pub fn from_matrix(matrix: DMatrix<f64>, shift: DVector<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() % 2 != 0 || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "symplectic matrix must be square and even-sized, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if shift.len() != matrix.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "shift has length {}, matrix is {}x{}",
                shift.len(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let t = Self { matrix, shift };
        t.validate()?;
        Ok(t)
    }

    /// Composition `later ∘ self`: apply `self` first, then `later`.
    pub fn then(&self, later: &Self) -> Self {
        Self {
            matrix: later.matrix() * self.matrix(),
            shift: later.matrix() * self.shift() + later.shift(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn shift(&self) -> &DVector<f64> {
        &self.shift
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// |S Ω Sᵀ - Ω|∞; zero (to tolerance) for every valid transform.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(self.n_modes());
        (&self.matrix * &omega * self.matrix.transpose() - omega)
            .abs()
            .max()
    }

    pub fn validate(&self) -> Result<()> {
        let defect = self.symplectic_defect();
        if defect > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic { defect });
        }
        Ok(())
    }
}

fn check_mode(n_modes: usize, mode: usize) -> Result<()> {
    if mode >= n_modes {
        return Err(Error::ModeIndex {
            index: mode,
            n_modes,
        });
    }
    Ok(())
}

fn orthogonality_defect_2(m: &[[f64; 2]; 2]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let dot = m[i][0] * m[j][0] + m[i][1] * m[j][1];
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - expect).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::state::GaussianState;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_squeezing_is_identity() {
        let s = SymplecticTransform::squeezer(1, 0, 0.0, SqueezeAxis::X).unwrap();
        assert_eq!(s.matrix(), &DMatrix::identity(2, 2));
    }

    #[test]
    fn squeezed_vacuum_variance_closed_form() {
        // X-variance of squeezed vacuum is e^{-2r}
        let s = SymplecticTransform::squeezer(1, 0, 0.35, SqueezeAxis::X).unwrap();
        let st = GaussianState::vacuum(1).unwrap().apply(&s).unwrap();
        assert_abs_diff_eq!(
            st.quadrature_variance(0, 0.0).unwrap(),
            (-0.7f64).exp(), // 0.49659
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            st.quadrature_variance(0, std::f64::consts::FRAC_PI_2).unwrap(),
            (0.7f64).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn quarter_wave_rotation_swaps_quadratures() {
        // -90°: X' = -Y, Y' = X
        let rot = SymplecticTransform::rotation(1, 0, -std::f64::consts::FRAC_PI_2).unwrap();
        let m = rot.matrix();
        assert_abs_diff_eq!(m[(0, 0)], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 1)], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn non_orthogonal_mix_rejected() {
        let err = SymplecticTransform::beamsplitter(2, 0, 1, [[1.0, 1.0], [0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NotOrthogonal { .. }));
    }

    #[test]
    fn out_of_range_mode_rejected() {
        assert!(matches!(
            SymplecticTransform::squeezer(2, 2, 0.1, SqueezeAxis::X),
            Err(Error::ModeIndex { .. })
        ));
        assert!(matches!(
            SymplecticTransform::rotation(1, 3, 0.2),
            Err(Error::ModeIndex { .. })
        ));
    }

    #[test]
    fn bad_permutation_rejected() {
        assert!(matches!(
            SymplecticTransform::permutation(&[0, 0]),
            Err(Error::BadPermutation)
        ));
        assert!(matches!(
            SymplecticTransform::permutation(&[1, 2]),
            Err(Error::BadPermutation)
        ));
    }

    #[test]
    fn constructors_are_symplectic() {
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let ts = [
            SymplecticTransform::squeezer(3, 1, 0.9, SqueezeAxis::Y).unwrap(),
            SymplecticTransform::rotation(3, 2, 1.1).unwrap(),
            SymplecticTransform::beamsplitter(3, 0, 2, [[half, half], [-half, half]]).unwrap(),
            SymplecticTransform::permutation(&[2, 0, 1]).unwrap(),
        ];
        for t in &ts {
            assert!(t.symplectic_defect() <= SYMPLECTIC_TOL, "{:e}", t.symplectic_defect());
        }
    }

    #[test]
    fn composition_matches_sequential_application() {
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let t1 = SymplecticTransform::squeezer(2, 0, 0.4, SqueezeAxis::X).unwrap();
        let t2 = SymplecticTransform::beamsplitter(2, 0, 1, [[half, half], [-half, half]]).unwrap();
        let st = GaussianState::vacuum(2).unwrap();
        let seq = st.apply(&t1).unwrap().apply(&t2).unwrap();
        let combined = st.apply(&t1.then(&t2)).unwrap();
        assert!((seq.cov() - combined.cov()).abs().max() < 1e-12);
        assert!((seq.mean() - combined.mean()).abs().max() < 1e-12);
    }
}
