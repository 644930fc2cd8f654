//! Synthesis of the linear four-mode cluster state and its squeezed
//! correlation (nullifier) variances.
//!
//! The state is produced by squeezing four seed modes, pre-rotating two of
//! them by -90°, and mixing all four on an orthogonal network. With equal
//! squeezing r the four nullifier combinations
//!
//!   Y_b1 - Y_b2,   X_b1 + X_b2 + X_b3,   -Y_b2 + Y_b3 + Y_b4,   X_b3 - X_b4
//!
//! come out with variances 2e^{-2r}, 3e^{-2r}, 3e^{-2r}, 2e^{-2r} against
//! shot-noise limits of 2, 3, 3, 2.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, SqueezeAxis, SymplecticTransform};
use crate::heisenberg::{ModeCombos, NoiseLabel, QuadratureCombo};
use crate::metrics::to_db;

/// Squeezing axes, pre-rotations, and the orthogonal combination matrix
/// that turn four squeezed seeds into the linear cluster.
#[derive(Debug, Clone)]
pub struct ClusterNetwork {
    /// Per seed mode: which quadrature the squeezer attenuates.
    pub squeeze_axes: [SqueezeAxis; 4],
    /// Seed modes rotated by -90° (X' = -Y, Y' = X) before mixing.
    pub pre_rotated: [bool; 4],
    /// Orthogonal 4×4 matrix applied identically to the X and Y vectors.
    pub mix: DMatrix<f64>,
}

impl ClusterNetwork {
    /// The fixed network realizing the linear four-mode cluster.
    pub fn linear_four() -> Self {
        let c = std::f64::consts::FRAC_1_SQRT_2; // √2/2
        let p = 10.0f64.sqrt() / 5.0; // √10/5
        let q = 10.0f64.sqrt() / 10.0; // √10/10
        #[rustfmt::skip]
        let mix = DMatrix::from_row_slice(4, 4, &[
             c,  p,  q,  0.0,
            -c,  p,  q,  0.0,
            0.0, q, -p,   c,
            0.0, q, -p,  -c,
        ]);
        Self {
            squeeze_axes: [SqueezeAxis::Y, SqueezeAxis::X, SqueezeAxis::X, SqueezeAxis::Y],
            pre_rotated: [false, false, true, true],
            mix,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let gram = &self.mix * self.mix.transpose();
        let defect = (gram - DMatrix::identity(4, 4)).abs().max();
        if defect > 1e-12 {
            return Err(Error::NotOrthogonal { defect });
        }
        Ok(())
    }
}

/// The four-mode cluster in both engine representations.
#[derive(Debug, Clone)]
pub struct ClusterState {
    /// Covariance-engine representation (modes b1..b4).
    pub state: GaussianState,
    /// Heisenberg-engine representation: X/Y combos of b1..b4 over the
    /// seed labels.
    pub modes: [ModeCombos; 4],
}

/// Build the cluster with one squeezing parameter shared by all four seeds.
pub fn build_cluster(r: f64) -> Result<ClusterState> {
    build_cluster_per_mode([r; 4])
}

/// Build the cluster with per-seed squeezing parameters. Only the equal-r
/// case has the closed-form nullifier variances.
pub fn build_cluster_per_mode(rs: [f64; 4]) -> Result<ClusterState> {
    for &r in &rs {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidSqueezing(r));
        }
    }
    let network = ClusterNetwork::linear_four();
    network.validate()?;

    // covariance engine: vacuum → squeezers → pre-rotations → mixer
    let mut transform = SymplecticTransform::identity(4);
    for (mode, (&r, &axis)) in rs.iter().zip(network.squeeze_axes.iter()).enumerate() {
        transform = transform.then(&SymplecticTransform::squeezer(4, mode, r, axis)?);
    }
    for (mode, &rotated) in network.pre_rotated.iter().enumerate() {
        if rotated {
            transform =
                transform.then(&SymplecticTransform::rotation(4, mode, -std::f64::consts::FRAC_PI_2)?);
        }
    }
    transform = transform.then(&SymplecticTransform::orthogonal_mix(&network.mix)?);
    let state = GaussianState::vacuum(4)?.apply(&transform)?;

    // Heisenberg engine: the same network acting on label combos
    let mut seeds: [ModeCombos; 4] = std::array::from_fn(|i| ModeCombos {
        x: QuadratureCombo::label(NoiseLabel::SeedX(i as u8)),
        y: QuadratureCombo::label(NoiseLabel::SeedY(i as u8)),
    });
    for (mode, seed) in seeds.iter_mut().enumerate() {
        seed.squeeze(rs[mode], network.squeeze_axes[mode]);
        if network.pre_rotated[mode] {
            seed.rotate(-std::f64::consts::FRAC_PI_2);
        }
    }
    let modes: [ModeCombos; 4] = std::array::from_fn(|i| {
        let weights: Vec<(f64, &QuadratureCombo)> =
            (0..4).map(|j| (network.mix[(i, j)], &seeds[j].x)).collect();
        let x = QuadratureCombo::linear_combine(&weights);
        let weights: Vec<(f64, &QuadratureCombo)> =
            (0..4).map(|j| (network.mix[(i, j)], &seeds[j].y)).collect();
        let y = QuadratureCombo::linear_combine(&weights);
        ModeCombos { x, y }
    });

    Ok(ClusterState { state, modes })
}

/// The four nullifier combinations as Heisenberg combos, in the order of
/// the report.
pub fn nullifier_combos(cluster: &ClusterState) -> [QuadratureCombo; 4] {
    let b = &cluster.modes;
    [
        b[0].y.sub(&b[1].y),
        b[0].x.add(&b[1].x).add(&b[2].x),
        b[2].y.add(&b[3].y).sub(&b[1].y),
        b[2].x.sub(&b[3].x),
    ]
}

/// Weight vectors of the nullifiers over the eight cluster quadratures
/// (X1, Y1, …, X4, Y4), used by the covariance engine.
pub const NULLIFIER_WEIGHTS: [[f64; 8]; 4] = [
    [0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0, 1.0],
    [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0],
];

pub const NULLIFIER_NAMES: [&str; 4] = [
    "Y(b1)-Y(b2)",
    "X(b1)+X(b2)+X(b3)",
    "-Y(b2)+Y(b3)+Y(b4)",
    "X(b3)-X(b4)",
];

/// Shot-noise limits of the four combinations (sums of unit variances).
pub const NULLIFIER_SNLS: [f64; 4] = [2.0, 3.0, 3.0, 2.0];

/// One squeezed-correlation record of the cluster report.
#[derive(Debug, Clone, PartialEq)]
pub struct NullifierRecord {
    pub name: &'static str,
    pub variance: f64,
    pub snl: f64,
    pub db_vs_snl: f64,
}

/// Compute the four nullifier variances with both engines, insist they
/// agree, and report them against their combination SNLs.
pub fn nullifier_report(r: f64) -> Result<[NullifierRecord; 4]> {
    let cluster = build_cluster(r)?;
    let combos = nullifier_combos(&cluster);
    let cov = cluster.state.cov();
    let mut records = Vec::with_capacity(4);
    for k in 0..4 {
        let w = &NULLIFIER_WEIGHTS[k];
        let mut var_cov = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                var_cov += w[i] * cov[(i, j)] * w[j];
            }
        }
        let var_heis = combos[k].variance();
        if (var_cov - var_heis).abs() > 1e-10 {
            return Err(Error::EngineMismatch {
                quantity: format!("nullifier variance {}", NULLIFIER_NAMES[k]),
                covariance: var_cov,
                heisenberg: var_heis,
            });
        }
        records.push(NullifierRecord {
            name: NULLIFIER_NAMES[k],
            variance: var_cov,
            snl: NULLIFIER_SNLS[k],
            db_vs_snl: to_db(var_cov, NULLIFIER_SNLS[k])?,
        });
    }
    Ok(records.try_into().expect("four records"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use NoiseLabel::*;

    #[test]
    fn zero_squeezing_gives_vacuum_covariance() {
        let cluster = build_cluster(0.0).unwrap();
        let cov = cluster.state.cov();
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(cov[(i, j)], expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn nullifier_variances_closed_form() {
        let records = nullifier_report(0.35).unwrap();
        let e2r = (-0.7f64).exp();
        assert_abs_diff_eq!(records[0].variance, 2.0 * e2r, epsilon = 1e-10);
        assert_abs_diff_eq!(records[1].variance, 3.0 * e2r, epsilon = 1e-10);
        assert_abs_diff_eq!(records[2].variance, 3.0 * e2r, epsilon = 1e-10);
        assert_abs_diff_eq!(records[3].variance, 2.0 * e2r, epsilon = 1e-10);
        assert_abs_diff_eq!(records[0].variance, 0.993170607582819, epsilon = 1e-12);
        assert_abs_diff_eq!(records[1].variance, 1.4897559113742287, epsilon = 1e-12);
        for rec in &records {
            assert_abs_diff_eq!(rec.db_vs_snl, -3.0400613733227626, epsilon = 1e-10);
        }
        assert_eq!(
            records.iter().map(|r| r.snl).collect::<Vec<_>>(),
            vec![2.0, 3.0, 3.0, 2.0]
        );
    }

    #[test]
    fn no_squeezing_sits_at_the_snl() {
        for rec in nullifier_report(0.0).unwrap() {
            assert_abs_diff_eq!(rec.db_vs_snl, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn strong_squeezing_kills_the_nullifiers_monotonically() {
        let mut previous = [f64::INFINITY; 4];
        for step in 0..=8 {
            let r = 0.5 * step as f64; // 0, 0.5, …, 4
            let records = nullifier_report(r).unwrap();
            for (k, rec) in records.iter().enumerate() {
                assert!(rec.variance <= previous[k] + 1e-15);
                previous[k] = rec.variance;
            }
        }
        for (rec, snl) in nullifier_report(4.0).unwrap().iter().zip(NULLIFIER_SNLS) {
            assert!(rec.variance < 1e-3 * snl);
        }
    }

    #[test]
    fn nullifier_combos_have_the_printed_coefficients() {
        // Only the four squeezed seed labels appear, with coefficients
        // √2, √10/2, √2/2 (signs included) scaled by e^{-r}.
        let r = 0.35f64;
        let em = (-r).exp();
        let cluster = build_cluster(r).unwrap();
        let combos = nullifier_combos(&cluster);
        let sqrt2 = std::f64::consts::SQRT_2;
        let sqrt10_2 = 10.0f64.sqrt() / 2.0;
        let expected = [
            QuadratureCombo::scaled_label(SeedY(0), sqrt2 * em),
            QuadratureCombo::linear_combine(&[
                (sqrt10_2 * em, &QuadratureCombo::label(SeedX(1))),
                (-(sqrt2 / 2.0) * em, &QuadratureCombo::label(SeedY(3))),
            ]),
            QuadratureCombo::linear_combine(&[
                (-sqrt10_2 * em, &QuadratureCombo::label(SeedX(2))),
                ((sqrt2 / 2.0) * em, &QuadratureCombo::label(SeedY(0))),
            ]),
            QuadratureCombo::scaled_label(SeedY(3), -sqrt2 * em),
        ];
        for (got, want) in combos.iter().zip(expected.iter()) {
            assert!(
                got.max_coefficient_delta(want) < 1e-12,
                "got {got}, want {want}"
            );
        }
    }

    #[test]
    fn cluster_is_pure_and_entangled() {
        for r in [0.1, 0.35, 1.0] {
            let cluster = build_cluster(r).unwrap();
            assert_abs_diff_eq!(cluster.state.purity_det(), 1.0, epsilon = 1e-9);
            // every single-mode marginal is mixed: symplectic eigenvalue
            // √det(cov) strictly above 1
            for mode in 0..4 {
                let marg = cluster.state.marginal(&[mode]).unwrap();
                assert!(marg.purity_det().sqrt() > 1.0 + 1e-6);
            }
        }
    }

    #[test]
    fn engines_agree_on_marginal_variances() {
        // cross-check the covariance engine against the Heisenberg combos
        // on every single-mode marginal
        for r in [0.0, 0.35, 1.3] {
            let cluster = build_cluster(r).unwrap();
            for mode in 0..4 {
                let marg = cluster.state.marginal(&[mode]).unwrap();
                assert_abs_diff_eq!(
                    marg.cov()[(0, 0)],
                    cluster.modes[mode].x.variance(),
                    epsilon = 1e-10
                );
                assert_abs_diff_eq!(
                    marg.cov()[(1, 1)],
                    cluster.modes[mode].y.variance(),
                    epsilon = 1e-10
                );
            }
        }
        // frozen closed form for mode b1: V(X) = 0.6e^{2r} + 0.4e^{-2r}
        let cluster = build_cluster(0.35).unwrap();
        let marg = cluster.state.marginal(&[0]).unwrap();
        assert_abs_diff_eq!(marg.cov()[(0, 0)], 1.4068857459988497, epsilon = 1e-12);
        assert_abs_diff_eq!(marg.cov()[(1, 1)], 1.1034522652630363, epsilon = 1e-12);
    }

    #[test]
    fn negative_or_nonfinite_squeezing_rejected() {
        assert!(matches!(
            build_cluster(-0.1),
            Err(Error::InvalidSqueezing(_))
        ));
        assert!(matches!(
            build_cluster(f64::NAN),
            Err(Error::InvalidSqueezing(_))
        ));
        assert!(build_cluster_per_mode([0.1, 0.2, 0.3, f64::INFINITY]).is_err());
    }
}
