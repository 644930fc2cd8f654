//! Homodyne detection: Gaussian conditioning on a measured quadrature and
//! the measure-then-displace (feed-forward) update used by the gate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::state::{x_index, y_index, GaussianState};

/// A homodyne detector on one mode at a phase angle: it measures
/// cosθ·X + sinθ·Y (θ = 0 reads X, θ = π/2 reads Y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homodyne {
    pub mode: usize,
    pub angle: f64,
}

impl Homodyne {
    pub fn x(mode: usize) -> Self {
        Self { mode, angle: 0.0 }
    }

    pub fn y(mode: usize) -> Self {
        Self {
            mode,
            angle: std::f64::consts::FRAC_PI_2,
        }
    }
}

/// Variances below this are treated as deterministic when inverting the
/// measured block (Moore–Penrose pseudo-inverse of a scalar).
const DEGENERATE_VARIANCE: f64 = 1e-300;

impl GaussianState {
    /// Condition the remaining modes on a homodyne `outcome` measured on
    /// `mode` at `angle`, removing the measured mode.
    ///
    /// The conditional covariance does not depend on the outcome; the
    /// conditional mean is linear in it.
    pub fn homodyne_condition(&self, mode: usize, angle: f64, outcome: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if self.n_modes() == 1 {
            return Err(Error::EmptySelection);
        }
        let (c, s) = (angle.cos(), angle.sin());
        let keep: Vec<usize> = (0..2 * self.n_modes())
            .filter(|&i| i != x_index(mode) && i != y_index(mode))
            .collect();

        // projected measured-block variance v = uᵀ B u and cross column C·u
        let v = self.quadrature_variance(mode, angle)?;
        let pinv = if v > DEGENERATE_VARIANCE { 1.0 / v } else { 0.0 };
        let cu = DVector::from_iterator(
            keep.len(),
            keep.iter().map(|&i| {
                c * self.cov()[(i, x_index(mode))] + s * self.cov()[(i, y_index(mode))]
            }),
        );

        let innovation = outcome - self.quadrature_mean(mode, angle)?;
        let mean = DVector::from_iterator(keep.len(), keep.iter().map(|&i| self.mean()[i]))
            + &cu * (pinv * innovation);
        let mut cov = DMatrix::zeros(keep.len(), keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                cov[(a, b)] = self.cov()[(i, j)] - cu[a] * pinv * cu[b];
            }
        }
        // enforce exact symmetry against accumulated roundoff
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(GaussianState::from_parts_unchecked(mean, cov))
    }

    /// Homodyne the listed modes simultaneously (they must be distinct, so
    /// the measured quadratures commute) and add `feed · outcomes` to the
    /// surviving quadratures as a displacement. Returns the output state
    /// averaged over the outcome statistics — the state a spectrum
    /// analyzer sees across repeated runs.
    ///
    /// `feed` has one row per surviving quadrature (survivors keep their
    /// mode order, quadratures interleaved) and one column per detector.
    pub fn measure_feedforward(
        &self,
        detectors: &[Homodyne],
        feed: &DMatrix<f64>,
    ) -> Result<Self> {
        let (kept_idx, meas) = self.partition(detectors)?;
        if feed.nrows() != kept_idx.len() || feed.ncols() != detectors.len() {
            return Err(Error::DimensionMismatch(format!(
                "feed matrix is {}x{}, expected {}x{}",
                feed.nrows(),
                feed.ncols(),
                kept_idx.len(),
                detectors.len()
            )));
        }

        // cov' = Σ_kk + D Σ_mk + Σ_km Dᵀ + D Σ_mm Dᵀ, mean' = μ_k + D μ_m
        let cov = &meas.cov_kk
            + feed * meas.cov_km.transpose()
            + &meas.cov_km * feed.transpose()
            + feed * &meas.cov_mm * feed.transpose();
        let cov = (&cov + cov.transpose()) * 0.5;
        let mean = &meas.mean_k + feed * &meas.mean_m;
        Ok(GaussianState::from_parts_unchecked(mean, cov))
    }

    /// Same measurement-and-displacement step conditioned on concrete
    /// `outcomes`, one per detector. The returned covariance is the
    /// conditional one (independent of the outcomes).
    pub fn measure_feedforward_conditional(
        &self,
        detectors: &[Homodyne],
        feed: &DMatrix<f64>,
        outcomes: &[f64],
    ) -> Result<Self> {
        if outcomes.len() != detectors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} outcomes for {} detectors",
                outcomes.len(),
                detectors.len()
            )));
        }
        // condition sequentially; survivor indices shift as modes drop out
        let mut order: Vec<usize> = (0..detectors.len()).collect();
        order.sort_by_key(|&k| detectors[k].mode);
        let mut state = self.clone();
        for (removed, &k) in order.iter().enumerate() {
            let det = detectors[k];
            state = state.homodyne_condition(det.mode - removed, det.angle, outcomes[k])?;
        }
        let shift = feed * DVector::from_column_slice(outcomes);
        state.displace(&shift)?;
        Ok(state)
    }

    fn partition(&self, detectors: &[Homodyne]) -> Result<(Vec<usize>, MeasuredBlocks)> {
        let mut measured = vec![false; self.n_modes()];
        for d in detectors {
            self.check_mode(d.mode)?;
            if measured[d.mode] {
                return Err(Error::DuplicateMode(d.mode));
            }
            measured[d.mode] = true;
        }
        let kept_idx: Vec<usize> = (0..self.n_modes())
            .filter(|&m| !measured[m])
            .flat_map(|m| [x_index(m), y_index(m)])
            .collect();
        if kept_idx.is_empty() {
            return Err(Error::EmptySelection);
        }

        let n_det = detectors.len();
        // measured quadrature directions u_k and their moments
        let mut mean_m = DVector::zeros(n_det);
        let mut cov_mm = DMatrix::zeros(n_det, n_det);
        let mut cov_km = DMatrix::zeros(kept_idx.len(), n_det);
        let dir = |d: &Homodyne| -> (usize, usize, f64, f64) {
            (x_index(d.mode), y_index(d.mode), d.angle.cos(), d.angle.sin())
        };
        for (a, da) in detectors.iter().enumerate() {
            let (xa, ya, ca, sa) = dir(da);
            mean_m[a] = ca * self.mean()[xa] + sa * self.mean()[ya];
            for (b, db) in detectors.iter().enumerate() {
                let (xb, yb, cb, sb) = dir(db);
                cov_mm[(a, b)] = ca * cb * self.cov()[(xa, xb)]
                    + ca * sb * self.cov()[(xa, yb)]
                    + sa * cb * self.cov()[(ya, xb)]
                    + sa * sb * self.cov()[(ya, yb)];
            }
            for (row, &i) in kept_idx.iter().enumerate() {
                cov_km[(row, a)] = ca * self.cov()[(i, xa)] + sa * self.cov()[(i, ya)];
            }
        }
        let mean_k = DVector::from_iterator(kept_idx.len(), kept_idx.iter().map(|&i| self.mean()[i]));
        let mut cov_kk = DMatrix::zeros(kept_idx.len(), kept_idx.len());
        for (a, &i) in kept_idx.iter().enumerate() {
            for (b, &j) in kept_idx.iter().enumerate() {
                cov_kk[(a, b)] = self.cov()[(i, j)];
            }
        }
        Ok((
            kept_idx,
            MeasuredBlocks {
                mean_k,
                mean_m,
                cov_kk,
                cov_mm,
                cov_km,
            },
        ))
    }
}

struct MeasuredBlocks {
    mean_k: DVector<f64>,
    mean_m: DVector<f64>,
    cov_kk: DMatrix<f64>,
    cov_mm: DMatrix<f64>,
    cov_km: DMatrix<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::symplectic::{SqueezeAxis, SymplecticTransform};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn epr_pair(r: f64) -> GaussianState {
        // X-squeezed ⊗ Y-squeezed on a 50:50 splitter
        let sx = SymplecticTransform::squeezer(2, 0, r, SqueezeAxis::X).unwrap();
        let sy = SymplecticTransform::squeezer(2, 1, r, SqueezeAxis::Y).unwrap();
        let bs = SymplecticTransform::beamsplitter(
            2,
            0,
            1,
            [[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [-FRAC_1_SQRT_2, FRAC_1_SQRT_2]],
        )
        .unwrap();
        GaussianState::vacuum(2)
            .unwrap()
            .apply(&sx)
            .unwrap()
            .apply(&sy)
            .unwrap()
            .apply(&bs)
            .unwrap()
    }

    #[test]
    fn product_state_untouched_by_conditioning() {
        let sq = SymplecticTransform::squeezer(2, 1, 0.5, SqueezeAxis::X).unwrap();
        let st = GaussianState::vacuum(2).unwrap().apply(&sq).unwrap();
        let cond = st.homodyne_condition(0, 0.3, 1.7).unwrap();
        let marg = st.marginal(&[1]).unwrap();
        assert!((cond.cov() - marg.cov()).abs().max() < 1e-15);
        assert!((cond.mean() - marg.mean()).abs().max() < 1e-15);
    }

    #[test]
    fn conditional_covariance_is_outcome_independent() {
        let st = epr_pair(0.7);
        let a = st.homodyne_condition(0, 0.0, -3.2).unwrap();
        let b = st.homodyne_condition(0, 0.0, 5.9).unwrap();
        assert!((a.cov() - b.cov()).abs().max() < 1e-12);
        // and the mean is linear in the outcome
        let c = st.homodyne_condition(0, 0.0, 1.0).unwrap();
        let d = st.homodyne_condition(0, 0.0, 2.0).unwrap();
        let e = st.homodyne_condition(0, 0.0, 3.0).unwrap();
        let step1 = d.mean() - c.mean();
        let step2 = e.mean() - d.mean();
        assert!((step1 - step2).abs().max() < 1e-12);
    }

    #[test]
    fn epr_conditional_variance_closed_form() {
        // conditioning one arm on X leaves the other arm with V(X) = 1/cosh(2r)
        for (r, expect) in [
            (0.2, 0.9250074519057551),
            (0.35, 0.796705459992875),
            (1.0, 0.2658022288340797),
        ] {
            let cond = epr_pair(r).homodyne_condition(0, 0.0, 0.0).unwrap();
            assert_abs_diff_eq!(
                cond.quadrature_variance(0, 0.0).unwrap(),
                expect,
                epsilon = 1e-12
            );
        }
        // monotone decreasing in r, heading to 0
        let v: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&r| {
                epr_pair(r)
                    .homodyne_condition(0, 0.0, 0.0)
                    .unwrap()
                    .quadrature_variance(0, 0.0)
                    .unwrap()
            })
            .collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
        assert!(v[3] < 1e-3);
    }

    #[test]
    fn feedforward_matches_hand_computation() {
        // Measure X of one EPR arm, feed onto the other arm's X with unit
        // gain. Output X = X_1 + m, so V = V(X_1) + V(m) + 2 cov(X_1, m).
        let st = epr_pair(0.6);
        let feed = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let out = st.measure_feedforward(&[Homodyne::x(0)], &feed).unwrap();
        let v_m = st.quadrature_variance(0, 0.0).unwrap();
        let v_k = st.quadrature_variance(1, 0.0).unwrap();
        let c = st.cov()[(2, 0)];
        assert_abs_diff_eq!(
            out.quadrature_variance(0, 0.0).unwrap(),
            v_k + v_m + 2.0 * c,
            epsilon = 1e-12
        );
        // Y sector untouched by an X-only feed
        assert_abs_diff_eq!(
            out.quadrature_variance(0, std::f64::consts::FRAC_PI_2).unwrap(),
            st.quadrature_variance(1, std::f64::consts::FRAC_PI_2).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn conditional_feedforward_consistent_with_unconditional() {
        // unconditional cov = conditional cov + spread of the displaced
        // conditional means over the outcome distribution; check the
        // ordering cov_uncond ⪰ cov_cond entrywise on the diagonal
        let st = epr_pair(0.4);
        let feed = DMatrix::from_row_slice(2, 1, &[0.8, -0.2]);
        let unc = st.measure_feedforward(&[Homodyne::x(0)], &feed).unwrap();
        let cond = st
            .measure_feedforward_conditional(&[Homodyne::x(0)], &feed, &[1.3])
            .unwrap();
        for i in 0..2 {
            assert!(unc.cov()[(i, i)] >= cond.cov()[(i, i)] - 1e-12);
        }
        // outcome value must not change the conditional covariance
        let cond2 = st
            .measure_feedforward_conditional(&[Homodyne::x(0)], &feed, &[-8.0])
            .unwrap();
        assert!((cond.cov() - cond2.cov()).abs().max() < 1e-12);
    }

    #[test]
    fn measuring_every_mode_is_rejected() {
        let st = GaussianState::vacuum(1).unwrap();
        assert!(st.homodyne_condition(0, 0.0, 0.0).is_err());
    }
}
