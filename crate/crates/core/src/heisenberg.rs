//! Heisenberg-picture moment engine: every quadrature of interest is a
//! linear combination of twelve independent unit-variance noise operators
//! (eight cluster seed quadratures, four input-signal quadratures), so
//! means, variances, and covariances come out as exact coefficient sums.

use std::fmt;

/// One of the independent unit-variance noise operators.
///
/// Seed labels carry zero mean; the four input-signal labels carry the
/// configurable coherent amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NoiseLabel {
    /// X quadrature of cluster seed beam i (0-based, i ∈ 0..4).
    SeedX(u8),
    /// Y quadrature of cluster seed beam i.
    SeedY(u8),
    /// Amplitude quadrature of the input target signal.
    InputXt,
    /// Phase quadrature of the input target signal.
    InputYt,
    /// Amplitude quadrature of the input control signal.
    InputXc,
    /// Phase quadrature of the input control signal.
    InputYc,
}

pub const N_LABELS: usize = 12;

impl NoiseLabel {
    pub fn all() -> [NoiseLabel; N_LABELS] {
        use NoiseLabel::*;
        [
            SeedX(0), SeedY(0), SeedX(1), SeedY(1), SeedX(2), SeedY(2), SeedX(3), SeedY(3),
            InputXt, InputYt, InputXc, InputYc,
        ]
    }

    pub fn index(self) -> usize {
        use NoiseLabel::*;
        match self {
            SeedX(i) => 2 * i as usize,
            SeedY(i) => 2 * i as usize + 1,
            InputXt => 8,
            InputYt => 9,
            InputXc => 10,
            InputYc => 11,
        }
    }
}

impl fmt::Display for NoiseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use NoiseLabel::*;
        match self {
            SeedX(i) => write!(f, "X0_a{}", i + 1),
            SeedY(i) => write!(f, "Y0_a{}", i + 1),
            InputXt => write!(f, "X_t"),
            InputYt => write!(f, "Y_t"),
            InputXc => write!(f, "X_c"),
            InputYc => write!(f, "Y_c"),
        }
    }
}

/// Coherent amplitudes of the input-signal labels; seed labels are always
/// zero-mean.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LabelMeans {
    pub xt: f64,
    pub yt: f64,
    pub xc: f64,
    pub yc: f64,
}

impl LabelMeans {
    pub fn mean_of(&self, label: NoiseLabel) -> f64 {
        use NoiseLabel::*;
        match label {
            SeedX(_) | SeedY(_) => 0.0,
            InputXt => self.xt,
            InputYt => self.yt,
            InputXc => self.xc,
            InputYc => self.yc,
        }
    }
}

/// A linear combination of noise labels; any squeezing factors e^{±r} are
/// already folded into the coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureCombo {
    coeffs: [f64; N_LABELS],
}

impl Default for QuadratureCombo {
    fn default() -> Self {
        Self::zero()
    }
}

impl QuadratureCombo {
    pub fn zero() -> Self {
        Self {
            coeffs: [0.0; N_LABELS],
        }
    }

    /// The bare label as a combo with coefficient 1.
    pub fn label(label: NoiseLabel) -> Self {
        Self::scaled_label(label, 1.0)
    }

    pub fn scaled_label(label: NoiseLabel, coefficient: f64) -> Self {
        let mut coeffs = [0.0; N_LABELS];
        coeffs[label.index()] = coefficient;
        Self { coeffs }
    }

    pub fn coefficient(&self, label: NoiseLabel) -> f64 {
        self.coeffs[label.index()]
    }

    /// Coefficient-wise linear combination Σ cᵢ·comboᵢ, exact.
    pub fn linear_combine(terms: &[(f64, &QuadratureCombo)]) -> Self {
        let mut out = Self::zero();
        for (weight, combo) in terms {
            for k in 0..N_LABELS {
                out.coeffs[k] += weight * combo.coeffs[k];
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= factor;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::linear_combine(&[(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::linear_combine(&[(1.0, self), (-1.0, other)])
    }

    /// Σ c² — all labels are independent with unit variance.
    pub fn variance(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn mean(&self, means: &LabelMeans) -> f64 {
        NoiseLabel::all()
            .iter()
            .map(|&l| self.coefficient(l) * means.mean_of(l))
            .sum()
    }

    /// Σ over shared labels of c_self · c_other.
    pub fn covariance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Largest coefficient difference against another combo; the exactness
    /// check used by the noise-term audits.
    pub fn max_coefficient_delta(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }
}

impl fmt::Display for QuadratureCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for label in NoiseLabel::all() {
            let c = self.coefficient(label);
            if c == 0.0 {
                continue;
            }
            if first {
                write!(f, "{c:+.6}*{label}")?;
                first = false;
            } else {
                write!(f, " {c:+.6}*{label}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// First and second moments of a pair of combos.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_a: f64,
    pub var_a: f64,
    pub cov_ab: f64,
}

/// Mean and variance of `a` plus its covariance with `b`.
pub fn moments(a: &QuadratureCombo, b: &QuadratureCombo, means: &LabelMeans) -> Moments {
    Moments {
        mean_a: a.mean(means),
        var_a: a.variance(),
        cov_ab: a.covariance(b),
    }
}

/// X and Y combos of one optical mode.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeCombos {
    pub x: QuadratureCombo,
    pub y: QuadratureCombo,
}

impl ModeCombos {
    /// Squeeze in place: the given axis is attenuated by e^{-r}, the
    /// conjugate amplified by e^{+r}.
    pub fn squeeze(&mut self, r: f64, axis: crate::gaussian::SqueezeAxis) {
        let (down, up) = ((-r).exp(), r.exp());
        match axis {
            crate::gaussian::SqueezeAxis::X => {
                self.x = self.x.scale(down);
                self.y = self.y.scale(up);
            }
            crate::gaussian::SqueezeAxis::Y => {
                self.x = self.x.scale(up);
                self.y = self.y.scale(down);
            }
        }
    }

    /// Phase rotation by θ: X → cosθ·X + sinθ·Y, Y → −sinθ·X + cosθ·Y.
    pub fn rotate(&mut self, theta: f64) {
        let (c, s) = (theta.cos(), theta.sin());
        let x = QuadratureCombo::linear_combine(&[(c, &self.x), (s, &self.y)]);
        let y = QuadratureCombo::linear_combine(&[(-s, &self.x), (c, &self.y)]);
        self.x = x;
        self.y = y;
    }
}
