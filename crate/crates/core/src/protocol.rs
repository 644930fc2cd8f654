//! The full measurement-based controlled-X protocol: couple the input
//! target and control onto two cluster submodes with 50:50 splitters,
//! homodyne the four coupled outputs, feed the photocurrents forward with
//! gain g as displacements on the two remaining submodes, and report the
//! two-mode output state.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::{DMatrix, Matrix4, Vector4};

use crate::cluster::build_cluster;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, Homodyne, SymplecticTransform};
use crate::heisenberg::{LabelMeans, ModeCombos, NoiseLabel, QuadratureCombo};
use crate::metrics::{
    duan_witness, gaussian_fidelity, ideal_reference, to_db, SingleModeGaussian,
};

/// Which exact engine(s) evaluate the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineChoice {
    Covariance,
    Heisenberg,
    /// Run both and fail loudly if they disagree beyond 1e-9.
    #[default]
    Both,
}

impl EngineChoice {
    pub fn name(self) -> &'static str {
        match self {
            EngineChoice::Covariance => "covariance",
            EngineChoice::Heisenberg => "heisenberg",
            EngineChoice::Both => "both",
        }
    }
}

/// Coherent amplitudes of the input signals, in quadrature units.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InputMeans {
    pub xt: f64,
    pub yt: f64,
    pub xc: f64,
    pub yc: f64,
}

impl InputMeans {
    fn validate(&self) -> Result<()> {
        for v in [self.xt, self.yt, self.xc, self.yc] {
            if !v.is_finite() {
                return Err(Error::InvalidMean(v));
            }
        }
        Ok(())
    }
}

/// Feed-forward gains of the four classical channels, one per displaced
/// output quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    /// X displacement on the target output.
    pub xt: f64,
    /// Y displacement on the target output.
    pub yt: f64,
    /// X displacement on the control output.
    pub xc: f64,
    /// Y displacement on the control output.
    pub yc: f64,
}

impl Gains {
    pub fn uniform(g: f64) -> Self {
        Self {
            xt: g,
            yt: g,
            xc: g,
            yc: g,
        }
    }

    fn validate(&self) -> Result<()> {
        for g in [self.xt, self.yt, self.xc, self.yc] {
            if !g.is_finite() {
                return Err(Error::InvalidGain(g));
            }
        }
        Ok(())
    }
}

impl Default for Gains {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl From<f64> for Gains {
    fn from(g: f64) -> Self {
        Self::uniform(g)
    }
}

use crate::mc::McSettings;

/// Everything a protocol run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Squeezing parameter shared by the four cluster seeds.
    pub r: f64,
    pub gains: Gains,
    pub input_means: InputMeans,
    pub engine: EngineChoice,
    /// With `false` the four cluster submodes are replaced by vacuum,
    /// the classical baseline of the experiment.
    pub use_cluster: bool,
    pub mc: Option<McSettings>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            r: 0.35,
            gains: Gains::default(),
            input_means: InputMeans::default(),
            engine: EngineChoice::default(),
            use_cluster: true,
            mc: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || self.r < 0.0 {
            return Err(Error::InvalidSqueezing(self.r));
        }
        self.gains.validate()?;
        self.input_means.validate()?;
        if let Some(mc) = &self.mc {
            if mc.samples == 0 {
                return Err(Error::TooFewSamples {
                    min: 1,
                    got: mc.samples,
                });
            }
        }
        Ok(())
    }
}

/// The four output quadratures in the internal (X_t, Y_t, X_c, Y_c) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutQuad {
    Xt = 0,
    Yt = 1,
    Xc = 2,
    Yc = 3,
}

impl OutQuad {
    pub const ALL: [OutQuad; 4] = [OutQuad::Xt, OutQuad::Yt, OutQuad::Xc, OutQuad::Yc];
    /// Display order used by the reports: X_t, X_c, Y_t, Y_c.
    pub const REPORT_ORDER: [OutQuad; 4] = [OutQuad::Xt, OutQuad::Xc, OutQuad::Yt, OutQuad::Yc];

    pub fn name(self) -> &'static str {
        match self {
            OutQuad::Xt => "Xt_out",
            OutQuad::Yt => "Yt_out",
            OutQuad::Xc => "Xc_out",
            OutQuad::Yc => "Yc_out",
        }
    }
}

/// Mean, variance, and variance in dB against the single-quadrature SNL
/// of 1 for one output quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadRecord {
    pub mean: f64,
    pub variance: f64,
    pub db_vs_snl: f64,
}

/// Full result of one gate run.
#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    /// Indexed by [`OutQuad`] order (X_t, Y_t, X_c, Y_c).
    pub quads: [QuadRecord; 4],
    pub output_mean: Vector4<f64>,
    /// Output covariance over (X_t, Y_t, X_c, Y_c).
    pub output_cov: Matrix4<f64>,
    pub fidelity_target: f64,
    pub fidelity_control: f64,
    pub duan_witness: f64,
    pub engine: EngineChoice,
}

impl GateReport {
    pub fn quad(&self, q: OutQuad) -> &QuadRecord {
        &self.quads[q as usize]
    }

    /// dB values in report order (X_t, X_c, Y_t, Y_c).
    pub fn db_report_order(&self) -> [f64; 4] {
        OutQuad::REPORT_ORDER.map(|q| self.quad(q).db_vs_snl)
    }
}

/// The ideal controlled-X as a two-mode symplectic map (mode 0 target,
/// mode 1 control): X_t → X_t − X_c, Y_c → Y_c + Y_t, others unchanged.
pub fn ideal_controlled_x() -> SymplecticTransform {
    #[rustfmt::skip]
    let matrix = DMatrix::from_row_slice(4, 4, &[
        1.0, 0.0, -1.0, 0.0,
        0.0, 1.0,  0.0, 0.0,
        0.0, 0.0,  1.0, 0.0,
        0.0, 1.0,  0.0, 1.0,
    ]);
    let shift = nalgebra::DVector::zeros(4);
    SymplecticTransform::from_matrix(matrix, shift).expect("controlled-X map is symplectic")
}

// Splitter sign conventions, fixed so the measured photocurrents combine
// into the cluster nullifiers:
//   t1 = (a_t + b2)/√2,  t2 = (−a_t + b2)/√2
//   c1 = (−a_c + b3)/√2, c2 = (a_c + b3)/√2
const BS_TARGET: [[f64; 2]; 2] = [[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [-FRAC_1_SQRT_2, FRAC_1_SQRT_2]];
const BS_CONTROL: [[f64; 2]; 2] = [[-FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, FRAC_1_SQRT_2]];

/// Feed-forward matrix mapping the measured signals (X_t1, Y_t2, X_c1,
/// Y_c2) to displacements of (X_b1, Y_b1, X_b4, Y_b4):
///   X_b1 += √2·g_xt·(X_t1 + X_c1)
///   Y_b1 += −√2·g_yt·Y_t2
///   X_b4 += −√2·g_xc·X_c1
///   Y_b4 += √2·g_yc·(−Y_t2 + Y_c2)
pub fn feedforward_matrix(gains: &Gains) -> DMatrix<f64> {
    let s2 = SQRT_2;
    #[rustfmt::skip]
    let feed = DMatrix::from_row_slice(4, 4, &[
        s2 * gains.xt, 0.0,            s2 * gains.xt, 0.0,
        0.0,           -s2 * gains.yt, 0.0,           0.0,
        0.0,           0.0,            -s2 * gains.xc, 0.0,
        0.0,           -s2 * gains.yc, 0.0,           s2 * gains.yc,
    ]);
    feed
}

/// Run the gate and report the output pair. With `EngineChoice::Both` the
/// covariance and Heisenberg results are cross-checked to 1e-9 and any
/// disagreement surfaces as an error instead of silent output.
pub fn run_gate(config: &ExperimentConfig) -> Result<GateReport> {
    config.validate()?;
    match config.engine {
        EngineChoice::Covariance => {
            let (mean, cov) = covariance_engine(config)?;
            assemble_report(config, mean, cov, EngineChoice::Covariance)
        }
        EngineChoice::Heisenberg => {
            let (mean, cov) = heisenberg_engine(config)?;
            assemble_report(config, mean, cov, EngineChoice::Heisenberg)
        }
        EngineChoice::Both => {
            let (mean_c, cov_c) = covariance_engine(config)?;
            let (mean_h, cov_h) = heisenberg_engine(config)?;
            for q in OutQuad::ALL {
                let i = q as usize;
                check_engines(q.name(), "mean", mean_c[i], mean_h[i])?;
                for j in 0..4 {
                    check_engines(q.name(), "covariance", cov_c[(i, j)], cov_h[(i, j)])?;
                }
            }
            assemble_report(config, mean_c, cov_c, EngineChoice::Both)
        }
    }
}

fn check_engines(quad: &str, what: &str, covariance: f64, heisenberg: f64) -> Result<()> {
    if (covariance - heisenberg).abs() > 1e-9 {
        return Err(Error::EngineMismatch {
            quantity: format!("{quad} {what}"),
            covariance,
            heisenberg,
        });
    }
    Ok(())
}

/// Covariance engine: build the six-mode state, couple, measure, feed
/// forward, and read the ensemble-averaged output moments.
fn covariance_engine(config: &ExperimentConfig) -> Result<(Vector4<f64>, Matrix4<f64>)> {
    // modes 0..3: b1..b4 (cluster or vacuum), 4: target input, 5: control input
    let cluster_part = if config.use_cluster {
        build_cluster(config.r)?.state
    } else {
        GaussianState::vacuum(4)?
    };
    let mut state = cluster_part.tensor(&GaussianState::vacuum(2)?);
    let m = &config.input_means;
    let mut shift = nalgebra::DVector::zeros(12);
    shift[8] = m.xt;
    shift[9] = m.yt;
    shift[10] = m.xc;
    shift[11] = m.yc;
    state.displace(&shift)?;

    // couple inputs onto b2 and b3; slot of the input keeps t1/c1
    let state = state
        .apply(&SymplecticTransform::beamsplitter(6, 4, 1, BS_TARGET)?)?
        .apply(&SymplecticTransform::beamsplitter(6, 5, 2, BS_CONTROL)?)?;

    // homodyne X_t1 (mode 4), Y_t2 (mode 1), X_c1 (mode 5), Y_c2 (mode 2)
    let detectors = [
        Homodyne::x(4),
        Homodyne::y(1),
        Homodyne::x(5),
        Homodyne::y(2),
    ];
    let feed = feedforward_matrix(&config.gains);
    let out = state.measure_feedforward(&detectors, &feed)?;
    debug_assert_eq!(out.n_modes(), 2); // b1 (target out), b4 (control out)

    let mean = Vector4::from_fn(|i, _| out.mean()[i]);
    let cov = Matrix4::from_fn(|i, j| out.cov()[(i, j)]);
    Ok((mean, cov))
}

/// Heisenberg engine: write each output quadrature as an exact combo of
/// the twelve noise labels and take moments.
fn heisenberg_engine(config: &ExperimentConfig) -> Result<(Vector4<f64>, Matrix4<f64>)> {
    let combos = output_combos(config)?;
    let means = LabelMeans {
        xt: config.input_means.xt,
        yt: config.input_means.yt,
        xc: config.input_means.xc,
        yc: config.input_means.yc,
    };
    let mean = Vector4::from_fn(|i, _| combos[i].mean(&means));
    let cov = Matrix4::from_fn(|i, j| combos[i].covariance(&combos[j]));
    Ok((mean, cov))
}

/// The output combos (X_t, Y_t, X_c, Y_c) of the displaced submodes, built
/// from the cluster combos and the splitter/feed-forward conventions.
pub fn output_combos(config: &ExperimentConfig) -> Result<[QuadratureCombo; 4]> {
    config.validate()?;
    let cluster_modes: [ModeCombos; 4] = if config.use_cluster {
        build_cluster(config.r)?.modes
    } else {
        // vacuum substitutes: each submode is its own unit-variance label
        std::array::from_fn(|i| ModeCombos {
            x: QuadratureCombo::label(NoiseLabel::SeedX(i as u8)),
            y: QuadratureCombo::label(NoiseLabel::SeedY(i as u8)),
        })
    };
    let [b1, b2, b3, b4] = cluster_modes;
    let xt = QuadratureCombo::label(NoiseLabel::InputXt);
    let yt = QuadratureCombo::label(NoiseLabel::InputYt);
    let xc = QuadratureCombo::label(NoiseLabel::InputXc);
    let yc = QuadratureCombo::label(NoiseLabel::InputYc);

    let h = FRAC_1_SQRT_2;
    // measured quadratures after the two splitters
    let x_t1 = QuadratureCombo::linear_combine(&[(h, &xt), (h, &b2.x)]);
    let y_t2 = QuadratureCombo::linear_combine(&[(-h, &yt), (h, &b2.y)]);
    let x_c1 = QuadratureCombo::linear_combine(&[(-h, &xc), (h, &b3.x)]);
    let y_c2 = QuadratureCombo::linear_combine(&[(h, &yc), (h, &b3.y)]);

    let g = &config.gains;
    let out_xt = QuadratureCombo::linear_combine(&[
        (1.0, &b1.x),
        (SQRT_2 * g.xt, &x_t1),
        (SQRT_2 * g.xt, &x_c1),
    ]);
    let out_yt = QuadratureCombo::linear_combine(&[(1.0, &b1.y), (-SQRT_2 * g.yt, &y_t2)]);
    let out_xc = QuadratureCombo::linear_combine(&[(1.0, &b4.x), (-SQRT_2 * g.xc, &x_c1)]);
    let out_yc = QuadratureCombo::linear_combine(&[
        (1.0, &b4.y),
        (-SQRT_2 * g.yc, &y_t2),
        (SQRT_2 * g.yc, &y_c2),
    ]);
    Ok([out_xt, out_yt, out_xc, out_yc])
}

fn assemble_report(
    config: &ExperimentConfig,
    mean: Vector4<f64>,
    cov: Matrix4<f64>,
    engine: EngineChoice,
) -> Result<GateReport> {
    let mut quads = [QuadRecord {
        mean: 0.0,
        variance: 0.0,
        db_vs_snl: 0.0,
    }; 4];
    for q in OutQuad::ALL {
        let i = q as usize;
        quads[i] = QuadRecord {
            mean: mean[i],
            variance: cov[(i, i)],
            db_vs_snl: to_db(cov[(i, i)], 1.0)?,
        };
    }
    let target = SingleModeGaussian::new(
        nalgebra::Matrix2::new(cov[(0, 0)], cov[(0, 1)], cov[(1, 0)], cov[(1, 1)]),
        nalgebra::Vector2::new(mean[0], mean[1]),
    )?;
    let control = SingleModeGaussian::new(
        nalgebra::Matrix2::new(cov[(2, 2)], cov[(2, 3)], cov[(3, 2)], cov[(3, 3)]),
        nalgebra::Vector2::new(mean[2], mean[3]),
    )?;
    let (ideal_t, ideal_c) = ideal_reference(&config.input_means);
    Ok(GateReport {
        quads,
        output_mean: mean,
        output_cov: cov,
        fidelity_target: gaussian_fidelity(&ideal_t, &target)?,
        fidelity_control: gaussian_fidelity(&ideal_c, &control)?,
        duan_witness: duan_witness(&cov),
        engine,
    })
}

/// Coherent amplitude whose measured power sits `power_db` above the SNL:
/// a spectrum analyzer reads signal-plus-noise power, so μ² + 1 = 10^{P/10}.
pub fn modulation_mean(power_db: f64) -> Result<f64> {
    if !power_db.is_finite() || power_db < 0.0 {
        return Err(Error::NegativeModulationPower(power_db));
    }
    Ok((10.0f64.powf(power_db / 10.0) - 1.0).sqrt())
}

/// Total measured power of a quadrature with mean μ on unit noise, in dB.
pub fn mean_power_db(mean: f64) -> f64 {
    10.0 * (mean * mean + 1.0).log10()
}

/// Which input quadrature a modulation scenario excites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputQuad {
    Xt,
    Yt,
    Xc,
    Yc,
}

impl InputQuad {
    pub const ALL: [InputQuad; 4] = [InputQuad::Xt, InputQuad::Yt, InputQuad::Xc, InputQuad::Yc];

    pub fn name(self) -> &'static str {
        match self {
            InputQuad::Xt => "Xt",
            InputQuad::Yt => "Yt",
            InputQuad::Xc => "Xc",
            InputQuad::Yc => "Yc",
        }
    }

    /// The output quadratures that the ideal gate maps this input onto.
    pub fn couples_to(self) -> &'static [OutQuad] {
        match self {
            InputQuad::Xt => &[OutQuad::Xt],
            InputQuad::Yt => &[OutQuad::Yt, OutQuad::Yc],
            InputQuad::Xc => &[OutQuad::Xt, OutQuad::Xc],
            InputQuad::Yc => &[OutQuad::Yc],
        }
    }
}

/// One modulation-transfer scenario: a single input quadrature driven at
/// `input_power_db` above the SNL.
#[derive(Debug, Clone)]
pub struct ModulationReport {
    pub modulated: InputQuad,
    pub input_mean: f64,
    pub input_power_db: f64,
    /// Measured power 10·log₁₀(mean² + 1) per output quadrature, in
    /// [`OutQuad`] order.
    pub output_mean_power_db: [f64; 4],
    pub gate: GateReport,
}

/// Run the four single-quadrature modulation scenarios at the given drive
/// power.
pub fn modulation_scenarios(
    r: f64,
    gains: Gains,
    power_db: f64,
) -> Result<[ModulationReport; 4]> {
    let mu = modulation_mean(power_db)?;
    let mut reports = Vec::with_capacity(4);
    for quad in InputQuad::ALL {
        let mut input_means = InputMeans::default();
        match quad {
            InputQuad::Xt => input_means.xt = mu,
            InputQuad::Yt => input_means.yt = mu,
            InputQuad::Xc => input_means.xc = mu,
            InputQuad::Yc => input_means.yc = mu,
        }
        let gate = run_gate(&ExperimentConfig {
            r,
            gains,
            input_means,
            ..Default::default()
        })?;
        let output_mean_power_db = OutQuad::ALL.map(|q| mean_power_db(gate.quad(q).mean));
        reports.push(ModulationReport {
            modulated: quad,
            input_mean: mu,
            input_power_db: mean_power_db(mu),
            output_mean_power_db,
            gate,
        });
    }
    Ok(reports.try_into().expect("four scenarios"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const E07: f64 = 0.4965853037914095; // e^{-0.7}

    #[test]
    fn ideal_gate_moments_on_vacuum() {
        let t = ideal_controlled_x();
        t.validate().unwrap();
        let vac = GaussianState::vacuum(2).unwrap();
        let out = vac.apply(&t).unwrap();
        let c = out.cov();
        assert_abs_diff_eq!(c[(0, 0)], 2.0, epsilon = 1e-15); // V(Xt)
        assert_abs_diff_eq!(c[(1, 1)], 1.0, epsilon = 1e-15); // V(Yt)
        assert_abs_diff_eq!(c[(2, 2)], 1.0, epsilon = 1e-15); // V(Xc)
        assert_abs_diff_eq!(c[(3, 3)], 2.0, epsilon = 1e-15); // V(Yc)
        assert_abs_diff_eq!(c[(0, 2)], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c[(1, 3)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ideal_gate_mean_transfer_and_composition() {
        let t = ideal_controlled_x();
        let mut vac = GaussianState::vacuum(2).unwrap();
        let m = 1.75;
        vac.displace(&nalgebra::DVector::from_vec(vec![0.0, 0.0, m, 0.0]))
            .unwrap();
        let out = vac.apply(&t).unwrap();
        assert_abs_diff_eq!(out.mean()[0], -m, epsilon = 1e-15);
        assert_abs_diff_eq!(out.mean()[2], m, epsilon = 1e-15);
        // applying twice doubles the X transfer
        let twice = vac.apply(&t).unwrap().apply(&t).unwrap();
        assert_abs_diff_eq!(twice.mean()[0], -2.0 * m, epsilon = 1e-15);
    }

    #[test]
    fn gate_variances_at_the_operating_point() {
        let report = run_gate(&ExperimentConfig::default()).unwrap();
        assert_abs_diff_eq!(report.quad(OutQuad::Xt).variance, 2.0 + 3.0 * E07, epsilon = 1e-12);
        assert_abs_diff_eq!(report.quad(OutQuad::Yt).variance, 1.0 + 2.0 * E07, epsilon = 1e-12);
        assert_abs_diff_eq!(report.quad(OutQuad::Xc).variance, 1.0 + 2.0 * E07, epsilon = 1e-12);
        assert_abs_diff_eq!(report.quad(OutQuad::Yc).variance, 2.0 + 3.0 * E07, epsilon = 1e-12);
        let db = report.db_report_order();
        assert_abs_diff_eq!(db[0], 5.427950515865573, epsilon = 1e-10);
        assert_abs_diff_eq!(db[1], 2.995444741950304, epsilon = 1e-10);
        assert_abs_diff_eq!(db[2], 2.995444741950304, epsilon = 1e-10);
        assert_abs_diff_eq!(db[3], 5.427950515865573, epsilon = 1e-10);
        // output covariance off-diagonals
        assert_abs_diff_eq!(report.output_cov[(0, 2)], -(1.0 + E07), epsilon = 1e-12);
        assert_abs_diff_eq!(report.output_cov[(1, 3)], 1.0 + E07, epsilon = 1e-12);
        assert_abs_diff_eq!(report.duan_witness, 4.979511822748457, epsilon = 1e-12);
        assert_abs_diff_eq!(report.fidelity_target, 0.8729384189168262, epsilon = 1e-12);
        assert_abs_diff_eq!(report.fidelity_control, 0.8729384189168262, epsilon = 1e-12);
    }

    #[test]
    fn classical_baseline_r_zero() {
        let report = run_gate(&ExperimentConfig {
            r: 0.0,
            ..Default::default()
        })
        .unwrap();
        let db = report.db_report_order();
        assert_abs_diff_eq!(db[0], 6.989700043360188, epsilon = 1e-10);
        assert_abs_diff_eq!(db[1], 4.771212547196624, epsilon = 1e-10);
        assert_abs_diff_eq!(db[2], 4.771212547196624, epsilon = 1e-10);
        assert_abs_diff_eq!(db[3], 6.989700043360188, epsilon = 1e-10);
        assert_abs_diff_eq!(report.fidelity_target, 0.7301712917987001, epsilon = 1e-12);
        assert_abs_diff_eq!(report.duan_witness, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn no_cluster_equals_r_zero() {
        let with_r0 = run_gate(&ExperimentConfig {
            r: 0.0,
            ..Default::default()
        })
        .unwrap();
        let without = run_gate(&ExperimentConfig {
            r: 0.35,
            use_cluster: false,
            ..Default::default()
        })
        .unwrap();
        assert!((with_r0.output_cov - without.output_cov).abs().max() < 1e-12);
        assert_abs_diff_eq!(
            with_r0.fidelity_target,
            without.fidelity_target,
            epsilon = 1e-12
        );
    }

    #[test]
    fn zero_gain_cuts_all_information_transfer() {
        let report = run_gate(&ExperimentConfig {
            r: 2.0,
            gains: Gains::uniform(0.0),
            input_means: InputMeans {
                xt: 1.0,
                yt: -2.0,
                xc: 3.0,
                yc: 0.5,
            },
            ..Default::default()
        })
        .unwrap();
        // outputs are the bare b1/b4 marginals: no mean dependence at all
        for q in OutQuad::ALL {
            assert_abs_diff_eq!(report.quad(q).mean, 0.0, epsilon = 1e-12);
        }
        let cluster = build_cluster(2.0).unwrap();
        let m1 = cluster.state.marginal(&[0]).unwrap();
        let m4 = cluster.state.marginal(&[3]).unwrap();
        assert_abs_diff_eq!(report.quad(OutQuad::Xt).variance, m1.cov()[(0, 0)], epsilon = 1e-10);
        assert_abs_diff_eq!(report.quad(OutQuad::Yc).variance, m4.cov()[(1, 1)], epsilon = 1e-10);
    }

    #[test]
    fn mean_transfer_follows_the_ideal_gate() {
        let m = 2.5;
        let report = run_gate(&ExperimentConfig {
            input_means: InputMeans {
                xc: m,
                ..Default::default()
            },
            ..Default::default()
        })
        .unwrap();
        assert_abs_diff_eq!(report.quad(OutQuad::Xt).mean, -m, epsilon = 1e-12);
        assert_abs_diff_eq!(report.quad(OutQuad::Xc).mean, m, epsilon = 1e-12);
        assert_abs_diff_eq!(report.quad(OutQuad::Yt).mean, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.quad(OutQuad::Yc).mean, 0.0, epsilon = 1e-12);
        // displaced inputs keep the fidelity of the vacuum-input run: the
        // output means match the ideal reference exactly at g = 1
        assert_abs_diff_eq!(report.fidelity_target, 0.8729384189168262, epsilon = 1e-12);
    }

    #[test]
    fn gain_error_leaks_means_linearly() {
        let m = 4.0;
        let leak = |g: f64| -> f64 {
            let report = run_gate(&ExperimentConfig {
                gains: Gains::uniform(g),
                input_means: InputMeans {
                    xc: m,
                    ..Default::default()
                },
                ..Default::default()
            })
            .unwrap();
            // X_t^out mean is −g·m: the residual against the ideal −m is (1−g)·m
            report.quad(OutQuad::Xt).mean + m
        };
        let l95 = leak(0.95);
        let l90 = leak(0.90);
        assert_abs_diff_eq!(l95, 0.05 * m, epsilon = 1e-10);
        assert_abs_diff_eq!(l90, 2.0 * l95, epsilon = 1e-10);
        assert_abs_diff_eq!(leak(1.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn strong_squeezing_approaches_the_ideal_gate() {
        for r in [3.0, 4.0, 5.0] {
            let report = run_gate(&ExperimentConfig {
                r,
                ..Default::default()
            })
            .unwrap();
            let ideal = GaussianState::vacuum(2)
                .unwrap()
                .apply(&ideal_controlled_x())
                .unwrap();
            let limit = 10.0 * (-2.0 * r).exp();
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (report.output_cov[(i, j)] - ideal.cov()[(i, j)]).abs() < limit,
                        "r={r}, ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn engines_cross_check_and_match_individually() {
        for r in [0.0, 0.35, 1.0] {
            for g in [0.0, 0.95, 1.0] {
                let base = ExperimentConfig {
                    r,
                    gains: Gains::uniform(g),
                    input_means: InputMeans {
                        xt: 0.3,
                        yt: -0.4,
                        xc: 1.2,
                        yc: 0.0,
                    },
                    ..Default::default()
                };
                let both = run_gate(&base).unwrap();
                let cov_only = run_gate(&ExperimentConfig {
                    engine: EngineChoice::Covariance,
                    ..base.clone()
                })
                .unwrap();
                let heis_only = run_gate(&ExperimentConfig {
                    engine: EngineChoice::Heisenberg,
                    ..base.clone()
                })
                .unwrap();
                assert!((both.output_cov - cov_only.output_cov).abs().max() < 1e-12);
                assert!((cov_only.output_cov - heis_only.output_cov).abs().max() < 1e-10);
                assert!((cov_only.output_mean - heis_only.output_mean).abs().max() < 1e-10);
            }
        }
    }

    #[test]
    fn per_channel_gains_act_on_their_own_channel() {
        let report = run_gate(&ExperimentConfig {
            gains: Gains {
                xt: 1.0,
                yt: 0.0,
                xc: 1.0,
                yc: 1.0,
            },
            r: 1.0,
            ..Default::default()
        })
        .unwrap();
        // with g_yt = 0 the Y_t output is the bare Y_b1 marginal
        let cluster = build_cluster(1.0).unwrap();
        assert_abs_diff_eq!(
            report.quad(OutQuad::Yt).variance,
            cluster.modes[0].y.variance(),
            epsilon = 1e-10
        );
        // the X channels keep their usual closed form
        let e2 = (-2.0f64).exp();
        assert_abs_diff_eq!(
            report.quad(OutQuad::Xt).variance,
            2.0 + 3.0 * e2,
            epsilon = 1e-10
        );
    }

    #[test]
    fn modulation_mean_and_power_convention() {
        let mu = modulation_mean(12.0).unwrap();
        assert_abs_diff_eq!(mu, 3.853431188513833, epsilon = 1e-12);
        assert_abs_diff_eq!(mean_power_db(mu), 12.0, epsilon = 1e-12);
        assert!(modulation_mean(-1.0).is_err());
        assert_abs_diff_eq!(modulation_mean(0.0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn modulation_transfer_map() {
        let reports = modulation_scenarios(0.35, Gains::default(), 12.0).unwrap();
        for rep in &reports {
            assert_abs_diff_eq!(rep.input_power_db, 12.0, epsilon = 1e-12);
            let coupled = rep.modulated.couples_to();
            for q in OutQuad::ALL {
                let mean = rep.gate.quad(q).mean;
                if coupled.contains(&q) {
                    assert_abs_diff_eq!(mean.abs(), rep.input_mean, epsilon = 1e-10);
                    assert_abs_diff_eq!(
                        rep.output_mean_power_db[q as usize],
                        12.0,
                        epsilon = 1e-10
                    );
                } else {
                    assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-10);
                }
            }
        }
        // the Xt scenario keeps its mean on Xt_out positive; the Xc one
        // flips the sign on Xt_out
        assert!(reports[0].gate.quad(OutQuad::Xt).mean > 0.0);
        assert!(reports[2].gate.quad(OutQuad::Xt).mean < 0.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(run_gate(&ExperimentConfig {
            r: -0.2,
            ..Default::default()
        })
        .is_err());
        assert!(run_gate(&ExperimentConfig {
            gains: Gains::uniform(f64::NAN),
            ..Default::default()
        })
        .is_err());
        assert!(run_gate(&ExperimentConfig {
            input_means: InputMeans {
                xt: f64::INFINITY,
                ..Default::default()
            },
            ..Default::default()
        })
        .is_err());
    }
}
