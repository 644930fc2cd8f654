//! Monte Carlo oracle: sample every noise label as a unit-variance
//! Gaussian, push the samples through the literal protocol arithmetic,
//! and estimate the output moments with standard errors. Valid because
//! all states involved are Gaussian with nonnegative phase-space
//! distributions, so homodyne statistics are classical.

use nalgebra::{Matrix4, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::cluster::ClusterNetwork;
use crate::error::{Error, Result};
use crate::gaussian::SqueezeAxis;
use crate::protocol::{ExperimentConfig, GateReport, OutQuad};

/// Sample count and seed of a Monte Carlo validation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub samples: u64,
    pub seed: u64,
}

/// Acceptance-grade runs need at least this many samples.
pub const MIN_ACCEPTANCE_SAMPLES: u64 = 10_000;
/// Generator recorded in every estimate for auditability: batch k of a run
/// seeded with s uses `ChaCha8Rng::seed_from_u64(s)` on stream k.
pub const RNG_NAME: &str = "ChaCha8(seed_from_u64, per-batch stream)";
/// Fixed batch size; part of the seed schedule, so estimates do not depend
/// on how batches are scheduled across threads.
pub const BATCH_SIZE: u64 = 1 << 16;

/// Moment estimates for the four output quadratures, with standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub samples: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub mean: Vector4<f64>,
    /// SE of each mean: √(V/N).
    pub mean_se: Vector4<f64>,
    /// Sample covariance over (X_t, Y_t, X_c, Y_c).
    pub cov: Matrix4<f64>,
    /// SE of each covariance entry: V·√(2/N) on the diagonal,
    /// √((V_a·V_b + c²)/N) off it.
    pub cov_se: Matrix4<f64>,
    pub duan_witness: f64,
    pub duan_witness_se: f64,
}

/// Estimate the gate's output moments by direct sampling.
pub fn mc_estimate(config: &ExperimentConfig, settings: &McSettings) -> Result<McEstimate> {
    config.validate()?;
    if settings.samples < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: settings.samples,
        });
    }
    let ctx = SampleContext::new(config);
    let n_batches = settings.samples.div_ceil(BATCH_SIZE);
    let batches: Vec<MomentAccumulator> = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
            rng.set_stream(batch);
            let count = BATCH_SIZE.min(settings.samples - batch * BATCH_SIZE);
            let mut acc = MomentAccumulator::new();
            for _ in 0..count {
                acc.push(ctx.sample(&mut rng));
            }
            acc
        })
        .collect();
    // deterministic sequential merge in batch order
    let total = batches
        .into_iter()
        .fold(MomentAccumulator::new(), MomentAccumulator::merge);

    let n = total.count as f64;
    let mean = total.mean;
    let cov = total.comoment / (n - 1.0);
    let mean_se = Vector4::from_fn(|i, _| (cov[(i, i)] / n).sqrt());
    let cov_se = Matrix4::from_fn(|i, j| {
        if i == j {
            cov[(i, i)] * (2.0 / n).sqrt()
        } else {
            ((cov[(i, i)] * cov[(j, j)] + cov[(i, j)] * cov[(i, j)]) / n).sqrt()
        }
    });
    // witness = V(u) + V(v); u lives in the X sector and v in the Y
    // sector, which share no noise labels, so the SEs add in quadrature
    let v_u = cov[(0, 0)] + cov[(2, 2)] + 2.0 * cov[(0, 2)];
    let v_v = cov[(3, 3)] + cov[(1, 1)] - 2.0 * cov[(1, 3)];
    let se_u = v_u * (2.0 / n).sqrt();
    let se_v = v_v * (2.0 / n).sqrt();
    Ok(McEstimate {
        samples: settings.samples,
        seed: settings.seed,
        rng: RNG_NAME,
        mean,
        mean_se,
        cov,
        cov_se,
        duan_witness: v_u + v_v,
        duan_witness_se: (se_u * se_u + se_v * se_v).sqrt(),
    })
}

/// One compared quantity of a cross-check between MC and the exact engines.
#[derive(Debug, Clone, PartialEq)]
pub struct McCompareRow {
    pub quantity: String,
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// |estimate − exact| / SE (0 when the SE is zero and the values match).
    pub z: f64,
    pub pass: bool,
}

/// Cross-check result: every reported moment within `sigma` standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McComparison {
    pub rows: Vec<McCompareRow>,
    pub sigma: f64,
    pub pass: bool,
}

/// Run the exact engines and the sampler on the same config and compare
/// every mean, variance, covariance, and the witness at `sigma` standard
/// errors (3 is the acceptance setting).
pub fn mc_crosscheck(
    config: &ExperimentConfig,
    settings: &McSettings,
    sigma: f64,
) -> Result<(GateReport, McEstimate, McComparison)> {
    if settings.samples < MIN_ACCEPTANCE_SAMPLES {
        return Err(Error::TooFewSamples {
            min: MIN_ACCEPTANCE_SAMPLES,
            got: settings.samples,
        });
    }
    let report = crate::protocol::run_gate(config)?;
    let estimate = mc_estimate(config, settings)?;
    let mut rows = Vec::new();
    for q in OutQuad::ALL {
        let i = q as usize;
        rows.push(compare(
            format!("mean({})", q.name()),
            report.output_mean[i],
            estimate.mean[i],
            estimate.mean_se[i],
            sigma,
        ));
    }
    for i in 0..4 {
        for j in i..4 {
            let name = if i == j {
                format!("var({})", OutQuad::ALL[i].name())
            } else {
                format!("cov({},{})", OutQuad::ALL[i].name(), OutQuad::ALL[j].name())
            };
            rows.push(compare(
                name,
                report.output_cov[(i, j)],
                estimate.cov[(i, j)],
                estimate.cov_se[(i, j)],
                sigma,
            ));
        }
    }
    rows.push(compare(
        "duan_witness".into(),
        report.duan_witness,
        estimate.duan_witness,
        estimate.duan_witness_se,
        sigma,
    ));
    let pass = rows.iter().all(|r| r.pass);
    Ok((report, estimate, McComparison { rows, sigma, pass }))
}

fn compare(quantity: String, exact: f64, estimate: f64, std_error: f64, sigma: f64) -> McCompareRow {
    let z = if std_error > 0.0 {
        (estimate - exact).abs() / std_error
    } else if estimate == exact {
        0.0
    } else {
        f64::INFINITY
    };
    McCompareRow {
        quantity,
        exact,
        estimate,
        std_error,
        z,
        pass: z <= sigma,
    }
}

/// Precomputed constants for one sampled protocol run.
struct SampleContext {
    use_cluster: bool,
    axes: [SqueezeAxis; 4],
    pre_rotated: [bool; 4],
    mix: [[f64; 4]; 4],
    e_down: f64,
    e_up: f64,
    means: [f64; 4],
    gains: [f64; 4],
}

impl SampleContext {
    fn new(config: &ExperimentConfig) -> Self {
        let network = ClusterNetwork::linear_four();
        let mut mix = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                mix[i][j] = network.mix[(i, j)];
            }
        }
        Self {
            use_cluster: config.use_cluster,
            axes: network.squeeze_axes,
            pre_rotated: network.pre_rotated,
            mix,
            e_down: (-config.r).exp(),
            e_up: config.r.exp(),
            means: [
                config.input_means.xt,
                config.input_means.yt,
                config.input_means.xc,
                config.input_means.yc,
            ],
            gains: [
                config.gains.xt,
                config.gains.yt,
                config.gains.xc,
                config.gains.yc,
            ],
        }
    }

    /// Draw all twelve labels and run the protocol arithmetic once,
    /// returning (X_t, Y_t, X_c, Y_c) of the output pair.
    fn sample<R: rand::Rng>(&self, rng: &mut R) -> Vector4<f64> {
        let normal = StandardNormal;
        let mut draw = || -> f64 { normal.sample(rng) };

        // cluster submodes b1..b4
        let (mut xb, mut yb) = ([0.0f64; 4], [0.0f64; 4]);
        if self.use_cluster {
            let mut xs = [0.0f64; 4];
            let mut ys = [0.0f64; 4];
            for i in 0..4 {
                let (fx, fy) = match self.axes[i] {
                    SqueezeAxis::X => (self.e_down, self.e_up),
                    SqueezeAxis::Y => (self.e_up, self.e_down),
                };
                xs[i] = fx * draw();
                ys[i] = fy * draw();
                if self.pre_rotated[i] {
                    // -90°: X' = -Y, Y' = X
                    let (x, y) = (xs[i], ys[i]);
                    xs[i] = -y;
                    ys[i] = x;
                }
            }
            for i in 0..4 {
                for j in 0..4 {
                    xb[i] += self.mix[i][j] * xs[j];
                    yb[i] += self.mix[i][j] * ys[j];
                }
            }
        } else {
            for i in 0..4 {
                xb[i] = draw();
                yb[i] = draw();
            }
        }

        // input signals
        let xt = draw() + self.means[0];
        let yt = draw() + self.means[1];
        let xc = draw() + self.means[2];
        let yc = draw() + self.means[3];

        // 50:50 couplings and the four detected photocurrents
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x_t1 = h * (xt + xb[1]);
        let y_t2 = h * (-yt + yb[1]);
        let x_c1 = h * (-xc + xb[2]);
        let y_c2 = h * (yc + yb[2]);

        // feed-forward displacements on b1 and b4
        let s2 = std::f64::consts::SQRT_2;
        Vector4::new(
            xb[0] + s2 * self.gains[0] * (x_t1 + x_c1),
            yb[0] - s2 * self.gains[1] * y_t2,
            xb[3] - s2 * self.gains[2] * x_c1,
            yb[3] + s2 * self.gains[3] * (-y_t2 + y_c2),
        )
    }
}

/// Streaming mean/comoment accumulator with an exact pairwise merge, so
/// batches can be computed in parallel and folded in a fixed order.
#[derive(Debug, Clone)]
struct MomentAccumulator {
    count: u64,
    mean: Vector4<f64>,
    comoment: Matrix4<f64>,
}

impl MomentAccumulator {
    fn new() -> Self {
        Self {
            count: 0,
            mean: Vector4::zeros(),
            comoment: Matrix4::zeros(),
        }
    }

    fn push(&mut self, x: Vector4<f64>) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        let delta2 = x - self.mean;
        self.comoment += delta * delta2.transpose();
    }

    fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        Self {
            count: self.count + other.count,
            mean: self.mean + delta * (nb / n),
            comoment: self.comoment + other.comoment + delta * delta.transpose() * (na * nb / n),
        }
    }
}
