//! The acceptance suite: every reproduction target of the simulator as a
//! runtime-checkable criterion, each with its tolerance pinned in code.
//! `run_all` is what the CLI `selftest` subcommand executes; the
//! `acceptance` integration test drives the same checks.

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cluster::{nullifier_report, NULLIFIER_SNLS};
use crate::gaussian::{GaussianState, SqueezeAxis, SymplecticTransform, TransformSpec};
use crate::heisenberg::{NoiseLabel, QuadratureCombo};
use crate::mc::{mc_crosscheck, McSettings as Mc};
use crate::metrics::{
    entanglement_threshold_scan, gaussian_fidelity, SingleModeGaussian, DUAN_SEPARABLE_BOUND,
    LITERATURE_THRESHOLD_DB,
};
use crate::protocol::{
    modulation_scenarios, output_combos, run_gate, EngineChoice, ExperimentConfig, Gains, OutQuad,
};

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn summary_line(&self) -> String {
        format!(
            "[{}] criterion {}: {} — {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

/// Benchmark dB levels measured on the tabletop realization of this gate,
/// used as reproduction targets: with the cluster at the operating point
/// (order X_t, X_c, Y_t, Y_c) and for the classical baseline.
pub const MEASURED_DB_WITH_CLUSTER: [f64; 4] = [5.39, 2.95, 3.01, 5.50];
pub const MEASURED_DB_CLASSICAL: [f64; 4] = [6.95, 4.76, 4.77, 6.93];
/// Reported fidelities at the operating point and for the baseline.
pub const MEASURED_FIDELITY_CLUSTER: f64 = 0.87;
pub const MEASURED_FIDELITY_CLASSICAL: f64 = 0.73;

/// Operating squeezing parameter of the modeled experiment.
pub const OPERATING_R: f64 = 0.35;

const MC_SEED: u64 = 424_242;
const MC_SAMPLES: u64 = 1_000_000;
const PROPERTY_CASES: usize = 1000;

/// Run all nine criteria in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        criterion_1_nullifiers(),
        criterion_2_gate_variances(),
        criterion_3_classical_baseline(),
        criterion_4_fidelities(),
        criterion_5_noise_term_audit(),
        criterion_6_modulation_transfer(),
        criterion_7_engine_triangle(),
        criterion_8_threshold_scan(),
        criterion_9_property_suites(),
    ]
}

pub fn all_passed(outcomes: &[CriterionOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

fn outcome(id: u8, name: &'static str, result: Result<String, String>) -> CriterionOutcome {
    match result {
        Ok(detail) => CriterionOutcome {
            id,
            name,
            passed: true,
            detail,
        },
        Err(detail) => CriterionOutcome {
            id,
            name,
            passed: false,
            detail,
        },
    }
}

/// 1. At r = 0.35 all four squeezed correlations sit 3.04 dB below their
/// combination SNLs; linear variances match the closed forms to 1e-9.
pub fn criterion_1_nullifiers() -> CriterionOutcome {
    outcome(1, "nullifier reproduction at r = 0.35", (|| {
        let records = nullifier_report(OPERATING_R).map_err(|e| e.to_string())?;
        let e2r = (-2.0 * OPERATING_R).exp();
        let closed = [2.0 * e2r, 3.0 * e2r, 3.0 * e2r, 2.0 * e2r];
        let mut worst_var = 0.0f64;
        let mut worst_db = 0.0f64;
        for (rec, expect) in records.iter().zip(closed) {
            worst_var = worst_var.max((rec.variance - expect).abs());
            worst_db = worst_db.max((rec.db_vs_snl - (-3.04)).abs());
        }
        if worst_var > 1e-9 {
            return Err(format!("variance deviates from closed form by {worst_var:.3e} (tol 1e-9)"));
        }
        if worst_db > 0.005 {
            return Err(format!("dB levels do not round to -3.04 (worst delta {worst_db:.4})"));
        }
        let snls: Vec<f64> = records.iter().map(|r| r.snl).collect();
        if snls != NULLIFIER_SNLS.to_vec() {
            return Err(format!("combination SNLs wrong: {snls:?}"));
        }
        Ok(format!(
            "all four at -3.04 dB vs SNLs (2,3,3,2); worst variance delta {worst_var:.2e}"
        ))
    })())
}

fn db_tuple(config: &ExperimentConfig) -> Result<[f64; 4], String> {
    run_gate(config)
        .map(|rep| rep.db_report_order())
        .map_err(|e| e.to_string())
}

/// 2. With the cluster at r = 0.35, g = 1: (5.43, 3.00, 3.00, 5.43) dB for
/// (X_t, X_c, Y_t, Y_c), each within 0.15 dB of the measured benchmark.
pub fn criterion_2_gate_variances() -> CriterionOutcome {
    outcome(2, "gate output variances with cluster", (|| {
        let db = db_tuple(&ExperimentConfig::default())?;
        let model = [5.43, 3.00, 3.00, 5.43];
        for (i, (&got, want)) in db.iter().zip(model).enumerate() {
            if (got - want).abs() > 0.005 {
                return Err(format!("dB[{i}] = {got:.4}, expected to round to {want}"));
            }
            let bench = MEASURED_DB_WITH_CLUSTER[i];
            if (got - bench).abs() > 0.15 {
                return Err(format!(
                    "dB[{i}] = {got:.4} misses measured benchmark {bench} by more than 0.15 dB"
                ));
            }
        }
        Ok(format!(
            "({:.2}, {:.2}, {:.2}, {:.2}) dB, all within 0.15 dB of measured {:?}",
            db[0], db[1], db[2], db[3], MEASURED_DB_WITH_CLUSTER
        ))
    })())
}

/// 3. Classical baseline (r = 0 and use_cluster = false): (6.99, 4.77,
/// 4.77, 6.99) dB, each within 0.1 dB of the measured benchmark.
pub fn criterion_3_classical_baseline() -> CriterionOutcome {
    outcome(3, "classical baseline variances", (|| {
        let r0 = db_tuple(&ExperimentConfig {
            r: 0.0,
            ..Default::default()
        })?;
        let no_cluster = db_tuple(&ExperimentConfig {
            use_cluster: false,
            ..Default::default()
        })?;
        let model = [6.99, 4.77, 4.77, 6.99];
        for (i, (&got, want)) in r0.iter().zip(model).enumerate() {
            if (got - want).abs() > 0.005 {
                return Err(format!("dB[{i}] = {got:.4}, expected to round to {want}"));
            }
            let bench = MEASURED_DB_CLASSICAL[i];
            if (got - bench).abs() > 0.1 {
                return Err(format!(
                    "dB[{i}] = {got:.4} misses measured benchmark {bench} by more than 0.1 dB"
                ));
            }
            if (got - no_cluster[i]).abs() > 1e-9 {
                return Err(format!(
                    "vacuum substitutes disagree with r = 0 on dB[{i}]: {got} vs {}",
                    no_cluster[i]
                ));
            }
        }
        Ok(format!(
            "({:.2}, {:.2}, {:.2}, {:.2}) dB, within 0.1 dB of measured {:?}; r=0 == no-cluster",
            r0[0], r0[1], r0[2], r0[3], MEASURED_DB_CLASSICAL
        ))
    })())
}

/// 4. Fidelities 0.7302 (baseline) and 0.8729 (cluster), equal for target
/// and control, within 5e-4 of the closed-form arithmetic.
pub fn criterion_4_fidelities() -> CriterionOutcome {
    outcome(4, "output fidelities", (|| {
        let cluster = run_gate(&ExperimentConfig::default()).map_err(|e| e.to_string())?;
        let baseline = run_gate(&ExperimentConfig {
            r: 0.0,
            ..Default::default()
        })
        .map_err(|e| e.to_string())?;
        // closed-form route, straight through the fidelity formula
        let e2r = (-2.0 * OPERATING_R).exp();
        let ideal_t = SingleModeGaussian::new(Matrix2::new(2.0, 0.0, 0.0, 1.0), Vector2::zeros())
            .map_err(|e| e.to_string())?;
        let closed_cluster = gaussian_fidelity(
            &ideal_t,
            &SingleModeGaussian::new(
                Matrix2::new(2.0 + 3.0 * e2r, 0.0, 0.0, 1.0 + 2.0 * e2r),
                Vector2::zeros(),
            )
            .map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let closed_baseline = gaussian_fidelity(
            &ideal_t,
            &SingleModeGaussian::new(Matrix2::new(5.0, 0.0, 0.0, 3.0), Vector2::zeros())
                .map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;

        let checks = [
            ("F_t cluster", cluster.fidelity_target, closed_cluster),
            ("F_c cluster", cluster.fidelity_control, closed_cluster),
            ("F_t baseline", baseline.fidelity_target, closed_baseline),
            ("F_c baseline", baseline.fidelity_control, closed_baseline),
        ];
        for (name, got, want) in checks {
            if (got - want).abs() > 5e-4 {
                return Err(format!("{name} = {got:.6}, closed form {want:.6} (tol 5e-4)"));
            }
        }
        let round2 = |x: f64| (x * 100.0).round() / 100.0;
        if round2(cluster.fidelity_target) != MEASURED_FIDELITY_CLUSTER
            || round2(baseline.fidelity_target) != MEASURED_FIDELITY_CLASSICAL
        {
            return Err(format!(
                "fidelities {:.4}/{:.4} do not round to the reported {}/{}",
                cluster.fidelity_target,
                baseline.fidelity_target,
                MEASURED_FIDELITY_CLUSTER,
                MEASURED_FIDELITY_CLASSICAL
            ));
        }
        Ok(format!(
            "F = {:.4} (cluster) and {:.4} (baseline), rounding to {} and {}",
            cluster.fidelity_target,
            baseline.fidelity_target,
            MEASURED_FIDELITY_CLUSTER,
            MEASURED_FIDELITY_CLASSICAL
        ))
    })())
}

/// The output combos the protocol must reproduce at g = 1, written from
/// their printed closed forms:
///   X_t = √(5/2)e^{-r}·X0_a2 − √(1/2)e^{-r}·Y0_a4 + X_t − X_c
///   Y_t = √2·e^{-r}·Y0_a1 + Y_t
///   X_c = √2·e^{-r}·Y0_a4 + X_c
///   Y_c = −√(5/2)e^{-r}·X0_a3 + √(1/2)e^{-r}·Y0_a1 + Y_t + Y_c
pub fn expected_output_combos(r: f64) -> [QuadratureCombo; 4] {
    use NoiseLabel::*;
    let em = (-r).exp();
    let c52 = (5.0f64 / 2.0).sqrt() * em;
    let c12 = (1.0f64 / 2.0).sqrt() * em;
    let c2 = std::f64::consts::SQRT_2 * em;
    [
        QuadratureCombo::linear_combine(&[
            (c52, &QuadratureCombo::label(SeedX(1))),
            (-c12, &QuadratureCombo::label(SeedY(3))),
            (1.0, &QuadratureCombo::label(InputXt)),
            (-1.0, &QuadratureCombo::label(InputXc)),
        ]),
        QuadratureCombo::linear_combine(&[
            (c2, &QuadratureCombo::label(SeedY(0))),
            (1.0, &QuadratureCombo::label(InputYt)),
        ]),
        QuadratureCombo::linear_combine(&[
            (c2, &QuadratureCombo::label(SeedY(3))),
            (1.0, &QuadratureCombo::label(InputXc)),
        ]),
        QuadratureCombo::linear_combine(&[
            (-c52, &QuadratureCombo::label(SeedX(2))),
            (c12, &QuadratureCombo::label(SeedY(0))),
            (1.0, &QuadratureCombo::label(InputYt)),
            (1.0, &QuadratureCombo::label(InputYc)),
        ]),
    ]
}

/// 5. The Heisenberg-engine output combos at g = 1 match the printed
/// closed forms coefficient-for-coefficient to 1e-12.
pub fn criterion_5_noise_term_audit() -> CriterionOutcome {
    outcome(5, "noise-term audit of the output combos", (|| {
        let mut worst = 0.0f64;
        for r in [0.0, OPERATING_R, 1.0] {
            let got = output_combos(&ExperimentConfig {
                r,
                ..Default::default()
            })
            .map_err(|e| e.to_string())?;
            let want = expected_output_combos(r);
            for (q, (g, w)) in got.iter().zip(want.iter()).enumerate() {
                let delta = g.max_coefficient_delta(w);
                worst = worst.max(delta);
                if delta > 1e-12 {
                    return Err(format!(
                        "{} combo at r={r}: coefficient delta {delta:.3e} (tol 1e-12); got {g}, want {w}",
                        OutQuad::ALL[q].name()
                    ));
                }
            }
        }
        Ok(format!(
            "combos match printed closed forms at r in {{0, 0.35, 1}}; worst delta {worst:.2e}"
        ))
    })())
}

/// 6. With one input quadrature driven 12 dB above the SNL, the mean power
/// lands on exactly the gate-dictated output quadratures at 12 ± 0.05 dB,
/// and the noise floors stay at their criterion-2 levels.
pub fn criterion_6_modulation_transfer() -> CriterionOutcome {
    outcome(6, "modulation transfer map", (|| {
        let reports = modulation_scenarios(OPERATING_R, Gains::default(), 12.0)
            .map_err(|e| e.to_string())?;
        let e2r = (-2.0 * OPERATING_R).exp();
        let floors = [
            2.0 + 3.0 * e2r,
            1.0 + 2.0 * e2r,
            1.0 + 2.0 * e2r,
            2.0 + 3.0 * e2r,
        ];
        for rep in &reports {
            if (rep.input_power_db - 12.0).abs() > 0.05 {
                return Err(format!(
                    "input power {:.3} dB instead of 12 dB",
                    rep.input_power_db
                ));
            }
            let coupled = rep.modulated.couples_to();
            for q in OutQuad::ALL {
                let i = q as usize;
                let power = rep.output_mean_power_db[i];
                if coupled.contains(&q) {
                    if (power - 12.0).abs() > 0.05 {
                        return Err(format!(
                            "{} drive: {} carries {:.3} dB, expected 12 ± 0.05",
                            rep.modulated.name(),
                            q.name(),
                            power
                        ));
                    }
                } else if rep.gate.quad(q).mean.abs() > 1e-9 {
                    return Err(format!(
                        "{} drive leaks mean {:.3e} into {}",
                        rep.modulated.name(),
                        rep.gate.quad(q).mean,
                        q.name()
                    ));
                }
                if (rep.gate.quad(q).variance - floors[i]).abs() > 1e-9 {
                    return Err(format!(
                        "{} drive shifts the {} noise floor to {:.6}",
                        rep.modulated.name(),
                        q.name(),
                        rep.gate.quad(q).variance
                    ));
                }
            }
        }
        Ok("all four drives land 12.00 dB on exactly the coupled outputs; floors unchanged".into())
    })())
}

/// 7. Covariance and Heisenberg engines agree to 1e-10 and the sampler
/// agrees within 3 standard errors (N = 10⁶, fixed seed) over
/// r ∈ {0, 0.35, 1} × g ∈ {0, 0.95, 1}.
pub fn criterion_7_engine_triangle() -> CriterionOutcome {
    outcome(7, "engine triangle (covariance / Heisenberg / MC)", (|| {
        let mut worst_exact = 0.0f64;
        let mut worst_z = 0.0f64;
        for r in [0.0, OPERATING_R, 1.0] {
            for g in [0.0, 0.95, 1.0] {
                let config = ExperimentConfig {
                    r,
                    gains: Gains::uniform(g),
                    ..Default::default()
                };
                let cov_rep = run_gate(&ExperimentConfig {
                    engine: EngineChoice::Covariance,
                    ..config.clone()
                })
                .map_err(|e| e.to_string())?;
                let heis_rep = run_gate(&ExperimentConfig {
                    engine: EngineChoice::Heisenberg,
                    ..config.clone()
                })
                .map_err(|e| e.to_string())?;
                let exact_delta = (cov_rep.output_cov - heis_rep.output_cov)
                    .abs()
                    .max()
                    .max((cov_rep.output_mean - heis_rep.output_mean).abs().max())
                    .max((cov_rep.fidelity_target - heis_rep.fidelity_target).abs())
                    .max((cov_rep.fidelity_control - heis_rep.fidelity_control).abs())
                    .max((cov_rep.duan_witness - heis_rep.duan_witness).abs());
                worst_exact = worst_exact.max(exact_delta);
                if exact_delta > 1e-10 {
                    return Err(format!(
                        "exact engines differ by {exact_delta:.3e} at r={r}, g={g} (tol 1e-10)"
                    ));
                }
                let (_, _, cmp) = mc_crosscheck(
                    &config,
                    &Mc {
                        samples: MC_SAMPLES,
                        seed: MC_SEED,
                    },
                    3.0,
                )
                .map_err(|e| e.to_string())?;
                for row in &cmp.rows {
                    worst_z = worst_z.max(row.z);
                    if !row.pass {
                        return Err(format!(
                            "MC misses {} at r={r}, g={g}: exact {:.6}, estimate {:.6}, z = {:.2}",
                            row.quantity, row.exact, row.estimate, row.z
                        ));
                    }
                }
            }
        }
        Ok(format!(
            "9 configs: exact engines within {worst_exact:.2e}, MC worst |z| = {worst_z:.2} (< 3)"
        ))
    })())
}

/// 8. The unit-gain witness 2 + 6e^{-2r} crosses 4 at r = 0.5493
/// (4.77 dB of initial squeezing); the scan records the unresolved gap to
/// the ~7 dB literature figure, and at r = 0.35 the witness stays above
/// the bound, consistent with no observed output entanglement.
pub fn criterion_8_threshold_scan() -> CriterionOutcome {
    outcome(8, "output-entanglement threshold scan", (|| {
        let step = 1e-4;
        let scan = entanglement_threshold_scan(0.0, 1.0, step).map_err(|e| e.to_string())?;
        let (r, db) = scan
            .threshold
            .ok_or_else(|| "no threshold found in [0, 1]".to_string())?;
        let expect_r = 0.5493061443340549; // solves 2 + 6e^{-2r} = 4
        if (r - expect_r).abs() > step + 1e-12 {
            return Err(format!("threshold at r = {r:.6}, expected {expect_r:.6} ± {step}"));
        }
        if (db - 4.771212547196624).abs() > 0.002 {
            return Err(format!("threshold squeezing {db:.4} dB, expected 4.77 dB"));
        }
        let at_operating = run_gate(&ExperimentConfig::default())
            .map_err(|e| e.to_string())?
            .duan_witness;
        if (at_operating - 4.979511822748457).abs() > 1e-9 {
            return Err(format!(
                "witness at r = 0.35 is {at_operating:.9}, expected 4.980"
            ));
        }
        if at_operating <= DUAN_SEPARABLE_BOUND {
            return Err("witness at the operating point certifies entanglement; it must not".into());
        }
        Ok(format!(
            "threshold r = {r:.4} ({db:.2} dB); witness(0.35) = {at_operating:.3} > {DUAN_SEPARABLE_BOUND}; \
             open question: literature quotes ~{LITERATURE_THRESHOLD_DB} dB for this requirement, \
             criterion unspecified there — both values reported, not reconciled"
        ))
    })())
}

/// 9. Randomized property suites, 1000 cases each, zero violations:
/// symplectic invariant, state PSD invariant, purity preservation,
/// outcome-independence of conditional covariance, fidelity bounds.
pub fn criterion_9_property_suites() -> CriterionOutcome {
    outcome(9, "randomized property suites", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

        // symplectic invariant over random specs
        for case in 0..PROPERTY_CASES {
            let n_modes = rng.gen_range(1..=4);
            let t = random_transform(&mut rng, n_modes);
            let defect = t.symplectic_defect();
            if defect > 1e-12 {
                return Err(format!("case {case}: symplectic defect {defect:.3e}"));
            }
        }

        // PSD invariant and purity preservation on random pipelines
        for case in 0..PROPERTY_CASES {
            let n_modes = rng.gen_range(2..=4);
            let mut state = GaussianState::vacuum(n_modes).map_err(|e| e.to_string())?;
            let pure_det_before = state.purity_det();
            for _ in 0..rng.gen_range(1..=6) {
                state = state
                    .apply(&random_transform(&mut rng, n_modes))
                    .map_err(|e| e.to_string())?;
            }
            if let Err(e) = state.validate() {
                return Err(format!("case {case}: transformed state invalid: {e}"));
            }
            let det = state.purity_det();
            if (det - pure_det_before).abs() > 1e-10 {
                return Err(format!("case {case}: purity drifted, det {det:.12}"));
            }
            // conditioning keeps the state physical too
            let mode = rng.gen_range(0..n_modes);
            let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let cond = state
                .homodyne_condition(mode, angle, rng.gen_range(-3.0..3.0))
                .map_err(|e| e.to_string())?;
            if let Err(e) = cond.validate() {
                return Err(format!("case {case}: conditioned state invalid: {e}"));
            }
        }

        // homodyne outcome-independence of the conditional covariance
        for case in 0..PROPERTY_CASES {
            let n_modes = rng.gen_range(2..=4);
            let mut state = GaussianState::vacuum(n_modes).map_err(|e| e.to_string())?;
            for _ in 0..3 {
                state = state
                    .apply(&random_transform(&mut rng, n_modes))
                    .map_err(|e| e.to_string())?;
            }
            let mode = rng.gen_range(0..n_modes);
            let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let a = state
                .homodyne_condition(mode, angle, rng.gen_range(-5.0..5.0))
                .map_err(|e| e.to_string())?;
            let b = state
                .homodyne_condition(mode, angle, rng.gen_range(-5.0..5.0))
                .map_err(|e| e.to_string())?;
            let delta = (a.cov() - b.cov()).abs().max();
            if delta > 1e-12 {
                return Err(format!("case {case}: conditional covariance moved by {delta:.3e}"));
            }
        }

        // fidelity bounds on random valid single-mode pairs
        for case in 0..PROPERTY_CASES {
            let s1 = random_single_mode(&mut rng);
            let s2 = random_single_mode(&mut rng);
            let f12 = gaussian_fidelity(&s1, &s2).map_err(|e| e.to_string())?;
            let f21 = gaussian_fidelity(&s2, &s1).map_err(|e| e.to_string())?;
            if !(-1e-12..=1.0 + 1e-12).contains(&f12) {
                return Err(format!("case {case}: fidelity {f12} out of [0, 1]"));
            }
            if (f12 - f21).abs() > 1e-12 {
                return Err(format!("case {case}: fidelity asymmetric, {f12} vs {f21}"));
            }
            let f11 = gaussian_fidelity(&s1, &s1).map_err(|e| e.to_string())?;
            if (f11 - 1.0).abs() > 1e-9 {
                return Err(format!("case {case}: self-fidelity {f11}"));
            }
        }

        Ok(format!("{PROPERTY_CASES} cases per property, zero violations"))
    })())
}

fn random_transform(rng: &mut ChaCha8Rng, n_modes: usize) -> SymplecticTransform {
    let spec = match rng.gen_range(0..5) {
        0 => TransformSpec::Squeezer {
            mode: rng.gen_range(0..n_modes),
            r: rng.gen_range(0.0..2.0),
            axis: if rng.gen() { SqueezeAxis::X } else { SqueezeAxis::Y },
        },
        1 => TransformSpec::Rotation {
            mode: rng.gen_range(0..n_modes),
            theta: rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        },
        2 if n_modes >= 2 => {
            let mode_a = rng.gen_range(0..n_modes);
            let mode_b = (mode_a + rng.gen_range(1..n_modes)) % n_modes;
            let phi: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let sign = if rng.gen() { 1.0 } else { -1.0 };
            TransformSpec::Beamsplitter {
                mode_a,
                mode_b,
                mix: [
                    [phi.cos(), phi.sin()],
                    [-sign * phi.sin(), sign * phi.cos()],
                ],
            }
        }
        3 => {
            let mut perm: Vec<usize> = (0..n_modes).collect();
            for i in (1..perm.len()).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            TransformSpec::Permutation(perm)
        }
        _ => TransformSpec::Displacement(
            (0..2 * n_modes).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        ),
    };
    SymplecticTransform::make(n_modes, &spec).expect("random spec is valid")
}

fn random_single_mode(rng: &mut ChaCha8Rng) -> SingleModeGaussian {
    // R diag(a, b) Rᵀ with a·b ≥ 1 is a valid covariance
    let a = rng.gen_range(1.0..6.0);
    let b = rng.gen_range(1.0f64 / a..6.0);
    let theta: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let (c, s) = (theta.cos(), theta.sin());
    let rot = Matrix2::new(c, -s, s, c);
    let cov = rot * Matrix2::new(a, 0.0, 0.0, b) * rot.transpose();
    let cov = (cov + cov.transpose()) * 0.5;
    SingleModeGaussian::new(
        cov,
        Vector2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
    )
    .expect("generated covariance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_criterion_function_runs() {
        // cheap criteria only; the expensive ones run in the acceptance target
        assert!(criterion_1_nullifiers().passed);
        assert!(criterion_4_fidelities().passed);
        assert!(criterion_5_noise_term_audit().passed);
    }
}
