//! The acceptance suite: every release criterion with its tolerance pinned.
//!
//! Each criterion is an independent function returning a [`CriterionReport`];
//! `run_acceptance` executes them in order. The CLI `validate` subcommand and
//! the `acceptance` integration test both drive this module, so the printed
//! PASS/FAIL lines and the test verdicts can never disagree.

use num_complex::Complex64;

use crate::analytic::{
    inversion_series_sweep, mean_photon_series_sweep, AnalyticEngine, SeriesConfig,
};
use crate::dispersive::cat_state;
use crate::error::{Error, Result};
use crate::hilbert::{FockSpace, StateVector};
use crate::model::{DrivenParams, InitialCondition};
use crate::observables::{
    atomic_entropy, entropy, entropy_minimum, inversion, mandel_q, mean_photon, reduced_atom,
    reduced_field, ObservableSeries,
};
use crate::oracle::{evolve_rk4, invariant_drift, FrameExactEngine, IntegratorConfig, Method};

/// Per-point infidelity between the analytic chain and the frame-exact
/// propagator on the reference run.
pub const CROSS_ENGINE_INFIDELITY: f64 = 1e-8;
/// Closed-form series vs oracle observables on the reference run.
pub const SERIES_VS_ORACLE: f64 = 1e-8;
/// RK4 vs frame-exact endpoint infidelity over `t in [0, 10]`.
pub const FRAME_CHAIN_INFIDELITY: f64 = 1e-7;
/// Invariant drift budget along the reference trajectory.
pub const INVARIANT_DRIFT_MAX: f64 = 1e-9;
/// Drift the broken-constraint negative control must exceed.
pub const NEGATIVE_CONTROL_DRIFT_MIN: f64 = 1e-3;
/// Driven collapse plateau and half-width.
pub const DRIVEN_PLATEAU: f64 = 13.44;
/// Closed-form driven plateau `|beta + alpha|^2 + alpha^2 + 1/2`.
pub const DRIVEN_PLATEAU_CLOSED_FORM: f64 = 13.439797974644666;
/// Standard collapse plateau.
pub const STANDARD_PLATEAU: f64 = 8.5;
/// Tolerance on both plateaus.
pub const PLATEAU_TOL: f64 = 0.10;
/// Collapse gate: windowed dispersion must fall below this fraction of its
/// early-time maximum.
pub const SUPER_REVIVAL_COLLAPSE_FRACTION: f64 = 0.10;
/// Revival gate: and later recover above this fraction.
pub const SUPER_REVIVAL_RECOVERY_FRACTION: f64 = 0.50;
/// Entropy-minimum targets and tolerance.
pub const ENTROPY_MIN_DRIVEN: f64 = 11.5;
pub const ENTROPY_MIN_STANDARD: f64 = 9.83;
pub const ENTROPY_MIN_TOL: f64 = 0.3;
/// Araki-Lieb equality budget for pure composite states.
pub const ARAKI_LIEB_TOL: f64 = 1e-8;
/// Mandel Q of the initial coherent field.
pub const MANDEL_Q_INITIAL_TOL: f64 = 1e-9;
/// Q must swing at least this far to both signs on the driven run.
pub const MANDEL_Q_SWING: f64 = 0.05;
/// Dispersive cat fidelity floor against the exact propagator.
pub const CAT_FIDELITY_FLOOR: f64 = 0.98;
/// Cat infidelity at `t = 0`.
pub const CAT_INITIAL_INFIDELITY: f64 = 1e-10;
/// Resonant vacuum Rabi oscillation error budget.
pub const RABI_REDUCTION_TOL: f64 = 1e-7;

/// Reference driven parameter set (cavity 0.4, atom 0.9, g 1, zeta 0.7,
/// xi 0.2, coherent amplitude sqrt(8)).
pub fn reference_driven() -> DrivenParams {
    DrivenParams::from_free(0.4, 0.9, 1.0, 0.7, 0.2).expect("reference set is valid")
}

/// Matching undriven comparison set.
pub fn reference_standard() -> DrivenParams {
    DrivenParams::standard(0.4, 0.9, 1.0).expect("reference set is valid")
}

/// Dispersive-regime set with `Delta/g = 20` used by the cat criterion.
pub fn reference_dispersive() -> DrivenParams {
    DrivenParams::from_free(0.4, 20.4, 1.0, 0.1, 0.05).expect("reference set is valid")
}

pub fn reference_beta() -> Complex64 {
    Complex64::new(8.0f64.sqrt(), 0.0)
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:2} {:<28} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidationOptions {
    /// Skip the long-running criteria (direct integration, long-time scan,
    /// entropy minima); the remainder finishes in seconds.
    pub quick: bool,
    /// Override the automatic Fock truncation (negative controls).
    pub dim_override: Option<usize>,
}

impl ValidationOptions {
    fn space_for(&self, p: &DrivenParams, beta: Complex64) -> Result<FockSpace> {
        match self.dim_override {
            Some(dim) => FockSpace::new(dim),
            None => Ok(p.auto_fock_space(beta)),
        }
    }
}

fn report(id: usize, name: &'static str, outcome: Result<(bool, String)>) -> CriterionReport {
    match outcome {
        Ok((passed, detail)) => CriterionReport {
            id,
            name,
            passed,
            detail,
        },
        Err(err) => CriterionReport {
            id,
            name,
            passed: false,
            detail: format!("error: {err}"),
        },
    }
}

fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| t_max * k as f64 / (steps - 1) as f64)
        .collect()
}

/// Criterion 1: per-point agreement between the closed-form solution, the
/// frame-exact oracle, and the observable series on the reference run.
pub fn criterion_1(opts: &ValidationOptions) -> CriterionReport {
    report(1, "cross-engine exactness", (|| {
        let started = std::time::Instant::now();
        let p = reference_driven();
        let beta = reference_beta();
        let space = opts.space_for(&p, beta)?;
        let ic = InitialCondition::excited(beta);
        let init = ic.state(space)?;
        let times = uniform_grid(50.0, 2000);
        let cfg = SeriesConfig::default();

        let analytic = AnalyticEngine::new(&p, &ic, space)?;
        let frame = FrameExactEngine::new(&p, space)?;
        let w_series = inversion_series_sweep(&times, &p, &ic, &cfg)?;
        let n_series = mean_photon_series_sweep(&times, &p, &ic, &cfg)?;

        let mut max_infidelity = 0.0f64;
        let mut max_dw = 0.0f64;
        let mut max_dn = 0.0f64;
        let mut bounds_ok = true;
        let mut err: Option<Error> = None;
        frame.for_each_state(&init, &times, |k, t, oracle| {
            if err.is_some() {
                return;
            }
            match (|| -> Result<()> {
                let solved = analytic.state_at(t)?;
                max_infidelity = max_infidelity.max(1.0 - oracle.fidelity(&solved)?);
                let w = inversion(oracle)?;
                let n = mean_photon(oracle)?;
                bounds_ok &= (-1.0 - 1e-12..=1.0 + 1e-12).contains(&w);
                max_dw = max_dw.max((w - w_series[k]).abs());
                max_dn = max_dn.max((n - n_series[k]).abs());
                Ok(())
            })() {
                Ok(()) => {}
                Err(e) => err = Some(e),
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        let elapsed = started.elapsed().as_secs_f64();
        let passed = max_infidelity <= CROSS_ENGINE_INFIDELITY
            && max_dw <= SERIES_VS_ORACLE
            && max_dn <= SERIES_VS_ORACLE
            && bounds_ok
            && elapsed <= 120.0;
        Ok((passed, format!(
            "max infidelity {max_infidelity:.2e} (<= {CROSS_ENGINE_INFIDELITY:.0e}), max |dW| {max_dw:.2e}, max |d<n>| {max_dn:.2e} (<= {SERIES_VS_ORACLE:.0e}), dim {}, {elapsed:.1} s",
            space.dim()
        )))
    })())
}

/// Criterion 2: direct RK4 integration of the raw time-dependent Hamiltonian
/// reproduces the frame-exact endpoint.
pub fn criterion_2(opts: &ValidationOptions) -> CriterionReport {
    report(2, "frame-chain validation", (|| {
        let started = std::time::Instant::now();
        let p = reference_driven();
        let beta = reference_beta();
        let space = opts.space_for(&p, beta)?;
        let init = InitialCondition::excited(beta).state(space)?;
        let times = uniform_grid(10.0, 11);
        let cfg = IntegratorConfig {
            dt: 1e-3,
            method: Method::Rk4,
        };
        let rk = evolve_rk4(&init, &times, &p, space, &cfg)?;
        let frame = FrameExactEngine::new(&p, space)?;
        let exact_end = frame.state_at(&init, 10.0)?;
        let rk_end = rk.states()?.last().expect("non-empty grid");
        let infidelity = 1.0 - rk_end.fidelity(&exact_end)?;
        let elapsed = started.elapsed().as_secs_f64();
        let passed = infidelity <= FRAME_CHAIN_INFIDELITY
            && rk.max_norm_drift <= 1e-8
            && elapsed <= 180.0;
        Ok((passed, format!(
            "endpoint infidelity {infidelity:.2e} (<= {FRAME_CHAIN_INFIDELITY:.0e}), norm drift {:.2e}, {elapsed:.1} s",
            rk.max_norm_drift
        )))
    })())
}

/// Criterion 3: the invariant expectation is conserved on the reference
/// trajectory and visibly broken by a 10 percent constraint violation.
pub fn criterion_3(opts: &ValidationOptions) -> CriterionReport {
    report(3, "invariant conservation", (|| {
        let p = reference_driven();
        let beta = reference_beta();
        let space = opts.space_for(&p, beta)?;
        let init = InitialCondition::excited(beta).state(space)?;
        let times = uniform_grid(50.0, 2000);
        let frame = FrameExactEngine::new(&p, space)?;
        let traj = frame.evolve(&init, &times)?;
        let drift = invariant_drift(&traj, &p)?;

        let broken = DrivenParams::unconstrained(
            p.omega_c(),
            p.omega_eg(),
            p.omega_0(),
            p.g(),
            p.zeta(),
            p.xi() * 1.1,
        )?;
        let traj_b = FrameExactEngine::new(&broken, space)?.evolve(&init, &times)?;
        let drift_b = invariant_drift(&traj_b, &broken)?;

        let passed = drift <= INVARIANT_DRIFT_MAX && drift_b > NEGATIVE_CONTROL_DRIFT_MIN;
        Ok((passed, format!(
            "drift {drift:.2e} (<= {INVARIANT_DRIFT_MAX:.0e}), perturbed-xi control {drift_b:.2e} (> {NEGATIVE_CONTROL_DRIFT_MIN:.0e})"
        )))
    })())
}

fn plateau_average(p: &DrivenParams, beta: Complex64) -> Result<f64> {
    let ic = InitialCondition::excited(beta);
    let cfg = SeriesConfig::default();
    let times: Vec<f64> = (0..=4000).map(|k| 100.0 + k as f64 * 0.025).collect();
    let series = mean_photon_series_sweep(&times, p, &ic, &cfg)?;
    Ok(series.iter().sum::<f64>() / series.len() as f64)
}

/// Criterion 4: driven collapse plateau of the mean photon number.
pub fn criterion_4(_opts: &ValidationOptions) -> CriterionReport {
    report(4, "driven collapse plateau", (|| {
        let avg = plateau_average(&reference_driven(), reference_beta())?;
        let passed = (avg - DRIVEN_PLATEAU).abs() <= PLATEAU_TOL
            && (avg - DRIVEN_PLATEAU_CLOSED_FORM).abs() <= PLATEAU_TOL;
        Ok((passed, format!(
            "<n> averaged over [100, 200] = {avg:.4} (target {DRIVEN_PLATEAU} +/- {PLATEAU_TOL}, closed form {DRIVEN_PLATEAU_CLOSED_FORM:.4})"
        )))
    })())
}

/// Criterion 5: standard collapse plateau.
pub fn criterion_5(_opts: &ValidationOptions) -> CriterionReport {
    report(5, "standard collapse plateau", (|| {
        let avg = plateau_average(&reference_standard(), reference_beta())?;
        let passed = (avg - STANDARD_PLATEAU).abs() <= PLATEAU_TOL;
        Ok((passed, format!(
            "<n> averaged over [100, 200] = {avg:.4} (target {STANDARD_PLATEAU} +/- {PLATEAU_TOL})"
        )))
    })())
}

/// Criterion 6: long-time collapse and super revival of `<n(t)>`.
///
/// The dispersion measure is the windowed standard deviation (the amplitude
/// of the oscillations); the run streams the closed-form series to 6000.
pub fn criterion_6(_opts: &ValidationOptions) -> CriterionReport {
    report(6, "super revival", (|| {
        let started = std::time::Instant::now();
        let p = reference_driven();
        let ic = InitialCondition::excited(reference_beta());
        let cfg = SeriesConfig::default();
        let dt = 0.05;
        let t_max = 6000.0;
        let steps = (t_max / dt) as usize + 1;
        let times: Vec<f64> = (0..steps).map(|k| k as f64 * dt).collect();
        let series = mean_photon_series_sweep(&times, &p, &ic, &cfg)?;

        // rolling std over a 50-unit window via prefix sums
        let window = (50.0 / dt) as usize;
        let mut sum = vec![0.0f64; series.len() + 1];
        let mut sq = vec![0.0f64; series.len() + 1];
        for (k, &v) in series.iter().enumerate() {
            sum[k + 1] = sum[k] + v;
            sq[k + 1] = sq[k] + v * v;
        }
        let n_windows = series.len() - window + 1;
        let std_at = |k: usize| -> f64 {
            let m = (sum[k + window] - sum[k]) / window as f64;
            let v = (sq[k + window] - sq[k]) / window as f64 - m * m;
            v.max(0.0).sqrt()
        };
        let center = |k: usize| times[k] + 25.0;

        let mut early_max = 0.0f64;
        for k in 0..n_windows {
            if center(k) > 100.0 {
                break;
            }
            early_max = early_max.max(std_at(k));
        }
        let mut min_std = f64::MAX;
        let mut min_k = 0;
        for k in 0..n_windows {
            let s = std_at(k);
            if s < min_std {
                min_std = s;
                min_k = k;
            }
        }
        let mut recovery = 0.0f64;
        let mut recovery_t = 0.0;
        for k in min_k..n_windows {
            let s = std_at(k);
            if s > recovery {
                recovery = s;
                recovery_t = center(k);
            }
        }
        let collapse_frac = min_std / early_max;
        let recovery_frac = recovery / early_max;
        let elapsed = started.elapsed().as_secs_f64();
        let passed = collapse_frac <= SUPER_REVIVAL_COLLAPSE_FRACTION
            && recovery_frac >= SUPER_REVIVAL_RECOVERY_FRACTION
            && elapsed <= 900.0;
        Ok((passed, format!(
            "windowed std: early max {early_max:.3}, collapse to {:.1}% at t = {:.0} (<= {:.0}%), recovery to {:.1}% at t = {recovery_t:.0} (>= {:.0}%), {elapsed:.1} s",
            100.0 * collapse_frac,
            center(min_k),
            100.0 * SUPER_REVIVAL_COLLAPSE_FRACTION,
            100.0 * recovery_frac,
            100.0 * SUPER_REVIVAL_RECOVERY_FRACTION
        )))
    })())
}

fn entropy_scan(
    p: &DrivenParams,
    beta: Complex64,
    space: FockSpace,
) -> Result<ObservableSeries> {
    let init = InitialCondition::excited(beta).state(space)?;
    let frame = FrameExactEngine::new(p, space)?;
    let times: Vec<f64> = (0..=3250).map(|k| 5.0 + k as f64 * 0.004).collect();
    let mut values = Vec::with_capacity(times.len());
    let mut err = None;
    frame.for_each_state(&init, &times, |_, _, st| {
        if err.is_some() {
            return;
        }
        match atomic_entropy(st) {
            Ok(s) => values.push(s),
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    ObservableSeries::new("entropy", times, values)
}

/// Criterion 7: entropy minima of the driven and standard runs, plus the
/// Araki-Lieb equality of the subsystem entropies.
pub fn criterion_7(opts: &ValidationOptions) -> CriterionReport {
    report(7, "entropy minima", (|| {
        let p_drv = reference_driven();
        let p_std = reference_standard();
        let beta = reference_beta();
        let space_drv = opts.space_for(&p_drv, beta)?;
        let space_std = opts.space_for(&p_std, beta)?;

        let s_drv = entropy_scan(&p_drv, beta, space_drv)?;
        let s_std = entropy_scan(&p_std, beta, space_std)?;
        let bounds_ok = s_drv
            .values
            .iter()
            .chain(s_std.values.iter())
            .all(|&s| (-1e-12..=2.0f64.ln() + 1e-9).contains(&s));
        let (t_drv, s_min_drv) = entropy_minimum(&s_drv, (8.0, 14.0))?;
        let (t_std, s_min_std) = entropy_minimum(&s_std, (7.0, 13.0))?;

        // Araki-Lieb on 50 sampled times of the driven run
        let init = InitialCondition::excited(beta).state(space_drv)?;
        let frame = FrameExactEngine::new(&p_drv, space_drv)?;
        let sample: Vec<f64> = (0..50).map(|k| 0.3 + k as f64 * 0.35).collect();
        let mut max_gap = 0.0f64;
        let mut err = None;
        frame.for_each_state(&init, &sample, |_, _, st| {
            if err.is_some() {
                return;
            }
            match (|| -> Result<f64> {
                let sa = entropy(&reduced_atom(st)?)?;
                let sf = entropy(&reduced_field(st)?)?;
                Ok((sa - sf).abs())
            })() {
                Ok(gap) => max_gap = max_gap.max(gap),
                Err(e) => err = Some(e),
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }

        let drv_ok = (t_drv - ENTROPY_MIN_DRIVEN).abs() <= ENTROPY_MIN_TOL;
        let std_ok = (t_std - ENTROPY_MIN_STANDARD).abs() <= ENTROPY_MIN_TOL;
        let al_ok = max_gap <= ARAKI_LIEB_TOL;
        let passed = drv_ok && std_ok && al_ok && bounds_ok;
        Ok((passed, format!(
            "driven t* = {t_drv:.3} (target {ENTROPY_MIN_DRIVEN} +/- {ENTROPY_MIN_TOL}: {}), standard t* = {t_std:.3} (target {ENTROPY_MIN_STANDARD} +/- {ENTROPY_MIN_TOL}: {}), S(t*) = {s_min_drv:.3}/{s_min_std:.3}, |S_A - S_F| max {max_gap:.2e} (<= {ARAKI_LIEB_TOL:.0e}: {})",
            if drv_ok { "ok" } else { "MISS" },
            if std_ok { "ok" } else { "MISS" },
            if al_ok { "ok" } else { "MISS" }
        )))
    })())
}

/// Criterion 8: Mandel Q starts Poissonian and swings to both signs.
pub fn criterion_8(opts: &ValidationOptions) -> CriterionReport {
    report(8, "Mandel Q episodes", (|| {
        let p = reference_driven();
        let beta = reference_beta();
        let space = opts.space_for(&p, beta)?;
        let init = InitialCondition::excited(beta).state(space)?;
        let frame = FrameExactEngine::new(&p, space)?;
        let times = uniform_grid(50.0, 1001);
        let mut q0 = f64::NAN;
        let mut q_min = f64::MAX;
        let mut q_max = f64::MIN;
        let mut err = None;
        frame.for_each_state(&init, &times, |k, _, st| {
            if err.is_some() {
                return;
            }
            match mandel_q(st) {
                Ok(q) => {
                    if k == 0 {
                        q0 = q;
                    }
                    q_min = q_min.min(q);
                    q_max = q_max.max(q);
                }
                Err(e) => err = Some(e),
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        let passed = q0.abs() <= MANDEL_Q_INITIAL_TOL
            && q_min <= -MANDEL_Q_SWING
            && q_max >= MANDEL_Q_SWING
            && q_min >= -1.0 - 1e-12;
        Ok((passed, format!(
            "Q(0) = {q0:.2e} (<= {MANDEL_Q_INITIAL_TOL:.0e}), range [{q_min:.3}, {q_max:.3}] (swings past +/-{MANDEL_Q_SWING})"
        )))
    })())
}

/// Criterion 9: dispersive entangled-cat fidelity against the exact oracle.
pub fn criterion_9(opts: &ValidationOptions) -> CriterionReport {
    report(9, "dispersive cat fidelity", (|| {
        let p = reference_dispersive();
        let beta = Complex64::new(1.0, 0.0);
        let space = opts.space_for(&p, beta)?;
        let init = InitialCondition::superposition(beta, 0.0).state(space)?;
        let frame = FrameExactEngine::new(&p, space)?;
        let times = uniform_grid(10.0, 101);
        let mut min_fidelity = f64::MAX;
        let mut initial_infidelity = f64::NAN;
        for &t in &times {
            let exact = frame.state_at(&init, t)?;
            let cat = cat_state(t, &p, beta, 0.0, space)?;
            let f = exact.fidelity(&cat)?;
            min_fidelity = min_fidelity.min(f);
            if t == 0.0 {
                initial_infidelity = 1.0 - f;
            }
        }
        let passed =
            min_fidelity >= CAT_FIDELITY_FLOOR && initial_infidelity <= CAT_INITIAL_INFIDELITY;
        Ok((passed, format!(
            "min fidelity {min_fidelity:.4} over t in [0, 10] (>= {CAT_FIDELITY_FLOOR}), t = 0 infidelity {initial_infidelity:.2e} (<= {CAT_INITIAL_INFIDELITY:.0e}), Delta/g = {}",
            p.delta() / p.g()
        )))
    })())
}

/// Criterion 10: with the drive off and on resonance, every engine reproduces
/// the textbook vacuum Rabi oscillation `P(g,1) = sin^2(g t)`.
pub fn criterion_10(_opts: &ValidationOptions) -> CriterionReport {
    report(10, "standard-JCM reduction", (|| {
        let p = DrivenParams::standard(0.4, 0.4, 1.0)?;
        let space = FockSpace::new(8)?;
        let ic = InitialCondition::excited(Complex64::new(0.0, 0.0));
        let init = ic.state(space)?;
        let times = uniform_grid(std::f64::consts::PI, 41);
        let frame = FrameExactEngine::new(&p, space)?;
        let analytic = AnalyticEngine::new(&p, &ic, space)?;
        let cfg = IntegratorConfig {
            dt: 1e-3,
            method: Method::Rk4,
        };
        let rk = evolve_rk4(&init, &times, &p, space, &cfg)?;
        let mut worst = 0.0f64;
        for (k, &t) in times.iter().enumerate() {
            let expect = t.sin().powi(2);
            let pg1 = |st: &StateVector| st.amplitudes()[space.dim() + 1].norm_sqr();
            worst = worst.max((pg1(&frame.state_at(&init, t)?) - expect).abs());
            worst = worst.max((pg1(&analytic.state_at(t)?) - expect).abs());
            worst = worst.max((pg1(&rk.states()?[k]) - expect).abs());
        }
        let passed = worst <= RABI_REDUCTION_TOL;
        Ok((passed, format!(
            "max |P(g,1) - sin^2(gt)| = {worst:.2e} over all engines (<= {RABI_REDUCTION_TOL:.0e})"
        )))
    })())
}

/// Run the acceptance criteria in order; `quick` keeps the sub-minute subset.
pub fn run_acceptance(opts: &ValidationOptions) -> Vec<CriterionReport> {
    let all: Vec<fn(&ValidationOptions) -> CriterionReport> = vec![
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let quick_ids = [1usize, 3, 4, 5, 8, 9, 10];
    all.iter()
        .enumerate()
        .filter(|(k, _)| !opts.quick || quick_ids.contains(&(k + 1)))
        .map(|(_, f)| f(opts))
        .collect()
}
