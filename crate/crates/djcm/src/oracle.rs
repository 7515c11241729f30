//! Brute-force reference propagators, independent of the closed-form chain.
//!
//! The frame-exact engine uses the fact that the Hamiltonian in the frame
//! rotating at the drive frequency is time independent: one Hermitian
//! eigendecomposition serves every output time. The RK4 engine integrates
//! the raw time-dependent Hamiltonian directly and exists to validate the
//! frame transformation itself, not for production runs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{eigh, CMat, CVec, FockSpace, HermitianEigen, StateVector};
use crate::model::{
    apply_phases, excitation_phases, hamiltonian_rotating, invariant_expectation, DrivenParams,
};
use crate::observables::ObservableSeries;

/// Norm-drift budget for stored trajectory states.
pub const TRAJECTORY_NORM_TOL: f64 = 1e-9;
/// Step-halving convergence gate for the direct integrator.
pub const RK4_GATE_TOL: f64 = 1e-8;

/// Integration method tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FrameExact,
    Rk4,
}

/// Direct-integrator configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub method: Method,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            method: Method::Rk4,
        }
    }
}

/// Ordered time grid with optional per-time states and named scalar series.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Option<Vec<StateVector>>,
    pub observables: Vec<ObservableSeries>,
    /// Largest `|norm - 1|` seen along the trajectory; logged, never fixed.
    pub max_norm_drift: f64,
}

impl Trajectory {
    fn from_states(times: Vec<f64>, states: Vec<StateVector>) -> Self {
        let max_norm_drift = states
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        Self {
            times,
            states: Some(states),
            observables: Vec::new(),
            max_norm_drift,
        }
    }

    pub fn states(&self) -> Result<&[StateVector]> {
        self.states.as_deref().ok_or(Error::MissingStates)
    }
}

/// Frame-exact propagator: `|psi(t)> = T^dag(t) exp(-i H_T t) |psi(0)>`.
pub struct FrameExactEngine {
    params: DrivenParams,
    space: FockSpace,
    eig: HermitianEigen,
}

impl FrameExactEngine {
    pub fn new(p: &DrivenParams, space: FockSpace) -> Result<Self> {
        let ht = hamiltonian_rotating(p, space);
        Ok(Self {
            params: *p,
            space,
            eig: eigh(&ht)?,
        })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    /// Visit the state at each grid time; states are built once and handed
    /// to the callback without being stored.
    pub fn for_each_state<F>(&self, init: &StateVector, times: &[f64], mut visit: F) -> Result<()>
    where
        F: FnMut(usize, f64, &StateVector),
    {
        if init.space() != self.space.product_space() {
            return Err(Error::DimensionMismatch(
                "initial state not on the engine's product space".into(),
            ));
        }
        let coeffs = self.eig.coefficients(init.amplitudes());
        for (k, &t) in times.iter().enumerate() {
            let mut amps = self.eig.propagate_coefficients(t, &coeffs);
            let phases = excitation_phases(-self.params.omega_0() * t, self.space.dim());
            apply_phases(&phases, &mut amps);
            let state = StateVector::from_parts(init.space(), amps);
            visit(k, t, &state);
        }
        Ok(())
    }

    pub fn state_at(&self, init: &StateVector, t: f64) -> Result<StateVector> {
        let mut out = None;
        self.for_each_state(init, &[t], |_, _, s| out = Some(s.clone()))?;
        Ok(out.expect("one grid point"))
    }

    pub fn evolve(&self, init: &StateVector, times: &[f64]) -> Result<Trajectory> {
        if !times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidOperand(
                "time grid must be strictly increasing".into(),
            ));
        }
        let mut states = Vec::with_capacity(times.len());
        self.for_each_state(init, times, |_, _, s| states.push(s.clone()))?;
        let traj = Trajectory::from_states(times.to_vec(), states);
        if traj.max_norm_drift > TRAJECTORY_NORM_TOL {
            return Err(Error::Truncation(format!(
                "frame-exact norm drift {:.3e} above {TRAJECTORY_NORM_TOL:.0e}",
                traj.max_norm_drift
            )));
        }
        Ok(traj)
    }
}

/// Frame-exact trajectory with stored states.
pub fn evolve_frame_exact(
    init: &StateVector,
    times: &[f64],
    p: &DrivenParams,
    space: FockSpace,
) -> Result<Trajectory> {
    FrameExactEngine::new(p, space)?.evolve(init, times)
}

/// `H(t) v` split as `A v + e^{i w0 t} B v + e^{-i w0 t} B^dag v`, with the
/// static part `A` holding the free and Jaynes-Cummings terms.
struct DrivenAction {
    a_static: CMat,
    b: CMat,
    b_dag: CMat,
    omega_0: f64,
}

impl DrivenAction {
    fn new(p: &DrivenParams, space: FockSpace) -> Self {
        use crate::hilbert::{atom_identity, sigma_minus, sigma_plus, sigma_z, tensor};
        let a = space.annihilation();
        let ad = space.creation();
        let idf = space.identity();
        let n = space.number();
        let a_static = tensor(&sigma_z(), &idf).unwrap().into_matrix()
            * Complex64::new(p.omega_eg() / 2.0, 0.0)
            + tensor(&atom_identity(), &n).unwrap().into_matrix()
                * Complex64::new(p.omega_c(), 0.0)
            + (tensor(&sigma_plus(), &a).unwrap().into_matrix()
                + tensor(&sigma_minus(), &ad).unwrap().into_matrix())
                * Complex64::new(p.g(), 0.0);
        let b = tensor(&sigma_minus(), &idf).unwrap().into_matrix()
            * Complex64::new(p.zeta(), 0.0)
            + tensor(&atom_identity(), &a).unwrap().into_matrix() * Complex64::new(p.xi(), 0.0);
        let b_dag = b.adjoint();
        Self {
            a_static,
            b,
            b_dag,
            omega_0: p.omega_0(),
        }
    }

    /// `out = -i H(t) v`.
    fn rhs(&self, t: f64, v: &CVec, out: &mut CVec) {
        let drive = Complex64::from_polar(1.0, self.omega_0 * t);
        out.gemv(Complex64::new(0.0, -1.0), &self.a_static, v, Complex64::ZERO);
        out.gemv(drive * Complex64::new(0.0, -1.0), &self.b, v, Complex64::ONE);
        out.gemv(
            drive.conj() * Complex64::new(0.0, -1.0),
            &self.b_dag,
            v,
            Complex64::ONE,
        );
    }
}

/// Classic fixed-step RK4 from one grid time to the next, substepping so no
/// internal step exceeds `dt`.
fn rk4_between(action: &DrivenAction, t0: f64, t1: f64, dt: f64, v: &mut CVec) {
    let span = t1 - t0;
    if span == 0.0 {
        return;
    }
    let n_sub = (span / dt).ceil().max(1.0) as usize;
    let h = span / n_sub as f64;
    let dim = v.len();
    let mut k1 = CVec::zeros(dim);
    let mut k2 = CVec::zeros(dim);
    let mut k3 = CVec::zeros(dim);
    let mut k4 = CVec::zeros(dim);
    let mut tmp = CVec::zeros(dim);
    for s in 0..n_sub {
        let t = t0 + s as f64 * h;
        let hc = Complex64::new(h, 0.0);
        let half = Complex64::new(0.5 * h, 0.0);
        action.rhs(t, v, &mut k1);
        tmp.copy_from(v);
        tmp.axpy(half, &k1, Complex64::ONE);
        action.rhs(t + 0.5 * h, &tmp, &mut k2);
        tmp.copy_from(v);
        tmp.axpy(half, &k2, Complex64::ONE);
        action.rhs(t + 0.5 * h, &tmp, &mut k3);
        tmp.copy_from(v);
        tmp.axpy(hc, &k3, Complex64::ONE);
        action.rhs(t + h, &tmp, &mut k4);

        let w = Complex64::new(h / 6.0, 0.0);
        v.axpy(w, &k1, Complex64::ONE);
        v.axpy(w * 2.0, &k2, Complex64::ONE);
        v.axpy(w * 2.0, &k3, Complex64::ONE);
        v.axpy(w, &k4, Complex64::ONE);
    }
}

fn rk4_run(
    action: &DrivenAction,
    init: &StateVector,
    times: &[f64],
    dt: f64,
) -> (Vec<StateVector>, CVec) {
    let mut v = init.amplitudes().clone();
    let mut states = Vec::with_capacity(times.len());
    let mut t_prev = times[0];
    // the grid is assumed to start at the initial time
    states.push(StateVector::from_parts(init.space(), v.clone()));
    for &t in &times[1..] {
        rk4_between(action, t_prev, t, dt, &mut v);
        t_prev = t;
        states.push(StateVector::from_parts(init.space(), v.clone()));
    }
    (states, v)
}

/// Direct RK4 integration of the raw time-dependent Hamiltonian.
///
/// The step is accepted only if halving it moves the endpoint state by at
/// most `RK4_GATE_TOL`; the gate is retried once at the halved step before
/// giving up. Norm drift is logged on the trajectory, never renormalized.
pub fn evolve_rk4(
    init: &StateVector,
    times: &[f64],
    p: &DrivenParams,
    space: FockSpace,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if init.space() != space.product_space() {
        return Err(Error::DimensionMismatch(
            "initial state not on the requested product space".into(),
        ));
    }
    if times.is_empty() {
        return Err(Error::InvalidOperand("empty time grid".into()));
    }
    if !times.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidOperand(
            "time grid must be strictly increasing".into(),
        ));
    }
    if cfg.dt <= 0.0 {
        return Err(Error::InvalidOperand(format!(
            "integrator step must be positive, got {}",
            cfg.dt
        )));
    }
    let action = DrivenAction::new(p, space);
    let mut dt = cfg.dt;
    let (_, mut endpoint) = rk4_run(&action, init, times, dt);
    let mut last_gap = f64::NAN;
    for _attempt in 0..2 {
        let (fine_states, fine_endpoint) = rk4_run(&action, init, times, dt / 2.0);
        last_gap = (&fine_endpoint - &endpoint).norm();
        if last_gap <= RK4_GATE_TOL {
            return Ok(Trajectory::from_states(times.to_vec(), fine_states));
        }
        endpoint = fine_endpoint;
        dt /= 2.0;
    }
    Err(Error::Convergence(format!(
        "step-halving gate failed twice: endpoint moved {last_gap:.3e} > {RK4_GATE_TOL:.0e} at dt {dt}"
    )))
}

/// Evolve with the configured method.
pub fn evolve(
    init: &StateVector,
    times: &[f64],
    p: &DrivenParams,
    space: FockSpace,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    match cfg.method {
        Method::FrameExact => evolve_frame_exact(init, times, p, space),
        Method::Rk4 => evolve_rk4(init, times, p, space, cfg),
    }
}

/// Largest excursion of the invariant expectation along a stored trajectory.
pub fn invariant_drift(traj: &Trajectory, p: &DrivenParams) -> Result<f64> {
    let states = traj.states()?;
    let mut reference = None;
    let mut drift = 0.0f64;
    for (k, state) in states.iter().enumerate() {
        let value = invariant_expectation(state, traj.times[k], p)?;
        match reference {
            None => reference = Some(value),
            Some(i0) => drift = drift.max((value - i0).abs()),
        }
    }
    Ok(drift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::solve_state;
    use crate::hilbert::ZERO;
    use crate::model::{hamiltonian_jcm, InitialCondition};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn fig2() -> DrivenParams {
        DrivenParams::from_free(0.4, 0.9, 1.0, 0.7, 0.2).unwrap()
    }

    fn beta8() -> Complex64 {
        Complex64::new(8.0f64.sqrt(), 0.0)
    }

    #[test]
    fn frame_exact_identity_at_zero() {
        let p = fig2();
        let space = p.auto_fock_space(beta8());
        let init = InitialCondition::excited(beta8()).state(space).unwrap();
        let traj = evolve_frame_exact(&init, &[0.0], &p, space).unwrap();
        let st = &traj.states().unwrap()[0];
        let mut res = 0.0f64;
        for k in 0..st.dim() {
            res = res.max((st.amplitudes()[k] - init.amplitudes()[k]).norm());
        }
        assert!(res <= 1e-12, "residual {res}");
    }

    #[test]
    fn frame_exact_agrees_with_analytic_solution() {
        let p = fig2();
        let space = p.auto_fock_space(beta8());
        let ic = InitialCondition::excited(beta8());
        let init = ic.state(space).unwrap();
        let engine = FrameExactEngine::new(&p, space).unwrap();
        for &t in &[0.4, 5.0, 23.7] {
            let oracle = engine.state_at(&init, t).unwrap();
            let analytic = solve_state(t, &p, &ic, space).unwrap();
            let infidelity = 1.0 - oracle.fidelity(&analytic).unwrap();
            assert!(infidelity <= 1e-8, "t={t}: infidelity {infidelity}");
        }
    }

    #[test]
    fn invariant_constant_along_frame_exact_trajectory() {
        let p = fig2();
        let space = p.auto_fock_space(beta8());
        let init = InitialCondition::excited(beta8()).state(space).unwrap();
        let times: Vec<f64> = (0..=250).map(|k| k as f64 * 0.2).collect();
        let traj = evolve_frame_exact(&init, &times, &p, space).unwrap();
        let drift = invariant_drift(&traj, &p).unwrap();
        assert!(drift <= 1e-9, "drift {drift}");
    }

    #[test]
    fn standard_mode_excitation_number_conserved() {
        let p = DrivenParams::standard(0.4, 0.9, 1.0).unwrap();
        let space = p.auto_fock_space(beta8());
        let init = InitialCondition::excited(beta8()).state(space).unwrap();
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.5).collect();
        let traj = evolve_frame_exact(&init, &times, &p, space).unwrap();
        let drift = invariant_drift(&traj, &p).unwrap();
        assert!(drift <= 1e-10, "drift {drift}");
    }

    #[test]
    fn standard_mode_jcm_energy_conserved() {
        let p = DrivenParams::standard(0.4, 0.9, 1.0).unwrap();
        let space = p.auto_fock_space(beta8());
        let init = InitialCondition::excited(beta8()).state(space).unwrap();
        let hjc = hamiltonian_jcm(&p, space);
        let engine = FrameExactEngine::new(&p, space).unwrap();
        let mut values = Vec::new();
        let times: Vec<f64> = (0..=60).map(|k| k as f64 * 0.4).collect();
        engine
            .for_each_state(&init, &times, |_, _, s| {
                values.push(hjc.expectation(s).unwrap().re);
            })
            .unwrap();
        let spread = values.iter().fold(f64::MIN, |a, &b| a.max(b))
            - values.iter().fold(f64::MAX, |a, &b| a.min(b));
        assert!(spread <= 1e-9, "energy spread {spread}");
    }

    #[test]
    fn rk4_vacuum_rabi_oscillation() {
        let p = DrivenParams::standard(0.4, 0.4, 1.0).unwrap();
        let space = FockSpace::new(6).unwrap();
        let init = InitialCondition::excited(ZERO).state(space).unwrap();
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * std::f64::consts::PI / 80.0).collect();
        let cfg = IntegratorConfig::default();
        let traj = evolve_rk4(&init, &times, &p, space, &cfg).unwrap();
        for (k, st) in traj.states().unwrap().iter().enumerate() {
            let t = traj.times[k];
            let pg1 = st.amplitudes()[space.dim() + 1].norm_sqr();
            assert_abs_diff_eq!(pg1, t.sin().powi(2), epsilon = 1e-7);
        }
        assert!(traj.max_norm_drift <= 1e-8);
    }

    #[test]
    fn rk4_matches_frame_exact_on_short_window() {
        let p = fig2();
        let space = p.auto_fock_space(beta8());
        let init = InitialCondition::excited(beta8()).state(space).unwrap();
        let times = [0.0, 1.0, 2.0];
        let cfg = IntegratorConfig {
            dt: 2e-3,
            method: Method::Rk4,
        };
        let rk = evolve_rk4(&init, &times, &p, space, &cfg).unwrap();
        let fx = evolve_frame_exact(&init, &times, &p, space).unwrap();
        let end_rk = &rk.states().unwrap()[2];
        let end_fx = &fx.states().unwrap()[2];
        let infidelity = 1.0 - end_rk.fidelity(end_fx).unwrap();
        assert!(infidelity <= 1e-7, "infidelity {infidelity}");
    }

    #[test]
    fn method_tag_dispatches() {
        let p = fig2();
        let space = FockSpace::new(30).unwrap();
        let init = InitialCondition::excited(Complex64::new(0.9, 0.0))
            .state(space)
            .unwrap();
        let times = [0.0, 0.5, 1.0];
        let fx = evolve(
            &init,
            &times,
            &p,
            space,
            &IntegratorConfig {
                dt: 1e-3,
                method: Method::FrameExact,
            },
        )
        .unwrap();
        let rk = evolve(&init, &times, &p, space, &IntegratorConfig::default()).unwrap();
        let infidelity = 1.0
            - fx.states().unwrap()[2]
                .fidelity(&rk.states().unwrap()[2])
                .unwrap();
        assert!(infidelity <= 1e-7, "infidelity {infidelity}");
    }

    #[test]
    fn rk4_rejects_bad_grids() {
        let p = fig2();
        let space = FockSpace::new(8).unwrap();
        let init = InitialCondition::excited(ZERO).state(space).unwrap();
        let cfg = IntegratorConfig::default();
        assert!(evolve_rk4(&init, &[], &p, space, &cfg).is_err());
        assert!(evolve_rk4(&init, &[0.0, 0.0], &p, space, &cfg).is_err());
    }

    #[test]
    fn invariant_drift_needs_states() {
        let p = fig2();
        let traj = Trajectory {
            times: vec![0.0, 1.0],
            states: None,
            observables: Vec::new(),
            max_norm_drift: 0.0,
        };
        assert!(matches!(
            invariant_drift(&traj, &p),
            Err(Error::MissingStates)
        ));
    }

    #[test]
    fn perturbed_constraint_breaks_conservation() {
        let base = fig2();
        // xi perturbed by 10 percent at the same drive frequency
        let p = DrivenParams::unconstrained(
            base.omega_c(),
            base.omega_eg(),
            base.omega_0(),
            base.g(),
            base.zeta(),
            base.xi() * 1.1,
        )
        .unwrap();
        assert!(!p.constraint_holds());
        let space = base.auto_fock_space(beta8());
        let init = InitialCondition::excited(beta8()).state(space).unwrap();
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.5).collect();
        let traj = evolve_frame_exact(&init, &times, &p, space).unwrap();
        let drift = invariant_drift(&traj, &p).unwrap();
        assert!(drift > 1e-3, "negative control drift only {drift}");
    }

    #[test]
    fn truncation_stability_under_dim_doubling() {
        let p = fig2();
        let space = p.auto_fock_space(beta8());
        let doubled = FockSpace::new(2 * space.dim()).unwrap();
        let ic = InitialCondition::excited(beta8());
        let times: Vec<f64> = (0..=50).map(|k| k as f64).collect();
        let t1 = evolve_frame_exact(&ic.state(space).unwrap(), &times, &p, space).unwrap();
        let t2 = evolve_frame_exact(&ic.state(doubled).unwrap(), &times, &p, doubled).unwrap();
        let mut worst = 0.0f64;
        for k in 0..times.len() {
            let s1 = &t1.states().unwrap()[k];
            let s2 = &t2.states().unwrap()[k];
            let w1 = crate::observables::inversion(s1).unwrap();
            let w2 = crate::observables::inversion(s2).unwrap();
            let n1 = crate::observables::mean_photon(s1).unwrap();
            let n2 = crate::observables::mean_photon(s2).unwrap();
            worst = worst.max((w1 - w2).abs()).max((n1 - n2).abs());
        }
        assert!(worst <= 1e-8, "observable shift {worst}");
    }
}
