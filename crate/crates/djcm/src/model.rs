//! Physical parameters and the Hamiltonians of the transformation chain.
//!
//! The driven Hamiltonian
//!
//! ```text
//! H(t) = (w_eg/2) sz + w_c n + g (s+ a + s- a^dag)
//!        + zeta (s- e^{i w0 t} + s+ e^{-i w0 t})
//!        + xi (a e^{i w0 t} + a^dag e^{-i w0 t})
//! ```
//!
//! admits an invariant `I = sz/2 + n + alpha (a e^{i w0 t} + a^dag e^{-i w0 t})`
//! exactly when `alpha = zeta/g` and `xi = alpha (w_c - w0)`. Under that
//! constraint the chain `T` (rotation at `w0`), `D(alpha)` (displacement) and
//! `S` (rotation at `Delta_c`) maps `H(t)` onto the bare Jaynes-Cummings
//! interaction `H_I = (Delta/2) sz + g (s+ a + s- a^dag)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    atom_identity, coherent_state, sigma_minus, sigma_plus, sigma_z, tensor, CMat, CVec,
    FockSpace, Operator, StateVector, ONE, ZERO,
};

/// Relative tolerance on the invariant-existence constraint `xi = alpha Delta_c`.
pub const CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Classical field drives both atom and cavity mode; the invariant exists.
    Driven,
    /// No classical drive: the conventional Jaynes-Cummings model.
    Standard,
}

/// The six physical frequencies/couplings with derived detunings.
///
/// In driven mode the drive frequency is never free: `w0 = w_c - g xi / zeta`,
/// which enforces the invariant-existence constraint by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivenParams {
    omega_c: f64,
    omega_eg: f64,
    omega_0: f64,
    g: f64,
    zeta: f64,
    xi: f64,
    mode: Mode,
}

impl DrivenParams {
    /// Driven-mode constructor from the five free parameters; the drive
    /// frequency is derived as `w0 = w_c - g xi / zeta`.
    pub fn from_free(omega_c: f64, omega_eg: f64, g: f64, zeta: f64, xi: f64) -> Result<Self> {
        if g <= 0.0 {
            return Err(Error::InvalidCoupling(format!("g must be > 0, got {g}")));
        }
        if zeta <= 0.0 {
            return Err(Error::InvalidCoupling(format!(
                "driven mode needs zeta > 0, got {zeta}"
            )));
        }
        if xi <= 0.0 {
            return Err(Error::InvalidCoupling(format!(
                "driven mode needs xi > 0, got {xi}"
            )));
        }
        Ok(Self {
            omega_c,
            omega_eg,
            omega_0: omega_c - g * xi / zeta,
            g,
            zeta,
            xi,
            mode: Mode::Driven,
        })
    }

    /// Standard (undriven) mode with the conventional choice `w0 = w_c`.
    pub fn standard(omega_c: f64, omega_eg: f64, g: f64) -> Result<Self> {
        Self::standard_with_drive_frequency(omega_c, omega_eg, g, omega_c)
    }

    /// Standard mode with an explicit reference frequency for the rotating
    /// frame. With `zeta = xi = 0` the frame choice is free.
    pub fn standard_with_drive_frequency(
        omega_c: f64,
        omega_eg: f64,
        g: f64,
        omega_0: f64,
    ) -> Result<Self> {
        if g <= 0.0 {
            return Err(Error::InvalidCoupling(format!("g must be > 0, got {g}")));
        }
        Ok(Self {
            omega_c,
            omega_eg,
            omega_0,
            g,
            zeta: 0.0,
            xi: 0.0,
            mode: Mode::Standard,
        })
    }

    /// Diagnostic constructor that takes all six parameters without the
    /// invariant-existence constraint. Used for negative controls that
    /// deliberately break the constraint; everything except the invariant
    /// conservation still works.
    pub fn unconstrained(
        omega_c: f64,
        omega_eg: f64,
        omega_0: f64,
        g: f64,
        zeta: f64,
        xi: f64,
    ) -> Result<Self> {
        if g <= 0.0 {
            return Err(Error::InvalidCoupling(format!("g must be > 0, got {g}")));
        }
        if zeta <= 0.0 {
            // With the atom undriven there is no invariant of the assumed
            // form and alpha = zeta/g would be meaningless.
            return Err(Error::ModeError(
                "unconstrained params need zeta > 0; use standard() when undriven".into(),
            ));
        }
        Ok(Self {
            omega_c,
            omega_eg,
            omega_0,
            g,
            zeta,
            xi,
            mode: Mode::Driven,
        })
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn omega_eg(&self) -> f64 {
        self.omega_eg
    }

    pub fn omega_0(&self) -> f64 {
        self.omega_0
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Displacement amplitude `alpha = zeta / g` (zero in standard mode).
    pub fn alpha(&self) -> f64 {
        match self.mode {
            Mode::Driven => self.zeta / self.g,
            Mode::Standard => 0.0,
        }
    }

    /// Cavity-drive detuning `Delta_c = w_c - w0`.
    pub fn delta_c(&self) -> f64 {
        self.omega_c - self.omega_0
    }

    /// Atom-drive detuning `Delta_eg = w_eg - w0`.
    pub fn delta_eg(&self) -> f64 {
        self.omega_eg - self.omega_0
    }

    /// Atom-cavity detuning `Delta = w_eg - w_c`.
    pub fn delta(&self) -> f64 {
        self.omega_eg - self.omega_c
    }

    /// Residual of the invariant-existence constraint `xi - alpha Delta_c`.
    pub fn constraint_residual(&self) -> f64 {
        self.xi - self.alpha() * self.delta_c()
    }

    /// Whether the constraint holds to `CONSTRAINT_TOL` (always true for
    /// states built by the checked constructors).
    pub fn constraint_holds(&self) -> bool {
        self.constraint_residual().abs() <= CONSTRAINT_TOL * self.xi.abs().max(1.0)
    }

    /// The constant `-zeta xi / g` dropped from the displaced Hamiltonian;
    /// reported so absolute energies can be reconstructed.
    pub fn dropped_energy_offset(&self) -> f64 {
        match self.mode {
            Mode::Driven => -self.zeta * self.xi / self.g,
            Mode::Standard => 0.0,
        }
    }

    /// Fock truncation for a run starting from the coherent amplitude
    /// `beta`: the series center shifts to `gamma = beta + alpha`.
    pub fn auto_fock_space(&self, beta: Complex64) -> FockSpace {
        let gamma = beta + Complex64::new(self.alpha(), 0.0);
        FockSpace::with_headroom(gamma.norm())
    }
}

/// Atomic part of the initial condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomState {
    Excited,
    Ground,
    /// `(|e> + e^{i phi} |g>) / sqrt(2)`.
    Superposition { phi: f64 },
}

/// Initial condition `|beta> (x) |atom>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    pub beta: Complex64,
    pub atom: AtomState,
}

impl InitialCondition {
    pub fn excited(beta: Complex64) -> Self {
        Self {
            beta,
            atom: AtomState::Excited,
        }
    }

    pub fn ground(beta: Complex64) -> Self {
        Self {
            beta,
            atom: AtomState::Ground,
        }
    }

    pub fn superposition(beta: Complex64, phi: f64) -> Self {
        Self {
            beta,
            atom: AtomState::Superposition { phi },
        }
    }

    /// Build the product-space state vector.
    pub fn state(&self, space: FockSpace) -> Result<StateVector> {
        let field = coherent_state(self.beta, space)?;
        let atom = match self.atom {
            AtomState::Excited => CVec::from_vec(vec![ONE, ZERO]),
            AtomState::Ground => CVec::from_vec(vec![ZERO, ONE]),
            AtomState::Superposition { phi } => {
                let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                CVec::from_vec(vec![w, w * Complex64::from_polar(1.0, phi)])
            }
        };
        StateVector::product(&atom, &field)
    }
}

fn jc_coupling(space: FockSpace) -> CMat {
    let a = space.annihilation();
    let ad = space.creation();
    let up = tensor(&sigma_plus(), &a).expect("atom x field");
    let down = tensor(&sigma_minus(), &ad).expect("atom x field");
    up.matrix() + down.matrix()
}

fn embed_number(space: FockSpace) -> CMat {
    tensor(&atom_identity(), &space.number())
        .expect("atom x field")
        .into_matrix()
}

fn embed_sigma_z(space: FockSpace) -> CMat {
    tensor(&sigma_z(), &space.identity())
        .expect("atom x field")
        .into_matrix()
}

/// The full time-dependent Hamiltonian `H(t)` on the product space.
pub fn hamiltonian_full(t: f64, p: &DrivenParams, space: FockSpace) -> Operator {
    let a = space.annihilation().into_matrix();
    let id = CMat::identity(space.dim(), space.dim());
    let drive = Complex64::from_polar(1.0, p.omega_0() * t);

    let mut h = embed_sigma_z(space) * Complex64::new(p.omega_eg() / 2.0, 0.0)
        + embed_number(space) * Complex64::new(p.omega_c(), 0.0)
        + jc_coupling(space) * Complex64::new(p.g(), 0.0);
    if p.zeta() != 0.0 {
        let sm = sigma_minus().into_matrix().kronecker(&id);
        let atom_term = &sm * (drive * p.zeta());
        h += &atom_term + atom_term.adjoint();
    }
    if p.xi() != 0.0 {
        let af = atom_identity().into_matrix().kronecker(&a);
        let field_term = &af * (drive * p.xi());
        h += &field_term + field_term.adjoint();
    }
    Operator::from_parts(space.product_space(), h, true, false)
}

/// Time-independent Hamiltonian in the frame rotating at `w0`:
/// `H_T = Delta_c n + (Delta_eg/2) sz + g (s+ a + s- a^dag)
///        + zeta (s- + s+) + xi (a + a^dag)`.
pub fn hamiltonian_rotating(p: &DrivenParams, space: FockSpace) -> Operator {
    let a = space.annihilation().into_matrix();
    let id = CMat::identity(space.dim(), space.dim());
    let mut h = embed_number(space) * Complex64::new(p.delta_c(), 0.0)
        + embed_sigma_z(space) * Complex64::new(p.delta_eg() / 2.0, 0.0)
        + jc_coupling(space) * Complex64::new(p.g(), 0.0);
    if p.zeta() != 0.0 {
        let sx = (sigma_plus().into_matrix() + sigma_minus().into_matrix()).kronecker(&id);
        h += sx * Complex64::new(p.zeta(), 0.0);
    }
    if p.xi() != 0.0 {
        let x = atom_identity().into_matrix().kronecker(&(&a + a.adjoint()));
        h += x * Complex64::new(p.xi(), 0.0);
    }
    Operator::from_parts(space.product_space(), h, true, false)
}

/// Jaynes-Cummings Hamiltonian after displacing the rotating frame:
/// `H_JCM = Delta_c n + (Delta_eg/2) sz + g (s+ a + s- a^dag)`.
pub fn hamiltonian_jcm(p: &DrivenParams, space: FockSpace) -> Operator {
    let h = embed_number(space) * Complex64::new(p.delta_c(), 0.0)
        + embed_sigma_z(space) * Complex64::new(p.delta_eg() / 2.0, 0.0)
        + jc_coupling(space) * Complex64::new(p.g(), 0.0);
    Operator::from_parts(space.product_space(), h, true, false)
}

/// Interaction Hamiltonian `H_I = (Delta/2) sz + g (s+ a + s- a^dag)`.
pub fn hamiltonian_interaction(p: &DrivenParams, space: FockSpace) -> Operator {
    let h = embed_sigma_z(space) * Complex64::new(p.delta() / 2.0, 0.0)
        + jc_coupling(space) * Complex64::new(p.g(), 0.0);
    Operator::from_parts(space.product_space(), h, true, false)
}

/// The invariant `I(t) = sz/2 + n + alpha (a e^{i w0 t} + a^dag e^{-i w0 t})`.
pub fn invariant_operator(t: f64, p: &DrivenParams, space: FockSpace) -> Operator {
    let mut h = embed_sigma_z(space) * Complex64::new(0.5, 0.0) + embed_number(space);
    let alpha = p.alpha();
    if alpha != 0.0 {
        let a = space.annihilation().into_matrix();
        let af = atom_identity().into_matrix().kronecker(&a);
        let term = af * (Complex64::from_polar(1.0, p.omega_0() * t) * alpha);
        h += &term + term.adjoint();
    }
    Operator::from_parts(space.product_space(), h, true, false)
}

/// Diagonal phases `exp(i theta (n + sz/2))` in the product basis: the
/// excited sector carries `n + 1/2`, the ground sector `n - 1/2`.
pub(crate) fn excitation_phases(theta: f64, field_dim: usize) -> CVec {
    let mut phases = CVec::zeros(2 * field_dim);
    for n in 0..field_dim {
        phases[n] = Complex64::from_polar(1.0, theta * (n as f64 + 0.5));
        phases[field_dim + n] = Complex64::from_polar(1.0, theta * (n as f64 - 0.5));
    }
    phases
}

pub(crate) fn apply_phases(phases: &CVec, v: &mut CVec) {
    for (x, p) in v.iter_mut().zip(phases.iter()) {
        *x *= p;
    }
}

fn diagonal_frame(theta: f64, space: FockSpace) -> Operator {
    let phases = excitation_phases(theta, space.dim());
    let mut m = CMat::zeros(2 * space.dim(), 2 * space.dim());
    for (k, p) in phases.iter().enumerate() {
        m[(k, k)] = *p;
    }
    Operator::from_parts(space.product_space(), m, false, true)
}

/// Frame rotation `T(t) = exp[i w0 t (n + sz/2)]`.
pub fn frame_t(t: f64, p: &DrivenParams, space: FockSpace) -> Operator {
    diagonal_frame(p.omega_0() * t, space)
}

/// Frame rotation `S(t) = exp[i Delta_c t (n + sz/2)]`.
pub fn frame_s(t: f64, p: &DrivenParams, space: FockSpace) -> Operator {
    diagonal_frame(p.delta_c() * t, space)
}

/// `<I(t)>` on a product-space state, computed without building the matrix.
pub fn invariant_expectation(state: &StateVector, t: f64, p: &DrivenParams) -> Result<f64> {
    let pe = state.excited_sector()?;
    let pg = state.ground_sector()?;
    let dim = pe.len();
    let mut sz = 0.0;
    let mut nbar = 0.0;
    let mut a_exp = ZERO;
    for n in 0..dim {
        let we = pe[n].norm_sqr();
        let wg = pg[n].norm_sqr();
        sz += we - wg;
        nbar += n as f64 * (we + wg);
        if n + 1 < dim {
            let s = ((n + 1) as f64).sqrt();
            a_exp += (pe[n].conj() * pe[n + 1] + pg[n].conj() * pg[n + 1]) * s;
        }
    }
    let phased = Complex64::from_polar(1.0, p.omega_0() * t) * a_exp;
    Ok(sz / 2.0 + nbar + 2.0 * p.alpha() * phased.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{commutator, eigh, max_abs, I};
    use approx::assert_abs_diff_eq;

    fn fig2() -> DrivenParams {
        DrivenParams::from_free(0.4, 0.9, 1.0, 0.7, 0.2).unwrap()
    }

    #[test]
    fn derived_quantities_match_the_reference_set() {
        let p = fig2();
        assert_abs_diff_eq!(p.omega_0(), 0.114286, epsilon = 1e-6);
        assert_abs_diff_eq!(p.delta_c(), 2.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.delta(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.alpha(), 0.7, epsilon = 1e-15);
        assert_eq!(p.constraint_residual(), 0.0);
        assert!(p.constraint_holds());
        assert_abs_diff_eq!(p.dropped_energy_offset(), -0.14, epsilon = 1e-15);
    }

    #[test]
    fn standard_mode_reduction() {
        let p = DrivenParams::standard(0.4, 0.9, 1.0).unwrap();
        assert_eq!(p.delta_c(), 0.0);
        assert_abs_diff_eq!(p.delta(), 0.5, epsilon = 1e-15);
        assert_eq!(p.alpha(), 0.0);
        assert_eq!(p.mode(), Mode::Standard);
    }

    #[test]
    fn invalid_couplings_rejected() {
        assert!(matches!(
            DrivenParams::from_free(0.4, 0.9, 0.0, 0.7, 0.2),
            Err(Error::InvalidCoupling(_))
        ));
        assert!(matches!(
            DrivenParams::from_free(0.4, 0.9, 1.0, 0.0, 0.2),
            Err(Error::InvalidCoupling(_))
        ));
        assert!(matches!(
            DrivenParams::unconstrained(0.4, 0.9, 0.1, 1.0, 0.0, 0.2),
            Err(Error::ModeError(_))
        ));
    }

    #[test]
    fn full_hamiltonian_is_hermitian_with_drive_element() {
        let p = fig2();
        let space = FockSpace::new(12).unwrap();
        let h = hamiltonian_full(0.0, &p, space);
        let res = max_abs(&(h.matrix() - h.matrix().adjoint()));
        assert!(res <= 1e-14);
        // <e,0| H(0) |g,0> = zeta
        let el = h.matrix()[(0, space.dim())];
        assert_abs_diff_eq!(el.re, p.zeta(), epsilon = 1e-15);
        assert_abs_diff_eq!(el.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn undriven_full_hamiltonian_is_static() {
        let p = DrivenParams::standard(0.4, 0.9, 1.0).unwrap();
        let space = FockSpace::new(8).unwrap();
        let h0 = hamiltonian_full(0.0, &p, space);
        let h1 = hamiltonian_full(1.7, &p, space);
        assert_eq!(h0.matrix(), h1.matrix());
    }

    #[test]
    fn rotating_hamiltonian_matches_frame_conjugation() {
        let p = fig2();
        let space = FockSpace::new(14).unwrap();
        let ht = hamiltonian_rotating(&p, space);
        // step balances truncation against roundoff for the 1e-10 target
        let step = 5e-6;
        for &t in &[0.3, 1.7] {
            let t_op = frame_t(t, &p, space);
            let h = hamiltonian_full(t, &p, space);
            let conj = t_op.matrix() * h.matrix() * t_op.matrix().adjoint();
            // -i T dT^dag/dt by central differences
            let tp = frame_t(t + step, &p, space);
            let tm = frame_t(t - step, &p, space);
            let dt_dag = (tp.matrix().adjoint() - tm.matrix().adjoint()) / Complex64::new(2.0 * step, 0.0);
            let correction = t_op.matrix() * dt_dag * (-I);
            let res = max_abs(&(conj + correction - ht.matrix()));
            assert!(res <= 1e-10, "t={t}: residual {res}");
        }
    }

    #[test]
    fn rotating_hamiltonian_standard_mode() {
        let p = DrivenParams::standard(0.4, 0.9, 1.0).unwrap();
        let space = FockSpace::new(8).unwrap();
        let ht = hamiltonian_rotating(&p, space);
        let hi = hamiltonian_interaction(&p, space);
        assert_eq!(ht.matrix(), hi.matrix());
        let res = max_abs(&(ht.matrix() - ht.matrix().adjoint()));
        assert!(res <= 1e-14);
    }

    #[test]
    fn displaced_rotating_hamiltonian_is_jcm_plus_constant() {
        let p = fig2();
        let space = FockSpace::with_headroom(0.7 + 3.0);
        let d = crate::hilbert::displacement(p.alpha(), space).unwrap();
        let ht = hamiltonian_rotating(&p, space);
        let hjc = hamiltonian_jcm(&p, space);
        let id2 = atom_identity().into_matrix().kronecker(&CMat::identity(space.dim(), space.dim()));
        let d2 = atom_identity().into_matrix().kronecker(d.matrix());
        let lhs = &d2 * ht.matrix() * d2.adjoint();
        let rhs = hjc.matrix() + id2 * Complex64::new(p.dropped_energy_offset(), 0.0);
        // compare away from the truncation edge
        let dim = space.dim();
        let keep = dim - 25;
        let mut res = 0.0f64;
        for sector_i in 0..2 {
            for sector_j in 0..2 {
                for i in 0..keep {
                    for j in 0..keep {
                        let (r, c) = (sector_i * dim + i, sector_j * dim + j);
                        res = res.max((lhs[(r, c)] - rhs[(r, c)]).norm());
                    }
                }
            }
        }
        assert!(res <= 1e-9, "residual {res}");
    }

    #[test]
    fn jcm_commutes_with_excitation_number() {
        let p = fig2();
        let space = FockSpace::new(20).unwrap();
        let hjc = hamiltonian_jcm(&p, space);
        let i_d = invariant_operator(0.0, &DrivenParams::standard(0.4, 0.9, 1.0).unwrap(), space);
        let res = max_abs(&commutator(hjc.matrix(), i_d.matrix()));
        assert!(res <= 1e-12, "residual {res}");
    }

    #[test]
    fn interaction_sigma_z_coefficient() {
        let p = fig2();
        let space = FockSpace::new(6).unwrap();
        let hi = hamiltonian_interaction(&p, space);
        // <e,0| H_I |e,0> = Delta/2 = 0.25
        assert_abs_diff_eq!(hi.matrix()[(0, 0)].re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(hi.matrix()[(space.dim(), space.dim())].re, -0.25, epsilon = 1e-15);
    }

    #[test]
    fn invariant_satisfies_its_defining_equation() {
        let p = fig2();
        let space = FockSpace::new(24).unwrap();
        let dim = space.dim();
        let step = 1e-6;
        for &t in &[0.0, 0.5, 3.1] {
            let h = hamiltonian_full(t, &p, space);
            let ip = invariant_operator(t + step, &p, space);
            let im = invariant_operator(t - step, &p, space);
            let didt = (ip.matrix() - im.matrix()) / Complex64::new(2.0 * step, 0.0);
            let i_op = invariant_operator(t, &p, space);
            let total = didt - commutator(i_op.matrix(), h.matrix()) * I;
            // the identity holds on the bulk; [a, a^dag] breaks in the last
            // retained Fock level
            let mut res = 0.0f64;
            for si in 0..2 {
                for sj in 0..2 {
                    for i in 0..dim - 1 {
                        for j in 0..dim - 1 {
                            res = res.max(total[(si * dim + i, sj * dim + j)].norm());
                        }
                    }
                }
            }
            assert!(res <= 1e-9, "t={t}: residual {res}");
        }
    }

    #[test]
    fn rotated_invariant_loses_time_dependence() {
        let p = fig2();
        let space = FockSpace::new(20).unwrap();
        let t = 2.3;
        let t_op = frame_t(t, &p, space);
        let i_op = invariant_operator(t, &p, space);
        let rotated = t_op.matrix() * i_op.matrix() * t_op.matrix().adjoint();
        let expect = invariant_operator(0.0, &p, space); // alpha (a + a^dag) at t = 0
        let res = max_abs(&(rotated - expect.matrix()));
        assert!(res <= 1e-10, "residual {res}");
    }

    #[test]
    fn displaced_invariant_is_diagonal_plus_constant() {
        let p = fig2();
        let space = FockSpace::with_headroom(0.7 + 3.0);
        let dim = space.dim();
        let d = crate::hilbert::displacement(p.alpha(), space).unwrap();
        let d2 = atom_identity().into_matrix().kronecker(d.matrix());
        let rotated = invariant_operator(0.0, &p, space);
        let displaced = &d2 * rotated.matrix() * d2.adjoint();
        // off-diagonal entries vanish away from the truncation edge
        let keep = dim - 25;
        let mut res = 0.0f64;
        for si in 0..2 {
            for sj in 0..2 {
                for i in 0..keep {
                    for j in 0..keep {
                        let (r, c) = (si * dim + i, sj * dim + j);
                        if r != c {
                            res = res.max(displaced[(r, c)].norm());
                        }
                    }
                }
            }
        }
        assert!(res <= 1e-9, "off-diagonal residual {res}");
    }

    #[test]
    fn frames_at_zero_are_identity() {
        let p = fig2();
        let space = FockSpace::new(9).unwrap();
        let t0 = frame_t(0.0, &p, space);
        let s0 = frame_s(0.0, &p, space);
        let id = CMat::identity(2 * space.dim(), 2 * space.dim());
        assert_eq!(t0.matrix(), &id);
        assert_eq!(s0.matrix(), &id);
    }

    #[test]
    fn frames_are_unitary_abelian_phases() {
        let p = fig2();
        let space = FockSpace::new(11).unwrap();
        let t = frame_t(7.3, &p, space);
        let dim = 2 * space.dim();
        let res = max_abs(&(t.matrix().adjoint() * t.matrix() - CMat::identity(dim, dim)));
        assert!(res <= 1e-12);
        let t1 = frame_t(1.1, &p, space);
        let t2 = frame_t(2.6, &p, space);
        let t12 = frame_t(3.7, &p, space);
        let res2 = max_abs(&(t1.matrix() * t2.matrix() - t12.matrix()));
        assert!(res2 <= 1e-12);
    }

    #[test]
    fn eigendecomposition_of_rotating_hamiltonian_converges() {
        let p = fig2();
        let space = p.auto_fock_space(Complex64::new(8.0f64.sqrt(), 0.0));
        assert_eq!(space.dim(), 61);
        let ht = hamiltonian_rotating(&p, space);
        let eig = eigh(&ht).unwrap();
        // eigenpairs must reconstruct the matrix
        let rebuilt = &eig.vectors
            * CMat::from_diagonal(&eig.values.map(|x| Complex64::new(x, 0.0)))
            * eig.vectors.adjoint();
        let res = max_abs(&(rebuilt - ht.matrix()));
        assert!(res <= 1e-10, "reconstruction residual {res}");
    }
}
