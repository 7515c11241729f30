//! Large-detuning (`|Delta| >> g`) effective dynamics.
//!
//! A small rotation `R = exp[mu (s+ a - s- a^dag)]` with `mu = g/Delta`
//! removes the Jaynes-Cummings coupling at first order. Retaining the
//! quadratic term of the rotation as well gives the diagonal effective
//! Hamiltonian with the second-order dispersive shift `chi = g^2/Delta`
//!
//! ```text
//! H_eff = (Delta_c + chi sz) n + (Delta_eg + chi) sz/2 + chi/2,
//! ```
//!
//! the form validated against the exact propagators (conjugating `H_JCM`
//! with the exact `R` reproduces it to `O(mu^3 ||H||)`, and the cat-state
//! fidelity floor in the acceptance suite holds only with this shift; the
//! first-order truncation alone would double `chi`).
//!
//! Starting from `|beta> (x) (|e> + e^{i phi} |g>)/sqrt(2)`, the `R ~ 1`
//! approximation turns the solution into an entangled pair of coherent
//! branches whose phase-space angles separate at the rate `chi`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    coherent_state, eigh_matrix, CMat, CVec, FockSpace, Operator, StateVector,
};
use crate::model::{apply_phases, excitation_phases, DrivenParams};

/// Largest admissible `|mu| = |g/Delta|`.
pub const MU_MAX: f64 = 0.1;

/// Small-rotation parameter with the regime gate `|mu| <= 0.1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersiveParams {
    pub mu: f64,
}

impl DispersiveParams {
    pub fn new(p: &DrivenParams) -> Result<Self> {
        let delta = p.delta();
        if delta == 0.0 {
            return Err(Error::Regime("Delta = 0 has no dispersive limit".into()));
        }
        let mu = p.g() / delta;
        if mu.abs() > MU_MAX {
            return Err(Error::Regime(format!(
                "|Delta| = {} < 10 g = {}",
                delta.abs(),
                10.0 * p.g()
            )));
        }
        Ok(Self { mu })
    }
}

/// Number-dependent dispersive shift `chi = g^2 / Delta`.
pub fn dispersive_shift(p: &DrivenParams) -> f64 {
    p.g() * p.g() / p.delta()
}

/// Diagonal effective Hamiltonian
/// `(Delta_c + chi sz) n + (Delta_eg + chi) sz/2 + chi/2`.
pub fn effective_hamiltonian(p: &DrivenParams, space: FockSpace) -> Result<Operator> {
    DispersiveParams::new(p)?;
    let chi = dispersive_shift(p);
    let dim = space.dim();
    let mut m = CMat::zeros(2 * dim, 2 * dim);
    for n in 0..dim {
        let nf = n as f64;
        m[(n, n)] = Complex64::new(
            (p.delta_c() + chi) * nf + (p.delta_eg() + chi) / 2.0 + chi / 2.0,
            0.0,
        );
        m[(dim + n, dim + n)] = Complex64::new(
            (p.delta_c() - chi) * nf - (p.delta_eg() + chi) / 2.0 + chi / 2.0,
            0.0,
        );
    }
    Ok(Operator::from_parts(space.product_space(), m, true, false))
}

/// The small rotation `R = exp[mu (s+ a - s- a^dag)]`, unitary away from the
/// truncation edge.
pub fn small_rotation(p: &DrivenParams, space: FockSpace) -> Result<Operator> {
    let mu = DispersiveParams::new(p)?.mu;
    let dim = space.dim();
    // Hermitian counterpart M = i mu (s+ a - s- a^dag); R = exp(-i M)
    let mut m = CMat::zeros(2 * dim, 2 * dim);
    for n in 1..dim {
        // (s+ a) entry: row |e, n-1>, column |g, n>, weight sqrt(n)
        let w = Complex64::new(0.0, mu * (n as f64).sqrt());
        m[(n - 1, dim + n)] = w;
        m[(dim + n, n - 1)] = w.conj();
    }
    let eig = eigh_matrix(&m)?;
    Ok(Operator::from_parts(
        space.product_space(),
        eig.unitary_at(1.0),
        false,
        true,
    ))
}

/// The ingredients of the entangled-cat solution at time `t`.
///
/// Both branch amplitudes keep the magnitude `|beta + alpha|`; the global
/// and per-branch phases carry the accumulated dispersive shift.
#[derive(Debug, Clone, Copy)]
pub struct CatStateSpec {
    pub beta: Complex64,
    pub phi: f64,
    /// Global phase `Theta = chi t / 2 + alpha Im(beta)`.
    pub theta: f64,
    /// Excited-branch phase `Lambda = exp[-i t (w_eg/2 + chi/2)]`.
    pub lambda_phase: Complex64,
    /// `kappa_+ = (beta + alpha) exp[-i t (Delta_c + chi)]`.
    pub kappa_plus: Complex64,
    /// `kappa_- = (beta + alpha) exp[-i t (Delta_c - chi)]`.
    pub kappa_minus: Complex64,
}

impl CatStateSpec {
    pub fn at(t: f64, p: &DrivenParams, beta: Complex64, phi: f64) -> Result<Self> {
        DispersiveParams::new(p)?;
        let chi = dispersive_shift(p);
        let alpha = p.alpha();
        let gamma = beta + Complex64::new(alpha, 0.0);
        Ok(Self {
            beta,
            phi,
            theta: chi * t / 2.0 + alpha * beta.im,
            lambda_phase: Complex64::from_polar(1.0, -t * (p.omega_eg() / 2.0 + chi / 2.0)),
            kappa_plus: gamma * Complex64::from_polar(1.0, -t * (p.delta_c() + chi)),
            kappa_minus: gamma * Complex64::from_polar(1.0, -t * (p.delta_c() - chi)),
        })
    }
}

/// The entangled cat state under the `R ~ 1` approximation, built from
/// coherent-state amplitudes so no displacement truncation error enters.
pub fn cat_state(
    t: f64,
    p: &DrivenParams,
    beta: Complex64,
    phi: f64,
    space: FockSpace,
) -> Result<StateVector> {
    let spec = CatStateSpec::at(t, p, beta, phi)?;
    let alpha = Complex64::new(p.alpha(), 0.0);
    let frame = Complex64::from_polar(1.0, -p.omega_0() * t);
    let branch_e = coherent_state((spec.kappa_plus - alpha) * frame, space)?;
    let branch_g = coherent_state((spec.kappa_minus - alpha) * frame, space)?;

    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let global = Complex64::from_polar(1.0, -spec.theta) * half;
    let we = global
        * spec.lambda_phase
        * Complex64::from_polar(1.0, p.alpha() * spec.kappa_plus.im);
    let wg = global
        * Complex64::from_polar(1.0, spec.phi)
        * spec.lambda_phase.conj()
        * Complex64::from_polar(1.0, p.alpha() * spec.kappa_minus.im);

    let dim = space.dim();
    let mut amps = CVec::zeros(2 * dim);
    for n in 0..dim {
        amps[n] = we * branch_e.amplitudes()[n];
        amps[dim + n] = wg * branch_g.amplitudes()[n];
    }
    StateVector::new(space.product_space(), amps)
}

/// Numeric dispersive solution keeping the exact rotation:
/// `T^dag D^dag R^dag U_eff(t) R D |psi(0)>`. Quantifies the `R ~ 1` step.
pub fn cat_state_exact_rotation(
    t: f64,
    p: &DrivenParams,
    beta: Complex64,
    phi: f64,
    space: FockSpace,
) -> Result<StateVector> {
    use crate::model::InitialCondition;
    let init = InitialCondition::superposition(beta, phi).state(space)?;
    let alpha = p.alpha();
    let r = small_rotation(p, space)?;
    let h_eff = effective_hamiltonian(p, space)?;

    let mut v = init.amplitudes().clone();
    let d_matrix = if alpha != 0.0 {
        Some(crate::hilbert::displacement(alpha, space)?.into_matrix())
    } else {
        None
    };
    let dim = space.dim();
    let apply_field = |m: &CMat, v: &CVec, adjoint: bool| -> CVec {
        let pe = v.rows(0, dim).into_owned();
        let pg = v.rows(dim, dim).into_owned();
        let (oe, og) = if adjoint {
            (m.ad_mul(&pe), m.ad_mul(&pg))
        } else {
            (m * pe, m * pg)
        };
        let mut out = CVec::zeros(2 * dim);
        for n in 0..dim {
            out[n] = oe[n];
            out[dim + n] = og[n];
        }
        out
    };

    if let Some(d) = &d_matrix {
        v = apply_field(d, &v, false);
    }
    v = r.matrix() * v;
    // U_eff is diagonal
    for (k, x) in v.iter_mut().enumerate() {
        let e = h_eff.matrix()[(k, k)].re;
        *x *= Complex64::from_polar(1.0, -e * t);
    }
    v = r.matrix().ad_mul(&v);
    if let Some(d) = &d_matrix {
        v = apply_field(d, &v, true);
    }
    let phases = excitation_phases(-p.omega_0() * t, dim);
    apply_phases(&phases, &mut v);
    StateVector::new(space.product_space(), v)
}

/// Phase-space distance of the two cat branches,
/// `|kappa_+ - kappa_-| = 2 |beta + alpha| |sin(chi t)|`.
pub fn branch_separation(t: f64, p: &DrivenParams, beta: Complex64) -> Result<f64> {
    DispersiveParams::new(p)?;
    let chi = dispersive_shift(p);
    let gamma = beta + Complex64::new(p.alpha(), 0.0);
    Ok(2.0 * gamma.norm() * (chi * t).sin().abs())
}
