//! Truncated Fock-space and two-level-atom linear algebra.
//!
//! Dense complex matrices throughout; the product basis is atom-major with
//! the excited state first, so a product-space vector `v` splits into
//! `v[0..dim]` (excited sector) and `v[dim..2*dim]` (ground sector), where
//! `dim` is the number of retained Fock levels.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance below which a flagged Hermitian matrix must match its adjoint.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for the unitarity residual of flagged unitary matrices.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on the norm of physical state vectors.
pub const NORM_TOL: f64 = 1e-9;
/// Poisson tail mass that a coherent-state truncation must not exceed.
pub const COHERENT_TAIL_TOL: f64 = 1e-12;

/// The space a vector or matrix is defined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// Two-level atom alone.
    Atom,
    /// Truncated field mode with `dim` Fock levels.
    Field { dim: usize },
    /// Atom tensor field, atom index major, excited sector first.
    AtomField { field_dim: usize },
}

impl Space {
    pub fn dim(&self) -> usize {
        match *self {
            Space::Atom => 2,
            Space::Field { dim } => dim,
            Space::AtomField { field_dim } => 2 * field_dim,
        }
    }

    pub fn field_dim(&self) -> Option<usize> {
        match *self {
            Space::Atom => None,
            Space::Field { dim } => Some(dim),
            Space::AtomField { field_dim } => Some(field_dim),
        }
    }
}

/// A truncated Fock space retaining levels `0..dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionMismatch(format!(
                "Fock space needs dim >= 2, got {dim}"
            )));
        }
        Ok(Self { dim })
    }

    /// Truncation rule `dim = ceil(|gamma|^2 + 8|gamma| + 20)`: Poisson tail
    /// below 1e-12 plus headroom for displacement edge effects.
    pub fn with_headroom(gamma_abs: f64) -> Self {
        let g = gamma_abs.abs();
        Self {
            dim: (g * g + 8.0 * g + 20.0).ceil() as usize,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self) -> Space {
        Space::Field { dim: self.dim }
    }

    pub fn product_space(&self) -> Space {
        Space::AtomField {
            field_dim: self.dim,
        }
    }

    /// Annihilation operator: `<n-1| a |n> = sqrt(n)`.
    pub fn annihilation(&self) -> Operator {
        let mut m = CMat::zeros(self.dim, self.dim);
        for n in 1..self.dim {
            m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        Operator::from_parts(self.space(), m, false, false)
    }

    pub fn creation(&self) -> Operator {
        let a = self.annihilation();
        Operator::from_parts(self.space(), a.mat.adjoint(), false, false)
    }

    /// Number operator, diagonal with eigenvalues `0..dim`.
    pub fn number(&self) -> Operator {
        let mut m = CMat::zeros(self.dim, self.dim);
        for n in 0..self.dim {
            m[(n, n)] = Complex64::new(n as f64, 0.0);
        }
        Operator::from_parts(self.space(), m, true, false)
    }

    pub fn identity(&self) -> Operator {
        Operator::from_parts(self.space(), CMat::identity(self.dim, self.dim), true, true)
    }
}

/// Pauli z in the `{|e>, |g>}` basis.
pub fn sigma_z() -> Operator {
    let m = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    Operator::from_parts(Space::Atom, m, true, true)
}

/// Raising operator `|e><g|`.
pub fn sigma_plus() -> Operator {
    let m = CMat::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    Operator::from_parts(Space::Atom, m, false, false)
}

/// Lowering operator `|g><e|`.
pub fn sigma_minus() -> Operator {
    let m = CMat::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO]);
    Operator::from_parts(Space::Atom, m, false, false)
}

pub fn atom_identity() -> Operator {
    Operator::from_parts(Space::Atom, CMat::identity(2, 2), true, true)
}

/// Dense operator with optional Hermiticity/unitarity flags.
///
/// Flags are set by the validating constructors and propagated where the
/// algebra guarantees them; they are never guessed.
#[derive(Debug, Clone)]
pub struct Operator {
    pub(crate) mat: CMat,
    space: Space,
    hermitian: bool,
    unitary: bool,
}

pub(crate) fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

impl Operator {
    pub(crate) fn from_parts(space: Space, mat: CMat, hermitian: bool, unitary: bool) -> Self {
        debug_assert_eq!(mat.nrows(), space.dim());
        debug_assert_eq!(mat.ncols(), space.dim());
        Self {
            mat,
            space,
            hermitian,
            unitary,
        }
    }

    /// Wrap a matrix with no structural claims.
    pub fn general(space: Space, mat: CMat) -> Result<Self> {
        if mat.nrows() != space.dim() || mat.ncols() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a dim-{} space",
                mat.nrows(),
                mat.ncols(),
                space.dim()
            )));
        }
        Ok(Self::from_parts(space, mat, false, false))
    }

    /// Wrap a matrix, validating `max|M - M^dag| <= 1e-12`.
    pub fn hermitian(space: Space, mat: CMat) -> Result<Self> {
        let op = Self::general(space, mat)?;
        let res = max_abs(&(&op.mat - op.mat.adjoint()));
        if res > HERMITIAN_TOL {
            return Err(Error::InvalidOperand(format!(
                "Hermiticity residual {res:.3e} exceeds {HERMITIAN_TOL:.0e}"
            )));
        }
        Ok(Self { hermitian: true, ..op })
    }

    /// Wrap a matrix, validating `max|M^dag M - 1| <= 1e-10`.
    pub fn unitary(space: Space, mat: CMat) -> Result<Self> {
        let op = Self::general(space, mat)?;
        let dim = op.mat.nrows();
        let res = max_abs(&(op.mat.adjoint() * &op.mat - CMat::identity(dim, dim)));
        if res > UNITARY_TOL {
            return Err(Error::InvalidOperand(format!(
                "unitarity residual {res:.3e} exceeds {UNITARY_TOL:.0e}"
            )));
        }
        Ok(Self { unitary: true, ..op })
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn adjoint(&self) -> Operator {
        Operator::from_parts(self.space, self.mat.adjoint(), self.hermitian, self.unitary)
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.space != self.space {
            return Err(Error::DimensionMismatch(format!(
                "operator on {:?} applied to state on {:?}",
                self.space, v.space
            )));
        }
        Ok(StateVector {
            amps: &self.mat * &v.amps,
            space: v.space,
        })
    }

    /// `<v| M |v>` without checking the Hermiticity flag.
    pub fn expectation(&self, v: &StateVector) -> Result<Complex64> {
        let mv = self.apply(v)?;
        Ok(v.amps.dotc(&mv.amps))
    }
}

/// Commutator `[A, B] = AB - BA` of two same-space matrices.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Kronecker product embedding a 2x2 atom operator and a field operator
/// into the product space, atom index major.
pub fn tensor(atom_op: &Operator, field_op: &Operator) -> Result<Operator> {
    if atom_op.space != Space::Atom {
        return Err(Error::DimensionMismatch(
            "tensor expects a 2x2 atom operator on the left".into(),
        ));
    }
    let field_dim = match field_op.space {
        Space::Field { dim } => dim,
        _ => {
            return Err(Error::DimensionMismatch(
                "tensor expects a field operator on the right".into(),
            ))
        }
    };
    Ok(Operator::from_parts(
        Space::AtomField { field_dim },
        atom_op.mat.kronecker(&field_op.mat),
        atom_op.hermitian && field_op.hermitian,
        atom_op.unitary && field_op.unitary,
    ))
}

/// Norm-1 complex amplitude vector over a tagged basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub(crate) amps: CVec,
    space: Space,
}

impl StateVector {
    /// Wrap amplitudes, validating the norm to within `NORM_TOL`.
    pub fn new(space: Space, amps: CVec) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes on a dim-{} space",
                amps.len(),
                space.dim()
            )));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidOperand(format!(
                "state norm {norm} deviates from 1 by more than {NORM_TOL:.0e}"
            )));
        }
        Ok(Self { amps, space })
    }

    pub(crate) fn from_parts(space: Space, amps: CVec) -> Self {
        debug_assert_eq!(amps.len(), space.dim());
        Self { amps, space }
    }

    /// Fock basis state `|n>`.
    pub fn fock(n: usize, space: FockSpace) -> Result<Self> {
        if n >= space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "Fock level {n} outside dim {}",
                space.dim()
            )));
        }
        let mut amps = CVec::zeros(space.dim());
        amps[n] = ONE;
        Ok(Self::from_parts(space.space(), amps))
    }

    /// Product state `atom (x) field` in the atom-major convention.
    pub fn product(atom: &CVec, field: &StateVector) -> Result<Self> {
        let dim = match field.space {
            Space::Field { dim } => dim,
            _ => {
                return Err(Error::DimensionMismatch(
                    "product expects a field-only state".into(),
                ))
            }
        };
        if atom.len() != 2 {
            return Err(Error::DimensionMismatch(
                "product expects a 2-component atom vector".into(),
            ));
        }
        let mut amps = CVec::zeros(2 * dim);
        for n in 0..dim {
            amps[n] = atom[0] * field.amps[n];
            amps[dim + n] = atom[1] * field.amps[n];
        }
        Self::new(Space::AtomField { field_dim: dim }, amps)
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch(
                "overlap of states on different spaces".into(),
            ));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|<self|other>|^2 / (<self|self><other|other>)`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        let ov = self.overlap(other)?;
        Ok(ov.norm_sqr() / (self.amps.norm_squared() * other.amps.norm_squared()))
    }

    /// Excited-sector amplitudes of a product-space state.
    pub fn excited_sector(&self) -> Result<CVec> {
        match self.space {
            Space::AtomField { field_dim } => Ok(self.amps.rows(0, field_dim).into_owned()),
            _ => Err(Error::DimensionMismatch(
                "excited_sector needs a product-space state".into(),
            )),
        }
    }

    /// Ground-sector amplitudes of a product-space state.
    pub fn ground_sector(&self) -> Result<CVec> {
        match self.space {
            Space::AtomField { field_dim } => {
                Ok(self.amps.rows(field_dim, field_dim).into_owned())
            }
            _ => Err(Error::DimensionMismatch(
                "ground_sector needs a product-space state".into(),
            )),
        }
    }
}

/// Coherent state `|beta>` with amplitudes `e^{-|b|^2/2} b^n / sqrt(n!)`,
/// renormalized after truncation.
pub fn coherent_state(beta: Complex64, space: FockSpace) -> Result<StateVector> {
    let dim = space.dim();
    let mut amps = CVec::zeros(dim);
    amps[0] = Complex64::new((-beta.norm_sqr() / 2.0).exp(), 0.0);
    for n in 1..dim {
        amps[n] = amps[n - 1] * beta / Complex64::new((n as f64).sqrt(), 0.0);
    }
    let kept = amps.norm_squared();
    let tail = 1.0 - kept;
    if tail > COHERENT_TAIL_TOL {
        return Err(Error::Truncation(format!(
            "coherent-state tail mass {tail:.3e} above {COHERENT_TAIL_TOL:.0e} at dim {dim} for |beta| = {}",
            beta.norm()
        )));
    }
    amps /= Complex64::new(kept.sqrt(), 0.0);
    Ok(StateVector::from_parts(space.space(), amps))
}

/// Largest Fock index whose displaced image stays clear of the truncation
/// edge; used to pick the subspace on which unitarity is asserted.
fn displacement_probe_dim(alpha: f64, dim: usize) -> usize {
    let a = alpha.abs();
    let mut probe = 0usize;
    for n in 0..dim {
        let spread = n as f64 + a * a + 6.0 * a * ((2 * n + 1) as f64).sqrt() + 10.0;
        if spread <= dim as f64 {
            probe = n + 1;
        } else {
            break;
        }
    }
    probe.max(1)
}

/// Glauber displacement `D(alpha) = exp[alpha (a^dag - a)]`, built by
/// eigendecomposition of the Hermitian counterpart of its generator.
pub fn displacement(alpha: f64, space: FockSpace) -> Result<Operator> {
    let dim = space.dim();
    if alpha == 0.0 {
        return Ok(Operator::from_parts(
            space.space(),
            CMat::identity(dim, dim),
            true,
            true,
        ));
    }
    // Hermitian counterpart M = i alpha (a^dag - a); D = exp(-i M).
    let mut m = CMat::zeros(dim, dim);
    for n in 1..dim {
        let s = Complex64::new(0.0, alpha * (n as f64).sqrt());
        m[(n, n - 1)] = s;
        m[(n - 1, n)] = s.conj();
    }
    let eig = eigh_matrix(&m)?;
    let d = eig.unitary_at(1.0);

    let probe = displacement_probe_dim(alpha, dim);
    let gram = d.adjoint() * &d;
    let mut res = 0.0f64;
    for i in 0..probe {
        for j in 0..probe {
            let target = if i == j { ONE } else { ZERO };
            res = res.max((gram[(i, j)] - target).norm());
        }
    }
    if res > UNITARY_TOL {
        return Err(Error::Truncation(format!(
            "displacement unitarity drift {res:.3e} on probe subspace 0..{probe} (dim {dim})"
        )));
    }
    Ok(Operator::from_parts(space.space(), d, false, true))
}

/// Positive Hermitian trace-1 matrix on a tagged space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub(crate) mat: CMat,
    space: Space,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian to 1e-12, eigenvalues >= -1e-10,
    /// trace within 1e-10 of 1.
    pub fn new(space: Space, mat: CMat) -> Result<Self> {
        if mat.nrows() != space.dim() || mat.ncols() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a dim-{} space",
                mat.nrows(),
                mat.ncols(),
                space.dim()
            )));
        }
        let herm = max_abs(&(&mat - mat.adjoint()));
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidOperand(format!(
                "density matrix Hermiticity residual {herm:.3e}"
            )));
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidOperand(format!(
                "density matrix trace {tr} deviates from 1"
            )));
        }
        let eig = eigh_matrix(&mat)?;
        if let Some(min) = eig
            .values
            .iter()
            .cloned()
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            if min < -1e-10 {
                return Err(Error::NonPositiveMatrix { eigenvalue: min });
            }
        }
        Ok(Self { mat, space })
    }

    /// Projector onto a pure state.
    pub fn pure(state: &StateVector) -> Self {
        let n = state.dim();
        let mut mat = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                mat[(i, j)] = state.amps[i] * state.amps[j].conj();
            }
        }
        Self {
            mat,
            space: state.space(),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.mat).re
    }
}

pub(crate) fn trace(m: &CMat) -> Complex64 {
    let mut t = ZERO;
    for i in 0..m.nrows() {
        t += m[(i, i)];
    }
    t
}

/// Trace out the field of a product-space density matrix, leaving the 2x2
/// atomic state.
pub fn partial_trace_field(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let fd = match rho.space {
        Space::AtomField { field_dim } => field_dim,
        _ => {
            return Err(Error::DimensionMismatch(
                "partial_trace_field needs a product-space density matrix".into(),
            ))
        }
    };
    let mut out = CMat::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            let mut s = ZERO;
            for n in 0..fd {
                s += rho.mat[(a * fd + n, b * fd + n)];
            }
            out[(a, b)] = s;
        }
    }
    Ok(DensityMatrix {
        mat: out,
        space: Space::Atom,
    })
}

/// Trace out the atom, leaving the field-mode density matrix.
pub fn partial_trace_atom(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let fd = match rho.space {
        Space::AtomField { field_dim } => field_dim,
        _ => {
            return Err(Error::DimensionMismatch(
                "partial_trace_atom needs a product-space density matrix".into(),
            ))
        }
    };
    let mut out = CMat::zeros(fd, fd);
    for m in 0..fd {
        for n in 0..fd {
            out[(m, n)] = rho.mat[(m, n)] + rho.mat[(fd + m, fd + n)];
        }
    }
    Ok(DensityMatrix {
        mat: out,
        space: Space::Field { dim: fd },
    })
}

/// Eigendecomposition of a Hermitian matrix, reusable across many times.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMat,
}

pub(crate) fn eigh_matrix(m: &CMat) -> Result<HermitianEigen> {
    let dim = m.nrows();
    let se = nalgebra::linalg::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or(Error::EigenFailure { dim })?;
    Ok(HermitianEigen {
        values: se.eigenvalues,
        vectors: se.eigenvectors,
    })
}

/// Eigendecomposition of a flagged-Hermitian operator.
pub fn eigh(h: &Operator) -> Result<HermitianEigen> {
    if !h.hermitian {
        return Err(Error::InvalidOperand(
            "eigh requires an operator constructed as Hermitian".into(),
        ));
    }
    eigh_matrix(&h.mat)
}

impl HermitianEigen {
    /// Coefficients of `v` in the eigenbasis.
    pub fn coefficients(&self, v: &CVec) -> CVec {
        self.vectors.adjoint() * v
    }

    /// `exp(-i H t) v` given the precomputed eigenbasis coefficients.
    pub fn propagate_coefficients(&self, t: f64, coeffs: &CVec) -> CVec {
        let mut rotated = coeffs.clone();
        for (k, c) in rotated.iter_mut().enumerate() {
            *c *= Complex64::from_polar(1.0, -self.values[k] * t);
        }
        &self.vectors * rotated
    }

    /// `exp(-i H t) v`.
    pub fn propagate(&self, t: f64, v: &CVec) -> CVec {
        let coeffs = self.coefficients(v);
        self.propagate_coefficients(t, &coeffs)
    }

    /// Dense `exp(-i H t)`.
    pub fn unitary_at(&self, t: f64) -> CMat {
        let mut phased = self.vectors.clone();
        for (k, mut col) in phased.column_iter_mut().enumerate() {
            col *= Complex64::from_polar(1.0, -self.values[k] * t);
        }
        phased * self.vectors.adjoint()
    }
}

/// Exact propagation `exp(-i H t) v` for time-independent Hermitian `H`.
pub fn propagate_hermitian(h: &Operator, t: f64, v: &StateVector) -> Result<StateVector> {
    if h.space != v.space {
        return Err(Error::DimensionMismatch(
            "propagate_hermitian: operator and state spaces differ".into(),
        ));
    }
    let eig = eigh(h)?;
    Ok(StateVector::from_parts(v.space, eig.propagate(t, &v.amps)))
}
