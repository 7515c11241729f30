use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// A Fock-space truncation is too small for the requested operation.
    #[error("truncation too small: {0}")]
    Truncation(String),

    /// Operands live on incompatible spaces.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The Hermitian eigensolver did not converge.
    #[error("eigendecomposition failed for a {dim}x{dim} matrix")]
    EigenFailure { dim: usize },

    /// Coupling constants violate the constructor preconditions.
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    /// The requested operation is undefined for the parameter mode.
    #[error("mode error: {0}")]
    ModeError(String),

    /// A matrix failed a structural validation (Hermiticity, unitarity, norm).
    #[error("invalid operand: {0}")]
    InvalidOperand(String),

    /// Closed-form observable series exist only for the |beta, e> initial state.
    #[error("unsupported initial condition: {0}")]
    UnsupportedInitialCondition(String),

    /// Mandel Q is undefined when the mean photon number is at the floor.
    #[error("degenerate mean photon number {mean} <= {floor}")]
    DegenerateMean { mean: f64, floor: f64 },

    /// A density matrix has an eigenvalue below the positivity tolerance.
    #[error("density matrix not positive: eigenvalue {eigenvalue}")]
    NonPositiveMatrix { eigenvalue: f64 },

    /// A requested search window is not covered by the series grid.
    #[error("window [{lo}, {hi}] not covered by series grid")]
    WindowOutOfRange { lo: f64, hi: f64 },

    /// A trajectory operation needs stored states but none were kept.
    #[error("trajectory stores no states")]
    MissingStates,

    /// The integrator step-halving gate failed to converge.
    #[error("integrator did not converge: {0}")]
    Convergence(String),

    /// Parameters are outside the dispersive regime |Delta| >= 10 g.
    #[error("outside dispersive regime: {0}")]
    Regime(String),
}

pub type Result<T> = std::result::Result<T, Error>;
