//! Scalar observables and entanglement measures.

use crate::error::{Error, Result};
use crate::hilbert::{
    eigh_matrix, partial_trace_atom, partial_trace_field, DensityMatrix, Space, StateVector,
};

/// Mean photon number below which Mandel Q is refused.
pub const Q_FLOOR: f64 = 1e-9;
/// Density-matrix eigenvalues may undershoot zero by at most this much.
pub const POSITIVITY_TOL: f64 = 1e-8;

/// A named real time series on a uniform or irregular grid.
#[derive(Debug, Clone)]
pub struct ObservableSeries {
    pub name: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ObservableSeries {
    pub fn new(name: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} times vs {} values",
                times.len(),
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidOperand("non-finite observable value".into()));
        }
        Ok(Self {
            name: name.into(),
            times,
            values,
        })
    }
}

fn sector_weights(state: &StateVector) -> Result<(f64, f64)> {
    let pe = state.excited_sector()?;
    let pg = state.ground_sector()?;
    Ok((pe.norm_squared(), pg.norm_squared()))
}

/// Atomic inversion `<sigma_z>`, in `[-1, 1]`.
pub fn inversion(state: &StateVector) -> Result<f64> {
    let (we, wg) = sector_weights(state)?;
    Ok(we - wg)
}

fn photon_moment(state: &StateVector, power: i32) -> Result<f64> {
    let weights: Box<dyn Iterator<Item = (usize, f64)>> = match state.space() {
        Space::Field { .. } => Box::new(
            state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(n, z)| (n, z.norm_sqr())),
        ),
        Space::AtomField { field_dim } => Box::new(
            state
                .amplitudes()
                .iter()
                .enumerate()
                .map(move |(i, z)| (i % field_dim, z.norm_sqr())),
        ),
        Space::Atom => {
            return Err(Error::DimensionMismatch(
                "photon moments need a field in the state".into(),
            ))
        }
    };
    Ok(weights.map(|(n, w)| (n as f64).powi(power) * w).sum())
}

/// `<n>`.
pub fn mean_photon(state: &StateVector) -> Result<f64> {
    photon_moment(state, 1)
}

/// `<n^2>`.
pub fn photon_second_moment(state: &StateVector) -> Result<f64> {
    photon_moment(state, 2)
}

/// Mandel parameter `Q = (<n^2> - <n>^2)/<n> - 1`; zero for Poissonian
/// statistics, negative sub-Poissonian, positive super-Poissonian.
pub fn mandel_q(state: &StateVector) -> Result<f64> {
    let mean = mean_photon(state)?;
    if mean <= Q_FLOOR {
        return Err(Error::DegenerateMean {
            mean,
            floor: Q_FLOOR,
        });
    }
    let second = photon_second_moment(state)?;
    Ok((second - mean * mean) / mean - 1.0)
}

/// Reduced 2x2 atomic density matrix of a pure product-space state.
pub fn reduced_atom(state: &StateVector) -> Result<DensityMatrix> {
    partial_trace_field(&DensityMatrix::pure(state))
}

/// Reduced field density matrix of a pure product-space state.
pub fn reduced_field(state: &StateVector) -> Result<DensityMatrix> {
    partial_trace_atom(&DensityMatrix::pure(state))
}

/// Von Neumann entropy `S = -Tr(rho ln rho)` with `0 ln 0 := 0`.
///
/// Eigenvalues are clipped to `[0, 1]` after a positivity check at
/// `-POSITIVITY_TOL`, absorbing eigensolver noise at machine scale.
pub fn entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = eigh_matrix(rho.matrix())?;
    let mut s = 0.0;
    for &lambda in eig.values.iter() {
        if lambda < -POSITIVITY_TOL {
            return Err(Error::NonPositiveMatrix { eigenvalue: lambda });
        }
        let l = lambda.clamp(0.0, 1.0);
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    Ok(s)
}

/// Entropy of the atomic subsystem of a pure product-space state.
pub fn atomic_entropy(state: &StateVector) -> Result<f64> {
    entropy(&reduced_atom(state)?)
}

/// Grid argmin of a series inside `[lo, hi]`, refined by a three-point
/// parabola; ties break toward the earliest grid point. Returns `(t, value)`.
pub fn entropy_minimum(series: &ObservableSeries, window: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = window;
    let idx: Vec<usize> = series
        .times
        .iter()
        .enumerate()
        .filter(|(_, &t)| t >= lo && t <= hi)
        .map(|(k, _)| k)
        .collect();
    if idx.is_empty() || lo < series.times[0] || hi > *series.times.last().unwrap() {
        return Err(Error::WindowOutOfRange { lo, hi });
    }
    let mut best = idx[0];
    for &k in &idx[1..] {
        if series.values[k] < series.values[best] {
            best = k;
        }
    }
    // refine: vertex of the parabola through the argmin and its neighbors
    if best > 0 && best + 1 < series.times.len() {
        let (tm, t0, tp) = (
            series.times[best - 1],
            series.times[best],
            series.times[best + 1],
        );
        let (ym, y0, yp) = (
            series.values[best - 1],
            series.values[best],
            series.values[best + 1],
        );
        let denom = ym - 2.0 * y0 + yp;
        if denom > 0.0 {
            let h = 0.5 * (tp - tm) / 2.0;
            let shift = 0.5 * (ym - yp) / denom;
            // uniform-grid vertex; clamp to the bracketing cell
            let t_star = (t0 + shift * 2.0 * h).clamp(tm, tp);
            let y_star = y0 - 0.125 * (ym - yp) * (ym - yp) / denom;
            return Ok((t_star, y_star));
        }
    }
    Ok((series.times[best], series.values[best]))
}
