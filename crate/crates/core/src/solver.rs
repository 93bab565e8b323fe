//! Nuclear-norm tensor completion by a two-block ADMM.
//!
//! Solves `min TTNN(Z)` subject to `Z = Y` and `P_Ω(Y) = P_Ω(M)`.

use std::time::Instant;

use crate::algebra::svt_prox;
use crate::error::{Error, Result};
use crate::tensor::{ensure_same_dims, Tensor3, C64};
use crate::transform::{TransformKind, UnitaryTransform};

/// Observed index set `Ω` of a tensor.
///
/// Indices are stored in memory order (`i` fastest, then `j`, then `k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    dims: (usize, usize, usize),
    indices: Vec<(usize, usize, usize)>,
    mask: Vec<bool>,
    seed: u64,
}

impl SampleSet {
    /// Validates that every triple is in range and distinct.
    pub fn new(dims: (usize, usize, usize), indices: Vec<(usize, usize, usize)>, seed: u64) -> Result<Self> {
        let (n1, n2, n3) = dims;
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(Error::InvalidArgument(format!("dimensions must be positive, got {dims:?}")));
        }
        let mut mask = vec![false; n1 * n2 * n3];
        for &(i, j, k) in &indices {
            if i >= n1 || j >= n2 || k >= n3 {
                return Err(Error::IndexOutOfRange(format!("({i},{j},{k}) outside {dims:?}")));
            }
            let p = i + n1 * (j + n2 * k);
            if mask[p] {
                return Err(Error::InvalidArgument(format!("duplicate index ({i},{j},{k})")));
            }
            mask[p] = true;
        }
        Ok(Self::from_mask(dims, mask, seed))
    }

    /// Builds the set from a memory-order membership mask.
    pub(crate) fn from_mask(dims: (usize, usize, usize), mask: Vec<bool>, seed: u64) -> Self {
        let (n1, n2, _) = dims;
        let indices = mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(p, _)| (p % n1, (p / n1) % n2, p / (n1 * n2)))
            .collect();
        Self { dims, indices, mask, seed }
    }

    /// Every entry of a tensor of the given shape.
    pub fn full(dims: (usize, usize, usize)) -> Result<Self> {
        let (n1, n2, n3) = dims;
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(Error::InvalidArgument(format!("dimensions must be positive, got {dims:?}")));
        }
        Ok(Self::from_mask(dims, vec![true; n1 * n2 * n3], 0))
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn indices(&self) -> &[(usize, usize, usize)] {
        &self.indices
    }

    /// Membership flags in memory order.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, i: usize, j: usize, k: usize) -> bool {
        let (n1, n2, n3) = self.dims;
        i < n1 && j < n2 && k < n3 && self.mask[i + n1 * (j + n2 * k)]
    }

    /// Number of observed entries.
    pub fn m(&self) -> usize {
        self.indices.len()
    }

    /// Sampling ratio `m / (n1·n2·n3)`.
    pub fn rho(&self) -> f64 {
        self.m() as f64 / self.mask.len() as f64
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// ADMM parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Penalty parameter.
    pub beta: f64,
    /// Dual step length, in `(0, (1+√5)/2)`.
    pub gamma: f64,
    /// Stop once the KKT residual is at or below this.
    pub tol: f64,
    pub max_iter: usize,
}

/// Upper limit (exclusive) of the dual step length.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

impl Default for SolverConfig {
    fn default() -> Self {
        Self { beta: 0.05, gamma: 1.618, tol: 1e-3, max_iter: 600 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.gamma > 0.0 && self.gamma < GOLDEN_RATIO) {
            return Err(Error::InvalidConfig(format!(
                "gamma must lie in (0, (1+sqrt 5)/2), got {}",
                self.gamma
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Relative KKT residuals of an iterate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kkt {
    /// Prox fixed-point residual.
    pub eta_x: f64,
    /// Primal consistency `Z = Y`.
    pub eta_y: f64,
    /// `max(eta_x, eta_y)`.
    pub eta: f64,
}

/// Outcome of [`admm_complete`].
#[derive(Clone, Debug)]
pub struct SolveReport {
    /// Recovered tensor.
    pub z: Tensor3,
    /// Final auxiliary iterate (agrees with the observations on `Ω`).
    pub y: Tensor3,
    /// Final multiplier.
    pub x: Tensor3,
    pub iterations: usize,
    /// One entry per iteration.
    pub history: Vec<Kkt>,
    pub converged: bool,
    pub wall_seconds: f64,
}

impl SolveReport {
    /// Residual after the last iteration.
    pub fn final_kkt(&self) -> Kkt {
        *self.history.last().expect("at least one iteration runs")
    }
}

/// `P_Ω(z)`: keeps observed entries and zeroes the rest.
pub fn project_omega(z: &Tensor3, s: &SampleSet) -> Result<Tensor3> {
    if z.dims() != s.dims {
        return Err(Error::DimensionMismatch(format!(
            "tensor {:?} vs sample set {:?}",
            z.dims(),
            s.dims
        )));
    }
    let zero = C64::new(0.0, 0.0);
    let data = z.as_slice().iter().zip(&s.mask).map(|(&v, &b)| if b { v } else { zero }).collect();
    Ok(Tensor3::from_parts(z.dims(), data))
}

/// `η_x = ‖Z − prox(X + Z)‖ / (1 + ‖Z‖ + ‖X‖)`,
/// `η_y = ‖Z − Y‖ / (1 + ‖Z‖ + ‖Y‖)` and their maximum, with the prox of the
/// TTNN taken at unit threshold.
pub fn kkt_residual(z: &Tensor3, y: &Tensor3, x: &Tensor3, t: &UnitaryTransform) -> Result<Kkt> {
    ensure_same_dims(z, y)?;
    ensure_same_dims(z, x)?;
    let nz = z.frobenius_norm();
    let prox = svt_prox(&(x + z), t, 1.0)?;
    let eta_x = (z - &prox).frobenius_norm() / (1.0 + nz + x.frobenius_norm());
    let eta_y = (z - y).frobenius_norm() / (1.0 + nz + y.frobenius_norm());
    Ok(Kkt { eta_x, eta_y, eta: eta_x.max(eta_y) })
}

/// Relative size of the imaginary part tolerated when returning a real result.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Completes `m_obs` from its entries on `s` by TTNN minimization.
///
/// Entries of `m_obs` outside `Ω` are ignored. Starts from `Y = P_Ω(M)` and
/// `X = 0`, then repeats
///
/// ```text
/// Z ← svt(Y + X/β, 1/β)
/// Y ← P_Ω̄(Z − X/β) + P_Ω(M)
/// X ← X − γβ(Z − Y)
/// ```
///
/// until the KKT residual is at most `cfg.tol` or `cfg.max_iter` is reached.
///
/// If `m_obs` is real and `Φ` is the DFT or a real matrix, the returned `Z` is
/// real: its imaginary part must be below `1e-8·‖Z‖_F` and is dropped,
/// otherwise a numerical error is returned.
pub fn admm_complete(
    m_obs: &Tensor3,
    s: &SampleSet,
    t: &UnitaryTransform,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    if m_obs.n3() != t.n3() {
        return Err(Error::DimensionMismatch(format!(
            "tensor has n3 = {} but transform is {}-point",
            m_obs.n3(),
            t.n3()
        )));
    }
    let start = Instant::now();
    let observed = project_omega(m_obs, s)?;
    let dims = observed.dims();
    let inv_beta = 1.0 / cfg.beta;
    let step = cfg.gamma * cfg.beta;

    let mut y = observed.clone();
    let mut x = Tensor3::zeros(dims.0, dims.1, dims.2);
    let mut z = x.clone();
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        z = svt_prox(&(&y + &(&x * inv_beta)), t, inv_beta)?;
        let y_data = z
            .as_slice()
            .iter()
            .zip(x.as_slice())
            .zip(observed.as_slice())
            .zip(&s.mask)
            .map(|(((&zv, &xv), &ov), &b)| if b { ov } else { zv - xv * inv_beta })
            .collect();
        y = Tensor3::from_parts(dims, y_data);
        let x_data = x
            .as_slice()
            .iter()
            .zip(z.as_slice())
            .zip(y.as_slice())
            .map(|((&xv, &zv), &yv)| xv - (zv - yv) * step)
            .collect();
        x = Tensor3::from_parts(dims, x_data);
        let kkt = kkt_residual(&z, &y, &x, t)?;
        history.push(kkt);
        if kkt.eta <= cfg.tol {
            converged = true;
            break;
        }
    }

    if m_obs.is_real() && (t.kind() == TransformKind::Fft || t.is_real()) {
        z = realify(&z)?;
    }
    Ok(SolveReport {
        z,
        y,
        x,
        iterations: history.len(),
        history,
        converged,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

fn realify(z: &Tensor3) -> Result<Tensor3> {
    let imag = z.as_slice().iter().map(|v| v.im * v.im).sum::<f64>().sqrt();
    if imag > IMAG_RESIDUE_TOL * z.frobenius_norm() {
        return Err(Error::Numerical(format!(
            "result of a real problem has imaginary part of norm {imag:e}"
        )));
    }
    Ok(z.map(|v| C64::new(v.re, 0.0)))
}
