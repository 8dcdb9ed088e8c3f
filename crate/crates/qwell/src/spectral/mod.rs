//! Independent verification oracle: discretize -d^2/dx^2 + V on a box with
//! Dirichlet ends and solve for the low spectrum. The potential is always
//! evaluated through the generic psi''/psi path, never a closed form, so
//! agreement with the analytic construction counts as verification.

pub mod tridiag;

use crate::groundmap::{GroundState, Potential};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use tridiag::{Pencil, Tridiag};

/// Eigenvalue bisection tolerance; below the h^2 discretization error at the
/// default resolutions.
const EIGEN_TOL: f64 = 1e-12;
const EIGEN_BUDGET: usize = 200;

/// Uniform box grid with Dirichlet boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min < x_max) || n < 3 {
            return Err(Error::BadGrid);
        }
        Ok(Grid { x_min, x_max, n })
    }

    /// Default box for a double-well family member: [-30 - 3D/k, 30 + 3D/k].
    pub fn for_family(k: f64, d: f64) -> Result<Self> {
        let w = 30.0 + 3.0 * d / k;
        Grid::new(-w, w, 6000)
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }
}

/// Discretization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Three-point finite differences, O(h^2).
    Fd3,
    /// Numerov weighting, O(h^4), solved as an (A, B) pencil.
    Numerov,
}

/// Assembled operator on the interior points of a grid.
#[derive(Debug, Clone)]
pub struct Discretized {
    pub pencil: Pencil,
    pub grid: Grid,
    pub method: Method,
}

/// Build the interior-point operator for -y'' + V y = E y.
pub fn discretize(v: &Potential, grid: &Grid, method: Method) -> Result<Discretized> {
    let h = grid.spacing();
    let m = grid.n - 2;
    if m < 1 {
        return Err(Error::BadGrid);
    }
    let pot: Vec<f64> = (1..grid.n - 1)
        .map(|i| v.eval_generic(grid.point(i)))
        .collect::<Result<_>>()?;
    let pencil = match method {
        Method::Fd3 => {
            let diag: Vec<f64> = pot.iter().map(|&vi| 2.0 / (h * h) + vi).collect();
            let off = vec![-1.0 / (h * h); m - 1];
            Pencil::standard(Tridiag::symmetric(diag, off))
        }
        Method::Numerov => {
            // -(y_{i+1} - 2 y_i + y_{i-1})/h^2
            //   + (V_{i+1} y_{i+1} + 10 V_i y_i + V_{i-1} y_{i-1})/12
            //   = E (y_{i+1} + 10 y_i + y_{i-1})/12
            let diag: Vec<f64> = pot.iter().map(|&vi| 2.0 / (h * h) + 10.0 * vi / 12.0).collect();
            let sub: Vec<f64> = (0..m - 1).map(|i| -1.0 / (h * h) + pot[i] / 12.0).collect();
            let sup: Vec<f64> = (0..m - 1).map(|i| -1.0 / (h * h) + pot[i + 1] / 12.0).collect();
            let a = Tridiag { sub, diag, sup };
            let b = Tridiag::symmetric(vec![10.0 / 12.0; m], vec![1.0 / 12.0; m - 1]);
            Pencil { a, b }
        }
    };
    Ok(Discretized {
        pencil,
        grid: *grid,
        method,
    })
}

/// Low eigenpairs; eigenvectors live on the full grid (zeros at the ends)
/// and are normalized so that h * sum(psi_i^2) = 1.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub method: Method,
    pub grid: Grid,
}

/// Solve for the lowest `count` eigenpairs.
pub fn low_spectrum(v: &Potential, grid: &Grid, count: usize, method: Method) -> Result<SpectralResult> {
    let op = discretize(v, grid, method)?;
    low_spectrum_of(&op, count)
}

/// Same, from a pre-assembled operator.
pub fn low_spectrum_of(op: &Discretized, count: usize) -> Result<SpectralResult> {
    let h = op.grid.spacing();
    let mut eigenvalues = Vec::with_capacity(count);
    let mut eigenvectors = Vec::with_capacity(count);
    for idx in 0..count {
        let lam = op.pencil.eigenvalue(idx, EIGEN_TOL, EIGEN_BUDGET)?;
        let mut vec = op.pencil.eigenvector(lam, EIGEN_BUDGET)?;
        // grid normalization and sign convention: positive mean
        let norm: f64 = (h * vec.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let mean: f64 = vec.iter().sum();
        let flip = if mean < 0.0 { -1.0 } else { 1.0 };
        for x in vec.iter_mut() {
            *x *= flip / norm;
        }
        let mut full = Vec::with_capacity(op.grid.n);
        full.push(0.0);
        full.extend(vec);
        full.push(0.0);
        eigenvalues.push(lam);
        eigenvectors.push(full);
    }
    Ok(SpectralResult {
        eigenvalues,
        eigenvectors,
        method: op.method,
        grid: op.grid,
    })
}

impl SpectralResult {
    /// Grid overlap h * sum(psi_i * f(x_i)) against a grid-normalized
    /// analytic state.
    pub fn overlap_with(&self, index: usize, state: &GroundState) -> f64 {
        let h = self.grid.spacing();
        let samples: Vec<f64> = self.grid.points().map(|x| state.eval(x).value).collect();
        let norm: f64 = (h * samples.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let dot: f64 = self.eigenvectors[index]
            .iter()
            .zip(&samples)
            .map(|(a, b)| a * b)
            .sum();
        (h * dot / norm).abs()
    }

    /// Number of interior sign changes of the index-th eigenvector.
    pub fn sign_changes(&self, index: usize) -> usize {
        let mut changes = 0;
        let mut last = 0.0f64;
        for &x in &self.eigenvectors[index] {
            // skip numerically dead entries near the box edges
            if x.abs() < 1e-9 {
                continue;
            }
            if last != 0.0 && x.signum() != last.signum() {
                changes += 1;
            }
            last = x;
        }
        changes
    }
}

/// Least-squares fit of the first excited state to the antisymmetric
/// combination of the two well states.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TwoLevelFit {
    pub n_l: f64,
    pub n_r: f64,
    /// norm fraction of the first excited vector captured by the well span
    pub overlap_e1: f64,
}

/// Fit the numerical first excited vector to n_L psi_L - n_R psi_R.
pub fn two_level_check(
    v: &Potential,
    left: &GroundState,
    right: &GroundState,
    grid: &Grid,
) -> Result<TwoLevelFit> {
    let h = grid.spacing();
    let norm_samples = |state: &GroundState| -> Vec<f64> {
        let mut s: Vec<f64> = grid.points().map(|x| state.eval(x).value).collect();
        let n: f64 = (h * s.iter().map(|x| x * x).sum::<f64>()).sqrt();
        for x in s.iter_mut() {
            *x /= n;
        }
        s
    };
    let psi_l = norm_samples(left);
    let psi_r = norm_samples(right);
    let dot = |a: &[f64], b: &[f64]| -> f64 { h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() };
    let g_lr = dot(&psi_l, &psi_r);
    if g_lr.abs() > 0.999 {
        return Err(Error::DegenerateFit);
    }
    let spectrum = low_spectrum(v, grid, 2, Method::Fd3)?;
    let e1 = &spectrum.eigenvectors[1];
    // 2x2 normal equations for e1 ~ cl psi_L + cr psi_R
    let (bl, br) = (dot(e1, &psi_l), dot(e1, &psi_r));
    let det = 1.0 - g_lr * g_lr;
    let cl = (bl - g_lr * br) / det;
    let cr = (br - g_lr * bl) / det;
    let proj_norm_sq = cl * cl + cr * cr + 2.0 * cl * cr * g_lr;
    let e1_norm_sq = dot(e1, e1);
    let overlap_e1 = (proj_norm_sq / e1_norm_sq).sqrt().min(1.0);
    // report in the n_L psi_L - n_R psi_R convention with n_L >= 0
    let (n_l, n_r) = if cl >= 0.0 { (cl, -cr) } else { (-cl, cr) };
    Ok(TwoLevelFit { n_l, n_r, overlap_e1 })
}
