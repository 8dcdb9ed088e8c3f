//! Bisection + inverse iteration for tridiagonal pencils (A - lambda B) x = 0
//! with B symmetric positive definite (identity for plain FD3, the Numerov
//! weight matrix otherwise).

use crate::{Error, Result};

/// General tridiagonal matrix (sub/diag/super); symmetric matrices simply
/// carry equal sub and super arrays.
#[derive(Debug, Clone)]
pub struct Tridiag {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiag {
    pub fn symmetric(diag: Vec<f64>, off: Vec<f64>) -> Self {
        Tridiag {
            sub: off.clone(),
            diag,
            sup: off,
        }
    }

    pub fn identity(n: usize) -> Self {
        Tridiag {
            sub: vec![0.0; n - 1],
            diag: vec![1.0; n],
            sup: vec![0.0; n - 1],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    /// y = M x
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.sup[i] * x[i + 1];
            }
            y[i] = v;
        }
    }
}

/// The eigenvalue problem A x = lambda B x.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub a: Tridiag,
    pub b: Tridiag,
}

impl Pencil {
    pub fn standard(a: Tridiag) -> Self {
        let n = a.len();
        Pencil {
            a,
            b: Tridiag::identity(n),
        }
    }

    fn len(&self) -> usize {
        self.a.len()
    }

    fn shifted(&self, lambda: f64) -> Tridiag {
        let n = self.len();
        let mut t = Tridiag {
            sub: Vec::with_capacity(n - 1),
            diag: Vec::with_capacity(n),
            sup: Vec::with_capacity(n - 1),
        };
        for i in 0..n {
            t.diag.push(self.a.diag[i] - lambda * self.b.diag[i]);
        }
        for i in 0..n - 1 {
            t.sub.push(self.a.sub[i] - lambda * self.b.sub[i]);
            t.sup.push(self.a.sup[i] - lambda * self.b.sup[i]);
        }
        t
    }

    /// Number of pencil eigenvalues strictly below lambda, by the sign count
    /// of the LDL pivots of A - lambda B.
    pub fn count_below(&self, lambda: f64) -> usize {
        let t = self.shifted(lambda);
        let n = t.len();
        let mut count = 0usize;
        let mut q = t.diag[0];
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let prod = t.sub[i - 1] * t.sup[i - 1];
            let mut d = t.diag[i] - prod / if q != 0.0 { q } else { f64::MIN_POSITIVE };
            if d == 0.0 {
                d = f64::MIN_POSITIVE;
            }
            if d < 0.0 {
                count += 1;
            }
            q = d;
        }
        count
    }

    /// Search interval containing the whole spectrum (Gershgorin on A,
    /// widened by the extremal row sums of B).
    fn spectrum_bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut bmin = f64::INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            let mut rb = 0.0;
            if i > 0 {
                r += self.a.sub[i - 1].abs();
                rb += self.b.sub[i - 1].abs();
            }
            if i + 1 < n {
                r += self.a.sup[i].abs();
                rb += self.b.sup[i].abs();
            }
            lo = lo.min(self.a.diag[i] - r);
            hi = hi.max(self.a.diag[i] + r);
            bmin = bmin.min(self.b.diag[i] - rb);
        }
        let scale = if bmin > 0.0 { bmin } else { 1.0 };
        let w = (hi - lo).abs().max(1.0);
        (lo / scale - 0.01 * w, hi / scale.min(1.0) + 0.01 * w)
    }

    /// The index-th eigenvalue (ascending, 0-based) by bisection.
    pub fn eigenvalue(&self, index: usize, tol: f64, budget: usize) -> Result<f64> {
        let (mut lo, mut hi) = self.spectrum_bounds();
        // widen until the counts bracket the target index
        let mut guard = 0;
        while self.count_below(lo) > index {
            lo -= (hi - lo).abs().max(1.0);
            guard += 1;
            if guard > 60 {
                return Err(Error::EigenNoConvergence { budget });
            }
        }
        guard = 0;
        while self.count_below(hi) < index + 1 {
            hi += (hi - lo).abs().max(1.0);
            guard += 1;
            if guard > 60 {
                return Err(Error::EigenNoConvergence { budget });
            }
        }
        for _ in 0..budget {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= tol.max(f64::EPSILON * mid.abs() * 4.0) {
                return Ok(0.5 * (lo + hi));
            }
        }
        Err(Error::EigenNoConvergence { budget })
    }

    /// Eigenvector by inverse iteration: solve (A - sigma B) y = B x.
    pub fn eigenvector(&self, lambda: f64, budget: usize) -> Result<Vec<f64>> {
        let n = self.len();
        // nudge the shift off the eigenvalue so the solves stay bounded
        let sigma = lambda + 1e-10 * (1.0 + lambda.abs());
        let solver = PivotedTridiagSolver::new(self.shifted(sigma));
        // deterministic pseudo-random start avoids accidental orthogonality
        let mut x: Vec<f64> = (0..n)
            .map(|i| {
                let s = (i as u64).wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) as f64 / (1u64 << 31) as f64) - 0.5
            })
            .collect();
        normalize_vec(&mut x);
        let mut bx = vec![0.0; n];
        let mut prev = x.clone();
        for _ in 0..budget {
            self.b.mul(&x, &mut bx);
            let y = solver.solve(&bx)?;
            x = y;
            normalize_vec(&mut x);
            let dot: f64 = x.iter().zip(&prev).map(|(a, b)| a * b).sum();
            if 1.0 - dot.abs() < 1e-14 {
                return Ok(x);
            }
            prev.copy_from_slice(&x);
        }
        // inverse iteration typically converges in 2-3 steps; reaching the
        // budget without the angle settling means the pair is wrong
        Err(Error::EigenNoConvergence { budget })
    }
}

fn normalize_vec(x: &mut [f64]) {
    let n: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}

/// LU factorization of a tridiagonal matrix with partial pivoting; pivoting
/// introduces a second superdiagonal (same layout as LAPACK's gttrf).
struct PivotedTridiagSolver {
    /// multipliers
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedTridiagSolver {
    fn new(t: Tridiag) -> Self {
        let n = t.len();
        let mut dl = t.sub.clone();
        let mut d = t.diag.clone();
        let mut du = t.sup.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                let piv = if d[i] != 0.0 { d[i] } else { f64::MIN_POSITIVE };
                let fact = dl[i] / piv;
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                swapped[i] = true;
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
            }
        }
        PivotedTridiagSolver {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = rhs.len();
        let mut b = rhs.to_vec();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.du[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= self.du2[i] * x[i + 2];
            }
            let piv = if self.d[i] != 0.0 {
                self.d[i]
            } else {
                f64::MIN_POSITIVE
            };
            x[i] = v / piv;
            if !x[i].is_finite() {
                return Err(Error::EigenNoConvergence { budget: 0 });
            }
        }
        Ok(x)
    }
}
