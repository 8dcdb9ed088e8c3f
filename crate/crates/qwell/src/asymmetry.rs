//! Adaptive quadrature, the left/right asymmetry quotient Q, and sup-norm
//! distances between potentials.

use crate::groundmap::{ClosedForm, GroundState, Potential};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Truncation window and tolerances for the improper integrals.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Integration truncated to [-L, L]; the split point is pinned at 0.
    pub half_width: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinements: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            half_width: 40.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_refinements: 60,
        }
    }
}

impl QuadratureConfig {
    pub fn for_half_width(half_width: f64) -> Self {
        QuadratureConfig {
            half_width,
            ..Default::default()
        }
    }

    /// Window wide enough for the given state.
    pub fn for_state(psi: &GroundState) -> Self {
        Self::for_half_width(psi.quad_half_width())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::BadQuadratureConfig(format!(
                "half_width {} rel_tol {} abs_tol {}",
                self.half_width, self.rel_tol, self.abs_tol
            )));
        }
        Ok(())
    }
}

struct Simpson<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    max_depth: u32,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        a: f64,
        fa: f64,
        m: f64,
        fm: f64,
        b: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> std::result::Result<f64, f64> {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // second clause: the split is already at round-off level, so further
        // refinement cannot improve the estimate
        if delta.abs() <= 15.0 * tol
            || delta.abs() <= f64::EPSILON * (left.abs() + right.abs())
        {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= self.max_depth {
            return Err(delta.abs() / 15.0);
        }
        let l = self.refine(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1);
        let r = self.refine(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
        match (l, r) {
            (Ok(x), Ok(y)) => Ok(x + y),
            (Err(e), Ok(_)) | (Ok(_), Err(e)) => Err(e),
            (Err(e), Err(e2)) => Err(e + e2),
        }
    }
}

/// Adaptive Simpson integration of f over [a, b].
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = cfg.abs_tol.max(cfg.rel_tol * whole.abs());
    let s = Simpson {
        f: &f,
        max_depth: cfg.max_refinements,
    };
    s.refine(a, fa, m, fm, b, fb, whole, tol, 0)
        .map_err(|achieved| Error::QuadratureNoConvergence { a, b, achieved })
}

/// The quotient, or an honest saturation marker when the denominator mass
/// underflows the absolute tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QValue {
    Finite(f64),
    /// Q exceeds this bound but cannot be quoted as a number.
    ExceedsBound(f64),
}

impl QValue {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            QValue::Finite(q) => Some(q),
            QValue::ExceedsBound(_) => None,
        }
    }
}

/// Half-line masses and their quotient Q = right/left.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AsymmetryReport {
    pub mass_right: f64,
    pub mass_left: f64,
    pub q: QValue,
    pub tail_bound: f64,
}

/// Q[psi] = integral of psi^2 over (0, inf) divided by the same over
/// (-inf, 0), with both improper integrals truncated at the config window.
pub fn q_quotient(psi: &GroundState, cfg: &QuadratureConfig) -> Result<AsymmetryReport> {
    cfg.validate()?;
    let l = cfg.half_width;
    let density = |x: f64| {
        let v = psi.eval(x).value;
        v * v
    };
    // decay-rate bound on the discarded tails
    let rate = 2.0 * psi.expr().decay_rate();
    let edge = density(l) + density(-l);
    let tail_bound = if rate > 0.0 { edge / rate } else { f64::INFINITY };
    if !(tail_bound < cfg.abs_tol) {
        return Err(Error::TailBoundTooLarge {
            half_width: l,
            bound: tail_bound,
        });
    }
    let mass_right = integrate_adaptive(density, 0.0, l, cfg)?;
    let mass_left = integrate_adaptive(density, -l, 0.0, cfg)?;
    let q = if mass_left < cfg.abs_tol {
        QValue::ExceedsBound(1.0 / cfg.abs_tol)
    } else {
        QValue::Finite(mass_right / mass_left)
    };
    Ok(AsymmetryReport {
        mass_right,
        mass_left,
        q,
        tail_bound,
    })
}

/// Exact Q for the sech double-well family; independent of the overall
/// dilation k.
pub fn q_closed_form_sech(k: f64, d: f64, alpha: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::BadParameter {
            name: "k",
            value: k,
        });
    }
    if !(d > 0.0) {
        return Err(Error::BadParameter {
            name: "D",
            value: d,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let b = 1.0 - alpha;
    let cross = 2.0 * alpha * b * d / d.sinh();
    let num = alpha * alpha * d.exp() + b * b * (-d).exp() + cross;
    let den = alpha * alpha * (-d).exp() + b * b * d.exp() + cross;
    Ok(num / den)
}

/// The alpha -> 1 limit of Q(alpha)/Q(1-alpha) at separation D.
pub fn q_ratio_limit(d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::BadParameter {
            name: "D",
            value: d,
        });
    }
    Ok((4.0 * d).exp())
}

/// Grid sup-norm estimate of |Va - Vb|.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SupDistanceReport {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub sup_estimate: f64,
    pub arg_max: f64,
}

/// Default sup-norm grid for a pair of potentials: 8001 points over
/// [-W, W] with W = max(40, 3 D / k) read off the closed-form tags.
pub fn default_sup_grid(va: &Potential, vb: &Potential) -> (f64, f64, usize) {
    let mut w = 40.0f64;
    for v in [va, vb] {
        if let Some(ClosedForm::SechFamily { k, d, .. }) = v.closed_form() {
            w = w.max(3.0 * d / k);
        }
    }
    (-w, w, 8001)
}

/// Max of |Va - Vb| over a uniform grid, with one 10x refinement pass
/// around the coarse argmax.
pub fn sup_distance(
    va: &Potential,
    vb: &Potential,
    x_min: f64,
    x_max: f64,
    n: usize,
) -> Result<SupDistanceReport> {
    if !(x_min < x_max) || n < 2 {
        return Err(Error::BadGrid);
    }
    let h = (x_max - x_min) / (n - 1) as f64;
    let diff = |x: f64| -> Result<f64> { Ok((va.eval(x)? - vb.eval(x)?).abs()) };
    let mut sup = 0.0f64;
    let mut arg = x_min;
    for i in 0..n {
        let x = x_min + i as f64 * h;
        let d = diff(x)?;
        if d > sup {
            sup = d;
            arg = x;
        }
    }
    // local refinement at 10x resolution
    let lo = (arg - h).max(x_min);
    let hi = (arg + h).min(x_max);
    let m = 20usize;
    for i in 0..=m {
        let x = lo + (hi - lo) * i as f64 / m as f64;
        let d = diff(x)?;
        if d > sup {
            sup = d;
            arg = x;
        }
    }
    Ok(SupDistanceReport {
        x_min,
        x_max,
        n,
        sup_estimate: sup,
        arg_max: arg,
    })
}
