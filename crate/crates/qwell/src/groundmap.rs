//! The mapping from a positive square-integrable state to its zero-energy
//! potential `V = psi''/psi`, convex families, decompositions, normalization
//! and the scaling transform.

use crate::asymmetry::{integrate_adaptive, QuadratureConfig};
use crate::funcalg::{ln_sech, sech_tanh, FunctionExpr, PrimitiveKind, Term};
use crate::{Error, Result};
use std::sync::OnceLock;

/// Validation grid: 4001 uniform points on [-40, 40].
pub const VALIDATION_HALF_WIDTH: f64 = 40.0;
pub const VALIDATION_POINTS: usize = 4001;

/// Below this magnitude the generic `d2/value` potential evaluation is
/// considered exhausted; closed forms must take over.
const PSI_FLOOR: f64 = 1e-280;

fn validation_grid() -> impl Iterator<Item = f64> {
    let n = VALIDATION_POINTS;
    let h = 2.0 * VALIDATION_HALF_WIDTH / (n - 1) as f64;
    (0..n).map(move |i| -VALIDATION_HALF_WIDTH + i as f64 * h)
}

/// A validated positive, square-integrable state.
#[derive(Debug)]
pub struct GroundState {
    expr: FunctionExpr,
    normalized: bool,
    norm_sq: OnceLock<f64>,
}

impl Clone for GroundState {
    fn clone(&self) -> Self {
        GroundState {
            expr: self.expr.clone(),
            normalized: self.normalized,
            norm_sq: self.norm_sq.clone(),
        }
    }
}

impl GroundState {
    /// Validates positivity on the standard grid and decay of the tails.
    pub fn new(expr: FunctionExpr) -> Result<Self> {
        let hw = expr.support_half_width();
        if !hw.is_finite() {
            return Err(Error::NotSquareIntegrable);
        }
        // positivity is checked where the state is representable; past its
        // own decay span fast states underflow to an exact 0
        let w = hw.min(VALIDATION_HALF_WIDTH);
        let h = 2.0 * w / (VALIDATION_POINTS - 1) as f64;
        for i in 0..VALIDATION_POINTS {
            let x = -w + i as f64 * h;
            let v = expr.eval(x).value;
            if !(v > 0.0) {
                return Err(Error::NotPositive { x, value: v });
            }
        }
        // tail check: the state must be negligible at the window edge
        let edge = expr.eval(hw).value.abs().max(expr.eval(-hw).value.abs());
        if edge > 1e-9 {
            return Err(Error::NotSquareIntegrable);
        }
        Ok(GroundState {
            expr,
            normalized: false,
            norm_sq: OnceLock::new(),
        })
    }

    pub fn expr(&self) -> &FunctionExpr {
        &self.expr
    }

    pub fn eval(&self, x: f64) -> crate::funcalg::C2Sample {
        self.expr.eval(x)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Integration window that covers the decay of this state.
    pub fn quad_half_width(&self) -> f64 {
        self.expr.support_half_width().max(40.0)
    }

    /// The squared L2 norm, computed once by adaptive quadrature.
    pub fn norm_sq(&self) -> Result<f64> {
        if let Some(v) = self.norm_sq.get() {
            return Ok(*v);
        }
        let cfg = QuadratureConfig::for_half_width(self.quad_half_width());
        let l = cfg.half_width;
        let v = integrate_adaptive(
            |x| {
                let p = self.expr.eval(x).value;
                p * p
            },
            -l,
            l,
            &cfg,
        )?;
        let _ = self.norm_sq.set(v);
        Ok(v)
    }
}

/// Closed-form tags for potential evaluation away from the generic path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// psi = sech(k x + c): V = k^2 (1 - 2 sech^2(k x + c)).
    Soliton { k: f64, shift: f64 },
    /// psi = alpha sech(kx - d) + (1-alpha) sech(kx + d).
    SechFamily { k: f64, d: f64, alpha: f64 },
    /// psi = e^{-(kx+c)/2} sech(kx + c): V = k^2 (5/4 - 2 sech^2 + tanh).
    RosenMorse { k: f64, shift: f64 },
}

impl ClosedForm {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            ClosedForm::Soliton { k, shift } => {
                let (s, _) = sech_tanh(k * x + shift);
                k * k * (1.0 - 2.0 * s * s)
            }
            ClosedForm::RosenMorse { k, shift } => {
                let (s, t) = sech_tanh(k * x + shift);
                k * k * (1.25 - 2.0 * s * s + t)
            }
            ClosedForm::SechFamily { k, d, alpha } => {
                // V = k^2 - 2 k^2 (a s1^3 + b s2^3)/(a s1 + b s2), computed in
                // log space so the far tails stay finite.
                let b = 1.0 - alpha;
                let w1 = ln_sech(k * x - d);
                let w2 = ln_sech(k * x + d);
                let wm = w1.max(w2);
                let e1 = (w1 - wm).exp();
                let e2 = (w2 - wm).exp();
                let num = alpha * e1 * e1 * e1 + b * e2 * e2 * e2;
                let den = alpha * e1 + b * e2;
                let ratio = (2.0 * wm).exp() * num / den;
                k * k * (1.0 - 2.0 * ratio)
            }
        }
    }

    fn scale(&self, k: f64) -> ClosedForm {
        match *self {
            ClosedForm::Soliton { k: k0, shift } => ClosedForm::Soliton { k: k0 * k, shift },
            ClosedForm::RosenMorse { k: k0, shift } => ClosedForm::RosenMorse { k: k0 * k, shift },
            ClosedForm::SechFamily { k: k0, d, alpha } => ClosedForm::SechFamily {
                k: k0 * k,
                d,
                alpha,
            },
        }
    }
}

/// A potential with ground energy zero, induced by its source state.
#[derive(Debug, Clone)]
pub struct Potential {
    source: GroundState,
    closed_form: Option<ClosedForm>,
}

impl Potential {
    pub fn source(&self) -> &GroundState {
        &self.source
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed_form
    }

    /// V(x), through the closed form when one is tagged.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.closed_form {
            Some(cf) => Ok(cf.eval(x)),
            None => self.eval_generic(x),
        }
    }

    /// V(x) = psi''(x)/psi(x), never consulting a closed form.
    pub fn eval_generic(&self, x: f64) -> Result<f64> {
        let s = self.source.eval(x);
        if s.value.abs() < PSI_FLOOR {
            return Err(Error::DomainExhausted { x });
        }
        Ok(s.d2 / s.value)
    }
}

/// Recognize expressions with a known closed-form potential.
fn detect_closed_form(expr: &FunctionExpr) -> Option<ClosedForm> {
    let terms: &[Term] = expr.terms()?;
    match terms {
        [t] if t.prim == PrimitiveKind::Sech && t.coeff > 0.0 => Some(ClosedForm::Soliton {
            k: t.scale,
            shift: t.shift,
        }),
        [t] if t.prim == PrimitiveKind::RosenMorseNu && t.coeff > 0.0 => {
            Some(ClosedForm::RosenMorse {
                k: t.scale,
                shift: t.shift,
            })
        }
        [a, b]
            if a.prim == PrimitiveKind::Sech
                && b.prim == PrimitiveKind::Sech
                && a.coeff > 0.0
                && b.coeff > 0.0
                && a.scale == b.scale
                && a.shift == -b.shift
                && a.shift != 0.0 =>
        {
            // order so that `right` is the negative-shift (right well) term
            let (right, left) = if a.shift < 0.0 { (a, b) } else { (b, a) };
            Some(ClosedForm::SechFamily {
                k: right.scale,
                d: -right.shift,
                alpha: right.coeff / (right.coeff + left.coeff),
            })
        }
        _ => None,
    }
}

/// The mapping psi -> psi''/psi.
pub fn to_potential(psi: &GroundState) -> Potential {
    Potential {
        closed_form: detect_closed_form(psi.expr()),
        source: psi.clone(),
    }
}

/// Parameters of one convex-family member.
#[derive(Debug, Clone)]
pub struct ConvexFamilySpec {
    pub psi0: GroundState,
    pub psi1: GroundState,
    pub alpha: f64,
    pub separation: f64,
    pub scale: f64,
}

impl ConvexFamilySpec {
    pub fn new(
        psi0: GroundState,
        psi1: GroundState,
        alpha: f64,
        separation: f64,
        scale: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if !(separation >= 0.0) {
            return Err(Error::NegativeSeparation(separation));
        }
        if !(scale > 0.0) {
            return Err(Error::NonPositiveScale(scale));
        }
        Ok(ConvexFamilySpec {
            psi0,
            psi1,
            alpha,
            separation,
            scale,
        })
    }
}

/// alpha * psi1(x - X) + (1 - alpha) * psi0(x + X), dilated by k.
pub fn convex_state(spec: &ConvexFamilySpec) -> Result<GroundState> {
    let right = spec.psi1.expr().shift(-spec.separation);
    let left = spec.psi0.expr().shift(spec.separation);
    let mix = FunctionExpr::combine(spec.alpha, &right, 1.0 - spec.alpha, &left);
    GroundState::new(mix.dilate(spec.scale)?)
}

/// The potential of the family member; identical to
/// `to_potential(convex_state(spec))` pointwise.
pub fn convex_potential(spec: &ConvexFamilySpec) -> Result<Potential> {
    Ok(to_potential(&convex_state(spec)?))
}

/// Split Phi into phi0 = 2 f Phi and phi1 = 2 (1 - f) Phi for a weight f
/// strictly inside (0, 1).
pub fn decompose(phi: &GroundState, f: &FunctionExpr) -> Result<(GroundState, GroundState)> {
    for x in validation_grid() {
        let v = f.eval(x).value;
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::WeightOutOfRange { x, value: v });
        }
    }
    let one = FunctionExpr::constant(1.0);
    let w0 = f.scaled(2.0);
    let w1 = FunctionExpr::combine(2.0, &one, -2.0, f);
    let phi0 = GroundState::new(FunctionExpr::product(w0, phi.expr().clone()))?;
    let phi1 = GroundState::new(FunctionExpr::product(w1, phi.expr().clone()))?;
    Ok((phi0, phi1))
}

/// sqrt(k) * Psi(k x); preserves the L2 norm for every k > 0.
pub fn scale_state(psi: &GroundState, k: f64) -> Result<GroundState> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveScale(k));
    }
    let expr = psi.expr().dilate(k)?.scaled(k.sqrt());
    let out = GroundState {
        expr,
        normalized: psi.normalized,
        norm_sq: psi.norm_sq.clone(),
    };
    Ok(out)
}

/// V_[k](x) = k^2 V(k x).
pub fn scale_potential(v: &Potential, k: f64) -> Result<Potential> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveScale(k));
    }
    Ok(Potential {
        source: scale_state(&v.source, k)?,
        closed_form: v.closed_form.map(|cf| cf.scale(k)),
    })
}

/// Rescale to unit L2 norm; idempotent.
pub fn normalize(psi: &GroundState) -> Result<GroundState> {
    if psi.normalized {
        return Ok(psi.clone());
    }
    let n2 = psi.norm_sq()?;
    if !(n2.is_finite() && n2 > 0.0) {
        return Err(Error::NotSquareIntegrable);
    }
    let expr = psi.expr.scaled(1.0 / n2.sqrt());
    let out = GroundState {
        expr,
        normalized: true,
        norm_sq: OnceLock::new(),
    };
    let _ = out.norm_sq.set(1.0);
    Ok(out)
}
