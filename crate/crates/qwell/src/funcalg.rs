//! Closed-form algebra of twice-differentiable functions.
//!
//! Every primitive carries hand-derived first and second derivatives, and the
//! algebra is closed under linear combination, shift and dilation, so that
//! `psi''/psi` never touches numerical differentiation.

use crate::{Error, Result};

/// Largest |u| at which sech is evaluated before saturating to exact zero.
const SECH_CUTOFF: f64 = 350.0;

/// Registered closed-form primitives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimitiveKind {
    /// sech(x)
    Sech,
    /// exp(-x^2/2)
    Gaussian,
    /// e^{-x/2} sech(x), the ground eigensolution of the hyperbolic
    /// Rosen-Morse potential 5/4 - 2 sech^2 x + tanh x.
    RosenMorseNu,
    /// 1/(1+e^{-x}), a strictly (0,1) weight for decompositions.
    Logistic,
    /// Constant 1; only meaningful as a decomposition weight.
    Const,
}

/// Overflow-safe sech and tanh at the same point.
pub fn sech_tanh(u: f64) -> (f64, f64) {
    let a = u.abs();
    if a > SECH_CUTOFF {
        return (0.0, u.signum());
    }
    let t = (-a).exp();
    let t2 = t * t;
    let sech = 2.0 * t / (1.0 + t2);
    let tanh = u.signum() * (1.0 - t2) / (1.0 + t2);
    (sech, tanh)
}

/// log(sech u), finite for all u (about -|u| + log 2 in the tails).
pub fn ln_sech(u: f64) -> f64 {
    let a = u.abs();
    std::f64::consts::LN_2 - a - (-2.0 * a).exp().ln_1p()
}

impl PrimitiveKind {
    /// Value and first two derivatives at u.
    pub fn eval(self, u: f64) -> (f64, f64, f64) {
        match self {
            PrimitiveKind::Sech => {
                let (s, t) = sech_tanh(u);
                // s' = -s t,  s'' = s (1 - 2 s^2)
                (s, -s * t, s * (1.0 - 2.0 * s * s))
            }
            PrimitiveKind::Gaussian => {
                let g = (-0.5 * u * u).exp();
                (g, -u * g, (u * u - 1.0) * g)
            }
            PrimitiveKind::RosenMorseNu => {
                // nu = e^{-u/2} sech u, evaluated in a form that never
                // exponentiates a large positive argument.
                let (s, t) = sech_tanh(u);
                let v = if u >= 0.0 {
                    2.0 * (-1.5 * u).exp() / (1.0 + (-2.0 * u).exp())
                } else {
                    2.0 * (0.5 * u).exp() / (1.0 + (2.0 * u).exp())
                };
                // nu'/nu = -1/2 - tanh,  nu''/nu = (1/2 + tanh)^2 - sech^2
                let d1 = v * (-0.5 - t);
                let d2 = v * ((0.5 + t) * (0.5 + t) - s * s);
                (v, d1, d2)
            }
            PrimitiveKind::Logistic => {
                let l = if u >= 0.0 {
                    1.0 / (1.0 + (-u).exp())
                } else {
                    let e = u.exp();
                    e / (1.0 + e)
                };
                let d1 = l * (1.0 - l);
                (l, d1, d1 * (1.0 - 2.0 * l))
            }
            PrimitiveKind::Const => (1.0, 0.0, 0.0),
        }
    }

    /// Half-width beyond which the primitive is numerically negligible,
    /// or infinity when it does not decay.
    fn decay_span(self) -> f64 {
        match self {
            PrimitiveKind::Sech => 45.0,
            PrimitiveKind::Gaussian => 12.0,
            PrimitiveKind::RosenMorseNu => 90.0,
            PrimitiveKind::Logistic | PrimitiveKind::Const => f64::INFINITY,
        }
    }

    /// Exponential decay rate of the primitive itself (not its square).
    fn decay_rate(self) -> f64 {
        match self {
            PrimitiveKind::Sech => 1.0,
            PrimitiveKind::Gaussian => 1.0,
            PrimitiveKind::RosenMorseNu => 0.5,
            PrimitiveKind::Logistic | PrimitiveKind::Const => 0.0,
        }
    }
}

/// One affinely transformed primitive: coeff * prim(scale * x + shift).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub prim: PrimitiveKind,
    pub scale: f64,
    pub shift: f64,
}

impl Term {
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let u = self.scale * x + self.shift;
        let (v, d1, d2) = self.prim.eval(u);
        (
            self.coeff * v,
            self.coeff * self.scale * d1,
            self.coeff * self.scale * self.scale * d2,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    /// Flat linear combination of primitive terms.
    Terms(Vec<Term>),
    /// Pointwise product, used for the 2f*Phi decomposition weights.
    Product {
        weight: Box<FunctionExpr>,
        base: Box<FunctionExpr>,
    },
    /// Linear combination of sub-expressions that cannot be flattened.
    Mix(Vec<(f64, FunctionExpr)>),
}

/// A closed-form twice-differentiable function.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionExpr {
    node: Node,
}

/// Exact value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C2Sample {
    pub x: f64,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl FunctionExpr {
    /// A bare primitive, prim(x).
    pub fn primitive(prim: PrimitiveKind) -> Self {
        FunctionExpr {
            node: Node::Terms(vec![Term {
                coeff: 1.0,
                prim,
                scale: 1.0,
                shift: 0.0,
            }]),
        }
    }

    /// The constant function c.
    pub fn constant(c: f64) -> Self {
        FunctionExpr {
            node: Node::Terms(vec![Term {
                coeff: c,
                prim: PrimitiveKind::Const,
                scale: 1.0,
                shift: 0.0,
            }]),
        }
    }

    /// coeff * prim(scale*x + shift); rejects non-positive scale.
    pub fn term(coeff: f64, prim: PrimitiveKind, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::NonPositiveScale(scale));
        }
        Ok(FunctionExpr {
            node: Node::Terms(vec![Term {
                coeff,
                prim,
                scale,
                shift,
            }]),
        })
    }

    /// Pointwise product weight * base, differentiated by the Leibniz rule.
    pub fn product(weight: FunctionExpr, base: FunctionExpr) -> Self {
        FunctionExpr {
            node: Node::Product {
                weight: Box::new(weight),
                base: Box::new(base),
            },
        }
    }

    /// Exact (f, f', f'') at x.
    pub fn eval(&self, x: f64) -> C2Sample {
        let (value, d1, d2) = self.eval_raw(x);
        C2Sample { x, value, d1, d2 }
    }

    fn eval_raw(&self, x: f64) -> (f64, f64, f64) {
        match &self.node {
            Node::Terms(terms) => {
                let mut acc = (0.0, 0.0, 0.0);
                for t in terms {
                    let (v, d1, d2) = t.eval(x);
                    acc.0 += v;
                    acc.1 += d1;
                    acc.2 += d2;
                }
                acc
            }
            Node::Product { weight, base } => {
                let (w, w1, w2) = weight.eval_raw(x);
                let (b, b1, b2) = base.eval_raw(x);
                (w * b, w1 * b + w * b1, w2 * b + 2.0 * w1 * b1 + w * b2)
            }
            Node::Mix(parts) => {
                let mut acc = (0.0, 0.0, 0.0);
                for (c, e) in parts {
                    let (v, d1, d2) = e.eval_raw(x);
                    acc.0 += c * v;
                    acc.1 += c * d1;
                    acc.2 += c * d2;
                }
                acc
            }
        }
    }

    /// a*f + b*g; term lists are concatenated with coefficients folded
    /// whenever both sides are flat.
    pub fn combine(a: f64, f: &FunctionExpr, b: f64, g: &FunctionExpr) -> FunctionExpr {
        match (&f.node, &g.node) {
            (Node::Terms(tf), Node::Terms(tg)) => {
                let mut terms: Vec<Term> = Vec::with_capacity(tf.len() + tg.len());
                terms.extend(tf.iter().map(|t| Term {
                    coeff: a * t.coeff,
                    ..*t
                }));
                terms.extend(tg.iter().map(|t| Term {
                    coeff: b * t.coeff,
                    ..*t
                }));
                FunctionExpr {
                    node: Node::Terms(terms),
                }
            }
            _ => FunctionExpr {
                node: Node::Mix(vec![(a, f.clone()), (b, g.clone())]),
            },
        }
    }

    /// f(x + c).
    pub fn shift(&self, c: f64) -> FunctionExpr {
        self.map_affine(1.0, c)
    }

    /// f(k x); rejects k <= 0.
    pub fn dilate(&self, k: f64) -> Result<FunctionExpr> {
        if !(k > 0.0) {
            return Err(Error::NonPositiveScale(k));
        }
        Ok(self.map_affine(k, 0.0))
    }

    /// f(k x + c) folded into the term parameters.
    fn map_affine(&self, k: f64, c: f64) -> FunctionExpr {
        let node = match &self.node {
            Node::Terms(terms) => Node::Terms(
                terms
                    .iter()
                    .map(|t| Term {
                        scale: t.scale * k,
                        shift: t.shift + t.scale * c,
                        ..*t
                    })
                    .collect(),
            ),
            Node::Product { weight, base } => Node::Product {
                weight: Box::new(weight.map_affine(k, c)),
                base: Box::new(base.map_affine(k, c)),
            },
            Node::Mix(parts) => Node::Mix(
                parts
                    .iter()
                    .map(|(w, e)| (*w, e.map_affine(k, c)))
                    .collect(),
            ),
        };
        FunctionExpr { node }
    }

    /// a * f.
    pub fn scaled(&self, a: f64) -> FunctionExpr {
        let node = match &self.node {
            Node::Terms(terms) => Node::Terms(
                terms
                    .iter()
                    .map(|t| Term {
                        coeff: a * t.coeff,
                        ..*t
                    })
                    .collect(),
            ),
            _ => Node::Mix(vec![(a, self.clone())]),
        };
        FunctionExpr { node }
    }

    /// Half-width of the window outside which the function is negligible;
    /// infinity for non-decaying expressions.
    pub fn support_half_width(&self) -> f64 {
        match &self.node {
            Node::Terms(terms) => terms
                .iter()
                .map(|t| (t.prim.decay_span() + t.shift.abs()) / t.scale)
                .fold(0.0, f64::max),
            Node::Product { weight, base } => weight
                .support_half_width()
                .min(base.support_half_width()),
            Node::Mix(parts) => parts
                .iter()
                .map(|(_, e)| e.support_half_width())
                .fold(0.0, f64::max),
        }
    }

    /// Slowest exponential decay rate among the decaying components; zero if
    /// the expression contains a non-decaying standalone term.
    pub fn decay_rate(&self) -> f64 {
        match &self.node {
            Node::Terms(terms) => terms
                .iter()
                .map(|t| t.scale * t.prim.decay_rate())
                .fold(f64::INFINITY, f64::min),
            // A bounded weight does not change the decay of the base.
            Node::Product { base, .. } => base.decay_rate(),
            Node::Mix(parts) => parts
                .iter()
                .map(|(_, e)| e.decay_rate())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// The flat term list, when the expression is a plain linear combination.
    pub fn terms(&self) -> Option<&[Term]> {
        match &self.node {
            Node::Terms(t) => Some(t),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sech_expr() -> FunctionExpr {
        FunctionExpr::primitive(PrimitiveKind::Sech)
    }

    #[test]
    fn sech_at_origin() {
        let s = sech_expr().eval(0.0);
        assert_eq!(s.value, 1.0);
        assert_eq!(s.d1, 0.0);
        assert!((s.d2 + 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_at_origin() {
        let s = FunctionExpr::primitive(PrimitiveKind::Gaussian).eval(0.0);
        assert_eq!((s.value, s.d1, s.d2), (1.0, 0.0, -1.0));
    }

    #[test]
    fn dilated_sech_chain_rule_at_origin() {
        let f = FunctionExpr::term(1.0, PrimitiveKind::Sech, 2.0, 0.0).unwrap();
        let s = f.eval(0.0);
        assert!((s.d2 + 4.0).abs() < 1e-14);
    }

    #[test]
    fn combine_identity_and_idempotence() {
        let f = sech_expr();
        let g = FunctionExpr::primitive(PrimitiveKind::Gaussian);
        let id = FunctionExpr::combine(1.0, &f, 0.0, &g);
        let half = FunctionExpr::combine(0.5, &f, 0.5, &f);
        for &x in &[-3.0, -0.7, 0.0, 1.3, 8.0] {
            let a = f.eval(x);
            assert!((id.eval(x).value - a.value).abs() < 1e-15);
            assert!((half.eval(x).value - a.value).abs() < 1e-15);
        }
    }

    #[test]
    fn convex_sech_pair_value_at_origin() {
        // alpha sech(x - 3) + (1 - alpha) sech(x + 3) at x = 0 is sech 3.
        let right = sech_expr().shift(-3.0);
        let left = sech_expr().shift(3.0);
        let f = FunctionExpr::combine(0.1, &right, 0.9, &left);
        assert!((f.eval(0.0).value - 0.099_327_927_419_433_2).abs() < 1e-15);
    }

    #[test]
    fn shift_and_dilate_identities() {
        let f = sech_expr();
        assert_eq!(f.shift(0.0), f);
        assert_eq!(f.dilate(1.0).unwrap(), f);
        assert!(f.dilate(0.0).is_err());
        assert!(f.dilate(-2.0).is_err());
        // peak relocation: dilate(shift(sech, -D), k) at x = D/k is 1
        let d = 3.0;
        let k = 0.7;
        let g = f.shift(-d).dilate(k).unwrap();
        assert!((g.eval(d / k).value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sech_saturates_instead_of_nan() {
        let s = sech_expr().eval(1.0e4);
        assert_eq!((s.value, s.d1, s.d2), (0.0, 0.0, 0.0));
        let nu = FunctionExpr::primitive(PrimitiveKind::RosenMorseNu).eval(-1.0e4);
        assert!(nu.value.is_finite() && nu.d2.is_finite());
    }

    #[test]
    fn product_leibniz_matches_expansion() {
        // (2 logistic) * sech versus finite differences
        let w = FunctionExpr::primitive(PrimitiveKind::Logistic).scaled(2.0);
        let p = FunctionExpr::product(w, sech_expr());
        let h = 1e-5;
        for &x in &[-4.0, -1.0, 0.0, 0.5, 3.0] {
            let s = p.eval(x);
            let fd1 = (p.eval(x + h).value - p.eval(x - h).value) / (2.0 * h);
            let fd2 = (p.eval(x + h).value - 2.0 * s.value + p.eval(x - h).value) / (h * h);
            assert!((s.d1 - fd1).abs() < 1e-8 * (1.0 + fd1.abs()));
            assert!((s.d2 - fd2).abs() < 1e-5 * (1.0 + fd2.abs()));
        }
    }

    fn any_primitive() -> impl Strategy<Value = PrimitiveKind> {
        prop_oneof![
            Just(PrimitiveKind::Sech),
            Just(PrimitiveKind::Gaussian),
            Just(PrimitiveKind::RosenMorseNu),
            Just(PrimitiveKind::Logistic),
        ]
    }

    proptest! {
        #[test]
        fn linearity_of_combine(
            a in -5.0f64..5.0,
            b in -5.0f64..5.0,
            x in -10.0f64..10.0,
        ) {
            let f = sech_expr();
            let g = FunctionExpr::primitive(PrimitiveKind::Gaussian);
            let c = FunctionExpr::combine(a, &f, b, &g);
            let (sf, sg, sc) = (f.eval(x), g.eval(x), c.eval(x));
            let scale = 1.0 + sc.value.abs() + sc.d1.abs() + sc.d2.abs();
            prop_assert!((sc.value - (a * sf.value + b * sg.value)).abs() < 1e-14 * scale);
            prop_assert!((sc.d1 - (a * sf.d1 + b * sg.d1)).abs() < 1e-14 * scale);
            prop_assert!((sc.d2 - (a * sf.d2 + b * sg.d2)).abs() < 1e-14 * scale);
        }

        #[test]
        fn derivatives_match_finite_differences(
            prim in any_primitive(),
            x in -10.0f64..10.0,
        ) {
            let f = FunctionExpr::primitive(prim);
            let h = 1e-5;
            let s = f.eval(x);
            let fp = f.eval(x + h).value;
            let fm = f.eval(x - h).value;
            let fd1 = (fp - fm) / (2.0 * h);
            let fd2 = (fp - 2.0 * s.value + fm) / (h * h);
            prop_assert!((s.d1 - fd1).abs() <= 1e-6 * (1.0 + fd1.abs()));
            prop_assert!((s.d2 - fd2).abs() <= 1e-4 * (1.0 + fd2.abs()));
        }

        #[test]
        fn dilation_chain_rule(
            prim in any_primitive(),
            k in 0.1f64..10.0,
            x in -5.0f64..5.0,
        ) {
            let f = FunctionExpr::primitive(prim);
            let g = f.dilate(k).unwrap();
            let d2_direct = g.eval(x).d2;
            let d2_chain = k * k * f.eval(k * x).d2;
            prop_assert!((d2_direct - d2_chain).abs() <= 1e-13 * (1.0 + d2_chain.abs()));
        }
    }
}
