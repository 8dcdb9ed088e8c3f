//! Constructive certification that a sup-norm-epsilon perturbation of a
//! double-well potential can change the ground state's left/right probability
//! ratio by more than any requested factor M.

use crate::asymmetry::{
    integrate_adaptive, q_quotient, sup_distance, QuadratureConfig, SupDistanceReport,
};
use crate::groundmap::{
    convex_state, normalize, scale_potential, scale_state, to_potential, ConvexFamilySpec,
    GroundState,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Separation search is abandoned beyond this point.
const SEPARATION_CAP: f64 = 1e4;

/// Constants of the M-dependent family construction, plus the sech-family
/// shortcut separation D_M.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConstructionConstants {
    pub m: f64,
    pub a_m: f64,
    pub b_m: f64,
    pub delta_m: f64,
    pub alpha_m: f64,
    pub d_m: f64,
}

/// a_M, b_M, delta_M, alpha_M and D_M = ln(M+1)/4 for a given M > 0.
///
/// alpha_M solves (1 - d^2) a^2 / ((1-a)^2 + d^2 + 2d) = M + 1 at d = delta_M;
/// the residual of that identity is checked before returning.
pub fn construction_constants(m: f64) -> Result<ConstructionConstants> {
    if !(m > 0.0) {
        return Err(Error::BadParameter {
            name: "M",
            value: m,
        });
    }
    let r = m / (m + 4.0);
    let a_m = r * ((r * r + 1.0).sqrt() - 1.0);
    let b_m = (m + 1.0) / (m + 2.0)
        * (((m + 2.0) * m / ((m + 1.0) * (m + 1.0) * (m + 1.0)) + 1.0).sqrt() - 1.0);
    let delta_m = a_m * b_m / (1.0 + a_m + b_m);
    let d = delta_m;
    let disc = (m + 1.0) * (m + 1.0) - (m + 1.0) * (m + d * d) * (1.0 + d) * (1.0 + d);
    if disc < 0.0 {
        return Err(Error::ConstantsInvariant {
            m,
            detail: format!("negative discriminant {disc}"),
        });
    }
    let alpha_m = (m + 1.0 - disc.sqrt()) / (m + d * d);
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::ConstantsInvariant {
            m,
            detail: format!("delta_M = {d} outside (0,1)"),
        });
    }
    if !(alpha_m > 0.0 && alpha_m < 1.0) {
        return Err(Error::ConstantsInvariant {
            m,
            detail: format!("alpha_M = {alpha_m} outside (0,1)"),
        });
    }
    let residual = ((1.0 - d * d) * alpha_m * alpha_m
        / ((1.0 - alpha_m) * (1.0 - alpha_m) + d * d + 2.0 * d)
        - (m + 1.0))
        .abs();
    if residual >= 1e-9 * (1.0 + m) {
        return Err(Error::ConstantsInvariant {
            m,
            detail: format!("quadratic residual {residual:e}"),
        });
    }
    Ok(ConstructionConstants {
        m,
        a_m,
        b_m,
        delta_m,
        alpha_m,
        d_m: 0.25 * (m + 1.0).ln(),
    })
}

/// Outcome of the well-separation search.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeparationResult {
    pub delta: f64,
    pub x_delta: f64,
    /// mass of the shifted right-well state phi1(x - X) left of the origin
    pub left_tail_of_right_well: f64,
    /// mass of the shifted left-well state phi0(x + X) right of the origin
    pub right_tail_of_left_well: f64,
}

fn half_line_tail(phi: &GroundState, from: f64) -> Result<f64> {
    // mass of phi^2 on [from, infinity), truncated at the decay window
    let hw = phi.quad_half_width();
    let hi = (from + 2.0 * hw).max(hw);
    let cfg = QuadratureConfig::for_half_width(hi);
    integrate_adaptive(
        |x| {
            let v = phi.eval(x).value;
            v * v
        },
        from,
        hi,
        &cfg,
    )
}

fn tails_at(phi0: &GroundState, phi1: &GroundState, x: f64) -> Result<(f64, f64)> {
    // int_0^inf phi0(x + X)^2 = int_X^inf phi0^2, and mirrored for phi1
    let right_of_left = half_line_tail(phi0, x)?;
    // int_{-inf}^0 phi1(x - X)^2 equals the mass of phi1^2 over (-inf, -X]
    let hw = phi1.quad_half_width();
    let lo = (-x - 2.0 * hw).min(-hw);
    let cfg = QuadratureConfig::for_half_width(-lo);
    let left_of_right = integrate_adaptive(
        |u| {
            let v = phi1.eval(u).value;
            v * v
        },
        lo,
        -x,
        &cfg,
    )?;
    Ok((right_of_left, left_of_right))
}

/// Smallest X (doubling then bisection) such that both shifted wells carry
/// less than delta^2 of mass on the wrong side of the origin.
pub fn find_separation(
    phi0: &GroundState,
    phi1: &GroundState,
    delta: f64,
) -> Result<SeparationResult> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadParameter {
            name: "delta",
            value: delta,
        });
    }
    if !phi0.is_normalized() || !phi1.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let target = delta * delta;
    let ok = |x: f64| -> Result<bool> {
        let (a, b) = tails_at(phi0, phi1, x)?;
        Ok(a < target && b < target)
    };
    let mut hi = 1.0;
    while !ok(hi)? {
        hi *= 2.0;
        if hi > SEPARATION_CAP {
            return Err(Error::SeparationExhausted { x_max: SEPARATION_CAP });
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-6 {
            break;
        }
    }
    let (right_tail_of_left_well, left_tail_of_right_well) = tails_at(phi0, phi1, hi)?;
    Ok(SeparationResult {
        delta,
        x_delta: hi,
        left_tail_of_right_well,
        right_tail_of_left_well,
    })
}

/// Theorem-level verdict for a requested (epsilon, M).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub epsilon: f64,
    pub m: f64,
    /// sup-distance envelope measured over the unscaled family sample
    pub c_m: f64,
    /// dilation factor sqrt(epsilon / C_M)
    pub k: f64,
    pub alpha_m: f64,
    pub beta_m: f64,
    pub measured_sup: f64,
    pub q_alpha: f64,
    pub q_beta: f64,
    pub q_ratio: f64,
    pub pass_eps: bool,
    pub pass_m: bool,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::CertifyStage {
        stage: name,
        source: Box::new(e),
    })
}

/// Alphas sampled when estimating the family envelope C_M.
pub const ENVELOPE_ALPHAS: [f64; 10] = [0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95];

/// Safety factor applied to the sampled envelope.
const ENVELOPE_MARGIN: f64 = 1.1;
/// Dilation cap when the sampled envelope degenerates to zero.
const DEGENERATE_K_CAP: f64 = 1e3;

/// Family member alpha*phi1(x - X) + (1-alpha)*phi0(x + X).
pub fn family_member(
    phi0: &GroundState,
    phi1: &GroundState,
    alpha: f64,
    x: f64,
) -> Result<GroundState> {
    convex_state(&ConvexFamilySpec::new(
        phi0.clone(),
        phi1.clone(),
        alpha,
        x,
        1.0,
    )?)
}

/// Full pipeline: constants, separation, envelope, dilation, and the final
/// epsilon / M verdict on the scaled pair (alpha_M, 1 - alpha_M).
pub fn certify_family(
    epsilon: f64,
    m: f64,
    pair: (&GroundState, &GroundState),
) -> Result<CertificationReport> {
    if !(epsilon > 0.0) {
        return Err(Error::BadParameter {
            name: "epsilon",
            value: epsilon,
        });
    }
    let constants = stage("constants", construction_constants(m))?;
    let phi0 = stage("normalize", normalize(pair.0))?;
    let phi1 = stage("normalize", normalize(pair.1))?;
    let sep = stage(
        "separation",
        find_separation(&phi0, &phi1, constants.delta_m),
    )?;
    let x = sep.x_delta;

    // envelope over the sampled unscaled family
    let potentials: Vec<_> = ENVELOPE_ALPHAS
        .iter()
        .map(|&a| family_member(&phi0, &phi1, a, x).map(|s| to_potential(&s)))
        .collect::<Result<_>>()
        .map_err(|e| Error::CertifyStage {
            stage: "envelope",
            source: Box::new(e),
        })?;
    let w = 40.0f64.max(3.0 * x);
    let mut c_m = 0.0f64;
    for i in 0..potentials.len() {
        for j in (i + 1)..potentials.len() {
            let r = stage(
                "envelope",
                sup_distance(&potentials[i], &potentials[j], -w, w, 8001),
            )?;
            c_m = c_m.max(r.sup_estimate);
        }
    }
    c_m *= ENVELOPE_MARGIN;
    let k = if c_m < 1e-12 {
        DEGENERATE_K_CAP
    } else {
        (epsilon / c_m).sqrt()
    };

    let alpha_m = constants.alpha_m;
    let beta_m = 1.0 - alpha_m;
    let member_a = stage("members", family_member(&phi0, &phi1, alpha_m, x))?;
    let member_b = stage("members", family_member(&phi0, &phi1, beta_m, x))?;
    let scaled_a = stage("scaling", scale_state(&member_a, k))?;
    let scaled_b = stage("scaling", scale_state(&member_b, k))?;
    let va = stage("scaling", scale_potential(&to_potential(&member_a), k))?;
    let vb = stage("scaling", scale_potential(&to_potential(&member_b), k))?;

    let sup: SupDistanceReport = stage("sup", sup_distance(&va, &vb, -w / k, w / k, 8001))?;

    let qa = stage("quotient", q_quotient(&scaled_a, &QuadratureConfig::for_state(&scaled_a)))?;
    let qb = stage("quotient", q_quotient(&scaled_b, &QuadratureConfig::for_state(&scaled_b)))?;
    let q_alpha = qa.q.finite().ok_or(Error::CertifyStage {
        stage: "quotient",
        source: Box::new(Error::BadParameter {
            name: "q_alpha",
            value: f64::INFINITY,
        }),
    })?;
    let q_beta = qb.q.finite().ok_or(Error::CertifyStage {
        stage: "quotient",
        source: Box::new(Error::BadParameter {
            name: "q_beta",
            value: f64::INFINITY,
        }),
    })?;
    let q_ratio = q_alpha / q_beta;

    Ok(CertificationReport {
        epsilon,
        m,
        c_m,
        k,
        alpha_m,
        beta_m,
        measured_sup: sup.sup_estimate,
        q_alpha,
        q_beta,
        q_ratio,
        pass_eps: sup.sup_estimate < epsilon,
        pass_m: q_ratio > m,
    })
}
