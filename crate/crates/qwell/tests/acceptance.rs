//! Acceptance gate: one test per criterion, one PASS/FAIL line each.

use qwell::asymmetry::{
    default_sup_grid, q_closed_form_sech, q_quotient, sup_distance, QuadratureConfig,
};
use qwell::certify::{certify_family, find_separation, construction_constants};
use qwell::funcalg::{sech_tanh, FunctionExpr, PrimitiveKind};
use qwell::groundmap::{
    convex_potential, convex_state, normalize, scale_potential, scale_state, to_potential,
    ConvexFamilySpec, GroundState,
};
use qwell::spectral::{low_spectrum, two_level_check, Grid, Method};

fn verdict(criterion: &str, pass: bool) {
    println!("acceptance [{criterion}]: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion failed: {criterion}");
}

fn sech_state() -> GroundState {
    GroundState::new(FunctionExpr::primitive(PrimitiveKind::Sech)).unwrap()
}

fn family(k: f64, d: f64, alpha: f64) -> ConvexFamilySpec {
    ConvexFamilySpec::new(sech_state(), sech_state(), alpha, d, k).unwrap()
}

fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(move |i| a + i as f64 * h)
}

#[test]
fn criterion_1_mapping_correctness() {
    // soliton: sech -> 1 - 2 sech^2; Rosen-Morse ground state
    // e^{-x/2} sech x -> 5/4 - 2 sech^2 x + tanh x
    let soliton = to_potential(&sech_state());
    let nu = GroundState::new(FunctionExpr::primitive(PrimitiveKind::RosenMorseNu)).unwrap();
    let rosen = to_potential(&nu);
    let mut err = 0.0f64;
    for x in grid(-10.0, 10.0, 2001) {
        let (s, t) = sech_tanh(x);
        err = err.max((soliton.eval_generic(x).unwrap() - (1.0 - 2.0 * s * s)).abs());
        err = err.max((rosen.eval_generic(x).unwrap() - (1.25 - 2.0 * s * s + t)).abs());
    }
    verdict("mapping correctness", err < 1e-10);
}

#[test]
fn criterion_2_family_identity() {
    // closed-form family potential vs the mapping applied to the mixed state
    let combos = [
        (1.0, 3.0, 0.5),
        (1.0, 3.0, 0.1),
        (0.7, 3.0, 0.5),
        (0.7, 3.0, 0.1),
        (0.5, 1.0, 0.3),
        (0.5, 4.0, 0.7),
        (2.0, 1.0, 0.7),
        (2.0, 4.0, 0.3),
        (1.0, 2.0, 0.9),
        (0.7, 1.0, 0.5),
        (1.5, 3.0, 0.25),
        (0.3, 2.0, 0.6),
    ];
    let mut pass = true;
    for &(k, d, alpha) in &combos {
        let v = convex_potential(&family(k, d, alpha)).unwrap();
        let generic = to_potential(&convex_state(&family(k, d, alpha)).unwrap());
        for x in grid(-20.0, 20.0, 801) {
            let cf = v.eval(x).unwrap();
            let gen = generic.eval_generic(x).unwrap();
            if (cf - gen).abs() >= 1e-10 * (1.0 + cf.abs()) {
                pass = false;
            }
        }
    }
    verdict("family identity", pass);
}

#[test]
fn criterion_3_quotient_dual_oracle() {
    let cfg = QuadratureConfig::default();
    let mut pass = true;
    for &d in &[1.0, 2.0, 3.0, 4.0] {
        for i in 1..=9 {
            let alpha = 0.1 * i as f64;
            let cf = q_closed_form_sech(1.0, d, alpha).unwrap();
            let psi = convex_state(&family(1.0, d, alpha)).unwrap();
            let q = q_quotient(&psi, &cfg).unwrap().q.finite().unwrap();
            if (q - cf).abs() / cf >= 1e-8 {
                pass = false;
            }
        }
    }
    let q_half = q_quotient(&convex_state(&family(1.0, 3.0, 0.5)).unwrap(), &cfg)
        .unwrap()
        .q
        .finite()
        .unwrap();
    pass &= (q_half - 1.0).abs() < 1e-10;
    pass &= (q_closed_form_sech(1.0, 3.0, 0.5).unwrap() - 1.0).abs() < 1e-10;
    verdict("quotient dual oracle", pass);
}

#[test]
fn criterion_4_headline_theorem() {
    let (p0, p1) = (sech_state(), sech_state());
    let r = certify_family(0.01, 100.0, (&p0, &p1)).unwrap();
    verdict(
        "headline theorem eps=0.01 M=100",
        r.measured_sup < 0.01 && r.q_ratio > 100.0 && r.pass_eps && r.pass_m,
    );
}

#[test]
fn criterion_5_construction_constants() {
    let (n0, n1) = (
        normalize(&sech_state()).unwrap(),
        normalize(&sech_state()).unwrap(),
    );
    let mut pass = true;
    for &m in &[1.0, 10.0, 100.0] {
        let c = construction_constants(m).unwrap();
        pass &= c.delta_m > 0.0 && c.delta_m < 1.0;
        pass &= c.alpha_m > 0.0 && c.alpha_m < 1.0;
        let d = c.delta_m;
        let residual = ((1.0 - d * d) * c.alpha_m * c.alpha_m
            / ((1.0 - c.alpha_m) * (1.0 - c.alpha_m) + d * d + 2.0 * d)
            - (m + 1.0))
            .abs();
        pass &= residual < 1e-9;
        // the constructed family realizes the squared margin
        let sep = find_separation(&n0, &n1, c.delta_m).unwrap();
        let q = q_closed_form_sech(1.0, sep.x_delta, c.alpha_m).unwrap();
        let qr = q_closed_form_sech(1.0, sep.x_delta, 1.0 - c.alpha_m).unwrap();
        pass &= q / qr > (m + 1.0) * (m + 1.0);
    }
    verdict("construction constants", pass);
}

#[test]
fn criterion_6_scaling_laws() {
    let mut pass = true;
    // Q invariance under dilation
    let psi = convex_state(&family(1.0, 3.0, 0.3)).unwrap();
    let tight = |s: &GroundState| QuadratureConfig {
        rel_tol: 1e-13,
        abs_tol: 1e-15,
        ..QuadratureConfig::for_state(s)
    };
    let q1 = q_quotient(&psi, &tight(&psi)).unwrap().q.finite().unwrap();
    for &k in &[0.2, 0.7, 1.0, 5.0] {
        let scaled = scale_state(&psi, k).unwrap();
        let qk = q_quotient(&scaled, &tight(&scaled)).unwrap().q.finite().unwrap();
        pass &= (qk - q1).abs() / q1 < 1e-10;
    }
    // V_[k] = k^2 V(k x) pointwise
    let v = convex_potential(&family(1.0, 3.0, 0.3)).unwrap();
    for &k in &[0.2, 0.7, 5.0] {
        let vk = scale_potential(&v, k).unwrap();
        for x in grid(-15.0, 15.0, 301) {
            let lhs = vk.eval(x).unwrap();
            let rhs = k * k * v.eval(k * x).unwrap();
            pass &= (lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs());
        }
    }
    // family diameter bound at the Figure 1 parameters
    for &k in &[0.7, 1.0] {
        let va = convex_potential(&family(k, 3.0, 0.1)).unwrap();
        for &beta in &[0.5, 0.9] {
            let vb = convex_potential(&family(k, 3.0, beta)).unwrap();
            let (lo, hi, n) = default_sup_grid(&va, &vb);
            let r = sup_distance(&va, &vb, lo, hi, n).unwrap();
            pass &= r.sup_estimate < 4.0 * k * k;
        }
    }
    verdict("scaling laws", pass);
}

#[test]
fn criterion_7_limit_behavior() {
    let r = q_closed_form_sech(1.0, 3.0, 0.999).unwrap()
        / q_closed_form_sech(1.0, 3.0, 0.001).unwrap();
    let lim = 12.0f64.exp();
    verdict("limit behavior", (r - lim).abs() / lim < 0.05);
}

#[test]
fn criterion_8_spectral_oracle() {
    let mut pass = true;
    // double well at the Figure 1 symmetric parameters
    let v = convex_potential(&family(1.0, 3.0, 0.5)).unwrap();
    let g = Grid::new(-39.0, 39.0, 6000).unwrap();
    let r = low_spectrum(&v, &g, 2, Method::Fd3).unwrap();
    pass &= r.eigenvalues[0].abs() < 1e-4;
    let psi = convex_state(&family(1.0, 3.0, 0.5)).unwrap();
    pass &= r.overlap_with(0, &psi) > 0.9999;
    // oscillator calibration through the generic mapping path
    let osc = to_potential(&GroundState::new(FunctionExpr::primitive(PrimitiveKind::Gaussian)).unwrap());
    let ro = low_spectrum(&osc, &Grid::new(-20.0, 20.0, 4000).unwrap(), 2, Method::Fd3).unwrap();
    pass &= (ro.eigenvalues[1] - 2.0).abs() < 1e-4;
    // tunneling gap shrinks with separation
    let gap = |d: f64| {
        let vd = convex_potential(&family(1.0, d, 0.5)).unwrap();
        let gd = Grid::for_family(1.0, d).unwrap();
        let rd = low_spectrum(&vd, &gd, 2, Method::Fd3).unwrap();
        rd.eigenvalues[1] - rd.eigenvalues[0]
    };
    pass &= gap(5.0) < gap(3.0);
    // first excited state is close to the antisymmetric well combination
    let left = GroundState::new(sech_state().expr().shift(3.0)).unwrap();
    let right = GroundState::new(sech_state().expr().shift(-3.0)).unwrap();
    let fit = two_level_check(&v, &left, &right, &g).unwrap();
    pass &= fit.overlap_e1 > 0.99;
    verdict("spectral oracle", pass);
}

#[test]
fn criterion_9_figure_reproduction() {
    let bin = env!("CARGO_BIN_EXE_qwell");
    let run = |cmd: &str| -> Vec<Vec<f64>> {
        let out = std::process::Command::new(bin).arg(cmd).output().unwrap();
        assert!(out.status.success(), "{cmd} failed");
        let text = String::from_utf8(out.stdout).unwrap();
        text.lines()
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect()
    };
    let mut pass = true;

    // figure 1: x, then (k=1, a=.5), (k=1, a=.1), (k=.7, a=.5), (k=.7, a=.1)
    let fig1 = run("figure1");
    pass &= fig1.len() == 2401;
    let n = fig1.len();
    let ks = [1.0, 1.0, 0.7, 0.7];
    for row in &fig1 {
        for (c, &k) in ks.iter().enumerate() {
            pass &= (row[c + 1] - k * k).abs() <= 2.0 * k * k + 1e-12;
        }
    }
    for i in 0..n {
        // symmetric curves under x -> -x
        pass &= (fig1[i][1] - fig1[n - 1 - i][1]).abs() < 1e-12;
        pass &= (fig1[i][3] - fig1[n - 1 - i][3]).abs() < 1e-12;
    }
    // k = 0.7 curve is 0.49 times the k = 1 curve read at 0.7 x
    let v1 = convex_potential(&family(1.0, 3.0, 0.1)).unwrap();
    for row in &fig1 {
        let expect = 0.49 * v1.eval(0.7 * row[0]).unwrap();
        pass &= (row[4] - expect).abs() < 1e-12;
    }

    // figure 2: densities, unit trapezoid mass per column
    let fig2 = run("figure2");
    pass &= fig2.len() == 2401;
    let h = fig2[1][0] - fig2[0][0];
    for c in 1..=4 {
        let mut mass = 0.0;
        let mut left = 0.0;
        let mut right = 0.0;
        for (i, row) in fig2.iter().enumerate() {
            let w = if i == 0 || i + 1 == fig2.len() { 0.5 } else { 1.0 };
            mass += w * row[c] * h;
            if row[0] > 0.0 {
                right += w * row[c] * h;
            } else if row[0] < 0.0 {
                left += w * row[c] * h;
            }
        }
        pass &= (mass - 1.0).abs() < 1e-6;
        if c == 1 || c == 3 {
            // alpha = 1/2: parity
            pass &= (left - right).abs() < 1e-9;
        }
        if c == 2 {
            // alpha = 0.1, k = 1: left-dominant with Q ~ 0.018078
            let q = 0.018_077_199_875_601_23;
            pass &= (right - q / (1.0 + q)).abs() < 1e-3;
            pass &= left > right;
        }
    }
    verdict("figure reproduction", pass);
}
