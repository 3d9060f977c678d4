mod common;

use sdtwistor::harmonics::{legendre_p, real_sh, HarmonicCoeffs};
use sdtwistor::sphere::{dot, CircleFrame, DeSitterPoint, SpherePoint};
use sdtwistor::transforms::*;
use sdtwistor::Error;
use std::f64::consts::PI;

/// Brute-force (1/2π)∫_Ω h with a midpoint rule in spherical coordinates
/// about y — an oracle independent of the Gauss–Legendre cap rule.
fn brute_q(h: impl Fn([f64; 3]) -> f64, p: &DeSitterPoint, n: usize) -> f64 {
    let f = CircleFrame::from_axis(&p.y);
    let alpha = p.t.tanh().acos();
    let (dth, dph) = (alpha / n as f64, 2.0 * PI / n as f64);
    let mut acc = 0.0;
    for i in 0..n {
        let th = (i as f64 + 0.5) * dth;
        for j in 0..n {
            let ph = (j as f64 + 0.5) * dph;
            let (s, c) = th.sin_cos();
            let u: [f64; 3] = std::array::from_fn(|k| s * ph.cos() * f.e1[k] + s * ph.sin() * f.e2[k] + c * f.y[k]);
            acc += h(u) * s * dth * dph;
        }
    }
    acc / (2.0 * PI)
}

#[test]
fn r_examples() {
    let cfg = TransformConfig::for_band_limit(6);
    let mut r = common::rng(21);
    for _ in 0..50 {
        let p = common::desitter_point(&mut r, 3.0);
        assert!((transform_r(|_| 1.0, &p, &cfg) - 1.0).abs() < 1e-14);
        let a = [0.3, -1.2, 0.8];
        let lin = |u: [f64; 3]| dot(a, u);
        assert!((transform_r(lin, &p, &cfg) - p.t.tanh() * dot(a, p.y.u())).abs() < 1e-13);
        for l in 0..=6 {
            for m in [-(l as i64), 0, l as i64] {
                let v = transform_r(|u| real_sh(l, m, u), &p, &cfg);
                let e = legendre_p(l, p.t.tanh()).unwrap() * real_sh(l, m, p.y.u());
                assert!((v - e).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn q_examples() {
    let cfg = TransformConfig::for_band_limit(4);
    let mut r = common::rng(22);
    for _ in 0..50 {
        let p = common::desitter_point(&mut r, 3.0);
        assert!((transform_q(|_| 1.0, &p, &cfg) - (1.0 - p.t.tanh())).abs() < 1e-13);
    }
    let y = SpherePoint::new([0.2, 0.5, -0.7]).unwrap();
    let p0 = DeSitterPoint::new(0.0, y);
    let lin = |u: [f64; 3]| dot(u, y.u());
    assert!((transform_q(lin, &p0, &cfg) - 0.5).abs() < 1e-14);
    assert!((brute_q(lin, &p0, 400) - 0.5).abs() < 1e-5);
    for t in [-1.3, 0.0, 0.4, 2.0] {
        let p = DeSitterPoint::new(t, SpherePoint::e3());
        let oracle = brute_q(|u| u[2], &p, 400);
        let sech2 = 1.0 / t.cosh().powi(2);
        assert!((oracle - sech2 / 2.0).abs() < 1e-5);
        assert!((transform_q(|u| u[2], &p, &cfg) - sech2 / 2.0).abs() < 1e-13);
    }
}

#[test]
fn neck_sphere_kernels() {
    let cfg = TransformConfig::for_band_limit(4);
    let mut r = common::rng(23);
    for _ in 0..30 {
        let y = common::sphere_point(&mut r);
        for m in -1..=1 {
            assert!(funk_r0(|u| real_sh(1, m, u), &y, &cfg).abs() < 1e-14);
        }
        for m in -2..=2 {
            assert!(disk_q0(|u| real_sh(2, m, u), &y, &cfg).abs() < 1e-14);
        }
        assert!((funk_r0(|_| 1.0, &y, &cfg) - 1.0).abs() < 1e-14);
        assert!((disk_q0(|_| 1.0, &y, &cfg) - 1.0).abs() < 1e-14);
    }
}

#[test]
fn eigenvalue_examples() {
    assert!((q_eigenvalue(0) - 1.0).abs() < 1e-14);
    assert!(q_eigenvalue(2).abs() < 1e-14);
    // oracle: brute-force hemisphere integral of Y₁⁰ divided by its pole value
    let y0 = (3.0 / (4.0 * PI)).sqrt();
    let oracle = brute_q(|u| real_sh(1, 0, u), &DeSitterPoint::new(0.0, SpherePoint::e3()), 400) / y0;
    assert!((oracle - 0.5).abs() < 1e-5);
    assert!((q_eigenvalue(1) - 0.5).abs() < 1e-12);
    // Funk eigenvalue at degree 2: great-circle average of Y₂⁰ over its pole value
    let n = 10_000;
    let avg: f64 = (0..n).map(|k| real_sh(2, 0, [(2.0 * PI * k as f64 / n as f64).cos(), (2.0 * PI * k as f64 / n as f64).sin(), 0.0])).sum::<f64>() / n as f64;
    let y20 = (5.0 / (4.0 * PI)).sqrt();
    assert!((avg / y20 + 0.5).abs() < 1e-12);
    assert!((QSpectrum::compute(2).c_r[2] + 0.5).abs() < 1e-12);
}

#[test]
fn spectrum_records_closed_form_ratio() {
    let s = QSpectrum::compute(25);
    assert_eq!(s.normalization, Normalization::PerTwoPi);
    for l in (1..=25).step_by(2) {
        let ratio = s.ratio(l).unwrap();
        assert!((ratio - 4.0 * PI).abs() < 1e-9, "l={l} ratio={ratio}");
    }
    assert!(s.ratio(2).is_none());
}

#[test]
fn spectral_diagonality() {
    let cfg = TransformConfig::for_band_limit(6);
    let spec = QSpectrum::compute(6);
    let g = sdtwistor::sphere::SphereGrid::new(6);
    for l in 0..=6 {
        for m in -(l as i64)..=l as i64 {
            let samples: Vec<f64> = g.nodes().map(|u| disk_q0(|v| real_sh(l, m, v), &SpherePoint::new(u).unwrap(), &cfg)).collect();
            let c = sdtwistor::harmonics::sht_forward(&g, 6, &samples).unwrap();
            let mut expect = HarmonicCoeffs::zeros(6);
            expect.set(l, m, spec.c_q[l]);
            assert!(c.max_abs_diff(&expect) < 1e-9);
        }
    }
}

#[test]
fn inversions() {
    let spec = QSpectrum::compute(16);
    let g = HarmonicCoeffs::from_modes(&[(1, 0, spec.c_q[1])]).unwrap();
    let h = invert_q0_odd(&g, &spec).unwrap();
    assert!(h.max_abs_diff(&HarmonicCoeffs::from_modes(&[(1, 0, 1.0)]).unwrap()) < 1e-15);
    let mut r = common::rng(24);
    let odd = common::generator(&mut r, 16, 1.0).odd_part();
    assert!(invert_q0_odd(&spec.apply_q0(&odd), &spec).unwrap().max_abs_diff(&odd) < 1e-8);
    let even = common::generator(&mut r, 16, 1.0).even_star_part();
    assert!(invert_r0_even(&spec.apply_r0(&even), &spec).unwrap().max_abs_diff(&even) < 1e-8);
    assert!(matches!(invert_q0_odd(&even, &spec), Err(Error::WrongParity(_))));
    assert!(matches!(invert_r0_even(&odd, &spec), Err(Error::WrongParity(_))));
}

#[test]
fn differential_identities() {
    let mut r = common::rng(25);
    let pts: Vec<DeSitterPoint> = (0..10).map(|_| common::desitter_point(&mut r, 2.0)).collect();
    let y1 = HarmonicCoeffs::from_modes(&[(1, 1, 1.0)]).unwrap();
    let rep = identity_residuals(&y1, &pts, 1e-3, &[]).unwrap();
    assert!(rep.del_r < 1e-7 && rep.del_q < 1e-7, "{rep:?}");
    let c = HarmonicCoeffs::from_modes(&[(0, 0, 2.0)]).unwrap();
    let rep = identity_residuals(&c, &pts, 1e-3, &[]).unwrap();
    assert!(rep.del_r < 1e-12);
}

#[test]
fn identity_convergence_order() {
    let mut r = common::rng(26);
    let h = common::generator(&mut r, 6, 2.0);
    let pts: Vec<DeSitterPoint> = (0..6).map(|_| common::desitter_point(&mut r, 1.5)).collect();
    let rep = identity_residuals(&h, &pts, 1e-3, &[0.2, 0.1, 0.05]).unwrap();
    for o in rep.order_del_r.iter().chain(&rep.order_del_q) {
        assert!(*o > 3.5, "{rep:?}");
    }
}

#[test]
fn rotation_equivariance_and_frame_independence() {
    let mut r = common::rng(27);
    let h = common::generator(&mut r, 5, 1.0);
    let cfg = TransformConfig::for_band_limit(5);
    for _ in 0..20 {
        let p = common::desitter_point(&mut r, 2.0);
        let f = CircleFrame::from_axis(&p.y);
        let (c, s) = 0.7f64.sin_cos();
        let e1: [f64; 3] = std::array::from_fn(|i| c * f.e1[i] + s * f.e2[i]);
        let e2: [f64; 3] = std::array::from_fn(|i| -s * f.e1[i] + c * f.e2[i]);
        let f2 = CircleFrame::new(e1, e2, &p.y).unwrap();
        let a = transform_r_with_frame(|u| h.eval(u), &p, &f, &cfg);
        let b = transform_r_with_frame(|u| h.eval(u), &p, &f2, &cfg);
        assert!((a - b).abs() < 1e-12);
        // rotation about e₃ by β: (h∘ρ)(t, y) = h(t, ρy)
        let beta: f64 = 0.9;
        let rot = |u: [f64; 3]| [beta.cos() * u[0] - beta.sin() * u[1], beta.sin() * u[0] + beta.cos() * u[1], u[2]];
        let lhs = transform_r(|u| h.eval(rot(u)), &p, &cfg);
        let rhs = transform_r(|u| h.eval(u), &DeSitterPoint::new(p.t, SpherePoint::new(rot(p.y.u())).unwrap()), &cfg);
        assert!((lhs - rhs).abs() < 1e-10);
    }
}

#[test]
fn parity_of_transforms() {
    let mut r = common::rng(28);
    let h = common::generator(&mut r, 7, 1.0);
    let cfg = TransformConfig::for_band_limit(7);
    for _ in 0..30 {
        let p = common::desitter_point(&mut r, 2.0);
        let q = p.involution();
        let f = |u: [f64; 3]| h.eval(u);
        assert!((transform_r(f, &p, &cfg) - transform_r(f, &q, &cfg)).abs() < 1e-9);
        assert!((transform_q(f, &p, &cfg) + transform_q(f, &q, &cfg)).abs() < 1e-9);
    }
}

#[test]
fn spectral_and_quadrature_transforms_agree() {
    let mut r = common::rng(29);
    let h = common::generator(&mut r, 8, 1.0);
    let cfg = TransformConfig::for_band_limit(8);
    for _ in 0..20 {
        let p = common::desitter_point(&mut r, 2.0);
        let f = |u: [f64; 3]| h.eval(u);
        assert!((spectral_r(&h, p.t).eval(p.y.u()) - transform_r(f, &p, &cfg)).abs() < 1e-12);
        assert!((spectral_q(&h, p.t).eval(p.y.u()) - transform_q(f, &p, &cfg)).abs() < 1e-12);
    }
    assert!(cfg.validate(8).is_ok());
    assert!(TransformConfig { n_phi: 10, ..cfg }.validate(8).is_err());
}
