#![allow(clippy::needless_range_loop)]

mod common;

use num_complex::Complex64 as C;
use rand::Rng;
use sdtwistor::curvature::*;
use sdtwistor::harmonics::HarmonicCoeffs;
use sdtwistor::monopole::*;
use sdtwistor::twistor::DiskConfig;
use std::f64::consts::PI;

fn points(seed: u64, n: usize) -> Vec<(f64, C, f64)> {
    let mut r = common::rng(seed);
    (0..n).map(|_| (r.gen_range(-1.5..1.5), common::chart_point(&mut r, 1.5), r.gen_range(-2.0..2.0))).collect()
}

fn tod() -> TodMonopole {
    TodMonopole::new(&[(1, 0, 0.3)]).unwrap()
}

fn corrupted<'a>(inner: &'a TodMonopole, c: f64) -> ModifiedPotential<'a, TodMonopole> {
    let phi = HarmonicCoeffs::from_modes(&[(1, 0, 1.0), (2, 0, 0.5)]).unwrap();
    ModifiedPotential {
        inner,
        extra: Box::new(move |t, l| {
            let d = exterior_derivative_on_sphere(&phi, t, l);
            [c * t * d[0], c * t * d[1]]
        }),
    }
}

#[test]
fn trivial_connection_matches_base() {
    for (t, l, _) in points(80, 10) {
        let c = connection_at(&Monopole::trivial(), t, l).unwrap();
        assert_eq!(c.nu, [0.0; 3]);
        for j in 1..4 {
            assert_eq!(c.omega[0][j], [0.0; 4]);
        }
        let th = t.tanh();
        assert!((c.omega[1][2][2] - th).abs() < 1e-15 && (c.omega[1][3][3] - th).abs() < 1e-15);
        assert!(c.omega[1][2][3] == 0.0 && c.omega[1][3][2] == 0.0);
        assert!((c.omega[2][3][2] + l.im / t.cosh()).abs() < 1e-15 && (c.omega[2][3][3] - l.re / t.cosh()).abs() < 1e-15);
    }
}

#[test]
fn connection_symmetry_pattern() {
    let m = tod();
    for (t, l, _) in points(81, 10) {
        let c = connection_at(&m, t, l).unwrap();
        for i in 0..4 {
            assert_eq!(c.omega[i][i], [0.0; 4]);
            for j in 0..4 {
                let sign = -ETA[j] * ETA[i];
                for k in 0..4 {
                    assert_eq!(c.omega[j][i][k], sign * c.omega[i][j][k]);
                }
            }
        }
    }
}

#[test]
fn frames_are_orthonormal() {
    let m = TodMonopole::new(&[(1, 0, 0.3), (2, -1, 0.1), (3, 2, 0.05)]).unwrap();
    for (t, l, _) in points(82, 20) {
        let fr = frame_at(&m, t, l).unwrap();
        assert!(fr.orthonormality_residual(&reduced_metric(&m, t, l)) < 1e-12);
        let tr = frame_at(&Monopole::trivial(), t, l).unwrap();
        assert!(tr.orthonormality_residual(&reduced_metric(&Monopole::trivial(), t, l)) < 1e-12);
    }
}

#[test]
fn torsion_christoffel_and_de0() {
    let m = TodMonopole::new(&[(1, 0, 0.3), (2, 1, 0.1)]).unwrap();
    for (t, l, _) in points(83, 8) {
        assert!(torsion_residual(&m, t, l, 1e-3).unwrap() < 1e-6);
        assert!(christoffel_residual(&m, t, l, 1e-3).unwrap() < 1e-5);
        assert!(de0_residual(&m, t, l, 1e-3).unwrap() < 1e-6);
    }
    let (t, l) = (0.3, C::new(-0.4, 0.6));
    let (a, b) = (torsion_residual(&m, t, l, 8e-2).unwrap(), torsion_residual(&m, t, l, 4e-2).unwrap());
    assert!((a / b).log2() > 1.8, "{a} {b}");
}

#[test]
fn lifted_field_examples() {
    let m = tod();
    for (t, l, z) in points(84, 20) {
        let tr = lifted_fields(&Monopole::trivial(), t, l, z).unwrap();
        assert!((tr.fields[0][0] + z).abs() < 1e-15 && (tr.fields[1][0] + 1.0).abs() < 1e-15);
        let lf = lifted_fields(&m, t, l, z).unwrap();
        let fr = frame_at(&m, t, l).unwrap();
        for (j, coeff) in [[-z, -1.0, 1.0, z], [-1.0, z, z, -1.0]].iter().enumerate() {
            for row in 0..4 {
                let e: f64 = (0..4).map(|k| fr.vectors[(row, k)] * coeff[k]).sum();
                assert!((lf.fields[j][row] - e).abs() < 1e-12);
            }
            assert!((lf.fields[j][4] - lf.base_fibre[j]).abs() < 1e-10);
        }
    }
}

#[test]
fn frobenius_examples() {
    let m = tod();
    let mut worst: f64 = 0.0;
    for (t, l, z) in points(85, 100) {
        worst = worst.max(frobenius_residual(&m, t, l, z, 1e-3).unwrap());
    }
    assert!(worst < 1e-5, "{worst}");
    for (t, l, z) in points(86, 10) {
        assert!(frobenius_residual(&Monopole::trivial(), t, l, z, 1e-3).unwrap() < 1e-6);
    }
    let bad = corrupted(&m, 1.0);
    assert!(frobenius_residual(&bad, 0.4, C::new(0.5, -0.8), 0.7, 1e-3).unwrap() > 1e-2);
}

#[test]
fn frobenius_defect_is_linear_in_corruption() {
    let m = tod();
    let (t, l, z) = (0.4, C::new(0.5, -0.8), 0.7);
    let r: Vec<f64> = [0.1, 0.01, 0.001].iter().map(|&c| frobenius_residual(&corrupted(&m, c), t, l, z, 1e-3).unwrap() / c).collect();
    assert!((r[1] / r[0] - 1.0).abs() < 0.1 && (r[2] / r[1] - 1.0).abs() < 0.1, "{r:?}");
}

#[test]
fn lift_identity_examples() {
    let mut r = common::rng(87);
    let h = HarmonicCoeffs::from_modes(&[(1, -1, 0.2), (1, 0, 0.3), (1, 1, -0.1)]).unwrap();
    let cfg = DiskConfig::for_band_limit(1);
    for (t, l, _) in points(88, 50) {
        let w = C::from_polar(1.0, r.gen_range(-0.9 * PI..0.9 * PI));
        let res = lift_identity_residual(&h, t, l, w, 1e-3, &cfg).unwrap();
        assert!(res.identity[0] < 1e-5 && res.identity[1] < 1e-5, "{res:?}");
        assert!(res.phi[0] < 1e-6 && res.phi[1] < 1e-6, "{res:?}");
        let flat = lift_identity_residual(&HarmonicCoeffs::zeros(1), t, l, w, 1e-3, &cfg).unwrap();
        assert_eq!(flat.identity, [0.0, 0.0]);
    }
    assert!(zeta_of_omega(C::new(-1.0, 0.0)).is_err());
    assert!((zeta_of_omega(C::new(0.0, 1.0)).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn asd_examples() {
    let (t, l) = (0.3, C::new(0.4, -0.5));
    let trivial = asd_residual(&Monopole::trivial(), t, l, 1e-3, MetricKind::Reduced).unwrap();
    assert!(trivial.relative < 1e-4, "{trivial:?}");
    let m = TodMonopole::new(&[(1, 0, 0.2)]).unwrap();
    for (t, l, _) in points(89, 20) {
        let r = asd_residual(&m, t, l, 1e-3, MetricKind::Reduced).unwrap();
        assert!(r.relative < 1e-3, "{r:?}");
    }
    let gib = asd_residual(&m, t, l, 1e-3, MetricKind::Gibbons).unwrap();
    assert!(gib.relative < 1e-3, "{gib:?}");
    let control = asd_residual_of_metric(negative_control_metric, [0.0, t, l.re, l.im], 1e-3).unwrap();
    assert!(control.relative > 0.5);
    assert!(asd_residual(&m, t, C::new(2e3, 0.0), 1e-3, MetricKind::Reduced).is_err());
}

#[test]
fn corrupted_potential_breaks_asd() {
    let m = tod();
    let r = asd_residual(&corrupted(&m, 1.0), 0.4, C::new(0.5, -0.8), 1e-3, MetricKind::Reduced).unwrap();
    assert!(r.relative > 1e-2, "{r:?}");
}
