//! Shared helpers for integration tests: seeded sampling of points,
//! generators and chart coordinates.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdtwistor::harmonics::HarmonicCoeffs;
use sdtwistor::sphere::{DeSitterPoint, SpherePoint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sphere_point(r: &mut impl Rng) -> SpherePoint {
    loop {
        let v = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            return SpherePoint::new(v).unwrap();
        }
    }
}

pub fn desitter_point(r: &mut impl Rng, t_max: f64) -> DeSitterPoint {
    let t = r.gen_range(-t_max..t_max);
    DeSitterPoint::new(t, sphere_point(r))
}

/// λ in the disk |λ| < radius.
pub fn chart_point(r: &mut impl Rng, radius: f64) -> Complex64 {
    loop {
        let z = Complex64::new(r.gen_range(-radius..radius), r.gen_range(-radius..radius));
        if z.norm() < radius {
            return z;
        }
    }
}

/// Mean-zero generator with coefficients of size ≤ scale/(l+1)².
pub fn generator(r: &mut impl Rng, lmax: usize, scale: f64) -> HarmonicCoeffs {
    let mut h = HarmonicCoeffs::zeros(lmax);
    for l in 1..=lmax {
        for m in -(l as i64)..=(l as i64) {
            h.set(l, m, scale * r.gen_range(-1.0..1.0) / ((l + 1) * (l + 1)) as f64);
        }
    }
    h
}

/// Random Tod mode list (l ≥ 1) with |c| ≤ scale.
pub fn tod_modes(r: &mut impl Rng, lmax: usize, count: usize, scale: f64) -> Vec<(usize, i64, f64)> {
    (0..count)
        .map(|_| {
            let l = r.gen_range(1..=lmax);
            let m = r.gen_range(-(l as i64)..=(l as i64));
            (l, m, scale * r.gen_range(-1.0..1.0))
        })
        .collect()
}

/// Independent oracle: midpoint-rule integral over S² in (θ, φ).
pub fn brute_sphere_integral(f: impl Fn([f64; 3]) -> f64, n: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let (dt, dp) = (pi / n as f64, 2.0 * pi / (2 * n) as f64);
    let mut acc = 0.0;
    for i in 0..n {
        let th = (i as f64 + 0.5) * dt;
        for j in 0..2 * n {
            let ph = (j as f64 + 0.5) * dp;
            acc += f([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]) * th.sin() * dt * dp;
        }
    }
    acc
}
