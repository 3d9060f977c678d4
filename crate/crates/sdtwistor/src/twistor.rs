//! Projective side of the correspondence: the Möbius maps η and Φ, the
//! standard disk family, deformed disks with boundary on P_h obtained by
//! splitting the boundary data into Fourier halves, α-surfaces, the
//! special disks at the fixed spheres, and the non-admissibility probe.

use crate::harmonics::HarmonicCoeffs;
use crate::sphere::{inverse_stereographic, sphere_from_homogeneous, Lambda};
use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Point of ℂP³ stored as a unit vector whose first non-negligible entry
/// is real and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint {
    z: [C; 4],
}

impl ProjectivePoint {
    pub fn new(z: [C; 4]) -> Result<Self> {
        let n = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        let lead = z.iter().find(|c| c.norm() > 1e-12 * n).copied().unwrap_or(z[0]);
        let phase = lead.conj() / lead.norm();
        Ok(Self { z: z.map(|c| c * phase / n) })
    }

    pub fn coords(&self) -> [C; 4] {
        self.z
    }

    /// Fubini–Study sine distance √(1 − |⟨z,w⟩|²), computed as the norm of
    /// the component of w orthogonal to z.
    pub fn distance(&self, o: &ProjectivePoint) -> f64 {
        let ip: C = self.z.iter().zip(&o.z).map(|(a, b)| a.conj() * b).sum();
        self.z.iter().zip(&o.z).map(|(a, b)| (b - ip * a).norm_sqr()).sum::<f64>().sqrt()
    }

    /// The ℂ*-action μ·[z₀:z₁:z₂:z₃] = [μz₀ : μz₁ : z₂ : z₃].
    pub fn act(&self, mu: C) -> Result<Self> {
        Self::new([mu * self.z[0], mu * self.z[1], self.z[2], self.z[3]])
    }
}

fn ratio(num: C, den: C) -> Lambda {
    if den == C::new(0.0, 0.0) {
        Lambda::Infinity
    } else {
        Lambda::Finite(num / den)
    }
}

/// η₁ = (−ω + λe^t)/(λ̄ω + e^t) and Φ = −i(λ̄ω + e^t)/(λ + e^tω).
pub fn eta_phi(t: f64, lambda: C, omega: C) -> (Lambda, Lambda) {
    let et = t.exp();
    let den = lambda.conj() * omega + et;
    (ratio(-omega + lambda * et, den), ratio(-I * den, lambda + et * omega))
}

/// (η₁, η₂) with η₂ = (λ + e^tω)/(−1 + λ̄e^tω).
pub fn eta_pair(t: f64, lambda: C, omega: C) -> (Lambda, Lambda) {
    let et = t.exp();
    (
        ratio(-omega + lambda * et, lambda.conj() * omega + et),
        ratio(lambda + et * omega, -1.0 + lambda.conj() * et * omega),
    )
}

/// Standard disk family [−ie^{is}(λ̄ω+e^t) : −ie^{is}(−ω+λe^t) : −1+λ̄e^tω : λ+e^tω].
pub fn standard_fibration(s: f64, t: f64, lambda: C, omega: C) -> ProjectivePoint {
    let et = t.exp();
    let e = -I * C::from_polar(1.0, s);
    ProjectivePoint::new([
        e * (lambda.conj() * omega + et),
        e * (-omega + lambda * et),
        -1.0 + lambda.conj() * et * omega,
        lambda + et * omega,
    ])
    .expect("standard disk point is nonzero")
}

/// π[z] = (z₁/z₀, z₃/z₂), undefined on L₊ = {z₂=z₃=0} and L₋ = {z₀=z₁=0}.
pub fn pi_projection(p: &ProjectivePoint) -> Result<(Lambda, Lambda)> {
    let z = p.z;
    if z[0].norm_sqr() + z[1].norm_sqr() < 1e-24 || z[2].norm_sqr() + z[3].norm_sqr() < 1e-24 {
        return Err(Error::OnExceptionalLine);
    }
    Ok((ratio(z[1], z[0]), ratio(z[3], z[2])))
}

/// Fourier data of H(ω) = h(η₁(ω)) on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMap {
    pub s: f64,
    pub t: f64,
    pub lambda: C,
    pub k: usize,
    /// H_k for k = −K..K at index k + K.
    pub coeffs: Vec<C>,
    /// Σ_{|k|>K} |H_k|² over the remaining DFT bins.
    pub tail_energy: f64,
    pub samples: usize,
}

impl BoundaryMap {
    pub fn coeff(&self, k: i64) -> C {
        if k.unsigned_abs() as usize > self.k {
            C::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.k as i64) as usize]
        }
    }

    /// H₀, the mean of H over the circle.
    pub fn h0(&self) -> f64 {
        self.coeff(0).re
    }

    /// H₊(ω) = Σ_{k≥1} H_k ω^k.
    pub fn h_plus(&self, omega: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for k in (1..=self.k as i64).rev() {
            acc = (acc + self.coeff(k)) * omega;
        }
        acc
    }

    /// dH₊/dω.
    pub fn h_plus_prime(&self, omega: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for k in (1..=self.k as i64).rev() {
            acc = acc * omega + self.coeff(k) * k as f64;
        }
        acc
    }

    /// H₋(ω) = Σ_{k≥1} H_{−k} ω^{−k}, for ω ≠ 0.
    pub fn h_minus(&self, omega: C) -> C {
        let w = omega.inv();
        let mut acc = C::new(0.0, 0.0);
        for k in (1..=self.k as i64).rev() {
            acc = (acc + self.coeff(-k)) * w;
        }
        acc
    }

    /// Truncated series of H at e^{iθ}.
    pub fn boundary_value(&self, theta: f64) -> C {
        let w = C::from_polar(1.0, theta);
        self.h_minus(w) + self.h0() + self.h_plus(w)
    }
}

/// Analysis of H on `n` uniform circle samples, keeping |k| ≤ K; fails
/// when the discarded energy exceeds `tol` (relative to the total).
pub fn fourier_split(h: &HarmonicCoeffs, s: f64, t: f64, lambda: C, k: usize, n: usize, tol: f64) -> Result<BoundaryMap> {
    if n < 2 * k + 1 {
        return Err(Error::Config(format!("{n} circle samples cannot resolve |k| ≤ {k}")));
    }
    let et = t.exp();
    let mut buf: Vec<C> = (0..n)
        .map(|j| {
            let w = C::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
            let u = sphere_from_homogeneous(-w + lambda * et, lambda.conj() * w + et);
            C::new(h.eval(u), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let at = |kk: i64| buf[kk.rem_euclid(n as i64) as usize] * scale;
    let coeffs: Vec<C> = (-(k as i64)..=k as i64).map(at).collect();
    let total: f64 = buf.iter().map(|c| c.norm_sqr() * scale * scale).sum();
    let tail_energy: f64 = (k + 1..n - k).map(|j| buf[j].norm_sqr() * scale * scale).sum();
    if tail_energy > tol * total.max(1.0) {
        return Err(Error::FourierTail { tail: tail_energy, tol });
    }
    Ok(BoundaryMap { s, t, lambda, k, coeffs, tail_energy, samples: n })
}

/// Homogeneous coordinates of the deformed disk
/// [e^{2H₊+H₀+is}Φ : e^{2H₊+H₀+is}Φη₁ : η₂⁻¹ : 1], cleared of denominators.
pub fn disk_map_raw(b: &BoundaryMap, omega: C) -> [C; 4] {
    let et = b.t.exp();
    let l = b.lambda;
    let e = (b.h_plus(omega) * 2.0 + b.h0() + I * b.s).exp();
    [
        e * -I * (l.conj() * omega + et),
        e * -I * (-omega + l * et),
        -1.0 + l.conj() * et * omega,
        l + et * omega,
    ]
}

pub fn disk_map(b: &BoundaryMap, omega: C) -> ProjectivePoint {
    ProjectivePoint::new(disk_map_raw(b, omega)).expect("disk point is nonzero")
}

/// Scale-invariant residuals of membership in P_h:
/// r₁ = |z̄₀z₂ − z̄₁z₃| and r₂ = max(| |z₃| − |z₀|e^{−h} |, | |z₂| − |z₁|e^{−h} |)
/// on the unit representative, with h evaluated at z₁/z₀.
pub fn ph_membership(p: &ProjectivePoint, h: &HarmonicCoeffs) -> Result<(f64, f64)> {
    let z = p.z;
    if z[0].norm_sqr() + z[1].norm_sqr() < 1e-24 || z[2].norm_sqr() + z[3].norm_sqr() < 1e-24 {
        return Err(Error::OnExceptionalLine);
    }
    let hv = h.eval(sphere_from_homogeneous(z[1], z[0]));
    let e = (-hv).exp();
    let r1 = (z[0].conj() * z[2] - z[1].conj() * z[3]).norm();
    let r2 = (z[3].norm() - z[0].norm() * e).abs().max((z[2].norm() - z[1].norm() * e).abs());
    Ok((r1, r2))
}

/// Which fixed sphere a special disk is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pole {
    Minus,
    Plus,
}

/// Limit disks at the fixed spheres, for finite nonzero λ:
/// minus: [e^{h(−λ̄⁻¹)}ω′ : −e^{h(−λ̄⁻¹)}ω′λ̄⁻¹ : −λ⁻¹ : 1];
/// plus:  [e^{h(λ)} : e^{h(λ)}λ : ω′λ̄ : ω′].
pub fn special_disk(pole: Pole, h: &HarmonicCoeffs, lambda: C, omega: C) -> Result<ProjectivePoint> {
    if lambda.norm() == 0.0 {
        return Err(Error::Config("special disks need λ ≠ 0".into()));
    }
    let y = inverse_stereographic(Lambda::Finite(lambda)).u();
    match pole {
        Pole::Minus => {
            let e = h.eval([-y[0], -y[1], -y[2]]).exp();
            // multiplied through by λ
            ProjectivePoint::new([lambda * e * omega, -(lambda / lambda.conj()) * e * omega, C::new(-1.0, 0.0), lambda])
        }
        Pole::Plus => {
            let e = h.eval(y).exp();
            ProjectivePoint::new([C::new(e, 0.0), lambda * e, omega * lambda.conj(), omega])
        }
    }
}

/// Parameters ω′ in the closed disk where a special disk meets its line
/// (L₋ for the minus disk, L₊ for the plus disk). The relevant coordinate
/// pair is linear in ω′, so the root is found exactly.
pub fn special_disk_line_hits(pole: Pole, lambda: C) -> Vec<C> {
    // Minus: (z₀, z₁) = ω′·(λe^h, −(λ/λ̄)e^h); Plus: (z₂, z₃) = ω′·(λ̄, 1).
    // Both vanish only at ω′ = 0 because the direction vector is nonzero.
    let direction_nonzero = match pole {
        Pole::Minus => lambda.norm() > 0.0,
        Pole::Plus => true,
    };
    if direction_nonzero {
        vec![C::new(0.0, 0.0)]
    } else {
        Vec::new()
    }
}

/// α-surface {x = 𝒜(q̄)y} for a unit quaternion q = a + bi + cj + dk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaSurfaceSpec {
    pub q: [f64; 4],
    pub matrix: [[f64; 3]; 3],
}

pub fn alpha_surface(q: [f64; 4]) -> Result<AlphaSurfaceSpec> {
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit(n));
    }
    let [a, b, c, d] = q;
    let matrix = [
        [a * a + b * b - c * c - d * d, 2.0 * (a * d + b * c), -2.0 * (a * c - b * d)],
        [-2.0 * (a * d - b * c), a * a - b * b + c * c - d * d, 2.0 * (a * b + c * d)],
        [2.0 * (a * c + b * d), -2.0 * (a * b - c * d), a * a - b * b - c * c + d * d],
    ];
    Ok(AlphaSurfaceSpec { q, matrix })
}

impl AlphaSurfaceSpec {
    /// |x − 𝒜(q̄)y|.
    pub fn membership(&self, x: [f64; 3], y: [f64; 3]) -> f64 {
        let mut r = 0.0;
        for i in 0..3 {
            let ay: f64 = (0..3).map(|j| self.matrix[i][j] * y[j]).sum();
            r += (x[i] - ay).powi(2);
        }
        r.sqrt()
    }
}

/// Monotonicity scan of g(t) = Rh(t, λ) + t.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub lambda: [f64; 2],
    pub monotone: bool,
    /// Times where g′ changes sign (bisected).
    pub sign_changes: Vec<f64>,
    /// t₁ < t₂ with g(t₁) = g(t₂), when g is not monotone.
    pub witness: Option<(f64, f64)>,
    /// |g(t₁) − g(t₂)|
    pub witness_gap: Option<f64>,
    pub min_derivative: f64,
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Scan g on `ts` and, if g′ changes sign, return a pair of times on
/// which g agrees: the two disks through one interior point.
pub fn nonadmissible_probe(h: &HarmonicCoeffs, lambda: C, ts: &[f64]) -> Result<ProbeReport> {
    crate::wave::check_mean_zero(h)?;
    let m = crate::monopole::Monopole::from_generator(h)?;
    let y = inverse_stereographic(Lambda::Finite(lambda)).u();
    let f = h.clone();
    let g = |t: f64| crate::transforms::spectral_r(&f, t).eval(y) + t;
    let dg = |t: f64| m.dt_potential(t, y) + 1.0;
    let d: Vec<f64> = ts.iter().map(|&t| dg(t)).collect();
    let min_derivative = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut sign_changes = Vec::new();
    for i in 1..ts.len() {
        if (d[i - 1] > 0.0) != (d[i] > 0.0) {
            sign_changes.push(bisect(dg, ts[i - 1], ts[i]));
        }
    }
    let mut witness = None;
    let mut witness_gap = None;
    // first local maximum followed by a local minimum
    if let Some(pos) = (0..sign_changes.len()).find(|&k| dg(sign_changes[k] - 1e-9) > 0.0) {
        if pos + 1 < sign_changes.len() {
            let ta = sign_changes[pos];
            let tb = sign_changes[pos + 1];
            let level = 0.5 * (g(ta) + g(tb));
            // walk left until g drops below the level
            let mut left = ta - 1.0;
            while g(left) >= level && left > ta - 1e3 {
                left -= 2.0 * (ta - left);
            }
            if g(left) < level {
                let t1 = bisect(|t| g(t) - level, left, ta);
                let t2 = bisect(|t| g(t) - level, ta, tb);
                witness = Some((t1, t2));
                witness_gap = Some((g(t1) - g(t2)).abs());
            }
        }
    }
    Ok(ProbeReport {
        lambda: [lambda.re, lambda.im],
        monotone: sign_changes.is_empty() && min_derivative > 0.0,
        sign_changes,
        witness,
        witness_gap,
        min_derivative,
    })
}

/// Resolution for disk evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskConfig {
    pub k: usize,
    pub n: usize,
    pub tail_tol: f64,
}

impl DiskConfig {
    pub fn for_band_limit(l: usize) -> Self {
        let k = 4 * l + 8;
        Self { k, n: 4 * k, tail_tol: 1e-20 }
    }
}

/// Disk point at parameters p = (s, t, Re λ, Im λ, Re ω, Im ω).
pub fn disk_point(h: &HarmonicCoeffs, p: &[f64; 6], cfg: &DiskConfig) -> Result<ProjectivePoint> {
    let b = fourier_split(h, p[0], p[1], C::new(p[2], p[3]), cfg.k, cfg.n, cfg.tail_tol)?;
    Ok(disk_map(&b, C::new(p[4], p[5])))
}

fn affine(z: [C; 4], k: usize) -> [f64; 6] {
    let mut out = [0.0; 6];
    let mut j = 0;
    for (i, zi) in z.iter().enumerate() {
        if i != k {
            let w = zi / z[k];
            out[j] = w.re;
            out[j + 1] = w.im;
            j += 2;
        }
    }
    out
}

/// Recover disk parameters of a target point by damped Newton iteration
/// on affine coordinates, starting from `seed`.
pub fn invert_disk_point(h: &HarmonicCoeffs, target: &ProjectivePoint, seed: [f64; 6], cfg: &DiskConfig) -> Result<[f64; 6]> {
    let tz = target.coords();
    let k = (0..4).max_by(|&a, &b| tz[a].norm().partial_cmp(&tz[b].norm()).unwrap()).unwrap_or(3);
    let goal = affine(tz, k);
    let resid = |p: &[f64; 6]| -> Result<[f64; 6]> {
        let z = disk_map_raw(&fourier_split(h, p[0], p[1], C::new(p[2], p[3]), cfg.k, cfg.n, cfg.tail_tol)?, C::new(p[4], p[5]));
        let a = affine(z, k);
        Ok(std::array::from_fn(|i| a[i] - goal[i]))
    };
    let norm = |r: &[f64; 6]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut p = seed;
    let mut r = resid(&p)?;
    for _ in 0..100 {
        if norm(&r) < 1e-13 {
            return Ok(p);
        }
        let step = 1e-7;
        let mut jac = nalgebra::SMatrix::<f64, 6, 6>::zeros();
        for j in 0..6 {
            let mut a = p;
            let mut b = p;
            a[j] += step;
            b[j] -= step;
            let (ra, rb) = (resid(&a)?, resid(&b)?);
            for i in 0..6 {
                jac[(i, j)] = (ra[i] - rb[i]) / (2.0 * step);
            }
        }
        let rv = nalgebra::SVector::<f64, 6>::from_column_slice(&r);
        let dx = jac.lu().solve(&rv).ok_or_else(|| Error::NoConvergence("singular Jacobian".into()))?;
        let mut damp = 1.0;
        loop {
            let trial: [f64; 6] = std::array::from_fn(|i| p[i] - damp * dx[i]);
            if let Ok(rt) = resid(&trial) {
                if norm(&rt) < norm(&r) || damp < 1e-4 {
                    p = trial;
                    r = rt;
                    break;
                }
            }
            damp *= 0.5;
            if damp < 1e-6 {
                return Err(Error::NoConvergence("line search failed".into()));
            }
        }
    }
    if norm(&r) < 1e-10 {
        Ok(p)
    } else {
        Err(Error::NoConvergence(format!("residual {:e}", norm(&r))))
    }
}
