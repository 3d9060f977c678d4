//! The circle transform R and cap transform Q, their neck-sphere
//! restrictions, spectral profiles, eigenvalue tables and inversions.

use crate::harmonics::{gauss_legendre, laplacian_spectral, legendre_all, HarmonicCoeffs};
use crate::sphere::{small_circle_point, CircleFrame, DeSitterPoint, SpherePoint};
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Quadrature resolutions for the two transforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformConfig {
    /// Uniform circle samples for R.
    pub n_phi: usize,
    /// Gauss–Legendre nodes in cos θ across the cap.
    pub cap_radial: usize,
    /// Uniform azimuthal samples across the cap.
    pub cap_angular: usize,
}

impl TransformConfig {
    /// Resolutions that are exact for data of degree ≤ `l`.
    pub fn for_band_limit(l: usize) -> Self {
        Self { n_phi: 4 * l + 2, cap_radial: l + 2, cap_angular: 2 * l + 2 }
    }

    pub fn validate(&self, l: usize) -> Result<()> {
        if self.n_phi < 4 * l + 2 {
            return Err(Error::Config(format!("n_phi = {} < 4L+2 = {}", self.n_phi, 4 * l + 2)));
        }
        if self.cap_radial < l / 2 + 1 || self.cap_angular < l + 1 {
            return Err(Error::Config("cap quadrature too coarse for the band limit".into()));
        }
        Ok(())
    }
}

/// Rh(t,y) = (1/2π)∫ h(γ(φ)) dφ with the deterministic frame about y.
pub fn transform_r(h: impl Fn([f64; 3]) -> f64, p: &DeSitterPoint, cfg: &TransformConfig) -> f64 {
    transform_r_with_frame(h, p, &CircleFrame::from_axis(&p.y), cfg)
}

/// Circle average in an explicitly supplied frame.
pub fn transform_r_with_frame(
    h: impl Fn([f64; 3]) -> f64,
    p: &DeSitterPoint,
    frame: &CircleFrame,
    cfg: &TransformConfig,
) -> f64 {
    let n = cfg.n_phi;
    let mut acc = 0.0;
    for j in 0..n {
        let phi = 2.0 * PI * j as f64 / n as f64;
        acc += h(small_circle_point(p, frame, phi).u());
    }
    acc / n as f64
}

/// Qh(t,y) = (1/2π)∫_Ω h ω, in spherical coordinates about y with
/// Gauss–Legendre nodes in cos θ on [tanh t, 1].
pub fn transform_q(h: impl Fn([f64; 3]) -> f64, p: &DeSitterPoint, cfg: &TransformConfig) -> f64 {
    let frame = CircleFrame::from_axis(&p.y);
    let z0 = p.t.tanh();
    let (x, w) = gauss_legendre(cfg.cap_radial);
    let half = 0.5 * (1.0 - z0);
    let na = cfg.cap_angular;
    let mut acc = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let c = z0 + half * (xi + 1.0);
        let s = (1.0 - c * c).max(0.0).sqrt();
        let mut ring = 0.0;
        for j in 0..na {
            let phi = 2.0 * PI * j as f64 / na as f64;
            let (sp, cp) = phi.sin_cos();
            let mut u = [0.0; 3];
            for i in 0..3 {
                u[i] = s * cp * frame.e1[i] + s * sp * frame.e2[i] + c * frame.y[i];
            }
            ring += h(u);
        }
        // ∫dφ = 2π·mean; the 1/2π normalization cancels it.
        acc += wi * half * ring / na as f64;
    }
    acc
}

/// Funk transform: Rh(0, y).
pub fn funk_r0(h: impl Fn([f64; 3]) -> f64, y: &SpherePoint, cfg: &TransformConfig) -> f64 {
    transform_r(h, &DeSitterPoint::new(0.0, *y), cfg)
}

/// Hemisphere transform: Qh(0, y).
pub fn disk_q0(h: impl Fn([f64; 3]) -> f64, y: &SpherePoint, cfg: &TransformConfig) -> f64 {
    transform_q(h, &DeSitterPoint::new(0.0, *y), cfg)
}

/// Degree-l profile of R: R(Y_l)(t,·) = P_l(tanh t) Y_l.
pub fn r_profiles(lmax: usize, t: f64) -> Vec<f64> {
    legendre_all(lmax, t.tanh()).0
}

/// Degree-l profile of Q: ∫_{tanh t}^1 P_l(x) dx, which is 1 − tanh t for
/// l = 0 and (P_{l−1} − P_{l+1})(tanh t)/(2l+1) otherwise.
pub fn q_profiles(lmax: usize, t: f64) -> Vec<f64> {
    let z = t.tanh();
    let p = legendre_all(lmax + 1, z).0;
    (0..=lmax)
        .map(|l| if l == 0 { 1.0 - z } else { (p[l - 1] - p[l + 1]) / (2 * l + 1) as f64 })
        .collect()
}

/// Coefficients of Rh(t,·).
pub fn spectral_r(h: &HarmonicCoeffs, t: f64) -> HarmonicCoeffs {
    let p = r_profiles(h.lmax(), t);
    h.map_degree(|l| p[l])
}

/// Coefficients of Qh(t,·).
pub fn spectral_q(h: &HarmonicCoeffs, t: f64) -> HarmonicCoeffs {
    let q = q_profiles(h.lmax(), t);
    h.map_degree(|l| q[l])
}

/// Which normalization the cap transform carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// Q includes the factor 1/2π, so Q(1) = 1 − tanh t.
    PerTwoPi,
}

/// Eigenvalue tables of the neck-sphere transforms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QSpectrum {
    pub normalization: Normalization,
    /// Eigenvalue of the hemisphere transform on degree l.
    pub c_q: Vec<f64>,
    /// Eigenvalue of the Funk transform on degree l.
    pub c_r: Vec<f64>,
    /// Closed-form value (−1)^m (4π/(2m+1))(2m+1)!!/(2m+2)!! at l = 2m+1;
    /// 1 at l = 0 and 0 at even l.
    pub closed_form: Vec<f64>,
}

impl QSpectrum {
    /// Tables by quadrature: one axis-aligned zonal harmonic per degree,
    /// transformed at the pole e₃ and divided by its pole value.
    pub fn compute(lmax: usize) -> Self {
        let cfg = TransformConfig::for_band_limit(lmax.max(1));
        let pole = SpherePoint::e3();
        let mut c_q = Vec::with_capacity(lmax + 1);
        let mut c_r = Vec::with_capacity(lmax + 1);
        for l in 0..=lmax {
            let mut h = HarmonicCoeffs::zeros(l);
            h.set(l, 0, 1.0);
            let y0 = ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
            let f = |u: [f64; 3]| h.eval(u);
            c_q.push(disk_q0(f, &pole, &cfg) / y0);
            c_r.push(funk_r0(f, &pole, &cfg) / y0);
        }
        let closed_form = (0..=lmax).map(closed_form_value).collect();
        Self { normalization: Normalization::PerTwoPi, c_q, c_r, closed_form }
    }

    pub fn lmax(&self) -> usize {
        self.c_q.len() - 1
    }

    /// closed_form / quadrature at degree l, when the quadrature value is nonzero.
    pub fn ratio(&self, l: usize) -> Option<f64> {
        let c = self.c_q[l];
        if c.abs() < 1e-13 {
            None
        } else {
            Some(self.closed_form[l] / c)
        }
    }

    /// Apply the hemisphere transform spectrally.
    pub fn apply_q0(&self, h: &HarmonicCoeffs) -> HarmonicCoeffs {
        h.map_degree(|l| self.c_q[l])
    }

    /// Apply the Funk transform spectrally.
    pub fn apply_r0(&self, h: &HarmonicCoeffs) -> HarmonicCoeffs {
        h.map_degree(|l| self.c_r[l])
    }
}

fn closed_form_value(l: usize) -> f64 {
    if l == 0 {
        return 1.0;
    }
    if l.is_multiple_of(2) {
        return 0.0;
    }
    let m = (l - 1) / 2;
    // (2m+1)!!/(2m+2)!! = Π_{k=0}^{m} (2k+1)/(2k+2)
    let ratio: f64 = (0..=m).map(|k| (2 * k + 1) as f64 / (2 * k + 2) as f64).product();
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * 4.0 * PI / l as f64 * ratio
}

/// Eigenvalue of the hemisphere transform on degree k (quadrature).
pub fn q_eigenvalue(k: usize) -> f64 {
    QSpectrum::compute(k).c_q[k]
}

const INVERSION_FLOOR: f64 = 1e-13;
/// Wrong-parity content below this fraction of the total norm is treated
/// as rounding and dropped.
const PARITY_TOL: f64 = 1e-10;

/// Inverse of the hemisphere transform on odd functions.
pub fn invert_q0_odd(g: &HarmonicCoeffs, spec: &QSpectrum) -> Result<HarmonicCoeffs> {
    let mut out = HarmonicCoeffs::zeros(g.lmax());
    for l in 0..=g.lmax() {
        let norm = g.degree_norm(l);
        if l % 2 == 0 {
            if norm > PARITY_TOL * g.l2_norm() {
                return Err(Error::WrongParity(l));
            }
            continue;
        }
        let c = *spec.c_q.get(l).ok_or(Error::BandLimit { grid: spec.lmax(), coeffs: l })?;
        if c.abs() < INVERSION_FLOOR {
            return Err(Error::IllConditioned(l));
        }
        for m in -(l as i64)..=(l as i64) {
            out.set(l, m, g.get(l, m) / c);
        }
    }
    Ok(out)
}

/// Inverse of the Funk transform on even mean-zero functions.
pub fn invert_r0_even(g: &HarmonicCoeffs, spec: &QSpectrum) -> Result<HarmonicCoeffs> {
    let mut out = HarmonicCoeffs::zeros(g.lmax());
    for l in 0..=g.lmax() {
        let norm = g.degree_norm(l);
        if l % 2 == 1 || l == 0 {
            if norm > PARITY_TOL * g.l2_norm() {
                return Err(Error::WrongParity(l));
            }
            continue;
        }
        let c = *spec.c_r.get(l).ok_or(Error::BandLimit { grid: spec.lmax(), coeffs: l })?;
        if c.abs() < INVERSION_FLOOR {
            return Err(Error::IllConditioned(l));
        }
        for m in -(l as i64)..=(l as i64) {
            out.set(l, m, g.get(l, m) / c);
        }
    }
    Ok(out)
}

/// Fourth-order central difference of a scalar function of t.
pub fn d_dt4(f: impl Fn(f64) -> f64, t: f64, dt: f64) -> f64 {
    (f(t - 2.0 * dt) - 8.0 * f(t - dt) + 8.0 * f(t + dt) - f(t + 2.0 * dt)) / (12.0 * dt)
}

/// Max residuals of ∂_t Rh + QΔh and ∂_t Qh + sech²t·Rh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub dt: f64,
    pub del_r: f64,
    pub del_q: f64,
    /// (dt, del_r, del_q) at the coarse steps of the refinement study.
    pub study: Vec<(f64, f64, f64)>,
    /// log₂ of successive residual ratios, per identity.
    pub order_del_r: Vec<f64>,
    pub order_del_q: Vec<f64>,
}

fn identity_residual_at(h: &HarmonicCoeffs, lap: &HarmonicCoeffs, pts: &[DeSitterPoint], dt: f64, cfg: &TransformConfig) -> (f64, f64) {
    let fh = |u: [f64; 3]| h.eval(u);
    let fl = |u: [f64; 3]| lap.eval(u);
    let mut rr: f64 = 0.0;
    let mut rq: f64 = 0.0;
    for p in pts {
        let at = |t: f64| DeSitterPoint::new(t, p.y);
        let drh = d_dt4(|t| transform_r(fh, &at(t), cfg), p.t, dt);
        let dqh = d_dt4(|t| transform_q(fh, &at(t), cfg), p.t, dt);
        let qlap = transform_q(fl, p, cfg);
        let rh = transform_r(fh, p, cfg);
        let sech2 = 1.0 / (p.t.cosh() * p.t.cosh());
        rr = rr.max((drh + qlap).abs());
        rq = rq.max((dqh + sech2 * rh).abs());
    }
    (rr, rq)
}

/// Differential identities at `pts` with quadrature transforms and
/// fourth-order differences; `study_steps` (coarse, halving) feed the order
/// estimate.
pub fn identity_residuals(
    h: &HarmonicCoeffs,
    pts: &[DeSitterPoint],
    dt: f64,
    study_steps: &[f64],
) -> Result<IdentityReport> {
    if dt <= 0.0 {
        return Err(Error::Config("time step must be positive".into()));
    }
    let cfg = TransformConfig::for_band_limit(h.lmax().max(1) + 2);
    let lap = laplacian_spectral(h);
    let (del_r, del_q) = identity_residual_at(h, &lap, pts, dt, &cfg);
    let study: Vec<(f64, f64, f64)> = study_steps
        .iter()
        .map(|&s| {
            let (a, b) = identity_residual_at(h, &lap, pts, s, &cfg);
            (s, a, b)
        })
        .collect();
    let order = |sel: fn(&(f64, f64, f64)) -> f64| -> Vec<f64> {
        study.windows(2).map(|w| (sel(&w[0]) / sel(&w[1])).log2() / (w[0].0 / w[1].0).log2()).collect()
    };
    Ok(IdentityReport {
        dt,
        del_r,
        del_q,
        order_del_r: order(|s| s.1),
        order_del_q: order(|s| s.2),
        study,
    })
}
