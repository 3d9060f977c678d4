//! Legendre polynomials, real orthonormal spherical harmonics and the
//! band-limited analysis/synthesis pair on a Gauss–Legendre product grid.

use crate::dual::{Dual, Scalar};
use crate::sphere::SphereGrid;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1], ascending nodes.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_pair(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// (P_n(z), P_n'(z)) by the three-term recurrence.
fn legendre_pair(n: usize, z: f64) -> (f64, f64) {
    let (p, d) = legendre_all(n, z);
    (p[n], d[n])
}

/// P_l(z) and P_l'(z) for all l ≤ lmax. No domain check.
pub fn legendre_all(lmax: usize, z: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; lmax + 1];
    let mut d = vec![0.0; lmax + 1];
    p[0] = 1.0;
    if lmax >= 1 {
        p[1] = z;
        d[1] = 1.0;
    }
    for l in 1..lmax {
        let lf = l as f64;
        p[l + 1] = ((2.0 * lf + 1.0) * z * p[l] - lf * p[l - 1]) / (lf + 1.0);
        d[l + 1] = d[l - 1] + (2.0 * lf + 1.0) * p[l];
    }
    (p, d)
}

/// P_l, P_l' and P_l'' for all l ≤ lmax. No domain check.
pub fn legendre_all2(lmax: usize, z: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (p, d) = legendre_all(lmax, z);
    let mut dd = vec![0.0; lmax + 1];
    for l in 1..lmax {
        dd[l + 1] = dd[l - 1] + (2.0 * l as f64 + 1.0) * d[l];
    }
    (p, d, dd)
}

fn check_domain(z: f64) -> Result<()> {
    if z.abs() > 1.0 || z.is_nan() {
        Err(Error::OutOfDomain(z))
    } else {
        Ok(())
    }
}

/// Legendre polynomial P_l(z) for |z| ≤ 1.
pub fn legendre_p(l: usize, z: f64) -> Result<f64> {
    check_domain(z)?;
    Ok(legendre_all(l, z).0[l])
}

/// Derivative Z_l(z) = P_l'(z) for |z| ≤ 1.
pub fn legendre_z(l: usize, z: f64) -> Result<f64> {
    check_domain(z)?;
    Ok(legendre_all(l, z).1[l])
}

/// Cached P_l and P_l' on a set of abscissae.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    pub lmax: usize,
    pub z: Vec<f64>,
    pub p: Vec<Vec<f64>>,
    pub dp: Vec<Vec<f64>>,
}

impl LegendreTable {
    pub fn new(lmax: usize, z: &[f64]) -> Result<Self> {
        let mut p = Vec::with_capacity(z.len());
        let mut dp = Vec::with_capacity(z.len());
        for &zi in z {
            check_domain(zi)?;
            let (a, b) = legendre_all(lmax, zi);
            p.push(a);
            dp.push(b);
        }
        Ok(Self { lmax, z: z.to_vec(), p, dp })
    }

    /// Max residual of (l+1)P_{l+1} − (2l+1)zP_l + lP_{l−1} and of the
    /// derivative identity (1−z²)P_l' = l(P_{l−1} − zP_l) over the table.
    pub fn recurrence_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for (k, &z) in self.z.iter().enumerate() {
            let p = &self.p[k];
            let d = &self.dp[k];
            for l in 1..self.lmax {
                let lf = l as f64;
                r = r.max(((lf + 1.0) * p[l + 1] - (2.0 * lf + 1.0) * z * p[l] + lf * p[l - 1]).abs());
            }
            for l in 1..=self.lmax {
                let lf = l as f64;
                r = r.max(((1.0 - z * z) * d[l] - lf * (p[l - 1] - z * p[l])).abs());
            }
        }
        r
    }
}

/// Flat index of (l, m), |m| ≤ l.
#[inline]
pub fn idx(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

#[inline]
pub fn ncoeffs(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

/// Real orthonormal spherical harmonics Y_l^m(u) for all l ≤ lmax at a
/// (unit) point, written as polynomials in the ambient coordinates so that
/// the evaluation is smooth everywhere and differentiable with `Dual`.
///
/// m > 0 carries cos(mφ), m < 0 carries sin(|m|φ), polar axis e₃, no
/// Condon–Shortley phase.
pub fn real_sh_all<T: Scalar>(lmax: usize, u: [T; 3]) -> Vec<T> {
    let n = ncoeffs(lmax);
    let zero = T::cst(0.0);
    let mut out = vec![zero; n];
    let z = u[2];
    // Re/Im of (x + iy)^m
    let mut cr = T::cst(1.0);
    let mut ci = zero;
    // Normalized diagonal value with sin^m θ factored out.
    let mut qmm = (1.0 / (4.0 * PI)).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            qmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
            let nr = cr * u[0] - ci * u[1];
            let ni = cr * u[1] + ci * u[0];
            cr = nr;
            ci = ni;
        }
        let mf = m as f64;
        let mut q_prev = zero;
        let mut q = T::cst(qmm);
        let store = |out: &mut Vec<T>, l: usize, q: T| {
            if m == 0 {
                out[idx(l, 0)] = q;
            } else {
                let s = std::f64::consts::SQRT_2;
                out[idx(l, m as i64)] = (q * cr).scale(s);
                out[idx(l, -(m as i64))] = (q * ci).scale(s);
            }
        };
        store(&mut out, m, q);
        if m < lmax {
            let q1 = (z * q).scale((2.0 * mf + 3.0).sqrt());
            q_prev = q;
            q = q1;
            store(&mut out, m + 1, q);
        }
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            let qn = (z * q - q_prev.scale(b)).scale(a);
            q_prev = q;
            q = qn;
            store(&mut out, l, q);
        }
    }
    out
}

/// Single real harmonic Y_l^m(u).
pub fn real_sh(l: usize, m: i64, u: [f64; 3]) -> f64 {
    real_sh_all(l, u)[idx(l, m)]
}

/// Band-limited real spherical-harmonic expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoeffs {
    lmax: usize,
    c: Vec<f64>,
}

impl HarmonicCoeffs {
    pub fn zeros(lmax: usize) -> Self {
        Self { lmax, c: vec![0.0; ncoeffs(lmax)] }
    }

    pub fn from_vec(lmax: usize, c: Vec<f64>) -> Result<Self> {
        if c.len() != ncoeffs(lmax) {
            return Err(Error::LengthMismatch { expected: ncoeffs(lmax), got: c.len() });
        }
        Ok(Self { lmax, c })
    }

    /// Expansion with the listed (l, m, c) modes; lmax is the largest l.
    pub fn from_modes(modes: &[(usize, i64, f64)]) -> Result<Self> {
        let lmax = modes.iter().map(|m| m.0).max().unwrap_or(0);
        Self::from_modes_with_lmax(lmax, modes)
    }

    pub fn from_modes_with_lmax(lmax: usize, modes: &[(usize, i64, f64)]) -> Result<Self> {
        let mut h = Self::zeros(lmax);
        for &(l, m, c) in modes {
            if l > lmax || m.unsigned_abs() as usize > l {
                return Err(Error::Config(format!("invalid mode (l={l}, m={m})")));
            }
            h.c[idx(l, m)] += c;
        }
        Ok(h)
    }

    /// Coefficients of a·u = a₁u₁ + a₂u₂ + a₃u₃ (degree 1).
    pub fn linear(a: [f64; 3]) -> Self {
        let k = (4.0 * PI / 3.0).sqrt();
        let mut h = Self::zeros(1);
        h.c[idx(1, 1)] = k * a[0];
        h.c[idx(1, -1)] = k * a[1];
        h.c[idx(1, 0)] = k * a[2];
        h
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        if l > self.lmax {
            0.0
        } else {
            self.c[idx(l, m)]
        }
    }

    pub fn set(&mut self, l: usize, m: i64, v: f64) {
        self.c[idx(l, m)] = v;
    }

    /// Same expansion with band limit raised or truncated to `lmax`.
    pub fn with_lmax(&self, lmax: usize) -> Self {
        let mut h = Self::zeros(lmax);
        let n = ncoeffs(lmax.min(self.lmax));
        h.c[..n].copy_from_slice(&self.c[..n]);
        h
    }

    /// Multiply every degree-l block by `f(l)`.
    pub fn map_degree(&self, f: impl Fn(usize) -> f64) -> Self {
        let mut h = self.clone();
        for l in 0..=self.lmax {
            let k = f(l);
            for v in &mut h.c[l * l..(l + 1) * (l + 1)] {
                *v *= k;
            }
        }
        h
    }

    pub fn scaled(&self, k: f64) -> Self {
        self.map_degree(|_| k)
    }

    pub fn add(&self, o: &Self) -> Self {
        let lmax = self.lmax.max(o.lmax);
        let mut h = self.with_lmax(lmax);
        for (i, v) in o.c.iter().enumerate() {
            h.c[i] += v;
        }
        h
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scaled(-1.0))
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.sub(o).c.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// ℓ² norm of the degree-l block.
    pub fn degree_norm(&self, l: usize) -> f64 {
        if l > self.lmax {
            return 0.0;
        }
        self.c[l * l..(l + 1) * (l + 1)].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Mean of the function over the sphere, (1/4π)∫h.
    pub fn mean(&self) -> f64 {
        self.c[0] / (4.0 * PI).sqrt()
    }

    /// h ∘ α with α the antipodal map: coefficient (−1)^l c_lm.
    pub fn antipodal(&self) -> Self {
        self.map_degree(|l| if l % 2 == 0 { 1.0 } else { -1.0 })
    }

    /// Projection onto odd degrees.
    pub fn odd_part(&self) -> Self {
        self.map_degree(|l| (l % 2) as f64)
    }

    /// Projection onto even degrees l ≥ 2 (mean-zero even functions).
    pub fn even_star_part(&self) -> Self {
        self.map_degree(|l| if l >= 2 && l % 2 == 0 { 1.0 } else { 0.0 })
    }

    /// Projection onto the constants.
    pub fn mean_part(&self) -> Self {
        self.map_degree(|l| if l == 0 { 1.0 } else { 0.0 })
    }

    /// Value at a point of the sphere.
    pub fn eval(&self, u: [f64; 3]) -> f64 {
        self.eval_generic(u)
    }

    /// Value at a point with scalar type `T` (e.g. `Dual` for derivatives).
    pub fn eval_generic<T: Scalar>(&self, u: [T; 3]) -> T {
        let y = real_sh_all(self.lmax, u);
        let mut acc = T::cst(0.0);
        for (c, yv) in self.c.iter().zip(y) {
            if *c != 0.0 {
                acc = acc + yv.scale(*c);
            }
        }
        acc
    }

    /// Value and derivative along the tangent vector `v` at `u`.
    pub fn eval_directional(&self, u: [f64; 3], v: [f64; 3]) -> (f64, f64) {
        let p = [Dual::new(u[0], v[0]), Dual::new(u[1], v[1]), Dual::new(u[2], v[2])];
        let r = self.eval_generic(p);
        (r.v, r.d)
    }
}

/// Spectral Laplace–Beltrami: multiplies degree l by −l(l+1).
pub fn laplacian_spectral(h: &HarmonicCoeffs) -> HarmonicCoeffs {
    h.map_degree(|l| -((l * (l + 1)) as f64))
}

/// Inverse of the Laplacian on mean-zero functions (degree 0 dropped).
pub fn inverse_laplacian(h: &HarmonicCoeffs) -> HarmonicCoeffs {
    h.map_degree(|l| if l == 0 { 0.0 } else { -1.0 / (l * (l + 1)) as f64 })
}

/// Precomputed synthesis matrix on a grid for analysis and synthesis.
#[derive(Debug, Clone)]
pub struct ShtPlan {
    grid: SphereGrid,
    lmax: usize,
    // row-major nodes × ncoeffs
    ymat: Vec<f64>,
}

impl ShtPlan {
    pub fn new(grid: SphereGrid, lmax: usize) -> Result<Self> {
        if lmax > grid.band_limit() {
            return Err(Error::BandLimit { grid: grid.band_limit(), coeffs: lmax });
        }
        let nc = ncoeffs(lmax);
        let mut ymat = Vec::with_capacity(grid.len() * nc);
        for k in 0..grid.len() {
            ymat.extend(real_sh_all(lmax, grid.node(k)));
        }
        Ok(Self { grid, lmax, ymat })
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// Synthesis: sample the expansion at every grid node.
    pub fn inverse(&self, h: &HarmonicCoeffs) -> Result<Vec<f64>> {
        if h.lmax() > self.lmax {
            return Err(Error::BandLimit { grid: self.lmax, coeffs: h.lmax() });
        }
        let nc = ncoeffs(self.lmax);
        let hc = h.coeffs();
        Ok((0..self.grid.len())
            .map(|k| {
                let row = &self.ymat[k * nc..k * nc + hc.len()];
                row.iter().zip(hc).map(|(a, b)| a * b).sum()
            })
            .collect())
    }

    /// Analysis by quadrature; exact for samples of degree ≤ grid band limit.
    pub fn forward(&self, samples: &[f64]) -> Result<HarmonicCoeffs> {
        if samples.len() != self.grid.len() {
            return Err(Error::LengthMismatch { expected: self.grid.len(), got: samples.len() });
        }
        let nc = ncoeffs(self.lmax);
        let mut c = vec![0.0; nc];
        for (k, f) in samples.iter().enumerate() {
            let wf = self.grid.weight(k) * f;
            for (ci, yv) in c.iter_mut().zip(&self.ymat[k * nc..(k + 1) * nc]) {
                *ci += wf * yv;
            }
        }
        HarmonicCoeffs::from_vec(self.lmax, c)
    }
}

/// Convenience: analysis on a fresh plan.
pub fn sht_forward(grid: &SphereGrid, lmax: usize, samples: &[f64]) -> Result<HarmonicCoeffs> {
    ShtPlan::new(grid.clone(), lmax)?.forward(samples)
}

/// Convenience: synthesis on a fresh plan.
pub fn sht_inverse(h: &HarmonicCoeffs, grid: &SphereGrid) -> Result<Vec<f64>> {
    ShtPlan::new(grid.clone(), h.lmax())?.inverse(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_values() {
        assert_eq!(legendre_p(0, 0.3).unwrap(), 1.0);
        assert!((legendre_p(1, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((legendre_p(3, 0.5).unwrap() + 0.4375).abs() < 1e-15);
        assert!((legendre_z(1, -0.7).unwrap() - 1.0).abs() < 1e-15);
        assert!((legendre_z(2, 0.3).unwrap() - 0.9).abs() < 1e-14);
        assert!(legendre_p(2, 1.5).is_err());
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(7);
        // exact for degree ≤ 13
        for k in 0..=13 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn low_degree_harmonics_closed_form() {
        let u = [0.36, 0.48, 0.8];
        let k1 = (3.0 / (4.0 * PI)).sqrt();
        assert!((real_sh(1, 0, u) - k1 * 0.8).abs() < 1e-15);
        assert!((real_sh(1, 1, u) - k1 * 0.36).abs() < 1e-15);
        assert!((real_sh(1, -1, u) - k1 * 0.48).abs() < 1e-15);
        // Y_2^0 = sqrt(5/16π)(3z² − 1)
        assert!((real_sh(2, 0, u) - (5.0 / (16.0 * PI)).sqrt() * (3.0 * 0.64 - 1.0)).abs() < 1e-15);
        // Y_2^{-2} = sqrt(15/4π) x y
        assert!((real_sh(2, -2, u) - (15.0 / (4.0 * PI)).sqrt() * 0.36 * 0.48).abs() < 1e-15);
    }

    #[test]
    fn linear_coefficients_reproduce_dot_product() {
        let a = [0.3, -1.2, 2.0];
        let h = HarmonicCoeffs::linear(a);
        let u = [0.6, 0.0, 0.8];
        assert!((h.eval(u) - (0.18 + 1.6)).abs() < 1e-14);
    }
}
