//! Points of S², the identification of de Sitter 3-space with ℝ×S² (and
//! with oriented small circles on S²), the stereographic chart, product
//! quadrature grids and parity structure.

use crate::dual::Scalar;
use crate::harmonics::gauss_legendre;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Unit vector in ℝ³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    u: [f64; 3],
}

impl SpherePoint {
    /// Normalizes `v`; rejects the zero vector.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let n = norm(v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { u: [v[0] / n, v[1] / n, v[2] / n] })
    }

    pub fn e1() -> Self {
        Self { u: [1.0, 0.0, 0.0] }
    }
    pub fn e2() -> Self {
        Self { u: [0.0, 1.0, 0.0] }
    }
    pub fn e3() -> Self {
        Self { u: [0.0, 0.0, 1.0] }
    }

    pub fn u(&self) -> [f64; 3] {
        self.u
    }

    pub fn dot(&self, o: &SpherePoint) -> f64 {
        dot(self.u, o.u)
    }

    /// Antipodal point −u.
    pub fn antipode(&self) -> Self {
        Self { u: [-self.u[0], -self.u[1], -self.u[2]] }
    }
}

/// Point of the stereographic chart: finite λ or the distinguished ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lambda {
    Finite(Complex64),
    Infinity,
}

impl Lambda {
    pub fn finite(&self) -> Result<Complex64> {
        match self {
            Lambda::Finite(z) => Ok(*z),
            Lambda::Infinity => Err(Error::Infinite),
        }
    }
}

/// λ = (y₂ + i y₃)/(1 + y₁); y = (−1,0,0) maps to ∞.
pub fn stereographic(y: &SpherePoint) -> Lambda {
    let u = y.u();
    let den = 1.0 + u[0];
    if den == 0.0 {
        Lambda::Infinity
    } else {
        Lambda::Finite(Complex64::new(u[1] / den, u[2] / den))
    }
}

/// Inverse of [`stereographic`].
pub fn inverse_stereographic(l: Lambda) -> SpherePoint {
    match l {
        Lambda::Infinity => SpherePoint { u: [-1.0, 0.0, 0.0] },
        Lambda::Finite(z) => {
            let u = inverse_stereographic_generic(z.re, z.im);
            SpherePoint::new(u).expect("inverse stereographic image is nonzero")
        }
    }
}

/// Inverse stereographic map in real coordinates λ = a + ib, generic over
/// the scalar type so that chart derivatives come out of dual arithmetic.
pub fn inverse_stereographic_generic<T: Scalar>(a: T, b: T) -> [T; 3] {
    let one = T::cst(1.0);
    let r2 = a * a + b * b;
    let den = one + r2;
    [(one - r2) / den, (a + a) / den, (b + b) / den]
}

/// Point on S² from the homogeneous pair [num : den] representing
/// λ = num/den, so that λ = ∞ needs no special case.
pub fn sphere_from_homogeneous(num: Complex64, den: Complex64) -> [f64; 3] {
    let nn = num.norm_sqr();
    let dd = den.norm_sqr();
    let s = nn + dd;
    let w = num * den.conj() * 2.0 / s;
    [(dd - nn) / s, w.re, w.im]
}

/// Point (t, y) of de Sitter 3-space ℝ×S².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeSitterPoint {
    pub t: f64,
    pub y: SpherePoint,
}

impl DeSitterPoint {
    pub fn new(t: f64, y: SpherePoint) -> Self {
        Self { t, y }
    }

    /// Point with y given in the stereographic chart.
    pub fn from_lambda(t: f64, l: Lambda) -> Self {
        Self { t, y: inverse_stereographic(l) }
    }

    pub fn lambda(&self) -> Lambda {
        stereographic(&self.y)
    }

    /// Ambient coordinates (sinh t, cosh t · y) on −x₀² + Σxᵢ² = 1.
    pub fn ambient(&self) -> [f64; 4] {
        let c = self.t.cosh();
        let u = self.y.u();
        [self.t.sinh(), c * u[0], c * u[1], c * u[2]]
    }

    /// Inverse of [`DeSitterPoint::ambient`] for points on the quadric.
    pub fn from_ambient(x: [f64; 4]) -> Result<Self> {
        let t = x[0].asinh();
        Ok(Self { t, y: SpherePoint::new([x[1], x[2], x[3]])? })
    }

    /// The involution (t, y) ↦ (−t, −y).
    pub fn involution(&self) -> Self {
        Self { t: -self.t, y: self.y.antipode() }
    }
}

/// Oriented orthonormal triple (y⊥₁, y⊥₂, y) with det = +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFrame {
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub y: [f64; 3],
}

impl CircleFrame {
    /// Deterministic completion of `y`: Gram–Schmidt against the coordinate
    /// axis on which y has the smallest absolute component.
    pub fn from_axis(y: &SpherePoint) -> Self {
        let u = y.u();
        let mut k = 0;
        for i in 1..3 {
            if u[i].abs() < u[k].abs() {
                k = i;
            }
        }
        let mut a = [0.0; 3];
        a[k] = 1.0;
        let d = dot(a, u);
        let v = [a[0] - d * u[0], a[1] - d * u[1], a[2] - d * u[2]];
        let n = norm(v);
        let e1 = [v[0] / n, v[1] / n, v[2] / n];
        let e2 = cross(u, e1);
        Self { e1, e2, y: u }
    }

    /// Validated explicit frame.
    pub fn new(e1: [f64; 3], e2: [f64; 3], y: &SpherePoint) -> Result<Self> {
        let f = Self { e1, e2, y: y.u() };
        let tol = 1e-10;
        let ok = (dot(e1, e1) - 1.0).abs() < tol
            && (dot(e2, e2) - 1.0).abs() < tol
            && dot(e1, e2).abs() < tol
            && dot(e1, f.y).abs() < tol
            && dot(e2, f.y).abs() < tol
            && (dot(cross(e1, e2), f.y) - 1.0).abs() < tol;
        if ok {
            Ok(f)
        } else {
            Err(Error::Config("frame is not an oriented orthonormal triple".into()))
        }
    }
}

/// γ(φ) = (cos φ/cosh t) y⊥₁ + (sin φ/cosh t) y⊥₂ + tanh t · y.
pub fn small_circle_point(p: &DeSitterPoint, frame: &CircleFrame, phi: f64) -> SpherePoint {
    let sech = 1.0 / p.t.cosh();
    let a = phi.cos() * sech;
    let b = phi.sin() * sech;
    let z = p.t.tanh();
    let mut u = [0.0; 3];
    for i in 0..3 {
        u[i] = a * frame.e1[i] + b * frame.e2[i] + z * frame.y[i];
    }
    // |u| = 1 analytically; the renormalization only removes rounding.
    SpherePoint::new(u).expect("circle point is nonzero")
}

/// Strict membership u·y > tanh t in the open cap.
pub fn cap_contains(u: &SpherePoint, p: &DeSitterPoint) -> bool {
    u.dot(&p.y) > p.t.tanh()
}

/// Membership in the cap expressed in the λ-chart: for finite η, λ,
/// e^t < |(λ̄η + 1)/(η − λ)|.
pub fn cap_contains_chart(eta: Complex64, t: f64, lambda: Complex64) -> bool {
    let num = lambda.conj() * eta + 1.0;
    let den = eta - lambda;
    t.exp() * den.norm() < num.norm()
}

/// Gauss–Legendre colatitudes × uniform longitudes; integrates all
/// harmonics of degree ≤ 2L exactly. The longitude count is even so that
/// the node set is closed under the antipodal map.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    band_limit: usize,
    cos_theta: Vec<f64>,
    gl_weights: Vec<f64>,
    nphi: usize,
}

impl SphereGrid {
    pub fn new(band_limit: usize) -> Self {
        let ntheta = band_limit + 1;
        let nphi = 2 * band_limit + 2;
        let (x, w) = gauss_legendre(ntheta);
        Self { band_limit, cos_theta: x, gl_weights: w, nphi }
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn ntheta(&self) -> usize {
        self.cos_theta.len()
    }

    pub fn nphi(&self) -> usize {
        self.nphi
    }

    pub fn len(&self) -> usize {
        self.ntheta() * self.nphi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node k = i·nphi + j.
    pub fn node(&self, k: usize) -> [f64; 3] {
        let i = k / self.nphi;
        let j = k % self.nphi;
        let z = self.cos_theta[i];
        let s = (1.0 - z * z).max(0.0).sqrt();
        let phi = 2.0 * PI * j as f64 / self.nphi as f64;
        [s * phi.cos(), s * phi.sin(), z]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.gl_weights[k / self.nphi] * 2.0 * PI / self.nphi as f64
    }

    /// Index of the node −u.
    pub fn antipodal_index(&self, k: usize) -> usize {
        let i = k / self.nphi;
        let j = k % self.nphi;
        (self.ntheta() - 1 - i) * self.nphi + (j + self.nphi / 2) % self.nphi
    }

    pub fn nodes(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        (0..self.len()).map(|k| self.node(k))
    }

    pub fn sample(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        self.nodes().map(f).collect()
    }
}

/// Quadrature value of ∫ f ω over S².
pub fn sphere_integral(grid: &SphereGrid, samples: &[f64]) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: samples.len() });
    }
    Ok(samples.iter().enumerate().map(|(k, f)| grid.weight(k) * f).sum())
}

/// Constant, even mean-zero and odd parts of sampled data.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityParts {
    pub mean: f64,
    pub even_star: Vec<f64>,
    pub odd: Vec<f64>,
}

/// f = mean + f_even* + f_odd using the antipodal closure of the grid.
pub fn parity_split(grid: &SphereGrid, samples: &[f64]) -> Result<ParityParts> {
    let mean = sphere_integral(grid, samples)? / (4.0 * PI);
    let n = grid.len();
    let mut even_star = Vec::with_capacity(n);
    let mut odd = Vec::with_capacity(n);
    for k in 0..n {
        let a = samples[grid.antipodal_index(k)];
        even_star.push(0.5 * (samples[k] + a) - mean);
        odd.push(0.5 * (samples[k] - a));
    }
    Ok(ParityParts { mean, even_star, odd })
}
