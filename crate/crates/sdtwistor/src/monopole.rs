//! Monopoles (V, A) on de Sitter 3-space built from a potential f = Rh,
//! their gauge and field-equation residuals, admissibility, and the
//! indefinite metrics they induce on the circle bundle.
//!
//! Coordinates on the base are (t, a, b) with λ = a + ib the stereographic
//! chart of y. The orthonormal frame is Ē₁ = ∂_t, Ē₂ = ρ∂_a, Ē₃ = ρ∂_b with
//! ρ = (1+|λ|²)/(2 cosh t); the de Sitter metric is −dt² + (da² + db²)/ρ².

use crate::dual::Dual;
use crate::harmonics::{idx, legendre_all2, ncoeffs, real_sh, real_sh_all, HarmonicCoeffs};
use crate::sphere::{inverse_stereographic_generic, stereographic, SphereGrid, SpherePoint};
use crate::transforms::spectral_r;
use crate::wave::{check_mean_zero, FieldOnDeSitter, Parity};
use crate::{Error, Result};
use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Scale factor ρ = (1+|λ|²)/(2 cosh t) of the chart frame.
pub fn frame_scale(t: f64, lambda: Complex64) -> f64 {
    (1.0 + lambda.norm_sqr()) / (2.0 * t.cosh())
}

/// Monopole data at one base point, frame components throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub v: f64,
    /// (Ē₁V, Ē₂V, Ē₃V)
    pub ev: [f64; 3],
    /// (A₁, A₂, A₃) with A = Σ A_j Ē^j
    pub a: [f64; 3],
    /// Potential f (zero when not defined)
    pub f: f64,
}

/// Anything that can report monopole fields at base points.
pub trait MonopoleField: Sync {
    fn sample(&self, t: f64, lambda: Complex64) -> FieldSample;
}

/// Monopole generated by a mean-zero function h on S²: f = Rh,
/// V = 1 + ∂_t f, A = −*̌ďf.
#[derive(Debug, Clone, PartialEq)]
pub struct Monopole {
    h: HarmonicCoeffs,
}

impl Monopole {
    pub fn from_generator(h: &HarmonicCoeffs) -> Result<Self> {
        check_mean_zero(h)?;
        Ok(Self { h: h.clone() })
    }

    /// (V, A) = (1, 0).
    pub fn trivial() -> Self {
        Self { h: HarmonicCoeffs::zeros(0) }
    }

    pub fn generator(&self) -> &HarmonicCoeffs {
        &self.h
    }

    /// Coefficients of the potential f(t,·) = Rh(t,·).
    pub fn potential_slice(&self, t: f64) -> HarmonicCoeffs {
        spectral_r(&self.h, t)
    }

    /// Coefficients of V(t,·), mode by mode 1 + c Z_l(tanh t) sech²t.
    pub fn v_slice(&self, t: f64) -> HarmonicCoeffs {
        let (_, z, _) = legendre_all2(self.h.lmax(), t.tanh());
        let sech2 = 1.0 / t.cosh().powi(2);
        let mut v = self.h.map_degree(|l| z[l] * sech2);
        v.set(0, 0, v.get(0, 0) + (4.0 * PI).sqrt());
        v
    }

    /// Sampled V and f on a time grid.
    pub fn fields(&self, ts: &[f64]) -> Result<(FieldOnDeSitter, FieldOnDeSitter)> {
        let v = FieldOnDeSitter::from_fn(ts, Parity::None, |t| self.v_slice(t))?;
        let f = FieldOnDeSitter::from_fn(ts, Parity::Even, |t| self.potential_slice(t))?;
        Ok((v, f))
    }

    /// ∂_t Rh at (t, u) evaluated in closed form per mode.
    pub fn dt_potential(&self, t: f64, u: [f64; 3]) -> f64 {
        let (_, z, _) = legendre_all2(self.h.lmax(), t.tanh());
        let sech2 = 1.0 / t.cosh().powi(2);
        self.h.map_degree(|l| z[l] * sech2).eval(u)
    }
}

/// Per-degree profiles of f, V − 1 and ∂_t V at time t.
fn profiles(lmax: usize, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let z = t.tanh();
    let sech2 = 1.0 / t.cosh().powi(2);
    let (p, zl, wl) = legendre_all2(lmax, z);
    let v: Vec<f64> = zl.iter().map(|x| x * sech2).collect();
    let vt: Vec<f64> = (0..=lmax).map(|l| wl[l] * sech2 * sech2 - 2.0 * zl[l] * sech2 * z).collect();
    (p, v, vt)
}

/// Harmonics and their chart derivatives ∂_a, ∂_b at λ = a + ib.
fn harmonics_with_chart_derivatives(lmax: usize, lambda: Complex64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let ua = inverse_stereographic_generic(Dual::var(lambda.re), Dual::new(lambda.im, 0.0));
    let ub = inverse_stereographic_generic(Dual::new(lambda.re, 0.0), Dual::var(lambda.im));
    let ya = real_sh_all(lmax, ua);
    let yb = real_sh_all(lmax, ub);
    let y = ya.iter().map(|d| d.v).collect();
    (y, ya.iter().map(|d| d.d).collect(), yb.iter().map(|d| d.d).collect())
}

impl MonopoleField for Monopole {
    fn sample(&self, t: f64, lambda: Complex64) -> FieldSample {
        let lmax = self.h.lmax();
        let (p, v, vt) = profiles(lmax, t);
        let (y, ya, yb) = harmonics_with_chart_derivatives(lmax, lambda);
        let c = self.h.coeffs();
        let (mut f, mut fa, mut fb) = (0.0, 0.0, 0.0);
        let (mut vv, mut va, mut vb, mut vtt) = (1.0, 0.0, 0.0, 0.0);
        for l in 0..=lmax {
            for k in l * l..(l + 1) * (l + 1) {
                let ck = c[k];
                if ck == 0.0 {
                    continue;
                }
                f += ck * p[l] * y[k];
                fa += ck * p[l] * ya[k];
                fb += ck * p[l] * yb[k];
                vv += ck * v[l] * y[k];
                va += ck * v[l] * ya[k];
                vb += ck * v[l] * yb[k];
                vtt += ck * vt[l] * y[k];
            }
        }
        let rho = frame_scale(t, lambda);
        FieldSample { v: vv, ev: [vtt, rho * va, rho * vb], a: [0.0, rho * fb, -rho * fa], f }
    }
}

/// Tod's family written mode by mode: f = Σ c P_l(z) Y, V = 1 + Σ c Z_l(z)
/// sech²t Y, A = −Σ c P_l(z) *̌ďY, evaluated independently of the
/// coefficient-vector path of [`Monopole`].
#[derive(Debug, Clone, PartialEq)]
pub struct TodMonopole {
    modes: Vec<(usize, i64, f64)>,
}

impl TodMonopole {
    pub fn new(modes: &[(usize, i64, f64)]) -> Result<Self> {
        for &(l, m, _) in modes {
            if l == 0 {
                return Err(Error::Config("constant mode is not allowed in a generator".into()));
            }
            if m.unsigned_abs() as usize > l {
                return Err(Error::Config(format!("invalid mode (l={l}, m={m})")));
            }
        }
        Ok(Self { modes: modes.to_vec() })
    }

    pub fn generator(&self) -> HarmonicCoeffs {
        HarmonicCoeffs::from_modes(&self.modes).expect("validated modes")
    }
}

impl MonopoleField for TodMonopole {
    fn sample(&self, t: f64, lambda: Complex64) -> FieldSample {
        let z = t.tanh();
        let sech2 = 1.0 / t.cosh().powi(2);
        let rho = frame_scale(t, lambda);
        let mut s = FieldSample { v: 1.0, ev: [0.0; 3], a: [0.0; 3], f: 0.0 };
        for &(l, m, c) in &self.modes {
            let (p, zl, wl) = legendre_all2(l, z);
            let (p, zl, wl) = (p[l], zl[l], wl[l]);
            let y = |a: Dual, b: Dual| real_sh_all(l, inverse_stereographic_generic(a, b))[idx(l, m)];
            let ya = y(Dual::var(lambda.re), Dual::new(lambda.im, 0.0));
            let yb = y(Dual::new(lambda.re, 0.0), Dual::var(lambda.im));
            s.f += c * p * ya.v;
            s.v += c * zl * sech2 * ya.v;
            s.ev[0] += c * (wl * sech2 * sech2 - 2.0 * zl * sech2 * z) * ya.v;
            s.ev[1] += c * zl * sech2 * rho * ya.d;
            s.ev[2] += c * zl * sech2 * rho * yb.d;
            // −*̌ďY = (Ē₃Y)Ē² − (Ē₂Y)Ē³
            s.a[1] += c * p * rho * yb.d;
            s.a[2] -= c * p * rho * ya.d;
        }
        s
    }
}

/// A monopole whose potential A is modified by a chart 1-form; used for
/// gauge transforms (exact additions) and negative controls.
pub struct ModifiedPotential<'a, M: MonopoleField> {
    pub inner: &'a M,
    /// Returns the added frame components (Ā₂, Ā₃) at (t, λ).
    pub extra: Box<dyn Fn(f64, Complex64) -> [f64; 2] + Sync + 'a>,
}

impl<M: MonopoleField> MonopoleField for ModifiedPotential<'_, M> {
    fn sample(&self, t: f64, lambda: Complex64) -> FieldSample {
        let mut s = self.inner.sample(t, lambda);
        let e = (self.extra)(t, lambda);
        s.a[1] += e[0];
        s.a[2] += e[1];
        s
    }
}

/// Frame components of ďφ for a function φ on S² (t-independent).
pub fn exterior_derivative_on_sphere(phi: &HarmonicCoeffs, t: f64, lambda: Complex64) -> [f64; 2] {
    let rho = frame_scale(t, lambda);
    let ga = phi.eval_generic(inverse_stereographic_generic(Dual::var(lambda.re), Dual::new(lambda.im, 0.0))).d;
    let gb = phi.eval_generic(inverse_stereographic_generic(Dual::new(lambda.re, 0.0), Dual::var(lambda.im))).d;
    [rho * ga, rho * gb]
}

/// Fourth-order central difference weights at offsets −2..2.
const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];

fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-2..=2).zip(D1).map(|(k, w)| w * f(x + k as f64 * h)).sum::<f64>() / h
}

/// Base point (t, λ) used by the residual scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasePoint {
    pub t: f64,
    pub re: f64,
    pub im: f64,
}

impl BasePoint {
    pub fn new(t: f64, lambda: Complex64) -> Self {
        Self { t, re: lambda.re, im: lambda.im }
    }
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Gauge-condition residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeReport {
    /// max |A(∂_t)|
    pub max_a1: f64,
    /// max |ď*̌A| (frame component of the 2-form)
    pub max_codifferential: f64,
}

/// Conditions A(∂_t) = 0 and ď*̌A = 0; the divergence is taken by
/// fourth-order differences in the chart.
pub fn gauge_conditions_check<M: MonopoleField>(m: &M, pts: &[BasePoint], step: f64) -> GaugeReport {
    let mut r = GaugeReport { max_a1: 0.0, max_codifferential: 0.0 };
    for p in pts {
        let s = m.sample(p.t, p.lambda());
        r.max_a1 = r.max_a1.max(s.a[0].abs());
        // *̌A = A₂Ē³ − A₃Ē²; in chart components (−A₃/ρ) da + (A₂/ρ) db.
        let comp = |re: f64, im: f64, k: usize| {
            let l = Complex64::new(re, im);
            let s = m.sample(p.t, l);
            s.a[k] / frame_scale(p.t, l)
        };
        let div = d1(|x| comp(x, p.im, 1), p.re, step) + d1(|y| comp(p.re, y, 2), p.im, step);
        let rho = frame_scale(p.t, p.lambda());
        r.max_codifferential = r.max_codifferential.max((rho * rho * div).abs());
    }
    r
}

/// Frame components of dA − *dV at a point; everything by fourth-order
/// differences of the sampled V and A.
pub fn monopole_residual_at<M: MonopoleField>(m: &M, p: &BasePoint, step: f64) -> [f64; 3] {
    let (t, a, b) = (p.t, p.re, p.im);
    let at = |t: f64, a: f64, b: f64| m.sample(t, Complex64::new(a, b));
    let ax = |t: f64, a: f64, b: f64| {
        let s = at(t, a, b);
        s.a[1] / frame_scale(t, Complex64::new(a, b))
    };
    let ay = |t: f64, a: f64, b: f64| {
        let s = at(t, a, b);
        s.a[2] / frame_scale(t, Complex64::new(a, b))
    };
    let vt = d1(|x| at(x, a, b).v, t, step);
    let va = d1(|x| at(t, x, b).v, a, step);
    let vb = d1(|x| at(t, a, x).v, b, step);
    let rho = frame_scale(t, p.lambda());
    // dA in chart components
    let da_ta = d1(|x| ax(x, a, b), t, step);
    let da_tb = d1(|x| ay(x, a, b), t, step);
    let da_ab = d1(|x| ay(t, x, b), a, step) - d1(|x| ax(t, a, x), b, step);
    // *dV in chart components
    let s_ta = vb; // (Ē₃V)/ρ = ∂_b V
    let s_tb = -va;
    let s_ab = -vt / (rho * rho);
    [rho * (da_ta - s_ta), rho * (da_tb - s_tb), rho * rho * (da_ab - s_ab)]
}

/// Max over points of the frame-component residual of dA = *dV.
pub fn monopole_residual<M: MonopoleField>(m: &M, pts: &[BasePoint], step: f64) -> f64 {
    pts.par_iter()
        .map(|p| monopole_residual_at(m, p, step).iter().fold(0.0f64, |a, v| a.max(v.abs())))
        .reduce(|| 0.0, f64::max)
}

/// Scan resolution for the admissibility search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanConfig {
    pub t_max: f64,
    pub nt: usize,
    /// Band limit of the sphere grid used by the coarse scan.
    pub sphere_band: usize,
}

impl ScanConfig {
    pub fn for_band_limit(l: usize) -> Self {
        Self { t_max: 8.0, nt: 801, sphere_band: (2 * l).max(12) }
    }
}

/// Outcome of the admissibility search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// 1 − max |∂_t Rh|
    pub margin: f64,
    /// Point (t, y) where |∂_t Rh| is largest.
    pub witness_t: f64,
    pub witness_y: [f64; 3],
    /// min V = 1 + min ∂_t Rh, located independently.
    pub v_min: f64,
    pub v_min_t: f64,
    pub v_min_y: [f64; 3],
    /// True when margin > 0 and V > 0 disagree.
    pub discrepancy: bool,
    pub scan: ScanConfig,
    /// Time slices skipped by the per-mode bound.
    pub slices_pruned: usize,
}

/// Point on S² near u0 in tangent coordinates (a, b).
fn tangent_chart(u0: [f64; 3]) -> impl Fn(f64, f64) -> [f64; 3] {
    let f = crate::sphere::CircleFrame::from_axis(&SpherePoint::new(u0).expect("unit"));
    move |a: f64, b: f64| {
        let v = [
            u0[0] + a * f.e1[0] + b * f.e2[0],
            u0[1] + a * f.e1[1] + b * f.e2[1],
            u0[2] + a * f.e1[2] + b * f.e2[2],
        ];
        SpherePoint::new(v).expect("nonzero").u()
    }
}

/// Golden-section maximization of a unimodal function on [lo, hi].
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Nelder–Mead maximization in n dimensions from `x0` with initial step.
pub fn nelder_mead_max(f: impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, iters: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = f(&x);
        simplex.push((x, v));
    }
    for _ in 0..iters {
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let spread = simplex[0].1 - simplex[n].1;
        if spread.abs() < 1e-15 {
            break;
        }
        let mut c = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for i in 0..n {
                c[i] += x[i] / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let pt = |k: f64| -> Vec<f64> { (0..n).map(|i| c[i] + k * (worst.0[i] - c[i])).collect() };
        let xr = pt(-1.0);
        let fr = f(&xr);
        if fr > simplex[0].1 {
            let xe = pt(-2.0);
            let fe = f(&xe);
            simplex[n] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = pt(0.5);
            let fc = f(&xc);
            if fc > worst.1 {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = (0..n).map(|i| best[i] + 0.5 * (s.0[i] - best[i])).collect();
                    let v = f(&x);
                    *s = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    simplex.swap_remove(0)
}

/// Global search for max |∂_t Rh| and min ∂_t Rh: coarse scan pruned by
/// the per-mode bound |Z_l(tanh t)| sech²t ‖h_l‖_∞, golden-section in t,
/// then a Nelder–Mead polish in (t, tangent plane).
pub fn admissibility_check(h: &HarmonicCoeffs, scan: &ScanConfig) -> Result<AdmissibilityReport> {
    check_mean_zero(h)?;
    let m = Monopole::from_generator(h)?;
    let lmax = h.lmax();
    let sup_l: Vec<f64> = (0..=lmax).map(|l| ((2 * l + 1) as f64 / (4.0 * PI)).sqrt() * h.degree_norm(l)).collect();
    let bound = |t: f64| {
        let (_, z, _) = legendre_all2(lmax, t.tanh());
        let sech2 = 1.0 / t.cosh().powi(2);
        (0..=lmax).map(|l| z[l].abs() * sech2 * sup_l[l]).sum::<f64>()
    };
    let grid = SphereGrid::new(scan.sphere_band);
    let nodes: Vec<[f64; 3]> = grid.nodes().collect();
    let ymat: Vec<Vec<f64>> = nodes.iter().map(|&u| real_sh_all(lmax, u)).collect();
    let ts = crate::wave::time_grid(scan.t_max, scan.nt);
    // Order slices by decreasing bound so pruning bites early.
    let mut order: Vec<(usize, f64)> = ts.iter().enumerate().map(|(i, &t)| (i, bound(t))).collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let (mut best_abs, mut best_abs_at) = (0.0f64, (0.0, [0.0, 0.0, 1.0]));
    let (mut best_min, mut best_min_at) = (0.0f64, (0.0, [0.0, 0.0, 1.0]));
    let mut pruned = 0;
    let nc = ncoeffs(lmax);
    for (i, b) in order {
        if b <= best_abs && -b >= best_min {
            pruned += 1;
            continue;
        }
        let t = ts[i];
        let (_, z, _) = legendre_all2(lmax, t.tanh());
        let sech2 = 1.0 / t.cosh().powi(2);
        let c = h.map_degree(|l| z[l] * sech2);
        let cc = c.coeffs();
        for (k, row) in ymat.iter().enumerate() {
            let g: f64 = row[..nc].iter().zip(cc).map(|(a, b)| a * b).sum();
            if g.abs() > best_abs {
                best_abs = g.abs();
                best_abs_at = (t, nodes[k]);
            }
            if g < best_min {
                best_min = g;
                best_min_at = (t, nodes[k]);
            }
        }
    }
    let dt = if scan.nt > 1 { 2.0 * scan.t_max / (scan.nt - 1) as f64 } else { 1.0 };
    let refine = |t0: f64, u0: [f64; 3], sign: f64| -> (f64, [f64; 3], f64) {
        if sign == 0.0 {
            return (t0, u0, 0.0);
        }
        let (t1, _) = golden_max(|t| sign * m.dt_potential(t, u0), t0 - dt, t0 + dt, 1e-10);
        let chart = tangent_chart(u0);
        let obj = |x: &[f64]| sign * m.dt_potential(x[0], chart(x[1], x[2]));
        let (x, _) = nelder_mead_max(obj, &[t1, 0.0, 0.0], 0.5 * dt.min(0.05), 2000);
        let (x, v) = nelder_mead_max(obj, &x, 1e-4, 2000);
        (x[0], chart(x[1], x[2]), sign * v)
    };
    let s_abs = if best_abs_at.1 == [0.0, 0.0, 1.0] && best_abs == 0.0 {
        0.0
    } else {
        m.dt_potential(best_abs_at.0, best_abs_at.1).signum()
    };
    let (wt, wy, gmax) = refine(best_abs_at.0, best_abs_at.1, s_abs);
    let gmax = gmax.abs().max(best_abs);
    let s_min = if best_min < 0.0 { -1.0 } else { 0.0 };
    let (mt, my, gmin) = refine(best_min_at.0, best_min_at.1, s_min);
    let gmin = gmin.min(best_min);
    let margin = 1.0 - gmax;
    let v_min = 1.0 + gmin;
    Ok(AdmissibilityReport {
        admissible: margin > 0.0 && v_min > 0.0,
        margin,
        witness_t: wt,
        witness_y: wy,
        v_min,
        v_min_t: mt,
        v_min_y: my,
        discrepancy: (margin > 0.0) != (v_min > 0.0),
        scan: *scan,
        slices_pruned: pruned,
    })
}

/// Which metric to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MetricKind {
    /// −V⁻¹Θ² + V g_{S³₁}
    Gibbons,
    /// −V⁻²Θ² + g_{S³₁}
    Reduced,
    /// sech²t · (−V⁻¹Θ² + V g_{S³₁})
    Compactified,
}

/// Metric in coordinates (s, t, Re λ, Im λ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub s: f64,
    pub t: f64,
    pub lambda: Complex64,
    pub g: Matrix4<f64>,
    pub kind: MetricKind,
}

impl MetricSample {
    /// Number of (negative, positive) eigenvalues.
    pub fn signature(&self) -> (usize, usize) {
        let e = SymmetricEigen::new(self.g).eigenvalues;
        (e.iter().filter(|v| **v < 0.0).count(), e.iter().filter(|v| **v > 0.0).count())
    }
}

/// Assemble the chosen metric at (s, t, λ).
pub fn metric_at<M: MonopoleField>(m: &M, s: f64, t: f64, lambda: Complex64, kind: MetricKind) -> Result<MetricSample> {
    let f = m.sample(t, lambda);
    if f.v <= 0.0 {
        return Err(Error::NonPositiveV(f.v));
    }
    Ok(MetricSample { s, t, lambda, g: metric_from_sample(&f, t, lambda, kind), kind })
}

/// Metric matrix from fields at a point.
pub fn metric_from_sample(f: &FieldSample, t: f64, lambda: Complex64, kind: MetricKind) -> Matrix4<f64> {
    let rho = frame_scale(t, lambda);
    let theta = [1.0, 0.0, f.a[1] / rho, f.a[2] / rho];
    let base = Matrix4::from_diagonal(&nalgebra::Vector4::new(0.0, -1.0, 1.0 / (rho * rho), 1.0 / (rho * rho)));
    let tt = Matrix4::from_fn(|i, j| theta[i] * theta[j]);
    match kind {
        MetricKind::Reduced => base - tt / (f.v * f.v),
        MetricKind::Gibbons => base * f.v - tt / f.v,
        MetricKind::Compactified => (base * f.v - tt / f.v) / t.cosh().powi(2),
    }
}

/// Behaviour of (V − 1)/q² as q = e^{−|t|} → 0 at one point of S².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactificationPoint {
    pub y: [f64; 3],
    pub q2: Vec<f64>,
    /// (V−1)/q² at t = +½|ln q²| for each q².
    pub future: Vec<f64>,
    /// (V−1)/q² at t = −½|ln q²| for each q².
    pub past: Vec<f64>,
    pub future_limit: f64,
    pub past_limit: f64,
    /// |difference| of successive linear extrapolations to q² = 0.
    pub future_spread: f64,
    pub past_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactificationReport {
    pub points: Vec<CompactificationPoint>,
    pub max_spread: f64,
}

/// Extrapolations of (V − 1)/q² at q² ∈ {1e-2, 1e-3, 1e-4}.
pub fn compactification_probe<M: MonopoleField>(m: &M, ys: &[SpherePoint]) -> Result<CompactificationReport> {
    let q2: [f64; 3] = [1e-2, 1e-3, 1e-4];
    let mut points = Vec::new();
    let mut max_spread: f64 = 0.0;
    for y in ys {
        let lambda = stereographic(y).finite()?;
        let vals = |sign: f64| -> Vec<f64> {
            q2.iter().map(|&q| (m.sample(sign * -0.5 * q.ln(), lambda).v - 1.0) / q).collect()
        };
        let extrap = |v: &[f64]| -> (f64, f64) {
            // linear in q² through successive pairs
            let e = |i: usize| v[i + 1] - (v[i] - v[i + 1]) * q2[i + 1] / (q2[i] - q2[i + 1]);
            let (a, b) = (e(0), e(1));
            (b, (a - b).abs())
        };
        let future = vals(1.0);
        let past = vals(-1.0);
        let (fl, fs) = extrap(&future);
        let (pl, ps) = extrap(&past);
        max_spread = max_spread.max(fs).max(ps);
        points.push(CompactificationPoint {
            y: y.u(),
            q2: q2.to_vec(),
            future,
            past,
            future_limit: fl,
            past_limit: pl,
            future_spread: fs,
            past_spread: ps,
        });
    }
    Ok(CompactificationReport { points, max_spread })
}

/// Value of the single harmonic Y_l^m at a sphere point (convenience for
/// closed-form comparisons).
pub fn harmonic_at(l: usize, m: i64, y: &SpherePoint) -> f64 {
    real_sh(l, m, y.u())
}
