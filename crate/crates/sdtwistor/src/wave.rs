//! Fields on de Sitter 3-space stored as per-slice harmonic coefficients,
//! the wave operator and the operator −∂²_t + sech²t Δ, solutions built
//! from generating functions, the conserved quantities, and recovery of
//! the generator from initial data.

use crate::harmonics::{laplacian_spectral, HarmonicCoeffs, ShtPlan};
use crate::sphere::{DeSitterPoint, SphereGrid, SpherePoint};
use crate::transforms::{
    invert_q0_odd, invert_r0_even, spectral_q, spectral_r, transform_q, transform_r, QSpectrum, TransformConfig,
};
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Behaviour under (t, y) ↦ (−t, −y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
    None,
}

/// Uniform grid of `n` points on [−T, T], exactly symmetric about 0.
pub fn time_grid(t_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    let d = (n - 1) as f64;
    (0..n).map(|i| t_max * (2.0 * i as f64 - d) / d).collect()
}

/// Sampled scalar field: one harmonic expansion per time slice.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOnDeSitter {
    ts: Vec<f64>,
    slices: Vec<HarmonicCoeffs>,
    parity: Parity,
}

impl FieldOnDeSitter {
    pub fn new(ts: Vec<f64>, slices: Vec<HarmonicCoeffs>, parity: Parity) -> Result<Self> {
        if ts.len() != slices.len() {
            return Err(Error::LengthMismatch { expected: ts.len(), got: slices.len() });
        }
        if ts.len() >= 2 {
            let dt = ts[1] - ts[0];
            if dt <= 0.0 || ts.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0)) {
                return Err(Error::Config("time grid must be uniform and increasing".into()));
            }
        }
        Ok(Self { ts, slices, parity })
    }

    /// Field whose slice at each t is `f(t)`.
    pub fn from_fn(ts: &[f64], parity: Parity, f: impl Fn(f64) -> HarmonicCoeffs) -> Result<Self> {
        Self::new(ts.to_vec(), ts.iter().map(|&t| f(t)).collect(), parity)
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn slices(&self) -> &[HarmonicCoeffs] {
        &self.slices
    }

    pub fn slice(&self, i: usize) -> &HarmonicCoeffs {
        &self.slices[i]
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn lmax(&self) -> usize {
        self.slices.iter().map(|s| s.lmax()).max().unwrap_or(0)
    }

    pub fn dt(&self) -> f64 {
        if self.ts.len() < 2 {
            0.0
        } else {
            self.ts[1] - self.ts[0]
        }
    }

    /// Index of the slice at time τ.
    pub fn index_of(&self, tau: f64) -> Result<usize> {
        let dt = self.dt();
        if dt == 0.0 {
            return if self.ts.first() == Some(&tau) { Ok(0) } else { Err(Error::OffGrid(tau)) };
        }
        let k = ((tau - self.ts[0]) / dt).round();
        if k < 0.0 || k as usize >= self.ts.len() || (self.ts[k as usize] - tau).abs() > 1e-9 * dt {
            return Err(Error::OffGrid(tau));
        }
        Ok(k as usize)
    }

    pub fn eval(&self, i: usize, u: [f64; 3]) -> f64 {
        self.slices[i].eval(u)
    }

    fn need(&self, i: usize) -> Result<()> {
        if self.ts.len() < 5 {
            return Err(Error::TooFewSlices { need: 5, have: self.ts.len() });
        }
        if i < 2 || i + 2 >= self.ts.len() {
            return Err(Error::Config(format!("slice {i} has no centred five-point stencil")));
        }
        Ok(())
    }

    /// Σ w_k F(t_{i+k−2}) · scale for a symmetric or antisymmetric
    /// stencil. Mirrored slices are paired before weighting, so constant
    /// data and data with the opposite symmetry give exact zeros.
    fn combo(&self, i: usize, w: [f64; 5], scale: f64) -> HarmonicCoeffs {
        let odd = w[0] == -w[4];
        let pair = |k: usize| {
            let (a, b) = (&self.slices[i + k], &self.slices[i - k]);
            if odd { a.sub(b) } else { a.add(b) }
        };
        let acc = pair(1).scaled(w[3]).add(&pair(2).scaled(w[4])).add(&self.slices[i].scaled(w[2]));
        acc.scaled(scale)
    }

    /// ∂_t at slice i by the fourth-order central stencil.
    pub fn d_dt(&self, i: usize) -> Result<HarmonicCoeffs> {
        self.need(i)?;
        Ok(self.combo(i, [1.0, -8.0, 0.0, 8.0, -1.0], 1.0 / (12.0 * self.dt())))
    }

    /// ∂²_t at slice i by the fourth-order central stencil.
    pub fn d2_dt2(&self, i: usize) -> Result<HarmonicCoeffs> {
        self.need(i)?;
        let dt = self.dt();
        Ok(self.combo(i, [-1.0, 16.0, -30.0, 16.0, -1.0], 1.0 / (12.0 * dt * dt)))
    }

    /// max |F(−t,−y) ∓ F(t,y)| over coefficients for a symmetric grid.
    pub fn parity_residual(&self) -> Result<f64> {
        let sign = match self.parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
            Parity::None => return Ok(0.0),
        };
        let n = self.ts.len();
        let mut r: f64 = 0.0;
        for i in 0..n {
            if (self.ts[i] + self.ts[n - 1 - i]).abs() > 1e-9 {
                return Err(Error::Config("time grid is not symmetric about 0".into()));
            }
            let mirrored = self.slices[n - 1 - i].antipodal().scaled(sign);
            r = r.max(mirrored.max_abs_diff(&self.slices[i]));
        }
        Ok(r)
    }
}

/// Pointwise residual of an operator on interior slices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualField {
    /// Time of each interior slice.
    pub ts: Vec<f64>,
    /// Max over sphere nodes at each interior slice.
    pub per_slice: Vec<f64>,
    pub max: f64,
    pub dt: f64,
}

fn residual_field(f: &FieldOnDeSitter, op: impl Fn(usize) -> Result<HarmonicCoeffs>) -> Result<ResidualField> {
    if f.ts.len() < 5 {
        return Err(Error::TooFewSlices { need: 5, have: f.ts.len() });
    }
    let plan = ShtPlan::new(SphereGrid::new(f.lmax().max(1)), f.lmax())?;
    let mut ts = Vec::new();
    let mut per_slice = Vec::new();
    for i in 2..f.ts.len() - 2 {
        let r = op(i)?;
        let m = plan.inverse(&r.with_lmax(f.lmax()))?.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        ts.push(f.ts[i]);
        per_slice.push(m);
    }
    let max = per_slice.iter().cloned().fold(0.0, f64::max);
    Ok(ResidualField { ts, per_slice, max, dt: f.dt() })
}

/// Residual of (−∂²_t − 2 tanh t ∂_t + sech²t Δ) V.
pub fn box_residual(v: &FieldOnDeSitter) -> Result<ResidualField> {
    residual_field(v, |i| {
        let t = v.ts[i];
        let sech2 = 1.0 / (t.cosh() * t.cosh());
        let vtt = v.d2_dt2(i)?;
        let vt = v.d_dt(i)?;
        let lap = laplacian_spectral(&v.slices[i]);
        Ok(vtt.scaled(-1.0).add(&vt.scaled(-2.0 * t.tanh())).add(&lap.scaled(sech2)))
    })
}

/// Residual of (−∂²_t + sech²t Δ) f.
pub fn l_residual(f: &FieldOnDeSitter) -> Result<ResidualField> {
    residual_field(f, |i| {
        let t = f.ts[i];
        let sech2 = 1.0 / (t.cosh() * t.cosh());
        let ftt = f.d2_dt2(i)?;
        let lap = laplacian_spectral(&f.slices[i]);
        Ok(ftt.scaled(-1.0).add(&lap.scaled(sech2)))
    })
}

/// Mean-zero check for generating functions.
pub fn check_mean_zero(h: &HarmonicCoeffs) -> Result<()> {
    let integral = h.get(0, 0) * (4.0 * PI).sqrt();
    if integral.abs() > 1e-10 {
        return Err(Error::NonzeroMean(integral));
    }
    Ok(())
}

/// V = Qh (odd) and f = Rh (even) on the time grid.
pub fn solve_from_generator(h: &HarmonicCoeffs, ts: &[f64]) -> Result<(FieldOnDeSitter, FieldOnDeSitter)> {
    check_mean_zero(h)?;
    let v = FieldOnDeSitter::from_fn(ts, Parity::Odd, |t| spectral_q(h, t))?;
    let f = FieldOnDeSitter::from_fn(ts, Parity::Even, |t| spectral_r(h, t))?;
    Ok((v, f))
}

/// I(τ) = (cosh²τ/2π) ∫ V_t(τ,·) ω.
pub fn invariant_i(v: &FieldOnDeSitter, tau: f64) -> Result<f64> {
    let i = v.index_of(tau)?;
    let vt = v.d_dt(i)?;
    let grid = SphereGrid::new(vt.lmax().max(1));
    let samples = crate::harmonics::sht_inverse(&vt, &grid)?;
    let integral = crate::sphere::sphere_integral(&grid, &samples)?;
    Ok(tau.cosh().powi(2) / (2.0 * PI) * integral)
}

/// E(y) = R(V|_τ)(τ,y) + cosh²τ · Q(V_t|_τ)(τ,y), by quadrature transforms.
pub fn invariant_e(v: &FieldOnDeSitter, y: &SpherePoint, tau: f64) -> Result<f64> {
    let i = v.index_of(tau)?;
    let vt = v.d_dt(i)?;
    let vs = &v.slices[i];
    let cfg = TransformConfig::for_band_limit(v.lmax().max(1));
    let p = DeSitterPoint::new(tau, *y);
    let r = transform_r(|u| vs.eval(u), &p, &cfg);
    let q = transform_q(|u| vt.eval(u), &p, &cfg);
    Ok(r + tau.cosh().powi(2) * q)
}

/// Scan of both conserved quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservedReport {
    pub taus: Vec<f64>,
    pub i_values: Vec<f64>,
    /// e_values[k][j]: E at sample point j and time taus[k].
    pub e_values: Vec<Vec<f64>>,
    pub i_spread: f64,
    pub e_spread: f64,
    pub e_max_abs: f64,
}

pub fn conserved_scan(v: &FieldOnDeSitter, taus: &[f64], ys: &[SpherePoint]) -> Result<ConservedReport> {
    let i_values = taus.iter().map(|&t| invariant_i(v, t)).collect::<Result<Vec<_>>>()?;
    let e_values = taus
        .iter()
        .map(|&t| ys.iter().map(|y| invariant_e(v, y, t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let spread = |xs: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        if lo.is_finite() {
            hi - lo
        } else {
            0.0
        }
    };
    let i_spread = spread(&mut i_values.iter().cloned());
    let mut e_spread: f64 = 0.0;
    for j in 0..ys.len() {
        e_spread = e_spread.max(spread(&mut e_values.iter().map(|row| row[j])));
    }
    let e_max_abs = e_values.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(ConservedReport { taus: taus.to_vec(), i_values, e_values, i_spread, e_spread, e_max_abs })
}

/// h = Q₀⁻¹ψ + R₀⁻¹(−ξ) from the initial data ψ = V(0,·), ξ = V_t(0,·).
pub fn reconstruct_generator(psi: &HarmonicCoeffs, xi: &HarmonicCoeffs, spec: &QSpectrum) -> Result<HarmonicCoeffs> {
    let a = invert_q0_odd(psi, spec)?;
    let b = invert_r0_even(&xi.scaled(-1.0), spec)?;
    Ok(a.add(&b))
}

/// Decay of the tameness limits at the listed times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TamenessPoint {
    pub t: f64,
    /// max_y |Qh(t,y)|
    pub q_sup: f64,
    /// max_y |Rh(t,y) − h(y)|
    pub r_minus_h_sup: f64,
    /// max_y |Rh(−t,y) − h(−y)|
    pub r_minus_h_past_sup: f64,
}

pub fn tameness_curve(h: &HarmonicCoeffs, times: &[f64]) -> Result<Vec<TamenessPoint>> {
    let plan = ShtPlan::new(SphereGrid::new(h.lmax().max(1)), h.lmax())?;
    let sup = |c: &HarmonicCoeffs| -> Result<f64> { Ok(plan.inverse(c)?.iter().fold(0.0f64, |a, v| a.max(v.abs()))) };
    times
        .iter()
        .map(|&t| {
            Ok(TamenessPoint {
                t,
                q_sup: sup(&spectral_q(h, t))?,
                r_minus_h_sup: sup(&spectral_r(h, t).sub(h))?,
                r_minus_h_past_sup: sup(&spectral_r(h, -t).sub(&h.antipodal()))?,
            })
        })
        .collect()
}
