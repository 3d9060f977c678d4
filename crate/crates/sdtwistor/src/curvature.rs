//! Frames and connection forms of g_M = −V⁻²Θ² + g_{S³₁}, the lifted
//! α-plane fields on the fibre coordinate ζ, and the numerical checks:
//! torsion, Frobenius integrability, the boundary identities for the
//! deformed disks, and anti-self-duality of the Weyl tensor.
//!
//! Coordinates on M are x = (s, t, a, b) with λ = a + ib; lifted fields
//! live on (s, t, a, b, ζ). Frame indices run 0..3 with signature
//! η = diag(−1, −1, 1, 1).

use crate::harmonics::HarmonicCoeffs;
use crate::monopole::{frame_scale, metric_from_sample, MetricKind, Monopole, MonopoleField};
use crate::twistor::{fourier_split, DiskConfig};
use crate::{Error, Result};
use nalgebra::{Matrix2, Matrix4, Vector2};
use num_complex::Complex64;
use serde::Serialize;

type C = Complex64;

/// Frame signature.
pub const ETA: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];

fn d1<const N: usize>(f: impl Fn(f64) -> [f64; N], h: f64) -> [f64; N] {
    let mut out = [0.0; N];
    for (k, w) in (-2..=2).zip(D1) {
        if w == 0.0 {
            continue;
        }
        let v = f(k as f64 * h);
        for i in 0..N {
            out[i] += w * v[i] / h;
        }
    }
    out
}

fn d1c(f: impl Fn(f64) -> C, h: f64) -> C {
    (-2..=2).zip(D1).filter(|(_, w)| *w != 0.0).map(|(k, w)| f(k as f64 * h) * w).sum::<C>() / h
}

/// Orthonormal frame of g_M at a point: columns of `vectors` are E₀..E₃
/// in (s, t, a, b) components, rows of `coframe` are E⁰..E³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameAtPoint {
    pub t: f64,
    pub lambda: C,
    pub vectors: Matrix4<f64>,
    pub coframe: Matrix4<f64>,
    /// Base frame Ē₁..Ē₃ in (t, a, b) components (rows).
    pub base: [[f64; 3]; 3],
}

/// E₀ = V∂_s, E_j = Ē_j − A_j ∂_s.
pub fn frame_at<M: MonopoleField>(m: &M, t: f64, lambda: C) -> Result<FrameAtPoint> {
    let f = m.sample(t, lambda);
    if f.v <= 0.0 {
        return Err(Error::NonPositiveV(f.v));
    }
    let rho = frame_scale(t, lambda);
    #[rustfmt::skip]
    let vectors = Matrix4::new(
        f.v, -f.a[0], -f.a[1], -f.a[2],
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, rho, 0.0,
        0.0, 0.0, 0.0, rho,
    );
    let coframe = vectors.try_inverse().ok_or(Error::DegenerateSpan)?;
    Ok(FrameAtPoint { t, lambda, vectors, coframe, base: [[1.0, 0.0, 0.0], [0.0, rho, 0.0], [0.0, 0.0, rho]] })
}

impl FrameAtPoint {
    /// max |g(E_i, E_j) − η_ij|.
    pub fn orthonormality_residual(&self, g: &Matrix4<f64>) -> f64 {
        let gram = self.vectors.transpose() * g * self.vectors;
        let mut r: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { ETA[i] } else { 0.0 };
                r = r.max((gram[(i, j)] - e).abs());
            }
        }
        r
    }
}

/// Metric g_M at (t, λ) in (s, t, a, b) coordinates.
pub fn reduced_metric<M: MonopoleField>(m: &M, t: f64, lambda: C) -> Matrix4<f64> {
    metric_from_sample(&m.sample(t, lambda), t, lambda, MetricKind::Reduced)
}

/// Connection forms at a point: `omega[i][j][k] = ω^i_j(E_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConnectionSample {
    pub t: f64,
    pub lambda: [f64; 2],
    /// ν_j = V⁻¹Ē_jV
    pub nu: [f64; 3],
    pub omega: [[[f64; 4]; 4]; 4],
    /// Base connection ω̲^i_j(Ē_k) for i, j, k ∈ 1..3 (index 0 unused).
    pub base_omega: [[[f64; 4]; 4]; 4],
}

impl ConnectionSample {
    /// Induced connection on Λ₊: η¹₂ = ω¹₂ − ω⁰₃, η¹₃ = ω¹₃ + ω⁰₂,
    /// η²₃ = ω²₃ − ω⁰₁, as components on E₀..E₃.
    pub fn eta(&self, i: usize, j: usize) -> Result<[f64; 4]> {
        let w = &self.omega;
        let (p, q, sign) = match (i, j) {
            (1, 2) => ((1, 2), (0, 3), -1.0),
            (1, 3) => ((1, 3), (0, 2), 1.0),
            (2, 3) => ((2, 3), (0, 1), -1.0),
            _ => return Err(Error::Config(format!("no η^{i}_{j} component"))),
        };
        Ok(std::array::from_fn(|k| w[p.0][p.1][k] + sign * w[q.0][q.1][k]))
    }

    /// Value of ω^i_j on a vector with frame components c.
    pub fn apply(&self, i: usize, j: usize, c: &[f64; 4]) -> f64 {
        (0..4).map(|k| self.omega[i][j][k] * c[k]).sum()
    }
}

/// Base connection of S³₁ in the chart frame: ω̲¹₂ = tanh t Ē²,
/// ω̲¹₃ = tanh t Ē³, ω̲²₃ = (−Im λ Ē² + Re λ Ē³)/cosh t.
pub fn base_connection(t: f64, lambda: C) -> [[[f64; 4]; 4]; 4] {
    let mut w = [[[0.0; 4]; 4]; 4];
    let th = t.tanh();
    let ch = t.cosh();
    w[1][2] = [0.0, 0.0, th, 0.0];
    w[1][3] = [0.0, 0.0, 0.0, th];
    w[2][3] = [0.0, 0.0, -lambda.im / ch, lambda.re / ch];
    complete_symmetry(&mut w);
    w
}

/// Fill ω^j_i = −η^{jj}η_{ii} ω^i_j from the upper triangle.
fn complete_symmetry(w: &mut [[[f64; 4]; 4]; 4]) {
    for i in 0..4 {
        for j in i + 1..4 {
            let s = -ETA[j] * ETA[i];
            for k in 0..4 {
                w[j][i][k] = s * w[i][j][k];
            }
        }
    }
}

/// Connection forms of g_M assembled from ν_j and the base connection.
pub fn connection_at<M: MonopoleField>(m: &M, t: f64, lambda: C) -> Result<ConnectionSample> {
    let f = m.sample(t, lambda);
    if f.v <= 0.0 {
        return Err(Error::NonPositiveV(f.v));
    }
    let nu = [f.ev[0] / f.v, f.ev[1] / f.v, f.ev[2] / f.v];
    let base = base_connection(t, lambda);
    let mut w = [[[0.0; 4]; 4]; 4];
    w[0][1] = [-nu[0], 0.0, 0.5 * nu[2], -0.5 * nu[1]];
    w[0][2] = [-nu[1], -0.5 * nu[2], 0.0, -0.5 * nu[0]];
    w[0][3] = [-nu[2], 0.5 * nu[1], 0.5 * nu[0], 0.0];
    for (i, j, c) in [(1, 2, -0.5 * nu[2]), (1, 3, 0.5 * nu[1]), (2, 3, -0.5 * nu[0])] {
        w[i][j] = base[i][j];
        w[i][j][0] = c;
    }
    complete_symmetry(&mut w);
    Ok(ConnectionSample { t, lambda: [lambda.re, lambda.im], nu, omega: w, base_omega: base })
}

/// Bracket [E_a, E_b] in coordinates from fourth-order differences of the
/// frame components.
fn frame_brackets<M: MonopoleField>(m: &M, t: f64, lambda: C, step: f64) -> Result<[[[f64; 4]; 4]; 4]> {
    let fr = frame_at(m, t, lambda)?;
    // derivative of the frame matrix along each coordinate (s-independent)
    let dcoord = |c: usize| -> [f64; 16] {
        if c == 0 {
            return [0.0; 16];
        }
        d1(
            |e| {
                let (tt, a, b) = match c {
                    1 => (t + e, lambda.re, lambda.im),
                    2 => (t, lambda.re + e, lambda.im),
                    _ => (t, lambda.re, lambda.im + e),
                };
                let v = frame_at(m, tt, C::new(a, b)).map(|f| f.vectors).unwrap_or_else(|_| Matrix4::from_element(f64::NAN));
                std::array::from_fn(|k| v[(k % 4, k / 4)])
            },
            step,
        )
    };
    let dv: Vec<[f64; 16]> = (0..4).map(dcoord).collect();
    let mut out = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for i in 0..4 {
                let mut s = 0.0;
                for j in 0..4 {
                    // E_a(E_b^i) − E_b(E_a^i)
                    s += fr.vectors[(j, a)] * dv[j][b * 4 + i] - fr.vectors[(j, b)] * dv[j][a * 4 + i];
                }
                out[a][b][i] = s;
            }
        }
    }
    Ok(out)
}

/// max over j, a, b of |dE^j(E_a,E_b) + ω^j_b(E_a) − ω^j_a(E_b)|.
pub fn torsion_residual<M: MonopoleField>(m: &M, t: f64, lambda: C, step: f64) -> Result<f64> {
    let fr = frame_at(m, t, lambda)?;
    let w = connection_at(m, t, lambda)?.omega;
    let br = frame_brackets(m, t, lambda, step)?;
    let mut r: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for j in 0..4 {
                let de: f64 = -(0..4).map(|i| fr.coframe[(j, i)] * br[a][b][i]).sum::<f64>();
                r = r.max((de + w[j][b][a] - w[j][a][b]).abs());
            }
        }
    }
    Ok(r)
}

/// Residual of dE⁰ = E⁰∧(ν·E) − ν₁E²³ − ν₂E¹³ + ν₃E¹², compared on all
/// pairs of frame vectors.
pub fn de0_residual<M: MonopoleField>(m: &M, t: f64, lambda: C, step: f64) -> Result<f64> {
    let fr = frame_at(m, t, lambda)?;
    let nu = connection_at(m, t, lambda)?.nu;
    let br = frame_brackets(m, t, lambda, step)?;
    let mut rhs = [[0.0; 4]; 4];
    let mut put = |a: usize, b: usize, v: f64| {
        rhs[a][b] += v;
        rhs[b][a] -= v;
    };
    for j in 0..3 {
        put(0, j + 1, nu[j]);
    }
    put(2, 3, -nu[0]);
    put(1, 3, -nu[1]);
    put(1, 2, nu[2]);
    let mut r: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let de: f64 = -(0..4).map(|i| fr.coframe[(0, i)] * br[a][b][i]).sum::<f64>();
            r = r.max((de - rhs[a][b]).abs());
        }
    }
    Ok(r)
}

/// Metric, first and second coordinate derivatives by fourth-order
/// differences. `dg[c]` is ∂_c g and `ddg[c][d]` is ∂_c∂_d g.
type MetricJet = (Matrix4<f64>, [Matrix4<f64>; 4], [[Matrix4<f64>; 4]; 4]);

fn metric_jet(g: &impl Fn([f64; 4]) -> Matrix4<f64>, x: [f64; 4], h: f64) -> MetricJet {
    let at = |dx: [f64; 4]| g(std::array::from_fn(|i| x[i] + dx[i]));
    let unit = |c: usize, s: f64| -> [f64; 4] { std::array::from_fn(|i| if i == c { s } else { 0.0 }) };
    let g0 = at([0.0; 4]);
    let mut dg = [Matrix4::zeros(); 4];
    let mut ddg = [[Matrix4::zeros(); 4]; 4];
    for c in 0..4 {
        for (k, (w1, w2)) in (-2..=2).zip(D1.iter().zip(D2)) {
            let v = if k == 0 { g0 } else { at(unit(c, k as f64 * h)) };
            dg[c] += v * (*w1 / h);
            ddg[c][c] += v * (w2 / (h * h));
        }
    }
    for c in 0..4 {
        for d in c + 1..4 {
            let mut acc = Matrix4::zeros();
            for (kc, wc) in (-2..=2).zip(D1) {
                for (kd, wd) in (-2..=2).zip(D1) {
                    if wc == 0.0 || wd == 0.0 {
                        continue;
                    }
                    let mut dx = [0.0; 4];
                    dx[c] = kc as f64 * h;
                    dx[d] = kd as f64 * h;
                    acc += at(dx) * (wc * wd / (h * h));
                }
            }
            ddg[c][d] = acc;
            ddg[d][c] = acc;
        }
    }
    (g0, dg, ddg)
}

/// Christoffel symbols Γ^e_{bc} (index [e][b][c]) from a metric jet.
fn christoffel(g: &Matrix4<f64>, dg: &[Matrix4<f64>; 4]) -> Result<[[[f64; 4]; 4]; 4]> {
    let gi = g.try_inverse().ok_or(Error::DegenerateSpan)?;
    let mut out = [[[0.0; 4]; 4]; 4];
    for e in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                out[e][b][c] = (0..4)
                    .map(|f| 0.5 * gi[(e, f)] * (dg[c][(f, b)] + dg[b][(f, c)] - dg[f][(b, c)]))
                    .sum();
            }
        }
    }
    Ok(out)
}

/// max |ω^a_b(E_c) − E^a(∇_{E_c}E_b)| with ∇ from metric Christoffels.
pub fn christoffel_residual<M: MonopoleField>(m: &M, t: f64, lambda: C, step: f64) -> Result<f64> {
    let fr = frame_at(m, t, lambda)?;
    let w = connection_at(m, t, lambda)?.omega;
    let gfun = |x: [f64; 4]| reduced_metric(m, x[1], C::new(x[2], x[3]));
    let x = [0.0, t, lambda.re, lambda.im];
    let (g, dg, _) = metric_jet(&gfun, x, step);
    let gam = christoffel(&g, &dg)?;
    let frame_fd = |c: usize| -> [f64; 16] {
        if c == 0 {
            return [0.0; 16];
        }
        d1(
            |e| {
                let mut y = x;
                y[c] += e;
                let v = frame_at(m, y[1], C::new(y[2], y[3])).map(|f| f.vectors).unwrap_or_else(|_| Matrix4::from_element(f64::NAN));
                std::array::from_fn(|k| v[(k % 4, k / 4)])
            },
            step,
        )
    };
    let dv: Vec<[f64; 16]> = (0..4).map(frame_fd).collect();
    let mut r: f64 = 0.0;
    for b in 0..4 {
        for c in 0..4 {
            let mut nab = [0.0; 4];
            for (i, ni) in nab.iter_mut().enumerate() {
                for j in 0..4 {
                    *ni += fr.vectors[(j, c)] * dv[j][b * 4 + i];
                    for k in 0..4 {
                        *ni += gam[i][j][k] * fr.vectors[(j, c)] * fr.vectors[(k, b)];
                    }
                }
            }
            for a in 0..4 {
                let val: f64 = (0..4).map(|i| fr.coframe[(a, i)] * nab[i]).sum();
                r = r.max((val - w[a][b][c]).abs());
            }
        }
    }
    Ok(r)
}

/// Lifted α-plane fields at (t, λ, ζ): components on (s, t, a, b, ζ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftedField {
    pub t: f64,
    pub lambda: [f64; 2],
    pub zeta: f64,
    /// Γ̃₁ and Γ̃₂.
    pub fields: [[f64; 5]; 2],
    /// Fibre components from the S³₁ lifts (γ₁, γ₂), an independent path.
    pub base_fibre: [f64; 2],
    /// ∂_s components −(Vζ + A(Γ̲₁)) and −(V + A(Γ̲₂)).
    pub s_components: [f64; 2],
}

/// Frame coefficients of Γ₁(ζ) = −ζE₀ − E₁ + E₂ + ζE₃ and
/// Γ₂(ζ) = −E₀ + ζE₁ + ζE₂ − E₃.
pub fn alpha_plane_coefficients(zeta: f64) -> [[f64; 4]; 2] {
    [[-zeta, -1.0, 1.0, zeta], [-1.0, zeta, zeta, -1.0]]
}

/// Fibre components γ₁, γ₂ of the S³₁ lifts of Γ̲₁, Γ̲₂:
/// Ψ(−Im λ + ζ Re λ − ζ sinh t) and Ψ(−ζ Im λ − Re λ − sinh t)
/// with Ψ = (1+ζ²)/(2 cosh t).
pub fn base_lift_fibre(t: f64, lambda: C, zeta: f64) -> [f64; 2] {
    let psi = (1.0 + zeta * zeta) / (2.0 * t.cosh());
    [
        psi * (-lambda.im + zeta * lambda.re - zeta * t.sinh()),
        psi * (-zeta * lambda.im - lambda.re - t.sinh()),
    ]
}

/// S³₁ lifts Γ̲̃₁, Γ̲̃₂ on (t, a, b, ζ).
pub fn base_lifts(t: f64, lambda: C, zeta: f64) -> [[f64; 4]; 2] {
    let rho = frame_scale(t, lambda);
    let g = base_lift_fibre(t, lambda, zeta);
    [[-1.0, rho, zeta * rho, g[0]], [zeta, zeta * rho, -rho, g[1]]]
}

pub fn lifted_fields<M: MonopoleField>(m: &M, t: f64, lambda: C, zeta: f64) -> Result<LiftedField> {
    let f = m.sample(t, lambda);
    let conn = connection_at(m, t, lambda)?;
    let rho = frame_scale(t, lambda);
    let (e23, e13, e12) = (conn.eta(2, 3)?, conn.eta(1, 3)?, conn.eta(1, 2)?);
    let z2 = zeta * zeta;
    let mut fields = [[0.0; 5]; 2];
    for (n, c) in alpha_plane_coefficients(zeta).iter().enumerate() {
        let on = |e: &[f64; 4]| (0..4).map(|k| e[k] * c[k]).sum::<f64>();
        let fibre = 0.5 * ((1.0 + z2) * on(&e23) + (1.0 - z2) * on(&e13) - 2.0 * zeta * on(&e12));
        fields[n] = [c[0] * f.v - c[1] * f.a[0] - c[2] * f.a[1] - c[3] * f.a[2], c[1], rho * c[2], rho * c[3], fibre];
    }
    let a_g1 = -f.a[0] + f.a[1] + zeta * f.a[2];
    let a_g2 = zeta * f.a[0] + zeta * f.a[1] - f.a[2];
    Ok(LiftedField {
        t,
        lambda: [lambda.re, lambda.im],
        zeta,
        fields,
        base_fibre: base_lift_fibre(t, lambda, zeta),
        s_components: [-(f.v * zeta + a_g1), -(f.v + a_g2)],
    })
}

/// Norm of the part of [Γ̃₁, Γ̃₂] outside span{Γ̃₁, Γ̃₂} (Euclidean least
/// squares in (s, t, a, b, ζ)); brackets by fourth-order directional
/// differences of step `step`.
pub fn frobenius_residual<M: MonopoleField>(m: &M, t: f64, lambda: C, zeta: f64, step: f64) -> Result<f64> {
    let field = |x: [f64; 5], n: usize| -> [f64; 5] {
        lifted_fields(m, x[1], C::new(x[2], x[3]), x[4]).map(|l| l.fields[n]).unwrap_or([f64::NAN; 5])
    };
    let x0 = [0.0, t, lambda.re, lambda.im, zeta];
    let x = field(x0, 0);
    let y = field(x0, 1);
    let along = |v: [f64; 5], n: usize| d1(|e| field(std::array::from_fn(|i| x0[i] + e * v[i]), n), step);
    let ydx = along(x, 1);
    let xdy = along(y, 0);
    let br: [f64; 5] = std::array::from_fn(|i| ydx[i] - xdy[i]);
    if br.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonPositiveV(f64::NAN));
    }
    let dot = |a: &[f64; 5], b: &[f64; 5]| (0..5).map(|i| a[i] * b[i]).sum::<f64>();
    let gram = Matrix2::new(dot(&x, &x), dot(&x, &y), dot(&x, &y), dot(&y, &y));
    if gram.determinant() <= 1e-12 * gram[(0, 0)] * gram[(1, 1)] {
        return Err(Error::DegenerateSpan);
    }
    let coef = gram.lu().solve(&Vector2::new(dot(&x, &br), dot(&y, &br))).ok_or(Error::DegenerateSpan)?;
    Ok((0..5).map(|i| (br[i] - coef[0] * x[i] - coef[1] * y[i]).powi(2)).sum::<f64>().sqrt())
}

/// ζ = i(1−ω)/(1+ω) for ω on the unit circle (ω ≠ −1).
pub fn zeta_of_omega(omega: C) -> Result<f64> {
    if (omega + 1.0).norm() < 1e-12 {
        return Err(Error::Infinite);
    }
    Ok((C::new(0.0, 1.0) * (1.0 - omega) / (1.0 + omega)).re)
}

/// Residuals of the two boundary identities and of Γ̃₁Φ = iζΦ, Γ̃₂Φ = iΦ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftIdentityResidual {
    pub t: f64,
    pub lambda: [f64; 2],
    pub zeta: f64,
    /// |Γ̃_j(2H₊+H₀) − RHS_j|
    pub identity: [f64; 2],
    /// |Γ̃₁Φ − iζΦ|, |Γ̃₂Φ − iΦ|
    pub phi: [f64; 2],
}

/// Evaluate both sides of Γ̃₁(2H₊+H₀) = i((V−1)ζ + A(Γ₁)) and
/// Γ̃₂(2H₊+H₀) = i((V−1) + A(Γ₂)) at (t, λ, ω).
pub fn lift_identity_residual(h: &HarmonicCoeffs, t: f64, lambda: C, omega: C, step: f64, cfg: &DiskConfig) -> Result<LiftIdentityResidual> {
    let m = Monopole::from_generator(h)?;
    let zeta = zeta_of_omega(omega)?;
    let i = C::new(0.0, 1.0);
    let dw_dz = -2.0 * i / (i + zeta).powi(2);
    let rho = frame_scale(t, lambda);
    let gamma = base_lift_fibre(t, lambda, zeta);
    let dirs = [[-1.0, rho, zeta * rho], [zeta, zeta * rho, -rho]];
    let big_h = |tt: f64, a: f64, b: f64| -> C {
        match fourier_split(h, 0.0, tt, C::new(a, b), cfg.k, cfg.n, cfg.tail_tol) {
            Ok(bm) => bm.h_plus(omega) * 2.0 + bm.h0(),
            Err(_) => C::new(f64::NAN, f64::NAN),
        }
    };
    let bm = fourier_split(h, 0.0, t, lambda, cfg.k, cfg.n, cfg.tail_tol)?;
    let dh_dz = bm.h_plus_prime(omega) * 2.0 * dw_dz;
    let phi = |tt: f64, l: C, w: C| -i * (l.conj() * w + tt.exp()) / (l + tt.exp() * w);
    let et = t.exp();
    let dphi_dz = -i * (lambda.norm_sqr() - et * et) / (lambda + et * omega).powi(2) * dw_dz;
    let phi0 = phi(t, lambda, omega);
    let f = m.sample(t, lambda);
    let rhs = [
        i * ((f.v - 1.0) * zeta + (-f.a[0] + f.a[1] + zeta * f.a[2])),
        i * ((f.v - 1.0) + (zeta * f.a[0] + zeta * f.a[1] - f.a[2])),
    ];
    let phi_rhs = [i * zeta * phi0, i * phi0];
    let mut identity = [0.0; 2];
    let mut phir = [0.0; 2];
    for n in 0..2 {
        let d = dirs[n];
        let lhs = d1c(|e| big_h(t + e * d[0], lambda.re + e * d[1], lambda.im + e * d[2]), step) + dh_dz * gamma[n];
        identity[n] = (lhs - rhs[n]).norm();
        let lphi = d1c(|e| phi(t + e * d[0], C::new(lambda.re + e * d[1], lambda.im + e * d[2]), omega), step) + dphi_dz * gamma[n];
        phir[n] = (lphi - phi_rhs[n]).norm();
    }
    Ok(LiftIdentityResidual { t, lambda: [lambda.re, lambda.im], zeta, identity, phi: phir })
}

/// Norms of the Weyl tensor restricted to Λ₊ and Λ₋.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsdReport {
    pub self_dual: f64,
    pub anti_self_dual: f64,
    /// self_dual / (√(self_dual² + anti_self_dual²) + floor)
    pub relative: f64,
    pub step: f64,
}

/// Floor in the relative self-dual measure: Weyl norms this small are
/// treated as zero. Roundoff in the fourth-order second differences at
/// step 1e-3 reaches a few 1e-9 in frame components, while the curvature
/// of the monopole metrics under test is of order 1e-1; the floor sits
/// between the two so conformally flat metrics read as ≈ 0 instead of 0/0.
pub const ASD_FLOOR: f64 = 1e-4;

/// Orthonormal frame by Gram–Schmidt on (∂_s, ∂_t, ∂_a, ∂_b) with the
/// signature pattern (−, −, +, +); columns are frame vectors.
pub fn gram_schmidt_frame(g: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let mut e: Matrix4<f64> = Matrix4::zeros();
    for k in 0..4 {
        let mut v: nalgebra::Vector4<f64> = nalgebra::Vector4::zeros();
        v[k] = 1.0;
        for j in 0..k {
            let ej = e.column(j).into_owned();
            let p = (v.transpose() * g * ej)[0] * ETA[j];
            v -= ej * p;
        }
        let n = (v.transpose() * g * v)[0];
        if n * ETA[k] <= 0.0 {
            return Err(Error::DegenerateSpan);
        }
        e.set_column(k, &(v / n.abs().sqrt()));
    }
    Ok(e)
}

/// Bivector bases of Λ₊ and Λ₋ in frame indices.
fn bivectors() -> [[[f64; 4]; 4]; 6] {
    let mut out = [[[0.0; 4]; 4]; 6];
    let pairs = [((0, 1), (2, 3), 1.0), ((0, 2), (1, 3), 1.0), ((0, 3), (1, 2), -1.0)];
    for (n, &((a, b), (c, d), s)) in pairs.iter().enumerate() {
        for (k, sign) in [(n, 1.0), (n + 3, -1.0)] {
            let w = s * sign;
            out[k][a][b] = 1.0;
            out[k][b][a] = -1.0;
            out[k][c][d] = w;
            out[k][d][c] = -w;
        }
    }
    out
}

/// Self-dual and anti-self-dual Weyl norms of an arbitrary metric field at
/// x, by fourth-order differences.
pub fn asd_residual_of_metric(g: impl Fn([f64; 4]) -> Matrix4<f64>, x: [f64; 4], step: f64) -> Result<AsdReport> {
    let (g0, dg, ddg) = metric_jet(&g, x, step);
    let gam = christoffel(&g0, &dg)?;
    let gi = g0.try_inverse().ok_or(Error::DegenerateSpan)?;
    // Riemann R_{abcd}
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut v = 0.5 * (ddg[b][c][(a, d)] + ddg[a][d][(b, c)] - ddg[b][d][(a, c)] - ddg[a][c][(b, d)]);
                    for e in 0..4 {
                        for f in 0..4 {
                            v += g0[(e, f)] * (gam[e][b][c] * gam[f][a][d] - gam[e][b][d] * gam[f][a][c]);
                        }
                    }
                    r[a][b][c][d] = v;
                }
            }
        }
    }
    let mut ric: Matrix4<f64> = Matrix4::zeros();
    for b in 0..4 {
        for d in 0..4 {
            ric[(b, d)] = (0..4).flat_map(|a| (0..4).map(move |c| (a, c))).map(|(a, c)| gi[(a, c)] * r[a][b][c][d]).sum();
        }
    }
    let scal: f64 = (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| gi[(a, b)] * ric[(a, b)]).sum();
    let e = gram_schmidt_frame(&g0)?;
    // Weyl in coordinates then frame components
    let mut wc = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    wc[a][b][c][d] = r[a][b][c][d]
                        - 0.5 * (g0[(a, c)] * ric[(b, d)] - g0[(a, d)] * ric[(b, c)] - g0[(b, c)] * ric[(a, d)] + g0[(b, d)] * ric[(a, c)])
                        + scal / 6.0 * (g0[(a, c)] * g0[(b, d)] - g0[(a, d)] * g0[(b, c)]);
                }
            }
        }
    }
    let to_frame = |t4: &[[[[f64; 4]; 4]; 4]; 4]| {
        // contract one index at a time
        let mut cur = *t4;
        for slot in 0..4 {
            let mut next = [[[[0.0; 4]; 4]; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            let idx = [i, j, k, l];
                            let mut s = 0.0;
                            for p in 0..4 {
                                let mut src = idx;
                                src[slot] = p;
                                s += e[(p, idx[slot])] * cur[src[0]][src[1]][src[2]][src[3]];
                            }
                            next[i][j][k][l] = s;
                        }
                    }
                }
            }
            cur = next;
        }
        cur
    };
    let wf = to_frame(&wc);
    let bv = bivectors();
    let pair = |p: usize, q: usize| -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        s += wf[i][j][k][l] * bv[p][i][j] * bv[q][k][l];
                    }
                }
            }
        }
        0.25 * s
    };
    let block = |off: usize| -> f64 {
        let mut s = 0.0;
        for p in 0..3 {
            for q in 0..3 {
                s += pair(p + off, q + off).powi(2);
            }
        }
        s.sqrt()
    };
    let sd = block(0);
    let asd = block(3);
    Ok(AsdReport { self_dual: sd, anti_self_dual: asd, relative: sd / ((sd * sd + asd * asd).sqrt() + ASD_FLOOR), step })
}

/// Anti-self-duality check of a monopole metric (g_M, or the compactified
/// metric as a conformal cross-check) at (t, λ).
pub fn asd_residual<M: MonopoleField>(m: &M, t: f64, lambda: C, step: f64, kind: MetricKind) -> Result<AsdReport> {
    if lambda.norm() > 1e3 {
        return Err(Error::OffGrid(lambda.norm()));
    }
    let f = m.sample(t, lambda);
    if f.v <= 0.0 {
        return Err(Error::NonPositiveV(f.v));
    }
    let g = |x: [f64; 4]| {
        let l = C::new(x[2], x[3]);
        metric_from_sample(&m.sample(x[1], l), x[1], l, kind)
    };
    asd_residual_of_metric(g, [0.0, t, lambda.re, lambda.im], step)
}

/// −ds² − dt² + 4(da² + db²)/(1+|λ|²)²: flat 2-space times the round
/// sphere, whose Weyl tensor has equal self-dual and anti-self-dual parts.
pub fn negative_control_metric(x: [f64; 4]) -> Matrix4<f64> {
    let c = 4.0 / (1.0 + x[2] * x[2] + x[3] * x[3]).powi(2);
    Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, -1.0, c, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monopole::TodMonopole;

    #[test]
    fn trivial_connection_is_base_connection() {
        let t = 0.4;
        let l = C::new(0.3, -0.2);
        let c = connection_at(&Monopole::trivial(), t, l).unwrap();
        for j in 1..4 {
            assert_eq!(c.omega[0][j], [0.0; 4]);
        }
        assert!((c.omega[1][2][2] - t.tanh()).abs() < 1e-15);
        assert!((c.omega[1][3][3] - t.tanh()).abs() < 1e-15);
        assert_eq!(c.omega[2][1], c.omega[1][2]);
        assert_eq!(c.omega[3][2][2], -c.omega[2][3][2]);
    }

    #[test]
    fn frame_is_orthonormal() {
        let m = TodMonopole::new(&[(1, 0, 0.3), (2, 1, 0.1)]).unwrap();
        let l = C::new(0.5, 0.7);
        let fr = frame_at(&m, 0.2, l).unwrap();
        assert!(fr.orthonormality_residual(&reduced_metric(&m, 0.2, l)) < 1e-12);
    }

    #[test]
    fn torsion_and_christoffel_vanish_for_tod() {
        let m = TodMonopole::new(&[(1, 0, 0.3)]).unwrap();
        let l = C::new(-0.4, 0.6);
        assert!(torsion_residual(&m, 0.3, l, 1e-3).unwrap() < 1e-6);
        assert!(christoffel_residual(&m, 0.3, l, 1e-3).unwrap() < 1e-5);
        assert!(de0_residual(&m, 0.3, l, 1e-3).unwrap() < 1e-6);
    }

    #[test]
    fn lifted_fields_at_zero_zeta() {
        let l = C::new(0.1, 0.2);
        let lf = lifted_fields(&Monopole::trivial(), 0.5, l, 0.0).unwrap();
        let rho = frame_scale(0.5, l);
        assert_eq!(lf.fields[0][..4], [0.0, -1.0, rho, 0.0]);
        assert_eq!(lf.fields[1][..4], [-1.0, 0.0, 0.0, -rho]);
    }

    #[test]
    fn gram_schmidt_reproduces_frame() {
        let m = TodMonopole::new(&[(1, 1, 0.2)]).unwrap();
        let l = C::new(0.2, -0.9);
        let g = reduced_metric(&m, -0.3, l);
        let e = gram_schmidt_frame(&g).unwrap();
        let fr = frame_at(&m, -0.3, l).unwrap();
        assert!((e - fr.vectors).abs().max() < 1e-12);
    }

    #[test]
    fn control_metric_is_not_asd() {
        let r = asd_residual_of_metric(negative_control_metric, [0.0, 0.1, 0.3, 0.2], 1e-3).unwrap();
        assert!((r.relative - 0.5f64.sqrt()).abs() < 1e-3, "{r:?}");
    }
}
