//! Subcommand implementations. Each returns whether every check passed.

use crate::config::{DiskParams, RunConfig};
use crate::error::{CliError, Stage};
use crate::report::{Check, OutDir, Report};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sdtwistor::curvature::{asd_residual, asd_residual_of_metric, frobenius_residual, negative_control_metric, lift_identity_residual};
use sdtwistor::harmonics::{gauss_legendre, legendre_p, HarmonicCoeffs};
use sdtwistor::monopole::*;
use sdtwistor::sphere::{stereographic, DeSitterPoint, Lambda, SpherePoint};
use sdtwistor::transforms::{identity_residuals, QSpectrum};
use sdtwistor::twistor::*;
use sdtwistor::wave::*;
use std::f64::consts::PI;

/// Sample region for pointwise checks: |t| < 1.5, |λ| < 1.5.
const SAMPLE_T: f64 = 1.5;
const SAMPLE_RADIUS: f64 = 1.5;

struct Sampler(ChaCha8Rng);

impl Sampler {
    /// Independent stream per purpose so adding a check never shifts others.
    fn new(seed: u64, stream: u64) -> Self {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        Self(r)
    }

    fn t(&mut self) -> f64 {
        self.0.gen_range(-SAMPLE_T..SAMPLE_T)
    }

    fn lambda(&mut self, radius: f64) -> C {
        loop {
            let z = C::new(self.0.gen_range(-radius..radius), self.0.gen_range(-radius..radius));
            if z.norm() < radius {
                return z;
            }
        }
    }

    fn sphere(&mut self) -> SpherePoint {
        loop {
            let v = [self.0.gen_range(-1.0..1.0), self.0.gen_range(-1.0..1.0), self.0.gen_range(-1.0..1.0)];
            let n2: f64 = v.iter().map(|x| x * x).sum();
            if n2 > 1e-4 && n2 <= 1.0 {
                return SpherePoint::new(v).expect("nonzero");
            }
        }
    }

    fn base_points(&mut self, n: usize) -> Vec<BasePoint> {
        (0..n).map(|_| BasePoint::new(self.t(), self.lambda(SAMPLE_RADIUS))).collect()
    }
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn disk_config(cfg: &RunConfig) -> DiskConfig {
    DiskConfig { k: cfg.fourier_k, n: cfg.fourier_n, tail_tol: 1e-20 }
}

fn generator(cfg: &RunConfig) -> Result<HarmonicCoeffs, CliError> {
    let h = cfg.generator_coeffs()?;
    check_mean_zero(&h).stage("generator")?;
    Ok(h)
}

/// Probe of g(t) = Rh(t,λ) + t at the admissibility witness.
fn witness_probe(h: &HarmonicCoeffs, adm: &AdmissibilityReport, cfg: &RunConfig) -> Result<Option<ProbeReport>, CliError> {
    let y = SpherePoint::new(adm.witness_y).stage("probe")?;
    let Lambda::Finite(l) = stereographic(&y) else { return Ok(None) };
    let ts = time_grid(cfg.t_max.max(6.0), 1201);
    Ok(Some(nonadmissible_probe(h, l, &ts).stage("probe")?))
}

// ---------------------------------------------------------------- eigen

#[derive(Serialize)]
struct EigenRow {
    l: usize,
    c_q: f64,
    c_r: f64,
    closed_form: f64,
    ratio: Option<f64>,
    hemisphere_oracle: f64,
}

#[derive(Serialize)]
struct EigenDetails {
    normalization: String,
    scaled_odd_spread: f64,
    scaled_odd_spread_from_l3: f64,
    table: &'static str,
}

/// ∫₀¹ P_l(z) dz by Gauss–Legendre on [0, 1].
fn hemisphere_oracle(l: usize) -> f64 {
    let (x, w) = gauss_legendre(l / 2 + 2);
    x.iter().zip(&w).map(|(x, w)| 0.5 * w * legendre_p(l, 0.5 * (x + 1.0)).expect("in domain")).sum()
}

fn spread(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let med = s[s.len() / 2];
    max_of(v.iter().map(|x| (x - med).abs() / med))
}

pub fn eigen(cfg: &RunConfig, out: &OutDir) -> Result<bool, CliError> {
    let n = cfg.eigen_lmax;
    let spec = QSpectrum::compute(n);
    let rows: Vec<EigenRow> = (0..=n)
        .map(|l| EigenRow {
            l,
            c_q: spec.c_q[l],
            c_r: spec.c_r[l],
            closed_form: spec.closed_form[l],
            ratio: spec.ratio(l),
            hemisphere_oracle: hemisphere_oracle(l),
        })
        .collect();
    let odd: Vec<f64> = (1..=n).step_by(2).map(|l| spec.c_q[l]).collect();
    let scaled: Vec<f64> = (1..=n).step_by(2).map(|l| spec.c_q[l].abs() * (l as f64).powf(1.5)).collect();
    let even_max = max_of((2..=n).step_by(2).map(|l| spec.c_q[l].abs()));
    let oracle_gap = max_of(rows.iter().map(|r| (r.c_q - r.hemisphere_oracle).abs()));
    let checks = vec![
        Check::condition("c_q(0) = 1", (spec.c_q[0] - 1.0).abs(), (spec.c_q[0] - 1.0).abs() < 1e-10),
        Check::condition("c_q(even > 0) = 0", even_max, even_max < 1e-10),
        Check::condition("c_q(1) = 1/2", (spec.c_q[1] - 0.5).abs(), (spec.c_q[1] - 0.5).abs() < 1e-9),
        Check::condition("odd signs alternate", odd.len() as f64, odd.windows(2).all(|w| w[0] * w[1] < 0.0)),
        Check::condition("odd magnitudes decrease", odd.len() as f64, odd.windows(2).all(|w| w[1].abs() < w[0].abs())),
        Check::condition("quadrature oracle agreement", oracle_gap, oracle_gap < 1e-9),
    ];
    out.write_csv("eigen.csv", &rows)?;
    let details = EigenDetails {
        normalization: format!("{:?}", spec.normalization),
        scaled_odd_spread: spread(&scaled),
        scaled_odd_spread_from_l3: spread(&scaled[1..]),
        table: "eigen.csv",
    };
    let rep = Report::new("eigen", cfg, checks, details);
    out.write_json("eigen.json", &rep)?;
    Ok(rep.all_pass)
}

// --------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyDetails {
    generator: Vec<f64>,
    admissibility: AdmissibilityReport,
    probe: Option<ProbeReport>,
    identity_orders: Vec<f64>,
    conservation_taus: Vec<f64>,
    invariant_i: Vec<f64>,
}

pub fn verify(cfg: &RunConfig, out: &OutDir) -> Result<bool, CliError> {
    let h = generator(cfg)?;
    let mut checks = Vec::new();
    let adm = admissibility_check(&h, &ScanConfig::for_band_limit(cfg.band_limit)).stage("admissibility")?;
    checks.push(Check::condition("admissibility margin", adm.margin, adm.admissible));
    let probe = if adm.admissible { None } else { witness_probe(&h, &adm, cfg)? };

    // transforms
    let mut s = Sampler::new(cfg.seed, 1);
    let pts: Vec<DeSitterPoint> = (0..cfg.samples).map(|_| DeSitterPoint::new(s.t(), s.sphere())).collect();
    let id = identity_residuals(&h, &pts, cfg.fd_step, &[]).stage("identities")?;
    checks.push(Check::below(cfg, "identity_del_r", id.del_r));
    checks.push(Check::below(cfg, "identity_del_q", id.del_q));

    // wave
    let ts = time_grid(cfg.t_max, cfg.slices);
    let (v, f) = solve_from_generator(&h, &ts).stage("wave")?;
    checks.push(Check::below(cfg, "box_residual", box_residual(&v).stage("wave")?.max));
    checks.push(Check::below(cfg, "l_residual", l_residual(&f).stage("wave")?.max));
    let taus: Vec<f64> = (-8..=8).map(|k| 0.5 * k as f64).collect();
    let mut s = Sampler::new(cfg.seed, 2);
    let ys: Vec<SpherePoint> = (0..cfg.samples.min(10)).map(|_| s.sphere()).collect();
    let cons = conserved_scan(&v, &taus, &ys).stage("conservation")?;
    checks.push(Check::below(cfg, "conservation_i_spread", cons.i_spread));
    checks.push(Check::below(cfg, "conservation_e_max", cons.e_max_abs));
    drop((v, f));

    // initial data → generator
    let fine = time_grid(10.0 * cfg.fd_step, 21);
    let (v0, _) = solve_from_generator(&h, &fine).stage("round trip")?;
    let i0 = v0.index_of(0.0).stage("round trip")?;
    let spec = QSpectrum::compute(cfg.band_limit);
    let back = reconstruct_generator(v0.slice(i0), &v0.d_dt(i0).stage("round trip")?, &spec).stage("round trip")?;
    let diff = back.sub(&h).l2_norm();
    let scale = h.l2_norm();
    checks.push(Check::below(cfg, "round_trip", if scale > 0.0 { diff / scale } else { diff }));

    // monopole
    let m = Monopole::from_generator(&h).stage("monopole")?;
    let bp = Sampler::new(cfg.seed, 3).base_points(cfg.samples);
    checks.push(Check::below(cfg, "monopole_residual", monopole_residual(&m, &bp, cfg.fd_step)));
    let gauge = gauge_conditions_check(&m, &bp, cfg.fd_step);
    checks.push(Check::below(cfg, "gauge_a1", gauge.max_a1));
    checks.push(Check::below(cfg, "gauge_codifferential", gauge.max_codifferential));

    // twistor / curvature stages need an admissible monopole
    if adm.admissible {
        let dc = disk_config(cfg);
        let mut s = Sampler::new(cfg.seed, 4);
        let (mut w2, mut phi, mut frob, mut asd) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for p in &bp {
            let l = p.lambda();
            let w = C::from_polar(1.0, s.0.gen_range(-0.9 * PI..0.9 * PI));
            let r = lift_identity_residual(&h, p.t, l, w, cfg.fd_step, &dc).stage("lift_identity")?;
            w2 = w2.max(r.identity[0]).max(r.identity[1]);
            phi = phi.max(r.phi[0]).max(r.phi[1]);
            let zeta = s.0.gen_range(-2.0..2.0);
            frob = frob.max(frobenius_residual(&m, p.t, l, zeta, cfg.fd_step).stage("frobenius")?);
            asd = asd.max(asd_residual(&m, p.t, l, cfg.fd_step, MetricKind::Reduced).stage("asd")?.relative);
        }
        checks.push(Check::below(cfg, "lift_identity", w2));
        checks.push(Check::below(cfg, "phi_eigen", phi));
        checks.push(Check::below(cfg, "frobenius", frob));
        checks.push(Check::below(cfg, "asd_relative", asd));
    } else {
        let reason = format!("generator is not admissible (margin {:.6})", adm.margin);
        for name in ["lift_identity", "phi_eigen", "frobenius", "asd_relative"] {
            checks.push(Check::skipped(name, &reason));
        }
    }

    let details = VerifyDetails {
        generator: h.coeffs().to_vec(),
        admissibility: adm,
        probe,
        identity_orders: id.order_del_r.iter().chain(&id.order_del_q).copied().collect(),
        conservation_taus: cons.taus,
        invariant_i: cons.i_values,
    };
    let rep = Report::new("verify", cfg, checks, details);
    out.write_json("verify.json", &rep)?;
    Ok(rep.all_pass)
}

// ---------------------------------------------------------------- disks

#[derive(Serialize)]
struct DiskRow {
    disk: usize,
    sample: usize,
    omega_re: f64,
    omega_im: f64,
    z0_re: f64,
    z0_im: f64,
    z1_re: f64,
    z1_im: f64,
    z2_re: f64,
    z2_im: f64,
    z3_re: f64,
    z3_im: f64,
}

/// Boundary curves in the affine charts z₁/z₀ and z₃/z₂ (plot data);
/// empty fields mark the point at infinity.
#[derive(Serialize)]
struct CurveRow {
    disk: usize,
    sample: usize,
    eta1_re: Option<f64>,
    eta1_im: Option<f64>,
    eta2_re: Option<f64>,
    eta2_im: Option<f64>,
}

#[derive(Serialize)]
struct DiskSummary {
    disk: usize,
    s: f64,
    t: f64,
    re: f64,
    im: f64,
    tail_energy: f64,
    max_membership: f64,
    max_projection_gap: f64,
}

#[derive(Serialize)]
struct DisksDetails {
    admissible: bool,
    margin: f64,
    probe: Option<ProbeReport>,
    disks: Vec<DiskSummary>,
    boundary_csv: &'static str,
    curves_csv: &'static str,
}

fn split(l: Lambda) -> (Option<f64>, Option<f64>) {
    match l {
        Lambda::Finite(z) => (Some(z.re), Some(z.im)),
        Lambda::Infinity => (None, None),
    }
}

fn lambda_gap(a: Lambda, b: Lambda) -> f64 {
    match (a, b) {
        (Lambda::Finite(x), Lambda::Finite(y)) => (x - y).norm() / (1.0 + y.norm()),
        (Lambda::Infinity, Lambda::Infinity) => 0.0,
        _ => f64::INFINITY,
    }
}

pub fn disks(cfg: &RunConfig, out: &OutDir) -> Result<bool, CliError> {
    let h = generator(cfg)?;
    let adm = admissibility_check(&h, &ScanConfig::for_band_limit(cfg.band_limit)).stage("admissibility")?;
    let probe = if adm.admissible { None } else { witness_probe(&h, &adm, cfg)? };
    let params: Vec<DiskParams> = if cfg.disks.is_empty() {
        let mut s = Sampler::new(cfg.seed, 5);
        (0..cfg.disk_count)
            .map(|_| {
                let l = s.lambda(2.0);
                DiskParams { s: s.0.gen_range(-PI..PI), t: s.0.gen_range(-2.0..2.0), re: l.re, im: l.im }
            })
            .collect()
    } else {
        cfg.disks.clone()
    };
    let dc = disk_config(cfg);
    let nb = cfg.boundary_samples;
    let (mut rows, mut curves, mut summaries) = (Vec::new(), Vec::new(), Vec::new());
    for (d, p) in params.iter().enumerate() {
        let l = C::new(p.re, p.im);
        let b = fourier_split(&h, p.s, p.t, l, dc.k, dc.n, dc.tail_tol).stage("fourier split")?;
        let (mut mem, mut proj) = (0.0f64, 0.0f64);
        for j in 0..nb {
            let w = C::from_polar(1.0, 2.0 * PI * j as f64 / nb as f64);
            let z = disk_map(&b, w);
            let (r1, r2) = ph_membership(&z, &h).stage("membership")?;
            mem = mem.max(r1).max(r2);
            let (a1, a2) = pi_projection(&z).stage("projection")?;
            let (e1, e2) = eta_pair(p.t, l, w);
            proj = proj.max(lambda_gap(a1, e1)).max(lambda_gap(a2, e2));
            let c = z.coords();
            rows.push(DiskRow {
                disk: d,
                sample: j,
                omega_re: w.re,
                omega_im: w.im,
                z0_re: c[0].re,
                z0_im: c[0].im,
                z1_re: c[1].re,
                z1_im: c[1].im,
                z2_re: c[2].re,
                z2_im: c[2].im,
                z3_re: c[3].re,
                z3_im: c[3].im,
            });
            let ((x1, y1), (x2, y2)) = (split(a1), split(a2));
            curves.push(CurveRow { disk: d, sample: j, eta1_re: x1, eta1_im: y1, eta2_re: x2, eta2_im: y2 });
        }
        summaries.push(DiskSummary { disk: d, s: p.s, t: p.t, re: p.re, im: p.im, tail_energy: b.tail_energy, max_membership: mem, max_projection_gap: proj });
    }
    let checks = vec![
        Check::below(cfg, "disk_membership", max_of(summaries.iter().map(|s| s.max_membership))),
        Check::below(cfg, "disk_projection", max_of(summaries.iter().map(|s| s.max_projection_gap))),
    ];
    out.write_csv("disks.csv", &rows)?;
    out.write_csv("disk_curves.csv", &curves)?;
    let details = DisksDetails {
        admissible: adm.admissible,
        margin: adm.margin,
        probe,
        disks: summaries,
        boundary_csv: "disks.csv",
        curves_csv: "disk_curves.csv",
    };
    let rep = Report::new("disks", cfg, checks, details);
    out.write_json("disks.json", &rep)?;
    Ok(rep.all_pass)
}

// ----------------------------------------------------------- admissible

#[derive(Serialize)]
struct AdmissibleDetails {
    admissibility: AdmissibilityReport,
    probe: Option<ProbeReport>,
}

pub fn admissible(cfg: &RunConfig, out: &OutDir) -> Result<bool, CliError> {
    let h = generator(cfg)?;
    let adm = admissibility_check(&h, &ScanConfig::for_band_limit(cfg.band_limit)).stage("admissibility")?;
    let probe = witness_probe(&h, &adm, cfg)?;
    let checks = vec![Check::condition("admissibility margin", adm.margin, adm.admissible)];
    let rep = Report::new("admissible", cfg, checks, AdmissibleDetails { admissibility: adm, probe });
    out.write_json("admissible.json", &rep)?;
    Ok(rep.all_pass)
}

// -------------------------------------------------------- monopole-dump

/// Harmonic coefficients of V(t,·) and of the potential f(t,·).
#[derive(Serialize)]
struct DumpRow {
    t: f64,
    l: usize,
    m: i64,
    v: f64,
    f: f64,
}

#[derive(Serialize)]
struct DumpDetails {
    admissibility: AdmissibilityReport,
    table: &'static str,
    times: usize,
}

/// Times in the monopole dump.
const DUMP_TIMES: usize = 161;

pub fn monopole_dump(cfg: &RunConfig, out: &OutDir) -> Result<bool, CliError> {
    let h = generator(cfg)?;
    let m = Monopole::from_generator(&h).stage("monopole")?;
    let adm = admissibility_check(&h, &ScanConfig::for_band_limit(cfg.band_limit)).stage("admissibility")?;
    let mut rows = Vec::new();
    for t in time_grid(cfg.t_max, DUMP_TIMES) {
        let (v, f) = (m.v_slice(t), m.potential_slice(t));
        for l in 0..=h.lmax() {
            for mm in -(l as i64)..=l as i64 {
                rows.push(DumpRow { t, l, m: mm, v: v.get(l, mm), f: f.get(l, mm) });
            }
        }
    }
    let bp = Sampler::new(cfg.seed, 3).base_points(cfg.samples);
    let gauge = gauge_conditions_check(&m, &bp, cfg.fd_step);
    let checks = vec![
        Check::condition("admissibility margin", adm.margin, adm.admissible),
        Check::below(cfg, "monopole_residual", monopole_residual(&m, &bp, cfg.fd_step)),
        Check::below(cfg, "gauge_a1", gauge.max_a1),
        Check::below(cfg, "gauge_codifferential", gauge.max_codifferential),
    ];
    out.write_csv("monopole.csv", &rows)?;
    let rep = Report::new("monopole-dump", cfg, checks, DumpDetails { admissibility: adm, table: "monopole.csv", times: DUMP_TIMES });
    out.write_json("monopole.json", &rep)?;
    Ok(rep.all_pass)
}

// ------------------------------------------------------------ asd-check

#[derive(Serialize)]
struct AsdRow {
    t: f64,
    re: f64,
    im: f64,
    self_dual: f64,
    anti_self_dual: f64,
    relative: f64,
}

#[derive(Serialize)]
struct AsdDetails {
    step: f64,
    control_relative: f64,
    table: &'static str,
}

pub fn asd_check(cfg: &RunConfig, out: &OutDir) -> Result<bool, CliError> {
    let h = generator(cfg)?;
    let adm = admissibility_check(&h, &ScanConfig::for_band_limit(cfg.band_limit)).stage("admissibility")?;
    if !adm.admissible {
        return Err(CliError::Precondition { stage: "asd-check", source: sdtwistor::Error::Config(format!("generator is not admissible (margin {:.6})", adm.margin)) });
    }
    let m = Monopole::from_generator(&h).stage("monopole")?;
    let bp = Sampler::new(cfg.seed, 6).base_points(cfg.samples);
    let mut rows = Vec::new();
    for p in &bp {
        let r = asd_residual(&m, p.t, p.lambda(), cfg.fd_step, MetricKind::Reduced).stage("asd")?;
        rows.push(AsdRow { t: p.t, re: p.re, im: p.im, self_dual: r.self_dual, anti_self_dual: r.anti_self_dual, relative: r.relative });
    }
    let p0 = &bp[0];
    let control = asd_residual_of_metric(negative_control_metric, [0.0, p0.t, p0.re, p0.im], cfg.fd_step).stage("asd control")?.relative;
    let checks = vec![
        Check::below(cfg, "asd_relative", max_of(rows.iter().map(|r| r.relative))),
        Check::condition("negative control is not anti-self-dual", control, control > 0.1),
    ];
    out.write_csv("asd.csv", &rows)?;
    let rep = Report::new("asd-check", cfg, checks, AsdDetails { step: cfg.fd_step, control_relative: control, table: "asd.csv" });
    out.write_json("asd.json", &rep)?;
    Ok(rep.all_pass)
}
