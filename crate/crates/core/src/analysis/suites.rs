//! Named verification suites. Each runs a batch of checks with fixed
//! defaults (overridable through [`SuiteConfig`]) and returns a [`Report`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    box_norm, classify, classify_exact, critical_alpha, gamma_sequence, limit_scan, lq_norm, radial_samples,
    sup_bounds, verify_subsolution, Entry, LimitMode, NormRegion, Rational, RegionLabel, Relation, Report,
};
use crate::error::{Error, Result};
use crate::fields::{
    lp_norm_upper_bound, make_blowup_large_time, make_blowup_small_time, make_bump, make_cylinder, make_exact_solution,
    make_indicator_similarity, make_paraboloid_power, make_piecewise_constant, make_tilted_exact, BlowupFamily,
    BumpProfile, Cell, Field,
};
use crate::inverse::{j_inverse, InverseSpec, Potential};
use crate::kernels::{convolve, phi, phi_lr_norm};
use crate::potentials::{j_alpha, v_alpha, QuadratureSpec, SlabRegion};
use crate::special::{gamma, mbar_constant, sharp_constant};

pub const SUITE_NAMES: [&str; 14] = [
    "semigroup",
    "exact",
    "bounds",
    "gamma-rec",
    "lemma71",
    "lemma72",
    "lemma76",
    "inverse",
    "limits-time",
    "limits-space",
    "blowup-small",
    "blowup-large",
    "region-classify",
    "p3",
];

/// Overrides for suite defaults; `None` keeps the suite's own parameter set.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub k: Option<f64>,
    pub b: Option<f64>,
    pub tol: Option<f64>,
    pub eps: Option<f64>,
    pub l: Option<u32>,
    pub seed: u64,
    pub quad: QuadratureSpec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: None,
            alpha: None,
            lambda: None,
            p: None,
            q: None,
            k: None,
            b: None,
            tol: None,
            eps: None,
            l: None,
            seed: 20_240_601,
            quad: QuadratureSpec::default(),
        }
    }
}

/// Compactly supported bump used by the limit scans: radius 2, switched on
/// over `0 < t < 1` and off over `9 < t < 10`.
pub fn standard_bump() -> Field {
    make_bump(BumpProfile::Compact { radius: 2.0 }, 0.0, 10.0, 1.0).expect("valid bump parameters")
}

/// Smooth bump used by the inverse round trip.
pub fn inverse_bump() -> Field {
    make_bump(BumpProfile::Gaussian, 0.0, 1.0, 0.5).expect("valid bump parameters")
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Report> {
    cfg.quad.validate()?;
    let mut rep = match name {
        "semigroup" => semigroup(cfg),
        "exact" => exact(cfg),
        "bounds" => bounds(cfg),
        "gamma-rec" => gamma_rec(cfg),
        "lemma71" => lemma71(cfg),
        "lemma72" => lemma72(cfg),
        "lemma76" => lemma76(cfg),
        "inverse" => inverse(cfg),
        "limits-time" => limits(cfg, LimitMode::TimeLimit),
        "limits-space" => limits(cfg, LimitMode::SpaceLimit),
        "blowup-small" => blowup_small(cfg),
        "blowup-large" => blowup_large(cfg),
        "region-classify" => region_classify(cfg),
        "p3" => p3(cfg),
        other => Err(Error::Domain(format!(
            "unknown suite '{other}'; expected one of {}",
            SUITE_NAMES.join(", ")
        ))),
    }?;
    rep.meta("rel_tol", cfg.quad.rel_tol);
    rep.meta("abs_tol", cfg.quad.abs_tol);
    Ok(rep)
}

fn list<T: Copy>(over: Option<T>, default: &[T]) -> Vec<T> {
    over.map_or_else(|| default.to_vec(), |v| vec![v])
}

fn linspace(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect()
}

fn semigroup(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("semigroup");
    let tol = cfg.tol.unwrap_or(1e-6);
    let pairs: Vec<(f64, f64)> = match (cfg.alpha, cfg.b) {
        (Some(a), Some(b)) => vec![(a, b)],
        _ => vec![(0.5, 0.5), (0.3, 1.2), (1.0, 0.75)],
    };
    let n = cfg.n.unwrap_or(1);
    for (a, b) in pairs {
        let mut worst: f64 = 0.0;
        let mut count = 0usize;
        for &x in &[-1.0, -0.5, 0.0, 0.5, 1.0] {
            for &t in &[0.25, 0.5, 1.0, 2.0, 4.0] {
                let mut pt = vec![0.0; n];
                pt[0] = x;
                let exact = phi(n, a + b, &pt, t);
                let conv = convolve(n, a, b, &pt, t, &cfg.quad.tol())?.value;
                worst = worst.max((conv - exact).abs() / exact);
                count += 1;
            }
        }
        rep.push(
            Entry::new("max relative residual", Relation::Abs, worst, 0.0, tol)
                .with("alpha", a)
                .with("beta", b)
                .with("n", n)
                .with("points", count),
        );
    }
    Ok(rep)
}

fn exact(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("exact");
    let tol = cfg.tol.unwrap_or(1e-6);
    // J g is as small as 1e−11 at t = 0.1, so only the relative tolerance may bind
    let quad = QuadratureSpec {
        abs_tol: cfg.quad.abs_tol.min(1e-300),
        ..cfg.quad
    };
    let times = linspace(0.1, 2.0, 20);
    for alpha in list(cfg.alpha, &[0.5, 1.0, 1.5]) {
        for lambda in list(cfg.lambda, &[0.25, 0.5, 0.75]) {
            for n in list(cfg.n, &[1, 2]) {
                let g = make_exact_solution(alpha, lambda)?;
                let x = vec![0.0; n];
                let mut worst: f64 = 0.0;
                for &t in &times {
                    let gv = g.eval(&x, t);
                    let j = j_alpha(&g, n, alpha, &x, t, &quad)?.value;
                    worst = worst.max((libm::pow(j, lambda) - gv).abs() / gv);
                }
                rep.push(
                    Entry::new("sup |(J g)^lambda - g| / g", Relation::Abs, worst, 0.0, tol)
                        .with("alpha", alpha)
                        .with("lambda", lambda)
                        .with("n", n),
                );
            }
        }
    }
    Ok(rep)
}

fn bounds(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("bounds");
    let slack = cfg.tol.unwrap_or(1e-4);
    let n = cfg.n.unwrap_or(1);
    let params: Vec<(f64, f64)> = match (cfg.alpha, cfg.lambda) {
        (Some(a), Some(l)) => vec![(a, l)],
        _ => vec![(1.0, 0.5), (0.5, 0.25), (1.5, 0.75)],
    };
    let k_tilt = cfg.k.unwrap_or(2.0);
    let radii = linspace(0.0, 3.0, 31);
    for (alpha, lambda) in params {
        let m = sharp_constant(alpha, lambda)?;
        let big_n = 0.9 * m;
        let fields: [(&str, Field, f64); 3] = [
            ("exact", make_exact_solution(alpha, lambda)?, 1.0),
            ("tilted", make_tilted_exact(n, alpha, lambda, big_n, k_tilt)?, k_tilt),
            ("indsim", make_indicator_similarity(n, alpha, lambda)?, 1.0),
        ];
        let sharp_ratio = libm::pow(big_n / m, lambda / (1.0 - lambda));
        for (name, f, k) in &fields {
            for b in list(cfg.b, &[0.5, 1.0, 2.0]) {
                let (bf, bj) = sup_bounds(*k, lambda, alpha, b)?;
                let times: Vec<f64> = (1..=200).map(|i| b * i as f64 / 200.0).collect();
                let measured = radial_samples(n, &radii, &times)
                    .iter()
                    .fold(0.0f64, |m, (x, t)| m.max(f.eval(x, *t)));
                rep.push(
                    Entry::new("grid sup f <= bound_f", Relation::AtMost, measured, bf, slack * bf)
                        .with("field", *name)
                        .with("alpha", alpha)
                        .with("lambda", lambda)
                        .with("b", b)
                        .with("K", *k),
                );
                let mut jmax: f64 = 0.0;
                for (x, t) in radial_samples(n, &[0.0, 0.5], &[0.5 * b, b]) {
                    jmax = jmax.max(j_alpha(f, n, alpha, &x, t, &cfg.quad)?.value);
                }
                rep.push(
                    Entry::new("sampled sup J f <= bound_Jf", Relation::AtMost, jmax, bj, slack * bj)
                        .with("field", *name)
                        .with("alpha", alpha)
                        .with("lambda", lambda)
                        .with("b", b),
                );
                if *name == "tilted" && b <= 1.0 {
                    let at_zero = f.eval(&vec![0.0; n], b) / bf;
                    rep.push(
                        Entry::new(
                            "f(0,b) / bound_f >= (N/M)^(lambda/(1-lambda))",
                            Relation::AtLeast,
                            at_zero,
                            sharp_ratio,
                            1e-12,
                        )
                        .with("alpha", alpha)
                        .with("lambda", lambda)
                        .with("b", b),
                    );
                }
            }
            // subsolution spot checks inside the support
            let pts = radial_samples(n, &[0.0, 0.3], &[0.25, 0.5, 1.0]);
            let sub = verify_subsolution(f, n, *k, lambda, alpha, &pts, &cfg.quad, 1e-6)?;
            for e in sub.entries {
                rep.push(e.with("field", *name).with("alpha", alpha).with("lambda", lambda));
            }
        }
    }
    Ok(rep)
}

fn gamma_rec(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("gamma-rec");
    let tol = cfg.tol.unwrap_or(1e-10);
    rep.push(Entry::new(
        "sharp_constant(1, 1/2)",
        Relation::Abs,
        sharp_constant(1.0, 0.5)?,
        0.5,
        1e-15,
    ));
    // interior points of (0.25, 2) × (0.1, 0.9)
    let alphas: Vec<f64> = (1..=5).map(|i| 0.25 + 1.75 * i as f64 / 6.0).collect();
    let lambdas: Vec<f64> = (1..=5).map(|i| 0.1 + 0.8 * i as f64 / 6.0).collect();
    for alpha in list(cfg.alpha, &alphas) {
        for lambda in list(cfg.lambda, &lambdas) {
            let seq = gamma_sequence(alpha, lambda, 200)?;
            let limit = libm::pow(mbar_constant(alpha, lambda)?, lambda / (1.0 - lambda));
            let last = seq.values[seq.values.len() - 1];
            rep.push(
                Entry::new(
                    "|gamma_200 - Mbar^(lambda/(1-lambda))|",
                    Relation::Abs,
                    last,
                    limit,
                    tol,
                )
                .with("alpha", alpha)
                .with("lambda", lambda),
            );
            // the iteration map is increasing, so the sequence is monotone up to rounding
            let dir = (limit - seq.values[0]).signum();
            let monotone = seq
                .values
                .windows(2)
                .all(|w| (w[1] - w[0]) * dir >= -4.0 * f64::EPSILON * limit);
            rep.push(
                Entry::flag("gamma_j approaches the limit monotonically", monotone)
                    .with("alpha", alpha)
                    .with("lambda", lambda),
            );
        }
    }
    Ok(rep)
}

/// Exact sup of `|Σ cells|` by checking every elementary rectangle.
fn piecewise_sup(cells: &[Cell]) -> f64 {
    let mut xs: Vec<f64> = cells.iter().flat_map(|c| [c.lo[0], c.hi[0]]).collect();
    let mut ts: Vec<f64> = cells.iter().flat_map(|c| [c.t_lo, c.t_hi]).collect();
    xs.sort_by(f64::total_cmp);
    ts.sort_by(f64::total_cmp);
    let mut best: f64 = 0.0;
    for xw in xs.windows(2) {
        for tw in ts.windows(2) {
            let (x, t) = (0.5 * (xw[0] + xw[1]), 0.5 * (tw[0] + tw[1]));
            let v: f64 = cells
                .iter()
                .filter(|c| x > c.lo[0] && x < c.hi[0] && t > c.t_lo && t < c.t_hi)
                .map(|c| c.value)
                .sum();
            best = best.max(v.abs());
        }
    }
    best
}

fn lemma71(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("lemma71");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut violations = 0usize;
    for trial in 0..100usize {
        let alpha = rng.gen_range(0.2..2.0);
        let a = rng.gen_range(0.0..1.0);
        let b = a + rng.gen_range(0.5..2.0);
        let ncells = rng.gen_range(1..=6);
        let mut cells = Vec::with_capacity(ncells);
        for _ in 0..ncells {
            let lo = rng.gen_range(-2.0..1.0);
            let t_lo = rng.gen_range(a..b - 0.05);
            cells.push(Cell {
                lo: vec![lo],
                hi: vec![lo + rng.gen_range(0.2..2.0)],
                t_lo,
                t_hi: rng.gen_range(t_lo + 0.01..b),
                value: rng.gen_range(-1.0..1.0),
            });
        }
        let sup_f = piecewise_sup(&cells);
        let f = make_piecewise_constant(1, cells)?;
        let slab = SlabRegion::new(a, b)?;
        let mut measured: f64 = 0.0;
        for i in 0..11 {
            let x = -2.5 + 0.5 * i as f64;
            for k in 1..=10 {
                let t = a + (b - a) * (k as f64 / 10.0 - 1e-3);
                measured = measured.max(v_alpha(&f, 1, alpha, slab, &[x], t, &cfg.quad)?.value.abs());
            }
        }
        let bound = libm::pow(b - a, alpha) / gamma(alpha + 1.0) * sup_f;
        let e = Entry::new(
            "grid sup |V f| <= (b-a)^alpha/Gamma(alpha+1) sup |f|",
            Relation::AtMost,
            measured,
            bound,
            cfg.quad.rel_tol * bound,
        )
        .with("trial", trial)
        .with("alpha", alpha)
        .with("a", a)
        .with("b", b);
        if !e.pass {
            violations += 1;
        }
        rep.push(e);
    }
    rep.push(Entry::new("violations", Relation::Abs, violations as f64, 0.0, 0.0));
    Ok(rep)
}

fn lemma72(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("lemma72");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x72);
    let n = 1usize;
    let (a, b) = (0.0, 1.0);
    let edges = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let quad = cfg.quad.with_rel_tol(cfg.quad.rel_tol.max(1e-7));
    let mut violations = 0usize;
    for trial in 0..20usize {
        let alpha = rng.gen_range(0.3..1.5);
        let p = rng.gen_range(1.0..3.0);
        let dmax = (2.0 * alpha / (n as f64 + 2.0)).min(1.0 / p);
        let delta = rng.gen_range(0.0..0.9) * dmax;
        let q = 1.0 / (1.0 / p - delta);
        let r = 1.0 / (1.0 - delta);
        let mut cells = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if rng.gen_bool(0.6) || (cells.is_empty() && i == 3 && j == 3) {
                    cells.push(Cell {
                        lo: vec![edges[i]],
                        hi: vec![edges[i + 1]],
                        t_lo: 0.25 * j as f64,
                        t_hi: 0.25 * (j + 1) as f64,
                        value: rng.gen_range(0.05..1.0),
                    });
                }
            }
        }
        let fp = libm::pow(
            cells.iter().map(|c| libm::pow(c.value, p) * 0.125).sum::<f64>(),
            1.0 / p,
        );
        let f = make_piecewise_constant(n, cells)?;
        let u = |x: &[f64], t: f64| j_alpha(&f, n, alpha, x, t, &quad).map(|e| e.value);
        // J f is negligible beyond |x| = 7 for t < 1; t panels follow the cell edges
        let jq = lq_norm(&u, n, q, a, b, 7.0, 28, 8, 6)?;
        let c = phi_lr_norm(n, alpha, r, b - a)?;
        let e = Entry::new(
            "||J f||_q <= ||Phi||_r ||f||_p",
            Relation::AtMost,
            jq,
            c * fp,
            1e-6 * c * fp,
        )
        .with("trial", trial)
        .with("alpha", alpha)
        .with("p", p)
        .with("q", q)
        .with("r", r);
        if !e.pass {
            violations += 1;
        }
        rep.push(e);
    }
    rep.push(Entry::new("violations", Relation::Abs, violations as f64, 0.0, 0.0));
    Ok(rep)
}

fn lemma76(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("lemma76");
    let n = cfg.n.unwrap_or(1);
    let p = cfg.p.unwrap_or(1.0);
    let alpha = cfg.alpha.unwrap_or(0.5);
    let gamma_exp = 0.5;
    let f0 = make_paraboloid_power(n, p, gamma_exp)?;
    let e = (n as f64 + 2.0) / (2.0 * p) - gamma_exp - alpha;
    let x = vec![0.0; n];
    let mut ratios = Vec::with_capacity(10);
    for i in 1..=10 {
        let t = 0.1 * i as f64;
        ratios.push(j_alpha(&f0, n, alpha, &x, t, &cfg.quad)?.value * libm::pow(t, e));
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    rep.push(Entry::flag("C1 > 0", lo > 0.0).with("C1", lo));
    rep.push(Entry::flag("C2 < inf", hi.is_finite()).with("C2", hi));
    rep.push(
        Entry::new("C2 / C1", Relation::AtMost, hi / lo, cfg.tol.unwrap_or(10.0), 0.0)
            .with("n", n)
            .with("p", p)
            .with("gamma", gamma_exp)
            .with("alpha", alpha),
    );
    Ok(rep)
}

fn inverse(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("inverse");
    let f = inverse_bump();
    let fmax = f.sup_bound().unwrap_or(1.0);
    let l = cfg.l.unwrap_or(2);
    let eps = cfg.eps.unwrap_or(0.02);
    let tol = cfg.tol.unwrap_or(1e-2);
    let quad = cfg.quad.with_rel_tol(cfg.quad.rel_tol.min(1e-10));
    for alpha in list(cfg.alpha, &[0.5, 0.75]) {
        let u = Potential {
            field: &f,
            n: 1,
            alpha,
            quad,
        };
        let mut spec = InverseSpec::new(l, eps);
        spec.quad = quad;
        let mut worst: f64 = 0.0;
        let mut rate: f64 = f64::NAN;
        for &x in &[-0.5, 0.0, 0.5] {
            for &t in &[0.3, 0.5, 0.7] {
                let r = j_inverse(&u, alpha, &spec, &[x], t)?;
                worst = worst.max((r.value - f.eval(&[x], t)).abs() / fmax);
                rate = r.rate;
            }
        }
        rep.push(
            Entry::new("sup |J^-1_eps(J f) - f| / max f", Relation::Abs, worst, 0.0, tol)
                .with("alpha", alpha)
                .with("l", l)
                .with("eps", eps)
                .with("rate", rate),
        );
    }
    Ok(rep)
}

fn limits(cfg: &SuiteConfig, mode: LimitMode) -> Result<Report> {
    let f = standard_bump();
    let alpha = cfg.alpha.unwrap_or(0.5);
    let tol = cfg.tol.unwrap_or(1e-3);
    let params: Vec<f64> = (0..6).map(|k| libm::pow(0.5, k as f64)).collect();
    let (n, times) = match mode {
        LimitMode::TimeLimit => (cfg.n.unwrap_or(1), [1.0, 1.5, 2.0]),
        // on the plateau, where only the switch-on transient contributes
        LimitMode::SpaceLimit => (cfg.n.unwrap_or(3), [7.0, 8.0, 9.0]),
    };
    let pts = radial_samples(n, &[0.0, 0.5, 1.0], &times);
    let scan = limit_scan(&f, n, alpha, mode, &params, &pts, &cfg.quad)?;
    let mut rep = scan.report;
    rep.push(
        Entry::flag("errors strictly decrease", scan.strictly_decreasing)
            .with("n", n)
            .with("alpha", alpha),
    );
    let last = scan.errors[scan.errors.len() - 1];
    rep.push(
        Entry::new("final error", Relation::Abs, last, 0.0, tol)
            .with("param", params[params.len() - 1])
            .with("n", n),
    );
    Ok(rep)
}

fn blowup_common(rep: &mut Report, fam: &BlowupFamily, quad: &QuadratureSpec) -> Result<()> {
    let field = fam.field();
    for (j, tj) in fam.box_times().into_iter().enumerate() {
        let bn = box_norm(&field, fam.n, fam.q, &NormRegion::parabolic_box(tj)?, quad)?;
        rep.push(
            Entry::new(
                "box norm on R_j is infinite",
                Relation::Abs,
                bn.value,
                f64::INFINITY,
                0.0,
            )
            .with("j", j + 1)
            .with("t_j", tj)
            .with("q", fam.q),
        );
        rep.push(Entry::flag("divergence certified analytically", bn.certificate.is_some()).with("j", j + 1));
    }
    rep.push(Entry::flag("supports pairwise disjoint", fam.supports_disjoint()));
    Ok(())
}

fn blowup_small(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("blowup-small");
    let (n, p, lambda, alpha) = (
        cfg.n.unwrap_or(1),
        cfg.p.unwrap_or(1.0),
        cfg.lambda.unwrap_or(3.0),
        cfg.alpha.unwrap_or(0.2),
    );
    let fam = make_blowup_small_time(n, p, lambda, alpha, cfg.q.unwrap_or(1.5), 3, &cfg.quad)?;
    blowup_common(&mut rep, &fam, &cfg.quad)?;
    let tj = fam.box_times();
    rep.push(Entry::flag(
        "t_j decreases to 0 (t_(j+1) < t_j / 4)",
        tj.windows(2).all(|w| w[1] < w[0] / 4.0),
    ));
    let lp = lp_norm_upper_bound(&fam.field(), p, f64::NEG_INFINITY, 1.0)?;
    rep.push(
        Entry::flag("L^p norm on R^n x (-inf, 1) finite", lp.is_finite())
            .with("bound", lp)
            .with("p", p),
    );
    let k = fam.k.unwrap_or(f64::INFINITY);
    rep.push(Entry::flag("sampled K finite", k.is_finite()).with("K", k));
    Ok(rep)
}

fn blowup_large(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("blowup-large");
    let (n, p, lambda, alpha) = (
        cfg.n.unwrap_or(1),
        cfg.p.unwrap_or(1.0),
        cfg.lambda.unwrap_or(3.0),
        cfg.alpha.unwrap_or(0.2),
    );
    let fam = make_blowup_large_time(n, p, lambda, alpha, 4)?;
    blowup_common(&mut rep, &fam, &cfg.quad)?;
    let tj = fam.box_times();
    rep.push(Entry::flag(
        "t_j increases (t_(j+1) = 4 t_j)",
        tj.windows(2).all(|w| w[1] >= 4.0 * w[0]),
    ));
    for big_t in [1.0, 10.0, 100.0, 1000.0] {
        let lp = lp_norm_upper_bound(&fam.field(), p, f64::NEG_INFINITY, big_t)?;
        rep.push(
            Entry::flag("L^p norm on R^n x (-inf, T) finite", lp.is_finite())
                .with("T", big_t)
                .with("bound", lp),
        );
    }
    Ok(rep)
}

fn region_classify(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("region-classify");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xC1A55);
    let mut disagreements = 0usize;
    let mut d_hits = 0usize;
    let r = |a: i128, b: i128| Rational::new(a, b);
    for i in 0..1000 {
        let n: u32 = rng.gen_range(1..=4);
        let pd: i128 = rng.gen_range(1..=6);
        let p = r(rng.gen_range(pd..=4 * pd), pd)?;
        let (lambda, alpha) = if i % 4 == 0 {
            // exactly on the curve: α = (n+2) p_d (λ_n − λ_d) / (2 p_n λ_n)
            let ld: i128 = rng.gen_range(1..=20);
            let lam = r(rng.gen_range(ld + 1..=6 * ld), ld)?;
            let al = r((i128::from(n) + 2) * p.den * (lam.num - lam.den), 2 * p.num * lam.num)?;
            (lam, al)
        } else {
            let ld: i128 = rng.gen_range(1..=40);
            let ad: i128 = rng.gen_range(1..=40);
            (r(rng.gen_range(1..=6 * ld), ld)?, r(rng.gen_range(1..=4 * ad), ad)?)
        };
        let exact = classify_exact(lambda, alpha, p, n)?;
        let float = classify(lambda.to_f64(), alpha.to_f64(), p.to_f64(), n as usize)?;
        // independent reading of the curve
        let lf = lambda.to_f64();
        let curve = if lf < 1.0 {
            RegionLabel::B
        } else if lambda.num == lambda.den {
            RegionLabel::A
        } else {
            let thr = critical_alpha(n as usize, p.to_f64(), lf);
            let af = alpha.to_f64();
            if (af - thr).abs() <= 1e-12 * thr {
                RegionLabel::D
            } else if af > thr {
                RegionLabel::A
            } else {
                RegionLabel::C
            }
        };
        if exact == RegionLabel::D {
            d_hits += 1;
        }
        if exact != float || exact != curve || (i % 4 == 0 && exact != RegionLabel::D) {
            disagreements += 1;
            rep.push(
                Entry::flag("classification agrees with the curve", false)
                    .with("lambda", lf)
                    .with("alpha", alpha.to_f64())
                    .with("p", p.to_f64())
                    .with("n", n),
            );
        }
    }
    rep.push(Entry::new("disagreements", Relation::Abs, disagreements as f64, 0.0, 0.0).with("points", 1000usize));
    rep.push(Entry::new(
        "exact boundary hits",
        Relation::AtLeast,
        d_hits as f64,
        250.0,
        0.0,
    ));
    // the region map's curve classifies as D at every grid point
    let n = cfg.n.unwrap_or(1);
    let p = cfg.p.unwrap_or(1.0);
    let mut off_curve = 0usize;
    for (lam, al) in super::region_curve(n, p, 1.05, 6.0, 0.05)? {
        if classify(lam, al, p, n)? != RegionLabel::D {
            off_curve += 1;
        }
    }
    rep.push(Entry::new(
        "curve points not labelled D",
        Relation::Abs,
        off_curve as f64,
        0.0,
        0.0,
    ));
    Ok(rep)
}

fn p3(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = Report::new("p3");
    let alpha = cfg.alpha.unwrap_or(0.5);
    let fields: Vec<(&str, Field)> = vec![
        ("exact", make_exact_solution(alpha.min(2.0), 0.5)?),
        ("bump", inverse_bump()),
        ("standard-bump", standard_bump()),
        ("paraboloid", make_paraboloid_power(1, 1.0, 0.5)?),
        ("indsim", make_indicator_similarity(1, alpha, 0.5)?),
        ("cylinder", make_cylinder(1.0, 0.0, 2.0, 1.0)?),
    ];
    for (name, f) in &fields {
        let mut worst: f64 = 0.0;
        for &t in &[-2.0, -0.5, -1e-9, 0.0] {
            for &x in &[-0.5, 0.0, 0.5] {
                worst = worst.max(j_alpha(f, 1, alpha, &[x], t, &cfg.quad)?.value.abs());
            }
        }
        rep.push(Entry::new("J f on t <= 0", Relation::Abs, worst, 0.0, 0.0).with("field", *name));
    }
    let f = inverse_bump();
    let u = Potential {
        field: &f,
        n: 1,
        alpha,
        quad: cfg.quad,
    };
    let v = j_inverse(&u, alpha, &InverseSpec::new(2, 0.02), &[0.0], -0.5)?.value;
    rep.push(Entry::new("J^-1 (J f) on t < 0", Relation::Abs, v, 0.0, 0.0));
    Ok(rep)
}

/// Names of the suites, comma separated.
pub fn suite_list() -> String {
    SUITE_NAMES.join(", ")
}
