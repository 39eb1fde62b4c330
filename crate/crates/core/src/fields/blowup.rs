//! Blow-up families `f = f₀ + Σ f_j`: a paraboloid power plus backward
//! paraboloids concentrating at a sequence of times `T_j`.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{make_backward_paraboloid, paraboloid_exponent, Field};
use crate::error::{Error, Result};
use crate::potentials::{j_alpha, QuadratureSpec};

/// Side of the time axis where the family blows up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupMode {
    /// `T_j → 0`.
    SmallTime,
    /// `T_j → ∞`.
    LargeTime,
}

#[derive(Debug, Clone)]
pub struct BlowupFamily {
    pub mode: BlowupMode,
    pub n: usize,
    pub p: f64,
    pub lambda: f64,
    pub alpha: f64,
    /// Norm exponent for which every `‖f_j‖_{L^q(R_j)}` is infinite.
    pub q: f64,
    /// Decay exponent of each `f_j`: `f_j = (T_j − t)^{−exponent}` on `Ω_j`.
    pub exponent: f64,
    pub base: Field,
    pub terms: Vec<Field>,
    /// Concentration times `T_j`; the parabolic boxes start at `t_j = T_j/2`.
    pub t_seq: Vec<f64>,
    /// Sampled constant `K` with `f ≤ K (J_α f)^λ` (small-time family only).
    pub k: Option<f64>,
}

impl BlowupFamily {
    pub fn field(&self) -> Field {
        let mut all = Vec::with_capacity(self.terms.len() + 1);
        all.push(self.base.clone());
        all.extend(self.terms.iter().cloned());
        Field::Sum(all)
    }

    /// Box start times `t_j = T_j / 2`.
    pub fn box_times(&self) -> Vec<f64> {
        self.t_seq.iter().map(|t| t / 2.0).collect()
    }

    /// True when the supports `Ω_j ⊂ {T_j/2 < t < T_j}` are pairwise disjoint.
    pub fn supports_disjoint(&self) -> bool {
        let mut iv: Vec<(f64, f64)> = self.t_seq.iter().map(|&t| (t / 2.0, t)).collect();
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        iv.windows(2).all(|w| w[0].1 <= w[1].0)
    }
}

fn critical_alpha(n: usize, p: f64, lambda: f64) -> f64 {
    (n as f64 + 2.0) / (2.0 * p) * (1.0 - 1.0 / lambda)
}

fn require_region_c(n: usize, p: f64, lambda: f64, alpha: f64) -> Result<()> {
    if n == 0 || !(p >= 1.0) || !(alpha > 0.0) {
        return Err(Error::domain("need n >= 1, p >= 1 and alpha > 0"));
    }
    if !(lambda > 1.0 && alpha < critical_alpha(n, p, lambda)) {
        return Err(Error::Region(format!(
            "(lambda, alpha) = ({lambda}, {alpha}) is not in region C for n = {n}, p = {p}"
        )));
    }
    Ok(())
}

const SAMPLES: usize = 64;

/// Radially sampled midpoints of `{(x, t): lo < t < hi, |x| < radius(t)}`.
fn region_samples(n: usize, lo: f64, hi: f64, radius: impl Fn(f64) -> f64) -> Vec<(Vec<f64>, f64)> {
    let mut out = Vec::with_capacity(SAMPLES * SAMPLES);
    for i in 0..SAMPLES {
        let t = lo + (hi - lo) * (i as f64 + 0.5) / SAMPLES as f64;
        let r = radius(t);
        for k in 0..SAMPLES {
            let mut x = alloc::vec![0.0; n];
            x[0] = r * (k as f64 + 0.5) / SAMPLES as f64;
            out.push((x, t));
        }
    }
    out
}

/// `max num(x,t) / (J_α den(x,t))^λ` over the samples.
fn sup_ratio(
    num: &Field,
    den: &Field,
    n: usize,
    alpha: f64,
    lambda: f64,
    pts: &[(Vec<f64>, f64)],
    quad: &QuadratureSpec,
    stop_above: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (x, t) in pts {
        let v = num.eval(x, *t);
        if v == 0.0 {
            continue;
        }
        let j = j_alpha(den, n, alpha, x, *t, quad)?.value;
        let ratio = if j > 0.0 { v / j.powf(lambda) } else { f64::INFINITY };
        worst = worst.max(ratio);
        if worst >= stop_above {
            break;
        }
    }
    Ok(worst)
}

/// Family concentrating at `T_j → 0`: `f₀ = t^{−r} χ_{|x|²<t<1}` with
/// `r = (n+2)/(2q)` and `f_j = (T_j − t)^{−r}` on
/// `Ω_j = {|x| < √(T_j−t), T_j/2 < t < T_j}`.
///
/// Each `T_j` starts below `T_{j−1}/4` (below 1/2 for `j = 1`) and is halved
/// until, on 64×64 samples,
/// `sup_{Ω_j} f₀/(J f₀)^λ < 1`, `sup_{Ω_j⁺} f_j/(J f_j)^λ < 1` and
/// `sup_{Ω_j⁻} f_j/(J f₀)^λ < 1/2`, where `Ω_j⁺ = Ω_j ∩ {t > 3T_j/4}`.
pub fn make_blowup_small_time(
    n: usize,
    p: f64,
    lambda: f64,
    alpha: f64,
    q: f64,
    terms: usize,
    quad: &QuadratureSpec,
) -> Result<BlowupFamily> {
    require_region_c(n, p, lambda, alpha)?;
    if terms == 0 {
        return Err(Error::domain("need at least one blow-up term"));
    }
    if !(q > p && alpha < critical_alpha(n, q, lambda)) {
        return Err(Error::Domain(format!(
            "q = {q} must exceed p and keep alpha below (n+2)/(2q)(1-1/lambda)"
        )));
    }
    let r = (n as f64 + 2.0) / (2.0 * q);
    let gamma_exp = (n as f64 + 2.0) / (2.0 * p) - r;
    let base = Field::ParaboloidPower {
        n,
        p,
        gamma_exp,
        t_max: Some(1.0),
    };
    let mut t_seq = Vec::with_capacity(terms);
    let mut fields = Vec::with_capacity(terms);
    let mut cand: f64 = 0.25;
    for _ in 0..terms {
        let mut tries = 0;
        loop {
            let tj = cand;
            let fj = make_backward_paraboloid(n, p, gamma_exp, tj / 2.0, tj)?;
            let shrink = |t: f64| (tj - t).max(0.0).sqrt();
            let upper = region_samples(n, 0.75 * tj, tj, shrink);
            let lower = region_samples(n, 0.5 * tj, 0.75 * tj, shrink);
            let ok = sup_ratio(&fj, &fj, n, alpha, lambda, &upper, quad, 1.0)? < 1.0
                && sup_ratio(&fj, &base, n, alpha, lambda, &lower, quad, 0.5)? < 0.5
                && sup_ratio(&base, &base, n, alpha, lambda, &upper, quad, 1.0)? < 1.0
                && sup_ratio(&base, &base, n, alpha, lambda, &lower, quad, 1.0)? < 1.0;
            if ok {
                t_seq.push(tj);
                fields.push(fj);
                cand = tj / 8.0;
                break;
            }
            cand *= 0.5;
            tries += 1;
            if tries > 60 {
                return Err(Error::SearchExhausted(format!("blow-up time T_{}", t_seq.len() + 1)));
            }
        }
    }
    let omega0 = region_samples(n, 0.0, 1.0, |t: f64| t.sqrt());
    let c0 = sup_ratio(&base, &base, n, alpha, lambda, &omega0, quad, f64::INFINITY)?;
    Ok(BlowupFamily {
        mode: BlowupMode::SmallTime,
        n,
        p,
        lambda,
        alpha,
        q,
        exponent: r,
        base,
        terms: fields,
        t_seq,
        k: Some(c0.max(1.0)),
    })
}

/// Family concentrating at `T_j → ∞`: `f₀ = t^{γ−(n+2)/(2p)} χ_{|x|²<t}` with
/// `γ = (n+2)/(2p) − λα/(λ−1)`, and `f_j = (T_j − t)^{γ−(n+2)/(2p)}` on
/// `Ω_j = {|x| < √(T_j−t), T_j/2 < t < T_j}`, `T_1 = 4`, `T_{j+1} = 4T_j`.
/// The blow-up exponent is `q = (n+2)/(2α)(1 − 1/λ)`.
pub fn make_blowup_large_time(n: usize, p: f64, lambda: f64, alpha: f64, terms: usize) -> Result<BlowupFamily> {
    require_region_c(n, p, lambda, alpha)?;
    if terms == 0 {
        return Err(Error::domain("need at least one blow-up term"));
    }
    let gamma_exp = (n as f64 + 2.0) / (2.0 * p) - lambda * alpha / (lambda - 1.0);
    let base = Field::ParaboloidPower {
        n,
        p,
        gamma_exp,
        t_max: None,
    };
    let mut t_seq = Vec::with_capacity(terms);
    let mut fields = Vec::with_capacity(terms);
    let mut tj: f64 = 4.0;
    for _ in 0..terms {
        fields.push(make_backward_paraboloid(n, p, gamma_exp, tj / 2.0, tj)?);
        t_seq.push(tj);
        tj *= 4.0;
    }
    Ok(BlowupFamily {
        mode: BlowupMode::LargeTime,
        n,
        p,
        lambda,
        alpha,
        q: (n as f64 + 2.0) / (2.0 * alpha) * (1.0 - 1.0 / lambda),
        exponent: paraboloid_exponent(n, p, gamma_exp),
        base,
        terms: fields,
        t_seq,
        k: None,
    })
}

/// `γ = (n+2)/(2p) − λα/(λ−1)`, the paraboloid parameter of the large-time family.
pub fn large_time_gamma(n: usize, p: f64, lambda: f64, alpha: f64) -> f64 {
    (n as f64 + 2.0) / (2.0 * p) - lambda * alpha / (lambda - 1.0)
}
