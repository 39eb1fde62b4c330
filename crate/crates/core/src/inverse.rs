//! Marchaud-type approximate inverse of `J_α`:
//!
//! `J_ε^{−α} u(x,t) = C(n,α,l) ∫_ε^∞ ∫ τ^{−1−α} e^{−|y|²/4} Δ^l_{y,τ} u(x,t) dy dτ`,
//! `Δ^l_{y,τ} u(x,t) = Σ_k (−1)^k C(l,k) u(x − y√(kτ), t − kτ)`.
//!
//! The Gaussian `y`-integral of each stencil term is a heat smoothing:
//! `∫ e^{−|y|²/4} u(x − y√(kτ), s) dy = (4π)^{n/2} (H_{kτ} u)(x, s)`, which is
//! exact for fields and for potentials `u = J_α f` (a shifted smoothing
//! parameter inside the time integral). Arbitrary closures fall back to
//! tensor Gauss–Hermite.

use alloc::vec::Vec;
use core::cell::Cell;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fields::Field;
use crate::potentials::{j_alpha_smoothed, QuadratureSpec};
use crate::quad::{self, Estimate, Tol};
use crate::special::{binomial, ln_gamma};

/// A function of `(x, t)` whose heat smoothing can be evaluated.
pub trait Smoothable {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64], t: f64) -> Result<f64>;

    /// `∫ Φ₁(x − z, σ) u(z, t) dz`.
    fn smoothed(&self, x: &[f64], t: f64, sigma: f64) -> Result<f64>;

    /// A time before which `u` vanishes identically, if known.
    fn vanishes_before(&self) -> Option<f64> {
        None
    }

    /// Times where `u` may fail to be smooth.
    fn time_breaks(&self, _x: &[f64]) -> Vec<f64> {
        Vec::new()
    }
}

/// A field as the function `u` itself.
pub struct FieldFn<'a> {
    pub field: &'a Field,
    pub n: usize,
    pub quad: QuadratureSpec,
}

impl Smoothable for FieldFn<'_> {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64], t: f64) -> Result<f64> {
        Ok(self.field.eval(x, t))
    }

    fn smoothed(&self, x: &[f64], t: f64, sigma: f64) -> Result<f64> {
        self.field.heat_smooth(x, t, sigma, &self.quad.smooth_ctx())
    }

    fn vanishes_before(&self) -> Option<f64> {
        Some(0.0)
    }

    fn time_breaks(&self, x: &[f64]) -> Vec<f64> {
        self.field.time_breaks(x, f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// The potential `u = J_α f`, evaluated on demand.
pub struct Potential<'a> {
    pub field: &'a Field,
    pub n: usize,
    pub alpha: f64,
    pub quad: QuadratureSpec,
}

impl Smoothable for Potential<'_> {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64], t: f64) -> Result<f64> {
        Ok(j_alpha_smoothed(self.field, self.n, self.alpha, x, t, 0.0, &self.quad)?.value)
    }

    fn smoothed(&self, x: &[f64], t: f64, sigma: f64) -> Result<f64> {
        Ok(j_alpha_smoothed(self.field, self.n, self.alpha, x, t, sigma, &self.quad)?.value)
    }

    fn vanishes_before(&self) -> Option<f64> {
        Some(self.quad.time_origin)
    }
}

/// An arbitrary closure; smoothing by tensor Gauss–Hermite (`n ≤ 3`).
pub struct Closure<F> {
    pub f: F,
    pub n: usize,
    /// Known time before which `f` vanishes.
    pub zero_before: Option<f64>,
    /// Nodes with `|y| > y_radius` are dropped.
    pub y_radius: f64,
}

impl<F: Fn(&[f64], f64) -> f64> Smoothable for Closure<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64], t: f64) -> Result<f64> {
        Ok((self.f)(x, t))
    }

    fn smoothed(&self, x: &[f64], t: f64, sigma: f64) -> Result<f64> {
        if sigma <= 0.0 {
            return Ok((self.f)(x, t));
        }
        let n = self.n;
        if n > 3 {
            return Err(Error::Unsupported(
                "Gauss-Hermite smoothing is implemented for n <= 3".into(),
            ));
        }
        // E[u(x + √(2σ) Z)] with Z standard normal: nodes of e^{−s²}, z = √2 s
        let gh = quad::gauss_hermite(24);
        let scale = (4.0 * sigma).sqrt();
        let norm = libm::pow(PI, -0.5 * n as f64);
        let mut idx = alloc::vec![0usize; n];
        let mut pt = alloc::vec![0.0; n];
        let mut acc = 0.0;
        loop {
            let mut w = norm;
            let mut r2 = 0.0;
            for i in 0..n {
                let (s, wi) = gh[idx[i]];
                w *= wi;
                r2 += 2.0 * s * s;
                pt[i] = x[i] + scale * s;
            }
            if r2.sqrt() <= self.y_radius {
                acc += w * (self.f)(&pt, t);
            }
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(acc);
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < gh.len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    fn vanishes_before(&self) -> Option<f64> {
        self.zero_before
    }
}

/// Controls for [`j_inverse`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseSpec {
    /// Difference order, `l > α`.
    pub l: u32,
    /// Largest `ε` of the dyadic sequence `ε, ε/2, …`.
    pub eps: f64,
    /// Number of dyadic levels (at least 2 for extrapolation).
    pub levels: usize,
    pub quad: QuadratureSpec,
    /// Upper limit of the numerical `τ`-integral. `None` uses `t − t₀` when
    /// `u` vanishes before `t₀`, beyond which only the `k = 0` term survives
    /// and is integrated in closed form.
    pub tau_max: Option<f64>,
    /// Truncation radius for the Gauss–Hermite fallback.
    pub y_radius: f64,
    /// Cauchy test on the extrapolated sequence, relative to `max(1, |value|)`.
    pub cauchy_tol: f64,
}

impl InverseSpec {
    pub fn new(l: u32, eps: f64) -> Self {
        InverseSpec {
            l,
            eps,
            levels: 4,
            quad: QuadratureSpec::default().with_rel_tol(1e-10),
            tau_max: None,
            y_radius: 8.0,
            cauchy_tol: 1e-2,
        }
    }

    fn validate(&self, alpha: f64) -> Result<()> {
        if self.l == 0 || !(f64::from(self.l) > alpha) {
            return Err(Error::domain("difference order l must satisfy l >= 1 and l > alpha"));
        }
        if !(self.eps > 0.0) || self.levels == 0 {
            return Err(Error::domain("need eps > 0 and at least one level"));
        }
        self.quad.validate()
    }
}

/// `Δ^l_{y,τ} u(x,t) = Σ_{k=0}^l (−1)^k C(l,k) u(x − y√(kτ), t − kτ)`.
pub fn marchaud_difference(u: &dyn Fn(&[f64], f64) -> f64, l: u32, y: &[f64], tau: f64, x: &[f64], t: f64) -> f64 {
    let mut pt = alloc::vec![0.0; x.len()];
    let mut acc = 0.0;
    for k in 0..=l {
        let h = (k as f64 * tau).sqrt();
        for i in 0..x.len() {
            pt[i] = x[i] - y[i] * h;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(l, k) * u(&pt, t - k as f64 * tau);
    }
    acc
}

/// `A(α,l) = ∫_0^∞ σ^{−1−α} (1 − e^{−σ})^l dσ` by quadrature.
pub fn marchaud_a(alpha: f64, l: u32) -> Result<f64> {
    if !(alpha > 0.0) || l == 0 || !(f64::from(l) > alpha) {
        return Err(Error::domain("need alpha > 0 and l > alpha"));
    }
    let tol = Tol::new(1e-15, 1e-13, 4096);
    let lf = f64::from(l);
    // σ^{l−1−α} ((1 − e^{−σ})/σ)^l on [0, 1]
    let near = |s: f64| {
        let r = if s < 1e-8 { 1.0 - 0.5 * s } else { -libm::expm1(-s) / s };
        libm::pow(r, lf)
    };
    let a = quad::power_weighted(&near, 0.0, 1.0, lf - 1.0 - alpha, 0.0, &[], &tol, Default::default())?;
    // ∫_1^∞ σ^{−1−α} = 1/α, plus an exponentially small correction
    let far = |s: f64| libm::pow(s, -1.0 - alpha) * (libm::pow(-libm::expm1(-s), lf) - 1.0);
    let b = quad::integrate(&far, 1.0, 60.0, &tol)?;
    Ok(a.value + 1.0 / alpha + b.value)
}

/// `C(n,α,l) = [(4π)^{n/2} A(α,l)]^{−1}`: the normalization under which
/// `J_ε^{−α} J_α f → f` (both operators act on `e^{i(y·x + st)}` by
/// multiplication with `z^{∓α}`, `z = |y|² − is`).
pub fn marchaud_constant(n: usize, alpha: f64, l: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    Ok(1.0 / (libm::pow(4.0 * PI, 0.5 * n as f64) * marchaud_a(alpha, l)?))
}

/// `J_ε^{−α} u(x,t)` at a single `ε`.
pub fn j_inverse_at(
    u: &dyn Smoothable,
    alpha: f64,
    spec: &InverseSpec,
    eps: f64,
    x: &[f64],
    t: f64,
) -> Result<Estimate> {
    spec.validate(alpha)?;
    if x.len() != u.dim() {
        return Err(Error::domain("x must have n coordinates"));
    }
    let l = spec.l;
    let a = marchaud_a(alpha, l)?;
    let upper = match (spec.tau_max, u.vanishes_before()) {
        (Some(tm), _) => tm,
        (None, Some(t0)) => t - t0,
        (None, None) => {
            return Err(Error::domain(
                "tau_max is required when u is not known to vanish for early times",
            ))
        }
    };
    // k = 0 term: u(x,t) ∫_ε^∞ τ^{−1−α} dτ, split at `upper`
    let u0 = u.value(x, t)?;
    let upper = upper.max(eps);
    let k0_tail = u0 * libm::pow(upper, -alpha) / alpha;
    let failed = Cell::new(None);
    let g = |tau: f64| {
        let mut s = 0.0;
        for k in 1..=l {
            let kt = k as f64 * tau;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            match u.smoothed(x, t - kt, kt) {
                Ok(v) => s += sign * binomial(l, k) * v,
                Err(e) => failed.set(Some(e)),
            }
        }
        (u0 + s) * libm::pow(tau, -1.0 - alpha)
    };
    let mut breaks = Vec::new();
    let mut b = eps * 2.0;
    while b < upper {
        breaks.push(b);
        b *= 2.0;
    }
    if let Some(t0) = u.vanishes_before() {
        for k in 1..=l {
            breaks.push((t - t0) / k as f64);
        }
    }
    for tb in u.time_breaks(x) {
        for k in 1..=l {
            breaks.push((t - tb) / k as f64);
        }
    }
    let body = if upper > eps {
        quad::integrate_with_breaks(&g, eps, upper, &breaks, &spec.quad.tol())?
    } else {
        Estimate::ZERO
    };
    if let Some(e) = failed.into_inner() {
        return Err(e);
    }
    // terms with k ≥ 1 beyond an explicit tau_max are dropped; bound them by sup|u| ≈ |u0|
    let mut dropped = 0.0;
    if spec.tau_max.is_some() && u.vanishes_before().map_or(true, |t0| upper < t - t0) {
        dropped = ((1u64 << l) as f64 - 1.0) * u0.abs().max(1.0) * libm::pow(upper, -alpha) / alpha;
    }
    let total = body + Estimate::new(k0_tail, dropped);
    // C (4π)^{n/2} = 1/A
    Ok(total.scale(1.0 / a))
}

/// Result of the dyadic `ε`-scan.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseResult {
    /// Richardson-extrapolated value.
    pub value: f64,
    /// `(ε, J_ε^{−α} u)` for each level.
    pub sequence: Vec<(f64, f64)>,
    /// Convergence rate used for the first extrapolation step.
    pub rate: f64,
    /// Rate observed from the last three levels (`NaN` with fewer levels).
    pub observed_rate: f64,
}

/// `lim_{ε→0} J_ε^{−α} u(x,t)` estimated from `ε, ε/2, …` by Richardson
/// extrapolation.
///
/// For smooth `u` the truncation error is
/// `A^{−1} ∫_0^ε τ^{−1−α} (1 − e^{−τ(∂_t−Δ)})^l u dτ = c₁ ε^{l−α} + c₂ ε^{l+1−α} + …`,
/// so the table eliminates the rates `l−α, l−α+1, …` in turn. The observed
/// rate is reported; a failed Cauchy test on the extrapolants is an error.
pub fn j_inverse(u: &dyn Smoothable, alpha: f64, spec: &InverseSpec, x: &[f64], t: f64) -> Result<InverseResult> {
    spec.validate(alpha)?;
    let mut seq = Vec::with_capacity(spec.levels);
    let mut eps = spec.eps;
    for _ in 0..spec.levels {
        seq.push((eps, j_inverse_at(u, alpha, spec, eps, x, t)?.value));
        eps *= 0.5;
    }
    let rate = f64::from(spec.l) - alpha;
    let vals: Vec<f64> = seq.iter().map(|s| s.1).collect();
    let value = richardson(&vals, rate);
    let observed_rate = if seq.len() >= 3 {
        let k = seq.len();
        let d1 = seq[k - 2].1 - seq[k - 3].1;
        let d2 = seq[k - 1].1 - seq[k - 2].1;
        libm::log2((d1 / d2).abs())
    } else {
        f64::NAN
    };
    if vals.len() >= 3 {
        let previous = richardson(&vals[..vals.len() - 1], rate);
        if (value - previous).abs() > spec.cauchy_tol * value.abs().max(1.0) {
            return Err(Error::NonConvergence(alloc::format!(
                "extrapolated values {previous} and {value} differ by more than the Cauchy tolerance {}",
                spec.cauchy_tol
            )));
        }
    }
    Ok(InverseResult {
        value,
        sequence: seq,
        rate,
        observed_rate,
    })
}

/// Richardson table on a dyadic sequence whose error expands in powers
/// `rate, rate + 1, …` of the step.
fn richardson(vals: &[f64], rate: f64) -> f64 {
    let mut table = vals.to_vec();
    let mut r = rate;
    while table.len() > 1 {
        let f = libm::pow(2.0, r);
        table = table.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
        r += 1.0;
    }
    table[0]
}

/// Least-squares normalization `c` minimizing `Σ (c I_i − f_i)²`, where `I_i`
/// is the unnormalized extrapolated inverse of `u = J_α f` at the sample
/// points. Agreement with [`marchaud_constant`] validates the normalization.
pub fn marchaud_calibration(
    f: &Field,
    n: usize,
    alpha: f64,
    spec: &InverseSpec,
    points: &[(Vec<f64>, f64)],
) -> Result<f64> {
    let u = Potential {
        field: f,
        n,
        alpha,
        quad: spec.quad,
    };
    let c = marchaud_constant(n, alpha, spec.l)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (x, t) in points {
        let raw = j_inverse(&u, alpha, spec, x, *t)?.value / c;
        let target = f.eval(x, *t);
        num += raw * target;
        den += raw * raw;
    }
    if den == 0.0 {
        return Err(Error::domain("calibration needs points where the inverse is nonzero"));
    }
    Ok(num / den)
}

/// Closed form `A(α,l) = Γ(−α) Σ_k (−1)^k C(l,k) k^α` for non-integer `α`.
pub fn marchaud_a_closed_form(alpha: f64, l: u32) -> Result<f64> {
    if alpha.fract() == 0.0 || !(f64::from(l) > alpha) || !(alpha > 0.0) {
        return Err(Error::domain("closed form needs non-integer 0 < alpha < l"));
    }
    let mut s = 0.0;
    for k in 1..=l {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binomial(l, k) * libm::pow(k as f64, alpha);
    }
    // Γ(−α) = Γ(1−α)/(−α), sign from the reflection
    let g = gamma_signed(-alpha);
    Ok(g * s)
}

fn gamma_signed(x: f64) -> f64 {
    // Γ(x) for negative non-integer x via Γ(x) = Γ(x+m)/(x(x+1)…(x+m−1))
    let mut y = x;
    let mut div = 1.0;
    while y <= 0.0 {
        div *= y;
        y += 1.0;
    }
    libm::exp(ln_gamma(y)) / div
}
