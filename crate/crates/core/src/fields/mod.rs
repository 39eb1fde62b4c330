//! Space-time fields `f(x, t)`: the closed-form catalog (self-similar
//! solutions, paraboloid powers, blow-up families), indicator and bump test
//! fields, sampled grids, sums and the parabolic rescaling.
//!
//! Every field vanishes for `t ≤ 0`.

mod blowup;
mod sampled;

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

pub use blowup::{large_time_gamma, make_blowup_large_time, make_blowup_small_time, BlowupFamily, BlowupMode};
pub use sampled::SampledGrid;

use crate::error::{Error, Result};
use crate::kernels::{heat_kernel, norm2};
use crate::quad::{self, Tol};
use crate::special::{
    beta_window, gamma, heat_ball_mass_unchecked, ln_gamma, offset_gaussian_mass, paraboloid_heat_floor,
    sharp_constant, sphere_area, unit_ball_volume,
};

/// `C^∞` step: 0 for `u ≤ 0`, 1 for `u ≥ 1`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = libm::exp(-1.0 / u);
    let b = libm::exp(-1.0 / (1.0 - u));
    a / (a + b)
}

/// Cut-off `ψ_δ`: 1 for `t ≤ 1`, 0 for `t ≥ 1 + δ`, smooth in between.
pub fn cutoff(delta: f64, t: f64) -> f64 {
    1.0 - smooth_step((t - 1.0) / delta)
}

/// Spatial profile of a [`Field::Bump`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BumpProfile {
    /// `e^{−|x|²}`.
    Gaussian,
    /// `exp(1 − 1/(1 − (|x|/R)²))` on `|x| < R`.
    Compact { radius: f64 },
}

impl BumpProfile {
    fn at(&self, r: f64) -> f64 {
        match *self {
            BumpProfile::Gaussian => libm::exp(-r * r),
            BumpProfile::Compact { radius } => {
                let u = r / radius;
                if u >= 1.0 {
                    0.0
                } else {
                    libm::exp(1.0 - 1.0 / (1.0 - u * u))
                }
            }
        }
    }
}

/// A space-time box carrying a constant value.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub t_lo: f64,
    pub t_hi: f64,
    pub value: f64,
}

impl Cell {
    fn contains(&self, x: &[f64], t: f64) -> bool {
        t > self.t_lo && t < self.t_hi && x.iter().zip(&self.lo).zip(&self.hi).all(|((v, a), b)| v > a && v < b)
    }
}

type FieldFn = dyn Fn(&[f64], f64) -> f64 + Send + Sync;

/// A user-supplied closed form. It must vanish for `t ≤ 0`; `time_breaks`
/// lists times where it is not smooth.
#[derive(Clone)]
pub struct FnField {
    pub f: Arc<FieldFn>,
    pub x_independent: bool,
    pub time_breaks: Vec<f64>,
}

impl fmt::Debug for FnField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnField")
            .field("x_independent", &self.x_independent)
            .field("time_breaks", &self.time_breaks)
            .finish_non_exhaustive()
    }
}

/// A space-time function. Construct through the `make_*` functions, which
/// validate parameters and precompute constants.
#[derive(Debug, Clone)]
pub enum Field {
    Zero,
    /// `g(t) = (M t^α)^{λ/(1−λ)}` for `t > 0`.
    ExactSolution {
        alpha: f64,
        lambda: f64,
        m: f64,
    },
    /// `ψ_δ(t) g(t)`.
    MollifiedExact {
        alpha: f64,
        lambda: f64,
        delta: f64,
        m: f64,
    },
    /// `K^{1/(1−λ)} φ(εx) (N/M)^{λ/(1−λ)} g_δ(t)`, `φ(x) = e^{−(√(1+|x|²)−1)}`.
    TiltedExact {
        n: usize,
        alpha: f64,
        lambda: f64,
        big_n: f64,
        k: f64,
        delta: f64,
        gamma_w: f64,
        eps: f64,
        m: f64,
    },
    /// `t^{γ−(n+2)/(2p)}` on `{|x|² < t}`, optionally only for `t < t_max`.
    ParaboloidPower {
        n: usize,
        p: f64,
        gamma_exp: f64,
        t_max: Option<f64>,
    },
    /// `(T−t)^{γ−(n+2)/(2p)}` on `{t0 < t < T, |x| < √(T−t)}`.
    BackwardParaboloid {
        n: usize,
        p: f64,
        gamma_exp: f64,
        t0: f64,
        t_end: f64,
    },
    /// `L g(t)` on `{|x|² < t}`.
    IndicatorSimilarity {
        n: usize,
        alpha: f64,
        lambda: f64,
        l: f64,
        m: f64,
    },
    /// `value` on `{|x| < radius, t_lo < t < t_hi}`; `radius = ∞` gives a slab.
    Cylinder {
        radius: f64,
        t_lo: f64,
        t_hi: f64,
        value: f64,
    },
    /// Smooth bump: spatial profile times a smooth time plateau on `[t_start, t_end]`.
    Bump {
        profile: BumpProfile,
        t_start: f64,
        t_end: f64,
        ramp: f64,
    },
    PiecewiseConstant {
        cells: Vec<Cell>,
    },
    Sum(Vec<Field>),
    /// `K^{1/(1−λ)} T^{αλ/(1−λ)} child(x/√T, t/T)`.
    Rescaled {
        child: Box<Field>,
        k: f64,
        lambda: f64,
        alpha: f64,
        t_scale: f64,
        coef: f64,
    },
    Sampled(Arc<SampledGrid>),
    Function(FnField),
}

/// Inner quadrature controls used by spatial reductions.
#[derive(Debug, Clone, Copy)]
pub struct SmoothCtx {
    pub tol: Tol,
    /// Gaussian windows are cut at this many standard deviations.
    pub tail_sigmas: f64,
}

impl Default for SmoothCtx {
    fn default() -> Self {
        SmoothCtx {
            tol: Tol::new(1e-15, 1e-11, 4096),
            tail_sigmas: 8.0,
        }
    }
}

fn exact_value(alpha: f64, lambda: f64, m: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    libm::exp(lambda / (1.0 - lambda) * (libm::log(m) + alpha * libm::log(t)))
}

fn tilt(eps: f64, r2: f64) -> f64 {
    libm::exp(-((1.0 + eps * eps * r2).sqrt() - 1.0))
}

fn check_lambda_b(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("lambda must lie in (0, 1)"))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite")))
    }
}

/// The self-similar solution `g = (J_α g)^λ`.
pub fn make_exact_solution(alpha: f64, lambda: f64) -> Result<Field> {
    check_lambda_b(lambda)?;
    check_positive("alpha", alpha)?;
    Ok(Field::ExactSolution {
        alpha,
        lambda,
        m: sharp_constant(alpha, lambda)?,
    })
}

pub fn make_mollified_exact(alpha: f64, lambda: f64, delta: f64) -> Result<Field> {
    check_lambda_b(lambda)?;
    check_positive("alpha", alpha)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("delta must lie in (0, 1)"));
    }
    Ok(Field::MollifiedExact {
        alpha,
        lambda,
        delta,
        m: sharp_constant(alpha, lambda)?,
    })
}

/// Spatially tilted, temporally cut-off multiple of the exact solution with
/// `f(0, t) = K^{1/(1−λ)} (N t^α)^{λ/(1−λ)}` on `0 < t ≤ 1` and
/// `0 ≤ f ≤ K (J_α f)^λ`.
///
/// `δ`, the ball parameter `γ_w` and the tilt `ε` are chosen in that order:
/// `1 − C δ^α ≥ √(N/M)` with `C = g(2)/(Γ(α+1) g(1)^{1/λ})`, then
/// `(M/N)^{λ/2} I(γ_w)^λ > 1` with `I(γ) = G(n, 0, γ/2)`, then
/// `(M/N)^{λ/2} I(γ_w)^λ e^{−ε γ_w λ √2} ≥ 1`.
pub fn make_tilted_exact(n: usize, alpha: f64, lambda: f64, big_n: f64, k: f64) -> Result<Field> {
    check_lambda_b(lambda)?;
    check_positive("alpha", alpha)?;
    check_positive("K", k)?;
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let m = sharp_constant(alpha, lambda)?;
    if !(big_n > 0.0 && big_n < m) {
        return Err(Error::Domain(format!("N must lie in (0, M) = (0, {m})")));
    }
    let ratio = big_n / m;
    let g = |t: f64| exact_value(alpha, lambda, m, t);
    let c = g(2.0) / (gamma(alpha + 1.0) * libm::pow(g(1.0), 1.0 / lambda));
    let mut delta: f64 = 0.5;
    let mut tries = 0;
    while 1.0 - c * libm::pow(delta, alpha) < ratio.sqrt() {
        delta *= 0.5;
        tries += 1;
        if tries > 200 {
            return Err(Error::SearchExhausted("cut-off width delta".into()));
        }
    }
    let lift = libm::pow(1.0 / ratio, lambda / 2.0);
    let i_of = |gw: f64| offset_gaussian_mass(n, 0.0, gw / 2.0);
    let mut gamma_w: f64 = 2.0;
    tries = 0;
    while lift * libm::pow(i_of(gamma_w), lambda) <= 1.0 {
        gamma_w *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::SearchExhausted("ball parameter gamma".into()));
        }
    }
    let base = lift * libm::pow(i_of(gamma_w), lambda);
    let mut eps: f64 = 0.5;
    tries = 0;
    while base * libm::exp(-eps * gamma_w * lambda * 2f64.sqrt()) < 1.0 {
        eps *= 0.5;
        tries += 1;
        if tries > 200 {
            return Err(Error::SearchExhausted("tilt epsilon".into()));
        }
    }
    Ok(Field::TiltedExact {
        n,
        alpha,
        lambda,
        big_n,
        k,
        delta,
        gamma_w,
        eps,
        m,
    })
}

/// `f₀(x,t) = t^{γ−(n+2)/(2p)} χ_{|x|²<t}`.
pub fn make_paraboloid_power(n: usize, p: f64, gamma_exp: f64) -> Result<Field> {
    if !(gamma_exp > 0.0) {
        return Err(Error::domain("gamma must be positive"));
    }
    if !(p >= 1.0) {
        return Err(Error::domain("p must be at least 1"));
    }
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    Ok(Field::ParaboloidPower {
        n,
        p,
        gamma_exp,
        t_max: None,
    })
}

/// `(T−t)^{γ−(n+2)/(2p)}` on `{t0 < t < T, |x| < √(T−t)}`.
pub fn make_backward_paraboloid(n: usize, p: f64, gamma_exp: f64, t0: f64, t_end: f64) -> Result<Field> {
    if !(t0 >= 0.0 && t0 < t_end) {
        return Err(Error::domain("backward paraboloid needs 0 <= t0 < T"));
    }
    if !(p >= 1.0) || !gamma_exp.is_finite() || n == 0 {
        return Err(Error::domain(
            "backward paraboloid needs n >= 1, p >= 1 and finite gamma",
        ));
    }
    Ok(Field::BackwardParaboloid {
        n,
        p,
        gamma_exp,
        t0,
        t_end,
    })
}

/// `L g(t) χ_{|x|²<t}` with `L = C^{λ/(1−λ)}`, `C = G(n,1,1/(2√3)) B(α,λ) / (Γ(α) M)`,
/// `B = ∫_{1/4}^{3/4} (1−s)^{α−1} s^{αλ/(1−λ)} ds`.
pub fn make_indicator_similarity(n: usize, alpha: f64, lambda: f64) -> Result<Field> {
    check_lambda_b(lambda)?;
    check_positive("alpha", alpha)?;
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let m = sharp_constant(alpha, lambda)?;
    let b = beta_window(alpha, alpha * lambda / (1.0 - lambda), 0.25, 0.75);
    let c = paraboloid_heat_floor(n) * b / (gamma(alpha) * m);
    Ok(Field::IndicatorSimilarity {
        n,
        alpha,
        lambda,
        l: libm::pow(c, lambda / (1.0 - lambda)),
        m,
    })
}

/// `value · χ_{t_lo < t < t_hi}`.
pub fn make_slab(t_lo: f64, t_hi: f64, value: f64) -> Result<Field> {
    make_cylinder(f64::INFINITY, t_lo, t_hi, value)
}

pub fn make_cylinder(radius: f64, t_lo: f64, t_hi: f64, value: f64) -> Result<Field> {
    if !(t_lo >= 0.0 && t_hi > t_lo) {
        return Err(Error::domain("cylinder needs 0 <= t_lo < t_hi"));
    }
    if !(radius > 0.0) || !value.is_finite() {
        return Err(Error::domain("cylinder needs a positive radius and finite value"));
    }
    Ok(Field::Cylinder {
        radius,
        t_lo,
        t_hi,
        value,
    })
}

pub fn make_bump(profile: BumpProfile, t_start: f64, t_end: f64, ramp: f64) -> Result<Field> {
    if !(t_start >= 0.0 && t_end > t_start && ramp > 0.0 && 2.0 * ramp <= t_end - t_start) {
        return Err(Error::domain("bump needs 0 <= t_start, 0 < 2 ramp <= t_end - t_start"));
    }
    if let BumpProfile::Compact { radius } = profile {
        check_positive("bump radius", radius)?;
    }
    Ok(Field::Bump {
        profile,
        t_start,
        t_end,
        ramp,
    })
}

pub fn make_piecewise_constant(n: usize, cells: Vec<Cell>) -> Result<Field> {
    for c in &cells {
        if c.lo.len() != n || c.hi.len() != n {
            return Err(Error::domain("cell dimension does not match n"));
        }
        if !(c.t_lo >= 0.0 && c.t_hi > c.t_lo) || c.lo.iter().zip(&c.hi).any(|(a, b)| !(b > a)) {
            return Err(Error::domain("cells need positive extent and t_lo >= 0"));
        }
    }
    Ok(Field::PiecewiseConstant { cells })
}

pub fn make_sampled(grid: SampledGrid) -> Field {
    Field::Sampled(Arc::new(grid))
}

/// Wraps a closure. It must vanish for `t ≤ 0`; this is checked on a few probes.
pub fn make_function<F>(f: F, x_independent: bool, time_breaks: Vec<f64>) -> Result<Field>
where
    F: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
{
    for &t in &[0.0, -1e-9, -0.5, -3.0] {
        if f(&[0.0; 3][..1], t) != 0.0 {
            return Err(Error::domain("function fields must vanish for t <= 0"));
        }
    }
    Ok(Field::Function(FnField {
        f: Arc::new(f),
        x_independent,
        time_breaks,
    }))
}

/// `f(x,t) = K^{1/(1−λ)} T^{αλ/(1−λ)} child(x/√T, t/T)`: maps a subsolution
/// with constant 1 to one with constant `K`.
pub fn rescale(child: Field, k: f64, lambda: f64, alpha: f64, t_scale: f64) -> Result<Field> {
    if lambda == 1.0 || !(lambda > 0.0) {
        return Err(Error::domain("rescaling needs lambda > 0, lambda != 1"));
    }
    check_positive("K", k)?;
    check_positive("T", t_scale)?;
    check_positive("alpha", alpha)?;
    let e = 1.0 / (1.0 - lambda);
    let coef = libm::exp(e * libm::log(k) + alpha * lambda * e * libm::log(t_scale));
    Ok(Field::Rescaled {
        child: Box::new(child),
        k,
        lambda,
        alpha,
        t_scale,
        coef,
    })
}

/// Rescaling parameters `(K', T')` that undo `rescale(·, K, λ, α, T)`.
pub fn rescale_inverse(k: f64, t_scale: f64) -> (f64, f64) {
    (1.0 / k, 1.0 / t_scale)
}

impl Field {
    pub fn sum(children: Vec<Field>) -> Field {
        Field::Sum(children)
    }

    /// Pointwise value; zero for `t ≤ 0`.
    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        self.eval_flagged(x, t).0
    }

    /// Value plus a flag that is `false` when a sampled component was queried
    /// outside its grid hull (the value there is taken as 0).
    pub fn eval_flagged(&self, x: &[f64], t: f64) -> (f64, bool) {
        if t <= 0.0 {
            return (0.0, true);
        }
        let v = match self {
            Field::Zero => 0.0,
            Field::ExactSolution { alpha, lambda, m } => exact_value(*alpha, *lambda, *m, t),
            Field::MollifiedExact {
                alpha,
                lambda,
                delta,
                m,
            } => cutoff(*delta, t) * exact_value(*alpha, *lambda, *m, t),
            Field::TiltedExact { .. } => self.tilted_time(t) * self.tilted_space(norm2(x)),
            Field::ParaboloidPower { n, p, gamma_exp, t_max } => {
                if norm2(x) < t && t_max.map_or(true, |tm| t < tm) {
                    libm::pow(t, -(paraboloid_exponent(*n, *p, *gamma_exp)))
                } else {
                    0.0
                }
            }
            Field::BackwardParaboloid {
                n,
                p,
                gamma_exp,
                t0,
                t_end,
            } => {
                if t > *t0 && t < *t_end && norm2(x) < t_end - t {
                    libm::pow(t_end - t, -(paraboloid_exponent(*n, *p, *gamma_exp)))
                } else {
                    0.0
                }
            }
            Field::IndicatorSimilarity {
                alpha, lambda, l, m, ..
            } => {
                if norm2(x) < t {
                    l * exact_value(*alpha, *lambda, *m, t)
                } else {
                    0.0
                }
            }
            Field::Cylinder {
                radius,
                t_lo,
                t_hi,
                value,
            } => {
                if t > *t_lo && t < *t_hi && norm2(x) < radius * radius {
                    *value
                } else {
                    0.0
                }
            }
            Field::Bump { profile, .. } => self.bump_time(t) * profile.at(norm2(x).sqrt()),
            Field::PiecewiseConstant { cells } => cells.iter().filter(|c| c.contains(x, t)).map(|c| c.value).sum(),
            Field::Sum(children) => {
                let mut ok = true;
                let mut s = 0.0;
                for c in children {
                    let (v, inside) = c.eval_flagged(x, t);
                    ok &= inside;
                    s += v;
                }
                return (s, ok);
            }
            Field::Rescaled {
                child, t_scale, coef, ..
            } => {
                let w = 1.0 / t_scale.sqrt();
                let xs: Vec<f64> = x.iter().map(|v| v * w).collect();
                let (v, ok) = child.eval_flagged(&xs, t / t_scale);
                return (coef * v, ok);
            }
            Field::Sampled(g) => return g.eval(x, t),
            Field::Function(ff) => (ff.f)(x, t),
        };
        (v, true)
    }

    fn tilted_time(&self, t: f64) -> f64 {
        match *self {
            Field::TiltedExact {
                alpha,
                lambda,
                big_n,
                k,
                delta,
                m,
                ..
            } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let e = 1.0 / (1.0 - lambda);
                let pre = libm::exp(e * libm::log(k) + lambda * e * libm::log(big_n / m));
                pre * cutoff(delta, t) * exact_value(alpha, lambda, m, t)
            }
            _ => 0.0,
        }
    }

    fn tilted_space(&self, r2: f64) -> f64 {
        match *self {
            Field::TiltedExact { eps, .. } => tilt(eps, r2),
            _ => 0.0,
        }
    }

    fn bump_time(&self, t: f64) -> f64 {
        match *self {
            Field::Bump {
                t_start, t_end, ramp, ..
            } => smooth_step((t - t_start) / ramp) * smooth_step((t_end - t) / ramp),
            _ => 0.0,
        }
    }

    /// True when the field does not depend on `x`.
    pub fn is_x_independent(&self) -> bool {
        match self {
            Field::Zero | Field::ExactSolution { .. } | Field::MollifiedExact { .. } => true,
            Field::Cylinder { radius, .. } => radius.is_infinite(),
            Field::Sum(c) => c.iter().all(Field::is_x_independent),
            Field::Rescaled { child, .. } => child.is_x_independent(),
            Field::Function(ff) => ff.x_independent,
            _ => false,
        }
    }

    /// True for the catalog's radially symmetric (about `x = 0`) variants.
    pub fn is_radial(&self) -> bool {
        match self {
            Field::PiecewiseConstant { .. } | Field::Sampled(_) => false,
            Field::Function(ff) => ff.x_independent,
            Field::Sum(c) => c.iter().all(Field::is_radial),
            Field::Rescaled { child, .. } => child.is_radial(),
            _ => true,
        }
    }

    /// Times in `(lo, hi)` where `τ ↦ f(x, τ)` or its heat smoothing may fail
    /// to be smooth, for the given `x`.
    pub fn time_breaks(&self, x: &[f64], lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breaks(x, &mut out);
        out.retain(|&b| b.is_finite() && b > lo && b < hi);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breaks(&self, x: &[f64], out: &mut Vec<f64>) {
        let r2 = norm2(x);
        match self {
            Field::Zero | Field::ExactSolution { .. } => out.push(0.0),
            Field::MollifiedExact { delta, .. } | Field::TiltedExact { delta, .. } => {
                out.extend([0.0, 1.0, 1.0 + delta])
            }
            Field::ParaboloidPower { t_max, .. } => {
                out.extend([0.0, r2]);
                if let Some(tm) = t_max {
                    out.push(*tm);
                }
            }
            Field::BackwardParaboloid { t0, t_end, .. } => out.extend([*t0, *t_end, t_end - r2]),
            Field::IndicatorSimilarity { .. } => out.extend([0.0, r2]),
            Field::Cylinder { t_lo, t_hi, .. } => out.extend([*t_lo, *t_hi]),
            Field::Bump {
                t_start, t_end, ramp, ..
            } => out.extend([*t_start, t_start + ramp, t_end - ramp, *t_end]),
            Field::PiecewiseConstant { cells } => {
                for c in cells {
                    out.extend([c.t_lo, c.t_hi]);
                }
            }
            Field::Sum(children) => {
                for c in children {
                    c.collect_breaks(x, out);
                }
            }
            Field::Rescaled { child, t_scale, .. } => {
                let w = 1.0 / t_scale.sqrt();
                let xs: Vec<f64> = x.iter().map(|v| v * w).collect();
                let mut inner = Vec::new();
                child.collect_breaks(&xs, &mut inner);
                out.extend(inner.into_iter().map(|b| b * t_scale));
            }
            Field::Sampled(g) => out.extend_from_slice(g.times()),
            Field::Function(ff) => {
                out.push(0.0);
                out.extend_from_slice(&ff.time_breaks);
            }
        }
    }

    /// `∫ Φ₁(x − ξ, σ) f(ξ, t) dξ`, the heat smoothing of the time slice at `t`.
    /// For `σ = 0` this is `f(x, t)`.
    pub fn heat_smooth(&self, x: &[f64], t: f64, sigma: f64, ctx: &SmoothCtx) -> Result<f64> {
        if sigma <= 0.0 {
            return Ok(self.eval(x, t));
        }
        if t <= 0.0 {
            return Ok(0.0);
        }
        let n = x.len();
        let d = norm2(x).sqrt();
        Ok(match self {
            Field::Zero => 0.0,
            Field::ExactSolution { .. } | Field::MollifiedExact { .. } => self.eval(x, t),
            Field::TiltedExact { eps, .. } => {
                let tt = self.tilted_time(t);
                if tt == 0.0 {
                    0.0
                } else {
                    let e = *eps;
                    tt * radial_heat(n, d, sigma, &|r: f64| tilt(e, r * r), None, ctx)?
                }
            }
            Field::ParaboloidPower { .. } | Field::IndicatorSimilarity { .. } => {
                let v = self.eval(&[0.0], t);
                if v == 0.0 {
                    0.0
                } else {
                    v * heat_ball_mass_unchecked(n, d, sigma, t.sqrt())
                }
            }
            Field::BackwardParaboloid { t_end, .. } => {
                let v = self.eval(&[0.0], t);
                if v == 0.0 {
                    0.0
                } else {
                    v * heat_ball_mass_unchecked(n, d, sigma, (t_end - t).sqrt())
                }
            }
            Field::Cylinder {
                radius,
                t_lo,
                t_hi,
                value,
            } => {
                if t > *t_lo && t < *t_hi {
                    value * heat_ball_mass_unchecked(n, d, sigma, *radius)
                } else {
                    0.0
                }
            }
            Field::Bump { profile, .. } => {
                let s = self.bump_time(t);
                if s == 0.0 {
                    0.0
                } else {
                    match *profile {
                        BumpProfile::Gaussian => {
                            let w = 1.0 + 4.0 * sigma;
                            s * libm::pow(w, -0.5 * n as f64) * libm::exp(-d * d / w)
                        }
                        BumpProfile::Compact { radius } => {
                            let p = *profile;
                            s * radial_heat(n, d, sigma, &|r: f64| p.at(r), Some(radius), ctx)?
                        }
                    }
                }
            }
            Field::PiecewiseConstant { cells } => {
                let w = (4.0 * sigma).sqrt();
                let mut acc = 0.0;
                for c in cells.iter().filter(|c| t > c.t_lo && t < c.t_hi) {
                    let mut prod = c.value;
                    for ((xi, lo), hi) in x.iter().zip(&c.lo).zip(&c.hi).take(n) {
                        prod *= 0.5 * (libm::erf((xi - lo) / w) - libm::erf((xi - hi) / w));
                    }
                    acc += prod;
                }
                acc
            }
            Field::Sum(children) => {
                let mut s = 0.0;
                for c in children {
                    s += c.heat_smooth(x, t, sigma, ctx)?;
                }
                s
            }
            Field::Rescaled {
                child, t_scale, coef, ..
            } => {
                let w = 1.0 / t_scale.sqrt();
                let xs: Vec<f64> = x.iter().map(|v| v * w).collect();
                coef * child.heat_smooth(&xs, t / t_scale, sigma / t_scale, ctx)?
            }
            Field::Sampled(g) => g.heat_smooth(x, t, sigma),
            Field::Function(ff) => {
                if ff.x_independent {
                    (ff.f)(x, t)
                } else {
                    let mut pt = x.to_vec();
                    nested_gaussian(&*ff.f, x, &mut pt, 0, t, sigma, ctx)?
                }
            }
        })
    }

    /// `∫_{S^{n−1}} f(x + rω, t) dω` over the unit sphere (for `n = 1`: `f(x+r) + f(x−r)`).
    pub fn sphere_integral(&self, x: &[f64], t: f64, r: f64, ctx: &SmoothCtx) -> Result<f64> {
        let n = x.len();
        if t <= 0.0 {
            return Ok(0.0);
        }
        if r == 0.0 {
            return Ok(sphere_area(n) * self.eval(x, t));
        }
        if self.is_x_independent() {
            return Ok(sphere_area(n) * self.eval(x, t));
        }
        let d = norm2(x).sqrt();
        if let Some((radius, v)) = self.ball_indicator(t) {
            return Ok(v * sphere_fraction_in_ball(n, d, r, radius));
        }
        if let Field::Sum(children) = self {
            let mut s = 0.0;
            for c in children {
                s += c.sphere_integral(x, t, r, ctx)?;
            }
            return Ok(s);
        }
        if n == 1 {
            return Ok(self.eval(&[x[0] + r], t) + self.eval(&[x[0] - r], t));
        }
        if self.is_radial() {
            let f = |rho: f64| self.eval(&radial_point(n, rho), t);
            return radial_sphere_mean(n, d, r, &f, None, ctx);
        }
        match n {
            2 => {
                let f = |th: f64| self.eval(&[x[0] + r * libm::cos(th), x[1] + r * libm::sin(th)], t);
                Ok(quad::integrate_outcome(&f, 0.0, 2.0 * PI, &[], &ctx.tol).estimate.value)
            }
            3 => {
                let outer = |th: f64| {
                    let (s, c) = (libm::sin(th), libm::cos(th));
                    let inner = |ph: f64| {
                        self.eval(
                            &[x[0] + r * s * libm::cos(ph), x[1] + r * s * libm::sin(ph), x[2] + r * c],
                            t,
                        )
                    };
                    s * quad::integrate_outcome(&inner, 0.0, 2.0 * PI, &[], &ctx.tol)
                        .estimate
                        .value
                };
                Ok(quad::integrate_outcome(&outer, 0.0, PI, &[], &ctx.tol).estimate.value)
            }
            _ => Err(Error::Unsupported(
                "sphere integrals of non-radial fields are implemented for n <= 3".into(),
            )),
        }
    }

    /// `(radius, value)` when the time slice at `t` is a constant on a centred ball.
    fn ball_indicator(&self, t: f64) -> Option<(f64, f64)> {
        match self {
            Field::ParaboloidPower { .. } | Field::IndicatorSimilarity { .. } => Some((t.sqrt(), self.eval(&[0.0], t))),
            Field::BackwardParaboloid { t_end, .. } => {
                let v = self.eval(&[0.0], t);
                Some(((t_end - t).max(0.0).sqrt(), v))
            }
            Field::Cylinder {
                radius,
                t_lo,
                t_hi,
                value,
            } => Some((*radius, if t > *t_lo && t < *t_hi { *value } else { 0.0 })),
            _ => None,
        }
    }

    /// Radius of a centred ball containing the support of the slice at `t`,
    /// `None` when unbounded.
    pub fn support_radius(&self, t: f64) -> Option<f64> {
        match self {
            Field::Zero => Some(0.0),
            Field::ParaboloidPower { .. } | Field::IndicatorSimilarity { .. } => Some(t.max(0.0).sqrt()),
            Field::BackwardParaboloid { t_end, .. } => Some((t_end - t).max(0.0).sqrt()),
            Field::Cylinder { radius, .. } => radius.is_finite().then_some(*radius),
            Field::Bump {
                profile: BumpProfile::Compact { radius },
                ..
            } => Some(*radius),
            Field::PiecewiseConstant { cells } => Some(cells.iter().fold(0.0, |m: f64, c| {
                let r2: f64 = c.lo.iter().zip(&c.hi).map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum();
                m.max(r2.sqrt())
            })),
            Field::Sampled(g) => Some(
                g.axes()
                    .iter()
                    .map(|a| a[0].abs().max(a[a.len() - 1].abs()).powi(2))
                    .sum::<f64>()
                    .sqrt(),
            ),
            Field::Sum(c) => c.iter().try_fold(0.0f64, |m, f| f.support_radius(t).map(|r| m.max(r))),
            Field::Rescaled { child, t_scale, .. } => child.support_radius(t / t_scale).map(|r| r * t_scale.sqrt()),
            _ => None,
        }
    }

    /// True when every slice decays at least exponentially in `|x|`.
    pub fn decays_in_space(&self) -> bool {
        match self {
            Field::TiltedExact { .. } | Field::Bump { .. } => true,
            Field::Sum(c) => c.iter().all(|f| f.support_radius(1.0).is_some() || f.decays_in_space()),
            Field::Rescaled { child, .. } => child.decays_in_space(),
            _ => false,
        }
    }

    /// Supremum of `|f|` where it is available in closed form.
    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            Field::Zero => Some(0.0),
            Field::Cylinder { value, .. } => Some(value.abs()),
            Field::Bump { .. } => Some(1.0),
            Field::PiecewiseConstant { cells } => Some(cells.iter().fold(0.0, |m: f64, c| m.max(c.value.abs()))),
            Field::Sampled(g) => Some(g.max_abs()),
            _ => None,
        }
    }
}

/// `(n+2)/(2p) − γ`, the decay exponent of paraboloid powers.
pub fn paraboloid_exponent(n: usize, p: f64, gamma_exp: f64) -> f64 {
    (n as f64 + 2.0) / (2.0 * p) - gamma_exp
}

fn radial_point(n: usize, rho: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[0] = rho;
    v
}

/// `∫_a^π sin^m θ dθ`.
fn sin_power_tail(m: usize, a: f64) -> f64 {
    match m {
        0 => PI - a,
        1 => 1.0 + libm::cos(a),
        _ => {
            let s = libm::sin(a);
            libm::pow(s, (m - 1) as f64) * libm::cos(a) / m as f64
                + (m as f64 - 1.0) / m as f64 * sin_power_tail(m - 2, a)
        }
    }
}

/// Measure of `{ω ∈ S^{n−1} : |x + rω| < R}` with `|x| = d`.
pub fn sphere_fraction_in_ball(n: usize, d: f64, r: f64, radius: f64) -> f64 {
    if radius <= 0.0 {
        return 0.0;
    }
    if n == 1 {
        return ((d + r).abs() < radius) as u8 as f64 + ((d - r).abs() < radius) as u8 as f64;
    }
    if d + r <= radius {
        return sphere_area(n);
    }
    if (d - r).abs() >= radius {
        return 0.0;
    }
    let c0 = ((radius * radius - d * d - r * r) / (2.0 * d * r)).clamp(-1.0, 1.0);
    sphere_area(n - 1) * sin_power_tail(n - 2, libm::acos(c0))
}

/// Sphere integral for a radial profile `P(|ξ|)` about a point at distance `d`.
fn radial_sphere_mean(
    n: usize,
    d: f64,
    r: f64,
    profile: &dyn Fn(f64) -> f64,
    support: Option<f64>,
    ctx: &SmoothCtx,
) -> Result<f64> {
    if n == 1 {
        return Ok(profile((d + r).abs()) + profile((d - r).abs()));
    }
    if d == 0.0 || r == 0.0 {
        return Ok(sphere_area(n) * profile(d + r));
    }
    let mut lo = 0.0;
    if let Some(rad) = support {
        if (d - r).abs() >= rad {
            return Ok(0.0);
        }
        // |ξ|² = d² + r² + 2dr cosθ < R²  ⇔  θ > acos(c0)
        let c0 = ((rad * rad - d * d - r * r) / (2.0 * d * r)).clamp(-1.0, 1.0);
        lo = libm::acos(c0);
    }
    let m = (n - 2) as f64;
    let f = |th: f64| {
        let rho2 = (d * d + r * r + 2.0 * d * r * libm::cos(th)).max(0.0);
        let w = if m == 0.0 { 1.0 } else { libm::pow(libm::sin(th), m) };
        w * profile(rho2.sqrt())
    };
    let v = quad::integrate_outcome(&f, lo, PI, &[], &ctx.tol).into_result(&ctx.tol)?;
    Ok(sphere_area(n - 1) * v.value)
}

/// `∫ Φ₁(x − ξ, σ) P(|ξ|) dξ` by integrating Gaussian shells around `x`.
fn radial_heat(
    n: usize,
    d: f64,
    sigma: f64,
    profile: &dyn Fn(f64) -> f64,
    support: Option<f64>,
    ctx: &SmoothCtx,
) -> Result<f64> {
    let std = (2.0 * sigma).sqrt();
    let mut hi = ctx.tail_sigmas.max(4.0) * std;
    let mut lo = 0.0;
    if let Some(rad) = support {
        hi = hi.min(d + rad);
        lo = (d - rad).max(0.0);
        if lo >= hi {
            return Ok(0.0);
        }
    }
    if n == 1 || n == 3 {
        return radial_heat_odd(n, d, sigma, profile, support, ctx);
    }
    let failed = core::cell::Cell::new(None);
    let f = |r: f64| {
        let g = heat_kernel(n, r * r, sigma) * libm::pow(r, (n - 1) as f64);
        if g == 0.0 {
            return 0.0;
        }
        match radial_sphere_mean(n, d, r, profile, support, ctx) {
            Ok(v) => g * v,
            Err(e) => {
                failed.set(Some(e));
                0.0
            }
        }
    };
    let mut breaks = Vec::new();
    if let Some(rad) = support {
        breaks.push((d - rad).abs());
        breaks.push(rad - d);
    }
    let v = quad::integrate_outcome(&f, lo, hi, &breaks, &ctx.tol).into_result(&ctx.tol)?;
    if let Some(e) = failed.into_inner() {
        return Err(e);
    }
    Ok(v.value)
}

/// One-dimensional forms of the radial heat smoothing for `n = 1` and `n = 3`,
/// integrating over the profile radius `ρ` instead of shells around `x`:
///
/// * `n = 1`: `∫_0^∞ P(ρ) [g(d−ρ) + g(d+ρ)] dρ`,
/// * `n = 3`: `(1/d) ∫_0^∞ ρ P(ρ) [g(d−ρ) − g(d+ρ)] dρ`,
///
/// with `g` the one-dimensional heat kernel at time `σ`.
fn radial_heat_odd(
    n: usize,
    d: f64,
    sigma: f64,
    profile: &dyn Fn(f64) -> f64,
    support: Option<f64>,
    ctx: &SmoothCtx,
) -> Result<f64> {
    let w = ctx.tail_sigmas.max(4.0) * (2.0 * sigma).sqrt();
    let mut hi = d + w;
    if let Some(rad) = support {
        hi = hi.min(rad);
    }
    let lo = (d - w).max(0.0);
    if lo >= hi {
        return Ok(0.0);
    }
    let norm = 1.0 / (4.0 * PI * sigma).sqrt();
    let gauss = |u: f64| norm * libm::exp(-u * u / (4.0 * sigma));
    let out = if n == 1 {
        let f = |rho: f64| {
            let p = profile(rho);
            if p == 0.0 {
                0.0
            } else {
                p * (gauss(d - rho) + gauss(d + rho))
            }
        };
        quad::integrate_outcome(&f, lo, hi, &[d], &ctx.tol)
    } else {
        // [g(d−ρ) − g(d+ρ)]/d = g(d−ρ)(1 − e^{−z})/d with z = dρ/σ, and (1 − e^{−z})/d = (ρ/σ)(1 − e^{−z})/z
        let f = |rho: f64| {
            let p = profile(rho);
            if p == 0.0 || rho == 0.0 {
                return 0.0;
            }
            let z = d * rho / sigma;
            let ratio = if z < 1e-8 { 1.0 - 0.5 * z } else { -libm::expm1(-z) / z };
            rho * p * gauss(d - rho) * (rho / sigma) * ratio
        };
        quad::integrate_outcome(&f, lo, hi, &[d], &ctx.tol)
    };
    Ok(out.into_result(&ctx.tol)?.value)
}

/// Nested product-Gaussian expectation `E[f(x + √(2σ) Z, t)]`, coordinate by coordinate.
fn nested_gaussian(
    f: &FieldFn,
    x: &[f64],
    pt: &mut [f64],
    axis: usize,
    t: f64,
    sigma: f64,
    ctx: &SmoothCtx,
) -> Result<f64> {
    let n = x.len();
    if axis == n {
        return Ok(f(pt, t));
    }
    let w = ctx.tail_sigmas.max(4.0) * (2.0 * sigma).sqrt();
    let cell = core::cell::RefCell::new(pt.to_vec());
    let failed = core::cell::Cell::new(None);
    let g = |e: f64| {
        let mut p = cell.borrow_mut();
        p[axis] = e;
        let mut local = p.clone();
        drop(p);
        match nested_gaussian(f, x, &mut local, axis + 1, t, sigma, ctx) {
            Ok(v) => heat_kernel(1, (x[axis] - e) * (x[axis] - e), sigma) * v,
            Err(err) => {
                failed.set(Some(err));
                0.0
            }
        }
    };
    let v = quad::integrate_outcome(&g, x[axis] - w, x[axis] + w, &[], &ctx.tol).into_result(&ctx.tol)?;
    if let Some(e) = failed.into_inner() {
        return Err(e);
    }
    Ok(v.value)
}

/// `∫_lo^hi s^k ds`, `+∞` when divergent.
fn power_integral(k: f64, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    if lo == 0.0 && k <= -1.0 {
        return f64::INFINITY;
    }
    if hi == f64::INFINITY {
        return if k < -1.0 {
            -libm::pow(lo, k + 1.0) / (k + 1.0)
        } else {
            f64::INFINITY
        };
    }
    if k == -1.0 {
        libm::log(hi / lo)
    } else {
        (libm::pow(hi, k + 1.0) - libm::pow(lo, k + 1.0)) / (k + 1.0)
    }
}

/// Exact `‖f‖_{L^p(R^n × (t_lo, t_hi))}` for the radial-indicator variants,
/// `+∞` when the reduced one-dimensional integral diverges.
pub fn closed_form_lp_norm(field: &Field, p: f64, t_lo: f64, t_hi: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::domain("p must be at least 1"));
    }
    if !(t_hi > t_lo) {
        return Err(Error::domain("empty time window"));
    }
    let pth = closed_form_lp_pow(field, p, t_lo, t_hi)?;
    Ok(if pth.is_infinite() {
        f64::INFINITY
    } else {
        libm::pow(pth, 1.0 / p)
    })
}

fn closed_form_lp_pow(field: &Field, p: f64, t_lo: f64, t_hi: f64) -> Result<f64> {
    match *field {
        Field::ParaboloidPower {
            n,
            p: pf,
            gamma_exp,
            t_max,
        } => {
            let e = paraboloid_exponent(n, pf, gamma_exp);
            let hi = t_max.map_or(t_hi, |tm| t_hi.min(tm));
            let lo = t_lo.max(0.0);
            // slice at t is a ball of radius √t
            Ok(unit_ball_volume(n) * power_integral(0.5 * n as f64 - e * p, lo, hi))
        }
        Field::BackwardParaboloid {
            n,
            p: pf,
            gamma_exp,
            t0,
            t_end,
        } => {
            let e = paraboloid_exponent(n, pf, gamma_exp);
            let lo = t_lo.max(t0);
            let hi = t_hi.min(t_end);
            if !(hi > lo) {
                return Ok(0.0);
            }
            // in s = T − t
            Ok(unit_ball_volume(n) * power_integral(0.5 * n as f64 - e * p, t_end - hi, t_end - lo))
        }
        Field::IndicatorSimilarity { n, alpha, lambda, l, m } => {
            let e = lambda / (1.0 - lambda);
            let c = libm::pow(l, p) * libm::exp(p * e * libm::log(m));
            Ok(unit_ball_volume(n) * c * power_integral(0.5 * n as f64 + p * alpha * e, t_lo.max(0.0), t_hi))
        }
        Field::Zero => Ok(0.0),
        _ => Err(Error::Unsupported(
            "closed-form norms exist for paraboloid, backward paraboloid and indicator-similarity fields".into(),
        )),
    }
}

/// Minkowski upper bound `Σ ‖f_i‖_p` for sums of closed-form terms.
pub fn lp_norm_upper_bound(field: &Field, p: f64, t_lo: f64, t_hi: f64) -> Result<f64> {
    match field {
        Field::Sum(children) => {
            let mut s = 0.0;
            for c in children {
                s += lp_norm_upper_bound(c, p, t_lo, t_hi)?;
            }
            Ok(s)
        }
        _ => closed_form_lp_norm(field, p, t_lo, t_hi),
    }
}

/// `N = L^{(1−λ)/λ} M`: the indicator-similarity field satisfies
/// `f ≥ (N t^α)^{λ/(1−λ)}` on `|x|² < t`.
pub fn indicator_similarity_n(field: &Field) -> Option<f64> {
    match *field {
        Field::IndicatorSimilarity { lambda, l, m, .. } => Some(libm::pow(l, (1.0 - lambda) / lambda) * m),
        _ => None,
    }
}

/// `ln Γ` re-export for callers assembling their own constants.
pub fn ln_gamma_of(x: f64) -> f64 {
    ln_gamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_examples() {
        let g = make_exact_solution(1.0, 0.5).unwrap();
        assert!((g.eval(&[0.3], 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(g.eval(&[0.0], -0.5), 0.0);
        let f = make_paraboloid_power(1, 1.0, 0.5).unwrap();
        assert_eq!(f.eval(&[0.5], 0.16), 0.0);
        assert!((f.eval(&[0.0], 1.0) - 1.0).abs() < 1e-15);
        let mut s = make_indicator_similarity(1, 1.0, 0.5).unwrap();
        if let Field::IndicatorSimilarity { l, .. } = &mut s {
            *l = 1.0;
        }
        assert!((s.eval(&[0.0], 4.0) - 2.0).abs() < 1e-15);
        assert_eq!(s.eval(&[2.0], 4.0), 0.0);
    }

    #[test]
    fn exact_half_half() {
        let g = make_exact_solution(0.5, 0.5).unwrap();
        let m = PI.sqrt() / 2.0;
        for &t in &[0.1, 1.0, 3.0] {
            assert!((g.eval(&[0.0], t) - m * t.sqrt()).abs() < 1e-14);
        }
        assert!(make_exact_solution(1.0, 1.5).is_err());
    }

    #[test]
    fn tilted_profile_at_origin() {
        let (a, l, k) = (0.7, 0.4, 1.7);
        let m = sharp_constant(a, l).unwrap();
        let f = make_tilted_exact(1, a, l, 0.9 * m, k).unwrap();
        for &t in &[0.05, 0.5, 1.0] {
            let e = 1.0 / (1.0 - l);
            let want = k.powf(e) * (0.9 * m * t.powf(a)).powf(l * e);
            assert!((f.eval(&[0.0], t) - want).abs() < 1e-13 * want);
        }
        if let Field::TiltedExact { delta, .. } = f {
            assert_eq!(f.eval(&[0.0], 1.0 + delta), 0.0);
            assert_eq!(f.eval(&[0.0], 1.0 + delta + 0.1), 0.0);
        }
        assert!(make_tilted_exact(1, a, l, m, k).is_err());
    }

    #[test]
    fn paraboloid_norm() {
        let f = make_paraboloid_power(1, 1.0, 0.5).unwrap();
        assert!((closed_form_lp_norm(&f, 1.0, 0.0, 1.0).unwrap() - 4.0).abs() < 1e-14);
        let b = make_backward_paraboloid(1, 1.0, 0.5, 0.0, 1.0).unwrap();
        assert!((closed_form_lp_norm(&b, 1.0, -5.0, 5.0).unwrap() - 4.0).abs() < 1e-14);
        let b0 = make_backward_paraboloid(1, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert!(closed_form_lp_norm(&b0, 1.0, -5.0, 5.0).unwrap().is_infinite());
        assert!(closed_form_lp_norm(&make_exact_solution(1.0, 0.5).unwrap(), 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn rescale_examples() {
        let g = make_exact_solution(1.0, 0.5).unwrap();
        let r = rescale(g.clone(), 1.0, 0.5, 1.0, 4.0).unwrap();
        assert!((r.eval(&[0.0], 4.0) - 2.0).abs() < 1e-14);
        let id = rescale(g.clone(), 1.0, 0.5, 1.0, 1.0).unwrap();
        for &t in &[0.2, 1.0, 5.0] {
            assert!((id.eval(&[0.1], t) - g.eval(&[0.1], t)).abs() < 1e-15);
        }
        assert!(rescale(g, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn sphere_fraction_limits() {
        assert!((sphere_fraction_in_ball(3, 0.0, 0.5, 1.0) - 4.0 * PI).abs() < 1e-14);
        assert_eq!(sphere_fraction_in_ball(3, 3.0, 0.5, 1.0), 0.0);
        // half-way: centre on the sphere of radius R → cap of height...
        let v = sphere_fraction_in_ball(3, 1.0, 1.0, 1.0);
        // c0 = (1 − 1 − 1)/2 = −1/2 → 2π(1 − 1/2)
        assert!((v - PI).abs() < 1e-14);
        assert_eq!(sphere_fraction_in_ball(1, 0.2, 0.5, 1.0), 2.0);
    }

    #[test]
    fn heat_smoothing_of_compact_bump_against_direct_quadrature() {
        let f = make_bump(BumpProfile::Compact { radius: 2.0 }, 0.0, 10.0, 1.0).unwrap();
        let ctx = SmoothCtx::default();
        let tol = Tol::new(1e-15, 1e-12, 4000);
        for &(x, s) in &[(0.0, 0.3), (1.5, 0.05), (2.5, 1.0)] {
            let direct = quad::integrate(
                &|e: f64| heat_kernel(1, (x - e) * (x - e), s) * f.eval(&[e], 5.0),
                -2.0,
                2.0,
                &tol,
            )
            .unwrap()
            .value;
            let h = f.heat_smooth(&[x], 5.0, s, &ctx).unwrap();
            assert!((h - direct).abs() < 1e-11, "x={x}: {h} vs {direct}");
        }
    }

    #[test]
    fn heat_smoothing_of_compact_bump_in_three_dimensions() {
        // brute-force oracle on a product grid for the 3-D spherical-mean path
        let f = make_bump(BumpProfile::Compact { radius: 1.0 }, 0.0, 10.0, 1.0).unwrap();
        let ctx = SmoothCtx::default();
        let (x, s) = ([0.3, 0.2, -0.1], 0.2);
        let h = f.heat_smooth(&x, 5.0, s, &ctx).unwrap();
        let m = 120;
        let dx = 2.0 / m as f64;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let p = [
                        -1.0 + (i as f64 + 0.5) * dx,
                        -1.0 + (j as f64 + 0.5) * dx,
                        -1.0 + (k as f64 + 0.5) * dx,
                    ];
                    let r2 = (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2) + (p[2] - x[2]).powi(2);
                    acc += heat_kernel(3, r2, s) * f.eval(&p, 5.0);
                }
            }
        }
        acc *= dx * dx * dx;
        assert!((h - acc).abs() < 2e-4, "{h} vs {acc}");
    }

    #[test]
    fn function_field_heat_smoothing_matches_closed_form() {
        let f = make_function(
            |x: &[f64], t: f64| if t > 0.0 { (-x[0] * x[0]).exp() } else { 0.0 },
            false,
            vec![],
        )
        .unwrap();
        let g = make_bump(BumpProfile::Gaussian, 0.0, 10.0, 1.0).unwrap();
        let ctx = SmoothCtx::default();
        let a = f.heat_smooth(&[0.4], 5.0, 0.3, &ctx).unwrap();
        let b = g.heat_smooth(&[0.4], 5.0, 0.3, &ctx).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn piecewise_constant_heat_smoothing() {
        let c = Cell {
            lo: vec![-1.0],
            hi: vec![0.5],
            t_lo: 0.0,
            t_hi: 1.0,
            value: 2.0,
        };
        let f = make_piecewise_constant(1, vec![c]).unwrap();
        let ctx = SmoothCtx::default();
        let h = f.heat_smooth(&[0.0], 0.5, 0.25, &ctx).unwrap();
        let want = 2.0 * 0.5 * (libm::erf(1.0) - libm::erf(-0.5));
        assert!((h - want).abs() < 1e-15);
        assert_eq!(f.heat_smooth(&[0.0], 1.5, 0.25, &ctx).unwrap(), 0.0);
    }

    #[test]
    fn indicator_similarity_n_is_below_m() {
        let f = make_indicator_similarity(1, 1.0, 0.5).unwrap();
        let n = indicator_similarity_n(&f).unwrap();
        assert!(n > 0.0 && n < 0.5);
        // f ≥ (N t^α)^{λ/(1−λ)} inside the paraboloid, with equality
        for &t in &[0.3, 1.0, 2.0] {
            assert!((f.eval(&[0.0], t) - n * t).abs() < 1e-13);
        }
    }
}
