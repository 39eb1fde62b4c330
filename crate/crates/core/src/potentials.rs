//! Space-time potentials: `J_α f = Φ_α ∗ f`, its slab-restricted version
//! `V_{α,Ω}`, the scaled family `J_{α,a,b}` and its Riemann–Liouville
//! (`a = 0`) and Riesz (`b = 0`) limits.
//!
//! The spatial integral at each time is done by the field's own heat
//! smoothing (closed form for the radial indicators and Gaussian bumps), so
//! only the time integral with its `(t−τ)^{α−1}` weight is quadratured.

use alloc::vec::Vec;
use core::cell::Cell;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fields::{Field, SmoothCtx};
use crate::quad::{self, Estimate, SingularityMode, Tol};
use crate::special::{gamma, riesz_constant};

/// Controls for every quadrature behind a potential evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    pub singularity_mode: SingularityMode,
    /// Gaussian windows are truncated at this many standard deviations.
    pub spatial_tail_sigmas: f64,
    /// Lower limit of every time integral; fields must vanish before it.
    pub time_origin: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_panels: 4096,
            singularity_mode: SingularityMode::Substitution,
            spatial_tail_sigmas: 8.0,
            time_origin: 0.0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel: f64) -> Self {
        self.rel_tol = rel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_panels < 16 {
            return Err(Error::domain("max_panels must be at least 16"));
        }
        if !(self.spatial_tail_sigmas >= 4.0) {
            return Err(Error::domain("spatial_tail_sigmas must be at least 4"));
        }
        if !self.time_origin.is_finite() {
            return Err(Error::domain("time_origin must be finite"));
        }
        Ok(())
    }

    pub fn tol(&self) -> Tol {
        Tol::new(self.abs_tol, self.rel_tol, self.max_panels)
    }

    /// Inner tolerances for spatial reductions, two orders tighter than the
    /// outer time integral so their error does not dominate it.
    pub fn smooth_ctx(&self) -> SmoothCtx {
        SmoothCtx {
            tol: Tol::new(self.abs_tol * 1e-2, (self.rel_tol * 1e-2).max(1e-13), self.max_panels),
            tail_sigmas: self.spatial_tail_sigmas,
        }
    }
}

/// `Ω = Rⁿ × (a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabRegion {
    pub a: f64,
    pub b: f64,
}

impl SlabRegion {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a < b {
            Ok(SlabRegion { a, b })
        } else {
            Err(Error::domain("slab needs a < b"))
        }
    }
}

fn check_point(n: usize, x: &[f64], alpha: f64, quad: &QuadratureSpec) -> Result<()> {
    if n == 0 || x.len() != n {
        return Err(Error::domain("x must have n >= 1 coordinates"));
    }
    if !(alpha > 0.0) {
        return Err(Error::domain("alpha must be positive"));
    }
    quad.validate()
}

/// `coef ∫_lo^t (t−τ)^{α−1} H[f(·,τ)](x, σ(t−τ)) dτ`.
fn time_convolution(
    field: &Field,
    x: &[f64],
    t: f64,
    lo: f64,
    alpha: f64,
    coef: f64,
    sigma: &dyn Fn(f64) -> f64,
    extra_breaks: &[f64],
    quad: &QuadratureSpec,
) -> Result<Estimate> {
    if !(t > lo) {
        return Ok(Estimate::ZERO);
    }
    let ctx = quad.smooth_ctx();
    let failed = Cell::new(None);
    let g = |tau: f64| {
        if tau <= 0.0 {
            return 0.0;
        }
        match field.heat_smooth(x, tau, sigma(t - tau), &ctx) {
            Ok(v) => v,
            Err(e) => {
                failed.set(Some(e));
                0.0
            }
        }
    };
    let mut breaks = field.time_breaks(x, lo, t);
    breaks.extend_from_slice(extra_breaks);
    let est = quad::power_weighted(&g, lo, t, 0.0, alpha - 1.0, &breaks, &quad.tol(), quad.singularity_mode)?;
    if let Some(e) = failed.into_inner() {
        return Err(e);
    }
    Ok(est.scale(coef))
}

/// `J_α f(x, t) = ∫_{origin}^t ∫ Φ_α(x−ξ, t−τ) f(ξ, τ) dξ dτ`.
pub fn j_alpha(field: &Field, n: usize, alpha: f64, x: &[f64], t: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    j_alpha_smoothed(field, n, alpha, x, t, 0.0, quad)
}

/// Heat smoothing of the potential: `∫ Φ₁(x−z, σ) J_α f(z, t) dz`.
///
/// By the semigroup property of the heat kernel this is `J_α f` with the
/// spatial smoothing parameter `t−τ` shifted to `t−τ+σ`.
pub fn j_alpha_smoothed(
    field: &Field,
    n: usize,
    alpha: f64,
    x: &[f64],
    t: f64,
    sigma: f64,
    quad: &QuadratureSpec,
) -> Result<Estimate> {
    check_point(n, x, alpha, quad)?;
    if !(sigma >= 0.0) {
        return Err(Error::domain("smoothing parameter must be nonnegative"));
    }
    time_convolution(
        field,
        x,
        t,
        quad.time_origin,
        alpha,
        1.0 / gamma(alpha),
        &|s| s + sigma,
        &[],
        quad,
    )
}

/// `V_{α,Ω} f(x, t)`: the convolution restricted to `Ω = Rⁿ × (a, b)`.
pub fn v_alpha(
    field: &Field,
    n: usize,
    alpha: f64,
    slab: SlabRegion,
    x: &[f64],
    t: f64,
    quad: &QuadratureSpec,
) -> Result<Estimate> {
    check_point(n, x, alpha, quad)?;
    if !(t > slab.a && t < slab.b) {
        return Err(Error::domain("t must lie inside the slab"));
    }
    time_convolution(field, x, t, slab.a, alpha, 1.0 / gamma(alpha), &|s| s, &[], quad)
}

/// `J_{α,a,b} f = Φ_{α,a,b} ∗ f`, with `Φ_{α,a,b}(x,t) = a^{−n} b^{−1} Φ_α(x/a, t/b)`.
/// `a = 0` gives the Riemann–Liouville integral, `b = 0` the Riesz potential.
#[allow(clippy::too_many_arguments)]
pub fn j_scaled(
    field: &Field,
    n: usize,
    alpha: f64,
    a: f64,
    b: f64,
    x: &[f64],
    t: f64,
    quad: &QuadratureSpec,
) -> Result<Estimate> {
    check_point(n, x, alpha, quad)?;
    if !(a >= 0.0 && b >= 0.0) || (a == 0.0 && b == 0.0) {
        return Err(Error::domain("scales need a, b >= 0, not both zero"));
    }
    if a == 0.0 {
        return riemann_liouville(field, alpha, x, t, quad).map(|e| e.scale(libm::pow(b, -alpha)));
    }
    if b == 0.0 {
        return riesz(field, n, alpha, x, t, quad).map(|e| e.scale(libm::pow(a, -2.0 * alpha)));
    }
    // Φ_{α,a,b}(ξ, s) = b^{−α} s^{α−1}/Γ(α) · Φ₁(ξ, a² s / b)
    let coef = libm::pow(b, -alpha) / gamma(alpha);
    let scale = a * a / b;
    // the kernel varies on the time scale b near τ = t
    let mut breaks = Vec::new();
    if b < 1.0 {
        let mut s = b / 16.0;
        while s < t - quad.time_origin {
            breaks.push(t - s);
            s *= 4.0;
        }
    }
    time_convolution(
        field,
        x,
        t,
        quad.time_origin,
        alpha,
        coef,
        &|s| scale * s,
        &breaks,
        quad,
    )
}

/// `∫_{origin}^t (t−τ)^{α−1}/Γ(α) f(x, τ) dτ`.
pub fn riemann_liouville(field: &Field, alpha: f64, x: &[f64], t: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    check_point(x.len(), x, alpha, quad)?;
    time_convolution(
        field,
        x,
        t,
        quad.time_origin,
        alpha,
        1.0 / gamma(alpha),
        &|_| 0.0,
        &[],
        quad,
    )
}

/// `γ(n,α)^{−1} ∫ f(y, t) |x−y|^{2α−n} dy` for `0 < 2α < n`.
///
/// In polar coordinates about `x` this is `γ^{−1} ∫_0^∞ r^{2α−1} S(r) dr`
/// with `S(r)` the integral of `f(x + rω, t)` over the unit sphere; the
/// `r^{2α−1}` weight is removed by a power substitution.
pub fn riesz(field: &Field, n: usize, alpha: f64, x: &[f64], t: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    check_point(n, x, alpha, quad)?;
    let gam = riesz_constant(n, alpha)?;
    if t <= 0.0 {
        return Ok(Estimate::ZERO);
    }
    let ctx = quad.smooth_ctx();
    let d = crate::kernels::norm2(x).sqrt();
    let failed = Cell::new(None);
    let s = |r: f64| match field.sphere_integral(x, t, r, &ctx) {
        Ok(v) => v,
        Err(e) => {
            failed.set(Some(e));
            0.0
        }
    };
    let mut breaks = Vec::new();
    collect_radii(field, t, d, &mut breaks);
    let tol = quad.tol();
    let est = if let Some(rad) = field.support_radius(t) {
        quad::power_weighted(
            &s,
            0.0,
            d + rad,
            2.0 * alpha - 1.0,
            0.0,
            &breaks,
            &tol,
            quad.singularity_mode,
        )?
    } else if field.decays_in_space() {
        let r0 = d + 8.0;
        let near = quad::power_weighted(
            &s,
            0.0,
            r0,
            2.0 * alpha - 1.0,
            0.0,
            &breaks,
            &tol,
            quad.singularity_mode,
        )?;
        let far = quad::integrate_to_infinity(&|r: f64| libm::pow(r, 2.0 * alpha - 1.0) * s(r), r0, &tol)?;
        near + far
    } else {
        return Err(Error::Unsupported(
            "the Riesz potential needs a field with bounded or decaying spatial support".into(),
        ));
    };
    if let Some(e) = failed.into_inner() {
        return Err(e);
    }
    Ok(est.scale(1.0 / gam))
}

/// Radii where the sphere integral about a point at distance `d` changes form.
fn collect_radii(field: &Field, t: f64, d: f64, out: &mut Vec<f64>) {
    if let Field::Sum(children) = field {
        for c in children {
            collect_radii(c, t, d, out);
        }
        return;
    }
    if let Some(r) = field.support_radius(t) {
        out.push((d - r).abs());
        out.push(d + r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_bump, make_cylinder, make_exact_solution, make_paraboloid_power, make_slab, BumpProfile};
    use core::f64::consts::PI;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn constant_one() {
        let one = make_slab(0.0, f64::INFINITY, 1.0).unwrap();
        for &(a, t) in &[(1.0, 1.0), (0.5, 1.0), (0.3, 2.0)] {
            let v = j_alpha(&one, 1, a, &[0.2], t, &q()).unwrap().value;
            let want = libm::pow(t, a) / gamma(a + 1.0);
            assert!((v - want).abs() < 1e-9 * want, "{v} {want}");
        }
        let rl = riemann_liouville(&one, 0.5, &[0.0], 1.0, &q()).unwrap().value;
        assert!((rl - 2.0 / PI.sqrt()).abs() < 1e-9);
        let rl = riemann_liouville(&one, 1.0, &[0.0], 2.0, &q()).unwrap().value;
        assert!((rl - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exact_solution_potential() {
        let g = make_exact_solution(1.0, 0.5).unwrap();
        let v = j_alpha(&g, 1, 1.0, &[0.0], 1.0, &q()).unwrap().value;
        assert!((v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn riesz_of_unit_ball() {
        let ball = make_cylinder(1.0, 0.0, 2.0, 1.0).unwrap();
        let v = riesz(&ball, 3, 1.0, &[0.0, 0.0, 0.0], 1.0, &q()).unwrap().value;
        assert!((v - 0.5).abs() < 1e-9, "{v}");
        let v = riesz(&ball, 3, 1.0, &[2.0, 0.0, 0.0], 1.0, &q()).unwrap().value;
        assert!((v - 1.0 / 6.0).abs() < 1e-9, "{v}");
        // interior point: (3 − |x|²)/6
        let v = riesz(&ball, 3, 1.0, &[0.0, 0.5, 0.0], 1.0, &q()).unwrap().value;
        assert!((v - (3.0 - 0.25) / 6.0).abs() < 1e-9, "{v}");
        assert_eq!(riesz(&Field::Zero, 3, 1.0, &[0.0; 3], 1.0, &q()).unwrap().value, 0.0);
        assert!(riesz(&ball, 1, 0.5, &[0.0], 1.0, &q()).is_err());
    }

    #[test]
    fn scaled_identity_and_errors() {
        let f = make_paraboloid_power(1, 1.0, 0.5).unwrap();
        let a = j_scaled(&f, 1, 0.5, 1.0, 1.0, &[0.1], 0.7, &q()).unwrap().value;
        let b = j_alpha(&f, 1, 0.5, &[0.1], 0.7, &q()).unwrap().value;
        assert!((a - b).abs() < 1e-14);
        assert!(j_scaled(&f, 1, 0.5, 0.0, 0.0, &[0.1], 0.7, &q()).is_err());
    }

    #[test]
    fn scaled_kernel_matches_direct_double_integral() {
        // J_{α,a,b} of a Gaussian bump at n = 1 against a brute-force (ξ, τ) quadrature
        let f = make_bump(BumpProfile::Gaussian, 0.0, 4.0, 1.0).unwrap();
        let (alpha, a, b, x, t) = (0.75, 0.6, 1.7, 0.3, 2.5);
        let v = j_scaled(&f, 1, alpha, a, b, &[x], t, &q()).unwrap().value;
        let p = crate::kernels::KernelParams::new(1, alpha, a, b).unwrap();
        let tol = Tol::new(1e-13, 1e-10, 20000);
        let inner = |tau: f64| {
            let h = |xi: f64| crate::kernels::phi_scaled(&p, &[x - xi], t - tau).unwrap() * f.eval(&[xi], tau);
            quad::integrate_with_breaks(&h, -9.0, 9.0, &[x - 0.01, x, x + 0.01], &tol)
                .unwrap()
                .value
        };
        let w = quad::power_weighted(
            &|tau: f64| inner(tau) / libm::pow(t - tau, alpha - 1.0),
            0.0,
            t,
            0.0,
            alpha - 1.0,
            &[1.0, 2.5],
            &Tol::new(1e-12, 1e-8, 4000),
            SingularityMode::Substitution,
        )
        .unwrap()
        .value;
        assert!((v - w).abs() < 1e-7 * w, "{v} vs {w}");
    }

    #[test]
    fn slab_potential() {
        let one = make_slab(0.0, 5.0, 1.0).unwrap();
        let slab = SlabRegion::new(0.0, 3.0).unwrap();
        let v = v_alpha(&one, 1, 1.0, slab, &[0.0], 1.0, &q()).unwrap().value;
        assert!((v - 1.0).abs() < 1e-12);
        let g = make_exact_solution(0.5, 0.5).unwrap();
        let a = v_alpha(&g, 1, 0.5, slab, &[0.0], 2.0, &q()).unwrap().value;
        let b = j_alpha(&g, 1, 0.5, &[0.0], 2.0, &q()).unwrap().value;
        assert!((a - b).abs() < 1e-12);
        assert!(v_alpha(&g, 1, 0.5, slab, &[0.0], 3.5, &q()).is_err());
    }

    #[test]
    fn gauss_jacobi_mode_agrees() {
        let g = make_exact_solution(0.5, 0.25).unwrap();
        let mut s = q();
        s.singularity_mode = SingularityMode::GaussJacobi;
        let a = j_alpha(&g, 1, 0.5, &[0.0], 1.3, &s).unwrap().value;
        let b = j_alpha(&g, 1, 0.5, &[0.0], 1.3, &q()).unwrap().value;
        assert!((a - b).abs() < 1e-8 * b);
    }
}
