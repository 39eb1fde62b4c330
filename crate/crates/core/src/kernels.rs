//! The kernel family `Φ_{α,a,b}(x,t) = a^{−n} b^{−1} Φ_α(x/a, t/b)` with
//! `Φ_α(x,t) = t^{α−1}/Γ(α) (4πt)^{−n/2} e^{−|x|²/4t}` for `t > 0`.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, Estimate, SingularityMode, Tol};
use crate::special::ln_gamma;

/// Identifies one member `Φ_{α,a,b}` of the scaled kernel family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub n: usize,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
}

impl KernelParams {
    pub fn new(n: usize, alpha: f64, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension n must be at least 1"));
        }
        if !(alpha > 0.0) {
            return Err(Error::domain("alpha must be positive"));
        }
        if !(a >= 0.0 && b >= 0.0) {
            return Err(Error::domain("scales a, b must be nonnegative"));
        }
        if a == 0.0 && b == 0.0 {
            return Err(Error::domain("a and b cannot both vanish"));
        }
        Ok(KernelParams { n, alpha, a, b })
    }

    /// The unscaled kernel `Φ_α`.
    pub fn unscaled(n: usize, alpha: f64) -> Result<Self> {
        Self::new(n, alpha, 1.0, 1.0)
    }
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `ln Φ_α(x, t)` from `|x|²`; `−∞` for `t ≤ 0`.
pub(crate) fn ln_phi(n: usize, alpha: f64, r2: f64, t: f64) -> f64 {
    if !(t > 0.0) {
        return f64::NEG_INFINITY;
    }
    let lt = libm::log(t);
    (alpha - 1.0) * lt - ln_gamma(alpha) - 0.5 * n as f64 * (libm::log(4.0 * PI) + lt) - r2 / (4.0 * t)
}

/// Heat kernel `Φ₁(x, t)` from `|x|²`.
pub fn heat_kernel(n: usize, r2: f64, t: f64) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    libm::exp(-0.5 * n as f64 * libm::log(4.0 * PI * t) - r2 / (4.0 * t))
}

/// `Φ_α(x, t)`; exactly zero for `t ≤ 0`.
pub fn phi(n: usize, alpha: f64, x: &[f64], t: f64) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    libm::exp(ln_phi(n, alpha, norm2(x), t))
}

/// `Φ_{α,a,b}(x, t) = a^{−n} b^{−1} Φ_α(x/a, t/b)` for `a, b > 0`.
pub fn phi_scaled(p: &KernelParams, x: &[f64], t: f64) -> Result<f64> {
    if !(p.a > 0.0 && p.b > 0.0) {
        return Err(Error::domain(
            "phi_scaled needs a > 0 and b > 0; the limits a = 0, b = 0 are operators, not kernels",
        ));
    }
    if !(t > 0.0) {
        return Ok(0.0);
    }
    let r2 = norm2(x) / (p.a * p.a);
    let l = ln_phi(p.n, p.alpha, r2, t / p.b) - p.n as f64 * libm::log(p.a) - libm::log(p.b);
    Ok(libm::exp(l))
}

/// `(|y|² − i s)^{−α}` on the principal branch.
pub fn symbol(alpha: f64, y: &[f64], s: f64) -> Result<Complex64> {
    let y2 = norm2(y);
    if y2 == 0.0 && s == 0.0 {
        return Err(Error::domain("the symbol is singular at (y, s) = (0, 0)"));
    }
    // Re(base) ≥ 0, so arg ∈ [−π/2, π/2] and no branch cut is crossed
    let base = Complex64::new(y2, -s);
    let (r, th) = base.to_polar();
    Ok(Complex64::from_polar(libm::pow(r, -alpha), -alpha * th))
}

/// Spatial Fourier transform of `Φ_α(·, t)`: `t^{α−1}/Γ(α) e^{−t|y|²}`.
pub fn spatial_fourier_phi(alpha: f64, y: &[f64], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("spatial_fourier_phi requires t > 0"));
    }
    Ok(libm::exp((alpha - 1.0) * libm::log(t) - ln_gamma(alpha) - t * norm2(y)))
}

/// `∫_{R^n} Φ_α(ξ, τ) dξ = τ^{α−1}/Γ(α)`.
pub fn time_marginal(alpha: f64, tau: f64) -> f64 {
    if !(tau > 0.0) {
        return 0.0;
    }
    libm::exp((alpha - 1.0) * libm::log(tau) - ln_gamma(alpha))
}

/// `‖Φ_α χ_{R^n×(0,dt)}‖_{L^r}` in closed form.
pub fn phi_lr_norm(n: usize, alpha: f64, r: f64, dt: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::domain("phi_lr_norm requires r >= 1"));
    }
    if !(dt > 0.0) {
        return Err(Error::domain("phi_lr_norm requires dt > 0"));
    }
    let h = 0.5 * n as f64;
    let e = r * (alpha - 1.0 - h) + h + 1.0;
    if !(e > 0.0) {
        return Err(Error::domain("Φ_α is not in L^r on the slab for these exponents"));
    }
    let ln = -r * ln_gamma(alpha) + h * (1.0 - r) * libm::log(4.0 * PI) - h * libm::log(r) + e * libm::log(dt)
        - libm::log(e);
    Ok(libm::exp(ln / r))
}

/// `(Φ_α ∗ Φ_β)(x, t)` by quadrature: the spatial convolution of the two heat
/// factors is integrated numerically coordinate by coordinate, the time
/// integral carries the power weights `(t−τ)^{α−1} τ^{β−1}`.
pub fn convolve(n: usize, alpha: f64, beta: f64, x: &[f64], t: f64, tol: &Tol) -> Result<Estimate> {
    if !(t > 0.0) {
        return Ok(Estimate::ZERO);
    }
    debug_assert_eq!(x.len(), n);
    let inner_tol = Tol::new(1e-300, tol.rel * 1e-3, tol.max_panels);
    let failed = core::cell::Cell::new(false);
    let spatial = |tau: f64| -> f64 {
        let (s1, s2) = (t - tau, tau);
        let mut prod = 1.0;
        for &xi in x {
            // the product of the two Gaussians is a Gaussian centred at c with std w
            let c = xi * s2 / (s1 + s2);
            let w = (2.0 * s1 * s2 / (s1 + s2)).sqrt();
            let g = |e: f64| heat_kernel(1, (xi - e) * (xi - e), s1) * heat_kernel(1, e * e, s2);
            match quad::integrate(&g, c - 12.0 * w, c + 12.0 * w, &inner_tol) {
                Ok(v) => prod *= v.value,
                Err(_) => {
                    failed.set(true);
                    return f64::NAN;
                }
            }
        }
        prod
    };
    let est = quad::power_weighted(
        &spatial,
        0.0,
        t,
        beta - 1.0,
        alpha - 1.0,
        &[],
        tol,
        SingularityMode::Substitution,
    )?;
    if failed.get() {
        return Err(Error::NonConvergence("inner spatial convolution".into()));
    }
    Ok(est.scale(libm::exp(-ln_gamma(alpha) - ln_gamma(beta))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_examples() {
        assert!((phi(1, 1.0, &[0.0], 1.0) - 0.282_094_791_773_878_1).abs() < 1e-15);
        assert_eq!(phi(1, 1.0, &[0.0], -1.0), 0.0);
        assert_eq!(phi(3, 0.3, &[0.1, 0.2, 0.3], 0.0), 0.0);
        assert!((phi(1, 1.0, &[2.0], 1.0) - 0.103_776_874_355_148_1).abs() < 1e-15);
    }

    #[test]
    fn scaled_examples() {
        let p = KernelParams::unscaled(2, 0.7).unwrap();
        for &(x, t) in &[([0.3, -0.2], 0.5), ([1.0, 1.0], 2.0)] {
            assert!((phi_scaled(&p, &x, t).unwrap() - phi(2, 0.7, &x, t)).abs() < 1e-15);
        }
        let p = KernelParams::new(1, 1.0, 2.0, 1.0).unwrap();
        assert!((phi_scaled(&p, &[0.0], 1.0).unwrap() - 0.141_047_395_886_939).abs() < 1e-14);
        let p = KernelParams::new(1, 1.0, 0.0, 1.0).unwrap();
        assert!(phi_scaled(&p, &[0.0], 1.0).is_err());
        assert!(KernelParams::new(1, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn scaled_mass_identity() {
        let tol = Tol::new(1e-14, 1e-12, 2000);
        for &(a, tau) in &[(0.5f64, 0.3f64), (1.0, 1.0), (2.0, 2.5)] {
            let p = KernelParams::new(1, 0.6, a, 1.0).unwrap();
            let w = 12.0 * a * (2.0 * tau).sqrt();
            let m = quad::integrate(&|x: f64| phi_scaled(&p, &[x], tau).unwrap(), -w, w, &tol).unwrap();
            assert!((m.value - time_marginal(0.6, tau)).abs() < 1e-11);
        }
    }

    #[test]
    fn symbol_examples() {
        let z = symbol(2.0, &[1.0], 0.0).unwrap();
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let z = symbol(1.0, &[0.0], -1.0).unwrap();
        assert!((z - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        let z = symbol(0.5, &[1.0], 1.0).unwrap();
        // oracle: 1/sqrt(1 − i) by direct complex arithmetic
        let direct = Complex64::new(1.0, -1.0).sqrt().inv();
        assert!((z - direct).norm() < 1e-15);
        assert!((z.re - 0.7769).abs() < 1e-4 && (z.im - 0.3218).abs() < 1e-4);
        assert!(symbol(0.5, &[0.0], 0.0).is_err());
    }

    #[test]
    fn fourier_slice_matches_quadrature() {
        assert!((spatial_fourier_phi(1.0, &[0.0], 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((spatial_fourier_phi(1.0, &[1.0], 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let tol = Tol::new(1e-14, 1e-12, 2000);
        for &y in &[0.0, 0.5, 1.0, 2.0] {
            let re = quad::integrate(&|x: f64| phi(1, 1.0, &[x], 1.0) * (x * y).cos(), -30.0, 30.0, &tol).unwrap();
            assert!((re.value - spatial_fourier_phi(1.0, &[y], 1.0).unwrap()).abs() < 1e-6);
        }
        assert!(spatial_fourier_phi(1.0, &[0.0], 0.0).is_err());
    }

    #[test]
    fn lr_norm_examples() {
        for &(n, a) in &[(1usize, 1.0), (2, 0.5), (3, 1.7)] {
            let v = phi_lr_norm(n, a, 1.0, 1.0).unwrap();
            assert!((v - (-ln_gamma(a + 1.0)).exp()).abs() < 1e-14);
        }
        assert!((phi_lr_norm(1, 0.5, 1.0, 1.0).unwrap() - 2.0 / PI.sqrt()).abs() < 1e-14);
        assert!(phi_lr_norm(3, 0.5, 3.0, 1.0).is_err());
    }

    #[test]
    fn lr_norm_against_double_quadrature() {
        // ‖Φ₁‖₂ on R × (0,1): integrate Φ₁² over x for each t, then over t
        let tol = Tol::new(1e-14, 1e-11, 4000);
        let inner = |t: f64| {
            let w = 14.0 * t.sqrt();
            quad::integrate(&|x: f64| phi(1, 1.0, &[x], t).powi(2), -w, w, &tol)
                .unwrap()
                .value
        };
        let outer = quad::power_weighted(
            &|t: f64| inner(t) * t.sqrt(),
            0.0,
            1.0,
            -0.5,
            0.0,
            &[],
            &tol,
            SingularityMode::Substitution,
        )
        .unwrap();
        let v = outer.value.sqrt();
        assert!((v - phi_lr_norm(1, 1.0, 2.0, 1.0).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn riesz_time_marginal() {
        // ∫_0^∞ Φ_{α,1,b}(ξ, τ) dτ = |ξ|^{2α−n}/γ(n, α)
        let tol = Tol::new(1e-14, 1e-11, 4000);
        let (n, alpha) = (3usize, 0.75);
        for &b in &[0.5, 1.0, 3.0] {
            let p = KernelParams::new(n, alpha, 1.0, b).unwrap();
            let xi = [0.4, 0.3, 0.0];
            let v = quad::integrate_to_infinity(&|t: f64| phi_scaled(&p, &xi, t).unwrap(), 0.0, &tol).unwrap();
            let r = 0.5f64;
            let exact = r.powf(2.0 * alpha - 3.0) / crate::special::riesz_constant(n, alpha).unwrap();
            assert!((v.value - exact).abs() / exact < 1e-8, "b={b}");
        }
    }

    #[test]
    fn semigroup_spot_check() {
        let tol = Tol::new(1e-14, 1e-10, 4096);
        let c = convolve(1, 0.5, 0.5, &[0.7], 1.3, &tol).unwrap();
        let d = phi(1, 1.0, &[0.7], 1.3);
        assert!((c.value - d).abs() / d < 1e-8);
    }
}
