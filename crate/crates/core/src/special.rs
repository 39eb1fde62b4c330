//! Gamma, error and incomplete-gamma functions, Gaussian ball masses and the
//! closed-form constants used throughout the crate.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{self, Tol};

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 607/128). Returns NaN for `x ≤ 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        // Γ(x)Γ(1−x) = π / sin(πx)
        return libm::log(PI / libm::sin(PI * x)) - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut s = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * libm::log(2.0 * PI) + (z + 0.5) * libm::log(t) - t + libm::log(s)
}

/// Checked `ln Γ(x)`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(ln_gamma(x))
    } else {
        Err(Error::domain("log_gamma requires x > 0"))
    }
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    if x.fract() == 0.0 && x > 0.0 && x <= 21.0 {
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return p;
    }
    libm::exp(ln_gamma(x))
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Regularized lower incomplete gamma `P(m/2, x)` for a positive
/// half-integer or integer order `m/2`, built by upward recurrence from
/// `P(1/2, x) = erf(√x)` or `P(1, x) = 1 − e^{−x}`.
pub fn reg_lower_gamma_half(m: u32, x: f64) -> f64 {
    if x <= 0.0 || m == 0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if x > 800.0 {
        return 1.0;
    }
    let target = 0.5 * m as f64;
    if x < target {
        // the recurrence cancels badly here; sum x^a e^{−x} Σ x^k / Γ(a+k+1)
        let mut term = libm::exp(target * libm::log(x) - x - ln_gamma(target + 1.0));
        let mut s = 0.0;
        let mut k = 1.0;
        while term > 1e-17 * s || k < 3.0 {
            s += term;
            term *= x / (target + k);
            k += 1.0;
        }
        return s.clamp(0.0, 1.0);
    }
    // P(a+1, x) = P(a, x) − x^a e^{−x} / Γ(a+1)
    let (mut a, mut p, mut term) = if m % 2 == 1 {
        (0.5, erf(x.sqrt()), libm::exp(0.5 * libm::log(x) - x) / gamma(1.5))
    } else {
        (1.0, -libm::expm1(-x), x * libm::exp(-x))
    };
    while a < target {
        p -= term;
        a += 1.0;
        term *= x / a;
    }
    p.clamp(0.0, 1.0)
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = 0.5 * n as f64;
    libm::exp(h * libm::log(PI) - ln_gamma(h + 1.0))
}

/// Surface area `|S^{n−1}|` of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

pub fn binomial(l: u32, k: u32) -> f64 {
    if k > l {
        return 0.0;
    }
    let k = k.min(l - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (l - i) as f64 / (i + 1) as f64;
    }
    c
}

/// `G(n, c, R) = π^{−n/2} ∫_{|z − c e₁| < R} e^{−|z|²} dz`.
///
/// For `n ≥ 2` the ball is sliced perpendicular to `e₁`: each slice is an
/// `(n−1)`-ball whose Gaussian mass is an incomplete gamma value, leaving a
/// smooth one-dimensional integral in the angle `z₁ = c + R sin θ`.
pub fn offset_gaussian_mass(n: usize, c: f64, r: f64) -> f64 {
    let c = c.abs();
    if !(r > 0.0) {
        return 0.0;
    }
    if n == 1 {
        return (0.5 * (erf(r + c) + erf(r - c))).clamp(0.0, 1.0);
    }
    if c == 0.0 {
        return reg_lower_gamma_half(n as u32, r * r);
    }
    // beyond |z₁| = 9 the slab carries less than e^{−81}
    const Z: f64 = 9.0;
    let lo = (-Z - c).max(-r);
    let hi = (Z - c).min(r);
    if lo >= hi {
        return 0.0;
    }
    let th_lo = libm::asin((lo / r).clamp(-1.0, 1.0));
    let th_hi = libm::asin((hi / r).clamp(-1.0, 1.0));
    let m = (n - 1) as u32;
    let f = |th: f64| {
        let (s, co) = (libm::sin(th), libm::cos(th));
        let z1 = c + r * s;
        let rho2 = (r * co) * (r * co);
        libm::exp(-z1 * z1) * reg_lower_gamma_half(m, rho2) * r * co
    };
    // the integrand peaks near z₁ = 0; offer that angle as a break point
    let mut breaks = [f64::NAN; 1];
    if c < r {
        breaks[0] = libm::asin(-c / r);
    }
    let tol = Tol::new(1e-15, 1e-13, 2000);
    let v = quad::integrate_outcome(&f, th_lo, th_hi, &breaks, &tol).estimate.value;
    (v / PI.sqrt()).clamp(0.0, 1.0)
}

/// `∫_{|ξ|<R} Φ₁(x − ξ, s) dξ` for `|x| = dist`: the heat-kernel mass of a ball.
pub fn heat_ball_mass(n: usize, dist: f64, s: f64, r: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain("heat_ball_mass requires s > 0"));
    }
    if !(r > 0.0) {
        return Err(Error::domain("heat_ball_mass requires R > 0"));
    }
    Ok(heat_ball_mass_unchecked(n, dist, s, r))
}

pub(crate) fn heat_ball_mass_unchecked(n: usize, dist: f64, s: f64, r: f64) -> f64 {
    if r == f64::INFINITY {
        return 1.0;
    }
    let w = (4.0 * s).sqrt();
    offset_gaussian_mass(n, dist / w, r / w)
}

fn check_lambda_b(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("lambda must lie in (0, 1)"))
    }
}

/// `M(α, λ) = Γ(αλ/(1−λ) + 1) / Γ(α + αλ/(1−λ) + 1)`.
pub fn sharp_constant(alpha: f64, lambda: f64) -> Result<f64> {
    check_lambda_b(lambda)?;
    if !(alpha > 0.0) {
        return Err(Error::domain("alpha must be positive"));
    }
    let e = alpha * lambda / (1.0 - lambda);
    Ok(libm::exp(ln_gamma(e + 1.0) - ln_gamma(alpha + e + 1.0)))
}

/// `M̄ = Γ(α + 1) M(α, λ)`.
pub fn mbar_constant(alpha: f64, lambda: f64) -> Result<f64> {
    Ok(gamma(alpha + 1.0) * sharp_constant(alpha, lambda)?)
}

/// `γ(n, α) = 4^α π^{n/2} Γ(α) / Γ(n/2 − α)`, the Riesz potential normalizer.
pub fn riesz_constant(n: usize, alpha: f64) -> Result<f64> {
    let h = 0.5 * n as f64;
    if !(alpha > 0.0 && alpha < h) {
        return Err(Error::domain("riesz_constant requires 0 < 2 alpha < n"));
    }
    Ok(libm::exp(
        alpha * libm::log(4.0) + h * libm::log(PI) + ln_gamma(alpha) - ln_gamma(h - alpha),
    ))
}

/// Lower bound for the heat mass of the paraboloid slice `|ξ|² < τ` seen from
/// `|x|² < t`, `t/4 < τ < 3t/4`: `G(n, 1, 1/(2√3))`.
pub fn paraboloid_heat_floor(n: usize) -> f64 {
    offset_gaussian_mass(n, 1.0, 0.5 / 3f64.sqrt())
}

/// Lower bound for the heat mass of the backward-paraboloid slice
/// `|ξ| < √(T−τ)` seen from `|x| ≤ √(T−t)`: `G(n, 1/2, 1/2)`.
pub fn backward_heat_floor(n: usize) -> f64 {
    offset_gaussian_mass(n, 0.5, 0.5)
}

/// `∫_lo^hi (1−s)^{a−1} s^{b} ds`, an incomplete Beta-type integral.
pub fn beta_window(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    let tol = Tol::new(1e-15, 1e-13, 2000);
    let f = |s: f64| libm::pow(1.0 - s, a - 1.0) * libm::pow(s, b);
    quad::integrate_outcome(&f, lo, hi, &[], &tol).estimate.value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_anchor_values() {
        assert_eq!(ln_gamma(1.0), 0.0);
        assert_eq!(ln_gamma(2.0), 0.0);
        assert!((ln_gamma(0.5) - 0.5 * PI.ln()).abs() < 1e-15);
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
    }

    #[test]
    fn ln_gamma_matches_factorials_and_recurrence() {
        let mut f = 1.0f64;
        for k in 1..60u32 {
            f *= k as f64;
            let v = ln_gamma(k as f64 + 1.0);
            assert!((v - f.ln()).abs() <= 1e-13 * f.ln().max(1.0), "k={k}");
        }
        for &x in &[0.1, 0.25, 0.3, 0.7, 1.3, 2.5, 7.25] {
            // Γ(x+1) = xΓ(x)
            let rec = ln_gamma(x + 1.0) - ln_gamma(x) - x.ln();
            assert!(rec.abs() < 2e-14, "x={x} {rec}");
        }
    }

    #[test]
    fn ln_gamma_agrees_with_libm() {
        for i in 1..400 {
            let x = 0.05 * i as f64;
            let a = ln_gamma(x);
            let b = libm::lgamma(x);
            let scale = b.abs().max(1e-2);
            assert!((a - b).abs() <= 1e-13 * scale.max(1.0) + 5e-16, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn incomplete_gamma_against_series() {
        // P(a,x) = x^a e^{-x} Σ x^k / Γ(a+k+1)
        for m in 1..8u32 {
            let a = 0.5 * m as f64;
            for &x in &[0.01f64, 0.3, 1.0, 2.5, 7.0, 15.0] {
                let mut s = 0.0f64;
                let mut term = libm::exp(a * x.ln() - x - ln_gamma(a + 1.0));
                let mut k = 0.0;
                while term > 1e-20 * s.max(1e-300) || k < 5.0 {
                    s += term;
                    k += 1.0;
                    term *= x / (a + k);
                }
                let p = reg_lower_gamma_half(m, x);
                assert!((p - s).abs() < 1e-13, "m={m} x={x}: {p} vs {s}");
            }
        }
    }

    #[test]
    fn sharp_constant_examples() {
        assert!((sharp_constant(1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((sharp_constant(2.0, 0.5).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        let m = sharp_constant(0.5, 1.0 / 3.0).unwrap();
        assert!((m - libm::tgamma(1.25) / libm::tgamma(1.75)).abs() < 1e-14);
        assert!((m - 0.98623).abs() < 1e-5);
        assert!(sharp_constant(1.0, 1.0).is_err());
        assert!(sharp_constant(1.0, 0.0).is_err());
    }

    #[test]
    fn mbar_examples() {
        assert!((mbar_constant(1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((mbar_constant(2.0, 0.5).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        // Γ(3/2)Γ(5/4)/Γ(7/4) ≈ 0.874019
        let oracle = libm::tgamma(1.5) * libm::tgamma(1.25) / libm::tgamma(1.75);
        assert!((mbar_constant(0.5, 1.0 / 3.0).unwrap() - oracle).abs() < 1e-14);
        assert!((oracle - 0.874_019).abs() < 1e-6);
    }

    #[test]
    fn riesz_constant_examples() {
        assert!((riesz_constant(3, 1.0).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!((riesz_constant(2, 0.5).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!((riesz_constant(1, 0.25).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-13);
        assert!(riesz_constant(2, 1.0).is_err());
    }

    #[test]
    fn gaussian_ball_mass_one_dimension() {
        assert!((offset_gaussian_mass(1, 0.0, 1.0) - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((offset_gaussian_mass(1, 0.0, 40.0) - 1.0).abs() < 1e-15);
        assert!((heat_ball_mass(1, 0.0, 0.25, 1.0).unwrap() - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!(heat_ball_mass(1, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn gaussian_ball_mass_against_grid_in_two_dimensions() {
        // brute-force oracle: 2-D midpoint sum in polar coordinates about the ball centre
        let (c, r) = (0.7, 1.1);
        let (nr, nt) = (800, 800);
        let mut s = 0.0;
        for i in 0..nr {
            let rho = (i as f64 + 0.5) * r / nr as f64;
            for j in 0..nt {
                let th = (j as f64 + 0.5) * 2.0 * PI / nt as f64;
                let (x, y) = (c + rho * th.cos(), rho * th.sin());
                s += (-(x * x + y * y)).exp() * rho;
            }
        }
        s *= (r / nr as f64) * (2.0 * PI / nt as f64) / PI;
        let g = offset_gaussian_mass(2, c, r);
        assert!((g - s).abs() < 1e-5, "{g} vs {s}");
    }

    #[test]
    fn centred_mass_matches_incomplete_gamma() {
        for n in 2..6 {
            let a = offset_gaussian_mass(n, 1e-9, 1.3);
            let b = reg_lower_gamma_half(n as u32, 1.69);
            assert!((a - b).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn backward_floor_equals_unscaled_lemma_integral() {
        // (4π)^{-1/2} ∫_{|z−1|<1} e^{−z²/4} dz on the line, before z = 2w
        let tol = Tol::new(1e-15, 1e-13, 1000);
        let direct = quad::integrate(&|z: f64| (-z * z / 4.0).exp(), 0.0, 2.0, &tol)
            .unwrap()
            .value
            / (4.0 * PI).sqrt();
        assert!((direct - backward_heat_floor(1)).abs() < 1e-14);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(4, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    }
}
