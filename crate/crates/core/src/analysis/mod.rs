//! Region classification, sharp bounds, the `γ_j` recursion, Picard
//! iteration, subsolution checks, box norms, limit scans and the
//! verification suites built from them.

mod norms;
mod picard;
mod report;
mod scan;
pub mod suites;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

pub use norms::{box_norm, lq_norm, BoxNorm, Certificate, NormRegion, SpatialExtent};
pub use picard::{picard, PicardGrid, PicardResult};
pub use report::{Entry, Param, Relation, Report};
pub use scan::{limit_scan, LimitMode, ScanResult};

use crate::error::{Error, Result};
use crate::fields::Field;
use crate::potentials::{j_alpha, QuadratureSpec};
use crate::special::{mbar_constant, sharp_constant};

/// Quadrant region of `(λ, α)` relative to the critical curve
/// `α = (n+2)/(2p) (1 − 1/λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionLabel {
    /// `λ ≥ 1` above the curve: only trivial subsolutions.
    A,
    /// `0 < λ < 1`: sharp pointwise bounds.
    B,
    /// `λ > 1` below the curve: blow-up.
    C,
    /// `λ > 1` on the curve.
    D,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegionLabel::A => "A",
            RegionLabel::B => "B",
            RegionLabel::C => "C",
            RegionLabel::D => "D",
        };
        f.write_str(s)
    }
}

/// `(n+2)/(2p) (1 − 1/λ)`.
pub fn critical_alpha(n: usize, p: f64, lambda: f64) -> f64 {
    (n as f64 + 2.0) / (2.0 * p) * (1.0 - 1.0 / lambda)
}

/// Relative band within which a floating `α` counts as lying on the curve.
pub const BOUNDARY_BAND: f64 = 1e-12;

fn check_quadrant(lambda: f64, alpha: f64, p: f64, n: usize) -> Result<()> {
    if !(lambda > 0.0 && alpha > 0.0 && p >= 1.0 && n >= 1) || !lambda.is_finite() || !alpha.is_finite() {
        return Err(Error::domain("need lambda > 0, alpha > 0, p >= 1, n >= 1"));
    }
    Ok(())
}

/// Region label for floating inputs; `α` within [`BOUNDARY_BAND`] (relative)
/// of the curve is classified as `D`.
pub fn classify(lambda: f64, alpha: f64, p: f64, n: usize) -> Result<RegionLabel> {
    check_quadrant(lambda, alpha, p, n)?;
    if lambda < 1.0 {
        return Ok(RegionLabel::B);
    }
    let thr = critical_alpha(n, p, lambda);
    if lambda == 1.0 {
        return Ok(RegionLabel::A);
    }
    if (alpha - thr).abs() <= BOUNDARY_BAND * thr.max(alpha) {
        Ok(RegionLabel::D)
    } else if alpha > thr {
        Ok(RegionLabel::A)
    } else {
        Ok(RegionLabel::C)
    }
}

/// An exact rational `num / den`, `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: i128,
    pub den: i128,
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::domain("zero denominator"));
        }
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i128;
        Ok(Rational {
            num: num / g.max(1),
            den: den / g.max(1),
        })
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b)
        .ok_or_else(|| Error::domain("rational comparison overflowed i128"))
}

/// Region label by exact rational comparison.
pub fn classify_exact(lambda: Rational, alpha: Rational, p: Rational, n: u32) -> Result<RegionLabel> {
    if lambda.num <= 0 || alpha.num <= 0 || p.num < p.den || n == 0 {
        return Err(Error::domain("need lambda > 0, alpha > 0, p >= 1, n >= 1"));
    }
    if lambda.num < lambda.den {
        return Ok(RegionLabel::B);
    }
    if lambda.num == lambda.den {
        return Ok(RegionLabel::A);
    }
    // threshold = (n+2) p_d (λ_n − λ_d) / (2 p_n λ_n)
    let tn = mul(mul(i128::from(n) + 2, p.den)?, lambda.num - lambda.den)?;
    let td = mul(mul(2, p.num)?, lambda.num)?;
    let lhs = mul(alpha.num, td)?;
    let rhs = mul(tn, alpha.den)?;
    Ok(match lhs.cmp(&rhs) {
        core::cmp::Ordering::Greater => RegionLabel::A,
        core::cmp::Ordering::Equal => RegionLabel::D,
        core::cmp::Ordering::Less => RegionLabel::C,
    })
}

/// Region-B bounds on `(0, b)`:
/// `f ≤ K^{1/(1−λ)} (M b^α)^{λ/(1−λ)}` and `J_α f ≤ K^{1/(1−λ)} (M b^α)^{1/(1−λ)}`.
pub fn sup_bounds(k: f64, lambda: f64, alpha: f64, b: f64) -> Result<(f64, f64)> {
    if !(k > 0.0 && b > 0.0) {
        return Err(Error::domain("need K > 0 and b > 0"));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Region(format!("sharp bounds need 0 < lambda < 1, got {lambda}")));
    }
    let m = sharp_constant(alpha, lambda)?;
    let e = 1.0 / (1.0 - lambda);
    let base = m * libm::pow(b, alpha);
    let kk = libm::pow(k, e);
    Ok((kk * libm::pow(base, lambda * e), kk * libm::pow(base, e)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSequence {
    pub values: Vec<f64>,
    /// `M̄^{λ/(1−λ)}`.
    pub limit: f64,
}

/// `γ₁ = 1`, `γ_{j+1} = (M̄ γ_j)^λ` for `j < j_max`.
pub fn gamma_sequence(alpha: f64, lambda: f64, j_max: usize) -> Result<GammaSequence> {
    let mb = mbar_constant(alpha, lambda)?;
    let mut values = Vec::with_capacity(j_max);
    let mut g = 1.0;
    for _ in 0..j_max {
        values.push(g);
        g = libm::pow(mb * g, lambda);
    }
    Ok(GammaSequence {
        values,
        limit: libm::pow(mb, lambda / (1.0 - lambda)),
    })
}

/// Checks `0 ≤ f ≤ K (J_α f)^λ (1 + rel_tol)` at every sample point.
pub fn verify_subsolution(
    field: &Field,
    n: usize,
    k: f64,
    lambda: f64,
    alpha: f64,
    points: &[(Vec<f64>, f64)],
    quad: &QuadratureSpec,
    rel_tol: f64,
) -> Result<Report> {
    let mut rep = Report::new("subsolution");
    rep.meta("K", k);
    rep.meta("lambda", lambda);
    rep.meta("alpha", alpha);
    let mut worst: f64 = 0.0;
    let mut min_f = f64::INFINITY;
    for (x, t) in points {
        let f = field.eval(x, *t);
        min_f = min_f.min(f);
        let j = j_alpha(field, n, alpha, x, *t, quad)?.value;
        let rhs = k * libm::pow(j.max(0.0), lambda);
        worst = worst.max(f - rhs);
        rep.push(
            Entry::new("f <= K (J f)^lambda", Relation::AtMost, f, rhs, rel_tol * rhs)
                .with("x", x[0])
                .with("t", *t),
        );
    }
    rep.push(Entry::new("f >= 0", Relation::AtLeast, min_f, 0.0, 0.0));
    rep.meta("max_violation", worst.max(0.0));
    Ok(rep)
}

/// Sample points `(x e₁, t)` on a tensor grid, for radial fields.
pub fn radial_samples(n: usize, radii: &[f64], times: &[f64]) -> Vec<(Vec<f64>, f64)> {
    let mut out = Vec::with_capacity(radii.len() * times.len());
    for &t in times {
        for &r in radii {
            let mut x = alloc::vec![0.0; n];
            x[0] = r;
            out.push((x, t));
        }
    }
    out
}

/// Points `(λ, (n+2)/(2p)(1 − 1/λ))` of the critical curve on the grid `lo:hi:step`.
pub fn region_curve(n: usize, p: f64, lo: f64, hi: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    if n == 0 || !(p >= 1.0) || !(lo > 0.0) {
        return Err(Error::domain("need n >= 1, p >= 1 and lambda > 0"));
    }
    Ok(linspace_step(lo, hi, step)?
        .into_iter()
        .map(|l| (l, critical_alpha(n, p, l)))
        .collect())
}

/// `lo, lo + h, …, hi` (inclusive within rounding).
pub fn linspace_step(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) {
        return Err(Error::Domain(format!("bad range {lo}:{hi}:{step}")));
    }
    let m = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=m).map(|i| lo + step * i as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0.5, 7.0, 1.0, 1).unwrap(), RegionLabel::B);
        assert_eq!(classify(2.0, 1.0, 1.0, 1).unwrap(), RegionLabel::A);
        assert_eq!(classify(2.0, 0.75, 1.0, 1).unwrap(), RegionLabel::D);
        assert_eq!(classify(2.0, 0.5, 1.0, 1).unwrap(), RegionLabel::C);
        assert_eq!(classify(1.0, 0.1, 1.0, 1).unwrap(), RegionLabel::A);
        let r = |a, b| Rational::new(a, b).unwrap();
        assert_eq!(classify_exact(r(2, 1), r(3, 4), r(1, 1), 1).unwrap(), RegionLabel::D);
        assert_eq!(classify_exact(r(2, 1), r(1, 1), r(1, 1), 1).unwrap(), RegionLabel::A);
        assert_eq!(classify_exact(r(3, 1), r(1, 5), r(1, 1), 1).unwrap(), RegionLabel::C);
        assert_eq!(classify_exact(r(1, 2), r(7, 1), r(1, 1), 1).unwrap(), RegionLabel::B);
        assert!(classify(2.0, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn bounds_examples() {
        let (a, b) = sup_bounds(1.0, 0.5, 1.0, 1.0).unwrap();
        assert!((a - 0.5).abs() < 1e-15 && (b - 0.25).abs() < 1e-15);
        let (a, b) = sup_bounds(1.0, 0.5, 1.0, 2.0).unwrap();
        assert!((a - 1.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_recursion() {
        let g = gamma_sequence(1.0, 0.5, 200).unwrap();
        assert_eq!(g.values[0], 1.0);
        assert!((g.values[1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((g.limit - 0.5).abs() < 1e-15);
        assert!((g.values[199] - g.limit).abs() < 1e-12);
    }

    #[test]
    fn grid_helpers() {
        let v = linspace_step(1.0, 6.0, 0.05).unwrap();
        assert_eq!(v.len(), 101);
        assert!((v[100] - 6.0).abs() < 1e-12);
    }
}
