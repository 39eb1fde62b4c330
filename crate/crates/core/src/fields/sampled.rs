//! Tensor-grid samples of a space-time field with multilinear interpolation.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::erf;

/// Values on a full tensor grid `x₁ × … × xₙ × t`, with `t` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGrid {
    axes: Vec<Vec<f64>>,
    times: Vec<f64>,
    values: Vec<f64>,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|x| x.is_finite())
}

impl SampledGrid {
    /// Validates shapes, ordering and the vanishing of every sample with `t ≤ 0`.
    pub fn new(axes: Vec<Vec<f64>>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::domain("sampled field needs at least one spatial axis"));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.len() < 2 || !strictly_increasing(a) {
                return Err(Error::Domain(alloc::format!(
                    "axis x{} must hold at least two strictly increasing values",
                    i + 1
                )));
            }
        }
        if times.len() < 2 || !strictly_increasing(&times) {
            return Err(Error::domain(
                "time axis must hold at least two strictly increasing values",
            ));
        }
        let expect = axes.iter().map(Vec::len).product::<usize>() * times.len();
        if values.len() != expect {
            return Err(Error::Domain(alloc::format!(
                "expected {expect} samples for the full tensor grid, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("sampled values must be finite"));
        }
        let nt = times.len();
        for (i, v) in values.iter().enumerate() {
            if times[i % nt] <= 0.0 && *v != 0.0 {
                return Err(Error::domain("sampled values must vanish for t <= 0"));
            }
        }
        Ok(SampledGrid { axes, times, values })
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(Vec::len).product::<usize>() * self.times.len()
    }

    /// Multilinear value and whether `(x, t)` lay inside the grid hull.
    /// Points outside the hull evaluate to 0.
    pub fn eval(&self, x: &[f64], t: f64) -> (f64, bool) {
        if t <= 0.0 {
            return (0.0, true);
        }
        let Some((k, wt)) = locate(&self.times, t) else {
            return (0.0, false);
        };
        let mut cells = Vec::with_capacity(self.n());
        for (i, a) in self.axes.iter().enumerate() {
            match locate(a, x[i]) {
                Some(c) => cells.push(c),
                None => return (0.0, false),
            }
        }
        let n = self.n();
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = 0;
            for (i, &(j, wi)) in cells.iter().enumerate() {
                let hi = (corner >> i) & 1 == 1;
                w *= if hi { wi } else { 1.0 - wi };
                idx += (j + hi as usize) * self.stride(i);
            }
            if w == 0.0 {
                continue;
            }
            acc += w * ((1.0 - wt) * self.values[idx + k] + wt * self.values[idx + k + 1]);
        }
        (acc, true)
    }

    /// `∫ Φ₁(x − ξ, σ) f(ξ, t) dξ` exactly for the multilinear interpolant
    /// (zero outside the hull), linear in time between slices.
    pub fn heat_smooth(&self, x: &[f64], t: f64, sigma: f64) -> f64 {
        if sigma <= 0.0 {
            return self.eval(x, t).0;
        }
        if t <= 0.0 {
            return 0.0;
        }
        let Some((k, wt)) = locate(&self.times, t) else {
            return 0.0;
        };
        let weights: Vec<Vec<f64>> = self
            .axes
            .iter()
            .zip(x)
            .map(|(a, &xi)| node_weights(a, xi, sigma))
            .collect();
        let s0 = self.contract(&weights, k);
        let s1 = if wt > 0.0 { self.contract(&weights, k + 1) } else { 0.0 };
        (1.0 - wt) * s0 + wt * s1
    }

    fn contract(&self, weights: &[Vec<f64>], k: usize) -> f64 {
        let n = self.n();
        let nt = self.times.len();
        let mut idx = vec![0usize; n];
        let mut total = 0.0;
        // skip nodes whose weight underflowed: most of a wide grid is far from x
        let live: Vec<Vec<usize>> = weights
            .iter()
            .map(|w| (0..w.len()).filter(|&j| w[j] != 0.0).collect())
            .collect();
        if live.iter().any(Vec::is_empty) {
            return 0.0;
        }
        loop {
            let mut w = 1.0;
            let mut flat = 0;
            for i in 0..n {
                let j = live[i][idx[i]];
                w *= weights[i][j];
                flat = flat * self.axes[i].len() + j;
            }
            total += w * self.values[flat * nt + k];
            let mut i = n;
            loop {
                if i == 0 {
                    return total;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < live[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }
}

/// Cell index and fractional position of `x` on `grid`, `None` outside.
fn locate(grid: &[f64], x: f64) -> Option<(usize, f64)> {
    let last = grid.len() - 1;
    if !(x >= grid[0] && x <= grid[last]) {
        return None;
    }
    let j = match grid.binary_search_by(|g| g.total_cmp(&x)) {
        Ok(j) => j.min(last - 1),
        Err(j) => j - 1,
    };
    let w = (x - grid[j]) / (grid[j + 1] - grid[j]);
    Some((j, w))
}

/// Gaussian weights of the hat functions on `grid` as seen from `x`:
/// `w[j] = ∫ g_σ(x − ξ) hat_j(ξ) dξ`.
fn node_weights(grid: &[f64], x: f64, sigma: f64) -> Vec<f64> {
    let s = (4.0 * sigma).sqrt();
    let c = (sigma / core::f64::consts::PI).sqrt();
    let mut w = vec![0.0; grid.len()];
    for j in 0..grid.len() - 1 {
        let (a, b) = (grid[j], grid[j + 1]);
        // cells more than 40 kernel widths away carry nothing representable
        if (a - x) / s > 40.0 || (x - b) / s > 40.0 {
            continue;
        }
        let ea = erf((x - a) / s);
        let eb = erf((x - b) / s);
        let g0 = 0.5 * (ea - eb);
        let ga = libm::exp(-(a - x) * (a - x) / (4.0 * sigma));
        let gb = libm::exp(-(b - x) * (b - x) / (4.0 * sigma));
        // ∫_a^b (ξ − x) g dξ = √(σ/π) (e^{−(a−x)²/4σ} − e^{−(b−x)²/4σ})
        let m1 = c * (ga - gb);
        let g1 = ((x - a) * g0 + m1) / (b - a);
        w[j] += g0 - g1;
        w[j + 1] += g1;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{self, Tol};

    fn grid_1d() -> SampledGrid {
        let xs: Vec<f64> = (0..=8).map(|i| -2.0 + 0.5 * i as f64).collect();
        let ts = vec![0.0, 0.5, 1.0];
        let mut v = Vec::new();
        for &x in &xs {
            for &t in &ts {
                v.push(if t <= 0.0 { 0.0 } else { t * (1.0 + x * 0.3) });
            }
        }
        SampledGrid::new(vec![xs], ts, v).unwrap()
    }

    #[test]
    fn interpolates_linear_data_exactly() {
        let g = grid_1d();
        let (v, inside) = g.eval(&[0.3], 0.75);
        assert!(inside);
        assert!((v - 0.75 * 1.09).abs() < 1e-14);
        let (v, inside) = g.eval(&[3.0], 0.75);
        assert_eq!(v, 0.0);
        assert!(!inside);
        assert_eq!(g.eval(&[0.0], -1.0).0, 0.0);
    }

    #[test]
    fn rejects_nonzero_initial_slice() {
        let r = SampledGrid::new(vec![vec![0.0, 1.0]], vec![0.0, 1.0], vec![1.0, 1.0, 0.0, 1.0]);
        assert!(r.is_err());
        let r = SampledGrid::new(vec![vec![0.0, 1.0]], vec![0.0, 1.0], vec![0.0, 1.0, 0.0]);
        assert!(r.is_err());
    }

    #[test]
    fn heat_smoothing_matches_quadrature() {
        let g = grid_1d();
        let tol = Tol::new(1e-15, 1e-12, 4000);
        for &(x, t, s) in &[(0.0, 0.8, 0.1), (1.7, 0.3, 0.5), (-2.5, 1.0, 0.05)] {
            let f = |e: f64| crate::kernels::heat_kernel(1, (x - e) * (x - e), s) * g.eval(&[e], t).0;
            let pts: Vec<f64> = g.axes()[0].clone();
            let q = quad::integrate_with_breaks(&f, -2.0, 2.0, &pts, &tol).unwrap();
            assert!((q.value - g.heat_smooth(&[x], t, s)).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn two_dimensional_heat_smoothing() {
        let ax: Vec<f64> = (0..=4).map(|i| -1.0 + 0.5 * i as f64).collect();
        let ts = vec![0.0, 1.0];
        let mut v = Vec::new();
        for &a in &ax {
            for &b in &ax {
                for &t in &ts {
                    v.push(if t > 0.0 { 1.0 + a - 0.5 * b } else { 0.0 });
                }
            }
        }
        let g = SampledGrid::new(vec![ax.clone(), ax.clone()], ts, v).unwrap();
        assert!((g.eval(&[0.25, -0.25], 1.0).0 - 1.375).abs() < 1e-14);
        let tol = Tol::new(1e-14, 1e-11, 4000);
        let (x, y, s) = (0.2, -0.3, 0.07);
        let inner = |e1: f64| {
            let f = |e2: f64| {
                crate::kernels::heat_kernel(2, (x - e1).powi(2) + (y - e2).powi(2), s) * g.eval(&[e1, e2], 1.0).0
            };
            quad::integrate_with_breaks(&f, -1.0, 1.0, &ax, &tol).unwrap().value
        };
        let q = quad::integrate_with_breaks(&inner, -1.0, 1.0, &ax, &tol).unwrap();
        assert!((q.value - g.heat_smooth(&[x, y], 1.0, s)).abs() < 1e-10);
    }
}
