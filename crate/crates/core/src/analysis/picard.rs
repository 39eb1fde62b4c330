//! Fixed-point iteration `f_{k+1} = K (J_α f_k)^λ` on a sample grid.

use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fields::{make_function, make_sampled, Field, SampledGrid};
use crate::potentials::{j_alpha, QuadratureSpec};

/// Iterates beyond this sup are reported as divergent.
pub const OVERFLOW_GUARD: f64 = 1e150;

/// Sample grid for the iteration. Empty `axes` means the iterates are
/// treated as independent of `x` (only valid for `x`-independent data).
/// Otherwise iterates vanish outside the spatial hull: that truncation is
/// the only approximation besides interpolation.
#[derive(Debug, Clone)]
pub struct PicardGrid {
    pub n: usize,
    pub axes: Vec<Vec<f64>>,
    pub times: Vec<f64>,
}

impl PicardGrid {
    /// `x`-independent grid with `m` uniform times in `(0, b]`.
    pub fn time_only(n: usize, b: f64, m: usize) -> Self {
        PicardGrid {
            n,
            axes: Vec::new(),
            times: (1..=m).map(|i| b * i as f64 / m as f64).collect(),
        }
    }

    /// Symmetric grid `[−x_max, x_max]^n` with `mx` nodes per axis.
    pub fn cube(n: usize, x_max: f64, mx: usize, b: f64, m: usize) -> Self {
        let axis: Vec<f64> = (0..mx)
            .map(|i| -x_max + 2.0 * x_max * i as f64 / (mx - 1) as f64)
            .collect();
        PicardGrid {
            n,
            axes: alloc::vec![axis; n],
            times: (1..=m).map(|i| b * i as f64 / m as f64).collect(),
        }
    }

    fn points(&self) -> usize {
        self.axes.iter().map(Vec::len).product::<usize>().max(1)
    }

    fn point(&self, mut idx: usize) -> Vec<f64> {
        if self.axes.is_empty() {
            return alloc::vec![0.0; self.n];
        }
        let mut x = alloc::vec![0.0; self.n];
        for i in (0..self.n).rev() {
            let len = self.axes[i].len();
            x[i] = self.axes[i][idx % len];
            idx /= len;
        }
        x
    }
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    /// Grid sup of each iterate, starting with `f₀`.
    pub sups: Vec<f64>,
    /// Final iterate as a field.
    pub field: Field,
    pub diverged: bool,
}

fn time_interpolant(times: &[f64], vals: &[f64]) -> Result<Field> {
    let mut ts = Vec::with_capacity(times.len() + 1);
    let mut vs = Vec::with_capacity(times.len() + 1);
    ts.push(0.0);
    vs.push(0.0);
    ts.extend_from_slice(times);
    vs.extend_from_slice(vals);
    let breaks = times.to_vec();
    let ts = Arc::new(ts);
    let vs = Arc::new(vs);
    make_function(
        move |_x: &[f64], t: f64| {
            if t <= 0.0 || t > ts[ts.len() - 1] {
                return 0.0;
            }
            let k = ts.partition_point(|&s| s < t).clamp(1, ts.len() - 1);
            let w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
            (1.0 - w) * vs[k - 1] + w * vs[k]
        },
        true,
        breaks,
    )
}

fn sampled_field(grid: &PicardGrid, vals: Vec<f64>) -> Result<Field> {
    let mut times = Vec::with_capacity(grid.times.len() + 1);
    times.push(0.0);
    times.extend_from_slice(&grid.times);
    let nt = times.len();
    let mut full = Vec::with_capacity(grid.points() * nt);
    for p in 0..grid.points() {
        full.push(0.0);
        full.extend_from_slice(&vals[p * (nt - 1)..(p + 1) * (nt - 1)]);
    }
    Ok(make_sampled(SampledGrid::new(grid.axes.clone(), times, full)?))
}

/// Runs `iters` steps of `f ↦ K (J_α f)^λ` from `field0`, sampling each
/// iterate on `grid`.
#[allow(clippy::too_many_arguments)]
pub fn picard(
    field0: &Field,
    k: f64,
    lambda: f64,
    alpha: f64,
    grid: &PicardGrid,
    iters: usize,
    quad: &QuadratureSpec,
) -> Result<PicardResult> {
    if !(k > 0.0 && lambda > 0.0 && alpha > 0.0) {
        return Err(Error::domain("need K, lambda, alpha > 0"));
    }
    if grid.times.is_empty() || grid.times[0] <= 0.0 || grid.times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("grid times must be positive and increasing"));
    }
    if grid.axes.is_empty() && !field0.is_x_independent() {
        return Err(Error::domain("a time-only grid needs x-independent initial data"));
    }
    if !grid.axes.is_empty() && grid.axes.len() != grid.n {
        return Err(Error::domain("grid needs one axis per spatial dimension"));
    }
    let np = grid.points();
    let nt = grid.times.len();
    let sample = |f: &Field| -> Vec<f64> {
        let mut v = Vec::with_capacity(np * nt);
        for p in 0..np {
            let x = grid.point(p);
            v.extend(grid.times.iter().map(|&t| f.eval(&x, t)));
        }
        v
    };
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, &a| m.max(a.abs()));
    let mut cur = field0.clone();
    let mut sups = alloc::vec![sup(&sample(field0))];
    let mut diverged = false;
    for _ in 0..iters {
        let mut vals = Vec::with_capacity(np * nt);
        for p in 0..np {
            let x = grid.point(p);
            for &t in &grid.times {
                let j = j_alpha(&cur, grid.n, alpha, &x, t, quad)?.value;
                vals.push(k * libm::pow(j.max(0.0), lambda));
            }
        }
        let s = sup(&vals);
        sups.push(s);
        if !(s < OVERFLOW_GUARD) {
            diverged = true;
            break;
        }
        cur = if grid.axes.is_empty() {
            time_interpolant(&grid.times, &vals)?
        } else {
            sampled_field(grid, vals)?
        };
    }
    Ok(PicardResult {
        sups,
        field: cur,
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sup_bounds;
    use crate::fields::{make_exact_solution, make_slab};

    #[test]
    fn region_b_converges_to_bound() {
        let f0 = make_slab(0.0, 1.0, 1.0).unwrap();
        let grid = PicardGrid::time_only(1, 1.0, 64);
        let r = picard(&f0, 1.0, 0.5, 1.0, &grid, 50, &QuadratureSpec::default()).unwrap();
        let (bf, _) = sup_bounds(1.0, 0.5, 1.0, 1.0).unwrap();
        let last = *r.sups.last().unwrap();
        assert!(!r.diverged);
        assert!(last <= bf * 1.01 && last >= bf * 0.99, "{last} vs {bf}");
    }

    #[test]
    fn exact_solution_is_stationary() {
        let g = make_exact_solution(1.0, 0.5).unwrap();
        let grid = PicardGrid::time_only(1, 1.0, 200);
        let r = picard(&g, 1.0, 0.5, 1.0, &grid, 3, &QuadratureSpec::default()).unwrap();
        for s in &r.sups {
            assert!((s - 0.5).abs() < 1e-4, "{s}");
        }
    }

    #[test]
    fn region_a_small_data_decays() {
        let f0 = make_slab(0.0, 1.0, 0.1).unwrap();
        let grid = PicardGrid::time_only(1, 1.0, 32);
        let r = picard(&f0, 1.0, 2.0, 1.0, &grid, 8, &QuadratureSpec::default()).unwrap();
        assert!(r.sups.windows(2).all(|w| w[1] < w[0]));
        assert!(*r.sups.last().unwrap() < 1e-20);
    }

    #[test]
    fn spatial_grid_matches_time_only_in_the_interior() {
        let f0 = make_slab(0.0, 1.0, 1.0).unwrap();
        let q = QuadratureSpec::default().with_rel_tol(1e-6);
        let spatial = picard(&f0, 1.0, 0.5, 1.0, &PicardGrid::cube(1, 6.0, 13, 1.0, 16), 2, &q).unwrap();
        let flat = picard(&f0, 1.0, 0.5, 1.0, &PicardGrid::time_only(1, 1.0, 16), 2, &q).unwrap();
        // the hull edge at |x| = 6 leaks about erfc(3) of the mass at x = 0
        for t in [0.25, 0.5, 1.0] {
            let a = spatial.field.eval(&[0.0], t);
            let b = flat.field.eval(&[0.0], t);
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }
}
