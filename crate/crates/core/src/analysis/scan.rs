//! Convergence scans of the scaled potential `J_{α,a,b}` toward its
//! Riemann–Liouville (`a → 0`) and Riesz (`b → 0`) limits.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::report::{Entry, Relation, Report};
use crate::error::{Error, Result};
use crate::fields::Field;
use crate::potentials::{j_scaled, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMode {
    /// `J_{α,a,1} f → J_{α,0,1} f` as `a → 0`.
    TimeLimit,
    /// `J_{α,1,b} f → J_{α,1,0} f` as `b → 0`; needs `0 < 2α < n`.
    SpaceLimit,
}

impl LimitMode {
    pub fn name(self) -> &'static str {
        match self {
            LimitMode::TimeLimit => "time-limit",
            LimitMode::SpaceLimit => "space-limit",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    pub params: Vec<f64>,
    /// `max_points |J_{α,·,·} f − limit|` for each parameter.
    pub errors: Vec<f64>,
    pub strictly_decreasing: bool,
    pub nonincreasing: bool,
    pub report: Report,
}

/// Computes the scan error at each parameter and a monotone-decrease verdict.
pub fn limit_scan(
    field: &Field,
    n: usize,
    alpha: f64,
    mode: LimitMode,
    params: &[f64],
    points: &[(Vec<f64>, f64)],
    quad: &QuadratureSpec,
) -> Result<ScanResult> {
    if params.is_empty() || params.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
        return Err(Error::domain("scan parameters must be positive and finite"));
    }
    if points.is_empty() || points.iter().any(|(x, _)| x.len() != n) {
        return Err(Error::domain("sample points must be nonempty and n-dimensional"));
    }
    if mode == LimitMode::SpaceLimit && !(2.0 * alpha < n as f64) {
        return Err(Error::domain("the space limit needs 0 < 2 alpha < n"));
    }
    let scaled = |s: f64, x: &[f64], t: f64| match mode {
        LimitMode::TimeLimit => j_scaled(field, n, alpha, s, 1.0, x, t, quad),
        LimitMode::SpaceLimit => j_scaled(field, n, alpha, 1.0, s, x, t, quad),
    };
    let mut limits = Vec::with_capacity(points.len());
    for (x, t) in points {
        limits.push(scaled(0.0, x, *t)?.value);
    }
    let mut errors = Vec::with_capacity(params.len());
    for &s in params {
        let mut worst: f64 = 0.0;
        for ((x, t), l) in points.iter().zip(&limits) {
            worst = worst.max((scaled(s, x, *t)?.value - l).abs());
        }
        errors.push(worst);
    }
    let strictly_decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let nonincreasing = errors.windows(2).all(|w| w[1] <= w[0]);
    let mut report = Report::new(mode.name());
    report.meta("n", n);
    report.meta("alpha", alpha);
    report.meta("points", points.len());
    let pname = match mode {
        LimitMode::TimeLimit => "a",
        LimitMode::SpaceLimit => "b",
    };
    for (i, (&s, &e)) in params.iter().zip(&errors).enumerate() {
        let mut entry = Entry::new("scan error", Relation::AtMost, e, f64::INFINITY, 0.0).with(pname, s);
        if i > 0 && e > 0.0 {
            entry = Entry::new("scan error decreases", Relation::AtMost, e, errors[i - 1], 0.0).with(pname, s);
            entry.pass = e < errors[i - 1];
        }
        report.push(entry);
    }
    Ok(ScanResult {
        params: params.to_vec(),
        errors,
        strictly_decreasing,
        nonincreasing,
        report,
    })
}
