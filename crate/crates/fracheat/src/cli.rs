//! Command-line front end.
//!
//! Every subcommand shares one flag set; a `--config` file supplies
//! `key=value` defaults that explicit flags override.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use fracheat_core::analysis::suites::{run_suite, standard_bump, suite_list, SuiteConfig, SUITE_NAMES};
use fracheat_core::analysis::{
    box_norm, classify, limit_scan, linspace_step, picard, region_curve, LimitMode, NormRegion, PicardGrid, Report,
};
use fracheat_core::fields::{make_blowup_large_time, make_blowup_small_time};
use fracheat_core::inverse::{j_inverse, InverseSpec, Potential};
use fracheat_core::kernels::phi_scaled;
use fracheat_core::potentials::{j_alpha, j_scaled};
use fracheat_core::{Error as CoreError, Field, KernelParams, QuadratureSpec};

use crate::grammar::{parse_field, ParseContext};
use crate::io::{num, parse_config, write_report, Table};

#[derive(Debug, Parser)]
#[command(
    name = "fracheat",
    version,
    about = "Fully fractional heat kernels, potentials, inverses and blow-up constructions",
    args_override_self = true,
    subcommand_required = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the kernel Φ_α (or the scaled kernel with --a/--b).
    Kernel(Opts),
    /// Evaluate J_α f (or J_{α,a,b} f with --a/--b; a = 0 or b = 0 give the limits).
    Potential(Opts),
    /// Recover f from u = J_α f by the extrapolated Marchaud inverse.
    Inverse(Opts),
    /// Run verification suites (--suite NAME or all).
    Verify(Opts),
    /// Region map: the boundary curve over --lambda-grid, or the label of one point.
    Regions(Opts),
    /// Box norms of the small- or large-time blow-up construction.
    Blowup {
        #[arg(value_enum)]
        mode: BlowupArg,
        #[command(flatten)]
        opts: Opts,
    },
    /// Convergence of the scaled potential to its time or space limit.
    Limits {
        #[arg(value_enum)]
        mode: LimitArg,
        #[command(flatten)]
        opts: Opts,
    },
    /// Fixed-point iteration f ↦ K (J_α f)^λ.
    Picard(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BlowupArg {
    Small,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LimitArg {
    Time,
    Space,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Svg,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Spatial point, comma separated (`0.5,0`).
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// A time, a comma list, or a range `lo:hi:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Field in the text grammar, e.g. `exact(alpha=1,lambda=0.5)`.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub suite: Option<String>,
    /// Pass/fail tolerance for `verify`, quadrature relative tolerance elsewhere.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Picard grid: `m` uniform times in (0, b], or `xmax:mx:m` for a spatial cube.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub l: Option<u32>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `lo:hi:step` for the region curve.
    #[arg(long = "lambda-grid")]
    pub lambda_grid: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad or missing flags; exit 2.
    Usage(String),
    /// A verification entry failed or a computation could not finish; exit 1.
    Failed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failed(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(_) | CoreError::Region(_) | CoreError::Unsupported(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn req<T: Copy>(v: Option<T>, flag: &str, cmd: &str) -> CliResult<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required for {cmd}")))
}

/// Splices `--config` defaults in front of the explicit flags, so later
/// (explicit) occurrences win.
fn expand_config(args: &[String]) -> CliResult<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = Some(
                args.get(i + 1)
                    .cloned()
                    .ok_or_else(|| usage("--config needs a file path"))?,
            );
        }
    }
    let Some(path) = path else {
        return Ok(args.to_vec());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("--config: cannot read {path}: {e}")))?;
    let pairs = parse_config(&text).map_err(|e| usage(format!("--config: {e}")))?;
    if args.len() < 2 || args[1].starts_with('-') {
        return Ok(args.to_vec());
    }
    let mut out = args[..2].to_vec();
    for (k, v) in pairs {
        if k == "config" {
            return Err(usage("--config: a config file cannot name another config file"));
        }
        out.push(format!("--{k}={v}"));
    }
    out.extend_from_slice(&args[2..]);
    Ok(out)
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Results go to `stdout` or `--out`; diagnostics to stderr.
pub fn run(args: &[String], stdout: &mut dyn Write) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    return 0;
                }
                _ => 2,
            };
            eprint!("{}", e.render());
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::Usage(_) => 2,
                CliError::Failed(_) => 1,
            }
        }
    }
}

fn execute(cmd: &Command, stdout: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::Kernel(o) => kernel(o, stdout),
        Command::Potential(o) => potential(o, stdout),
        Command::Inverse(o) => inverse(o, stdout),
        Command::Verify(o) => verify(o, stdout),
        Command::Regions(o) => regions(o, stdout),
        Command::Blowup { mode, opts } => blowup(*mode, opts, stdout),
        Command::Limits { mode, opts } => limits(*mode, opts, stdout),
        Command::Picard(o) => run_picard(o, stdout),
    }
}

fn parse_list(s: &str, flag: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("--{flag}: '{v}' is not a number")))
        })
        .collect()
}

/// `lo:hi:step`, inclusive.
fn parse_range(s: &str, flag: &str) -> CliResult<Vec<f64>> {
    let parts = parse_list(&s.replace(':', ","), flag)?;
    if parts.len() != 3 {
        return Err(usage(format!("--{flag}: expected lo:hi:step, got '{s}'")));
    }
    linspace_step(parts[0], parts[1], parts[2]).map_err(|e| usage(format!("--{flag}: {e}")))
}

fn times(o: &Opts, cmd: &str) -> CliResult<Vec<f64>> {
    let t =
        o.t.as_deref()
            .ok_or_else(|| usage(format!("--t is required for {cmd}")))?;
    if t.contains(':') {
        parse_range(t, "t")
    } else {
        parse_list(t, "t")
    }
}

fn point(o: &Opts, n: usize, cmd: &str) -> CliResult<Vec<f64>> {
    let x =
        o.x.as_deref()
            .ok_or_else(|| usage(format!("--x is required for {cmd}")))?;
    let x = parse_list(x, "x")?;
    if x.len() != n {
        return Err(usage(format!("--x has {} coordinates but --n is {n}", x.len())));
    }
    Ok(x)
}

fn quad(o: &Opts) -> QuadratureSpec {
    let q = QuadratureSpec::default();
    match o.tol {
        Some(t) => q.with_rel_tol(t),
        None => q,
    }
}

fn field(o: &Opts, cmd: &str) -> CliResult<Field> {
    let spec = o
        .field
        .as_deref()
        .ok_or_else(|| usage(format!("--field is required for {cmd}")))?;
    let ctx = ParseContext {
        base_dir: o.config.as_deref().and_then(Path::parent).map(Path::to_path_buf),
        quad: quad(o),
    };
    parse_field(spec, &ctx).map_err(|e| usage(format!("--field: {e}")))
}

/// Writes a table to `--out` or `stdout` in the requested format.
fn emit(o: &Opts, table: &Table, stdout: &mut dyn Write) -> CliResult<()> {
    let text = match o.format.unwrap_or_default() {
        Format::Csv => table.to_csv(),
        Format::Svg => table.to_svg(),
    };
    match &o.out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// A lone value with no `--out` is printed bare; anything else is a table.
fn emit_points(o: &Opts, table: &Table, stdout: &mut dyn Write) -> CliResult<()> {
    if table.rows.len() == 1 && o.out.is_none() && o.format.is_none() {
        let v = table.rows[0][table.columns.iter().position(|c| c == "value").unwrap_or(0)];
        writeln!(stdout, "{}", num(v))?;
        return Ok(());
    }
    emit(o, table, stdout)
}

fn columns(n: usize, extra: &[&str]) -> Vec<String> {
    let mut c: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    c.push("t".into());
    c.extend(extra.iter().map(|s| s.to_string()));
    c
}

fn row(x: &[f64], t: f64, extra: &[f64]) -> Vec<f64> {
    let mut r = x.to_vec();
    r.push(t);
    r.extend_from_slice(extra);
    r
}

fn kernel(o: &Opts, stdout: &mut dyn Write) -> CliResult<i32> {
    let n = req(o.n, "n", "kernel")?;
    let alpha = req(o.alpha, "alpha", "kernel")?;
    let params = KernelParams::new(n, alpha, o.a.unwrap_or(1.0), o.b.unwrap_or(1.0))?;
    let x = point(o, n, "kernel")?;
    let mut table = Table {
        columns: columns(n, &["value"]),
        rows: Vec::new(),
    };
    for t in times(o, "kernel")? {
        table.rows.push(row(&x, t, &[phi_scaled(&params, &x, t)?]));
    }
    emit_points(o, &table, stdout)?;
    Ok(0)
}

fn potential(o: &Opts, stdout: &mut dyn Write) -> CliResult<i32> {
    let n = req(o.n, "n", "potential")?;
    let alpha = req(o.alpha, "alpha", "potential")?;
    let f = field(o, "potential")?;
    let x = point(o, n, "potential")?;
    let q = quad(o);
    let mut table = Table {
        columns: columns(n, &["value", "error"]),
        rows: Vec::new(),
    };
    for t in times(o, "potential")? {
        let est = if o.a.is_some() || o.b.is_some() {
            j_scaled(&f, n, alpha, o.a.unwrap_or(1.0), o.b.unwrap_or(1.0), &x, t, &q)?
        } else {
            j_alpha(&f, n, alpha, &x, t, &q)?
        };
        table.rows.push(row(&x, t, &[est.value, est.error]));
    }
    emit_points(o, &table, stdout)?;
    Ok(0)
}

fn inverse(o: &Opts, stdout: &mut dyn Write) -> CliResult<i32> {
    let n = req(o.n, "n", "inverse")?;
    let alpha = req(o.alpha, "alpha", "inverse")?;
    let f = field(o, "inverse")?;
    let x = point(o, n, "inverse")?;
    let mut spec = InverseSpec::new(o.l.unwrap_or(2), o.eps.unwrap_or(0.02));
    if let Some(t) = o.tol {
        spec.quad = spec.quad.with_rel_tol(t);
    }
    if let Some(k) = o.iters {
        spec.levels = k;
    }
    let u = Potential {
        field: &f,
        n,
        alpha,
        quad: spec.quad,
    };
    let mut table = Table {
        columns: columns(n, &["value", "field", "observed_rate"]),
        rows: Vec::new(),
    };
    for t in times(o, "inverse")? {
        let r = j_inverse(&u, alpha, &spec, &x, t)?;
        table.rows.push(row(&x, t, &[r.value, f.eval(&x, t), r.observed_rate]));
    }
    emit_points(o, &table, stdout)?;
    Ok(0)
}

fn suite_config(o: &Opts) -> SuiteConfig {
    SuiteConfig {
        n: o.n,
        alpha: o.alpha,
        lambda: o.lambda,
        p: o.p,
        q: o.q,
        k: o.k,
        b: o.b,
        tol: o.tol,
        eps: o.eps,
        l: o.l,
        ..SuiteConfig::default()
    }
}

fn verify(o: &Opts, stdout: &mut dyn Write) -> CliResult<i32> {
    let suite = o
        .suite
        .as_deref()
        .ok_or_else(|| usage("--suite is required for verify"))?;
    if o.format == Some(Format::Svg) {
        return Err(usage("--format svg is not available for verify reports"));
    }
    let names: Vec<&str> = if suite == "all" {
        SUITE_NAMES.to_vec()
    } else if SUITE_NAMES.contains(&suite) {
        vec![suite]
    } else {
        return Err(usage(format!(
            "--suite: unknown suite '{suite}' (known: {}, all)",
            suite_list()
        )));
    };
    let cfg = suite_config(o);
    let mut reports: Vec<Report> = Vec::new();
    for name in names {
        let start = std::time::Instant::now();
        let rep = run_suite(name, &cfg)?;
        let failed = rep.failures().count();
        eprintln!(
            "{name}: {} ({} checks, {failed} failed, {:.2} s)",
            if failed == 0 { "PASS" } else { "FAIL" },
            rep.entries.len(),
            start.elapsed().as_secs_f64()
        );
        reports.push(rep);
    }
    let mut buf = Vec::new();
    write_report(&reports, &mut buf).map_err(|e| CliError::Failed(e.to_string()))?;
    match &o.out {
        Some(p) => std::fs::write(p, buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(if reports.iter().all(Report::passed) { 0 } else { 1 })
}

fn regions(o: &Opts, stdout: &mut dyn Write) -> CliResult<i32> {
    let n = req(o.n, "n", "regions")?;
    let p = req(o.p, "p", "regions")?;
    if let Some(g) = &o.lambda_grid {
        let lam = parse_range(g, "lambda-grid")?;
        let curve = region_curve(n, p, lam[0], *lam.last().unwrap_or(&lam[0]), step_of(g)?)?;
        let mut table = Table::new(&["lambda", "alpha"]);
        for (l, a) in curve {
            table.push(vec![l, a]);
        }
        emit(o, &table, stdout)?;
        return Ok(0);
    }
    let lambda = o
        .lambda
        .ok_or_else(|| usage("regions needs --lambda-grid, or --lambda with --alpha"))?;
    let alpha = req(o.alpha, "alpha", "regions with --lambda")?;
    writeln!(stdout, "{}", classify(lambda, alpha, p, n)?)?;
    Ok(0)
}

fn step_of(g: &str) -> CliResult<f64> {
    let parts = parse_list(&g.replace(':', ","), "lambda-grid")?;
    Ok(parts[2])
}

fn blowup(mode: BlowupArg, o: &Opts, stdout: &mut dyn Write) -> CliResult<i32> {
    let n = o.n.unwrap_or(1);
    let p = o.p.unwrap_or(1.0);
    let lambda = o.lambda.unwrap_or(3.0);
    let alpha = o.alpha.unwrap_or(0.2);
    let q = quad(o);
    let fam = match mode {
        BlowupArg::Small => make_blowup_small_time(n, p, lambda, alpha, o.q.unwrap_or(1.5), o.iters.unwrap_or(3), &q)?,
        BlowupArg::Large => make_blowup_large_time(n, p, lambda, alpha, o.iters.unwrap_or(4))?,
    };
    let f = fam.field();
    let mut table = Table::new(&["j", "t_j", "q", "box_norm", "certified"]);
    for (j, tj) in fam.box_times().into_iter().enumerate() {
        let bn = box_norm(&f, n, fam.q, &NormRegion::parabolic_box(tj)?, &q)?;
        table.push(vec![
            (j + 1) as f64,
            tj,
            fam.q,
            bn.value,
            f64::from(u8::from(bn.certificate.is_some())),
        ]);
    }
    emit(o, &table, stdout)?;
    Ok(0)
}

fn limits(mode: LimitArg, o: &Opts, stdout: &mut dyn Write) -> CliResult<i32> {
    let (mode, n_default, times) = match mode {
        LimitArg::Time => (LimitMode::TimeLimit, 1, [1.0, 1.5, 2.0]),
        LimitArg::Space => (LimitMode::SpaceLimit, 3, [7.0, 8.0, 9.0]),
    };
    let n = o.n.unwrap_or(n_default);
    let alpha = o.alpha.unwrap_or(0.5);
    let f = match &o.field {
        Some(_) => field(o, "limits")?,
        None => standard_bump(),
    };
    let params: Vec<f64> = (0..o.iters.unwrap_or(6)).map(|k| 0.5f64.powi(k as i32)).collect();
    let mut pts = Vec::new();
    for r in [0.0, 0.5, 1.0] {
        for t in times {
            let mut x = vec![0.0; n];
            if n > 0 {
                x[0] = r;
            }
            pts.push((x, t));
        }
    }
    let scan = limit_scan(&f, n, alpha, mode, &params, &pts, &quad(o))?;
    let mut table = Table::new(&["param", "error"]);
    for (p, e) in scan.params.iter().zip(&scan.errors) {
        table.push(vec![*p, *e]);
    }
    emit(o, &table, stdout)?;
    Ok(0)
}

fn picard_grid(o: &Opts, n: usize, b: f64) -> CliResult<PicardGrid> {
    let spec = o.grid.as_deref().unwrap_or("32");
    let parts = parse_list(&spec.replace(':', ","), "grid")?;
    let count = |v: f64| {
        if v >= 2.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(usage(format!("--grid: node counts must be integers >= 2, got {v}")))
        }
    };
    match parts.as_slice() {
        [m] => Ok(PicardGrid::time_only(n, b, count(*m)?)),
        [xmax, mx, m] if *xmax > 0.0 => Ok(PicardGrid::cube(n, *xmax, count(*mx)?, b, count(*m)?)),
        _ => Err(usage(format!("--grid: expected m or xmax:mx:m, got '{spec}'"))),
    }
}

fn run_picard(o: &Opts, stdout: &mut dyn Write) -> CliResult<i32> {
    let n = req(o.n, "n", "picard")?;
    let alpha = req(o.alpha, "alpha", "picard")?;
    let lambda = req(o.lambda, "lambda", "picard")?;
    let f0 = field(o, "picard")?;
    let grid = picard_grid(o, n, o.b.unwrap_or(1.0))?;
    let res = picard(
        &f0,
        o.k.unwrap_or(1.0),
        lambda,
        alpha,
        &grid,
        o.iters.unwrap_or(20),
        &quad(o),
    )?;
    let mut table = Table::new(&["iter", "sup"]);
    for (i, s) in res.sups.iter().enumerate() {
        table.push(vec![i as f64, *s]);
    }
    emit(o, &table, stdout)?;
    if res.diverged {
        eprintln!("iterates exceeded the overflow guard");
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut argv = vec!["fracheat".to_string()];
        argv.extend(args.iter().map(|s| s.to_string()));
        let mut out = Vec::new();
        let code = run(&argv, &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn kernel_before_time_zero() {
        let (code, out) = call(&["kernel", "--n", "1", "--alpha", "1", "--x", "0", "--t", "-1"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim().parse::<f64>().unwrap(), 0.0);
    }

    #[test]
    fn heat_kernel_value() {
        let (code, out) = call(&["kernel", "--n", "1", "--alpha", "1", "--x", "0", "--t", "1"]);
        assert_eq!(code, 0);
        let v: f64 = out.trim().parse().unwrap();
        assert!((v - 1.0 / (4.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn missing_flag_is_named() {
        let (code, _) = call(&["kernel", "--n", "1", "--x", "0", "--t", "1"]);
        assert_eq!(code, 2);
        assert!(matches!(
            execute(&Command::Kernel(Opts { n: Some(1), ..Opts::default() }), &mut Vec::new()),
            Err(CliError::Usage(m)) if m.contains("--alpha")
        ));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(call(&["kernel", "--bogus", "1"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
    }

    #[test]
    fn regions_label() {
        let (code, out) = call(&["regions", "--n", "1", "--p", "1", "--lambda", "3", "--alpha", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "D");
    }

    #[test]
    fn config_defaults_yield_to_flags() {
        let dir = std::env::temp_dir().join(format!("fracheat-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "n=1\nalpha=1\nx=0\nt=2\n").unwrap();
        let p = path.to_str().unwrap();
        let (c1, a) = call(&["kernel", "--config", p]);
        let (c2, b) = call(&["kernel", "--config", p, "--t", "1"]);
        assert_eq!((c1, c2), (0, 0));
        assert_ne!(a, b);
        std::fs::write(&path, "nope=3\n").unwrap();
        assert_eq!(call(&["kernel", "--config", p]).0, 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
