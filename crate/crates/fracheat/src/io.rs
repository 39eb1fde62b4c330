//! File formats: sampled-field CSV, report CSV, plain tables and SVG plots.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use fracheat_core::analysis::{Param, Report};
use fracheat_core::fields::{make_sampled, Field, SampledGrid};
use serde_json::{Map, Value};

pub type IoResult<T> = Result<T, Box<dyn std::error::Error + Send + Sync>>;

/// Round-trip-safe number formatting (17 significant digits).
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reads `x1,...,xn,t,value` rows on a full tensor grid, sorted
/// lexicographically (`t` fastest).
pub fn read_sampled_csv(path: &Path) -> IoResult<Field> {
    let file = std::fs::File::open(path)?;
    read_sampled(file)
}

pub fn read_sampled<R: Read>(src: R) -> IoResult<Field> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(src);
    let headers = rdr.headers()?.clone();
    let cols = headers.len();
    if cols < 3 {
        return Err("sampled CSV needs columns x1,...,xn,t,value".into());
    }
    let n = cols - 2;
    for (i, h) in headers.iter().enumerate() {
        let want = match i {
            i if i < n => format!("x{}", i + 1),
            i if i == n => "t".to_string(),
            _ => "value".to_string(),
        };
        if h != want {
            return Err(format!("header column {} is '{h}', expected '{want}'", i + 1).into());
        }
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row: Vec<f64> = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| format!("row {}: '{s}' is not a number", line + 2))
            })
            .collect::<Result<_, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("sampled CSV has no rows".into());
    }
    for w in rows.windows(2) {
        if w[0][..=n].partial_cmp(&w[1][..=n]) != Some(std::cmp::Ordering::Less) {
            return Err("rows must be sorted lexicographically by (x1,...,xn,t) without repeats".into());
        }
    }
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for c in 0..=n {
        let mut v: Vec<f64> = rows.iter().map(|r| r[c]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        axes.push(v);
    }
    let times = axes.pop().expect("time axis");
    let values: Vec<f64> = rows.iter().map(|r| r[n + 1]).collect();
    Ok(make_sampled(SampledGrid::new(axes, times, values)?))
}

pub fn write_sampled<W: Write>(grid: &SampledGrid, out: W) -> IoResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let n = grid.n();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.push("t".into());
    header.push("value".into());
    w.write_record(&header)?;
    let times = grid.times();
    let total: usize = grid.axes().iter().map(Vec::len).product();
    for p in 0..total {
        let mut idx = p;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let a = &grid.axes()[i];
            x[i] = a[idx % a.len()];
            idx /= a.len();
        }
        for (k, &t) in times.iter().enumerate() {
            let mut rec: Vec<String> = x.iter().map(|v| num(*v)).collect();
            rec.push(num(t));
            rec.push(num(grid.values()[p * times.len() + k]));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn param_json(p: &Param) -> Value {
    match p {
        Param::Num(v) if v.is_finite() => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
        Param::Num(v) => Value::String(format!("{v}")),
        Param::Int(i) => Value::from(*i),
        Param::Text(s) => Value::String(s.clone()),
        Param::Bool(b) => Value::Bool(*b),
    }
}

/// Report rows with columns `check,param_json,measured,reference,tol,pass`.
/// Parameter objects have sorted keys, so output is deterministic.
pub fn write_report<W: Write>(reports: &[Report], out: W) -> IoResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["check", "param_json", "measured", "reference", "tol", "pass"])?;
    for r in reports {
        for e in &r.entries {
            let mut m = Map::new();
            m.insert("suite".into(), Value::String(r.name.clone()));
            m.insert("relation".into(), Value::String(e.relation.name().into()));
            for (k, v) in &e.params {
                m.insert(k.clone(), param_json(v));
            }
            let json = serde_json::to_string(&Value::Object(m))?;
            w.write_record([
                e.check.as_str(),
                json.as_str(),
                &num(e.measured),
                &num(e.reference),
                &num(e.tol),
                if e.pass { "true" } else { "false" },
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// A numeric table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| num(*v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Polyline plot of every column against the first.
    pub fn to_svg(&self) -> String {
        svg_plot(self)
    }
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn svg_plot(t: &Table) -> String {
    let finite = |v: &f64| v.is_finite();
    let xs: Vec<f64> = t.rows.iter().map(|r| r[0]).filter(finite).collect();
    let ys: Vec<f64> = t
        .rows
        .iter()
        .flat_map(|r| r[1..].iter().copied())
        .filter(finite)
        .collect();
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, lo + 0.5)
        }
    };
    let (x0, x1) = range(&xs);
    let (y0, y1) = range(&ys);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{} H{}" stroke="black" fill="none"/>"#,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{}" font-size="11">{:.4}</text>"#,
        H - PAD + 16.0,
        x0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{:.4}</text>"#,
        W - PAD,
        H - PAD + 16.0,
        x1
    );
    let _ = writeln!(s, r#"<text x="4" y="{}" font-size="11">{:.4}</text>"#, H - PAD, y0);
    let _ = writeln!(s, r#"<text x="4" y="{}" font-size="11">{:.4}</text>"#, PAD, y1);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 8.0,
        t.columns[0]
    );
    for c in 1..t.columns.len() {
        let color = COLORS[(c - 1) % COLORS.len()];
        let pts: Vec<String> = t
            .rows
            .iter()
            .filter(|r| r[0].is_finite() && r[c].is_finite())
            .map(|r| format!("{:.2},{:.2}", sx(r[0]), sy(r[c])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" stroke="{color}" fill="none"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            W - PAD - 4.0,
            PAD + 14.0 * c as f64,
            t.columns[c]
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let k = k.trim().trim_start_matches("--");
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fracheat_core::analysis::{Entry, Relation};

    #[test]
    fn sampled_round_trip() {
        let csv = "x1,t,value\n-1,0,0\n-1,1,2\n1,0,0\n1,1,4\n";
        let f = read_sampled(csv.as_bytes()).unwrap();
        assert!((f.eval(&[0.0], 1.0) - 3.0).abs() < 1e-15);
        let Field::Sampled(g) = &f else { panic!() };
        let mut buf = Vec::new();
        write_sampled(g, &mut buf).unwrap();
        let back = read_sampled(buf.as_slice()).unwrap();
        assert_eq!(back.eval(&[0.5], 0.5), f.eval(&[0.5], 0.5));
    }

    #[test]
    fn sampled_rejects_bad_input() {
        assert!(read_sampled("x1,t,value\n1,1,2\n-1,1,2\n".as_bytes()).is_err());
        assert!(read_sampled("x,t,value\n-1,1,2\n1,1,2\n".as_bytes()).is_err());
        assert!(read_sampled("x1,t,value\n-1,0,1\n-1,1,2\n1,0,0\n1,1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn report_csv_columns() {
        let mut r = Report::new("demo");
        r.push(
            Entry::new("c", Relation::Abs, 0.5, 0.5, 0.0)
                .with("z", 1.0)
                .with("a", "x"),
        );
        let mut buf = Vec::new();
        write_report(&[r], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "check,param_json,measured,reference,tol,pass");
        let row = lines.next().unwrap();
        assert!(
            row.starts_with(r#"c,"{""a"":""x"",""relation"":""abs"",""suite"":""demo"",""z"":1.0}""#),
            "{row}"
        );
        assert!(row.ends_with(",true"));
    }

    #[test]
    fn config_lines() {
        let c = parse_config("# run\nalpha = 0.5\n--lambda=0.25 # trailing\n\n").unwrap();
        assert_eq!(
            c,
            vec![("alpha".into(), "0.5".into()), ("lambda".into(), "0.25".into())]
        );
        assert!(parse_config("oops").is_err());
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let mut t = Table::new(&["x", "a", "b"]);
        t.push(vec![0.0, 1.0, 2.0]);
        t.push(vec![1.0, 0.5, f64::INFINITY]);
        let s = t.to_svg();
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.starts_with("<svg"));
    }
}
