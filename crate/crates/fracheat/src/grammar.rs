//! Text syntax for fields, as accepted by `--field`:
//!
//! ```text
//! exact(alpha=A,lambda=L)              mollified(alpha=A,lambda=L,delta=D)
//! tilted(alpha=A,lambda=L,N=N,K=K[,n=1])
//! paraboloid(n=N,p=P,gamma=G)          backward(n=N,p=P,gamma=G,t0=T0,T=T1)
//! indsim(n=N,alpha=A,lambda=L)
//! blowup_small(n,p,lambda,alpha,q,J)   blowup_large(n,p,lambda,alpha,J)
//! sum(F1;F2;...)                       rescale(F,K=K,T=T[,lambda=L,alpha=A])
//! sampled(path.csv)                    zero
//! slab(t0=A,t1=B[,value=V])            cylinder(r=R,t0=A,t1=B[,value=V])
//! bump(profile=gaussian|compact[,radius=R],t0=A,t1=B,ramp=H)
//! ```
//!
//! Blow-up arguments may be positional (in the order shown) or `key=value`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use fracheat_core::fields::{
    make_backward_paraboloid, make_blowup_large_time, make_blowup_small_time, make_bump, make_cylinder,
    make_exact_solution, make_indicator_similarity, make_mollified_exact, make_paraboloid_power, make_slab,
    make_tilted_exact, rescale, BumpProfile, Field,
};
use fracheat_core::QuadratureSpec;

use crate::io::read_sampled_csv;

#[derive(Debug)]
pub enum ParseError {
    Syntax(String),
    Field(fracheat_core::Error),
    Io(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax(m) => write!(f, "field syntax: {m}"),
            ParseError::Field(e) => write!(f, "field parameters: {e}"),
            ParseError::Io(m) => write!(f, "sampled field: {m}"),
        }
    }
}

impl std::error::Error for ParseError {}

impl From<fracheat_core::Error> for ParseError {
    fn from(e: fracheat_core::Error) -> Self {
        ParseError::Field(e)
    }
}

type Res<T> = Result<T, ParseError>;

fn syntax(msg: impl Into<String>) -> ParseError {
    ParseError::Syntax(msg.into())
}

/// Context for parsing: relative `sampled(...)` paths resolve against
/// `base_dir`; blow-up searches use `quad`.
#[derive(Debug, Clone, Default)]
pub struct ParseContext {
    pub base_dir: Option<PathBuf>,
    pub quad: QuadratureSpec,
}

/// Splits at `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Res<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(syntax(format!("unbalanced ')' in '{s}'")));
                }
            }
            c if c == sep && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(syntax(format!("unbalanced '(' in '{s}'")));
    }
    out.push(s[start..].trim());
    Ok(out)
}

/// `name(args)` or a bare `name`.
fn head(s: &str) -> Res<(&str, Option<&str>)> {
    let s = s.trim();
    match s.find('(') {
        None => Ok((s, None)),
        Some(i) => {
            if !s.ends_with(')') {
                return Err(syntax(format!("expected ')' at the end of '{s}'")));
            }
            Ok((s[..i].trim(), Some(&s[i + 1..s.len() - 1])))
        }
    }
}

struct Args<'a> {
    name: &'a str,
    positional: Vec<&'a str>,
    named: BTreeMap<&'a str, &'a str>,
}

impl<'a> Args<'a> {
    fn parse(name: &'a str, body: &'a str) -> Res<Self> {
        let mut positional = Vec::new();
        let mut named = BTreeMap::new();
        if body.trim().is_empty() {
            return Ok(Args {
                name,
                positional,
                named,
            });
        }
        for part in split_top(body, ',')? {
            match part.split_once('=') {
                Some((k, v)) if !k.contains('(') => {
                    if named.insert(k.trim(), v.trim()).is_some() {
                        return Err(syntax(format!("{name}: duplicate argument '{}'", k.trim())));
                    }
                }
                _ => positional.push(part),
            }
        }
        Ok(Args {
            name,
            positional,
            named,
        })
    }

    fn num(&self, key: &str) -> Res<f64> {
        self.opt_num(key)?
            .ok_or_else(|| syntax(format!("{}: missing argument '{key}'", self.name)))
    }

    fn opt_num(&self, key: &str) -> Res<Option<f64>> {
        self.named
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| syntax(format!("{}: '{key}={v}' is not a number", self.name)))
            })
            .transpose()
    }

    fn int(&self, key: &str) -> Res<usize> {
        let v = self.num(key)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(syntax(format!("{}: '{key}' must be a nonnegative integer", self.name)));
        }
        Ok(v as usize)
    }

    fn opt_int(&self, key: &str, default: usize) -> Res<usize> {
        if self.named.contains_key(key) {
            self.int(key)
        } else {
            Ok(default)
        }
    }

    /// Binds positional arguments to `keys` in order.
    fn bind_positional(&mut self, keys: &[&'a str]) -> Res<()> {
        if self.positional.len() > keys.len() {
            return Err(syntax(format!(
                "{}: expected at most {} arguments ({})",
                self.name,
                keys.len(),
                keys.join(",")
            )));
        }
        for (k, v) in keys.iter().zip(std::mem::take(&mut self.positional)) {
            if self.named.insert(k, v).is_some() {
                return Err(syntax(format!("{}: '{k}' given twice", self.name)));
            }
        }
        Ok(())
    }

    fn only(&self, keys: &[&str]) -> Res<()> {
        if let Some(p) = self.positional.first() {
            return Err(syntax(format!("{}: unexpected positional argument '{p}'", self.name)));
        }
        for k in self.named.keys() {
            if !keys.contains(k) {
                return Err(syntax(format!(
                    "{}: unknown argument '{k}' (expected {})",
                    self.name,
                    keys.join(", ")
                )));
            }
        }
        Ok(())
    }
}

/// `(λ, α)` carried by a field, when it has them.
fn lambda_alpha(f: &Field) -> Option<(f64, f64)> {
    match f {
        Field::ExactSolution { alpha, lambda, .. }
        | Field::MollifiedExact { alpha, lambda, .. }
        | Field::TiltedExact { alpha, lambda, .. }
        | Field::IndicatorSimilarity { alpha, lambda, .. } => Some((*lambda, *alpha)),
        Field::Rescaled { lambda, alpha, .. } => Some((*lambda, *alpha)),
        _ => None,
    }
}

pub fn parse_field(spec: &str, ctx: &ParseContext) -> Res<Field> {
    let (name, body) = head(spec)?;
    let body = body.unwrap_or("");
    if name == "sum" {
        let parts = split_top(body, ';')?;
        if parts.iter().any(|p| p.is_empty()) {
            return Err(syntax("sum: empty term"));
        }
        return Ok(Field::sum(
            parts.into_iter().map(|p| parse_field(p, ctx)).collect::<Res<_>>()?,
        ));
    }
    if name == "sampled" {
        let path = body.trim();
        if path.is_empty() {
            return Err(syntax("sampled: missing path"));
        }
        let p = Path::new(path);
        let full = match (&ctx.base_dir, p.is_relative()) {
            (Some(dir), true) => dir.join(p),
            _ => p.to_path_buf(),
        };
        return read_sampled_csv(&full).map_err(|e| ParseError::Io(format!("{}: {e}", full.display())));
    }
    let mut a = Args::parse(name, body)?;
    let f = match name {
        "zero" => {
            a.only(&[])?;
            Field::Zero
        }
        "exact" => {
            a.only(&["alpha", "lambda"])?;
            make_exact_solution(a.num("alpha")?, a.num("lambda")?)?
        }
        "mollified" => {
            a.only(&["alpha", "lambda", "delta"])?;
            make_mollified_exact(a.num("alpha")?, a.num("lambda")?, a.num("delta")?)?
        }
        "tilted" => {
            a.only(&["alpha", "lambda", "N", "K", "n"])?;
            make_tilted_exact(
                a.opt_int("n", 1)?,
                a.num("alpha")?,
                a.num("lambda")?,
                a.num("N")?,
                a.num("K")?,
            )?
        }
        "paraboloid" => {
            a.only(&["n", "p", "gamma"])?;
            make_paraboloid_power(a.int("n")?, a.num("p")?, a.num("gamma")?)?
        }
        "backward" => {
            a.only(&["n", "p", "gamma", "t0", "T"])?;
            make_backward_paraboloid(a.int("n")?, a.num("p")?, a.num("gamma")?, a.num("t0")?, a.num("T")?)?
        }
        "indsim" => {
            a.only(&["n", "alpha", "lambda"])?;
            make_indicator_similarity(a.int("n")?, a.num("alpha")?, a.num("lambda")?)?
        }
        "blowup_small" => {
            let keys = ["n", "p", "lambda", "alpha", "q", "J"];
            a.bind_positional(&keys)?;
            a.only(&keys)?;
            make_blowup_small_time(
                a.int("n")?,
                a.num("p")?,
                a.num("lambda")?,
                a.num("alpha")?,
                a.num("q")?,
                a.int("J")?,
                &ctx.quad,
            )?
            .field()
        }
        "blowup_large" => {
            let keys = ["n", "p", "lambda", "alpha", "J"];
            a.bind_positional(&keys)?;
            a.only(&keys)?;
            make_blowup_large_time(a.int("n")?, a.num("p")?, a.num("lambda")?, a.num("alpha")?, a.int("J")?)?.field()
        }
        "rescale" => {
            if a.positional.len() != 1 {
                return Err(syntax("rescale: expected exactly one field argument"));
            }
            let child = parse_field(a.positional[0], ctx)?;
            a.positional.clear();
            a.only(&["K", "T", "lambda", "alpha"])?;
            let (lambda, alpha) = match (a.opt_num("lambda")?, a.opt_num("alpha")?, lambda_alpha(&child)) {
                (Some(l), Some(al), _) => (l, al),
                (None, None, Some(la)) => la,
                _ => return Err(syntax("rescale: give both lambda= and alpha= for this field")),
            };
            rescale(child, a.num("K")?, lambda, alpha, a.num("T")?)?
        }
        "slab" => {
            a.only(&["t0", "t1", "value"])?;
            make_slab(a.num("t0")?, a.num("t1")?, a.opt_num("value")?.unwrap_or(1.0))?
        }
        "cylinder" => {
            a.only(&["r", "t0", "t1", "value"])?;
            make_cylinder(
                a.num("r")?,
                a.num("t0")?,
                a.num("t1")?,
                a.opt_num("value")?.unwrap_or(1.0),
            )?
        }
        "bump" => {
            let profile = match a.named.remove("profile") {
                None | Some("gaussian") => BumpProfile::Gaussian,
                Some("compact") => BumpProfile::Compact {
                    radius: a.opt_num("radius")?.unwrap_or(1.0),
                },
                Some(other) => return Err(syntax(format!("bump: unknown profile '{other}'"))),
            };
            a.only(&["radius", "t0", "t1", "ramp"])?;
            make_bump(profile, a.num("t0")?, a.num("t1")?, a.num("ramp")?)?
        }
        other => return Err(syntax(format!("unknown field '{other}'"))),
    };
    Ok(f)
}
