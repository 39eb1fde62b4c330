//! Structured verification output.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// A parameter value attached to a report entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Num(v)
    }
}

impl From<usize> for Param {
    fn from(v: usize) -> Self {
        Param::Int(v as i64)
    }
}

impl From<u32> for Param {
    fn from(v: u32) -> Self {
        Param::Int(i64::from(v))
    }
}

impl From<&str> for Param {
    fn from(v: &str) -> Self {
        Param::Text(v.to_string())
    }
}

impl From<bool> for Param {
    fn from(v: bool) -> Self {
        Param::Bool(v)
    }
}

/// How `measured` is compared with `reference`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `|measured − reference| ≤ tol`.
    Abs,
    /// `|measured − reference| ≤ tol · |reference|`.
    Rel,
    /// `measured ≤ reference + tol`.
    AtMost,
    /// `measured ≥ reference − tol`.
    AtLeast,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::Abs => "abs",
            Relation::Rel => "rel",
            Relation::AtMost => "at_most",
            Relation::AtLeast => "at_least",
        }
    }

    pub fn holds(self, measured: f64, reference: f64, tol: f64) -> bool {
        if measured.is_nan() || reference.is_nan() {
            return false;
        }
        if measured == reference {
            return true;
        }
        match self {
            Relation::Abs => (measured - reference).abs() <= tol,
            Relation::Rel => (measured - reference).abs() <= tol * reference.abs(),
            Relation::AtMost => measured <= reference + tol,
            Relation::AtLeast => measured >= reference - tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub check: String,
    pub params: Vec<(String, Param)>,
    pub measured: f64,
    pub reference: f64,
    pub tol: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Entry {
    pub fn new(check: &str, relation: Relation, measured: f64, reference: f64, tol: f64) -> Self {
        Entry {
            check: check.to_string(),
            params: Vec::new(),
            measured,
            reference,
            tol,
            relation,
            pass: relation.holds(measured, reference, tol),
        }
    }

    /// A pass/fail fact with no natural numeric comparison (`1` vs `1`).
    pub fn flag(check: &str, ok: bool) -> Self {
        Entry::new(check, Relation::Abs, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    pub fn with(mut self, key: &str, value: impl Into<Param>) -> Self {
        self.params.push((key.to_string(), value.into()));
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub name: String,
    pub entries: Vec<Entry>,
    pub metadata: Vec<(String, Param)>,
}

impl Report {
    pub fn new(name: &str) -> Self {
        Report {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e);
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Param>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    pub fn extend(&mut self, other: Report) {
        self.entries.extend(other.entries);
        self.metadata.extend(other.metadata);
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Relation::Abs.holds(1.0, 1.05, 0.1));
        assert!(!Relation::Rel.holds(1.0, 1.2, 0.1));
        assert!(Relation::AtMost.holds(0.5, 0.4, 0.11));
        assert!(!Relation::AtLeast.holds(0.3, 0.5, 0.1));
        assert!(Relation::Abs.holds(f64::INFINITY, f64::INFINITY, 0.0));
        assert!(!Relation::Abs.holds(f64::NAN, 1.0, 1.0));
        let mut r = Report::new("x");
        r.push(Entry::flag("ok", true));
        assert!(r.passed());
        r.push(Entry::new("bad", Relation::Abs, 2.0, 1.0, 0.5).with("n", 1usize));
        assert_eq!(r.failures().count(), 1);
    }
}
