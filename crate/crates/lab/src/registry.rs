use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_rational::Ratio;
use strichartz::{Exp, Exponent, Thresholds};

use crate::error::{LabError, Result};
use crate::experiments;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v:e}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Exp> for Cell {
    fn from(v: Exp) -> Self {
        Cell::Text(v.to_string())
    }
}

pub type Row = Vec<Cell>;

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    /// TOML array literal.
    pub default: &'static str,
    pub help: &'static str,
}

/// One point of the sweep.
#[derive(Debug, Clone)]
pub struct Point {
    pub index: usize,
    pub values: BTreeMap<String, toml::Value>,
}

impl Point {
    fn raw(&self, name: &str) -> &toml::Value {
        self.values.get(name).unwrap_or_else(|| panic!("parameter `{name}` missing from the schema"))
    }

    pub fn f64(&self, name: &str) -> Result<f64> {
        match self.raw(name) {
            toml::Value::Integer(i) => Ok(*i as f64),
            toml::Value::Float(x) => Ok(*x),
            v => Err(LabError::bad(name, format!("expected a number, got {v}"))),
        }
    }

    pub fn usize(&self, name: &str) -> Result<usize> {
        match self.raw(name) {
            toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
            v => Err(LabError::bad(name, format!("expected a non-negative integer, got {v}"))),
        }
    }

    pub fn int(&self, name: &str) -> Result<i64> {
        match self.raw(name) {
            toml::Value::Integer(i) => Ok(*i),
            v => Err(LabError::bad(name, format!("expected an integer, got {v}"))),
        }
    }

    pub fn text(&self, name: &str) -> Result<String> {
        match self.raw(name) {
            toml::Value::String(s) => Ok(s.clone()),
            toml::Value::Integer(i) => Ok(i.to_string()),
            toml::Value::Float(x) => Ok(x.to_string()),
            v => Err(LabError::bad(name, format!("expected a string, got {v}"))),
        }
    }

    /// A rational exponent: "inf", an integer, a fraction "16/5" or a decimal.
    pub fn exponent(&self, name: &str) -> Result<Exponent<Ratio<i64>>> {
        parse_exponent(&self.text(name)?).map_err(|m| LabError::bad(name, m))
    }

    /// A triple "q:r:r̃" of rational exponents.
    pub fn triple(&self, name: &str) -> Result<[Exponent<Ratio<i64>>; 3]> {
        let text = self.text(name)?;
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(LabError::bad(name, format!("expected q:r:r̃, got `{text}`")));
        }
        let mut out = [Exponent::Infinite, Exponent::Infinite, Exponent::Infinite];
        for (dst, p) in out.iter_mut().zip(parts) {
            *dst = parse_exponent(p).map_err(|m| LabError::bad(name, m))?;
        }
        Ok(out)
    }
}

pub fn parse_exponent(s: &str) -> std::result::Result<Exponent<Ratio<i64>>, String> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") {
        return Ok(Exponent::Infinite);
    }
    let bad = || format!("cannot read `{s}` as an exponent");
    let value = if let Some((a, b)) = s.split_once('/') {
        let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if b == 0 {
            return Err(bad());
        }
        Ratio::new(a, b)
    } else if let Some((int, frac)) = s.split_once('.') {
        let den = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let whole: i64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
        Ratio::new(whole, den)
    } else {
        Ratio::from_integer(s.parse().map_err(|_| bad())?)
    };
    if value <= Ratio::from_integer(0) {
        return Err(format!("exponent `{s}` must be positive"));
    }
    Ok(Exponent::Finite(value))
}

/// Everything a sweep point needs besides its parameters.
pub struct Context<'a> {
    pub seed: u64,
    pub output: &'a Path,
    pub thresholds: &'a Thresholds,
}

impl Context<'_> {
    /// Path for an extra artifact of sweep point `index`.
    pub fn sidecar(&self, index: usize, suffix: &str) -> std::path::PathBuf {
        let stem = self.output.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
        self.output.with_file_name(format!("{stem}.p{index}.{suffix}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }

    /// Conjunction of several named checks.
    pub fn all(parts: Vec<Verdict>) -> Self {
        if parts.is_empty() {
            return Verdict::new(true, "no checks apply");
        }
        let pass = parts.iter().all(|v| v.pass);
        let detail = parts.into_iter().map(|v| v.detail).collect::<Vec<_>>().join("; ");
        Verdict::new(pass, detail)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn col(&self, name: &str) -> usize {
        self.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column `{name}`"))
    }

    pub fn f64(&self, row: &Row, name: &str) -> Option<f64> {
        match &row[self.col(name)] {
            Cell::Float(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn text(&self, row: &Row, name: &str) -> String {
        row[self.col(name)].to_string()
    }

    /// Rows grouped by the rendered `keys` columns, in first-seen order.
    pub fn groups(&self, keys: &[&str]) -> Vec<(String, Vec<&Row>)> {
        let mut out: Vec<(String, Vec<&Row>)> = Vec::new();
        for row in &self.rows {
            let key = keys.iter().map(|k| format!("{k}={}", self.text(row, k))).collect::<Vec<_>>().join(" ");
            match out.iter_mut().find(|(k, _)| *k == key) {
                Some((_, rows)) => rows.push(row),
                None => out.push((key, vec![row])),
            }
        }
        out
    }

    /// Per group, `value` ordered by the numeric column `by`.
    pub fn series(&self, keys: &[&str], by: &str, value: &str) -> Vec<(String, Vec<f64>)> {
        self.groups(keys)
            .into_iter()
            .map(|(k, rows)| {
                let mut pts: Vec<(f64, f64)> =
                    rows.iter().filter_map(|r| Some((self.f64(r, by)?, self.f64(r, value)?))).collect();
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                (k, pts.into_iter().map(|p| p.1).collect())
            })
            .collect()
    }
}

pub type RunFn = fn(&Point, &Context<'_>) -> Result<Vec<Row>>;
pub type VerdictFn = fn(&Table, &Thresholds) -> Verdict;

pub struct Experiment {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [ParamSpec],
    pub columns: &'static [&'static str],
    pub run: RunFn,
    pub verdict: VerdictFn,
}

impl fmt::Debug for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Experiment").field("name", &self.name).finish()
    }
}

impl Experiment {
    pub fn defaults(&self) -> BTreeMap<String, Vec<toml::Value>> {
        self.params
            .iter()
            .map(|p| {
                let parsed: toml::Table = toml::from_str(&format!("v = {}", p.default)).expect("default literal parses");
                let values = parsed["v"].as_array().expect("default is an array").clone();
                (p.name.to_string(), values)
            })
            .collect()
    }
}

pub fn registry() -> &'static [Experiment] {
    experiments::ALL
}

pub fn lookup(name: &str) -> Result<&'static Experiment> {
    registry().iter().find(|e| e.name == name).ok_or_else(|| LabError::UnknownExperiment {
        name: name.to_string(),
        valid: registry().iter().map(|e| e.name.to_string()).collect(),
    })
}
