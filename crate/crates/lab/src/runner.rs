use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::registry::{lookup, Cell, Context, Experiment, Point, Row, Table, Verdict};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Cartesian product of the configured lists, defaults filled in; the first
/// parameter in schema order varies slowest.
pub fn expand(exp: &Experiment, params: &BTreeMap<String, Vec<toml::Value>>) -> Result<Vec<Point>> {
    let mut lists = exp.defaults();
    for (name, values) in params {
        if !lists.contains_key(name) {
            return Err(LabError::UnknownParam {
                experiment: exp.name.to_string(),
                param: name.clone(),
                known: exp.params.iter().map(|p| p.name.to_string()).collect(),
            });
        }
        lists.insert(name.clone(), values.clone());
    }
    let order: Vec<&str> = exp.params.iter().map(|p| p.name).collect();
    for name in &order {
        if lists[*name].is_empty() {
            return Err(LabError::EmptySweep(name.to_string()));
        }
    }
    let mut points = vec![BTreeMap::new()];
    for name in order {
        points = points
            .into_iter()
            .flat_map(|pt: BTreeMap<String, toml::Value>| {
                lists[name].iter().map(move |v| {
                    let mut next = pt.clone();
                    next.insert(name.to_string(), v.clone());
                    next
                })
            })
            .collect();
    }
    Ok(points.into_iter().enumerate().map(|(index, values)| Point { index, values }).collect())
}

#[derive(Debug)]
pub struct Report {
    pub output: PathBuf,
    pub table: Table,
    pub verdict: Verdict,
}

fn csv_line(cells: impl IntoIterator<Item = String>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(cells).map_err(|e| LabError::Config(e.to_string()))?;
    let bytes = w.into_inner().map_err(|e| LabError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 cells"))
}

fn write_all(out: &mut File, path: &Path, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| LabError::io(path, e))
}

/// Runs every sweep point on `workers` threads and writes the CSV in point
/// order. Rows of points finished before a failing point are flushed first.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let exp = lookup(&cfg.experiment)?;
    let points = expand(exp, &cfg.params)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| LabError::Config(e.to_string()))?;
    let ctx = Context { seed: cfg.seed, output: &cfg.output, thresholds: &cfg.thresholds };
    if let Some(dir) = cfg.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    let results: Vec<Result<Vec<Row>>> = pool.install(|| points.par_iter().map(|pt| (exp.run)(pt, &ctx)).collect());

    let path = &cfg.output;
    let mut out = File::create(path).map_err(|e| LabError::io(path, e))?;
    write_all(
        &mut out,
        path,
        &format!(
            "# {} {VERSION}, experiment {}, seed {}, config_hash {}, thresholds v{}\n",
            env!("CARGO_PKG_NAME"),
            exp.name,
            cfg.seed,
            cfg.hash(),
            strichartz::thresholds::THRESHOLDS_VERSION
        ),
    )?;
    write_all(&mut out, path, &csv_line(exp.columns.iter().map(|c| c.to_string()))?)?;
    let mut rows = Vec::new();
    for result in results {
        match result {
            Ok(batch) => {
                for row in batch {
                    debug_assert_eq!(row.len(), exp.columns.len(), "{} row width", exp.name);
                    write_all(&mut out, path, &csv_line(row.iter().map(Cell::to_string))?)?;
                    rows.push(row);
                }
            }
            Err(e) => {
                out.flush().map_err(|e| LabError::io(path, e))?;
                return Err(e);
            }
        }
    }
    let table = Table { columns: exp.columns.iter().map(|c| c.to_string()).collect(), rows };
    let verdict = (exp.verdict)(&table, &cfg.thresholds);
    let mut cells = vec!["verdict".to_string(), if verdict.pass { "pass" } else { "fail" }.to_string(), verdict.detail.clone()];
    cells.resize(exp.columns.len().max(3), String::new());
    write_all(&mut out, path, &csv_line(cells)?)?;
    out.flush().map_err(|e| LabError::io(path, e))?;
    Ok(Report { output: path.clone(), table, verdict })
}
