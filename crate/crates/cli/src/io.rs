//! Snapshot files.
//!
//! CSV files have a header row, `,` separators, LF line endings and every
//! number in `{:.16e}` form, so values survive a round trip bit for bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use m2ch_core::{Atom, Diagnostics, EulerianTriple, LagrangianState, XiGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const LAGRANGIAN_COLUMNS: [&str; 10] = ["xi", "y", "U", "Gamma", "R", "H", "nu", "beta", "kappa", "delta"];
pub const EULERIAN_COLUMNS: [&str; 4] = ["x", "u", "gamma", "mu_density"];
pub const DIAGNOSTIC_COLUMNS: [&str; 6] = ["t", "total_energy", "min_nu", "res_218", "res_219", "breaking_flag"];
pub const JSONL_NAME: &str = "snapshots.jsonl";

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn lagrangian_name(k: usize) -> String {
    format!("lagrangian_{k:05}.csv")
}

pub fn eulerian_name(k: usize) -> String {
    format!("eulerian_{k:05}.csv")
}

/// Column-major numeric table with named columns.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str], data: Vec<Vec<f64>>) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), data }
    }

    pub fn rows(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().position(|c| c == name).map(|i| self.data[i].as_slice())
    }

    pub fn require(&self, name: &str, origin: &Path) -> Result<&[f64], CliError> {
        self.column(name)
            .ok_or_else(|| CliError::Config(format!("{}: missing column {name}", origin.display())))
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(BufWriter::new(file));
        let fail = |e: csv::Error| CliError::io(path, e);
        w.write_record(&self.columns).map_err(fail)?;
        for i in 0..self.rows() {
            w.write_record(self.data.iter().map(|c| num(c[i]))).map_err(fail)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self, CliError> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| CliError::io(path, e))?;
        let columns: Vec<String> =
            r.headers().map_err(|e| CliError::io(path, e))?.iter().map(str::to_string).collect();
        let mut data = vec![Vec::new(); columns.len()];
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| CliError::io(path, e))?;
            for (col, field) in data.iter_mut().zip(rec.iter()) {
                let v = field.parse::<f64>().map_err(|_| {
                    CliError::Config(format!("{}: row {}: not a number: {field:?}", path.display(), line + 1))
                })?;
                col.push(v);
            }
        }
        Ok(Self { columns, data })
    }
}

pub fn lagrangian_table(x: &LagrangianState) -> Table {
    let mut data = vec![x.grid.points(), x.y()];
    data.extend(x.fields()[1..].iter().map(|f| f.to_vec()));
    Table::new(&LAGRANGIAN_COLUMNS, data)
}

pub fn eulerian_table(e: &EulerianTriple) -> Table {
    Table::new(&EULERIAN_COLUMNS, vec![e.xgrid.points(), e.u.clone(), e.gamma.clone(), e.mu.density.clone()])
}

pub fn diagnostics_table(d: &[Diagnostics]) -> Table {
    let col = |f: fn(&Diagnostics) -> f64| d.iter().map(f).collect();
    Table::new(
        &DIAGNOSTIC_COLUMNS,
        vec![
            col(|d| d.t),
            col(|d| d.total_energy),
            col(|d| d.min_nu),
            col(|d| d.res_218),
            col(|d| d.res_219),
            col(|d| if d.breaking { 1.0 } else { 0.0 }),
        ],
    )
}

pub fn atoms_table(times: &[f64], atoms: &[Vec<Atom>]) -> Table {
    let mut data = vec![Vec::new(), Vec::new(), Vec::new()];
    for (t, list) in times.iter().zip(atoms) {
        for a in list {
            data[0].push(*t);
            data[1].push(a.location);
            data[2].push(a.mass);
        }
    }
    Table::new(&["t", "location", "mass"], data)
}

/// Rebuilds a state from a Lagrangian table. The label grid is read off the
/// `xi` column, which has to be uniform.
pub fn lagrangian_from_table(t: &Table, origin: &Path) -> Result<LagrangianState, CliError> {
    let xi = t.require("xi", origin)?;
    let n = xi.len();
    if n < 3 {
        return Err(CliError::Config(format!("{}: need at least 3 rows", origin.display())));
    }
    let h = (xi[n - 1] - xi[0]) / (n - 1) as f64;
    let grid = XiGrid::with_step(xi[0], h, n).map_err(|e| CliError::Config(e.to_string()))?;
    let uneven = xi.iter().enumerate().map(|(i, v)| (v - grid.point(i)).abs()).fold(0.0, f64::max);
    if uneven > 1e-9 * (1.0 + xi[0].abs().max(xi[n - 1].abs())) {
        return Err(CliError::Config(format!("{}: xi column is not uniform", origin.display())));
    }
    let mut x = LagrangianState::zeros(grid);
    let y = t.require("y", origin)?;
    x.zeta = y.iter().zip(xi).map(|(y, s)| y - s).collect();
    for (dst, name) in x.fields_mut().into_iter().skip(1).zip(&LAGRANGIAN_COLUMNS[2..]) {
        *dst = t.require(name, origin)?.to_vec();
    }
    x.validate().map_err(|e| CliError::Config(format!("{}: {e}", origin.display())))?;
    Ok(x)
}

/// One line of `snapshots.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub index: usize,
    pub t: f64,
    pub lagrangian: Table,
    pub eulerian: Table,
    pub atoms: Vec<[f64; 2]>,
    pub total_energy: f64,
    pub min_nu: f64,
    pub res_218: f64,
    pub res_219: f64,
    pub breaking_flag: bool,
}

pub fn write_jsonl(path: &Path, records: &[SnapshotRecord]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| CliError::io(path, e))?;
        w.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_jsonl(path: &Path) -> Result<Vec<SnapshotRecord>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| CliError::Config(format!("{}: line {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

/// Snapshots of a finished run, as read back from its output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunData {
    pub times: Vec<f64>,
    pub lagrangian: Vec<Table>,
    pub eulerian: Vec<Table>,
}

fn numbered(dir: &Path, prefix: &str) -> Result<Vec<PathBuf>, CliError> {
    let mut found: Vec<(usize, PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let name = path.file_name().and_then(|s| s.to_str()).unwrap_or_default();
        if let Some(k) = name.strip_prefix(prefix).and_then(|s| s.strip_suffix(".csv")).and_then(|s| s.parse().ok()) {
            found.push((k, path));
        }
    }
    found.sort();
    Ok(found.into_iter().map(|(_, p)| p).collect())
}

impl RunData {
    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let jsonl = dir.join(JSONL_NAME);
        if jsonl.exists() {
            let recs = read_jsonl(&jsonl)?;
            return Ok(Self {
                times: recs.iter().map(|r| r.t).collect(),
                lagrangian: recs.iter().map(|r| r.lagrangian.clone()).collect(),
                eulerian: recs.into_iter().map(|r| r.eulerian).collect(),
            });
        }
        let diag_path = dir.join("diagnostics.csv");
        let diag = Table::read_csv(&diag_path)?;
        let times = diag.require("t", &diag_path)?.to_vec();
        let read_all = |prefix: &str| -> Result<Vec<Table>, CliError> {
            numbered(dir, prefix)?.iter().map(|p| Table::read_csv(p)).collect()
        };
        let lagrangian = read_all("lagrangian_")?;
        let eulerian = read_all("eulerian_")?;
        if lagrangian.len() != times.len() || eulerian.len() != times.len() {
            return Err(CliError::Config(format!(
                "{}: {} diagnostics rows but {} Lagrangian and {} Eulerian snapshots",
                dir.display(),
                times.len(),
                lagrangian.len(),
                eulerian.len()
            )));
        }
        Ok(Self { times, lagrangian, eulerian })
    }
}
