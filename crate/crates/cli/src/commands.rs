use std::path::{Path, PathBuf};

use m2ch_core::metric::LipschitzRow;
use m2ch_core::{
    lipschitz_experiment, solve_cauchy, Atom, BreakingEvent, EnergyMeasure, EulerianProfile, EulerianTriple,
    EvolveOptions, GReport, SampledProfile, XGrid,
};

use crate::config::{Format, RunConfig, ScenarioConfig};
use crate::error::CliError;
use crate::io::{self, RunData, SnapshotRecord, Table};

/// Reads `x,u,gamma,mu_density` (and `gamma_x` if present) on a uniform grid.
/// Without a `gamma_x` column it is taken from centered differences.
pub fn read_eulerian(path: &Path, atoms: Option<&Path>) -> Result<EulerianTriple, CliError> {
    let t = Table::read_csv(path)?;
    let x = t.require("x", path)?;
    let m = x.len();
    if m < 3 {
        return Err(CliError::Config(format!("{}: need at least 3 rows", path.display())));
    }
    let xgrid = XGrid::new(x[0], x[m - 1], m).map_err(|e| CliError::Config(e.to_string()))?;
    let gamma = t.require("gamma", path)?.to_vec();
    let gamma_x = match t.column("gamma_x") {
        Some(g) => g.to_vec(),
        None => {
            let s = xgrid.step();
            (0..m)
                .map(|i| {
                    let (a, b) = (i.saturating_sub(1), (i + 1).min(m - 1));
                    (gamma[b] - gamma[a]) / ((b - a) as f64 * s)
                })
                .collect()
        }
    };
    let atoms = match atoms {
        Some(p) => {
            let a = Table::read_csv(p)?;
            let (loc, mass) = (a.require("location", p)?, a.require("mass", p)?);
            loc.iter().zip(mass).map(|(&location, &mass)| Atom { location, mass }).collect()
        }
        None => Vec::new(),
    };
    let e = EulerianTriple {
        xgrid,
        u: t.require("u", path)?.to_vec(),
        gamma,
        gamma_x,
        mu: EnergyMeasure { xgrid, density: t.require("mu_density", path)?.to_vec(), atoms },
    };
    e.validate().map_err(|err| CliError::Config(format!("{}: {err}", path.display())))?;
    Ok(e)
}

pub fn initial_profile(cfg: &RunConfig) -> Result<Box<dyn EulerianProfile>, CliError> {
    if let ScenarioConfig::FromFile { path, atoms } = &cfg.scenario {
        let e = read_eulerian(path, atoms.as_deref())?;
        return Ok(Box::new(SampledProfile::new(&e)?));
    }
    let s = cfg.scenario.analytic().expect("analytic scenario");
    Ok(Box::new(s.profile()?))
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub snapshots: usize,
    pub events: Vec<BreakingEvent>,
    /// Largest relative change of the total energy (absolute if it starts at 0).
    pub energy_drift: f64,
    pub max_residual: f64,
    pub warnings: Vec<String>,
}

/// Solves the configured problem and writes its snapshots. Files are written
/// before the tolerances are checked, so a failing run still leaves its data.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let profile = initial_profile(cfg)?;
    let xi = cfg.xi_grid(profile.total_mass())?;
    let xg = cfg.x_grid()?;
    let dir = &cfg.output.directory;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let opts = EvolveOptions::new(cfg.time.t_end, cfg.time.dt, cfg.time.output_steps());
    let sol = match solve_cauchy(profile.as_ref(), xi, xg, &opts) {
        Ok(s) => s,
        Err(m2ch_core::Error::BlowUp { time, snapshot }) => {
            let p = dir.join("blowup_lagrangian.csv");
            io::lagrangian_table(&snapshot).write_csv(&p)?;
            return Err(CliError::Numerical(format!(
                "non-finite values at t = {time}; last finite state written to {}",
                p.display()
            )));
        }
        Err(e) => return Err(e.into()),
    };
    let tr = &sol.trajectory;
    match cfg.output.format {
        Format::Csv => {
            for (k, (x, e)) in tr.states.iter().zip(&sol.eulerian).enumerate() {
                io::lagrangian_table(x).write_csv(&dir.join(io::lagrangian_name(k)))?;
                io::eulerian_table(e).write_csv(&dir.join(io::eulerian_name(k)))?;
            }
            let atoms: Vec<Vec<Atom>> = sol.eulerian.iter().map(|e| e.mu.atoms.clone()).collect();
            io::atoms_table(&tr.times, &atoms).write_csv(&dir.join("atoms.csv"))?;
            io::diagnostics_table(&tr.diagnostics).write_csv(&dir.join("diagnostics.csv"))?;
        }
        Format::Json => {
            let records: Vec<SnapshotRecord> = tr
                .states
                .iter()
                .zip(&sol.eulerian)
                .zip(&tr.diagnostics)
                .enumerate()
                .map(|(index, ((x, e), d))| SnapshotRecord {
                    index,
                    t: d.t,
                    lagrangian: io::lagrangian_table(x),
                    eulerian: io::eulerian_table(e),
                    atoms: e.mu.atoms.iter().map(|a| [a.location, a.mass]).collect(),
                    total_energy: d.total_energy,
                    min_nu: d.min_nu,
                    res_218: d.res_218,
                    res_219: d.res_219,
                    breaking_flag: d.breaking,
                })
                .collect();
            io::write_jsonl(&dir.join(io::JSONL_NAME), &records)?;
        }
    }

    let e0 = tr.diagnostics[0].total_energy;
    let scale = if e0 > 0.0 { e0 } else { 1.0 };
    let energy_drift = tr.diagnostics.iter().map(|d| (d.total_energy - e0).abs() / scale).fold(0.0, f64::max);
    let tol = cfg.tolerances.constraint_tol;
    let mut max_residual: f64 = 0.0;
    let mut bad: Option<(f64, GReport)> = None;
    for (t, x) in tr.times.iter().zip(&tr.states) {
        let g = x.check_g_membership(tol);
        max_residual = max_residual.max(g.res_218).max(g.res_219);
        if bad.is_none() && !g.passes() {
            bad = Some((*t, g));
        }
    }
    if let Some((t, g)) = bad {
        return Err(CliError::Numerical(format!("snapshot at t = {t} fails the invariant-set check: {g:?}")));
    }
    if energy_drift > cfg.tolerances.energy_tol {
        return Err(CliError::Numerical(format!(
            "total energy drifts by {energy_drift:.3e}, above {:.1e}",
            cfg.tolerances.energy_tol
        )));
    }
    Ok(RunSummary {
        snapshots: tr.states.len(),
        events: tr.events.clone(),
        energy_drift,
        max_residual,
        warnings: tr.warnings.clone(),
    })
}

/// One norm of one field at one snapshot time.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffRow {
    pub t: f64,
    pub table: &'static str,
    pub field: String,
    /// `linf`, `l2`, or `E` for the E-norm of the whole Lagrangian state.
    pub norm: &'static str,
    pub ab: f64,
    /// Difference between the second and third run.
    pub bc: Option<f64>,
}

impl DiffRow {
    /// `log2(ab / bc)`.
    pub fn order(&self) -> Option<f64> {
        self.bc.filter(|&bc| bc > 0.0 && self.ab > 0.0).map(|bc| (self.ab / bc).log2())
    }
}

/// Row indices pairing two tables on a common grid: equal grids, or one a
/// 2× refinement of the other with the same ends.
fn common_rows(a: &[f64], b: &[f64]) -> Option<Vec<(usize, usize)>> {
    let (na, nb) = (a.len(), b.len());
    if na < 2 || nb < 2 {
        return None;
    }
    let scale = 1.0 + a[0].abs().max(a[na - 1].abs());
    let same_ends = (a[0] - b[0]).abs() <= 1e-9 * scale && (a[na - 1] - b[nb - 1]).abs() <= 1e-9 * scale;
    if !same_ends {
        return None;
    }
    if na == nb {
        Some((0..na).map(|i| (i, i)).collect())
    } else if nb == 2 * na - 1 {
        Some((0..na).map(|i| (i, 2 * i)).collect())
    } else if na == 2 * nb - 1 {
        Some((0..nb).map(|i| (2 * i, i)).collect())
    } else {
        None
    }
}

fn pick(t: &Table, rows: impl Iterator<Item = usize> + Clone) -> Table {
    Table { columns: t.columns.clone(), data: t.data.iter().map(|c| rows.clone().map(|i| c[i]).collect()).collect() }
}

/// `(field, norm, value)`.
type FieldDiff = (String, &'static str, f64);
/// `(snapshot, table, field, norm, value)`.
type SnapshotDiff = (usize, &'static str, String, &'static str, f64);

fn table_diffs(a: &Table, b: &Table, kind: &'static str, origin: &Path) -> Result<Option<Vec<FieldDiff>>, CliError> {
    let grid_col = if kind == "lagrangian" { "xi" } else { "x" };
    let Some(rows) = common_rows(a.require(grid_col, origin)?, b.require(grid_col, origin)?) else {
        return Ok(None);
    };
    let (a, b) = (pick(a, rows.iter().map(|r| r.0)), pick(b, rows.iter().map(|r| r.1)));
    let g = a.require(grid_col, origin)?;
    let step = (g[g.len() - 1] - g[0]) / (g.len() - 1) as f64;
    let mut out = Vec::new();
    for name in a.columns.iter().filter(|c| *c != grid_col) {
        let (va, vb) = (a.require(name, origin)?, b.require(name, origin)?);
        let d: Vec<f64> = va.iter().zip(vb).map(|(p, q)| p - q).collect();
        out.push((name.clone(), "linf", m2ch_core::quad::linf(&d)));
        out.push((name.clone(), "l2", m2ch_core::quad::l2(&d, step)));
    }
    if kind == "lagrangian" {
        let xa = io::lagrangian_from_table(&a, origin)?;
        let xb = io::lagrangian_from_table(&b, origin)?;
        // grids rebuilt from the same samples are equal up to rounding
        let xb = m2ch_core::LagrangianState { grid: xa.grid, ..xb };
        out.push(("state".into(), "E", xa.e_distance(&xb)?));
    }
    Ok(Some(out))
}

fn pair_diffs(a: &RunData, b: &RunData, origin: &Path) -> Result<Vec<SnapshotDiff>, CliError> {
    if a.times.len() != b.times.len() || a.times.iter().zip(&b.times).any(|(p, q)| (p - q).abs() > 1e-9) {
        return Err(CliError::Config(format!("snapshot times differ: {:?} vs {:?}", a.times, b.times)));
    }
    let mut out = Vec::new();
    for k in 0..a.times.len() {
        for (kind, ta, tb) in [
            ("lagrangian", &a.lagrangian[k], &b.lagrangian[k]),
            ("eulerian", &a.eulerian[k], &b.eulerian[k]),
        ] {
            if let Some(rows) = table_diffs(ta, tb, kind, origin)? {
                out.extend(rows.into_iter().map(|(f, n, v)| (k, kind, f, n, v)));
            }
        }
    }
    Ok(out)
}

/// Differences between runs `A` and `B`, and between `B` and `C` if a third
/// directory is given. Tables whose grids are neither equal nor nested are
/// skipped; it is an error if nothing can be compared.
pub fn compare(dirs: &[PathBuf]) -> Result<Vec<DiffRow>, CliError> {
    if !(2..=3).contains(&dirs.len()) {
        return Err(CliError::Config("compare takes two or three directories".into()));
    }
    let runs: Vec<RunData> = dirs.iter().map(|d| RunData::load(d)).collect::<Result<_, _>>()?;
    let ab = pair_diffs(&runs[0], &runs[1], &dirs[1])?;
    let bc = match runs.get(2) {
        Some(c) => Some(pair_diffs(&runs[1], c, &dirs[2])?),
        None => None,
    };
    if ab.is_empty() {
        return Err(CliError::Config("no snapshot pair has equal or nested grids".into()));
    }
    let rows = ab
        .into_iter()
        .map(|(k, table, field, norm, v)| {
            let other = bc.as_ref().and_then(|list| {
                list.iter().find(|r| r.0 == k && r.1 == table && r.2 == field && r.3 == norm).map(|r| r.4)
            });
            DiffRow { t: runs[0].times[k], table, field, norm, ab: v, bc: other }
        })
        .collect();
    Ok(rows)
}

pub fn format_diffs(rows: &[DiffRow]) -> String {
    let three = rows.iter().any(|r| r.bc.is_some());
    let mut s = String::from(if three { "t,table,field,norm,ab,bc,order\n" } else { "t,table,field,norm,ab\n" });
    for r in rows {
        s += &format!("{},{},{},{},{}", io::num(r.t), r.table, r.field, r.norm, io::num(r.ab));
        if three {
            let opt = |v: Option<f64>| v.map(io::num).unwrap_or_default();
            s += &format!(",{},{}", opt(r.bc), opt(r.order()));
        }
        s.push('\n');
    }
    s
}

/// Invariant-set check of a Lagrangian snapshot file.
pub fn check(path: &Path, tol: f64) -> Result<GReport, CliError> {
    let t = Table::read_csv(path)?;
    let x = io::lagrangian_from_table(&t, path)?;
    Ok(x.check_g_membership(tol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub epsilon: f64,
    pub row: LipschitzRow,
}

/// Distance bounds between the configured data and its perturbations
/// `u + ε x e^{-x²}` along both solutions. Written to `metric.csv`.
pub fn metric(cfg: &RunConfig) -> Result<Vec<MetricRow>, CliError> {
    let s = cfg
        .scenario
        .analytic()
        .ok_or_else(|| CliError::Config("the metric verb needs an analytic scenario".into()))?;
    let base = s.profile()?;
    let mut perturbed = Vec::new();
    let mut mass = base.total_mass();
    for &eps in &cfg.metric.epsilons {
        let p = s.perturbed(eps)?;
        mass = mass.max(p.total_mass());
        perturbed.push((eps, p));
    }
    let grid = cfg.xi_grid(mass)?;
    let m = cfg.energy_bound(&base);
    let mut out = Vec::new();
    for (eps, p) in &perturbed {
        let rows = lipschitz_experiment(&base, p, grid, &cfg.metric.times, cfg.time.dt, m)?;
        out.extend(rows.into_iter().map(|row| MetricRow { epsilon: *eps, row }));
    }
    let dir = &cfg.output.directory;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let col = |f: fn(&MetricRow) -> f64| out.iter().map(f).collect::<Vec<f64>>();
    Table::new(
        &["epsilon", "t", "distance", "ratio"],
        vec![
            col(|r| r.epsilon),
            col(|r| r.row.t),
            col(|r| r.row.distance),
            col(|r| r.row.ratio.unwrap_or(f64::NAN)),
        ],
    )
    .write_csv(&dir.join("metric.csv"))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_rows() {
        let a = [0.0, 1.0, 2.0];
        let b = [0.0, 0.5, 1.0, 1.5, 2.0];
        assert_eq!(common_rows(&a, &b).unwrap(), vec![(0, 0), (1, 2), (2, 4)]);
        assert_eq!(common_rows(&b, &a).unwrap(), vec![(0, 0), (2, 1), (4, 2)]);
        assert_eq!(common_rows(&a, &a).unwrap().len(), 3);
        assert!(common_rows(&a, &[0.0, 0.4, 0.8, 1.2, 1.6, 2.0]).is_none());
        assert!(common_rows(&a, &[0.1, 1.0, 2.0]).is_none());
    }

    #[test]
    fn order_of_halving_errors() {
        let r = DiffRow { t: 0.0, table: "eulerian", field: "u".into(), norm: "linf", ab: 4e-4, bc: Some(1e-4) };
        assert!((r.order().unwrap() - 2.0).abs() < 1e-12);
    }
}
