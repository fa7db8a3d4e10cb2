//! Single-computation subcommands and the run driver shared with suites.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use calvs_core::bounds::{coverage_bound, lw_compression_bound, query_upper_term};
use calvs_core::cal::{run_cal, CalOptions};
use calvs_core::coefficients::{geometric_grid, quantile_bound_n, theta, ThetaMode};
use calvs_core::compression::nhat_replicates;
use calvs_core::dist::{MassMode, McOptions};
use calvs_core::geometry::VersionSpace;
use calvs_core::quantile::{empirical_quantile, run_replicates};
use calvs_core::Error as CoreError;

use crate::config::ExperimentConfig;
use crate::error::{ExpError, Result};
use crate::output::{Cell, Table, BOUNDS_HEADER, M_SERIES_HEADER, NHAT_HEADER, R_SERIES_HEADER, TRACE_HEADER};
use crate::suites;
use crate::summary::{Outcome, SuiteSummary};

/// Samples per Monte Carlo region mass when a class has no exact one.
const MC_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    RunCal,
    NhatQuantile,
    Theta,
    DeltaVsQuantile,
    NQuantile,
    BoundsEval,
    Suite(String),
}

impl Command {
    pub fn label(&self) -> &str {
        match self {
            Command::RunCal => "run-cal",
            Command::NhatQuantile => "nhat-quantile",
            Command::Theta => "theta",
            Command::DeltaVsQuantile => "deltavs-quantile",
            Command::NQuantile => "n-quantile",
            Command::BoundsEval => "bounds-eval",
            Command::Suite(name) => name,
        }
    }
}

/// The result of one invocation, before anything is written.
#[derive(Debug, Clone)]
pub struct Report {
    pub summary: SuiteSummary,
    pub tables: Vec<Table>,
}

impl Report {
    /// Writes every table and `summary.json` under `dir/<label>`, returning that directory.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let dir = dir.join(&self.summary.suite);
        fs::create_dir_all(&dir).map_err(|source| ExpError::Io { path: dir.clone(), source })?;
        for t in &self.tables {
            t.write(&dir)?;
        }
        self.summary.write(&dir)?;
        Ok(dir)
    }
}

/// Runs `cmd` on a worker pool of `cfg.workers` threads.
pub fn execute(cmd: &Command, cfg: &ExperimentConfig) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    let start = Instant::now();
    let mut out = Outcome::default();
    pool.install(|| dispatch(cmd, cfg, &mut out))?;
    Ok(Report {
        summary: out.summary(cmd.label(), start.elapsed().as_secs_f64()),
        tables: std::mem::take(&mut out.tables),
    })
}

fn dispatch(cmd: &Command, cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    match cmd {
        Command::RunCal => run_cal_cmd(cfg, out),
        Command::NhatQuantile => nhat_quantile(cfg, out),
        Command::Theta => theta_cmd(cfg, out),
        Command::DeltaVsQuantile => deltavs_quantile(cfg, out),
        Command::NQuantile => n_quantile(cfg, out),
        Command::BoundsEval => bounds_eval(cfg, out),
        Command::Suite(name) => suites::find(name)
            .ok_or_else(|| ExpError::Config(format!("unknown suite `{name}`")))?
            .run(cfg, out),
    }
}

fn sizes(cfg: &ExperimentConfig) -> Result<&[usize]> {
    if cfg.m.is_empty() || cfg.m.contains(&0) {
        return Err(ExpError::Config("key `m` must be a nonempty list of positive sizes".into()));
    }
    Ok(&cfg.m)
}

fn run_cal_cmd(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let horizon = *sizes(cfg)?.iter().max().unwrap();
    for c in cfg.resolved()? {
        let traces = run_replicates(cfg.replicates, |r| {
            run_cal(
                &c.class,
                &c.dist,
                &c.target,
                &calvs_core::dist::RngStream::new(cfg.master_seed, r),
                CalOptions::horizon(horizon).with_snapshots(),
            )
        })?;
        let mut table = Table::new(format!("trace_{}.csv", c.name), TRACE_HEADER);
        for (r, t) in traces.iter().enumerate() {
            let snaps = t.snapshots.as_deref().unwrap_or(&[]);
            for st in &t.steps {
                let snap = snaps.iter().find(|s| s.m == st.m);
                table.push(vec![
                    r.into(),
                    st.m.into(),
                    st.queried.into(),
                    st.cumulative_n.into(),
                    snap.map(|s| s.nhat).into(),
                    snap.and_then(|s| s.delta_vs).into(),
                ]);
            }
        }
        out.tables.push(table);
        out.replicates.insert(c.name.clone(), cfg.replicates);
    }
    Ok(())
}

fn nhat_quantile(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    for c in cfg.resolved()? {
        let mut rows_t = Table::new(format!("nhat_{}.csv", c.name), NHAT_HEADER);
        let mut series = Table::new(format!("nhat_quantile_{}.csv", c.name), M_SERIES_HEADER);
        for &m in sizes(cfg)? {
            let rows = nhat_replicates(&c.class, &c.dist, &c.target, m, cfg.replicates, cfg.master_seed, None)?;
            for r in &rows {
                rows_t.push(vec![r.replicate.into(), r.m.into(), r.nhat.into(), r.certified.into(), r.excluded.into()]);
            }
            let vals: Vec<f64> = rows.iter().map(|r| r.nhat as f64).collect();
            let q = empirical_quantile(&vals, cfg.delta, m)?;
            series.push(vec![m.into(), q.value.into(), "order_statistic".into()]);
        }
        out.tables.push(rows_t);
        out.tables.push(series);
        out.replicates.insert(c.name.clone(), cfg.replicates * cfg.m.len());
    }
    Ok(())
}

fn deltavs_quantile(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    for c in cfg.resolved()? {
        let mut series = Table::new(format!("deltavs_quantile_{}.csv", c.name), M_SERIES_HEADER);
        for &m in sizes(cfg)? {
            let vals = run_replicates(cfg.replicates, |r| {
                let s = calvs_core::dist::LabeledStream::new(
                    &c.dist,
                    &c.target,
                    &calvs_core::dist::NoiseModel::Realizable,
                    &calvs_core::dist::RngStream::new(cfg.master_seed, r),
                )?
                .take(m);
                let v = VersionSpace::new(c.class.clone(), &s)?;
                match calvs_core::geometry::dis_region_mass(&v, &c.dist, MassMode::Exact) {
                    Ok(e) => Ok((e.value, "exact")),
                    Err(CoreError::UseMonteCarlo(_)) => {
                        let mode = MassMode::MonteCarlo(McOptions::new(MC_SAMPLES, cfg.master_seed ^ r));
                        Ok((calvs_core::geometry::dis_region_mass(&v, &c.dist, mode)?.value, "monte_carlo"))
                    }
                    Err(e) => Err(e),
                }
            })?;
            let mode = vals.first().map_or("exact", |v| v.1);
            let q = empirical_quantile(&vals.iter().map(|v| v.0).collect::<Vec<_>>(), cfg.delta, m)?;
            series.push(vec![m.into(), q.value.into(), mode.into()]);
        }
        out.tables.push(series);
        out.replicates.insert(c.name.clone(), cfg.replicates * cfg.m.len());
    }
    Ok(())
}

fn n_quantile(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    for c in cfg.resolved()? {
        let mut series = Table::new(format!("n_quantile_{}.csv", c.name), M_SERIES_HEADER);
        for &m in sizes(cfg)? {
            let q = quantile_bound_n(&c.class, &c.dist, &c.target, m, cfg.delta, cfg.replicates, cfg.master_seed)?;
            series.push(vec![m.into(), q.value.into(), "order_statistic".into()]);
        }
        out.tables.push(series);
        out.replicates.insert(c.name.clone(), cfg.replicates * cfg.m.len());
    }
    Ok(())
}

fn theta_cmd(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    if cfg.r0.is_empty() {
        return Err(ExpError::Config("key `r0` is empty".into()));
    }
    for c in cfg.resolved()? {
        let mut values = Table::new(format!("theta_{}.csv", c.name), R_SERIES_HEADER);
        for (i, &r0) in cfg.r0.iter().enumerate() {
            let grid = if cfg.r_grid.is_empty() { geometric_grid(r0) } else { cfg.r_grid.clone() };
            let est = match theta(&c.target, &c.dist, r0, &c.class, &grid, MassMode::Exact) {
                Err(CoreError::UseMonteCarlo(_)) => {
                    let mode = MassMode::MonteCarlo(McOptions::new(MC_SAMPLES, cfg.master_seed));
                    theta(&c.target, &c.dist, r0, &c.class, &grid, mode)?
                }
                r => r?,
            };
            values.push(vec![r0.into(), est.value.into(), est.mode.as_str().into()]);
            let mut g = Table::new(format!("theta_grid_{}_{i}.csv", c.name), R_SERIES_HEADER);
            for &(r, mass) in &est.grid {
                g.push(vec![r.into(), mass.into(), est.mode.as_str().into()]);
            }
            out.tables.push(g);
            if est.mode == ThetaMode::LowerEstimate {
                out.value(format!("{}.theta_lower_estimate[{r0}]", c.name), est.value);
            }
        }
        out.tables.push(values);
    }
    Ok(())
}

/// Closed-form bounds at every `(m, n)` with `n` from `n_grid` and `n < m`.
fn bounds_eval(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let mut t = Table::new("bounds.csv", BOUNDS_HEADER);
    for &m in sizes(cfg)? {
        for &n in cfg.n_grid.iter().filter(|&&n| n < m) {
            t.push(vec![
                m.into(),
                n.into(),
                lw_compression_bound(n, m, cfg.delta)?.value.into(),
                coverage_bound(n, m, cfg.delta)?.value.into(),
                Cell::Float(query_upper_term(n, m, m, cfg.delta)?),
            ]);
        }
    }
    out.tables.push(t);
    Ok(())
}
