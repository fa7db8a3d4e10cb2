//! The CAL query process and its label-complexity functionals.

use serde::{Deserialize, Serialize};

use crate::bounds::query_upper_term;
use crate::compression::nhat;
use crate::dist::{Distribution, LabeledStream, MassMode, NoiseModel, RngStream};
use crate::error::{Error, Result};
use crate::geometry::{dis_region_mass, sup_error_in_vs, ConceptClass, Example, Hypothesis, VersionSpace};
use crate::quantile::{check_delta, order_index, run_replicates};

/// Hard cap on stream length per replicate.
pub const STREAM_CAP: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub m: usize,
    pub queried: bool,
    pub cumulative_n: usize,
}

/// State of `VS(S_t)` recorded at a power of two `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub m: usize,
    pub nhat: usize,
    /// `None` when the class has no exact region mass.
    pub delta_vs: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceStatus {
    BudgetReached,
    HorizonReached,
    CapHit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub steps: Vec<TraceStep>,
    pub snapshots: Option<Vec<Snapshot>>,
    pub terminal_m: usize,
    /// `None` for an unlimited budget.
    pub budget_n: Option<usize>,
    pub status: TraceStatus,
}

impl RunTrace {
    pub fn queries(&self) -> usize {
        self.steps.last().map_or(0, |s| s.cumulative_n)
    }
}

/// Stopping rule and bookkeeping for `run_cal`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalOptions {
    /// Stop once this many labels have been requested.
    pub budget: Option<usize>,
    /// Stop after this many stream points.
    pub horizon: Option<usize>,
    pub snapshot_powers: bool,
}

impl CalOptions {
    pub fn budget(n: usize) -> Self {
        CalOptions {
            budget: Some(n),
            horizon: None,
            snapshot_powers: false,
        }
    }

    pub fn horizon(m: usize) -> Self {
        CalOptions {
            budget: None,
            horizon: Some(m),
            snapshot_powers: false,
        }
    }

    pub fn with_snapshots(mut self) -> Self {
        self.snapshot_powers = true;
        self
    }
}

fn snapshot(prefix: &[Example], class: &ConceptClass, v: &VersionSpace, dist: &Distribution) -> Result<Snapshot> {
    let delta_vs = match dis_region_mass(v, dist, MassMode::Exact) {
        Ok(e) => Some(e.value),
        Err(Error::UseMonteCarlo(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Snapshot {
        m: prefix.len(),
        nhat: nhat(prefix, class)?,
        delta_vs,
    })
}

/// Runs CAL on a realizable stream labeled by `target`.
///
/// A point is queried iff it lies in the disagreement region of the current
/// version space; only queried points are added as constraints, which leaves
/// `V_m = VS(S_m)`.
pub fn run_cal(
    class: &ConceptClass,
    dist: &Distribution,
    target: &Hypothesis,
    rng: &RngStream,
    opts: CalOptions,
) -> Result<RunTrace> {
    if opts.budget == Some(0) {
        return Err(Error::InvalidArgument("label budget must be positive".into()));
    }
    if opts.budget.is_none() && opts.horizon.is_none() {
        return Err(Error::InvalidArgument("need a label budget or a horizon".into()));
    }
    if !class.contains(target) {
        return Err(Error::InvalidArgument(format!("target is not a member of {}", class.name())));
    }
    let mut stream = LabeledStream::new(dist, target, &NoiseModel::Realizable, rng)?;
    let mut v = VersionSpace::full(class.clone());
    let mut steps = Vec::new();
    let mut prefix: Vec<Example> = Vec::new();
    let mut snaps = Vec::new();
    let mut n = 0;
    let status = loop {
        let m = steps.len();
        if opts.budget.is_some_and(|b| n >= b) {
            break TraceStatus::BudgetReached;
        }
        if opts.horizon.is_some_and(|h| m >= h) {
            break TraceStatus::HorizonReached;
        }
        if m >= STREAM_CAP {
            break TraceStatus::CapHit;
        }
        let ex = stream.next_example();
        let queried = v.dis_member_raw(ex.x.coords());
        if queried {
            n += 1;
            v.insert(ex.clone())?;
        }
        steps.push(TraceStep {
            m: m + 1,
            queried,
            cumulative_n: n,
        });
        if opts.snapshot_powers {
            prefix.push(ex);
            if (m + 1).is_power_of_two() {
                snaps.push(snapshot(&prefix, class, &v, dist)?);
            }
        }
    };
    Ok(RunTrace {
        terminal_m: steps.len(),
        steps,
        snapshots: opts.snapshot_powers.then_some(snaps),
        budget_n: opts.budget,
        status,
    })
}

/// `N(m; S_m)` by replay over a fixed realizable sample.
pub fn count_queries(s: &[Example], class: &ConceptClass) -> Result<usize> {
    if !VersionSpace::new(class.clone(), s)?.is_feasible() {
        return Err(Error::Infeasible);
    }
    let mut v = VersionSpace::full(class.clone());
    let mut n = 0;
    for ex in s {
        if v.dis_member_raw(ex.x.coords()) {
            n += 1;
            v.insert(ex.clone())?;
        }
    }
    Ok(n)
}

/// `M(n; S_∞)`: the stream index of the `n`-th query, or `None` at the cap.
pub fn m_of_n(
    n: usize,
    class: &ConceptClass,
    dist: &Distribution,
    target: &Hypothesis,
    rng: &RngStream,
    cap: usize,
) -> Result<Option<usize>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut stream = LabeledStream::new(dist, target, &NoiseModel::Realizable, rng)?;
    let mut v = VersionSpace::full(class.clone());
    let mut q = 0;
    for m in 1..=cap.min(STREAM_CAP) {
        let ex = stream.next_example();
        if v.dis_member_raw(ex.x.coords()) {
            q += 1;
            v.insert(ex)?;
            if q == n {
                return Ok(Some(m));
            }
        }
    }
    Ok(None)
}

/// Outcome of a label-complexity estimate over a grid of budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcEstimate {
    /// Least grid budget reaching the target frequency.
    pub n: usize,
    /// `(n, success frequency)` per grid entry.
    pub frequencies: Vec<(usize, f64)>,
    pub replicates: usize,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || eps.is_nan() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// Per-replicate position in `n_grid` of the first budget whose version space
/// has sup error at most `eps`; `None` if no budget succeeds.
#[allow(clippy::too_many_arguments)]
fn first_success_budget(
    class: &ConceptClass,
    dist: &Distribution,
    target: &Hypothesis,
    eps: f64,
    grid: &[usize],
    rng: &RngStream,
) -> Result<Option<usize>> {
    let mut stream = LabeledStream::new(dist, target, &NoiseModel::Realizable, rng)?;
    let mut v = VersionSpace::full(class.clone());
    let mut q = 0;
    let mut gi = 0;
    let mut m = 0;
    while gi < grid.len() {
        while q < grid[gi] {
            if m >= STREAM_CAP {
                return Ok(None);
            }
            m += 1;
            let ex = stream.next_example();
            if v.dis_member_raw(ex.x.coords()) {
                q += 1;
                v.insert(ex)?;
            }
        }
        if sup_error_in_vs(&v, target, dist, None)?.value <= eps {
            return Ok(Some(gi));
        }
        gi += 1;
    }
    Ok(None)
}

/// Monte Carlo plug-in for `LC(ε, δ)` over a budget grid.
///
/// Replicate `r` uses the stream `(master_seed, r)` for every budget, so the
/// success events are nested in `n`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_lc(
    class: &ConceptClass,
    dist: &Distribution,
    target: &Hypothesis,
    eps: f64,
    delta: f64,
    n_grid: &[usize],
    replicates: usize,
    master_seed: u64,
) -> Result<LcEstimate> {
    check_eps(eps)?;
    check_delta(delta)?;
    if replicates == 0 {
        return Err(Error::InvalidArgument("need at least one replicate".into()));
    }
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    if grid.is_empty() || grid[0] == 0 {
        return Err(Error::InvalidArgument("budget grid must be nonempty and positive".into()));
    }
    let first = run_replicates(replicates, |r| {
        first_success_budget(class, dist, target, eps, &grid, &RngStream::new(master_seed, r))
    })?;
    let frequencies: Vec<(usize, f64)> = grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let ok = first.iter().filter(|f| f.is_some_and(|j| j <= i)).count();
            (n, ok as f64 / replicates as f64)
        })
        .collect();
    let n = frequencies
        .iter()
        .find(|(_, f)| *f >= 1.0 - delta)
        .map(|(n, _)| *n)
        .ok_or(Error::GridExhausted)?;
    Ok(LcEstimate {
        n,
        frequencies,
        replicates,
    })
}

/// Least `m` such that `VS(S_m)` has sup error at most `eps`, or `None` at the cap.
fn first_passive_success(
    class: &ConceptClass,
    dist: &Distribution,
    target: &Hypothesis,
    eps: f64,
    rng: &RngStream,
    cap: usize,
) -> Result<Option<usize>> {
    let mut stream = LabeledStream::new(dist, target, &NoiseModel::Realizable, rng)?;
    let mut v = VersionSpace::full(class.clone());
    for m in 1..=cap {
        v.insert(stream.next_example())?;
        if sup_error_in_vs(&v, target, dist, None)?.value <= eps {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Monte Carlo plug-in for the passive sample complexity `M(ε, δ)`.
///
/// Sup error is nonincreasing along each replicate's stream, so the empirical
/// success frequency is monotone in `m` and its least crossing of `1 - δ` is an
/// order statistic of the per-replicate first-success indices.
#[allow(clippy::too_many_arguments)]
pub fn estimate_m_passive(
    class: &ConceptClass,
    dist: &Distribution,
    target: &Hypothesis,
    eps: f64,
    delta: f64,
    replicates: usize,
    master_seed: u64,
    cap: usize,
) -> Result<usize> {
    check_eps(eps)?;
    check_delta(delta)?;
    if replicates == 0 {
        return Err(Error::InvalidArgument("need at least one replicate".into()));
    }
    let cap = cap.min(STREAM_CAP);
    let firsts = run_replicates(replicates, |r| {
        first_passive_success(class, dist, target, eps, &RngStream::new(master_seed, r), cap)
    })?;
    let need = order_index(delta, replicates);
    let mut ms: Vec<usize> = firsts.into_iter().flatten().collect();
    if ms.len() < need {
        return Err(Error::CapHit(cap));
    }
    ms.sort_unstable();
    Ok(ms[need - 1])
}

/// Both sides of the data-dependent query-count sandwich for one trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub m: usize,
    pub queries: usize,
    pub max_nhat: usize,
    pub lower_holds: bool,
    pub upper: f64,
    pub upper_holds: bool,
}

/// Checks `max_t n̂_t <= N(m)` on the recorded snapshots and evaluates the
/// upper expression at `delta`.
pub fn sandwich_check(trace: &RunTrace, delta: f64) -> Result<SandwichReport> {
    let snaps = trace
        .snapshots
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("trace has no snapshots".into()))?;
    let m = trace.terminal_m;
    let queries = trace.queries();
    let max_nhat = snaps.iter().map(|s| s.nhat).max().unwrap_or(0);
    let mut upper = f64::NEG_INFINITY;
    for s in snaps {
        upper = upper.max(query_upper_term(s.nhat, s.m, m.max(1), delta)?);
    }
    Ok(SandwichReport {
        m,
        queries,
        max_nhat,
        lower_holds: max_nhat <= queries,
        upper,
        upper_holds: queries as f64 <= upper,
    })
}
