//! The packaged reproduction suites.

use calvs_core::agnostic::{agnostic_nhat, agnostic_quantile_bound_nhat, agnostic_theta, AgnosticProblem};
use calvs_core::bounds::{
    coverage_bound, kintervals_theta_reference, query_upper_term, rect_bound, theta_from_deltavs,
    theta_upper_from_nhat,
};
use calvs_core::cal::{count_queries, estimate_lc, estimate_m_passive, run_cal, CalOptions};
use calvs_core::coefficients::{geometric_grid, quantile_bound_deltavs, theta, ThetaEstimate};
use calvs_core::compression::{gamma_bruteforce, nhat, nhat_replicates, quantile_bound_nhat, vc_dimension};
use calvs_core::dist::{LabeledStream, MassMode, NoiseModel, RngStream};
use calvs_core::geometry::{dis_region_mass, ConceptClass, Hypothesis, VersionSpace};
use calvs_core::quantile::{coverage_std_error, empirical_quantile, run_replicates};

use crate::config::{ExperimentConfig, Resolved};
use crate::error::{ExpError, Result};
use crate::output::{
    Table, AGNOSTIC_M_SERIES_HEADER, AGNOSTIC_NHAT_HEADER, AGNOSTIC_R_SERIES_HEADER, COVERAGE_HEADER,
    FREQUENCY_HEADER, M_SERIES_HEADER, NHAT_HEADER, QUERIES_HEADER, R_SERIES_HEADER, SANDWICH_HEADER,
};
use crate::summary::Outcome;

type SuiteFn = fn(&ExperimentConfig, &mut Outcome) -> Result<()>;

pub struct SuiteInfo {
    pub name: &'static str,
    pub about: &'static str,
    /// The packaged config, with every acceptance threshold in `[checks]`.
    pub default_config: &'static str,
    run: SuiteFn,
}

impl SuiteInfo {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig::parse(self.default_config, &[]).expect("packaged config parses")
    }

    pub fn run(&self, cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
        if cfg.suite != self.name {
            return Err(ExpError::Config(format!(
                "config is for suite `{}`, not `{}`",
                cfg.suite, self.name
            )));
        }
        (self.run)(cfg, out)
    }
}

macro_rules! suite {
    ($name:literal, $about:literal, $run:path) => {
        SuiteInfo {
            name: $name,
            about: $about,
            default_config: include_str!(concat!("../suites/", $name, ".toml")),
            run: $run,
        }
    };
}

static REGISTRY: &[SuiteInfo] = &[
    suite!("sandwich", "max prefix n̂ never exceeds the CAL query count", sandwich),
    suite!("coverage", "ΔVS against the coverage bound at the final sample", coverage),
    suite!("rectangles", "rectangle n̂ quantile against (8k/λ) ln(8k/δ)", rectangles),
    suite!("kintervals", "k-interval n̂ stays at most 4k once every cell is hit", kintervals),
    suite!("wxz-gap", "finite w/x/z class: VC dimension, n̂ under a point mass, γ(F,1)", wxz_gap),
    suite!("theta-kintervals", "exact θ of the equispaced k-interval target within its factor-2 bracket", theta_kintervals),
    suite!("theta-from-nhat", "θ below the bound built from n̂ quantiles", theta_from_nhat),
    suite!("theta-from-deltavs", "θ below the bound built from ΔVS quantiles", theta_from_deltavs_suite),
    suite!("gaussmix-trend", "sub-polynomial growth of linear-separator query counts under a mixture", gaussmix_trend),
    suite!("passive-vs-cal", "CAL label complexity against passive sample size", passive_vs_cal),
    suite!("agnostic-invariance", "agnostic n̂ does not depend on the label channel", agnostic_invariance),
    suite!("agnostic-theta", "agnostic θ below the bound built from agnostic n̂ quantiles", agnostic_theta_suite),
];

pub fn registry() -> &'static [SuiteInfo] {
    REGISTRY
}

pub fn find(name: &str) -> Option<&'static SuiteInfo> {
    REGISTRY.iter().find(|s| s.name == name)
}

fn stream(c: &Resolved, seed: u64, r: u64, m: usize) -> calvs_core::Result<Vec<calvs_core::geometry::Example>> {
    Ok(LabeledStream::new(&c.dist, &c.target, &NoiseModel::Realizable, &RngStream::new(seed, r))?.take(m))
}

fn fraction(n: usize, of: usize) -> f64 {
    n as f64 / of as f64
}

fn median(v: &[usize]) -> f64 {
    let mut v = v.to_vec();
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2]) as f64
    }
}

fn need_replicates(cfg: &ExperimentConfig) -> Result<usize> {
    if cfg.replicates == 0 {
        return Err(ExpError::Config("key `replicates` must be positive".into()));
    }
    Ok(cfg.replicates)
}

fn theta_table(file: String, est: &ThetaEstimate) -> Table {
    let mut t = Table::new(file, R_SERIES_HEADER);
    for &(r, mass) in &est.grid {
        t.push(vec![r.into(), mass.into(), est.mode.as_str().into()]);
    }
    t
}

fn sandwich(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let floor = cfg.check("lower_pass_rate")?;
    let m = cfg.first_m()?;
    let reps = need_replicates(cfg)?;
    for c in cfg.resolved()? {
        let rows = run_replicates(reps, |r| {
            let s = stream(&c, cfg.master_seed, r, m)?;
            let n = count_queries(&s, &c.class)?;
            let mut max_nhat = 0;
            let mut upper = f64::NEG_INFINITY;
            for t in 1..=m {
                let h = nhat(&s[..t], &c.class)?;
                max_nhat = max_nhat.max(h);
                upper = upper.max(query_upper_term(h, t, m, cfg.delta)?);
            }
            Ok((n, max_nhat, upper))
        })?;
        let mut table = Table::new(format!("sandwich_{}.csv", c.name), SANDWICH_HEADER);
        for (r, &(n, h, up)) in rows.iter().enumerate() {
            table.push(vec![r.into(), m.into(), n.into(), h.into(), (h <= n).into(), up.into(), (n as f64 <= up).into()]);
        }
        out.tables.push(table);
        let lower = rows.iter().filter(|(n, h, _)| h <= n).count();
        let upper = rows.iter().filter(|(n, _, up)| *n as f64 <= *up).count();
        out.replicates.insert(c.name.clone(), reps);
        out.value(format!("{}.upper_pass_rate", c.name), fraction(upper, reps));
        out.value(format!("{}.median_queries", c.name), median(&rows.iter().map(|r| r.0).collect::<Vec<_>>()));
        out.assert_frequency(&format!("sandwich-lower-{}", c.name), fraction(lower, reps), floor, reps)?;
    }
    Ok(())
}

fn coverage(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let floor = cfg.check("min_fraction")?;
    let m = cfg.first_m()?;
    let reps = need_replicates(cfg)?;
    for c in cfg.resolved()? {
        let rows = run_replicates(reps, |r| {
            let s = stream(&c, cfg.master_seed, r, m)?;
            let v = VersionSpace::new(c.class.clone(), &s)?;
            let dvs = dis_region_mass(&v, &c.dist, MassMode::Exact)?.value;
            let h = nhat(&s, &c.class)?;
            Ok((h, dvs, coverage_bound(h, m, cfg.delta)?.value))
        })?;
        let mut table = Table::new(format!("coverage_{}.csv", c.name), COVERAGE_HEADER);
        for (r, &(h, dvs, b)) in rows.iter().enumerate() {
            table.push(vec![r.into(), m.into(), h.into(), dvs.into(), b.into(), (dvs <= b).into()]);
        }
        out.tables.push(table);
        let ok = rows.iter().filter(|(_, d, b)| d <= b).count();
        out.replicates.insert(c.name.clone(), reps);
        out.assert_frequency(&format!("coverage-{}", c.name), fraction(ok, reps), floor, reps)?;
    }
    Ok(())
}

fn rectangles(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let lambda = cfg.check("lambda")?;
    let tol = cfg.check("tolerance")?;
    let m = cfg.first_m()?;
    let reps = need_replicates(cfg)?;
    for c in cfg.resolved()? {
        let ConceptClass::AxisRect { k } = c.class else {
            return Err(ExpError::Config(format!("case `{}` is not a rectangle class", c.name)));
        };
        let rows = nhat_replicates(&c.class, &c.dist, &c.target, m, reps, cfg.master_seed, Some(lambda))?;
        let mut table = Table::new(format!("nhat_{}.csv", c.name), NHAT_HEADER);
        for r in &rows {
            table.push(vec![r.replicate.into(), r.m.into(), r.nhat.into(), r.certified.into(), r.excluded.into()]);
        }
        out.tables.push(table);
        let kept: Vec<f64> = rows.iter().filter(|r| !r.excluded).map(|r| r.nhat as f64).collect();
        out.replicates.insert(c.name.clone(), reps);
        out.exclusions.insert(c.name.clone(), reps - kept.len());
        let q = empirical_quantile(&kept, cfg.delta, m)?;
        let bound = rect_bound(k, lambda, cfg.delta)?;
        out.assert_bound(
            &format!("rect-quantile-{}", c.name),
            q.value,
            bound,
            tol,
            &[
                ("k", k as f64),
                ("lambda", lambda),
                ("delta", cfg.delta),
                ("m", m as f64),
                ("kept_replicates", kept.len() as f64),
                ("order_index", q.order_index as f64),
                ("coverage_std_error", coverage_std_error(cfg.delta, kept.len())),
            ],
        )?;
    }
    Ok(())
}

fn kintervals(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let nominal = cfg.check("nominal_fraction")?;
    let mult = cfg.check("se_multiplier")?;
    let m = cfg.first_m()?;
    let reps = need_replicates(cfg)?;
    for c in cfg.resolved()? {
        let ConceptClass::IntervalUnion { k } = c.class else {
            return Err(ExpError::Config(format!("case `{}` is not an interval class", c.name)));
        };
        let cells = (2 * k + 1) as f64;
        out.assert_ge(&format!("kintervals-sample-size-{}", c.name), m as f64, cells * (cells / cfg.delta).ln())?;
        let cap = cfg.check("nhat_max")?;
        let rows = nhat_replicates(&c.class, &c.dist, &c.target, m, reps, cfg.master_seed, None)?;
        let mut table = Table::new(format!("nhat_{}.csv", c.name), NHAT_HEADER);
        for r in &rows {
            table.push(vec![r.replicate.into(), r.m.into(), r.nhat.into(), r.certified.into(), r.excluded.into()]);
        }
        out.tables.push(table);
        let ok = rows.iter().filter(|r| r.nhat as f64 <= cap).count();
        let floor = nominal - mult * (cfg.delta * (1.0 - cfg.delta) / reps as f64).sqrt();
        out.replicates.insert(c.name.clone(), reps);
        out.value(format!("{}.nhat_max", c.name), cap);
        out.assert_frequency(&format!("kintervals-fraction-{}", c.name), fraction(ok, reps), floor, reps)?;
    }
    Ok(())
}

fn wxz_gap(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let want_vc = cfg.check("vc_dimension")?;
    let want_nhat = cfg.check("nhat")?;
    let gamma_min = cfg.check("gamma_min")?;
    let gamma_n = cfg.check("gamma_n")? as usize;
    let m = cfg.first_m()?;
    let reps = need_replicates(cfg)?;
    for c in cfg.resolved()? {
        let table = c
            .table
            .clone()
            .ok_or_else(|| ExpError::Config(format!("case `{}` is not a finite class", c.name)))?;
        out.assert_eq(&format!("wxz-vc-{}", c.name), vc_dimension(&table)? as f64, want_vc)?;
        // Every row as the target, every replicate sample.
        let mut worst = 0usize;
        let mut best = usize::MAX;
        for row in 0..table.len() {
            let target = Hypothesis::finite(table.clone(), row)?;
            let vals = run_replicates(reps, |r| {
                let s = LabeledStream::new(&c.dist, &target, &NoiseModel::Realizable, &RngStream::new(cfg.master_seed, r))?
                    .take(m);
                nhat(&s, &c.class)
            })?;
            worst = worst.max(*vals.iter().max().unwrap());
            best = best.min(*vals.iter().min().unwrap());
        }
        out.replicates.insert(c.name.clone(), reps * table.len());
        out.assert_eq(&format!("wxz-nhat-max-{}", c.name), worst as f64, want_nhat)?;
        out.assert_eq(&format!("wxz-nhat-min-{}", c.name), best as f64, want_nhat)?;
        let gamma = gamma_bruteforce(&table, gamma_n)?;
        out.assert_ge(&format!("wxz-gamma-{}", c.name), gamma as f64, gamma_min)?;
    }
    Ok(())
}

fn theta_kintervals(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let tol = cfg.check("tolerance")?;
    for c in cfg.resolved()? {
        let ConceptClass::IntervalUnion { k } = c.class else {
            return Err(ExpError::Config(format!("case `{}` is not an interval class", c.name)));
        };
        for (i, &r0) in cfg.r0.iter().enumerate() {
            let grid = if cfg.r_grid.is_empty() { geometric_grid(r0) } else { cfg.r_grid.clone() };
            let est = theta(&c.target, &c.dist, r0, &c.class, &grid, MassMode::Exact)?;
            let (lo, hi) = kintervals_theta_reference(r0, k)?;
            out.tables.push(theta_table(format!("theta_grid_{}_{i}.csv", c.name), &est));
            out.value(format!("{}.theta[{r0}]", c.name), est.value);
            out.assert_ge(&format!("theta-bracket-low-{}-{r0}", c.name), est.value, lo - tol)?;
            out.assert_le(&format!("theta-bracket-high-{}-{r0}", c.name), est.value, hi + tol)?;
        }
    }
    Ok(())
}

fn single_r0(cfg: &ExperimentConfig) -> Result<f64> {
    match cfg.r0.as_slice() {
        [r0] => Ok(*r0),
        _ => Err(ExpError::Config("key `r0` must hold exactly one radius".into())),
    }
}

fn radius_grid(cfg: &ExperimentConfig) -> Result<&[f64]> {
    if cfg.r_grid.is_empty() || cfg.r_grid.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
        return Err(ExpError::Config("key `r_grid` must be a nonempty list in (0, 1]".into()));
    }
    Ok(&cfg.r_grid)
}

fn theta_from_nhat(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let tol = cfg.check("tolerance")?;
    let r0 = single_r0(cfg)?;
    let reps = need_replicates(cfg)?;
    for c in cfg.resolved()? {
        let mut series = Table::new(format!("nhat_quantile_{}.csv", c.name), M_SERIES_HEADER);
        let mut bvals = Vec::new();
        for &r in radius_grid(cfg)? {
            let m = (1.0 / r).ceil() as usize;
            let q = quantile_bound_nhat(&c.class, &c.dist, &c.target, m, cfg.delta, reps, cfg.master_seed)?;
            series.push(vec![m.into(), q.value.into(), "order_statistic".into()]);
            bvals.push((r, q.value));
        }
        out.tables.push(series);
        let upper = theta_upper_from_nhat(&bvals)?;
        let est = theta(&c.target, &c.dist, r0, &c.class, &geometric_grid(r0), MassMode::Exact)?;
        out.tables.push(theta_table(format!("theta_grid_{}.csv", c.name), &est));
        out.replicates.insert(c.name.clone(), reps * bvals.len());
        let max_b = bvals.iter().map(|b| b.1).fold(0.0, f64::max);
        out.chart(&format!("theta-vs-16B-{}", c.name), est.value, 16.0 * max_b)?;
        out.assert_bound(
            &format!("theta-from-nhat-{}", c.name),
            est.value,
            upper,
            tol,
            &[("r0", r0), ("delta", cfg.delta), ("max_b", max_b)],
        )?;
    }
    Ok(())
}

fn theta_from_deltavs_suite(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let tol = cfg.check("tolerance")?;
    let r0 = single_r0(cfg)?;
    let reps = need_replicates(cfg)?;
    for c in cfg.resolved()? {
        let mut series = Table::new(format!("deltavs_quantile_{}.csv", c.name), M_SERIES_HEADER);
        let mut bvals = Vec::new();
        for &r in radius_grid(cfg)? {
            if !(r > r0 && r < 0.5) {
                return Err(ExpError::Config(format!("radius {r} is outside (r0, 1/2)")));
            }
            let m = (1.0 / r).floor() as usize;
            let q = quantile_bound_deltavs(&c.class, &c.dist, &c.target, m, cfg.delta, reps, cfg.master_seed, MassMode::Exact)?;
            series.push(vec![m.into(), q.value.into(), "exact".into()]);
            bvals.push((r, q.value));
        }
        out.tables.push(series);
        let upper = theta_from_deltavs(&bvals)?;
        let est = theta(&c.target, &c.dist, r0, &c.class, &geometric_grid(r0), MassMode::Exact)?;
        out.tables.push(theta_table(format!("theta_grid_{}.csv", c.name), &est));
        out.replicates.insert(c.name.clone(), reps * bvals.len());
        out.assert_bound(&format!("theta-from-deltavs-{}", c.name), est.value, upper, tol, &[("r0", r0), ("delta", cfg.delta)])?;
    }
    Ok(())
}

fn gaussmix_trend(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let exponent = cfg.check("growth_exponent")?;
    let reps = need_replicates(cfg)?;
    let (&m0, &m1) = match cfg.m.as_slice() {
        [a, b] if a < b => (a, b),
        _ => return Err(ExpError::Config("key `m` must hold two increasing sizes".into())),
    };
    for c in cfg.resolved()? {
        let rows = run_replicates(reps, |r| {
            let t = run_cal(&c.class, &c.dist, &c.target, &RngStream::new(cfg.master_seed, r), CalOptions::horizon(m1))?;
            Ok((t.steps[m0 - 1].cumulative_n, t.queries()))
        })?;
        let mut table = Table::new(format!("queries_{}.csv", c.name), QUERIES_HEADER);
        for (r, &(a, b)) in rows.iter().enumerate() {
            table.push(vec![r.into(), m0.into(), a.into()]);
            table.push(vec![r.into(), m1.into(), b.into()]);
        }
        out.tables.push(table);
        let lo = median(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
        let hi = median(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
        out.replicates.insert(c.name.clone(), reps);
        out.value(format!("{}.median_N[{m0}]", c.name), lo);
        out.value(format!("{}.median_N[{m1}]", c.name), hi);
        out.assert_le(
            &format!("gaussmix-growth-{}", c.name),
            hi / lo,
            (m1 as f64 / m0 as f64).powf(exponent),
        )?;
    }
    Ok(())
}

fn passive_vs_cal(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let lc_max = cfg.check("lc_max")?;
    let m_min = cfg.check("m_passive_min")?;
    let cap = cfg.check("passive_cap")? as usize;
    let eps = cfg.epsilon()?;
    let reps = need_replicates(cfg)?;
    for c in cfg.resolved()? {
        let lc = estimate_lc(&c.class, &c.dist, &c.target, eps, cfg.delta, &cfg.n_grid, reps, cfg.master_seed)?;
        let mp = estimate_m_passive(&c.class, &c.dist, &c.target, eps, cfg.delta, reps, cfg.master_seed, cap)?;
        let mut table = Table::new(format!("lc_frequency_{}.csv", c.name), FREQUENCY_HEADER);
        for &(n, f) in &lc.frequencies {
            table.push(vec![n.into(), f.into()]);
        }
        out.tables.push(table);
        out.replicates.insert(c.name.clone(), reps);
        out.assert_le(&format!("lc-{}", c.name), lc.n as f64, lc_max)?;
        out.assert_ge(&format!("m-passive-{}", c.name), mp as f64, m_min)?;
    }
    Ok(())
}

fn agnostic_invariance(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let allowed = cfg.check("max_mismatches")?;
    let m = cfg.first_m()?;
    let reps = need_replicates(cfg)?;
    if cfg.beta.len() < 2 {
        return Err(ExpError::Config("key `beta` needs at least two flip probabilities".into()));
    }
    for (c, spec) in cfg.resolved()?.into_iter().zip(&cfg.cases) {
        let problems = cfg
            .beta
            .iter()
            .map(|&b| AgnosticProblem::new(c.class.clone(), c.dist.clone(), c.target.clone(), NoiseModel::massart(b)?))
            .collect::<calvs_core::Result<Vec<_>>>()?;
        let member = problems[0].fstar_in_class();
        let rows = run_replicates(reps, |r| {
            let rng = RngStream::new(cfg.master_seed, r);
            let per_beta = problems
                .iter()
                .map(|p| Ok(agnostic_nhat(&p.sample(m, &rng)?, &p.fstar, &p.class)?.0))
                .collect::<calvs_core::Result<Vec<_>>>()?;
            let realizable = if member { Some(nhat(&stream(&c, cfg.master_seed, r, m)?, &c.class)?) } else { None };
            Ok((per_beta, realizable))
        })?;
        let desc = spec.target.descriptor();
        let mut table = Table::new(format!("agnostic_nhat_{}.csv", c.name), AGNOSTIC_NHAT_HEADER);
        for (r, (per_beta, _)) in rows.iter().enumerate() {
            for (&b, &n) in cfg.beta.iter().zip(per_beta) {
                table.push(vec![r.into(), m.into(), n.into(), true.into(), false.into(), desc.clone().into(), b.into()]);
            }
        }
        out.tables.push(table);
        let beta_mismatch = rows.iter().filter(|(v, _)| v.iter().any(|n| *n != v[0])).count();
        out.replicates.insert(c.name.clone(), reps * cfg.beta.len());
        out.assert_le(&format!("agnostic-beta-invariance-{}", c.name), beta_mismatch as f64, allowed)?;
        if member {
            let real_mismatch = rows.iter().filter(|(v, real)| Some(v[0]) != *real).count();
            out.assert_le(&format!("agnostic-matches-realizable-{}", c.name), real_mismatch as f64, allowed)?;
        }
    }
    Ok(())
}

fn agnostic_theta_suite(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let tol = cfg.check("tolerance")?;
    let r0 = single_r0(cfg)?;
    let reps = need_replicates(cfg)?;
    let beta = match cfg.noise {
        NoiseModel::Massart { beta } => beta,
        NoiseModel::Realizable => 0.0,
    };
    for (c, spec) in cfg.resolved()?.into_iter().zip(&cfg.cases) {
        let p = AgnosticProblem::new(c.class.clone(), c.dist.clone(), c.target.clone(), cfg.noise)?;
        let desc = spec.target.descriptor();
        let mut series = Table::new(format!("agnostic_nhat_quantile_{}.csv", c.name), AGNOSTIC_M_SERIES_HEADER);
        let mut bvals = Vec::new();
        for &r in radius_grid(cfg)? {
            let m = (1.0 / r).ceil() as usize;
            let q = agnostic_quantile_bound_nhat(&p, m, cfg.delta, reps, cfg.master_seed)?;
            series.push(vec![m.into(), q.value.into(), "order_statistic".into(), desc.clone().into(), beta.into()]);
            bvals.push((r, q.value));
        }
        out.tables.push(series);
        let upper = theta_upper_from_nhat(&bvals)?;
        let est = agnostic_theta(&p, r0, &geometric_grid(r0))?;
        let mut grid = Table::new(format!("agnostic_theta_grid_{}.csv", c.name), AGNOSTIC_R_SERIES_HEADER);
        for &(r, mass) in &est.grid {
            grid.push(vec![r.into(), mass.into(), est.mode.as_str().into(), desc.clone().into(), beta.into()]);
        }
        out.tables.push(grid);
        out.replicates.insert(c.name.clone(), reps * bvals.len());
        out.value(format!("{}.fstar_in_class", c.name), p.fstar_in_class() as u8 as f64);
        let max_b = bvals.iter().map(|b| b.1).fold(0.0, f64::max);
        out.chart(&format!("agnostic-theta-vs-16B-{}", c.name), est.value, 16.0 * max_b)?;
        out.assert_bound(
            &format!("agnostic-theta-{}", c.name),
            est.value,
            upper,
            tol,
            &[("r0", r0), ("delta", cfg.delta), ("max_b", max_b)],
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_configs_parse_and_name_themselves() {
        assert!(registry().len() >= 12);
        for s in registry() {
            let cfg = s.config();
            assert_eq!(cfg.suite, s.name);
            cfg.resolved().unwrap();
        }
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3, 1, 2]), 2.0);
        assert_eq!(median(&[4, 1, 2, 3]), 2.5);
    }
}
