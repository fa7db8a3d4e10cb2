//! End-to-end acceptance run: one PASS/FAIL line per criterion.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use calvs_core::compression::{
    build_wxz_class, dedup_sample, essential_points, is_compression_set, minimal_compression_set,
    DEFAULT_EXHAUSTIVE_CAP,
};
use calvs_core::geometry::ConceptClass;
use calvs_exp::{execute, suites, Command};
use common::{compression_subsets, disagreement_masks, instance, mask_of, min_compression_size, Kind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Runs packaged suites with their shipped configs; passes iff every check does.
fn suites_pass(names: &[&str]) -> Result<String, String> {
    let mut detail = Vec::new();
    let mut failed = Vec::new();
    for name in names {
        let info = suites::find(name).ok_or_else(|| format!("no suite `{name}`"))?;
        let report = execute(&Command::Suite(name.to_string()), &info.config()).map_err(|e| format!("{name}: {e}"))?;
        for c in &report.summary.checks {
            let rel = serde_json::to_string(&c.relation).unwrap();
            let line = format!("{} = {} {} {}", c.name, c.value, rel.trim_matches('"'), c.threshold);
            if c.passed {
                detail.push(line);
            } else {
                failed.push(line);
            }
        }
        for (case, n) in &report.summary.exclusions {
            detail.push(format!("{case}: {n} excluded"));
        }
    }
    if failed.is_empty() {
        Ok(detail.join("; "))
    } else {
        Err(format!("failed: {}", failed.join("; ")))
    }
}

/// Compression solver against exhaustive enumeration of every labeling.
fn solver_matches_oracle() -> Result<String, String> {
    let classes = [
        ConceptClass::Threshold,
        ConceptClass::IntervalUnion { k: 1 },
        ConceptClass::IntervalUnion { k: 2 },
        ConceptClass::AxisRect { k: 2 },
        ConceptClass::AxisRect { k: 3 },
        ConceptClass::LinearSep { k: 2 },
        ConceptClass::Finite(Arc::new(build_wxz_class(2).unwrap())),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let instances = 200;
    for i in 0..instances {
        let class = &classes[i % classes.len()];
        let m = rng.random_range(1..=12);
        let s = dedup_sample(&instance(class, m, &mut rng));
        let masks = disagreement_masks(&Kind::of(class), &s);
        let r = minimal_compression_set(&s, class, DEFAULT_EXHAUSTIVE_CAP).map_err(|e| e.to_string())?;
        let want = min_compression_size(&masks, s.len());
        if !r.certified_minimal || r.size != want {
            return Err(format!("instance {i} ({}): size {} vs exhaustive {want}", class.name(), r.size));
        }
        if !is_compression_set(&r.subset, &s, class).map_err(|e| e.to_string())? {
            return Err(format!("instance {i} ({}): returned set does not compress", class.name()));
        }
        let e = mask_of(&essential_points(&s, class).map_err(|e| e.to_string())?, &s);
        if let Some(c) = compression_subsets(&masks, s.len()).into_iter().find(|c| c & e != e) {
            return Err(format!("instance {i} ({}): essential {e:b} not inside {c:b}", class.name()));
        }
    }
    Ok(format!("{instances} instances agree"))
}

type Run = Box<dyn Fn() -> Result<String, String>>;

fn suite(names: &'static [&'static str]) -> Run {
    Box::new(move || suites_pass(names))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Run)> = vec![
        ("query count bounds every prefix compression size", suite(&["sandwich"])),
        ("rectangle compression quantile below (8k/λ) ln(8k/δ)", suite(&["rectangles"])),
        ("k-interval compression size at most 4k", suite(&["kintervals"])),
        ("w/x/z class: VC dimension, point-mass n̂, γ(F,1)", suite(&["wxz-gap"])),
        ("k-interval θ within its factor-2 bracket", suite(&["theta-kintervals"])),
        ("coverage bound on the disagreement mass", suite(&["coverage"])),
        ("θ below the bound from n̂ quantiles", suite(&["theta-from-nhat"])),
        ("θ below the bound from ΔVS quantiles", suite(&["theta-from-deltavs"])),
        ("linear-separator query growth under a mixture", suite(&["gaussmix-trend"])),
        ("CAL label complexity against passive sample size", suite(&["passive-vs-cal"])),
        ("agnostic invariance and agnostic θ bound", suite(&["agnostic-invariance", "agnostic-theta"])),
        ("compression solver against exhaustive enumeration", Box::new(solver_matches_oracle)),
    ];
    let mut failures = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = run();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS {:>2} {title} [{secs:.1}s] {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {title} [{secs:.1}s] {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
