use calvs_core::cal::{count_queries, estimate_lc, estimate_m_passive, m_of_n, run_cal, sandwich_check, CalOptions, TraceStatus};
use calvs_core::compression::nhat;
use calvs_core::dist::{Distribution, LabeledStream, NoiseModel, RngStream};
use calvs_core::geometry::{sup_error_in_vs, ConceptClass, Hypothesis, VersionSpace};
use proptest::prelude::*;

fn setups() -> Vec<(ConceptClass, Hypothesis, Distribution)> {
    vec![
        (ConceptClass::Threshold, Hypothesis::threshold(0.5).unwrap(), Distribution::uniform_cube(1)),
        (
            ConceptClass::IntervalUnion { k: 2 },
            Hypothesis::equispaced_intervals(2).unwrap(),
            Distribution::uniform_cube(1),
        ),
        (
            ConceptClass::AxisRect { k: 2 },
            Hypothesis::axis_rect(vec![0.2, 0.2], vec![0.8, 0.8]).unwrap(),
            Distribution::uniform_cube(2),
        ),
        (
            ConceptClass::LinearSep { k: 2 },
            Hypothesis::linear_normalized(vec![1.0, 1.0], -1.0).unwrap(),
            Distribution::uniform_cube(2),
        ),
    ]
}

fn median(mut v: Vec<usize>) -> f64 {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2]) as f64
    }
}

#[test]
fn trace_replays_on_the_same_stream() {
    for (class, h, dist) in setups() {
        for r in 0..5 {
            let rng = RngStream::new(77, r);
            let trace = run_cal(&class, &dist, &h, &rng, CalOptions::horizon(300)).unwrap();
            assert_eq!(trace.status, TraceStatus::HorizonReached);
            let s = LabeledStream::new(&dist, &h, &NoiseModel::Realizable, &rng).unwrap().take(300);
            assert_eq!(trace.queries(), count_queries(&s, &class).unwrap(), "{}", class.name());
            assert_eq!(trace, run_cal(&class, &dist, &h, &rng, CalOptions::horizon(300)).unwrap());
            // Queries happen exactly at points of the current disagreement region.
            let mut v = VersionSpace::full(class.clone());
            for (step, ex) in trace.steps.iter().zip(&s) {
                let dis = v.dis_member(&ex.x).unwrap();
                assert_eq!(step.queried, dis);
                if dis {
                    v.insert(ex.clone()).unwrap();
                }
            }
        }
    }
}

#[test]
fn trace_counters_are_consistent() {
    for (class, h, dist) in setups() {
        let trace = run_cal(&class, &dist, &h, &RngStream::new(3, 0), CalOptions::budget(12)).unwrap();
        assert_eq!(trace.status, TraceStatus::BudgetReached);
        assert_eq!(trace.queries(), 12);
        let mut prev = 0;
        for st in &trace.steps {
            assert_eq!(st.cumulative_n, prev + st.queried as usize);
            prev = st.cumulative_n;
        }
        assert_eq!(trace.terminal_m, trace.steps.len());
        assert!(trace.steps.last().unwrap().queried);
    }
}

#[test]
fn sandwich_lower_bound_holds_exactly() {
    for (class, h, dist) in setups().into_iter().take(3) {
        for r in 0..20 {
            let trace = run_cal(&class, &dist, &h, &RngStream::new(10, r), CalOptions::horizon(256).with_snapshots()).unwrap();
            let rep = sandwich_check(&trace, 0.05).unwrap();
            assert!(rep.lower_holds, "{}: {} > {}", class.name(), rep.max_nhat, rep.queries);
            let mut running = 0;
            for snap in trace.snapshots.as_ref().unwrap() {
                let n_at = trace.steps[snap.m - 1].cumulative_n;
                assert!(snap.nhat <= n_at);
                running = running.max(snap.nhat);
                assert!(running <= n_at);
            }
        }
    }
}

#[test]
fn query_count_bounds_every_prefix_nhat() {
    for (class, h, dist) in setups().into_iter().take(3) {
        for r in 0..10 {
            let s = LabeledStream::new(&dist, &h, &NoiseModel::Realizable, &RngStream::new(20, r)).unwrap().take(120);
            let n = count_queries(&s, &class).unwrap();
            let worst = (1..=s.len()).map(|t| nhat(&s[..t], &class).unwrap()).max().unwrap();
            assert!(worst <= n, "{}: {worst} > {n}", class.name());
        }
    }
}

#[test]
fn sup_error_is_nonincreasing_along_a_run() {
    let class = ConceptClass::IntervalUnion { k: 2 };
    let h = Hypothesis::equispaced_intervals(2).unwrap();
    let dist = Distribution::uniform_cube(1);
    for r in 0..5 {
        let s = LabeledStream::new(&dist, &h, &NoiseModel::Realizable, &RngStream::new(30, r)).unwrap().take(300);
        let mut v = VersionSpace::full(class.clone());
        let mut prev = f64::INFINITY;
        for ex in s {
            v.insert(ex).unwrap();
            let e = sup_error_in_vs(&v, &h, &dist, None).unwrap().value;
            assert!(e <= prev + 1e-15);
            prev = e;
        }
    }
}

#[test]
fn threshold_query_counts_are_logarithmic() {
    let class = ConceptClass::Threshold;
    let h = Hypothesis::threshold(0.5).unwrap();
    let dist = Distribution::uniform_cube(1);
    let n1024: Vec<usize> = (0..200)
        .map(|r| run_cal(&class, &dist, &h, &RngStream::new(40, r), CalOptions::horizon(1024)).unwrap().queries())
        .collect();
    let med = median(n1024);
    let l = 1024f64.ln();
    assert!(l <= med && med <= 6.0 * l, "median N(1024) = {med}");

    let small = (0..200)
        .filter(|&r| {
            let t = run_cal(&class, &dist, &h, &RngStream::new(41, r), CalOptions::horizon(4096)).unwrap();
            (t.queries() as f64) < 0.05 * 4096.0
        })
        .count();
    assert!(small >= 190, "{small} of 200");
}

#[test]
fn second_query_usually_comes_at_once() {
    let class = ConceptClass::Threshold;
    let h = Hypothesis::threshold(0.5).unwrap();
    let dist = Distribution::uniform_cube(1);
    let ms: Vec<usize> = (0..10_000)
        .map(|r| m_of_n(2, &class, &dist, &h, &RngStream::new(50, r), 1 << 20).unwrap().unwrap())
        .collect();
    assert_eq!(median(ms.clone()), 2.0);
    // P(query at t = 2) = E max(x, 1 - x) = 3/4.
    let p = ms.iter().filter(|&&m| m == 2).count() as f64 / ms.len() as f64;
    assert!((p - 0.75).abs() < 4.0 * (0.75f64 * 0.25 / 10_000.0).sqrt(), "{p}");
}

#[test]
fn label_complexity_beats_passive_sample_size() {
    let class = ConceptClass::Threshold;
    let h = Hypothesis::threshold(0.5).unwrap();
    let dist = Distribution::uniform_cube(1);
    let grid: Vec<usize> = (1..=20).map(|i| 5 * i).collect();
    let lc = estimate_lc(&class, &dist, &h, 0.01, 0.1, &grid, 200, 60).unwrap();
    let m = estimate_m_passive(&class, &dist, &h, 0.01, 0.1, 200, 60, 1 << 16).unwrap();
    assert!(lc.n <= 60, "LC = {}", lc.n);
    assert!((100..=2000).contains(&m), "M = {m}");
    assert!(m > lc.n);
    // Success frequencies are nondecreasing along the grid on paired seeds.
    for w in lc.frequencies.windows(2) {
        assert!(w[0].1 <= w[1].1 + 1e-12);
    }
    let loose = estimate_lc(&class, &dist, &h, 0.05, 0.1, &grid, 200, 60).unwrap();
    assert!(loose.n <= lc.n);
    assert_eq!(estimate_lc(&class, &dist, &h, 1.0, 0.1, &grid, 100, 60).unwrap().n, 5);
    assert_eq!(estimate_m_passive(&class, &dist, &h, 1.0, 0.1, 100, 60, 1 << 16).unwrap(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn m_of_n_is_strictly_increasing(seed in any::<u64>(), t in 0.05..0.95f64) {
        let class = ConceptClass::Threshold;
        let h = Hypothesis::threshold(t).unwrap();
        let dist = Distribution::uniform_cube(1);
        let rng = RngStream::new(seed, 0);
        let mut prev = 0;
        for n in 1..=8 {
            let m = m_of_n(n, &class, &dist, &h, &rng, 1 << 22).unwrap().unwrap();
            prop_assert!(m >= prev + 1);
            prev = m;
        }
    }

    #[test]
    fn queries_monotone_in_horizon(seed in any::<u64>(), a in 1usize..200, b in 1usize..200) {
        let class = ConceptClass::IntervalUnion { k: 2 };
        let h = Hypothesis::equispaced_intervals(2).unwrap();
        let dist = Distribution::uniform_cube(1);
        let rng = RngStream::new(seed, 1);
        let (lo, hi) = (a.min(b), a.max(b));
        let qa = run_cal(&class, &dist, &h, &rng, CalOptions::horizon(lo)).unwrap().queries();
        let qb = run_cal(&class, &dist, &h, &rng, CalOptions::horizon(hi)).unwrap().queries();
        prop_assert!(qa <= qb);
        prop_assert!(qa <= lo);
    }
}
