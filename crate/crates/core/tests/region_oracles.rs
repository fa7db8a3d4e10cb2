mod common;

use calvs_core::dist::{Distribution, Marginal, MassMode, McOptions};
use calvs_core::geometry::{dis_region_mass, sup_error_in_vs, ConceptClass, Example, Hypothesis, Point, VersionSpace};
use common::{realizable, Kind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn labeled(h: &Hypothesis, pts: Vec<Vec<f64>>) -> Vec<Example> {
    pts.into_iter()
        .map(|p| {
            let x = Point::new(p).unwrap();
            Example::new(x.clone(), h.evaluate(&x).unwrap())
        })
        .collect()
}

/// `x ∈ DIS` iff both labels of `x` extend the sample.
fn in_dis(kind: &Kind, s: &[Example], x: &[f64]) -> bool {
    let mut pts: Vec<Vec<f64>> = s.iter().map(|e| e.x.coords().to_vec()).collect();
    let mut labels: Vec<bool> = s.iter().map(|e| e.y.is_pos()).collect();
    pts.push(x.to_vec());
    labels.push(true);
    let pos = realizable(kind, &pts, &labels);
    *labels.last_mut().unwrap() = false;
    pos && realizable(kind, &pts, &labels)
}

fn mc_dis(kind: &Kind, s: &[Example], k: usize, lo: f64, hi: f64, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..n)
        .filter(|_| {
            let x: Vec<f64> = (0..k).map(|_| rng.random_range(lo..hi)).collect();
            in_dis(kind, s, &x)
        })
        .count();
    hits as f64 / n as f64
}

#[test]
fn exact_dis_mass_matches_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let n = 20_000;
    let cases: Vec<(ConceptClass, Hypothesis, usize, usize)> = vec![
        (ConceptClass::Threshold, Hypothesis::threshold(0.37).unwrap(), 1, 8),
        (ConceptClass::IntervalUnion { k: 1 }, Hypothesis::interval_union(vec![0.2, 0.55]).unwrap(), 1, 10),
        (
            ConceptClass::IntervalUnion { k: 2 },
            Hypothesis::interval_union(vec![0.1, 0.3, 0.5, 0.8]).unwrap(),
            1,
            12,
        ),
        (
            ConceptClass::AxisRect { k: 2 },
            Hypothesis::axis_rect(vec![0.2, 0.3], vec![0.7, 0.9]).unwrap(),
            2,
            15,
        ),
    ];
    for (class, h, k, m) in cases {
        let kind = Kind::of(&class);
        let dist = Distribution::uniform_cube(k);
        for rep in 0..4 {
            let pts: Vec<Vec<f64>> = (0..m).map(|_| (0..k).map(|_| rng.random()).collect()).collect();
            let s = labeled(&h, pts);
            let v = VersionSpace::new(class.clone(), &s).unwrap();
            let exact = dis_region_mass(&v, &dist, MassMode::Exact).unwrap();
            assert!(exact.is_exact());
            let mc = mc_dis(&kind, &s, k, 0.0, 1.0, n, 100 + rep);
            let se = (mc * (1.0 - mc) / n as f64).sqrt().max(1.0 / n as f64);
            assert!((exact.value - mc).abs() <= 5.0 * se, "{}: exact {} mc {mc}", class.name(), exact.value);
        }
    }
}

#[test]
fn linear_dis_mass_is_sampled() {
    let class = ConceptClass::LinearSep { k: 2 };
    let h = Hypothesis::linear_normalized(vec![1.0, -0.5], 0.1).unwrap();
    let dist = Distribution::product(vec![
        Marginal::Uniform { lo: -1.0, hi: 1.0 },
        Marginal::Uniform { lo: -1.0, hi: 1.0 },
    ])
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let pts: Vec<Vec<f64>> = (0..10).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
    let s = labeled(&h, pts);
    let v = VersionSpace::new(class.clone(), &s).unwrap();
    assert!(dis_region_mass(&v, &dist, MassMode::Exact).is_err());
    let est = dis_region_mass(&v, &dist, MassMode::MonteCarlo(McOptions::new(20_000, 7))).unwrap();
    let mc = mc_dis(&Kind::Linear2, &s, 2, -1.0, 1.0, 4000, 9);
    let se = (mc * (1.0 - mc) / 4000.0).sqrt() + est.std_error;
    assert!((est.value - mc).abs() <= 5.0 * se, "{} vs {mc}", est.value);
}

#[test]
fn dis_mass_under_nonuniform_marginal() {
    let class = ConceptClass::Threshold;
    let dist = Distribution::product(vec![Marginal::Normal { mean: 0.0, sd: 1.0 }]).unwrap();
    let s = vec![Example::scalar(-0.5, -1), Example::scalar(0.9, 1), Example::scalar(1.4, 1)];
    let v = VersionSpace::new(class, &s).unwrap();
    let got = dis_region_mass(&v, &dist, MassMode::Exact).unwrap().value;
    // P(-0.5 < X < 0.9) for a standard normal.
    let want = statrs::function::erf::erf(0.9 / 2f64.sqrt()) / 2.0 + statrs::function::erf::erf(0.5 / 2f64.sqrt()) / 2.0;
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
}

/// Symmetric difference of two interval unions under the uniform measure.
fn interval_gap(a: &[f64], b: &[f64]) -> f64 {
    let mut cuts: Vec<f64> = a.iter().chain(b).cloned().chain([0.0, 1.0]).collect();
    cuts.sort_by(f64::total_cmp);
    let inside = |z: &[f64], x: f64| z.chunks(2).any(|c| c[0] <= x && x <= c[1]);
    cuts.windows(2)
        .filter(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            inside(a, mid) != inside(b, mid)
        })
        .map(|w| w[1] - w[0])
        .sum()
}

#[test]
fn interval_sup_error_matches_grid_search() {
    let class = ConceptClass::IntervalUnion { k: 2 };
    let target = vec![0.15, 0.35, 0.55, 0.75];
    let h = Hypothesis::interval_union(target.clone()).unwrap();
    let dist = Distribution::uniform_cube(1);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let n = 80;
    let grid: Vec<f64> = (1..n).map(|i| i as f64 / n as f64).collect();
    for _ in 0..4 {
        let pts: Vec<Vec<f64>> = (0..8).map(|_| vec![rng.random()]).collect();
        let s = labeled(&h, pts);
        let v = VersionSpace::new(class.clone(), &s).unwrap();
        let exact = sup_error_in_vs(&v, &h, &dist, None).unwrap().value;
        let mut best: f64 = 0.0;
        let g = &grid;
        for a in 0..g.len() {
            for b in a + 1..g.len() {
                for c in b + 1..g.len() {
                    for d in c + 1..g.len() {
                        let z = [g[a], g[b], g[c], g[d]];
                        let ok = s.iter().all(|e| {
                            let x = e.x.x();
                            z.chunks(2).any(|w| w[0] <= x && x <= w[1]) == e.y.is_pos()
                        });
                        if ok {
                            best = best.max(interval_gap(&z, &target));
                        }
                    }
                }
            }
        }
        assert!(best <= exact + 1e-12, "grid {best} above exact {exact}");
        assert!(exact - best <= 4.0 / n as f64 + 1e-12, "grid {best} far below exact {exact}");
    }
}

#[test]
fn rect_sup_error_matches_grid_search() {
    let class = ConceptClass::AxisRect { k: 2 };
    let (tlo, thi) = ([0.3, 0.2], [0.6, 0.7]);
    let h = Hypothesis::axis_rect(tlo.to_vec(), thi.to_vec()).unwrap();
    let dist = Distribution::uniform_cube(2);
    let area = |lo: &[f64], hi: &[f64]| (hi[0] - lo[0]).max(0.0) * (hi[1] - lo[1]).max(0.0);
    let t_area = area(&tlo, &thi);
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let n = 30;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    for _ in 0..4 {
        let pts: Vec<Vec<f64>> = (0..12).map(|_| vec![rng.random(), rng.random()]).collect();
        let s = labeled(&h, pts);
        let v = VersionSpace::new(class.clone(), &s).unwrap();
        let exact = sup_error_in_vs(&v, &h, &dist, None).unwrap().value;
        let mut best: f64 = if s.iter().all(|e| !e.y.is_pos()) { t_area } else { 0.0 };
        for x0 in 0..=n {
            for x1 in x0..=n {
                for y0 in 0..=n {
                    for y1 in y0..=n {
                        let lo = [grid[x0], grid[y0]];
                        let hi = [grid[x1], grid[y1]];
                        let ok = s.iter().all(|e| {
                            let p = e.x.coords();
                            (lo[0] <= p[0] && p[0] <= hi[0] && lo[1] <= p[1] && p[1] <= hi[1]) == e.y.is_pos()
                        });
                        if ok {
                            let ilo = [lo[0].max(tlo[0]), lo[1].max(tlo[1])];
                            let ihi = [hi[0].min(thi[0]), hi[1].min(thi[1])];
                            best = best.max(area(&lo, &hi) + t_area - 2.0 * area(&ilo, &ihi));
                        }
                    }
                }
            }
        }
        assert!(best <= exact + 1e-12, "grid {best} above exact {exact}");
        // Each of four edges moves by at most one cell.
        assert!(exact - best <= 4.0 / n as f64 + 1e-12, "grid {best} far below exact {exact}");
    }
}

#[test]
fn sup_error_shrinks_with_more_data() {
    let class = ConceptClass::IntervalUnion { k: 2 };
    let h = Hypothesis::equispaced_intervals(2).unwrap();
    let dist = Distribution::uniform_cube(1);
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let pts: Vec<Vec<f64>> = (0..200).map(|_| vec![rng.random()]).collect();
    let s = labeled(&h, pts);
    let mut prev = f64::INFINITY;
    for m in [5, 10, 20, 40, 80, 160, 200] {
        let v = VersionSpace::new(class.clone(), &s[..m]).unwrap();
        let e = sup_error_in_vs(&v, &h, &dist, None).unwrap().value;
        let d = dis_region_mass(&v, &dist, MassMode::Exact).unwrap().value;
        assert!(e <= prev + 1e-15);
        // Every hypothesis in the version space errs only inside DIS.
        assert!(e <= d + 1e-12);
        prev = e;
    }
}
