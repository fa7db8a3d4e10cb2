use calvs_core::coefficients::{ball_dis_mass, flip_distance, geometric_grid, theta, ThetaMode};
use calvs_core::dist::{normal, Distribution, Marginal, MassMode};
use calvs_core::geometry::{ConceptClass, Hypothesis, Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn inside(z: &[f64], x: f64) -> bool {
    z.chunks(2).any(|c| c[0] <= x && x <= c[1])
}

/// Uniform symmetric difference of two interval unions.
fn interval_gap(a: &[f64], b: &[f64]) -> f64 {
    let mut cuts: Vec<f64> = a.iter().chain(b).cloned().chain([0.0, 1.0]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .filter(|w| inside(a, 0.5 * (w[0] + w[1])) != inside(b, 0.5 * (w[0] + w[1])))
        .map(|w| w[1] - w[0])
        .sum()
}

/// Minimum distance over `k`-interval unions with boundaries in `grid` that relabel `x`.
fn brute_interval_flip(k: usize, target: &[f64], x: f64, grid: &[f64]) -> f64 {
    let want = !inside(target, x);
    let mut best = f64::INFINITY;
    let mut idx: Vec<usize> = (0..2 * k).collect();
    let n = grid.len();
    loop {
        let z: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
        if inside(&z, x) == want {
            best = best.min(interval_gap(&z, target));
        }
        // Next combination.
        let mut i = 2 * k;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < n - 2 * k + i {
                idx[i] += 1;
                for j in i + 1..2 * k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn grid_with(extra: &[f64], n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (1..n).map(|i| i as f64 / n as f64).collect();
    g.extend(extra.iter().filter(|v| **v > 0.0 && **v < 1.0));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

#[test]
fn interval_flip_matches_brute_force() {
    let class = ConceptClass::IntervalUnion { k: 2 };
    let dist = Distribution::uniform_cube(1);
    let targets = [vec![0.2, 0.4, 0.6, 0.8], vec![0.1, 0.15, 0.5, 0.9], vec![0.3, 0.7]];
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for z in &targets {
        let h = Hypothesis::IntervalUnion { boundaries: z.clone() };
        for _ in 0..10 {
            let x: f64 = rng.random_range(0.01..0.99);
            let eps = 1e-9;
            let mut extra = z.clone();
            extra.extend([x - eps, x, x + eps]);
            let g = grid_with(&extra, 20);
            let brute = brute_interval_flip(2, z, x, &g);
            let got = flip_distance(&Point::scalar(x), &h, &dist, &class).unwrap();
            assert!((got - brute).abs() < 1e-7, "z={z:?} x={x}: {got} vs {brute}");
        }
    }
    let h = Hypothesis::equispaced_intervals(2).unwrap();
    assert!(flip_distance(&Point::scalar(1.5), &h, &dist, &class).unwrap().is_infinite());
}

/// Uniform symmetric difference of two boxes in the unit square (`None` empty).
fn box_gap(a: Option<([f64; 2], [f64; 2])>, b: ([f64; 2], [f64; 2])) -> f64 {
    let area = |lo: [f64; 2], hi: [f64; 2]| (hi[0] - lo[0]).max(0.0) * (hi[1] - lo[1]).max(0.0);
    let tb = area(b.0, b.1);
    match a {
        None => tb,
        Some((lo, hi)) => {
            let ilo = [lo[0].max(b.0[0]), lo[1].max(b.0[1])];
            let ihi = [hi[0].min(b.1[0]), hi[1].min(b.1[1])];
            area(lo, hi) + tb - 2.0 * area(ilo, ihi)
        }
    }
}

#[test]
fn rect_flip_matches_brute_force() {
    let class = ConceptClass::AxisRect { k: 2 };
    let dist = Distribution::uniform_cube(2);
    let (lo, hi) = ([0.3, 0.2], [0.6, 0.8]);
    let h = Hypothesis::axis_rect(lo.to_vec(), hi.to_vec()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..25 {
        let x = [rng.random::<f64>(), rng.random::<f64>()];
        let pos = (0..2).all(|j| lo[j] <= x[j] && x[j] <= hi[j]);
        let eps = 1e-9;
        let axes: Vec<Vec<f64>> = (0..2)
            .map(|j| {
                let mut g: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
                g.extend([lo[j], hi[j], x[j] - eps, x[j], x[j] + eps]);
                g.sort_by(f64::total_cmp);
                g.dedup();
                g
            })
            .collect();
        let mut brute = if pos { box_gap(None, (lo, hi)) } else { f64::INFINITY };
        for (a, &x0) in axes[0].iter().enumerate() {
            for &x1 in &axes[0][a..] {
                for (b, &y0) in axes[1].iter().enumerate() {
                    for &y1 in &axes[1][b..] {
                        let inb = x0 <= x[0] && x[0] <= x1 && y0 <= x[1] && x[1] <= y1;
                        if inb != pos {
                            brute = brute.min(box_gap(Some(([x0, y0], [x1, y1])), (lo, hi)));
                        }
                    }
                }
            }
        }
        let got = flip_distance(&Point::new(x.to_vec()).unwrap(), &h, &dist, &class).unwrap();
        assert!((got - brute).abs() < 1e-7, "x={x:?}: {got} vs {brute}");
    }
}

#[test]
fn rect_ball_mass_matches_sampled_flips() {
    let class = ConceptClass::AxisRect { k: 2 };
    let dist = Distribution::product(vec![
        Marginal::standard_uniform(),
        Marginal::PiecewiseLinear {
            knots: vec![(0.0, 0.0), (0.5, 0.7), (1.0, 1.0)],
        },
    ])
    .unwrap();
    let h = Hypothesis::axis_rect(vec![0.2, 0.25], vec![0.7, 0.65]).unwrap();
    let n = 40_000;
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut flips: Vec<f64> = (0..n)
        .map(|_| {
            let x = Point::new(vec![rng.random(), {
                // Inverse CDF of the piecewise-linear marginal.
                let u: f64 = rng.random();
                if u < 0.7 { u / 0.7 * 0.5 } else { 0.5 + (u - 0.7) / 0.3 * 0.5 }
            }])
            .unwrap();
            flip_distance(&x, &h, &dist, &class).unwrap()
        })
        .collect();
    flips.sort_by(f64::total_cmp);
    for r in [0.005, 0.02, 0.05, 0.1, 0.2, 0.35] {
        let exact = ball_dis_mass(&h, &dist, r, &class, MassMode::Exact).unwrap();
        let mc = flips.partition_point(|f| *f <= r) as f64 / n as f64;
        let se = (mc * (1.0 - mc) / n as f64).sqrt().max(1e-4);
        assert!((exact - mc).abs() <= 5.0 * se, "r={r}: {exact} vs {mc}");
    }
}

#[test]
fn threshold_ball_mass_under_normal_marginal() {
    let class = ConceptClass::Threshold;
    let dist = Distribution::product(vec![Marginal::Normal { mean: 1.0, sd: 2.0 }]).unwrap();
    let t = 0.4;
    let h = Hypothesis::threshold(t).unwrap();
    let u = normal::norm_cdf((t - 1.0) / 2.0);
    for r in [0.01, 0.1, 0.3, 0.5, 0.9] {
        let want = (u + r).min(1.0) - (u - r).max(0.0);
        let got = ball_dis_mass(&h, &dist, r, &class, MassMode::Exact).unwrap();
        assert!((got - want).abs() < 1e-12, "r={r}: {got} vs {want}");
    }
}

#[test]
fn agnostic_threshold_ball_matches_brute_force() {
    // f* is the indicator of [0.3, 0.6]. A point counts when some threshold
    // within distance r of f* labels it differently from f*.
    let class = ConceptClass::Threshold;
    let dist = Distribution::uniform_cube(1);
    let f = Hypothesis::interval_union(vec![0.3, 0.6]).unwrap();
    let nt = 4000;
    let ts: Vec<f64> = (0..=nt).map(|i| -0.1 + 1.2 * i as f64 / nt as f64).collect();
    let d = |tp: f64| interval_gap(&[tp.clamp(0.0, 1.0), 1.0], &[0.3, 0.6]);
    let nx = 2000;
    let xs: Vec<f64> = (0..nx).map(|i| (i as f64 + 0.5) / nx as f64).collect();
    for r in [0.2, 0.3, 0.35, 0.45, 0.6, 0.7] {
        let ball: Vec<f64> = ts.iter().cloned().filter(|&tp| d(tp) <= r).collect();
        let hits = xs
            .iter()
            .filter(|&&x| ball.iter().any(|&tp| (x >= tp) != inside(&[0.3, 0.6], x)))
            .count();
        let brute = hits as f64 / nx as f64;
        let got = ball_dis_mass(&f, &dist, r, &class, MassMode::Exact).unwrap();
        assert!((got - brute).abs() <= 2e-3, "r={r}: {got} vs {brute}");
    }
    let th = theta(&f, &dist, 1.0 / 64.0, &class, &geometric_grid(1.0 / 64.0), MassMode::Exact).unwrap();
    assert_eq!(th.mode, ThetaMode::Exact);
    assert!(th.value >= 1.0);
}

#[test]
fn theta_grid_refinement_never_decreases() {
    let dist = Distribution::uniform_cube(2);
    let class = ConceptClass::AxisRect { k: 2 };
    let h = Hypothesis::axis_rect(vec![0.2, 0.2], vec![0.8, 0.8]).unwrap();
    let r0 = 0.01;
    let coarse = geometric_grid(r0);
    let mut fine = coarse.clone();
    fine.extend((1..100).map(|i| i as f64 / 100.0));
    let a = theta(&h, &dist, r0, &class, &coarse, MassMode::Exact).unwrap().value;
    let b = theta(&h, &dist, r0, &class, &fine, MassMode::Exact).unwrap().value;
    assert!(b >= a - 1e-9, "{b} < {a}");

    let class = ConceptClass::IntervalUnion { k: 2 };
    let h = Hypothesis::equispaced_intervals(2).unwrap();
    let d1 = Distribution::uniform_cube(1);
    let a = theta(&h, &d1, r0, &class, &coarse, MassMode::Exact).unwrap().value;
    let b = theta(&h, &d1, r0, &class, &fine, MassMode::Exact).unwrap().value;
    // Kinks enter the grid, so the one-dimensional value is already exact.
    assert!((a - b).abs() < 1e-12);
}

proptest! {
    #[test]
    fn ball_mass_is_monotone_in_radius(r1 in 0.0..1.0f64, r2 in 0.0..1.0f64, t in 0.05..0.95f64) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let cases = [
            (ConceptClass::Threshold, Hypothesis::threshold(t).unwrap(), Distribution::uniform_cube(1)),
            (
                ConceptClass::IntervalUnion { k: 2 },
                Hypothesis::equispaced_intervals(2).unwrap(),
                Distribution::uniform_cube(1),
            ),
            (
                ConceptClass::AxisRect { k: 2 },
                Hypothesis::axis_rect(vec![t * 0.5, 0.1], vec![0.5 + t * 0.5, 0.9]).unwrap(),
                Distribution::uniform_cube(2),
            ),
        ];
        for (class, h, dist) in cases {
            let a = ball_dis_mass(&h, &dist, lo, &class, MassMode::Exact).unwrap();
            let b = ball_dis_mass(&h, &dist, hi, &class, MassMode::Exact).unwrap();
            prop_assert!(a <= b + 1e-9, "{}: {} > {}", class.name(), a, b);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&b));
        }
    }

    #[test]
    fn theta_is_at_least_one(r0 in 0.001..0.99f64) {
        let h = Hypothesis::threshold(0.5).unwrap();
        let dist = Distribution::uniform_cube(1);
        let th = theta(&h, &dist, r0, &ConceptClass::Threshold, &geometric_grid(r0), MassMode::Exact).unwrap();
        prop_assert!(th.value >= 1.0);
        // For an interior threshold the ball of radius r has mass min(2r, 1).
        prop_assert!((th.value - 2.0f64.min(1.0 / r0).max(1.0)).abs() < 1e-9);
    }
}
