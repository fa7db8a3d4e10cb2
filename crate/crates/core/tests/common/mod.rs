//! Independent labeling oracles used by the integration tests.
#![allow(dead_code)]

use calvs_core::geometry::{ConceptClass, Example, Hypothesis, Label, Point};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Class kinds the oracle understands, with the data it needs.
#[derive(Debug, Clone)]
pub enum Kind {
    Threshold,
    Intervals(usize),
    Rect(usize),
    Linear2,
    /// Rows of a finite table, as label vectors over the domain.
    Finite(Vec<Vec<bool>>),
}

impl Kind {
    pub fn of(class: &ConceptClass) -> Kind {
        match class {
            ConceptClass::Threshold => Kind::Threshold,
            ConceptClass::IntervalUnion { k } => Kind::Intervals(*k),
            ConceptClass::AxisRect { k } => Kind::Rect(*k),
            ConceptClass::LinearSep { k: 2 } => Kind::Linear2,
            ConceptClass::Finite(t) => Kind::Finite(
                t.rows()
                    .iter()
                    .map(|r| r.iter().map(|l| *l == Label::Pos).collect())
                    .collect(),
            ),
            c => panic!("no oracle for {}", c.name()),
        }
    }
}

/// Whether some member of the class produces `labels` on `points`.
pub fn realizable(kind: &Kind, points: &[Vec<f64>], labels: &[bool]) -> bool {
    let pos: Vec<&Vec<f64>> = points.iter().zip(labels).filter(|p| *p.1).map(|p| p.0).collect();
    let neg: Vec<&Vec<f64>> = points.iter().zip(labels).filter(|p| !*p.1).map(|p| p.0).collect();
    match kind {
        Kind::Threshold => {
            let max_neg = neg.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let min_pos = pos.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            max_neg < min_pos
        }
        Kind::Intervals(k) => {
            if pos.iter().any(|p| !(p[0] > 0.0 && p[0] < 1.0)) {
                return false;
            }
            let mut idx: Vec<usize> = (0..points.len()).collect();
            idx.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]));
            // Equal coordinates with different labels cannot be realized.
            if idx
                .windows(2)
                .any(|w| points[w[0]][0] == points[w[1]][0] && labels[w[0]] != labels[w[1]])
            {
                return false;
            }
            let mut runs = 0;
            let mut prev = false;
            for &i in &idx {
                if labels[i] && !prev {
                    runs += 1;
                }
                prev = labels[i];
            }
            runs <= *k
        }
        Kind::Rect(k) => {
            if pos.is_empty() {
                return true;
            }
            let lo: Vec<f64> = (0..*k).map(|j| pos.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min)).collect();
            let hi: Vec<f64> = (0..*k).map(|j| pos.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
            !neg.iter().any(|p| (0..*k).all(|j| lo[j] <= p[j] && p[j] <= hi[j]))
        }
        Kind::Linear2 => linear2_realizable(&pos, &neg),
        Kind::Finite(rows) => rows.iter().any(|r| {
            points.iter().zip(labels).all(|(p, &y)| r[p[0] as usize] == y)
        }),
    }
}

/// Angular sweep: the set of good directions is open, so it contains a
/// midpoint between consecutive critical angles whenever it is nonempty.
fn linear2_realizable(pos: &[&Vec<f64>], neg: &[&Vec<f64>]) -> bool {
    if pos.is_empty() || neg.is_empty() {
        return true;
    }
    let all: Vec<&Vec<f64>> = pos.iter().chain(neg).copied().collect();
    let mut angles = vec![0.0];
    for a in &all {
        for b in &all {
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            if dx != 0.0 || dy != 0.0 {
                // Directions orthogonal to b - a.
                let t = dy.atan2(dx) + std::f64::consts::FRAC_PI_2;
                angles.push(t.rem_euclid(std::f64::consts::TAU));
            }
        }
    }
    angles.sort_by(f64::total_cmp);
    angles.push(angles[0] + std::f64::consts::TAU);
    angles.windows(2).any(|w| {
        let t = 0.5 * (w[0] + w[1]);
        let (c, s) = (t.cos(), t.sin());
        let proj = |p: &Vec<f64>| c * p[0] + s * p[1];
        let min_pos = pos.iter().map(|p| proj(p)).fold(f64::INFINITY, f64::min);
        let max_neg = neg.iter().map(|p| proj(p)).fold(f64::NEG_INFINITY, f64::max);
        max_neg < min_pos
    })
}

/// Masks `l ^ s` over realizable labelings `l` differing from the sample labels.
pub fn disagreement_masks(kind: &Kind, s: &[Example]) -> Vec<u32> {
    let m = s.len();
    assert!(m <= 20);
    let points: Vec<Vec<f64>> = s.iter().map(|e| e.x.coords().to_vec()).collect();
    let truth: u32 = s.iter().enumerate().filter(|(_, e)| e.y.is_pos()).map(|(i, _)| 1 << i).sum();
    let mut out = Vec::new();
    for l in 0..(1u32 << m) {
        if l == truth {
            continue;
        }
        let labels: Vec<bool> = (0..m).map(|i| l >> i & 1 == 1).collect();
        if realizable(kind, &points, &labels) {
            out.push(l ^ truth);
        }
    }
    out
}

/// Every subset of `0..m` hitting all masks, i.e. every compression set.
pub fn compression_subsets(masks: &[u32], m: usize) -> Vec<u32> {
    (0..(1u32 << m)).filter(|c| masks.iter().all(|d| d & c != 0)).collect()
}

/// Minimum size of a compression set, by exhaustive enumeration.
pub fn min_compression_size(masks: &[u32], m: usize) -> usize {
    compression_subsets(masks, m)
        .into_iter()
        .map(|c| c.count_ones() as usize)
        .min()
        .expect("the full sample is always a compression set")
}

/// Indices whose single flip is realizable: points every compression set must keep.
pub fn essential_mask(masks: &[u32]) -> u32 {
    masks.iter().filter(|d| d.count_ones() == 1).fold(0, |a, d| a | d)
}

/// Bit mask of the positions in `s` of the examples in `subset`.
pub fn mask_of(subset: &[Example], s: &[Example]) -> u32 {
    subset
        .iter()
        .map(|e| 1u32 << s.iter().position(|f| f == e).expect("subset element missing"))
        .fold(0, |a, b| a | b)
}

/// A random target of the class and `m` points labeled by it.
pub fn instance(class: &ConceptClass, m: usize, rng: &mut ChaCha8Rng) -> Vec<Example> {
    let sorted = |rng: &mut ChaCha8Rng, n: usize| {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..0.98)).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let (h, pts): (Hypothesis, Vec<Point>) = match class {
        ConceptClass::Threshold => (
            Hypothesis::threshold(rng.random()).unwrap(),
            (0..m).map(|_| Point::scalar(rng.random())).collect(),
        ),
        ConceptClass::IntervalUnion { k } => (
            Hypothesis::interval_union(sorted(rng, 2 * k)).unwrap(),
            (0..m).map(|_| Point::scalar(rng.random_range(-0.1..1.1))).collect(),
        ),
        ConceptClass::AxisRect { k } => {
            let c: Vec<(f64, f64)> = (0..*k)
                .map(|_| {
                    let a: f64 = rng.random();
                    let b: f64 = rng.random();
                    (a.min(b), a.max(b))
                })
                .collect();
            (
                Hypothesis::axis_rect(c.iter().map(|p| p.0).collect(), c.iter().map(|p| p.1).collect()).unwrap(),
                (0..m)
                    .map(|_| Point::new((0..*k).map(|_| rng.random()).collect()).unwrap())
                    .collect(),
            )
        }
        ConceptClass::LinearSep { k } => {
            let w: Vec<f64> = (0..*k).map(|_| rng.random_range(-1.0..1.0)).collect();
            (
                Hypothesis::linear_normalized(w, rng.random_range(-0.5..0.5)).unwrap(),
                (0..m)
                    .map(|_| Point::new((0..*k).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap())
                    .collect(),
            )
        }
        ConceptClass::Finite(t) => (
            Hypothesis::finite(t.clone(), rng.random_range(0..t.len())).unwrap(),
            (0..m).map(|_| t.point(rng.random_range(0..t.domain_len()))).collect(),
        ),
        c => panic!("unexpected class {}", c.name()),
    };
    pts.into_iter().map(|x| Example::new(x.clone(), h.evaluate(&x).unwrap())).collect()
}
