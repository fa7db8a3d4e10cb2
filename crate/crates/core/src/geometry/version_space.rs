use std::sync::Arc;

use super::lp::separating_hyperplane;
use super::{ConceptClass, Example, FiniteClassTable, Halfspace, Hypothesis, Label, Point};
use crate::error::{Error, Result};

/// Answer of a unanimity query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unanimity {
    Label(Label),
    Disagreement,
}

#[derive(Debug, Clone)]
pub(crate) struct IntervalCache {
    pub k: usize,
    /// Distinct constraint points in increasing order.
    pub points: Vec<(f64, Label)>,
    pub runs: usize,
    pub conflict: bool,
    pub pos_outside: bool,
}

impl IntervalCache {
    fn new(k: usize) -> Self {
        IntervalCache {
            k,
            points: Vec::new(),
            runs: 0,
            conflict: false,
            pos_outside: false,
        }
    }

    fn neighbours(&self, x: f64) -> std::result::Result<usize, (Option<Label>, Option<Label>, usize)> {
        match self.points.binary_search_by(|p| p.0.total_cmp(&x)) {
            Ok(i) => Ok(i),
            Err(i) => {
                let prev = i.checked_sub(1).map(|j| self.points[j].1);
                let next = self.points.get(i).map(|p| p.1);
                Err((prev, next, i))
            }
        }
    }

    /// Run count after adding `(x, y)`, or `None` if `x` already carries the other label.
    pub fn runs_with(&self, x: f64, y: Label) -> Option<usize> {
        match self.neighbours(x) {
            Ok(i) => (self.points[i].1 == y).then_some(self.runs),
            Err((prev, next, _)) => {
                let p = prev == Some(Label::Pos);
                let n = next == Some(Label::Pos);
                Some(match y {
                    Label::Pos if !p && !n => self.runs + 1,
                    Label::Neg if p && n => self.runs + 1,
                    _ => self.runs,
                })
            }
        }
    }

    fn insert(&mut self, x: f64, y: Label) {
        if y.is_pos() && !(x > 0.0 && x < 1.0) {
            self.pos_outside = true;
        }
        match self.runs_with(x, y) {
            None => self.conflict = true,
            Some(r) => {
                self.runs = r;
                if let Err((_, _, i)) = self.neighbours(x) {
                    self.points.insert(i, (x, y));
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct RectCache {
    pub k: usize,
    /// Closure box of the positives.
    pub closure: Option<(Vec<f64>, Vec<f64>)>,
    pub negatives: Vec<Vec<f64>>,
    pub conflict: bool,
}

impl RectCache {
    pub fn in_closure(&self, x: &[f64]) -> bool {
        match &self.closure {
            Some((lo, hi)) => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| a <= v && v <= b),
            None => false,
        }
    }

    /// Whether the hull of the closure and `x` avoids every negative.
    pub fn hull_clear(&self, x: &[f64]) -> bool {
        let (lo, hi) = match &self.closure {
            Some(c) => c,
            None => return !self.negatives.iter().any(|q| q.as_slice() == x),
        };
        self.negatives.iter().all(|q| {
            !q.iter().enumerate().all(|(j, v)| {
                let a = lo[j].min(x[j]);
                let b = hi[j].max(x[j]);
                a <= *v && *v <= b
            })
        })
    }

    fn insert(&mut self, x: &[f64], y: Label) {
        match y {
            Label::Pos => {
                if !self.hull_clear(x) {
                    self.conflict = true;
                }
                match &mut self.closure {
                    Some((lo, hi)) => {
                        for j in 0..self.k {
                            lo[j] = lo[j].min(x[j]);
                            hi[j] = hi[j].max(x[j]);
                        }
                    }
                    None => self.closure = Some((x.to_vec(), x.to_vec())),
                }
            }
            Label::Neg => {
                if self.in_closure(x) {
                    self.conflict = true;
                }
                self.negatives.push(x.to_vec());
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LinearCache {
    pub k: usize,
    pub feasible: bool,
    /// Separators consistent with every constraint.
    pub witnesses: Vec<Halfspace>,
}

#[derive(Debug, Clone)]
pub(crate) struct FiniteCache {
    pub table: Arc<FiniteClassTable>,
    pub consistent: Vec<bool>,
}

#[derive(Debug, Clone)]
pub(crate) enum Cache {
    Threshold { neg_max: f64, pos_min: f64 },
    Intervals(IntervalCache),
    Rect(RectCache),
    Linear(LinearCache),
    Finite(FiniteCache),
    Adjoined {
        base: Box<Cache>,
        extra: Hypothesis,
        extra_consistent: bool,
    },
}

impl Cache {
    fn empty(class: &ConceptClass) -> Cache {
        match class {
            ConceptClass::Threshold => Cache::Threshold {
                neg_max: f64::NEG_INFINITY,
                pos_min: f64::INFINITY,
            },
            ConceptClass::IntervalUnion { k } => Cache::Intervals(IntervalCache::new(*k)),
            ConceptClass::AxisRect { k } => Cache::Rect(RectCache {
                k: *k,
                closure: None,
                negatives: Vec::new(),
                conflict: false,
            }),
            ConceptClass::LinearSep { k } => Cache::Linear(LinearCache {
                k: *k,
                feasible: true,
                witnesses: vec![
                    Halfspace::Constant {
                        k: *k,
                        label: Label::Pos,
                    },
                    Halfspace::Constant {
                        k: *k,
                        label: Label::Neg,
                    },
                ],
            }),
            ConceptClass::Finite(t) => Cache::Finite(FiniteCache {
                table: t.clone(),
                consistent: vec![true; t.len()],
            }),
            ConceptClass::Adjoined { base, extra } => Cache::Adjoined {
                base: Box::new(Cache::empty(base)),
                extra: (**extra).clone(),
                extra_consistent: true,
            },
        }
    }
}

/// The version space of a class and a constraint sample, held implicitly.
///
/// The cache is a pure function of the class and the constraints; insertion
/// order does not affect any answer.
#[derive(Debug, Clone)]
pub struct VersionSpace {
    class: ConceptClass,
    constraints: Vec<Example>,
    pub(crate) cache: Cache,
}

impl VersionSpace {
    /// The version space of the whole class.
    pub fn full(class: ConceptClass) -> Self {
        let cache = Cache::empty(&class);
        VersionSpace {
            class,
            constraints: Vec::new(),
            cache,
        }
    }

    pub fn new(class: ConceptClass, constraints: &[Example]) -> Result<Self> {
        let mut v = VersionSpace::full(class);
        for ex in constraints {
            v.insert(ex.clone())?;
        }
        Ok(v)
    }

    pub fn class(&self) -> &ConceptClass {
        &self.class
    }

    pub fn constraints(&self) -> &[Example] {
        &self.constraints
    }

    /// Adds one constraint.
    pub fn insert(&mut self, ex: Example) -> Result<()> {
        self.class.check_point(&ex.x)?;
        let linear_points = if matches!(self.class.base(), ConceptClass::LinearSep { .. }) {
            Some(&self.constraints)
        } else {
            None
        };
        insert_cache(&mut self.cache, ex.x.coords(), ex.y, linear_points);
        self.constraints.push(ex);
        Ok(())
    }

    /// Clone with one more constraint.
    pub fn with(&self, ex: Example) -> Result<Self> {
        let mut v = self.clone();
        v.insert(ex)?;
        Ok(v)
    }

    /// Whether some hypothesis is consistent with every constraint.
    pub fn is_feasible(&self) -> bool {
        cache_feasible(&self.cache)
    }

    /// Whether the constraints plus `(x, y)` remain realizable.
    pub fn label_feasible(&self, x: &Point, y: Label) -> Result<bool> {
        self.class.check_point(x)?;
        Ok(self.label_feasible_raw(x.coords(), y))
    }

    pub(crate) fn label_feasible_raw(&self, x: &[f64], y: Label) -> bool {
        label_feasible_cache(&self.cache, x, y, &self.constraints)
    }

    /// `x ∈ DIS(VS)`: both labels are consistent.
    pub fn dis_member(&self, x: &Point) -> Result<bool> {
        self.class.check_point(x)?;
        if !self.is_feasible() {
            return Err(Error::Infeasible);
        }
        Ok(self.dis_member_raw(x.coords()))
    }

    pub(crate) fn dis_member_raw(&self, x: &[f64]) -> bool {
        self.label_feasible_raw(x, Label::Pos) && self.label_feasible_raw(x, Label::Neg)
    }

    pub fn unanimous_label(&self, x: &Point) -> Result<Unanimity> {
        self.class.check_point(x)?;
        if !self.is_feasible() {
            return Err(Error::Infeasible);
        }
        let pos = self.label_feasible_raw(x.coords(), Label::Pos);
        let neg = self.label_feasible_raw(x.coords(), Label::Neg);
        Ok(match (pos, neg) {
            (true, true) => Unanimity::Disagreement,
            (true, false) => Unanimity::Label(Label::Pos),
            _ => Unanimity::Label(Label::Neg),
        })
    }

    /// Whether hypothesis `h` lies in this version space.
    pub fn contains(&self, h: &Hypothesis) -> bool {
        self.class.contains(h)
            && self
                .constraints
                .iter()
                .all(|ex| h.label_of(ex.x.coords()) == ex.y)
    }
}

fn cache_feasible(c: &Cache) -> bool {
    match c {
        Cache::Threshold { neg_max, pos_min } => neg_max < pos_min,
        Cache::Intervals(iv) => !iv.conflict && !iv.pos_outside && iv.runs <= iv.k,
        Cache::Rect(r) => !r.conflict,
        Cache::Linear(l) => l.feasible,
        Cache::Finite(f) => f.consistent.iter().any(|b| *b),
        Cache::Adjoined {
            base,
            extra_consistent,
            ..
        } => *extra_consistent || cache_feasible(base),
    }
}

fn insert_cache(c: &mut Cache, x: &[f64], y: Label, prior: Option<&Vec<Example>>) {
    match c {
        Cache::Threshold { neg_max, pos_min } => match y {
            Label::Pos => *pos_min = pos_min.min(x[0]),
            Label::Neg => *neg_max = neg_max.max(x[0]),
        },
        Cache::Intervals(iv) => iv.insert(x[0], y),
        Cache::Rect(r) => r.insert(x, y),
        Cache::Linear(l) => {
            if !l.feasible {
                return;
            }
            l.witnesses.retain(|h| h.label_of(x) == y);
            if l.witnesses.is_empty() {
                let prior = prior.map(|p| p.as_slice()).unwrap_or(&[]);
                let mut pts: Vec<(&[f64], Label)> =
                    prior.iter().map(|e| (e.x.coords(), e.y)).collect();
                pts.push((x, y));
                let s = separating_hyperplane(l.k, &pts);
                l.feasible = s.separable;
                l.witnesses.extend(s.witness);
            }
        }
        Cache::Finite(f) => {
            let i = x[0] as usize;
            for (ok, row) in f.consistent.iter_mut().zip(f.table.rows()) {
                *ok = *ok && row[i] == y;
            }
        }
        Cache::Adjoined {
            base,
            extra,
            extra_consistent,
        } => {
            insert_cache(base, x, y, prior);
            *extra_consistent = *extra_consistent && extra.label_of(x) == y;
        }
    }
}

fn label_feasible_cache(c: &Cache, x: &[f64], y: Label, prior: &[Example]) -> bool {
    match c {
        Cache::Threshold { neg_max, pos_min } => {
            neg_max < pos_min
                && match y {
                    Label::Pos => x[0] > *neg_max,
                    Label::Neg => x[0] < *pos_min,
                }
        }
        Cache::Intervals(iv) => {
            cache_feasible(c)
                && (y == Label::Neg || (x[0] > 0.0 && x[0] < 1.0))
                && iv.runs_with(x[0], y).is_some_and(|r| r <= iv.k)
        }
        Cache::Rect(r) => {
            !r.conflict
                && match y {
                    Label::Pos => r.hull_clear(x),
                    Label::Neg => !r.in_closure(x),
                }
        }
        Cache::Linear(l) => {
            if !l.feasible {
                return false;
            }
            if l.witnesses.iter().any(|h| h.label_of(x) == y) {
                return true;
            }
            let mut pts: Vec<(&[f64], Label)> = prior.iter().map(|e| (e.x.coords(), e.y)).collect();
            pts.push((x, y));
            separating_hyperplane(l.k, &pts).separable
        }
        Cache::Finite(f) => {
            let i = x[0] as usize;
            f.consistent
                .iter()
                .zip(f.table.rows())
                .any(|(ok, row)| *ok && row[i] == y)
        }
        Cache::Adjoined {
            base,
            extra,
            extra_consistent,
        } => (*extra_consistent && extra.label_of(x) == y) || label_feasible_cache(base, x, y, prior),
    }
}

/// Whether some hypothesis of `class` is consistent with every example.
pub fn feasible(class: &ConceptClass, sample: &[Example]) -> Result<bool> {
    Ok(VersionSpace::new(class.clone(), sample)?.is_feasible())
}
