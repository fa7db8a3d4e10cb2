//! Concept classes, hypotheses and the exact version-space oracles.
//!
//! Boundary conventions are fixed so every oracle is deterministic:
//! intervals and rectangles are closed sets, and linear separators use
//! `sign(0) = +1`. The threshold class `h_t(x) = +1 iff x >= t` admits the
//! sentinels `t = -inf` (constant `+1`) and `t = +inf` (constant `-1`), so its
//! region of disagreement before any label is the whole line.

mod lp;
mod region;
mod version_space;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use lp::{maximize, separating_hyperplane, LpOutcome, LpScalar, Separation};
pub use region::{dis_region_mass, sup_error_in_vs, RECT_SUP_MAX_DIM};
pub use version_space::{feasible, Unanimity, VersionSpace};

/// Tolerance on `|w| = 1` for linear separators.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A point of the instance space.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Point(coords))
    }

    /// One-dimensional point. Panics on non-finite input.
    pub fn scalar(x: f64) -> Self {
        assert!(x.is_finite(), "point coordinate must be finite");
        Point(vec![x])
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// First coordinate; the value for one-dimensional classes.
    pub fn x(&self) -> f64 {
        self.0[0]
    }
}

/// Binary label in `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    pub fn from_sign(positive: bool) -> Self {
        if positive {
            Label::Pos
        } else {
            Label::Neg
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Label::Neg => Label::Pos,
            Label::Pos => Label::Neg,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Label::Neg => -1,
            Label::Pos => 1,
        }
    }

    pub fn is_pos(self) -> bool {
        self == Label::Pos
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// One labeled example `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub x: Point,
    pub y: Label,
}

impl Example {
    pub fn new(x: Point, y: Label) -> Self {
        Example { x, y }
    }

    /// One-dimensional example; `y` is a sign (`> 0` positive).
    pub fn scalar(x: f64, y: i8) -> Self {
        Example {
            x: Point::scalar(x),
            y: Label::from_sign(y > 0),
        }
    }

    pub fn flipped(&self) -> Self {
        Example {
            x: self.x.clone(),
            y: self.y.flip(),
        }
    }
}

/// Ordered sequence of labeled examples.
pub type LabeledSample = Vec<Example>;

/// An axis-aligned rectangle hypothesis; `Empty` is the all-negative sentinel.
#[derive(Debug, Clone, PartialEq)]
pub enum Rect {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Empty { k: usize },
}

/// A linear separator `sign(b + w.x)` or one of the two constant functions.
#[derive(Debug, Clone, PartialEq)]
pub enum Halfspace {
    Plane { w: Vec<f64>, b: f64 },
    Constant { k: usize, label: Label },
}

impl Halfspace {
    pub fn dim(&self) -> usize {
        match self {
            Halfspace::Plane { w, .. } => w.len(),
            Halfspace::Constant { k, .. } => *k,
        }
    }

    pub(crate) fn label_of(&self, x: &[f64]) -> Label {
        match self {
            Halfspace::Plane { w, b } => {
                let s = b + w.iter().zip(x).map(|(a, c)| a * c).sum::<f64>();
                Label::from_sign(s >= 0.0)
            }
            Halfspace::Constant { label, .. } => *label,
        }
    }
}

/// Explicit finite concept class: rows are hypotheses, columns domain points.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteClassTable {
    domain: Vec<String>,
    rows: Vec<Vec<Label>>,
}

impl FiniteClassTable {
    pub fn new(domain: Vec<String>, rows: Vec<Vec<Label>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidTable("empty class table".into()));
        }
        if domain.is_empty() {
            return Err(Error::InvalidTable("empty domain".into()));
        }
        let mut names = domain.clone();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTable("duplicate domain point".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != domain.len()) {
            return Err(Error::InvalidTable(format!(
                "row {bad} has {} labels for {} domain points",
                rows[bad].len(),
                domain.len()
            )));
        }
        let mut sorted = rows.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTable("duplicate hypothesis row".into()));
        }
        Ok(FiniteClassTable { domain, rows })
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn rows(&self) -> &[Vec<Label>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn domain_len(&self) -> usize {
        self.domain.len()
    }

    /// The point encoding domain element `i` (its index as a coordinate).
    pub fn point(&self, i: usize) -> Point {
        Point(vec![i as f64])
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.domain.iter().position(|d| d == name)
    }

    /// Domain index of an encoded point.
    pub fn index_of(&self, x: &Point) -> Result<usize> {
        if x.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: x.dim(),
            });
        }
        let v = x.x();
        let i = v as usize;
        if v < 0.0 || v.fract() != 0.0 || i >= self.domain.len() {
            return Err(Error::InvalidArgument(format!(
                "{v} is not a domain index of the finite class"
            )));
        }
        Ok(i)
    }
}

/// A classifier from one of the supported concept classes.
#[derive(Debug, Clone, PartialEq)]
pub enum Hypothesis {
    /// `+1` iff `x >= t`; `t = -inf` / `+inf` are the constant functions.
    Threshold { t: f64 },
    /// `+1` on the union of `[z_{2i-1}, z_{2i}]`; boundaries strictly increasing in `(0,1)`.
    IntervalUnion { boundaries: Vec<f64> },
    AxisRect(Rect),
    LinearSep(Halfspace),
    FiniteMember {
        table: Arc<FiniteClassTable>,
        index: usize,
    },
}

impl Hypothesis {
    pub fn threshold(t: f64) -> Result<Self> {
        if t.is_nan() {
            return Err(Error::NonFinite("threshold"));
        }
        Ok(Hypothesis::Threshold { t })
    }

    pub fn interval_union(boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.is_empty() || boundaries.len() % 2 != 0 {
            return Err(Error::InvalidHypothesis(
                "interval union needs an even, nonzero number of boundaries".into(),
            ));
        }
        if boundaries.iter().any(|z| !(*z > 0.0 && *z < 1.0)) {
            return Err(Error::InvalidHypothesis(
                "interval boundaries must lie in (0,1)".into(),
            ));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidHypothesis(
                "interval boundaries must be strictly increasing".into(),
            ));
        }
        Ok(Hypothesis::IntervalUnion { boundaries })
    }

    /// The k-interval target with boundaries `z_i = i / (2k + 1)`.
    pub fn equispaced_intervals(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let n = (2 * k + 1) as f64;
        Hypothesis::interval_union((1..=2 * k).map(|i| i as f64 / n).collect())
    }

    pub fn axis_rect(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidHypothesis(
                "rectangle corners must have equal nonzero dimension".into(),
            ));
        }
        if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("rectangle corners"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidHypothesis("rectangle needs lo <= hi".into()));
        }
        Ok(Hypothesis::AxisRect(Rect::Box { lo, hi }))
    }

    pub fn empty_rect(k: usize) -> Self {
        Hypothesis::AxisRect(Rect::Empty { k })
    }

    pub fn linear(w: Vec<f64>, b: f64) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidHypothesis("empty weight vector".into()));
        }
        if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(Error::NonFinite("separator parameters"));
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidHypothesis(format!(
                "separator weight norm is {norm}, expected 1"
            )));
        }
        Ok(Hypothesis::LinearSep(Halfspace::Plane { w, b }))
    }

    /// Linear separator from an arbitrary nonzero `w`, rescaling `(w, b)`.
    pub fn linear_normalized(w: Vec<f64>, b: f64) -> Result<Self> {
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidHypothesis("weight vector must be nonzero".into()));
        }
        Hypothesis::linear(w.iter().map(|v| v / norm).collect(), b / norm)
    }

    pub fn linear_constant(k: usize, label: Label) -> Self {
        Hypothesis::LinearSep(Halfspace::Constant { k, label })
    }

    pub fn finite(table: Arc<FiniteClassTable>, index: usize) -> Result<Self> {
        if index >= table.len() {
            return Err(Error::InvalidHypothesis(format!(
                "row {index} out of range for a class of {} hypotheses",
                table.len()
            )));
        }
        Ok(Hypothesis::FiniteMember { table, index })
    }

    pub fn dim(&self) -> usize {
        match self {
            Hypothesis::Threshold { .. }
            | Hypothesis::IntervalUnion { .. }
            | Hypothesis::FiniteMember { .. } => 1,
            Hypothesis::AxisRect(Rect::Box { lo, .. }) => lo.len(),
            Hypothesis::AxisRect(Rect::Empty { k }) => *k,
            Hypothesis::LinearSep(h) => h.dim(),
        }
    }

    pub fn evaluate(&self, x: &Point) -> Result<Label> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        if let Hypothesis::FiniteMember { table, .. } = self {
            table.index_of(x)?;
        }
        Ok(self.label_of(x.coords()))
    }

    /// Evaluation without dimension checks; callers validate first.
    pub(crate) fn label_of(&self, x: &[f64]) -> Label {
        match self {
            Hypothesis::Threshold { t } => Label::from_sign(x[0] >= *t),
            Hypothesis::IntervalUnion { boundaries } => {
                let v = x[0];
                Label::from_sign(
                    boundaries
                        .chunks_exact(2)
                        .any(|iv| iv[0] <= v && v <= iv[1]),
                )
            }
            Hypothesis::AxisRect(Rect::Box { lo, hi }) => Label::from_sign(
                x.iter()
                    .zip(lo.iter().zip(hi))
                    .all(|(v, (a, b))| a <= v && v <= b),
            ),
            Hypothesis::AxisRect(Rect::Empty { .. }) => Label::Neg,
            Hypothesis::LinearSep(h) => h.label_of(x),
            Hypothesis::FiniteMember { table, index } => table.rows[*index][x[0] as usize],
        }
    }

    /// Ordered boundaries of the positive set of a one-dimensional hypothesis,
    /// as `(position, label to the right)`.
    pub(crate) fn breakpoints_1d(&self) -> Option<Vec<f64>> {
        match self {
            Hypothesis::Threshold { t } if t.is_finite() => Some(vec![*t]),
            Hypothesis::Threshold { .. } => Some(Vec::new()),
            Hypothesis::IntervalUnion { boundaries } => Some(boundaries.clone()),
            _ => None,
        }
    }
}

/// Descriptor of a concept class.
#[derive(Debug, Clone, PartialEq)]
pub enum ConceptClass {
    /// Thresholds on the line, including both constant functions.
    Threshold,
    /// Unions of exactly `k` closed intervals with boundaries in `(0,1)`.
    IntervalUnion { k: usize },
    /// Closed axis-aligned rectangles in `R^k` plus the all-negative function.
    AxisRect { k: usize },
    /// Linear separators in `R^k` plus the two constant functions.
    LinearSep { k: usize },
    Finite(Arc<FiniteClassTable>),
    /// `F ∪ {extra}` for an extra labeler that need not belong to `F`.
    Adjoined {
        base: Box<ConceptClass>,
        extra: Box<Hypothesis>,
    },
}

impl ConceptClass {
    pub fn dim(&self) -> usize {
        match self {
            ConceptClass::Threshold | ConceptClass::IntervalUnion { .. } => 1,
            ConceptClass::AxisRect { k } | ConceptClass::LinearSep { k } => *k,
            ConceptClass::Finite(_) => 1,
            ConceptClass::Adjoined { base, .. } => base.dim(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ConceptClass::Threshold => "threshold".into(),
            ConceptClass::IntervalUnion { k } => format!("interval_union(k={k})"),
            ConceptClass::AxisRect { k } => format!("axis_rect(k={k})"),
            ConceptClass::LinearSep { k } => format!("linear_sep(k={k})"),
            ConceptClass::Finite(t) => format!("finite({} rows)", t.len()),
            ConceptClass::Adjoined { base, .. } => format!("{} + extra labeler", base.name()),
        }
    }

    /// Whether `h` is a member of this class.
    pub fn contains(&self, h: &Hypothesis) -> bool {
        match (self, h) {
            (ConceptClass::Threshold, Hypothesis::Threshold { .. }) => true,
            (ConceptClass::IntervalUnion { k }, Hypothesis::IntervalUnion { boundaries }) => {
                boundaries.len() == 2 * k
            }
            (ConceptClass::AxisRect { k }, Hypothesis::AxisRect(_)) => h.dim() == *k,
            (ConceptClass::LinearSep { k }, Hypothesis::LinearSep(_)) => h.dim() == *k,
            (ConceptClass::Finite(t), Hypothesis::FiniteMember { table, .. }) => {
                Arc::ptr_eq(t, table) || **t == **table
            }
            (ConceptClass::Adjoined { base, extra }, _) => **extra == *h || base.contains(h),
            _ => false,
        }
    }

    /// `F ∪ {extra}`.
    pub fn adjoin(&self, extra: Hypothesis) -> Result<ConceptClass> {
        if extra.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: extra.dim(),
            });
        }
        Ok(ConceptClass::Adjoined {
            base: Box::new(self.clone()),
            extra: Box::new(extra),
        })
    }

    pub(crate) fn check_point(&self, x: &Point) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        if let ConceptClass::Finite(t) = self.base() {
            t.index_of(x)?;
        }
        Ok(())
    }

    /// The class with any adjoined labeler stripped.
    pub fn base(&self) -> &ConceptClass {
        match self {
            ConceptClass::Adjoined { base, .. } => base.base(),
            c => c,
        }
    }
}
