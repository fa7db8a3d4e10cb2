//! Dense two-phase simplex with Bland's rule, generic over the scalar field,
//! and the strict linear-separability test built on it.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use super::{Halfspace, Label};

/// Margin below which the floating-point answer counts as degenerate.
pub const MARGIN_TOL: f64 = 1e-9;

/// Highest dimension for which degenerate instances are re-solved exactly.
pub const EXACT_FALLBACK_MAX_DIM: usize = 3;

const MAX_PIVOTS: usize = 200_000;

/// Ordered field the simplex can run over.
pub trait LpScalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Strictly positive beyond the field's tolerance.
    fn is_pos(&self) -> bool;
    /// Strictly negative beyond the field's tolerance.
    fn is_neg(&self) -> bool;
}

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_pos(&self) -> bool {
        *self > 1e-11
    }
    fn is_neg(&self) -> bool {
        *self < -1e-11
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        BigRational::from_integer(BigInt::from(1))
    }
    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite input")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
    /// Pivot budget exhausted (only reachable through rounding).
    Stalled,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    cost: Vec<T>,
    value: T,
    blocked: Vec<bool>,
}

impl<T: LpScalar> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if !f.is_pos() && !f.is_neg() {
                self.rows[i][c] = T::zero();
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * pv.clone();
            }
            self.rhs[i] = self.rhs[i].clone() - f * prhs.clone();
        }
        let f = self.cost[c].clone();
        for (v, pv) in self.cost.iter_mut().zip(&prow) {
            *v = v.clone() - f.clone() * pv.clone();
        }
        self.value = self.value.clone() + f * prhs;
        self.basis[r] = c;
    }

    /// Runs Bland's rule to optimality. `Ok(false)` means unbounded.
    fn optimize(&mut self) -> Result<bool, ()> {
        for _ in 0..MAX_PIVOTS {
            let enter = (0..self.cost.len()).find(|&j| !self.blocked[j] && self.cost[j].is_pos());
            let Some(c) = enter else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][c].is_pos() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / self.rows[i][c].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (!(ratio > *br) && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Ok(false),
            }
        }
        Err(())
    }
}

/// Maximizes `c.x` subject to `a x <= b`, `x >= 0`. Rows of `b` may be negative.
pub fn maximize<T: LpScalar>(c: &[T], a: &[Vec<T>], b: &[T]) -> LpOutcome<T> {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m, "one right-hand side per constraint row");
    let neg_rows: Vec<usize> = (0..m).filter(|&i| b[i].is_neg()).collect();
    let n_art = neg_rows.len();
    let width = n + m + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = 0;
    for i in 0..m {
        assert_eq!(a[i].len(), n, "constraint row width must match objective");
        let mut row = vec![T::zero(); width];
        let flip = b[i].is_neg();
        for j in 0..n {
            row[j] = if flip { -a[i][j].clone() } else { a[i][j].clone() };
        }
        row[n + i] = if flip { -T::one() } else { T::one() };
        if flip {
            row[n + m + art] = T::one();
            basis.push(n + m + art);
            art += 1;
            rhs.push(-b[i].clone());
        } else {
            basis.push(n + i);
            rhs.push(b[i].clone());
        }
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis,
        cost: vec![T::zero(); width],
        value: T::zero(),
        blocked: vec![false; width],
    };

    if n_art > 0 {
        // Phase one: maximize -sum(artificials); reduced costs priced out along artificial rows.
        for &i in &neg_rows {
            for j in 0..width {
                t.cost[j] = t.cost[j].clone() + t.rows[i][j].clone();
            }
            t.value = t.value.clone() - t.rhs[i].clone();
        }
        for j in n + m..width {
            t.cost[j] = T::zero();
        }
        if t.optimize().is_err() {
            return LpOutcome::Stalled;
        }
        if t.value.is_neg() {
            return LpOutcome::Infeasible;
        }
        for r in 0..m {
            if t.basis[r] >= n + m {
                if let Some(c) = (0..n + m).find(|&j| t.rows[r][j].is_pos() || t.rows[r][j].is_neg())
                {
                    t.pivot(r, c);
                }
            }
        }
        for j in n + m..width {
            t.blocked[j] = true;
        }
    }

    // Phase two: reduced costs of the true objective at the current basis.
    let mut cost = vec![T::zero(); width];
    cost[..n].clone_from_slice(c);
    let mut value = T::zero();
    for r in 0..m {
        let bj = t.basis[r];
        if bj < n {
            let cb = c[bj].clone();
            for j in 0..width {
                cost[j] = cost[j].clone() - cb.clone() * t.rows[r][j].clone();
            }
            value = value + cb * t.rhs[r].clone();
        }
    }
    t.cost = cost;
    t.value = value;
    match t.optimize() {
        Err(()) => LpOutcome::Stalled,
        Ok(false) => LpOutcome::Unbounded,
        Ok(true) => {
            let mut x = vec![T::zero(); n];
            for r in 0..m {
                if t.basis[r] < n {
                    x[t.basis[r]] = t.rhs[r].clone();
                }
            }
            let value = c
                .iter()
                .zip(&x)
                .fold(T::zero(), |acc, (ci, xi)| acc + ci.clone() * xi.clone());
            LpOutcome::Optimal { x, value }
        }
    }
}

/// Result of the strict-separability test.
#[derive(Debug, Clone)]
pub struct Separation {
    pub separable: bool,
    /// Optimal margin of the normalized program (sup-norm of `w` at most 1).
    pub margin: f64,
    /// A consistent separator, verified in floating point.
    pub witness: Option<Halfspace>,
    /// Whether the answer came from the exact rational solve.
    pub exact: bool,
}

fn program<T: LpScalar>(k: usize, points: &[(&[f64], Label)]) -> (Vec<T>, Vec<Vec<T>>, Vec<T>) {
    // Variables: w+ (k), w- (k), b+, b-, t+, t-; the margin t = t+ - t- may be negative.
    let n = 2 * k + 4;
    let scale = points
        .iter()
        .flat_map(|(x, _)| x.iter())
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let bbound = T::from_f64(k as f64 * scale + 1.0);
    let mut a = Vec::with_capacity(points.len() + n);
    let mut b = Vec::with_capacity(points.len() + n);
    for (x, y) in points {
        let s = if y.is_pos() { -1.0 } else { 1.0 };
        let mut row = vec![T::zero(); n];
        for j in 0..k {
            row[j] = T::from_f64(s * x[j]);
            row[k + j] = T::from_f64(-s * x[j]);
        }
        row[2 * k] = T::from_f64(s);
        row[2 * k + 1] = T::from_f64(-s);
        row[2 * k + 2] = T::one();
        row[2 * k + 3] = -T::one();
        a.push(row);
        b.push(T::zero());
    }
    for j in 0..n {
        let mut row = vec![T::zero(); n];
        row[j] = T::one();
        a.push(row);
        b.push(if j == 2 * k || j == 2 * k + 1 {
            bbound.clone()
        } else if j == 2 * k + 3 {
            bbound.clone() + bbound.clone()
        } else {
            T::one()
        });
    }
    let mut c = vec![T::zero(); n];
    c[2 * k + 2] = T::one();
    c[2 * k + 3] = -T::one();
    (c, a, b)
}

/// Best margin over `||w||_inf = 1`, as the maximum over the `2k` faces.
fn face_margin(k: usize, points: &[(&[f64], Label)]) -> f64 {
    let (c, a, b) = program::<f64>(k, points);
    let mut best = f64::NEG_INFINITY;
    for j in 0..k {
        for sign in [1.0, -1.0] {
            let mut a = a.clone();
            let mut b = b.clone();
            let mut row = vec![0.0; c.len()];
            row[j] = sign;
            row[k + j] = -sign;
            a.push(row.iter().map(|v| -v).collect());
            b.push(-1.0);
            a.push(row);
            b.push(1.0);
            match maximize(&c, &a, &b) {
                LpOutcome::Optimal { value, .. } => best = best.max(value),
                // An unsolved face cannot rule anything out.
                _ => return 0.0,
            }
        }
    }
    best
}

fn witness_from(k: usize, x: &[f64], points: &[(&[f64], Label)]) -> Option<Halfspace> {
    let w: Vec<f64> = (0..k).map(|j| x[j] - x[k + j]).collect();
    let b = x[2 * k] - x[2 * k + 1];
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return None;
    }
    let h = Halfspace::Plane {
        w: w.iter().map(|v| v / norm).collect(),
        b: b / norm,
    };
    points
        .iter()
        .all(|(p, y)| h.label_of(p) == *y)
        .then_some(h)
}

/// Decides whether some `sign(b + w.x)` labels every point correctly.
///
/// One-label (or empty) samples are realized by a constant function. Otherwise
/// the margin program is solved in `f64`; a margin within `MARGIN_TOL` of zero
/// is re-solved over the rationals when `k <= EXACT_FALLBACK_MAX_DIM`.
pub fn separating_hyperplane(k: usize, points: &[(&[f64], Label)]) -> Separation {
    let first = points.first().map(|p| p.1);
    if points.iter().all(|p| Some(p.1) == first) {
        return Separation {
            separable: true,
            margin: f64::INFINITY,
            witness: Some(Halfspace::Constant {
                k,
                label: first.unwrap_or(Label::Pos),
            }),
            exact: false,
        };
    }
    let (c, a, b) = program::<f64>(k, points);
    let (margin, x) = match maximize(&c, &a, &b) {
        LpOutcome::Optimal { x, value } => (value, Some(x)),
        _ => (0.0, None),
    };
    if margin <= MARGIN_TOL {
        // The program above attains 0 at w = 0 on any sample. Pinning one
        // coordinate of w to +-1 makes the optimum negative on overlapping
        // hulls, which settles most cases without the rational solve.
        let depth = face_margin(k, points);
        if depth < -MARGIN_TOL {
            return Separation {
                separable: false,
                margin: depth,
                witness: None,
                exact: false,
            };
        }
    }
    if margin > MARGIN_TOL {
        if let Some(w) = x.as_deref().and_then(|x| witness_from(k, x, points)) {
            return Separation {
                separable: true,
                margin,
                witness: Some(w),
                exact: false,
            };
        }
    }
    if k <= EXACT_FALLBACK_MAX_DIM {
        let (c, a, b) = program::<BigRational>(k, points);
        return match maximize(&c, &a, &b) {
            LpOutcome::Optimal { x, value } if Signed::is_positive(&value) => {
                let xf: Vec<f64> = x.iter().map(LpScalar::to_f64).collect();
                Separation {
                    separable: true,
                    margin: LpScalar::to_f64(&value),
                    witness: witness_from(k, &xf, points),
                    exact: true,
                }
            }
            LpOutcome::Optimal { value, .. } => Separation {
                separable: false,
                margin: LpScalar::to_f64(&value),
                witness: None,
                exact: true,
            },
            _ => Separation {
                separable: false,
                margin: 0.0,
                witness: None,
                exact: true,
            },
        };
    }
    Separation {
        separable: margin > MARGIN_TOL,
        margin,
        witness: None,
        exact: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let c = vec![3.0, 5.0];
        let a = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]];
        let b = vec![4.0, 12.0, 18.0];
        match maximize(&c, &a, &b) {
            LpOutcome::Optimal { x, value } => {
                assert!((value - 36.0).abs() < 1e-9);
                assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
            }
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn phase_one_negative_rhs() {
        // max -x - y, x + y >= 2 (as -x - y <= -2), x <= 3 -> -2
        let c = vec![q(-1), q(-1)];
        let a = vec![vec![q(-1), q(-1)], vec![q(1), q(0)]];
        let b = vec![q(-2), q(3)];
        match maximize(&c, &a, &b) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(-2)),
            o => panic!("unexpected {o:?}"),
        }
        let cf = vec![-1.0, -1.0];
        let af = vec![vec![-1.0, -1.0], vec![1.0, 0.0]];
        match maximize(&cf, &af, &[-2.0, 3.0]) {
            LpOutcome::Optimal { value, .. } => assert!((value + 2.0).abs() < 1e-12),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x >= 2 and x <= 1
        let a = vec![vec![-1.0], vec![1.0]];
        assert_eq!(maximize(&[1.0], &a, &[-2.0, 1.0]), LpOutcome::Infeasible);
        // max x with only x >= 1
        assert_eq!(maximize(&[1.0], &[vec![-1.0]], &[-1.0]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equality_rows() {
        // x + y >= 1, x + y <= 1 twice over, maximize x
        let a = vec![vec![-1.0, -1.0], vec![1.0, 1.0], vec![-1.0, -1.0]];
        match maximize(&[1.0, 0.0], &a, &[-1.0, 1.0, -1.0]) {
            LpOutcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-12),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn separability_basic() {
        let p = [0.0, 0.0];
        let n = [1.0, 1.0];
        let s = separating_hyperplane(2, &[(&p, Label::Pos), (&n, Label::Neg)]);
        assert!(s.separable);
        let w = s.witness.unwrap();
        assert_eq!(w.label_of(&p), Label::Pos);
        assert_eq!(w.label_of(&n), Label::Neg);
    }

    #[test]
    fn xor_is_not_separable() {
        let pts = [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]];
        let lab = [Label::Pos, Label::Pos, Label::Neg, Label::Neg];
        let s: Vec<(&[f64], Label)> = pts.iter().map(|p| &p[..]).zip(lab).collect();
        let r = separating_hyperplane(2, &s);
        assert!(!r.separable);
    }

    #[test]
    fn collinear_degenerate_goes_exact() {
        // Positive at the midpoint of two negatives: margin exactly zero.
        let pts = [[0.0, 0.0], [2.0, 2.0], [1.0, 1.0]];
        let lab = [Label::Neg, Label::Neg, Label::Pos];
        let s: Vec<(&[f64], Label)> = pts.iter().map(|p| &p[..]).zip(lab).collect();
        let r = separating_hyperplane(2, &s);
        assert!(!r.separable);
        assert!(r.exact);
    }

    #[test]
    fn single_label_uses_constant() {
        let p = [3.0];
        let r = separating_hyperplane(1, &[(&p, Label::Neg)]);
        assert!(r.separable);
        assert!(matches!(
            r.witness,
            Some(Halfspace::Constant {
                label: Label::Neg,
                ..
            })
        ));
    }
}
