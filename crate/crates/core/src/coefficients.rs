//! Disagreement coefficients and quantile bounds on `ΔVS` and `N`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cal::count_queries;
use crate::dist::{
    hypothesis_distance, Distribution, LabeledStream, Marginal, MassMode, McOptions, NoiseModel, RngStream,
};
use crate::error::{Error, Result};
use crate::geometry::{dis_region_mass, ConceptClass, Halfspace, Hypothesis, Label, Point, Rect, VersionSpace};
use crate::quantile::{check_replicates, empirical_quantile, run_replicates, QuantileEstimate};

/// Largest rectangle dimension for the ball-mass quadrature.
pub const RECT_BALL_MAX_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    Exact,
    LowerEstimate,
}

impl ThetaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ThetaMode::Exact => "exact",
            ThetaMode::LowerEstimate => "lower_estimate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub r0: f64,
    pub value: f64,
    pub mode: ThetaMode,
    /// `(r, ΔB(r))` at every evaluated radius, sorted by `r`.
    pub grid: Vec<(f64, f64)>,
}

/// `r0 * 2^i` for `i >= 1` up to 1, plus 1 itself.
pub fn geometric_grid(r0: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = r0 * 2.0;
    while r < 1.0 {
        out.push(r);
        r *= 2.0;
    }
    out.push(1.0);
    out
}

/// A stretch of the line, in CDF coordinates, on which the flip distance is
/// `min(cap, a + slope (u - u0))`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    x0: f64,
    x1: f64,
    u0: f64,
    len: f64,
    a: f64,
    slope: f64,
    cap: f64,
}

impl Piece {
    fn at(&self, u: f64) -> f64 {
        self.cap.min(self.a + self.slope * (u - self.u0).clamp(0.0, self.len))
    }

    fn mass_within(&self, r: f64) -> f64 {
        if self.cap <= r {
            return self.len;
        }
        if self.slope == 0.0 {
            return if self.a <= r { self.len } else { 0.0 };
        }
        if self.slope > 0.0 {
            (r - self.a).clamp(0.0, self.len)
        } else {
            (r - (self.a - self.len)).clamp(0.0, self.len)
        }
    }

    fn kinks(&self, out: &mut Vec<f64>) {
        out.extend([self.cap, self.a, self.a + self.slope * self.len]);
    }
}

/// The flip-distance function of a target, in a form that integrates exactly.
enum Profile {
    Line { pieces: Vec<Piece>, cdf: Box<dyn Fn(f64) -> f64 + Send + Sync> },
    Rect(RectProfile),
    Atoms { flips: Vec<(f64, f64)>, mode: ThetaMode },
}

impl Profile {
    fn mode(&self) -> ThetaMode {
        match self {
            Profile::Atoms { mode, .. } => *mode,
            _ => ThetaMode::Exact,
        }
    }

    fn mass(&self, r: f64) -> f64 {
        let m = match self {
            Profile::Line { pieces, .. } => pieces.iter().map(|p| p.mass_within(r)).sum(),
            Profile::Rect(rp) => rp.mass(r),
            Profile::Atoms { flips, .. } => flips.iter().filter(|f| f.0 <= r).map(|f| f.1).sum(),
        };
        m.clamp(0.0, 1.0)
    }

    /// Radii at which `ΔB(r) / r` can attain a local supremum.
    fn kinks(&self) -> Option<Vec<f64>> {
        match self {
            Profile::Line { pieces, .. } => {
                let mut out = Vec::new();
                for p in pieces {
                    p.kinks(&mut out);
                }
                Some(out)
            }
            Profile::Atoms { flips, .. } => Some(flips.iter().map(|f| f.0).collect()),
            Profile::Rect(rp) => {
                if rp.pt > 0.0 {
                    Some(vec![rp.pt / 2.0, rp.pt])
                } else {
                    Some(Vec::new())
                }
            }
        }
    }

    fn refine(&self) -> bool {
        matches!(self, Profile::Rect(_))
    }
}

fn probe(a: f64, b: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a + 1.0,
        (false, true) => b - 1.0,
        (false, false) => 0.0,
    }
}

fn line_cdf(dist: &Distribution) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    dist.cdf1(0.0)?;
    let d = dist.clone();
    Ok(Box::new(move |x: f64| d.cdf1(x).unwrap_or(f64::NAN)))
}

/// Threshold class around an arbitrary one-dimensional labeler `f`.
fn threshold_profile(f: &Hypothesis, dist: &Distribution) -> Result<Profile> {
    let cdf = line_cdf(dist)?;
    let bps = f
        .breakpoints_1d()
        .ok_or_else(|| Error::unsupported("flip_distance", "labelers without one-dimensional breakpoints"))?;
    let n = bps.len();
    let mut segs = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x0 = if i == 0 { f64::NEG_INFINITY } else { bps[i - 1] };
        let x1 = if i == n { f64::INFINITY } else { bps[i] };
        let u0 = cdf(x0);
        let u1 = cdf(x1);
        segs.push((x0, x1, u0, (u1 - u0).max(0.0), f.label_of(&[probe(x0, x1)])));
    }
    // d[i]: distance from f of the threshold placed at the left end of segment i;
    // d[n + 1]: threshold at +inf.
    let mut d = vec![0.0; n + 2];
    d[0] = segs.iter().filter(|s| !s.4.is_pos()).map(|s| s.3).sum();
    for i in 0..=n {
        let s = &segs[i];
        d[i + 1] = d[i] + if s.4.is_pos() { s.3 } else { -s.3 };
    }
    let mut pieces = Vec::with_capacity(n + 1);
    for (i, s) in segs.iter().enumerate() {
        let (slope, cap) = if s.4.is_pos() {
            (1.0, d[i + 1..].iter().cloned().fold(f64::INFINITY, f64::min))
        } else {
            (-1.0, d[..=i].iter().cloned().fold(f64::INFINITY, f64::min))
        };
        pieces.push(Piece {
            x0: s.0,
            x1: s.1,
            u0: s.2,
            len: s.3,
            a: d[i],
            slope,
            cap,
        });
    }
    Ok(Profile::Line { pieces, cdf })
}

/// Unions of at most `k` intervals in `[0, 1]` around a member target.
fn intervals_profile(k: usize, boundaries: &[f64], dist: &Distribution) -> Result<Profile> {
    let cdf = line_cdf(dist)?;
    let j = boundaries.len() / 2;
    let m = |a: f64, b: f64| (cdf(b) - cdf(a)).max(0.0);
    let interval_mass: Vec<f64> = (0..j).map(|i| m(boundaries[2 * i], boundaries[2 * i + 1])).collect();
    let gap_mass: Vec<f64> = (1..j).map(|i| m(boundaries[2 * i - 1], boundaries[2 * i])).collect();
    let spare = j < k;
    let min_of = |v: &mut dyn Iterator<Item = f64>| v.fold(f64::INFINITY, f64::min);
    let gap_cap = if spare {
        0.0
    } else {
        min_of(&mut interval_mass.iter().chain(gap_mass.iter()).cloned())
    };
    let never = f64::INFINITY;
    let mut pieces = Vec::new();
    let mut push = |x0: f64, x1: f64, left: bool, right: bool, cap: f64| {
        let u0 = cdf(x0);
        let len = (cdf(x1) - u0).max(0.0);
        match (left, right) {
            (true, true) => {
                // Both halves span the segment; their pointwise minimum is the flip distance.
                pieces.push(Piece { x0, x1, u0, len: len / 2.0, a: 0.0, slope: 1.0, cap });
                pieces.push(Piece { x0, x1, u0: u0 + len / 2.0, len: len / 2.0, a: len / 2.0, slope: -1.0, cap });
            }
            (true, false) => pieces.push(Piece { x0, x1, u0, len, a: 0.0, slope: 1.0, cap }),
            (false, true) => pieces.push(Piece { x0, x1, u0, len, a: len, slope: -1.0, cap }),
            (false, false) => pieces.push(Piece { x0, x1, u0, len, a: cap, slope: 0.0, cap }),
        }
    };
    push(f64::NEG_INFINITY, 0.0, false, false, never);
    if j == 0 {
        push(0.0, 1.0, false, false, gap_cap);
    } else {
        push(0.0, boundaries[0], false, true, gap_cap);
        for i in 0..j {
            let cap = if spare {
                0.0
            } else {
                min_of(
                    &mut interval_mass
                        .iter()
                        .enumerate()
                        .filter(|(l, _)| *l != i)
                        .map(|(_, v)| *v)
                        .chain(gap_mass.iter().cloned()),
                )
            };
            push(boundaries[2 * i], boundaries[2 * i + 1], true, true, cap);
            if i + 1 < j {
                push(boundaries[2 * i + 1], boundaries[2 * i + 2], true, true, gap_cap);
            }
        }
        push(boundaries[2 * j - 1], 1.0, true, false, gap_cap);
    }
    push(1.0, f64::INFINITY, false, false, never);
    Ok(Profile::Line { pieces, cdf })
}

/// Box target under a product measure.
///
/// Outside the box the cheapest flip is the smaller of dropping the box and
/// stretching it to the point; inside it is the thinnest face slab reaching
/// the point.
struct RectProfile {
    t: Vec<f64>,
    below: Vec<f64>,
    above: Vec<f64>,
    pt: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    marg: Vec<Marginal>,
    empty: bool,
}

impl RectProfile {
    fn new(target: &Rect, dist: &Distribution) -> Result<Self> {
        let marg = dist
            .single_product()
            .ok_or_else(|| Error::unsupported("ball_dis_mass", "rectangles under mixture distributions"))?;
        let k = marg.len();
        if k > RECT_BALL_MAX_DIM {
            return Err(Error::TooLarge(format!(
                "rectangle dimension {k} exceeds {RECT_BALL_MAX_DIM}"
            )));
        }
        let (lo, hi, empty) = match target {
            Rect::Box { lo, hi } => (lo.clone(), hi.clone(), false),
            Rect::Empty { .. } => (vec![0.0; k], vec![0.0; k], true),
        };
        let t: Vec<f64> = (0..k).map(|j| marg[j].mass(lo[j], hi[j])).collect();
        let below: Vec<f64> = (0..k).map(|j| marg[j].cdf(lo[j])).collect();
        let above: Vec<f64> = (0..k).map(|j| (1.0 - marg[j].cdf(hi[j])).max(0.0)).collect();
        let pt = if empty { 0.0 } else { t.iter().product() };
        Ok(RectProfile { t, below, above, pt, lo, hi, marg, empty })
    }

    fn flip(&self, x: &[f64]) -> f64 {
        if self.empty {
            return 0.0;
        }
        let k = self.t.len();
        let inside = (0..k).all(|j| self.lo[j] <= x[j] && x[j] <= self.hi[j]);
        if inside {
            let mut best = self.pt;
            for j in 0..k {
                let others: f64 = (0..k).filter(|&i| i != j).map(|i| self.t[i]).product();
                let left = self.marg[j].mass(self.lo[j], x[j]);
                let right = self.marg[j].mass(x[j], self.hi[j]);
                best = best.min(others * left.min(right));
            }
            best
        } else {
            let hull: f64 = (0..k)
                .map(|j| self.marg[j].mass(self.lo[j].min(x[j]), self.hi[j].max(x[j])))
                .product();
            self.pt.min(hull - self.pt)
        }
    }

    fn mass(&self, r: f64) -> f64 {
        if self.empty || self.pt <= r {
            return 1.0;
        }
        let k = self.t.len();
        let core: f64 = (0..k)
            .map(|j| {
                let others: f64 = (0..k).filter(|&i| i != j).map(|i| self.t[i]).product();
                (self.t[j] - 2.0 * r / others).max(0.0)
            })
            .product();
        let inside = self.pt - core;
        let outside = (self.q(0, self.pt + r) - self.pt).max(0.0);
        inside + outside
    }

    /// Mass of `{x : prod_{i >= j} hull_i(x) <= c}` over coordinates `j..`.
    fn q(&self, j: usize, c: f64) -> f64 {
        let k = self.t.len();
        let (t, a, b) = (self.t[j], self.below[j], self.above[j]);
        if j + 1 == k {
            if c < t {
                return 0.0;
            }
            return t + (c - t).min(a) + (c - t).min(b);
        }
        let inner = |cc: f64| self.q(j + 1, cc);
        let mut total = t * inner(c / t);
        // Breakpoints in g where the integrand changes form.
        let mut bps = vec![0.0, a.max(b)];
        if a.min(b) > 0.0 {
            bps.push(a.min(b));
        }
        if j + 2 == k {
            let (t2, a2, b2) = (self.t[j + 1], self.below[j + 1], self.above[j + 1]);
            for v in [t2, t2 + a2, t2 + b2] {
                if v > 0.0 {
                    bps.push(c / v - t);
                }
            }
        }
        bps.retain(|g| *g >= 0.0 && *g <= a.max(b));
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let pieces = if j + 2 == k { 1 } else { 8 };
        for w in bps.windows(2) {
            let (g0, g1) = (w[0], w[1]);
            let density = (g0 < a) as u8 as f64 + (g0 < b) as u8 as f64;
            if density == 0.0 || g1 <= g0 {
                continue;
            }
            let h = (g1 - g0) / pieces as f64;
            for p in 0..pieces {
                let s0 = g0 + h * p as f64;
                total += density * gauss_legendre(s0, s0 + h, |g| inner(c / (t + g)));
            }
        }
        total
    }
}

fn legendre_nodes() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 24;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for l in 2..=n {
                    let p2 = ((2 * l - 1) as f64 * x * p1 - (l - 1) as f64 * p0) / l as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    })
}

fn gauss_legendre(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    legendre_nodes().iter().map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

fn finite_profile(target: &Hypothesis, class: &ConceptClass, dist: &Distribution) -> Result<Profile> {
    let ConceptClass::Finite(table) = class.base() else {
        unreachable!()
    };
    let Distribution::Discrete { weights } = dist else {
        return Err(Error::unsupported("ball_dis_mass", "finite classes under continuous distributions"));
    };
    if weights.len() != table.domain_len() {
        return Err(Error::DimensionMismatch {
            expected: table.domain_len(),
            got: weights.len(),
        });
    }
    let f: Vec<Label> = (0..table.domain_len()).map(|i| target.label_of(&[i as f64])).collect();
    let dists: Vec<f64> = table
        .rows()
        .iter()
        .map(|row| (0..row.len()).filter(|&i| row[i] != f[i]).map(|i| weights[i]).sum())
        .collect();
    let flips = (0..table.domain_len())
        .map(|i| {
            let d = table
                .rows()
                .iter()
                .zip(&dists)
                .filter(|(row, _)| row[i] != f[i])
                .map(|(_, d)| *d)
                .fold(f64::INFINITY, f64::min);
            (d, weights[i])
        })
        .collect();
    Ok(Profile::Atoms { flips, mode: ThetaMode::Exact })
}

const ROTATION_DEGREES: [f64; 9] = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 90.0];

/// Sampled flip distances for a separator target over a heuristic family of
/// nearby separators: translations through the point, planar rotations about
/// it, orientation reversal and the two constants. Distances to the family
/// over-estimate the true flip distance, so the resulting ball mass is a lower
/// estimate.
fn linear_profile(target: &Hypothesis, dist: &Distribution, opts: McOptions) -> Result<Profile> {
    let k = target.dim();
    let Hypothesis::LinearSep(h) = target else { unreachable!() };
    if opts.samples == 0 {
        return Err(Error::InvalidArgument("need a positive Monte Carlo sample".into()));
    }
    let mut rng = opts.rng(5);
    let reference: Vec<Point> = (0..opts.samples).map(|_| dist.sample_point(&mut rng)).collect();
    let xs: Vec<Point> = (0..opts.samples).map(|_| dist.sample_point(&mut rng)).collect();
    let f_ref: Vec<bool> = reference.iter().map(|y| h.label_of(y.coords()).is_pos()).collect();
    let p_pos = f_ref.iter().filter(|b| **b).count() as f64 / reference.len() as f64;
    let disagreement = |w: &[f64], b: f64| -> f64 {
        let miss = reference
            .iter()
            .zip(&f_ref)
            .filter(|(y, fy)| {
                let s: f64 = w.iter().zip(y.coords()).map(|(a, c)| a * c).sum::<f64>() + b;
                (s >= 0.0) != **fy
            })
            .count();
        miss as f64 / reference.len() as f64
    };
    let flips = xs
        .iter()
        .map(|x| {
            let fx = h.label_of(x.coords()).is_pos();
            let mut best = if fx { p_pos } else { 1.0 - p_pos };
            if let Halfspace::Plane { w, .. } = h {
                let dot = |v: &[f64]| v.iter().zip(x.coords()).map(|(a, c)| a * c).sum::<f64>();
                let shifted = Hypothesis::LinearSep(Halfspace::Plane { w: w.clone(), b: -dot(w) });
                let d = hypothesis_distance(dist, target, &shifted, Some(opts))
                    .map(|e| e.value)
                    .unwrap_or(f64::INFINITY);
                best = best.min(d);
                let neg: Vec<f64> = w.iter().map(|v| -v).collect();
                best = best.min(disagreement(&neg, dot(w)));
                for i in 0..k {
                    for jj in i + 1..k {
                        for deg in ROTATION_DEGREES {
                            for sign in [-1.0, 1.0] {
                                let phi = sign * deg.to_radians();
                                let (c, s) = (phi.cos(), phi.sin());
                                let mut w2 = w.clone();
                                w2[i] = c * w[i] - s * w[jj];
                                w2[jj] = s * w[i] + c * w[jj];
                                best = best.min(disagreement(&w2, -dot(&w2)));
                            }
                        }
                    }
                }
            }
            (best, 1.0 / xs.len() as f64)
        })
        .collect();
    Ok(Profile::Atoms {
        flips,
        mode: ThetaMode::LowerEstimate,
    })
}

fn profile(target: &Hypothesis, dist: &Distribution, class: &ConceptClass, mode: MassMode) -> Result<Profile> {
    dist.validate()?;
    let base = class.base();
    if base.dim() != dist.dim() {
        return Err(Error::DimensionMismatch {
            expected: base.dim(),
            got: dist.dim(),
        });
    }
    let member = base.contains(target);
    let exact_only = |p: Profile| match mode {
        MassMode::Exact => Ok(p),
        MassMode::MonteCarlo(_) => Err(Error::InvalidArgument(format!(
            "{} has an exact ball mass; use exact mode",
            base.name()
        ))),
    };
    match base {
        ConceptClass::Threshold => {
            if target.dim() != 1 {
                return Err(Error::DimensionMismatch { expected: 1, got: target.dim() });
            }
            exact_only(threshold_profile(target, dist)?)
        }
        ConceptClass::IntervalUnion { k } => {
            let Hypothesis::IntervalUnion { boundaries } = target else {
                return Err(Error::EstimateOnly("flip distance for labelers outside interval unions"));
            };
            // Fewer intervals are limits of members, so the infimum is unchanged.
            if boundaries.len() > 2 * k {
                return Err(Error::EstimateOnly("flip distance for labelers outside interval unions"));
            }
            exact_only(intervals_profile(*k, boundaries, dist)?)
        }
        ConceptClass::AxisRect { .. } => {
            let Hypothesis::AxisRect(r) = target else {
                return Err(Error::EstimateOnly("flip distance for labelers outside rectangles"));
            };
            if !member {
                return Err(Error::EstimateOnly("flip distance for labelers outside rectangles"));
            }
            exact_only(Profile::Rect(RectProfile::new(r, dist)?))
        }
        ConceptClass::Finite(_) => exact_only(finite_profile(target, class, dist)?),
        ConceptClass::LinearSep { .. } => {
            if !member {
                return Err(Error::EstimateOnly("flip distance for labelers outside separators"));
            }
            match mode {
                MassMode::Exact => Err(Error::UseMonteCarlo("ball mass for linear separators")),
                MassMode::MonteCarlo(opts) => linear_profile(target, dist, opts),
            }
        }
        ConceptClass::Adjoined { .. } => unreachable!("base() strips adjoined labelers"),
    }
}

/// `inf { Δ(h, f) : h in F, h(x) != f(x) }` for the exact classes.
pub fn flip_distance(x: &Point, target: &Hypothesis, dist: &Distribution, class: &ConceptClass) -> Result<f64> {
    class.base().check_point(x)?;
    match profile(target, dist, class, MassMode::Exact)? {
        Profile::Line { pieces, cdf } => {
            let xv = x.x();
            let u = cdf(xv);
            Ok(pieces
                .iter()
                .filter(|p| p.x0 <= xv && xv <= p.x1)
                .map(|p| p.at(u))
                .fold(f64::INFINITY, f64::min))
        }
        Profile::Rect(rp) => Ok(rp.flip(x.coords())),
        Profile::Atoms { flips, .. } => {
            let i = x.x() as usize;
            Ok(flips[i].0)
        }
    }
}

/// `ΔB(f, r) = P(DIS(B(f, r)))` with the closed ball `Δ(h, f) <= r`.
pub fn ball_dis_mass(target: &Hypothesis, dist: &Distribution, r: f64, class: &ConceptClass, mode: MassMode) -> Result<f64> {
    if r.is_nan() {
        return Err(Error::NonFinite("radius"));
    }
    Ok(profile(target, dist, class, mode)?.mass(r))
}

/// `θ(r0) = sup_{r > r0} ΔB(f, r) / r ∨ 1` over `r_grid`.
///
/// One-dimensional, finite and sampled profiles are piecewise linear in `r`
/// with known kinks, which are added to the grid, making the supremum exact.
/// Rectangle profiles are refined by a golden-section search around the best
/// grid radius.
pub fn theta(
    target: &Hypothesis,
    dist: &Distribution,
    r0: f64,
    class: &ConceptClass,
    r_grid: &[f64],
    mode: MassMode,
) -> Result<ThetaEstimate> {
    if !(r0 >= 0.0) {
        return Err(Error::InvalidArgument(format!("r0 must be nonnegative, got {r0}")));
    }
    if r0 >= 1.0 {
        return Ok(ThetaEstimate {
            r0,
            value: 1.0,
            mode: ThetaMode::Exact,
            grid: Vec::new(),
        });
    }
    if r_grid.is_empty() {
        return Err(Error::InvalidArgument("empty radius grid".into()));
    }
    let p = profile(target, dist, class, mode)?;
    let mut rs: Vec<f64> = r_grid.iter().cloned().filter(|&r| r > r0 && r <= 1.0).collect();
    if rs.is_empty() {
        return Err(Error::InvalidArgument("radius grid has no entry in (r0, 1]".into()));
    }
    let right_of_r0 = if r0 > 0.0 { r0 * (1.0 + 1e-12) } else { f64::MIN_POSITIVE };
    rs.push(right_of_r0);
    if let Some(kinks) = p.kinks() {
        for c in kinks {
            if c > r0 && c <= 1.0 {
                rs.push(c);
                rs.push(c * (1.0 - 1e-12));
            }
        }
    }
    rs.retain(|r| *r > r0);
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    let mut grid: Vec<(f64, f64)> = rs.iter().map(|&r| (r, p.mass(r))).collect();
    if p.refine() {
        let best = grid
            .iter()
            .enumerate()
            .max_by(|a, b| (a.1 .1 / a.1 .0).total_cmp(&(b.1 .1 / b.1 .0)))
            .map(|(i, _)| i)
            .unwrap();
        let lo = if best == 0 { grid[0].0 } else { grid[best - 1].0 };
        let hi = grid.get(best + 1).map_or(grid[best].0, |g| g.0);
        let ratio = |r: f64| p.mass(r) / r;
        let (mut a, mut b) = (lo, hi);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..60 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if ratio(c) >= ratio(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let r = 0.5 * (a + b);
        grid.push((r, p.mass(r)));
        grid.sort_by(|x, y| x.0.total_cmp(&y.0));
    }
    let value = grid.iter().map(|(r, m)| m / r).fold(1.0, f64::max);
    Ok(ThetaEstimate {
        r0,
        value,
        mode: p.mode(),
        grid,
    })
}

/// Plug-in `B_ΔVS(m, δ)`: order-statistic quantile of `P(DIS(VS(S_m)))`.
#[allow(clippy::too_many_arguments)]
pub fn quantile_bound_deltavs(
    class: &ConceptClass,
    dist: &Distribution,
    target: &Hypothesis,
    m: usize,
    delta: f64,
    replicates: usize,
    master_seed: u64,
    mode: MassMode,
) -> Result<QuantileEstimate> {
    check_replicates(delta, replicates)?;
    let vals = deltavs_replicates(class, dist, target, m, replicates, master_seed, mode)?;
    empirical_quantile(&vals, delta, m)
}

/// `P(DIS(VS(S_m)))` for replicates `0..R`.
pub fn deltavs_replicates(
    class: &ConceptClass,
    dist: &Distribution,
    target: &Hypothesis,
    m: usize,
    replicates: usize,
    master_seed: u64,
    mode: MassMode,
) -> Result<Vec<f64>> {
    run_replicates(replicates, |r| {
        let s = LabeledStream::new(dist, target, &NoiseModel::Realizable, &RngStream::new(master_seed, r))?.take(m);
        let v = VersionSpace::new(class.clone(), &s)?;
        Ok(dis_region_mass(&v, dist, mode)?.value)
    })
}

/// Plug-in `B_N(m, δ)`: order-statistic quantile of `N(m; S_m)`.
pub fn quantile_bound_n(
    class: &ConceptClass,
    dist: &Distribution,
    target: &Hypothesis,
    m: usize,
    delta: f64,
    replicates: usize,
    master_seed: u64,
) -> Result<QuantileEstimate> {
    check_replicates(delta, replicates)?;
    let vals = run_replicates(replicates, |r| {
        let s = LabeledStream::new(dist, target, &NoiseModel::Realizable, &RngStream::new(master_seed, r))?.take(m);
        Ok(count_queries(&s, class)? as f64)
    })?;
    empirical_quantile(&vals, delta, m)
}
