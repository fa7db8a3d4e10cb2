//! Region-of-disagreement masses and worst-case errors over a version space.

use super::version_space::{Cache, RectCache};
use super::{ConceptClass, Halfspace, Hypothesis, Label, Rect, VersionSpace};
use crate::dist::{box_mass_components, Components, Distribution, Estimate, MassMode, McOptions};
use crate::error::{Error, Result};

/// Largest rectangle dimension accepted by the exact worst-case error search.
pub const RECT_SUP_MAX_DIM: usize = 8;

const MAX_CELLS: usize = 20_000_000;
const MAX_SEARCH_NODES: usize = 20_000_000;

fn probe(a: f64, b: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a + 1.0,
        (false, true) => b - 1.0,
        (false, false) => 0.0,
    }
}

/// Breakpoints outside which every one-dimensional query is constant.
fn breakpoints_1d(v: &VersionSpace) -> Vec<f64> {
    let mut bp: Vec<f64> = v.constraints().iter().map(|e| e.x.x()).collect();
    if matches!(v.class().base(), ConceptClass::IntervalUnion { .. }) {
        bp.extend([0.0, 1.0]);
    }
    let mut c = v.class();
    while let ConceptClass::Adjoined { base, extra } = c {
        bp.extend(extra.breakpoints_1d().unwrap_or_default());
        c = base;
    }
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    bp
}

fn gaps(bp: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
    let n = bp.len();
    (0..=n).map(move |i| {
        let a = if i == 0 { f64::NEG_INFINITY } else { bp[i - 1] };
        let b = if i == n { f64::INFINITY } else { bp[i] };
        (a, b)
    })
}

fn mass1(comps: &Components, a: f64, b: f64) -> f64 {
    box_mass_components(comps, &[a], &[b])
}

fn continuous(dist: &Distribution, oracle: &'static str) -> Result<Components> {
    dist.components()
        .ok_or_else(|| Error::unsupported(oracle, "discrete distributions for geometric classes"))
}

fn check_dims(v: &VersionSpace, dist: &Distribution) -> Result<()> {
    if v.class().dim() != dist.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.class().dim(),
            got: dist.dim(),
        });
    }
    Ok(())
}

/// `P(DIS(VS))`.
///
/// Exact mode handles thresholds, interval unions (also with an adjoined
/// one-dimensional labeler), rectangles and finite classes; separators must be
/// sampled.
pub fn dis_region_mass(v: &VersionSpace, dist: &Distribution, mode: MassMode) -> Result<Estimate> {
    dist.validate()?;
    if !v.is_feasible() {
        return Err(Error::Infeasible);
    }
    if let MassMode::MonteCarlo(mc) = mode {
        if !matches!(v.class().base(), ConceptClass::Finite(_)) {
            check_dims(v, dist)?;
        }
        let mut rng = mc.rng(2);
        let n = mc.samples.max(1);
        let hits = (0..n)
            .filter(|_| v.dis_member_raw(dist.sample_point(&mut rng).coords()))
            .count();
        return Ok(Estimate::from_hits(hits, n));
    }
    match (v.class().base(), &v.cache) {
        (ConceptClass::Finite(t), _) => {
            let Distribution::Discrete { weights } = dist else {
                return Err(Error::unsupported(
                    "dis_region_mass",
                    "finite classes under continuous distributions",
                ));
            };
            if weights.len() != t.domain_len() {
                return Err(Error::DimensionMismatch {
                    expected: t.domain_len(),
                    got: weights.len(),
                });
            }
            let m = weights
                .iter()
                .enumerate()
                .filter(|(i, _)| v.dis_member_raw(&[*i as f64]))
                .map(|(_, w)| w)
                .sum::<f64>();
            Ok(Estimate::exact(m.min(1.0)))
        }
        (ConceptClass::Threshold | ConceptClass::IntervalUnion { .. }, _) => {
            check_dims(v, dist)?;
            let comps = continuous(dist, "dis_region_mass")?;
            let bp = breakpoints_1d(v);
            let m: f64 = gaps(&bp)
                .filter(|(a, b)| v.dis_member_raw(&[probe(*a, *b)]))
                .map(|(a, b)| mass1(&comps, a, b))
                .sum();
            Ok(Estimate::exact(m.clamp(0.0, 1.0)))
        }
        (ConceptClass::AxisRect { .. }, Cache::Rect(rc)) => {
            check_dims(v, dist)?;
            let comps = continuous(dist, "dis_region_mass")?;
            Ok(Estimate::exact(rect_dis_mass(rc, &comps)?))
        }
        (ConceptClass::LinearSep { .. }, _) => Err(Error::UseMonteCarlo("dis_region_mass")),
        _ => Err(Error::unsupported(
            "dis_region_mass",
            format!("exact mode for {}", v.class().name()),
        )),
    }
}

type Box_ = (Vec<f64>, Vec<f64>);

fn box_contains(outer: &Box_, inner: &Box_) -> bool {
    outer
        .0
        .iter()
        .zip(&outer.1)
        .zip(inner.0.iter().zip(&inner.1))
        .all(|((ol, oh), (il, ih))| ol <= il && ih <= oh)
}

/// Mass of a union of closed boxes by coordinate compression.
pub(crate) fn union_mass(boxes: &[Box_], comps: &Components, k: usize) -> Result<f64> {
    if boxes.is_empty() {
        return Ok(0.0);
    }
    let mut kept: Vec<&Box_> = Vec::new();
    for (i, b) in boxes.iter().enumerate() {
        let dominated = boxes.iter().enumerate().any(|(j, o)| {
            j != i && box_contains(o, b) && (!box_contains(b, o) || j < i)
        });
        if !dominated {
            kept.push(b);
        }
    }
    let coords: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut c: Vec<f64> = kept
                .iter()
                .flat_map(|b| [b.0[j], b.1[j]])
                .filter(|v| v.is_finite())
                .collect();
            c.sort_by(f64::total_cmp);
            c.dedup();
            c
        })
        .collect();
    let cells: usize = coords.iter().map(|c| c.len() + 1).product();
    if cells > MAX_CELLS {
        return Err(Error::TooLarge(format!("{cells} cells in a box union")));
    }
    let segs: Vec<Vec<(f64, f64)>> = coords.iter().map(|c| gaps(c).collect()).collect();
    let mut idx = vec![0usize; k];
    let mut lo = vec![0.0; k];
    let mut hi = vec![0.0; k];
    let mut mid = vec![0.0; k];
    let mut total = 0.0;
    'outer: loop {
        for j in 0..k {
            let (a, b) = segs[j][idx[j]];
            lo[j] = a;
            hi[j] = b;
            mid[j] = probe(a, b);
        }
        let covered = kept.iter().any(|b| {
            mid.iter()
                .enumerate()
                .all(|(j, v)| b.0[j] <= *v && *v <= b.1[j])
        });
        if covered {
            total += box_mass_components(comps, &lo, &hi);
        }
        for j in 0..k {
            idx[j] += 1;
            if idx[j] < segs[j].len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    Ok(total)
}

fn rect_dis_mass(rc: &RectCache, comps: &Components) -> Result<f64> {
    let Some((lo, hi)) = &rc.closure else {
        return Ok(1.0);
    };
    let k = rc.k;
    let mut boxes: Vec<Box_> = vec![(lo.clone(), hi.clone())];
    for q in &rc.negatives {
        let mut l = vec![f64::NEG_INFINITY; k];
        let mut h = vec![f64::INFINITY; k];
        for j in 0..k {
            if q[j] < lo[j] {
                h[j] = q[j];
            } else if q[j] > hi[j] {
                l[j] = q[j];
            }
        }
        boxes.push((l, h));
    }
    Ok((1.0 - union_mass(&boxes, comps, k)?).clamp(0.0, 1.0))
}

/// `sup_{h in VS} P(h(X) != target(X))`.
///
/// Exact for thresholds, interval unions, rectangles (single product measure,
/// `k <= RECT_SUP_MAX_DIM`) and finite classes. Separators yield a sampled
/// lower estimate only when `estimate` is given.
pub fn sup_error_in_vs(
    v: &VersionSpace,
    target: &Hypothesis,
    dist: &Distribution,
    estimate: Option<McOptions>,
) -> Result<Estimate> {
    dist.validate()?;
    if !v.is_feasible() {
        return Err(Error::Infeasible);
    }
    if !v.class().base().contains(target) {
        return Err(Error::InvalidArgument(format!(
            "target is not a member of {}",
            v.class().base().name()
        )));
    }
    if matches!(v.class(), ConceptClass::Adjoined { .. }) {
        return Err(Error::unsupported("sup_error_in_vs", "adjoined classes"));
    }
    match &v.cache {
        Cache::Threshold { neg_max, pos_min } => {
            check_dims(v, dist)?;
            let comps = continuous(dist, "sup_error_in_vs")?;
            let Hypothesis::Threshold { t } = target else {
                unreachable!()
            };
            let f = |x: f64| mass1(&comps, f64::NEG_INFINITY, x);
            let fs = f(*t);
            Ok(Estimate::exact(
                (f(*neg_max) - fs).abs().max((f(*pos_min) - fs).abs()).min(1.0),
            ))
        }
        Cache::Intervals(iv) => {
            check_dims(v, dist)?;
            let comps = continuous(dist, "sup_error_in_vs")?;
            Ok(Estimate::exact(interval_sup(iv.k, &iv.points, target, &comps)))
        }
        Cache::Rect(rc) => {
            check_dims(v, dist)?;
            if rc.k > RECT_SUP_MAX_DIM {
                return Err(Error::TooLarge(format!(
                    "rectangle dimension {} exceeds {RECT_SUP_MAX_DIM}",
                    rc.k
                )));
            }
            let marg = dist.single_product().ok_or_else(|| {
                Error::unsupported("sup_error_in_vs", "rectangles under mixture distributions")
            })?;
            let comps: Components = vec![(1.0, marg)];
            let tbox = match target {
                Hypothesis::AxisRect(Rect::Box { lo, hi }) => Some((lo.clone(), hi.clone())),
                _ => None,
            };
            Ok(Estimate::exact(rect_sup(rc, tbox.as_ref(), &comps)?))
        }
        Cache::Finite(fc) => {
            let Distribution::Discrete { weights } = dist else {
                return Err(Error::unsupported(
                    "sup_error_in_vs",
                    "finite classes under continuous distributions",
                ));
            };
            let Hypothesis::FiniteMember { index, .. } = target else {
                unreachable!()
            };
            let trow = &fc.table.rows()[*index];
            if weights.len() != trow.len() {
                return Err(Error::DimensionMismatch {
                    expected: trow.len(),
                    got: weights.len(),
                });
            }
            let best = fc
                .consistent
                .iter()
                .zip(fc.table.rows())
                .filter(|(ok, _)| **ok)
                .map(|(_, row)| {
                    weights
                        .iter()
                        .zip(row.iter().zip(trow))
                        .filter(|(_, (a, b))| a != b)
                        .map(|(w, _)| w)
                        .sum::<f64>()
                })
                .fold(0.0, f64::max);
            Ok(Estimate::exact(best))
        }
        Cache::Linear(lc) => {
            check_dims(v, dist)?;
            let Some(mc) = estimate else {
                return Err(Error::EstimateOnly("sup_error_in_vs for linear separators"));
            };
            let mut candidates: Vec<Halfspace> = Vec::new();
            for w in &lc.witnesses {
                candidates.push(w.clone());
                if let Halfspace::Plane { w, .. } = w {
                    let proj = |lab: Label| {
                        v.constraints()
                            .iter()
                            .filter(move |e| e.y == lab)
                            .map(|e| w.iter().zip(e.x.coords()).map(|(a, c)| a * c).sum::<f64>())
                    };
                    let min_pos = proj(Label::Pos).fold(f64::INFINITY, f64::min);
                    let max_neg = proj(Label::Neg).fold(f64::NEG_INFINITY, f64::max);
                    for b in [-min_pos, -max_neg] {
                        if b.is_finite() {
                            candidates.push(Halfspace::Plane { w: w.clone(), b });
                        }
                    }
                }
            }
            // Witnesses are consistent; offset extremes are limits of consistent separators.
            let consistent = &candidates;
            let n = mc.samples.max(1);
            let mut rng = mc.rng(3);
            let mut wrong = vec![0usize; consistent.len()];
            for _ in 0..n {
                let x = dist.sample_point(&mut rng);
                let y = target.label_of(x.coords());
                for (c, h) in wrong.iter_mut().zip(consistent) {
                    if h.label_of(x.coords()) != y {
                        *c += 1;
                    }
                }
            }
            let hits = wrong.into_iter().max().unwrap_or(0);
            Ok(Estimate::from_hits(hits, n))
        }
        Cache::Adjoined { .. } => unreachable!(),
    }
}

/// Worst-case error over unions of `k` intervals consistent with `points`,
/// by dynamic programming over elementary segments.
fn interval_sup(k: usize, points: &[(f64, Label)], target: &Hypothesis, comps: &Components) -> f64 {
    // Elements: (position, forced label or None) for points, then segments between.
    let mut marks: Vec<(f64, Option<Label>)> = points.iter().map(|(x, y)| (*x, Some(*y))).collect();
    let mut free: Vec<f64> = target.breakpoints_1d().unwrap_or_default();
    free.extend([0.0, 1.0]);
    for z in free {
        if !marks.iter().any(|m| m.0 == z) {
            let forced = if z <= 0.0 || z >= 1.0 { Some(Label::Neg) } else { None };
            marks.push((z, forced));
        }
    }
    marks.sort_by(|a, b| a.0.total_cmp(&b.0));

    const NEG: f64 = f64::NEG_INFINITY;
    // dp[last][runs]
    let mut dp = vec![[NEG; 2]; k + 1];
    let mut dp_t: Vec<[f64; 2]> = dp.clone();
    dp[0][0] = 0.0;
    let step = |dp: &Vec<[f64; 2]>, out: &mut Vec<[f64; 2]>, allowed: &[(Label, f64)]| {
        for row in out.iter_mut() {
            *row = [NEG; 2];
        }
        for r in 0..=k {
            for last in 0..2 {
                let cur = dp[r][last];
                if cur == NEG {
                    continue;
                }
                for &(lab, cost) in allowed {
                    let l = lab.is_pos() as usize;
                    let r2 = r + (l == 1 && last == 0) as usize;
                    if r2 > k {
                        continue;
                    }
                    let v = cur + cost;
                    if v > out[r2][l] {
                        out[r2][l] = v;
                    }
                }
            }
        }
    };
    let nm = marks.len();
    for i in 0..=nm {
        let a = if i == 0 { f64::NEG_INFINITY } else { marks[i - 1].0 };
        let b = if i == nm { f64::INFINITY } else { marks[i].0 };
        let m = mass1(comps, a, b);
        let tl = target.label_of(&[probe(a, b)]);
        let cost = |l: Label| if l == tl { 0.0 } else { m };
        let inside = a >= 0.0 && b <= 1.0;
        let seg: Vec<(Label, f64)> = if inside {
            vec![(Label::Neg, cost(Label::Neg)), (Label::Pos, cost(Label::Pos))]
        } else {
            vec![(Label::Neg, cost(Label::Neg))]
        };
        step(&dp, &mut dp_t, &seg);
        std::mem::swap(&mut dp, &mut dp_t);
        if i < nm {
            let pt: Vec<(Label, f64)> = match marks[i].1 {
                Some(l) => vec![(l, 0.0)],
                None => vec![(Label::Neg, 0.0), (Label::Pos, 0.0)],
            };
            step(&dp, &mut dp_t, &pt);
            std::mem::swap(&mut dp, &mut dp_t);
        }
    }
    dp.iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |a, b| a.max(*b))
        .min(1.0)
}

#[derive(Clone, Copy)]
struct Face {
    v: f64,
    open: bool,
}

fn box_error(l: &[f64], h: &[f64], t: Option<&Box_>, comps: &Components) -> f64 {
    let pr = box_mass_components(comps, l, h);
    match t {
        None => pr,
        Some((tl, th)) => {
            let pt = box_mass_components(comps, tl, th);
            let il: Vec<f64> = l.iter().zip(tl).map(|(a, b)| a.max(*b)).collect();
            let ih: Vec<f64> = h.iter().zip(th).map(|(a, b)| a.min(*b)).collect();
            let pi = if il.iter().zip(&ih).all(|(a, b)| a <= b) {
                box_mass_components(comps, &il, &ih)
            } else {
                0.0
            };
            (pr + pt - 2.0 * pi).clamp(0.0, 1.0)
        }
    }
}

fn holds(q: &[f64], l: &[Face], h: &[Face]) -> bool {
    q.iter().enumerate().all(|(j, v)| {
        let above = if l[j].open { *v > l[j].v } else { *v >= l[j].v };
        let below = if h[j].open { *v < h[j].v } else { *v <= h[j].v };
        above && below
    })
}

fn rect_sup(rc: &RectCache, t: Option<&Box_>, comps: &Components) -> Result<f64> {
    let k = rc.k;
    let tvals = |j: usize| -> Vec<f64> { t.map(|(a, b)| vec![a[j], b[j]]).unwrap_or_default() };
    match &rc.closure {
        Some((lo, hi)) => {
            // Candidate face positions, innermost first.
            let mut lcand: Vec<Vec<Face>> = Vec::with_capacity(k);
            let mut hcand: Vec<Vec<Face>> = Vec::with_capacity(k);
            for j in 0..k {
                let mut ls: Vec<f64> = rc
                    .negatives
                    .iter()
                    .map(|q| q[j])
                    .chain(tvals(j))
                    .filter(|v| *v < lo[j])
                    .collect();
                ls.sort_by(|a, b| b.total_cmp(a));
                ls.dedup();
                let mut lf = vec![Face { v: lo[j], open: false }];
                lf.extend(ls.into_iter().map(|v| Face { v, open: true }));
                lf.push(Face { v: f64::NEG_INFINITY, open: true });
                lcand.push(lf);

                let mut hs: Vec<f64> = rc
                    .negatives
                    .iter()
                    .map(|q| q[j])
                    .chain(tvals(j))
                    .filter(|v| *v > hi[j])
                    .collect();
                hs.sort_by(f64::total_cmp);
                hs.dedup();
                let mut hf = vec![Face { v: hi[j], open: false }];
                hf.extend(hs.into_iter().map(|v| Face { v, open: true }));
                hf.push(Face { v: f64::INFINITY, open: true });
                hcand.push(hf);
            }
            let mut l: Vec<Face> = lcand.iter().map(|c| c[0]).collect();
            let mut h: Vec<Face> = hcand.iter().map(|c| c[0]).collect();
            let mut best = 0.0f64;
            let mut nodes = 0usize;
            #[allow(clippy::too_many_arguments)]
            fn dfs(
                face: usize,
                k: usize,
                l: &mut Vec<Face>,
                h: &mut Vec<Face>,
                lcand: &[Vec<Face>],
                hcand: &[Vec<Face>],
                negatives: &[Vec<f64>],
                t: Option<&Box_>,
                comps: &Components,
                best: &mut f64,
                nodes: &mut usize,
            ) -> Result<()> {
                *nodes += 1;
                if *nodes > MAX_SEARCH_NODES {
                    return Err(Error::TooLarge("rectangle worst-case search".into()));
                }
                if face == 2 * k {
                    let lv: Vec<f64> = l.iter().map(|f| f.v).collect();
                    let hv: Vec<f64> = h.iter().map(|f| f.v).collect();
                    *best = best.max(box_error(&lv, &hv, t, comps));
                    return Ok(());
                }
                let j = face / 2;
                let cands = if face % 2 == 0 { &lcand[j] } else { &hcand[j] };
                let saved = if face % 2 == 0 { l[j] } else { h[j] };
                for c in cands {
                    if face % 2 == 0 {
                        l[j] = *c;
                    } else {
                        h[j] = *c;
                    }
                    if negatives.iter().any(|q| holds(q, l, h)) {
                        break;
                    }
                    dfs(face + 1, k, l, h, lcand, hcand, negatives, t, comps, best, nodes)?;
                }
                if face % 2 == 0 {
                    l[j] = saved;
                } else {
                    h[j] = saved;
                }
                Ok(())
            }
            dfs(
                0, k, &mut l, &mut h, &lcand, &hcand, &rc.negatives, t, comps, &mut best, &mut nodes,
            )?;
            Ok(best)
        }
        None => {
            // All-negative sample: the empty sentinel or any box avoiding the negatives.
            let mut best = t.map_or(0.0, |tb| box_mass_components(comps, &tb.0, &tb.1));
            let cand: Vec<Vec<f64>> = (0..k)
                .map(|j| {
                    let mut c: Vec<f64> = rc.negatives.iter().map(|q| q[j]).chain(tvals(j)).collect();
                    c.push(f64::NEG_INFINITY);
                    c.push(f64::INFINITY);
                    c.sort_by(f64::total_cmp);
                    c.dedup();
                    c
                })
                .collect();
            let pairs: Vec<Vec<(f64, f64)>> = cand
                .iter()
                .map(|c| {
                    let mut p = Vec::new();
                    for a in 0..c.len() {
                        for b in a + 1..c.len() {
                            p.push((c[a], c[b]));
                        }
                    }
                    p
                })
                .collect();
            let total: f64 = pairs.iter().map(|p| p.len() as f64).product();
            if total > MAX_SEARCH_NODES as f64 {
                return Err(Error::TooLarge(format!("{total} candidate boxes")));
            }
            let mut idx = vec![0usize; k];
            let mut lf = vec![Face { v: 0.0, open: true }; k];
            let mut hf = lf.clone();
            'outer: loop {
                for j in 0..k {
                    let (a, b) = pairs[j][idx[j]];
                    lf[j].v = a;
                    hf[j].v = b;
                }
                if !rc.negatives.iter().any(|q| holds(q, &lf, &hf)) {
                    let lv: Vec<f64> = lf.iter().map(|f| f.v).collect();
                    let hv: Vec<f64> = hf.iter().map(|f| f.v).collect();
                    best = best.max(box_error(&lv, &hv, t, comps));
                }
                for j in 0..k {
                    idx[j] += 1;
                    if idx[j] < pairs[j].len() {
                        continue 'outer;
                    }
                    idx[j] = 0;
                }
                break;
            }
            Ok(best)
        }
    }
}
