//! Version-space compression sets, `n̂`, and the characterizing-set complexity
//! of finite classes.

use serde::{Deserialize, Serialize};

use crate::dist::{box_mass, Distribution, LabeledStream, NoiseModel, RngStream};
use crate::error::{Error, Result};
use crate::geometry::{
    separating_hyperplane, ConceptClass, Example, FiniteClassTable, Hypothesis, Label, VersionSpace,
};
use crate::quantile::{check_replicates, empirical_quantile, run_replicates, QuantileEstimate};

/// Default exhaustive-search budget: at most `2^cap` candidate subsets.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompressionMethod {
    EssentialExact,
    Exhaustive,
    GreedyUncertified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionResult {
    pub subset: Vec<Example>,
    pub size: usize,
    pub certified_minimal: bool,
    pub method: CompressionMethod,
}

/// First occurrence of every distinct example, in sample order.
pub fn dedup_sample(s: &[Example]) -> Vec<Example> {
    let mut out: Vec<Example> = Vec::with_capacity(s.len());
    let mut seen = std::collections::HashSet::with_capacity(s.len());
    for ex in s {
        let key = (ex.x.coords().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), ex.y);
        if seen.insert(key) {
            out.push(ex.clone());
        }
    }
    out
}

fn require_feasible(s: &[Example], class: &ConceptClass) -> Result<VersionSpace> {
    let v = VersionSpace::new(class.clone(), s)?;
    if !v.is_feasible() {
        return Err(Error::Infeasible);
    }
    Ok(v)
}

/// Whether `VS(C) = VS(S)` for `C ⊆ S`.
pub fn is_compression_set(c: &[Example], s: &[Example], class: &ConceptClass) -> Result<bool> {
    if c.iter().any(|e| !s.contains(e)) {
        return Err(Error::NotSubset);
    }
    let v = VersionSpace::new(class.clone(), c)?;
    for ex in s {
        if c.contains(ex) {
            continue;
        }
        class.check_point(&ex.x)?;
        if v.label_feasible_raw(ex.x.coords(), ex.y.flip()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Indices `i` such that `S` with label `i` flipped is still realizable.
fn essential_indices(s: &[Example], class: &ConceptClass) -> Result<Vec<usize>> {
    match class {
        ConceptClass::Threshold => Ok(essential_threshold(s)),
        ConceptClass::IntervalUnion { k } => Ok(essential_intervals(s, *k)),
        ConceptClass::AxisRect { k } => Ok(essential_rect(s, *k)),
        _ => {
            let mut out = Vec::new();
            for i in 0..s.len() {
                let mut rest: Vec<Example> = Vec::with_capacity(s.len());
                rest.extend_from_slice(&s[..i]);
                rest.extend_from_slice(&s[i + 1..]);
                let v = VersionSpace::new(class.clone(), &rest)?;
                if v.label_feasible_raw(s[i].x.coords(), s[i].y.flip()) {
                    out.push(i);
                }
            }
            Ok(out)
        }
    }
}

fn essential_threshold(s: &[Example]) -> Vec<usize> {
    // Two smallest positives and two largest negatives.
    let mut pos = (f64::INFINITY, None, f64::INFINITY);
    let mut neg = (f64::NEG_INFINITY, None, f64::NEG_INFINITY);
    for (i, e) in s.iter().enumerate() {
        let x = e.x.x();
        match e.y {
            Label::Pos => {
                if x < pos.0 {
                    pos = (x, Some(i), pos.0);
                } else if x < pos.2 {
                    pos.2 = x;
                }
            }
            Label::Neg => {
                if x > neg.0 {
                    neg = (x, Some(i), neg.0);
                } else if x > neg.2 {
                    neg.2 = x;
                }
            }
        }
    }
    let mut out = Vec::new();
    for (i, e) in s.iter().enumerate() {
        let x = e.x.x();
        let ok = match e.y {
            // Becomes a negative: needs max(negatives, x) < min(other positives).
            Label::Pos => {
                let pmin = if pos.1 == Some(i) { pos.2 } else { pos.0 };
                neg.0.max(x) < pmin
            }
            Label::Neg => {
                let nmax = if neg.1 == Some(i) { neg.2 } else { neg.0 };
                nmax < pos.0.min(x)
            }
        };
        if ok {
            out.push(i);
        }
    }
    out
}

fn essential_intervals(s: &[Example], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[a].x.x().total_cmp(&s[b].x.x()));
    // Group identical positions.
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in order {
        let x = s[i].x.x();
        match groups.last_mut() {
            Some((gx, g)) if *gx == x => g.push(i),
            _ => groups.push((x, vec![i])),
        }
    }
    let labels: Vec<Label> = groups.iter().map(|(_, g)| s[g[0]].y).collect();
    let is_pos = |j: isize| j >= 0 && (j as usize) < labels.len() && labels[j as usize].is_pos();
    let runs = (0..labels.len() as isize)
        .filter(|&j| is_pos(j) && !is_pos(j - 1))
        .count();
    let mut out = Vec::new();
    for (j, (x, g)) in groups.iter().enumerate() {
        if g.len() > 1 {
            continue;
        }
        let j = j as isize;
        let before = (is_pos(j) && !is_pos(j - 1)) as isize + (is_pos(j + 1) && !is_pos(j)) as isize;
        let flipped = !is_pos(j);
        if flipped && !(*x > 0.0 && *x < 1.0) {
            continue;
        }
        let after = (flipped && !is_pos(j - 1)) as isize + (is_pos(j + 1) && !flipped) as isize;
        let r = runs as isize - before + after;
        if r <= k as isize {
            out.push(g[0]);
        }
    }
    out.sort_unstable();
    out
}

fn essential_rect(s: &[Example], k: usize) -> Vec<usize> {
    let pos: Vec<usize> = (0..s.len()).filter(|&i| s[i].y.is_pos()).collect();
    let neg: Vec<usize> = (0..s.len()).filter(|&i| !s[i].y.is_pos()).collect();
    let mut out = Vec::new();

    // Positives: essential iff strictly extreme in some coordinate.
    if pos.len() == 1 {
        out.push(pos[0]);
    } else if pos.len() > 1 {
        for j in 0..k {
            let mut lo = (f64::INFINITY, usize::MAX, f64::INFINITY);
            let mut hi = (f64::NEG_INFINITY, usize::MAX, f64::NEG_INFINITY);
            for &i in &pos {
                let v = s[i].x.coords()[j];
                if v < lo.0 {
                    lo = (v, i, lo.0);
                } else if v < lo.2 {
                    lo.2 = v;
                }
                if v > hi.0 {
                    hi = (v, i, hi.0);
                } else if v > hi.2 {
                    hi.2 = v;
                }
            }
            if lo.0 < lo.2 {
                out.push(lo.1);
            }
            if hi.0 > hi.2 {
                out.push(hi.1);
            }
        }
    }

    // Negatives: essential iff the hull of the closure and the point holds no other negative.
    let closure = if pos.is_empty() {
        None
    } else {
        let mut lo = vec![f64::INFINITY; k];
        let mut hi = vec![f64::NEG_INFINITY; k];
        for &i in &pos {
            for j in 0..k {
                let v = s[i].x.coords()[j];
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        Some((lo, hi))
    };
    let dist = |x: &[f64]| -> f64 {
        match &closure {
            None => 0.0,
            Some((lo, hi)) => (0..k)
                .map(|j| (lo[j] - x[j]).max(x[j] - hi[j]).max(0.0))
                .fold(0.0, f64::max),
        }
    };
    let mut by_dist: Vec<(f64, usize)> = neg.iter().map(|&i| (dist(s[i].x.coords()), i)).collect();
    by_dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (p, &(d, i)) in by_dist.iter().enumerate() {
        let x = s[i].x.coords();
        let blocked = by_dist
            .iter()
            .enumerate()
            .take_while(|(_, (dq, _))| *dq <= d)
            .any(|(q, (_, qi))| {
                q != p
                    && (0..k).all(|j| {
                        let v = s[*qi].x.coords()[j];
                        let (a, b) = match &closure {
                            Some((lo, hi)) => (lo[j].min(x[j]), hi[j].max(x[j])),
                            None => (x[j], x[j]),
                        };
                        a <= v && v <= b
                    })
            });
        if !blocked {
            out.push(i);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Points that belong to every compression set of `S`.
pub fn essential_points(s: &[Example], class: &ConceptClass) -> Result<Vec<Example>> {
    require_feasible(s, class)?;
    Ok(essential_indices(s, class)?
        .into_iter()
        .map(|i| s[i].clone())
        .collect())
}

/// First index of `s` outside `c` whose label can be flipped given `c`.
fn first_violation(c: &[Example], member: &[bool], s: &[Example], class: &ConceptClass) -> Result<Option<usize>> {
    let v = VersionSpace::new(class.clone(), c)?;
    Ok((0..s.len()).find(|&i| !member[i] && v.label_feasible_raw(s[i].x.coords(), s[i].y.flip())))
}

/// For separators, the indices of `s` mislabeled by a hypothesis consistent
/// with `c` that flips `s[j]`.
fn witness_disagreement(c: &[Example], s: &[Example], j: usize, class: &ConceptClass) -> Option<Vec<usize>> {
    let ConceptClass::LinearSep { k } = class else {
        return None;
    };
    let mut pts: Vec<(&[f64], Label)> = c.iter().map(|e| (e.x.coords(), e.y)).collect();
    pts.push((s[j].x.coords(), s[j].y.flip()));
    let h = separating_hyperplane(*k, &pts).witness?;
    Some((0..s.len()).filter(|&i| h.label_of(s[i].x.coords()) != s[i].y).collect())
}

fn violations(c: &[Example], s: &[Example], class: &ConceptClass) -> Result<usize> {
    let v = VersionSpace::new(class.clone(), c)?;
    Ok(s.iter()
        .filter(|e| !c.contains(e) && v.label_feasible_raw(e.x.coords(), e.y.flip()))
        .count())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Advances `idx` to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// A smallest subset of `S` inducing the same version space.
///
/// The essential points are returned directly when they already form a
/// compression set. Otherwise supersets of them are searched by increasing
/// size while at most `2^exhaustive_cap` candidates have been examined, and
/// a greedy (uncertified) set is returned past that budget.
pub fn minimal_compression_set(
    s: &[Example],
    class: &ConceptClass,
    exhaustive_cap: usize,
) -> Result<CompressionResult> {
    require_feasible(s, class)?;
    let s = dedup_sample(s);
    let ess = essential_indices(&s, class)?;
    let pick = |ids: &[usize]| -> Vec<Example> {
        let mut ids = ids.to_vec();
        ids.sort_unstable();
        ids.into_iter().map(|i| s[i].clone()).collect()
    };
    let e = pick(&ess);
    if is_compression_set(&e, &s, class)? {
        return Ok(CompressionResult {
            size: e.len(),
            subset: e,
            certified_minimal: true,
            method: CompressionMethod::EssentialExact,
        });
    }
    let rest: Vec<usize> = (0..s.len()).filter(|i| !ess.contains(i)).collect();
    let budget = 2f64.powi(exhaustive_cap.min(62) as i32);
    let mut spent = 0.0;
    // Disagreement sets of hypotheses found along the way; every compression
    // set must meet each of them.
    let mut learned: Vec<Vec<usize>> = Vec::new();
    let mut member = vec![false; s.len()];
    for size in 1..=rest.len() {
        spent += binomial(rest.len(), size);
        if spent > budget {
            break;
        }
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let mut ids = ess.clone();
            ids.extend(idx.iter().map(|&i| rest[i]));
            member.iter_mut().for_each(|b| *b = false);
            ids.iter().for_each(|&i| member[i] = true);
            if learned.iter().all(|d| d.iter().any(|&i| member[i])) {
                let c = pick(&ids);
                match first_violation(&c, &member, &s, class)? {
                    None => {
                        return Ok(CompressionResult {
                            size: c.len(),
                            subset: c,
                            certified_minimal: true,
                            method: CompressionMethod::Exhaustive,
                        })
                    }
                    Some(j) => {
                        if let Some(d) = witness_disagreement(&c, &s, j, class) {
                            learned.push(d);
                        }
                    }
                }
            }
            if !next_combination(&mut idx, rest.len()) {
                break;
            }
        }
    }
    // Greedy: repeatedly add the point leaving the fewest flippable points.
    let mut chosen = ess.clone();
    loop {
        let c = pick(&chosen);
        let current = violations(&c, &s, class)?;
        if current == 0 {
            return Ok(CompressionResult {
                size: c.len(),
                subset: c,
                certified_minimal: false,
                method: CompressionMethod::GreedyUncertified,
            });
        }
        let mut best: Option<(usize, usize)> = None;
        for i in 0..s.len() {
            if chosen.contains(&i) {
                continue;
            }
            let mut ids = chosen.clone();
            ids.push(i);
            let v = violations(&pick(&ids), &s, class)?;
            if best.is_none_or(|(_, bv)| v < bv) {
                best = Some((i, v));
            }
        }
        chosen.push(best.expect("uncovered points remain").0);
    }
}

/// `n̂(F, S)`; fails with `Uncertified` unless minimality is certified.
pub fn nhat(s: &[Example], class: &ConceptClass) -> Result<usize> {
    nhat_with(s, class, false).map(|(n, _)| n)
}

/// `n̂` together with its certification flag; `allow_uncertified` opts into greedy values.
pub fn nhat_with(s: &[Example], class: &ConceptClass, allow_uncertified: bool) -> Result<(usize, bool)> {
    let r = minimal_compression_set(s, class, DEFAULT_EXHAUSTIVE_CAP)?;
    if !r.certified_minimal && !allow_uncertified {
        return Err(Error::Uncertified);
    }
    Ok((r.size, r.certified_minimal))
}

/// One replicate of an `n̂` experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NhatRow {
    pub replicate: u64,
    pub m: usize,
    pub nhat: usize,
    pub certified: bool,
    pub excluded: bool,
}

/// Replicate draws of `n̂(S_m)`.
///
/// With `min_closure_mass = Some(λ)`, rectangle replicates whose positive
/// closure has mass below `λ` are flagged as excluded.
#[allow(clippy::too_many_arguments)]
pub fn nhat_replicates(
    class: &ConceptClass,
    dist: &Distribution,
    target: &Hypothesis,
    m: usize,
    replicates: usize,
    master_seed: u64,
    min_closure_mass: Option<f64>,
) -> Result<Vec<NhatRow>> {
    run_replicates(replicates, |r| {
        let mut stream = LabeledStream::new(dist, target, &NoiseModel::Realizable, &RngStream::new(master_seed, r))?;
        let s = stream.take(m);
        let (n, certified) = nhat_with(&s, class, false)?;
        let excluded = match min_closure_mass {
            Some(lambda) => closure_mass(&s, dist)? < lambda,
            None => false,
        };
        Ok(NhatRow {
            replicate: r,
            m,
            nhat: n,
            certified,
            excluded,
        })
    })
}

/// Mass of the closure box of the positive points (zero without positives).
pub fn closure_mass(s: &[Example], dist: &Distribution) -> Result<f64> {
    let k = dist.dim();
    let mut lo = vec![f64::INFINITY; k];
    let mut hi = vec![f64::NEG_INFINITY; k];
    let mut any = false;
    for e in s.iter().filter(|e| e.y.is_pos()) {
        any = true;
        for j in 0..k {
            lo[j] = lo[j].min(e.x.coords()[j]);
            hi[j] = hi[j].max(e.x.coords()[j]);
        }
    }
    if !any {
        return Ok(0.0);
    }
    box_mass(dist, &lo, &hi)
}

/// Plug-in estimate of `B_n̂(m, δ)`: the `ceil((1-δ)R)`-th order statistic of `n̂(S_m)`.
#[allow(clippy::too_many_arguments)]
pub fn quantile_bound_nhat(
    class: &ConceptClass,
    dist: &Distribution,
    target: &Hypothesis,
    m: usize,
    delta: f64,
    replicates: usize,
    master_seed: u64,
) -> Result<QuantileEstimate> {
    check_replicates(delta, replicates)?;
    let rows = nhat_replicates(class, dist, target, m, replicates, master_seed, None)?;
    let vals: Vec<f64> = rows.iter().map(|r| r.nhat as f64).collect();
    empirical_quantile(&vals, delta, m)
}

/// Maximum guarded domain size for `gamma_bruteforce`.
pub const GAMMA_MAX_DOMAIN: usize = 40;
/// Maximum guarded sample size for `gamma_bruteforce`.
pub const GAMMA_MAX_N: usize = 3;

/// VC dimension of a family of subsets of `0..universe`, given as bit masks.
pub fn vc_dimension_of_sets(sets: &[u64], universe: usize) -> usize {
    if sets.is_empty() {
        return 0;
    }
    let mut family = sets.to_vec();
    family.sort_unstable();
    family.dedup();
    let limit = (family.len() as f64).log2().floor() as usize;
    fn shattered(family: &[u64], a: u64) -> bool {
        let mut traces: Vec<u64> = family.iter().map(|f| f & a).collect();
        traces.sort_unstable();
        traces.dedup();
        traces.len() == 1usize << a.count_ones()
    }
    fn grow(family: &[u64], a: u64, start: usize, universe: usize, limit: usize, best: &mut usize) {
        let size = a.count_ones() as usize;
        *best = (*best).max(size);
        if size >= limit {
            return;
        }
        for e in start..universe {
            let b = a | (1u64 << e);
            if shattered(family, b) {
                grow(family, b, e + 1, universe, limit, best);
            }
        }
    }
    let mut best = 0;
    grow(&family, 0, 0, universe, limit, &mut best);
    best
}

fn row_mask(row: &[Label]) -> u64 {
    row.iter()
        .enumerate()
        .filter(|(_, l)| l.is_pos())
        .fold(0u64, |m, (i, _)| m | (1u64 << i))
}

/// VC dimension of a finite class.
pub fn vc_dimension(table: &FiniteClassTable) -> Result<usize> {
    if table.domain_len() > 64 {
        return Err(Error::TooLarge(format!("{} domain points", table.domain_len())));
    }
    let masks: Vec<u64> = table.rows().iter().map(|r| row_mask(r)).collect();
    Ok(vc_dimension_of_sets(&masks, table.domain_len()))
}

/// `DIS(VS(S))` over the domain as a bit mask, or `None` when `S` is not realizable.
fn dis_mask(masks: &[u64], universe: usize, sample: &[(usize, Label)]) -> Option<u64> {
    let mut and_all = u64::MAX;
    let mut or_all = 0u64;
    let mut any = false;
    for &m in masks {
        if sample.iter().all(|&(i, y)| ((m >> i) & 1 == 1) == y.is_pos()) {
            any = true;
            and_all &= m;
            or_all |= m;
        }
    }
    let full = if universe == 64 { u64::MAX } else { (1u64 << universe) - 1 };
    any.then_some((or_all & !and_all) & full)
}

/// `γ(F, n)`: VC dimension of `{DIS(VS(S)) : S realizable, |S| = n}`.
pub fn gamma_bruteforce(table: &FiniteClassTable, n: usize) -> Result<usize> {
    let u = table.domain_len();
    if u > GAMMA_MAX_DOMAIN || n > GAMMA_MAX_N {
        return Err(Error::TooLarge(format!(
            "gamma enumeration needs |domain| <= {GAMMA_MAX_DOMAIN} and n <= {GAMMA_MAX_N}, got {u} and {n}"
        )));
    }
    let masks: Vec<u64> = table.rows().iter().map(|r| row_mask(r)).collect();
    let items: Vec<(usize, Label)> = (0..u)
        .flat_map(|i| [(i, Label::Neg), (i, Label::Pos)])
        .collect();
    let mut family = Vec::new();
    let mut idx = vec![0usize; n];
    // Multisets of size n: nondecreasing index tuples.
    loop {
        let sample: Vec<(usize, Label)> = idx.iter().map(|&i| items[i]).collect();
        if let Some(d) = dis_mask(&masks, u, &sample) {
            family.push(d);
        }
        let mut p = n;
        loop {
            if p == 0 {
                return Ok(vc_dimension_of_sets(&family, u));
            }
            p -= 1;
            if idx[p] + 1 < items.len() {
                idx[p] += 1;
                for q in p + 1..n {
                    idx[q] = idx[p];
                }
                break;
            }
        }
    }
}

fn set_name(prefix: char, bits: usize, d: usize) -> String {
    let members: Vec<String> = (0..d)
        .filter(|i| bits >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect();
    format!("{prefix}{{{}}}", members.join(","))
}

/// The finite class on `w_1..w_d`, `x_I`, `z_I` whose members `h_J` are
/// positive on `{w_i : i ∈ J} ∪ {x_I : I ⊆ J} ∪ {z_I : I ⊆ [d] ∖ J}`.
///
/// Domain order: `w_1..w_d`, then `x_I` and `z_I` with `I` enumerated as bit masks.
pub fn build_wxz_class(d: usize) -> Result<FiniteClassTable> {
    if !(1..=6).contains(&d) {
        return Err(Error::InvalidArgument(format!("d must lie in 1..=6, got {d}")));
    }
    let subsets = 1usize << d;
    let mut domain: Vec<String> = (1..=d).map(|i| format!("w{i}")).collect();
    domain.extend((0..subsets).map(|i| set_name('x', i, d)));
    domain.extend((0..subsets).map(|i| set_name('z', i, d)));
    let full = subsets - 1;
    let rows = (0..subsets)
        .map(|j| {
            let mut row = Vec::with_capacity(domain.len());
            row.extend((0..d).map(|i| Label::from_sign(j >> i & 1 == 1)));
            row.extend((0..subsets).map(|i| Label::from_sign(i & !j == 0)));
            row.extend((0..subsets).map(|i| Label::from_sign(i & j == 0 && i & full == i)));
            row
        })
        .collect();
    FiniteClassTable::new(domain, rows)
}

/// Domain index of `x_I` in a class from `build_wxz_class(d)`.
pub fn wxz_x_index(d: usize, i: usize) -> usize {
    d + i
}

/// Domain index of `z_I` in a class from `build_wxz_class(d)`.
pub fn wxz_z_index(d: usize, i: usize) -> usize {
    d + (1 << d) + i
}

/// Row index of `h_J`.
pub fn wxz_row(j: usize) -> usize {
    j
}
