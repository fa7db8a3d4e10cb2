//! Agnostic version spaces around an infimal hypothesis, and Massart noise.

use serde::{Deserialize, Serialize};

use crate::coefficients::{theta, ThetaEstimate};
use crate::compression::{minimal_compression_set, DEFAULT_EXHAUSTIVE_CAP};
use crate::dist::{Distribution, LabeledStream, MassMode, NoiseModel, RngStream};
use crate::error::{Error, Result};
use crate::geometry::{ConceptClass, Example, FiniteClassTable, Hypothesis, Label};
use crate::quantile::{check_replicates, empirical_quantile, run_replicates, QuantileEstimate};

/// A labeled-data source together with its infimal hypothesis `f*`.
///
/// Samples are drawn as `(x, f*(x))` passed through `noise`; every agnostic
/// quantity discards those labels and uses `f*(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgnosticProblem {
    pub class: ConceptClass,
    pub dist: Distribution,
    pub fstar: Hypothesis,
    pub noise: NoiseModel,
    fstar_in_class: bool,
}

impl AgnosticProblem {
    pub fn new(class: ConceptClass, dist: Distribution, fstar: Hypothesis, noise: NoiseModel) -> Result<Self> {
        dist.validate()?;
        noise.validate()?;
        if fstar.dim() != class.dim() || dist.dim() != class.dim() {
            return Err(Error::DimensionMismatch {
                expected: class.dim(),
                got: if fstar.dim() != class.dim() { fstar.dim() } else { dist.dim() },
            });
        }
        let fstar_in_class = class.contains(&fstar);
        Ok(AgnosticProblem {
            class,
            dist,
            fstar,
            noise,
            fstar_in_class,
        })
    }

    /// Like `new`, but fails unless `f*` is a member of the class.
    pub fn with_member(class: ConceptClass, dist: Distribution, fstar: Hypothesis, noise: NoiseModel) -> Result<Self> {
        let p = Self::new(class, dist, fstar, noise)?;
        if !p.fstar_in_class {
            return Err(Error::InvalidArgument(format!(
                "f* is not a member of {}",
                p.class.name()
            )));
        }
        Ok(p)
    }

    pub fn fstar_in_class(&self) -> bool {
        self.fstar_in_class
    }

    /// `F ∪ {f*}`, or `F` itself when `f*` is already a member.
    pub fn extended_class(&self) -> Result<ConceptClass> {
        if self.fstar_in_class {
            Ok(self.class.clone())
        } else {
            self.class.adjoin(self.fstar.clone())
        }
    }

    /// `m` noisy examples from replicate stream `rng`.
    pub fn sample(&self, m: usize, rng: &RngStream) -> Result<Vec<Example>> {
        Ok(LabeledStream::new(&self.dist, &self.fstar, &self.noise, rng)?.take(m))
    }
}

/// Replaces every label by `f*(x)`.
pub fn agnostic_relabel(s: &[Example], fstar: &Hypothesis) -> Vec<Example> {
    s.iter()
        .map(|e| Example::new(e.x.clone(), fstar.label_of(e.x.coords())))
        .collect()
}

/// Agnostic `n̂`, computed over `F ∪ {f*}` when `f*` is not a member.
///
/// Returns the size and whether the relabeled sample is realizable by `F` alone.
pub fn agnostic_nhat(s: &[Example], fstar: &Hypothesis, class: &ConceptClass) -> Result<(usize, bool)> {
    let relabeled = agnostic_relabel(s, fstar);
    let realizable = crate::geometry::feasible(class, &relabeled)?;
    let ext = if class.contains(fstar) {
        class.clone()
    } else {
        class.adjoin(fstar.clone())?
    };
    let r = minimal_compression_set(&relabeled, &ext, DEFAULT_EXHAUSTIVE_CAP)?;
    if !r.certified_minimal {
        return Err(Error::Uncertified);
    }
    Ok((r.size, realizable))
}

/// Agnostic `n̂` for replicates `0..R`.
pub fn agnostic_nhat_replicates(problem: &AgnosticProblem, m: usize, replicates: usize, master_seed: u64) -> Result<Vec<usize>> {
    run_replicates(replicates, |r| {
        let s = problem.sample(m, &RngStream::new(master_seed, r))?;
        Ok(agnostic_nhat(&s, &problem.fstar, &problem.class)?.0)
    })
}

/// Plug-in agnostic `B_n̂(m, δ)`.
pub fn agnostic_quantile_bound_nhat(
    problem: &AgnosticProblem,
    m: usize,
    delta: f64,
    replicates: usize,
    master_seed: u64,
) -> Result<QuantileEstimate> {
    check_replicates(delta, replicates)?;
    let vals: Vec<f64> = agnostic_nhat_replicates(problem, m, replicates, master_seed)?
        .into_iter()
        .map(|v| v as f64)
        .collect();
    empirical_quantile(&vals, delta, m)
}

/// `θ(r0)` with the ball taken around `f*`.
pub fn agnostic_theta(problem: &AgnosticProblem, r0: f64, grid: &[f64]) -> Result<ThetaEstimate> {
    theta(&problem.fstar, &problem.dist, r0, &problem.class, grid, MassMode::Exact)
}

/// The margin parameter `a = 1 / (1 - 2β)` of a Massart channel.
pub fn massart_margin(problem: &AgnosticProblem) -> Result<f64> {
    match problem.noise {
        NoiseModel::Massart { beta } => {
            let a = 1.0 / (1.0 - 2.0 * beta);
            if !a.is_finite() || beta >= 0.5 {
                return Err(Error::InvalidArgument(format!("flip probability {beta} has no finite margin")));
            }
            Ok(a)
        }
        NoiseModel::Realizable => Err(Error::InvalidArgument("margin needs a Massart channel".into())),
    }
}

/// Best row of a finite class under `P(Y = + | x_i) = eta[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfimalChoice {
    pub row: usize,
    pub error: f64,
    /// Every row attaining the minimum, in index order; `row` is the first.
    pub ties: Vec<usize>,
}

/// Brute-force error minimizer over a finite table, ties broken by row index.
pub fn finite_infimal(table: &FiniteClassTable, weights: &[f64], eta: &[f64]) -> Result<InfimalChoice> {
    let n = table.domain_len();
    if weights.len() != n || eta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if weights.len() != n { weights.len() } else { eta.len() },
        });
    }
    if eta.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidArgument("conditional probabilities must lie in [0,1]".into()));
    }
    let errors: Vec<f64> = table
        .rows()
        .iter()
        .map(|row| {
            (0..n)
                .map(|i| weights[i] * if row[i] == Label::Pos { 1.0 - eta[i] } else { eta[i] })
                .sum()
        })
        .collect();
    let best = errors.iter().cloned().fold(f64::INFINITY, f64::min);
    let ties: Vec<usize> = (0..errors.len()).filter(|&i| errors[i] <= best + 1e-15).collect();
    Ok(InfimalChoice {
        row: ties[0],
        error: best,
        ties,
    })
}
