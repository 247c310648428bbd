//! Near-ridge functions: `f(x) ≈ g(aᵀx)` with `g(u) = E[f | aᵀx = u]`.
//!
//! At each Gauss node the conditional mean is estimated from a hit-and-run
//! chain confined to the slice `{x ∈ [-1,1]^m : aᵀx = λ_j}`. The chain starts
//! at the deterministic mapped node, so one sample per node reproduces the
//! exact-ridge construction. Coefficients whose magnitude falls below the
//! average standard error are truncated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::density::RidgeDirection;
use crate::error::{Error, Result};
use crate::export::CsvTable;
use crate::par;
use crate::quadrature::QuadratureRule;
use crate::ridge::{clamp_unit, map_node, PseudospectralExpansion, RidgeRule};

/// Consecutive rejected step lengths tolerated before giving up.
pub const MAX_REJECTIONS: usize = 10_000;

/// Nodes this close to the support edge are treated as corner slices.
const CORNER_TOLERANCE: f64 = 1e-12;

/// Deterministic RNG for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Samples and estimates for one slice `aᵀx = lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalSampleSet {
    pub lambda: f64,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub mean: f64,
    pub std_error: f64,
}

impl ConditionalSampleSet {
    fn from_samples(lambda: f64, points: Vec<Vec<f64>>, values: Vec<f64>) -> Self {
        let (mean, std_error) = mean_and_std_error(&values);
        Self {
            lambda,
            points,
            values,
            mean,
            std_error,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Sample mean and `σ̂/√M`, with `σ̂` the `M-1` normalized deviation.
/// A single sample has zero standard error.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Uniformly random unit vector orthogonal to `a`.
fn orthogonal_direction<R: Rng + ?Sized>(a: &RidgeDirection, rng: &mut R) -> Option<Vec<f64>> {
    let comps = a.components();
    for _ in 0..64 {
        let mut w: Vec<f64> = (0..comps.len()).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            let c = a.project(&w);
            for (wi, ai) in w.iter_mut().zip(comps) {
                *wi -= c * ai;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for wi in &mut w {
                *wi /= norm;
            }
            return Some(w);
        }
    }
    None
}

/// One hit-and-run move within the slice through `current`.
///
/// The direction is uniform on the unit sphere of `a^⊥`; the step length is
/// drawn uniformly from `[-√m, √m]` and redrawn until the proposal stays in
/// the hypercube.
pub fn hit_and_run_step<R: Rng + ?Sized>(
    a: &RidgeDirection,
    current: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    let lambda = a.project(current);
    let Some(w) = orthogonal_direction(a, rng) else {
        // m = 1: the slice is a single point.
        return Err(Error::RejectionCapExceeded {
            lambda,
            attempts: 0,
        });
    };
    let reach = (a.dim() as f64).sqrt();
    for _ in 0..MAX_REJECTIONS {
        let t: f64 = rng.random_range(-reach..=reach);
        let inside = current
            .iter()
            .zip(&w)
            .all(|(x, wi)| (x + t * wi).abs() <= 1.0);
        if inside {
            return Ok(current.iter().zip(&w).map(|(x, wi)| x + t * wi).collect());
        }
    }
    Err(Error::RejectionCapExceeded {
        lambda,
        attempts: MAX_REJECTIONS,
    })
}

/// How a sampling budget is split across the Gauss nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetAllocation {
    /// The same number of samples at every node.
    Uniform(usize),
    /// `total` samples split in proportion to the quadrature weights, at
    /// least one per node (largest-remainder rounding).
    ProportionalToWeight(usize),
}

impl BudgetAllocation {
    /// Equal split of `total` over `nodes` nodes, rounding down.
    pub fn uniform_from_budget(total: usize, nodes: usize) -> Result<Self> {
        let per_node = total / nodes.max(1);
        if per_node == 0 {
            return Err(Error::InvalidArgument(format!(
                "budget {total} is smaller than the {nodes} quadrature nodes"
            )));
        }
        Ok(Self::Uniform(per_node))
    }

    pub fn counts(&self, rule: &QuadratureRule) -> Result<Vec<usize>> {
        let n = rule.len();
        match *self {
            Self::Uniform(0) => Err(Error::InvalidArgument("samples per node must be at least 1".into())),
            Self::Uniform(m) => Ok(vec![m; n]),
            Self::ProportionalToWeight(total) => {
                if total < n {
                    return Err(Error::InvalidArgument(format!(
                        "budget {total} is smaller than the {n} quadrature nodes"
                    )));
                }
                let spare = (total - n) as f64;
                let shares: Vec<f64> = rule.weights().iter().map(|w| w * spare).collect();
                let mut counts: Vec<usize> = shares.iter().map(|s| 1 + s.floor() as usize).collect();
                let mut left = total - counts.iter().sum::<usize>();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&i, &j| {
                    let ri = shares[i] - shares[i].floor();
                    let rj = shares[j] - shares[j].floor();
                    rj.total_cmp(&ri).then(i.cmp(&j))
                });
                for &i in order.iter().cycle() {
                    if left == 0 {
                        break;
                    }
                    counts[i] += 1;
                    left -= 1;
                }
                Ok(counts)
            }
        }
    }
}

fn sample_slice<F>(
    f: &F,
    a: &RidgeDirection,
    lambda: f64,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ConditionalSampleSet>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let start = map_node(a, lambda)?.xi;
    let (_, right) = a.support_bounds();
    let corner = lambda.abs() >= right - CORNER_TOLERANCE;
    let mut points = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    let mut current = start;
    for i in 0..samples {
        if i > 0 && !corner {
            let next = hit_and_run_step(a, &current, rng)?;
            current = next
                .into_iter()
                .enumerate()
                .map(|(k, x)| clamp_unit(x, k))
                .collect::<Result<Vec<f64>>>()?;
        }
        values.push(f(&current));
        points.push(current.clone());
    }
    if corner {
        return Ok(ConditionalSampleSet {
            lambda,
            points,
            mean: values[0],
            values,
            std_error: 0.0,
        });
    }
    Ok(ConditionalSampleSet::from_samples(lambda, points, values))
}

/// Conditional-mean estimates at every node of `rule`, `samples_per_node`
/// evaluations of `f` each. Node `j` uses RNG stream `j` of `seed`.
pub fn conditional_mean_profile<F>(
    f: F,
    a: &RidgeDirection,
    rule: &QuadratureRule,
    samples_per_node: usize,
    seed: u64,
) -> Result<Vec<ConditionalSampleSet>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let counts = BudgetAllocation::Uniform(samples_per_node).counts(rule)?;
    conditional_mean_profile_with_counts(f, a, rule, &counts, seed)
}

/// [`conditional_mean_profile`] with a per-node sample count.
pub fn conditional_mean_profile_with_counts<F>(
    f: F,
    a: &RidgeDirection,
    rule: &QuadratureRule,
    counts: &[usize],
    seed: u64,
) -> Result<Vec<ConditionalSampleSet>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if counts.len() != rule.len() {
        return Err(Error::LengthMismatch {
            expected: rule.len(),
            actual: counts.len(),
        });
    }
    if counts.contains(&0) {
        return Err(Error::InvalidArgument("every node needs at least one sample".into()));
    }
    par::try_map_range(rule.len(), |j| {
        let mut rng = stream_rng(seed, j as u64);
        sample_slice(&f, a, rule.nodes()[j], counts[j], &mut rng)
    })
}

/// Smallest `d̃` such that `|ĝ_i| < τ` for every `i > d̃`, where `τ` is the
/// mean standard error. With zero noise nothing is truncated.
pub fn truncate_degree(full_coefficients: &[f64], std_errors: &[f64]) -> Result<usize> {
    if full_coefficients.len() != std_errors.len() {
        return Err(Error::LengthMismatch {
            expected: full_coefficients.len(),
            actual: std_errors.len(),
        });
    }
    if full_coefficients.is_empty() {
        return Err(Error::InvalidArgument("no coefficients to truncate".into()));
    }
    let threshold = std_errors.iter().sum::<f64>() / std_errors.len() as f64;
    let mut degree = full_coefficients.len() - 1;
    while degree > 0 && full_coefficients[degree].abs() < threshold {
        degree -= 1;
    }
    Ok(degree)
}

/// Output of the near-ridge construction.
#[derive(Debug, Clone)]
pub struct NearRidgeFit {
    pub profile: Vec<ConditionalSampleSet>,
    pub expansion: PseudospectralExpansion,
}

impl NearRidgeFit {
    pub fn evaluations(&self) -> usize {
        self.profile.iter().map(|s| s.len()).sum()
    }

    /// `lambda,nu,mean,std_error,M` table.
    pub fn profile_csv(&self, rule: &QuadratureRule) -> CsvTable {
        let mut table = CsvTable::new(&["lambda", "nu", "mean", "std_error", "M"]);
        for (set, nu) in self.profile.iter().zip(rule.weights()) {
            table.push(&[set.lambda, *nu, set.mean, set.std_error, set.len() as f64]);
        }
        table
    }
}

/// Near-ridge expansion on an already built rule.
pub fn fit_near_ridge<F>(
    rule: &RidgeRule,
    f: F,
    allocation: BudgetAllocation,
    seed: u64,
) -> Result<NearRidgeFit>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let counts = allocation.counts(rule.rule())?;
    let profile =
        conditional_mean_profile_with_counts(f, rule.direction(), rule.rule(), &counts, seed)?;
    let means: Vec<f64> = profile.iter().map(|s| s.mean).collect();
    let std_errors: Vec<f64> = profile.iter().map(|s| s.std_error).collect();
    let full = rule.expansion(&means)?;
    let truncation = truncate_degree(full.full_coefficients(), &std_errors)?;
    Ok(NearRidgeFit {
        profile,
        expansion: full.with_truncation(truncation),
    })
}

/// Builds the rule and runs the near-ridge construction with
/// `samples_per_node` evaluations at each of the `d+1` nodes.
pub fn near_ridge_pseudospectral<F>(
    f: F,
    a: &RidgeDirection,
    n_points: usize,
    degree: usize,
    samples_per_node: usize,
    seed: u64,
) -> Result<NearRidgeFit>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let rule = RidgeRule::build(a, n_points, degree)?;
    fit_near_ridge(&rule, f, BudgetAllocation::Uniform(samples_per_node), seed)
}
