//! Pseudospectral approximation of exact ridge functions `f(x) = g(aᵀx)`.
//!
//! The pipeline is: induced density on a grid, trapezoid measure, Lanczos
//! recurrence, Gauss rule, then one evaluation of `f` per Gauss node at a
//! point of the hypercube whose projection is that node.

use crate::density::{convolve_density, DensityGrid, RidgeDirection};
use crate::error::{Error, Result};
use crate::export::{fmt17, json_array};
use crate::orthopoly::{lanczos_recurrence, DiscreteMeasure, JacobiMatrix};
use crate::par;
use crate::quadrature::{gauss_rule, QuadratureRule};

/// Grid size of the reference density used to measure L² errors in `u`.
pub const REFERENCE_GRID_POINTS: usize = 10_001;

/// Slack allowed on mapped coordinates before clamping becomes an error.
const CLAMP_TOLERANCE: f64 = 1e-12;

/// A point `ξ` of the hypercube together with its projection `aᵀξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationPoint {
    pub xi: Vec<f64>,
    pub lambda: f64,
}

/// Places `lambda` on the segment joining the corners `sign(-a)` and
/// `sign(a)`, which lies inside the hypercube and projects onto the whole
/// support of `aᵀx`.
pub fn map_node(a: &RidgeDirection, lambda: f64) -> Result<EvaluationPoint> {
    let (left, right) = a.support_bounds();
    if !(lambda >= left && lambda <= right) {
        return Err(Error::OutOfSupport {
            lambda,
            left,
            right,
        });
    }
    let gamma = (lambda - left) / (right - left);
    let lower = a.lower_corner();
    let upper = a.upper_corner();
    let xi = lower
        .iter()
        .zip(&upper)
        .enumerate()
        .map(|(i, (l, r))| clamp_unit((1.0 - gamma) * l + gamma * r, i))
        .collect::<Result<Vec<f64>>>()?;
    Ok(EvaluationPoint { xi, lambda })
}

pub(crate) fn clamp_unit(value: f64, index: usize) -> Result<f64> {
    if value.abs() <= 1.0 {
        Ok(value)
    } else if value.abs() <= 1.0 + CLAMP_TOLERANCE {
        Ok(value.clamp(-1.0, 1.0))
    } else {
        Err(Error::DomainViolation { index, value })
    }
}

/// Everything needed to approximate along `a` before `f` is touched.
#[derive(Debug, Clone)]
pub struct RidgeRule {
    direction: RidgeDirection,
    grid: DensityGrid,
    measure: DiscreteMeasure,
    jacobi: JacobiMatrix,
    rule: QuadratureRule,
}

impl RidgeRule {
    /// Density on `n_points`, recurrence and Gauss rule of degree `degree`.
    pub fn build(a: &RidgeDirection, n_points: usize, degree: usize) -> Result<Self> {
        let grid = convolve_density(a, n_points)?;
        let measure = DiscreteMeasure::from_density(&grid)?;
        let jacobi = lanczos_recurrence(&measure, degree)?;
        let rule = gauss_rule(&jacobi)?;
        Ok(Self {
            direction: a.clone(),
            grid,
            measure,
            jacobi,
            rule,
        })
    }

    pub fn direction(&self) -> &RidgeDirection {
        &self.direction
    }

    pub fn grid(&self) -> &DensityGrid {
        &self.grid
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn jacobi(&self) -> &JacobiMatrix {
        &self.jacobi
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn degree(&self) -> usize {
        self.jacobi.degree()
    }

    /// Hypercube points for every Gauss node, in node order.
    pub fn points(&self) -> Result<Vec<EvaluationPoint>> {
        self.rule
            .nodes()
            .iter()
            .map(|&lambda| map_node(&self.direction, lambda))
            .collect()
    }

    /// `ĝ_i = Σ_j ν_j values[j] φ_i(λ_j)` for `i = 0..=d`.
    pub fn coefficients(&self, values: &[f64]) -> Result<Vec<f64>> {
        let d = self.degree();
        if values.len() != d + 1 {
            return Err(Error::LengthMismatch {
                expected: d + 1,
                actual: values.len(),
            });
        }
        let mut coeffs = vec![0.0; d + 1];
        for ((&lambda, &nu), &value) in self.rule.nodes().iter().zip(self.rule.weights()).zip(values) {
            let phi = self.jacobi.evaluate_basis(lambda, d);
            for (c, p) in coeffs.iter_mut().zip(&phi) {
                *c += nu * value * p;
            }
        }
        Ok(coeffs)
    }

    /// Expansion with all `d+1` coefficients kept.
    pub fn expansion(&self, values: &[f64]) -> Result<PseudospectralExpansion> {
        let coeffs = self.coefficients(values)?;
        Ok(PseudospectralExpansion::new(
            self.jacobi.clone(),
            coeffs,
            self.degree(),
            self.direction.support_bounds(),
        ))
    }

    /// Evaluates `f` once per node (concurrently when enabled) and builds the
    /// expansion.
    pub fn fit<F>(&self, f: F) -> Result<RidgeFit>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let points = self.points()?;
        let values = par::map_slice(&points, |p| f(&p.xi));
        let expansion = self.expansion(&values)?;
        Ok(RidgeFit {
            points,
            values,
            expansion,
        })
    }
}

/// Result of [`RidgeRule::fit`].
#[derive(Debug, Clone)]
pub struct RidgeFit {
    pub points: Vec<EvaluationPoint>,
    pub values: Vec<f64>,
    pub expansion: PseudospectralExpansion,
}

/// Univariate orthogonal-polynomial expansion `Σ_{i≤d̃} ĝ_i φ_i(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudospectralExpansion {
    jacobi: JacobiMatrix,
    full_coefficients: Vec<f64>,
    truncation_degree: usize,
    support: (f64, f64),
}

impl PseudospectralExpansion {
    pub fn new(
        jacobi: JacobiMatrix,
        full_coefficients: Vec<f64>,
        truncation_degree: usize,
        support: (f64, f64),
    ) -> Self {
        assert_eq!(full_coefficients.len(), jacobi.degree() + 1);
        assert!(truncation_degree <= jacobi.degree());
        Self {
            jacobi,
            full_coefficients,
            truncation_degree,
            support,
        }
    }

    pub fn jacobi(&self) -> &JacobiMatrix {
        &self.jacobi
    }

    /// Retained coefficients `ĝ_0..ĝ_d̃`.
    pub fn coefficients(&self) -> &[f64] {
        &self.full_coefficients[..=self.truncation_degree]
    }

    /// All `d+1` coefficients before truncation.
    pub fn full_coefficients(&self) -> &[f64] {
        &self.full_coefficients
    }

    pub fn truncation_degree(&self) -> usize {
        self.truncation_degree
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Same coefficients with a different truncation degree.
    pub fn with_truncation(&self, truncation_degree: usize) -> Self {
        Self::new(
            self.jacobi.clone(),
            self.full_coefficients.clone(),
            truncation_degree,
            self.support,
        )
    }

    /// Integral estimate `ĝ_0`; `φ_0 ≡ 1` for a probability measure.
    pub fn integral(&self) -> f64 {
        self.full_coefficients[0]
    }

    pub fn evaluate(&self, u: f64) -> f64 {
        let phi = self.jacobi.evaluate_basis(u, self.truncation_degree);
        self.coefficients().iter().zip(&phi).map(|(c, p)| c * p).sum()
    }

    /// Value plus a flag set when `u` lies outside the support.
    pub fn evaluate_flagged(&self, u: f64) -> (f64, bool) {
        let outside = u < self.support.0 || u > self.support.1;
        (self.evaluate(u), outside)
    }

    /// `{"jacobi":{...},"coefficients":[...],"truncation_degree":...,"integral":...}`.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"jacobi\":{},\"coefficients\":{},\"truncation_degree\":{},\"integral\":{}}}",
            self.jacobi.to_json(),
            json_array(self.coefficients()),
            self.truncation_degree,
            fmt17(self.integral())
        )
    }
}

/// Builds the degree-`d` expansion of a ridge function using exactly `d+1`
/// evaluations of `f`.
pub fn ridge_pseudospectral<F>(
    f: F,
    a: &RidgeDirection,
    n_points: usize,
    degree: usize,
) -> Result<PseudospectralExpansion>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    Ok(RidgeRule::build(a, n_points, degree)?.fit(f)?.expansion)
}

pub fn evaluate_expansion(expansion: &PseudospectralExpansion, u: f64) -> (f64, bool) {
    expansion.evaluate_flagged(u)
}

pub fn integral_estimate(expansion: &PseudospectralExpansion) -> f64 {
    expansion.integral()
}

/// Trapezoid measure of the induced density on the reference grid.
pub fn reference_measure(a: &RidgeDirection) -> Result<DiscreteMeasure> {
    DiscreteMeasure::from_density(&convolve_density(a, REFERENCE_GRID_POINTS)?)
}

/// `(Σ_k w_k (g(u_k) - p(u_k))²)^{1/2}` over a reference measure.
pub fn weighted_l2_error(
    expansion: &PseudospectralExpansion,
    profile: impl Fn(f64) -> f64 + Sync,
    reference: &DiscreteMeasure,
) -> f64 {
    let sq = par::map_range(reference.len(), |k| {
        let u = reference.nodes()[k];
        let r = profile(u) - expansion.evaluate(u);
        reference.weights()[k] * r * r
    });
    sq.iter().sum::<f64>().sqrt()
}
