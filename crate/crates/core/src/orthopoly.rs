//! Orthonormal polynomials for a discrete measure.
//!
//! Two routes to the same three-term recurrence: Lanczos on `diag(u)` with
//! starting vector `√w` (with full reorthogonalization), and the discrete
//! Stieltjes procedure. Mathematically they coincide; the second serves as a
//! cross-check of the first.

use crate::density::DensityGrid;
use crate::error::{Error, Result};
use crate::export::json_array;
use crate::export::fmt17;

/// Tolerance on the total mass of a [`DiscreteMeasure`].
pub const MASS_TOLERANCE: f64 = 1e-10;

/// Point masses `weights[k]` at strictly increasing `nodes[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Validates a probability measure: weights sum to one.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let measure = Self::unchecked_mass(nodes, weights)?;
        let total: f64 = measure.weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(measure)
    }

    /// Builds a measure from nonnegative weights of any positive total,
    /// rescaling them to sum to one.
    pub fn normalized(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let mut measure = Self::unchecked_mass(nodes, weights)?;
        let total: f64 = measure.weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidMeasure("total weight must be positive".into()));
        }
        for w in &mut measure.weights {
            *w /= total;
        }
        Ok(measure)
    }

    fn unchecked_mass(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidMeasure("measure has no nodes".into()));
        }
        if nodes.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                actual: weights.len(),
            });
        }
        if nodes.iter().any(|u| !u.is_finite()) {
            return Err(Error::InvalidMeasure("nodes must be finite".into()));
        }
        if nodes.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidMeasure("nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidMeasure(
                "weights must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { nodes, weights })
    }

    /// Trapezoid discretization of a density grid: each weight is the
    /// trapezoid coefficient (half at the ends) times the density value.
    pub fn from_density(grid: &DensityGrid) -> Result<Self> {
        let n = grid.n_points();
        let du = grid.spacing();
        let weights = grid
            .values()
            .iter()
            .enumerate()
            .map(|(j, q)| {
                let coeff = if j == 0 || j == n - 1 { 0.5 * du } else { du };
                coeff * q
            })
            .collect();
        Self::normalized(grid.nodes(), weights)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of nodes carrying positive mass; bounds the attainable degree.
    pub fn support_size(&self) -> usize {
        self.weights.iter().filter(|w| **w > 0.0).count()
    }

    /// `Σ w_k u_k^power`.
    pub fn moment(&self, power: u32) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| w * u.powi(power as i32))
            .sum()
    }

    /// Largest `|u|` over the nodes.
    pub fn max_abs_node(&self) -> f64 {
        self.nodes.iter().fold(0.0, |m, u| m.max(u.abs()))
    }

    fn breakdown_tolerance(&self) -> f64 {
        1e-13 * self.max_abs_node().max(1.0)
    }

    fn check_degree(&self, degree: usize) -> Result<()> {
        let support = self.support_size();
        if degree + 1 > support {
            return Err(Error::Breakdown {
                requested: degree,
                achievable: support.saturating_sub(1),
            });
        }
        Ok(())
    }
}

/// Recurrence coefficients of the orthonormal polynomials,
/// `β_{i+1} φ_{i+1}(u) = (u - α_i) φ_i(u) - β_i φ_{i-1}(u)` with `φ_0 = 1/β_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    beta0: f64,
}

impl JacobiMatrix {
    /// `alphas` has one more entry than `betas`; all betas must be positive.
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>, beta0: f64) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidArgument("Jacobi matrix needs at least one alpha".into()));
        }
        if betas.len() + 1 != alphas.len() {
            return Err(Error::LengthMismatch {
                expected: alphas.len() - 1,
                actual: betas.len(),
            });
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("alphas must be finite".into()));
        }
        if betas.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::InvalidArgument("betas must be positive".into()));
        }
        if !(beta0.is_finite() && beta0 > 0.0) {
            return Err(Error::InvalidArgument("beta0 must be positive".into()));
        }
        Ok(Self {
            alphas,
            betas,
            beta0,
        })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Off-diagonal entries `β_1..β_d`.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    /// Polynomial degree `d`; the matrix is `(d+1) × (d+1)`.
    pub fn degree(&self) -> usize {
        self.alphas.len() - 1
    }

    /// Leading `(k+1) × (k+1)` block, i.e. the coefficients up to degree `k`.
    pub fn truncated(&self, k: usize) -> Self {
        assert!(k <= self.degree(), "cannot truncate degree {} to {k}", self.degree());
        Self {
            alphas: self.alphas[..=k].to_vec(),
            betas: self.betas[..k].to_vec(),
            beta0: self.beta0,
        }
    }

    /// `[φ_0(u), …, φ_k(u)]`.
    pub fn evaluate_basis(&self, u: f64, k: usize) -> Vec<f64> {
        assert!(k <= self.degree(), "basis degree {k} exceeds {}", self.degree());
        let mut out = Vec::with_capacity(k + 1);
        let mut prev = 0.0;
        let mut cur = 1.0 / self.beta0;
        out.push(cur);
        for i in 0..k {
            let back = if i == 0 { 0.0 } else { self.betas[i - 1] * prev };
            let next = ((u - self.alphas[i]) * cur - back) / self.betas[i];
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    /// `{"alphas":[...],"betas":[...],"beta0":...}`.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"alphas\":{},\"betas\":{},\"beta0\":{}}}",
            json_array(&self.alphas),
            json_array(&self.betas),
            fmt17(self.beta0)
        )
    }
}

/// Free-function form of [`JacobiMatrix::evaluate_basis`].
pub fn evaluate_basis(jacobi: &JacobiMatrix, u: f64, up_to: usize) -> Vec<f64> {
    jacobi.evaluate_basis(u, up_to)
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Lanczos on `A = diag(nodes)` started from `√weights`, never forming `A`.
///
/// Each step costs `O(N)` for the matrix-vector product plus `O(N i)` for the
/// full reorthogonalization against all previous Lanczos vectors.
pub fn lanczos_recurrence(measure: &DiscreteMeasure, degree: usize) -> Result<JacobiMatrix> {
    measure.check_degree(degree)?;
    let nodes = measure.nodes();
    let tol = measure.breakdown_tolerance();

    let start: Vec<f64> = measure.weights().iter().map(|w| w.sqrt()).collect();
    let beta0 = dot(&start, &start).sqrt();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(degree + 1);
    basis.push(start.iter().map(|v| v / beta0).collect());

    let mut alphas = Vec::with_capacity(degree + 1);
    let mut betas: Vec<f64> = Vec::with_capacity(degree);
    for i in 0..=degree {
        let v = &basis[i];
        let mut r: Vec<f64> = nodes.iter().zip(v).map(|(u, x)| u * x).collect();
        let alpha = dot(v, &r);
        alphas.push(alpha);
        if i == degree {
            break;
        }
        axpy(-alpha, v, &mut r);
        if i > 0 {
            axpy(-betas[i - 1], &basis[i - 1], &mut r);
        }
        // Two passes of classical Gram-Schmidt keep the vectors orthonormal
        // to working precision.
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &r);
                axpy(-c, q, &mut r);
            }
        }
        let beta = dot(&r, &r).sqrt();
        if beta < tol {
            return Err(Error::Breakdown {
                requested: degree,
                achievable: i,
            });
        }
        betas.push(beta);
        for x in &mut r {
            *x /= beta;
        }
        basis.push(r);
    }
    JacobiMatrix::new(alphas, betas, beta0)
}

/// Discrete Stieltjes procedure: polynomial values at the nodes are advanced
/// by the three-term recurrence and normalized in the weighted inner product.
pub fn stieltjes_recurrence(measure: &DiscreteMeasure, degree: usize) -> Result<JacobiMatrix> {
    measure.check_degree(degree)?;
    let nodes = measure.nodes();
    let weights = measure.weights();
    let tol = measure.breakdown_tolerance();
    let norm = |p: &[f64]| -> f64 {
        weights
            .iter()
            .zip(p)
            .map(|(w, v)| w * v * v)
            .sum::<f64>()
            .sqrt()
    };

    let beta0 = weights.iter().sum::<f64>().sqrt();
    let mut prev = vec![0.0; nodes.len()];
    let mut cur = vec![1.0 / beta0; nodes.len()];
    let mut alphas = Vec::with_capacity(degree + 1);
    let mut betas: Vec<f64> = Vec::with_capacity(degree);
    for i in 0..=degree {
        let alpha: f64 = nodes
            .iter()
            .zip(weights)
            .zip(&cur)
            .map(|((u, w), p)| u * w * p * p)
            .sum();
        alphas.push(alpha);
        if i == degree {
            break;
        }
        let back = if i == 0 { 0.0 } else { betas[i - 1] };
        let next: Vec<f64> = nodes
            .iter()
            .zip(&cur)
            .zip(&prev)
            .map(|((u, p), q)| (u - alpha) * p - back * q)
            .collect();
        let beta = norm(&next);
        if beta < tol {
            return Err(Error::Breakdown {
                requested: degree,
                achievable: i,
            });
        }
        betas.push(beta);
        prev = cur;
        cur = next.into_iter().map(|v| v / beta).collect();
    }
    JacobiMatrix::new(alphas, betas, beta0)
}
